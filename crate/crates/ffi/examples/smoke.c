/* Build: cc examples/smoke.c -Iinclude -L../../target/release -lrrpath_ffi -lm -o smoke */
#include <stdio.h>
#include "rrpath.h"

int main(void) {
    double t[65], x[65], y[65];
    for (int k = 0; k <= 64; k++) {
        t[k] = k / 64.0;
        x[k] = t[k];
    }
    RrpPath *p = NULL;
    if (rrp_path_lift(t, x, 65, 1, 0.5, RRP_LIFT_GEOMETRIC, &p) != RRP_STATUS_OK) {
        char msg[256];
        rrp_last_error(msg, sizeof msg);
        fprintf(stderr, "lift failed: %s\n", msg);
        return 1;
    }
    RrpNorms n;
    rrp_path_norms(p, RRP_BUDGET_AUTO, &n);
    double xi = 1.0;
    RrpSolveInfo info;
    RrpStatus s = rrp_solve(p, "linear:[[1]]", &xi, 1, y, 65, &info);
    printf("rrpath %s: |X|=%g |S|=%g y(1)=%.8f status=%d windows=%zu\n", rrp_version(), n.x_alpha, n.s_2alpha, y[64], s,
           info.windows);
    rrp_path_free(p);
    return s == RRP_STATUS_OK ? 0 : 1;
}
