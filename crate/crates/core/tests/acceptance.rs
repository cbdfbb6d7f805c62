//! Acceptance criteria A1–A9. Prints one PASS/FAIL line per criterion and fails if any does.

use rrpath::check::{
    bound_corpus, chen_scenario, exact_integral_scenario, fbm_variance_scenario, lift_scenario, ode_scenario, run_checks,
    sewing_rate_scenario, LiftScenario, OdeScenario, CHEN_TOL, CONTRACTION_TARGET, EXACT_INTEGRAL_TOL, EXP_ORACLE_TOL,
    FBM_VARIANCE_TOL, LIFT_ORACLE_TOL, SEWING_SLOPE_MARGIN, SIN_ORACLE_TOL,
};
use rrpath::SolveReport;
use std::time::{Duration, Instant};

const SEED: u64 = 20240611;

struct Outcome {
    passed: bool,
    detail: String,
    /// Serialized scenario outputs, compared byte for byte in A9.
    digest: String,
}

struct Runner {
    results: Vec<bool>,
    print: bool,
}

impl Runner {
    /// `spent` is time already taken by shared setup that counts against `limit`.
    fn run(
        &mut self,
        id: &str,
        title: &str,
        limit: Option<Duration>,
        spent: Duration,
        f: impl FnOnce() -> Result<Outcome, String>,
    ) -> String {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed() + spent;
    let (passed, detail, digest) = match out {
        Ok(o) => (o.passed, o.detail, o.digest),
        Err(e) => (false, format!("error: {e}"), String::new()),
    };
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let limit_text = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        let ok = passed && in_time;
        if self.print {
            println!(
                "{} {id} {title}: {detail}; {:.2}s{limit_text}{}",
                if ok { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64(),
                if in_time { "" } else { " over time" }
            );
        }
        self.results.push(ok);
        digest
    }
}

fn a1() -> Result<Outcome, String> {
    let sc = chen_scenario(1 << 12, 1000, SEED).map_err(|e| e.to_string())?;
    let worst = sc.cases.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst <= CHEN_TOL && sc.cases.len() == 12 && !sc.corrupted.passed,
        detail: format!("{} lifts x {} triples, max defect {worst:.3e} <= {CHEN_TOL:e}", sc.cases.len(), sc.triples_per_case),
        digest: serde_json::to_string(&sc).unwrap(),
    })
}

fn a2() -> Result<Outcome, String> {
    let rows = exact_integral_scenario(&[2, 16, 1024]).map_err(|e| e.to_string())?;
    let worst = rows
        .iter()
        .map(|(label, _, v)| (v - if label == "geometric" { 0.5 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst <= EXACT_INTEGRAL_TOL && rows.len() == 6,
        detail: format!("max |error| {worst:.3e} <= {EXACT_INTEGRAL_TOL:e} over N in {{2, 16, 1024}}"),
        digest: serde_json::to_string(&rows).unwrap(),
    })
}

fn a3() -> Result<Outcome, String> {
    let rep = sewing_rate_scenario(1 << 12).map_err(|e| e.to_string())?;
    let target = 3.0 * 0.45 - SEWING_SLOPE_MARGIN;
    Ok(Outcome {
        passed: rep.slope >= target && rep.scales >= 6 && rep.violations == 0,
        detail: format!(
            "slope {:.4} >= {target:.2} over {} scales, {} pairs, {} rhs violations",
            rep.slope,
            rep.scales,
            rep.pairs.len(),
            rep.violations
        ),
        digest: serde_json::to_string(&(rep.slope, &rep.lhs, &rep.rhs)).unwrap(),
    })
}

fn solve_digest(r: &SolveReport) -> String {
    let values: Vec<f64> = r.solution.y().values().iter().map(|v| v.as_slice()[0]).collect();
    serde_json::to_string(&(values, &r.steps, r.residual_norm)).unwrap()
}

fn a4(ode: &rrpath::Result<OdeScenario>) -> Result<Outcome, String> {
    let ode = ode.as_ref().map_err(ToString::to_string)?;
    Ok(Outcome {
        passed: ode.exp_error <= EXP_ORACLE_TOL && ode.sin_error <= SIN_ORACLE_TOL,
        detail: format!(
            "exp error {:.3e} <= {EXP_ORACLE_TOL:e}, sin error {:.3e} <= {SIN_ORACLE_TOL:e}",
            ode.exp_error, ode.sin_error
        ),
        digest: solve_digest(&ode.exp) + &solve_digest(&ode.sin),
    })
}

fn a5(lift: &rrpath::Result<LiftScenario>) -> Result<Outcome, String> {
    let l = lift.as_ref().map_err(ToString::to_string)?;
    let gap_target = 10.0 * LIFT_ORACLE_TOL;
    Ok(Outcome {
        passed: l.geometric_error <= LIFT_ORACLE_TOL && l.ito_error <= LIFT_ORACLE_TOL && l.gap_at_end > gap_target,
        detail: format!(
            "geometric error {:.3e}, ito error {:.3e} <= {LIFT_ORACLE_TOL:e}, gap at T {:.4} > {gap_target}",
            l.geometric_error, l.ito_error, l.gap_at_end
        ),
        digest: solve_digest(&l.geometric) + &solve_digest(&l.ito),
    })
}

fn a6(ode: &rrpath::Result<OdeScenario>, lift: &rrpath::Result<LiftScenario>) -> Result<Outcome, String> {
    let ode = ode.as_ref().map_err(ToString::to_string)?;
    let lift = lift.as_ref().map_err(ToString::to_string)?;
    let reports = [&ode.exp, &ode.sin, &lift.geometric, &lift.ito];
    let windows: usize = reports.iter().map(|r| r.steps.len()).sum();
    let worst = reports.iter().map(|r| r.max_final_ratio()).fold(0.0, f64::max);
    let gap = ode.sin_start_gap.max(lift.start_gap);
    let gap_target = 10.0 * ode.fixed_point_tol;
    Ok(Outcome {
        passed: worst <= CONTRACTION_TARGET && gap <= gap_target,
        detail: format!(
            "{windows} windows, max final ratio {worst:.3e} <= {CONTRACTION_TARGET}, start gap {gap:.3e} <= {gap_target:e}"
        ),
        digest: format!("{worst:e} {gap:e}"),
    })
}

fn a7() -> Result<Outcome, String> {
    let c = bound_corpus(120, 128, SEED).map_err(|e| e.to_string())?;
    let violations = c.compose_violations + c.leibniz_violations + c.integral_violations;
    Ok(Outcome {
        passed: c.triples >= 100 && violations == 0,
        detail: format!(
            "{} triples, violations compose/leibniz/integral = {}/{}/{}",
            c.triples, c.compose_violations, c.leibniz_violations, c.integral_violations
        ),
        digest: serde_json::to_string(&c).unwrap(),
    })
}

fn a8() -> Result<Outcome, String> {
    let rows = fbm_variance_scenario(&[0.4, 0.5], 10_000, 1 << 8, SEED).map_err(|e| e.to_string())?;
    let worst = rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(Outcome {
        passed: rows.len() == 6 && worst <= FBM_VARIANCE_TOL,
        detail: format!("max relative variance error {worst:.4} <= {FBM_VARIANCE_TOL} over {} (H, t) cells", rows.len()),
        digest: serde_json::to_string(&rows).unwrap(),
    })
}

/// A1–A8 in order; returns the digests.
fn scenarios(r: &mut Runner) -> Vec<String> {
    let secs = |s| Some(Duration::from_secs(s));
    let zero = Duration::ZERO;
    let mut digests = vec![
        r.run("A1", "Chen consistency", secs(10), zero, a1),
        r.run("A2", "exact-integral oracle", secs(1), zero, a2),
        r.run("A3", "sewing rate", secs(30), zero, a3),
    ];
    let start = Instant::now();
    let ode = ode_scenario(1 << 12);
    let ode_time = start.elapsed();
    digests.push(r.run("A4", "ODE oracles", secs(30), ode_time, || a4(&ode)));
    let start = Instant::now();
    let lift = lift_scenario(1 << 14, SEED);
    let lift_time = start.elapsed();
    digests.push(r.run("A5", "lift sensitivity", secs(60), lift_time, || a5(&lift)));
    digests.push(r.run("A6", "contraction", secs(60), ode_time + lift_time, || a6(&ode, &lift)));
    digests.push(r.run("A7", "bound domination", secs(120), zero, a7));
    digests.push(r.run("A8", "fBm variance", secs(60), zero, a8));
    digests
}

fn main() {
    let mut runner = Runner { results: Vec::new(), print: true };
    let first = scenarios(&mut runner);

    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool");
    let a9 = || -> Result<Outcome, String> {
        let again = pool(4).install(|| scenarios(&mut Runner { results: Vec::new(), print: false }));
        let check_1 = pool(1).install(|| run_checks(SEED).to_json());
        let check_4 = pool(4).install(|| run_checks(SEED).to_json());
        let check_again = pool(4).install(|| run_checks(SEED).to_json());
        let scenarios_match = first == again && first.iter().all(|d| !d.is_empty());
        let checks_match = check_1 == check_4 && check_4 == check_again;
        Ok(Outcome {
            passed: scenarios_match && checks_match,
            detail: format!(
                "scenario outputs identical across runs and pools: {scenarios_match}; check report identical across runs and pools {{1, 4}}: {checks_match} ({} bytes)",
                check_1.len()
            ),
            digest: String::new(),
        })
    };
    runner.run("A9", "determinism", None, Duration::ZERO, a9);

    let failed = runner.results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", runner.results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
