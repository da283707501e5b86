//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero when a criterion fails unless it is listed in `KNOWN_FAILING`
//! (see the README for the analysis behind that list).

use std::cell::Cell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use starlab::eps::{default_bracket, find_pole, resolvent_eps_kernel, zeta, EpsOperator};
use starlab::graph::{
    boundary_matrices, constant_a, constants_b_pi, moments_theta, CouplingConstants, EdgeCoordinate, ScalingFunction,
    StarPotential,
};
use starlab::lab::{cmd_converge, cmd_oracle, ExperimentConfig};
use starlab::limit::{lambda_matrix, lambda_matrix_direct, smatrix_direct, smatrix_limit, Momentum, SMatrix};
use starlab::tol;

const KNOWN_FAILING: &[u32] = &[7];
const DRAWS: u32 = 200;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|p| 0.5f64.powi(p)).collect()
}

/// `(theta, beta)` with pairwise distinct theta, `n` in 2..=6.
fn admissible() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (2usize..=6).prop_flat_map(|n| {
        (-2.0..0.0f64, prop::collection::vec(0.05..1.0f64, n - 1), -10.0..10.0f64).prop_map(|(start, steps, beta)| {
            let mut theta = vec![start];
            for s in steps {
                theta.push(theta.last().unwrap() + s);
            }
            (theta, beta)
        })
    })
}

fn draws(mut check: impl FnMut(Vec<f64>, f64)) {
    let mut runner = TestRunner::new(Config { cases: DRAWS, failure_persistence: None, ..Config::default() });
    let check = std::cell::RefCell::new(&mut check);
    runner
        .run(&admissible(), |(theta, beta)| {
            (check.borrow_mut())(theta, beta);
            Ok(())
        })
        .unwrap();
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a num_complex::Complex64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn constants() -> Outcome {
    let v = StarPotential::reference();
    let theta = moments_theta(&v);
    let a = constant_a(&v);
    let (b, pi) = constants_b_pi(&theta);
    let want = [0.5, -0.5, 0.0];
    let mut err = theta.iter().zip(want).map(|(t, w)| (t - w).abs()).fold(0.0, f64::max);
    err = err.max((a + 2.0 / 3.0).abs()).max((b + 0.5).abs());
    for i in 0..3 {
        for j in 0..3 {
            err = err.max((pi[(i, j)] - want[i] * want[j]).abs());
        }
    }
    outcome(err <= 1e-12, format!("max deviation {err:.2e} (tol 1e-12)"))
}

fn admissibility() -> Outcome {
    let (worst_res, worst_margin, count) = (Cell::new(0.0f64), Cell::new(f64::INFINITY), Cell::new(0));
    draws(|theta, beta| {
        let bp = boundary_matrices(&theta, beta).unwrap();
        worst_res.set(worst_res.get().max(bp.selfadjoint_residual()));
        worst_margin.set(worst_margin.get().min(bp.rank_margin()));
        count.set(count.get() + 1);
    });
    let passed = worst_res.get() <= 1e-10 && worst_margin.get() > tol::RANK && count.get() == DRAWS;
    outcome(
        passed,
        format!(
            "{} draws, max AB^T asymmetry {:.2e}, min singular value of (A|B) {:.2e}",
            count.get(),
            worst_res.get(),
            worst_margin.get()
        ),
    )
}

fn closed_vs_solve() -> Outcome {
    let (lam, s) = (Cell::new(0.0f64), Cell::new(0.0f64));
    draws(|theta, beta| {
        let n = theta.len();
        let bp = boundary_matrices(&theta, beta).unwrap();
        let cc = CouplingConstants::from_theta(theta, beta);
        for k in [0.1, 1.0, 10.0] {
            let m = Momentum::scattering(k).unwrap();
            let closed = lambda_matrix(m, &cc).unwrap();
            let direct = lambda_matrix_direct(m, &bp, n).unwrap();
            lam.set(lam.get().max(max_abs((closed - direct).iter())));
            let d = smatrix_limit(k, &cc).unwrap().max_entry_distance(&smatrix_direct(k, &bp).unwrap());
            s.set(s.get().max(d));
        }
    });
    let passed = lam.get() <= 1e-10 && s.get() <= 1e-10;
    outcome(passed, format!("max |Lambda diff| {:.2e}, max |S diff| {:.2e} (tol 1e-10)", lam.get(), s.get()))
}

fn physicality() -> Outcome {
    let (unitarity, symmetry) = (Cell::new(0.0f64), Cell::new(0.0f64));
    draws(|theta, beta| {
        let cc = CouplingConstants::from_theta(theta, beta);
        for k in [0.1, 1.0, 10.0] {
            let s = smatrix_limit(k, &cc).unwrap();
            unitarity.set(unitarity.get().max(s.unitarity_residual()));
            symmetry.set(symmetry.get().max(s.symmetry_residual()));
        }
    });
    let cc = CouplingConstants::from_theta(vec![0.5, -0.5, 0.0], -9.0 / 4.0);
    let low = smatrix_limit(1e-8, &cc).unwrap().max_entry_distance(&SMatrix::kirchhoff(1e-8, 3));
    let two = CouplingConstants::from_theta(vec![0.5, -0.5], -9.0 / 4.0);
    let s = smatrix_limit(1e4, &two).unwrap();
    let identity = SMatrix { k: 1e4, entries: nalgebra::DMatrix::identity(2, 2) };
    let high = s.distance(&identity);
    let passed = unitarity.get() <= 1e-10 && symmetry.get() <= 1e-10 && low <= 1e-6 && high <= 1e-3;
    outcome(
        passed,
        format!(
            "unitarity {:.2e}, symmetry {:.2e}, |S(1e-8) - Kirchhoff| {low:.2e}, n=2 |S(1e4) - I| {high:.2e}",
            unitarity.get(),
            symmetry.get()
        ),
    )
}

fn bound_state() -> Outcome {
    let cfg = ExperimentConfig::reference(-1.0);
    let cc = CouplingConstants::new(&cfg.potential, &cfg.scaling).unwrap();
    let limit = -64.0 / 81.0;
    let errors: Vec<f64> = ladder(3, 7)
        .into_iter()
        .map(|eps| {
            let op = EpsOperator::new(cfg.potential.clone(), cfg.scaling.clone(), eps).unwrap();
            let p = find_pole(&op, default_bracket(&op, &cc).unwrap()).unwrap().expect("bound state");
            (p.eigenvalue - limit).abs()
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    let passed = ratios.iter().all(|r| (0.35..=0.65).contains(r));
    outcome(
        passed,
        format!(
            "errors {}, halving ratios {ratios:.3?} (want [0.35, 0.65])",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn smatrix_rate() -> Outcome {
    let report = cmd_converge(&ExperimentConfig::reference(-1.0)).unwrap();
    let fits: Vec<_> = report.fits.iter().filter(|f| f.quantity.starts_with("smatrix_distance")).collect();
    let passed = fits.len() == 3 && fits.iter().all(|f| (0.8..=1.2).contains(&f.slope) && f.r_squared >= 0.98);
    let detail = fits
        .iter()
        .map(|f| format!("{}: slope {:.3}, R^2 {:.4}", f.quantity, f.slope, f.r_squared))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, detail)
}

fn resolvent_rate() -> Outcome {
    let cfg = ExperimentConfig::reference(-1.0);
    let report = cmd_converge(&cfg).unwrap();
    let fit = report.fits.iter().find(|f| f.quantity == "hs_distance").unwrap();
    let values: Vec<f64> = report.rows.iter().filter(|r| r.quantity == "hs_distance").map(|r| r.value).collect();
    let passed = report.hs_monotone && fit.slope >= 0.8 && report.max_tail_bound <= cfg.tolerances.hs_tail;
    outcome(
        passed,
        format!(
            "HS {values:.4?}, monotone {}, slope {:.3} (want >= 0.8), R^2 {:.4}, max tail bound {:.2e}",
            report.hs_monotone, fit.slope, fit.r_squared, report.max_tail_bound
        ),
    )
}

fn kernel_asymptotics() -> Outcome {
    let eps = 1e-3;
    let kappa = 1.0;
    let cfg = ExperimentConfig::reference(-1.0);
    let op = EpsOperator::new(cfg.potential.clone(), cfg.scaling.clone(), eps).unwrap();
    let cc = op.coupling().unwrap();
    let z = zeta(&op, kappa).unwrap();
    let zeta_dev = (z * eps.powi(4) * (1.0 - kappa * cc.beta * cc.b) / (-cc.beta) - 1.0).abs();
    let kernel = resolvent_eps_kernel(&op, kappa).unwrap();
    let lambda = lambda_matrix(Momentum::imaginary(kappa).unwrap(), &cc).unwrap();
    let mut factor_dev = 0.0f64;
    for (x, y) in [(0.5, 0.5), (1.5, 2.5), (3.0, 0.2)] {
        for i in 0..2 {
            for j in 0..2 {
                let fi = kernel.factor(EdgeCoordinate::new(i, x).unwrap()).unwrap();
                let fj = kernel.factor(EdgeCoordinate::new(j, y).unwrap()).unwrap();
                let want = lambda[(i, j)].re * (-kappa * (x + y)).exp();
                factor_dev = factor_dev.max((-kernel.zeta() * fi * fj / want - 1.0).abs());
            }
        }
    }
    let passed = zeta_dev <= 10.0 * eps && factor_dev <= 10.0 * eps;
    outcome(
        passed,
        format!("zeta deviation {zeta_dev:.2e}, rank-one factor deviation {factor_dev:.2e} (tol {:.0e})", 10.0 * eps),
    )
}

fn oracle() -> Outcome {
    let report = cmd_oracle(&ExperimentConfig::reference(-1.0)).unwrap();
    let wanted = ["eigenvalue", "smatrix", "free_resolvent_column"];
    let checks: Vec<_> = report.checks.iter().filter(|c| wanted.contains(&c.check.as_str())).collect();
    let passed = checks.len() == 3 && checks.iter().all(|c| c.passed);
    let detail = report
        .checks
        .iter()
        .map(|c| format!("{} {:.2e} (tol {:.0e})", c.check, c.error, c.tolerance))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, detail)
}

fn escaping_eigenvalue() -> Outcome {
    let v = StarPotential::reference();
    let scaling = ScalingFunction::explicit(-1.6, 0.1).unwrap();
    let cc = CouplingConstants::new(&v, &scaling).unwrap();
    let lead = (cc.a - 1.0 / -1.6) / cc.b;
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for eps in ladder(4, 7) {
        let op = EpsOperator::new(v.clone(), scaling.clone(), eps).unwrap();
        let p = find_pole(&op, default_bracket(&op, &cc).unwrap()).unwrap().expect("bound state");
        let ratio = p.kappa * eps / lead;
        worst = worst.max((ratio - 1.0).abs() / (10.0 * eps));
        ratios.push(ratio);
    }
    outcome(
        lead > 0.0 && worst <= 1.0,
        format!("lambda0 = -1.6, lambda1 = 0.1: ratios {ratios:.4?}, worst |ratio - 1|/(10 eps) = {worst:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "constants", Duration::from_secs(1), constants),
        (2, "boundary admissibility", Duration::from_secs(5), admissibility),
        (3, "closed form vs solve", Duration::from_secs(10), closed_vs_solve),
        (4, "S-matrix physicality", Duration::from_secs(5), physicality),
        (5, "bound-state convergence", Duration::from_secs(30), bound_state),
        (6, "S-matrix convergence", Duration::from_secs(120), smatrix_rate),
        (7, "norm-resolvent convergence", Duration::from_secs(300), resolvent_rate),
        (8, "zeta and kernel asymptotics", Duration::from_secs(10), kernel_asymptotics),
        (9, "oracle cross-validation", Duration::from_secs(120), oracle),
        (10, "escaping eigenvalue", Duration::from_secs(30), escaping_eigenvalue),
    ];
    let mut unexpected = Vec::new();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed <= budget;
        println!(
            "criterion {id:>2} {name:<28} {}  {}  [{:.2}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !passed {
            failed += 1;
            if !KNOWN_FAILING.contains(&id) {
                unexpected.push(id);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
