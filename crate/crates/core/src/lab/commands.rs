use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::fit::RateFit;
use super::hs::hs_distance;
use crate::eps::{default_bracket, find_pole, pole_asymptotic, resolvent_eps_kernel, EpsOperator, PoleResult};
use crate::error::{Error, Result};
use crate::fd::{oracle_eigenvalue, oracle_resolvent_column, oracle_smatrix, GridFunction};
use crate::graph::{boundary_matrices, CouplingConstants, EdgeCoordinate, ScalingFunction, StarPotential};
use crate::limit::{free_green, limit_point_spectrum, limit_pole, smatrix_limit, KernelEvaluator, Momentum, PoleKind};
use crate::scattering::smatrix_eps;
use crate::tol;

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn operator(cfg: &ExperimentConfig, eps: f64) -> Result<EpsOperator> {
    EpsOperator::with_order(cfg.potential.clone(), cfg.scaling.clone(), eps, cfg.quadrature.order)
}

fn pole_bracket(op: &EpsOperator, cc: &CouplingConstants) -> Result<(f64, f64)> {
    match default_bracket(op, cc) {
        Err(Error::ZeroB) => Ok((tol::KAPPA_MIN, 10.0)),
        other => other,
    }
}

fn pole(op: &EpsOperator, cc: &CouplingConstants) -> Result<Option<PoleResult>> {
    find_pole(op, pole_bracket(op, cc)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub theta: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub pi: Vec<Vec<f64>>,
    pub lambda0: f64,
    pub beta: f64,
    pub boundary_a: Vec<Vec<f64>>,
    pub boundary_b: Vec<Vec<f64>>,
    pub selfadjoint_residual: f64,
    pub rank_margin: f64,
    pub selfadjoint: bool,
}

pub fn cmd_constants(cfg: &ExperimentConfig) -> Result<ConstantsReport> {
    let cc = CouplingConstants::new(&cfg.potential, &cfg.scaling)?;
    let lambda0 = cfg.scaling.lambda0(cc.a)?;
    let bp = boundary_matrices(&cc.theta, cc.beta)?;
    let selfadjoint_residual = bp.selfadjoint_residual();
    let rank_margin = bp.rank_margin();
    Ok(ConstantsReport {
        n: cc.n(),
        theta: cc.theta.clone(),
        a: cc.a,
        b: cc.b,
        pi: rows(&cc.pi),
        lambda0,
        beta: cc.beta,
        boundary_a: rows(&bp.a),
        boundary_b: rows(&bp.b),
        selfadjoint_residual,
        rank_margin,
        selfadjoint: selfadjoint_residual <= tol::SELF_ADJOINT && rank_margin > tol::RANK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub epsilon: f64,
    pub kappa_eps: Option<f64>,
    pub eigenvalue: Option<f64>,
    pub predictor_kappa: Option<f64>,
    pub predictor_eigenvalue: Option<f64>,
    pub fd_eigenvalue: Option<f64>,
    pub fd_step: Option<f64>,
    pub error_limit: Option<f64>,
    pub error_predictor: Option<f64>,
    pub error_fd: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub limit_eigenvalue: Option<f64>,
    pub limit_pole_kappa: Option<f64>,
    pub limit_pole_kind: Option<String>,
    pub rows: Vec<SpectrumRow>,
    pub notes: Vec<String>,
}

/// Largest coarse FD grid, in nodes per edge, the spectrum table will build.
const FD_MAX_NODES: f64 = 1e5;

/// FD step `eps/q` with `q >= 10`, so that `x = eps` is a grid node, if it divides the
/// truncation length and the grid stays below [`FD_MAX_NODES`].
fn fd_step_for(eps: f64, step: f64, length: f64) -> Option<f64> {
    let q = (eps / step).ceil().max(10.0);
    let h = eps / q;
    let ratio = length / h;
    ((ratio - ratio.round()).abs() <= 1e-9 * ratio && ratio <= FD_MAX_NODES).then_some(h)
}

pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumReport> {
    let cc = CouplingConstants::new(&cfg.potential, &cfg.scaling)?;
    let limit_eigenvalue = limit_point_spectrum(&cc)?;
    let lp = limit_pole(&cc)?;
    let mut notes = Vec::new();
    let rows = cfg
        .epsilons
        .par_iter()
        .map(|&eps| -> Result<SpectrumRow> {
            let op = operator(cfg, eps)?;
            let found = pole(&op, &cc)?;
            let predictor = match pole_asymptotic(&op, &cc) {
                Ok(p) if p > 0.0 => Some(p),
                Ok(_) | Err(Error::ZeroB) => None,
                Err(e) => return Err(e),
            };
            let fd_step = fd_step_for(eps, cfg.oracle.step, cfg.oracle.length);
            let fd = match fd_step {
                Some(h) => oracle_eigenvalue(&op, cfg.oracle.length, h)?,
                None => None,
            };
            let eigenvalue = found.map(|p| p.eigenvalue);
            let predictor_eigenvalue = predictor.map(|p| -p * p);
            let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| (a - b).abs());
            Ok(SpectrumRow {
                epsilon: eps,
                kappa_eps: found.map(|p| p.kappa),
                eigenvalue,
                predictor_kappa: predictor,
                predictor_eigenvalue,
                fd_eigenvalue: fd,
                fd_step,
                error_limit: diff(eigenvalue, limit_eigenvalue),
                error_predictor: diff(found.map(|p| p.kappa), predictor),
                error_fd: diff(eigenvalue, fd),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().all(|r| r.kappa_eps.is_none()) {
        notes.push("no eigenvalue at any eps".into());
    }
    if let Some(r) = rows.iter().find(|r| r.fd_step.is_none()) {
        notes.push(format!(
            "FD column skipped where the grid does not divide the oracle length or is too fine (first at eps = {})",
            r.epsilon
        ));
    }
    Ok(SpectrumReport {
        limit_eigenvalue,
        limit_pole_kappa: lp.map(|p| p.kappa),
        limit_pole_kind: lp.map(|p| match p.kind {
            PoleKind::Bound => "bound".to_string(),
            PoleKind::Antibound => "antibound".to_string(),
        }),
        rows,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeRow {
    pub quantity: String,
    pub epsilon: f64,
    pub k: Option<f64>,
    pub kappa: Option<f64>,
    pub value: f64,
    pub error: f64,
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeReport {
    pub rows: Vec<ConvergeRow>,
    pub fits: Vec<RateFit>,
    pub hs_monotone: bool,
    pub max_tail_bound: f64,
    pub notes: Vec<String>,
}

pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<ConvergeReport> {
    if cfg.epsilons.len() < 4 {
        return Err(Error::Config(format!("converge needs at least 4 epsilons, got {}", cfg.epsilons.len())));
    }
    let cc = CouplingConstants::new(&cfg.potential, &cfg.scaling)?;
    let kappa = cfg.kappa;
    let limit_s = cfg.momenta.iter().map(|&k| smatrix_limit(k, &cc)).collect::<Result<Vec<_>>>()?;
    let limit_eigenvalue = limit_point_spectrum(&cc)?;

    let per_eps = cfg
        .epsilons
        .par_iter()
        .map(|&eps| -> Result<Vec<ConvergeRow>> {
            let op = operator(cfg, eps)?;
            let mut out = Vec::new();
            let hs = hs_distance(&op, &cc, kappa)?;
            out.push(ConvergeRow {
                quantity: "hs_distance".into(),
                epsilon: eps,
                k: None,
                kappa: Some(kappa),
                value: hs.value,
                error: hs.value,
                tail_bound: Some(hs.tail_bound),
            });
            for (s_lim, &k) in limit_s.iter().zip(&cfg.momenta) {
                let d = smatrix_eps(&op, k)?.distance(s_lim);
                out.push(ConvergeRow {
                    quantity: "smatrix_distance".into(),
                    epsilon: eps,
                    k: Some(k),
                    kappa: None,
                    value: d,
                    error: d,
                    tail_bound: None,
                });
            }
            if let Some(lim) = limit_eigenvalue {
                if let Some(p) = pole(&op, &cc)? {
                    out.push(ConvergeRow {
                        quantity: "eigenvalue".into(),
                        epsilon: eps,
                        k: None,
                        kappa: Some(p.kappa),
                        value: p.eigenvalue,
                        error: (p.eigenvalue - lim).abs(),
                        tail_bound: None,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ConvergeRow> = per_eps.into_iter().flatten().collect();

    let mut fits = Vec::new();
    let mut notes = Vec::new();
    let mut series = |name: String, pick: &dyn Fn(&ConvergeRow) -> bool| {
        let pairs: Vec<(f64, f64)> = rows.iter().filter(|r| pick(r)).map(|r| (r.epsilon, r.error)).collect();
        match RateFit::fit(name.clone(), pairs) {
            Ok(f) => fits.push(f),
            Err(e) => notes.push(format!("no rate fit for {name}: {e}")),
        }
    };
    series("hs_distance".into(), &|r| r.quantity == "hs_distance");
    for &k in &cfg.momenta {
        series(format!("smatrix_distance(k={k})"), &|r| r.quantity == "smatrix_distance" && r.k == Some(k));
    }
    if limit_eigenvalue.is_some() {
        series("eigenvalue".into(), &|r| r.quantity == "eigenvalue");
    }
    let hs: Vec<&ConvergeRow> = rows.iter().filter(|r| r.quantity == "hs_distance").collect();
    let hs_monotone = hs.windows(2).all(|w| w[1].value < w[0].value);
    let max_tail_bound = hs.iter().filter_map(|r| r.tail_bound).fold(0.0, f64::max);
    Ok(ConvergeReport { rows, fits, hs_monotone, max_tail_bound, notes })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub check: String,
    pub epsilon: f64,
    pub k: Option<f64>,
    pub kappa: Option<f64>,
    pub analytic: Option<f64>,
    pub oracle: Option<f64>,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
    pub all_passed: bool,
}

fn column_sup(col: &GridFunction<f64>, skip: impl Fn(usize, f64) -> bool, exact: impl Fn(usize, f64) -> f64) -> f64 {
    col.samples()
        .into_iter()
        .filter(|&(j, x, _)| !skip(j, x))
        .map(|(j, x, v)| (v - exact(j, x)).abs())
        .fold(0.0, f64::max)
}

pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<OracleReport> {
    let o = &cfg.oracle;
    let t = &cfg.tolerances;
    let kappa = cfg.kappa;
    let source = EdgeCoordinate::new(o.source_edge, o.source_x)?;

    let eigen = || -> Result<OracleCheck> {
        let op = operator(cfg, o.epsilon)?;
        let cc = CouplingConstants::new(&cfg.potential, &cfg.scaling)?;
        let analytic = pole(&op, &cc)?.map(|p| p.eigenvalue);
        let fd = oracle_eigenvalue(&op, o.length, o.step)?;
        let (error, passed) = match (analytic, fd) {
            (Some(a), Some(f)) => {
                let e = (a - f).abs() / a.abs();
                (e, e <= t.eigenvalue_rel)
            }
            (None, None) => (0.0, true),
            _ => (f64::INFINITY, false),
        };
        Ok(OracleCheck {
            check: "eigenvalue".into(),
            epsilon: o.epsilon,
            k: None,
            kappa: None,
            analytic,
            oracle: fd,
            error,
            tolerance: t.eigenvalue_rel,
            passed,
        })
    };

    let free_column = || -> Result<OracleCheck> {
        let free =
            EpsOperator::new(StarPotential::zero(cfg.n)?, ScalingFunction::explicit(1.0, 1.0)?, o.scattering_epsilon)?;
        let col = oracle_resolvent_column(&free, kappa, source, o.length, o.step)?;
        let m = Momentum::imaginary(kappa)?;
        let error =
            column_sup(&col, |_, _| false, |j, x| free_green(m, source, EdgeCoordinate { edge: j, x }, cfg.n).re);
        Ok(OracleCheck {
            check: "free_resolvent_column".into(),
            epsilon: o.scattering_epsilon,
            k: None,
            kappa: Some(kappa),
            analytic: None,
            oracle: None,
            error,
            tolerance: t.free_column_sup,
            passed: error <= t.free_column_sup,
        })
    };

    let kernel_column = || -> Result<OracleCheck> {
        let op = operator(cfg, o.scattering_epsilon)?;
        let kernel = resolvent_eps_kernel(&op, kappa)?;
        let col = oracle_resolvent_column(&op, kappa, source, o.length, o.step)?;
        let error = column_sup(
            &col,
            |j, x| j == source.edge && (x - source.x).abs() < o.diagonal_exclusion,
            |j, x| kernel.eval(source, EdgeCoordinate { edge: j, x }).re,
        );
        Ok(OracleCheck {
            check: "resolvent_column".into(),
            epsilon: o.scattering_epsilon,
            k: None,
            kappa: Some(kappa),
            analytic: None,
            oracle: None,
            error,
            tolerance: t.kernel_column_sup,
            passed: error <= t.kernel_column_sup,
        })
    };

    let smatrix = || -> Result<OracleCheck> {
        let op = operator(cfg, o.scattering_epsilon)?;
        let exact = smatrix_eps(&op, o.k)?;
        let fd = oracle_smatrix(&op, o.k, o.scattering_length, o.step)?;
        let error = fd.max_entry_distance(&exact);
        Ok(OracleCheck {
            check: "smatrix".into(),
            epsilon: o.scattering_epsilon,
            k: Some(o.k),
            kappa: None,
            analytic: None,
            oracle: None,
            error,
            tolerance: t.smatrix_entry,
            passed: error <= t.smatrix_entry,
        })
    };

    let jobs: Vec<&(dyn Fn() -> Result<OracleCheck> + Sync)> = vec![&eigen, &free_column, &kernel_column, &smatrix];
    let checks = jobs.par_iter().map(|job| job()).collect::<Result<Vec<_>>>()?;
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(OracleReport { checks, all_passed })
}
