//! Batch front end: one JSON configuration in, result files out.

mod output;
mod request;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::SolverConfig;
use crate::eigensolver::{gap_lower_bound, solve, upper_bound, EigenPair};
use crate::error::{Error, Result};
use crate::extremal::{
    central_difference, directional_derivative, forward_difference, solve_extremal_gamma_eq1,
    solve_extremal_gamma_eq1_density, solve_extremal_gamma_gt1, ExtremalReport, PerturbationSpec,
};
use crate::measures::{constraint_value, random_potential, Potential, Weight};
use crate::oracle::{atom_grid_search, brute_force_max};

pub use output::{float, to_json_string, write_csv, write_json};
pub use request::{parse_config, validate_request, Mode, RunRequest};

/// Step sizes reported by `perturb`; the last one is asserted.
const PERTURB_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const PERTURB_TOL: f64 = 1e-5;

/// What a run produced and whether every assertion held.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub success: bool,
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

/// Process exit status for a library error: request problems are usage
/// errors (2), everything else is a failed run (1).
pub fn exit_status(err: &Error) -> i32 {
    match err {
        Error::Parameter(_) | Error::InvalidWeight(_) | Error::InvalidPotential(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

struct Sink {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Sink {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let p = self.path(name);
        write_csv(&p, header, rows)
    }
}

pub fn run(req: &RunRequest, cfg: &SolverConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    validate_request(req)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut sink = Sink {
        dir: cfg.output_dir.clone(),
        files: Vec::new(),
    };
    let (success, notes) = match req.mode {
        Mode::Solve => run_solve(req, cfg, &mut sink)?,
        Mode::Extremal => run_extremal(req, cfg, &mut sink)?,
        Mode::Oracle => run_oracle(req, cfg, &mut sink)?,
        Mode::Bounds => run_bounds(req, cfg, &mut sink)?,
        Mode::Perturb => run_perturb(req, cfg, &mut sink)?,
    };
    Ok(RunOutcome {
        success,
        files: sink.files,
        notes,
    })
}

/// Reads a configuration file and runs it with optional overrides.
pub fn run_file(path: &Path, mode: Option<Mode>, output_dir: Option<PathBuf>) -> Result<RunOutcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("config: cannot read {}: {e}", path.display())))?;
    let (mut req, mut cfg) = parse_config(&text)?;
    if let Some(m) = mode {
        req.mode = m;
    }
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    run(&req, &cfg)
}

fn eigen_rows(pair: &EigenPair) -> Vec<Vec<String>> {
    pair.x()
        .iter()
        .zip(pair.y())
        .zip(pair.dy())
        .map(|((x, y), d)| vec![float(*x), float(*y), float(*d)])
        .collect()
}

fn eigen_file(n: usize) -> String {
    if n == 0 {
        "eigenfunction.csv".into()
    } else {
        format!("eigenfunction_n{n}.csv")
    }
}

fn run_solve(req: &RunRequest, cfg: &SolverConfig, sink: &mut Sink) -> Result<(bool, Vec<String>)> {
    let q = req.potential.clone().unwrap_or_else(|| Potential::zero(cfg.grid_n));
    let pairs = (0..=req.n_max)
        .map(|n| solve(&q, n, cfg.tol_eigen))
        .collect::<Result<Vec<_>>>()?;
    for pair in &pairs {
        sink.csv(&eigen_file(pair.n()), &["x", "y", "dy"], eigen_rows(pair))?;
    }
    let constraint = constraint_value(&req.weight, req.gamma, &q).ok();
    sink.json(
        "result.json",
        &json!({
            "mode": "solve",
            "weight": req.weight,
            "gamma": req.gamma,
            "constraint": constraint,
            "eigenvalues": pairs.iter().map(|p| p.lambda()).collect::<Vec<_>>(),
            "eigenpairs": pairs,
        }),
    )?;
    Ok((true, Vec::new()))
}

fn extremal_report(w: &Weight, gamma: f64, cfg: &SolverConfig) -> Result<ExtremalReport> {
    if gamma > 1.0 {
        solve_extremal_gamma_gt1(w, gamma, cfg)
    } else if cfg.k_atoms == 0 {
        solve_extremal_gamma_eq1_density(w, cfg)
    } else {
        solve_extremal_gamma_eq1(w, cfg.k_atoms, cfg)
    }
}

fn run_extremal(req: &RunRequest, cfg: &SolverConfig, sink: &mut Sink) -> Result<(bool, Vec<String>)> {
    let report = extremal_report(&req.weight, req.gamma, cfg)?;
    let q = &report.q_hat;
    let y = &report.ground_state;
    let rows = y
        .x()
        .iter()
        .zip(y.y())
        .filter(|(x, _)| **x > 0.0 && **x < 1.0)
        .map(|(&x, &v)| {
            vec![
                float(x),
                float(v),
                float(q.density()[q.cell_of(x)]),
                float(v * v / req.weight.value(x)),
            ]
        })
        .collect();
    sink.csv("extremal.csv", &["x", "y", "q", "y2_over_r"], rows)?;
    let trace = report
        .trace
        .iter()
        .map(|t| vec![t.iter.to_string(), float(t.lambda0), float(t.residual)])
        .collect();
    sink.csv("trace.csv", &["iter", "lambda0", "residual"], trace)?;
    sink.json("result.json", &report)?;
    Ok((report.converged, report.warnings.clone()))
}

fn run_oracle(req: &RunRequest, cfg: &SolverConfig, sink: &mut Sink) -> Result<(bool, Vec<String>)> {
    let result = if req.gamma > 1.0 {
        brute_force_max(&req.weight, req.gamma, cfg.oracle_cells, cfg)?
    } else {
        atom_grid_search(&req.weight, cfg.grid_points, cfg.tol_eigen)?
    };
    if !result.scan.is_empty() {
        let rows = result.scan.iter().map(|(z, l)| vec![float(*z), float(*l)]).collect();
        sink.csv("scan.csv", &["zeta", "lambda0"], rows)?;
    }
    if !result.trace.is_empty() {
        let rows = result
            .trace
            .iter()
            .enumerate()
            .map(|(i, l)| vec![i.to_string(), float(*l)])
            .collect();
        sink.csv("trace.csv", &["iter", "lambda0"], rows)?;
    }
    sink.json("result.json", &result)?;
    let notes = if result.stalled {
        vec![format!("ascent stalled with KKT residual {:.3e}", result.kkt_residual)]
    } else {
        Vec::new()
    };
    Ok((!result.stalled, notes))
}

#[derive(Serialize)]
struct BoundsRow {
    n: usize,
    lambda: f64,
    upper_bound: f64,
    gap: f64,
    gap_lower_bound: f64,
    level: u32,
    gap_checked: bool,
    pass: bool,
}

fn run_bounds(req: &RunRequest, cfg: &SolverConfig, sink: &mut Sink) -> Result<(bool, Vec<String>)> {
    let q = match &req.potential {
        Some(q) => q.clone(),
        None => random_potential(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.grid_n, false),
    };
    let lambdas = (0..=req.n_max + 1)
        .map(|n| crate::eigensolver::eigenvalue(&q, n, cfg.tol_eigen))
        .collect::<Result<Vec<_>>>()?;
    let gap_checked = !q.has_atoms();
    let rows: Vec<BoundsRow> = (0..=req.n_max)
        .map(|n| {
            let ub = upper_bound(&q, n);
            let (glb, level) = gap_lower_bound(&q, n);
            let gap = lambdas[n + 1] - lambdas[n];
            let pass = lambdas[n] <= ub && (!gap_checked || gap >= glb);
            BoundsRow {
                n,
                lambda: lambdas[n],
                upper_bound: ub,
                gap,
                gap_lower_bound: glb,
                level,
                gap_checked,
                pass,
            }
        })
        .collect();
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                float(r.lambda),
                float(r.upper_bound),
                float(r.gap),
                float(r.gap_lower_bound),
                if r.pass { "pass" } else { "fail" }.to_string(),
            ]
        })
        .collect();
    sink.csv(
        "bounds.csv",
        &["n", "lambda", "upper_bound", "gap", "gap_lower_bound", "pass"],
        table,
    )?;
    let all = rows.iter().all(|r| r.pass);
    sink.json(
        "result.json",
        &json!({ "mode": "bounds", "potential": q, "rows": rows, "all_pass": all }),
    )?;
    let notes = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("bound violated at n = {}", r.n))
        .collect();
    Ok((all, notes))
}

fn run_perturb(req: &RunRequest, cfg: &SolverConfig, sink: &mut Sink) -> Result<(bool, Vec<String>)> {
    let base = match &req.potential {
        Some(q) => q.clone(),
        None => extremal_report(&req.weight, req.gamma, cfg)?.q_hat,
    };
    let direction = match &req.direction {
        Some(p) => p.clone(),
        None => random_potential(&mut ChaCha8Rng::seed_from_u64(cfg.seed), base.grid_n(), false),
    };
    let mut spec = PerturbationSpec {
        base,
        direction,
        alpha: 0.0,
    };
    spec.alpha = match req.alpha {
        Some(a) => a,
        None if req.gamma > 1.0 => {
            let floor = spec.alpha_floor(&req.weight, req.gamma)?;
            floor + 1e-9 * floor.abs().max(1.0)
        }
        None => 0.0,
    };
    let analytic = directional_derivative(&spec, &req.weight, req.gamma, cfg.tol_eigen)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut success = true;
    for eps in PERTURB_STEPS {
        let (fd, scheme) = match central_difference(&spec, eps, cfg.tol_eigen) {
            Ok(v) => (v, "central"),
            Err(Error::Parameter(_)) => (forward_difference(&spec, eps, cfg.tol_eigen)?, "forward"),
            Err(e) => return Err(e),
        };
        let err = (fd - analytic).abs();
        let asserted = eps == PERTURB_STEPS[PERTURB_STEPS.len() - 1];
        let pass = !asserted || err <= PERTURB_TOL;
        success &= pass;
        table.push(vec![
            float(eps),
            float(analytic),
            float(fd),
            float(err),
            scheme.to_string(),
            if pass { "pass" } else { "fail" }.to_string(),
        ]);
        rows.push(json!({ "eps": eps, "finite_difference": fd, "abs_error": err, "scheme": scheme, "asserted": asserted, "pass": pass }));
    }
    sink.csv(
        "perturb.csv",
        &["eps", "analytic", "finite_difference", "abs_error", "scheme", "pass"],
        table,
    )?;
    sink.json(
        "result.json",
        &json!({
            "mode": "perturb",
            "gamma": req.gamma,
            "alpha": spec.alpha,
            "analytic": analytic,
            "rows": rows,
            "base": spec.base,
            "direction": spec.direction,
            "all_pass": success,
        }),
    )?;
    let notes = if success {
        Vec::new()
    } else {
        vec!["finite difference disagrees with the analytic derivative".into()]
    };
    Ok((success, notes))
}
