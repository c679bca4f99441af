//! The four subcommands. Each returns its results so tests can inspect them;
//! files go under the configured output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use pnpm_core::basis::eval_series;
use pnpm_core::diagnostics::{
    entropy_series, entropy_series_csv, recon_error, solution_error, tabulate, to_csv, ErrorReport,
};
use pnpm_core::reconstruction::{appendix_a_invertibility, InvertibilityReport};
use pnpm_core::scheme::pointwise_condition_check;
use pnpm_core::{
    Boundary, Error, FluxModel, Grid, ModalField, NumericalFlux, Scheme, SchemeConfig, Simulation,
};

use crate::config::{ErrorField, RunConfig};
use crate::error::CliError;

/// Plot points per cell in snapshot files.
pub const SNAPSHOT_POINTS: usize = 8;

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{t}.csv")
}

/// `x,u,w` at equispaced points of every cell, interface points included, so
/// that jumps of both fields show up in plots.
pub fn snapshot_csv(scheme: &Scheme, u: &ModalField) -> Result<String, CliError> {
    let w = scheme.reconstruct(u)?;
    let grid = &u.grid;
    let mut out = String::from("x,u,w\n");
    for i in 0..u.n_cells() {
        for j in 0..SNAPSHOT_POINTS {
            let s = -1.0 + 2.0 * j as f64 / (SNAPSHOT_POINTS - 1) as f64;
            let x = grid.center(i) + 0.5 * grid.h() * s;
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e}\n",
                x,
                eval_series(u.cell(i), s),
                eval_series(w.cell(i), s)
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub snapshots: Vec<PathBuf>,
    pub entropy_file: PathBuf,
    pub steps: usize,
    pub final_entropy: f64,
    pub initial_entropy: f64,
    pub theta_mean: f64,
    pub min_margin: f64,
}

/// Time-marches the configured problem, writing one snapshot per output time
/// and the entropy / limiter series.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let scheme = Scheme::new(cfg.scheme_config(), cfg.setup.model)?;
    let u0 = cfg.setup.initial_field(cfg.cells, cfg.n)?;
    let mut sim = Simulation::new(scheme, u0)?;
    create_dir(&cfg.out)?;
    let mut snapshots = Vec::new();
    for t in cfg.output_times() {
        sim.advance_to(t)?;
        let path = cfg.out.join(snapshot_name(t));
        write_file(&path, &snapshot_csv(sim.scheme(), &sim.u)?)?;
        snapshots.push(path);
    }
    let entropy_file = cfg.out.join("entropy.csv");
    write_file(&entropy_file, &entropy_series_csv(&entropy_series(&sim)))?;
    Ok(RunSummary {
        snapshots,
        entropy_file,
        steps: sim.history.len(),
        final_entropy: sim.entropy(),
        initial_entropy: sim.initial_entropy,
        theta_mean: sim.theta_mean(),
        min_margin: sim.min_margin(),
    })
}

/// Error at `t_end` and mean limiter value of one grid of a study.
pub fn convergence_point(
    cfg: &RunConfig,
    cells: usize,
    h_ref: f64,
) -> Result<(f64, f64), CliError> {
    let exact = cfg.setup.exact(cfg.t_end).ok_or_else(|| {
        CliError::Config(format!(
            "no exact solution known for the {} model with these boundaries",
            cfg.setup.model
        ))
    })?;
    let scheme = Scheme::new(cfg.scheme_config(), cfg.setup.model)?;
    let u0 = cfg.setup.initial_field(cells, cfg.n)?;
    let mut sim = Simulation::new(scheme, u0)?.with_convergence_scaling(h_ref);
    sim.advance_to(cfg.t_end)?;
    let error = match cfg.error_field {
        ErrorField::Reconstruction => {
            recon_error(&sim.scheme().reconstruct(&sim.u)?, exact, cfg.error_norm)
        }
        ErrorField::Solution => solution_error(&sim.u, exact, cfg.error_norm),
    };
    Ok((error, sim.theta_mean()))
}

/// Convergence table over `cfg.grids`, grids run concurrently.
pub fn convergence_rows(cfg: &RunConfig) -> Result<Vec<ErrorReport>, CliError> {
    cfg.validate()?;
    if cfg.grids.len() < 2 {
        return Err(Error::TooFewGrids(cfg.grids.len()).into());
    }
    if cfg.setup.exact(cfg.t_end).is_none() {
        return Err(CliError::Config(format!(
            "convergence needs an exact solution; none for {} with {:?} boundaries",
            cfg.setup.model, cfg.setup.boundary
        )));
    }
    let coarsest = *cfg.grids.iter().min().expect("at least two grids");
    let h_ref = (cfg.setup.right - cfg.setup.left) / coarsest as f64;
    let results = thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .grids
            .iter()
            .map(|&cells| scope.spawn(move || convergence_point(cfg, cells, h_ref)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(tabulate(&cfg.grids, &results)?)
}

pub fn convergence_name(cfg: &RunConfig) -> String {
    let mode = if cfg.limiter { "on" } else { "off" };
    format!("convergence_P{}P{}_{mode}.csv", cfg.n, cfg.m)
}

/// Writes one convergence CSV for the configured limiter setting, or one
/// each for off and on with `compare`.
pub fn converge(
    cfg: &RunConfig,
    compare: bool,
) -> Result<Vec<(PathBuf, Vec<ErrorReport>)>, CliError> {
    let modes = if compare {
        vec![false, true]
    } else {
        vec![cfg.limiter]
    };
    create_dir(&cfg.out)?;
    let mut out = Vec::new();
    for limiter in modes {
        let mut c = cfg.clone();
        c.limiter = limiter;
        let rows = convergence_rows(&c)?;
        let path = c.out.join(convergence_name(&c));
        write_file(&path, &to_csv(&rows))?;
        out.push((path, rows));
    }
    Ok(out)
}

/// Outcome of the pointwise-condition check at the interface `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub u_minus: f64,
    pub u_plus: f64,
    pub midpoint: f64,
    /// Left trace of the reconstruction, which the upwind flux uses.
    pub w_minus: f64,
    pub violated: bool,
    /// `A - V - [[u]] f^r` of the cell right of the interface, unlimited.
    pub margin_unlimited: f64,
    pub theta: f64,
    pub margin_limited: f64,
}

/// Cell of the test data whose left interface is `x = 1`.
const COUNTER_CELL: usize = 2;

/// P1 data on four cells of width 2 over (-3, 5): constants 2 and -2, then
/// `s` and 1. The jump at `x = 1` makes the P1P5 reconstruction overshoot on
/// the wrong side of the jump midpoint. With `smooth`, the data are the
/// projection of `x/4`, which the reconstruction reproduces exactly.
pub fn counterexample_data(smooth: bool) -> Result<ModalField, CliError> {
    let grid = Grid::new(-3.0, 5.0, 4, Boundary::Transmissive)?;
    if smooth {
        return Ok(ModalField::project(grid, 1, |x| 0.25 * x));
    }
    let mut u = ModalField::zeros(grid, 1);
    u.coeffs
        .copy_from_slice(&[2.0, 0.0, -2.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    Ok(u)
}

pub fn counterexample(smooth: bool) -> Result<Counterexample, CliError> {
    let u = counterexample_data(smooth)?;
    let model = FluxModel::LinearAdvection { speed: 1.0 };
    let base = SchemeConfig::new(1, 5).with_flux(NumericalFlux::Upwind);
    let plain = Scheme::new(base.with_limiter(false), model)?;
    let limited = Scheme::new(base.with_limiter(true), model)?;
    let (b0, _) = plain.limited_budget(&u)?;
    let (b1, _) = limited.limited_budget(&u)?;
    let i = COUNTER_CELL;
    let (um, up, wm) = (b0.u_minus[i], b0.u_plus[i], b0.w_minus[i]);
    Ok(Counterexample {
        u_minus: um,
        u_plus: up,
        midpoint: 0.5 * (um + up),
        w_minus: wm,
        violated: !pointwise_condition_check(um, up, wm),
        margin_unlimited: b0.margin(i),
        theta: b1.theta[i],
        margin_limited: b1.margin(i),
    })
}

/// Invertibility table of the square reconstruction system for
/// `N = 0..=n_max`.
pub fn appendix(n_max: i64) -> Result<Vec<InvertibilityReport>, CliError> {
    if n_max < 0 {
        return Err(CliError::Config(format!("n_max must be >= 0, got {n_max}")));
    }
    Ok((0..=n_max as usize).map(appendix_a_invertibility).collect())
}

pub fn appendix_table(rows: &[InvertibilityReport]) -> String {
    let mut out = String::from("N,min_singular_value,max_singular_value,condition_number\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.6e},{:.6e},{:.6e}\n",
            r.n, r.min_singular_value, r.max_singular_value, r.condition_number
        ));
    }
    out
}
