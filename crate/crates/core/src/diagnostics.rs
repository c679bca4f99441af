//! Error norms, convergence tables and entropy / limiter time series.

use std::fmt::Write as _;

use crate::basis::{eval_series, GaussLegendre, Grid};
use crate::error::{Error, Result};
use crate::reconstruction::{ModalField, ReconField};
use crate::scheme::Simulation;

/// `Σ_i ∫_{T_i} u_h² / 2 dx`, exact from the Legendre coefficients.
pub fn total_entropy(u: &ModalField) -> f64 {
    let h = u.grid.h();
    let nb = u.n + 1;
    0.5 * h
        * u.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * c / (2 * (idx % nb) + 1) as f64)
            .sum::<f64>()
}

/// Norm in which convergence tables report errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorNorm {
    /// `(Σ_i ½ ∫_{-1}^{1} e_i(s)² ds)^{1/2}`: the root of the summed
    /// cell-mean squared errors, equal to the L2 norm divided by `√h`. This
    /// is the convention of the published error tables.
    #[default]
    CellRms,
    /// `(∫ e² dx)^{1/2}`.
    L2,
}

impl ErrorNorm {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorNorm::CellRms => "cell_rms",
            ErrorNorm::L2 => "l2",
        }
    }
}

impl std::fmt::Display for ErrorNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cell_rms" => Ok(ErrorNorm::CellRms),
            "l2" => Ok(ErrorNorm::L2),
            other => Err(Error::InvalidConfig(format!(
                "unknown error norm '{other}'"
            ))),
        }
    }
}

/// `Σ_i ∫_{-1}^{1} (p_i(s) - exact(x_i(s)))² ds` for the piecewise
/// polynomial with `nb` Legendre coefficients per cell.
fn reference_error_sum<F: Fn(f64) -> f64>(
    grid: &Grid,
    nb: usize,
    coeffs: &[f64],
    exact: F,
    quad: &GaussLegendre,
) -> f64 {
    let h = grid.h();
    let mut sum = 0.0;
    for i in 0..grid.n_cells {
        let xc = grid.center(i);
        let cell = &coeffs[i * nb..(i + 1) * nb];
        for (&s, &w) in quad.nodes.iter().zip(&quad.weights) {
            let d = eval_series(cell, s) - exact(xc + 0.5 * h * s);
            sum += w * d * d;
        }
    }
    sum
}

/// Twice the quadrature nodes the scheme would use on a cell, at least 10.
fn error_quadrature(degree: usize) -> GaussLegendre {
    GaussLegendre::new((2 * (degree + 2)).max(10))
}

fn scaled(norm: ErrorNorm, grid: &Grid, sum: f64) -> f64 {
    match norm {
        ErrorNorm::L2 => (0.5 * grid.h() * sum).sqrt(),
        ErrorNorm::CellRms => (0.5 * sum).sqrt(),
    }
}

/// L2 distance between `u` and `exact`.
pub fn l2_error<F: Fn(f64) -> f64>(u: &ModalField, exact: F) -> f64 {
    l2_error_with(u, exact, &error_quadrature(u.n))
}

pub fn l2_error_with<F: Fn(f64) -> f64>(u: &ModalField, exact: F, quad: &GaussLegendre) -> f64 {
    let sum = reference_error_sum(&u.grid, u.n + 1, &u.coeffs, exact, quad);
    scaled(ErrorNorm::L2, &u.grid, sum)
}

/// Error of the evolved solution in the given norm.
pub fn solution_error<F: Fn(f64) -> f64>(u: &ModalField, exact: F, norm: ErrorNorm) -> f64 {
    let sum = reference_error_sum(&u.grid, u.n + 1, &u.coeffs, exact, &error_quadrature(u.n));
    scaled(norm, &u.grid, sum)
}

/// Error of the reconstructed solution in the given norm.
pub fn recon_error<F: Fn(f64) -> f64>(w: &ReconField, exact: F, norm: ErrorNorm) -> f64 {
    let sum = reference_error_sum(&w.grid, w.m + 1, &w.coeffs, exact, &error_quadrature(w.m));
    scaled(norm, &w.grid, sum)
}

/// Observed order between a coarse and a fine run.
pub fn observed_order(coarse_error: f64, fine_error: f64, refinement: f64) -> f64 {
    (coarse_error / fine_error).ln() / refinement.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub n_cells: usize,
    pub l2_error: f64,
    /// Order against the previous (coarser) row; absent on the first row.
    pub observed_order: Option<f64>,
    pub theta_mean: f64,
}

/// Runs `run(n_cells) -> (l2_error, theta_mean)` on every grid and attaches
/// observed orders between successive rows.
pub fn convergence_table<F>(grids: &[usize], run: F) -> Result<Vec<ErrorReport>>
where
    F: Fn(usize) -> Result<(f64, f64)>,
{
    let results = grids.iter().map(|&n| run(n)).collect::<Result<Vec<_>>>()?;
    tabulate(grids, &results)
}

/// Builds the rows of a convergence table from per-grid results.
pub fn tabulate(grids: &[usize], results: &[(f64, f64)]) -> Result<Vec<ErrorReport>> {
    if grids.len() < 2 {
        return Err(Error::TooFewGrids(grids.len()));
    }
    if results.len() != grids.len() {
        return Err(Error::InvalidConfig(format!(
            "{} results for {} grids",
            results.len(),
            grids.len()
        )));
    }
    let mut rows: Vec<ErrorReport> = Vec::with_capacity(grids.len());
    for (k, (&n_cells, &(l2_error, theta_mean))) in grids.iter().zip(results).enumerate() {
        let observed_order = (k > 0).then(|| {
            let prev = &rows[k - 1];
            observed_order(
                prev.l2_error,
                l2_error,
                n_cells as f64 / prev.n_cells as f64,
            )
        });
        rows.push(ErrorReport {
            n_cells,
            l2_error,
            observed_order,
            theta_mean,
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "n_cells,l2_error,order,theta_mean";

/// CSV with header, scientific notation, empty order on the first row.
pub fn to_csv(rows: &[ErrorReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let order = r
            .observed_order
            .map(|p| format!("{p:.4e}"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{:.6e},{},{:.6e}",
            r.n_cells, r.l2_error, order, r.theta_mean
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// One point of an entropy / limiter time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPoint {
    pub t: f64,
    pub entropy: f64,
    /// Mean limiter value during the step that ended at `t` (1 at `t = 0`).
    pub theta_mean: f64,
}

/// Total entropy and per-step mean limiter of a run, starting at `t = 0`.
pub fn entropy_series(sim: &Simulation) -> Vec<EntropyPoint> {
    std::iter::once(EntropyPoint {
        t: 0.0,
        entropy: sim.initial_entropy,
        theta_mean: 1.0,
    })
    .chain(sim.history.iter().map(|r| EntropyPoint {
        t: r.t,
        entropy: r.entropy,
        theta_mean: r.stats.theta_mean,
    }))
    .collect()
}

/// Largest single-step increase of the total entropy, relative to its
/// initial value (0 when the first value is 0). Non-positive means the
/// series never increased.
pub fn max_relative_entropy_increase(series: &[EntropyPoint]) -> f64 {
    let e0 = series.first().map(|p| p.entropy).unwrap_or(0.0);
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    series
        .windows(2)
        .map(|w| (w[1].entropy - w[0].entropy) / scale)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn entropy_series_csv(series: &[EntropyPoint]) -> String {
    let mut out = String::from("t,entropy,theta_mean\n");
    for p in series {
        writeln!(out, "{:.9e},{:.12e},{:.6e}", p.t, p.entropy, p.theta_mean)
            .expect("writing to a String cannot fail");
    }
    out
}
