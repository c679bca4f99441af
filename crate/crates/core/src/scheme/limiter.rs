//! Square-entropy budget of a cell and the flux limiter that keeps it
//! non-negative.
//!
//! Interface `i-1/2` belongs to cell `i`. With `[[u]] = u⁺ - u⁻`,
//! `f^r = f^w - f^u` and the limited flux `f^u + θ f^r`, cell `i` satisfies
//! the discrete square-entropy inequality when
//!
//! ```text
//!     A - V - θ [[u]] f^r >= 0,
//!     A = g(u⁺) - g(u⁻) - [[u]] f^u,
//!     V = ∫ (f(w_h) - f(u_h)) ∂u_h/∂x dx.
//! ```

use crate::basis::{left_trace, right_trace, Boundary, ReferenceBasis};
use crate::physics::{FluxModel, NumericalFlux};
use crate::reconstruction::{ModalField, ReconField};

/// Values of the in-cell fallback scan, largest first.
const FALLBACK_GRID: [f64; 11] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0];

/// Entropy bookkeeping of one right-hand side evaluation.
///
/// Per-cell vectors have `n_cells` entries. Per-interface vectors have
/// `grid.n_interfaces()` entries; entry `i` is the interface `i-1/2` at the
/// left end of cell `i`, and a transmissive grid has one extra entry for the
/// right boundary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntropyBudget {
    pub a: Vec<f64>,
    /// Volume term of the polynomial actually used inside the cell (after any
    /// in-cell fallback).
    pub v: Vec<f64>,
    pub jump: Vec<f64>,
    pub fr: Vec<f64>,
    pub theta: Vec<f64>,
    /// In-cell fallback factor `θ_i`; 1 where the residual is not scaled.
    pub cell_theta: Vec<f64>,
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub w_minus: Vec<f64>,
    pub w_plus: Vec<f64>,
    /// Numerical flux of the unreconstructed traces, `f^u`.
    pub fu: Vec<f64>,
    /// Numerical flux of the reconstructed traces, `f^w`.
    pub fw: Vec<f64>,
}

impl EntropyBudget {
    pub fn n_cells(&self) -> usize {
        self.a.len()
    }

    /// `A - V - θ [[u]] f^r` of cell `i`.
    pub fn margin(&self, i: usize) -> f64 {
        self.a[i] - self.v[i] - self.theta[i] * self.jump[i] * self.fr[i]
    }

    pub fn min_margin(&self) -> f64 {
        (0..self.n_cells())
            .map(|i| self.margin(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Mean limiter value over the interfaces attached to a cell.
    pub fn mean_theta(&self) -> f64 {
        let n = self.n_cells();
        self.theta[..n].iter().sum::<f64>() / n as f64
    }

    pub fn min_theta(&self) -> f64 {
        self.theta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Interface flux actually used: exactly `f^w` when `θ = 1`.
    #[inline]
    pub fn limited_flux(&self, j: usize) -> f64 {
        if self.theta[j] == 1.0 {
            self.fw[j]
        } else {
            self.fu[j] + self.theta[j] * self.fr[j]
        }
    }
}

/// Default absolute tolerance on the cell entropy budget: deficits
/// `A - V - [[u]] f^r >= -DEFAULT_TOLERANCE` leave the flux unlimited.
///
/// On smooth solutions the reconstructed trace sits within `O(h^{N+2})` of
/// the jump midpoint, on either side, so an exact test keeps limiting by
/// vanishing amounts on every grid. The tolerance switches the limiter off
/// once these deficits drop below it.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Deficit accepted as satisfied: `tol`, but never below roundoff level.
#[inline]
fn allowance(a: f64, v: f64, tol: f64) -> f64 {
    tol.max(1e-14 * (1.0 + a.abs() + v.abs()))
}

/// Interface limiter from the budget `A - V - θ d`, `d = jump · fr`.
///
/// Returns 1 when `θ = 1` keeps the budget above `-tol`. Otherwise, with
/// `d > 0`, the largest `θ` with a non-negative budget; 0 when none exists,
/// in which case the caller has to fall back to in-cell limiting.
pub fn limiter_theta(a: f64, v: f64, jump: f64, fr: f64, tol: f64) -> f64 {
    let d = jump * fr;
    let budget = a - v;
    if budget - d >= -allowance(a, v, tol) {
        1.0
    } else if d > 0.0 {
        (budget / d).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Volume term `∫_{-1}^{1} (f(w) - f(u)) u'(s) ds` of one cell, by the
/// scheme quadrature. Independent of the cell width.
pub fn volume_difference(
    basis: &ReferenceBasis,
    model: &FluxModel,
    u_cell: &[f64],
    w_cell: &[f64],
) -> f64 {
    let quad = &basis.quadrature;
    (0..quad.len())
        .map(|q| {
            let u = basis.eval_at_node(u_cell, q);
            let w = basis.eval_at_node(w_cell, q);
            if u == w {
                return 0.0;
            }
            quad.weights[q] * (model.flux(w) - model.flux(u)) * basis.deriv_at_node(u_cell, q)
        })
        .sum()
}

/// `u + θ (w - u)` for a reconstruction whose first `u.len()` coefficients
/// equal `u`.
pub fn blend(u_cell: &[f64], w_cell: &[f64], theta: f64) -> Vec<f64> {
    let nb = u_cell.len();
    let mut out = w_cell.to_vec();
    out[..nb].copy_from_slice(u_cell);
    for c in &mut out[nb..] {
        *c *= theta;
    }
    out
}

/// In-cell fallback: the largest `θ_i` on the grid `1, 0.9, …, 0` with
/// `A - V(θ_i) >= -tol`, where `V(θ_i)` uses the blended polynomial
/// `u + θ_i (w - u)`. Returns `θ_i`, the blended coefficients and `V(θ_i)`.
pub fn in_cell_fallback(
    basis: &ReferenceBasis,
    model: &FluxModel,
    u_cell: &[f64],
    w_cell: &[f64],
    a: f64,
    tol: f64,
) -> (f64, Vec<f64>, f64) {
    for &t in &FALLBACK_GRID[..FALLBACK_GRID.len() - 1] {
        let blended = blend(u_cell, w_cell, t);
        let v = volume_difference(basis, model, u_cell, &blended);
        if a - v >= -allowance(a, v, tol) {
            return (t, blended, v);
        }
    }
    (0.0, blend(u_cell, w_cell, 0.0), 0.0)
}

/// Pointwise condition for linear advection with the upwind flux: the
/// reconstructed left trace must lie on the correct side of the midpoint of
/// the data jump.
pub fn pointwise_condition_check(u_minus: f64, u_plus: f64, w_minus: f64) -> bool {
    let mid = 0.5 * (u_minus + u_plus);
    if u_minus > u_plus {
        w_minus >= mid
    } else if u_minus < u_plus {
        w_minus <= mid
    } else {
        true
    }
}

/// Unlimited entropy budget of `u` with reconstruction `w`: `θ = 1` at every
/// interface and no in-cell fallback.
///
/// Transmissive boundary interfaces see the interior trace from both sides.
pub fn entropy_budget(
    basis: &ReferenceBasis,
    model: &FluxModel,
    flux: NumericalFlux,
    u: &ModalField,
    w: &ReconField,
) -> EntropyBudget {
    let n_cells = u.n_cells();
    let n_if = u.grid.n_interfaces();
    let mut b = EntropyBudget {
        a: vec![0.0; n_cells],
        v: vec![0.0; n_cells],
        jump: vec![0.0; n_if],
        fr: vec![0.0; n_if],
        theta: vec![1.0; n_if],
        cell_theta: vec![1.0; n_cells],
        u_minus: vec![0.0; n_if],
        u_plus: vec![0.0; n_if],
        w_minus: vec![0.0; n_if],
        w_plus: vec![0.0; n_if],
        fu: vec![0.0; n_if],
        fw: vec![0.0; n_if],
    };
    for j in 0..n_if {
        let (um, up, wm, wp) = match (u.grid.boundary, j) {
            (Boundary::Transmissive, 0) => {
                let (u0, w0) = (left_trace(u.cell(0)), left_trace(w.cell(0)));
                (u0, u0, w0, w0)
            }
            (Boundary::Transmissive, j) if j == n_cells => {
                let last = n_cells - 1;
                let (u1, w1) = (right_trace(u.cell(last)), right_trace(w.cell(last)));
                (u1, u1, w1, w1)
            }
            _ => {
                let l = u.grid.neighbor(j, -1);
                (
                    right_trace(u.cell(l)),
                    left_trace(u.cell(j)),
                    right_trace(w.cell(l)),
                    left_trace(w.cell(j)),
                )
            }
        };
        let fu = flux.value(model, um, up);
        let fw = flux.value(model, wm, wp);
        b.u_minus[j] = um;
        b.u_plus[j] = up;
        b.w_minus[j] = wm;
        b.w_plus[j] = wp;
        b.jump[j] = up - um;
        b.fu[j] = fu;
        b.fw[j] = fw;
        b.fr[j] = fw - fu;
    }
    for i in 0..n_cells {
        b.a[i] = model.flux_integral(b.u_minus[i], b.u_plus[i]) - b.jump[i] * b.fu[i];
        b.v[i] = volume_difference(basis, model, u.cell(i), w.cell(i));
    }
    b
}
