//! Semi-discrete `PNPM` right-hand side with the entropy flux limiter, and
//! explicit time integration.
//!
//! For cell `i` and test index `k <= N`:
//!
//! ```text
//!     h/(2k+1) dû_k/dt = -(f_{i+1/2} - (-1)^k f_{i-1/2}) + ∫_{-1}^{1} f(w_h) P_k'(s) ds
//! ```
//!
//! where the interface fluxes are evaluated on reconstructed traces and,
//! with the limiter on, blended towards the flux of the unreconstructed
//! traces as far as needed to keep every cell's entropy budget non-negative.

mod limiter;
mod time;

pub use limiter::{
    blend, entropy_budget, in_cell_fallback, limiter_theta, pointwise_condition_check,
    volume_difference, EntropyBudget, DEFAULT_TOLERANCE,
};
pub use time::{
    compute_dt, linear_rk_weights, Integrator, Simulation, Ssprk54, StepRecord, StepStats,
    BLOW_UP_FACTOR,
};

use crate::basis::{Boundary, ReferenceBasis};
use crate::error::{Error, Result};
use crate::physics::{FluxModel, NumericalFlux};
use crate::reconstruction::{check_degrees, ModalField, ReconField, ReconOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub n: usize,
    pub m: usize,
    pub flux: NumericalFlux,
    pub limiter: bool,
    pub cfl: f64,
    pub integrator: Integrator,
    /// In-cell residual scaling when the interface limiter alone cannot
    /// restore the entropy budget.
    pub fallback: bool,
    /// Entropy budget deficit tolerated without limiting.
    pub tolerance: f64,
}

impl SchemeConfig {
    /// Rusanov flux, limiter and fallback on, linear RK of order `M + 1`.
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            flux: NumericalFlux::Rusanov,
            limiter: true,
            cfl: 0.9,
            integrator: Integrator::LinearRk,
            fallback: true,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_limiter(mut self, on: bool) -> Self {
        self.limiter = on;
        self
    }

    pub fn with_flux(mut self, flux: NumericalFlux) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_degrees(self.n, self.m)?;
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "limiter tolerance must be finite and >= 0, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// A configured scheme: degrees, flux model, reconstruction operator and
/// quadrature tables. Immutable; shareable across threads.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub config: SchemeConfig,
    pub model: FluxModel,
    op: ReconOperator,
    basis: ReferenceBasis,
}

impl Scheme {
    pub fn new(config: SchemeConfig, model: FluxModel) -> Result<Self> {
        config.validate()?;
        config.flux.supports(&model)?;
        let op = ReconOperator::build(config.n, config.m)?;
        Ok(Self {
            config,
            model,
            op,
            basis: ReferenceBasis::new(config.m),
        })
    }

    pub fn operator(&self) -> &ReconOperator {
        &self.op
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn reconstruct(&self, u: &ModalField) -> Result<ReconField> {
        self.op.reconstruct(u)
    }

    /// Budget with the limiter and fallback applied as configured. Also
    /// returns the reconstruction with fallback-blended cells, which is what
    /// the volume integrals use.
    pub fn limited_budget(&self, u: &ModalField) -> Result<(EntropyBudget, ReconField)> {
        if let Some(cell) = u.first_non_finite_cell() {
            return Err(Error::NonFinite { cell });
        }
        let mut w = self.op.reconstruct(u)?;
        let mut b = entropy_budget(&self.basis, &self.model, self.config.flux, u, &w);
        if !self.config.limiter {
            return Ok((b, w));
        }
        let m1 = self.config.m + 1;
        for i in 0..u.n_cells() {
            let theta = limiter_theta(b.a[i], b.v[i], b.jump[i], b.fr[i], self.config.tolerance);
            b.theta[i] = theta;
            if self.config.fallback && theta == 0.0 && b.a[i] - b.v[i] < -self.config.tolerance {
                let (ti, blended, v) = in_cell_fallback(
                    &self.basis,
                    &self.model,
                    u.cell(i),
                    w.cell(i),
                    b.a[i],
                    self.config.tolerance,
                );
                b.cell_theta[i] = ti;
                b.v[i] = v;
                w.coeffs[i * m1..(i + 1) * m1].copy_from_slice(&blended);
            }
        }
        Ok((b, w))
    }

    /// `dû/dt` and the entropy budget of this evaluation.
    pub fn rhs(&self, u: &ModalField) -> Result<(ModalField, EntropyBudget)> {
        let (b, w) = self.limited_budget(u)?;
        let n = self.config.n;
        let n_cells = u.n_cells();
        let h = u.grid.h();
        let quad = &self.basis.quadrature;
        let mut fvol = vec![0.0; quad.len()];
        let mut du = ModalField::zeros(u.grid.clone(), n);
        for i in 0..n_cells {
            let f_left = b.limited_flux(i);
            let f_right = b.limited_flux(match u.grid.boundary {
                Boundary::Periodic => (i + 1) % n_cells,
                Boundary::Transmissive => i + 1,
            });
            let wc = w.cell(i);
            for (q, fq) in fvol.iter_mut().enumerate() {
                *fq = quad.weights[q] * self.model.flux(self.basis.eval_at_node(wc, q));
            }
            let out = du.cell_mut(i);
            for (k, o) in out.iter_mut().enumerate() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let volume: f64 = fvol
                    .iter()
                    .enumerate()
                    .map(|(q, fq)| fq * self.basis.derivs[q][k])
                    .sum();
                *o = (2 * k + 1) as f64 / h * (volume - (f_right - sign * f_left));
            }
        }
        if let Some(cell) = du.first_non_finite_cell() {
            return Err(Error::NonFinite { cell });
        }
        Ok((du, b))
    }
}
