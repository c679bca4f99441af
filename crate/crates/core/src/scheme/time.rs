//! Explicit Runge-Kutta time stepping and the simulation driver.

use std::fmt;
use std::str::FromStr;

use super::{EntropyBudget, Scheme};
use crate::basis::{left_trace, right_trace};
use crate::diagnostics::total_entropy;
use crate::error::{Error, Result};
use crate::reconstruction::ModalField;

/// A run is declared blown up once its sup norm exceeds this multiple of
/// the initial one.
pub const BLOW_UP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// `M + 1` stages, order `M + 1` for linear operators.
    #[default]
    LinearRk,
    /// Five-stage, fourth-order strong-stability-preserving method.
    Ssprk4,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::LinearRk => "linear-rk",
            Integrator::Ssprk4 => "ssprk4",
        }
    }

    /// Order of accuracy on linear problems for reconstruction degree `m`.
    pub fn order(&self, m: usize) -> usize {
        match self {
            Integrator::LinearRk => m + 1,
            Integrator::Ssprk4 => 4,
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear-rk" | "linear_rk" | "lrk" => Ok(Integrator::LinearRk),
            "ssprk4" | "ssp-rk4" => Ok(Integrator::Ssprk4),
            other => Err(Error::InvalidConfig(format!(
                "unknown integrator '{other}'"
            ))),
        }
    }
}

/// Final-stage weights `α_{m,0..m-1}` of the `m`-stage linear RK method
///
/// ```text
///     u^(i) = u^(i-1) + dt L u^(i-1),   i = 1..m-1
///     u^(m) = Σ_{k<m-1} α_{m,k} u^(k) + α_{m,m-1} (u^(m-1) + dt L u^(m-1))
/// ```
///
/// whose stability polynomial is the degree-`m` Taylor polynomial of `e^z`.
pub fn linear_rk_weights(m: usize) -> Vec<f64> {
    assert!(m >= 1, "need at least one stage");
    let mut alpha = vec![1.0];
    for stages in 2..=m {
        let mut next = vec![0.0; stages];
        for k in 1..stages - 1 {
            next[k] = alpha[k - 1] / k as f64;
        }
        next[stages - 1] = 1.0 / (1..=stages).map(|j| j as f64).product::<f64>();
        next[0] = 1.0 - next[1..].iter().sum::<f64>();
        alpha = next;
    }
    alpha
}

/// Coefficients of the five-stage fourth-order SSP method of Spiteri and
/// Ruuth.
pub struct Ssprk54;

impl Ssprk54 {
    pub const C1: f64 = 0.391752226571890;
    pub const A20: f64 = 0.444370493651235;
    pub const A21: f64 = 0.555629506348765;
    pub const C2: f64 = 0.368410593050371;
    pub const A30: f64 = 0.620101851488403;
    pub const A32: f64 = 0.379898148511597;
    pub const C3: f64 = 0.251891774271694;
    pub const A40: f64 = 0.178079954393132;
    pub const A43: f64 = 0.821920045606868;
    pub const C4: f64 = 0.544974750228521;
    pub const A52: f64 = 0.517231671970585;
    pub const A53: f64 = 0.096059710526147;
    pub const C53: f64 = 0.063692468666290;
    pub const A54: f64 = 0.386708617503269;
    pub const C54: f64 = 0.226007483236906;
}

/// Limiter activity over the stages of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// Mean interface limiter over all interfaces and stages.
    pub theta_mean: f64,
    pub theta_min: f64,
    pub min_margin: f64,
    pub min_cell_theta: f64,
    pub rhs_evals: usize,
}

impl StepStats {
    fn new() -> Self {
        Self {
            theta_mean: 0.0,
            theta_min: f64::INFINITY,
            min_margin: f64::INFINITY,
            min_cell_theta: 1.0,
            rhs_evals: 0,
        }
    }

    fn absorb(&mut self, b: &EntropyBudget) {
        self.theta_mean += b.mean_theta();
        self.theta_min = self.theta_min.min(b.min_theta());
        self.min_margin = self.min_margin.min(b.min_margin());
        self.min_cell_theta = b
            .cell_theta
            .iter()
            .copied()
            .fold(self.min_cell_theta, f64::min);
        self.rhs_evals += 1;
    }

    fn finish(mut self) -> Self {
        if self.rhs_evals > 0 {
            self.theta_mean /= self.rhs_evals as f64;
        } else {
            self.theta_mean = 1.0;
            self.theta_min = 1.0;
        }
        self
    }
}

fn lincomb(terms: &[(f64, &ModalField)]) -> ModalField {
    let mut out = terms[0].1.clone();
    out.scale(terms[0].0);
    for (a, f) in &terms[1..] {
        out.axpy(*a, f);
    }
    out
}

impl Scheme {
    /// One time step of the configured integrator. The limiter acts inside
    /// every stage.
    pub fn step(&self, u: &ModalField, dt: f64) -> Result<(ModalField, StepStats)> {
        self.step_observed(u, dt, &mut |_| {})
    }

    /// As [`Scheme::step`], handing every stage's entropy budget to
    /// `observer`.
    pub fn step_observed(
        &self,
        u: &ModalField,
        dt: f64,
        observer: &mut dyn FnMut(&EntropyBudget),
    ) -> Result<(ModalField, StepStats)> {
        if dt == 0.0 {
            return Ok((u.clone(), StepStats::new().finish()));
        }
        let mut stats = StepStats::new();
        let mut eval = |v: &ModalField| -> Result<ModalField> {
            let (du, b) = self.rhs(v)?;
            observer(&b);
            stats.absorb(&b);
            Ok(du)
        };
        let next = match self.config.integrator {
            Integrator::LinearRk => {
                let alpha = linear_rk_weights(self.config.m + 1);
                let stages = alpha.len();
                let mut acc = ModalField::zeros(u.grid.clone(), u.n);
                let mut cur = u.clone();
                for a in alpha.iter().take(stages - 1) {
                    acc.axpy(*a, &cur);
                    let l = eval(&cur)?;
                    cur.axpy(dt, &l);
                }
                let l = eval(&cur)?;
                cur.axpy(dt, &l);
                acc.axpy(alpha[stages - 1], &cur);
                acc
            }
            Integrator::Ssprk4 => {
                type C = Ssprk54;
                let l0 = eval(u)?;
                let mut u1 = u.clone();
                u1.axpy(C::C1 * dt, &l0);
                let l1 = eval(&u1)?;
                let mut u2 = lincomb(&[(C::A20, u), (C::A21, &u1)]);
                u2.axpy(C::C2 * dt, &l1);
                let l2 = eval(&u2)?;
                let mut u3 = lincomb(&[(C::A30, u), (C::A32, &u2)]);
                u3.axpy(C::C3 * dt, &l2);
                let l3 = eval(&u3)?;
                let mut u4 = lincomb(&[(C::A40, u), (C::A43, &u3)]);
                u4.axpy(C::C4 * dt, &l3);
                let l4 = eval(&u4)?;
                let mut u5 = lincomb(&[(C::A52, &u2), (C::A53, &u3), (C::A54, &u4)]);
                u5.axpy(C::C53 * dt, &l3);
                u5.axpy(C::C54 * dt, &l4);
                u5
            }
        };
        if let Some(cell) = next.first_non_finite_cell() {
            return Err(Error::NonFinite { cell });
        }
        Ok((next, stats.finish()))
    }
}

/// `cfl · h / ((2N+1) max|f'|)`, the maximum taken over quadrature nodes and
/// traces of `u` and the traces of its reconstruction. Zero wave speed gives
/// `cap`; the result never exceeds `cap`.
pub fn compute_dt(scheme: &Scheme, u: &ModalField, cap: f64) -> Result<f64> {
    let w = scheme.reconstruct(u)?;
    let basis = scheme.basis();
    let model = &scheme.model;
    let mut smax = 0.0f64;
    for i in 0..u.n_cells() {
        let (uc, wc) = (u.cell(i), w.cell(i));
        for q in 0..basis.n_nodes() {
            smax = smax.max(model.wave_speed(basis.eval_at_node(uc, q)).abs());
        }
        for v in [
            left_trace(uc),
            right_trace(uc),
            left_trace(wc),
            right_trace(wc),
        ] {
            smax = smax.max(model.wave_speed(v).abs());
        }
    }
    if !smax.is_finite() {
        return Err(Error::NonFinite {
            cell: u.first_non_finite_cell().unwrap_or(0),
        });
    }
    if smax == 0.0 {
        return Ok(cap);
    }
    let n = scheme.config.n;
    let dt = scheme.config.cfl * u.grid.h() / ((2 * n + 1) as f64 * smax);
    Ok(dt.min(cap))
}

/// One completed time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// `Σ_i ∫ u_h² / 2` at the end of the step.
    pub entropy: f64,
    pub stats: StepStats,
}

/// Time-marching driver: step size control, exact landing on target
/// times, blow-up detection and the entropy / limiter history.
#[derive(Debug, Clone)]
pub struct Simulation {
    scheme: Scheme,
    pub u: ModalField,
    pub t: f64,
    pub initial_entropy: f64,
    pub history: Vec<StepRecord>,
    initial_sup: f64,
    fixed_dt: Option<f64>,
    convergence_h_ref: Option<f64>,
}

impl Simulation {
    pub fn new(scheme: Scheme, u0: ModalField) -> Result<Self> {
        if u0.n != scheme.config.n {
            return Err(Error::DegreeMismatch {
                expected: scheme.config.n,
                found: u0.n,
            });
        }
        if let Some(cell) = u0.first_non_finite_cell() {
            return Err(Error::NonFinite { cell });
        }
        Ok(Self {
            initial_entropy: total_entropy(&u0),
            initial_sup: u0.sup_bound(),
            scheme,
            u: u0,
            t: 0.0,
            history: Vec::new(),
            fixed_dt: None,
            convergence_h_ref: None,
        })
    }

    /// Use `dt` (shortened to land on target times) instead of the CFL law.
    pub fn with_fixed_dt(mut self, dt: f64) -> Self {
        self.fixed_dt = Some(dt);
        self
    }

    /// Convergence-study mode: with the fourth-order SSP integrator and
    /// `M + 1 > 4`, shrink the step like `h^{(M+1)/4}` relative to the grid
    /// spacing `h_ref`, so that time errors decay at the spatial rate.
    pub fn with_convergence_scaling(mut self, h_ref: f64) -> Self {
        self.convergence_h_ref = Some(h_ref);
        self
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn entropy(&self) -> f64 {
        total_entropy(&self.u)
    }

    /// Mean limiter value over all steps taken so far (1 before the first).
    pub fn theta_mean(&self) -> f64 {
        if self.history.is_empty() {
            return 1.0;
        }
        self.history.iter().map(|r| r.stats.theta_mean).sum::<f64>() / self.history.len() as f64
    }

    pub fn min_margin(&self) -> f64 {
        self.history
            .iter()
            .map(|r| r.stats.min_margin)
            .fold(f64::INFINITY, f64::min)
    }

    /// Step size the driver would take now, before landing adjustment.
    pub fn step_size(&self, cap: f64) -> Result<f64> {
        if let Some(dt) = self.fixed_dt {
            return Ok(dt.min(cap));
        }
        let mut dt = compute_dt(&self.scheme, &self.u, cap)?;
        let cfg = &self.scheme.config;
        if let Some(h_ref) = self.convergence_h_ref {
            let p = (cfg.m + 1) as f64;
            if cfg.integrator == Integrator::Ssprk4 && p > 4.0 {
                dt *= (self.u.grid.h() / h_ref).powf(p / 4.0 - 1.0);
            }
        }
        Ok(dt.min(cap))
    }

    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        self.advance_to_observed(t_end, &mut |_| {})
    }

    /// Steps until `t == t_end`, splitting the remaining interval evenly.
    pub fn advance_to_observed(
        &mut self,
        t_end: f64,
        observer: &mut dyn FnMut(&EntropyBudget),
    ) -> Result<()> {
        while self.t < t_end {
            let remaining = t_end - self.t;
            let dt_max = self.step_size(remaining)?;
            let n_steps = ((remaining / dt_max) * (1.0 - 1e-12)).ceil().max(1.0);
            let dt = remaining / n_steps;
            let (next, stats) = self.scheme.step_observed(&self.u, dt, observer)?;
            self.u = next;
            self.t = if n_steps == 1.0 { t_end } else { self.t + dt };
            let sup = self.u.sup_bound();
            let limit = BLOW_UP_FACTOR
                * if self.initial_sup > 0.0 {
                    self.initial_sup
                } else {
                    1.0
                };
            if sup > limit {
                return Err(Error::BlowUp {
                    t: self.t,
                    norm: sup,
                    limit,
                });
            }
            self.history.push(StepRecord {
                t: self.t,
                dt,
                entropy: total_entropy(&self.u),
                stats,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Boundary, Grid};
    use crate::physics::FluxModel;
    use crate::scheme::SchemeConfig;
    use approx::assert_relative_eq;

    #[test]
    fn linear_rk_weights_reproduce_taylor_polynomial() {
        for m in 1..=8 {
            let alpha = linear_rk_weights(m);
            assert_relative_eq!(alpha.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
            for &z in &[-0.7, 0.3, 1.1] {
                // scalar L = z, dt = 1
                let mut acc = 0.0;
                let mut cur = 1.0f64;
                for a in alpha.iter().take(m - 1) {
                    acc += a * cur;
                    cur += z * cur;
                }
                acc += alpha[m - 1] * (cur + z * cur);
                let mut taylor = 0.0;
                let mut term = 1.0;
                for j in 0..=m {
                    taylor += term;
                    term *= z / (j + 1) as f64;
                }
                assert_relative_eq!(acc, taylor, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn ssprk54_has_fourth_order_stability_polynomial() {
        type C = Ssprk54;
        let step = |u: f64, z: f64| {
            let u1 = u + C::C1 * z * u;
            let u2 = C::A20 * u + C::A21 * u1 + C::C2 * z * u1;
            let u3 = C::A30 * u + C::A32 * u2 + C::C3 * z * u2;
            let u4 = C::A40 * u + C::A43 * u3 + C::C4 * z * u3;
            C::A52 * u2 + C::A53 * u3 + C::C53 * z * u3 + C::A54 * u4 + C::C54 * z * u4
        };
        // R(z) - Σ_{j<=4} z^j/j! = O(z^5)
        for &z in &[1e-2f64, 2e-2, 4e-2] {
            let taylor = 1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0;
            let r = step(1.0, z);
            assert!(
                (r - taylor).abs() < 0.02 * z.powi(5),
                "z={z}: {}",
                r - taylor
            );
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let grid = Grid::new(-1.0, 1.0, 6, Boundary::Periodic).unwrap();
        let u = ModalField::project(grid, 2, |x| (3.0 * x).sin());
        let scheme = Scheme::new(SchemeConfig::new(2, 4), FluxModel::Burgers).unwrap();
        assert_eq!(scheme.step(&u, 0.0).unwrap().0, u);
    }

    #[test]
    fn forward_euler_finite_volume_step() {
        let grid = Grid::new(0.0, 1.0, 5, Boundary::Periodic).unwrap();
        let vals = [0.0, 1.0, 0.0, 0.0, 2.0];
        let mut u = ModalField::zeros(grid, 0);
        u.coeffs.copy_from_slice(&vals);
        let model = FluxModel::LinearAdvection { speed: 1.0 };
        let scheme = Scheme::new(SchemeConfig::new(0, 0), model).unwrap();
        let (next, stats) = scheme.step(&u, 0.1).unwrap();
        // upwind: u_i - (dt/h)(u_i - u_{i-1}) with dt/h = 0.5
        let expected = [1.0, 0.5, 0.5, 0.0, 1.0];
        for (a, b) in next.coeffs.iter().zip(expected) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_eq!(stats.rhs_evals, 1);
    }

    #[test]
    fn dt_examples() {
        let model = FluxModel::LinearAdvection { speed: 1.0 };
        let grid = Grid::new(0.0, 1.0, 10, Boundary::Periodic).unwrap();
        let u = ModalField::project(grid, 1, |x| x.sin());
        let scheme = Scheme::new(SchemeConfig::new(1, 2).with_cfl(0.9), model).unwrap();
        assert_relative_eq!(compute_dt(&scheme, &u, 1.0).unwrap(), 0.03, epsilon = 1e-15);

        let grid = Grid::new(-1.0, 1.0, 160, Boundary::Transmissive).unwrap();
        let zero = ModalField::zeros(grid.clone(), 2);
        let burgers = Scheme::new(SchemeConfig::new(2, 4), FluxModel::Burgers).unwrap();
        assert_eq!(compute_dt(&burgers, &zero, 0.25).unwrap(), 0.25);

        // ‖u‖∞ = 5 attained at a node: constant state
        let five = ModalField::project(grid, 2, |_| 5.0);
        assert_relative_eq!(
            compute_dt(&burgers, &five, 1.0).unwrap(),
            4.5e-4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn advection_returns_after_one_period() {
        let grid = Grid::new(-1.0, 1.0, 40, Boundary::Periodic).unwrap();
        let f = |x: f64| (std::f64::consts::PI * x).sin();
        let u0 = ModalField::project(grid, 2, f);
        let model = FluxModel::LinearAdvection { speed: 1.0 };
        let scheme = Scheme::new(SchemeConfig::new(2, 2).with_limiter(false), model).unwrap();
        let mut sim = Simulation::new(scheme, u0.clone()).unwrap();
        sim.advance_to(2.0).unwrap();
        assert_eq!(sim.t, 2.0);
        let err: f64 = sim
            .u
            .coeffs
            .iter()
            .zip(&u0.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert!(sim.history.iter().all(|r| r.stats.theta_mean == 1.0));
        // uniform steps
        let dt0 = sim.history[0].dt;
        assert!(sim.history.iter().all(|r| (r.dt - dt0).abs() < 1e-14));
    }

    #[test]
    fn mass_conserved_over_steps() {
        let grid = Grid::new(-1.0, 1.0, 20, Boundary::Periodic).unwrap();
        let u0 = ModalField::project(grid, 1, |x| 0.5 + 0.25 * (std::f64::consts::PI * x).sin());
        let cfg = SchemeConfig::new(1, 3).with_integrator(Integrator::Ssprk4);
        let scheme = Scheme::new(cfg, FluxModel::Traffic).unwrap();
        let mass0 = u0.total_mass();
        let mut sim = Simulation::new(scheme, u0).unwrap();
        sim.advance_to(0.3).unwrap();
        assert!((sim.u.total_mass() - mass0).abs() < 1e-12 * sim.history.len() as f64);
    }

    #[test]
    fn blow_up_is_reported() {
        // unlimited P1P5 with a huge step is unstable
        let grid = Grid::new(-1.0, 1.0, 10, Boundary::Periodic).unwrap();
        let u0 = ModalField::project(grid, 1, |x| (std::f64::consts::PI * x).sin());
        let model = FluxModel::LinearAdvection { speed: 1.0 };
        let scheme = Scheme::new(SchemeConfig::new(1, 5).with_limiter(false), model).unwrap();
        let mut sim = Simulation::new(scheme, u0).unwrap().with_fixed_dt(0.5);
        let err = sim.advance_to(200.0).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "{err}");
    }

    #[test]
    fn integrator_names_round_trip() {
        for i in [Integrator::LinearRk, Integrator::Ssprk4] {
            assert_eq!(i.name().parse::<Integrator>().unwrap(), i);
        }
        assert!("euler".parse::<Integrator>().is_err());
    }
}
