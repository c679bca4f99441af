//! Physical flux models with their square-entropy pairs, and the two-point
//! numerical fluxes used at cell interfaces.
//!
//! For the square entropy `Q(u) = u²/2` the entropy flux is
//! `F(u) = f(u) u - g(u)` with `g' = f`. Only differences of `g` are ever
//! consumed, so the integration constant is fixed arbitrarily.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxModel {
    /// `f(u) = speed · u`
    LinearAdvection { speed: f64 },
    /// `f(u) = u² / 2`
    Burgers,
    /// Lighthill-Whitham type traffic flow, `f(ρ) = 2ρ exp(-ρ²/2)`,
    /// strictly concave on the admissible densities `[0, 1]`.
    Traffic,
}

impl FluxModel {
    pub fn name(&self) -> &'static str {
        match self {
            FluxModel::LinearAdvection { .. } => "advection",
            FluxModel::Burgers => "burgers",
            FluxModel::Traffic => "traffic",
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, FluxModel::LinearAdvection { .. })
    }

    #[inline]
    pub fn flux(&self, u: f64) -> f64 {
        match *self {
            FluxModel::LinearAdvection { speed } => speed * u,
            FluxModel::Burgers => 0.5 * u * u,
            FluxModel::Traffic => 2.0 * u * (-0.5 * u * u).exp(),
        }
    }

    /// Flux evaluation that rejects states outside the admissible range.
    pub fn flux_checked(&self, u: f64) -> Result<f64> {
        self.check_admissible(u)?;
        Ok(self.flux(u))
    }

    /// Characteristic speed `f'(u)`.
    #[inline]
    pub fn wave_speed(&self, u: f64) -> f64 {
        match *self {
            FluxModel::LinearAdvection { speed } => speed,
            FluxModel::Burgers => u,
            FluxModel::Traffic => 2.0 * (-0.5 * u * u).exp() * (1.0 - u * u),
        }
    }

    /// A primitive `g` of the flux.
    pub fn primitive(&self, u: f64) -> f64 {
        match *self {
            FluxModel::LinearAdvection { speed } => 0.5 * speed * u * u,
            FluxModel::Burgers => u * u * u / 6.0,
            FluxModel::Traffic => -2.0 * (-0.5 * u * u).exp(),
        }
    }

    /// `g(b) - g(a) = ∫_a^b f(u) du`, evaluated in factored form so that the
    /// result carries a factor `(b - a)` without cancellation.
    #[inline]
    pub fn flux_integral(&self, a: f64, b: f64) -> f64 {
        let d = b - a;
        match *self {
            FluxModel::LinearAdvection { speed } => 0.5 * speed * d * (a + b),
            FluxModel::Burgers => d * (a * a + a * b + b * b) / 6.0,
            FluxModel::Traffic => {
                // 2 (e^{-a²/2} - e^{-b²/2}) = -2 e^{-a²/2} expm1(-(b-a)(b+a)/2)
                -2.0 * (-0.5 * a * a).exp() * (-0.5 * d * (a + b)).exp_m1()
            }
        }
    }

    /// Square-entropy flux `F(u) = f(u) u - g(u)`.
    pub fn entropy_flux(&self, u: f64) -> f64 {
        self.flux(u) * u - self.primitive(u)
    }

    /// Closed interval of admissible states.
    pub fn admissible_range(&self) -> (f64, f64) {
        match self {
            FluxModel::Traffic => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn check_admissible(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.admissible_range();
        if u.is_finite() && u >= lo && u <= hi {
            Ok(())
        } else {
            Err(Error::InadmissibleState {
                model: self.name(),
                value: u,
            })
        }
    }

    /// Points where `f' = 0`; extrema of the flux for the exact Riemann flux.
    fn critical_points(&self) -> &'static [f64] {
        match self {
            FluxModel::LinearAdvection { .. } => &[],
            FluxModel::Burgers => &[0.0],
            FluxModel::Traffic => &[-1.0, 1.0],
        }
    }
}

impl fmt::Display for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `advection`, `advection:<speed>`, `burgers` or `traffic`.
impl FromStr for FluxModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "advection" => Ok(FluxModel::LinearAdvection { speed: 1.0 }),
            "burgers" => Ok(FluxModel::Burgers),
            "traffic" => Ok(FluxModel::Traffic),
            _ => {
                if let Some(speed) = s.strip_prefix("advection:") {
                    let speed: f64 = speed.parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad advection speed '{speed}'"))
                    })?;
                    Ok(FluxModel::LinearAdvection { speed })
                } else {
                    Err(Error::InvalidConfig(format!("unknown flux model '{s}'")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumericalFlux {
    /// Local Lax-Friedrichs with the two-point speed bound.
    #[default]
    Rusanov,
    /// Upwind flux; linear advection only.
    Upwind,
    /// Exact Riemann (Godunov) flux.
    Godunov,
}

impl NumericalFlux {
    pub fn name(&self) -> &'static str {
        match self {
            NumericalFlux::Rusanov => "rusanov",
            NumericalFlux::Upwind => "upwind",
            NumericalFlux::Godunov => "godunov",
        }
    }

    pub fn supports(&self, model: &FluxModel) -> Result<()> {
        match (self, model) {
            (NumericalFlux::Upwind, m) if !m.is_linear() => Err(Error::UnsupportedFlux {
                flux: self.name(),
                model: m.name(),
            }),
            _ => Ok(()),
        }
    }

    /// `f̄(u_left, u_right)`.
    pub fn evaluate(&self, model: &FluxModel, u_left: f64, u_right: f64) -> Result<f64> {
        self.supports(model)?;
        Ok(self.value(model, u_left, u_right))
    }

    /// Unchecked evaluation; the caller has validated the pairing with
    /// [`NumericalFlux::supports`].
    #[inline]
    pub(crate) fn value(&self, model: &FluxModel, ul: f64, ur: f64) -> f64 {
        match self {
            NumericalFlux::Rusanov => {
                let smax = model.wave_speed(ul).abs().max(model.wave_speed(ur).abs());
                0.5 * (model.flux(ul) + model.flux(ur)) - 0.5 * smax * (ur - ul)
            }
            NumericalFlux::Upwind => match *model {
                FluxModel::LinearAdvection { speed } if speed >= 0.0 => speed * ul,
                FluxModel::LinearAdvection { speed } => speed * ur,
                _ => unreachable!("upwind flux used with a nonlinear model"),
            },
            NumericalFlux::Godunov => {
                // min of f over [ul, ur] if ul <= ur, max over [ur, ul] otherwise
                let (lo, hi) = if ul <= ur { (ul, ur) } else { (ur, ul) };
                let candidates = model
                    .critical_points()
                    .iter()
                    .copied()
                    .filter(|&c| c > lo && c < hi)
                    .chain([ul, ur])
                    .map(|u| model.flux(u));
                if ul <= ur {
                    candidates.fold(f64::INFINITY, f64::min)
                } else {
                    candidates.fold(f64::NEG_INFINITY, f64::max)
                }
            }
        }
    }
}

impl fmt::Display for NumericalFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NumericalFlux {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rusanov" => Ok(NumericalFlux::Rusanov),
            "upwind" => Ok(NumericalFlux::Upwind),
            "godunov" => Ok(NumericalFlux::Godunov),
            other => Err(Error::InvalidConfig(format!(
                "unknown numerical flux '{other}'"
            ))),
        }
    }
}
