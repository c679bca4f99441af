//! Test problems: the three presets and the initial profiles available to
//! custom runs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use pnpm_core::{Boundary, FluxModel, Grid, Integrator, ModalField};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// `u_t + u_x = 0`, `u₀ = sin⁴(πx)` on (-1, 1), periodic.
    AdvectionSin4,
    /// Burgers, two Gaussians of opposite sign on (-1, 1), transmissive.
    BurgersGaussians,
    /// Traffic flow, `ρ₀ = 1/2 + sin(πx)/4` on (-1, 1), periodic.
    TrafficSine,
    /// Model, domain, boundary and initial profile taken from the config.
    Custom,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::AdvectionSin4 => "advection_sin4",
            Problem::BurgersGaussians => "burgers_gaussians",
            Problem::TrafficSine => "traffic_sine",
            Problem::Custom => "custom",
        }
    }

    /// Fixed setup of a preset; `None` for custom problems.
    pub fn setup(&self) -> Option<Setup> {
        let (model, boundary, profile) = match self {
            Problem::AdvectionSin4 => (
                FluxModel::LinearAdvection { speed: 1.0 },
                Boundary::Periodic,
                Profile::Sin4,
            ),
            Problem::BurgersGaussians => (
                FluxModel::Burgers,
                Boundary::Transmissive,
                Profile::Gaussians,
            ),
            Problem::TrafficSine => (FluxModel::Traffic, Boundary::Periodic, Profile::TrafficSine),
            Problem::Custom => return None,
        };
        Some(Setup {
            model,
            left: -1.0,
            right: 1.0,
            boundary,
            profile,
        })
    }

    /// Time integrator used for the preset in the reference experiments.
    pub fn default_integrator(&self) -> Integrator {
        match self {
            Problem::AdvectionSin4 | Problem::Custom => Integrator::LinearRk,
            Problem::BurgersGaussians | Problem::TrafficSine => Integrator::Ssprk4,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "advection_sin4" | "advection" => Ok(Problem::AdvectionSin4),
            "burgers_gaussians" | "burgers" => Ok(Problem::BurgersGaussians),
            "traffic_sine" | "traffic" => Ok(Problem::TrafficSine),
            "custom" => Ok(Problem::Custom),
            other => Err(CliError::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// Initial data profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `sin⁴(πx)`
    Sin4,
    /// `sin(πx)`
    Sine,
    /// `-5 exp(-50 (x - 1/2)²) + 5 exp(-50 (x + 1/2)²)`
    Gaussians,
    /// `1/2 + sin(πx)/4`
    TrafficSine,
    /// 1 on `x < 0`, 0 elsewhere.
    Step,
    Constant(f64),
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Sin4 => (PI * x).sin().powi(4),
            Profile::Sine => (PI * x).sin(),
            Profile::Gaussians => {
                -5.0 * (-50.0 * (x - 0.5).powi(2)).exp() + 5.0 * (-50.0 * (x + 0.5).powi(2)).exp()
            }
            Profile::TrafficSine => 0.5 + 0.25 * (PI * x).sin(),
            Profile::Step => {
                if x < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Constant(c) => c,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Sin4 => f.write_str("sin4"),
            Profile::Sine => f.write_str("sine"),
            Profile::Gaussians => f.write_str("gaussians"),
            Profile::TrafficSine => f.write_str("traffic_sine"),
            Profile::Step => f.write_str("step"),
            Profile::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

impl FromStr for Profile {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if let Some(c) = s.strip_prefix("constant:") {
            return c
                .trim()
                .parse()
                .map(Profile::Constant)
                .map_err(|_| CliError::Config(format!("bad constant in profile '{s}'")));
        }
        match s {
            "sin4" => Ok(Profile::Sin4),
            "sine" => Ok(Profile::Sine),
            "gaussians" => Ok(Profile::Gaussians),
            "traffic_sine" => Ok(Profile::TrafficSine),
            "step" => Ok(Profile::Step),
            other => Err(CliError::Config(format!(
                "unknown initial profile '{other}'"
            ))),
        }
    }
}

/// Everything that defines the PDE problem apart from the discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub model: FluxModel,
    pub left: f64,
    pub right: f64,
    pub boundary: Boundary,
    pub profile: Profile,
}

impl Setup {
    pub fn grid(&self, n_cells: usize) -> Result<Grid, CliError> {
        Ok(Grid::new(self.left, self.right, n_cells, self.boundary)?)
    }

    pub fn initial_field(&self, n_cells: usize, n: usize) -> Result<ModalField, CliError> {
        let profile = self.profile;
        Ok(ModalField::project(self.grid(n_cells)?, n, move |x| {
            profile.eval(x)
        }))
    }

    /// Exact solution at time `t`, where one is known in closed form:
    /// periodic linear advection transports the initial profile.
    pub fn exact(&self, t: f64) -> Option<impl Fn(f64) -> f64> {
        match (self.model, self.boundary) {
            (FluxModel::LinearAdvection { speed }, Boundary::Periodic) => {
                let (left, len, profile) = (self.left, self.right - self.left, self.profile);
                Some(move |x: f64| {
                    let y = (x - speed * t - left).rem_euclid(len) + left;
                    profile.eval(y)
                })
            }
            _ => None,
        }
    }
}
