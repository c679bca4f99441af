//! Run configuration: flat `key = value` text, one entry per line, `#`
//! starts a comment. Later entries override earlier ones, so command-line
//! flags are applied as extra entries after the file.

use std::fmt::Write as _;
use std::path::PathBuf;

use pnpm_core::diagnostics::ErrorNorm;
use pnpm_core::reconstruction::check_degrees;
use pnpm_core::scheme::DEFAULT_TOLERANCE;
use pnpm_core::{Boundary, FluxModel, Integrator, NumericalFlux, SchemeConfig};

use crate::error::CliError;
use crate::problems::{Problem, Profile, Setup};

pub const DEFAULT_GRIDS: [usize; 5] = [10, 20, 40, 80, 160];

/// Field whose error a convergence study reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorField {
    /// The reconstruction `w_h` of degree `M`.
    #[default]
    Reconstruction,
    /// The evolved `u_h` of degree `N`.
    Solution,
}

impl ErrorField {
    pub fn name(&self) -> &'static str {
        match self {
            ErrorField::Reconstruction => "reconstruction",
            ErrorField::Solution => "solution",
        }
    }
}

impl std::str::FromStr for ErrorField {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "reconstruction" | "w" => Ok(ErrorField::Reconstruction),
            "solution" | "u" => Ok(ErrorField::Solution),
            other => Err(CliError::Config(format!("unknown error field '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub setup: Setup,
    pub n: usize,
    pub m: usize,
    pub cells: usize,
    pub t_end: f64,
    pub limiter: bool,
    pub fallback: bool,
    pub flux: NumericalFlux,
    pub integrator: Integrator,
    pub cfl: f64,
    /// Entropy budget deficit tolerated without limiting.
    pub limiter_tol: f64,
    pub out: PathBuf,
    /// Output times of solution snapshots; empty means only `t_end`.
    pub snapshots: Vec<f64>,
    /// Cell counts of a convergence study.
    pub grids: Vec<usize>,
    pub error_field: ErrorField,
    pub error_norm: ErrorNorm,
}

impl RunConfig {
    /// Defaults of a problem: degrees, grid, end time and output times of
    /// the reference experiment, limiter on.
    pub fn preset(problem: Problem) -> Self {
        let setup = problem.setup().unwrap_or(Setup {
            model: FluxModel::LinearAdvection { speed: 1.0 },
            left: -1.0,
            right: 1.0,
            boundary: Boundary::Periodic,
            profile: Profile::Sine,
        });
        let (n, m, cells, t_end, snapshots) = match problem {
            Problem::AdvectionSin4 | Problem::Custom => (2, 4, 160, 1.0, vec![]),
            Problem::BurgersGaussians => (2, 4, 160, 0.198, vec![0.022, 0.066, 0.198]),
            Problem::TrafficSine => (4, 6, 40, 0.6, vec![0.2, 0.4, 0.6]),
        };
        Self {
            problem,
            setup,
            n,
            m,
            cells,
            t_end,
            limiter: true,
            fallback: true,
            flux: NumericalFlux::Rusanov,
            integrator: problem.default_integrator(),
            cfl: 0.9,
            limiter_tol: DEFAULT_TOLERANCE,
            out: PathBuf::from("out"),
            snapshots,
            grids: DEFAULT_GRIDS.to_vec(),
            error_field: ErrorField::default(),
            error_norm: ErrorNorm::default(),
        }
    }

    /// Builds a config from `(key, value)` entries applied in order on top
    /// of the preset named by the last `problem` entry.
    pub fn from_entries(entries: &[(String, String)]) -> Result<Self, CliError> {
        let problem = entries
            .iter()
            .rev()
            .find(|(k, _)| k == "problem")
            .map(|(_, v)| v.parse())
            .transpose()?
            .unwrap_or(Problem::AdvectionSin4);
        let mut cfg = Self::preset(problem);
        for (k, v) in entries {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_entries(&parse_entries(text)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "problem" => {
                let p: Problem = v.parse()?;
                if p != self.problem {
                    return Err(CliError::Config(format!(
                        "problem '{p}' conflicts with '{}'",
                        self.problem
                    )));
                }
            }
            "n" => self.n = parse_num(key, v)?,
            "m" => self.m = parse_num(key, v)?,
            "cells" => self.cells = parse_num(key, v)?,
            "t_end" | "tend" => self.t_end = parse_num(key, v)?,
            "limiter" => self.limiter = parse_switch(key, v)?,
            "fallback" => self.fallback = parse_switch(key, v)?,
            "flux" => self.flux = v.parse().map_err(core_config)?,
            "integrator" => self.integrator = v.parse().map_err(core_config)?,
            "cfl" => self.cfl = parse_num(key, v)?,
            "limiter_tol" => self.limiter_tol = parse_num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "snapshots" => self.snapshots = parse_list(key, v)?,
            "grids" => self.grids = parse_list(key, v)?,
            "error_field" => self.error_field = v.parse()?,
            "error_norm" => self.error_norm = v.parse().map_err(core_config)?,
            "model" | "left" | "right" | "boundary" | "initial" => {
                if self.problem != Problem::Custom {
                    return Err(CliError::Config(format!(
                        "'{key}' is fixed by the {} preset; use problem = custom",
                        self.problem
                    )));
                }
                match key {
                    "model" => self.setup.model = v.parse().map_err(core_config)?,
                    "left" => self.setup.left = parse_num(key, v)?,
                    "right" => self.setup.right = parse_num(key, v)?,
                    "boundary" => self.setup.boundary = parse_boundary(v)?,
                    _ => self.setup.profile = v.parse()?,
                }
            }
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_degrees(self.n, self.m).map_err(core_config)?;
        self.scheme_config().validate().map_err(core_config)?;
        self.flux.supports(&self.setup.model).map_err(core_config)?;
        if self.cells < 3 {
            return Err(CliError::Config(format!(
                "cells must be >= 3, got {}",
                self.cells
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(CliError::Config(format!("bad end time {}", self.t_end)));
        }
        if let Some(t) = self
            .snapshots
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= self.t_end))
        {
            return Err(CliError::Config(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_end
            )));
        }
        if let Some(g) = self.grids.iter().find(|g| **g < 3) {
            return Err(CliError::Config(format!("grid with {g} cells; need >= 3")));
        }
        let s = &self.setup;
        if !(s.left.is_finite() && s.right.is_finite() && s.right > s.left) {
            return Err(CliError::Config(format!(
                "bad domain [{}, {}]",
                s.left, s.right
            )));
        }
        Ok(())
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            n: self.n,
            m: self.m,
            flux: self.flux,
            limiter: self.limiter,
            cfl: self.cfl,
            integrator: self.integrator,
            fallback: self.fallback,
            tolerance: self.limiter_tol,
        }
    }

    /// Output times in increasing order, ending at `t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let mut times = self.snapshots.clone();
        if times.is_empty() {
            times.push(self.t_end);
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }

    /// Canonical text form; [`RunConfig::parse`] reads it back unchanged.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            writeln!(s, "{k} = {v}").expect("writing to a String cannot fail");
        };
        line("problem", self.problem.to_string());
        if self.problem == Problem::Custom {
            line("model", model_text(&self.setup.model));
            line("left", format!("{:?}", self.setup.left));
            line("right", format!("{:?}", self.setup.right));
            line("boundary", boundary_text(self.setup.boundary).to_string());
            line("initial", self.setup.profile.to_string());
        }
        line("n", self.n.to_string());
        line("m", self.m.to_string());
        line("cells", self.cells.to_string());
        line("t_end", format!("{:?}", self.t_end));
        line("limiter", switch_text(self.limiter).to_string());
        line("fallback", switch_text(self.fallback).to_string());
        line("flux", self.flux.to_string());
        line("integrator", self.integrator.to_string());
        line("cfl", format!("{:?}", self.cfl));
        line("limiter_tol", format!("{:?}", self.limiter_tol));
        line("out", self.out.display().to_string());
        line("snapshots", join(&self.snapshots, |t| format!("{t:?}")));
        line("grids", join(&self.grids, |g| g.to_string()));
        line("error_field", self.error_field.name().to_string());
        line("error_norm", self.error_norm.to_string());
        s
    }
}

/// Splits `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn core_config(e: pnpm_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("bad value '{v}' for '{key}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_switch(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!(
            "'{key}' must be on or off, got '{v}'"
        ))),
    }
}

fn parse_boundary(v: &str) -> Result<Boundary, CliError> {
    match v {
        "periodic" => Ok(Boundary::Periodic),
        "transmissive" => Ok(Boundary::Transmissive),
        _ => Err(CliError::Config(format!("unknown boundary '{v}'"))),
    }
}

fn boundary_text(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Transmissive => "transmissive",
    }
}

fn switch_text(on: bool) -> &'static str {
    if on {
        "on"
    } else {
        "off"
    }
}

fn model_text(model: &FluxModel) -> String {
    match model {
        FluxModel::LinearAdvection { speed } => format!("advection:{speed:?}"),
        other => other.name().to_string(),
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}
