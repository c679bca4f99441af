//! Legendre polynomials, Gauss-Legendre quadrature and uniform grids.
//!
//! Cells are mapped affinely onto the reference interval `(-1, 1)`. The modal
//! basis is the (orthogonal, not orthonormal) Legendre family, so the
//! reference mass matrix is `diag(2 / (2k + 1))`.
//!
//! Polynomials are evaluated with Bonnet's three-term recurrence, which stays
//! well behaved on the extended range `[-3, 3]` used by the shifted stencil
//! integrals.

use crate::error::{Error, Result};

/// Value of the Legendre polynomial `P_k` at `s`.
///
/// `s` is not restricted to `[-1, 1]`; the polynomial continuation is returned.
pub fn legendre_eval(k: usize, s: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => s,
        _ => {
            let (mut p0, mut p1) = (1.0, s);
            for j in 1..k {
                let jf = j as f64;
                let p2 = ((2.0 * jf + 1.0) * s * p1 - jf * p0) / (jf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Derivative `dP_k/ds` at `s`.
pub fn legendre_deriv(k: usize, s: f64) -> f64 {
    let mut values = vec![0.0; k + 1];
    let mut derivs = vec![0.0; k + 1];
    legendre_table(s, &mut values, &mut derivs);
    derivs[k]
}

/// Fills `values[k] = P_k(s)` and `derivs[k] = P_k'(s)` for every `k` the
/// slices can hold. Both slices must have the same length.
pub fn legendre_table(s: f64, values: &mut [f64], derivs: &mut [f64]) {
    debug_assert_eq!(values.len(), derivs.len());
    let len = values.len();
    if len == 0 {
        return;
    }
    values[0] = 1.0;
    derivs[0] = 0.0;
    if len == 1 {
        return;
    }
    values[1] = s;
    derivs[1] = 1.0;
    for j in 1..len - 1 {
        let jf = j as f64;
        values[j + 1] = ((2.0 * jf + 1.0) * s * values[j] - jf * values[j - 1]) / (jf + 1.0);
        // P'_{j+1} = P'_{j-1} + (2j + 1) P_j
        derivs[j + 1] = derivs[j - 1] + (2.0 * jf + 1.0) * values[j];
    }
}

/// Gauss-Legendre rule on `(-1, 1)`, exact for polynomials of degree `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n_points: usize) -> Self {
        assert!(n_points > 0, "a quadrature rule needs at least one node");
        let n = n_points;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        // roots are symmetric; solve for the upper half and mirror
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let p = legendre_eval(n, x);
                let pm1 = legendre_eval(n - 1, x);
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_eval(n, x);
            let pm1 = legendre_eval(n - 1, x);
            if (x * x - 1.0).abs() > 0.0 {
                dp = nf * (x * p - pm1) / (x * x - 1.0);
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.len() - 1
    }

    /// `∫_{-1}^{1} f(s) ds`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

/// Legendre basis tabulated at the quadrature nodes of one reference cell.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    pub max_degree: usize,
    pub quadrature: GaussLegendre,
    /// `values[q][k] = P_k(s_q)`
    pub values: Vec<Vec<f64>>,
    /// `derivs[q][k] = P_k'(s_q)`
    pub derivs: Vec<Vec<f64>>,
}

impl ReferenceBasis {
    /// Basis up to `max_degree` with `max_degree + 2` Gauss nodes, which is
    /// exact up to degree `2 max_degree + 3`.
    pub fn new(max_degree: usize) -> Self {
        Self::with_nodes(max_degree, max_degree + 2)
    }

    pub fn with_nodes(max_degree: usize, n_nodes: usize) -> Self {
        let quadrature = GaussLegendre::new(n_nodes);
        let mut values = Vec::with_capacity(n_nodes);
        let mut derivs = Vec::with_capacity(n_nodes);
        for &s in &quadrature.nodes {
            let mut v = vec![0.0; max_degree + 1];
            let mut d = vec![0.0; max_degree + 1];
            legendre_table(s, &mut v, &mut d);
            values.push(v);
            derivs.push(d);
        }
        Self {
            max_degree,
            quadrature,
            values,
            derivs,
        }
    }

    /// `∫_{-1}^{1} P_k^2 ds`
    pub fn norm_sq(k: usize) -> f64 {
        2.0 / (2 * k + 1) as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.quadrature.len()
    }

    /// Evaluates `Σ_k coeffs[k] P_k` at quadrature node `q`.
    #[inline]
    pub fn eval_at_node(&self, coeffs: &[f64], q: usize) -> f64 {
        coeffs.iter().zip(&self.values[q]).map(|(c, p)| c * p).sum()
    }

    /// Evaluates `Σ_k coeffs[k] P_k'` at quadrature node `q`.
    #[inline]
    pub fn deriv_at_node(&self, coeffs: &[f64], q: usize) -> f64 {
        coeffs.iter().zip(&self.derivs[q]).map(|(c, p)| c * p).sum()
    }
}

/// Evaluates `Σ_k coeffs[k] P_k(s)` at an arbitrary reference point.
pub fn eval_series(coeffs: &[f64], s: f64) -> f64 {
    match coeffs.len() {
        0 => 0.0,
        1 => coeffs[0],
        _ => {
            let (mut p0, mut p1) = (1.0, s);
            let mut acc = coeffs[0] + coeffs[1] * s;
            for (j, c) in coeffs.iter().enumerate().skip(2) {
                let jf = (j - 1) as f64;
                let p2 = ((2.0 * jf + 1.0) * s * p1 - jf * p0) / (jf + 1.0);
                acc += c * p2;
                p0 = p1;
                p1 = p2;
            }
            acc
        }
    }
}

/// Trace at the right end `s = 1` of a Legendre series.
#[inline]
pub fn right_trace(coeffs: &[f64]) -> f64 {
    coeffs.iter().sum()
}

/// Trace at the left end `s = -1` of a Legendre series.
#[inline]
pub fn left_trace(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Ghost cells copy the full coefficient vector of the boundary cell.
    Transmissive,
}

/// Uniform partition of `[left, right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub left: f64,
    pub right: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

impl Grid {
    pub fn new(left: f64, right: f64, n_cells: usize, boundary: Boundary) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && right > left) {
            return Err(Error::InvalidGrid(format!(
                "domain [{left}, {right}] is empty or not finite"
            )));
        }
        if n_cells < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 cells for the three-cell stencil, got {n_cells}"
            )));
        }
        Ok(Self {
            left,
            right,
            n_cells,
            boundary,
        })
    }

    pub fn h(&self) -> f64 {
        (self.right - self.left) / self.n_cells as f64
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    /// Position of interface `x_{i+1/2}`, the right end of cell `i`.
    pub fn interface(&self, i: usize) -> f64 {
        self.left + (i + 1) as f64 * self.h()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.h()
    }

    pub fn cell_to_reference(&self, i: usize, x: f64) -> Result<f64> {
        self.check_index(i)?;
        Ok(2.0 * (x - self.center(i)) / self.h())
    }

    pub fn reference_to_cell(&self, i: usize, s: f64) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.center(i) + 0.5 * self.h() * s)
    }

    /// Index of the cell `offset` positions away from `i`, following the
    /// boundary rule. Transmissive ghosts resolve to the boundary cell.
    pub fn neighbor(&self, i: usize, offset: isize) -> usize {
        let n = self.n_cells as isize;
        let j = i as isize + offset;
        match self.boundary {
            Boundary::Periodic => j.rem_euclid(n) as usize,
            Boundary::Transmissive => j.clamp(0, n - 1) as usize,
        }
    }

    /// Number of interfaces that carry a flux: `n_cells` for periodic grids,
    /// `n_cells + 1` for transmissive ones.
    pub fn n_interfaces(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n_cells,
            Boundary::Transmissive => self.n_cells + 1,
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n_cells {
            Err(Error::CellOutOfRange {
                index: i,
                n_cells: self.n_cells,
            })
        } else {
            Ok(())
        }
    }
}
