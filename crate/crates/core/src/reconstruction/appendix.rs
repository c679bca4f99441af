//! Shifted Legendre inner products and the invertibility of the square
//! (`M = 3N + 2`) reconstruction problem.
//!
//! With `a_{k,l} = ∫_{-1}^{1} P_k(s) P_l(s + 2) ds` and
//! `b_{k,l} = ∫_{-1}^{1} P_k(s) P_l(s - 2) ds = (-1)^{k+l} a_{k,l}`, the
//! square moment system is invertible iff the `(2N+2) × (2N+2)` matrix
//!
//! ```text
//!     [ a_{k,l} ]    k = 0..N,  l = N+1..3N+2
//!     [ c_{k,l} ]    c_{k,l} = (a_{k,l} + b_{k,l}) / 2
//! ```
//!
//! is. These routines assemble it directly from the `a_{k,l}` and report its
//! singular values.

use nalgebra::DMatrix;

use super::exact;

/// `a_{k,l} = ∫_{-1}^{1} P_k(s) P_l(s + 2) ds`, exact up to final rounding.
pub fn appendix_a_coeff(k: usize, l: usize) -> f64 {
    exact::shifted_inner_product(k, l, 2)
}

/// `∫_{-1}^{1} P_k(s) P_l(s - 2) ds`, computed directly.
pub fn shifted_minus_coeff(k: usize, l: usize) -> f64 {
    exact::shifted_inner_product(k, l, -2)
}

/// `∫_{-1}^{1} P_l(s + 2) Q(s) ds` for `Q = Σ_k q_k P_k`.
pub fn shifted_moment(l: usize, q: &[f64]) -> f64 {
    if q.is_empty() {
        return 0.0;
    }
    let table = exact::shifted_table(q.len() - 1, l, 2);
    q.iter().zip(&table).map(|(qk, row)| qk * row[l]).sum()
}

/// The matrix `B` for solution degree `n`.
pub fn appendix_b_matrix(n: usize) -> DMatrix<f64> {
    let size = 2 * n + 2;
    let table = exact::shifted_table(n, 3 * n + 2, 2);
    let mut b = DMatrix::zeros(size, size);
    for k in 0..=n {
        for (col, l) in (n + 1..=3 * n + 2).enumerate() {
            let a = table[k][l];
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            b[(k, col)] = a;
            b[(n + 1 + k, col)] = 0.5 * (a + sign * a);
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertibilityReport {
    pub n: usize,
    pub min_singular_value: f64,
    pub max_singular_value: f64,
    pub condition_number: f64,
}

pub fn appendix_a_invertibility(n: usize) -> InvertibilityReport {
    let sv = appendix_b_matrix(n).singular_values();
    let (min, max) = (sv.min(), sv.max());
    InvertibilityReport {
        n,
        min_singular_value: min,
        max_singular_value: max,
        condition_number: max / min,
    }
}
