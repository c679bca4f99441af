//! Polynomial reconstruction on the three-cell central stencil.
//!
//! Given degree-`N` data on cells `i-1, i, i+1`, find one polynomial of degree
//! `M` on the union of the three cells whose degree-`N` moments reproduce the
//! data. On the reference stencil the cells are `(-3,-1)`, `(-1,1)`, `(1,3)` and
//! the unknown is expanded in central-cell Legendre polynomials `P_k(s)`
//! extended to the whole stencil.
//!
//! The moment equations against the central cell pin the first `N + 1`
//! coefficients to the data exactly. The remaining `M - N` coefficients solve
//! the `2(N + 1)` neighbor-cell moment equations, exactly when `M = 3N + 2` and
//! in the least-squares sense (equal weights) otherwise.

mod appendix;
mod exact;

pub use appendix::{
    appendix_a_coeff, appendix_a_invertibility, appendix_b_matrix, shifted_minus_coeff,
    shifted_moment, InvertibilityReport,
};

use nalgebra::DMatrix;

use crate::basis::{eval_series, GaussLegendre, Grid, ReferenceBasis};
use crate::error::{Error, Result};

/// Relative singular value below which the reduced system counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Reference-cell shift of the left, central and right stencil cells.
const STENCIL_SHIFTS: [i64; 3] = [-2, 0, 2];

pub fn check_degrees(n: usize, m: usize) -> Result<()> {
    if n <= m && m <= 3 * n + 2 {
        Ok(())
    } else {
        Err(Error::InvalidDegrees { n, m })
    }
}

/// Piecewise polynomial data of degree `n`: the evolved solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    pub grid: Grid,
    pub n: usize,
    /// Row-major `n_cells × (n + 1)` Legendre coefficients.
    pub coeffs: Vec<f64>,
}

impl ModalField {
    pub fn zeros(grid: Grid, n: usize) -> Self {
        let len = grid.n_cells * (n + 1);
        Self {
            grid,
            n,
            coeffs: vec![0.0; len],
        }
    }

    /// L2 projection of `f` onto piecewise polynomials of degree `n`.
    pub fn project<F: Fn(f64) -> f64>(grid: Grid, n: usize, f: F) -> Self {
        let quad = GaussLegendre::new(n + 16);
        Self::project_with(grid, n, &quad, f)
    }

    pub fn project_with<F: Fn(f64) -> f64>(
        grid: Grid,
        n: usize,
        quad: &GaussLegendre,
        f: F,
    ) -> Self {
        let mut field = Self::zeros(grid, n);
        let h = field.grid.h();
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        for i in 0..field.grid.n_cells {
            let xc = field.grid.center(i);
            let cell = &mut field.coeffs[i * (n + 1)..(i + 1) * (n + 1)];
            for (&s, &w) in quad.nodes.iter().zip(&quad.weights) {
                let fx = f(xc + 0.5 * h * s);
                crate::basis::legendre_table(s, &mut p, &mut dp);
                for (c, pk) in cell.iter_mut().zip(&p) {
                    *c += w * fx * pk;
                }
            }
            for (k, c) in cell.iter_mut().enumerate() {
                *c /= ReferenceBasis::norm_sq(k);
            }
        }
        field
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells
    }

    #[inline]
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.coeffs[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        let stride = self.n + 1;
        &mut self.coeffs[i * stride..(i + 1) * stride]
    }

    /// Point value at physical position `x` (right-continuous at interfaces).
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.grid.h();
        let i = (((x - self.grid.left) / h).floor().max(0.0) as usize).min(self.n_cells() - 1);
        let s = 2.0 * (x - self.grid.center(i)) / h;
        eval_series(self.cell(i), s)
    }

    /// `Σ_i h · û_0^{(i)}`, the integral of the solution.
    pub fn total_mass(&self) -> f64 {
        let h = self.grid.h();
        (0..self.n_cells()).map(|i| h * self.cell(i)[0]).sum()
    }

    /// Upper bound of the sup norm, `max_i Σ_k |û_k^{(i)}|` (since `|P_k| <= 1`).
    pub fn sup_bound(&self) -> f64 {
        (0..self.n_cells())
            .map(|i| self.cell(i).iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn first_non_finite_cell(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.is_finite())
            .map(|p| p / (self.n + 1))
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &ModalField) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.coeffs {
            *a *= alpha;
        }
    }
}

/// Reconstructed piecewise polynomials of degree `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconField {
    pub grid: Grid,
    pub m: usize,
    pub coeffs: Vec<f64>,
}

impl ReconField {
    #[inline]
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.coeffs[i * (self.m + 1)..(i + 1) * (self.m + 1)]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.grid.h();
        let i = (((x - self.grid.left) / h).floor().max(0.0) as usize).min(self.grid.n_cells - 1);
        let s = 2.0 * (x - self.grid.center(i)) / h;
        eval_series(self.cell(i), s)
    }
}

/// Gram matrix of the stencil moment equations on the reference stencil.
///
/// Row `b (N+1) + l` (block `b` = left, centre, right cell) and column `k`
/// holds `∫_{-1}^{1} P_l(t) P_k(t + shift_b) dt` with shifts `-2, 0, 2`. The
/// right block entries are `a_{l,k}`, the left block ones `b_{l,k}`.
pub fn stencil_gram(n: usize, m: usize) -> Result<DMatrix<f64>> {
    check_degrees(n, m)?;
    let mut gram = DMatrix::zeros(3 * (n + 1), m + 1);
    for (block, &shift) in STENCIL_SHIFTS.iter().enumerate() {
        let table = exact::shifted_table(n, m, shift);
        for (l, row) in table.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                gram[(block * (n + 1) + l, k)] = *v;
            }
        }
    }
    Ok(gram)
}

/// Linear map from stacked stencil data `(û^{(i-1)}, û^{(i)}, û^{(i+1)})` to
/// the reconstructed coefficients `ŵ^{(i)}`. Translation invariant on a
/// uniform grid, so one matrix serves every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconOperator {
    pub n: usize,
    pub m: usize,
    /// `(M + 1) × 3(N + 1)`
    pub matrix: DMatrix<f64>,
    /// Smallest over largest singular value of the column-equilibrated
    /// neighbor system (1 when `M = N`).
    pub conditioning: f64,
}

impl ReconOperator {
    pub fn build(n: usize, m: usize) -> Result<Self> {
        check_degrees(n, m)?;
        let nb = n + 1;
        let mut matrix = DMatrix::zeros(m + 1, 3 * nb);
        for l in 0..nb {
            matrix[(l, nb + l)] = 1.0;
        }
        if m == n {
            return Ok(Self {
                n,
                m,
                matrix,
                conditioning: 1.0,
            });
        }

        let gram = stencil_gram(n, m)?;
        let n_hi = m - n;
        let neighbor_rows: Vec<usize> = (0..nb).chain(2 * nb..3 * nb).collect();

        let mut g_hi = DMatrix::zeros(2 * nb, n_hi);
        for (r, &row) in neighbor_rows.iter().enumerate() {
            for c in 0..n_hi {
                g_hi[(r, c)] = gram[(row, nb + c)];
            }
        }
        // equilibrate columns; P_k(s ± 2) grows quickly with k
        let col_scale: Vec<f64> = (0..n_hi).map(|c| 1.0 / g_hi.column(c).norm()).collect();
        for (c, s) in col_scale.iter().enumerate() {
            g_hi.column_mut(c).scale_mut(*s);
        }

        // right-hand side: neighbor data moments minus the pinned central part
        let mut rhs = DMatrix::zeros(2 * nb, 3 * nb);
        for (r, &row) in neighbor_rows.iter().enumerate() {
            let l = row % nb;
            let data_col = if row < nb { l } else { 2 * nb + l };
            rhs[(r, data_col)] = ReferenceBasis::norm_sq(l);
            for c in 0..nb {
                rhs[(r, nb + c)] = -gram[(row, c)];
            }
        }

        let svd = g_hi.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let conditioning = smin / smax;
        if conditioning.is_nan() || conditioning <= SINGULAR_TOLERANCE {
            return Err(Error::SingularSystem {
                ratio: conditioning,
            });
        }
        let solution = svd.solve(&rhs, 0.0).map_err(|_| Error::SingularSystem {
            ratio: conditioning,
        })?;
        for c in 0..n_hi {
            for j in 0..3 * nb {
                matrix[(nb + c, j)] = col_scale[c] * solution[(c, j)];
            }
        }
        Ok(Self {
            n,
            m,
            matrix,
            conditioning,
        })
    }

    /// `M = 3N + 2`: the moment system is square and solved exactly.
    pub fn is_square(&self) -> bool {
        self.m == 3 * self.n + 2
    }

    /// Reconstruct one cell from its stencil data.
    pub fn apply_into(&self, left: &[f64], center: &[f64], right: &[f64], out: &mut [f64]) {
        let nb = self.n + 1;
        debug_assert_eq!(out.len(), self.m + 1);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..nb {
                acc += self.matrix[(r, j)] * left[j]
                    + self.matrix[(r, nb + j)] * center[j]
                    + self.matrix[(r, 2 * nb + j)] * right[j];
            }
            *o = acc;
        }
        // central moments are reproduced bitwise
        out[..nb].copy_from_slice(center);
    }

    pub fn apply(&self, left: &[f64], center: &[f64], right: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m + 1];
        self.apply_into(left, center, right, &mut out);
        out
    }

    /// Reconstruct every cell of `u`, with periodic wrap or ghost copies at the
    /// domain ends.
    pub fn reconstruct(&self, u: &ModalField) -> Result<ReconField> {
        if u.n != self.n {
            return Err(Error::DegreeMismatch {
                expected: self.n,
                found: u.n,
            });
        }
        let grid = &u.grid;
        let mut coeffs = vec![0.0; grid.n_cells * (self.m + 1)];
        for (i, out) in coeffs.chunks_exact_mut(self.m + 1).enumerate() {
            let left = u.cell(grid.neighbor(i, -1));
            let right = u.cell(grid.neighbor(i, 1));
            self.apply_into(left, u.cell(i), right, out);
        }
        Ok(ReconField {
            grid: grid.clone(),
            m: self.m,
            coeffs,
        })
    }
}

/// Convenience wrapper for [`ReconOperator::build`].
pub fn build_operator(n: usize, m: usize) -> Result<ReconOperator> {
    ReconOperator::build(n, m)
}

/// Convenience wrapper for [`ReconOperator::reconstruct`].
pub fn reconstruct(op: &ReconOperator, u: &ModalField) -> Result<ReconField> {
    op.reconstruct(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{legendre_eval, Boundary};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    /// Projection of `p` onto degree `n` on the reference cell with the given shift.
    fn project_shifted<F: Fn(f64) -> f64>(p: F, n: usize, shift: f64) -> Vec<f64> {
        let quad = GaussLegendre::new(n + 20);
        (0..=n)
            .map(|l| {
                quad.integrate(|t| p(t + shift) * legendre_eval(l, t)) / ReferenceBasis::norm_sq(l)
            })
            .collect()
    }

    #[test]
    fn gram_examples() {
        let g = stencil_gram(0, 0).unwrap();
        assert_eq!(g.shape(), (3, 1));
        for r in 0..3 {
            assert_relative_eq!(g[(r, 0)], 2.0, epsilon = 1e-14);
        }
        let g = stencil_gram(0, 1).unwrap();
        // right neighbour, test P_0, reconstruction P_1: ∫(t+2) dt = 4
        assert_relative_eq!(g[(2, 1)], 4.0, epsilon = 1e-14);
        assert_relative_eq!(g[(0, 1)], -4.0, epsilon = 1e-14);
    }

    #[test]
    fn gram_central_block_is_diagonal() {
        let (n, m) = (3, 11);
        let g = stencil_gram(n, m).unwrap();
        for l in 0..=n {
            for k in 0..=m {
                let expected = if l == k {
                    ReferenceBasis::norm_sq(k)
                } else {
                    0.0
                };
                assert!((g[(n + 1 + l, k)] - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_invalid_degrees() {
        assert!(matches!(
            ReconOperator::build(1, 0),
            Err(Error::InvalidDegrees { n: 1, m: 0 })
        ));
        assert!(matches!(
            ReconOperator::build(1, 6),
            Err(Error::InvalidDegrees { .. })
        ));
        assert!(stencil_gram(0, 3).is_err());
    }

    #[test]
    fn p0p0_is_identity() {
        let op = ReconOperator::build(0, 0).unwrap();
        assert_eq!(op.apply(&[3.0], &[-1.5], &[7.0]), vec![-1.5]);
    }

    #[test]
    fn p0p2_recovers_quadratic_from_cell_averages() {
        // p(s) = s² on the reference stencil. Cell averages: (-3,-1) -> 13/3,
        // (-1,1) -> 1/3, (1,3) -> 13/3. On (-1,1): s² = 1/3 P_0 + 2/3 P_2.
        let op = ReconOperator::build(0, 2).unwrap();
        let w = op.apply(&[13.0 / 3.0], &[1.0 / 3.0], &[13.0 / 3.0]);
        assert_relative_eq!(w[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(w[2], 2.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn recovers_random_polynomials_both_branches() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in 0..=3 {
            for m in n..=3 * n + 2 {
                let op = ReconOperator::build(n, m).unwrap();
                for _ in 0..10 {
                    // Legendre series scaled to the whole stencil, so every
                    // cell sees data of comparable size
                    let a: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let p = |s: f64| eval_series(&a, s / 3.0);
                    let target = project_shifted(p, m, 0.0);
                    let w = op.apply(
                        &project_shifted(p, n, -2.0),
                        &project_shifted(p, n, 0.0),
                        &project_shifted(p, n, 2.0),
                    );
                    let err: f64 = w
                        .iter()
                        .zip(&target)
                        .map(|(x, y)| (x - y).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                    assert!(err <= 1e-10 * norm, "N={n} M={m}: rel err {}", err / norm);
                }
            }
        }
    }

    #[test]
    fn constants_are_preserved() {
        for n in 0..=4 {
            for m in n..=3 * n + 2 {
                let op = ReconOperator::build(n, m).unwrap();
                let mut e = vec![0.0; n + 1];
                e[0] = 2.5;
                let w = op.apply(&e, &e, &e);
                assert_relative_eq!(w[0], 2.5, epsilon = 1e-14);
                for (k, wk) in w.iter().enumerate().skip(1) {
                    assert!(wk.abs() < 1e-10, "N={n} M={m} k={k}: {wk}");
                }
            }
        }
    }

    #[test]
    fn square_case_solves_full_block_system() {
        // w must satisfy every moment equation exactly when M = 3N + 2
        for n in 0..=3 {
            let m = 3 * n + 2;
            let op = ReconOperator::build(n, m).unwrap();
            assert!(op.is_square());
            let gram = stencil_gram(n, m).unwrap();
            let mut rng = rand::rngs::StdRng::seed_from_u64(n as u64);
            let data: Vec<f64> = (0..3 * (n + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = op.apply(&data[..n + 1], &data[n + 1..2 * n + 2], &data[2 * n + 2..]);
            for row in 0..3 * (n + 1) {
                let lhs: f64 = (0..=m).map(|k| gram[(row, k)] * w[k]).sum();
                let rhs = ReferenceBasis::norm_sq(row % (n + 1)) * data[row];
                assert!(
                    (lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()),
                    "N={n} row {row}"
                );
            }
        }
    }

    #[test]
    fn reconstruct_rejects_degree_mismatch() {
        let grid = Grid::new(0.0, 1.0, 5, Boundary::Periodic).unwrap();
        let u = ModalField::zeros(grid, 2);
        let op = ReconOperator::build(1, 3).unwrap();
        assert!(matches!(
            op.reconstruct(&u),
            Err(Error::DegreeMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn reconstruct_constant_field() {
        let grid = Grid::new(-1.0, 1.0, 8, Boundary::Transmissive).unwrap();
        let u = ModalField::project(grid, 2, |_| 0.75);
        let op = ReconOperator::build(2, 6).unwrap();
        let w = op.reconstruct(&u).unwrap();
        for i in 0..8 {
            assert_relative_eq!(w.cell(i)[0], 0.75, epsilon = 1e-14);
            assert!(w.cell(i)[1..].iter().all(|c| c.abs() < 1e-10));
        }
    }

    #[test]
    fn reconstruct_global_polynomial_on_periodic_interior() {
        // cubic in x, reconstructed with P1P3; interior cells see a global polynomial
        let grid = Grid::new(0.0, 1.0, 10, Boundary::Periodic).unwrap();
        let p = |x: f64| 1.0 + x - 3.0 * x * x + 2.0 * x * x * x;
        let u = ModalField::project(grid.clone(), 1, p);
        let op = ReconOperator::build(1, 3).unwrap();
        let w = op.reconstruct(&u).unwrap();
        for i in 1..9 {
            for j in 0..=8 {
                let s = -1.0 + 0.25 * j as f64;
                let x = grid.reference_to_cell(i, s).unwrap();
                assert!((eval_series(w.cell(i), s) - p(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_exact_for_polynomials() {
        let grid = Grid::new(-1.0, 1.0, 4, Boundary::Periodic).unwrap();
        let u = ModalField::project(grid, 3, |x| x * x * x - x);
        for &x in &[-0.9, -0.3, 0.1, 0.77] {
            assert_relative_eq!(u.eval(x), x * x * x - x, epsilon = 1e-13);
        }
    }
}
