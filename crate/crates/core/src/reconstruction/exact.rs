//! Exact rational evaluation of shifted Legendre inner products.
//!
//! `∫_{-1}^{1} P_k(s) P_l(s + c) ds` suffers catastrophic cancellation in
//! floating point once `P_l(s + 2)` grows large on `(-1, 1)`; evaluated in
//! rationals it is exact up to the final rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Monomial coefficients of `P_0 .. P_max`.
fn legendre_monomials(max: usize) -> Vec<Vec<BigRational>> {
    let mut polys: Vec<Vec<BigRational>> = Vec::with_capacity(max + 1);
    polys.push(vec![rat(1, 1)]);
    if max >= 1 {
        polys.push(vec![rat(0, 1), rat(1, 1)]);
    }
    for j in 1..max {
        // (j+1) P_{j+1} = (2j+1) s P_j - j P_{j-1}
        let mut next = vec![BigRational::zero(); j + 2];
        let a = rat(2 * j as i64 + 1, j as i64 + 1);
        let b = rat(j as i64, j as i64 + 1);
        for (d, c) in polys[j].iter().enumerate() {
            next[d + 1] += &a * c;
        }
        for (d, c) in polys[j - 1].iter().enumerate() {
            next[d] -= &b * c;
        }
        polys.push(next);
    }
    polys
}

/// Coefficients of `p(s + shift)` (Taylor shift).
fn shift_poly(p: &[BigRational], shift: i64) -> Vec<BigRational> {
    let mut out = p.to_vec();
    let c = rat(shift, 1);
    let n = out.len();
    // repeated synthetic division
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c * &out[j + 1];
            out[j] += t;
        }
    }
    out
}

fn integrate_product(p: &[BigRational], q: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.iter().enumerate() {
            let d = i + j;
            if d % 2 == 0 && !b.is_zero() {
                acc += a * b * rat(2, d as i64 + 1);
            }
        }
    }
    acc
}

/// Table `t[k][l] = ∫_{-1}^{1} P_k(s) P_l(s + shift) ds` for `k <= max_k`,
/// `l <= max_l`.
pub(crate) fn shifted_table(max_k: usize, max_l: usize, shift: i64) -> Vec<Vec<f64>> {
    let polys = legendre_monomials(max_k.max(max_l));
    let shifted: Vec<Vec<BigRational>> = polys[..=max_l]
        .iter()
        .map(|p| shift_poly(p, shift))
        .collect();
    (0..=max_k)
        .map(|k| {
            shifted
                .iter()
                .map(|q| {
                    integrate_product(&polys[k], q)
                        .to_f64()
                        .expect("finite rational")
                })
                .collect()
        })
        .collect()
}

pub(crate) fn shifted_inner_product(k: usize, l: usize, shift: i64) -> f64 {
    shifted_table(k, l, shift)[k][l]
}
