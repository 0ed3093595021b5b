//! Dense complex matrix helpers on top of `faer`.
//!
//! Superoperators act on density matrices vectorized by column stacking:
//! `vec(ρ)[i + d·j] = ρ[i, j]`, so that `vec(A ρ C) = (Cᵀ ⊗ A) vec(ρ)`.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Side};

use crate::error::{Error, Result};

pub use faer::c64;

/// Dense complex matrix.
pub type CMat = Mat<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
pub const I: c64 = c64 { re: 0.0, im: 1.0 };

#[inline]
pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

/// `e^{iθ}`
#[inline]
pub fn cis(theta: f64) -> c64 {
    c64::new(theta.cos(), theta.sin())
}

pub fn zeros(n: usize, m: usize) -> CMat {
    CMat::zeros(n, m)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn transpose(a: &CMat) -> CMat {
    a.transpose().to_owned()
}

pub fn conj(a: &CMat) -> CMat {
    a.conjugate().to_owned()
}

pub fn scale(a: &CMat, c: c64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * c)
}

pub fn trace(a: &CMat) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> c64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let aik = a[(i, k)];
            if aik != ZERO {
                acc += aik * b[(k, i)];
            }
        }
    }
    acc
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

/// Largest elementwise modulus.
pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (p, q) = (b.nrows(), b.ncols());
    CMat::from_fn(a.nrows() * p, a.ncols() * q, |r, c| {
        a[(r / p, c / q)] * b[(r % p, c % q)]
    })
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Nonzero entries as `(row, col, value)`.
pub fn nonzeros(a: &CMat) -> Vec<(usize, usize, c64)> {
    let mut out = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let x = a[(i, j)];
            if x != ZERO {
                out.push((i, j, x));
            }
        }
    }
    out
}

/// Adds `coeff · (Cᵀ ⊗ A)` to the superoperator, i.e. the action `ρ ↦ coeff · A ρ C`.
pub fn add_sandwich(l: &mut CMat, coeff: c64, a: &CMat, c: &CMat) {
    let d = a.nrows();
    let a_nz = nonzeros(a);
    let c_nz = nonzeros(c);
    for &(p, q, cv) in &c_nz {
        // (Cᵀ)[q, p] = C[p, q]
        let f = coeff * cv;
        for &(i, j, av) in &a_nz {
            l[(q * d + i, p * d + j)] += f * av;
        }
    }
}

/// Column-stacking vectorization.
pub fn vectorize(a: &CMat) -> CMat {
    let d = a.nrows();
    CMat::from_fn(d * a.ncols(), 1, |k, _| a[(k % d, k / d)])
}

pub fn unvectorize(v: &CMat, d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| v[(i + d * j, 0)])
}

pub fn hermitian_part(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    let h = hermitian_part(a);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenSolve(format!("{e:?}")))
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and eigenvector columns.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = hermitian_part(a);
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenSolve(format!("{e:?}")))?;
    let vals = (0..h.nrows()).map(|i| e.S().column_vector()[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Square root of a positive-semidefinite Hermitian matrix (negative eigenvalues clipped).
pub fn psd_sqrt(a: &CMat) -> Result<CMat> {
    let (vals, u) = hermitian_eigen(a)?;
    let n = a.nrows();
    let d = CMat::from_fn(n, n, |i, j| if i == j { re(vals[i].max(0.0).sqrt()) } else { ZERO });
    Ok(&u * &d * u.adjoint())
}

/// General complex eigen-decomposition: eigenvalues and right eigenvector columns.
pub fn eigen(a: &CMat) -> Result<(Vec<c64>, CMat)> {
    if a.nrows() == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let e = a.eigen().map_err(|e| Error::EigenSolve(format!("{e:?}")))?;
    let vals = (0..a.nrows()).map(|i| e.S().column_vector()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::EigenSolve(format!("{e:?}")))
}

/// 2-norm condition number.
pub fn condition_number(a: &CMat) -> Result<f64> {
    let s = singular_values(a)?;
    let max = s.first().copied().unwrap_or(0.0);
    let min = s.last().copied().unwrap_or(0.0);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Right and left null spaces of a square matrix from its SVD.
///
/// Singular values below `rel_tol · σ_max` count as zero. Returns `(right, left)` with
/// orthonormal columns: `A·right ≈ 0`, `leftᴴ·A ≈ 0`.
pub fn null_spaces(a: &CMat, rel_tol: f64) -> Result<(CMat, CMat)> {
    let svd = a.svd().map_err(|e| Error::EigenSolve(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let n = a.nrows();
    let smax = if n > 0 { s[0].re } else { 0.0 };
    let idx: Vec<usize> = (0..n).filter(|&i| s[i].re <= rel_tol * smax).collect();
    let right = CMat::from_fn(n, idx.len(), |i, k| svd.V()[(i, idx[k])]);
    let left = CMat::from_fn(n, idx.len(), |i, k| svd.U()[(i, idx[k])]);
    Ok((right, left))
}

/// Solves `A X = B` by LU with partial pivoting; fails on non-finite output.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let x = a.partial_piv_lu().solve(b);
    if x.col_iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite())) {
        Ok(x)
    } else {
        Err(Error::SingularSolve("LU solve produced non-finite entries".into()))
    }
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let x = a.partial_piv_lu().inverse();
    if x.col_iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite())) {
        Ok(x)
    } else {
        Err(Error::SingularSolve("matrix inverse produced non-finite entries".into()))
    }
}

/// Inverse that also rejects matrices whose 1-norm condition number exceeds `max_condition`.
pub fn inverse_conditioned(a: &CMat, max_condition: f64) -> Result<CMat> {
    let x = inverse(a)?;
    let condition = norm_1(a) * norm_1(&x);
    if condition > max_condition {
        let residual = max_abs(&(a * &x - CMat::identity(a.nrows(), a.ncols())));
        return Err(Error::SingularSolve(format!(
            "near-singular matrix: condition {condition:.3e}, inverse residual {residual:.3e}"
        )));
    }
    Ok(x)
}

/// Induced 1-norm.
pub fn norm_1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = norm_1(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let s = re(0.5f64.powi(squarings as i32));
    let x = scale(a, s);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=24 {
        term = scale(&(&term * &x), re(1.0 / k as f64));
        result += &term;
        if norm_1(&term) < 1e-18 * norm_1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Column vector from a slice.
pub fn column(v: &[c64]) -> CMat {
    CMat::from_fn(v.len(), 1, |i, _| v[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| c64::new(next(), next()))
    }

    #[test]
    fn vectorization_round_trip_and_sandwich() {
        let a = sample(3, 1);
        let c = sample(3, 2);
        let rho = sample(3, 3);
        assert!(max_abs_diff(&unvectorize(&vectorize(&rho), 3), &rho) == 0.0);
        let mut l = zeros(9, 9);
        add_sandwich(&mut l, ONE, &a, &c);
        let lhs = unvectorize(&(&l * vectorize(&rho)), 3);
        let rhs = &a * &rho * &c;
        assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn expm_matches_diagonal_case() {
        let d = CMat::from_fn(3, 3, |i, j| if i == j { c64::new(-(i as f64) * 3.0, i as f64) } else { ZERO });
        let e = expm(&d);
        for i in 0..3 {
            let expect = c64::new(-(i as f64) * 3.0, i as f64).exp();
            assert!((e[(i, i)] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_group_property() {
        let a = scale(&sample(4, 7), re(4.0));
        let e1 = expm(&a);
        let e2 = expm(&scale(&a, re(0.5)));
        assert!(max_abs_diff(&e1, &(&e2 * &e2)) < 1e-11 * max_abs(&e1));
    }

    #[test]
    fn null_space_of_projector() {
        let v = column(&[ONE, I, ZERO]);
        let p = identity(3) - scale(&(&v * v.adjoint()), re(0.5));
        let (r, l) = null_spaces(&p, 1e-10).unwrap();
        assert_eq!(r.ncols(), 1);
        assert!(max_abs(&(&p * &r)) < 1e-12);
        assert!(max_abs(&(l.adjoint() * &p)) < 1e-12);
    }
}
