//! Small dense helpers on `&[f64]` vectors plus a few `nalgebra` wrappers.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Scale `a` to unit length in place and return its former norm.
pub fn normalize(a: &mut [f64]) -> f64 {
    let r = norm(a);
    if r > 0.0 {
        a.iter_mut().for_each(|x| *x /= r);
    }
    r
}

/// `‖x − (x·u)u‖` for unit `u`, i.e. the length of `x|u^⊥`.
#[inline]
pub fn perp_norm(x: &[f64], u: &[f64]) -> f64 {
    let t = dot(x, u);
    (dot(x, x) - t * t).max(0.0).sqrt()
}

pub fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(&mut v) > 1e-8 {
            return v;
        }
    }
}

/// Haar-random rotation (determinant +1) via QR of a Gaussian matrix.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Rotation by `angle` in the coordinate plane `(i, j)`.
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

pub fn apply(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Spectral norm of a symmetric matrix.
pub fn sym_operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.abs()))
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let ev = m.clone().symmetric_eigen().eigenvalues;
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// `m^p` for symmetric positive definite `m`.
pub fn spd_power(m: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(f64::MIN_POSITIVE).powf(p)));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Solve the SPD system `g y = b` for small `n`, falling back to LU when the
/// Cholesky factorization breaks down.
pub fn spd_solve(g: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    if let Some(ch) = g.clone().cholesky() {
        return Some(ch.solve(&rhs).as_slice().to_vec());
    }
    g.clone().lu().solve(&rhs).map(|v| v.as_slice().to_vec())
}
