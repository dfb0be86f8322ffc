//! Finite atomic measures on the unit sphere and generators of isotropic ones.
//!
//! A measure is isotropic when `Σ wᵢ uᵢ⊗uᵢ = Id`; its mass is then `n`.
//! Continuous measures (normalized spherical Lebesgue measure) are carried
//! as the atoms of a quadrature rule.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{self, build_sphere_quadrature};

/// Angular distance below which two atoms are merged.
pub const MERGE_TOLERANCE: f64 = 1e-10;
const UNIT_TOLERANCE: f64 = 1e-12;
const EVEN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMeasure {
    n: usize,
    dirs: Vec<f64>,
    weights: Vec<f64>,
    even: bool,
}

impl SphericalMeasure {
    /// Build a measure from flat direction storage (`n` coordinates per atom).
    ///
    /// Directions must be unit to `1e-12` and weights strictly positive;
    /// atoms closer than [`MERGE_TOLERANCE`] are merged.
    pub fn new(n: usize, dirs: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 || dirs.len() != n * weights.len() {
            return Err(Error::domain(
                "direction storage does not match weight count",
            ));
        }
        if weights.is_empty() {
            return Err(Error::domain("measure has no atoms"));
        }
        for (i, u) in dirs.chunks_exact(n).enumerate() {
            let r = linalg::norm(u);
            if (r - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::domain(format!("atom {i} has norm {r}, expected 1")));
            }
        }
        if let Some(i) = weights.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::domain(format!(
                "atom {i} has non-positive weight {}",
                weights[i]
            )));
        }
        Ok(Self::assemble(n, dirs, weights))
    }

    fn assemble(n: usize, dirs: Vec<f64>, weights: Vec<f64>) -> Self {
        let (dirs, weights) = merge_atoms(n, dirs, weights);
        let even = detect_even(n, &dirs, &weights);
        SphericalMeasure {
            n,
            dirs,
            weights,
            even,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.dirs[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.dirs
            .chunks_exact(self.n)
            .zip(self.weights.iter().copied())
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wᵢ uᵢ⊗uᵢ`.
    pub fn second_moment(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for (u, w) in self.atoms() {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w * u[i] * u[j];
                }
            }
        }
        m
    }

    /// `‖Σ wᵢ uᵢ⊗uᵢ − Id‖` in operator norm.
    pub fn isotropy_defect(&self) -> f64 {
        let m = self.second_moment() - DMatrix::identity(self.n, self.n);
        linalg::sym_operator_norm(&m)
    }

    /// `‖(1/(n−1)) Σ wᵢ π_{uᵢ} − Id‖` with `π_u = Id − u⊗u`.
    ///
    /// Computed from the projections themselves rather than from the second
    /// moment, so agreement with [`Self::isotropy_defect`] is a genuine check
    /// of the decomposition identity for isotropic measures.
    pub fn projection_decomposition_defect(&self) -> f64 {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for (u, w) in self.atoms() {
            for i in 0..n {
                for j in 0..n {
                    let p = if i == j { 1.0 } else { 0.0 } - u[i] * u[j];
                    m[(i, j)] += w * p;
                }
            }
        }
        m /= n as f64 - 1.0;
        m -= DMatrix::identity(n, n);
        linalg::sym_operator_norm(&m)
    }

    /// True when every atom lies within `1e-10` of `±u` for a single `u`.
    pub fn is_antipodally_concentrated(&self) -> bool {
        let u0 = self.direction(0);
        self.atoms()
            .all(|(u, _)| linalg::perp_norm(u, u0) <= MERGE_TOLERANCE)
    }

    /// True when the atoms span `ℝⁿ`, i.e. the measure is not concentrated on
    /// a great subsphere.
    pub fn spans_space(&self) -> bool {
        let (lo, hi) = linalg::sym_eigen_range(&self.second_moment());
        lo > 1e-12 * hi.max(1.0)
    }

    /// The image of the measure under an orthogonal map.
    pub fn rotated(&self, rot: &DMatrix<f64>) -> SphericalMeasure {
        let mut dirs = Vec::with_capacity(self.dirs.len());
        for (u, _) in self.atoms() {
            let mut v = linalg::apply(rot, u);
            linalg::normalize(&mut v);
            dirs.extend(v);
        }
        Self::assemble(self.n, dirs, self.weights.clone())
    }

    /// `Σ λ_k μ_k` for measures of a common dimension.
    pub fn combination(parts: &[(f64, &SphericalMeasure)]) -> Result<SphericalMeasure> {
        let n = parts
            .first()
            .map(|p| p.1.n)
            .ok_or_else(|| Error::domain("empty combination"))?;
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        for &(lambda, mu) in parts {
            if mu.n != n {
                return Err(Error::domain("dimension mismatch in combination"));
            }
            if lambda <= 0.0 {
                continue;
            }
            dirs.extend_from_slice(&mu.dirs);
            weights.extend(mu.weights.iter().map(|w| lambda * w));
        }
        Ok(Self::assemble(n, dirs, weights))
    }

    /// `Σ |μ₁({u}) − μ₂({u})|` over the union of atoms, atoms matched within
    /// the merge tolerance.
    pub fn total_variation(&self, b: &SphericalMeasure) -> f64 {
        let mut used = vec![false; b.len()];
        let mut tv = 0.0;
        for (u, wa) in self.atoms() {
            let hit = b.atoms().enumerate().position(|(j, (v, _))| {
                !used[j]
                    && u.iter()
                        .zip(v)
                        .all(|(x, y)| (x - y).abs() <= MERGE_TOLERANCE)
            });
            match hit {
                Some(j) => {
                    used[j] = true;
                    tv += (wa - b.weights()[j]).abs();
                }
                None => tv += wa,
            }
        }
        tv + b
            .weights()
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .map(|(w, _)| w)
            .sum::<f64>()
    }

    /// Write the `# dim=n` header and one `u₁,…,u_n,weight` row per atom,
    /// every value with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# dim={}\n", self.n);
        for (u, w) in self.atoms() {
            for x in u {
                let _ = write!(out, "{x:.16e},");
            }
            let _ = writeln!(out, "{w:.16e}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<SphericalMeasure> {
        let (n, rows) = crate::io::parse_dim_csv(text)?;
        let mut dirs = Vec::with_capacity(rows.len() * n);
        let mut weights = Vec::with_capacity(rows.len());
        for (line, row) in rows {
            if row.len() != n + 1 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields, found {}", n + 1, row.len()),
                });
            }
            let r = linalg::norm(&row[..n]);
            if (r - 1.0).abs() > UNIT_TOLERANCE {
                return Err(Error::Parse {
                    line,
                    msg: format!("direction has norm {r}"),
                });
            }
            if !(row[n] > 0.0) {
                return Err(Error::Parse {
                    line,
                    msg: format!("weight {} is not positive", row[n]),
                });
            }
            dirs.extend_from_slice(&row[..n]);
            weights.push(row[n]);
        }
        SphericalMeasure::new(n, dirs, weights)
    }
}

fn merge_atoms(n: usize, dirs: Vec<f64>, weights: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let m = weights.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| dirs[a * n].total_cmp(&dirs[b * n]).then(a.cmp(&b)));
    let mut absorbed = vec![usize::MAX; m];
    for (k, &i) in order.iter().enumerate() {
        if absorbed[i] != usize::MAX {
            continue;
        }
        absorbed[i] = i;
        let ui = &dirs[i * n..(i + 1) * n];
        for &j in &order[k + 1..] {
            if dirs[j * n] - ui[0] > MERGE_TOLERANCE {
                break;
            }
            if absorbed[j] == usize::MAX {
                let uj = &dirs[j * n..(j + 1) * n];
                let d2: f64 = ui.iter().zip(uj).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= MERGE_TOLERANCE * MERGE_TOLERANCE {
                    absorbed[j] = i;
                }
            }
        }
    }
    if absorbed.iter().enumerate().all(|(i, &a)| a == i) {
        return (dirs, weights);
    }
    let mut acc = vec![0.0; m];
    for j in 0..m {
        acc[absorbed[j]] += weights[j];
    }
    let mut out_dirs = Vec::new();
    let mut out_w = Vec::new();
    for i in 0..m {
        if absorbed[i] == i {
            out_dirs.extend_from_slice(&dirs[i * n..(i + 1) * n]);
            out_w.push(acc[i]);
        }
    }
    (out_dirs, out_w)
}

fn detect_even(n: usize, dirs: &[f64], weights: &[f64]) -> bool {
    let m = weights.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| dirs[a * n].total_cmp(&dirs[b * n]));
    let firsts: Vec<f64> = order.iter().map(|&i| dirs[i * n]).collect();
    (0..m).all(|i| {
        let u = &dirs[i * n..(i + 1) * n];
        let target = -u[0];
        let start = firsts.partition_point(|&x| x < target - 1e-9);
        order[start..]
            .iter()
            .take_while(|&&j| dirs[j * n] <= target + 1e-9)
            .any(|&j| {
                let v = &dirs[j * n..(j + 1) * n];
                u.iter().zip(v).all(|(a, b)| (a + b).abs() <= 1e-9)
                    && (weights[i] - weights[j]).abs() <= EVEN_TOLERANCE * weights[i].max(1.0)
            })
    })
}

/// Uniform measure on `{±e₁, …, ±e_n}` with atoms of weight `1/2`.
pub fn cross_measure(n: usize) -> Result<SphericalMeasure> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let mut dirs = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            dirs.extend(e);
        }
    }
    Ok(SphericalMeasure::assemble(n, dirs, vec![0.5; 2 * n]))
}

/// Spherical Lebesgue measure scaled by `1/κ_n` (mass `n`), carried by the
/// nodes of a sphere rule of the given resolution.
pub fn lebesgue_measure(n: usize, resolution: usize) -> Result<SphericalMeasure> {
    let q = build_sphere_quadrature(n, resolution)?;
    let kappa = numerics::unit_ball_volume(n);
    let mut dirs = Vec::with_capacity(q.len() * n);
    let mut weights = Vec::with_capacity(q.len());
    for (u, w) in q.iter() {
        dirs.extend_from_slice(u);
        weights.push(w / kappa);
    }
    Ok(SphericalMeasure::assemble(n, dirs, weights))
}

/// Unit vertices of a regular simplex in `ℝⁿ` (`n + 1` of them).
pub fn simplex_vertices(n: usize) -> Vec<Vec<f64>> {
    // Helmert basis of the hyperplane Σxᵢ = 0 in ℝ^{n+1}.
    let basis: Vec<Vec<f64>> = (1..=n)
        .map(|k| {
            let s = 1.0 / ((k * (k + 1)) as f64).sqrt();
            let mut h = vec![0.0; n + 1];
            h[..k].iter_mut().for_each(|x| *x = s);
            h[k] = -(k as f64) * s;
            h
        })
        .collect();
    let c = 1.0 / (n + 1) as f64;
    (0..=n)
        .map(|i| {
            let mut p = vec![-c; n + 1];
            p[i] += 1.0;
            let mut v: Vec<f64> = basis.iter().map(|h| linalg::dot(h, &p)).collect();
            linalg::normalize(&mut v);
            v
        })
        .collect()
}

/// Atoms at the vertices of a regular simplex, each of weight `n/(n+1)`.
/// Isotropic but not even.
pub fn simplex_measure(n: usize) -> Result<SphericalMeasure> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let dirs: Vec<f64> = simplex_vertices(n).into_iter().flatten().collect();
    let w = n as f64 / (n + 1) as f64;
    Ok(SphericalMeasure::assemble(n, dirs, vec![w; n + 1]))
}

/// Random convex combination of `blocks` Haar-rotated copies of the cross
/// measure (`even = true`) or the simplex measure (`even = false`).
/// Deterministic in `seed`.
pub fn random_isotropic_measure(
    n: usize,
    blocks: usize,
    seed: u64,
    even: bool,
) -> Result<SphericalMeasure> {
    if blocks == 0 {
        return Err(Error::config("need at least one block"));
    }
    let base = if even {
        cross_measure(n)?
    } else {
        simplex_measure(n)?
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..blocks)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3)
        .collect();
    let total: f64 = raw.iter().sum();
    let rotated: Vec<SphericalMeasure> = (0..blocks)
        .map(|_| base.rotated(&linalg::random_rotation(n, &mut rng)))
        .collect();
    let parts: Vec<(f64, &SphericalMeasure)> =
        raw.iter().map(|l| l / total).zip(rotated.iter()).collect();
    SphericalMeasure::combination(&parts)
}

/// `(μ + μ∘(−Id))/2`.
pub fn evenize(mu: &SphericalMeasure) -> SphericalMeasure {
    let mut dirs = Vec::with_capacity(2 * mu.dirs.len());
    let mut weights = Vec::with_capacity(2 * mu.len());
    for (u, w) in mu.atoms() {
        dirs.extend_from_slice(u);
        weights.push(0.5 * w);
        dirs.extend(u.iter().map(|x| -x));
        weights.push(0.5 * w);
    }
    let mut out = SphericalMeasure::assemble(mu.n, dirs, weights);
    // Construction is symmetric; tolerate merge rounding in the flag.
    out.even = true;
    out
}
