//! Dimension constants, sphere quadrature and Gegenbauer recurrences.
//!
//! Every sphere integral in the crate goes through a [`QuadratureRule`].
//! For `n = 3` the rule is a Gauss–Legendre (polar) × uniform (azimuth)
//! product; for `n >= 4` it is the orbit of a shifted Halton point set under
//! coordinate sign flips and cyclic coordinate shifts. That group contains
//! `-Id`, so every rule is antipodally symmetric, and it makes the second
//! moment tensor of the node set an exact multiple of the identity.
//!
//! The `n >= 4` rule is split into independently rotated replicas; their
//! spread gives a randomized quasi-Monte Carlo error estimate.

use std::f64::consts::PI;

use statrs::function::erf::erf_inv;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg;

/// Smallest polar resolution accepted for the `n = 3` product rule.
pub const MIN_RESOLUTION_N3: usize = 4;
/// Smallest number of base points accepted for the `n >= 4` orbit rule.
pub const MIN_RESOLUTION_HIGH: usize = 1;

const QUADRATURE_SHIFT_SEED: u64 = 0x5e_ed0f_5a7e;
/// Number of rotated replicas in an `n >= 4` rule (fewer if there are
/// fewer base points).
pub const ORBIT_REPLICAS: usize = 8;
const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `ln κ_n`, the log-volume of the unit ball in `ℝⁿ`, valid for all `n >= 0`.
pub fn ln_unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    ln_unit_ball_volume(n).exp()
}

/// Surface area `n κ_n` of the unit sphere in `ℝⁿ`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// The constants attached to a dimension `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DimensionConstants {
    pub n: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub log_kappa: f64,
    pub log_alpha: f64,
    pub log_gamma: f64,
}

/// `κ_n`, `α_n = n(n−1)^{2n}/Γ(n)^{1/(n−1)}` and
/// `γ_n = (n−1)κ_{n−1}²/(κ_{n−2}κ_n)`, all routed through log-gamma.
///
/// The `log_*` fields stay finite for very large `n`; the plain fields
/// overflow to infinity (α_n) or underflow to zero (κ_n) first.
pub fn constants(n: usize) -> Result<DimensionConstants> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let nf = n as f64;
    let log_kappa = ln_unit_ball_volume(n);
    let log_alpha = nf.ln() + 2.0 * nf * (nf - 1.0).ln() - ln_gamma(nf) / (nf - 1.0);
    let log_gamma =
        (nf - 1.0).ln() + 2.0 * ln_unit_ball_volume(n - 1) - ln_unit_ball_volume(n - 2) - log_kappa;
    Ok(DimensionConstants {
        n,
        kappa: log_kappa.exp(),
        alpha: log_alpha.exp(),
        gamma: log_gamma.exp(),
        log_kappa,
        log_alpha,
        log_gamma,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence. Nodes are returned in increasing order and are
/// exactly symmetric about 0.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with an `m`-point Gauss–Legendre rule.
pub fn integrate_interval(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let (x, w) = gauss_legendre(m);
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    x.iter()
        .zip(&w)
        .map(|(&t, &wt)| wt * f(c * t + d))
        .sum::<f64>()
        * c
}

/// Gauss–Legendre on `[a, b]`, doubling the node count until two successive
/// results agree to `tol` (absolute, or relative to the magnitude when it
/// exceeds one). Returns the finer value.
pub fn integrate_interval_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut m = 16;
    let mut prev = integrate_interval(&f, a, b, m);
    while m < 8192 {
        m *= 2;
        let next = integrate_interval(&f, a, b, m);
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Degree-`k` Gegenbauer polynomial of index `(n−2)/2` at `t`, normalized
/// to 1 at `t = 1`. For `n = 3` these are the Legendre polynomials.
pub fn gegenbauer_ratio(n: usize, k: usize, t: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    if !(-1.0..=1.0).contains(&t) || t.is_nan() {
        return Err(Error::domain(format!(
            "gegenbauer argument {t} outside [-1, 1]"
        )));
    }
    Ok(gegenbauer_ratio_unchecked(n, k, t))
}

pub(crate) fn gegenbauer_ratio_unchecked(n: usize, k: usize, t: f64) -> f64 {
    let lambda = (n as f64 - 2.0) / 2.0;
    if k == 0 {
        return 1.0;
    }
    let mut r0 = 1.0;
    let mut r1 = t;
    for j in 2..=k {
        let jf = j as f64;
        let r2 = (2.0 * (jf + lambda - 1.0) * t * r1 - (jf - 1.0) * r0) / (2.0 * lambda + jf - 1.0);
        r0 = r1;
        r1 = r2;
    }
    r1
}

/// A value with an error estimate in the same units.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn scale(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RuleKind {
    /// Gauss–Legendre in `cos θ` times uniform azimuth (`n = 3`).
    Product,
    /// Equal-weight orbit of a low-discrepancy base set (`n >= 4`).
    SymmetrizedHalton,
}

/// Nodes and weights on `S^{n−1}`, weights summing to `n κ_n`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    n: usize,
    resolution: usize,
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    replicas: usize,
    accuracy_budget: f64,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterate over `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.n)
            .zip(self.weights.iter().copied())
    }

    /// Estimated relative error for integrating even integrands of moderate
    /// regularity (including kinks of the `|t|` and `√(1−t²)` type).
    pub fn accuracy_budget(&self) -> f64 {
        self.accuracy_budget
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(u, w)| w * f(u)).sum()
    }

    /// The same family of rule at roughly half the resolution, if one exists.
    pub fn coarser(&self) -> Option<QuadratureRule> {
        let min = if self.n == 3 {
            MIN_RESOLUTION_N3
        } else {
            MIN_RESOLUTION_HIGH
        };
        let r = self.resolution / 2;
        if r < min {
            return None;
        }
        build_sphere_quadrature(self.n, r).ok()
    }

    /// Number of independently rotated sub-rules (1 for the product rule).
    pub fn replicas(&self) -> usize {
        self.replicas
    }

    /// Integrate and attach an error estimate. With replicas this is the
    /// standard error of the replica integrals; otherwise the larger of the
    /// change against the coarser companion rule and the rule's own budget.
    pub fn integrate_with_error(&self, f: impl Fn(&[f64]) -> f64) -> Estimate {
        if self.replicas >= 2 {
            let k = self.replicas;
            let per = self.len() / k;
            let parts: Vec<f64> = (0..k)
                .map(|r| {
                    (r * per..(r + 1) * per)
                        .map(|i| self.weights[i] * f(self.node(i)))
                        .sum::<f64>()
                        * k as f64
                })
                .collect();
            let value = parts.iter().sum::<f64>() / k as f64;
            let var = parts.iter().map(|p| (p - value).powi(2)).sum::<f64>() / (k - 1) as f64;
            let error = (var / k as f64).sqrt().max(4.0 * f64::EPSILON * value.abs());
            return Estimate { value, error };
        }
        let value = self.integrate(&f);
        let budget = self.accuracy_budget * value.abs();
        let error = match self.coarser() {
            Some(c) => (value - c.integrate(&f)).abs().max(budget),
            None => budget,
        };
        Estimate { value, error }
    }

    /// One row per node: `u₁ … u_n weight`, space separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (u, w) in self.iter() {
            for x in u {
                out.push_str(&format!("{x:.17e} "));
            }
            out.push_str(&format!("{w:.17e}\n"));
        }
        out
    }
}

/// Build a sphere rule. For `n = 3`, `resolution` is the number of
/// Gauss–Legendre nodes in `cos θ` (the azimuth gets twice as many);
/// for `n >= 4` it is the number of base points, each expanded to an orbit
/// of `n·2ⁿ` equal-weight nodes (rounded up to a multiple of the replica
/// count; [`QuadratureRule::resolution`] reports the value used).
pub fn build_sphere_quadrature(n: usize, resolution: usize) -> Result<QuadratureRule> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let mut rule = if n == 3 {
        if resolution < MIN_RESOLUTION_N3 {
            return Err(Error::config(format!(
                "resolution {resolution} below minimum {MIN_RESOLUTION_N3} for n = 3"
            )));
        }
        product_rule(resolution)
    } else {
        if resolution < MIN_RESOLUTION_HIGH {
            return Err(Error::config(format!(
                "resolution {resolution} below minimum {MIN_RESOLUTION_HIGH} for n = {n}"
            )));
        }
        if n > 16 {
            return Err(Error::config(format!(
                "orbit rule limited to n <= 16, got {n}"
            )));
        }
        orbit_rule(n, resolution)
    };
    rule.accuracy_budget = measure_budget(&rule);
    Ok(rule)
}

fn product_rule(r: usize) -> QuadratureRule {
    let (t, wt) = gauss_legendre(r);
    let m = 2 * r;
    let dphi = 2.0 * PI / m as f64;
    let mut nodes = Vec::with_capacity(3 * r * m);
    let mut weights = Vec::with_capacity(r * m);
    for (&ti, &wi) in t.iter().zip(&wt) {
        let s = (1.0 - ti * ti).max(0.0).sqrt();
        for j in 0..m {
            let phi = (j as f64 + 0.5) * dphi;
            nodes.extend_from_slice(&[s * phi.cos(), s * phi.sin(), ti]);
            weights.push(wi * dphi);
        }
    }
    QuadratureRule {
        n: 3,
        resolution: r,
        kind: RuleKind::Product,
        nodes,
        weights,
        replicas: 1,
        accuracy_budget: 0.0,
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn orbit_rule(n: usize, base: usize) -> QuadratureRule {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(QUADRATURE_SHIFT_SEED ^ n as u64);
    let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let replicas = ORBIT_REPLICAS.min(base);
    let per = base.div_ceil(replicas);
    let base = per * replicas;
    let orbit = n << n;
    let mut nodes = Vec::with_capacity(base * orbit * n);
    let mut g = vec![0.0; n];
    let mut v = vec![0.0; n];
    for r in 0..replicas {
        let rot = if replicas == 1 {
            nalgebra::DMatrix::identity(n, n)
        } else {
            linalg::random_rotation(n, &mut rng)
        };
        for i in r * per..(r + 1) * per {
            for (d, gd) in g.iter_mut().enumerate() {
                let p = (radical_inverse(i as u64 + 1, PRIMES[d % PRIMES.len()]) + shift[d]).fract();
                let p = p.clamp(1e-12, 1.0 - 1e-12);
                *gd = std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0);
            }
            linalg::normalize(&mut g);
            for s in 0..n {
                for signs in 0..(1usize << n) {
                    for d in 0..n {
                        let x = g[(d + s) % n];
                        v[d] = if signs >> d & 1 == 1 { -x } else { x };
                    }
                    nodes.extend(linalg::apply(&rot, &v));
                }
            }
        }
    }
    let count = base * orbit;
    let w = sphere_area(n) / count as f64;
    QuadratureRule {
        n,
        resolution: base,
        kind: RuleKind::SymmetrizedHalton,
        nodes,
        weights: vec![w; count],
        replicas,
        accuracy_budget: 0.0,
    }
}

/// Probe directions used by the budget measurement.
fn probe_directions(n: usize) -> Vec<Vec<f64>> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xb0d6e7 + n as u64);
    (0..4)
        .map(|_| {
            let mut a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            linalg::normalize(&mut a);
            a
        })
        .collect()
}

/// Twice the worst relative error over test integrands with closed-form
/// sphere integrals: `|u·a|`, `√(1−(u·a)²)` and `(u·a)⁴`.
fn measure_budget(rule: &QuadratureRule) -> f64 {
    let n = rule.n;
    let kappa = unit_ball_volume(n);
    let abs_exact = 2.0 * unit_ball_volume(n - 1);
    let sine_exact = kappa * constants(n).map(|c| c.gamma).unwrap_or(f64::NAN);
    let quartic_exact = 3.0 * kappa / (n as f64 + 2.0);
    let mut worst: f64 = 0.0;
    for a in probe_directions(n) {
        let abs_q = rule.integrate(|u| linalg::dot(u, &a).abs());
        let sine_q = rule.integrate(|u| (1.0 - linalg::dot(u, &a).powi(2)).max(0.0).sqrt());
        let quartic_q = rule.integrate(|u| linalg::dot(u, &a).powi(4));
        worst = worst
            .max(((abs_q - abs_exact) / abs_exact).abs())
            .max(((sine_q - sine_exact) / sine_exact).abs())
            .max(((quartic_q - quartic_exact) / quartic_exact).abs());
    }
    (2.0 * worst).max(4.0 * f64::EPSILON)
}
