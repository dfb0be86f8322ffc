//! Sine and cosine transforms of atomic measures, their Funk–Hecke
//! multipliers, and an injectivity diagnostic.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{evenize, SphericalMeasure};
use crate::numerics::{self, gegenbauer_ratio_unchecked, QuadratureRule};

/// Zonal kernel `g` of a transform `T_g μ(u) = ∫ g(u·v) dμ(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum KernelKind {
    /// `g(t) = √(1−t²)`
    Sine,
    /// `g(t) = |t|`
    Cosine,
}

impl KernelKind {
    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        match self {
            KernelKind::Sine => (1.0 - t * t).max(0.0).sqrt(),
            KernelKind::Cosine => t.abs(),
        }
    }
}

/// `∫ ‖x|u^⊥‖ dμ(u)`.
pub fn sine_transform(mu: &SphericalMeasure, x: &[f64]) -> f64 {
    let xx = linalg::dot(x, x);
    mu.atoms()
        .map(|(u, w)| {
            let t = linalg::dot(x, u);
            w * (xx - t * t).max(0.0).sqrt()
        })
        .sum()
}

/// `∫ |x·u| dμ(u)`.
pub fn cosine_transform(mu: &SphericalMeasure, x: &[f64]) -> f64 {
    mu.atoms().map(|(u, w)| w * linalg::dot(x, u).abs()).sum()
}

pub fn transform(kernel: KernelKind, mu: &SphericalMeasure, x: &[f64]) -> f64 {
    match kernel {
        KernelKind::Sine => sine_transform(mu, x),
        KernelKind::Cosine => cosine_transform(mu, x),
    }
}

/// The multiplier `a_k[T_g]` by which `T_g` acts on degree-`k` spherical
/// harmonics of `S^{n−1}`.
///
/// Normalized so that `a_0 = ∫_{S^{n−1}} g(u·v) du`:
/// `a_k = (n−1)κ_{n−1} ∫₀^π g(cos θ) C_k(cos θ)/C_k(1) sin^{n−2}θ dθ`.
/// The θ-integral is split at `π/2` (the cosine kernel's kink) and each half
/// is refined by node doubling until it is stable to `1e-14`.
pub fn funk_hecke_multiplier(kernel: KernelKind, n: usize, k: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    let area = (n as f64 - 1.0) * numerics::unit_ball_volume(n - 1);
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        kernel.eval(c) * gegenbauer_ratio_unchecked(n, k, c) * s.powi(n as i32 - 2)
    };
    let lo = numerics::integrate_interval_adaptive(f, 0.0, PI / 2.0, 1e-14);
    let hi = numerics::integrate_interval_adaptive(f, PI / 2.0, PI, 1e-14);
    Ok(area * (lo + hi))
}

/// Associated Legendre function `P_l^m(x)` (Condon–Shortley phase).
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut p0 = pmm;
    let mut p1 = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let p2 = (x * (2 * ll - 1) as f64 * p1 - (ll + m - 1) as f64 * p0) / (ll - m) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Unnormalized real spherical harmonic `P_k^m(cos θ) cos(mφ)` on `S²`.
pub fn real_harmonic(k: usize, m: usize, u: &[f64]) -> f64 {
    let phi = u[1].atan2(u[0]);
    assoc_legendre(k, m, u[2].clamp(-1.0, 1.0)) * (m as f64 * phi).cos()
}

/// Apply `T_g` to a degree-`k` real harmonic on `S²` by quadrature and
/// measure how far the result is from `a_k Y`.
///
/// Returns `max_i |T_g Y(uᵢ) − a_k Y(uᵢ)| / (a_0 · max|Y|)` over the rule's
/// nodes, i.e. the residual relative to the operator's sup-norm scale `a_0`,
/// comparable with the rule's accuracy budget.
pub fn multiplier_action_residual(
    kernel: KernelKind,
    k: usize,
    quad: &QuadratureRule,
) -> Result<f64> {
    if quad.dim() != 3 {
        return Err(Error::Unsupported(format!(
            "explicit harmonics are only implemented on S², got n = {}",
            quad.dim()
        )));
    }
    let m = k / 2;
    let ak = funk_hecke_multiplier(kernel, 3, k)?;
    let a0 = funk_hecke_multiplier(kernel, 3, 0)?;
    let y: Vec<f64> = quad.iter().map(|(u, _)| real_harmonic(k, m, u)).collect();
    let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut worst: f64 = 0.0;
    for (i, (u, _)) in quad.iter().enumerate() {
        let ty: f64 = quad
            .iter()
            .zip(&y)
            .map(|((v, w), yv)| w * kernel.eval(linalg::dot(u, v)) * yv)
            .sum();
        worst = worst.max((ty - ak * y[i]).abs());
    }
    Ok(worst / (a0 * ymax))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct InjectivityReport {
    /// `max_j |Sμ₁(uⱼ) − Sμ₂(uⱼ)|` over the rule's nodes.
    pub transform_distance: f64,
    /// Total variation distance between the evenized atom sets.
    pub measure_distance: f64,
    /// Threshold below which the transform distance counts as zero.
    pub transform_threshold: f64,
    /// True when "transforms agree" and "measures agree" coincide.
    pub consistent_with_injectivity: bool,
}

/// Compare two even measures through their sine transforms on the nodes of
/// `quad`. A numerical diagnostic, not a proof of injectivity.
pub fn even_injectivity_diagnostic(
    mu1: &SphericalMeasure,
    mu2: &SphericalMeasure,
    quad: &QuadratureRule,
) -> Result<InjectivityReport> {
    if !mu1.is_even() || !mu2.is_even() {
        return Err(Error::domain("injectivity diagnostic needs even measures"));
    }
    if mu1.dim() != mu2.dim() || quad.dim() != mu1.dim() {
        return Err(Error::domain("dimension mismatch"));
    }
    let transform_distance = quad
        .iter()
        .map(|(u, _)| (sine_transform(mu1, u) - sine_transform(mu2, u)).abs())
        .fold(0.0, f64::max);
    let measure_distance = evenize(mu1).total_variation(&evenize(mu2));
    let scale = mu1.mass().max(mu2.mass());
    let transform_threshold = 10.0 * quad.accuracy_budget() * scale;
    let transforms_equal = transform_distance <= transform_threshold;
    let measures_equal = measure_distance <= 1e-9 * scale;
    Ok(InjectivityReport {
        transform_distance,
        measure_distance,
        transform_threshold,
        consistent_with_injectivity: transforms_equal == measures_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::plane_rotation;
    use crate::measures::{cross_measure, lebesgue_measure, random_isotropic_measure};
    use crate::numerics::build_sphere_quadrature;

    fn diag(n: usize) -> Vec<f64> {
        vec![1.0 / (n as f64).sqrt(); n]
    }

    #[test]
    fn cross_measure_transforms() {
        let c = cross_measure(3).unwrap();
        assert!((sine_transform(&c, &[1.0, 0.0, 0.0]) - 2.0).abs() < 1e-15);
        assert!((sine_transform(&c, &diag(3)) - 6f64.sqrt()).abs() < 1e-14);
        assert!((cosine_transform(&c, &[1.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine_transform(&c, &[0.0; 3]), 0.0);
    }

    #[test]
    fn lebesgue_sine_transform_is_gamma() {
        let l = lebesgue_measure(3, 32).unwrap();
        let q = build_sphere_quadrature(3, 32).unwrap();
        let g = 3.0 * PI / 4.0;
        for x in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.48, -0.6, 0.64]] {
            assert!((sine_transform(&l, &x) - g).abs() / g < q.accuracy_budget());
        }
    }

    #[test]
    fn cosine_cap_for_isotropic() {
        for seed in 0..10 {
            let mu = random_isotropic_measure(4, 3, seed, true).unwrap();
            let x = [0.5, -0.5, 0.5, 0.5];
            assert!(cosine_transform(&mu, &x) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn multiplier_examples() {
        let a0 = funk_hecke_multiplier(KernelKind::Sine, 3, 0).unwrap();
        assert!((a0 - PI * PI).abs() < 1e-12);
        assert!(funk_hecke_multiplier(KernelKind::Sine, 3, 1).unwrap().abs() < 1e-12);
        let a2 = funk_hecke_multiplier(KernelKind::Sine, 3, 2).unwrap();
        assert!((a2 + PI * PI / 8.0).abs() < 1e-12);
        // Cosine kernel: a_0 = 2κ_{n−1}.
        let c0 = funk_hecke_multiplier(KernelKind::Cosine, 5, 0).unwrap();
        assert!((c0 - 2.0 * numerics::unit_ball_volume(4)).abs() < 1e-12);
    }

    #[test]
    fn multiplier_parity_pattern() {
        for n in 3..=6 {
            for k in 0..=4 {
                let odd = funk_hecke_multiplier(KernelKind::Sine, n, 2 * k + 1).unwrap();
                let even = funk_hecke_multiplier(KernelKind::Sine, n, 2 * k).unwrap();
                assert!(odd.abs() < 1e-10, "n={n} k={k} odd={odd}");
                assert!(even.abs() > 1e-6, "n={n} k={k} even={even}");
            }
        }
    }

    #[test]
    fn multiplier_matches_sphere_quadrature() {
        let q = build_sphere_quadrature(3, 48).unwrap();
        let v = [0.0, 0.6, 0.8];
        let s = q.integrate(|u| KernelKind::Sine.eval(linalg::dot(u, &v)));
        let a0 = funk_hecke_multiplier(KernelKind::Sine, 3, 0).unwrap();
        assert!((s - a0).abs() / a0 < q.accuracy_budget());
    }

    #[test]
    fn harmonic_residuals_within_budget() {
        let q = build_sphere_quadrature(3, 24).unwrap();
        for k in 0..=4 {
            let r = multiplier_action_residual(KernelKind::Sine, k, &q).unwrap();
            assert!(
                r < q.accuracy_budget(),
                "k={k} r={r} budget={}",
                q.accuracy_budget()
            );
        }
        let q4 = build_sphere_quadrature(4, 1).unwrap();
        assert!(matches!(
            multiplier_action_residual(KernelKind::Sine, 2, &q4),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn injectivity_diagnostic_examples() {
        let q = build_sphere_quadrature(3, 16).unwrap();
        let c = cross_measure(3).unwrap();
        let same = even_injectivity_diagnostic(&c, &c, &q).unwrap();
        assert_eq!((same.transform_distance, same.measure_distance), (0.0, 0.0));
        assert!(same.consistent_with_injectivity);

        let rot = c.rotated(&plane_rotation(3, 0, 1, PI / 6.0));
        let r = even_injectivity_diagnostic(&c, &rot, &q).unwrap();
        assert!(r.transform_distance > 0.05 && r.measure_distance > 1.0);
        assert!(r.consistent_with_injectivity);

        let l = lebesgue_measure(3, 16).unwrap();
        let r = even_injectivity_diagnostic(&c, &l, &q).unwrap();
        assert!(r.transform_distance > r.transform_threshold);
        let e1 = [1.0, 0.0, 0.0];
        assert!((sine_transform(&c, &e1) - 2.0).abs() < 1e-15);
        assert!((sine_transform(&l, &e1) - 3.0 * PI / 4.0).abs() < 1e-3);
        assert!(r.consistent_with_injectivity);

        let odd = crate::measures::simplex_measure(3).unwrap();
        assert!(even_injectivity_diagnostic(&odd, &c, &q).is_err());
    }
}
