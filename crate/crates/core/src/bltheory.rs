//! Rank `n−1` Brascamp–Lieb data, the forward and reverse integrals, and
//! the duality chain linking `V(S_μ*)` to `V(S_μ)`.
//!
//! Integrals over `ℝⁿ` are importance-sampled Monte Carlo. Gaussian
//! integrands use a Gaussian envelope 1.2× wider than the widest density;
//! everything else uses a radial envelope `r ~ Gamma(n, rate)` with uniform
//! direction, whose weights stay bounded for exponentially decaying
//! integrands (a Gaussian envelope would have infinite variance there).

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::bodies::{self, chunked_sum, polar_volume, sine_body_any, SeminormSum, SupportBody, VolumeMethod};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::SphericalMeasure;
use crate::numerics::{self, integrate_interval_adaptive, Estimate, QuadratureRule};

/// Decomposition tolerance for admissible instances.
pub const ADMISSIBLE_DEFECT: f64 = 1e-10;
/// Isotropy tolerance for measures turned into instances.
pub const ISOTROPY_TOLERANCE: f64 = 1e-8;
/// Sample cap for the reverse integral inside the chain check, whose
/// membership test is far costlier than the forward integrand.
pub const RBL_SAMPLE_CAP: usize = 200_000;

/// Directions `uᵢ` and weights `cᵢ` with `Σ cᵢ π_{uᵢ} = Id`.
#[derive(Debug, Clone)]
pub struct BLInstance {
    n: usize,
    dirs: Vec<f64>,
    weights: Vec<f64>,
    defect: f64,
}

fn projection_sum(n: usize, dirs: &[f64], weights: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for (u, &c) in dirs.chunks_exact(n).zip(weights) {
        for j in 0..n {
            m[(j, j)] += c;
            for i in 0..n {
                m[(i, j)] -= c * u[i] * u[j];
            }
        }
    }
    m
}

impl BLInstance {
    pub fn new(n: usize, dirs: Vec<f64>, weights: Vec<f64>) -> Result<BLInstance> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if dirs.len() != n * weights.len() {
            return Err(Error::domain("direction and weight counts differ"));
        }
        if weights.len() < n {
            return Err(Error::domain(format!("need at least {n} directions, got {}", weights.len())));
        }
        if weights.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::domain("weights must be positive"));
        }
        if dirs.chunks_exact(n).any(|u| (linalg::norm(u) - 1.0).abs() > 1e-12) {
            return Err(Error::domain("directions must be unit vectors"));
        }
        let mut m = projection_sum(n, &dirs, &weights);
        for i in 0..n {
            m[(i, i)] -= 1.0;
        }
        let defect = linalg::sym_operator_norm(&m);
        if !(defect < ADMISSIBLE_DEFECT) {
            return Err(Error::domain(format!("Σ cᵢ π_uᵢ differs from Id by {defect:e}")));
        }
        Ok(BLInstance { n, dirs, weights, defect })
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

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.dirs.chunks_exact(self.n).zip(self.weights.iter().copied())
    }
}

/// `cᵢ = c̄ᵢ/(n−1)` from an isotropic measure with atoms `(uᵢ, c̄ᵢ)`.
pub fn bl_instance_from_measure(mu: &SphericalMeasure) -> Result<BLInstance> {
    let d = mu.isotropy_defect();
    if !(d < ISOTROPY_TOLERANCE) {
        return Err(Error::domain(format!("measure is not isotropic (defect {d:e})")));
    }
    let n = mu.dim();
    let scale = 1.0 / (n as f64 - 1.0);
    let dirs: Vec<f64> = mu.atoms().flat_map(|(u, _)| u.iter().copied()).collect();
    let weights = mu.weights().iter().map(|w| w * scale).collect();
    BLInstance::new(n, dirs, weights)
}

pub type DensityOracle = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum DensityKind {
    /// `normalizer · exp(−λ‖y‖)`.
    ExpNorm { lambda: f64, normalizer: f64 },
    /// `normalizer · 1[‖y‖ ≤ radius]`.
    BallIndicator { radius: f64, normalizer: f64 },
    /// Centered Gaussian density with covariance `variance · Id` on `u^⊥`.
    Gaussian { variance: f64 },
    /// Arbitrary nonnegative function of `y ∈ u^⊥` (given in ambient
    /// coordinates) with a declared integral.
    Custom { oracle: DensityOracle, integral: f64 },
}

impl fmt::Debug for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::ExpNorm { lambda, normalizer } => {
                write!(f, "ExpNorm {{ lambda: {lambda}, normalizer: {normalizer} }}")
            }
            DensityKind::BallIndicator { radius, normalizer } => {
                write!(f, "BallIndicator {{ radius: {radius}, normalizer: {normalizer} }}")
            }
            DensityKind::Gaussian { variance } => write!(f, "Gaussian {{ variance: {variance} }}"),
            DensityKind::Custom { integral, .. } => write!(f, "Custom {{ integral: {integral} }}"),
        }
    }
}

/// A nonnegative function on the hyperplane `u^⊥`.
#[derive(Debug, Clone)]
pub struct HyperplaneDensity {
    pub n: usize,
    pub kind: DensityKind,
}

impl HyperplaneDensity {
    /// `((n−1)^{n−1}/(Γ(n)κ_{n−1})) exp(−(n−1)‖y‖)`, integral 1.
    pub fn chain_exp(n: usize) -> Self {
        let d = n as f64 - 1.0;
        let ln_norm = d * d.ln() - ln_gamma(n as f64) - numerics::ln_unit_ball_volume(n - 1);
        HyperplaneDensity { n, kind: DensityKind::ExpNorm { lambda: d, normalizer: ln_norm.exp() } }
    }

    /// `(1/((n−1)^{n−1}κ_{n−1})) 1[‖y‖ ≤ n−1]`, integral 1.
    pub fn chain_indicator(n: usize) -> Self {
        let d = n as f64 - 1.0;
        let ln_norm = -(d * d.ln()) - numerics::ln_unit_ball_volume(n - 1);
        HyperplaneDensity { n, kind: DensityKind::BallIndicator { radius: d, normalizer: ln_norm.exp() } }
    }

    pub fn standard_gaussian(n: usize) -> Self {
        HyperplaneDensity { n, kind: DensityKind::Gaussian { variance: 1.0 } }
    }

    /// `∫_{u^⊥} f`, closed form for the built-in kinds.
    pub fn declared_integral(&self) -> f64 {
        let d = self.n - 1;
        match &self.kind {
            DensityKind::ExpNorm { lambda, normalizer } => {
                normalizer
                    * (ln_gamma(d as f64 + 1.0) + numerics::ln_unit_ball_volume(d) - d as f64 * lambda.ln())
                        .exp()
            }
            DensityKind::BallIndicator { radius, normalizer } => {
                normalizer * numerics::unit_ball_volume(d) * radius.powi(d as i32)
            }
            DensityKind::Gaussian { .. } => 1.0,
            DensityKind::Custom { integral, .. } => *integral,
        }
    }

    /// `∫_{u^⊥} f` by radial quadrature `(n−1)κ_{n−1}∫ f(r) r^{n−2} dr`, for
    /// the radial kinds; `None` for custom densities.
    pub fn radial_quadrature_integral(&self) -> Option<f64> {
        let d = self.n - 1;
        let shell = d as f64 * numerics::unit_ball_volume(d);
        let (upper, split) = match &self.kind {
            DensityKind::ExpNorm { lambda, .. } => (60.0 / lambda, 1.0 / lambda),
            DensityKind::BallIndicator { radius, .. } => (*radius, 0.5 * radius),
            DensityKind::Gaussian { variance } => (40.0 * variance.sqrt(), variance.sqrt()),
            DensityKind::Custom { .. } => return None,
        };
        let f = |r: f64| self.value_at_radius(r) * r.powi(d as i32 - 1);
        let tol = 1e-13;
        Some(shell * (integrate_interval_adaptive(f, 0.0, split, tol) + integrate_interval_adaptive(f, split, upper, tol)))
    }

    fn value_at_radius(&self, r: f64) -> f64 {
        match &self.kind {
            DensityKind::ExpNorm { lambda, normalizer } => normalizer * (-lambda * r).exp(),
            DensityKind::BallIndicator { radius, normalizer } => {
                if r <= *radius {
                    *normalizer
                } else {
                    0.0
                }
            }
            DensityKind::Gaussian { variance } => {
                let d = (self.n - 1) as f64;
                (2.0 * std::f64::consts::PI * variance).powf(-0.5 * d) * (-0.5 * r * r / variance).exp()
            }
            DensityKind::Custom { .. } => f64::NAN,
        }
    }

    /// `ln f(y)` for `y ∈ u^⊥` given in ambient coordinates.
    fn ln_value(&self, y: &[f64]) -> f64 {
        match &self.kind {
            DensityKind::ExpNorm { lambda, normalizer } => normalizer.ln() - lambda * linalg::norm(y),
            DensityKind::BallIndicator { radius, normalizer } => {
                if linalg::norm(y) <= *radius {
                    normalizer.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            DensityKind::Gaussian { variance } => {
                let d = (self.n - 1) as f64;
                -0.5 * d * (2.0 * std::f64::consts::PI * variance).ln() - 0.5 * linalg::dot(y, y) / variance
            }
            DensityKind::Custom { oracle, .. } => oracle(y).ln(),
        }
    }
}

/// `∏ (∫fᵢ)^{cᵢ}`, the right side of both inequalities.
pub fn product_of_integrals(inst: &BLInstance, densities: &[HyperplaneDensity]) -> Result<f64> {
    check_densities(inst, densities)?;
    Ok(inst
        .weights()
        .iter()
        .zip(densities)
        .map(|(c, f)| c * f.declared_integral().ln())
        .sum::<f64>()
        .exp())
}

fn check_densities(inst: &BLInstance, densities: &[HyperplaneDensity]) -> Result<()> {
    if densities.len() != inst.len() {
        return Err(Error::domain(format!(
            "{} densities for {} directions",
            densities.len(),
            inst.len()
        )));
    }
    if densities.iter().any(|f| f.n != inst.dim()) {
        return Err(Error::domain("density dimension differs from the instance"));
    }
    Ok(())
}

/// Fails unless every density has declared integral 1.
pub fn check_normalized(densities: &[HyperplaneDensity]) -> Result<()> {
    for (i, f) in densities.iter().enumerate() {
        let m = f.declared_integral();
        if !((m - 1.0).abs() < 1e-10) {
            return Err(Error::domain(format!("density {i} has integral {m}, expected 1")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Envelope {
    Gaussian { scale: f64 },
    RadialExp { rate: f64 },
}

impl Envelope {
    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, x: &mut [f64]) -> f64 {
        match *self {
            Envelope::Gaussian { scale } => {
                x.iter_mut().for_each(|c| *c = scale * Distribution::<f64>::sample(&StandardNormal, rng));
                let r2 = linalg::dot(x, x);
                -0.5 * n as f64 * (2.0 * std::f64::consts::PI * scale * scale).ln() - 0.5 * r2 / (scale * scale)
            }
            Envelope::RadialExp { rate } => {
                let gamma = Gamma::new(n as f64, 1.0 / rate).expect("valid gamma parameters");
                let r: f64 = gamma.sample(rng);
                let u = linalg::random_unit(n, rng);
                x.iter_mut().zip(&u).for_each(|(c, ui)| *c = r * ui);
                n as f64 * rate.ln() - rate * r - ln_gamma(n as f64) - numerics::sphere_area(n).ln()
            }
        }
    }
}

/// Weighted-sample mean and standard error from `(Σw, Σw²)` over `samples`.
fn mean_and_error(sums: (f64, f64), samples: usize) -> Estimate {
    let m = sums.0 / samples as f64;
    let var = (sums.1 / samples as f64 - m * m).max(0.0);
    Estimate { value: m, error: (var / samples as f64).sqrt() }
}

fn importance_integral(
    n: usize,
    env: Envelope,
    samples: usize,
    seed: u64,
    ln_integrand: impl Fn(&[f64]) -> f64,
) -> Result<Estimate> {
    if samples < bodies::MIN_MC_SAMPLES {
        return Err(Error::config(format!(
            "{samples} samples requested, at least {} required",
            bodies::MIN_MC_SAMPLES
        )));
    }
    let sums = chunked_sum(samples, seed, |rng, count| {
        let mut x = vec![0.0; n];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let lq = env.sample(n, rng, &mut x);
            let w = (ln_integrand(&x) - lq).exp();
            s += w;
            s2 += w * w;
        }
        (s, s2)
    });
    Ok(mean_and_error(sums, samples))
}

fn max_gaussian_sd(densities: &[HyperplaneDensity]) -> Option<f64> {
    densities.iter().try_fold(0.0f64, |acc, f| match f.kind {
        DensityKind::Gaussian { variance } => Some(acc.max(variance.sqrt())),
        _ => None,
    })
}

/// `∫ ∏ fᵢ(x|uᵢ^⊥)^{cᵢ} dx` with one standard error.
pub fn bl_left_integral(
    inst: &BLInstance,
    densities: &[HyperplaneDensity],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_densities(inst, densities)?;
    let n = inst.dim();
    let env = match max_gaussian_sd(densities) {
        Some(sd) => Envelope::Gaussian { scale: 1.2 * sd },
        None => {
            let mut decay = SeminormSum::new(n);
            let mut any = false;
            for ((u, c), f) in inst.iter().zip(densities) {
                if let DensityKind::ExpNorm { lambda, .. } = f.kind {
                    decay.push_perp(u, c * lambda);
                    any = true;
                }
            }
            let m = if any { decay.certified_min() } else { 0.0 };
            Envelope::RadialExp { rate: if m > 0.0 { 0.9 * m } else { 1.0 } }
        }
    };
    let mut y = vec![0.0; n];
    let ln_f = move |x: &[f64]| {
        let mut acc = 0.0;
        for ((u, c), f) in inst.iter().zip(densities) {
            let t = linalg::dot(u, x);
            y.iter_mut().zip(x.iter().zip(u)).for_each(|(yi, (xi, ui))| *yi = xi - t * ui);
            acc += c * f.ln_value(&y);
            if acc == f64::NEG_INFINITY {
                break;
            }
        }
        acc
    };
    let ln_f = std::cell::RefCell::new(ln_f);
    importance_integral(n, env, samples, seed, |x| (ln_f.borrow_mut())(x))
}

/// `∫ sup{∏ gᵢ(yᵢ)^{cᵢ} : x = Σcᵢyᵢ, yᵢ ∈ uᵢ^⊥} dx` with one standard error.
///
/// Supported when all densities are ball indicators (the sup is a constant
/// on the Minkowski sum `Σ cᵢ·radiusᵢ·(B ∩ uᵢ^⊥)`, tested by its gauge) or
/// all are Gaussians (the sup is `∏Zᵢ^{cᵢ} exp(−½ xᵀG⁻¹x)` with
/// `G = Σ cᵢσᵢ²π_{uᵢ}`).
pub fn rbl_left_integral(
    inst: &BLInstance,
    densities: &[HyperplaneDensity],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_densities(inst, densities)?;
    let n = inst.dim();
    let d = (n - 1) as f64;
    if let Some(sd) = max_gaussian_sd(densities) {
        let mut g = DMatrix::<f64>::zeros(n, n);
        let mut ln_const = 0.0;
        for ((u, c), f) in inst.iter().zip(densities) {
            let DensityKind::Gaussian { variance } = f.kind else { unreachable!() };
            ln_const += c * (-0.5 * d * (2.0 * std::f64::consts::PI * variance).ln());
            let w = c * variance;
            for j in 0..n {
                g[(j, j)] += w;
                for i in 0..n {
                    g[(i, j)] -= w * u[i] * u[j];
                }
            }
        }
        let ginv = g
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("reverse Gaussian form is singular".into()))?;
        let env = Envelope::Gaussian { scale: 1.2 * sd };
        return importance_integral(n, env, samples, seed, |x| {
            let mut q = 0.0;
            for j in 0..n {
                for i in 0..n {
                    q += x[i] * ginv[(i, j)] * x[j];
                }
            }
            ln_const - 0.5 * q
        });
    }
    let mut terms = SeminormSum::new(n);
    let mut ln_const = 0.0;
    for ((u, c), f) in inst.iter().zip(densities) {
        match f.kind {
            DensityKind::BallIndicator { radius, normalizer } => {
                terms.push_perp(u, c * radius);
                ln_const += c * normalizer.ln();
            }
            _ => {
                return Err(Error::Unsupported(
                    "reverse integral needs all ball indicators or all Gaussians".into(),
                ))
            }
        }
    }
    let body = SupportBody::from_seminorms(terms, bodies::BodyKind::SineBody)?;
    Ok(bodies::mc_volume(&body, samples, seed)?.scale(ln_const.exp()))
}

/// Outcome of the duality chain for one measure.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChainReport {
    /// `V(S_μ*)` by polar-coordinate quadrature.
    pub a: Estimate,
    /// `V(S_μ*)` as the prefactor times the forward integral.
    pub b: Estimate,
    /// `V(S_μ)/α_n` by radial quadrature.
    pub c: Estimate,
    /// Forward integral with unit-mass exponential densities.
    pub bl: Estimate,
    /// Reverse integral with unit-mass indicator densities.
    pub rbl: Estimate,
    /// `C/A`.
    pub slack_ratio: f64,
    /// `|A − B| <= 3(σ_A + σ_B)`.
    pub a_matches_b: bool,
    /// `B <= C + 3(σ_B + σ_C)`.
    pub b_below_c: bool,
    /// `bl <= rbl + 3(σ_bl + σ_rbl)`.
    pub duality_holds: bool,
}

/// Build the chain densities for `μ` and compare the three expressions for
/// the polar volume bound. Works for any isotropic `μ`, even or not.
pub fn kantorovich_chain_check(
    mu: &SphericalMeasure,
    quad: &QuadratureRule,
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    let n = mu.dim();
    let inst = bl_instance_from_measure(mu)?;
    let f = vec![HyperplaneDensity::chain_exp(n); inst.len()];
    let g = vec![HyperplaneDensity::chain_indicator(n); inst.len()];
    check_normalized(&f)?;
    check_normalized(&g)?;
    let body = sine_body_any(mu)?;
    let consts = numerics::constants(n)?;
    let a = polar_volume(&body, quad)?;
    let bl = bl_left_integral(&inst, &f, samples, seed)?;
    let b = bl.scale(chain_prefactor(n).exp());
    let c = bodies::volume(&body, VolumeMethod::ExpIntegral, quad, 0, 0)?.scale(1.0 / consts.alpha);
    let rbl = rbl_left_integral(&inst, &g, samples.min(RBL_SAMPLE_CAP), seed ^ 0x5eed)?;
    Ok(ChainReport {
        a,
        b,
        c,
        bl,
        rbl,
        slack_ratio: c.value / a.value,
        a_matches_b: (a.value - b.value).abs() <= 3.0 * (a.error + b.error),
        b_below_c: b.value <= c.value + 3.0 * (b.error + c.error),
        duality_holds: bl.value <= rbl.value + 3.0 * (bl.error + rbl.error),
    })
}

/// `ln[(Γ(n)κ_{n−1})^{n/(n−1)} / (n!(n−1)ⁿ)]`.
pub fn chain_prefactor(n: usize) -> f64 {
    let nf = n as f64;
    let d = nf - 1.0;
    nf / d * (ln_gamma(nf) + numerics::ln_unit_ball_volume(n - 1)) - ln_gamma(nf + 1.0) - nf * d.ln()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct StrictnessReport {
    /// All directions lie in `{±b₁,…,±b_n}` for one orthonormal basis.
    pub orthogonal_configuration: bool,
    /// Largest distance of a pairwise `|uᵢ·uⱼ|` from `{0, 1}`.
    pub worst_inner_product_gap: f64,
}

/// Detect the only configurations that admit non-Gaussian extremizers of
/// the forward inequality: pairwise inner products all in `{0, ±1}`.
pub fn gaussian_strictness_probe(inst: &BLInstance) -> StrictnessReport {
    let m = inst.len();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            let t = linalg::dot(inst.direction(i), inst.direction(j)).abs();
            worst = worst.max(t.min((1.0 - t).abs()));
        }
    }
    StrictnessReport { orthogonal_configuration: worst < 1e-10, worst_inner_product_gap: worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{cross_measure, lebesgue_measure, random_isotropic_measure, simplex_measure};
    use crate::numerics::build_sphere_quadrature;

    #[test]
    fn instances_from_cross_and_simplex() {
        let c = bl_instance_from_measure(&cross_measure(3).unwrap()).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.weights().iter().all(|&w| (w - 0.25).abs() < 1e-15));
        assert!((c.weights().iter().sum::<f64>() - 1.5).abs() < 1e-10);
        assert!(c.defect() < 1e-12);
        let s = bl_instance_from_measure(&simplex_measure(3).unwrap()).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.weights().iter().all(|&w| (w - 0.375).abs() < 1e-14));
        assert!(s.defect() < 1e-12);
    }

    #[test]
    fn non_isotropic_rejected() {
        let mu = SphericalMeasure::new(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0, 2.0])
            .unwrap();
        assert!(matches!(bl_instance_from_measure(&mu), Err(Error::Domain(_))));
    }

    #[test]
    fn declared_integrals_match_radial_quadrature() {
        for n in 3..=6 {
            for f in [
                HyperplaneDensity::chain_exp(n),
                HyperplaneDensity::chain_indicator(n),
                HyperplaneDensity::standard_gaussian(n),
                HyperplaneDensity { n, kind: DensityKind::Gaussian { variance: 2.5 } },
            ] {
                let q = f.radial_quadrature_integral().unwrap();
                assert!((q - f.declared_integral()).abs() < 1e-6, "{f:?} {q}");
                assert!((f.declared_integral() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chain_prefactor_at_three() {
        // (2·π)^{3/2} / (6·8)
        let expect = (2.0 * std::f64::consts::PI).powf(1.5) / 48.0;
        assert!((chain_prefactor(3).exp() - expect).abs() < 1e-14);
    }

    #[test]
    fn gaussian_equality_both_sides() {
        for mu in [cross_measure(3).unwrap(), simplex_measure(3).unwrap()] {
            let inst = bl_instance_from_measure(&mu).unwrap();
            let gs = vec![HyperplaneDensity::standard_gaussian(3); inst.len()];
            let l = bl_left_integral(&inst, &gs, 50_000, 1).unwrap();
            let r = rbl_left_integral(&inst, &gs, 50_000, 2).unwrap();
            assert!((l.value - 1.0).abs() <= 3.0 * l.error.max(1e-12), "{l:?}");
            assert!((r.value - 1.0).abs() <= 3.0 * r.error.max(1e-12), "{r:?}");
        }
    }

    #[test]
    fn reverse_gaussian_matches_closed_form() {
        // Mixed variances: ∫ = ∏Zᵢ^{cᵢ}(2π)^{n/2}det(G)^{1/2}.
        let inst = bl_instance_from_measure(&simplex_measure(3).unwrap()).unwrap();
        let vars = [0.5, 1.0, 2.0, 1.5];
        let gs: Vec<_> = vars
            .iter()
            .map(|&v| HyperplaneDensity { n: 3, kind: DensityKind::Gaussian { variance: v } })
            .collect();
        let mut g = DMatrix::<f64>::zeros(3, 3);
        let mut ln_c = 0.0;
        for ((u, c), v) in inst.iter().zip(vars) {
            ln_c += -c * (2.0 * std::f64::consts::PI * v).ln();
            let p = DMatrix::<f64>::identity(3, 3) - DMatrix::from_column_slice(3, 1, u) * DMatrix::from_row_slice(1, 3, u);
            g += p * (c * v);
        }
        let exact = ln_c.exp() * (2.0 * std::f64::consts::PI).powf(1.5) * g.determinant().sqrt();
        let r = rbl_left_integral(&inst, &gs, 40_000, 5).unwrap();
        assert!((r.value - exact).abs() <= 3.0 * r.error, "{r:?} {exact}");
        assert!(r.value >= product_of_integrals(&inst, &gs).unwrap() - 3.0 * r.error);
    }

    #[test]
    fn forward_inequality_direction_for_chain_densities() {
        let inst = bl_instance_from_measure(&random_isotropic_measure(3, 2, 4, true).unwrap()).unwrap();
        let f = vec![HyperplaneDensity::chain_exp(3); inst.len()];
        let l = bl_left_integral(&inst, &f, 20_000, 3).unwrap();
        assert!(l.value <= product_of_integrals(&inst, &f).unwrap() + 3.0 * l.error);
    }

    #[test]
    fn chain_for_cross_and_lebesgue() {
        let q = build_sphere_quadrature(3, 24).unwrap();
        for mu in [cross_measure(3).unwrap(), lebesgue_measure(3, 8).unwrap()] {
            let r = kantorovich_chain_check(&mu, &q, 100_000, 7).unwrap();
            assert!((r.a.value - r.b.value).abs() / r.a.value < 0.02, "{r:?}");
            assert!(r.a_matches_b && r.b_below_c && r.duality_holds, "{r:?}");
            assert!(r.slack_ratio > 1.0);
        }
    }

    #[test]
    fn chain_requires_normalized_densities() {
        let mut f = HyperplaneDensity::chain_exp(3);
        if let DensityKind::ExpNorm { normalizer, .. } = &mut f.kind {
            *normalizer *= 2.0;
        }
        assert!(matches!(check_normalized(&[f]), Err(Error::Domain(_))));
    }

    #[test]
    fn strictness_probe() {
        let c = bl_instance_from_measure(&cross_measure(3).unwrap()).unwrap();
        assert!(gaussian_strictness_probe(&c).orthogonal_configuration);
        let s = bl_instance_from_measure(&simplex_measure(3).unwrap()).unwrap();
        let rep = gaussian_strictness_probe(&s);
        assert!(!rep.orthogonal_configuration);
        assert!((rep.worst_inner_product_gap - 1.0 / 3.0).abs() < 1e-12);
        let m = bl_instance_from_measure(&random_isotropic_measure(3, 2, 9, true).unwrap()).unwrap();
        assert!(!gaussian_strictness_probe(&m).orthogonal_configuration);
    }

    #[test]
    fn custom_reverse_unsupported_and_deterministic_forward() {
        let inst = bl_instance_from_measure(&cross_measure(3).unwrap()).unwrap();
        let f: Vec<_> = (0..6)
            .map(|_| HyperplaneDensity {
                n: 3,
                kind: DensityKind::Custom { oracle: Arc::new(|y: &[f64]| (-linalg::dot(y, y)).exp()), integral: std::f64::consts::PI },
            })
            .collect();
        assert!(matches!(rbl_left_integral(&inst, &f, 5000, 1), Err(Error::Unsupported(_))));
        let a = bl_left_integral(&inst, &f, 5000, 1).unwrap();
        let b = bl_left_integral(&inst, &f, 5000, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.value <= product_of_integrals(&inst, &f).unwrap() + 3.0 * a.error);
    }
}
