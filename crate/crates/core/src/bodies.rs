//! Convex bodies given by support functions, their gauges and volumes.
//!
//! Most bodies in this crate have support functions that are weighted sums of
//! seminorms, `h(v) = Σ aᵢ|uᵢ·v| + Σ bⱼ‖v|uⱼ^⊥‖ + r‖v‖` (cosine bodies and
//! projection bodies, sine bodies and `Ψ` bodies, balls). For those the
//! radial function `ρ(K, x̂) = min{h(y) : x̂·y = 1}` is a sum-of-norms
//! minimization, solved here by iteratively reweighted least squares with a
//! shrinking smoothing parameter. Bodies given only by an oracle fall back to
//! maximizing `x·v / h(v)` over the sphere from a grid of starting points.
//!
//! Volumes come from the polar-coordinate formula
//! `V(K) = (1/n)∫ ρ(K,u)ⁿ du`; with `ρ(K*,·) = h(K,·)⁻¹` the same rule gives
//! `V(K*) = (1/n)∫ h(K,u)⁻ⁿ du`. The first is the radial form of
//! `V(K) = (1/n!)∫ exp(−h(K*,x)) dx`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::SphericalMeasure;
use crate::numerics::{self, build_sphere_quadrature, Estimate, QuadratureRule};

/// Samples per deterministic Monte Carlo chunk.
pub const MC_CHUNK: usize = 4096;
/// Minimum sample count for Monte Carlo volume estimates.
pub const MIN_MC_SAMPLES: usize = 1000;

/// `h(v) = Σ aᵢ|uᵢ·v| + Σ bⱼ‖v|uⱼ^⊥‖ + r‖v‖`, stored column-flat.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeminormSum {
    n: usize,
    abs_dirs: Vec<f64>,
    abs_w: Vec<f64>,
    perp_dirs: Vec<f64>,
    perp_w: Vec<f64>,
    ball: f64,
}

impl SeminormSum {
    pub fn new(n: usize) -> Self {
        SeminormSum { n, ..Default::default() }
    }

    /// Add `w |u·v|`.
    pub fn push_abs(&mut self, u: &[f64], w: f64) {
        self.abs_dirs.extend_from_slice(u);
        self.abs_w.push(w);
    }

    /// Add `w ‖v|u^⊥‖`.
    pub fn push_perp(&mut self, u: &[f64], w: f64) {
        self.perp_dirs.extend_from_slice(u);
        self.perp_w.push(w);
    }

    /// Add `r ‖v‖`.
    pub fn push_ball(&mut self, r: f64) {
        self.ball += r;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn term_count(&self) -> usize {
        self.abs_w.len() + self.perp_w.len() + usize::from(self.ball > 0.0)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let vv = linalg::dot(v, v);
        let mut h = self.ball * vv.sqrt();
        for (u, w) in self.abs_dirs.chunks_exact(n).zip(&self.abs_w) {
            h += w * linalg::dot(u, v).abs();
        }
        for (u, w) in self.perp_dirs.chunks_exact(n).zip(&self.perp_w) {
            let t = linalg::dot(u, v);
            h += w * (vv - t * t).max(0.0).sqrt();
        }
        h
    }

    /// Certified lower bound for `h` on the unit sphere, from
    /// `|u·v| >= (u·v)²` and `‖v|u^⊥‖ >= 1 − (u·v)²`.
    pub fn certified_min(&self) -> f64 {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for (u, w) in self.abs_dirs.chunks_exact(n).zip(&self.abs_w) {
            add_outer(&mut m, u, *w);
        }
        let mut perp_total = 0.0;
        for (u, w) in self.perp_dirs.chunks_exact(n).zip(&self.perp_w) {
            add_outer(&mut m, u, -*w);
            perp_total += w;
        }
        let (lo, _) = linalg::sym_eigen_range(&m);
        lo + perp_total + self.ball
    }

    /// `Σ` of all weights, an upper bound for `h` on the unit sphere.
    pub fn max_bound(&self) -> f64 {
        self.abs_w.iter().sum::<f64>() + self.perp_w.iter().sum::<f64>() + self.ball
    }

    /// `ρ(K, x̂) = min{h(y) : x̂·y = 1}` for unit `x̂`.
    ///
    /// Majorize each norm by its quadratic upper bound at the current point
    /// (weights `w/√(r² + ε²)`), minimize the quadratic on the affine
    /// constraint in closed form, repeat; `ε` shrinks by 100× whenever an
    /// inner sweep stalls. Every iterate is feasible, so the best true `h`
    /// seen is returned.
    pub fn radial(&self, xhat: &[f64]) -> f64 {
        let n = self.n;
        let mut y = xhat.to_vec();
        let mut best = self.eval(&y);
        let scale = best.max(f64::MIN_POSITIVE);
        let mut eps = 1e-2 * scale;
        let eps_floor = 1e-13 * scale;
        let mut g = DMatrix::<f64>::zeros(n, n);
        let mut sweeps = 0;
        let mut prev_smooth = f64::INFINITY;
        let mut stall = 0;
        while sweeps < 2000 {
            sweeps += 1;
            g.fill(0.0);
            let vv = linalg::dot(&y, &y);
            let mut diag = 0.0;
            let mut smooth = 0.0;
            if self.ball > 0.0 {
                let r = (vv + eps * eps).sqrt();
                smooth += self.ball * r;
                diag += self.ball / r;
            }
            for (u, w) in self.abs_dirs.chunks_exact(n).zip(&self.abs_w) {
                let t = linalg::dot(u, &y);
                let r = (t * t + eps * eps).sqrt();
                smooth += w * r;
                add_outer(&mut g, u, w / r);
            }
            for (u, w) in self.perp_dirs.chunks_exact(n).zip(&self.perp_w) {
                let t = linalg::dot(u, &y);
                let r = ((vv - t * t).max(0.0) + eps * eps).sqrt();
                smooth += w * r;
                let om = w / r;
                diag += om;
                add_outer(&mut g, u, -om);
            }
            for i in 0..n {
                g[(i, i)] += diag;
            }
            let Some(z) = linalg::spd_solve(&g, xhat) else { break };
            let denom = linalg::dot(xhat, &z);
            if !(denom > 0.0) || !denom.is_finite() {
                break;
            }
            y.iter_mut().zip(&z).for_each(|(yi, zi)| *yi = zi / denom);
            let h = self.eval(&y);
            if h < best {
                best = h;
            }
            let progress = (prev_smooth - smooth) / smooth.max(f64::MIN_POSITIVE);
            prev_smooth = smooth;
            if progress < 1e-9 {
                stall += 1;
            } else {
                stall = 0;
            }
            if stall >= 2 || sweeps % 60 == 0 {
                if eps <= eps_floor {
                    break;
                }
                eps = (eps * 1e-2).max(eps_floor);
                prev_smooth = f64::INFINITY;
                stall = 0;
            }
        }
        best
    }
}

fn add_outer(m: &mut DMatrix<f64>, u: &[f64], w: f64) {
    let n = u.len();
    for j in 0..n {
        let wu = w * u[j];
        for i in 0..n {
            m[(i, j)] += wu * u[i];
        }
    }
}

pub type SupportOracle = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Support {
    Seminorms(SeminormSum),
    /// Evaluated on unit vectors; extended 1-homogeneously.
    Oracle(SupportOracle),
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Seminorms(s) => f.debug_tuple("Seminorms").field(&s.term_count()).finish(),
            Support::Oracle(_) => f.write_str("Oracle"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum BodyKind {
    SineBody,
    CosineBody,
    Ball { radius: f64 },
    ProjectionBody,
    PsiBody,
    Generic,
}

/// A convex body containing the origin in its interior, given by its support
/// function.
#[derive(Debug, Clone)]
pub struct SupportBody {
    n: usize,
    support: Support,
    kind: BodyKind,
    lower_bound: f64,
    upper_bound: f64,
}

impl SupportBody {
    /// Wrap a seminorm sum; fails unless its certified minimum is positive.
    pub fn from_seminorms(terms: SeminormSum, kind: BodyKind) -> Result<SupportBody> {
        let n = terms.dim();
        let lower = terms.certified_min();
        if !(lower > 1e-12 * terms.max_bound()) {
            return Err(Error::Degenerate(format!(
                "support function is not bounded away from zero (certified min {lower:e})"
            )));
        }
        let upper = terms.max_bound();
        Ok(SupportBody {
            n,
            support: Support::Seminorms(terms),
            kind,
            lower_bound: lower,
            upper_bound: upper,
        })
    }

    /// A body from a support oracle on unit vectors. Bounds come from a
    /// dense direction grid and are widened by 1% since they are not certified.
    pub fn from_oracle(n: usize, oracle: SupportOracle) -> Result<SupportBody> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let grid = coarse_grid(n);
        let (lo, hi) = grid.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), (u, _)| {
            let h = oracle(u);
            (lo.min(h), hi.max(h))
        });
        if !(lo > 0.0) {
            return Err(Error::Degenerate("oracle support is not positive on the grid".into()));
        }
        Ok(SupportBody {
            n,
            support: Support::Oracle(oracle),
            kind: BodyKind::Generic,
            lower_bound: 0.99 * lo,
            upper_bound: 1.01 * hi,
        })
    }

    pub fn ball(n: usize, radius: f64) -> Result<SupportBody> {
        if !(radius > 0.0) {
            return Err(Error::domain("ball radius must be positive"));
        }
        let mut s = SeminormSum::new(n);
        s.push_ball(radius);
        SupportBody::from_seminorms(s, BodyKind::Ball { radius })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn support_repr(&self) -> &Support {
        &self.support
    }

    /// Lower bound for `h` on the unit sphere (certified for seminorm sums).
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// Upper bound for `h` on the unit sphere; the body lies in this ball.
    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    /// `h(K, x)`, 1-homogeneous in `x`.
    pub fn support(&self, x: &[f64]) -> f64 {
        match &self.support {
            Support::Seminorms(s) => s.eval(x),
            Support::Oracle(f) => {
                let r = linalg::norm(x);
                if r == 0.0 {
                    return 0.0;
                }
                let u: Vec<f64> = x.iter().map(|v| v / r).collect();
                r * f(&u)
            }
        }
    }

    /// `ρ(K, u)` for unit `u`.
    pub fn radial(&self, u: &[f64]) -> f64 {
        match &self.support {
            Support::Seminorms(s) => s.radial(u),
            Support::Oracle(_) => 1.0 / self.gauge_multistart(u),
        }
    }

    /// The gauge `‖x‖_K = h(K*, x) = max_v (x·v)/h(K, v)`; `0` at the origin.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let r = linalg::norm(x);
        if r == 0.0 {
            return 0.0;
        }
        match &self.support {
            Support::Seminorms(s) => {
                let u: Vec<f64> = x.iter().map(|v| v / r).collect();
                r / s.radial(&u)
            }
            Support::Oracle(_) => self.gauge_multistart(x),
        }
    }

    /// Gauge by direct maximization of `(x·v)/h(v)`: the best of a coarse
    /// direction grid, then projected-gradient polish of the top candidates.
    /// Always a lower bound for the true gauge.
    pub fn gauge_multistart(&self, x: &[f64]) -> f64 {
        let r = linalg::norm(x);
        if r == 0.0 {
            return 0.0;
        }
        let n = self.n;
        let xhat: Vec<f64> = x.iter().map(|v| v / r).collect();
        let h_unit = |v: &[f64]| match &self.support {
            Support::Seminorms(s) => s.eval(v),
            Support::Oracle(f) => f(v),
        };
        let objective = |v: &[f64]| linalg::dot(&xhat, v) / h_unit(v);
        let grid = coarse_grid(n);
        let mut cands: Vec<(f64, Vec<f64>)> = grid
            .iter()
            .map(|(v, _)| (objective(v), v.to_vec()))
            .filter(|(f, _)| *f > 0.0)
            .collect();
        cands.push((objective(&xhat), xhat.clone()));
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        cands.truncate(4);
        let mut best = cands.first().map_or(0.0, |c| c.0);
        for (f0, v0) in cands {
            let (f, _) = polish_on_sphere(&objective, v0, f0);
            best = best.max(f);
        }
        r * best
    }

    /// Membership `‖x‖_K <= 1`, with cheap tests against the inner and
    /// outer balls and the supporting halfspace in direction `x` first.
    pub fn contains(&self, x: &[f64]) -> bool {
        let r = linalg::norm(x);
        if r <= self.lower_bound {
            return true;
        }
        if r > self.upper_bound || r > self.support(x) / r {
            return false;
        }
        self.gauge(x) <= 1.0
    }
}

/// Projected gradient ascent on the sphere with central-difference
/// gradients and backtracking.
fn polish_on_sphere(f: &impl Fn(&[f64]) -> f64, mut v: Vec<f64>, mut fv: f64) -> (f64, Vec<f64>) {
    let n = v.len();
    let h = 1e-7;
    let mut step = 0.1;
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..400 {
        for i in 0..n {
            let mut p = v.clone();
            p[i] += h;
            linalg::normalize(&mut p);
            let mut m = v.clone();
            m[i] -= h;
            linalg::normalize(&mut m);
            grad[i] = (f(&p) - f(&m)) / (2.0 * h);
        }
        let t = linalg::dot(&grad, &v);
        grad.iter_mut().zip(&v).for_each(|(g, vi)| *g -= t * vi);
        let gn = linalg::norm(&grad);
        if gn < 1e-14 {
            break;
        }
        let mut improved = false;
        while step > 1e-13 {
            trial.iter_mut().zip(v.iter().zip(&grad)).for_each(|(t, (vi, gi))| *t = vi + step * gi / gn);
            linalg::normalize(&mut trial);
            let ft = f(&trial);
            if ft > fv {
                v.copy_from_slice(&trial);
                fv = ft;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    // Kinks stop the gradient phase; finish with a compass search over
    // coordinate and diagonal directions.
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        dirs.push(linalg::unit_vector(n, i));
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = std::f64::consts::FRAC_1_SQRT_2;
                d[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(d);
            }
        }
    }
    let mut delta = 1e-2;
    while delta > 1e-12 {
        let mut moved = false;
        for d in &dirs {
            for s in [delta, -delta] {
                trial.iter_mut().zip(v.iter().zip(d)).for_each(|(t, (vi, di))| *t = vi + s * di);
                linalg::normalize(&mut trial);
                let ft = f(&trial);
                if ft > fv {
                    v.copy_from_slice(&trial);
                    fv = ft;
                    moved = true;
                }
            }
        }
        if !moved {
            delta *= 0.5;
        }
    }
    (fv, v)
}

/// A shared ~10³-node direction grid per dimension for multistart searches.
fn coarse_grid(n: usize) -> Arc<QuadratureRule> {
    static GRIDS: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let map = GRIDS.get_or_init(Default::default);
    let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let res = if n == 3 { 22 } else { (1000usize).div_ceil(n << n).max(1) };
            Arc::new(build_sphere_quadrature(n.max(3), res).expect("grid resolution is valid"))
        })
        .clone()
}

fn check_isotropic_even(mu: &SphericalMeasure) -> Result<()> {
    if !mu.is_even() {
        return Err(Error::domain(
            "measure is not even; evenize it first (the sine transform only sees the even part)",
        ));
    }
    Ok(())
}

/// `S_μ`: the body whose support function is the sine transform of `μ`.
/// Requires `μ` even and not concentrated on two antipodal points.
pub fn sine_body(mu: &SphericalMeasure) -> Result<SupportBody> {
    check_isotropic_even(mu)?;
    sine_body_any(mu)
}

/// `S_μ` for a measure that need not be even. The kernel `‖x|u^⊥‖` is even in
/// `u`, so this is the sine body of the evenization of `μ`.
pub fn sine_body_any(mu: &SphericalMeasure) -> Result<SupportBody> {
    if mu.is_antipodally_concentrated() {
        return Err(Error::Degenerate(
            "measure is concentrated on two antipodal points".into(),
        ));
    }
    let mut s = SeminormSum::new(mu.dim());
    for (u, w) in mu.atoms() {
        s.push_perp(u, w);
    }
    SupportBody::from_seminorms(s, BodyKind::SineBody)
}

/// `C_μ`: the body whose support function is the cosine transform of `μ`.
/// Requires `μ` even and not concentrated on a great subsphere.
pub fn cosine_body(mu: &SphericalMeasure) -> Result<SupportBody> {
    check_isotropic_even(mu)?;
    if !mu.spans_space() {
        return Err(Error::Degenerate("measure is concentrated on a great subsphere".into()));
    }
    let mut s = SeminormSum::new(mu.dim());
    for (u, w) in mu.atoms() {
        s.push_abs(u, w);
    }
    SupportBody::from_seminorms(s, BodyKind::CosineBody)
}

fn check_dims(body: &SupportBody, quad: &QuadratureRule) -> Result<()> {
    if body.dim() != quad.dim() {
        return Err(Error::domain(format!(
            "body has dimension {} but the rule has {}",
            body.dim(),
            quad.dim()
        )));
    }
    Ok(())
}

/// `V(K*) = (1/n) ∫ h(K,u)⁻ⁿ du`.
pub fn polar_volume(body: &SupportBody, quad: &QuadratureRule) -> Result<Estimate> {
    check_dims(body, quad)?;
    let n = body.dim() as i32;
    let est = quad.integrate_with_error(|u| body.support(u).powi(-n));
    Ok(est.scale(1.0 / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum VolumeMethod {
    /// `(1/n!)∫exp(−‖x‖_K)dx`, evaluated in its radial form `(1/n)∫ρⁿ du`.
    ExpIntegral,
    /// Hit-or-miss sampling of the gauge in the box `[−R, R]ⁿ`.
    McMembership,
}

/// `V(K)` by the chosen estimator, with an error estimate (quadrature change
/// against the coarser rule, or one Monte Carlo standard error).
pub fn volume(
    body: &SupportBody,
    method: VolumeMethod,
    quad: &QuadratureRule,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    check_dims(body, quad)?;
    let n = body.dim();
    match method {
        VolumeMethod::ExpIntegral => {
            if let BodyKind::Ball { radius } = body.kind() {
                // Exact integrand; skip the optimizer.
                let v = quad.integrate(|_| radius.powi(n as i32)) / n as f64;
                return Ok(Estimate { value: v, error: quad.accuracy_budget() * v });
            }
            let est = quad.integrate_with_error(|u| body.radial(u).powi(n as i32));
            Ok(est.scale(1.0 / n as f64))
        }
        VolumeMethod::McMembership => mc_volume(body, samples, seed),
    }
}

/// Hit-or-miss volume in the box `[−R, R]ⁿ` with `R` the support bound.
pub fn mc_volume(body: &SupportBody, samples: usize, seed: u64) -> Result<Estimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::config(format!(
            "{samples} samples requested, at least {MIN_MC_SAMPLES} required"
        )));
    }
    let n = body.dim();
    let r = body.upper_bound();
    let hits = chunked_sum(samples, seed, |rng, count| {
        let mut x = vec![0.0; n];
        let mut inside = 0.0;
        for _ in 0..count {
            x.iter_mut().for_each(|c| *c = r * (2.0 * rng.random::<f64>() - 1.0));
            if body.contains(&x) {
                inside += 1.0;
            }
        }
        (inside, inside)
    })
    .0;
    let p = hits / samples as f64;
    let box_vol = (2.0 * r).powi(n as i32);
    Ok(Estimate {
        value: box_vol * p,
        error: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Run `samples` draws split into fixed-size chunks, each with its own
/// ChaCha stream derived from `(seed, chunk index)`; the per-chunk
/// `(Σf, Σf²)` pairs are added in chunk order, so the result depends only on
/// `(samples, seed)`.
pub fn chunked_sum(
    samples: usize,
    seed: u64,
    mut chunk: impl FnMut(&mut ChaCha8Rng, usize) -> (f64, f64),
) -> (f64, f64) {
    let mut total = (0.0, 0.0);
    let mut done = 0;
    let mut index = 0u64;
    while done < samples {
        let count = MC_CHUNK.min(samples - done);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let (s, s2) = chunk(&mut rng, count);
        total.0 += s;
        total.1 += s2;
        done += count;
        index += 1;
    }
    total
}

/// `(1/(nκ_n)) ∫ h(K,u) du`, the right side of Urysohn's inequality.
pub fn mean_width_functional(body: &SupportBody, quad: &QuadratureRule) -> Result<Estimate> {
    check_dims(body, quad)?;
    let n = body.dim();
    Ok(quad
        .integrate_with_error(|u| body.support(u))
        .scale(1.0 / numerics::sphere_area(n)))
}

/// `mean width functional − (V(K)/κ_n)^{1/n}`; nonnegative, zero for balls.
pub fn urysohn_gap(body: &SupportBody, quad: &QuadratureRule) -> Result<Estimate> {
    let n = body.dim();
    let w = mean_width_functional(body, quad)?;
    let v = volume(body, VolumeMethod::ExpIntegral, quad, 0, 0)?;
    let kappa = numerics::unit_ball_volume(n);
    let r = (v.value / kappa).powf(1.0 / n as f64);
    // d/dV (V/κ)^{1/n} = r / (nV)
    let r_err = r * v.error / (n as f64 * v.value);
    Ok(Estimate { value: w.value - r, error: w.error + r_err })
}
