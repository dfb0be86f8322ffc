use isosine::measures::{random_isotropic_measure, SphericalMeasure};
use isosine::tomography::{random_symmetric_hull, Polytope};
use isosine::transforms::{cosine_transform, sine_transform};
use proptest::prelude::*;

fn measure(n: usize, blocks: usize, seed: u64, even: bool) -> SphericalMeasure {
    random_isotropic_measure(n, blocks, seed, even).unwrap()
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn quad(mu: &SphericalMeasure, x: &[f64]) -> f64 {
    let m = mu.second_moment();
    (0..x.len()).map(|i| (0..x.len()).map(|j| x[i] * m[(i, j)] * x[j]).sum::<f64>()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_are_seminorms(
        n in 3usize..6, blocks in 1usize..5, seed in 0u64..1000, even: bool,
        x in point(5), y in point(5), s in -4.0..4.0f64,
    ) {
        let mu = measure(n, blocks, seed, even);
        let (x, y) = (&x[..n], &y[..n]);
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| s * a).collect();
        for f in [sine_transform, cosine_transform] {
            let (fx, fy) = (f(&mu, x), f(&mu, y));
            prop_assert!(f(&mu, &sum) <= fx + fy + 1e-12 * (1.0 + fx + fy));
            prop_assert!((f(&mu, &scaled) - s.abs() * fx).abs() <= 1e-12 * (1.0 + fx.abs() * s.abs()));
        }
    }

    #[test]
    fn transforms_obey_cauchy_schwarz(n in 3usize..6, blocks in 1usize..5, seed in 0u64..1000, even: bool, x in point(5)) {
        let mu = measure(n, blocks, seed, even);
        let x = &x[..n];
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let q = quad(&mu, x);
        let c = cosine_transform(&mu, x);
        let s = sine_transform(&mu, x);
        prop_assert!(c * c <= mu.mass() * q * (1.0 + 1e-12) + 1e-12);
        prop_assert!(s * s <= mu.mass() * (mu.mass() * xx - q) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn measure_csv_round_trip(n in 3usize..6, blocks in 1usize..4, seed in 0u64..1000, even: bool) {
        let mu = measure(n, blocks, seed, even);
        let back = SphericalMeasure::from_csv(&mu.to_csv()).unwrap();
        prop_assert!(mu.total_variation(&back) < 1e-12);
        prop_assert_eq!(back.is_even(), mu.is_even());
    }

    #[test]
    fn random_hulls_close_and_round_trip(points in 6usize..14, seed in 0u64..500) {
        let p = random_symmetric_hull(points, seed).unwrap();
        prop_assert!(p.minkowski_defect() < 1e-9);
        let back = Polytope::from_csv(&p.to_csv()).unwrap();
        prop_assert_eq!(back.len(), p.len());
        prop_assert!((back.surface_area() - p.surface_area()).abs() < 1e-9 * p.surface_area());
    }
}
