use aleflow::geometry::norms::{avr_estimate, derivative_norms_on_grid, weighted_norm};
use aleflow::geometry::quad::integrate;
use aleflow::{BackgroundMetric, RadialGrid, TensorField, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

fn spec(p: f64, k: usize, delta: f64) -> WeightSpec {
    WeightSpec { p, k, delta }
}

#[test]
fn zero_field_has_zero_norm() {
    let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 1.0, 20.0, 64, 1.02).unwrap());
    let u = TensorField::zeros(grid, &g0);
    for s in [spec(1.0, 0, 0.0), spec(2.0, 2, -1.0), spec(f64::INFINITY, 1, 2.0)] {
        assert_eq!(weighted_norm(&u, s, &g0).unwrap(), 0.0);
    }
}

#[test]
fn weight_shift_identity() {
    let g0 = BackgroundMetric::cone(4, 2).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 0.5, 30.0, 200, 1.01).unwrap());
    let rho = g0.rho(&grid);
    let u = TensorField::from_fn(grid.clone(), &g0, |r, b| (-(r - 8.0).powi(2)).exp() * (1.0 + b as f64));
    for gamma in [-2.0, 0.5, 3.0] {
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let w: Vec<f64> = rho.iter().map(|x| x.powf(gamma)).collect();
            let a = weighted_norm(&u.weighted(&w), spec(p, 0, -1.0 + gamma), &g0).unwrap();
            let b = weighted_norm(&u, spec(p, 0, -1.0), &g0).unwrap();
            assert!((a - b).abs() <= 1e-10 * b, "{gamma} {p}: {a} {b}");
        }
    }
}

#[test]
fn norm_nonincreasing_in_delta_far_out() {
    let g0 = BackgroundMetric::euclidean(4).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 0.0, 40.0, 300, 1.005).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let c: f64 = rng.gen_range(5.0..30.0);
        let a: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let u = TensorField::from_fn(grid.clone(), &g0, |r, b| a[b] * (-(r - c).powi(2) / 4.0).exp());
        let mut prev = f64::INFINITY;
        for delta in [-3.0, -2.0, -1.0, 0.0, 1.0] {
            let v = weighted_norm(&u, spec(2.0, 0, delta), &g0).unwrap();
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }
}

#[test]
fn radial_power_matches_closed_form() {
    let g0 = BackgroundMetric::cone(4, 2).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 1.0, 10.0, 4001, 1.0).unwrap());
    let u = TensorField::scalar(grid.clone(), grid.nodes().iter().map(|r| r.powi(-3)).collect()).unwrap();
    let got = weighted_norm(&u, spec(2.0, 0, -3.0), &g0).unwrap();
    // ρ = √(1 + (r − 1)²), dμ = r³ · 2π²/2 dr; integrand ρ² r⁻³ π².
    let want2 = {
        let mut s = 0.0;
        for k in 0..90 {
            let (a, b) = (1.0 + 0.1 * k as f64, 1.1 + 0.1 * k as f64);
            s += integrate(a, b, |r| {
                let rho2 = 1.0 + (r - 1.0).powi(2);
                rho2 * r.powi(-3) * PI * PI
            });
        }
        s
    };
    assert!((got - want2.sqrt()).abs() < 1e-5 * want2.sqrt(), "{got} {}", want2.sqrt());
}

#[test]
fn scalar_gradient_norms() {
    let g0 = BackgroundMetric::euclidean(4).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 0.0, 5.0, 1001, 1.0).unwrap());
    let u = TensorField::scalar(grid.clone(), grid.nodes().iter().map(|r| r * r).collect()).unwrap();
    let d = derivative_norms_on_grid(&u, &g0).unwrap();
    for (i, row) in d.iter().enumerate().skip(1) {
        let r = grid.r(i);
        assert!((row[1] - 2.0 * r).abs() < 1e-8);
        // Hessian of r² is 2·id: norm 2√n
        assert!((row[2] - 4.0).abs() < 1e-8, "{}", row[2]);
    }
}

#[test]
fn tensor_gradient_of_background_vanishes() {
    let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
    let grid = Arc::new(RadialGrid::new(4, 1.0, 10.0, 200, 1.0).unwrap());
    let u = TensorField::from_fn(grid, &g0, |_, _| 1.0);
    let d = derivative_norms_on_grid(&u, &g0).unwrap();
    assert!(d.iter().all(|row| row[1] < 1e-10 && row[2] < 1e-9));
}

#[test]
fn nan_is_an_error() {
    let g0 = BackgroundMetric::euclidean(3).unwrap();
    let grid = Arc::new(RadialGrid::new(3, 0.0, 5.0, 32, 1.0).unwrap());
    let mut u = TensorField::zeros(grid, &g0);
    u.set(5, 1, f64::NAN);
    assert!(weighted_norm(&u, spec(2.0, 0, 0.0), &g0).is_err());
}

#[test]
fn asymptotic_volume_ratios() {
    let e4 = avr_estimate(&BackgroundMetric::euclidean(4).unwrap(), &RadialGrid::new(4, 0.0, 100.0, 64, 1.0).unwrap()).unwrap();
    assert!((e4.value / (PI * PI / 2.0) - 1.0).abs() < 0.01);
    let c = avr_estimate(&BackgroundMetric::cone(4, 2).unwrap(), &RadialGrid::new(4, 1.0, 200.0, 64, 1.0).unwrap()).unwrap();
    assert!((c.value / (PI * PI / 4.0) - 1.0).abs() < 0.01, "{c:?}");
    let eh = avr_estimate(&BackgroundMetric::eguchi_hanson(1.0).unwrap(), &RadialGrid::new(4, 1.0, 200.0, 256, 1.01).unwrap()).unwrap();
    assert!((eh.value / (PI * PI / 4.0) - 1.0).abs() < 0.02, "{eh:?}");
    assert!(!eh.flagged);
}
