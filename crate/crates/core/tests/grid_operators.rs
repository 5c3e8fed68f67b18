use aleflow::operators::grid::{ricci_fd_oracle, Discretization};
use aleflow::operators::radial::{sample, Bumps, Scaled};
use aleflow::{BackgroundMetric, Error, RadialGrid, TensorField};
use std::sync::Arc;

fn setups(n: usize) -> Vec<Discretization> {
    [
        (BackgroundMetric::euclidean(4).unwrap(), 0.0, 10.0),
        (BackgroundMetric::euclidean(3).unwrap(), 0.0, 10.0),
        (BackgroundMetric::cone(4, 2).unwrap(), 0.5, 10.0),
        (BackgroundMetric::eguchi_hanson(1.0).unwrap(), 1.0, 10.0),
        (BackgroundMetric::euclidean_su2(), 0.0, 10.0),
    ]
    .into_iter()
    .map(|(g0, lo, hi)| {
        let grid = Arc::new(RadialGrid::new(g0.dim(), lo, hi, n, 1.0).unwrap());
        Discretization::new(&g0, grid).unwrap()
    })
    .collect()
}

/// Smooth bumps supported well inside the grid.
fn field(d: &Discretization, amp: f64, seed: u64) -> TensorField {
    let lo = d.grid().r_min();
    let f = Scaled(amp, Bumps::random(d.blocks(), lo + 2.0, lo + 7.0, 3, seed));
    d.tensor(sample(&f, d.grid().nodes()))
}

#[test]
fn conservative_lichnerowicz_is_self_adjoint() {
    for d in setups(200) {
        let k = d.stiffness();
        for seed in 0..5 {
            let mut h = field(&d, 1.0, seed).into_values();
            let mut g = field(&d, 1.0, 50 + seed).into_values();
            // Exercise the inner node too.
            h[0] = 0.3;
            g[0] = -0.2;
            k.enforce_inner(&mut h);
            k.enforce_inner(&mut g);
            let lh = k.operator(&h, true);
            let lg = k.operator(&g, true);
            let a = k.inner_product(&lh, &g);
            let b = k.inner_product(&h, &lg);
            assert!((a - b).abs() <= 1e-10 * (a.abs() + b.abs() + 1.0), "{:?}: {a} {b}", d.g0().kind());
        }
    }
}

#[test]
fn trace_intertwining_is_exact_for_conservative_scheme() {
    for d in setups(300) {
        for seed in 0..4 {
            let h = field(&d, 1.0, seed);
            let lhs = d.trace(&d.lichnerowicz(&h));
            let rhs = d.scalar_laplacian(&d.trace(&h));
            let scale = rhs.max_abs().max(1.0);
            for (x, y) in lhs.values().iter().zip(rhs.values()) {
                assert!((x - y).abs() <= 1e-10 * scale, "{:?}: {x} {y}", d.g0().kind());
            }
        }
    }
}

fn max_diff_interior(a: &TensorField, b: &TensorField, skip: usize) -> f64 {
    let n = a.grid().len();
    let mut m: f64 = 0.0;
    for i in skip..n - skip {
        for (x, y) in a.node(i).iter().zip(b.node(i)) {
            m = m.max((x - y).abs());
        }
    }
    m
}

#[test]
fn conservative_and_pointwise_lichnerowicz_converge() {
    let errs = |n: usize| -> Vec<f64> {
        setups(n)
            .iter()
            .map(|d| {
                let h = field(d, 1.0, 3);
                max_diff_interior(&d.lichnerowicz(&h), &d.lichnerowicz_pointwise(&h), 2)
            })
            .collect()
    };
    let (a, b) = (errs(201), errs(401));
    for (x, y) in a.iter().zip(&b) {
        assert!(x / y > 3.5, "{x} {y}");
    }
}

#[test]
fn divergence_intertwining_converges_second_order() {
    let resid = |n: usize| -> Vec<f64> {
        setups(n)
            .iter()
            .map(|d| {
                let h = field(d, 1.0, 9);
                let lhs = d.divergence(&d.lichnerowicz_pointwise(&h));
                let div = d.divergence(&h);
                let nodes = d.grid().nodes();
                let st = d.stencils();
                let mut m: f64 = 0.0;
                for i in 4..nodes.len() - 4 {
                    let (d1, d2) = st.derivs(div.values(), 1, 0, i);
                    let j = aleflow::operators::frame::jet(div.values()[i], d1, d2);
                    let rhs = aleflow::operators::pointwise::oneform_laplacian(d.background_profile(i), &j);
                    m = m.max((lhs.values()[i] - rhs).abs());
                }
                m
            })
            .collect()
    };
    let (a, b) = (resid(201), resid(401));
    for (x, y) in a.iter().zip(&b) {
        assert!(x / y > 3.5, "{x} {y}");
    }
}

#[test]
fn shi_and_direct_routes_agree_on_grid() {
    for d in setups(200) {
        for seed in 0..3 {
            let h = field(&d, 0.2, seed);
            let a = d.ricci_deturck_rhs(&h).unwrap();
            let b = d.ricci_deturck_rhs_direct(&h).unwrap();
            let scale = b.max_abs().max(1e-3);
            assert!(max_diff_interior(&a, &b, 0) <= 1e-9 * scale, "{:?}", d.g0().kind());
            let v = d.deturck_vector(&h).unwrap();
            let w = d.deturck_vector_koszul(&h).unwrap();
            assert!(max_diff_interior(&v, &w, 0) <= 1e-10 * v.max_abs().max(1e-3));
        }
    }
}

#[test]
fn stationary_points() {
    for d in setups(100) {
        let zero = d.zeros();
        assert!(d.ricci_deturck_rhs(&zero).unwrap().max_abs() < 1e-10);
        // c·g0 with c = 1.7
        let scaled = d.tensor(vec![0.7; d.grid().len() * d.blocks()]);
        assert!(d.ricci_deturck_rhs(&scaled).unwrap().max_abs() < 1e-10);
        assert!(d.deturck_vector(&scaled).unwrap().max_abs() < 1e-12);
        let g0 = d.tensor(vec![1.0; d.grid().len() * d.blocks()]);
        let (tr, div) = d.trace_divergence(&g0);
        assert!(tr.values().iter().all(|t| (t - d.g0().dim() as f64).abs() < 1e-12));
        assert!(div.max_abs() < 1e-12);
    }
}

#[test]
fn rhs_split_is_exact_and_remainder_quadratic() {
    for d in setups(200) {
        let zero = d.zeros();
        let s0 = d.rhs_expansion(&zero, &zero).unwrap();
        assert!(s0.total.max_abs() < 1e-12 && s0.remainder.max_abs() < 1e-12);
        let h = field(&d, 1.0, 4);
        let mut q = Vec::new();
        for eps in [1e-2, 1e-3, 1e-4] {
            let s = d.rhs_expansion(&h.scaled(eps), &zero).unwrap();
            assert!(s.max_split_residual() <= 1e-12);
            assert!(s.lie_part.max_abs() == 0.0);
            q.push(s.remainder.max_abs() / (eps * eps));
        }
        for w in q.windows(2) {
            assert!((w[0] / w[1] - 1.0).abs() < 0.05, "{:?}: {q:?}", d.g0().kind());
        }
        // Around a rescaled background.
        let hbar = d.tensor(vec![0.3; d.grid().len() * d.blocks()]);
        let s = d.rhs_expansion(&h.scaled(1e-3), &hbar).unwrap();
        assert!(s.max_split_residual() <= 1e-12);
        assert!(s.remainder.max_abs() < 1e-2 * s.linear_part.max_abs());
    }
}

#[test]
fn non_stationary_reference_is_rejected() {
    let d = &setups(100)[0];
    let hbar = field(d, 0.1, 1);
    match d.rhs_expansion(&d.zeros(), &hbar) {
        Err(Error::NotStationary(r)) => assert!(r > 1e-6),
        other => panic!("{other:?}"),
    }
}

#[test]
fn positivity_loss_names_first_node() {
    let d = &setups(100)[3];
    let mut h = d.zeros();
    h.set(40, 1, -1.5);
    h.set(60, 0, -2.0);
    match d.ricci(&h) {
        Err(Error::NotPositiveDefinite { node, r }) => {
            assert_eq!(node, 40);
            assert_eq!(r, d.grid().r(40));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn background_curvature_paths() {
    for d in setups(200) {
        let ric = d.ricci(&d.zeros()).unwrap();
        assert!(ric.max_abs() < 1e-10, "{:?}", d.g0().kind());
        let cc = d.connection_curvature(&d.zeros()).unwrap();
        for gd in cc.iter().flatten() {
            assert!(gd.symmetry_residual() < 1e-10);
            assert!(gd.max_ricci() < 1e-10);
            if d.g0().is_flat() {
                assert!(gd.max_riemann() < 1e-12);
            }
        }
        if d.g0().is_flat() {
            assert!(d.ricci_background_fd().max_abs() < 1e-8);
        }
    }
}

#[test]
fn eguchi_hanson_fd_ricci_converges() {
    let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
    let worst = |n: usize| {
        ricci_fd_oracle(&g0, 1.0, 10.0, n)
            .iter()
            .filter(|(r, _)| r - 1.0 >= 1e-2)
            .fold(0.0_f64, |m, (_, v)| v.iter().fold(m, |m, x| m.max(x.abs())))
    };
    let (a, b) = (worst(512), worst(1024));
    assert!(a / b > 3.5, "{a} {b}");
}
