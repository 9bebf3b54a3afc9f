use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sjacobi::matrix::Mat;
use sjacobi::metric::*;
use sjacobi::space::*;

fn dims() -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for n in 1..=3 {
        for m in 1..=3 {
            v.push((n, m));
        }
    }
    v
}

#[test]
fn degree_one_inverse_matches_display() {
    let (y, v) = (1.3, -0.6);
    let x = SiegelJacobiPoint::scalar(C64::new(0.4, y), C64::new(0.2, v)).unwrap();
    let p = MetricParams::new(1.5, 0.7).unwrap();
    let mi = metric_inverse_closed(&x, &p).full();
    assert!((mi.get(0, 1) - 2.0 * y * y / p.a).abs() < 1e-14);
    assert!((mi.get(0, 3) - 2.0 * v * y / p.a).abs() < 1e-14);
    assert!((mi.get(2, 3) - (2.0 * y / p.b + 2.0 * v * v / p.a)).abs() < 1e-14);
}

#[test]
fn closed_inverse_is_the_inverse() {
    let p = MetricParams::new(1.3, 0.8).unwrap();
    for (n, m) in dims() {
        for seed in 0..20u64 {
            let x = random_point(n, m, seed);
            let g = metric_blocks(&x, &p).full();
            let mi = metric_inverse_closed(&x, &p).full();
            let e = g.matmul(&mi).sub(&Mat::ridentity(g.rows)).max_abs();
            assert!(e < 1e-10, "n={n} m={m} seed={seed} e={e:e}");
        }
    }
}

#[test]
fn large_a_limit_kills_first_two_inverse_blocks() {
    let x = random_point(2, 2, 3);
    let p = MetricParams::new(1e12, 1.0).unwrap();
    let mi = metric_inverse_closed(&x, &p);
    assert!(mi.w1.max_abs() < 1e-10 && mi.w2.max_abs() < 1e-10);
}

#[test]
fn zero_v_decouples_blocks() {
    let z = Mat::from_vec(2, 2, vec![C64::new(0.1, 1.2), C64::new(0.3, 0.2), C64::new(0.3, 0.2), C64::new(-0.2, 0.9)]);
    let w = Mat::from_vec(1, 2, vec![C64::new(0.5, 0.0), C64::new(-0.1, 0.0)]);
    let x = SiegelJacobiPoint::new(z, w).unwrap();
    let p = MetricParams::default();
    let b = metric_blocks(&x, &p);
    assert_eq!(b.w2.max_abs(), 0.0);
    let siegel = metric_blocks(&x, &MetricParams::new(1.0, 1e-300).unwrap());
    assert!(b.w1.sub(&siegel.w1).max_abs() < 1e-15);
}

#[test]
fn quadratic_form_reproduces_trace_formula() {
    let p = MetricParams::new(0.9, 1.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, m) in dims() {
        let x = random_point(n, m, 11 + n as u64 * 3 + m as u64);
        let g = metric_blocks(&x, &p).full();
        for _ in 0..20 {
            let dz = random_sym(n, &mut rng);
            let dzb = random_sym(n, &mut rng);
            let dw = random_rect(m, n, &mut rng);
            let dwb = random_rect(m, n, &mut rng);
            let v = displacement_vector(&x.layout(), &dz, &dzb, &dw, &dwb);
            let q = quadratic_form(&g, &v);
            let t = ds2(&x, &p, &dz, &dzb, &dw, &dwb);
            assert!((q - t).norm() < 1e-12 * (1.0 + t.norm()), "n={n} m={m}");
        }
    }
}

#[test]
fn metric_is_invariant() {
    let p = MetricParams::new(1.1, 0.6).unwrap();
    for (n, m) in dims() {
        for seed in 0..20u64 {
            let x = random_point(n, m, 40 + seed);
            let g = random_group_element(n, m, 60 + seed, 3);
            let r = metric_invariance_residual(&x, &g, &p, seed).unwrap();
            assert!(r < 1e-9, "n={n} m={m} seed={seed} r={r:e}");
        }
        let x = random_point(n, m, 7);
        let e = JacobiGroupElement::identity(n, m);
        assert!(metric_invariance_residual(&x, &e, &p, 1).unwrap() < 1e-15);
        let mut h = random_group_element(n, m, 8, 3);
        let id = JacobiGroupElement::identity(n, m);
        h.a = id.a.clone();
        h.b = id.b.clone();
        h.c = id.c.clone();
        h.d = id.d.clone();
        assert!(metric_invariance_residual(&x, &h, &p, 2).unwrap() < 1e-11);
    }
}

#[test]
fn poincare_point_connection() {
    let x = SiegelJacobiPoint::scalar(C64::new(0.0, 1.0), C64::new(0.0, 0.0)).unwrap();
    let p = MetricParams::default();
    let gn = christoffel_numeric(&x, &p);
    let l = x.layout();
    let z = l.z_var(0, 0);
    assert!((gn.get(z, z, z) - C64::new(0.0, 1.0)).norm() < 1e-14);
}

#[test]
fn closed_form_connection_degree_one() {
    let (y, v) = (1.4, 0.3);
    let x = SiegelJacobiPoint::scalar(C64::new(-0.2, y), C64::new(0.5, v)).unwrap();
    let p = MetricParams::new(1.2, 0.9).unwrap();
    let (a, b) = (p.a, p.b);
    let cd = connection_closed(&x, &p);
    let l = x.layout();
    let (z, w) = (l.z_var(0, 0), l.w_var(0, 0));
    let i = C64::new(0.0, 1.0);
    assert!((cd.get(z, z, z) - (i / y + i * b * v * v / (2.0 * a * y * y))).norm() < 1e-14);
    assert!((cd.get(w, z, z) - i * b * v.powi(3) / (2.0 * a * y.powi(3))).norm() < 1e-14);
    assert!((cd.get(w, z, w) - (-i * b * v * v / (2.0 * a * y * y) + i / (2.0 * y))).norm() < 1e-14);
    assert!((cd.get(z, w, w) - i * b / (2.0 * a)).norm() < 1e-14);
}

#[test]
fn closed_form_matches_christoffel_formula() {
    let p = MetricParams::new(1.3, 0.7).unwrap();
    for (n, m) in dims() {
        for seed in 0..20u64 {
            let x = random_point(n, m, 500 + seed);
            let a = connection_closed(&x, &p);
            let b = christoffel_numeric(&x, &p);
            let d = a.max_diff(&b);
            assert!(d < 1e-9, "n={n} m={m} seed={seed} d={d:e}");
        }
    }
}

#[test]
fn zero_v_reduces_to_siegel_connection_and_scales_inversely() {
    let z = Mat::from_vec(2, 2, vec![C64::new(0.1, 1.2), C64::new(0.3, 0.2), C64::new(0.3, 0.2), C64::new(-0.2, 0.9)]);
    let w = Mat::from_vec(1, 2, vec![C64::new(0.5, 0.0), C64::new(-0.1, 0.0)]);
    let x = SiegelJacobiPoint::new(z.clone(), w.clone()).unwrap();
    let p = MetricParams::default();
    let cc = ClosedConnection::new(&x, &p);
    let dz = Mat::from_vec(2, 2, vec![C64::new(1.0, 0.5), C64::new(0.2, 0.0), C64::new(0.2, 0.0), C64::new(-0.3, 1.0)]);
    let dw = Mat::czeros(1, 2);
    let got = cc.bz((&dz, &dw), (&dz, &dw));
    let expect = dz.matmul(&x.r.to_complex()).matmul(&dz).scale(C64::new(0.0, 1.0));
    assert!(sjacobi::matrix::max_diff(&got, &expect) < 1e-14);
    let t = 2.5;
    let zt = Mat::from_fn(2, 2, |i, j| C64::new(z.get(i, j).re, t * z.get(i, j).im));
    let xt = SiegelJacobiPoint::new(zt, w).unwrap();
    let g1 = christoffel_numeric(&x, &p);
    let g2 = christoffel_numeric(&xt, &p);
    let l = x.layout();
    for (i, j) in l.omega() {
        for (a, b) in l.omega() {
            for (c, d) in l.omega() {
                let (k, u, v) = (l.z_var(i, j), l.z_var(a, b), l.z_var(c, d));
                assert!((g2.get(k, u, v) * t - g1.get(k, u, v)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn levi_civita_is_metric_compatible_and_torsion_free() {
    let p = MetricParams::new(0.8, 1.9).unwrap();
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for seed in 0..5u64 {
            let x = random_point(n, m, 700 + seed);
            let gamma = connection_closed(&x, &p);
            let r = metric_compatibility_residual(&x, &p, &gamma);
            assert!(r < 1e-8, "n={n} m={m} r={r:e}");
            let nv = x.layout().nvars();
            for k in 0..nv {
                for i in 0..nv {
                    for j in 0..nv {
                        assert_eq!(gamma.get(k, i, j), gamma.get(k, j, i));
                    }
                }
            }
        }
    }
}
