use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sjacobi::qseries::*;
use sjacobi::space::{slash_with, value_at, JacobiGroupElement, SiegelJacobiPoint, TranslationLaw, WeightIndex, C64};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn box_points(seed: u64, count: usize) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
            let r = rng.gen_range(0.0..0.4);
            let t = rng.gen_range(0.0..2.0 * PI);
            (z, C64::from_polar(r, t))
        })
        .collect()
}

fn generators() -> Vec<(&'static str, JacobiGroupElement)> {
    vec![
        ("S", JacobiGroupElement::sl2(0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0)),
        ("T", JacobiGroupElement::sl2(1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0)),
        ("lambda", JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0)),
        ("mu", JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0)),
        ("lambda_mu", JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0)),
    ]
}

#[test]
fn corpus_slash_invariance() {
    for (name, k) in [("phi_-2_1", -2), ("phi_0_1", 0)] {
        let f = series_map(&corpus_form(name, 50).unwrap(), 1, 1e-10);
        let wi = WeightIndex::scalar_int(k, 1);
        for (gname, g) in generators() {
            let h = slash_with(f.clone(), &g, &wi, TranslationLaw::Composite);
            for (z, w) in box_points(7, 10) {
                let x = SiegelJacobiPoint::scalar(z, w).unwrap();
                let a = value_at(h.as_ref(), &x).unwrap();
                let b = value_at(f.as_ref(), &x).unwrap();
                let res = (a - b).norm() / b.norm().max(1.0);
                assert!(res < 1e-9, "{name} under {gname} at {z} {w}: {res:e}");
            }
        }
    }
}

#[test]
fn heat_on_series_matches_numeric_heat() {
    let s = phi_m2_1(50).unwrap();
    let h = heat_on_series(&s).unwrap();
    let f = series_map(&s, 1, 1e-10);
    let lf = sjacobi::operators::heat_lm(f, &WeightIndex::scalar_int(-2, 1)).unwrap();
    for (z, w) in box_points(11, 5) {
        let x = SiegelJacobiPoint::scalar(z, w).unwrap();
        let a = value_at(lf.as_ref(), &x).unwrap();
        let b = evaluate(&h, z, w, 1e-8).unwrap() * (4.0 * PI * PI);
        assert!((a - b).norm() <= 1e-8 * b.norm(), "{a} vs {b}");
    }
}

#[test]
fn g4_lattice_sum_matches_q_expansion() {
    let z = C64::new(0.0, 2.0);
    let lat = eisenstein_g_value(4, z, 300).unwrap();
    let g = eisenstein_g(4, 40).unwrap();
    let q = evaluate_q(&g.series, z).value * (2.0 * PI * I).powu(g.pow);
    assert!((lat - q).norm() / q.norm() < 1e-8, "{lat} vs {q}");
}

#[test]
fn g2_anomaly_and_completion() {
    for (z, _) in box_points(3, 4) {
        let s = -z.inv();
        let g = eisenstein_g_value(2, z, 500).unwrap();
        let gs = eisenstein_g_value(2, s, 500).unwrap();
        assert!((gs - z * z * g + 2.0 * PI * I * z).norm() < 1e-6);
        let star = |t: C64, v: C64| v - PI / t.im;
        assert!((star(s, gs) - z * z * star(z, g)).norm() < 1e-6);
    }
}

#[test]
fn g1hat_transformation_laws() {
    for (z, w) in box_points(5, 4) {
        let (base, _) = converged_hat_value(1, z, w, 1e-12, 400, 1 << 16).unwrap();
        for (a, b, c, d) in [(0.0, -1.0, 1.0, 0.0), (1.0, 1.0, 0.0, 1.0), (1.0, 0.0, 1.0, 1.0)] {
            let j = z * c + d;
            let (t, u) = ((z * a + b) / j, w / j);
            let (v, _) = converged_hat_value(1, t, u, 1e-12, 400, 1 << 16).unwrap();
            assert!((v - j * base - 2.0 * PI * I * c * w).norm() < 1e-6);
        }
        for (l, m) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 2.0)] {
            let (v, _) = converged_hat_value(1, z, w + z * l + m, 1e-12, 400, 1 << 16).unwrap();
            assert!((v - base + 2.0 * PI * I * l).norm() < 1e-6);
        }
    }
}

#[test]
fn e1hat_completion_is_weight_one_index_zero() {
    let e = |z: C64, w: C64| converged_hat_value(1, z, w, 1e-12, 400, 1 << 16).unwrap().0 * I / (2.0 * PI);
    let comp = |z: C64, w: C64| e(z, w) - w.im / z.im;
    for (z, w) in box_points(9, 4) {
        for (a, b, c, d) in [(0.0, -1.0, 1.0, 0.0), (1.0, 1.0, 0.0, 1.0), (2.0, 1.0, 1.0, 1.0)] {
            let j = z * c + d;
            let lhs = comp((z * a + b) / j, w / j);
            assert!((lhs - j * comp(z, w)).norm() < 1e-6);
        }
        let lhs = comp(z, w + z + 1.0);
        assert!((lhs - comp(z, w)).norm() < 1e-6);
    }
}
