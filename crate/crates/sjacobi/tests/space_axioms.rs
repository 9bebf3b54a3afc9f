use proptest::prelude::*;
use sjacobi::calculus::{fd_oracle, ExpPolyTestFunction};
use sjacobi::matrix::{max_diff, Mat};
use sjacobi::space::*;
use std::sync::Arc;

fn pt_diff(a: &SiegelJacobiPoint, b: &SiegelJacobiPoint) -> f64 {
    max_diff(&a.z, &b.z).max(max_diff(&a.w, &b.w)) / (1.0 + a.z.max_abs() + a.w.max_abs())
}

fn index_for(m: usize) -> WeightIndex {
    let e: Vec<i64> = (0..m * m).map(|i| if i % (m + 1) == 0 { 2 } else { 1 }).collect();
    WeightIndex::from_ints(3, m, &e)
}

#[test]
fn act_is_a_left_action() {
    for n in 1..=3 {
        for m in 1..=3 {
            for seed in 0..20u64 {
                let x = random_point(n, m, seed);
                let g1 = random_group_element(n, m, 1000 + seed, 4);
                let g2 = random_group_element(n, m, 2000 + seed, 4);
                let a = act(&g1.compose(&g2), &x).unwrap();
                let b = act(&g1, &act(&g2, &x).unwrap()).unwrap();
                assert!(pt_diff(&a, &b) < 1e-10, "n={n} m={m} seed={seed}");
            }
        }
    }
}

#[test]
fn composite_law_is_a_strict_cocycle() {
    for n in 1..=3 {
        for m in 1..=3 {
            let wi = index_for(m);
            for seed in 0..10u64 {
                let x = random_point(n, m, seed);
                let g1 = random_group_element(n, m, 1000 + seed, 4);
                let g2 = random_group_element(n, m, 2000 + seed, 4);
                let law = TranslationLaw::Composite;
                let l12 = log_automorphy_factor(&g1.compose(&g2), &x, &wi, law).unwrap();
                let l1 = log_automorphy_factor(&g1, &act(&g2, &x).unwrap(), &wi, law).unwrap();
                let l2 = log_automorphy_factor(&g2, &x, &wi, law).unwrap();
                let r = log_residual(l12 - l1 - l2);
                assert!(r < 1e-8 * (1.0 + l12.norm()), "n={n} m={m} seed={seed} r={r}");
            }
        }
    }
}

#[test]
fn literal_law_breaks_the_cocycle_when_c_and_lambda_mix() {
    let wi = WeightIndex::scalar_int(2, 1);
    let x = SiegelJacobiPoint::scalar(C64::new(0.1, 1.1), C64::new(0.2, 0.3)).unwrap();
    let s = JacobiGroupElement::inversion(1, 1);
    let h = JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0);
    let law = TranslationLaw::Literal;
    let l12 = log_automorphy_factor(&s.compose(&h), &x, &wi, law).unwrap();
    let l1 = log_automorphy_factor(&s, &act(&h, &x).unwrap(), &wi, law).unwrap();
    let l2 = log_automorphy_factor(&h, &x, &wi, law).unwrap();
    assert!(log_residual(l12 - l1 - l2) > 1e-3);
}

#[test]
fn s_maps_i_to_itself() {
    let w = C64::new(0.3, 0.2);
    let x = SiegelJacobiPoint::scalar(C64::new(0.0, 1.0), w).unwrap();
    let s = JacobiGroupElement::sl2(0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
    let y = act(&s, &x).unwrap();
    assert!((y.z.get(0, 0) - C64::new(0.0, 1.0)).norm() < 1e-15);
    assert!((y.w.get(0, 0) - w * C64::new(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn heisenberg_kappa_composition_matches_direct_formula() {
    let row = |a: f64, b: f64| Mat::from_vec(1, 2, vec![a, b]);
    let k = |v: f64| Mat::from_vec(1, 1, vec![v]);
    let h1 = JacobiGroupElement::heisenberg(row(1.0, 0.0), row(0.5, -1.0), k(0.25));
    let h2 = JacobiGroupElement::heisenberg(row(0.0, 1.0), row(2.0, 1.0), k(-0.5));
    let p = h1.compose(&h2);
    let expect = 0.25 - 0.5 + (1.0 * 2.0 + 0.0 * 1.0) - (0.5 * 0.0 + (-1.0) * 1.0);
    assert!((p.kappa.get(0, 0) - expect).abs() < 1e-15);
    assert_eq!(*p.lambda.get(0, 1), 1.0);
}

#[test]
fn identity_and_zero_weight_factors_are_one() {
    let x = random_point(2, 2, 5);
    let g = random_group_element(2, 2, 6, 3);
    let wi = index_for(2);
    let e = JacobiGroupElement::identity(2, 2);
    assert!((automorphy_factor(&e, &x, &wi).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    let z = WeightIndex::zero(0, 2);
    assert!((automorphy_factor(&g, &x, &z).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(random_group_element(2, 2, 9, 0).is_identity());
}

#[test]
fn slash_is_a_right_action() {
    for (n, m) in [(1, 1), (2, 1), (2, 2)] {
        let wi = index_for(m);
        let f: Map = Arc::new(ExpPolyTestFunction::random(n, m, 3, true));
        for seed in 0..5u64 {
            let g1 = random_group_element(n, m, 40 + seed, 2);
            let g2 = random_group_element(n, m, 50 + seed, 2);
            let law = TranslationLaw::Composite;
            let a = slash_with(slash_with(f.clone(), &g2, &wi, law), &g1, &wi, law);
            let b = slash_with(f.clone(), &g2.compose(&g1), &wi, law);
            let x = random_point(n, m, 60 + seed);
            let va = value_at(a.as_ref(), &x).unwrap();
            let vb = value_at(b.as_ref(), &x).unwrap();
            assert!((va - vb).norm() <= 1e-9 * vb.norm().max(1e-300), "n={n} m={m} seed={seed} {va} {vb}");
        }
    }
}

#[test]
fn slash_of_holomorphic_map_is_holomorphic() {
    let (n, m) = (2, 2);
    let f: Map = Arc::new(ExpPolyTestFunction::random(n, m, 8, true));
    let g = random_group_element(n, m, 81, 2);
    let h = slash_with(f, &g, &index_for(m), TranslationLaw::Composite);
    let x = random_point(n, m, 82);
    let j = jet_at(h.as_ref(), &x, 1).unwrap();
    let l = x.layout();
    let scale = j.max_abs();
    for v in l.nz()..2 * l.nz() {
        assert!(j.partial(&[v]).norm() < 1e-10 * scale);
    }
    for v in 2 * l.nz() + l.nw()..l.nvars() {
        assert!(j.partial(&[v]).norm() < 1e-10 * scale);
    }
}

#[test]
fn cotangent_maps_match_finite_differences() {
    let (n, m) = (2, 2);
    for seed in 0..4u64 {
        let x = random_point(n, m, 90 + seed);
        let g = random_group_element(n, m, 95 + seed, 3);
        let ct = cotangent_transforms(&g, &x).unwrap();
        let l = x.layout();
        for (i, j) in l.omega() {
            let mut dz = Mat::czeros(n, n);
            dz.set(i, j, C64::new(1.0, 0.0));
            dz.set(j, i, C64::new(1.0, 0.0));
            let (ez, ew) = ct.apply(&dz, &Mat::czeros(m, n));
            for (a, b) in l.omega() {
                let gz = coordinate_of_action(&g, Dir::Z(a, b));
                let fd = fd_oracle(gz.as_ref(), &x, &[Dir::Z(i, j)], 1).unwrap();
                assert!((fd.value - ez.get(a, b)).norm() < 1e-8 * (1.0 + fd.value.norm()));
            }
            for (r, s) in l.omega_prime() {
                let gw = coordinate_of_action(&g, Dir::W(r, s));
                let fd = fd_oracle(gw.as_ref(), &x, &[Dir::Z(i, j)], 1).unwrap();
                assert!((fd.value - ew.get(r, s)).norm() < 1e-8 * (1.0 + fd.value.norm()));
            }
        }
    }
}

#[test]
fn degree_one_dz_coefficient_of_transformed_w() {
    let (a, b, cc, d, lam, mu) = (2.0, 1.0, 1.0, 1.0, 1.0, -2.0);
    let g = JacobiGroupElement::sl2(a, b, cc, d, lam, mu, -lam * mu);
    let z = C64::new(0.3, 0.9);
    let w = C64::new(-0.2, 0.4);
    let x = SiegelJacobiPoint::scalar(z, w).unwrap();
    let ct = cotangent_transforms(&g, &x).unwrap();
    let (_, ew) = ct.apply(&Mat::from_vec(1, 1, vec![C64::new(1.0, 0.0)]), &Mat::czeros(1, 1));
    let expect = (-cc * w - cc * mu + d * lam) / (cc * z + d).powi(2);
    assert!((ew.get(0, 0) - expect).norm() < 1e-14);
}

fn coordinate_of_action(g: &JacobiGroupElement, d: Dir) -> Map {
    let (n, m) = (g.n, g.m);
    let g = g.clone();
    jet_fn(n, m, true, move |c| {
        let t = c.act(&g)?;
        Ok(match d {
            Dir::Z(a, b) => t.z.get(a, b).clone(),
            Dir::W(r, s) => t.w.get(r, s).clone(),
            _ => unreachable!(),
        })
    })
}

#[test]
fn json_round_trip() {
    let x = random_point(2, 3, 1);
    let s = serde_json::to_string(&x.to_json()).unwrap();
    assert!(s.contains("\"Z_re\"") && s.contains("\"W_im\""));
    let back = SiegelJacobiPoint::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
    assert!(pt_diff(&x, &back) == 0.0);
    let g = random_group_element(2, 3, 2, 3);
    let s = serde_json::to_string(&g.to_json()).unwrap();
    assert!(s.contains("\"kappa\"") && s.contains("\"lambda\""));
    assert_eq!(JacobiGroupElement::from_json(&serde_json::from_str(&s).unwrap()).unwrap(), g);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_axioms_hold(n in 1usize..=3, m in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let a = random_group_element(n, m, s1, 3);
        let b = random_group_element(n, m, s2, 3);
        let c = random_group_element(n, m, s3, 3);
        let l = a.compose(&b).compose(&c);
        let r = a.compose(&b.compose(&c));
        let diff = l.sp_matrix().sub(&r.sp_matrix()).max_abs()
            .max(l.lambda.sub(&r.lambda).max_abs())
            .max(l.mu.sub(&r.mu).max_abs())
            .max(l.kappa.sub(&r.kappa).max_abs());
        prop_assert!(diff <= 1e-12 * (1.0 + l.sp_matrix().max_abs()));
        let e = a.compose(&a.inverse());
        let id = JacobiGroupElement::identity(n, m);
        prop_assert!(e.sp_matrix().sub(&id.sp_matrix()).max_abs() < 1e-9);
        prop_assert!(e.lambda.max_abs() < 1e-9 && e.mu.max_abs() < 1e-9 && e.kappa.max_abs() < 1e-9);
        prop_assert_eq!(id.compose(&a), a.clone());
        prop_assert!(l.validate(1e-9).is_ok());
    }

    #[test]
    fn samples_satisfy_invariants(n in 1usize..=3, m in 1usize..=3, seed in any::<u64>(), scale in 0usize..=6) {
        let x = random_point(n, m, seed);
        prop_assert!(x.ry_residual() < 1e-12);
        prop_assert!(sym_eigenvalues(&x.y)[0] > 1e-10);
        prop_assert_eq!(random_point(n, m, seed), x.clone());
        let g = random_group_element(n, m, seed, scale);
        prop_assert!(g.validate(1e-12).is_ok());
        prop_assert!(g.sp_matrix().data.iter().all(|v| v.fract() == 0.0));
        if let Ok(y) = act(&g, &x) {
            prop_assert!(sym_eigenvalues(&y.y)[0] > 0.0);
        }
    }
}
