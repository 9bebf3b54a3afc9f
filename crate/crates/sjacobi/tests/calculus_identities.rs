use num_rational::Rational64;
use sjacobi::calculus::*;
use sjacobi::matrix::{Mat, Scalar};
use sjacobi::space::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn index_for(m: usize) -> WeightIndex {
    let e: Vec<i64> = (0..m * m).map(|i| if i % (m + 1) == 0 { 2 } else { 1 }).collect();
    WeightIndex::from_ints(1, m, &e)
}

#[test]
fn gradient_of_trace_z_is_identity() {
    let f = jet_fn(3, 2, true, |c| Ok(c.z.trace()));
    let g = grad(f.as_ref(), &random_point(3, 2, 1)).unwrap();
    assert_eq!(g.dz, Mat::cidentity(3));
    assert_eq!(g.dw.max_abs(), 0.0);
}

#[test]
fn gradient_of_w12_sits_at_transposed_position() {
    let f = jet_fn(2, 2, true, |c| Ok(c.w.get(0, 1).clone()));
    let g = grad(f.as_ref(), &random_point(2, 2, 2)).unwrap();
    let mut e = Mat::czeros(2, 2);
    e.set(1, 0, C64::new(1.0, 0.0));
    assert_eq!(g.dw, e);
}

#[test]
fn off_diagonal_z_gradient_is_halved() {
    let f = jet_fn(2, 1, true, |c| Ok(c.z.get(0, 1).clone()));
    let g = grad(f.as_ref(), &random_point(2, 1, 3)).unwrap();
    assert_eq!(*g.dz.get(0, 1), C64::new(0.5, 0.0));
    assert_eq!(*g.dz.get(1, 0), C64::new(0.5, 0.0));
}

#[test]
fn exppoly_partials_match_finite_differences() {
    let tol = [0.0, 1e-8, 1e-7, 1e-7, 1e-7];
    for (n, m) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        for seed in 0..3u64 {
            let f = ExpPolyTestFunction::random(n, m, seed, false);
            let x = random_point(n, m, 100 + seed);
            let l = x.layout();
            let j = jet_at(&f, &x, 4).unwrap();
            let nv = l.nvars();
            for order in 1..=4usize {
                for t in 0..3usize {
                    let vars: Vec<usize> = (0..order).map(|k| (seed as usize * 7 + t * 5 + k * 3) % nv).collect();
                    let dirs: Vec<Dir> = vars.iter().map(|&v| l.dir(v)).collect();
                    let fd = fd_oracle(&f, &x, &dirs, order).unwrap();
                    let exact = j.partial(&vars);
                    let scale = j.max_abs();
                    let r = (fd.value - exact).norm() / scale;
                    assert!(r < tol[order], "n={n} m={m} order={order} r={r:e}");
                }
            }
        }
    }
}

#[test]
fn fd_of_linear_map_is_exact() {
    let f = jet_fn(1, 1, true, |c| Ok(c.w.get(0, 0).scale(C64::new(2.0, 1.0)).add_c(C64::new(0.5, 0.0))));
    let x = SiegelJacobiPoint::scalar(C64::new(0.1, 1.0), C64::new(0.25, 0.125)).unwrap();
    let e = fd_oracle(f.as_ref(), &x, &[Dir::W(0, 0)], 1).unwrap();
    assert!((e.value - C64::new(2.0, 1.0)).norm() < 1e-10);
    assert!(e.err < 1e-12, "err {}", e.err);
}

fn trace_mvrv(n: usize, m: usize, mm: Mat<f64>) -> Map {
    jet_fn(n, m, false, move |c| {
        let y = c.y();
        let v = c.v();
        let mj = mm.map(|&a| y.get(0, 0).one_like().scale(C64::new(a, 0.0)));
        Ok(mj.matmul(&v).matmul(&y.inverse()).matmul(&v.transpose()).trace())
    })
}

#[test]
fn trace_mvrv_gradients_match_finite_differences() {
    for (n, m) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
        let mm = index_for(m).index_f64();
        let f = trace_mvrv(n, m, mm.clone());
        for seed in 0..5u64 {
            let x = random_point(n, m, 200 + seed);
            let gw = grad_trace_mvrv_w(&x, &mm);
            let gz = grad_trace_mvrv_z(&x, &mm);
            for r in 0..m {
                for s in 0..n {
                    let fd = fd_oracle(f.as_ref(), &x, &[Dir::W(r, s)], 1).unwrap().value;
                    assert!(rel(*gw.get(s, r), fd) < 1e-8);
                }
            }
            for (i, j) in x.layout().omega() {
                let fd = fd_oracle(f.as_ref(), &x, &[Dir::Z(i, j)], 1).unwrap().value * zfactor(i, j);
                assert!(rel(*gz.get(i, j), fd) < 1e-8);
            }
        }
    }
}

#[test]
fn degree_one_specializations() {
    let x = SiegelJacobiPoint::scalar(C64::new(0.3, 1.7), C64::new(0.2, 0.4)).unwrap();
    let mm = Mat::from_vec(1, 1, vec![3.0]);
    let gw = grad_trace_mvrv_w(&x, &mm);
    assert!((gw.get(0, 0) - C64::new(0.0, -0.4 * 3.0 / 1.7)).norm() < 1e-15);
    let t = grad_r_z(&x);
    assert!((t.get(0, 0, 0, 0) - C64::new(0.0, 0.5 / (1.7 * 1.7))).norm() < 1e-15);
    let d = grad_det_y_z(&x);
    assert!((d.get(0, 0) - C64::new(0.0, -0.5)).norm() < 1e-15);
}

#[test]
fn r_and_det_y_gradients_match_finite_differences() {
    for n in 1..=3 {
        let det_y = jet_fn(n, 1, false, |c| Ok(c.y().det()));
        for seed in 0..5u64 {
            let x = random_point(n, 1, 300 + seed);
            let t = grad_r_z(&x);
            let gd = grad_det_y_z(&x);
            for (k, l) in x.layout().omega() {
                let fd = fd_oracle(det_y.as_ref(), &x, &[Dir::Z(k, l)], 1).unwrap().value * zfactor(k, l);
                assert!(rel(*gd.get(k, l), fd) < 1e-8);
                for s in 0..n {
                    for u in 0..n {
                        let rsu = jet_fn(n, 1, false, move |c| Ok(c.y().inverse().get(s, u).clone()));
                        let fd = fd_oracle(rsu.as_ref(), &x, &[Dir::Z(k, l)], 1).unwrap().value;
                        assert!(rel(t.get(s, u, k, l), fd) < 1e-8, "n={n} s={s} u={u} k={k} l={l}");
                    }
                }
            }
        }
    }
}

#[test]
fn hessian_kernel_matches_product_rule() {
    for (n, m) in [(1, 1), (2, 2), (2, 3)] {
        let wi = index_for(m);
        let mm = wi.index_f64();
        let f: Map = Arc::new(ExpPolyTestFunction::random(n, m, 11, true));
        let fh = {
            let f = f.clone();
            let h = trace_mvrv(n, m, mm.clone());
            jet_fn(n, m, false, move |c| {
                let e = h.eval(c)?.scale(C64::new(-4.0 * PI, 0.0)).exp_jet();
                Ok(f.eval(c)?.mul_jet(&e))
            })
        };
        for seed in 0..3u64 {
            let x = random_point(n, m, 400 + seed);
            let h1 = (-4.0 * PI * grad_helper_trace(&x, &mm)).exp();
            let jet = jet_at(fh.as_ref(), &x, 2).unwrap();
            let l = x.layout();
            for i in 0..m {
                for j in 0..m {
                    let k = hessian_w_kernel(f.as_ref(), &x, &wi, i, j).unwrap();
                    for a in 0..n {
                        for b in 0..n {
                            let exact = jet.partial(&[l.w_var(j, a), l.w_var(i, b)]) / h1;
                            assert!(rel(*k.get(a, b), exact) < 1e-9);
                            if seed == 0 && i == 0 && j == 0 && a == 0 && b == 0 {
                                let fd = fd_oracle(fh.as_ref(), &x, &[Dir::W(j, a), Dir::W(i, b)], 2).unwrap().value / h1;
                                assert!(rel(*k.get(a, b), fd) < 1e-7);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn grad_helper_trace(x: &SiegelJacobiPoint, mm: &Mat<f64>) -> f64 {
    mm.matmul(&x.v).matmul(&x.r).matmul(&x.v.transpose()).trace()
}

#[test]
fn cofactor_identity_holds() {
    let x = random_point(2, 2, 7);
    let f = ExpPolyTestFunction::random(2, 2, 12, true);
    let wi = WeightIndex::new(
        1,
        Mat::from_vec(2, 2, vec![Rational64::from_integer(2), Rational64::new(1, 2), Rational64::new(1, 2), Rational64::from_integer(3)]),
    )
    .unwrap();
    assert!(cofactor_trace_identity_check(&f, &x, &wi, 1).unwrap() < 1e-9);
    let id = WeightIndex::from_ints(1, 2, &[1, 0, 0, 1]);
    assert!(cofactor_trace_identity_check(&f, &x, &id, 2).unwrap() < 1e-12);
    let sing = WeightIndex::from_ints(1, 2, &[1, 1, 1, 1]);
    assert!(cofactor_trace_identity_check(&f, &x, &sing, 2).is_err());
}

#[test]
fn cofactor_is_adjugate() {
    let wi = WeightIndex::from_ints(1, 3, &[2, 1, 0, 1, 4, 1, 0, 1, 6]);
    let mstar = wi.cofactor();
    let d = wi.det_index();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Rational64::from_integer(0);
            for k in 0..3 {
                acc += *wi.index.get(i, k) * *mstar.get(j, k);
            }
            assert_eq!(acc, if i == j { d } else { Rational64::from_integer(0) });
        }
    }
}

#[test]
fn mixed_partials_commute_and_holomorphic_maps_have_no_bar_derivatives() {
    let f = ExpPolyTestFunction::random(2, 2, 21, false);
    let x = random_point(2, 2, 22);
    let l = x.layout();
    let a = Dir::Z(0, 1);
    let b = Dir::Wb(1, 0);
    let p = partial_at(&f, &x, &[a, b]).unwrap();
    let q = partial_at(&f, &x, &[b, a]).unwrap();
    assert!(rel(p, q) < 1e-10);
    let h = ExpPolyTestFunction::random(2, 2, 23, true);
    assert!(h.is_holomorphic());
    let g = grad(&h, &x).unwrap();
    assert_eq!(g.dzbar.max_abs() + g.dwbar.max_abs(), 0.0);
    let _ = l;
}

#[test]
fn gradient_of_slashed_map_matches_finite_differences() {
    let (n, m) = (2, 1);
    let f: Map = Arc::new(ExpPolyTestFunction::random(n, m, 31, true));
    let g = random_group_element(n, m, 32, 2);
    let h = slash_with(f, &g, &index_for(m), TranslationLaw::Composite);
    let x = random_point(n, m, 33);
    let gr = grad(h.as_ref(), &x).unwrap();
    for (i, j) in x.layout().omega() {
        let fd = fd_oracle(h.as_ref(), &x, &[Dir::Z(i, j)], 1).unwrap().value * zfactor(i, j);
        assert!(rel(*gr.dz.get(i, j), fd) < 1e-7 * (1.0 + gr.dz.max_abs()));
    }
}
