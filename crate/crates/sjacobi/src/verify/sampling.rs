//! Deterministic sampling of points, group elements and test functions.

use crate::calculus::expoly::ExpPolyTestFunction;
use crate::space::{box_point, random_group_element_rng, JacobiGroupElement, Map, SampleBox, SiegelJacobiPoint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// One covariance sample: a point, a group element and the test-function seeds.
#[derive(Clone, Debug)]
pub struct Sample {
    pub x: SiegelJacobiPoint,
    pub g: JacobiGroupElement,
    pub seed: u64,
}

/// Word of at most two symplectic generators, a lattice element with entries in
/// `{-1, 0, 1}`, and the inversion with probability 3/4.
pub fn sample_group<R: Rng>(n: usize, m: usize, rng: &mut R) -> JacobiGroupElement {
    let w = random_group_element_rng(n, m, rng, 2);
    let sp = JacobiGroupElement::symplectic(w.a, w.b, w.c, w.d, m);
    let h = random_group_element_rng(n, m, rng, 1);
    let h = JacobiGroupElement::heisenberg(h.lambda, h.mu, h.kappa);
    let g = sp.compose(&h);
    if rng.gen_bool(0.75) {
        g.compose(&JacobiGroupElement::inversion(n, m))
    } else {
        g
    }
}

/// Sample `index` of the stream with the given seed.
pub fn sample(n: usize, m: usize, seed: u64, index: usize) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let x = box_point(n, m, &mut rng, &SampleBox::default());
    let g = sample_group(n, m, &mut rng);
    Sample { x, g, seed: rng.gen() }
}

/// `count` generic test functions for a sample.
pub fn test_functions(n: usize, m: usize, seed: u64, count: usize, holomorphic: bool) -> Vec<Map> {
    (0..count)
        .map(|t| Arc::new(ExpPolyTestFunction::random(n, m, seed.wrapping_add(t as u64 * 7919), holomorphic)) as Map)
        .collect()
}
