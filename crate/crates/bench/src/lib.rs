//! Fixtures shared by the benchmarks.

use num_rational::BigRational;
use pachlab_core::coloring::{build_pushed_map, PushedMapParams, TwoColoring};
use pachlab_core::geometry::random_generic_points;
use pachlab_core::pl_map::{affine_map, PLMap};
use pachlab_core::JoinComplex;

pub fn pushed(n: usize, seed: u64) -> PLMap {
    let complex = JoinComplex::new(2, n).expect("complex");
    let coloring = TwoColoring::random(&complex, seed).expect("coloring");
    let params = PushedMapParams::standard(&complex, seed, &BigRational::new(1.into(), 4.into())).expect("params");
    build_pushed_map(&coloring, &params).expect("map")
}

pub fn affine(n: usize, seed: u64) -> PLMap {
    let config = random_generic_points(3 * n, seed, 20, 7, 1000).expect("points");
    affine_map(n, config).expect("map")
}
