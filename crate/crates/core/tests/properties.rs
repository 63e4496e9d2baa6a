use num_rational::BigRational;
use proptest::prelude::*;

use pachlab_core::bits::BitVec;
use pachlab_core::cochains::{boundary, coboundary, minimal_cofilling, pairing, CofillingBudget, CofillingMode, F2Chain, F2Cochain};
use pachlab_core::extraction::{extract_tripartite, extract_tripartite_max, TripartiteGraph};
use pachlab_core::geometry::{orientation, random_generic_points, ExactPoint};
use pachlab_core::pl_map::{affine_map, face_parities, face_parities_by_ray};
use pachlab_core::rational::{format_rational, parse_rational};
use pachlab_core::JoinComplex;

fn bits_of(len: usize, raw: &[bool]) -> BitVec {
    BitVec::from_indices(len, (0..len).filter(|&i| raw[i % raw.len()]))
}

fn point() -> impl Strategy<Value = ExactPoint> {
    (-500i64..500, 1i64..60, -500i64..500, 1i64..60).prop_map(|(a, b, c, d)| {
        ExactPoint::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squares_to_zero(n in 2usize..5, k in 0usize..2, raw in prop::collection::vec(any::<bool>(), 1..64)) {
        let c = JoinComplex::new(2, n).unwrap();
        let top = k + 1;
        let len = c.face_count(top).unwrap();
        let ch = F2Chain::from_bits(&c, top, bits_of(len, &raw)).unwrap();
        let once = boundary(&c, &ch).unwrap();
        if k >= 1 {
            prop_assert!(boundary(&c, &once).unwrap().is_zero());
        }
        let a = F2Cochain::from_bits(&c, k, bits_of(c.face_count(k).unwrap(), &raw)).unwrap();
        if k == 0 {
            prop_assert!(coboundary(&c, &coboundary(&c, &a).unwrap()).unwrap().is_zero());
        }
        prop_assert_eq!(pairing(&coboundary(&c, &a).unwrap(), &ch).unwrap(), pairing(&a, &once).unwrap());
    }

    #[test]
    fn face_rank_round_trips(n in 1usize..6, k in 0usize..3, seed in any::<u64>()) {
        let c = JoinComplex::new(2, n).unwrap();
        let count = c.face_count(k).unwrap();
        let r = (seed % count as u64) as usize;
        let face = c.unrank_face(k, r).unwrap();
        prop_assert_eq!(c.rank_face(&face).unwrap(), r);
    }

    #[test]
    fn greedy_cofilling_never_beats_exact(raw in prop::collection::vec(any::<bool>(), 12)) {
        let c = JoinComplex::new(2, 2).unwrap();
        let a = F2Cochain::from_bits(&c, 1, bits_of(12, &raw)).unwrap();
        let b = coboundary(&c, &a).unwrap();
        let exact = minimal_cofilling(&c, &b, CofillingMode::Exact, CofillingBudget::default()).unwrap();
        let greedy = minimal_cofilling(&c, &b, CofillingMode::Greedy, CofillingBudget::default()).unwrap();
        prop_assert_eq!(coboundary(&c, &greedy.a).unwrap(), b.clone());
        prop_assert!(exact.a.weight() <= greedy.a.weight());
        prop_assert!(exact.a.weight() <= a.weight());
    }

    #[test]
    fn orientation_is_antisymmetric(p in point(), q in point(), r in point()) {
        prop_assert_eq!(orientation(&p, &q, &r), orientation(&q, &p, &r).reverse());
        prop_assert_eq!(orientation(&p, &q, &r), orientation(&q, &r, &p));
    }

    #[test]
    fn rational_text_round_trips(a in any::<i64>(), b in 1i64..i64::MAX) {
        let q = BigRational::new(a.into(), b.into());
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn extraction_outputs_are_complete(density in 0.3f64..1.0, seed in any::<u64>()) {
        let g = TripartiteGraph::random([6, 6, 6], density, seed);
        if let Some((t, parts)) = extract_tripartite_max(&g) {
            prop_assert!(g.is_complete_on(&parts));
            prop_assert!(parts.iter().all(|p| p.len() == t));
            for smaller in 1..t {
                prop_assert!(extract_tripartite(&g, smaller).is_some());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ray_parity_matches_triangle_parity(seed in 0u64..1000, p in point()) {
        let cfg = random_generic_points(12, seed, 20, 7, 1000).unwrap();
        let map = affine_map(4, cfg).unwrap();
        if let (Ok(a), Ok(b)) = (face_parities(&map, &p), face_parities_by_ray(&map, &p)) {
            prop_assert_eq!(a, b);
        }
    }
}
