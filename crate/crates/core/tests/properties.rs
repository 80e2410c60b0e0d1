//! Property tests for the structural invariants.

use latticeprop::lattice::{LatticePoint, SpaceSpec};
use latticeprop::metrics::{axes_of_symmetry, polygonal_interval_exact};
use latticeprop::paths::path_count;
use latticeprop::propagators::k1_free_histogram;
use num_rational::Rational64;
use proptest::prelude::*;

fn point2(x1: i64, x2: i64, t: i64) -> LatticePoint {
    LatticePoint::new(vec![x1, x2], t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_rep_is_idempotent(x1 in -50i64..50, x2 in -50i64..50, t in -10i64..10,
                                   l1 in 1i64..5, l2 in 1i64..5, klein in any::<bool>()) {
        let space = if klein {
            SpaceSpec::Klein { l1, l2 }
        } else {
            SpaceSpec::Torus { extents: vec![l1, l2] }
        };
        let p = point2(x1, x2, t);
        let once = space.canonical_rep(&p).unwrap();
        let twice = space.canonical_rep(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        // Membership is invariant under the identification.
        prop_assert_eq!(space.contains(&p).unwrap(), space.contains(&once).unwrap());
    }

    #[test]
    fn causal_images_are_lifts_of_the_endpoint(x1 in -3i64..3, x2 in -3i64..3, dt in 0i64..7,
                                               l1 in 1i64..3, l2 in 1i64..3, klein in any::<bool>()) {
        let space = if klein {
            SpaceSpec::Klein { l1, l2 }
        } else {
            SpaceSpec::Torus { extents: vec![l1, l2] }
        };
        let src = point2(0, 0, 0);
        let dst = point2(x1, x2, dt);
        let images = space.causal_images(&src, &dst).unwrap();
        let canon = space.canonical_rep(&dst).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for im in &images {
            prop_assert_eq!(space.canonical_rep(im).unwrap(), canon.clone());
            let (dx, idt) = src.displacement_to(im);
            prop_assert_eq!(idt, dt);
            prop_assert!(dx.iter().map(|v| v.abs()).sum::<i64>() <= dt);
            prop_assert!(seen.insert(im.clone()), "duplicate image {:?}", im);
        }
    }

    #[test]
    fn path_count_respects_reflection_and_permutation(x1 in -4i64..4, x2 in -4i64..4, t in 0i64..6) {
        let free = SpaceSpec::Free { d: 2, extents: None };
        let axes = axes_of_symmetry(1, 2).unwrap();
        let origin = LatticePoint::origin(2);
        let count = |a: i64, b: i64| path_count(&free, &origin, &point2(a, b, t), &axes).unwrap();
        let base = count(x1, x2);
        prop_assert_eq!(&base, &count(-x1, x2));
        prop_assert_eq!(&base, &count(x1, -x2));
        prop_assert_eq!(&base, &count(x2, x1));
    }

    #[test]
    fn k1_histogram_totals_and_bounds(x in -8i64..8, t in 0i64..9, m in 0.0f64..4.0) {
        let hist = k1_free_histogram(&[x], t);
        let free = SpaceSpec::Free { d: 1, extents: None };
        let axes = axes_of_symmetry(1, 1).unwrap();
        let count = path_count(&free, &LatticePoint::origin(1), &LatticePoint::new(vec![x], t), &axes).unwrap();
        prop_assert_eq!(hist.total(), count.clone());
        let count_f = latticeprop::exact::to_f64(&count);
        prop_assert!(hist.amplitude(m).norm() <= count_f + 1e-9 * count_f.max(1.0));
        // Reflection symmetry of the free propagator.
        prop_assert_eq!(hist, k1_free_histogram(&[-x], t));
    }

    #[test]
    fn polygonal_dominance_on_random_displacements(dx in -30i64..30, dt in 0i64..30) {
        prop_assume!(dx.abs() <= dt);
        let orders = [1u32, 2, 5, 13, 50];
        let mut prev: Option<Rational64> = None;
        for n in orders {
            let axes = axes_of_symmetry(n, 1).unwrap();
            let v = polygonal_interval_exact(&axes, &[dx], dt).unwrap();
            prop_assert!(v * v <= Rational64::from_integer(dt * dt - dx * dx));
            if let Some(p) = prev {
                prop_assert!(p <= v);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn cont_multinomial_symmetry_and_zero_law(a in 0.0f64..3.0, b in 0.0f64..3.0, c in 0.0f64..3.0) {
        use latticeprop::contmult::cont_multinomial;
        let forward = cont_multinomial(&[a, b, c], 1e-9).unwrap();
        let backward = cont_multinomial(&[c, a, b], 1e-9).unwrap();
        prop_assert_eq!(forward, backward);
        if a == 0.0 || b == 0.0 || c == 0.0 {
            prop_assert_eq!(forward, 0.0);
        } else {
            prop_assert!(forward > 0.0);
        }
    }
}
