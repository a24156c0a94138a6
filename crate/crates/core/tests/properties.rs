use proptest::prelude::*;

use geocount::flowbox::BoundaryArc;
use geocount::group::build_fuchsian_rep;
use geocount::hyperbolic::{busemann, hyp_distance, translation_length, wrap_angle};
use geocount::{canonical_conj_form, BoundaryPoint, Letter, Point, UnitVector, Word};

fn point() -> impl Strategy<Value = Point> {
    (-3.0..3.0f64, -2.0..2.0f64).prop_map(|(x, ly)| Point::new(x, ly.exp()).unwrap())
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..4usize, any::<bool>()), 0..max)
        .prop_map(|ls| Word::new(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

proptest! {
    #[test]
    fn busemann_cocycle(p in point(), q in point(), r in point(), phi in 0.0..6.28f64) {
        let xi = BoundaryPoint::from_angle(phi);
        let lhs = busemann(xi, q, p);
        prop_assert!((lhs - busemann(xi, q, r) - busemann(xi, r, p)).abs() < 1e-9);
        prop_assert!(lhs.abs() <= hyp_distance(p, q) + 1e-9);
    }

    #[test]
    fn isometries_preserve_distance(p in point(), q in point(), b in point(), a in 0.0..6.28f64) {
        let g = UnitVector::new(b, a).frame();
        prop_assert!((hyp_distance(g.apply(p), g.apply(q)) - hyp_distance(p, q)).abs() < 1e-8);
    }

    #[test]
    fn length_is_a_class_function(w in word(7), u in word(4)) {
        let rep = build_fuchsian_rep::<f64>(2).unwrap();
        let g = rep.word_to_matrix(&w);
        let h = rep.word_to_matrix(&w.conjugate_by(&u));
        if let (Ok(a), Ok(b)) = (translation_length(&g), translation_length(&h)) {
            prop_assert!((a - b).abs() < 1e-7 * (1.0 + a));
        }
    }

    #[test]
    fn canonical_form_is_conjugation_invariant(w in word(9), u in word(4)) {
        if let Ok(c) = canonical_conj_form(&w) {
            prop_assert_eq!(canonical_conj_form(&w.conjugate_by(&u)).unwrap(), c);
        }
    }

    #[test]
    fn arc_image_contains_images(start in 0.0..6.28f64, width in 0.01..3.0f64, s in 0.0..1.0f64,
                                 b in point(), a in 0.0..6.28f64) {
        let arc = BoundaryArc::new(start, width);
        let g = UnitVector::new(b, a).frame();
        let phi = wrap_angle(start + s * width);
        let image = g.apply_boundary(BoundaryPoint::from_angle(phi)).angle();
        prop_assert!(arc.image(&g).contains(image));
    }
}
