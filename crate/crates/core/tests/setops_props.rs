use carasel::setops::{
    convex_membership, distance_to_hull, eps_neighborhood_contains, hausdorff_dist, hausdorff_dist_inf_eps,
    interior_point_margin, li_limit, ls_limit, ConvexSet, PointSet, SetSequence,
};
use proptest::prelude::*;

fn point_set(dim: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dim), 1..max)
        .prop_map(move |pts| PointSet::new(dim, pts).unwrap())
}

fn triple() -> impl Strategy<Value = (PointSet, PointSet, PointSet)> {
    (1usize..=3).prop_flat_map(|d| (point_set(d, 8), point_set(d, 8), point_set(d, 8)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hausdorff_is_a_metric((a, b, c) in triple()) {
        let ab = hausdorff_dist(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_dist(&b, &a).unwrap());
        prop_assert!(hausdorff_dist(&a, &a).unwrap() <= 1e-12);
        let bc = hausdorff_dist(&b, &c).unwrap();
        let ac = hausdorff_dist(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
        if ab <= 1e-12 {
            prop_assert!(a.approx_eq(&b, 1e-9));
        }
    }

    #[test]
    fn sup_and_inf_eps_forms_agree((a, b, _) in triple()) {
        let s = hausdorff_dist(&a, &b).unwrap();
        let e = hausdorff_dist_inf_eps(&a, &b).unwrap();
        prop_assert!((s - e).abs() <= 1e-9, "{} vs {}", s, e);
    }

    #[test]
    fn neighbourhoods_just_above_h_contain((a, b, _) in triple()) {
        let h = hausdorff_dist(&a, &b).unwrap();
        prop_assert!(eps_neighborhood_contains(&a, &b, h + 1e-9));
        prop_assert!(eps_neighborhood_contains(&b, &a, h + 1e-9));
        if h > 1e-9 {
            prop_assert!(!(eps_neighborhood_contains(&a, &b, h) && eps_neighborhood_contains(&b, &a, h)));
        }
    }

    #[test]
    fn membership_is_monotone((a, b, _) in triple(), w in prop::collection::vec(0.0f64..1.0, 8)) {
        // a convex combination of points of a lies in con a and in con (a ∪ b)
        let k = a.len().min(w.len());
        let total: f64 = w[..k].iter().sum::<f64>() + 1e-3;
        let mut x = vec![0.0; a.dim()];
        for (p, wi) in a.iter().zip(&w[..k]) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += pi * wi / total;
            }
        }
        for (xi, pi) in x.iter_mut().zip(&a.points()[0]) {
            *xi += pi * 1e-3 / total;
        }
        let ca = ConvexSet::from_points(&a).unwrap();
        let cab = ConvexSet::from_points(&a.union(&b).unwrap()).unwrap();
        prop_assert!(convex_membership(&x, &ca, 1e-9).unwrap());
        prop_assert!(convex_membership(&x, &cab, 1e-9).unwrap());
    }

    #[test]
    fn positive_margin_implies_membership((a, _, _) in triple(), x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let c = ConvexSet::from_points(&a).unwrap();
        let x = &x[..a.dim()];
        if interior_point_margin(x, &c) > 0.0 {
            prop_assert!(c.contains(x, 1e-9));
        }
        let m = interior_point_margin(&c.centroid(), &c);
        prop_assert!(m >= 0.0);
    }

    #[test]
    fn extreme_points_keep_the_hull((a, _, _) in triple(), probe in prop::collection::vec(-6.0f64..6.0, 3)) {
        let c = ConvexSet::from_points(&a).unwrap();
        let e = c.extreme_points();
        let x = &probe[..a.dim()];
        let d0 = distance_to_hull(c.vertices(), x);
        let d1 = distance_to_hull(e.vertices(), x);
        prop_assert!((d0 - d1).abs() <= 1e-7 * (1.0 + d0), "{} vs {}", d0, d1);
    }

    #[test]
    fn li_is_inside_ls(terms in prop::collection::vec(point_set(1, 5), 4..10)) {
        let s = SetSequence::new(1, terms).unwrap();
        let tail = 4;
        let li = li_limit(&s, tail, 1e-6).unwrap();
        let ls = ls_limit(&s, tail, 1e-6).unwrap();
        for p in li.iter() {
            prop_assert!(ls.dist_to(p) <= 1e-6);
        }
    }
}

#[test]
fn constant_sequence_limits_are_the_set() {
    let a = PointSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
    let s = SetSequence::new(2, vec![a.clone(); 6]).unwrap();
    assert!(li_limit(&s, 3, 1e-9).unwrap().approx_eq(&a, 1e-9));
    assert!(ls_limit(&s, 3, 1e-9).unwrap().approx_eq(&a, 1e-9));
}

#[test]
fn empty_inputs_are_domain_errors() {
    let a = PointSet::singleton(vec![0.0]);
    assert!(hausdorff_dist(&a, &PointSet::empty(1)).is_err());
    assert!(hausdorff_dist(&a, &PointSet::singleton(vec![0.0, 1.0])).is_err());
}
