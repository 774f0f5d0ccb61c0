//! Algebraic and metric invariants.

mod common;

use lpconc::certify::obsdiam_bracket_r;
use lpconc::lp::{
    canonicalize, check_fundamental_domain, lq_dist, reduce, reduce_via, Exponent, LpVector,
    ReductionParams, SignedPermutation,
};
use lpconc::mmspace::{
    concentration_function, partial_diameter_exact, pushforward, sep_exact, FiniteMMSpace,
    MetricMeasure, SepQuery, Target, WeightedCloud,
};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (Exponent, Exponent)> {
    prop_oneof![
        Just((Exponent::ONE, Exponent::TWO)),
        Just((Exponent::ONE, Exponent::INF)),
        Just((Exponent::TWO, Exponent::new(3.0).unwrap())),
        Just((Exponent::new(1.5).unwrap(), Exponent::new(4.0).unwrap())),
    ]
}

fn params() -> impl Strategy<Value = ReductionParams> {
    (pair(), prop_oneof![Just(0.5), Just(1.0), 0.6f64..2.5])
        .prop_map(|((p, q), eps)| ReductionParams::new(p, q, eps).unwrap())
        .prop_filter("materializable", |r| r.k_eps <= 4096)
}

fn group_and_vector() -> impl Strategy<
    Value = (
        SignedPermutation,
        SignedPermutation,
        SignedPermutation,
        LpVector,
    ),
> {
    (1usize..=7).prop_flat_map(|k| {
        (
            common::signed_permutation(k),
            common::signed_permutation(k),
            common::signed_permutation(k),
            prop::collection::vec(common::coordinate(), k).prop_map(LpVector),
        )
    })
}

fn space() -> impl Strategy<Value = FiniteMMSpace> {
    (common::weighted_points(8, 2), common::exponent())
        .prop_map(|((pts, w), r)| FiniteMMSpace::from_points(&pts, w, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_laws((g, h, f, x) in group_and_vector()) {
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.apply(&x).unwrap(), g.apply(&h.apply(&x).unwrap()).unwrap());
        prop_assert_eq!(gh.compose(&f).unwrap(), g.compose(&h.compose(&f).unwrap()).unwrap());
        prop_assert!(g.compose(&g.inverse()).unwrap().is_identity());
        prop_assert!(g.inverse().compose(&g).unwrap().is_identity());
        prop_assert_eq!(g.inverse().apply(&g.apply(&x).unwrap()).unwrap(), x.clone());
        let id = SignedPermutation::identity(g.k());
        prop_assert_eq!(id.compose(&g).unwrap(), g.clone());
    }

    #[test]
    fn group_acts_by_isometries((g, _h, _f, x) in group_and_vector(), r in common::exponent()) {
        let gx = g.apply(&x).unwrap();
        prop_assert!((gx.norm(r) - x.norm(r)).abs() <= 1e-12);
    }

    #[test]
    fn canonical_form(x in prop::collection::vec(common::coordinate(), 0..10).prop_map(LpVector)) {
        let (g, y) = canonicalize(&x);
        prop_assert_eq!(g.apply(&x).unwrap(), y.clone());
        prop_assert!(check_fundamental_domain(&y).is_ok());
    }

    #[test]
    fn reduction_properties(prm in params(), x in common::ball_point(Exponent::ONE, 12), y in common::ball_point(Exponent::ONE, 12)) {
        // the l^1 ball sits inside every l^p ball
        let fx = reduce(&x, &prm).unwrap();
        let fy = reduce(&y, &prm).unwrap();
        let (p, q) = (prm.p.get(), prm.q.get());
        let rate = if q.is_infinite() { 1.0 / p } else { (q - p) / (p * q) };
        let bound = ((prm.k_eps + 1) as f64).powf(-rate);
        let err = lq_dist(&x, &fx, prm.q);
        prop_assert!(err <= bound + 1e-12, "{err} > {bound}");
        prop_assert!(err <= prm.eps / 2.0 + 1e-12);
        prop_assert!(fx.nonzero_count() <= prm.k_eps);
        prop_assert!(fx.norm(prm.p) <= x.norm(prm.p) + 1e-12);
        prop_assert_eq!(fx.len(), x.len());
        let lhs = lq_dist(&fx, &fy, prm.q);
        let rhs = prm.lipschitz_constant() * lq_dist(&x, &y, prm.q);
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn reduction_is_equivariant_and_tie_invariant(
        prm in params(),
        x in common::ball_point(Exponent::TWO, 10),
        keys in prop::collection::vec(any::<u32>(), 10),
        zs in prop::collection::vec(any::<bool>(), 10),
        hseed in any::<u64>(),
    ) {
        let x = common::into_ball(x.0, prm.p);
        let fx = reduce(&x, &prm).unwrap();
        let g = common::admissible_g(&x, &keys, &zs);
        prop_assert_eq!(reduce_via(&x, &g, &prm).unwrap(), fx.clone());

        let k = x.len();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.rotate_left((hseed % k as u64) as usize);
        let signs = (0..k).map(|i| if hseed >> (i % 64) & 1 == 1 { -1 } else { 1 }).collect();
        let h = SignedPermutation::new(signs, perm).unwrap();
        let fhx = reduce(&h.apply(&x).unwrap(), &prm).unwrap();
        prop_assert_eq!(fhx, h.apply(&fx).unwrap());
    }

    #[test]
    fn partial_diameter_is_monotone(x in space(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(partial_diameter_exact(&x, hi).unwrap() <= partial_diameter_exact(&x, lo).unwrap());
        prop_assert!(partial_diameter_exact(&x, 0.0).unwrap() <= x.diameter() + 1e-12);
    }

    #[test]
    fn sep_is_monotone(x in space(), a in 0.0f64..0.6, b in 0.0f64..0.6, c in 0.0f64..0.3) {
        let s = |k1, k2| sep_exact(&x, SepQuery::new(k1, k2).unwrap()).unwrap();
        prop_assert!(s(a + c, b) <= s(a, b));
        prop_assert!(s(a, b + c) <= s(a, b));
        prop_assert_eq!(s(a, b), s(b, a));
    }

    #[test]
    fn concentration_is_monotone(x in space(), r in 0.01f64..1.5, dr in 0.0f64..1.0) {
        let a = concentration_function(&x, r).unwrap();
        prop_assert!(concentration_function(&x, r + dr).unwrap() <= a);
        prop_assert!(a <= x.total_mass() / 2.0 + 1e-12);
    }

    #[test]
    fn lipschitz_images_shrink(x in space(), c in 0usize..2, kappa in 0.0f64..1.0, ks in 0.0f64..0.6) {
        // coordinate maps are 1-Lipschitz only for the points' own metric, so
        // use distances to a point instead
        let f: Vec<f64> = (0..x.len()).map(|i| x.dist(i, c.min(x.len() - 1))).collect();
        let img = pushforward(&x, Target::RealLine, |i| vec![f[i]]).unwrap();
        prop_assert_eq!(img.total_mass(), x.total_mass());
        prop_assert!(partial_diameter_exact(&img, kappa).unwrap() <= partial_diameter_exact(&x, kappa).unwrap() + 1e-12);
        let q = SepQuery::symmetric(ks).unwrap();
        prop_assert!(sep_exact(&img, q).unwrap() <= sep_exact(&x, q).unwrap() + 1e-12);
    }

    #[test]
    fn line_partial_diameter_below_sep((pts, w) in common::weighted_points(10, 1), kappa in 0.0f64..0.5) {
        let line = WeightedCloud::real_line(pts.iter().map(|p| p.at(0)).collect(), w).unwrap();
        let kappa = kappa * line.total_mass();
        let lhs = partial_diameter_exact(&line, 2.0 * kappa).unwrap();
        let rhs = sep_exact(&line, SepQuery::symmetric(kappa).unwrap()).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
    }

    #[test]
    fn brackets_are_ordered(x in space(), kp in 0.01f64..0.9) {
        let kp = kp * x.total_mass();
        let b = obsdiam_bracket_r(&x, kp, &[kp * 1.1, kp * 1.5, kp * 2.0]).unwrap();
        prop_assert!(b.is_valid(), "{b:?}");
    }
}
