//! Exact solvers against exhaustive enumeration.

mod common;

use lpconc::lp::{project_ak, Exponent, LpVector};
use lpconc::mmspace::{
    concentration_function, partial_diameter_exact, sep_exact, sep_lower_greedy, FiniteMMSpace,
    SepQuery, WeightedCloud,
};
use proptest::prelude::*;

fn space(points: &[LpVector], weights: Vec<f64>, r: Exponent) -> FiniteMMSpace {
    FiniteMMSpace::from_points(points, weights, r).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn partial_diameter_matches_enumeration(
        (pts, w) in common::weighted_points(9, 2),
        r in common::exponent(),
        kappa in 0.0f64..1.2,
    ) {
        let x = space(&pts, w, r);
        let kappa = kappa * x.total_mass();
        let got = partial_diameter_exact(&x, kappa).unwrap();
        let want = common::partial_diameter(&x, kappa);
        prop_assert!(close(got, want), "{got} vs {want}");
    }

    #[test]
    fn line_branch_matches_enumeration(
        (pts, w) in common::weighted_points(10, 1),
        kappa in 0.0f64..1.0,
    ) {
        let cloud = WeightedCloud::real_line(pts.iter().map(|p| p.at(0)).collect(), w.clone()).unwrap();
        let kappa = kappa * cloud.total_mass();
        let got = partial_diameter_exact(&cloud, kappa).unwrap();
        let want = common::partial_diameter(&space(&pts, w, Exponent::ONE), kappa);
        prop_assert!(close(got, want), "{got} vs {want}");
    }

    #[test]
    fn sep_matches_enumeration(
        (pts, w) in common::weighted_points(7, 2),
        r in common::exponent(),
        k1 in 0.0f64..0.7,
        k2 in 0.0f64..0.7,
    ) {
        let x = space(&pts, w, r);
        let m = x.total_mass();
        let q = SepQuery::new(k1 * m, k2 * m).unwrap();
        let got = sep_exact(&x, q).unwrap();
        let want = common::sep(&x, k1 * m, k2 * m);
        prop_assert!(close(got, want), "{got} vs {want}");
        prop_assert!(sep_lower_greedy(&x, q) <= got + 1e-12);
    }

    #[test]
    fn concentration_matches_enumeration(
        (pts, w) in common::weighted_points(9, 2),
        rexp in common::exponent(),
        r in 0.01f64..2.0,
    ) {
        let x = space(&pts, w, rexp);
        let got = concentration_function(&x, r).unwrap();
        let want = common::alpha(&x, r);
        prop_assert!(close(got, want), "{got} vs {want}");
    }

    #[test]
    fn project_ak_matches_keep_sets(
        x in prop::collection::vec(common::coordinate(), 0..=8),
        k in 0usize..=9,
        q in common::exponent(),
    ) {
        let x = LpVector(x);
        let (y, d) = project_ak(&x, k, q);
        let (best, optimal) = common::project_ak(&x, k, q);
        prop_assert!(optimal.contains(&y), "{y:?} is not an optimal keep-set");
        prop_assert!(close(d, best));
        prop_assert_eq!(d, lpconc::lp::lq_dist(&x, &y, q));
    }
}

#[test]
fn two_point_instance() {
    let x = FiniteMMSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap();
    assert_eq!(common::sep(&x, 0.5, 0.5), 1.0);
    assert_eq!(
        sep_exact(&x, SepQuery::symmetric(0.5).unwrap()).unwrap(),
        1.0
    );
    assert_eq!(common::partial_diameter(&x, 0.5), 0.0);
    assert_eq!(partial_diameter_exact(&x, 0.5).unwrap(), 0.0);
}
