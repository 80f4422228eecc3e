//! Scalar arithmetic against `BigRational`, and volume conservation under clipping.

use num_rational::BigRational;
use proptest::prelude::*;
use vdecomp::exact::{orient2, HalfSpace, Plane, Point2, Point3, Polyhedron, Scalar, Side};

fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn wide() -> impl Strategy<Value = i64> {
    prop_oneof![-1000i64..1000, any::<i64>().prop_filter("nonzero", |v| *v != 0)]
}

fn den() -> impl Strategy<Value = i64> {
    prop_oneof![1i64..50, 1i64..i64::MAX]
}

proptest! {
    #[test]
    fn field_operations_match_bigrational(a in wide(), b in den(), c in wide(), d in den()) {
        let (x, y) = (Scalar::ratio(a, b), Scalar::ratio(c, d));
        let (bx, by) = (big(a, b), big(c, d));
        prop_assert_eq!((&x + &y).to_big(), &bx + &by);
        prop_assert_eq!((&x - &y).to_big(), &bx - &by);
        prop_assert_eq!((&x * &y).to_big(), &bx * &by);
        if c != 0 {
            prop_assert_eq!((&x / &y).to_big(), &bx / &by);
        }
        prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        prop_assert_eq!(Scalar::from_big(bx.clone()), x.clone());
        prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
    }

    #[test]
    fn long_sums_are_exact(terms in proptest::collection::vec((wide(), den()), 1..40)) {
        let s: Scalar = terms.iter().map(|&(n, d)| Scalar::ratio(n, d)).sum();
        let b = terms.iter().fold(BigRational::from_integer(0.into()), |acc, &(n, d)| acc + big(n, d));
        prop_assert_eq!(s.to_big(), b);
    }

    #[test]
    fn orientation_is_antisymmetric(p in proptest::array::uniform6(-50i64..50)) {
        let pt = |i: usize| Point2::new(Scalar::from(p[i]), Scalar::from(p[i + 1]));
        let (a, b, c) = (pt(0), pt(2), pt(4));
        prop_assert_eq!(orient2(&a, &b, &c), -orient2(&b, &a, &c));
        prop_assert_eq!(orient2(&a, &b, &c), orient2(&b, &c, &a));
    }

    #[test]
    fn clipping_conserves_volume(a in -5i64..5, b in -5i64..5, c in 1i64..5, d in -20i64..20) {
        let cube = Polyhedron::from_box(&Point3::from_ints(0, 0, 0), &Point3::from_ints(3, 3, 3));
        let plane = Plane::from_ints(a, b, c, d).unwrap();
        let below = cube.clip(&HalfSpace { plane: plane.clone(), side: Side::Le }, 0);
        let above = cube.clip(&HalfSpace { plane, side: Side::Ge }, 0);
        prop_assert_eq!(below.volume() + above.volume(), Scalar::from(27));
    }
}
