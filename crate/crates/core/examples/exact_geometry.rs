//! Exact rational predicates: orientation tests, a three-plane vertex and a clipped volume.

use vdecomp::exact::{orient3, HalfSpace, Plane, Point3, Polyhedron, Scalar, Side};

fn main() {
    let third: Scalar = "1/3".parse().unwrap();
    let sum = &third + &third + &third;
    println!("1/3 + 1/3 + 1/3 = {sum}");

    let o = Point3::from_ints(0, 0, 0);
    let (x, y, z) = (Point3::from_ints(1, 0, 0), Point3::from_ints(0, 1, 0), Point3::from_ints(0, 0, 1));
    println!("orient3(o, x, y, z) = {}", orient3(&o, &x, &y, &z));
    let w = Point3::new(Scalar::ratio(1, 3), Scalar::ratio(1, 3), Scalar::zero());
    println!("orient3(x, y, w, z) on a shared plane = {}", orient3(&x, &y, &w, &o));

    let p1 = Plane::from_ints(1, 1, 1, -1).unwrap();
    let p2 = Plane::from_ints(1, -1, 0, 0).unwrap();
    let p3 = Plane::from_ints(0, 0, 1, 0).unwrap();
    println!("three planes meet at {:?}", Plane::intersect3(&p1, &p2, &p3));

    let cube = Polyhedron::from_box(&Point3::from_ints(0, 0, 0), &Point3::from_ints(1, 1, 1));
    let cut = HalfSpace { plane: p1, side: Side::Le };
    println!("unit cube volume {}, below x+y+z=1: {}", cube.volume(), cube.clip(&cut, 0).volume());
}
