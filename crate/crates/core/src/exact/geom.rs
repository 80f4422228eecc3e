//! Points, planes and the exact predicates built on them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::error::GeomError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(x.into(), y.into(), z.into())
    }

    pub fn sub(&self, o: &Point3) -> [Scalar; 3] {
        [&self.x - &o.x, &self.y - &o.y, &self.z - &o.z]
    }

    pub fn lerp(&self, o: &Point3, t: &Scalar) -> Point3 {
        Point3::new(
            &self.x + t * (&o.x - &self.x),
            &self.y + t * (&o.y - &self.y),
            &self.z + t * (&o.z - &self.z),
        )
    }

    pub fn xy(&self) -> Point2 {
        Point2::new(self.x.clone(), self.y.clone())
    }

    /// Coordinate by axis index 0..3.
    pub fn coord(&self, axis: usize) -> &Scalar {
        match axis {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    pub fn centroid<'a, I: IntoIterator<Item = &'a Point3>>(pts: I) -> Point3 {
        let (mut sx, mut sy, mut sz, mut n) = (Scalar::zero(), Scalar::zero(), Scalar::zero(), 0i64);
        for p in pts {
            sx += &p.x;
            sy += &p.y;
            sz += &p.z;
            n += 1;
        }
        assert!(n > 0, "centroid of no points");
        let n = Scalar::from_int(n);
        Point3::new(sx / &n, sy / &n, sz / n)
    }
}

impl fmt::Debug for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point2 { x, y }
    }
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn det3(a: &[Scalar; 3], b: &[Scalar; 3], c: &[Scalar; 3]) -> Scalar {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

pub fn cross(a: &[Scalar; 3], b: &[Scalar; 3]) -> [Scalar; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn dot(a: &[Scalar; 3], b: &[Scalar; 3]) -> Scalar {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// Sign of `det[q-p, r-p, s-p]`.
pub fn orient3(p: &Point3, q: &Point3, r: &Point3, s: &Point3) -> i32 {
    det3(&q.sub(p), &r.sub(p), &s.sub(p)).signum()
}

/// Relative error allowance of the floating-point sign filters. Conversions to `f64`
/// are accurate to a few ulps, so this leaves a wide margin.
const FILTER_EPS: f64 = 1e-12;

/// Sign of `v` if the error bound `err` certifies it.
#[inline]
fn certified(v: f64, err: f64) -> Option<i32> {
    if !v.is_finite() || !err.is_finite() {
        return None;
    }
    if v > err {
        Some(1)
    } else if v < -err {
        Some(-1)
    } else {
        None
    }
}

/// Sign of the 2D cross product `(q-p) x (r-p)`; +1 for a left turn.
pub fn orient2(p: &Point2, q: &Point2, r: &Point2) -> i32 {
    let (px, py, qx, qy, rx, ry) = (p.x.to_f64(), p.y.to_f64(), q.x.to_f64(), q.y.to_f64(), r.x.to_f64(), r.y.to_f64());
    let det = (qx - px) * (ry - py) - (qy - py) * (rx - px);
    let mag = (qx.abs() + px.abs()) * (ry.abs() + py.abs()) + (qy.abs() + py.abs()) * (rx.abs() + px.abs());
    if let Some(s) = certified(det, mag * FILTER_EPS) {
        return s;
    }
    ((&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)).signum()
}

/// The plane `a x + b y + c z + d = 0`, stored in canonical form: primitive integer
/// coefficients whose first nonzero entry is positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Plane {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}x + {}y + {}z + {}]", self.a, self.b, self.c, self.d)
    }
}

/// Scale `coeffs` to primitive integers with the first nonzero entry positive.
/// Returns the positive-or-negative factor that was applied.
fn primitive(coeffs: &mut [Scalar]) -> Scalar {
    let mut l = BigInt::one();
    for c in coeffs.iter() {
        l = l.lcm(&c.denom());
    }
    let mut g = BigInt::zero();
    for c in coeffs.iter() {
        let n = (c.numer() * (&l / c.denom())).abs();
        g = g.gcd(&n);
    }
    if g.is_zero() {
        return Scalar::one();
    }
    let first_neg = coeffs.iter().find(|c| !c.is_zero()).map(|c| c.is_negative()).unwrap_or(false);
    let mut factor = Scalar::from_big(num_rational::BigRational::new(l, g));
    if first_neg {
        factor = -factor;
    }
    for c in coeffs.iter_mut() {
        *c = &*c * &factor;
    }
    factor
}

impl Plane {
    /// Canonical plane through the given coefficients.
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, GeomError> {
        Self::with_factor(a, b, c, d).map(|(p, _)| p)
    }

    /// Canonical plane plus the factor `lambda` with `canonical = lambda * input`.
    pub fn with_factor(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<(Self, Scalar), GeomError> {
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(GeomError::DegeneratePlane);
        }
        let mut v = [a, b, c, d];
        let f = primitive(&mut v);
        let [a, b, c, d] = v;
        Ok((Plane { a, b, c, d }, f))
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self, GeomError> {
        Plane::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Sign of [`Plane::eval`], with a floating-point fast path.
    pub fn sign_at(&self, p: &Point3) -> i32 {
        let (a, b, c, d) = (self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64());
        let (x, y, z) = (p.x.to_f64(), p.y.to_f64(), p.z.to_f64());
        let v = a * x + b * y + c * z + d;
        let mag = (a * x).abs() + (b * y).abs() + (c * z).abs() + d.abs();
        certified(v, mag * FILTER_EPS).unwrap_or_else(|| self.eval(p).signum())
    }

    /// Plane through three non-collinear points.
    pub fn through(p: &Point3, q: &Point3, r: &Point3) -> Result<Self, GeomError> {
        let n = cross(&q.sub(p), &r.sub(p));
        let d = -(&n[0] * &p.x + &n[1] * &p.y + &n[2] * &p.z);
        let [a, b, c] = n;
        Plane::new(a, b, c, d)
    }

    pub fn normal(&self) -> [Scalar; 3] {
        [self.a.clone(), self.b.clone(), self.c.clone()]
    }

    pub fn eval(&self, p: &Point3) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c * &p.z + &self.d
    }

    pub fn is_vertical(&self) -> bool {
        self.c.is_zero()
    }

    /// `z = f(x, y)` form of a non-vertical plane.
    pub fn z_function(&self) -> Result<ZPlane, GeomError> {
        if self.c.is_zero() {
            return Err(GeomError::VerticalPlane);
        }
        let inv = -self.c.recip();
        Ok(ZPlane {
            a: &self.a * &inv,
            b: &self.b * &inv,
            c: &self.d * &inv,
        })
    }

    /// Intersection point of three planes, if unique.
    pub fn intersect3(p: &Plane, q: &Plane, r: &Plane) -> Option<Point3> {
        let (n1, n2, n3) = (p.normal(), q.normal(), r.normal());
        let det = det3(&n1, &n2, &n3);
        if det.is_zero() {
            return None;
        }
        let d = [-p.d.clone(), -q.d.clone(), -r.d.clone()];
        let col = |i: usize| -> Scalar {
            let mut m = [n1.clone(), n2.clone(), n3.clone()];
            for (row, dv) in m.iter_mut().zip(d.iter()) {
                row[i] = dv.clone();
            }
            det3(&m[0], &m[1], &m[2])
        };
        Some(Point3::new(col(0) / &det, col(1) / &det, col(2) / &det))
    }
}

/// Sign of `a p.x + b p.y + c p.z + d`.
pub fn side_of_plane(h: &Plane, p: &Point3) -> i32 {
    h.sign_at(p)
}

/// Sign of `z1(x, y) - z2(x, y)` for two non-vertical planes.
pub fn z_order_at(h1: &Plane, h2: &Plane, x: &Scalar, y: &Scalar) -> Result<i32, GeomError> {
    let f1 = h1.z_function()?;
    let f2 = h2.z_function()?;
    Ok((f1.at(x, y) - f2.at(x, y)).signum())
}

/// Which side of a plane a halfspace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Le,
    Ge,
}

/// Closed halfspace `plane <= 0` or `plane >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfSpace {
    pub plane: Plane,
    pub side: Side,
}

impl HalfSpace {
    /// `a x + b y + c z + d (<= | >=) 0`, canonicalized.
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar, side: Side) -> Result<Self, GeomError> {
        let (plane, f) = Plane::with_factor(a, b, c, d)?;
        let side = if f.is_negative() { side.flip() } else { side };
        Ok(HalfSpace { plane, side })
    }

    /// Signed value that is `<= 0` inside.
    pub fn value(&self, p: &Point3) -> Scalar {
        let v = self.plane.eval(p);
        match self.side {
            Side::Le => v,
            Side::Ge => -v,
        }
    }

    /// Outward normal (pointing out of the kept side).
    pub fn outward(&self) -> [Scalar; 3] {
        match self.side {
            Side::Le => self.plane.normal(),
            Side::Ge => [-&self.plane.a, -&self.plane.b, -&self.plane.c],
        }
    }

    /// `a x + b y + c z + d <= 0` coefficients with outward normal.
    pub fn le_coeffs(&self) -> [Scalar; 4] {
        let [a, b, c] = self.outward();
        let d = match self.side {
            Side::Le => self.plane.d.clone(),
            Side::Ge => -&self.plane.d,
        };
        [a, b, c, d]
    }

    /// +1 if the outward normal points up (the facet is a top facet), -1 if down, 0 if vertical.
    pub fn z_orientation(&self) -> i32 {
        self.outward()[2].signum()
    }

    /// Sign of [`HalfSpace::value`].
    pub fn sign_of(&self, p: &Point3) -> i32 {
        let s = self.plane.sign_at(p);
        match self.side {
            Side::Le => s,
            Side::Ge => -s,
        }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.sign_of(p) <= 0
    }

    pub fn contains_strictly(&self, p: &Point3) -> bool {
        self.sign_of(p) < 0
    }
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Le => Side::Ge,
            Side::Ge => Side::Le,
        }
    }
}

/// Non-vertical plane written as `z = a x + b y + c`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZPlane {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl fmt::Debug for ZPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z={}x+{}y+{}", self.a, self.b, self.c)
    }
}

impl ZPlane {
    pub fn horizontal(z: Scalar) -> Self {
        ZPlane { a: Scalar::zero(), b: Scalar::zero(), c: z }
    }

    pub fn at(&self, x: &Scalar, y: &Scalar) -> Scalar {
        &self.a * x + &self.b * y + &self.c
    }

    pub fn at2(&self, p: &Point2) -> Scalar {
        self.at(&p.x, &p.y)
    }

    /// `self - other` as an affine function of `(x, y)`.
    pub fn minus(&self, other: &ZPlane) -> Affine2 {
        Affine2 {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            c: &self.c - &other.c,
        }
    }

    pub fn to_plane(&self) -> Plane {
        Plane::new(self.a.clone(), self.b.clone(), -Scalar::one(), self.c.clone())
            .expect("z-plane is never degenerate")
    }
}

/// Affine function `a x + b y + c` on the plane.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine2 {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl fmt::Debug for Affine2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x+{}y+{}", self.a, self.b, self.c)
    }
}

impl Affine2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> Self {
        Affine2 { a, b, c }
    }

    pub fn at(&self, p: &Point2) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    /// Sign of the function at `p`, with a floating-point fast path.
    pub fn sign_at(&self, p: &Point2) -> i32 {
        let (a, b, c, x, y) = (self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), p.x.to_f64(), p.y.to_f64());
        let v = a * x + b * y + c;
        let mag = (a * x).abs() + (b * y).abs() + c.abs();
        certified(v, mag * FILTER_EPS).unwrap_or_else(|| self.at(p).signum())
    }

    pub fn neg(&self) -> Affine2 {
        Affine2 { a: -&self.a, b: -&self.b, c: -&self.c }
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Point3::from_ints(x, y, z)
    }

    #[test]
    fn orient3_unit_frame_and_degeneracy() {
        assert_eq!(orient3(&p(0, 0, 0), &p(1, 0, 0), &p(0, 1, 0), &p(0, 0, 1)), 1);
        assert_eq!(orient3(&p(0, 0, 0), &p(1, 0, 0), &p(0, 1, 0), &p(5, 7, 0)), 0);
        assert_eq!(orient3(&p(0, 0, 0), &p(0, 1, 0), &p(1, 0, 0), &p(0, 0, 1)), -1);
    }

    #[test]
    fn side_of_plane_examples() {
        let z0 = Plane::from_ints(0, 0, 1, 0).unwrap();
        assert_eq!(side_of_plane(&z0, &p(0, 0, 1)), 1);
        assert_eq!(side_of_plane(&z0, &p(3, 5, 0)), 0);
        let h = Plane::from_ints(1, 1, 1, -3).unwrap();
        assert_eq!(side_of_plane(&h, &p(1, 1, 1)), 0);
    }

    #[test]
    fn z_order_examples() {
        let z0 = Plane::from_ints(0, 0, 1, 0).unwrap();
        let z1 = Plane::from_ints(0, 0, 1, -1).unwrap();
        let (x, y) = (Scalar::from_int(4), Scalar::from_int(-9));
        assert_eq!(z_order_at(&z0, &z1, &x, &y).unwrap(), -1);
        assert_eq!(z_order_at(&z0, &z0, &x, &y).unwrap(), 0);
        // z = x and z = -x at (2, 0)
        let zx = Plane::from_ints(1, 0, -1, 0).unwrap();
        let zmx = Plane::from_ints(1, 0, 1, 0).unwrap();
        assert_eq!(z_order_at(&zx, &zmx, &Scalar::from_int(2), &Scalar::zero()).unwrap(), 1);
        let vert = Plane::from_ints(1, 0, 0, 0).unwrap();
        assert!(matches!(z_order_at(&vert, &z0, &x, &y), Err(GeomError::VerticalPlane)));
    }

    #[test]
    fn canonical_plane_is_scale_invariant() {
        let h = Plane::new(Scalar::ratio(1, 2), Scalar::ratio(-3, 4), Scalar::from_int(2), Scalar::ratio(5, 6))
            .unwrap();
        for lam in [Scalar::from_int(-3), Scalar::ratio(7, 5), Scalar::ratio(-1, 9)] {
            let g = Plane::new(&h.a * &lam, &h.b * &lam, &h.c * &lam, &h.d * &lam).unwrap();
            assert_eq!(g, h);
        }
        assert!(Plane::from_ints(0, 0, 0, 1).is_err());
    }

    #[test]
    fn halfspace_orientation_survives_canonicalization() {
        // -z + 1 >= 0 means z <= 1: a top facet
        let hs = HalfSpace::new(0.into(), 0.into(), (-1).into(), 1.into(), Side::Ge).unwrap();
        assert_eq!(hs.z_orientation(), 1);
        assert!(hs.contains(&p(0, 0, 1)));
        assert!(hs.contains_strictly(&p(0, 0, 0)));
        assert!(!hs.contains(&p(0, 0, 2)));
    }

    #[test]
    fn three_plane_intersection() {
        let a = Plane::from_ints(1, 0, 0, -1).unwrap();
        let b = Plane::from_ints(0, 1, 0, -2).unwrap();
        let c = Plane::from_ints(1, 1, 1, -6).unwrap();
        assert_eq!(Plane::intersect3(&a, &b, &c), Some(p(1, 2, 3)));
        assert_eq!(Plane::intersect3(&a, &a, &c), None);
    }
}
