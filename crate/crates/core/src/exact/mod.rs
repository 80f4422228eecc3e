//! Exact rational arithmetic, planes and predicates.

pub mod geom;
pub mod planar;
pub mod polyhedron;
mod scalar;

pub use geom::{
    orient2, orient3, side_of_plane, z_order_at, Affine2, HalfSpace, Plane, Point2, Point3, Side, ZPlane,
};
pub use planar::{canonical_trapezoids, ConvexPolygon, Location, Trapezoid, YLine};
pub use polyhedron::{FaceTag, Polyhedron};
pub use scalar::{ParseScalarError, Scalar};

/// Conservative floating-point bounding box, used only to skip exact tests.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Bounds {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Bounds {
    pub fn of_points<'a, I: IntoIterator<Item = &'a Point3>>(pts: I) -> Bounds {
        let mut b = Bounds { lo: [f64::INFINITY; 3], hi: [f64::NEG_INFINITY; 3] };
        for p in pts {
            for (axis, c) in [&p.x, &p.y, &p.z].into_iter().enumerate() {
                b.lo[axis] = b.lo[axis].min(c.f64_below());
                b.hi[axis] = b.hi[axis].max(c.f64_above());
            }
        }
        b
    }

    /// False only if the closed boxes are certainly disjoint.
    pub fn may_touch(&self, o: &Bounds) -> bool {
        (0..3).all(|i| self.lo[i] <= o.hi[i] && o.lo[i] <= self.hi[i])
    }

    pub fn may_contain(&self, p: &[f64; 3]) -> bool {
        (0..3).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }
}
