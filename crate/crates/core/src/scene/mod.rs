//! Scenes: a bounding box plus a list of convex polytopes or thin triangles.

mod facets;
mod gen;
mod io;

pub use facets::{classify_facets, thin_region_view, FacetClassification, FacetLabel, ThinView};
pub use gen::{gen_scene, GenParams, SceneKind};
pub use io::DEFAULT_MAX_FACETS;

use crate::error::SceneError;
use crate::exact::{Bounds, ConvexPolygon, FaceTag, HalfSpace, Plane, Point3, Polyhedron, orient2, Scalar, Side, Trapezoid};

/// Axis-parallel closed box `lo <= p <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BBox {
    pub lo: Point3,
    pub hi: Point3,
}

impl BBox {
    pub fn new(lo: Point3, hi: Point3) -> Result<Self, SceneError> {
        if (0..3).any(|i| lo.coord(i) >= hi.coord(i)) {
            return Err(SceneError::Invariant("bounding box must have lo < hi on every axis".into()));
        }
        Ok(BBox { lo, hi })
    }

    pub fn cube(lo: i64, hi: i64) -> Self {
        BBox::new(Point3::from_ints(lo, lo, lo), Point3::from_ints(hi, hi, hi)).expect("lo < hi")
    }

    pub fn volume(&self) -> Scalar {
        (&self.hi.x - &self.lo.x) * (&self.hi.y - &self.lo.y) * (&self.hi.z - &self.lo.z)
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| self.lo.coord(i) <= p.coord(i) && p.coord(i) <= self.hi.coord(i))
    }

    pub fn contains_strictly(&self, p: &Point3) -> bool {
        (0..3).all(|i| self.lo.coord(i) < p.coord(i) && p.coord(i) < self.hi.coord(i))
    }

    pub fn on_boundary(&self, p: &Point3) -> bool {
        self.contains(p) && !self.contains_strictly(p)
    }

    /// The six bounding planes in canonical form, ordered x-, x+, y-, y+, z-, z+.
    pub fn planes(&self) -> [Plane; 6] {
        let f = |axis: usize, v: &Scalar| {
            let mut n = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
            n[axis] = Scalar::one();
            let [a, b, c] = n;
            Plane::new(a, b, c, -v).expect("axis plane")
        };
        [
            f(0, &self.lo.x),
            f(0, &self.hi.x),
            f(1, &self.lo.y),
            f(1, &self.hi.y),
            f(2, &self.lo.z),
            f(2, &self.hi.z),
        ]
    }

    /// Halfspaces whose intersection is the box.
    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        self.planes()
            .into_iter()
            .enumerate()
            .map(|(i, plane)| HalfSpace { plane, side: if i % 2 == 0 { Side::Ge } else { Side::Le } })
            .collect()
    }

    pub fn is_bbox_plane(&self, p: &Plane) -> bool {
        self.planes().iter().any(|q| q == p)
    }

    pub fn rect(&self) -> Trapezoid {
        Trapezoid::rect(self.lo.x.clone(), self.hi.x.clone(), self.lo.y.clone(), self.hi.y.clone())
    }

    pub fn polyhedron(&self) -> Polyhedron {
        Polyhedron::from_box(&self.lo, &self.hi)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::of_points([&self.lo, &self.hi])
    }

    pub fn center(&self) -> Point3 {
        self.lo.lerp(&self.hi, &Scalar::ratio(1, 2))
    }
}

/// Bounded convex polytope given as an intersection of closed halfspaces.
#[derive(Clone, Debug)]
pub struct ConvexPolytope {
    halfspaces: Vec<HalfSpace>,
    poly: Polyhedron,
}

impl PartialEq for ConvexPolytope {
    fn eq(&self, o: &Self) -> bool {
        self.halfspaces == o.halfspaces
    }
}

impl ConvexPolytope {
    /// Builds the polytope; fails if it is empty, flat or unbounded.
    pub fn new(halfspaces: Vec<HalfSpace>) -> Result<Self, SceneError> {
        let mut lo: Option<Point3> = None;
        let mut hi: Option<Point3> = None;
        let m = halfspaces.len();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let Some(p) =
                        Plane::intersect3(&halfspaces[i].plane, &halfspaces[j].plane, &halfspaces[k].plane)
                    else {
                        continue;
                    };
                    if !halfspaces.iter().all(|h| h.contains(&p)) {
                        continue;
                    }
                    lo = Some(match lo {
                        None => p.clone(),
                        Some(l) => Point3::new(l.x.min(p.x.clone()), l.y.min(p.y.clone()), l.z.min(p.z.clone())),
                    });
                    hi = Some(match hi {
                        None => p,
                        Some(h) => Point3::new(h.x.max(p.x), h.y.max(p.y), h.z.max(p.z)),
                    });
                }
            }
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => Self::bounded_by(halfspaces, &lo, &hi),
            _ => Err(SceneError::Invariant("halfspaces define no bounded polytope".into())),
        }
    }

    /// Builds the polytope knowing it must lie in the closed box `[lo, hi]`.
    pub fn bounded_by(halfspaces: Vec<HalfSpace>, lo: &Point3, hi: &Point3) -> Result<Self, SceneError> {
        let one = Scalar::one();
        let elo = Point3::new(&lo.x - &one, &lo.y - &one, &lo.z - &one);
        let ehi = Point3::new(&hi.x + &one, &hi.y + &one, &hi.z + &one);
        let mut poly = Polyhedron::from_box(&elo, &ehi);
        for (i, h) in halfspaces.iter().enumerate() {
            poly = poly.clip(h, i);
            if poly.is_empty() {
                return Err(SceneError::Invariant("polytope is empty or has zero volume".into()));
            }
        }
        if poly.faces.iter().any(|f| matches!(f.tag, FaceTag::Box(_))) {
            return Err(SceneError::Invariant("polytope is unbounded or leaves its bounding box".into()));
        }
        Ok(ConvexPolytope { halfspaces, poly: poly.compacted() })
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn polyhedron(&self) -> &Polyhedron {
        &self.poly
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.poly.verts
    }

    /// Indices of the halfspaces that support a two-dimensional facet.
    pub fn facet_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .poly
            .faces
            .iter()
            .filter_map(|f| match f.tag {
                FaceTag::Clip(i) => Some(i),
                FaceTag::Box(_) => None,
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn facet_vertices(&self, id: usize) -> Vec<Point3> {
        self.poly
            .face(FaceTag::Clip(id))
            .map(|f| f.cycle.iter().map(|&v| self.poly.verts[v].clone()).collect())
            .unwrap_or_default()
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }

    pub fn contains_strictly(&self, p: &Point3) -> bool {
        self.halfspaces.iter().all(|h| h.contains_strictly(p))
    }

    pub fn volume(&self) -> Scalar {
        self.poly.volume()
    }
}

/// Non-vertical, non-degenerate triangle; it has no interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinTriangle {
    vertices: [Point3; 3],
    plane: Plane,
}

impl ThinTriangle {
    pub fn new(vertices: [Point3; 3]) -> Result<Self, SceneError> {
        let plane = Plane::through(&vertices[0], &vertices[1], &vertices[2])
            .map_err(|_| SceneError::Invariant("triangle vertices are collinear".into()))?;
        if plane.is_vertical() {
            return Err(SceneError::Invariant("triangle is vertical".into()));
        }
        Ok(ThinTriangle { vertices, plane })
    }

    pub fn vertices(&self) -> &[Point3; 3] {
        &self.vertices
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    /// Counter-clockwise projection onto the xy-plane.
    pub fn projection(&self) -> ConvexPolygon {
        let mut pts: Vec<_> = self.vertices.iter().map(|v| v.xy()).collect();
        if orient2(&pts[0], &pts[1], &pts[2]) < 0 {
            pts.reverse();
        }
        ConvexPolygon::new(pts)
    }

    /// Closed containment of a point in the triangle.
    pub fn contains(&self, p: &Point3) -> bool {
        self.plane.eval(p).is_zero()
            && self.projection().edge_halfplanes().iter().all(|f| !f.at(&p.xy()).is_negative())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Polytope(ConvexPolytope),
    Triangle(ThinTriangle),
}

impl Region {
    pub fn is_thin(&self) -> bool {
        matches!(self, Region::Triangle(_))
    }

    pub fn vertices(&self) -> &[Point3] {
        match self {
            Region::Polytope(p) => p.vertices(),
            Region::Triangle(t) => t.vertices(),
        }
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::of_points(self.vertices())
    }

    /// True iff `p` lies in the open interior; always false for triangles.
    pub fn contains_strictly(&self, p: &Point3) -> bool {
        match self {
            Region::Polytope(q) => q.contains_strictly(p),
            Region::Triangle(_) => false,
        }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        match self {
            Region::Polytope(q) => q.contains(p),
            Region::Triangle(t) => t.contains(p),
        }
    }

    pub fn volume(&self) -> Scalar {
        match self {
            Region::Polytope(q) => q.volume(),
            Region::Triangle(_) => Scalar::zero(),
        }
    }

    pub fn as_polytope(&self) -> Option<&ConvexPolytope> {
        match self {
            Region::Polytope(p) => Some(p),
            Region::Triangle(_) => None,
        }
    }
}

/// A validated input scene. Region ids are their indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub bbox: BBox,
    pub regions: Vec<Region>,
}

impl Scene {
    /// Validates every region against the box and the facet limit.
    pub fn new(bbox: BBox, regions: Vec<Region>, max_facets: usize) -> Result<Self, SceneError> {
        for (id, r) in regions.iter().enumerate() {
            if let Region::Polytope(p) = r {
                if p.halfspaces().len() > max_facets {
                    return Err(SceneError::Invariant(format!(
                        "region {id} has {} halfspaces (limit {max_facets})",
                        p.halfspaces().len()
                    )));
                }
            }
            if let Some(v) = r.vertices().iter().find(|v| !bbox.contains(v)) {
                return Err(SceneError::Invariant(format!("region {id} has vertex {v:?} outside the bounding box")));
            }
        }
        Ok(Scene { bbox, regions })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn is_all_polytopes(&self) -> bool {
        self.regions.iter().all(|r| !r.is_thin())
    }

    pub fn is_all_triangles(&self) -> bool {
        self.regions.iter().all(|r| r.is_thin())
    }

    /// Sub-scene with the listed regions, renumbered in the given order.
    pub fn subset(&self, ids: &[usize]) -> Scene {
        Scene { bbox: self.bbox.clone(), regions: ids.iter().map(|&i| self.regions[i].clone()).collect() }
    }
}

/// Builds a polytope region bounded by the scene box.
pub fn polytope_in(bbox: &BBox, halfspaces: Vec<HalfSpace>) -> Result<Region, SceneError> {
    Ok(Region::Polytope(ConvexPolytope::bounded_by(halfspaces, &bbox.lo, &bbox.hi)?))
}

/// Axis-parallel box region `[lo, hi]` (degenerate for the vertical decomposition; perturb it first).
pub fn axis_box(lo: &Point3, hi: &Point3) -> Result<ConvexPolytope, SceneError> {
    let b = BBox::new(lo.clone(), hi.clone())?;
    ConvexPolytope::bounded_by(b.halfspaces(), lo, hi)
}
