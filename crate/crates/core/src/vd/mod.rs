//! Prisms of a vertical decomposition and the local operations on them.
//!
//! A prism is a trapezoid in the xy-plane extruded between a floor and a ceiling
//! surface. Surfaces are identified symbolically by [`SurfaceId`] and carried with
//! their explicit `z = a x + b y + c` form so that no scene lookup is needed.

mod approx;
mod cell;
mod obstacle;
mod split;
mod walls;

pub use cell::vd_convex_cell;
pub use obstacle::{Obstacle, ObstacleKind};
pub use split::{interior_footprint, interiors_meet, split_prism, split_prism_if_crossing};
pub use walls::{prisms_share_wall, prisms_stacked, wall_components, wall_pairs};

use serde::{Deserialize, Serialize};

use crate::exact::{Bounds, Location, Point2, Point3, Scalar, Trapezoid, ZPlane};
use crate::scene::BBox;

/// Which surface bounds a prism from below or above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceId {
    BoxBottom,
    BoxTop,
    /// Facet `facet` of region `region`. A thin triangle has facet 0 (its upward side)
    /// and facet 1 (its downward side).
    Facet { region: usize, facet: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "PrismParts", from = "PrismParts")]
pub struct Prism {
    pub base: Trapezoid,
    pub floor: SurfaceId,
    pub ceiling: SurfaceId,
    pub floor_z: ZPlane,
    pub ceiling_z: ZPlane,
    /// Sorted ids of the regions containing the prism.
    pub label: Vec<usize>,
    bounds: Bounds,
    approx: ApproxPrism,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ApproxPrism {
    pub(crate) corners: Vec<[f64; 2]>,
    pub(crate) floor: approx::Line,
    pub(crate) ceiling: approx::Line,
}

impl PartialEq for Prism {
    fn eq(&self, o: &Self) -> bool {
        self.base == o.base && self.floor == o.floor && self.ceiling == o.ceiling && self.label == o.label
    }
}

impl Eq for Prism {}

impl PartialOrd for Prism {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Prism {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (&self.floor, &self.ceiling, &self.label, &self.base).cmp(&(&o.floor, &o.ceiling, &o.label, &o.base))
    }
}

impl std::hash::Hash for Prism {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.base.hash(h);
        self.floor.hash(h);
        self.ceiling.hash(h);
        self.label.hash(h);
    }
}

impl Prism {
    pub fn new(
        base: Trapezoid,
        floor: (SurfaceId, ZPlane),
        ceiling: (SurfaceId, ZPlane),
        label: Vec<usize>,
    ) -> Prism {
        let mut p = Prism {
            base,
            floor: floor.0,
            ceiling: ceiling.0,
            floor_z: floor.1,
            ceiling_z: ceiling.1,
            label,
            bounds: Bounds { lo: [0.0; 3], hi: [0.0; 3] },
            approx: ApproxPrism::default(),
        };
        p.bounds = Bounds::of_points(&p.vertices());
        p.approx = ApproxPrism {
            corners: approx::corners_of(&p.base),
            floor: approx::zplane_of(&p.floor_z),
            ceiling: approx::zplane_of(&p.ceiling_z),
        };
        p
    }

    /// The whole bounding box as a single prism.
    pub fn root(bbox: &BBox) -> Prism {
        Prism::new(
            bbox.rect(),
            (SurfaceId::BoxBottom, ZPlane::horizontal(bbox.lo.z.clone())),
            (SurfaceId::BoxTop, ZPlane::horizontal(bbox.hi.z.clone())),
            Vec::new(),
        )
    }

    /// Same floor, ceiling and label over a different base.
    pub fn with_base(&self, base: Trapezoid) -> Prism {
        Prism::new(
            base,
            (self.floor, self.floor_z.clone()),
            (self.ceiling, self.ceiling_z.clone()),
            self.label.clone(),
        )
    }

    pub fn with_label(&self, label: Vec<usize>) -> Prism {
        let mut p = self.clone();
        p.label = label;
        p
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn is_covered(&self) -> bool {
        !self.label.is_empty()
    }

    /// Bottom corners followed by top corners.
    pub fn vertices(&self) -> Vec<Point3> {
        let corners = self.base.corners();
        let mut out: Vec<Point3> =
            corners.iter().map(|c| Point3::new(c.x.clone(), c.y.clone(), self.floor_z.at2(c))).collect();
        out.extend(corners.iter().map(|c| Point3::new(c.x.clone(), c.y.clone(), self.ceiling_z.at2(c))));
        out
    }

    pub fn volume(&self) -> Scalar {
        let c = self.base.centroid();
        self.base.area() * (self.ceiling_z.at2(&c) - self.floor_z.at2(&c))
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point3) -> bool {
        let q = p.xy();
        self.base.locate(&q) != Location::Outside && self.floor_z.at2(&q) <= p.z && p.z <= self.ceiling_z.at2(&q)
    }

    pub fn contains_strictly(&self, p: &Point3) -> bool {
        let q = p.xy();
        self.base.locate(&q) == Location::Interior && self.floor_z.at2(&q) < p.z && p.z < self.ceiling_z.at2(&q)
    }

    /// A point in the open interior.
    pub fn interior_point(&self) -> Point3 {
        let c: Point2 = self.base.centroid();
        let z = (self.floor_z.at2(&c) + self.ceiling_z.at2(&c)).half();
        Point3::new(c.x, c.y, z)
    }

    /// Label extended by one region id, kept sorted.
    pub fn label_with(&self, region: usize) -> Vec<usize> {
        let mut l = self.label.clone();
        if let Err(i) = l.binary_search(&region) {
            l.insert(i, region);
        }
        l
    }
}

/// Volume of a prism; exact because the height is affine over the base.
pub fn prism_volume(p: &Prism) -> Scalar {
    p.volume()
}

/// Exact classification of a point against the prism's six facet constraints.
pub fn prism_contains(p: &Prism, q: &Point3) -> Location {
    if p.contains_strictly(q) {
        Location::Interior
    } else if p.contains(q) {
        Location::Boundary
    } else {
        Location::Outside
    }
}

/// Surface id as `(-2 | -1 | region, facet)`, a form every serde format can read back.
type PackedSurface = (i64, usize);

fn pack(s: SurfaceId) -> PackedSurface {
    match s {
        SurfaceId::BoxBottom => (-2, 0),
        SurfaceId::BoxTop => (-1, 0),
        SurfaceId::Facet { region, facet } => (region as i64, facet),
    }
}

fn unpack(p: PackedSurface) -> SurfaceId {
    match p.0 {
        -2 => SurfaceId::BoxBottom,
        -1 => SurfaceId::BoxTop,
        r => SurfaceId::Facet { region: r as usize, facet: p.1 },
    }
}

#[derive(Serialize, Deserialize)]
struct PrismParts {
    base: Trapezoid,
    floor: (PackedSurface, ZPlane),
    ceiling: (PackedSurface, ZPlane),
    label: Vec<usize>,
}

impl From<Prism> for PrismParts {
    fn from(p: Prism) -> Self {
        PrismParts {
            base: p.base,
            floor: (pack(p.floor), p.floor_z),
            ceiling: (pack(p.ceiling), p.ceiling_z),
            label: p.label,
        }
    }
}

impl From<PrismParts> for Prism {
    fn from(p: PrismParts) -> Self {
        Prism::new(p.base, (unpack(p.floor.0), p.floor.1), (unpack(p.ceiling.0), p.ceiling.1), p.label)
    }
}

/// Serializable form of a prism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrismRecord {
    pub id: usize,
    pub base: Trapezoid,
    pub floor: SurfaceId,
    pub ceiling: SurfaceId,
    pub floor_z: [Scalar; 3],
    pub ceiling_z: [Scalar; 3],
    pub label: Vec<usize>,
    pub volume: Scalar,
}

impl PrismRecord {
    pub fn new(id: usize, p: &Prism) -> Self {
        let z = |f: &ZPlane| [f.a.clone(), f.b.clone(), f.c.clone()];
        PrismRecord {
            id,
            base: p.base.clone(),
            floor: p.floor,
            ceiling: p.ceiling,
            floor_z: z(&p.floor_z),
            ceiling_z: z(&p.ceiling_z),
            label: p.label.clone(),
            volume: p.volume(),
        }
    }

    /// The prism this record describes; the stored volume is not consulted.
    pub fn to_prism(&self) -> Prism {
        let z = |c: &[Scalar; 3]| ZPlane { a: c[0].clone(), b: c[1].clone(), c: c[2].clone() };
        Prism::new(self.base.clone(), (self.floor, z(&self.floor_z)), (self.ceiling, z(&self.ceiling_z)), self.label.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_prism_volume_and_containment() {
        let b = BBox::cube(0, 4);
        let r = Prism::root(&b);
        assert_eq!(r.volume(), Scalar::from(64));
        assert!(r.contains(&Point3::from_ints(4, 0, 2)));
        assert!(!r.contains_strictly(&Point3::from_ints(4, 0, 2)));
        assert!(r.contains_strictly(&r.interior_point()));
        assert_eq!(r.vertices().len(), 8);
    }

    #[test]
    fn tilted_ceiling_volume() {
        let t = Trapezoid::rect(0.into(), 2.into(), 0.into(), 2.into());
        let p = Prism::new(
            t,
            (SurfaceId::BoxBottom, ZPlane::horizontal(0.into())),
            (SurfaceId::Facet { region: 0, facet: 1 }, ZPlane { a: 1.into(), b: 0.into(), c: 1.into() }),
            vec![],
        );
        assert_eq!(p.volume(), Scalar::from(8));
        assert_eq!(p.label_with(3), vec![3]);
    }
}
