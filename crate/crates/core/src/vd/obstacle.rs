use crate::error::VdError;
use crate::exact::{Affine2, Bounds, ConvexPolygon, HalfSpace, Point3, ZPlane};
use crate::scene::{ConvexPolytope, Region};

use super::approx::{line_of, zplane_of, Line};
use super::SurfaceId;

/// A region prepared for decomposition: its lower and upper boundary surfaces as
/// functions over its xy-projection.
#[derive(Clone, Debug)]
pub struct Obstacle {
    pub id: usize,
    pub bounds: Bounds,
    pub kind: ObstacleKind,
    pub(crate) approx: ApproxObstacle,
}

/// `f64` copies of the projection edges and the boundary surfaces.
#[derive(Clone, Debug, Default)]
pub(crate) struct ApproxObstacle {
    pub(crate) edges: Vec<Line>,
    pub(crate) lows: Vec<Line>,
    pub(crate) highs: Vec<Line>,
}

impl ApproxObstacle {
    fn of(kind: &ObstacleKind) -> ApproxObstacle {
        let (projection, lows, highs): (&ConvexPolygon, Vec<&ZPlane>, Vec<&ZPlane>) = match kind {
            ObstacleKind::Solid { bottoms, tops, projection, .. } => {
                (projection, bottoms.iter().map(|b| &b.1).collect(), tops.iter().map(|t| &t.1).collect())
            }
            ObstacleKind::Thin { surface, projection, .. } => (projection, vec![surface], vec![surface]),
        };
        ApproxObstacle {
            edges: projection.edge_halfplanes().iter().map(line_of).collect(),
            lows: lows.into_iter().map(zplane_of).collect(),
            highs: highs.into_iter().map(zplane_of).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum ObstacleKind {
    Solid {
        /// Bottom facets `(facet index, z-function)`; the lower surface is their maximum.
        bottoms: Vec<(usize, ZPlane)>,
        /// Top facets; the upper surface is their minimum.
        tops: Vec<(usize, ZPlane)>,
        /// Closed xy-projection.
        projection: ConvexPolygon,
        halfspaces: Vec<HalfSpace>,
    },
    Thin { surface: ZPlane, projection: ConvexPolygon, vertices: [Point3; 3] },
}

impl Obstacle {
    pub fn from_region(id: usize, region: &Region) -> Result<Obstacle, VdError> {
        let bounds = region.bounds();
        let kind = match region {
            Region::Polytope(p) => solid(p)?,
            Region::Triangle(t) => ObstacleKind::Thin {
                surface: t.plane().z_function()?,
                projection: t.projection(),
                vertices: t.vertices().clone(),
            },
        };
        let approx = ApproxObstacle::of(&kind);
        Ok(Obstacle { id, bounds, kind, approx })
    }

    /// Polytope from explicit halfspaces (used for envelope cells); `id` names its facets.
    pub fn from_polytope(id: usize, p: &ConvexPolytope) -> Result<Obstacle, VdError> {
        let kind = solid(p)?;
        let approx = ApproxObstacle::of(&kind);
        Ok(Obstacle { id, bounds: Bounds::of_points(p.vertices()), kind, approx })
    }

    pub fn projection(&self) -> &ConvexPolygon {
        match &self.kind {
            ObstacleKind::Solid { projection, .. } | ObstacleKind::Thin { projection, .. } => projection,
        }
    }

    pub fn surface(&self, facet: usize) -> ZPlane {
        match &self.kind {
            ObstacleKind::Solid { bottoms, tops, .. } => bottoms
                .iter()
                .chain(tops.iter())
                .find(|(f, _)| *f == facet)
                .map(|(_, z)| z.clone())
                .expect("facet is a top or bottom facet"),
            ObstacleKind::Thin { surface, .. } => surface.clone(),
        }
    }

    pub fn surface_id(&self, facet: usize) -> (SurfaceId, ZPlane) {
        (SurfaceId::Facet { region: self.id, facet }, self.surface(facet))
    }

    /// Closed containment; thin obstacles contain only their own points.
    pub fn contains(&self, p: &Point3) -> bool {
        match &self.kind {
            ObstacleKind::Solid { halfspaces, .. } => halfspaces.iter().all(|h| h.contains(p)),
            ObstacleKind::Thin { surface, projection, .. } => {
                surface.at2(&p.xy()) == p.z && projection.edge_halfplanes().iter().all(|f| !f.at(&p.xy()).is_negative())
            }
        }
    }

    pub fn contains_strictly(&self, p: &Point3) -> bool {
        match &self.kind {
            ObstacleKind::Solid { halfspaces, .. } => halfspaces.iter().all(|h| h.contains_strictly(p)),
            ObstacleKind::Thin { .. } => false,
        }
    }
}

fn solid(p: &ConvexPolytope) -> Result<ObstacleKind, VdError> {
    let mut bottoms = Vec::new();
    let mut tops = Vec::new();
    let mut walls: Vec<Affine2> = Vec::new();
    for f in p.facet_ids() {
        let h = &p.halfspaces()[f];
        match h.z_orientation() {
            1 => tops.push((f, h.plane.z_function()?)),
            -1 => bottoms.push((f, h.plane.z_function()?)),
            _ => {
                let [a, b, _, d] = h.le_coeffs();
                walls.push(Affine2::new(-a, -b, -d));
            }
        }
    }
    let v = p.vertices();
    let min = |axis: usize| v.iter().map(|q| q.coord(axis).clone()).min().expect("nonempty");
    let max = |axis: usize| v.iter().map(|q| q.coord(axis).clone()).max().expect("nonempty");
    let mut projection = ConvexPolygon::rect(&min(0), &max(0), &min(1), &max(1)).clip_all(&walls);
    for (_, l) in &bottoms {
        for (_, u) in &tops {
            projection = projection.clip(&u.minus(l));
        }
    }
    if projection.is_empty() {
        return Err(VdError::DegenerateCell("polytope projects to a set of zero area".into()));
    }
    Ok(ObstacleKind::Solid { bottoms, tops, projection, halfspaces: p.halfspaces().to_vec() })
}

