use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ConvexPolytope, ThinTriangle};
use crate::error::SceneError;
use crate::exact::{ConvexPolygon, FaceTag, Point2, Point3, Scalar, ZPlane};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetLabel {
    Top,
    Bottom,
}

#[derive(Clone, Debug)]
pub struct FacetClassification {
    /// `(halfspace index, label)` for every halfspace that supports a facet.
    pub labels: Vec<(usize, FacetLabel)>,
    /// Vertices of the silhouette cycle separating top from bottom facets, in order.
    pub silhouette: Vec<Point3>,
}

impl FacetClassification {
    pub fn label(&self, facet: usize) -> Option<FacetLabel> {
        self.labels.iter().find(|(f, _)| *f == facet).map(|&(_, l)| l)
    }
}

/// Labels each facet as top or bottom by the sign of its outward normal's z-component.
pub fn classify_facets(region: usize, p: &ConvexPolytope) -> Result<FacetClassification, SceneError> {
    let mut labels = Vec::new();
    for facet in p.facet_ids() {
        let label = match p.halfspaces()[facet].z_orientation() {
            1 => FacetLabel::Top,
            -1 => FacetLabel::Bottom,
            _ => return Err(SceneError::VerticalFacet { region, facet }),
        };
        labels.push((facet, label));
    }
    let label_of: HashMap<usize, FacetLabel> = labels.iter().copied().collect();
    let poly = p.polyhedron();
    let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
    for (u, v, f, g) in poly.edges() {
        if let (FaceTag::Clip(f), FaceTag::Clip(g)) = (f, g) {
            if label_of[&f] != label_of[&g] {
                next.entry(u).or_default().push(v);
                next.entry(v).or_default().push(u);
            }
        }
    }
    let mut silhouette = Vec::new();
    if let Some(&start) = next.keys().min() {
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            silhouette.push(poly.verts[cur].clone());
            let step = next[&cur].iter().copied().find(|&w| w != prev).expect("silhouette is a cycle");
            prev = cur;
            cur = step;
            if cur == start || silhouette.len() > next.len() {
                break;
            }
        }
    }
    Ok(FacetClassification { labels, silhouette })
}

/// A triangle seen as a degenerate polytope: its upward side is a bottom facet and its
/// downward side a top facet, both on the same plane.
#[derive(Clone, Debug)]
pub struct ThinView {
    pub surface: ZPlane,
    pub projection: ConvexPolygon,
}

pub fn thin_region_view(t: &ThinTriangle) -> ThinView {
    ThinView { surface: t.plane().z_function().expect("triangles are not vertical"), projection: t.projection() }
}

impl ThinView {
    /// Boundary crossings along the vertical line through `q`, bottom to top.
    pub fn crossings(&self, q: &Point2) -> Vec<(Scalar, FacetLabel)> {
        let inside = self.projection.edge_halfplanes().iter().all(|f| f.at(q).is_positive());
        if !inside {
            return Vec::new();
        }
        let z = self.surface.at2(q);
        vec![(z.clone(), FacetLabel::Bottom), (z, FacetLabel::Top)]
    }

    /// Region depth strictly between two crossings: always zero.
    pub fn depth_between(&self, _lo: &Scalar, _hi: &Scalar) -> usize {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{HalfSpace, Side};
    use crate::scene::BBox;

    fn tilted_cube() -> ConvexPolytope {
        let e = Scalar::ratio(1, 16);
        let mk = |a: Scalar, b: Scalar, c: Scalar, d: i64, side| HalfSpace::new(a, b, c, d.into(), side).unwrap();
        let one = Scalar::one;
        let z = Scalar::zero;
        ConvexPolytope::new(vec![
            mk(one(), z(), e.clone(), -1, Side::Ge),
            mk(one(), z(), e.clone(), -3, Side::Le),
            mk(z(), one(), e.clone(), -1, Side::Ge),
            mk(z(), one(), e.clone(), -3, Side::Le),
            mk(e.clone(), z(), one(), -1, Side::Ge),
            mk(z(), e.clone(), one(), -3, Side::Le),
        ])
        .unwrap()
    }

    #[test]
    fn generic_cube_has_three_tops_three_bottoms() {
        let c = classify_facets(0, &tilted_cube()).unwrap();
        assert_eq!(c.labels.len(), 6);
        let tops = c.labels.iter().filter(|(_, l)| *l == FacetLabel::Top).count();
        assert_eq!(tops, 3);
        assert_eq!(c.label(4), Some(FacetLabel::Bottom));
        assert_eq!(c.label(5), Some(FacetLabel::Top));
        assert_eq!(c.label(0), Some(FacetLabel::Bottom));
        assert_eq!(c.label(1), Some(FacetLabel::Top));
        assert_eq!(c.silhouette.len(), 6);
    }

    #[test]
    fn axis_box_has_vertical_facets() {
        let b = BBox::cube(0, 1);
        let p = ConvexPolytope::new(b.halfspaces()).unwrap();
        assert!(matches!(classify_facets(3, &p), Err(SceneError::VerticalFacet { region: 3, facet: 0 })));
    }

    #[test]
    fn thin_view_crossings() {
        let t = ThinTriangle::new([Point3::from_ints(0, 0, 1), Point3::from_ints(4, 0, 1), Point3::from_ints(0, 4, 5)]).unwrap();
        let v = thin_region_view(&t);
        let c = v.crossings(&Point2::new(1.into(), 1.into()));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], (Scalar::from(2), FacetLabel::Bottom));
        assert_eq!(c[1].1, FacetLabel::Top);
        assert!(v.crossings(&Point2::new(3.into(), 3.into())).is_empty());
        assert_eq!(v.depth_between(&0.into(), &10.into()), 0);
    }
}
