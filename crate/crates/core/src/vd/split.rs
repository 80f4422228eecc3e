use crate::error::VdError;
use crate::exact::{canonical_trapezoids, planar::trapezoid_minus_convex, Affine2, ConvexPolygon, Trapezoid, ZPlane};

use super::approx;
use super::obstacle::{Obstacle, ObstacleKind};
use super::{Prism, SurfaceId};

/// Keeps `f > 0`: a constant function either keeps everything or nothing.
fn clip_strict(k: ConvexPolygon, f: &Affine2) -> Option<ConvexPolygon> {
    if f.is_constant() {
        return f.c.is_positive().then_some(k);
    }
    let k = k.clip(f);
    (!k.is_empty()).then_some(k)
}

/// Closed xy-footprint of the intersection of the open prism with the open region,
/// or `None` if the two interiors are disjoint. For a thin region the footprint
/// covers the part of the triangle strictly between floor and ceiling.
pub fn interior_footprint(p: &Prism, o: &Obstacle) -> Option<ConvexPolygon> {
    if !p.bounds().may_touch(&o.bounds) || filter(p, o) == Some(false) {
        return None;
    }
    let mut k = p.base.to_polygon().clip_all(&o.projection().edge_halfplanes());
    if k.is_empty() {
        return None;
    }
    match &o.kind {
        ObstacleKind::Solid { bottoms, tops, .. } => {
            for (_, l) in bottoms {
                k = clip_strict(k, &p.ceiling_z.minus(l))?;
            }
            for (_, u) in tops {
                k = clip_strict(k, &u.minus(&p.floor_z))?;
            }
        }
        ObstacleKind::Thin { surface, .. } => {
            k = clip_strict(k, &surface.minus(&p.floor_z))?;
            k = clip_strict(k, &p.ceiling_z.minus(surface))?;
        }
    }
    Some(k)
}

fn filter(p: &Prism, o: &Obstacle) -> Option<bool> {
    let mut cons = o.approx.edges.clone();
    cons.extend(o.approx.lows.iter().map(|l| approx::minus(&p.approx.ceiling, l)));
    cons.extend(o.approx.highs.iter().map(|u| approx::minus(u, &p.approx.floor)));
    approx::decide(&p.approx.corners, &cons)
}

/// True iff the open prism and the open region (the relative interior of a triangle) intersect.
pub fn interiors_meet(p: &Prism, o: &Obstacle) -> bool {
    if !p.bounds().may_touch(&o.bounds) {
        return false;
    }
    match filter(p, o) {
        Some(answer) => answer,
        None => interior_footprint(p, o).is_some(),
    }
}

/// Candidate bounding surface for a sub-cell: the prism's own floor/ceiling or a facet.
type Bound = ((SurfaceId, ZPlane), usize);

/// Part of `k` where `candidates[pick]` is the maximum (or minimum when `lowest` is set);
/// exact ties go to the earlier candidate.
fn dominance_cell(k: &ConvexPolygon, candidates: &[Bound], pick: usize, lowest: bool) -> ConvexPolygon {
    let me = &candidates[pick].0 .1;
    let mut cell = k.clone();
    for (idx, ((_, other), _)) in candidates.iter().enumerate() {
        if idx == pick {
            continue;
        }
        let f = if lowest { other.minus(me) } else { me.minus(other) };
        if f.is_constant() && f.c.is_zero() {
            if idx < pick {
                return ConvexPolygon::new(Vec::new());
            }
            continue;
        }
        cell = cell.clip(&f);
        if cell.is_empty() {
            return cell;
        }
    }
    cell
}

fn intersect(a: &ConvexPolygon, b: &ConvexPolygon) -> ConvexPolygon {
    if a.is_empty() || b.is_empty() {
        return ConvexPolygon::new(Vec::new());
    }
    a.clip_all(&b.edge_halfplanes())
}

fn extrude(out: &mut Vec<Prism>, bases: Vec<Trapezoid>, floor: &(SurfaceId, ZPlane), ceiling: &(SurfaceId, ZPlane), label: &[usize]) {
    out.extend(bases.into_iter().map(|t| Prism::new(t, floor.clone(), ceiling.clone(), label.to_vec())));
}

/// Splits `p` by region `o`, or returns `None` if their interiors are disjoint.
///
/// The part of the base outside the footprint keeps the old floor and ceiling. Over the
/// footprint the vertical extent is cut at the region's lower and upper surfaces; each
/// piece is further divided by which facet realizes those surfaces, so every resulting
/// prism has a single floor and ceiling. Pieces inside the region get its id added to
/// their label. Every group of pieces is canonically trapezoidated.
pub fn split_prism_if_crossing(p: &Prism, o: &Obstacle) -> Option<Vec<Prism>> {
    let k = interior_footprint(p, o)?;
    let floor = (p.floor, p.floor_z.clone());
    let ceiling = (p.ceiling, p.ceiling_z.clone());
    let mut out = Vec::new();
    match &o.kind {
        ObstacleKind::Solid { bottoms, tops, .. } => {
            if p.vertices().iter().all(|v| o.contains(v)) {
                return Some(vec![p.with_label(p.label_with(o.id))]);
            }
            extrude(&mut out, trapezoid_minus_convex(&p.base, &k), &floor, &ceiling, &p.label);

            let mut lows: Vec<Bound> = vec![(floor.clone(), usize::MAX)];
            lows.extend(bottoms.iter().map(|(f, z)| ((SurfaceId::Facet { region: o.id, facet: *f }, z.clone()), *f)));
            let mut highs: Vec<Bound> = vec![(ceiling.clone(), usize::MAX)];
            highs.extend(tops.iter().map(|(f, z)| ((SurfaceId::Facet { region: o.id, facet: *f }, z.clone()), *f)));

            let lower_cells: Vec<ConvexPolygon> = (0..lows.len()).map(|i| dominance_cell(&k, &lows, i, false)).collect();
            let upper_cells: Vec<ConvexPolygon> = (0..highs.len()).map(|j| dominance_cell(&k, &highs, j, true)).collect();

            // below the region: between the floor and a bottom facet that rises above it
            for (i, (surface, _)) in lows.iter().enumerate().skip(1) {
                extrude(&mut out, lower_cells[i].trapezoids(), &floor, surface, &p.label);
            }
            // above the region
            for (j, (surface, _)) in highs.iter().enumerate().skip(1) {
                extrude(&mut out, upper_cells[j].trapezoids(), surface, &ceiling, &p.label);
            }
            // inside the region
            let inside = p.label_with(o.id);
            for (i, (lo, _)) in lows.iter().enumerate() {
                for (j, (hi, _)) in highs.iter().enumerate() {
                    let cell = intersect(&lower_cells[i], &upper_cells[j]);
                    extrude(&mut out, cell.trapezoids(), lo, hi, &inside);
                }
            }
        }
        ObstacleKind::Thin { surface, .. } => {
            extrude(&mut out, trapezoid_minus_convex(&p.base, &k), &floor, &ceiling, &p.label);
            let pieces = canonical_trapezoids(k.trapezoids());
            let down = (SurfaceId::Facet { region: o.id, facet: 1 }, surface.clone());
            let up = (SurfaceId::Facet { region: o.id, facet: 0 }, surface.clone());
            extrude(&mut out, pieces.clone(), &floor, &down, &p.label);
            extrude(&mut out, pieces, &up, &ceiling, &p.label);
        }
    }
    Some(out)
}

/// Like [`split_prism_if_crossing`], but a region that does not cross the prism interior is an error.
pub fn split_prism(p: &Prism, o: &Obstacle) -> Result<Vec<Prism>, VdError> {
    split_prism_if_crossing(p, o).ok_or(VdError::NoCrossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Point3, Scalar};
    use crate::scene::{axis_box, BBox, Region, ThinTriangle};

    fn total_volume(ps: &[Prism]) -> Scalar {
        ps.iter().map(|p| p.volume()).sum()
    }

    #[test]
    fn box_in_the_middle_of_a_cube() {
        let b = BBox::cube(0, 8);
        let region = Region::Polytope(axis_box(&Point3::from_ints(2, 2, 2), &Point3::from_ints(5, 6, 4)).unwrap());
        let o = Obstacle::from_region(0, &region).unwrap();
        let root = Prism::root(&b);
        let pieces = split_prism(&root, &o).unwrap();
        assert_eq!(total_volume(&pieces), Scalar::from(512));
        let inside: Vec<&Prism> = pieces.iter().filter(|p| p.is_covered()).collect();
        assert_eq!(inside.len(), 1);
        assert_eq!(inside[0].volume(), Scalar::from(24));
        // four trapezoids around the hole, one below and one above it
        assert_eq!(pieces.len(), 7);
    }

    #[test]
    fn disjoint_and_contained() {
        let b = BBox::cube(0, 8);
        let region = Region::Polytope(axis_box(&Point3::from_ints(0, 0, 0), &Point3::from_ints(8, 8, 8)).unwrap());
        let o = Obstacle::from_region(4, &region).unwrap();
        let out = split_prism(&Prism::root(&b), &o).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].label, vec![4]);
        let small = Prism::root(&BBox::cube(0, 1));
        let far = Region::Polytope(axis_box(&Point3::from_ints(1, 1, 1), &Point3::from_ints(3, 3, 3)).unwrap());
        assert!(matches!(split_prism(&small, &Obstacle::from_region(0, &far).unwrap()), Err(VdError::NoCrossing)));
    }

    #[test]
    fn triangle_splits_without_covering() {
        let b = BBox::cube(0, 8);
        let t = ThinTriangle::new([Point3::from_ints(1, 1, 2), Point3::from_ints(6, 1, 3), Point3::from_ints(1, 6, 5)]).unwrap();
        let o = Obstacle::from_region(2, &Region::Triangle(t)).unwrap();
        let pieces = split_prism(&Prism::root(&b), &o).unwrap();
        assert_eq!(total_volume(&pieces), Scalar::from(512));
        assert!(pieces.iter().all(|p| !p.is_covered()));
        assert!(pieces.iter().any(|p| p.ceiling == SurfaceId::Facet { region: 2, facet: 1 }));
        assert!(pieces.iter().any(|p| p.floor == SurfaceId::Facet { region: 2, facet: 0 }));
    }
}
