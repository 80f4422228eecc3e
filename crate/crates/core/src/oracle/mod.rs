//! Brute-force reference computations, independent of the decomposition code:
//! inclusion–exclusion volumes, prism checks by exact clipping in the plane, feature and
//! visibility counts, and linear-scan point enclosure.

mod features;
mod visibility;

pub use features::{complement_features, features_at_depth, FeatureCounts, FEATURE_LIMIT};
pub use visibility::{count_visibilities, VisibilityCount};

use crate::error::OracleError;
use crate::exact::{Bounds, ConvexPolygon, HalfSpace, Plane, Point3, Polyhedron, Scalar, Side, ZPlane};
use crate::scene::{ConvexPolytope, Region, Scene, ThinTriangle};

use rayon::prelude::*;
use crate::vd::Prism;

/// Largest number of nonempty intersection terms [`union_volume_ie`] will evaluate.
pub const IE_TERM_BUDGET: usize = 1 << 21;

/// Exact volume of the union of the regions (clipped to the box) by inclusion–exclusion.
/// Empty partial intersections prune all their supersets.
pub fn union_volume_ie(scene: &Scene) -> Result<Scalar, OracleError> {
    let solids: Vec<&[HalfSpace]> =
        scene.regions.iter().filter_map(|r| r.as_polytope()).map(|p| p.halfspaces()).collect();
    let bounds: Vec<_> = scene.regions.iter().filter(|r| !r.is_thin()).map(|r| r.bounds()).collect();
    let mut total = Scalar::zero();
    let mut terms = 0usize;
    let start = scene.bbox.polyhedron();
    fn rec(
        solids: &[&[HalfSpace]],
        bounds: &[crate::exact::Bounds],
        from: usize,
        chosen: &mut Vec<usize>,
        current: &Polyhedron,
        total: &mut Scalar,
        terms: &mut usize,
    ) -> Result<(), OracleError> {
        for j in from..solids.len() {
            if chosen.iter().any(|&c| !bounds[c].may_touch(&bounds[j])) {
                continue;
            }
            let next = current.clip_all(solids[j].iter());
            if next.is_empty() {
                continue;
            }
            *terms += 1;
            if *terms > IE_TERM_BUDGET {
                return Err(OracleError::TooManyTerms(IE_TERM_BUDGET));
            }
            let v = next.volume();
            if chosen.len().is_multiple_of(2) {
                *total += v;
            } else {
                *total -= &v;
            }
            chosen.push(j);
            rec(solids, bounds, j + 1, chosen, &next, total, terms)?;
            chosen.pop();
        }
        Ok(())
    }
    rec(&solids, &bounds, 0, &mut Vec::new(), &start, &mut total, &mut terms)?;
    Ok(total)
}

pub fn complement_volume(scene: &Scene) -> Result<Scalar, OracleError> {
    Ok(scene.bbox.volume() - union_volume_ie(scene)?)
}

/// Regions whose interior strictly contains `q`, by linear scan.
/// Vertices of the arrangement of a triangle scene: the triangle corners, every proper
/// crossing of a triangle edge with another triangle, and every point common to three
/// triangles. Works at any size in `O(n^3)`.
pub fn triangle_arrangement_vertices(scene: &Scene) -> Result<usize, OracleError> {
    let tris: Vec<&ThinTriangle> = scene
        .regions
        .iter()
        .map(|r| match r {
            Region::Triangle(t) => Ok(t),
            Region::Polytope(_) => Err(OracleError::Unsupported("scene has solid regions".into())),
        })
        .collect::<Result<_, _>>()?;
    let bounds: Vec<Bounds> = scene.regions.iter().map(Region::bounds).collect();
    let n = tris.len();
    let near: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| j != i && bounds[i].may_touch(&bounds[j])).collect()).collect();
    let crossings: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            let v = tris[i].vertices();
            near[i]
                .iter()
                .map(|&j| {
                    let h = tris[j].plane();
                    (0..3)
                        .filter(|&e| {
                            let (a, b) = (&v[e], &v[(e + 1) % 3]);
                            let (sa, sb) = (h.eval(a), h.eval(b));
                            if sa.is_zero() || sb.is_zero() || sa.is_positive() == sb.is_positive() {
                                return false;
                            }
                            let t = &sa / &(&sa - &sb);
                            tris[j].contains(&a.lerp(b, &t))
                        })
                        .count()
                })
                .sum::<usize>()
        })
        .sum();
    let triples: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut c = 0;
            for &j in near[i].iter().filter(|&&j| j > i) {
                for &k in near[j].iter().filter(|&&k| k > j && bounds[i].may_touch(&bounds[k])) {
                    let Some(p) = Plane::intersect3(tris[i].plane(), tris[j].plane(), tris[k].plane()) else { continue };
                    if [i, j, k].iter().all(|&t| tris[t].contains(&p)) {
                        c += 1;
                    }
                }
            }
            c
        })
        .sum();
    Ok(3 * n + crossings + triples)
}

pub fn enclosing_regions(scene: &Scene, q: &Point3) -> Vec<usize> {
    scene.regions.iter().enumerate().filter(|(_, r)| r.contains_strictly(q)).map(|(i, _)| i).collect()
}

pub fn depth(scene: &Scene, q: &Point3) -> usize {
    enclosing_regions(scene, q).len()
}

/// The six halfspaces bounding a prism.
pub fn prism_halfspaces(p: &Prism) -> Vec<HalfSpace> {
    let t = &p.base;
    let s = |a: Scalar, b: Scalar, c: Scalar, d: Scalar, side| HalfSpace::new(a, b, c, d, side).expect("nonzero normal");
    let (z, one) = (Scalar::zero, Scalar::one);
    vec![
        s(one(), z(), z(), -&t.x1, Side::Ge),
        s(one(), z(), z(), -&t.x2, Side::Le),
        s(-&t.lo.m, one(), z(), -&t.lo.k, Side::Ge),
        s(-&t.hi.m, one(), z(), -&t.hi.k, Side::Le),
        s(-&p.floor_z.a, -&p.floor_z.b, one(), -&p.floor_z.c, Side::Ge),
        s(-&p.ceiling_z.a, -&p.ceiling_z.b, one(), -&p.ceiling_z.c, Side::Le),
    ]
}

/// The prism as an explicit polyhedron.
pub fn prism_polyhedron(p: &Prism) -> Polyhedron {
    let v = p.vertices();
    let lo = Point3::new(
        v.iter().map(|q| q.x.clone()).min().unwrap(),
        v.iter().map(|q| q.y.clone()).min().unwrap(),
        v.iter().map(|q| q.z.clone()).min().unwrap(),
    );
    let hi = Point3::new(
        v.iter().map(|q| q.x.clone()).max().unwrap(),
        v.iter().map(|q| q.y.clone()).max().unwrap(),
        v.iter().map(|q| q.z.clone()).max().unwrap(),
    );
    if (0..3).any(|i| lo.coord(i) >= hi.coord(i)) {
        return Polyhedron::empty();
    }
    Polyhedron::from_box(&lo, &hi).clip_all(prism_halfspaces(p).iter())
}

/// Volume of the intersection of two prisms.
pub fn prism_intersection_volume(a: &Prism, b: &Prism) -> Scalar {
    if !a.bounds().may_touch(b.bounds()) {
        return Scalar::zero();
    }
    if !prisms_overlap(a, b) {
        return Scalar::zero();
    }
    prism_polyhedron(a).clip_all(prism_halfspaces(b).iter()).volume()
}

/// True iff the open prisms share a point, decided in the plane: the bases must overlap and
/// somewhere over the common base each ceiling must lie strictly above the other floor.
pub fn prisms_overlap(a: &Prism, b: &Prism) -> bool {
    if !a.bounds().may_touch(b.bounds()) || !a.base.overlaps(&b.base) {
        return false;
    }
    let common = a.base.to_polygon().clip_all(b.base.to_polygon().edge_halfplanes().iter());
    positive_somewhere(common, [b.floor_z.clone(), a.floor_z.clone()].iter(), [a.ceiling_z.clone(), b.ceiling_z.clone()].iter())
}

/// True iff some interior point of `base` has every top strictly above every bottom.
fn positive_somewhere<'a>(
    mut base: ConvexPolygon,
    bottoms: impl Iterator<Item = &'a ZPlane> + Clone,
    tops: impl Iterator<Item = &'a ZPlane>,
) -> bool {
    for top in tops {
        for bottom in bottoms.clone() {
            let gap = top.minus(bottom);
            if gap.a.is_zero() && gap.b.is_zero() {
                if !gap.c.is_positive() {
                    return false;
                }
                continue;
            }
            base = base.clip(&gap);
            if base.is_empty() {
                return false;
            }
        }
    }
    !base.is_empty()
}

/// Floating-point test that some facet plane of `q` leaves all prism corners well outside.
fn clearly_separated(p: &Prism, q: &ConvexPolytope) -> bool {
    const MARGIN: f64 = 1e-9;
    let t = &p.base;
    let mut corners = Vec::with_capacity(8);
    for x in [&t.x1, &t.x2] {
        let xf = x.to_f64();
        for line in [&t.lo, &t.hi] {
            let y = line.m.to_f64() * xf + line.k.to_f64();
            for z in [&p.floor_z, &p.ceiling_z] {
                corners.push([xf, y, z.a.to_f64() * xf + z.b.to_f64() * y + z.c.to_f64()]);
            }
        }
    }
    q.halfspaces().iter().any(|h| {
        let pl = &h.plane;
        let (a, b, c, d) = (pl.a.to_f64(), pl.b.to_f64(), pl.c.to_f64(), pl.d.to_f64());
        let sign = if h.side == Side::Le { 1.0 } else { -1.0 };
        corners.iter().all(|v| {
            let val = a * v[0] + b * v[1] + c * v[2] + d;
            let mag = (a * v[0]).abs() + (b * v[1]).abs() + (c * v[2]).abs() + d.abs();
            sign * val > MARGIN * (1.0 + mag)
        })
    })
}

/// Polytope against prism, decided in the plane from the upper and lower facets of both.
fn polytope_meets_prism(p: &Prism, q: &ConvexPolytope) -> bool {
    if clearly_separated(p, q) {
        return false;
    }
    let (mut tops, mut bottoms) = (vec![p.ceiling_z.clone()], vec![p.floor_z.clone()]);
    for h in q.halfspaces() {
        let Ok(z) = h.plane.z_function() else {
            return prism_polyhedron(p).clip_all(q.halfspaces().iter()).volume().is_positive();
        };
        if (h.side == Side::Le) == h.plane.c.is_positive() {
            tops.push(z);
        } else {
            bottoms.push(z);
        }
    }
    positive_somewhere(p.base.to_polygon(), bottoms.iter(), tops.iter())
}

/// Some pair of prisms with overlapping interiors, found by a sweep along x.
pub fn first_overlapping_pair(prisms: &[Prism]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..prisms.len()).collect();
    order.sort_by(|&a, &b| prisms[a].bounds().lo[0].total_cmp(&prisms[b].bounds().lo[0]));
    for (k, &i) in order.iter().enumerate() {
        let hi = prisms[i].bounds().hi[0];
        for &j in &order[k + 1..] {
            if prisms[j].bounds().lo[0] > hi {
                break;
            }
            if prisms_overlap(&prisms[i], &prisms[j]) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// True iff the region's interior meets the prism interior (for a triangle: the triangle
/// crosses the prism interior in positive area).
pub fn region_meets_prism(p: &Prism, r: &Region) -> bool {
    if !p.bounds().may_touch(&r.bounds()) {
        return false;
    }
    match r {
        Region::Polytope(q) => polytope_meets_prism(p, q),
        Region::Triangle(_) => !boundary_free(p, r),
    }
}

/// True iff the region's boundary does not meet the prism interior: a solid region either
/// misses the interior or contains the whole prism, and a triangle misses the interior.
pub fn boundary_free(p: &Prism, r: &Region) -> bool {
    if !p.bounds().may_touch(&r.bounds()) {
        return true;
    }
    match r {
        Region::Polytope(q) => {
            let hs = q.halfspaces();
            let corners = p.vertices();
            corners.iter().all(|v| hs.iter().all(|h| h.contains(v))) || !polytope_meets_prism(p, q)
        }
        Region::Triangle(t) => {
            let poly = prism_polyhedron(p);
            let plane = t.plane();
            let below = poly.clip(&HalfSpace { plane: plane.clone(), side: Side::Le }, 0);
            let above = poly.clip(&HalfSpace { plane: plane.clone(), side: Side::Ge }, 0);
            if below.is_empty() || above.is_empty() {
                return true;
            }
            let [a, b, c] = t.vertices();
            let normal = plane.normal();
            let mut section = below;
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let e = u.sub(v);
                let w = crate::exact::geom::cross(&normal, &e);
                let d = -(&w[0] * &u.x + &w[1] * &u.y + &w[2] * &u.z);
                let keep = HalfSpace::new(w[0].clone(), w[1].clone(), w[2].clone(), d, Side::Le).expect("edge wall");
                let opposite = [a, b, c].into_iter().find(|x| *x != u && *x != v).unwrap();
                let keep = if keep.contains(opposite) { keep } else { HalfSpace { plane: keep.plane, side: keep.side.flip() } };
                section = section.clip(&keep, 1);
                if section.is_empty() {
                    return true;
                }
            }
            // the part below the plane, cut down to the triangle, touches the plane in positive area
            let touching = section.faces.iter().any(|f| {
                f.cycle.len() >= 3 && f.cycle.iter().all(|&v| plane.eval(&section.verts[v]).is_zero())
            });
            !touching
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{axis_box, gen_scene, BBox, GenParams, SceneKind};

    fn boxes(list: &[([i64; 3], [i64; 3])]) -> Scene {
        Scene::new(
            BBox::cube(0, 10),
            list.iter()
                .map(|(a, b)| {
                    Region::Polytope(axis_box(&Point3::from_ints(a[0], a[1], a[2]), &Point3::from_ints(b[0], b[1], b[2])).unwrap())
                })
                .collect(),
            12,
        )
        .unwrap()
    }

    #[test]
    fn inclusion_exclusion_examples() {
        assert_eq!(union_volume_ie(&boxes(&[([1, 1, 1], [2, 2, 2])])).unwrap(), Scalar::one());
        assert_eq!(union_volume_ie(&boxes(&[([1, 1, 1], [2, 2, 2]), ([5, 5, 5], [6, 6, 6])])).unwrap(), Scalar::from(2));
        let s = boxes(&[([1, 1, 1], [3, 3, 3]), ([2, 2, 2], [4, 4, 4]), ([2, 1, 2], [3, 4, 3])]);
        // 8 + 8 + 3 - 1 - 2 - 2 + 1
        assert_eq!(union_volume_ie(&s).unwrap(), Scalar::from(15));
        assert_eq!(complement_volume(&s).unwrap(), Scalar::from(985));
    }

    #[test]
    fn enclosure_scan() {
        let s = boxes(&[([1, 1, 1], [9, 9, 9]), ([2, 2, 2], [8, 8, 8]), ([3, 3, 3], [7, 7, 7])]);
        assert_eq!(enclosing_regions(&s, &Point3::from_ints(5, 5, 5)), vec![0, 1, 2]);
        assert_eq!(depth(&s, &Point3::from_ints(2, 5, 5)), 1);
        assert_eq!(depth(&s, &Point3::from_ints(0, 0, 0)), 0);
    }

    #[test]
    fn prism_polyhedron_volume_matches() {
        let p = Prism::root(&BBox::cube(0, 3));
        assert_eq!(prism_polyhedron(&p).volume(), Scalar::from(27));
        assert_eq!(prism_intersection_volume(&p, &p), Scalar::from(27));
    }

    #[test]
    fn triangle_vertices_match_feature_oracle() {
        for seed in 0..6 {
            let scene = gen_scene(SceneKind::Triangles, 6 + seed as usize, seed, &GenParams::default()).unwrap();
            let f = features_at_depth(&scene, scene.len()).unwrap();
            assert_eq!(triangle_arrangement_vertices(&scene).unwrap(), f.arrangement_vertices, "seed {seed}");
        }
    }
}
