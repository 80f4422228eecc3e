//! General-position checks and symbolic-free perturbation.
//!
//! A scene is in general position when no facet is vertical, no two facets share a
//! plane, every arrangement vertex has exactly three defining constraints, no two
//! vertices share an x-coordinate, no edge is parallel to the y- or z-axis, and no
//! projected vertex lands on another region's projected edge. Facets lying on the
//! bounding box and vertices on its boundary are exempt.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::SceneError;
use crate::exact::geom::cross;
use crate::exact::{orient2, Bounds, HalfSpace, Plane, Point3, Scalar};
use crate::scene::{ConvexPolytope, Region, Scene, ThinTriangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FacetRef {
    pub region: usize,
    pub facet: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    VerticalFacet { facet: FacetRef },
    CoincidentPlanes { first: FacetRef, second: FacetRef },
    OverdeterminedVertex { point: String, regions: Vec<usize> },
    SharedX { x: String, first: String, second: String },
    AxisParallelEdge { axis: char, point: String },
    ProjectedTangency { vertex_of: usize, edge_of: usize, point: String },
}

struct Facet {
    at: FacetRef,
    plane: Plane,
    bounds: Bounds,
}

fn region_facets(scene: &Scene, id: usize) -> Vec<Facet> {
    match &scene.regions[id] {
        Region::Polytope(p) => p
            .facet_ids()
            .into_iter()
            .filter(|&f| !scene.bbox.is_bbox_plane(&p.halfspaces()[f].plane))
            .map(|f| Facet {
                at: FacetRef { region: id, facet: f },
                plane: p.halfspaces()[f].plane.clone(),
                bounds: Bounds::of_points(&p.facet_vertices(f)),
            })
            .collect(),
        Region::Triangle(t) => vec![Facet {
            at: FacetRef { region: id, facet: 0 },
            plane: t.plane().clone(),
            bounds: Bounds::of_points(t.vertices()),
        }],
    }
}

fn region_edges(r: &Region) -> Vec<(Point3, Point3)> {
    match r {
        Region::Polytope(p) => {
            let poly = p.polyhedron();
            poly.edges().into_iter().map(|(u, v, _, _)| (poly.verts[u].clone(), poly.verts[v].clone())).collect()
        }
        Region::Triangle(t) => {
            let v = t.vertices();
            vec![(v[0].clone(), v[1].clone()), (v[1].clone(), v[2].clone()), (v[2].clone(), v[0].clone())]
        }
    }
}

/// Number of independent constraints of region `r` that are tight at `p`; zero if `p` is not on `r`.
fn tight_constraints(scene: &Scene, r: &Region, p: &Point3) -> (usize, Vec<Plane>) {
    match r {
        Region::Polytope(q) => {
            if !q.contains(p) {
                return (0, Vec::new());
            }
            let planes: Vec<Plane> = q
                .facet_ids()
                .into_iter()
                .map(|f| &q.halfspaces()[f].plane)
                .filter(|pl| pl.eval(p).is_zero() && !scene.bbox.is_bbox_plane(pl))
                .cloned()
                .collect();
            (planes.len(), planes)
        }
        Region::Triangle(t) => {
            if !t.contains(p) {
                return (0, Vec::new());
            }
            let on_edges = t.projection().edge_halfplanes().iter().filter(|f| f.at(&p.xy()).is_zero()).count();
            (1 + on_edges, vec![t.plane().clone()])
        }
    }
}

fn segment_plane(a: &Point3, b: &Point3, pl: &Plane) -> Option<Point3> {
    let (fa, fb) = (pl.eval(a), pl.eval(b));
    if fa.signum() * fb.signum() > 0 || (fa.is_zero() && fb.is_zero()) {
        return None;
    }
    let t = &fa / &(&fa - &fb);
    Some(a.lerp(b, &t))
}

fn on_closed_segment_2d(p: &Point3, a: &Point3, b: &Point3) -> bool {
    let (p, a, b) = (p.xy(), a.xy(), b.xy());
    if (a.x == b.x && a.y == b.y) || orient2(&a, &b, &p) != 0 {
        return false;
    }
    let within = |u: &Scalar, v: &Scalar, w: &Scalar| (u <= w && w <= v) || (v <= w && w <= u);
    within(&a.x, &b.x, &p.x) && within(&a.y, &b.y, &p.y)
}

fn touching_pairs(bounds: &[Bounds]) -> Vec<Vec<usize>> {
    let n = bounds.len();
    let mut out = vec![Vec::new(); n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| bounds[a].lo[0].total_cmp(&bounds[b].lo[0]));
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if bounds[b].lo[0] > bounds[a].hi[0] {
                break;
            }
            if bounds[a].may_touch(&bounds[b]) {
                out[a].push(b);
                out[b].push(a);
            }
        }
    }
    for v in &mut out {
        v.sort_unstable();
    }
    out
}

/// Lists every general-position violation; the list is empty iff the scene is in general position.
pub fn gp_check(scene: &Scene) -> Vec<Violation> {
    let n = scene.len();
    let mut out = Vec::new();
    let bounds: Vec<Bounds> = scene.regions.iter().map(|r| r.bounds()).collect();
    let near = touching_pairs(&bounds);
    let facets: Vec<Vec<Facet>> = (0..n).map(|i| region_facets(scene, i)).collect();

    let mut by_plane: HashMap<&Plane, FacetRef> = HashMap::new();
    for f in facets.iter().flatten() {
        if f.plane.is_vertical() {
            out.push(Violation::VerticalFacet { facet: f.at });
        }
        if let Some(prev) = by_plane.insert(&f.plane, f.at) {
            out.push(Violation::CoincidentPlanes { first: prev, second: f.at });
        }
    }

    let mut candidates: HashSet<Point3> = HashSet::new();
    for (i, r) in scene.regions.iter().enumerate() {
        candidates.extend(r.vertices().iter().cloned());
        for (a, b) in region_edges(r) {
            let eb = Bounds::of_points([&a, &b]);
            for &j in &near[i] {
                for f in facets[j].iter().filter(|f| f.bounds.may_touch(&eb)) {
                    if let Some(p) = segment_plane(&a, &b, &f.plane) {
                        candidates.insert(p);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for (jj, &j) in near[i].iter().enumerate() {
            if j <= i {
                continue;
            }
            for &k in &near[i][jj + 1..] {
                if k <= j || !bounds[j].may_touch(&bounds[k]) {
                    continue;
                }
                for f1 in &facets[i] {
                    for f2 in facets[j].iter().filter(|f| f.bounds.may_touch(&f1.bounds)) {
                        for f3 in facets[k].iter().filter(|f| f.bounds.may_touch(&f1.bounds) && f.bounds.may_touch(&f2.bounds)) {
                            if let Some(p) = Plane::intersect3(&f1.plane, &f2.plane, &f3.plane) {
                                candidates.insert(p);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut vertices: BTreeMap<Point3, Vec<usize>> = BTreeMap::new();
    for p in candidates {
        if !scene.bbox.contains_strictly(&p) {
            continue;
        }
        let pf = [p.x.to_f64(), p.y.to_f64(), p.z.to_f64()];
        let mut total = 0;
        let mut regions = Vec::new();
        let mut planes = Vec::new();
        for (id, r) in scene.regions.iter().enumerate() {
            if !bounds[id].may_contain(&pf) {
                continue;
            }
            let (c, pl) = tight_constraints(scene, r, &p);
            if c > 0 {
                total += c;
                regions.push(id);
                planes.extend(pl);
            }
        }
        if total < 3 {
            continue;
        }
        if total > 3 && regions.len() > 1 {
            out.push(Violation::OverdeterminedVertex { point: format!("{p:?}"), regions: regions.clone() });
        }
        for (a, pa) in planes.iter().enumerate() {
            for pb in &planes[a + 1..] {
                let d = cross(&pa.normal(), &pb.normal());
                if d[0].is_zero() && (d[1].is_zero() || d[2].is_zero()) && !(d[1].is_zero() && d[2].is_zero()) {
                    let axis = if d[1].is_zero() { 'z' } else { 'y' };
                    out.push(Violation::AxisParallelEdge { axis, point: format!("{p:?}") });
                }
            }
        }
        vertices.insert(p, regions);
    }
    for r in &scene.regions {
        if let Region::Triangle(t) = r {
            for (a, b) in region_edges(r) {
                if a.x == b.x && (a.y == b.y || a.z == b.z) {
                    let axis = if a.y == b.y { 'z' } else { 'y' };
                    out.push(Violation::AxisParallelEdge { axis, point: format!("{:?}", t.vertices()[0]) });
                }
            }
        }
    }

    let keys: Vec<&Point3> = vertices.keys().collect();
    for w in keys.windows(2) {
        if w[0].x == w[1].x {
            out.push(Violation::SharedX { x: w[0].x.to_string(), first: format!("{:?}", w[0]), second: format!("{:?}", w[1]) });
        }
    }

    for i in 0..n {
        let edges_i: Vec<(Point3, Point3)> = region_edges(&scene.regions[i])
            .into_iter()
            .filter(|(a, b)| !(scene.bbox.on_boundary(a) && scene.bbox.on_boundary(b)))
            .collect();
        for &j in &near[i] {
            for v in scene.regions[j].vertices() {
                if scene.bbox.on_boundary(v) {
                    continue;
                }
                if edges_i.iter().any(|(a, b)| on_closed_segment_2d(v, a, b)) {
                    out.push(Violation::ProjectedTangency { vertex_of: j, edge_of: i, point: format!("{v:?}") });
                }
            }
        }
    }
    out
}

/// Seeded nonzero rational offsets in `[-magnitude, magnitude]` on a grid of `2 * STEPS` values.
const STEPS: i64 = 64;
const ATTEMPTS: u64 = 16;

/// Triangle vertices are many and share integer columns, so they draw from a finer grid.
const VERTEX_STEPS: i64 = 1 << 14;

fn jitter_in(rng: &mut ChaCha8Rng, magnitude: &Scalar, steps: i64) -> Scalar {
    let k = rng.gen_range(1..=steps) * if rng.gen::<bool>() { 1 } else { -1 };
    magnitude * &Scalar::ratio(k, steps)
}

fn jitter(rng: &mut ChaCha8Rng, magnitude: &Scalar) -> Scalar {
    jitter_in(rng, magnitude, STEPS)
}

fn perturb_polytope(scene: &Scene, p: &ConvexPolytope, rng: &mut ChaCha8Rng, m: &Scalar) -> Option<Region> {
    let hs: Option<Vec<HalfSpace>> = p
        .halfspaces()
        .iter()
        .map(|h| {
            if scene.bbox.is_bbox_plane(&h.plane) {
                return Some(h.clone());
            }
            let pl = &h.plane;
            HalfSpace::new(
                &pl.a + &jitter(rng, m),
                &pl.b + &jitter(rng, m),
                &pl.c + &jitter(rng, m),
                &pl.d + &jitter(rng, m),
                h.side,
            )
            .ok()
        })
        .collect();
    ConvexPolytope::bounded_by(hs?, &scene.bbox.lo, &scene.bbox.hi).ok().map(Region::Polytope)
}

fn perturb_triangle(t: &ThinTriangle, rng: &mut ChaCha8Rng, m: &Scalar) -> Option<Region> {
    let mut j = || jitter_in(rng, m, VERTEX_STEPS);
    let v = t.vertices().clone().map(|p| Point3::new(p.x + j(), p.y + j(), p.z + j()));
    ThinTriangle::new(v).ok().map(Region::Triangle)
}

/// Moves every facet plane (or triangle vertex) by a small seeded rational amount until the
/// scene passes [`gp_check`]. Planes lying on the bounding box stay fixed.
pub fn perturb(scene: &Scene, seed: u64, magnitude: &Scalar) -> Result<Scene, SceneError> {
    if !magnitude.is_positive() {
        return Err(SceneError::NonPositiveMagnitude);
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let regions: Option<Vec<Region>> = scene
            .regions
            .iter()
            .map(|r| match r {
                Region::Polytope(p) => perturb_polytope(scene, p, &mut rng, magnitude),
                Region::Triangle(t) => perturb_triangle(t, &mut rng, magnitude),
            })
            .collect();
        let Some(regions) = regions else { continue };
        let Ok(candidate) = Scene::new(scene.bbox.clone(), regions, usize::MAX) else { continue };
        if gp_check(&candidate).is_empty() {
            return Ok(candidate);
        }
    }
    Err(SceneError::PerturbationFailed { attempts: ATTEMPTS as usize })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{axis_box, BBox};

    fn boxes(pairs: &[([i64; 3], [i64; 3])]) -> Scene {
        let regions = pairs
            .iter()
            .map(|(lo, hi)| {
                Region::Polytope(
                    axis_box(&Point3::from_ints(lo[0], lo[1], lo[2]), &Point3::from_ints(hi[0], hi[1], hi[2])).unwrap(),
                )
            })
            .collect();
        Scene::new(BBox::cube(0, 16), regions, 12).unwrap()
    }

    #[test]
    fn axis_boxes_are_degenerate() {
        let s = boxes(&[([1, 1, 1], [5, 5, 5]), ([3, 3, 3], [8, 8, 8])]);
        let v = gp_check(&s);
        assert!(v.iter().any(|x| matches!(x, Violation::VerticalFacet { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::SharedX { .. })));
    }

    #[test]
    fn perturbation_repairs_boxes() {
        let s = boxes(&[([1, 1, 1], [5, 5, 5]), ([3, 3, 3], [8, 8, 8]), ([4, 2, 6], [9, 7, 10])]);
        let p = perturb(&s, 7, &Scalar::ratio(1, 64)).unwrap();
        assert!(gp_check(&p).is_empty());
        assert_eq!(p, perturb(&s, 7, &Scalar::ratio(1, 64)).unwrap());
        assert!(matches!(perturb(&s, 7, &Scalar::zero()), Err(SceneError::NonPositiveMagnitude)));
    }

    #[test]
    fn triangles_through_common_point() {
        let t = |a: [i64; 3], b: [i64; 3], c: [i64; 3]| {
            Region::Triangle(
                ThinTriangle::new([Point3::from_ints(a[0], a[1], a[2]), Point3::from_ints(b[0], b[1], b[2]), Point3::from_ints(c[0], c[1], c[2])])
                    .unwrap(),
            )
        };
        let s = Scene::new(
            BBox::cube(0, 16),
            vec![t([1, 2, 3], [9, 3, 4], [4, 11, 6]), t([2, 1, 8], [10, 4, 2], [5, 9, 5]), t([3, 3, 4], [8, 2, 7], [6, 12, 9])],
            12,
        )
        .unwrap();
        let base = gp_check(&s);
        let moved = perturb(&s, 3, &Scalar::ratio(1, 32)).unwrap();
        assert!(gp_check(&moved).is_empty(), "{base:?}");
    }
}
