use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::exact::geom::{cross, dot};
use crate::exact::planar::trapezoid_minus_convex;
use crate::exact::{canonical_trapezoids, Affine2, Bounds, ConvexPolygon, Plane, Point3, Scalar, Trapezoid};
use crate::scene::{Region, Scene};

/// Largest scene the feature oracle accepts.
pub const FEATURE_LIMIT: usize = 12;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    /// Vertices of the whole arrangement of region boundaries inside the box, at any depth.
    pub arrangement_vertices: usize,
}

impl FeatureCounts {
    /// Total complexity: vertices, edges and faces.
    pub fn total(&self) -> usize {
        self.vertices + self.edges + self.faces
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tag {
    Facet { region: usize, facet: usize },
    /// Vertical plane through edge `edge` of triangle `region`.
    EdgeWall { region: usize, edge: usize },
}

impl Tag {
    fn region(&self) -> usize {
        match *self {
            Tag::Facet { region, .. } | Tag::EdgeWall { region, .. } => region,
        }
    }
}

struct Constraint {
    tag: Tag,
    plane: Plane,
}

struct Ctx<'a> {
    scene: &'a Scene,
    cons: Vec<Constraint>,
    bounds: Vec<Bounds>,
}

impl Ctx<'_> {
    fn on(&self, c: &Constraint, p: &Point3) -> bool {
        if !c.plane.eval(p).is_zero() {
            return false;
        }
        self.scene.regions[c.tag.region()].contains(p)
    }

    fn touching(&self, a: usize, b: usize) -> bool {
        a == b || self.bounds[a].may_touch(&self.bounds[b])
    }

    /// A set of constraints may define a feature only if every edge wall comes with its triangle.
    fn compatible(&self, tags: &[Tag]) -> bool {
        tags.iter().all(|t| match t {
            Tag::EdgeWall { region, .. } => tags.contains(&Tag::Facet { region: *region, facet: 0 }),
            Tag::Facet { .. } => true,
        })
    }

    fn depth(&self, p: &Point3) -> usize {
        self.scene.regions.iter().filter(|r| r.contains_strictly(p)).count()
    }
}

fn constraints(scene: &Scene) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (id, r) in scene.regions.iter().enumerate() {
        match r {
            Region::Polytope(p) => {
                for f in p.facet_ids() {
                    out.push(Constraint { tag: Tag::Facet { region: id, facet: f }, plane: p.halfspaces()[f].plane.clone() });
                }
            }
            Region::Triangle(t) => {
                out.push(Constraint { tag: Tag::Facet { region: id, facet: 0 }, plane: t.plane().clone() });
                let v = t.vertices();
                for e in 0..3 {
                    let (a, b) = (&v[e], &v[(e + 1) % 3]);
                    let up = Point3::new(a.x.clone(), a.y.clone(), &a.z + &Scalar::one());
                    let plane = Plane::through(a, b, &up).expect("triangle edges are not vertical");
                    out.push(Constraint { tag: Tag::EdgeWall { region: id, edge: e }, plane });
                }
            }
        }
    }
    out
}

/// Features of the complement of the union (depth 0), including the bounding box.
pub fn complement_features(scene: &Scene) -> Result<FeatureCounts, OracleError> {
    features_at_depth(scene, 0)
}

/// Vertices, edges and faces of the arrangement lying at depth at most `k`, plus the
/// bounding box's 8 vertices, 12 edges and 6 faces. Regions must lie in the open box.
pub fn features_at_depth(scene: &Scene, k: usize) -> Result<FeatureCounts, OracleError> {
    arrangement(scene, k).map(|(c, _)| c)
}

/// Feature counts together with the edge segments at depth at most `k`, bounding box excluded.
pub(super) fn arrangement(scene: &Scene, k: usize) -> Result<(FeatureCounts, Vec<(Point3, Point3)>), OracleError> {
    if scene.len() > FEATURE_LIMIT {
        return Err(OracleError::TooLarge { n: scene.len(), limit: FEATURE_LIMIT });
    }
    if scene.regions.iter().any(|r| r.vertices().iter().any(|v| !scene.bbox.contains_strictly(v))) {
        return Err(OracleError::Unsupported("regions must lie in the interior of the bounding box".into()));
    }
    let thin = scene.regions.iter().any(|r| r.is_thin());
    if thin && !scene.is_all_triangles() {
        return Err(OracleError::Unsupported("mixed solid and thin scenes".into()));
    }
    let ctx = Ctx { scene, cons: constraints(scene), bounds: scene.regions.iter().map(|r| r.bounds()).collect() };
    let m = ctx.cons.len();

    // arrangement vertices with the constraints through them
    let mut vertices: BTreeMap<Point3, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        for j in i + 1..m {
            let (ri, rj) = (ctx.cons[i].tag.region(), ctx.cons[j].tag.region());
            if !ctx.touching(ri, rj) {
                continue;
            }
            for l in j + 1..m {
                let rl = ctx.cons[l].tag.region();
                if !ctx.touching(ri, rl) || !ctx.touching(rj, rl) {
                    continue;
                }
                if !ctx.compatible(&[ctx.cons[i].tag, ctx.cons[j].tag, ctx.cons[l].tag]) {
                    continue;
                }
                let Some(p) = Plane::intersect3(&ctx.cons[i].plane, &ctx.cons[j].plane, &ctx.cons[l].plane) else {
                    continue;
                };
                if vertices.contains_key(&p) {
                    continue;
                }
                if [i, j, l].iter().all(|&c| ctx.on(&ctx.cons[c], &p)) {
                    let through: Vec<usize> = (0..m).filter(|&c| ctx.on(&ctx.cons[c], &p)).collect();
                    vertices.insert(p, through);
                }
            }
        }
    }
    let mut counts = FeatureCounts { vertices: 8, edges: 12, faces: 6, arrangement_vertices: vertices.len() };
    counts.vertices += vertices.keys().filter(|p| ctx.depth(p) <= k).count();

    // edges: pieces of plane-pair lines between consecutive arrangement vertices
    let mut on_pair: HashMap<(usize, usize), Vec<&Point3>> = HashMap::new();
    for (p, through) in &vertices {
        for (a, &i) in through.iter().enumerate() {
            for &j in &through[a + 1..] {
                if ctx.compatible(&[ctx.cons[i].tag, ctx.cons[j].tag]) && ctx.cons[i].plane != ctx.cons[j].plane {
                    on_pair.entry((i, j)).or_default().push(p);
                }
            }
        }
    }
    let mut edges_on: HashMap<usize, Vec<(Point3, Point3)>> = HashMap::new();
    let mut segments = Vec::new();
    for ((i, j), mut pts) in on_pair {
        let d = cross(&ctx.cons[i].plane.normal(), &ctx.cons[j].plane.normal());
        if d.iter().all(|c| c.is_zero()) {
            continue;
        }
        let key = |p: &Point3| dot(&d, &[p.x.clone(), p.y.clone(), p.z.clone()]);
        pts.sort_by_key(|p| key(p));
        for w in pts.windows(2) {
            let mid = w[0].lerp(w[1], &Scalar::ratio(1, 2));
            if ctx.on(&ctx.cons[i], &mid) && ctx.on(&ctx.cons[j], &mid) && ctx.depth(&mid) <= k {
                counts.edges += 1;
                segments.push((w[0].clone(), w[1].clone()));
                for c in [i, j] {
                    edges_on.entry(c).or_default().push((w[0].clone(), w[1].clone()));
                }
            }
        }
    }

    // faces
    for (c, con) in ctx.cons.iter().enumerate() {
        let Tag::Facet { region, facet } = con.tag else { continue };
        counts.faces += if thin {
            let verts: Vec<&Point3> = vertices.iter().filter(|(_, t)| t.contains(&c)).map(|(p, _)| p).collect();
            euler_faces(&verts, edges_on.get(&c).map(Vec::as_slice).unwrap_or(&[]))
        } else {
            solid_facet_faces(&ctx, region, facet, &con.plane, k)
        };
    }
    Ok((counts, segments))
}

/// Bounded faces of a planar graph: `E - V + C`.
fn euler_faces(verts: &[&Point3], edges: &[(Point3, Point3)]) -> usize {
    let index: HashMap<&Point3, usize> = verts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, index[a]), find(&mut parent, index[b]));
        parent[ra] = rb;
    }
    let comps = (0..verts.len()).filter(|&v| find(&mut parent, v) == v).count();
    edges.len() + comps - verts.len()
}

/// Connected pieces of a polytope facet, split by the other solids, whose depth is at most `k`.
fn solid_facet_faces(ctx: &Ctx, region: usize, facet: usize, plane: &Plane, k: usize) -> usize {
    let Region::Polytope(own) = &ctx.scene.regions[region] else { unreachable!() };
    let z = plane.z_function().expect("facets are not vertical");
    let mut corners: Vec<Point3> = own.facet_vertices(facet);
    let c = Point3::centroid(&corners);
    corners.sort_by(|a, b| {
        let ang = |p: &Point3| (p.y.to_f64() - c.y.to_f64()).atan2(p.x.to_f64() - c.x.to_f64());
        ang(a).total_cmp(&ang(b))
    });
    let poly = ConvexPolygon::new(corners.iter().map(|p| p.xy()).collect());
    let mut pieces: Vec<(Trapezoid, Vec<usize>)> = poly.trapezoids().into_iter().map(|t| (t, Vec::new())).collect();
    for (other, r) in ctx.scene.regions.iter().enumerate() {
        let Region::Polytope(q) = r else { continue };
        if other == region || !ctx.touching(region, other) {
            continue;
        }
        // cross-section of the other solid with the facet plane, in xy
        let section: Vec<Affine2> = q
            .halfspaces()
            .iter()
            .map(|h| {
                let [a, b, c, d] = h.le_coeffs();
                Affine2::new(-(&a + &c * &z.a), -(&b + &c * &z.b), -(&d + &c * &z.c))
            })
            .collect();
        let mut next = Vec::new();
        for (t, sig) in pieces {
            let inside = t.to_polygon().clip_all(&section);
            if inside.is_empty() {
                next.push((t, sig));
                continue;
            }
            let mut deeper = sig.clone();
            deeper.push(other);
            next.extend(inside.trapezoids().into_iter().map(|u| (u, deeper.clone())));
            next.extend(trapezoid_minus_convex(&t, &inside).into_iter().map(|u| (u, sig.clone())));
        }
        pieces = next;
    }
    let mut groups: BTreeMap<Vec<usize>, Vec<Trapezoid>> = BTreeMap::new();
    for (t, sig) in pieces {
        groups.entry(sig).or_default().push(t);
    }
    groups
        .into_iter()
        .filter(|(sig, _)| sig.len() <= k)
        .map(|(_, ts)| planar_components(&canonical_trapezoids(ts)))
        .sum()
}

/// Number of connected components of a set of trapezoids, joined along boundaries of positive length.
fn planar_components(ts: &[Trapezoid]) -> usize {
    let n = ts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (&ts[i], &ts[j]);
            let side = a.x2 == b.x1 && {
                let x = &a.x2;
                let lo = a.lo.at(x).max(b.lo.at(x));
                let hi = a.hi.at(x).min(b.hi.at(x));
                lo < hi
            };
            let stacked = a.hi == b.lo && (&a.x1).max(&b.x1) < (&a.x2).min(&b.x2);
            if side || stacked {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}
