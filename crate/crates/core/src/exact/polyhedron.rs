//! Bounded convex polyhedra built by successive halfspace clipping, with exact volume.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::geom::{det3, HalfSpace, Point3};
use super::Scalar;

/// Where a face came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceTag {
    /// One of the six faces of the starting box (index 0..6: x-, x+, y-, y+, z-, z+).
    Box(u8),
    /// The caller-supplied halfspace id.
    Clip(usize),
}

#[derive(Clone, Debug)]
pub struct Face {
    pub tag: FaceTag,
    /// Vertex indices in cyclic order.
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct Polyhedron {
    pub verts: Vec<Point3>,
    pub faces: Vec<Face>,
}

impl Polyhedron {
    /// Axis-aligned box `[lo, hi]`.
    pub fn from_box(lo: &Point3, hi: &Point3) -> Self {
        let mut verts = Vec::with_capacity(8);
        for i in 0..8 {
            let x = if i & 1 == 0 { &lo.x } else { &hi.x };
            let y = if i & 2 == 0 { &lo.y } else { &hi.y };
            let z = if i & 4 == 0 { &lo.z } else { &hi.z };
            verts.push(Point3::new(x.clone(), y.clone(), z.clone()));
        }
        let cyc = |v: [usize; 4], t: u8| Face { tag: FaceTag::Box(t), cycle: v.to_vec() };
        let faces = vec![
            cyc([0, 2, 6, 4], 0),
            cyc([1, 5, 7, 3], 1),
            cyc([0, 4, 5, 1], 2),
            cyc([2, 3, 7, 6], 3),
            cyc([0, 1, 3, 2], 4),
            cyc([4, 6, 7, 5], 5),
        ];
        Polyhedron { verts, faces }
    }

    pub fn empty() -> Self {
        Polyhedron::default()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.len() < 4
    }

    /// Keep the part inside `hs`; the new face is tagged `Clip(id)`.
    pub fn clip(&self, hs: &HalfSpace, id: usize) -> Polyhedron {
        if self.is_empty() {
            return Polyhedron::empty();
        }
        let signs: Vec<i32> = self.verts.iter().map(|v| hs.sign_of(v)).collect();
        if signs.iter().all(|&v| v <= 0) {
            return self.clone();
        }
        if signs.iter().all(|&v| v >= 0) {
            return Polyhedron::empty();
        }
        let mut verts: Vec<Point3> = Vec::new();
        let mut remap: Vec<Option<usize>> = vec![None; self.verts.len()];
        let mut on_plane: Vec<usize> = Vec::new();
        for (i, v) in self.verts.iter().enumerate() {
            if signs[i] <= 0 {
                remap[i] = Some(verts.len());
                if signs[i] == 0 {
                    on_plane.push(verts.len());
                }
                verts.push(v.clone());
            }
        }
        let mut cut: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        for f in &self.faces {
            let n = f.cycle.len();
            let mut cyc: Vec<usize> = Vec::with_capacity(n + 1);
            for i in 0..n {
                let (a, b) = (f.cycle[i], f.cycle[(i + 1) % n]);
                if let Some(na) = remap[a] {
                    push_dedup(&mut cyc, na);
                }
                if signs[a] * signs[b] < 0 {
                    let key = (a.min(b), a.max(b));
                    let idx = *cut.entry(key).or_insert_with(|| {
                        let (p, q) = (&self.verts[key.0], &self.verts[key.1]);
                        let (fp, fq) = (hs.value(p), hs.value(q));
                        let t = &fp / &(&fp - &fq);
                        verts.push(p.lerp(q, &t));
                        on_plane.push(verts.len() - 1);
                        verts.len() - 1
                    });
                    push_dedup(&mut cyc, idx);
                }
            }
            while cyc.len() > 1 && cyc.first() == cyc.last() {
                cyc.pop();
            }
            if cyc.len() >= 3 {
                faces.push(Face { tag: f.tag, cycle: cyc });
            }
        }
        on_plane.sort_unstable();
        on_plane.dedup();
        if on_plane.len() >= 3 {
            let cycle = chain_cap(&faces, &on_plane)
                .unwrap_or_else(|| order_coplanar(&verts, &on_plane, &hs.plane.normal()));
            faces.push(Face { tag: FaceTag::Clip(id), cycle });
        }
        // a kept vertex lies strictly inside, so the result keeps positive volume
        Polyhedron { verts, faces }
    }

    /// Clip by every halfspace, tagging faces with the iterator position.
    pub fn clip_all<'a, I: IntoIterator<Item = &'a HalfSpace>>(&self, hs: I) -> Polyhedron {
        let mut p = self.clone();
        for (i, h) in hs.into_iter().enumerate() {
            p = p.clip(h, i);
            if p.is_empty() {
                break;
            }
        }
        p
    }

    pub fn volume(&self) -> Scalar {
        if self.faces.len() < 4 {
            return Scalar::zero();
        }
        let r = Point3::centroid(self.used_vertices().map(|i| &self.verts[i]));
        let mut six = Scalar::zero();
        for f in &self.faces {
            let p0 = self.verts[f.cycle[0]].sub(&r);
            for w in f.cycle[1..].windows(2) {
                let a = self.verts[w[0]].sub(&r);
                let b = self.verts[w[1]].sub(&r);
                six += det3(&p0, &a, &b).abs();
            }
        }
        six * Scalar::ratio(1, 6)
    }

    fn used_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut used = vec![false; self.verts.len()];
        for f in &self.faces {
            for &v in &f.cycle {
                used[v] = true;
            }
        }
        (0..self.verts.len()).filter(move |&i| used[i])
    }

    /// Copy with unreferenced vertices dropped and indices renumbered.
    pub fn compacted(&self) -> Polyhedron {
        let mut map = vec![usize::MAX; self.verts.len()];
        let mut verts = Vec::new();
        for i in self.used_vertices() {
            map[i] = verts.len();
            verts.push(self.verts[i].clone());
        }
        let faces = self
            .faces
            .iter()
            .map(|f| Face { tag: f.tag, cycle: f.cycle.iter().map(|&v| map[v]).collect() })
            .collect();
        Polyhedron { verts, faces }
    }

    /// Distinct vertices referenced by faces.
    pub fn vertices(&self) -> Vec<Point3> {
        self.used_vertices().map(|i| self.verts[i].clone()).collect()
    }

    /// Undirected edges with the tags of their two incident faces.
    pub fn edges(&self) -> Vec<(usize, usize, FaceTag, FaceTag)> {
        let mut seen: HashMap<(usize, usize), FaceTag> = HashMap::new();
        let mut out = Vec::new();
        for f in &self.faces {
            let n = f.cycle.len();
            for i in 0..n {
                let (a, b) = (f.cycle[i], f.cycle[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                match seen.remove(&key) {
                    Some(t) => out.push((key.0, key.1, t, f.tag)),
                    None => {
                        seen.insert(key, f.tag);
                    }
                }
            }
        }
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    pub fn face(&self, tag: FaceTag) -> Option<&Face> {
        self.faces.iter().find(|f| f.tag == tag)
    }

    /// Bounding box of the vertices.
    pub fn aabb(&self) -> Option<(Point3, Point3)> {
        let mut it = self.used_vertices();
        let first = it.next()?;
        let mut lo = self.verts[first].clone();
        let mut hi = lo.clone();
        for i in it {
            let v = &self.verts[i];
            lo = Point3::new(lo.x.min(v.x.clone()), lo.y.min(v.y.clone()), lo.z.min(v.z.clone()));
            hi = Point3::new(hi.x.max(v.x.clone()), hi.y.max(v.y.clone()), hi.z.max(v.z.clone()));
        }
        Some((lo, hi))
    }
}

fn push_dedup(v: &mut Vec<usize>, i: usize) {
    if v.last() != Some(&i) {
        v.push(i);
    }
}

/// Cyclic order of coplanar points of a convex polygon with normal `n`.
/// Boundary cycle of the cap face, linked from the face edges lying on the cutting plane.
fn chain_cap(faces: &[Face], on_plane: &[usize]) -> Option<Vec<usize>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for f in faces {
        let n = f.cycle.len();
        for i in 0..n {
            let (a, b) = (f.cycle[i], f.cycle[(i + 1) % n]);
            if on_plane.binary_search(&a).is_ok() && on_plane.binary_search(&b).is_ok() {
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }
    if adj.len() != on_plane.len() {
        return None;
    }
    for v in adj.values_mut() {
        v.sort_unstable();
        v.dedup();
        if v.len() != 2 {
            return None;
        }
    }
    let start = on_plane[0];
    let mut cycle = vec![start];
    let (mut prev, mut cur) = (start, adj[&start][0]);
    while cur != start {
        cycle.push(cur);
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
        if cycle.len() > on_plane.len() {
            return None;
        }
    }
    (cycle.len() == on_plane.len()).then_some(cycle)
}

pub fn order_coplanar(verts: &[Point3], ids: &[usize], n: &[Scalar; 3]) -> Vec<usize> {
    // drop the coordinate where the normal is largest
    let drop = (0..3).max_by(|&i, &j| n[i].abs().cmp(&n[j].abs())).unwrap_or(2);
    let (u, v) = match drop {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let k = Scalar::from_int(ids.len() as i64);
    let cu = ids.iter().map(|&i| verts[i].coord(u).clone()).sum::<Scalar>() / &k;
    let cv = ids.iter().map(|&i| verts[i].coord(v).clone()).sum::<Scalar>() / &k;
    let rel: Vec<(usize, Scalar, Scalar)> =
        ids.iter().map(|&i| (i, verts[i].coord(u) - &cu, verts[i].coord(v) - &cv)).collect();
    let half = |du: &Scalar, dv: &Scalar| -> u8 {
        if dv.is_negative() || (dv.is_zero() && du.is_negative()) {
            1
        } else {
            0
        }
    };
    let mut rel = rel;
    rel.sort_by(|a, b| {
        let (ha, hb) = (half(&a.1, &a.2), half(&b.1, &b.2));
        if ha != hb {
            return ha.cmp(&hb);
        }
        let cr = &a.1 * &b.2 - &a.2 * &b.1;
        match cr.signum() {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    });
    rel.into_iter().map(|r| r.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::geom::Side;

    fn p(x: i64, y: i64, z: i64) -> Point3 {
        Point3::from_ints(x, y, z)
    }

    fn hs(a: i64, b: i64, c: i64, d: i64) -> HalfSpace {
        HalfSpace::new(a.into(), b.into(), c.into(), d.into(), Side::Le).unwrap()
    }

    #[test]
    fn box_volume() {
        let b = Polyhedron::from_box(&p(0, 0, 0), &p(2, 3, 4));
        assert_eq!(b.volume(), Scalar::from_int(24));
        assert_eq!(b.vertices().len(), 8);
        assert_eq!(b.edges().len(), 12);
    }

    #[test]
    fn clip_cube_by_diagonal_plane() {
        let b = Polyhedron::from_box(&p(0, 0, 0), &p(1, 1, 1));
        // z - x <= 0
        let half = b.clip(&hs(-1, 0, 1, 0), 0);
        assert_eq!(half.volume(), Scalar::ratio(1, 2));
        assert_eq!(half.faces.len(), 5);
        // corner tetrahedron x + y + z <= 1
        let tet = b.clip(&hs(1, 1, 1, -1), 0);
        assert_eq!(tet.volume(), Scalar::ratio(1, 6));
        assert_eq!(tet.vertices().len(), 4);
    }

    #[test]
    fn clip_away_everything_and_nothing() {
        let b = Polyhedron::from_box(&p(0, 0, 0), &p(1, 1, 1));
        assert!(b.clip(&hs(1, 0, 0, 5), 0).is_empty());
        assert_eq!(b.clip(&hs(1, 0, 0, -5), 0).volume(), Scalar::one());
        // touching face only: measure zero
        assert!(b.clip(&hs(1, 0, 0, 0), 0).is_empty());
    }
}
