use std::collections::HashMap;

use crate::exact::{Scalar, YLine};

use super::Prism;

/// Floor and ceiling heights at both ends of a common wall interval.
struct Band {
    floor: (Scalar, Scalar),
    ceiling: (Scalar, Scalar),
}

fn band(p: &Prism, start: &(Scalar, Scalar), end: &(Scalar, Scalar)) -> Band {
    Band {
        floor: (p.floor_z.at(&start.0, &start.1), p.floor_z.at(&end.0, &end.1)),
        ceiling: (p.ceiling_z.at(&start.0, &start.1), p.ceiling_z.at(&end.0, &end.1)),
    }
}

/// Parameter in (0, 1) where two linear functions, given by their end values, cross.
fn crossing(a: &(Scalar, Scalar), b: &(Scalar, Scalar)) -> Option<Scalar> {
    let d0 = &a.0 - &b.0;
    let d1 = &a.1 - &b.1;
    if d0.signum() * d1.signum() >= 0 {
        return None;
    }
    Some(&d0 / &(&d0 - &d1))
}

/// True iff the two bands overlap in positive area. The gap `min ceiling - max floor` is
/// concave along the interval, so it suffices to test its breakpoints and the ends.
fn bands_overlap(a: &Band, b: &Band) -> bool {
    let at = |v: &(Scalar, Scalar), t: &Scalar| &v.0 + &(t * &(&v.1 - &v.0));
    let mut ts = vec![Scalar::zero(), Scalar::one()];
    ts.extend(crossing(&a.floor, &b.floor));
    ts.extend(crossing(&a.ceiling, &b.ceiling));
    ts.iter().any(|t| {
        let lo = at(&a.floor, t).max(at(&b.floor, t));
        let hi = at(&a.ceiling, t).min(at(&b.ceiling, t));
        lo < hi
    })
}

fn share_x_wall(a: &Prism, b: &Prism) -> bool {
    if a.base.x2 != b.base.x1 {
        return false;
    }
    let x = &a.base.x2;
    let s = a.base.lo.at(x).max(b.base.lo.at(x));
    let e = a.base.hi.at(x).min(b.base.hi.at(x));
    if s >= e {
        return false;
    }
    let (start, end) = ((x.clone(), s), (x.clone(), e));
    bands_overlap(&band(a, &start, &end), &band(b, &start, &end))
}

fn share_y_wall(below: &Prism, above: &Prism) -> bool {
    if below.base.hi != above.base.lo {
        return false;
    }
    let s = (&below.base.x1).max(&above.base.x1).clone();
    let e = (&below.base.x2).min(&above.base.x2).clone();
    if s >= e {
        return false;
    }
    let line = &below.base.hi;
    let (start, end) = ((line.at(&s), s), (line.at(&e), e));
    let (start, end) = ((start.1, start.0), (end.1, end.0));
    bands_overlap(&band(below, &start, &end), &band(above, &start, &end))
}

/// True iff the two prisms meet along a vertical wall in a set of positive area.
pub fn prisms_share_wall(a: &Prism, b: &Prism) -> bool {
    share_x_wall(a, b) || share_x_wall(b, a) || share_y_wall(a, b) || share_y_wall(b, a)
}

/// True iff the ceiling of one prism is the floor of the other over a base overlap of positive area.
pub fn prisms_stacked(a: &Prism, b: &Prism) -> bool {
    let touch = |lo: &Prism, hi: &Prism| lo.ceiling_z == hi.floor_z && lo.base.overlaps(&hi.base);
    touch(a, b) || touch(b, a)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// All wall-sharing pairs `(i, j)` with `i < j`, found by bucketing walls by their plane.
pub fn wall_pairs(prisms: &[&Prism]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut by_x: HashMap<&Scalar, (Vec<usize>, Vec<usize>)> = HashMap::new();
    let mut by_line: HashMap<&YLine, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for (i, p) in prisms.iter().enumerate() {
        by_x.entry(&p.base.x2).or_default().0.push(i);
        by_x.entry(&p.base.x1).or_default().1.push(i);
        by_line.entry(&p.base.hi).or_default().0.push(i);
        by_line.entry(&p.base.lo).or_default().1.push(i);
    }
    for (left, right) in by_x.values() {
        for &i in left {
            for &j in right {
                if share_x_wall(prisms[i], prisms[j]) {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    for (below, above) in by_line.values() {
        for &i in below {
            for &j in above {
                if i != j && share_y_wall(prisms[i], prisms[j]) {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Groups prisms into classes connected through shared vertical walls.
pub fn wall_components(prisms: &[&Prism]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind((0..prisms.len()).collect());
    for (i, j) in wall_pairs(prisms) {
        uf.union(i, j);
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..prisms.len() {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Trapezoid, ZPlane};
    use crate::vd::SurfaceId;

    fn slab(x1: i64, x2: i64, y1: i64, y2: i64, z1: i64, z2: i64) -> Prism {
        Prism::new(
            Trapezoid::rect(x1.into(), x2.into(), y1.into(), y2.into()),
            (SurfaceId::BoxBottom, ZPlane::horizontal(z1.into())),
            (SurfaceId::BoxTop, ZPlane::horizontal(z2.into())),
            vec![],
        )
    }

    #[test]
    fn walls_need_positive_area() {
        let a = slab(0, 2, 0, 2, 0, 2);
        assert!(prisms_share_wall(&a, &slab(2, 4, 1, 3, 0, 2)));
        assert!(!prisms_share_wall(&a, &slab(2, 4, 2, 3, 0, 2)));
        assert!(!prisms_share_wall(&a, &slab(2, 4, 0, 2, 2, 3)));
        assert!(prisms_share_wall(&a, &slab(1, 3, 2, 3, 0, 2)));
        assert!(prisms_stacked(&a, &slab(1, 3, 1, 3, 2, 3)));
        assert_eq!(wall_components(&[&a, &slab(5, 6, 0, 1, 0, 1), &slab(2, 4, 1, 3, 0, 2)]), vec![vec![0, 2], vec![1]]);
    }
}
