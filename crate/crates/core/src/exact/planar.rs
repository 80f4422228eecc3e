//! Planar primitives for the xy-projection: convex polygons, trapezoids with
//! y-parallel sides, and the canonical trapezoidation used by every
//! vertical-decomposition step.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::geom::{orient2, Affine2, Point2};
use super::Scalar;

/// The non-vertical line `y = m x + k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YLine {
    pub m: Scalar,
    pub k: Scalar,
}

impl fmt::Debug for YLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y={}x+{}", self.m, self.k)
    }
}

impl YLine {
    pub fn new(m: Scalar, k: Scalar) -> Self {
        YLine { m, k }
    }

    pub fn horizontal(y: Scalar) -> Self {
        YLine { m: Scalar::zero(), k: y }
    }

    pub fn at(&self, x: &Scalar) -> Scalar {
        &self.m * x + &self.k
    }

    /// Line through two points with distinct x.
    pub fn through(p: &Point2, q: &Point2) -> Self {
        let m = (&q.y - &p.y) / (&q.x - &p.x);
        let k = &p.y - &m * &p.x;
        YLine { m, k }
    }

    /// Zero set of `f`, if `f` depends on y.
    pub fn from_affine(f: &Affine2) -> Option<Self> {
        if f.b.is_zero() {
            return None;
        }
        let inv = -f.b.recip();
        Some(YLine { m: &f.a * &inv, k: &f.c * &inv })
    }

    /// `y - line(x)`: positive above the line.
    pub fn above(&self) -> Affine2 {
        Affine2::new(-&self.m, Scalar::one(), -&self.k)
    }
}

/// Location of a point relative to a closed set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// Region `x1 <= x <= x2`, `lo(x) <= y <= hi(x)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trapezoid {
    pub x1: Scalar,
    pub x2: Scalar,
    pub lo: YLine,
    pub hi: YLine,
}

impl fmt::Debug for Trapezoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{}..{} | {:?} .. {:?}]", self.x1, self.x2, self.lo, self.hi)
    }
}

impl Trapezoid {
    pub fn new(x1: Scalar, x2: Scalar, lo: YLine, hi: YLine) -> Self {
        Trapezoid { x1, x2, lo, hi }
    }

    pub fn rect(x1: Scalar, x2: Scalar, y1: Scalar, y2: Scalar) -> Self {
        Trapezoid::new(x1, x2, YLine::horizontal(y1), YLine::horizontal(y2))
    }

    pub fn width(&self) -> Scalar {
        &self.x2 - &self.x1
    }

    pub fn mid_x(&self) -> Scalar {
        (&self.x1 + &self.x2).half()
    }

    pub fn area(&self) -> Scalar {
        let h1 = self.hi.at(&self.x1) - self.lo.at(&self.x1);
        let h2 = self.hi.at(&self.x2) - self.lo.at(&self.x2);
        (h1 + h2) * self.width() * Scalar::ratio(1, 2)
    }

    /// Area centroid; requires positive area.
    pub fn centroid(&self) -> Point2 {
        let poly = self.to_polygon();
        poly.centroid()
    }

    /// Corner points in counter-clockwise order, duplicates removed.
    pub fn corners(&self) -> Vec<Point2> {
        let cand = [
            Point2::new(self.x1.clone(), self.lo.at(&self.x1)),
            Point2::new(self.x2.clone(), self.lo.at(&self.x2)),
            Point2::new(self.x2.clone(), self.hi.at(&self.x2)),
            Point2::new(self.x1.clone(), self.hi.at(&self.x1)),
        ];
        let mut out: Vec<Point2> = Vec::with_capacity(4);
        for p in cand {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon { pts: self.corners() }
    }

    /// Halfplanes `f >= 0` whose intersection is the trapezoid.
    pub fn halfplanes(&self) -> [Affine2; 4] {
        [
            Affine2::new(Scalar::one(), Scalar::zero(), -&self.x1),
            Affine2::new(-Scalar::one(), Scalar::zero(), self.x2.clone()),
            self.lo.above(),
            self.hi.above().neg(),
        ]
    }

    pub fn locate(&self, p: &Point2) -> Location {
        let signs = self.halfplanes().map(|h| h.at(p).signum());
        if signs.iter().any(|&s| s < 0) {
            Location::Outside
        } else if signs.iter().all(|&s| s > 0) {
            Location::Interior
        } else {
            Location::Boundary
        }
    }

    /// Piece of the trapezoid between `a` and `b` (`x1 <= a < b <= x2`).
    pub fn restrict(&self, a: &Scalar, b: &Scalar) -> Trapezoid {
        Trapezoid::new(a.clone(), b.clone(), self.lo.clone(), self.hi.clone())
    }

    /// True if the interiors intersect.
    pub fn overlaps(&self, other: &Trapezoid) -> bool {
        if self.x2 <= other.x1 || other.x2 <= self.x1 {
            return false;
        }
        let s = (&self.x1).max(&other.x1);
        let e = (&self.x2).min(&other.x2);
        // the vertical gap between the higher floor and the lower ceiling is concave in x
        let mut xs = vec![s.clone(), e.clone()];
        for (a, b) in [(&self.lo, &other.lo), (&self.hi, &other.hi)] {
            if a.m != b.m {
                let x = (&b.k - &a.k) / (&a.m - &b.m);
                if &x > s && &x < e {
                    xs.push(x);
                }
            }
        }
        xs.iter().any(|x| self.lo.at(x).max(other.lo.at(x)) < self.hi.at(x).min(other.hi.at(x)))
    }
}

/// Convex polygon with vertices in counter-clockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygon {
    pub pts: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(pts: Vec<Point2>) -> Self {
        ConvexPolygon { pts }
    }

    pub fn rect(x1: &Scalar, x2: &Scalar, y1: &Scalar, y2: &Scalar) -> Self {
        ConvexPolygon::new(vec![
            Point2::new(x1.clone(), y1.clone()),
            Point2::new(x2.clone(), y1.clone()),
            Point2::new(x2.clone(), y2.clone()),
            Point2::new(x1.clone(), y2.clone()),
        ])
    }

    /// True unless the polygon has positive area (counter-clockwise).
    pub fn is_empty(&self) -> bool {
        if self.pts.len() < 3 {
            return true;
        }
        let (p, q) = (&self.pts[0], &self.pts[1]);
        for r in &self.pts[2..] {
            let o = orient2(p, q, r);
            if o != 0 {
                return o < 0;
            }
        }
        true
    }

    /// Twice the signed area.
    fn area2(&self) -> Scalar {
        let n = self.pts.len();
        let mut s = Scalar::zero();
        for i in 0..n {
            let (p, q) = (&self.pts[i], &self.pts[(i + 1) % n]);
            s += &p.x * &q.y - &q.x * &p.y;
        }
        s
    }

    pub fn area(&self) -> Scalar {
        if self.pts.len() < 3 {
            return Scalar::zero();
        }
        self.area2().half()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.pts.len();
        let a2 = self.area2();
        if a2.is_zero() {
            let mut sx = Scalar::zero();
            let mut sy = Scalar::zero();
            for p in &self.pts {
                sx += &p.x;
                sy += &p.y;
            }
            let k = Scalar::from_int(n as i64);
            return Point2::new(sx / &k, sy / k);
        }
        let mut cx = Scalar::zero();
        let mut cy = Scalar::zero();
        for i in 0..n {
            let (p, q) = (&self.pts[i], &self.pts[(i + 1) % n]);
            let w = &p.x * &q.y - &q.x * &p.y;
            cx += (&p.x + &q.x) * &w;
            cy += (&p.y + &q.y) * &w;
        }
        let d = a2 * Scalar::from_int(3);
        Point2::new(cx / &d, cy / d)
    }

    /// Keep the part where `f >= 0`.
    pub fn clip(&self, f: &Affine2) -> ConvexPolygon {
        let n = self.pts.len();
        if n == 0 {
            return self.clone();
        }
        let signs: Vec<i32> = self.pts.iter().map(|p| f.sign_at(p)).collect();
        if signs.iter().all(|&v| v >= 0) {
            return self.clone();
        }
        if signs.iter().all(|&v| v <= 0) {
            // at most a degenerate sliver survives
            let on: Vec<Point2> =
                self.pts.iter().zip(&signs).filter(|(_, &v)| v == 0).map(|(p, _)| p.clone()).collect();
            return ConvexPolygon { pts: on };
        }
        let mut out: Vec<Point2> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (p, q) = (&self.pts[i], &self.pts[j]);
            if signs[i] >= 0 {
                push_dedup(&mut out, p.clone());
            }
            if signs[i] * signs[j] < 0 {
                let (fp, fq) = (f.at(p), f.at(q));
                let t = &fp / &(&fp - &fq);
                let x = &p.x + &t * (&q.x - &p.x);
                let y = &p.y + &t * (&q.y - &p.y);
                push_dedup(&mut out, Point2::new(x, y));
            }
        }
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        ConvexPolygon { pts: out }
    }

    pub fn clip_all<'a, I: IntoIterator<Item = &'a Affine2>>(&self, fs: I) -> ConvexPolygon {
        let mut p = self.clone();
        for f in fs {
            p = p.clip(f);
            if p.pts.len() < 3 {
                break;
            }
        }
        p
    }

    /// Halfplanes `f >= 0` describing the polygon (one per edge).
    pub fn edge_halfplanes(&self) -> Vec<Affine2> {
        let n = self.pts.len();
        (0..n)
            .map(|i| {
                let (p, q) = (&self.pts[i], &self.pts[(i + 1) % n]);
                // left of p->q: (q-p) x (r-p) >= 0
                let dx = &q.x - &p.x;
                let dy = &q.y - &p.y;
                Affine2::new(-&dy, dx.clone(), &dy * &p.x - &dx * &p.y)
            })
            .collect()
    }

    pub fn min_x(&self) -> Scalar {
        self.pts.iter().map(|p| &p.x).min().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn max_x(&self) -> Scalar {
        self.pts.iter().map(|p| &p.x).max().cloned().unwrap_or_else(Scalar::zero)
    }

    /// Lower and upper boundary chains as `(xa, xb, line)` pieces sorted by x.
    fn chains(&self) -> (Vec<(Scalar, Scalar, YLine)>, Vec<(Scalar, Scalar, YLine)>) {
        let n = self.pts.len();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for i in 0..n {
            let (p, q) = (&self.pts[i], &self.pts[(i + 1) % n]);
            if p.x < q.x {
                lower.push((p.x.clone(), q.x.clone(), YLine::through(p, q)));
            } else if q.x < p.x {
                upper.push((q.x.clone(), p.x.clone(), YLine::through(q, p)));
            }
        }
        lower.sort_by(|a, b| a.0.cmp(&b.0));
        upper.sort_by(|a, b| a.0.cmp(&b.0));
        (lower, upper)
    }

    /// Canonical trapezoids of the polygon (empty for degenerate polygons).
    pub fn trapezoids(&self) -> Vec<Trapezoid> {
        if self.is_empty() {
            return Vec::new();
        }
        let (lower, upper) = self.chains();
        let mut xs: Vec<Scalar> = self.pts.iter().map(|p| p.x.clone()).collect();
        xs.sort();
        xs.dedup();
        let mut out: Vec<Trapezoid> = Vec::new();
        for w in xs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let lo = chain_line(&lower, a, b);
            let hi = chain_line(&upper, a, b);
            if let Some(last) = out.last_mut() {
                if &last.x2 == a && last.lo == *lo && last.hi == *hi {
                    last.x2 = b.clone();
                    continue;
                }
            }
            out.push(Trapezoid::new(a.clone(), b.clone(), lo.clone(), hi.clone()));
        }
        out
    }
}

fn chain_line<'a>(chain: &'a [(Scalar, Scalar, YLine)], a: &Scalar, b: &Scalar) -> &'a YLine {
    chain
        .iter()
        .find(|(xa, xb, _)| xa <= a && b <= xb)
        .map(|(_, _, l)| l)
        .expect("convex chain covers every slab")
}

fn push_dedup(out: &mut Vec<Point2>, p: Point2) {
    if out.last() != Some(&p) {
        out.push(p);
    }
}

/// Trapezoids of `t \ k` where `k` is a convex polygon contained in `t`.
pub fn trapezoid_minus_convex(t: &Trapezoid, k: &ConvexPolygon) -> Vec<Trapezoid> {
    if k.is_empty() {
        return vec![t.clone()];
    }
    let (lower, upper) = k.chains();
    let (kx1, kx2) = (k.min_x(), k.max_x());
    let mut xs: Vec<Scalar> = vec![t.x1.clone(), t.x2.clone()];
    xs.extend(k.pts.iter().map(|p| p.x.clone()).filter(|x| *x > t.x1 && *x < t.x2));
    xs.sort();
    xs.dedup();
    let mut pieces = Vec::new();
    for w in xs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if *a >= kx1 && *b <= kx2 {
            let mid = (a + b).half();
            let klo = chain_line(&lower, a, b);
            let khi = chain_line(&upper, a, b);
            if klo.at(&mid) > t.lo.at(&mid) {
                pieces.push(Trapezoid::new(a.clone(), b.clone(), t.lo.clone(), klo.clone()));
            }
            if t.hi.at(&mid) > khi.at(&mid) {
                pieces.push(Trapezoid::new(a.clone(), b.clone(), khi.clone(), t.hi.clone()));
            }
        } else {
            pieces.push(t.restrict(a, b));
        }
    }
    canonical_trapezoids(pieces)
}

/// Canonical trapezoidation of the union of interior-disjoint trapezoids: the pieces
/// obtained by erecting y-parallel segments from every vertex of the union.
///
/// The union is cut at every breakpoint, vertically adjacent pieces sharing a line
/// are fused, and pieces are then fused across breakpoints whenever both bounding
/// lines continue. The output is sorted.
pub fn canonical_trapezoids(pieces: Vec<Trapezoid>) -> Vec<Trapezoid> {
    let pieces: Vec<Trapezoid> = pieces.into_iter().filter(|t| t.x1 < t.x2).collect();
    if pieces.len() <= 1 {
        return pieces;
    }
    let mut xs: Vec<Scalar> = pieces.iter().flat_map(|t| [t.x1.clone(), t.x2.clone()]).collect();
    xs.sort();
    xs.dedup();
    let index: HashMap<&Scalar, usize> = xs.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut slabs: Vec<Vec<(YLine, YLine, Scalar)>> = vec![Vec::new(); xs.len() - 1];
    for t in &pieces {
        let (i1, i2) = (index[&t.x1], index[&t.x2]);
        for s in i1..i2 {
            let mid = (&xs[s] + &xs[s + 1]).half();
            let key = t.lo.at(&mid);
            slabs[s].push((t.lo.clone(), t.hi.clone(), key));
        }
    }
    let mut out: Vec<Trapezoid> = Vec::new();
    // open trapezoids ending at the current breakpoint, keyed by their lines
    let mut open: HashMap<(YLine, YLine), usize> = HashMap::new();
    for (s, mut slab) in slabs.into_iter().enumerate() {
        slab.sort_by(|a, b| a.2.cmp(&b.2));
        let mut fused: Vec<(YLine, YLine)> = Vec::new();
        for (lo, hi, _) in slab {
            if let Some(last) = fused.last_mut() {
                if last.1 == lo {
                    last.1 = hi;
                    continue;
                }
            }
            fused.push((lo, hi));
        }
        let mut next_open = HashMap::with_capacity(fused.len());
        for (lo, hi) in fused {
            let key = (lo, hi);
            match open.get(&key) {
                Some(&idx) => {
                    out[idx].x2 = xs[s + 1].clone();
                    next_open.insert(key, idx);
                }
                None => {
                    out.push(Trapezoid::new(xs[s].clone(), xs[s + 1].clone(), key.0.clone(), key.1.clone()));
                    next_open.insert(key, out.len() - 1);
                }
            }
        }
        open = next_open;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::new(s(x), s(y))
    }

    #[test]
    fn unit_square_area_and_trapezoid() {
        let sq = ConvexPolygon::rect(&s(0), &s(1), &s(0), &s(1));
        assert_eq!(sq.area(), s(1));
        let tz = sq.trapezoids();
        assert_eq!(tz, vec![Trapezoid::rect(s(0), s(1), s(0), s(1))]);
        assert_eq!(tz[0].area(), s(1));
    }

    #[test]
    fn diamond_splits_at_middle_vertex_only() {
        let d = ConvexPolygon::new(vec![pt(0, 0), pt(2, -2), pt(4, 0), pt(2, 2)]);
        let tz = d.trapezoids();
        assert_eq!(tz.len(), 2);
        let total: Scalar = tz.iter().map(|t| t.area()).sum();
        assert_eq!(total, d.area());
        assert_eq!(total, s(8));
    }

    #[test]
    fn clip_square_by_diagonal() {
        let sq = ConvexPolygon::rect(&s(0), &s(2), &s(0), &s(2));
        // keep y <= x
        let half = sq.clip(&Affine2::new(s(1), s(-1), s(0)));
        assert_eq!(half.area(), s(2));
        let none = sq.clip(&Affine2::new(s(0), s(0), s(-1)));
        assert!(none.is_empty());
    }

    #[test]
    fn hole_in_rectangle_canonical() {
        let t = Trapezoid::rect(s(0), s(10), s(0), s(10));
        let k = ConvexPolygon::rect(&s(4), &s(6), &s(4), &s(6));
        let parts = trapezoid_minus_convex(&t, &k);
        // left slab, two pieces around the hole, right slab
        assert_eq!(parts.len(), 4);
        let total: Scalar = parts.iter().map(|p| p.area()).sum();
        assert_eq!(total, s(96));
    }

    #[test]
    fn canonical_fuses_stacked_and_adjacent() {
        let pieces = vec![
            Trapezoid::rect(s(0), s(1), s(0), s(1)),
            Trapezoid::rect(s(0), s(1), s(1), s(3)),
            Trapezoid::rect(s(1), s(2), s(0), s(2)),
            Trapezoid::rect(s(1), s(2), s(2), s(3)),
        ];
        assert_eq!(canonical_trapezoids(pieces), vec![Trapezoid::rect(s(0), s(2), s(0), s(3))]);
    }

    #[test]
    fn canonical_recuts_at_notch() {
        // L-shape: the canonical split is at x = 1 where the notch starts
        let pieces = vec![
            Trapezoid::rect(s(0), s(2), s(0), s(1)),
            Trapezoid::rect(s(0), s(1), s(1), s(2)),
        ];
        let c = canonical_trapezoids(pieces);
        assert_eq!(
            c,
            vec![Trapezoid::rect(s(0), s(1), s(0), s(2)), Trapezoid::rect(s(1), s(2), s(0), s(1))]
        );
    }

    #[test]
    fn trapezoid_location_and_overlap() {
        let t = Trapezoid::rect(s(0), s(2), s(0), s(2));
        assert_eq!(t.locate(&pt(1, 1)), Location::Interior);
        assert_eq!(t.locate(&pt(0, 1)), Location::Boundary);
        assert_eq!(t.locate(&pt(3, 1)), Location::Outside);
        assert!(t.overlaps(&Trapezoid::rect(s(1), s(3), s(1), s(3))));
        assert!(!t.overlaps(&Trapezoid::rect(s(2), s(3), s(0), s(2))));
    }
}
