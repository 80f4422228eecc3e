use serde::{Deserialize, Serialize};

use super::features::{arrangement, FEATURE_LIMIT};
use crate::error::OracleError;
use crate::exact::{orient2, Point2, Point3, Scalar};
use crate::scene::{Region, Scene};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibilityCount {
    pub count: usize,
    /// Vertical segments `(bottom, top)` realizing each visibility.
    pub witnesses: Vec<(Point3, Point3)>,
}

/// Vertical segments whose endpoints lie on two edges of the complement and whose relative
/// interior avoids every region. Edges of the bounding box never take part.
pub fn count_visibilities(scene: &Scene) -> Result<VisibilityCount, OracleError> {
    if scene.len() > FEATURE_LIMIT {
        return Err(OracleError::TooLarge { n: scene.len(), limit: FEATURE_LIMIT });
    }
    let (_, edges) = arrangement(scene, 0)?;
    let mut out = VisibilityCount::default();
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            let Some((p, q)) = vertical_crossing(e, f) else { continue };
            let (bottom, top) = if p.z < q.z { (p, q) } else { (q, p) };
            if bottom.z == top.z {
                continue;
            }
            if scene.regions.iter().all(|r| !blocks(r, &bottom, &top)) {
                out.witnesses.push((bottom, top));
            }
        }
    }
    out.count = out.witnesses.len();
    Ok(out)
}

/// Points on `e` and `f` above a proper crossing of their xy-projections.
fn vertical_crossing(e: &(Point3, Point3), f: &(Point3, Point3)) -> Option<(Point3, Point3)> {
    let (a, b, c, d) = (e.0.xy(), e.1.xy(), f.0.xy(), f.1.xy());
    let (o1, o2) = (orient2(&a, &b, &c), orient2(&a, &b, &d));
    let (o3, o4) = (orient2(&c, &d, &a), orient2(&c, &d, &b));
    if o1 * o2 >= 0 || o3 * o4 >= 0 {
        return None;
    }
    let t = param(&a, &b, &c, &d);
    let s = param(&c, &d, &a, &b);
    Some((e.0.lerp(&e.1, &t), f.0.lerp(&f.1, &s)))
}

/// Parameter along `a -> b` of the intersection with line `c d`.
fn param(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> Scalar {
    let r = [&b.x - &a.x, &b.y - &a.y];
    let s = [&d.x - &c.x, &d.y - &c.y];
    let num = (&c.x - &a.x) * &s[1] - (&c.y - &a.y) * &s[0];
    let den = &r[0] * &s[1] - &r[1] * &s[0];
    num / den
}

/// Whether the open vertical segment from `lo` to `hi` meets the region.
fn blocks(r: &Region, lo: &Point3, hi: &Point3) -> bool {
    match r {
        Region::Polytope(p) => {
            let mut zmin = lo.z.clone();
            let mut zmax = hi.z.clone();
            for h in p.halfspaces() {
                let [a, b, c, d] = h.le_coeffs();
                let rest = &a * &lo.x + &b * &lo.y + d;
                if c.is_zero() {
                    if rest.is_positive() || rest.is_zero() {
                        return false;
                    }
                    continue;
                }
                let z = -rest / &c;
                if c.is_positive() {
                    zmax = zmax.min(z);
                } else {
                    zmin = zmin.max(z);
                }
            }
            zmin < zmax
        }
        Region::Triangle(t) => {
            let z = t.plane().z_function().expect("triangles are not vertical").at(&lo.x, &lo.y);
            lo.z < z && z < hi.z && t.contains(&Point3::new(lo.x.clone(), lo.y.clone(), z))
        }
    }
}
