use crate::error::VdError;
use crate::exact::{canonical_trapezoids, ConvexPolygon};

use super::obstacle::{Obstacle, ObstacleKind};
use super::{Prism, SurfaceId};

/// Vertical decomposition of a single convex polytope: its projection is divided by
/// which bottom facet is highest and which top facet is lowest, and each part is
/// trapezoidated. Every prism is labeled with the obstacle id.
pub fn vd_convex_cell(o: &Obstacle) -> Result<Vec<Prism>, VdError> {
    let ObstacleKind::Solid { bottoms, tops, projection, .. } = &o.kind else {
        return Err(VdError::DegenerateCell("a thin region has no interior to decompose".into()));
    };
    let cells = |surfaces: &[(usize, crate::exact::ZPlane)], lowest: bool| -> Vec<ConvexPolygon> {
        (0..surfaces.len())
            .map(|i| {
                let mut c = projection.clone();
                for (k, (_, other)) in surfaces.iter().enumerate() {
                    if k == i {
                        continue;
                    }
                    let me = &surfaces[i].1;
                    let f = if lowest { other.minus(me) } else { me.minus(other) };
                    if f.is_constant() && f.c.is_zero() && k < i {
                        return ConvexPolygon::new(Vec::new());
                    }
                    c = c.clip(&f);
                }
                c
            })
            .collect()
    };
    let lower = cells(bottoms, false);
    let upper = cells(tops, true);
    let mut out = Vec::new();
    for (i, (fi, zi)) in bottoms.iter().enumerate() {
        for (j, (fj, zj)) in tops.iter().enumerate() {
            if lower[i].is_empty() || upper[j].is_empty() {
                continue;
            }
            let cell = lower[i].clip_all(&upper[j].edge_halfplanes());
            for t in canonical_trapezoids(cell.trapezoids()) {
                out.push(Prism::new(
                    t,
                    (SurfaceId::Facet { region: o.id, facet: *fi }, zi.clone()),
                    (SurfaceId::Facet { region: o.id, facet: *fj }, zj.clone()),
                    vec![o.id],
                ));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{HalfSpace, Scalar, Side};
    use crate::scene::ConvexPolytope;

    #[test]
    fn octahedron_cell_volume() {
        let mut hs = Vec::new();
        for sx in [-1i64, 1] {
            for sy in [-1i64, 1] {
                for sz in [-1i64, 1] {
                    hs.push(HalfSpace::new(sx.into(), sy.into(), sz.into(), (-1).into(), Side::Le).unwrap());
                }
            }
        }
        let p = ConvexPolytope::new(hs).unwrap();
        let o = Obstacle::from_polytope(0, &p).unwrap();
        let prisms = vd_convex_cell(&o).unwrap();
        let v: Scalar = prisms.iter().map(|q| q.volume()).sum();
        assert_eq!(v, Scalar::ratio(4, 3));
        assert_eq!(v, p.volume());
        assert!(prisms.iter().all(|q| q.label == vec![0]));
    }
}
