use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{axis_box, BBox, ConvexPolytope, Region, Scene, ThinTriangle};
use crate::error::SceneError;
use crate::exact::{HalfSpace, Plane, Point3, Scalar, Side};
use crate::general_position::perturb;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    Boxes,
    Polytopes,
    Triangles,
    Slabs,
    /// Half the regions are boxes nested around the center of the bounding box, the rest
    /// are random boxes overlapping them.
    Nested,
}

impl FromStr for SceneKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "boxes" => Ok(SceneKind::Boxes),
            "polytopes" => Ok(SceneKind::Polytopes),
            "triangles" => Ok(SceneKind::Triangles),
            "slabs" => Ok(SceneKind::Slabs),
            "nested" => Ok(SceneKind::Nested),
            _ => Err(format!("unknown scene kind '{s}' (boxes, polytopes, triangles, slabs, nested)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenParams {
    /// Side of the cubic bounding box `[0, extent]^3`.
    pub extent: i64,
    /// Target fraction of the box covered by the regions, counted with multiplicity.
    pub density: f64,
    pub perturbation: Scalar,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { extent: 64, density: 0.3, perturbation: Scalar::ratio(1, 256) }
    }
}

fn side_for(n: usize, p: &GenParams) -> i64 {
    let s = p.extent as f64 * (p.density / n.max(1) as f64).cbrt();
    (s.round() as i64).clamp(2, p.extent - 2)
}

fn random_corner(rng: &mut ChaCha8Rng, extent: i64, side: i64) -> [i64; 3] {
    [0, 0, 0].map(|_| rng.gen_range(1..=extent - side - 1))
}

fn gen_box(rng: &mut ChaCha8Rng, extent: i64, side: i64) -> Result<Region, SceneError> {
    let lo = random_corner(rng, extent, side);
    let hi = [0, 1, 2].map(|i| lo[i] + rng.gen_range(side / 2 + 1..=side));
    Ok(Region::Polytope(axis_box(&Point3::from_ints(lo[0], lo[1], lo[2]), &Point3::from_ints(hi[0], hi[1], hi[2]))?))
}

fn gen_simplex(rng: &mut ChaCha8Rng, extent: i64, side: i64, bbox: &BBox) -> Result<Region, SceneError> {
    loop {
        let lo = random_corner(rng, extent, side);
        let pts: Vec<Point3> = (0..4)
            .map(|_| {
                let c = [0, 1, 2].map(|i| lo[i] + rng.gen_range(0..=side));
                Point3::from_ints(c[0], c[1], c[2])
            })
            .collect();
        let center = Point3::centroid(&pts);
        let mut hs = Vec::new();
        for skip in 0..4 {
            let f: Vec<&Point3> = pts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| p).collect();
            let Ok(pl) = Plane::through(f[0], f[1], f[2]) else { break };
            let side = if pl.eval(&center).is_negative() { Side::Le } else { Side::Ge };
            hs.push(HalfSpace { plane: pl, side });
        }
        if hs.len() == 4 {
            if let Ok(p) = ConvexPolytope::bounded_by(hs, &bbox.lo, &bbox.hi) {
                return Ok(Region::Polytope(p));
            }
        }
    }
}

fn gen_cut_cube(rng: &mut ChaCha8Rng, extent: i64, side: i64, bbox: &BBox) -> Result<Region, SceneError> {
    let Region::Polytope(b) = gen_box(rng, extent, side)? else { unreachable!() };
    let v = b.vertices();
    let (lo, hi) = (v.iter().min().unwrap().clone(), v.iter().max().unwrap().clone());
    let mid = lo.lerp(&hi, &Scalar::ratio(1, 2));
    loop {
        let n = [0, 0, 0].map(|_| rng.gen_range(-3i64..=3));
        if n[2] == 0 {
            continue;
        }
        let d = -(Scalar::from(n[0]) * &mid.x + Scalar::from(n[1]) * &mid.y + Scalar::from(n[2]) * &mid.z);
        let cut = HalfSpace::new(n[0].into(), n[1].into(), n[2].into(), d, Side::Le)?;
        let mut hs = b.halfspaces().to_vec();
        hs.push(cut);
        return Ok(Region::Polytope(ConvexPolytope::bounded_by(hs, &bbox.lo, &bbox.hi)?));
    }
}

fn gen_triangle(rng: &mut ChaCha8Rng, extent: i64, side: i64) -> Region {
    loop {
        let lo = random_corner(rng, extent, side);
        let v = [0, 1, 2].map(|_| {
            let c = [0, 1, 2].map(|i| lo[i] + rng.gen_range(0..=side));
            Point3::from_ints(c[0], c[1], c[2])
        });
        if let Ok(t) = ThinTriangle::new(v) {
            return Region::Triangle(t);
        }
    }
}

fn gen_nested_shell(rng: &mut ChaCha8Rng, extent: i64, i: usize, shells: usize) -> Result<Region, SceneError> {
    let c = Scalar::from(extent / 2);
    let reach = Scalar::from(extent / 2 - 2);
    let denom = 8 * (shells as i64 + 1);
    let r = [0, 1, 2].map(|_| &reach * Scalar::ratio(8 * (shells - i) as i64 + rng.gen_range(0..4), denom));
    let lo = Point3::new(&c - &r[0], &c - &r[1], &c - &r[2]);
    let hi = Point3::new(&c + &r[0], &c + &r[1], &c + &r[2]);
    Ok(Region::Polytope(axis_box(&lo, &hi)?))
}

fn gen_slab(rng: &mut ChaCha8Rng, bbox: &BBox, extent: i64, n: usize) -> Result<Region, SceneError> {
    let thick = (extent / (2 * n as i64).max(1)).max(1);
    let z0 = rng.gen_range(1..=extent - thick - 1);
    let mut hs = bbox.halfspaces();
    hs.truncate(4);
    hs.push(HalfSpace::new(0.into(), 0.into(), 1.into(), (-z0).into(), Side::Ge)?);
    hs.push(HalfSpace::new(0.into(), 0.into(), 1.into(), (-(z0 + thick)).into(), Side::Le)?);
    Ok(Region::Polytope(ConvexPolytope::bounded_by(hs, &bbox.lo, &bbox.hi)?))
}

/// Deterministic random scene of `n` regions in general position.
pub fn gen_scene(kind: SceneKind, n: usize, seed: u64, params: &GenParams) -> Result<Scene, SceneError> {
    if params.extent < 8 {
        return Err(SceneError::Invariant("extent must be at least 8".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bbox = BBox::cube(0, params.extent);
    let side = side_for(n, params);
    let wide = (side + side / 2).min(params.extent - 2);
    let mut regions = Vec::with_capacity(n);
    for i in 0..n {
        regions.push(match kind {
            SceneKind::Boxes => gen_box(&mut rng, params.extent, side)?,
            SceneKind::Polytopes if i % 2 == 0 => gen_simplex(&mut rng, params.extent, wide, &bbox)?,
            SceneKind::Polytopes => gen_cut_cube(&mut rng, params.extent, side, &bbox)?,
            SceneKind::Triangles => gen_triangle(&mut rng, params.extent, wide),
            SceneKind::Slabs => gen_slab(&mut rng, &bbox, params.extent, n)?,
            SceneKind::Nested if i < n.div_ceil(2) => gen_nested_shell(&mut rng, params.extent, i, n.div_ceil(2))?,
            SceneKind::Nested => gen_box(&mut rng, params.extent, side)?,
        });
    }
    let raw = Scene::new(bbox, regions, usize::MAX)?;
    perturb(&raw, seed ^ 0x5e_ed0f_9e4e_7a7e, &params.perturbation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::general_position::gp_check;

    #[test]
    fn every_kind_is_generic_and_reproducible() {
        for kind in [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles, SceneKind::Slabs, SceneKind::Nested] {
            let a = gen_scene(kind, 6, 11, &GenParams::default()).unwrap();
            assert_eq!(a.len(), 6);
            assert!(gp_check(&a).is_empty(), "{kind:?}");
            let b = gen_scene(kind, 6, 11, &GenParams::default()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn tiny_scenes_of_every_kind() {
        for kind in [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles, SceneKind::Slabs, SceneKind::Nested] {
            for n in 0..3 {
                assert_eq!(gen_scene(kind, n, 5, &GenParams::default()).unwrap().len(), n);
            }
        }
    }

    #[test]
    fn kind_names() {
        assert_eq!("slabs".parse::<SceneKind>(), Ok(SceneKind::Slabs));
        assert!("spheres".parse::<SceneKind>().is_err());
    }
}
