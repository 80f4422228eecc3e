//! Vertical decomposition of a single convex cell.

use vdecomp::exact::Scalar;
use vdecomp::scene::{gen_scene, GenParams, Region, SceneKind};
use vdecomp::vd::{vd_convex_cell, Obstacle};

fn main() {
    let scene = gen_scene(SceneKind::Polytopes, 1, 3, &GenParams::default()).unwrap();
    let Region::Polytope(p) = &scene.regions[0] else { unreachable!() };
    let prisms = vd_convex_cell(&Obstacle::from_polytope(0, p).unwrap()).unwrap();
    let total: Scalar = prisms.iter().map(|q| q.volume()).sum();
    println!("polytope with {} facets splits into {} prisms", p.facet_ids().len(), prisms.len());
    println!("prism volumes sum to the polytope volume: {}", total == p.volume());
    for (i, q) in prisms.iter().enumerate() {
        println!("  prism {i}: floor {:?}, ceiling {:?}, volume {:.4}", q.floor, q.ceiling, q.volume().to_f64());
    }
}
