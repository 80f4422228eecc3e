//! Lazy randomized incremental construction of the complement of a union of boxes, with
//! the per-round trace and an exact volume check.

use vdecomp::oracle::complement_volume;
use vdecomp::ric::{build_vd, BuildOptions, Mode};
use vdecomp::scene::{gen_scene, GenParams, SceneKind};

fn main() {
    let scene = gen_scene(SceneKind::Boxes, 12, 7, &GenParams::default()).unwrap();
    let build = build_vd(&scene, 1, Mode::Complement, &BuildOptions::default()).unwrap();
    print!("{}", build.trace.to_csv());
    let total: vdecomp::exact::Scalar = build.prisms.iter().map(|p| p.volume()).sum();
    println!("{} free-space prisms, history depth {}", build.prisms.len(), build.trace.max_depth);
    println!("volume matches inclusion-exclusion: {}", total == complement_volume(&scene).unwrap());
    let arrangement = build_vd(&scene, 1, Mode::Arrangement, &BuildOptions::default()).unwrap();
    println!("full arrangement: {} prisms", arrangement.prisms.len());
}
