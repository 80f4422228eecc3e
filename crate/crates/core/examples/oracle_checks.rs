//! Brute-force oracles: inclusion-exclusion volume, complement features and vertical
//! visibilities, set against a decomposition.

use vdecomp::oracle::{complement_features, count_visibilities, union_volume_ie};
use vdecomp::ric::{build_vd, BuildOptions, Mode};
use vdecomp::scene::{gen_scene, GenParams, SceneKind};

fn main() {
    let scene = gen_scene(SceneKind::Boxes, 6, 1, &GenParams::default()).unwrap();
    let union = union_volume_ie(&scene).unwrap();
    let features = complement_features(&scene).unwrap();
    let visib = count_visibilities(&scene).unwrap();
    let build = build_vd(&scene, 0, Mode::Complement, &BuildOptions::default()).unwrap();
    println!("union volume {:.3} of {}", union.to_f64(), scene.bbox.volume());
    println!("complement features {features:?}");
    println!("{} vertical visibilities", visib.count);
    let ratio = build.prisms.len() as f64 / (visib.count + features.vertices + features.edges) as f64;
    println!("{} prisms, ratio to visibilities plus features {ratio:.3}", build.prisms.len());
}
