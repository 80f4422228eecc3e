//! Generates a seeded scene of each kind, checks general position and round-trips JSON.

use vdecomp::general_position::gp_check;
use vdecomp::scene::{gen_scene, GenParams, Scene, SceneKind};

fn main() {
    for kind in [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles, SceneKind::Slabs, SceneKind::Nested] {
        let scene = gen_scene(kind, 8, 42, &GenParams::default()).expect("generation");
        let json = scene.to_json_string();
        let back = Scene::from_json_str(&json).expect("parse");
        println!(
            "{kind:?}: {} regions, {} violations, {} bytes of JSON, round-trip equal: {}",
            scene.len(),
            gp_check(&scene).len(),
            json.len(),
            back == scene
        );
    }
}
