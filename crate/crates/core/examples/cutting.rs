//! A (1/r)-cutting of free space around 32 boxes, checked against the oracles.

use vdecomp::cutting::{build_cutting, verify_cutting};
use vdecomp::ric::Mode;
use vdecomp::scene::{gen_scene, GenParams, SceneKind};

fn main() {
    let scene = gen_scene(SceneKind::Boxes, 32, 5, &GenParams::default()).unwrap();
    for r in [2, 4] {
        let cut = build_cutting(&scene, r, 11, Mode::Complement).unwrap();
        let report = verify_cutting(&cut, &scene, r);
        println!(
            "r = {r}: sample {}, {} prisms, largest conflict list {} (bound {}), attempts {}, verified {}",
            cut.sample.len(),
            cut.prisms.len(),
            cut.max_conflict(),
            scene.len() / r,
            cut.attempts,
            report.ok()
        );
    }
}
