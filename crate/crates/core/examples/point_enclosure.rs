//! Point-enclosure index over nested boxes, compared with a linear scan.

use vdecomp::enclosure::build_index;
use vdecomp::exact::{Point3, Scalar};
use vdecomp::oracle::enclosing_regions;
use vdecomp::scene::{gen_scene, GenParams, SceneKind};

fn main() {
    let scene = gen_scene(SceneKind::Nested, 32, 2, &GenParams::default()).unwrap();
    let index = build_index(&scene, 9).unwrap();
    println!("index over {} regions stores {} conflict entries", scene.len(), index.size());
    for k in 0..6 {
        let t = Scalar::from(32) + Scalar::ratio(3 * k + 1, 7) * Scalar::from(4);
        let q = Point3::new(t.clone(), Scalar::from(32) + Scalar::ratio(1, 3), t);
        let (ids, stats) = index.query_with_stats(&q).unwrap();
        println!(
            "q = ({:.3}, {:.3}, {:.3}): {} regions, scanned {}, rounds {}, matches scan: {}",
            q.x.to_f64(),
            q.y.to_f64(),
            q.z.to_f64(),
            ids.len(),
            stats.scanned,
            stats.rounds,
            ids == enclosing_regions(&scene, &q)
        );
    }
}
