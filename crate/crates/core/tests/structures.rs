//! Cuttings, the point-enclosure index and minimization diagrams against linear scans.

use proptest::prelude::*;
use vdecomp::cutting::{build_cutting, verify_cutting};
use vdecomp::enclosure::{build_index, EnclosureIndex};
use vdecomp::envelope::{build_min_diagram_vd, envelope_value, random_linear, random_paraboloids};
use vdecomp::exact::{Point3, Scalar};
use vdecomp::oracle::enclosing_regions;
use vdecomp::ric::Mode;
use vdecomp::scene::{gen_scene, BBox, GenParams, SceneKind};

fn coord() -> impl Strategy<Value = Scalar> {
    (1i64..64_000).prop_map(|v| Scalar::ratio(v, 1000) + Scalar::ratio(1, 7919))
}

fn point() -> impl Strategy<Value = Point3> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn enclosure_matches_scan(q in point()) {
        let (scene, index) = &*INDEX;
        prop_assert_eq!(index.query(&q).unwrap(), enclosing_regions(scene, &q));
    }

    #[test]
    fn envelope_cell_is_argmin(q in point()) {
        let (functions, md) = &*DIAGRAM;
        let v = envelope_value(functions, &q).unwrap();
        if !v.tie {
            prop_assert_eq!(md.locate(&q).map(|i| md.prisms[i].label[0]), Some(v.argmin));
        }
    }
}

static INDEX: std::sync::LazyLock<(vdecomp::scene::Scene, EnclosureIndex)> = std::sync::LazyLock::new(|| {
    let scene = gen_scene(SceneKind::Nested, 16, 4, &GenParams::default()).unwrap();
    let index = build_index(&scene, 1).unwrap();
    (scene, index)
});

static DIAGRAM: std::sync::LazyLock<(Vec<vdecomp::envelope::TrivariateFunction>, vdecomp::envelope::MinDiagram)> =
    std::sync::LazyLock::new(|| {
        let bbox = BBox::cube(0, 64);
        let f = random_linear(6, 3);
        let md = build_min_diagram_vd(&f, &bbox).unwrap();
        (f, md)
    });

#[test]
fn index_survives_save_and_load() {
    let (scene, index) = &*INDEX;
    let path = std::env::temp_dir().join(format!("vdecomp-index-{}.bin", std::process::id()));
    index.save(&path).unwrap();
    let loaded = EnclosureIndex::load(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let q = Point3::new(Scalar::ratio(64, 2), Scalar::ratio(129, 4), Scalar::ratio(95, 3));
    assert_eq!(loaded.query(&q).unwrap(), enclosing_regions(scene, &q));
    assert_eq!(loaded.size(), index.size());
}

#[test]
fn cuttings_verify_for_every_kind() {
    for kind in [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles] {
        let scene = gen_scene(kind, 12, 6, &GenParams::default()).unwrap();
        let cut = build_cutting(&scene, 3, 2, Mode::Complement).unwrap();
        let rep = verify_cutting(&cut, &scene, 3);
        assert!(rep.ok(), "{kind:?}: {rep:?}");
    }
}

#[test]
fn voronoi_cells_partition_the_box() {
    let bbox = BBox::cube(0, 64);
    let md = build_min_diagram_vd(&random_paraboloids(6, 8, &bbox), &bbox).unwrap();
    let total: Scalar = md.prisms.iter().map(|p| p.volume()).sum();
    assert_eq!(total, bbox.volume());
}
