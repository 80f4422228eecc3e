//! Acceptance criteria A1 to A11. Every criterion prints one `PASS` or `FAIL` line with its
//! measured values; thresholds are the constants below.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vdecomp::bench::{fit_loglog, median, run_bench, trial_seed, verify_prisms, BenchPlan, BenchReport};
use vdecomp::cutting::{build_cutting, verify_cutting, within_bound};
use vdecomp::enclosure::build_index;
use vdecomp::envelope::{build_min_diagram_vd, random_linear, random_paraboloids};
use vdecomp::exact::{Point3, Scalar};
use vdecomp::oracle::{
    complement_features, count_visibilities, enclosing_regions, features_at_depth, triangle_arrangement_vertices,
};
use vdecomp::ric::{build_vd, conflict_stats, BuildOptions, Mode, VdBuild};
use vdecomp::scene::{gen_scene, BBox, GenParams, Scene, SceneKind};

const A1_SCENES: usize = 30;
const A1_TIME_LIMIT: Duration = Duration::from_secs(120);
const A3_MAX_CONSTANT: f64 = 20.0;
const GROWTH_SIZES: [usize; 5] = [8, 16, 32, 64, 128];
const GROWTH_TRIALS: usize = 5;
const MAX_SLOPE: f64 = 2.4;
const A4_TIME_LIMIT: Duration = Duration::from_secs(600);
const A5_SLACK: f64 = 0.4;
const A6_BOXES: usize = 16;
const A6_SEEDS: u64 = 20;
const A6_FACTOR: f64 = 8.0;
const A7_DEPTH_FACTOR: f64 = 8.0;
const A8_BOXES: usize = 64;
const A8_RS: [usize; 3] = [2, 4, 8];
const A8_SEEDS: u64 = 50;
const A8_VERIFIED_SEEDS: u64 = 2;
const A8_MIN_FIRST_ATTEMPT: f64 = 0.5;
const A9_BOXES: usize = 64;
const A9_QUERIES: usize = 1000;
const A9_SCAN_FACTOR: f64 = 4.0;
const A10_SITES: usize = 20;
const A10_POINTS: usize = 1000;
const A10_LINEAR_SIZES: [usize; 4] = [4, 8, 16, 32];
const A10_LINEAR_TRIALS: u64 = 3;
const A11_SAMPLES: usize = 30;
const A11_MAX_CONSTANT: f64 = 10.0;

/// Written to the stderr handle directly so the line shows up even when the harness captures output.
fn verdict(id: &str, passed: bool, detail: &str) {
    let line = format!("{id} {} {detail}\n", if passed { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

struct Built {
    scene: Scene,
    build: VdBuild,
}

fn a1_suite() -> &'static (Vec<Built>, Duration) {
    static SUITE: OnceLock<(Vec<Built>, Duration)> = OnceLock::new();
    SUITE.get_or_init(|| {
        let start = Instant::now();
        let kinds = [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles];
        let suite = (0..A1_SCENES)
            .into_par_iter()
            .map(|i| {
                let scene = gen_scene(kinds[i % 3], 2 + i % 9, i as u64, &GenParams::default()).unwrap();
                let build = build_vd(&scene, 0, Mode::Complement, &BuildOptions::default()).unwrap();
                Built { scene, build }
            })
            .collect();
        (suite, start.elapsed())
    })
}

#[test]
fn a1_exact_partition() {
    let (suite, build_time) = a1_suite();
    let start = Instant::now();
    let failures: Vec<String> = suite
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, b)| {
            let rep = verify_prisms(&b.scene, &b.build.prisms, Mode::Complement);
            rep.checks.into_iter().filter(|c| !c.passed).map(move |c| format!("scene {i} {}: {}", c.name, c.detail))
        })
        .collect();
    let elapsed = *build_time + start.elapsed();
    let passed = failures.is_empty() && elapsed < A1_TIME_LIMIT;
    let prisms: usize = suite.iter().map(|b| b.build.prisms.len()).sum();
    verdict("A1", passed, &format!("{} scenes, {prisms} prisms, {:.1}s, failures {failures:?}", suite.len(), elapsed.as_secs_f64()));
    assert!(passed);
}

#[test]
fn a2_canonical_output() {
    let (suite, _) = a1_suite();
    let differing: Vec<usize> = suite
        .par_iter()
        .enumerate()
        .filter(|(_, b)| {
            [17u64, 4242].iter().any(|&seed| {
                let other = build_vd(&b.scene, seed, Mode::Complement, &BuildOptions::default()).unwrap();
                other.prisms != b.build.prisms
            })
        })
        .map(|(i, _)| i)
        .collect();
    verdict("A2", differing.is_empty(), &format!("seeds 0, 17, 4242; differing scenes {differing:?}"));
    assert!(differing.is_empty());
}

#[test]
fn a3_prisms_vs_visibilities() {
    let (suite, _) = a1_suite();
    let ratios: Vec<f64> = suite
        .par_iter()
        .map(|b| {
            let f = complement_features(&b.scene).unwrap();
            let v = count_visibilities(&b.scene).unwrap();
            b.build.prisms.len() as f64 / (v.count + f.vertices + f.edges) as f64
        })
        .collect();
    let c_l = ratios.iter().copied().fold(0.0, f64::max);
    let passed = c_l <= A3_MAX_CONSTANT;
    verdict("A3", passed, &format!("c_L = {c_l:.3} (limit {A3_MAX_CONSTANT})"));
    assert!(passed);
}

fn growth(kind: SceneKind) -> (BenchPlan, BenchReport, Duration) {
    let plan = BenchPlan::new(kind, GROWTH_SIZES.to_vec(), GROWTH_TRIALS, 7);
    let start = Instant::now();
    let rep = run_bench(&plan).unwrap();
    (plan, rep, start.elapsed())
}

fn box_growth() -> &'static (BenchPlan, BenchReport, Duration) {
    static RUN: OnceLock<(BenchPlan, BenchReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| growth(SceneKind::Boxes))
}

fn slope_of(rep: &BenchReport, metric: &str) -> Option<f64> {
    rep.slopes.iter().find(|s| s.metric == metric).and_then(|s| s.slope)
}

#[test]
fn a4_box_growth() {
    let (_, rep, elapsed) = box_growth();
    let errors: Vec<_> = rep.rows.iter().filter_map(|r| r.error.clone()).collect();
    let slope = slope_of(rep, "prisms");
    let passed = errors.is_empty() && slope.is_some_and(|s| s <= MAX_SLOPE) && *elapsed < A4_TIME_LIMIT;
    verdict("A4", passed, &format!("prism slope {slope:?} (limit {MAX_SLOPE}), {:.1}s, errors {errors:?}", elapsed.as_secs_f64()));
    assert!(passed);
}

#[test]
fn a5_triangle_growth() {
    let (plan, rep, _) = growth(SceneKind::Triangles);
    let errors: Vec<_> = rep.rows.iter().filter_map(|r| r.error.clone()).collect();
    let mut chi_points = Vec::new();
    for &n in &plan.sizes {
        let mut chis: Vec<f64> = (0..plan.trials)
            .map(|t| {
                let scene = gen_scene(plan.kind, n, trial_seed(plan.seed, n, t), &plan.gen).unwrap();
                triangle_arrangement_vertices(&scene).unwrap() as f64
            })
            .collect();
        chi_points.push((n as f64, median(&mut chis).unwrap()));
    }
    let chi = fit_loglog(&chi_points);
    let prisms = slope_of(&rep, "prisms");
    let limit = chi.map(|c| MAX_SLOPE.max(c + A5_SLACK));
    let passed = errors.is_empty() && matches!((prisms, limit), (Some(p), Some(l)) if p <= l);
    verdict("A5", passed, &format!("prism slope {prisms:?}, chi slope {chi:?}, limit {limit:?}, errors {errors:?}"));
    assert!(passed);
}

#[test]
fn a6_conflict_moments() {
    let rows: Vec<(u64, usize, f64, f64)> = (0..A6_SEEDS)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let scene = gen_scene(SceneKind::Boxes, A6_BOXES, seed, &GenParams::default()).unwrap();
            let b = build_vd(&scene, seed, Mode::Complement, &BuildOptions::default()).unwrap();
            let sums = conflict_stats(&b.trace, 1);
            b.trace
                .rounds
                .iter()
                .zip(sums)
                .map(|(r, (sum, _))| {
                    (seed, r.k, sum as f64 / r.prisms as f64, A6_FACTOR * A6_BOXES as f64 / r.size as f64)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let violations: Vec<_> = rows.iter().filter(|(_, _, m, bound)| m > bound).collect();
    let worst = rows.iter().map(|(_, _, m, bound)| m / bound).fold(0.0, f64::max);
    verdict("A6", violations.is_empty(), &format!("{} rounds, worst ratio to bound {worst:.3}, violations {violations:?}", rows.len()));
    assert!(violations.is_empty());
}

#[test]
fn a7_history_depth() {
    let (_, rep, _) = box_growth();
    let over: Vec<(usize, usize, usize)> = rep
        .rows
        .iter()
        .filter_map(|r| r.max_hdag_depth.map(|d| (r.n, r.trial, d)))
        .filter(|&(n, _, d)| d as f64 > A7_DEPTH_FACTOR * (n as f64).log2())
        .collect();
    let worst = rep
        .rows
        .iter()
        .filter_map(|r| r.max_hdag_depth.map(|d| d as f64 / (r.n as f64).log2()))
        .fold(0.0, f64::max);
    let complete = rep.rows.iter().all(|r| r.max_hdag_depth.is_some());
    let passed = complete && over.is_empty();
    verdict("A7", passed, &format!("max depth / log2 n = {worst:.3} (limit {A7_DEPTH_FACTOR}), over {over:?}"));
    assert!(passed);
}

#[test]
fn a8_cuttings() {
    let scene = gen_scene(SceneKind::Boxes, A8_BOXES, 1, &GenParams::default()).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    let mut sizes = Vec::new();
    for r in A8_RS {
        let cuts: Vec<(u64, usize, usize, usize)> = (0..A8_SEEDS)
            .into_par_iter()
            .map(|seed| {
                let c = build_cutting(&scene, r, seed, Mode::Complement).unwrap();
                (seed, c.attempts, c.max_conflict(), c.prisms.len())
            })
            .collect();
        let bounded = cuts.iter().all(|&(_, _, m, _)| within_bound(m, A8_BOXES, r));
        let first = cuts.iter().filter(|c| c.1 == 1).count() as f64 / cuts.len() as f64;
        let verified = (0..A8_VERIFIED_SEEDS).all(|seed| {
            let c = build_cutting(&scene, r, seed, Mode::Complement).unwrap();
            verify_cutting(&c, &scene, r).ok()
        });
        let mut s: Vec<f64> = cuts.iter().map(|c| c.3 as f64).collect();
        let size = median(&mut s).unwrap();
        sizes.push((r as f64, size));
        let max = cuts.iter().map(|c| c.2).max().unwrap();
        ok &= bounded && verified && first >= A8_MIN_FIRST_ATTEMPT;
        details.push(format!(
            "r={r}: max conflict {max} (bound {}), first-attempt {first:.2}, oracle-verified {verified}, median size {size}",
            A8_BOXES / r
        ));
    }
    let slope = fit_loglog(&sizes);
    ok &= slope.is_some_and(|s| s <= MAX_SLOPE);
    verdict("A8", ok, &format!("{}; size slope vs r {slope:?}", details.join("; ")));
    assert!(ok);
}

fn random_point(rng: &mut ChaCha8Rng, b: &BBox) -> Point3 {
    let mut c = |lo: &Scalar, hi: &Scalar| lo + &(Scalar::ratio(rng.gen_range(1..1_000_000), 1_000_000) * (hi - lo));
    Point3::new(c(&b.lo.x, &b.hi.x), c(&b.lo.y, &b.hi.y), c(&b.lo.z, &b.hi.z))
}

#[test]
fn a9_point_enclosure() {
    let scene = gen_scene(SceneKind::Nested, A9_BOXES, 1, &GenParams::default()).unwrap();
    let idx = build_index(&scene, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let points: Vec<Point3> = (0..A9_QUERIES).map(|_| random_point(&mut rng, &scene.bbox)).collect();
    let stats: Vec<(bool, usize, usize, usize)> = points
        .par_iter()
        .map(|q| {
            let (ids, st) = idx.query_with_stats(q).unwrap();
            (ids == enclosing_regions(&scene, q), ids.len(), st.scanned, st.rounds)
        })
        .collect();
    let log_n = (A9_BOXES as f64).log2();
    let wrong = stats.iter().filter(|s| !s.0).count();
    let mean_k = stats.iter().map(|s| s.1).sum::<usize>() as f64 / A9_QUERIES as f64;
    let mean_scanned = stats.iter().map(|s| s.2).sum::<usize>() as f64 / A9_QUERIES as f64;
    let max_rounds = stats.iter().map(|s| s.3).max().unwrap();
    let bound = A9_SCAN_FACTOR * (mean_k + log_n * log_n);
    let passed = wrong == 0 && mean_scanned <= bound && max_rounds as f64 <= log_n + 1.0;
    verdict(
        "A9",
        passed,
        &format!(
            "wrong {wrong}, mean scanned {mean_scanned:.1} (bound {bound:.1}), mean k {mean_k:.2}, max rounds {max_rounds} (limit {})",
            log_n + 1.0
        ),
    );
    assert!(passed);
}

fn dist2(a: &Point3, b: &Point3) -> Scalar {
    let (dx, dy, dz) = (&a.x - &b.x, &a.y - &b.y, &a.z - &b.z);
    &(&dx * &dx) + &(&(&dy * &dy) + &(&dz * &dz))
}

#[test]
fn a10_envelopes() {
    let bbox = BBox::cube(0, 64);
    let sites = random_paraboloids(A10_SITES, 5, &bbox);
    let md = build_min_diagram_vd(&sites, &bbox).unwrap();
    let site_points: Vec<Point3> = (0..A10_SITES)
        .map(|i| match &sites[i] {
            vdecomp::envelope::TrivariateFunction::Paraboloid { site, .. } => Point3::new(site[0].clone(), site[1].clone(), site[2].clone()),
            other => panic!("unexpected {other:?}"),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mislabeled = (0..A10_POINTS)
        .filter(|_| {
            let q = random_point(&mut rng, &bbox);
            let d: Vec<Scalar> = site_points.iter().map(|p| dist2(&q, p)).collect();
            let best = d.iter().min().unwrap();
            let prism = md.prisms.iter().find(|p| p.contains_strictly(&q));
            !prism.is_some_and(|p| d[p.label[0]] == *best)
        })
        .count();
    let prism_volume: Scalar = md.prisms.iter().map(|p| p.volume()).sum();
    let cell_volume: Scalar = md.cells.iter().map(|c| c.polytope.volume()).sum();
    let volumes_ok = prism_volume == bbox.volume() && cell_volume == bbox.volume();
    let mut points = Vec::new();
    for n in A10_LINEAR_SIZES {
        let mut counts: Vec<f64> = (0..A10_LINEAR_TRIALS)
            .map(|seed| build_min_diagram_vd(&random_linear(n, seed), &bbox).unwrap().prisms.len() as f64)
            .collect();
        points.push((n as f64, median(&mut counts).unwrap()));
    }
    let slope = fit_loglog(&points);
    let passed = mislabeled == 0 && volumes_ok && slope.is_some_and(|s| s <= MAX_SLOPE);
    verdict(
        "A10",
        passed,
        &format!(
            "{} prisms, mislabeled {mislabeled}/{A10_POINTS}, volumes exact {volumes_ok}, linear prism counts {points:?}, slope {slope:?}",
            md.prisms.len()
        ),
    );
    assert!(passed);
}

#[test]
fn a11_clarkson_shor() {
    let scenes = [(SceneKind::Boxes, 12, 1), (SceneKind::Boxes, 10, 2), (SceneKind::Polytopes, 10, 3), (SceneKind::Triangles, 10, 4)];
    let rows: Vec<(SceneKind, usize, f64)> = scenes
        .par_iter()
        .flat_map_iter(|&(kind, n, seed)| {
            let scene = gen_scene(kind, n, seed, &GenParams::default()).unwrap();
            [2usize, 3].into_iter().map(move |k| {
                let psi_k = features_at_depth(&scene, k).unwrap().total() as f64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + k as u64);
                let mean: f64 = (0..A11_SAMPLES)
                    .map(|_| {
                        let ids: Vec<usize> = (0..n).filter(|_| rng.gen_range(0..k) == 0).collect();
                        complement_features(&scene.subset(&ids)).unwrap().total() as f64
                    })
                    .sum::<f64>()
                    / A11_SAMPLES as f64;
                (kind, k, psi_k / ((k * k * k) as f64 * mean))
            })
        })
        .collect();
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let passed = worst <= A11_MAX_CONSTANT;
    verdict("A11", passed, &format!("max psi_k / (k^3 mean psi(R)) = {worst:.4} (limit {A11_MAX_CONSTANT}), rows {rows:?}"));
    assert!(passed);
}
