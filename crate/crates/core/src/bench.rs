//! Growth-curve benchmarks and the zero-tolerance verification suite.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutting::{build_cutting, verify_cutting};
use crate::enclosure::build_index;
use crate::error::OracleError;
use crate::exact::{Point3, Scalar};
use crate::oracle::{
    boundary_free, complement_features, complement_volume, count_visibilities, depth, enclosing_regions,
    first_overlapping_pair, prism_polyhedron, FEATURE_LIMIT,
};
use crate::ric::{build_vd, BuildOptions, Mode};
use crate::scene::{gen_scene, GenParams, Scene, SceneKind};
use crate::vd::{Prism, PrismRecord};

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub kind: SceneKind,
    /// Strictly increasing scene sizes.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Also build a (1/r)-cutting of every scene.
    pub cutting_r: Option<usize>,
    pub gen: GenParams,
}

impl BenchPlan {
    pub fn new(kind: SceneKind, sizes: Vec<usize>, trials: usize, seed: u64) -> Self {
        BenchPlan { kind, sizes, trials, seed, mode: Mode::Complement, cutting_r: None, gen: GenParams::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err("sizes must be nonempty and strictly increasing".into());
        }
        Ok(())
    }
}

/// Seed of the scene (and of its build) for one `(n, trial)` cell of a plan.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add((n as u64) << 20).wrapping_add(trial as u64)
}

/// One benchmark measurement. Empty fields were not requested or not computable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub trial: usize,
    pub prisms: Option<usize>,
    pub visib: Option<usize>,
    pub psi: Option<usize>,
    pub build_ms: Option<f64>,
    pub max_hdag_depth: Option<usize>,
    pub cutting_size: Option<usize>,
    pub cutting_max_conflict: Option<usize>,
    pub error: Option<String>,
}

pub const CSV_HEADER: &str =
    "n,trial,prisms,visib,psi,build_ms,max_hdag_depth,cutting_size,cutting_max_conflict,error";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub metric: String,
    /// Least-squares log-log slope over per-size medians; `None` with fewer than two usable sizes.
    pub slope: Option<f64>,
    /// Slopes of the per-size minima and maxima.
    pub band: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub slopes: Vec<SlopeFit>,
}

pub fn bench_one(plan: &BenchPlan, n: usize, trial: usize) -> BenchRow {
    let mut row = BenchRow { n, trial, ..Default::default() };
    if let Err(e) = fill_row(plan, &mut row) {
        row.error = Some(e);
    }
    row
}

fn fill_row(plan: &BenchPlan, row: &mut BenchRow) -> Result<(), String> {
    let seed = trial_seed(plan.seed, row.n, row.trial);
    let scene = gen_scene(plan.kind, row.n, seed, &plan.gen).map_err(|e| e.to_string())?;
    let opts = BuildOptions { collect_conflicts: false, ..BuildOptions::default() };
    let start = Instant::now();
    let build = build_vd(&scene, seed, plan.mode, &opts).map_err(|e| e.to_string())?;
    row.build_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    row.prisms = Some(build.prisms.len());
    row.max_hdag_depth = Some(build.trace.max_depth);
    if plan.mode == Mode::Complement && row.n <= FEATURE_LIMIT {
        row.psi = complement_features(&scene).ok().map(|f| f.total());
        row.visib = count_visibilities(&scene).ok().map(|v| v.count);
    }
    if let Some(r) = plan.cutting_r.filter(|&r| r <= row.n) {
        let cut = build_cutting(&scene, r, seed, plan.mode).map_err(|e| e.to_string())?;
        row.cutting_size = Some(cut.prisms.len());
        row.cutting_max_conflict = Some(cut.max_conflict());
    }
    Ok(())
}

pub fn run_bench(plan: &BenchPlan) -> Result<BenchReport, String> {
    plan.validate()?;
    let cells: Vec<(usize, usize)> =
        plan.sizes.iter().flat_map(|&n| (0..plan.trials).map(move |t| (n, t))).collect();
    let mut rows: Vec<BenchRow> = cells.par_iter().map(|&(n, t)| bench_one(plan, n, t)).collect();
    rows.sort_by_key(|r| (r.n, r.trial));
    let mut slopes = vec![
        fit_metric(&rows, "prisms", |r| r.prisms.map(|v| v as f64)),
        fit_metric(&rows, "build_ms", |r| r.build_ms),
        fit_metric(&rows, "max_hdag_depth", |r| r.max_hdag_depth.map(|v| v as f64)),
    ];
    if plan.sizes.iter().any(|&n| n <= FEATURE_LIMIT) {
        slopes.push(fit_metric(&rows, "psi", |r| r.psi.map(|v| v as f64)));
        slopes.push(fit_metric(&rows, "visib", |r| r.visib.map(|v| v as f64)));
    }
    if plan.cutting_r.is_some() {
        slopes.push(fit_metric(&rows, "cutting_size", |r| r.cutting_size.map(|v| v as f64)));
    }
    Ok(BenchReport { rows, slopes })
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[m] } else { (values[m - 1] + values[m]) / 2.0 })
}

/// Least-squares slope of `log y` against `log x`; points with nonpositive coordinates are skipped.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 2 {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Slope of a metric over per-size medians, with the band from per-size minima and maxima.
pub fn fit_metric(rows: &[BenchRow], metric: &str, get: impl Fn(&BenchRow) -> Option<f64>) -> SlopeFit {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    let (mut med, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for n in sizes {
        let mut vals: Vec<f64> = rows.iter().filter(|r| r.n == n).filter_map(&get).collect();
        if let Some(m) = median(&mut vals) {
            med.push((n as f64, m));
            lo.push((n as f64, vals[0]));
            hi.push((n as f64, *vals.last().unwrap()));
        }
    }
    let band = fit_loglog(&lo).zip(fit_loglog(&hi)).map(|(a, b)| (a.min(b), a.max(b)));
    SlopeFit { metric: metric.to_string(), slope: fit_loglog(&med), band }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot script drawing a metric of a benchmark CSV on log-log axes.
pub fn gnuplot_script(csv_path: &str, metric: &str) -> String {
    let col = CSV_HEADER.split(',').position(|c| c == metric).map_or(3, |i| i + 1);
    format!(
        "set datafile separator ','\nset logscale xy\nset key top left\nset xlabel 'n'\nset ylabel '{metric}'\n\
         plot '{csv_path}' every ::1 using 1:{col} with points title '{metric}'\n"
    )
}

/// Prism file written by `vdtool build` and read back by `vdtool verify --prisms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrismDump {
    pub mode: Mode,
    pub seed: u64,
    pub regions: usize,
    pub max_hdag_depth: usize,
    pub adjacency: Vec<(usize, usize)>,
    pub prisms: Vec<PrismRecord>,
}

impl PrismDump {
    pub fn new(build: &crate::ric::VdBuild, seed: u64, regions: usize) -> Self {
        PrismDump {
            mode: build.mode,
            seed,
            regions,
            max_hdag_depth: build.trace.max_depth,
            adjacency: build.adjacency.edges.clone(),
            prisms: build.prisms.iter().enumerate().map(|(i, p)| PrismRecord::new(i, p)).collect(),
        }
    }

    pub fn to_prisms(&self) -> Vec<Prism> {
        self.prisms.iter().map(PrismRecord::to_prism).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Volumes,
    Features,
    Visibility,
    Enclosure,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Volumes, Suite::Features, Suite::Visibility, Suite::Enclosure];
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "volumes" => Ok(Suite::Volumes),
            "features" => Ok(Suite::Features),
            "visibility" => Ok(Suite::Visibility),
            "enclosure" => Ok(Suite::Enclosure),
            _ => Err(format!("unknown suite '{s}' (volumes, features, visibility, enclosure)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// The check was not run because the scene exceeds an oracle's size limit.
    pub skipped: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, suite: Suite, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite, name: name.to_string(), passed, skipped: false, detail: detail.into() });
    }

    fn push_err(&mut self, suite: Suite, name: &str, e: OracleError) {
        let skipped = matches!(e, OracleError::TooLarge { .. });
        self.checks.push(Check { suite, name: name.to_string(), passed: skipped, skipped, detail: e.to_string() });
    }
}

/// Exact checks of a prism set against the scene it claims to decompose.
pub fn verify_prisms(scene: &Scene, prisms: &[Prism], mode: Mode) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let s = Suite::Volumes;
    let total: Scalar = prisms.iter().map(Prism::volume).sum();
    let target = match mode {
        Mode::Complement => complement_volume(scene),
        Mode::Arrangement => Ok(scene.bbox.volume()),
    };
    match target {
        Ok(t) => rep.push(s, "volume_sum", t == total, format!("prisms {:.6e}, expected {:.6e}", total.to_f64(), t.to_f64())),
        Err(e) => rep.push_err(s, "volume_sum", e),
    }
    match first_overlapping_pair(prisms) {
        None => rep.push(s, "disjoint", true, format!("{} prisms", prisms.len())),
        Some((a, b)) => rep.push(s, "disjoint", false, format!("prisms {a} and {b} overlap")),
    }
    let crossing = prisms
        .iter()
        .enumerate()
        .find_map(|(i, p)| scene.regions.iter().position(|r| !boundary_free(p, r)).map(|r| (i, r)));
    match crossing {
        None => rep.push(s, "boundary_free", true, ""),
        Some((i, r)) => rep.push(s, "boundary_free", false, format!("region {r} crosses prism {i}")),
    }
    let many = prisms.iter().position(|p| prism_polyhedron(p).faces.len() > 6);
    rep.push(s, "at_most_six_facets", many.is_none(), many.map_or(String::new(), |i| format!("prism {i}")));
    let bad_label = prisms.iter().position(|p| depth(scene, &p.interior_point()) != p.label.len());
    rep.push(s, "labels", bad_label.is_none(), bad_label.map_or(String::new(), |i| format!("prism {i}")));
    rep
}

/// Runs the selected suites on one scene.
pub fn run_verify_suite(scene: &Scene, suites: &[Suite], seed: u64) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let opts = BuildOptions { collect_conflicts: false, ..BuildOptions::default() };
    let build = match build_vd(scene, seed, Mode::Complement, &opts) {
        Ok(b) => b,
        Err(e) => {
            rep.push(Suite::Volumes, "build", false, e.to_string());
            return rep;
        }
    };
    for &suite in suites {
        match suite {
            Suite::Volumes => {
                rep.checks.extend(verify_prisms(scene, &build.prisms, Mode::Complement).checks);
                let same = [seed.wrapping_add(1), seed.wrapping_add(2)]
                    .iter()
                    .all(|&s| build_vd(scene, s, Mode::Complement, &opts).is_ok_and(|b| b.prisms == build.prisms));
                rep.push(suite, "canonical", same, "three seeds");
                if scene.len() >= 2 {
                    let r = 2.min(scene.len());
                    match build_cutting(scene, r, seed, Mode::Complement) {
                        Ok(cut) => {
                            let v = verify_cutting(&cut, scene, r);
                            rep.push(suite, "cutting", v.ok(), format!("{v:?}"));
                        }
                        Err(e) => rep.push(suite, "cutting", false, e.to_string()),
                    }
                }
            }
            Suite::Features => match complement_features(scene) {
                Ok(f) => {
                    let cap = 20 * (f.vertices + f.edges);
                    rep.push(
                        suite,
                        "features",
                        build.prisms.len() <= cap.max(1),
                        format!("{f:?}, prisms {}", build.prisms.len()),
                    )
                }
                Err(e) => rep.push_err(suite, "features", e),
            },
            Suite::Visibility => match count_visibilities(scene) {
                Ok(v) => {
                    let bad = v.witnesses.iter().position(|(a, b)| {
                        a.x != b.x || a.y != b.y || a.z >= b.z || depth(scene, &a.lerp(b, &Scalar::ratio(1, 2))) != 0
                    });
                    rep.push(suite, "visibility_witnesses", bad.is_none(), format!("{} visibilities", v.count));
                }
                Err(e) => rep.push_err(suite, "visibility_witnesses", e),
            },
            Suite::Enclosure => {
                if scene.len() < 2 {
                    rep.push(suite, "enclosure", true, "fewer than two regions");
                    continue;
                }
                match build_index(scene, seed) {
                    Ok(idx) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let b = &scene.bbox;
                        let mut coord = |lo: &Scalar, hi: &Scalar| lo + &(Scalar::ratio(rng.gen_range(1..4096), 4096) * (hi - lo));
                        let wrong = (0..200)
                            .map(|_| Point3::new(coord(&b.lo.x, &b.hi.x), coord(&b.lo.y, &b.hi.y), coord(&b.lo.z, &b.hi.z)))
                            .find(|q| idx.query(q).ok() != Some(enclosing_regions(scene, q)));
                        rep.push(suite, "enclosure", wrong.is_none(), wrong.map_or(String::new(), |q| format!("{q:?}")));
                    }
                    Err(e) => rep.push(suite, "enclosure", false, e.to_string()),
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_size_has_undefined_slope() {
        let plan = BenchPlan::new(SceneKind::Boxes, vec![8], 1, 1);
        let rep = run_bench(&plan).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.slopes.iter().all(|s| s.slope.is_none()));
    }

    #[test]
    fn empty_scene_row_and_golden_csv() {
        let plan = BenchPlan::new(SceneKind::Boxes, vec![0], 1, 1);
        let rep = run_bench(&plan).unwrap();
        let row = &rep.rows[0];
        assert_eq!(row.prisms, Some(1));
        assert!(row.build_ms.unwrap() > 0.0);
        let masked = BenchRow { build_ms: Some(0.5), ..row.clone() };
        let mut buf = Vec::new();
        write_csv(&[masked], &mut buf).unwrap();
        let golden = format!("{CSV_HEADER}\n0,0,1,0,26,0.5,0,,,\n");
        assert_eq!(String::from_utf8(buf).unwrap(), golden);
    }

    #[test]
    fn plan_validation() {
        assert!(BenchPlan::new(SceneKind::Boxes, vec![4, 4], 1, 0).validate().is_err());
        assert!(BenchPlan::new(SceneKind::Boxes, vec![4, 8], 0, 0).validate().is_err());
        assert!(BenchPlan::new(SceneKind::Boxes, vec![4, 8], 2, 0).validate().is_ok());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((fit_loglog(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit_loglog(&pts[..1]), None);
    }

    #[test]
    fn verify_suite_passes_and_catches_corruption() {
        let scene = gen_scene(SceneKind::Boxes, 4, 2, &GenParams::default()).unwrap();
        let rep = run_verify_suite(&scene, &[Suite::Volumes, Suite::Features, Suite::Visibility, Suite::Enclosure], 3);
        assert!(rep.passed(), "{rep:?}");
        let b = build_vd(&scene, 0, Mode::Complement, &BuildOptions::default()).unwrap();
        let mut prisms = b.prisms.clone();
        prisms.push(prisms[0].clone());
        let bad = verify_prisms(&scene, &prisms, Mode::Complement);
        assert!(bad.checks.iter().any(|c| c.name == "disjoint" && !c.passed));
    }

    #[test]
    fn empty_scene_verifies() {
        let scene = gen_scene(SceneKind::Boxes, 0, 0, &GenParams::default()).unwrap();
        assert!(run_verify_suite(&scene, &[Suite::Volumes, Suite::Enclosure], 0).passed());
    }
}
