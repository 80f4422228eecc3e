//! (1/r)-cuttings by random sampling.
//!
//! A sample of `min(n, ceil(c r ln r))` regions is decomposed, and every unsampled region is
//! traced through the history DAG of that decomposition to get exact conflict lists. A sample
//! is accepted once every list holds at most `n / r` regions; otherwise a fresh sample is drawn.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{BuildError, CuttingError};
use crate::exact::Scalar;
use crate::general_position::gp_check;
use crate::oracle::{first_overlapping_pair, region_meets_prism, union_volume_ie};
use crate::ric::{build_vd_with_order, conflicts_of, BuildOptions, Mode};
use crate::scene::Scene;
use crate::vd::{Obstacle, Prism, PrismRecord};

pub const DEFAULT_SAMPLE_CONSTANT: f64 = 8.0;
pub const RETRY_BUDGET: usize = 64;

#[derive(Clone, Debug)]
pub struct Cutting {
    pub mode: Mode,
    pub prisms: Vec<Prism>,
    /// Sorted ids of the unsampled regions whose interior meets each prism.
    pub conflict: Vec<Vec<usize>>,
    pub r: usize,
    /// Sampled region ids in insertion order.
    pub sample: Vec<usize>,
    /// Number of samples drawn, including the accepted one.
    pub attempts: usize,
}

impl Cutting {
    pub fn max_conflict(&self) -> usize {
        self.conflict.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let prisms: Vec<serde_json::Value> = self
            .prisms
            .iter()
            .zip(&self.conflict)
            .enumerate()
            .map(|(i, (p, c))| serde_json::json!({ "prism": PrismRecord::new(i, p), "conflict": c }))
            .collect();
        serde_json::json!({
            "mode": self.mode,
            "r": self.r,
            "sample": self.sample,
            "attempts": self.attempts,
            "max_conflict": self.max_conflict(),
            "prisms": prisms,
        })
    }
}

/// Number of regions sampled for parameter `r`.
pub fn sample_size(n: usize, r: usize, c: f64) -> usize {
    let s = (c * r as f64 * (r as f64).ln()).ceil() as usize;
    s.clamp(1, n.max(1)).min(n)
}

/// True iff a list of `len` regions is small enough for a (1/r)-cutting of `n` regions.
pub fn within_bound(len: usize, n: usize, r: usize) -> bool {
    len * r <= n
}

pub fn build_cutting(scene: &Scene, r: usize, seed: u64, mode: Mode) -> Result<Cutting, CuttingError> {
    build_cutting_with(scene, r, seed, mode, DEFAULT_SAMPLE_CONSTANT)
}

pub fn build_cutting_with(scene: &Scene, r: usize, seed: u64, mode: Mode, c: f64) -> Result<Cutting, CuttingError> {
    let n = scene.len();
    if r < 2 || r > n {
        return Err(CuttingError::InvalidR { r, n });
    }
    let violations = gp_check(scene);
    if !violations.is_empty() {
        return Err(BuildError::GeneralPosition(violations).into());
    }
    let obstacles: Vec<Obstacle> = scene
        .regions
        .iter()
        .enumerate()
        .map(|(i, reg)| Obstacle::from_region(i, reg))
        .collect::<Result<_, _>>()
        .map_err(BuildError::from)?;
    let opts = BuildOptions { collect_conflicts: false, keep_level_conflicts: false, check_general_position: false };
    let s = sample_size(n, r, c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=RETRY_BUDGET {
        let sub_seed: u64 = rng.gen();
        let mut sub = ChaCha8Rng::seed_from_u64(sub_seed);
        let chosen = sample(&mut sub, n, s).into_vec();
        let build = build_vd_with_order(scene, chosen.clone(), mode, &opts)?;
        let mut in_sample = vec![false; n];
        for &i in &chosen {
            in_sample[i] = true;
        }
        let mut conflict = vec![Vec::new(); build.prisms.len()];
        for (id, o) in obstacles.iter().enumerate().filter(|(id, _)| !in_sample[*id]) {
            for i in conflicts_of(&build, o) {
                conflict[i].push(id);
            }
        }
        if conflict.iter().all(|l| within_bound(l.len(), n, r)) {
            return Ok(Cutting { mode, prisms: build.prisms, conflict, r, sample: chosen, attempts: attempt });
        }
    }
    Err(CuttingError::RetryBudgetExceeded { attempts: RETRY_BUDGET })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuttingReport {
    pub max_conflict: usize,
    /// The prism volumes add up to the volume of the target substructure, and no prism
    /// interior meets a sampled region in complement mode.
    pub coverage_ok: bool,
    pub disjoint_ok: bool,
    /// The recomputed conflict lists equal the stored ones.
    pub lists_ok: bool,
    pub within_bound: bool,
    /// Explanation when coverage could not be decided.
    pub note: Option<String>,
}

impl CuttingReport {
    pub fn ok(&self) -> bool {
        self.coverage_ok && self.disjoint_ok && self.lists_ok && self.within_bound
    }
}

/// Recomputes everything about a cutting from exact predicates, ignoring how it was built.
pub fn verify_cutting(cut: &Cutting, scene: &Scene, r: usize) -> CuttingReport {
    let n = scene.len();
    let mut in_sample = vec![false; n];
    for &i in &cut.sample {
        if i < n {
            in_sample[i] = true;
        }
    }
    let mut lists_ok = cut.conflict.len() == cut.prisms.len();
    let mut max_conflict = 0;
    let mut sample_free = true;
    for (k, p) in cut.prisms.iter().enumerate() {
        let mut list = Vec::new();
        for (id, reg) in scene.regions.iter().enumerate() {
            if !region_meets_prism(p, reg) {
                continue;
            }
            if in_sample[id] {
                if reg.is_thin() || cut.mode == Mode::Complement {
                    sample_free = false;
                }
            } else {
                list.push(id);
            }
        }
        max_conflict = max_conflict.max(list.len());
        if cut.conflict.get(k) != Some(&list) {
            lists_ok = false;
        }
    }
    let total: Scalar = cut.prisms.iter().map(Prism::volume).sum();
    let (target, note) = match cut.mode {
        Mode::Arrangement => (Some(scene.bbox.volume()), None),
        Mode::Complement => match union_volume_ie(&scene.subset(&cut.sample)) {
            Ok(u) => (Some(scene.bbox.volume() - u), None),
            Err(e) => (None, Some(format!("coverage volume unavailable: {e}"))),
        },
    };
    let coverage_ok = sample_free && target.is_some_and(|t| t == total);
    CuttingReport {
        max_conflict,
        coverage_ok,
        disjoint_ok: first_overlapping_pair(&cut.prisms).is_none(),
        lists_ok,
        within_bound: within_bound(max_conflict, n, r),
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{gen_scene, BBox, GenParams, SceneKind};

    fn boxes(n: usize, seed: u64) -> Scene {
        gen_scene(SceneKind::Boxes, n, seed, &GenParams::default()).unwrap()
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(sample_size(64, 2, 8.0), 12);
        assert_eq!(sample_size(64, 4, 8.0), 45);
        assert_eq!(sample_size(64, 8, 8.0), 64);
    }

    #[test]
    fn full_sample_has_empty_lists() {
        let s = boxes(6, 2);
        let cut = build_cutting(&s, 3, 1, Mode::Complement).unwrap();
        assert_eq!(cut.sample.len(), 6);
        assert!(cut.conflict.iter().all(Vec::is_empty));
        assert!(verify_cutting(&cut, &s, 3).ok());
    }

    #[test]
    fn small_sample_verifies() {
        let s = boxes(8, 5);
        for mode in [Mode::Complement, Mode::Arrangement] {
            let cut = build_cutting_with(&s, 2, 7, mode, 1.0).unwrap();
            assert!(cut.sample.len() < 8);
            let rep = verify_cutting(&cut, &s, 2);
            assert!(rep.ok(), "{rep:?}");
            assert!(cut.max_conflict() <= 4);
        }
    }

    #[test]
    fn r_equal_n_gives_lists_of_at_most_one() {
        let s = boxes(5, 3);
        let cut = build_cutting_with(&s, 5, 0, Mode::Complement, 0.3).unwrap();
        assert!(cut.max_conflict() <= 1);
        assert!(verify_cutting(&cut, &s, 5).ok());
    }

    #[test]
    fn oversized_list_is_flagged() {
        let s = boxes(4, 1);
        let opts = BuildOptions { collect_conflicts: false, keep_level_conflicts: false, check_general_position: false };
        let whole = build_vd_with_order(&s, vec![], Mode::Complement, &opts).unwrap();
        let cut = Cutting {
            mode: Mode::Complement,
            prisms: whole.prisms,
            conflict: vec![vec![0, 1, 2, 3]],
            r: 2,
            sample: vec![],
            attempts: 1,
        };
        let rep = verify_cutting(&cut, &s, 2);
        assert_eq!(rep.max_conflict, 4);
        assert!(rep.lists_ok && rep.coverage_ok && rep.disjoint_ok);
        assert!(!rep.within_bound && !rep.ok());
    }

    #[test]
    fn rejects_bad_r() {
        let s = boxes(4, 1);
        assert!(matches!(build_cutting(&s, 1, 0, Mode::Complement), Err(CuttingError::InvalidR { .. })));
        assert!(matches!(build_cutting(&s, 5, 0, Mode::Complement), Err(CuttingError::InvalidR { .. })));
        let empty = Scene::new(BBox::cube(0, 4), vec![], 12).unwrap();
        assert!(build_cutting(&empty, 2, 0, Mode::Complement).is_err());
    }
}
