//! Output-sensitive point-enclosure reporting.
//!
//! Three independent random permutations of the regions each give nested prefixes of sizes
//! 1, 2, 4, ..., 2^u. For every prefix the index keeps the vertical decomposition of its
//! complement (as time slices of one history DAG) and, for every prism, the list of regions
//! outside the prefix whose interior meets it. A query finds, per copy, the first prefix whose
//! union holds the point, then guesses the output size `k` by doubling and scans one short
//! conflict list.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BuildError, EnclosureError};
use crate::exact::Point3;
use crate::general_position::gp_check;
use crate::ric::{build_vd_with_order, insertion_order, BuildOptions, HistoryDag, Mode, NodeStatus};
use crate::scene::Scene;
use crate::vd::Obstacle;

pub const COPIES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureConfig {
    /// Markov constant `c` in the stopping rule `|S| <= c 2^(l-j) n / 2^j`.
    pub markov_c: f64,
    /// Constant `c0` in the per-copy size cap `c0 (n^2 + psi) n^eps`.
    pub size_c0: f64,
    pub eps: f64,
    pub rebuild_budget: usize,
}

impl Default for EnclosureConfig {
    fn default() -> Self {
        EnclosureConfig { markov_c: 4.0, size_c0: 8.0, eps: 0.25, rebuild_budget: 8 }
    }
}

/// One prefix `R_j` of a copy: the live prisms of its decomposition and their conflict lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level {
    pub j: usize,
    /// Number of regions in the prefix.
    pub time: usize,
    /// DAG node id of each prism outside the union, with its sorted conflict list.
    pub conflicts: HashMap<usize, Vec<usize>>,
}

impl Level {
    pub fn size(&self) -> usize {
        self.conflicts.len() + self.conflicts.values().map(Vec::len).sum::<usize>()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Copy {
    pub perm: Vec<usize>,
    pub dag: HistoryDag,
    pub levels: Vec<Level>,
    /// Number of rebuilds forced by the size cap.
    pub rebuilds: usize,
}

impl Copy {
    pub fn size(&self) -> usize {
        self.levels.iter().map(Level::size).sum()
    }
}

#[derive(Clone, Debug)]
pub struct EnclosureIndex {
    pub scene: Scene,
    pub n: usize,
    pub u: usize,
    pub copies: Vec<Copy>,
    pub config: EnclosureConfig,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnclosureQueryStats {
    /// Rounds of the exponential search over `k`.
    pub rounds: usize,
    /// Final guess of `k`.
    pub k: usize,
    /// Per copy, the first level whose union contains the point (`u + 1` if none).
    pub nu: Vec<usize>,
    /// Candidates examined over all rounds.
    pub scanned: usize,
    pub reported: usize,
    /// Copy and level whose list was scanned in the last round; `None` means the whole input.
    pub source: Option<(usize, usize)>,
}

/// Top level `u = floor(log2(n / log2 n))`.
pub fn top_level(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    let nf = n as f64;
    (nf / nf.log2()).log2().floor().max(0.0) as usize
}

fn floor_log2(x: usize) -> usize {
    (usize::BITS - 1 - x.max(1).leading_zeros()) as usize
}

pub fn build_index(scene: &Scene, seed: u64) -> Result<EnclosureIndex, EnclosureError> {
    build_index_with(scene, seed, EnclosureConfig::default())
}

pub fn build_index_with(scene: &Scene, seed: u64, config: EnclosureConfig) -> Result<EnclosureIndex, EnclosureError> {
    let n = scene.len();
    if n < 2 {
        return Err(EnclosureError::TooFewRegions(n));
    }
    let violations = gp_check(scene);
    if !violations.is_empty() {
        return Err(BuildError::GeneralPosition(violations).into());
    }
    let obstacles: Vec<Obstacle> = scene
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| Obstacle::from_region(i, r))
        .collect::<Result<_, _>>()
        .map_err(BuildError::from)?;
    let u = top_level(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let copy_seeds: Vec<u64> = (0..COPIES).map(|_| rng.gen()).collect();
    let copies = copy_seeds
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| build_copy(scene, &obstacles, u, s, i, &config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EnclosureIndex { scene: scene.clone(), n, u, copies, config, seed })
}

fn build_copy(
    scene: &Scene,
    obstacles: &[Obstacle],
    u: usize,
    seed: u64,
    copy: usize,
    config: &EnclosureConfig,
) -> Result<Copy, EnclosureError> {
    let n = scene.len();
    let opts = BuildOptions { collect_conflicts: false, keep_level_conflicts: false, check_general_position: false };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..=config.rebuild_budget {
        let perm = insertion_order(n, rng.gen());
        let top = (1usize << u).min(n);
        let build = build_vd_with_order(scene, perm[..top].to_vec(), Mode::Complement, &opts)?;
        let mut rank = vec![usize::MAX; n];
        for (pos, &r) in perm.iter().enumerate() {
            rank[r] = pos;
        }
        let levels: Vec<Level> = (0..=u)
            .map(|j| {
                let time = 1usize << j;
                let mut conflicts: HashMap<usize, Vec<usize>> = build
                    .dag
                    .alive_at(time)
                    .into_iter()
                    .filter(|&v| build.dag.nodes[v].status != NodeStatus::Inactive)
                    .map(|v| (v, Vec::new()))
                    .collect();
                for (id, o) in obstacles.iter().enumerate().filter(|(id, _)| rank[*id] >= time) {
                    for v in build.dag.meeting_at(o, time) {
                        conflicts.entry(v).or_default().push(id);
                    }
                }
                Level { j, time, conflicts }
            })
            .collect();
        let psi = levels.last().map_or(1, |l| l.conflicts.len());
        let cap = config.size_c0 * ((n * n + psi) as f64) * (n as f64).powf(config.eps);
        let copy_struct = Copy { perm, dag: build.dag, levels, rebuilds: attempt };
        if (copy_struct.size() as f64) <= cap {
            return Ok(copy_struct);
        }
    }
    Err(EnclosureError::RebuildBudgetExceeded { copy, attempts: config.rebuild_budget })
}

impl EnclosureIndex {
    pub fn size(&self) -> usize {
        self.copies.iter().map(Copy::size).sum()
    }

    pub fn query(&self, q: &Point3) -> Result<Vec<usize>, EnclosureError> {
        self.query_with_stats(q).map(|(ids, _)| ids)
    }

    /// Regions whose interior contains `q`, with the work done to find them.
    pub fn query_with_stats(&self, q: &Point3) -> Result<(Vec<usize>, EnclosureQueryStats), EnclosureError> {
        if !self.scene.bbox.contains(q) {
            return Err(EnclosureError::OutOfBounds);
        }
        let (n, u) = (self.n, self.u);
        let mut nodes: Vec<Vec<usize>> = Vec::with_capacity(COPIES);
        let mut nu = Vec::with_capacity(COPIES);
        for copy in &self.copies {
            let mut here = Vec::with_capacity(u + 1);
            let mut first = u + 1;
            for j in 0..=u {
                let v = copy.dag.locate_id(q, 1 << j).map_err(|_| EnclosureError::OutOfBounds)?;
                if copy.dag.nodes[v].status == NodeStatus::Inactive {
                    first = j;
                    break;
                }
                here.push(v);
            }
            nodes.push(here);
            nu.push(first);
        }
        let mut stats = EnclosureQueryStats { nu, ..Default::default() };
        let mut k = 1usize;
        loop {
            stats.rounds += 1;
            stats.k = k;
            let l = floor_log2(n / k);
            let mut pick = None;
            'levels: for j in (0..=l.min(u)).rev() {
                let bound = self.config.markov_c * (1u64 << (l - j)) as f64 * n as f64 / (1u64 << j) as f64;
                for (i, copy) in self.copies.iter().enumerate() {
                    if j >= stats.nu[i] {
                        continue;
                    }
                    let list = &copy.levels[j].conflicts[&nodes[i][j]];
                    if list.len() as f64 <= bound {
                        pick = Some((i, j, list));
                        break 'levels;
                    }
                }
            }
            let all: Vec<usize>;
            let candidates: &[usize] = match pick {
                Some((_, _, list)) => list,
                None => {
                    all = (0..n).collect();
                    &all
                }
            };
            stats.source = pick.map(|(i, j, _)| (i, j));
            stats.scanned += candidates.len();
            let found: Vec<usize> =
                candidates.iter().copied().filter(|&r| self.scene.regions[r].contains_strictly(q)).collect();
            if found.len() > k && k < n {
                k *= 2;
                continue;
            }
            stats.reported = found.len();
            return Ok((found, stats));
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EnclosureError> {
        let file = IndexFile {
            scene: self.scene.to_json_string(),
            n: self.n,
            u: self.u,
            copies: self.copies.clone(),
            config: self.config.clone(),
            seed: self.seed,
        };
        let bytes = bincode::serialize(&file).map_err(|e| EnclosureError::Io(e.to_string()))?;
        std::fs::write(path, bytes).map_err(|e| EnclosureError::Io(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EnclosureIndex, EnclosureError> {
        let bytes = std::fs::read(path).map_err(|e| EnclosureError::Io(e.to_string()))?;
        let file: IndexFile = bincode::deserialize(&bytes).map_err(|e| EnclosureError::Io(e.to_string()))?;
        let scene = Scene::from_json_str(&file.scene).map_err(|e| EnclosureError::Io(e.to_string()))?;
        Ok(EnclosureIndex { scene, n: file.n, u: file.u, copies: file.copies, config: file.config, seed: file.seed })
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    scene: String,
    n: usize,
    u: usize,
    copies: Vec<Copy>,
    config: EnclosureConfig,
    seed: u64,
}
