//! Lazy randomized incremental construction of vertical decompositions.
//!
//! Regions are inserted in a seeded random order. Each insertion locates the prisms
//! whose interior the new region meets by walking the history DAG, and splits them.
//! At insertion counts 1, 2, 4, ... and n a clean-up pass re-canonicalizes every
//! class of prisms (same floor, ceiling and label) that changed since the previous
//! pass, so the final decomposition does not depend on the insertion order.

mod dag;
mod trace;

pub use dag::{HistoryDag, Node, NodeStatus};
pub use trace::{conflict_stats, BuildTrace, RoundStats};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::BuildError;
use crate::exact::{canonical_trapezoids, Point3, Trapezoid};
use crate::general_position::gp_check;
use crate::scene::Scene;
use crate::vd::{interiors_meet, split_prism_if_crossing, wall_pairs, Obstacle, Prism, SurfaceId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Decompose the complement of the union; prisms inside regions become inactive.
    Complement,
    /// Decompose the whole arrangement; every prism is labeled with the regions containing it.
    Arrangement,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "complement" => Ok(Mode::Complement),
            "arrangement" => Ok(Mode::Arrangement),
            _ => Err(format!("unknown mode '{s}' (complement, arrangement)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Record conflict-list sizes at every clean-up round.
    pub collect_conflicts: bool,
    /// Keep the conflict list of every live prism at every clean-up round.
    pub keep_level_conflicts: bool,
    pub check_general_position: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { collect_conflicts: true, keep_level_conflicts: false, check_general_position: true }
    }
}

/// Undirected wall-sharing graph over the final prisms (indices into [`VdBuild::prisms`]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl AdjacencyGraph {
    pub fn of(prisms: &[Prism]) -> AdjacencyGraph {
        let refs: Vec<&Prism> = prisms.iter().collect();
        AdjacencyGraph { vertices: prisms.len(), edges: wall_pairs(&refs) }
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        (0..self.vertices).filter(|&v| find(&mut parent, v) == v).count()
    }
}

/// Conflict lists of the live prisms right after one clean-up round.
#[derive(Clone, Debug, Default)]
pub struct LevelSnapshot {
    /// Number of regions inserted.
    pub time: usize,
    /// Node id to the regions (not yet inserted) whose interior meets that prism.
    pub conflicts: HashMap<usize, Vec<usize>>,
}

/// Result of a build.
#[derive(Clone, Debug)]
pub struct VdBuild {
    pub mode: Mode,
    /// Final prisms in canonical order: uncovered prisms in complement mode, all prisms otherwise.
    pub prisms: Vec<Prism>,
    /// History DAG node of each final prism.
    pub nodes: Vec<usize>,
    pub dag: HistoryDag,
    pub adjacency: AdjacencyGraph,
    pub trace: BuildTrace,
    /// Insertion order of the region ids.
    pub order: Vec<usize>,
    pub levels: Vec<LevelSnapshot>,
}

impl VdBuild {
    /// The live leaf containing `p` after all insertions.
    pub fn locate(&self, p: &Point3) -> Result<&Node, BuildError> {
        self.dag.locate(p, usize::MAX)
    }
}

pub fn build_complement_vd(scene: &Scene, seed: u64) -> Result<VdBuild, BuildError> {
    build_vd(scene, seed, Mode::Complement, &BuildOptions::default())
}

pub fn build_arrangement_vd(scene: &Scene, seed: u64) -> Result<VdBuild, BuildError> {
    build_vd(scene, seed, Mode::Arrangement, &BuildOptions::default())
}

/// Seeded insertion order.
pub fn insertion_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

pub fn build_vd(scene: &Scene, seed: u64, mode: Mode, opts: &BuildOptions) -> Result<VdBuild, BuildError> {
    build_vd_with_order(scene, insertion_order(scene.len(), seed), mode, opts)
}

/// Builds with an explicit insertion order (a permutation of a subset of the region ids).
pub fn build_vd_with_order(
    scene: &Scene,
    order: Vec<usize>,
    mode: Mode,
    opts: &BuildOptions,
) -> Result<VdBuild, BuildError> {
    if opts.check_general_position {
        let v = gp_check(scene);
        if !v.is_empty() {
            return Err(BuildError::GeneralPosition(v));
        }
    }
    let obstacles: Vec<Obstacle> =
        scene.regions.iter().enumerate().map(|(i, r)| Obstacle::from_region(i, r)).collect::<Result<_, _>>()?;
    let mut b = Builder {
        mode,
        obstacles: &obstacles,
        order: &order,
        dag: HistoryDag::new(Prism::root(&scene.bbox), scene.bbox.clone()),
        active: BTreeSet::from([0]),
        dirty: BTreeSet::new(),
        stamp: Vec::new(),
        last_cleanup: 0,
        trace: BuildTrace::default(),
        levels: Vec::new(),
        opts,
        clock: Instant::now(),
    };
    let n = order.len();
    if n == 0 {
        b.cleanup(0);
    }
    for i in 1..=n {
        b.insert(i);
        if i.is_power_of_two() || i == n {
            b.cleanup(i);
        }
    }
    let mut finals: Vec<(Prism, usize)> = b.active.iter().map(|&v| (b.dag.nodes[v].prism.clone(), v)).collect();
    finals.sort();
    let (prisms, nodes): (Vec<Prism>, Vec<usize>) = finals.into_iter().unzip();
    let adjacency = AdjacencyGraph::of(&prisms);
    let Builder { dag, mut trace, levels, .. } = b;
    trace.max_depth = dag.max_leaf_depth();
    Ok(VdBuild { mode, prisms, nodes, dag, adjacency, trace, order, levels })
}

type ClassKey = (SurfaceId, SurfaceId, Vec<usize>);

fn class_key(p: &Prism) -> ClassKey {
    (p.floor, p.ceiling, p.label.clone())
}

struct Builder<'a> {
    mode: Mode,
    obstacles: &'a [Obstacle],
    order: &'a [usize],
    dag: HistoryDag,
    /// Live leaves that still take part in the construction.
    active: BTreeSet<usize>,
    /// Classes changed since the last clean-up.
    dirty: BTreeSet<ClassKey>,
    stamp: Vec<usize>,
    last_cleanup: usize,
    trace: BuildTrace,
    levels: Vec<LevelSnapshot>,
    opts: &'a BuildOptions,
    clock: Instant,
}

impl Builder<'_> {
    /// Active leaves whose interior meets obstacle `o`, found by walking the DAG.
    fn conflicting_leaves(&mut self, o: &Obstacle, mark: usize) -> Vec<usize> {
        self.stamp.resize(self.dag.nodes.len(), 0);
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        self.stamp[0] = mark;
        while let Some(v) = stack.pop() {
            let node = &self.dag.nodes[v];
            if node.children.is_empty() {
                if node.status == NodeStatus::Active {
                    out.push(v);
                }
                continue;
            }
            if !interiors_meet(&node.prism, o) {
                continue;
            }
            for &c in &node.children {
                if self.stamp[c] != mark {
                    self.stamp[c] = mark;
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn insert(&mut self, i: usize) {
        let o = &self.obstacles[self.order[i - 1]];
        for v in self.conflicting_leaves(o, i) {
            let Some(pieces) = split_prism_if_crossing(&self.dag.nodes[v].prism, o) else { continue };
            self.active.remove(&v);
            self.dirty.insert(class_key(&self.dag.nodes[v].prism));
            let mut kids = Vec::with_capacity(pieces.len());
            for p in pieces {
                let status = if self.mode == Mode::Complement && p.is_covered() {
                    NodeStatus::Inactive
                } else {
                    NodeStatus::Active
                };
                if status == NodeStatus::Active {
                    self.dirty.insert(class_key(&p));
                }
                let id = self.dag.push(p, status, i, &[v]);
                if status == NodeStatus::Active {
                    self.active.insert(id);
                }
                kids.push(id);
            }
            self.dag.retire(v, NodeStatus::Split, i, kids);
        }
    }

    fn cleanup(&mut self, t: usize) {
        let dirty = std::mem::take(&mut self.dirty);
        let mut classes: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
        for &v in &self.active {
            let key = class_key(&self.dag.nodes[v].prism);
            if dirty.contains(&key) {
                classes.entry(key).or_default().push(v);
            }
        }
        for members in classes.into_values() {
            self.recanonicalize(&members, t);
        }
        self.last_cleanup = t;
        self.record_round(t);
    }

    /// Replaces a class of prisms by the canonical trapezoidation of their union.
    fn recanonicalize(&mut self, members: &[usize], t: usize) {
        let bases: Vec<Trapezoid> = members.iter().map(|&v| self.dag.nodes[v].prism.base.clone()).collect();
        let canon = canonical_trapezoids(bases.clone());
        let existing: HashMap<&Trapezoid, usize> = bases.iter().zip(members).map(|(b, &v)| (b, v)).collect();
        let fresh: Vec<Trapezoid> = canon.into_iter().filter(|c| !existing.contains_key(c)).collect();
        if fresh.is_empty() {
            return;
        }
        let keep: BTreeSet<&Trapezoid> =
            bases.iter().filter(|b| !fresh.iter().any(|f| f.overlaps(b))).collect();
        let template = self.dag.nodes[members[0]].prism.clone();
        let retired: Vec<usize> = members.iter().copied().filter(|&v| !keep.contains(&self.dag.nodes[v].prism.base)).collect();
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        for base in fresh {
            let parents: Vec<usize> =
                retired.iter().copied().filter(|&v| self.dag.nodes[v].prism.base.overlaps(&base)).collect();
            let id = self.dag.push(template.with_base(base), NodeStatus::Active, t, &parents);
            self.active.insert(id);
            for p in parents {
                children.entry(p).or_default().push(id);
            }
        }
        for v in retired {
            self.active.remove(&v);
            let kids = children.remove(&v).unwrap_or_default();
            self.dag.retire(v, NodeStatus::Merged, t, kids);
        }
    }

    fn record_round(&mut self, t: usize) {
        let k = if t == 0 { 0 } else { t.next_power_of_two().trailing_zeros() as usize };
        let mut stats = RoundStats {
            round: self.trace.rounds.len(),
            k,
            size: t,
            prisms: self.active.len(),
            conflicts: Vec::new(),
            next_conflicts: Vec::new(),
            millis: self.clock.elapsed().as_secs_f64() * 1e3,
        };
        if self.opts.collect_conflicts || self.opts.keep_level_conflicts {
            let remaining: Vec<usize> = self.order[t..].to_vec();
            let next_end = (2 * t).max(1).min(self.order.len());
            let mut snapshot = LevelSnapshot { time: t, conflicts: HashMap::new() };
            for &v in &self.active {
                let prism = &self.dag.nodes[v].prism;
                let mut list: Vec<usize> = Vec::new();
                let mut next = 0;
                for (pos, &r) in remaining.iter().enumerate() {
                    if interiors_meet(prism, &self.obstacles[r]) {
                        list.push(r);
                        if t + pos < next_end {
                            next += 1;
                        }
                    }
                }
                stats.conflicts.push(list.len());
                stats.next_conflicts.push(next);
                if self.opts.keep_level_conflicts {
                    list.sort_unstable();
                    snapshot.conflicts.insert(v, list);
                }
            }
            if self.opts.keep_level_conflicts {
                self.levels.push(snapshot);
            }
        }
        self.trace.rounds.push(stats);
    }
}

/// Indices into `build.prisms` of the final prisms whose interior meets `o`.
pub fn conflicts_of(build: &VdBuild, o: &Obstacle) -> Vec<usize> {
    let index: HashMap<usize, usize> = build.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out: Vec<usize> = build.dag.meeting_at(o, usize::MAX).iter().filter_map(|v| index.get(v).copied()).collect();
    out.sort_unstable();
    out
}

/// Live leaf of the history DAG at time `t` containing `p`; ties go to the smallest node id.
pub fn locate<'a>(dag: &'a HistoryDag, p: &Point3) -> Result<&'a Prism, BuildError> {
    dag.locate(p, usize::MAX).map(|n| &n.prism)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Scalar;
    use crate::oracle::{boundary_free, complement_volume, depth, prism_intersection_volume};
    use crate::scene::{gen_scene, BBox, GenParams, SceneKind};

    fn check(scene: &Scene, b: &VdBuild) {
        let total: Scalar = b.prisms.iter().map(Prism::volume).sum();
        match b.mode {
            Mode::Complement => assert_eq!(total, complement_volume(scene).unwrap()),
            Mode::Arrangement => assert_eq!(total, scene.bbox.volume()),
        }
        for (i, p) in b.prisms.iter().enumerate() {
            assert!(p.volume().is_positive());
            for q in &b.prisms[i + 1..] {
                assert!(prism_intersection_volume(p, q).is_zero());
            }
            for r in &scene.regions {
                assert!(boundary_free(p, r), "{p:?}");
            }
            let probe = p.interior_point();
            assert_eq!(depth(scene, &probe), p.label.len());
        }
    }

    fn scene(kind: SceneKind, n: usize, seed: u64) -> Scene {
        gen_scene(kind, n, seed, &GenParams::default()).unwrap()
    }

    #[test]
    fn empty_scene_is_one_prism() {
        let s = Scene::new(BBox::cube(0, 4), vec![], 12).unwrap();
        let b = build_complement_vd(&s, 1).unwrap();
        assert_eq!(b.prisms.len(), 1);
        assert_eq!(b.trace.rounds.len(), 1);
        check(&s, &b);
    }

    #[test]
    fn slab_gives_two_prisms() {
        let s = scene(SceneKind::Slabs, 1, 3);
        let b = build_complement_vd(&s, 0).unwrap();
        assert_eq!(b.prisms.len(), 2);
        assert_eq!(b.adjacency.components(), 2);
        check(&s, &b);
    }

    #[test]
    fn small_scenes_decompose_correctly() {
        for kind in [SceneKind::Boxes, SceneKind::Polytopes, SceneKind::Triangles] {
            for seed in 0..3 {
                let s = scene(kind, 5, seed);
                check(&s, &build_complement_vd(&s, seed).unwrap());
                check(&s, &build_arrangement_vd(&s, seed).unwrap());
            }
        }
    }

    #[test]
    fn output_does_not_depend_on_order() {
        let s = scene(SceneKind::Boxes, 8, 11);
        let a = build_complement_vd(&s, 1).unwrap();
        for seed in [2, 3, 4] {
            assert_eq!(build_complement_vd(&s, seed).unwrap().prisms, a.prisms);
        }
        let t = scene(SceneKind::Triangles, 6, 5);
        let a = build_arrangement_vd(&t, 1).unwrap();
        assert_eq!(build_arrangement_vd(&t, 9).unwrap().prisms, a.prisms);
    }

    #[test]
    fn locate_agrees_with_scan() {
        let s = scene(SceneKind::Boxes, 10, 2);
        let b = build_arrangement_vd(&s, 7).unwrap();
        for p in &b.prisms {
            let q = p.interior_point();
            assert_eq!(&b.locate(&q).unwrap().prism, p);
        }
        let out = crate::exact::Point3::from_ints(-1, 0, 0);
        assert!(matches!(b.locate(&out), Err(BuildError::OutOfBounds)));
    }

    #[test]
    fn trace_rounds_at_powers_of_two() {
        let s = scene(SceneKind::Boxes, 6, 1);
        let b = build_complement_vd(&s, 1).unwrap();
        let sizes: Vec<usize> = b.trace.rounds.iter().map(|r| r.size).collect();
        assert_eq!(sizes, vec![1, 2, 4, 6]);
        assert_eq!(b.trace.final_prisms(), b.prisms.len());
        assert!(b.trace.rounds.last().unwrap().conflicts.iter().all(|&c| c == 0));
        assert!(b.trace.to_csv().starts_with(BuildTrace::CSV_HEADER));
    }
}
