use serde::{Deserialize, Serialize};

use crate::error::BuildError;
use crate::exact::Point3;
use crate::scene::BBox;
use crate::vd::{interiors_meet, Obstacle, Prism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    /// Live leaf of the decomposition.
    Active,
    /// Live leaf lying inside the union (complement builds only).
    Inactive,
    /// Replaced by the pieces of a split.
    Split,
    /// Replaced during a clean-up merge.
    Merged,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Node {
    pub prism: Prism,
    pub status: NodeStatus,
    /// Children in increasing id order.
    pub children: Vec<usize>,
    /// Number of inserted regions when the node was created.
    pub born: usize,
    /// Number of inserted regions when the node was replaced.
    pub retired: Option<usize>,
    /// Longest path from the root.
    pub depth: usize,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// True iff the node belongs to the decomposition after `t` insertions (and the clean-up at `t`).
    pub fn alive_at(&self, t: usize) -> bool {
        self.born <= t && self.retired.is_none_or(|r| r > t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HistoryDag {
    pub nodes: Vec<Node>,
    pub bbox: BBox,
}

impl HistoryDag {
    pub fn new(root: Prism, bbox: BBox) -> HistoryDag {
        HistoryDag {
            nodes: vec![Node { prism: root, status: NodeStatus::Active, children: Vec::new(), born: 0, retired: None, depth: 0 }],
            bbox,
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn push(&mut self, prism: Prism, status: NodeStatus, born: usize, parents: &[usize]) -> usize {
        let depth = 1 + parents.iter().map(|&p| self.nodes[p].depth).max().unwrap_or(0);
        self.nodes.push(Node { prism, status, children: Vec::new(), born, retired: None, depth });
        self.nodes.len() - 1
    }

    pub fn retire(&mut self, v: usize, status: NodeStatus, t: usize, mut children: Vec<usize>) {
        children.sort_unstable();
        let n = &mut self.nodes[v];
        n.status = status;
        n.retired = Some(t);
        n.children = children;
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_leaf())
    }

    /// Node ids of the decomposition after `t` insertions.
    pub fn alive_at(&self, t: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].alive_at(t)).collect()
    }

    pub fn max_leaf_depth(&self) -> usize {
        self.leaves().map(|(_, n)| n.depth).max().unwrap_or(0)
    }

    /// Walks from the root to the node alive at time `t` whose closed prism contains `p`,
    /// preferring the smallest child id at every step.
    pub fn locate(&self, p: &Point3, t: usize) -> Result<&Node, BuildError> {
        self.locate_id(p, t).map(|v| &self.nodes[v])
    }

    /// Ids of the nodes alive at time `t`, outside the union, whose interior meets `o`.
    pub fn meeting_at(&self, o: &Obstacle, t: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            let node = &self.nodes[v];
            if !interiors_meet(&node.prism, o) {
                continue;
            }
            if node.alive_at(t) {
                if node.status != NodeStatus::Inactive {
                    out.push(v);
                }
                continue;
            }
            for &c in &node.children {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn locate_id(&self, p: &Point3, t: usize) -> Result<usize, BuildError> {
        if !self.bbox.contains(p) {
            return Err(BuildError::OutOfBounds);
        }
        let mut v = 0;
        loop {
            let node = &self.nodes[v];
            if node.alive_at(t) || node.is_leaf() {
                return Ok(v);
            }
            v = *node
                .children
                .iter()
                .find(|&&c| self.nodes[c].prism.contains(p))
                .expect("children cover their parent");
        }
    }
}
