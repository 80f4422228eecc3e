use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Statistics of one clean-up round.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: usize,
    /// Round exponent: the round ends after `size` insertions with `size <= 2^k`.
    pub k: usize,
    pub size: usize,
    /// Prisms of the decomposition after the round.
    pub prisms: usize,
    /// `|S_τ|` for every prism: regions not yet inserted whose interior meets it.
    pub conflicts: Vec<usize>,
    /// `|S_{τ,k}|`: the part of `S_τ` inserted during the next round.
    pub next_conflicts: Vec<usize>,
    pub millis: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildTrace {
    pub rounds: Vec<RoundStats>,
    pub max_depth: usize,
}

impl BuildTrace {
    pub const CSV_HEADER: &'static str = "round,k,size_Rk,prisms,sum_conflicts,max_conflict,millis";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rounds {
            let sum: usize = r.conflicts.iter().sum();
            let max = r.conflicts.iter().copied().max().unwrap_or(0);
            writeln!(s, "{},{},{},{},{},{},{:.3}", r.round, r.k, r.size, r.prisms, sum, max, r.millis).unwrap();
        }
        s
    }

    pub fn final_prisms(&self) -> usize {
        self.rounds.last().map_or(1, |r| r.prisms)
    }
}

/// Per round, `Σ |S_τ|^t` and `Σ |S_{τ,k}|^t`.
pub fn conflict_stats(trace: &BuildTrace, t: u32) -> Vec<(u128, u128)> {
    let pow = |xs: &[usize]| xs.iter().map(|&x| (x as u128).pow(t)).sum::<u128>();
    trace.rounds.iter().map(|r| (pow(&r.conflicts), pow(&r.next_conflicts))).collect()
}
