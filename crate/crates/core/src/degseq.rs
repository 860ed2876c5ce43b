//! Directed degree sequence machinery: corrected Ferrers matrices, the
//! Chen–Fulkerson–Ryser realisability test and linear-time detection of
//! induced cycle sets.
//!
//! An *induced cycle set* is a triple of vertices that forms a directed
//! 3-cycle in every realisation of the degree sequence. Such triples split
//! the state graph of the directed chains into `2^k` isomorphic components,
//! so samplers pre-orient them (see [`crate::chains::pre_orient_cycle_sets`]).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::Degrees;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegSeqError {
    /// Out-degree of the named vertex exceeds the number of vertices; the
    /// corresponding Ferrers row cannot be laid out at all.
    DegreeTooLarge(usize),
    NotRealizable,
}

impl fmt::Display for DegSeqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegSeqError::DegreeTooLarge(i) => {
                write!(f, "out-degree of vertex {i} exceeds vertex count")
            }
            DegSeqError::NotRealizable => write!(f, "degree sequence has no realisation"),
        }
    }
}

impl core::error::Error for DegSeqError {}

/// A directed degree sequence: one `(in, out)` pair per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedDegreeSequence {
    pairs: Vec<(usize, usize)>,
}

/// Column sums and partial sums of the corrected Ferrers matrix of a
/// sequence, together with the sorting permutation that produced them.
///
/// The corrected Ferrers matrix packs the out-degree of each vertex into
/// the leftmost columns while keeping the diagonal zero. Only its column
/// sums are ever materialised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FerrersProfile {
    /// `sort_permutation[original] = position` in non-increasing
    /// lexicographic order (stable on ties).
    pub sort_permutation: Vec<usize>,
    /// Column sums `f_1..f_n`, indexed from 0.
    pub column_sums: Vec<usize>,
    /// `partial_sums[l] = sum over the first l sorted positions of
    /// (column sum - in-degree)`; length `n + 1`, `partial_sums[0] = 0`.
    pub partial_sums: Vec<i64>,
}

/// A vertex triple forced into a directed triangle by the degree sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InducedCycleSet {
    /// Consecutive positions in the sorted sequence (0-based).
    pub sorted: [usize; 3],
    /// The same vertices under their original labels.
    pub original: [usize; 3],
}

impl DirectedDegreeSequence {
    /// `pairs[i] = (in-degree, out-degree)` of vertex `i`.
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        DirectedDegreeSequence { pairs }
    }

    /// Degree sequence of a directed representation.
    pub fn from_degrees(view: &Degrees) -> Option<Self> {
        match view {
            Degrees::Directed(pairs) => Some(DirectedDegreeSequence { pairs: pairs.clone() }),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.pairs.len()).collect();
        // stable, so ties keep their original relative order
        order.sort_by(|&x, &y| self.pairs[y].cmp(&self.pairs[x]));
        order
    }

    /// Column and partial sums of the corrected Ferrers matrix, in O(n)
    /// beyond the sort: each row contributes one interval of 1s (with the
    /// diagonal skipped), accumulated in a difference array.
    pub fn corrected_ferrers_profile(&self) -> Result<FerrersProfile, DegSeqError> {
        let n = self.pairs.len();
        let order = self.sorted_order();
        let mut sort_permutation = vec![0usize; n];
        for (pos, &orig) in order.iter().enumerate() {
            sort_permutation[orig] = pos;
        }

        // diff[c] accumulates interval starts/ends; column sums by prefix sum
        let mut diff = vec![0i64; n + 1];
        for (pos, &orig) in order.iter().enumerate() {
            let b = self.pairs[orig].1;
            if b > n {
                return Err(DegSeqError::DegreeTooLarge(orig));
            }
            if b == 0 {
                continue;
            }
            if b <= pos {
                // the run of 1s ends before the diagonal
                diff[0] += 1;
                diff[b] -= 1;
            } else {
                // the run spills over the diagonal, which stays 0; rows
                // whose run would leave the matrix are truncated at n
                let end = (b + 1).min(n);
                diff[0] += 1;
                diff[end] -= 1;
                diff[pos] -= 1;
                diff[pos + 1] += 1;
            }
        }
        let mut column_sums = vec![0usize; n];
        let mut acc = 0i64;
        for c in 0..n {
            acc += diff[c];
            column_sums[c] = acc as usize;
        }

        let mut partial_sums = vec![0i64; n + 1];
        for (pos, &orig) in order.iter().enumerate() {
            let a = self.pairs[orig].0;
            partial_sums[pos + 1] = partial_sums[pos] + column_sums[pos] as i64 - a as i64;
        }

        Ok(FerrersProfile { sort_permutation, column_sums, partial_sums })
    }

    /// Chen–Fulkerson–Ryser: the sequence has a realisation as a simple
    /// directed graph iff in- and out-degrees balance and no partial sum
    /// of the corrected Ferrers profile goes negative.
    pub fn is_realizable(&self) -> bool {
        let sum_in: usize = self.pairs.iter().map(|&(a, _)| a).sum();
        let sum_out: usize = self.pairs.iter().map(|&(_, b)| b).sum();
        if sum_in != sum_out {
            return false;
        }
        match self.corrected_ferrers_profile() {
            Ok(profile) => profile.partial_sums.iter().all(|&s| s >= 0),
            Err(_) => false,
        }
    }

    /// All induced cycle sets, reported both in sorted positions and in
    /// original labels. A triple of consecutive sorted positions starting
    /// at `p` qualifies iff its three pairs are equal with out-degree
    /// `p + 1` and the surrounding partial sums are exactly `0,1,1,0`.
    ///
    /// Qualifying triples never overlap, so at most n/3 are returned.
    pub fn induced_cycle_sets(&self) -> Result<Vec<InducedCycleSet>, DegSeqError> {
        if !self.is_realizable() {
            return Err(DegSeqError::NotRealizable);
        }
        let n = self.pairs.len();
        let order = self.sorted_order();
        let profile = self.corrected_ferrers_profile()?;
        let s = &profile.partial_sums;

        let mut found = Vec::new();
        let mut p = 0;
        while p + 2 < n {
            let first = self.pairs[order[p]];
            if first == self.pairs[order[p + 1]]
                && first == self.pairs[order[p + 2]]
                && first.1 == p + 1
                && s[p] == 0
                && s[p + 1] == 1
                && s[p + 2] == 1
                && s[p + 3] == 0
            {
                found.push(InducedCycleSet {
                    sorted: [p, p + 1, p + 2],
                    original: [order[p], order[p + 1], order[p + 2]],
                });
                p += 3;
            } else {
                p += 1;
            }
        }
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ferrers_profile_of_three_cycle_sequence() {
        // hand-built 3x3 corrected Ferrers matrix for (1,1)^3:
        // rows place one 1 each, skipping the diagonal -> columns (2,1,0)
        let s = DirectedDegreeSequence::new(vec![(1, 1); 3]);
        let p = s.corrected_ferrers_profile().unwrap();
        assert_eq!(p.column_sums, [2, 1, 0]);
        assert_eq!(p.partial_sums, [0, 1, 1, 0]);
        assert_eq!(p.sort_permutation, [0, 1, 2]);
    }

    #[test]
    fn ferrers_profile_of_zero_sequence() {
        let s = DirectedDegreeSequence::new(vec![(0, 0); 4]);
        let p = s.corrected_ferrers_profile().unwrap();
        assert_eq!(p.column_sums, [0; 4]);
        assert_eq!(p.partial_sums, [0; 5]);
    }

    #[test]
    fn ferrers_profile_single_vertex_loop_demand() {
        // the single 1 would land on the forced-zero diagonal
        let s = DirectedDegreeSequence::new(vec![(1, 1)]);
        let p = s.corrected_ferrers_profile().unwrap();
        assert_eq!(p.column_sums, [0]);
        assert_eq!(p.partial_sums, [0, -1]);
        assert!(!s.is_realizable());
    }

    #[test]
    fn out_degree_above_vertex_count_is_rejected() {
        // b = 3 = n still lays out, truncated at the matrix edge: the last
        // sorted row keeps only columns 1 and 2 of its run
        let s = DirectedDegreeSequence::new(vec![(0, 3), (2, 0), (1, 0)]);
        let p = s.corrected_ferrers_profile().unwrap();
        assert_eq!(p.sort_permutation, [2, 0, 1]);
        assert_eq!(p.column_sums, [1, 1, 0]);
        assert_eq!(p.partial_sums, [0, -1, -1, -1]);
        assert!(!s.is_realizable());

        let s = DirectedDegreeSequence::new(vec![(0, 4), (2, 0), (2, 0)]);
        assert_eq!(s.corrected_ferrers_profile().unwrap_err(), DegSeqError::DegreeTooLarge(0));
        assert!(!s.is_realizable());
    }

    #[test]
    fn realizability_examples() {
        assert!(DirectedDegreeSequence::new(vec![(1, 1); 3]).is_realizable());
        assert!(!DirectedDegreeSequence::new(vec![(1, 1)]).is_realizable());
        assert!(DirectedDegreeSequence::new(vec![(0, 0); 2]).is_realizable());
        // unbalanced sums
        assert!(!DirectedDegreeSequence::new(vec![(1, 0), (0, 0)]).is_realizable());
    }

    #[test]
    fn cycle_set_in_three_cycle_sequence() {
        let s = DirectedDegreeSequence::new(vec![(1, 1); 3]);
        let sets = s.induced_cycle_sets().unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].sorted, [0, 1, 2]);
        assert_eq!(sets[0].original, [0, 1, 2]);
    }

    #[test]
    fn two_cycle_has_no_cycle_set() {
        let s = DirectedDegreeSequence::new(vec![(1, 1); 2]);
        assert_eq!(s.induced_cycle_sets().unwrap(), []);
    }

    #[test]
    fn regular_two_sequence_has_no_cycle_set() {
        let s = DirectedDegreeSequence::new(vec![(2, 2); 4]);
        assert_eq!(s.induced_cycle_sets().unwrap(), []);
    }

    #[test]
    fn unrealizable_sequence_is_rejected() {
        let s = DirectedDegreeSequence::new(vec![(1, 1)]);
        assert_eq!(s.induced_cycle_sets().unwrap_err(), DegSeqError::NotRealizable);
    }

    #[test]
    fn cycle_set_reports_original_labels() {
        // 3-cycle on vertices 1,3,4 interleaved with isolated vertices,
        // so the sort has to permute
        let s = DirectedDegreeSequence::new(vec![(0, 0), (1, 1), (0, 0), (1, 1), (1, 1)]);
        let sets = s.induced_cycle_sets().unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].sorted, [0, 1, 2]);
        assert_eq!(sets[0].original, [1, 3, 4]);
    }
}
