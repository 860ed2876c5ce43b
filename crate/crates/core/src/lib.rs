//! Uniform sampling of bipartite, directed and undirected graphs with fixed
//! degree sequence via curveball trades.
//!
//! A graph is stored as its *adjacency set representation*: one index set per
//! vertex (or per bipartite row). Every Markov chain in [`chains`] rewires
//! such a representation while keeping all degrees fixed:
//!
//! * pairwise trades (the classic curveball move and its directed and
//!   undirected variants),
//! * global trades, which pair up *all* sets via a random 2-partition and
//!   trade simultaneously,
//! * edge switching baselines, and the "good shuffle" variants that never
//!   waste a step on a zero-size trade.
//!
//! [`degseq`] decides realisability of directed degree sequences through
//! corrected Ferrers matrices and finds induced cycle sets (vertex triples
//! frozen into a directed triangle in every realisation) in linear time.
//! Pre-orienting those triples at random makes the directed chains sample
//! uniformly over *all* realisations.
//!
//! [`exactlab`] is the verification side: it enumerates all realisations of
//! a small degree sequence, builds the exact (rational) transition matrix of
//! any chain, and checks symmetry, ergodicity, component structure and
//! convergence to uniform.
//!
//! The crate is `no_std` (it allocates, but performs no IO); file formats,
//! generators and the command line live in the companion `curveball` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chains;
pub mod degseq;
pub mod exactlab;
pub mod graph;
pub mod partition;

pub use chains::{ChainError, ChainKind, StepRecord, TradeContext};
pub use degseq::{DegSeqError, DirectedDegreeSequence, FerrersProfile, InducedCycleSet};
pub use graph::{
    perturbation_score, AdjacencySets, Degrees, EdgeList, Flavor, GraphError, Violation,
};
pub use partition::{count_two_partitions, sample_two_partition, TwoPartition};
