//! The Markov chain steps: pairwise trades for all flavors, global trades,
//! switching baselines, good-shuffle variants, cycle-set pre-orientation
//! and the chain runner.
//!
//! Every step preserves the degree sequence exactly and keeps the flavor
//! invariants (no forbidden self-loops, symmetry for undirected graphs).
//! Zero-size trades and rejected switch proposals consume a step as a lazy
//! repeat of the current state.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degseq::InducedCycleSet;
use crate::graph::{AdjacencySets, Flavor};
use crate::partition::sample_two_partition;

/// Which transition kernel drives the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChainKind {
    /// Pairwise trades on bipartite graphs or digraphs with loops.
    Curveball,
    DirectedCurveball,
    UndirectedCurveball,
    /// One simultaneous round of trades over a random 2-partition.
    GlobalCurveball,
    GlobalDirectedCurveball,
    /// Classic baseline: propose two random edges, switch if legal.
    Switching,
    /// Pick a set pair; apply a uniformly chosen size-one trade if any.
    AdjustedSwitching,
    /// Trade that never picks the zero-size option when another exists.
    GoodShuffleCurveball,
    GoodShuffleDirected,
    GoodShuffleUndirected,
}

impl ChainKind {
    pub const ALL: [ChainKind; 10] = [
        ChainKind::Curveball,
        ChainKind::DirectedCurveball,
        ChainKind::UndirectedCurveball,
        ChainKind::GlobalCurveball,
        ChainKind::GlobalDirectedCurveball,
        ChainKind::Switching,
        ChainKind::AdjustedSwitching,
        ChainKind::GoodShuffleCurveball,
        ChainKind::GoodShuffleDirected,
        ChainKind::GoodShuffleUndirected,
    ];

    /// Whether the kernel is defined on representations of this flavor.
    /// There is deliberately no global undirected kind: a trade touches
    /// side sets, so trades of different pairs are not independent.
    pub fn supports(self, flavor: Flavor) -> bool {
        use ChainKind::*;
        match self {
            Curveball | GlobalCurveball | GoodShuffleCurveball => {
                matches!(flavor, Flavor::Bipartite { .. } | Flavor::DirectedWithLoops)
            }
            DirectedCurveball | GlobalDirectedCurveball | GoodShuffleDirected => {
                matches!(flavor, Flavor::Directed)
            }
            UndirectedCurveball | GoodShuffleUndirected => matches!(flavor, Flavor::Undirected),
            Switching | AdjustedSwitching => true,
        }
    }

    pub fn is_global(self) -> bool {
        matches!(self, ChainKind::GlobalCurveball | ChainKind::GlobalDirectedCurveball)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::Curveball => "curveball",
            ChainKind::DirectedCurveball => "directed-curveball",
            ChainKind::UndirectedCurveball => "undirected-curveball",
            ChainKind::GlobalCurveball => "global-curveball",
            ChainKind::GlobalDirectedCurveball => "global-directed-curveball",
            ChainKind::Switching => "switching",
            ChainKind::AdjustedSwitching => "adjusted-switching",
            ChainKind::GoodShuffleCurveball => "good-shuffle-curveball",
            ChainKind::GoodShuffleDirected => "good-shuffle-directed",
            ChainKind::GoodShuffleUndirected => "good-shuffle-undirected",
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChainKind {
    type Err = UnknownChainKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChainKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or(UnknownChainKind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownChainKind;

impl fmt::Display for UnknownChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown chain kind")
    }
}

impl core::error::Error for UnknownChainKind {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainError {
    /// Fewer than two sets; no pair can be selected.
    TooFewSets { n: usize },
    IncompatibleKind { kind: ChainKind, flavor: Flavor },
    /// Cycle-set pre-orientation found no directed triangle on the triple.
    TriangleNotPresent { triple: [usize; 3] },
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainError::TooFewSets { n } => write!(f, "need at least 2 sets, have {n}"),
            ChainError::IncompatibleKind { kind, flavor } => {
                write!(f, "chain kind {kind} does not support flavor {flavor}")
            }
            ChainError::TriangleNotPresent { triple } => write!(
                f,
                "vertices {}, {}, {} do not form a directed triangle",
                triple[0], triple[1], triple[2]
            ),
        }
    }
}

impl core::error::Error for ChainError {}

/// The selected pair together with its exclusive index sets
/// (`A_i` minus `A_j` and protected indices, and vice versa).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TradeContext {
    pub i: usize,
    pub j: usize,
    /// Sorted elements of `A_i` not in `A_j` (and not `j` where loops are
    /// forbidden); the indices set `i` may give away.
    pub diff_i: Vec<usize>,
    pub diff_j: Vec<usize>,
}

impl TradeContext {
    pub fn new(rep: &AdjacencySets, i: usize, j: usize) -> Self {
        let protect = rep.flavor().forbids_loops();
        let a_i = rep.set(i);
        let a_j = rep.set(j);
        let diff_i = a_i
            .iter()
            .copied()
            .filter(|&x| !a_j.contains(&x) && !(protect && x == j))
            .collect();
        let diff_j = a_j
            .iter()
            .copied()
            .filter(|&x| !a_i.contains(&x) && !(protect && x == i))
            .collect();
        TradeContext { i, j, diff_i, diff_j }
    }

    /// Size of the exchangeable part of `A_i`.
    pub fn s_i(&self) -> usize {
        self.diff_i.len()
    }

    pub fn s_j(&self) -> usize {
        self.diff_j.len()
    }
}

/// What a single chain step did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub kind: ChainKind,
    /// `|B_i \ A_i|` per traded pair: one entry for pairwise kinds, one per
    /// partition pair for global kinds. Size zero means the pair repeated.
    pub trade_sizes: Vec<usize>,
    /// Always true; rejected switch proposals and zero-size trades count as
    /// lazy repeats, not rejections.
    pub accepted: bool,
}

impl StepRecord {
    fn single(kind: ChainKind, size: usize) -> Self {
        let mut trade_sizes = Vec::with_capacity(1);
        trade_sizes.push(size);
        StepRecord { kind, trade_sizes, accepted: true }
    }
}

fn require_pair_selectable(rep: &AdjacencySets) -> Result<usize, ChainError> {
    let n = rep.n();
    if n < 2 {
        Err(ChainError::TooFewSets { n })
    } else {
        Ok(n)
    }
}

fn require_flavor(rep: &AdjacencySets, kind: ChainKind) -> Result<(), ChainError> {
    if kind.supports(rep.flavor()) {
        Ok(())
    } else {
        Err(ChainError::IncompatibleKind { kind, flavor: rep.flavor() })
    }
}

/// Uniform unordered pair of distinct indices below `n`.
fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Applies the trade on `ctx` that hands `keep_for_i` (a sorted
/// `s_i`-subset of `diff_i ∪ diff_j`) to set `i` and the rest to set `j`.
/// For undirected flavors the side sets of all moved indices are updated
/// to keep the representation symmetric. Returns the trade size.
pub(crate) fn apply_trade_subset(
    rep: &mut AdjacencySets,
    ctx: &TradeContext,
    keep_for_i: &[usize],
) -> usize {
    debug_assert_eq!(keep_for_i.len(), ctx.s_i());
    let moved_to_i: Vec<usize> = keep_for_i
        .iter()
        .copied()
        .filter(|x| ctx.diff_j.binary_search(x).is_ok())
        .collect();
    let moved_to_j: Vec<usize> = ctx
        .diff_i
        .iter()
        .copied()
        .filter(|x| keep_for_i.binary_search(x).is_err())
        .collect();
    debug_assert_eq!(moved_to_i.len(), moved_to_j.len());

    let undirected = rep.flavor().is_undirected();
    let (i, j) = (ctx.i, ctx.j);
    let sets = rep.sets_mut();
    for &x in &moved_to_j {
        sets[i].remove(&x);
        sets[j].insert(x);
    }
    for &x in &moved_to_i {
        sets[j].remove(&x);
        sets[i].insert(x);
    }
    if undirected {
        // an index that changed sides is now adjacent to the other endpoint
        for &x in &moved_to_i {
            sets[x].remove(&j);
            sets[x].insert(i);
        }
        for &x in &moved_to_j {
            sets[x].remove(&i);
            sets[x].insert(j);
        }
    }
    moved_to_i.len()
}

/// Trades between sets `i` and `j`, drawing the redistributed subset by
/// shuffling the pooled differences. With `force_nonzero` the zero-size
/// outcome is re-drawn whenever a non-zero trade exists for the pair.
fn random_trade<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    i: usize,
    j: usize,
    rng: &mut R,
    force_nonzero: bool,
) -> usize {
    let ctx = TradeContext::new(rep, i, j);
    let s_i = ctx.s_i();
    let mut pool: Vec<usize> =
        ctx.diff_i.iter().chain(ctx.diff_j.iter()).copied().collect();
    if pool.is_empty() {
        return 0;
    }
    let reject_zero = force_nonzero && s_i > 0 && ctx.s_j() > 0;
    let mut keep;
    loop {
        pool.shuffle(rng);
        keep = pool[..s_i].to_vec();
        keep.sort_unstable();
        if !reject_zero || keep != ctx.diff_i {
            break;
        }
    }
    apply_trade_subset(rep, &ctx, &keep)
}

/// One curveball trade on a bipartite graph or digraph with loops.
pub fn trade_step_bipartite<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    require_flavor(rep, ChainKind::Curveball)?;
    let n = require_pair_selectable(rep)?;
    let (i, j) = random_pair(n, rng);
    let size = random_trade(rep, i, j, rng, false);
    Ok(StepRecord::single(ChainKind::Curveball, size))
}

/// One trade on a simple digraph; the pair's own indices are protected, so
/// no self-loop can appear.
pub fn trade_step_directed<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    require_flavor(rep, ChainKind::DirectedCurveball)?;
    let n = require_pair_selectable(rep)?;
    let (i, j) = random_pair(n, rng);
    let size = random_trade(rep, i, j, rng, false);
    Ok(StepRecord::single(ChainKind::DirectedCurveball, size))
}

/// One trade on a graph; side sets of moved indices are rewritten to keep
/// the representation symmetric.
pub fn trade_step_undirected<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    require_flavor(rep, ChainKind::UndirectedCurveball)?;
    let n = require_pair_selectable(rep)?;
    let (i, j) = random_pair(n, rng);
    let size = random_trade(rep, i, j, rng, false);
    Ok(StepRecord::single(ChainKind::UndirectedCurveball, size))
}

/// One global trade: a uniform 2-partition of all sets, then an independent
/// trade within every pair. The singleton of an odd partition is untouched.
pub fn global_trade_step<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    let kind = match rep.flavor() {
        Flavor::Bipartite { .. } | Flavor::DirectedWithLoops => ChainKind::GlobalCurveball,
        Flavor::Directed => ChainKind::GlobalDirectedCurveball,
        Flavor::Undirected => {
            return Err(ChainError::IncompatibleKind {
                kind: ChainKind::GlobalCurveball,
                flavor: Flavor::Undirected,
            })
        }
    };
    let n = require_pair_selectable(rep)?;
    let partition = sample_two_partition(n, rng);
    let mut trade_sizes = Vec::with_capacity(partition.pairs().len());
    for &(i, j) in partition.pairs() {
        trade_sizes.push(random_trade(rep, i, j, rng, false));
    }
    Ok(StepRecord { kind, trade_sizes, accepted: true })
}

/// Classic switching: two edges drawn independently (with replacement);
/// the proposed end swap is applied when it introduces neither a self-loop
/// nor a duplicate edge, otherwise the state repeats.
pub fn switch_step<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    require_pair_selectable(rep)?;
    let edges = rep.canonical_edges();
    let m = edges.len();
    if m < 2 {
        return Ok(StepRecord::single(ChainKind::Switching, 0));
    }
    let e1 = edges[rng.gen_range(0..m)];
    let e2 = edges[rng.gen_range(0..m)];
    if e1 == e2 {
        return Ok(StepRecord::single(ChainKind::Switching, 0));
    }
    let (a, b) = e1;
    let (c, d) = e2;
    let size = match rep.flavor() {
        Flavor::Bipartite { .. } | Flavor::DirectedWithLoops => {
            // rows a, c and columns b, d; degenerate or duplicating swaps repeat
            if a == c || b == d || rep.contains_edge(a, d) || rep.contains_edge(c, b) {
                0
            } else {
                let sets = rep.sets_mut();
                sets[a].remove(&b);
                sets[c].remove(&d);
                sets[a].insert(d);
                sets[c].insert(b);
                1
            }
        }
        Flavor::Directed => {
            // propose (a,d) and (c,b)
            if a == c || b == d || a == d || c == b {
                0
            } else if rep.contains_edge(a, d) || rep.contains_edge(c, b) {
                0
            } else {
                let sets = rep.sets_mut();
                sets[a].remove(&b);
                sets[c].remove(&d);
                sets[a].insert(d);
                sets[c].insert(b);
                1
            }
        }
        Flavor::Undirected => {
            // two ways to re-pair four endpoints; pick one at random
            let (f1, f2) = if rng.gen_bool(0.5) { ((a, c), (b, d)) } else { ((a, d), (b, c)) };
            let norm = |(u, v): (usize, usize)| if v < u { (v, u) } else { (u, v) };
            let f1 = norm(f1);
            let f2 = norm(f2);
            let fresh =
                |f: (usize, usize)| f == e1 || f == e2 || !rep.contains_edge(f.0, f.1);
            if f1.0 == f1.1 || f2.0 == f2.1 || f1 == f2 || !fresh(f1) || !fresh(f2) {
                0
            } else if (f1, f2) == (e1, e2) || (f1, f2) == (e2, e1) {
                0
            } else {
                let sets = rep.sets_mut();
                for (u, v) in [e1, e2] {
                    sets[u].remove(&v);
                    sets[v].remove(&u);
                }
                for (u, v) in [f1, f2] {
                    sets[u].insert(v);
                    sets[v].insert(u);
                }
                1
            }
        }
    };
    Ok(StepRecord::single(ChainKind::Switching, size))
}

/// Switching restated as a trade: select a set pair and, when the pair
/// admits any non-zero trade, apply a uniformly chosen size-one trade.
pub fn adjusted_switch_step<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    let n = require_pair_selectable(rep)?;
    let (i, j) = random_pair(n, rng);
    let ctx = TradeContext::new(rep, i, j);
    if ctx.s_i() == 0 || ctx.s_j() == 0 {
        return Ok(StepRecord::single(ChainKind::AdjustedSwitching, 0));
    }
    let k = ctx.diff_i[rng.gen_range(0..ctx.s_i())];
    let l = ctx.diff_j[rng.gen_range(0..ctx.s_j())];
    let mut keep: Vec<usize> =
        ctx.diff_i.iter().copied().filter(|&x| x != k).chain([l]).collect();
    keep.sort_unstable();
    let size = apply_trade_subset(rep, &ctx, &keep);
    debug_assert_eq!(size, 1);
    Ok(StepRecord::single(ChainKind::AdjustedSwitching, size))
}

/// Trade that re-draws the zero-size outcome whenever the selected pair
/// admits a non-zero trade; the flavor picks the concrete kind.
pub fn good_shuffle_trade_step<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    let kind = match rep.flavor() {
        Flavor::Bipartite { .. } | Flavor::DirectedWithLoops => ChainKind::GoodShuffleCurveball,
        Flavor::Directed => ChainKind::GoodShuffleDirected,
        Flavor::Undirected => ChainKind::GoodShuffleUndirected,
    };
    let n = require_pair_selectable(rep)?;
    let (i, j) = random_pair(n, rng);
    let size = random_trade(rep, i, j, rng, true);
    Ok(StepRecord::single(kind, size))
}

/// Re-orients each induced cycle set independently with probability 1/2,
/// selecting one of the `2^k` isomorphic state-graph components uniformly.
/// Each triple must currently form a directed triangle.
pub fn pre_orient_cycle_sets<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    cycle_sets: &[InducedCycleSet],
    rng: &mut R,
) -> Result<(), ChainError> {
    if rep.flavor() != Flavor::Directed {
        return Err(ChainError::IncompatibleKind {
            kind: ChainKind::DirectedCurveball,
            flavor: rep.flavor(),
        });
    }
    for cs in cycle_sets {
        let [u, v, w] = cs.original;
        let forward =
            [(u, v), (v, w), (w, u)].into_iter().all(|(x, y)| rep.contains_edge(x, y));
        let backward =
            [(u, w), (w, v), (v, u)].into_iter().all(|(x, y)| rep.contains_edge(x, y));
        // exactly one cyclic orientation, nothing else among the triple
        if forward == backward {
            return Err(ChainError::TriangleNotPresent { triple: cs.original });
        }
        let arcs: [(usize, usize); 3] =
            if forward { [(u, v), (v, w), (w, u)] } else { [(u, w), (w, v), (v, u)] };
        if rng.gen_bool(0.5) {
            let sets = rep.sets_mut();
            for (x, y) in arcs {
                sets[x].remove(&y);
                sets[y].insert(x);
            }
        }
    }
    Ok(())
}

/// One step of the given kind.
pub fn step<R: Rng + ?Sized>(
    rep: &mut AdjacencySets,
    kind: ChainKind,
    rng: &mut R,
) -> Result<StepRecord, ChainError> {
    require_flavor(rep, kind)?;
    match kind {
        ChainKind::Curveball => trade_step_bipartite(rep, rng),
        ChainKind::DirectedCurveball => trade_step_directed(rep, rng),
        ChainKind::UndirectedCurveball => trade_step_undirected(rep, rng),
        ChainKind::GlobalCurveball | ChainKind::GlobalDirectedCurveball => {
            global_trade_step(rep, rng)
        }
        ChainKind::Switching => switch_step(rep, rng),
        ChainKind::AdjustedSwitching => adjusted_switch_step(rep, rng),
        ChainKind::GoodShuffleCurveball
        | ChainKind::GoodShuffleDirected
        | ChainKind::GoodShuffleUndirected => good_shuffle_trade_step(rep, rng),
    }
}

/// Default observation cadence: every 100th step for long runs, every 10th
/// otherwise.
pub fn default_cadence(steps: u64) -> u64 {
    if steps >= 10_000 {
        100
    } else {
        10
    }
}

/// Runs `steps` steps of the kernel, invoking the observer with the step
/// index after every `cadence`-th step. Deterministic for a given rng
/// stream. Callers wanting the adjusted directed variant pre-orient via
/// [`pre_orient_cycle_sets`] before running.
pub fn run_chain<R, F>(
    rep: &mut AdjacencySets,
    kind: ChainKind,
    steps: u64,
    rng: &mut R,
    cadence: Option<u64>,
    mut observer: F,
) -> Result<(), ChainError>
where
    R: Rng + ?Sized,
    F: FnMut(u64, &AdjacencySets),
{
    require_flavor(rep, kind)?;
    let cadence = cadence.unwrap_or_else(|| default_cadence(steps)).max(1);
    for s in 1..=steps {
        step(rep, kind, rng)?;
        if s % cadence == 0 {
            observer(s, rep);
        }
    }
    Ok(())
}
