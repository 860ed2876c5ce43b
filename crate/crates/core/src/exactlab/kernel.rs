//! Closed-form transition probabilities for every chain kind, in exact
//! rational arithmetic, plus the full transition matrix.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::chains::{ChainKind, TradeContext};
use crate::graph::{AdjacencySets, Flavor};
use crate::partition::enumerate_two_partitions;

use super::{LabError, StateSpace};

/// Largest set count for which global kernels enumerate all 2-partitions;
/// the partition count is a double factorial, so this is a hard guard.
/// Larger instances fall back to simulation (`estimate_transition_matrix`).
pub const GLOBAL_PARTITION_LIMIT: usize = 8;

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// C(a+b, a) as a big integer.
fn binomial(a: usize, b: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..a.min(b) {
        acc = acc * big(a + b - k) / big(k + 1);
    }
    acc
}

/// Probability of selecting a given unordered set pair: 2 / (n (n-1)).
fn pair_selection(n: usize) -> BigRational {
    ratio(big(2), big(n) * big(n - 1))
}

/// How one pair trade can turn `a`'s sets `x`, `y` into `b`'s.
struct PairTrade {
    s_x: usize,
    s_y: usize,
    /// Number of indices that changed sides.
    size: usize,
    moved_to_x: Vec<usize>,
    moved_to_y: Vec<usize>,
}

/// Checks whether one trade between sets `x` and `y` maps `a`'s pair of
/// sets onto `b`'s. The candidate subset is forced: it is what `b_x` keeps
/// from the pooled differences. Side sets are not inspected here.
fn pair_trade_reaches(
    a: &AdjacencySets,
    b: &AdjacencySets,
    x: usize,
    y: usize,
) -> Option<PairTrade> {
    let ctx = TradeContext::new(a, x, y);
    let pool: BTreeSet<usize> =
        ctx.diff_i.iter().chain(ctx.diff_j.iter()).copied().collect();
    let b_x = b.set(x);
    let b_y = b.set(y);
    let keep: Vec<usize> = b_x.iter().copied().filter(|e| pool.contains(e)).collect();
    if keep.len() != ctx.s_i() {
        return None;
    }
    // b_x must be exactly (a_x without its exclusive part) plus the kept subset
    let mut expected: BTreeSet<usize> = a.set(x).clone();
    for e in &ctx.diff_i {
        expected.remove(e);
    }
    expected.extend(keep.iter().copied());
    if expected != *b_x {
        return None;
    }
    let mut expected_y: BTreeSet<usize> = a.set(y).clone();
    for e in &ctx.diff_j {
        expected_y.remove(e);
    }
    for e in &pool {
        if !keep.contains(e) {
            expected_y.insert(*e);
        }
    }
    if expected_y != *b_y {
        return None;
    }
    let moved_to_x: Vec<usize> =
        keep.iter().copied().filter(|e| ctx.diff_j.binary_search(e).is_ok()).collect();
    let moved_to_y: Vec<usize> =
        ctx.diff_i.iter().copied().filter(|e| !keep.contains(e)).collect();
    debug_assert_eq!(moved_to_x.len(), moved_to_y.len());
    Some(PairTrade {
        s_x: ctx.s_i(),
        s_y: ctx.s_j(),
        size: moved_to_x.len(),
        moved_to_x,
        moved_to_y,
    })
}

/// Like [`pair_trade_reaches`] but also verifies every other set of `b`,
/// including the undirected side-set rewrites.
fn route_between(
    a: &AdjacencySets,
    b: &AdjacencySets,
    x: usize,
    y: usize,
) -> Option<PairTrade> {
    let trade = pair_trade_reaches(a, b, x, y)?;
    let undirected = a.flavor().is_undirected();
    for v in 0..a.n() {
        if v == x || v == y {
            continue;
        }
        if undirected && trade.moved_to_x.contains(&v) {
            let mut expected = a.set(v).clone();
            expected.remove(&y);
            expected.insert(x);
            if expected != *b.set(v) {
                return None;
            }
        } else if undirected && trade.moved_to_y.contains(&v) {
            let mut expected = a.set(v).clone();
            expected.remove(&x);
            expected.insert(y);
            if expected != *b.set(v) {
                return None;
            }
        } else if a.set(v) != b.set(v) {
            return None;
        }
    }
    Some(trade)
}

fn changed_sets(a: &AdjacencySets, b: &AdjacencySets) -> Vec<usize> {
    (0..a.n()).filter(|&v| a.set(v) != b.set(v)).collect()
}

/// All unordered set pairs whose single trade carries `a` to `b`.
/// Undirected states that differ by a switch have exactly two.
pub fn trade_routes(
    a: &AdjacencySets,
    b: &AdjacencySets,
) -> Result<Vec<(usize, usize)>, LabError> {
    check_shape(a, b)?;
    if a == b {
        return Ok(Vec::new());
    }
    let changed = changed_sets(a, b);
    let mut routes = Vec::new();
    for (idx, &x) in changed.iter().enumerate() {
        for &y in &changed[idx + 1..] {
            if route_between(a, b, x, y).is_some() {
                routes.push((x, y));
            }
        }
    }
    Ok(routes)
}

fn check_shape(a: &AdjacencySets, b: &AdjacencySets) -> Result<(), LabError> {
    if a.flavor() != b.flavor() || a.n() != b.n() || a.degrees() != b.degrees() {
        return Err(LabError::MismatchedShape);
    }
    Ok(())
}

/// Exact transition probability of one step of `kind` from `a` to `b`.
pub fn transition_probability(
    a: &AdjacencySets,
    b: &AdjacencySets,
    kind: ChainKind,
) -> Result<BigRational, LabError> {
    check_shape(a, b)?;
    if !kind.supports(a.flavor()) {
        return Err(LabError::IncompatibleKind { kind, flavor: a.flavor() });
    }
    if a.n() < 2 {
        // no pair to select: the chain repeats its single state
        return Ok(if a == b { BigRational::one() } else { BigRational::zero() });
    }
    if a == b {
        return diagonal_probability(a, kind);
    }
    let sel = pair_selection(a.n());
    match kind {
        ChainKind::Curveball | ChainKind::DirectedCurveball | ChainKind::UndirectedCurveball => {
            // per reachable route: selection times one subset out of C(s_x+s_y, s_x)
            let mut p = BigRational::zero();
            let changed = changed_sets(a, b);
            for (idx, &x) in changed.iter().enumerate() {
                for &y in &changed[idx + 1..] {
                    if let Some(t) = route_between(a, b, x, y) {
                        p += sel.clone() * ratio(BigInt::one(), binomial(t.s_x, t.s_y));
                    }
                }
            }
            Ok(p)
        }
        ChainKind::GoodShuffleCurveball
        | ChainKind::GoodShuffleDirected
        | ChainKind::GoodShuffleUndirected => {
            // the zero-size subset is excluded whenever the pair can trade
            let mut p = BigRational::zero();
            let changed = changed_sets(a, b);
            for (idx, &x) in changed.iter().enumerate() {
                for &y in &changed[idx + 1..] {
                    if let Some(t) = route_between(a, b, x, y) {
                        debug_assert!(t.size >= 1);
                        p += sel.clone()
                            * ratio(BigInt::one(), binomial(t.s_x, t.s_y) - BigInt::one());
                    }
                }
            }
            Ok(p)
        }
        ChainKind::AdjustedSwitching => {
            // only size-one trades, uniform over the s_x * s_y of them
            let mut p = BigRational::zero();
            let changed = changed_sets(a, b);
            for (idx, &x) in changed.iter().enumerate() {
                for &y in &changed[idx + 1..] {
                    if let Some(t) = route_between(a, b, x, y) {
                        if t.size == 1 {
                            p += sel.clone() * ratio(BigInt::one(), big(t.s_x) * big(t.s_y));
                        }
                    }
                }
            }
            Ok(p)
        }
        ChainKind::Switching => Ok(switching_probability(a, Some(b))),
        ChainKind::GlobalCurveball | ChainKind::GlobalDirectedCurveball => {
            global_probability(a, b)
        }
    }
}

/// Probability of repeating state `a`, computed locally (no sum over the
/// rest of the state space). Row sums of the matrix are then a real check.
fn diagonal_probability(a: &AdjacencySets, kind: ChainKind) -> Result<BigRational, LabError> {
    let n = a.n();
    let sel = pair_selection(n);
    match kind {
        ChainKind::Curveball | ChainKind::DirectedCurveball | ChainKind::UndirectedCurveball => {
            // each pair repeats iff the shuffle re-selects the pair's own part
            let mut p = BigRational::zero();
            for x in 0..n {
                for y in x + 1..n {
                    let ctx = TradeContext::new(a, x, y);
                    p += sel.clone()
                        * ratio(BigInt::one(), binomial(ctx.s_i(), ctx.s_j()));
                }
            }
            Ok(p)
        }
        ChainKind::GoodShuffleCurveball
        | ChainKind::GoodShuffleDirected
        | ChainKind::GoodShuffleUndirected => {
            // only pairs without any non-zero trade repeat
            let mut p = BigRational::zero();
            for x in 0..n {
                for y in x + 1..n {
                    let ctx = TradeContext::new(a, x, y);
                    if ctx.s_i() == 0 || ctx.s_j() == 0 {
                        p += sel.clone();
                    }
                }
            }
            Ok(p)
        }
        ChainKind::AdjustedSwitching => {
            let mut p = BigRational::zero();
            for x in 0..n {
                for y in x + 1..n {
                    let ctx = TradeContext::new(a, x, y);
                    if ctx.s_i() == 0 || ctx.s_j() == 0 {
                        p += sel.clone();
                    }
                }
            }
            Ok(p)
        }
        ChainKind::Switching => Ok(switching_probability(a, None)),
        ChainKind::GlobalCurveball | ChainKind::GlobalDirectedCurveball => global_probability(a, a),
    }
}

/// Classic switching kernel. Two edges are drawn independently, so the
/// proposal measure is 2/m^2 per unordered distinct edge pair (halved
/// again per undirected re-pairing) and 1/m for drawing the same edge
/// twice. `target = None` computes the repeat probability.
fn switching_probability(a: &AdjacencySets, target: Option<&AdjacencySets>) -> BigRational {
    let edges = a.canonical_edges();
    let m = edges.len();
    if m < 2 {
        return match target {
            None => BigRational::one(),
            Some(_) => BigRational::zero(),
        };
    }
    let undirected = a.flavor().is_undirected();
    let m2 = big(m) * big(m);
    let weight = if undirected {
        ratio(BigInt::one(), m2) // 2/m^2 split over the two re-pairings
    } else {
        ratio(big(2), m2)
    };
    let target_edges: Option<BTreeSet<(usize, usize)>> =
        target.map(|b| b.canonical_edges().into_iter().collect());
    let edge_set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();

    // same edge twice always repeats
    let mut stay = ratio(BigInt::one(), big(m));
    let mut hit = BigRational::zero();

    let pairings: &[usize] = if undirected { &[0, 1] } else { &[0] };
    for i1 in 0..m {
        for i2 in i1 + 1..m {
            for &pairing in pairings {
                match switch_outcome(a.flavor(), &edge_set, edges[i1], edges[i2], pairing) {
                    None => stay += weight.clone(),
                    Some((f1, f2)) => {
                        if let Some(te) = &target_edges {
                            let mut outcome = edge_set.clone();
                            outcome.remove(&edges[i1]);
                            outcome.remove(&edges[i2]);
                            outcome.insert(f1);
                            outcome.insert(f2);
                            if outcome == *te {
                                hit += weight.clone();
                            }
                        }
                    }
                }
            }
        }
    }
    match target {
        None => stay,
        Some(_) => hit,
    }
}

/// Legal outcome of switching the edge pair, or `None` when the proposal
/// is degenerate, creates a loop or duplicates an edge (a lazy repeat).
/// Mirrors the sampling semantics of `chains::switch_step`.
fn switch_outcome(
    flavor: Flavor,
    edge_set: &BTreeSet<(usize, usize)>,
    e1: (usize, usize),
    e2: (usize, usize),
    pairing: usize,
) -> Option<((usize, usize), (usize, usize))> {
    let (a, b) = e1;
    let (c, d) = e2;
    match flavor {
        Flavor::Bipartite { .. } | Flavor::DirectedWithLoops => {
            if a == c || b == d || edge_set.contains(&(a, d)) || edge_set.contains(&(c, b)) {
                None
            } else {
                Some(((a, d), (c, b)))
            }
        }
        Flavor::Directed => {
            if a == c || b == d || a == d || c == b {
                None
            } else if edge_set.contains(&(a, d)) || edge_set.contains(&(c, b)) {
                None
            } else {
                Some(((a, d), (c, b)))
            }
        }
        Flavor::Undirected => {
            let (f1, f2) = if pairing == 0 { ((a, c), (b, d)) } else { ((a, d), (b, c)) };
            let norm = |(u, v): (usize, usize)| if v < u { (v, u) } else { (u, v) };
            let f1 = norm(f1);
            let f2 = norm(f2);
            let fresh = |f: (usize, usize)| f == e1 || f == e2 || !edge_set.contains(&f);
            if f1.0 == f1.1 || f2.0 == f2.1 || f1 == f2 || !fresh(f1) || !fresh(f2) {
                None
            } else if (f1, f2) == (e1, e2) || (f1, f2) == (e2, e1) {
                None
            } else {
                Some((f1, f2))
            }
        }
    }
}

/// Global trade kernel: average over all 2-partitions of the probability
/// of the unique global trade reaching `b` (zero when some pair of the
/// partition cannot get there). The trade count of a partition is the
/// product of the per-pair subset counts.
fn global_probability(a: &AdjacencySets, b: &AdjacencySets) -> Result<BigRational, LabError> {
    let n = a.n();
    if n > GLOBAL_PARTITION_LIMIT {
        return Err(LabError::TooLarge { size: n, cap: GLOBAL_PARTITION_LIMIT });
    }
    let partitions = enumerate_two_partitions(n);
    let mut acc = BigRational::zero();
    for p in &partitions {
        if let Some(s) = p.singleton() {
            if a.set(s) != b.set(s) {
                continue;
            }
        }
        let mut trades = BigInt::one();
        let mut reachable = true;
        for &(x, y) in p.pairs() {
            match pair_trade_reaches(a, b, x, y) {
                Some(t) => trades *= binomial(t.s_x, t.s_y),
                None => {
                    reachable = false;
                    break;
                }
            }
        }
        if reachable {
            acc += ratio(BigInt::one(), trades);
        }
    }
    Ok(acc / ratio(big(partitions.len()), BigInt::one()))
}

/// Exact transition matrix over an enumerated state space.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    kind: ChainKind,
    n_states: usize,
    entries: Vec<BigRational>,
}

impl TransitionMatrix {
    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n_states
    }

    pub fn is_empty(&self) -> bool {
        self.n_states == 0
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.n_states + col]
    }

    pub fn row(&self, row: usize) -> &[BigRational] {
        &self.entries[row * self.n_states..(row + 1) * self.n_states]
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        (0..self.n_states)
            .map(|r| self.row(r).iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    /// Submatrix over `states`. Meaningful for closed communicating
    /// classes, where it remains stochastic.
    pub fn restricted(&self, states: &[usize]) -> TransitionMatrix {
        let k = states.len();
        let mut entries = Vec::with_capacity(k * k);
        for &r in states {
            for &c in states {
                entries.push(self.get(r, c).clone());
            }
        }
        TransitionMatrix { kind: self.kind, n_states: k, entries }
    }
}

/// Builds the full matrix; diagonal entries come from the local repeat
/// formula, so verifying row sums against 1 exercises the kernel.
pub fn build_transition_matrix(
    space: &StateSpace,
    kind: ChainKind,
) -> Result<TransitionMatrix, LabError> {
    if !kind.supports(space.flavor()) {
        return Err(LabError::IncompatibleKind { kind, flavor: space.flavor() });
    }
    let k = space.len();
    let mut entries = Vec::with_capacity(k * k);
    for a in space.states() {
        for b in space.states() {
            entries.push(transition_probability(a, b, kind)?);
        }
    }
    Ok(TransitionMatrix { kind, n_states: k, entries })
}

/// An asymmetric entry pair found by `verify_symmetry_and_balance`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryViolation {
    pub x: usize,
    pub y: usize,
}

/// Exact symmetry check. With the uniform distribution, symmetry of the
/// kernel is precisely the detailed balance condition.
pub fn verify_symmetry_and_balance(t: &TransitionMatrix) -> Vec<SymmetryViolation> {
    let mut report = Vec::new();
    for x in 0..t.len() {
        for y in x + 1..t.len() {
            if t.get(x, y) != t.get(y, x) {
                report.push(SymmetryViolation { x, y });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeList;
    use alloc::vec;

    fn rep(flavor: Flavor, n: usize, edges: &[(usize, usize)]) -> AdjacencySets {
        AdjacencySets::from_edge_list(&EdgeList { flavor, n, edges: edges.to_vec() }).unwrap()
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(1, 1), BigInt::from(2));
        assert_eq!(binomial(2, 1), BigInt::from(3));
        assert_eq!(binomial(2, 2), BigInt::from(6));
        assert_eq!(binomial(3, 4), BigInt::from(35));
    }

    #[test]
    fn directed_kernel_value_from_the_closed_form() {
        // s_x = 2, s_y = 1 on five sets: (2/20) * (2!1!/3!) = 1/30
        let a = rep(Flavor::Directed, 5, &[(0, 2), (0, 3), (1, 4)]);
        let b = rep(Flavor::Directed, 5, &[(0, 2), (0, 4), (1, 3)]);
        let p = transition_probability(&a, &b, ChainKind::DirectedCurveball).unwrap();
        assert_eq!(p, rational(1, 30));
    }

    #[test]
    fn frozen_state_has_diagonal_one() {
        let a = rep(Flavor::Directed, 3, &[(0, 1), (1, 2), (2, 0)]);
        let p = transition_probability(&a, &a, ChainKind::DirectedCurveball).unwrap();
        assert_eq!(p, rational(1, 1));
    }

    #[test]
    fn undirected_switch_probability_adds_both_routes() {
        // {0,1},{2,3} -> {0,2},{1,3}: the trade on (0,3) exchanging 1 and 2,
        // and the mirror trade on (1,2); each with s = 1,1: 2/(4*3) * (1/2 + 1/2)
        let a = rep(Flavor::Undirected, 4, &[(0, 1), (2, 3)]);
        let b = rep(Flavor::Undirected, 4, &[(0, 2), (1, 3)]);
        let routes = trade_routes(&a, &b).unwrap();
        assert_eq!(routes, vec![(0, 3), (1, 2)]);
        let p = transition_probability(&a, &b, ChainKind::UndirectedCurveball).unwrap();
        assert_eq!(p, rational(1, 6));
    }

    #[test]
    fn good_shuffle_redistributes_the_zero_trade_mass() {
        let a = rep(Flavor::Directed, 4, &[(0, 1), (2, 3)]);
        let b = rep(Flavor::Directed, 4, &[(0, 3), (2, 1)]);
        // the only pair with a non-zero trade is (0,2); C(2,1)-1 = 1
        let p = transition_probability(&a, &b, ChainKind::GoodShuffleDirected).unwrap();
        assert_eq!(p, pair_selection(4));
        // and the diagonal keeps the mass of the five tradeless pairs
        let d = transition_probability(&a, &a, ChainKind::GoodShuffleDirected).unwrap();
        assert_eq!(d, pair_selection(4) * rational(5, 1));
    }
}
