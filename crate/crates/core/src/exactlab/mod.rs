//! Exact verification lab: exhaustive state spaces for small degree
//! sequences, closed-form transition matrices, ergodicity and component
//! analysis, and statistical uniformity testing.

mod enumerate;
mod kernel;
mod stats;

pub use enumerate::{enumerate_realizations, visit_realizations, EnumLimits};
pub use kernel::{
    build_transition_matrix, trade_routes, transition_probability, verify_symmetry_and_balance,
    SymmetryViolation, TransitionMatrix, GLOBAL_PARTITION_LIMIT,
};
pub use stats::{chi_square_uniformity, gamma_q, ChiSquare};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::chains::{self, ChainError, ChainKind};
use crate::graph::{AdjacencySets, Degrees, Flavor};

#[derive(Clone, Debug)]
pub enum LabError {
    /// An enumeration or partition sum outgrew its guard.
    TooLarge { size: usize, cap: usize },
    NotRealizable,
    MismatchedShape,
    IncompatibleKind { kind: ChainKind, flavor: Flavor },
    /// The state graph is disconnected or bipartite; per-component analysis
    /// still applies (see [`TransitionMatrix::restricted`]).
    NotErgodic { components: Vec<Vec<usize>>, bipartite: bool },
    TooFewSamples { expected_per_cell: f64 },
    /// Power iteration hit its iteration cap before the TV change settled.
    NotConverged,
    Chain(ChainError),
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::TooLarge { size, cap } => {
                write!(f, "instance too large: {size} exceeds cap {cap}")
            }
            LabError::NotRealizable => write!(f, "degree sequence has no realisation"),
            LabError::MismatchedShape => write!(f, "mismatched flavor, size or degree sequence"),
            LabError::IncompatibleKind { kind, flavor } => {
                write!(f, "chain kind {kind} does not support flavor {flavor}")
            }
            LabError::NotErgodic { components, bipartite } => write!(
                f,
                "chain not ergodic: {} component(s), bipartite: {bipartite}",
                components.len()
            ),
            LabError::TooFewSamples { expected_per_cell } => {
                write!(f, "expected count per cell {expected_per_cell} below 5")
            }
            LabError::NotConverged => write!(f, "power iteration did not converge"),
            LabError::Chain(e) => write!(f, "chain error: {e}"),
        }
    }
}

impl core::error::Error for LabError {}

impl From<ChainError> for LabError {
    fn from(e: ChainError) -> Self {
        LabError::Chain(e)
    }
}

/// All realisations of one degree sequence, indexed by canonical edge list.
#[derive(Clone, Debug)]
pub struct StateSpace {
    flavor: Flavor,
    degrees: Degrees,
    states: Vec<AdjacencySets>,
    index: enumerate::StateIndex,
}

impl StateSpace {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn degrees(&self) -> &Degrees {
        &self.degrees
    }

    pub fn states(&self) -> &[AdjacencySets] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of a representation in the space, by canonical form.
    pub fn index_of(&self, rep: &AdjacencySets) -> Option<usize> {
        self.index.get(&rep.canonical_edges()).copied()
    }
}

/// Stationary distribution found by power iteration, together with the
/// total-variation-to-uniform trajectory of every iterate.
#[derive(Clone, Debug)]
pub struct StationaryReport {
    pub distribution: Vec<f64>,
    /// `tv_trajectory[t]` is the TV distance to uniform after `t` steps,
    /// starting from a point mass on state 0.
    pub tv_trajectory: Vec<f64>,
}

fn tv_to_uniform(mu: &[f64]) -> f64 {
    let u = 1.0 / mu.len() as f64;
    0.5 * mu.iter().map(|&p| libm::fabs(p - u)).sum::<f64>()
}

const POWER_ITERATION_CAP: usize = 200_000;
const TV_CHANGE_TOLERANCE: f64 = 1e-12;

/// Connected components of the one-step reachability graph (off-diagonal
/// non-zero entries). Kernels are symmetric, so plain BFS suffices.
pub fn components_of(t: &TransitionMatrix) -> Vec<Vec<usize>> {
    use num_traits::Zero;
    let k = t.len();
    let mut seen = vec![false; k];
    let mut components = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut queue = vec![start];
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(x) = queue.pop() {
            comp.push(x);
            for y in 0..k {
                if y != x && !seen[y] && !t.get(x, y).is_zero() {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Whether the state graph (with self-loops) is bipartite, i.e. the chain
/// is periodic. Any positive diagonal entry is an odd cycle.
fn is_bipartite_state_graph(t: &TransitionMatrix) -> bool {
    use num_traits::Zero;
    let k = t.len();
    for x in 0..k {
        if !t.get(x, x).is_zero() {
            return false;
        }
    }
    let mut color = vec![u8::MAX; k];
    for start in 0..k {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = vec![start];
        while let Some(x) = queue.pop() {
            for y in 0..k {
                if y == x || t.get(x, y).is_zero() {
                    continue;
                }
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    queue.push(y);
                } else if color[y] == color[x] {
                    return false;
                }
            }
        }
    }
    true
}

/// Stationary distribution by power iteration from a point mass on state 0,
/// stopping when the TV-to-uniform change drops below 1e-12. Errors with
/// the component decomposition when the chain is not ergodic.
pub fn stationary_distribution(t: &TransitionMatrix) -> Result<StationaryReport, LabError> {
    let k = t.len();
    if k == 0 {
        return Err(LabError::MismatchedShape);
    }
    let components = components_of(t);
    if components.len() > 1 {
        return Err(LabError::NotErgodic {
            bipartite: is_bipartite_state_graph(t),
            components,
        });
    }
    if is_bipartite_state_graph(t) {
        return Err(LabError::NotErgodic { components, bipartite: true });
    }

    let p = t.to_f64();
    let mut mu = vec![0.0; k];
    mu[0] = 1.0;
    let mut tv_trajectory = vec![tv_to_uniform(&mu)];
    let mut next = vec![0.0; k];
    for _ in 0..POWER_ITERATION_CAP {
        for slot in next.iter_mut() {
            *slot = 0.0;
        }
        for (r, &mass) in mu.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (c, slot) in next.iter_mut().enumerate() {
                *slot += mass * p[r][c];
            }
        }
        core::mem::swap(&mut mu, &mut next);
        let tv = tv_to_uniform(&mu);
        let prev = *tv_trajectory.last().unwrap();
        tv_trajectory.push(tv);
        if libm::fabs(tv - prev) < TV_CHANGE_TOLERANCE {
            return Ok(StationaryReport { distribution: mu, tv_trajectory });
        }
    }
    Err(LabError::NotConverged)
}

/// Component structure of the one-step state graph of `kind` over `space`.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub components: Vec<Vec<usize>>,
}

impl ComponentReport {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn equal_sizes(&self) -> bool {
        self.components.windows(2).all(|w| w[0].len() == w[1].len())
    }
}

pub fn component_analysis(
    space: &StateSpace,
    kind: ChainKind,
) -> Result<ComponentReport, LabError> {
    let t = build_transition_matrix(space, kind)?;
    Ok(ComponentReport { components: components_of(&t) })
}

/// Empirical one-step distribution out of `state`: runs `samples`
/// independent single steps and counts the states they land in.
pub fn simulate_row<R: Rng + ?Sized>(
    space: &StateSpace,
    kind: ChainKind,
    state: usize,
    samples: u64,
    rng: &mut R,
) -> Result<Vec<u64>, LabError> {
    let mut counts = vec![0u64; space.len()];
    let start = &space.states[state];
    for _ in 0..samples {
        let mut rep = start.clone();
        chains::step(&mut rep, kind, rng)?;
        let idx = space.index_of(&rep).ok_or(LabError::MismatchedShape)?;
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Simulation-estimated kernel, the fallback for instances too large for
/// the exact global kernel, and the cross-check for the exact one.
pub fn estimate_transition_matrix<R: Rng + ?Sized>(
    space: &StateSpace,
    kind: ChainKind,
    samples_per_state: u64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, LabError> {
    let mut rows = Vec::with_capacity(space.len());
    for state in 0..space.len() {
        let counts = simulate_row(space, kind, state, samples_per_state, rng)?;
        rows.push(counts.into_iter().map(|c| c as f64 / samples_per_state as f64).collect());
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeList;
    use alloc::vec;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn space(degrees: Degrees, flavor: Flavor) -> StateSpace {
        enumerate_realizations(&degrees, flavor, &EnumLimits::default()).unwrap()
    }

    #[test]
    fn three_matchings_of_four_vertices() {
        let s = space(Degrees::Undirected(vec![1; 4]), Flavor::Undirected);
        assert_eq!(s.len(), 3);
        for rep in s.states() {
            assert!(rep.validate().is_empty());
            assert_eq!(rep.degrees(), Degrees::Undirected(vec![1; 4]));
        }
    }

    #[test]
    fn two_orientations_of_the_triangle() {
        let s = space(Degrees::Directed(vec![(1, 1); 3]), Flavor::Directed);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn empty_graph_is_the_single_state() {
        let s = space(Degrees::Undirected(vec![0, 0]), Flavor::Undirected);
        assert_eq!(s.len(), 1);
        assert!(s.states()[0].canonical_edges().is_empty());
    }

    #[test]
    fn unrealizable_sequences_are_reported() {
        let r = enumerate_realizations(
            &Degrees::Directed(vec![(1, 1)]),
            Flavor::Directed,
            &EnumLimits::default(),
        );
        assert!(matches!(r, Err(LabError::NotRealizable)));
    }

    #[test]
    fn state_cap_is_enforced() {
        let r = enumerate_realizations(
            &Degrees::Undirected(vec![1; 4]),
            Flavor::Undirected,
            &EnumLimits { max_states: 2 },
        );
        assert!(matches!(r, Err(LabError::TooLarge { .. })));
    }

    #[test]
    fn loops_only_differ_when_allowed() {
        // (1,1) per vertex on two vertices: with loops there are 2 states
        // (the 2-cycle and the two self-loops), without only the 2-cycle
        let with_loops =
            space(Degrees::Directed(vec![(1, 1); 2]), Flavor::DirectedWithLoops);
        assert_eq!(with_loops.len(), 2);
        let simple = space(Degrees::Directed(vec![(1, 1); 2]), Flavor::Directed);
        assert_eq!(simple.len(), 1);
    }

    #[test]
    fn matching_matrix_is_doubly_stochastic_and_uniform() {
        let s = space(Degrees::Undirected(vec![1; 4]), Flavor::Undirected);
        let t = build_transition_matrix(&s, ChainKind::UndirectedCurveball).unwrap();
        for r in 0..t.len() {
            let sum: BigRational = t.row(r).iter().sum();
            assert_eq!(sum, rational(1, 1));
        }
        assert!(verify_symmetry_and_balance(&t).is_empty());
        let report = stationary_distribution(&t).unwrap();
        assert!(report.tv_trajectory.last().unwrap() < &1e-8);
        for pi in report.distribution {
            assert!((pi - 1.0 / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn bipartite_two_matchings_swap_with_probability_half() {
        let s = space(
            Degrees::Bipartite { rows: vec![1, 1], cols: vec![1, 1] },
            Flavor::Bipartite { cols: 2 },
        );
        assert_eq!(s.len(), 2);
        let t = build_transition_matrix(&s, ChainKind::Curveball).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(*t.get(r, c), rational(1, 2));
            }
        }
    }

    #[test]
    fn frozen_triangle_gives_identity_matrix_and_two_components() {
        let s = space(Degrees::Directed(vec![(1, 1); 3]), Flavor::Directed);
        let t = build_transition_matrix(&s, ChainKind::DirectedCurveball).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let expected = if r == c { rational(1, 1) } else { rational(0, 1) };
                assert_eq!(*t.get(r, c), expected);
            }
        }
        assert!(verify_symmetry_and_balance(&t).is_empty());
        match stationary_distribution(&t) {
            Err(LabError::NotErgodic { components, bipartite }) => {
                assert_eq!(components.len(), 2);
                assert!(!bipartite);
            }
            other => panic!("expected NotErgodic, got {other:?}"),
        }
        let report = component_analysis(&s, ChainKind::DirectedCurveball).unwrap();
        assert_eq!(report.count(), 2);
        assert!(report.equal_sizes());
    }

    #[test]
    fn single_state_space_is_stationary_immediately() {
        let s = space(Degrees::Undirected(vec![0, 0]), Flavor::Undirected);
        let t = build_transition_matrix(&s, ChainKind::UndirectedCurveball).unwrap();
        let report = stationary_distribution(&t).unwrap();
        assert_eq!(report.distribution, vec![1.0]);
    }

    #[test]
    fn simulation_stays_inside_the_space() {
        use rand::SeedableRng;
        let s = space(Degrees::Undirected(vec![1; 4]), Flavor::Undirected);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let counts = simulate_row(&s, ChainKind::UndirectedCurveball, 0, 3000, &mut rng).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 3000);
        // kernel row: stay 2/3, each other matching 1/6
        assert!((counts[0] as f64 / 3000.0 - 2.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn restriction_keeps_rows_stochastic() {
        let s = space(Degrees::Directed(vec![(1, 1); 3]), Flavor::Directed);
        let t = build_transition_matrix(&s, ChainKind::DirectedCurveball).unwrap();
        let sub = t.restricted(&[1]);
        assert_eq!(sub.len(), 1);
        assert_eq!(*sub.get(0, 0), rational(1, 1));
    }

    #[test]
    fn forced_trade_chains_can_be_periodic() {
        // 2x2 identity matching: the single pair always admits a trade, so
        // the good-shuffle and adjusted-switching kernels swap forever
        let s = space(
            Degrees::Bipartite { rows: vec![1, 1], cols: vec![1, 1] },
            Flavor::Bipartite { cols: 2 },
        );
        for kind in [ChainKind::GoodShuffleCurveball, ChainKind::AdjustedSwitching] {
            let t = build_transition_matrix(&s, kind).unwrap();
            assert_eq!(*t.get(0, 1), rational(1, 1));
            match stationary_distribution(&t) {
                Err(LabError::NotErgodic { bipartite, components }) => {
                    assert!(bipartite);
                    assert_eq!(components.len(), 1);
                }
                other => panic!("expected periodic chain, got {other:?}"),
            }
        }
        // classic switching draws edges with replacement, so it keeps a
        // lazy self-loop and converges
        let t = build_transition_matrix(&s, ChainKind::Switching).unwrap();
        assert_eq!(*t.get(0, 0), rational(1, 2));
        let report = stationary_distribution(&t).unwrap();
        assert!(report.tv_trajectory.last().unwrap() < &1e-8);
    }

    #[test]
    fn undirected_matching_kernel_matches_the_closed_form() {
        // between distinct matchings: 2/(4*3) * (1/2 + 1/2) = 1/6
        let a = AdjacencySets::from_edge_list(&EdgeList {
            flavor: Flavor::Undirected,
            n: 4,
            edges: vec![(0, 1), (2, 3)],
        })
        .unwrap();
        let b = AdjacencySets::from_edge_list(&EdgeList {
            flavor: Flavor::Undirected,
            n: 4,
            edges: vec![(0, 2), (1, 3)],
        })
        .unwrap();
        let p = transition_probability(&a, &b, ChainKind::UndirectedCurveball).unwrap();
        assert_eq!(p, rational(1, 6));
        let stay = transition_probability(&a, &a, ChainKind::UndirectedCurveball).unwrap();
        assert_eq!(stay, rational(2, 3));
    }
}
