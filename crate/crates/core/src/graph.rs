//! Adjacency set representations of the four graph flavors, edge lists,
//! degree views, validation and the perturbation score.
//!
//! All indices are 0-based in memory. The text formats of the companion
//! crate are 1-based and convert at the boundary.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Which kind of graph an adjacency set representation stands for.
///
/// Bipartite rows index into a separate column universe of size `cols`;
/// every other flavor indexes the vertex set itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Flavor {
    Bipartite { cols: usize },
    DirectedWithLoops,
    Directed,
    Undirected,
}

impl Flavor {
    /// Number of values a set element may take, given `n` sets.
    pub fn universe(self, n: usize) -> usize {
        match self {
            Flavor::Bipartite { cols } => cols,
            _ => n,
        }
    }

    /// `true` for the flavors whose sets must not contain their own index.
    pub fn forbids_loops(self) -> bool {
        matches!(self, Flavor::Directed | Flavor::Undirected)
    }

    pub fn is_undirected(self) -> bool {
        matches!(self, Flavor::Undirected)
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Bipartite { .. } => "bipartite",
            Flavor::DirectedWithLoops => "directed-loops",
            Flavor::Directed => "directed",
            Flavor::Undirected => "undirected",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single invariant violation found by [`AdjacencySets::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `vertex` appears in its own set although the flavor forbids loops.
    SelfLoop { vertex: usize },
    /// `j` is in the set of `i` but `i` is missing from the set of `j`.
    SymmetryViolation { i: usize, j: usize },
    /// An element lies outside the column/vertex universe.
    ElementOutOfRange { set: usize, element: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::SymmetryViolation { i, j } => {
                write!(f, "symmetry violation: {j} in set {i} but {i} not in set {j}")
            }
            Violation::ElementOutOfRange { set, element } => {
                write!(f, "element {element} of set {set} out of range")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    DuplicateEdge { u: usize, v: usize },
    SelfLoopForbidden { u: usize, v: usize },
    IndexOutOfRange { u: usize, v: usize },
    /// Inputs disagree on flavor, size or degree sequence.
    MismatchedShape,
    /// Transposition is only defined for bipartite representations.
    NotBipartite,
    InvalidSets(Violation),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u}, {v})"),
            GraphError::SelfLoopForbidden { u, v } => {
                write!(f, "self-loop ({u}, {v}) forbidden for this flavor")
            }
            GraphError::IndexOutOfRange { u, v } => {
                write!(f, "edge ({u}, {v}) out of range")
            }
            GraphError::MismatchedShape => write!(f, "representations have mismatched shape"),
            GraphError::NotBipartite => write!(f, "operation requires a bipartite representation"),
            GraphError::InvalidSets(v) => write!(f, "invalid sets: {v}"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Plain edge list with the same index conventions as [`AdjacencySets`].
///
/// Undirected edges are canonically stored as `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub flavor: Flavor,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeList {
    /// Sorted, orientation-normalised copy (undirected pairs as `(min, max)`).
    /// Does not deduplicate; duplicates are rejected by
    /// [`AdjacencySets::from_edge_list`].
    pub fn canonicalized(&self) -> EdgeList {
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                if self.flavor.is_undirected() && v < u {
                    (v, u)
                } else {
                    (u, v)
                }
            })
            .collect();
        edges.sort_unstable();
        EdgeList { flavor: self.flavor, n: self.n, edges }
    }
}

/// Degree data of a representation; equality of two views is exactly
/// "same degree sequence".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degrees {
    Bipartite { rows: Vec<usize>, cols: Vec<usize> },
    /// Per-vertex `(in, out)` pairs; used for both directed flavors.
    Directed(Vec<(usize, usize)>),
    Undirected(Vec<usize>),
}

impl Degrees {
    /// Total number of edges described by the view.
    pub fn edge_count(&self) -> usize {
        match self {
            Degrees::Bipartite { rows, .. } => rows.iter().sum(),
            Degrees::Directed(pairs) => pairs.iter().map(|&(_, out)| out).sum(),
            Degrees::Undirected(d) => d.iter().sum::<usize>() / 2,
        }
    }
}

/// The state of every chain: one neighbour set per vertex (per row for
/// bipartite graphs). Sets are kept sorted, so the representation is its
/// own canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencySets {
    flavor: Flavor,
    sets: Vec<BTreeSet<usize>>,
}

impl AdjacencySets {
    /// Wraps pre-built sets, rejecting the first invariant violation.
    pub fn new(flavor: Flavor, sets: Vec<BTreeSet<usize>>) -> Result<Self, GraphError> {
        let rep = AdjacencySets { flavor, sets };
        match rep.validate().into_iter().next() {
            Some(v) => Err(GraphError::InvalidSets(v)),
            None => Ok(rep),
        }
    }

    pub fn empty(flavor: Flavor, n: usize) -> Self {
        AdjacencySets { flavor, sets: vec![BTreeSet::new(); n] }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Number of sets (vertices, or bipartite rows).
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, i: usize) -> &BTreeSet<usize> {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub(crate) fn sets_mut(&mut self) -> &mut [BTreeSet<usize>] {
        &mut self.sets
    }

    /// Membership test; undirected edges may be queried in either order.
    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.sets[u].contains(&v)
    }

    /// Builds the representation from an edge list, checking flavor
    /// constraints edge by edge.
    pub fn from_edge_list(el: &EdgeList) -> Result<Self, GraphError> {
        let n = el.n;
        let universe = el.flavor.universe(n);
        let mut sets = vec![BTreeSet::new(); n];
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(u, v) in &el.edges {
            if u >= n || v >= universe {
                return Err(GraphError::IndexOutOfRange { u, v });
            }
            let key = if el.flavor.is_undirected() && v < u { (v, u) } else { (u, v) };
            if key.0 == key.1 && el.flavor.forbids_loops() {
                return Err(GraphError::SelfLoopForbidden { u, v });
            }
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            sets[u].insert(v);
            if el.flavor.is_undirected() {
                sets[v].insert(u);
            }
        }
        Ok(AdjacencySets { flavor: el.flavor, sets })
    }

    /// Inverse of [`AdjacencySets::from_edge_list`]; output is canonical
    /// (sorted, undirected pairs as `(min, max)` listed once).
    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList { flavor: self.flavor, n: self.n(), edges: self.canonical_edges() }
    }

    /// The canonical edge set, used as the state key in the exact lab.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (i, set) in self.sets.iter().enumerate() {
            for &j in set {
                if self.flavor.is_undirected() {
                    if i < j {
                        edges.push((i, j));
                    }
                } else {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    pub fn degrees(&self) -> Degrees {
        match self.flavor {
            Flavor::Bipartite { cols } => {
                let rows: Vec<usize> = self.sets.iter().map(BTreeSet::len).collect();
                let mut col_degrees = vec![0usize; cols];
                for set in &self.sets {
                    for &j in set {
                        col_degrees[j] += 1;
                    }
                }
                Degrees::Bipartite { rows, cols: col_degrees }
            }
            Flavor::DirectedWithLoops | Flavor::Directed => {
                let mut in_deg = vec![0usize; self.n()];
                for set in &self.sets {
                    for &j in set {
                        in_deg[j] += 1;
                    }
                }
                Degrees::Directed(
                    self.sets.iter().zip(in_deg).map(|(set, ind)| (ind, set.len())).collect(),
                )
            }
            Flavor::Undirected => {
                Degrees::Undirected(self.sets.iter().map(BTreeSet::len).collect())
            }
        }
    }

    /// Checks every flavor invariant and reports all violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let universe = self.flavor.universe(self.n());
        for (i, set) in self.sets.iter().enumerate() {
            for &j in set {
                if j >= universe {
                    report.push(Violation::ElementOutOfRange { set: i, element: j });
                }
            }
            if self.flavor.forbids_loops() && set.contains(&i) {
                report.push(Violation::SelfLoop { vertex: i });
            }
        }
        if self.flavor.is_undirected() {
            for (i, set) in self.sets.iter().enumerate() {
                for &j in set {
                    if j < self.n() && !self.sets[j].contains(&i) {
                        report.push(Violation::SymmetryViolation { i, j });
                    }
                }
            }
        }
        report
    }

    /// Swaps the roles of rows and columns of a bipartite representation.
    /// Chains run equally well on either side; pick whichever is cheaper.
    pub fn transposed(&self) -> Result<Self, GraphError> {
        let Flavor::Bipartite { cols } = self.flavor else {
            return Err(GraphError::NotBipartite);
        };
        let mut sets = vec![BTreeSet::new(); cols];
        for (i, set) in self.sets.iter().enumerate() {
            for &j in set {
                sets[j].insert(i);
            }
        }
        Ok(AdjacencySets { flavor: Flavor::Bipartite { cols: self.n() }, sets })
    }
}

/// Fraction of the initial graph's edges that are absent from the current
/// graph. 0 exactly on equal graphs, 1 on disjoint edge sets; undirected
/// edges count once. Both arguments must share flavor, size and degree
/// sequence.
pub fn perturbation_score(
    initial: &AdjacencySets,
    current: &AdjacencySets,
) -> Result<f64, GraphError> {
    if initial.flavor != current.flavor
        || initial.n() != current.n()
        || initial.degrees() != current.degrees()
    {
        return Err(GraphError::MismatchedShape);
    }
    let edges = initial.canonical_edges();
    if edges.is_empty() {
        return Ok(0.0);
    }
    let missing = edges.iter().filter(|&&(u, v)| !current.contains_edge(u, v)).count();
    Ok(missing as f64 / edges.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(flavor: Flavor, n: usize, edges: &[(usize, usize)]) -> EdgeList {
        EdgeList { flavor, n, edges: edges.to_vec() }
    }

    #[test]
    fn directed_three_cycle_from_edges() {
        let rep =
            AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(0, 1), (1, 2), (2, 0)]))
                .unwrap();
        assert_eq!(rep.set(0).iter().copied().collect::<Vec<_>>(), [1]);
        assert_eq!(rep.set(1).iter().copied().collect::<Vec<_>>(), [2]);
        assert_eq!(rep.set(2).iter().copied().collect::<Vec<_>>(), [0]);
        assert_eq!(rep.to_edge_list().edges, [(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn undirected_matching_is_symmetric() {
        let rep =
            AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[(0, 1), (2, 3)])).unwrap();
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert!(rep.contains_edge(i, j));
        }
        // one entry per unordered pair
        assert_eq!(rep.to_edge_list().edges, [(0, 1), (2, 3)]);
    }

    #[test]
    fn self_loop_rejected_for_simple_directed() {
        let err = AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(1, 1)])).unwrap_err();
        assert_eq!(err, GraphError::SelfLoopForbidden { u: 1, v: 1 });
        // ...but allowed when the flavor permits loops
        assert!(AdjacencySets::from_edge_list(&el(Flavor::DirectedWithLoops, 3, &[(1, 1)])).is_ok());
    }

    #[test]
    fn duplicate_and_out_of_range_edges_rejected() {
        let err =
            AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(0, 1), (0, 1)])).unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { u: 0, v: 1 });
        // an undirected duplicate may hide behind the opposite orientation
        let err = AdjacencySets::from_edge_list(&el(Flavor::Undirected, 3, &[(0, 1), (1, 0)]))
            .unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { u: 1, v: 0 });
        let err = AdjacencySets::from_edge_list(&el(Flavor::Bipartite { cols: 2 }, 2, &[(0, 2)]))
            .unwrap_err();
        assert_eq!(err, GraphError::IndexOutOfRange { u: 0, v: 2 });
    }

    #[test]
    fn empty_graph_round_trips() {
        let rep = AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[])).unwrap();
        assert!(rep.to_edge_list().edges.is_empty());
    }

    #[test]
    fn degree_views() {
        let rep =
            AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(0, 1), (1, 2), (2, 0)]))
                .unwrap();
        assert_eq!(rep.degrees(), Degrees::Directed(vec![(1, 1); 3]));

        // star K_{1,3}
        let rep =
            AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[(0, 1), (0, 2), (0, 3)]))
                .unwrap();
        assert_eq!(rep.degrees(), Degrees::Undirected(vec![3, 1, 1, 1]));

        let rep = AdjacencySets::from_edge_list(&el(
            Flavor::Bipartite { cols: 3 },
            2,
            &[(0, 0), (0, 1), (1, 1), (1, 2)],
        ))
        .unwrap();
        assert_eq!(rep.degrees(), Degrees::Bipartite { rows: vec![2, 2], cols: vec![1, 2, 1] });
    }

    #[test]
    fn validate_reports_violations() {
        // 1 in A_0 without the mirror entry
        let sets = vec![BTreeSet::from([1]), BTreeSet::new()];
        let rep = AdjacencySets { flavor: Flavor::Undirected, sets };
        assert_eq!(rep.validate(), vec![Violation::SymmetryViolation { i: 0, j: 1 }]);

        let sets = vec![BTreeSet::new(), BTreeSet::new(), BTreeSet::from([2])];
        let rep = AdjacencySets { flavor: Flavor::Directed, sets };
        assert_eq!(rep.validate(), vec![Violation::SelfLoop { vertex: 2 }]);

        let rep =
            AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[(0, 1), (2, 3)])).unwrap();
        assert!(rep.validate().is_empty());

        // AdjacencySets::new rejects what validate reports
        let sets = vec![BTreeSet::from([1]), BTreeSet::new()];
        assert_eq!(
            AdjacencySets::new(Flavor::Undirected, sets).unwrap_err(),
            GraphError::InvalidSets(Violation::SymmetryViolation { i: 0, j: 1 })
        );
    }

    #[test]
    fn perturbation_score_examples() {
        let a = AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[(0, 1), (2, 3)]))
            .unwrap();
        let b = AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[(0, 2), (1, 3)]))
            .unwrap();
        assert_eq!(perturbation_score(&a, &a).unwrap(), 0.0);
        assert_eq!(perturbation_score(&a, &b).unwrap(), 1.0);
        assert_eq!(perturbation_score(&b, &a).unwrap(), 1.0);

        let fwd = AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(0, 1), (1, 2), (2, 0)]))
            .unwrap();
        let rev = AdjacencySets::from_edge_list(&el(Flavor::Directed, 3, &[(1, 0), (2, 1), (0, 2)]))
            .unwrap();
        assert_eq!(perturbation_score(&fwd, &rev).unwrap(), 1.0);

        let shrunk = AdjacencySets::from_edge_list(&el(Flavor::Undirected, 4, &[])).unwrap();
        assert_eq!(perturbation_score(&a, &shrunk).unwrap_err(), GraphError::MismatchedShape);
    }

    #[test]
    fn transpose_swaps_roles() {
        let rep = AdjacencySets::from_edge_list(&el(
            Flavor::Bipartite { cols: 3 },
            2,
            &[(0, 0), (0, 2), (1, 2)],
        ))
        .unwrap();
        let t = rep.transposed().unwrap();
        assert_eq!(t.flavor(), Flavor::Bipartite { cols: 2 });
        assert_eq!(t.to_edge_list().edges, [(0, 0), (2, 0), (2, 1)]);
        assert_eq!(t.transposed().unwrap(), rep);

        let und = AdjacencySets::empty(Flavor::Undirected, 2);
        assert_eq!(und.transposed().unwrap_err(), GraphError::NotBipartite);
    }
}
