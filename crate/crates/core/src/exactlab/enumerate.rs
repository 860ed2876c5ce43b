//! Exhaustive enumeration of all realisations of a small degree sequence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::graph::{AdjacencySets, Degrees, Flavor};

use super::{LabError, StateSpace};

/// Guard for enumeration size.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_states: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_states: 1_000_000 }
    }
}

/// Streams every realisation of `degrees` under `flavor` exactly once.
/// Returns `Ok(true)` when the search space was exhausted, `Ok(false)` when
/// the visitor broke off early.
pub fn visit_realizations<F>(
    degrees: &Degrees,
    flavor: Flavor,
    visit: F,
) -> Result<bool, LabError>
where
    F: FnMut(&AdjacencySets) -> ControlFlow<()>,
{
    match (degrees, flavor) {
        (Degrees::Bipartite { rows, cols }, Flavor::Bipartite { cols: m }) => {
            if cols.len() != *m {
                return Err(LabError::MismatchedShape);
            }
            Ok(visit_matrices(rows, cols, flavor, false, visit))
        }
        (Degrees::Directed(pairs), Flavor::Directed | Flavor::DirectedWithLoops) => {
            let outs: Vec<usize> = pairs.iter().map(|&(_, b)| b).collect();
            let ins: Vec<usize> = pairs.iter().map(|&(a, _)| a).collect();
            Ok(visit_matrices(&outs, &ins, flavor, flavor == Flavor::Directed, visit))
        }
        (Degrees::Undirected(degs), Flavor::Undirected) => Ok(visit_undirected(degs, visit)),
        _ => Err(LabError::MismatchedShape),
    }
}

/// All graphs with the given degree sequence, deduplicated by canonical
/// edge list and indexed for kernel work. `TooLarge` when the state count
/// exceeds the limit, `NotRealizable` when there is no realisation at all.
pub fn enumerate_realizations(
    degrees: &Degrees,
    flavor: Flavor,
    limits: &EnumLimits,
) -> Result<StateSpace, LabError> {
    let mut states: Vec<AdjacencySets> = Vec::new();
    let mut index: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    let mut overflow = false;
    visit_realizations(degrees, flavor, |rep| {
        if states.len() >= limits.max_states {
            overflow = true;
            return ControlFlow::Break(());
        }
        let key = rep.canonical_edges();
        if let alloc::collections::btree_map::Entry::Vacant(e) = index.entry(key) {
            e.insert(states.len());
            states.push(rep.clone());
        }
        ControlFlow::Continue(())
    })?;
    if overflow {
        return Err(LabError::TooLarge { size: states.len() + 1, cap: limits.max_states });
    }
    if states.is_empty() {
        return Err(LabError::NotRealizable);
    }
    Ok(StateSpace { flavor, degrees: degrees.clone(), states, index })
}

/// Backtracks over 0/1 matrices with fixed row sums and column sums,
/// row by row. `skip_diagonal` forces a zero diagonal (simple digraphs).
fn visit_matrices<F>(
    rows: &[usize],
    cols: &[usize],
    flavor: Flavor,
    skip_diagonal: bool,
    mut visit: F,
) -> bool
where
    F: FnMut(&AdjacencySets) -> ControlFlow<()>,
{
    let n = rows.len();
    let ncols = cols.len();
    if rows.iter().sum::<usize>() != cols.iter().sum::<usize>() {
        return true;
    }
    if rows.iter().any(|&r| r > ncols) || cols.iter().any(|&c| c > n) {
        return true;
    }
    // filling big rows first makes the capacity prune bite early
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| rows[y].cmp(&rows[x]));

    let mut caps: Vec<usize> = cols.to_vec();
    let mut rep = AdjacencySets::empty(flavor, n);
    let mut chosen: Vec<usize> = Vec::new();

    fn feasible(caps: &[usize], order: &[usize], depth: usize, skip_diagonal: bool) -> bool {
        let remaining = &order[depth..];
        for (c, &cap) in caps.iter().enumerate() {
            if cap == 0 {
                continue;
            }
            let mut servers = remaining.len();
            if skip_diagonal && remaining.contains(&c) {
                servers -= 1;
            }
            if cap > servers {
                return false;
            }
        }
        true
    }

    fn rec<F>(
        depth: usize,
        order: &[usize],
        rows: &[usize],
        caps: &mut Vec<usize>,
        rep: &mut AdjacencySets,
        chosen: &mut Vec<usize>,
        skip_diagonal: bool,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&AdjacencySets) -> ControlFlow<()>,
    {
        if depth == order.len() {
            debug_assert!(caps.iter().all(|&c| c == 0));
            return visit(rep);
        }
        let r = order[depth];
        choose(depth, order, rows, caps, rep, chosen, skip_diagonal, r, 0, rows[r], visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose<F>(
        depth: usize,
        order: &[usize],
        rows: &[usize],
        caps: &mut Vec<usize>,
        rep: &mut AdjacencySets,
        chosen: &mut Vec<usize>,
        skip_diagonal: bool,
        r: usize,
        start: usize,
        need: usize,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&AdjacencySets) -> ControlFlow<()>,
    {
        if need == 0 {
            if !feasible(caps, order, depth + 1, skip_diagonal) {
                return ControlFlow::Continue(());
            }
            return rec(depth + 1, order, rows, caps, rep, chosen, skip_diagonal, visit);
        }
        let ncols = caps.len();
        if start + need > ncols {
            return ControlFlow::Continue(());
        }
        for c in start..=(ncols - need) {
            if caps[c] == 0 || (skip_diagonal && c == r) {
                continue;
            }
            caps[c] -= 1;
            rep.sets_mut()[r].insert(c);
            chosen.push(c);
            let flow = choose(
                depth,
                order,
                rows,
                caps,
                rep,
                chosen,
                skip_diagonal,
                r,
                c + 1,
                need - 1,
                visit,
            );
            chosen.pop();
            rep.sets_mut()[r].remove(&c);
            caps[c] += 1;
            flow?;
        }
        ControlFlow::Continue(())
    }

    matches!(
        rec(0, &order, rows, &mut caps, &mut rep, &mut chosen, skip_diagonal, &mut visit),
        ControlFlow::Continue(())
    )
}

/// Backtracks over simple graphs: vertex by vertex, each vertex picks its
/// still-needed neighbours among the higher-indexed vertices.
fn visit_undirected<F>(degrees: &[usize], mut visit: F) -> bool
where
    F: FnMut(&AdjacencySets) -> ControlFlow<()>,
{
    let n = degrees.len();
    // odd total, or a degree a simple vertex cannot reach: nothing to visit
    if degrees.iter().sum::<usize>() % 2 != 0 || degrees.iter().any(|&d| d >= n) {
        return true;
    }
    let mut residual: Vec<usize> = degrees.to_vec();
    let mut rep = AdjacencySets::empty(Flavor::Undirected, n);

    fn rec<F>(
        v: usize,
        residual: &mut Vec<usize>,
        rep: &mut AdjacencySets,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&AdjacencySets) -> ControlFlow<()>,
    {
        let n = residual.len();
        if v == n {
            return visit(rep);
        }
        if residual[v] == 0 {
            return rec(v + 1, residual, rep, visit);
        }
        choose(v, v + 1, residual[v], residual, rep, visit)
    }

    fn choose<F>(
        v: usize,
        start: usize,
        need: usize,
        residual: &mut Vec<usize>,
        rep: &mut AdjacencySets,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&AdjacencySets) -> ControlFlow<()>,
    {
        let n = residual.len();
        if need == 0 {
            let saved = core::mem::replace(&mut residual[v], 0);
            let flow = rec(v + 1, residual, rep, visit);
            residual[v] = saved;
            return flow;
        }
        if start >= n || n - start < need {
            return ControlFlow::Continue(());
        }
        for u in start..=(n - need) {
            if residual[u] == 0 {
                continue;
            }
            residual[u] -= 1;
            rep.sets_mut()[v].insert(u);
            rep.sets_mut()[u].insert(v);
            let flow = choose(v, u + 1, need - 1, residual, rep, visit);
            rep.sets_mut()[v].remove(&u);
            rep.sets_mut()[u].remove(&v);
            residual[u] += 1;
            flow?;
        }
        ControlFlow::Continue(())
    }

    matches!(rec(0, &mut residual, &mut rep, &mut visit), ControlFlow::Continue(()))
}

pub(super) type StateIndex = BTreeMap<Vec<(usize, usize)>, usize>;
