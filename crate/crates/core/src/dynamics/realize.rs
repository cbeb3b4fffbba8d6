//! Search for a dynamically equivalent weakly reversible realization with a
//! single linkage class, by repeatedly splitting reactions in two.
//!
//! A split of `s -> t` (rate k) into targets `t1`, `t2` needs
//! `k (t - s) = k1 (t1 - s) + k2 (t2 - s)` with `k1, k2 > 0`. Split targets
//! are drawn from the source complexes: a complex that is never a source
//! stays a sink and can never lie on a cycle.
//!
//! The search is depth-first. At each state it first removes edges into
//! non-source complexes (those must all go), and otherwise picks the first
//! initial strongly connected component and tries splits that add an edge
//! into it. Edges between components are split before edges on cycles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

use super::{split_reaction, DynamicsError, MassActionSystem};
use crate::linalg::Q;
use crate::network::{strongly_connected_components, Complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WrBudget {
    /// Maximum number of splits along one branch; `None` means twice the
    /// number of reactions.
    pub max_splits: Option<usize>,
    /// Maximum number of search states expanded.
    pub node_limit: usize,
}

impl Default for WrBudget {
    fn default() -> Self {
        WrBudget {
            max_splits: None,
            node_limit: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStep {
    pub source: Complex,
    pub target: Complex,
    pub rate: Q,
    pub targets: [Complex; 2],
    pub rates: [Q; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub system: MassActionSystem,
    pub splits: Vec<SplitStep>,
    pub nodes_explored: usize,
}

type Edges = BTreeMap<(usize, usize), Q>;

struct Search {
    complexes: Vec<Vec<i64>>,
    sources: Vec<usize>,
    is_source: Vec<bool>,
    max_splits: usize,
    node_limit: usize,
    nodes: usize,
    seen: BTreeSet<Vec<((usize, usize), Q)>>,
    #[allow(clippy::type_complexity)]
    path: Vec<(usize, usize, Q, [(usize, Q); 2])>,
}

/// Candidate split: source, target and the two new (target, rate) pairs.
type Candidate = (usize, usize, [(usize, Q); 2]);

/// Returns a weakly reversible single-linkage-class system dynamically
/// equivalent to `sys`, or `None` if the budget runs out first.
pub fn wr_realize(sys: &MassActionSystem, budget: WrBudget) -> Result<Option<Realization>, DynamicsError> {
    let rates = sys.constant_rates()?;
    let net = sys.network();
    let complexes_c = net.complexes();
    let index = net.complex_index();
    let complexes: Vec<Vec<i64>> = complexes_c.iter().map(Complex::to_i64).collect();
    let mut is_source = alloc::vec![false; complexes.len()];
    for r in net.reactions() {
        is_source[index[&r.source]] = true;
    }
    let sources = (0..complexes.len()).filter(|&i| is_source[i]).collect();
    let mut edges = Edges::new();
    for (r, k) in net.reactions().iter().zip(&rates) {
        edges.insert((index[&r.source], index[&r.target]), k.clone());
    }
    let mut search = Search {
        complexes,
        sources,
        is_source,
        max_splits: budget.max_splits.unwrap_or(2 * net.len()),
        node_limit: budget.node_limit,
        nodes: 0,
        seen: BTreeSet::new(),
        path: Vec::new(),
    };
    if !search.dfs(&edges) {
        return Ok(None);
    }

    // Replay the split history on the real system; this re-checks every
    // decomposition and carries labels along.
    let mut current = sys.clone();
    let mut steps = Vec::new();
    for (s, t, k, parts) in &search.path {
        let src = &complexes_c[*s];
        let tgt = &complexes_c[*t];
        let r = current.network().find(src, tgt).expect("edge present during replay");
        let v1 = diff(&search.complexes[parts[0].0], &search.complexes[*s]);
        let v2 = diff(&search.complexes[parts[1].0], &search.complexes[*s]);
        current = split_reaction(&current, r, &v1, &v2, parts[0].1.clone(), parts[1].1.clone())?;
        steps.push(SplitStep {
            source: src.clone(),
            target: tgt.clone(),
            rate: k.clone(),
            targets: [complexes_c[parts[0].0].clone(), complexes_c[parts[1].0].clone()],
            rates: [parts[0].1.clone(), parts[1].1.clone()],
        });
    }
    Ok(Some(Realization {
        system: current,
        splits: steps,
        nodes_explored: search.nodes,
    }))
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Positive `(l1, l2)` with `u = l1 a + l2 b`, when unique.
fn decompose(u: &[i64], a: &[i64], b: &[i64]) -> Option<(Q, Q)> {
    let n = u.len();
    for p in 0..n {
        for q in p + 1..n {
            let det = a[p] * b[q] - a[q] * b[p];
            if det == 0 {
                continue;
            }
            let n1 = u[p] * b[q] - u[q] * b[p];
            let n2 = a[p] * u[q] - a[q] * u[p];
            if (0..n).any(|k| det * u[k] != n1 * a[k] + n2 * b[k]) {
                return None;
            }
            let positive = |x: i64| (x > 0) == (det > 0) && x != 0;
            if !positive(n1) || !positive(n2) {
                return None;
            }
            let d = Q::from_integer(det.into());
            return Some((Q::from_integer(n1.into()) / &d, Q::from_integer(n2.into()) / d));
        }
    }
    None
}

impl Search {
    fn key(edges: &Edges) -> Vec<((usize, usize), Q)> {
        edges.iter().map(|(k, v)| (*k, v.clone())).collect()
    }

    fn dfs(&mut self, edges: &Edges) -> bool {
        if self.nodes >= self.node_limit {
            return false;
        }
        self.nodes += 1;

        let active: BTreeSet<usize> = edges.keys().flat_map(|&(s, t)| [s, t]).collect();
        let local: Vec<usize> = active.iter().copied().collect();
        let pos: BTreeMap<usize, usize> = local.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut adj = alloc::vec![Vec::new(); local.len()];
        for &(s, t) in edges.keys() {
            adj[pos[&s]].push(pos[&t]);
        }
        let comps = strongly_connected_components(&adj);
        if comps.len() <= 1 {
            return true;
        }
        if self.path.len() >= self.max_splits {
            return false;
        }
        let mut comp_of = alloc::vec![0; local.len()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                comp_of[v] = c;
            }
        }
        let mut has_in = alloc::vec![false; comps.len()];
        let mut has_out = alloc::vec![false; comps.len()];
        for &(s, t) in edges.keys() {
            let (a, b) = (comp_of[pos[&s]], comp_of[pos[&t]]);
            if a != b {
                has_out[a] = true;
                has_in[b] = true;
            }
        }

        let candidates = self.candidates(edges, &local, &comps, &comp_of, &pos, &has_in, &has_out);
        for (s, t, parts) in candidates {
            let k = edges[&(s, t)].clone();
            let mut next = edges.clone();
            next.remove(&(s, t));
            for (target, rate) in &parts {
                let entry = next.entry((s, *target)).or_insert_with(Q::zero);
                *entry += rate;
            }
            if !self.seen.insert(Self::key(&next)) {
                continue;
            }
            self.path.push((s, t, k, parts));
            if self.dfs(&next) {
                return true;
            }
            self.path.pop();
            if self.nodes >= self.node_limit {
                return false;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn candidates(
        &self,
        edges: &Edges,
        local: &[usize],
        comps: &[Vec<usize>],
        comp_of: &[usize],
        pos: &BTreeMap<usize, usize>,
        has_in: &[bool],
        has_out: &[bool],
    ) -> Vec<Candidate> {
        let mut out = Vec::new();

        // Edges into a complex that is never a source must all be split.
        if let Some(&sink) = local.iter().find(|&&c| !self.is_source[c]) {
            let (&(s, t), k) = edges.iter().find(|((_, t), _)| *t == sink).expect("sink has an in-edge");
            for &t1 in &self.sources {
                for &t2 in &self.sources {
                    if t1 < t2 && t1 != s && t2 != s {
                        self.push_split(&mut out, s, t, k, t1, t2);
                    }
                }
            }
            return out;
        }

        let initial = (0..comps.len())
            .filter(|&c| !has_in[c])
            .min_by_key(|&c| comps[c].iter().map(|&v| local[v]).min())
            .expect("a condensation has an initial component");
        let inside: Vec<usize> = comps[initial].iter().map(|&v| local[v]).collect();

        let mut order: Vec<_> = edges
            .keys()
            .filter(|(s, _)| comp_of[pos[s]] != initial)
            .map(|&(s, t)| {
                let (a, b) = (comp_of[pos[&s]], comp_of[pos[&t]]);
                ((a == b, has_out[a], s, t), (s, t))
            })
            .collect();
        order.sort();
        for (_, (s, t)) in order {
            let k = &edges[&(s, t)];
            for &t1 in &inside {
                for &t2 in &self.sources {
                    if t2 != t1 && t2 != s && t1 != s {
                        self.push_split(&mut out, s, t, k, t1, t2);
                    }
                }
            }
        }
        out
    }

    fn push_split(&self, out: &mut Vec<Candidate>, s: usize, t: usize, k: &Q, t1: usize, t2: usize) {
        let c = &self.complexes;
        let u = diff(&c[t], &c[s]);
        let a = diff(&c[t1], &c[s]);
        let b = diff(&c[t2], &c[s]);
        if let Some((l1, l2)) = decompose(&u, &a, &b) {
            out.push((s, t, [(t1, k * l1), (t2, k * l2)]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition() {
        let (a, b) = decompose(&[0, -1, 1, 0], &[1, -1, 0, 0], &[-1, 0, 1, 0]).unwrap();
        assert_eq!((a, b), (Q::from_integer(1.into()), Q::from_integer(1.into())));
        assert!(decompose(&[1, 0], &[1, 0], &[2, 0]).is_none());
        assert!(decompose(&[-1, 0], &[1, 0], &[0, 1]).is_none());
    }

    #[test]
    fn already_realized_needs_no_splits() {
        let sys = MassActionSystem::parse("A -> B\nB -> C\nC -> A").unwrap();
        let r = wr_realize(&sys, WrBudget::default()).unwrap().unwrap();
        assert!(r.splits.is_empty());
        assert_eq!(r.system, sys);
    }

    #[test]
    fn growth_has_no_realization() {
        let sys = MassActionSystem::parse("X1 -> 2X1").unwrap();
        assert!(wr_realize(&sys, WrBudget::default()).unwrap().is_none());
    }

    #[test]
    fn zero_budget_on_non_wr_input() {
        let sys = MassActionSystem::parse("A -> B").unwrap();
        let budget = WrBudget {
            max_splits: Some(0),
            node_limit: 10,
        };
        assert!(wr_realize(&sys, budget).unwrap().is_none());
    }
}
