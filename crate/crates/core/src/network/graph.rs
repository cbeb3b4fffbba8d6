use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::ReactionNetwork;

/// Strongly connected components of a digraph given as adjacency lists.
/// Iterative Tarjan; components come out in reverse topological order.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    // (vertex, next neighbour position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Complex-level adjacency lists indexed like [`ReactionNetwork::complexes`].
pub(crate) fn complex_digraph(net: &ReactionNetwork) -> Vec<Vec<usize>> {
    let idx = net.complex_index();
    let mut adj = vec![Vec::new(); idx.len()];
    for r in net.reactions() {
        adj[idx[&r.source]].push(idx[&r.target]);
    }
    adj
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Weakly connected components of the E-graph, as indices into
/// [`ReactionNetwork::complexes`], each sorted, ordered by smallest member.
pub fn linkage_classes(net: &ReactionNetwork) -> Vec<Vec<usize>> {
    let adj = complex_digraph(net);
    let n = adj.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for v in 0..n {
        let root = find(&mut parent, v);
        if slot[root] == usize::MAX {
            slot[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[root]].push(v);
    }
    classes
}

/// Every reaction lies on a directed cycle.
pub fn is_weakly_reversible(net: &ReactionNetwork) -> bool {
    let adj = complex_digraph(net);
    let comps = strongly_connected_components(&adj);
    let mut comp_of = vec![0; adj.len()];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    adj.iter()
        .enumerate()
        .all(|(u, outs)| outs.iter().all(|&v| comp_of[u] == comp_of[v]))
}

/// The edge set is closed under reversal.
pub fn is_reversible(net: &ReactionNetwork) -> bool {
    let edges: BTreeSet<_> = net.reactions().iter().map(|r| r.key()).collect();
    net.reactions()
        .iter()
        .all(|r| edges.contains(&(&r.target, &r.source)))
}

/// Species-level digraph: `i -> j` when some reaction has a source supported
/// exactly on `{X_i}` and a target containing `X_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductionGraph {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl ProductionGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(i, j) in &self.edges {
            adj[i].push(j);
        }
        adj
    }
}

pub fn production_graph(net: &ReactionNetwork) -> ProductionGraph {
    let mut edges = BTreeSet::new();
    for r in net.reactions() {
        let support = r.source.support();
        if support.len() != 1 {
            continue;
        }
        let i = *support.iter().next().expect("one element");
        for j in r.target.support() {
            edges.insert((i, j));
        }
    }
    ProductionGraph {
        nodes: net.species_count(),
        edges,
    }
}

/// Strong connectivity over all species nodes; the empty graph counts as
/// connected.
pub fn is_strongly_connected(g: &ProductionGraph) -> bool {
    strongly_connected_components(&g.adjacency()).len() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;

    #[test]
    fn linkage_classes_of_disjoint_edges() {
        let net = parse_network("A -> B\nC -> D").unwrap();
        assert_eq!(linkage_classes(&net), vec![vec![0, 1], vec![2, 3]]);
        assert!(linkage_classes(&ReactionNetwork::empty(2)).is_empty());
    }

    #[test]
    fn weak_reversibility() {
        assert!(is_weakly_reversible(&parse_network("A -> B\nB -> C\nC -> A").unwrap()));
        assert!(!is_weakly_reversible(&parse_network("A -> B").unwrap()));
        assert!(is_weakly_reversible(&ReactionNetwork::empty(1)));
    }

    #[test]
    fn reversibility() {
        assert!(is_reversible(&parse_network("A -> B\nB -> A").unwrap()));
        assert!(!is_reversible(&parse_network("A -> B").unwrap()));
    }

    #[test]
    fn production_graph_basics() {
        let g = production_graph(&parse_network("# species: X1 X2 X3\n2X1 -> 2X1 + X2\nX2 -> X3\nX3 + X1 -> X2").unwrap());
        assert_eq!(g.edges, BTreeSet::from([(0, 0), (0, 1), (1, 2)]));
        assert!(!is_strongly_connected(&g));

        let cycle = ProductionGraph {
            nodes: 3,
            edges: BTreeSet::from([(0, 1), (1, 2), (2, 0)]),
        };
        assert!(is_strongly_connected(&cycle));
        let line = ProductionGraph {
            nodes: 2,
            edges: BTreeSet::from([(0, 1)]),
        };
        assert!(!is_strongly_connected(&line));
        assert!(production_graph(&ReactionNetwork::empty(0)).edges.is_empty());
    }

    #[test]
    fn tarjan_matches_known_components() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![4], vec![3], vec![]];
        let mut comps = strongly_connected_components(&adj);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
    }
}
