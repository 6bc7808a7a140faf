use std::collections::BTreeSet;

use super::{EmbeddedDigraph, VertexId};

/// Tarjan's algorithm restricted to `alive` vertices, iterative so deep
/// graphs do not overflow the stack. Components come out in reverse
/// topological order; each is sorted.
pub(crate) fn scc_indices(g: &EmbeddedDigraph, alive: &[bool]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if !alive[root] || index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            let outs = g.out_arcs(v);
            if top.1 < outs.len() {
                let w = g.arc_rec(outs[top.1]).head;
                top.1 += 1;
                if !alive[w] {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
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
                        let w = stack.pop().unwrap();
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

/// Components that carry a dicycle: more than one vertex, or a loop.
pub(crate) fn nontrivial_scc_indices(g: &EmbeddedDigraph, alive: &[bool]) -> Vec<Vec<usize>> {
    scc_indices(g, alive)
        .into_iter()
        .filter(|c| c.len() > 1 || g.out_arcs(c[0]).iter().any(|&k| g.arc_rec(k).head == c[0]))
        .collect()
}

/// Strongly connected components, each sorted, ordered by smallest member.
pub fn scc(g: &EmbeddedDigraph) -> Vec<Vec<VertexId>> {
    let alive = vec![true; g.n()];
    let mut comps: Vec<Vec<VertexId>> = scc_indices(g, &alive)
        .into_iter()
        .map(|c| c.into_iter().map(|i| g.id(i)).collect())
        .collect();
    comps.sort();
    comps
}

/// Sub-map induced by the vertices lying on some dicycle of `g - removed`.
pub fn residual_graph(g: &EmbeddedDigraph, removed: &BTreeSet<VertexId>) -> EmbeddedDigraph {
    let alive: Vec<bool> = (0..g.n()).map(|i| !removed.contains(&g.id(i))).collect();
    let mut keep = vec![false; g.n()];
    for comp in nontrivial_scc_indices(g, &alive) {
        for i in comp {
            keep[i] = true;
        }
    }
    g.induced_mask(&keep)
}
