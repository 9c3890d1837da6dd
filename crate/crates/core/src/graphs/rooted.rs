use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Connected graph with a distinguished root, in canonical form.
///
/// Vertices are `0..vertex_count` with the root at 0; `edges` is the sorted
/// list of `(u, v)` pairs with `u < v`. Two rooted graphs are isomorphic
/// exactly when their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootedGraph {
    vertices: usize,
    edges: Vec<(u32, u32)>,
}

impl RootedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        let v = v as u32;
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn root_degree(&self) -> usize {
        self.degree(0)
    }

    /// Canonical form of a connected local graph with root at local index 0.
    pub fn canonical(n: usize, adjacency: &[Vec<usize>]) -> RootedGraph {
        let dist = bfs(adjacency, 0, usize::MAX);
        let colors: Vec<usize> = dist.iter().map(|d| d.unwrap_or(usize::MAX)).collect();
        let mut best: Option<Vec<(u32, u32)>> = None;
        search(adjacency, refine(adjacency, colors), &mut best);
        RootedGraph { vertices: n, edges: best.unwrap_or_default() }
    }
}

fn bfs(adjacency: &[Vec<usize>], root: usize, kappa: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    dist[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        if dx == kappa {
            continue;
        }
        for &y in &adjacency[x] {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Colour refinement: new colour = rank of (old colour, sorted neighbour colours).
fn refine(adjacency: &[Vec<usize>], mut colors: Vec<usize>) -> Vec<usize> {
    let n = colors.len();
    let mut classes = usize::MAX;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = adjacency[v].iter().map(|&u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| uniq.binary_search(&s).unwrap()).collect();
        if uniq.len() == classes {
            return next;
        }
        classes = uniq.len();
        colors = next;
    }
}

fn is_twin(adjacency: &[Vec<usize>], u: usize, v: usize) -> bool {
    let strip = |a: usize, b: usize| adjacency[a].iter().copied().filter(|&w| w != b).collect::<Vec<_>>();
    strip(u, v) == strip(v, u)
}

fn search(adjacency: &[Vec<usize>], colors: Vec<usize>, best: &mut Option<Vec<(u32, u32)>>) {
    let n = colors.len();
    let mut count = vec![0usize; n];
    for &c in &colors {
        count[c] += 1;
    }
    let Some(target) = (0..n).find(|&c| count[c] > 1) else {
        let mut form: Vec<(u32, u32)> = Vec::new();
        for (u, nb) in adjacency.iter().enumerate() {
            for &v in nb {
                let (a, b) = (colors[u] as u32, colors[v] as u32);
                if a < b {
                    form.push((a, b));
                }
            }
        }
        form.sort_unstable();
        if best.as_ref().is_none_or(|b| form < *b) {
            *best = Some(form);
        }
        return;
    };
    let cell: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cell {
        // swapping twins is an automorphism, so their branches coincide
        if tried.iter().any(|&u| is_twin(adjacency, u, v)) {
            continue;
        }
        tried.push(v);
        let split: Vec<usize> = (0..n).map(|w| 2 * colors[w] + usize::from(w != v)).collect();
        search(adjacency, refine(adjacency, split), best);
    }
}

/// Induced subgraph on the vertices within graph distance `kappa` of `x`,
/// rooted at `x`, in canonical form.
pub fn rooted_neighborhood(g: &Graph, x: usize, kappa: usize) -> Result<RootedGraph> {
    if x >= g.vertex_count() {
        return Err(Error::input(format!("vertex {x} not in graph of {} vertices", g.vertex_count())));
    }
    let mut local = vec![usize::MAX; g.vertex_count()];
    let mut members = vec![x];
    local[x] = 0;
    let mut queue = VecDeque::from([(x, 0usize)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == kappa {
            continue;
        }
        for &w in g.neighbors(v) {
            if local[w] == usize::MAX {
                local[w] = members.len();
                members.push(w);
                queue.push_back((w, d + 1));
            }
        }
    }
    let adjacency: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect())
        .collect();
    Ok(RootedGraph::canonical(members.len(), &adjacency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{Edge, GraphBuilder};
    use crate::geometry::Region;
    use crate::point_process::sample_binomial;
    use crate::rng::stream;
    use rand::seq::SliceRandom;

    fn relabeled(g: &Graph, perm: &[usize]) -> Graph {
        let edges = g.edges().iter().map(|e| Edge { u: perm[e.u], v: perm[e.v], length: e.length });
        Graph::from_edges(g.vertex_count(), edges.collect::<Vec<_>>())
    }

    #[test]
    fn small_cases() {
        let iso = Graph::edgeless(1);
        let r = rooted_neighborhood(&iso, 0, 1).unwrap();
        assert_eq!((r.vertex_count(), r.edges().len()), (1, 0));
        let e = |u, v| Edge { u, v, length: 1.0 };
        let path = Graph::from_edges(3, [e(0, 1), e(1, 2)]);
        let r = rooted_neighborhood(&path, 0, 1).unwrap();
        assert_eq!((r.vertex_count(), r.root_degree()), (2, 1));
        let mid = rooted_neighborhood(&path, 1, 1).unwrap();
        assert_eq!(mid.root_degree(), 2);
        assert_ne!(rooted_neighborhood(&path, 0, 2).unwrap(), mid);
        assert!(rooted_neighborhood(&path, 3, 1).is_err());
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = stream(21, &[]);
        for seed in 0..100u64 {
            let p = sample_binomial(40, &Region::unit_cube(2), seed).unwrap();
            let builder = [GraphBuilder::Mst, GraphBuilder::Knng { k: 2 }, GraphBuilder::Sig][seed as usize % 3];
            let g = builder.build(&p, None).unwrap();
            let mut perm: Vec<usize> = (0..p.len()).collect();
            perm.shuffle(&mut rng);
            let h = relabeled(&g, &perm);
            for (x, &px) in perm.iter().enumerate() {
                for kappa in 1..=3 {
                    assert_eq!(rooted_neighborhood(&g, x, kappa).unwrap(), rooted_neighborhood(&h, px, kappa).unwrap());
                }
            }
        }
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        // the 6-cycle and two triangles share a colour-refinement signature
        let e = |u, v| Edge { u, v, length: 1.0 };
        let mut c6: Vec<Edge> = (0..6).map(|i| e(i, (i + 1) % 6)).collect();
        c6.push(e(0, 6));
        let mut tt = vec![e(0, 1), e(1, 2), e(2, 0), e(3, 4), e(4, 5), e(5, 3)];
        tt.extend([e(6, 0), e(6, 3)]);
        c6.push(e(6, 3));
        let a = rooted_neighborhood(&Graph::from_edges(7, c6), 6, 5).unwrap();
        let b = rooted_neighborhood(&Graph::from_edges(7, tt), 6, 5).unwrap();
        assert_eq!((a.vertex_count(), a.edges().len()), (b.vertex_count(), b.edges().len()));
        assert_ne!(a, b);
    }
}
