use std::cmp::Ordering;

use super::{Edge, Graph};
use crate::dsu::DisjointSets;
use crate::geometry::distance2;
use crate::point_process::PointConfiguration;
use crate::spatial::{lex_cmp, KdTree};

/// Candidate edge with its squared length; ordered by length, then by the
/// coordinates of the lexicographically smaller and larger endpoints.
struct Candidate {
    d2: f64,
    a: usize,
    b: usize,
}

fn oriented(points: &PointConfiguration, i: usize, j: usize) -> (usize, usize) {
    if lex_cmp(points.point(i), points.point(j)) == Ordering::Greater {
        (j, i)
    } else {
        (i, j)
    }
}

fn candidate(points: &PointConfiguration, i: usize, j: usize) -> Candidate {
    let (a, b) = oriented(points, i, j);
    Candidate { d2: distance2(points.point(i), points.point(j)), a, b }
}

fn kruskal(points: &PointConfiguration, mut cands: Vec<Candidate>) -> Option<Graph> {
    let n = points.len();
    cands.sort_by(|x, y| {
        x.d2.total_cmp(&y.d2)
            .then_with(|| lex_cmp(points.point(x.a), points.point(y.a)))
            .then_with(|| lex_cmp(points.point(x.b), points.point(y.b)))
            .then_with(|| (x.a, x.b).cmp(&(y.a, y.b)))
    });
    let mut dsu = DisjointSets::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for c in cands {
        if dsu.union(c.a, c.b) {
            edges.push(Edge { u: c.a, v: c.b, length: c.d2.sqrt() });
            if edges.len() + 1 == n {
                break;
            }
        }
    }
    (edges.len() + 1 >= n).then(|| Graph::from_edges(n, edges))
}

/// Kruskal over all pairs. Quadratic; the reference construction.
pub fn build_mst_dense(points: &PointConfiguration) -> Graph {
    let n = points.len();
    if n <= 1 {
        return Graph::edgeless(n);
    }
    let mut cands = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            cands.push(candidate(points, i, j));
        }
    }
    kruskal(points, cands).expect("complete graph is connected")
}

/// Minimal spanning tree.
///
/// Runs Kruskal on the radius graph `G_r`, doubling `r` until `G_r` is
/// connected. Once it is, every tree edge has length at most `r`, so the
/// result coincides with [`build_mst_dense`].
pub fn build_mst(points: &PointConfiguration) -> Graph {
    let n = points.len();
    if n <= 64 {
        return build_mst_dense(points);
    }
    let dim = points.dim();
    let tree = KdTree::new(dim, points.coords());
    let max_nn = (0..n)
        .map(|i| {
            let p = points.point(i);
            tree.k_nearest(p, 1, Some(i)).first().map_or(0.0, |&j| distance2(p, points.point(j)).sqrt())
        })
        .fold(0.0, f64::max);
    if max_nn <= 0.0 {
        return build_mst_dense(points);
    }
    let mut r = 1.5 * max_nn;
    loop {
        let mut cands = Vec::new();
        for i in 0..n {
            for j in tree.within(points.point(i), r) {
                if j > i {
                    cands.push(candidate(points, i, j));
                }
            }
        }
        if let Some(g) = kruskal(points, cands) {
            return g;
        }
        r *= 2.0;
    }
}
