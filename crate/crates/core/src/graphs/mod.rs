//! Geometric graphs over point configurations.
//!
//! Four stabilizing graphs are provided: the minimal spanning tree, the
//! k-nearest-neighbour graph, the sphere of influence graph and the on-line
//! nearest-neighbour graph (which orders points by their marks). All ties in
//! distance are broken by lexicographic order of coordinates.

mod delta;
mod mst;
mod nearest;
mod online;
mod rooted;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::distance;
use crate::point_process::PointConfiguration;

pub use delta::{edge_delta, EdgeDelta};
pub use mst::{build_mst, build_mst_dense};
pub use nearest::{build_knng, build_sig};
pub use online::build_online_nng;
pub use rooted::{rooted_neighborhood, RootedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Undirected simple graph on the points `0..n` of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: usize,
    edges: Vec<Edge>,
}

impl From<GraphRepr> for Graph {
    fn from(r: GraphRepr) -> Self {
        Graph::from_edges(r.vertices, r.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr { vertices: g.n, edges: g.edges }
    }
}

impl Graph {
    pub fn edgeless(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adjacency: vec![Vec::new(); n] }
    }

    /// Build from edges, orienting `u < v`, dropping self-loops and duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .filter(|e| e.u != e.v)
            .map(|e| if e.u < e.v { e } else { Edge { u: e.v, v: e.u, length: e.length } })
            .collect();
        edges.sort_by_key(Edge::key);
        edges.dedup_by_key(|e| e.key());
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Graph { n, edges, adjacency }
    }

    /// Edges between index pairs, with lengths taken from `points`.
    pub fn from_pairs(points: &PointConfiguration, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = pairs
            .into_iter()
            .map(|(u, v)| Edge { u, v, length: distance(points.point(u), points.point(v)) });
        Graph::from_edges(points.len(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search_by_key(&(a, b), Edge::key).is_ok()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Component label per vertex, labels numbered from 0 in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &y in &self.adjacency[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    pub fn is_tree(&self) -> bool {
        self.n == 0 || (self.edges.len() + 1 == self.n && self.is_connected())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["u", "v", "length"])?;
        for e in &self.edges {
            out.write_record([e.u.to_string(), e.v.to_string(), crate::fmt17(e.length)])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Which graph to build over a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphBuilder {
    Mst,
    Knng { k: usize },
    Sig,
    OnlineNng,
    /// No edges; the graph underlying plain point counts.
    Edgeless,
}

impl GraphBuilder {
    pub fn needs_marks(&self) -> bool {
        matches!(self, GraphBuilder::OnlineNng)
    }

    pub fn build(&self, points: &PointConfiguration, marks: Option<&[f64]>) -> Result<Graph> {
        match *self {
            GraphBuilder::Mst => Ok(build_mst(points)),
            GraphBuilder::Knng { k } => build_knng(points, k),
            GraphBuilder::Sig => build_sig(points),
            GraphBuilder::OnlineNng => {
                let marks = marks.ok_or_else(|| Error::input("on-line NNG requires marks"))?;
                build_online_nng(points, marks)
            }
            GraphBuilder::Edgeless => Ok(Graph::edgeless(points.len())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GraphBuilder::Mst => "mst".into(),
            GraphBuilder::Knng { k } => format!("{k}-nng"),
            GraphBuilder::Sig => "sig".into(),
            GraphBuilder::OnlineNng => "online-nng".into(),
            GraphBuilder::Edgeless => "edgeless".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_normalizes() {
        let e = |u, v| Edge { u, v, length: 1.0 };
        let g = Graph::from_edges(3, [e(1, 0), e(0, 1), e(2, 2), e(2, 1)]);
        assert_eq!(g.edges().iter().map(Edge::key).collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1));
        assert!(g.is_tree());
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn json_and_csv_export() {
        let pts = PointConfiguration::from_points(2, &[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let g = Graph::from_pairs(&pts, [(0, 1)]);
        let s = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("0,1,5.0000000000000000e0"));
    }

    #[test]
    fn builder_json() {
        let b: GraphBuilder = serde_json::from_str(r#"{"kind":"knng","k":2}"#).unwrap();
        assert_eq!(b, GraphBuilder::Knng { k: 2 });
        assert!(GraphBuilder::OnlineNng.build(&PointConfiguration::empty(2), None).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_points() -> impl Strategy<Value = (PointConfiguration, Vec<f64>)> {
            (2usize..40).prop_flat_map(|n| {
                (prop::collection::vec(0.0f64..1.0, 2 * n), prop::collection::vec(0.0f64..1.0, n))
                    .prop_map(|(c, m)| (PointConfiguration::from_flat(2, c).unwrap(), m))
            })
        }

        const BUILDERS: [GraphBuilder; 5] = [
            GraphBuilder::Mst,
            GraphBuilder::Knng { k: 1 },
            GraphBuilder::Knng { k: 3 },
            GraphBuilder::Sig,
            GraphBuilder::OnlineNng,
        ];

        proptest! {
            #[test]
            fn graphs_are_simple_with_exact_lengths((pts, marks) in arb_points()) {
                for b in BUILDERS {
                    let g = b.build(&pts, Some(&marks)).unwrap();
                    let keys: Vec<_> = g.edges().iter().map(Edge::key).collect();
                    prop_assert!(keys.windows(2).all(|w| w[0] < w[1]), "{}: duplicate or unsorted edges", b.name());
                    for e in g.edges() {
                        prop_assert!(e.u != e.v);
                        prop_assert!((e.length - distance(pts.point(e.u), pts.point(e.v))).abs() <= 1e-12);
                    }
                }
            }

            #[test]
            fn mst_matches_dense_reference((pts, _) in arb_points()) {
                let g = build_mst(&pts);
                prop_assert!(g.is_tree());
                prop_assert!((g.total_length() - build_mst_dense(&pts).total_length()).abs() <= 1e-9);
            }

            #[test]
            fn knng_degrees_and_online_connectivity((pts, marks) in arb_points()) {
                let g = GraphBuilder::Knng { k: 3 }.build(&pts, None).unwrap();
                prop_assert!((0..pts.len()).all(|x| g.degree(x) >= 3.min(pts.len() - 1)));
                let o = GraphBuilder::OnlineNng.build(&pts, Some(&marks)).unwrap();
                prop_assert!(o.is_tree());
            }

            #[test]
            fn mst_insertion_invariants((pts, _) in arb_points(), x in prop::collection::vec(0.0f64..1.0, 2)) {
                let d = edge_delta(&GraphBuilder::Mst, &pts, None, &x, None).unwrap();
                prop_assert!(d.added.iter().all(|e| e.touches(d.inserted)));
                prop_assert_eq!(d.added.len(), d.removed.len() + 1);
                prop_assert!(d.longest_removed() <= 2.0 * d.longest_added() + 1e-12);
            }
        }
    }
}
