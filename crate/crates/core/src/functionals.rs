//! Functionals of point configurations over regions.
//!
//! Every functional is a set function `h(X, A)` built from a geometric graph
//! over `X`: weighted edge lengths, sums of local landscape scores, component
//! counts, plain point counts and constants.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::graphs::{rooted_neighborhood, Graph, GraphBuilder, RootedGraph};
use crate::point_process::PointConfiguration;

/// Edge weight as a function of length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    /// `r^alpha`.
    Power { alpha: f64 },
    /// `1` if `r < s`, else `0`.
    Indicator { s: f64 },
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Phi {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Phi::Power { alpha } => r.powf(alpha),
            Phi::Indicator { s } => f64::from(u8::from(r < s)),
            Phi::Constant { value } => value,
        }
    }

    /// Order `gamma` with `phi(a r) = a^gamma phi(r)`, when it exists.
    pub fn homogeneity_order(&self) -> Option<f64> {
        match *self {
            Phi::Power { alpha } => Some(alpha),
            Phi::Constant { .. } => Some(0.0),
            Phi::Indicator { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Phi::Power { alpha } if !alpha.is_finite() => Err(Error::InvalidSpec("power exponent must be finite".into())),
            Phi::Indicator { s } if !(s > 0.0 && s.is_finite()) => {
                Err(Error::InvalidSpec("indicator threshold must be positive".into()))
            }
            Phi::Constant { value } if !value.is_finite() => Err(Error::InvalidSpec("constant must be finite".into())),
            _ => Ok(()),
        }
    }
}

/// Bounded score of a rooted local graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Psi {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `1` if the root has exactly `degree` neighbours.
    RootDegreeIs { degree: usize },
    /// Root degree, capped at the declared `bound`.
    RootDegree { bound: usize },
    /// `1` if the rooted neighbourhood has at most `m` vertices.
    SizeAtMost { m: usize },
}

impl Psi {
    pub fn eval(&self, g: &RootedGraph) -> f64 {
        match *self {
            Psi::Constant { value } => value,
            Psi::RootDegreeIs { degree } => f64::from(u8::from(g.root_degree() == degree)),
            Psi::RootDegree { bound } => g.root_degree().min(bound) as f64,
            Psi::SizeAtMost { m } => f64::from(u8::from(g.vertex_count() <= m)),
        }
    }

    /// Declared bound on `|psi|`.
    pub fn bound(&self) -> f64 {
        match *self {
            Psi::Constant { value } => value.abs(),
            Psi::RootDegree { bound } => bound as f64,
            Psi::RootDegreeIs { .. } | Psi::SizeAtMost { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    WeightedEdgeLength { phi: Phi },
    VertexLandscape { psi: Psi, kappa: usize },
    ComponentCount,
    PointCount,
    /// `h(X, A) = value` regardless of input.
    Constant { value: f64 },
}

/// A functional family together with the graph it is evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "edgeless")]
    pub graph: GraphBuilder,
}

fn edgeless() -> GraphBuilder {
    GraphBuilder::Edgeless
}

impl FunctionalSpec {
    pub fn new(family: Family, graph: GraphBuilder) -> Self {
        FunctionalSpec { name: None, family, graph }
    }

    pub fn point_count() -> Self {
        Self::new(Family::PointCount, GraphBuilder::Edgeless)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(Family::Constant { value }, GraphBuilder::Edgeless)
    }

    pub fn total_length(graph: GraphBuilder) -> Self {
        Self::new(Family::WeightedEdgeLength { phi: Phi::Power { alpha: 1.0 } }, graph)
    }

    pub fn component_count(graph: GraphBuilder) -> Self {
        Self::new(Family::ComponentCount, graph)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        let fam = match self.family {
            Family::WeightedEdgeLength { phi: Phi::Power { alpha } } => format!("length^{alpha}"),
            Family::WeightedEdgeLength { phi: Phi::Indicator { s } } => format!("edges<{s}"),
            Family::WeightedEdgeLength { phi: Phi::Constant { value } } => format!("edges*{value}"),
            Family::VertexLandscape { kappa, .. } => format!("landscape{kappa}"),
            Family::ComponentCount => "components".into(),
            Family::PointCount => return "point_count".into(),
            Family::Constant { value } => return format!("constant{value}"),
        };
        format!("{}:{}", self.graph.name(), fam)
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::WeightedEdgeLength { phi } => phi.validate(),
            Family::VertexLandscape { psi, kappa } => {
                if kappa == 0 {
                    return Err(Error::InvalidSpec("kappa must be at least 1".into()));
                }
                if !psi.bound().is_finite() {
                    return Err(Error::InvalidSpec("psi must be bounded".into()));
                }
                Ok(())
            }
            Family::Constant { value } if !value.is_finite() => Err(Error::InvalidSpec("constant must be finite".into())),
            _ => Ok(()),
        }
    }

    /// Whether evaluation needs a graph at all.
    pub fn uses_graph(&self) -> bool {
        matches!(
            self.family,
            Family::WeightedEdgeLength { .. } | Family::VertexLandscape { .. } | Family::ComponentCount
        )
    }

    pub fn needs_marks(&self) -> bool {
        self.uses_graph() && self.graph.needs_marks()
    }

    /// Order `gamma` of homogeneity `h(aX, aA) = a^gamma h(X, A)`, when known.
    pub fn homogeneity_order(&self) -> Option<f64> {
        match self.family {
            Family::WeightedEdgeLength { phi } => phi.homogeneity_order(),
            _ => Some(0.0),
        }
    }

    /// Constant `beta` with `|h(X, A)| <= beta (diam X + card X)^beta`.
    pub fn growth_exponent(&self, dim: usize) -> Option<f64> {
        let edge_factor = match self.graph {
            GraphBuilder::Mst | GraphBuilder::OnlineNng | GraphBuilder::Edgeless => 1.0,
            GraphBuilder::Knng { k } => k as f64,
            // linear edge bound for the planar sphere of influence graph
            GraphBuilder::Sig if dim <= 2 => 15.0,
            GraphBuilder::Sig => return None,
        };
        match self.family {
            Family::PointCount | Family::ComponentCount => Some(1.0),
            Family::VertexLandscape { psi, .. } => Some(psi.bound().max(1.0)),
            Family::Constant { value } => (value == 0.0).then_some(1.0),
            Family::WeightedEdgeLength { phi } => match phi {
                Phi::Power { alpha } if alpha >= 0.0 => Some(edge_factor.max(alpha + 1.0)),
                Phi::Power { .. } => None,
                Phi::Indicator { .. } => Some(edge_factor),
                Phi::Constant { value } => Some((value.abs() * edge_factor).max(1.0)),
            },
        }
    }

    /// `h(X, A)` with a prebuilt graph over `points` (required when the
    /// family uses one).
    pub fn evaluate_with(&self, points: &PointConfiguration, graph: Option<&Graph>, a: &Region) -> Result<f64> {
        let need = || graph.ok_or_else(|| Error::input("functional requires a graph"));
        Ok(match self.family {
            Family::WeightedEdgeLength { phi } => weighted_edge_length(need()?, points, a, &phi),
            Family::VertexLandscape { psi, kappa } => vertex_landscape_sum(need()?, points, a, &psi, kappa)?,
            Family::ComponentCount => component_count(need()?, points, a) as f64,
            Family::PointCount => point_count(points, a) as f64,
            Family::Constant { value } => value,
        })
    }

    /// `h(X, A)`, building the graph as needed.
    pub fn evaluate(&self, points: &PointConfiguration, marks: Option<&[f64]>, a: &Region) -> Result<f64> {
        if self.uses_graph() {
            let g = self.build_graph(points, marks)?;
            self.evaluate_with(points, Some(&g), a)
        } else {
            self.evaluate_with(points, None, a)
        }
    }

    fn build_graph(&self, points: &PointConfiguration, marks: Option<&[f64]>) -> Result<Graph> {
        // the sphere of influence graph is undefined below two points
        if matches!(self.graph, GraphBuilder::Sig) && points.len() < 2 {
            return Ok(Graph::edgeless(points.len()));
        }
        self.graph.build(points, marks)
    }
}

/// Evaluate several functionals on one realization, building each distinct
/// graph once. `regions[i]` is paired with `specs[i]`.
pub fn evaluate_many(
    specs: &[FunctionalSpec],
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    regions: &[Region],
) -> Result<Vec<f64>> {
    if specs.len() != regions.len() {
        return Err(Error::input("one region per functional required"));
    }
    let mut cache: HashMap<GraphBuilder, Graph> = HashMap::new();
    specs
        .iter()
        .zip(regions)
        .map(|(spec, a)| {
            if !spec.uses_graph() {
                return spec.evaluate_with(points, None, a);
            }
            if let Entry::Vacant(e) = cache.entry(spec.graph) {
                e.insert(spec.build_graph(points, marks)?);
            }
            spec.evaluate_with(points, cache.get(&spec.graph), a)
        })
        .collect()
}

fn membership(points: &PointConfiguration, a: &Region) -> Vec<bool> {
    points.iter().map(|p| a.contains(p)).collect()
}

/// Half of the sum, over points in `a`, of `phi` of incident edge lengths.
pub fn weighted_edge_length(g: &Graph, points: &PointConfiguration, a: &Region, phi: &Phi) -> f64 {
    let inside = membership(points, a);
    g.edges()
        .iter()
        .map(|e| {
            let k = u8::from(inside[e.u]) + u8::from(inside[e.v]);
            if k == 0 {
                0.0
            } else {
                0.5 * f64::from(k) * phi.eval(e.length)
            }
        })
        .sum()
}

pub fn vertex_landscape_sum(g: &Graph, points: &PointConfiguration, a: &Region, psi: &Psi, kappa: usize) -> Result<f64> {
    let mut total = 0.0;
    for (x, p) in points.iter().enumerate() {
        if a.contains(p) {
            total += psi.eval(&rooted_neighborhood(g, x, kappa)?);
        }
    }
    Ok(total)
}

/// Number of components with at least one vertex in `a`.
pub fn component_count(g: &Graph, points: &PointConfiguration, a: &Region) -> usize {
    let labels = g.components();
    let mut hit = vec![false; labels.len()];
    let mut count = 0;
    for (x, p) in points.iter().enumerate() {
        if a.contains(p) && !hit[labels[x]] {
            hit[labels[x]] = true;
            count += 1;
        }
    }
    count
}

pub fn point_count(points: &PointConfiguration, a: &Region) -> usize {
    points.iter().filter(|p| a.contains(p)).count()
}

/// `h(X + origin, A) - h(X, A)`. Marked graphs need `origin_mark`.
pub fn add_one_cost(
    spec: &FunctionalSpec,
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    origin_mark: Option<f64>,
    a: &Region,
) -> Result<f64> {
    let origin = vec![0.0; points.dim()];
    if points.iter().any(|p| p == origin.as_slice()) {
        return Err(Error::input("origin already present in configuration"));
    }
    let with = points.with_point(&origin)?;
    let with_marks = if spec.needs_marks() {
        let (m, t) = marks
            .zip(origin_mark)
            .ok_or_else(|| Error::input("marked functional requires marks and an origin mark"))?;
        let mut v = m.to_vec();
        v.push(t);
        Some(v)
    } else {
        None
    };
    Ok(spec.evaluate(&with, with_marks.as_deref(), a)? - spec.evaluate(points, marks, a)?)
}

/// `N_s = #{edges with length < s}` for each `s`.
pub fn edge_length_counts(g: &Graph, s_values: &[f64]) -> Result<Vec<usize>> {
    if s_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("s values must be sorted ascending"));
    }
    if s_values.iter().any(|&s| s.is_nan() || s <= 0.0) {
        return Err(Error::param("s values must be positive"));
    }
    let mut lengths: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
    lengths.sort_by(f64::total_cmp);
    Ok(s_values.iter().map(|&s| lengths.partition_point(|&l| l < s)).collect())
}

/// `|h(aX, aA) - a^gamma h(X, A)|`; marks are left unchanged by scaling.
pub fn homogeneity_check(
    spec: &FunctionalSpec,
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    a: &Region,
    scale: f64,
    gamma: f64,
) -> Result<f64> {
    let scaled = points.scaled(scale);
    let lhs = spec.evaluate(&scaled, marks, &a.scale(scale)?)?;
    let rhs = scale.powf(gamma) * spec.evaluate(points, marks, a)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_knng, build_mst, Edge};
    use crate::point_process::{attach_marks, sample_binomial, sample_poisson};
    use std::collections::VecDeque;

    fn pts(p: &[[f64; 2]]) -> PointConfiguration {
        PointConfiguration::from_points(2, p).unwrap()
    }

    fn unit() -> Region {
        Region::unit_cube(2)
    }

    fn strips(n: usize) -> Vec<Region> {
        (0..n)
            .map(|i| Region::cuboid(&[i as f64 / n as f64, 0.0], &[(i + 1) as f64 / n as f64, 1.0]).unwrap())
            .collect()
    }

    #[test]
    fn weighted_length_half_rule() {
        let p = pts(&[[0.2, 0.2], [0.8, 0.2]]);
        let g = Graph::from_pairs(&p, [(0, 1)]);
        let phi = Phi::Constant { value: 1.0 };
        assert_eq!(weighted_edge_length(&g, &p, &unit(), &phi), 1.0);
        let left = Region::cuboid(&[0.0, 0.0], &[0.5, 1.0]).unwrap();
        assert_eq!(weighted_edge_length(&g, &p, &left, &phi), 0.5);
    }

    #[test]
    fn additive_over_partitions() {
        let parts = strips(4);
        for seed in 0..100u64 {
            let p = sample_binomial(60, &unit(), seed).unwrap();
            let g = build_mst(&p);
            let phi = Phi::Power { alpha: 1.0 };
            let whole = weighted_edge_length(&g, &p, &unit(), &phi);
            let sum: f64 = parts.iter().map(|a| weighted_edge_length(&g, &p, a, &phi)).sum();
            assert!((whole - sum).abs() < 1e-12);
            assert!((whole - g.total_length()).abs() < 1e-12);
            let psi = Psi::RootDegreeIs { degree: 1 };
            let whole = vertex_landscape_sum(&g, &p, &unit(), &psi, 1).unwrap();
            let sum: f64 = parts.iter().map(|a| vertex_landscape_sum(&g, &p, a, &psi, 1).unwrap()).sum();
            assert_eq!(whole, sum);
            assert_eq!(point_count(&p, &unit()), parts.iter().map(|a| point_count(&p, a)).sum::<usize>());
            let cnt = Phi::Constant { value: 1.0 };
            assert_eq!(weighted_edge_length(&g, &p, &unit(), &cnt), g.edges().len() as f64);
        }
    }

    #[test]
    fn landscape_examples() {
        let p = pts(&[[0.1, 0.5], [0.5, 0.5], [0.9, 0.5]]);
        let g = Graph::from_pairs(&p, [(0, 1), (1, 2)]);
        assert_eq!(vertex_landscape_sum(&g, &p, &unit(), &Psi::Constant { value: 1.0 }, 1).unwrap(), 3.0);
        assert_eq!(vertex_landscape_sum(&g, &p, &unit(), &Psi::RootDegreeIs { degree: 1 }, 1).unwrap(), 2.0);
        for seed in 0..20u64 {
            let p = sample_binomial(50, &unit(), seed).unwrap();
            let g = build_mst(&p);
            let leaves = (0..p.len()).filter(|&x| g.degree(x) == 1).count() as f64;
            assert_eq!(vertex_landscape_sum(&g, &p, &unit(), &Psi::RootDegreeIs { degree: 1 }, 2).unwrap(), leaves);
        }
    }

    fn bfs_components_touching(g: &Graph, p: &PointConfiguration, a: &Region) -> usize {
        let n = p.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            let mut touches = false;
            while let Some(x) = q.pop_front() {
                touches |= a.contains(p.point(x));
                for &y in g.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        q.push_back(y);
                    }
                }
            }
            count += usize::from(touches);
        }
        count
    }

    #[test]
    fn component_count_examples_and_oracle() {
        let p = pts(&[[0.1, 0.1], [0.2, 0.1], [0.8, 0.8], [0.9, 0.8]]);
        let g = Graph::from_pairs(&p, [(0, 1), (2, 3)]);
        let left = Region::cuboid(&[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(component_count(&g, &p, &left), 1);
        assert_eq!(component_count(&g, &p, &unit()), 2);
        let parts = strips(3);
        for seed in 0..100u64 {
            let p = sample_binomial(80, &unit(), seed).unwrap();
            let g = build_knng(&p, 1).unwrap();
            for a in parts.iter().chain([&unit()]) {
                assert_eq!(component_count(&g, &p, a), bfs_components_touching(&g, &p, a));
            }
            let ab = parts[0].union(&parts[1]).unwrap();
            let k = |r: &Region| component_count(&g, &p, r);
            assert!(k(&ab) <= k(&parts[0]) + k(&parts[1]));
        }
    }

    #[test]
    fn add_one_cost_examples() {
        let a = Region::centered_cube(2, 1.0).unwrap();
        let empty = PointConfiguration::empty(2);
        let kc = FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 });
        assert_eq!(add_one_cost(&kc, &empty, None, None, &a).unwrap(), 1.0);
        let on = FunctionalSpec::total_length(GraphBuilder::OnlineNng);
        assert_eq!(add_one_cost(&on, &empty, Some(&[]), Some(0.5), &a).unwrap(), 0.0);
        let single = pts(&[[0.3, 0.4]]);
        let mst = FunctionalSpec::total_length(GraphBuilder::Mst);
        assert!((add_one_cost(&mst, &single, None, None, &a).unwrap() - 0.5).abs() < 1e-15);
        let pc = FunctionalSpec::point_count();
        assert_eq!(add_one_cost(&pc, &single, None, None, &a).unwrap(), 1.0);
        let far = Region::cuboid(&[5.0, 5.0], &[6.0, 6.0]).unwrap();
        assert_eq!(add_one_cost(&pc, &single, None, None, &far).unwrap(), 0.0);
        assert!(add_one_cost(&pc, &pts(&[[0.0, 0.0]]), None, None, &a).is_err());
        assert!(add_one_cost(&on, &single, None, None, &a).is_err());
    }

    #[test]
    fn edge_counts() {
        let p = pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let g = build_mst(&p);
        assert_eq!(edge_length_counts(&g, &[0.5, 1.5]).unwrap(), vec![0, 2]);
        assert_eq!(edge_length_counts(&g, &[1.0]).unwrap(), vec![0]);
        assert!(edge_length_counts(&g, &[1.5, 0.5]).is_err());
        for seed in 0..100u64 {
            let p = sample_binomial(40, &unit(), seed).unwrap();
            let g = build_mst(&p);
            let s = [0.05, 0.1, 0.2, 10.0];
            let got = edge_length_counts(&g, &s).unwrap();
            for (k, &sv) in s.iter().enumerate() {
                assert_eq!(got[k], g.edges().iter().filter(|e: &&Edge| e.length < sv).count());
            }
            assert_eq!(got[3], g.edges().len());
        }
    }

    #[test]
    fn homogeneity() {
        for seed in 0..20u64 {
            let p = sample_binomial(50, &unit(), seed).unwrap();
            for alpha in [0.5, 1.0, 2.0] {
                let spec = FunctionalSpec::new(
                    Family::WeightedEdgeLength { phi: Phi::Power { alpha } },
                    GraphBuilder::Mst,
                );
                for a in [0.5, 2.0, 7.0] {
                    assert!(homogeneity_check(&spec, &p, None, &unit(), a, alpha).unwrap() <= 1e-9);
                }
            }
            let v = FunctionalSpec::new(
                Family::VertexLandscape { psi: Psi::RootDegree { bound: 6 }, kappa: 2 },
                GraphBuilder::Mst,
            );
            assert_eq!(homogeneity_check(&v, &p, None, &unit(), 3.0, 0.0).unwrap(), 0.0);
            let m = attach_marks(p.clone(), seed);
            let on = FunctionalSpec::total_length(GraphBuilder::OnlineNng);
            assert!(homogeneity_check(&on, &p, Some(m.marks()), &unit(), 2.0, 1.0).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn growth_bound_holds() {
        let specs = [
            FunctionalSpec::total_length(GraphBuilder::Mst),
            FunctionalSpec::total_length(GraphBuilder::Knng { k: 3 }),
            FunctionalSpec::total_length(GraphBuilder::Sig),
            FunctionalSpec::component_count(GraphBuilder::Sig),
            FunctionalSpec::point_count(),
            FunctionalSpec::new(Family::WeightedEdgeLength { phi: Phi::Power { alpha: 2.0 } }, GraphBuilder::Mst),
            FunctionalSpec::new(Family::WeightedEdgeLength { phi: Phi::Indicator { s: 0.1 } }, GraphBuilder::Sig),
            FunctionalSpec::new(Family::VertexLandscape { psi: Psi::RootDegree { bound: 6 }, kappa: 1 }, GraphBuilder::Mst),
        ];
        for seed in 0..50u64 {
            let side = 1.0 + seed as f64;
            let r = Region::centered_cube(2, side).unwrap();
            let p = sample_poisson(1.0, &r, seed).unwrap();
            let scale = p.diameter() + p.len() as f64;
            for s in &specs {
                let beta = s.growth_exponent(2).unwrap();
                let h = s.evaluate(&p, None, &r).unwrap();
                assert!(h.abs() <= beta * scale.powf(beta), "{} seed {seed}", s.label());
            }
        }
    }

    #[test]
    fn spec_json() {
        let s: FunctionalSpec = serde_json::from_str(
            r#"{"family":"weighted_edge_length","phi":{"kind":"power","alpha":1.0},"graph":{"kind":"mst"}}"#,
        )
        .unwrap();
        assert_eq!(s, FunctionalSpec::total_length(GraphBuilder::Mst));
        let back: FunctionalSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let pc: FunctionalSpec = serde_json::from_str(r#"{"family":"point_count"}"#).unwrap();
        assert_eq!(pc, FunctionalSpec::point_count());
        let bad = FunctionalSpec::new(Family::VertexLandscape { psi: Psi::Constant { value: 1.0 }, kappa: 0 }, GraphBuilder::Mst);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn evaluate_many_shares_graphs() {
        let p = sample_binomial(100, &unit(), 3).unwrap();
        let specs = [
            FunctionalSpec::total_length(GraphBuilder::Mst),
            FunctionalSpec::component_count(GraphBuilder::Knng { k: 1 }),
            FunctionalSpec::point_count(),
        ];
        let regions = vec![unit(); 3];
        let many = evaluate_many(&specs, &p, None, &regions).unwrap();
        for (s, v) in specs.iter().zip(&many) {
            assert_eq!(s.evaluate(&p, None, &unit()).unwrap(), *v);
        }
        assert_eq!(many[2], 100.0);
    }
}
