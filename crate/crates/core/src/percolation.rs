//! Bernoulli site percolation on finite lattice windows.
//!
//! Site `z` is occupied iff `keyed_uniform(seed, z) < p`, so occupancies are
//! reproducible, independent across sites and monotonically coupled in `p`.
//! Clusters are components of the occupied sites under unit-distance
//! adjacency, restricted to the sites that lie in the window's domain `tB_0`.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::geometry::{advance, LatticeSet, Region};
use crate::rng::{derive_seed, keyed_uniform};

const RESAMPLE_KEY: u64 = 0x7265_7361;

/// A finite set of sites with its nearest-neighbour structure and the domain
/// used by the random measures.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWindow {
    sites: LatticeSet,
    neighbors: Vec<Vec<u32>>,
    base: Option<Region>,
    t: f64,
    in_domain: Vec<bool>,
}

impl LatticeWindow {
    /// Window whose domain is every site.
    pub fn new(sites: LatticeSet) -> Arc<Self> {
        let n = sites.len();
        Arc::new(Self::assemble(sites, None, 1.0, vec![true; n]))
    }

    /// The discretization of `t * b0` with radius `sqrt(d)`; the domain is
    /// the sites lying in `t * b0`.
    pub fn scaled(b0: &Region, t: f64) -> Result<Arc<Self>> {
        let tb = b0.scale(t)?;
        let sites = tb.discretize((b0.dim() as f64).sqrt())?;
        Self::with_domain(sites, b0, t)
    }

    /// Arbitrary sites with domain `t * b0`.
    pub fn with_domain(sites: LatticeSet, b0: &Region, t: f64) -> Result<Arc<Self>> {
        let tb = b0.scale(t)?;
        let in_domain = sites
            .sites()
            .iter()
            .map(|z| tb.contains(&z.iter().map(|&v| v as f64).collect::<Vec<_>>()))
            .collect();
        Ok(Arc::new(Self::assemble(sites, Some(b0.clone()), t, in_domain)))
    }

    fn assemble(sites: LatticeSet, base: Option<Region>, t: f64, in_domain: Vec<bool>) -> Self {
        let d = sites.dim();
        let neighbors = sites
            .sites()
            .iter()
            .map(|z| {
                let mut out = Vec::with_capacity(2 * d);
                let mut w = z.clone();
                for i in 0..d {
                    for step in [-1i64, 1] {
                        w[i] = z[i] + step;
                        if let Some(j) = sites.index_of(&w) {
                            out.push(j as u32);
                        }
                    }
                    w[i] = z[i];
                }
                out
            })
            .collect();
        LatticeWindow { sites, neighbors, base, t, in_domain }
    }

    pub fn sites(&self) -> &LatticeSet {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sites.dim()
    }

    pub fn scale(&self) -> f64 {
        self.t
    }

    pub fn base(&self) -> Option<&Region> {
        self.base.as_ref()
    }

    pub fn in_domain(&self, i: usize) -> bool {
        self.in_domain[i]
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    /// Membership of every site in `t * a`; `a` must lie in the base region.
    pub fn membership(&self, a: &Region) -> Result<Vec<bool>> {
        if let Some(b0) = &self.base {
            if !a.is_subset_of(b0)? {
                return Err(Error::param("region is not contained in B_0"));
            }
        }
        let ta = a.scale(self.t)?;
        Ok(self
            .sites
            .sites()
            .iter()
            .map(|z| ta.contains(&z.iter().map(|&v| v as f64).collect::<Vec<_>>()))
            .collect())
    }
}

/// Occupancy of every window site.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    window: Arc<LatticeWindow>,
    occupied: Vec<bool>,
    p: f64,
    seed: u64,
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("occupation probability {p} outside [0, 1]")))
    }
}

pub fn sample_lattice(p: f64, window: &Arc<LatticeWindow>, seed: u64) -> Result<LatticeConfig> {
    check_p(p)?;
    let occupied = window.sites.sites().iter().map(|z| keyed_uniform(seed, z) < p).collect();
    Ok(LatticeConfig { window: Arc::clone(window), occupied, p, seed })
}

impl LatticeConfig {
    pub fn from_occupancy(window: &Arc<LatticeWindow>, occupied: Vec<bool>, p: f64, seed: u64) -> Result<Self> {
        check_p(p)?;
        if occupied.len() != window.len() {
            return Err(Error::input("occupancy length differs from window size"));
        }
        Ok(LatticeConfig { window: Arc::clone(window), occupied, p, seed })
    }

    pub fn window(&self) -> &Arc<LatticeWindow> {
        &self.window
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn with_site(&self, i: usize, state: bool) -> LatticeConfig {
        let mut c = self.clone();
        c.occupied[i] = state;
        c
    }

    /// Run-length encoded JSON form.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&LatticeConfigRepr::from_config(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<LatticeConfigRepr>(s)?.into_config()
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeConfigRepr {
    dim: usize,
    p: f64,
    seed: u64,
    t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Region>,
    lo: Vec<i64>,
    shape: Vec<usize>,
    /// Alternating run lengths over the bounding box in lexicographic order,
    /// starting with sites outside the window.
    membership_runs: Vec<usize>,
    /// Alternating run lengths over window sites, starting with vacant sites.
    occupied_runs: Vec<usize>,
}

fn runs(bits: impl Iterator<Item = bool>) -> Vec<usize> {
    let mut out = vec![0usize];
    let mut current = false;
    for b in bits {
        if b != current {
            out.push(0);
            current = b;
        }
        *out.last_mut().unwrap() += 1;
    }
    out
}

fn unruns(r: &[usize]) -> Vec<bool> {
    r.iter().enumerate().flat_map(|(k, &len)| std::iter::repeat_n(k % 2 == 1, len)).collect()
}

impl LatticeConfigRepr {
    fn from_config(c: &LatticeConfig) -> Self {
        let w = &c.window;
        let d = w.dim();
        let (lo, hi) = if w.is_empty() {
            (vec![0; d], vec![-1; d])
        } else {
            let mut lo = w.sites.sites()[0].clone();
            let mut hi = lo.clone();
            for z in w.sites.sites() {
                for i in 0..d {
                    lo[i] = lo[i].min(z[i]);
                    hi[i] = hi[i].max(z[i]);
                }
            }
            (lo, hi)
        };
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| (h - l + 1).max(0) as usize).collect();
        let mut member = Vec::new();
        if shape.iter().all(|&s| s > 0) {
            let mut z = lo.clone();
            loop {
                member.push(w.sites.contains(&z));
                if !advance(&mut z, &lo, &hi) {
                    break;
                }
            }
        }
        LatticeConfigRepr {
            dim: d,
            p: c.p,
            seed: c.seed,
            t: w.t,
            domain: w.base.clone(),
            lo,
            shape,
            membership_runs: runs(member.into_iter()),
            occupied_runs: runs(c.occupied.iter().copied()),
        }
    }

    fn into_config(self) -> Result<LatticeConfig> {
        let member = unruns(&self.membership_runs);
        let total: usize = self.shape.iter().product();
        if self.lo.len() != self.dim || self.shape.len() != self.dim || member.len() != total {
            return Err(Error::input("inconsistent lattice window encoding"));
        }
        let mut sites = Vec::new();
        if total > 0 {
            let hi: Vec<i64> = self.lo.iter().zip(&self.shape).map(|(&l, &s)| l + s as i64 - 1).collect();
            let mut z = self.lo.clone();
            let mut k = 0;
            loop {
                if member[k] {
                    sites.push(z.clone());
                }
                k += 1;
                if !advance(&mut z, &self.lo, &hi) {
                    break;
                }
            }
        }
        let set = LatticeSet::new(self.dim, sites)?;
        let window = match &self.domain {
            Some(b0) => LatticeWindow::with_domain(set, b0, self.t)?,
            None => LatticeWindow::new(set),
        };
        LatticeConfig::from_occupancy(&window, unruns(&self.occupied_runs), self.p, self.seed)
    }
}

/// Components of the occupied sites in the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAnalysis {
    /// Component id per window site; `None` for vacant or out-of-domain sites.
    pub labels: Vec<Option<usize>>,
    pub sizes: Vec<usize>,
    /// Ids of every component attaining the maximal size.
    pub largest: Vec<usize>,
}

impl ClusterAnalysis {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn max_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// CSV with one row per cluster.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["component", "size", "largest"])?;
        for (c, s) in self.sizes.iter().enumerate() {
            out.write_record([c.to_string(), s.to_string(), self.largest.contains(&c).to_string()])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

pub fn cluster_analysis(cfg: &LatticeConfig) -> ClusterAnalysis {
    let w = &cfg.window;
    let n = w.len();
    let active: Vec<bool> = (0..n).map(|i| cfg.occupied[i] && w.in_domain[i]).collect();
    let mut dsu = DisjointSets::new(n);
    for i in 0..n {
        if active[i] {
            for &j in &w.neighbors[i] {
                if active[j as usize] {
                    dsu.union(i, j as usize);
                }
            }
        }
    }
    let mut root_label = vec![usize::MAX; n];
    let mut labels = vec![None; n];
    let mut sizes = Vec::new();
    for i in 0..n {
        if active[i] {
            let r = dsu.find(i);
            if root_label[r] == usize::MAX {
                root_label[r] = sizes.len();
                sizes.push(0);
            }
            labels[i] = Some(root_label[r]);
            sizes[root_label[r]] += 1;
        }
    }
    let max = sizes.iter().copied().max().unwrap_or(0);
    let largest = (0..sizes.len()).filter(|&c| sizes[c] == max).collect();
    ClusterAnalysis { labels, sizes, largest }
}

fn touched(an: &ClusterAnalysis, inside: &[bool]) -> Vec<bool> {
    let mut hit = vec![false; an.sizes.len()];
    for (l, &ins) in an.labels.iter().zip(inside) {
        if let (Some(c), true) = (l, ins) {
            hit[*c] = true;
        }
    }
    hit
}

/// Number of clusters with at least one site in `tA`.
pub fn cluster_count_measure(cfg: &LatticeConfig, a: &Region) -> Result<usize> {
    let inside = cfg.window.membership(a)?;
    Ok(touched(&cluster_analysis(cfg), &inside).iter().filter(|&&h| h).count())
}

/// Number of sites in `tA` that belong to a largest cluster.
pub fn largest_component_measure(cfg: &LatticeConfig, a: &Region) -> Result<usize> {
    let inside = cfg.window.membership(a)?;
    let an = cluster_analysis(cfg);
    let mut is_largest = vec![false; an.sizes.len()];
    for &c in &an.largest {
        is_largest[c] = true;
    }
    Ok(an.labels.iter().zip(&inside).filter(|(l, &ins)| ins && l.is_some_and(|c| is_largest[c])).count())
}

/// Weight of a cluster as a function of its size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterWeight {
    Constant { value: f64 },
    /// `min(size, cap)`.
    CappedSize { cap: usize },
    /// `1` if `size <= m`.
    SizeAtMost { m: usize },
    /// `values[size - 1]` up to the table length, then `limit`.
    Table { values: Vec<f64>, limit: Option<f64> },
}

impl ClusterWeight {
    /// Value approached as the cluster size grows.
    pub fn limit(&self) -> Option<f64> {
        match self {
            ClusterWeight::Constant { value } => Some(*value),
            ClusterWeight::CappedSize { cap } => Some(*cap as f64),
            ClusterWeight::SizeAtMost { .. } => Some(0.0),
            ClusterWeight::Table { limit, .. } => *limit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.limit() {
            Some(l) if l.is_finite() => Ok(()),
            _ => Err(Error::InvalidSpec("cluster weight needs a finite declared limit".into())),
        }
    }

    pub fn eval(&self, size: usize) -> f64 {
        match self {
            ClusterWeight::Constant { value } => *value,
            ClusterWeight::CappedSize { cap } => size.min(*cap) as f64,
            ClusterWeight::SizeAtMost { m } => f64::from(u8::from(size <= *m)),
            ClusterWeight::Table { values, limit } => {
                values.get(size.wrapping_sub(1)).copied().unwrap_or(limit.unwrap_or(f64::NAN))
            }
        }
    }
}

/// Sum of `psi(C)` over clusters `C` meeting `tA`.
pub fn cluster_weighted_measure(cfg: &LatticeConfig, a: &Region, psi: &ClusterWeight) -> Result<f64> {
    psi.validate()?;
    let inside = cfg.window.membership(a)?;
    let an = cluster_analysis(cfg);
    let hit = touched(&an, &inside);
    Ok(an.sizes.iter().zip(&hit).filter(|(_, &h)| h).map(|(&s, _)| psi.eval(s)).sum())
}

/// Lattice random measures `H_t(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum LatticeFunctional {
    ClusterCount,
    LargestComponent,
    ClusterWeighted { psi: ClusterWeight },
}

impl LatticeFunctional {
    pub fn evaluate(&self, cfg: &LatticeConfig, a: &Region) -> Result<f64> {
        match self {
            LatticeFunctional::ClusterCount => cluster_count_measure(cfg, a).map(|v| v as f64),
            LatticeFunctional::LargestComponent => largest_component_measure(cfg, a).map(|v| v as f64),
            LatticeFunctional::ClusterWeighted { psi } => cluster_weighted_measure(cfg, a, psi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LatticeFunctional::ClusterWeighted { psi } => psi.validate(),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            LatticeFunctional::ClusterCount => "cluster_count".into(),
            LatticeFunctional::LargestComponent => "largest_component".into(),
            LatticeFunctional::ClusterWeighted { .. } => "cluster_weighted".into(),
        }
    }
}

/// `H(X, A) - H(X with the site resampled, A)`; the replacement occupancy is
/// an independent Bernoulli(p) keyed by `resample_seed`.
pub fn resample_increment(
    cfg: &LatticeConfig,
    site: &[i64],
    functional: &LatticeFunctional,
    a: &Region,
    resample_seed: u64,
) -> Result<f64> {
    let i = cfg.window.sites.index_of(site).ok_or_else(|| Error::input("site outside window"))?;
    let fresh = keyed_uniform(derive_seed(cfg.seed, &[RESAMPLE_KEY, resample_seed]), site) < cfg.p;
    if fresh == cfg.occupied[i] {
        return Ok(0.0);
    }
    Ok(functional.evaluate(cfg, a)? - functional.evaluate(&cfg.with_site(i, fresh), a)?)
}
