use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cube_part, HalfSpace, NestedPoisson, WindowSchedule};
use crate::error::{Error, Result};
use crate::functionals::FunctionalSpec;
use crate::geometry::{LatticeSet, Region};
use crate::graphs::{Graph, GraphBuilder};
use crate::percolation::{LatticeConfig, LatticeFunctional, LatticeWindow};
use crate::point_process::PointConfiguration;
use crate::rng::{derive_seed, keyed_uniform, stream};

const ORIGIN_MARK: u64 = 0x6f72_6967;
const NEGATIVE: u64 = 0x6e65_6761;
const STAR: u64 = 0x7374_6172;

/// Per outer draw: first-half and second-half inner means.
type OuterDraw = (Vec<f64>, Vec<f64>);

/// Add-one costs of several functionals on one configuration, each graph
/// built once with and once without the origin.
pub fn add_one_costs(
    specs: &[FunctionalSpec],
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    origin_mark: Option<f64>,
    a: &Region,
) -> Result<Vec<f64>> {
    let origin = vec![0.0; points.dim()];
    if points.iter().any(|p| p == origin.as_slice()) {
        return Err(Error::input("origin already present in configuration"));
    }
    let with = points.with_point(&origin)?;
    let needs_marks = specs.iter().any(FunctionalSpec::needs_marks);
    let with_marks = if needs_marks {
        let (m, t) = marks
            .zip(origin_mark)
            .ok_or_else(|| Error::input("marked functional requires marks and an origin mark"))?;
        let mut v = m.to_vec();
        v.push(t);
        Some(v)
    } else {
        None
    };
    let mut cache: HashMap<(GraphBuilder, bool), Graph> = HashMap::new();
    let mut graph = |spec: &FunctionalSpec, added: bool| -> Result<Option<Graph>> {
        if !spec.uses_graph() {
            return Ok(None);
        }
        let key = (spec.graph, added);
        if let Entry::Vacant(e) = cache.entry(key) {
            let (p, m) = if added { (&with, with_marks.as_deref()) } else { (points, marks) };
            let g = if matches!(spec.graph, GraphBuilder::Sig) && p.len() < 2 {
                Graph::edgeless(p.len())
            } else {
                spec.graph.build(p, m)?
            };
            e.insert(g);
        }
        Ok(cache.get(&key).cloned())
    };
    specs
        .iter()
        .map(|s| {
            let g1 = graph(s, true)?;
            let g0 = graph(s, false)?;
            Ok(s.evaluate_with(&with, g1.as_ref(), a)? - s.evaluate_with(points, g0.as_ref(), a)?)
        })
        .collect()
}

fn origin_mark(seed: u64, path: &[u64]) -> f64 {
    let mut p = path.to_vec();
    p.push(ORIGIN_MARK);
    stream(seed, &p).random()
}

fn agrees(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

/// Stabilized add-one costs over growing windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaInfinity {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub converged_fraction: f64,
    pub n_samples: usize,
    pub windows: Vec<f64>,
    /// Number of samples whose value had settled from each window onwards.
    pub stabilized_at: Vec<usize>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// Per sample, evaluate the add-one cost at the origin on `Q_W` for the
/// scheduled windows until two consecutive values agree.
pub fn estimate_delta_infinity(
    spec: &FunctionalSpec,
    dim: usize,
    lambda: f64,
    schedule: &WindowSchedule,
    n_samples: usize,
    seed: u64,
) -> Result<DeltaInfinity> {
    spec.validate()?;
    let ws = schedule.windows()?;
    if n_samples == 0 {
        return Err(Error::param("at least one sample required"));
    }
    let results: Vec<(f64, Option<usize>)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut nested = NestedPoisson::new(dim, lambda, &ws, HalfSpace::Full, derive_seed(seed, &[s]));
            let t0 = origin_mark(seed, &[s]);
            let mut prev: Option<f64> = None;
            for (k, &w) in ws.iter().enumerate() {
                let (pts, marks) = nested.upto(k)?;
                let a = cube_part(dim, w, HalfSpace::Full)?;
                let v = add_one_costs(std::slice::from_ref(spec), &pts, Some(&marks), Some(t0), &a)?[0];
                if let Some(p) = prev {
                    if agrees(v, p, schedule.tolerance) {
                        return Ok((v, Some(k - 1)));
                    }
                }
                prev = Some(v);
            }
            Ok((prev.unwrap_or(0.0), None))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let (mean, variance) = mean_var(&values);
    let mut stabilized_at = vec![0; ws.len()];
    for (_, k) in &results {
        if let Some(k) = k {
            stabilized_at[*k] += 1;
        }
    }
    let converged = results.iter().filter(|r| r.1.is_some()).count();
    Ok(DeltaInfinity {
        mean,
        variance,
        std_error: (variance / n_samples as f64).sqrt(),
        converged_fraction: converged as f64 / n_samples as f64,
        n_samples,
        windows: ws,
        stabilized_at,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStep {
    pub window: f64,
    pub sigma_hat: Vec<Vec<f64>>,
    pub sigma_se: Vec<Vec<f64>>,
    pub mean_delta: Vec<f64>,
    /// Largest entrywise change from the previous window.
    pub max_change: Option<f64>,
}

/// Estimates of `E[E(d_i | F) E(d_j | F)]` and `E[d_i]` with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceIngredients {
    pub labels: Vec<String>,
    pub sigma_hat: Vec<Vec<f64>>,
    pub sigma_se: Vec<Vec<f64>>,
    pub mean_delta: Vec<f64>,
    pub mean_delta_se: Vec<f64>,
    pub outer_n: usize,
    pub inner_m: usize,
    pub estimator: String,
    pub window_trace: Vec<WindowStep>,
    pub converged: bool,
    pub final_window: f64,
    /// Indices whose estimated diagonal is negative (within noise; not clamped).
    pub negative_diagonal: Vec<usize>,
    pub notes: Vec<String>,
    /// Per-outer-sample products, row-major `k x k`.
    #[serde(skip)]
    pub outer_products: Vec<Vec<f64>>,
    /// Per-outer-sample inner means.
    #[serde(skip)]
    pub outer_means: Vec<Vec<f64>>,
}

impl CovarianceIngredients {
    pub fn dim(&self) -> usize {
        self.mean_delta.len()
    }
}

/// Per outer sample: symmetrized product of the two half-sample means, and
/// the overall inner mean.
fn split_products(inner: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = inner[0].len();
    let h = inner.len() / 2;
    let avg = |rows: &[Vec<f64>]| -> Vec<f64> {
        (0..k).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / rows.len() as f64).collect()
    };
    let (m1, m2) = (avg(&inner[..h]), avg(&inner[h..]));
    let all = avg(inner);
    let mut prod = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            prod[i * k + j] = 0.5 * (m1[i] * m2[j] + m2[i] * m1[j]);
        }
    }
    (prod, all)
}

struct Summary {
    sigma: Vec<Vec<f64>>,
    sigma_se: Vec<Vec<f64>>,
    mean: Vec<f64>,
    mean_se: Vec<f64>,
}

fn summarize(k: usize, outer: &[(Vec<f64>, Vec<f64>)]) -> Summary {
    let n = outer.len() as f64;
    let mut sigma = vec![vec![0.0; k]; k];
    let mut sigma_se = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let v: Vec<f64> = outer.iter().map(|o| o.0[i * k + j]).collect();
            let (m, var) = mean_var(&v);
            sigma[i][j] = m;
            sigma_se[i][j] = (var / n).sqrt();
        }
    }
    let mut mean = vec![0.0; k];
    let mut mean_se = vec![0.0; k];
    for i in 0..k {
        let v: Vec<f64> = outer.iter().map(|o| o.1[i]).collect();
        let (m, var) = mean_var(&v);
        mean[i] = m;
        mean_se[i] = (var / n).sqrt();
    }
    Summary { sigma, sigma_se, mean, mean_se }
}

fn max_change(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_sizes(outer_n: usize, inner_m: usize) -> Result<()> {
    if outer_n < 2 {
        return Err(Error::param("outer_n must be at least 2"));
    }
    if inner_m < 2 {
        return Err(Error::param("split-sample estimator needs inner_m >= 2"));
    }
    Ok(())
}

/// Shared window loop: `eval(k, outer)` returns the inner-sample increments
/// for window index `k` and outer sample `outer`.
fn window_loop<F>(
    labels: Vec<String>,
    ws: &[f64],
    tolerance: f64,
    outer_n: usize,
    inner_m: usize,
    eval: F,
) -> Result<CovarianceIngredients>
where
    F: Fn(usize, u64) -> Result<Vec<Vec<f64>>> + Sync,
{
    let k = labels.len();
    let mut trace: Vec<WindowStep> = Vec::new();
    let mut last: Option<(Summary, Vec<OuterDraw>)> = None;
    let mut converged = false;
    for (wi, &w) in ws.iter().enumerate() {
        let outer: Vec<OuterDraw> = (0..outer_n as u64)
            .into_par_iter()
            .map(|o| eval(wi, o).map(|inner| split_products(&inner)))
            .collect::<Result<_>>()?;
        let s = summarize(k, &outer);
        let change = trace.last().map(|prev: &WindowStep| max_change(&prev.sigma_hat, &s.sigma));
        let scale = s.sigma.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        trace.push(WindowStep {
            window: w,
            sigma_hat: s.sigma.clone(),
            sigma_se: s.sigma_se.clone(),
            mean_delta: s.mean.clone(),
            max_change: change,
        });
        last = Some((s, outer));
        if change.is_some_and(|c| c <= tolerance * scale) {
            converged = true;
            break;
        }
    }
    let (s, outer) = last.expect("at least one window");
    let negative_diagonal: Vec<usize> = (0..k).filter(|&i| s.sigma[i][i] < 0.0).collect();
    let mut notes = vec![format!(
        "split-sample estimator: product of two independent half means over {} inner samples; unbiased for the conditional product",
        inner_m
    )];
    if !negative_diagonal.is_empty() {
        notes.push("negative diagonal estimates reported unclamped".into());
    }
    if !converged {
        notes.push("window schedule exhausted before the estimate settled".into());
    }
    Ok(CovarianceIngredients {
        labels,
        sigma_hat: s.sigma,
        sigma_se: s.sigma_se,
        mean_delta: s.mean,
        mean_delta_se: s.mean_se,
        outer_n,
        inner_m,
        estimator: "split_sample".into(),
        final_window: trace.last().map_or(0.0, |t| t.window),
        window_trace: trace,
        converged,
        negative_diagonal,
        notes,
        outer_products: outer.iter().map(|o| o.0.clone()).collect(),
        outer_means: outer.into_iter().map(|o| o.1).collect(),
    })
}

/// Nested Monte Carlo for the continuum matrix: the Poisson configuration on
/// `Q_W ∩ {x_1 < 0}` is fixed per outer sample, the rest of the window and
/// the origin mark are redrawn per inner sample.
#[allow(clippy::too_many_arguments)]
pub fn estimate_sigma_continuum(
    specs: &[FunctionalSpec],
    dim: usize,
    lambda: f64,
    schedule: &WindowSchedule,
    outer_n: usize,
    inner_m: usize,
    seed: u64,
) -> Result<CovarianceIngredients> {
    check_sizes(outer_n, inner_m)?;
    if specs.is_empty() {
        return Err(Error::input("at least one functional required"));
    }
    for s in specs {
        s.validate()?;
    }
    if !(lambda > 0.0) {
        return Err(Error::param("intensity must be positive"));
    }
    let ws = schedule.windows()?;
    let labels = specs.iter().map(FunctionalSpec::label).collect();
    window_loop(labels, &ws, schedule.tolerance, outer_n, inner_m, |wi, o| {
        let a = cube_part(dim, ws[wi], HalfSpace::Full)?;
        let (past, past_marks) =
            NestedPoisson::new(dim, lambda, &ws, HalfSpace::Negative, derive_seed(seed, &[o, NEGATIVE])).upto(wi)?;
        (0..inner_m as u64)
            .map(|j| {
                let path = [o, j + 1];
                let (future, future_marks) =
                    NestedPoisson::new(dim, lambda, &ws, HalfSpace::NonNegative, derive_seed(seed, &path)).upto(wi)?;
                let pts = past.concat(&future)?;
                let mut marks = past_marks.clone();
                marks.extend(future_marks);
                add_one_costs(specs, &pts, Some(&marks), Some(origin_mark(seed, &path)), &a)
            })
            .collect()
    })
}

/// Nested Monte Carlo for the lattice matrix on the site cubes `[-W, W]^d`:
/// occupancies at sites lexicographically `<= 0` are fixed per outer sample;
/// later sites and the origin's replacement are redrawn per inner sample.
#[allow(clippy::too_many_arguments)]
pub fn estimate_sigma_lattice(
    functionals: &[LatticeFunctional],
    dim: usize,
    p: f64,
    schedule: &WindowSchedule,
    outer_n: usize,
    inner_m: usize,
    seed: u64,
) -> Result<CovarianceIngredients> {
    check_sizes(outer_n, inner_m)?;
    if functionals.is_empty() {
        return Err(Error::input("at least one functional required"));
    }
    for f in functionals {
        f.validate()?;
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("occupation probability {p} outside [0, 1]")));
    }
    let mut ws: Vec<f64> = schedule.windows()?.into_iter().map(|w| w.round().max(1.0)).collect();
    ws.dedup();
    let windows: Vec<_> = ws.iter().map(|&w| LatticeWindow::new(LatticeSet::cube(dim, -(w as i64), w as i64))).collect();
    let zero = vec![0i64; dim];
    let labels = functionals.iter().map(LatticeFunctional::label).collect();
    let mut ing = window_loop(labels, &ws, schedule.tolerance, outer_n, inner_m, |wi, o| {
        let window = &windows[wi];
        let w = ws[wi];
        let a = Region::cuboid(&vec![-w - 0.5; dim], &vec![w + 0.5; dim])?;
        let origin = window.sites().index_of(&zero).expect("origin in window");
        let past_seed = derive_seed(seed, &[o]);
        (0..inner_m as u64)
            .map(|j| {
                let inner_seed = derive_seed(seed, &[o, j + 1]);
                let occupied: Vec<bool> = window
                    .sites()
                    .sites()
                    .iter()
                    .map(|z| {
                        let s = if z.as_slice().cmp(&zero) != Ordering::Greater { past_seed } else { inner_seed };
                        keyed_uniform(s, z) < p
                    })
                    .collect();
                let star = keyed_uniform(derive_seed(inner_seed, &[STAR]), &zero) < p;
                if star == occupied[origin] {
                    return Ok(vec![0.0; functionals.len()]);
                }
                let x = LatticeConfig::from_occupancy(window, occupied, p, past_seed)?;
                let x0 = x.with_site(origin, star);
                functionals.iter().map(|f| Ok(f.evaluate(&x, &a)? - f.evaluate(&x0, &a)?)).collect()
            })
            .collect()
    })?;
    if functionals.iter().any(|f| matches!(f, LatticeFunctional::LargestComponent)) {
        ing.notes.push("largest-component increments use the window's largest cluster as a proxy for the infinite cluster; heuristic".into());
    }
    ing.notes.push("conditioning on the lexicographic past is truncated to the window".into());
    Ok(ing)
}

/// De-Poissonized covariance with delta-method standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub tau: Vec<Vec<f64>>,
    pub tau_se: Vec<Vec<f64>>,
}

/// `tau_ij = sigma_ij |A_i ∩ A_j| / |B_0| - |A_i| |A_j| / |B_0|^2 E[d_i] E[d_j]`.
pub fn estimate_tau(ing: &CovarianceIngredients, regions: &[Region], b0: &Region) -> Result<TauEstimate> {
    let k = ing.dim();
    if regions.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: regions.len() });
    }
    let vb = b0.measure();
    if !(vb > 0.0) {
        return Err(Error::param("B_0 must have positive measure"));
    }
    let mu = &ing.mean_delta;
    let have_outer = ing.outer_products.len() >= 2 && ing.outer_means.len() == ing.outer_products.len();
    let mut tau = vec![vec![0.0; k]; k];
    let mut tau_se = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let c = regions[i].intersect(&regions[j])?.measure() / vb;
            let a = regions[i].measure() * regions[j].measure() / (vb * vb);
            tau[i][j] = ing.sigma_hat[i][j] * c - a * mu[i] * mu[j];
            tau_se[i][j] = if have_outer {
                // first-order expansion around the means, per outer sample
                let g: Vec<f64> = ing
                    .outer_products
                    .iter()
                    .zip(&ing.outer_means)
                    .map(|(pr, m)| c * pr[i * k + j] - a * (mu[j] * m[i] + mu[i] * m[j]))
                    .collect();
                (mean_var(&g).1 / g.len() as f64).sqrt()
            } else {
                let s = ing.sigma_se[i][j];
                let (si, sj) = (ing.mean_delta_se[i], ing.mean_delta_se[j]);
                ((c * s).powi(2) + a * a * ((mu[j] * si).powi(2) + (mu[i] * sj).powi(2))).sqrt()
            };
        }
    }
    Ok(TauEstimate { tau, tau_se })
}
