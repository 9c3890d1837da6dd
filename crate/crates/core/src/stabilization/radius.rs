use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cone_cover, distance, random_direction, Region};
use crate::graphs::{edge_delta, GraphBuilder};
use crate::point_process::{cumulative_volumes, uniform_point, PointConfiguration};
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizationRadius {
    pub radius: f64,
    /// True when every cone holds a lower-marked point; otherwise some cone
    /// fell back to the window extent.
    pub exact: bool,
    pub per_cone: Vec<f64>,
}

/// Radius `2 max_i R_i*` from a cover by open cones of half-angle `pi/6`,
/// where `R_i*` is the distance from the origin point to the nearest point
/// of cone `i` with a lower mark.
pub fn online_nng_radius(
    points: &PointConfiguration,
    marks: &[f64],
    origin: usize,
    window: &Region,
) -> Result<StabilizationRadius> {
    if origin >= points.len() || marks.len() != points.len() {
        return Err(Error::input("origin point with its mark must be present"));
    }
    let o = points.point(origin);
    let cones: Vec<_> = cone_cover(points.dim(), PI / 6.0)?.into_iter().map(|c| c.with_apex(o)).collect();
    let mut best = vec![f64::INFINITY; cones.len()];
    for (j, p) in points.iter().enumerate() {
        if j == origin || marks[j] >= marks[origin] || p == o {
            continue;
        }
        let r = distance(p, o);
        for (i, c) in cones.iter().enumerate() {
            if r < best[i] && c.contains(p)? {
                best[i] = r;
            }
        }
    }
    let exact = best.iter().all(|r| r.is_finite());
    let extent = window.max_distance(o);
    let per_cone: Vec<f64> = best.into_iter().map(|r| if r.is_finite() { r } else { extent }).collect();
    let radius = 2.0 * per_cone.iter().cloned().fold(0.0, f64::max);
    Ok(StabilizationRadius { radius, exact, per_cone })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub probe: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marks: Option<Vec<f64>>,
}

/// Outcome of the falsification probes. A pass means no probe found a
/// violation, not that the radius is certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub passed: bool,
    pub vacuous: bool,
    pub probes_run: usize,
    pub counterexample: Option<Counterexample>,
}

type EdgeKey = (Vec<u64>, Vec<u64>);

fn bits(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| x.to_bits()).collect()
}

/// Edges added and removed by inserting the origin point, keyed by coordinates.
fn insertion_keys(
    builder: &GraphBuilder,
    rest: &PointConfiguration,
    rest_marks: Option<&[f64]>,
    o: &[f64],
    o_mark: Option<f64>,
) -> Result<(Vec<EdgeKey>, Vec<EdgeKey>)> {
    let delta = edge_delta(builder, rest, rest_marks, o, o_mark)?;
    let aug = rest.with_point(o)?;
    let key = |u: usize, v: usize| {
        let (a, b) = (bits(aug.point(u)), bits(aug.point(v)));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut added: Vec<EdgeKey> = delta.added.iter().map(|e| key(e.u, e.v)).collect();
    let mut removed: Vec<EdgeKey> = delta.removed.iter().map(|e| key(e.u, e.v)).collect();
    added.sort();
    removed.sort();
    Ok((added, removed))
}

/// Check that the edges gained and lost on inserting the origin point do not
/// depend on the configuration outside the closed ball `B_R(origin)`.
///
/// The configuration inside the ball is kept; outside it is replaced by the
/// actual remainder, random subsets of it, uniform points of `window \ B_R`,
/// points just beyond `R`, and points carrying extreme marks.
#[allow(clippy::too_many_arguments)]
pub fn probe_stability(
    builder: &GraphBuilder,
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    origin: usize,
    radius: f64,
    window: &Region,
    n_probes: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if origin >= points.len() {
        return Err(Error::input("origin point missing"));
    }
    if builder.needs_marks() && marks.is_none_or(|m| m.len() != points.len()) {
        return Err(Error::input("marked builder requires one mark per point"));
    }
    let marked = builder.needs_marks();
    let o = points.point(origin).to_vec();
    let o_mark = marks.filter(|_| marked).map(|m| m[origin]);
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for (j, p) in points.iter().enumerate() {
        if j == origin {
            continue;
        }
        if distance(p, &o) <= radius {
            inner.push(j);
        } else {
            outer.push(j);
        }
    }
    let base = points.select(&inner);
    let base_marks: Option<Vec<f64>> = marks.filter(|_| marked).map(|m| inner.iter().map(|&j| m[j]).collect());
    let reference = insertion_keys(builder, &base, base_marks.as_deref(), &o, o_mark)?;

    let vacuous = window.max_distance(&o) <= radius;
    if vacuous {
        return Ok(ProbeReport { passed: true, vacuous, probes_run: 0, counterexample: None });
    }
    let mut rng = stream(seed, &[0x7072_6f62]);
    let cumulative = cumulative_volumes(window);
    let outside = |p: &[f64]| distance(p, &o) > radius && window.contains(p);
    let mut used_marks: Vec<f64> = marks.map(|m| m.to_vec()).unwrap_or_default();

    for probe in 0..n_probes {
        let mut extra: Vec<Vec<f64>> = Vec::new();
        let mut extra_marks: Vec<f64> = Vec::new();
        let kind = probe % 4;
        let count = rng.random_range(0..=20usize);
        match kind {
            0 => {
                let chosen: Vec<usize> = if probe == 0 {
                    outer.clone()
                } else {
                    outer.iter().copied().filter(|_| rng.random::<f64>() < 0.5).take(count).collect()
                };
                for j in chosen {
                    extra.push(points.point(j).to_vec());
                    if let Some(m) = marks {
                        extra_marks.push(m[j]);
                    }
                }
            }
            _ => {
                let centre = if kind == 3 { Some(uniform_point(&mut rng, window, &cumulative)) } else { None };
                let mut attempts = 0;
                while extra.len() < count && attempts < 10_000 * (count + 1) {
                    attempts += 1;
                    let p = match (kind, &centre) {
                        (2, _) => {
                            let u = random_direction(&mut rng, o.len());
                            let r = radius * (1.0 + 1e-9 + 0.05 * rng.random::<f64>());
                            o.iter().zip(&u).map(|(a, b)| a + r * b).collect()
                        }
                        (3, Some(c)) => c.iter().map(|&x| x + 0.05 * (rng.random::<f64>() - 0.5)).collect(),
                        _ => uniform_point(&mut rng, window, &cumulative),
                    };
                    if !outside(&p) {
                        continue;
                    }
                    extra.push(p);
                    if marked {
                        let m = loop {
                            let u: f64 = rng.random();
                            let m = if kind == 3 {
                                if rng.random::<bool>() { 1e-3 * u } else { 1.0 - 1e-3 * u }
                            } else {
                                u
                            };
                            if !used_marks.contains(&m) {
                                break m;
                            }
                        };
                        used_marks.push(m);
                        extra_marks.push(m);
                    }
                }
            }
        }
        if extra.iter().any(|p| p == &o) {
            continue;
        }
        let mut cfg = base.clone();
        for p in &extra {
            cfg.push(p)?;
        }
        let cfg_marks = base_marks.as_ref().map(|b| {
            let mut v = b.clone();
            v.extend_from_slice(&extra_marks);
            v
        });
        let keys = insertion_keys(builder, &cfg, cfg_marks.as_deref(), &o, o_mark)?;
        if keys != reference {
            return Ok(ProbeReport {
                passed: false,
                vacuous: false,
                probes_run: probe + 1,
                counterexample: Some(Counterexample {
                    probe,
                    points: extra,
                    marks: marked.then_some(extra_marks),
                }),
            });
        }
    }
    Ok(ProbeReport { passed: true, vacuous: false, probes_run: n_probes, counterexample: None })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRadius {
    pub radius: f64,
    pub doublings: usize,
    /// Always true: found by probing, not by construction.
    pub heuristic: bool,
    pub report: ProbeReport,
}

/// Smallest `initial * 2^k` at which `probe_stability` passes.
#[allow(clippy::too_many_arguments)]
pub fn heuristic_radius(
    builder: &GraphBuilder,
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    origin: usize,
    window: &Region,
    initial: f64,
    n_probes: usize,
    seed: u64,
) -> Result<HeuristicRadius> {
    if !(initial > 0.0) {
        return Err(Error::param("initial radius must be positive"));
    }
    let mut radius = initial;
    let mut doublings = 0;
    loop {
        let report = probe_stability(builder, points, marks, origin, radius, window, n_probes, seed)?;
        if report.passed {
            return Ok(HeuristicRadius { radius, doublings, heuristic: true, report });
        }
        radius *= 2.0;
        doublings += 1;
    }
}
