//! Box-union regions, lattice discretization and cones.
//!
//! A [`Region`] is a finite union of half-open axis-aligned boxes `[lo, hi)`
//! kept in a normalized, pairwise-disjoint representation so that measures
//! and partitions are exact.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Half-open box `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Boxed {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Boxed {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::param("box dimension must be positive"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(Error::param(format!("degenerate box {lo:?} .. {hi:?}")));
        }
        Ok(Boxed { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *l <= *x && *x < *h)
    }

    fn intersect(&self, other: &Boxed) -> Option<Boxed> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let l = self.lo[i].max(other.lo[i]);
            let h = self.hi[i].min(other.hi[i]);
            if !(l < h) {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(Boxed { lo, hi })
    }

    /// `self \ other` as at most `2d` disjoint boxes.
    fn subtract(&self, other: &Boxed) -> Vec<Boxed> {
        if self.intersect(other).is_none() {
            return vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for i in 0..self.dim() {
            if rest.lo[i] < other.lo[i] {
                let mut piece = rest.clone();
                piece.hi[i] = other.lo[i];
                pieces.push(piece);
                rest.lo[i] = other.lo[i];
            }
            if rest.hi[i] > other.hi[i] {
                let mut piece = rest.clone();
                piece.lo[i] = other.hi[i];
                pieces.push(piece);
                rest.hi[i] = other.hi[i];
            }
        }
        pieces
    }

    /// Euclidean distance from `p` to the closure of the box.
    pub fn distance_to_closure(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| {
                let d = (l - x).max(0.0).max(x - h);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Largest distance from `p` to a point of the closure of the box.
    pub fn max_distance(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| {
                let d = (x - l).abs().max((h - x).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Finite union of pairwise-disjoint half-open boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionRepr", into = "RegionRepr")]
pub struct Region {
    dim: usize,
    boxes: Vec<Boxed>,
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    dim: usize,
    boxes: Vec<[Vec<f64>; 2]>,
}

impl TryFrom<RegionRepr> for Region {
    type Error = Error;

    fn try_from(r: RegionRepr) -> Result<Self> {
        let boxes = r
            .boxes
            .into_iter()
            .map(|[lo, hi]| Boxed::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Region::from_boxes(r.dim, boxes)
    }
}

impl From<Region> for RegionRepr {
    fn from(r: Region) -> Self {
        RegionRepr {
            dim: r.dim,
            boxes: r.boxes.into_iter().map(|b| [b.lo, b.hi]).collect(),
        }
    }
}

impl Region {
    pub fn empty(dim: usize) -> Self {
        Region { dim, boxes: Vec::new() }
    }

    /// Single box `[lo, hi)`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let b = Boxed::new(lo.to_vec(), hi.to_vec())?;
        Ok(Region { dim: b.dim(), boxes: vec![b] })
    }

    /// `[0, 1)^d`.
    pub fn unit_cube(dim: usize) -> Self {
        Region::cuboid(&vec![0.0; dim], &vec![1.0; dim]).expect("unit cube is well formed")
    }

    /// `[-half, half)^d`.
    pub fn centered_cube(dim: usize, half: f64) -> Result<Self> {
        Region::cuboid(&vec![-half; dim], &vec![half; dim])
    }

    /// Union of possibly overlapping boxes, normalized to a disjoint set.
    pub fn from_boxes(dim: usize, boxes: Vec<Boxed>) -> Result<Self> {
        let mut r = Region::empty(dim);
        for b in boxes {
            check_dim(dim, b.dim())?;
            r.add_box(b);
        }
        Ok(r)
    }

    fn add_box(&mut self, b: Boxed) {
        let mut pieces = vec![b];
        for existing in &self.boxes {
            pieces = pieces.iter().flat_map(|p| p.subtract(existing)).collect();
            if pieces.is_empty() {
                return;
            }
        }
        self.boxes.extend(pieces);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Boxed] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(Boxed::volume).sum()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    pub fn union(&self, other: &Region) -> Result<Region> {
        check_dim(self.dim, other.dim)?;
        let mut r = self.clone();
        for b in &other.boxes {
            r.add_box(b.clone());
        }
        Ok(r)
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        check_dim(self.dim, other.dim)?;
        let boxes = self
            .boxes
            .iter()
            .flat_map(|a| other.boxes.iter().filter_map(move |b| a.intersect(b)))
            .collect();
        Ok(Region { dim: self.dim, boxes })
    }

    pub fn difference(&self, other: &Region) -> Result<Region> {
        check_dim(self.dim, other.dim)?;
        let mut boxes = Vec::new();
        for a in &self.boxes {
            let mut pieces = vec![a.clone()];
            for b in &other.boxes {
                pieces = pieces.iter().flat_map(|p| p.subtract(b)).collect();
            }
            boxes.extend(pieces);
        }
        Ok(Region { dim: self.dim, boxes })
    }

    /// `self ⊆ other` (up to null sets of the box representation).
    pub fn is_subset_of(&self, other: &Region) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn scale(&self, t: f64) -> Result<Region> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::param(format!("scale factor must be positive, got {t}")));
        }
        let boxes = self
            .boxes
            .iter()
            .map(|b| Boxed {
                lo: b.lo.iter().map(|x| x * t).collect(),
                hi: b.hi.iter().map(|x| x * t).collect(),
            })
            .collect();
        Ok(Region { dim: self.dim, boxes })
    }

    pub fn translate(&self, y: &[f64]) -> Result<Region> {
        check_dim(self.dim, y.len())?;
        let boxes = self
            .boxes
            .iter()
            .map(|b| Boxed {
                lo: b.lo.iter().zip(y).map(|(x, s)| x + s).collect(),
                hi: b.hi.iter().zip(y).map(|(x, s)| x + s).collect(),
            })
            .collect();
        Ok(Region { dim: self.dim, boxes })
    }

    /// Bounding box of the region, `None` when empty.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.boxes.first()?;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for b in &self.boxes[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(b.lo[i]);
                hi[i] = hi[i].max(b.hi[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn distance_to_closure(&self, p: &[f64]) -> f64 {
        self.boxes
            .iter()
            .map(|b| b.distance_to_closure(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from `p` to any point of the closure.
    pub fn max_distance(&self, p: &[f64]) -> f64 {
        self.boxes.iter().map(|b| b.max_distance(p)).fold(0.0, f64::max)
    }

    /// Volume-weighted mean of box centres.
    pub fn centroid(&self) -> Option<Vec<f64>> {
        let m = self.measure();
        if m <= 0.0 {
            return None;
        }
        let mut c = vec![0.0; self.dim];
        for b in &self.boxes {
            let v = b.volume();
            for ((ci, lo), hi) in c.iter_mut().zip(&b.lo).zip(&b.hi) {
                *ci += v * 0.5 * (lo + hi);
            }
        }
        Some(c.into_iter().map(|x| x / m).collect())
    }

    /// Lattice sites within closed distance `rho` of the closure of the region.
    ///
    /// `rho` must be at least `sqrt(d)` so that every unit cell meeting the
    /// region is represented.
    pub fn discretize(&self, rho: f64) -> Result<LatticeSet> {
        let d = self.dim;
        if rho < (d as f64).sqrt() - 1e-12 {
            return Err(Error::param(format!(
                "discretization radius {rho} is below sqrt(d) = {}",
                (d as f64).sqrt()
            )));
        }
        let mut sites = BTreeSet::new();
        for b in &self.boxes {
            let lo: Vec<i64> = b.lo.iter().map(|x| (x - rho).floor() as i64).collect();
            let hi: Vec<i64> = b.hi.iter().map(|x| (x + rho).ceil() as i64).collect();
            let mut z = lo.clone();
            loop {
                let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
                if b.distance_to_closure(&zf) <= rho {
                    sites.insert(z.clone());
                }
                if !advance(&mut z, &lo, &hi) {
                    break;
                }
            }
        }
        Ok(LatticeSet { dim: d, sites: sites.into_iter().collect() })
    }
}

/// Odometer increment over the integer box `[lo, hi]`; false when exhausted.
pub(crate) fn advance(z: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in (0..z.len()).rev() {
        if z[i] < hi[i] {
            z[i] += 1;
            return true;
        }
        z[i] = lo[i];
    }
    false
}

/// Finite set of integer sites, stored sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSet {
    dim: usize,
    sites: Vec<Vec<i64>>,
}

impl LatticeSet {
    pub fn new(dim: usize, sites: impl IntoIterator<Item = Vec<i64>>) -> Result<Self> {
        let set: BTreeSet<Vec<i64>> = sites.into_iter().collect();
        if let Some(bad) = set.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(LatticeSet { dim, sites: set.into_iter().collect() })
    }

    /// All sites of the integer cube `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: i64, hi: i64) -> Self {
        let lo_v = vec![lo; dim];
        let hi_v = vec![hi; dim];
        let mut sites = Vec::new();
        if lo <= hi {
            let mut z = lo_v.clone();
            loop {
                sites.push(z.clone());
                if !advance(&mut z, &lo_v, &hi_v) {
                    break;
                }
            }
        }
        LatticeSet { dim, sites }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[Vec<i64>] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, z: &[i64]) -> Option<usize> {
        self.sites.binary_search_by(|s| s.as_slice().cmp(z)).ok()
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.index_of(z).is_some()
    }

    pub fn is_subset_of(&self, other: &LatticeSet) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }
}

/// Open circular cone `{p : angle(axis, p - apex) < half_angle}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    apex: Vec<f64>,
    axis: Vec<f64>,
    half_angle: f64,
}

impl Cone {
    pub fn new(apex: Vec<f64>, axis: Vec<f64>, half_angle: f64) -> Result<Self> {
        check_dim(apex.len(), axis.len())?;
        if !(half_angle > 0.0 && half_angle < PI / 2.0) {
            return Err(Error::param(format!("cone half-angle {half_angle} not in (0, pi/2)")));
        }
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::param("cone axis must be non-zero"));
        }
        let axis = axis.into_iter().map(|x| x / norm).collect();
        Ok(Cone { apex, axis, half_angle })
    }

    pub fn apex(&self) -> &[f64] {
        &self.apex
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    /// Same axis and angle, apex moved to `apex`.
    pub fn with_apex(&self, apex: &[f64]) -> Cone {
        Cone { apex: apex.to_vec(), ..self.clone() }
    }

    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        check_dim(self.apex.len(), p.len())?;
        let mut dot = 0.0;
        let mut n2 = 0.0;
        for ((x, a), u) in p.iter().zip(&self.apex).zip(&self.axis) {
            let v = x - a;
            dot += v * u;
            n2 += v * v;
        }
        if n2 == 0.0 {
            return Err(Error::param("point coincides with cone apex"));
        }
        let cos = (dot / n2.sqrt()).clamp(-1.0, 1.0);
        Ok(cos.acos() < self.half_angle)
    }
}

/// Finite family of cones with apex at the origin whose union is `R^d \ {0}`.
///
/// Dimension 1 uses the two half-lines. Dimension 2 spaces `floor(pi/θ) + 1`
/// axes evenly so that neighbouring open cones overlap strictly. Higher
/// dimensions take axes through a grid on the faces of `[-1, 1]^d` fine
/// enough that every direction is within angle `< θ` of some axis.
pub fn cone_cover(dim: usize, half_angle: f64) -> Result<Vec<Cone>> {
    let supported = [PI / 12.0, PI / 6.0];
    if !supported.iter().any(|a| (a - half_angle).abs() < 1e-12) {
        return Err(Error::param(format!(
            "unsupported cone half-angle {half_angle}; use pi/12 or pi/6"
        )));
    }
    if dim == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let origin = vec![0.0; dim];
    let axes: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let n = (PI / half_angle).floor() as usize + 1;
            (0..n)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / n as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            let target = half_angle.sin();
            let spread = ((dim - 1) as f64).sqrt();
            let mut m = 1usize;
            while spread / m as f64 >= target {
                m += 1;
            }
            let lo = vec![0i64; dim];
            let hi = vec![m as i64; dim];
            let mut z = lo.clone();
            let mut axes = Vec::new();
            loop {
                if z.iter().any(|&v| v == 0 || v == m as i64) {
                    axes.push(z.iter().map(|&v| -1.0 + 2.0 * v as f64 / m as f64).collect());
                }
                if !advance(&mut z, &lo, &hi) {
                    break;
                }
            }
            axes
        }
    };
    axes.into_iter().map(|a| Cone::new(origin.clone(), a, half_angle)).collect()
}

/// Uniformly random unit vector in `R^d`.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let n = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    distance2(a, b).sqrt()
}

#[inline]
pub fn distance2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn rect(lo: &[f64], hi: &[f64]) -> Region {
        Region::cuboid(lo, hi).unwrap()
    }

    #[test]
    fn measures() {
        let unit = Region::unit_cube(2);
        assert_eq!(unit.measure(), 1.0);
        assert_eq!(unit.union(&unit).unwrap().measure(), 1.0);
        let a = rect(&[0.0, 0.0], &[0.5, 1.0]);
        let b = rect(&[0.25, 0.0], &[0.75, 1.0]);
        assert_eq!(a.intersect(&b).unwrap().measure(), 0.25);
        assert_eq!(a.union(&b).unwrap().measure(), 0.75);
        assert_eq!(Region::empty(3).measure(), 0.0);
    }

    #[test]
    fn degenerate_boxes_rejected() {
        assert!(Region::cuboid(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(Region::cuboid(&[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn scale_and_translate() {
        let unit = Region::unit_cube(2);
        let s = unit.scale(2.0).unwrap();
        assert_eq!(s, rect(&[0.0, 0.0], &[2.0, 2.0]));
        assert_eq!(s.measure(), 4.0);
        assert_eq!(unit.scale(1.0).unwrap(), unit);
        assert!(unit.scale(0.0).is_err());
        assert!(unit.scale(-1.0).is_err());

        let line = rect(&[0.0], &[1.0]);
        assert_eq!(line.translate(&[0.5]).unwrap(), rect(&[0.5], &[1.5]));
        assert_eq!(unit.translate(&[0.0, 0.0]).unwrap(), unit);
        assert!(unit.translate(&[1.0]).is_err());
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let a = rect(&[0.0, 0.0], &[1.0, 1.0]);
        let b = rect(&[2.0, 0.0], &[3.0, 1.0]);
        let i = a.intersect(&b).unwrap();
        assert!(i.is_empty());
        assert_eq!(i.measure(), 0.0);
        assert_eq!(a.intersect(&a).unwrap().measure(), a.measure());
        assert!(a.intersect(&Region::unit_cube(3)).is_err());
    }

    #[test]
    fn discretize_unit_interval() {
        let r = rect(&[0.0], &[1.0]);
        let s = r.discretize(1.0).unwrap();
        assert_eq!(s.sites(), &[vec![-1], vec![0], vec![1], vec![2]]);
        assert!(Region::empty(1).discretize(1.0).unwrap().is_empty());
        assert!(Region::unit_cube(2).discretize(1.0).is_err());
    }

    #[test]
    fn discretize_unit_square_matches_scan() {
        let rho = 2f64.sqrt();
        let s = Region::unit_cube(2).discretize(rho).unwrap();
        // brute force over a generous window, nearest point of [0,1]^2
        let mut expect = Vec::new();
        for x in -5i64..=6 {
            for y in -5i64..=6 {
                let nx = (x as f64).clamp(0.0, 1.0);
                let ny = (y as f64).clamp(0.0, 1.0);
                let d = ((x as f64 - nx).powi(2) + (y as f64 - ny).powi(2)).sqrt();
                if d <= rho {
                    expect.push(vec![x, y]);
                }
            }
        }
        expect.sort();
        assert_eq!(s.sites(), expect.as_slice());
        assert_eq!(s.len(), 16);
    }

    #[test]
    fn cube_cells_inside_discretization_balls() {
        // Q_z^eps = eps z + [-eps, 0)^d lies in B_rho(eps z) for eps <= 1, rho >= sqrt(d)
        for d in 1..=4usize {
            let rho = (d as f64).sqrt();
            for &eps in &[1.0, 0.5, 0.1] {
                let z: Vec<f64> = (0..d).map(|i| i as f64 - 1.0).collect();
                let centre: Vec<f64> = z.iter().map(|v| eps * v).collect();
                for mask in 0..(1u32 << d) {
                    let corner: Vec<f64> = (0..d)
                        .map(|i| centre[i] - if mask >> i & 1 == 1 { eps } else { 0.0 })
                        .collect();
                    assert!(distance(&corner, &centre) <= rho + 1e-12);
                }
            }
        }
    }

    #[test]
    fn cone_membership() {
        let c = Cone::new(vec![0.0, 0.0], vec![1.0, 0.0], PI / 6.0).unwrap();
        assert!(c.contains(&[1.0, 0.0]).unwrap());
        assert!(!c.contains(&[0.0, 1.0]).unwrap());
        // arccos(1/sqrt(1.25)) = 0.4636 < 0.5236
        assert!(c.contains(&[1.0, 0.5]).unwrap());
        assert!(c.contains(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn cone_cover_shapes() {
        let c1 = cone_cover(1, PI / 6.0).unwrap();
        assert_eq!(c1.len(), 2);
        assert_eq!(cone_cover(2, PI / 12.0).unwrap().len(), 13);
        assert_eq!(cone_cover(2, PI / 6.0).unwrap().len(), 7);
        assert!(cone_cover(2, PI / 4.0).is_err());
        for d in 1..=3 {
            for c in cone_cover(d, PI / 12.0).unwrap() {
                let n: f64 = c.axis().iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cone_cover_covers_random_directions() {
        for d in 1..=3 {
            for &angle in &[PI / 12.0, PI / 6.0] {
                let cones = cone_cover(d, angle).unwrap();
                let mut rng = stream(11, &[d as u64]);
                let misses = (0..100_000)
                    .filter(|_| {
                        let u = random_direction(&mut rng, d);
                        !cones.iter().any(|c| c.contains(&u).unwrap())
                    })
                    .count();
                assert_eq!(misses, 0, "d={d} angle={angle}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let r = rect(&[0.0, 0.0], &[0.5, 1.0]).union(&rect(&[0.25, 0.0], &[1.0, 2.0])).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with("{\"dim\":2,\"boxes\":[[["));
        let back: Region = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Region>(r#"{"dim":1,"boxes":[[[1.0],[0.0]]]}"#).is_err());
    }

    fn arb_box() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        prop::collection::vec((-5.0f64..5.0, 0.01f64..3.0), 2)
            .prop_map(|v| (v.iter().map(|p| p.0).collect(), v.iter().map(|p| p.0 + p.1).collect()))
    }

    fn arb_region() -> impl Strategy<Value = Region> {
        prop::collection::vec(arb_box(), 1..5).prop_map(|bs| {
            Region::from_boxes(2, bs.into_iter().map(|(l, h)| Boxed::new(l, h).unwrap()).collect())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalized_boxes_are_disjoint(r in arb_region()) {
            let bs = r.boxes();
            for i in 0..bs.len() {
                for j in i + 1..bs.len() {
                    prop_assert!(bs[i].intersect(&bs[j]).is_none());
                }
            }
        }

        #[test]
        fn measure_is_additive(a in arb_region(), b in arb_region()) {
            let a_only = a.difference(&b).unwrap();
            let union = a.union(&b).unwrap();
            let sum = a_only.measure() + b.measure();
            prop_assert!((union.measure() - sum).abs() <= 1e-9 * sum.max(1.0));
            let inter = a.intersect(&b).unwrap().measure();
            prop_assert!((a.measure() + b.measure() - inter - union.measure()).abs() < 1e-9 * sum.max(1.0));
        }

        #[test]
        fn scale_translate_measure(r in arb_region(), t in 0.1f64..5.0, y in prop::collection::vec(-3.0f64..3.0, 2)) {
            let m = r.measure();
            prop_assert!((r.scale(t).unwrap().measure() - t * t * m).abs() < 1e-12 * (1.0 + t * t * m) * 10.0);
            prop_assert!((r.translate(&y).unwrap().measure() - m).abs() < 1e-12 * (1.0 + m) * 10.0);
        }

        #[test]
        fn discretize_is_monotone(a in arb_region(), b in arb_region()) {
            let big = a.union(&b).unwrap();
            let rho = 2f64.sqrt();
            prop_assert!(a.discretize(rho).unwrap().is_subset_of(&big.discretize(rho).unwrap()));
        }
    }
}
