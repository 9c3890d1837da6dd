//! Poisson, binomial and marked point samples on box-union regions.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::Region;
use crate::rng::stream;

/// Where a configuration came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, f64>,
    pub region: Option<Region>,
}

/// Finite point set in `R^d`, stored as a flat coordinate array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    dim: usize,
    coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl PointConfiguration {
    pub fn empty(dim: usize) -> Self {
        PointConfiguration { dim, coords: Vec::new(), provenance: None }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::input(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(PointConfiguration { dim, coords, provenance: None })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            check_dim(dim, p.as_ref().len())?;
            coords.extend_from_slice(p.as_ref());
        }
        Ok(PointConfiguration { dim, coords, provenance: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        check_dim(self.dim, p.len())?;
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Copy with `p` appended as the last point.
    pub fn with_point(&self, p: &[f64]) -> Result<Self> {
        let mut c = PointConfiguration { dim: self.dim, coords: self.coords.clone(), provenance: None };
        c.push(p)?;
        Ok(c)
    }

    /// Indices of points lying in `r`.
    pub fn indices_in(&self, r: &Region) -> Vec<usize> {
        (0..self.len()).filter(|&i| r.contains(self.point(i))).collect()
    }

    /// Sub-configuration of the given points.
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            coords.extend_from_slice(self.point(i));
        }
        PointConfiguration { dim: self.dim, coords, provenance: None }
    }

    pub fn scaled(&self, a: f64) -> Self {
        PointConfiguration {
            dim: self.dim,
            coords: self.coords.iter().map(|x| x * a).collect(),
            provenance: None,
        }
    }

    pub fn translated(&self, y: &[f64]) -> Result<Self> {
        check_dim(self.dim, y.len())?;
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(y).map(|(a, b)| a + b))
            .collect();
        Ok(PointConfiguration { dim: self.dim, coords, provenance: None })
    }

    pub fn concat(&self, other: &PointConfiguration) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointConfiguration { dim: self.dim, coords, provenance: None })
    }

    /// Largest inter-point distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(crate::geometry::distance2(self.point(i), self.point(j)));
            }
        }
        best.sqrt()
    }

    pub fn write_csv<W: Write>(&self, w: W, marks: Option<&[f64]>) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        if marks.is_some() {
            header.push("mark".into());
        }
        out.write_record(&header)?;
        for (i, p) in self.iter().enumerate() {
            let mut row: Vec<String> = p.iter().map(|x| crate::fmt17(*x)).collect();
            if let Some(m) = marks {
                row.push(crate::fmt17(m[i]));
            }
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Parse the CSV layout produced by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(r: R) -> Result<(Self, Option<Vec<f64>>)> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let has_mark = header.iter().next_back() == Some("mark");
        let dim = header.len() - usize::from(has_mark);
        let mut coords = Vec::new();
        let mut marks = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            for (k, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::input(format!("bad number {field:?} in point CSV")))?;
                if k < dim {
                    coords.push(v);
                } else {
                    marks.push(v);
                }
            }
        }
        let c = PointConfiguration::from_flat(dim, coords)?;
        Ok((c, has_mark.then_some(marks)))
    }
}

/// Points with one mark in `[0, 1]` each; marks are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedConfiguration {
    points: PointConfiguration,
    marks: Vec<f64>,
}

impl MarkedConfiguration {
    pub fn new(points: PointConfiguration, marks: Vec<f64>) -> Result<Self> {
        if marks.len() != points.len() {
            return Err(Error::input(format!(
                "{} marks for {} points",
                marks.len(),
                points.len()
            )));
        }
        if marks.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::input("marks must lie in [0, 1]"));
        }
        if !marks_distinct(&marks) {
            return Err(Error::input("marks must be pairwise distinct"));
        }
        Ok(MarkedConfiguration { points, marks })
    }

    pub fn points(&self) -> &PointConfiguration {
        &self.points
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_parts(self) -> (PointConfiguration, Vec<f64>) {
        (self.points, self.marks)
    }
}

pub(crate) fn marks_distinct(marks: &[f64]) -> bool {
    let mut sorted = marks.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Uniform point in a box union: pick a box by volume, then uniform inside.
pub fn uniform_point<R: Rng + ?Sized>(rng: &mut R, r: &Region, cumulative: &[f64]) -> Vec<f64> {
    let total = *cumulative.last().expect("non-empty region");
    let u = rng.random::<f64>() * total;
    let k = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
    let b = &r.boxes()[k];
    b.lo.iter()
        .zip(&b.hi)
        .map(|(&l, &h)| loop {
            let x = l + rng.random::<f64>() * (h - l);
            // rounding can land on the open end
            if x < h {
                break x;
            }
        })
        .collect()
}

pub(crate) fn cumulative_volumes(r: &Region) -> Vec<f64> {
    r.boxes()
        .iter()
        .scan(0.0, |acc, b| {
            *acc += b.volume();
            Some(*acc)
        })
        .collect()
}

fn fill_uniform<R: Rng + ?Sized>(rng: &mut R, r: &Region, m: usize) -> Vec<f64> {
    let cum = cumulative_volumes(r);
    let mut coords = Vec::with_capacity(m * r.dim());
    for _ in 0..m {
        coords.extend(uniform_point(rng, r, &cum));
    }
    coords
}

fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<usize> {
    let dist = Poisson::new(mean).map_err(|e| Error::param(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// Homogeneous Poisson process of intensity `lambda` restricted to `r`.
pub fn sample_poisson(lambda: f64, r: &Region, seed: u64) -> Result<PointConfiguration> {
    let mut rng = stream(seed, &[0x706f_6973]);
    sample_poisson_with(&mut rng, lambda, r).map(|c| {
        c.with_provenance(Provenance {
            generator: "poisson".into(),
            seed,
            parameters: BTreeMap::from([("lambda".into(), lambda)]),
            region: Some(r.clone()),
        })
    })
}

/// As [`sample_poisson`] but drawing from a caller-supplied generator.
pub fn sample_poisson_with<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    r: &Region,
) -> Result<PointConfiguration> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("intensity must be positive, got {lambda}")));
    }
    let mu = lambda * r.measure();
    if !(mu > 0.0) {
        return Err(Error::param("poisson sampling region has zero measure"));
    }
    let n = poisson_count(rng, mu)?;
    PointConfiguration::from_flat(r.dim(), fill_uniform(rng, r, n))
}

/// `m` i.i.d. uniform points on `r`.
pub fn sample_binomial(m: usize, r: &Region, seed: u64) -> Result<PointConfiguration> {
    let mut rng = stream(seed, &[0x6269_6e6f]);
    sample_binomial_with(&mut rng, m, r).map(|c| {
        c.with_provenance(Provenance {
            generator: "binomial".into(),
            seed,
            parameters: BTreeMap::from([("m".into(), m as f64)]),
            region: Some(r.clone()),
        })
    })
}

pub fn sample_binomial_with<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    r: &Region,
) -> Result<PointConfiguration> {
    if m == 0 {
        return Ok(PointConfiguration::empty(r.dim()));
    }
    if !(r.measure() > 0.0) {
        return Err(Error::param("binomial sampling region has zero measure"));
    }
    PointConfiguration::from_flat(r.dim(), fill_uniform(rng, r, m))
}

/// I.i.d. uniform marks, resampled until pairwise distinct.
pub fn attach_marks(c: PointConfiguration, seed: u64) -> MarkedConfiguration {
    let mut rng = stream(seed, &[0x6d61_726b]);
    let marks = draw_marks(&mut rng, c.len());
    MarkedConfiguration { points: c, marks }
}

pub fn draw_marks<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut marks: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    loop {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| marks[a].total_cmp(&marks[b]));
        let dup: Vec<usize> = order
            .windows(2)
            .filter(|w| marks[w[0]] == marks[w[1]])
            .map(|w| w[1])
            .collect();
        if dup.is_empty() {
            return marks;
        }
        for i in dup {
            marks[i] = rng.random::<f64>();
        }
    }
}

/// Prefix-stable uniform sequence `U_1, U_2, ...` on a region together with
/// an independent Poisson count `N`.
///
/// The first `m` points never depend on how many are eventually drawn, which
/// couples binomial samples of every size with one Poisson sample.
#[derive(Debug, Clone)]
pub struct CoupledStream {
    region: Region,
    seed: u64,
    mean: f64,
    count: usize,
    cumulative: Vec<f64>,
    cache: Vec<f64>,
    rng: ChaCha8Rng,
}

pub fn coupled_stream(lambda: f64, r: &Region, seed: u64) -> Result<CoupledStream> {
    if !(lambda > 0.0) {
        return Err(Error::param(format!("intensity must be positive, got {lambda}")));
    }
    let mean = lambda * r.measure();
    if !(mean > 0.0) {
        return Err(Error::param("coupled stream region has zero measure"));
    }
    let count = poisson_count(&mut stream(seed, &[0x636f_756e]), mean)?;
    Ok(CoupledStream {
        region: r.clone(),
        seed,
        mean,
        count,
        cumulative: cumulative_volumes(r),
        cache: Vec::new(),
        rng: stream(seed, &[0x756e_6966]),
    })
}

impl CoupledStream {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The independent Poisson count `N`.
    pub fn poisson_count(&self) -> usize {
        self.count
    }

    fn ensure(&mut self, m: usize) {
        let d = self.region.dim();
        while self.cache.len() < m * d {
            let p = uniform_point(&mut self.rng, &self.region, &self.cumulative);
            self.cache.extend(p);
        }
    }

    pub fn point(&mut self, i: usize) -> Vec<f64> {
        self.ensure(i + 1);
        let d = self.region.dim();
        self.cache[i * d..(i + 1) * d].to_vec()
    }

    /// `U_1..U_m`.
    pub fn prefix(&mut self, m: usize) -> PointConfiguration {
        self.ensure(m);
        let d = self.region.dim();
        PointConfiguration::from_flat(d, self.cache[..m * d].to_vec()).expect("flat layout")
    }

    /// `U_1..U_N`, distributed as a Poisson sample on the region.
    pub fn poissonized(&mut self) -> PointConfiguration {
        self.prefix(self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::poisson_chi_square;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn square(side: f64) -> Region {
        Region::cuboid(&[0.0, 0.0], &[side, side]).unwrap()
    }

    #[test]
    fn poisson_rejects_empty_region() {
        assert!(sample_poisson(1.0, &Region::empty(2), 0).is_err());
        assert!(sample_poisson(0.0, &square(1.0), 0).is_err());
    }

    #[test]
    fn poisson_is_deterministic_and_contained() {
        let r = square(5.0);
        let a = sample_poisson(2.0, &r, 9).unwrap();
        let b = sample_poisson(2.0, &r, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| r.contains(p)));
        assert_ne!(a, sample_poisson(2.0, &r, 10).unwrap());
    }

    #[test]
    fn poisson_mean_count() {
        let r = square(10.0);
        let n = 10_000;
        let mean = (0..n).map(|s| sample_poisson(1.0, &r, s).unwrap().len() as f64).sum::<f64>()
            / n as f64;
        assert!((mean - 100.0).abs() <= 3.0 * (100.0f64 / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn poisson_thinning_to_sub_box() {
        let r = square(4.0);
        let sub = Region::cuboid(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let counts: Vec<usize> = (0..10_000)
            .map(|s| sample_poisson(1.5, &r, s).unwrap().indices_in(&sub).len())
            .collect();
        let p = poisson_chi_square(&counts, 1.5 * 2.0);
        assert!(p > 0.01, "p-value {p}");
    }

    #[test]
    fn binomial_basics() {
        let r = square(2.0);
        assert!(sample_binomial(0, &r, 1).unwrap().is_empty());
        let c = sample_binomial(5, &r, 1).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.iter().all(|p| r.contains(p)));
        assert!(sample_binomial(3, &Region::empty(2), 1).is_err());
        assert!(sample_binomial(0, &Region::empty(2), 1).unwrap().is_empty());
    }

    #[test]
    fn binomial_mean_matches_centroid() {
        // L-shaped union: centroid is not the bounding-box centre
        let r = Region::cuboid(&[0.0, 0.0], &[2.0, 1.0])
            .unwrap()
            .union(&Region::cuboid(&[0.0, 1.0], &[1.0, 3.0]).unwrap())
            .unwrap();
        let centroid = r.centroid().unwrap();
        let n = 10_000;
        let mut sum = [0.0; 2];
        let mut sum2 = [0.0; 2];
        for s in 0..n {
            let p = sample_binomial(1, &r, s).unwrap();
            for k in 0..2 {
                sum[k] += p.point(0)[k];
                sum2[k] += p.point(0)[k] * p.point(0)[k];
            }
        }
        for k in 0..2 {
            let m = sum[k] / n as f64;
            let var = sum2[k] / n as f64 - m * m;
            assert!((m - centroid[k]).abs() <= 3.0 * (var / n as f64).sqrt(), "axis {k}");
        }
    }

    #[test]
    fn marks_distinct_and_uniform_rank() {
        let empty = attach_marks(PointConfiguration::empty(2), 0);
        assert!(empty.marks().is_empty());
        let c = sample_binomial(7, &square(1.0), 3).unwrap();
        let m = attach_marks(c.clone(), 4);
        assert_eq!(m.marks().len(), 7);
        assert!(marks_distinct(m.marks()));
        assert!(m.marks().iter().all(|x| (0.0..=1.0).contains(x)));

        // rank of the first point's mark is uniform on 0..7
        let trials = 10_000;
        let mut hist = [0usize; 7];
        for s in 0..trials {
            let mk = attach_marks(c.clone(), s);
            let rank = mk.marks().iter().filter(|&&x| x < mk.marks()[0]).count();
            hist[rank] += 1;
        }
        let e = trials as f64 / 7.0;
        let stat: f64 = hist.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        let p = 1.0 - ChiSquared::new(6.0).unwrap().cdf(stat);
        assert!(p > 0.01, "p-value {p}");
    }

    #[test]
    fn duplicate_marks_rejected() {
        let c = PointConfiguration::from_points(1, &[[0.0], [1.0]]).unwrap();
        assert!(MarkedConfiguration::new(c.clone(), vec![0.5, 0.5]).is_err());
        assert!(MarkedConfiguration::new(c, vec![0.2, 0.5]).is_ok());
    }

    #[test]
    fn coupled_prefix_is_stable() {
        let r = square(3.0);
        let mut a = coupled_stream(1.0, &r, 5).unwrap();
        let mut b = coupled_stream(1.0, &r, 5).unwrap();
        let three = a.prefix(3);
        let ten = b.prefix(10);
        assert_eq!(three.coords(), &ten.coords()[..6]);
        assert_eq!(a.prefix(10), ten);
    }

    #[test]
    fn coupled_count_independent_of_points() {
        let r = square(3.0);
        let n = 10_000;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut counts = Vec::with_capacity(n);
        for s in 0..n as u64 {
            let mut cs = coupled_stream(1.0, &r, s).unwrap();
            let x = cs.poisson_count() as f64;
            let y = cs.point(0)[0];
            counts.push(cs.poissonized().len());
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx * sy / nf / nf;
        let corr = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(corr.abs() <= 3.0 / nf.sqrt(), "corr {corr}");
        let p = poisson_chi_square(&counts, 9.0);
        assert!(p > 0.01, "p-value {p}");
    }

    #[test]
    fn csv_round_trip() {
        let c = sample_poisson(1.0, &square(3.0), 2).unwrap();
        let m = attach_marks(c.clone(), 1);
        let mut buf = Vec::new();
        c.write_csv(&mut buf, Some(m.marks())).unwrap();
        let (back, marks) = PointConfiguration::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.coords(), c.coords());
        assert_eq!(marks.unwrap(), m.marks());
    }
}
