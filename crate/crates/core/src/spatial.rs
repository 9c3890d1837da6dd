//! Static kd-tree over a flat coordinate array.
//!
//! The tree is stored implicitly: the index permutation is median-partitioned
//! recursively, so the node for a range `[lo, hi)` sits at `(lo + hi) / 2`.
//! Each node also records the minimum rank in its subtree, which lets the
//! on-line nearest-neighbour search skip subtrees holding only later points.

use std::cmp::Ordering;

use crate::geometry::distance2;

/// Lexicographic order on coordinate vectors, the global tie-breaker.
#[inline]
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub struct KdTree<'a> {
    dim: usize,
    coords: &'a [f64],
    idx: Vec<usize>,
    min_rank: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Candidate {
    d2: f64,
    i: usize,
}

impl<'a> KdTree<'a> {
    pub fn new(dim: usize, coords: &'a [f64]) -> Self {
        Self::with_ranks(dim, coords, None)
    }

    /// Tree whose points carry ranks (e.g. arrival order) for
    /// [`nearest_earlier`](Self::nearest_earlier).
    pub fn with_ranks(dim: usize, coords: &'a [f64], ranks: Option<&[usize]>) -> Self {
        let n = coords.len() / dim;
        let mut tree = KdTree { dim, coords, idx: (0..n).collect(), min_rank: vec![0; n] };
        tree.build(0, n, 0);
        if let Some(r) = ranks {
            tree.fill_ranks(0, n, r);
        }
        tree
    }

    #[inline]
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, lo: usize, hi: usize, depth: usize) {
        if hi - lo <= 1 {
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = depth % self.dim;
        let (dim, coords) = (self.dim, self.coords);
        self.idx[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        self.build(lo, mid, depth + 1);
        self.build(mid + 1, hi, depth + 1);
    }

    fn fill_ranks(&mut self, lo: usize, hi: usize, ranks: &[usize]) -> usize {
        if lo >= hi {
            return usize::MAX;
        }
        let mid = (lo + hi) / 2;
        let left = self.fill_ranks(lo, mid, ranks);
        let right = self.fill_ranks(mid + 1, hi, ranks);
        let m = ranks[self.idx[mid]].min(left).min(right);
        self.min_rank[mid] = m;
        m
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    /// All points with `|p - q| <= r`.
    pub fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_rec(0, self.len(), 0, q, r * r, &mut out);
        out
    }

    fn within_rec(&self, lo: usize, hi: usize, depth: usize, q: &[f64], r2: f64, out: &mut Vec<usize>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let i = self.idx[mid];
        let p = self.point(i);
        if distance2(p, q) <= r2 {
            out.push(i);
        }
        let axis = depth % self.dim;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.within_rec(near.0, near.1, depth + 1, q, r2, out);
        if diff * diff <= r2 {
            self.within_rec(far.0, far.1, depth + 1, q, r2, out);
        }
    }

    /// The `k` nearest points to `q` (excluding `exclude`), ordered by
    /// distance with lexicographic tie-break on coordinates.
    pub fn k_nearest(&self, q: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        let mut best: Vec<Candidate> = Vec::with_capacity(k + 1);
        self.knn_rec(0, self.len(), 0, q, k, exclude, usize::MAX, None, &mut best);
        best.into_iter().map(|c| c.i).collect()
    }

    /// Nearest point whose rank is below `limit`, lexicographic tie-break.
    pub fn nearest_earlier(&self, q: &[f64], limit: usize, ranks: &[usize]) -> Option<usize> {
        let mut best: Vec<Candidate> = Vec::with_capacity(2);
        self.knn_rec(0, self.len(), 0, q, 1, None, limit, Some(ranks), &mut best);
        best.first().map(|c| c.i)
    }

    fn better(&self, a: &Candidate, b: &Candidate) -> bool {
        match a.d2.total_cmp(&b.d2) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => lex_cmp(self.point(a.i), self.point(b.i)) == Ordering::Less,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn knn_rec(
        &self,
        lo: usize,
        hi: usize,
        depth: usize,
        q: &[f64],
        k: usize,
        exclude: Option<usize>,
        limit: usize,
        ranks: Option<&[usize]>,
        best: &mut Vec<Candidate>,
    ) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        if ranks.is_some() && self.min_rank[mid] >= limit {
            return;
        }
        let i = self.idx[mid];
        let p = self.point(i);
        let eligible = Some(i) != exclude && ranks.is_none_or(|r| r[i] < limit);
        if eligible {
            let c = Candidate { d2: distance2(p, q), i };
            if best.len() < k || self.better(&c, &best[best.len() - 1]) {
                let pos = best.iter().position(|b| self.better(&c, b)).unwrap_or(best.len());
                best.insert(pos, c);
                best.truncate(k);
            }
        }
        let axis = depth % self.dim;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.knn_rec(near.0, near.1, depth + 1, q, k, exclude, limit, ranks, best);
        // ties on the splitting plane may still hold a lexicographically smaller point
        if best.len() < k || diff * diff <= best[best.len() - 1].d2 {
            self.knn_rec(far.0, far.1, depth + 1, q, k, exclude, limit, ranks, best);
        }
    }
}
