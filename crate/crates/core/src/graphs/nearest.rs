use super::Graph;
use crate::error::{Error, Result};
use crate::geometry::distance;
use crate::point_process::PointConfiguration;
use crate::spatial::KdTree;

/// k-nearest-neighbour graph: `{x, y}` is an edge iff either point is among
/// the other's `k` nearest.
pub fn build_knng(points: &PointConfiguration, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::param("k-NNG requires k >= 1"));
    }
    let n = points.len();
    if n <= k + 1 {
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        return Ok(Graph::from_pairs(points, pairs));
    }
    let tree = KdTree::new(points.dim(), points.coords());
    let mut pairs = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in tree.k_nearest(points.point(i), k, Some(i)) {
            pairs.push((i, j));
        }
    }
    Ok(Graph::from_pairs(points, pairs))
}

/// Nearest-neighbour distance of every point.
pub(crate) fn nn_distances(points: &PointConfiguration, tree: &KdTree<'_>) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            let p = points.point(i);
            tree.k_nearest(p, 1, Some(i)).first().map_or(f64::INFINITY, |&j| distance(p, points.point(j)))
        })
        .collect()
}

/// Sphere of influence graph with closed balls of nearest-neighbour radius.
pub fn build_sig(points: &PointConfiguration) -> Result<Graph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::param("sphere of influence graph needs at least two points"));
    }
    let tree = KdTree::new(points.dim(), points.coords());
    let radius = nn_distances(points, &tree);
    let r_max = radius.iter().cloned().fold(0.0, f64::max);
    let mut pairs = Vec::new();
    for i in 0..n {
        let p = points.point(i);
        // pad the search so that rounding never drops a qualifying pair
        for j in tree.within(p, (radius[i] + r_max) * (1.0 + 1e-12)) {
            if j > i && distance(p, points.point(j)) <= radius[i] + radius[j] {
                pairs.push((i, j));
            }
        }
    }
    Ok(Graph::from_pairs(points, pairs))
}
