use super::Graph;
use crate::error::{Error, Result};
use crate::point_process::{marks_distinct, PointConfiguration};
use crate::spatial::KdTree;

/// Arrival rank of every point when ordered by increasing mark.
pub(crate) fn mark_ranks(marks: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..marks.len()).collect();
    order.sort_by(|&a, &b| marks[a].total_cmp(&marks[b]));
    let mut rank = vec![0; marks.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// On-line nearest-neighbour graph: points arrive in order of increasing
/// mark and each joins its nearest predecessor.
pub fn build_online_nng(points: &PointConfiguration, marks: &[f64]) -> Result<Graph> {
    if points.len() != marks.len() {
        return Err(Error::input("one mark per point required"));
    }
    if !marks_distinct(marks) {
        return Err(Error::input("on-line NNG requires pairwise distinct marks"));
    }
    let rank = mark_ranks(marks);
    let tree = KdTree::with_ranks(points.dim(), points.coords(), Some(&rank));
    let pairs = (0..points.len()).filter(|&i| rank[i] > 0).map(|i| {
        let j = tree.nearest_earlier(points.point(i), rank[i], &rank).expect("earlier point exists");
        (i, j)
    });
    Ok(Graph::from_pairs(points, pairs.collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{distance, Region};
    use crate::point_process::{attach_marks, sample_poisson};

    #[test]
    fn spec_examples() {
        let one = PointConfiguration::from_points(2, &[[0.3, 0.3]]).unwrap();
        assert!(build_online_nng(&one, &[0.5]).unwrap().edges().is_empty());
        let p = PointConfiguration::from_points(2, &[[0.0, 0.0], [3.0, 0.0], [1.0, 0.0]]).unwrap();
        let g = build_online_nng(&p, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(g.edges().iter().map(|e| e.key()).collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert!(build_online_nng(&p, &[0.1, 0.1, 0.3]).is_err());
    }

    #[test]
    fn tree_and_matches_scan() {
        for seed in 0..50u64 {
            let m = attach_marks(sample_poisson(1.0, &Region::centered_cube(2, 5.0).unwrap(), seed).unwrap(), seed);
            let (p, marks) = (m.points(), m.marks());
            let g = build_online_nng(p, marks).unwrap();
            assert!(g.is_tree());
            for i in 0..p.len() {
                let best = (0..p.len())
                    .filter(|&j| marks[j] < marks[i])
                    .min_by(|&a, &b| distance(p.point(a), p.point(i)).total_cmp(&distance(p.point(b), p.point(i))));
                if let Some(j) = best {
                    assert!(g.has_edge(i, j));
                }
            }
        }
    }

    #[test]
    fn deleting_last_arrival_removes_one_edge() {
        for seed in 0..50u64 {
            let m = attach_marks(sample_poisson(1.0, &Region::centered_cube(2, 4.0).unwrap(), seed).unwrap(), seed);
            let (p, marks) = (m.points(), m.marks());
            if p.len() < 2 {
                continue;
            }
            let g = build_online_nng(p, marks).unwrap();
            let last = (0..p.len()).max_by(|&a, &b| marks[a].total_cmp(&marks[b])).unwrap();
            let keep: Vec<usize> = (0..p.len()).filter(|&i| i != last).collect();
            let kept_marks: Vec<f64> = keep.iter().map(|&i| marks[i]).collect();
            let h = build_online_nng(&p.select(&keep), &kept_marks).unwrap();
            let expect: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .filter(|e| !e.touches(last))
                .map(|e| {
                    let f = |x: usize| if x > last { x - 1 } else { x };
                    (f(e.u), f(e.v))
                })
                .collect();
            assert_eq!(g.degree(last), 1);
            assert_eq!(h.edges().iter().map(|e| e.key()).collect::<Vec<_>>(), expect);
        }
    }
}
