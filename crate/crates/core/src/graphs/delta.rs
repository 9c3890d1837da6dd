use serde::{Deserialize, Serialize};

use super::{Edge, GraphBuilder};
use crate::error::{Error, Result};
use crate::point_process::PointConfiguration;

/// Edges gained and lost when a point is inserted.
///
/// Indices refer to the augmented configuration, in which the inserted point
/// sits at index `inserted` (one past the original points).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDelta {
    pub inserted: usize,
    pub added: Vec<Edge>,
    pub removed: Vec<Edge>,
}

impl EdgeDelta {
    pub fn longest_added(&self) -> f64 {
        self.added.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn longest_removed(&self) -> f64 {
        self.removed.iter().map(|e| e.length).fold(0.0, f64::max)
    }
}

/// Insert `x` (with `x_mark` for marked builders) and diff the edge sets.
pub fn edge_delta(
    builder: &GraphBuilder,
    points: &PointConfiguration,
    marks: Option<&[f64]>,
    x: &[f64],
    x_mark: Option<f64>,
) -> Result<EdgeDelta> {
    if points.iter().any(|p| p == x) {
        return Err(Error::input("inserted point duplicates an existing point"));
    }
    let augmented = points.with_point(x)?;
    let aug_marks = match (builder.needs_marks(), marks, x_mark) {
        (false, _, _) => None,
        (true, Some(m), Some(t)) => {
            let mut v = m.to_vec();
            v.push(t);
            Some(v)
        }
        _ => return Err(Error::input("marked builder requires marks for all points and the inserted point")),
    };
    let before = builder.build(points, marks)?;
    let after = builder.build(&augmented, aug_marks.as_deref())?;
    let added = after.edges().iter().filter(|e| !before.has_edge(e.u, e.v)).copied().collect();
    let removed = before.edges().iter().filter(|e| !after.has_edge(e.u, e.v)).copied().collect();
    Ok(EdgeDelta { inserted: points.len(), added, removed })
}
