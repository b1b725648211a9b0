//! Method of alternating projections: `x_0, P_A x_0, P_B P_A x_0, ...`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{project_finite_set, project_hyperplane, FiniteSet, Hyperplane, Vector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApTrace {
    /// `points[0] = x_0`; odd indices are `P_A` outputs, even indices from 2
    /// on are `P_B` outputs.
    pub points: Vec<Vector>,
    /// Index `k` of the chosen point of `B` for each `P_B` entry, aligned
    /// with `points` (`None` elsewhere).
    pub selectors: Vec<Option<usize>>,
}

impl ApTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Applies `steps` single projections, alternating `P_A` and `P_B`.
pub fn ap_iterate(a: &Hyperplane, b: &FiniteSet, x0: &Vector, steps: u64) -> Result<ApTrace> {
    if steps < 1 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    a.check(x0)?;
    let mut points = Vec::with_capacity(steps as usize + 1);
    let mut selectors = Vec::with_capacity(steps as usize + 1);
    points.push(x0.clone());
    selectors.push(None);
    let mut x = x0.clone();
    for i in 1..=steps {
        if i % 2 == 1 {
            x = project_hyperplane(a, &x)?;
            selectors.push(None);
        } else {
            let (p, k) = project_finite_set(b, &x)?;
            x = p;
            selectors.push(Some(k));
        }
        points.push(x.clone());
    }
    Ok(ApTrace { points, selectors })
}
