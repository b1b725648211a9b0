//! Douglas-Rachford runs for an arbitrary finite set `B`.
//!
//! Every iterate after the first lies on one of the lines `b + ℝu`, with
//! `x_n = ⟨x_{n-1},u⟩u + b_{k(n)}`. Slim traces rely on this: they keep only
//! `(n, k(n), ⟨x_n,u⟩)` and rebuild points on demand.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dr_step, project_hyperplane, FiniteSet, Hyperplane, Vector, FLOAT_TOL};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigurationKind {
    /// `B` lies in one closed halfspace of `A`.
    HalfspaceContained,
    /// `⟨b_1,u⟩ < 0 < ⟨b_m,u⟩`.
    Straddling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: ConfigurationKind,
    /// `A ∩ B ≠ ∅`.
    pub intersects: bool,
}

impl Classification {
    pub fn straddling_disjoint(&self) -> bool {
        self.kind == ConfigurationKind::Straddling && !self.intersects
    }
}

pub fn classify(a: &Hyperplane, b: &FiniteSet) -> Classification {
    let inners = b.inners();
    let first = &inners[0];
    let last = &inners[inners.len() - 1];
    let kind = if first.is_negative() && last.is_positive() {
        ConfigurationKind::Straddling
    } else {
        ConfigurationKind::HalfspaceContained
    };
    Classification {
        kind,
        intersects: b.points().iter().any(|p| a.contains(p)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub n: u64,
    /// Absent in slim traces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vector>,
    /// `k(n)`, 1-based; undefined for `n = 0`.
    pub selector_k: Option<usize>,
    /// `⟨x_n,u⟩`.
    pub inner: Scalar,
    /// Per-point usage counts `l_{i,n}`.
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    FixedPointReached { at: u64 },
    HorizonReached,
    DivergenceDetected { at: u64, shadow_limit: Vector },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunResult {
    pub x0: Vector,
    pub trace: Vec<TraceRecord>,
    pub outcome: Outcome,
    /// `P_A x_n`; empty for slim traces.
    pub shadow: Vec<Vector>,
}

impl RunResult {
    /// `x_n`, rebuilt from the selector and the previous inner product when
    /// the trace is slim.
    pub fn point(&self, n: usize, a: &Hyperplane, b: &FiniteSet) -> Vector {
        if n == 0 {
            return self.x0.clone();
        }
        let rec = &self.trace[n];
        if let Some(x) = &rec.x {
            return x.clone();
        }
        let k = rec.selector_k.expect("selector defined for n >= 1");
        b.point(k).add_scaled(&self.trace[n - 1].inner, a.normal())
    }

    pub fn points(&self, a: &Hyperplane, b: &FiniteSet) -> Vec<Vector> {
        (0..self.trace.len()).map(|n| self.point(n, a, b)).collect()
    }

    pub fn last(&self) -> &TraceRecord {
        self.trace.last().expect("trace is never empty")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_n: u64,
    /// Store only `(n, k, inner, counts)` per record.
    pub slim: bool,
    /// Consecutive monotone steps of `⟨x_n,u⟩` that trigger divergence in the
    /// halfspace-contained disjoint case.
    pub divergence_window: u64,
}

pub const DEFAULT_HORIZON: u64 = 1_000_000;

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_n: DEFAULT_HORIZON,
            slim: false,
            divergence_window: 1000,
        }
    }
}

impl RunOptions {
    pub fn horizon(max_n: u64) -> Self {
        RunOptions {
            max_n,
            ..RunOptions::default()
        }
    }
}

/// Runs `x_{n+1} = T x_n` for at most `max_n` steps.
pub fn iterate(a: &Hyperplane, b: &FiniteSet, x0: &Vector, max_n: u64) -> Result<RunResult> {
    iterate_with(a, b, x0, &RunOptions::horizon(max_n))
}

pub fn iterate_with(a: &Hyperplane, b: &FiniteSet, x0: &Vector, opts: &RunOptions) -> Result<RunResult> {
    if opts.max_n < 1 {
        return Err(Error::Precondition("max_n must be at least 1".into()));
    }
    a.check(x0)?;
    let classification = classify(a, b);
    let watch_divergence =
        classification.kind == ConfigurationKind::HalfspaceContained && !classification.intersects;

    let mut counts = vec![0u64; b.len()];
    let mut trace = vec![TraceRecord {
        n: 0,
        x: (!opts.slim).then(|| x0.clone()),
        selector_k: None,
        inner: a.inner(x0),
        counts: counts.clone(),
    }];
    let mut shadow = Vec::new();
    if !opts.slim {
        shadow.push(project_hyperplane(a, x0)?);
    }

    let mut x = x0.clone();
    let mut outcome = Outcome::HorizonReached;
    let mut run_dir = Ordering::Equal;
    let mut run_len = 0u64;
    for n in 1..=opts.max_n {
        let step = dr_step(a, b, &x)?;
        if step.next.same_point(&x, FLOAT_TOL) {
            outcome = Outcome::FixedPointReached { at: n - 1 };
            break;
        }
        counts[step.selector - 1] += 1;
        let inner = a.inner(&step.next);
        let dir = inner
            .try_cmp(&trace[trace.len() - 1].inner)
            .unwrap_or(Ordering::Equal);
        if dir != Ordering::Equal && dir == run_dir {
            run_len += 1;
        } else {
            run_dir = dir;
            run_len = u64::from(dir != Ordering::Equal);
        }
        x = step.next;
        if !opts.slim {
            shadow.push(project_hyperplane(a, &x)?);
        }
        trace.push(TraceRecord {
            n,
            x: (!opts.slim).then(|| x.clone()),
            selector_k: Some(step.selector),
            inner,
            counts: counts.clone(),
        });
        if watch_divergence && run_len >= opts.divergence_window {
            outcome = Outcome::DivergenceDetected {
                at: n,
                shadow_limit: project_hyperplane(a, &x)?,
            };
            break;
        }
    }
    Ok(RunResult {
        x0: x0.clone(),
        trace,
        outcome,
        shadow,
    })
}

/// Squared step lengths `‖x_{n+1} - x_n‖²` along the trace.
pub fn step_gaps_sq(result: &RunResult, a: &Hyperplane, b: &FiniteSet) -> Vec<Scalar> {
    let pts = result.points(a, b);
    pts.windows(2).map(|w| w[1].sub(&w[0]).norm_sq()).collect()
}

/// Checks `‖x_n - x_{n+1}‖ ≥ min_i d_A(b_i)` at every step.
///
/// Only meaningful when `B` straddles `A` and misses it.
pub fn check_step_gap(result: &RunResult, a: &Hyperplane, b: &FiniteSet) -> Result<bool> {
    if !classify(a, b).straddling_disjoint() {
        return Err(Error::Precondition(
            "bound only asserted for straddling, disjoint case".into(),
        ));
    }
    let bound = b
        .inners()
        .iter()
        .map(Scalar::abs)
        .reduce(|m, d| if d < m { d } else { m })
        .expect("B is nonempty");
    let bound_sq = &bound * &bound;
    Ok(step_gaps_sq(result, a, b).iter().all(|g| match g {
        Scalar::Float(g) => g.sqrt() >= bound.to_f64() - FLOAT_TOL,
        g => g >= &bound_sq,
    }))
}

/// If the run stopped at a fixed point `x`, returns `(x, P_A x)`; the shadow
/// must then be a point of `A ∩ B`.
pub fn detect_finite_convergence(
    result: &RunResult,
    a: &Hyperplane,
    b: &FiniteSet,
) -> Result<Option<(Vector, Vector)>> {
    let Outcome::FixedPointReached { at } = result.outcome else {
        return Ok(None);
    };
    let x = result.point(at as usize, a, b);
    let feasible = project_hyperplane(a, &x)?;
    if !b.contains(&feasible) {
        return Err(Error::InvariantViolated(format!(
            "fixed point {x} has shadow {feasible} outside B"
        )));
    }
    Ok(Some((x, feasible)))
}
