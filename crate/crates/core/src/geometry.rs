//! Projectors and reflectors for a hyperplane `A = {u}^⊥` and a finite set
//! `B`, plus the Douglas-Rachford step `T = Id - P_A + P_B R_A`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Backend, Scalar};

/// Absolute tolerance used by the float backend wherever an exact backend
/// would test equality.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<Scalar>);

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        let first = coords.first().ok_or(Error::EmptyVector)?.backend();
        for c in &coords[1..] {
            if c.backend() != first {
                return Err(crate::error::ScalarError::BackendMismatch(
                    first.to_string(),
                    c.backend().to_string(),
                )
                .into());
            }
        }
        Ok(Vector(coords))
    }

    pub fn ints(backend: Backend, coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| backend.int(c)).collect())
    }

    pub fn zeros(backend: Backend, dim: usize) -> Self {
        Vector(vec![backend.zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn backend(&self) -> Backend {
        self.0[0].backend()
    }

    pub fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Inner product; dimensions must agree (callers validate first).
    pub fn dot(&self, other: &Vector) -> Scalar {
        let mut acc = &self.0[0] * &other.0[0];
        for (x, y) in self.0.iter().zip(&other.0).skip(1) {
            acc = acc + x * y;
        }
        acc
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s·dir`.
    pub fn add_scaled(&self, s: &Scalar, dir: &Vector) -> Vector {
        Vector(self.0.iter().zip(&dir.0).map(|(x, d)| x + s * d).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }

    pub fn convert(&self, to: Backend) -> Result<Vector> {
        Ok(Vector(
            self.0
                .iter()
                .map(|c| c.convert(to))
                .collect::<std::result::Result<_, _>>()?,
        ))
    }

    /// Exact equality on exact backends; max-norm within `tol` on floats.
    pub fn same_point(&self, other: &Vector, tol: f64) -> bool {
        if self.backend().is_exact() {
            return self == other;
        }
        self.0
            .iter()
            .zip(&other.0)
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= tol)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(Scalar::to_json).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The hyperplane `{u}^⊥` through the origin.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    normal: Vector,
    normal_norm_sq: Scalar,
}

impl Hyperplane {
    /// On floats the normal is normalized. Exact backends need `⟨u,u⟩ = 1`
    /// exactly, since normalizing would leave the field.
    pub fn new(normal: Vector) -> Result<Self> {
        let norm_sq = normal.norm_sq();
        if norm_sq.is_zero() {
            return Err(Error::InvalidProblem("hyperplane normal is zero".into()));
        }
        let backend = normal.backend();
        if backend.is_exact() {
            if norm_sq != backend.one() {
                return Err(Error::InvalidProblem(format!(
                    "exact backends require a unit normal, got ⟨u,u⟩ = {norm_sq}"
                )));
            }
            return Ok(Hyperplane {
                normal,
                normal_norm_sq: norm_sq,
            });
        }
        let len = Scalar::float(norm_sq.to_f64().sqrt())?;
        let unit = Vector(normal.0.iter().map(|c| c / &len).collect());
        let normal_norm_sq = unit.norm_sq();
        Ok(Hyperplane {
            normal: unit,
            normal_norm_sq,
        })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn normal_norm_sq(&self) -> &Scalar {
        &self.normal_norm_sq
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn backend(&self) -> Backend {
        self.normal.backend()
    }

    pub fn check(&self, x: &Vector) -> Result<()> {
        self.normal.check_dim(x)?;
        if x.backend() != self.backend() {
            return Err(crate::error::ScalarError::BackendMismatch(
                self.backend().to_string(),
                x.backend().to_string(),
            )
            .into());
        }
        Ok(())
    }

    /// `⟨x,u⟩`.
    pub fn inner(&self, x: &Vector) -> Scalar {
        x.dot(&self.normal)
    }

    /// `⟨x,u⟩ = 0`, exactly or within `FLOAT_TOL`.
    pub fn contains(&self, x: &Vector) -> bool {
        let s = self.inner(x);
        match s {
            Scalar::Float(v) => v.abs() <= FLOAT_TOL,
            _ => s.is_zero(),
        }
    }
}

/// `P_A x = x - ⟨x,u⟩u`.
pub fn project_hyperplane(a: &Hyperplane, x: &Vector) -> Result<Vector> {
    a.check(x)?;
    Ok(x.add_scaled(&-a.inner(x), &a.normal))
}

/// `R_A x = x - 2⟨x,u⟩u`.
pub fn reflect_hyperplane(a: &Hyperplane, x: &Vector) -> Result<Vector> {
    a.check(x)?;
    let two = a.backend().int(2);
    Ok(x.add_scaled(&-(two * a.inner(x)), &a.normal))
}

/// `d_A(x) = |⟨x,u⟩|`.
pub fn dist_hyperplane(a: &Hyperplane, x: &Vector) -> Result<Scalar> {
    a.check(x)?;
    Ok(a.inner(x).abs())
}

/// How to choose among several nearest points of `B`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Largest `⟨b,u⟩`, then lowest index.
    #[default]
    #[serde(rename = "higher_inner")]
    PreferHigherInner,
    /// Smallest `⟨b,u⟩`, then lowest index.
    #[serde(rename = "lower_inner")]
    PreferLowerInner,
    #[serde(rename = "lowest_index")]
    PreferLowestIndex,
}

impl std::str::FromStr for TiePolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "higher_inner" => Ok(TiePolicy::PreferHigherInner),
            "lower_inner" => Ok(TiePolicy::PreferLowerInner),
            "lowest_index" => Ok(TiePolicy::PreferLowestIndex),
            other => Err(format!(
                "unknown tie policy {other:?} (expected higher_inner, lower_inner or lowest_index)"
            )),
        }
    }
}

/// Pairwise distinct points `b_1..b_m`, kept sorted by `⟨b,u⟩` ascending.
#[derive(Clone, Debug)]
pub struct FiniteSet {
    points: Vec<Vector>,
    inners: Vec<Scalar>,
    tie_policy: TiePolicy,
}

impl FiniteSet {
    /// Sorts `points` by `⟨b,u⟩` (stable, so equal inners keep input order).
    pub fn new(a: &Hyperplane, points: Vec<Vector>, tie_policy: TiePolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidProblem("B must contain at least one point".into()));
        }
        for p in &points {
            a.check(p)?;
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let diff = points[i].sub(&points[j]);
                let coincide = match diff.norm_sq() {
                    Scalar::Float(d) => d.sqrt() <= FLOAT_TOL,
                    s => s.is_zero(),
                };
                if coincide {
                    return Err(Error::InvalidProblem(format!(
                        "points of B must be pairwise distinct, {} repeats",
                        points[i]
                    )));
                }
            }
        }
        let mut keyed: Vec<(Scalar, Vector)> =
            points.into_iter().map(|p| (a.inner(&p), p)).collect();
        keyed.sort_by(|x, y| x.0.try_cmp(&y.0).unwrap_or(Ordering::Equal));
        let (inners, points) = keyed.into_iter().unzip();
        Ok(FiniteSet {
            points,
            inners,
            tie_policy,
        })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// `⟨b_i,u⟩` for every point, same order as `points`.
    pub fn inners(&self) -> &[Scalar] {
        &self.inners
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// 1-based access, matching the selector convention.
    pub fn point(&self, k: usize) -> &Vector {
        &self.points[k - 1]
    }

    pub fn inner(&self, k: usize) -> &Scalar {
        &self.inners[k - 1]
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn with_tie_policy(mut self, tie_policy: TiePolicy) -> Self {
        self.tie_policy = tie_policy;
        self
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.points.iter().any(|b| b.same_point(x, FLOAT_TOL))
    }
}

/// Nearest point of `B` to `x` and its 1-based index.
pub fn project_finite_set(b: &FiniteSet, x: &Vector) -> Result<(Vector, usize)> {
    b.points[0].check_dim(x)?;
    let k = nearest_index(b, x)?;
    Ok((b.point(k).clone(), k))
}

fn nearest_index(b: &FiniteSet, x: &Vector) -> Result<usize> {
    let dists: Vec<Scalar> = b.points.iter().map(|p| p.sub(x).norm_sq()).collect();
    let mut best = 0;
    for i in 1..dists.len() {
        if dists[i].try_cmp(&dists[best])? == Ordering::Less {
            best = i;
        }
    }
    // Minimizers, ascending index; floats tie within a relative tolerance.
    let minimizers: Vec<usize> = match &dists[best] {
        Scalar::Float(m) => {
            let tol = FLOAT_TOL * m.abs().max(1.0);
            (0..dists.len())
                .filter(|&i| dists[i].to_f64() - m <= tol)
                .collect()
        }
        m => (0..dists.len()).filter(|&i| &dists[i] == m).collect(),
    };
    let pick = match b.tie_policy {
        TiePolicy::PreferLowestIndex => minimizers[0],
        TiePolicy::PreferLowerInner => pick_by_inner(b, &minimizers, Ordering::Less),
        TiePolicy::PreferHigherInner => pick_by_inner(b, &minimizers, Ordering::Greater),
    };
    Ok(pick + 1)
}

fn pick_by_inner(b: &FiniteSet, candidates: &[usize], want: Ordering) -> usize {
    let mut pick = candidates[0];
    for &i in &candidates[1..] {
        if b.inners[i].try_cmp(&b.inners[pick]).ok() == Some(want) {
            pick = i;
        }
    }
    pick
}

/// Result of one Douglas-Rachford step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub next: Vector,
    /// 1-based index `k` with `b_k = next - x + P_A x`.
    pub selector: usize,
}

/// `x ↦ x - P_A x + P_B(R_A x)`.
pub fn dr_step(a: &Hyperplane, b: &FiniteSet, x: &Vector) -> Result<Step> {
    a.check(x)?;
    let s = a.inner(x);
    let two = a.backend().int(2);
    let reflected = x.add_scaled(&-(&two * &s), &a.normal);
    let k = nearest_index(b, &reflected)?;
    // x - P_A x = ⟨x,u⟩u
    let next = b.point(k).add_scaled(&s, &a.normal);
    Ok(Step { next, selector: k })
}
