//! Doubleton case `B = {b_1, b_2}` with `⟨b_1,u⟩ < 0 < ⟨b_2,u⟩`.
//!
//! The DR sequence is eventually periodic for every start exactly when
//! `d_A(b_1)/d_A(b_2)` is rational. On exact backends the ratio test is a
//! field computation, and cycles are found by exact state recurrence.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dynamics::RunResult;
use crate::error::{Error, Result};
use crate::geometry::{dr_step, project_hyperplane, Vector, FLOAT_TOL};
use crate::problem::Problem;
use crate::scalar::{heuristic_rational, Backend, Scalar};

/// Horizon used by the randomized property checks.
pub const PROPERTY_HORIZON: u64 = 100_000;

/// Relative tolerance for float recurrence.
pub const FLOAT_RECURRENCE_TOL: f64 = 1e-9;

/// A validated two-point problem whose points straddle the hyperplane.
#[derive(Clone, Debug)]
pub struct DoubletonProblem {
    problem: Problem,
}

impl DoubletonProblem {
    pub fn new(problem: Problem) -> Result<Self> {
        if problem.set.len() != 2 {
            return Err(Error::InvalidProblem(format!(
                "cycling analysis requires a doubleton, got {} points",
                problem.set.len()
            )));
        }
        let (b1, b2) = (problem.set.inner(1), problem.set.inner(2));
        let straddles = match (b1, b2) {
            (Scalar::Float(x), Scalar::Float(y)) => *x < -FLOAT_TOL && *y > FLOAT_TOL,
            _ => b1.is_negative() && b2.is_positive(),
        };
        if !straddles {
            return Err(Error::InvalidProblem(
                "doubleton must satisfy ⟨b_1,u⟩ < 0 < ⟨b_2,u⟩".into(),
            ));
        }
        Ok(DoubletonProblem { problem })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn backend(&self) -> Backend {
        self.problem.backend()
    }

    pub fn b1(&self) -> &Vector {
        self.problem.set.point(1)
    }

    pub fn b2(&self) -> &Vector {
        self.problem.set.point(2)
    }

    pub fn x0(&self) -> &Vector {
        &self.problem.x0
    }

    /// `β_1 = ⟨b_1,u⟩`.
    pub fn beta1(&self) -> &Scalar {
        self.problem.set.inner(1)
    }

    /// `β_2 = ⟨b_2,u⟩`.
    pub fn beta2(&self) -> &Scalar {
        self.problem.set.inner(2)
    }

    /// `d_A(b_1) / d_A(b_2) = -β_1 / β_2`.
    pub fn distance_ratio(&self) -> Scalar {
        -self.beta1() / self.beta2()
    }

    pub fn with_x0(&self, x0: Vector) -> Result<Self> {
        Ok(DoubletonProblem {
            problem: self.problem.with_x0(x0)?,
        })
    }
}

/// True iff `d_A(b_1)/d_A(b_2)` is rational. Exact backends only.
pub fn rationality_predicate(p: &DoubletonProblem) -> Result<bool> {
    Ok(p.distance_ratio().is_rational()?)
}

/// Continued-fraction guess `p/q` for the distance ratio on floats.
///
/// This is a heuristic: a float ratio is always rational, so a hit only says
/// the ratio is close to a fraction with denominator at most `max_den`.
pub fn heuristic_rationality(p: &DoubletonProblem, max_den: u64) -> Option<(i64, u64)> {
    heuristic_rational(p.distance_ratio().to_f64(), max_den)
}

/// Minimal coprime `(q_1, q_2)` with `q_1 d_A(b_1) = q_2 d_A(b_2)`, or `None`
/// when the distance ratio is irrational.
pub fn cycle_relation(p: &DoubletonProblem) -> Result<Option<(u64, u64)>> {
    let ratio = p.distance_ratio();
    if !ratio.is_rational()? {
        return Ok(None);
    }
    let q = ratio.as_rational().expect("rational checked above");
    // q_1 / q_2 = d_A(b_2) / d_A(b_1) = denom / numer
    let to_u64 = |x: &num_bigint::BigInt| {
        x.to_u64()
            .ok_or_else(|| Error::InvalidProblem(format!("relation coefficient {x} exceeds u64")))
    };
    Ok(Some((to_u64(&q.denom())?, to_u64(&q.numer())?)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CycleReport {
    /// `x_{n0+m} = x_{n0}` with `m` minimal; `states` are `x_{n0}..x_{n0+m-1}`.
    Cycle {
        preperiod: u64,
        period: u64,
        states: Vec<Vector>,
    },
    NoCycle { horizon: u64 },
}

impl CycleReport {
    pub fn is_cycle(&self) -> bool {
        matches!(self, CycleReport::Cycle { .. })
    }

    pub fn period(&self) -> Option<u64> {
        match self {
            CycleReport::Cycle { period, .. } => Some(*period),
            CycleReport::NoCycle { .. } => None,
        }
    }
}

/// Searches `x_0..x_horizon` for the first repeated state.
///
/// Exact backends key states exactly. Every `x_n` with `n ≥ 1` equals
/// `P_A b_k + ⟨x_n,u⟩u`, so a state is identified by which distinct shadow
/// `P_A b_k` (or `P_A x_0`) it sits over, plus its inner product.
/// Floats compare states within [`FLOAT_RECURRENCE_TOL`] relative; such
/// reports are approximate.
pub fn detect_cycle(p: &DoubletonProblem, horizon: u64) -> Result<CycleReport> {
    if horizon < 1 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    if p.backend().is_exact() {
        detect_exact(p, horizon)
    } else {
        detect_float(p, horizon)
    }
}

fn detect_exact(p: &DoubletonProblem, horizon: u64) -> Result<CycleReport> {
    let a = &p.problem.hyperplane;
    let b = &p.problem.set;
    let mut shadows: Vec<Vector> = Vec::with_capacity(3);
    let mut class_of = |v: &Vector| -> Result<u8> {
        let s = project_hyperplane(a, v)?;
        Ok(match shadows.iter().position(|t| t == &s) {
            Some(i) => i as u8,
            None => {
                shadows.push(s);
                (shadows.len() - 1) as u8
            }
        })
    };
    let classes = [class_of(b.point(1))?, class_of(b.point(2))?];
    let x0_class = class_of(p.x0())?;

    let mut seen: HashMap<(u8, Scalar), u64> = HashMap::new();
    let mut states = vec![p.x0().clone()];
    seen.insert((x0_class, a.inner(p.x0())), 0);
    let mut x = p.x0().clone();
    for n in 1..=horizon {
        let step = dr_step(a, b, &x)?;
        x = step.next;
        let key = (classes[step.selector - 1], a.inner(&x));
        if let Some(&n0) = seen.get(&key) {
            return Ok(cycle_from(states, n0, n - n0, |u, v| u == v));
        }
        seen.insert(key, n);
        states.push(x.clone());
    }
    Ok(CycleReport::NoCycle { horizon })
}

fn detect_float(p: &DoubletonProblem, horizon: u64) -> Result<CycleReport> {
    let a = &p.problem.hyperplane;
    let b = &p.problem.set;
    let scale = [p.beta1(), p.beta2(), &a.inner(p.x0())]
        .iter()
        .map(|s| s.to_f64().abs())
        .fold(1.0, f64::max);
    let tol = FLOAT_RECURRENCE_TOL * scale;
    let close = move |u: &Vector, v: &Vector| u.same_point(v, tol);
    let bucket = |x: &Vector| (a.inner(x).to_f64() / tol).floor() as i64;

    let mut buckets: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    let mut states = vec![p.x0().clone()];
    buckets.entry(bucket(p.x0())).or_default().push(0);
    let mut x = p.x0().clone();
    for n in 1..=horizon {
        x = dr_step(a, b, &x)?.next;
        let key = bucket(&x);
        let hit = buckets
            .range(key - 1..=key + 1)
            .flat_map(|(_, ns)| ns.iter().copied())
            .filter(|&m| close(&states[m as usize], &x))
            .min();
        if let Some(n0) = hit {
            return Ok(cycle_from(states, n0, n - n0, close));
        }
        buckets.entry(key).or_default().push(n);
        states.push(x.clone());
    }
    Ok(CycleReport::NoCycle { horizon })
}

/// Builds the report from a first recurrence `x_{n0} = x_{n0+m}`, shrinking
/// `m` to the smallest divisor that is still a period of the cycle.
fn cycle_from(
    states: Vec<Vector>,
    n0: u64,
    first_period: u64,
    same: impl Fn(&Vector, &Vector) -> bool,
) -> CycleReport {
    let start = n0 as usize;
    let cycle = &states[start..start + first_period as usize];
    let period = (1..=first_period)
        .filter(|d| first_period % d == 0)
        .find(|&d| {
            let d = d as usize;
            (0..cycle.len()).all(|i| same(&cycle[i], &cycle[(i + d) % cycle.len()]))
        })
        .unwrap_or(first_period);
    CycleReport::Cycle {
        preperiod: n0,
        period,
        states: cycle[..period as usize].to_vec(),
    }
}

/// Theoretical limits of `l_{1,n}/n` and `l_{2,n}/n` and the observed
/// deviation `|l_{1,N}/N - limit1|` at the final index `N` of the trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientLimits {
    pub limit1: Scalar,
    pub limit2: Scalar,
    pub deviation: Scalar,
}

pub fn coefficient_limits(p: &DoubletonProblem, trace: &RunResult) -> Result<CoefficientLimits> {
    if trace.trace.len() < 2 {
        return Err(Error::Precondition("trace must contain at least two records".into()));
    }
    let (b1, b2) = (p.beta1(), p.beta2());
    let spread = b2 - b1;
    let limit1 = b2 / &spread;
    let limit2 = -b1 / &spread;
    let last = trace.last();
    let backend = p.backend();
    let observed = backend.int(last.counts[0] as i64) / backend.int(last.n as i64);
    let deviation = (&observed - &limit1).abs();
    Ok(CoefficientLimits {
        limit1,
        limit2,
        deviation,
    })
}

/// `Σ ⟨b_{k(n)},u⟩` over one traversal of a reported cycle.
pub fn cycle_inner_sum(p: &DoubletonProblem, states: &[Vector]) -> Result<Scalar> {
    let a = &p.problem.hyperplane;
    let b = &p.problem.set;
    let mut sum = p.backend().zero();
    for x in states {
        let k = dr_step(a, b, x)?.selector;
        sum = sum + b.inner(k);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::iterate;
    use crate::geometry::TiePolicy;

    const Q: Backend = Backend::Rational;

    fn line(b1: i64, b2: i64) -> DoubletonProblem {
        DoubletonProblem::new(Problem::on_line(Q, &[b1, b2], 0).unwrap()).unwrap()
    }

    fn sqrt2_problem() -> DoubletonProblem {
        let s = Backend::Surd(2);
        let p = Problem::new(
            Vector::ints(s, &[1]),
            vec![Vector::ints(s, &[-1]), Vector::new(vec![s.sqrt_d().unwrap()]).unwrap()],
            Vector::ints(s, &[0]),
            TiePolicy::default(),
        )
        .unwrap();
        DoubletonProblem::new(p).unwrap()
    }

    #[test]
    fn rejects_non_straddling() {
        assert!(DoubletonProblem::new(Problem::on_line(Q, &[1, 2], 0).unwrap()).is_err());
        assert!(DoubletonProblem::new(Problem::on_line(Q, &[0, 2], 0).unwrap()).is_err());
        assert!(DoubletonProblem::new(Problem::on_line(Q, &[-1, 1, 2], 0).unwrap()).is_err());
    }

    #[test]
    fn rationality() {
        assert!(rationality_predicate(&line(-1, 2)).unwrap());
        assert!(!rationality_predicate(&sqrt2_problem()).unwrap());
        assert!(rationality_predicate(&line(-7, 7)).unwrap());
        let f = DoubletonProblem::new(Problem::on_line(Backend::F64, &[-1, 2], 0).unwrap()).unwrap();
        assert!(rationality_predicate(&f).is_err());
        assert_eq!(heuristic_rationality(&f, 1_000_000), Some((1, 2)));
    }

    #[test]
    fn relations() {
        assert_eq!(cycle_relation(&line(-1, 2)).unwrap(), Some((2, 1)));
        assert_eq!(cycle_relation(&line(-3, 3)).unwrap(), Some((1, 1)));
        assert_eq!(cycle_relation(&line(-4, 6)).unwrap(), Some((3, 2)));
        assert_eq!(cycle_relation(&sqrt2_problem()).unwrap(), None);
    }

    #[test]
    fn periodic_example_cycle() {
        let report = detect_cycle(&line(-1, 2), 100).unwrap();
        assert_eq!(
            report,
            CycleReport::Cycle {
                preperiod: 0,
                period: 3,
                states: [0, -1, 1].iter().map(|&v| Vector::ints(Q, &[v])).collect(),
            }
        );
    }

    #[test]
    fn symmetric_doubleton_uses_tie_policy() {
        // T(0): R_A 0 = 0 is equidistant from ±1; the default policy picks 1.
        let report = detect_cycle(&line(-1, 1), 10).unwrap();
        assert_eq!(
            report,
            CycleReport::Cycle {
                preperiod: 0,
                period: 2,
                states: vec![Vector::ints(Q, &[0]), Vector::ints(Q, &[1])],
            }
        );
    }

    #[test]
    fn irrational_example_has_no_short_cycle() {
        let report = detect_cycle(&sqrt2_problem(), 2000).unwrap();
        assert_eq!(report, CycleReport::NoCycle { horizon: 2000 });
    }

    #[test]
    fn float_cycles_are_found_approximately() {
        let p = Problem::on_line(Backend::F64, &[-1, 2], 0).unwrap();
        let report = detect_cycle(&DoubletonProblem::new(p).unwrap(), 100).unwrap();
        assert_eq!(report.period(), Some(3));
    }

    #[test]
    fn preperiod_before_cycle() {
        // Start off the absorbing lines: x0 = 10 walks down before cycling.
        let p = DoubletonProblem::new(Problem::on_line(Q, &[-1, 2], 10).unwrap()).unwrap();
        let CycleReport::Cycle { preperiod, period, states } = detect_cycle(&p, 100).unwrap() else {
            panic!("expected a cycle");
        };
        assert_eq!(period, 3);
        assert!(preperiod > 0);
        let r = iterate(&p.problem().hyperplane, &p.problem().set, p.x0(), preperiod + 3).unwrap();
        let xs = r.points(&p.problem().hyperplane, &p.problem().set);
        assert_eq!(xs[preperiod as usize], states[0]);
        assert_ne!(xs[preperiod as usize - 1], xs[preperiod as usize + 2]);
        assert!(cycle_inner_sum(&p, &states).unwrap().is_zero());
    }

    #[test]
    fn limits() {
        let p = line(-1, 2);
        let r = iterate(&p.problem().hyperplane, &p.problem().set, p.x0(), 30).unwrap();
        let lim = coefficient_limits(&p, &r).unwrap();
        assert_eq!(lim.limit1, Scalar::ratio(2, 3));
        assert_eq!(lim.limit2, Scalar::ratio(1, 3));
        assert!(lim.deviation <= Scalar::ratio(2, 30));

        let p = line(-1, 1);
        let r = iterate(&p.problem().hyperplane, &p.problem().set, p.x0(), 5).unwrap();
        let lim = coefficient_limits(&p, &r).unwrap();
        assert_eq!((lim.limit1, lim.limit2), (Scalar::ratio(1, 2), Scalar::ratio(1, 2)));

        let r = iterate(&p.problem().hyperplane, &p.problem().set, p.x0(), 1).unwrap();
        assert!(coefficient_limits(&p, &r).is_ok());
    }
}
