//! Closed-form terms of the doubleton DR sequence.
//!
//! With `β_1 = ⟨b_1,u⟩ < 0 < β_2 = ⟨b_2,u⟩` and
//! `β = ‖b_1 - b_2‖² / (2(β_1 - β_2))`, the iterates eventually live in
//!
//! ```text
//! S_1: k(n) = 1, ⟨x_n,u⟩ ∈ ]β, β+β_2]
//! S_2: k(n) = 2, ⟨x_n,u⟩ ∈ ]β+β_2, β-β_1+β_2]
//! ```
//!
//! and once inside (with `β + β_2 ≥ 0`) every term is a floor expression in
//! `n`. Evaluation is exact on the rational and surd backends.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cycling::DoubletonProblem;
use crate::error::{Error, Result};
use crate::geometry::{dr_step, Vector, FLOAT_TOL};
use crate::scalar::{Backend, Scalar};

/// Relative tolerance for float comparisons against iteration.
pub const FLOAT_VERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Betas {
    pub beta1: Scalar,
    pub beta2: Scalar,
    pub beta: Scalar,
}

impl Betas {
    /// `β_2 - β_1`, always positive.
    pub fn gap(&self) -> Scalar {
        &self.beta2 - &self.beta1
    }

    /// Whether `β + β_2 ≥ 0`, the hypothesis of the absorption argument.
    pub fn absorbing(&self) -> bool {
        !(&self.beta + &self.beta2).is_negative()
    }

    fn backend(&self) -> Backend {
        self.beta.backend()
    }
}

pub fn compute_betas(p: &DoubletonProblem) -> Result<Betas> {
    let beta1 = p.beta1().clone();
    let beta2 = p.beta2().clone();
    let diff = p.b1().sub(p.b2());
    let two = p.backend().int(2);
    let beta = diff.norm_sq() / (&two * (&beta1 - &beta2));
    let betas = Betas { beta1, beta2, beta };

    if !betas.beta1.is_negative() || !betas.beta2.is_positive() {
        return Err(Error::InvariantViolated("expected beta1 < 0 < beta2".into()));
    }
    if !betas.beta.is_negative() {
        return Err(Error::InvariantViolated(format!("beta = {} is not negative", betas.beta)));
    }
    // -2β ≥ β_2 - β_1 by Cauchy-Schwarz.
    let slack = -(&two * &betas.beta) - betas.gap();
    let holds = match &slack {
        Scalar::Float(s) => *s >= -FLOAT_TOL * betas.gap().to_f64().max(1.0),
        s => !s.is_negative(),
    };
    if !holds {
        return Err(Error::InvariantViolated(format!(
            "-2*beta >= beta2 - beta1 fails (slack {slack})"
        )));
    }
    Ok(betas)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionLabel {
    S1,
    S2,
    Outside,
}

/// `lo < x ≤ hi`
fn in_half_open(x: &Scalar, lo: &Scalar, hi: &Scalar) -> bool {
    x.try_cmp(lo).ok() == Some(Ordering::Greater) && x.try_cmp(hi).ok() != Some(Ordering::Greater)
}

pub fn region_of(betas: &Betas, inner: &Scalar, k: usize) -> RegionLabel {
    let top1 = &betas.beta + &betas.beta2;
    match k {
        1 if in_half_open(inner, &betas.beta, &top1) => RegionLabel::S1,
        2 if in_half_open(inner, &top1, &(&top1 - &betas.beta1)) => RegionLabel::S2,
        _ => RegionLabel::Outside,
    }
}

/// One step inside `S_1 ∪ S_2`: returns `(k(n+1), ⟨x_{n+1},u⟩)`.
///
/// At `⟨x_n,u⟩ = β - β_1` both selectors are nearest; the step goes to `b_2`.
pub fn successor_rule(betas: &Betas, inner: &Scalar, k: usize) -> Result<(usize, Scalar)> {
    match region_of(betas, inner, k) {
        RegionLabel::S1 => {
            let split = &betas.beta - &betas.beta1;
            if inner.try_cmp(&split)? == Ordering::Greater {
                Ok((1, inner + &betas.beta1))
            } else {
                Ok((2, inner + &betas.beta2))
            }
        }
        RegionLabel::S2 => {
            if !betas.absorbing() {
                return Err(Error::Precondition("S2 step requires beta + beta2 >= 0".into()));
            }
            Ok((1, inner + &betas.beta1))
        }
        RegionLabel::Outside => Err(Error::OutsideRegion),
    }
}

/// Floor quotients shared by both forms, for a fixed `⟨x_0,u⟩`.
#[derive(Clone, Debug)]
struct Quotients {
    backend: Backend,
    /// `(-⟨x_0,u⟩ + β + β_2)/(β_2 - β_1)`
    c: Scalar,
    /// `-β_1/(β_2 - β_1)`
    s: Scalar,
    /// `(-⟨x_0,u⟩ + β - β_1)/(β_2 - β_1)`
    c_b: Scalar,
    /// `β_2/(β_2 - β_1)`
    t: Scalar,
}

impl Quotients {
    fn new(betas: &Betas, inner0: &Scalar) -> Self {
        let gap = betas.gap();
        Quotients {
            backend: betas.backend(),
            c: (-inner0 + &betas.beta + &betas.beta2) / &gap,
            s: -&betas.beta1 / &gap,
            c_b: (-inner0 + &betas.beta - &betas.beta1) / &gap,
            t: &betas.beta2 / &gap,
        }
    }

    fn n(&self, n: u64) -> Scalar {
        self.backend.int(n as i64)
    }

    /// `⌊(-⟨x_0,u⟩ + β - mβ_1 + β_2)/(β_2 - β_1)⌋`
    fn upper(&self, m: u64) -> BigInt {
        (&self.c + &(&self.n(m) * &self.s)).floor()
    }

    /// `⌊(-⟨x_0,u⟩ + β - β_1 - (n-1)β_2)/(β_2 - β_1)⌋`
    fn lower(&self, n: u64) -> BigInt {
        (&self.c_b - &(&self.n(n - 1) * &self.t)).floor()
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("closed form is indexed from n = 1".into()));
    }
    if n > i64::MAX as u64 / 4 {
        return Err(Error::Precondition(format!("index {n} too large")));
    }
    Ok(())
}

fn inner_a(betas: &Betas, inner0: &Scalar, q: &Quotients, n: u64) -> Scalar {
    let b = q.backend;
    inner0 + &(&q.n(n) * &betas.beta1) + &(b.big_int(&q.upper(n + 1)) * betas.gap())
}

fn inner_b(betas: &Betas, inner0: &Scalar, q: &Quotients, n: u64) -> Scalar {
    let b = q.backend;
    inner0 - &(b.big_int(&q.lower(n)) * &betas.beta1) + &(b.big_int(&q.upper(n + 1)) * &betas.beta2)
}

fn selector(q: &Quotients, n: u64) -> usize {
    let k: BigInt = q.upper(n + 1) - q.upper(n) + 1;
    k.to_usize().unwrap_or(0)
}

/// `⟨x_n,u⟩` by the floor formula (first form).
///
/// Only `β + β_2 ≥ 0` is checked here; whether `x_1 ∈ S_1 ∪ S_2` depends on
/// the full start point, which [`ClosedForm::new`] verifies.
pub fn closed_form_inner(betas: &Betas, inner0: &Scalar, n: u64) -> Result<Scalar> {
    check_n(n)?;
    if !betas.absorbing() {
        return Err(Error::ClosedFormNotApplicable("beta + beta2 < 0".into()));
    }
    Ok(inner_a(betas, inner0, &Quotients::new(betas, inner0), n))
}

/// `⟨x_n,u⟩` by the second form, splitting the count of each selector.
pub fn closed_form_inner_split(betas: &Betas, inner0: &Scalar, n: u64) -> Result<Scalar> {
    check_n(n)?;
    if !betas.absorbing() {
        return Err(Error::ClosedFormNotApplicable("beta + beta2 < 0".into()));
    }
    Ok(inner_b(betas, inner0, &Quotients::new(betas, inner0), n))
}

/// `k(n)` as a difference of consecutive floors.
pub fn closed_form_selector(betas: &Betas, inner0: &Scalar, n: u64) -> Result<usize> {
    check_n(n)?;
    if !betas.absorbing() {
        return Err(Error::ClosedFormNotApplicable("beta + beta2 < 0".into()));
    }
    Ok(selector(&Quotients::new(betas, inner0), n))
}

/// Closed-form evaluator for one problem whose hypotheses have been checked.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    problem: DoubletonProblem,
    betas: Betas,
    inner0: Scalar,
    q: Quotients,
}

impl ClosedForm {
    /// Requires `β + β_2 ≥ 0` and `x_1 ∈ S_1 ∪ S_2` (one DR step is taken to
    /// find `x_1`).
    pub fn new(p: &DoubletonProblem) -> Result<Self> {
        let betas = compute_betas(p)?;
        if !betas.absorbing() {
            return Err(Error::ClosedFormNotApplicable(format!(
                "beta + beta2 = {} < 0",
                &betas.beta + &betas.beta2
            )));
        }
        let pr = p.problem();
        let step = dr_step(&pr.hyperplane, &pr.set, &pr.x0)?;
        let inner1 = pr.hyperplane.inner(&step.next);
        if region_of(&betas, &inner1, step.selector) == RegionLabel::Outside {
            return Err(Error::ClosedFormNotApplicable(format!(
                "x_1 = {} is outside S1 and S2",
                step.next
            )));
        }
        let inner0 = pr.hyperplane.inner(&pr.x0);
        Ok(ClosedForm {
            problem: p.clone(),
            q: Quotients::new(&betas, &inner0),
            betas,
            inner0,
        })
    }

    pub fn betas(&self) -> &Betas {
        &self.betas
    }

    pub fn problem(&self) -> &DoubletonProblem {
        &self.problem
    }

    /// `⟨x_n,u⟩`; `n = 0` returns `⟨x_0,u⟩`.
    pub fn inner(&self, n: u64) -> Result<Scalar> {
        if n == 0 {
            return Ok(self.inner0.clone());
        }
        check_n(n)?;
        Ok(inner_a(&self.betas, &self.inner0, &self.q, n))
    }

    pub fn inner_split(&self, n: u64) -> Result<Scalar> {
        if n == 0 {
            return Ok(self.inner0.clone());
        }
        check_n(n)?;
        Ok(inner_b(&self.betas, &self.inner0, &self.q, n))
    }

    pub fn selector(&self, n: u64) -> Result<usize> {
        check_n(n)?;
        Ok(selector(&self.q, n))
    }

    /// `(x_n, k(n))` with `x_n = ⟨x_{n-1},u⟩u + b_{k(n)}`.
    pub fn point(&self, n: u64) -> Result<(Vector, usize)> {
        let k = self.selector(n)?;
        if k != 1 && k != 2 {
            return Err(Error::InvariantViolated(format!("selector formula gave k = {k} at n = {n}")));
        }
        let inner_prev = self.inner(n - 1)?;
        let pr = self.problem.problem();
        let x = pr.set.point(k).add_scaled(&inner_prev, pr.hyperplane.normal());
        Ok((x, k))
    }
}

/// `(x_n, k(n))` by the closed form; `betas` must belong to `p`.
pub fn closed_form_point(p: &DoubletonProblem, betas: &Betas, n: u64) -> Result<(Vector, usize)> {
    let cf = ClosedForm::new(p)?;
    if cf.betas != *betas {
        return Err(Error::Precondition("betas do not belong to this problem".into()));
    }
    cf.point(n)
}

/// Closed form for a start in `A` that is nearer to `b_1`, under
/// `β_1 > β ≥ -β_2`.
pub fn corollary_point(p: &DoubletonProblem, n: u64) -> Result<(Vector, usize)> {
    check_n(n)?;
    let betas = compute_betas(p)?;
    let fail = |what: &str| Error::Precondition(format!("corollary hypothesis {what} fails"));
    if betas.beta1.try_cmp(&betas.beta)? != Ordering::Greater {
        return Err(fail("beta1 > beta"));
    }
    if betas.beta.try_cmp(&-&betas.beta2)? == Ordering::Less {
        return Err(fail("beta >= -beta2"));
    }
    let pr = p.problem();
    if !pr.hyperplane.contains(p.x0()) {
        return Err(fail("x0 in A"));
    }
    let (b1, b2) = (p.b1(), p.b2());
    let two = p.backend().int(2);
    let lhs = &two * p.x0().dot(&b1.sub(b2));
    let rhs = b1.norm_sq() - b2.norm_sq();
    if lhs.try_cmp(&rhs)? != Ordering::Greater {
        return Err(fail("2<x0, b1 - b2> > |b1|^2 - |b2|^2"));
    }
    let q = Quotients::new(&betas, &p.backend().zero());
    let backend = p.backend();
    let coeff = &backend.int(n as i64 - 1) * &betas.beta1 + backend.big_int(&q.upper(n)) * betas.gap();
    let k = selector(&q, n);
    Ok((pr.set.point(k).add_scaled(&coeff, pr.hyperplane.normal()), k))
}

/// `(u_n, v_n, w_n)`:
///
/// ```text
/// u_n = ⌊(n+1)√2⌋ - ⌊n√2⌋ - 1
/// v_n = ⌊(n+1)(2-√2)⌋
/// w_n = ⌊(n+1)√2⌋ - n - 1
/// ```
pub fn beatty_triple(n: u64) -> (i64, i64, i64) {
    assert!(n < 1 << 60, "index {n} too large");
    let sqrt2 = Backend::Surd(2).sqrt_d().expect("2 is square-free");
    let field = Backend::Surd(2);
    let m = field.int(n as i64);
    let m1 = field.int(n as i64 + 1);
    let f_next = (&m1 * &sqrt2).floor_i64();
    let f_this = (&m * &sqrt2).floor_i64();
    let v = (&m1 * &(field.int(2) - &sqrt2)).floor_i64();
    (f_next - f_this - 1, v, f_next - n as i64 - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub n: u64,
    pub what: String,
    pub closed_form: String,
    pub iterated: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub verified: bool,
    pub horizon: u64,
    pub exact: bool,
    /// Index of the iterate used as the closed form's `x_0`.
    pub rebased_at: u64,
    pub mismatch: Option<Mismatch>,
}

fn close(x: &Scalar, y: &Scalar) -> bool {
    match (x, y) {
        (Scalar::Float(a), Scalar::Float(b)) => {
            (a - b).abs() <= FLOAT_VERIFY_TOL * a.abs().max(b.abs()).max(1.0)
        }
        _ => x == y,
    }
}

fn close_vec(x: &Vector, y: &Vector) -> bool {
    x.dim() == y.dim() && x.coords().iter().zip(y.coords()).all(|(a, b)| close(a, b))
}

/// Compares the closed form with direct iteration for `n = 1..=horizon`.
///
/// Besides `x_n` and `k(n)` it checks along the way that the two inner
/// product forms agree, that consecutive inners differ by `β_1` or `β_2`,
/// that each iterate stays in `S_1 ∪ S_2`, and that the one-step rule
/// predicts the next selector and inner.
pub fn verify_closed_form(p: &DoubletonProblem, horizon: u64) -> Result<VerifyReport> {
    let cf = ClosedForm::new(p)?;
    verify_from(&cf, horizon, 0)
}

/// As [`verify_closed_form`], but if `x_1 ∉ S_1 ∪ S_2` the iteration is run
/// until some `x_m` enters, and the closed form is restarted from `x_{m-1}`.
/// Indices in the report stay those of the original sequence.
pub fn verify_closed_form_rebased(p: &DoubletonProblem, horizon: u64) -> Result<VerifyReport> {
    match ClosedForm::new(p) {
        Ok(cf) => return verify_from(&cf, horizon, 0),
        Err(Error::ClosedFormNotApplicable(_)) => {}
        Err(e) => return Err(e),
    }
    let betas = compute_betas(p)?;
    if !betas.absorbing() {
        return Err(Error::ClosedFormNotApplicable("beta + beta2 < 0".into()));
    }
    let pr = p.problem();
    let mut prev = pr.x0.clone();
    for m in 1..=horizon {
        let step = dr_step(&pr.hyperplane, &pr.set, &prev)?;
        let inner = pr.hyperplane.inner(&step.next);
        if region_of(&betas, &inner, step.selector) != RegionLabel::Outside {
            let cf = ClosedForm::new(&p.with_x0(prev)?)?;
            return verify_from(&cf, horizon - (m - 1), m - 1);
        }
        prev = step.next;
    }
    Err(Error::ClosedFormNotApplicable(format!(
        "S1 or S2 not entered within {horizon} steps"
    )))
}

fn verify_from(cf: &ClosedForm, horizon: u64, offset: u64) -> Result<VerifyReport> {
    if horizon < 1 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let pr = cf.problem.problem();
    let (a, b) = (&pr.hyperplane, &pr.set);
    let betas = &cf.betas;
    let mut report = VerifyReport {
        verified: true,
        horizon: horizon + offset,
        exact: pr.backend().is_exact(),
        rebased_at: offset,
        mismatch: None,
    };
    let mut fail = |n: u64, what: &str, c: String, i: String| {
        report.verified = false;
        report.mismatch = Some(Mismatch {
            n: n + offset,
            what: what.into(),
            closed_form: c,
            iterated: i,
        });
    };

    let mut x = pr.x0.clone();
    let mut prev_inner = cf.inner0.clone();
    let mut predicted: Option<(usize, Scalar)> = None;
    for n in 1..=horizon {
        let step = dr_step(a, b, &x)?;
        x = step.next;
        let inner = a.inner(&x);
        let (x_cf, k_cf) = cf.point(n)?;

        if k_cf != step.selector {
            fail(n, "selector", k_cf.to_string(), step.selector.to_string());
            break;
        }
        if !close_vec(&x_cf, &x) {
            fail(n, "point", x_cf.to_string(), x.to_string());
            break;
        }
        let (ia, ib) = (cf.inner(n)?, cf.inner_split(n)?);
        if !close(&ia, &inner) {
            fail(n, "inner", ia.to_string(), inner.to_string());
            break;
        }
        if !close(&ia, &ib) {
            fail(n, "inner forms disagree", ia.to_string(), ib.to_string());
            break;
        }
        let delta = &ia - &prev_inner;
        if !close(&delta, &betas.beta1) && !close(&delta, &betas.beta2) {
            fail(n, "increment not beta1 or beta2", delta.to_string(), String::new());
            break;
        }
        if let Some((k_pred, inner_pred)) = predicted.take() {
            if k_pred != step.selector || !close(&inner_pred, &inner) {
                fail(
                    n,
                    "one-step rule",
                    format!("k={k_pred}, inner={inner_pred}"),
                    format!("k={}, inner={inner}", step.selector),
                );
                break;
            }
        }
        if region_of(betas, &inner, step.selector) == RegionLabel::Outside {
            fail(n, "left S1 and S2", inner.to_string(), format!("k={}", step.selector));
            break;
        }
        predicted = Some(successor_rule(betas, &inner, step.selector)?);
        prev_inner = ia;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TiePolicy;
    use crate::problem::Problem;

    fn line(points: &[i64], x0: i64) -> DoubletonProblem {
        DoubletonProblem::new(Problem::on_line(Backend::Rational, points, x0).unwrap()).unwrap()
    }

    fn surd_line(r: Scalar) -> DoubletonProblem {
        let s = Backend::Surd(2);
        let v = |x: Scalar| Vector::new(vec![x]).unwrap();
        let pr = Problem::new(
            v(s.one()),
            vec![v(s.int(-1)), v(r)],
            v(s.zero()),
            TiePolicy::default(),
        )
        .unwrap();
        DoubletonProblem::new(pr).unwrap()
    }

    fn sqrt2() -> Scalar {
        Backend::Surd(2).sqrt_d().unwrap()
    }

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn plane_example(alpha: Scalar) -> DoubletonProblem {
        let s = Backend::Surd(2);
        let v = |xs: Vec<Scalar>| Vector::new(xs).unwrap();
        let pr = Problem::new(
            v(vec![s.zero(), s.one()]),
            vec![v(vec![s.zero(), s.int(-1)]), v(vec![s.one(), sqrt2()])],
            v(vec![alpha, s.zero()]),
            TiePolicy::default(),
        )
        .unwrap();
        DoubletonProblem::new(pr).unwrap()
    }

    #[test]
    fn betas_examples() {
        let b = compute_betas(&line(&[-1, 2], 0)).unwrap();
        assert_eq!((b.beta1, b.beta2, b.beta), (q(-1, 1), q(2, 1), q(-3, 2)));

        let b = compute_betas(&plane_example(Backend::Surd(2).zero())).unwrap();
        let r = sqrt2();
        let one = Backend::Surd(2).one();
        let expected = -(&one + &(&r + &one) * &(&r + &one)) / (Backend::Surd(2).int(2) * (&r + &one));
        assert_eq!(b.beta, expected);
        assert_eq!(b.beta, -sqrt2());

        let b = compute_betas(&line(&[-5, 5], 0)).unwrap();
        assert_eq!(b.beta, q(-5, 1));
    }

    #[test]
    fn regions_and_successors() {
        let b = compute_betas(&line(&[-1, 2], 0)).unwrap();
        assert_eq!(region_of(&b, &q(-1, 1), 1), RegionLabel::S1);
        assert_eq!(region_of(&b, &q(1, 1), 2), RegionLabel::S2);
        assert_eq!(region_of(&b, &q(-3, 2), 1), RegionLabel::Outside);
        assert_eq!(successor_rule(&b, &q(-1, 1), 1).unwrap(), (2, q(1, 1)));
        assert_eq!(successor_rule(&b, &q(1, 1), 2).unwrap(), (1, q(0, 1)));
        assert_eq!(successor_rule(&b, &q(0, 1), 1).unwrap(), (1, q(-1, 1)));
        // Boundary β - β_1 = -1/2 goes to k = 2.
        assert_eq!(successor_rule(&b, &q(-1, 2), 1).unwrap(), (2, q(3, 2)));
        assert!(matches!(successor_rule(&b, &q(5, 1), 1), Err(Error::OutsideRegion)));
    }

    #[test]
    fn inner_examples() {
        let p = line(&[-1, 2], 0);
        let b = compute_betas(&p).unwrap();
        assert_eq!(closed_form_inner(&b, &q(0, 1), 4).unwrap(), q(-1, 1));

        let p = surd_line(sqrt2());
        let b = compute_betas(&p).unwrap();
        let zero = Backend::Surd(2).zero();
        let s = |a, c| Scalar::surd(a, 1, c, 1, 2).unwrap();
        assert_eq!(closed_form_inner(&b, &zero, 2).unwrap(), s(-1, 1));
        assert_eq!(closed_form_inner(&b, &zero, 3).unwrap(), s(-2, 1));
        assert_eq!(closed_form_inner_split(&b, &zero, 3).unwrap(), s(-2, 1));
    }

    #[test]
    fn point_examples() {
        let p = line(&[-1, 2], 0);
        let b = compute_betas(&p).unwrap();
        let (x, k) = closed_form_point(&p, &b, 2).unwrap();
        assert_eq!((x, k), (Vector::ints(Backend::Rational, &[1]), 2));

        let p = surd_line(sqrt2());
        let b = compute_betas(&p).unwrap();
        let (x, k) = closed_form_point(&p, &b, 3).unwrap();
        assert_eq!(x.coords()[0], Scalar::surd(-2, 1, 1, 1, 2).unwrap());
        assert_eq!(k, 1);

        let p = plane_example(Backend::Surd(2).zero());
        let b = compute_betas(&p).unwrap();
        let (x, k) = closed_form_point(&p, &b, 1).unwrap();
        assert_eq!((x, k), (Vector::ints(Backend::Surd(2), &[0, -1]), 1));
    }

    #[test]
    fn corollary_examples() {
        let (x, k) = corollary_point(&line(&[-1, 2], 0), 1).unwrap();
        assert_eq!((x, k), (Vector::ints(Backend::Rational, &[-1]), 1));

        let p = plane_example(Backend::Surd(2).zero());
        let (x, k) = corollary_point(&p, 2).unwrap();
        let s = Backend::Surd(2);
        let expected = Vector::new(vec![s.one(), &sqrt2() - &s.one()]).unwrap();
        assert_eq!((x, k), (expected, 2));

        let err = corollary_point(&line(&[-1, 1], 0), 1).unwrap_err();
        assert!(err.to_string().contains("beta1 > beta"), "{err}");
        let err = corollary_point(&line(&[-1, 2], 1), 1).unwrap_err();
        assert!(err.to_string().contains("x0 in A"), "{err}");
    }

    #[test]
    fn refuses_when_not_absorbing() {
        // β = -104/4 = -26, so β + β_2 = -25.
        let v = |xs: &[i64]| Vector::ints(Backend::Rational, xs);
        let pr = Problem::new(v(&[0, 1]), vec![v(&[0, -1]), v(&[10, 1])], v(&[0, 0]), TiePolicy::default())
            .unwrap();
        let p = DoubletonProblem::new(pr).unwrap();
        let b = compute_betas(&p).unwrap();
        assert!(!b.absorbing());
        assert!(matches!(ClosedForm::new(&p), Err(Error::ClosedFormNotApplicable(_))));
        assert!(matches!(
            verify_closed_form_rebased(&p, 10),
            Err(Error::ClosedFormNotApplicable(_))
        ));
    }

    #[test]
    fn beatty_examples() {
        assert_eq!(beatty_triple(0), (0, 0, 0));
        assert_eq!(beatty_triple(2), (1, 1, 1));
        assert_eq!(beatty_triple(4), (1, 2, 2));
    }

    #[test]
    fn verify_examples() {
        let r = verify_closed_form(&line(&[-1, 2], 0), 1000).unwrap();
        assert!(r.verified && r.exact, "{r:?}");
        let r = verify_closed_form(&surd_line(sqrt2()), 1000).unwrap();
        assert!(r.verified && r.exact, "{r:?}");

        let f = DoubletonProblem::new(
            Problem::new(
                Vector::new(vec![Scalar::Float(1.0)]).unwrap(),
                vec![
                    Vector::new(vec![Scalar::Float(-1.0)]).unwrap(),
                    Vector::new(vec![Scalar::Float(3.7)]).unwrap(),
                ],
                Vector::new(vec![Scalar::Float(0.0)]).unwrap(),
                TiePolicy::default(),
            )
            .unwrap(),
        )
        .unwrap();
        let r = verify_closed_form(&f, 10_000).unwrap();
        assert!(r.verified && !r.exact, "{r:?}");
    }

    #[test]
    fn rebases_after_entry() {
        // From x_0 = 10 the first iterates sit above S_2.
        let p = line(&[-1, 2], 10);
        assert!(matches!(ClosedForm::new(&p), Err(Error::ClosedFormNotApplicable(_))));
        let r = verify_closed_form_rebased(&p, 200).unwrap();
        assert!(r.verified, "{r:?}");
        assert!(r.rebased_at > 0);
        assert_eq!(r.horizon, 200);
    }
}
