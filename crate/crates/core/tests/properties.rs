use proptest::prelude::*;

use drfeas::closedform::ClosedForm;
use drfeas::cycling::DoubletonProblem;
use drfeas::dynamics::{check_step_gap, iterate};
use drfeas::{Backend, Problem, Scalar, TiePolicy, Vector};

fn rat() -> impl Strategy<Value = Scalar> {
    (-200i64..=200, 1i64..=30).prop_map(|(p, q)| Scalar::ratio(p, q))
}

fn surd(d: u64) -> impl Strategy<Value = Scalar> {
    (-50i64..=50, 1i64..=12, -50i64..=50, 1i64..=12)
        .prop_map(move |(a, aq, b, bq)| Scalar::surd(a, aq, b, bq, d).unwrap())
}

fn line(b1: Scalar, b2: Scalar, x0: Scalar) -> DoubletonProblem {
    let v = |s: Scalar| Vector::new(vec![s]).unwrap();
    let one = x0.backend().one();
    let p = Problem::new(v(one), vec![v(b1), v(b2)], v(x0), TiePolicy::default()).unwrap();
    DoubletonProblem::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rational_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn surd_field_axioms(a in surd(3), b in surd(3), c in surd(3)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a);
        }
    }

    #[test]
    fn surd_order_agrees_with_floats(a in surd(2), b in surd(2)) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 {
            prop_assert_eq!(a < b, x < y);
        }
        let f = a.floor_i64() as f64;
        prop_assert!(f <= x + 1e-9 && x < f + 1.0 + 1e-9);
    }

    #[test]
    fn float_conversion_round_trips(a in rat()) {
        let f = a.convert(Backend::F64).unwrap();
        prop_assert!((f.to_f64() - a.to_f64()).abs() < 1e-12);
    }

    /// `x_n = ⟨x_{n-1},u⟩u + b_{k(n)}` rebuilds every point of a run.
    #[test]
    fn points_rebuild_from_selectors(
        p1 in 1i64..=60, q1 in 1i64..=12, p2 in 1i64..=60, q2 in 1i64..=12, x in rat(),
    ) {
        let p = line(Scalar::ratio(-p1, q1), Scalar::ratio(p2, q2), x);
        let pr = p.problem();
        let run = iterate(&pr.hyperplane, &pr.set, p.x0(), 200).unwrap();
        for n in 1..run.trace.len() {
            let k = run.trace[n].selector_k.unwrap();
            let rebuilt = pr.set.point(k).add_scaled(&run.trace[n - 1].inner, pr.hyperplane.normal());
            prop_assert_eq!(run.trace[n].x.clone().unwrap(), rebuilt);
        }
        prop_assert!(check_step_gap(&run, &pr.hyperplane, &pr.set).unwrap());
    }

    /// Straddling runs never drift further than `|x_0| + β_2 - β_1` from `A`.
    #[test]
    fn straddling_runs_stay_bounded(b1 in surd(2), b2 in surd(2), x in surd(2)) {
        prop_assume!(b1.is_negative() && b2.is_positive());
        let p = line(b1.clone(), b2.clone(), x.clone());
        let pr = p.problem();
        let run = iterate(&pr.hyperplane, &pr.set, p.x0(), 400).unwrap();
        let span = &b2 - &b1;
        let reach = &x.abs() + &span;
        for rec in &run.trace {
            prop_assert!(rec.inner.abs() <= reach);
        }
        let tail = &run.trace[run.trace.len() - 1].inner;
        let entered = run.trace.iter().any(|r| r.inner >= b1 && r.inner <= b2);
        if entered {
            prop_assert!(tail >= &(&b1 - &span) && tail <= &(&b2 + &span));
        }
    }

    /// On the line the closed form reproduces iteration whenever `r ≥ 1`.
    #[test]
    fn line_closed_form_matches_iteration(p in 1i64..=40, q in 1i64..=10) {
        prop_assume!(p >= q);
        let dp = line(Scalar::ratio(-1, 1), Scalar::ratio(p, q), Scalar::ratio(0, 1));
        let pr = dp.problem();
        let cf = ClosedForm::new(&dp).unwrap();
        let run = iterate(&pr.hyperplane, &pr.set, dp.x0(), 300).unwrap();
        for n in 1..=300u64 {
            prop_assert_eq!(cf.point(n).unwrap().0, run.point(n as usize, &pr.hyperplane, &pr.set));
        }
    }
}
