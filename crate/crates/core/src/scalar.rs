//! Field elements shared by every computation in the crate.
//!
//! Three backends are supported and never mixed within one problem:
//!
//! * `Float` - plain `f64`, fast and approximate;
//! * `Rational` - arbitrary-precision reduced fractions;
//! * `Surd` - elements `a + b√d` of the quadratic field `Q(√d)` for a single
//!   square-free `d ≥ 2`.
//!
//! Exact backends make periodicity and floor evaluation decidable. On the
//! float backend every value is rational, so rationality questions there are
//! answered only heuristically (see [`heuristic_rational`]).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::ScalarError;
pub use crate::rational::Rational;

/// Arithmetic backend of a problem instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    F64,
    Rational,
    /// Quadratic field `Q(√d)`, `d` square-free and at least 2.
    Surd(u64),
}

impl Backend {
    /// Builds a surd backend, rejecting a radicand that is not square-free or
    /// is smaller than 2.
    pub fn surd(d: u64) -> Result<Self, ScalarError> {
        if d < 2 || !is_square_free(d) {
            return Err(ScalarError::BadRadicand(d));
        }
        Ok(Backend::Surd(d))
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Backend::F64)
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::F64 => "f64",
            Backend::Rational => "rational",
            Backend::Surd(_) => "surd",
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    /// Lifts an integer into this backend.
    pub fn int(self, n: i64) -> Scalar {
        self.rational(Rational::from_int(n))
    }

    pub fn big_int(self, n: &BigInt) -> Scalar {
        self.rational(Rational::from_bigint(n.clone()))
    }

    /// Lifts a rational into this backend; on `F64` the value is rounded.
    pub fn rational(self, q: Rational) -> Scalar {
        match self {
            Backend::F64 => Scalar::Float(q.to_f64()),
            Backend::Rational => Scalar::Rational(q),
            Backend::Surd(d) => Scalar::Surd(Surd {
                a: q,
                b: Rational::zero(),
                d,
            }),
        }
    }

    /// `√d` itself; only meaningful on the surd backend.
    pub fn sqrt_d(self) -> Result<Scalar, ScalarError> {
        match self {
            Backend::Surd(d) => Ok(Scalar::Surd(Surd {
                a: Rational::zero(),
                b: Rational::one(),
                d,
            })),
            other => Err(ScalarError::NotSurd(other.name())),
        }
    }

    /// Parses a JSON coordinate for this backend.
    ///
    /// * `F64`: any JSON number.
    /// * `Rational`: a string `"p/q"` / `"p"`, or a JSON integer.
    /// * `Surd`: an object `{"a": .., "b": ..}` whose fields are rationals, or a
    ///   bare rational (taken as `b = 0`).
    pub fn parse_json(self, v: &Value) -> Result<Scalar, ScalarError> {
        match self {
            Backend::F64 => match v.as_f64() {
                Some(x) => Scalar::float(x),
                None => Err(ScalarError::Parse(format!("expected a JSON number, got {v}"))),
            },
            Backend::Rational => parse_json_rational(v).map(Scalar::Rational),
            Backend::Surd(d) => match v {
                Value::Object(map) => {
                    for key in map.keys() {
                        if key != "a" && key != "b" {
                            return Err(ScalarError::Parse(format!("unknown surd field {key:?}")));
                        }
                    }
                    let part = |k: &str| match map.get(k) {
                        Some(x) => parse_json_rational(x),
                        None => Ok(Rational::zero()),
                    };
                    Ok(Scalar::Surd(Surd {
                        a: part("a")?,
                        b: part("b")?,
                        d,
                    }))
                }
                other => parse_json_rational(other).map(|a| {
                    Scalar::Surd(Surd {
                        a,
                        b: Rational::zero(),
                        d,
                    })
                }),
            },
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Surd(d) => write!(f, "surd(d={d})"),
            other => f.write_str(other.name()),
        }
    }
}

fn parse_json_rational(v: &Value) -> Result<Rational, ScalarError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_bigint(u.into()))
            } else {
                Err(ScalarError::Parse(format!(
                    "non-integer number {n} on an exact backend; write it as \"p/q\""
                )))
            }
        }
        other => Err(ScalarError::Parse(format!("expected a rational, got {other}"))),
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (
            BigInt::from_str(p.trim()).map_err(|_| bad())?,
            BigInt::from_str(q.trim()).map_err(|_| bad())?,
        ),
        None => (BigInt::from_str(s).map_err(|_| bad())?, BigInt::from(1)),
    };
    if den.is_zero() {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(Rational::from_big(BigRational::new(num, den)))
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// An element `a + b√d` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: u64,
}

impl Surd {
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, ScalarError> {
        Backend::surd(d)?;
        Ok(Surd { a, b, d })
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, self.d)
    }
}

/// Sign of `x + y√d`, decided by comparing `x²` with `y²d`.
fn sign_of(x: &Rational, y: &Rational, d: u64) -> Ordering {
    let sx = x.signum();
    let sy = y.signum();
    match (sx, sy) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (sx, _) => {
            let x2 = x * x;
            let y2d = y * y * Rational::from_int(d as i64);
            // |x| vs |y|√d; the sign follows whichever magnitude wins.
            match x2.cmp(&y2d) {
                Ordering::Greater => sx,
                Ordering::Less => sx.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// A field element on one of the three backends.
#[derive(Clone, Debug)]
pub enum Scalar {
    Float(f64),
    Rational(Rational),
    Surd(Surd),
}

impl Scalar {
    /// Float scalar; non-finite values are rejected.
    pub fn float(x: f64) -> Result<Self, ScalarError> {
        if x.is_finite() {
            Ok(Scalar::Float(x))
        } else {
            Err(ScalarError::NonFinite)
        }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Rational(Rational::new(p, q))
    }

    /// `a + b√d` with integer-fraction parts `a = ap/aq`, `b = bp/bq`.
    pub fn surd(ap: i64, aq: i64, bp: i64, bq: i64, d: u64) -> Result<Self, ScalarError> {
        if aq == 0 || bq == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Surd::new(
            Rational::new(ap, aq),
            Rational::new(bp, bq),
            d,
        )
        .map(Scalar::Surd)
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Float(_) => Backend::F64,
            Scalar::Rational(_) => Backend::Rational,
            Scalar::Surd(s) => Backend::Surd(s.d),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Float(x) => *x == 0.0,
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Surd(s) => s.a.is_zero() && s.b.is_zero(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Float(x) => x.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
            Scalar::Rational(q) => q.signum(),
            Scalar::Surd(s) => s.signum(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Nearest `f64`; exact for floats, rounded otherwise.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Float(x) => *x,
            Scalar::Rational(q) => q.to_f64(),
            Scalar::Surd(s) => s.a.to_f64() + s.b.to_f64() * (s.d as f64).sqrt(),
        }
    }

    /// Rational value if the scalar is exactly rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Surd(s) if s.b.is_zero() => Some(&s.a),
            _ => None,
        }
    }

    /// Decides rationality exactly. Undecidable on the float backend.
    pub fn is_rational(&self) -> Result<bool, ScalarError> {
        match self {
            Scalar::Float(_) => Err(ScalarError::RationalityUndecidable),
            Scalar::Rational(_) => Ok(true),
            Scalar::Surd(s) => Ok(s.b.is_zero()),
        }
    }

    /// Greatest integer not exceeding the value.
    ///
    /// Surds are bracketed exactly: an initial guess from integer square roots
    /// is corrected by exact sign tests of `(a - k) + b√d`.
    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Float(x) => BigInt::from_f64(x.floor()).expect("finite float"),
            Scalar::Rational(q) => q.floor(),
            Scalar::Surd(s) => surd_floor(s),
        }
    }

    /// `floor` narrowed to `i64`.
    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor does not fit in i64")
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x + y)),
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x + y)),
            (Scalar::Surd(x), Scalar::Surd(y)) if x.d == y.d => Ok(Scalar::Surd(Surd {
                a: &x.a + &y.a,
                b: &x.b + &y.b,
                d: x.d,
            })),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x - y)),
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x - y)),
            (Scalar::Surd(x), Scalar::Surd(y)) if x.d == y.d => Ok(Scalar::Surd(Surd {
                a: &x.a - &y.a,
                b: &x.b - &y.b,
                d: x.d,
            })),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x * y)),
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x * y)),
            (Scalar::Surd(x), Scalar::Surd(y)) if x.d == y.d => {
                let (a, b) = if x.b.is_zero() {
                    (&x.a * &y.a, &x.a * &y.b)
                } else if y.b.is_zero() {
                    (&x.a * &y.a, &x.b * &y.a)
                } else {
                    let d = Rational::from_int(x.d as i64);
                    (
                        &x.a * &y.a + &x.b * &y.b * d,
                        &x.a * &y.b + &x.b * &y.a,
                    )
                };
                Ok(Scalar::Surd(Surd { a, b, d: x.d }))
            }
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if self.backend() != rhs.backend() {
            return Err(self.mismatch(rhs));
        }
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        match (self, rhs) {
            (Scalar::Float(x), Scalar::Float(y)) => Ok(Scalar::Float(x / y)),
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(Scalar::Rational(x / y)),
            (Scalar::Surd(x), Scalar::Surd(y)) => {
                if y.b.is_zero() {
                    return Ok(Scalar::Surd(Surd {
                        a: &x.a / &y.a,
                        b: &x.b / &y.a,
                        d: x.d,
                    }));
                }
                // Multiply through by the conjugate c - e√d.
                let d = Rational::from_int(x.d as i64);
                let norm = &y.a * &y.a - &y.b * &y.b * &d;
                let a = (&x.a * &y.a - &x.b * &y.b * &d) / &norm;
                let b = (&x.b * &y.a - &x.a * &y.b) / &norm;
                Ok(Scalar::Surd(Surd { a, b, d: x.d }))
            }
            _ => unreachable!("backends checked above"),
        }
    }

    /// Exact total comparison within one backend.
    pub fn try_cmp(&self, rhs: &Scalar) -> Result<Ordering, ScalarError> {
        match (self, rhs) {
            (Scalar::Float(x), Scalar::Float(y)) => x.partial_cmp(y).ok_or(ScalarError::NonFinite),
            (Scalar::Rational(x), Scalar::Rational(y)) => Ok(x.cmp(y)),
            (Scalar::Surd(x), Scalar::Surd(y)) if x.d == y.d => {
                Ok(sign_of(&(&x.a - &y.a), &(&x.b - &y.b), x.d))
            }
            _ => Err(self.mismatch(rhs)),
        }
    }

    /// Re-expresses the value on another backend.
    ///
    /// Floats convert to rationals exactly (every finite `f64` is dyadic).
    /// Surds with a nonzero irrational part cannot leave their field.
    pub fn convert(&self, to: Backend) -> Result<Scalar, ScalarError> {
        if self.backend() == to {
            return Ok(self.clone());
        }
        match (self, to) {
            (_, Backend::F64) => Ok(Scalar::Float(self.to_f64())),
            (Scalar::Float(x), _) => {
                let q = BigRational::from_float(*x).ok_or(ScalarError::NonFinite)?;
                Ok(to.rational(Rational::from_big(q)))
            }
            (Scalar::Rational(q), _) => Ok(to.rational(q.clone())),
            (Scalar::Surd(s), _) if s.b.is_zero() => Ok(to.rational(s.a.clone())),
            (Scalar::Surd(_), _) => Err(ScalarError::Irrational(self.to_string(), to.name())),
        }
    }

    /// JSON encoding: floats as numbers, rationals as `"p/q"`, surds as
    /// `{"a": "p/q", "b": "p/q"}`.
    pub fn to_json(&self) -> Value {
        let frac = |q: &Rational| Value::String(format!("{}/{}", q.numer(), q.denom()));
        match self {
            Scalar::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Scalar::Rational(q) => frac(q),
            Scalar::Surd(s) => {
                let mut map = serde_json::Map::new();
                map.insert("a".into(), frac(&s.a));
                map.insert("b".into(), frac(&s.b));
                Value::Object(map)
            }
        }
    }

    fn mismatch(&self, rhs: &Scalar) -> ScalarError {
        ScalarError::BackendMismatch(self.backend().to_string(), rhs.backend().to_string())
    }
}

fn surd_floor(s: &Surd) -> BigInt {
    if s.b.is_zero() {
        return s.a.floor();
    }
    // floor(b√d) from an integer square root: for b = p/q,
    // |b|√d = √(p²d)/q and floor(floor(y)/q) = floor(y/q).
    let p = s.b.numer().abs();
    let q = &s.b.denom();
    let root = (&p * &p * BigInt::from(s.d)).sqrt();
    let irr_floor = if s.b.is_positive() {
        root.div_floor(q)
    } else {
        // √(p²d) is irrational, so -x never lands on an integer.
        -(root.div_floor(q)) - 1
    };
    // floor(a) + floor(b√d) is floor(s) or floor(s) - 1; bracket exactly.
    let mut k = s.a.floor() + irr_floor;
    let below = |k: &BigInt| {
        let shifted = &s.a - Rational::from_bigint(k.clone());
        sign_of(&shifted, &s.b, s.d)
    };
    while below(&k) == Ordering::Less {
        k -= 1;
    }
    loop {
        let next = &k + 1;
        if below(&next) == Ordering::Less {
            break;
        }
        k = next;
    }
    k
}

/// Continued-fraction reconstruction `x ≈ p/q` with `q ≤ max_den`.
///
/// Returns the first convergent within `1e-12` relative of `x`. This is a
/// heuristic: callers must label anything derived from it as such.
pub fn heuristic_rational(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h_prev, mut h) = (1i128, x.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut frac = x - x.floor();
    loop {
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((i64::try_from(h).ok()?, k as u64));
        }
        if frac.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i128;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den as i128 {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Float(x), Scalar::Float(y)) => x == y,
            (Scalar::Rational(x), Scalar::Rational(y)) => x == y,
            (Scalar::Surd(x), Scalar::Surd(y)) => x == y,
            _ => false,
        }
    }
}

// Floats are always finite (enforced at construction), so equality is reflexive.
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Float(x) => {
                0u8.hash(state);
                // -0.0 == 0.0 must hash alike.
                let x = if *x == 0.0 { 0.0 } else { *x };
                x.to_bits().hash(state);
            }
            Scalar::Rational(q) => {
                1u8.hash(state);
                q.hash(state);
            }
            Scalar::Surd(s) => {
                2u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Float(x) => write!(f, "{x}"),
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Surd(s) => {
                if s.b.is_zero() {
                    return write!(f, "{}", s.a);
                }
                if !s.a.is_zero() {
                    write!(f, "{}", s.a)?;
                    if s.b.is_positive() {
                        f.write_str("+")?;
                    }
                }
                let coeff = if s.b.is_one() {
                    String::new()
                } else if (-&s.b).is_one() {
                    "-".into()
                } else if s.b.is_integer() {
                    s.b.to_string()
                } else {
                    format!("({})", s.b)
                };
                write!(f, "{coeff}√{}", s.d)
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Float(x) => Scalar::Float(-x),
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Surd(s) => Scalar::Surd(Surd {
                a: -&s.a,
                b: -&s.b,
                d: s.d,
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// Operators panic on backend mismatch or division by zero; validated entry
// points guarantee a single backend per problem. Use `checked_*` otherwise.
macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);
