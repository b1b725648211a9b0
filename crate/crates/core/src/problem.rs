//! Problem instances and their JSON file format.
//!
//! ```json
//! {"normal": [0, 1], "points": [[0, -1], [1, {"a": "0", "b": "1"}]],
//!  "x0": [0, 0], "backend": "surd", "surd_d": 2, "tie_policy": "higher_inner"}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{FiniteSet, Hyperplane, TiePolicy, Vector};
use crate::error::ScalarError;
use crate::scalar::Backend;

/// A hyperplane `A`, a finite set `B` and a starting point.
#[derive(Clone, Debug)]
pub struct Problem {
    pub hyperplane: Hyperplane,
    pub set: FiniteSet,
    pub x0: Vector,
}

impl Problem {
    pub fn new(normal: Vector, points: Vec<Vector>, x0: Vector, tie_policy: TiePolicy) -> Result<Self> {
        let hyperplane = Hyperplane::new(normal)?;
        let set = FiniteSet::new(&hyperplane, points, tie_policy)?;
        hyperplane.check(&x0)?;
        Ok(Problem { hyperplane, set, x0 })
    }

    /// One-dimensional instance `A = {0}` with integer points.
    pub fn on_line(backend: Backend, points: &[i64], x0: i64) -> Result<Self> {
        Problem::new(
            Vector::ints(backend, &[1]),
            points.iter().map(|&p| Vector::ints(backend, &[p])).collect(),
            Vector::ints(backend, &[x0]),
            TiePolicy::default(),
        )
    }

    pub fn backend(&self) -> Backend {
        self.hyperplane.backend()
    }

    pub fn dim(&self) -> usize {
        self.hyperplane.dim()
    }

    pub fn with_x0(&self, x0: Vector) -> Result<Self> {
        self.hyperplane.check(&x0)?;
        Ok(Problem {
            x0,
            ..self.clone()
        })
    }

    pub fn with_tie_policy(self, tie_policy: TiePolicy) -> Self {
        Problem {
            set: self.set.with_tie_policy(tie_policy),
            ..self
        }
    }

    /// Re-expresses every coordinate on another backend.
    pub fn convert(&self, to: Backend) -> Result<Self> {
        Problem::new(
            self.hyperplane.normal().convert(to)?,
            self.set
                .points()
                .iter()
                .map(|p| p.convert(to))
                .collect::<Result<_>>()?,
            self.x0.convert(to)?,
            self.set.tie_policy(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(s).map_err(|e| ScalarError::Parse(e.to_string()))?;
        file.build()
    }

    pub fn to_file(&self) -> ProblemFile {
        let backend = self.backend();
        ProblemFile {
            normal: self.hyperplane.normal().to_json(),
            points: self.set.points().iter().map(Vector::to_json).collect(),
            x0: self.x0.to_json(),
            backend: backend.name().to_string(),
            surd_d: match backend {
                Backend::Surd(d) => Some(d),
                _ => None,
            },
            tie_policy: self.set.tie_policy(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.to_file()).expect("problem file serializes")
    }
}

/// Raw JSON problem file; coordinates are decoded once the backend is known.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub normal: Value,
    pub points: Vec<Value>,
    pub x0: Value,
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surd_d: Option<u64>,
    #[serde(default)]
    pub tie_policy: TiePolicy,
}

fn default_backend() -> String {
    "f64".into()
}

impl ProblemFile {
    pub fn backend(&self) -> Result<Backend> {
        match (self.backend.as_str(), self.surd_d) {
            ("f64", None) => Ok(Backend::F64),
            ("rational", None) => Ok(Backend::Rational),
            ("surd", Some(d)) => Ok(Backend::surd(d)?),
            ("surd", None) => Err(Error::InvalidProblem("surd backend needs \"surd_d\"".into())),
            ("f64" | "rational", Some(_)) => Err(Error::InvalidProblem(
                "\"surd_d\" is only valid with the surd backend".into(),
            )),
            (other, _) => Err(Error::InvalidProblem(format!(
                "unknown backend {other:?} (expected f64, rational or surd)"
            ))),
        }
    }

    pub fn build(&self) -> Result<Problem> {
        let backend = self.backend()?;
        let vector = |v: &Value| -> Result<Vector> {
            let items = v
                .as_array()
                .ok_or_else(|| ScalarError::Parse(format!("expected an array of coordinates, got {v}")))?;
            Vector::new(
                items
                    .iter()
                    .map(|c| backend.parse_json(c))
                    .collect::<std::result::Result<_, _>>()?,
            )
        };
        Problem::new(
            vector(&self.normal)?,
            self.points.iter().map(vector).collect::<Result<_>>()?,
            vector(&self.x0)?,
            self.tie_policy,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn load_surd_problem() {
        let p = Problem::from_json_str(
            r#"{"normal":[1],"points":[[{"a":"0","b":"1"}],["-1"]],"x0":[0],"backend":"surd","surd_d":2}"#,
        )
        .unwrap();
        assert_eq!(p.backend(), Backend::Surd(2));
        assert_eq!(p.set.point(1), &Vector::ints(Backend::Surd(2), &[-1]));
        assert_eq!(p.set.point(2).coords()[0], Backend::Surd(2).sqrt_d().unwrap());
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            r#"{"normal":[1],"points":[[0.5]],"x0":[0],"backend":"rational"}"#,
            r#"{"normal":[1],"points":[[1]],"x0":[0],"backend":"surd"}"#,
            r#"{"normal":[1],"points":[[1]],"x0":[0],"backend":"surd","surd_d":4}"#,
            r#"{"normal":[1],"points":[[1]],"x0":[0, 1],"backend":"rational"}"#,
            r#"{"normal":[2],"points":[[1]],"x0":[0],"backend":"rational"}"#,
            r#"{"normal":[1],"points":[],"x0":[0]}"#,
            r#"{"normal":[1],"points":[[1]],"x0":[0],"backend":"decimal"}"#,
            r#"{"normal":[1],"points":[[1]],"x0":[0],"tie_policy":"random"}"#,
        ];
        for s in bad {
            assert!(Problem::from_json_str(s).is_err(), "{s}");
        }
    }

    #[test]
    fn float_defaults() {
        let p = Problem::from_json_str(r#"{"normal":[0, 3],"points":[[0,-1],[1,1.5]],"x0":[0.25,0]}"#).unwrap();
        assert_eq!(p.backend(), Backend::F64);
        assert_eq!(p.hyperplane.normal().coords()[1], Scalar::Float(1.0));
        assert_eq!(p.set.tie_policy(), TiePolicy::PreferHigherInner);
    }

    #[test]
    fn conversion_between_backends() {
        let p = Problem::on_line(Backend::Rational, &[-1, 2], 0).unwrap();
        let s = p.convert(Backend::Surd(3)).unwrap();
        assert_eq!(s.backend(), Backend::Surd(3));
        let f = s.convert(Backend::F64).unwrap();
        assert_eq!(f.set.point(2).coords()[0], Scalar::Float(2.0));
    }
}
