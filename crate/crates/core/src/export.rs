//! Trace export shared by the DR and MAP runs.
//!
//! CSV columns: `n, k, inner, count_1..count_m, x_1..x_dim`. Scalars are
//! written in their display form (`3/2`, `-4+3√2`, `0.25`). JSON reports carry
//! a `method` tag (`"dr"`, `"map"` or `"closed_form"`).

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::RunResult;
use crate::error::{Error, Result};
use crate::geometry::{FiniteSet, Hyperplane, Vector};
use crate::map::ApTrace;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dr,
    Map,
    ClosedForm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Dr => "dr",
            Method::Map => "map",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// One exported record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: u64,
    pub k: Option<usize>,
    pub inner: Scalar,
    pub counts: Vec<u64>,
    pub x: Vector,
}

pub fn dr_rows(a: &Hyperplane, b: &FiniteSet, run: &RunResult) -> Vec<TraceRow> {
    run.trace
        .iter()
        .enumerate()
        .map(|(i, rec)| TraceRow {
            n: rec.n,
            k: rec.selector_k,
            inner: rec.inner.clone(),
            counts: rec.counts.clone(),
            x: run.point(i, a, b),
        })
        .collect()
}

/// MAP rows; `counts` tallies the `P_B` selections so far.
pub fn map_rows(a: &Hyperplane, b: &FiniteSet, trace: &ApTrace) -> Vec<TraceRow> {
    let mut counts = vec![0u64; b.len()];
    trace
        .points
        .iter()
        .zip(&trace.selectors)
        .enumerate()
        .map(|(n, (x, k))| {
            if let Some(k) = k {
                counts[k - 1] += 1;
            }
            TraceRow {
                n: n as u64,
                k: *k,
                inner: a.inner(x),
                counts: counts.clone(),
                x: x.clone(),
            }
        })
        .collect()
}

fn header(m: usize, dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "k".into(), "inner".into()];
    h.extend((1..=m).map(|i| format!("count_{i}")));
    h.extend((1..=dim).map(|i| format!("x_{i}")));
    h
}

fn cells(row: &TraceRow) -> Vec<String> {
    let mut c = vec![
        row.n.to_string(),
        row.k.map(|k| k.to_string()).unwrap_or_default(),
        row.inner.to_string(),
    ];
    c.extend(row.counts.iter().map(u64::to_string));
    c.extend(row.x.coords().iter().map(Scalar::to_string));
    c
}

fn out_err(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

pub fn write_csv<W: Write>(out: W, rows: &[TraceRow], m: usize, dim: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(m, dim)).map_err(out_err)?;
    for row in rows {
        w.write_record(cells(row)).map_err(out_err)?;
    }
    w.flush().map_err(out_err)
}

/// Aligned plain-text table with the same columns as the CSV.
pub fn write_table<W: Write>(mut out: W, rows: &[TraceRow], m: usize, dim: usize) -> Result<()> {
    let head = header(m, dim);
    let body: Vec<Vec<String>> = rows.iter().map(cells).collect();
    let widths: Vec<usize> = (0..head.len())
        .map(|j| {
            body.iter()
                .map(|r| r[j].chars().count())
                .chain([head[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |r: &[String]| {
        r.iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(&head)).map_err(out_err)?;
    for r in &body {
        writeln!(out, "{}", line(r)).map_err(out_err)?;
    }
    Ok(())
}

/// `{"method", "backend", "records", ...extra}`; `extra` must be an object.
pub fn trace_json(method: Method, rows: &[TraceRow], extra: Value) -> Value {
    let backend = rows.first().map(|r| r.inner.backend().to_string());
    let mut v = json!({
        "method": method.tag(),
        "backend": backend,
        "records": rows,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}
