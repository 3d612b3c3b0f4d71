//! Structured verification reports and their JSON form.

use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::lattice::Lattice;

/// Outcome of one identity check.
///
/// `abs_error = |lhs - rhs|` and `pass ⇔ abs_error <= tolerance`. Checks that
/// compare quantities of large dynamic range store `(log|v|, arg v)` as
/// `lhs`/`rhs`, which makes `abs_error` a relative error.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub lattice: Option<[f64; 4]>,
    pub params: Map<String, Value>,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl VerificationReport {
    pub fn new(
        check_name: &str,
        lattice: Option<&Lattice>,
        params: Map<String, Value>,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
    ) -> Self {
        let abs_error = (lhs - rhs).norm();
        VerificationReport {
            check_name: check_name.to_string(),
            lattice: lattice.map(Lattice::as_array),
            params,
            lhs,
            rhs,
            abs_error,
            tolerance,
            pass: abs_error <= tolerance,
            runtime_ms: 0.0,
        }
    }

    /// Records the wall time elapsed since `start`.
    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// Replaces the pass flag by `pass && extra`, for reports that bundle a
    /// secondary assertion into the same record.
    pub fn require(mut self, extra: bool) -> Self {
        self.pass = self.pass && extra;
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("check".into(), json!(self.check_name));
        m.insert("lattice".into(), json!(self.lattice));
        m.insert("params".into(), Value::Object(self.params.clone()));
        m.insert("lhs".into(), complex_json(self.lhs));
        m.insert("rhs".into(), complex_json(self.rhs));
        m.insert("abs_error".into(), json!(self.abs_error));
        m.insert("tolerance".into(), json!(self.tolerance));
        m.insert("pass".into(), json!(self.pass));
        m.insert("runtime_ms".into(), json!(self.runtime_ms));
        Value::Object(m)
    }
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `(log|v|, arg v)`, with the argument of `reference` used to pick the branch.
pub fn log_polar(v: Complex64, reference: Option<Complex64>) -> Complex64 {
    let mut arg = v.arg();
    if let Some(r) = reference {
        let turns = ((r.im - arg) / std::f64::consts::TAU).round();
        arg += turns * std::f64::consts::TAU;
    }
    Complex64::new(v.norm().ln(), arg)
}

/// Builds a params object from `(key, value)` pairs, keeping their order.
pub fn params<I: IntoIterator<Item = (&'static str, Value)>>(items: I) -> Map<String, Value> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
