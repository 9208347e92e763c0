//! JSON-lines records and the human-readable digest of one command run.

use std::io::{self, Write};

use serde_json::{Map, Value};

/// Everything a command produced: machine-readable rows, a short digest,
/// and whether every acceptance check held.
#[derive(Debug)]
pub struct Report {
    command: &'static str,
    seed: Value,
    records: Vec<Value>,
    digest: Vec<String>,
    pass: bool,
}

impl Report {
    pub fn new(command: &'static str, seed: Option<u64>) -> Self {
        Report { command, seed: seed.map_or(Value::Null, Value::from), records: Vec::new(), digest: Vec::new(), pass: true }
    }

    /// Adds one row; `command` and `seed` are stamped onto every record.
    /// A `pass` field of `false` marks the run as an acceptance failure.
    pub fn record(&mut self, row: Value) {
        let mut obj = match row {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        if obj.get("pass") == Some(&Value::Bool(false)) {
            self.pass = false;
        }
        obj.insert("command".into(), Value::from(self.command));
        obj.insert("seed".into(), self.seed.clone());
        self.records.push(Value::Object(obj));
    }

    pub fn digest(&mut self, line: impl Into<String>) {
        self.digest.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn write_records(&self, out: &mut impl Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut *out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn write_digest(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{} (seed {}): {}", self.command, self.seed, if self.pass { "PASS" } else { "FAIL" })?;
        for line in &self.digest {
            writeln!(out, "  {line}")?;
        }
        Ok(())
    }
}

/// A finite float as JSON; non-finite values (e.g. an infinite z-score)
/// become strings so the line stays valid JSON.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn records_are_stamped_and_failures_tracked() {
        let mut r = Report::new("demo", Some(3));
        r.record(json!({"x": 1, "pass": true}));
        assert!(r.passed());
        r.record(json!({"x": 2, "pass": false}));
        assert!(!r.passed());
        let mut buf = Vec::new();
        r.write_records(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), r#"{"command":"demo","pass":true,"seed":3,"x":1}"#);
    }

    #[test]
    fn non_finite_numbers_stay_valid_json() {
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(num(0.5), Value::from(0.5));
    }
}
