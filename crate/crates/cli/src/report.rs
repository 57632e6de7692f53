use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in digest.iter() {
            write!(hex, "{b:02x}").expect("write to string");
        }
        InputDigest {
            name: name.into(),
            sha256: hex,
        }
    }
}

/// A point where a check failed, with the two disagreeing values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub point: Vec<i64>,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub tor: Option<usize>,
    pub points: u64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn new(name: &str, tor: Option<usize>, points: u64, witness: Option<Witness>) -> Self {
        Check {
            name: name.to_string(),
            tor,
            points,
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub duration_ms: u128,
}

impl RunReport {
    pub fn new(command: String, inputs: Vec<InputDigest>) -> Self {
        RunReport {
            command,
            inputs,
            checks: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            duration_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.duration_ms = elapsed.as_millis();
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        for d in &self.inputs {
            writeln!(out, "input {}: sha256 {}", d.name, d.sha256).unwrap();
        }
        for c in &self.checks {
            let tor = c.tor.map(|i| format!(" Tor_{i}")).unwrap_or_default();
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(out, "{status} {}{tor} ({} points)", c.name, c.points).unwrap();
            if let Some(w) = &c.witness {
                write!(
                    out,
                    " at {:?}: expected {}, got {}",
                    w.point, w.expected, w.actual
                )
                .unwrap();
            }
            out.push('\n');
        }
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        writeln!(
            out,
            "{} in {} ms",
            if self.passed() { "all checks passed" } else { "verification failed" },
            self.duration_ms
        )
        .unwrap();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,tor,points,passed,witness,expected,actual\n");
        for c in &self.checks {
            let (p, e, a) = match &c.witness {
                Some(w) => (
                    w.point
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    w.expected.clone(),
                    w.actual.clone(),
                ),
                None => Default::default(),
            };
            writeln!(
                out,
                "{},{},{},{},{p},{e},{a}",
                c.name,
                c.tor.map(|i| i.to_string()).unwrap_or_default(),
                c.points,
                c.passed
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_hex_sha256() {
        let d = InputDigest::of("x", b"abc");
        assert_eq!(
            d.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn failing_check_carries_witness() {
        let w = Witness {
            point: vec![1, 2],
            expected: "0".into(),
            actual: "1".into(),
        };
        let mut r = RunReport::new("verify".into(), vec![]);
        r.checks.push(Check::new("a", None, 3, None));
        assert!(r.passed());
        r.checks.push(Check::new("b", Some(1), 3, Some(w)));
        assert!(!r.passed());
        assert!(r.to_table().contains("FAIL b Tor_1 (3 points) at [1, 2]"));
    }
}
