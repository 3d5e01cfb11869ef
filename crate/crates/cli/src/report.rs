use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One verified statement. `slack` is the normalised margin by which the
/// check holds; it passes when `slack ≥ −tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub anchor: &'static str,
    pub status: Status,
    pub slack: f64,
    pub tol: f64,
    pub ms: u64,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: &'static str, slack: f64, tol: f64) -> Self {
        let status = if slack >= -tol { Status::Pass } else { Status::Fail };
        Record {
            name: name.into(),
            anchor,
            status,
            slack,
            tol,
            ms: 0,
        }
    }

    /// A yes/no check, reported with slack 0 or −1.
    pub fn flag(name: impl Into<String>, anchor: &'static str, ok: bool, tol: f64) -> Self {
        let mut r = Record::new(name, anchor, 0.0, tol);
        if !ok {
            r.slack = -1.0;
            r.status = Status::Fail;
        }
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, seed: u64, tol: f64, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.passed()).count();
        Report {
            command: command.to_string(),
            seed,
            tol,
            suites: Vec::new(),
            result: None,
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["check_name", "anchor", "status", "slack", "tol", "ms"])?;
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
            };
            out.write_record([
                r.name.as_str(),
                r.anchor,
                status,
                &format!("{:e}", r.slack),
                &format!("{:e}", r.tol),
                &r.ms.to_string(),
            ])?;
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_slack() {
        assert!(Record::new("a", "x", -1e-7, 1e-6).passed());
        assert!(!Record::new("a", "x", -1e-5, 1e-6).passed());
        assert!(!Record::flag("a", "x", false, 1.0).passed());
    }

    #[test]
    fn csv_has_fixed_header() {
        let r = Report::new("verify", 7, 1e-6, vec![Record::new("n", "anchor, with comma", 0.0, 1e-6)]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("check_name,anchor,status,slack,tol,ms"));
        assert_eq!(lines.next(), Some("n,\"anchor, with comma\",pass,0e0,1e-6,0"));
    }
}
