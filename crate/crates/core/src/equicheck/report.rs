use std::io::{self, Write};

use serde::Serialize;

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64, pass: bool) -> Self {
        Self { name: name.into(), statistic, threshold, pass }
    }

    /// Passes iff `statistic ≤ threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(name, statistic, threshold, statistic <= threshold)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    /// JSON lines, one record per line.
    pub fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

impl Extend<CheckRecord> for Report {
    fn extend<T: IntoIterator<Item = CheckRecord>>(&mut self, iter: T) {
        self.records.extend(iter);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_has_one_line_per_record() {
        let mut r = Report::default();
        r.push(CheckRecord::at_most("a", 0.1, 0.2));
        r.push(CheckRecord::at_most("b", 0.3, 0.2));
        let text = r.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["pass"], true);
        assert!(!r.all_pass());
    }
}
