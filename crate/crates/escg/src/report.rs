//! Entropy time-series diagnostics and their CSV form.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRecord {
    pub time: f64,
    pub entropy: f64,
    /// Entropy relative to the initial record; exactly 0 in the first row.
    pub entropy_change: f64,
    pub min_u: f64,
    pub max_u: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EntropyReport {
    pub records: Vec<EntropyRecord>,
}

pub const CSV_HEADER: &str = "time,entropy,entropy_change,min_u,max_u";

impl EntropyReport {
    pub fn push(&mut self, record: EntropyRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.time <= last.time {
                return Err(Error::Numerical(format!(
                    "report timestamps must increase: {} after {}",
                    record.time, last.time
                )));
            }
        } else if record.entropy_change != 0.0 {
            return Err(Error::Numerical(
                "first entropy change entry must be exactly zero".into(),
            ));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn final_change(&self) -> Option<f64> {
        self.records.last().map(|r| r.entropy_change)
    }

    /// 17 significant digits, enough to round-trip f64 exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.time, r.entropy, r.entropy_change, r.min_u, r.max_u
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn parse_csv(text: &str) -> Result<EntropyReport> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            other => {
                return Err(Error::Config(format!(
                    "unexpected CSV header: {other:?}"
                )))
            }
        }
        let mut report = EntropyReport::default();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Config(format!(
                    "CSV row {} has {} fields, expected 5",
                    i + 2,
                    fields.len()
                )));
            }
            let mut vals = [0.0f64; 5];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f
                    .parse()
                    .map_err(|_| Error::Config(format!("bad CSV number '{f}'")))?;
            }
            report.records.push(EntropyRecord {
                time: vals[0],
                entropy: vals[1],
                entropy_change: vals[2],
                min_u: vals[3],
                max_u: vals[4],
            });
        }
        Ok(report)
    }
}
