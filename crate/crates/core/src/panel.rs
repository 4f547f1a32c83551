//! Multivariate time-series panels and the lagged-link primitive.
//!
//! A panel is an `n`-variable by `T`-timestep matrix of observations. Time
//! indices are 1-based throughout the crate: `t = 1` is the first row of the
//! CSV representation. Variable indices are 0-based.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether panel values are real measurements or small integer category codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    Continuous,
    /// Category codes per variable; `alphabet[j]` is the number of distinct
    /// codes `0..alphabet[j]` variable `j` can take.
    Discrete { alphabet: Vec<usize> },
}

impl ValueKind {
    pub fn is_discrete(&self) -> bool {
        matches!(self, ValueKind::Discrete { .. })
    }
}

/// One lagged variable reference: `var` observed `lag` steps before the target.
///
/// Lags are strictly positive; contemporaneous and future references are not
/// representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LaggedLink {
    pub var: usize,
    pub lag: usize,
}

impl LaggedLink {
    pub fn new(var: usize, lag: usize) -> Self {
        assert!(lag >= 1, "lagged links require lag >= 1");
        LaggedLink { var, lag }
    }
}

impl fmt::Display for LaggedLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(var {}, lag {})", self.var, self.lag)
    }
}

/// An `n x T` panel of observations with variable names and a value-kind tag.
///
/// Immutable after construction; all accessors are cheap and the type is safe
/// to share across worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    names: Vec<String>,
    /// Row-major `[var][t-1]`.
    values: Vec<f64>,
    n: usize,
    t_len: usize,
    kind: ValueKind,
}

impl TimeSeriesPanel {
    /// Builds a continuous panel from per-variable rows.
    pub fn continuous(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(names, rows, false)
    }

    /// Builds a discrete panel; every value must be a non-negative integer
    /// code and the per-variable alphabet size is recorded.
    pub fn discrete(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(names, rows, true)
    }

    fn build(names: Vec<String>, rows: Vec<Vec<f64>>, discrete: bool) -> Result<Self> {
        let n = names.len();
        if n == 0 || rows.len() != n {
            return Err(Error::Data(format!(
                "panel needs one value row per variable: {} names, {} rows",
                n,
                rows.len()
            )));
        }
        let t_len = rows[0].len();
        if t_len == 0 {
            return Err(Error::Data("panel needs at least one timestep".into()));
        }
        let mut values = Vec::with_capacity(n * t_len);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != t_len {
                return Err(Error::Data(format!(
                    "variable {} has {} timesteps, expected {}",
                    j,
                    row.len(),
                    t_len
                )));
            }
            for (t0, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Data(format!(
                        "non-finite value for variable {} at t={}",
                        j,
                        t0 + 1
                    )));
                }
                values.push(v);
            }
        }
        let kind = if discrete {
            let mut alphabet = vec![0usize; n];
            for j in 0..n {
                let mut max_code = 0usize;
                for t0 in 0..t_len {
                    let v = values[j * t_len + t0];
                    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                        return Err(Error::Data(format!(
                            "discrete panel value {} for variable {} at t={} is not a small non-negative integer code",
                            v,
                            j,
                            t0 + 1
                        )));
                    }
                    max_code = max_code.max(v as usize);
                }
                alphabet[j] = max_code + 1;
            }
            ValueKind::Discrete { alphabet }
        } else {
            ValueKind::Continuous
        };
        Ok(TimeSeriesPanel {
            names,
            values,
            n,
            t_len,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of timesteps `T`.
    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> &ValueKind {
        &self.kind
    }

    /// Value of variable `var` at 1-based time `t`.
    #[inline]
    pub fn value(&self, var: usize, t: usize) -> f64 {
        debug_assert!(var < self.n && t >= 1 && t <= self.t_len);
        self.values[var * self.t_len + (t - 1)]
    }

    /// Discrete code of variable `var` at 1-based time `t`.
    #[inline]
    pub fn code(&self, var: usize, t: usize) -> u32 {
        self.value(var, t) as u32
    }

    /// Reads a panel from the CSV format: first row variable names, one
    /// subsequent row per timestep with `n` numeric fields.
    pub fn from_csv_reader<R: Read>(reader: R, discrete: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Data(format!("panel CSV header: {e}")))?
            .iter()
            .map(|s| s.to_string())
            .collect();
        if names.is_empty() {
            return Err(Error::Data("panel CSV has no columns".into()));
        }
        let n = names.len();
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Data(format!("panel CSV row {}: {e}", line + 2)))?;
            if record.len() != n {
                return Err(Error::Data(format!(
                    "panel CSV row {} has {} fields, expected {}",
                    line + 2,
                    record.len(),
                    n
                )));
            }
            for (j, field) in record.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Data(format!(
                        "panel CSV row {} field {:?} is not numeric",
                        line + 2,
                        field
                    ))
                })?;
                rows[j].push(v);
            }
        }
        Self::build(names, rows, discrete)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P, discrete: bool) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(file, discrete)
    }

    /// Writes the CSV representation (header row, then one row per timestep).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)
            .map_err(|e| Error::Data(format!("panel CSV write: {e}")))?;
        let mut record = Vec::with_capacity(self.n);
        for t in 1..=self.t_len {
            record.clear();
            for j in 0..self.n {
                record.push(self.value(j, t).to_string());
            }
            wtr.write_record(&record)
                .map_err(|e| Error::Data(format!("panel CSV write: {e}")))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        let err = TimeSeriesPanel::continuous(
            vec!["a".into()],
            vec![vec![1.0, f64::NAN, 3.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let err = TimeSeriesPanel::continuous(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0], vec![1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn discrete_records_alphabet() {
        let panel = TimeSeriesPanel::discrete(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]],
        )
        .unwrap();
        match panel.kind() {
            ValueKind::Discrete { alphabet } => assert_eq!(alphabet, &vec![3, 2]),
            _ => panic!("expected discrete kind"),
        }
    }

    #[test]
    fn discrete_rejects_fractional_codes() {
        let err = TimeSeriesPanel::discrete(vec!["a".into()], vec![vec![0.0, 1.5]]).unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let panel = TimeSeriesPanel::continuous(
            vec!["x1".into(), "x2".into()],
            vec![vec![0.25, -1.5, 3.125], vec![1.0, 2.0, -0.0625]],
        )
        .unwrap();
        let mut buf = Vec::new();
        panel.write_csv(&mut buf).unwrap();
        let back = TimeSeriesPanel::from_csv_reader(buf.as_slice(), false).unwrap();
        assert_eq!(panel, back);
    }

    #[test]
    fn csv_row_one_is_t_one() {
        let csv = "a,b\n1,10\n2,20\n";
        let panel = TimeSeriesPanel::from_csv_reader(csv.as_bytes(), false).unwrap();
        assert_eq!(panel.value(0, 1), 1.0);
        assert_eq!(panel.value(1, 2), 20.0);
    }
}
