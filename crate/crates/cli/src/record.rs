//! One row of sweep output and its CSV form.

use std::io::{Read, Write};

use crate::config::Experiment;
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 16] = [
    "experiment",
    "sample",
    "seed",
    "N",
    "h",
    "Nh",
    "theta",
    "s_profile",
    "eps",
    "beta",
    "sigma",
    "delta_a",
    "cluster",
    "kappa",
    "valid",
    "bound_ok",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub experiment: Experiment,
    pub sample: u64,
    pub seed: u64,
    pub n: usize,
    /// Largest cluster diameter.
    pub h: f64,
    pub nh: f64,
    /// Measured separation; `None` for a single cluster.
    pub theta: Option<f64>,
    pub s_profile: Vec<usize>,
    pub eps: Option<f64>,
    /// Largest complementary principal angle between cluster subspaces.
    pub beta: Option<f64>,
    /// `sigma_j(V_N / sqrt(N))`, non-increasing.
    pub sigma: Vec<f64>,
    pub delta_a: Vec<f64>,
    pub cluster: Vec<usize>,
    pub kappa: Option<f64>,
    /// Regime flag: the sample is inside the range where double precision
    /// and the bounds under test apply.
    pub valid: bool,
    /// Outcome of the explicit bound attached to the experiment, if any.
    pub bound_ok: Option<bool>,
}

impl SweepRecord {
    pub fn all_finite(&self) -> bool {
        let opt = [self.theta, self.eps, self.beta, self.kappa];
        self.h.is_finite()
            && self.nh.is_finite()
            && opt.iter().flatten().all(|v| v.is_finite())
            && self.sigma.iter().chain(&self.delta_a).all(|v| v.is_finite())
    }

    pub fn s_total(&self) -> usize {
        self.s_profile.iter().sum()
    }

    fn to_row(&self) -> Vec<String> {
        vec![
            self.experiment.to_string(),
            self.sample.to_string(),
            self.seed.to_string(),
            self.n.to_string(),
            fmt_f64(self.h),
            fmt_f64(self.nh),
            fmt_opt(self.theta),
            join(self.s_profile.iter().map(|v| v.to_string())),
            fmt_opt(self.eps),
            fmt_opt(self.beta),
            join(self.sigma.iter().map(|v| fmt_f64(*v))),
            join(self.delta_a.iter().map(|v| fmt_f64(*v))),
            join(self.cluster.iter().map(|v| v.to_string())),
            fmt_opt(self.kappa),
            self.valid.to_string(),
            self.bound_ok.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }

    fn from_row(row: &csv::StringRecord) -> CliResult<Self> {
        if row.len() != HEADER.len() {
            return Err(CliError::Csv(format!("expected {} fields, found {}", HEADER.len(), row.len())));
        }
        let f = |i: usize| &row[i];
        Ok(SweepRecord {
            experiment: f(0).parse().map_err(CliError::Csv)?,
            sample: parse(f(1))?,
            seed: parse(f(2))?,
            n: parse(f(3))?,
            h: parse(f(4))?,
            nh: parse(f(5))?,
            theta: parse_opt(f(6))?,
            s_profile: parse_list(f(7))?,
            eps: parse_opt(f(8))?,
            beta: parse_opt(f(9))?,
            sigma: parse_list(f(10))?,
            delta_a: parse_list(f(11))?,
            cluster: parse_list(f(12))?,
            kappa: parse_opt(f(13))?,
            valid: parse(f(14))?,
            bound_ok: parse_opt(f(15))?,
        })
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(";")
}

fn parse<T: std::str::FromStr>(s: &str) -> CliResult<T> {
    s.parse().map_err(|_| CliError::Csv(format!("cannot parse field {s:?}")))
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> CliResult<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse(s).map(Some)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> CliResult<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(parse).collect()
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Csv(e.to_string());
    w.write_record(HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(r.to_row()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> CliResult<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| CliError::Csv(e.to_string()))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Csv("unexpected header".into()));
    }
    r.records()
        .map(|row| SweepRecord::from_row(&row.map_err(|e| CliError::Csv(e.to_string()))?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_record() -> SweepRecord {
        SweepRecord {
            experiment: Experiment::Leastsq,
            sample: 3,
            seed: 42,
            n: 1234,
            h: 0.1 / 1234.0,
            nh: 0.1,
            theta: Some(1.0 + f64::EPSILON),
            s_profile: vec![2, 3, 1],
            eps: Some(3.3e-5),
            beta: None,
            sigma: vec![],
            delta_a: vec![1.0 / 3.0, 2e300, 5e-324, 0.1, 7.0, 1.0],
            cluster: vec![0, 0, 1, 1, 1, 2],
            kappa: Some(1e8),
            valid: true,
            bound_ok: Some(false),
        }
    }

    #[test]
    fn empty_list_gives_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEADER.join(",") + "\n");
    }

    #[test]
    fn round_trip_is_exact() {
        let recs = vec![sample_record(), SweepRecord { bound_ok: None, theta: None, ..sample_record() }];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn rejects_malformed_rows() {
        let text = HEADER.join(",") + "\nangles,1\n";
        assert!(read_csv(text.as_bytes()).is_err());
    }
}
