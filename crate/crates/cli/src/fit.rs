//! Slope fits over sweep records.

use clustered_vandermonde::fit::{fit_loglog, SlopeFit};

use crate::error::{CliError, CliResult};
use crate::record::SweepRecord;

pub const MIN_FIT_SAMPLES: usize = 3;

/// A numeric column of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    N,
    H,
    Nh,
    Theta,
    InvNTheta,
    Eps,
    Beta,
    Kappa,
    Sigma(usize),
    DeltaA(usize),
}

impl Field {
    pub fn value(&self, r: &SweepRecord) -> Option<f64> {
        match *self {
            Field::N => Some(r.n as f64),
            Field::H => Some(r.h),
            Field::Nh => Some(r.nh),
            Field::Theta => r.theta,
            Field::InvNTheta => r.theta.map(|t| 1.0 / (r.n as f64 * t)),
            Field::Eps => r.eps,
            Field::Beta => r.beta,
            Field::Kappa => r.kappa,
            Field::Sigma(j) => r.sigma.get(j).copied(),
            Field::DeltaA(l) => r.delta_a.get(l).copied(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Field::N => "N".into(),
            Field::H => "h".into(),
            Field::Nh => "Nh".into(),
            Field::Theta => "theta".into(),
            Field::InvNTheta => "1/(N theta)".into(),
            Field::Eps => "eps".into(),
            Field::Beta => "beta".into(),
            Field::Kappa => "kappa".into(),
            Field::Sigma(j) => format!("sigma_{}", j + 1),
            Field::DeltaA(l) => format!("delta_a_{}", l + 1),
        }
    }
}

/// Paired `(x, y)` values of the records accepted by `filter`.
pub fn points(
    records: &[SweepRecord],
    x: Field,
    y: Field,
    filter: impl Fn(&SweepRecord) -> bool,
) -> (Vec<f64>, Vec<f64>) {
    records
        .iter()
        .filter(|r| filter(r))
        .filter_map(|r| Some((x.value(r)?, y.value(r)?)))
        .unzip()
}

/// Least-squares line through `(log10 x, log10 y)`.
pub fn fit_slope(
    records: &[SweepRecord],
    x: Field,
    y: Field,
    filter: impl Fn(&SweepRecord) -> bool,
) -> CliResult<SlopeFit> {
    let (xs, ys) = points(records, x, y, filter);
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(CliError::Config(format!(
            "fit of {} vs {} needs at least {MIN_FIT_SAMPLES} samples, found {}",
            y.label(),
            x.label(),
            xs.len()
        )));
    }
    Ok(fit_loglog(&xs, &ys)?)
}
