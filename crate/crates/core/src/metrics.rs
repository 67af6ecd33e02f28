//! Goodness-of-fit statistics (SSE, R², DFE, adjusted R², RMSE) and ranking.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::TimeSeries;
use crate::models::{ModelError, ParamVector};
use crate::solver;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no residuals")]
    EmptyResiduals,
    #[error("observations have zero variance; R² is undefined")]
    ZeroVariance,
    #[error("degrees of freedom must be positive (n = {n}, k = {k})")]
    NonPositiveDfe { n: usize, k: usize },
    #[error("results come from different datasets")]
    MixedDatasets,
    #[error("nothing to rank")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStatistics {
    pub sse: f64,
    #[serde(rename = "r2")]
    pub r_squared: f64,
    pub dfe: usize,
    #[serde(rename = "adj_r2")]
    pub adj_r_squared: f64,
    pub rmse: f64,
    pub sst: f64,
    pub n: usize,
    pub k: usize,
}

impl FitStatistics {
    /// Derives every statistic from the sums of squares and the counts.
    pub fn from_sums(sse: f64, sst: f64, n: usize, k: usize) -> Result<Self, MetricsError> {
        let dfe = dfe(n, k)?;
        let r_squared = r_squared(sse, sst)?;
        Ok(Self {
            sse,
            r_squared,
            dfe,
            adj_r_squared: adj_r_squared(r_squared, n, dfe)?,
            rmse: rmse(sse, dfe)?,
            sst,
            n,
            k,
        })
    }

    /// Largest relative violation of the four defining identities.
    pub fn identity_error(&self) -> f64 {
        let rel = |a: f64, b: f64| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        };
        let r2 = 1.0 - self.sse / self.sst;
        let adj = 1.0 - (1.0 - self.r_squared) * (self.n as f64 - 1.0) / self.dfe as f64;
        let dfe_ok = if self.n.checked_sub(self.k) == Some(self.dfe) {
            0.0
        } else {
            1.0
        };
        [
            rel(self.r_squared, r2),
            rel(self.rmse, (self.sse / self.dfe as f64).sqrt()),
            rel(self.adj_r_squared, adj),
            dfe_ok,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn sse(residuals: &[f64]) -> Result<f64, MetricsError> {
    if residuals.is_empty() {
        return Err(MetricsError::EmptyResiduals);
    }
    Ok(residuals.iter().map(|r| r * r).sum())
}

/// `1 - sse/sst`; negative for fits worse than the mean, never clamped.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
pub fn r_squared(sse: f64, sst: f64) -> Result<f64, MetricsError> {
    if !(sst > 0.0) {
        return Err(MetricsError::ZeroVariance);
    }
    Ok(1.0 - sse / sst)
}

pub fn dfe(n: usize, k: usize) -> Result<usize, MetricsError> {
    match n.checked_sub(k) {
        Some(d) if d >= 1 => Ok(d),
        _ => Err(MetricsError::NonPositiveDfe { n, k }),
    }
}

/// Root mean squared error with the residual degrees of freedom as denominator.
pub fn rmse(sse: f64, dfe: usize) -> Result<f64, MetricsError> {
    if dfe == 0 {
        return Err(MetricsError::NonPositiveDfe { n: 0, k: 0 });
    }
    Ok((sse / dfe as f64).sqrt())
}

pub fn adj_r_squared(r2: f64, n: usize, dfe: usize) -> Result<f64, MetricsError> {
    if dfe == 0 || n < 2 {
        return Err(MetricsError::NonPositiveDfe {
            n,
            k: n.saturating_sub(dfe),
        });
    }
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / dfe as f64)
}

pub fn fit_statistics(params: &ParamVector, s: &TimeSeries) -> Result<FitStatistics, MetricsError> {
    let k = params.model().k();
    dfe(s.len(), k)?;
    let residuals = solver::residuals(params, s)?;
    FitStatistics::from_sums(sse(&residuals)?, s.stats().sst, s.len(), k)
}

/// Anything that carries a model id and its statistics can be ranked.
pub trait Scored {
    fn model_name(&self) -> &str;
    fn statistics(&self) -> &FitStatistics;
}

/// Best first: highest adjusted R², then lowest RMSE, then model id.
pub fn rank_models<T: Scored>(results: &[T]) -> Result<Vec<&T>, MetricsError> {
    let first = results.first().ok_or(MetricsError::Empty)?.statistics();
    for r in results {
        let st = r.statistics();
        let scale = first.sst.abs().max(st.sst.abs());
        if st.n != first.n || (st.sst - first.sst).abs() > 1e-12 * scale {
            return Err(MetricsError::MixedDatasets);
        }
    }
    let mut ranked: Vec<&T> = results.iter().collect();
    ranked.sort_by(|a, b| compare(*a, *b));
    Ok(ranked)
}

fn compare<T: Scored>(a: &T, b: &T) -> Ordering {
    let (sa, sb) = (a.statistics(), b.statistics());
    sb.adj_r_squared
        .total_cmp(&sa.adj_r_squared)
        .then(sa.rmse.total_cmp(&sb.rmse))
        .then_with(|| a.model_name().cmp(b.model_name()))
}
