//! Validated time series and the summary statistics every fit is scored against.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("times has {times} entries but values has {values}")]
    LengthMismatch { times: usize, values: usize },
    #[error("non-finite {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },
    #[error("times must be strictly increasing (index {index}: {prev} then {next})")]
    NonMonotonicTime { index: usize, prev: f64, next: f64 },
    #[error("series is empty")]
    Empty,
}

/// Ordered `(t, y)` observations.
///
/// Times are strictly increasing and every entry is finite. Units are whatever
/// the source uses (years since 1900, hours since midnight, months); nothing is
/// rescaled here.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self, SeriesError> {
        if times.len() != values.len() {
            return Err(SeriesError::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (index, (t, y)) in times.iter().zip(&values).enumerate() {
            if !t.is_finite() {
                return Err(SeriesError::NonFinite {
                    field: "time",
                    index,
                });
            }
            if !y.is_finite() {
                return Err(SeriesError::NonFinite {
                    field: "value",
                    index,
                });
            }
        }
        if let Some(index) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(SeriesError::NonMonotonicTime {
                index: index + 1,
                prev: times[index],
                next: times[index + 1],
            });
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false for a constructed series; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> (f64, f64) {
        (self.times[0], self.values[0])
    }

    pub fn last(&self) -> (f64, f64) {
        let n = self.len() - 1;
        (self.times[n], self.values[n])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn stats(&self) -> SummaryStats {
        series_stats(self)
    }
}

pub fn build_series(times: Vec<f64>, values: Vec<f64>) -> Result<TimeSeries, SeriesError> {
    TimeSeries::new(times, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Total sum of squares about the mean.
    pub sst: f64,
}

pub fn series_stats(s: &TimeSeries) -> SummaryStats {
    let n = s.len();
    let mean = s.values().iter().sum::<f64>() / n as f64;
    let sst = s.values().iter().map(|y| (y - mean).powi(2)).sum();
    SummaryStats { n, mean, sst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_two_points() {
        let s = build_series(vec![0.0, 100.0], vec![76.09, 275.4]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.last(), (100.0, 275.4));
    }

    #[test]
    fn rejects_duplicate_time() {
        let err = build_series(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(
            err,
            SeriesError::NonMonotonicTime { index: 1, .. }
        ));
    }

    #[test]
    fn rejects_decreasing_time() {
        let err = build_series(vec![0.0, 2.0, 1.0], vec![1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(
            err,
            SeriesError::NonMonotonicTime { index: 2, .. }
        ));
    }

    #[test]
    fn rejects_nan() {
        let err = build_series(vec![0.0], vec![f64::NAN]).unwrap_err();
        assert_eq!(
            err,
            SeriesError::NonFinite {
                field: "value",
                index: 0
            }
        );
        let err = build_series(vec![f64::INFINITY], vec![1.0]).unwrap_err();
        assert_eq!(
            err,
            SeriesError::NonFinite {
                field: "time",
                index: 0
            }
        );
    }

    #[test]
    fn rejects_length_mismatch_and_empty() {
        assert!(matches!(
            build_series(vec![0.0, 1.0], vec![1.0]),
            Err(SeriesError::LengthMismatch {
                times: 2,
                values: 1
            })
        ));
        assert_eq!(build_series(vec![], vec![]), Err(SeriesError::Empty));
    }

    #[test]
    fn constant_series_has_zero_sst() {
        let s = build_series(vec![0.0, 1.0, 2.0], vec![2.0, 2.0, 2.0]).unwrap();
        let st = series_stats(&s);
        assert_eq!(st.mean, 2.0);
        assert_eq!(st.sst, 0.0);
    }

    #[test]
    fn two_point_stats() {
        let s = build_series(vec![0.0, 1.0], vec![1.0, 3.0]).unwrap();
        let st = series_stats(&s);
        assert_eq!((st.n, st.mean, st.sst), (2, 2.0, 2.0));
    }

    proptest! {
        #[test]
        fn shift_moves_mean_not_sst(
            values in prop::collection::vec(-1e3f64..1e3, 1..40),
            c in -1e3f64..1e3,
        ) {
            let times: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
            let base = series_stats(&build_series(times.clone(), values.clone()).unwrap());
            let shifted: Vec<f64> = values.iter().map(|v| v + c).collect();
            let moved = series_stats(&build_series(times, shifted).unwrap());
            prop_assert!((moved.mean - base.mean - c).abs() <= 1e-9 * (1.0 + c.abs() + base.mean.abs()));
            prop_assert!((moved.sst - base.sst).abs() <= 1e-7 * (1.0 + base.sst));
            prop_assert!(base.sst >= 0.0);
        }
    }
}
