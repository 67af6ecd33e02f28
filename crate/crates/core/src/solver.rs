//! Damped Gauss–Newton (Levenberg–Marquardt) least squares with
//! finite-difference Jacobians and seeded multi-start.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::TimeSeries;
use crate::metrics::{FitStatistics, MetricsError, Scored};
use crate::models::{eval_at, initial_guess, ModelError, ModelId, ParamVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error(
        "{model}: {n} points cannot fit {k} parameters with positive residual degrees of freedom"
    )]
    TooFewPoints { model: ModelId, n: usize, k: usize },
    #[error("initial parameters are outside the model domain: {0}")]
    InitDomain(#[source] ModelError),
    #[error("{model}: every start failed (last error: {last})")]
    AllStartsFailed { model: ModelId, last: Box<FitError> },
    #[error("invalid fit options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative SSE decrease below which an accepted step ends the fit.
    pub cost_tolerance: f64,
    /// Relative step norm below which an accepted step ends the fit.
    pub param_tolerance: f64,
    pub initial_damping: f64,
    pub damping_up_factor: f64,
    pub damping_down_factor: f64,
    pub max_damping: f64,
    pub starts: usize,
    /// Half-width of the log-uniform multiplicative perturbation of each start.
    pub perturbation_scale: f64,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            cost_tolerance: 1e-10,
            param_tolerance: 1e-10,
            initial_damping: 1e-3,
            damping_up_factor: 10.0,
            damping_down_factor: 10.0,
            max_damping: 1e12,
            starts: 20,
            perturbation_scale: 0.5,
            seed: 0,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<(), FitError> {
        let positive = [
            self.cost_tolerance,
            self.param_tolerance,
            self.initial_damping,
            self.max_damping,
            self.perturbation_scale,
        ];
        if !positive.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(FitError::InvalidOptions(
                "tolerances, damping and scale must be positive",
            ));
        }
        if !(self.damping_up_factor > 1.0 && self.damping_down_factor > 1.0) {
            return Err(FitError::InvalidOptions("damping factors must exceed 1"));
        }
        if self.max_iterations == 0 || self.starts == 0 {
            return Err(FitError::InvalidOptions(
                "max_iterations and starts must be at least 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    #[serde(rename = "cost_tol")]
    CostTolerance,
    #[serde(rename = "param_tol")]
    ParamTolerance,
    #[serde(rename = "max_iter")]
    MaxIterations,
    #[serde(rename = "damping_max")]
    DampingMax,
    DomainFailure,
}

impl Termination {
    pub fn converged(self) -> bool {
        matches!(
            self,
            Termination::CostTolerance | Termination::ParamTolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model_id: ModelId,
    pub params: ParamVector,
    pub converged: bool,
    pub iterations: usize,
    pub final_sse: f64,
    pub termination: Termination,
    pub start_index: usize,
    pub statistics: FitStatistics,
    /// SSE of the starting point followed by the SSE after every accepted step.
    pub sse_trace: Vec<f64>,
}

impl Scored for FitResult {
    fn model_name(&self) -> &str {
        self.model_id.as_str()
    }

    fn statistics(&self) -> &FitStatistics {
        &self.statistics
    }
}

/// `y_i - f(t_i)` for every observation.
pub fn residuals(params: &ParamVector, s: &TimeSeries) -> Result<Vec<f64>, ModelError> {
    residuals_raw(params.model(), params.values(), s)
}

fn residuals_raw(model: ModelId, p: &[f64], s: &TimeSeries) -> Result<Vec<f64>, ModelError> {
    let fitted = eval_at(model, p, s.times())?;
    Ok(s.values().iter().zip(fitted).map(|(y, f)| y - f).collect())
}

fn fd_step(p: f64) -> f64 {
    f64::EPSILON.sqrt() * p.abs().max(1.0)
}

/// Central-difference Jacobian of the model values, one row per time and one
/// column per parameter. Falls back to a one-sided difference when a probe
/// leaves the model domain.
pub fn jacobian_fd(params: &ParamVector, times: &[f64]) -> Result<DMatrix<f64>, ModelError> {
    jacobian_raw(params.model(), params.values(), times)
}

fn jacobian_raw(model: ModelId, p: &[f64], times: &[f64]) -> Result<DMatrix<f64>, ModelError> {
    let base = eval_at(model, p, times)?;
    let mut jac = DMatrix::zeros(times.len(), p.len());
    let mut probe = p.to_vec();
    for j in 0..p.len() {
        let h = fd_step(p[j]);
        // Divide by the steps actually representable, not the nominal h.
        let (hi, lo) = (p[j] + h, p[j] - h);
        probe[j] = hi;
        let plus = eval_at(model, &probe, times);
        probe[j] = lo;
        let minus = eval_at(model, &probe, times);
        probe[j] = p[j];
        let column: Vec<f64> = match (plus, minus) {
            (Ok(up), Ok(down)) => up
                .iter()
                .zip(&down)
                .map(|(u, d)| (u - d) / (hi - lo))
                .collect(),
            (Ok(up), Err(_)) => up
                .iter()
                .zip(&base)
                .map(|(u, b)| (u - b) / (hi - p[j]))
                .collect(),
            (Err(_), Ok(down)) => base
                .iter()
                .zip(&down)
                .map(|(b, d)| (b - d) / (p[j] - lo))
                .collect(),
            (Err(e), Err(_)) => return Err(e),
        };
        jac.set_column(j, &DVector::from_vec(column));
    }
    Ok(jac)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Outcome {
    params: Vec<f64>,
    sse: f64,
    iterations: usize,
    termination: Termination,
    trace: Vec<f64>,
}

fn levenberg_marquardt(
    model: ModelId,
    s: &TimeSeries,
    init: &[f64],
    opts: &FitOptions,
) -> Result<Outcome, FitError> {
    let mut p = init.to_vec();
    let r0 = residuals_raw(model, &p, s).map_err(FitError::InitDomain)?;
    let mut sse: f64 = r0.iter().map(|r| r * r).sum();
    if !sse.is_finite() {
        return Err(FitError::InitDomain(ModelError::Domain {
            model,
            t: f64::NAN,
            reason: "non-finite initial SSE",
        }));
    }
    let mut r = DVector::from_vec(r0);
    let mut trace = vec![sse];
    let mut damping = opts.initial_damping;

    let done = |params: Vec<f64>, sse, iterations, termination, trace| {
        Ok(Outcome {
            params,
            sse,
            iterations,
            termination,
            trace,
        })
    };

    for iteration in 1..=opts.max_iterations {
        if sse == 0.0 {
            return done(p, sse, iteration - 1, Termination::CostTolerance, trace);
        }
        let jac = match jacobian_raw(model, &p, s.times()) {
            Ok(j) if j.iter().all(|v| v.is_finite()) => j,
            _ => return done(p, sse, iteration, Termination::DomainFailure, trace),
        };
        let normal = jac.transpose() * &jac;
        let gradient = jac.transpose() * &r;
        let max_diag = normal.diagonal().max();
        if max_diag == 0.0 || gradient.iter().all(|g| *g == 0.0) {
            return done(p, sse, iteration, Termination::ParamTolerance, trace);
        }
        // Marquardt scaling, floored so flat directions still get damped.
        let floor = max_diag * f64::EPSILON;
        let scale: Vec<f64> = normal.diagonal().iter().map(|d| d.max(floor)).collect();

        loop {
            let mut system = normal.clone();
            for (j, d) in scale.iter().enumerate() {
                system[(j, j)] += damping * d;
            }
            let step = system.cholesky().map(|c| c.solve(&gradient));
            let step = match step {
                Some(step) if step.iter().all(|v| v.is_finite()) => step,
                _ => {
                    damping *= opts.damping_up_factor;
                    if damping > opts.max_damping {
                        return done(p, sse, iteration, Termination::DampingMax, trace);
                    }
                    continue;
                }
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let step_norm = norm(step.as_slice());
            let p_norm = norm(&p);
            let trial_sse = residuals_raw(model, &trial, s)
                .ok()
                .map(|tr| (tr.iter().map(|x| x * x).sum::<f64>(), tr))
                .filter(|(v, _)| v.is_finite());
            match trial_sse {
                Some((new_sse, new_r)) if new_sse < sse => {
                    let decrease = (sse - new_sse) / sse;
                    p = trial;
                    sse = new_sse;
                    r = DVector::from_vec(new_r);
                    trace.push(sse);
                    damping = (damping / opts.damping_down_factor).max(f64::MIN_POSITIVE);
                    if decrease <= opts.cost_tolerance {
                        return done(p, sse, iteration, Termination::CostTolerance, trace);
                    }
                    if step_norm <= opts.param_tolerance * (p_norm + opts.param_tolerance) {
                        return done(p, sse, iteration, Termination::ParamTolerance, trace);
                    }
                    break;
                }
                _ => {
                    // A rejected step this small cannot be improved on at working precision.
                    if step_norm <= f64::EPSILON * (p_norm + f64::EPSILON) {
                        return done(p, sse, iteration, Termination::ParamTolerance, trace);
                    }
                    damping *= opts.damping_up_factor;
                    if damping > opts.max_damping {
                        return done(p, sse, iteration, Termination::DampingMax, trace);
                    }
                }
            }
        }
    }
    done(
        p,
        sse,
        opts.max_iterations,
        Termination::MaxIterations,
        trace,
    )
}

fn check_sizes(model: ModelId, s: &TimeSeries) -> Result<(), FitError> {
    let k = model.k();
    if s.len() <= k {
        return Err(FitError::TooFewPoints {
            model,
            n: s.len(),
            k,
        });
    }
    Ok(())
}

/// Single local fit from `init`.
pub fn fit(s: &TimeSeries, init: &ParamVector, opts: &FitOptions) -> Result<FitResult, FitError> {
    fit_indexed(s, init, opts, 0)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
fn fit_indexed(
    s: &TimeSeries,
    init: &ParamVector,
    opts: &FitOptions,
    start_index: usize,
) -> Result<FitResult, FitError> {
    opts.validate()?;
    let model = init.model();
    check_sizes(model, s)?;
    let sst = s.stats().sst;
    if !(sst > 0.0) {
        return Err(MetricsError::ZeroVariance.into());
    }
    let out = levenberg_marquardt(model, s, init.values(), opts)?;
    let statistics = FitStatistics::from_sums(out.sse, sst, s.len(), model.k())?;
    Ok(FitResult {
        model_id: model,
        params: ParamVector::new(model, out.params)?,
        converged: out.termination.converged(),
        iterations: out.iterations,
        final_sse: out.sse,
        termination: out.termination,
        start_index,
        statistics,
        sse_trace: out.trace,
    })
}

/// Start `i ≥ 1` scales every component of `base` by `exp(u)`, `u` uniform on
/// `[-scale, scale]`, from a ChaCha8 stream keyed by `(seed, i)`.
pub fn perturbed_start(base: &ParamVector, scale: f64, seed: u64, start_index: usize) -> Vec<f64> {
    if start_index == 0 {
        return base.values().to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start_index as u64);
    base.values()
        .iter()
        .map(|v| v * rng.random_range(-scale..=scale).exp())
        .collect()
}

/// Multi-start fit from the data-driven [`initial_guess`].
pub fn multi_start_fit(
    model: ModelId,
    s: &TimeSeries,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    check_sizes(model, s)?;
    let base = initial_guess(model, s)?;
    multi_start_fit_from(s, &base, opts)
}

/// Multi-start fit around an explicit base point (start 0 is `base` itself).
///
/// Starts run in parallel; each draws from its own stream so the winner does
/// not depend on scheduling. Ties in SSE go to the lowest start index.
pub fn multi_start_fit_from(
    s: &TimeSeries,
    base: &ParamVector,
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    opts.validate()?;
    let model = base.model();
    check_sizes(model, s)?;
    let outcomes: Vec<Result<FitResult, FitError>> = (0..opts.starts)
        .into_par_iter()
        .map(|i| {
            let values = perturbed_start(base, opts.perturbation_scale, opts.seed, i);
            let init = ParamVector::new(model, values)?;
            fit_indexed(s, &init, opts, i)
        })
        .collect();

    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for outcome in outcomes {
        match outcome {
            Ok(res) => {
                if best.as_ref().is_none_or(|b| res.final_sse < b.final_sse) {
                    best = Some(res);
                }
            }
            Err(e @ (FitError::Metrics(_) | FitError::InvalidOptions(_))) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| FitError::AllStartsFailed {
        model,
        last: Box::new(last_err.expect("at least one start ran")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::build_series;
    use crate::models::evaluate_series;
    use proptest::prelude::*;

    fn series(model: ModelId, p: &[f64], times: Vec<f64>) -> TimeSeries {
        let params = ParamVector::new(model, p.to_vec()).unwrap();
        let values = evaluate_series(&params, &times).unwrap();
        build_series(times, values).unwrap()
    }

    fn grid(start: f64, end: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn residuals_of_exact_data_vanish() {
        let s = series(ModelId::Exp2, &[1.0, 0.1, 2.0, -0.2], grid(0.0, 10.0, 15));
        let p = ParamVector::new(ModelId::Exp2, vec![1.0, 0.1, 2.0, -0.2]).unwrap();
        assert!(residuals(&p, &s).unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn residuals_against_zero_model() {
        let s = build_series(vec![0.0, 1.0], vec![3.0, 4.0]).unwrap();
        let zero = ParamVector::new(ModelId::Malthusian, vec![0.0, 0.0]).unwrap();
        assert_eq!(residuals(&zero, &s).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn residuals_report_domain_index() {
        let s = build_series(vec![-1.0, 1.0], vec![3.0, 4.0]).unwrap();
        let p = ParamVector::new(ModelId::McNally1971, vec![1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            residuals(&p, &s),
            Err(ModelError::DomainAt { index: 0, .. })
        ));
    }

    #[test]
    fn jacobian_simple_cases() {
        let p = ParamVector::new(ModelId::Malthusian, vec![76.09, 0.3]).unwrap();
        let j = jacobian_fd(&p, &[0.0]).unwrap();
        assert!((j[(0, 0)] - 1.0).abs() < 1e-9);

        let p = ParamVector::new(ModelId::Malthusian, vec![76.09, 0.0]).unwrap();
        let j = jacobian_fd(&p, &[10.0]).unwrap();
        assert!((j[(0, 1)] - 760.9).abs() <= 1e-6 * 760.9);

        let p = ParamVector::new(ModelId::Gauss2, vec![2.0, 3.0, 1.5, 1.0, 9.0, 0.5]).unwrap();
        let j = jacobian_fd(&p, &[3.0]).unwrap();
        assert!((j[(0, 0)] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jacobian_falls_back_at_domain_edge() {
        // mcnally at t = 0 with b at the edge: b - h leaves the domain.
        let p = ParamVector::new(ModelId::McNally1971, vec![1.0, 1e-9, 0.0]).unwrap();
        let j = jacobian_fd(&p, &[0.0, 1.0]).unwrap();
        assert!(j.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn recovers_malthusian() {
        let s = series(ModelId::Malthusian, &[76.09, 0.0128], grid(0.0, 123.0, 50));
        let init = ParamVector::new(ModelId::Malthusian, vec![50.0, 0.05]).unwrap();
        let res = fit(&s, &init, &FitOptions::default()).unwrap();
        assert!(res.converged, "{:?}", res.termination);
        let p = res.params.values();
        assert!((p[0] / 76.09 - 1.0).abs() < 1e-6, "{p:?}");
        assert!((p[1] / 0.0128 - 1.0).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn recovers_mcmillan1980_curve() {
        let truth = [88.42, 1.689, -0.01136];
        let s = series(
            ModelId::McMillan1980,
            &truth,
            (0..124).map(f64::from).collect(),
        );
        let init = ParamVector::new(ModelId::McMillan1980, vec![80.0, 1.5, -0.012]).unwrap();
        let res = fit(&s, &init, &FitOptions::default()).unwrap();
        assert!(res.final_sse <= 1e-10 * s.stats().sst, "{}", res.final_sse);
    }

    #[test]
    fn rejects_n_equal_k() {
        let s = build_series(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        let init = ParamVector::new(ModelId::Malthusian, vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            fit(&s, &init, &FitOptions::default()),
            Err(FitError::TooFewPoints { n: 2, k: 2, .. })
        ));
    }

    #[test]
    fn rejects_init_outside_domain() {
        let s = build_series(vec![-1.0, 1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let init = ParamVector::new(ModelId::McNally1971, vec![1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            fit(&s, &init, &FitOptions::default()),
            Err(FitError::InitDomain(_))
        ));
    }

    #[test]
    fn single_start_equals_plain_fit() {
        let s = series(ModelId::Exp2, &[2.0, 0.05, 1.0, -0.3], grid(0.0, 10.0, 30));
        let opts = FitOptions {
            starts: 1,
            ..FitOptions::default()
        };
        let multi = multi_start_fit(ModelId::Exp2, &s, &opts).unwrap();
        let guess = initial_guess(ModelId::Exp2, &s).unwrap();
        let single = fit(&s, &guess, &opts).unwrap();
        assert_eq!(multi, single);
    }

    #[test]
    fn multi_start_is_deterministic_and_no_worse() {
        let truth = [2.0, 5.0, 1.2, 1.0, 12.0, 2.0];
        let s = series(ModelId::Gauss2, &truth, grid(0.0, 20.0, 40));
        let opts = FitOptions {
            starts: 8,
            seed: 42,
            ..FitOptions::default()
        };
        let a = multi_start_fit(ModelId::Gauss2, &s, &opts).unwrap();
        let b = multi_start_fit(ModelId::Gauss2, &s, &opts).unwrap();
        assert_eq!(a, b);
        let guess = initial_guess(ModelId::Gauss2, &s).unwrap();
        let single = fit(&s, &guess, &opts).unwrap();
        assert!(a.final_sse <= single.final_sse);
    }

    #[test]
    fn multi_start_fits_sin3_reference_curve() {
        let truth = [
            38.29, 0.001099, 1.039, 3.117, 0.3428, -0.4052, 1.508, 0.7265, 1.175,
        ];
        let s = series(ModelId::Sin3, &truth, grid(0.0, 24.0, 50));
        let opts = FitOptions {
            seed: 3,
            ..FitOptions::default()
        };
        let res = multi_start_fit(ModelId::Sin3, &s, &opts).unwrap();
        assert!(
            res.final_sse <= 1e-8 * s.stats().sst,
            "sse {} sst {}",
            res.final_sse,
            s.stats().sst
        );
    }

    #[test]
    fn zero_variance_is_an_error() {
        let s = build_series(grid(0.0, 1.0, 5), vec![2.0; 5]).unwrap();
        let init = ParamVector::new(ModelId::Malthusian, vec![1.0, 0.1]).unwrap();
        assert!(matches!(
            fit(&s, &init, &FitOptions::default()),
            Err(FitError::Metrics(MetricsError::ZeroVariance))
        ));
    }

    #[test]
    fn perturbations_differ_per_start_and_repeat_per_seed() {
        let base = ParamVector::new(ModelId::Exp2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(perturbed_start(&base, 0.5, 1, 0), base.values());
        let a = perturbed_start(&base, 0.5, 1, 1);
        assert_eq!(a, perturbed_start(&base, 0.5, 1, 1));
        assert_ne!(a, perturbed_start(&base, 0.5, 1, 2));
        assert_ne!(a, perturbed_start(&base, 0.5, 2, 1));
        for (v, b) in a.iter().zip(base.values()) {
            let ratio = v / b;
            assert!(ratio >= (-0.5f64).exp() && ratio <= 0.5f64.exp());
        }
    }

    /// Fourier coefficients are linear in y, so scaling the data scales them.
    #[test]
    fn fourier_fit_scales_with_data() {
        let truth = [33.23, -1.456, 2.644, 0.2962, 0.2962, 0.3532];
        let times = grid(0.0, 24.0, 50);
        let clean = series(ModelId::Fourier2, &truth, times.clone());
        let noisy: Vec<f64> = clean
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| v + 0.05 * ((i * 7 % 11) as f64 - 5.0))
            .collect();
        let alpha = 3.5;
        let base = build_series(times.clone(), noisy.clone()).unwrap();
        let scaled = build_series(times, noisy.iter().map(|v| alpha * v).collect()).unwrap();

        let opts = FitOptions {
            cost_tolerance: 1e-15,
            param_tolerance: 1e-15,
            ..FitOptions::default()
        };
        let ra = fit(
            &base,
            &ParamVector::new(ModelId::Fourier2, truth.to_vec()).unwrap(),
            &opts,
        )
        .unwrap();
        let mut start = truth.to_vec();
        start[..5].iter_mut().for_each(|v| *v *= alpha);
        let rb = fit(
            &scaled,
            &ParamVector::new(ModelId::Fourier2, start).unwrap(),
            &opts,
        )
        .unwrap();
        let (pa, pb) = (ra.params.values(), rb.params.values());
        for j in 0..5 {
            assert!(
                (pb[j] - alpha * pa[j]).abs() <= 1e-7 * (alpha * pa[j]).abs().max(1.0),
                "{j}: {pa:?} {pb:?} {:?} {:?}",
                ra.termination,
                rb.termination
            );
        }
        assert!((pb[5] - pa[5]).abs() <= 1e-7 * pa[5].abs());
        assert!((rb.final_sse - alpha * alpha * ra.final_sse).abs() <= 1e-7 * rb.final_sse);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn accepted_sse_strictly_decreases(
            a in 0.5f64..3.0, b in -0.3f64..0.3, c in 0.5f64..3.0, d in -0.3f64..0.3,
            jitter in 0.0f64..0.2,
        ) {
            let times = grid(0.0, 10.0, 25);
            let values: Vec<f64> = times
                .iter()
                .enumerate()
                .map(|(i, t)| a * (b * t).exp() + c * (d * t).exp() + jitter * ((i * 5 % 7) as f64 - 3.0))
                .collect();
            let s = build_series(times, values).unwrap();
            let init = ParamVector::new(ModelId::Exp2, vec![1.0, 0.1, 1.0, -0.1]).unwrap();
            let res = fit(&s, &init, &FitOptions::default()).unwrap();
            for w in res.sse_trace.windows(2) {
                prop_assert!(w[1] < w[0]);
            }
            prop_assert!(res.final_sse <= res.sse_trace[0]);
            prop_assert_eq!(res.final_sse, *res.sse_trace.last().unwrap());
        }
    }
}
