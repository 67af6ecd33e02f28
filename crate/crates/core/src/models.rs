//! Registry of the parametric model families and their evaluation rules.
//!
//! Every family is identified by a stable lowercase string (`yang1989`,
//! `sin3`, ...) used verbatim on the command line and in JSON reports.
//! Parameters are passed as plain slices in catalog order internally; the
//! named [`ParamVector`] is the public, serializable form.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::TimeSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
    #[error("{model}: outside the model domain at t = {t}: {reason}")]
    Domain {
        model: ModelId,
        t: f64,
        reason: &'static str,
    },
    #[error("{model}: domain error at index {index}: {source}")]
    DomainAt {
        model: ModelId,
        index: usize,
        #[source]
        source: Box<ModelError>,
    },
    #[error("{model}: missing parameter `{name}`")]
    IncompleteParams { model: ModelId, name: &'static str },
    #[error("{model}: unexpected parameter `{name}`")]
    UnknownParam { model: ModelId, name: String },
    #[error("{model}: expected {expected} parameters, got {got}")]
    WrongParamCount {
        model: ModelId,
        expected: usize,
        got: usize,
    },
    #[error("{model}: parameter `{name}` is not finite")]
    NonFiniteParam { model: ModelId, name: &'static str },
    #[error("{model}: needs at least {k} points, series has {n}")]
    TooFewPoints { model: ModelId, n: usize, k: usize },
}

impl ModelError {
    /// True for errors raised by a domain guard (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            ModelError::Domain { .. } | ModelError::DomainAt { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    Malthusian,
    Nelder1961,
    McMillan1980,
    McMillan1970,
    McNally1971,
    Yang1989,
    ExpSin,
    Fourier2,
    Gauss2,
    Exp2,
    Sin3,
    DistrExp,
    Rat21,
}

/// Which case study a family was proposed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Population,
    Temperature,
    Price,
    /// Shared by the temperature and price studies.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub id: ModelId,
    pub param_names: &'static [&'static str],
    pub family: Family,
    /// The formula is implemented exactly as printed even though the printed
    /// form is garbled or implausible; callers should warn when using it.
    pub literal_rendering: bool,
}

impl ModelSpec {
    pub fn k(&self) -> usize {
        self.param_names.len()
    }

    pub fn evaluate(&self, params: &[f64], t: f64) -> Result<f64, ModelError> {
        self.id.eval(params, t)
    }
}

const CATALOG: [ModelSpec; 13] = [
    ModelSpec {
        id: ModelId::Malthusian,
        param_names: &["p0", "k"],
        family: Family::Population,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Nelder1961,
        param_names: &["A", "k", "lambda", "theta"],
        family: Family::Population,
        literal_rendering: true,
    },
    ModelSpec {
        id: ModelId::McMillan1980,
        param_names: &["A", "k1", "k2"],
        family: Family::Population,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::McMillan1970,
        param_names: &["a", "c", "c1", "d", "x"],
        family: Family::Population,
        literal_rendering: true,
    },
    ModelSpec {
        id: ModelId::McNally1971,
        param_names: &["a", "b", "c"],
        family: Family::Population,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Yang1989,
        param_names: &["a", "c", "d", "x"],
        family: Family::Population,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::ExpSin,
        param_names: &["a0", "a1", "a2", "b1", "f"],
        family: Family::Temperature,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Fourier2,
        param_names: &["a0", "a1", "b1", "a2", "b2", "w"],
        family: Family::Temperature,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Gauss2,
        param_names: &["a1", "b1", "c1", "a2", "b2", "c2"],
        family: Family::Shared,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Exp2,
        param_names: &["a", "b", "c", "d"],
        family: Family::Shared,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::Sin3,
        param_names: &["a1", "b1", "c1", "a2", "b2", "c2", "a3", "b3", "c3"],
        family: Family::Shared,
        literal_rendering: false,
    },
    ModelSpec {
        id: ModelId::DistrExp,
        param_names: &["A", "B", "C", "F", "G"],
        family: Family::Price,
        literal_rendering: true,
    },
    ModelSpec {
        id: ModelId::Rat21,
        param_names: &["p1", "p2", "p3", "q1"],
        family: Family::Price,
        literal_rendering: false,
    },
];

/// All registered families in a stable order.
pub fn catalog() -> &'static [ModelSpec] {
    &CATALOG
}

impl ModelId {
    pub const ALL: [ModelId; 13] = [
        ModelId::Malthusian,
        ModelId::Nelder1961,
        ModelId::McMillan1980,
        ModelId::McMillan1970,
        ModelId::McNally1971,
        ModelId::Yang1989,
        ModelId::ExpSin,
        ModelId::Fourier2,
        ModelId::Gauss2,
        ModelId::Exp2,
        ModelId::Sin3,
        ModelId::DistrExp,
        ModelId::Rat21,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Malthusian => "malthusian",
            ModelId::Nelder1961 => "nelder1961",
            ModelId::McMillan1980 => "mcmillan1980",
            ModelId::McMillan1970 => "mcmillan1970",
            ModelId::McNally1971 => "mcnally1971",
            ModelId::Yang1989 => "yang1989",
            ModelId::ExpSin => "exp_sin",
            ModelId::Fourier2 => "fourier2",
            ModelId::Gauss2 => "gauss2",
            ModelId::Exp2 => "exp2",
            ModelId::Sin3 => "sin3",
            ModelId::DistrExp => "distr_exp",
            ModelId::Rat21 => "rat21",
        }
    }

    pub fn spec(self) -> &'static ModelSpec {
        // CATALOG is declared in the same order as the enum.
        &CATALOG[self as usize]
    }

    pub fn k(self) -> usize {
        self.spec().k()
    }

    fn domain(self, t: f64, reason: &'static str) -> ModelError {
        ModelError::Domain {
            model: self,
            t,
            reason,
        }
    }

    /// Evaluates the formula with parameters in catalog order.
    ///
    /// Guard violations and non-finite results are both reported as domain
    /// errors.
    pub fn eval(self, p: &[f64], t: f64) -> Result<f64, ModelError> {
        if p.len() != self.k() {
            return Err(ModelError::WrongParamCount {
                model: self,
                expected: self.k(),
                got: p.len(),
            });
        }
        let y = match self {
            ModelId::Malthusian => p[0] * (p[1] * t).exp(),
            ModelId::Nelder1961 => {
                let (a, k, lambda, theta) = (p[0], p[1], p[2], p[3]);
                if theta == 0.0 {
                    return Err(self.domain(t, "theta must be non-zero"));
                }
                a * (1.0 + (-(lambda * k * t) / theta).exp()).powf(-theta)
            }
            ModelId::McMillan1980 => {
                let (a, k1, k2) = (p[0], p[1], p[2]);
                a * ((-k2 * t).exp() - (-k1 * t).exp())
            }
            ModelId::McMillan1970 => {
                let (a, c, c1, d, x) = (p[0], p[1], p[2], p[3], p[4]);
                if x + c1 == 0.0 {
                    return Err(self.domain(t, "x + c1 must be non-zero"));
                }
                let denom = (x + c) - (-x * t).exp() / (x + c1);
                if denom == 0.0 {
                    return Err(self.domain(t, "denominator vanishes"));
                }
                a * (-x * t - c * t + c * d).exp() / denom
            }
            ModelId::McNally1971 => {
                let (a, b, c) = (p[0], p[1], p[2]);
                if t < 0.0 {
                    return Err(self.domain(t, "t^b undefined for t < 0"));
                }
                if t == 0.0 {
                    if b > 0.0 {
                        return Ok(0.0);
                    }
                    return Err(self.domain(t, "0^b undefined for b <= 0"));
                }
                a * t.powf(b) * (-c * t).exp()
            }
            ModelId::Yang1989 => {
                let (a, c, d, x) = (p[0], p[1], p[2], p[3]);
                a * (-x * t).exp() / (1.0 + (-c * (t - d)).exp())
            }
            ModelId::ExpSin => {
                let (a0, a1, a2, b1, f) = (p[0], p[1], p[2], p[3], p[4]);
                (a0 + b1 * (a1 * t - a2).sin()) * (f * t).exp()
            }
            ModelId::Fourier2 => {
                let (a0, a1, b1, a2, b2, w) = (p[0], p[1], p[2], p[3], p[4], p[5]);
                let wt = w * t;
                a0 + a1 * wt.cos() + b1 * wt.sin() + a2 * (2.0 * wt).cos() + b2 * (2.0 * wt).sin()
            }
            ModelId::Gauss2 => {
                if p[2] == 0.0 || p[5] == 0.0 {
                    return Err(self.domain(t, "gaussian widths must be non-zero"));
                }
                let bump = |a: f64, b: f64, c: f64| a * (-((t - b) / c).powi(2)).exp();
                bump(p[0], p[1], p[2]) + bump(p[3], p[4], p[5])
            }
            ModelId::Exp2 => p[0] * (p[1] * t).exp() + p[2] * (p[3] * t).exp(),
            ModelId::Sin3 => p
                .chunks_exact(3)
                .map(|w| w[0] * (w[1] * t + w[2]).sin())
                .sum(),
            ModelId::DistrExp => {
                let (a, b, c, f, g) = (p[0], p[1], p[2], p[3], p[4]);
                if t < 0.0 {
                    return Err(self.domain(t, "t^G undefined for t < 0"));
                }
                if t == 0.0 && g < 0.0 {
                    return Err(self.domain(t, "0^G undefined for G < 0"));
                }
                let base = a * t * t + b * t + c;
                if base <= 0.0 {
                    return Err(self.domain(t, "base At^2 + Bt + C must be positive"));
                }
                base.powf(f * t.powf(g))
            }
            ModelId::Rat21 => {
                let (p1, p2, p3, q1) = (p[0], p[1], p[2], p[3]);
                let denom = t + q1;
                if denom.abs() <= f64::EPSILON * t.abs().max(q1.abs()) {
                    return Err(self.domain(t, "pole at t = -q1"));
                }
                (p1 * t * t + p2 * t + p3) / denom
            }
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(self.domain(t, "non-finite value"))
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

impl Serialize for ModelId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ModelId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A complete, finite set of named parameters for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    model: ModelId,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(model: ModelId, values: Vec<f64>) -> Result<Self, ModelError> {
        let spec = model.spec();
        if values.len() != spec.k() {
            return Err(ModelError::WrongParamCount {
                model,
                expected: spec.k(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteParam {
                model,
                name: spec.param_names[i],
            });
        }
        Ok(Self { model, values })
    }

    /// Builds from a name → value map; every name must be present and no extras allowed.
    pub fn from_map(model: ModelId, map: &IndexMap<String, f64>) -> Result<Self, ModelError> {
        let spec = model.spec();
        if let Some(extra) = map.keys().find(|k| !spec.param_names.contains(&k.as_str())) {
            return Err(ModelError::UnknownParam {
                model,
                name: extra.clone(),
            });
        }
        let values = spec
            .param_names
            .iter()
            .map(|&name| {
                map.get(name)
                    .copied()
                    .ok_or(ModelError::IncompleteParams { model, name })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(model, values)
    }

    pub fn model(&self) -> ModelId {
        self.model
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let i = self
            .model
            .spec()
            .param_names
            .iter()
            .position(|&n| n == name)?;
        Some(self.values[i])
    }

    pub fn to_map(&self) -> IndexMap<String, f64> {
        self.model
            .spec()
            .param_names
            .iter()
            .zip(&self.values)
            .map(|(n, v)| (n.to_string(), *v))
            .collect()
    }
}

pub fn evaluate(params: &ParamVector, t: f64) -> Result<f64, ModelError> {
    params.model.eval(&params.values, t)
}

/// Evaluates at every time; a domain failure reports the offending index.
pub fn evaluate_series(params: &ParamVector, times: &[f64]) -> Result<Vec<f64>, ModelError> {
    eval_at(params.model, &params.values, times)
}

pub(crate) fn eval_at(model: ModelId, p: &[f64], times: &[f64]) -> Result<Vec<f64>, ModelError> {
    times
        .iter()
        .enumerate()
        .map(|(index, &t)| {
            model.eval(p, t).map_err(|e| ModelError::DomainAt {
                model,
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Deterministic starting point derived from the data.
///
/// Shared heuristics: offsets start at the mean, amplitudes at half the
/// range, exponential rates at `ln(y_n / y_1) / (t_n - t_1)` (0 when the end
/// values differ in sign), frequencies at multiples of `2π / (t_n - t_1)`,
/// phases at 0, Gaussian centres at the two largest observations with widths
/// of a quarter of the span.
pub fn initial_guess(model: ModelId, s: &TimeSeries) -> Result<ParamVector, ModelError> {
    let k = model.k();
    if s.len() < k {
        return Err(ModelError::TooFewPoints {
            model,
            n: s.len(),
            k,
        });
    }
    let h = Heuristics::of(s);
    let values = match model {
        ModelId::Malthusian => {
            let (t1, y1) = s.first();
            vec![y1 * (-h.rate * t1).exp(), h.rate]
        }
        ModelId::Nelder1961 => {
            let (_, yn) = s.last();
            vec![yn, 1.0, 4.0 / h.span, 1.0]
        }
        ModelId::McMillan1980 => {
            // Late-time growth comes from exp(-k2 t); exp(-k1 t) is the fast transient.
            let (tn, yn) = s.last();
            let k2 = -h.rate;
            let k1 = 1.0 / h.mean_step;
            let a = yn / ((-k2 * tn).exp() - (-k1 * tn).exp());
            vec![a, k1, k2]
        }
        ModelId::McMillan1970 => {
            // exp(-(x + c) t) carries the trend; a large c1 keeps the denominator near x + c.
            let (t1, y1) = s.first();
            let growth = if h.rate != 0.0 { -h.rate } else { 1.0 / h.span };
            let (c, c1, d, x) = (growth, 1e6, 0.0, 0.0);
            let denom = (x + c) - (-x * t1).exp() / (x + c1);
            vec![y1 * denom * ((x + c) * t1).exp(), c, c1, d, x]
        }
        ModelId::McNally1971 => mcnally_guess(s, &h),
        ModelId::Yang1989 => {
            let (t1, _) = s.first();
            let (tn, yn) = s.last();
            let x = -h.rate;
            let c = 4.0 / h.span;
            let d = t1;
            let a = yn * (x * tn).exp() * (1.0 + (-c * (tn - d)).exp());
            vec![a, c, d, x]
        }
        ModelId::ExpSin => vec![h.mean, h.base_freq, 0.0, h.amplitude, h.rate],
        ModelId::Fourier2 => vec![h.mean, h.amplitude, 0.0, 0.0, 0.0, h.base_freq],
        ModelId::Gauss2 => {
            let (i, j) = h.two_largest;
            let width = h.span / 4.0;
            vec![
                s.values()[i],
                s.times()[i],
                width,
                s.values()[j],
                s.times()[j],
                width,
            ]
        }
        ModelId::Exp2 => {
            let (t1, y1) = s.first();
            let d = if h.rate != 0.0 {
                2.0 * h.rate
            } else {
                1.0 / h.span
            };
            vec![
                0.9 * y1 * (-h.rate * t1).exp(),
                h.rate,
                0.1 * y1 * (-d * t1).exp(),
                d,
            ]
        }
        ModelId::Sin3 => {
            let a = h.amplitude;
            let w = h.base_freq;
            vec![a, w, 0.0, a, 2.0 * w, 0.0, a, 3.0 * w, 0.0]
        }
        ModelId::DistrExp => {
            // Base fixed at e so that y = exp(F t): F from the last positive point.
            let (tn, yn) = s.last();
            let f = if yn > 0.0 && tn > 0.0 {
                yn.ln() / tn
            } else {
                0.0
            };
            vec![0.0, 0.0, std::f64::consts::E, f, 1.0]
        }
        ModelId::Rat21 => rat21_guess(s, &h),
    };
    let guess = ParamVector::new(model, values)?;
    evaluate_series(&guess, s.times())?;
    Ok(guess)
}

struct Heuristics {
    mean: f64,
    amplitude: f64,
    rate: f64,
    span: f64,
    mean_step: f64,
    base_freq: f64,
    two_largest: (usize, usize),
}

impl Heuristics {
    fn of(s: &TimeSeries) -> Self {
        let stats = s.stats();
        let (t1, y1) = s.first();
        let (tn, yn) = s.last();
        let (min, max) = s
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        // A single-point series has no span; fall back to unit scale.
        let span = if tn > t1 { tn - t1 } else { 1.0 };
        let rate = if y1 * yn > 0.0 && tn > t1 {
            (yn / y1).ln() / (tn - t1)
        } else {
            0.0
        };
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s.values()[b].total_cmp(&s.values()[a]).then(a.cmp(&b)));
        let two_largest = (order[0], *order.get(1).unwrap_or(&order[0]));
        Self {
            mean: stats.mean,
            amplitude: (max - min) / 2.0,
            rate,
            span,
            mean_step: span / (s.len().max(2) - 1) as f64,
            base_freq: TAU / span,
            two_largest,
        }
    }
}

fn mcnally_guess(s: &TimeSeries, h: &Heuristics) -> Vec<f64> {
    // ln y = ln a + b ln t - c t, fitted by linear least squares on the usable points.
    let rows: Vec<(f64, f64)> = s.iter().filter(|&(t, y)| t > 0.0 && y > 0.0).collect();
    if rows.len() >= 3 && rows.len() * 2 >= s.len() {
        let design = DMatrix::from_fn(rows.len(), 3, |i, j| match j {
            0 => 1.0,
            1 => rows[i].0.ln(),
            _ => -rows[i].0,
        });
        let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1.ln()));
        if let Ok(sol) = design.svd(true, true).solve(&rhs, 1e-12) {
            let (ln_a, b, c) = (sol[0], sol[1], sol[2]);
            if ln_a.is_finite() && b > 0.0 && c.is_finite() {
                return vec![ln_a.exp(), b, c];
            }
        }
    }
    vec![h.mean, 0.5, -h.rate]
}

fn rat21_guess(s: &TimeSeries, h: &Heuristics) -> Vec<f64> {
    // Place the pole a full span before the first sample, then fit the
    // numerator y (t + q1) ≈ p1 t² + p2 t + p3 linearly.
    let (t1, _) = s.first();
    let q1 = h.span - t1;
    let design = DMatrix::from_fn(s.len(), 3, |i, j| s.times()[i].powi(2 - j as i32));
    let rhs = DVector::from_iterator(s.len(), s.iter().map(|(t, y)| y * (t + q1)));
    match design.svd(true, true).solve(&rhs, 1e-12) {
        Ok(sol) if sol.iter().all(|v| v.is_finite()) => vec![sol[0], sol[1], sol[2], q1],
        _ => vec![0.0, h.mean, h.mean * q1, q1],
    }
}
