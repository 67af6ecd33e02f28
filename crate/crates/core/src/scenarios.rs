//! Closed-form solutions for the three case-study ODEs and synthetic data
//! generation on top of them.
//!
//! * Population: Malthusian growth `p' = k p` and the logistic model
//!   `p' = -A p (p - p1)`; `t` is years since 1900, `p` is millions.
//! * Building temperature: one lumped compartment with a sinusoidal outside
//!   temperature `M(t) = M0 - B cos(ωt)`, constant internal heating `H0` and
//!   a proportional thermostat `U(t) = K_U (T_D - T)`; `t` in hours.
//! * Market price: linear demand/supply with price adjustment
//!   `p' = λ (q_d - q_s)`, with and without expectation terms; `t` in months.
//!
//! Noise is drawn from ChaCha8 (`rand_chacha`) seeded with
//! `SeedableRng::seed_from_u64(seed)` and mapped through the ziggurat
//! `StandardNormal` sampler of `rand_distr`. Both algorithms are fully
//! specified and platform independent, so a `(seed, sd)` pair always
//! reproduces the same series.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{SeriesError, TimeSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("logistic denominator vanishes at t = {t}")]
    Pole { t: f64 },
    #[error("degenerate configuration: {0}")]
    DegenerateConfig(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Relative singularity threshold for the logistic denominator.
pub const POLE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    /// Population at t = 0 (millions).
    pub p0: f64,
    /// Malthusian growth rate (1/year).
    pub k: f64,
    /// Second root of the logistic right-hand side (millions).
    pub p1: f64,
    /// Logistic coefficient (1/(millions·year)).
    #[serde(rename = "A")]
    pub a: f64,
}

impl PopulationConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if ![self.p0, self.k, self.p1, self.a]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(ScenarioError::InvalidConfig(
                "population constants must be finite",
            ));
        }
        if self.p0 <= 0.0 {
            return Err(ScenarioError::InvalidConfig("p0 must be positive"));
        }
        Ok(())
    }
}

pub fn malthusian(cfg: &PopulationConfig, t: f64) -> f64 {
    cfg.p0 * (cfg.k * t).exp()
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN denominator is a pole too
pub fn logistic(cfg: &PopulationConfig, t: f64) -> Result<f64, ScenarioError> {
    let denom = cfg.p0 + (cfg.p1 - cfg.p0) * (-cfg.a * cfg.p1 * t).exp();
    if !(denom.abs() >= POLE_EPSILON * (cfg.p0 * cfg.p1).abs()) {
        return Err(ScenarioError::Pole { t });
    }
    Ok(cfg.p0 * cfg.p1 / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingConfig {
    /// Building heat-transfer constant (1/hr).
    #[serde(rename = "K")]
    pub k: f64,
    /// Furnace / air-conditioner proportionality constant (1/hr).
    #[serde(rename = "K_U")]
    pub k_u: f64,
    /// Thermostat set point.
    #[serde(rename = "T_D")]
    pub t_d: f64,
    /// Constant internal heating rate (deg/hr).
    #[serde(rename = "H0")]
    pub h0: f64,
    /// Mean outside temperature.
    #[serde(rename = "M0")]
    pub m0: f64,
    /// Outside temperature amplitude.
    #[serde(rename = "B")]
    pub b: f64,
    /// Inside temperature at t = 0.
    #[serde(rename = "T0")]
    pub t0: f64,
}

impl BuildingConfig {
    /// One cycle per 24 hours.
    pub const OMEGA: f64 = PI / 12.0;

    pub fn k1(&self) -> f64 {
        self.k + self.k_u
    }

    pub fn b2(&self) -> f64 {
        (self.k_u * self.t_d + self.k * self.m0 + self.h0) / self.k1()
    }

    pub fn b1(&self) -> f64 {
        self.b * self.k / self.k1()
    }

    pub fn f1(&self, t: f64) -> f64 {
        let r = Self::OMEGA / self.k1();
        ((Self::OMEGA * t).cos() + r * (Self::OMEGA * t).sin()) / (1.0 + r * r)
    }

    /// Integration constant chosen so that T(0) = T0.
    pub fn c(&self) -> f64 {
        self.t0 - self.b2() + self.b1() * self.f1(0.0)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let all = [
            self.k, self.k_u, self.t_d, self.h0, self.m0, self.b, self.t0,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(ScenarioError::InvalidConfig(
                "building constants must be finite",
            ));
        }
        if self.k1() == 0.0 {
            return Err(ScenarioError::DegenerateConfig("K + K_U must be non-zero"));
        }
        Ok(())
    }

    /// Outside temperature, minimum at midnight.
    pub fn outside(&self, t: f64) -> f64 {
        self.m0 - self.b * (Self::OMEGA * t).cos()
    }
}

pub fn building_temperature(cfg: &BuildingConfig, t: f64) -> Result<f64, ScenarioError> {
    cfg.validate()?;
    Ok(cfg.b2() - cfg.b1() * cfg.f1(t) + cfg.c() * (-cfg.k1() * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    /// Price adjustment speed.
    pub lambda: f64,
    /// Price at t = 0.
    pub p_init: f64,
    /// Explicit integration constant for the expectations solution; derived
    /// from `p_init` when absent.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Use supply `-s0 - s1 p - s2 p'` instead of `-s0 + s1 p - s2 p'`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub strict_eq21_signs: bool,
}

impl MarketConfig {
    pub fn a(&self) -> f64 {
        self.d0 + self.s0
    }

    /// Net price slope of excess demand.
    pub fn b(&self) -> f64 {
        if self.strict_eq21_signs {
            self.d1 - self.s1
        } else {
            self.d1 + self.s1
        }
    }

    pub fn c(&self) -> f64 {
        self.d2 + self.s2
    }

    pub fn integration_constant(&self) -> f64 {
        self.d.unwrap_or_else(|| self.p_init - self.a() / self.b())
    }

    pub fn equilibrium(&self) -> Result<f64, ScenarioError> {
        if self.b() == 0.0 {
            return Err(ScenarioError::DegenerateConfig("d1 + s1 must be non-zero"));
        }
        Ok(self.a() / self.b())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let all = [
            self.d0,
            self.d1,
            self.d2,
            self.s0,
            self.s1,
            self.s2,
            self.lambda,
            self.p_init,
        ];
        if !all.iter().chain(self.d.iter()).all(|v| v.is_finite()) {
            return Err(ScenarioError::InvalidConfig(
                "market constants must be finite",
            ));
        }
        Ok(())
    }
}

/// Equilibrium price `(d0 + s0) / (d1 + s1)`.
pub fn equilibrium_price(d0: f64, d1: f64, s0: f64, s1: f64) -> Result<f64, ScenarioError> {
    if d1 + s1 == 0.0 {
        return Err(ScenarioError::DegenerateConfig("d1 + s1 must be non-zero"));
    }
    Ok((d0 + s0) / (d1 + s1))
}

/// Quantities demanded and supplied at price `p` moving at rate `p_dot`.
pub fn market_quantities(cfg: &MarketConfig, p: f64, p_dot: f64) -> (f64, f64) {
    let q_d = cfg.d0 - cfg.d1 * p + cfg.d2 * p_dot;
    let q_s = if cfg.strict_eq21_signs {
        -cfg.s0 - cfg.s1 * p - cfg.s2 * p_dot
    } else {
        -cfg.s0 + cfg.s1 * p - cfg.s2 * p_dot
    };
    (q_d, q_s)
}

/// Price under `p' = λ (q_d - q_s)` with static demand and supply.
pub fn market_price_linear(cfg: &MarketConfig, t: f64) -> Result<f64, ScenarioError> {
    let p_hat = cfg.equilibrium()?;
    let rate = -cfg.lambda * cfg.b();
    Ok((cfg.p_init - p_hat) * (rate * t).exp() + p_hat)
}

/// Price when demand and supply also respond to the price trend.
pub fn market_price_expectations(cfg: &MarketConfig, t: f64) -> Result<f64, ScenarioError> {
    let (a, b, c, lambda) = (cfg.a(), cfg.b(), cfg.c(), cfg.lambda);
    if b == 0.0 {
        return Err(ScenarioError::DegenerateConfig("d1 + s1 must be non-zero"));
    }
    if c * lambda - 1.0 == 0.0 {
        return Err(ScenarioError::DegenerateConfig(
            "c·lambda must differ from 1",
        ));
    }
    Ok(cfg.integration_constant() * (lambda * b * t / (c * lambda - 1.0)).exp() + a / b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub sd: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn none() -> Self {
        Self { sd: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Malthusian(PopulationConfig),
    Logistic(PopulationConfig),
    Temperature(BuildingConfig),
    PriceLinear(MarketConfig),
    PriceExpectations(MarketConfig),
}

impl Scenario {
    pub const NAMES: [&'static str; 5] = [
        "malthusian",
        "logistic",
        "temperature",
        "price_linear",
        "price_expectations",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Malthusian(_) => "malthusian",
            Scenario::Logistic(_) => "logistic",
            Scenario::Temperature(_) => "temperature",
            Scenario::PriceLinear(_) => "price_linear",
            Scenario::PriceExpectations(_) => "price_expectations",
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        match self {
            Scenario::Malthusian(c) | Scenario::Logistic(c) => c.validate(),
            Scenario::Temperature(c) => c.validate(),
            Scenario::PriceLinear(c) | Scenario::PriceExpectations(c) => c.validate(),
        }
    }

    /// Closed-form value at `t`.
    pub fn value(&self, t: f64) -> Result<f64, ScenarioError> {
        let y = match self {
            Scenario::Malthusian(c) => malthusian(c, t),
            Scenario::Logistic(c) => logistic(c, t)?,
            Scenario::Temperature(c) => building_temperature(c, t)?,
            Scenario::PriceLinear(c) => market_price_linear(c, t)?,
            Scenario::PriceExpectations(c) => market_price_expectations(c, t)?,
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(ScenarioError::NonFinite { t })
        }
    }
}

/// Samples the closed form on `times` and adds seeded Gaussian noise.
pub fn generate(
    scenario: &Scenario,
    times: &[f64],
    noise: NoiseConfig,
) -> Result<TimeSeries, ScenarioError> {
    if !(noise.sd >= 0.0 && noise.sd.is_finite()) {
        return Err(ScenarioError::InvalidConfig(
            "noise sd must be finite and non-negative",
        ));
    }
    scenario.validate()?;
    let mut values = times
        .iter()
        .map(|&t| scenario.value(t))
        .collect::<Result<Vec<_>, _>>()?;
    if noise.sd > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for v in &mut values {
            let z: f64 = rng.sample(StandardNormal);
            *v += noise.sd * z;
        }
    }
    Ok(TimeSeries::new(times.to_vec(), values)?)
}

/// The kind of configuration a preset document holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    Population,
    Building,
    Market,
}

impl Scenario {
    pub fn config_kind(name: &str) -> Option<ConfigKind> {
        match name {
            "malthusian" | "logistic" => Some(ConfigKind::Population),
            "temperature" => Some(ConfigKind::Building),
            "price_linear" | "price_expectations" => Some(ConfigKind::Market),
            _ => None,
        }
    }

    /// Builds a scenario by name from a JSON configuration document.
    pub fn from_json(name: &str, json: &str) -> Result<Scenario, serde_json::Error> {
        use serde::de::Error;
        let scenario = match name {
            "malthusian" => Scenario::Malthusian(serde_json::from_str(json)?),
            "logistic" => Scenario::Logistic(serde_json::from_str(json)?),
            "temperature" => Scenario::Temperature(serde_json::from_str(json)?),
            "price_linear" => Scenario::PriceLinear(serde_json::from_str(json)?),
            "price_expectations" => Scenario::PriceExpectations(serde_json::from_str(json)?),
            other => {
                return Err(serde_json::Error::custom(format!(
                    "unknown scenario `{other}`"
                )))
            }
        };
        Ok(scenario)
    }
}

/// A shipped configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: ConfigKind,
    pub json: &'static str,
}

/// Built-in presets binding the published constants.
///
/// `eq4` and `eq7` share one population document (Malthusian rate plus the
/// logistic constants); `eq4_y2000` swaps in the rate implied by a year-2000
/// population of about 282 million. `eq22` is the worked demand/supply
/// example with λ = 1 and an initial price of 5.
pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "eq4",
        kind: ConfigKind::Population,
        json: include_str!("../presets/eq4.json"),
    },
    Preset {
        name: "eq4_y2000",
        kind: ConfigKind::Population,
        json: include_str!("../presets/eq4_y2000.json"),
    },
    Preset {
        name: "eq7",
        kind: ConfigKind::Population,
        json: include_str!("../presets/eq7.json"),
    },
    Preset {
        name: "eq18",
        kind: ConfigKind::Building,
        json: include_str!("../presets/eq18.json"),
    },
    Preset {
        name: "eq22",
        kind: ConfigKind::Market,
        json: include_str!("../presets/eq22.json"),
    },
    Preset {
        name: "eq24",
        kind: ConfigKind::Market,
        json: include_str!("../presets/eq24.json"),
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Fixed-step classical Runge–Kutta integration, used to check the closed
/// forms against the differential equations they solve.
#[cfg(any(test, feature = "test-support"))]
pub mod oracle {
    use super::*;

    pub const STEP: f64 = 1e-3;

    /// Integrates `y' = f(t, y)` from `(t0, y0)` and records `y` at each of the
    /// ascending `sample_times` (all ≥ `t0`). The last step before each sample
    /// is shortened so the sample is hit exactly.
    pub fn rk4<F: Fn(f64, f64) -> f64>(
        f: F,
        t0: f64,
        y0: f64,
        step: f64,
        sample_times: &[f64],
    ) -> Vec<f64> {
        let mut t = t0;
        let mut y = y0;
        let mut out = Vec::with_capacity(sample_times.len());
        for &target in sample_times {
            assert!(target >= t, "sample times must be ascending");
            while target - t > 1e-12 {
                let h = step.min(target - t);
                let k1 = f(t, y);
                let k2 = f(t + h / 2.0, y + h * k1 / 2.0);
                let k3 = f(t + h / 2.0, y + h * k2 / 2.0);
                let k4 = f(t + h, y + h * k3);
                y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                t += h;
            }
            t = target;
            out.push(y);
        }
        out
    }

    pub fn logistic_rhs(cfg: PopulationConfig) -> impl Fn(f64, f64) -> f64 {
        move |_, p| -cfg.a * p * (p - cfg.p1)
    }

    pub fn building_rhs(cfg: BuildingConfig) -> impl Fn(f64, f64) -> f64 {
        move |t, temp| cfg.k * (cfg.outside(t) - temp) + cfg.h0 + cfg.k_u * (cfg.t_d - temp)
    }

    /// `p' = λ (q_d - q_s)` with the trend terms switched off.
    pub fn price_linear_rhs(cfg: MarketConfig) -> impl Fn(f64, f64) -> f64 {
        move |_, p| {
            let (q_d, q_s) = market_quantities(&cfg, p, 0.0);
            cfg.lambda * (q_d - q_s)
        }
    }

    /// `p' = λ (q_d(p, p') - q_s(p, p'))` solved for `p'`.
    pub fn price_expectations_rhs(cfg: MarketConfig) -> impl Fn(f64, f64) -> f64 {
        move |_, p| cfg.lambda * (cfg.a() - cfg.b() * p) / (1.0 - cfg.lambda * cfg.c())
    }
}
