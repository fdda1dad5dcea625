//! Ratio probes for the linear, bilinear and trilinear estimates, the scaling
//! law and the norm growth of the second iterate.
//!
//! Each probe returns [`ExperimentRecord`]s whose `ratio = measured / comparator`.
//! A sweep is judged by the least-squares slope of `log ratio` against
//! `log N` ([`SweepSummary`]); implicit constants never enter a verdict.

mod illposed;
mod scaling;
mod strichartz;
mod trilinear;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use illposed::{expected_sign, illposedness_growth_study, predicted_growth_slope, GrowthStudy, GROWTH_TOLERANCE};
pub use scaling::{
    predicted_scaling_slope, scaling_exponent_fit, scaling_exponent_fit_with, ScalingFit, ScalingProfile,
    SCALING_TOLERANCE,
};
pub use strichartz::{
    bilinear_l2, bilinear_ratio, bilinear_sweep, linear_strichartz_ratio, linear_strichartz_sweep, lowfreq_data,
    lowfreq_l4_ratio, lowfreq_sweep, scaled_band_data, BilinearSetup,
};
pub use trilinear::{
    lw_centres, lw_ratio, lw_ratio_at, lw_sweep, nonresonant_ratio, nonresonant_sweep, trilinear_integral,
    trilinear_integral_direct, Lattice3, LatticeFunction,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Zero data or zero comparator; no verdict.
    Degenerate,
    /// The configuration violates a hypothesis of the estimate.
    OutsideHypothesis,
    /// Not yet judged.
    Pending,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub probe: String,
    pub alpha: f64,
    pub inputs: BTreeMap<String, f64>,
    pub measured: f64,
    pub comparator: f64,
    pub ratio: f64,
    pub pass: bool,
    pub status: Status,
}

impl ExperimentRecord {
    pub fn new(probe: &str, alpha: f64, inputs: &[(&str, f64)], measured: f64, comparator: f64) -> Self {
        let degenerate = measured == 0.0 || comparator == 0.0 || !measured.is_finite() || !comparator.is_finite();
        ExperimentRecord {
            probe: probe.to_string(),
            alpha,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            measured,
            comparator,
            ratio: if comparator != 0.0 { measured / comparator } else { f64::NAN },
            pass: false,
            status: if degenerate { Status::Degenerate } else { Status::Pending },
        }
    }

    pub fn input(&self, key: &str) -> Option<f64> {
        self.inputs.get(key).copied()
    }

    pub fn judge(&mut self, pass: bool) {
        if matches!(self.status, Status::Pending | Status::Pass | Status::Fail) {
            self.status = if pass { Status::Pass } else { Status::Fail };
            self.pass = pass;
        }
    }

    /// `key=value` pairs joined by `;`, for the CSV `params` column.
    pub fn params_string(&self) -> String {
        self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSweep {
    /// Defaults to the run's `alpha`.
    #[serde(default)]
    pub alpha: Option<f64>,
    pub dyadic_range: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_point: usize,
    /// Defaults to the run's seed.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Accepted interval for the fitted log-log slope.
    #[serde(default = "default_band")]
    pub tolerance_band: (f64, f64),
}

fn default_trials() -> usize {
    4
}

fn default_band() -> (f64, f64) {
    (-10.0, 0.1)
}

impl Default for ProbeSweep {
    fn default() -> Self {
        ProbeSweep {
            alpha: None,
            dyadic_range: vec![8.0, 16.0, 32.0, 64.0],
            trials_per_point: default_trials(),
            seed: None,
            tolerance_band: default_band(),
        }
    }
}

impl ProbeSweep {
    pub fn validate(&self) -> Result<()> {
        if self.dyadic_range.is_empty() {
            return Err(invalid("dyadic_range", "must be nonempty"));
        }
        if self.dyadic_range.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("dyadic_range", "must be strictly ascending"));
        }
        for &n in &self.dyadic_range {
            crate::spectral::DyadicBand::new(n)?;
        }
        if self.trials_per_point == 0 {
            return Err(invalid("trials_per_point", "must be at least 1"));
        }
        let (lo, hi) = self.tolerance_band;
        if !(lo <= hi) {
            return Err(invalid("tolerance_band", format!("need lo ≤ hi, got ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Ordinary least squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `slope ≤ bound`.
    UpperBound { bound: f64 },
    /// `lo ≤ slope ≤ hi`.
    Band { lo: f64, hi: f64 },
    /// `|slope − predicted| ≤ tol`.
    Target { predicted: f64, tol: f64 },
}

impl Criterion {
    pub fn holds(&self, slope: f64) -> bool {
        match *self {
            Criterion::UpperBound { bound } => slope <= bound,
            Criterion::Band { lo, hi } => (lo..=hi).contains(&slope),
            Criterion::Target { predicted, tol } => (slope - predicted).abs() <= tol,
        }
    }
}

/// Log-log fit of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub probe: String,
    pub alpha: f64,
    pub variable: String,
    pub xs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    pub criterion: Criterion,
    pub pass: bool,
}

pub const MIN_SWEEP_POINTS: usize = 4;

impl SweepSummary {
    /// Fits the non-degenerate records; fewer than four points gives no pass.
    pub fn fit(probe: &str, alpha: f64, variable: &str, records: &[ExperimentRecord], criterion: Criterion) -> Self {
        let pts: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.status != Status::Degenerate && r.status != Status::OutsideHypothesis)
            .filter_map(|r| r.input(variable).map(|x| (x, r.ratio)))
            .collect();
        Self::from_points(probe, alpha, variable, pts, criterion)
    }

    pub fn from_points(probe: &str, alpha: f64, variable: &str, pts: Vec<(f64, f64)>, criterion: Criterion) -> Self {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ratios: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let usable = pts.len() >= MIN_SWEEP_POINTS && ratios.iter().all(|r| r.is_finite() && *r > 0.0);
        let slope = if usable {
            let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            let ly: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
            ols_slope(&lx, &ly)
        } else {
            f64::NAN
        };
        SweepSummary {
            probe: probe.into(),
            alpha,
            variable: variable.into(),
            xs,
            ratios,
            slope,
            criterion,
            pass: usable && criterion.holds(slope),
        }
    }

    /// The same fit with every comparator multiplied by `x^{−shift}`.
    pub fn with_comparator_shift(&self, shift: f64) -> SweepSummary {
        let pts = self.xs.iter().zip(&self.ratios).map(|(&x, &r)| (x, r * x.powf(shift))).collect();
        Self::from_points(&format!("{}[shift {shift}]", self.probe), self.alpha, &self.variable, pts, self.criterion)
    }

    /// Stamps the verdict onto every judged record.
    pub fn apply(&self, records: &mut [ExperimentRecord]) {
        for r in records {
            r.judge(self.pass);
        }
    }
}
