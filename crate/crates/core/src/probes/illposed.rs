//! Norm growth of the second iterate for box data as `N → ∞`.

use serde::Serialize;

use super::{Criterion, ExperimentRecord, SweepSummary};
use crate::error::{invalid, Result};
use crate::evolution::{data_norms, second_iterate_boxdata, SecondIterate};
use crate::symbols::{DispersionParams, IllposedBoxes};

pub const GROWTH_TOLERANCE: f64 = 0.1;
pub const MIN_GROWTH_POINTS: usize = 5;
const DATA_NORM_BAND: (f64, f64) = (0.25, 4.0);

/// `7/4 − 3α/4 − 3θ/2`.
pub fn predicted_growth_slope(alpha: f64, theta: f64) -> f64 {
    1.75 - 0.75 * alpha - 1.5 * theta
}

/// Required sign of the slope: `Some(true)` below the threshold band
/// around `α = 7/3`, `Some(false)` above it.
pub fn expected_sign(alpha: f64, theta: f64) -> Option<bool> {
    let t = 7.0 / 3.0;
    if alpha < t - 2.0 * theta {
        Some(true)
    } else if alpha > t + 2.0 * theta {
        Some(false)
    } else {
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthStudy {
    pub alpha: f64,
    pub theta: f64,
    pub records: Vec<ExperimentRecord>,
    pub iterates: Vec<SecondIterate>,
    pub summary: SweepSummary,
    pub predicted: f64,
    pub sign_ok: bool,
    pub max_rel_change: f64,
    pub pass: bool,
}

pub fn illposedness_growth_study(
    params: &DispersionParams,
    theta: f64,
    n_list: &[f64],
    sbar: (f64, f64),
    t: f64,
    quad_res: usize,
) -> Result<GrowthStudy> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(invalid("theta", format!("must lie in (0, 1/2), got {theta}")));
    }
    if n_list.len() < MIN_GROWTH_POINTS {
        return Err(invalid("N_list", format!("need at least {MIN_GROWTH_POINTS} points, got {}", n_list.len())));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("N_list", "must be strictly ascending"));
    }
    let a = params.alpha();
    let mut records = Vec::with_capacity(n_list.len());
    let mut iterates = Vec::with_capacity(n_list.len());
    for &n in n_list {
        crate::spectral::DyadicBand::new(n)?;
        let gamma = IllposedBoxes::gamma_for(a, n, theta);
        let (d1, d2) = data_norms(params, n, gamma, sbar, quad_res)?;
        for (name, v) in [("phi1", d1), ("phi2", d2)] {
            if !(DATA_NORM_BAND.0..=DATA_NORM_BAND.1).contains(&v) {
                return Err(invalid("N_list", format!("‖{name}‖ = {v} at N = {n} is outside [1/4, 4]")));
            }
        }
        let it = second_iterate_boxdata(params, n, gamma, sbar, t, quad_res)?;
        let comparator = n * gamma.powf(1.5);
        let inputs = [
            ("N", n),
            ("gamma", gamma),
            ("theta", theta),
            ("t", t),
            ("quad_res", quad_res as f64),
            ("phi1_norm", d1),
            ("phi2_norm", d2),
            ("rel_change", it.rel_change),
        ];
        records.push(ExperimentRecord::new("illposedness", a, &inputs, it.norm, comparator));
        iterates.push(it);
    }
    let predicted = predicted_growth_slope(a, theta);
    let summary = SweepSummary::from_points(
        "illposedness",
        a,
        "N",
        iterates.iter().map(|it| (it.n, it.norm)).collect(),
        Criterion::Target { predicted, tol: GROWTH_TOLERANCE },
    );
    let sign_ok = match expected_sign(a, theta) {
        Some(true) => summary.slope > 0.0,
        Some(false) => summary.slope < 0.0,
        None => true,
    };
    let pass = summary.pass && sign_ok;
    for r in &mut records {
        r.judge(pass);
    }
    let max_rel_change = iterates.iter().map(|i| i.rel_change).fold(0.0, f64::max);
    Ok(GrowthStudy { alpha: a, theta, records, iterates, summary, predicted, sign_ok, max_rel_change, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_values() {
        assert!((predicted_growth_slope(2.0, 0.05) - 0.175).abs() < 1e-12);
        assert!((predicted_growth_slope(2.6, 0.05) + 0.275).abs() < 1e-12);
        assert!(predicted_growth_slope(7.0 / 3.0, 0.0).abs() < 1e-12);
        assert_eq!(expected_sign(2.0, 0.05), Some(true));
        assert_eq!(expected_sign(2.6, 0.05), Some(false));
        assert_eq!(expected_sign(7.0 / 3.0, 0.05), None);
    }

    #[test]
    fn short_list_rejected() {
        let p = DispersionParams::new(2.0).unwrap();
        assert!(illposedness_growth_study(&p, 0.05, &[256.0, 512.0], (0.0, 0.0), 1.0, 16).is_err());
    }
}
