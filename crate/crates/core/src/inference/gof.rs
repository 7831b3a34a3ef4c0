use super::GofResult;
use crate::error::{Error, Result};
use crate::model::{EventSequence, HawkesModel};
use crate::stats::ks_one_sample;

/// Random time change test: under the model the compensator increments
/// between consecutive events are i.i.d. Exp(1).
pub fn time_rescale_test(model: &HawkesModel, seq: &EventSequence) -> Result<GofResult> {
    model.check_stable()?;
    if seq.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "the time-rescaling test needs at least 2 events, got {}",
            seq.len()
        )));
    }
    let tau = model.compensator_at_events(seq);
    let mut prev = 0.0;
    let rescaled_waits: Vec<f64> = tau
        .iter()
        .map(|&t| {
            let w = t - prev;
            prev = t;
            w
        })
        .collect();
    if let Some(bad) = rescaled_waits.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Numerical(format!("rescaled wait {bad} is invalid")));
    }
    let ks = ks_one_sample(&rescaled_waits, |x| -(-x).exp_m1());

    let mut sorted = rescaled_waits.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let qq_pairs = sorted
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let q = (i as f64 + 0.5) / n;
            (-(-q).ln_1p(), w)
        })
        .collect();

    Ok(GofResult {
        ks_statistic: ks.statistic,
        p_value: ks.p_value,
        rescaled_waits,
        qq_pairs,
    })
}
