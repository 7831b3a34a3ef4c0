use crate::model::{EventSequence, HawkesModel};

/// `sum_i ln lambda(t_i) - Lambda(end)` over the in-window events.
///
/// Pre-history excites the window but its own events are not counted.
pub fn log_likelihood(model: &HawkesModel, seq: &EventSequence) -> f64 {
    let log_intensity: f64 = model
        .intensity_at_events(seq)
        .into_iter()
        .map(f64::ln)
        .sum();
    log_intensity - model.compensator(seq, seq.end())
}
