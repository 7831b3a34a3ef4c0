//! Hawkes models and event histories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waiting_dist::{Kernel, WaitingDistribution};

/// Baseline rate `eta` plus one excitation kernel:
/// `lambda(t) = eta + sum_{t_i < t} h(t - t_i)`.
///
/// JSON form: `{"eta": 2.295, "kernel": {"family": "omori", ...}}`.
/// Deserialization validates parameters but not stability, so that callers
/// can report the branching ratio of an unstable model; simulators and the
/// fitter call [`HawkesModel::check_stable`] themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct HawkesModel {
    eta: f64,
    kernel: Kernel,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSpec {
    eta: f64,
    kernel: Kernel,
}

impl TryFrom<ModelSpec> for HawkesModel {
    type Error = Error;

    fn try_from(s: ModelSpec) -> Result<Self> {
        HawkesModel::unconstrained(s.eta, s.kernel)
    }
}

impl From<HawkesModel> for ModelSpec {
    fn from(m: HawkesModel) -> Self {
        ModelSpec {
            eta: m.eta,
            kernel: m.kernel,
        }
    }
}

impl HawkesModel {
    /// A stable model; fails with [`Error::Unstable`] when `H(inf) >= 1`.
    pub fn new(eta: f64, kernel: impl Into<Kernel>) -> Result<Self> {
        let m = Self::unconstrained(eta, kernel)?;
        m.check_stable()?;
        Ok(m)
    }

    /// A model with valid parameters that may be unstable (e.g. for evaluating
    /// a likelihood surface).
    pub fn unconstrained(eta: f64, kernel: impl Into<Kernel>) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::param("eta", format!("must be finite and positive, got {eta}")));
        }
        Ok(Self {
            eta,
            kernel: kernel.into(),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Expected number of direct offspring per event, `n* = H(inf)`.
    pub fn branching_ratio(&self) -> f64 {
        self.kernel.total_mass()
    }

    pub fn check_stable(&self) -> Result<()> {
        let ratio = self.branching_ratio();
        if ratio < 1.0 {
            Ok(())
        } else {
            Err(Error::Unstable { ratio })
        }
    }

    /// Long-run event rate `eta / (1 - n*)` of a stable model.
    pub fn stationary_rate(&self) -> f64 {
        self.eta / (1.0 - self.branching_ratio())
    }

    /// Conditional intensity at `t`. Events at exactly `t` do not contribute.
    pub fn intensity(&self, seq: &EventSequence, t: f64) -> f64 {
        let times = seq.all_times();
        let hi = times.partition_point(|&x| x < t);
        let lo = live_from(&times[..hi], t, &self.kernel);
        self.eta
            + times[lo..hi]
                .iter()
                .map(|&ti| self.kernel.hazard_at(t - ti))
                .sum::<f64>()
    }

    /// Compensator `Lambda(t) = int_{start}^{t} lambda(s) ds`, using the closed
    /// form cumulative hazard of each earlier event (pre-history included).
    pub fn compensator(&self, seq: &EventSequence, t: f64) -> f64 {
        let start = seq.start();
        if t <= start {
            return 0.0;
        }
        let times = seq.all_times();
        let hi = times.partition_point(|&x| x < t);
        self.eta * (t - start)
            + times[..hi]
                .iter()
                .map(|&ti| self.window_contribution(ti, t, start))
                .sum::<f64>()
    }

    /// `H(t - ti) - H(max(0, start - ti))`: the part of event `ti`'s excitation
    /// that falls inside `[start, t)`.
    #[inline]
    fn window_contribution(&self, ti: f64, t: f64, start: f64) -> f64 {
        let total = self.kernel.cumulative_hazard_at(t - ti);
        if ti < start {
            total - self.kernel.cumulative_hazard_at(start - ti)
        } else {
            total
        }
    }

    /// `lambda(t_i)` for every in-window event.
    pub fn intensity_at_events(&self, seq: &EventSequence) -> Vec<f64> {
        let times = seq.all_times();
        let offset = seq.pre_history().len();
        let mut lo = 0;
        (offset..times.len())
            .map(|i| {
                let t = times[i];
                lo = advance_live(times, lo, i, t, &self.kernel);
                self.eta
                    + times[lo..i]
                        .iter()
                        .map(|&tj| self.kernel.hazard_at(t - tj))
                        .sum::<f64>()
            })
            .collect()
    }

    /// `Lambda(t_i)` for every in-window event, measured from the window start.
    ///
    /// Events older than the kernel support contribute a constant, so with a
    /// finite support the cost is linear in the number of events.
    pub fn compensator_at_events(&self, seq: &EventSequence) -> Vec<f64> {
        let start = seq.start();
        let times = seq.all_times();
        let offset = seq.pre_history().len();
        let mass = self.kernel.total_mass();
        // saturated[k] = sum over the first k events of their full in-window excitation
        let mut saturated = Vec::with_capacity(times.len() + 1);
        saturated.push(0.0);
        let mut acc = 0.0;
        let bounded = self.kernel.support_bound().is_some();
        if bounded {
            for &tj in times {
                acc += if tj < start {
                    mass - self.kernel.cumulative_hazard_at(start - tj)
                } else {
                    mass
                };
                saturated.push(acc);
            }
        }
        let mut lo = 0;
        (offset..times.len())
            .map(|i| {
                let t = times[i];
                lo = advance_live(times, lo, i, t, &self.kernel);
                self.eta * (t - start)
                    + saturated[lo]
                    + times[lo..i]
                        .iter()
                        .map(|&tj| self.window_contribution(tj, t, start))
                        .sum::<f64>()
            })
            .collect()
    }
}

/// First index of `times` whose excitation can still be alive at `t`.
#[inline]
fn live_from(times: &[f64], t: f64, kernel: &Kernel) -> usize {
    match kernel.support_bound() {
        Some(s) => times.partition_point(|&x| t - x >= s),
        None => 0,
    }
}

#[inline]
fn advance_live(times: &[f64], mut lo: usize, hi: usize, t: f64, kernel: &Kernel) -> usize {
    if let Some(s) = kernel.support_bound() {
        while lo < hi && t - times[lo] >= s {
            lo += 1;
        }
    }
    lo
}

/// Ordered event times observed on `[start, end]`.
///
/// `pre_history` holds events before `start` that excite the process inside
/// the window but are not themselves part of the observation. Parent labels,
/// when present, use one index space over `pre_history` followed by `times`:
/// `0` marks a background event and `j >= 1` points at the `j`-th event of
/// that concatenation, which always precedes the child.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceSpec", into = "SequenceSpec")]
pub struct EventSequence {
    /// `pre_history ++ times`, kept contiguous for the evaluation loops.
    all: Vec<f64>,
    n_pre: usize,
    start: f64,
    end: f64,
    parents: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct SequenceSpec {
    start: f64,
    end: f64,
    times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pre_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parents: Option<Vec<usize>>,
}

impl TryFrom<SequenceSpec> for EventSequence {
    type Error = Error;

    fn try_from(s: SequenceSpec) -> Result<Self> {
        let mut seq = EventSequence::new(s.times, s.start, s.end)?.with_pre_history(s.pre_history)?;
        if let Some(p) = s.parents {
            seq = seq.with_parents(p)?;
        }
        Ok(seq)
    }
}

impl From<EventSequence> for SequenceSpec {
    fn from(s: EventSequence) -> Self {
        SequenceSpec {
            start: s.start,
            end: s.end,
            times: s.times().to_vec(),
            pre_history: s.pre_history().to_vec(),
            parents: s.parents,
        }
    }
}

impl EventSequence {
    pub fn new(times: Vec<f64>, start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start <= end) {
            return Err(Error::InvalidSequence(format!(
                "window [{start}, {end}] is not a finite interval"
            )));
        }
        check_increasing(&times, "times")?;
        if let (Some(&first), Some(&last)) = (times.first(), times.last()) {
            if first < start || last > end {
                return Err(Error::InvalidSequence(format!(
                    "events [{first}, {last}] fall outside the window [{start}, {end}]"
                )));
            }
        }
        Ok(Self {
            all: times,
            n_pre: 0,
            start,
            end,
            parents: None,
        })
    }

    /// An empty observation window `[0, 0]`.
    pub fn empty() -> Self {
        Self {
            all: Vec::new(),
            n_pre: 0,
            start: 0.0,
            end: 0.0,
            parents: None,
        }
    }

    /// Attach events observed up to and including the window start.
    pub fn with_pre_history(mut self, pre: Vec<f64>) -> Result<Self> {
        check_increasing(&pre, "pre_history")?;
        if pre.last().is_some_and(|&t| t > self.start) {
            return Err(Error::InvalidSequence(
                "pre-history must end by the window start".into(),
            ));
        }
        if self.parents.is_some() {
            return Err(Error::InvalidSequence(
                "attach pre-history before parent labels".into(),
            ));
        }
        let mut all = pre;
        self.n_pre = all.len();
        all.extend_from_slice(&self.all[..]);
        self.all = all;
        Ok(self)
    }

    pub fn with_parents(mut self, parents: Vec<usize>) -> Result<Self> {
        if parents.len() != self.len() {
            return Err(Error::InvalidSequence(format!(
                "{} parent labels for {} events",
                parents.len(),
                self.len()
            )));
        }
        for (i, &p) in parents.iter().enumerate() {
            // 1-based index of the child in the concatenated history
            let own = self.n_pre + i + 1;
            if p >= own {
                return Err(Error::InvalidSequence(format!(
                    "event {i} has parent {p}, which does not precede it"
                )));
            }
        }
        self.parents = Some(parents);
        Ok(self)
    }

    pub fn times(&self) -> &[f64] {
        &self.all[self.n_pre..]
    }

    pub fn pre_history(&self) -> &[f64] {
        &self.all[..self.n_pre]
    }

    /// Pre-history followed by the in-window events.
    pub fn all_times(&self) -> &[f64] {
        &self.all
    }

    pub fn parents(&self) -> Option<&[usize]> {
        self.parents.as_deref()
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn window_length(&self) -> f64 {
        self.end - self.start
    }

    pub fn len(&self) -> usize {
        self.all.len() - self.n_pre
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of in-window events labelled as background.
    pub fn background_count(&self) -> Option<usize> {
        self.parents
            .as_ref()
            .map(|p| p.iter().filter(|&&x| x == 0).count())
    }

    /// The same events with the window and all times moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        let mut seq = EventSequence::new(
            self.times().iter().map(|t| t + offset).collect(),
            self.start + offset,
            self.end + offset,
        )?
        .with_pre_history(self.pre_history().iter().map(|t| t + offset).collect())?;
        if let Some(p) = &self.parents {
            seq = seq.with_parents(p.clone())?;
        }
        Ok(seq)
    }
}

fn check_increasing(times: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidSequence(format!("{what} contains {bad}")));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSequence(format!(
            "{what} not strictly increasing at index {}: {} then {}",
            i + 1,
            times[i],
            times[i + 1]
        )));
    }
    Ok(())
}
