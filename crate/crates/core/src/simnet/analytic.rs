//! Closed-form authentication times. The simulator reproduces these exactly;
//! they are kept separately so sweeps and cross-checks need not run protocols.

use core::time::Duration;

use super::engine::{Phase, Stamp};
use super::latency::LatencyModel;

/// The rule of thumb that group authentication beats the cellular baseline
/// for every threshold below this value.
pub const QUOTED_BOUND: usize = 10;

/// Largest threshold considered when searching for the crossover.
const CROSSOVER_SEARCH_LIMIT: usize = 1 << 20;

/// Baseline: `2·rtt + enc + dec + 2·hash`, as a critical path.
pub fn nr5g_path(model: &LatencyModel) -> Stamp {
    Stamp::ZERO
        .advance(Phase::CoreLink, model.ue_core_round_trip * 2)
        .advance(Phase::AsymEncrypt, model.asym_encrypt)
        .advance(Phase::AsymDecrypt, model.asym_decrypt)
        .advance(Phase::Hash, model.hash_op * 2)
}

pub fn time_5g(model: &LatencyModel) -> Duration {
    nr5g_path(model).at
}

/// Group authentication with sequential guards: `t·(d2d + ecmul)`.
pub fn group_auth_path(t: usize, model: &LatencyModel) -> Stamp {
    let t = t as u32;
    Stamp::ZERO.advance(Phase::Radio, model.drone_to_drone * t).advance(Phase::EcPointMul, model.ec_point_mul * t)
}

pub fn time_group_auth(t: usize, model: &LatencyModel) -> Duration {
    group_auth_path(t, model).at
}

/// Admitting `n` drones: each newcomer broadcasts once, then one threshold
/// verification runs. Returns `(group, nr5g)`; the baseline authenticates the
/// drones one after another.
pub fn bulk_admission_paths(n: usize, t: usize, model: &LatencyModel) -> (Stamp, Stamp) {
    if n == 0 {
        return (Stamp::ZERO, Stamp::ZERO);
    }
    let k = n as u32;
    let g = group_auth_path(t, model);
    let group = g.advance(Phase::Radio, model.drone_to_drone * k);
    let base = nr5g_path(model);
    let mut nr = Stamp::ZERO;
    for (phase, d) in base.path.iter() {
        nr = nr.advance(phase, d * k);
    }
    (group, nr)
}

pub fn time_bulk_admission(n: usize, t: usize, model: &LatencyModel) -> (Duration, Duration) {
    let (g, nr) = bulk_admission_paths(n, t, model);
    (g.at, nr.at)
}

/// The smallest threshold `t ≥ 2` at which group authentication is slower
/// than the baseline, or `None` if it never is.
pub fn crossover_threshold(model: &LatencyModel) -> Option<usize> {
    let per_t = model.drone_to_drone + model.ec_point_mul;
    let base = time_5g(model);
    if per_t.is_zero() {
        return None;
    }
    let t = (base.as_nanos() / per_t.as_nanos()) as usize + 1;
    let t = t.max(2);
    (t <= CROSSOVER_SEARCH_LIMIT).then_some(t)
}

/// How the computed crossover compares with [`QUOTED_BOUND`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossoverReport {
    pub baseline: Duration,
    pub crossover: Option<usize>,
    /// Every `t` in `2..QUOTED_BOUND` is faster than the baseline.
    pub quoted_bound_holds: bool,
    /// The model stays faster beyond the quoted bound, so the bound
    /// understates the range where group authentication wins.
    pub quoted_bound_conservative: bool,
}

impl CrossoverReport {
    pub fn new(model: &LatencyModel) -> Self {
        let baseline = time_5g(model);
        let crossover = crossover_threshold(model);
        let quoted_bound_holds = (2..QUOTED_BOUND).all(|t| time_group_auth(t, model) < baseline);
        let quoted_bound_conservative = crossover.is_none_or(|t| t > QUOTED_BOUND);
        Self { baseline, crossover, quoted_bound_holds, quoted_bound_conservative }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(x: f64) -> Duration {
        Duration::from_secs_f64(x / 1000.0)
    }

    #[test]
    fn defaults_match_the_stated_figures() {
        let m = LatencyModel::default();
        assert_eq!(time_5g(&m), Duration::from_micros(21_600));
        assert_eq!(time_group_auth(5, &m), Duration::from_micros(6060));
        assert_eq!(time_group_auth(10, &m), Duration::from_micros(12_120));
        assert_eq!(time_group_auth(2, &m), Duration::from_micros(2424));
        let mut h = m;
        h.hash_op = Duration::from_micros(200);
        assert_eq!(time_5g(&h), Duration::from_micros(22_000));
    }

    #[test]
    fn bulk_admission() {
        let m = LatencyModel::default();
        let (g, nr) = time_bulk_admission(100, 5, &m);
        assert_eq!(nr, Duration::from_millis(2160));
        assert_eq!(g, Duration::from_micros(66_060));
        assert!(g >= ms(60.0) && g <= ms(70.0));
        assert_eq!(time_bulk_admission(1, 5, &m).0, Duration::from_micros(600) + time_group_auth(5, &m));
        assert_eq!(time_bulk_admission(0, 5, &m), (Duration::ZERO, Duration::ZERO));
        let (gp, np) = bulk_admission_paths(7, 3, &m);
        assert_eq!(gp.path.total(), gp.at);
        assert_eq!(np.path.total(), np.at);
    }

    #[test]
    fn crossover_under_defaults() {
        let m = LatencyModel::default();
        assert_eq!(crossover_threshold(&m), Some(18));
        assert!(time_group_auth(17, &m) < time_5g(&m));
        assert!(time_group_auth(18, &m) > time_5g(&m));
        let r = CrossoverReport::new(&m);
        assert!(r.quoted_bound_holds);
        assert!(r.quoted_bound_conservative);
        assert_eq!(crossover_threshold(&LatencyModel::zero()), None);
    }

    #[test]
    fn crossover_on_exact_tie_is_strict() {
        let mut m = LatencyModel::zero();
        m.ue_core_round_trip = Duration::from_millis(5);
        m.drone_to_drone = Duration::from_millis(1);
        // 10 ms baseline; t = 10 ties, t = 11 is the first slower one.
        assert_eq!(crossover_threshold(&m), Some(11));
    }
}
