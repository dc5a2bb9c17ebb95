//! Cascaded task release: per-project access thresholds driven by a sliding
//! completion window.
//!
//! Every project starts gated at the top of the rating scale (threshold 3) so
//! only the owner's highest-rated workers see it. The scheduler watches task
//! completions through a window of `T` ticks and forms a utilization ratio:
//!
//! ```text
//! utilization(now) = completed(now - T, now)
//!                  / max over t_i in [t_init, now - T] of completed(t_i, t_i + T)
//! ```
//!
//! where `t_init` is the last threshold reduction (or the project post).
//! Completion rates spike right after a release and taper off; once the
//! current window falls to a fraction `lambda` or less of the best window
//! since `t_init`, the group that has access is considered to have tried and
//! abandoned the project, and the threshold drops to admit the next group.
//!
//! Windows are half-open `[t_i, t_i + T)` over integer ticks. Two degenerate
//! cases need a rule the ratio does not give:
//!
//! * the project has never had a single completion: utilization is 0.0, so a
//!   fully idle project opens up one tier per window instead of deadlocking a
//!   platform where nobody clears the initial threshold yet;
//! * completions exist but all predate `t_init`: utilization is 1.0 (no
//!   release), so one long silence triggers exactly one release rather than a
//!   runaway cascade.

use serde::{Deserialize, Serialize};

use crate::error::MarketError;
use crate::ids::Tick;

/// Threshold every new project starts at: only workers the owner rated at the
/// top of the scale (or with an equally high global score) get in.
pub const INITIAL_THRESHOLD: f64 = 3.0;

/// Fully open: every rating passes once the cascade is exhausted.
pub const FLOOR_THRESHOLD: f64 = 1.0;

/// Reference trigger ratio for threshold reduction.
pub const DEFAULT_LAMBDA: f64 = 0.3;

/// Default sliding-window length in ticks.
pub const DEFAULT_WINDOW: u64 = 10;

/// Result of a utilization query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Utilization {
    /// Less than one full window has elapsed since `t_init`; no release may
    /// fire yet.
    WarmingUp,
    Ready(f64),
}

impl Utilization {
    pub fn value(self) -> Option<f64> {
        match self {
            Utilization::WarmingUp => None,
            Utilization::Ready(v) => Some(v),
        }
    }
}

/// A threshold reduction that fired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Release {
    pub old_threshold: f64,
    pub new_threshold: f64,
    pub utilization: f64,
}

/// Per-project release scheduler state.
///
/// `hist_max` and `frontier` cache the inner max of the utilization formula
/// over window placements already in the past; they are derived from
/// `completions` and carry no state of their own, so equality ignores them.
#[derive(Debug, Clone)]
pub struct CascadeState {
    threshold: f64,
    window: u64,
    lambda: f64,
    t_init: Tick,
    completions: Vec<Tick>,
    hist_max: u64,
    frontier: Tick,
}

impl PartialEq for CascadeState {
    fn eq(&self, other: &Self) -> bool {
        self.threshold == other.threshold
            && self.window == other.window
            && self.lambda == other.lambda
            && self.t_init == other.t_init
            && self.completions == other.completions
    }
}

impl CascadeState {
    pub fn new(posted_at: Tick, window: u64, lambda: f64) -> Self {
        CascadeState {
            threshold: INITIAL_THRESHOLD,
            window: window.max(1),
            lambda,
            t_init: posted_at,
            completions: Vec::new(),
            hist_max: 0,
            frontier: posted_at,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t_init(&self) -> Tick {
        self.t_init
    }

    pub fn completions(&self) -> &[Tick] {
        &self.completions
    }

    /// Number of completions in the half-open window `[start, start + T)`.
    pub fn window_count(&self, start: Tick) -> u64 {
        let lo = self.completions.partition_point(|&t| t < start);
        let hi = self
            .completions
            .partition_point(|&t| t < start.saturating_add(self.window));
        (hi - lo) as u64
    }

    /// Append a completion. Ticks must arrive in non-decreasing order.
    pub fn record_completion(&mut self, tick: Tick) -> Result<(), MarketError> {
        if let Some(&last) = self.completions.last() {
            if tick < last {
                return Err(MarketError::OutOfOrderTick { tick, last });
            }
        }
        self.completions.push(tick);
        Ok(())
    }

    /// Fold every window placement that has fully elapsed by `now` into the
    /// cached historical max.
    pub fn advance_cache(&mut self, now: Tick) {
        if now < self.t_init + self.window {
            return;
        }
        let last_start = now - self.window;
        let mut t_i = self.frontier.max(self.t_init);
        while t_i <= last_start {
            self.hist_max = self.hist_max.max(self.window_count(t_i));
            t_i += 1;
        }
        self.frontier = last_start + 1;
    }

    /// Current-window completions over the historical max window since
    /// `t_init`. Pure: uncached window placements are scanned on the fly.
    pub fn utilization(&self, now: Tick) -> Utilization {
        if now < self.t_init + self.window {
            return Utilization::WarmingUp;
        }
        let last_start = now - self.window;
        let mut hist = self.hist_max;
        let mut t_i = self.frontier.max(self.t_init);
        while t_i <= last_start {
            hist = hist.max(self.window_count(t_i));
            t_i += 1;
        }
        if hist == 0 {
            // No completions since t_init. An untouched project reads as
            // abandoned; a project whose activity all predates t_init already
            // released once for this silence.
            return if self.completions.is_empty() {
                Utilization::Ready(0.0)
            } else {
                Utilization::Ready(1.0)
            };
        }
        let current = self.window_count(now - self.window);
        Utilization::Ready(current as f64 / hist as f64)
    }

    /// Evaluate the release rule at `now`. `past_worker_ratings` are the
    /// effective ratings (through the project owner's eyes) of workers who
    /// have completed work for this requester; `pool_ratings` is the fallback
    /// set covering the whole worker pool.
    pub fn maybe_release(
        &mut self,
        now: Tick,
        past_worker_ratings: &[f64],
        pool_ratings: &[f64],
    ) -> Option<Release> {
        self.advance_cache(now);
        let utilization = match self.utilization(now) {
            Utilization::WarmingUp => return None,
            Utilization::Ready(v) => v,
        };
        if utilization > self.lambda {
            return None;
        }
        let new_threshold = pick_new_threshold(self.threshold, past_worker_ratings, pool_ratings);
        if new_threshold >= self.threshold {
            return None;
        }
        let release = Release {
            old_threshold: self.threshold,
            new_threshold,
            utilization,
        };
        self.apply_release(now, new_threshold);
        Some(release)
    }

    /// Install a reduction: used by `maybe_release` and by log replay, where
    /// the recorded event is authoritative.
    pub fn apply_release(&mut self, now: Tick, new_threshold: f64) {
        self.threshold = new_threshold;
        self.t_init = now;
        self.hist_max = 0;
        self.frontier = now;
    }
}

/// Next threshold when a release fires: the highest effective rating strictly
/// below the current threshold among workers who have worked for this
/// requester; failing that, among the whole pool; failing that, the floor.
pub fn pick_new_threshold(current: f64, past_worker_ratings: &[f64], pool_ratings: &[f64]) -> f64 {
    max_below(current, past_worker_ratings)
        .or_else(|| max_below(current, pool_ratings))
        .unwrap_or(FLOOR_THRESHOLD)
}

fn max_below(bound: f64, ratings: &[f64]) -> Option<f64> {
    ratings
        .iter()
        .copied()
        .filter(|&r| r < bound)
        .max_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: recount every window placement from the raw
    /// completion list with linear scans.
    fn naive_utilization(completions: &[Tick], t_init: Tick, window: u64, now: Tick) -> Utilization {
        if now < t_init + window {
            return Utilization::WarmingUp;
        }
        let count = |start: Tick| {
            completions
                .iter()
                .filter(|&&t| t >= start && t < start + window)
                .count() as u64
        };
        let mut hist = 0u64;
        for t_i in t_init..=(now - window) {
            hist = hist.max(count(t_i));
        }
        if hist == 0 {
            return if completions.is_empty() {
                Utilization::Ready(0.0)
            } else {
                Utilization::Ready(1.0)
            };
        }
        Utilization::Ready(count(now - window) as f64 / hist as f64)
    }

    fn with_completions(ticks: &[Tick]) -> CascadeState {
        let mut state = CascadeState::new(0, 10, DEFAULT_LAMBDA);
        for &t in ticks {
            state.record_completion(t).unwrap();
        }
        state
    }

    #[test]
    fn new_project_starts_at_three() {
        let state = CascadeState::new(5, 10, 0.3);
        assert_eq!(state.threshold(), 3.0);
        assert_eq!(state.t_init(), 5);
    }

    #[test]
    fn first_completion_is_recorded() {
        let state = with_completions(&[1]);
        assert_eq!(state.completions(), &[1]);
    }

    #[test]
    fn window_counts_four_early_completions() {
        let state = with_completions(&[1, 2, 3, 4]);
        assert_eq!(state.window_count(0), 4);
    }

    #[test]
    fn out_of_order_completion_is_rejected() {
        let mut state = with_completions(&[5]);
        assert_eq!(
            state.record_completion(3),
            Err(MarketError::OutOfOrderTick { tick: 3, last: 5 })
        );
    }

    #[test]
    fn warming_up_before_first_full_window() {
        let state = with_completions(&[1, 2]);
        assert_eq!(state.utilization(9), Utilization::WarmingUp);
        assert_ne!(state.utilization(10), Utilization::WarmingUp);
    }

    #[test]
    fn current_window_equal_to_max_is_full_utilization() {
        let state = with_completions(&[1, 2, 3, 4]);
        assert_eq!(state.utilization(10), Utilization::Ready(1.0));
    }

    #[test]
    fn burst_then_silence_reads_zero() {
        // completed(20, 30) = 0, best window since t_init holds 4.
        let state = with_completions(&[1, 2, 3, 4]);
        assert_eq!(state.utilization(30), Utilization::Ready(0.0));
    }

    #[test]
    fn untouched_project_reads_abandoned() {
        let state = CascadeState::new(0, 10, DEFAULT_LAMBDA);
        assert_eq!(state.utilization(10), Utilization::Ready(0.0));
    }

    #[test]
    fn silence_after_release_reads_occupied() {
        let mut state = with_completions(&[1, 2, 3, 4]);
        let release = state.maybe_release(30, &[2.4], &[]).unwrap();
        assert_eq!(release.utilization, 0.0);
        // Same silence, new t_init: the old burst no longer counts as
        // evidence, so no further release fires.
        assert_eq!(state.utilization(40), Utilization::Ready(1.0));
        assert_eq!(state.maybe_release(40, &[2.0], &[]), None);
    }

    #[test]
    fn reduction_takes_highest_rating_below_threshold() {
        assert_eq!(pick_new_threshold(3.0, &[3.0, 2.4, 1.99], &[]), 2.4);
    }

    #[test]
    fn reduction_falls_back_to_pool_then_floor() {
        assert_eq!(pick_new_threshold(3.0, &[3.0], &[2.1, 3.0]), 2.1);
        assert_eq!(pick_new_threshold(3.0, &[], &[]), 1.0);
        assert_eq!(pick_new_threshold(1.0, &[1.0, 2.0], &[3.0]), 1.0);
    }

    #[test]
    fn high_utilization_leaves_threshold_alone() {
        let mut state = with_completions(&[1, 2, 3, 4]);
        assert_eq!(state.maybe_release(10, &[2.4], &[]), None);
        assert_eq!(state.threshold(), 3.0);
    }

    #[test]
    fn release_fires_on_low_utilization() {
        let mut state = with_completions(&[1, 2, 3, 4]);
        let release = state.maybe_release(30, &[3.0, 2.4, 1.99], &[]).unwrap();
        assert_eq!(release.old_threshold, 3.0);
        assert_eq!(release.new_threshold, 2.4);
        assert_eq!(state.threshold(), 2.4);
        assert_eq!(state.t_init(), 30);
    }

    #[test]
    fn exhausted_cascade_opens_fully_and_goes_quiet() {
        let mut state = with_completions(&[1, 2, 3, 4]);
        // No candidate sits below the threshold anywhere: floor.
        let release = state.maybe_release(30, &[3.0], &[3.0]).unwrap();
        assert_eq!(release.new_threshold, FLOOR_THRESHOLD);
        // At the floor the rule can never produce a lower value again.
        for now in 40..60 {
            assert_eq!(state.maybe_release(now, &[3.0, 2.0], &[1.5]), None);
        }
        assert_eq!(state.threshold(), FLOOR_THRESHOLD);
    }

    #[test]
    fn spike_then_silence_triggers_exactly_one_release_per_period() {
        let mut state = CascadeState::new(0, 10, DEFAULT_LAMBDA);
        let candidates = [2.8, 2.5, 2.0, 1.5, 1.2];
        let mut releases = Vec::new();
        let mut now = 0;
        for period in 0..3 {
            // Burst of completions, then at least T + 1 ticks of silence.
            for i in 0..6 {
                state.record_completion(now + i).unwrap();
                if let Some(r) = state.maybe_release(now + i, &candidates, &[]) {
                    releases.push((period, r));
                }
            }
            for i in 6..40 {
                if let Some(r) = state.maybe_release(now + i, &candidates, &[]) {
                    releases.push((period, r));
                }
            }
            now += 40;
        }
        let periods: Vec<usize> = releases.iter().map(|(p, _)| *p).collect();
        assert_eq!(periods, vec![0, 1, 2]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn incremental_matches_naive_recount(
                gaps in proptest::collection::vec(0u64..6, 0..80),
                window in 2u64..20,
                queries in proptest::collection::vec(0u64..400, 1..8),
            ) {
                let mut state = CascadeState::new(0, window, DEFAULT_LAMBDA);
                let mut tick = 0;
                for gap in &gaps {
                    tick += gap;
                    state.record_completion(tick).unwrap();
                }
                for &q in &queries {
                    let now = tick + q;
                    // Exercise the cache, then the pure query.
                    state.advance_cache(now);
                    let expected = naive_utilization(
                        state.completions(),
                        state.t_init(),
                        window,
                        now,
                    );
                    prop_assert_eq!(state.utilization(now), expected);
                }
            }

            #[test]
            fn threshold_never_increases(
                steps in proptest::collection::vec((0u64..4, any::<bool>()), 1..120),
                window in 2u64..15,
                ratings in proptest::collection::vec(1.0f64..=3.0, 0..8),
            ) {
                let mut state = CascadeState::new(0, window, DEFAULT_LAMBDA);
                let mut tick = 0;
                let mut last_threshold = state.threshold();
                for (gap, complete) in &steps {
                    tick += gap;
                    if *complete {
                        state.record_completion(tick).unwrap();
                    }
                    state.maybe_release(tick, &ratings, &ratings);
                    prop_assert!(state.threshold() <= last_threshold);
                    last_threshold = state.threshold();
                }
            }

            #[test]
            fn steady_completion_never_releases(
                window in 2u64..15,
                per_tick in 1u64..4,
                ticks in 30u64..120,
            ) {
                // One or more completions every tick: the current window always
                // equals the historical max, utilization stays at 1.0.
                let mut state = CascadeState::new(0, window, DEFAULT_LAMBDA);
                for tick in 0..ticks {
                    for _ in 0..per_tick {
                        state.record_completion(tick).unwrap();
                    }
                    prop_assert_eq!(state.maybe_release(tick, &[2.0, 1.5], &[1.2]), None);
                }
                prop_assert_eq!(state.threshold(), INITIAL_THRESHOLD);
            }
        }
    }
}
