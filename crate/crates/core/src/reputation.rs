//! Pairwise ratings and exponentially weighted reputation scores.
//!
//! Both market sides use the same machinery: a rater leaves an ordinal rating
//! (1/2/3) for a ratee. The ratee's *global* score is an exponentially
//! weighted average of every rating event they ever received, seeded at 1.99
//! so that newcomers sit just below a "meets expectations" history. The
//! *pairwise* channel keeps only the rater's current opinion of the ratee:
//! re-rating the same person replaces the pair value, while the global score
//! still absorbs the new event as one more observation.

use std::collections::BTreeMap;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

/// Score every fresh account starts from: just below a single "meets
/// expectations" rating, so early negatives do not lock anyone out.
pub const SEED_SCORE: f64 = 1.99;

/// Default exponential decay weight applied to the newest rating. Roughly the
/// last five ratings dominate the score at this setting.
pub const DEFAULT_DECAY: f64 = 0.3;

/// Lower bound of the rating scale.
pub const MIN_SCORE: f64 = 1.0;
/// Upper bound of the rating scale.
pub const MAX_SCORE: f64 = 3.0;

/// One step of the three-point rating scale.
///
/// Encoded as 1 (below expectations), 2 (meets expectations), 3 (exceeds
/// expectations) everywhere: arithmetic, the event log, and scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RatingValue {
    Minus = 1,
    Check = 2,
    Plus = 3,
}

impl RatingValue {
    /// Numeric encoding used by the score arithmetic.
    pub fn score(self) -> f64 {
        match self {
            RatingValue::Minus => 1.0,
            RatingValue::Check => 2.0,
            RatingValue::Plus => 3.0,
        }
    }

    pub fn from_number(raw: u64) -> Option<Self> {
        match raw {
            1 => Some(RatingValue::Minus),
            2 => Some(RatingValue::Check),
            3 => Some(RatingValue::Plus),
            _ => None,
        }
    }
}

impl Serialize for RatingValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(*self as u64)
    }
}

impl<'de> Deserialize<'de> for RatingValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = u64::deserialize(deserializer)?;
        RatingValue::from_number(raw)
            .ok_or_else(|| de::Error::custom(format!("rating value must be 1, 2 or 3, got {raw}")))
    }
}

/// Exponentially weighted reputation score in `[1, 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationScore {
    pub value: f64,
    pub n_observations: u64,
}

impl ReputationScore {
    /// Fresh-account score: exactly 1.99 with zero observations.
    pub fn seed() -> Self {
        ReputationScore {
            value: SEED_SCORE,
            n_observations: 0,
        }
    }

    /// Fold one rating into the score: `value' = alpha * r + (1 - alpha) * value`.
    ///
    /// The recurrence is a convex combination of points in `[1, 3]`, so the
    /// clamp never bites; it is kept as a guard against parameter abuse.
    pub fn update(self, rating: RatingValue, alpha: f64) -> Self {
        let value = alpha * rating.score() + (1.0 - alpha) * self.value;
        ReputationScore {
            value: value.clamp(MIN_SCORE, MAX_SCORE),
            n_observations: self.n_observations + 1,
        }
    }
}

impl Default for ReputationScore {
    fn default() -> Self {
        ReputationScore::seed()
    }
}

/// Ratings flowing in one direction (requester -> worker, or worker ->
/// requester). Keyed by raw ids; the engine owns one book per direction and
/// keeps the id types straight.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingBook {
    alpha: f64,
    pairs: BTreeMap<(u64, u64), RatingValue>,
    globals: BTreeMap<u64, ReputationScore>,
}

impl RatingBook {
    pub fn new(alpha: f64) -> Self {
        RatingBook {
            alpha,
            pairs: BTreeMap::new(),
            globals: BTreeMap::new(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Record a rating event: replaces the pair's current value and folds the
    /// event into the ratee's global score.
    pub fn record(&mut self, rater: u64, ratee: u64, value: RatingValue) {
        self.pairs.insert((rater, ratee), value);
        let global = self.global(ratee).update(value, self.alpha);
        self.globals.insert(ratee, global);
    }

    /// Current pairwise rating, if the rater ever rated this ratee.
    pub fn pairwise(&self, rater: u64, ratee: u64) -> Option<RatingValue> {
        self.pairs.get(&(rater, ratee)).copied()
    }

    /// Global exponentially weighted score; the 1.99 seed for unrated users.
    pub fn global(&self, ratee: u64) -> ReputationScore {
        self.globals
            .get(&ratee)
            .copied()
            .unwrap_or_else(ReputationScore::seed)
    }

    /// The rating a viewer effectively holds of a subject: their own pairwise
    /// rating when present, otherwise the subject's global score.
    pub fn effective(&self, viewer: u64, subject: u64) -> f64 {
        match self.pairwise(viewer, subject) {
            Some(value) => value.score(),
            None => self.global(subject).value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: recompute a global score by folding the full
    /// rating history from the seed.
    fn fold_score(history: &[RatingValue], alpha: f64) -> ReputationScore {
        let mut value = SEED_SCORE;
        for r in history {
            value = alpha * r.score() + (1.0 - alpha) * value;
        }
        ReputationScore {
            value: value.clamp(MIN_SCORE, MAX_SCORE),
            n_observations: history.len() as u64,
        }
    }

    #[test]
    fn seed_is_exactly_1_99() {
        let s = ReputationScore::seed();
        assert_eq!(s.value, 1.99);
        assert_eq!(s.n_observations, 0);
    }

    #[test]
    fn fresh_users_are_identical() {
        assert_eq!(ReputationScore::seed(), ReputationScore::seed());
    }

    #[test]
    fn seed_below_two_rises_on_single_check() {
        // The seed sits strictly below 2.0 so one "meets expectations" rating
        // strictly raises the score.
        let s = ReputationScore::seed().update(RatingValue::Check, DEFAULT_DECAY);
        assert!(s.value > SEED_SCORE);
        assert!(s.value < 2.0);
    }

    #[test]
    fn check_on_two_is_a_fixed_point() {
        let s = ReputationScore {
            value: 2.0,
            n_observations: 4,
        };
        let s = s.update(RatingValue::Check, DEFAULT_DECAY);
        assert_eq!(s.value, 2.0);
    }

    #[test]
    fn plus_on_seed_matches_recurrence() {
        let s = ReputationScore::seed().update(RatingValue::Plus, 0.3);
        let oracle = fold_score(&[RatingValue::Plus], 0.3);
        assert_eq!(s.value, oracle.value);
        assert!((s.value - 2.293).abs() < 1e-12);
    }

    #[test]
    fn plus_stream_converges_monotonically_to_three() {
        let mut s = ReputationScore::seed();
        let mut prev = s.value;
        for _ in 0..200 {
            s = s.update(RatingValue::Plus, DEFAULT_DECAY);
            assert!(s.value > prev || s.value == MAX_SCORE);
            assert!(s.value <= MAX_SCORE);
            prev = s.value;
        }
        assert!((s.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn pairwise_replacement_keeps_last_value() {
        let mut book = RatingBook::new(DEFAULT_DECAY);
        book.record(1, 7, RatingValue::Plus);
        assert_eq!(book.pairwise(1, 7), Some(RatingValue::Plus));
        book.record(1, 7, RatingValue::Minus);
        assert_eq!(book.pairwise(1, 7), Some(RatingValue::Minus));
        // Both events entered the global score as observations.
        assert_eq!(book.global(7).n_observations, 2);
        let oracle = fold_score(&[RatingValue::Plus, RatingValue::Minus], DEFAULT_DECAY);
        assert_eq!(book.global(7).value, oracle.value);
    }

    #[test]
    fn never_rated_pair_is_absent() {
        let book = RatingBook::new(DEFAULT_DECAY);
        assert_eq!(book.pairwise(0, 1), None);
    }

    #[test]
    fn effective_prefers_pairwise_over_global() {
        let mut book = RatingBook::new(DEFAULT_DECAY);
        // Drive the subject's global well below 3, then pin the pair at Plus.
        for _ in 0..10 {
            book.record(9, 7, RatingValue::Minus);
        }
        book.record(1, 7, RatingValue::Plus);
        assert_eq!(book.effective(1, 7), 3.0);
    }

    #[test]
    fn effective_falls_back_to_global() {
        let mut book = RatingBook::new(DEFAULT_DECAY);
        assert_eq!(book.effective(1, 7), SEED_SCORE);
        book.record(2, 7, RatingValue::Plus);
        let global = book.global(7).value;
        assert_eq!(book.effective(1, 7), global);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn rating() -> impl Strategy<Value = RatingValue> {
            prop_oneof![
                Just(RatingValue::Minus),
                Just(RatingValue::Check),
                Just(RatingValue::Plus),
            ]
        }

        proptest! {
            #[test]
            fn score_stays_in_bounds(history in proptest::collection::vec(rating(), 0..200)) {
                let mut s = ReputationScore::seed();
                for r in &history {
                    s = s.update(*r, DEFAULT_DECAY);
                    prop_assert!(s.value >= MIN_SCORE && s.value <= MAX_SCORE);
                }
            }

            #[test]
            fn incremental_equals_fold(history in proptest::collection::vec(rating(), 0..200)) {
                let mut s = ReputationScore::seed();
                for r in &history {
                    s = s.update(*r, DEFAULT_DECAY);
                }
                let oracle = fold_score(&history, DEFAULT_DECAY);
                prop_assert_eq!(s.value.to_bits(), oracle.value.to_bits());
                prop_assert_eq!(s.n_observations, oracle.n_observations);
            }

            #[test]
            fn update_moves_strictly_toward_rating(
                history in proptest::collection::vec(rating(), 0..50),
                next in rating(),
            ) {
                let mut s = ReputationScore::seed();
                for r in &history {
                    s = s.update(*r, DEFAULT_DECAY);
                }
                let target = next.score();
                let before = (s.value - target).abs();
                let after = (s.update(next, DEFAULT_DECAY).value - target).abs();
                if before == 0.0 {
                    prop_assert_eq!(after, 0.0);
                } else {
                    prop_assert!(after < before);
                }
            }

            #[test]
            fn k_plus_beats_k_check(k in 1usize..60) {
                let mut plus = ReputationScore::seed();
                let mut check = ReputationScore::seed();
                for _ in 0..k {
                    plus = plus.update(RatingValue::Plus, DEFAULT_DECAY);
                    check = check.update(RatingValue::Check, DEFAULT_DECAY);
                }
                prop_assert!(plus.value > check.value);
            }
        }
    }
}
