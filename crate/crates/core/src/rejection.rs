//! Personalized rejection rates.
//!
//! The reputation range `[1, 3]` is partitioned into six equal buckets. The
//! rate a worker sees for a requester blends the worker's own review history
//! with that requester (weighted `personal_weight`) against the history of
//! everyone else currently in the worker's bucket. Where data runs out the
//! estimate falls back, in order: bucket peers only; the worker's bucket
//! under requesters in the same requester-reputation bucket; the worker's
//! bucket across the whole platform; 0.0.
//!
//! Bucket membership is evaluated at query time against current global
//! scores, so a worker whose reputation moves carries their history into the
//! new bucket. Only reviewed submissions count; pending ones are invisible.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::MarketError;
use crate::ids::{RequesterId, WorkerId};
use crate::reputation::{MAX_SCORE, MIN_SCORE};

/// Number of equal buckets over the score range.
pub const BUCKET_COUNT: u8 = 6;

/// Default weight of the worker's own history once any exists.
pub const DEFAULT_PERSONAL_WEIGHT: f64 = 0.75;

/// Bucket index for a reputation score: `floor((score - 1) * 3)`, with the
/// top of the range closed (a score of exactly 3 lands in bucket 5).
pub fn bucket_of(score: f64) -> Result<u8, MarketError> {
    if !score.is_finite() || !(MIN_SCORE..=MAX_SCORE).contains(&score) {
        return Err(MarketError::ScoreOutOfRange(score));
    }
    Ok((((score - 1.0) * 3.0).floor() as u8).min(BUCKET_COUNT - 1))
}

/// Accept/reject tallies for one (requester, worker) pair or an aggregate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReviewCounts {
    pub accepted: u64,
    pub rejected: u64,
}

impl ReviewCounts {
    pub fn total(&self) -> u64 {
        self.accepted + self.rejected
    }

    /// Rejected share of reviewed submissions; `None` with no reviews.
    pub fn rate(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.rejected as f64 / total as f64)
    }

    fn add(&mut self, rejected: bool) {
        if rejected {
            self.rejected += 1;
        } else {
            self.accepted += 1;
        }
    }

    fn merge(&mut self, other: ReviewCounts) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
    }
}

/// Review tallies per (requester, worker) pair. Bucket views are grouped at
/// query time from these pair counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RejectionBook {
    counts: BTreeMap<(RequesterId, WorkerId), ReviewCounts>,
}

impl RejectionBook {
    pub fn record(&mut self, requester: RequesterId, worker: WorkerId, rejected: bool) {
        self.counts
            .entry((requester, worker))
            .or_default()
            .add(rejected);
    }

    pub fn pair(&self, requester: RequesterId, worker: WorkerId) -> ReviewCounts {
        self.counts
            .get(&(requester, worker))
            .copied()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(RequesterId, WorkerId), &ReviewCounts)> {
        self.counts.iter()
    }
}

/// A bucketed snapshot of the review book at current reputation scores.
#[derive(Debug)]
pub struct RateContext<'a> {
    pub reviews: &'a RejectionBook,
    pub worker_buckets: BTreeMap<WorkerId, u8>,
    pub requester_buckets: BTreeMap<RequesterId, u8>,
    pub personal_weight: f64,
}

impl RateContext<'_> {
    /// Personalized rejection rate `worker` sees for `requester`.
    pub fn rate(&self, worker: WorkerId, requester: RequesterId) -> f64 {
        let Some(&bucket) = self.worker_buckets.get(&worker) else {
            return 0.0;
        };
        let personal = self.reviews.pair(requester, worker);
        let peers = self.requester_bucket_counts(requester, bucket, Some(worker));
        if let Some(personal_rate) = personal.rate() {
            return match peers.rate() {
                Some(peer_rate) => {
                    self.personal_weight * personal_rate
                        + (1.0 - self.personal_weight) * peer_rate
                }
                None => personal_rate,
            };
        }
        if let Some(peer_rate) = peers.rate() {
            return peer_rate;
        }
        if let Some(similar) = self.similar_requester_rate(requester, bucket) {
            return similar;
        }
        self.platform_bucket_counts(bucket).rate().unwrap_or(0.0)
    }

    /// Reviews by `requester` of workers currently in `bucket`, optionally
    /// excluding one worker ("everyone else in the worker's bucket").
    pub fn requester_bucket_counts(
        &self,
        requester: RequesterId,
        bucket: u8,
        exclude: Option<WorkerId>,
    ) -> ReviewCounts {
        let mut total = ReviewCounts::default();
        for (&(r, w), counts) in self.reviews.iter() {
            if r != requester || exclude == Some(w) {
                continue;
            }
            if self.worker_buckets.get(&w) == Some(&bucket) {
                total.merge(*counts);
            }
        }
        total
    }

    /// Rate for `worker_bucket` under requesters sharing the given
    /// requester's reputation bucket.
    fn similar_requester_rate(&self, requester: RequesterId, worker_bucket: u8) -> Option<f64> {
        let requester_bucket = self.requester_buckets.get(&requester)?;
        let mut total = ReviewCounts::default();
        for (&(r, w), counts) in self.reviews.iter() {
            if self.requester_buckets.get(&r) != Some(requester_bucket) {
                continue;
            }
            if self.worker_buckets.get(&w) == Some(&worker_bucket) {
                total.merge(*counts);
            }
        }
        total.rate()
    }

    /// Platform-wide tallies for one worker bucket.
    pub fn platform_bucket_counts(&self, worker_bucket: u8) -> ReviewCounts {
        let mut total = ReviewCounts::default();
        for (&(_, w), counts) in self.reviews.iter() {
            if self.worker_buckets.get(&w) == Some(&worker_bucket) {
                total.merge(*counts);
            }
        }
        total
    }

    /// Per-bucket tallies of one requester's reviews, for inspection output.
    pub fn bucket_table(&self, requester: RequesterId) -> [ReviewCounts; BUCKET_COUNT as usize] {
        let mut table = [ReviewCounts::default(); BUCKET_COUNT as usize];
        for (&(r, w), counts) in self.reviews.iter() {
            if r != requester {
                continue;
            }
            if let Some(&b) = self.worker_buckets.get(&w) {
                table[b as usize].merge(*counts);
            }
        }
        table
    }
}
