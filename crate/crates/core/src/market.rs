//! Marketplace lifecycle and the append-only event log.
//!
//! The engine is a single-writer state machine: every mutation enters through
//! one command method, is validated, and lands in the log as a [`MarketEvent`].
//! Replaying a log through [`Engine::apply`] reconstructs the full state; the
//! log is the only persistence format and everything else is derived.
//!
//! Commands check *policy* (access thresholds) as well as structure; `apply`
//! checks only structure. Recorded events are facts: replaying a log under
//! perturbed mechanism parameters recomputes reputation trajectories without
//! second-guessing what happened.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeState, Release};
use crate::error::MarketError;
use crate::ids::{ProjectId, RequesterId, SubmissionId, TaskId, Tick, WorkerId};
use crate::rejection::{self, RateContext, RejectionBook};
use crate::reputation::{RatingBook, RatingValue, ReputationScore};

/// Mechanism constants shared by every project in one engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams {
    /// Exponential decay weight for reputation updates.
    pub alpha: f64,
    /// Sliding-window length `T` for the release scheduler, in ticks.
    pub window: u64,
    /// Utilization ratio at or below which a release fires.
    pub lambda: f64,
    /// Weight of a worker's own history in their personalized rejection rate.
    pub personal_weight: f64,
}

impl Default for MechanismParams {
    fn default() -> Self {
        MechanismParams {
            alpha: crate::reputation::DEFAULT_DECAY,
            window: crate::cascade::DEFAULT_WINDOW,
            lambda: crate::cascade::DEFAULT_LAMBDA,
            personal_weight: rejection::DEFAULT_PERSONAL_WEIGHT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskState {
    Open,
    Assigned(WorkerId),
    Submitted(SubmissionId),
    Reviewed(SubmissionId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: TaskId,
    pub project: ProjectId,
    pub state: TaskState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub id: ProjectId,
    pub owner: RequesterId,
    pub tasks: Vec<TaskId>,
    pub created_at: Tick,
    pub cascade: CascadeState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReviewDecision {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pending,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Submission {
    pub id: SubmissionId,
    pub task: TaskId,
    pub worker: WorkerId,
    /// Latent quality supplied by the caller (the simulator). The mechanism
    /// never reads it; review policies and metrics do.
    pub quality: f64,
    pub outcome: Outcome,
    pub submitted_at: Tick,
    pub reviewed_at: Option<Tick>,
}

/// Which side rated which in a [`EventPayload::RatingGiven`] event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatingDirection {
    RequesterToWorker,
    WorkerToRequester,
}

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketEvent {
    pub seq: u64,
    pub tick: Tick,
    #[serde(flatten)]
    pub payload: EventPayload,
}

/// Event payloads. Serialized as `"type"` plus a `"payload"` object with the
/// field names below; see the README for the on-disk format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload")]
pub enum EventPayload {
    ProjectPosted {
        project: ProjectId,
        owner: RequesterId,
        n_tasks: u64,
        first_task: TaskId,
    },
    TaskAccepted {
        task: TaskId,
        project: ProjectId,
        worker: WorkerId,
    },
    SubmissionMade {
        submission: SubmissionId,
        task: TaskId,
        project: ProjectId,
        worker: WorkerId,
        quality: f64,
    },
    SubmissionReviewed {
        submission: SubmissionId,
        project: ProjectId,
        requester: RequesterId,
        worker: WorkerId,
        decision: ReviewDecision,
    },
    RatingGiven {
        direction: RatingDirection,
        rater: u64,
        ratee: u64,
        value: RatingValue,
    },
    ThresholdReduced {
        project: ProjectId,
        old_threshold: f64,
        new_threshold: f64,
        utilization: f64,
    },
    TimeSelfReported {
        worker: WorkerId,
        task: TaskId,
        seconds: f64,
    },
}

/// The marketplace state machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Engine {
    params: MechanismParams,
    n_workers: u64,
    n_requesters: u64,
    last_tick: Tick,
    projects: BTreeMap<ProjectId, Project>,
    tasks: BTreeMap<TaskId, Task>,
    submissions: BTreeMap<SubmissionId, Submission>,
    /// Requester -> worker ratings.
    worker_ratings: RatingBook,
    /// Worker -> requester ratings.
    requester_ratings: RatingBook,
    reviews: RejectionBook,
    /// task -> (worker -> seconds); a repeat report from the same worker
    /// replaces the previous one.
    time_reports: BTreeMap<TaskId, BTreeMap<WorkerId, f64>>,
    /// Workers who completed at least one submission for each requester.
    past_workers: BTreeMap<RequesterId, BTreeSet<WorkerId>>,
    events: Vec<MarketEvent>,
}

impl Engine {
    /// Fresh engine with `n_workers` worker accounts (`W0..`) and
    /// `n_requesters` requester accounts (`R0..`) already registered.
    pub fn new(params: MechanismParams, n_workers: u64, n_requesters: u64) -> Self {
        Engine {
            params,
            n_workers,
            n_requesters,
            last_tick: 0,
            projects: BTreeMap::new(),
            tasks: BTreeMap::new(),
            submissions: BTreeMap::new(),
            worker_ratings: RatingBook::new(params.alpha),
            requester_ratings: RatingBook::new(params.alpha),
            reviews: RejectionBook::default(),
            time_reports: BTreeMap::new(),
            past_workers: BTreeMap::new(),
            events: Vec::new(),
        }
    }

    // -- commands ------------------------------------------------------------

    /// Post a project of `n_tasks` open tasks, gated at threshold 3.
    pub fn post_project(
        &mut self,
        owner: RequesterId,
        n_tasks: u64,
        tick: Tick,
    ) -> Result<ProjectId, MarketError> {
        self.known_requester(owner)?;
        if n_tasks == 0 {
            return Err(MarketError::EmptyProject);
        }
        let project = ProjectId(self.projects.len() as u64);
        let first_task = TaskId(self.tasks.len() as u64);
        self.commit(
            tick,
            EventPayload::ProjectPosted {
                project,
                owner,
                n_tasks,
                first_task,
            },
        )?;
        Ok(project)
    }

    /// Take an open task. Fails when the cascade threshold still shuts this
    /// worker out, or when the worker already holds a task in the project.
    pub fn accept_task(
        &mut self,
        worker: WorkerId,
        task: TaskId,
        tick: Tick,
    ) -> Result<(), MarketError> {
        self.known_worker(worker)?;
        let t = self.task(task)?;
        let project = t.project;
        let p = self.project(project)?;
        if t.state != TaskState::Open {
            return Err(MarketError::TaskNotOpen { task });
        }
        let effective = self.worker_ratings.effective(p.owner.0, worker.0);
        let threshold = p.cascade.threshold();
        if effective < threshold {
            return Err(MarketError::AccessDenied {
                worker,
                project,
                effective,
                threshold,
            });
        }
        self.commit(
            tick,
            EventPayload::TaskAccepted {
                task,
                project,
                worker,
            },
        )?;
        Ok(())
    }

    /// Submit work for an assigned task. Counts as a completion in the
    /// project's release window.
    pub fn submit(
        &mut self,
        worker: WorkerId,
        task: TaskId,
        quality: f64,
        tick: Tick,
    ) -> Result<SubmissionId, MarketError> {
        self.known_worker(worker)?;
        let t = self.task(task)?;
        if t.state != TaskState::Assigned(worker) {
            return Err(MarketError::NotAssignee { task, worker });
        }
        let submission = SubmissionId(self.submissions.len() as u64);
        self.commit(
            tick,
            EventPayload::SubmissionMade {
                submission,
                task,
                project: t.project,
                worker,
                quality,
            },
        )?;
        Ok(submission)
    }

    /// Accept or reject a pending submission on one's own project.
    pub fn review(
        &mut self,
        requester: RequesterId,
        submission: SubmissionId,
        decision: ReviewDecision,
        tick: Tick,
    ) -> Result<(), MarketError> {
        self.known_requester(requester)?;
        let s = self.submission(submission)?;
        let task = s.task;
        let worker = s.worker;
        let project = self.task(task)?.project;
        let owner = self.project(project)?.owner;
        if owner != requester {
            return Err(MarketError::NotProjectOwner {
                requester,
                project,
            });
        }
        if s.outcome != Outcome::Pending {
            return Err(MarketError::AlreadyReviewed(submission));
        }
        self.commit(
            tick,
            EventPayload::SubmissionReviewed {
                submission,
                project,
                requester,
                worker,
                decision,
            },
        )?;
        Ok(())
    }

    /// Requester rates a worker on the three-point scale.
    pub fn rate_worker(
        &mut self,
        requester: RequesterId,
        worker: WorkerId,
        value: RatingValue,
        tick: Tick,
    ) -> Result<(), MarketError> {
        self.known_requester(requester)?;
        self.known_worker(worker)?;
        self.commit(
            tick,
            EventPayload::RatingGiven {
                direction: RatingDirection::RequesterToWorker,
                rater: requester.0,
                ratee: worker.0,
                value,
            },
        )?;
        Ok(())
    }

    /// Worker rates a requester on the three-point scale.
    pub fn rate_requester(
        &mut self,
        worker: WorkerId,
        requester: RequesterId,
        value: RatingValue,
        tick: Tick,
    ) -> Result<(), MarketError> {
        self.known_worker(worker)?;
        self.known_requester(requester)?;
        self.commit(
            tick,
            EventPayload::RatingGiven {
                direction: RatingDirection::WorkerToRequester,
                rater: worker.0,
                ratee: requester.0,
                value,
            },
        )?;
        Ok(())
    }

    /// Worker self-reports how long a task took them, in seconds.
    pub fn report_time(
        &mut self,
        worker: WorkerId,
        task: TaskId,
        seconds: f64,
        tick: Tick,
    ) -> Result<(), MarketError> {
        self.known_worker(worker)?;
        self.task(task)?;
        if !(seconds > 0.0) || !seconds.is_finite() {
            return Err(MarketError::NonPositiveSeconds(seconds));
        }
        self.commit(
            tick,
            EventPayload::TimeSelfReported {
                worker,
                task,
                seconds,
            },
        )?;
        Ok(())
    }

    /// Evaluate the release rule for every project that still has open tasks.
    /// Called by the simulator on every tick advance.
    pub fn run_release_checks(&mut self, now: Tick) -> Result<Vec<(ProjectId, Release)>, MarketError> {
        let candidates: Vec<ProjectId> = self
            .projects
            .values()
            .filter(|p| self.has_open_task(p))
            .map(|p| p.id)
            .collect();
        let mut fired = Vec::new();
        for project in candidates {
            let (owner, threshold, lambda, utilization) = {
                let p = self.projects.get_mut(&project).expect("listed above");
                p.cascade.advance_cache(now);
                (
                    p.owner,
                    p.cascade.threshold(),
                    p.cascade.lambda(),
                    p.cascade.utilization(now),
                )
            };
            let Some(utilization) = utilization.value() else {
                continue;
            };
            if utilization > lambda {
                continue;
            }
            let past = self.past_worker_ratings(owner);
            let pool = self.pool_ratings(owner);
            let new_threshold = crate::cascade::pick_new_threshold(threshold, &past, &pool);
            if new_threshold >= threshold {
                continue;
            }
            self.commit(
                now,
                EventPayload::ThresholdReduced {
                    project,
                    old_threshold: threshold,
                    new_threshold,
                    utilization,
                },
            )?;
            fired.push((
                project,
                Release {
                    old_threshold: threshold,
                    new_threshold,
                    utilization,
                },
            ));
        }
        Ok(fired)
    }

    // -- replay --------------------------------------------------------------

    /// Apply one logged event. Structure is re-validated; policy gates are
    /// not, because the log records what actually happened.
    pub fn apply(&mut self, event: &MarketEvent) -> Result<(), MarketError> {
        let expected = self.events.len() as u64;
        if event.seq != expected {
            return Err(MarketError::NonContiguousSeq {
                expected,
                found: event.seq,
            });
        }
        if event.tick < self.last_tick {
            return Err(MarketError::OutOfOrderTick {
                tick: event.tick,
                last: self.last_tick,
            });
        }
        self.apply_payload(event.tick, &event.payload)?;
        self.events.push(event.clone());
        self.last_tick = event.tick;
        Ok(())
    }

    fn commit(&mut self, tick: Tick, payload: EventPayload) -> Result<(), MarketError> {
        if tick < self.last_tick {
            return Err(MarketError::OutOfOrderTick {
                tick,
                last: self.last_tick,
            });
        }
        let event = MarketEvent {
            seq: self.events.len() as u64,
            tick,
            payload,
        };
        self.apply(&event)
    }

    fn apply_payload(&mut self, tick: Tick, payload: &EventPayload) -> Result<(), MarketError> {
        match payload {
            EventPayload::ProjectPosted {
                project,
                owner,
                n_tasks,
                first_task,
            } => {
                self.known_requester(*owner)?;
                if *n_tasks == 0 {
                    return Err(MarketError::EmptyProject);
                }
                if self.projects.contains_key(project) {
                    return Err(MarketError::IdCollision(project.to_string()));
                }
                let task_ids: Vec<TaskId> =
                    (first_task.0..first_task.0 + n_tasks).map(TaskId).collect();
                for id in &task_ids {
                    if self.tasks.contains_key(id) {
                        return Err(MarketError::IdCollision(id.to_string()));
                    }
                }
                for id in &task_ids {
                    self.tasks.insert(
                        *id,
                        Task {
                            id: *id,
                            project: *project,
                            state: TaskState::Open,
                        },
                    );
                }
                self.projects.insert(
                    *project,
                    Project {
                        id: *project,
                        owner: *owner,
                        tasks: task_ids,
                        created_at: tick,
                        cascade: CascadeState::new(tick, self.params.window, self.params.lambda),
                    },
                );
                Ok(())
            }
            EventPayload::TaskAccepted {
                task,
                project,
                worker,
            } => {
                self.known_worker(*worker)?;
                let project = *project;
                let worker = *worker;
                let t = self.task(*task)?;
                if t.project != project {
                    return Err(MarketError::UnknownTask(*task));
                }
                if t.state != TaskState::Open {
                    return Err(MarketError::TaskNotOpen { task: *task });
                }
                let p = self.project(project)?;
                let held = p.tasks.iter().any(|id| {
                    matches!(self.tasks.get(id), Some(t) if t.state == TaskState::Assigned(worker))
                });
                if held {
                    return Err(MarketError::AlreadyAssignedInProject { worker, project });
                }
                self.tasks.get_mut(task).expect("validated").state = TaskState::Assigned(worker);
                Ok(())
            }
            EventPayload::SubmissionMade {
                submission,
                task,
                project,
                worker,
                quality,
            } => {
                self.known_worker(*worker)?;
                if !(0.0..=1.0).contains(quality) || !quality.is_finite() {
                    return Err(MarketError::QualityOutOfRange(*quality));
                }
                if self.submissions.contains_key(submission) {
                    return Err(MarketError::IdCollision(submission.to_string()));
                }
                let t = self.task(*task)?;
                if t.project != *project {
                    return Err(MarketError::UnknownTask(*task));
                }
                if t.state != TaskState::Assigned(*worker) {
                    return Err(MarketError::NotAssignee {
                        task: *task,
                        worker: *worker,
                    });
                }
                let owner = self.project(*project)?.owner;
                self.tasks.get_mut(task).expect("validated").state =
                    TaskState::Submitted(*submission);
                self.submissions.insert(
                    *submission,
                    Submission {
                        id: *submission,
                        task: *task,
                        worker: *worker,
                        quality: *quality,
                        outcome: Outcome::Pending,
                        submitted_at: tick,
                        reviewed_at: None,
                    },
                );
                self.projects
                    .get_mut(project)
                    .expect("validated")
                    .cascade
                    .record_completion(tick)?;
                self.past_workers.entry(owner).or_default().insert(*worker);
                Ok(())
            }
            EventPayload::SubmissionReviewed {
                submission,
                project,
                requester,
                worker,
                decision,
            } => {
                let s = self.submission(*submission)?;
                if s.outcome != Outcome::Pending {
                    return Err(MarketError::AlreadyReviewed(*submission));
                }
                if s.worker != *worker {
                    return Err(MarketError::UnknownSubmission(*submission));
                }
                let task = s.task;
                let t_project = self.task(task)?.project;
                if t_project != *project {
                    return Err(MarketError::UnknownProject(*project));
                }
                let owner = self.project(*project)?.owner;
                if owner != *requester {
                    return Err(MarketError::NotProjectOwner {
                        requester: *requester,
                        project: *project,
                    });
                }
                let s = self.submissions.get_mut(submission).expect("validated");
                s.outcome = match decision {
                    ReviewDecision::Accepted => Outcome::Accepted,
                    ReviewDecision::Rejected => Outcome::Rejected,
                };
                s.reviewed_at = Some(tick);
                self.tasks.get_mut(&task).expect("validated").state =
                    TaskState::Reviewed(*submission);
                self.reviews
                    .record(*requester, *worker, *decision == ReviewDecision::Rejected);
                Ok(())
            }
            EventPayload::RatingGiven {
                direction,
                rater,
                ratee,
                value,
            } => {
                match direction {
                    RatingDirection::RequesterToWorker => {
                        self.known_requester(RequesterId(*rater))?;
                        self.known_worker(WorkerId(*ratee))?;
                        self.worker_ratings.record(*rater, *ratee, *value);
                    }
                    RatingDirection::WorkerToRequester => {
                        self.known_worker(WorkerId(*rater))?;
                        self.known_requester(RequesterId(*ratee))?;
                        self.requester_ratings.record(*rater, *ratee, *value);
                    }
                }
                Ok(())
            }
            EventPayload::ThresholdReduced {
                project,
                old_threshold,
                new_threshold,
                ..
            } => {
                let p = self
                    .projects
                    .get_mut(project)
                    .ok_or(MarketError::UnknownProject(*project))?;
                // Monotonicity is structural: a logged reduction must go down.
                if *new_threshold >= *old_threshold || *new_threshold > p.cascade.threshold() {
                    return Err(MarketError::ScoreOutOfRange(*new_threshold));
                }
                p.cascade.apply_release(tick, *new_threshold);
                Ok(())
            }
            EventPayload::TimeSelfReported {
                worker,
                task,
                seconds,
            } => {
                self.known_worker(*worker)?;
                self.task(*task)?;
                if !(seconds > &0.0) || !seconds.is_finite() {
                    return Err(MarketError::NonPositiveSeconds(*seconds));
                }
                self.time_reports
                    .entry(*task)
                    .or_default()
                    .insert(*worker, *seconds);
                Ok(())
            }
        }
    }

    // -- queries -------------------------------------------------------------

    pub fn params(&self) -> MechanismParams {
        self.params
    }

    pub fn n_workers(&self) -> u64 {
        self.n_workers
    }

    pub fn n_requesters(&self) -> u64 {
        self.n_requesters
    }

    pub fn workers(&self) -> impl Iterator<Item = WorkerId> {
        (0..self.n_workers).map(WorkerId)
    }

    pub fn requesters(&self) -> impl Iterator<Item = RequesterId> {
        (0..self.n_requesters).map(RequesterId)
    }

    pub fn last_tick(&self) -> Tick {
        self.last_tick
    }

    pub fn events(&self) -> &[MarketEvent] {
        &self.events
    }

    pub fn project(&self, id: ProjectId) -> Result<&Project, MarketError> {
        self.projects.get(&id).ok_or(MarketError::UnknownProject(id))
    }

    pub fn task(&self, id: TaskId) -> Result<&Task, MarketError> {
        self.tasks.get(&id).ok_or(MarketError::UnknownTask(id))
    }

    pub fn submission(&self, id: SubmissionId) -> Result<&Submission, MarketError> {
        self.submissions
            .get(&id)
            .ok_or(MarketError::UnknownSubmission(id))
    }

    pub fn projects(&self) -> impl Iterator<Item = &Project> {
        self.projects.values()
    }

    pub fn submissions(&self) -> impl Iterator<Item = &Submission> {
        self.submissions.values()
    }

    fn has_open_task(&self, project: &Project) -> bool {
        project
            .tasks
            .iter()
            .any(|id| matches!(self.tasks.get(id), Some(t) if t.state == TaskState::Open))
    }

    /// Projects that still have at least one open task, in id order.
    pub fn open_projects(&self) -> Vec<ProjectId> {
        self.projects
            .values()
            .filter(|p| self.has_open_task(p))
            .map(|p| p.id)
            .collect()
    }

    /// Lowest-id open task of a project.
    pub fn first_open_task(&self, project: ProjectId) -> Result<Option<TaskId>, MarketError> {
        let p = self.project(project)?;
        Ok(p.tasks
            .iter()
            .copied()
            .find(|id| matches!(self.tasks.get(id), Some(t) if t.state == TaskState::Open)))
    }

    /// Pending submissions on this requester's projects, oldest first.
    pub fn pending_submissions_for(&self, requester: RequesterId) -> Vec<SubmissionId> {
        self.submissions
            .values()
            .filter(|s| s.outcome == Outcome::Pending)
            .filter(|s| {
                self.tasks
                    .get(&s.task)
                    .and_then(|t| self.projects.get(&t.project))
                    .is_some_and(|p| p.owner == requester)
            })
            .map(|s| s.id)
            .collect()
    }

    /// The rating a requester effectively holds of a worker: their pairwise
    /// rating, else the worker's global score.
    pub fn effective_rating(&self, viewer: RequesterId, subject: WorkerId) -> f64 {
        self.worker_ratings.effective(viewer.0, subject.0)
    }

    /// Same, from the worker side looking at a requester.
    pub fn effective_rating_of_requester(&self, viewer: WorkerId, subject: RequesterId) -> f64 {
        self.requester_ratings.effective(viewer.0, subject.0)
    }

    pub fn worker_rating_of_requester(
        &self,
        worker: WorkerId,
        requester: RequesterId,
    ) -> Option<RatingValue> {
        self.requester_ratings.pairwise(worker.0, requester.0)
    }

    pub fn requester_rating_of_worker(
        &self,
        requester: RequesterId,
        worker: WorkerId,
    ) -> Option<RatingValue> {
        self.worker_ratings.pairwise(requester.0, worker.0)
    }

    pub fn worker_global(&self, worker: WorkerId) -> ReputationScore {
        self.worker_ratings.global(worker.0)
    }

    pub fn requester_global(&self, requester: RequesterId) -> ReputationScore {
        self.requester_ratings.global(requester.0)
    }

    /// True iff the worker clears the project's current threshold.
    pub fn can_access(&self, worker: WorkerId, project: ProjectId) -> Result<bool, MarketError> {
        self.known_worker(worker)?;
        let p = self.project(project)?;
        Ok(self.worker_ratings.effective(p.owner.0, worker.0) >= p.cascade.threshold())
    }

    pub fn reviews(&self) -> &RejectionBook {
        &self.reviews
    }

    pub fn time_reports(&self, task: TaskId) -> Option<&BTreeMap<WorkerId, f64>> {
        self.time_reports.get(&task)
    }

    /// Bucketed view of review statistics at the current reputation scores.
    pub fn rejection_context(&self) -> RateContext<'_> {
        let worker_buckets = self
            .workers()
            .map(|w| {
                let bucket = rejection::bucket_of(self.worker_global(w).value)
                    .expect("reputation scores stay within [1, 3]");
                (w, bucket)
            })
            .collect();
        let requester_buckets = self
            .requesters()
            .map(|r| {
                let bucket = rejection::bucket_of(self.requester_global(r).value)
                    .expect("reputation scores stay within [1, 3]");
                (r, bucket)
            })
            .collect();
        RateContext {
            reviews: &self.reviews,
            worker_buckets,
            requester_buckets,
            personal_weight: self.params.personal_weight,
        }
    }

    /// Personalized rejection rate this worker sees for this requester.
    pub fn personalized_rejection_rate(&self, worker: WorkerId, requester: RequesterId) -> f64 {
        self.rejection_context().rate(worker, requester)
    }

    fn past_worker_ratings(&self, requester: RequesterId) -> Vec<f64> {
        self.past_workers
            .get(&requester)
            .map(|set| {
                set.iter()
                    .map(|w| self.worker_ratings.effective(requester.0, w.0))
                    .collect()
            })
            .unwrap_or_default()
    }

    fn pool_ratings(&self, requester: RequesterId) -> Vec<f64> {
        self.workers()
            .map(|w| self.worker_ratings.effective(requester.0, w.0))
            .collect()
    }

    fn known_worker(&self, worker: WorkerId) -> Result<(), MarketError> {
        if worker.0 < self.n_workers {
            Ok(())
        } else {
            Err(MarketError::UnknownWorker(worker))
        }
    }

    fn known_requester(&self, requester: RequesterId) -> Result<(), MarketError> {
        if requester.0 < self.n_requesters {
            Ok(())
        } else {
            Err(MarketError::UnknownRequester(requester))
        }
    }
}

/// Rebuild an engine from a logged event sequence.
pub fn replay(
    params: MechanismParams,
    n_workers: u64,
    n_requesters: u64,
    events: &[MarketEvent],
) -> Result<Engine, MarketError> {
    let mut engine = Engine::new(params, n_workers, n_requesters);
    for event in events {
        engine.apply(event)?;
    }
    Ok(engine)
}
