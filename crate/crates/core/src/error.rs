//! Error types for engine commands and derived queries.

use thiserror::Error;

use crate::ids::{ProjectId, RequesterId, SubmissionId, TaskId, Tick, WorkerId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("unknown worker {0}")]
    UnknownWorker(WorkerId),
    #[error("unknown requester {0}")]
    UnknownRequester(RequesterId),
    #[error("unknown project {0}")]
    UnknownProject(ProjectId),
    #[error("unknown task {0}")]
    UnknownTask(TaskId),
    #[error("unknown submission {0}")]
    UnknownSubmission(SubmissionId),
    #[error("project must contain at least one task")]
    EmptyProject,
    #[error("task {task} is not open")]
    TaskNotOpen { task: TaskId },
    #[error("task {task} is not assigned to worker {worker}")]
    NotAssignee { task: TaskId, worker: WorkerId },
    #[error(
        "worker {worker} denied access to project {project}: \
         effective rating {effective} below threshold {threshold}"
    )]
    AccessDenied {
        worker: WorkerId,
        project: ProjectId,
        effective: f64,
        threshold: f64,
    },
    #[error("worker {worker} already holds an assigned task in project {project}")]
    AlreadyAssignedInProject {
        worker: WorkerId,
        project: ProjectId,
    },
    #[error("requester {requester} does not own project {project}")]
    NotProjectOwner {
        requester: RequesterId,
        project: ProjectId,
    },
    #[error("submission {0} was already reviewed")]
    AlreadyReviewed(SubmissionId),
    #[error("tick {tick} precedes an already recorded tick {last}")]
    OutOfOrderTick { tick: Tick, last: Tick },
    #[error("submission quality {0} outside [0, 1]")]
    QualityOutOfRange(f64),
    #[error("self-reported time must be a positive number of seconds, got {0}")]
    NonPositiveSeconds(f64),
    #[error("reputation score {0} outside [1, 3]")]
    ScoreOutOfRange(f64),
    #[error("event seq {found} does not continue the log (expected {expected})")]
    NonContiguousSeq { expected: u64, found: u64 },
    #[error("{0} already exists")]
    IdCollision(String),
}
