//! Opaque identifier newtypes shared by every module.
//!
//! Identifiers are dense unsigned integers assigned by the engine in creation
//! order, so they are stable across replays of the same event log.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Simulated time. Ticks are supplied by the caller and must be non-decreasing
/// across engine commands.
pub type Tick = u64;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident, $prefix:literal) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl From<u64> for $name {
            fn from(raw: u64) -> Self {
                $name(raw)
            }
        }
    };
}

id_type!(
    /// A worker account.
    WorkerId,
    "W"
);
id_type!(
    /// A requester account.
    RequesterId,
    "R"
);
id_type!(
    /// A posted project (a group of tasks from one requester).
    ProjectId,
    "P"
);
id_type!(
    /// A single unit of work inside a project.
    TaskId,
    "T"
);
id_type!(
    /// One worker's submitted result for one task.
    SubmissionId,
    "S"
);
