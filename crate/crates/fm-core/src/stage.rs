use std::fmt;

use serde::{Deserialize, Serialize};

/// The five stages a thing can pass through inside a machine.
///
/// The derived `Ord` is alphabetical and is used wherever stage sets are
/// printed or serialized. Walks through a machine visit stages in a
/// different order; see [`StageKind::walk_rank`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StageKind {
    Create,
    Process,
    Receive,
    Release,
    Transfer,
}

pub const ALL_STAGES: [StageKind; 5] = [
    StageKind::Create,
    StageKind::Process,
    StageKind::Receive,
    StageKind::Release,
    StageKind::Transfer,
];

impl StageKind {
    pub fn name(self) -> &'static str {
        match self {
            StageKind::Create => "Create",
            StageKind::Process => "Process",
            StageKind::Receive => "Receive",
            StageKind::Release => "Release",
            StageKind::Transfer => "Transfer",
        }
    }

    pub fn from_name(s: &str) -> Option<StageKind> {
        ALL_STAGES.iter().copied().find(|k| k.name() == s)
    }

    /// Position of the stage along a machine's walk: things arrive via
    /// Transfer/Receive only after originating somewhere, so a walk orders
    /// Create, Receive, Process, Release, Transfer.
    pub fn walk_rank(self) -> u8 {
        match self {
            StageKind::Create => 0,
            StageKind::Receive => 1,
            StageKind::Process => 2,
            StageKind::Release => 3,
            StageKind::Transfer => 4,
        }
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
