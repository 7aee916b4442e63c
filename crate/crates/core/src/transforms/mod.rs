// SPDX-License-Identifier: Apache-2.0

//! Logic transformations over AIGs and the machinery they share.

mod balance;
pub mod library;
mod network;
pub mod npn;
mod refactor;
mod resub;
mod rewrite;
pub mod template;
pub mod truth;

pub use balance::balance;
pub use network::{Network, Pricing};
pub use refactor::{factored_template, isop, refactor, Cube};
pub use resub::resub;
pub use rewrite::rewrite;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aig::{strash, Aig};

/// The seven primitive optimizations, in action-index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TransformId {
    Resub,
    ResubZ,
    Rewrite,
    RewriteZ,
    Refactor,
    RefactorZ,
    Balance,
}

impl TransformId {
    pub const ALL: [TransformId; 7] = [
        TransformId::Resub,
        TransformId::ResubZ,
        TransformId::Rewrite,
        TransformId::RewriteZ,
        TransformId::Refactor,
        TransformId::RefactorZ,
        TransformId::Balance,
    ];

    pub const COUNT: usize = 7;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<TransformId> {
        TransformId::ALL.get(i).copied()
    }

    /// Command-style name, e.g. `rewrite -z`.
    pub fn name(self) -> &'static str {
        match self {
            TransformId::Resub => "resub",
            TransformId::ResubZ => "resub -z",
            TransformId::Rewrite => "rewrite",
            TransformId::RewriteZ => "rewrite -z",
            TransformId::Refactor => "refactor",
            TransformId::RefactorZ => "refactor -z",
            TransformId::Balance => "balance",
        }
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown transform `{0}`")]
pub struct UnknownTransform(pub String);

impl FromStr for TransformId {
    type Err = UnknownTransform;

    /// Accepts the command names with any whitespace between the command and
    /// `-z`.
    fn from_str(s: &str) -> Result<TransformId, UnknownTransform> {
        let normalized = s.split_whitespace().collect::<Vec<_>>().join(" ");
        TransformId::ALL
            .into_iter()
            .find(|t| t.name() == normalized)
            .ok_or_else(|| UnknownTransform(s.to_string()))
    }
}

/// Applies one transform and re-strashes the result.
pub fn apply(g: &Aig, t: TransformId) -> Aig {
    let out = match t {
        TransformId::Resub => resub(g, false),
        TransformId::ResubZ => resub(g, true),
        TransformId::Rewrite => rewrite(g, false),
        TransformId::RewriteZ => rewrite(g, true),
        TransformId::Refactor => refactor(g, false),
        TransformId::RefactorZ => refactor(g, true),
        TransformId::Balance => balance(g),
    };
    strash(&out)
}
