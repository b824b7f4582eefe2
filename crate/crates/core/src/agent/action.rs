use std::fmt;

use serde::{Deserialize, Serialize};

/// Battery command for one step. Discriminants are the table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Charge = 0,
    Discharge = 1,
    Idle = 2,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Charge, Action::Discharge, Action::Idle];
    pub const COUNT: usize = 3;

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Charge => "charge",
            Action::Discharge => "discharge",
            Action::Idle => "idle",
        })
    }
}
