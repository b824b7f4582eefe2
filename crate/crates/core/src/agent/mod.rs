//! Tabular Q-learning battery controller.
//!
//! The agent observes `(hour of day, SoC bin)` and picks one of three
//! actions each hour. Rewards are the negative grid cost of the step, so the
//! learned greedy policy minimises the electricity bill.

mod action;
mod env;
mod learn;
mod qtable;

pub use action::Action;
pub use env::{env_step, reward, RewardMode, RewardSpec};
pub use learn::{evaluate_policy, select_action, train, EpsilonSchedule, GreedyPolicy, QLearningParams, TrainingOutcome};
pub use qtable::{discretize, greedy_action, q_update, DiscreteState, QTable, QTABLE_HEADER};
