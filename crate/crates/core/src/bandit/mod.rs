//! Bandit environments and the ε-greedy baseline.

mod contextual;
mod eps_greedy;
mod gaussian;

pub use contextual::ContextualBandit;
pub use eps_greedy::EpsGreedyAgent;
pub use gaussian::{GaussianBandit, Schedule, ScheduleEvent};
