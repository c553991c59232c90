//! Attainability probabilities of action bins and statistics over reward curves.

mod attainability;
mod series;

pub use attainability::{
    all_actions_probability, attainability_exact, attainability_monte_carlo,
    attainability_probability, unattainability_probability, AttainabilityParams, MonteCarlo,
};
pub use series::{aggregate_repeats, moving_average, savgol_smooth, CurveStats};
