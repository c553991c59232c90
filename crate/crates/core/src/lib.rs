//! HTMRL: a reinforcement-learning agent made only of a Hierarchical Temporal
//! Memory spatial pooler.
//!
//! The crate provides
//! - [`sdr`]: sparse distributed representations and a categorical encoder,
//! - [`pooler`]: the spatial pooler (overlaps, boosting, top-k selection,
//!   reward-scaled Hebbian updates),
//! - [`agent`]: the HTMRL agent (action bins, reward normalization),
//! - [`bandit`]: contextual and non-stationary Gaussian bandits plus an
//!   ε-greedy baseline,
//! - [`analysis`]: attainability probabilities and curve statistics.
//!
//! Learnable state is generic over [`Real`]; the aliases below fix the
//! precision for the common cases.

pub mod agent;
pub mod analysis;
pub mod bandit;
pub mod error;
pub mod pooler;
pub mod rng;
pub mod scalar;
pub mod sdr;

pub use agent::{AgentConfig, HtmrlAgent, NormalizationMode, RewardNormalizer, UpdateTarget};
pub use bandit::{ContextualBandit, EpsGreedyAgent, GaussianBandit, Schedule, ScheduleEvent};
pub use error::{HtmError, Result};
pub use pooler::{PoolerConfig, SpatialPooler};
pub use scalar::Real;
pub use sdr::{CategoryEncoder, Sdr};

pub type Pooler = SpatialPooler<f64>;
pub type Pooler32 = SpatialPooler<f32>;
pub type Agent = HtmrlAgent<f64>;
pub type Agent32 = HtmrlAgent<f32>;
pub type Normalizer = RewardNormalizer<f64>;
pub type Normalizer32 = RewardNormalizer<f32>;
pub type Gaussian = GaussianBandit<f64>;
pub type Gaussian32 = GaussianBandit<f32>;
pub type EpsGreedy = EpsGreedyAgent<f64>;
pub type EpsGreedy32 = EpsGreedyAgent<f32>;
