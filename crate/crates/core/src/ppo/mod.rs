//! Rollout collection, advantage estimation, the clipped surrogate, and the
//! two trainer variants.
//!
//! `ppo1` trains from one environment with full-batch epochs. `ppo2` steps a
//! vector of environments in lock-step and trains on shuffled minibatches
//! with value clipping and global gradient-norm clipping.

mod gae;
mod hyper;
mod log;
mod loss;
mod rollout;
mod trainer;

pub use gae::{compute_gae, normalize_advantages, AdvantageSet};
pub use hyper::{Algorithm, PpoHyper};
pub use log::{CsvLogSink, IterationLog, LogSink, MemorySink, TRAIN_LOG_HEADER};
pub use loss::{clip_gradient_norm, loss_and_grad, ppo_clip_loss, Batch, LossConfig, LossStats};
pub use rollout::{collect_rollout, Collector, EpisodeRecord, Rollout};
pub(crate) use rollout::worker_rng;
pub use trainer::{train, train_ppo1, train_ppo2, TrainOutcome};
