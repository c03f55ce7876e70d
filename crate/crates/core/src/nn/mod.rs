//! Feed-forward tanh networks, Gaussian policy head, Adam, and parameter
//! persistence.

mod adam;
mod mlp;
mod normalizer;
mod persist;
mod policy;

pub use adam::{AdamConfig, AdamState};
pub use mlp::{Dense, Mlp, MlpCache};
pub use normalizer::{RunningNorm, CLIP as OBS_CLIP};
pub use persist::{load_params, read_params, save_params, write_params, FORMAT_VERSION, MAGIC};
pub use policy::{
    gaussian_log_prob, sample_action, ForwardCache, MlpSpec, PolicyParams, Weights, LOG_STD_MAX,
    LOG_STD_MIN,
};
