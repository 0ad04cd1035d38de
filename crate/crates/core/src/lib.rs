//! Coordinate & Play: adversarial multi-player bandits where colliding
//! players are charged a full loss and nobody can communicate.
//!
//! * [`kdpp`]: exact sampling and marginals of product-weight K-subsets.
//! * [`metaplayer`]: EXP3 over meta-arms with one observed member.
//! * [`protocol`]: ranking, coordinator and follower state machines.
//! * [`engine`]: simultaneous play, collision resolution and regret.
//! * [`adversaries`]: oblivious loss schedules.
//! * [`baseline_mc`]: the Musical Chairs baseline.
//! * [`experiment`] and [`cli`]: seeded multi-run experiments and CSV output.

pub mod adversaries;
pub mod baseline_mc;
pub mod cli;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod kdpp;
pub mod metaplayer;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
