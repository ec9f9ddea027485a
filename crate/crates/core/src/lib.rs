//! Solvers for patrolling security games in which an alarm system raises
//! spatially uncertain signals.
//!
//! The Defender waits at a vertex; when a signal fires it picks a route over
//! the targets the signal may refer to. [`covering`], [`approx`] and [`bnb`]
//! generate candidate routes, [`srg`] solves the resulting maxmin program and
//! [`placement`] picks the best waiting vertex.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod approx;
pub mod bench;
pub mod bnb;
pub mod budget;
pub mod covering;
pub mod error;
pub mod gen;
pub mod graph;
pub mod placement;
pub mod route;
pub mod srg;
pub mod topology;
pub mod trie;

pub use error::{Error, Result};
pub use graph::{Instance, TargetId};
pub use route::Route;
