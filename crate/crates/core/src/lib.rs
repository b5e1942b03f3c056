//! Dynamic service migration for mobile edge clouds.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! - [`cost_model`]: constant-plus-exponential migration/transmission costs
//!   and the three-point fit of a tabulated cost onto that family.
//! - [`distance_mdp`]: the 1-D distance MDP, its closed-form policy
//!   evaluation and the difference-equation policy iteration.
//! - [`hex`] and [`hex_mdp`]: ring-indexed hexagon offsets, the 2-D offset MDP,
//!   exact solvers and the distance-based approximation.
//! - [`baselines`]: never-migrate, always-migrate and myopic policies.
//! - [`simulator`]: Monte Carlo random walks and the trace-driven pipeline.
//!
//! File formats, trace ingestion and the command-line tool live in the
//! `edgemig` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod baselines;
pub mod cost_model;
pub mod distance_mdp;
pub mod hex;
pub mod hex_mdp;
pub mod linalg;
mod math;
pub mod simulator;

pub use baselines::BaselineKind;
pub use cost_model::{ConstPlusExpCost, FitResult, TabulatedCost};
pub use distance_mdp::{DistanceMdpSpec, DistancePolicy, ValueTable1D};
pub use hex::{Axial, HexOffset};
pub use hex_mdp::{HexMdpSpec, HexPolicy, HexStateSpace, ValueTable2D};
