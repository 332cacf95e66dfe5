//! Coupon collecting from a mixture of uniform coupon groups.
//!
//! A pool holds `g` groups; group `j` has `M_j` coupons, each drawn with
//! probability `p_j`. The crate computes which group is completed first,
//! moments of the group and total completion times, their large-`M`
//! approximations, and a reproducible simulator to check all of them.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use model::{GroupMixture, MixtureConfig, ScalingFamily, ThetaExample};
pub use scalar::Scalar;
