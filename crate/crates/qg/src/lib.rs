//! Verification laboratory for finite quantum groups.
//!
//! The library builds concrete fundamental unitaries for finite groups and
//! their duals, defines two convolution products on trace-class matrices and
//! a pair of associative mixed products on trace-zero matrices, and verifies
//! every structural identity numerically with explicit residuals.

pub mod bundle;
pub mod conv;
pub mod group;
pub mod lie;
pub mod linalg;
pub mod lp;
pub mod multipliers;
pub mod report;
pub mod suite;
