//! Exact and numerical checks for two-product (Jordan–Lie) algebras across
//! the elliptic, parabolic and hyperbolic composability classes.

pub mod algebra;
pub mod berezin;
pub mod envariance;
pub mod hilbert;
pub mod moyalpos;
pub mod phasepoly;
pub mod poly;
pub mod quantion;
pub mod scalars;
