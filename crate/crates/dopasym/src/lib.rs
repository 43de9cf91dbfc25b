//! Discrete orthogonal polynomials on finite node sets: exact high-precision
//! computation, constrained logarithmic-energy equilibrium measures,
//! Plancherel-Rotach-type asymptotics across the complex plane, and the
//! universality statistics (sine kernel, Airy kernel, Tracy-Widom) of the
//! associated determinantal ensembles, including rhombus tilings of the
//! abc-hexagon.

pub mod error;
pub mod prec;
pub mod quad;
pub mod special;

pub mod lattice;
pub mod linalg;
pub mod orthopoly;

pub mod equilibrium;
pub mod outer;

pub mod asymptotics;
pub mod kernels;

pub mod hexagon;

pub use error::{Error, Result};
