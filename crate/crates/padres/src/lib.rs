//! p-adic limits of p-power cyclic resultants, with applications to knot
//! branched-cover homology growth, class numbers of function-field towers,
//! and unit computations in the cyclotomic Z_2-extension of Q.

pub mod cli;
pub mod ffields;
pub mod intpoly;
pub mod knots;
pub mod limits;
pub mod localfactor;
pub mod padic;
pub mod weber;
