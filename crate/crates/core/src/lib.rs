//! Symbolic computations with local Arthur parameters and extended multi-segments
//! for `Sp(2n)` and split `SO(2n+1)` over a p-adic field.

pub mod algorithm;
pub mod arith;
pub mod census;
pub mod classify;
pub mod ems;
pub mod ldata;
pub mod multiset;
pub mod params;
pub mod rho;
