//! Random walks, percolation and self-avoiding walks on Cayley graphs of free
//! products of cyclic groups.

pub mod ball;
pub mod certificate;
pub mod config;
pub mod group;
pub mod kernel;
pub mod par;
pub mod perc;
pub mod rng;
pub mod saw;
pub mod stats;
pub mod union_find;
pub mod verify;
