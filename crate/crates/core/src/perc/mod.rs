//! Bond percolation: samplers, tree oracles, estimators, diagrams and
//! exponent fits.

pub mod cluster;
pub mod oracle;
pub mod diagram;
pub mod estimate;
pub mod exponents;
