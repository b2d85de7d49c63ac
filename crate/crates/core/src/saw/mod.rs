//! Self-avoiding walks: exact census, Rosenbluth sampling, connective
//! constant, endpoint law, speed, generating functions and the bubble.

pub mod census;
pub mod green;
pub mod law;
pub mod rosenbluth;
