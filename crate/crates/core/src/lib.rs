//! Obstruction calculus for highly regular embeddings of Euclidean space.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: binary digit counts and mod-2 binomials;
//! * [`gf2poly`]: sparse graded polynomials over F_2 with series inversion;
//! * [`cohmodel`]: the vanishing-relation model of `H^*(F(R^d, k)/S_k; F_2)`;
//! * [`charclass`]: Stiefel–Whitney classes and non-vanishing certificates;
//! * [`dickson`]: explicit Dickson invariants and their GL-invariance;
//! * [`bounds`]: closed-form lower bounds and tightness annotations;
//! * [`regcheck`]: exact and floating-point checks of explicit regular maps.

pub mod bounds;
pub mod charclass;
pub mod cohmodel;
pub mod dickson;
pub mod dyadic;
pub mod gf2poly;
pub mod regcheck;
