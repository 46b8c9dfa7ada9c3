//! Probabilistic symmetry breaking for finite groups.
//!
//! Equivariant functions cannot break the self-symmetries of their inputs:
//! an equivariant `f` satisfies `G_x ⊆ G_{f(x)}`. Equivariant *conditional
//! distributions* can. This crate implements the machinery for representing
//! them with ordinary equivariant maps: canonicalization and inversion
//! kernels ([`canon`]), symmetry-breaking positional encodings and noise
//! injection ([`sympe`]), and statistical and exact verification engines
//! ([`equicheck`]). Two worked systems sit on top: the anisotropic Ising
//! model with an equivariant network trained to find ground states
//! ([`ising`], [`toynet`]), and link prediction on small automorphic graphs
//! ([`graphdemo`]).

pub mod canon;
pub mod equicheck;
pub mod error;
pub mod format;
pub mod graphdemo;
pub mod groups;
pub mod ising;
pub mod rng;
pub mod sympe;
pub mod toynet;

pub use error::{Error, Result};
pub use groups::{Element, FiniteGroup, GroupAction, LinearAction, PermutationAction, Subgroup};
pub use rng::Rng;
