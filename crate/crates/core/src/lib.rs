//! Deterministic construction and certification of well-spread subspaces
//! of R^N, given as kernels of explicit sign check matrices.
//!
//! The pipeline: small inner subspaces with provable spreading (kernels of
//! mutually-unbiased-basis sign matrices), unbalanced bipartite expanders
//! (spectral Cayley-graph incidence and sum-product families), and the
//! local-constraint composition that imposes an inner subspace on every
//! right-vertex neighborhood. A certificate calculus tracks what each
//! stage proves, exact oracles ground the certificates at small scale, and
//! a basis-pursuit layer demonstrates the sparse-recovery consequence.

pub mod algebra;
pub mod analysis;
pub mod checkmat;
pub mod expanders;
pub mod kerdock;
pub mod report;
pub mod sensing;
pub mod tanner;

pub use analysis::{KernelBasis, Provenance, SpreadCertificate};
pub use checkmat::SignCheckMatrix;
pub use expanders::{BipartiteGraph, ProfileBound, RegularGraph};
pub use kerdock::{KerdockMatrix, LocalSubspace, MubSet};
pub use report::Report;
