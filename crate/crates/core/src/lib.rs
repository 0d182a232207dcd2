//! Core algorithms for building, analyzing, and synthesizing attributed
//! social-contact graphs.
//!
//! The crate covers five areas:
//!
//! * [`graph`] — the attributed-graph data model (feature schemas, node
//!   tables, edge lists, adjacency indices), permutations, and G(N,M)
//!   random-graph initialization.
//! * [`stats`] — network statistics used to characterize and compare graphs:
//!   degree distributions, triangles, components, assortativity, mixing
//!   matrices, Laplacian spectra, and power-law tail fits.
//! * [`sample`] — node/edge train-test splits, random-walk mini-batches,
//!   negative-edge sampling, and star/neighborhood/snowball samples.
//! * [`autodiff`], [`gnn`], [`tasks`], [`tabgen`] — a dense reverse-mode
//!   autodiff engine, the MLP/GCN/GraphSAGE encoders built on it, the node
//!   classification and link-prediction training pipelines, and generative
//!   models over node-attribute tables.
//! * [`generate`], [`ergm`] — graph generation by iterated link prediction,
//!   and exponential random graph models (sufficient/change statistics,
//!   pseudo-likelihood fitting, MCMC simulation, degree goodness-of-fit).
//!
//! The crate is `no_std`-compatible (requires `alloc`); file formats and the
//! command-line driver live in the companion `synthnet-cli` crate. All
//! randomized operations take explicit seeds and are deterministic for a
//! given seed.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod autodiff;
mod error;
pub mod ergm;
pub mod generate;
pub mod gnn;
pub mod graph;
pub(crate) mod math;
pub mod sample;
pub mod stats;
pub mod tabgen;
pub mod tasks;

pub use error::{Error, Result};
