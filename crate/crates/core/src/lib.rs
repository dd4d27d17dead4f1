//! Featurization and classification of labelled binary dynamics (spike
//! trains) on a directed graph, through graph-theoretic, topological and
//! spectral parameters of closed vertex neighbourhoods.
//!
//! The pieces, bottom up:
//!
//! - [`digraph`]: immutable directed simple graphs, edge-list I/O, closed
//!   neighbourhoods, induced subgraphs, strongly connected components and
//!   the rewiring surgery used by the validation experiments;
//! - [`flag`]: directed flag complexes (clique enumeration, simplex counts,
//!   Euler characteristic);
//! - [`homology`]: mod-2 Betti numbers and the normalised Betti coefficient;
//! - [`spectral`]: adjacency, transition-probability, Chung and Bauer
//!   Laplacian spectra with radius and both gap conventions;
//! - [`params`]: the closed registry of selection/feature parameter codes;
//! - [`pipeline`]: time binning, active subgraphs, featurisation,
//!   neighbourhood selection, filtration layers, validation modes and the
//!   CSV formats;
//! - [`simdyn`]: seeded Erdős–Rényi digraphs plus a leaky integrate-and-fire
//!   network for generating labelled dynamics at desk scale;
//! - [`classify`]: one-versus-one RBF support vector machine (SMO), nearest
//!   centroid baseline, stratified split and cross-validation.
//!
//! Everything real-valued is generic over the scalar via [`Real`]; the
//! aliases below pin the `f64` instantiations used by the CLI and the file
//! formats.

pub mod classify;
pub mod digraph;
pub mod error;
pub mod flag;
pub mod homology;
pub mod params;
pub mod pipeline;
pub mod real;
pub mod simdyn;
pub mod spectral;

pub use digraph::{Digraph, Neighbourhood, VertexSet};
pub use error::{Error, Result};
pub use params::{EvalTarget, ParameterCode};
pub use real::Real;

/// Default `f64` instantiations.
pub type SpectralSummary64 = spectral::SpectralSummary<f64>;
pub type BinSpec64 = pipeline::BinSpec<f64>;
pub type FeatureMatrix64 = pipeline::FeatureMatrix<f64>;
pub type BinaryDynamicsSet64 = pipeline::BinaryDynamicsSet<f64>;
pub type Trial64 = pipeline::Trial<f64>;
pub type Dataset64 = classify::Dataset<f64>;
pub type TrainedModel64 = classify::TrainedModel<f64>;
pub type StimulusProtocol64 = simdyn::StimulusProtocol<f64>;
pub type LifConfig64 = simdyn::LifConfig<f64>;
