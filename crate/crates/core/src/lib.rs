//! Spectra, integrated density of states and gap labelling for decorated
//! chain graphs driven by Sturmian words.
//!
//! A two-letter Sturmian word `ω` (rotation number `α`, offset `θ`) selects,
//! at each integer site of a chain with spacing `L`, one of two *decorations*
//! — finite metric or combinatorial graphs glued at a base vertex.  The crate
//! builds finite truncations of the resulting graph, computes their Laplacian
//! spectra (metric: standard Kirchhoff/Dirichlet/Robin vertex conditions;
//! discrete: normalized Laplacian), and from those spectra the integrated
//! density of states, its plateaus (spectral gaps), and the gap labels
//! `αn + m` predicted by the underlying rotation dynamics.
//!
//! Module map:
//!
//! * [`words`] — Sturmian words, continued fractions, subword frequencies;
//! * [`graphs`] — decorations, model descriptions, metric and discrete
//!   truncations;
//! * [`metric_solver`] — eigenvalue counts and spectra of compact metric
//!   graphs (fast exact path for comb-like chains, unitary bond-evolution
//!   path for general graphs, finite-difference oracle);
//! * [`discrete_solver`] — normalized-Laplacian spectra and the
//!   discrete↔metric spectral correspondence;
//! * [`labels`] — IDS curves, gap detection, gap labelling, IDS jumps;
//! * [`nodal`] — nodal counts, Prüfer-angle winding on half-line graphs,
//!   and the rotation-number identities they verify.
//!
//! Everything numeric is generic over [`Scalar`] (implemented by `f32` and
//! `f64`); the crate-root aliases fix `f64` as the working precision.

pub mod error;
pub mod scalar;

pub mod words;

pub(crate) mod linalg;

pub mod graphs;

pub mod discrete_solver;
pub mod labels;
pub mod metric_solver;
pub mod nodal;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Working floating-point precision used by the command-line front end.
pub type Real = f64;

/// Sturmian word parameters at working precision.
pub type SturmianParameters = words::SturmianParameters<Real>;

/// Decorated-chain model description at working precision.
pub type ModelSpec = graphs::ModelSpec<Real>;

/// Decoration graph at working precision.
pub type Decoration = graphs::Decoration<Real>;

/// Compact metric graph at working precision.
pub type CompactMetricGraph = graphs::CompactMetricGraph<Real>;

/// Truncated spectrum at working precision.
pub type Spectrum = metric_solver::Spectrum<Real>;

/// Metric solver options at working precision.
pub type SolveOptions = metric_solver::SolveOptions<Real>;

/// Discrete normalized-Laplacian spectrum at working precision.
pub type DiscreteSpectrum = discrete_solver::DiscreteSpectrum<Real>;

/// Integrated-density-of-states staircase at working precision.
pub type IDSCurve = labels::IDSCurve<Real>;

/// Detected spectral gap at working precision.
pub type Gap = labels::Gap<Real>;

/// Free/Dirichlet spectrum pair for one truncation size, at working
/// precision.
pub type BoundaryPair = labels::BoundaryPair<Real>;

/// Predicted IDS jump at working precision.
pub type JumpPrediction = labels::JumpPrediction<Real>;

/// Nodal data of a single decoration at working precision.
pub type NodalData = nodal::NodalData<Real>;

/// Prüfer-angle winding trace at working precision.
pub type PruferTrace = nodal::PruferTrace<Real>;
