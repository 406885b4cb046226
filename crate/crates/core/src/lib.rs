//! Passivity analysis and simulation of nonlinear networks of single-input,
//! single-output agents coupled through edge controllers over a digraph.
//!
//! The pieces, bottom up:
//!
//! - [`graph`]: digraphs, incidence matrices `E = B_o + B_i`, the three
//!   Laplacians, balancedness and globally reachable nodes.
//! - [`spectral`]: the spectrum and kernels of `sym(L_o)`, which decide whether
//!   the directed feedback path `y ↦ −B_o Eᵀ y` is passive.
//! - [`systems`]: agent and controller models with storage functions.
//! - [`network`]: the closed loop for undirected, directed and decomposed coupling.
//! - [`simulate`]: fixed-step RK4 trajectories and convergence detection.
//! - [`analysis`]: disagreement projections, index estimates and dissipation audits.
//! - [`suite`]: seeded random digraphs and the randomized spectral suites.
//!
//! ```
//! use netpassivity::graph::{build_incidence, case_study_graph, is_balanced};
//! use netpassivity::spectral::analyze_sym_lo;
//!
//! let g = case_study_graph();
//! let inc = build_incidence(&g);
//! assert!(is_balanced(&inc));
//! let s = analyze_sym_lo(&inc).unwrap();
//! assert!(s.feedback_passive && s.kernels_equal);
//! ```

pub mod analysis;
pub mod graph;
pub mod network;
pub mod simulate;
pub mod spectral;
pub mod suite;
pub mod systems;

pub use graph::{Digraph, Edge, GraphError, IncidenceSet};
pub use network::{CouplingMode, NetworkSystem, Signals};
pub use simulate::{simulate, SimConfig, Trajectory};
pub use systems::{AgentModel, ControllerModel, Storage};
