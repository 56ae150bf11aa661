//! Genuine multipartite entanglement of four-qubit cluster diagonal states.
//!
//! The library builds the four-qubit linear-cluster stabilizer basis,
//! reduces a cluster-diagonal state to its eight block parameters, decides
//! biseparability through the six reduced necessary-and-sufficient
//! inequalities, classifies genuinely entangled states into the seven-region
//! taxonomy, and evaluates the genuine relative entropy of entanglement in
//! closed form together with the explicit closest biseparable state. An
//! independent convex solver ([`oracle`]) re-minimizes the divergence over
//! the biseparable polytope and is used to cross-validate every analytic
//! value.
//!
//! Batch operations (grids, corpora, verification sweeps) run data-parallel
//! under the default `parallel` feature and fall back to sequential
//! iteration without it.

pub mod criteria;
pub mod error;
pub mod exec;
pub mod graph;
pub mod oracle;
pub mod ree;
pub mod region;
pub mod state;

pub use criteria::{biseparable_verdict, raw_criteria, reduced_criteria, CriteriaReport};
pub use error::{Error, Result};
pub use graph::{
    basis_state, build_cluster_graph, cluster_basis, stabilizer_generators, twirl_to_fvector,
    Graph, HermitianMatrix, PauliOp, PauliString, StateVector,
};
pub use oracle::{constraint_set, solve_min_relent, verify, verify_batch, SolveReport, VerifyReport};
pub use ree::{
    binary_entropy, closest_state, edge_profile, edge_profile_minimizer, formula_value,
    genuine_ree, relative_entropy, BoundaryClass, ClosestState, ReeFormula, ReeResult,
};
pub use region::{
    bisep_surface, classify, classify_quad, quad_of, region_grid, CellLabel, GridCell, GridView,
    Half, Quad, Region, RegionGrid, RegionLabel, SurfaceLabel, SurfacePoint, Thresholds,
};
pub use state::{
    block_params, dephasing_state, exchange_symmetry, realize_quad, sample_corpus, sample_random,
    validate, BiasTarget, BlockParams, FVector, NoiseSpec,
};
