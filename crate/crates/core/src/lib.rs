//! D-optimal designs for polynomial regression on compact semi-algebraic
//! sets, together with their dual certificates.
//!
//! The design space is discretized into a finite [`CandidateSet`]; the
//! solver maximizes `log det M_d(w)` over probability weights on it, and the
//! certificate module turns any design into a feasible point of the dual
//! problem built from the Christoffel-Darboux polynomial
//! `p(x) = v_d(x)ᵀ M_d(w)⁻¹ v_d(x)`. A design is optimal exactly when
//! `p <= n_d` on the design space, with equality on its support.
//!
//! ```
//! use dopt_core::{grid_candidates, solve, build_certificate, SemiAlgebraicSet, SolverConfig};
//!
//! let interval = SemiAlgebraicSet::from_box(vec![(-1.0, 1.0)]).unwrap();
//! let cands = grid_candidates(&interval, 21).unwrap();
//! let result = solve(&cands, 2, &SolverConfig::default()).unwrap();
//! let cert = build_certificate(&result, 2).unwrap();
//! assert!(result.converged);
//! assert!(cert.gap <= 3.0 * 1e-6);
//! ```

pub mod basis;
pub mod certificate;
pub mod cli;
pub mod design;
pub mod error;
pub mod geometry;
pub mod semialg;
pub mod solver;
pub mod spd;

pub use basis::{enumerate_basis, MultiIndex, MultiIndexBasis, OuterIndexMap};
pub use certificate::{
    adjoint_expand, adjoint_identity_check, build_certificate, certify_design, contact_points,
    validate_dual_feasibility, CDCoefficients, DualCertificate, DualViolation, SupportAtom,
};
pub use design::{
    assemble_information, cd_eval, cd_profile, information_matrix, moment_matrix, moment_vector,
    CDPolynomial, DesignMeasure, MomentVector,
};
pub use error::{Error, Result};
pub use geometry::{extract_ellipsoid, levelset_membership, Ellipsoid, LevelSetReport};
pub use semialg::{
    explicit_candidates, grid_candidates, CandidateSet, CandidateSource, SemiAlgebraicSet,
    SparsePolynomial,
};
pub use solver::{
    fw_step, init_uniform, mult_step, prune, solve, Algorithm, SolveResult, SolverConfig,
};
pub use spd::{factorize, SpdFactor, SymMatrix};
