//! Periodic W*-dynamical systems on matrix algebras.
//!
//! A system is a unital *-algebra `M ⊂ M_d` with a circle action `α_z = Ad U_z`,
//! `U_z = diag(z^{w₁}, …, z^{w_d})`. The crate computes the spectral subspaces `M_n`, the
//! standard form of `M` for a faithful invariant state with its modular data, the Hardy
//! space `H₊` and analytic part `M₊`, and sampled reflexive closures `algLat(A)`.
//!
//! ```
//! use wflow::flow::WStarSystem;
//! use wflow::numsub::Tolerances;
//! use wflow::reflexivity::{theorem5_verify, Sampling, Verdict};
//!
//! let sys = WStarSystem::full(vec![0, 1, 2], &Tolerances::default()).unwrap();
//! let run = theorem5_verify(&sys, None, &Sampling::default()).unwrap();
//! assert_eq!(run.report.input_dim, 6);
//! assert_eq!(run.report.verdict, Verdict::Reflexive);
//! ```

pub mod algebra;
pub mod cli;
pub mod error;
pub mod flow;
pub mod gns;
pub mod hardy;
pub mod numsub;
pub mod reflexivity;
pub mod report;
