//! Windowed-coefficient series: tables, sign maps, ratio lemmas, ODE identities,
//! exponential lower bounds and the 3D → 1D reduction.

pub mod certificates;
pub mod coeffs;
pub mod envelopes;
pub mod jfun;
pub mod odes;
pub mod ratios;
pub mod reduction;
pub mod signs;

pub use certificates::{beta_empirical, lower_bound_certificates, BetaReport, CertificateSet};
pub use coeffs::{CoeffTables, Family};
pub use envelopes::{envelope_suite, EnvelopeSuite};
pub use jfun::{eval_j, eval_tilde_j, Bounded, JIndex, JMethod, TildeJReport};
pub use odes::{ode_identity_checks, OdeReport};
pub use ratios::{lemma_ratio_suite, BoundReport, SuiteConfig, Verdict};
pub use reduction::{reduction_check, ReductionReport};
pub use signs::{sign_map, ProductKind, SignMap};
