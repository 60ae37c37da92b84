//! Certified bounds: special functions with error bounds, quadrature, the
//! classical band integral, the crossover-improvement certificate, and the
//! numerical oracles for the supporting inequalities.

pub mod bhh;
pub mod certificate;
pub mod density;
pub mod oracles;
pub mod quadrature;
pub mod special;

pub use bhh::{bhh_bound, BhhValue};
pub use certificate::{
    cert_constants, eta_lower_bound, eta_lower_bound_on_grid, eta_lower_bound_with, eta_quadrature,
    CertConstants, CertParams, Certificate, BASE_BOUND, TARGET_BOUND,
};
pub use density::{density_normalization, improvement_density};
pub use oracles::verify_lemma_oracles;
pub use special::{erf, erf_eval, f_of, h_of, Bounded};
