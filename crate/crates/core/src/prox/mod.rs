//! Left and right Bregman proximal mappings and envelopes.

pub mod objective;
pub mod oracle;

pub use objective::{Chart, ObjectiveFn, Subdifferential};
pub use oracle::{
    left_envelope, left_objective, prox_bounded_estimate, right_direct, right_envelope,
    right_objective, right_translated, tilt_identity_check, tilt_transform_point, LeftProx,
    OracleProx, ProxBoundEstimate, ProxQuery, ProxResult, SearchConfig, SearchDiagnostics, Side,
    Threshold,
};
