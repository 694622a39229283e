//! Bregman proximal mappings, Bregman–Moreau envelopes, relative
//! prox-regularity checks and Bregman proximal alternating minimization.
//!
//! The grid oracles in [`prox`] are the reference implementation every
//! closed form and gradient formula is tested against.

pub mod divergence;
pub mod envelope;
pub mod error;
pub mod figure;
pub mod kernels;
pub mod algorithms;
pub mod analytic;
pub mod numeric;
pub mod poly;
pub mod prox;
pub mod regularity;

pub use algorithms::{
    bpam_palm_u_update, bpam_run, bpg_equivalence_demo, power_toy_1d, sparse_recovery_toy,
    stationarity_residuals, translated_stationarity_check, BpamProblem, BpgEquivalence, GTerm,
    IterRecord, IterateTrace, StopConfig, StopReason, TranslatedStationarity, UUpdate,
    XRegularizer, XTerm,
};
pub use analytic::{
    power_prox, power_prox_threshold, power_prox_vector, power_proxreg_modulus, PowerProxEvaluator,
    PowerProxSpec,
};
pub use divergence::{bregman, bregman_dual_identity_check, quadratic_bounds_estimate};
pub use error::{Error, Result};
pub use kernels::{make_kernel, kernel_roundtrip_check, Kernel, KernelKind, ScalarKernel};
pub use envelope::{
    envelope_complement_convexity_check, grad_check_left, grad_check_right, left_env_grad,
    left_env_grad_composed, right_env_grad, EnvSide, GradCheckRow, GradFormula, RightEnv, RightGrad,
};
pub use figure::{amenable_setup, TangencySetup, TangencyScan};
pub use poly::poly_real_roots;
pub use prox::{
    left_envelope, right_envelope, LeftProx, ObjectiveFn, OracleProx, ProxQuery, ProxResult,
    SearchConfig, Side, Subdifferential,
};
pub use regularity::{
    certify_prox_regularity, certify_prox_subgradient, lsmad_check, single_valuedness_scan,
    subgradient_prox_characterization_check, RegularityCertificate, SmoothFn,
};
