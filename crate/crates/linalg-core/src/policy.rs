use std::sync::OnceLock;

/// Tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalPolicy {
    pub hermitian_tol: f64,
    pub unitary_tol: f64,
    pub norm_tol: f64,
    pub trace_tol: f64,
    pub positivity_tol: f64,
    /// Largest matrix dimension any builder may produce.
    pub max_dim: usize,
}

impl NumericalPolicy {
    pub const DEFAULT: NumericalPolicy = NumericalPolicy {
        hermitian_tol: 1e-9,
        unitary_tol: 1e-9,
        norm_tol: 1e-9,
        trace_tol: 1e-8,
        positivity_tol: 1e-8,
        max_dim: 1 << 13,
    };
}

impl Default for NumericalPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static POLICY: OnceLock<NumericalPolicy> = OnceLock::new();

/// The process-wide policy. Falls back to [`NumericalPolicy::DEFAULT`].
pub fn policy() -> &'static NumericalPolicy {
    POLICY.get_or_init(NumericalPolicy::default)
}

/// Install a policy once, before first use. Returns false if one was already set.
pub fn set_policy(p: NumericalPolicy) -> bool {
    POLICY.set(p).is_ok()
}
