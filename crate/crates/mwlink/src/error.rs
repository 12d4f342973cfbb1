use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("frequency {omega:.4e} rad/s below waveguide cutoff {cutoff:.4e} rad/s (evanescent)")]
    BelowCutoff { omega: f64, cutoff: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("integrator step size underflow at t = {t:.6e} s")]
    StepUnderflow { t: f64 },
    #[error("ambiguous dressed-state identification: leading resonator weights differ by {0:.3e}")]
    DegenerateWeights(f64),
    #[error("{0}")]
    Domain(String),
}
