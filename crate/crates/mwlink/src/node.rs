//! Qubit-resonator node description.

use crate::error::ModelError;
use crate::waveguide::{mode_frequency, WaveguideSpec};

/// Dispersive qubit-resonator block of the passive node (Eq. 13 parameters)
/// plus the Purcell-filter coupling ratio used by the analytic decay factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveBlock {
    /// dispersive shift chi = g_2^2 / Delta, rad/s
    pub chi: f64,
    /// qubit-resonator detuning Delta, rad/s
    pub delta: f64,
    /// bare qubit-resonator coupling g_2, rad/s
    pub g2: f64,
    /// filter coupling g_p, rad/s
    pub gp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    /// qubit frequency delta_j (Eq. 1), rad/s
    pub qubit_frequency: f64,
    /// bare resonator frequency Omega_Rj, rad/s
    pub resonator_frequency: f64,
    /// resonator decay rate into the link, rad/s
    pub kappa: f64,
    pub dispersive: Option<DispersiveBlock>,
}

impl NodeSpec {
    /// Node with resonator and qubit aligned on the waveguide mode closest to
    /// the carrier. Lamb-shift compensation (when requested by the protocol)
    /// later retunes the bare resonator so the dressed resonance stays here.
    pub fn resonant(spec: &WaveguideSpec, kappa: f64) -> Self {
        let w = mode_frequency(spec, spec.central_mode_index());
        NodeSpec {
            qubit_frequency: w,
            resonator_frequency: w,
            kappa,
            dispersive: None,
        }
    }

    /// Off-resonant placement per Fig. 2(c): halfway between two modes.
    pub fn off_resonant(spec: &WaveguideSpec, kappa: f64) -> Self {
        let mc = spec.central_mode_index();
        let w = 0.5 * (mode_frequency(spec, mc) + mode_frequency(spec, mc + 1));
        NodeSpec {
            qubit_frequency: w,
            resonator_frequency: w,
            kappa,
            dispersive: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.kappa > 0.0) {
            return Err(ModelError::Config("kappa must be positive".into()));
        }
        if let Some(d) = &self.dispersive {
            // dispersive model valid only for Delta >> g_2
            if d.delta < 5.0 * d.g2 {
                return Err(ModelError::Config(format!(
                    "dispersive block outside validity: Delta = {:.3e} < 5 g_2 = {:.3e}",
                    d.delta,
                    5.0 * d.g2
                )));
            }
        }
        Ok(())
    }

    /// Warns (returns false) when the coupling hierarchy kappa << Omega_R is
    /// not satisfied with a factor-100 margin.
    pub fn hierarchy_ok(&self) -> bool {
        self.kappa * 100.0 <= self.resonator_frequency
    }
}
