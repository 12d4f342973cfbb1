//! Time-dependent coupling schedules and photon wavepacket profiles.

use crate::error::ModelError;

/// Eq. (5) emission pulse. `kt` is the photon bandwidth (kappa tilde), `kappa`
/// the resonator decay. Piecewise asymptotic branches keep the expression
/// stable out to |kt*t| ~ 700 where the naive form overflows.
pub fn sech_pulse(t: f64, kt: f64, kappa: f64) -> Result<f64, ModelError> {
    if !(kt > 0.0) || kt > kappa * (1.0 + 1e-12) {
        return Err(ModelError::Domain(format!(
            "sech pulse requires 0 < kappa_tilde <= kappa (kt = {kt:.3e}, kappa = {kappa:.3e})"
        )));
    }
    let x = kt * t;
    if x < -30.0 {
        // g ~ ((kappa+kt)/2) sqrt(kt/kappa) e^{x/2}
        return Ok(0.5 * (kappa + kt) * (kt / kappa).sqrt() * (0.5 * x).exp());
    }
    if x > 30.0 {
        let r = kappa / kt - 1.0;
        if r < 1e-9 {
            // kt = kappa: g ~ kappa e^{-x/2}
            return Ok(kappa * (-0.5 * x).exp());
        }
        return Ok((kappa - kt) / (2.0 * (r + (kappa / kt) * (-x).exp()).sqrt()));
    }
    // grouped so the kappa = kt case does not cancel at large x
    let emx = (-x).exp();
    let num = (kappa - kt) + 2.0 * kt * emx / (1.0 + emx);
    let den = 2.0 * ((kappa / kt - 1.0) + (kappa / kt) * emx).sqrt();
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleShape {
    /// emission at node 1 (pulse centered -t_d/2), time-reversed absorption at
    /// node 2 (centered +t_d/2)
    SechTransfer { kappa_1: f64, kappa_2: f64 },
    /// counter-intuitive adiabatic ramps
    Stirap { g_0: f64 },
    /// node 1 emits and later reabsorbs its own photon; node 2 passive
    Reabsorption { kappa_1: f64 },
    /// node 1 emits only; nothing listens (pulse-shape verification)
    Emission { kappa_1: f64 },
    /// no drive at all (probe / scattering runs)
    Idle,
    /// constant couplings (Rabi checks, synthetic configurations)
    Flat { g_1: f64, g_2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSchedule {
    pub shape: ScheduleShape,
    /// half protocol window; runs integrate over [-T, T]
    pub half_window: f64,
    pub delay: f64,
    /// photon bandwidth kappa tilde (0 for stirap/idle)
    pub bandwidth: f64,
    pub eta: f64,
    /// set when the single-node reabsorption overlaps itself (sigma_t > t_p)
    pub overlap_warning: bool,
}

impl ControlSchedule {
    pub fn g1(&self, t: f64) -> f64 {
        match self.shape {
            ScheduleShape::SechTransfer { kappa_1, .. } => {
                sech_pulse(t + 0.5 * self.delay, self.bandwidth, kappa_1).unwrap_or(0.0)
            }
            ScheduleShape::Stirap { g_0 } => {
                let t_cl = t.clamp(-self.half_window, self.half_window);
                g_0 * (std::f64::consts::PI * (t_cl + self.half_window) / (4.0 * self.half_window)).sin()
            }
            ScheduleShape::Reabsorption { kappa_1 } => {
                let ts = if t <= 0.0 { t } else { -t };
                sech_pulse(ts + 0.5 * self.delay, self.bandwidth, kappa_1).unwrap_or(0.0)
            }
            ScheduleShape::Emission { kappa_1 } => {
                sech_pulse(t, self.bandwidth, kappa_1).unwrap_or(0.0)
            }
            ScheduleShape::Idle => 0.0,
            ScheduleShape::Flat { g_1, .. } => g_1,
        }
    }

    pub fn g2(&self, t: f64) -> f64 {
        match self.shape {
            ScheduleShape::SechTransfer { kappa_2, .. } => {
                sech_pulse(-t + 0.5 * self.delay, self.bandwidth, kappa_2).unwrap_or(0.0)
            }
            ScheduleShape::Stirap { g_0 } => {
                let t_cl = t.clamp(-self.half_window, self.half_window);
                g_0 * (std::f64::consts::PI * (t_cl + self.half_window) / (4.0 * self.half_window)).cos()
            }
            ScheduleShape::Reabsorption { .. }
            | ScheduleShape::Emission { .. }
            | ScheduleShape::Idle => 0.0,
            ScheduleShape::Flat { g_2, .. } => g_2,
        }
    }
}

/// Margin appended to the propagation time so both sech tails are truncated
/// below 2pi x 1e-5 MHz: 2T = t_p + 10/(kt/2pi). The paper states the rule in
/// ordinary-frequency units; the angular reading would leave tails of order
/// 0.1 kappa and violate its own truncation bound.
pub const SECH_MARGIN: f64 = 20.0 * std::f64::consts::PI;

pub fn transfer_schedule(
    kappa_1: f64,
    kappa_2: f64,
    kt: f64,
    t_p: f64,
) -> Result<ControlSchedule, ModelError> {
    if kt > kappa_1.min(kappa_2) * (1.0 + 1e-12) {
        return Err(ModelError::Domain(
            "photon bandwidth must not exceed min(kappa_1, kappa_2)".into(),
        ));
    }
    Ok(ControlSchedule {
        shape: ScheduleShape::SechTransfer { kappa_1, kappa_2 },
        half_window: 0.5 * (t_p + SECH_MARGIN / kt),
        delay: t_p,
        bandwidth: kt,
        eta: kappa_1 / kt,
        overlap_warning: false,
    })
}

pub fn stirap_schedule(g_0: f64, half_window: f64) -> Result<ControlSchedule, ModelError> {
    if !(g_0 > 0.0) || !(half_window > 0.0) {
        return Err(ModelError::Domain("stirap requires g_0 > 0 and T > 0".into()));
    }
    Ok(ControlSchedule {
        shape: ScheduleShape::Stirap { g_0 },
        half_window,
        delay: 0.0,
        bandwidth: 0.0,
        eta: 1.0,
        overlap_warning: false,
    })
}

/// Eq. (15): node 1 plays the emission pulse, then its mirror image, with the
/// delay covering the round trip plus the scattering delay at node 2,
/// t_d = 2 t_p + 2/kappa_2.
pub fn reabsorption_schedule(
    kt: f64,
    kappa_1: f64,
    kappa_2: f64,
    t_p: f64,
) -> Result<ControlSchedule, ModelError> {
    if kt > kappa_1 * (1.0 + 1e-12) {
        return Err(ModelError::Domain("photon bandwidth must not exceed kappa_1".into()));
    }
    let t_d = 2.0 * t_p + 2.0 / kappa_2;
    let sigma_t = std::f64::consts::PI / (3.0f64.sqrt() * kt);
    Ok(ControlSchedule {
        shape: ScheduleShape::Reabsorption { kappa_1 },
        half_window: 0.5 * (t_d + SECH_MARGIN / kt),
        delay: t_d,
        bandwidth: kt,
        eta: kappa_1 / kt,
        overlap_warning: sigma_t > t_p,
    })
}

pub fn emission_schedule(kt: f64, kappa_1: f64, half_window: f64) -> Result<ControlSchedule, ModelError> {
    if kt > kappa_1 * (1.0 + 1e-12) {
        return Err(ModelError::Domain("photon bandwidth must not exceed kappa_1".into()));
    }
    Ok(ControlSchedule {
        shape: ScheduleShape::Emission { kappa_1 },
        half_window,
        delay: 0.0,
        bandwidth: kt,
        eta: kappa_1 / kt,
        overlap_warning: false,
    })
}

pub fn idle_schedule() -> ControlSchedule {
    ControlSchedule {
        shape: ScheduleShape::Idle,
        half_window: f64::MAX,
        delay: 0.0,
        bandwidth: 0.0,
        eta: 1.0,
        overlap_warning: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechWavepacket {
    pub center: f64,
    pub bandwidth: f64,
}

impl SechWavepacket {
    /// continuum amplitude f(omega) = sqrt(pi/(2 kt)) sech(pi (omega - omega_c)/kt)
    pub fn amplitude(&self, omega: f64) -> f64 {
        let kt = self.bandwidth;
        (std::f64::consts::PI / (2.0 * kt)).sqrt()
            / (std::f64::consts::PI * (omega - self.center) / kt).cosh()
    }

    pub fn sigma_t(&self) -> f64 {
        std::f64::consts::PI / (3.0f64.sqrt() * self.bandwidth)
    }
}

/// Discretized spectrum on a mode grid: f_m = f(omega_m) sqrt(fsr_m), exactly
/// renormalized. Requires the grid to cover all but 1e-8 of the weight.
pub fn sech_spectrum(wp: &SechWavepacket, grid: &[f64]) -> Result<Vec<f64>, ModelError> {
    if grid.len() < 2 {
        return Err(ModelError::Config("spectral grid needs at least 2 points".into()));
    }
    let mut f: Vec<f64> = Vec::with_capacity(grid.len());
    for (i, &w) in grid.iter().enumerate() {
        let dw = if i == 0 {
            grid[1] - grid[0]
        } else if i == grid.len() - 1 {
            grid[i] - grid[i - 1]
        } else {
            0.5 * (grid[i + 1] - grid[i - 1])
        };
        f.push(wp.amplitude(w) * dw.sqrt());
    }
    let raw: f64 = f.iter().map(|a| a * a).sum();
    // raw sum approximates the unit continuum integral; a deficit means the
    // window is clipping spectral weight
    if (1.0 - raw).abs() > 1e-4 {
        return Err(ModelError::Config(format!(
            "spectral window covers only {raw:.8} of the wavepacket"
        )));
    }
    let tail_lo = 0.5 * (1.0 - (std::f64::consts::PI * (grid[0] - wp.center).abs() / wp.bandwidth).tanh());
    let tail_hi = 0.5 * (1.0 - (std::f64::consts::PI * (grid[grid.len() - 1] - wp.center).abs() / wp.bandwidth).tanh());
    if tail_lo + tail_hi > 1e-8 {
        return Err(ModelError::Config(format!(
            "out-of-window sech weight {:.3e} above 1e-8",
            tail_lo + tail_hi
        )));
    }
    let norm = raw.sqrt();
    for a in &mut f {
        *a /= norm;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn pulse_peak_is_half_kappa() {
        let k = TWO_PI * 1e6;
        let g = sech_pulse(0.0, k, k).unwrap();
        assert_relative_eq!(g, 0.5 * k, max_relative = 1e-12);
    }

    #[test]
    fn pulse_tails_vanish() {
        let k = TWO_PI * 1e6;
        for eta in [1.0, 2.0, 8.0] {
            let kt = k / eta;
            let far = 600.0 / kt;
            assert!(sech_pulse(-far, kt, k).unwrap() < 1e-100 * k);
            if eta == 1.0 {
                assert!(sech_pulse(far, kt, k).unwrap() < 1e-100 * k);
            } else {
                // eta > 1 leaves the finite plateau (kt/2) sqrt(kappa/kt - 1)
                let plateau = 0.5 * kt * (k / kt - 1.0).sqrt();
                assert_relative_eq!(sech_pulse(far, kt, k).unwrap(), plateau, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn pulse_branch_continuity() {
        let k = TWO_PI * 1e6;
        for eta in [1.0, 1.5, 4.0] {
            let kt = k / eta;
            for x in [-30.0, 30.0] {
                let a = sech_pulse((x - 1e-9) / kt, kt, k).unwrap();
                let b = sech_pulse((x + 1e-9) / kt, kt, k).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn pulse_left_asymptote() {
        let k = TWO_PI * 1e6;
        let kt = k / 2.0;
        let t = -40.0 / kt;
        let expect = 0.5 * (k + kt) * (kt / k).sqrt() * (0.5 * kt * t).exp();
        assert_relative_eq!(sech_pulse(t, kt, k).unwrap(), expect, max_relative = 1e-6);
    }

    #[test]
    fn pulse_bounded_by_half_kappa() {
        let k = TWO_PI * 3e6;
        for eta in [1.0, 1.2, 3.0, 10.0] {
            let kt = k / eta;
            for i in -2000..=2000 {
                let t = i as f64 * 0.05 / kt;
                let g = sech_pulse(t, kt, k).unwrap();
                assert!(g >= 0.0 && g <= 0.5 * k + 1e-12);
            }
        }
    }

    #[test]
    fn bandwidth_above_kappa_rejected() {
        let k = TWO_PI * 1e6;
        assert!(sech_pulse(0.0, 1.1 * k, k).is_err());
    }

    #[test]
    fn transfer_schedule_mirror_symmetry() {
        let k = TWO_PI * 1e6;
        let tp = 1.6e-7;
        let s = transfer_schedule(k, k, k, tp).unwrap();
        for i in -40..=40 {
            let t = i as f64 * s.half_window / 40.0;
            assert_relative_eq!(s.g1(t), s.g2(-t), max_relative = 1e-12);
        }
        assert_relative_eq!(s.delay, tp, max_relative = 1e-15);
    }

    #[test]
    fn transfer_schedule_truncation_bound() {
        // g1(-T), g2(T) below 2pi x 1e-5 MHz for the standard duration rule
        let k = TWO_PI * 1e6;
        let tp = 1.6e-7;
        let s = transfer_schedule(k, k, k, tp).unwrap();
        let bound = TWO_PI * 1e-5 * 1e6;
        assert!(s.g1(-s.half_window) < bound, "g1(-T) = {:.3e}", s.g1(-s.half_window));
        assert!(s.g2(s.half_window) < bound);
        // duration rule: 2T = t_p + 10/(kt/2pi)
        assert_relative_eq!(2.0 * s.half_window, tp + 10.0 / (k / TWO_PI), max_relative = 1e-12);
    }

    #[test]
    fn stirap_endpoints_and_norm() {
        let g0 = TWO_PI * 0.5e6;
        let t_half = 1e-6;
        let s = stirap_schedule(g0, t_half).unwrap();
        assert_relative_eq!(s.g1(-t_half), 0.0, epsilon = 1e-9 * g0);
        assert_relative_eq!(s.g2(-t_half), g0, max_relative = 1e-12);
        assert_relative_eq!(s.g1(t_half), g0, max_relative = 1e-9);
        assert_relative_eq!(s.g2(t_half), 0.0, epsilon = 1e-9 * g0);
        assert_relative_eq!(s.g1(0.0), g0 / 2.0f64.sqrt(), max_relative = 1e-12);
        for i in -10..=10 {
            let t = i as f64 * t_half / 10.0;
            assert_relative_eq!(s.g1(t).powi(2) + s.g2(t).powi(2), g0 * g0, max_relative = 1e-12);
        }
    }

    #[test]
    fn reabsorption_symmetry_and_delay() {
        let k = TWO_PI * 100e6;
        let tp = 5.0 / 1.874e8;
        let s = reabsorption_schedule(k / 4.0, k, k, tp).unwrap();
        assert_relative_eq!(s.delay, 2.0 * tp + 2.0 / k, max_relative = 1e-12);
        for i in 0..=20 {
            let t = i as f64 * s.half_window / 20.0;
            assert_relative_eq!(s.g1(t), s.g1(-t), max_relative = 1e-12);
        }
        assert_eq!(s.g2(0.3 * s.half_window), 0.0);
        assert!(!s.overlap_warning);
        // long-photon regime flags, does not error
        let slow = reabsorption_schedule(TWO_PI * 1e4, k, k, tp).unwrap();
        assert!(slow.overlap_warning);
    }

    #[test]
    fn sech_moments() {
        let kt = TWO_PI * 10e6;
        let wc = TWO_PI * 8.4e9;
        let wp = SechWavepacket { center: wc, bandwidth: kt };
        let n = 40001;
        let half = 12.0 * kt;
        let grid: Vec<f64> = (0..n).map(|i| wc - half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
        let f = sech_spectrum(&wp, &grid).unwrap();
        let m2: f64 = grid.iter().zip(&f).map(|(&w, &a)| a * a * (w - wc).powi(2)).sum();
        let m4: f64 = grid.iter().zip(&f).map(|(&w, &a)| a * a * (w - wc).powi(4)).sum();
        assert_relative_eq!(m2, kt * kt / 12.0, max_relative = 1e-3);
        assert_relative_eq!(m4, 7.0 * kt.powi(4) / 240.0, max_relative = 1e-3);
        assert_relative_eq!(wp.sigma_t() * kt, std::f64::consts::PI / 3.0f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn sech_spectrum_symmetric_on_symmetric_grid() {
        let kt = TWO_PI * 5e6;
        let wc = TWO_PI * 8.4e9;
        let wp = SechWavepacket { center: wc, bandwidth: kt };
        let n = 201;
        let half = 10.0 * kt;
        let grid: Vec<f64> = (0..n).map(|i| wc - half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
        let f = sech_spectrum(&wp, &grid).unwrap();
        for i in 0..n / 2 {
            assert_relative_eq!(f[i], f[n - 1 - i], max_relative = 1e-9);
        }
        let norm: f64 = f.iter().map(|a| a * a).sum();
        assert_relative_eq!(norm, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn sech_spectrum_rejects_narrow_window() {
        let kt = TWO_PI * 5e6;
        let wc = TWO_PI * 8.4e9;
        let wp = SechWavepacket { center: wc, bandwidth: kt };
        let n = 51;
        let half = 1.0 * kt;
        let grid: Vec<f64> = (0..n).map(|i| wc - half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
        assert!(sech_spectrum(&wp, &grid).is_err());
    }
}
