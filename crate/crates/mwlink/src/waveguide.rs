//! TE_10m mode structure, dispersion and node couplings of a WR90 waveguide link.
//!
//! All frequencies are angular (rad/s). The dispersion relation of the TE_10m
//! family is `omega_m = c * sqrt((pi/l1)^2 + (m*pi/L)^2)`, so the guide acts as
//! a discrete comb of modes above the cutoff `c*pi/l1`.

use crate::error::ModelError;
use crate::node::NodeSpec;

pub const SPEED_OF_LIGHT: f64 = 2.998e8;
pub const WR90_BROAD_WALL: f64 = 0.02286;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideSpec {
    /// link length L in meters
    pub length: f64,
    /// broad wall dimension l1 in meters (WR90 default 22.86 mm)
    pub broad_wall: f64,
    pub speed_of_light: f64,
    /// carrier / rotating-frame frequency, rad/s
    pub center_frequency: f64,
    /// contiguous mode index window [lo, hi], inclusive
    pub mode_window: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub omega: f64,
    pub k: f64,
    pub v_g: f64,
    /// quadratic dispersion coefficient D = (c^2/omega)(1 - (v_g/c)^2), m^2/s
    pub d: f64,
}

/// Per-mode coupling amplitudes G_{m,j} for the two nodes, including the
/// position sign (-1)^{m(j-1)} of the node at x = L.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    pub modes: Vec<usize>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
}

impl WaveguideSpec {
    /// Standard link: WR90 guide, carrier 2π × 8.4 GHz, full physical band.
    pub fn standard(length: f64) -> Self {
        let mut spec = WaveguideSpec {
            length,
            broad_wall: WR90_BROAD_WALL,
            speed_of_light: SPEED_OF_LIGHT,
            center_frequency: 2.0 * std::f64::consts::PI * 8.4e9,
            mode_window: (1, 1),
        };
        spec.mode_window = spec.full_band();
        spec
    }

    pub fn cutoff(&self) -> f64 {
        self.speed_of_light * std::f64::consts::PI / self.broad_wall
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.length > 0.0) || !(self.broad_wall > 0.0) {
            return Err(ModelError::Config("waveguide dimensions must be positive".into()));
        }
        if self.center_frequency <= self.cutoff() {
            return Err(ModelError::BelowCutoff { omega: self.center_frequency, cutoff: self.cutoff() });
        }
        if self.mode_window.0 < 1 || self.mode_window.1 < self.mode_window.0 {
            return Err(ModelError::Config("empty mode window".into()));
        }
        Ok(())
    }

    /// Index of the mode closest to the carrier; ties resolved to smaller m.
    pub fn central_mode_index(&self) -> usize {
        let k = ((self.center_frequency / self.speed_of_light).powi(2)
            - (std::f64::consts::PI / self.broad_wall).powi(2))
            .sqrt();
        let m_est = k * self.length / std::f64::consts::PI;
        let lo = (m_est.floor().max(1.0)) as usize;
        let cands = [lo, lo + 1];
        let mut best = lo;
        let mut best_d = f64::INFINITY;
        for &m in &cands {
            let d = (mode_frequency(self, m) - self.center_frequency).abs();
            if d < best_d - 1e-9 * self.center_frequency.max(1.0) * f64::EPSILON {
                best_d = d;
                best = m;
            }
        }
        best
    }

    /// The whole propagating band reflected around the carrier index:
    /// [1, 2 m_c - 1]. Used by the transfer protocols, where spectral
    /// truncation error decays only algebraically with window size.
    pub fn full_band(&self) -> (usize, usize) {
        let mc = self.central_mode_index();
        (1, 2 * mc - 1)
    }

    pub fn window_modes(&self) -> impl Iterator<Item = usize> {
        self.mode_window.0..=self.mode_window.1
    }

    pub fn window_len(&self) -> usize {
        self.mode_window.1 - self.mode_window.0 + 1
    }
}

pub fn mode_frequency(spec: &WaveguideSpec, m: usize) -> f64 {
    let kc = std::f64::consts::PI / spec.broad_wall;
    let km = m as f64 * std::f64::consts::PI / spec.length;
    spec.speed_of_light * (kc * kc + km * km).sqrt()
}

pub fn dispersion_at(spec: &WaveguideSpec, omega: f64) -> Result<DispersionPoint, ModelError> {
    let cutoff = spec.cutoff();
    if omega <= cutoff {
        return Err(ModelError::BelowCutoff { omega, cutoff });
    }
    let c = spec.speed_of_light;
    let k = ((omega / c).powi(2) - (std::f64::consts::PI / spec.broad_wall).powi(2)).sqrt();
    let v_g = c * c * k / omega;
    let d = (c * c / omega) * (1.0 - (v_g / c).powi(2));
    Ok(DispersionPoint { omega, k, v_g, d })
}

/// FSR near omega: exact difference omega_{m+1} - omega_m for m closest to omega.
pub fn free_spectral_range(spec: &WaveguideSpec, omega: f64) -> Result<f64, ModelError> {
    let dp = dispersion_at(spec, omega)?;
    let m = ((dp.k * spec.length / std::f64::consts::PI).round() as usize).max(1);
    Ok(mode_frequency(spec, m + 1) - mode_frequency(spec, m))
}

/// G_{m,j} = (-1)^{m(j-1)} sqrt(kappa_j v_g omega_m / (2 Omega_Rj L)), with the
/// group velocity evaluated once at the carrier. (Evaluating v_g per mode skews
/// the coupling profile across the band and spoils the Lamb-shift cancellation.)
pub fn coupling_table(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
) -> Result<CouplingTable, ModelError> {
    spec.validate()?;
    for n in nodes {
        if !(n.kappa > 0.0) {
            return Err(ModelError::Config("node decay rate kappa must be positive".into()));
        }
        if n.resonator_frequency <= spec.cutoff() {
            return Err(ModelError::BelowCutoff { omega: n.resonator_frequency, cutoff: spec.cutoff() });
        }
    }
    // rates are defined at the carrier mode, not the nominal carrier; the
    // ~2e-4 difference in v_g is visible at the long-photon plateau
    let v_g = dispersion_at(spec, mode_frequency(spec, spec.central_mode_index()))?.v_g;
    let mut modes = Vec::with_capacity(spec.window_len());
    let mut g1 = Vec::with_capacity(spec.window_len());
    let mut g2 = Vec::with_capacity(spec.window_len());
    for m in spec.window_modes() {
        let wm = mode_frequency(spec, m);
        let a1 = (nodes[0].kappa * v_g * wm / (2.0 * nodes[0].resonator_frequency * spec.length)).sqrt();
        let a2 = (nodes[1].kappa * v_g * wm / (2.0 * nodes[1].resonator_frequency * spec.length)).sqrt();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        modes.push(m);
        g1.push(a1);
        g2.push(sign * a2);
    }
    Ok(CouplingTable { modes, g1, g2 })
}

/// Smallest symmetric window around the central mode whose out-of-window sech
/// spectral weight is below `tolerance`; at least 3 modes. The sech^2 tail
/// integral has the closed form `1 - tanh(pi*delta/kappa_t) <= 2 e^{-2 pi
/// delta / kappa_t}`.
pub fn select_mode_window(
    spec: &WaveguideSpec,
    photon_bandwidth: f64,
    tolerance: f64,
) -> Result<(usize, usize), ModelError> {
    if !(photon_bandwidth > 0.0) || !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(ModelError::Config("need photon_bandwidth > 0 and tolerance in (0,1)".into()));
    }
    let mc = spec.central_mode_index();
    let fsr = free_spectral_range(spec, spec.center_frequency)?;
    // tail weight 2 exp(-2 pi delta / kt) <= tol  =>  delta >= kt ln(2/tol) / (2 pi);
    // half-width floor of 4.5 kt keeps the resonator's Lorentzian wings covered
    // even when the tolerance alone would permit a narrower span
    let delta = (photon_bandwidth * (2.0 / tolerance).ln() / (2.0 * std::f64::consts::PI))
        .max(4.5 * photon_bandwidth);
    let half = ((delta / fsr).ceil() as usize).max(1);
    if half >= mc {
        return Err(ModelError::Config(format!(
            "requested window (half-width {half} modes) extends below cutoff; central index {mc}"
        )));
    }
    Ok((mc - half, mc + half))
}

/// Symmetric window of given angular half-width, clamped to the physical
/// band. Used where the caller wants a fixed span (probe and scattering
/// setups) rather than a spectral-tail criterion.
pub fn symmetric_window(spec: &WaveguideSpec, half_width: f64) -> Result<(usize, usize), ModelError> {
    if !(half_width > 0.0) {
        return Err(ModelError::Config("need half_width > 0".into()));
    }
    let mc = spec.central_mode_index();
    let fsr = free_spectral_range(spec, spec.center_frequency)?;
    let half = ((half_width / fsr).ceil() as usize).clamp(1, mc - 1);
    Ok((mc - half, mc + half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mode_frequencies_monotone_and_above_cutoff() {
        let spec = WaveguideSpec::standard(30.0);
        let cutoff = spec.cutoff();
        assert_relative_eq!(cutoff / (2.0 * std::f64::consts::PI), 6.557e9, max_relative = 1e-3);
        let mut prev = 0.0;
        for m in 1..200 {
            let w = mode_frequency(&spec, m);
            assert!(w > prev);
            assert!(w >= cutoff);
            prev = w;
        }
    }

    #[test]
    fn asymptotic_slope() {
        let spec = WaveguideSpec::standard(30.0);
        let m = 4_000_000;
        let slope = mode_frequency(&spec, m) / m as f64;
        assert_relative_eq!(slope, spec.speed_of_light * std::f64::consts::PI / spec.length, max_relative = 1e-5);
    }

    #[test]
    fn central_mode_index_l30() {
        let spec = WaveguideSpec::standard(30.0);
        let mc = spec.central_mode_index();
        assert!((1048..=1054).contains(&mc), "mc = {mc}");
        // closest wins
        let w0 = mode_frequency(&spec, mc);
        let wm = mode_frequency(&spec, mc - 1);
        let wp = mode_frequency(&spec, mc + 1);
        let wc = spec.center_frequency;
        assert!((w0 - wc).abs() <= (wm - wc).abs());
        assert!((w0 - wc).abs() <= (wp - wc).abs());
    }

    #[test]
    fn group_velocity_two_thirds_c() {
        let spec = WaveguideSpec::standard(30.0);
        let dp = dispersion_at(&spec, spec.center_frequency).unwrap();
        assert_relative_eq!(dp.v_g / spec.speed_of_light, 0.625, max_relative = 0.01);
        // paper quotes ~2c/3
        assert!((dp.v_g / spec.speed_of_light - 2.0 / 3.0).abs() < 0.05);
        assert_relative_eq!(dp.d, 1.0e6, max_relative = 0.1);
    }

    #[test]
    fn free_space_limit() {
        let spec = WaveguideSpec::standard(30.0);
        let dp = dispersion_at(&spec, 1e16).unwrap();
        assert!(dp.v_g / spec.speed_of_light > 0.999999);
        assert!(dp.d < 1.0);
    }

    #[test]
    fn below_cutoff_rejected() {
        let spec = WaveguideSpec::standard(30.0);
        assert!(dispersion_at(&spec, 0.5 * spec.cutoff()).is_err());
    }

    #[test]
    fn fsr_l30() {
        let spec = WaveguideSpec::standard(30.0);
        let fsr = free_spectral_range(&spec, spec.center_frequency).unwrap();
        assert_relative_eq!(fsr / (2.0 * std::f64::consts::PI), 3.1e6, max_relative = 0.05);
        let dp = dispersion_at(&spec, spec.center_frequency).unwrap();
        assert!((fsr - dp.v_g * std::f64::consts::PI / spec.length).abs() / fsr < 1e-3);
    }

    #[test]
    fn fsr_halves_when_length_doubles() {
        let s1 = WaveguideSpec::standard(15.0);
        let s2 = WaveguideSpec::standard(30.0);
        let f1 = free_spectral_range(&s1, s1.center_frequency).unwrap();
        let f2 = free_spectral_range(&s2, s2.center_frequency).unwrap();
        assert_relative_eq!(f1 / f2, 2.0, max_relative = 1e-2);
    }

    #[test]
    fn dispersion_identities_vs_finite_difference() {
        let spec = WaveguideSpec::standard(30.0);
        // v_g = d omega / d k via central difference over m
        let m = spec.central_mode_index();
        let dm = 1e-3;
        let wf = |mm: f64| {
            let kc = std::f64::consts::PI / spec.broad_wall;
            let km = mm * std::f64::consts::PI / spec.length;
            spec.speed_of_light * (kc * kc + km * km).sqrt()
        };
        let dk = dm * std::f64::consts::PI / spec.length;
        let num_vg = (wf(m as f64 + dm) - wf(m as f64 - dm)) / (2.0 * dk);
        let dp = dispersion_at(&spec, wf(m as f64)).unwrap();
        assert_relative_eq!(num_vg, dp.v_g, max_relative = 1e-6);
        // D = d v_g / d k
        let vg_at = |mm: f64| {
            let w = wf(mm);
            dispersion_at(&spec, w).unwrap().v_g
        };
        let num_d = (vg_at(m as f64 + dm) - vg_at(m as f64 - dm)) / (2.0 * dk);
        assert_relative_eq!(num_d, dp.d, max_relative = 1e-6);
    }

    #[test]
    fn coupling_signs_and_scaling() {
        let spec = WaveguideSpec::standard(30.0);
        let n = NodeSpec::resonant(&spec, 2.0 * std::f64::consts::PI * 10e6);
        let tab = coupling_table(&spec, &[n.clone(), n.clone()]).unwrap();
        for (i, &m) in tab.modes.iter().enumerate() {
            assert!(tab.g1[i] > 0.0);
            let expect_neg = m % 2 == 1;
            assert_eq!(tab.g2[i] < 0.0, expect_neg);
            assert_relative_eq!(tab.g1[i], tab.g2[i].abs(), max_relative = 1e-12);
        }
        // kappa -> 4 kappa doubles the couplings
        let mut n4 = n.clone();
        n4.kappa *= 4.0;
        let tab4 = coupling_table(&spec, &[n4.clone(), n4]).unwrap();
        assert_relative_eq!(tab4.g1[0] / tab.g1[0], 2.0, max_relative = 1e-12);
        // G^2 scales linearly with omega_m
        let i0 = 0;
        let i1 = tab.modes.len() - 1;
        let w0 = mode_frequency(&spec, tab.modes[i0]);
        let w1 = mode_frequency(&spec, tab.modes[i1]);
        assert_relative_eq!(tab.g1[i1].powi(2) / tab.g1[i0].powi(2), w1 / w0, max_relative = 1e-10);
    }

    #[test]
    fn effective_decay_identity() {
        // 2 pi G_c^2 / FSR = kappa at the central mode, within 1%
        let spec = WaveguideSpec::standard(30.0);
        let kappa = 2.0 * std::f64::consts::PI * 10e6;
        let n = NodeSpec::resonant(&spec, kappa);
        let tab = coupling_table(&spec, &[n.clone(), n]).unwrap();
        let mc = spec.central_mode_index();
        let i = tab.modes.iter().position(|&m| m == mc).unwrap();
        let fsr = free_spectral_range(&spec, spec.center_frequency).unwrap();
        let eff = 2.0 * std::f64::consts::PI * tab.g1[i] * tab.g1[i] / fsr;
        assert_relative_eq!(eff, kappa, max_relative = 0.01);
    }

    #[test]
    fn window_selection() {
        let spec = WaveguideSpec::standard(30.0);
        let kt = 2.0 * std::f64::consts::PI * 10e6;
        let (lo, hi) = select_mode_window(&spec, kt, 1e-8).unwrap();
        let mc = spec.central_mode_index();
        assert_eq!(mc - lo, hi - mc);
        let span = mode_frequency(&spec, hi) - mode_frequency(&spec, lo);
        assert!(span >= 9.0 * kt, "span {span:.3e} < 9 kt");
        // floor rule
        let (lo2, hi2) = select_mode_window(&spec, kt, 0.5).unwrap();
        assert!(hi2 - lo2 + 1 >= 3);
    }
}
