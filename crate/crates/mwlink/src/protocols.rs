//! Full experiment drivers: state transfer, adiabatic comparison, phase
//! probes, wavepacket scattering, the controlled-phase gate and the composed
//! fidelity budgets.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::controls::{
    emission_schedule, reabsorption_schedule, stirap_schedule, transfer_schedule,
    ControlSchedule, SechWavepacket,
};
use crate::dynamics::{integrate, AmplitudeState, SystemModel};
use crate::error::ModelError;
use crate::node::NodeSpec;
use crate::theory;
use crate::waveguide::{
    dispersion_at, free_spectral_range, mode_frequency, select_mode_window, WaveguideSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ShortPhoton,
    LongPhoton,
}

/// Crossover rule: the photon fits in the guide when its bandwidth exceeds
/// 2 pi v_g / (sqrt(3) L).
pub fn regime(kt: f64, v_g: f64, length: f64) -> Regime {
    if kt >= 2.0 * std::f64::consts::PI * v_g / (3.0f64.sqrt() * length) {
        Regime::ShortPhoton
    } else {
        Regime::LongPhoton
    }
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    /// |q_2(T)|^2
    pub efficiency: f64,
    /// full protocol duration 2T, s
    pub duration: f64,
    pub qubit_residual: f64,
    pub resonator_residual: f64,
    pub field_residual: f64,
    pub regime: Regime,
    pub max_norm_drift: f64,
    pub steps: usize,
    pub rejected: usize,
    pub compensated: bool,
    pub resonant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferOptions {
    /// retune against the mode-comb dressing before the run
    pub compensate_lamb: bool,
    /// resonator placement: on the central mode (true) or mid-gap (false)
    pub resonant: bool,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions {
            compensate_lamb: true,
            resonant: true,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
        }
    }
}

/// Applies the compensation convention to a node pair. On-grid placement
/// retunes the bare resonators to `anchor - lambda` so the dressed resonance
/// lands back on the mode (the qubits stay at the anchor); mid-gap placement
/// instead drags the qubits onto the locally dressed resonator frequency.
fn compensated_nodes(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    options: &TransferOptions,
) -> Result<[NodeSpec; 2], ModelError> {
    if !options.compensate_lamb {
        return Ok(nodes.clone());
    }
    let mut out = nodes.clone();
    if options.resonant {
        let same = (nodes[0].kappa - nodes[1].kappa).abs() <= 1e-9 * nodes[0].kappa
            && nodes[0].resonator_frequency == nodes[1].resonator_frequency;
        if same {
            let om = dressed_fixed_point(spec, nodes[0].kappa, nodes[0].resonator_frequency, true)?;
            out[0].resonator_frequency = om;
            out[1].resonator_frequency = om;
        } else {
            for node in out.iter_mut() {
                node.resonator_frequency =
                    dressed_fixed_point(spec, node.kappa, node.resonator_frequency, false)?;
            }
        }
    } else {
        for node in out.iter_mut() {
            let lam = windowed_lamb_shift(spec, node)?;
            node.qubit_frequency += lam;
        }
    }
    Ok(out)
}

/// Retunes a bare resonator until the dressed resonance (the eigenvalue of the
/// passive resonator+comb block carrying the most resonator weight near the
/// anchor) sits exactly on the anchor mode. The perturbative shift alone
/// leaves a residual detuning of order 1e-4 kappa, which dominates the
/// long-photon plateau; the converged fixed point reaches the Stark floor at
/// every line length.
///
/// `pair = true` treats two identical resonators on opposite waveguide ports:
/// the problem splits into parity sectors, each a single effective resonator
/// coupled to every other comb tooth with doubled weight. The candidate levels
/// are the sector roots in the gaps adjacent to (or containing) the anchor;
/// the one with the largest resonator weight is followed, matching a full
/// eigendecomposition in all coupling regimes.
fn dressed_fixed_point(
    spec: &WaveguideSpec,
    kappa: f64,
    anchor: f64,
    pair: bool,
) -> Result<f64, ModelError> {
    let w_carrier = mode_frequency(spec, spec.central_mode_index());
    let fsr = free_spectral_range(spec, w_carrier)?;
    let v_g = dispersion_at(spec, w_carrier)?.v_g;
    let teeth: Vec<(usize, f64)> =
        spec.window_modes().map(|m| (m, mode_frequency(spec, m))).collect();
    let mc = spec.central_mode_index();
    let mut om = anchor;
    for _ in 0..64 {
        let g2_of = |w_m: f64, mult: f64| mult * kappa * v_g * w_m / (2.0 * om * spec.length);
        let mut best: Option<(f64, f64)> = None; // (root, weight)
        let sectors: &[(usize, f64)] = if pair { &[(0, 2.0), (1, 2.0)] } else { &[(2, 1.0)] };
        for &(parity, mult) in sectors {
            let tw: Vec<f64> = teeth
                .iter()
                .filter(|(m, _)| parity == 2 || m % 2 == parity)
                .map(|&(_, w)| w)
                .collect();
            let tg: Vec<f64> = teeth
                .iter()
                .filter(|(m, _)| parity == 2 || m % 2 == parity)
                .map(|&(_, w)| g2_of(w, mult))
                .collect();
            let resonant_sector = parity == 2 || mc % 2 == parity;
            let j = match tw.binary_search_by(|w| w.partial_cmp(&anchor).unwrap()) {
                Ok(j) => j,
                Err(j) => j,
            };
            let eps = 1e-9 * fsr;
            let mut brackets: Vec<(f64, f64)> = Vec::new();
            if resonant_sector {
                // anchor is a tooth of this sector: roots hug it on both sides
                if j > 0 {
                    brackets.push((tw[j - 1] + eps, tw[j] - eps));
                }
                if j + 1 < tw.len() {
                    brackets.push((tw[j] + eps, tw[j + 1] - eps));
                }
            } else if j > 0 && j < tw.len() {
                // anchor lies mid-gap for this sector
                brackets.push((tw[j - 1] + eps, tw[j] - eps));
            }
            for (lo0, hi0) in brackets {
                let (mut lo, mut hi) = (lo0, hi0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let f: f64 =
                        mid - om - tw.iter().zip(&tg).map(|(&w, &g)| g / (mid - w)).sum::<f64>();
                    if f < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let w = 0.5 * (lo + hi);
                let s2: f64 = tw.iter().zip(&tg).map(|(&wm, &g)| g / ((w - wm) * (w - wm))).sum();
                let weight = 1.0 / (1.0 + s2);
                if best.map_or(true, |(_, bw)| weight > bw) {
                    best = Some((w, weight));
                }
            }
        }
        let (wt, _) = best.ok_or_else(|| {
            ModelError::Domain("dressed fixed point: no candidate level near anchor".into())
        })?;
        let err = wt - anchor;
        om -= err;
        if err.abs() < (1e-10 * fsr).max(1e-8 * kappa) {
            break;
        }
    }
    Ok(om)
}

/// Lamb shift restricted to the modes the dynamics actually integrates, so the
/// compensation is self-consistent with the truncated model. The full-band
/// `lamb_shift` value would leave a residual detuning of order the out-of-window
/// tail, which dominates the long-photon plateau at small windows.
fn windowed_lamb_shift(spec: &WaveguideSpec, node: &NodeSpec) -> Result<f64, ModelError> {
    let fsr = free_spectral_range(spec, spec.center_frequency)?;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    let omega_r = node.resonator_frequency;
    let mut lam = 0.0;
    for m in spec.window_modes() {
        let wm = mode_frequency(spec, m);
        let det = omega_r - wm;
        if det.abs() < 1e-3 * fsr {
            continue;
        }
        lam += node.kappa * v_g * wm / (2.0 * omega_r * spec.length * det);
    }
    Ok(lam)
}

fn finish_transfer(
    system: &SystemModel,
    schedule: &ControlSchedule,
    options: &TransferOptions,
    resonant: bool,
    kt: f64,
    v_g: f64,
    length: f64,
) -> Result<TransferResult, ModelError> {
    let t_half = schedule.half_window;
    let init = AmplitudeState::qubit_excited(system, -t_half);
    let samples: Vec<f64> = (1..16).map(|i| -t_half + 2.0 * t_half * i as f64 / 16.0).collect();
    let traj = integrate(
        system,
        schedule,
        (-t_half, t_half),
        options.rel_tol,
        options.abs_tol,
        &samples,
        &init,
    )?;
    let f = traj.last();
    Ok(TransferResult {
        efficiency: f.q[1].norm_sqr(),
        duration: 2.0 * t_half,
        qubit_residual: f.q[0].norm_sqr(),
        resonator_residual: f.c[0].norm_sqr() + f.c[1].norm_sqr(),
        field_residual: f.psi.iter().map(|a| a.norm_sqr()).sum(),
        regime: regime(kt, v_g, length),
        max_norm_drift: traj.max_norm_drift(),
        steps: traj.steps,
        rejected: traj.rejected,
        compensated: options.compensate_lamb,
        resonant,
    })
}

/// Shaped-pulse state transfer Q1 -> Q2 over `[-T, T]`.
pub fn run_state_transfer(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    schedule: &ControlSchedule,
    options: &TransferOptions,
) -> Result<TransferResult, ModelError> {
    let nodes = compensated_nodes(spec, nodes, options)?;
    let frame = mode_frequency(spec, spec.central_mode_index());
    let system = SystemModel::assemble(spec, &nodes, frame)?;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    finish_transfer(
        &system,
        schedule,
        options,
        options.resonant,
        schedule.bandwidth,
        v_g,
        spec.length,
    )
}

/// Adiabatic (dark-state ramp) transfer with constant-amplitude controls.
pub fn run_stirap_transfer(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    g_0: f64,
    t_half: f64,
    options: &TransferOptions,
) -> Result<TransferResult, ModelError> {
    let schedule = stirap_schedule(g_0, t_half)?;
    let frame = mode_frequency(spec, spec.central_mode_index());
    let system = SystemModel::assemble(spec, nodes, frame)?;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    // bandwidth ~ 1/duration for the regime tag
    finish_transfer(&system, &schedule, options, true, 1.0 / t_half, v_g, spec.length)
}

/// Folds a qubit coherence time into a transfer efficiency:
/// |q_2(T)|^2 e^{-2T/T_1}.
pub fn decoherence_fold(efficiency: f64, duration: f64, t_1: f64) -> f64 {
    efficiency * (-duration / t_1).exp()
}

#[derive(Debug, Clone)]
pub struct EmissionResult {
    /// relative L2 distance between sqrt(kappa)|c_1(t)| and the sech target
    pub l2_error: f64,
    /// auxiliary line length used so no emitted amplitude returns, m
    pub extended_length: f64,
    pub n_modes: usize,
}

/// Single-node emission check: drives Q1-R1 with the shaped pulse on a line
/// long enough that nothing comes back, and compares the output flux envelope
/// sqrt(kappa)|c_1(t)| against the target sech photon.
pub fn run_emission(kappa: f64, eta: f64) -> Result<EmissionResult, ModelError> {
    let kt = kappa / eta;
    let t_half = crate::controls::SECH_MARGIN / kt;
    // the wavefront travels v_g * 2T; leave headroom so the band edges of the
    // window (which travel slower) stay clear of the far end
    let v_est = dispersion_at(&WaveguideSpec::standard(1.0), 2.0 * std::f64::consts::PI * 8.4e9)?.v_g;
    let mut spec = WaveguideSpec::standard(1.25 * v_est * 2.0 * t_half);
    spec.mode_window = select_mode_window(&spec, 18.0 * kt, 1e-12)?;
    let node = NodeSpec::resonant(&spec, kappa);
    let lam = windowed_lamb_shift(&spec, &node)?;
    let nodes = [
        NodeSpec {
            resonator_frequency: node.resonator_frequency - lam,
            ..node.clone()
        },
        node.clone(),
    ];
    let frame = node.resonator_frequency;
    let mut system = SystemModel::assemble(&spec, &nodes, frame)?;
    system.couplings[1].iter_mut().for_each(|g| *g = 0.0);
    let schedule = emission_schedule(kt, kappa, t_half)?;
    let n_samples = 2000usize;
    let ts: Vec<f64> = (0..=n_samples)
        .map(|i| -t_half + 2.0 * t_half * i as f64 / n_samples as f64)
        .collect();
    let init = AmplitudeState::qubit_excited(&system, -t_half);
    let traj = integrate(&system, &schedule, (-t_half, t_half), 1e-10, 1e-12, &ts, &init)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for s in &traj.samples {
        let out = kappa.sqrt() * s.c[0].norm();
        let target = (kt / 4.0).sqrt() / (0.5 * kt * s.t).cosh();
        num += (out - target) * (out - target);
        den += target * target;
    }
    Ok(EmissionResult {
        l2_error: (num / den).sqrt(),
        extended_length: spec.length,
        n_modes: system.n_modes(),
    })
}

/// Static single-excitation block of the passive node: resonator 2 plus the
/// spec's mode window, as detunings from `frame`. Returns (H, detunings).
fn passive_block(
    spec: &WaveguideSpec,
    node2: &NodeSpec,
    frame: f64,
) -> Result<(DMatrix<f64>, Vec<f64>), ModelError> {
    spec.validate()?;
    node2.validate()?;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    let modes: Vec<usize> = spec.window_modes().collect();
    let n = modes.len();
    let mut h = DMatrix::<f64>::zeros(n + 1, n + 1);
    h[(0, 0)] = node2.resonator_frequency - frame;
    let mut dw = Vec::with_capacity(n);
    for (i, &m) in modes.iter().enumerate() {
        let wm = mode_frequency(spec, m);
        let g = (node2.kappa * v_g * wm / (2.0 * node2.resonator_frequency * spec.length)).sqrt();
        let g = if m % 2 == 0 { g } else { -g };
        h[(i + 1, i + 1)] = wm - frame;
        h[(0, i + 1)] = g;
        h[(i + 1, 0)] = g;
        dw.push(wm - frame);
    }
    Ok((h, dw))
}

/// Propagates `y0` under the static block for time `t` via eigendecomposition.
fn static_propagate(h: &DMatrix<f64>, y0: &[Complex64], t: f64) -> Vec<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let dim = y0.len();
    let mut coeffs = vec![Complex64::ZERO; dim];
    for k in 0..dim {
        let v = eig.eigenvectors.column(k);
        let mut c = Complex64::ZERO;
        for i in 0..dim {
            c += v[i] * y0[i];
        }
        coeffs[k] = c * Complex64::new(0.0, -eig.eigenvalues[k] * t).exp();
    }
    let mut out = vec![Complex64::ZERO; dim];
    for k in 0..dim {
        let v = eig.eigenvectors.column(k);
        for i in 0..dim {
            out[i] += v[i] * coeffs[k];
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeResult {
    /// dressed eigenfrequency of the probed comb line, rad/s
    pub frequency: f64,
    /// round-trip scattering phase, wrapped to (-pi, pi]
    pub phase: f64,
}

/// Stationary phase probe: with the passive resonator side-coupled to the
/// comb, the dressed eigenvalue paired with line `m` is displaced downward by
/// phi/(2 pi) of the local spacing, so the scattering phase is read directly
/// off the eigenvalue ladder. The Cauchy interlacing of the arrowhead block
/// makes the pairing unambiguous. Window truncation inflates the apparent
/// linewidth by ~kappa/(3 half_width); size the window accordingly.
pub fn run_phase_probe(
    spec: &WaveguideSpec,
    node2: &NodeSpec,
    mode: usize,
) -> Result<ProbeResult, ModelError> {
    if mode < spec.mode_window.0 || mode >= spec.mode_window.1 {
        return Err(ModelError::Config(format!(
            "probe mode {mode} must lie strictly inside the window {:?}",
            spec.mode_window
        )));
    }
    let frame = spec.center_frequency;
    let (h, dw) = passive_block(spec, node2, frame)?;
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let i = mode - spec.mode_window.0;
    let wt = ev[i + 1];
    if wt < dw[i] || wt > dw[i + 1] {
        return Err(ModelError::Domain(format!(
            "eigenvalue ladder interlacing failed at probe mode {mode}"
        )));
    }
    let fsr_loc = dw[i + 1] - dw[i];
    let mut phi = -2.0 * std::f64::consts::PI * (wt - dw[i]) / fsr_loc;
    if phi <= -std::f64::consts::PI {
        phi += 2.0 * std::f64::consts::PI;
    }
    Ok(ProbeResult {
        frequency: wt + frame,
        phase: phi,
    })
}

#[derive(Debug, Clone)]
pub struct ScatterResult {
    /// 1 - |z|^2 against the distortion-free reference, simulated
    pub overlap_sim: f64,
    /// same overlap with per-mode analytic scattering phases instead of the
    /// integrated state
    pub overlap_theory: f64,
    /// leading-order prediction h^2 kt^4 / 45
    pub predicted: f64,
    pub resonator_residual: f64,
    /// extracted total phase per mode (window index, rad), modes above the
    /// amplitude floor only
    pub phases: Vec<(usize, f64)>,
    pub long_photon_warning: bool,
    pub n_modes: usize,
}

/// Scatters a sech photon off the passive node and measures the overlap with
/// the distortion-free reference (delayed, average-phase-shifted copy).
/// `t_override` replaces the default round-trip time 2 t_p + phi'(omega_c).
pub fn run_wavepacket_scattering(
    spec: &WaveguideSpec,
    node2: &NodeSpec,
    photon: &SechWavepacket,
    t_override: Option<f64>,
) -> Result<ScatterResult, ModelError> {
    let wc = photon.center;
    let kt = photon.bandwidth;
    let (h, dw) = passive_block(spec, node2, wc)?;
    let disp = dispersion_at(spec, wc)?;
    let t_p = spec.length / disp.v_g;
    let exp = theory::phase_expansion(node2.resonator_frequency, node2.kappa, wc);
    let t = t_override.unwrap_or(2.0 * t_p + exp.phi_prime);

    let n = dw.len();
    let mc = spec.central_mode_index();
    let f: Vec<f64> = {
        let mut f: Vec<f64> = dw
            .iter()
            .map(|&d| 1.0 / (std::f64::consts::PI * d / kt).cosh())
            .collect();
        let norm: f64 = f.iter().map(|a| a * a).sum::<f64>().sqrt();
        f.iter_mut().for_each(|a| *a /= norm);
        f
    };
    let mut y0 = vec![Complex64::ZERO; n + 1];
    for m in 0..n {
        y0[m + 1] = Complex64::new(f[m], 0.0);
    }
    let y = static_propagate(&h, &y0, t);
    let psi = &y[1..];

    // distortion-free reference: linearized free phases about the carrier,
    // average scattering phase, group delay
    let modes: Vec<usize> = spec.window_modes().collect();
    let mut z_sim = Complex64::ZERO;
    let mut z_th = Complex64::ZERO;
    let mut phases = Vec::new();
    for m in 0..n {
        let dk_v = (modes[m] as f64 - mc as f64) * std::f64::consts::PI / spec.length * disp.v_g;
        let ref_phase = -(dk_v * t) + exp.phi_0 + exp.phi_prime * dw[m];
        let r = f[m] * Complex64::new(0.0, ref_phase).exp();
        z_sim += r.conj() * psi[m];
        let phi_m = theory::scattering_phase(dw[m] + wc, node2.resonator_frequency, node2.kappa);
        z_th += r.conj() * (f[m] * Complex64::new(0.0, -dw[m] * t + phi_m).exp());
        if psi[m].norm() > 1e-8 {
            phases.push((modes[m], (psi[m] * Complex64::new(0.0, dw[m] * t).exp()).arg()));
        }
    }
    let h_coeff = t * disp.d / (2.0 * disp.v_g * disp.v_g) - exp.phi_double_prime / 2.0;
    Ok(ScatterResult {
        overlap_sim: 1.0 - z_sim.norm_sqr(),
        overlap_theory: 1.0 - z_th.norm_sqr(),
        predicted: h_coeff * h_coeff * kt.powi(4) / 45.0,
        resonator_residual: y[0].norm_sqr(),
        phases,
        long_photon_warning: photon.sigma_t() > t_p,
        n_modes: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceSpec {
    pub t_1: f64,
    /// Purcell ratios (g_2/Delta, optional g_p/Delta)
    pub g2_over_delta: f64,
    pub gp_over_delta: Option<f64>,
}

/// Purcell-induced decay of the passive data qubit through its resonator,
/// optionally suppressed by a filter.
pub fn purcell_gamma(kappa_2: f64, g2_over_delta: f64, gp_over_delta: Option<f64>) -> f64 {
    let base = kappa_2 * g2_over_delta * g2_over_delta;
    match gp_over_delta {
        Some(r) => base * r * r,
        None => base,
    }
}

#[derive(Debug, Clone)]
pub struct CPhaseResult {
    pub z0: Complex64,
    pub z1: Complex64,
    /// arg z_1 - arg z_0, mapped to (0, 2 pi)
    pub phi: f64,
    pub fidelity: f64,
    pub fidelity_with_decoherence: Option<f64>,
    pub chi: f64,
    pub duration: f64,
}

/// One emit-scatter-reabsorb branch: node 1 drives the shaped pulse and its
/// mirror, node 2 sits passively at `omega_r2`. Returns q_1(T).
fn cphase_branch(
    spec: &WaveguideSpec,
    node1: &NodeSpec,
    node2: &NodeSpec,
    omega_r2: f64,
    schedule: &ControlSchedule,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Complex64, ModelError> {
    let frame = mode_frequency(spec, spec.central_mode_index());
    let lam1 = windowed_lamb_shift(spec, node1)?;
    let nodes = [
        NodeSpec {
            resonator_frequency: node1.resonator_frequency - lam1,
            ..node1.clone()
        },
        NodeSpec {
            resonator_frequency: omega_r2,
            ..node2.clone()
        },
    ];
    let system = SystemModel::assemble(spec, &nodes, frame)?;
    let t_half = schedule.half_window;
    let init = AmplitudeState::qubit_excited(&system, -t_half);
    let traj = integrate(&system, schedule, (-t_half, t_half), rel_tol, abs_tol, &[], &init)?;
    Ok(traj.last().q[0])
}

/// Controlled-phase gate: the flying qubit's photon scatters off R2, whose
/// frequency is pushed to Omega_R2 +- chi by the passive qubit's state.
pub fn run_cphase(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    eta: f64,
    chi: f64,
    decoherence: Option<&DecoherenceSpec>,
) -> Result<CPhaseResult, ModelError> {
    let kt = nodes[0].kappa / eta;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    let t_p = spec.length / v_g;
    let schedule = reabsorption_schedule(kt, nodes[0].kappa, nodes[1].kappa, t_p)?;
    let base = nodes[1].resonator_frequency;
    // x = 0 -> Omega_R2 - chi, x = 1 -> Omega_R2 + chi
    let z0 = cphase_branch(spec, &nodes[0], &nodes[1], base - chi, &schedule, 1e-10, 1e-12)?;
    let z1 = cphase_branch(spec, &nodes[0], &nodes[1], base + chi, &schedule, 1e-10, 1e-12)?;
    let phi = {
        let d = (z1.arg() - z0.arg()).rem_euclid(2.0 * std::f64::consts::PI);
        if d == 0.0 {
            0.0
        } else {
            d
        }
    };
    let fidelity = theory::min_gate_fidelity(z0.norm(), z1.norm(), phi)?;
    let fidelity_with_decoherence = decoherence.map(|d| {
        let gamma = purcell_gamma(nodes[1].kappa, d.g2_over_delta, d.gp_over_delta);
        fidelity * (-schedule.half_window * (2.0 / d.t_1 + gamma)).exp()
    });
    Ok(CPhaseResult {
        z0,
        z1,
        phi,
        fidelity,
        fidelity_with_decoherence,
        chi,
        duration: 2.0 * schedule.half_window,
    })
}

/// Golden-section maximization of the gate fidelity over the dispersive shift.
/// Falls back to the best grid point when the response is not unimodal.
pub fn optimize_chi(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    eta: f64,
    window: (f64, f64),
) -> Result<(f64, f64), ModelError> {
    let (lo, hi) = window;
    if !(hi >= lo) {
        return Err(ModelError::Config("empty chi window".into()));
    }
    let tol = 1e-3 * nodes[1].kappa;
    if hi - lo <= tol {
        let f = run_cphase(spec, nodes, eta, 0.5 * (lo + hi), None)?.fidelity;
        return Ok((0.5 * (lo + hi), f));
    }
    let eval = |chi: f64| -> Result<f64, ModelError> {
        Ok(run_cphase(spec, nodes, eta, chi, None)?.fidelity)
    };
    // coarse grid to locate the bracket
    let n_grid = 7usize;
    let mut grid = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let chi = lo + (hi - lo) * i as f64 / (n_grid - 1) as f64;
        grid.push((chi, eval(chi)?));
    }
    let best = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if best == 0 || best == n_grid - 1 {
        // edge maximum: report the grid result
        return Ok(grid[best]);
    }
    let (mut a, mut b) = (grid[best - 1].0, grid[best + 1].0);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        }
    }
    let chi = 0.5 * (a + b);
    Ok((chi, eval(chi)?))
}

/// Composed gate-transfer bound F = [F_st e^{-2T/T_1}]^2 F_23.
pub fn gate_transfer_fidelity(f_st: f64, duration: f64, t_1: f64, f_23: f64) -> f64 {
    let leg = f_st * (-duration / t_1).exp();
    leg * leg * f_23
}

/// Scans the protocol duration 2T over [t_p + 2/kt, t_p + 20/kt] maximizing
/// the gate-transfer bound, coarse log grid then golden-section refinement.
pub fn optimize_duration(
    spec: &WaveguideSpec,
    nodes: &[NodeSpec; 2],
    kappa: f64,
    eta: f64,
    t_1: f64,
) -> Result<(f64, f64), ModelError> {
    let kt = kappa / eta;
    let v_g = dispersion_at(spec, spec.center_frequency)?.v_g;
    let t_p = spec.length / v_g;
    let eval = |duration: f64| -> Result<f64, ModelError> {
        let mut schedule = transfer_schedule(nodes[0].kappa, nodes[1].kappa, kt, t_p)?;
        schedule.half_window = 0.5 * duration;
        let r = run_state_transfer(spec, nodes, &schedule, &TransferOptions::default())?;
        Ok(gate_transfer_fidelity(
            theory::min_transfer_fidelity(r.efficiency),
            duration,
            t_1,
            1.0,
        ))
    };
    let (lo, hi) = (t_p + 2.0 / kt, t_p + 20.0 / kt);
    let n_grid = 7usize;
    let mut best = (lo, eval(lo)?);
    let mut pts = vec![best.1];
    for i in 1..n_grid {
        let d = lo * (hi / lo).powf(i as f64 / (n_grid - 1) as f64);
        let f = eval(d)?;
        pts.push(f);
        if f > best.1 {
            best = (d, f);
        }
    }
    let best_i = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if best_i == 0 || best_i == n_grid - 1 {
        return Ok(best);
    }
    let mut a = lo * (hi / lo).powf((best_i - 1) as f64 / (n_grid - 1) as f64);
    let mut b = lo * (hi / lo).powf((best_i + 1) as f64 / (n_grid - 1) as f64);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..8 {
        let x1 = b - inv_phi * (b - a);
        let x2 = a + inv_phi * (b - a);
        let f1 = eval(x1)?;
        let f2 = eval(x2)?;
        if f1 < f2 {
            a = x1;
            if f2 > best.1 {
                best = (x2, f2);
            }
        } else {
            b = x2;
            if f1 > best.1 {
                best = (x1, f1);
            }
        }
    }
    Ok(best)
}

/// Standard two-node transfer setup: spec with full band, both nodes placed
/// by the resonant/off-resonant convention, matching schedule.
pub fn standard_transfer(
    length: f64,
    kappa: f64,
    eta: f64,
    options: &TransferOptions,
) -> Result<TransferResult, ModelError> {
    let spec = WaveguideSpec::standard(length);
    let node = if options.resonant {
        NodeSpec::resonant(&spec, kappa)
    } else {
        NodeSpec::off_resonant(&spec, kappa)
    };
    let nodes = [node.clone(), node];
    let kt = kappa / eta;
    let v_g = dispersion_at(&spec, mode_frequency(&spec, spec.central_mode_index()))?.v_g;
    let schedule = transfer_schedule(kappa, kappa, kt, spec.length / v_g)?;
    run_state_transfer(&spec, &nodes, &schedule, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::symmetric_window;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn regime_crossover() {
        let v_g = 1.874e8;
        // threshold at L = 30 m is ~2pi x 3.6 MHz
        assert_eq!(regime(2.0 * PI * 50e6, v_g, 30.0), Regime::ShortPhoton);
        assert_eq!(regime(2.0 * PI * 1e6, v_g, 30.0), Regime::LongPhoton);
        assert_eq!(regime(2.0 * PI * 50e6, v_g, 1.0), Regime::LongPhoton);
    }

    #[test]
    fn fold_limits() {
        assert_abs_diff_eq!(decoherence_fold(0.99, 1e-6, f64::INFINITY), 0.99);
        assert_relative_eq!(
            decoherence_fold(1.0, 11.5e-6, 11.5e-6),
            (-1.0f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn purcell_numbers() {
        let kappa = 2.0 * PI * 100e6;
        let g = purcell_gamma(kappa, 0.1, Some(0.03));
        assert_relative_eq!(1.0 / g, 176.9e-6, max_relative = 0.01);
        // filter suppression ratio (g_p/Delta)^2
        let ratio = purcell_gamma(kappa, 0.1, Some(0.1)) / purcell_gamma(kappa, 0.1, None);
        assert_relative_eq!(ratio, 0.01, max_relative = 1e-12);
        assert_abs_diff_eq!(purcell_gamma(kappa, 0.0, None), 0.0);
    }

    #[test]
    fn gate_transfer_bound_arithmetic() {
        assert_abs_diff_eq!(gate_transfer_fidelity(1.0, 1e-6, f64::INFINITY, 1.0), 1.0);
        let f = gate_transfer_fidelity(0.999, 1e-6, 100e-6, 1.0);
        assert_relative_eq!(f, 0.9782, max_relative = 1e-3);
    }

    #[test]
    fn probe_resonant_mode_is_pi() {
        let mut spec = WaveguideSpec::standard(30.0);
        let kappa2 = 2.0 * PI * 20e6;
        spec.mode_window = symmetric_window(&spec, 40.0 * kappa2).unwrap();
        let node2 = NodeSpec::resonant(&spec, kappa2);
        let r = run_phase_probe(&spec, &node2, spec.central_mode_index()).unwrap();
        // a resonator on a comb tooth pins the dressed level a distance
        // FSR/2 - FSR^2/(pi kappa) into the gap, so the phase approaches -pi
        // only as FSR/kappa -> 0; the leading deviation is 2 FSR/kappa
        let fsr = free_spectral_range(&spec, spec.center_frequency).unwrap();
        let dev = (r.phase.abs() - PI).abs();
        assert!(dev < 2.2 * fsr / kappa2, "phi = {}", r.phase);
        assert!(dev > 1.8 * fsr / kappa2, "phi = {}", r.phase);
    }

    #[test]
    fn probe_quarter_turn_at_operating_detuning() {
        // resonator kappa (1/2 + 1/sqrt 2) below the carrier: phase -pi/4
        let mut spec = WaveguideSpec::standard(30.0);
        let kappa2 = 2.0 * PI * 20e6;
        spec.mode_window = symmetric_window(&spec, 40.0 * kappa2).unwrap();
        let mut node2 = NodeSpec::resonant(&spec, kappa2);
        let det = kappa2 * (0.5 + 1.0 / 2f64.sqrt());
        node2.resonator_frequency -= det;
        node2.qubit_frequency = node2.resonator_frequency;
        let r = run_phase_probe(&spec, &node2, spec.central_mode_index()).unwrap();
        assert!((r.phase + PI / 4.0).abs() < 2e-2, "phi = {}", r.phase);
    }

    #[test]
    fn probe_phases_track_lorentzian_across_resonance() {
        let mut spec = WaveguideSpec::standard(30.0);
        let kappa2 = 2.0 * PI * 20e6;
        spec.mode_window = symmetric_window(&spec, 40.0 * kappa2).unwrap();
        let node2 = NodeSpec::resonant(&spec, kappa2);
        // the resonator's own dressing shift moves the measured resonance
        let fsr = free_spectral_range(&spec, spec.center_frequency).unwrap();
        let table = crate::waveguide::coupling_table(&spec, &[node2.clone(), node2.clone()]).unwrap();
        let lines: Vec<(f64, f64)> = table
            .modes
            .iter()
            .map(|&m| mode_frequency(&spec, m))
            .zip(table.g2.iter().copied())
            .collect();
        let omega_eff = node2.resonator_frequency
            + crate::dynamics::lamb_shift_from(node2.resonator_frequency, &lines, 1e-3 * fsr);
        let mut worst = 0.0f64;
        for m in (spec.mode_window.0 + 1)..spec.mode_window.1 {
            let r = run_phase_probe(&spec, &node2, m).unwrap();
            if (r.frequency - omega_eff).abs() > 5.0 * kappa2 {
                continue;
            }
            let mut expect = theory::scattering_phase(r.frequency, omega_eff, kappa2);
            if expect <= -PI {
                expect += 2.0 * PI;
            }
            let mut d = (r.phase - expect).rem_euclid(2.0 * PI);
            if d > PI {
                d = 2.0 * PI - d;
            }
            worst = worst.max(d);
        }
        assert!(worst < 1e-2, "worst phase closure {worst:.3e}");
    }

    #[test]
    fn probe_outside_window_rejected() {
        let mut spec = WaveguideSpec::standard(30.0);
        spec.mode_window = (1000, 1100);
        let node2 = NodeSpec::resonant(&spec, 2.0 * PI * 20e6);
        assert!(run_phase_probe(&spec, &node2, 10).is_err());
    }

    #[test]
    fn scattering_eta_scaling() {
        // 1 - |z|^2 drops ~eta^-4 between eta = 1 and eta = 2
        let kappa2 = 2.0 * PI * 100e6;
        let mut spec = WaveguideSpec::standard(5.0);
        let node2 = {
            let mut n = NodeSpec::resonant(&spec, kappa2);
            let det = kappa2 * (0.5 + 1.0 / 2f64.sqrt());
            n.resonator_frequency -= det;
            n.qubit_frequency = n.resonator_frequency;
            n
        };
        let wc = mode_frequency(&spec, spec.central_mode_index());
        let mut res = Vec::new();
        for eta in [1.0, 2.0] {
            let kt = kappa2 / eta;
            spec.mode_window =
                symmetric_window(&spec, (9.0 * kt).max(3.0 * kappa2)).unwrap();
            let photon = SechWavepacket { center: wc, bandwidth: kt };
            let r = run_wavepacket_scattering(&spec, &node2, &photon, None).unwrap();
            res.push(r);
        }
        let ratio = res[0].overlap_sim / res[1].overlap_sim;
        assert!(
            ratio > 8.0 && ratio < 32.0,
            "eta^-4 scaling violated: ratio {ratio}"
        );
        // theory overlap tracks simulation within a factor 2
        for r in &res {
            let q = r.overlap_sim / r.overlap_theory;
            assert!(q > 0.5 && q < 2.0, "sim {} vs theory {}", r.overlap_sim, r.overlap_theory);
        }
    }

    #[test]
    fn emission_envelope_matches_sech() {
        let r = run_emission(2.0 * PI * 1e6, 1.0).unwrap();
        assert!(r.l2_error < 0.01, "L2 = {}", r.l2_error);
    }

    #[test]
    fn transfer_short_photon_matches_distortion_law() {
        let kappa = 2.0 * PI * 50e6;
        let r = standard_transfer(30.0, kappa, 1.0, &TransferOptions::default()).unwrap();
        assert_eq!(r.regime, Regime::ShortPhoton);
        let spec = WaveguideSpec::standard(30.0);
        let disp = dispersion_at(&spec, spec.center_frequency).unwrap();
        let pred = 1.0 - theory::transfer_distortion(30.0, disp.d, disp.v_g, kappa, 1.0);
        let inf = 1.0 - r.efficiency;
        assert!(inf / pred > 0.5 && inf / pred < 2.0, "inf {inf:.3e} pred {pred:.3e}");
        // unitarity bookkeeping
        let total = r.efficiency + r.qubit_residual + r.resonator_residual + r.field_residual;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn stirap_diabatic_failure_and_improvement() {
        let spec = WaveguideSpec::standard(5.0);
        let fsr = free_spectral_range(&spec, spec.center_frequency).unwrap();
        let node = NodeSpec::resonant(&spec, fsr);
        let nodes = [node.clone(), node];
        let g0 = fsr / 2.0;
        let opts = TransferOptions::default();
        let fast = run_stirap_transfer(&spec, &nodes, g0, 0.025e-6, &opts).unwrap();
        assert!(fast.efficiency < 0.5, "diabatic run too good: {}", fast.efficiency);
        let slow = run_stirap_transfer(&spec, &nodes, g0, 0.5e-6, &opts).unwrap();
        assert!(slow.efficiency > fast.efficiency);
        assert!(slow.efficiency > 0.9);
    }

    #[test]
    fn cphase_chi_zero_branches_identical() {
        let mut spec = WaveguideSpec::standard(5.0);
        let kappa = 2.0 * PI * 100e6;
        let kt = kappa / 2.0;
        spec.mode_window = select_mode_window(&spec, (9.0 * kt).max(3.0 * kappa), 1e-9).unwrap();
        let node = NodeSpec::resonant(&spec, kappa);
        let nodes = [node.clone(), node];
        let r = run_cphase(&spec, &nodes, 2.0, 0.0, None).unwrap();
        assert_abs_diff_eq!(r.phi, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!((r.z0 - r.z1).norm(), 0.0, epsilon = 1e-12);
        let expect = theory::min_gate_fidelity(r.z0.norm(), r.z1.norm(), 0.0).unwrap();
        assert_abs_diff_eq!(r.fidelity, expect, epsilon = 1e-12);
    }

    #[test]
    fn cphase_large_eta_reaches_pi() {
        let mut spec = WaveguideSpec::standard(5.0);
        let kappa = 2.0 * PI * 100e6;
        let eta = 4.0;
        let kt = kappa / eta;
        spec.mode_window = select_mode_window(&spec, (9.0 * kt).max(3.0 * kappa), 1e-9).unwrap();
        let node = NodeSpec::resonant(&spec, kappa);
        let nodes = [node.clone(), node];
        let r = run_cphase(&spec, &nodes, eta, kappa / 2.0, None).unwrap();
        assert!((r.phi - PI).abs() < 0.05, "phi = {}", r.phi);
        assert!(r.fidelity > 0.98, "F_g = {}", r.fidelity);
        assert!(r.z1.norm() >= r.z0.norm() - 1e-6);
    }
}
