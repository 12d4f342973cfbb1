//! Dispatch from resolved parameters to the protocol drivers, producing flat
//! result records with a fixed column set per experiment kind.

use std::f64::consts::PI;

use mwlink::controls::SechWavepacket;
use mwlink::dynamics::lamb_shift;
use mwlink::protocols::{
    decoherence_fold, optimize_duration, run_cphase, run_phase_probe, run_state_transfer,
    run_stirap_transfer, run_wavepacket_scattering, DecoherenceSpec, Regime, TransferOptions,
};
use mwlink::theory;
use mwlink::waveguide::{
    dispersion_at, free_spectral_range, mode_frequency, select_mode_window, symmetric_window,
    WaveguideSpec,
};
use mwlink::NodeSpec;

use crate::config::{Kind, Params};
use crate::output::{Cell, Record};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub tolerance: f64,
    pub compensate_lamb: bool,
    pub resonant: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tolerance: 1e-10,
            compensate_lamb: true,
            resonant: true,
        }
    }
}

impl RunOptions {
    fn transfer_options(&self) -> TransferOptions {
        TransferOptions {
            compensate_lamb: self.compensate_lamb,
            resonant: self.resonant,
            rel_tol: self.tolerance,
            abs_tol: self.tolerance * 1e-2,
        }
    }
}

fn regime_tag(r: Regime) -> &'static str {
    match r {
        Regime::ShortPhoton => "short-photon",
        Regime::LongPhoton => "long-photon",
    }
}

fn inputs(p: &Params) -> Record {
    vec![
        ("length_m", Cell::F(p.length)),
        ("kappa_mhz", Cell::F(p.kappa / (2.0 * PI * 1e6))),
        (
            "kappa2_mhz",
            Cell::F(p.kappa_2.unwrap_or(p.kappa) / (2.0 * PI * 1e6)),
        ),
        ("eta", Cell::F(p.eta)),
        ("detuning_mhz", Cell::F(p.detuning / (2.0 * PI * 1e6))),
        ("t1_us", Cell::F(p.t_1 * 1e6)),
    ]
}

/// Columns the outputs of each kind must fill, in order. Failed points fill
/// them with NaN so the column set never varies within a dataset.
pub fn output_columns(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Transfer => &[
            "efficiency",
            "infidelity",
            "duration_s",
            "qubit_residual",
            "resonator_residual",
            "field_residual",
            "max_norm_drift",
            "steps",
            "rejected",
            "regime",
        ],
        Kind::StirapCompare => &[
            "infidelity_shaped",
            "duration_shaped_s",
            "folded_shaped",
            "infidelity_adiabatic",
            "duration_adiabatic_s",
            "folded_adiabatic",
        ],
        Kind::PhaseProbe => &["phase_rad", "phase_predicted_rad", "phase_error_rad"],
        Kind::Scatter => &[
            "overlap_sim",
            "overlap_theory",
            "predicted",
            "resonator_residual",
            "long_photon_warning",
            "n_modes",
            "regime",
        ],
        Kind::CPhase => &[
            "z0_abs",
            "z1_abs",
            "phi_rad",
            "phi_predicted_rad",
            "fidelity",
            "fidelity_with_decoherence",
            "chi_mhz",
            "duration_s",
        ],
        Kind::GateTransfer => &["best_duration_s", "best_fidelity", "infidelity"],
        Kind::Dressed => &[
            "lower_mhz",
            "central_mhz",
            "upper_mhz",
            "weight1_lower",
            "weight1_central",
            "weight1_upper",
        ],
        Kind::Lamb => &["lambda_rad_s", "lambda_over_kappa", "fsr_over_kappa"],
    }
}

fn nan_outputs(kind: Kind) -> Vec<(&'static str, Cell)> {
    output_columns(kind)
        .iter()
        .map(|&k| (k, Cell::F(f64::NAN)))
        .collect()
}

/// Runs one experiment point. On failure the outputs are NaN-filled and the
/// error column carries the message; the caller decides the exit policy.
pub fn run_point(kind: Kind, p: &Params, opts: &RunOptions) -> (Record, bool) {
    let mut rec = inputs(p);
    match dispatch(kind, p, opts) {
        Ok(outputs) => {
            rec.extend(outputs);
            rec.push(("error", Cell::S(String::new())));
            (rec, true)
        }
        Err(msg) => {
            rec.extend(nan_outputs(kind));
            rec.push(("error", Cell::S(msg)));
            (rec, false)
        }
    }
}

fn dispatch(kind: Kind, p: &Params, opts: &RunOptions) -> Result<Record, String> {
    match kind {
        Kind::Transfer => transfer(p, opts),
        Kind::StirapCompare => stirap_compare(p, opts),
        Kind::PhaseProbe => phase_probe(p),
        Kind::Scatter => scatter(p),
        Kind::CPhase => cphase(p),
        Kind::GateTransfer => gate_transfer(p, opts),
        Kind::Dressed => dressed(p),
        Kind::Lamb => lamb(p),
    }
    .map_err(|e| e.to_string())
}

type Out = Result<Record, mwlink::ModelError>;

fn standard_pair(p: &Params, resonant: bool) -> (WaveguideSpec, [NodeSpec; 2]) {
    let spec = WaveguideSpec::standard(p.length);
    let n1 = if resonant {
        NodeSpec::resonant(&spec, p.kappa)
    } else {
        NodeSpec::off_resonant(&spec, p.kappa)
    };
    let mut n2 = n1.clone();
    if let Some(k2) = p.kappa_2 {
        n2.kappa = k2;
    }
    (spec, [n1, n2])
}

fn transfer(p: &Params, opts: &RunOptions) -> Out {
    let (spec, nodes) = standard_pair(p, opts.resonant);
    let kt = p.kappa / p.eta;
    let v_g = dispersion_at(&spec, mode_frequency(&spec, spec.central_mode_index()))?.v_g;
    let mut schedule = mwlink::controls::transfer_schedule(
        nodes[0].kappa,
        nodes[1].kappa,
        kt,
        spec.length / v_g,
    )?;
    if let Some(d) = p.duration {
        schedule.half_window = 0.5 * d;
    }
    let r = run_state_transfer(&spec, &nodes, &schedule, &opts.transfer_options())?;
    Ok(vec![
        ("efficiency", Cell::F(r.efficiency)),
        ("infidelity", Cell::F(1.0 - r.efficiency)),
        ("duration_s", Cell::F(r.duration)),
        ("qubit_residual", Cell::F(r.qubit_residual)),
        ("resonator_residual", Cell::F(r.resonator_residual)),
        ("field_residual", Cell::F(r.field_residual)),
        ("max_norm_drift", Cell::F(r.max_norm_drift)),
        ("steps", Cell::I(r.steps as u64)),
        ("rejected", Cell::I(r.rejected as u64)),
        ("regime", Cell::S(regime_tag(r.regime).into())),
    ])
}

fn stirap_compare(p: &Params, opts: &RunOptions) -> Out {
    let (spec, nodes) = standard_pair(p, true);
    let kt = p.kappa / p.eta;
    let v_g = dispersion_at(&spec, mode_frequency(&spec, spec.central_mode_index()))?.v_g;
    let schedule = mwlink::controls::transfer_schedule(
        nodes[0].kappa,
        nodes[1].kappa,
        kt,
        spec.length / v_g,
    )?;
    let topt = opts.transfer_options();
    let shaped = run_state_transfer(&spec, &nodes, &schedule, &topt)?;
    let g_0 = p.g_0.unwrap_or(0.5 * p.kappa);
    let t_half = p.duration.map(|d| 0.5 * d).unwrap_or(schedule.half_window);
    let adiabatic = run_stirap_transfer(&spec, &nodes, g_0, t_half, &topt)?;
    Ok(vec![
        ("infidelity_shaped", Cell::F(1.0 - shaped.efficiency)),
        ("duration_shaped_s", Cell::F(shaped.duration)),
        (
            "folded_shaped",
            Cell::F(1.0 - decoherence_fold(shaped.efficiency, shaped.duration, p.t_1)),
        ),
        ("infidelity_adiabatic", Cell::F(1.0 - adiabatic.efficiency)),
        ("duration_adiabatic_s", Cell::F(adiabatic.duration)),
        (
            "folded_adiabatic",
            Cell::F(1.0 - decoherence_fold(adiabatic.efficiency, adiabatic.duration, p.t_1)),
        ),
    ])
}

fn phase_probe(p: &Params) -> Out {
    let mut spec = WaveguideSpec::standard(p.length);
    let kappa = p.kappa_2.unwrap_or(p.kappa);
    spec.mode_window = symmetric_window(&spec, 40.0 * kappa)?;
    let mc = spec.central_mode_index();
    let omega_probe = mode_frequency(&spec, mc);
    let mut node = NodeSpec::resonant(&spec, kappa);
    node.resonator_frequency = omega_probe + p.detuning;
    node.qubit_frequency = node.resonator_frequency;
    let r = run_phase_probe(&spec, &node, mc)?;
    let predicted = {
        let mut d = theory::scattering_phase(r.frequency, node.resonator_frequency, kappa);
        if d <= -PI {
            d += 2.0 * PI;
        }
        d
    };
    let mut err = (r.phase - predicted).rem_euclid(2.0 * PI);
    if err > PI {
        err = 2.0 * PI - err;
    }
    Ok(vec![
        ("phase_rad", Cell::F(r.phase)),
        ("phase_predicted_rad", Cell::F(predicted)),
        ("phase_error_rad", Cell::F(err)),
    ])
}

fn scatter(p: &Params) -> Out {
    let mut spec = WaveguideSpec::standard(p.length);
    let kappa_2 = p.kappa_2.unwrap_or(p.kappa);
    let kt = p.kappa / p.eta;
    spec.mode_window = symmetric_window(&spec, (9.0 * kt).max(3.0 * kappa_2))?;
    let wc = mode_frequency(&spec, spec.central_mode_index());
    let mut node = NodeSpec::resonant(&spec, kappa_2);
    let offset = if p.detuning != 0.0 {
        p.detuning
    } else {
        -kappa_2 * (0.5 + 0.5f64.sqrt())
    };
    node.resonator_frequency = wc + offset;
    node.qubit_frequency = node.resonator_frequency;
    let photon = SechWavepacket {
        center: wc,
        bandwidth: kt,
    };
    let r = run_wavepacket_scattering(&spec, &node, &photon, None)?;
    let v_g = dispersion_at(&spec, mode_frequency(&spec, spec.central_mode_index()))?.v_g;
    let tag = regime_tag(mwlink::protocols::regime(kt, v_g, p.length));
    Ok(vec![
        ("overlap_sim", Cell::F(r.overlap_sim)),
        ("overlap_theory", Cell::F(r.overlap_theory)),
        ("predicted", Cell::F(r.predicted)),
        ("resonator_residual", Cell::F(r.resonator_residual)),
        ("long_photon_warning", Cell::B(r.long_photon_warning)),
        ("n_modes", Cell::I(r.n_modes as u64)),
        ("regime", Cell::S(tag.into())),
    ])
}

fn cphase(p: &Params) -> Out {
    let spec = WaveguideSpec::standard(p.length);
    let kappa_2 = p.kappa_2.unwrap_or(p.eta * p.kappa);
    let n1 = NodeSpec::resonant(&spec, p.kappa);
    let mut n2 = NodeSpec::resonant(&spec, kappa_2);
    n2.resonator_frequency += p.detuning;
    let nodes = [n1, n2];
    let chi = p.chi.unwrap_or(0.5 * kappa_2);
    let deco = (p.g2_over_delta > 0.0).then_some(DecoherenceSpec {
        t_1: p.t_1,
        g2_over_delta: p.g2_over_delta,
        gp_over_delta: p.gp_over_delta,
    });
    let r = run_cphase(&spec, &nodes, p.eta, chi, deco.as_ref())?;
    Ok(vec![
        ("z0_abs", Cell::F(r.z0.norm())),
        ("z1_abs", Cell::F(r.z1.norm())),
        ("phi_rad", Cell::F(r.phi)),
        (
            "phi_predicted_rad",
            Cell::F(theory::phase_correction(p.kappa, kappa_2, p.eta)),
        ),
        ("fidelity", Cell::F(r.fidelity)),
        (
            "fidelity_with_decoherence",
            Cell::F(r.fidelity_with_decoherence.unwrap_or(f64::NAN)),
        ),
        ("chi_mhz", Cell::F(r.chi / (2.0 * PI * 1e6))),
        ("duration_s", Cell::F(r.duration)),
    ])
}

fn gate_transfer(p: &Params, _opts: &RunOptions) -> Out {
    let (spec, nodes) = standard_pair(p, true);
    let (duration, fidelity) = optimize_duration(&spec, &nodes, p.kappa, p.eta, p.t_1)?;
    let fidelity = fidelity * p.f_23;
    Ok(vec![
        ("best_duration_s", Cell::F(duration)),
        ("best_fidelity", Cell::F(fidelity)),
        ("infidelity", Cell::F(1.0 - fidelity)),
    ])
}

fn dressed(p: &Params) -> Out {
    let mut spec = WaveguideSpec::standard(p.length);
    spec.mode_window = select_mode_window(&spec, 6.0 * p.kappa, 1e-12)?;
    let node = NodeSpec::resonant(&spec, p.kappa);
    let nodes = [node.clone(), node];
    let s = theory::dressed_spectrum(&spec, &nodes)?;
    let wc = mode_frequency(&spec, spec.central_mode_index());
    let [lo, mid, hi] = s.principal;
    let to_mhz = |w: f64| (w - wc) / (2.0 * PI * 1e6);
    Ok(vec![
        ("lower_mhz", Cell::F(to_mhz(s.frequencies[lo]))),
        ("central_mhz", Cell::F(to_mhz(s.frequencies[mid]))),
        ("upper_mhz", Cell::F(to_mhz(s.frequencies[hi]))),
        ("weight1_lower", Cell::F(s.weight_1[lo])),
        ("weight1_central", Cell::F(s.weight_1[mid])),
        ("weight1_upper", Cell::F(s.weight_1[hi])),
    ])
}

fn lamb(p: &Params) -> Out {
    let spec = WaveguideSpec::standard(p.length);
    let node = NodeSpec::resonant(&spec, p.kappa);
    let lam = lamb_shift(&spec, &node)?;
    let fsr = free_spectral_range(&spec, spec.center_frequency)?;
    Ok(vec![
        ("lambda_rad_s", Cell::F(lam)),
        ("lambda_over_kappa", Cell::F(lam / p.kappa)),
        ("fsr_over_kappa", Cell::F(fsr / p.kappa)),
    ])
}
