//! Coherent states `|c₊, c₋⟩`, simultaneous eigenvectors of `a₊` and `a₋`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{expectation_and_variance, observable_matrices, FockBasis, StateVector};
use crate::oscillator::{effective_params, energy_modes, ModeOccupation, OscillatorParams};

/// Combined Poisson tail mass allowed when truncating a coherent state.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherentAmplitudes {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl CoherentAmplitudes {
    pub fn new(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        for (name, c) in [("c_plus", c_plus), ("c_minus", c_minus)] {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
            // e^{-|c|²} underflows past this
            if c.norm_sqr() > 700.0 {
                return Err(Error::InvalidParameter(format!(
                    "|{name}|² = {} is too large to truncate",
                    c.norm_sqr()
                )));
            }
        }
        Ok(CoherentAmplitudes { c_plus, c_minus })
    }
}

/// `Σ_{k > n} e^{−x} x^k / k!`.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    poisson_tails(mean, n).get(n).copied().unwrap_or(0.0)
}

/// Tail masses `T(0), T(1), …` up to at least `min_len` entries; the vector
/// stops early only once the tail is exactly zero in `f64`.
fn poisson_tails(mean: f64, min_len: usize) -> Vec<f64> {
    if mean == 0.0 {
        return vec![0.0; min_len + 1];
    }
    let ln_mean = mean.ln();
    let mut terms = Vec::new();
    let mut ln_fact = 0.0;
    let mut k = 0usize;
    loop {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let term = (k as f64 * ln_mean - mean - ln_fact).exp();
        terms.push(term);
        if k as f64 > mean && (term == 0.0 || term < 1e-40) && k > min_len {
            break;
        }
        k += 1;
    }
    // suffix sums, smallest terms first
    let mut tails = vec![0.0; terms.len()];
    let mut acc = 0.0;
    for k in (0..terms.len()).rev() {
        tails[k] = acc;
        acc += terms[k];
    }
    tails
}

/// Smallest cutoff whose discarded tail is below `tol` in both modes.
pub fn cutoff_for_tolerance(c: &CoherentAmplitudes, tol: f64) -> usize {
    let single = |z: Complex64| {
        let tails = poisson_tails(z.norm_sqr(), 0);
        tails.iter().position(|&t| t < tol).unwrap_or(tails.len())
    };
    single(c.c_plus).max(single(c.c_minus))
}

/// `1 − ‖|c⟩‖²` of the truncated, unnormalized state.
pub fn truncated_norm_defect(c: &CoherentAmplitudes, cutoff: usize) -> f64 {
    let tp = poisson_tail(c.c_plus.norm_sqr(), cutoff);
    let tm = poisson_tail(c.c_minus.norm_sqr(), cutoff);
    tp + tm - tp * tm
}

/// Cutoff needed by [`coherent_vector`].
pub fn required_cutoff(c: &CoherentAmplitudes) -> usize {
    cutoff_for_tolerance(c, 0.5 * DEFAULT_TAIL_TOLERANCE)
}

fn mode_amplitudes(c: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut amp = Complex64::new((-0.5 * c.norm_sqr()).exp(), 0.0);
    amps.push(amp);
    for n in 1..=cutoff {
        amp = amp * c / (n as f64).sqrt();
        amps.push(amp);
    }
    amps
}

/// `Σ c₊^{n₊} c₋^{n₋} e^{−(|c₊|²+|c₋|²)/2} / √(n₊! n₋!) |n₊, n₋⟩`, renormalized
/// after truncation.
pub fn coherent_vector(basis: FockBasis, c: &CoherentAmplitudes) -> Result<StateVector> {
    let required = required_cutoff(c);
    if basis.cutoff() < required {
        return Err(Error::Truncation {
            cutoff: basis.cutoff(),
            required,
        });
    }
    let plus = mode_amplitudes(c.c_plus, basis.cutoff());
    let minus = mode_amplitudes(c.c_minus, basis.cutoff());
    let amplitudes = basis
        .occupations()
        .map(|occ| plus[occ.n_plus] * minus[occ.n_minus])
        .collect();
    StateVector::from_amplitudes(basis, amplitudes)?.normalized()
}

/// Matrix-computed moments of a coherent state next to their closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentReport {
    pub var_x1: f64,
    pub var_x2: f64,
    pub var_p1: f64,
    pub var_p2: f64,
    pub product_1: f64,
    pub product_2: f64,
    pub mean_l: f64,
    pub var_l: f64,
    pub mean_h: f64,
    /// `|⟨H⟩ − (E₀₀ + (Ω_f/ħ)(ΔL)² + (M_fΩ_f² f/2ħ)⟨L⟩)|`.
    pub identity_residual: f64,
    /// Interior norm of `a₊|c⟩ − c₊|c⟩`.
    pub eigen_residual_plus: f64,
    pub eigen_residual_minus: f64,
    pub target_var_x: f64,
    pub target_var_p: f64,
    pub target_mean_l: f64,
    pub target_var_l: f64,
}

pub fn coherent_moments(
    p: &OscillatorParams,
    f: f64,
    basis: FockBasis,
    c: &CoherentAmplitudes,
) -> Result<CoherentReport> {
    let state = coherent_vector(basis, c)?;
    let set = observable_matrices(p, f, basis);
    let eff = effective_params(p, f);
    let hbar = p.hbar;

    let variance = |op| expectation_and_variance(op, &state).map(|(_, v)| v);
    let var_x1 = variance(&set.x1)?;
    let var_x2 = variance(&set.x2)?;
    let var_p1 = variance(&set.p1)?;
    let var_p2 = variance(&set.p2)?;
    let (mean_l, var_l) = expectation_and_variance(&set.angular_momentum, &state)?;
    let (mean_h, _) = expectation_and_variance(&set.h_xp, &state)?;
    let mean_l = mean_l.re;
    let mean_h = mean_h.re;

    let ground = energy_modes(p, f, ModeOccupation::default());
    let predicted = ground
        + eff.omega_f / hbar * var_l
        + eff.mass_f * eff.omega_f * eff.omega_f * f / (2.0 * hbar) * mean_l;

    let eigen_residual = |op: &crate::fock::FockOperator, value: Complex64| {
        op.apply(&state)
            .and_then(|lowered| lowered.interior_distance(&state.scale(value)))
    };

    let mu = eff.mass_omega();
    let (np, nm) = (c.c_plus.norm_sqr(), c.c_minus.norm_sqr());
    Ok(CoherentReport {
        var_x1,
        var_x2,
        var_p1,
        var_p2,
        product_1: var_x1 * var_p1,
        product_2: var_x2 * var_p2,
        mean_l,
        var_l,
        mean_h,
        identity_residual: (mean_h - predicted).abs(),
        eigen_residual_plus: eigen_residual(&set.a_plus, c.c_plus)?,
        eigen_residual_minus: eigen_residual(&set.a_minus, c.c_minus)?,
        target_var_x: hbar / (2.0 * mu),
        target_var_p: hbar * mu / 2.0,
        target_mean_l: hbar * (nm - np),
        target_var_l: hbar * hbar * (nm + np),
    })
}
