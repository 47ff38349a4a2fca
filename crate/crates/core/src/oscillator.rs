//! Closed-form results for the deformed oscillator at a fixed twist value `f`.
//!
//! All energies carry `ħ` explicitly: `E = ħΩ₊(n₊ + ½) + ħΩ₋(n₋ + ½)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bare physical constants: mass `m`, frequency `ω`, and `ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega", omega), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(OscillatorParams { mass, omega, hbar })
    }

    /// `ħ = m = ω = 1`.
    pub fn natural() -> Self {
        OscillatorParams {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }

    /// `mω²`, conserved by the deformation.
    pub fn stiffness(&self) -> f64 {
        self.mass * self.omega * self.omega
    }
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// Effective commutative-oscillator parameters after the Bopp shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub f: f64,
    pub mass_f: f64,
    pub omega_f: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl EffectiveParams {
    /// `M_f Ω_f`, the length scale of the ladder operators.
    pub fn mass_omega(&self) -> f64 {
        self.mass_f * self.omega_f
    }

    /// `f·M_f·Ω_f²/2`, the coefficient of `l` in the spectrum.
    pub fn split_coefficient(&self) -> f64 {
        0.5 * self.f * self.mass_f * self.omega_f * self.omega_f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ModeOccupation {
    pub n_plus: usize,
    pub n_minus: usize,
}

impl ModeOccupation {
    pub fn new(n_plus: usize, n_minus: usize) -> Self {
        ModeOccupation { n_plus, n_minus }
    }

    pub fn total(&self) -> usize {
        self.n_plus + self.n_minus
    }

    /// Main and azimuthal labels `n = n₊ + n₋`, `l = n₋ − n₊`.
    pub fn quantum_numbers(&self) -> QuantumNumbers {
        QuantumNumbers {
            n: self.total() as u32,
            l: self.n_minus as i32 - self.n_plus as i32,
        }
    }
}

/// Main (`n`) and azimuthal (`l`) quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    n: u32,
    l: i32,
}

impl QuantumNumbers {
    pub fn new(n: i64, l: i64) -> Result<Self> {
        if n < 0 || l.abs() > n || (n - l).rem_euclid(2) != 0 || n > u32::MAX as i64 / 2 {
            return Err(Error::QuantumNumbers { n, l });
        }
        Ok(QuantumNumbers {
            n: n as u32,
            l: l as i32,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    /// `(n₊, n₋) = ((n − l)/2, (n + l)/2)`.
    pub fn modes(&self) -> ModeOccupation {
        let n = self.n as i64;
        let l = self.l as i64;
        ModeOccupation {
            n_plus: ((n - l) / 2) as usize,
            n_minus: ((n + l) / 2) as usize,
        }
    }
}

pub fn effective_params(p: &OscillatorParams, f: f64) -> EffectiveParams {
    let g = p.mass * p.omega * f / (2.0 * p.hbar);
    let s = 1.0 + g * g;
    let mass_f = p.mass / s;
    let omega_f = p.omega * s.sqrt();
    // Ω± = Ω_f ∓ f·mω²/2ħ. The smaller one is formed from Ω₊Ω₋ = ω² to avoid
    // cancellation at large |f|.
    let shift = g * p.omega;
    let big = omega_f + shift.abs();
    let small = p.omega * p.omega / big;
    let (omega_plus, omega_minus) = if shift >= 0.0 {
        (small, big)
    } else {
        (big, small)
    };
    EffectiveParams {
        f,
        mass_f,
        omega_f,
        omega_plus,
        omega_minus,
    }
}

/// `ħΩ₊(n₊ + ½) + ħΩ₋(n₋ + ½)`.
pub fn energy_modes(p: &OscillatorParams, f: f64, occ: ModeOccupation) -> f64 {
    let e = effective_params(p, f);
    p.hbar * (e.omega_plus * (occ.n_plus as f64 + 0.5) + e.omega_minus * (occ.n_minus as f64 + 0.5))
}

/// Same spectrum in the `ħΩ_f(n₊ + n₋ + 1) + (f M_f Ω_f²/2)(n₋ − n₊)` form.
pub fn energy_modes_split(p: &OscillatorParams, f: f64, occ: ModeOccupation) -> f64 {
    let qn = occ.quantum_numbers();
    level_energy(p, &effective_params(p, f), qn.n as f64 + 1.0, qn.l)
}

pub fn energy_nl(p: &OscillatorParams, f: f64, qn: QuantumNumbers) -> f64 {
    level_energy(p, &effective_params(p, f), qn.n as f64 + 1.0, qn.l)
}

pub(crate) fn level_energy(p: &OscillatorParams, e: &EffectiveParams, curly: f64, l: i32) -> f64 {
    p.hbar * e.omega_f * curly + e.split_coefficient() * l as f64
}

/// `{−n, −n+2, …, n}`.
pub fn allowed_azimuthal(n: u32) -> Vec<i32> {
    let n = n as i32;
    (0..=n).map(|k| -n + 2 * k).collect()
}

/// All `(n, l)` pairs with `n ≤ n_max`, ordered by `n` then `l`.
pub fn levels_up_to(n_max: u32) -> Vec<QuantumNumbers> {
    (0..=n_max)
        .flat_map(|n| {
            allowed_azimuthal(n)
                .into_iter()
                .map(move |l| QuantumNumbers { n, l })
        })
        .collect()
}

/// `(Δx_i)²(Δp_i)²` in the eigenstate `|n₊, n₋⟩`.
pub fn eigenstate_uncertainty_product(p: &OscillatorParams, occ: ModeOccupation) -> f64 {
    let k = 1.0 + occ.total() as f64;
    0.25 * p.hbar * p.hbar * k * k
}

/// `ħ(n₋ − n₊)`.
pub fn angular_momentum_eigenvalue(p: &OscillatorParams, occ: ModeOccupation) -> f64 {
    p.hbar * (occ.n_minus as f64 - occ.n_plus as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn undeformed_params() {
        let e = effective_params(&OscillatorParams::natural(), 0.0);
        assert_eq!(
            (e.mass_f, e.omega_f, e.omega_plus, e.omega_minus),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn deformed_params_f2() {
        let e = effective_params(&OscillatorParams::natural(), 2.0);
        assert!((e.mass_f - 0.5).abs() < 1e-15);
        assert!((e.omega_f - SQRT2).abs() < 1e-15);
        assert!((e.omega_plus - (SQRT2 - 1.0)).abs() < 1e-15);
        assert!((e.omega_minus - (SQRT2 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_twist_swaps_modes() {
        let p = OscillatorParams::natural();
        let a = effective_params(&p, 2.0);
        let b = effective_params(&p, -2.0);
        assert_eq!(a.omega_plus, b.omega_minus);
        assert_eq!(a.omega_minus, b.omega_plus);
    }

    #[test]
    fn mode_energies() {
        let p = OscillatorParams::natural();
        assert!((energy_modes(&p, 2.0, ModeOccupation::new(0, 0)) - SQRT2).abs() < 1e-14);
        assert!(
            (energy_modes(&p, 2.0, ModeOccupation::new(1, 0)) - (2.0 * SQRT2 - 1.0)).abs() < 1e-14
        );
        for a in 0..5 {
            for b in 0..5 {
                let e = energy_modes(&p, 0.0, ModeOccupation::new(a, b));
                assert_eq!(e, (a + b + 1) as f64);
            }
        }
    }

    #[test]
    fn nl_energies() {
        let p = OscillatorParams::natural();
        let qn = QuantumNumbers::new(1, -1).unwrap();
        assert!((energy_nl(&p, 2.0, qn) - (2.0 * SQRT2 - 1.0)).abs() < 1e-14);
        assert_eq!(qn.modes(), ModeOccupation::new(1, 0));
        for l in [-3, -1, 1, 3] {
            let qn = QuantumNumbers::new(3, l).unwrap();
            assert_eq!(energy_nl(&p, 0.0, qn), 4.0);
        }
    }

    #[test]
    fn parity_violation_rejected() {
        assert_eq!(
            QuantumNumbers::new(1, 0),
            Err(Error::QuantumNumbers { n: 1, l: 0 })
        );
        assert!(QuantumNumbers::new(2, 4).is_err());
        assert!(QuantumNumbers::new(-1, -1).is_err());
        assert!(QuantumNumbers::new(3, -3).is_ok());
    }

    #[test]
    fn azimuthal_sets() {
        assert_eq!(allowed_azimuthal(0), vec![0]);
        assert_eq!(allowed_azimuthal(2), vec![-2, 0, 2]);
        assert_eq!(allowed_azimuthal(3), vec![-3, -1, 1, 3]);
        assert_eq!(levels_up_to(1).len(), 3);
        assert_eq!(levels_up_to(4).len(), 15);
    }

    #[test]
    fn uncertainty_products() {
        let one = OscillatorParams::natural();
        let two = OscillatorParams::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(
            eigenstate_uncertainty_product(&one, ModeOccupation::new(0, 0)),
            0.25
        );
        assert_eq!(
            eigenstate_uncertainty_product(&one, ModeOccupation::new(1, 1)),
            2.25
        );
        assert_eq!(
            eigenstate_uncertainty_product(&two, ModeOccupation::new(0, 0)),
            1.0
        );
    }

    #[test]
    fn angular_momentum() {
        let p = OscillatorParams::new(1.0, 1.0, 0.7).unwrap();
        assert_eq!(
            angular_momentum_eigenvalue(&p, ModeOccupation::new(0, 1)),
            0.7
        );
        assert_eq!(
            angular_momentum_eigenvalue(&p, ModeOccupation::new(2, 2)),
            0.0
        );
        let one = OscillatorParams::natural();
        assert_eq!(
            angular_momentum_eigenvalue(&one, ModeOccupation::new(3, 0)),
            -3.0
        );
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(OscillatorParams::new(0.0, 1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, -1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    fn params() -> impl Strategy<Value = OscillatorParams> {
        (0.05..20.0f64, 0.05..20.0f64, 0.05..20.0f64)
            .prop_map(|(m, w, h)| OscillatorParams::new(m, w, h).unwrap())
    }

    proptest! {
        #[test]
        fn effective_invariants(p in params(), f in -1.0e3..1.0e3f64) {
            let e = effective_params(&p, f);
            prop_assert!(rel(e.mass_f * e.omega_f * e.omega_f, p.stiffness()) < 1e-14);
            prop_assert!(rel(e.omega_plus + e.omega_minus, 2.0 * e.omega_f) < 1e-14);
            prop_assert!(rel(e.omega_plus * e.omega_minus, p.omega * p.omega) < 1e-14);
            prop_assert!(e.omega_plus > 0.0 && e.omega_minus > 0.0);
        }

        #[test]
        fn spectrum_labelings_agree(p in params(), f in -10.0..10.0f64, n in 0i64..30, k in 0i64..30) {
            let l = -n + 2 * (k % (n + 1));
            let qn = QuantumNumbers::new(n, l).unwrap();
            let a = energy_nl(&p, f, qn);
            let b = energy_modes(&p, f, qn.modes());
            let c = energy_modes_split(&p, f, qn.modes());
            prop_assert!(rel(a, b) < 1e-13);
            prop_assert!(rel(a, c) < 1e-14);
            prop_assert_eq!(qn.modes().quantum_numbers(), qn);
        }

        #[test]
        fn deformation_split(p in params(), f in 0.0..10.0f64) {
            let d = energy_modes(&p, f, ModeOccupation::new(0, 1))
                - energy_modes(&p, f, ModeOccupation::new(1, 0));
            let scale = energy_modes(&p, f, ModeOccupation::new(0, 1));
            prop_assert!((d - f * p.stiffness()).abs() <= 1e-13 * scale);
        }

        #[test]
        fn azimuthal_symmetric(n in 0u32..200) {
            let ls = allowed_azimuthal(n);
            prop_assert_eq!(ls.len(), n as usize + 1);
            let mut neg: Vec<i32> = ls.iter().map(|l| -l).collect();
            neg.reverse();
            prop_assert_eq!(neg, ls);
        }
    }
}
