//! Operators of the model as dense matrices on a truncated two-mode Fock
//! basis `|n₊, n₋⟩`, `0 ≤ n± ≤ N_max`.
//!
//! Identities such as `[a, a†] = 1` fail on the cutoff row and column of a
//! truncated basis; checks are made on the *interior*, the states with both
//! occupations at most `N_max − 1`, where products of two ladder operators
//! are exact.
//!
//! Mode orientation: with `b_j = (√μ x_j + i p_j/√μ)/√(2ħ)` and `μ = M_f Ω_f`
//! the lowering operators are `a_± = −i(b₁ ∓ i b₂)/√2`. In this orientation the
//! Hamiltonian assembled from `x̂, p̂` equals `ħΩ₊(N̂₊ + ½) + ħΩ₋(N̂₋ + ½)`, and
//! the spectral label `L̂ = ħ(N̂₋ − N̂₊)` equals `x̂₂p̂₁ − x̂₁p̂₂`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{effective_params, ModeOccupation, OscillatorParams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated two-mode occupation basis, flat index `n₊·(N_max+1) + n₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockBasis {
    cutoff: usize,
}

impl FockBasis {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidParameter(
                "Fock cutoff must be at least 1".into(),
            ));
        }
        Ok(FockBasis { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    pub fn index(&self, occ: ModeOccupation) -> Result<usize> {
        if occ.n_plus > self.cutoff || occ.n_minus > self.cutoff {
            return Err(Error::OutOfRange {
                n_plus: occ.n_plus,
                n_minus: occ.n_minus,
                cutoff: self.cutoff,
            });
        }
        Ok(occ.n_plus * (self.cutoff + 1) + occ.n_minus)
    }

    pub fn occupation(&self, index: usize) -> ModeOccupation {
        let side = self.cutoff + 1;
        ModeOccupation::new(index / side, index % side)
    }

    pub fn is_interior(&self, index: usize) -> bool {
        let occ = self.occupation(index);
        occ.n_plus < self.cutoff && occ.n_minus < self.cutoff
    }

    pub fn occupations(&self) -> impl Iterator<Item = ModeOccupation> + '_ {
        (0..self.dim()).map(|i| self.occupation(i))
    }

    fn check_same(&self, other: &FockBasis) -> Result<()> {
        if self != other {
            return Err(Error::BasisMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }
}

/// Dense complex matrix on a [`FockBasis`], row-major.
#[derive(Clone, PartialEq)]
pub struct FockOperator {
    basis: FockBasis,
    data: Vec<Complex64>,
    label: String,
}

impl fmt::Debug for FockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockOperator")
            .field("label", &self.label)
            .field("cutoff", &self.basis.cutoff)
            .finish_non_exhaustive()
    }
}

impl FockOperator {
    pub fn zeros(basis: FockBasis, label: impl Into<String>) -> Self {
        let n = basis.dim();
        FockOperator {
            basis,
            data: vec![ZERO; n * n],
            label: label.into(),
        }
    }

    pub fn identity(basis: FockBasis) -> Self {
        Self::from_diagonal(basis, "1", |_| 1.0)
    }

    /// Diagonal operator with entry `value(occupation)`.
    pub fn from_diagonal(
        basis: FockBasis,
        label: impl Into<String>,
        value: impl Fn(ModeOccupation) -> f64,
    ) -> Self {
        let mut op = Self::zeros(basis, label);
        for i in 0..basis.dim() {
            op.set(i, i, Complex64::new(value(basis.occupation(i)), 0.0));
        }
        op
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let n = self.dim();
        self.data[row * n + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut out = Self::zeros(self.basis, format!("{}†", self.label));
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        FockOperator {
            basis: self.basis,
            data: self.data.iter().map(|z| z * factor).collect(),
            label: self.label.clone(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    fn zip_with(
        &self,
        other: &Self,
        label: String,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.basis.check_same(&other.basis)?;
        Ok(FockOperator {
            basis: self.basis,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| op(*a, *b))
                .collect(),
            label,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(
            other,
            format!("{} + {}", self.label, other.label),
            |a, b| a + b,
        )
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(
            other,
            format!("{} - {}", self.label, other.label),
            |a, b| a - b,
        )
    }

    /// Matrix product. Zero entries of `self` are skipped, so products with
    /// ladder-built operators cost `O(dim² · nnz/row)`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.basis.check_same(&other.basis)?;
        let n = self.dim();
        let mut out = Self::zeros(self.basis, format!("{}·{}", self.label, other.label));
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, a) in row.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (c, b) in out_row.iter_mut().zip(b_row) {
                    *c += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        self.basis.check_same(&s.basis)?;
        Ok(StateVector {
            basis: self.basis,
            amplitudes: self.apply_slice(&s.amplitudes),
        })
    }

    fn apply_slice(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        self.data
            .chunks_exact(n)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij|` with both `i` and `j` interior states.
    pub fn interior_max_abs(&self) -> f64 {
        let n = self.dim();
        let interior: Vec<usize> = (0..n).filter(|&i| self.basis.is_interior(i)).collect();
        let mut worst: f64 = 0.0;
        for &i in &interior {
            for &j in &interior {
                worst = worst.max(self.data[i * n + j].norm());
            }
        }
        worst
    }

    /// `max |A − A†|`.
    pub fn self_adjoint_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;

    fn add(self, rhs: &FockOperator) -> FockOperator {
        self.try_add(rhs).expect("operator basis mismatch")
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self.try_sub(rhs).expect("operator basis mismatch")
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        self.try_mul(rhs).expect("operator basis mismatch")
    }
}

impl Mul<&FockOperator> for f64 {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        rhs.scale_real(self)
    }
}

impl Mul<&FockOperator> for Complex64 {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        rhs.scale(self)
    }
}

/// Complex amplitude vector on a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: FockBasis,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(basis: FockBasis) -> Self {
        StateVector {
            basis,
            amplitudes: vec![ZERO; basis.dim()],
        }
    }

    pub fn from_amplitudes(basis: FockBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "state has {} amplitudes, basis dimension is {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: ModeOccupation) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.index(occ)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        StateVector {
            basis: self.basis,
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.basis.check_same(&other.basis)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.basis.check_same(&other.basis)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Norm of `self − other` restricted to interior states.
    pub fn interior_distance(&self, other: &StateVector) -> Result<f64> {
        self.basis.check_same(&other.basis)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .enumerate()
            .filter(|(i, _)| self.basis.is_interior(*i))
            .map(|(_, (a, b))| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Two-mode lowering operators `(a₊, a₋)`.
pub fn ladder_matrices(basis: FockBasis) -> (FockOperator, FockOperator) {
    let mut a_plus = FockOperator::zeros(basis, "a+");
    let mut a_minus = FockOperator::zeros(basis, "a-");
    for (col, occ) in basis.occupations().enumerate() {
        if occ.n_plus > 0 {
            let row = basis
                .index(ModeOccupation::new(occ.n_plus - 1, occ.n_minus))
                .unwrap();
            a_plus.set(row, col, Complex64::new((occ.n_plus as f64).sqrt(), 0.0));
        }
        if occ.n_minus > 0 {
            let row = basis
                .index(ModeOccupation::new(occ.n_plus, occ.n_minus - 1))
                .unwrap();
            a_minus.set(row, col, Complex64::new((occ.n_minus as f64).sqrt(), 0.0));
        }
    }
    (a_plus, a_minus)
}

/// Every operator of the model at one twist value `f`.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub a_plus: FockOperator,
    pub a_minus: FockOperator,
    pub number_plus: FockOperator,
    pub number_minus: FockOperator,
    pub x1: FockOperator,
    pub x2: FockOperator,
    pub p1: FockOperator,
    pub p2: FockOperator,
    /// Bopp-shifted noncommuting coordinates.
    pub xbar1: FockOperator,
    pub xbar2: FockOperator,
    /// `ħ(N̂₋ − N̂₊)`, the angular momentum labelling the spectrum.
    pub angular_momentum: FockOperator,
    /// `x̂₁p̂₂ − x̂₂p̂₁` assembled from the coordinate matrices.
    pub orbital_xp: FockOperator,
    /// `p̂²/2M_f + M_fΩ_f²x̂²/2 − (f mω²/2ħ)(x̂₁p̂₂ − x̂₂p̂₁)`.
    pub h_xp: FockOperator,
    /// `ħΩ₊(N̂₊ + ½) + ħΩ₋(N̂₋ + ½)`.
    pub h_ladder: FockOperator,
}

pub fn observable_matrices(p: &OscillatorParams, f: f64, basis: FockBasis) -> ObservableSet {
    let eff = effective_params(p, f);
    let hbar = p.hbar;
    let mu = eff.mass_omega();
    let (a_plus, a_minus) = ladder_matrices(basis);
    let ad_plus = a_plus.adjoint();
    let ad_minus = a_minus.adjoint();

    let frac = std::f64::consts::FRAC_1_SQRT_2;
    // b₁ = i(a₊ + a₋)/√2, b₂ = (a₋ − a₊)/√2
    let b1 = Complex64::new(0.0, frac) * &(&a_plus + &a_minus);
    let b2 = frac * &(&a_minus - &a_plus);
    let x_scale = (hbar / (2.0 * mu)).sqrt();
    let p_scale = Complex64::new(0.0, -(hbar * mu / 2.0).sqrt());
    let position = |b: &FockOperator| x_scale * &(b + &b.adjoint());
    let momentum = |b: &FockOperator| p_scale * &(b - &b.adjoint());

    let x1 = position(&b1).with_label("x1");
    let x2 = position(&b2).with_label("x2");
    let p1 = momentum(&b1).with_label("p1");
    let p2 = momentum(&b2).with_label("p2");

    let shift = f / (2.0 * hbar);
    let xbar1 = (&x1 - &(shift * &p2)).with_label("xbar1");
    let xbar2 = (&x2 + &(shift * &p1)).with_label("xbar2");

    let number_plus = (&ad_plus * &a_plus).with_label("N+");
    let number_minus = (&ad_minus * &a_minus).with_label("N-");
    let angular_momentum = (hbar * &(&number_minus - &number_plus)).with_label("L");
    let orbital_xp = (&(&x1 * &p2) - &(&x2 * &p1)).with_label("x1p2-x2p1");

    let kinetic = (0.5 / eff.mass_f) * &(&(&p1 * &p1) + &(&p2 * &p2));
    let potential = (0.5 * p.stiffness()) * &(&(&x1 * &x1) + &(&x2 * &x2));
    let rotation = (f * p.stiffness() / (2.0 * hbar)) * &orbital_xp;
    let h_xp = (&(&kinetic + &potential) - &rotation).with_label("H_xp");

    let h_ladder = FockOperator::from_diagonal(basis, "H_ladder", |occ| {
        hbar * (eff.omega_plus * (occ.n_plus as f64 + 0.5)
            + eff.omega_minus * (occ.n_minus as f64 + 0.5))
    });

    ObservableSet {
        a_plus,
        a_minus,
        number_plus,
        number_minus,
        x1,
        x2,
        p1,
        p2,
        xbar1,
        xbar2,
        angular_momentum,
        orbital_xp,
        h_xp,
        h_ladder,
    }
}

/// Unit vector `|n₊, n₋⟩`.
pub fn fock_state(basis: FockBasis, occ: ModeOccupation) -> Result<StateVector> {
    let index = basis.index(occ)?;
    let mut s = StateVector::zeros(basis);
    s.amplitudes[index] = ONE;
    Ok(s)
}

/// `(a₊†)^{n₊}(a₋†)^{n₋}|0⟩/√(n₊! n₋!)` by repeated application of the raising
/// operators.
pub fn fock_state_by_raising(basis: FockBasis, occ: ModeOccupation) -> Result<StateVector> {
    basis.index(occ)?;
    let (a_plus, a_minus) = ladder_matrices(basis);
    let (up_plus, up_minus) = (a_plus.adjoint(), a_minus.adjoint());
    let mut s = fock_state(basis, ModeOccupation::default())?;
    for k in 1..=occ.n_minus {
        s = up_minus
            .apply(&s)?
            .scale(Complex64::new(1.0 / (k as f64).sqrt(), 0.0));
    }
    for k in 1..=occ.n_plus {
        s = up_plus
            .apply(&s)?
            .scale(Complex64::new(1.0 / (k as f64).sqrt(), 0.0));
    }
    Ok(s)
}

/// `AB − BA`.
pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    Ok(ab
        .try_sub(&ba)?
        .with_label(format!("[{}, {}]", a.label, b.label)))
}

/// Interior max deviation of `[A, B]` from `target`.
pub fn commutator_deviation(
    a: &FockOperator,
    b: &FockOperator,
    target: &FockOperator,
) -> Result<f64> {
    Ok(commutator(a, b)?.try_sub(target)?.interior_max_abs())
}

const NORM_TOLERANCE: f64 = 1e-12;

/// `(⟨s|A|s⟩, ⟨s|A²|s⟩ − ⟨s|A|s⟩²)`; the variance is the real part.
pub fn expectation_and_variance(op: &FockOperator, s: &StateVector) -> Result<(Complex64, f64)> {
    let norm = s.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let once = op.apply(s)?;
    let twice = op.apply(&once)?;
    let mean = s.inner(&once)?;
    let second = s.inner(&twice)?;
    Ok((mean, (second - mean * mean).re))
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub state: StateVector,
    /// `⟨N̂₋ − N̂₊⟩`, the angular momentum in units of `ħ`; breaks ties.
    pub azimuthal: f64,
}

/// Eigenpairs of `H` restricted to the shells `n₊ + n₋ ≤ shell_cap`, ascending
/// by value and then by angular momentum.
pub fn diagonalize_interior(h: &FockOperator, shell_cap: usize) -> Result<Vec<Eigenpair>> {
    let basis = h.basis();
    if 2 * shell_cap > basis.cutoff() {
        return Err(Error::InvalidParameter(format!(
            "shell cap {shell_cap} exceeds half the cutoff {}",
            basis.cutoff()
        )));
    }
    let scale = h.max_abs().max(1.0);
    let deviation = h.self_adjoint_deviation();
    if deviation > 1e-12 * scale {
        return Err(Error::NotSelfAdjoint(deviation));
    }

    let kept: Vec<usize> = (0..basis.dim())
        .filter(|&i| basis.occupation(i).total() <= shell_cap)
        .collect();
    let block = DMatrix::from_fn(kept.len(), kept.len(), |r, c| h.get(kept[r], kept[c]));
    let eig = block.symmetric_eigen();

    let mut pairs: Vec<Eigenpair> = (0..kept.len())
        .map(|k| {
            let mut state = StateVector::zeros(basis);
            let mut azimuthal = 0.0;
            for (r, &i) in kept.iter().enumerate() {
                let amp = eig.eigenvectors[(r, k)];
                state.amplitudes[i] = amp;
                let occ = basis.occupation(i);
                azimuthal += amp.norm_sqr() * (occ.n_minus as f64 - occ.n_plus as f64);
            }
            Eigenpair {
                value: eig.eigenvalues[k],
                state,
                azimuthal,
            }
        })
        .collect();

    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    // Re-sort runs of (numerically) degenerate values by angular momentum.
    let mut start = 0;
    while start < pairs.len() {
        let tie = 1e-9 * pairs[start].value.abs().max(1.0);
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].value - pairs[start].value <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| a.azimuthal.total_cmp(&b.azimuthal));
        start = end;
    }
    Ok(pairs)
}
