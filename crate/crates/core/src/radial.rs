//! Polar-coordinate route: explicit radial polynomials and a finite-difference
//! solve of the dimensionless radial equation
//!
//! ```text
//! −R'' − R'/ρ + (l²/ρ² + ρ²/4) R = ℰ R,
//! ```
//!
//! whose square-integrable solutions are `R = w(ρ) e^{−ρ²/4}` with `ℰ = n + 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oscillator::{effective_params, level_energy, OscillatorParams, QuantumNumbers};

/// Polynomial part `w(ρ) = a·(Σ_k c_k ρ^{2k})·ρ^{|l|}` of a bound radial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub n: u32,
    pub l: i32,
    /// Coefficients of `ρ^{2k}`, `k = 0 … (n − |l|)/2`.
    pub coeffs: Vec<f64>,
    pub norm: f64,
}

/// Unnormalized coefficients, `c_0 = 1` and
/// `c_k = Π_{s=1}^{k} (n + 2 − (2s + |l|)) / (l² − (2s + |l|)²)`.
pub fn radial_polynomial_coeffs(n: i64, l: i64) -> Result<RadialSolution> {
    let qn = QuantumNumbers::new(n, l)?;
    let (n, l) = (qn.n(), qn.l());
    let abs_l = l.unsigned_abs() as f64;
    let l2 = abs_l * abs_l;
    let terms = (n - l.unsigned_abs()) / 2;
    let mut coeffs = Vec::with_capacity(terms as usize + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for s in 1..=terms {
        let q = 2.0 * s as f64 + abs_l;
        c *= (n as f64 + 2.0 - q) / (l2 - q * q);
        coeffs.push(c);
    }
    Ok(RadialSolution {
        n,
        l,
        coeffs,
        norm: 1.0,
    })
}

impl RadialSolution {
    fn abs_l(&self) -> i32 {
        self.l.abs()
    }

    /// `(w, w', w'')` at `rho`, without the normalization factor.
    fn polynomial(&self, rho: f64) -> (f64, f64, f64) {
        let (mut w, mut dw, mut d2w) = (0.0, 0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let p = 2 * k as i32 + self.abs_l();
            let pf = p as f64;
            w += c * rho.powi(p);
            if p >= 1 {
                dw += c * pf * rho.powi(p - 1);
            }
            if p >= 2 {
                d2w += c * pf * (pf - 1.0) * rho.powi(p - 2);
            }
        }
        (w, dw, d2w)
    }

    /// Degree of `w` in `ρ`.
    pub fn degree(&self) -> u32 {
        self.abs_l() as u32 + 2 * (self.coeffs.len() as u32 - 1)
    }

    /// `R(ρ) = a·w(ρ)·e^{−ρ²/4}`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.norm * self.polynomial(rho).0 * (-0.25 * rho * rho).exp()
    }

    /// Rescales `a` so that `∫₀^∞ R² ρ dρ = 1`.
    pub fn normalized(&self) -> RadialSolution {
        let unit = RadialSolution {
            norm: 1.0,
            ..self.clone()
        };
        let mass = radial_inner(&unit, &unit);
        RadialSolution {
            norm: 1.0 / mass.sqrt(),
            ..unit
        }
    }

    /// Relative residual of the reduced equation
    /// `−w'' + ((ρ² − 1)/ρ) w' + (l²/ρ²) w − (ℰ − 1) w` with `ℰ = n + 1`:
    /// the largest absolute residual over the samples divided by the largest `|w|`.
    pub fn ode_residual(&self, rho_samples: &[f64]) -> Result<f64> {
        let curly = self.n as f64 + 1.0;
        let l2 = (self.l * self.l) as f64;
        let mut worst_residual: f64 = 0.0;
        let mut worst_w: f64 = 0.0;
        for &rho in rho_samples {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::Domain(format!(
                    "reduced radial equation is singular at rho = {rho}"
                )));
            }
            let (w, dw, d2w) = self.polynomial(rho);
            let r = -d2w + (rho * rho - 1.0) / rho * dw + l2 / (rho * rho) * w - (curly - 1.0) * w;
            worst_residual = worst_residual.max(r.abs());
            worst_w = worst_w.max(w.abs());
        }
        if worst_w == 0.0 {
            return Ok(worst_residual);
        }
        Ok(worst_residual / worst_w)
    }
}

pub fn eval_radial(sol: &RadialSolution, rho: f64) -> f64 {
    sol.eval(rho)
}

pub fn normalize_radial(sol: &RadialSolution) -> RadialSolution {
    sol.normalized()
}

pub fn ode_residual(sol: &RadialSolution, rho_samples: &[f64]) -> Result<f64> {
    sol.ode_residual(rho_samples)
}

/// `∫₀^∞ R_a R_b ρ dρ` by adaptive Simpson quadrature.
pub fn radial_inner(a: &RadialSolution, b: &RadialSolution) -> f64 {
    let degree = a.degree().max(b.degree()) as f64;
    // past this the Gaussian leaves nothing above 1e-30 of the peak
    let end = 2.0 * (degree + 1.0).sqrt() + 18.0;
    let g = |rho: f64| a.eval(rho) * b.eval(rho) * rho;
    // absolute tolerance from the scale of R_a² and R_b², so near-zero
    // overlaps do not chase an unreachable relative accuracy
    let scale = {
        let ga = |rho: f64| a.eval(rho).powi(2) * rho;
        let gb = |rho: f64| b.eval(rho).powi(2) * rho;
        (composite_simpson(&ga, 0.0, end, 2048) * composite_simpson(&gb, 0.0, end, 2048)).sqrt()
    };
    let panels = 64;
    let width = end / panels as f64;
    let tol = 1e-13 * scale / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (i as f64 * width, (i + 1) as f64 * width);
            adaptive_simpson(&g, lo, hi, tol, 24)
        })
        .sum()
}

fn composite_simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (g(a) + inner + g(b))
}

fn adaptive_simpson(g: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (g(a), g(m), g(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(g, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    g: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(g, a, m, fa, flm, fm, left, tol, depth - 1)
        + simpson_step(g, m, b, fm, frm, fb, right, tol, depth - 1)
}

/// Uniform grid on `(0, ρ_max]` with spacing `h = ρ_max/points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    rho_max: f64,
    points: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(rho_max: f64, points: usize) -> Result<Self> {
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho_max must be positive, got {rho_max}"
            )));
        }
        if points < Self::MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs at least {} points, got {points}",
                Self::MIN_POINTS
            )));
        }
        Ok(RadialGrid { rho_max, points })
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.rho_max / self.points as f64
    }

    pub fn refined(&self, factor: usize) -> RadialGrid {
        RadialGrid {
            rho_max: self.rho_max,
            points: self.points * factor,
        }
    }

    /// Cell centres `ρ_i = (i − ½)h`, `i = 1 … points`.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.points).map(|i| (i as f64 - 0.5) * h).collect()
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        RadialGrid {
            rho_max: 12.0,
            points: 2400,
        }
    }
}

/// Symmetric tridiagonal matrix for `u = √ρ R`: the flux form
/// `−(1/ρ)(ρR')'` on cell centres, symmetrized by `√ρ_i`. Dirichlet at `ρ_max`;
/// the face at `ρ = 0` carries zero flux.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

fn radial_operator(l: i32, grid: &RadialGrid) -> Tridiagonal {
    let h = grid.spacing();
    let h2 = h * h;
    let l2 = (l * l) as f64;
    let nodes = grid.nodes();
    let diag = nodes
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let (face_lo, face_hi) = (i as f64 * h, (i + 1) as f64 * h);
            (face_lo + face_hi) / (h2 * rho) + l2 / (rho * rho) + 0.25 * rho * rho
        })
        .collect();
    let off = nodes
        .windows(2)
        .enumerate()
        .map(|(i, w)| -((i + 1) as f64 * h) / (h2 * (w[0] * w[1]).sqrt()))
        .collect();
    Tridiagonal { diag, off }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1] / q
            };
            q = d - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − σ) y = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        // rows hold (sub, diag, super, super2)
        let mut sub: Vec<f64> = (0..n)
            .map(|i| if i > 0 { self.off[i - 1] } else { 0.0 })
            .collect();
        let mut dia: Vec<f64> = self.diag.iter().map(|d| d - sigma).collect();
        let mut sup: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { self.off[i] } else { 0.0 })
            .collect();
        let mut sup2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if sub[i + 1].abs() > dia[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut dia[i], &mut sub[i + 1]);
                std::mem::swap(&mut sup[i], &mut dia[i + 1]);
                std::mem::swap(&mut sup2[i], &mut sup[i + 1]);
                rhs.swap(i, i + 1);
            }
            let pivot = if dia[i] == 0.0 { f64::EPSILON } else { dia[i] };
            dia[i] = pivot;
            let m = sub[i + 1] / pivot;
            sub[i + 1] = 0.0;
            dia[i + 1] -= m * sup[i];
            sup[i + 1] -= m * sup2[i];
            rhs[i + 1] -= m * rhs[i];
        }
        if dia[n - 1] == 0.0 {
            dia[n - 1] = f64::EPSILON;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= sup[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= sup2[i] * y[i + 2];
            }
            y[i] = acc / dia[i];
        }
        y
    }
}

fn check_request(grid: &RadialGrid, count: usize) -> Result<()> {
    if count == 0 || count >= grid.points() {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue count must be in 1..{}, got {count}",
            grid.points()
        )));
    }
    Ok(())
}

/// Lowest `count` eigenvalues `ℰ` of the discretized radial operator for
/// azimuthal number `l`, ascending. Second-order accurate in `h`.
pub fn fd_spectrum(l: i32, grid: &RadialGrid, count: usize) -> Result<Vec<f64>> {
    check_request(grid, count)?;
    let t = radial_operator(l, grid);
    let bounds = t.gershgorin();
    Ok((0..count).map(|k| t.eigenvalue(k, bounds)).collect())
}

/// Richardson-extrapolated eigenvalues with their refinement trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonEstimate {
    /// `(4ℰ(h/2) − ℰ(h))/3`.
    pub values: Vec<f64>,
    /// Raw eigenvalues at `h`, `h/2`, `h/4`.
    pub levels: Vec<(f64, Vec<f64>)>,
    /// `log₂((ℰ(h) − ℰ(h/2)) / (ℰ(h/2) − ℰ(h/4)))`, per eigenvalue.
    pub observed_order: Vec<f64>,
}

const ORDER_WINDOW: (f64, f64) = (1.5, 2.5);

/// [`fd_spectrum`] at `h`, `h/2` and `h/4`, extrapolated from the first two
/// levels. Fails with the refinement trace when the sequence does not show
/// second-order convergence.
pub fn fd_spectrum_extrapolated(
    l: i32,
    grid: &RadialGrid,
    count: usize,
) -> Result<RichardsonEstimate> {
    let grids = [*grid, grid.refined(2), grid.refined(4)];
    let mut levels = Vec::with_capacity(3);
    for g in &grids {
        levels.push((g.spacing(), fd_spectrum(l, g, count)?));
    }
    let (coarse, mid, fine) = (&levels[0].1, &levels[1].1, &levels[2].1);
    let values = coarse
        .iter()
        .zip(mid)
        .map(|(c, m)| (4.0 * m - c) / 3.0)
        .collect();
    let mut observed_order = Vec::with_capacity(count);
    for k in 0..count {
        let d1 = coarse[k] - mid[k];
        let d2 = mid[k] - fine[k];
        let order = (d1 / d2).log2();
        let settled = d2.abs() <= 1e-11 * (1.0 + fine[k].abs());
        if !settled && !(order >= ORDER_WINDOW.0 && order <= ORDER_WINDOW.1) {
            let trace: Vec<String> = levels
                .iter()
                .map(|(h, v)| format!("h={h:e}: {:?}", v[k]))
                .collect();
            return Err(Error::Convergence(format!(
                "eigenvalue {k} for l = {l} shows order {order:.3} under refinement ({})",
                trace.join(", ")
            )));
        }
        observed_order.push(order);
    }
    Ok(RichardsonEstimate {
        values,
        levels,
        observed_order,
    })
}

/// Discrete eigenfunction for the eigenvalue nearest `curly` by inverse
/// iteration, returned as `(ρ_i, R_i)` with `Σ R_i² ρ_i h = 1`.
pub fn fd_eigenfunction(l: i32, grid: &RadialGrid, curly: f64) -> Result<Vec<(f64, f64)>> {
    let t = radial_operator(l, grid);
    let nodes = grid.nodes();
    let h = grid.spacing();
    let sigma = curly + 1e-9 * (1.0 + curly.abs());
    let mut u: Vec<f64> = vec![1.0; nodes.len()];
    for _ in 0..8 {
        let y = t.shifted_solve(sigma, &u);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Convergence(format!(
                "inverse iteration broke down near {curly}"
            )));
        }
        u = y.iter().map(|v| v / norm).collect();
    }
    let scale = 1.0 / h.sqrt();
    // sign convention: positive near the origin
    let sign = if u[0] < 0.0 { -1.0 } else { 1.0 };
    Ok(nodes
        .iter()
        .zip(&u)
        .map(|(&rho, &ui)| (rho, sign * scale * ui / rho.sqrt()))
        .collect())
}

/// One bound level recovered by the finite-difference route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialLevel {
    pub n: u32,
    pub l: i32,
    pub curly: f64,
}

/// All levels `n ≤ n_max` from per-`l` Richardson solves; the `j`-th
/// eigenvalue for `l` is assigned `n = |l| + 2j`.
pub fn fd_levels(grid: &RadialGrid, n_max: u32) -> Result<Vec<RadialLevel>> {
    let n_max = n_max as i32;
    let mut out = Vec::new();
    for l in -n_max..=n_max {
        let count = ((n_max - l.abs()) / 2 + 1) as usize;
        let est = fd_spectrum_extrapolated(l, grid, count)?;
        for (j, curly) in est.values.into_iter().enumerate() {
            out.push(RadialLevel {
                n: (l.abs() + 2 * j as i32) as u32,
                l,
                curly,
            });
        }
    }
    Ok(out)
}

/// `E = ħΩ_f ℰ + (f M_f Ω_f²/2) l`.
pub fn energy_from_dimensionless(p: &OscillatorParams, f: f64, curly: f64, l: i32) -> f64 {
    level_energy(p, &effective_params(p, f), curly, l)
}

/// `e^{ilφ}/√(2π)`.
pub fn azimuthal_eval(l: i32, phi: f64) -> Complex64 {
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    Complex64::from_polar(norm, l as f64 * phi)
}
