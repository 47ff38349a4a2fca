//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistosc::coherent::required_cutoff;
use twistosc::fock::{
    commutator_deviation, diagonalize_interior, expectation_and_variance, fock_state,
    observable_matrices,
};
use twistosc::oscillator::levels_up_to;
use twistosc::radial::{energy_from_dimensionless, radial_polynomial_coeffs};
use twistosc::{
    allowed_azimuthal, coherent_moments, effective_params, eigenstate_uncertainty_product,
    energy_modes, energy_nl, fd_levels, fd_spectrum_extrapolated, CoherentAmplitudes, Complex64,
    FockBasis, FockOperator, ModeOccupation, OscillatorParams, RadialGrid,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn random_params(rng: &mut ChaCha8Rng) -> OscillatorParams {
    let mass = log_uniform(rng, 0.25, 4.0);
    let omega = log_uniform(rng, 0.25, 4.0);
    let hbar = log_uniform(rng, 0.25, 4.0);
    OscillatorParams::new(mass, omega, hbar).unwrap()
}

/// 20 draws shared by the algebra and Hamiltonian criteria.
fn matrix_draws() -> Vec<(OscillatorParams, f64)> {
    let mut r = rng(0x5eed_0001);
    (0..20)
        .map(|_| {
            let p = random_params(&mut r);
            (p, r.random_range(-3.0..3.0))
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn within(name: &str, observed: f64, tol: f64) -> Outcome {
    if observed < tol {
        Ok(format!("{name} {observed:.2e} < {tol:.0e}"))
    } else {
        Err(format!("{name} {observed:.3e} >= {tol:.0e}"))
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = true;
    let text: Vec<String> = parts
        .into_iter()
        .map(|p| {
            p.unwrap_or_else(|e| {
                ok = false;
                format!("FAILED {e}")
            })
        })
        .collect();
    let joined = text.join("; ");
    if ok {
        Ok(joined)
    } else {
        Err(joined)
    }
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let time = match limit {
        Some(limit) if elapsed >= limit => Err(format!("runtime {elapsed:.2?} >= {limit:?}")),
        Some(limit) => Ok(format!("runtime {elapsed:.2?} < {limit:?}")),
        None => Ok(format!("runtime {elapsed:.2?}")),
    };
    all(vec![result, time])
}

fn algebra() -> Outcome {
    let basis = FockBasis::new(12).unwrap();
    let one = FockOperator::identity(basis);
    let zero = FockOperator::zeros(basis, "0");
    let mut worst: f64 = 0.0;
    for (p, f) in matrix_draws() {
        let s = observable_matrices(&p, f, basis);
        let ihbar = one.scale(Complex64::new(0.0, p.hbar));
        let i_f = one.scale(Complex64::new(0.0, f));
        let a_plus_dag = s.a_plus.adjoint();
        let a_minus_dag = s.a_minus.adjoint();
        for (a, b, target) in [
            (&s.a_plus, &a_plus_dag, &one),
            (&s.a_minus, &a_minus_dag, &one),
            (&s.a_plus, &a_minus_dag, &zero),
            (&s.a_minus, &a_plus_dag, &zero),
            (&s.x1, &s.p1, &ihbar),
            (&s.x2, &s.p2, &ihbar),
            (&s.x1, &s.p2, &zero),
            (&s.x2, &s.p1, &zero),
            (&s.xbar1, &s.xbar2, &i_f),
        ] {
            worst = worst.max(commutator_deviation(a, b, target).unwrap());
        }
    }
    within("max commutator deviation", worst, 1e-12)
}

fn hamiltonian_equivalence() -> Outcome {
    let basis = FockBasis::new(12).unwrap();
    let mut worst: f64 = 0.0;
    for (p, f) in matrix_draws() {
        let s = observable_matrices(&p, f, basis);
        let ladder = FockOperator::from_diagonal(basis, "H_ladder", |occ| energy_modes(&p, f, occ));
        let diff = s.h_xp.try_sub(&ladder).unwrap().interior_max_abs();
        worst = worst.max(diff / ladder.interior_max_abs());
    }
    within("max relative |H_xp - H_ladder|", worst, 1e-10)
}

fn three_way() -> Outcome {
    let p = OscillatorParams::natural();
    let basis = FockBasis::new(10).unwrap();
    let grid = RadialGrid::new(12.0, 2400).unwrap();
    let fd = fd_levels(&grid, 4).map_err(|e| e.to_string())?;
    let (mut closed_fd, mut closed_fock, mut fock_fd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut levels = 0;
    for f in [0.0, 0.5, 2.0] {
        let mut closed: Vec<(u32, i32, f64)> = levels_up_to(4)
            .into_iter()
            .map(|qn| (qn.n(), qn.l(), energy_nl(&p, f, qn)))
            .collect();
        let mut radial: Vec<(u32, i32, f64)> = fd
            .iter()
            .map(|lv| (lv.n, lv.l, energy_from_dimensionless(&p, f, lv.curly, lv.l)))
            .collect();
        closed.sort_by_key(|x| (x.0, x.1));
        radial.sort_by_key(|x| (x.0, x.1));
        if closed.len() != radial.len()
            || closed
                .iter()
                .zip(&radial)
                .any(|(a, b)| (a.0, a.1) != (b.0, b.1))
        {
            return Err(format!(
                "radial route returned a different set of (n, l) at f = {f}"
            ));
        }
        for (a, b) in closed.iter().zip(&radial) {
            closed_fd = closed_fd.max((a.2 - b.2).abs());
        }

        let h = observable_matrices(&p, f, basis).h_xp;
        let fock: Vec<f64> = diagonalize_interior(&h, 4)
            .unwrap()
            .into_iter()
            .map(|e| e.value)
            .collect();
        let mut closed_sorted: Vec<f64> = closed.iter().map(|x| x.2).collect();
        let mut radial_sorted: Vec<f64> = radial.iter().map(|x| x.2).collect();
        closed_sorted.sort_by(f64::total_cmp);
        radial_sorted.sort_by(f64::total_cmp);
        if fock.len() != closed_sorted.len() {
            return Err(format!(
                "Fock shell has {} levels, expected {}",
                fock.len(),
                closed_sorted.len()
            ));
        }
        for k in 0..fock.len() {
            closed_fock = closed_fock.max((fock[k] - closed_sorted[k]).abs());
            fock_fd = fock_fd.max((fock[k] - radial_sorted[k]).abs());
        }
        levels += fock.len();
    }
    all(vec![
        within("closed vs radial", closed_fd, 1e-6),
        within("closed vs Fock", closed_fock, 1e-6),
        within("Fock vs radial", fock_fd, 1e-6),
        Ok(format!("{levels} levels")),
    ])
}

fn eigenstate_uncertainty() -> Outcome {
    let mut r = rng(0x5eed_0004);
    let basis = FockBasis::new(10).unwrap();
    let mut worst: f64 = 0.0;
    let mut draws = vec![(OscillatorParams::natural(), 0.0)];
    for _ in 0..4 {
        let p = random_params(&mut r);
        draws.push((p, r.random_range(-3.0..3.0)));
    }
    for (p, f) in draws {
        let s = observable_matrices(&p, f, basis);
        for qn in levels_up_to(4) {
            let occ = qn.modes();
            let state = fock_state(basis, occ).unwrap();
            let want = eigenstate_uncertainty_product(&p, occ);
            let var = |op| expectation_and_variance(op, &state).unwrap().1;
            worst = worst
                .max(rel(var(&s.x1) * var(&s.p1), want))
                .max(rel(var(&s.x2) * var(&s.p2), want));
        }
    }
    within("max relative deviation", worst, 1e-10)
}

fn coherent() -> Outcome {
    let p = OscillatorParams::natural();
    let mut r = rng(0x5eed_0005);
    // uniform on the disc |c| <= 2
    let mut draw = || {
        Complex64::from_polar(
            2.0 * r.random::<f64>().sqrt(),
            r.random_range(0.0..std::f64::consts::TAU),
        )
    };
    let amps: Vec<CoherentAmplitudes> = (0..10)
        .map(|_| CoherentAmplitudes::new(draw(), draw()).unwrap())
        .collect();
    let floor = p.hbar * p.hbar / 4.0;
    let (mut eigen, mut product, mut moments, mut identity): (f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0);
    for f in [0.0, 2.0] {
        for c in &amps {
            let basis = FockBasis::new(required_cutoff(c) + 4).unwrap();
            let rep = coherent_moments(&p, f, basis, c).unwrap();
            eigen = eigen
                .max(rep.eigen_residual_plus)
                .max(rep.eigen_residual_minus);
            product = product
                .max((rep.product_1 - floor).abs())
                .max((rep.product_2 - floor).abs());
            moments = moments
                .max((rep.mean_l - rep.target_mean_l).abs())
                .max((rep.var_l - rep.target_var_l).abs());
            identity = identity.max(rep.identity_residual);
        }
    }
    all(vec![
        within("eigenrelation", eigen, 1e-9),
        within("uncertainty products", product, 1e-9),
        within("<L>, (dL)^2", moments, 1e-10),
        within("<H> identity", identity, 1e-9),
    ])
}

fn radial() -> Outcome {
    let samples: Vec<f64> = (1..=60).map(|k| 0.1 * k as f64).collect();
    let mut residual: f64 = 0.0;
    for qn in levels_up_to(12) {
        let sol = radial_polynomial_coeffs(qn.n().into(), qn.l().into()).unwrap();
        residual = residual.max(sol.ode_residual(&samples).unwrap());
    }
    let grid = RadialGrid::new(12.0, 2400).unwrap();
    assert!((grid.spacing() - 0.005).abs() < 1e-15);
    let (mut error, mut order_dev): (f64, f64) = (0.0, 0.0);
    for l in -4..=4i32 {
        let est = fd_spectrum_extrapolated(l, &grid, 3).map_err(|e| e.to_string())?;
        for k in 0..3 {
            let target = (l.abs() + 2 * k as i32 + 1) as f64;
            error = error.max((est.values[k] - target).abs());
            // rate from the exact errors at h and h/2, and from the h/4 sequence
            let e1 = est.levels[0].1[k] - target;
            let e2 = est.levels[1].1[k] - target;
            order_dev = order_dev
                .max(((e1 / e2).log2() - 2.0).abs())
                .max((est.observed_order[k] - 2.0).abs());
        }
    }
    all(vec![
        within("ODE residual n <= 12", residual, 1e-12),
        within("fd eigenvalue error (h = 0.005)", error, 1e-6),
        within("|observed order - 2|", order_dev, 0.2),
    ])
}

fn degeneracy() -> Outcome {
    let p = OscillatorParams::natural();
    let basis = FockBasis::new(12).unwrap();
    let h = observable_matrices(&p, 0.0, basis).h_xp;
    let values: Vec<f64> = diagonalize_interior(&h, 6)
        .unwrap()
        .into_iter()
        .map(|e| e.value)
        .collect();
    let mut miscounts = Vec::new();
    for n in 0..=6u32 {
        let level = p.hbar * p.omega * (n as f64 + 1.0);
        let states = values.iter().filter(|v| (*v - level).abs() < 1e-9).count();
        let labels = allowed_azimuthal(n).len();
        if states != n as usize + 1 || labels != n as usize + 1 {
            miscounts.push(format!("n={n}: {states} states, {labels} l values"));
        }
    }
    if values.len() != 28 {
        miscounts.push(format!("{} eigenvalues in shells n <= 6", values.len()));
    }
    let counts = if miscounts.is_empty() {
        Ok("n+1 states and l values for n <= 6".to_owned())
    } else {
        Err(miscounts.join(", "))
    };

    let mut r = rng(0x5eed_0007);
    let mut split: f64 = 0.0;
    let mut matrix_split: f64 = 0.0;
    let small = FockBasis::new(4).unwrap();
    for _ in 0..50 {
        let p = random_params(&mut r);
        let f = r.random_range(-2.0..2.0);
        let want = f * p.mass * p.omega * p.omega;
        let got = energy_modes(&p, f, ModeOccupation::new(0, 1))
            - energy_modes(&p, f, ModeOccupation::new(1, 0));
        split = split.max((got - want).abs());
        let h = observable_matrices(&p, f, small).h_xp;
        let diag = |occ| {
            let i = small.index(occ).unwrap();
            h.get(i, i).re
        };
        matrix_split = matrix_split
            .max((diag(ModeOccupation::new(0, 1)) - diag(ModeOccupation::new(1, 0)) - want).abs());
    }
    all(vec![
        counts,
        within("closed-form split vs f m omega^2", split, 1e-12),
        within("matrix split vs f m omega^2", matrix_split, 1e-12),
    ])
}

fn parameter_invariants() -> Outcome {
    let mut r = rng(0x5eed_0008);
    let mut fs: Vec<f64> = vec![0.0, 1e3, -1e3];
    while fs.len() < 1000 {
        let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
        fs.push(sign * log_uniform(&mut r, 1e-4, 1e3));
    }
    let (mut stiff, mut prod): (f64, f64) = (0.0, 0.0);
    let mut nonpositive = 0;
    for f in fs {
        let p = random_params(&mut r);
        let e = effective_params(&p, f);
        stiff = stiff.max(rel(
            e.mass_f * e.omega_f * e.omega_f,
            p.mass * p.omega * p.omega,
        ));
        prod = prod.max(rel(e.omega_plus * e.omega_minus, p.omega * p.omega));
        if !(e.omega_plus > 0.0 && e.omega_minus > 0.0) {
            nonpositive += 1;
        }
    }
    all(vec![
        within("M_f Omega_f^2 = m omega^2", stiff, 1e-12),
        within("Omega_+ Omega_- = omega^2", prod, 1e-12),
        if nonpositive == 0 {
            Ok("Omega_+/- > 0".to_owned())
        } else {
            Err(format!("{nonpositive} draws with Omega_+/- <= 0"))
        },
    ])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("algebra suite", algebra, Some(Duration::from_secs(5))),
        ("Hamiltonian equivalence", hamiltonian_equivalence, None),
        (
            "three-way spectrum agreement",
            three_way,
            Some(Duration::from_secs(30)),
        ),
        ("eigenstate uncertainty", eigenstate_uncertainty, None),
        ("coherent suite", coherent, None),
        ("radial polynomials and fd convergence", radial, None),
        ("degeneracy and splitting", degeneracy, None),
        ("parameter invariants", parameter_invariants, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.into_iter().enumerate() {
        match timed(limit, run) {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
