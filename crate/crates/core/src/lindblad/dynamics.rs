//! Time integration of the density-matrix master equation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::liouvillian::{channels, commutator_superop, dissipative_triplets};
use super::sparse::SparseMatrix;
use super::{moments_from_density, DensityMatrix, FockSpace, QubitOperatorBasis};
use crate::eom::ModelParams;
use crate::error::{Error, Result, Warning};
use crate::steady::MomentVector;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Adaptive Dormand–Prince settings for relaxing to the steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    /// Stop once `max |dρ/dt|` falls below this.
    pub tolerance: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_time: f64,
    pub max_steps: u64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            rtol: 1e-11,
            atol: 1e-15,
            max_time: 1e5,
            max_steps: 5_000_000,
        }
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn axpy_into(out: &mut [Complex64], base: &[Complex64], terms: &[(f64, &[Complex64])], h: f64) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = base[i];
        for (coef, k) in terms {
            acc += k[i] * (coef * h);
        }
        *o = acc;
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Relaxes `start` under the time-independent generator until `dρ/dt` vanishes.
pub fn integrate_to_steady_state(
    generator: &SparseMatrix,
    start: DensityMatrix,
    settings: &IntegrationSettings,
) -> Result<DensityMatrix> {
    let _ = C;
    let space = start.space();
    let size = generator.rows();
    let mut y = start.to_vec();
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![ZERO; size]).collect();
    let mut stage = vec![ZERO; size];
    let mut y_new = vec![ZERO; size];

    generator.mul_vec_into(&y, &mut k[0]);
    let mut h = 0.01;
    let (mut t, mut steps) = (0.0, 0u64);

    loop {
        let rate = max_abs(&k[0]);
        if rate < settings.tolerance {
            break;
        }
        if steps >= settings.max_steps || t >= settings.max_time || !rate.is_finite() {
            return Err(Error::NonConvergence(format!(
                "|dρ/dt| = {rate:.3e} after {steps} steps (t = {t:.3e})"
            )));
        }

        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, coefs) in rows.iter().enumerate() {
            {
                let terms: Vec<(f64, &[Complex64])> = coefs
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| (a, k[j].as_slice()))
                    .collect();
                axpy_into(&mut stage, &y, &terms, h);
            }
            generator.mul_vec_into(&stage, &mut k[s + 1]);
        }
        {
            let terms: Vec<(f64, &[Complex64])> = B5
                .iter()
                .enumerate()
                .map(|(j, &b)| (b, k[j].as_slice()))
                .collect();
            axpy_into(&mut y_new, &y, &terms, h);
        }
        generator.mul_vec_into(&y_new, &mut k[6]);

        let mut err: f64 = 0.0;
        for i in 0..size {
            let e: Complex64 = (0..7).map(|j| k[j][i] * E[j]).sum::<Complex64>() * h;
            let scale = settings.atol + settings.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }

        if err <= 1.0 {
            t += h;
            steps += 1;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }

    let mut rho = DensityMatrix::from_vec(space, &y).expect("dimension matches");
    let trace = rho.trace();
    rho.scale(Complex64::new(1.0, 0.0) / trace);
    Ok(rho)
}

/// Result of integrating the time-dependent dressed Hamiltonian.
#[derive(Debug, Clone)]
pub struct TimeAveragedRun {
    /// Moments of ρ averaged over the final 20% of the horizon.
    pub moments: MomentVector,
    pub averaged_density: DensityMatrix,
    pub steps: u64,
    pub dt: f64,
    pub warnings: Vec<Warning>,
}

/// Steps above this raise [`Warning::Stiffness`].
pub const STIFF_STEPS: u64 = 10_000_000;

/// Integrates the dressed Hamiltonian with its `e^{±2iΩt}` terms kept,
///
/// ```text
/// H(t) = g0 R_z (a + a†) + g0 (R+ e^{2iΩt} - R- e^{-2iΩt}) (a† - a),
/// ```
///
/// under the same dissipators as the effective model, with fixed-step RK4
/// at `dt <= (2π/Ω)/40` (smaller if the generator is stiffer), starting
/// from the vacuum.
pub fn simulate_dressed_time_dependent(
    p: &ModelParams,
    omega: f64,
    cutoff: usize,
    horizon: f64,
) -> Result<TimeAveragedRun> {
    p.validate()?;
    if !(omega > 0.0) || !(horizon > 0.0) {
        return Err(Error::Inconsistent(format!(
            "Omega = {omega} and horizon = {horizon} must be positive"
        )));
    }
    let implied_beta = p.g0 * p.g0 / omega;
    if (implied_beta - p.beta).abs() > 1e-9 * implied_beta.max(p.beta).max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistent(format!(
            "beta = {} but g0²/Omega = {implied_beta}",
            p.beta
        )));
    }
    let mut warnings = Vec::new();
    if omega < 10.0 * p.g0 {
        warnings.push(Warning::Regime(format!(
            "Omega = {omega} is not large compared with g0 = {}",
            p.g0
        )));
    }

    let space = FockSpace::new(cutoff)?;
    let d = space.dim();
    let basis = QubitOperatorBasis::standard();
    let a = space.annihilation();
    let ad = a.adjoint();
    let rz = space.qubit_operator(&basis.rz);
    let raise = space.qubit_operator(&basis.raise);

    let static_h = &rz * (&ad + &a) * Complex64::new(p.g0, 0.0);
    // coefficient of e^{2iΩt}; its adjoint multiplies e^{-2iΩt}
    let fast = &raise * (&ad - &a) * Complex64::new(p.g0, 0.0);

    let mut base = commutator_superop(d, &static_h);
    base.extend(dissipative_triplets(&space, &channels(p, &space)));
    let base = SparseMatrix::from_triplets(d * d, d * d, base);
    let plus = SparseMatrix::from_triplets(d * d, d * d, commutator_superop(d, &fast));
    let minus = SparseMatrix::from_triplets(d * d, d * d, commutator_superop(d, &fast.adjoint()));

    // the 2Ω oscillation sets dt unless the dissipators are stiffer
    let spectral_bound = [&base, &plus, &minus]
        .iter()
        .map(|m| m.max_abs_row_sum())
        .sum::<f64>();
    let dt_max = (2.0 * PI / omega / 40.0).min(2.5 / spectral_bound);
    let steps = (horizon / dt_max).ceil() as u64;
    let dt = horizon / steps as f64;
    if steps > STIFF_STEPS {
        warnings.push(Warning::Stiffness { steps });
    }

    let rhs = |t: f64, v: &[Complex64], out: &mut [Complex64]| {
        base.mul_vec_into(v, out);
        let phase = Complex64::from_polar(1.0, 2.0 * omega * t);
        plus.mul_vec_add(phase, v, out);
        minus.mul_vec_add(phase.conj(), v, out);
    };

    let size = d * d;
    let mut y = DensityMatrix::vacuum(space).to_vec();
    let mut k1 = vec![ZERO; size];
    let mut k2 = vec![ZERO; size];
    let mut k3 = vec![ZERO; size];
    let mut k4 = vec![ZERO; size];
    let mut tmp = vec![ZERO; size];
    let mut average = vec![ZERO; size];

    let window_start = ((0.8 * steps as f64).floor() as u64).min(steps);
    let mut weight_total = 0.0;
    let mut accumulate = |step: u64, y: &[Complex64], average: &mut [Complex64]| {
        if step < window_start {
            return;
        }
        let w = if step == window_start || step == steps {
            0.5
        } else {
            1.0
        };
        weight_total += w;
        for (acc, v) in average.iter_mut().zip(y) {
            *acc += v * w;
        }
    };
    accumulate(0, &y, &mut average);

    for step in 0..steps {
        let t = step as f64 * dt;
        rhs(t, &y, &mut k1);
        axpy_into(&mut tmp, &y, &[(0.5, &k1)], dt);
        rhs(t + 0.5 * dt, &tmp, &mut k2);
        axpy_into(&mut tmp, &y, &[(0.5, &k2)], dt);
        rhs(t + 0.5 * dt, &tmp, &mut k3);
        axpy_into(&mut tmp, &y, &[(1.0, &k3)], dt);
        rhs(t + dt, &tmp, &mut k4);
        for i in 0..size {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        accumulate(step + 1, &y, &mut average);

        if (step + 1) % 1000 == 0 && !y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "state diverged at t = {:.3e}",
                t + dt
            )));
        }
    }

    for v in &mut average {
        *v /= weight_total;
    }
    let averaged_density = DensityMatrix::from_vec(space, &average).expect("dimension matches");
    let trace_error = (averaged_density.trace() - Complex64::new(1.0, 0.0)).norm();
    if !(trace_error < 1e-6) {
        return Err(Error::NonConvergence(format!(
            "trace drifted by {trace_error:.3e}"
        )));
    }
    let (moments, truncation) = moments_from_density(&averaged_density, 6);
    warnings.extend(truncation);
    Ok(TimeAveragedRun {
        moments,
        averaged_density,
        steps,
        dt,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eom::MomentIndex;
    use crate::lindblad::build_liouvillian;

    #[test]
    fn empty_cavity_decays_exponentially() {
        // g0 = beta = Gamma = Gamma0 = 0, n_bar = 0
        let p = ModelParams {
            g0: 0.0,
            beta: 0.0,
            gamma: 0.0,
            gamma0: 0.0,
            kappa: 0.7,
            n_bar: 0.0,
        };
        let l = build_liouvillian(&p, 8).unwrap();
        let space = l.space;
        let mut amplitudes = vec![ZERO; 4];
        amplitudes[3] = Complex64::new(1.0, 0.0);
        let mut y = DensityMatrix::field_state(space, &amplitudes).to_vec();
        let number = MomentIndex::new(0, 1, 1);

        let (dt, steps) = (1e-3, 1500);
        let mut k1 = vec![ZERO; y.len()];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();
        for _ in 0..steps {
            l.generator.mul_vec_into(&y, &mut k1);
            axpy_into(&mut tmp, &y, &[(0.5, &k1)], dt);
            l.generator.mul_vec_into(&tmp, &mut k2);
            axpy_into(&mut tmp, &y, &[(0.5, &k2)], dt);
            l.generator.mul_vec_into(&tmp, &mut k3);
            axpy_into(&mut tmp, &y, &[(1.0, &k3)], dt);
            l.generator.mul_vec_into(&tmp, &mut k4);
            for i in 0..y.len() {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        let rho = DensityMatrix::from_vec(space, &y).unwrap();
        let expected = 3.0 * (-2.0 * p.kappa * dt * steps as f64).exp();
        assert!((rho.moment(number).re - expected).abs() < 1e-10);
    }

    #[test]
    fn integration_matches_direct_null_vector() {
        let p = ModelParams::new(0.8, 0.05, 1.0, 0.1, 1.0, 0.3).unwrap();
        let l = build_liouvillian(&p, 8).unwrap();
        let direct = crate::lindblad::steady_density(&l).unwrap();
        let relaxed = integrate_to_steady_state(
            &l.generator,
            DensityMatrix::vacuum(l.space),
            &IntegrationSettings::default(),
        )
        .unwrap();
        let diff = (direct.matrix() - relaxed.matrix())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn inconsistent_beta_is_rejected() {
        let p = ModelParams::in_gamma_units(1.0, 0.05, 1.0, 0.0).unwrap();
        assert!(matches!(
            simulate_dressed_time_dependent(&p, 100.0, 6, 1.0),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn decoupled_drive_gives_thermal_cavity() {
        let p = ModelParams::in_gamma_units(0.0, 0.0, 1.0, 0.4).unwrap();
        for omega in [5.0, 40.0] {
            let run = simulate_dressed_time_dependent(&p, omega, 24, 25.0).unwrap();
            let n = run.moments.at(0, 1, 1).unwrap();
            assert!((n.re - 0.4).abs() < 1e-6, "Omega = {omega}: n = {n}");
            assert!(run.moments.at(0, 0, 1).unwrap().norm() < 1e-12);
        }
    }
}
