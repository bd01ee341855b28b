//! Direct solution of the moment hierarchy and the photon observables.

use std::collections::BTreeMap;

use log::debug;
use nalgebra::DVector;
use num_complex::Complex64;

use crate::eom::{assemble_system, ModelParams, MomentIndex, MomentSystem};
use crate::error::{Error, Result, Warning};

/// Condition estimates above this are reported as [`Warning::IllConditioned`].
pub const ILL_CONDITIONED: f64 = 1e12;

/// Mean photon numbers below this cannot normalize `g^(k)`.
pub const MIN_INTENSITY: f64 = 1e-300;

/// Moment values keyed by `(s, m, n)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentVector {
    values: BTreeMap<MomentIndex, Complex64>,
}

impl MomentVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, idx: MomentIndex, value: Complex64) {
        self.values.insert(idx, value);
    }

    /// `<R_z^s a†^m a^n>`; `<1> = 1` and missing labels are `None`.
    pub fn get(&self, idx: MomentIndex) -> Option<Complex64> {
        if idx.is_identity() {
            return Some(Complex64::new(1.0, 0.0));
        }
        self.values.get(&idx).copied()
    }

    pub fn at(&self, s: u8, m: u32, n: u32) -> Option<Complex64> {
        self.get(MomentIndex::new(s, m, n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MomentIndex, &Complex64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Highest total order `m + n` present.
    pub fn max_order(&self) -> u32 {
        self.values
            .keys()
            .map(MomentIndex::order)
            .max()
            .unwrap_or(0)
    }

    /// `max |x(s,n,m) - conj x(s,m,n)|`, relative to the largest moment magnitude.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.values().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let worst = self
            .values
            .iter()
            .filter_map(|(idx, v)| {
                self.values
                    .get(&idx.conjugate())
                    .map(|w| (w - v.conj()).norm())
            })
            .fold(0.0, f64::max);
        worst / scale
    }

    /// `<a†^k a^k>`.
    pub fn factorial_moment(&self, k: u32) -> Option<Complex64> {
        self.at(0, k, k)
    }
}

impl FromIterator<(MomentIndex, Complex64)> for MomentVector {
    fn from_iter<T: IntoIterator<Item = (MomentIndex, Complex64)>>(iter: T) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

/// Solved hierarchy with solver diagnostics.
#[derive(Debug, Clone)]
pub struct SteadySolution {
    pub order: u32,
    pub moments: MomentVector,
    /// `‖A x + b‖ / ‖b‖` (absolute when `b = 0`).
    pub residual_norm: f64,
    pub symmetry_defect: f64,
    /// Ratio of largest to smallest LU pivot magnitude.
    pub condition_estimate: f64,
    pub warnings: Vec<Warning>,
}

/// Observables of a steady state.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub n: f64,
    /// `None` when the solved order is below 4.
    pub g2: Option<f64>,
    /// `None` when the solved order is below 6.
    pub g3: Option<f64>,
    pub moments: MomentVector,
    pub residual_norm: f64,
    pub symmetry_defect: f64,
    pub condition_estimate: f64,
    /// Largest imaginary part dropped from `<a†^k a^k>`, relative to its real part.
    pub imaginary_residue: f64,
    pub warnings: Vec<Warning>,
}

impl SteadyStateResult {
    /// `g^(k)(0) = <a†^k a^k> / n^k`, available for `2k <= order`.
    pub fn correlation(&self, k: u32) -> Option<f64> {
        let moment = self.moments.factorial_moment(k)?;
        Some(moment.re / self.n.powi(k as i32))
    }
}

/// Solves a previously assembled system with partial-pivoting LU.
pub fn solve_system(system: &MomentSystem) -> Result<SteadySolution> {
    let lu = system.matrix.clone().lu();
    let pivots = lu.u().diagonal();
    let (mut largest, mut smallest) = (0.0f64, f64::INFINITY);
    for p in pivots.iter() {
        largest = largest.max(p.norm());
        smallest = smallest.min(p.norm());
    }
    if !(smallest > 0.0) || !largest.is_finite() {
        return Err(Error::SingularSystem(format!(
            "pivot breakdown in the order-{} moment system",
            system.order
        )));
    }
    let condition_estimate = largest / smallest;

    let rhs: DVector<Complex64> = -&system.rhs;
    let x = lu.solve(&rhs).ok_or_else(|| {
        Error::SingularSystem(format!("order-{} moment system is singular", system.order))
    })?;

    let residual = &system.matrix * &x + &system.rhs;
    let rhs_norm = system.rhs.norm();
    let residual_norm = if rhs_norm > 0.0 {
        residual.norm() / rhs_norm
    } else {
        residual.norm()
    };

    let moments: MomentVector = system
        .unknowns
        .iter()
        .copied()
        .zip(x.iter().copied())
        .collect();
    let symmetry_defect = moments.symmetry_defect();

    let mut warnings = Vec::new();
    if condition_estimate > ILL_CONDITIONED {
        debug!("moment system condition estimate {condition_estimate:.3e}");
        warnings.push(Warning::IllConditioned {
            estimate: condition_estimate,
        });
    }

    Ok(SteadySolution {
        order: system.order,
        moments,
        residual_norm,
        symmetry_defect,
        condition_estimate,
        warnings,
    })
}

/// Assembles and solves the order-`k` hierarchy.
pub fn solve_steady(k: u32, p: &ModelParams) -> Result<SteadySolution> {
    let system = assemble_system(k, p)?;
    let mut solution = solve_system(&system)?;
    solution.warnings.extend(p.regime_warnings());
    Ok(solution)
}

/// `n`, `g2`, `g3` from a solved hierarchy.
pub fn observables(solution: &SteadySolution) -> Result<SteadyStateResult> {
    let moments = &solution.moments;
    let number = moments
        .factorial_moment(1)
        .ok_or_else(|| Error::Inconsistent("moment vector lacks <a†a>".into()))?;
    let n = number.re;
    if !(n.abs() >= MIN_INTENSITY) {
        return Err(Error::DegenerateIntensity(n));
    }

    let mut imaginary_residue = (number.im / n).abs();
    let mut normalized = |k: u32| -> Option<f64> {
        let v = moments.factorial_moment(k)?;
        if v.re != 0.0 {
            imaginary_residue = imaginary_residue.max((v.im / v.re).abs());
        }
        Some(v.re / n.powi(k as i32))
    };
    let g2 = normalized(2);
    let g3 = normalized(3);

    Ok(SteadyStateResult {
        n,
        g2,
        g3,
        moments: moments.clone(),
        residual_norm: solution.residual_norm,
        symmetry_defect: solution.symmetry_defect,
        condition_estimate: solution.condition_estimate,
        imaginary_residue,
        warnings: solution.warnings.clone(),
    })
}

/// Solves at order `2·k_max` and evaluates the observables.
pub fn steady_state(p: &ModelParams, k_max: u32) -> Result<SteadyStateResult> {
    observables(&solve_steady(2 * k_max.max(1), p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn coherent_drive_without_nonlinearity() {
        let p = ModelParams::in_gamma_units(5.0, 0.0, 1.0, 0.0).unwrap();
        let sol = solve_steady(2, &p).unwrap();
        let r = observables(&sol).unwrap();
        // g0²/(kappa(kappa + 4 Gamma)) = 25/5
        assert!(rel(r.n, 5.0) < 1e-12);
        assert!(r.g2.is_none());
        assert!(r.residual_norm < 1e-12);
    }

    #[test]
    fn thermal_cavity() {
        let p = ModelParams::in_gamma_units(0.0, 0.0, 1.0, 3.0).unwrap();
        let sol = solve_steady(6, &p).unwrap();
        let r = observables(&sol).unwrap();
        assert!(rel(r.n, 3.0) < 1e-12);
        assert!(sol.moments.at(0, 0, 1).unwrap().norm() < 1e-14);
        assert!((r.g2.unwrap() - 2.0).abs() < 1e-10);
        assert!((r.g3.unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn nonlinear_mean_photon_number() {
        let p = ModelParams::in_gamma_units(5.0, 0.1, 1.0, 0.0).unwrap();
        let r = steady_state(&p, 1).unwrap();
        // 5 + 0.01·(200 + 5)/(2·3·5)
        assert!(rel(r.n, 5.0 + 205.0 * 0.01 / 30.0) < 1e-12);
    }

    #[test]
    fn beta_zero_correlations() {
        let p = ModelParams::in_gamma_units(5.0, 0.0, 1.0, 0.0).unwrap();
        let r = steady_state(&p, 3).unwrap();
        assert!(rel(r.g2.unwrap(), 2.0 + 1.0 / 7.0) < 1e-12);
        assert!(rel(r.g3.unwrap(), 6.0 - 4.0 / 3.0 + 9.0 / 7.0) < 1e-12);
        assert_eq!(r.correlation(3), r.g3);
    }

    #[test]
    fn inversion_vanishes() {
        let p = ModelParams::new(2.0, 0.15, 1.3, 0.2, 0.7, 1.5).unwrap();
        let sol = solve_steady(6, &p).unwrap();
        assert!(sol.moments.at(1, 0, 0).unwrap().norm() < 1e-14);
        assert!(sol.symmetry_defect < 1e-12);
    }

    #[test]
    fn dark_cavity_has_no_intensity() {
        let p = ModelParams::in_gamma_units(0.0, 0.0, 1.0, 0.0).unwrap();
        let sol = solve_steady(4, &p).unwrap();
        assert!(matches!(
            observables(&sol),
            Err(Error::DegenerateIntensity(_))
        ));
    }

    #[test]
    fn undamped_cavity_is_singular() {
        let p = ModelParams::in_gamma_units(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(solve_steady(2, &p), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn approach_to_small_kappa_limit() {
        let target = 95.0 / 12.0;
        let distances: Vec<f64> = [0.3, 0.1, 0.03, 0.01]
            .iter()
            .map(|&kappa| {
                let p = ModelParams::in_gamma_units(5.0, 0.1, kappa, 0.0).unwrap();
                (steady_state(&p, 2).unwrap().g2.unwrap() - target).abs()
            })
            .collect();
        assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
    }

    #[test]
    fn rate_rescaling_leaves_observables_unchanged() {
        let p = ModelParams::new(3.0, 0.2, 1.0, 0.3, 0.5, 2.0).unwrap();
        let base = steady_state(&p, 3).unwrap();
        for factor in [0.01, 7.5, 300.0] {
            let r = steady_state(&p.rescaled(factor), 3).unwrap();
            assert!(rel(r.n, base.n) < 1e-10);
            assert!(rel(r.g2.unwrap(), base.g2.unwrap()) < 1e-10);
            assert!(rel(r.g3.unwrap(), base.g3.unwrap()) < 1e-10);
        }
    }
}
