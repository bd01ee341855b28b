//! Closed-form steady-state results, used as independent checks of the
//! moment solver.
//!
//! `g3` is available in closed form only for `beta = 0`; for `beta != 0`
//! the order-6 hierarchy in [`crate::steady`] is the only route.

use num_rational::Ratio;

use crate::eom::ModelParams;
use crate::error::{Error, Result};

/// Exact small-`kappa` limits and incoherent baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConstants {
    pub g2_beta_nonzero: Ratio<i64>,
    pub g2_beta_zero: Ratio<i64>,
    pub g3_beta_nonzero: Ratio<i64>,
    pub g3_beta_zero: Ratio<i64>,
    pub g2_incoherent: Ratio<i64>,
    pub g3_incoherent: Ratio<i64>,
}

pub const LIMITS: LimitConstants = LimitConstants {
    g2_beta_nonzero: Ratio::new_raw(95, 12),
    g2_beta_zero: Ratio::new_raw(3, 1),
    g3_beta_nonzero: Ratio::new_raw(33203, 180),
    g3_beta_zero: Ratio::new_raw(15, 1),
    g2_incoherent: Ratio::new_raw(2, 1),
    g3_incoherent: Ratio::new_raw(6, 1),
};

/// Floating value of an exact ratio.
pub fn ratio_value(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn require_damping(p: &ModelParams) -> Result<()> {
    if p.kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::DivergentLimit(
            "kappa = 0: the steady-state photon number diverges",
        ))
    }
}

/// Steady-state `<a†a>`.
pub fn mean_photon_cf(p: &ModelParams) -> Result<f64> {
    require_damping(p)?;
    let (g0, b, gm, k, nb) = (p.g0, p.beta, p.gamma, p.kappa, p.n_bar);
    let coherent = g0 * g0 / (k * (k + 4.0 * gm));
    let nonlinear = b * b * (8.0 * g0 * g0 + k * (k + 4.0 * gm) * (1.0 + 2.0 * nb))
        / (2.0 * k * k * (k + 2.0 * gm) * (k + 4.0 * gm));
    Ok(nb + coherent + nonlinear)
}

/// Coefficients of the rational `g2` expression; each family is quadratic in `n_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Coefficients {
    pub a: [f64; 3],
    pub a_tilde: [f64; 3],
    pub b: [f64; 3],
    pub b_tilde: [f64; 3],
    pub c: [f64; 3],
    pub c_tilde: [f64; 3],
}

impl G2Coefficients {
    pub fn new(g0: f64, gamma: f64, kappa: f64) -> Self {
        let (g2, g4) = (g0 * g0, g0.powi(4));
        let (gm, k) = (gamma, kappa);
        let gk = gm + k; // Gamma + kappa
        let g2k = 2.0 * gm + k; // 2 Gamma + kappa
        let g4k = 4.0 * gm + k; // 4 Gamma + kappa
        let g43k = 4.0 * gm + 3.0 * k; // 4 Gamma + 3 kappa

        let a = [
            36.0 * g4 * k.powi(2) * gk.powi(2) * g2k * g43k,
            48.0 * g2 * k.powi(3) * gk.powi(2) * g2k * g43k.powi(2),
            24.0 * k.powi(4) * gk.powi(2) * g2k * g4k * g43k.powi(2),
        ];
        let a_tilde = [
            4.0 * g4 * k.powi(2) * g2k.powi(2),
            8.0 * g2 * k.powi(3) * g2k.powi(2) * g4k,
            4.0 * k.powi(4) * g2k.powi(2) * g4k.powi(2),
        ];
        let b = [
            k * gk
                * (3.0 * k.powi(2) * gk * g4k * g43k.powi(2)
                    + 32.0 * g4 * (50.0 * gm * gm + 74.0 * gm * k + 27.0 * k * k)
                    + 4.0 * g2 * k * g43k * (100.0 * gm * gm + 139.0 * gm * k + 45.0 * k * k)),
            4.0 * k.powi(2)
                * gk
                * g43k
                * (g2 * (392.0 * gm * gm + 614.0 * gm * k + 234.0 * k * k)
                    + 9.0 * k * gk * g4k * g43k),
            60.0 * k.powi(3) * gk.powi(2) * g4k * g43k.powi(2),
        ];
        let b_tilde = [
            4.0 * k * g2 * g2k * (8.0 * g2 + k * g4k),
            4.0 * k.powi(2) * g2k * g4k * (10.0 * g2 + k * g4k),
            8.0 * k.powi(3) * g2k * g4k.powi(2),
        ];
        let c = [
            9.0 * k.powi(2) * gk * g4k * g43k.powi(2)
                + 16.0 * g4 * (190.0 * gm * gm + 289.0 * gm * k + 108.0 * k * k)
                + 4.0 * g2 * k * g43k * (220.0 * gm * gm + 319.0 * gm * k + 108.0 * k * k),
            4.0 * k
                * g43k
                * (9.0 * k * gk * g4k * g43k
                    + g2 * (440.0 * gm * gm + 638.0 * gm * k + 216.0 * k * k)),
            36.0 * k.powi(2) * gk * g4k * g43k.powi(2),
        ];
        let c_tilde = [
            (8.0 * g2 + k * g4k).powi(2),
            4.0 * k * g4k * (8.0 * g2 + k * g4k),
            4.0 * k.powi(2) * g4k.powi(2),
        ];
        Self {
            a,
            a_tilde,
            b,
            b_tilde,
            c,
            c_tilde,
        }
    }

    pub fn for_params(p: &ModelParams) -> Self {
        Self::new(p.g0, p.gamma, p.kappa)
    }
}

fn quadratic(coef: &[f64; 3], x: f64) -> f64 {
    coef[0] + coef[1] * x + coef[2] * x * x
}

/// `g2` from an explicit coefficient set.
pub fn g2_from_coefficients(p: &ModelParams, coefs: &G2Coefficients) -> Result<f64> {
    require_damping(p)?;
    if p.g0 == 0.0 && p.beta == 0.0 && p.n_bar == 0.0 {
        return Err(Error::DegenerateIntensity(0.0));
    }
    let (gm, k, nb) = (p.gamma, p.kappa, p.n_bar);
    let b2 = p.beta * p.beta;
    let prefactor =
        (k + 2.0 * gm) * (k + 4.0 * gm) / (3.0 * (k + gm).powi(2) * (3.0 * k + 4.0 * gm).powi(2));
    let numerator =
        quadratic(&coefs.a, nb) + quadratic(&coefs.b, nb) * b2 + quadratic(&coefs.c, nb) * b2 * b2;
    let denominator = quadratic(&coefs.a_tilde, nb)
        + quadratic(&coefs.b_tilde, nb) * b2
        + quadratic(&coefs.c_tilde, nb) * b2 * b2;
    Ok(prefactor * numerator / denominator)
}

/// Closed-form `g2(0)` for arbitrary `beta`.
pub fn g2_cf(p: &ModelParams) -> Result<f64> {
    g2_from_coefficients(p, &G2Coefficients::for_params(p))
}

fn beta0_common(p: &ModelParams) -> Result<f64> {
    require_damping(p)?;
    if p.g0 == 0.0 && p.n_bar == 0.0 {
        return Err(Error::DegenerateIntensity(0.0));
    }
    Ok(p.g0 * p.g0 + p.kappa * (p.kappa + 4.0 * p.gamma) * p.n_bar)
}

/// `g2(0)` at `beta = 0` (ignores `p.beta`).
pub fn g2_beta0_cf(p: &ModelParams) -> Result<f64> {
    let s = beta0_common(p)?;
    let (gm, k) = (p.gamma, p.kappa);
    Ok(2.0 + p.g0.powi(4) * (4.0 * gm - 3.0 * k) / ((4.0 * gm + 3.0 * k) * s * s))
}

/// `g3(0)` at `beta = 0` (ignores `p.beta`).
pub fn g3_beta0_cf(p: &ModelParams) -> Result<f64> {
    let s = beta0_common(p)?;
    let (gm, k) = (p.gamma, p.kappa);
    let cubic = 12.0 * p.g0.powi(6) * k * (5.0 * k - 12.0 * gm)
        / (5.0 * k + 4.0 * gm)
        / ((3.0 * k + 4.0 * gm) * s.powi(3));
    let quartic = 9.0 * p.g0.powi(4) * (4.0 * gm - 3.0 * k) / ((3.0 * k + 4.0 * gm) * s * s);
    Ok(6.0 + cubic + quartic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g0: f64, beta: f64, kappa: f64, n_bar: f64) -> ModelParams {
        ModelParams::in_gamma_units(g0, beta, kappa, n_bar).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn mean_photon_examples() {
        assert!(rel(mean_photon_cf(&params(5.0, 0.0, 1.0, 0.0)).unwrap(), 5.0) < 1e-15);
        assert!(rel(mean_photon_cf(&params(0.0, 0.0, 1.0, 7.0)).unwrap(), 7.0) < 1e-15);
        assert!(
            rel(
                mean_photon_cf(&params(5.0, 0.1, 1.0, 0.0)).unwrap(),
                5.0 + 2.05 / 30.0
            ) < 1e-14
        );
        // bad-cavity limit
        let far = mean_photon_cf(&params(5.0, 0.0, 1e4, 2.0)).unwrap();
        assert!((far - 2.0).abs() < 1e-6);
        assert!(matches!(
            mean_photon_cf(&params(5.0, 0.0, 0.0, 0.0)),
            Err(Error::DivergentLimit(_))
        ));
    }

    #[test]
    fn g2_examples() {
        for g0 in [0.5, 5.0, 20.0] {
            let v = g2_cf(&params(g0, 0.0, 1.0, 0.0)).unwrap();
            assert!(rel(v, 15.0 / 7.0) < 1e-13, "{v}");
        }
        assert!(rel(g2_cf(&params(0.0, 0.0, 1.0, 4.0)).unwrap(), 2.0) < 1e-13);
        let limit = g2_cf(&params(5.0, 0.1, 1e-6, 0.0)).unwrap();
        assert!(rel(limit, ratio_value(LIMITS.g2_beta_nonzero)) < 1e-3);
        assert!(matches!(
            g2_cf(&params(0.0, 0.0, 1.0, 0.0)),
            Err(Error::DegenerateIntensity(_))
        ));
    }

    #[test]
    fn beta_zero_examples() {
        assert!(
            rel(
                g2_beta0_cf(&params(5.0, 0.0, 1.0, 0.0)).unwrap(),
                15.0 / 7.0
            ) < 1e-15
        );
        assert_eq!(g2_beta0_cf(&params(5.0, 0.0, 4.0 / 3.0, 0.0)).unwrap(), 2.0);
        assert!(rel(g2_beta0_cf(&params(5.0, 0.0, 1e-6, 0.0)).unwrap(), 3.0) < 1e-3);

        assert!(
            rel(
                g3_beta0_cf(&params(5.0, 0.0, 1.0, 0.0)).unwrap(),
                125.0 / 21.0
            ) < 1e-14
        );
        assert!(rel(g3_beta0_cf(&params(5.0, 0.0, 1e-6, 0.0)).unwrap(), 15.0) < 1e-3);
        assert!(rel(g3_beta0_cf(&params(0.0, 0.0, 1.0, 2.5)).unwrap(), 6.0) < 1e-15);
        assert!(g3_beta0_cf(&params(0.0, 0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn limit_constants_are_exact() {
        assert_eq!(LIMITS.g2_beta_nonzero, Ratio::new(190, 24));
        assert_eq!(*LIMITS.g3_beta_nonzero.numer(), 33203);
        assert!((ratio_value(LIMITS.g3_beta_nonzero) - 184.46).abs() < 0.01);
    }
}
