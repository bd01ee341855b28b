use crate::error::{Error, Result, Warning};

/// Rates of the effective dressed-frame model.
///
/// All rates share one unit; the CLI fixes `gamma = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Dressed atom-cavity coupling `g0 = g/2`.
    pub g0: f64,
    /// Non-secular nonlinearity `beta = g0² / Omega`.
    pub beta: f64,
    /// Dressed damping `(gamma + gamma_d) / 4`.
    pub gamma: f64,
    /// Dressed dephasing `gamma / 4`.
    pub gamma0: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Incoherent cavity occupation.
    pub n_bar: f64,
}

impl ModelParams {
    pub fn new(
        g0: f64,
        beta: f64,
        gamma: f64,
        gamma0: f64,
        kappa: f64,
        n_bar: f64,
    ) -> Result<Self> {
        let p = Self {
            g0,
            beta,
            gamma,
            gamma0,
            kappa,
            n_bar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Rates in units of `gamma` (`gamma = 1`, `gamma0 = 0`).
    pub fn in_gamma_units(g0: f64, beta: f64, kappa: f64, n_bar: f64) -> Result<Self> {
        Self::new(g0, beta, 1.0, 0.0, kappa, n_bar)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            ("g0", self.g0, self.g0 >= 0.0, "must be >= 0"),
            ("beta", self.beta, self.beta >= 0.0, "must be >= 0"),
            ("Gamma", self.gamma, self.gamma > 0.0, "must be > 0"),
            ("Gamma0", self.gamma0, self.gamma0 >= 0.0, "must be >= 0"),
            ("kappa", self.kappa, self.kappa >= 0.0, "must be >= 0"),
            ("n_bar", self.n_bar, self.n_bar >= 0.0, "must be >= 0"),
        ];
        for (name, value, ok, reason) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                });
            }
        }
        Ok(())
    }

    /// Effective Rabi frequency `g0² / beta`, if `beta > 0`.
    pub fn implied_omega(&self) -> Option<f64> {
        (self.beta > 0.0).then(|| self.g0 * self.g0 / self.beta)
    }

    /// Warnings when the parameters leave the regime `beta << g0`, `Omega >> {gamma, kappa}`.
    pub fn regime_warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        if self.beta > 0.2 * self.g0 {
            out.push(Warning::Regime(format!(
                "beta = {} is not small compared with g0 = {}",
                self.beta, self.g0
            )));
        }
        if let Some(omega) = self.implied_omega() {
            // Omega >> gamma: 4*Gamma bounds the bare spontaneous rate from above
            let bare_gamma = 4.0 * self.gamma;
            if omega < 10.0 * bare_gamma.max(self.kappa) {
                out.push(Warning::Regime(format!(
                    "implied Omega = {omega} is not large compared with gamma, kappa"
                )));
            }
        }
        out
    }

    /// Same physics with every rate multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            g0: self.g0 * factor,
            beta: self.beta * factor,
            gamma: self.gamma * factor,
            gamma0: self.gamma0 * factor,
            kappa: self.kappa * factor,
            n_bar: self.n_bar,
        }
    }
}

/// Laboratory-frame parameters of the driven emitter and cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Rabi frequency of the drive.
    pub omega: f64,
    /// Atom-cavity coupling.
    pub g: f64,
    /// Half the spontaneous decay rate (`2 gamma` is the spontaneous rate).
    pub gamma: f64,
    pub gamma_d: f64,
    pub kappa: f64,
    pub n_bar: f64,
    /// Cavity-laser detuning; must be zero.
    pub delta: f64,
}

impl PhysicalParams {
    pub fn to_model(&self) -> Result<ModelParams> {
        if self.delta != 0.0 {
            return Err(Error::Detuned(self.delta));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "Omega",
                value: self.omega,
                reason: "must be > 0",
            });
        }
        if !(self.gamma >= 0.0) || !(self.gamma_d >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                reason: "gamma and gamma_d must be >= 0",
            });
        }
        let g0 = self.g / 2.0;
        ModelParams::new(
            g0,
            g0 * g0 / self.omega,
            (self.gamma + self.gamma_d) / 4.0,
            self.gamma / 4.0,
            self.kappa,
            self.n_bar,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physical_conversion() {
        let phys = PhysicalParams {
            omega: 50.0,
            g: 10.0,
            gamma: 3.0,
            gamma_d: 1.0,
            kappa: 0.5,
            n_bar: 2.0,
            delta: 0.0,
        };
        let p = phys.to_model().unwrap();
        assert_eq!(p.g0, 5.0);
        assert_eq!(p.beta, 0.5);
        assert_eq!(p.gamma, 1.0);
        assert_eq!(p.gamma0, 0.75);
        assert_eq!(p.kappa, 0.5);
        assert_eq!(p.n_bar, 2.0);
    }

    #[test]
    fn detuning_is_rejected() {
        let phys = PhysicalParams {
            omega: 50.0,
            g: 10.0,
            gamma: 3.0,
            gamma_d: 1.0,
            kappa: 0.5,
            n_bar: 0.0,
            delta: 0.1,
        };
        assert_eq!(phys.to_model(), Err(Error::Detuned(0.1)));
    }

    #[test]
    fn invalid_rates_are_rejected() {
        assert!(ModelParams::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.0, 0.0, 1.0, f64::NAN).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn regime_warnings() {
        let ok = ModelParams::in_gamma_units(5.0, 0.1, 1.0, 0.0).unwrap();
        assert!(ok.regime_warnings().is_empty());
        let strong = ModelParams::in_gamma_units(1.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(strong.regime_warnings().len(), 2);
    }
}
