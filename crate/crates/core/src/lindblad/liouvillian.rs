//! Schrödinger-picture generator on qubit ⊗ truncated Fock space.
//!
//! The adjoint brackets of the moment generator pair up as
//!
//! ```text
//! -r (X[Y, Q] + [Q, Y†]X†)  with X = c†, Y = c   ==   2r · (c†Qc - ½{c†c, Q})
//! ```
//!
//! which is the adjoint of the standard dissipator `D[c]ρ = cρc† - ½{c†c, ρ}`
//! at rate `2r`. Reading off each bracket gives the channels
//!
//! | bracket rate       | `X`   | `Y`   | collapse `c` | rate            |
//! |--------------------|-------|-------|--------------|-----------------|
//! | `kappa (1 + n̄)`    | `a†`  | `a`   | `a`          | `2κ(1 + n̄)`     |
//! | `kappa n̄`          | `a`   | `a†`  | `a†`         | `2κ n̄`          |
//! | `Gamma`            | `R+`  | `R-`  | `R-`         | `2Γ`            |
//! | `Gamma`            | `R-`  | `R+`  | `R+`         | `2Γ`            |
//! | `Gamma0`           | `R_z` | `R_z` | `R_z`        | `2Γ0`           |
//!
//! Vectorization is row-major, `vec(ρ)[a·d + b] = ρ_ab`, so
//! `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::banded::BandedLu;
use super::dynamics::{integrate_to_steady_state, IntegrationSettings};
use super::sparse::SparseMatrix;
use super::{DensityMatrix, FockSpace, QubitOperatorBasis};
use crate::eom::ModelParams;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Collapse operator with its rate in `rate · D[operator]`.
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: &'static str,
    pub operator: DMatrix<Complex64>,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct FockLiouvillian {
    pub params: ModelParams,
    pub space: FockSpace,
    pub hamiltonian: DMatrix<Complex64>,
    pub channels: Vec<Channel>,
    pub generator: SparseMatrix,
}

fn nonzeros(m: &DMatrix<Complex64>) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != ZERO {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Appends `factor · (A ⊗ Bᵀ)` to the triplet list.
fn push_sandwich(
    triplets: &mut Vec<(usize, usize, Complex64)>,
    d: usize,
    left: &[(usize, usize, Complex64)],
    right: &[(usize, usize, Complex64)],
    factor: Complex64,
) {
    for &(i, j, a) in left {
        for &(k, l, b) in right {
            // (A ρ B)_{i,l} picks up A_ij ρ_jk B_kl
            triplets.push((i * d + l, j * d + k, factor * a * b));
        }
    }
}

fn identity_list(d: usize) -> Vec<(usize, usize, Complex64)> {
    (0..d).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect()
}

/// Superoperator of `ρ ↦ -i[H, ρ]`.
pub(crate) fn commutator_superop(
    d: usize,
    h: &DMatrix<Complex64>,
) -> Vec<(usize, usize, Complex64)> {
    let mut triplets = Vec::new();
    let hs = nonzeros(h);
    let id = identity_list(d);
    push_sandwich(&mut triplets, d, &hs, &id, Complex64::new(0.0, -1.0));
    push_sandwich(&mut triplets, d, &id, &hs, Complex64::new(0.0, 1.0));
    triplets
}

/// Superoperator of `ρ ↦ rate · (cρc† - ½{c†c, ρ})`.
fn dissipator_superop(
    d: usize,
    c: &DMatrix<Complex64>,
    rate: f64,
) -> Vec<(usize, usize, Complex64)> {
    let mut triplets = Vec::new();
    if rate == 0.0 {
        return triplets;
    }
    let cs = nonzeros(c);
    let cd = nonzeros(&c.adjoint());
    let cdc = nonzeros(&(c.adjoint() * c));
    let id = identity_list(d);
    let r = Complex64::new(rate, 0.0);
    push_sandwich(&mut triplets, d, &cs, &cd, r);
    push_sandwich(&mut triplets, d, &cdc, &id, -r * 0.5);
    push_sandwich(&mut triplets, d, &id, &cdc, -r * 0.5);
    triplets
}

/// `H0 = g0 R_z (a† + a) + beta R_z a†a - (beta/2) R_z (a†² + a²)` on the truncated space.
pub fn effective_hamiltonian(p: &ModelParams, space: &FockSpace) -> DMatrix<Complex64> {
    let a = space.annihilation();
    let ad = a.adjoint();
    let rz = space.qubit_operator(&QubitOperatorBasis::standard().rz);
    let field = (&ad + &a) * Complex64::new(p.g0, 0.0) + &ad * &a * Complex64::new(p.beta, 0.0)
        - (&ad * &ad + &a * &a) * Complex64::new(p.beta / 2.0, 0.0);
    rz * field
}

pub(crate) fn channels(p: &ModelParams, space: &FockSpace) -> Vec<Channel> {
    let basis = QubitOperatorBasis::standard();
    let a = space.annihilation();
    vec![
        Channel {
            label: "cavity emission",
            operator: a.clone(),
            rate: 2.0 * p.kappa * (1.0 + p.n_bar),
        },
        Channel {
            label: "cavity absorption",
            operator: a.adjoint(),
            rate: 2.0 * p.kappa * p.n_bar,
        },
        Channel {
            label: "dressed lowering",
            operator: space.qubit_operator(&basis.lower),
            rate: 2.0 * p.gamma,
        },
        Channel {
            label: "dressed raising",
            operator: space.qubit_operator(&basis.raise),
            rate: 2.0 * p.gamma,
        },
        Channel {
            label: "dressed dephasing",
            operator: space.qubit_operator(&basis.rz),
            rate: 2.0 * p.gamma0,
        },
    ]
}

pub(crate) fn dissipative_triplets(
    space: &FockSpace,
    channels: &[Channel],
) -> Vec<(usize, usize, Complex64)> {
    let d = space.dim();
    channels
        .iter()
        .flat_map(|ch| dissipator_superop(d, &ch.operator, ch.rate))
        .collect()
}

/// Generator of the effective dressed master equation at Fock cutoff `cutoff`.
pub fn build_liouvillian(p: &ModelParams, cutoff: usize) -> Result<FockLiouvillian> {
    let space = FockSpace::new(cutoff)?;
    let d = space.dim();
    let hamiltonian = effective_hamiltonian(p, &space);
    let channels = channels(p, &space);
    let mut triplets = commutator_superop(d, &hamiltonian);
    triplets.extend(dissipative_triplets(&space, &channels));
    let generator = SparseMatrix::from_triplets(d * d, d * d, triplets);
    Ok(FockLiouvillian {
        params: *p,
        space,
        hamiltonian,
        channels,
        generator,
    })
}

impl FockLiouvillian {
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let d = self.space.dim();
        let out = self.generator.mul_vec(&rho.to_vec());
        DensityMatrix::from_vec(self.space, &out).unwrap_or_else(|| unreachable!("dimension {d}"))
    }
}

/// Largest superoperator dimension handled by direct elimination.
pub const DIRECT_LIMIT: usize = 10_000;

/// Steady-state strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteadyMethod {
    /// Direct elimination when `d² <= DIRECT_LIMIT`, integration otherwise.
    Auto,
    Direct,
    Integrate(IntegrationSettings),
}

/// Normalized null vector of the generator.
pub fn steady_density(l: &FockLiouvillian) -> Result<DensityMatrix> {
    steady_density_with(l, SteadyMethod::Auto)
}

pub fn steady_density_with(l: &FockLiouvillian, method: SteadyMethod) -> Result<DensityMatrix> {
    if !(l.params.kappa > 0.0) {
        return Err(Error::SingularSystem(
            "kappa = 0: no unique steady state".into(),
        ));
    }
    let size = l.generator.rows();
    let method = match method {
        SteadyMethod::Auto if size <= DIRECT_LIMIT => SteadyMethod::Direct,
        SteadyMethod::Auto => SteadyMethod::Integrate(IntegrationSettings::default()),
        other => other,
    };
    match method {
        SteadyMethod::Direct => direct_null_vector(l),
        SteadyMethod::Integrate(settings) => {
            let start = DensityMatrix::vacuum(l.space);
            integrate_to_steady_state(&l.generator, start, &settings)
        }
        SteadyMethod::Auto => unreachable!(),
    }
}

/// Pivot ratios below this mean the generator has more than one null vector.
const DEGENERACY_RATIO: f64 = 1e-13;

fn direct_null_vector(l: &FockLiouvillian) -> Result<DensityMatrix> {
    // Populations sum to a left null vector, so the equation for ρ_00 is
    // redundant; replace it with the gauge ρ_00 = 1 and normalize afterwards.
    let gauge = vec![(0usize, Complex64::new(1.0, 0.0))];
    let lu = BandedLu::factor(&l.generator, &[(0, gauge)]);
    let ratio = lu.pivot_ratio();
    if ratio < DEGENERACY_RATIO {
        return Err(Error::DegenerateNullSpace(format!(
            "pivot ratio {ratio:.3e} with cutoff {}",
            l.space.cutoff()
        )));
    }
    let mut x = vec![ZERO; l.generator.rows()];
    x[0] = Complex64::new(1.0, 0.0);
    if !lu.solve_in_place(&mut x) {
        return Err(Error::DegenerateNullSpace("zero pivot".into()));
    }
    let mut rho = DensityMatrix::from_vec(l.space, &x).expect("dimension matches");
    let trace = rho.trace();
    if trace.norm() == 0.0 || !trace.re.is_finite() {
        return Err(Error::DegenerateNullSpace(
            "null vector has zero trace".into(),
        ));
    }
    rho.scale(Complex64::new(1.0, 0.0) / trace);
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_is_preserved() {
        let p = ModelParams::new(1.3, 0.2, 0.8, 0.3, 0.7, 1.2).unwrap();
        let l = build_liouvillian(&p, 6).unwrap();
        let d = l.space.dim();
        let mut left = vec![ZERO; d * d];
        for (r, col, v) in l.generator.iter() {
            if r / d == r % d {
                left[col] += v;
            }
        }
        let worst = left.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn hermiticity_is_preserved() {
        let p = ModelParams::new(1.3, 0.2, 0.8, 0.3, 0.7, 1.2).unwrap();
        let l = build_liouvillian(&p, 5).unwrap();
        let d = l.space.dim();
        let x = DMatrix::from_fn(d, d, |i, j| {
            c((i * 7 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.03)
        });
        let herm = DensityMatrix::from_matrix(l.space, &x + x.adjoint()).unwrap();
        let out = l.apply(&herm);
        assert!(out.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn dephasing_free_flip_rates() {
        let p = ModelParams::new(1.0, 0.1, 0.5, 0.25, 2.0, 3.0).unwrap();
        let l = build_liouvillian(&p, 4).unwrap();
        let rates: Vec<f64> = l.channels.iter().map(|c| c.rate).collect();
        assert_eq!(rates, vec![16.0, 12.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn undamped_spin_has_two_steady_states() {
        // Gamma = 0 conserves R_z
        let p = ModelParams {
            g0: 0.0,
            beta: 0.0,
            gamma: 0.0,
            gamma0: 0.0,
            kappa: 1.0,
            n_bar: 0.5,
        };
        let l = build_liouvillian(&p, 4).unwrap();
        assert!(matches!(
            steady_density(&l),
            Err(Error::DegenerateNullSpace(_))
        ));
    }

    #[test]
    fn undamped_cavity_is_rejected() {
        let p = ModelParams::in_gamma_units(1.0, 0.0, 0.0, 0.0).unwrap();
        let l = build_liouvillian(&p, 4).unwrap();
        assert!(matches!(steady_density(&l), Err(Error::SingularSystem(_))));
    }
}
