//! Brute-force density-matrix oracle.
//!
//! The dressed qubit and the cavity mode are represented explicitly on
//! `qubit ⊗ {|0>, …, |N>}`; Hilbert-space index `2·n + q` with `q = 0` for
//! the lower dressed state `|1̄>` (`R_z = -1`) and `q = 1` for `|2̄>`.

mod banded;
mod dynamics;
mod liouvillian;
mod sparse;

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::closedform::mean_photon_cf;
use crate::eom::{ModelParams, MomentIndex};
use crate::error::{Error, Result, Warning};
use crate::steady::MomentVector;

pub use banded::BandedLu;
pub use dynamics::{
    integrate_to_steady_state, simulate_dressed_time_dependent, IntegrationSettings,
    TimeAveragedRun,
};
pub use liouvillian::{
    build_liouvillian, effective_hamiltonian, steady_density, steady_density_with, Channel,
    FockLiouvillian, SteadyMethod, DIRECT_LIMIT,
};
pub use sparse::SparseMatrix;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Fock levels `0..=cutoff` times the dressed qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                value: cutoff as f64,
                reason: "Fock cutoff must be >= 2",
            });
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn levels(&self) -> usize {
        self.cutoff + 1
    }

    /// Hilbert-space dimension `2 (N + 1)`.
    pub fn dim(&self) -> usize {
        2 * self.levels()
    }

    pub fn index(&self, fock: usize, qubit: usize) -> usize {
        2 * fock + qubit
    }

    /// Truncated `a ⊗ 1`.
    pub fn annihilation(&self) -> DMatrix<Complex64> {
        let levels = self.levels();
        let a = DMatrix::from_fn(levels, levels, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        a.kronecker(&DMatrix::identity(2, 2))
    }

    /// `1 ⊗ q` for a 2×2 qubit operator.
    pub fn qubit_operator(&self, q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        DMatrix::<Complex64>::identity(self.levels(), self.levels()).kronecker(q)
    }
}

/// Dressed-qubit operators in the `(|1̄>, |2̄>)` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperatorBasis {
    pub rz: DMatrix<Complex64>,
    pub raise: DMatrix<Complex64>,
    pub lower: DMatrix<Complex64>,
}

impl QubitOperatorBasis {
    pub fn standard() -> Self {
        Self {
            rz: DMatrix::from_row_slice(2, 2, &[-ONE, ZERO, ZERO, ONE]),
            raise: DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO]),
            lower: DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]),
        }
    }
}

/// Density matrix on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
}

/// Invariant measurements of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub trace_error: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityReport {
    pub fn is_valid(&self) -> bool {
        self.trace_error < 1e-10 && self.hermiticity_defect < 1e-12 && self.min_eigenvalue >= -1e-8
    }
}

impl DensityMatrix {
    pub fn from_matrix(space: FockSpace, matrix: DMatrix<Complex64>) -> Option<Self> {
        (matrix.nrows() == space.dim() && matrix.ncols() == space.dim())
            .then_some(Self { space, matrix })
    }

    /// From a row-major vectorization.
    pub fn from_vec(space: FockSpace, v: &[Complex64]) -> Option<Self> {
        let d = space.dim();
        (v.len() == d * d).then(|| Self {
            space,
            matrix: DMatrix::from_row_slice(d, d, v),
        })
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.matrix.transpose().as_slice().to_vec()
    }

    /// `|0><0| ⊗ 1/2`.
    pub fn vacuum(space: FockSpace) -> Self {
        let mut matrix = DMatrix::from_element(space.dim(), space.dim(), ZERO);
        matrix[(0, 0)] = Complex64::new(0.5, 0.0);
        matrix[(1, 1)] = Complex64::new(0.5, 0.0);
        Self { space, matrix }
    }

    /// Pure field state (amplitudes over Fock levels) times the mixed qubit.
    pub fn field_state(space: FockSpace, amplitudes: &[Complex64]) -> Self {
        let levels = space.levels();
        let psi =
            nalgebra::DVector::from_fn(levels, |i, _| amplitudes.get(i).copied().unwrap_or(ZERO));
        let field = &psi * psi.adjoint();
        let qubit = DMatrix::from_diagonal_element(2, 2, Complex64::new(0.5, 0.0));
        Self {
            space,
            matrix: field.kronecker(&qubit),
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.matrix *= factor;
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn report(&self) -> DensityReport {
        DensityReport {
            trace_error: (self.trace() - ONE).norm(),
            hermiticity_defect: self.hermiticity_defect(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// Population of Fock level `n`, summed over the qubit.
    pub fn fock_population(&self, n: usize) -> f64 {
        (0..2)
            .map(|q| self.matrix[(self.space.index(n, q), self.space.index(n, q))].re)
            .sum()
    }

    /// Population of the top three Fock levels.
    pub fn tail_population(&self) -> f64 {
        let top = self.space.cutoff();
        (top - 2..=top).map(|n| self.fock_population(n)).sum()
    }

    /// `tr(R_z^s a†^m a^n ρ)` with truncated field operators.
    pub fn moment(&self, idx: MomentIndex) -> Complex64 {
        let (m, n) = (idx.m as usize, idx.n as usize);
        let top = self.space.cutoff();
        let mut total = ZERO;
        for l in n..=top {
            let k = l - n + m;
            if k > top {
                break;
            }
            // <k| a†^m a^n |l> = sqrt(l!/(l-n)!) sqrt(k!/(l-n)!)
            let weight = falling_sqrt(l, n) * falling_sqrt(k, m);
            for q in 0..2 {
                let sign = if idx.s == 1 && q == 0 { -1.0 } else { 1.0 };
                // tr(O ρ) = Σ O_{ab} ρ_{ba}
                total +=
                    self.matrix[(self.space.index(l, q), self.space.index(k, q))] * (sign * weight);
            }
        }
        total
    }
}

/// `sqrt(x! / (x - k)!)`.
fn falling_sqrt(x: usize, k: usize) -> f64 {
    ((x + 1 - k)..=x).map(|v| (v as f64).sqrt()).product()
}

/// Tail populations above this trigger [`Warning::TruncationSuspect`].
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// All moments `(s, m, n)` with `m + n <= order`, plus a truncation warning if the tail is populated.
pub fn moments_from_density(rho: &DensityMatrix, order: u32) -> (MomentVector, Vec<Warning>) {
    let mut moments = MomentVector::new();
    for total in 0..=order {
        for s in 0..=1u8 {
            for m in 0..=total {
                let idx = MomentIndex::new(s, m, total - m);
                if !idx.is_identity() {
                    moments.insert(idx, rho.moment(idx));
                }
            }
        }
    }
    let tail = rho.tail_population();
    let warnings = if tail > TAIL_TOLERANCE {
        vec![Warning::TruncationSuspect {
            tail_population: tail,
        }]
    } else {
        Vec::new()
    };
    (moments, warnings)
}

/// Cutoff `ceil(10 n + 15)` from the closed-form mean photon number.
pub fn suggested_cutoff(p: &ModelParams) -> Result<usize> {
    let n = mean_photon_cf(p)?;
    Ok((10.0 * n + 15.0).ceil() as usize)
}

/// Writes `fock,population` rows.
pub fn write_diagonal_csv<W: Write>(rho: &DensityMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "fock,population")?;
    for n in 0..rho.space().levels() {
        writeln!(out, "{n},{:.16e}", rho.fock_population(n))?;
    }
    Ok(())
}

/// Writes `s,m,n,re,im` rows.
pub fn write_moments_csv<W: Write>(moments: &MomentVector, mut out: W) -> io::Result<()> {
    writeln!(out, "s,m,n,re,im")?;
    for (idx, v) in moments.iter() {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e}",
            idx.s, idx.m, idx.n, v.re, v.im
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_algebra() {
        let b = QubitOperatorBasis::standard();
        let comm = |x: &DMatrix<Complex64>, y: &DMatrix<Complex64>| x * y - y * x;
        assert_eq!(comm(&b.raise, &b.lower), b.rz);
        assert_eq!(comm(&b.rz, &b.raise), &b.raise * c(2.0, 0.0));
        assert_eq!(comm(&b.rz, &b.lower), &b.lower * c(-2.0, 0.0));
        assert_eq!(
            &b.raise * &b.lower + &b.lower * &b.raise,
            DMatrix::identity(2, 2)
        );
    }

    #[test]
    fn vacuum_moments() {
        let space = FockSpace::new(6).unwrap();
        let (moments, warnings) = moments_from_density(&DensityMatrix::vacuum(space), 4);
        assert!(warnings.is_empty());
        for (_, v) in moments.iter() {
            assert_eq!(*v, ZERO);
        }
    }

    #[test]
    fn coherent_state_moments() {
        let space = FockSpace::new(30).unwrap();
        let alpha = c(0.3, 0.4);
        let mut amplitudes = Vec::new();
        let mut term = c((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for k in 0..=30 {
            if k > 0 {
                term = term * alpha / (k as f64).sqrt();
            }
            amplitudes.push(term);
        }
        let rho = DensityMatrix::field_state(space, &amplitudes);
        for m in 0..4u32 {
            for n in 0..4u32 {
                let expected = alpha.conj().powu(m) * alpha.powu(n);
                let got = rho.moment(MomentIndex::new(0, m, n));
                assert!(
                    (got - expected).norm() < 1e-12,
                    "m={m} n={n}: {got} vs {expected}"
                );
                // mixed qubit: <R_z ...> vanishes
                assert!(rho.moment(MomentIndex::new(1, m, n)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn thermal_moments() {
        let space = FockSpace::new(60).unwrap();
        let n_bar: f64 = 1.0;
        let ratio = n_bar / (1.0 + n_bar);
        let mut matrix = DMatrix::from_element(space.dim(), space.dim(), ZERO);
        for k in 0..=60 {
            let pop = ratio.powi(k as i32) / (1.0 + n_bar);
            for q in 0..2 {
                matrix[(space.index(k, q), space.index(k, q))] = c(pop / 2.0, 0.0);
            }
        }
        let rho = DensityMatrix::from_matrix(space, matrix).unwrap();
        assert!((rho.moment(MomentIndex::new(0, 1, 1)).re - 1.0).abs() < 1e-12);
        assert!((rho.moment(MomentIndex::new(0, 2, 2)).re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_warning() {
        let space = FockSpace::new(4).unwrap();
        let amplitudes = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let (_, warnings) =
            moments_from_density(&DensityMatrix::field_state(space, &amplitudes), 2);
        assert!(matches!(warnings[0], Warning::TruncationSuspect { .. }));
    }

    #[test]
    fn vectorization_round_trip() {
        let space = FockSpace::new(2).unwrap();
        let d = space.dim();
        let m = DMatrix::from_fn(d, d, |i, j| c(i as f64, j as f64));
        let rho = DensityMatrix::from_matrix(space, m.clone()).unwrap();
        let v = rho.to_vec();
        assert_eq!(v[d + 2], m[(1, 2)]);
        assert_eq!(DensityMatrix::from_vec(space, &v).unwrap(), rho);
    }

    #[test]
    fn cutoff_bounds() {
        assert!(FockSpace::new(1).is_err());
        let p = ModelParams::in_gamma_units(1.0, 0.05, 1.0, 0.0).unwrap();
        assert_eq!(suggested_cutoff(&p).unwrap(), 18);
    }
}
