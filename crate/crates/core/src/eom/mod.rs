//! Steady-state moment hierarchy of the dressed master equation.
//!
//! For a moment `Q = R_z^s a†^m a^n` the Heisenberg-picture generator is
//!
//! ```text
//! d<Q>/dt = i<[H0, Q]>
//!         - Gamma0 <R_z[R_z, Q]> - Gamma (<R+[R-, Q]> + <R-[R+, Q]>)
//!         - kappa (1 + n_bar) <a†[a, Q]> - kappa n_bar <a[a†, Q]>  + H.c.
//! ```
//!
//! with `H0 = g0 R_z (a† + a) + beta R_z a†a - (beta/2) R_z (a†² + a²)`.
//! The "H.c." partner of a bracket `X[Y, Q]` is `[Q, Y†]X†`, i.e. the adjoint
//! taken without conjugating `Q`.
//!
//! The qubit brackets act on the 2×2 dressed-qubit factor only; they are
//! evaluated with explicit `R±` matrices and projected back onto
//! `{1, R_z}`. The field brackets go through [`OperatorPoly`].

mod params;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{Monomial, OperatorPoly};
use crate::error::{Error, Result};

pub use params::{ModelParams, PhysicalParams};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Label of the moment `<R_z^s a†^m a^n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MomentIndex {
    pub s: u8,
    pub m: u32,
    pub n: u32,
}

impl MomentIndex {
    pub const fn new(s: u8, m: u32, n: u32) -> Self {
        Self { s, m, n }
    }

    pub fn order(&self) -> u32 {
        self.m + self.n
    }

    /// Label of the complex-conjugate moment.
    pub fn conjugate(&self) -> Self {
        Self {
            s: self.s,
            m: self.n,
            n: self.m,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0 && self.m == 0 && self.n == 0
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.s == 1, self.m, self.n)
    }
}

impl From<Monomial> for MomentIndex {
    fn from(m: Monomial) -> Self {
        Self {
            s: u8::from(m.rz),
            m: m.create,
            n: m.annihilate,
        }
    }
}

// Unknowns are sorted by (m + n, s, m).
impl Ord for MomentIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.order(), self.s, self.m).cmp(&(other.order(), other.s, other.m))
    }
}

impl PartialOrd for MomentIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.monomial())
    }
}

/// `d<Q>/dt = Σ row[j] <j> + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEquation {
    pub row: BTreeMap<MomentIndex, Complex64>,
    pub constant: Complex64,
}

impl MomentEquation {
    fn from_poly(poly: &OperatorPoly) -> Self {
        let mut row = BTreeMap::new();
        let mut constant = ZERO;
        for (m, c) in poly.terms() {
            let idx = MomentIndex::from(*m);
            if idx.is_identity() {
                constant += c;
            } else {
                row.insert(idx, *c);
            }
        }
        Self { row, constant }
    }

    /// Applies the functional to moment values (`<1>` is the constant).
    pub fn evaluate<F>(&self, mut moment: F) -> Complex64
    where
        F: FnMut(MomentIndex) -> Complex64,
    {
        self.row
            .iter()
            .fold(self.constant, |acc, (idx, c)| acc + c * moment(*idx))
    }
}

/// The effective Hamiltonian `H0` in units of ħ.
pub fn hamiltonian(p: &ModelParams) -> OperatorPoly {
    let c = |x: f64| Complex64::new(x, 0.0);
    OperatorPoly::from_terms([
        (Monomial::new(true, 1, 0), c(p.g0)),
        (Monomial::new(true, 0, 1), c(p.g0)),
        (Monomial::new(true, 1, 1), c(p.beta)),
        (Monomial::new(true, 2, 0), c(-p.beta / 2.0)),
        (Monomial::new(true, 0, 2), c(-p.beta / 2.0)),
    ])
}

type Qubit = [[Complex64; 2]; 2];

// Dressed basis ordering: index 0 = |1̄>, index 1 = |2̄>.
fn qubit_rz() -> Qubit {
    [[-ONE, ZERO], [ZERO, ONE]]
}

fn qubit_raise() -> Qubit {
    [[ZERO, ZERO], [ONE, ZERO]]
}

fn qubit_lower() -> Qubit {
    [[ZERO, ONE], [ZERO, ZERO]]
}

fn qmul(x: &Qubit, y: &Qubit) -> Qubit {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn qsub(x: &Qubit, y: &Qubit) -> Qubit {
    let mut out = *x;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] -= y[i][j];
        }
    }
    out
}

fn qcomm(x: &Qubit, y: &Qubit) -> Qubit {
    qsub(&qmul(x, y), &qmul(y, x))
}

fn qdagger(x: &Qubit) -> Qubit {
    [
        [x[0][0].conj(), x[1][0].conj()],
        [x[0][1].conj(), x[1][1].conj()],
    ]
}

/// `X[Y, Q] + [Q, Y†]X†` on the qubit factor.
fn qubit_bracket(x: &Qubit, y: &Qubit, q: &Qubit) -> Qubit {
    let direct = qmul(x, &qcomm(y, q));
    let partner = qmul(&qcomm(q, &qdagger(y)), &qdagger(x));
    let mut out = direct;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += partner[i][j];
        }
    }
    out
}

/// Coefficients of `X = α·1 + ζ·R_z + p·R+ + q·R-`.
fn qubit_decompose(x: &Qubit) -> (Complex64, Complex64, Complex64, Complex64) {
    let alpha = (x[0][0] + x[1][1]) / 2.0;
    let zeta = (x[1][1] - x[0][0]) / 2.0;
    (alpha, zeta, x[1][0], x[0][1])
}

/// Qubit damping acting on `R_z^s`, returned as coefficients of (1, R_z).
///
/// The dephasing bracket is returned separately so callers can check it vanishes.
fn qubit_damping(s: u8, p: &ModelParams) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    let q = if s == 1 {
        qubit_rz()
    } else {
        [[ONE, ZERO], [ZERO, ONE]]
    };
    let (rz, up, down) = (qubit_rz(), qubit_raise(), qubit_lower());

    let flips = {
        let sum = qubit_bracket(&up, &down, &q);
        let other = qubit_bracket(&down, &up, &q);
        let mut total = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                total[i][j] = -(sum[i][j] + other[i][j]) * p.gamma;
            }
        }
        total
    };
    let dephasing = {
        let b = qubit_bracket(&rz, &rz, &q);
        [
            [-b[0][0] * p.gamma0, -b[0][1] * p.gamma0],
            [-b[1][0] * p.gamma0, -b[1][1] * p.gamma0],
        ]
    };

    let (fa, fz, fp, fm) = qubit_decompose(&flips);
    debug_assert!(
        fp.norm() == 0.0 && fm.norm() == 0.0,
        "qubit damping left the (1, R_z) span"
    );
    let (da, dz, _, _) = qubit_decompose(&dephasing);
    ((fa, fz), (da, dz))
}

/// Field-bracket pair `X[Y, Q] + [Q, Y†]X†`.
fn field_bracket(x: &OperatorPoly, y: &OperatorPoly, q: &OperatorPoly) -> OperatorPoly {
    x.multiply(&y.commutator(q)) + q.commutator(&y.adjoint()).multiply(&x.adjoint())
}

/// Dephasing bracket for `Q`; zero for every `(s, m, n)` because `R_z` commutes with `Q`.
pub fn dephasing_contribution(q: MomentIndex, p: &ModelParams) -> OperatorPoly {
    let (_, (alpha, zeta)) = qubit_damping(q.s, p);
    field_times_qubit(q, alpha, zeta)
}

fn field_times_qubit(q: MomentIndex, alpha: Complex64, zeta: Complex64) -> OperatorPoly {
    // qubit part α + ζ R_z multiplied onto the field part a†^m a^n
    OperatorPoly::from_terms([
        (Monomial::new(false, q.m, q.n), alpha),
        (Monomial::new(true, q.m, q.n), zeta),
    ])
}

/// Generator polynomial: `d<Q>/dt = <result>`.
pub fn generator(q: MomentIndex, p: &ModelParams) -> OperatorPoly {
    let moment = OperatorPoly::monomial(q.monomial(), ONE);

    let coherent = hamiltonian(p).commutator(&moment).scale(I);

    let ((fa, fz), (da, dz)) = qubit_damping(q.s, p);
    let qubit = field_times_qubit(q, fa + da, fz + dz);

    let a = OperatorPoly::a();
    let ad = OperatorPoly::a_dag();
    let emission =
        field_bracket(&ad, &a, &moment).scale(Complex64::new(-p.kappa * (1.0 + p.n_bar), 0.0));
    let absorption = field_bracket(&a, &ad, &moment).scale(Complex64::new(-p.kappa * p.n_bar, 0.0));

    coherent + qubit + emission + absorption
}

/// Linear functional for `d<Q>/dt`.
pub fn moment_eom(q: MomentIndex, p: &ModelParams) -> MomentEquation {
    MomentEquation::from_poly(&generator(q, p))
}

/// Dense steady-state system `0 = matrix · x + rhs` over the moment unknowns.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub order: u32,
    pub unknowns: Vec<MomentIndex>,
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    positions: HashMap<MomentIndex, usize>,
}

impl MomentSystem {
    pub fn dimension(&self) -> usize {
        self.unknowns.len()
    }

    pub fn position(&self, idx: &MomentIndex) -> Option<usize> {
        self.positions.get(idx).copied()
    }

    /// Coefficient of unknown `col` in the equation of unknown `row`.
    pub fn coefficient(&self, row: &MomentIndex, col: &MomentIndex) -> Option<Complex64> {
        Some(self.matrix[(self.position(row)?, self.position(col)?)])
    }

    pub fn constant(&self, row: &MomentIndex) -> Option<Complex64> {
        Some(self.rhs[self.position(row)?])
    }
}

/// Unknowns of the order-`k` hierarchy: `(1, 0, 0)` and every `(s, m, n)` with `1 <= m + n <= k`.
pub fn unknowns(k: u32) -> Vec<MomentIndex> {
    let mut out = vec![MomentIndex::new(1, 0, 0)];
    for order in 1..=k {
        for s in 0..=1 {
            for m in 0..=order {
                out.push(MomentIndex::new(s, m, order - m));
            }
        }
    }
    out.sort();
    out
}

/// Assembles the closed order-`k` system in the printed sign convention
/// (`0 = decay·moment - drive`), i.e. the negated generator rows.
pub fn assemble_system(k: u32, p: &ModelParams) -> Result<MomentSystem> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidOrder(k));
    }
    p.validate()?;
    if !(p.kappa > 0.0) {
        return Err(Error::SingularSystem(format!(
            "kappa = {} leaves the cavity undamped; no unique steady state",
            p.kappa
        )));
    }

    let unknowns = unknowns(k);
    let positions: HashMap<MomentIndex, usize> = unknowns
        .iter()
        .enumerate()
        .map(|(i, idx)| (*idx, i))
        .collect();
    let dim = unknowns.len();
    let mut matrix = DMatrix::from_element(dim, dim, ZERO);
    let mut rhs = DVector::from_element(dim, ZERO);

    for (row, idx) in unknowns.iter().enumerate() {
        let eq = moment_eom(*idx, p);
        rhs[row] = -eq.constant;
        for (col_idx, c) in &eq.row {
            let col = positions.get(col_idx).copied().ok_or_else(|| {
                Error::SingularSystem(format!("row {idx} references {col_idx} outside order {k}"))
            })?;
            matrix[(row, col)] -= *c;
        }
    }

    Ok(MomentSystem {
        order: k,
        unknowns,
        matrix,
        rhs,
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> ModelParams {
        ModelParams::new(1.7, 0.13, 0.9, 0.4, 0.6, 2.5).unwrap()
    }

    fn idx(s: u8, m: u32, n: u32) -> MomentIndex {
        MomentIndex::new(s, m, n)
    }

    #[test]
    fn rz_a_dag_equation() {
        let p = params();
        let eq = moment_eom(idx(1, 1, 0), &p);
        let expected = BTreeMap::from([
            (idx(1, 1, 0), c(-(p.kappa + 4.0 * p.gamma), 0.0)),
            (idx(0, 1, 0), c(0.0, p.beta)),
            (idx(0, 0, 1), c(0.0, -p.beta)),
        ]);
        assert_eq!(eq.row.len(), expected.len());
        for (k, v) in &expected {
            assert!((eq.row[k] - v).norm() < 1e-14, "{k}: {} vs {v}", eq.row[k]);
        }
        assert!((eq.constant - c(0.0, p.g0)).norm() < 1e-14);
    }

    #[test]
    fn identity_is_conserved() {
        let eq = moment_eom(idx(0, 0, 0), &params());
        assert!(eq.row.is_empty());
        assert_eq!(eq.constant, ZERO);
    }

    #[test]
    fn inversion_decays_at_four_gamma() {
        let p = params();
        // 2x2 matrices: the flip channels send R_z to -2 R_z per unit of 2 Gamma
        let eq = moment_eom(idx(1, 0, 0), &p);
        assert_eq!(eq.row.len(), 1);
        assert!((eq.row[&idx(1, 0, 0)] - c(-4.0 * p.gamma, 0.0)).norm() < 1e-14);
        assert_eq!(eq.constant, ZERO);
    }

    #[test]
    fn dephasing_drops_out() {
        let p = params();
        for q in unknowns(8) {
            assert!(dephasing_contribution(q, &p).is_zero(), "{q}");
        }
    }

    #[test]
    fn unknown_counts() {
        assert_eq!(unknowns(2).len(), 11);
        assert_eq!(unknowns(4).len(), 29);
        assert_eq!(unknowns(6).len(), 55);
        let u = unknowns(6);
        assert_eq!(u[0], idx(1, 0, 0));
        assert!(u.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mean_photon_row_matches_printed_form() {
        let p = params();
        let sys = assemble_system(2, &p).unwrap();
        let row = idx(0, 1, 1);
        let coef = |col| sys.coefficient(&row, &col).unwrap();
        assert!((coef(idx(0, 1, 1)) - c(2.0 * p.kappa, 0.0)).norm() < 1e-14);
        assert!((coef(idx(1, 1, 0)) - c(0.0, p.g0)).norm() < 1e-14);
        assert!((coef(idx(1, 0, 1)) - c(0.0, -p.g0)).norm() < 1e-14);
        assert!((coef(idx(1, 2, 0)) - c(0.0, -p.beta)).norm() < 1e-14);
        assert!((coef(idx(1, 0, 2)) - c(0.0, p.beta)).norm() < 1e-14);
        assert!((sys.constant(&row).unwrap() - c(-2.0 * p.kappa * p.n_bar, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn closure_holds_up_to_order_eight() {
        let p = params();
        for k in [2, 4, 6, 8] {
            for q in unknowns(k) {
                for col in moment_eom(q, &p).row.keys() {
                    assert!(col.order() <= q.order(), "{q} -> {col}");
                }
            }
            assert!(assemble_system(k, &p).is_ok());
        }
    }

    #[test]
    fn order_and_kappa_preconditions() {
        let p = params();
        assert_eq!(assemble_system(3, &p).unwrap_err(), Error::InvalidOrder(3));
        assert_eq!(assemble_system(0, &p).unwrap_err(), Error::InvalidOrder(0));
        let undamped = ModelParams { kappa: 0.0, ..p };
        assert!(matches!(
            assemble_system(2, &undamped),
            Err(Error::SingularSystem(_))
        ));
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (
            0.0..8.0f64,
            0.0..0.5f64,
            0.1..3.0f64,
            0.0..2.0f64,
            0.01..3.0f64,
            0.0..10.0f64,
        )
            .prop_map(|(g0, beta, gamma, gamma0, kappa, n_bar)| {
                ModelParams::new(g0, beta, gamma, gamma0, kappa, n_bar).unwrap()
            })
    }

    proptest! {
        #[test]
        fn conjugate_rows_are_conjugated(p in arb_params()) {
            for q in unknowns(6) {
                let eq = moment_eom(q, &p);
                let partner = moment_eom(q.conjugate(), &p);
                prop_assert_eq!(eq.row.len(), partner.row.len());
                for (col, v) in &eq.row {
                    let w = partner.row[&col.conjugate()];
                    prop_assert!((w - v.conj()).norm() < 1e-12 * (1.0 + v.norm()));
                }
                prop_assert!((partner.constant - eq.constant.conj()).norm() < 1e-12);
            }
        }

        #[test]
        fn dephasing_rate_does_not_enter(p in arb_params(), other in 0.0..5.0f64) {
            let a = assemble_system(6, &p).unwrap();
            let b = assemble_system(6, &ModelParams { gamma0: other, ..p }).unwrap();
            prop_assert_eq!(a.matrix, b.matrix);
            prop_assert_eq!(a.rhs, b.rhs);
        }
    }
}
