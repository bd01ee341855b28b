//! Normally ordered operator polynomials in the dressed inversion `R_z` and
//! the cavity mode operators `a†`, `a`.
//!
//! Every monomial is stored as `R_z^s a†^m a^n` with `s ∈ {0, 1}`: the qubit
//! factor sits leftmost, creation operators before annihilation operators.
//! `R_z` commutes with the field and squares to the identity, so products of
//! monomials only need the bosonic reordering
//!
//! ```text
//! a^k a†^j = Σ_l  C(k,l) C(j,l) l!  a†^(j-l) a^(k-l)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Coefficients smaller than this fraction of the largest coefficient are dropped.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// `R_z^s a†^m a^n` in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    /// Power of `R_z`, already reduced with `R_z² = 1`.
    pub rz: bool,
    pub create: u32,
    pub annihilate: u32,
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        rz: false,
        create: 0,
        annihilate: 0,
    };

    pub fn new(rz: bool, create: u32, annihilate: u32) -> Self {
        Self {
            rz,
            create,
            annihilate,
        }
    }

    /// Total field order `m + n`.
    pub fn order(&self) -> u32 {
        self.create + self.annihilate
    }

    /// Label of the Hermitian adjoint (`R_z` is Hermitian).
    pub fn dagger(&self) -> Self {
        Self {
            rz: self.rz,
            create: self.annihilate,
            annihilate: self.create,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rz {
            parts.push("Rz".to_string());
        }
        match self.create {
            0 => {}
            1 => parts.push("a†".to_string()),
            m => parts.push(format!("a†^{m}")),
        }
        match self.annihilate {
            0 => {}
            1 => parts.push("a".to_string()),
            n => parts.push(format!("a^{n}")),
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Finite linear combination of canonical monomials with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorPoly {
    terms: BTreeMap<Monomial, Complex64>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(Monomial::IDENTITY, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(m: Monomial, coefficient: Complex64) -> Self {
        Self::from_terms([(m, coefficient)])
    }

    pub fn rz() -> Self {
        Self::monomial(Monomial::new(true, 0, 0), Complex64::new(1.0, 0.0))
    }

    /// The annihilation operator `a`.
    pub fn a() -> Self {
        Self::monomial(Monomial::new(false, 0, 1), Complex64::new(1.0, 0.0))
    }

    /// The creation operator `a†`.
    pub fn a_dag() -> Self {
        Self::monomial(Monomial::new(false, 1, 0), Complex64::new(1.0, 0.0))
    }

    /// Builds a canonical polynomial, summing repeated monomials.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut poly = Self { terms: map };
        poly.prune();
        poly
    }

    fn prune(&mut self) {
        let largest = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cutoff = largest * DROP_TOLERANCE;
        self.terms
            .retain(|_, c| c.norm() > cutoff && c.norm() != 0.0);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `m`, zero when absent.
    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    /// Largest total field order among the stored monomials.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::order).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c * factor)))
    }

    /// Normally ordered product `self · other`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (left, cl) in &self.terms {
            for (right, cr) in &other.terms {
                // left = Rz^s a†^m a^k, right = Rz^t a†^j a^n
                let k = left.annihilate;
                let j = right.create;
                let rz = left.rz ^ right.rz;
                for l in 0..=k.min(j) {
                    let weight = binomial(k, l) * binomial(j, l) * factorial(l);
                    let m = Monomial::new(rz, left.create + j - l, k - l + right.annihilate);
                    *out.entry(m).or_insert(Complex64::new(0.0, 0.0)) += cl * cr * weight;
                }
            }
        }
        let mut poly = Self { terms: out };
        poly.prune();
        poly
    }

    /// `[self, other]` in canonical form.
    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other) - other.multiply(self)
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.dagger(), c.conj())))
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `[p, q]`.
pub fn commutator(p: &OperatorPoly, q: &OperatorPoly) -> OperatorPoly {
    p.commutator(q)
}

pub fn multiply(p: &OperatorPoly, q: &OperatorPoly) -> OperatorPoly {
    p.multiply(q)
}

pub fn adjoint(p: &OperatorPoly) -> OperatorPoly {
    p.adjoint()
}

impl Add for OperatorPoly {
    type Output = OperatorPoly;

    fn add(self, rhs: Self) -> Self {
        Self::from_terms(self.terms.into_iter().chain(rhs.terms))
    }
}

impl Sub for OperatorPoly {
    type Output = OperatorPoly;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for OperatorPoly {
    type Output = OperatorPoly;

    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for &OperatorPoly {
    type Output = OperatorPoly;

    fn mul(self, rhs: Self) -> OperatorPoly {
        self.multiply(rhs)
    }
}

impl Mul<Complex64> for OperatorPoly {
    type Output = OperatorPoly;

    fn mul(self, rhs: Complex64) -> OperatorPoly {
        self.scale(rhs)
    }
}

impl Mul<f64> for OperatorPoly {
    type Output = OperatorPoly;

    fn mul(self, rhs: f64) -> OperatorPoly {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})·{m}"))
            .collect();
        f.write_str(&rendered.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(rz: bool, m: u32, n: u32) -> OperatorPoly {
        OperatorPoly::monomial(Monomial::new(rz, m, n), c(1.0, 0.0))
    }

    /// Matrix of a truncated `a` on Fock levels 0..=cutoff, built without the algebra.
    fn annihilation_matrix(cutoff: usize) -> DMatrix<Complex64> {
        let dim = cutoff + 1;
        DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                c((j as f64).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// Matrix representation on qubit ⊗ Fock from products of truncated matrices.
    fn represent(p: &OperatorPoly, cutoff: usize) -> DMatrix<Complex64> {
        let a = annihilation_matrix(cutoff);
        let ad = a.adjoint();
        let dim = cutoff + 1;
        let rz = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(-1.0, 0.0),
            c(1.0, 0.0),
        ]));
        let mut total = DMatrix::zeros(2 * dim, 2 * dim);
        for (m, coef) in p.terms() {
            let mut field = DMatrix::identity(dim, dim);
            for _ in 0..m.create {
                field = &field * &ad;
            }
            for _ in 0..m.annihilate {
                field = &field * &a;
            }
            let qubit = if m.rz {
                rz.clone()
            } else {
                DMatrix::identity(2, 2)
            };
            total += qubit.kronecker(&field) * *coef;
        }
        total
    }

    fn assert_block_equal(
        x: &DMatrix<Complex64>,
        y: &DMatrix<Complex64>,
        cutoff: usize,
        keep: usize,
    ) {
        let dim = cutoff + 1;
        let scale = x
            .iter()
            .chain(y.iter())
            .map(|v| v.norm())
            .fold(1.0, f64::max);
        for q1 in 0..2 {
            for q2 in 0..2 {
                for i in 0..=keep {
                    for j in 0..=keep {
                        let (r, col) = (q1 * dim + i, q2 * dim + j);
                        let diff = (x[(r, col)] - y[(r, col)]).norm();
                        assert!(diff <= 1e-12 * scale, "entry ({r},{col}) differs by {diff}");
                    }
                }
            }
        }
    }

    #[test]
    fn a_times_a_dag_is_normal_ordered() {
        let product = OperatorPoly::a().multiply(&OperatorPoly::a_dag());
        let expected = mono(false, 1, 1) + OperatorPoly::identity();
        assert_eq!(product, expected);
    }

    #[test]
    fn rz_squares_to_identity() {
        let product = OperatorPoly::rz().multiply(&mono(true, 1, 0));
        assert_eq!(product, OperatorPoly::a_dag());
    }

    #[test]
    fn a_squared_times_a_dag_cubed() {
        let product = mono(false, 0, 2).multiply(&mono(false, 3, 0));
        let expected = OperatorPoly::from_terms([
            (Monomial::new(false, 3, 2), c(1.0, 0.0)),
            (Monomial::new(false, 2, 1), c(6.0, 0.0)),
            (Monomial::new(false, 1, 0), c(6.0, 0.0)),
        ]);
        assert_eq!(product, expected);

        // same product from truncated matrices
        let cutoff = 12;
        let lhs = represent(&product, cutoff);
        let rhs = represent(&mono(false, 0, 2), cutoff) * represent(&mono(false, 3, 0), cutoff);
        assert_block_equal(&lhs, &rhs, cutoff, cutoff - 6);
    }

    #[test]
    fn canonical_commutator() {
        let one = OperatorPoly::a().commutator(&OperatorPoly::a_dag());
        assert_eq!(one, OperatorPoly::identity());

        let number = mono(false, 1, 1);
        let x = mono(false, 2, 1);
        assert_eq!(number.commutator(&x), x);
    }

    #[test]
    fn number_operator_eigenrelation() {
        let number = mono(false, 1, 1);
        for m in 0..5 {
            for n in 0..5 {
                let x = mono(false, m, n);
                let expected = x.clone() * (m as f64 - n as f64);
                assert_eq!(number.commutator(&x), expected, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn rz_dressed_commutator_reduces_to_field_commutator() {
        let f = OperatorPoly::a() + OperatorPoly::a_dag();
        let x = mono(false, 1, 1);
        let rz = OperatorPoly::rz();
        let lhs = rz.multiply(&f).commutator(&rz.multiply(&x));
        assert_eq!(lhs, f.commutator(&x));

        let cutoff = 8;
        let left = represent(&rz.multiply(&f), cutoff);
        let right = represent(&rz.multiply(&x), cutoff);
        let matrix_comm = &left * &right - &right * &left;
        assert_block_equal(&represent(&lhs, cutoff), &matrix_comm, cutoff, cutoff - 2);
    }

    #[test]
    fn adjoint_examples() {
        let p = OperatorPoly::a_dag() * c(0.0, 1.0);
        assert_eq!(p.adjoint(), OperatorPoly::a() * c(0.0, -1.0));
        assert_eq!(mono(true, 2, 1).adjoint(), mono(true, 1, 2));
        let q = mono(false, 1, 1) * c(2.0, 3.0);
        assert_eq!(q.adjoint(), mono(false, 1, 1) * c(2.0, -3.0));
    }

    #[test]
    fn tiny_coefficients_are_dropped() {
        let p = OperatorPoly::from_terms([
            (Monomial::new(false, 1, 0), c(1.0, 0.0)),
            (Monomial::new(false, 0, 1), c(1e-16, 0.0)),
        ]);
        assert_eq!(p.len(), 1);
        assert!((OperatorPoly::a() - OperatorPoly::a()).is_zero());
    }

    fn arb_poly(max_order: u32) -> impl Strategy<Value = OperatorPoly> {
        let term = (
            any::<bool>(),
            0..=max_order,
            0..=max_order,
            -3.0..3.0f64,
            -3.0..3.0f64,
        )
            .prop_filter("order bound", move |(_, m, n, _, _)| m + n <= max_order)
            .prop_map(|(rz, m, n, re, im)| (Monomial::new(rz, m, n), c(re, im)));
        proptest::collection::vec(term, 1..5).prop_map(OperatorPoly::from_terms)
    }

    proptest! {
        #[test]
        fn product_matches_truncated_matrices(p in arb_poly(3), q in arb_poly(3)) {
            let cutoff = 12;
            let product = p.multiply(&q);
            let lhs = represent(&product, cutoff);
            let rhs = represent(&p, cutoff) * represent(&q, cutoff);
            assert_block_equal(&lhs, &rhs, cutoff, cutoff - 6);
        }

        #[test]
        fn products_stay_canonical(p in arb_poly(4), q in arb_poly(4)) {
            let product = p.multiply(&q);
            let bound = p.degree() + q.degree();
            for (m, _) in product.terms() {
                prop_assert!(m.order() <= bound);
            }
        }

        #[test]
        fn adjoint_is_an_involution(p in arb_poly(6)) {
            prop_assert_eq!(p.adjoint().adjoint(), p);
        }

        #[test]
        fn self_commutator_vanishes(p in arb_poly(4)) {
            prop_assert!(p.commutator(&p).is_zero());
        }

        #[test]
        fn adjoint_reverses_products(p in arb_poly(3), q in arb_poly(3)) {
            let lhs = p.multiply(&q).adjoint();
            let rhs = q.adjoint().multiply(&p.adjoint());
            let diff = lhs - rhs;
            let scale = p.multiply(&q).terms().map(|(_, c)| c.norm()).fold(1.0, f64::max);
            for (_, c) in diff.terms() {
                prop_assert!(c.norm() < 1e-12 * scale);
            }
        }
    }
}
