//! Twisted families `a -> F_a` of binary forms and their coefficient sequences.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::poly::{IntPolynomial, RatPolynomial};
use crate::numfield::{FieldElement, NumberField};

/// `Phi_m` by dividing `X^m - 1` by `Phi_e` for every proper divisor `e`.
pub fn cyclotomic(m: u64) -> IntPolynomial {
    assert!(m >= 1);
    let mut p = RatPolynomial::monomial(BigRational::one(), m as usize) - RatPolynomial::one();
    for e in 1..m {
        if m.is_multiple_of(e) {
            p = p.div_rem(&cyclotomic(e).to_rat()).0;
        }
    }
    p.to_int().expect("cyclotomic polynomials are integral")
}

fn euler_phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Whether a monic integer polynomial is a cyclotomic polynomial.
/// `phi(m) >= sqrt(m/2)`, so `m <= 2k^2` for degree `k`.
pub fn is_cyclotomic(p: &IntPolynomial) -> bool {
    let k = p.degree() as u64;
    if !p.is_monic() || k == 0 {
        return false;
    }
    (1..=2 * k * k)
        .filter(|&m| euler_phi(m) == k)
        .any(|m| &cyclotomic(m) == p)
}

/// The family `a -> F_a` attached to `alpha` and a unit `eps` of infinite order.
#[derive(Clone, Debug)]
pub struct TwistedFamily {
    field: Arc<NumberField>,
    alpha: FieldElement,
    eps: FieldElement,
    eps_inv: FieldElement,
    delta: i64,
    nu: usize,
}

impl TwistedFamily {
    pub fn new(field: &Arc<NumberField>, alpha: FieldElement, eps: FieldElement) -> Result<Self> {
        if alpha.field() != field || eps.field() != field {
            return Err(Error::FieldMismatch);
        }
        if alpha.is_zero() {
            return Err(Error::AlphaZero);
        }
        let d = field.degree();
        let ma = alpha.min_poly();
        if ma.degree() < d {
            return Err(Error::AlphaNotPrimitive {
                degree: ma.degree(),
                field_degree: d,
            });
        }
        if !ma.is_monic() {
            return Err(Error::InvalidParameters(
                "alpha must be an algebraic integer".into(),
            ));
        }
        if !eps.is_unit() {
            return Err(Error::NotAUnit);
        }
        let me = eps.min_poly();
        if is_cyclotomic(&me) {
            return Err(Error::TorsionUnit);
        }
        let k = me.degree();
        let c0 = me.coeff(0).to_i64().expect("unit norm is +-1");
        let delta = if k.is_multiple_of(2) { c0 } else { -c0 };
        let eps_inv = eps.inv()?;
        Ok(Self {
            field: Arc::clone(field),
            alpha,
            eps,
            eps_inv,
            delta,
            nu: d / k,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn eps(&self) -> &FieldElement {
        &self.eps
    }

    /// Norm of `eps` over `Q(eps)`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// `[K : Q(eps)]`.
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    /// `eps^a`, inverting once for negative `a`.
    pub fn eps_pow(&self, a: i64) -> FieldElement {
        let base = if a < 0 { &self.eps_inv } else { &self.eps };
        base.pow(a.unsigned_abs() as i64).expect("unit powers")
    }

    /// `alpha * eps^a`.
    pub fn gamma(&self, a: i64) -> FieldElement {
        &self.alpha * &self.eps_pow(a)
    }
}

/// `F(X, Y) = sum_h c_h X^(d-h) Y^h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinaryForm {
    pub degree: usize,
    #[serde(serialize_with = "crate::serde_util::bigints")]
    pub coeffs: Vec<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty());
        Self {
            degree: coeffs.len() - 1,
            coeffs,
            a: None,
        }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| c.into()).collect())
    }

    pub fn with_a(mut self, a: i64) -> Self {
        self.a = Some(a);
        self
    }

    /// `F(X, 1)`.
    pub fn dehomogenize(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let mut acc = self.coeffs[0].clone();
        let mut ypow = BigInt::one();
        for c in &self.coeffs[1..] {
            ypow *= y;
            acc = acc * x + c * &ypow;
        }
        acc
    }

    /// `U_h = (-1)^h c_h`.
    pub fn u(&self, h: usize) -> BigInt {
        if h.is_multiple_of(2) {
            self.coeffs[h].clone()
        } else {
            -self.coeffs[h].clone()
        }
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// `a,c_0,...,c_d`.
    pub fn csv_row(&self) -> String {
        let mut parts = vec![self.a.map(|a| a.to_string()).unwrap_or_default()];
        parts.extend(self.coeffs.iter().map(|c| c.to_string()));
        parts.join(",")
    }
}

pub fn evaluate(form: &BinaryForm, x: &BigInt, y: &BigInt) -> BigInt {
    form.evaluate(x, y)
}

/// Homogenized minimal polynomial of `alpha eps^a`.
pub fn form_at(family: &TwistedFamily, a: i64) -> Result<BinaryForm> {
    let d = family.degree();
    let cp = family.gamma(a).charpoly();
    let m = cp.squarefree_part();
    if m.degree() < d {
        return Err(Error::DegenerateDegree {
            a,
            degree: m.degree(),
            field_degree: d,
        });
    }
    let ints = cp.to_int().expect("alpha eps^a is an algebraic integer");
    let coeffs = (0..=d).map(|h| ints.coeff(d - h)).collect();
    Ok(BinaryForm::new(coeffs).with_a(a))
}

/// `U_h(a)`, the `h`-th elementary symmetric function of the conjugates of `alpha eps^a`.
#[allow(non_snake_case)]
pub fn coefficient_U(family: &TwistedFamily, h: usize, a: i64) -> Result<BigInt> {
    let d = family.degree();
    if h > d {
        return Err(Error::UnsupportedIndex(h));
    }
    Ok(form_at(family, a)?.u(h))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Excluded {
    pub a: i64,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AdmissibleReport {
    pub admissible: Vec<i64>,
    pub excluded: Vec<Excluded>,
}

pub fn admissible_range(family: &TwistedFamily, a_min: i64, a_max: i64) -> AdmissibleReport {
    let d = family.degree();
    let mut report = AdmissibleReport {
        admissible: Vec::new(),
        excluded: Vec::new(),
    };
    for a in a_min..=a_max {
        let deg = family.gamma(a).degree();
        if deg == d {
            report.admissible.push(a);
        } else {
            report.excluded.push(Excluded { a, degree: deg });
        }
    }
    report
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct UdReport {
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<i64>,
}

/// Checks `U_d(a) = delta^nu U_d(a-1)` for consecutive admissible `a`,
/// and `U_d(0) = N(alpha)` when 0 is in range.
#[allow(non_snake_case)]
pub fn check_Ud_recurrence(family: &TwistedFamily, a_min: i64, a_max: i64) -> Result<UdReport> {
    let d = family.degree();
    let factor = BigInt::from(family.delta()).pow(family.nu() as u32);
    let admissible = admissible_range(family, a_min, a_max).admissible;
    let mut values = Vec::with_capacity(admissible.len());
    for &a in &admissible {
        values.push((a, coefficient_U(family, d, a)?));
    }
    let mut checked = 0;
    for w in values.windows(2) {
        let ((a0, u0), (a1, u1)) = (&w[0], &w[1]);
        if *a1 != a0 + 1 {
            continue;
        }
        checked += 1;
        if *u1 != &factor * u0 {
            return Ok(UdReport {
                passed: false,
                checked,
                counterexample: Some(*a1),
            });
        }
    }
    // U_d(0) is the norm of alpha.
    if let Some((_, u)) = values.iter().find(|(a, _)| *a == 0) {
        checked += 1;
        if BigRational::from_integer(u.clone()) != family.alpha().norm() {
            return Ok(UdReport {
                passed: false,
                checked,
                counterexample: Some(0),
            });
        }
    }
    Ok(UdReport {
        passed: true,
        checked,
        counterexample: None,
    })
}

pub fn is_primitive(form: &BinaryForm) -> bool {
    form.content().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::FieldExt;

    fn shanks1() -> TwistedFamily {
        let k = NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap();
        let lam = k.generator();
        let lam2 = -&(&lam + &k.one()).inv().unwrap();
        TwistedFamily::new(&k, lam, lam2).unwrap()
    }

    fn bh121() -> TwistedFamily {
        let k = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
        let w = k.generator();
        let alpha = &k.one() + &w;
        let eps = &k.one() + &w.pow(2).unwrap();
        TwistedFamily::new(&k, alpha, eps).unwrap()
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic(1), IntPolynomial::from_i64s(&[-1, 1]));
        assert_eq!(cyclotomic(6), IntPolynomial::from_i64s(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), IntPolynomial::from_i64s(&[1, 0, -1, 0, 1]));
        assert!(is_cyclotomic(&IntPolynomial::from_i64s(&[1, 1, 1])));
        assert!(!is_cyclotomic(&IntPolynomial::from_i64s(&[-1, -1, 1])));
    }

    #[test]
    fn family_invariants() {
        let f = shanks1();
        assert_eq!((f.delta(), f.nu()), (1, 1));
        let g = bh121();
        assert_eq!((g.delta(), g.nu()), (-1, 2));
        let k = g.field().clone();
        assert_eq!(
            TwistedFamily::new(&k, g.alpha().clone(), k.one()).unwrap_err(),
            Error::TorsionUnit
        );
        assert_eq!(
            TwistedFamily::new(&k, g.alpha().clone(), k.from_i64(-1)).unwrap_err(),
            Error::TorsionUnit
        );
        assert_eq!(
            TwistedFamily::new(&k, k.zero(), g.eps().clone()).unwrap_err(),
            Error::AlphaZero
        );
        assert!(matches!(
            TwistedFamily::new(&k, k.from_i64(3), g.eps().clone()),
            Err(Error::AlphaNotPrimitive { .. })
        ));
        assert_eq!(
            TwistedFamily::new(&k, g.alpha().clone(), k.from_i64(2)).unwrap_err(),
            Error::NotAUnit
        );
    }

    #[test]
    fn forms_at_examples() {
        let f = shanks1();
        assert_eq!(form_at(&f, 0).unwrap().coeffs, BinaryForm::from_i64s(&[1, 0, -3, -1]).coeffs);
        assert_eq!(form_at(&f, 1).unwrap().coeffs, BinaryForm::from_i64s(&[1, 3, 0, -1]).coeffs);
        let g = bh121();
        assert_eq!(
            form_at(&g, 0).unwrap().coeffs,
            BinaryForm::from_i64s(&[1, -4, 6, -4, -1]).coeffs
        );
        assert_eq!(coefficient_U(&g, 1, 0).unwrap(), BigInt::from(4));
        assert_eq!(coefficient_U(&g, 2, 1).unwrap(), BigInt::from(-6));
        assert_eq!(coefficient_U(&g, 4, 0).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn degenerate_twist() {
        let g = bh121();
        let k = g.field().clone();
        // eps^2 lies in the quadratic subfield
        let alpha = g.eps().pow(2).unwrap();
        assert!(TwistedFamily::new(&k, alpha, g.eps().clone()).is_err());

        let f = shanks1();
        let k3 = f.field().clone();
        let alpha = f.eps().pow(2).unwrap();
        let fam = TwistedFamily::new(&k3, alpha, f.eps().clone()).unwrap();
        let report = admissible_range(&fam, -3, 3);
        assert_eq!(report.excluded, vec![Excluded { a: -2, degree: 1 }]);
        assert_eq!(report.admissible.len(), 6);
        assert!(matches!(
            form_at(&fam, -2),
            Err(Error::DegenerateDegree { a: -2, degree: 1, .. })
        ));
    }

    #[test]
    fn shanks_window_all_admissible() {
        let r = admissible_range(&shanks1(), -5, 5);
        assert_eq!(r.admissible.len(), 11);
        assert!(r.excluded.is_empty());
    }

    #[test]
    fn evaluate_examples() {
        let f = form_at(&shanks1(), 0).unwrap();
        let b = |n: i64| BigInt::from(n);
        assert_eq!(f.evaluate(&b(1), &b(0)), b(1));
        assert_eq!(f.evaluate(&b(2), &b(1)), b(1));
        assert_eq!(f.evaluate(&b(1), &b(-3)), b(1));
        assert_eq!(f.csv_row(), "0,1,0,-3,-1");
    }

    #[test]
    fn ud_recurrence() {
        let r = check_Ud_recurrence(&shanks1(), -4, 4).unwrap();
        assert!(r.passed);
        let g = bh121();
        assert!(check_Ud_recurrence(&g, -3, 3).unwrap().passed);
        for a in -3..=3 {
            assert_eq!(coefficient_U(&g, 4, a).unwrap(), BigInt::from(-1));
        }
        let single = check_Ud_recurrence(&g, 2, 2).unwrap();
        assert!(single.passed);
    }
}
