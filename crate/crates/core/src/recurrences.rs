//! Exact linear recurrences: verification, minimal fitting, and the
//! characteristic polynomials predicted for quadratic and cubic units.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfield::ball::CBall;
use crate::numfield::poly::{IntPolynomial, RatPolynomial};
use crate::numfield::roots::isolate_roots;
use crate::numfield::{FieldElement, FieldExt, NumberField};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Consecutive values `s_base, s_{base+1}, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceWindow {
    pub base: i64,
    #[serde(serialize_with = "crate::serde_util::rationals")]
    pub values: Vec<BigRational>,
}

impl SequenceWindow {
    /// Panics on an empty window.
    pub fn new(base: i64, values: Vec<BigRational>) -> Self {
        assert!(!values.is_empty(), "empty sequence window");
        Self { base, values }
    }

    pub fn from_ints(base: i64, values: Vec<BigInt>) -> Self {
        Self::new(base, values.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn from_i64s(base: i64, values: &[i64]) -> Self {
        Self::from_ints(base, values.iter().map(|&v| v.into()).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the last value.
    pub fn end(&self) -> i64 {
        self.base + self.values.len() as i64 - 1
    }

    pub fn get(&self, a: i64) -> Option<&BigRational> {
        let i = a.checked_sub(self.base)?;
        usize::try_from(i).ok().and_then(|i| self.values.get(i))
    }
}

/// `s_{a+k} = -sum_{i<k} p_i s_{a+i}` for `charpoly = T^k + sum p_i T^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    charpoly: RatPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceCheck {
    pub passed: bool,
    pub checked: usize,
    pub first_failure: Option<i64>,
}

impl LinearRecurrence {
    /// Order zero (`charpoly = 1`) only describes the zero sequence.
    pub fn new(charpoly: RatPolynomial) -> Result<Self> {
        if charpoly.is_zero() || !charpoly.is_monic() {
            return Err(Error::InvalidParameters(
                "characteristic polynomial must be monic".into(),
            ));
        }
        Ok(Self { charpoly })
    }

    pub fn from_int(p: &IntPolynomial) -> Result<Self> {
        Self::new(p.to_rat())
    }

    /// From `s_{a+k} = sum_i coeffs[i] s_{a+k-1-i}`.
    pub fn from_coefficients(coeffs: &[BigRational]) -> Self {
        let k = coeffs.len();
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        for (i, c) in coeffs.iter().enumerate() {
            p[k - 1 - i] = -c.clone();
        }
        Self {
            charpoly: RatPolynomial::new(p),
        }
    }

    pub fn order(&self) -> usize {
        self.charpoly.degree()
    }

    pub fn charpoly(&self) -> &RatPolynomial {
        &self.charpoly
    }

    /// Residual `sum_i p_i s_{a+i}` with `p_k = 1`, or `None` outside the window.
    fn residual(&self, w: &SequenceWindow, a: i64) -> Option<BigRational> {
        let k = self.order();
        let mut acc = BigRational::zero();
        for i in 0..=k {
            let c = self.charpoly.coeff(i);
            if !c.is_zero() {
                acc += c * w.get(a + i as i64)?;
            }
        }
        Some(acc)
    }

    pub fn verify(&self, w: &SequenceWindow) -> Result<RecurrenceCheck> {
        verify_recurrence(self, w)
    }
}

pub fn verify_recurrence(rec: &LinearRecurrence, w: &SequenceWindow) -> Result<RecurrenceCheck> {
    let k = rec.order();
    if w.len() < k + 1 {
        return Err(Error::WindowTooShort {
            needed: k + 1,
            got: w.len(),
        });
    }
    let mut checked = 0;
    for a in w.base..=w.end() - k as i64 {
        checked += 1;
        if !rec.residual(w, a).expect("index in window").is_zero() {
            return Ok(RecurrenceCheck {
                passed: false,
                checked,
                first_failure: Some(a + k as i64),
            });
        }
    }
    Ok(RecurrenceCheck {
        passed: true,
        checked,
        first_failure: None,
    })
}

/// Berlekamp-Massey over Q. Returns the connection polynomial
/// `1 + c_1 x + ... + c_L x^L` (padded to length `L + 1`) and `L`.
fn berlekamp_massey(s: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = BigRational::one();
    for n in 0..s.len() {
        let mut disc = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            disc += &c[i] * &s[n - i];
        }
        if disc.is_zero() {
            m += 1;
            continue;
        }
        let coef = &disc / &last;
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            b = std::mem::replace(&mut c, next);
            l = n + 1 - l;
            last = disc;
            m = 1;
        } else {
            c = next;
            m += 1;
        }
    }
    c.resize(l + 1, BigRational::zero());
    (c, l)
}

/// Minimal-order recurrence satisfied by the window. The order `L` is only
/// certified when the window has at least `2L + 1` values.
pub fn fit_minimal_recurrence(w: &SequenceWindow, max_order: usize) -> Result<LinearRecurrence> {
    let (c, l) = berlekamp_massey(&w.values);
    if l > max_order {
        return Err(Error::NoRecurrenceFound { max_order });
    }
    if w.len() < 2 * l + 1 {
        return Err(Error::WindowTooShort {
            needed: 2 * l + 1,
            got: w.len(),
        });
    }
    // charpoly(T) = T^L C(1/T)
    let coeffs = c.into_iter().rev().collect();
    LinearRecurrence::new(RatPolynomial::new(coeffs))
}

/// `Q(eps)` with `eps^2 - t eps + delta = 0`, plus `eps` and its conjugate.
fn quadratic_unit_field(t: &BigInt, delta: &BigInt) -> Result<(FieldElement, FieldElement)> {
    let p = IntPolynomial::new(vec![delta.clone(), -t.clone(), BigInt::one()]);
    let k = NumberField::new(p.clone()).map_err(|e| match e {
        Error::IrreducibilityFailed { .. } | Error::NotSquarefree => {
            Error::NotIrreducible(p.to_string())
        }
        other => other,
    })?;
    let eps = k.generator();
    let bar = &k.from_rational(BigRational::from_integer(t.clone())) - &eps;
    Ok((eps, bar))
}

/// `prod (T - r)` for field-element roots, asserting rational integer coefficients.
fn product_over_field(roots: &[FieldElement]) -> Result<IntPolynomial> {
    let k = roots[0].field().clone();
    let mut coeffs = vec![k.one()];
    for r in roots {
        let mut next = vec![k.zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        coeffs = next;
    }
    let ints = coeffs
        .iter()
        .map(|c| {
            c.as_rational()
                .filter(|q| q.is_integer())
                .map(|q| q.to_integer())
                .ok_or_else(|| {
                    Error::InvalidParameters(format!("non-integral product coefficient {c}"))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(ints))
}

/// `prod_{l=0..h} (T - eps^l epsbar^(h-l))`, of degree `h + 1`.
pub fn quadratic_unit_charpoly(t: i64, delta: i64, h: usize) -> Result<IntPolynomial> {
    let (eps, bar) = quadratic_unit_field(&t.into(), &delta.into())?;
    let roots: Vec<FieldElement> = (0..=h)
        .map(|l| &eps.pow(l as i64).unwrap() * &bar.pow((h - l) as i64).unwrap())
        .collect();
    product_over_field(&roots)
}

/// `prod_{l=0..d-h} (T - delta^(d/2) eps^-l epsbar^-(d-h-l))`, of degree `d - h + 1`.
pub fn quadratic_unit_dual_charpoly(t: i64, delta: i64, d: usize, h: usize) -> Result<IntPolynomial> {
    if d % 2 == 1 {
        return Err(Error::OddDegreeUnsupported(d));
    }
    if h > d {
        return Err(Error::UnsupportedIndex(h));
    }
    let (eps, bar) = quadratic_unit_field(&t.into(), &delta.into())?;
    let k = eps.field().clone();
    let scale = k.from_rational(rat(BigInt::from(delta).pow((d / 2) as u32)));
    let roots: Vec<FieldElement> = (0..=d - h)
        .map(|l| {
            let m = &eps.pow(-(l as i64)).unwrap() * &bar.pow(-((d - h - l) as i64)).unwrap();
            &scale * &m
        })
        .collect();
    product_over_field(&roots)
}

/// `U_2(a+2) = c1 U_2(a+1) + c2 U_2(a) + c3 delta^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InhomogeneousRecurrence {
    pub homogeneous: LinearRecurrence,
    pub forcing_base: i64,
    pub forcing_coeff: BigRational,
}

impl InhomogeneousRecurrence {
    /// `(c1, c2)` read off the homogeneous part `T^2 - c1 T - c2`.
    pub fn c1_c2(&self) -> (BigRational, BigRational) {
        let p = self.homogeneous.charpoly();
        (-p.coeff(1), -p.coeff(0))
    }

    fn forcing(&self, a: i64) -> BigRational {
        let sign = if self.forcing_base == -1 && a.rem_euclid(2) == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        &self.forcing_coeff * sign
    }

    pub fn verify(&self, w: &SequenceWindow) -> Result<RecurrenceCheck> {
        if w.len() < 3 {
            return Err(Error::WindowTooShort { needed: 3, got: w.len() });
        }
        let (c1, c2) = self.c1_c2();
        let mut checked = 0;
        for a in w.base..=w.end() - 2 {
            checked += 1;
            let lhs = w.get(a + 2).unwrap();
            let rhs = &c1 * w.get(a + 1).unwrap() + &c2 * w.get(a).unwrap() + self.forcing(a);
            if *lhs != rhs {
                return Ok(RecurrenceCheck {
                    passed: false,
                    checked,
                    first_failure: Some(a + 2),
                });
            }
        }
        Ok(RecurrenceCheck {
            passed: true,
            checked,
            first_failure: None,
        })
    }
}

/// Solves for the forcing coefficient from `U_2(-1), U_2(0), U_2(1)`, where
/// `T^2 - c1 T - c2 = (T - eps^2)(T - epsbar^2)`. Callers verify the result
/// over the whole window with [`InhomogeneousRecurrence::verify`].
#[allow(non_snake_case)]
pub fn inhomogeneous_U2(t: i64, delta: i64, w: &SequenceWindow) -> Result<InhomogeneousRecurrence> {
    if delta.abs() != 1 {
        return Err(Error::InvalidParameters("delta must be +-1".into()));
    }
    let (Some(um1), Some(u0), Some(u1)) = (w.get(-1), w.get(0), w.get(1)) else {
        return Err(Error::WindowTooShort {
            needed: 3,
            got: w.len(),
        });
    };
    let c1 = rat(t * t - 2 * delta);
    let c2 = rat(-(delta * delta));
    // a = -1: U_2(1) = c1 U_2(0) + c2 U_2(-1) + c3 delta^-1
    let c3 = (u1 - &c1 * u0 - &c2 * um1) * rat(delta);
    Ok(InhomogeneousRecurrence {
        homogeneous: LinearRecurrence::from_coefficients(&[c1, c2]),
        forcing_base: delta,
        forcing_coeff: c3,
    })
}

fn cubic_is_irreducible(r: i64, s: i64, delta: i64) -> Result<()> {
    // Monic with constant term -delta: only +-1 can be rational roots.
    if delta.abs() != 1 || r - s == 1 - delta || r + s == -1 - delta {
        return Err(Error::NotIrreducible(format!(
            "T^3 - ({r})T^2 + ({s})T - ({delta})"
        )));
    }
    Ok(())
}

/// Recurrences for `U_1` (`T^3 - rT^2 + sT - delta`) and `U_{d-1}`
/// (`T^3 - delta^(d+1) s T^2 + delta r T - delta^(d+1)`).
pub fn cubic_unit_recurrences(
    r: i64,
    s: i64,
    delta: i64,
    d: usize,
) -> Result<(LinearRecurrence, LinearRecurrence)> {
    cubic_is_irreducible(r, s, delta)?;
    let dd = if d % 2 == 1 { 1 } else { delta };
    let u1 = LinearRecurrence::from_int(&IntPolynomial::from_i64s(&[-delta, s, -r, 1]))?;
    let dual = LinearRecurrence::from_int(&IntPolynomial::from_i64s(&[-dd, delta * r, -dd * s, 1]))?;
    Ok((u1, dual))
}

/// `(U_1(-1), U_1(0), U_1(1))` for `alpha = A + B eps + C eps^2`.
pub fn cubic_initial_conditions(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    r: i64,
    s: i64,
    delta: i64,
) -> [BigRational; 3] {
    let (r, s, dl) = (rat(r), rat(s), rat(delta));
    let three = rat(3);
    let p2 = &r * &r - rat(2) * &s;
    let p3 = &r * &r * &r - &three * &r * &s + &three * &dl;
    [
        a * &dl * &s + &three * b + c * &r,
        &three * a + b * &r + c * &p2,
        a * &r + b * &p2 + c * &p3,
    ]
}

/// All exponent triples `(l1, l2, l3)` with sum `h`.
fn monomials(h: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for l1 in 0..=h {
        for l2 in 0..=h - l1 {
            out.push([l1, l2, h - l1 - l2]);
        }
    }
    out
}

/// `prod_{l1+l2+l3=h} (T - eps1^l1 eps2^l2 eps3^l3)`, of degree `(h+1)(h+2)/2`,
/// from certified root enclosures. Every coefficient enclosure must contain
/// exactly one integer; precision doubles (up to 16x) until it does.
pub fn cubic_unit_charpoly(r: i64, s: i64, delta: i64, h: usize, precision: u64) -> Result<IntPolynomial> {
    cubic_is_irreducible(r, s, delta)?;
    let p = IntPolynomial::from_i64s(&[-delta, s, -r, 1]);
    let mut bits = precision.max(64);
    let limit = 16 * bits;
    loop {
        if let Some(poly) = cubic_product_at(&p, h, bits)? {
            return Ok(poly);
        }
        if bits * 2 > limit {
            return Err(Error::PrecisionExhausted { bits });
        }
        bits *= 2;
    }
}

fn cubic_product_at(p: &IntPolynomial, h: usize, bits: u64) -> Result<Option<IntPolynomial>> {
    let roots = match isolate_roots(p, bits) {
        Ok(r) => r,
        Err(Error::PrecisionExhausted { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let prec = 2 * bits;
    let mut coeffs = vec![CBall::one()];
    for l in monomials(h) {
        let mut root = CBall::one();
        for (i, &e) in l.iter().enumerate() {
            for _ in 0..e {
                root = root.mul(&roots[i].value, prec);
            }
        }
        let mut next = vec![CBall::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c, prec);
            next[i] = next[i].sub(&c.mul(&root, prec), prec);
        }
        coeffs = next;
    }
    let ints: Option<Vec<BigInt>> = coeffs.iter().map(|c| c.unique_integer()).collect();
    Ok(ints.map(IntPolynomial::new))
}

/// Fitted vs. predicted recurrence for one coefficient sequence.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub h: usize,
    pub predicted_order: usize,
    pub fitted_order: usize,
    pub predicted_charpoly: RatPolynomial,
    pub fitted_charpoly: RatPolynomial,
    /// The fitted charpoly divides the predicted one.
    pub divides: bool,
    /// The predicted recurrence holds on the whole window.
    pub verified: bool,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.divides && self.verified && self.fitted_order <= self.predicted_order
    }
}

pub fn recurrence_report(
    h: usize,
    predicted: &LinearRecurrence,
    w: &SequenceWindow,
) -> Result<RecurrenceReport> {
    let fitted = fit_minimal_recurrence(w, predicted.order().max(1) * 4)?;
    let verified = verify_recurrence(predicted, w)?.passed;
    Ok(RecurrenceReport {
        h,
        predicted_order: predicted.order(),
        fitted_order: fitted.order(),
        divides: fitted.charpoly().divides(predicted.charpoly()),
        predicted_charpoly: predicted.charpoly().clone(),
        fitted_charpoly: fitted.charpoly().clone(),
        verified,
    })
}

/// Default window `[-(2k+2), 2k+2]` for largest candidate order `k`.
pub fn default_window(k: usize) -> (i64, i64) {
    let w = 2 * k as i64 + 2;
    (-w, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(p: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(p)
    }

    #[test]
    fn verify_examples() {
        let ones = SequenceWindow::from_i64s(0, &[1, 1, 1]);
        let rec = LinearRecurrence::from_int(&ints(&[-1, 1])).unwrap();
        assert!(verify_recurrence(&rec, &ones).unwrap().passed);
        let fib = SequenceWindow::from_i64s(0, &[1, 1, 2, 3, 5]);
        let r = verify_recurrence(&rec, &fib).unwrap();
        assert_eq!(r.first_failure, Some(2));
        let short = SequenceWindow::from_i64s(0, &[1]);
        assert!(matches!(
            verify_recurrence(&rec, &short),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn fit_examples() {
        let geo = SequenceWindow::from_i64s(-2, &[1, 2, 4, 8, 16]);
        let geo = SequenceWindow::new(
            -2,
            geo.values
                .iter()
                .map(|v| v / BigRational::from_integer(4.into()))
                .collect(),
        );
        let f = fit_minimal_recurrence(&geo, 4).unwrap();
        assert_eq!(f.charpoly(), &RatPolynomial::from_i64s(&[-2, 1]));
        let fib = SequenceWindow::from_i64s(0, &[0, 1, 1, 2, 3, 5, 8, 13]);
        let f = fit_minimal_recurrence(&fib, 4).unwrap();
        assert_eq!(f.charpoly(), &RatPolynomial::from_i64s(&[-1, -1, 1]));
        let zero = SequenceWindow::from_i64s(0, &[0, 0, 0]);
        assert_eq!(fit_minimal_recurrence(&zero, 2).unwrap().order(), 0);
        assert!(matches!(
            fit_minimal_recurrence(&fib, 1),
            Err(Error::NoRecurrenceFound { .. })
        ));
        let short = SequenceWindow::from_i64s(0, &[0, 1, 1, 2]);
        assert!(matches!(
            fit_minimal_recurrence(&short, 4),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn quadratic_charpolys() {
        assert_eq!(quadratic_unit_charpoly(3, 1, 1).unwrap(), ints(&[1, -3, 1]));
        // t = 2D^n = 2, delta = -c = -1 (D = 1, n = 2, c = 1)
        assert_eq!(quadratic_unit_charpoly(2, -1, 1).unwrap(), ints(&[-1, -2, 1]));
        // T^3 - (4D^4 + c)T^2 - (4cD^4 + 1)T + c with D = 1, c = 1
        assert_eq!(quadratic_unit_charpoly(2, -1, 2).unwrap(), ints(&[1, -5, -5, 1]));
        assert!(matches!(
            quadratic_unit_charpoly(2, 1, 1),
            Err(Error::NotIrreducible(_))
        ));
    }

    #[test]
    fn dual_charpolys() {
        // D = 1, c = 1, d = 4, h = 3: T^2 + 2cD^2 T - c
        assert_eq!(quadratic_unit_dual_charpoly(2, -1, 4, 3).unwrap(), ints(&[-1, 2, 1]));
        // h = d: single linear factor T - delta^(d/2)
        assert_eq!(quadratic_unit_dual_charpoly(2, -1, 4, 4).unwrap(), ints(&[-1, 1]));
        assert_eq!(
            quadratic_unit_dual_charpoly(2, -1, 3, 1).unwrap_err(),
            Error::OddDegreeUnsupported(3)
        );
    }

    #[test]
    fn inhomogeneous_zero_sequence() {
        let w = SequenceWindow::from_i64s(-1, &[0, 0, 0, 0]);
        let rec = inhomogeneous_U2(2, -1, &w).unwrap();
        assert!(rec.forcing_coeff.is_zero());
        assert!(rec.verify(&w).unwrap().passed);
        let w = SequenceWindow::from_i64s(0, &[0, 0, 0]);
        assert!(matches!(inhomogeneous_U2(2, -1, &w), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn cubic_examples() {
        // Shanks n: r = n - 1, s = -(n + 2), delta = 1
        for n in -3i64..=5 {
            let (u1, dual) = cubic_unit_recurrences(n - 1, -(n + 2), 1, 3).unwrap();
            assert_eq!(u1.charpoly(), &RatPolynomial::from_i64s(&[-1, -(n + 2), -(n - 1), 1]));
            assert_eq!(dual.charpoly(), &RatPolynomial::from_i64s(&[-1, n - 1, n + 2, 1]));
        }
        // r - s = 1 - delta
        assert!(cubic_unit_recurrences(1, 1, 1, 3).is_err());
        let one = BigRational::one();
        let z = BigRational::zero();
        let [m1, u0, u1] = cubic_initial_conditions(&z, &one, &z, 4, -7, 1);
        assert_eq!((m1, u0, u1), (rat(3), rat(4), rat(16 + 14)));
        let [m1, u0, u1] = cubic_initial_conditions(&one, &z, &z, 4, -7, 1);
        assert_eq!((m1, u0, u1), (rat(-7), rat(3), rat(4)));
    }

    #[test]
    fn cubic_products() {
        assert_eq!(cubic_unit_charpoly(0, -3, 1, 1, 64).unwrap(), ints(&[-1, -3, 0, 1]));
        let p2 = cubic_unit_charpoly(0, -3, 1, 2, 64).unwrap();
        assert_eq!(p2.degree(), 6);
        assert_eq!(p2.coeff(0), BigInt::one());
    }
}
