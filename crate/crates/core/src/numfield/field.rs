use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::ball::{Ball, CBall};
use super::poly::{rational_to_string, IntPolynomial, RatPolynomial};
use super::roots::{isolate_roots, isolate_roots_adaptive, RootEnclosure};
use super::sturm::count_real_roots;
use crate::error::{Error, Result};

/// Largest number of real-root / conjugate-pair groups for which the
/// factor search in [`NumberField::new`] enumerates all subsets.
const MAX_FACTOR_GROUPS: usize = 18;

/// `K = Q[X]/(f)` for a monic irreducible integer polynomial `f`.
#[derive(Debug)]
pub struct NumberField {
    defining_poly: IntPolynomial,
    modulus: RatPolynomial,
    /// `Tr(X^k)` for `k < d`.
    power_traces: Vec<BigRational>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.defining_poly == other.defining_poly
    }
}

impl Eq for NumberField {}

fn integer_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1 << 40 {
        return None;
    }
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            out.push(BigInt::from(n / k));
        }
        k += 1;
    }
    Some(out)
}

/// Product of `(X - r)` over the given enclosures.
fn root_product(roots: &[&CBall], prec: u64) -> Vec<CBall> {
    let mut coeffs = vec![CBall::one()];
    for r in roots {
        let mut next = vec![CBall::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c, prec);
            next[i] = next[i].sub(&c.mul(r, prec), prec);
        }
        coeffs = next;
    }
    coeffs
}

enum FactorSearch {
    Irreducible,
    Factor(IntPolynomial),
    NeedPrecision,
    TooLarge,
}

fn search_factors(p: &IntPolynomial, roots: &[RootEnclosure], prec: u64) -> FactorSearch {
    let d = p.degree();
    // Groups closed under conjugation: a real root, or a pair.
    let mut groups: Vec<Vec<&CBall>> = Vec::new();
    let mut used = vec![false; d];
    for i in 0..d {
        if used[i] {
            continue;
        }
        used[i] = true;
        if roots[i].is_real {
            groups.push(vec![&roots[i].value]);
            continue;
        }
        let conj = roots[i].value.conj();
        let partner = (0..d).find(|&j| !used[j] && !roots[j].is_real && roots[j].value.overlaps(&conj));
        match partner {
            Some(j) => {
                used[j] = true;
                groups.push(vec![&roots[i].value, &roots[j].value]);
            }
            None => return FactorSearch::NeedPrecision,
        }
    }
    if groups.len() > MAX_FACTOR_GROUPS {
        return FactorSearch::TooLarge;
    }
    let target = p.to_rat();
    let mut need_precision = false;
    for mask in 1u64..(1u64 << groups.len()) - 1 {
        let chosen: Vec<&CBall> = groups
            .iter()
            .enumerate()
            .filter(|(g, _)| mask >> g & 1 == 1)
            .flat_map(|(_, rs)| rs.iter().copied())
            .collect();
        if chosen.len() > d / 2 {
            continue;
        }
        let coeffs = root_product(&chosen, prec);
        let mut ints = Vec::with_capacity(coeffs.len());
        let mut possible = true;
        for c in &coeffs {
            if !c.im.contains_zero() {
                possible = false;
                break;
            }
            let (lo, hi) = (c.re.lo().ceil(), c.re.hi().floor());
            if lo > hi {
                possible = false;
                break;
            }
            if lo != hi {
                need_precision = true;
                possible = false;
                break;
            }
            ints.push(lo);
        }
        if !possible {
            continue;
        }
        let candidate = IntPolynomial::new(ints);
        if candidate.to_rat().divides(&target) {
            return FactorSearch::Factor(candidate);
        }
    }
    if need_precision {
        FactorSearch::NeedPrecision
    } else {
        FactorSearch::Irreducible
    }
}

fn check_irreducible(p: &IntPolynomial) -> Result<()> {
    let a0 = p.coeff(0);
    if a0.is_zero() {
        return Err(Error::IrreducibilityFailed {
            factor: "X".into(),
        });
    }
    if let Some(divs) = integer_divisors(&a0) {
        for r in divs {
            for cand in [r.clone(), -r] {
                if p.eval(&cand).is_zero() {
                    let f = IntPolynomial::new(vec![-cand, BigInt::one()]);
                    return Err(Error::IrreducibilityFailed {
                        factor: f.to_string(),
                    });
                }
            }
        }
    }
    let mut bits = 64;
    loop {
        let roots = isolate_roots_adaptive(p, bits, 4096)?;
        match search_factors(p, &roots, 2 * bits) {
            FactorSearch::Irreducible | FactorSearch::TooLarge => return Ok(()),
            FactorSearch::Factor(f) => {
                return Err(Error::IrreducibilityFailed {
                    factor: f.to_string(),
                })
            }
            FactorSearch::NeedPrecision if bits < 4096 => bits *= 2,
            FactorSearch::NeedPrecision => return Err(Error::PrecisionExhausted { bits }),
        }
    }
}

/// Newton sums `Tr(X^k)` for `k < d` of a monic polynomial.
fn power_sums(f: &IntPolynomial) -> Vec<BigRational> {
    let d = f.degree();
    let c = |i: usize| BigRational::from_integer(f.coeff(i));
    let mut s = vec![BigRational::from_integer(BigInt::from(d))];
    for k in 1..d {
        let mut acc = c(d - k) * BigRational::from_integer(BigInt::from(k));
        for i in 1..k {
            acc += c(d - i) * &s[k - i];
        }
        s.push(-acc);
    }
    s
}

impl NumberField {
    /// Validates `p` (monic, degree >= 2, squarefree, irreducible) and builds the field.
    ///
    /// Irreducibility: rational roots are excluded by a divisor test of the
    /// constant term, then every conjugation-closed subset of certified root
    /// enclosures of size at most `d/2` is tested as a candidate integer factor.
    /// Above `MAX_FACTOR_GROUPS` groups the subset search is skipped.
    pub fn new(p: IntPolynomial) -> Result<Arc<Self>> {
        let d = p.degree();
        if p.is_zero() || d < 2 {
            return Err(Error::DegreeTooSmall(d));
        }
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        let modulus = p.to_rat();
        if !modulus.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        check_irreducible(&p)?;
        Ok(Arc::new(Self {
            power_traces: power_sums(&p),
            defining_poly: p,
            modulus,
        }))
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Arc<Self>> {
        Self::new(IntPolynomial::from_i64s(coeffs))
    }

    pub fn defining_poly(&self) -> &IntPolynomial {
        &self.defining_poly
    }

    pub fn degree(&self) -> usize {
        self.defining_poly.degree()
    }

    /// Certified enclosures of the `d` embeddings, sorted by real part then
    /// imaginary part, each of radius at most `2^-precision_bits`.
    pub fn embeddings(&self, precision_bits: u64) -> Result<EmbeddingSet> {
        let roots = isolate_roots(&self.defining_poly, precision_bits.max(64))?;
        Ok(EmbeddingSet::from_roots(precision_bits.max(64), roots))
    }

    /// Like [`Self::embeddings`], doubling the precision on failure up to `max_bits`.
    pub fn embeddings_adaptive(&self, precision_bits: u64, max_bits: u64) -> Result<EmbeddingSet> {
        let mut bits = precision_bits.max(64);
        loop {
            match self.embeddings(bits) {
                Err(Error::PrecisionExhausted { .. }) if bits * 2 <= max_bits => bits *= 2,
                other => return other,
            }
        }
    }
}

/// Constructors on a shared field handle.
#[allow(clippy::wrong_self_convention)]
pub trait FieldExt {
    fn element(&self, coords: Vec<BigRational>) -> FieldElement;
    fn from_poly(&self, p: &RatPolynomial) -> FieldElement;
    fn from_rational(&self, q: BigRational) -> FieldElement;
    fn from_i64(&self, n: i64) -> FieldElement;
    fn generator(&self) -> FieldElement;
    fn zero(&self) -> FieldElement;
    fn one(&self) -> FieldElement;
}

impl FieldExt for Arc<NumberField> {
    /// Panics if `coords` has the wrong length.
    fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "coordinate vector length");
        FieldElement {
            field: Arc::clone(self),
            coords,
        }
    }

    fn from_poly(&self, p: &RatPolynomial) -> FieldElement {
        let r = p.div_rem(&self.modulus).1;
        let coords = (0..self.degree()).map(|i| r.coeff(i)).collect();
        self.element(coords)
    }

    fn from_rational(&self, q: BigRational) -> FieldElement {
        self.from_poly(&RatPolynomial::constant(q))
    }

    fn from_i64(&self, n: i64) -> FieldElement {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    fn generator(&self) -> FieldElement {
        self.from_poly(&RatPolynomial::x())
    }

    fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    fn one(&self) -> FieldElement {
        self.from_i64(1)
    }
}

/// An element of a [`NumberField`] in power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn as_poly(&self) -> RatPolynomial {
        RatPolynomial::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coords[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| self.coords[0].clone())
    }

    fn same_field(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) || self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.with_coords(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.with_coords(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect()))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(self.field.from_poly(&(&self.as_poly() * &o.as_poly())))
    }

    fn with_coords(&self, coords: Vec<BigRational>) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coords,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.with_coords(self.coords.iter().map(|c| c * k).collect())
    }

    /// Inverse via the extended Euclidean algorithm against the defining polynomial.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Invariant: s_i * u = r_i (mod f).
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.as_poly());
        let (mut s0, mut s1) = (RatPolynomial::zero(), RatPolynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant because f is irreducible.
        let c = r0.coeff(0).recip();
        Ok(self.field.from_poly(&s0.scale(&c)))
    }

    /// `u^k`; negative `k` inverts once and then uses repeated squaring.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `self`; column `j` holds the coordinates of `self * X^j`.
    #[allow(clippy::needless_range_loop)]
    pub fn mul_matrix(&self) -> Vec<Vec<BigRational>> {
        let d = self.field.degree();
        let mut m = vec![vec![BigRational::zero(); d]; d];
        let mut col = self.clone();
        let x = self.field.generator();
        for j in 0..d {
            for i in 0..d {
                m[i][j] = col.coords[i].clone();
            }
            col = &col * &x;
        }
        m
    }

    pub fn trace(&self) -> BigRational {
        self.coords
            .iter()
            .zip(&self.field.power_traces)
            .map(|(c, t)| c * t)
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// `prod (X - phi(u))` over all embeddings, from power sums and Newton's identities.
    pub fn charpoly(&self) -> RatPolynomial {
        let d = self.field.degree();
        let mut sums = Vec::with_capacity(d);
        let mut power = self.clone();
        for k in 1..=d {
            sums.push(power.trace());
            if k < d {
                power = &power * self;
            }
        }
        // e_k = (1/k) sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
        let mut e = vec![BigRational::one()];
        for k in 1..=d {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                let term = &e[k - i] * &sums[i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            e.push(acc / BigRational::from_integer(BigInt::from(k)));
        }
        let coeffs = (0..=d)
            .map(|i| {
                // coefficient of X^i is (-1)^(d-i) e_{d-i}
                let k = d - i;
                if k.is_multiple_of(2) {
                    e[k].clone()
                } else {
                    -e[k].clone()
                }
            })
            .collect();
        RatPolynomial::new(coeffs)
    }

    pub fn norm(&self) -> BigRational {
        let d = self.field.degree();
        let c0 = self.charpoly().coeff(0);
        if d.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    /// Primitive integer minimal polynomial with positive leading coefficient.
    pub fn min_poly(&self) -> IntPolynomial {
        self.charpoly().squarefree_part().to_primitive_int()
    }

    /// Degree of `Q(u)` over `Q`.
    pub fn degree(&self) -> usize {
        self.min_poly().degree()
    }

    pub fn is_totally_real(&self) -> bool {
        let m = self.min_poly();
        count_real_roots(&m.to_rat()) == m.degree()
    }

    /// Algebraic integer of norm +-1 over `Q(u)`.
    pub fn is_unit(&self) -> bool {
        let m = self.min_poly();
        m.is_monic() && m.coeff(0).abs().is_one()
    }

    /// Enclosure of `phi_index(u)`.
    pub fn eval_embedding(&self, set: &EmbeddingSet, index: usize) -> CBall {
        let prec = set.working_bits();
        let root = &set.roots[index];
        let mut acc = CBall::zero();
        for c in self.coords.iter().rev() {
            acc = acc
                .mul(root, prec)
                .add(&CBall::real(Ball::from_rational(c, prec)), prec);
        }
        acc
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coords.iter().map(rational_to_string))
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with_coords(self.coords.iter().map(|c| -c).collect())
    }
}

/// Exact determinant by Gaussian elimination over Q.
#[allow(clippy::needless_range_loop)]
pub fn determinant(matrix: &[Vec<BigRational>]) -> BigRational {
    let n = matrix.len();
    let mut m = matrix.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Certified enclosures of the embeddings `phi: K -> C`, i.e. of the roots
/// of the defining polynomial.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    pub precision_bits: u64,
    pub roots: Vec<CBall>,
    pub real: Vec<bool>,
}

impl EmbeddingSet {
    fn from_roots(precision_bits: u64, roots: Vec<RootEnclosure>) -> Self {
        Self {
            precision_bits,
            real: roots.iter().map(|r| r.is_real).collect(),
            roots: roots.into_iter().map(|r| r.value).collect(),
        }
    }

    /// Precision used when evaluating field elements at these roots.
    pub fn working_bits(&self) -> u64 {
        2 * self.precision_bits
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn real_count(&self) -> usize {
        self.real.iter().filter(|&&r| r).count()
    }

    /// Re-isolates at a higher precision.
    pub fn refine(&self, field: &NumberField, precision_bits: u64) -> Result<Self> {
        field.embeddings(precision_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn shanks1() -> Arc<NumberField> {
        NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap()
    }

    #[test]
    fn field_new_examples() {
        assert_eq!(shanks1().degree(), 3);
        assert!(matches!(
            NumberField::from_i64s(&[-1, 0, 1]),
            Err(Error::IrreducibilityFailed { .. })
        ));
        assert_eq!(NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap().degree(), 4);
        assert_eq!(NumberField::from_i64s(&[1, 0, 2]).unwrap_err(), Error::NotMonic);
        // (X^2-2)^2
        assert_eq!(
            NumberField::from_i64s(&[4, 0, -4, 0, 1]).unwrap_err(),
            Error::NotSquarefree
        );
    }

    #[test]
    fn rejects_product_of_quadratics() {
        // (X^2 - 2)(X^2 - 3) has no rational root
        let err = NumberField::from_i64s(&[6, 0, -5, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::IrreducibilityFailed { .. }), "{err:?}");
        // (X^2 + 1)(X^2 + X + 1)
        let err = NumberField::from_i64s(&[1, 1, 2, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::IrreducibilityFailed { .. }), "{err:?}");
    }

    #[test]
    fn shanks_second_root_by_inversion() {
        let k = shanks1();
        let lam = k.generator();
        let lam2 = -&(&lam + &k.one()).inv().unwrap();
        assert_eq!(lam2.min_poly(), IntPolynomial::from_i64s(&[-1, -3, 0, 1]));
        assert!(lam2.is_unit());
        assert!(lam2.is_totally_real());
        assert_eq!(lam.trace(), q(0, 1));
        assert_eq!(lam.norm(), q(1, 1));
    }

    #[test]
    fn inverse_of_fourth_root() {
        let k = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
        let w = k.generator();
        let inv = w.inv().unwrap();
        assert_eq!(inv.coords(), &[q(0, 1), q(0, 1), q(0, 1), q(1, 2)]);
        assert!((&inv * &w).is_one());
        assert!(w.pow(0).unwrap().is_one());
        assert_eq!(w.pow(-4).unwrap().as_rational(), Some(q(1, 2)));
    }

    #[test]
    fn mul_matrix_examples() {
        let k = shanks1();
        let zero = k.zero().mul_matrix();
        assert!(zero.iter().flatten().all(|c| c.is_zero()));
        let id = k.one().mul_matrix();
        for (i, row) in id.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                assert_eq!(*c, if i == j { q(1, 1) } else { q(0, 1) });
            }
        }
        // companion matrix of X^3 - 3X - 1
        let m = k.generator().mul_matrix();
        assert_eq!(m[1][0], q(1, 1));
        assert_eq!(m[2][1], q(1, 1));
        assert_eq!(m[0][2], q(1, 1));
        assert_eq!(m[1][2], q(3, 1));
        assert_eq!(m[2][2], q(0, 1));
    }

    #[test]
    fn charpoly_examples() {
        let k = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
        let alpha = &k.one() + &k.generator();
        assert_eq!(alpha.charpoly(), RatPolynomial::from_i64s(&[-1, -4, 6, -4, 1]));
        let three = k.from_i64(3);
        let expected = RatPolynomial::from_i64s(&[-3, 1]);
        let mut p = RatPolynomial::one();
        for _ in 0..4 {
            p = &p * &expected;
        }
        assert_eq!(three.charpoly(), p);
        let w2 = k.generator().pow(2).unwrap();
        assert_eq!(w2.min_poly(), IntPolynomial::from_i64s(&[-2, 0, 1]));
        assert_eq!(k.from_i64(5).min_poly(), IntPolynomial::from_i64s(&[-5, 1]));
    }

    #[test]
    fn shanks_product_charpoly() {
        let k = shanks1();
        let lam = k.generator();
        let lam2 = -&(&lam + &k.one()).inv().unwrap();
        assert_eq!(
            (&lam * &lam2).charpoly(),
            RatPolynomial::from_i64s(&[-1, 0, 3, 1])
        );
    }

    #[test]
    fn units_and_reality() {
        let k = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
        let w = k.generator();
        assert!(!w.is_totally_real());
        assert!(k.from_i64(7).is_totally_real());
        assert!(!k.from_i64(2).is_unit());
        let eps = &k.one() + &w.pow(2).unwrap();
        assert!(eps.is_unit());
    }

    #[test]
    fn embeddings_of_examples() {
        let e = shanks1().embeddings(64).unwrap();
        assert_eq!(e.real_count(), 3);
        let k4 = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
        let e4 = k4.embeddings(64).unwrap();
        assert_eq!(e4.real_count(), 2);
        assert_eq!(e4.len(), 4);
    }

    #[test]
    fn house_of_shanks_root() {
        let k = shanks1();
        let e = k.embeddings(96).unwrap();
        let house = (0..3)
            .map(|i| k.generator().eval_embedding(&e, i).re.to_f64().abs())
            .fold(0.0, f64::max);
        assert!((house - 1.879_385_241_571_817).abs() < 1e-14);
        let r = k.from_rational(q(2, 3)).eval_embedding(&e, 1);
        assert!(!r.re.contains(&super::super::ball::Dyadic::zero()));
        assert!((r.re.to_f64() - 2.0 / 3.0).abs() < 1e-15);
    }
}
