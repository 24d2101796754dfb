//! The two explicit families: the degree-`2n` Bernstein–Hasse fields
//! `Q(omega)`, `omega^(2n) = D^(2n) + c`, and Shanks' simplest cubic fields.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{form_at, BinaryForm, TwistedFamily};
use crate::numfield::poly::{parse_rational, IntPolynomial};
use crate::numfield::{FieldElement, FieldExt, NumberField};
use crate::recurrences::SequenceWindow;

/// `(-1)^k` style powers of `+-1` for any integer exponent.
fn sign_pow(base: i64, k: i64) -> BigInt {
    debug_assert!(base.abs() == 1);
    if base == -1 && k.rem_euclid(2) == 1 {
        BigInt::from(-1)
    } else {
        BigInt::one()
    }
}

/// Parameters `(D, n, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BernsteinHasseParams {
    #[serde(rename = "D")]
    pub d: u64,
    pub n: u32,
    pub c: i64,
}

impl BernsteinHasseParams {
    pub fn new(d: u64, n: u32, c: i64) -> Result<Self> {
        if d == 0 || n < 2 || c.abs() != 1 {
            return Err(Error::InvalidParameters(format!(
                "need D >= 1, n >= 2, c = +-1 (got D={d}, n={n}, c={c})"
            )));
        }
        let p = Self { d, n, c };
        if p.radicand() < BigInt::from(2) {
            return Err(Error::InvalidParameters(format!(
                "D^(2n) + c = {} < 2",
                p.radicand()
            )));
        }
        Ok(p)
    }

    fn big_d(&self) -> BigInt {
        BigInt::from(self.d)
    }

    /// `N = D^(2n) + c = omega^(2n)`.
    pub fn radicand(&self) -> BigInt {
        self.big_d().pow(2 * self.n) + self.c
    }

    pub fn degree(&self) -> usize {
        2 * self.n as usize
    }

    /// All valid cells of `{1,2,3} x {2,3,4} x {-1,1}`.
    pub fn default_grid() -> Vec<Self> {
        let mut out = Vec::new();
        for d in 1..=3 {
            for n in 2..=4 {
                for c in [-1, 1] {
                    if let Ok(p) = Self::new(d, n, c) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for BernsteinHasseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bh:D={},n={},c={}", self.d, self.n, self.c)
    }
}

/// `L + M omega^n` with `(omega^n)^2 = N`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Quad {
    l: BigInt,
    m: BigInt,
}

impl Quad {
    fn new(l: BigInt, m: BigInt) -> Self {
        Self { l, m }
    }

    fn int(l: BigInt) -> Self {
        Self::new(l, BigInt::zero())
    }

    fn mul(&self, o: &Self, n: &BigInt) -> Self {
        Self::new(
            &self.l * &o.l + &self.m * &o.m * n,
            &self.l * &o.m + &self.m * &o.l,
        )
    }

    fn add(&self, o: &Self) -> Self {
        Self::new(&self.l + &o.l, &self.m + &o.m)
    }

    fn neg(&self) -> Self {
        Self::new(-&self.l, -&self.m)
    }

    fn conj(&self) -> Self {
        Self::new(self.l.clone(), -&self.m)
    }

    fn scale(&self, k: &BigInt) -> Self {
        Self::new(&self.l * k, &self.m * k)
    }

    fn pow(&self, k: u64, n: &BigInt) -> Self {
        let mut acc = Self::int(BigInt::one());
        for _ in 0..k {
            acc = acc.mul(self, n);
        }
        acc
    }

    fn into_int(self) -> BigInt {
        assert!(self.m.is_zero(), "expected a rational integer");
        self.l
    }
}

/// Exact arithmetic in `Z[omega^n]` for one parameter set.
struct BhRing {
    p: BernsteinHasseParams,
    n_val: BigInt,
}

impl BhRing {
    fn new(p: BernsteinHasseParams) -> Self {
        Self {
            n_val: p.radicand(),
            p,
        }
    }

    fn eps(&self) -> Quad {
        Quad::new(self.p.big_d().pow(self.p.n), BigInt::one())
    }

    /// `eps^a`; `eps^-1 = -c epsbar`.
    fn eps_pow(&self, a: i64) -> Quad {
        let base = if a >= 0 {
            self.eps()
        } else {
            self.eps().conj().scale(&BigInt::from(-self.p.c))
        };
        base.pow(a.unsigned_abs(), &self.n_val)
    }

    fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        x.mul(y, &self.n_val)
    }
}

/// `Q[X]/(X^(2n) - N)`, `alpha = D + omega`, `eps = D^n + omega^n`.
pub fn bh_build(p: &BernsteinHasseParams) -> Result<TwistedFamily> {
    let deg = p.degree();
    let mut coeffs = vec![BigInt::zero(); deg + 1];
    coeffs[0] = -p.radicand();
    coeffs[deg] = BigInt::one();
    let k = NumberField::new(IntPolynomial::new(coeffs))?;
    let w = k.generator();
    let alpha = &k.from_i64(p.d as i64) + &w;
    let dn = k.from_rational(BigRational::from_integer(p.big_d().pow(p.n)));
    let eps = &dn + &w.pow(p.n as i64)?;
    let fam = TwistedFamily::new(&k, alpha, eps)?;
    assert_eq!(fam.delta(), -p.c, "norm of eps over Q(eps) is -c");
    assert_eq!(fam.nu(), p.n as usize);
    Ok(fam)
}

/// Closed forms for `U_h(a)`, `h in {1, 2, 2n-1, 2n}`.
pub fn bh_predict(p: &BernsteinHasseParams, h: usize, a: i64) -> Result<BigInt> {
    let n = p.n as i64;
    let nn = p.n as usize;
    let ring = BhRing::new(*p);
    let d = p.big_d();
    let ea = ring.eps_pow(a);
    let big_n = BigInt::from(n);
    if h == 2 * nn {
        return Ok(sign_pow(-p.c, n * a + 1));
    }
    if h == 1 {
        // nD (eps^a + epsbar^a)
        return Ok(&big_n * &d * 2 * &ea.l);
    }
    if h == 2 * nn - 1 {
        // (-c)^((n-1)a) n D^(n-1) [D^n (eps^a + epsbar^a) + (-1)^(n-1) omega^n (eps^a - epsbar^a)]
        let trace = &ea.l * 2;
        let diff = &ea.m * 2 * &ring.n_val;
        let inner = d.pow(p.n) * trace + sign_pow(-1, n - 1) * diff;
        return Ok(sign_pow(-p.c, (n - 1) * a) * &big_n * d.pow(p.n - 1) * inner);
    }
    if h == 2 {
        let ca = sign_pow(-p.c, a);
        if nn == 2 {
            // 4D^2(-c)^a + epsbar eps^2a + eps epsbar^2a
            let e2a = ring.eps_pow(2 * a);
            let eps = ring.eps();
            let cross = ring
                .mul(&eps.conj(), &e2a)
                .add(&ring.mul(&eps, &e2a.conj()));
            return Ok(BigInt::from(4) * &d * &d * ca + cross.into_int());
        }
        // n^2 D^2 (-c)^a + n(n-1)/2 D^2 (eps^2a + epsbar^2a)
        let e2a = ring.eps_pow(2 * a);
        let half = BigInt::from(n * (n - 1) / 2);
        return Ok(&big_n * &big_n * &d * &d * ca + half * &d * &d * 2 * &e2a.l);
    }
    Err(Error::UnsupportedIndex(h))
}

/// `(V_h(a), w)` with `W_h(a) = w omega^n`, so `U_h(a) = V_h(a) + w N` for `h <= 2n-1`.
pub fn bh_vw(p: &BernsteinHasseParams, h: usize, a: i64) -> Result<(BigInt, BigInt)> {
    let n = p.n as usize;
    if h > 2 * n {
        return Err(Error::UnsupportedIndex(h));
    }
    let ring = BhRing::new(*p);
    let ea = ring.eps_pow(a);
    let eb = ea.conj();
    let d = p.big_d();
    let mut v = Quad::int(BigInt::zero());
    for i in h.saturating_sub(n)..=h.min(n) {
        let j = h - i;
        let term = ring
            .mul(&ea.pow(i as u64, &ring.n_val), &eb.pow(j as u64, &ring.n_val))
            .scale(&(binomial(BigInt::from(n), BigInt::from(i)) * binomial(BigInt::from(n), BigInt::from(j))));
        v = v.add(&term);
    }
    let v = v.scale(&d.pow(h as u32)).into_int();
    let w = if h < n || h == 2 * n {
        BigInt::zero()
    } else {
        // (eps^k - epsbar^k) = 2 M_k omega^n, k = a(2n-h)
        let k = a * (2 * n - h) as i64;
        let m2 = ring.eps_pow(k).m * 2;
        sign_pow(-1, n as i64 - 1)
            * sign_pow(-p.c, (h - n) as i64 * a)
            * binomial(BigInt::from(n), BigInt::from(2 * n - h))
            * d.pow((h - n) as u32)
            * m2
    };
    Ok((v, w))
}

/// Expands `((X - eps^a D)^n - eps^(na) omega^n)((X - epsbar^a D)^n + epsbar^(na) omega^n)`
/// in `Z[omega^n][X]` and compares with `F_a(X, 1)`.
pub fn bh_factorization_check(p: &BernsteinHasseParams, a: i64) -> Result<bool> {
    let form = form_at(&bh_build(p)?, a)?;
    Ok(bh_factorization_product(p, a) == form.dehomogenize())
}

fn bh_factorization_product(p: &BernsteinHasseParams, a: i64) -> IntPolynomial {
    let ring = BhRing::new(*p);
    let n = p.n as usize;
    let d = Quad::int(p.big_d());
    let ea = ring.eps_pow(a);
    let eb = ea.conj();
    let omega_n = Quad::new(BigInt::zero(), BigInt::one());
    // (X - r)^n as ascending coefficients
    let linear_power = |r: &Quad| -> Vec<Quad> {
        let mut coeffs = vec![Quad::int(BigInt::one())];
        for _ in 0..n {
            let mut next = vec![Quad::int(BigInt::zero()); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c);
                next[i] = next[i].add(&ring.mul(c, r).neg());
            }
            coeffs = next;
        }
        coeffs
    };
    let mut f1 = linear_power(&ring.mul(&ea, &d));
    f1[0] = f1[0].add(&ring.mul(&ea.pow(n as u64, &ring.n_val), &omega_n).neg());
    let mut f2 = linear_power(&ring.mul(&eb, &d));
    f2[0] = f2[0].add(&ring.mul(&eb.pow(n as u64, &ring.n_val), &omega_n));
    let mut prod = vec![Quad::int(BigInt::zero()); 2 * n + 1];
    for (i, x) in f1.iter().enumerate() {
        for (j, y) in f2.iter().enumerate() {
            prod[i + j] = prod[i + j].add(&ring.mul(x, y));
        }
    }
    IntPolynomial::new(prod.into_iter().map(Quad::into_int).collect())
}

/// Which printed value of `U_2(1)` at `n = 2` agrees with the exact coefficient.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PropVAdjudication {
    #[serde(rename = "D")]
    pub d: u64,
    pub c: i64,
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub computed: BigInt,
    /// `-6cD^6`
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub display_d6: BigInt,
    /// `-6cD^2`
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub display_d2: BigInt,
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub predicted: BigInt,
    pub matches_d6: bool,
    pub matches_d2: bool,
}

impl PropVAdjudication {
    pub fn verdict(&self) -> &'static str {
        match (self.matches_d2, self.matches_d6) {
            (true, true) => "both",
            (true, false) => "-6cD^2",
            (false, true) => "-6cD^6",
            (false, false) => "neither",
        }
    }

    /// The predictor agrees with the exact value.
    pub fn predictor_ok(&self) -> bool {
        self.predicted == self.computed
    }
}

pub fn prop_v_adjudication(d: u64, c: i64) -> Result<PropVAdjudication> {
    let p = BernsteinHasseParams::new(d, 2, c)?;
    let computed = crate::forms::coefficient_U(&bh_build(&p)?, 2, 1)?;
    let dd = BigInt::from(d);
    let display_d6 = BigInt::from(-6 * c) * dd.pow(6u32);
    let display_d2 = BigInt::from(-6 * c) * dd.pow(2u32);
    Ok(PropVAdjudication {
        d,
        c,
        predicted: bh_predict(&p, 2, 1)?,
        matches_d6: computed == display_d6,
        matches_d2: computed == display_d2,
        computed,
        display_d6,
        display_d2,
    })
}

/// `n` and the exponents of `eps = l1^b1 l2^b2`, `alpha = l1^c1 l2^c2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShanksParams {
    pub n: i64,
    pub b1: i64,
    pub b2: i64,
    pub c1: i64,
    pub c2: i64,
}

impl ShanksParams {
    pub fn new(n: i64, b1: i64, b2: i64, c1: i64, c2: i64) -> Result<Self> {
        if b1 * c2 == b2 * c1 {
            return Err(Error::InvalidParameters(format!(
                "exponent determinant b1*c2 - b2*c1 vanishes ({b1},{b2},{c1},{c2})"
            )));
        }
        Ok(Self { n, b1, b2, c1, c2 })
    }

    /// `eps = lambda_2`, `alpha = lambda_1`.
    pub fn standard(n: i64) -> Self {
        Self {
            n,
            b1: 0,
            b2: 1,
            c1: 1,
            c2: 0,
        }
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard(self.n)
    }
}

impl fmt::Display for ShanksParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shanks:n={}", self.n)?;
        if !self.is_standard() {
            write!(f, ",b1={},b2={},c1={},c2={}", self.b1, self.b2, self.c1, self.c2)?;
        }
        Ok(())
    }
}

/// `X^3 - (n-1)X^2 - (n+2)X - 1`.
pub fn shanks_poly(n: i64) -> IntPolynomial {
    IntPolynomial::from_i64s(&[-1, -(n + 2), -(n - 1), 1])
}

/// The field with `lambda_1 = X` and `lambda_2 = -1/(lambda_1 + 1)`.
pub fn shanks_units(n: i64) -> Result<(FieldElement, FieldElement)> {
    let k = NumberField::new(shanks_poly(n))?;
    let l1 = k.generator();
    let l2 = -&(&l1 + &k.one()).inv()?;
    Ok((l1, l2))
}

pub fn shanks_build(p: &ShanksParams) -> Result<TwistedFamily> {
    let (l1, l2) = shanks_units(p.n)?;
    let k = l1.field().clone();
    let eps = &l1.pow(p.b1)? * &l2.pow(p.b2)?;
    let alpha = &l1.pow(p.c1)? * &l2.pow(p.c2)?;
    TwistedFamily::new(&k, alpha, eps)
}

/// `(s_a)` and `(t_a)` on `[a_min, a_max]`, run forwards and backwards from
/// `s_0, s_1, s_2 = n-1, -n-2, -n^2-n-4` and `t_0, t_1, t_2 = -n-2, n-1, 3`.
pub fn shanks_st(n: i64, a_min: i64, a_max: i64) -> (SequenceWindow, SequenceWindow) {
    assert!(a_min <= a_max);
    let nb = BigInt::from(n);
    let lo = a_min.min(0);
    let hi = a_max.max(2);
    let len = (hi - lo + 1) as usize;
    let off = (-lo) as usize;
    let run = |init: [BigInt; 3], fwd: [BigInt; 3]| -> Vec<BigInt> {
        // x_{a+3} = f0 x_{a+2} + f1 x_{a+1} + f2 x_a
        let mut v = vec![BigInt::zero(); len];
        for (i, x) in init.into_iter().enumerate() {
            v[off + i] = x;
        }
        for i in off + 3..len {
            v[i] = &fwd[0] * &v[i - 1] + &fwd[1] * &v[i - 2] + &fwd[2] * &v[i - 3];
        }
        // f2 = 1, so x_a = x_{a+3} - f0 x_{a+2} - f1 x_{a+1}
        for i in (0..off).rev() {
            v[i] = &v[i + 3] - &fwd[0] * &v[i + 2] - &fwd[1] * &v[i + 1];
        }
        v
    };
    let s = run(
        [&nb - 1, -&nb - 2, -(&nb * &nb) - &nb - 4],
        [&nb - 1, &nb + 2, BigInt::one()],
    );
    let t = run(
        [-&nb - 2, &nb - 1, BigInt::from(3)],
        [-&nb - 2, 1 - &nb, BigInt::one()],
    );
    let slice = |v: Vec<BigInt>| {
        let start = (a_min - lo) as usize;
        let end = (a_max - lo) as usize;
        SequenceWindow::from_ints(a_min, v[start..=end].to_vec())
    };
    (slice(s), slice(t))
}

/// `X^3 - s_a X^2 Y + t_a X Y^2 - Y^3`.
pub fn shanks_form(n: i64, a: i64) -> BinaryForm {
    let (s, t) = shanks_st(n, a, a);
    let s = s.values[0].to_integer();
    let t = t.values[0].to_integer();
    BinaryForm::new(vec![BigInt::one(), -s, t, BigInt::from(-1)]).with_a(a)
}

/// `Tr(lambda_1^-1 lambda_2^-a)` by field arithmetic.
pub fn shanks_t_trace(n: i64, a: i64) -> Result<BigInt> {
    let (l1, l2) = shanks_units(n)?;
    let x = &l1.pow(-1)? * &l2.pow(-a)?;
    Ok(x.trace().to_integer())
}

/// A family named by a descriptor such as `bh:D=1,n=2,c=1`,
/// `shanks:n=1,b1=0,b2=1,c1=1,c2=0` or `custom:poly=[-2,0,0,0,1],alpha=[1,1,0,0],eps=[1,0,1,0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    Bh(BernsteinHasseParams),
    Shanks(ShanksParams),
    Custom {
        poly: IntPolynomial,
        alpha: Vec<BigRational>,
        eps: Vec<BigRational>,
    },
}

impl Descriptor {
    pub fn build(&self) -> Result<TwistedFamily> {
        match self {
            Self::Bh(p) => bh_build(p),
            Self::Shanks(p) => shanks_build(p),
            Self::Custom { poly, alpha, eps } => {
                let k: Arc<NumberField> = NumberField::new(poly.clone())?;
                let d = k.degree();
                let pad = |v: &[BigRational]| -> Result<FieldElement> {
                    if v.len() > d {
                        return Err(Error::InvalidParameters(format!(
                            "element has {} coordinates, field degree is {d}",
                            v.len()
                        )));
                    }
                    let mut c = v.to_vec();
                    c.resize(d, BigRational::zero());
                    Ok(k.element(c))
                };
                TwistedFamily::new(&k, pad(alpha)?, pad(eps)?)
            }
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bh(p) => write!(f, "{p}"),
            Self::Shanks(p) => write!(f, "{p}"),
            Self::Custom { poly, alpha, eps } => {
                let list = |v: Vec<String>| format!("[{}]", v.join(","));
                write!(
                    f,
                    "custom:poly={},alpha={},eps={}",
                    list(poly.coeffs().iter().map(|c| c.to_string()).collect()),
                    list(alpha.iter().map(crate::numfield::poly::rational_to_string).collect()),
                    list(eps.iter().map(crate::numfield::poly::rational_to_string).collect()),
                )
            }
        }
    }
}

/// Splits `k=v,k=[..],...` at top-level commas.
fn split_pairs(body: &str) -> Result<Vec<(String, String)>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in body.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::InvalidParameters("unbalanced brackets".into()));
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    parts
        .into_iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameters(format!("expected key=value, got {p:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidParameters(format!("{key}: not an integer: {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<String>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidParameters(format!("{key}: expected [..]")))?;
    Ok(inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect())
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameters(format!("descriptor {s:?} lacks a kind")))?;
        let pairs = split_pairs(body)?;
        let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let known = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &pairs {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::InvalidParameters(format!("unknown key {k:?}")));
                }
            }
            Ok(())
        };
        let need = |key: &str| {
            get(key).ok_or_else(|| Error::InvalidParameters(format!("missing key {key:?}")))
        };
        match kind {
            "bh" => {
                known(&["D", "n", "c"])?;
                let d = parse_int("D", need("D")?)?;
                let n = parse_int("n", need("n")?)?;
                let c = parse_int("c", need("c")?)?;
                Ok(Self::Bh(BernsteinHasseParams::new(d, n, c)?))
            }
            "shanks" => {
                known(&["n", "b1", "b2", "c1", "c2"])?;
                let n = parse_int("n", need("n")?)?;
                let def = ShanksParams::standard(n);
                let opt = |key: &str, d: i64| get(key).map_or(Ok(d), |v| parse_int(key, v));
                Ok(Self::Shanks(ShanksParams::new(
                    n,
                    opt("b1", def.b1)?,
                    opt("b2", def.b2)?,
                    opt("c1", def.c1)?,
                    opt("c2", def.c2)?,
                )?))
            }
            "custom" => {
                known(&["poly", "alpha", "eps"])?;
                let poly = parse_list("poly", need("poly")?)?
                    .iter()
                    .map(|v| parse_int::<BigInt>("poly", v))
                    .collect::<Result<Vec<_>>>()?;
                let rats = |key: &str| -> Result<Vec<BigRational>> {
                    parse_list(key, need(key)?)?
                        .iter()
                        .map(|v| {
                            parse_rational(v).ok_or_else(|| {
                                Error::InvalidParameters(format!("{key}: bad rational {v:?}"))
                            })
                        })
                        .collect()
                };
                Ok(Self::Custom {
                    poly: IntPolynomial::new(poly),
                    alpha: rats("alpha")?,
                    eps: rats("eps")?,
                })
            }
            other => Err(Error::InvalidParameters(format!("unknown family kind {other:?}"))),
        }
    }
}
