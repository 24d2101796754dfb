//! Certified isolation of the complex roots of a squarefree integer polynomial.
//!
//! Approximations come from Aberth iterations (first in `f64`, then at the
//! working precision). They are certified with the Gerschgorin-type
//! inclusion of Smith: with Weierstrass corrections
//! `W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`, the disks
//! `|z - z_i| <= d |W_i|` contain all roots and a component made of `k`
//! disks contains exactly `k` roots. Pairwise disjoint disks therefore
//! isolate the roots one by one.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::ball::{Ball, CBall, Dyadic};
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

/// A certified root enclosure.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    pub value: CBall,
    /// Exactly real: the imaginary part is the point zero.
    pub is_real: bool,
}

#[derive(Clone, Debug)]
struct CFloat {
    re: Dyadic,
    im: Dyadic,
}

impl CFloat {
    fn from_c64(z: Complex64) -> Self {
        Self {
            re: Dyadic::from_f64(z.re),
            im: Dyadic::from_f64(z.im),
        }
    }

    fn round(re: Dyadic, im: Dyadic, prec: u64) -> Self {
        Self {
            re: re.round(prec).0,
            im: im.round(prec).0,
        }
    }

    fn add(&self, o: &Self, prec: u64) -> Self {
        Self::round(self.re.add(&o.re), self.im.add(&o.im), prec)
    }

    fn sub(&self, o: &Self, prec: u64) -> Self {
        Self::round(self.re.sub(&o.re), self.im.sub(&o.im), prec)
    }

    fn mul(&self, o: &Self, prec: u64) -> Self {
        Self::round(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
            prec,
        )
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn div(&self, o: &Self, prec: u64) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let n = o.re.mul(&o.re).add(&o.im.mul(&o.im)).round(prec + 8).0;
        let re = self.re.mul(&o.re).add(&self.im.mul(&o.im));
        let im = self.im.mul(&o.re).sub(&self.re.mul(&o.im));
        Some(Self {
            re: Dyadic::div(&re, &n, prec).0,
            im: Dyadic::div(&im, &n, prec).0,
        })
    }

    fn mag_exp(&self) -> i64 {
        self.re.mag_exp().max(self.im.mag_exp())
    }

    fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    fn dist_sq(&self, o: &Self) -> Dyadic {
        let dr = self.re.sub(&o.re);
        let di = self.im.sub(&o.im);
        dr.mul(&dr).add(&di.mul(&di))
    }

    fn to_cball(&self) -> CBall {
        CBall::new(Ball::exact(self.re.clone()), Ball::exact(self.im.clone()))
    }
}

fn initial_radius_log2(poly: &IntPolynomial) -> i64 {
    // Fujiwara-style bound: 2 * max |a_k / a_d|^(1/(d-k)), computed on bit lengths.
    let d = poly.degree();
    let lead_bits = poly.coeffs()[d].bits() as i64;
    let mut best = 0i64;
    for (k, c) in poly.coeffs().iter().enumerate().take(d) {
        if c.is_zero() {
            continue;
        }
        let ratio_bits = c.bits() as i64 - lead_bits + 1;
        best = best.max(ratio_bits.div_euclid((d - k) as i64) + 1);
    }
    best + 1
}

fn starting_points(d: usize, radius_log2: i64) -> Vec<Complex64> {
    let r = 2f64.powi(radius_log2.clamp(-1000, 1000) as i32);
    (0..d)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / d as f64 + 0.7;
            Complex64::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

fn aberth_f64(poly: &IntPolynomial) -> Option<Vec<Complex64>> {
    let d = poly.degree();
    let coeffs: Vec<f64> = poly.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
    if coeffs.iter().any(|c| !c.is_finite() || c.abs() > 1e280) {
        return None;
    }
    let mut z = starting_points(d, initial_radius_log2(poly));
    for _ in 0..500 {
        let mut max_step = 0f64;
        for i in 0..d {
            let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for c in coeffs.iter().rev() {
                dp = dp * z[i] + p;
                p = p * z[i] + c;
            }
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite()).then_some(z)
}

fn horner(poly: &IntPolynomial, z: &CFloat, prec: u64) -> (CFloat, CFloat) {
    let zero = CFloat {
        re: Dyadic::zero(),
        im: Dyadic::zero(),
    };
    let (mut p, mut dp) = (zero.clone(), zero);
    for c in poly.coeffs().iter().rev() {
        dp = dp.mul(z, prec).add(&p, prec);
        p = p.mul(z, prec);
        p.re = p.re.add(&Dyadic::from_bigint(c.clone()));
    }
    (p, dp)
}

fn aberth_refine(poly: &IntPolynomial, mut z: Vec<CFloat>, prec: u64) -> Vec<CFloat> {
    let d = z.len();
    let one = CFloat {
        re: Dyadic::from_i64(1),
        im: Dyadic::zero(),
    };
    let mut quiet = 0;
    for _ in 0..400 {
        let mut converged = true;
        for i in 0..d {
            let (p, dp) = horner(poly, &z[i], prec);
            if p.is_zero() {
                continue;
            }
            let Some(ratio) = p.div(&dp, prec) else {
                converged = false;
                continue;
            };
            let mut s = CFloat {
                re: Dyadic::zero(),
                im: Dyadic::zero(),
            };
            for j in (0..d).filter(|&j| j != i) {
                if let Some(inv) = one.div(&z[i].sub(&z[j], prec), prec) {
                    s = s.add(&inv, prec);
                }
            }
            let denom = one.sub(&ratio.mul(&s, prec), prec);
            let Some(w) = ratio.div(&denom, prec) else {
                converged = false;
                continue;
            };
            let scale = z[i].mag_exp().max(1);
            if w.mag_exp() > scale - prec as i64 + 8 {
                converged = false;
            }
            z[i] = z[i].sub(&w, prec);
        }
        if converged {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        }
    }
    z
}

/// Certifies approximations `z`. Returns enclosures (unsorted) or `None` if
/// the inclusion disks are not separated well enough.
fn certify(poly: &IntPolynomial, z: &[CFloat], prec: u64) -> Option<Vec<RootEnclosure>> {
    let d = z.len();
    let lead = Ball::from_bigint(&poly.coeffs()[d]);
    let d_sq = Ball::from_i64((d * d) as i64);
    let mut radius = Vec::with_capacity(d);
    for i in 0..d {
        let zi = z[i].to_cball();
        let mut p = CBall::zero();
        for c in poly.coeffs().iter().rev() {
            p = p.mul(&zi, prec).add(&CBall::from_bigint(c), prec);
        }
        let mut q = CBall::real(lead.clone());
        for j in (0..d).filter(|&j| j != i) {
            q = q.mul(&zi.sub(&z[j].to_cball(), prec), prec);
        }
        let q_sq = q.norm_sq(prec);
        if !q_sq.is_positive() {
            return None;
        }
        let num = p.norm_sq(prec).mul(&d_sq, prec);
        let rho_sq = Dyadic::div_up(&num.hi(), &q_sq.lo());
        radius.push(rho_sq.sqrt_up());
    }
    let separated = |a: &CFloat, b: &CFloat, ra: &Dyadic, rb: &Dyadic| {
        let s = ra.add(rb);
        a.dist_sq(b).cmp_value(&s.mul(&s)) == Ordering::Greater
    };
    for i in 0..d {
        for j in i + 1..d {
            if !separated(&z[i], &z[j], &radius[i], &radius[j]) {
                return None;
            }
        }
    }
    let mut out: Vec<Option<RootEnclosure>> = vec![None; d];
    for i in 0..d {
        if out[i].is_some() {
            continue;
        }
        let conj = z[i].conj();
        let partners: Vec<usize> = (0..d)
            .filter(|&j| j != i && !separated(&conj, &z[j], &radius[i], &radius[j]))
            .collect();
        if partners.is_empty() {
            out[i] = Some(RootEnclosure {
                value: CBall::real(Ball::new(z[i].re.clone(), radius[i].clone())),
                is_real: true,
            });
            continue;
        }
        if z[i].im.abs().cmp_value(&radius[i]) != Ordering::Greater || partners.len() != 1 {
            return None;
        }
        let j = partners[0];
        if out[j].is_some() {
            return None;
        }
        let upper = if z[i].im.signum() > 0 { i } else { j };
        let encl = CBall::new(
            Ball::new(z[upper].re.clone(), radius[upper].clone()),
            Ball::new(z[upper].im.clone(), radius[upper].clone()),
        );
        let lower = if upper == i { j } else { i };
        out[lower] = Some(RootEnclosure {
            value: encl.conj(),
            is_real: false,
        });
        out[upper] = Some(RootEnclosure {
            value: encl,
            is_real: false,
        });
    }
    let out: Vec<RootEnclosure> = out.into_iter().collect::<Option<_>>()?;
    for i in 0..d {
        for j in i + 1..d {
            if out[i].value.overlaps(&out[j].value) {
                return None;
            }
        }
    }
    Some(out)
}

fn linear_root(poly: &IntPolynomial, prec: u64) -> RootEnclosure {
    let q = num_rational::BigRational::new(-poly.coeff(0), poly.coeff(1));
    RootEnclosure {
        value: CBall::from_rational(&q, prec),
        is_real: true,
    }
}

/// Orders enclosures by real midpoint, then imaginary midpoint.
pub fn sort_roots(roots: &mut [RootEnclosure]) {
    roots.sort_by(|a, b| {
        a.value
            .re
            .mid()
            .cmp_value(b.value.re.mid())
            .then_with(|| a.value.im.mid().cmp_value(b.value.im.mid()))
    });
}

/// Isolates all complex roots of a squarefree polynomial of degree >= 1 so
/// that every enclosure has radius at most `2^-target_bits`. Works at
/// `2 * target_bits` bits (plus the bit size of the root bound) and fails with `PrecisionExhausted` rather than
/// returning an uncertified answer.
pub fn isolate_roots(poly: &IntPolynomial, target_bits: u64) -> Result<Vec<RootEnclosure>> {
    let d = poly.degree();
    assert!(d >= 1 && !poly.is_zero(), "root isolation needs degree >= 1");
    // Relative precision: large roots need extra bits for the same absolute radius.
    let work = (2 * target_bits).max(64) + initial_radius_log2(poly).max(0) as u64;
    if d == 1 {
        return Ok(vec![linear_root(poly, work)]);
    }
    let start: Vec<CFloat> = match aberth_f64(poly) {
        Some(z) => z.into_iter().map(CFloat::from_c64).collect(),
        None => starting_points(d, 0)
            .into_iter()
            .map(|c| {
                let base = CFloat::from_c64(c);
                let k = initial_radius_log2(poly);
                CFloat {
                    re: base.re.mul_pow2(k),
                    im: base.im.mul_pow2(k),
                }
            })
            .collect(),
    };
    let z = aberth_refine(poly, start, work);
    let mut roots = certify(poly, &z, work).ok_or(Error::PrecisionExhausted { bits: work })?;
    let limit = Dyadic::pow2(-(target_bits as i64));
    if roots
        .iter()
        .any(|r| r.value.rad().cmp_value(&limit) == Ordering::Greater)
    {
        return Err(Error::PrecisionExhausted { bits: work });
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Retries [`isolate_roots`] with doubled precision up to `max_bits`.
pub fn isolate_roots_adaptive(
    poly: &IntPolynomial,
    target_bits: u64,
    max_bits: u64,
) -> Result<Vec<RootEnclosure>> {
    let mut bits = target_bits;
    loop {
        match isolate_roots(poly, bits) {
            Ok(r) => return Ok(r),
            Err(Error::PrecisionExhausted { .. }) if bits * 2 <= max_bits => bits *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn sqrt_two_enclosures() {
        let p = IntPolynomial::from_i64s(&[-2, 0, 1]);
        let roots = isolate_roots(&p, 64).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_real));
        let s = roots[1].value.re.to_f64();
        assert!((s - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(roots[1].value.re.rad_f64() <= 2f64.powi(-64));
        assert!(roots[0].value.re.to_f64() < 0.0);
    }

    #[test]
    fn quartic_with_complex_pair() {
        let p = IntPolynomial::from_i64s(&[-2, 0, 0, 0, 1]);
        let roots = isolate_roots(&p, 80).unwrap();
        assert_eq!(roots.iter().filter(|r| r.is_real).count(), 2);
        let complex: Vec<_> = roots.iter().filter(|r| !r.is_real).collect();
        assert_eq!(complex.len(), 2);
        let im = complex[0].value.im.to_f64().abs();
        assert!((im - 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn huge_coefficients_fall_back_to_circle_start() {
        // (X - 10^200)(X + 3)
        let big = BigInt::from(10).pow(200);
        let p = IntPolynomial::new(vec![-&big * 3, BigInt::from(3) - &big, BigInt::from(1)]);
        let roots = isolate_roots(&p, 64).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].value.re.unique_integer(), Some(BigInt::from(-3)));
        assert_eq!(roots[1].value.re.unique_integer(), Some(big));
    }

    #[test]
    fn close_roots_are_separated() {
        // (X - 1000)(X - 1001)(X^2 + 1)
        let a = IntPolynomial::from_i64s(&[1_001_000, -2001, 1]);
        let b = IntPolynomial::from_i64s(&[1, 0, 1]);
        let roots = isolate_roots(&(&a * &b), 64).unwrap();
        assert_eq!(roots.iter().filter(|r| r.is_real).count(), 2);
    }
}
