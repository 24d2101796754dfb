//! Diagnostics for the embedding-size arguments: extremal embeddings and the
//! sets `Sigma(nu)`, `T(nu)`, Siegel's three-term identity, and a checker
//! plus fuzzer for the elementary inequality on sums of `t` reals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::TwistedFamily;
use crate::numfield::ball::{Ball, CBall};
use crate::numfield::FieldExt;

/// Extremal embeddings and the four index sets for one `(a, x, y)`.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingProfile {
    pub a: i64,
    pub x: i64,
    pub y: i64,
    pub precision_bits: u64,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub nu: BigRational,
    #[serde(skip)]
    pub values_gamma: Vec<CBall>,
    #[serde(skip)]
    pub values_beta: Vec<CBall>,
    pub sigma_alpha: usize,
    pub tau_alpha: usize,
    pub sigma_beta: usize,
    pub tau_beta: usize,
    #[serde(rename = "Sigma_alpha")]
    pub set_sigma_alpha: Vec<usize>,
    #[serde(rename = "Sigma_beta")]
    pub set_sigma_beta: Vec<usize>,
    #[serde(rename = "T_alpha")]
    pub set_tau_alpha: Vec<usize>,
    #[serde(rename = "T_beta")]
    pub set_tau_beta: Vec<usize>,
    /// Tags such as `sigma_beta` (tie for the extremizer) or `T_alpha:2`
    /// (membership of index 2 not decided at this precision).
    pub ambiguous: Vec<String>,
}

/// Index of the certified maximum (or minimum) of `|v_i|^2`; the flag is set
/// when another value cannot be separated from it.
fn extremizer(norms: &[Ball], max: bool) -> (usize, bool) {
    let better = |a: &Ball, b: &Ball| {
        let c = a.mid().cmp_value(b.mid());
        if max {
            c.is_gt()
        } else {
            c.is_lt()
        }
    };
    let mut best = 0;
    for i in 1..norms.len() {
        if better(&norms[i], &norms[best]) {
            best = i;
        }
    }
    let tied = (0..norms.len()).any(|j| {
        j != best
            && if max {
                !norms[j].certainly_lt(&norms[best])
            } else {
                !norms[best].certainly_lt(&norms[j])
            }
    });
    (best, tied)
}

enum Cmp {
    Yes,
    No,
    Unknown,
}

/// Decides `lhs >= rhs` for balls.
fn certified_ge(lhs: &Ball, rhs: &Ball) -> Cmp {
    if rhs.certainly_le(lhs) {
        Cmp::Yes
    } else if lhs.certainly_lt(rhs) {
        Cmp::No
    } else {
        Cmp::Unknown
    }
}

/// `Sigma(nu) = {i : |v_sigma|^nu <= |v_i|}` (the upper bound `|v_i| <= |v_sigma|`
/// holds by maximality), or for `upper = false`, `T(nu) = {i : |v_i| <= |v_tau|^nu}`.
/// With `nu = p/q` the test is `(|v_i|^2)^q` against `(|v_ext|^2)^p`.
#[allow(clippy::too_many_arguments)]
fn nu_set(
    norms: &[Ball],
    ext: usize,
    p: u32,
    q: u32,
    upper: bool,
    prec: u64,
    tag: &str,
    ambiguous: &mut Vec<String>,
) -> Vec<usize> {
    let ext_p = norms[ext].pow(p, prec);
    let mut out = Vec::new();
    for (i, n) in norms.iter().enumerate() {
        if i == ext {
            out.push(i);
            continue;
        }
        let lhs = n.pow(q, prec);
        let verdict = if upper {
            certified_ge(&lhs, &ext_p)
        } else {
            certified_ge(&ext_p, &lhs)
        };
        match verdict {
            Cmp::Yes => out.push(i),
            Cmp::No => {}
            Cmp::Unknown => ambiguous.push(format!("{tag}:{i}")),
        }
    }
    out
}

/// Embedding values of `alpha eps^a` and `beta = x - alpha eps^a y` with
/// extremizers and the sets for the diagnostic parameter `0 < nu < 1`.
pub fn classify(
    family: &TwistedFamily,
    a: i64,
    x: i64,
    y: i64,
    nu: &BigRational,
    precision_bits: u64,
) -> Result<EmbeddingProfile> {
    if !nu.is_positive() || *nu >= BigRational::one() {
        return Err(Error::InvalidParameters("nu must lie in (0, 1)".into()));
    }
    let (p, q) = (
        nu.numer().to_u32().filter(|&v| v <= 64),
        nu.denom().to_u32().filter(|&v| v <= 64),
    );
    let (Some(p), Some(q)) = (p, q) else {
        return Err(Error::InvalidParameters("nu = p/q needs q <= 64".into()));
    };
    let k = family.field();
    let gamma = family.gamma(a);
    let beta = &k.from_i64(x) - &(&gamma * &k.from_i64(y));
    let set = k.embeddings_adaptive(precision_bits.max(64), 4 * precision_bits.max(64))?;
    let prec = set.working_bits();
    let values_gamma: Vec<CBall> = (0..set.len()).map(|i| gamma.eval_embedding(&set, i)).collect();
    let values_beta: Vec<CBall> = (0..set.len()).map(|i| beta.eval_embedding(&set, i)).collect();
    let ng: Vec<Ball> = values_gamma.iter().map(|v| v.norm_sq(prec)).collect();
    let nb: Vec<Ball> = values_beta.iter().map(|v| v.norm_sq(prec)).collect();
    let mut ambiguous = Vec::new();
    let mut ext = |norms: &[Ball], max: bool, tag: &str| {
        let (i, tied) = extremizer(norms, max);
        if tied {
            ambiguous.push(tag.to_string());
        }
        i
    };
    let sigma_alpha = ext(&ng, true, "sigma_alpha");
    let tau_alpha = ext(&ng, false, "tau_alpha");
    let sigma_beta = ext(&nb, true, "sigma_beta");
    let tau_beta = ext(&nb, false, "tau_beta");
    let set_sigma_alpha = nu_set(&ng, sigma_alpha, p, q, true, prec, "Sigma_alpha", &mut ambiguous);
    let set_tau_alpha = nu_set(&ng, tau_alpha, p, q, false, prec, "T_alpha", &mut ambiguous);
    let set_sigma_beta = nu_set(&nb, sigma_beta, p, q, true, prec, "Sigma_beta", &mut ambiguous);
    let set_tau_beta = nu_set(&nb, tau_beta, p, q, false, prec, "T_beta", &mut ambiguous);
    Ok(EmbeddingProfile {
        a,
        x,
        y,
        precision_bits: set.precision_bits,
        nu: nu.clone(),
        values_gamma,
        values_beta,
        sigma_alpha,
        tau_alpha,
        sigma_beta,
        tau_beta,
        set_sigma_alpha,
        set_sigma_beta,
        set_tau_alpha,
        set_tau_beta,
        ambiguous,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelResidual {
    pub triple: [usize; 3],
    pub contains_zero: bool,
    /// Radius of the residual enclosure.
    pub width: f64,
    /// `log2(width)`; `-inf` for an exact zero.
    pub width_log2: f64,
}

/// Encloses `u1v2 - u1v3 + u2v3 - u2v1 + u3v1 - u3v2` with `u_k = phi_{i_k}(alpha eps^a)`
/// and `v_k = phi_{i_k}(beta)`; it vanishes identically since `v_k = x - u_k y`.
pub fn siegel_identity_check(profile: &EmbeddingProfile, triple: [usize; 3]) -> Result<SiegelResidual> {
    let [i1, i2, i3] = triple;
    let d = profile.values_gamma.len();
    if i1 == i2 || i2 == i3 || i1 == i3 || triple.iter().any(|&i| i >= d) {
        return Err(Error::InvalidParameters(format!(
            "need three distinct embedding indices below {d}, got {triple:?}"
        )));
    }
    let prec = 2 * profile.precision_bits;
    let u = |i: usize| &profile.values_gamma[i];
    let v = |i: usize| &profile.values_beta[i];
    let term = |a: usize, b: usize| u(a).mul(v(b), prec);
    let r = term(i1, i2)
        .sub(&term(i1, i3), prec)
        .add(&term(i2, i3), prec)
        .sub(&term(i2, i1), prec)
        .add(&term(i3, i1), prec)
        .sub(&term(i3, i2), prec);
    let width = r.rad().to_f64();
    Ok(SiegelResidual {
        triple,
        contains_zero: r.contains_zero(),
        width,
        width_log2: width.log2(),
    })
}

/// `t` reals with parameters `delta`, `mu`, all exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaInstance {
    pub t: usize,
    pub xs: Vec<BigRational>,
    pub delta: BigRational,
    pub mu: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaVerdict {
    HypothesisFailed(String),
    ConclusionHolds,
    ConclusionFails,
}

/// Checks `0 < delta <= 1/(t-2) - 1/mu`, `sum x_i = 0`, `|x_i| <= delta max(|x_1|, |x_2|)`
/// for `i >= 3`, then the conclusion `|x_1 + x_2| <= mu delta min(|x_1|, |x_2|)`.
pub fn lemma_check(inst: &LemmaInstance) -> LemmaVerdict {
    use LemmaVerdict::*;
    let t = inst.t;
    if t < 3 {
        return HypothesisFailed("t >= 3".into());
    }
    if inst.xs.len() != t {
        return HypothesisFailed(format!("expected {t} values, got {}", inst.xs.len()));
    }
    if !inst.mu.is_positive() {
        return HypothesisFailed("mu > 0".into());
    }
    if !inst.delta.is_positive() {
        return HypothesisFailed("delta > 0".into());
    }
    let cap = BigRational::new(BigInt::one(), BigInt::from(t - 2)) - inst.mu.recip();
    if inst.delta > cap {
        return HypothesisFailed("delta <= 1/(t-2) - 1/mu".into());
    }
    let sum: BigRational = inst.xs.iter().sum();
    if !sum.is_zero() {
        return HypothesisFailed("x_1 + ... + x_t = 0".into());
    }
    let (a1, a2) = (inst.xs[0].abs(), inst.xs[1].abs());
    let big = (&a1).max(&a2).clone();
    let bound = &inst.delta * &big;
    if let Some(i) = inst.xs[2..].iter().position(|x| x.abs() > bound) {
        return HypothesisFailed(format!("|x_{}| <= delta max(|x_1|, |x_2|)", i + 3));
    }
    let small = a1.min(a2);
    if (&inst.xs[0] + &inst.xs[1]).abs() <= &inst.mu * &inst.delta * small {
        ConclusionHolds
    } else {
        ConclusionFails
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub t: usize,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub delta: BigRational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub mu: BigRational,
    pub trials: u64,
    pub failures: u64,
    /// Draws outside the hypothesis region, redrawn.
    pub rejected: u64,
    pub seed: u64,
}

const SCALE: i64 = 1 << 20;
const MAX_DRAWS: u32 = 64;

/// One instance from the hypothesis region for `mu = t`, `delta = 2/(t(t-2))`:
/// an anchor `x_a`, the tail `x_3..x_t` within `delta (1 + (t-2) delta) |x_a|`
/// (with boundary values drawn on purpose), `x_b = -(x_a + tail)`, and a random
/// order of the first two entries. Draws violating the hypotheses are rejected.
fn draw(rng: &mut ChaCha8Rng, t: usize, delta: &BigRational, mu: &BigRational) -> (LemmaInstance, u64) {
    let spread = BigRational::one() + BigRational::from_integer(BigInt::from(t - 2)) * delta;
    let mut rejected = 0;
    loop {
        let anchor = rng.gen_range(1..=SCALE) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let anchor = BigRational::from_integer(anchor.into());
        let limit = delta * &spread * anchor.abs();
        let tail: Vec<BigRational> = (2..t)
            .map(|_| {
                let k: i64 = match rng.gen_range(0..8) {
                    0 => SCALE,
                    1 => -SCALE,
                    2 => 0,
                    _ => rng.gen_range(-SCALE..=SCALE),
                };
                &limit * BigRational::new(k.into(), SCALE.into())
            })
            .collect();
        let tail_sum: BigRational = tail.iter().sum();
        let other = -(&anchor + tail_sum);
        let (x1, x2) = if rng.gen_bool(0.5) { (anchor, other) } else { (other, anchor) };
        let mut xs = vec![x1, x2];
        xs.extend(tail);
        let inst = LemmaInstance {
            t,
            xs,
            delta: delta.clone(),
            mu: mu.clone(),
        };
        if !matches!(lemma_check(&inst), LemmaVerdict::HypothesisFailed(_)) || rejected >= MAX_DRAWS as u64 {
            return (inst, rejected);
        }
        rejected += 1;
    }
}

/// Runs `trials` hypothesis-satisfying instances; trial `i` uses stream `i` of the seeded generator.
pub fn lemma_fuzz(t: usize, trials: u64, seed: u64) -> Result<FuzzReport> {
    if !(4..=6).contains(&t) {
        return Err(Error::InvalidParameters("t must be 4, 5 or 6".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be >= 1".into()));
    }
    let mu = BigRational::from_integer(BigInt::from(t));
    let delta = BigRational::new(BigInt::from(2), BigInt::from(t * (t - 2)));
    let (failures, rejected) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let (inst, rejected) = draw(&mut rng, t, &delta, &mu);
            let fail = match lemma_check(&inst) {
                LemmaVerdict::ConclusionFails => 1u64,
                _ => 0,
            };
            (fail, rejected)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(FuzzReport {
        t,
        delta,
        mu,
        trials,
        failures,
        rejected,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{shanks_build, ShanksParams};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn inst(xs: &[(i64, i64)], delta: BigRational, mu: i64) -> LemmaInstance {
        LemmaInstance {
            t: xs.len(),
            xs: xs.iter().map(|&(n, d)| q(n, d)).collect(),
            delta,
            mu: q(mu, 1),
        }
    }

    #[test]
    fn lemma_examples() {
        let i = inst(&[(1, 1), (-11, 10), (1, 20), (1, 20)], q(1, 4), 4);
        assert_eq!(lemma_check(&i), LemmaVerdict::ConclusionHolds);
        let i = inst(&[(1, 1), (-1, 1), (0, 1), (0, 1)], q(1, 4), 4);
        assert_eq!(lemma_check(&i), LemmaVerdict::ConclusionHolds);
        let i = inst(&[(0, 1); 5], q(1, 10), 5);
        assert_eq!(lemma_check(&i), LemmaVerdict::ConclusionHolds);
        let i = inst(&[(1, 1), (-1, 1), (1, 1), (-1, 1)], q(1, 4), 4);
        assert!(matches!(lemma_check(&i), LemmaVerdict::HypothesisFailed(_)));
        // delta too large for mu
        let i = inst(&[(1, 1), (-1, 1), (0, 1), (0, 1)], q(1, 2), 4);
        assert!(matches!(lemma_check(&i), LemmaVerdict::HypothesisFailed(_)));
    }

    #[test]
    fn fuzz_small() {
        for t in 4..=6 {
            let r = lemma_fuzz(t, 2000, 7).unwrap();
            assert_eq!(r.failures, 0);
        }
        assert!(lemma_fuzz(4, 0, 1).is_err());
        assert!(lemma_fuzz(3, 10, 1).is_err());
        assert_eq!(lemma_fuzz(5, 300, 9).unwrap(), lemma_fuzz(5, 300, 9).unwrap());
    }

    #[test]
    fn profile_rational_beta() {
        let fam = shanks_build(&ShanksParams::standard(1)).unwrap();
        let p = classify(&fam, 0, 1, 0, &q(1, 2), 64).unwrap();
        assert_eq!(p.set_sigma_beta, vec![0, 1, 2]);
        assert!(p.ambiguous.iter().any(|s| s == "sigma_beta"));
        assert!(p.ambiguous.iter().any(|s| s == "tau_beta"));
    }

    #[test]
    fn profile_and_identity() {
        let fam = shanks_build(&ShanksParams::standard(1)).unwrap();
        let p = classify(&fam, 1, 2, 1, &q(1, 2), 128).unwrap();
        let r = siegel_identity_check(&p, [0, 1, 2]).unwrap();
        assert!(r.contains_zero);
        assert!(r.width < 2f64.powi(-80));
        assert!(siegel_identity_check(&p, [0, 0, 1]).is_err());
        let p2 = classify(&fam, 2, 1, 1, &q(1, 2), 64).unwrap();
        let p3 = classify(&fam, 2, 1, 1, &q(1, 2), 128).unwrap();
        assert_eq!(p2.set_sigma_alpha, p3.set_sigma_alpha);
        assert_eq!(p2.set_tau_beta, p3.set_tau_beta);
        assert_eq!(p2.sigma_alpha, p3.sigma_alpha);
        assert!(classify(&fam, 0, 1, 1, &q(1, 1), 64).is_err());
    }
}
