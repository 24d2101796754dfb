//! Exact real-root counting with Sturm sequences.

use num_traits::Signed;

use super::poly::RatPolynomial;

fn sturm_chain(p: &RatPolynomial) -> Vec<RatPolynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].div_rem(&chain[n - 1]).1;
        if r.is_zero() {
            break;
        }
        chain.push(-r);
    }
    chain
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut count = 0;
    let mut last = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at_infinity(p: &RatPolynomial, positive: bool) -> i32 {
    let Some(l) = p.leading() else { return 0 };
    let s = if l.is_positive() { 1 } else { -1 };
    if positive || p.degree().is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// Number of distinct real roots of `p`.
pub fn count_real_roots(p: &RatPolynomial) -> usize {
    if p.is_zero() || p.degree() == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    let neg = variations(chain.iter().map(|q| sign_at_infinity(q, false)));
    let pos = variations(chain.iter().map(|q| sign_at_infinity(q, true)));
    neg - pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(count_real_roots(&RatPolynomial::from_i64s(&[-1, -3, 0, 1])), 3);
        assert_eq!(count_real_roots(&RatPolynomial::from_i64s(&[-2, 0, 0, 0, 1])), 2);
        assert_eq!(count_real_roots(&RatPolynomial::from_i64s(&[1, 0, 1])), 0);
        // (X-1)^2 (X+2) has two distinct real roots
        assert_eq!(count_real_roots(&RatPolynomial::from_i64s(&[2, -3, 0, 1])), 2);
    }
}
