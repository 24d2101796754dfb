//! Enumeration of `(a, x, y)` with `xy != 0` and `|F_a(x, y)| <= m` in a box.
//!
//! The pruned engine rests on one inequality. Write `F(x, y) = c_0 prod (x - theta_j y)`
//! and let `theta_i` be the root closest to `x/y`. For `j != i`,
//! `|theta_i - theta_j| |y| <= |x - theta_i y| + |x - theta_j y| <= 2 |x - theta_j y|`,
//! hence
//!
//! ```text
//! |x - theta_i y| <= m / (|c_0| prod_{j != i} |y| sep_ij / 2) =: R_i(y).
//! ```
//!
//! Every solution therefore lies in a window of radius `R_i(y)` around
//! `Re(theta_i) y` for some `i`, and roots with `|Im theta_i| |y| > R_i(y)`
//! contribute nothing. Rows where the windows cover the whole box are
//! searched exhaustively.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{form_at, BinaryForm, Excluded, TwistedFamily};
use crate::numfield::roots::isolate_roots_adaptive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBox {
    pub a_min: i64,
    pub a_max: i64,
    pub xy_bound: u64,
    pub m: u64,
}

impl SearchBox {
    pub fn new(a_min: i64, a_max: i64, xy_bound: u64, m: u64) -> Result<Self> {
        if a_min > a_max {
            return Err(Error::InvalidParameters(format!("empty a-range {a_min}..{a_max}")));
        }
        if xy_bound == 0 {
            return Err(Error::InvalidParameters("xy bound must be >= 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParameters("m must be >= 1".into()));
        }
        if xy_bound > i64::MAX as u64 / 2 {
            return Err(Error::InvalidParameters("xy bound too large".into()));
        }
        Ok(Self {
            a_min,
            a_max,
            xy_bound,
            m,
        })
    }
}

/// `max(log|x|, log|y|, |a|) / log m`, undefined for `m = 1`.
pub fn kappa_ratio(a: i64, x: i64, y: i64, m: u64) -> Option<f64> {
    if m < 2 {
        return None;
    }
    let lx = (x.unsigned_abs() as f64).ln();
    let ly = (y.unsigned_abs() as f64).ln();
    Some(lx.max(ly).max(a.unsigned_abs() as f64) / (m as f64).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub a: i64,
    pub x: i64,
    pub y: i64,
    #[serde(serialize_with = "crate::serde_util::bigint")]
    pub value: BigInt,
    #[serde(rename = "kappa")]
    pub kappa_ratio: Option<f64>,
}

impl Solution {
    pub fn key(&self) -> (i64, i64, i64) {
        (self.a, self.y, self.x)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.a,
            self.x,
            self.y,
            self.value,
            self.kappa_ratio.map(|k| k.to_string()).unwrap_or_default()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowStats {
    pub a: i64,
    /// Largest `|y|` whose row was searched exhaustively (0 if none).
    pub y0: u64,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub solutions: Vec<Solution>,
    /// Twists `a` in the box where `alpha eps^a` has degree `< d`.
    pub degenerate: Vec<Excluded>,
    pub stats: Vec<RowStats>,
}

impl SearchResult {
    pub fn evaluations(&self) -> u64 {
        self.stats.iter().map(|s| s.evaluations).sum()
    }
}

/// Exact evaluator with an `i128` path when `sum |c_h| B^d < 2^126`.
struct Evaluator {
    form: BinaryForm,
    small: Option<Vec<i128>>,
}

impl Evaluator {
    fn new(form: BinaryForm, bound: u64) -> Self {
        let d = form.degree as u32;
        let total: BigInt = form.coeffs.iter().map(|c| c.abs()).sum::<BigInt>()
            * BigInt::from(bound).pow(d);
        let small = if total.bits() < 126 {
            form.coeffs.iter().map(|c| c.to_i128()).collect()
        } else {
            None
        };
        Self { form, small }
    }

    fn within(&self, x: i64, y: i64, m: u64) -> Option<BigInt> {
        match &self.small {
            Some(c) => {
                let (x, y) = (x as i128, y as i128);
                let mut acc = c[0];
                let mut ypow = 1i128;
                for ch in &c[1..] {
                    ypow *= y;
                    acc = acc * x + ch * ypow;
                }
                (acc.unsigned_abs() <= m as u128).then(|| BigInt::from(acc))
            }
            None => {
                let v = self.form.evaluate(&x.into(), &y.into());
                (v.abs() <= BigInt::from(m)).then_some(v)
            }
        }
    }
}

fn forms_in_box(family: &TwistedFamily, b: &SearchBox) -> Result<(Vec<BinaryForm>, Vec<Excluded>)> {
    let results: Vec<(i64, Result<BinaryForm>)> = (b.a_min..=b.a_max)
        .into_par_iter()
        .map(|a| (a, form_at(family, a)))
        .collect();
    let mut forms = Vec::new();
    let mut degenerate = Vec::new();
    for (a, r) in results {
        match r {
            Ok(f) => forms.push(f),
            Err(Error::DegenerateDegree { degree, .. }) => degenerate.push(Excluded { a, degree }),
            Err(e) => return Err(e),
        }
    }
    Ok((forms, degenerate))
}

fn finish(
    mut per_a: Vec<(Vec<Solution>, RowStats)>,
    degenerate: Vec<Excluded>,
) -> SearchResult {
    per_a.sort_by_key(|(_, s)| s.a);
    let mut solutions = Vec::new();
    let mut stats = Vec::new();
    for (mut sols, st) in per_a {
        sols.sort_by_key(Solution::key);
        solutions.extend(sols);
        stats.push(st);
    }
    SearchResult {
        solutions,
        degenerate,
        stats,
    }
}

fn push_row(
    ev: &Evaluator,
    a: i64,
    y: i64,
    xs: impl Iterator<Item = i64>,
    m: u64,
    out: &mut Vec<Solution>,
    evals: &mut u64,
) {
    for x in xs {
        if x == 0 {
            continue;
        }
        *evals += 1;
        if let Some(value) = ev.within(x, y, m) {
            out.push(Solution {
                a,
                x,
                y,
                value,
                kappa_ratio: kappa_ratio(a, x, y, m),
            });
        }
    }
}

/// Exhaustive search over every `(x, y)` with `xy != 0` in the box.
pub fn brute_force_search(family: &TwistedFamily, b: &SearchBox) -> Result<SearchResult> {
    let (forms, degenerate) = forms_in_box(family, b)?;
    let bound = b.xy_bound as i64;
    let per_a = forms
        .into_par_iter()
        .map(|form| {
            let a = form.a.expect("form_at sets a");
            let ev = Evaluator::new(form, b.xy_bound);
            let rows: Vec<(Vec<Solution>, u64)> = (-bound..=bound)
                .into_par_iter()
                .filter(|&y| y != 0)
                .map(|y| {
                    let mut out = Vec::new();
                    let mut evals = 0;
                    push_row(&ev, a, y, -bound..=bound, b.m, &mut out, &mut evals);
                    (out, evals)
                })
                .collect();
            let evaluations = rows.iter().map(|r| r.1).sum();
            let sols = rows.into_iter().flat_map(|r| r.0).collect();
            (
                sols,
                RowStats {
                    a,
                    y0: b.xy_bound,
                    evaluations,
                },
            )
        })
        .collect();
    Ok(finish(per_a, degenerate))
}

/// Root data in `f64` with conservative slack.
struct RootWindow {
    re: f64,
    im_abs: f64,
    /// `prod_{j != i} sep_ij / 2`, a lower bound; 0 when separation is not certified in `f64`.
    sep_prod: f64,
}

const REL_SLACK: f64 = 1e-9;

fn root_windows(form: &BinaryForm) -> Result<Vec<RootWindow>> {
    let poly = form.dehomogenize();
    let roots = isolate_roots_adaptive(&poly, 64, 1024)?;
    let pts: Vec<(f64, f64, f64)> = roots
        .iter()
        .map(|r| {
            let re = r.value.re.to_f64();
            let im = r.value.im.to_f64();
            let rad = r.value.rad().to_f64() + (re.abs() + im.abs()) * 1e-14;
            (re, im, rad)
        })
        .collect();
    let mut out = Vec::with_capacity(pts.len());
    for (i, &(re, im, ri)) in pts.iter().enumerate() {
        let mut prod = 1f64;
        for (j, &(rj_re, rj_im, rj)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let dist = ((re - rj_re).powi(2) + (im - rj_im).powi(2)).sqrt();
            let sep = (dist * (1.0 - REL_SLACK) - ri - rj).max(0.0);
            prod *= sep / 2.0;
        }
        out.push(RootWindow {
            re,
            im_abs: (im.abs() * (1.0 - REL_SLACK) - ri).max(0.0),
            sep_prod: if prod.is_finite() { prod } else { 0.0 },
        });
    }
    Ok(out)
}

/// Integer `x`-ranges (within `[-B, B]`) that may hold solutions in row `y`,
/// or `None` when the whole row has to be scanned.
fn candidate_ranges(
    windows: &[RootWindow],
    lead: f64,
    d: usize,
    y: i64,
    m: u64,
    bound: i64,
) -> Option<Vec<RangeInclusive<i64>>> {
    let ya = y.unsigned_abs() as f64;
    let mut ranges = Vec::new();
    for w in windows {
        let denom = lead * w.sep_prod * ya.powi(d as i32 - 1);
        if denom <= 0.0 || !denom.is_finite() {
            return None;
        }
        let r = m as f64 / denom * (1.0 + REL_SLACK);
        if w.im_abs * ya > r {
            continue;
        }
        let centre = w.re * y as f64;
        let pad = r + 1.0 + centre.abs() * REL_SLACK;
        let lo = (centre - pad).floor();
        let hi = (centre + pad).ceil();
        if lo <= -(bound as f64) && hi >= bound as f64 {
            return None;
        }
        let lo = lo.max(-(bound as f64)) as i64;
        let hi = hi.min(bound as f64) as i64;
        if lo <= hi {
            ranges.push(lo..=hi);
        }
    }
    ranges.sort_by_key(|r| *r.start());
    let mut merged: Vec<RangeInclusive<i64>> = Vec::new();
    for r in ranges {
        match merged.last_mut() {
            Some(last) if *r.start() <= last.end() + 1 => {
                let end = (*last.end()).max(*r.end());
                *last = *last.start()..=end;
            }
            _ => merged.push(r),
        }
    }
    Some(merged)
}

/// Same solution set as [`brute_force_search`], scanning only root windows.
pub fn pruned_search(family: &TwistedFamily, b: &SearchBox) -> Result<SearchResult> {
    let (forms, degenerate) = forms_in_box(family, b)?;
    let bound = b.xy_bound as i64;
    let per_a: Result<Vec<_>> = forms
        .into_par_iter()
        .map(|form| {
            let a = form.a.expect("form_at sets a");
            let windows = root_windows(&form)?;
            let lead = form.coeffs[0].abs().to_f64().unwrap_or(f64::INFINITY);
            let d = form.degree;
            let ev = Evaluator::new(form, b.xy_bound);
            let rows: Vec<(Vec<Solution>, u64, u64)> = (-bound..=bound)
                .into_par_iter()
                .filter(|&y| y != 0)
                .map(|y| {
                    let mut out = Vec::new();
                    let mut evals = 0;
                    let mut exhaustive = 0;
                    match candidate_ranges(&windows, lead, d, y, b.m, bound) {
                        Some(ranges) => {
                            for r in ranges {
                                push_row(&ev, a, y, r, b.m, &mut out, &mut evals);
                            }
                        }
                        None => {
                            exhaustive = y.unsigned_abs();
                            push_row(&ev, a, y, -bound..=bound, b.m, &mut out, &mut evals);
                        }
                    }
                    (out, evals, exhaustive)
                })
                .collect();
            let evaluations = rows.iter().map(|r| r.1).sum();
            let y0 = rows.iter().map(|r| r.2).max().unwrap_or(0);
            let sols = rows.into_iter().flat_map(|r| r.0).collect();
            Ok((sols, RowStats { a, y0, evaluations }))
        })
        .collect();
    Ok(finish(per_a?, degenerate))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaReport {
    pub m: u64,
    /// False when `m = 1`: `log m = 0`.
    pub defined: bool,
    pub count: usize,
    pub max_ratio: Option<f64>,
    pub witness: Option<Solution>,
}

/// The largest empirical ratio `max(log|x|, log|y|, |a|) / log m`.
pub fn kappa_report(solutions: &[Solution], m: u64) -> KappaReport {
    let mut best: Option<(f64, &Solution)> = None;
    for s in solutions {
        if let Some(k) = kappa_ratio(s.a, s.x, s.y, m) {
            if best.is_none_or(|(b, _)| k > b) {
                best = Some((k, s));
            }
        }
    }
    KappaReport {
        m,
        defined: m >= 2,
        count: solutions.len(),
        max_ratio: best.map(|b| b.0),
        witness: best.map(|b| b.1.clone()),
    }
}

/// Sanity check on emitted solutions: `xy != 0` and `|F_a(x, y)| <= m`, recomputed exactly.
pub fn recheck(family: &TwistedFamily, b: &SearchBox, solutions: &[Solution]) -> Result<bool> {
    for s in solutions {
        let f = form_at(family, s.a)?;
        let v = f.evaluate(&s.x.into(), &s.y.into());
        if s.x == 0 || s.y == 0 || v != s.value || v.abs() > BigInt::from(b.m) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bh_build, shanks_build, BernsteinHasseParams, ShanksParams};

    fn shanks1() -> TwistedFamily {
        shanks_build(&ShanksParams::standard(1)).unwrap()
    }

    fn keys(r: &SearchResult) -> Vec<(i64, i64, i64)> {
        r.solutions.iter().map(Solution::key).collect()
    }

    #[test]
    fn box_validation() {
        assert!(SearchBox::new(1, 0, 5, 1).is_err());
        assert!(SearchBox::new(0, 0, 0, 1).is_err());
        assert!(SearchBox::new(0, 0, 1, 0).is_err());
    }

    #[test]
    fn known_small_solutions() {
        let b = SearchBox::new(0, 0, 50, 1).unwrap();
        let r = brute_force_search(&shanks1(), &b).unwrap();
        let has = |x: i64, y: i64, v: i64| {
            r.solutions
                .iter()
                .any(|s| s.x == x && s.y == y && s.value == BigInt::from(v))
        };
        assert!(has(2, 1, 1) && has(1, -3, 1) && has(-3, 2, 1));
        assert!(has(-2, -1, -1) && has(-1, 3, -1) && has(3, -2, -1));
        assert_eq!(keys(&r), keys(&pruned_search(&shanks1(), &b).unwrap()));
    }

    #[test]
    fn saturated_m() {
        let b = SearchBox::new(0, 0, 3, 10_000).unwrap();
        let r = brute_force_search(&shanks1(), &b).unwrap();
        assert_eq!(r.solutions.len(), 36);
        assert_eq!(keys(&r), keys(&pruned_search(&shanks1(), &b).unwrap()));
    }

    #[test]
    fn pruned_matches_brute_small() {
        let fam = bh_build(&BernsteinHasseParams::new(1, 2, 1).unwrap()).unwrap();
        let b = SearchBox::new(-1, 1, 60, 10).unwrap();
        let brute = brute_force_search(&fam, &b).unwrap();
        let pruned = pruned_search(&fam, &b).unwrap();
        assert_eq!(keys(&brute), keys(&pruned));
        assert!(pruned.evaluations() < brute.evaluations());
    }

    #[test]
    fn kappa_examples() {
        let s = |a, x, y| Solution {
            a,
            x,
            y,
            value: BigInt::from(1),
            kappa_ratio: None,
        };
        let r = kappa_report(&[s(0, 2, 1)], 2);
        assert!((r.max_ratio.unwrap() - 1.0).abs() < 1e-15);
        let r = kappa_report(&[s(3, 1, 1)], 2);
        assert!((r.max_ratio.unwrap() - 3.0 / 2f64.ln()).abs() < 1e-12);
        let r = kappa_report(&[s(3, 1, 1)], 1);
        assert!(!r.defined && r.max_ratio.is_none());
    }
}
