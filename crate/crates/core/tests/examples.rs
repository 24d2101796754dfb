use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use thue_core::families::{bh_build, shanks_build, BernsteinHasseParams, ShanksParams};
use thue_core::solver::{brute_force_search, kappa_ratio, kappa_report, SearchBox, Solution};
use thue_core::{
    admissible_range, coefficient_U, evaluate, form_at, BinaryForm, Error, FieldExt, IntPolynomial, NumberField,
    RatPolynomial, TwistedFamily,
};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rp(c: &[i64]) -> RatPolynomial {
    RatPolynomial::from_i64s(c)
}

#[test]
fn field_construction() {
    assert_eq!(NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap().degree(), 3);
    assert_eq!(NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap().degree(), 4);
    assert!(matches!(
        NumberField::from_i64s(&[-1, 0, 1]),
        Err(Error::IrreducibilityFailed { .. })
    ));
}

#[test]
fn element_arithmetic() {
    let k = NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap();
    let l = k.generator();
    // -1/(l+1) is another root of X^3 - 3X - 1
    let l2 = -&(&l + &k.one()).inv().unwrap();
    assert_eq!(l2.charpoly(), rp(&[-1, -3, 0, 1]));
    assert!(l.pow(0).unwrap().is_one());

    let w4 = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
    let w = w4.generator();
    let inv = w.inv().unwrap();
    assert_eq!(inv, w.pow(3).unwrap().scale(&BigRational::new(1.into(), 2.into())));
}

#[test]
fn multiplication_matrices() {
    let k = NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap();
    let zero = vec![vec![q(0); 3]; 3];
    assert_eq!(k.zero().mul_matrix(), zero);
    let id: Vec<Vec<BigRational>> = (0..3).map(|i| (0..3).map(|j| q((i == j) as i64)).collect()).collect();
    assert_eq!(k.one().mul_matrix(), id);
    // companion matrix of X^3 - 3X - 1
    let comp = vec![vec![q(0), q(0), q(1)], vec![q(1), q(0), q(3)], vec![q(0), q(1), q(0)]];
    assert_eq!(k.generator().mul_matrix(), comp);
}

#[test]
fn characteristic_and_minimal_polynomials() {
    let w4 = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
    let w = w4.generator();
    assert_eq!((&w4.one() + &w).charpoly(), rp(&[-1, -4, 6, -4, 1]));
    assert_eq!(w4.from_i64(3).charpoly(), rp(&[81, -108, 54, -12, 1]));
    assert_eq!(w.pow(2).unwrap().min_poly(), IntPolynomial::from_i64s(&[-2, 0, 1]));
    assert_eq!(w4.from_i64(5).min_poly(), IntPolynomial::from_i64s(&[-5, 1]));

    let k = NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap();
    assert_eq!(k.generator().min_poly(), IntPolynomial::from_i64s(&[-1, -3, 0, 1]));

    let fam = shanks(1);
    assert_eq!(fam.gamma(1).charpoly(), rp(&[-1, 0, 3, 1]));
}

#[test]
fn traces_and_norms() {
    for n in -3..=5 {
        let fam = shanks(n);
        assert_eq!(fam.alpha().trace(), q(n - 1));
        assert!(fam.alpha().norm().is_one());
        assert!(fam.field().one().norm().is_one());
    }
}

#[test]
fn embedding_shapes() {
    let k = NumberField::from_i64s(&[-1, -3, 0, 1]).unwrap();
    let set = k.embeddings(128).unwrap();
    assert_eq!((set.len(), set.real_count()), (3, 3));
    let w4 = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
    let set = w4.embeddings(128).unwrap();
    assert_eq!((set.len(), set.real_count()), (4, 2));

    let k2 = NumberField::from_i64s(&[-2, 0, 1]).unwrap();
    let set = k2.embeddings(128).unwrap();
    let sqrt2 = BigRational::new(141421356237_i64.into(), 100000000000_i64.into());
    let tol = BigRational::new(1.into(), 10000000000_i64.into());
    let mut mids: Vec<BigRational> = set.roots.iter().map(|z| z.re.mid().to_rational()).collect();
    mids.sort();
    assert!((&mids[0] + &sqrt2).abs() < tol && (&mids[1] - &sqrt2).abs() < tol);
    for z in &set.roots {
        assert!(z.re.rad().to_rational() <= BigRational::new(1.into(), BigInt::one() << 128));
        assert!(z.im.contains_zero());
    }
}

fn shanks(n: i64) -> TwistedFamily {
    shanks_build(&ShanksParams::standard(n)).unwrap()
}

#[test]
fn family_invariants() {
    let s = shanks(1);
    assert_eq!((s.delta(), s.nu()), (1, 1));
    let b = bh_build(&BernsteinHasseParams::new(1, 2, 1).unwrap()).unwrap();
    assert_eq!((b.delta(), b.nu()), (-1, 2));
    let k = s.field().clone();
    assert!(matches!(
        TwistedFamily::new(&k, k.generator(), k.one()),
        Err(Error::TorsionUnit)
    ));
}

#[test]
fn forms_and_coefficients() {
    let b = bh_build(&BernsteinHasseParams::new(1, 2, 1).unwrap()).unwrap();
    assert_eq!(form_at(&b, 0).unwrap().coeffs, BinaryForm::from_i64s(&[1, -4, 6, -4, -1]).coeffs);
    assert_eq!(coefficient_U(&b, 1, 0).unwrap(), BigInt::from(4));
    assert_eq!(coefficient_U(&b, 2, 1).unwrap(), BigInt::from(-6));
    assert_eq!(BigRational::from_integer(coefficient_U(&b, 4, 0).unwrap()), b.alpha().norm());

    let s = shanks(1);
    assert_eq!(form_at(&s, 0).unwrap().coeffs, BinaryForm::from_i64s(&[1, 0, -3, -1]).coeffs);
    assert_eq!(form_at(&s, 1).unwrap().coeffs, BinaryForm::from_i64s(&[1, 3, 0, -1]).coeffs);
}

#[test]
fn admissible_twists() {
    let r = admissible_range(&shanks(1), -5, 5);
    assert_eq!(r.admissible, (-5..=5).collect::<Vec<_>>());
    assert!(r.excluded.is_empty());

    // eps = 1 + w with w^4 = 2 is a unit; alpha = eps^2
    let k = NumberField::from_i64s(&[-2, 0, 0, 0, 1]).unwrap();
    let eps = &k.one() + &k.generator();
    let fam = TwistedFamily::new(&k, eps.pow(2).unwrap(), eps).unwrap();
    let r = admissible_range(&fam, -4, 4);
    assert_eq!(r.excluded.len(), 1);
    assert_eq!((r.excluded[0].a, r.excluded[0].degree), (-2, 1));
    assert!(matches!(form_at(&fam, -2), Err(Error::DegenerateDegree { a: -2, .. })));
}

#[test]
fn evaluation() {
    let f = form_at(&shanks(1), 0).unwrap();
    let ev = |x: i64, y: i64| evaluate(&f, &x.into(), &y.into());
    assert_eq!(ev(1, 0), f.coeffs[0]);
    assert_eq!(ev(2, 1), BigInt::from(1));
    assert_eq!(ev(1, -3), BigInt::from(1));
}

#[test]
fn exhaustive_search_examples() {
    let s = shanks(1);
    let r = brute_force_search(&s, &SearchBox::new(0, 0, 50, 1).unwrap()).unwrap();
    let has = |x: i64, y: i64, v: i64| r.solutions.iter().any(|t| (t.x, t.y, t.value.clone()) == (x, y, v.into()));
    for (x, y) in [(2, 1), (1, -3), (-3, 2)] {
        assert!(has(x, y, 1) && has(-x, -y, -1));
    }
    assert!(SearchBox::new(1, 0, 10, 1).is_err());
    // m beyond max |F| on the box: every xy != 0 point
    let r = brute_force_search(&s, &SearchBox::new(0, 0, 3, 1_000_000).unwrap()).unwrap();
    assert_eq!(r.solutions.len(), 36);
}

#[test]
fn kappa_examples() {
    assert_eq!(kappa_ratio(0, 2, 1, 2), Some(1.0));
    assert_eq!(kappa_ratio(3, 1, 1, 2), Some(3.0 / 2f64.ln()));
    assert_eq!(kappa_ratio(0, 2, 1, 1), None);
    let sol = Solution {
        a: 0,
        x: 2,
        y: 1,
        value: BigInt::one(),
        kappa_ratio: kappa_ratio(0, 2, 1, 2),
    };
    let rep = kappa_report(&[sol], 2);
    assert!(rep.defined && rep.max_ratio == Some(1.0));
    assert!(!kappa_report(&[], 1).defined);
}
