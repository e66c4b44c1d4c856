//! Exact coefficient arithmetic.
//!
//! [`ScalarHalf`] is a Laurent polynomial in `u = v^{1/2}` with rational
//! coefficients. Exponents are stored as powers of `u`, so `v^k` is `u^{2k}`
//! and `q = v^2` is `u^4`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub type Rational = BigRational;

/// Errors raised by coefficient-level routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("interpolation instability: {0}")]
    InterpolationInstability(String),
    #[error("interpolation needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("duplicate interpolation point {0}")]
    DuplicatePoint(String),
    #[error("not an exact Laurent quotient")]
    InexactDivision,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Laurent polynomial in `u = v^{1/2}` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ScalarHalf {
    terms: BTreeMap<i32, Rational>,
}

impl ScalarHalf {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(0, rat(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::monomial(0, r)
    }

    /// `c * u^e`.
    pub fn monomial(e: i32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `u^e = v^{e/2}`.
    pub fn u_pow(e: i32) -> Self {
        Self::monomial(e, Rational::one())
    }

    /// `v^k`.
    pub fn v_pow(k: i32) -> Self {
        Self::u_pow(2 * k)
    }

    /// `v^{n/2}` for a signed half-integer given as its numerator.
    pub fn v_half_pow(n: i32) -> Self {
        Self::u_pow(n)
    }

    /// Build from `(u-exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rational)>>(it: I) -> Self {
        let mut s = Self::zero();
        for (e, c) in it {
            s.add_term(e, c);
        }
        s
    }

    pub fn add_term(&mut self, e: i32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, e: i32) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// The bar involution `u -> u^{-1}`.
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Multiply by `u^e`.
    pub fn shift(&self, e: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// True when every coefficient is a nonnegative integer.
    pub fn is_nonneg_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer() && !c.is_negative())
    }

    /// True when only integral powers of `v` occur.
    pub fn is_v_laurent(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// True when all exponents are strictly negative powers of `v` and
    /// coefficients are integers (the ring `v^{-1} Z[v^{-1}]`).
    pub fn in_neg_ring(&self) -> bool {
        self.is_integral() && self.terms.keys().all(|e| e % 2 == 0 && *e < 0)
    }

    /// The ring `v Z[v]`.
    pub fn in_pos_ring(&self) -> bool {
        self.is_integral() && self.terms.keys().all(|e| e % 2 == 0 && *e > 0)
    }

    /// Part with u-exponent strictly below zero.
    pub fn negative_part(&self) -> Self {
        Self {
            terms: self.terms.range(..0).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Part with u-exponent strictly above zero.
    pub fn positive_part(&self) -> Self {
        Self {
            terms: self.terms.range(1..).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    /// Exact Laurent division; fails if `d` does not divide `self`.
    pub fn div_exact(&self, d: &ScalarHalf) -> Result<ScalarHalf, ScalarError> {
        if d.is_zero() {
            return Err(ScalarError::InexactDivision);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (sa, a) = self.to_poly();
        let (sd, dd) = d.to_poly();
        let (quot, rem) = poly_divrem(&a, &dd);
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(ScalarError::InexactDivision);
        }
        Ok(Self::from_poly(sa - sd, &quot))
    }

    /// Split as `u^s * p(u)` with `p(0) != 0`; coefficients low to high.
    pub(crate) fn to_poly(&self) -> (i32, Vec<Rational>) {
        let Some(lo) = self.min_exp() else {
            return (0, Vec::new());
        };
        let hi = self.max_exp().unwrap();
        let mut p = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            p[(e - lo) as usize] = c.clone();
        }
        (lo, p)
    }

    pub(crate) fn from_poly(shift: i32, p: &[Rational]) -> Self {
        Self::from_terms(
            p.iter()
                .enumerate()
                .map(|(i, c)| (shift + i as i32, c.clone())),
        )
    }

    /// Evaluate at a rational value of `u`.
    pub fn eval_u(&self, u: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += c * pow_rational(u, *e);
        }
        acc
    }

    /// Quantum integer `[n] = (v^n - v^{-n}) / (v - v^{-1})`.
    pub fn qint(n: i64) -> Self {
        if n < 0 {
            return -Self::qint(-n);
        }
        Self::from_terms((0..n).map(|k| (2 * (n - 1 - 2 * k) as i32, Rational::one())))
    }

    /// Quantum factorial `[n]!`.
    pub fn qfactorial(n: i64) -> Self {
        let mut acc = Self::one();
        for k in 1..=n {
            acc = &acc * &Self::qint(k);
        }
        acc
    }

    /// Quantum binomial in `v`, balanced form; zero for `k < 0` and for
    /// `0 <= n < k`.
    pub fn qbinom(n: i64, k: i64) -> Self {
        if k < 0 || (n >= 0 && k > n) {
            return Self::zero();
        }
        let mut num = Self::one();
        for j in 0..k {
            num = &num * &Self::qint(n - j);
        }
        num.div_exact(&Self::qfactorial(k))
            .expect("quantum binomials are Laurent")
    }

    /// Render with `v` as the variable, e.g. `v^{-1/2} - 2v`.
    pub fn to_pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mon = v_monomial(*e);
            if mon.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mon);
            } else {
                out.push_str(&format!("{}{}", a, mon));
            }
        }
        out
    }

    /// Render as LaTeX.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mon = if *e == 0 {
                String::new()
            } else if e % 2 == 0 {
                if *e == 2 {
                    "v".to_string()
                } else {
                    format!("v^{{{}}}", e / 2)
                }
            } else {
                format!("v^{{{}/2}}", e)
            };
            let coef = if a.is_integer() {
                a.to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
            };
            if mon.is_empty() {
                out.push_str(&coef);
            } else if a.is_one() {
                out.push_str(&mon);
            } else {
                out.push_str(&coef);
                out.push_str(&mon);
            }
        }
        out
    }
}

fn v_monomial(e: i32) -> String {
    if e == 0 {
        String::new()
    } else if e == 2 {
        "v".to_string()
    } else if e % 2 == 0 {
        format!("v^{}", e / 2)
    } else {
        format!("v^{{{}/2}}", e)
    }
}

pub(crate) fn pow_rational(x: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Polynomial long division over the rationals; inputs low to high.
pub(crate) fn poly_divrem(a: &[Rational], d: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem: Vec<Rational> = a.to_vec();
    let mut dd: Vec<Rational> = d.to_vec();
    while dd.last().is_some_and(|c| c.is_zero()) {
        dd.pop();
    }
    assert!(!dd.is_empty(), "division by zero polynomial");
    while rem.last().is_some_and(|c| c.is_zero()) {
        rem.pop();
    }
    if rem.len() < dd.len() {
        return (Vec::new(), rem);
    }
    let lead = dd.last().unwrap().clone();
    let mut quot = vec![Rational::zero(); rem.len() - dd.len() + 1];
    while rem.len() >= dd.len() && !rem.is_empty() {
        let shift = rem.len() - dd.len();
        let c = rem.last().unwrap() / &lead;
        for (i, dc) in dd.iter().enumerate() {
            rem[shift + i] -= &c * dc;
        }
        quot[shift] = c;
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
    }
    (quot, rem)
}

impl fmt::Display for ScalarHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pretty())
    }
}

impl fmt::Debug for ScalarHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarHalf({})", self.to_pretty())
    }
}

impl From<i64> for ScalarHalf {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for ScalarHalf {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a ScalarHalf> for &ScalarHalf {
    type Output = ScalarHalf;
    fn add(self, rhs: &'a ScalarHalf) -> ScalarHalf {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ScalarHalf {
    type Output = ScalarHalf;
    fn add(mut self, rhs: ScalarHalf) -> ScalarHalf {
        self += &rhs;
        self
    }
}

impl AddAssign<&ScalarHalf> for ScalarHalf {
    fn add_assign(&mut self, rhs: &ScalarHalf) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl AddAssign for ScalarHalf {
    fn add_assign(&mut self, rhs: ScalarHalf) {
        *self += &rhs;
    }
}

impl<'a> Sub<&'a ScalarHalf> for &ScalarHalf {
    type Output = ScalarHalf;
    fn sub(self, rhs: &'a ScalarHalf) -> ScalarHalf {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for ScalarHalf {
    type Output = ScalarHalf;
    fn sub(mut self, rhs: ScalarHalf) -> ScalarHalf {
        self -= &rhs;
        self
    }
}

impl SubAssign<&ScalarHalf> for ScalarHalf {
    fn sub_assign(&mut self, rhs: &ScalarHalf) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl SubAssign for ScalarHalf {
    fn sub_assign(&mut self, rhs: ScalarHalf) {
        *self -= &rhs;
    }
}

impl<'a> Mul<&'a ScalarHalf> for &ScalarHalf {
    type Output = ScalarHalf;
    fn mul(self, rhs: &'a ScalarHalf) -> ScalarHalf {
        let mut out = ScalarHalf::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for ScalarHalf {
    type Output = ScalarHalf;
    fn mul(self, rhs: ScalarHalf) -> ScalarHalf {
        &self * &rhs
    }
}

impl MulAssign<&ScalarHalf> for ScalarHalf {
    fn mul_assign(&mut self, rhs: &ScalarHalf) {
        *self = &*self * rhs;
    }
}

impl Neg for ScalarHalf {
    type Output = ScalarHalf;
    fn neg(self) -> ScalarHalf {
        ScalarHalf {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Neg for &ScalarHalf {
    type Output = ScalarHalf;
    fn neg(self) -> ScalarHalf {
        -self.clone()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

fn parse_bigint(x: IntOrString) -> Result<BigInt, String> {
    match x {
        IntOrString::Int(n) => Ok(BigInt::from(n)),
        IntOrString::Str(s) => s.parse::<BigInt>().map_err(|e| e.to_string()),
    }
}

struct Triple<'a>(i32, &'a BigInt, &'a BigInt);

impl Serialize for Triple<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        seq.serialize_element(&self.0)?;
        for n in [self.1, self.2] {
            match n.to_i64() {
                Some(k) => seq.serialize_element(&k)?,
                None => seq.serialize_element(&n.to_string())?,
            }
        }
        seq.end()
    }
}

/// Canonical form: list of `[u-exponent, numerator, denominator]` triples in
/// increasing exponent order.
impl Serialize for ScalarHalf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&Triple(*e, c.numer(), c.denom()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ScalarHalf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ScalarHalf;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of [exponent, numerator, denominator] triples")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ScalarHalf, A::Error> {
                let mut out = ScalarHalf::zero();
                let mut last: Option<i32> = None;
                while let Some((e, n, d)) = seq.next_element::<(i32, IntOrString, IntOrString)>()? {
                    if last.is_some_and(|l| l >= e) {
                        return Err(de::Error::custom("exponents must be strictly increasing"));
                    }
                    last = Some(e);
                    let n = parse_bigint(n).map_err(de::Error::custom)?;
                    let d = parse_bigint(d).map_err(de::Error::custom)?;
                    if d.is_zero() {
                        return Err(de::Error::custom("zero denominator"));
                    }
                    out.add_term(e, Rational::new(n, d));
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }
}

/// Polynomial in `q` with rational coefficients (index = power of `q`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<Rational>,
}

impl QPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }

    /// Embed via `q = v^2 = u^4`.
    pub fn to_scalar(&self) -> ScalarHalf {
        ScalarHalf::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (4 * k as i32, c.clone())),
        )
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPolynomial({:?})", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

/// Lagrange interpolation through `(point, value)` samples with degree at
/// most `degree_cap`. Extra samples beyond `degree_cap + 1` must be
/// reproduced exactly.
pub fn interpolate_q(
    samples: &[(Rational, Rational)],
    degree_cap: usize,
) -> Result<QPolynomial, ScalarError> {
    if samples.len() < degree_cap + 1 {
        return Err(ScalarError::TooFewSamples {
            needed: degree_cap + 1,
            got: samples.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for (x, _) in samples {
        if !seen.insert(x.clone()) {
            return Err(ScalarError::DuplicatePoint(x.to_string()));
        }
    }
    let fit = newton_fit(&samples[..degree_cap + 1]);
    for (x, y) in &samples[degree_cap + 1..] {
        if &fit.eval(x) != y {
            return Err(ScalarError::InterpolationInstability(format!(
                "sample at {} disagrees with the degree-{} interpolant",
                x, degree_cap
            )));
        }
    }
    Ok(fit)
}

/// Exact interpolant through all given points (degree < number of points).
fn newton_fit(samples: &[(Rational, Rational)]) -> QPolynomial {
    let n = samples.len();
    let xs: Vec<Rational> = samples.iter().map(|s| s.0.clone()).collect();
    let mut dd: Vec<Rational> = samples.iter().map(|s| s.1.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    // Expand the Newton form into monomial coefficients.
    let mut poly = vec![Rational::zero(); n.max(1)];
    for k in (0..n).rev() {
        // poly = poly * (q - x_k) + dd[k]
        let mut next = vec![Rational::zero(); n.max(1)];
        for (i, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i + 1 < next.len() {
                next[i + 1] += c;
            }
            next[i] -= c * &xs[k];
        }
        next[0] += &dd[k];
        poly = next;
    }
    QPolynomial::new(poly)
}

/// Prime sample points used for interpolation.
pub const SAMPLE_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Result of [`interpolate_stable`].
#[derive(Clone, Debug)]
pub struct StableFit<K: Ord> {
    pub polys: BTreeMap<K, QPolynomial>,
    pub primes_used: Vec<u64>,
    pub held_out: u64,
}

/// Interpolate a family of counts keyed by `K`, escalating the number of
/// sample primes until two consecutive interpolants agree, then checking one
/// further held-out prime. `cap` is the expected degree bound and sets the
/// starting number of samples.
pub fn interpolate_stable<K, E, F>(
    cap: usize,
    primes: &[u64],
    sample: F,
) -> Result<StableFit<K>, E>
where
    K: Ord + Clone + Send,
    E: From<ScalarError> + Send,
    F: Fn(u64) -> Result<BTreeMap<K, Rational>, E> + Sync,
{
    let first = (cap + 2).min(primes.len());
    let mut values: Vec<(u64, BTreeMap<K, Rational>)> = primes[..first]
        .par_iter()
        .map(|&p| sample(p).map(|m| (p, m)))
        .collect::<Result<Vec<_>, E>>()?;
    let mut k = cap + 1;
    loop {
        if values.len() < k + 1 {
            if values.len() >= primes.len() {
                return Err(E::from(ScalarError::InterpolationInstability(
                    "ran out of sample primes before two interpolants agreed".into(),
                )));
            }
            let p = primes[values.len()];
            values.push((p, sample(p)?));
        }
        let a = fit_family(&values[..k]);
        let b = fit_family(&values[..k + 1]);
        if a == b {
            let held_idx = k + 1;
            if held_idx >= primes.len() {
                return Err(E::from(ScalarError::InterpolationInstability(
                    "no prime left for the held-out check".into(),
                )));
            }
            let p = primes[held_idx];
            let held = if values.len() > held_idx {
                values[held_idx].1.clone()
            } else {
                sample(p)?
            };
            check_family(&a, p, &held)?;
            return Ok(StableFit {
                polys: a,
                primes_used: values[..k + 1].iter().map(|v| v.0).collect(),
                held_out: p,
            });
        }
        k += 1;
    }
}

fn fit_family<K: Ord + Clone>(values: &[(u64, BTreeMap<K, Rational>)]) -> BTreeMap<K, QPolynomial> {
    let keys: BTreeSet<K> = values.iter().flat_map(|v| v.1.keys().cloned()).collect();
    let mut out = BTreeMap::new();
    for key in keys {
        let samples: Vec<(Rational, Rational)> = values
            .iter()
            .map(|(p, m)| (rat(*p as i64), m.get(&key).cloned().unwrap_or_else(Rational::zero)))
            .collect();
        let poly = newton_fit(&samples);
        if !poly.is_zero() {
            out.insert(key, poly);
        }
    }
    out
}

fn check_family<K: Ord + Clone>(
    fit: &BTreeMap<K, QPolynomial>,
    p: u64,
    held: &BTreeMap<K, Rational>,
) -> Result<(), ScalarError> {
    let q = rat(p as i64);
    let keys: BTreeSet<&K> = fit.keys().chain(held.keys()).collect();
    for key in keys {
        let predicted = fit.get(key).map(|f| f.eval(&q)).unwrap_or_else(Rational::zero);
        let actual = held.get(key).cloned().unwrap_or_else(Rational::zero);
        if predicted != actual {
            return Err(ScalarError::InterpolationInstability(format!(
                "held-out prime {} gives {} but the interpolant predicts {}",
                p, actual, predicted
            )));
        }
    }
    Ok(())
}

/// Exact value in `Q(q^{1/4})`, stored over the basis `q^{r/4}`, `r = 0..4`.
/// When `q` is a perfect square (or fourth power) the radicals are folded
/// back into the rational part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalValue {
    pub q: u64,
    pub parts: [Rational; 4],
}

impl EvalValue {
    pub fn as_rational(&self) -> Option<Rational> {
        if self.parts[1..].iter().all(|c| c.is_zero()) {
            Some(self.parts[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }
}

fn exact_root(q: u64, k: u32) -> Option<u64> {
    let r = (q as f64).powf(1.0 / k as f64).round() as u64;
    (r.saturating_sub(1)..=r + 1).find(|c| c.pow(k) == q)
}

/// Evaluate at `v = sqrt(q)`.
pub fn eval_at_prime(x: &ScalarHalf, q: u64) -> EvalValue {
    let qr = rat(q as i64);
    let mut parts: [Rational; 4] = Default::default();
    for (e, c) in x.terms() {
        let (a, r) = (Integer::div_floor(&e, &4), Integer::mod_floor(&e, &4));
        parts[r as usize] += c * pow_rational(&qr, a);
    }
    if let Some(s) = exact_root(q, 2) {
        let s = rat(s as i64);
        let p2 = std::mem::take(&mut parts[2]);
        let p3 = std::mem::take(&mut parts[3]);
        parts[0] += &s * p2;
        parts[1] += &s * p3;
        if let Some(t) = exact_root(q, 4) {
            let p1 = std::mem::take(&mut parts[1]);
            parts[0] += rat(t as i64) * p1;
        }
    }
    EvalValue { q, parts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: i32) -> ScalarHalf {
        ScalarHalf::v_pow(k)
    }

    #[test]
    fn bar_examples() {
        assert_eq!(ScalarHalf::u_pow(1).bar(), ScalarHalf::u_pow(-1));
        assert_eq!(ScalarHalf::one().bar(), ScalarHalf::one());
        let x = &v(1) - &v(-1);
        assert_eq!(x.bar(), &v(-1) - &v(1));
    }

    #[test]
    fn interpolation_examples() {
        let s = vec![(rat(2), rat(3)), (rat(3), rat(8)), (rat(5), rat(24))];
        let p = interpolate_q(&s, 2).unwrap();
        assert_eq!(p, QPolynomial::new(vec![rat(-1), rat(0), rat(1)]));
        let c = interpolate_q(&[(rat(2), rat(1)), (rat(3), rat(1))], 1).unwrap();
        assert_eq!(c, QPolynomial::new(vec![rat(1)]));
        let ext = interpolate_q(&[(rat(2), rat(2)), (rat(3), rat(3)), (rat(5), rat(5))], 2).unwrap();
        assert_eq!(ext, QPolynomial::new(vec![rat(0), rat(1)]));
    }

    #[test]
    fn interpolation_detects_non_polynomial_data() {
        let s = vec![(rat(2), rat(4)), (rat(3), rat(9)), (rat(5), rat(26))];
        let err = interpolate_q(&s, 1).unwrap_err();
        assert!(matches!(err, ScalarError::InterpolationInstability(_)));
        assert!(matches!(
            interpolate_q(&s[..1], 1),
            Err(ScalarError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn stable_interpolation_uses_held_out_prime() {
        let fit = interpolate_stable::<u8, ScalarError, _>(2, &SAMPLE_PRIMES, |p| {
            let q = rat(p as i64);
            Ok(BTreeMap::from([(0u8, &q * &q - rat(1)), (1u8, q)]))
        })
        .unwrap();
        assert_eq!(fit.primes_used, vec![2, 3, 5, 7]);
        assert_eq!(fit.held_out, 11);
        assert_eq!(fit.polys[&1], QPolynomial::new(vec![rat(0), rat(1)]));
    }

    #[test]
    fn stable_interpolation_escalates_past_a_wrong_cap() {
        let fit = interpolate_stable::<u8, ScalarError, _>(1, &SAMPLE_PRIMES, |p| {
            let q = rat(p as i64);
            Ok(BTreeMap::from([(0u8, &q * &q * &q)]))
        })
        .unwrap();
        assert_eq!(fit.polys[&0].degree(), Some(3));
    }

    #[test]
    fn eval_examples() {
        let x = &v(3) + &v(1);
        assert_eq!(eval_at_prime(&x, 4).as_rational(), Some(rat(10)));
        assert_eq!(eval_at_prime(&v(-1), 9).as_rational(), Some(rat_frac(1, 3)));
        let h = eval_at_prime(&ScalarHalf::u_pow(1), 2);
        assert!(!h.is_rational());
        assert_eq!(h.parts[1], rat(1));
        assert_eq!(eval_at_prime(&v(2), 2).as_rational(), Some(rat(2)));
    }

    #[test]
    fn quantum_numbers() {
        assert_eq!(ScalarHalf::qint(2), &v(1) + &v(-1));
        assert_eq!(ScalarHalf::qint(0), ScalarHalf::zero());
        let b = ScalarHalf::qbinom(4, 2);
        let expect = ScalarHalf::from_terms([(8, rat(1)), (4, rat(1)), (0, rat(2)), (-4, rat(1)), (-8, rat(1))]);
        assert_eq!(b, expect);
        assert!(ScalarHalf::qbinom(2, 3).is_zero());
        assert!(ScalarHalf::qbinom(3, -1).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &v(2) - &v(-2);
        let d = &v(1) - &v(-1);
        assert_eq!(a.div_exact(&d).unwrap(), &v(1) + &v(-1));
        assert!(v(1).div_exact(&(&v(1) + &ScalarHalf::one())).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let x = ScalarHalf::from_terms([(-1, rat_frac(3, 2)), (4, rat(-7))]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[-1,3,2],[4,-7,1]]");
        let y: ScalarHalf = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn pretty_printing() {
        let x = &(&ScalarHalf::u_pow(-1) - &v(1).scale(&rat(2))) + &ScalarHalf::one();
        assert_eq!(x.to_pretty(), "-2v + 1 + v^{-1/2}");
    }
}
