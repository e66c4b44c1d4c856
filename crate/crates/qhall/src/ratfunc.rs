//! Rational functions in `u = v^{1/2}` and dense linear algebra over fields.
//!
//! This fraction field is only used inside linear solves (monomial
//! expressions, inverse word matrices). Results that leave a solver are
//! converted back to [`ScalarHalf`] and must be Laurent.

use crate::scalars::{pow_rational, poly_divrem, Rational, ScalarHalf};
use num_traits::{One, Zero};
use std::fmt;

type Poly = Vec<Rational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_add(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(&mut out);
    out
}

fn poly_shift(a: &[Rational], k: usize) -> Poly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); k];
    out.extend_from_slice(a);
    out
}

fn poly_monic(a: &[Rational]) -> (Rational, Poly) {
    let lead = a.last().cloned().unwrap_or_else(Rational::one);
    (lead.clone(), a.iter().map(|c| c / &lead).collect())
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    poly_monic(&x).1
}

fn poly_reverse(a: &[Rational]) -> Poly {
    let mut r: Poly = a.iter().rev().cloned().collect();
    trim(&mut r);
    r
}

fn low_zeros(a: &[Rational]) -> usize {
    a.iter().take_while(|c| c.is_zero()).count()
}

/// `u^shift * num(u) / den(u)` in lowest terms: `num(0) != 0`, `den(0) != 0`,
/// `den` monic, `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    shift: i32,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self { shift: 0, num: Vec::new(), den: vec![Rational::one()] }
    }

    pub fn one() -> Self {
        Self::from_scalar(&ScalarHalf::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn from_scalar(s: &ScalarHalf) -> Self {
        let (shift, num) = s.to_poly();
        Self::build(shift, num, vec![Rational::one()])
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_scalar(&ScalarHalf::from_rational(r))
    }

    fn build(shift: i32, mut num: Poly, mut den: Poly) -> Self {
        trim(&mut num);
        trim(&mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return Self::zero();
        }
        let lz = low_zeros(&num);
        let dz = low_zeros(&den);
        let shift = shift + lz as i32 - dz as i32;
        num.drain(..lz);
        den.drain(..dz);
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = poly_divrem(&num, &g).0;
            den = poly_divrem(&den, &g).0;
        }
        let (lead, den) = poly_monic(&den);
        let num = num.iter().map(|c| c / &lead).collect();
        Self { shift, num, den }
    }

    /// Laurent form, if the denominator is trivial.
    pub fn to_scalar(&self) -> Option<ScalarHalf> {
        if self.den.len() == 1 {
            Some(ScalarHalf::from_poly(self.shift, &self.num))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(o.shift);
        let sa = poly_shift(&self.num, (self.shift - m) as usize);
        let sb = poly_shift(&o.num, (o.shift - m) as usize);
        if self.den == o.den {
            return Self::build(m, poly_add(&sa, &sb), self.den.clone());
        }
        let a = poly_mul(&sa, &o.den);
        let b = poly_mul(&sb, &self.den);
        Self::build(m, poly_add(&a, &b), poly_mul(&self.den, &o.den))
    }

    pub fn neg(&self) -> Self {
        Self {
            shift: self.shift,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.len() == 1 && o.den.len() == 1 {
            return Self {
                shift: self.shift + o.shift,
                num: poly_mul(&self.num, &o.num),
                den: vec![Rational::one()],
            };
        }
        Self::build(
            self.shift + o.shift,
            poly_mul(&self.num, &o.num),
            poly_mul(&self.den, &o.den),
        )
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::build(-self.shift, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn mul_scalar(&self, s: &ScalarHalf) -> Self {
        self.mul(&Self::from_scalar(s))
    }

    /// Coefficient bar `u -> u^{-1}`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let dn = self.num.len() as i32 - 1;
        let dd = self.den.len() as i32 - 1;
        Self::build(
            -self.shift - dn + dd,
            poly_reverse(&self.num),
            poly_reverse(&self.den),
        )
    }

    /// Evaluate at a rational `u`; `None` at a pole.
    pub fn eval_u(&self, u: &Rational) -> Option<Rational> {
        let ev = |p: &Poly| {
            let mut acc = Rational::zero();
            for c in p.iter().rev() {
                acc = acc * u + c;
            }
            acc
        };
        let d = ev(&self.den);
        if d.is_zero() {
            return None;
        }
        Some(pow_rational(u, self.shift) * ev(&self.num) / d)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = ScalarHalf::from_poly(self.shift, &self.num);
        let d = ScalarHalf::from_poly(0, &self.den);
        if self.den.len() == 1 {
            write!(f, "{}", n)
        } else {
            write!(f, "({}) / ({})", n, d)
        }
    }
}

/// Minimal field interface for the dense solvers below.
pub trait Field: Clone + PartialEq {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_inv(&self) -> Self;
}

impl Field for RatFunc {
    fn f_zero() -> Self {
        RatFunc::zero()
    }
    fn f_one() -> Self {
        RatFunc::one()
    }
    fn f_is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn f_add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn f_sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn f_mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn f_inv(&self) -> Self {
        RatFunc::inv(self)
    }
}

impl Field for Rational {
    fn f_zero() -> Self {
        Zero::zero()
    }
    fn f_one() -> Self {
        One::one()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_inv(&self) -> Self {
        self.recip()
    }
}

/// Inverse of a square matrix; `None` if singular.
pub fn invert<F: Field>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut inv: Vec<Vec<F>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::f_one() } else { F::f_zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].f_is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pinv = a[col][col].f_inv();
        for j in 0..n {
            a[col][j] = a[col][j].f_mul(&pinv);
            inv[col][j] = inv[col][j].f_mul(&pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].f_is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = a[col][j].f_mul(&f);
                a[r][j] = a[r][j].f_sub(&t);
                let t = inv[col][j].f_mul(&f);
                inv[r][j] = inv[r][j].f_sub(&t);
            }
        }
    }
    Some(inv)
}

/// Indices of a maximal set of linearly independent rows, chosen greedily in
/// the given order.
pub fn independent_rows<F: Field>(rows: &[Vec<F>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<F>)> = Vec::new(); // (pivot col, reduced row)
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if !r[*pc].f_is_zero() {
                let f = r[*pc].clone();
                for j in 0..r.len() {
                    let t = b[j].f_mul(&f);
                    r[j] = r[j].f_sub(&t);
                }
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.f_is_zero()) {
            let pinv = r[pc].f_inv();
            let r: Vec<F> = r.iter().map(|x| x.f_mul(&pinv)).collect();
            basis.push((pc, r));
            chosen.push(idx);
        }
    }
    chosen
}

/// Multiply matrices.
pub fn matmul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = F::f_zero();
                    for t in 0..k {
                        if !row[t].f_is_zero() && !b[t][j].f_is_zero() {
                            acc = acc.f_add(&row[t].f_mul(&b[t][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
