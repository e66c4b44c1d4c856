//! The generic iHall algebra of split `A1` (`k[eps]/eps^2`), built from
//! extension counts interpolated over primes, with its bar involution, the
//! `diamond` action and the dual canonical basis.

use super::{ext_census, ExtCensus, IHallError, IQuiverAlgebra, LambdaModule, DEFAULT_CAP};
use crate::cartan::{DiagramInvolution, QuiverShape};
use crate::finrep::{KSClass, RepCategory};
use crate::hallgen::{memo, Memo};
use crate::lincomb::LinComb;
use crate::scalars::{interpolate_stable, rat, Rational, ScalarHalf, SAMPLE_PRIMES};
use crate::triangle::{lusztig_basis, CorrectionRing, Direction, Matrix, TriangularProblem};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// An element `a + b sqrt(q)` of `Q(sqrt q)`, where `v = sqrt q`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSqrt {
    pub a: Rational,
    pub b: Rational,
    pub q: u64,
}

impl QSqrt {
    pub fn int(n: i64, q: u64) -> Self {
        Self { a: rat(n), b: Rational::zero(), q }
    }

    /// `v^k` with `v = sqrt q`.
    pub fn v_pow(k: i64, q: u64) -> Self {
        let half = k.div_euclid(2);
        let base = if half >= 0 { rat(q.pow(half as u32) as i64) } else { Rational::one() / rat(q.pow((-half) as u32) as i64) };
        if k.rem_euclid(2) == 0 {
            Self { a: base, b: Rational::zero(), q }
        } else {
            Self { a: Rational::zero(), b: base, q }
        }
    }

    /// Evaluate a Laurent polynomial in `v` (integral exponents only).
    pub fn eval(s: &ScalarHalf, q: u64) -> Option<Self> {
        let mut out = Self::int(0, q);
        for (e, c) in s.terms() {
            if e % 2 != 0 {
                return None;
            }
            let t = Self::v_pow((e / 2) as i64, q);
            out = out.add(&Self { a: t.a * c, b: t.b * c, q });
        }
        Some(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { a: &self.a + &o.a, b: &self.b + &o.b, q: self.q }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let q = rat(self.q as i64);
        Self { a: &self.a * &o.a + &self.b * &o.b * q, b: &self.a * &o.b + &self.b * &o.a, q: self.q }
    }

    pub fn neg(&self) -> Self {
        Self { a: -&self.a, b: -&self.b, q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl fmt::Debug for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q)
    }
}

/// `K_alpha * u_lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IBasis {
    pub alpha: Vec<i64>,
    pub lambda: KSClass,
}

pub type IHallElt = LinComb<IBasis>;

/// Letters of monomial expressions: `u_S` and `K^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HallLetter {
    S,
    K(i64),
}

/// `S^a + K^b` for split `A1`.
pub type A1Class = (u32, u32);

/// Generic iHall algebra of `k[eps]/eps^2`.
pub struct SplitRankOne {
    pub alg: IQuiverAlgebra,
    pub cat: RepCategory,
    pub primes: Vec<u64>,
    pub cap: u128,
    products: Memo<(A1Class, A1Class), LinComb<A1Class>>,
    reduced: Memo<A1Class, IHallElt>,
    mono: Memo<u32, LinComb<Vec<HallLetter>>>,
}

impl Default for SplitRankOne {
    fn default() -> Self {
        Self::new()
    }
}

fn basis(alpha: i64, a: u32) -> IBasis {
    IBasis { alpha: vec![alpha], lambda: KSClass(vec![a]) }
}

fn monomial_inverse(c: &ScalarHalf) -> Result<ScalarHalf, IHallError> {
    if c.num_terms() != 1 {
        return Err(IHallError::Reduction(format!("expected a monomial, got {}", c)));
    }
    ScalarHalf::one().div_exact(c).map_err(|e| IHallError::Reduction(e.to_string()))
}

impl SplitRankOne {
    pub fn new() -> Self {
        let shape = QuiverShape::linear_a(1);
        let alg = IQuiverAlgebra::build(&shape, &DiagramInvolution::identity(1)).expect("split A1 is an iquiver");
        Self {
            alg,
            cat: RepCategory::new(shape),
            primes: SAMPLE_PRIMES.to_vec(),
            cap: DEFAULT_CAP,
            products: Default::default(),
            reduced: Default::default(),
            mono: Default::default(),
        }
    }

    pub fn module(&self, c: A1Class, p: u64) -> LambdaModule {
        let s = self.alg.simple(0, p).power(&self.alg, c.0 as usize);
        s.direct_sum(&self.alg.generalized_simple(0, p).power(&self.alg, c.1 as usize))
    }

    /// Type of a module: a square-zero `eps` of rank `r` on `F_p^d` gives
    /// `S^{d-2r} + K^r`.
    pub fn classify(&self, m: &LambdaModule) -> A1Class {
        let r = m.maps[self.alg.eps(0)].rank(m.p);
        ((m.dims[0] - 2 * r) as u32, r as u32)
    }

    pub fn census(&self, x: A1Class, y: A1Class, p: u64) -> Result<ExtCensus<A1Class>, IHallError> {
        let (m, n) = (self.module(x, p), self.module(y, p));
        ext_census(&self.alg, &m, &n, self.cap, &|l| Ok(self.classify(l)))
    }

    fn twist(&self, x: A1Class, y: A1Class) -> i64 {
        let d = |c: A1Class| (c.0 + 2 * c.1) as i64;
        self.alg.shape.euler_form(&[d(x)], &[d(y)])
    }

    /// `[M] * [N]` at the prime `p`, in `Q(sqrt p)`.
    pub fn class_product_at(&self, x: A1Class, y: A1Class, p: u64) -> Result<BTreeMap<A1Class, QSqrt>, IHallError> {
        let c = self.census(x, y, p)?;
        let scale = QSqrt::v_pow(self.twist(x, y) - 2 * c.hom_dim as i64, p);
        Ok(c.counts.into_iter().map(|(k, n)| (k, scale.mul(&QSqrt::int(n as i64, p)))).collect())
    }

    /// Generic `[M] * [N]`: counts interpolated in `q`, then twisted by
    /// `v^{<M, N>} / q^{dim Hom(M, N)}`.
    pub fn class_product(&self, x: A1Class, y: A1Class) -> Result<std::sync::Arc<LinComb<A1Class>>, IHallError> {
        memo(&self.products, &(x, y), || {
            let first = self.census(x, y, 2)?;
            let (hom, ext) = (first.hom_dim, first.ext_dim);
            let shift = 2 * self.twist(x, y) as i32 - 4 * hom as i32;
            let fit = interpolate_stable(ext, &self.primes, |p| {
                let c = self.census(x, y, p)?;
                if (c.hom_dim, c.ext_dim) != (hom, ext) {
                    return Err(IHallError::Coverage(format!("Hom/Ext dimensions jump at p = {}", p)));
                }
                Ok(c.counts.into_iter().map(|(k, n)| (k, rat(n as i64))).collect::<BTreeMap<_, Rational>>())
            })?;
            let mut out = LinComb::zero();
            for (k, poly) in fit.polys {
                if poly.degree().unwrap_or(0) > ext {
                    return Err(IHallError::Reduction(format!("count for {:?} exceeds degree {}", k, ext)));
                }
                let g = poly.to_scalar().shift(shift);
                if !g.is_integral() {
                    return Err(IHallError::Reduction(format!("non-integral constant for {:?}", k)));
                }
                out.add_term(k, g);
            }
            Ok(out)
        })
    }

    /// `[S^a + K^b]` in the Hall basis: `[K^b] * [S^a] = c [S^a + K^b]`.
    pub fn reduce(&self, c: A1Class) -> Result<std::sync::Arc<IHallElt>, IHallError> {
        memo(&self.reduced, &c, || {
            if c.1 == 0 {
                return Ok(IHallElt::basis(basis(0, c.0)));
            }
            let prod = self.class_product((0, c.1), (c.0, 0))?;
            if prod.len() != 1 || prod.coeff(&c).is_zero() {
                return Err(IHallError::Reduction(format!("[K^{}] * [S^{}] is not a multiple of one class", c.1, c.0)));
            }
            Ok(IHallElt::term(basis(c.1 as i64, c.0), monomial_inverse(&prod.coeff(&c))?))
        })
    }

    /// Factor `t` with `u_a * K = t K * u_a`.
    pub fn swap_factor(&self, a: u32) -> Result<ScalarHalf, IHallError> {
        let prod = self.class_product((a, 0), (0, 1))?;
        let mut out = IHallElt::zero();
        for (k, c) in prod.iter() {
            out.add_scaled(&*self.reduce(*k)?, c);
        }
        if out.len() != 1 {
            return Err(IHallError::Reduction("u * K is not a single basis element".into()));
        }
        Ok(out.coeff(&basis(1, a)))
    }

    fn shift_alpha(x: &IHallElt, alpha: i64) -> IHallElt {
        x.map_keys(|b| basis(b.alpha[0] + alpha, b.lambda.0[0]))
    }

    /// `x * u_S`.
    pub fn mul_right_s(&self, x: &IHallElt) -> Result<IHallElt, IHallError> {
        let mut out = IHallElt::zero();
        for (b, c) in x.iter() {
            let prod = self.class_product((b.lambda.0[0], 0), (1, 0))?;
            for (k, d) in prod.iter() {
                out.add_scaled(&Self::shift_alpha(&*self.reduce(*k)?, b.alpha[0]), &(c * d));
            }
        }
        Ok(out)
    }

    /// `x * K^e`.
    pub fn mul_right_k(&self, x: &IHallElt, e: i64) -> Result<IHallElt, IHallError> {
        let mut out = IHallElt::zero();
        for (b, c) in x.iter() {
            let t = self.swap_factor(b.lambda.0[0])?;
            let te = if e >= 0 { t.pow(e as u32) } else { monomial_inverse(&t)?.pow((-e) as u32) };
            out.add_term(basis(b.alpha[0] + e, b.lambda.0[0]), c * &te);
        }
        Ok(out)
    }

    pub fn mul_word(&self, x: &IHallElt, w: &[HallLetter]) -> Result<IHallElt, IHallError> {
        let mut acc = x.clone();
        for l in w {
            acc = match l {
                HallLetter::S => self.mul_right_s(&acc)?,
                HallLetter::K(e) => self.mul_right_k(&acc, *e)?,
            };
        }
        Ok(acc)
    }

    pub fn one(&self) -> IHallElt {
        IHallElt::basis(basis(0, 0))
    }

    pub fn u(&self, a: u32) -> IHallElt {
        IHallElt::basis(basis(0, a))
    }

    pub fn k(&self, e: i64) -> IHallElt {
        IHallElt::basis(basis(e, 0))
    }

    /// `u_a` as a polynomial in `u_S` and `K`, from
    /// `u_{a-1} * u_S = x u_a + (lower classes)`.
    pub fn monomial_expression(&self, a: u32) -> Result<std::sync::Arc<LinComb<Vec<HallLetter>>>, IHallError> {
        memo(&self.mono, &a, || {
            if a == 0 {
                return Ok(LinComb::basis(vec![]));
            }
            let prod = self.class_product((a - 1, 0), (1, 0))?;
            let inv = monomial_inverse(&prod.coeff(&(a, 0)))?;
            let mut out = LinComb::zero();
            for (w, c) in self.monomial_expression(a - 1)?.iter() {
                let mut w2 = w.clone();
                w2.push(HallLetter::S);
                out.add_term(w2, c * &inv);
            }
            for (k, c) in prod.iter() {
                if *k == (a, 0) {
                    continue;
                }
                for (b, d) in self.reduce(*k)?.iter() {
                    let scale = -(&(c * d) * &inv);
                    for (w, e) in self.monomial_expression(b.lambda.0[0])?.iter() {
                        let mut w2 = vec![HallLetter::K(b.alpha[0])];
                        w2.extend(w.iter().copied());
                        out.add_term(w2, &scale * e);
                    }
                }
            }
            Ok(out)
        })
    }

    pub fn mul(&self, x: &IHallElt, y: &IHallElt) -> Result<IHallElt, IHallError> {
        let mut out = IHallElt::zero();
        for (b, c) in y.iter() {
            let xk = self.mul_right_k(x, b.alpha[0])?;
            for (w, d) in self.monomial_expression(b.lambda.0[0])?.iter() {
                out.add_scaled(&self.mul_word(&xk, w)?, &(c * d));
            }
        }
        Ok(out)
    }

    /// Anti-automorphism: coefficients conjugated, `u_S -> v^{-1} u_S`,
    /// `K -> K`.
    pub fn bar(&self, x: &IHallElt) -> Result<IHallElt, IHallError> {
        let mut out = IHallElt::zero();
        for (b, c) in x.iter() {
            let mut bu = IHallElt::zero();
            for (w, d) in self.monomial_expression(b.lambda.0[0])?.iter() {
                let s = w.iter().filter(|l| **l == HallLetter::S).count() as i32;
                let rev: Vec<HallLetter> = w.iter().rev().copied().collect();
                bu.add_scaled(&self.mul_word(&self.one(), &rev)?, &d.bar().shift(-2 * s));
            }
            out.add_scaled(&self.mul_right_k(&bu, b.alpha[0])?, &c.bar());
        }
        Ok(out)
    }

    /// `K_alpha <> (K_beta * u_lambda) = v^{(alpha - rho alpha, dim lambda)/2} K_{alpha+beta} * u_lambda`.
    pub fn diamond(&self, alpha: i64, x: &IHallElt) -> IHallElt {
        let rho = &self.alg.rho;
        let mut out = IHallElt::zero();
        for (b, c) in x.iter() {
            let a = vec![alpha];
            let ra = rho.act(&a);
            let diff: Vec<i64> = a.iter().zip(&ra).map(|(x, y)| x - y).collect();
            let e = self.alg.shape.sym_form(&diff, &self.cat.dim_vector(&b.lambda));
            out.add_term(basis(b.alpha[0] + alpha, b.lambda.0[0]), c * &ScalarHalf::u_pow(e as i32));
        }
        out
    }

    /// `v^{-dim End(M) + <M, M>/2}`, the rescaling of `u_lambda`.
    pub fn normalization(&self, a: u32) -> ScalarHalf {
        let l = KSClass(vec![a]);
        ScalarHalf::u_pow((-2 * self.cat.end_dim(&l) + self.cat.euler(&l, &l)) as i32)
    }

    /// The rescaled element `U_a`.
    pub fn big_u(&self, a: u32) -> IHallElt {
        self.u(a).scale(&self.normalization(a))
    }

    /// Image of `B^a K^b` in the iquantum group: `B -> v^{-1/2} u_S`,
    /// `K = v k~ -> [K]`.
    pub fn transport(&self, poly: &BTreeMap<(i64, i64), i64>) -> Result<IHallElt, IHallError> {
        let mut out = IHallElt::zero();
        for (&(a, b), &c) in poly {
            let mut w = vec![HallLetter::S; a as usize];
            w.push(HallLetter::K(b));
            let x = self.mul_word(&self.one(), &w)?;
            out.add_scaled(&x, &ScalarHalf::u_pow(-a as i32).scale(&rat(c)));
        }
        Ok(out)
    }

    /// Dual canonical basis on the window `2k + a = m`.
    pub fn dual_window(&self, m: u32) -> Result<DualWindow, IHallError> {
        let index: Vec<(i64, u32)> = (0..=m / 2).map(|k| (k as i64, m - 2 * k)).collect();
        let elts: Vec<IHallElt> = index.iter().map(|&(k, a)| self.diamond(k, &self.big_u(a))).collect();
        let scale: Vec<ScalarHalf> = index.iter().zip(&elts).map(|(&(k, a), e)| e.coeff(&basis(k, a))).collect();
        let coords = |x: &IHallElt| -> Result<Vec<ScalarHalf>, IHallError> {
            let mut row = vec![ScalarHalf::zero(); index.len()];
            for (b, c) in x.iter() {
                let pos = index
                    .iter()
                    .position(|&(k, a)| b.alpha[0] == k && b.lambda.0[0] == a)
                    .ok_or_else(|| IHallError::Triangle(format!("bar leaves the window at {:?}", b)))?;
                row[pos] = c.div_exact(&scale[pos]).map_err(|e| IHallError::Triangle(e.to_string()))?;
            }
            Ok(row)
        };
        let bar: Matrix = elts.iter().map(|e| self.bar(e).and_then(|b| coords(&b))).collect::<Result<_, _>>()?;
        let less: Vec<Vec<bool>> = index.iter().map(|x| index.iter().map(|y| x.0 < y.0).collect()).collect();
        let problem = TriangularProblem::new(less, bar.clone(), CorrectionRing::Negative, Direction::Upper);
        let coeffs = lusztig_basis(&problem).map_err(|e| IHallError::Triangle(e.to_string()))?;
        Ok(DualWindow { index, elements: elts, bar, coeffs })
    }
}

/// `L_x = sum_y coeffs[x][y] (K_{k_y} <> U_{a_y})` on one window.
#[derive(Debug, Clone)]
pub struct DualWindow {
    /// `(k, a)` for `K^k <> U_a`.
    pub index: Vec<(i64, u32)>,
    pub elements: Vec<IHallElt>,
    pub bar: Matrix,
    pub coeffs: Matrix,
}

impl DualWindow {
    pub fn element(&self, x: usize) -> IHallElt {
        let mut out = IHallElt::zero();
        for (c, e) in self.coeffs[x].iter().zip(&self.elements) {
            out.add_scaled(e, c);
        }
        out
    }

    pub fn position(&self, k: i64, a: u32) -> Option<usize> {
        self.index.iter().position(|&x| x == (k, a))
    }
}
