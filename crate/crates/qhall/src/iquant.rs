//! The universal iquantum group inside the double: generators
//! `B_i = F_i + E_{rho i} K'_i` and `k~_i = K_i K'_{rho i}`, its defining
//! relations, the bar involution and the relative braid operators.
//!
//! Elements are noncommutative polynomials in `B_i` and `K_i^{+-1}`
//! (with `K_i = v k~_i` at fixed points of `rho`) over a common
//! denominator, evaluated in the double on demand.

use crate::cartan::DiagramInvolution;
use crate::double::{div_exact, DoubleAlgebra, DoubleError, PbwElt};
use crate::lincomb::LinComb;
use crate::scalars::ScalarHalf;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IquantError {
    #[error(transparent)]
    Double(#[from] DoubleError),
    #[error("involution does not match the double: {0}")]
    Involution(String),
    #[error("vertex {0} is not an orbit representative")]
    NotRepresentative(usize),
    #[error("relation {name} fails: residual {residual}")]
    Relation { name: String, residual: String },
}

/// A generator letter: `B_i` or `K_i^e` (the rescaled Cartan generator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ILetter {
    B(usize),
    K(usize, i64),
}

pub type Word = Vec<ILetter>;

/// `num / den` with `num` a combination of generator words.
#[derive(Debug, Clone, PartialEq)]
pub struct IExpr {
    pub num: LinComb<Word>,
    pub den: ScalarHalf,
}

impl IExpr {
    pub fn zero() -> Self {
        Self { num: LinComb::zero(), den: ScalarHalf::one() }
    }

    pub fn one() -> Self {
        Self::word(vec![])
    }

    pub fn word(w: Word) -> Self {
        Self { num: LinComb::basis(w), den: ScalarHalf::one() }
    }

    pub fn letter(l: ILetter) -> Self {
        Self::word(vec![l])
    }

    pub fn b(i: usize) -> Self {
        Self::letter(ILetter::B(i))
    }

    pub fn k(i: usize, e: i64) -> Self {
        Self::letter(ILetter::K(i, e))
    }

    pub fn scale(&self, c: &ScalarHalf) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn div(&self, d: &ScalarHalf) -> Self {
        Self { num: self.num.clone(), den: &self.den * d }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.scale(&other.den).add(&other.num.scale(&self.den));
        Self { num, den: &self.den * &other.den }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-ScalarHalf::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut num = LinComb::zero();
        for (a, x) in self.num.iter() {
            for (b, y) in other.num.iter() {
                let mut w = a.clone();
                w.extend(b.iter().copied());
                num.add_term(w, x * y);
            }
        }
        Self { num, den: &self.den * &other.den }
    }

    pub fn mul_all(xs: &[&IExpr]) -> Self {
        xs.iter().fold(Self::one(), |acc, x| acc.mul(x))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `[x, y]_v = xy - v yx`.
    pub fn vbracket(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self).scale(&ScalarHalf::v_pow(1)))
    }

    /// Bar: reverse words, conjugate scalars, fix every letter.
    pub fn bar(&self) -> Self {
        let mut num = LinComb::zero();
        for (w, c) in self.num.iter() {
            let mut r = w.clone();
            r.reverse();
            num.add_term(r, c.bar());
        }
        Self { num, den: self.den.bar() }
    }
}

impl fmt::Display for IExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .num
            .iter()
            .map(|(w, c)| {
                let letters: Vec<String> = w
                    .iter()
                    .map(|l| match l {
                        ILetter::B(i) => format!("B{}", i + 1),
                        ILetter::K(i, 1) => format!("K{}", i + 1),
                        ILetter::K(i, e) => format!("K{}^{}", i + 1, e),
                    })
                    .collect();
                format!("({}){}", c.to_pretty(), if letters.is_empty() { "1".into() } else { letters.join(" ") })
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.den.is_one() {
            write!(f, "{}", body)
        } else {
            write!(f, "[{}] / ({})", body, self.den.to_pretty())
        }
    }
}

/// The iquantum group of `(Q, rho)` embedded in the double of `Q`.
pub struct IQuantumGroup<'a> {
    pub alg: &'a DoubleAlgebra,
    pub rho: DiagramInvolution,
}

impl<'a> IQuantumGroup<'a> {
    pub fn new(alg: &'a DoubleAlgebra, rho: DiagramInvolution) -> Result<Self, IquantError> {
        let n = alg.rank();
        if rho.perm().len() != n {
            return Err(IquantError::Involution("rank mismatch".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if alg.cartan(i, j) != alg.cartan(rho.apply(i), rho.apply(j)) {
                    return Err(IquantError::Involution(format!("c_{},{}", i + 1, j + 1)));
                }
            }
            if rho.apply(i) != i && alg.cartan(i, rho.apply(i)) != 0 {
                return Err(IquantError::Involution(format!("vertex {} meets its image", i + 1)));
            }
        }
        Ok(Self { alg, rho })
    }

    pub fn rank(&self) -> usize {
        self.alg.rank()
    }

    fn c(&self, i: usize, j: usize) -> i64 {
        self.alg.cartan(i, j)
    }

    fn split(&self, i: usize) -> bool {
        self.rho.apply(i) == i
    }

    /// `B_i` in the double.
    pub fn embed_b(&self, i: usize) -> Result<PbwElt, DoubleError> {
        let a = self.alg;
        let ek = a.mul(&a.e_gen(self.rho.apply(i)), &a.kp_gen(i, 1))?;
        Ok(a.f_gen(i).add(&ek))
    }

    /// `k~_i^e = (K_i K'_{rho i})^e`.
    pub fn embed_ktilde(&self, i: usize, e: i64) -> PbwElt {
        let n = self.rank();
        let mut k = vec![0; n];
        let mut kp = vec![0; n];
        k[i] += e;
        kp[self.rho.apply(i)] += e;
        self.alg.k_mono(&k, &kp)
    }

    /// `K_i^e`, with `K_i = v k~_i` if `rho i = i` and `k~_i` otherwise.
    pub fn embed_k(&self, i: usize, e: i64) -> PbwElt {
        let s = if self.split(i) { e as i32 } else { 0 };
        self.embed_ktilde(i, e).scale(&ScalarHalf::v_pow(s))
    }

    pub fn embed(&self, l: ILetter) -> Result<PbwElt, DoubleError> {
        match l {
            ILetter::B(i) => self.embed_b(i),
            ILetter::K(i, e) => Ok(self.embed_k(i, e)),
        }
    }

    /// `k~_i` as an expression.
    pub fn ktilde(&self, i: usize) -> IExpr {
        let s = if self.split(i) { -1 } else { 0 };
        IExpr::k(i, 1).scale(&ScalarHalf::v_pow(s))
    }

    /// Evaluate with generator images given by `image`.
    pub fn eval_with(&self, x: &IExpr, image: &dyn Fn(ILetter) -> Result<PbwElt, DoubleError>) -> Result<PbwElt, DoubleError> {
        let mut out = PbwElt::zero();
        for (w, c) in x.num.iter() {
            let mut acc = self.alg.one();
            for &l in w {
                acc = self.alg.mul(&acc, &image(l)?)?;
            }
            out.add_scaled(&acc, c);
        }
        div_exact(&out, &x.den)
    }

    pub fn eval(&self, x: &IExpr) -> Result<PbwElt, DoubleError> {
        self.eval_with(x, &|l| self.embed(l))
    }

    /// Defining relations; each expression must vanish.
    pub fn relations(&self) -> Vec<(String, IExpr)> {
        let n = self.rank();
        let v = ScalarHalf::v_pow;
        let mut out = Vec::new();
        for l in 0..n {
            let kl = self.ktilde(l);
            out.push((format!("K{0} K{0}^-1", l + 1), IExpr::k(l, 1).mul(&IExpr::k(l, -1)).sub(&IExpr::one())));
            for i in 0..n {
                let ki = self.ktilde(i);
                out.push((format!("k{} k{}", i + 1, l + 1), ki.mul(&kl).sub(&kl.mul(&ki))));
                let e = self.c(self.rho.apply(l), i) - self.c(l, i);
                let bi = IExpr::b(i);
                out.push((format!("k{} B{}", l + 1, i + 1), kl.mul(&bi).sub(&bi.mul(&kl).scale(&v(e as i32)))));
            }
        }
        let diff = &v(-1) - &v(1);
        for i in 0..n {
            let ri = self.rho.apply(i);
            let bi = IExpr::b(i);
            if ri != i {
                let lhs = IExpr::b(ri).mul(&bi).sub(&bi.mul(&IExpr::b(ri)));
                let rhs = self.ktilde(i).sub(&self.ktilde(ri)).scale(&diff);
                out.push((format!("B{} B{} rho-pair", ri + 1, i + 1), lhs.sub(&rhs)));
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                let bj = IExpr::b(j);
                let c = self.c(i, j);
                if c == 0 && ri != j {
                    out.push((format!("B{} B{} commute", i + 1, j + 1), bi.mul(&bj).sub(&bj.mul(&bi))));
                }
                if c == -1 && j != ri && ri != i {
                    out.push((format!("Serre B{} B{}", i + 1, j + 1), self.serre(&bi, &bj, c)));
                }
                if c == -1 && ri == i {
                    let lhs = self.serre(&bi, &bj, c);
                    let rhs = self.ktilde(i).mul(&bj).scale(&(&-v(1) * &(&v(1) - &v(-1)).pow(2)));
                    out.push((format!("split Serre B{} B{}", i + 1, j + 1), lhs.sub(&rhs)));
                }
            }
        }
        out
    }

    fn serre(&self, x: &IExpr, y: &IExpr, c: i64) -> IExpr {
        let m = (1 - c) as u32;
        let mut out = IExpr::zero();
        for s in 0..=m {
            let sign = if s % 2 == 0 { ScalarHalf::one() } else { -ScalarHalf::one() };
            let coeff = &sign * &ScalarHalf::qbinom(m as i64, s as i64);
            out = out.add(&IExpr::mul_all(&[&x.pow(s), y, &x.pow(m - s)]).scale(&coeff));
        }
        out
    }

    /// Relations whose evaluation in the double is nonzero.
    pub fn failing_relations(&self) -> Result<Vec<(String, PbwElt)>, IquantError> {
        let mut bad = Vec::new();
        for (name, r) in self.relations() {
            let x = self.eval(&r)?;
            if !x.is_zero() {
                bad.push((name, x));
            }
        }
        Ok(bad)
    }

    /// The reflection `bold s_i` on the root lattice.
    pub fn bold_reflection(&self, i: usize, x: &[i64]) -> Vec<i64> {
        let datum = &self.alg.hall.cat.datum;
        datum.apply_word(&datum.restricted_generator(&self.rho, i), x)
    }

    fn k_vector(&self, mu: &[i64]) -> IExpr {
        let mut out = IExpr::one();
        for (k, &e) in mu.iter().enumerate() {
            if e != 0 {
                out = out.mul(&IExpr::k(k, e));
            }
        }
        out
    }

    /// Image of a generator under the relative braid operator `T_i`.
    pub fn braid_generator(&self, i: usize, l: ILetter) -> Result<IExpr, IquantError> {
        let ri = self.rho.apply(i);
        if self.c(i, ri) != 0 && ri != i {
            return Err(IquantError::NotRepresentative(i));
        }
        let n = self.rank();
        let v = ScalarHalf::v_pow;
        let vd = &v(1) - &v(-1);
        let half = |a: &IExpr, b: &IExpr| {
            a.mul(b).scale(&ScalarHalf::u_pow(1)).sub(&b.mul(a).scale(&ScalarHalf::u_pow(-1))).div(&vd)
        };
        Ok(match l {
            ILetter::K(j, e) => {
                let mut mu = vec![0; n];
                mu[j] = e;
                self.k_vector(&self.bold_reflection(i, &mu))
            }
            ILetter::B(j) if ri == i => {
                let bi = IExpr::b(i);
                if j == i {
                    IExpr::k(i, -1).mul(&bi)
                } else if self.c(i, j) == 0 {
                    IExpr::b(j)
                } else {
                    half(&bi, &IExpr::b(j))
                }
            }
            ILetter::B(j) => {
                let (bi, bri, bj) = (IExpr::b(i), IExpr::b(ri), IExpr::b(j));
                let (cij, crj) = (self.c(i, j), self.c(ri, j));
                if j == i {
                    IExpr::k(i, -1).mul(&bri).scale(&v(1))
                } else if j == ri {
                    IExpr::k(ri, -1).mul(&bi).scale(&v(1))
                } else if cij == -1 && crj == 0 {
                    half(&bi, &bj)
                } else if cij == 0 && crj == -1 {
                    half(&bri, &bj)
                } else if cij == -1 && crj == -1 {
                    let inner = bj.vbracket(&bi).vbracket(&bri).scale(&v(-1)).div(&vd.pow(2));
                    inner.add(&bj.mul(&IExpr::k(i, 1)))
                } else {
                    bj
                }
            }
        })
    }

    /// Substitute braid images into an expression (as expressions).
    pub fn braid(&self, i: usize, x: &IExpr) -> Result<IExpr, IquantError> {
        let mut out = IExpr::zero();
        out.den = x.den.clone();
        let mut num = IExpr { num: LinComb::zero(), den: ScalarHalf::one() };
        for (w, c) in x.num.iter() {
            let mut acc = IExpr::one();
            for &l in w {
                acc = acc.mul(&self.braid_generator(i, l)?);
            }
            num = num.add(&acc.scale(c));
        }
        out.num = num.num;
        out.den = &out.den * &num.den;
        Ok(out)
    }

    /// Generator letters: every `B_i` and `K_i^{+-1}`.
    pub fn generators(&self) -> Vec<ILetter> {
        let mut out = Vec::new();
        for i in 0..self.rank() {
            out.push(ILetter::B(i));
            out.push(ILetter::K(i, 1));
            out.push(ILetter::K(i, -1));
        }
        out
    }

    /// PBW images of all generators under `T_{w_1} ... T_{w_k}`.
    pub fn braid_word_images(&self, word: &[usize]) -> Result<Vec<(ILetter, PbwElt)>, IquantError> {
        let gens = self.generators();
        let mut images: Vec<(ILetter, PbwElt)> = gens.iter().map(|&g| Ok((g, self.embed(g)?))).collect::<Result<_, DoubleError>>()?;
        // T_{w_1} ... T_{w_k}(g) = T_{w_k}(g) evaluated at the images of T_{w_1} ... T_{w_{k-1}}
        for &i in word {
            let prev = images.clone();
            let lookup = |l: ILetter| -> Result<PbwElt, DoubleError> {
                Ok(prev.iter().find(|(g, _)| *g == l).expect("generator image").1.clone())
            };
            images = gens
                .iter()
                .map(|&g| {
                    let e = self.braid_generator(i, g)?;
                    Ok((g, self.eval_with(&e, &lookup)?))
                })
                .collect::<Result<_, IquantError>>()?;
        }
        Ok(images)
    }

    /// Check that `T_i` maps every defining relation to zero.
    pub fn braid_preserves_relations(&self, i: usize) -> Result<Vec<String>, IquantError> {
        let images = self.braid_word_images(&[i])?;
        let lookup = |l: ILetter| -> Result<PbwElt, DoubleError> { Ok(images.iter().find(|(g, _)| *g == l).unwrap().1.clone()) };
        let mut bad = Vec::new();
        for (name, r) in self.relations() {
            if !self.eval_with(&r, &lookup)?.is_zero() {
                bad.push(name);
            }
        }
        Ok(bad)
    }

    /// Braid relation between orbit representatives `i`, `j`.
    pub fn braid_relation_holds(&self, i: usize, j: usize) -> Result<bool, IquantError> {
        let m = self.alg.hall.cat.datum.braid_order(&self.rho, i, j);
        let left: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { i } else { j }).collect();
        let right: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { j } else { i }).collect();
        Ok(self.braid_word_images(&left)? == self.braid_word_images(&right)?)
    }

    /// `T_i(bar x) = bar(T_i x)` evaluated in the double.
    pub fn bar_commutes(&self, i: usize, x: &IExpr) -> Result<bool, IquantError> {
        let a = self.eval(&self.braid(i, &x.bar())?)?;
        let b = self.eval(&self.braid(i, x)?.bar())?;
        Ok(a == b)
    }

    pub fn orbit_reps(&self) -> Vec<usize> {
        self.rho.orbit_reps()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::QuiverShape;

    #[test]
    fn split_a1() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
        let g = IQuantumGroup::new(&d, DiagramInvolution::identity(1)).unwrap();
        assert!(g.failing_relations().unwrap().is_empty());
        let b = g.embed_b(0).unwrap();
        assert_eq!(b.len(), 2);
        // T(B) = K^{-1} B and T(K) = K^{-1}
        let img = g.braid_word_images(&[0]).unwrap();
        let kb = d.mul(&g.embed_k(0, -1), &b).unwrap();
        assert_eq!(img[0].1, kb);
        assert_eq!(img[1].1, g.embed_k(0, -1));
        assert!(g.bar_commutes(0, &IExpr::b(0).pow(2)).unwrap());
    }

    #[test]
    fn diagonal_a1_pair() {
        let two = QuiverShape::new(2, vec![]).unwrap();
        let d = DoubleAlgebra::new(two.clone());
        let rho = DiagramInvolution::new(vec![1, 0], &two.cartan_matrix()).unwrap();
        let g = IQuantumGroup::new(&d, rho).unwrap();
        let bad = g.failing_relations().unwrap();
        assert!(bad.is_empty(), "{:?}", bad.iter().map(|b| &b.0).collect::<Vec<_>>());
        assert!(g.braid_preserves_relations(0).unwrap().is_empty());
    }
}
