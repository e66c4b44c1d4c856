//! The Drinfeld double in PBW normal form `F(l-) E(l+) K_mu K'_nu`.
//!
//! `E(l)` and `F(l)` are the elements corresponding to the Hall basis
//! element `u_l` under `E_i -> v^{-1/2} u_i` and `F_i -> v^{-1/2} u_i`, so
//! products inside each half are Hall products. Cross terms come from
//! `E_i F(x) = F(x) E_i + (v^{-1} - v)(F(r_i x) K_i - F(r'_i x) K'_i)`.

pub mod basis;

use crate::cartan::QuiverShape;
use crate::finrep::KSClass;
use crate::hallgen::{memo, HallAlgebra, HallElt, HallError, Memo, WordMap};
use crate::lincomb::{LinComb, RatComb};
use crate::ratfunc::RatFunc;
use crate::scalars::ScalarHalf;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// `F(f) E(e) K_k K'_kp`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mono {
    pub f: KSClass,
    pub e: KSClass,
    pub k: Vec<i64>,
    pub kp: Vec<i64>,
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{:?}E{:?}K{:?}K'{:?}", self.f.0, self.e.0, self.k, self.kp)
    }
}

pub type PbwElt = LinComb<Mono>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DoubleError {
    #[error(transparent)]
    Hall(#[from] HallError),
    #[error("coefficient not divisible: {0}")]
    Division(String),
    #[error("bad word: {0}")]
    Parse(String),
    #[error("element is not Gamma-homogeneous")]
    Inhomogeneous,
}

/// One letter of a word in the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    E(usize),
    F(usize),
    K(usize, i64),
    Kp(usize, i64),
}

/// Parse `E1 F2 K1 K'1^-1` (1-based vertices).
pub fn parse_word(s: &str, rank: usize) -> Result<Vec<Letter>, DoubleError> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let (head, exp) = match tok.split_once('^') {
            Some((h, e)) => (h, e.parse::<i64>().map_err(|_| DoubleError::Parse(format!("bad exponent in '{}'", tok)))?),
            None => (tok, 1),
        };
        let (kind, idx) = if let Some(r) = head.strip_prefix("K'") {
            ("Kp", r)
        } else {
            head.split_at(1.min(head.len()))
        };
        let i: usize = idx.parse().map_err(|_| DoubleError::Parse(format!("bad index in '{}'", tok)))?;
        if i == 0 || i > rank {
            return Err(DoubleError::Parse(format!("vertex {} out of range in '{}'", i, tok)));
        }
        let i = i - 1;
        match kind {
            "E" | "F" => {
                if exp < 0 {
                    return Err(DoubleError::Parse(format!("negative power of {} in '{}'", kind, tok)));
                }
                for _ in 0..exp {
                    out.push(if kind == "E" { Letter::E(i) } else { Letter::F(i) });
                }
            }
            "K" => out.push(Letter::K(i, exp)),
            "Kp" => out.push(Letter::Kp(i, exp)),
            _ => return Err(DoubleError::Parse(format!("unknown generator '{}'", tok))),
        }
    }
    Ok(out)
}

fn vadd(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn unit(n: usize, i: usize, e: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = e;
    v
}

/// Exact division of every coefficient.
pub fn div_exact(x: &PbwElt, d: &ScalarHalf) -> Result<PbwElt, DoubleError> {
    let mut out = PbwElt::zero();
    for (m, c) in x.iter() {
        let q = c.div_exact(d).map_err(|_| DoubleError::Division(format!("{} / {}", c, d)))?;
        out.add_term(m.clone(), q);
    }
    Ok(out)
}

/// `v - v^{-1}`.
pub fn vdiff() -> ScalarHalf {
    &ScalarHalf::v_pow(1) - &ScalarHalf::v_pow(-1)
}

pub struct DoubleAlgebra {
    pub hall: Arc<HallAlgebra>,
    ef: Memo<(KSClass, KSClass), PbwElt>,
    deriv: Memo<(usize, bool, KSClass), HallElt>,
}

impl fmt::Debug for DoubleAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleAlgebra({:?})", self.hall)
    }
}

impl DoubleAlgebra {
    pub fn new(shape: QuiverShape) -> Self {
        Self::from_hall(Arc::new(HallAlgebra::new(shape)))
    }

    pub fn from_hall(hall: Arc<HallAlgebra>) -> Self {
        Self { hall, ef: Default::default(), deriv: Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.hall.rank()
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.hall.cat.datum.cartan[i][j]
    }

    fn sym(&self, a: &[i64], b: &[i64]) -> i64 {
        self.hall.cat.datum.sym_form(a, b)
    }

    fn zero_vec(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn mono(&self, f: KSClass, e: KSClass, k: Vec<i64>, kp: Vec<i64>) -> Mono {
        Mono { f, e, k, kp }
    }

    pub fn one(&self) -> PbwElt {
        let z = self.hall.zero_class();
        PbwElt::basis(self.mono(z.clone(), z, self.zero_vec(), self.zero_vec()))
    }

    /// `E(l)`, the image of `u_l`.
    pub fn e_class(&self, l: &KSClass) -> PbwElt {
        PbwElt::basis(self.mono(self.hall.zero_class(), l.clone(), self.zero_vec(), self.zero_vec()))
    }

    /// `F(l)`, the image of `u_l`.
    pub fn f_class(&self, l: &KSClass) -> PbwElt {
        PbwElt::basis(self.mono(l.clone(), self.hall.zero_class(), self.zero_vec(), self.zero_vec()))
    }

    pub fn k_mono(&self, k: &[i64], kp: &[i64]) -> PbwElt {
        let z = self.hall.zero_class();
        PbwElt::basis(self.mono(z.clone(), z, k.to_vec(), kp.to_vec()))
    }

    pub fn e_gen(&self, i: usize) -> PbwElt {
        self.e_class(&self.hall.simple(i)).scale(&ScalarHalf::u_pow(-1))
    }

    pub fn f_gen(&self, i: usize) -> PbwElt {
        self.f_class(&self.hall.simple(i)).scale(&ScalarHalf::u_pow(-1))
    }

    pub fn k_gen(&self, i: usize, e: i64) -> PbwElt {
        self.k_mono(&unit(self.rank(), i, e), &self.zero_vec())
    }

    pub fn kp_gen(&self, i: usize, e: i64) -> PbwElt {
        self.k_mono(&self.zero_vec(), &unit(self.rank(), i, e))
    }

    pub fn letter(&self, l: Letter) -> PbwElt {
        match l {
            Letter::E(i) => self.e_gen(i),
            Letter::F(i) => self.f_gen(i),
            Letter::K(i, e) => self.k_gen(i, e),
            Letter::Kp(i, e) => self.kp_gen(i, e),
        }
    }

    /// Normal form of a word in the generators.
    pub fn normal_form(&self, word: &[Letter]) -> Result<PbwElt, DoubleError> {
        let mut x = self.one();
        for &l in word {
            x = self.mul(&x, &self.letter(l))?;
        }
        Ok(x)
    }

    pub fn from_e_part(&self, x: &HallElt) -> PbwElt {
        let mut out = PbwElt::zero();
        for (l, c) in x.iter() {
            out.add_scaled(&self.e_class(l), c);
        }
        out
    }

    pub fn from_f_part(&self, x: &HallElt) -> PbwElt {
        let mut out = PbwElt::zero();
        for (l, c) in x.iter() {
            out.add_scaled(&self.f_class(l), c);
        }
        out
    }

    /// `r_i` (or `r'_i` when `prime`) applied to `u_rho` in the negative half.
    pub fn derivation(&self, i: usize, prime: bool, rho: &KSClass) -> Result<Arc<HallElt>, HallError> {
        memo(&self.deriv, &(i, prime, rho.clone()), || {
            let h = &self.hall;
            if rho.is_zero() {
                return Ok(HallElt::zero());
            }
            let d = h.degree(rho);
            let fd = h.right_factor(&d)?;
            let a = fd.classes.iter().position(|c| c == rho).unwrap();
            let mut acc = RatComb::zero();
            for (s, (nu, j)) in fd.rows.iter().enumerate() {
                let r = &fd.coeff[a][s];
                if r.is_zero() {
                    continue;
                }
                // u_nu u_j = v^{1/2} u_nu F_j
                let c = self.cartan(i, *j);
                let sh = if prime { ScalarHalf::v_pow(c as i32) } else { ScalarHalf::v_pow(-c as i32) };
                let inner = self.derivation(i, prime, nu)?;
                let mut t = h.mul_right_simple(&inner, *j)?.scale(&sh);
                if *j == i {
                    t.add_term(nu.clone(), ScalarHalf::u_pow(1));
                }
                acc.add_lin(&t, r);
            }
            acc.to_laurent().map_err(HallError::NotLaurent)
        })
    }

    /// `E_j * x` for a normal-form element.
    fn e_gen_left(&self, j: usize, x: &PbwElt) -> Result<PbwElt, DoubleError> {
        let h = &self.hall;
        let n = self.rank();
        let aj = unit(n, j, 1);
        let mut out = PbwElt::zero();
        let diff = &ScalarHalf::v_pow(-1) - &ScalarHalf::v_pow(1);
        for (m, c) in x.iter() {
            let de = h.degree(&m.e);
            // F(a) E_j E(b) K K'
            let ee = h.left_simple(j, &m.e)?;
            for (b2, c2) in ee.iter() {
                let coef = &(c * c2) * &ScalarHalf::u_pow(-1);
                out.add_term(self.mono(m.f.clone(), b2.clone(), m.k.clone(), m.kp.clone()), coef);
            }
            if m.f.is_zero() {
                continue;
            }
            let s = self.sym(&aj, &de) as i32;
            let r = self.derivation(j, false, &m.f)?;
            for (a2, c2) in r.iter() {
                let coef = &(&(c * c2) * &diff) * &ScalarHalf::v_pow(s);
                out.add_term(self.mono(a2.clone(), m.e.clone(), vadd(&m.k, &aj), m.kp.clone()), coef);
            }
            let rp = self.derivation(j, true, &m.f)?;
            for (a2, c2) in rp.iter() {
                let coef = -&(&(&(c * c2) * &diff) * &ScalarHalf::v_pow(-s));
                out.add_term(self.mono(a2.clone(), m.e.clone(), m.k.clone(), vadd(&m.kp, &aj)), coef);
            }
        }
        Ok(out)
    }

    /// `E(l) F(rho)` in normal form.
    pub fn e_times_f(&self, l: &KSClass, rho: &KSClass) -> Result<Arc<PbwElt>, DoubleError> {
        if let Some(v) = self.ef.lock().unwrap().get(&(l.clone(), rho.clone())) {
            return Ok(v.clone());
        }
        let h = &self.hall;
        let val = if l.is_zero() {
            self.f_class(rho)
        } else if rho.is_zero() {
            self.e_class(l)
        } else {
            let fd = h.left_factor(&h.degree(l))?;
            let a = fd.classes.iter().position(|c| c == l).unwrap();
            let mut acc: RatComb<Mono> = RatComb::zero();
            for (s, (nu, j)) in fd.rows.iter().enumerate() {
                let r = &fd.coeff[a][s];
                if r.is_zero() {
                    continue;
                }
                // u_j u_nu = v^{1/2} E_j E(nu)
                let inner = self.e_times_f(nu, rho)?;
                let t = self.e_gen_left(*j, &inner)?;
                acc.add_lin(&t, &r.mul_scalar(&ScalarHalf::u_pow(1)));
            }
            acc.to_laurent().map_err(HallError::NotLaurent)?
        };
        let val = Arc::new(val);
        Ok(self.ef.lock().unwrap().entry((l.clone(), rho.clone())).or_insert(val).clone())
    }

    /// Product of two normal monomials.
    pub fn mul_mono(&self, x: &Mono, y: &Mono) -> Result<PbwElt, DoubleError> {
        let h = &self.hall;
        let dyf = h.degree(&y.f);
        let dye = h.degree(&y.e);
        let kk = vadd(&x.k, &y.k);
        let kkp = vadd(&x.kp, &y.kp);
        // K_mu K'_nu F(c) = v^{-(mu,c) + (nu,c)} F(c) K_mu K'_nu
        let s0 = -self.sym(&x.k, &dyf) + self.sym(&x.kp, &dyf);
        let mid = self.e_times_f(&x.e, &y.f)?;
        let mut out = PbwElt::zero();
        for (m, c) in mid.iter() {
            // K_a K'_b E(d) = v^{(a,d) - (b,d)} E(d) K_a K'_b
            let s1 = self.sym(&vadd(&x.k, &m.k), &dye) - self.sym(&vadd(&x.kp, &m.kp), &dye);
            let coef = c * &ScalarHalf::v_pow((s0 + s1) as i32);
            let ff = h.product_basis(&x.f, &m.f)?;
            let ee = h.product_basis(&m.e, &y.e)?;
            let k = vadd(&kk, &m.k);
            let kp = vadd(&kkp, &m.kp);
            for (fa, c1) in ff.iter() {
                let c1 = &coef * c1;
                for (eb, c2) in ee.iter() {
                    out.add_term(self.mono(fa.clone(), eb.clone(), k.clone(), kp.clone()), &c1 * c2);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, x: &PbwElt, y: &PbwElt) -> Result<PbwElt, DoubleError> {
        let mut out = PbwElt::zero();
        for (a, c) in x.iter() {
            for (b, d) in y.iter() {
                out.add_scaled(&self.mul_mono(a, b)?, &(c * d));
            }
        }
        Ok(out)
    }

    pub fn mul_all(&self, xs: &[&PbwElt]) -> Result<PbwElt, DoubleError> {
        let mut acc = self.one();
        for x in xs {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, x: &PbwElt, n: u32) -> Result<PbwElt, DoubleError> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// `xy - yx`.
    pub fn commutator(&self, x: &PbwElt, y: &PbwElt) -> Result<PbwElt, DoubleError> {
        Ok(self.mul(x, y)?.sub(&self.mul(y, x)?))
    }

    fn half_map(&self, l: &KSClass, map: WordMap) -> Result<HallElt, HallError> {
        self.hall.apply_word_map(&self.hall.u(l), map)
    }

    /// Anti-automorphism, coefficient bar, fixing `E_i, F_i, K_i, K'_i`.
    pub fn bar(&self, x: &PbwElt) -> Result<PbwElt, DoubleError> {
        let mut out = PbwElt::zero();
        for (m, c) in x.iter() {
            let k = self.k_mono(&m.k, &m.kp);
            let e = self.from_e_part(&self.half_map(&m.e, WordMap::Bar)?);
            let f = self.from_f_part(&self.half_map(&m.f, WordMap::Bar)?);
            out.add_scaled(&self.mul_all(&[&k, &e, &f])?, &c.bar());
        }
        Ok(out)
    }

    /// Automorphism, coefficient bar, fixing `E_i, F_i`, swapping `K_i, K'_i`.
    pub fn psi(&self, x: &PbwElt) -> Result<PbwElt, DoubleError> {
        let mut out = PbwElt::zero();
        for (m, c) in x.iter() {
            let f = self.from_f_part(&self.half_map(&m.f, WordMap::PsiGen)?);
            let e = self.from_e_part(&self.half_map(&m.e, WordMap::PsiGen)?);
            let k = self.k_mono(&m.kp, &m.k);
            out.add_scaled(&self.mul_all(&[&f, &e, &k])?, &c.bar());
        }
        Ok(out)
    }

    /// Linear anti-automorphism fixing `E_i, F_i`, swapping `K_i, K'_i`.
    pub fn star(&self, x: &PbwElt) -> Result<PbwElt, DoubleError> {
        let mut out = PbwElt::zero();
        for (m, c) in x.iter() {
            let k = self.k_mono(&m.kp, &m.k);
            let e = self.from_e_part(&self.half_map(&m.e, WordMap::Star)?);
            let f = self.from_f_part(&self.half_map(&m.f, WordMap::Star)?);
            out.add_scaled(&self.mul_all(&[&k, &e, &f])?, c);
        }
        Ok(out)
    }

    /// `(gamma_+, gamma_-)` with `deg E_i = (a_i, 0)`, `deg F_i = (0, a_i)`,
    /// `deg K_i = deg K'_i = (a_i, a_i)`.
    pub fn gamma(&self, m: &Mono) -> (Vec<i64>, Vec<i64>) {
        let kk = vadd(&m.k, &m.kp);
        (vadd(&self.hall.degree(&m.e), &kk), vadd(&self.hall.degree(&m.f), &kk))
    }

    /// `check(alpha_i)` evaluated on the Gamma-degree of `m`.
    fn coweight(&self, i: usize, m: &Mono) -> i64 {
        let (gp, gm) = self.gamma(m);
        (0..self.rank()).map(|j| self.cartan(i, j) * (gp[j] - gm[j])).sum()
    }

    /// `K_mu K'_nu <> x`, extended additively over homogeneous parts.
    pub fn diamond(&self, k: &[i64], kp: &[i64], x: &PbwElt) -> Result<PbwElt, DoubleError> {
        let km = self.k_mono(k, kp);
        let mut out = PbwElt::zero();
        for (m, c) in x.iter() {
            let mut e2 = 0;
            for i in 0..self.rank() {
                let w = self.coweight(i, m);
                e2 += -k[i] * w + kp[i] * w;
            }
            let t = self.mul(&km, &PbwElt::basis(m.clone()))?;
            // v^{e2/2} = u^{e2}
            out.add_scaled(&t, &(c * &ScalarHalf::u_pow(e2 as i32)));
        }
        Ok(out)
    }

    /// Projection onto the quotient killing `K'_i` (`plus`) or `K_i`.
    pub fn heisenberg_project(&self, x: &PbwElt, plus: bool) -> PbwElt {
        x.filter(|m| if plus { m.kp.iter().all(|&e| e == 0) } else { m.k.iter().all(|&e| e == 0) })
    }

    /// Image of a generator under `T_i` (or its inverse).
    pub fn braid_generator(&self, i: usize, inverse: bool, l: Letter) -> Result<PbwElt, DoubleError> {
        let datum = &self.hall.cat.datum;
        let n = self.rank();
        let sh = |x: &[i64]| -> Vec<i64> {
            let mut out = vec![0; n];
            for (j, &e) in x.iter().enumerate() {
                if e != 0 {
                    let r = datum.reflect(i, &unit(n, j, 1));
                    for (o, ri) in out.iter_mut().zip(r) {
                        *o += e * ri;
                    }
                }
            }
            out
        };
        let v = ScalarHalf::v_pow;
        match l {
            Letter::K(j, e) => Ok(self.k_mono(&sh(&unit(n, j, e)), &self.zero_vec())),
            Letter::Kp(j, e) => Ok(self.k_mono(&self.zero_vec(), &sh(&unit(n, j, e)))),
            Letter::E(j) if j == i => {
                if inverse {
                    Ok(self.mul(&self.f_gen(i), &self.k_gen(i, -1))?.scale(&v(1)))
                } else {
                    Ok(self.mul(&self.kp_gen(i, -1), &self.f_gen(i))?.scale(&v(1)))
                }
            }
            Letter::F(j) if j == i => {
                if inverse {
                    Ok(self.mul(&self.kp_gen(i, -1), &self.e_gen(i))?.scale(&v(-1)))
                } else {
                    Ok(self.mul(&self.e_gen(i), &self.k_gen(i, -1))?.scale(&v(-1)))
                }
            }
            Letter::E(j) | Letter::F(j) => {
                let c = self.cartan(i, j);
                let g = |k| if matches!(l, Letter::E(_)) { self.e_gen(k) } else { self.f_gen(k) };
                match c {
                    0 => Ok(g(j)),
                    -1 => {
                        let (a, b) = if inverse { (g(j), g(i)) } else { (g(i), g(j)) };
                        let num = self
                            .mul(&a, &b)?
                            .scale(&ScalarHalf::u_pow(1))
                            .sub(&self.mul(&b, &a)?.scale(&ScalarHalf::u_pow(-1)));
                        div_exact(&num, &vdiff())
                    }
                    _ => Err(DoubleError::Parse(format!("braid operator needs c_ij in {{0, -1}}, got {}", c))),
                }
            }
        }
    }

    /// Substitute generator images into `x`.
    pub fn substitute(&self, x: &PbwElt, image: &dyn Fn(Letter) -> Result<PbwElt, DoubleError>) -> Result<PbwElt, DoubleError> {
        let h = &self.hall;
        let n = self.rank();
        let mut acc: RatComb<Mono> = RatComb::zero();
        for (m, c) in x.iter() {
            let half = |l: &KSClass, e_side: bool| -> Result<Vec<(PbwElt, RatFunc)>, DoubleError> {
                if l.is_zero() {
                    return Ok(vec![(self.one(), RatFunc::one())]);
                }
                let mut out = Vec::new();
                for (w, r) in h.monomial_expression(l)? {
                    let mut t = self.one();
                    for &j in &w {
                        let g = image(if e_side { Letter::E(j) } else { Letter::F(j) })?;
                        t = self.mul(&t, &g)?;
                    }
                    // u_j = v^{1/2} E_j
                    out.push((t, r.mul_scalar(&ScalarHalf::u_pow(w.len() as i32))));
                }
                Ok(out)
            };
            let mut kpart = self.one();
            for j in 0..n {
                if m.k[j] != 0 {
                    kpart = self.mul(&kpart, &image(Letter::K(j, m.k[j]))?)?;
                }
                if m.kp[j] != 0 {
                    kpart = self.mul(&kpart, &image(Letter::Kp(j, m.kp[j]))?)?;
                }
            }
            let fs = half(&m.f, false)?;
            let es = half(&m.e, true)?;
            let c = RatFunc::from_scalar(c);
            for (fe, fr) in &fs {
                for (ee, er) in &es {
                    let t = self.mul_all(&[fe, ee, &kpart])?;
                    acc.add_lin(&t, &c.mul(fr).mul(er));
                }
            }
        }
        Ok(acc.to_laurent().map_err(HallError::NotLaurent)?)
    }

    pub fn braid(&self, i: usize, x: &PbwElt, inverse: bool) -> Result<PbwElt, DoubleError> {
        self.substitute(x, &|l| self.braid_generator(i, inverse, l))
    }

    /// Defining relations, each of which must straighten to zero.
    pub fn relations(&self) -> Result<Vec<(String, PbwElt)>, DoubleError> {
        self.relations_with(&|l| Ok(self.letter(l)))
    }

    /// Defining relations evaluated on arbitrary generator images; all zero
    /// exactly when the images define an algebra map.
    pub fn relations_with(&self, gen: &dyn Fn(Letter) -> Result<PbwElt, DoubleError>) -> Result<Vec<(String, PbwElt)>, DoubleError> {
        let n = self.rank();
        let mut out = Vec::new();
        let diff = &ScalarHalf::v_pow(-1) - &ScalarHalf::v_pow(1);
        for i in 0..n {
            let (k, kp) = (gen(Letter::K(i, 1))?, gen(Letter::Kp(i, 1))?);
            let (ki, kpi) = (gen(Letter::K(i, -1))?, gen(Letter::Kp(i, -1))?);
            out.push((format!("K{0} K{0}^-1", i + 1), self.mul(&k, &ki)?.sub(&self.one())));
            out.push((format!("K'{0} K'{0}^-1", i + 1), self.mul(&kp, &kpi)?.sub(&self.one())));
            for j in 0..n {
                // K_i E_j = v^{c_ij} E_j K_i and friends
                let c = self.cartan(i, j) as i32;
                let (e, f) = (gen(Letter::E(j))?, gen(Letter::F(j))?);
                let pairs = [("K E", &k, &e, c), ("K F", &k, &f, -c), ("K' E", &kp, &e, -c), ("K' F", &kp, &f, c)];
                for (name, a, b, s) in pairs {
                    let r = self.mul(a, b)?.sub(&self.mul(b, a)?.scale(&ScalarHalf::v_pow(s)));
                    out.push((format!("{} ({},{})", name, i + 1, j + 1), r));
                }
                let mut r = self.commutator(&gen(Letter::E(i))?, &f)?;
                if i == j {
                    r = r.sub(&k.sub(&kp).scale(&diff));
                }
                out.push((format!("[E{},F{}]", i + 1, j + 1), r));
                let kj = gen(Letter::K(j, 1))?;
                let kpj = gen(Letter::Kp(j, 1))?;
                out.push((format!("K{} K'{}", i + 1, j + 1), self.commutator(&k, &kpj)?));
                out.push((format!("K{} K{}", i + 1, j + 1), self.commutator(&k, &kj)?));
                if i != j {
                    let (ei, fi) = (gen(Letter::E(i))?, gen(Letter::F(i))?);
                    out.push((format!("Serre E ({},{})", i + 1, j + 1), self.serre_of(&ei, &e, self.cartan(i, j))?));
                    out.push((format!("Serre F ({},{})", i + 1, j + 1), self.serre_of(&fi, &f, self.cartan(i, j))?));
                }
            }
        }
        Ok(out)
    }

    /// `sum_r (-1)^r [m choose r] x^r y x^{m-r}`, `m = 1 - c`.
    pub fn serre_of(&self, x: &PbwElt, y: &PbwElt, c: i64) -> Result<PbwElt, DoubleError> {
        let m = (1 - c) as u32;
        let mut out = PbwElt::zero();
        for r in 0..=m {
            let t = self.mul_all(&[&self.pow(x, r)?, y, &self.pow(x, m - r)?])?;
            let sign = if r % 2 == 0 { 1 } else { -1 };
            out.add_scaled(&t, &ScalarHalf::qbinom(m as i64, r as i64).scale(&crate::scalars::rat(sign)));
        }
        Ok(out)
    }

    pub fn to_json(&self, x: &PbwElt) -> serde_json::Value {
        let d = &self.hall.cat.datum;
        serde_json::Value::Array(
            x.iter()
                .map(|(m, c)| {
                    serde_json::json!({
                        "lambdaMinus": m.f.format(d),
                        "lambdaPlus": m.e.format(d),
                        "mu": m.k,
                        "nu": m.kp,
                        "coeff": c,
                    })
                })
                .collect(),
        )
    }

    /// Inverse of [`DoubleAlgebra::to_json`].
    pub fn from_json(&self, v: &serde_json::Value) -> Result<PbwElt, DoubleError> {
        let bad = |m: &str| DoubleError::Parse(format!("element JSON: {}", m));
        let d = &self.hall.cat.datum;
        let mut out = PbwElt::zero();
        for t in v.as_array().ok_or_else(|| bad("expected a list of terms"))? {
            let class = |key: &str| -> Result<KSClass, DoubleError> {
                let s = t.get(key).and_then(|x| x.as_str()).ok_or_else(|| bad(&format!("missing {}", key)))?;
                KSClass::parse(s, d).map_err(|e| bad(&e.to_string()))
            };
            let weights = |key: &str| -> Result<Vec<i64>, DoubleError> {
                serde_json::from_value(t.get(key).cloned().ok_or_else(|| bad(&format!("missing {}", key)))?).map_err(|e| bad(&e.to_string()))
            };
            let c: ScalarHalf = serde_json::from_value(t.get("coeff").cloned().ok_or_else(|| bad("missing coeff"))?).map_err(|e| bad(&e.to_string()))?;
            let (k, kp) = (weights("mu")?, weights("nu")?);
            if k.len() != self.rank() || kp.len() != self.rank() {
                return Err(bad("weight of the wrong length"));
            }
            out.add_term(self.mono(class("lambdaMinus")?, class("lambdaPlus")?, k, kp), c);
        }
        Ok(out)
    }

    pub fn pretty(&self, x: &PbwElt) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let d = &self.hall.cat.datum;
        let parts: Vec<String> = x
            .iter()
            .map(|(m, c)| {
                let mut s = format!("({})", c.to_pretty());
                if !m.f.is_zero() {
                    s += &format!(" F[{}]", m.f.format(d));
                }
                if !m.e.is_zero() {
                    s += &format!(" E[{}]", m.e.format(d));
                }
                for (i, &e) in m.k.iter().enumerate() {
                    if e != 0 {
                        s += &format!(" K{}^{}", i + 1, e);
                    }
                }
                for (i, &e) in m.kp.iter().enumerate() {
                    if e != 0 {
                        s += &format!(" K'{}^{}", i + 1, e);
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> DoubleAlgebra {
        DoubleAlgebra::new(QuiverShape::linear_a(1))
    }

    #[test]
    fn ef_commutator() {
        let d = sl2();
        let ef = d.mul(&d.e_gen(0), &d.f_gen(0)).unwrap();
        let fe = d.mul(&d.f_gen(0), &d.e_gen(0)).unwrap();
        let diff = &ScalarHalf::v_pow(-1) - &ScalarHalf::v_pow(1);
        let want = fe.add(&d.k_gen(0, 1).sub(&d.kp_gen(0, 1)).scale(&diff));
        assert_eq!(ef, want);
    }

    #[test]
    fn k_moves() {
        let d = sl2();
        let ke = d.mul(&d.k_gen(0, 1), &d.e_gen(0)).unwrap();
        let ek = d.mul(&d.e_gen(0), &d.k_gen(0, 1)).unwrap().scale(&ScalarHalf::v_pow(2));
        assert_eq!(ke, ek);
    }

    #[test]
    fn relations_a2() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
        for (name, r) in d.relations().unwrap() {
            assert!(r.is_zero(), "{}: {}", name, d.pretty(&r));
        }
    }

    #[test]
    fn braid_roundtrip_a2() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
        for l in [Letter::E(0), Letter::E(1), Letter::F(0), Letter::F(1), Letter::K(1, 1), Letter::Kp(0, 1)] {
            let x = d.letter(l);
            let t = d.braid(0, &x, false).unwrap();
            assert_eq!(d.braid(0, &t, true).unwrap(), x, "{:?}", l);
        }
    }

    #[test]
    fn braid_is_automorphism_a2() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
        for (name, r) in d.relations_with(&|l| d.braid_generator(0, false, l)).unwrap() {
            assert!(r.is_zero(), "{}: {}", name, d.pretty(&r));
        }
    }

    #[test]
    fn braid_relation_a2() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
        for l in [Letter::E(0), Letter::E(1), Letter::F(0), Letter::F(1), Letter::K(0, 1), Letter::Kp(1, 1)] {
            let x = d.letter(l);
            let a = d.braid(0, &d.braid(1, &d.braid(0, &x, false).unwrap(), false).unwrap(), false).unwrap();
            let b = d.braid(1, &d.braid(0, &d.braid(1, &x, false).unwrap(), false).unwrap(), false).unwrap();
            assert_eq!(a, b, "{:?}", l);
            let t = d.braid(0, &x, false).unwrap();
            assert_eq!(d.bar(&t).unwrap(), d.braid(0, &d.bar(&x).unwrap(), false).unwrap());
        }
    }

    #[test]
    fn involutions_square_to_identity() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
        let x = d.normal_form(&parse_word("E1 F2 E2 K1 F1 K'2", 2).unwrap()).unwrap();
        assert_eq!(d.bar(&d.bar(&x).unwrap()).unwrap(), x);
        assert_eq!(d.psi(&d.psi(&x).unwrap()).unwrap(), x);
        assert_eq!(d.star(&d.star(&x).unwrap()).unwrap(), x);
        let y = d.normal_form(&parse_word("E1 F1", 2).unwrap()).unwrap();
        let fe = d.normal_form(&parse_word("F1 E1", 2).unwrap()).unwrap();
        assert_eq!(d.bar(&y).unwrap(), fe);
        assert_eq!(d.psi(&d.k_gen(0, 1)).unwrap(), d.kp_gen(0, 1));
    }

    #[test]
    fn diamond_sl2() {
        let d = sl2();
        let ke = d.diamond(&[1], &[0], &d.e_gen(0)).unwrap();
        assert_eq!(ke, d.mul(&d.k_gen(0, 1), &d.e_gen(0)).unwrap().scale(&ScalarHalf::v_pow(-1)));
        let x = d.normal_form(&parse_word("E1 E1 F1", 1).unwrap()).unwrap();
        let lhs = d.bar(&d.diamond(&[1], &[2], &x).unwrap()).unwrap();
        let rhs = d.diamond(&[1], &[2], &d.bar(&x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse() {
        assert_eq!(parse_word("E1 F2^2 K'1^-1", 2).unwrap(), vec![Letter::E(0), Letter::F(1), Letter::F(1), Letter::Kp(0, -1)]);
        assert!(parse_word("E3", 2).is_err());
    }
}
