//! Double canonical basis of the double with non-invertible `K_i, K'_i`,
//! built in two triangular stages from the dual canonical bases of the
//! two halves.
//!
//! Stage 1 works modulo the `K'_i` with corrections in `vZ[v]` over larger
//! `K`-exponents; stage 2 lifts back with corrections in `v^{-1}Z[v^{-1}]`
//! over larger `K'`-exponents.

use super::{DoubleAlgebra, DoubleError, Mono, PbwElt};
use crate::canonbasis::{dual_canonical_basis, BasisError};
use crate::hallgen::HallError;
use crate::lincomb::RatComb;
use crate::ratfunc::{invert, RatFunc};
use crate::scalars::ScalarHalf;
use crate::triangle::{CorrectionRing, Direction, TriangleError, TriangularProblem};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DoubleBasisError {
    #[error(transparent)]
    Double(#[from] DoubleError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("stage {stage} at Gamma-degree {gamma:?}: {err}")]
    Triangle { stage: u8, gamma: (Vec<i64>, Vec<i64>), err: TriangleError },
    #[error("spanning set is not a basis at Gamma-degree {0:?}")]
    Singular((Vec<i64>, Vec<i64>)),
}

impl From<HallError> for DoubleBasisError {
    fn from(e: HallError) -> Self {
        DoubleBasisError::Double(DoubleError::Hall(e))
    }
}

pub type Gamma = (Vec<i64>, Vec<i64>);

/// Label of a double-basis element: `K_mu K'_nu <> (b_- . b_+)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleLabel {
    pub mu: Vec<i64>,
    pub nu: Vec<i64>,
    /// Degree and member index of `b_-`.
    pub minus: (Vec<i64>, usize),
    /// Degree and member index of `b_+`.
    pub plus: (Vec<i64>, usize),
}

#[derive(Debug, Clone)]
pub struct DoubleBasisElt {
    pub label: DoubleLabel,
    pub gamma: Gamma,
    pub element: PbwElt,
}

/// Solver for the double canonical basis, memoized per Gamma-degree.
pub struct DoubleBasis<'a> {
    pub alg: &'a DoubleAlgebra,
    halves: Mutex<BTreeMap<Vec<i64>, (Vec<PbwElt>, Vec<PbwElt>)>>,
    stage1: Mutex<BTreeMap<Gamma, Vec<(DoubleLabel, PbwElt)>>>,
    stage2: Mutex<BTreeMap<Gamma, Vec<(DoubleLabel, PbwElt)>>>,
}

/// Vectors `0 <= x <= top` componentwise.
fn boxes(top: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &t in top {
        let mut next = Vec::new();
        for p in &out {
            for x in 0..=t.max(-1) {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn geq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Coordinates of each `x` over `basis` (which must be a basis of the span
/// of the monomials that occur).
pub fn coordinates(basis: &[PbwElt], xs: &[PbwElt]) -> Option<Vec<Vec<ScalarHalf>>> {
    let monos: BTreeSet<Mono> = basis.iter().flat_map(|b| b.keys().cloned()).collect();
    if monos.len() != basis.len() {
        return None;
    }
    let monos: Vec<Mono> = monos.into_iter().collect();
    let m: Vec<Vec<RatFunc>> =
        basis.iter().map(|b| monos.iter().map(|k| RatFunc::from_scalar(&b.coeff(k))).collect()).collect();
    let inv = invert(&m)?;
    let mut out = Vec::new();
    for x in xs {
        if x.keys().any(|k| monos.binary_search(k).is_err()) {
            return None;
        }
        let mut row = Vec::new();
        for c in 0..basis.len() {
            let mut acc = RatFunc::zero();
            for (j, k) in monos.iter().enumerate() {
                let xc = x.coeff(k);
                if !xc.is_zero() {
                    acc = acc.add(&inv[j][c].mul_scalar(&xc));
                }
            }
            row.push(acc.to_scalar()?);
        }
        out.push(row);
    }
    Some(out)
}

impl<'a> DoubleBasis<'a> {
    pub fn new(alg: &'a DoubleAlgebra) -> Self {
        Self { alg, halves: Default::default(), stage1: Default::default(), stage2: Default::default() }
    }

    /// Dual canonical members of degree `d` in the negative and positive halves.
    pub fn half_basis(&self, d: &[i64]) -> Result<(Vec<PbwElt>, Vec<PbwElt>), DoubleBasisError> {
        if let Some(v) = self.halves.lock().unwrap().get(d) {
            return Ok(v.clone());
        }
        let h = &self.alg.hall;
        let (minus, plus) = if d.iter().all(|&x| x == 0) {
            (vec![self.alg.one()], vec![self.alg.one()])
        } else {
            let fam = dual_canonical_basis(h, d)?;
            let mut minus = Vec::new();
            let mut plus = Vec::new();
            for a in 0..fam.len() {
                let u = fam.member_u(h, a).to_laurent().map_err(HallError::NotLaurent)?;
                minus.push(self.alg.from_f_part(&u));
                plus.push(self.alg.from_e_part(&u));
            }
            (minus, plus)
        };
        self.halves.lock().unwrap().insert(d.to_vec(), (minus.clone(), plus.clone()));
        Ok((minus, plus))
    }

    /// Labels of Gamma-degree `g` with `K'`-exponent fixed to zero (stage 1)
    /// or free (stage 2).
    fn labels(&self, g: &Gamma, with_kp: bool) -> Result<Vec<DoubleLabel>, DoubleBasisError> {
        let n = self.alg.rank();
        let top: Vec<i64> = (0..n).map(|i| g.0[i].min(g.1[i])).collect();
        let mut out = Vec::new();
        for mu in boxes(&top) {
            for nu in boxes(&sub(&top, &mu)) {
                if !with_kp && nu.iter().any(|&x| x != 0) {
                    continue;
                }
                let kk: Vec<i64> = mu.iter().zip(&nu).map(|(a, b)| a + b).collect();
                let dp = sub(&g.0, &kk);
                let dm = sub(&g.1, &kk);
                let (minus, _) = self.half_basis(&dm)?;
                let (_, plus) = self.half_basis(&dp)?;
                for a in 0..minus.len() {
                    for b in 0..plus.len() {
                        out.push(DoubleLabel { mu: mu.clone(), nu: nu.clone(), minus: (dm.clone(), a), plus: (dp.clone(), b) });
                    }
                }
            }
        }
        Ok(out)
    }

    fn product_of(&self, l: &DoubleLabel) -> Result<PbwElt, DoubleBasisError> {
        let (minus, _) = self.half_basis(&l.minus.0)?;
        let (_, plus) = self.half_basis(&l.plus.0)?;
        Ok(self.alg.mul(&minus[l.minus.1], &plus[l.plus.1])?)
    }

    fn solve(
        &self,
        g: &Gamma,
        stage: u8,
        labels: &[DoubleLabel],
        standard: Vec<PbwElt>,
        project: bool,
    ) -> Result<Vec<(DoubleLabel, PbwElt)>, DoubleBasisError> {
        let bars: Vec<PbwElt> = standard
            .iter()
            .map(|x| {
                let b = self.alg.bar(x)?;
                Ok(if project { self.alg.heisenberg_project(&b, true) } else { b })
            })
            .collect::<Result<_, DoubleError>>()?;
        let bar = coordinates(&standard, &bars).ok_or_else(|| DoubleBasisError::Singular(g.clone()))?;
        let n = labels.len();
        let less: Vec<Vec<bool>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|c| {
                        let (x, y) = if stage == 1 { (&labels[a].mu, &labels[c].mu) } else { (&labels[a].nu, &labels[c].nu) };
                        geq(y, x) && y != x
                    })
                    .collect()
            })
            .collect();
        let (ring, dir) = if stage == 1 {
            (CorrectionRing::Positive, Direction::Upper)
        } else {
            (CorrectionRing::Negative, Direction::Upper)
        };
        let p = TriangularProblem::new(less, bar, ring, dir)
            .solve()
            .map_err(|err| DoubleBasisError::Triangle { stage, gamma: g.clone(), err })?;
        let mut out = Vec::new();
        for a in 0..n {
            let mut x = PbwElt::zero();
            for c in 0..n {
                x.add_scaled(&standard[c], &p[a][c]);
            }
            out.push((labels[a].clone(), x));
        }
        Ok(out)
    }

    /// Stage 1: `K_mu <> (b_- o b_+)` in the quotient by the `K'_i`.
    pub fn stage1(&self, g: &Gamma) -> Result<Vec<(DoubleLabel, PbwElt)>, DoubleBasisError> {
        if let Some(v) = self.stage1.lock().unwrap().get(g) {
            return Ok(v.clone());
        }
        let labels = self.labels(g, false)?;
        let zero = vec![0; self.alg.rank()];
        let standard: Vec<PbwElt> = labels
            .iter()
            .map(|l| {
                let p = self.product_of(l)?;
                Ok(self.alg.diamond(&l.mu, &zero, &p)?)
            })
            .collect::<Result<_, DoubleBasisError>>()?;
        let out = self.solve(g, 1, &labels, standard, true)?;
        self.stage1.lock().unwrap().insert(g.clone(), out.clone());
        Ok(out)
    }

    /// Stage 2: `K_mu K'_nu <> (b_- . b_+)` in the full algebra.
    pub fn stage2(&self, g: &Gamma) -> Result<Vec<(DoubleLabel, PbwElt)>, DoubleBasisError> {
        if let Some(v) = self.stage2.lock().unwrap().get(g) {
            return Ok(v.clone());
        }
        let labels = self.labels(g, true)?;
        let zero = vec![0; self.alg.rank()];
        let mut standard = Vec::new();
        for l in &labels {
            // K'_nu <> iota_+(K_mu <> (b_- o b_+))
            let g1 = (sub(&g.0, &l.nu), sub(&g.1, &l.nu));
            let s1 = self.stage1(&g1)?;
            let base = DoubleLabel { nu: zero.clone(), ..l.clone() };
            let y = &s1.iter().find(|(m, _)| *m == base).expect("stage-1 label").1;
            standard.push(self.alg.diamond(&zero, &l.nu, y)?);
        }
        let out = self.solve(g, 2, &labels, standard, false)?;
        self.stage2.lock().unwrap().insert(g.clone(), out.clone());
        Ok(out)
    }

    /// All elements with total Gamma-degree at most `total`.
    pub fn window(&self, total: i64) -> Result<Vec<DoubleBasisElt>, DoubleBasisError> {
        let n = self.alg.rank();
        let mut out = Vec::new();
        for gp in boxes(&vec![total; n]) {
            for gm in boxes(&vec![total; n]) {
                let s: i64 = gp.iter().chain(&gm).sum();
                if s > total {
                    continue;
                }
                let g = (gp.clone(), gm.clone());
                for (label, element) in self.stage2(&g)? {
                    out.push(DoubleBasisElt { label, gamma: g.clone(), element });
                }
            }
        }
        Ok(out)
    }

    /// Is `y = K_mu K'_nu <> z` for some member `z` with trivial `K`-label
    /// and some integer exponents? Returns the witness.
    pub fn find_shifted(&self, y: &PbwElt, family: &[DoubleBasisElt]) -> Result<Option<(DoubleLabel, Vec<i64>, Vec<i64>)>, DoubleBasisError> {
        let Some((ym, _)) = y.iter().next() else {
            return Ok(None);
        };
        for z in family {
            if z.label.mu.iter().chain(&z.label.nu).any(|&x| x != 0) {
                continue;
            }
            let mut tried = BTreeSet::new();
            for (zm, _) in z.element.iter() {
                if zm.f != ym.f || zm.e != ym.e {
                    continue;
                }
                let mu = sub(&ym.k, &zm.k);
                let nu = sub(&ym.kp, &zm.kp);
                if !tried.insert((mu.clone(), nu.clone())) {
                    continue;
                }
                if self.alg.diamond(&mu, &nu, &z.element)? == *y {
                    return Ok(Some((z.label.clone(), mu, nu)));
                }
            }
        }
        Ok(None)
    }
}

/// Expansion of `x` over a family of elements (all of the relevant
/// Gamma-degrees), as label-indexed coefficients.
pub fn expand(x: &PbwElt, family: &[DoubleBasisElt]) -> Option<BTreeMap<DoubleLabel, ScalarHalf>> {
    let basis: Vec<PbwElt> = family.iter().map(|e| e.element.clone()).collect();
    let mut acc: RatComb<DoubleLabel> = RatComb::zero();
    let coords = coordinates(&basis, &[x.clone()])?;
    for (k, c) in coords[0].iter().enumerate() {
        if !c.is_zero() {
            acc.add_term(family[k].label.clone(), RatFunc::from_scalar(c));
        }
    }
    acc.to_laurent().ok().map(|l| l.into_map())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::QuiverShape;

    #[test]
    fn sl2_small() {
        let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
        let db = DoubleBasis::new(&d);
        let g = (vec![1], vec![1]);
        let s1 = db.stage1(&g).unwrap();
        let fe = d.mul(&d.f_gen(0), &d.e_gen(0)).unwrap();
        let k = d.k_gen(0, 1);
        let want1 = fe.sub(&k.scale(&ScalarHalf::v_pow(1)));
        assert!(s1.iter().any(|(_, x)| *x == want1));
        let s2 = db.stage2(&g).unwrap();
        let c = want1.sub(&d.kp_gen(0, 1).scale(&ScalarHalf::v_pow(-1)));
        assert!(s2.iter().any(|(_, x)| *x == c));
    }
}
