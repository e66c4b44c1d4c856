//! Canonical and dual canonical bases of the generic Hall algebra.
//!
//! Canonical: psi-invariant, `B_l in E_l + sum_{m < l} v^{-1}Z[v^{-1}] E_m`.
//! Dual canonical: bar-invariant, `C_l in U_l + sum_{l < m} v^{-1}Z[v^{-1}] U_m`.

use crate::finrep::KSClass;
use crate::hallgen::{HallAlgebra, HallElt, HallError};
use crate::lincomb::RatComb;
use crate::ratfunc::RatFunc;
use crate::scalars::ScalarHalf;
use crate::triangle::{unitriangular_inverse, CorrectionRing, Direction, Matrix, TriangleError, TriangularProblem};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BasisError {
    #[error(transparent)]
    Hall(#[from] HallError),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error("pairing mismatch at ({mu}, {lambda}): got {got}")]
    Pairing { mu: String, lambda: String, got: String },
    #[error("transport of {0} is not in the target family")]
    Fourier(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Canonical,
    DualCanonical,
}

/// One graded piece of a (dual) canonical basis. Row `a` of `transition`
/// expresses member `a` over the standard basis (`E` resp. `U`).
#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub kind: BasisKind,
    pub degree: Vec<i64>,
    pub classes: Arc<Vec<KSClass>>,
    pub transition: Matrix,
    /// `N(d) = (d,d)/2 - sum d_i`.
    pub norm: i64,
}

/// `N(d) = (d,d)/2 - sum d_i`.
pub fn norm_exponent(h: &HallAlgebra, d: &[i64]) -> i64 {
    h.cat.datum.sym_form(d, d) / 2 - d.iter().sum::<i64>()
}

/// Strict degeneration order on the classes of one degree.
pub fn order_matrix(h: &HallAlgebra, classes: &[KSClass]) -> Vec<Vec<bool>> {
    classes.iter().map(|a| classes.iter().map(|b| h.cat.prec(a, b)).collect()).collect()
}

pub fn canonical_basis(h: &HallAlgebra, d: &[i64]) -> Result<BasisFamily, BasisError> {
    let classes = h.classes(d);
    let psi = h.psi_matrix_e(d)?;
    let problem = TriangularProblem::new(order_matrix(h, &classes), psi, CorrectionRing::Negative, Direction::Lower);
    let transition = problem.solve()?;
    Ok(BasisFamily { kind: BasisKind::Canonical, degree: d.to_vec(), classes, transition, norm: norm_exponent(h, d) })
}

pub fn dual_canonical_basis(h: &HallAlgebra, d: &[i64]) -> Result<BasisFamily, BasisError> {
    let classes = h.classes(d);
    let bar = h.bar_matrix_dual(d)?;
    let problem = TriangularProblem::new(order_matrix(h, &classes), bar, CorrectionRing::Negative, Direction::Upper);
    let transition = problem.solve()?;
    Ok(BasisFamily { kind: BasisKind::DualCanonical, degree: d.to_vec(), classes, transition, norm: norm_exponent(h, d) })
}

impl BasisFamily {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, l: &KSClass) -> Option<usize> {
        self.classes.iter().position(|c| c == l)
    }

    /// Member `a` in standard coordinates.
    pub fn member(&self, a: usize) -> HallElt {
        let mut out = HallElt::zero();
        for (k, c) in self.transition[a].iter().enumerate() {
            out.add_term(self.classes[k].clone(), c.clone());
        }
        out
    }

    /// Scale from the standard basis element of class `k` to `u_k`.
    fn standard_coeff(&self, h: &HallAlgebra, k: usize) -> RatFunc {
        match self.kind {
            BasisKind::Canonical => h.e_coeff(&self.classes[k]),
            BasisKind::DualCanonical => RatFunc::from_scalar(&h.dual_coeff(&self.classes[k])),
        }
    }

    /// Member `a` on the `u`-basis.
    pub fn member_u(&self, h: &HallAlgebra, a: usize) -> RatComb<KSClass> {
        let mut out = RatComb::zero();
        for (k, c) in self.transition[a].iter().enumerate() {
            if !c.is_zero() {
                out.add_term(self.classes[k].clone(), self.standard_coeff(h, k).mul_scalar(c));
            }
        }
        out
    }

    /// Standard coordinates of a `u`-combination of this degree.
    pub fn standard_coords(&self, h: &HallAlgebra, x: &RatComb<KSClass>) -> Result<HallElt, HallError> {
        let mut out = HallElt::zero();
        for (l, c) in x.iter() {
            let k = self.index_of(l).expect("class of this degree");
            let s = c.div(&self.standard_coeff(h, k));
            out.add_term(l.clone(), s.to_scalar().ok_or_else(|| HallError::NotLaurent(format!("{:?}", s)))?);
        }
        Ok(out)
    }

    /// Standard basis expanded in this family: the inverse transition.
    pub fn inverse_transition(&self) -> Matrix {
        unitriangular_inverse(&self.transition).expect("transition is unitriangular")
    }

    /// Off-diagonal transition entries in `v^{-1}N[v^{-1}]`.
    pub fn is_positive(&self) -> bool {
        positive_offdiag(&self.transition)
    }

    pub fn to_json(&self, h: &HallAlgebra) -> serde_json::Value {
        let names: Vec<String> = self.classes.iter().map(|c| c.format(&h.cat.datum)).collect();
        let rows: Vec<serde_json::Value> = (0..self.len())
            .map(|a| {
                let terms: Vec<serde_json::Value> = self.transition[a]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| serde_json::json!({ "class": names[k], "coeff": c }))
                    .collect();
                serde_json::json!({ "class": names[a], "terms": terms })
            })
            .collect();
        serde_json::json!({ "kind": self.kind, "degree": self.degree, "norm": self.norm, "members": rows })
    }

    pub fn to_latex(&self, h: &HallAlgebra) -> String {
        let names: Vec<String> = self.classes.iter().map(|c| c.format(&h.cat.datum)).collect();
        let mut s = format!("\\begin{{array}}{{l|{}}}\n", "c".repeat(self.len()));
        s += &format!(" & {} \\\\ \\hline\n", names.join(" & "));
        for a in 0..self.len() {
            let cells: Vec<String> = self.transition[a].iter().map(|c| c.to_latex()).collect();
            s += &format!("{} & {} \\\\\n", names[a], cells.join(" & "));
        }
        s + "\\end{array}\n"
    }
}

/// All off-diagonal entries lie in `v^{-1}N[v^{-1}]`, diagonal entries are 1.
pub fn positive_offdiag(m: &Matrix) -> bool {
    m.iter().enumerate().all(|(a, row)| {
        row.iter().enumerate().all(|(b, c)| {
            if a == b {
                c.is_one()
            } else {
                c.is_zero() || (c.in_neg_ring() && c.is_nonneg_integral())
            }
        })
    })
}

/// Gram matrix `(v^{shift} B_mu, v^{-n/2} C_lambda)` over one degree,
/// computed on the `u`-basis with `(u_k, u_k) = a_k(v^2)`. `shift` is in
/// powers of `u = v^{1/2}`.
pub fn pairing_gram(h: &HallAlgebra, canon: &BasisFamily, dual: &BasisFamily, shift_u: i32) -> Result<Matrix, BasisError> {
    let n = canon.len();
    let twist = ScalarHalf::u_pow(shift_u - canon.norm as i32);
    let bs: Vec<RatComb<KSClass>> = (0..n).map(|a| canon.member_u(h, a)).collect();
    let cs: Vec<RatComb<KSClass>> = (0..n).map(|a| dual.member_u(h, a)).collect();
    let mut gram = vec![vec![ScalarHalf::zero(); n]; n];
    for mu in 0..n {
        for la in 0..n {
            let mut acc = RatFunc::zero();
            for (k, x) in bs[mu].iter() {
                if let Some((_, y)) = cs[la].iter().find(|(l, _)| *l == k) {
                    acc = acc.add(&x.mul(y).mul_scalar(&h.cat.aut_scalar(k)));
                }
            }
            let s = acc.mul_scalar(&twist);
            gram[mu][la] = s.to_scalar().ok_or_else(|| BasisError::Hall(HallError::NotLaurent(format!("{:?}", s))))?;
        }
    }
    Ok(gram)
}

/// Check `(v^{|d|/2} B_mu, v^{-n/2} C_lambda) = delta` on one degree.
pub fn pairing_duality_check(h: &HallAlgebra, d: &[i64]) -> Result<(), BasisError> {
    let canon = canonical_basis(h, d)?;
    let dual = dual_canonical_basis(h, d)?;
    let total: i64 = d.iter().sum();
    let gram = pairing_gram(h, &canon, &dual, total as i32)?;
    for (mu, row) in gram.iter().enumerate() {
        for (la, g) in row.iter().enumerate() {
            let ok = if mu == la { g.is_one() } else { g.is_zero() };
            if !ok {
                return Err(BasisError::Pairing {
                    mu: canon.classes[mu].format(&h.cat.datum),
                    lambda: dual.classes[la].format(&h.cat.datum),
                    got: g.to_pretty(),
                });
            }
        }
    }
    Ok(())
}

/// Product of divided powers `E_{i_1}^{(m_1)} ... E_{i_k}^{(m_k)}` in
/// `E`-coordinates, with `E_i^{(m)} = E_{m alpha_i}`.
pub fn divided_power_monomial(h: &HallAlgebra, word: &[(usize, u32)]) -> Result<HallElt, HallError> {
    let factors: Vec<KSClass> = word.iter().filter(|(_, m)| *m > 0).map(|&(i, m)| h.simple(i).scale(m)).collect();
    h.e_monomial(&factors)
}

/// Transport each member of `family` along the generator-determined
/// isomorphism `h -> other` and locate it in `target` (a family of the same
/// kind and degree over `other`). Returns the matching member indices.
pub fn fourier_match(
    h: &HallAlgebra,
    family: &BasisFamily,
    other: &HallAlgebra,
    target: &BasisFamily,
) -> Result<Vec<usize>, BasisError> {
    let members: Vec<HallElt> = (0..target.len()).map(|b| target.member(b)).collect();
    let mut out = Vec::new();
    for a in 0..family.len() {
        let image = h.fourier_rat(other, &family.member_u(h, a))?;
        let coords = target.standard_coords(other, &image)?;
        match members.iter().position(|m| *m == coords) {
            Some(b) => out.push(b),
            None => return Err(BasisError::Fourier(family.classes[a].format(&h.cat.datum))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::QuiverShape;

    #[test]
    fn sl2_divided_powers() {
        let h = HallAlgebra::new(QuiverShape::linear_a(1));
        for m in 1..=4 {
            let b = canonical_basis(&h, &[m]).unwrap();
            assert_eq!(b.transition, vec![vec![ScalarHalf::one()]]);
            let c = dual_canonical_basis(&h, &[m]).unwrap();
            assert_eq!(c.transition, vec![vec![ScalarHalf::one()]]);
            assert_eq!(h.dual_exponent_u(&h.simple(0).scale(m as u32)), -(m * m) as i32);
        }
    }

    #[test]
    fn a2_degree_11() {
        let h = HallAlgebra::new(QuiverShape::linear_a(2));
        let c = dual_canonical_basis(&h, &[1, 1]).unwrap();
        let ss = c.index_of(&h.simple(0).add(&h.simple(1))).unwrap();
        let p = 1 - ss;
        assert!(c.transition[ss][p].in_neg_ring());
        pairing_duality_check(&h, &[1, 1]).unwrap();
        let b = canonical_basis(&h, &[1, 1]).unwrap();
        assert!(b.is_positive());
    }
}
