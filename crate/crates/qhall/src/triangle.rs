//! Bar-invariant unitriangular bases on a finite poset.
//!
//! Given `bar(e_a) = sum_b B[a][b] e_b` with `B` unitriangular, find the
//! unique `b_a = sum_c P[a][c] e_c` with `bar(b_a) = b_a`, `P[a][a] = 1` and
//! off-diagonal entries in `v^{-1}Z[v^{-1}]` (or `vZ[v]`).

use crate::scalars::ScalarHalf;

pub type Matrix = Vec<Vec<ScalarHalf>>;

/// Ring of allowed off-diagonal corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionRing {
    /// `v^{-1} Z[v^{-1}]`
    Negative,
    /// `v Z[v]`
    Positive,
}

/// Which side of `a` the correction terms of `b_a` live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `b_a - e_a` is supported on `c < a`.
    Lower,
    /// `b_a - e_a` is supported on `c > a`.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TriangleError {
    #[error("invalid bar data: {0}")]
    InvalidBar(String),
    #[error("bar matrix is not unitriangular at ({0}, {1})")]
    NotTriangular(usize, usize),
    #[error("ring mismatch at ({row}, {col}): {detail}")]
    RingMismatch { row: usize, col: usize, detail: String },
    #[error("solutions depend on the linear extension at ({0}, {1})")]
    NotUnique(usize, usize),
    #[error("order is not a strict partial order: {0}")]
    BadOrder(String),
}

#[derive(Debug, Clone)]
pub struct TriangularProblem {
    /// `less[a][b]` iff `a < b` strictly.
    pub less: Vec<Vec<bool>>,
    pub bar: Matrix,
    pub ring: CorrectionRing,
    pub direction: Direction,
}

impl TriangularProblem {
    pub fn new(less: Vec<Vec<bool>>, bar: Matrix, ring: CorrectionRing, direction: Direction) -> Self {
        Self { less, bar, ring, direction }
    }

    pub fn len(&self) -> usize {
        self.bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bar.is_empty()
    }

    /// `c` may appear in the correction of `a`.
    fn below(&self, c: usize, a: usize) -> bool {
        match self.direction {
            Direction::Lower => self.less[c][a],
            Direction::Upper => self.less[a][c],
        }
    }

    fn validate(&self) -> Result<(), TriangleError> {
        let n = self.len();
        if self.less.len() != n || self.bar.iter().any(|r| r.len() != n) || self.less.iter().any(|r| r.len() != n) {
            return Err(TriangleError::InvalidBar("dimension mismatch".into()));
        }
        for a in 0..n {
            if self.less[a][a] {
                return Err(TriangleError::BadOrder(format!("{} < {}", a, a)));
            }
            for b in 0..n {
                if self.less[a][b] && self.less[b][a] {
                    return Err(TriangleError::BadOrder(format!("{} and {} are mutually below", a, b)));
                }
                for c in 0..n {
                    if self.less[a][b] && self.less[b][c] && !self.less[a][c] {
                        return Err(TriangleError::BadOrder(format!("{} < {} < {} but not {} < {}", a, b, c, a, c)));
                    }
                }
            }
        }
        for a in 0..n {
            if !self.bar[a][a].is_one() {
                return Err(TriangleError::NotTriangular(a, a));
            }
            for b in 0..n {
                if a != b && !self.bar[a][b].is_zero() && !self.below(b, a) {
                    return Err(TriangleError::NotTriangular(a, b));
                }
            }
        }
        for a in 0..n {
            for c in 0..n {
                let mut s = ScalarHalf::zero();
                for m in 0..n {
                    s += &self.bar[a][m].bar() * &self.bar[m][c];
                }
                let expect = if a == c { ScalarHalf::one() } else { ScalarHalf::zero() };
                if s != expect {
                    return Err(TriangleError::InvalidBar(format!("bar is not an involution at ({}, {})", a, c)));
                }
            }
        }
        Ok(())
    }

    /// Indices ordered so that for every `a`, all `c` above it in the
    /// direction of the recursion come first. `reverse_ties` picks a second
    /// linear extension.
    fn linear_extension(&self, reverse_ties: bool) -> Vec<usize> {
        let n = self.len();
        let mut done = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let ready: Vec<usize> = (0..n)
                .filter(|&c| !done[c] && (0..n).all(|a| done[a] || a == c || !self.below(c, a)))
                .collect();
            let pick = if reverse_ties { *ready.last().unwrap() } else { ready[0] };
            done[pick] = true;
            out.push(pick);
        }
        out
    }

    fn solve_with(&self, order: &[usize]) -> Result<Matrix, TriangleError> {
        let n = self.len();
        let mut p = vec![vec![ScalarHalf::zero(); n]; n];
        for a in 0..n {
            p[a][a] = ScalarHalf::one();
            for &c in order {
                if !self.below(c, a) {
                    continue;
                }
                let mut r = ScalarHalf::zero();
                for m in 0..n {
                    if m != c && !p[a][m].is_zero() && !self.bar[m][c].is_zero() {
                        r += &p[a][m].bar() * &self.bar[m][c];
                    }
                }
                let anti = &r.bar() + &r;
                if !anti.is_zero() || !r.is_integral() || !r.is_v_laurent() {
                    return Err(TriangleError::RingMismatch {
                        row: a,
                        col: c,
                        detail: format!("no solution of x - bar(x) = {}", r),
                    });
                }
                p[a][c] = match self.ring {
                    CorrectionRing::Negative => r.negative_part(),
                    CorrectionRing::Positive => r.positive_part(),
                };
            }
        }
        Ok(p)
    }

    /// Solve, checking uniqueness against a second linear extension.
    pub fn solve(&self) -> Result<Matrix, TriangleError> {
        self.validate()?;
        let first = self.solve_with(&self.linear_extension(false))?;
        let second = self.solve_with(&self.linear_extension(true))?;
        for a in 0..self.len() {
            for c in 0..self.len() {
                if first[a][c] != second[a][c] {
                    return Err(TriangleError::NotUnique(a, c));
                }
            }
        }
        Ok(first)
    }
}

pub fn lusztig_basis(p: &TriangularProblem) -> Result<Matrix, TriangleError> {
    p.solve()
}

/// Bar matrix of the solved basis: should be the identity.
pub fn transformed_bar(p: &Matrix, bar: &Matrix) -> Option<Matrix> {
    // bar(b_a) = sum_m bar(P[a][m]) sum_c B[m][c] e_c; rewrite in b via P^{-1}.
    let n = p.len();
    let mut be = vec![vec![ScalarHalf::zero(); n]; n];
    for a in 0..n {
        for m in 0..n {
            if p[a][m].is_zero() {
                continue;
            }
            let pb = p[a][m].bar();
            for c in 0..n {
                be[a][c] += &pb * &bar[m][c];
            }
        }
    }
    let inv = unitriangular_inverse(p)?;
    Some(mat_mul(&be, &inv))
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![ScalarHalf::zero(); k]; n];
    for i in 0..n {
        for (m, x) in a[i].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..k {
                if !b[m][j].is_zero() {
                    out[i][j] += x * &b[m][j];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { ScalarHalf::one() } else { ScalarHalf::zero() }).collect()).collect()
}

/// Inverse of a matrix that is unitriangular after some permutation
/// (`I - N` with `N` nilpotent): `sum_k N^k`.
pub fn unitriangular_inverse(p: &Matrix) -> Option<Matrix> {
    let n = p.len();
    let id = identity(n);
    let mut nil = id.clone();
    for i in 0..n {
        for j in 0..n {
            nil[i][j] = &id[i][j] - &p[i][j];
        }
    }
    let mut acc = id.clone();
    let mut pow = id;
    for _ in 0..n {
        pow = mat_mul(&pow, &nil);
        if pow.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            return Some(acc);
        }
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += &pow[i][j];
            }
        }
    }
    pow = mat_mul(&pow, &nil);
    pow.iter().all(|r| r.iter().all(|x| x.is_zero())).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: i32) -> ScalarHalf {
        ScalarHalf::v_pow(k)
    }

    fn chain2() -> Vec<Vec<bool>> {
        vec![vec![false, true], vec![false, false]]
    }

    #[test]
    fn identity_bar() {
        let p = TriangularProblem::new(chain2(), identity(2), CorrectionRing::Negative, Direction::Lower);
        assert_eq!(p.solve().unwrap(), identity(2));
    }

    #[test]
    fn two_chain() {
        let mut bar = identity(2);
        bar[1][0] = &v(1) - &v(-1);
        let p = TriangularProblem::new(chain2(), bar.clone(), CorrectionRing::Negative, Direction::Lower);
        let sol = p.solve().unwrap();
        assert_eq!(sol[1][0], -v(-1));
        assert_eq!(transformed_bar(&sol, &bar).unwrap(), identity(2));
        let pos = TriangularProblem::new(chain2(), bar, CorrectionRing::Positive, Direction::Lower);
        assert_eq!(pos.solve().unwrap()[1][0], v(1));
    }

    #[test]
    fn errors() {
        let mut bar = identity(2);
        bar[1][0] = v(1);
        let p = TriangularProblem::new(chain2(), bar, CorrectionRing::Negative, Direction::Lower);
        assert!(matches!(p.solve(), Err(TriangleError::InvalidBar(_))));
        let mut bar = identity(2);
        bar[0][1] = &v(1) - &v(-1);
        let p = TriangularProblem::new(chain2(), bar, CorrectionRing::Negative, Direction::Lower);
        assert_eq!(p.solve(), Err(TriangleError::NotTriangular(0, 1)));
        let mut bar = identity(2);
        bar[1][0] = &ScalarHalf::u_pow(1) - &ScalarHalf::u_pow(-1);
        let p = TriangularProblem::new(chain2(), bar, CorrectionRing::Negative, Direction::Lower);
        assert!(matches!(p.solve(), Err(TriangleError::RingMismatch { .. })));
    }
}
