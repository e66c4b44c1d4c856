//! Quiver representations over prime fields.
//!
//! Indecomposables come from BGP reflection chains applied to simples, and
//! isomorphism classes are read off from Hom-dimension fingerprints against
//! the indecomposables.

use crate::cartan::{QuiverShape, RootDatum};
use crate::fp::{self, Mat};
use crate::scalars::{QPolynomial, Rational, ScalarHalf};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Default bound on the number of extension classes a census may enumerate.
pub const DEFAULT_CENSUS_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FinrepError {
    #[error("not a module of this shape: {0}")]
    NotAModule(String),
    #[error("census cap exceeded: enumeration needs {needed} classes, cap is {cap}")]
    CensusCap { needed: u128, cap: u128 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("dimension vectors differ: {0:?} vs {1:?}")]
    DimMismatch(Vec<i64>, Vec<i64>),
    #[error("class parse error: {0}")]
    Parse(String),
}

/// A representation of a quiver over `F_p`; `maps[a]` is the matrix of arrow
/// `a: s -> t`, of shape `dims[t] x dims[s]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqRep {
    pub p: u64,
    pub arrows: Vec<(usize, usize)>,
    pub dims: Vec<usize>,
    pub maps: Vec<Mat>,
}

impl FqRep {
    pub fn zero(shape: &QuiverShape, p: u64) -> Self {
        Self::new(shape, p, vec![0; shape.num_vertices()])
    }

    /// All arrow maps zero.
    pub fn new(shape: &QuiverShape, p: u64, dims: Vec<usize>) -> Self {
        let maps = shape.arrows().iter().map(|&(s, t)| Mat::zeros(dims[t], dims[s])).collect();
        Self { p, arrows: shape.arrows().to_vec(), dims, maps }
    }

    pub fn simple(shape: &QuiverShape, i: usize, p: u64) -> Self {
        let mut d = vec![0; shape.num_vertices()];
        d[i] = 1;
        Self::new(shape, p, d)
    }

    pub fn with_maps(shape: &QuiverShape, p: u64, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self, FinrepError> {
        let r = Self { p, arrows: shape.arrows().to_vec(), dims, maps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), FinrepError> {
        if self.maps.len() != self.arrows.len() {
            return Err(FinrepError::NotAModule("wrong number of arrow maps".into()));
        }
        for (a, &(s, t)) in self.arrows.iter().enumerate() {
            let m = &self.maps[a];
            if m.rows != self.dims[t] || m.cols != self.dims[s] {
                return Err(FinrepError::NotAModule(format!("arrow {} has the wrong shape", a)));
            }
            if m.data.iter().any(|&x| x >= self.p) {
                return Err(FinrepError::NotAModule("entry outside 0..p".into()));
            }
        }
        Ok(())
    }

    pub fn dim_vector(&self) -> Vec<i64> {
        self.dims.iter().map(|&d| d as i64).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn direct_sum(&self, other: &FqRep) -> FqRep {
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .arrows
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| {
                let mut m = Mat::zeros(dims[t], dims[s]);
                m.set_block(0, 0, &self.maps[a]);
                m.set_block(self.dims[t], self.dims[s], &other.maps[a]);
                m
            })
            .collect();
        FqRep { p: self.p, arrows: self.arrows.clone(), dims, maps }
    }
}

/// Offsets of per-vertex blocks `Hom(M_i, N_i)` inside the unknown vector.
fn vertex_offsets(m: &FqRep, n: &FqRep) -> Vec<usize> {
    let mut off = Vec::with_capacity(m.dims.len() + 1);
    let mut acc = 0;
    for i in 0..m.dims.len() {
        off.push(acc);
        acc += m.dims[i] * n.dims[i];
    }
    off.push(acc);
    off
}

fn arrow_offsets(m: &FqRep, n: &FqRep) -> Vec<usize> {
    let mut off = Vec::with_capacity(m.arrows.len() + 1);
    let mut acc = 0;
    for &(s, t) in &m.arrows {
        off.push(acc);
        acc += m.dims[s] * n.dims[t];
    }
    off.push(acc);
    off
}

/// Matrix of `delta: (f_i) -> (f_t M_a - N_a f_s)_a`; rows index the arrow
/// space, columns the vertex space. Entry `(r, c)` of `f_i` sits at
/// `off_i + r * dim M_i + c`.
fn delta_matrix(m: &FqRep, n: &FqRep) -> Mat {
    let p = m.p;
    let vo = vertex_offsets(m, n);
    let ao = arrow_offsets(m, n);
    let mut d = Mat::zeros(*ao.last().unwrap(), *vo.last().unwrap());
    for (a, &(s, t)) in m.arrows.iter().enumerate() {
        let ma = &m.maps[a];
        let na = &n.maps[a];
        // row (r, c) of block a: entry (r, c) of f_t M_a - N_a f_s, an N_t x M_s matrix.
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                let row = ao[a] + r * m.dims[s] + c;
                // (f_t M_a)[r][c] = sum_k f_t[r][k] M_a[k][c]
                for k in 0..m.dims[t] {
                    let x = ma.get(k, c);
                    if x != 0 {
                        let col = vo[t] + r * m.dims[t] + k;
                        d.set(row, col, (d.get(row, col) + x) % p);
                    }
                }
                // (N_a f_s)[r][c] = sum_k N_a[r][k] f_s[k][c]
                for k in 0..n.dims[s] {
                    let x = na.get(r, k);
                    if x != 0 {
                        let col = vo[s] + k * m.dims[s] + c;
                        d.set(row, col, (d.get(row, col) + p - x) % p);
                    }
                }
            }
        }
    }
    d
}

/// `dim Hom(M, N)`.
pub fn hom_dim(m: &FqRep, n: &FqRep) -> usize {
    assert_eq!(m.p, n.p, "representations over different fields");
    let d = delta_matrix(m, n);
    d.cols - d.rank(m.p)
}

/// `dim Ext^1(M, N)` as the cokernel dimension of the Hom-to-arrow-space map.
pub fn ext_dim(m: &FqRep, n: &FqRep) -> usize {
    let d = delta_matrix(m, n);
    d.rows - d.rank(m.p)
}

/// Middle term of the extension `0 -> Z -> Y -> X -> 0` with class
/// represented by `eta` in the arrow space `(+)_a Hom(X_s, Z_t)`.
pub fn extension(x: &FqRep, z: &FqRep, eta: &[u64]) -> FqRep {
    let ao = arrow_offsets(x, z);
    assert_eq!(eta.len(), *ao.last().unwrap(), "extension cocycle has the wrong length");
    let dims: Vec<usize> = z.dims.iter().zip(&x.dims).map(|(a, b)| a + b).collect();
    let maps = x
        .arrows
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| {
            let mut m = Mat::zeros(dims[t], dims[s]);
            m.set_block(0, 0, &z.maps[a]);
            m.set_block(z.dims[t], z.dims[s], &x.maps[a]);
            for r in 0..z.dims[t] {
                for c in 0..x.dims[s] {
                    m.set(r, z.dims[s] + c, eta[ao[a] + r * x.dims[s] + c]);
                }
            }
            m
        })
        .collect();
    FqRep { p: x.p, arrows: x.arrows.clone(), dims, maps }
}

/// Krull-Schmidt class: multiplicities indexed by positive-root position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KSClass(pub Vec<u32>);

impl KSClass {
    pub fn zero(n_roots: usize) -> Self {
        KSClass(vec![0; n_roots])
    }

    pub fn single(n_roots: usize, idx: usize) -> Self {
        let mut v = vec![0; n_roots];
        v[idx] = 1;
        KSClass(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    pub fn add(&self, other: &KSClass) -> KSClass {
        KSClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u32) -> KSClass {
        KSClass(self.0.iter().map(|a| a * k).collect())
    }

    pub fn num_summands(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim_vector(&self, datum: &RootDatum) -> Vec<i64> {
        let mut d = vec![0i64; datum.rank()];
        for (k, &m) in self.0.iter().enumerate() {
            for (i, x) in datum.roots[k].iter().enumerate() {
                d[i] += m as i64 * x;
            }
        }
        d
    }

    /// Human-readable form such as `2(1,0)+(1,1)`; `0` for the zero class.
    pub fn format(&self, datum: &RootDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, &m) in self.0.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let root: Vec<String> = datum.roots[k].iter().map(|x| x.to_string()).collect();
            let r = format!("({})", root.join(","));
            parts.push(if m == 1 { r } else { format!("{}{}", m, r) });
        }
        parts.join("+")
    }

    /// Parse `a1`, `2a2`, `(1,1)`, `a1+(1,1)`, `2*(1,0)` or `0`.
    pub fn parse(s: &str, datum: &RootDatum) -> Result<KSClass, FinrepError> {
        let n = datum.rank();
        let mut out = KSClass::zero(datum.roots.len());
        let s = s.trim();
        if s == "0" {
            return Ok(out);
        }
        for term in s.split('+') {
            let t = term.trim();
            let digits: String = t.chars().take_while(|c| c.is_ascii_digit()).collect();
            let mult: u32 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| FinrepError::Parse(t.into()))? };
            let rest = t[digits.len()..].trim_start_matches('*').trim();
            let root: Vec<i64> = if let Some(i) = rest.strip_prefix('a') {
                let i: usize = i.parse().map_err(|_| FinrepError::Parse(format!("bad simple '{}'", rest)))?;
                if i == 0 || i > n {
                    return Err(FinrepError::Parse(format!("vertex {} out of range", i)));
                }
                let mut e = vec![0; n];
                e[i - 1] = 1;
                e
            } else if rest.starts_with('(') && rest.ends_with(')') {
                rest[1..rest.len() - 1]
                    .split(',')
                    .map(|x| x.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| FinrepError::Parse(format!("bad root '{}'", rest)))?
            } else {
                return Err(FinrepError::Parse(format!("unrecognized term '{}'", t)));
            };
            let k = datum
                .root_index(&root)
                .ok_or_else(|| FinrepError::Parse(format!("{:?} is not a positive root", root)))?;
            out.0[k] += mult;
        }
        Ok(out)
    }
}

impl fmt::Display for KSClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Indecomposables over `F_p` with their Hom table.
#[derive(Debug, Clone)]
pub struct IndecTable {
    pub p: u64,
    pub shape: QuiverShape,
    pub reps: Vec<FqRep>,
    pub hom: Vec<Vec<i64>>,
    hom_inv: Vec<Vec<Rational>>,
}

impl IndecTable {
    /// Decompose `m` into indecomposables via `dim Hom(M(beta), m)`.
    pub fn decompose(&self, m: &FqRep) -> Result<KSClass, FinrepError> {
        let f: Vec<i64> = self.reps.iter().map(|r| hom_dim(r, m) as i64).collect();
        self.solve_fingerprint(&f, &m.dim_vector())
    }

    fn solve_fingerprint(&self, f: &[i64], dims: &[i64]) -> Result<KSClass, FinrepError> {
        let n = self.reps.len();
        let mut out = vec![0u32; n];
        for g in 0..n {
            let mut s = Rational::zero();
            for b in 0..n {
                if f[b] != 0 {
                    s += &self.hom_inv[g][b] * Rational::from_integer(BigInt::from(f[b]));
                }
            }
            if !s.is_integer() || s.is_negative() {
                return Err(FinrepError::NotAModule(format!("fingerprint {:?} has no class", f)));
            }
            out[g] = s.to_integer().to_u32().ok_or_else(|| FinrepError::NotAModule("multiplicity overflow".into()))?;
        }
        let mut d = vec![0i64; dims.len()];
        for (g, &m) in out.iter().enumerate() {
            for (i, x) in self.reps[g].dims.iter().enumerate() {
                d[i] += m as i64 * *x as i64;
            }
        }
        if d != dims {
            return Err(FinrepError::NotAModule(format!("fingerprint gives dimension {:?}, module has {:?}", d, dims)));
        }
        Ok(KSClass(out))
    }

    /// The module `M(lambda)` as an explicit direct sum.
    pub fn module(&self, lambda: &KSClass) -> FqRep {
        let mut m = FqRep::zero(&self.shape, self.p);
        for (k, &mult) in lambda.0.iter().enumerate() {
            for _ in 0..mult {
                m = m.direct_sum(&self.reps[k]);
            }
        }
        m
    }
}

/// Apply the source reflection functor at `k` (a source of the quiver whose
/// arrows are listed in `rep.arrows`); the result lives on the quiver with
/// the arrows at `k` reversed, arrow indices preserved.
fn source_reflection(rep: &FqRep, k: usize) -> FqRep {
    let p = rep.p;
    let out: Vec<usize> = (0..rep.arrows.len()).filter(|&a| rep.arrows[a].0 == k).collect();
    debug_assert!(rep.arrows.iter().all(|&(_, t)| t != k), "vertex is not a source");
    let big: usize = out.iter().map(|&a| rep.dims[rep.arrows[a].1]).sum();
    let mut psi = Mat::zeros(big, rep.dims[k]);
    let mut row = 0;
    for &a in &out {
        psi.set_block(row, 0, &rep.maps[a]);
        row += rep.maps[a].rows;
    }
    let c = psi.left_nullspace(p);
    let new_dim = c.rows;
    let mut dims = rep.dims.clone();
    dims[k] = new_dim;
    let mut arrows = rep.arrows.clone();
    let mut maps = rep.maps.clone();
    let mut col = 0;
    for &a in &out {
        let j = rep.arrows[a].1;
        arrows[a] = (j, k);
        maps[a] = c.block(0, col, new_dim, rep.dims[j]);
        col += rep.dims[j];
    }
    FqRep { p, arrows, dims, maps }
}

/// Build one indecomposable per positive root over `F_p`.
pub fn build_indecomposables(datum: &RootDatum, p: u64) -> IndecTable {
    let shape = &datum.shape;
    let n = shape.num_vertices();
    let n_roots = datum.roots.len();
    let seq = shape.sink_sequence();
    let mut quivers = vec![shape.clone()];
    let mut reps: Vec<Option<FqRep>> = vec![None; n_roots];
    let mut found = 0;
    let mut k = 0;
    while found < n_roots {
        assert!(k < n_roots * 2 + n, "reflection chain failed to reach every root");
        let jk = seq[k % n];
        let word: Vec<usize> = (0..k).map(|m| seq[m % n]).collect();
        let beta = datum.apply_word(&word, &shape.unit(jk));
        if beta.iter().all(|&x| x >= 0) {
            if let Some(idx) = datum.root_index(&beta) {
                if reps[idx].is_none() {
                    while quivers.len() <= k {
                        let last = quivers.last().unwrap().clone();
                        quivers.push(last.reflect_at(seq[(quivers.len() - 1) % n]));
                    }
                    let mut m = FqRep::simple(&quivers[k], jk, p);
                    for mm in (0..k).rev() {
                        m = source_reflection(&m, seq[mm % n]);
                    }
                    debug_assert_eq!(m.arrows, shape.arrows());
                    assert_eq!(m.dim_vector(), beta, "reflection functor produced the wrong dimension");
                    reps[idx] = Some(m);
                    found += 1;
                }
            }
        }
        k += 1;
    }
    let reps: Vec<FqRep> = reps.into_iter().map(|r| r.unwrap()).collect();
    let hom: Vec<Vec<i64>> = reps
        .iter()
        .map(|a| reps.iter().map(|b| hom_dim(a, b) as i64).collect())
        .collect();
    let hom_inv = crate::ratfunc::invert(
        &hom.iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
            .collect::<Vec<Vec<Rational>>>(),
    )
    .expect("Hom table of indecomposables is invertible");
    // hom_inv solves f = H^T-free form: f_b = sum_g hom[b][g] lambda_g, so lambda = H^{-1} f.
    IndecTable { p, shape: shape.clone(), reps, hom, hom_inv }
}

/// Options controlling the extension census.
#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    pub cap: u128,
    /// Enumerate only projective points, weighting nonzero classes by `q - 1`.
    pub projective: bool,
    /// Add a pseudo-random coboundary to every representative (seeded).
    pub perturb: Option<u64>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_CENSUS_CAP, projective: true, perturb: None }
    }
}

/// Middle-term counts over `Ext^1(X, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub counts: BTreeMap<KSClass, u64>,
    pub ext_dim: usize,
    pub hom_dim: usize,
}

/// Shape-level data: root datum, Hom table and cached per-prime tables.
#[derive(Debug)]
pub struct RepCategory {
    pub datum: RootDatum,
    pub hom: Vec<Vec<i64>>,
    tables: Mutex<HashMap<u64, Arc<IndecTable>>>,
    degree_cache: Mutex<HashMap<Vec<i64>, Arc<Vec<KSClass>>>>,
}

impl RepCategory {
    pub fn new(shape: QuiverShape) -> Self {
        let datum = RootDatum::new(shape);
        let t2 = Arc::new(build_indecomposables(&datum, 2));
        let hom = t2.hom.clone();
        let mut tables = HashMap::new();
        tables.insert(2, t2);
        Self { datum, hom, tables: Mutex::new(tables), degree_cache: Mutex::new(HashMap::new()) }
    }

    pub fn shape(&self) -> &QuiverShape {
        &self.datum.shape
    }

    pub fn n_roots(&self) -> usize {
        self.datum.roots.len()
    }

    pub fn table(&self, p: u64) -> Arc<IndecTable> {
        if let Some(t) = self.tables.lock().unwrap().get(&p) {
            return t.clone();
        }
        let t = Arc::new(build_indecomposables(&self.datum, p));
        assert_eq!(t.hom, self.hom, "Hom table depends on the prime");
        self.tables.lock().unwrap().entry(p).or_insert(t).clone()
    }

    pub fn simple_class(&self, i: usize) -> KSClass {
        let idx = self.datum.root_index(&self.shape().unit(i)).expect("simple roots are roots");
        KSClass::single(self.n_roots(), idx)
    }

    pub fn dim_vector(&self, l: &KSClass) -> Vec<i64> {
        l.dim_vector(&self.datum)
    }

    pub fn total_dim(&self, l: &KSClass) -> i64 {
        self.dim_vector(l).iter().sum()
    }

    /// `dim Hom(M(lambda), M(mu))`.
    pub fn hom_classes(&self, l: &KSClass, m: &KSClass) -> i64 {
        let mut s = 0;
        for (b, &x) in l.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (g, &y) in m.0.iter().enumerate() {
                s += x as i64 * y as i64 * self.hom[b][g];
            }
        }
        s
    }

    pub fn euler(&self, l: &KSClass, m: &KSClass) -> i64 {
        self.datum.euler_form(&self.dim_vector(l), &self.dim_vector(m))
    }

    pub fn ext_classes(&self, l: &KSClass, m: &KSClass) -> i64 {
        self.hom_classes(l, m) - self.euler(l, m)
    }

    pub fn end_dim(&self, l: &KSClass) -> i64 {
        self.hom_classes(l, l)
    }

    /// `|Aut M_q(lambda)|`.
    pub fn aut_order(&self, l: &KSClass, q: u64) -> BigInt {
        let sq: i64 = l.0.iter().map(|&m| (m as i64) * (m as i64)).sum();
        let qb = BigInt::from(q);
        let mut r = num_traits::pow(qb.clone(), (self.end_dim(l) - sq) as usize);
        for &m in &l.0 {
            r *= gl_order(m as usize, q);
        }
        r
    }

    /// `a_lambda(q)` as a polynomial in `q`, embedded at `q = v^2`.
    pub fn aut_scalar(&self, l: &KSClass) -> ScalarHalf {
        let sq: i64 = l.0.iter().map(|&m| (m as i64) * (m as i64)).sum();
        let mut r = ScalarHalf::v_pow(2 * (self.end_dim(l) - sq) as i32);
        for &m in &l.0 {
            for k in 0..m as i32 {
                r = r * (ScalarHalf::v_pow(2 * m as i32) - ScalarHalf::v_pow(2 * k));
            }
        }
        r
    }

    pub fn aut_poly(&self, l: &KSClass) -> QPolynomial {
        let s = self.aut_scalar(l);
        let max = s.max_exp().unwrap_or(0);
        let mut coeffs = vec![Rational::zero(); (max / 4 + 1) as usize];
        for (e, c) in s.terms() {
            coeffs[(e / 4) as usize] = c.clone();
        }
        QPolynomial::new(coeffs)
    }

    /// `dim Hom(lambda, M(beta)) >= dim Hom(mu, M(beta))` for every root.
    pub fn hom_leq(&self, l: &KSClass, m: &KSClass) -> Result<bool, FinrepError> {
        let (dl, dm) = (self.dim_vector(l), self.dim_vector(m));
        if dl != dm {
            return Err(FinrepError::DimMismatch(dl, dm));
        }
        Ok((0..self.n_roots()).all(|b| {
            let e = KSClass::single(self.n_roots(), b);
            self.hom_classes(l, &e) >= self.hom_classes(m, &e)
        }))
    }

    /// Strict degeneration order `lambda < mu`.
    pub fn prec(&self, l: &KSClass, m: &KSClass) -> bool {
        l != m && self.hom_leq(l, m).unwrap_or(false)
    }

    /// All classes of dimension vector `d`, sorted.
    pub fn classes_of_degree(&self, d: &[i64]) -> Arc<Vec<KSClass>> {
        if let Some(c) = self.degree_cache.lock().unwrap().get(d) {
            return c.clone();
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.n_roots()];
        self.fill_classes(0, d.to_vec(), &mut cur, &mut out);
        out.sort();
        let out = Arc::new(out);
        self.degree_cache.lock().unwrap().insert(d.to_vec(), out.clone());
        out
    }

    fn fill_classes(&self, k: usize, rem: Vec<i64>, cur: &mut Vec<u32>, out: &mut Vec<KSClass>) {
        if rem.iter().all(|&x| x == 0) {
            out.push(KSClass(cur.clone()));
            return;
        }
        if k == self.n_roots() {
            return;
        }
        let root = &self.datum.roots[k];
        let mut m = 0u32;
        let mut r = rem.clone();
        loop {
            cur[k] = m;
            self.fill_classes(k + 1, r.clone(), cur, out);
            for (x, y) in r.iter_mut().zip(root) {
                *x -= y;
            }
            if r.iter().any(|&x| x < 0) {
                break;
            }
            m += 1;
        }
        cur[k] = 0;
    }

    /// Count middle terms over `Ext^1(X, Z)` at the prime `p`.
    pub fn ext_census(&self, x: &KSClass, z: &KSClass, p: u64, opts: CensusOptions) -> Result<Census, FinrepError> {
        let table = self.table(p);
        let xm = table.module(x);
        let zm = table.module(z);
        let delta = delta_matrix(&xm, &zm);
        let rank = delta.rank(p);
        let hom_dim = delta.cols - rank;
        let comp = fp::complement_indices(&delta.transpose(), p);
        let e = comp.len();
        if e as i64 != self.ext_classes(x, z) || hom_dim as i64 != self.hom_classes(x, z) {
            return Err(FinrepError::Inconsistent("Hom/Ext dimensions disagree with the Hom table".into()));
        }
        let needed = (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        if needed > opts.cap {
            return Err(FinrepError::CensusCap { needed, cap: opts.cap });
        }
        let arrow_len = delta.rows;
        let points: Vec<(Vec<u64>, u64)> = if opts.projective {
            let mut v = vec![(vec![0u64; e], 1u64)];
            v.extend(fp::projective_points(e, p).map(|x| (x, p - 1)));
            v
        } else {
            fp::all_vectors(e, p).map(|x| (x, 1)).collect()
        };
        let perturb = opts.perturb;
        let results: Result<Vec<(KSClass, u64)>, FinrepError> = points
            .into_par_iter()
            .enumerate()
            .map(|(idx, (coords, weight))| {
                let mut eta = vec![0u64; arrow_len];
                for (c, &pos) in coords.iter().zip(&comp) {
                    eta[pos] = *c;
                }
                if let Some(seed) = perturb {
                    let mut rng = fp::SplitMix(seed ^ (idx as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
                    for col in 0..delta.cols {
                        let f = rng.below(p);
                        if f != 0 {
                            for (r, x) in eta.iter_mut().enumerate() {
                                *x = (*x + f * delta.get(r, col)) % p;
                            }
                        }
                    }
                }
                let y = extension(&xm, &zm, &eta);
                Ok((table.decompose(&y)?, weight))
            })
            .collect();
        let mut counts = BTreeMap::new();
        for (k, w) in results? {
            *counts.entry(k).or_insert(0u64) += w;
        }
        Ok(Census { counts, ext_dim: e, hom_dim })
    }

    /// Riedtmann-Peng conversion `F = G a_Y / (a_X a_Z)`, asserted integral.
    pub fn hall_number_f(&self, x: &KSClass, z: &KSClass, y: &KSClass, p: u64) -> Result<BigInt, FinrepError> {
        let c = self.ext_census(x, z, p, CensusOptions::default())?;
        let count = BigInt::from(*c.counts.get(y).unwrap_or(&0));
        let num = count * self.aut_order(y, p);
        let den = num_traits::pow(BigInt::from(p), c.hom_dim) * self.aut_order(x, p) * self.aut_order(z, p);
        if (&num % &den) != BigInt::zero() {
            return Err(FinrepError::Inconsistent(format!("Hall number {}/{} is not an integer", num, den)));
        }
        let f = num / den;
        if f.is_negative() {
            return Err(FinrepError::Inconsistent("negative Hall number".into()));
        }
        Ok(f)
    }
}

/// `|GL_m(F_q)|`.
pub fn gl_order(m: usize, q: u64) -> BigInt {
    let qb = BigInt::from(q);
    let qm = num_traits::pow(qb.clone(), m);
    let mut r = BigInt::one();
    let mut qk = BigInt::one();
    for _ in 0..m {
        r *= &qm - &qk;
        qk *= &qb;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> RepCategory {
        RepCategory::new(QuiverShape::linear_a(2))
    }

    #[test]
    fn a2_indecomposables() {
        let c = a2();
        let t = c.table(3);
        assert_eq!(t.reps.len(), 3);
        let p1 = &t.reps[2];
        assert_eq!(p1.dims, vec![1, 1]);
        assert_eq!(p1.maps[0].get(0, 0) % 3 != 0, true);
        for (k, r) in t.reps.iter().enumerate() {
            assert_eq!(t.decompose(r).unwrap(), KSClass::single(3, k));
            assert_eq!(c.hom[k][k], 1);
        }
    }

    #[test]
    fn a2_hom_and_ext() {
        let c = a2();
        let t = c.table(5);
        let (s1, s2, p1) = (&t.reps[0], &t.reps[1], &t.reps[2]);
        assert_eq!(hom_dim(p1, s1), 1);
        assert_eq!(hom_dim(s1, s2), 0);
        assert_eq!(ext_dim(s1, s2), 1);
        assert_eq!(ext_dim(s2, s1), 0);
    }

    #[test]
    fn census_examples() {
        let c = a2();
        let (s1, s2) = (c.simple_class(0), c.simple_class(1));
        let cen = c.ext_census(&s1, &s2, 2, CensusOptions::default()).unwrap();
        assert_eq!(cen.counts.len(), 2);
        assert_eq!(cen.counts[&s1.add(&s2)], 1);
        assert_eq!(cen.counts[&KSClass::single(3, 2)], 1);
        let back = c.ext_census(&s2, &s1, 2, CensusOptions::default()).unwrap();
        assert_eq!(back.counts.len(), 1);
        let a1 = RepCategory::new(QuiverShape::linear_a(1));
        let s = a1.simple_class(0);
        let cen = a1.ext_census(&s, &s, 3, CensusOptions::default()).unwrap();
        assert_eq!(cen.counts[&s.scale(2)], 1);
    }

    #[test]
    fn census_cap_error() {
        let c = a2();
        let x = c.simple_class(0).scale(5);
        let z = c.simple_class(1).scale(5);
        let opts = CensusOptions { cap: 1000, ..Default::default() };
        assert!(matches!(c.ext_census(&x, &z, 2, opts), Err(FinrepError::CensusCap { .. })));
    }

    #[test]
    fn hall_numbers() {
        let c = a2();
        let (s1, s2) = (c.simple_class(0), c.simple_class(1));
        let p1 = KSClass::single(3, 2);
        assert_eq!(c.hall_number_f(&s1, &s2, &p1, 2).unwrap(), BigInt::from(1));
        assert_eq!(c.hall_number_f(&s1, &s2, &s1.add(&s2), 2).unwrap(), BigInt::from(1));
        let a1 = RepCategory::new(QuiverShape::linear_a(1));
        let s = a1.simple_class(0);
        assert_eq!(a1.hall_number_f(&s, &s, &s.scale(2), 3).unwrap(), BigInt::from(4));
    }

    #[test]
    fn aut_orders() {
        let a1 = RepCategory::new(QuiverShape::linear_a(1));
        let s = a1.simple_class(0);
        assert_eq!(a1.aut_order(&s, 5), BigInt::from(4));
        assert_eq!(a1.aut_order(&s.scale(2), 3), BigInt::from((9 - 1) * (9 - 3)));
        let c = a2();
        assert_eq!(c.aut_order(&c.simple_class(0).add(&c.simple_class(1)), 3), BigInt::from(4));
        let p = c.aut_scalar(&s_sum(&c));
        assert_eq!(p, (ScalarHalf::v_pow(2) - ScalarHalf::one()).pow(2));
    }

    fn s_sum(c: &RepCategory) -> KSClass {
        c.simple_class(0).add(&c.simple_class(1))
    }

    #[test]
    fn degeneration_order() {
        let c = a2();
        let ss = s_sum(&c);
        let p1 = KSClass::single(3, 2);
        assert!(c.prec(&ss, &p1));
        assert!(!c.prec(&p1, &ss));
        assert!(!c.prec(&ss, &ss));
        assert!(c.hom_leq(&ss, &c.simple_class(0)).is_err());
    }

    #[test]
    fn classes_enumerated() {
        let c = a2();
        assert_eq!(c.classes_of_degree(&[1, 1]).len(), 2);
        assert_eq!(c.classes_of_degree(&[3, 3]).len(), 4);
        assert_eq!(c.classes_of_degree(&[0, 0]).len(), 1);
    }

    #[test]
    fn class_parse_roundtrip() {
        let c = a2();
        let k = KSClass::parse("a1 + (1,1)", &c.datum).unwrap();
        assert_eq!(k.format(&c.datum), "(1,0)+(1,1)");
        assert_eq!(KSClass::parse(&k.format(&c.datum), &c.datum).unwrap(), k);
        assert_eq!(KSClass::parse("2*a2", &c.datum).unwrap(), c.simple_class(1).scale(2));
        assert!(KSClass::parse("(2,1)", &c.datum).is_err());
    }

    #[test]
    fn d4_and_e6_tables() {
        for t in [crate::cartan::DynkinType::D(4), crate::cartan::DynkinType::E(6)] {
            let c = RepCategory::new(QuiverShape::default_of(t).unwrap());
            let tab = c.table(2);
            for (k, r) in tab.reps.iter().enumerate() {
                assert_eq!(r.dim_vector(), c.datum.roots[k]);
                assert_eq!(c.hom[k][k], 1);
            }
        }
    }
}
