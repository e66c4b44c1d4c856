//! Modules over the iquiver algebra over `F_p`: construction of the
//! algebra, module enumeration, projectives and syzygies, comparison in the
//! singularity category, and extension counts for the Hall product.

pub mod generic;

use crate::cartan::{DiagramInvolution, QuiverShape};
use crate::fp::{self, Mat};
use crate::scalars::{rat, Rational, ScalarError};
use num_traits::Zero;
use std::collections::BTreeMap;

pub use generic::{IBasis, IHallElt, QSqrt, SplitRankOne};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IHallError {
    #[error("not an iquiver: {0}")]
    Involution(String),
    #[error("module violates the relations: {0}")]
    Relation(String),
    #[error("outside the covered range: {0}")]
    Coverage(String),
    #[error("enumeration needs {needed} cases, cap is {cap}")]
    Cap { needed: u128, cap: u128 },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("Hall basis reduction failed: {0}")]
    Reduction(String),
    #[error("triangularization: {0}")]
    Triangle(String),
}

pub const DEFAULT_CAP: u128 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ArrowKind {
    /// An arrow of the original quiver, by index.
    Quiver(usize),
    /// `eps_i : i -> rho i`.
    Eps(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LArrow {
    pub src: usize,
    pub dst: usize,
    pub kind: ArrowKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Nilpotent,
    Commutative,
}

/// `sum c * path`, paths listed in traversal order (first arrow first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LRelation {
    pub kind: RelationKind,
    pub src: usize,
    pub dst: usize,
    pub terms: Vec<(i64, Vec<usize>)>,
}

/// The iquiver algebra: the doubled quiver with `eps` arrows and its
/// nilpotent and commutative relations.
#[derive(Debug, Clone)]
pub struct IQuiverAlgebra {
    pub shape: QuiverShape,
    pub rho: DiagramInvolution,
    pub arrows: Vec<LArrow>,
    pub relations: Vec<LRelation>,
    eps: Vec<usize>,
}

impl IQuiverAlgebra {
    pub fn build(shape: &QuiverShape, rho: &DiagramInvolution) -> Result<Self, IHallError> {
        let n = shape.num_vertices();
        if rho.perm().len() != n {
            return Err(IHallError::Involution("rank mismatch".into()));
        }
        if !rho.is_quiver_automorphism(shape) {
            return Err(IHallError::Involution("rho does not map arrows to arrows".into()));
        }
        let cartan = shape.cartan_matrix();
        for i in 0..n {
            let r = rho.apply(i);
            if r != i && cartan[i][r] != 0 {
                return Err(IHallError::Involution(format!("c_{{{},{}}} != 0", i + 1, r + 1)));
            }
        }
        let mut arrows: Vec<LArrow> = shape
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, &(s, t))| LArrow { src: s, dst: t, kind: ArrowKind::Quiver(a) })
            .collect();
        let mut eps = Vec::with_capacity(n);
        for i in 0..n {
            eps.push(arrows.len());
            arrows.push(LArrow { src: i, dst: rho.apply(i), kind: ArrowKind::Eps(i) });
        }
        let mut relations = Vec::new();
        for i in 0..n {
            relations.push(LRelation {
                kind: RelationKind::Nilpotent,
                src: i,
                dst: i,
                terms: vec![(1, vec![eps[i], eps[rho.apply(i)]])],
            });
        }
        for (a, &(s, t)) in shape.arrows().iter().enumerate() {
            let (rs, rt) = (rho.apply(s), rho.apply(t));
            let b = shape.arrows().iter().position(|&x| x == (rs, rt)).expect("automorphism checked");
            relations.push(LRelation {
                kind: RelationKind::Commutative,
                src: s,
                dst: rt,
                terms: vec![(1, vec![a, eps[t]]), (-1, vec![eps[s], b])],
            });
        }
        Ok(Self { shape: shape.clone(), rho: rho.clone(), arrows, relations, eps })
    }

    pub fn num_vertices(&self) -> usize {
        self.shape.num_vertices()
    }

    pub fn eps(&self, i: usize) -> usize {
        self.eps[i]
    }

    pub fn is_split(&self, i: usize) -> bool {
        self.rho.apply(i) == i
    }

    fn arrow_name(&self, a: usize) -> String {
        match self.arrows[a].kind {
            ArrowKind::Quiver(k) => {
                let (s, t) = self.shape.arrows()[k];
                format!("a{}{}", s + 1, t + 1)
            }
            ArrowKind::Eps(i) => format!("e{}", i + 1),
        }
    }

    /// Human-readable generators and relations (paths written right to left).
    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .arrows
            .iter()
            .enumerate()
            .map(|(a, x)| format!("{}: {} -> {}", self.arrow_name(a), x.src + 1, x.dst + 1))
            .collect();
        for r in &self.relations {
            let terms: Vec<String> = r
                .terms
                .iter()
                .map(|(c, path)| {
                    let word: Vec<String> = path.iter().rev().map(|&a| self.arrow_name(a)).collect();
                    format!("{}{}", if *c < 0 { "-" } else { "+" }, word.join(" "))
                })
                .collect();
            out.push(format!("{:?}: {} = 0", r.kind, terms.join(" ")));
        }
        out
    }

    /// Simple module at `i`.
    pub fn simple(&self, i: usize, p: u64) -> LambdaModule {
        let mut dims = vec![0; self.num_vertices()];
        dims[i] = 1;
        LambdaModule::new(self, p, dims)
    }

    /// The generalized simple `E_i`.
    pub fn generalized_simple(&self, i: usize, p: u64) -> LambdaModule {
        let r = self.rho.apply(i);
        let mut dims = vec![0; self.num_vertices()];
        let mut m;
        if r == i {
            dims[i] = 2;
            m = LambdaModule::new(self, p, dims);
            m.maps[self.eps[i]].set(1, 0, 1);
        } else {
            dims[i] = 1;
            dims[r] = 1;
            m = LambdaModule::new(self, p, dims);
            m.maps[self.eps[i]].set(0, 0, 1);
        }
        m
    }

    /// Paths starting at `i` of length at most `len`, shortest first.
    fn paths_from(&self, i: usize, len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for path in &layer {
                let end = path.last().map_or(i, |&a| self.arrows[a].dst);
                for (a, x) in self.arrows.iter().enumerate() {
                    if x.src == end {
                        let mut q = path.clone();
                        q.push(a);
                        next.push(q);
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn path_end(&self, start: usize, path: &[usize]) -> usize {
        path.last().map_or(start, |&a| self.arrows[a].dst)
    }

    /// Indecomposable projective `P_i = Lambda e_i` with its basis of paths.
    pub fn projective(&self, i: usize, p: u64) -> Result<Projective, IHallError> {
        for len in 2..=12 {
            let paths = self.paths_from(i, len);
            let index: BTreeMap<&Vec<usize>, usize> = paths.iter().enumerate().map(|(k, x)| (x, k)).collect();
            // columns ordered longest first so that short paths survive as the basis
            let ncol = paths.len();
            let col = |k: usize| ncol - 1 - k;
            let mut rows: Vec<Vec<u64>> = Vec::new();
            for pre in &paths {
                let s = self.path_end(i, pre);
                for r in self.relations.iter().filter(|r| r.src == s) {
                    let rlen = r.terms[0].1.len();
                    if pre.len() + rlen > len {
                        continue;
                    }
                    for post in self.paths_from(r.dst, len - pre.len() - rlen) {
                        let mut row = vec![0u64; ncol];
                        for (c, t) in &r.terms {
                            let mut full = pre.clone();
                            full.extend(t);
                            full.extend(&post);
                            let k = index[&full];
                            row[col(k)] = (row[col(k)] + c.rem_euclid(p as i64) as u64) % p;
                        }
                        rows.push(row);
                    }
                }
            }
            let mut ideal = if rows.is_empty() { Mat::zeros(0, ncol) } else { Mat::from_rows(&rows) };
            let pivots = ideal.rref(p);
            let longest: Vec<usize> = (0..paths.len()).filter(|&k| paths[k].len() == len).collect();
            if !longest.iter().all(|&k| pivots.contains(&col(k))) {
                continue;
            }
            let basis: Vec<usize> = (0..paths.len()).filter(|&k| !pivots.contains(&col(k))).collect();
            let reduce = |path: &Vec<usize>| -> Vec<u64> {
                let mut x = vec![0u64; ncol];
                if let Some(&k) = index.get(path) {
                    x[col(k)] = 1;
                }
                for (r, &pc) in pivots.iter().enumerate() {
                    let f = x[pc];
                    if f != 0 {
                        for c in 0..ncol {
                            x[c] = (x[c] + (p - f) * ideal.get(r, c)) % p;
                        }
                    }
                }
                basis.iter().map(|&k| x[col(k)]).collect()
            };
            let n = self.num_vertices();
            let mut at: Vec<Vec<usize>> = vec![vec![]; n];
            for (pos, &k) in basis.iter().enumerate() {
                at[self.path_end(i, &paths[k])].push(pos);
            }
            let dims: Vec<usize> = at.iter().map(|v| v.len()).collect();
            let mut module = LambdaModule::new(self, p, dims);
            for (a, x) in self.arrows.iter().enumerate() {
                for (c, &pos) in at[x.src].iter().enumerate() {
                    let mut q = paths[basis[pos]].clone();
                    q.push(a);
                    let img = if q.len() > len { vec![0; basis.len()] } else { reduce(&q) };
                    for (r, &pos2) in at[x.dst].iter().enumerate() {
                        module.maps[a].set(r, c, img[pos2]);
                    }
                }
            }
            let basis_paths = at.iter().map(|v| v.iter().map(|&pos| paths[basis[pos]].clone()).collect()).collect();
            module.check(self)?;
            return Ok(Projective { vertex: i, module, paths: basis_paths });
        }
        Err(IHallError::Coverage("path algebra did not terminate by length 12".into()))
    }

    pub fn projectives(&self, p: u64) -> Result<Vec<Projective>, IHallError> {
        (0..self.num_vertices()).map(|i| self.projective(i, p)).collect()
    }
}

/// `P_i` with the path attached to each basis vector.
#[derive(Debug, Clone)]
pub struct Projective {
    pub vertex: usize,
    pub module: LambdaModule,
    pub paths: Vec<Vec<Vec<usize>>>,
}

/// A representation of the doubled quiver over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LambdaModule {
    pub p: u64,
    pub dims: Vec<usize>,
    pub maps: Vec<Mat>,
}

fn neg(x: u64, p: u64) -> u64 {
    (p - x % p) % p
}

impl LambdaModule {
    /// All maps zero.
    pub fn new(alg: &IQuiverAlgebra, p: u64, dims: Vec<usize>) -> Self {
        let maps = alg.arrows.iter().map(|a| Mat::zeros(dims[a.dst], dims[a.src])).collect();
        Self { p, dims, maps }
    }

    pub fn with_maps(alg: &IQuiverAlgebra, p: u64, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self, IHallError> {
        let m = Self { p, dims, maps };
        m.check(alg)?;
        Ok(m)
    }

    pub fn check(&self, alg: &IQuiverAlgebra) -> Result<(), IHallError> {
        if self.maps.len() != alg.arrows.len() {
            return Err(IHallError::Relation("wrong number of maps".into()));
        }
        for (a, x) in alg.arrows.iter().enumerate() {
            if self.maps[a].rows != self.dims[x.dst] || self.maps[a].cols != self.dims[x.src] {
                return Err(IHallError::Relation(format!("map {} has the wrong shape", a)));
            }
        }
        for r in &alg.relations {
            if !self.relation_matrix(alg, r).is_zero() {
                return Err(IHallError::Relation(format!("{:?} relation at {} -> {}", r.kind, r.src + 1, r.dst + 1)));
            }
        }
        Ok(())
    }

    pub fn path_matrix(&self, _alg: &IQuiverAlgebra, start: usize, path: &[usize]) -> Mat {
        let mut m = Mat::identity(self.dims[start]);
        for &a in path {
            m = self.maps[a].mul(&m, self.p);
        }
        m
    }

    pub fn relation_matrix(&self, alg: &IQuiverAlgebra, r: &LRelation) -> Mat {
        let p = self.p;
        let mut out = Mat::zeros(self.dims[r.dst], self.dims[r.src]);
        for (c, path) in &r.terms {
            let m = self.path_matrix(alg, r.src, path);
            let c = c.rem_euclid(p as i64) as u64;
            for (o, x) in out.data.iter_mut().zip(&m.data) {
                *o = (*o + c * x) % p;
            }
        }
        out
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn dim_vector(&self) -> Vec<i64> {
        self.dims.iter().map(|&d| d as i64).collect()
    }

    pub fn direct_sum(&self, other: &LambdaModule) -> LambdaModule {
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(x, y)| {
                let mut m = Mat::zeros(x.rows + y.rows, x.cols + y.cols);
                m.set_block(0, 0, x);
                m.set_block(x.rows, x.cols, y);
                m
            })
            .collect();
        LambdaModule { p: self.p, dims, maps }
    }

    pub fn power(&self, alg: &IQuiverAlgebra, k: usize) -> LambdaModule {
        (0..k).fold(LambdaModule::new(alg, self.p, vec![0; self.dims.len()]), |acc, _| acc.direct_sum(self))
    }

    /// Ranks of the `eps` maps: with the dimensions they determine the
    /// restriction to the radical-square-zero subalgebra up to isomorphism.
    pub fn res_h(&self, alg: &IQuiverAlgebra) -> (Vec<usize>, Vec<usize>) {
        let ranks = (0..alg.num_vertices()).map(|i| self.maps[alg.eps(i)].rank(self.p)).collect();
        (self.dims.clone(), ranks)
    }
}

fn offsets(rows: &[usize], cols: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for (r, c) in rows.iter().zip(cols) {
        off.push(off.last().unwrap() + r * c);
    }
    off
}

/// Matrix of `h -> (h_t M_a - N_a h_s)_a`: its kernel is `Hom(M, N)` and its
/// image the coboundaries in the arrow space `(+)_a Hom_k(M_s, N_t)`.
pub fn delta_matrix(alg: &IQuiverAlgebra, m: &LambdaModule, n: &LambdaModule) -> Mat {
    let p = m.p;
    let hoff = offsets(&n.dims, &m.dims);
    let arows: Vec<usize> = alg.arrows.iter().map(|a| n.dims[a.dst]).collect();
    let acols: Vec<usize> = alg.arrows.iter().map(|a| m.dims[a.src]).collect();
    let eoff = offsets(&arows, &acols);
    let mut d = Mat::zeros(*eoff.last().unwrap(), *hoff.last().unwrap());
    for (a, x) in alg.arrows.iter().enumerate() {
        let (s, t) = (x.src, x.dst);
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                let row = eoff[a] + r * m.dims[s] + c;
                for k in 0..m.dims[t] {
                    let v = m.maps[a].get(k, c);
                    if v != 0 {
                        let col = hoff[t] + r * m.dims[t] + k;
                        d.set(row, col, (d.get(row, col) + v) % p);
                    }
                }
                for k in 0..n.dims[s] {
                    let v = n.maps[a].get(r, k);
                    if v != 0 {
                        let col = hoff[s] + k * m.dims[s] + c;
                        d.set(row, col, (d.get(row, col) + neg(v, p)) % p);
                    }
                }
            }
        }
    }
    d
}

pub fn hom_dim(alg: &IQuiverAlgebra, m: &LambdaModule, n: &LambdaModule) -> usize {
    let d = delta_matrix(alg, m, n);
    d.cols - d.rank(m.p)
}

/// Per-vertex blocks of a Hom element given in the flattened coordinates.
fn hom_blocks(m: &LambdaModule, n: &LambdaModule, h: &[u64]) -> Vec<Mat> {
    let hoff = offsets(&n.dims, &m.dims);
    (0..m.dims.len())
        .map(|i| {
            let mut b = Mat::zeros(n.dims[i], m.dims[i]);
            b.data.copy_from_slice(&h[hoff[i]..hoff[i + 1]]);
            b
        })
        .collect()
}

/// Isomorphism test by searching `Hom(M, N)` for an invertible element.
pub fn is_iso(alg: &IQuiverAlgebra, m: &LambdaModule, n: &LambdaModule, cap: u128) -> Result<bool, IHallError> {
    if m.dims != n.dims {
        return Ok(false);
    }
    if m.res_h(alg) != n.res_h(alg) {
        return Ok(false);
    }
    let p = m.p;
    let basis = delta_matrix(alg, m, n).nullspace(p);
    let k = basis.len();
    if k != hom_dim(alg, m, m) || k != hom_dim(alg, n, n) {
        return Ok(false);
    }
    let needed = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(IHallError::Cap { needed, cap });
    }
    let len = basis.first().map_or(0, |b| b.len());
    for coeffs in fp::projective_points(k, p) {
        let mut h = vec![0u64; len];
        for (c, b) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                for (x, y) in h.iter_mut().zip(b) {
                    *x = (*x + c * y) % p;
                }
            }
        }
        if hom_blocks(m, n, &h).iter().all(|b| b.rows == 0 || b.inverse(p).is_some()) {
            return Ok(true);
        }
    }
    Ok(m.total_dim() == 0)
}

/// Invariants used to pre-sort modules before isomorphism tests.
fn fingerprint(alg: &IQuiverAlgebra, m: &LambdaModule) -> Vec<usize> {
    let mut out = m.dims.clone();
    let n = alg.num_vertices();
    for i in 0..n {
        for path in alg.paths_from(i, 3).iter().skip(1) {
            out.push(m.path_matrix(alg, i, path).rank(m.p));
        }
    }
    out.push(hom_dim(alg, m, m));
    out
}

/// One representative per isomorphism class of modules with dimension
/// vector `d`, by exhausting all matrix tuples.
pub fn enumerate_modules(alg: &IQuiverAlgebra, d: &[usize], p: u64, cap: u128) -> Result<Vec<LambdaModule>, IHallError> {
    let sizes: Vec<usize> = alg.arrows.iter().map(|a| d[a.dst] * d[a.src]).collect();
    let total: usize = sizes.iter().sum();
    let needed = (p as u128).checked_pow(total as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(IHallError::Cap { needed, cap });
    }
    let mut reps: Vec<(Vec<usize>, LambdaModule)> = Vec::new();
    for entries in fp::all_vectors(total, p) {
        let mut m = LambdaModule::new(alg, p, d.to_vec());
        let mut pos = 0;
        for (a, &s) in sizes.iter().enumerate() {
            m.maps[a].data.copy_from_slice(&entries[pos..pos + s]);
            pos += s;
        }
        if m.check(alg).is_err() {
            continue;
        }
        let f = fingerprint(alg, &m);
        let mut seen = false;
        for (g, r) in &reps {
            if *g == f && is_iso(alg, r, &m, cap)? {
                seen = true;
                break;
            }
        }
        if !seen {
            reps.push((f, m));
        }
    }
    Ok(reps.into_iter().map(|x| x.1).collect())
}

/// Solve `a x = b` for `a` of full column rank.
fn solve_columns(a: &Mat, b: &Mat, p: u64) -> Mat {
    let mut aug = Mat::zeros(a.rows, a.cols + b.cols);
    aug.set_block(0, 0, a);
    aug.set_block(0, a.cols, b);
    aug.rref(p);
    aug.block(0, a.cols, a.cols, b.cols)
}

fn columns(vs: &[Vec<u64>], rows: usize) -> Mat {
    let mut m = Mat::zeros(rows, vs.len());
    for (c, v) in vs.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            m.set(r, c, x);
        }
    }
    m
}

/// Projective cover `P -> M` assembled from copies of the `P_i`.
pub fn projective_cover(alg: &IQuiverAlgebra, m: &LambdaModule, projs: &[Projective]) -> (LambdaModule, Vec<Mat>) {
    let p = m.p;
    let n = alg.num_vertices();
    let mut cover = LambdaModule::new(alg, p, vec![0; n]);
    let mut phi: Vec<Mat> = (0..n).map(|v| Mat::zeros(m.dims[v], 0)).collect();
    for j in 0..n {
        let mut rad_rows: Vec<Vec<u64>> = Vec::new();
        for (a, x) in alg.arrows.iter().enumerate() {
            if x.dst == j {
                let t = m.maps[a].transpose();
                for r in 0..t.rows {
                    rad_rows.push(t.row(r).to_vec());
                }
            }
        }
        let rad = if rad_rows.is_empty() { Mat::zeros(0, m.dims[j]) } else { Mat::from_rows(&rad_rows) };
        for c in fp::complement_indices(&rad, p) {
            let pj = &projs[j];
            cover = cover.direct_sum(&pj.module);
            for v in 0..n {
                let mut block = Mat::zeros(m.dims[v], pj.module.dims[v]);
                for (k, path) in pj.paths[v].iter().enumerate() {
                    let img = m.path_matrix(alg, j, path);
                    for r in 0..m.dims[v] {
                        block.set(r, k, img.get(r, c));
                    }
                }
                let mut wide = Mat::zeros(m.dims[v], phi[v].cols + block.cols);
                wide.set_block(0, 0, &phi[v]);
                wide.set_block(0, phi[v].cols, &block);
                phi[v] = wide;
            }
        }
    }
    (cover, phi)
}

/// First syzygy: kernel of the projective cover.
pub fn syzygy(alg: &IQuiverAlgebra, m: &LambdaModule, projs: &[Projective]) -> LambdaModule {
    let p = m.p;
    let (cover, phi) = projective_cover(alg, m, projs);
    let n = alg.num_vertices();
    let kers: Vec<Mat> = (0..n).map(|v| columns(&phi[v].nullspace(p), cover.dims[v])).collect();
    let dims: Vec<usize> = kers.iter().map(|k| k.cols).collect();
    let mut out = LambdaModule::new(alg, p, dims);
    for (a, x) in alg.arrows.iter().enumerate() {
        let img = cover.maps[a].mul(&kers[x.src], p);
        out.maps[a] = solve_columns(&kers[x.dst], &img, p);
    }
    out
}

/// Integer solution of `sum_i c_i P_i = target` over dimension vectors.
fn projective_multiplicities(projs: &[Projective], target: &[i64]) -> Option<Vec<i64>> {
    let n = projs.len();
    let mut a: Vec<Vec<Rational>> = (0..target.len())
        .map(|v| {
            let mut row: Vec<Rational> = projs.iter().map(|pr| rat(pr.module.dims[v] as i64)).collect();
            row.push(rat(target[v]));
            row
        })
        .collect();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..a.len()).find(|&k| !a[k][c].is_zero()) else { continue };
        a.swap(r, k);
        let inv = rat(1) / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for k in 0..a.len() {
            if k != r && !a[k][c].is_zero() {
                let f = a[k][c].clone();
                for j in 0..=n {
                    let t = a[r][j].clone() * f.clone();
                    a[k][j] -= t;
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    if piv.len() < n || a[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut out = vec![0i64; n];
    for (k, &c) in piv.iter().enumerate() {
        let x = &a[k][n];
        if !x.is_integer() {
            return None;
        }
        out[c] = x.to_integer().try_into().ok()?;
    }
    Some(out)
}

/// `M ~ N` in the singularity category: the syzygies agree up to
/// projective summands. Relies on the iquiver algebra being 1-Gorenstein.
pub fn dsg_iso(alg: &IQuiverAlgebra, m: &LambdaModule, n: &LambdaModule, cap: u128) -> Result<bool, IHallError> {
    let projs = alg.projectives(m.p)?;
    let (x, y) = (syzygy(alg, m, &projs), syzygy(alg, n, &projs));
    let diff: Vec<i64> = x.dims.iter().zip(&y.dims).map(|(a, b)| *a as i64 - *b as i64).collect();
    let Some(mult) = projective_multiplicities(&projs, &diff) else { return Ok(false) };
    let (mut xs, mut ys) = (x, y);
    for (pr, &c) in projs.iter().zip(&mult) {
        if c < 0 {
            xs = xs.direct_sum(&pr.module.power(alg, c.unsigned_abs() as usize));
        } else if c.is_positive() {
            ys = ys.direct_sum(&pr.module.power(alg, c as usize));
        }
    }
    is_iso(alg, &xs, &ys, cap)
}

/// Extension counts over `Ext^1(M, N)` at one prime.
#[derive(Debug, Clone)]
pub struct ExtCensus<K: Ord> {
    pub hom_dim: usize,
    pub ext_dim: usize,
    /// Number of classes in `Ext^1(M, N)` with middle term of each type.
    pub counts: BTreeMap<K, u64>,
}

/// Middle term `L` of `0 -> N -> L -> M -> 0` with cocycle `eta`.
pub fn extension(alg: &IQuiverAlgebra, m: &LambdaModule, n: &LambdaModule, eta: &[u64]) -> LambdaModule {
    let dims: Vec<usize> = n.dims.iter().zip(&m.dims).map(|(a, b)| a + b).collect();
    let mut pos = 0;
    let maps = alg
        .arrows
        .iter()
        .enumerate()
        .map(|(a, x)| {
            let (s, t) = (x.src, x.dst);
            let mut l = Mat::zeros(dims[t], dims[s]);
            l.set_block(0, 0, &n.maps[a]);
            l.set_block(n.dims[t], n.dims[s], &m.maps[a]);
            for r in 0..n.dims[t] {
                for c in 0..m.dims[s] {
                    l.set(r, n.dims[s] + c, eta[pos]);
                    pos += 1;
                }
            }
            l
        })
        .collect();
    LambdaModule { p: m.p, dims, maps }
}

/// Census of middle terms, each classified by `classify`.
pub fn ext_census<K: Ord + Clone>(
    alg: &IQuiverAlgebra,
    m: &LambdaModule,
    n: &LambdaModule,
    cap: u128,
    classify: &dyn Fn(&LambdaModule) -> Result<K, IHallError>,
) -> Result<ExtCensus<K>, IHallError> {
    let p = m.p;
    let delta = delta_matrix(alg, m, n);
    let len = delta.rows;
    let hom = delta.cols - delta.rank(p);
    // cocycles: relations of the middle term, linear in eta
    let mut zsys_cols: Vec<Vec<u64>> = Vec::with_capacity(len);
    for k in 0..len {
        let mut eta = vec![0u64; len];
        eta[k] = 1;
        let l = extension(alg, m, n, &eta);
        let mut col = Vec::new();
        for r in &alg.relations {
            let rm = l.relation_matrix(alg, r);
            for i in 0..n.dims[r.dst] {
                for j in 0..m.dims[r.src] {
                    col.push(rm.get(i, n.dims[r.src] + j));
                }
            }
        }
        zsys_cols.push(col);
    }
    let zrows = zsys_cols.first().map_or(0, |c| c.len());
    let zsys = columns(&zsys_cols, zrows);
    let cocycles = if zrows == 0 { (0..len).map(|k| (0..len).map(|j| u64::from(j == k)).collect()).collect() } else { zsys.nullspace(p) };
    let dt = delta.transpose();
    let mut span: Vec<Vec<u64>> = (0..dt.rows).map(|r| dt.row(r).to_vec()).collect();
    let mut rank = if span.is_empty() { 0 } else { Mat::from_rows(&span).rank(p) };
    let mut ext_basis = Vec::new();
    for z in cocycles {
        span.push(z.clone());
        let r = Mat::from_rows(&span).rank(p);
        if r > rank {
            rank = r;
            ext_basis.push(z);
        } else {
            span.pop();
        }
    }
    let e = ext_basis.len();
    let needed = (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(IHallError::Cap { needed, cap });
    }
    let mut counts: BTreeMap<K, u64> = BTreeMap::new();
    *counts.entry(classify(&m.direct_sum(n))?).or_insert(0) += 1;
    for coords in fp::projective_points(e, p) {
        let mut eta = vec![0u64; len];
        for (c, b) in coords.iter().zip(&ext_basis) {
            if *c != 0 {
                for (x, y) in eta.iter_mut().zip(b) {
                    *x = (*x + c * y) % p;
                }
            }
        }
        let l = extension(alg, m, n, &eta);
        *counts.entry(classify(&l)?).or_insert(0) += p - 1;
    }
    Ok(ExtCensus { hom_dim: hom, ext_dim: e, counts })
}

/// Isomorphism classes of a finite set of dimension vectors at one prime,
/// used to classify middle terms by exhaustive comparison.
pub struct Catalog {
    pub alg: IQuiverAlgebra,
    pub p: u64,
    pub cap: u128,
    classes: BTreeMap<Vec<usize>, Vec<(Vec<usize>, LambdaModule)>>,
}

/// `(dimension vector, index in the catalog)`.
pub type ClassKey = (Vec<usize>, usize);

impl Catalog {
    pub fn new(alg: &IQuiverAlgebra, p: u64, cap: u128) -> Self {
        Self { alg: alg.clone(), p, cap, classes: BTreeMap::new() }
    }

    pub fn ensure(&mut self, d: &[usize]) -> Result<(), IHallError> {
        if !self.classes.contains_key(d) {
            let reps = enumerate_modules(&self.alg, d, self.p, self.cap)?;
            let tagged = reps.into_iter().map(|m| (fingerprint(&self.alg, &m), m)).collect();
            self.classes.insert(d.to_vec(), tagged);
        }
        Ok(())
    }

    pub fn classes(&self, d: &[usize]) -> &[(Vec<usize>, LambdaModule)] {
        self.classes.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn module(&self, k: &ClassKey) -> &LambdaModule {
        &self.classes[&k.0][k.1].1
    }

    pub fn classify(&self, m: &LambdaModule) -> Result<ClassKey, IHallError> {
        let reps = self.classes.get(&m.dims).ok_or_else(|| IHallError::Coverage(format!("dimension {:?} not enumerated", m.dims)))?;
        let f = fingerprint(&self.alg, m);
        let cands: Vec<usize> = (0..reps.len()).filter(|&k| reps[k].0 == f).collect();
        if cands.len() == 1 {
            return Ok((m.dims.clone(), cands[0]));
        }
        for k in cands {
            if is_iso(&self.alg, &reps[k].1, m, self.cap)? {
                return Ok((m.dims.clone(), k));
            }
        }
        Err(IHallError::Coverage("module missing from the enumeration".into()))
    }

    /// Key of a module built elsewhere, enumerating its dimension first.
    pub fn key_of(&mut self, m: &LambdaModule) -> Result<ClassKey, IHallError> {
        self.ensure(&m.dims)?;
        self.classify(m)
    }

    /// Twisted Hall product `[M] * [N]` at this prime.
    pub fn product(&mut self, x: &ClassKey, y: &ClassKey) -> Result<BTreeMap<ClassKey, QSqrt>, IHallError> {
        let (m, n) = (self.module(x).clone(), self.module(y).clone());
        let d: Vec<usize> = m.dims.iter().zip(&n.dims).map(|(a, b)| a + b).collect();
        self.ensure(&d)?;
        let census = ext_census(&self.alg, &m, &n, self.cap, &|l| self.classify(l))?;
        let twist = self.alg.shape.euler_form(&m.dim_vector(), &n.dim_vector());
        let q = self.p;
        let scale = QSqrt::v_pow(twist - 2 * census.hom_dim as i64, q);
        Ok(census.counts.into_iter().map(|(k, c)| (k, scale.mul(&QSqrt::int(c as i64, q)))).collect())
    }

    /// Product of two combinations of classes.
    pub fn mul(&mut self, x: &BTreeMap<ClassKey, QSqrt>, y: &BTreeMap<ClassKey, QSqrt>) -> Result<BTreeMap<ClassKey, QSqrt>, IHallError> {
        let mut out: BTreeMap<ClassKey, QSqrt> = BTreeMap::new();
        for (a, ca) in x {
            for (b, cb) in y {
                for (k, c) in self.product(a, b)? {
                    let t = ca.mul(cb).mul(&c);
                    let e = out.entry(k).or_insert_with(|| QSqrt::int(0, self.p));
                    *e = e.add(&t);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Whether `x` lies in the span of `[M] - [N]` over pairs with equal
    /// restriction to the radical-square-zero part that agree in the
    /// singularity category.
    pub fn in_ideal(&self, x: &BTreeMap<ClassKey, QSqrt>) -> Result<bool, IHallError> {
        let keys: Vec<&ClassKey> = x.keys().collect();
        let mut block: Vec<usize> = (0..keys.len()).collect();
        for a in 0..keys.len() {
            for b in 0..a {
                if block[b] != b {
                    continue;
                }
                let (m, n) = (self.module(keys[a]), self.module(keys[b]));
                if m.res_h(&self.alg) == n.res_h(&self.alg) && dsg_iso(&self.alg, m, n, self.cap)? {
                    block[a] = b;
                    break;
                }
            }
        }
        let mut sums: BTreeMap<usize, QSqrt> = BTreeMap::new();
        for (k, c) in keys.iter().zip(x.values()) {
            let idx = block[keys.iter().position(|y| y == k).unwrap()];
            let e = sums.entry(idx).or_insert_with(|| QSqrt::int(0, self.p));
            *e = e.add(c);
        }
        Ok(sums.values().all(|c| c.is_zero()))
    }
}
