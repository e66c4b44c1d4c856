//! The generic Hall algebra of a Dynkin quiver.
//!
//! Structure constants on the `u`-basis come from extension censuses at
//! several primes, interpolated in `q = v^2` and twisted by `v^{<X,Z>}`.
//! Products beyond the census regime route through one-letter
//! factorizations `u_nu = sum r u_{nu'} u_{alpha_j}`. The bar and psi maps
//! are computed through words in the simple generators.

use crate::cache::CountCache;
use crate::finrep::{CensusOptions, FinrepError, KSClass, RepCategory, DEFAULT_CENSUS_CAP};
use crate::lincomb::{LinComb, RatComb};
use crate::ratfunc::{independent_rows, invert, RatFunc};
use crate::scalars::{interpolate_stable, rat, rat_frac, Rational, ScalarError, ScalarHalf, SAMPLE_PRIMES};
use crate::cartan::QuiverShape;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::{Arc, Mutex};

pub type HallElt = LinComb<KSClass>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HallError {
    #[error(transparent)]
    Finrep(#[from] FinrepError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("coefficient is not Laurent: {0}")]
    NotLaurent(String),
    #[error("structure constant has non-integer coefficients: {0}")]
    NonIntegral(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("cache: {0}")]
    Cache(String),
}

/// Counting and interpolation settings.
#[derive(Debug, Clone)]
pub struct HallConfig {
    pub primes: Vec<u64>,
    pub census_cap: u128,
    /// Products whose Ext space has at most this dimension use a direct census.
    pub direct_ext_max: i64,
}

impl Default for HallConfig {
    fn default() -> Self {
        Self { primes: SAMPLE_PRIMES.to_vec(), census_cap: DEFAULT_CENSUS_CAP, direct_ext_max: 2 }
    }
}

/// Maps on the Hall algebra determined by their values on the simples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordMap {
    /// Anti-automorphism, coefficient bar, `u_i -> v^{-1} u_i`.
    Bar,
    /// Automorphism, coefficient bar, `u_i -> -v^{-2} u_i` (fixes `w_i`).
    Psi,
    /// Automorphism, coefficient bar, `u_i -> v^{-1} u_i` (fixes `v^{-1/2} u_i`).
    PsiGen,
    /// Linear anti-automorphism fixing `u_i`.
    Star,
}

/// Which algorithm computes a basis product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductRoute {
    Auto,
    Census,
    Factor,
}

pub(crate) type Memo<K, V> = Mutex<HashMap<K, Arc<V>>>;

pub(crate) fn memo<K: Eq + Hash + Clone, V, E>(m: &Memo<K, V>, k: &K, f: impl FnOnce() -> Result<V, E>) -> Result<Arc<V>, E> {
    if let Some(v) = m.lock().unwrap().get(k) {
        return Ok(v.clone());
    }
    let v = Arc::new(f()?);
    Ok(m.lock().unwrap().entry(k.clone()).or_insert(v).clone())
}

/// `u_a = sum_s coeff[a][s] * rows[s]` for every class `a` of one degree,
/// where each row is a product of a lower class with a simple.
#[derive(Debug, Clone)]
pub struct FactorData {
    pub classes: Arc<Vec<KSClass>>,
    pub rows: Vec<(KSClass, usize)>,
    pub coeff: Vec<Vec<RatFunc>>,
}

/// All words of one degree with their Hall expansions, and an inverse on a
/// chosen spanning subset.
#[derive(Debug, Clone)]
pub struct WordData {
    pub classes: Arc<Vec<KSClass>>,
    pub words: Vec<Vec<usize>>,
    pub rows: Vec<HallElt>,
    pub index: HashMap<Vec<usize>, usize>,
    pub selected: Vec<usize>,
    pub minv: Vec<Vec<RatFunc>>,
}

pub type Matrix = Vec<Vec<ScalarHalf>>;

/// Evaluation point used to pick independent rows quickly.
fn probe() -> Rational {
    rat_frac(7, 5)
}

fn to_square(rows: &[HallElt], classes: &[KSClass]) -> Vec<Vec<ScalarHalf>> {
    rows.iter().map(|r| classes.iter().map(|c| r.coeff(c)).collect()).collect()
}

/// Pick independent rows and invert them; returns (selected indices, inverse
/// with rows indexed by columns of the input).
fn select_and_invert(matrix: &[Vec<ScalarHalf>]) -> Result<(Vec<usize>, Vec<Vec<RatFunc>>), HallError> {
    let n = matrix.first().map_or(0, |r| r.len());
    let probe = probe();
    let numeric: Vec<Vec<Rational>> = matrix.iter().map(|r| r.iter().map(|c| c.eval_u(&probe)).collect()).collect();
    let mut sel = independent_rows(&numeric);
    let rf = |idx: &[usize]| -> Vec<Vec<RatFunc>> {
        idx.iter().map(|&s| matrix[s].iter().map(RatFunc::from_scalar).collect()).collect()
    };
    if sel.len() < n {
        let all: Vec<Vec<RatFunc>> = matrix.iter().map(|r| r.iter().map(RatFunc::from_scalar).collect()).collect();
        sel = independent_rows(&all);
        if sel.len() < n {
            return Err(HallError::Singular(format!("rank {} < {}", sel.len(), n)));
        }
    }
    let square = rf(&sel);
    let inv = invert(&square).ok_or_else(|| HallError::Singular("selected rows are dependent".into()))?;
    // square: rows = selected, cols = classes. inv: rows = classes, cols = selected.
    Ok((sel, inv))
}

fn unit_vec(n: usize, i: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

pub struct HallAlgebra {
    pub cat: RepCategory,
    pub config: HallConfig,
    cache: Option<CountCache>,
    shape_key: String,
    right_simple: Memo<(KSClass, usize), HallElt>,
    left_simple: Memo<(usize, KSClass), HallElt>,
    products: Memo<(KSClass, KSClass), HallElt>,
    rfactor: Memo<Vec<i64>, FactorData>,
    lfactor: Memo<Vec<i64>, FactorData>,
    word_maps: Memo<(Vec<i64>, WordMap), Matrix>,
    words: Memo<Vec<i64>, WordData>,
}

impl std::fmt::Debug for HallAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HallAlgebra({})", self.shape_key)
    }
}

impl HallAlgebra {
    pub fn new(shape: QuiverShape) -> Self {
        Self::with_config(shape, HallConfig::default())
    }

    pub fn with_config(shape: QuiverShape, config: HallConfig) -> Self {
        let shape_key = format!("{}:{:?}", shape.type_tag(), shape.arrows());
        Self {
            cat: RepCategory::new(shape),
            config,
            cache: CountCache::from_env(),
            shape_key,
            right_simple: Default::default(),
            left_simple: Default::default(),
            products: Default::default(),
            rfactor: Default::default(),
            lfactor: Default::default(),
            word_maps: Default::default(),
            words: Default::default(),
        }
    }

    pub fn set_cache(&mut self, cache: Option<CountCache>) {
        self.cache = cache;
    }

    pub fn shape(&self) -> &QuiverShape {
        self.cat.shape()
    }

    pub fn rank(&self) -> usize {
        self.shape().num_vertices()
    }

    pub fn zero_class(&self) -> KSClass {
        KSClass::zero(self.cat.n_roots())
    }

    pub fn simple(&self, i: usize) -> KSClass {
        self.cat.simple_class(i)
    }

    pub fn one(&self) -> HallElt {
        HallElt::basis(self.zero_class())
    }

    pub fn u(&self, l: &KSClass) -> HallElt {
        HallElt::basis(l.clone())
    }

    pub fn degree(&self, l: &KSClass) -> Vec<i64> {
        self.cat.dim_vector(l)
    }

    pub fn classes(&self, d: &[i64]) -> Arc<Vec<KSClass>> {
        self.cat.classes_of_degree(d)
    }

    /// Middle-term counts of `Ext^1(X, Z)` at `p`, through the disk cache.
    pub fn census_counts(&self, x: &KSClass, z: &KSClass, p: u64) -> Result<BTreeMap<KSClass, Rational>, HallError> {
        let key = format!("{}|p={}|x={:?}|z={:?}", self.shape_key, p, x.0, z.0);
        if let Some(c) = &self.cache {
            if let Some(v) = c.get::<Vec<(Vec<u32>, u64)>>("census", &key).map_err(|e| HallError::Cache(e.to_string()))? {
                return Ok(v.into_iter().map(|(k, n)| (KSClass(k), rat(n as i64))).collect());
            }
        }
        let opts = CensusOptions { cap: self.config.census_cap, ..Default::default() };
        let census = self.cat.ext_census(x, z, p, opts)?;
        if let Some(c) = &self.cache {
            let v: Vec<(Vec<u32>, u64)> = census.counts.iter().map(|(k, n)| (k.0.clone(), *n)).collect();
            c.put("census", &key, &v).map_err(|e| HallError::Cache(e.to_string()))?;
        }
        Ok(census.counts.into_iter().map(|(k, n)| (k, rat(n as i64))).collect())
    }

    /// `u_x u_z` by census and interpolation over the configured primes.
    pub fn census_product(&self, x: &KSClass, z: &KSClass) -> Result<HallElt, HallError> {
        let ext = self.cat.ext_classes(x, z);
        let hom = self.cat.hom_classes(x, z);
        let eul = self.cat.euler(x, z);
        let twist = 2 * eul as i32 - 4 * hom as i32;
        if ext == 0 {
            return Ok(HallElt::term(x.add(z), ScalarHalf::u_pow(twist)));
        }
        let fit = interpolate_stable(ext as usize, &self.config.primes, |p| self.census_counts(x, z, p))?;
        let mut out = HallElt::zero();
        for (y, poly) in fit.polys {
            if poly.degree().unwrap_or(0) > ext as usize {
                return Err(HallError::Scalar(ScalarError::InterpolationInstability(format!(
                    "count for {:?} has degree above dim Ext = {}",
                    y.0, ext
                ))));
            }
            let g = poly.to_scalar().shift(twist);
            if !g.is_integral() {
                return Err(HallError::NonIntegral(format!("{:?} in u_{:?} u_{:?}: {}", y.0, x.0, z.0, g)));
            }
            out.add_term(y, g);
        }
        Ok(out)
    }

    /// `u_l u_{alpha_j}`.
    pub fn right_simple(&self, l: &KSClass, j: usize) -> Result<Arc<HallElt>, HallError> {
        memo(&self.right_simple, &(l.clone(), j), || self.census_product(l, &self.simple(j)))
    }

    /// `u_{alpha_j} u_l`.
    pub fn left_simple(&self, j: usize, l: &KSClass) -> Result<Arc<HallElt>, HallError> {
        memo(&self.left_simple, &(j, l.clone()), || self.census_product(&self.simple(j), l))
    }

    pub fn mul_right_simple(&self, x: &HallElt, j: usize) -> Result<HallElt, HallError> {
        let mut out = HallElt::zero();
        for (l, c) in x.iter() {
            out.add_scaled(&*self.right_simple(l, j)?, c);
        }
        Ok(out)
    }

    pub fn mul_left_simple(&self, j: usize, x: &HallElt) -> Result<HallElt, HallError> {
        let mut out = HallElt::zero();
        for (l, c) in x.iter() {
            out.add_scaled(&*self.left_simple(j, l)?, c);
        }
        Ok(out)
    }

    /// One-letter factorization data for degree `d`.
    pub fn right_factor(&self, d: &[i64]) -> Result<Arc<FactorData>, HallError> {
        memo(&self.rfactor, &d.to_vec(), || {
            let classes = self.classes(d);
            let n = self.rank();
            let mut rows = Vec::new();
            for j in 0..n {
                if d[j] == 0 {
                    continue;
                }
                let dp: Vec<i64> = d.iter().zip(unit_vec(n, j)).map(|(a, b)| a - b).collect();
                for nu in self.classes(&dp).iter() {
                    rows.push((nu.clone(), j));
                }
            }
            let prods: Vec<Arc<HallElt>> =
                rows.par_iter().map(|(nu, j)| self.right_simple(nu, *j)).collect::<Result<_, _>>()?;
            let owned: Vec<HallElt> = prods.iter().map(|p| (**p).clone()).collect();
            let (sel, inv) = select_and_invert(&to_square(&owned, &classes))?;
            let rows: Vec<(KSClass, usize)> = sel.iter().map(|&s| rows[s].clone()).collect();
            Ok(FactorData { classes, rows, coeff: inv })
        })
    }

    /// Left one-letter factorization: `u_a = sum_s coeff[a][s] u_{alpha_j} u_nu`
    /// with `rows[s] = (nu, j)`.
    pub fn left_factor(&self, d: &[i64]) -> Result<Arc<FactorData>, HallError> {
        memo(&self.lfactor, &d.to_vec(), || {
            let classes = self.classes(d);
            let n = self.rank();
            let mut rows = Vec::new();
            for j in 0..n {
                if d[j] == 0 {
                    continue;
                }
                let dp: Vec<i64> = d.iter().zip(unit_vec(n, j)).map(|(a, b)| a - b).collect();
                for nu in self.classes(&dp).iter() {
                    rows.push((nu.clone(), j));
                }
            }
            let prods: Vec<Arc<HallElt>> =
                rows.par_iter().map(|(nu, j)| self.left_simple(*j, nu)).collect::<Result<_, _>>()?;
            let owned: Vec<HallElt> = prods.iter().map(|p| (**p).clone()).collect();
            let (sel, inv) = select_and_invert(&to_square(&owned, &classes))?;
            let rows: Vec<(KSClass, usize)> = sel.iter().map(|&s| rows[s].clone()).collect();
            Ok(FactorData { classes, rows, coeff: inv })
        })
    }

    /// `u_l u_m` on basis elements.
    pub fn product_basis(&self, l: &KSClass, m: &KSClass) -> Result<Arc<HallElt>, HallError> {
        self.product_route(l, m, ProductRoute::Auto)
    }

    pub fn product_route(&self, l: &KSClass, m: &KSClass, route: ProductRoute) -> Result<Arc<HallElt>, HallError> {
        if l.is_zero() {
            return Ok(Arc::new(self.u(m)));
        }
        if m.is_zero() {
            return Ok(Arc::new(self.u(l)));
        }
        let ext = self.cat.ext_classes(l, m);
        let simple_right = m.num_summands() == 1 && self.cat.total_dim(m) == 1;
        let use_census = match route {
            ProductRoute::Census => true,
            ProductRoute::Factor => ext == 0 || simple_right,
            ProductRoute::Auto => ext <= self.config.direct_ext_max || simple_right,
        };
        if use_census {
            if simple_right {
                let j = self.degree(m).iter().position(|&x| x == 1).unwrap();
                return self.right_simple(l, j);
            }
            if route == ProductRoute::Auto {
                return memo(&self.products, &(l.clone(), m.clone()), || self.census_product(l, m));
            }
            return Ok(Arc::new(self.census_product(l, m)?));
        }
        let compute = || -> Result<HallElt, HallError> {
            let fd = self.right_factor(&self.degree(m))?;
            let a = fd.classes.iter().position(|c| c == m).expect("class of its own degree");
            let mut acc = RatComb::zero();
            for (s, (nu, j)) in fd.rows.iter().enumerate() {
                let r = &fd.coeff[a][s];
                if r.is_zero() {
                    continue;
                }
                let inner = self.product_route(l, nu, route)?;
                let t = self.mul_right_simple(&inner, *j)?;
                acc.add_lin(&t, r);
            }
            acc.to_laurent().map_err(HallError::NotLaurent)
        };
        if route == ProductRoute::Auto {
            memo(&self.products, &(l.clone(), m.clone()), compute)
        } else {
            Ok(Arc::new(compute()?))
        }
    }

    /// Bilinear product.
    pub fn product(&self, x: &HallElt, y: &HallElt) -> Result<HallElt, HallError> {
        let mut out = HallElt::zero();
        for (l, c) in x.iter() {
            for (m, d) in y.iter() {
                out.add_scaled(&*self.product_basis(l, m)?, &(c * d));
            }
        }
        Ok(out)
    }

    /// Product of a word of simples `u_{alpha_{w_1}} ... u_{alpha_{w_k}}`.
    pub fn word_product(&self, w: &[usize]) -> Result<HallElt, HallError> {
        let d = self.word_degree(w);
        let wd = self.word_data(&d)?;
        Ok(wd.rows[wd.index[w]].clone())
    }

    pub fn word_degree(&self, w: &[usize]) -> Vec<i64> {
        let mut d = vec![0; self.rank()];
        for &i in w {
            d[i] += 1;
        }
        d
    }

    /// Words of degree `d` with their expansions.
    pub fn word_data(&self, d: &[i64]) -> Result<Arc<WordData>, HallError> {
        if let Some(v) = self.words.lock().unwrap().get(d) {
            return Ok(v.clone());
        }
        let n = self.rank();
        let classes = self.classes(d);
        let mut entries: BTreeMap<Vec<usize>, HallElt> = BTreeMap::new();
        if d.iter().all(|&x| x == 0) {
            entries.insert(Vec::new(), self.one());
        } else {
            for j in 0..n {
                if d[j] == 0 {
                    continue;
                }
                let dp: Vec<i64> = d.iter().zip(unit_vec(n, j)).map(|(a, b)| a - b).collect();
                let sub = self.word_data(&dp)?;
                let ext: Vec<(Vec<usize>, HallElt)> = sub
                    .words
                    .par_iter()
                    .zip(sub.rows.par_iter())
                    .map(|(w, row)| {
                        let mut w2 = w.clone();
                        w2.push(j);
                        self.mul_right_simple(row, j).map(|r| (w2, r))
                    })
                    .collect::<Result<_, _>>()?;
                entries.extend(ext);
            }
        }
        let words: Vec<Vec<usize>> = entries.keys().cloned().collect();
        let rows: Vec<HallElt> = entries.into_values().collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let (selected, minv) = select_and_invert(&to_square(&rows, &classes))?;
        let wd = Arc::new(WordData { classes, words, rows, index, selected, minv });
        Ok(self.words.lock().unwrap().entry(d.to_vec()).or_insert(wd).clone())
    }

    /// `u_l` as a combination of words in the simples.
    pub fn monomial_expression(&self, l: &KSClass) -> Result<Vec<(Vec<usize>, RatFunc)>, HallError> {
        let wd = self.word_data(&self.degree(l))?;
        let a = wd.classes.iter().position(|c| c == l).expect("class of its own degree");
        Ok(wd
            .selected
            .iter()
            .enumerate()
            .filter(|(s, _)| !wd.minv[a][*s].is_zero())
            .map(|(s, &w)| (wd.words[w].clone(), wd.minv[a][s].clone()))
            .collect())
    }

    /// Matrix of a generator-determined map on degree `d`: `u_a` maps to
    /// `sum_s f(minv[a][s]) * factor(k) * row(image word)`.
    fn word_map_matrix(
        &self,
        d: &[i64],
        coeff: impl Fn(&RatFunc) -> RatFunc,
        factor: &ScalarHalf,
        reverse: bool,
    ) -> Result<Matrix, HallError> {
        let wd = self.word_data(d)?;
        let k: i64 = d.iter().sum();
        let scale = RatFunc::from_scalar(&factor.pow(k as u32));
        let mut out = Vec::with_capacity(wd.classes.len());
        for a in 0..wd.classes.len() {
            let mut acc = RatComb::zero();
            for (s, &w) in wd.selected.iter().enumerate() {
                let c = &wd.minv[a][s];
                if c.is_zero() {
                    continue;
                }
                let word = &wd.words[w];
                let image = if reverse {
                    let r: Vec<usize> = word.iter().rev().copied().collect();
                    &wd.rows[wd.index[&r]]
                } else {
                    &wd.rows[w]
                };
                acc.add_lin(image, &coeff(c).mul(&scale));
            }
            let row = acc.to_laurent().map_err(HallError::NotLaurent)?;
            out.push(wd.classes.iter().map(|c| row.coeff(c)).collect());
        }
        Ok(out)
    }

    /// Matrix of a word-determined map on degree `d`: row `a` is the image of `u_a`.
    pub fn word_map_u(&self, d: &[i64], map: WordMap) -> Result<Arc<Matrix>, HallError> {
        memo(&self.word_maps, &(d.to_vec(), map), || match map {
            WordMap::Bar => self.word_map_matrix(d, |c| c.bar(), &ScalarHalf::v_pow(-1), true),
            WordMap::Psi => self.word_map_matrix(d, |c| c.bar(), &-ScalarHalf::v_pow(-2), false),
            WordMap::PsiGen => self.word_map_matrix(d, |c| c.bar(), &ScalarHalf::v_pow(-1), false),
            WordMap::Star => self.word_map_matrix(d, |c| c.clone(), &ScalarHalf::one(), true),
        })
    }

    /// `bar(u_a) = sum_b B[a][b] u_b`: anti-automorphism, `bar(u_i) = v^{-1} u_i`.
    pub fn bar_matrix_u(&self, d: &[i64]) -> Result<Arc<Matrix>, HallError> {
        self.word_map_u(d, WordMap::Bar)
    }

    /// `psi(u_a) = sum_b P[a][b] u_b`: automorphism fixing `w_i`, so
    /// `psi(u_i) = -v^{-2} u_i`.
    pub fn psi_matrix_u(&self, d: &[i64]) -> Result<Arc<Matrix>, HallError> {
        self.word_map_u(d, WordMap::Psi)
    }

    /// Apply a word-determined map to any element.
    pub fn apply_word_map(&self, x: &HallElt, map: WordMap) -> Result<HallElt, HallError> {
        let mut by_degree: BTreeMap<Vec<i64>, Vec<(&KSClass, &ScalarHalf)>> = BTreeMap::new();
        for (l, c) in x.iter() {
            by_degree.entry(self.degree(l)).or_default().push((l, c));
        }
        let mut out = HallElt::zero();
        for (d, terms) in by_degree {
            let m = self.word_map_u(&d, map)?;
            let classes = self.classes(&d);
            for (l, c) in terms {
                let a = classes.iter().position(|k| k == l).unwrap();
                for (b, e) in m[a].iter().enumerate() {
                    let c = if map == WordMap::Star { c.clone() } else { c.bar() };
                    out.add_term(classes[b].clone(), &c * e);
                }
            }
        }
        Ok(out)
    }

    pub fn bar(&self, x: &HallElt) -> Result<HallElt, HallError> {
        self.apply_word_map(x, WordMap::Bar)
    }

    pub fn psi(&self, x: &HallElt) -> Result<HallElt, HallError> {
        self.apply_word_map(x, WordMap::Psi)
    }

    /// Exponent of `v` in `E_l = v^{e} w_l`: `dim End - dim`.
    pub fn e_exponent(&self, l: &KSClass) -> i64 {
        self.cat.end_dim(l) - self.cat.total_dim(l)
    }

    /// `E_l = c_l u_l` with `c_l = v^{dim End - dim} / a_l(v^2)`.
    pub fn e_coeff(&self, l: &KSClass) -> RatFunc {
        RatFunc::from_scalar(&ScalarHalf::v_pow(self.e_exponent(l) as i32))
            .div(&RatFunc::from_scalar(&self.cat.aut_scalar(l)))
    }

    /// `u`-exponent `s` with `U_l = u^s u_l`, i.e. `v^{-dim End + <l,l>/2}`.
    pub fn dual_exponent_u(&self, l: &KSClass) -> i32 {
        let d = self.degree(l);
        (-2 * self.cat.end_dim(l) + self.cat.datum.euler_form(&d, &d)) as i32
    }

    pub fn dual_coeff(&self, l: &KSClass) -> ScalarHalf {
        ScalarHalf::u_pow(self.dual_exponent_u(l))
    }

    /// psi on the `E`-basis of degree `d`.
    pub fn psi_matrix_e(&self, d: &[i64]) -> Result<Matrix, HallError> {
        let pu = self.psi_matrix_u(d)?;
        let classes = self.classes(d);
        let cs: Vec<RatFunc> = classes.iter().map(|c| self.e_coeff(c)).collect();
        let mut out = Vec::new();
        for a in 0..classes.len() {
            let mut row = Vec::new();
            for b in 0..classes.len() {
                let x = cs[a].bar().mul_scalar(&pu[a][b]).div(&cs[b]);
                row.push(x.to_scalar().ok_or_else(|| HallError::NotLaurent(format!("psi on E-basis: {:?}", x)))?);
            }
            out.push(row);
        }
        Ok(out)
    }

    /// bar on the rescaled basis `U` of degree `d`.
    pub fn bar_matrix_dual(&self, d: &[i64]) -> Result<Matrix, HallError> {
        let bu = self.bar_matrix_u(d)?;
        let classes = self.classes(d);
        let ex: Vec<i32> = classes.iter().map(|c| self.dual_exponent_u(c)).collect();
        Ok((0..classes.len())
            .map(|a| (0..classes.len()).map(|b| bu[a][b].shift(-ex[a] - ex[b])).collect())
            .collect())
    }

    /// Hopf pairing `(u_l, u_m) = delta a_l(v^2)`.
    pub fn hopf_pair(&self, x: &HallElt, y: &HallElt) -> ScalarHalf {
        let mut s = ScalarHalf::zero();
        for (l, c) in x.iter() {
            let d = y.coeff(l);
            if !d.is_zero() {
                s += &(c * &d) * &self.cat.aut_scalar(l);
            }
        }
        s
    }

    /// `E`-basis element as a `u`-combination with rational coefficients.
    pub fn e_to_u(&self, x: &HallElt) -> RatComb<KSClass> {
        let mut out = RatComb::zero();
        for (l, c) in x.iter() {
            out.add_term(l.clone(), self.e_coeff(l).mul_scalar(c));
        }
        out
    }

    /// Rewrite a `u`-combination in `E`-coordinates (asserted Laurent).
    pub fn u_to_e(&self, x: &RatComb<KSClass>) -> Result<HallElt, HallError> {
        let mut out = HallElt::zero();
        for (l, c) in x.iter() {
            let e = c.div(&self.e_coeff(l));
            out.add_term(l.clone(), e.to_scalar().ok_or_else(|| HallError::NotLaurent(format!("E-coordinate {:?}", e)))?);
        }
        Ok(out)
    }

    /// Product of `E`-basis elements `E_{l_1} ... E_{l_k}` in `E`-coordinates.
    pub fn e_monomial(&self, factors: &[KSClass]) -> Result<HallElt, HallError> {
        let mut x = self.one();
        let mut scale = RatFunc::one();
        for f in factors {
            x = self.product(&x, &self.u(f))?;
            scale = scale.mul(&self.e_coeff(f));
        }
        let mut acc = RatComb::zero();
        acc.add_lin(&x, &scale);
        self.u_to_e(&acc)
    }

    /// Quantum Serre element for `E_i -> v^{-1/2} u_i` (zero when the
    /// relation holds).
    pub fn serre_element(&self, i: usize, j: usize) -> Result<HallElt, HallError> {
        let c = self.cat.datum.cartan[i][j];
        let m = (1 - c) as usize;
        let mut out = HallElt::zero();
        for r in 0..=m {
            let mut w = vec![i; r];
            w.push(j);
            w.extend(std::iter::repeat(i).take(m - r));
            let sign = if r % 2 == 0 { 1 } else { -1 };
            let coef = ScalarHalf::qbinom(m as i64, r as i64).scale(&rat(sign)) * ScalarHalf::u_pow(-(m as i32 + 1));
            out.add_scaled(&self.word_product(&w)?, &coef);
        }
        Ok(out)
    }

    /// Transport along the generator-determined isomorphism to another
    /// orientation (`u_i -> u_i`).
    pub fn fourier(&self, other: &HallAlgebra, x: &HallElt) -> Result<RatComb<KSClass>, HallError> {
        let mut acc = RatComb::zero();
        for (l, c) in x.iter() {
            for (w, r) in self.monomial_expression(l)? {
                acc.add_lin(&other.word_product(&w)?, &r.mul_scalar(c));
            }
        }
        Ok(acc)
    }

    /// Same as [`HallAlgebra::fourier`] for a rational-coefficient element.
    pub fn fourier_rat(&self, other: &HallAlgebra, x: &RatComb<KSClass>) -> Result<RatComb<KSClass>, HallError> {
        let mut acc = RatComb::zero();
        for (l, c) in x.iter() {
            for (w, r) in self.monomial_expression(l)? {
                acc.add_lin(&other.word_product(&w)?, &r.mul(c));
            }
        }
        Ok(acc)
    }
}

/// Dimension vectors `0 <= d <= top` (componentwise), excluding zero.
pub fn degrees_upto(top: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &t in top {
        let mut next = Vec::new();
        for prefix in &out {
            for x in 0..=t {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out.retain(|d| d.iter().any(|&x| x != 0));
    out.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: i32) -> ScalarHalf {
        ScalarHalf::v_pow(k)
    }

    #[test]
    fn a1_square() {
        let h = HallAlgebra::new(QuiverShape::linear_a(1));
        let s = h.simple(0);
        let p = h.product_basis(&s, &s).unwrap();
        assert_eq!(*p, HallElt::term(s.scale(2), v(-1)));
    }

    #[test]
    fn a2_products() {
        let h = HallAlgebra::new(QuiverShape::linear_a(2));
        let (s1, s2) = (h.simple(0), h.simple(1));
        let p1 = KSClass::single(3, 2);
        let mut expect = HallElt::term(s1.add(&s2), v(-1));
        expect.add_term(p1, &v(1) - &v(-1));
        assert_eq!(*h.product_basis(&s1, &s2).unwrap(), expect);
        assert_eq!(*h.product_basis(&s2, &s1).unwrap(), HallElt::basis(s1.add(&s2)));
    }

    #[test]
    fn a2_monomial_expression() {
        let h = HallAlgebra::new(QuiverShape::linear_a(2));
        let p1 = KSClass::single(3, 2);
        let expr = h.monomial_expression(&p1).unwrap();
        let mut acc = RatComb::zero();
        for (w, r) in &expr {
            acc.add_lin(&h.word_product(w).unwrap(), r);
        }
        assert_eq!(acc.to_laurent().unwrap(), HallElt::basis(p1));
    }

    #[test]
    fn bar_and_psi_on_generators() {
        let h = HallAlgebra::new(QuiverShape::linear_a(2));
        let s1 = h.u(&h.simple(0));
        assert_eq!(h.bar(&s1).unwrap(), s1.scale(&v(-1)));
        assert_eq!(h.psi(&s1).unwrap(), s1.scale(&-v(-2)));
        let x = h.product(&s1, &h.u(&h.simple(1))).unwrap();
        assert_eq!(h.bar(&h.bar(&x).unwrap()).unwrap(), x);
        assert_eq!(h.psi(&h.psi(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn degrees_listing() {
        assert_eq!(degrees_upto(&[1, 1]), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
