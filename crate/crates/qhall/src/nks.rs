//! Repetition quivers, their orbit quotients with frozen vertices, the
//! quantum Cartan map, l-dominance, generator vectors, and the rank-1
//! closed forms for `L(v, w)`.

use crate::cartan::{DiagramInvolution, QuiverShape};
use crate::double::{DoubleAlgebra, DoubleError, PbwElt};
use crate::scalars::ScalarHalf;
use num_integer::binomial;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NksError {
    #[error("knitting window too small: {0}")]
    Window(String),
    #[error("enumeration cap {0} exceeded")]
    Cap(usize),
    #[error("pair is not l-dominant: v = {v:?}, w = {w:?}")]
    NotDominant { v: Vec<i64>, w: Vec<i64> },
    #[error("index out of range: {0}")]
    Range(String),
    #[error("involution is not a quiver automorphism")]
    Involution,
    #[error("no pair with the requested weight: {0:?}")]
    NoPair(Vec<i64>),
}

/// The automorphism `F` of the repetition quiver we quotient by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Twist {
    /// `F = Sigma^2`: double framed quivers, the quantum group.
    ShiftSquared,
    /// `F = Sigma rho`: the iquantum group of `(Q, rho)`.
    ShiftInvolution(DiagramInvolution),
}

/// An indecomposable `X[n]` of the bounded derived category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub root: Vec<i64>,
    pub shift: i64,
}

impl Label {
    pub fn is_simple(&self) -> bool {
        self.root.iter().sum::<i64>() == 1
    }

    pub fn format(&self) -> String {
        let r: Vec<String> = self.root.iter().map(|x| x.to_string()).collect();
        match self.shift {
            0 => format!("[{}]", r.join("")),
            n => format!("[{}][{}]", r.join(""), n),
        }
    }
}

/// Vertex `(i, p)` of `ZQ`.
pub type ZVertex = (usize, i64);

/// A window of the repetition quiver `ZQ` with Happel labels.
///
/// Arrow convention: `alpha: i -> j` gives `(j, p) -> (i, p)` and
/// `(i, p) -> (j, p + 1)`; `(i, 0)` carries the projective `P_i` and
/// `tau (i, p) = (i, p - 1)`.
#[derive(Debug, Clone)]
pub struct RepetitionQuiver {
    pub shape: QuiverShape,
    pub lo: i64,
    pub hi: i64,
    labels: BTreeMap<ZVertex, Label>,
    /// Vertices within one slice, ordered so arrows inside it go forward.
    slice_order: Vec<usize>,
}

fn projective_dims(shape: &QuiverShape) -> Vec<Vec<i64>> {
    // P_i(k) = number of paths i -> k.
    let n = shape.num_vertices();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        let mut frontier = vec![i];
        while let Some(a) = frontier.pop() {
            out[i][a] += 1;
            for &(s, t) in shape.arrows() {
                if s == a {
                    frontier.push(t);
                }
            }
        }
    }
    out
}

impl RepetitionQuiver {
    pub fn new(shape: &QuiverShape, lo: i64, hi: i64) -> Self {
        let n = shape.num_vertices();
        // arrows (j,p) -> (i,p) for i -> j: place sinks of Q first
        let mut slice_order = Vec::new();
        let mut placed = vec![false; n];
        while slice_order.len() < n {
            for i in 0..n {
                if !placed[i] && shape.arrows().iter().all(|&(s, t)| s != i || placed[t]) {
                    placed[i] = true;
                    slice_order.push(i);
                }
            }
        }
        let proj = projective_dims(shape);
        let mut classes: BTreeMap<ZVertex, Vec<i64>> = BTreeMap::new();
        let mut shifts: BTreeMap<ZVertex, i64> = BTreeMap::new();
        for i in 0..n {
            classes.insert((i, 0), proj[i].clone());
            shifts.insert((i, 0), 0);
        }
        let mut rq = Self { shape: shape.clone(), lo, hi, labels: BTreeMap::new(), slice_order };
        let sign = |c: &[i64]| c.iter().find(|&&x| x != 0).copied().unwrap_or(0).signum();
        // forward: [tau^{-1} x] = sum_{x -> y} [y] - [x]
        for p in 0..hi {
            for &i in &rq.slice_order.clone() {
                let x = (i, p);
                let mut c: Vec<i64> = classes[&x].iter().map(|a| -a).collect();
                for y in rq.successors(x) {
                    if y.1 <= p + 1 {
                        let cy = classes.get(&y).expect("knitting order");
                        for k in 0..n {
                            c[k] += cy[k];
                        }
                    }
                }
                let flip = sign(&c) != sign(&classes[&x]);
                shifts.insert((i, p + 1), shifts[&x] + flip as i64);
                classes.insert((i, p + 1), c);
            }
        }
        // backward: [tau x] = sum_{y -> x} [y] - [x]
        for p in (lo + 1..=0).rev() {
            for &i in rq.slice_order.clone().iter().rev() {
                let x = (i, p);
                let mut c: Vec<i64> = classes[&x].iter().map(|a| -a).collect();
                for y in rq.predecessors(x) {
                    let cy = classes.get(&y).expect("knitting order");
                    for k in 0..n {
                        c[k] += cy[k];
                    }
                }
                let flip = sign(&c) != sign(&classes[&x]);
                shifts.insert((i, p - 1), shifts[&x] - flip as i64);
                classes.insert((i, p - 1), c);
            }
        }
        for (z, c) in classes {
            let s = shifts[&z];
            let root = if s.rem_euclid(2) == 0 { c } else { c.iter().map(|a| -a).collect() };
            rq.labels.insert(z, Label { root, shift: s });
        }
        rq
    }

    /// Arrows `x -> y` inside `ZQ`.
    pub fn successors(&self, x: ZVertex) -> Vec<ZVertex> {
        let (i, p) = x;
        let mut out = Vec::new();
        for &(s, t) in self.shape.arrows() {
            if t == i {
                out.push((s, p));
            }
            if s == i {
                out.push((t, p + 1));
            }
        }
        out
    }

    /// Arrows `y -> x` inside `ZQ`.
    pub fn predecessors(&self, x: ZVertex) -> Vec<ZVertex> {
        let (i, p) = x;
        let mut out = Vec::new();
        for &(s, t) in self.shape.arrows() {
            if s == i {
                out.push((t, p));
            }
            if t == i {
                out.push((s, p - 1));
            }
        }
        out
    }

    pub fn label(&self, z: ZVertex) -> Option<&Label> {
        self.labels.get(&z)
    }

    pub fn find(&self, l: &Label) -> Option<ZVertex> {
        self.labels.iter().find(|(_, m)| *m == l).map(|(z, _)| *z)
    }

    /// Vertices in an order compatible with all arrows.
    pub fn ordered(&self) -> Vec<ZVertex> {
        let mut out = Vec::new();
        for p in self.lo..=self.hi {
            for &i in &self.slice_order {
                out.push((i, p));
            }
        }
        out
    }

    /// `dim k(ZQ)(x, z)` for all `z`, by the hammock recursion.
    pub fn hom_from(&self, x: ZVertex) -> BTreeMap<ZVertex, i64> {
        let mut h: BTreeMap<ZVertex, i64> = BTreeMap::new();
        let mut started = false;
        for z in self.ordered() {
            if z == x {
                started = true;
                h.insert(z, 1);
                continue;
            }
            if !started {
                continue;
            }
            let mut s: i64 = self.predecessors(z).iter().map(|y| h.get(y).copied().unwrap_or(0)).sum();
            s -= h.get(&(z.0, z.1 - 1)).copied().unwrap_or(0);
            if s > 0 {
                h.insert(z, s);
            }
        }
        h
    }
}

/// The regular NKS quiver of `ZQ / F` with frozen vertices.
#[derive(Debug, Clone)]
pub struct NksQuiver {
    pub shape: QuiverShape,
    pub twist: Twist,
    /// Non-frozen vertices, indexed by their orbit representative.
    pub vertices: Vec<Label>,
    /// `tau` on non-frozen vertices.
    pub tau: Vec<usize>,
    /// Arrows between non-frozen vertices, with multiplicity.
    pub arrows: Vec<(usize, usize)>,
    /// For each frozen vertex `sigma c`, the index of `c`.
    pub frozen: Vec<usize>,
    rq: RepetitionQuiver,
}

impl NksQuiver {
    pub fn new(shape: &QuiverShape, twist: Twist) -> Result<Self, NksError> {
        if let Twist::ShiftInvolution(rho) = &twist {
            if !rho.is_quiver_automorphism(shape) {
                return Err(NksError::Involution);
            }
        }
        let n = shape.num_vertices();
        let h = 2 * n as i64 + 2;
        let rq = RepetitionQuiver::new(shape, -3 * h, 4 * h);
        let mut q = Self { shape: shape.clone(), twist, vertices: Vec::new(), tau: Vec::new(), arrows: Vec::new(), frozen: Vec::new(), rq };
        let mut reps: Vec<Label> = q.rq.labels.values().map(|l| q.reduce(l)).collect();
        reps.sort();
        reps.dedup();
        q.vertices = reps;
        let lifts: Vec<ZVertex> = q
            .vertices
            .iter()
            .map(|l| q.rq.find(l).ok_or_else(|| NksError::Window(l.format())))
            .collect::<Result<_, _>>()?;
        for (a, &z) in lifts.iter().enumerate() {
            let t = (z.0, z.1 - 1);
            let tl = q.rq.label(t).ok_or_else(|| NksError::Window(format!("tau of {}", q.vertices[a].format())))?;
            let ti = q.index(tl);
            q.tau.push(ti);
            for y in q.rq.predecessors(z) {
                let yl = q.rq.label(y).ok_or_else(|| NksError::Window("arrow source".into()))?;
                let yi = q.index(yl);
                q.arrows.push((yi, a));
            }
        }
        q.frozen = (0..q.vertices.len()).filter(|&a| q.vertices[a].is_simple()).collect();
        Ok(q)
    }

    /// Orbit representative of a label under `F`.
    pub fn reduce(&self, l: &Label) -> Label {
        match &self.twist {
            Twist::ShiftSquared => Label { root: l.root.clone(), shift: l.shift.rem_euclid(2) },
            Twist::ShiftInvolution(rho) => {
                let root = if l.shift.rem_euclid(2) == 0 { l.root.clone() } else { rho.act(&l.root) };
                Label { root, shift: 0 }
            }
        }
    }

    pub fn index(&self, l: &Label) -> usize {
        let r = self.reduce(l);
        self.vertices.binary_search(&r).expect("label in the quotient")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn num_frozen(&self) -> usize {
        self.frozen.len()
    }

    /// Frozen slot of `sigma S_i[shift]`.
    pub fn frozen_slot(&self, i: usize, shift: i64) -> usize {
        let l = Label { root: self.shape.unit(i), shift };
        let a = self.index(&l);
        self.frozen.iter().position(|&c| c == a).expect("simples are in C")
    }

    /// `(C_q v)(x) = v(x) + v(tau x) - sum_{y -> x} v(y)`.
    pub fn quantum_cartan(&self, v: &[i64]) -> Vec<i64> {
        let mut out: Vec<i64> = (0..self.len()).map(|x| v[x] + v[self.tau[x]]).collect();
        for &(y, x) in &self.arrows {
            out[x] -= v[y];
        }
        out
    }

    pub fn sigma_star(&self, w: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.len()];
        for (s, &c) in self.frozen.iter().enumerate() {
            out[c] += w[s];
        }
        out
    }

    /// `sigma^* w - C_q v`.
    pub fn weight(&self, v: &[i64], w: &[i64]) -> Vec<i64> {
        let s = self.sigma_star(w);
        let c = self.quantum_cartan(v);
        s.iter().zip(&c).map(|(a, b)| a - b).collect()
    }

    pub fn is_l_dominant(&self, v: &[i64], w: &[i64]) -> bool {
        v.iter().all(|&x| x >= 0) && self.weight(v, w).iter().all(|&x| x >= 0)
    }

    /// All `v` with `(v, w)` l-dominant. Each coordinate is bounded by
    /// `|w|`; `cap` bounds the search.
    pub fn enumerate_l_dominant(&self, w: &[i64], cap: usize) -> Result<Vec<Vec<i64>>, NksError> {
        if w.len() != self.num_frozen() || w.iter().any(|&x| x < 0) {
            return Err(NksError::Range(format!("w needs {} nonnegative entries, got {:?}", self.num_frozen(), w)));
        }
        let bound: i64 = w.iter().sum();
        let mut out = Vec::new();
        let mut v = vec![0i64; self.len()];
        let mut visited = 0usize;
        fn rec(q: &NksQuiver, w: &[i64], bound: i64, k: usize, v: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, visited: &mut usize, cap: usize) -> Result<(), NksError> {
            *visited += 1;
            if *visited > cap {
                return Err(NksError::Cap(cap));
            }
            if k == v.len() {
                if q.is_l_dominant(v, w) {
                    out.push(v.clone());
                }
                return Ok(());
            }
            let used: i64 = v.iter().sum();
            for x in 0..=(bound - used) {
                v[k] = x;
                rec(q, w, bound, k + 1, v, out, visited, cap)?;
            }
            v[k] = 0;
            Ok(())
        }
        rec(self, w, bound, 0, &mut v, &mut out, &mut visited, cap)?;
        out.sort_by(|a, b| a.iter().sum::<i64>().cmp(&b.iter().sum()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// `dim P(x, z)` in the orbit category, summed over the lifts of `z`.
    pub fn hom_dims_from(&self, x: &Label) -> Vec<i64> {
        let z = self.rq.find(&self.reduce(x)).expect("representative in window");
        let mut out = vec![0; self.len()];
        for (y, d) in self.rq.hom_from(z) {
            if let Some(l) = self.rq.label(y) {
                out[self.index(l)] += d;
            }
        }
        out
    }

    /// `(v^i, w^i)`; in the double framed case also `v^{Sigma i}`.
    pub fn generator_vectors(&self, i: usize) -> (Vec<i64>, Vec<i64>) {
        let s = Label { root: self.shape.unit(i), shift: 0 };
        let v = self.hom_dims_from(&s);
        let mut w = vec![0; self.num_frozen()];
        w[self.frozen_slot(i, 0)] += 1;
        match &self.twist {
            Twist::ShiftSquared => w[self.frozen_slot(i, 1)] += 1,
            Twist::ShiftInvolution(rho) => w[self.frozen_slot(rho.apply(i), 0)] += 1,
        }
        (v, w)
    }

    /// `Sigma^* v`, i.e. `x -> v(Sigma x)`.
    pub fn shift_pullback(&self, v: &[i64]) -> Vec<i64> {
        (0..self.len())
            .map(|x| {
                let l = &self.vertices[x];
                let sl = Label { root: l.root.clone(), shift: l.shift + 1 };
                v[self.index(&sl)]
            })
            .collect()
    }

    /// Minimal `(v, w)` with `sigma^* w - C_q v = lambda`, `lambda` given
    /// as multiplicities of module vertices; `v` is searched up to `bound`
    /// in total.
    pub fn dictionary(&self, lambda: &[(Label, i64)], bound: i64) -> Result<(Vec<i64>, Vec<i64>), NksError> {
        let mut target = vec![0i64; self.len()];
        for (l, m) in lambda {
            target[self.index(l)] += m;
        }
        let n = self.len();
        for total in 0..=bound {
            let mut found = None;
            for_each_composition(n, total, &mut |v| {
                if found.is_some() {
                    return;
                }
                let c = self.quantum_cartan(v);
                let mut w = vec![0; self.num_frozen()];
                for x in 0..n {
                    let need = target[x] + c[x];
                    match self.frozen.iter().position(|&f| f == x) {
                        Some(s) if need >= 0 => w[s] = need,
                        None if need == 0 => {}
                        _ => return,
                    }
                }
                found = Some((v.to_vec(), w));
            });
            if let Some(p) = found {
                return Ok(p);
            }
        }
        Err(NksError::NoPair(target))
    }

    /// Graphviz rendering of the framed quotient quiver.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph nks {\n");
        for (a, l) in self.vertices.iter().enumerate() {
            s += &format!("  x{} [label=\"{}\"];\n", a, l.format());
        }
        for (k, &c) in self.frozen.iter().enumerate() {
            s += &format!("  f{} [label=\"s{}\", shape=box];\n", k, self.vertices[c].format());
            s += &format!("  x{} -> f{};\n  f{} -> x{};\n", self.tau[c], k, k, c);
        }
        for &(y, x) in &self.arrows {
            s += &format!("  x{} -> x{};\n", y, x);
        }
        s + "}\n"
    }
}

fn for_each_composition(n: usize, total: i64, f: &mut dyn FnMut(&[i64])) {
    fn rec(k: usize, left: i64, v: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if k + 1 == v.len() {
            v[k] = left;
            f(v);
            return;
        }
        for x in 0..=left {
            v[k] = x;
            rec(k + 1, left - x, v, f);
        }
    }
    if n == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut v = vec![0; n];
    rec(0, total, &mut v, f);
}

/// Coefficients of `E^a F^b` over `L(v, (a, b))` for the rank-1 double,
/// keyed by `(v_1, v_2)`.
pub fn rank1_ea_fb(a: i64, b: i64) -> BTreeMap<(i64, i64), ScalarHalf> {
    let (c, d) = (a.max(b), a.min(b));
    let mut out = BTreeMap::new();
    for v1 in 0..=d {
        for v2 in 0..=(d - v1) {
            let num = &(&ScalarHalf::qbinom(d + 1, v1) * &ScalarHalf::qbinom(d + 1, v2)) * &ScalarHalf::qint(d + 1 - v1 - v2);
            let coeff = num.div_exact(&ScalarHalf::qint(d + 1)).expect("the quotient by [d+1] is Laurent");
            out.insert((v1, v2), &ScalarHalf::v_pow((c * (v2 - v1)) as i32) * &coeff);
        }
    }
    out
}

/// Range of strongly l-dominant rank-1 pairs: `v_1 + v_2 <= min(w_1, w_2)`.
pub fn rank1_in_range(v: (i64, i64), w: (i64, i64)) -> bool {
    v.0 >= 0 && v.1 >= 0 && w.0 >= 0 && w.1 >= 0 && v.0 + v.1 <= w.0.min(w.1)
}

/// Exponent of the `K^{a_1} K'^{a_2}` term of `L(v, w)` as printed in
/// the source formula. It is only correct for `w_1 >= w_2`.
pub fn rank1_f_printed(v: (i64, i64), w: (i64, i64), a: (i64, i64)) -> i64 {
    let n = w.0.min(w.1);
    (w.0 - w.1) * (v.0 - v.1) + (n + 1 - a.0 - a.1) * ((v.0 - v.1) - (a.0 - a.1))
}

/// Exponent actually used: the printed one plus
/// `2 max(0, w_2 - w_1) ((v_1 - v_2) - (a_1 - a_2))`, which makes the
/// `E^a F^b` expansion consistent when `w_2 > w_1`.
pub fn rank1_f(v: (i64, i64), w: (i64, i64), a: (i64, i64)) -> i64 {
    rank1_f_printed(v, w, a) + 2 * (w.1 - w.0).max(0) * ((v.0 - v.1) - (a.0 - a.1))
}

/// Terms of `L(v, w)`: `(coefficient, E-exponent, F-exponent, K, K')` for
/// `E^x F^y K^k K'^k'`.
pub fn rank1_l_terms(v: (i64, i64), w: (i64, i64)) -> Result<Vec<(ScalarHalf, i64, i64, i64, i64)>, NksError> {
    if !rank1_in_range(v, w) {
        return Err(NksError::NotDominant { v: vec![v.0, v.1], w: vec![w.0, w.1] });
    }
    let n = w.0.min(w.1);
    let l = v.0 + v.1;
    let mut out = Vec::new();
    for k in l..=n {
        let sign = if (k - l) % 2 == 0 { 1 } else { -1 };
        for a1 in v.0..=(k - v.1) {
            let a2 = k - a1;
            let f = rank1_f(v, w, (a1, a2));
            let c = &ScalarHalf::qbinom(n - a2 - v.0, a1 - v.0) * &ScalarHalf::qbinom(n - a1 - v.1, a2 - v.1);
            let c = &(&c * &ScalarHalf::v_pow(f as i32)) * &ScalarHalf::from_int(sign);
            if !c.is_zero() {
                out.push((c, w.0 - k, w.1 - k, a1, a2));
            }
        }
    }
    Ok(out)
}

/// `L(v, w)` as an element of the rank-1 double.
pub fn rank1_l(alg: &DoubleAlgebra, v: (i64, i64), w: (i64, i64)) -> Result<PbwElt, NksError> {
    let terms = rank1_l_terms(v, w)?;
    let mut out = PbwElt::zero();
    for (c, x, y, k, kp) in terms {
        let t = (|| -> Result<PbwElt, DoubleError> {
            let e = alg.pow(&alg.e_gen(0), x as u32)?;
            let f = alg.pow(&alg.f_gen(0), y as u32)?;
            alg.mul_all(&[&e, &f, &alg.k_mono(&[k], &[kp])])
        })()
        .map_err(|e| NksError::Range(e.to_string()))?;
        out.add_scaled(&t, &c);
    }
    Ok(out)
}

/// Polynomial in the commuting generators `B`, `K` of the rank-1
/// iquantum group: `(B-exponent, K-exponent) -> integer coefficient`.
pub type BkPoly = BTreeMap<(i64, i64), i64>;

/// `L(k, m) = sum_j (-1)^{j-k} binom(m-k-j, m-2j) B^{m-2j} K^j`.
pub fn irank1_l(k: i64, m: i64) -> Result<BkPoly, NksError> {
    if k < 0 || m < 0 || 2 * k > m {
        return Err(NksError::Range(format!("L({}, {})", k, m)));
    }
    let mut out = BkPoly::new();
    for j in k..=m / 2 {
        let sign = if (j - k) % 2 == 0 { 1 } else { -1 };
        let c = sign * binomial(m - k - j, m - 2 * j);
        if c != 0 {
            *out.entry((m - 2 * j, j)).or_insert(0) += c;
        }
    }
    Ok(out)
}

/// `binom(a-1, i) - binom(a-1, i-2)`, with `C_{0,-1} = 1`.
pub fn irank1_c(i: i64, a: i64) -> i64 {
    let b = |n: i64, k: i64| if k < 0 || n < 0 || k > n { 0 } else { binomial(n, k) };
    if a == 0 {
        return (i == 0) as i64;
    }
    b(a - 1, i) - b(a - 1, i - 2)
}

/// `B^a K^b = sum_i C_{i,a-1} L(i+b, a+2b)`, keyed by `(k, m)`.
pub fn irank1_inverse(a: i64, b: i64) -> Result<BTreeMap<(i64, i64), i64>, NksError> {
    if a < 0 || b < 0 {
        return Err(NksError::Range(format!("B^{} K^{}", a, b)));
    }
    let mut out = BTreeMap::new();
    for i in 0..=a / 2 {
        let c = irank1_c(i, a);
        if c != 0 {
            out.insert((i + b, a + 2 * b), c);
        }
    }
    Ok(out)
}
