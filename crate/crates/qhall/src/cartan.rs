//! ADE root data, Euler forms, Weyl group actions and diagram involutions.
//!
//! Vertices are numbered `0..n` internally; the quiver spec grammar and all
//! printed output use 1-based labels (`i*` for the second copy in a diagonal
//! double).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CartanError {
    #[error("not a simply-laced Dynkin diagram: {0}")]
    NotDynkin(String),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Simply-laced Dynkin type of a connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DynkinType {
    A(usize),
    D(usize),
    E(usize),
}

impl DynkinType {
    pub fn rank(&self) -> usize {
        match *self {
            DynkinType::A(n) | DynkinType::D(n) | DynkinType::E(n) => n,
        }
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        match *self {
            DynkinType::A(n) => n * (n + 1) / 2,
            DynkinType::D(n) => n * (n - 1),
            DynkinType::E(6) => 36,
            DynkinType::E(7) => 63,
            DynkinType::E(8) => 120,
            DynkinType::E(_) => unreachable!("only E6, E7, E8 exist"),
        }
    }

    /// Coxeter number.
    pub fn coxeter_number(&self) -> usize {
        match *self {
            DynkinType::A(n) => n + 1,
            DynkinType::D(n) => 2 * n - 2,
            DynkinType::E(6) => 12,
            DynkinType::E(7) => 18,
            DynkinType::E(_) => 30,
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynkinType::A(n) => write!(f, "A{}", n),
            DynkinType::D(n) => write!(f, "D{}", n),
            DynkinType::E(n) => write!(f, "E{}", n),
        }
    }
}

/// An oriented Dynkin quiver (possibly disconnected).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuiverShape {
    n: usize,
    arrows: Vec<(usize, usize)>,
    components: Vec<(DynkinType, Vec<usize>)>,
    labels: Vec<String>,
}

impl QuiverShape {
    /// Build from arrows on vertices `0..n`; validates the Dynkin condition.
    pub fn new(n: usize, arrows: Vec<(usize, usize)>) -> Result<Self, CartanError> {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        Self::with_labels(n, arrows, labels)
    }

    pub fn with_labels(
        n: usize,
        arrows: Vec<(usize, usize)>,
        labels: Vec<String>,
    ) -> Result<Self, CartanError> {
        if n == 0 {
            return Err(CartanError::NotDynkin("empty vertex set".into()));
        }
        let mut seen = BTreeSet::new();
        for &(s, t) in &arrows {
            if s >= n || t >= n {
                return Err(CartanError::NotDynkin(format!("arrow {}->{} out of range", s + 1, t + 1)));
            }
            if s == t {
                return Err(CartanError::NotDynkin("loops are not allowed".into()));
            }
            let key = (s.min(t), s.max(t));
            if !seen.insert(key) {
                return Err(CartanError::NotDynkin("multiple edges between two vertices".into()));
            }
        }
        let components = classify(n, &arrows)?;
        Ok(Self { n, arrows, components, labels })
    }

    /// Linearly oriented `A_n`: `1 -> 2 -> ... -> n`.
    pub fn linear_a(n: usize) -> Self {
        Self::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()).expect("A_n is Dynkin")
    }

    /// Default orientation for a Dynkin type (arrows from lower to higher index).
    pub fn default_of(t: DynkinType) -> Result<Self, CartanError> {
        let n = t.rank();
        let arrows = match t {
            DynkinType::A(_) => (0..n - 1).map(|i| (i, i + 1)).collect(),
            DynkinType::D(_) => {
                if n < 4 {
                    return Err(CartanError::NotDynkin(format!("D{} needs rank at least 4", n)));
                }
                let mut a: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                a.push((n - 3, n - 1));
                a
            }
            DynkinType::E(_) => {
                if !(6..=8).contains(&n) {
                    return Err(CartanError::NotDynkin(format!("E{} does not exist", n)));
                }
                // Chain 1-3-4-5-...-n with 2 attached to 4 (Bourbaki labels).
                let mut a = vec![(0, 2), (1, 3), (2, 3)];
                for i in 3..n - 1 {
                    a.push((i, i + 1));
                }
                a
            }
        };
        Self::new(n, arrows)
    }

    /// The diagonal double `Q ⊔ Q` with vertices `i` and `i*`.
    pub fn diagonal_double(&self) -> (Self, DiagramInvolution) {
        let n = self.n;
        let mut arrows = self.arrows.clone();
        arrows.extend(self.arrows.iter().map(|&(s, t)| (s + n, t + n)));
        let mut labels = self.labels.clone();
        labels.extend(self.labels.iter().map(|l| format!("{}*", l)));
        let shape = Self::with_labels(2 * n, arrows, labels).expect("double of Dynkin is Dynkin");
        let perm = (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect();
        (shape, DiagramInvolution { perm })
    }

    /// Same diagram with all arrows reversed.
    pub fn opposite(&self) -> Self {
        Self {
            n: self.n,
            arrows: self.arrows.iter().map(|&(s, t)| (t, s)).collect(),
            components: self.components.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn components(&self) -> &[(DynkinType, Vec<usize>)] {
        &self.components
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Short type tag such as `A3` or `A1+A1`.
    pub fn type_tag(&self) -> String {
        self.components
            .iter()
            .map(|(t, _)| t.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// `<a, b> = sum_i a_i b_i - sum_{i -> j} a_i b_j`.
    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        for &(i, j) in &self.arrows {
            s -= a[i] * b[j];
        }
        s
    }

    /// Symmetrized form `(a, b) = <a, b> + <b, a>`.
    pub fn sym_form(&self, a: &[i64], b: &[i64]) -> i64 {
        self.euler_form(a, b) + self.euler_form(b, a)
    }

    /// Cartan matrix `c_ij`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let mut c = vec![vec![0i64; self.n]; self.n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(s, t) in &self.arrows {
            c[s][t] = -1;
            c[t][s] = -1;
        }
        c
    }

    /// Sinks of the quiver.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| !self.arrows.iter().any(|&(s, _)| s == i))
            .collect()
    }

    /// Reverse all arrows incident to `i`.
    pub fn reflect_at(&self, i: usize) -> Self {
        let arrows = self
            .arrows
            .iter()
            .map(|&(s, t)| if s == i || t == i { (t, s) } else { (s, t) })
            .collect();
        Self {
            n: self.n,
            arrows,
            components: self.components.clone(),
            labels: self.labels.clone(),
        }
    }

    /// A sink-adapted ordering `i_1, ..., i_n`: each `i_k` is a sink of the
    /// quiver obtained by reflecting at `i_1..i_{k-1}`.
    pub fn sink_sequence(&self) -> Vec<usize> {
        let mut q = self.clone();
        let mut used = vec![false; self.n];
        let mut seq = Vec::new();
        while seq.len() < self.n {
            let i = q
                .sinks()
                .into_iter()
                .find(|&i| !used[i])
                .expect("an acyclic quiver always has an unused sink");
            used[i] = true;
            seq.push(i);
            q = q.reflect_at(i);
        }
        seq
    }

    pub fn unit(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.n];
        e[i] = 1;
        e
    }
}

fn classify(n: usize, arrows: &[(usize, usize)]) -> Result<Vec<(DynkinType, Vec<usize>)>, CartanError> {
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in arrows {
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut verts = Vec::new();
        let mut queue = VecDeque::from([start]);
        comp[start] = out.len();
        while let Some(x) = queue.pop_front() {
            verts.push(x);
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = out.len();
                    queue.push_back(y);
                }
            }
        }
        verts.sort_unstable();
        let m = verts.len();
        let edges = arrows.iter().filter(|(s, _)| comp[*s] == out.len()).count();
        if edges != m - 1 {
            return Err(CartanError::NotDynkin("underlying graph contains a cycle".into()));
        }
        let branch: Vec<usize> = verts.iter().copied().filter(|&x| adj[x].len() >= 3).collect();
        let t = if branch.is_empty() {
            DynkinType::A(m)
        } else if branch.len() == 1 && adj[branch[0]].len() == 3 {
            let c = branch[0];
            let mut arms: Vec<usize> = adj[c]
                .iter()
                .map(|&y| {
                    let (mut prev, mut cur, mut len) = (c, y, 1);
                    loop {
                        let next: Vec<usize> = adj[cur].iter().copied().filter(|&z| z != prev).collect();
                        if next.is_empty() {
                            break len;
                        }
                        prev = cur;
                        cur = next[0];
                        len += 1;
                    }
                })
                .collect();
            arms.sort_unstable();
            match (arms[0], arms[1], arms[2]) {
                (1, 1, _) => DynkinType::D(m),
                (1, 2, 2) => DynkinType::E(6),
                (1, 2, 3) => DynkinType::E(7),
                (1, 2, 4) => DynkinType::E(8),
                other => {
                    return Err(CartanError::NotDynkin(format!("branch arms {:?}", other)));
                }
            }
        } else {
            return Err(CartanError::NotDynkin("more than one branch point".into()));
        };
        out.push((t, verts));
    }
    Ok(out)
}

/// Cartan matrix, positive roots and forms for a fixed quiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatum {
    pub shape: QuiverShape,
    pub cartan: Vec<Vec<i64>>,
    pub roots: Vec<Vec<i64>>,
}

impl RootDatum {
    pub fn new(shape: QuiverShape) -> Self {
        let cartan = shape.cartan_matrix();
        let roots = positive_roots(&cartan);
        Self { shape, cartan, roots }
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> i64 {
        self.shape.euler_form(a, b)
    }

    pub fn sym_form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                s += a[i] * self.cartan[i][j] * b[j];
            }
        }
        s
    }

    /// `s_i(x) = x - (sum_j c_ij x_j) alpha_i`.
    pub fn reflect(&self, i: usize, x: &[i64]) -> Vec<i64> {
        let pair: i64 = (0..x.len()).map(|j| self.cartan[i][j] * x[j]).sum();
        let mut y = x.to_vec();
        y[i] -= pair;
        y
    }

    /// Apply `s_{w_0} s_{w_1} ... s_{w_k}` (rightmost letter first).
    pub fn apply_word(&self, word: &[usize], x: &[i64]) -> Vec<i64> {
        word.iter().rev().fold(x.to_vec(), |acc, &i| self.reflect(i, &acc))
    }

    pub fn root_index(&self, beta: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == beta)
    }

    /// One generator `s_i` (fixed point) or `s_i s_{rho i}` per orbit
    /// representative, in increasing representative order.
    pub fn restricted_generators(&self, rho: &DiagramInvolution) -> Vec<Vec<usize>> {
        rho.orbit_reps()
            .into_iter()
            .map(|i| {
                let j = rho.apply(i);
                if i == j {
                    vec![i]
                } else {
                    vec![i, j]
                }
            })
            .collect()
    }

    /// Order of `s_i s_j` for two orbit representatives, computed on the
    /// root lattice.
    pub fn braid_order(&self, rho: &DiagramInvolution, i: usize, j: usize) -> usize {
        let gi = self.restricted_generator(rho, i);
        let gj = self.restricted_generator(rho, j);
        let n = self.rank();
        let mut word: Vec<usize> = Vec::new();
        for m in 1..=12 {
            word.extend(&gi);
            word.extend(&gj);
            if (0..n).all(|k| self.apply_word(&word, &self.shape.unit(k)) == self.shape.unit(k)) {
                return m;
            }
        }
        unreachable!("restricted Weyl groups of Dynkin type have braid orders at most 6")
    }

    pub fn restricted_generator(&self, rho: &DiagramInvolution, i: usize) -> Vec<usize> {
        let j = rho.apply(i);
        if i == j {
            vec![i]
        } else {
            vec![i, j]
        }
    }
}

/// Positive roots generated from the simple roots by reflections, sorted by
/// height and then lexicographically.
pub fn positive_roots(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let mut roots: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        roots.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(beta) = queue.pop_front() {
        for i in 0..n {
            let pair: i64 = (0..n).map(|j| cartan[i][j] * beta[j]).sum();
            let mut s = beta.clone();
            s[i] -= pair;
            if s.iter().all(|&c| c >= 0) && s.iter().any(|&c| c > 0) && roots.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    let mut out: Vec<Vec<i64>> = roots.into_iter().collect();
    out.sort_by(|a, b| {
        let (ha, hb): (i64, i64) = (a.iter().sum(), b.iter().sum());
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    out
}

/// An involution `rho` of the vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramInvolution {
    perm: Vec<usize>,
}

impl DiagramInvolution {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    /// Validate against the Cartan matrix.
    pub fn new(perm: Vec<usize>, cartan: &[Vec<i64>]) -> Result<Self, CartanError> {
        let n = cartan.len();
        if perm.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(CartanError::InvalidInvolution("wrong length or out of range".into()));
        }
        for i in 0..n {
            if perm[perm[i]] != i {
                return Err(CartanError::InvalidInvolution("rho is not an involution".into()));
            }
            for j in 0..n {
                if cartan[i][j] != cartan[perm[i]][perm[j]] {
                    return Err(CartanError::InvalidInvolution(format!(
                        "c_{{{},{}}} differs from its image",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if perm[i] != i && cartan[i][perm[i]] != 0 {
                return Err(CartanError::InvalidInvolution(format!(
                    "vertex {} is adjacent to its image",
                    i + 1
                )));
            }
        }
        Ok(Self { perm })
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Minimal vertex of each orbit.
    pub fn orbit_reps(&self) -> Vec<usize> {
        (0..self.perm.len()).filter(|&i| i <= self.perm[i]).collect()
    }

    /// Apply to a vector over the vertex set.
    pub fn act(&self, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0; x.len()];
        for (i, &c) in x.iter().enumerate() {
            y[self.perm[i]] = c;
        }
        y
    }

    /// Whether `rho` maps arrows to arrows.
    pub fn is_quiver_automorphism(&self, shape: &QuiverShape) -> bool {
        let set: BTreeSet<(usize, usize)> = shape.arrows().iter().copied().collect();
        shape
            .arrows()
            .iter()
            .all(|&(s, t)| set.contains(&(self.perm[s], self.perm[t])))
    }

    /// Cycle notation with 1-based labels, `id` for the identity.
    pub fn to_cycle_string(&self, shape: &QuiverShape) -> String {
        let cycles: Vec<String> = self
            .orbit_reps()
            .into_iter()
            .filter(|&i| self.perm[i] != i)
            .map(|i| format!("({} {})", shape.label(i), shape.label(self.perm[i])))
            .collect();
        if cycles.is_empty() {
            "id".into()
        } else {
            cycles.join("")
        }
    }
}

/// A quiver together with an involution.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IQuiver {
    pub shape: QuiverShape,
    pub rho: DiagramInvolution,
}

impl IQuiver {
    pub fn split(shape: QuiverShape) -> Self {
        let n = shape.num_vertices();
        Self { shape, rho: DiagramInvolution::identity(n) }
    }

    pub fn diagonal(base: &QuiverShape) -> Self {
        let (shape, rho) = base.diagonal_double();
        Self { shape, rho }
    }

    pub fn datum(&self) -> RootDatum {
        RootDatum::new(self.shape.clone())
    }

    /// Render in the same grammar `parse_quiver_spec` accepts.
    pub fn to_spec_string(&self) -> String {
        let arrows: Vec<String> = self
            .shape
            .arrows()
            .iter()
            .map(|&(s, t)| format!("{}->{}", self.shape.label(s), self.shape.label(t)))
            .collect();
        format!(
            "{}: {}; rho={}",
            self.shape.type_tag(),
            arrows.join(", "),
            self.rho.to_cycle_string(&self.shape)
        )
    }
}

/// Parse a quiver spec such as `"A3: 1->2, 2->3; rho=(1 3)"`.
///
/// The arrow list may be omitted for the default orientation. Prefixing the
/// spec with `dbl ` builds the diagonal double of the given quiver with the
/// swap involution; vertices of the second copy are written `i*`.
pub fn parse_quiver_spec(spec: &str) -> Result<IQuiver, CartanError> {
    let trimmed = spec.trim_start();
    let offset = spec.len() - trimmed.len();
    if let Some(rest) = trimmed.strip_prefix("dbl ") {
        let inner = parse_quiver_spec(rest).map_err(|e| match e {
            CartanError::Parse { pos, msg } => CartanError::Parse { pos: pos + offset + 4, msg },
            other => other,
        })?;
        if !inner.rho.is_identity() {
            return Err(CartanError::Parse {
                pos: offset,
                msg: "a diagonal double takes a quiver without rho".into(),
            });
        }
        return Ok(IQuiver::diagonal(&inner.shape));
    }
    let (head, rho_part) = match spec.find(';') {
        Some(k) => (&spec[..k], Some((k + 1, &spec[k + 1..]))),
        None => (spec, None),
    };
    let (type_part, arrow_part) = match head.find(':') {
        Some(k) => (&head[..k], Some((k + 1, &head[k + 1..]))),
        None => (head, None),
    };
    let ty = parse_type(type_part.trim()).ok_or_else(|| CartanError::Parse {
        pos: offset,
        msg: format!("unknown Dynkin type '{}'", type_part.trim()),
    })?;
    let n = ty.rank();
    let shape = match arrow_part {
        Some((start, text)) if !text.trim().is_empty() => {
            let mut arrows = Vec::new();
            let mut pos = start;
            for piece in text.split(',') {
                let p = piece.trim();
                let at = pos + (piece.len() - piece.trim_start().len());
                let (s, t) = p.split_once("->").ok_or_else(|| CartanError::Parse {
                    pos: at,
                    msg: format!("expected 'i->j', found '{}'", p),
                })?;
                let parse_v = |x: &str| -> Result<usize, CartanError> {
                    let k: usize = x.trim().parse().map_err(|_| CartanError::Parse {
                        pos: at,
                        msg: format!("bad vertex '{}'", x.trim()),
                    })?;
                    if k == 0 || k > n {
                        return Err(CartanError::Parse { pos: at, msg: format!("vertex {} out of range", k) });
                    }
                    Ok(k - 1)
                };
                arrows.push((parse_v(s)?, parse_v(t)?));
                pos += piece.len() + 1;
            }
            let shape = QuiverShape::new(n, arrows)?;
            if shape.components().len() != 1 || shape.components()[0].0 != ty {
                return Err(CartanError::NotDynkin(format!(
                    "arrows describe {} rather than {}",
                    shape.type_tag(),
                    ty
                )));
            }
            shape
        }
        _ => QuiverShape::default_of(ty)?,
    };
    let rho = match rho_part {
        None => DiagramInvolution::identity(n),
        Some((start, text)) => {
            let t = text.trim();
            let body = t.strip_prefix("rho=").ok_or_else(|| CartanError::Parse {
                pos: start,
                msg: "expected 'rho='".into(),
            })?;
            parse_involution(body.trim(), n, &shape.cartan_matrix()).map_err(|e| match e {
                CartanError::Parse { pos, msg } => CartanError::Parse { pos: pos + start, msg },
                other => other,
            })?
        }
    };
    Ok(IQuiver { shape, rho })
}

fn parse_type(s: &str) -> Option<DynkinType> {
    let (letter, num) = s.split_at(1.min(s.len()));
    let n: usize = num.parse().ok()?;
    match letter {
        "A" if n >= 1 => Some(DynkinType::A(n)),
        "D" if n >= 4 => Some(DynkinType::D(n)),
        "E" if (6..=8).contains(&n) => Some(DynkinType::E(n)),
        _ => None,
    }
}

fn parse_involution(s: &str, n: usize, cartan: &[Vec<i64>]) -> Result<DiagramInvolution, CartanError> {
    if s == "id" {
        return Ok(DiagramInvolution::identity(n));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| CartanError::Parse { pos: 0, msg: "expected '('".into() })?;
        let close = rest.find(')').ok_or_else(|| CartanError::Parse { pos: 0, msg: "unclosed cycle".into() })?;
        let items: Vec<usize> = rest[open + 1..close]
            .split_whitespace()
            .map(|x| x.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| CartanError::Parse { pos: open, msg: "bad vertex in cycle".into() })?;
        if items.len() != 2 || items.iter().any(|&k| k == 0 || k > n) {
            return Err(CartanError::Parse { pos: open, msg: "cycles must be transpositions of valid vertices".into() });
        }
        perm[items[0] - 1] = items[1] - 1;
        perm[items[1] - 1] = items[0] - 1;
        rest = rest[close + 1..].trim_start();
    }
    DiagramInvolution::new(perm, cartan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts() {
        for (t, count) in [
            (DynkinType::A(2), 3),
            (DynkinType::A(3), 6),
            (DynkinType::D(4), 12),
            (DynkinType::D(5), 20),
            (DynkinType::E(6), 36),
            (DynkinType::E(7), 63),
            (DynkinType::E(8), 120),
        ] {
            let d = RootDatum::new(QuiverShape::default_of(t).unwrap());
            assert_eq!(d.roots.len(), count, "{}", t);
            assert_eq!(count, t.num_positive_roots());
        }
        let a2 = RootDatum::new(QuiverShape::linear_a(2));
        assert_eq!(a2.roots, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn euler_form_examples() {
        let a2 = QuiverShape::linear_a(2);
        assert_eq!(a2.euler_form(&[1, 0], &[0, 1]), -1);
        assert_eq!(a2.euler_form(&[0, 1], &[1, 0]), 0);
        for t in [DynkinType::A(4), DynkinType::D(5), DynkinType::E(6)] {
            let d = RootDatum::new(QuiverShape::default_of(t).unwrap());
            for r in &d.roots {
                assert_eq!(d.euler_form(r, r), 1);
                assert_eq!(d.sym_form(r, r), 2);
            }
            let c = d.shape.cartan_matrix();
            for i in 0..d.rank() {
                for j in 0..d.rank() {
                    let (ei, ej) = (d.shape.unit(i), d.shape.unit(j));
                    assert_eq!(c[i][j], d.euler_form(&ei, &ej) + d.euler_form(&ej, &ei));
                }
            }
        }
    }

    #[test]
    fn reflection_rule() {
        let d = RootDatum::new(QuiverShape::linear_a(3));
        assert_eq!(d.reflect(0, &[0, 1, 0]), vec![1, 1, 0]);
        assert_eq!(d.reflect(1, &[0, 1, 0]), vec![0, -1, 0]);
        assert_eq!(d.reflect(2, &[1, 0, 0]), vec![1, 0, 0]);
    }

    #[test]
    fn restricted_generators_and_braid_orders() {
        let q = parse_quiver_spec("A3: 1->2, 2->3; rho=(1 3)").unwrap();
        let d = q.datum();
        assert_eq!(d.restricted_generators(&q.rho), vec![vec![0, 2], vec![1]]);
        assert_eq!(d.braid_order(&q.rho, 0, 1), 4);
        let a2 = IQuiver::split(QuiverShape::linear_a(2));
        assert_eq!(a2.datum().braid_order(&a2.rho, 0, 1), 3);
        let dbl = IQuiver::diagonal(&QuiverShape::linear_a(1));
        let dd = dbl.datum();
        assert_eq!(dd.restricted_generators(&dbl.rho), vec![vec![0, 1]]);
        let two = IQuiver::split(QuiverShape::new(2, vec![]).unwrap());
        assert_eq!(two.datum().braid_order(&two.rho, 0, 1), 2);
    }

    #[test]
    fn parse_errors_report_positions() {
        assert!(matches!(parse_quiver_spec("A3: 1->2, 2-3"), Err(CartanError::Parse { pos: 10, .. })));
        assert!(matches!(parse_quiver_spec("B3"), Err(CartanError::Parse { .. })));
        assert!(matches!(parse_quiver_spec("A3; rho=(1 2)"), Err(CartanError::InvalidInvolution(_))));
        assert!(parse_quiver_spec("A3: 1->2, 3->2; rho=(1 3)").is_ok());
        let d = parse_quiver_spec("dbl A2: 2->1").unwrap();
        assert_eq!(d.shape.num_vertices(), 4);
        assert_eq!(d.shape.label(3), "2*");
    }

    #[test]
    fn non_dynkin_rejected() {
        assert!(QuiverShape::new(3, vec![(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(QuiverShape::new(5, vec![(0, 4), (1, 4), (2, 4), (3, 4)]).is_err());
    }
}
