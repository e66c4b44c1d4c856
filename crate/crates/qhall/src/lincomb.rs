//! Finitely supported linear combinations with `ScalarHalf` or `RatFunc`
//! coefficients.

use crate::ratfunc::RatFunc;
use crate::scalars::ScalarHalf;
use std::collections::BTreeMap;
use std::fmt;

/// `sum c_k [k]` over an ordered key type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, ScalarHalf>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: K) -> Self {
        Self::term(k, ScalarHalf::one())
    }

    pub fn term(k: K, c: ScalarHalf) -> Self {
        let mut s = Self::zero();
        s.add_term(k, c);
        s
    }

    pub fn add_term(&mut self, k: K, c: ScalarHalf) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<K>, c: &ScalarHalf) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.terms {
            self.add_term(k.clone(), x * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> ScalarHalf {
        self.terms.get(k).cloned().unwrap_or_else(ScalarHalf::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &ScalarHalf)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &ScalarHalf) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&ScalarHalf::from_int(-1))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &ScalarHalf::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &ScalarHalf::from_int(-1));
        out
    }

    /// Coefficient-wise bar conjugation.
    pub fn bar_coeffs(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.bar())).collect() }
    }

    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Keep only terms whose key satisfies `pred`.
    pub fn filter(&self, pred: impl Fn(&K) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, c)| (k.clone(), c.clone())).collect() }
    }

    pub fn into_map(self) -> BTreeMap<K, ScalarHalf> {
        self.terms
    }

    pub fn from_map(m: BTreeMap<K, ScalarHalf>) -> Self {
        let mut out = Self::zero();
        for (k, c) in m {
            out.add_term(k, c);
        }
        out
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("({})*{:?}", c, k)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Linear combination with rational-function coefficients, used while a
/// solver runs; converted back with [`RatComb::to_laurent`].
#[derive(Clone, Debug)]
pub struct RatComb<K: Ord> {
    terms: BTreeMap<K, RatFunc>,
}

impl<K: Ord> Default for RatComb<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone + fmt::Debug> RatComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, k: K, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k.clone()).or_insert_with(RatFunc::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_lin(&mut self, other: &LinComb<K>, c: &RatFunc) {
        if c.is_zero() {
            return;
        }
        for (k, x) in other.iter() {
            self.add_term(k.clone(), c.mul_scalar(x));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &RatFunc)> {
        self.terms.iter()
    }

    /// Convert to Laurent coefficients; the error names the first offending key.
    pub fn to_laurent(&self) -> Result<LinComb<K>, String> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            let s = c.to_scalar().ok_or_else(|| format!("coefficient {:?} of {:?} is not Laurent", c, k))?;
            out.add_term(k.clone(), s);
        }
        Ok(out)
    }
}
