//! Finite alphabets: atomic symbol lists, products, and ball-indexed powers.

use crate::error::{Error, Result};
use crate::words::ball_size;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    Atomic(Vec<String>),
    /// Index of `(a_0, ..., a_m)` is mixed radix with factor 0 most significant.
    Product(Vec<Alphabet>),
    /// `base^{B(e,radius)}`; position 0 (the identity) is the most significant digit.
    Ball { base: Box<Alphabet>, rank: usize, radius: usize },
}

impl Alphabet {
    pub fn atomic<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let v: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if v.is_empty() {
            return Err(Error::ShapeMismatch("alphabet must be nonempty".into()));
        }
        let mut sorted = v.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != v.len() {
            return Err(Error::ShapeMismatch("alphabet symbols must be distinct".into()));
        }
        Ok(Alphabet::Atomic(v))
    }

    /// `{"0", ..., "m-1"}`.
    pub fn range(m: usize) -> Self {
        Alphabet::Atomic((0..m).map(|i| i.to_string()).collect())
    }

    pub fn singleton() -> Self {
        Alphabet::Atomic(vec!["*".into()])
    }

    pub fn product(factors: Vec<Alphabet>) -> Self {
        Alphabet::Product(factors)
    }

    pub fn pair(a: Alphabet, b: Alphabet) -> Self {
        Alphabet::Product(vec![a, b])
    }

    /// `base^{B(e,radius)}`; radius 0 returns the base itself.
    pub fn ball(base: Alphabet, rank: usize, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Ok(base);
        }
        let bs = ball_size(rank, radius);
        checked_pow(base.size(), bs).ok_or(Error::BudgetExceeded {
            what: "ball alphabet size",
            needed: format!("{}^{}", base.size(), bs),
            limit: u64::MAX,
        })?;
        Ok(Alphabet::Ball { base: Box::new(base), rank, radius })
    }

    pub fn size(&self) -> usize {
        match self {
            Alphabet::Atomic(v) => v.len(),
            Alphabet::Product(f) => f.iter().map(|a| a.size()).product(),
            Alphabet::Ball { base, rank, radius } => {
                checked_pow(base.size(), ball_size(*rank, *radius)).expect("checked at construction")
            }
        }
    }

    pub fn factors(&self) -> Option<&[Alphabet]> {
        match self {
            Alphabet::Product(f) => Some(f),
            _ => None,
        }
    }

    /// Splits a product index into factor indices.
    pub fn decode_product(&self, mut idx: usize) -> Vec<usize> {
        let f = self.factors().expect("product alphabet");
        let mut out = vec![0; f.len()];
        for (m, a) in f.iter().enumerate().rev() {
            out[m] = idx % a.size();
            idx /= a.size();
        }
        out
    }

    pub fn encode_product(&self, parts: &[usize]) -> usize {
        let f = self.factors().expect("product alphabet");
        parts.iter().zip(f).fold(0, |acc, (p, a)| acc * a.size() + p)
    }

    /// Splits a ball index into per-position base labels.
    pub fn decode_ball(&self, idx: usize) -> Vec<usize> {
        match self {
            Alphabet::Ball { base, rank, radius } => {
                decode_digits(idx, base.size(), ball_size(*rank, *radius))
            }
            _ => vec![idx],
        }
    }

    pub fn encode_ball(&self, labels: &[usize]) -> usize {
        match self {
            Alphabet::Ball { base, .. } => encode_digits(labels, base.size()),
            _ => labels[0],
        }
    }

    pub fn name(&self, idx: usize) -> String {
        match self {
            Alphabet::Atomic(v) => v[idx].clone(),
            Alphabet::Product(f) => {
                let parts = self.decode_product(idx);
                parts
                    .iter()
                    .zip(f)
                    .map(|(p, a)| a.name(*p))
                    .collect::<Vec<_>>()
                    .join("|")
            }
            Alphabet::Ball { base, .. } => {
                let labels = self.decode_ball(idx);
                let names: Vec<String> = labels.iter().map(|l| base.name(*l)).collect();
                format!("[{}]", names.join(","))
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.size()).map(|i| self.name(i)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        match self {
            Alphabet::Atomic(v) => v.iter().position(|s| s == name),
            _ => (0..self.size()).find(|&i| self.name(i) == name),
        }
    }

    /// Equality of symbol lists, tolerating different structural tags.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        if self == other {
            return true;
        }
        self.size() == other.size() && (0..self.size()).all(|i| self.name(i) == other.name(i))
    }

    /// Infers structure from JSON symbol names: a full grid of `"a|b"` names becomes a product.
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        if names.iter().all(|s| s.contains('|')) && !names.is_empty() {
            let split: Vec<Vec<&str>> = names.iter().map(|s| s.split('|').collect()).collect();
            let arity = split[0].len();
            if split.iter().all(|p| p.len() == arity) {
                let mut factors: Vec<Vec<String>> = vec![Vec::new(); arity];
                for p in &split {
                    for (m, s) in p.iter().enumerate() {
                        if !factors[m].iter().any(|t| t == s) {
                            factors[m].push((*s).to_string());
                        }
                    }
                }
                let prod = Alphabet::Product(
                    factors.into_iter().map(Alphabet::Atomic).collect(),
                );
                if prod.size() == names.len()
                    && (0..names.len()).all(|i| prod.name(i) == names[i])
                {
                    return Ok(prod);
                }
            }
        }
        Alphabet::atomic(names)
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub(crate) fn decode_digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for p in (0..len).rev() {
        out[p] = idx % base;
        idx /= base;
    }
    out
}

pub(crate) fn encode_digits(labels: &[usize], base: usize) -> usize {
    labels.iter().fold(0, |acc, l| acc * base + l)
}
