//! Exhaustive good-model counting: `Ω*_k(σ, α, ε) = {x : d*_k(P^σ_x, α^G_*μ) < ε}`.

use super::empirical::pair_counts;
use crate::alphabet::{decode_digits, Alphabet};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::markov::{BallMass, MarkovMeasure};
use crate::rational::Q;
use crate::realize::{ball_points, Homomorphism, Labeling};
use crate::words::Subtree;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;

/// Monte-Carlo summary with a normal-approximation 95% interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_counts(counts: &[u64]) -> Self {
        let t = counts.len();
        let sum: u128 = counts.iter().map(|&c| c as u128).sum();
        let mean = sum as f64 / t as f64;
        let var = if t > 1 {
            counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (t - 1) as f64
        } else {
            0.0
        };
        let se = (var / t as f64).sqrt();
        Estimate { mean, ci_low: mean - 1.96 * se, ci_high: mean + 1.96 * se, trials: t, std_error: se }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exact {
    Integer(BigUint),
    Rational(Q),
}

/// Exact counts and/or estimates, with the per-site growth rate of the positive quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub exact: Option<Exact>,
    pub estimate: Option<Estimate>,
    pub growth_rate: Option<f64>,
}

impl CountReport {
    pub fn exact_integer(count: BigUint, n: usize) -> Self {
        let growth_rate = if count.is_zero() {
            None
        } else {
            Some(big_ln(&count) / n as f64)
        };
        CountReport { exact: Some(Exact::Integer(count)), estimate: None, growth_rate }
    }

    pub fn from_estimate(est: Estimate, n: usize) -> Self {
        let growth_rate = (est.mean > 0.0).then(|| est.mean.ln() / n as f64);
        CountReport { exact: None, estimate: Some(est), growth_rate }
    }

    pub fn count(&self) -> Option<&BigUint> {
        match &self.exact {
            Some(Exact::Integer(c)) => Some(c),
            _ => None,
        }
    }
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Evaluates the good-model criterion for many labelings on one `(σ, M, k, ε)`.
pub struct GoodModelTest<'a> {
    sigma: &'a Homomorphism,
    planted: Option<(Vec<usize>, usize)>,
    a_size: usize,
    kind: Kind<'a>,
}

enum Kind<'a> {
    /// `k = 0`: integer-scaled comparison `Σ |c L − n L W| < 2 ε n L`.
    Level0 { q: usize, scaled: Vec<Vec<i128>>, scale: i128, threshold: i128 },
    Ball { pts: Vec<Vec<usize>>, q: usize, bs: usize, mass: BallMass<'a>, cache: HashMap<(usize, usize, usize), Q>, eps: Q },
}

impl<'a> GoodModelTest<'a> {
    /// With `planted = Some(y)` the measure must live on `A × B` and labelings `x ∈ A^n` are
    /// tested through the pair `(x, y)`.
    pub fn new(sigma: &'a Homomorphism, m: &'a MarkovMeasure, k: usize, eps: &Q, planted: Option<&Labeling>) -> Result<Self> {
        if m.rank() != sigma.rank() {
            return Err(Error::ShapeMismatch("measure and homomorphism ranks differ".into()));
        }
        let alph = m.alphabet();
        let q = alph.size();
        let (a_size, planted) = match planted {
            None => (q, None),
            Some(y) => {
                let f = alph
                    .factors()
                    .filter(|f| f.len() == 2)
                    .ok_or_else(|| Error::ShapeMismatch("planted counting needs an A×B measure".into()))?;
                if !y.alphabet.same_symbols(&f[1]) || y.n() != sigma.n() {
                    return Err(Error::ShapeMismatch("planted labeling does not match B".into()));
                }
                (f[0].size(), Some((y.symbols.clone(), f[1].size())))
            }
        };
        let n = sigma.n() as i128;
        let kind = if k == 0 {
            let mut l = BigInt::from(eps.denom().clone());
            for i in 0..m.rank() {
                for v in m.weight().edge(i).values() {
                    l = l.lcm(v.denom());
                }
            }
            let scale = l.to_i128().ok_or(Error::BudgetExceeded {
                what: "common denominator",
                needed: l.to_string(),
                limit: i64::MAX as u64,
            })?;
            let scaled = (0..m.rank())
                .map(|i| {
                    let mut t = vec![0i128; q * q];
                    for ((a, b), v) in m.weight().edge(i) {
                        let s = v * Q::from_integer(BigInt::from(scale * n));
                        t[a * q + b] = s.to_integer().to_i128().expect("fits");
                    }
                    t
                })
                .collect();
            let th = eps * Q::from_integer(BigInt::from(2 * n * scale));
            let threshold = if th.is_integer() {
                th.to_integer().to_i128().unwrap_or(i128::MAX)
            } else {
                th.ceil().to_integer().to_i128().unwrap_or(i128::MAX)
            };
            Kind::Level0 { q, scaled, scale, threshold }
        } else {
            let tree = Subtree::ball(sigma.rank(), k);
            Kind::Ball {
                pts: ball_points(sigma, &tree),
                q,
                bs: tree.len(),
                mass: BallMass::new(m, k),
                cache: HashMap::new(),
                eps: eps.clone(),
            }
        };
        Ok(GoodModelTest { sigma, planted, a_size, kind })
    }

    /// Size of the alphabet labelings are drawn from.
    pub fn label_alphabet_size(&self) -> usize {
        self.a_size
    }

    fn joint(&self, x: &[usize]) -> Vec<usize> {
        match &self.planted {
            None => x.to_vec(),
            Some((y, nb)) => x.iter().zip(y).map(|(a, b)| a * nb + b).collect(),
        }
    }

    /// Whether `d*_k < ε` for labeling `x`.
    pub fn accepts(&mut self, x: &[usize]) -> bool {
        let labels = self.joint(x);
        let sigma = self.sigma;
        match &mut self.kind {
            Kind::Level0 { q, scaled, scale, threshold } => {
                let q = *q;
                let mut total: i128 = 0;
                let mut c = vec![0i128; q * q];
                for (i, t) in scaled.iter().enumerate() {
                    c.iter_mut().for_each(|v| *v = 0);
                    let p = sigma.perm(i);
                    for (j, &a) in labels.iter().enumerate() {
                        c[a * q + labels[p[j]]] += 1;
                    }
                    for (cv, tv) in c.iter().zip(t) {
                        total += (cv * *scale - tv).abs();
                    }
                    if total >= *threshold {
                        return false;
                    }
                }
                total < *threshold
            }
            Kind::Ball { pts, q, bs, mass, cache, eps } => {
                let q = *q;
                let codes: Vec<usize> = pts
                    .iter()
                    .map(|row| row.iter().fold(0usize, |acc, &p| acc * q + labels[p]))
                    .collect();
                let counts = pair_counts(sigma, &codes);
                let n = BigInt::from(labels.len());
                let mut total = Q::zero();
                for (i, c) in counts.iter().enumerate() {
                    let mut covered = Q::zero();
                    for (&(a, a2), &cnt) in c {
                        let w = cache
                            .entry((i, a, a2))
                            .or_insert_with(|| {
                                mass.edge_mass(i, &decode_digits(a, q, *bs), &decode_digits(a2, q, *bs))
                            })
                            .clone();
                        total += (Q::new(BigInt::from(cnt), n.clone()) - &w).abs();
                        covered += w;
                    }
                    total += Q::one() - covered;
                }
                total / Q::from_integer(BigInt::from(2)) < *eps
            }
        }
    }
}

/// Visits every labeling in `Ω*_k(σ, α, ε)` (planted: every `x` with `(x, y)` in it).
pub fn scan_good_models(
    sigma: &Homomorphism,
    m: &MarkovMeasure,
    k: usize,
    eps: &Q,
    planted: Option<&Labeling>,
    budget: &Budget,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    let mut test = GoodModelTest::new(sigma, m, k, eps, planted)?;
    let n = sigma.n();
    let a = test.label_alphabet_size();
    budget.check_enumeration((a as f64).powi(n as i32), "good-model enumeration")?;
    let mut x = vec![0usize; n];
    loop {
        if test.accepts(&x) {
            visit(&x);
        }
        let mut p = n;
        loop {
            if p == 0 {
                return Ok(());
            }
            p -= 1;
            x[p] += 1;
            if x[p] < a {
                break;
            }
            x[p] = 0;
        }
    }
}

/// Exact `|Ω*_k(σ, α, ε)|`, or the planted count when `planted` is given.
pub fn enumerate_good_models(
    sigma: &Homomorphism,
    m: &MarkovMeasure,
    k: usize,
    eps: &Q,
    planted: Option<&Labeling>,
    budget: &Budget,
) -> Result<CountReport> {
    let mut c: u64 = 0;
    scan_good_models(sigma, m, k, eps, planted, budget, |_| c += 1)?;
    Ok(CountReport::exact_integer(BigUint::from(c), sigma.n()))
}

/// Members of `Ω*_k(σ, α, ε)` as labelings over `alphabet`.
pub fn good_models(
    sigma: &Homomorphism,
    m: &MarkovMeasure,
    k: usize,
    eps: &Q,
    planted: Option<&Labeling>,
    budget: &Budget,
    alphabet: &Alphabet,
) -> Result<Vec<Labeling>> {
    let mut out = Vec::new();
    scan_good_models(sigma, m, k, eps, planted, budget, |x| {
        out.push(Labeling { alphabet: alphabet.clone(), symbols: x.to_vec() })
    })?;
    Ok(out)
}
