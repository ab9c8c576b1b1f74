//! Empirical weights `W_{σ,x^k}` and the `d*_k` distance to a Markov measure.

use crate::alphabet::Alphabet;
use crate::budget::Budget;
use crate::error::Result;
use crate::markov::{ball_weight, BallMass, MarkovMeasure};
use crate::rational::Q;
use crate::realize::{ball_points, Homomorphism, Labeling};
use crate::weights::{weight_distance, DenominatorNWeight};
use crate::words::Subtree;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

pub type Counts = Vec<BTreeMap<(usize, usize), u64>>;

/// Ball codes `x^k(j)` encoded in the ball alphabet.
pub fn ball_codes(sigma: &Homomorphism, x: &Labeling, k: usize) -> Vec<usize> {
    if k == 0 {
        return x.symbols.clone();
    }
    let tree = Subtree::ball(sigma.rank(), k);
    let q = x.alphabet.size();
    ball_points(sigma, &tree)
        .iter()
        .map(|row| row.iter().fold(0usize, |acc, &p| acc * q + x.symbols[p]))
        .collect()
}

/// `counts_i(a, a') = |{j : code[j] = a, code[σ(s_i) j] = a'}|`.
pub fn pair_counts(sigma: &Homomorphism, codes: &[usize]) -> Counts {
    (0..sigma.rank())
        .map(|i| {
            let mut c = BTreeMap::new();
            for (j, &a) in codes.iter().enumerate() {
                *c.entry((a, codes[sigma.perm(i)[j]])).or_insert(0) += 1;
            }
            c
        })
        .collect()
}

pub fn empirical_counts(sigma: &Homomorphism, x: &Labeling, k: usize) -> Counts {
    pair_counts(sigma, &ball_codes(sigma, x, k))
}

/// `W_{σ,x^k}` over `A^{B(e,k)}`.
pub fn empirical_weight(sigma: &Homomorphism, x: &Labeling, k: usize) -> Result<DenominatorNWeight> {
    let alphabet = Alphabet::ball(x.alphabet.clone(), sigma.rank(), k)?;
    DenominatorNWeight::from_counts(sigma.rank(), alphabet, x.n() as u64, empirical_counts(sigma, x, k))
}

/// `d(W_{σ,x^k}, W_{α^k})`, materializing the ball weight when it fits the budget and
/// otherwise evaluating it only on the empirical support.
pub fn dstar_empirical(sigma: &Homomorphism, x: &Labeling, m: &MarkovMeasure, k: usize, budget: &Budget) -> Result<Q> {
    let emp = empirical_weight(sigma, x, k)?;
    match ball_weight(m, k, budget) {
        Ok(bw) => weight_distance(emp.weight(), &bw),
        Err(e) if e.is_budget() => Ok(dstar_sparse(sigma, x, m, k)),
        Err(e) => Err(e),
    }
}

/// `½ Σ_i [Σ_{supp} |emp − W| + 1 − Σ_{supp} W]`, exact, with `W` evaluated lazily.
pub fn dstar_sparse(sigma: &Homomorphism, x: &Labeling, m: &MarkovMeasure, k: usize) -> Q {
    let counts = empirical_counts(sigma, x, k);
    let q = x.alphabet.size();
    let bs = crate::words::ball_size(sigma.rank(), k);
    let mass = BallMass::new(m, k);
    let n = BigInt::from(x.n());
    let mut total = Q::zero();
    for (i, c) in counts.iter().enumerate() {
        let mut covered = Q::zero();
        for (&(a, a2), &cnt) in c {
            let la = crate::alphabet::decode_digits(a, q, bs);
            let lb = crate::alphabet::decode_digits(a2, q, bs);
            let w = mass.edge_mass(i, &la, &lb);
            total += (Q::new(BigInt::from(cnt), n.clone()) - &w).abs();
            covered += w;
        }
        total += Q::one() - covered;
    }
    total / Q::from_integer(BigInt::from(2))
}

/// `Σ_i ‖law of x on B(e,k) ∪ B(e,k)s_i − union marginal of M‖_TV`, read from union patterns.
pub fn dstar_by_patterns(sigma: &Homomorphism, x: &Labeling, m: &MarkovMeasure, k: usize) -> Q {
    let r = sigma.rank();
    let n = BigInt::from(x.n());
    let mut total = Q::zero();
    for i in 0..r {
        let tree = Subtree::ball_union(r, k, i);
        let pts = ball_points(sigma, &tree);
        let mut hist: HashMap<Vec<usize>, u64> = HashMap::new();
        for row in &pts {
            *hist.entry(row.iter().map(|&p| x.symbols[p]).collect()).or_insert(0) += 1;
        }
        let mut pats: Vec<(Vec<usize>, u64)> = hist.into_iter().collect();
        pats.sort();
        let mut covered = Q::zero();
        let mut l1 = Q::zero();
        for (pat, cnt) in pats {
            let w = m.labeling_mass(&tree, &pat);
            l1 += (Q::new(BigInt::from(cnt), n.clone()) - &w).abs();
            covered += w;
        }
        l1 += Q::one() - covered;
        total += l1 / Q::from_integer(BigInt::from(2));
    }
    total
}
