//! Random instances for property tests, self-tests and benchmarks.
//!
//! Random weights are empirical weights of random labeled permutation tuples, so every
//! generated weight is valid by construction and zero entries occur naturally.

use crate::alphabet::Alphabet;
use crate::census::empirical::empirical_weight;
use crate::markov::MarkovMeasure;
use crate::realize::Labeling;
use crate::sampler::uniform_hom;
use crate::weights::{DenominatorNWeight, Weight};
use rand::Rng;

/// Labeling whose letters follow random integer preferences in `0..=3` (some letters may be absent).
pub fn random_labeling<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, n: usize) -> Labeling {
    let q = alphabet.size();
    let mut pref: Vec<u32> = (0..q).map(|_| rng.gen_range(0..=3)).collect();
    if pref.iter().all(|&p| p == 0) {
        pref[rng.gen_range(0..q)] = 1;
    }
    let total: u32 = pref.iter().sum();
    let symbols = (0..n)
        .map(|_| {
            let mut u = rng.gen_range(0..total);
            let mut a = 0;
            while u >= pref[a] {
                u -= pref[a];
                a += 1;
            }
            a
        })
        .collect();
    Labeling { alphabet: alphabet.clone(), symbols }
}

/// Uniformly random labeling.
pub fn uniform_labeling<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, n: usize) -> Labeling {
    let q = alphabet.size();
    Labeling { alphabet: alphabet.clone(), symbols: (0..n).map(|_| rng.gen_range(0..q)).collect() }
}

pub fn random_denominator_n_weight<R: Rng + ?Sized>(
    rng: &mut R,
    r: usize,
    alphabet: &Alphabet,
    n: usize,
) -> DenominatorNWeight {
    let sigma = uniform_hom(n, r, rng);
    let x = random_labeling(rng, alphabet, n);
    empirical_weight(&sigma, &x, 0).expect("level-0 empirical weights are valid")
}

/// Random weight with denominator drawn from `[8, 120]`.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, r: usize, alphabet: &Alphabet) -> Weight {
    let n = rng.gen_range(8..=120);
    random_denominator_n_weight(rng, r, alphabet, n).into_weight()
}

/// Random weight with full vertex support.
pub fn random_full_weight<R: Rng + ?Sized>(rng: &mut R, r: usize, alphabet: &Alphabet, n: usize) -> Weight {
    let sigma = uniform_hom(n, r, rng);
    let x = uniform_labeling(rng, alphabet, n);
    empirical_weight(&sigma, &x, 0).expect("valid").into_weight()
}

pub fn random_markov<R: Rng + ?Sized>(rng: &mut R, r: usize, alphabet: &Alphabet) -> MarkovMeasure {
    MarkovMeasure::new(random_weight(rng, r, alphabet))
}

/// Random Markov measure on `range(p) × range(q)`.
pub fn random_joint_markov<R: Rng + ?Sized>(rng: &mut R, r: usize, p: usize, q: usize) -> MarkovMeasure {
    random_markov(rng, r, &Alphabet::pair(Alphabet::range(p), Alphabet::range(q)))
}
