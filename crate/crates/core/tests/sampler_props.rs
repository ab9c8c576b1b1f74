use fgel_core::census::empirical_weight;
use fgel_core::random::{random_full_weight, random_labeling};
use fgel_core::realize::{realize_weight, round_denominator_n, Homomorphism, Labeling, Mode};
use fgel_core::rng::trial_rng;
use fgel_core::sampler::*;
use fgel_core::words::{ball_words, Word};
use fgel_core::{Alphabet, Budget, DenominatorNWeight, Error};
use std::collections::{BTreeMap, HashMap};

fn within_3_sigma(counts: &HashMap<Vec<Vec<usize>>, u64>, cells: usize, total: u64) {
    assert_eq!(counts.len(), cells, "support size");
    let p = 1.0 / cells as f64;
    let mean = total as f64 * p;
    let sd = (total as f64 * p * (1.0 - p)).sqrt();
    for (k, &c) in counts {
        assert!((c as f64 - mean).abs() <= 3.0 * sd, "{k:?}: {c} vs {mean} ± {}", 3.0 * sd);
    }
}

#[test]
fn uniform_hom_trivial_and_multinomial() {
    let mut rng = trial_rng(1, 0);
    assert_eq!(uniform_hom(1, 2, &mut rng), Homomorphism::identity(1, 2));

    let mut counts = HashMap::new();
    for _ in 0..60_000 {
        *counts.entry(uniform_hom(3, 1, &mut rng).perms().to_vec()).or_insert(0) += 1;
    }
    within_3_sigma(&counts, 6, 60_000);

    let mut counts = HashMap::new();
    for _ in 0..40_000 {
        *counts.entry(uniform_hom(2, 2, &mut rng).perms().to_vec()).or_insert(0) += 1;
    }
    within_3_sigma(&counts, 4, 40_000);
}

fn counts_weight(r: usize, q: usize, n: u64, cells: &[(usize, usize, u64)]) -> DenominatorNWeight {
    let mut c = BTreeMap::new();
    for &(a, b, v) in cells {
        c.insert((a, b), v);
    }
    DenominatorNWeight::from_counts(r, Alphabet::range(q), n, vec![c; r]).unwrap()
}

#[test]
fn k0_constant_labels_reduce_to_uniform() {
    let y = Labeling::new(Alphabet::range(1), vec![0; 3]).unwrap();
    let w = counts_weight(1, 1, 3, &[(0, 0, 3)]);
    let mut rng = trial_rng(2, 0);
    let mut counts = HashMap::new();
    for _ in 0..30_000 {
        *counts.entry(sbm_sample_k0(&y, &w, &mut rng).unwrap().perms().to_vec()).or_insert(0) += 1;
    }
    within_3_sigma(&counts, 6, 30_000);
}

#[test]
fn k0_forced_swap() {
    let y = Labeling::new(Alphabet::range(2), vec![0, 1]).unwrap();
    let w = counts_weight(2, 2, 2, &[(0, 1, 1), (1, 0, 1)]);
    let mut rng = trial_rng(3, 0);
    for _ in 0..100 {
        let s = sbm_sample_k0(&y, &w, &mut rng).unwrap();
        assert_eq!(s.perms(), &[vec![1, 0], vec![1, 0]]);
    }
}

#[test]
fn k0_uniform_on_sixteen_element_fiber() {
    let y = Labeling::new(Alphabet::range(2), vec![0, 0, 1, 1]).unwrap();
    let w = counts_weight(1, 2, 4, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
    let spec = SbmSpec::new(y.clone(), 0, w.clone(), None).unwrap();
    let fiber: Vec<Vec<usize>> = all_permutations(4)
        .into_iter()
        .filter(|p| spec.satisfied_by(&Homomorphism::new(vec![p.clone()]).unwrap()))
        .collect();
    assert_eq!(fiber.len(), 16);
    let mut rng = trial_rng(4, 0);
    let mut counts = HashMap::new();
    for _ in 0..64_000 {
        let s = sbm_sample_k0(&y, &w, &mut rng).unwrap();
        assert!(fiber.contains(&s.perms()[0]));
        *counts.entry(s.perms().to_vec()).or_insert(0) += 1;
    }
    within_3_sigma(&counts, 16, 64_000);
}

#[test]
fn k0_frequency_mismatch() {
    let y = Labeling::new(Alphabet::range(2), vec![0, 0, 0, 1]).unwrap();
    let w = counts_weight(1, 2, 4, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
    assert!(matches!(sbm_sample_k0(&y, &w, &mut trial_rng(0, 0)), Err(Error::FrequencyMismatch)));
}

#[test]
fn enumerate_matches_bruteforce_fiber() {
    let mut rng = trial_rng(5, 0);
    for _ in 0..20 {
        let s0 = uniform_hom(3, 1, &mut rng);
        let y0 = random_labeling(&mut rng, &Alphabet::range(2), 3);
        let target = empirical_weight(&s0, &y0, 1).unwrap();
        let brute: Vec<Homomorphism> = all_permutations(3)
            .into_iter()
            .map(|p| Homomorphism::new(vec![p]).unwrap())
            .filter(|h| empirical_weight(h, &y0, 1).unwrap().weight() == target.weight())
            .collect();
        let spec = SbmSpec::new(y0.clone(), 1, target, Some(s0.clone())).unwrap();
        let sampler = SbmSampler::new(spec.clone(), SbmMethod::Enumerate, &Budget::default()).unwrap();
        assert_eq!(sampler.fiber().unwrap(), brute.as_slice());
        for _ in 0..20 {
            let s = sbm_sample(&spec, &mut rng, SbmMethod::Auto, &Budget::default()).unwrap();
            assert!(brute.contains(&s));
        }
    }
}

#[test]
fn reject_is_uniform_on_fiber() {
    let mut rng = trial_rng(6, 0);
    let s0 = Homomorphism::new(vec![vec![1, 2, 3, 0]]).unwrap();
    let y0 = Labeling::new(Alphabet::range(2), vec![0, 0, 1, 1]).unwrap();
    let spec = SbmSpec::from_reference(s0, y0, 1).unwrap();
    let fiber = SbmSampler::new(spec.clone(), SbmMethod::Enumerate, &Budget::default())
        .unwrap()
        .fiber()
        .unwrap()
        .to_vec();
    let sampler = SbmSampler::new(spec, SbmMethod::DEFAULT_REJECT, &Budget::default()).unwrap();
    let mut counts = HashMap::new();
    let total = 8000 * fiber.len() as u64;
    for _ in 0..total {
        let s = sampler.sample_exact(&mut rng).unwrap();
        assert!(fiber.contains(&s));
        *counts.entry(s.perms().to_vec()).or_insert(0) += 1;
    }
    within_3_sigma(&counts, fiber.len(), total);
}

#[test]
fn auto_resolves_by_size() {
    let mut rng = trial_rng(7, 0);
    let s0 = uniform_hom(4, 2, &mut rng);
    let y0 = random_labeling(&mut rng, &Alphabet::range(2), 4);
    let b = Budget::default();
    let k0 = SbmSpec::from_reference(s0.clone(), y0.clone(), 0).unwrap();
    assert_eq!(SbmSampler::new(k0, SbmMethod::Auto, &b).unwrap().method(), SbmMethod::Auto);
    let k1 = SbmSpec::from_reference(s0, y0, 1).unwrap();
    assert_eq!(SbmSampler::new(k1, SbmMethod::Auto, &b).unwrap().method(), SbmMethod::Enumerate);
    let s1 = uniform_hom(12, 2, &mut rng);
    let y1 = random_labeling(&mut rng, &Alphabet::range(2), 12);
    let big = SbmSpec::from_reference(s1, y1, 1).unwrap();
    assert_eq!(SbmSampler::new(big, SbmMethod::Auto, &b).unwrap().method(), SbmMethod::DEFAULT_REJECT);
}

#[test]
fn mcmc_stays_in_fiber() {
    let mut rng = trial_rng(8, 0);
    for t in 0..5 {
        let n = 8 + 2 * t;
        let s0 = uniform_hom(n, 2, &mut rng);
        let y0 = random_labeling(&mut rng, &Alphabet::range(2), n);
        let spec = SbmSpec::from_reference(s0, y0, 1).unwrap();
        let mut sampler = SbmSampler::new(spec.clone(), SbmMethod::Mcmc { burn_in: 200, stride: 20 }, &Budget::default()).unwrap();
        for _ in 0..50 {
            assert!(spec.satisfied_by(&sampler.sample(&mut rng).unwrap()));
        }
    }
}

#[test]
fn mcmc_needs_reference() {
    let y = Labeling::new(Alphabet::range(2), vec![0, 0, 1, 1]).unwrap();
    let w = counts_weight(1, 2, 4, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
    let spec = SbmSpec::new(y, 0, w, None).unwrap();
    assert!(matches!(
        SbmSampler::new(spec, SbmMethod::DEFAULT_MCMC, &Budget::default()),
        Err(Error::EmptyFiber)
    ));
}

#[test]
fn bad_reference_is_rejected() {
    let y = Labeling::new(Alphabet::range(2), vec![0, 0, 1, 1]).unwrap();
    let w = counts_weight(1, 2, 4, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
    assert!(matches!(SbmSpec::new(y, 0, w, Some(Homomorphism::identity(4, 1))), Err(Error::EmptyFiber)));
}

fn sofic_rate(trials: u64, mut draw: impl FnMut(u64) -> Homomorphism) -> f64 {
    let d: Vec<Word> = ball_words(2, 1).into_iter().filter(|w| !w.is_identity()).collect();
    let hits = (0..trials).filter(|&t| is_sofic(&draw(t), &d, 0.2).0).count();
    hits as f64 / trials as f64
}

fn nondecreasing_within_error(rates: &[f64], trials: u64) {
    for w in rates.windows(2) {
        let se = ((w[0] * (1.0 - w[0]) + w[1] * (1.0 - w[1])) / trials as f64).sqrt();
        assert!(w[1] >= w[0] - 3.0 * se - 1e-12, "{rates:?}");
    }
}

#[test]
fn soficity_nondecreasing_for_uniform_homs() {
    let rates: Vec<f64> = [40usize, 60, 80]
        .iter()
        .map(|&n| sofic_rate(500, |t| uniform_hom(n, 2, &mut trial_rng(9, stream_of(n, t)))))
        .collect();
    nondecreasing_within_error(&rates, 500);
}

#[test]
fn soficity_nondecreasing_for_block_models() {
    let rates: Vec<f64> = [40usize, 60, 80]
        .iter()
        .map(|&n| {
            let mut rng = trial_rng(10, n as u64);
            let w = random_full_weight(&mut rng, 2, &Alphabet::range(2), 29);
            let wn = round_denominator_n(&w, n as u64).unwrap();
            let (_, y) = realize_weight(&wn, Mode::Random(&mut rng));
            sofic_rate(500, |t| sbm_sample_k0(&y, &wn, &mut trial_rng(10, stream_of(n, t))).unwrap())
        })
        .collect();
    nondecreasing_within_error(&rates, 500);
}

fn stream_of(n: usize, t: u64) -> u64 {
    fgel_core::rng::stream_key(n as u64, t)
}

#[test]
fn sofic_examples() {
    let d = vec![Word::parse("s1", 1).unwrap()];
    assert_eq!(is_sofic(&Homomorphism::identity(7, 1), &d, 0.5), (false, 0.0));
    let cycle = Homomorphism::new(vec![(1..=9).map(|j| j % 9).collect()]).unwrap();
    assert_eq!(is_sofic(&cycle, &d, 1e-6), (true, 1.0));
    let with_e = vec![Word::parse("e", 1).unwrap(), Word::parse("s1", 1).unwrap()];
    assert_eq!(is_sofic(&cycle, &with_e, 1e-6), (true, 1.0));
}
