//! Exact-oracle checks on small random instances.

use fgel_core::census::counting::{expected_planted_count_bruteforce, expected_planted_count_exact, z_n, z_n_bruteforce, zbounds_check};
use fgel_core::census::empirical::{dstar_by_patterns, dstar_empirical, empirical_weight};
use fgel_core::markov::ball_weight;
use fgel_core::random::{random_denominator_n_weight, random_full_weight, random_labeling, random_markov};
use fgel_core::realize::{realize_weight, round_denominator_n, round_with_marginal, rounding_bound, Mode};
use fgel_core::rng::{trial_rng, TrialRng};
use fgel_core::sampler::uniform_hom;
use fgel_core::weights::{f_of_weight, project_factor, weight_distance};
use fgel_core::{Alphabet, Budget, DenominatorNWeight, Labeling, MarkovMeasure};
use rand::Rng;

pub struct Suite {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn suite(name: &'static str, ok: usize, total: usize) -> Suite {
    Suite { name, pass: ok == total, detail: format!("{ok}/{total}") }
}

pub fn run(instances: usize, seed: u64, budget: &Budget) -> Vec<Suite> {
    let t = instances;
    let b2 = Alphabet::range(2);
    let pair = Alphabet::pair(Alphabet::range(2), Alphabet::range(2));
    let mut out = Vec::new();

    let mut rng = trial_rng(seed, 1);
    let ok = (0..t)
        .filter(|_| {
            let (n, r) = (rng.gen_range(2..=4), rng.gen_range(1..=2));
            let w = random_denominator_n_weight(&mut rng, r, &b2, n);
            matches!((z_n(&w), z_n_bruteforce(&w, budget)), (Ok(a), Ok(b)) if a == b)
        })
        .count();
    out.push(suite("z_n", ok, t));

    let mut rng = trial_rng(seed, 2);
    let ok = (0..t)
        .filter(|_| {
            let (n, r) = (rng.gen_range(1..=4), rng.gen_range(1..=2));
            let w = random_denominator_n_weight(&mut rng, r, &pair, n);
            let Ok(wb) = project_factor(w.weight(), 1).and_then(|p| DenominatorNWeight::from_weight(p, n as u64)) else {
                return false;
            };
            let (s0, y0) = realize_weight::<TrialRng>(&wb, Mode::Deterministic);
            let Ok(y0) = Labeling::new(Alphabet::range(2), y0.symbols) else { return false };
            matches!(
                (expected_planted_count_exact(&w, Some((&s0, &y0))), expected_planted_count_bruteforce(&w, Some(&y0), budget)),
                (Ok(a), Ok(b)) if a == b
            )
        })
        .count();
    out.push(suite("planted_expectation", ok, t));

    let mut rng = trial_rng(seed, 3);
    let ok = (0..t)
        .filter(|_| {
            let (n, r) = (rng.gen_range(1..=60), rng.gen_range(1..=3));
            let alph = Alphabet::range(rng.gen_range(1..=3));
            zbounds_check(&random_denominator_n_weight(&mut rng, r, &alph, n)).pass
        })
        .count();
    out.push(suite("zbounds", ok, t));

    let mut rng = trial_rng(seed, 4);
    let ok = (0..t)
        .filter(|_| {
            let r = rng.gen_range(1..=3);
            let (p, q) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let alph = Alphabet::pair(Alphabet::range(p), Alphabet::range(q));
            let den = rng.gen_range(10..=80);
            let w = random_full_weight(&mut rng, r, &alph, den);
            let n: u64 = rng.gen_range(1..=200);
            let Ok(wb_exact) = project_factor(&w, 1) else { return false };
            let Ok(wb) = round_denominator_n(&wb_exact, n) else { return false };
            let Ok(delta) = weight_distance(&wb_exact, wb.weight()) else { return false };
            match round_with_marginal(&w, &wb, n) {
                Ok(o) => {
                    project_factor(o.weight(), 1).ok().as_ref() == Some(wb.weight())
                        && weight_distance(&w, o.weight()).map(|d| d <= rounding_bound(r, &delta, p * q, n)).unwrap_or(false)
                }
                Err(_) => false,
            }
        })
        .count();
    out.push(suite("round_with_marginal", ok, t));

    let mut rng = trial_rng(seed, 5);
    let ok = (0..t)
        .filter(|_| {
            let (n, r) = (rng.gen_range(1..=100), rng.gen_range(1..=3));
            let alph = Alphabet::range(rng.gen_range(1..=4));
            let w = random_denominator_n_weight(&mut rng, r, &alph, n);
            let (s, x) = realize_weight(&w, Mode::Random(&mut rng));
            empirical_weight(&s, &x, 0)
                .and_then(|e| e.weight().relabel(alph.clone()))
                .map(|e| &e == w.weight())
                .unwrap_or(false)
        })
        .count();
    out.push(suite("realize", ok, t));

    let mut rng = trial_rng(seed, 6);
    let ok = (0..t)
        .filter(|_| {
            let m = MarkovMeasure::new(random_full_weight(&mut rng, 1, &b2, 40));
            let f0 = f_of_weight(m.weight());
            (1..=2).all(|k| ball_weight(&m, k, budget).map(|w| (f_of_weight(&w) - f0).abs() < 1e-9).unwrap_or(false))
        })
        .count();
    out.push(suite("f_invariance", ok, t));

    let mut rng = trial_rng(seed, 7);
    let ok = (0..t)
        .filter(|_| {
            let k = rng.gen_range(0..=1);
            let n = rng.gen_range(2..=30);
            let m = random_markov(&mut rng, 2, &b2);
            let sigma = uniform_hom(n, 2, &mut rng);
            let x = random_labeling(&mut rng, &b2, n);
            dstar_empirical(&sigma, &x, &m, k, budget).map(|d| d == dstar_by_patterns(&sigma, &x, &m, k)).unwrap_or(false)
        })
        .count();
    out.push(suite("dstar", ok, t));
    out
}
