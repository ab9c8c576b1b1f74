use fgel_core::census::{dstar_empirical, empirical_weight};
use fgel_core::random::{random_denominator_n_weight, random_full_weight, random_labeling, random_markov};
use fgel_core::rational::{q, to_f64};
use fgel_core::realize::*;
use fgel_core::rng::trial_rng;
use fgel_core::weights::{project_factor, weight_distance};
use fgel_core::words::ball_size;
use fgel_core::{Alphabet, Budget, DenominatorNWeight, Error, MarkovMeasure, Q};
use rand::Rng;
use std::collections::BTreeMap;

type R = fgel_core::rng::TrialRng;

#[test]
fn rounding_with_marginal_bounds_hold_on_1000_instances() {
    let mut rng = trial_rng(2024, 1);
    let mut worst = 0.0f64;
    for t in 0..1000 {
        let r = rng.gen_range(1..=2);
        let (p, qq) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let alph = Alphabet::pair(Alphabet::range(p), Alphabet::range(qq));
        let den = rng.gen_range(20..=97);
        let w = random_full_weight(&mut rng, r, &alph, den);
        let n: u64 = rng.gen_range(5..=300);
        let wb_exact = project_factor(&w, 1).unwrap();
        let wb = round_denominator_n(&wb_exact, n).unwrap();
        let delta = weight_distance(&wb_exact, wb.weight()).unwrap();
        let out = round_with_marginal(&w, &wb, n).unwrap_or_else(|e| panic!("instance {t}: {e}"));
        assert_eq!(out.n(), n);
        assert_eq!(&project_factor(out.weight(), 1).unwrap(), wb.weight());
        let d = weight_distance(&w, out.weight()).unwrap();
        let bound = rounding_bound(r, &delta, p * qq, n);
        assert!(d <= bound, "instance {t}");
        worst = worst.max(to_f64(&(&d / &bound)));
    }
    assert!(worst <= 1.0);
}

#[test]
fn singleton_marginal_reduces_to_plain_rounding() {
    let mut rng = trial_rng(5, 2);
    for _ in 0..200 {
        let r = rng.gen_range(1..=2);
        let alph = Alphabet::range(rng.gen_range(1..=4));
        let w = random_full_weight(&mut rng, r, &alph, 61);
        let n: u64 = rng.gen_range(3..=150);
        let out = round_denominator_n(&w, n).unwrap();
        let d = weight_distance(&w, out.weight()).unwrap();
        assert!(d <= rounding_bound(r, &q(0, 1), alph.size(), n));
        let s = alph.size() as i64;
        assert!(d <= Q::new((265 * r as i64 * s * s).into(), (n as i64).into()));
    }
}

#[test]
fn rounding_is_identity_on_denominator_n_input() {
    let mut rng = trial_rng(6, 3);
    for _ in 0..100 {
        let dn = random_denominator_n_weight(&mut rng, 2, &Alphabet::range(3), 24);
        assert_eq!(round_denominator_n(dn.weight(), 24).unwrap().weight(), dn.weight());
    }
}

#[test]
fn marginal_with_wrong_denominator_is_rejected() {
    let mut rng = trial_rng(7, 4);
    let alph = Alphabet::pair(Alphabet::range(2), Alphabet::range(2));
    let w = random_full_weight(&mut rng, 1, &alph, 40);
    let wb = round_denominator_n(&project_factor(&w, 1).unwrap(), 10).unwrap();
    assert!(matches!(round_with_marginal(&w, &wb, 12), Err(Error::MarginalNotDenominatorN { .. })));
}

#[test]
fn realize_examples() {
    let mut c = BTreeMap::new();
    c.insert((0, 1), 1u64);
    c.insert((1, 0), 1u64);
    let w = DenominatorNWeight::from_counts(1, Alphabet::range(2), 2, vec![c]).unwrap();
    let (sigma, x) = realize_weight::<R>(&w, Mode::Deterministic);
    assert_eq!(sigma.perm(0), &[1, 0]);
    assert_eq!(x.symbols, vec![0, 1]);

    let mut c = BTreeMap::new();
    c.insert((0, 0), 5u64);
    let w = DenominatorNWeight::from_counts(2, Alphabet::singleton(), 5, vec![c.clone(), c]).unwrap();
    let (_, x) = realize_weight(&w, Mode::Random(&mut trial_rng(1, 1)));
    assert_eq!(x.symbols, vec![0; 5]);
}

#[test]
fn realize_roundtrip_is_exact() {
    let mut rng = trial_rng(8, 5);
    for t in 0..300 {
        let r = rng.gen_range(1..=3);
        let n = if t < 100 { 6 } else { rng.gen_range(1..=60) };
        let alph = Alphabet::range(rng.gen_range(1..=4));
        let w = random_denominator_n_weight(&mut rng, r, &alph, n);
        let (s1, x1) = realize_weight::<R>(&w, Mode::Deterministic);
        assert_eq!(empirical_weight(&s1, &x1, 0).unwrap().weight().relabel(alph.clone()).unwrap(), *w.weight());
        let mut rr = trial_rng(t, 9);
        let (s2, x2) = realize_weight(&w, Mode::Random(&mut rr));
        assert_eq!(empirical_weight(&s2, &x2, 0).unwrap().weight().relabel(alph.clone()).unwrap(), *w.weight());
    }
}

#[test]
fn ball_consistency_roundtrip_and_corruption() {
    let mut rng = trial_rng(9, 6);
    for _ in 0..50 {
        let r = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=30);
        let sigma = fgel_core::sampler::uniform_hom(n, r, &mut rng);
        let x = random_labeling(&mut rng, &Alphabet::range(3), n);
        let k = rng.gen_range(0..=2);
        let mut big = ball_refine(&sigma, &x, k);
        assert_eq!(check_ball_consistency(&sigma, &big).unwrap(), x);
        if k == 0 {
            continue;
        }
        let j = rng.gen_range(0..n);
        let p = rng.gen_range(1..big.entries[j].len());
        big.entries[j][p] = (big.entries[j][p] + 1) % 3;
        match check_ball_consistency(&sigma, &big) {
            Err(Error::Inconsistent { j: jj, word }) => {
                assert_eq!(jj, j);
                assert_eq!(word, fgel_core::words::ball_words(r, k)[p].to_string());
            }
            other => panic!("corruption not detected: {other:?}"),
        }
    }
}

#[test]
fn realized_empirical_ball_weights_are_consistent() {
    let mut rng = trial_rng(10, 7);
    for t in 0..200 {
        let r = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=25);
        let s0 = fgel_core::sampler::uniform_hom(n, r, &mut rng);
        let y0 = random_labeling(&mut rng, &Alphabet::range(2), n);
        let w = empirical_weight(&s0, &y0, k).unwrap();
        let (sigma, big_y) = if t % 2 == 0 {
            realize_weight::<R>(&w, Mode::Deterministic)
        } else {
            realize_weight(&w, Mode::Random(&mut trial_rng(t, 3)))
        };
        let big = BallLabeling::from_labeling(&big_y).unwrap();
        let y = check_ball_consistency(&sigma, &big).unwrap_or_else(|e| panic!("trial {t}: {e}"));
        assert_eq!(empirical_weight(&sigma, &y, k).unwrap().weight(), w.weight());
    }
}

#[test]
fn ball_labeling_approximation_bound() {
    let mut rng = trial_rng(11, 8);
    let budget = Budget::default();
    for t in 0..150 {
        let r = rng.gen_range(1..=2);
        let k = 1;
        let n = rng.gen_range(10..=80);
        let alph = Alphabet::range(2);
        let m = random_markov(&mut rng, r, &alph);
        let sigma = fgel_core::sampler::uniform_hom(n, r, &mut rng);
        let x = random_labeling(&mut rng, &alph, n);
        let mut big = ball_refine(&sigma, &x, k);
        for _ in 0..(t % 5) {
            let j = rng.gen_range(0..n);
            let p = rng.gen_range(0..big.entries[j].len());
            big.entries[j][p] ^= 1;
        }
        let big_l = big.to_labeling().unwrap();
        let w_big = empirical_weight(&sigma, &big_l, 0).unwrap();
        let bw = fgel_core::markov::ball_weight(&m, k, &budget).unwrap();
        let eps = weight_distance(w_big.weight(), &bw).unwrap();
        let root = fgel_core::realize::Labeling::new(alph.clone(), big.entries.iter().map(|e| e[0]).collect()).unwrap();
        let refined = empirical_weight(&sigma, &root, k).unwrap();
        let lhs = weight_distance(w_big.weight().relabel(refined.alphabet().clone()).as_ref().unwrap(), refined.weight()).unwrap();
        let c = Q::from_integer(((2 * r * ball_size(r, k)) as i64).into());
        assert!(lhs <= c * &eps, "trial {t}");
        let d_root = dstar_empirical(&sigma, &root, &m, k, &budget).unwrap();
        let c1 = Q::from_integer(((1 + 2 * r * ball_size(r, k)) as i64).into());
        assert!(d_root <= c1 * eps);
    }
}

fn nonvacuity_k0(n: usize) -> f64 {
    let mut rng = trial_rng(12, n as u64);
    let m = MarkovMeasure::new(random_full_weight(&mut rng, 2, &Alphabet::range(2), 37));
    let wn = round_denominator_n(m.weight(), n as u64).unwrap();
    let (sigma, y) = realize_weight(&wn, Mode::Random(&mut rng));
    let d = dstar_empirical(&sigma, &y, &m, 0, &Budget::default()).unwrap();
    assert_eq!(d, weight_distance(wn.weight(), m.weight()).unwrap());
    assert!(d <= rounding_bound(2, &q(0, 1), 2, n as u64));
    to_f64(&d)
}

#[test]
fn nonvacuity_pipeline_level_zero() {
    let d: Vec<f64> = [50, 100, 200].iter().map(|&n| nonvacuity_k0(n)).collect();
    for (n, v) in [50.0, 100.0, 200.0].iter().zip(&d) {
        assert!(*v <= 2.0 * 2.0 * 4.0 / n, "n={n}: {v}");
    }
}

#[test]
fn nonvacuity_pipeline_ball_alphabet() {
    for n in [50usize, 100, 200] {
        let mut rng = trial_rng(13, n as u64);
        let m = MarkovMeasure::new(random_full_weight(&mut rng, 2, &Alphabet::range(2), 37));
        let wn = round_denominator_n(m.weight(), n as u64).unwrap();
        let (s0, y0) = realize_weight(&wn, Mode::Random(&mut rng));
        let ball_w = empirical_weight(&s0, &y0, 1).unwrap();
        let (sigma, big_y) = realize_weight(&ball_w, Mode::Random(&mut rng));
        let y = check_ball_consistency(&sigma, &BallLabeling::from_labeling(&big_y).unwrap()).unwrap();
        let d1 = dstar_empirical(&sigma, &y, &m, 1, &Budget::default()).unwrap();
        let d1_0 = dstar_empirical(&s0, &y0, &m, 1, &Budget::default()).unwrap();
        assert_eq!(d1, d1_0);
        let d0 = dstar_empirical(&sigma, &y, &m, 0, &Budget::default()).unwrap();
        assert!(d0 <= d1);
    }
}
