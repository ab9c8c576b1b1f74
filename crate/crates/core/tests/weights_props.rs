use fgel_core::json::{parse_weight, weight_to_json, WeightJson};
use fgel_core::random::{random_denominator_n_weight, random_weight};
use fgel_core::rational::{q, to_f64};
use fgel_core::rng::trial_rng;
use fgel_core::weights::*;
use fgel_core::{Alphabet, Weight};
use proptest::prelude::*;
use rand::Rng;

fn any_weight(seed: u64) -> Weight {
    let mut rng = trial_rng(seed, 1);
    let r = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=4);
    random_weight(&mut rng, r, &Alphabet::range(m))
}

#[test]
fn pushforward_preserves_axiom_on_1000_instances() {
    for s in 0..1000u64 {
        let w = any_weight(s);
        let mut rng = trial_rng(s, 2);
        let m = w.alphabet().size();
        let t = rng.gen_range(1..=3);
        let map: Vec<usize> = (0..m).map(|_| rng.gen_range(0..t)).collect();
        let p = pushforward_weight(&w, Alphabet::range(t), |a| map[a]);
        let dense = (0..w.rank()).map(|i| p.dense_edge(i)).collect();
        let again = validate_weight(w.rank(), Alphabet::range(t), dense).expect("pushforward is a weight");
        for b in 0..t {
            let direct: fgel_core::Q = (0..m).filter(|&a| map[a] == b).map(|a| w.vertex_mass(a)).sum();
            assert_eq!(again.vertex_mass(b), direct);
        }
    }
}

#[test]
fn product_projection_matches_bruteforce_sum() {
    for s in 0..50u64 {
        let mut rng = trial_rng(s, 3);
        let r = rng.gen_range(1..=2);
        let ab = Alphabet::pair(Alphabet::range(2), Alphabet::range(3));
        let w = random_weight(&mut rng, r, &ab);
        let pb = project_factor(&w, 1).unwrap();
        for i in 0..r {
            for b1 in 0..3 {
                for b2 in 0..3 {
                    let mut sum = q(0, 1);
                    for a1 in 0..2 {
                        for a2 in 0..2 {
                            sum += w.entry(i, a1 * 3 + b1, a2 * 3 + b2);
                        }
                    }
                    assert_eq!(pb.entry(i, b1, b2), sum);
                }
            }
        }
    }
}

#[test]
fn trivial_pushforwards() {
    let w = any_weight(5);
    assert_eq!(pushforward_weight(&w, w.alphabet().clone(), |a| a), w);
    let t = pushforward_weight(&w, Alphabet::singleton(), |_| 0);
    for i in 0..w.rank() {
        assert_eq!(t.entry(i, 0, 0), q(1, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_pseudometric(s1 in 0u64..10_000, s2 in 0u64..10_000, s3 in 0u64..10_000, r in 1usize..=2, m in 1usize..=3) {
        let a = Alphabet::range(m);
        let w1 = random_weight(&mut trial_rng(s1, 0), r, &a);
        let w2 = random_weight(&mut trial_rng(s2, 0), r, &a);
        let w3 = random_weight(&mut trial_rng(s3, 0), r, &a);
        let d12 = weight_distance(&w1, &w2).unwrap();
        prop_assert_eq!(&d12, &weight_distance(&w2, &w1).unwrap());
        prop_assert_eq!(weight_distance(&w1, &w1).unwrap(), q(0, 1));
        let d13 = weight_distance(&w1, &w3).unwrap();
        let d23 = weight_distance(&w2, &w3).unwrap();
        prop_assert!(d13 <= &d12 + &d23);
        prop_assert!(d12 <= q(r as i64, 1));
    }

    #[test]
    fn f_continuity(s1 in 0u64..10_000, s2 in 0u64..10_000, r in 1usize..=3, m in 2usize..=4, mix in 0u32..=16) {
        let a = Alphabet::range(m);
        let w1 = random_weight(&mut trial_rng(s1, 7), r, &a);
        let w2 = random_weight(&mut trial_rng(s2, 7), r, &a);
        // convex combination keeps the pair close
        let t = q(mix as i64, 16);
        let edges = (0..r).map(|i| {
            let mut e = Entries::new();
            for x in 0..m { for y in 0..m {
                let v = (q(1, 1) - &t) * w1.entry(i, x, y) + &t * w2.entry(i, x, y);
                e.insert((x, y), v);
            }}
            e
        }).collect();
        let w3 = Weight::from_entries(r, a.clone(), edges).unwrap();
        let eps = to_f64(&weight_distance(&w1, &w3).unwrap());
        prop_assume!(eps <= 1.0);
        let diff = (f_of_weight(&w1) - f_of_weight(&w3)).abs();
        prop_assert!(diff <= f_continuity_bound(r, eps, m) + 1e-9, "diff {} eps {}", diff, eps);
    }

    #[test]
    fn json_roundtrip_is_bit_exact(s in 0u64..10_000, r in 1usize..=3, m in 1usize..=4, n in 1usize..=30) {
        let w = random_denominator_n_weight(&mut trial_rng(s, 9), r, &Alphabet::range(m), n);
        let j = WeightJson::from_weight(w.weight(), Some(w.n()), false).unwrap();
        let text = serde_json::to_string(&j).unwrap();
        let back: WeightJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &j);
        let dn = back.to_denominator_n().unwrap();
        prop_assert_eq!(&dn, &w);
        let text2 = weight_to_json(dn.weight()).unwrap();
        prop_assert_eq!(parse_weight(&text2).unwrap(), w.weight().clone());
    }
}

#[test]
fn uniform_f_is_ln2() {
    let w = validate_weight(2, Alphabet::range(2), vec![vec![vec![q(1, 4); 2]; 2]; 2]).unwrap();
    assert!((f_of_weight(&w) - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((f_of_weight(&w) - 0.693147).abs() < 1e-6);
}

#[test]
fn axiom_violation_names_generators_and_symbol() {
    let e = validate_weight(
        2,
        Alphabet::atomic(["x", "y"]).unwrap(),
        vec![vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]], vec![vec![q(1, 4); 2]; 2]],
    )
    .unwrap_err();
    assert_eq!(e.to_string(), "weight axiom violated: row sum of generator 1 differs from column sum of generator 2 at symbol x");
}

#[test]
fn projections_of_ball_weights() {
    use fgel_core::census::empirical_weight;
    use fgel_core::random::random_labeling;
    use fgel_core::sampler::uniform_hom;
    let mut rng = trial_rng(3, 3);
    let sigma = uniform_hom(20, 2, &mut rng);
    let x = random_labeling(&mut rng, &Alphabet::range(2), 20);
    let w2 = empirical_weight(&sigma, &x, 2).unwrap();
    let w1 = empirical_weight(&sigma, &x, 1).unwrap();
    let w0 = empirical_weight(&sigma, &x, 0).unwrap();
    assert_eq!(&project_radius(w2.weight(), 1).unwrap(), w1.weight());
    assert_eq!(&project_root(w2.weight()), w0.weight());
}
