use crate::args::{Cli, Command, Format, MethodArg};
use crate::output::{emit, growth_csv, growth_json, json, num};
use crate::{selftest, CliError};
use fgel_core::budget::{DEFAULT_ATOMS, DEFAULT_ENUMERATION};
use fgel_core::census::counting::{expected_planted_count_bruteforce, expected_planted_count_exact, z_n, z_n_bruteforce, zbounds_check};
use fgel_core::census::experiment::{growth_rate_experiment, GrowthConfig, GrowthTarget, SamplerChoice};
use fgel_core::census::good_models::{enumerate_good_models, good_models};
use fgel_core::census::joining::{joining_search, JoiningOptions};
use fgel_core::json::{self as fj, HomJson, LabelingJson, SbmSpecJson, WeightJson};
use fgel_core::markov::{ball_weight, f_of_observable};
use fgel_core::rational::{format_q, parse_q, to_f64};
use fgel_core::realize::{realize_weight, round_denominator_n, round_with_marginal, Mode};
use fgel_core::rng::{trial_rng, TrialRng};
use fgel_core::sampler::{is_sofic, uniform_hom, SbmMethod, SbmSampler};
use fgel_core::weights::{f_of_weight, weight_distance};
use fgel_core::words::ball_words;
use fgel_core::{Budget, MarkovMeasure, Observable, Word, Q};
use serde_json::json;
use std::path::Path;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let budget = Budget {
        atoms: g.budget_atoms.unwrap_or(DEFAULT_ATOMS),
        enumeration: g.budget_enum.unwrap_or(DEFAULT_ENUMERATION),
    };
    if g.format == Some(Format::Csv) && !matches!(cli.command, Command::Growth { .. }) {
        return Err(CliError::Usage("csv output is only available for `growth`".into()));
    }
    match &cli.command {
        Command::Validate { weight, n } => {
            let w = load_weight(weight)?;
            let mut out = json!({
                "valid": true,
                "rank": w.rank(),
                "alphabet_size": w.alphabet().size(),
                "F": num(f_of_weight(&w)),
            });
            if let Some(n) = n {
                fgel_core::DenominatorNWeight::from_weight(w, *n)?;
                out["n"] = json!(n);
            }
            emit(g, &json(&out))
        }
        Command::Fw { weight, k } => {
            let w = load_weight(weight)?;
            let out = match k {
                None => json!({ "F": num(f_of_weight(&w)) }),
                Some(k) => {
                    let m = MarkovMeasure::new(w.clone());
                    let fk = match ball_weight(&m, *k, &budget) {
                        Ok(bw) => f_of_weight(&bw),
                        Err(e) if e.is_budget() => f_of_observable(&m, &Observable::Identity.ball(*k), &budget)?,
                        Err(e) => return Err(e.into()),
                    };
                    json!({ "F": num(f_of_weight(&w)), "k": k, "F_k": num(fk) })
                }
            };
            emit(g, &json(&out))
        }
        Command::Round { weight, n } => {
            let w = load_weight(weight)?;
            let d = round_denominator_n(&w, *n)?;
            eprintln!("distance {}", format_q(&weight_distance(&w, d.weight())?));
            emit(g, &fj::denominator_n_to_json(&d)?)
        }
        Command::RoundMarginal { weight, marginal, n } => {
            let w = load_weight(weight)?;
            let wb = load::<WeightJson>(marginal)?;
            let wb = match wb.n {
                Some(_) => wb.to_denominator_n()?,
                None => fgel_core::DenominatorNWeight::from_weight(wb.to_weight()?, *n)?,
            };
            let out = round_with_marginal(&w, &wb, *n)?;
            eprintln!("distance {}", format_q(&weight_distance(&w, out.weight())?));
            emit(g, &fj::denominator_n_to_json(&out)?)
        }
        Command::Realize { weight, random } => {
            let d = load::<WeightJson>(weight)?.to_denominator_n()?;
            let (s, x) = if *random {
                realize_weight(&d, Mode::Random(&mut trial_rng(g.seed, 0)))
            } else {
                realize_weight::<TrialRng>(&d, Mode::Deterministic)
            };
            emit(g, &json(&json!({ "hom": HomJson::from_hom(&s), "labeling": LabelingJson::from_labeling(&x) })))
        }
        Command::SampleUniform { n, rank, count } => {
            let samples: Vec<HomJson> = (0..*count)
                .map(|t| HomJson::from_hom(&uniform_hom(*n, *rank, &mut trial_rng(g.seed, t as u64))))
                .collect();
            emit(g, &json(&json!({ "samples": samples })))
        }
        Command::SampleSbm { spec, method, count, max_attempts, burn_in, stride } => {
            let spec = load::<SbmSpecJson>(spec)?.to_spec()?;
            let method = match method {
                MethodArg::Auto => SbmMethod::Auto,
                MethodArg::Enumerate => SbmMethod::Enumerate,
                MethodArg::Reject => SbmMethod::Reject { max_attempts: *max_attempts },
                MethodArg::Mcmc => SbmMethod::Mcmc { burn_in: *burn_in, stride: *stride },
            };
            let mut sampler = SbmSampler::new(spec, method, &budget)?;
            let mut rng = trial_rng(g.seed, 0);
            let samples = (0..*count)
                .map(|_| sampler.sample(&mut rng).map(|h| HomJson::from_hom(&h)))
                .collect::<fgel_core::Result<Vec<_>>>()?;
            let resolved = sampler.method();
            emit(
                g,
                &json(&json!({
                    "method": method_name(resolved),
                    "exact": resolved.is_exact(),
                    "samples": samples,
                })),
            )
        }
        Command::Sofic { hom, n, rank, trials, words, ball, delta } => {
            let hom = hom.as_deref().map(|p| load::<HomJson>(p)?.to_hom().map_err(CliError::from)).transpose()?;
            let r = match (&hom, rank) {
                (Some(h), _) => h.rank(),
                (None, Some(r)) => *r,
                (None, None) => return Err(CliError::Usage("--rank is required without --hom".into())),
            };
            let d = word_set(words.as_deref(), *ball, r)?;
            let out = match hom {
                Some(h) => {
                    let (ok, frac) = is_sofic(&h, &d, *delta);
                    json!({ "sofic": ok, "free_fraction": num(frac), "words": d.len() })
                }
                None => {
                    let n = n.ok_or_else(|| CliError::Usage("--n is required without --hom".into()))?;
                    let (mut hits, mut frac_sum) = (0u64, 0.0);
                    for t in 0..*trials {
                        let (ok, frac) = is_sofic(&uniform_hom(n, r, &mut trial_rng(g.seed, t)), &d, *delta);
                        hits += ok as u64;
                        frac_sum += frac;
                    }
                    json!({
                        "trials": trials,
                        "sofic": hits,
                        "rate": num(hits as f64 / *trials as f64),
                        "mean_free_fraction": num(frac_sum / *trials as f64),
                        "words": d.len(),
                    })
                }
            };
            emit(g, &json(&out))
        }
        Command::Zn { weight, brute_force } => {
            let d = load::<WeightJson>(weight)?.to_denominator_n()?;
            let z = if *brute_force { z_n_bruteforce(&d, &budget)? } else { z_n(&d)? };
            emit(g, &z.to_string())
        }
        Command::Zbounds { weight } => {
            let d = load::<WeightJson>(weight)?.to_denominator_n()?;
            let z = zbounds_check(&d);
            emit(
                g,
                &json(&json!({
                    "pass": z.pass,
                    "log_ratio": num(z.log_ratio),
                    "lower_slack": num(z.lower_slack),
                    "upper_slack": num(z.upper_slack),
                })),
            )
        }
        Command::ExpectedCount { weight, witness_hom, witness_labeling, brute_force } => {
            let d = load::<WeightJson>(weight)?.to_denominator_n()?;
            let b_alph = d.alphabet().factors().filter(|f| f.len() == 2).map(|f| f[1].clone());
            let witness = match (witness_hom, witness_labeling) {
                (Some(h), Some(y)) => {
                    let h = load::<HomJson>(h)?.to_hom()?;
                    let y = load::<LabelingJson>(y)?.to_labeling(b_alph.as_ref())?;
                    Some((h, y))
                }
                _ => None,
            };
            let e = expected_planted_count_exact(&d, witness.as_ref().map(|(h, y)| (h, y)))?;
            let mut out = json!({ "expected": format_q(&e), "value": num(to_f64(&e)) });
            if *brute_force {
                let b = expected_planted_count_bruteforce(&d, witness.as_ref().map(|(_, y)| y), &budget)?;
                out["bruteforce"] = json!(format_q(&b));
                out["agree"] = json!(b == e);
            }
            emit(g, &json(&out))
        }
        Command::GoodModels { measure, hom, k, eps, planted, list } => {
            let m = load_markov(measure)?;
            let sigma = load::<HomJson>(hom)?.to_hom()?;
            let eps = cli_rational(eps, "--eps")?;
            let factors = m.alphabet().factors().filter(|f| f.len() == 2).map(|f| f.to_vec());
            let y = match planted {
                Some(p) => {
                    let b = factors.as_ref().map(|f| f[1].clone());
                    Some(load::<LabelingJson>(p)?.to_labeling(b.as_ref())?)
                }
                None => None,
            };
            let rep = enumerate_good_models(&sigma, &m, *k, &eps, y.as_ref(), &budget)?;
            let count = rep.count().map(|c| c.to_string()).unwrap_or_default();
            let mut out = json!({ "count": count, "growth_rate": rep.growth_rate.map(num), "n": sigma.n() });
            if *list {
                let alph = match (&y, &factors) {
                    (Some(_), Some(f)) => f[0].clone(),
                    _ => m.alphabet().clone(),
                };
                let models = good_models(&sigma, &m, *k, &eps, y.as_ref(), &budget, &alph)?;
                out["models"] = json!(models.iter().map(|x| LabelingJson::from_labeling(x).symbols).collect::<Vec<_>>());
            }
            emit(g, &json(&out))
        }
        Command::Growth { measure, planted, n, eps, k, trials, sampler, bracket_depth } => {
            let m = load_markov(measure)?;
            let cfg = GrowthConfig {
                target: if *planted { GrowthTarget::Planted(m) } else { GrowthTarget::Markov(m) },
                sampler: parse_sampler(sampler)?,
                k: *k,
                eps: cli_rational(eps, "--eps")?,
                ns: parse_ns(n)?,
                trials: *trials,
                seed: g.seed,
                budget,
                bracket_depth: *bracket_depth,
            };
            if cfg.trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            let rows = growth_rate_experiment(&cfg)?;
            match g.format {
                Some(Format::Json) => emit(g, &json(&growth_json(&rows))),
                _ => emit(g, &growth_csv(&rows)?),
            }
        }
        Command::JoinSearch { measure_a, measure_b, k, restarts, iterations } => {
            let ma = load_markov(measure_a)?;
            let mb = load_markov(measure_b)?;
            let opts = JoiningOptions { restarts: *restarts, iterations: *iterations, seed: g.seed, budget };
            let res = joining_search(&ma, &mb, *k, &opts)?;
            emit(
                g,
                &json(&json!({
                    "value": num(res.value),
                    "product_value": num(res.product_value),
                    "b_term": num(res.b_term),
                    "candidates": res.candidates,
                    "coupling": WeightJson::from_weight(&res.coupling, None, true)?,
                })),
            )
        }
        Command::Selftest { instances } => {
            let report = selftest::run(*instances, g.seed, &budget);
            let failed: Vec<&str> = report.iter().filter(|s| !s.pass).map(|s| s.name).collect();
            let out = json!({
                "suites": report.iter().map(|s| json!({ "name": s.name, "pass": s.pass, "detail": s.detail })).collect::<Vec<_>>(),
                "pass": failed.is_empty(),
            });
            emit(g, &json(&out))?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("selftest failed: {}", failed.join(", "))))
            }
        }
    }
}

fn method_name(m: SbmMethod) -> &'static str {
    match m {
        SbmMethod::Auto => "k0",
        SbmMethod::Enumerate => "enumerate",
        SbmMethod::Reject { .. } => "reject",
        SbmMethod::Mcmc { .. } => "mcmc-heuristic",
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    Ok(fj::from_str(&read(path)?)?)
}

fn load_weight(path: &Path) -> Result<fgel_core::Weight, CliError> {
    Ok(load::<WeightJson>(path)?.to_weight()?)
}

fn load_markov(path: &Path) -> Result<MarkovMeasure, CliError> {
    Ok(MarkovMeasure::new(load_weight(path)?))
}

fn cli_rational(s: &str, flag: &str) -> Result<Q, CliError> {
    parse_q(s).map_err(|_| CliError::Usage(format!("{flag}: expected a rational such as 0.1 or 1/10, got {s:?}")))
}

fn word_set(words: Option<&str>, ball: Option<usize>, rank: usize) -> Result<Vec<Word>, CliError> {
    match (words, ball) {
        (Some(ws), _) => ws
            .split(',')
            .map(|w| Word::parse(w, rank).map_err(|e| CliError::Usage(format!("--words: {e}"))))
            .collect(),
        (None, Some(k)) => Ok(ball_words(rank, k).into_iter().filter(|w| !w.is_identity()).collect()),
        (None, None) => Err(CliError::Usage("one of --words or --ball is required".into())),
    }
}

fn parse_sampler(s: &str) -> Result<SamplerChoice, CliError> {
    Ok(match s {
        "uniform" => SamplerChoice::Uniform,
        "sbm" | "sbm:auto" => SamplerChoice::Sbm(SbmMethod::Auto),
        "sbm:enumerate" => SamplerChoice::Sbm(SbmMethod::Enumerate),
        "sbm:reject" => SamplerChoice::Sbm(SbmMethod::DEFAULT_REJECT),
        "sbm:mcmc" => SamplerChoice::Sbm(SbmMethod::DEFAULT_MCMC),
        other => return Err(CliError::Usage(format!("unknown sampler {other:?}"))),
    })
}

/// `a..b` (inclusive), `a..b:step`, or a comma list.
pub fn parse_ns(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--n: cannot parse {s:?}"));
    let int = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let ns: Vec<usize> = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (int(b)?, int(st)?),
            None => (int(rest)?, 1),
        };
        let a = int(a)?;
        if step == 0 || b < a {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(int).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(bad());
    }
    Ok(ns)
}
