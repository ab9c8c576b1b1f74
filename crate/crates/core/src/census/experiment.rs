//! Desk-scale Monte-Carlo growth experiments for expected good-model counts.

use super::good_models::{enumerate_good_models, Estimate};
use crate::budget::{pow_le, Budget};
use crate::error::{Error, Result};
use crate::markov::{f_markov, f_rel_bracket, MarkovMeasure};
use crate::rational::Q;
use crate::realize::{realize_weight, round_denominator_n, Homomorphism, Labeling, Mode};
use crate::rng::{stream_key, trial_rng};
use crate::sampler::{sbm_sample_k0, uniform_hom, SbmMethod, SbmSampler, SbmSpec};
use crate::weights::project_factor;
use crate::words::ball_size;
use rayon::prelude::*;

/// What is counted at each trial.
#[derive(Clone, Debug)]
pub enum GrowthTarget {
    /// `|Ω*_k(σ, α, ε)|` for a Markov measure.
    Markov(MarkovMeasure),
    /// `#{x : (x, y_n) ∈ Ω*_k(σ, λ, ε)}` for a joint measure `λ` on `A×B`, with `y_n` planted.
    Planted(MarkovMeasure),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerChoice {
    Uniform,
    Sbm(SbmMethod),
}

#[derive(Clone, Debug)]
pub struct GrowthConfig {
    pub target: GrowthTarget,
    pub sampler: SamplerChoice,
    pub k: usize,
    pub eps: Q,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub budget: Budget,
    /// Truncation depth for the relative-f bracket of planted targets.
    pub bracket_depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    FMarkov,
    FBracketLow,
    FBracketHigh,
}

impl ReferenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReferenceKind::FMarkov => "f_markov",
            ReferenceKind::FBracketLow => "f_bracket_low",
            ReferenceKind::FBracketHigh => "f_bracket_high",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub k: usize,
    pub eps: Q,
    pub estimate: Estimate,
    pub growth_rate: Option<f64>,
    pub reference_value: f64,
    pub reference_kind: ReferenceKind,
    pub sampler: String,
    pub seed: u64,
    /// Block-model level `m_n` (0 for uniform sampling).
    pub level: usize,
}

/// `m_n = max(0, ⌊ln ln n⌋)`, lowered until the level-`m` union subtree fits the atom budget.
pub fn growth_level(n: usize, base_size: usize, rank: usize, budget: &Budget) -> usize {
    let mut m = if n >= 3 { (n as f64).ln().ln().floor().max(0.0) as usize } else { 0 };
    while m > 0 {
        let union = ball_size(rank, m) + (2 * rank - 1).pow(m as u32);
        if pow_le(base_size as u64, union, budget.atoms) {
            break;
        }
        m -= 1;
    }
    m
}

/// Reference pair `(σ_n, y_n)` realizing the denominator-n rounding of the `B` marginal.
pub fn planted_pair(joint: &MarkovMeasure, n: usize) -> Result<(Homomorphism, Labeling)> {
    let wb = project_factor(joint.weight(), 1)?;
    let d = round_denominator_n(&wb, n as u64)?;
    Ok(realize_weight::<crate::rng::TrialRng>(&d, Mode::Deterministic))
}

fn sampler_label(choice: SamplerChoice, level: usize) -> String {
    match choice {
        SamplerChoice::Uniform => "uniform".into(),
        SamplerChoice::Sbm(m @ SbmMethod::Mcmc { .. }) => format!("sbm:m={level}:{}", method_name(m)),
        SamplerChoice::Sbm(m) => format!("sbm:m={level}:{}", method_name(m)),
    }
}

fn method_name(m: SbmMethod) -> &'static str {
    match m {
        SbmMethod::Auto => "auto",
        SbmMethod::Enumerate => "enumerate",
        SbmMethod::Reject { .. } => "reject",
        SbmMethod::Mcmc { .. } => "mcmc-heuristic",
    }
}

/// Runs every grid point; rows are ordered by `n` then reference kind.
pub fn growth_rate_experiment(cfg: &GrowthConfig) -> Result<Vec<GrowthRow>> {
    let refs: Vec<(f64, ReferenceKind)> = match &cfg.target {
        GrowthTarget::Markov(m) => {
            if matches!(cfg.sampler, SamplerChoice::Sbm(_)) {
                return Err(Error::ShapeMismatch("block-model sampling needs a planted joint target".into()));
            }
            vec![(f_markov(m), ReferenceKind::FMarkov)]
        }
        GrowthTarget::Planted(m) => {
            let (lo, hi) = f_rel_bracket(m, cfg.bracket_depth, &cfg.budget)?;
            vec![(lo, ReferenceKind::FBracketLow), (hi, ReferenceKind::FBracketHigh)]
        }
    };
    let mut rows = Vec::new();
    for &n in &cfg.ns {
        let (counts, level) = run_grid_point(cfg, n)?;
        let est = Estimate::from_counts(&counts);
        let growth_rate = (est.mean > 0.0).then(|| est.mean.ln() / n as f64);
        for (value, kind) in &refs {
            rows.push(GrowthRow {
                n,
                k: cfg.k,
                eps: cfg.eps.clone(),
                estimate: est.clone(),
                growth_rate,
                reference_value: *value,
                reference_kind: *kind,
                sampler: sampler_label(cfg.sampler, level),
                seed: cfg.seed,
                level,
            });
        }
    }
    Ok(rows)
}

/// Per-trial counts at one system size, and the block-model level used.
pub fn run_grid_point(cfg: &GrowthConfig, n: usize) -> Result<(Vec<u64>, usize)> {
    let count = |sigma: &Homomorphism, m: &MarkovMeasure, y: Option<&Labeling>| -> Result<u64> {
        let rep = enumerate_good_models(sigma, m, cfg.k, &cfg.eps, y, &cfg.budget)?;
        Ok(rep.count().map(|c| c.iter_u64_digits().next().unwrap_or(0)).unwrap_or(0))
    };
    match &cfg.target {
        GrowthTarget::Markov(m) => {
            let r = m.rank();
            let counts = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, stream_key(n as u64, t as u64));
                    count(&uniform_hom(n, r, &mut rng), m, None)
                })
                .collect::<Result<Vec<u64>>>()?;
            Ok((counts, 0))
        }
        GrowthTarget::Planted(m) => {
            let r = m.rank();
            let (sigma0, y0) = planted_pair(m, n)?;
            let b_size = y0.alphabet.size();
            let level = match cfg.sampler {
                SamplerChoice::Uniform => 0,
                SamplerChoice::Sbm(_) => growth_level(n, b_size, r, &cfg.budget),
            };
            let spec = SbmSpec::from_reference(sigma0.clone(), y0.clone(), level)?;
            let shared = match cfg.sampler {
                SamplerChoice::Sbm(method) if level > 0 && method.is_exact() => {
                    Some(SbmSampler::new(spec.clone(), method, &cfg.budget)?)
                }
                _ => None,
            };
            let counts = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.seed, stream_key(n as u64, t as u64));
                    let sigma = match cfg.sampler {
                        SamplerChoice::Uniform => uniform_hom(n, r, &mut rng),
                        SamplerChoice::Sbm(_) if level == 0 => sbm_sample_k0(&spec.y, &spec.target, &mut rng)?,
                        SamplerChoice::Sbm(method) => match &shared {
                            Some(s) => s.sample_exact(&mut rng)?,
                            None => SbmSampler::new(spec.clone(), method, &cfg.budget)?.sample(&mut rng)?,
                        },
                    };
                    count(&sigma, m, Some(&y0))
                })
                .collect::<Result<Vec<u64>>>()?;
            Ok((counts, level))
        }
    }
}
