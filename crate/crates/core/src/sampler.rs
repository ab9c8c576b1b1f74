//! Random homomorphisms: uniform, stochastic block models over level-k statistics, soficity.

use crate::budget::Budget;
use crate::census::empirical::{ball_codes, empirical_counts, Counts};
use crate::error::{Error, Result};
use crate::realize::{contingency_permutation, Homomorphism, Labeling};
use crate::weights::{project_root, DenominatorNWeight};
use crate::words::Word;
use rand::seq::SliceRandom;
use rand::Rng;

/// `r` independent uniform permutations of `[n]`.
pub fn uniform_hom<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Homomorphism {
    let perms = (0..r)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    Homomorphism::new(perms).expect("shuffles are permutations")
}

/// Uniform `σ` with `W_{σ,y} = W`.
pub fn sbm_sample_k0<R: Rng + ?Sized>(y: &Labeling, w: &DenominatorNWeight, rng: &mut R) -> Result<Homomorphism> {
    if w.n() != y.n() as u64 || &y.counts() != w.vertex_counts() || !y.alphabet.same_symbols(w.alphabet()) {
        return Err(Error::FrequencyMismatch);
    }
    let perms = (0..w.rank())
        .map(|i| contingency_permutation(&y.symbols, w.counts(i), Some(&mut *rng)))
        .collect();
    Ok(Homomorphism::new(perms).expect("contingency permutations are bijections"))
}

/// The constraint `W_{σ,y^k} = target`.
#[derive(Clone, Debug)]
pub struct SbmSpec {
    pub y: Labeling,
    pub k: usize,
    pub target: DenominatorNWeight,
    pub reference: Option<Homomorphism>,
}

impl SbmSpec {
    pub fn new(y: Labeling, k: usize, target: DenominatorNWeight, reference: Option<Homomorphism>) -> Result<Self> {
        if target.n() != y.n() as u64 {
            return Err(Error::FrequencyMismatch);
        }
        let root = project_root(target.weight());
        let root = DenominatorNWeight::from_weight(root, target.n())?;
        if &y.counts() != root.vertex_counts() {
            return Err(Error::FrequencyMismatch);
        }
        if let Some(s) = &reference {
            if empirical_counts(s, &y, k) != target_counts(&target) {
                return Err(Error::EmptyFiber);
            }
        }
        Ok(SbmSpec { y, k, target, reference })
    }

    /// Target defined by a reference pair.
    pub fn from_reference(sigma0: Homomorphism, y: Labeling, k: usize) -> Result<Self> {
        let target = crate::census::empirical::empirical_weight(&sigma0, &y, k)?;
        Ok(SbmSpec { y, k, target, reference: Some(sigma0) })
    }

    pub fn satisfied_by(&self, sigma: &Homomorphism) -> bool {
        empirical_counts(sigma, &self.y, self.k) == target_counts(&self.target)
    }
}

fn target_counts(t: &DenominatorNWeight) -> Counts {
    (0..t.rank()).map(|i| t.counts(i).clone()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SbmMethod {
    Auto,
    Enumerate,
    Reject { max_attempts: u64 },
    Mcmc { burn_in: u64, stride: u64 },
}

impl SbmMethod {
    pub const DEFAULT_REJECT: SbmMethod = SbmMethod::Reject { max_attempts: 1_000_000 };
    pub const DEFAULT_MCMC: SbmMethod = SbmMethod::Mcmc { burn_in: 1000, stride: 100 };

    /// Whether samples are exactly uniform on the fiber.
    pub fn is_exact(&self) -> bool {
        !matches!(self, SbmMethod::Mcmc { .. })
    }
}

/// Lexicographic successor; false after the last permutation.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of `[n]` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

/// Visits every homomorphism `G → Sym(n)` of rank `r`.
pub fn for_each_hom(n: usize, r: usize, mut f: impl FnMut(&Homomorphism)) {
    let perms = all_permutations(n);
    let mut idx = vec![0usize; r];
    loop {
        let h = Homomorphism::new(idx.iter().map(|&i| perms[i].clone()).collect()).expect("permutations");
        f(&h);
        let mut g = 0;
        loop {
            if g == r {
                return;
            }
            idx[g] += 1;
            if idx[g] < perms.len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
    }
}

pub(crate) fn hom_count(n: usize, r: usize) -> f64 {
    let f: f64 = (1..=n).map(|i| i as f64).product();
    f.powi(r as i32)
}

/// Reusable sampler for one block-model constraint.
pub struct SbmSampler {
    spec: SbmSpec,
    method: SbmMethod,
    fiber: Option<Vec<Homomorphism>>,
    state: Option<Homomorphism>,
    burned_in: bool,
}

impl SbmSampler {
    pub fn new(spec: SbmSpec, method: SbmMethod, budget: &Budget) -> Result<Self> {
        let n = spec.y.n();
        let r = spec.target.rank();
        let method = match method {
            SbmMethod::Auto if spec.k == 0 => SbmMethod::Auto,
            SbmMethod::Auto if hom_count(n, r) <= budget.enumeration as f64 => SbmMethod::Enumerate,
            SbmMethod::Auto => SbmMethod::DEFAULT_REJECT,
            m => m,
        };
        let mut fiber = None;
        if method == SbmMethod::Enumerate {
            budget.check_enumeration(hom_count(n, r), "homomorphism enumeration")?;
            let mut found = Vec::new();
            for_each_hom(n, r, |h| {
                if spec.satisfied_by(h) {
                    found.push(h.clone());
                }
            });
            if found.is_empty() {
                return Err(Error::EmptyFiber);
            }
            fiber = Some(found);
        }
        let state = match method {
            SbmMethod::Mcmc { .. } => Some(spec.reference.clone().ok_or(Error::EmptyFiber)?),
            _ => None,
        };
        Ok(SbmSampler { spec, method, fiber, state, burned_in: false })
    }

    pub fn method(&self) -> SbmMethod {
        self.method
    }

    pub fn fiber(&self) -> Option<&[Homomorphism]> {
        self.fiber.as_deref()
    }

    /// Draws from an exact method; shared across threads without mutation.
    pub fn sample_exact<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Homomorphism> {
        let spec = &self.spec;
        match self.method {
            SbmMethod::Auto if spec.k == 0 => sbm_sample_k0(&spec.y, &spec.target, rng),
            SbmMethod::Auto | SbmMethod::Enumerate => {
                let fiber = self.fiber.as_ref().expect("enumerated");
                Ok(fiber[rng.gen_range(0..fiber.len())].clone())
            }
            SbmMethod::Reject { max_attempts } => {
                let level0 = DenominatorNWeight::from_weight(project_root(spec.target.weight()), spec.target.n())?;
                for _ in 0..max_attempts {
                    let s = sbm_sample_k0(&spec.y, &level0, rng)?;
                    if spec.satisfied_by(&s) {
                        return Ok(s);
                    }
                }
                Err(Error::RejectBudgetExceeded { attempts: max_attempts })
            }
            SbmMethod::Mcmc { .. } => Err(Error::ShapeMismatch("mcmc sampling needs a mutable chain".into())),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Homomorphism> {
        let spec = &self.spec;
        match self.method {
            SbmMethod::Mcmc { burn_in, stride } => {
                let steps = if self.burned_in { stride } else { burn_in };
                self.burned_in = true;
                let codes_target = target_counts(&spec.target);
                let mut cur = self.state.take().expect("mcmc state");
                let n = cur.n();
                for _ in 0..steps {
                    if n < 2 {
                        break;
                    }
                    let i = rng.gen_range(0..cur.rank());
                    let a = rng.gen_range(0..n);
                    let mut b = rng.gen_range(0..n - 1);
                    if b >= a {
                        b += 1;
                    }
                    let p: Vec<usize> = cur
                        .perm(i)
                        .iter()
                        .map(|&v| if v == a { b } else if v == b { a } else { v })
                        .collect();
                    let prop = cur.with_perm(i, p);
                    let codes = ball_codes(&prop, &spec.y, spec.k);
                    if crate::census::empirical::pair_counts(&prop, &codes) == codes_target {
                        cur = prop;
                    }
                }
                assert!(spec.satisfied_by(&cur), "mcmc left the fiber");
                self.state = Some(cur.clone());
                Ok(cur)
            }
            _ => self.sample_exact(rng),
        }
    }
}

/// One sample from `SBM(spec)`.
pub fn sbm_sample<R: Rng + ?Sized>(spec: &SbmSpec, rng: &mut R, method: SbmMethod, budget: &Budget) -> Result<Homomorphism> {
    SbmSampler::new(spec.clone(), method, budget)?.sample(rng)
}

/// Fraction of points moved by every non-identity word of `d`, and whether it exceeds `1 − δ`.
pub fn is_sofic(sigma: &Homomorphism, d: &[Word], delta: f64) -> (bool, f64) {
    let n = sigma.n();
    let words: Vec<&Word> = d.iter().filter(|w| !w.is_identity()).collect();
    let free = (0..n)
        .filter(|&j| words.iter().all(|w| sigma.apply_word(w, j) != j))
        .count();
    (free as f64 > (1.0 - delta) * n as f64, free as f64 / n as f64)
}
