//! Exact counts of `(σ, y)` pairs with a prescribed empirical weight.

use super::empirical::{empirical_counts, Counts};
use crate::alphabet::Alphabet;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rational::{ln_factorial, Q};
use crate::realize::{labeling_from_counts, Homomorphism, Labeling};
use crate::sampler::{for_each_hom, hom_count};
use crate::weights::{f_of_weight, project_factor, DenominatorNWeight};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

fn factorial(k: u64) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `Z_n(W) = n! ∏_b (nW(b))!^{2r−1} / ∏_{i,b,b'} (nW(b,b';i))!`.
pub fn z_n(w: &DenominatorNWeight) -> Result<BigUint> {
    let r = w.rank() as u32;
    let mut num = factorial(w.n());
    for &c in w.vertex_counts().values() {
        num *= factorial(c).pow(2 * r - 1);
    }
    let mut den = BigUint::one();
    for i in 0..w.rank() {
        for &c in w.counts(i).values() {
            den *= factorial(c);
        }
    }
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::NonIntegerResult);
    }
    Ok(quot)
}

fn counts_of(w: &DenominatorNWeight) -> Counts {
    (0..w.rank()).map(|i| w.counts(i).clone()).collect()
}

/// Visits every labeling in `A^n` in lexicographic order.
pub fn for_each_labeling(alphabet: &Alphabet, n: usize, mut f: impl FnMut(&Labeling)) {
    let q = alphabet.size();
    let mut x = Labeling { alphabet: alphabet.clone(), symbols: vec![0; n] };
    loop {
        f(&x);
        let mut p = n;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            x.symbols[p] += 1;
            if x.symbols[p] < q {
                break;
            }
            x.symbols[p] = 0;
        }
    }
}

/// Literal count of pairs `(σ, y)` with `W_{σ,y} = W`.
pub fn z_n_bruteforce(w: &DenominatorNWeight, budget: &Budget) -> Result<BigUint> {
    let n = w.n() as usize;
    let r = w.rank();
    let q = w.alphabet().size();
    budget.check_enumeration(hom_count(n, r) * (q as f64).powi(n as i32), "brute-force Z_n")?;
    let target = counts_of(w);
    let mut total: u64 = 0;
    for_each_hom(n, r, |sigma| {
        for_each_labeling(w.alphabet(), n, |y| {
            if empirical_counts(sigma, y, 0) == target {
                total += 1;
            }
        });
    });
    Ok(BigUint::from(total))
}

/// Outcome of the two-sided bound on `Z_n(W)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZBounds {
    pub pass: bool,
    /// `ln Z − F n − r ln n! − ((1−r)/2) ln n`.
    pub log_ratio: f64,
    /// `log_ratio + r|B|² ln(3√n)`; nonnegative when the lower bound holds.
    pub lower_slack: f64,
    /// `r|B|² ln(3√n) − log_ratio`; nonnegative when the upper bound holds.
    pub upper_slack: f64,
}

/// Checks `(3√n)^{−r|B|²} ≤ Z_n(W) / (e^{F(W)n} (n!)^r n^{(1−r)/2}) ≤ (3√n)^{r|B|²}` in log space.
pub fn zbounds_check(w: &DenominatorNWeight) -> ZBounds {
    let n = w.n();
    let r = w.rank() as f64;
    let mut ln_z = ln_factorial(n);
    for &c in w.vertex_counts().values() {
        ln_z += (2.0 * r - 1.0) * ln_factorial(c);
    }
    for i in 0..w.rank() {
        for &c in w.counts(i).values() {
            ln_z -= ln_factorial(c);
        }
    }
    let nf = n as f64;
    let log_ratio = ln_z - f_of_weight(w.weight()) * nf - r * ln_factorial(n) - (1.0 - r) / 2.0 * nf.ln();
    let b = w.alphabet().size() as f64;
    let bound = r * b * b * (3.0 * nf.sqrt()).ln();
    let lower_slack = log_ratio + bound;
    let upper_slack = bound - log_ratio;
    ZBounds { pass: lower_slack >= -1e-9 && upper_slack >= -1e-9, log_ratio, lower_slack, upper_slack }
}

/// Splits `W_AB` over `A × B'` into its `B'` marginal (as a denominator-n weight).
fn b_marginal(w_ab: &DenominatorNWeight) -> Result<DenominatorNWeight> {
    DenominatorNWeight::from_weight(project_factor(w_ab.weight(), 1)?, w_ab.n())
}

/// Radius and base alphabet of the `B'` factor (`B` itself or `B^{B(e,k)}`).
fn b_level(w_ab: &DenominatorNWeight) -> Result<(Alphabet, usize)> {
    let f = w_ab
        .alphabet()
        .factors()
        .filter(|f| f.len() == 2)
        .ok_or_else(|| Error::ShapeMismatch("expected an A×B alphabet".into()))?;
    Ok(match &f[1] {
        Alphabet::Ball { base, radius, .. } => ((**base).clone(), *radius),
        other => (other.clone(), 0),
    })
}

/// `E = Z_n(W_AB) / Z_n(π_B W_AB)`.
///
/// A witness `(σ0, y0)` with `W_{σ0,y0^k} = π_B W_AB` certifies the fiber is nonempty; at
/// `k = 0` every denominator-n weight is realizable, so no witness is needed there.
pub fn expected_planted_count_exact(
    w_ab: &DenominatorNWeight,
    witness: Option<(&Homomorphism, &Labeling)>,
) -> Result<Q> {
    let wb = b_marginal(w_ab)?;
    let (_, k) = b_level(w_ab)?;
    match witness {
        Some((s, y)) => {
            if empirical_counts(s, y, k) != counts_of(&wb) {
                return Err(Error::EmptyFiber);
            }
        }
        None if k > 0 => return Err(Error::EmptyFiber),
        None => {}
    }
    let zb = z_n(&wb)?;
    if zb.is_zero() {
        return Err(Error::EmptyFiber);
    }
    Ok(Q::new(BigInt::from(z_n(w_ab)?), BigInt::from(zb)))
}

/// Average over the enumerated fiber `{σ : W_{σ,y^k} = π_B W_AB}` of
/// `#{x : W_{σ,(x,y^k)} = W_AB}`, for a `y` with the right letter frequencies.
pub fn expected_planted_count_bruteforce(
    w_ab: &DenominatorNWeight,
    y: Option<&Labeling>,
    budget: &Budget,
) -> Result<Q> {
    let n = w_ab.n() as usize;
    let r = w_ab.rank();
    let factors = w_ab.alphabet().factors().expect("checked by b_level").to_vec();
    let (b_base, k) = b_level(w_ab)?;
    let a_alph = factors[0].clone();
    let y = match y {
        Some(y) => y.clone(),
        None if k == 0 => {
            let wb = b_marginal(w_ab)?;
            labeling_from_counts(&b_base, wb.vertex_counts())
        }
        None => return Err(Error::EmptyFiber),
    };
    budget.check_enumeration(
        hom_count(n, r) * (a_alph.size() as f64).powi(n as i32),
        "brute-force planted count",
    )?;
    let wb_counts = counts_of(&b_marginal(w_ab)?);
    let target = counts_of(w_ab);
    let nb = factors[1].size();
    let mut fiber: u64 = 0;
    let mut total: u64 = 0;
    for_each_hom(n, r, |sigma| {
        let codes = super::empirical::ball_codes(sigma, &y, k);
        if super::empirical::pair_counts(sigma, &codes) != wb_counts {
            return;
        }
        fiber += 1;
        for_each_labeling(&a_alph, n, |x| {
            let joint: Vec<usize> = x.symbols.iter().zip(&codes).map(|(a, b)| a * nb + b).collect();
            if super::empirical::pair_counts(sigma, &joint) == target {
                total += 1;
            }
        });
    });
    if fiber == 0 {
        return Err(Error::EmptyFiber);
    }
    Ok(Q::new(BigInt::from(total), BigInt::from(fiber)))
}
