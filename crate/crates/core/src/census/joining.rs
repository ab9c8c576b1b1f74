//! Lower-bound search over Markov joinings: `A×B`-weights with prescribed `A` and `B` marginals.

use crate::alphabet::Alphabet;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::markov::{f_of_observable, MarkovMeasure, Observable};
use crate::rational::Q;
use crate::rng::trial_rng;
use crate::weights::{f_of_weight, project_factor, Entries, Weight};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

#[derive(Clone, Debug)]
pub struct JoiningOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub budget: Budget,
}

impl Default for JoiningOptions {
    fn default() -> Self {
        JoiningOptions { restarts: 8, iterations: 200, seed: 0, budget: Budget::default() }
    }
}

#[derive(Clone, Debug)]
pub struct JoiningResult {
    /// Best coupling found.
    pub coupling: Weight,
    /// `F(W_λ) − F(β)`: a lower bound on the supremum over joinings.
    pub value: f64,
    /// Objective at the product coupling.
    pub product_value: f64,
    /// Subtracted `B` term.
    pub b_term: f64,
    pub candidates: usize,
}

/// Product coupling `W_A ⊗ W_B`.
pub fn product_coupling(wa: &Weight, wb: &Weight) -> Result<Weight> {
    let q = wb.alphabet().size();
    let edges = (0..wa.rank())
        .map(|i| {
            let mut e = Entries::new();
            for ((a, a2), u) in wa.edge(i) {
                for ((b, b2), v) in wb.edge(i) {
                    e.insert((a * q + b, a2 * q + b2), u * v);
                }
            }
            e
        })
        .collect();
    Weight::from_entries(wa.rank(), Alphabet::pair(wa.alphabet().clone(), wb.alphabet().clone()), edges)
}

/// Couplings supported on the graph of a bijection `A → B` that carries `W_A` onto `W_B`.
pub fn graph_couplings(wa: &Weight, wb: &Weight) -> Vec<Weight> {
    let p = wa.alphabet().size();
    let q = wb.alphabet().size();
    if p != q || p > 8 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for pi in crate::sampler::all_permutations(p) {
        let ok = (0..wa.rank()).all(|i| {
            wa.edge(i).iter().all(|((a, a2), v)| wb.entry(i, pi[*a], pi[*a2]) == *v)
                && wa.edge(i).len() == wb.edge(i).len()
        });
        if !ok {
            continue;
        }
        let edges = (0..wa.rank())
            .map(|i| {
                wa.edge(i)
                    .iter()
                    .map(|((a, a2), v)| ((a * q + pi[*a], a2 * q + pi[*a2]), v.clone()))
                    .collect()
            })
            .collect();
        if let Ok(w) = Weight::from_entries(
            wa.rank(),
            Alphabet::pair(wa.alphabet().clone(), wb.alphabet().clone()),
            edges,
        ) {
            out.push(w);
        }
    }
    out
}

/// Basis of the homogeneous solution space of the joining constraints, in entry coordinates.
fn nullspace(r: usize, p: usize, q: usize) -> Vec<Vec<Q>> {
    let m = p * q;
    let nv = r * m * m;
    let var = |i: usize, x: usize, y: usize| i * m * m + x * m + y;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let unit = || vec![Q::zero(); nv];
    for i in 0..r {
        for a in 0..p {
            for a2 in 0..p {
                let mut row = unit();
                for b in 0..q {
                    for b2 in 0..q {
                        row[var(i, a * q + b, a2 * q + b2)] = Q::one();
                    }
                }
                rows.push(row);
            }
        }
        for b in 0..q {
            for b2 in 0..q {
                let mut row = unit();
                for a in 0..p {
                    for a2 in 0..p {
                        row[var(i, a * q + b, a2 * q + b2)] = Q::one();
                    }
                }
                rows.push(row);
            }
        }
        for x in 0..m {
            // column sum of generator i equals row sum of generator 0
            let mut row = unit();
            for y in 0..m {
                row[var(i, y, x)] += Q::one();
                row[var(0, x, y)] -= Q::one();
            }
            rows.push(row);
            if i > 0 {
                let mut row = unit();
                for y in 0..m {
                    row[var(i, x, y)] += Q::one();
                    row[var(0, x, y)] -= Q::one();
                }
                rows.push(row);
            }
        }
    }
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..nv {
        let Some(pr) = (rank..rows.len()).find(|&k| !rows[k][c].is_zero()) else { continue };
        rows.swap(rank, pr);
        let inv = Q::one() / rows[rank][c].clone();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..nv).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); nv];
            v[f] = Q::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[k][f].clone();
            }
            v
        })
        .collect()
}

fn to_vec(w: &Weight, m: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); w.rank() * m * m];
    for i in 0..w.rank() {
        for ((x, y), val) in w.edge(i) {
            v[i * m * m + x * m + y] = val.clone();
        }
    }
    v
}

fn from_vec(v: &[Q], r: usize, alphabet: &Alphabet) -> Result<Weight> {
    let m = alphabet.size();
    let edges = (0..r)
        .map(|i| {
            let mut e = Entries::new();
            for x in 0..m {
                for y in 0..m {
                    let val = &v[i * m * m + x * m + y];
                    if !val.is_zero() {
                        e.insert((x, y), val.clone());
                    }
                }
            }
            e
        })
        .collect();
    Weight::from_entries(r, alphabet.clone(), edges)
}

/// Largest dyadic `t ≤ cap` (resolution `2^-20`) keeping `v + t d ≥ 0`.
fn max_step(v: &[Q], d: &[Q]) -> Option<Q> {
    let mut best: Option<Q> = None;
    for (x, dx) in v.iter().zip(d) {
        if dx.is_negative() {
            let t = -(x / dx);
            best = Some(match best {
                Some(b) if b < t => b,
                _ => t,
            });
        }
    }
    let t = best?;
    let scale = BigInt::from(1u64 << 20);
    let floored = (t * Q::from_integer(scale.clone())).floor() / Q::from_integer(scale);
    (floored.is_positive()).then_some(floored)
}

/// Hill climbing over the joining polytope from the product and graph couplings plus random
/// mixtures of them. The returned value is a lower bound, never a certified supremum.
pub fn joining_search(ma: &MarkovMeasure, mb: &MarkovMeasure, k: usize, opts: &JoiningOptions) -> Result<JoiningResult> {
    let (wa, wb) = (ma.weight(), mb.weight());
    if wa.rank() != wb.rank() {
        return Err(Error::ShapeMismatch("measures have different ranks".into()));
    }
    let r = wa.rank();
    let b_term = match f_of_observable(mb, &Observable::Identity.ball(k), &opts.budget) {
        Ok(v) => v,
        Err(e) if e.is_budget() => f_of_weight(wb),
        Err(e) => return Err(e),
    };
    let product = product_coupling(wa, wb)?;
    let alphabet = product.alphabet().clone();
    let m = alphabet.size();
    let objective = |w: &Weight| f_of_weight(w) - b_term;
    let product_value = objective(&product);
    let mut starts = vec![product.clone()];
    starts.extend(graph_couplings(wa, wb));
    let basis = nullspace(r, wa.alphabet().size(), wb.alphabet().size());
    let mut rng = trial_rng(opts.seed, 0);
    let seeds = starts.len();
    let mut best = product.clone();
    let mut best_val = product_value;
    let mut candidates = 0usize;
    for restart in 0..(seeds + opts.restarts) {
        let start = if restart < seeds {
            starts[restart].clone()
        } else {
            // random convex mixture of the seed couplings
            let wts: Vec<u64> = (0..seeds).map(|_| rng.gen_range(1..=16)).collect();
            let tot: u64 = wts.iter().sum();
            let mut v = vec![Q::zero(); r * m * m];
            for (s, &wt) in starts.iter().zip(&wts) {
                let f = Q::new(BigInt::from(wt), BigInt::from(tot));
                for (acc, x) in v.iter_mut().zip(to_vec(s, m)) {
                    *acc += &f * x;
                }
            }
            from_vec(&v, r, &alphabet)?
        };
        let mut cur = to_vec(&start, m);
        let mut cur_val = objective(&start);
        candidates += 1;
        if basis.is_empty() {
            if cur_val > best_val {
                best_val = cur_val;
                best = start;
            }
            continue;
        }
        for _ in 0..opts.iterations {
            let mut d = vec![Q::zero(); r * m * m];
            for b in &basis {
                let c: i64 = rng.gen_range(-2..=2);
                if c != 0 {
                    let cq = Q::from_integer(BigInt::from(c));
                    for (dx, bx) in d.iter_mut().zip(b) {
                        *dx += &cq * bx;
                    }
                }
            }
            if d.iter().all(|x| x.is_zero()) {
                continue;
            }
            let neg: Vec<Q> = d.iter().map(|x| -x.clone()).collect();
            let mut improved = false;
            for dir in [&d, &neg] {
                let Some(tmax) = max_step(&cur, dir) else { continue };
                let mut t = tmax;
                for _ in 0..12 {
                    let cand: Vec<Q> = cur.iter().zip(dir.iter()).map(|(x, dx)| x + &t * dx).collect();
                    candidates += 1;
                    if let Ok(w) = from_vec(&cand, r, &alphabet) {
                        let val = objective(&w);
                        if val > cur_val + 1e-12 {
                            cur = cand;
                            cur_val = val;
                            improved = true;
                            break;
                        }
                    }
                    t /= Q::from_integer(BigInt::from(2));
                }
                if improved {
                    break;
                }
            }
        }
        if cur_val > best_val {
            best_val = cur_val;
            best = from_vec(&cur, r, &alphabet)?;
        }
    }
    debug_assert!(project_factor(&best, 0).map(|w| &w == wa).unwrap_or(false));
    Ok(JoiningResult { coupling: best, value: best_val, product_value, b_term, candidates })
}
