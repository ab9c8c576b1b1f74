//! Denominator-n rounding, realization of weights by labeled permutation tuples, and ball refinement.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::weights::{DenominatorNWeight, Weight};
use crate::words::{Letter, Subtree, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// `r` permutations of `[n]`, the images of the free generators (0-based internally).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    perms: Vec<Vec<usize>>,
    inverses: Vec<Vec<usize>>,
}

impl Homomorphism {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::ShapeMismatch("need at least one generator".into()));
        }
        let n = perms[0].len();
        let mut inverses = Vec::with_capacity(perms.len());
        for (i, p) in perms.iter().enumerate() {
            if p.len() != n {
                return Err(Error::ShapeMismatch(format!("generator {} has length {}, expected {n}", i + 1, p.len())));
            }
            let mut inv = vec![usize::MAX; n];
            for (j, &v) in p.iter().enumerate() {
                if v >= n || inv[v] != usize::MAX {
                    return Err(Error::ShapeMismatch(format!("generator {} is not a permutation", i + 1)));
                }
                inv[v] = j;
            }
            inverses.push(inv);
        }
        Ok(Homomorphism { perms, inverses })
    }

    pub fn identity(n: usize, r: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        Homomorphism { perms: vec![id.clone(); r], inverses: vec![id; r] }
    }

    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn rank(&self) -> usize {
        self.perms.len()
    }

    pub fn perm(&self, i: usize) -> &[usize] {
        &self.perms[i]
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn apply(&self, l: Letter, j: usize) -> usize {
        if l.inv {
            self.inverses[l.gen][j]
        } else {
            self.perms[l.gen][j]
        }
    }

    /// `σ(w) j` with `σ(l_1 ... l_m) = σ(l_1) ∘ ... ∘ σ(l_m)`.
    pub fn apply_word(&self, w: &Word, j: usize) -> usize {
        w.0.iter().rev().fold(j, |p, l| self.apply(*l, p))
    }

    /// Replaces generator `i`'s permutation.
    pub fn with_perm(&self, i: usize, p: Vec<usize>) -> Self {
        let mut inv = vec![0; p.len()];
        for (j, &v) in p.iter().enumerate() {
            inv[v] = j;
        }
        let mut out = self.clone();
        out.perms[i] = p;
        out.inverses[i] = inv;
        out
    }
}

/// `x ∈ A^n` stored as symbol indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    pub alphabet: Alphabet,
    pub symbols: Vec<usize>,
}

impl Labeling {
    pub fn new(alphabet: Alphabet, symbols: Vec<usize>) -> Result<Self> {
        let m = alphabet.size();
        if symbols.iter().any(|&s| s >= m) {
            return Err(Error::ShapeMismatch("label outside alphabet".into()));
        }
        Ok(Labeling { alphabet, symbols })
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    /// Letter counts `n·p_x`.
    pub fn counts(&self) -> BTreeMap<usize, u64> {
        let mut c = BTreeMap::new();
        for &s in &self.symbols {
            *c.entry(s).or_insert(0) += 1;
        }
        c
    }
}

/// `x^k`: for each point, the labels seen along `B(e,k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallLabeling {
    pub base: Alphabet,
    pub rank: usize,
    pub radius: usize,
    /// `entries[j][p]` is the label at ball position `p` (ball word order).
    pub entries: Vec<Vec<usize>>,
}

impl BallLabeling {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// The ball labeling as a plain labeling over `A^{B(e,k)}`.
    pub fn to_labeling(&self) -> Result<Labeling> {
        let alph = Alphabet::ball(self.base.clone(), self.rank, self.radius)?;
        let symbols = self.entries.iter().map(|e| alph.encode_ball(e)).collect();
        Labeling::new(alph, symbols)
    }

    pub fn from_labeling(x: &Labeling) -> Result<Self> {
        match &x.alphabet {
            Alphabet::Ball { base, rank, radius } => Ok(BallLabeling {
                base: (**base).clone(),
                rank: *rank,
                radius: *radius,
                entries: x.symbols.iter().map(|&s| x.alphabet.decode_ball(s)).collect(),
            }),
            _ => Err(Error::ShapeMismatch("labeling is not over a ball alphabet".into())),
        }
    }
}

/// Points `σ(g) j` for every ball position `g`, for all `j`.
pub(crate) fn ball_points(sigma: &Homomorphism, tree: &Subtree) -> Vec<Vec<usize>> {
    let n = sigma.n();
    let mut out = vec![vec![0usize; tree.len()]; n];
    for (j, row) in out.iter_mut().enumerate() {
        row[0] = j;
        for pos in 1..tree.len() {
            row[pos] = sigma.apply(tree.edge[pos], row[tree.parent[pos]]);
        }
    }
    out
}

/// `x^k(j)_g = x[σ(g) j]`.
pub fn ball_refine(sigma: &Homomorphism, x: &Labeling, k: usize) -> BallLabeling {
    let tree = Subtree::ball(sigma.rank(), k);
    let pts = ball_points(sigma, &tree);
    BallLabeling {
        base: x.alphabet.clone(),
        rank: sigma.rank(),
        radius: k,
        entries: pts.iter().map(|row| row.iter().map(|&p| x.symbols[p]).collect()).collect(),
    }
}

/// Returns `π_e X` after checking that `X` is its own `k`-refinement.
pub fn check_ball_consistency(sigma: &Homomorphism, big_x: &BallLabeling) -> Result<Labeling> {
    let x = Labeling::new(big_x.base.clone(), big_x.entries.iter().map(|e| e[0]).collect())?;
    let refined = ball_refine(sigma, &x, big_x.radius);
    let words = crate::words::ball_words(sigma.rank(), big_x.radius);
    for (j, (a, b)) in big_x.entries.iter().zip(&refined.entries).enumerate() {
        if let Some(p) = a.iter().zip(b).position(|(u, v)| u != v) {
            return Err(Error::Inconsistent { j, word: words[p].to_string() });
        }
    }
    Ok(x)
}

fn floor_scaled(v: &Q, n: u64) -> i64 {
    let s = v * Q::from_integer(BigInt::from(n));
    s.numer().div_floor(s.denom()).to_i64().expect("count fits in i64")
}

/// Index of the largest entry among `cands` (first on ties), if positive.
fn argmax_positive(cands: impl Iterator<Item = (usize, i64)>) -> Option<usize> {
    let mut best: Option<(usize, i64)> = None;
    for (k, v) in cands {
        if v > 0 && best.map_or(true, |(_, bv)| v > bv) {
            best = Some((k, v));
        }
    }
    best.map(|b| b.0)
}

/// Denominator-n weight on `A×B` close to `w` whose `B`-marginal is exactly `wb`.
///
/// Distinguished symbols are the first of each alphabet. Negative back-filled entries
/// are repaired one unit at a time, always taking the largest available positive entry.
pub fn round_with_marginal(w: &Weight, wb: &DenominatorNWeight, n: u64) -> Result<DenominatorNWeight> {
    let factors = w
        .alphabet()
        .factors()
        .filter(|f| f.len() == 2)
        .ok_or_else(|| Error::ShapeMismatch("round_with_marginal needs an A×B alphabet".into()))?;
    let (pa, qb) = (factors[0].size(), factors[1].size());
    if wb.n() != n || wb.rank() != w.rank() || !wb.alphabet().same_symbols(&factors[1]) {
        return Err(Error::MarginalNotDenominatorN {
            n,
            detail: format!("marginal has n = {}, rank {}, alphabet size {}", wb.n(), wb.rank(), wb.alphabet().size()),
        });
    }
    let r = w.rank();
    let idx = |a: usize, b: usize| a * qb + b;
    let wbv = |b: usize| wb.vertex_count(b) as i64;

    // vertex measure
    let mut v = vec![vec![0i64; qb]; pa];
    for b in 0..qb {
        let mut rest = wbv(b);
        for a in 1..pa {
            v[a][b] = floor_scaled(&w.vertex_mass(idx(a, b)), n);
            rest -= v[a][b];
        }
        v[0][b] = rest;
        while v[0][b] < 0 {
            let ap = argmax_positive((1..pa).map(|a| (a, v[a][b])))
                .ok_or(Error::InfeasibleRepair { stage: "vertex" })?;
            v[ap][b] -= 1;
            v[0][b] += 1;
        }
    }

    let mut counts = Vec::with_capacity(r);
    for i in 0..r {
        // half-marginal h[b][a'][b']
        let mut half = vec![vec![vec![0i64; qb]; pa]; qb];
        let mut whalf = vec![vec![vec![Q::from_integer(BigInt::from(0)); qb]; pa]; qb];
        for ((x, y), val) in w.edge(i) {
            let (b, a2, b2) = (x % qb, y / qb, y % qb);
            whalf[b][a2][b2] += val;
        }
        for b in 1..qb {
            for b2 in 0..qb {
                let mut rest = wb.count(i, b, b2) as i64;
                for a2 in 1..pa {
                    half[b][a2][b2] = floor_scaled(&whalf[b][a2][b2], n);
                    rest -= half[b][a2][b2];
                }
                half[b][0][b2] = rest;
            }
        }
        for a2 in 0..pa {
            for b2 in 0..qb {
                let s: i64 = (1..qb).map(|b| half[b][a2][b2]).sum();
                half[0][a2][b2] = v[a2][b2] - s;
            }
        }
        loop {
            let neg = (0..qb)
                .flat_map(|b| (0..pa).flat_map(move |a2| (0..qb).map(move |b2| (b, a2, b2))))
                .find(|&(b, a2, b2)| half[b][a2][b2] < 0);
            let Some((bm, am, bm2)) = neg else { break };
            let ap = argmax_positive((0..pa).map(|a2| (a2, half[bm][a2][bm2])))
                .ok_or(Error::InfeasibleRepair { stage: "half-marginal row" })?;
            let bp = argmax_positive((0..qb).map(|b| (b, half[b][am][bm2])))
                .ok_or(Error::InfeasibleRepair { stage: "half-marginal column" })?;
            half[bm][ap][bm2] -= 1;
            half[bp][am][bm2] -= 1;
            half[bm][am][bm2] += 1;
            half[bp][ap][bm2] += 1;
        }

        // edge measure e[(a,b)][(a',b')]
        let m = pa * qb;
        let mut e = vec![vec![0i64; m]; m];
        for a in 1..pa {
            for b in 0..qb {
                for y in 1..m {
                    e[idx(a, b)][y] = floor_scaled(&w.entry(i, idx(a, b), y), n);
                }
            }
        }
        for b in 0..qb {
            for y in 1..m {
                let s: i64 = (1..pa).map(|a| e[idx(a, b)][y]).sum();
                e[idx(0, b)][y] = half[b][y / qb][y % qb] - s;
            }
        }
        for a in 0..pa {
            for b in 0..qb {
                let s: i64 = (1..m).map(|y| e[idx(a, b)][y]).sum();
                e[idx(a, b)][0] = v[a][b] - s;
            }
        }
        loop {
            let neg = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).find(|&(x, y)| e[x][y] < 0);
            let Some((xm, ym)) = neg else { break };
            let (am, bm) = (xm / qb, xm % qb);
            let yp = argmax_positive((0..m).map(|y| (y, e[xm][y])))
                .ok_or(Error::InfeasibleRepair { stage: "edge row" })?;
            let ap = argmax_positive((0..pa).map(|a| (a, e[idx(a, bm)][ym])))
                .ok_or(Error::InfeasibleRepair { stage: "edge column" })?;
            debug_assert_ne!(ap, am);
            e[xm][ym] += 1;
            e[idx(ap, bm)][yp] += 1;
            e[xm][yp] -= 1;
            e[idx(ap, bm)][ym] -= 1;
        }
        let mut c = BTreeMap::new();
        for (x, row) in e.iter().enumerate() {
            for (y, &val) in row.iter().enumerate() {
                if val > 0 {
                    c.insert((x, y), val as u64);
                }
            }
        }
        counts.push(c);
    }
    DenominatorNWeight::from_counts(r, w.alphabet().clone(), n, counts)
}

/// `265 r (δ + |A×B|²/n)`.
pub fn rounding_bound(r: usize, delta: &Q, alphabet_size: usize, n: u64) -> Q {
    let s = alphabet_size as i64;
    Q::from_integer(BigInt::from(265 * r as i64))
        * (delta + Q::new(BigInt::from(s * s), BigInt::from(n)))
}

/// Denominator-n approximation of an arbitrary weight.
pub fn round_denominator_n(w: &Weight, n: u64) -> Result<DenominatorNWeight> {
    let joint = Alphabet::pair(w.alphabet().clone(), Alphabet::singleton());
    let lifted = w.relabel(joint)?;
    let mut trivial = BTreeMap::new();
    trivial.insert((0, 0), n);
    let wb = DenominatorNWeight::from_counts(w.rank(), Alphabet::singleton(), n, vec![trivial; w.rank()])?;
    let out = round_with_marginal(&lifted, &wb, n)?;
    DenominatorNWeight::from_weight(out.weight().relabel(w.alphabet().clone())?, n)
}

/// How realization chooses block orders.
pub enum Mode<'a, R: Rng + ?Sized> {
    Deterministic,
    Random(&'a mut R),
}

/// A labeling with the prescribed letter counts, in symbol order.
pub(crate) fn labeling_from_counts(alphabet: &Alphabet, counts: &BTreeMap<usize, u64>) -> Labeling {
    let mut symbols = Vec::new();
    for (&a, &c) in counts {
        symbols.extend(std::iter::repeat(a).take(c as usize));
    }
    Labeling { alphabet: alphabet.clone(), symbols }
}

/// A permutation sending exactly `counts(a,b)` points labeled `a` to points labeled `b`.
///
/// With an RNG this is uniform over all such permutations.
pub(crate) fn contingency_permutation<R: Rng + ?Sized>(
    labels: &[usize],
    counts: &BTreeMap<(usize, usize), u64>,
    rng: Option<&mut R>,
) -> Vec<usize> {
    let n = labels.len();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (j, &a) in labels.iter().enumerate() {
        classes.entry(a).or_default().push(j);
    }
    let mut src = classes.clone();
    let mut dst = classes;
    if let Some(rng) = rng {
        for v in src.values_mut() {
            v.shuffle(rng);
        }
        for v in dst.values_mut() {
            v.shuffle(rng);
        }
    }
    let mut src_off: BTreeMap<usize, usize> = BTreeMap::new();
    let mut dst_off: BTreeMap<usize, usize> = BTreeMap::new();
    let mut perm = vec![usize::MAX; n];
    for (&(a, b), &c) in counts {
        let so = src_off.entry(a).or_insert(0);
        let d_o = dst_off.entry(b).or_insert(0);
        for t in 0..c as usize {
            perm[src[&a][*so + t]] = dst[&b][*d_o + t];
        }
        *so += c as usize;
        *d_o += c as usize;
    }
    perm
}

/// `(σ, x)` with `W_{σ,x} = W` exactly.
pub fn realize_weight<R: Rng + ?Sized>(w: &DenominatorNWeight, mode: Mode<'_, R>) -> (Homomorphism, Labeling) {
    let mut x = labeling_from_counts(w.alphabet(), w.vertex_counts());
    let perms = match mode {
        Mode::Deterministic => (0..w.rank())
            .map(|i| contingency_permutation::<R>(&x.symbols, w.counts(i), None))
            .collect(),
        Mode::Random(rng) => {
            x.symbols.shuffle(rng);
            (0..w.rank())
                .map(|i| contingency_permutation(&x.symbols, w.counts(i), Some(&mut *rng)))
                .collect()
        }
    };
    (Homomorphism::new(perms).expect("contingency permutations are bijections"), x)
}
