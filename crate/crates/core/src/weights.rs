//! Weights: per-generator pair measures sharing a common vertex marginal.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::rational::{entropy_q, Q};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Sparse matrix of nonzero entries.
pub type Entries = BTreeMap<(usize, usize), Q>;

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    rank: usize,
    alphabet: Alphabet,
    edges: Vec<Entries>,
    vertex: BTreeMap<usize, Q>,
}

impl Weight {
    /// Validates sparse edge matrices. Check order: shape, sign, normalization, axiom.
    pub fn from_entries(rank: usize, alphabet: Alphabet, edges: Vec<Entries>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ShapeMismatch("rank must be at least 1".into()));
        }
        if edges.len() != rank {
            return Err(Error::ShapeMismatch(format!(
                "expected {rank} edge matrices, got {}",
                edges.len()
            )));
        }
        let m = alphabet.size();
        let mut clean = Vec::with_capacity(rank);
        for (i, e) in edges.into_iter().enumerate() {
            let mut c = Entries::new();
            for ((a, b), v) in e {
                if a >= m || b >= m {
                    return Err(Error::ShapeMismatch(format!(
                        "generator {} entry ({a}, {b}) outside alphabet of size {m}",
                        i + 1
                    )));
                }
                if v.is_negative() {
                    return Err(Error::NegativeEntry {
                        i: i + 1,
                        a: alphabet.name(a),
                        b: alphabet.name(b),
                    });
                }
                if !v.is_zero() {
                    c.insert((a, b), v);
                }
            }
            clean.push(c);
        }
        for (i, e) in clean.iter().enumerate() {
            let s: Q = e.values().sum();
            if s != Q::from_integer(BigInt::from(1)) {
                return Err(Error::NotNormalized { i: i + 1, sum: crate::rational::format_q(&s) });
            }
        }
        let rows: Vec<BTreeMap<usize, Q>> = clean.iter().map(|e| margin(e, true)).collect();
        let cols: Vec<BTreeMap<usize, Q>> = clean.iter().map(|e| margin(e, false)).collect();
        let mut support: Vec<usize> = rows
            .iter()
            .chain(cols.iter())
            .flat_map(|m| m.keys().copied())
            .collect();
        support.sort_unstable();
        support.dedup();
        let zero = Q::zero();
        for &a in &support {
            for i in 0..rank {
                for j in 0..rank {
                    let r = rows[i].get(&a).unwrap_or(&zero);
                    let c = cols[j].get(&a).unwrap_or(&zero);
                    if r != c {
                        return Err(Error::AxiomViolation { i: i + 1, j: j + 1, a: alphabet.name(a) });
                    }
                }
            }
        }
        let vertex = rows.into_iter().next().unwrap_or_default();
        Ok(Weight { rank, alphabet, edges: clean, vertex })
    }

    /// Validates dense `rank × |A| × |A|` matrices.
    pub fn from_dense(rank: usize, alphabet: Alphabet, dense: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let m = alphabet.size();
        if dense.len() != rank {
            return Err(Error::ShapeMismatch(format!(
                "expected {rank} edge matrices, got {}",
                dense.len()
            )));
        }
        let mut edges = Vec::with_capacity(rank);
        for (i, mat) in dense.into_iter().enumerate() {
            if mat.len() != m || mat.iter().any(|row| row.len() != m) {
                return Err(Error::ShapeMismatch(format!(
                    "generator {} matrix is not {m}x{m}",
                    i + 1
                )));
            }
            let mut e = Entries::new();
            for (a, row) in mat.into_iter().enumerate() {
                for (b, v) in row.into_iter().enumerate() {
                    e.insert((a, b), v);
                }
            }
            edges.push(e);
        }
        Weight::from_entries(rank, alphabet, edges)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn edge(&self, i: usize) -> &Entries {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Entries] {
        &self.edges
    }

    pub fn entry(&self, i: usize, a: usize, b: usize) -> Q {
        self.edges[i].get(&(a, b)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn vertex(&self) -> &BTreeMap<usize, Q> {
        &self.vertex
    }

    pub fn vertex_mass(&self, a: usize) -> Q {
        self.vertex.get(&a).cloned().unwrap_or_else(Q::zero)
    }

    pub fn dense_edge(&self, i: usize) -> Vec<Vec<Q>> {
        let m = self.alphabet.size();
        let mut out = vec![vec![Q::zero(); m]; m];
        for ((a, b), v) in &self.edges[i] {
            out[*a][*b] = v.clone();
        }
        out
    }

    /// Same weight with a different (equal-size) alphabet tag.
    pub fn relabel(&self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.size() != self.alphabet.size() {
            return Err(Error::ShapeMismatch("relabel needs equal alphabet sizes".into()));
        }
        Ok(Weight { alphabet, ..self.clone() })
    }

    /// Smallest `n` with every entry a multiple of `1/n`.
    pub fn common_denominator(&self) -> BigInt {
        let mut l = BigInt::from(1);
        for e in &self.edges {
            for v in e.values() {
                l = num_integer::Integer::lcm(&l, v.denom());
            }
        }
        l
    }
}

fn margin(e: &Entries, rows: bool) -> BTreeMap<usize, Q> {
    let mut out: BTreeMap<usize, Q> = BTreeMap::new();
    for ((a, b), v) in e {
        let key = if rows { *a } else { *b };
        *out.entry(key).or_insert_with(Q::zero) += v;
    }
    out
}

/// Validates a candidate weight given as dense matrices.
pub fn validate_weight(rank: usize, alphabet: Alphabet, edges: Vec<Vec<Vec<Q>>>) -> Result<Weight> {
    Weight::from_dense(rank, alphabet, edges)
}

/// `½ Σ_i Σ_{a,a'} |W1(a,a';i) − W2(a,a';i)|`.
pub fn weight_distance(w1: &Weight, w2: &Weight) -> Result<Q> {
    if w1.rank != w2.rank || !w1.alphabet.same_symbols(&w2.alphabet) {
        return Err(Error::ShapeMismatch("weights differ in rank or alphabet".into()));
    }
    let mut total = Q::zero();
    for (e1, e2) in w1.edges.iter().zip(&w2.edges) {
        for (k, v) in e1 {
            match e2.get(k) {
                Some(u) => total += (v - u).abs(),
                None => total += v,
            }
        }
        for (k, u) in e2 {
            if !e1.contains_key(k) {
                total += u;
            }
        }
    }
    Ok(total / Q::from_integer(BigInt::from(2)))
}

/// `F(W) = (1 − 2r) H(W(·)) + Σ_i H(W(·,·;i))` in nats.
pub fn f_of_weight(w: &Weight) -> f64 {
    let r = w.rank as f64;
    let hv = entropy_q(w.vertex.values());
    let he: f64 = w.edges.iter().map(|e| entropy_q(e.values())).sum();
    (1.0 - 2.0 * r) * hv + he
}

/// `H(W(·))` in nats.
pub fn vertex_entropy(w: &Weight) -> f64 {
    entropy_q(w.vertex.values())
}

/// Pushforward along a symbol map into `target`.
pub fn pushforward_weight(w: &Weight, target: Alphabet, map: impl Fn(usize) -> usize) -> Weight {
    let mut edges = Vec::with_capacity(w.rank);
    for e in &w.edges {
        let mut out = Entries::new();
        for ((a, b), v) in e {
            *out.entry((map(*a), map(*b))).or_insert_with(Q::zero) += v;
        }
        edges.push(out);
    }
    let mut vertex = BTreeMap::new();
    for (a, v) in &w.vertex {
        *vertex.entry(map(*a)).or_insert_with(Q::zero) += v;
    }
    for e in &mut edges {
        e.retain(|_, v| !v.is_zero());
    }
    vertex.retain(|_, v: &mut Q| !v.is_zero());
    Weight { rank: w.rank, alphabet: target, edges, vertex }
}

/// Projection of a product-alphabet weight onto factor `m`.
pub fn project_factor(w: &Weight, m: usize) -> Result<Weight> {
    let factors = w
        .alphabet
        .factors()
        .ok_or_else(|| Error::ShapeMismatch("projection needs a product alphabet".into()))?;
    let target = factors
        .get(m)
        .cloned()
        .ok_or_else(|| Error::ShapeMismatch(format!("no factor {m}")))?;
    let alph = w.alphabet.clone();
    Ok(pushforward_weight(w, target, move |a| alph.decode_product(a)[m]))
}

/// `π_e`: restriction of a ball-alphabet weight to the identity coordinate.
pub fn project_root(w: &Weight) -> Weight {
    project_radius(w, 0).expect("radius 0 always fits")
}

/// `π_{k,m}`: restriction of a radius-`k` ball alphabet to radius `m ≤ k`.
pub fn project_radius(w: &Weight, m: usize) -> Result<Weight> {
    match w.alphabet.clone() {
        Alphabet::Ball { base, rank, radius } => {
            if m > radius {
                return Err(Error::ShapeMismatch(format!("radius {m} exceeds {radius}")));
            }
            let drop = crate::words::ball_size(rank, radius) - crate::words::ball_size(rank, m);
            let div = crate::alphabet::checked_pow(base.size(), drop).expect("fits");
            let target = Alphabet::ball(*base, rank, m)?;
            Ok(pushforward_weight(w, target, move |a| a / div))
        }
        _ if m == 0 => Ok(w.clone()),
        _ => Err(Error::ShapeMismatch("radius projection needs a ball alphabet".into())),
    }
}

/// Projects `(A_0 × ... )^{B(e,k)}` onto `A_m^{B(e,k)}` coordinatewise.
pub fn project_ball_factor(w: &Weight, m: usize) -> Result<Weight> {
    match w.alphabet.clone() {
        Alphabet::Ball { base, rank, radius } => {
            let factors = base
                .factors()
                .ok_or_else(|| Error::ShapeMismatch("ball base is not a product".into()))?
                .to_vec();
            let target = Alphabet::ball(factors[m].clone(), rank, radius)?;
            let t2 = target.clone();
            let src = w.alphabet.clone();
            let b = (*base).clone();
            Ok(pushforward_weight(w, target, move |a| {
                let labels: Vec<usize> =
                    src.decode_ball(a).into_iter().map(|l| b.decode_product(l)[m]).collect();
                t2.encode_ball(&labels)
            }))
        }
        _ => project_factor(w, m),
    }
}

/// A weight whose entries are all multiples of `1/n`, with integer counts cached.
#[derive(Clone, Debug, PartialEq)]
pub struct DenominatorNWeight {
    weight: Weight,
    n: u64,
    counts: Vec<BTreeMap<(usize, usize), u64>>,
    vertex_counts: BTreeMap<usize, u64>,
}

impl DenominatorNWeight {
    pub fn from_weight(weight: Weight, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotDenominatorN { n, detail: "n must be positive".into() });
        }
        let nq = Q::from_integer(BigInt::from(n));
        let mut counts = Vec::with_capacity(weight.rank);
        for (i, e) in weight.edges.iter().enumerate() {
            let mut c = BTreeMap::new();
            for (k, v) in e {
                let s = v * &nq;
                if !s.is_integer() {
                    return Err(Error::NotDenominatorN {
                        n,
                        detail: format!("generator {} entry {:?} times n is not an integer", i + 1, k),
                    });
                }
                c.insert(*k, s.to_integer().to_u64().expect("count fits in u64"));
            }
            counts.push(c);
        }
        let vertex_counts = vertex_from_counts(&counts[0]);
        Ok(DenominatorNWeight { weight, n, counts, vertex_counts })
    }

    /// Builds from integer counts; each matrix must sum to `n` and satisfy the axiom.
    pub fn from_counts(
        rank: usize,
        alphabet: Alphabet,
        n: u64,
        counts: Vec<BTreeMap<(usize, usize), u64>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotDenominatorN { n, detail: "n must be positive".into() });
        }
        let nq = BigInt::from(n);
        let edges: Vec<Entries> = counts
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(k, v)| (*k, Q::new(BigInt::from(*v), nq.clone())))
                    .collect()
            })
            .collect();
        let weight = Weight::from_entries(rank, alphabet, edges)?;
        let counts: Vec<BTreeMap<(usize, usize), u64>> = counts
            .into_iter()
            .map(|mut c| {
                c.retain(|_, v| *v != 0);
                c
            })
            .collect();
        let vertex_counts = vertex_from_counts(&counts[0]);
        Ok(DenominatorNWeight { weight, n, counts, vertex_counts })
    }

    pub fn from_dense_counts(
        rank: usize,
        alphabet: Alphabet,
        n: u64,
        dense: Vec<Vec<Vec<u64>>>,
    ) -> Result<Self> {
        let m = alphabet.size();
        if dense.len() != rank || dense.iter().any(|mat| mat.len() != m || mat.iter().any(|r| r.len() != m)) {
            return Err(Error::ShapeMismatch(format!("expected {rank} count matrices of size {m}x{m}")));
        }
        let counts = dense
            .into_iter()
            .map(|mat| {
                let mut c = BTreeMap::new();
                for (a, row) in mat.into_iter().enumerate() {
                    for (b, v) in row.into_iter().enumerate() {
                        if v != 0 {
                            c.insert((a, b), v);
                        }
                    }
                }
                c
            })
            .collect();
        DenominatorNWeight::from_counts(rank, alphabet, n, counts)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn into_weight(self) -> Weight {
        self.weight
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.weight.rank
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.weight.alphabet
    }

    pub fn counts(&self, i: usize) -> &BTreeMap<(usize, usize), u64> {
        &self.counts[i]
    }

    pub fn count(&self, i: usize, a: usize, b: usize) -> u64 {
        self.counts[i].get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn vertex_counts(&self) -> &BTreeMap<usize, u64> {
        &self.vertex_counts
    }

    pub fn vertex_count(&self, a: usize) -> u64 {
        self.vertex_counts.get(&a).copied().unwrap_or(0)
    }
}

fn vertex_from_counts(c: &BTreeMap<(usize, usize), u64>) -> BTreeMap<usize, u64> {
    let mut v = BTreeMap::new();
    for ((a, _), x) in c {
        *v.entry(*a).or_insert(0) += x;
    }
    v
}

/// Continuity bound `4r(H(ε) + ε log₂|A|)` with `H` in nats.
pub fn f_continuity_bound(r: usize, eps: f64, alphabet_size: usize) -> f64 {
    4.0 * r as f64 * (crate::rational::binary_entropy(eps) + eps * (alphabet_size as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn two_cycle() -> Weight {
        validate_weight(
            1,
            Alphabet::range(2),
            vec![vec![vec![q(0, 1), q(1, 2)], vec![q(1, 2), q(0, 1)]]],
        )
        .unwrap()
    }

    fn uniform2(r: usize) -> Weight {
        validate_weight(r, Alphabet::range(2), vec![vec![vec![q(1, 4); 2]; 2]; r]).unwrap()
    }

    #[test]
    fn validates_examples() {
        let w = two_cycle();
        assert_eq!(w.vertex_mass(0), q(1, 2));
        assert_eq!(w.vertex_mass(1), q(1, 2));
        let w2 = validate_weight(
            2,
            Alphabet::range(2),
            vec![
                vec![vec![q(1, 4); 2]; 2],
                vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 2)]],
            ],
        )
        .unwrap();
        assert_eq!(w2.vertex_mass(1), q(1, 2));
        let bad = validate_weight(
            2,
            Alphabet::range(2),
            vec![
                vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]],
                vec![vec![q(1, 4); 2]; 2],
            ],
        );
        assert!(matches!(bad, Err(Error::AxiomViolation { .. })));
    }

    #[test]
    fn rejects_unnormalized_and_shape() {
        let e = validate_weight(1, Alphabet::range(2), vec![vec![vec![q(1, 4); 2]; 1]]);
        assert!(matches!(e, Err(Error::ShapeMismatch(_))));
        let e = validate_weight(1, Alphabet::range(2), vec![vec![vec![q(1, 8); 2]; 2]]);
        assert!(matches!(e, Err(Error::NotNormalized { .. })));
        let e = validate_weight(
            1,
            Alphabet::range(2),
            vec![vec![vec![q(-1, 4), q(3, 4)], vec![q(1, 4), q(1, 4)]]],
        );
        assert!(matches!(e, Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn distance_examples() {
        let w = two_cycle();
        assert_eq!(weight_distance(&w, &w).unwrap(), q(0, 1));
        let diag = validate_weight(
            1,
            Alphabet::range(2),
            vec![vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 2)]]],
        )
        .unwrap();
        assert_eq!(weight_distance(&w, &diag).unwrap(), q(1, 1));
        let u = uniform2(2);
        let moved = validate_weight(
            2,
            Alphabet::range(2),
            vec![
                vec![vec![q(3, 8), q(1, 8)], vec![q(1, 8), q(3, 8)]],
                vec![vec![q(1, 4); 2]; 2],
            ],
        )
        .unwrap();
        assert_eq!(weight_distance(&u, &moved).unwrap(), q(1, 4));
    }

    #[test]
    fn f_examples() {
        let single =
            validate_weight(2, Alphabet::singleton(), vec![vec![vec![q(1, 1)]]; 2]).unwrap();
        assert_eq!(f_of_weight(&single), 0.0);
        assert!((f_of_weight(&uniform2(2)) - 2f64.ln()).abs() < 1e-12);
        assert!(f_of_weight(&two_cycle()).abs() < 1e-12);
    }

    #[test]
    fn pushforward_examples() {
        let w = uniform2(2);
        assert_eq!(pushforward_weight(&w, Alphabet::range(2), |a| a), w);
        let t = pushforward_weight(&w, Alphabet::singleton(), |_| 0);
        assert_eq!(t.entry(0, 0, 0), q(1, 1));
        assert_eq!(t.entry(1, 0, 0), q(1, 1));
    }

    #[test]
    fn denominator_n_checks() {
        let w = two_cycle();
        let d = DenominatorNWeight::from_weight(w.clone(), 2).unwrap();
        assert_eq!(d.count(0, 0, 1), 1);
        assert_eq!(d.vertex_count(1), 1);
        assert!(DenominatorNWeight::from_weight(w, 3).is_err());
    }
}
