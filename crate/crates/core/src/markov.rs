//! Shift-invariant Markov measures on `A^G` and entropy functionals of coordinate observables.
//!
//! A Markov measure is determined by its weight: the vertex measure is the law of the
//! identity coordinate and `W(·,·;i)` is the law of `(ω_g, ω_{s_i g})`. Marginals on a
//! finite subtree factor along tree edges.

use crate::alphabet::Alphabet;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rational::{plogp, to_f64, Q};
use crate::weights::{f_of_weight, Entries, Weight};
use crate::words::{Letter, Subtree};
use num_traits::Zero;
use std::collections::HashMap;

type Step = (usize, Q, f64);

#[derive(Clone, Debug)]
pub struct MarkovMeasure {
    weight: Weight,
    vertex: Vec<Step>,
    /// `trans[i][0][a]`: forward steps along `s_i`; `trans[i][1][a]`: along `s_i^{-1}`.
    trans: Vec<[Vec<Vec<Step>>; 2]>,
}

impl MarkovMeasure {
    pub fn new(weight: Weight) -> Self {
        let m = weight.alphabet().size();
        let vertex: Vec<Step> = weight
            .vertex()
            .iter()
            .map(|(a, v)| (*a, v.clone(), to_f64(v)))
            .collect();
        let mut trans = Vec::with_capacity(weight.rank());
        for i in 0..weight.rank() {
            let mut fwd = vec![Vec::new(); m];
            let mut bwd = vec![Vec::new(); m];
            for ((a, b), v) in weight.edge(i) {
                let pf = v / weight.vertex_mass(*a);
                fwd[*a].push((*b, pf.clone(), to_f64(&pf)));
                let pb = v / weight.vertex_mass(*b);
                bwd[*b].push((*a, pb.clone(), to_f64(&pb)));
            }
            for row in bwd.iter_mut() {
                row.sort_by_key(|s| s.0);
            }
            trans.push([fwd, bwd]);
        }
        MarkovMeasure { weight, vertex, trans }
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn rank(&self) -> usize {
        self.weight.rank()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.weight.alphabet()
    }

    fn steps(&self, l: Letter, a: usize) -> &[Step] {
        &self.trans[l.gen][l.inv as usize][a]
    }

    /// Exact mass of one labeling of `tree` (positions in tree order).
    pub fn labeling_mass(&self, tree: &Subtree, labels: &[usize]) -> Q {
        let mut p = self.weight.vertex_mass(labels[0]);
        if p.is_zero() {
            return p;
        }
        for pos in 1..tree.len() {
            let parent = labels[tree.parent[pos]];
            match self.steps(tree.edge[pos], parent).iter().find(|s| s.0 == labels[pos]) {
                Some(s) => p *= &s.1,
                None => return Q::zero(),
            }
        }
        p
    }

    /// Visits every positive-mass labeling of `tree` in lexicographic order, in floating point.
    pub fn for_each_atom(&self, tree: &Subtree, mut f: impl FnMut(&[usize], f64)) {
        let mut labels = vec![0usize; tree.len()];
        for (a, _, pa) in &self.vertex {
            labels[0] = *a;
            self.dfs_f64(tree, 1, &mut labels, *pa, &mut f);
        }
    }

    fn dfs_f64(&self, tree: &Subtree, pos: usize, labels: &mut [usize], p: f64, f: &mut impl FnMut(&[usize], f64)) {
        if pos == tree.len() {
            f(labels, p);
            return;
        }
        let parent = labels[tree.parent[pos]];
        for (b, _, pb) in self.steps(tree.edge[pos], parent) {
            labels[pos] = *b;
            self.dfs_f64(tree, pos + 1, labels, p * pb, f);
        }
    }

    /// Exact counterpart of [`for_each_atom`](Self::for_each_atom).
    pub fn for_each_atom_exact(&self, tree: &Subtree, mut f: impl FnMut(&[usize], &Q)) {
        let mut labels = vec![0usize; tree.len()];
        for (a, pa, _) in &self.vertex {
            labels[0] = *a;
            self.dfs_q(tree, 1, &mut labels, pa, &mut f);
        }
    }

    fn dfs_q(&self, tree: &Subtree, pos: usize, labels: &mut [usize], p: &Q, f: &mut impl FnMut(&[usize], &Q)) {
        if pos == tree.len() {
            f(labels, p);
            return;
        }
        let parent = labels[tree.parent[pos]];
        for (b, pb, _) in self.steps(tree.edge[pos], parent) {
            labels[pos] = *b;
            let next = p * pb;
            self.dfs_q(tree, pos + 1, labels, &next, f);
        }
    }
}

/// Exact law of the labeling of `tree`; zero-mass labelings are omitted.
pub fn subtree_marginal(m: &MarkovMeasure, tree: &Subtree, budget: &Budget) -> Result<Vec<(Vec<usize>, Q)>> {
    budget.check_atoms(m.alphabet().size(), tree.len(), "subtree marginal")?;
    let mut out = Vec::new();
    m.for_each_atom_exact(tree, |l, p| out.push((l.to_vec(), p.clone())));
    Ok(out)
}

/// Positions of `B(e,k)` and of `B(e,k)·s_i` inside the union tree.
pub(crate) struct UnionLayout {
    pub tree: Subtree,
    pub at_e: Vec<usize>,
    pub at_s: Vec<usize>,
}

impl UnionLayout {
    pub fn new(rank: usize, k: usize, i: usize) -> Self {
        let tree = Subtree::ball_union(rank, k, i);
        let ball = Subtree::ball(rank, k);
        let s = Letter::new(i, false);
        let at_e = ball.words.iter().map(|w| tree.position(w).expect("in union")).collect();
        let at_s = ball
            .words
            .iter()
            .map(|w| tree.position(&w.mul_right(s)).expect("in union"))
            .collect();
        UnionLayout { tree, at_e, at_s }
    }

    /// Joins a compatible pair of ball labelings into a union labeling.
    pub fn join(&self, a: &[usize], a2: &[usize]) -> Option<Vec<usize>> {
        let mut out = vec![usize::MAX; self.tree.len()];
        for (p, &u) in self.at_e.iter().enumerate() {
            out[u] = a[p];
        }
        for (p, &u) in self.at_s.iter().enumerate() {
            if out[u] != usize::MAX && out[u] != a2[p] {
                return None;
            }
            out[u] = a2[p];
        }
        Some(out)
    }
}

/// The weight of `α^k` under `m`, over the alphabet `A^{B(e,k)}`.
pub fn ball_weight(m: &MarkovMeasure, k: usize, budget: &Budget) -> Result<Weight> {
    if k == 0 {
        return Ok(m.weight().clone());
    }
    let r = m.rank();
    let base = m.alphabet().clone();
    let q = base.size();
    let alphabet = Alphabet::ball(base, r, k)?;
    let mut edges = Vec::with_capacity(r);
    for i in 0..r {
        let lay = UnionLayout::new(r, k, i);
        budget.check_atoms(q, lay.tree.len(), "ball weight")?;
        let mut e = Entries::new();
        m.for_each_atom_exact(&lay.tree, |l, p| {
            let a = lay.at_e.iter().fold(0usize, |acc, &u| acc * q + l[u]);
            let a2 = lay.at_s.iter().fold(0usize, |acc, &u| acc * q + l[u]);
            *e.entry((a, a2)).or_insert_with(Q::zero) += p;
        });
        edges.push(e);
    }
    Weight::from_entries(r, alphabet, edges)
}

/// Lazily evaluated entries of the ball weight, for radii too large to materialize.
pub struct BallMass<'a> {
    m: &'a MarkovMeasure,
    ball: Subtree,
    unions: Vec<UnionLayout>,
}

impl<'a> BallMass<'a> {
    pub fn new(m: &'a MarkovMeasure, k: usize) -> Self {
        let r = m.rank();
        BallMass {
            m,
            ball: Subtree::ball(r, k),
            unions: (0..r).map(|i| UnionLayout::new(r, k, i)).collect(),
        }
    }

    pub fn ball(&self) -> &Subtree {
        &self.ball
    }

    pub fn vertex_mass(&self, labels: &[usize]) -> Q {
        self.m.labeling_mass(&self.ball, labels)
    }

    /// Mass of `(a, a2)` for generator `i`; zero on incompatible pairs.
    pub fn edge_mass(&self, i: usize, a: &[usize], a2: &[usize]) -> Q {
        let lay = &self.unions[i];
        match lay.join(a, a2) {
            Some(l) => self.m.labeling_mass(&lay.tree, &l),
            None => Q::zero(),
        }
    }

    /// Mass of a labeling of the union tree for generator `i`.
    pub fn union_mass(&self, i: usize, labels: &[usize]) -> Q {
        self.m.labeling_mass(&self.unions[i].tree, labels)
    }

    pub fn union_tree(&self, i: usize) -> &Subtree {
        &self.unions[i].tree
    }
}

/// Coordinate observables on a (possibly product) alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observable {
    Identity,
    Coordinate(usize),
    /// `obs^{B(e,k)}`.
    Ball(Box<Observable>, usize),
    /// Common refinement of two observables.
    Pair(Box<Observable>, Box<Observable>),
}

impl Observable {
    pub fn ball(self, k: usize) -> Self {
        Observable::Ball(Box::new(self), k)
    }

    pub fn pair(a: Observable, b: Observable) -> Self {
        Observable::Pair(Box::new(a), Box::new(b))
    }

    /// Flattens into `(projection, radius)` pieces.
    fn pieces(&self) -> Vec<(Option<usize>, usize)> {
        match self {
            Observable::Identity => vec![(None, 0)],
            Observable::Coordinate(m) => vec![(Some(*m), 0)],
            Observable::Ball(o, k) => o.pieces().into_iter().map(|(p, r)| (p, r + k)).collect(),
            Observable::Pair(a, b) => {
                let mut v = a.pieces();
                v.extend(b.pieces());
                v
            }
        }
    }

    /// Alphabet of observed values.
    pub fn target_alphabet(&self, source: &Alphabet, rank: usize) -> Result<Alphabet> {
        match self {
            Observable::Identity => Ok(source.clone()),
            Observable::Coordinate(m) => source
                .factors()
                .and_then(|f| f.get(*m).cloned())
                .ok_or_else(|| Error::ShapeMismatch(format!("no coordinate {m}"))),
            Observable::Ball(o, k) => Alphabet::ball(o.target_alphabet(source, rank)?, rank, *k),
            Observable::Pair(a, b) => Ok(Alphabet::pair(
                a.target_alphabet(source, rank)?,
                b.target_alphabet(source, rank)?,
            )),
        }
    }
}

/// Window `H` over which an observable is read: `{e}` or `{e, s_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Vertex,
    Edge(usize),
}

struct Plan {
    digits: Vec<(usize, Option<usize>, u128)>,
    injective: bool,
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

/// Entropies of several observables over one window from a single enumeration.
fn entropies_multi(m: &MarkovMeasure, obs: &[&Observable], window: Window, budget: &Budget) -> Result<Vec<f64>> {
    let r = m.rank();
    let alph = m.alphabet();
    let q = alph.size();
    let all_pieces: Vec<Vec<(Option<usize>, usize)>> = obs.iter().map(|o| o.pieces()).collect();
    let max_k = all_pieces.iter().flatten().map(|p| p.1).max().unwrap_or(0);
    let extra = match window {
        Window::Vertex => None,
        Window::Edge(i) => Some(Letter::new(i, false)),
    };
    let region = |k: usize| -> Vec<crate::words::Word> {
        let ball = crate::words::ball_words(r, k);
        match extra {
            None => ball,
            Some(s) => {
                let mut v = ball.clone();
                v.extend(ball.iter().map(|w| w.mul_right(s)));
                v
            }
        }
    };
    let tree = Subtree::new(r, region(max_k))?;
    budget.check_atoms(q, tree.len(), "observable entropy")?;
    let proj: Vec<Vec<usize>> = match alph.factors() {
        Some(f) => (0..f.len())
            .map(|mm| (0..q).map(|a| alph.decode_product(a)[mm]).collect())
            .collect(),
        None => Vec::new(),
    };
    let mut plans = Vec::new();
    for pieces in &all_pieces {
        let mut digits = Vec::new();
        let mut capacity: f64 = 1.0;
        for (p, k) in pieces {
            let mut pos: Vec<usize> = region(*k).iter().map(|w| tree.position(w).expect("in tree")).collect();
            pos.sort_unstable();
            pos.dedup();
            let radix = match p {
                None => q,
                Some(mm) => alph
                    .factors()
                    .and_then(|f| f.get(*mm))
                    .ok_or_else(|| Error::ShapeMismatch(format!("no coordinate {mm}")))?
                    .size(),
            };
            for u in pos {
                digits.push((u, *p, radix as u128));
                capacity *= radix as f64;
            }
        }
        if capacity >= 2f64.powi(127) {
            return Err(Error::BudgetExceeded {
                what: "observable key space",
                needed: format!("{capacity:e}"),
                limit: u64::MAX,
            });
        }
        let mut full: Vec<usize> = digits.iter().filter(|d| d.1.is_none()).map(|d| d.0).collect();
        full.sort_unstable();
        full.dedup();
        let injective = full.len() == tree.len();
        plans.push(Plan { digits, injective });
    }
    let mut maps: Vec<HashMap<u128, f64>> = vec![HashMap::new(); plans.len()];
    let mut direct = vec![(0.0f64, 0.0f64); plans.len()];
    m.for_each_atom(&tree, |l, p| {
        for ((plan, map), acc) in plans.iter().zip(maps.iter_mut()).zip(direct.iter_mut()) {
            if plan.injective {
                neumaier(acc, plogp(p));
                continue;
            }
            let mut key: u128 = 0;
            for (u, pr, radix) in &plan.digits {
                let d = match pr {
                    None => l[*u],
                    Some(mm) => proj[*mm][l[*u]],
                };
                key = key * radix + d as u128;
            }
            *map.entry(key).or_insert(0.0) += p;
        }
    });
    Ok(maps
        .into_iter()
        .zip(plans.iter().zip(direct))
        .map(|(map, (plan, acc))| {
            if plan.injective {
                return acc.0 + acc.1;
            }
            let mut v: Vec<(u128, f64)> = map.into_iter().collect();
            v.sort_unstable_by_key(|e| e.0);
            let mut acc = (0.0, 0.0);
            for (_, p) in v {
                neumaier(&mut acc, plogp(p));
            }
            acc.0 + acc.1
        })
        .collect())
}

/// Shannon entropy of `obs` read over `window`.
pub fn entropy_of_observable(m: &MarkovMeasure, obs: &Observable, window: Window, budget: &Budget) -> Result<f64> {
    Ok(entropies_multi(m, &[obs], window, budget)?[0])
}

/// `F_μ(T, obs) = (1−2r) H(obs) + Σ_i H(obs^{e,s_i})`.
pub fn f_of_observable(m: &MarkovMeasure, obs: &Observable, budget: &Budget) -> Result<f64> {
    let r = m.rank();
    let mut total = (1.0 - 2.0 * r as f64) * entropy_of_observable(m, obs, Window::Vertex, budget)?;
    for i in 0..r {
        total += entropy_of_observable(m, obs, Window::Edge(i), budget)?;
    }
    Ok(total)
}

/// `F_μ(T, α^{k1} | β^{k2})` with `α`, `β` the two coordinates of a product alphabet.
pub fn f_rel(m: &MarkovMeasure, k1: usize, k2: usize, budget: &Budget) -> Result<f64> {
    let r = m.rank();
    let joint = Observable::pair(Observable::Coordinate(0).ball(k1), Observable::Coordinate(1).ball(k2));
    let beta = Observable::Coordinate(1).ball(k2);
    let cond = |w: Window| -> Result<f64> {
        let h = entropies_multi(m, &[&joint, &beta], w, budget)?;
        Ok(h[0] - h[1])
    };
    let mut total = (1.0 - 2.0 * r as f64) * cond(Window::Vertex)?;
    for i in 0..r {
        total += cond(Window::Edge(i))?;
    }
    Ok(total)
}

/// `(F(α^K | β^K), F(α^1 | β^K))`.
pub fn f_rel_bracket(m: &MarkovMeasure, k: usize, budget: &Budget) -> Result<(f64, f64)> {
    Ok((f_rel(m, k, k, budget)?, f_rel(m, 1, k, budget)?))
}

/// `H(α | β)` at the identity coordinate.
pub fn conditional_entropy_root(m: &MarkovMeasure, budget: &Budget) -> Result<f64> {
    let joint = Observable::pair(Observable::Coordinate(0), Observable::Coordinate(1));
    let beta = Observable::Coordinate(1);
    let h = entropies_multi(m, &[&joint, &beta], Window::Vertex, budget)?;
    Ok(h[0] - h[1])
}

/// The f-invariant of a Markov measure, `F` of its defining weight.
pub fn f_markov(m: &MarkovMeasure) -> f64 {
    f_of_weight(m.weight())
}
