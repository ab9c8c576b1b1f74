//! Reduced words in the free group and finite subtrees of its Cayley tree.
//!
//! A word `l_1 l_2 ... l_m` is stored in group-product order. The tree edges are
//! `g -- s_i g`, so the parent of a non-identity word is the word with its first
//! letter removed and the connecting edge carries that first letter.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// A generator `s_gen` (`inv == false`) or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    fn order_key(self) -> (usize, bool) {
        (self.gen, self.inv)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.inv { 'S' } else { 's' };
        write!(f, "{c}{}", self.gen + 1)
    }
}

/// Reduced word; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// `self * l`.
    pub fn mul_right(&self, l: Letter) -> Self {
        let mut v = self.0.clone();
        if v.last() == Some(&l.inverse()) {
            v.pop();
        } else {
            v.push(l);
        }
        Word(v)
    }

    /// `l * self`.
    pub fn mul_left(&self, l: Letter) -> Self {
        if self.0.first() == Some(&l.inverse()) {
            Word(self.0[1..].to_vec())
        } else {
            let mut v = Vec::with_capacity(self.0.len() + 1);
            v.push(l);
            v.extend_from_slice(&self.0);
            Word(v)
        }
    }

    /// Parses strings such as `"s1S2"`, `"e"` or `""`; the result is reduced.
    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::identity());
        }
        let bytes = s.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let inv = match bytes[i] {
                b's' => false,
                b'S' => true,
                _ => return Err(Error::Parse(format!("invalid word {s:?}"))),
            };
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let g: usize = s[start..i]
                .parse()
                .map_err(|_| Error::Parse(format!("invalid word {s:?}")))?;
            if g == 0 || g > rank {
                return Err(Error::Parse(format!(
                    "generator index {g} out of range 1..={rank} in {s:?}"
                )));
            }
            letters.push(Letter::new(g - 1, inv));
        }
        Ok(Word::reduce(letters))
    }

    fn order_key(&self) -> (usize, Vec<(usize, bool)>) {
        (self.0.len(), self.0.iter().map(|l| l.order_key()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `|B(e,k)|` in rank `r`.
pub fn ball_size(r: usize, k: usize) -> usize {
    let mut total = 1usize;
    let mut shell = 2 * r;
    for _ in 0..k {
        total += shell;
        shell *= 2 * r - 1;
    }
    total
}

/// All reduced words of length at most `k`, ordered by length then lexicographically.
pub fn ball_words(r: usize, k: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..r {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    if w.0.last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        next.sort_by_key(|w| w.order_key());
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A finite subtree of the Cayley tree containing `e`, with parents listed before children.
#[derive(Clone, Debug)]
pub struct Subtree {
    pub rank: usize,
    pub words: Vec<Word>,
    /// `parent[p]` for `p > 0`; `parent[0]` is unused.
    pub parent: Vec<usize>,
    /// Letter `l` with `words[p] = l * words[parent[p]]`.
    pub edge: Vec<Letter>,
    index: HashMap<Word, usize>,
}

impl Subtree {
    /// Builds a subtree from a word set; fails unless the set contains `e` and is closed
    /// under removing the first letter.
    pub fn new(rank: usize, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut ws: Vec<Word> = words.into_iter().collect();
        ws.sort_by_key(|w| w.order_key());
        ws.dedup();
        if ws.first().map(|w| w.is_identity()) != Some(true) {
            return Err(Error::ShapeMismatch("subtree must contain e".into()));
        }
        let index: HashMap<Word, usize> =
            ws.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut parent = vec![0usize; ws.len()];
        let mut edge = vec![Letter::new(0, false); ws.len()];
        for (p, w) in ws.iter().enumerate().skip(1) {
            if w.0.iter().any(|l| l.gen >= rank) {
                return Err(Error::ShapeMismatch(format!("word {w} exceeds rank {rank}")));
            }
            let par = Word(w.0[1..].to_vec());
            let pi = *index.get(&par).ok_or_else(|| {
                Error::ShapeMismatch(format!("word set not connected: missing parent of {w}"))
            })?;
            parent[p] = pi;
            edge[p] = w.0[0];
        }
        Ok(Subtree { rank, words: ws, parent, edge, index })
    }

    pub fn ball(rank: usize, k: usize) -> Self {
        Subtree::new(rank, ball_words(rank, k)).expect("balls are subtrees")
    }

    /// `B(e,k) ∪ B(e,k)·s_i`.
    pub fn ball_union(rank: usize, k: usize, i: usize) -> Self {
        let s = Letter::new(i, false);
        let ball = ball_words(rank, k);
        let shifted: Vec<Word> = ball.iter().map(|h| h.mul_right(s)).collect();
        Subtree::new(rank, ball.into_iter().chain(shifted)).expect("ball unions are subtrees")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes_match_formula() {
        for r in 1..=3 {
            for k in 0..=3 {
                assert_eq!(ball_words(r, k).len(), ball_size(r, k));
            }
        }
        assert_eq!(ball_size(2, 2), 17);
        assert_eq!(ball_size(1, 3), 7);
    }

    #[test]
    fn parse_and_reduce() {
        let w = Word::parse("s1S2s2s1", 2).unwrap();
        assert_eq!(w.to_string(), "s1s1");
        assert!(Word::parse("s1S1", 1).unwrap().is_identity());
        assert!(Word::parse("s3", 2).is_err());
        assert!(Word::parse("x1", 2).is_err());
    }

    #[test]
    fn union_size() {
        for r in 1..=2 {
            for k in 0..=2 {
                let u = Subtree::ball_union(r, k, 0);
                let extra = (2 * r - 1).pow(k as u32);
                assert_eq!(u.len(), ball_size(r, k) + extra);
            }
        }
        assert_eq!(Subtree::ball_union(2, 2, 1).len(), 26);
    }

    #[test]
    fn rejects_disconnected() {
        let w = Word::parse("s1s1", 1).unwrap();
        assert!(Subtree::new(1, vec![Word::identity(), w]).is_err());
    }

    #[test]
    fn ball_prefix_is_smaller_ball() {
        let b2 = ball_words(2, 2);
        let b1 = ball_words(2, 1);
        assert_eq!(&b2[..b1.len()], &b1[..]);
    }
}
