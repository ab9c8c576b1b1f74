//! JSON interchange formats. Rationals travel as reduced `"p/q"` strings and permutation
//! images are 1-based.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::markov::MarkovMeasure;
use crate::rational::{format_q, parse_q};
use crate::realize::{Homomorphism, Labeling};
use crate::sampler::SbmSpec;
use crate::weights::{DenominatorNWeight, Weight};
use serde::{Deserialize, Serialize};

/// Largest alphabet serialized densely.
pub const MAX_DENSE_ALPHABET: usize = 4096;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WeightJson {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub rank: usize,
    pub alphabet: Vec<String>,
    pub edges: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomJson {
    pub n: usize,
    pub perms: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LabelingJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    pub symbols: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SbmSpecJson {
    pub alphabet: Vec<String>,
    pub rank: usize,
    pub y: Vec<String>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<HomJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<WeightJson>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(parse_err)
}

pub fn to_string_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

impl WeightJson {
    pub fn from_weight(w: &Weight, n: Option<u64>, markov: bool) -> Result<Self> {
        let m = w.alphabet().size();
        if m > MAX_DENSE_ALPHABET {
            return Err(Error::BudgetExceeded {
                what: "dense weight serialization",
                needed: m.to_string(),
                limit: MAX_DENSE_ALPHABET as u64,
            });
        }
        let edges = (0..w.rank())
            .map(|i| w.dense_edge(i).iter().map(|row| row.iter().map(format_q).collect()).collect())
            .collect();
        Ok(WeightJson {
            kind: markov.then(|| "markov".to_string()),
            rank: w.rank(),
            alphabet: w.alphabet().names(),
            edges,
            n,
        })
    }

    pub fn to_weight(&self) -> Result<Weight> {
        let alphabet = Alphabet::from_names(self.alphabet.clone())?;
        let dense = self
            .edges
            .iter()
            .map(|mat| {
                mat.iter()
                    .map(|row| row.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Weight::from_dense(self.rank, alphabet, dense)
    }

    pub fn to_denominator_n(&self) -> Result<DenominatorNWeight> {
        let w = self.to_weight()?;
        let n = match self.n {
            Some(n) => n,
            None => {
                let d = w.common_denominator();
                u64::try_from(&d).map_err(|_| Error::NotDenominatorN { n: 0, detail: "denominator too large".into() })?
            }
        };
        DenominatorNWeight::from_weight(w, n)
    }
}

pub fn parse_weight(s: &str) -> Result<Weight> {
    from_str::<WeightJson>(s)?.to_weight()
}

pub fn parse_markov(s: &str) -> Result<MarkovMeasure> {
    Ok(MarkovMeasure::new(parse_weight(s)?))
}

pub fn weight_to_json(w: &Weight) -> Result<String> {
    Ok(to_string_pretty(&WeightJson::from_weight(w, None, false)?))
}

pub fn denominator_n_to_json(w: &DenominatorNWeight) -> Result<String> {
    Ok(to_string_pretty(&WeightJson::from_weight(w.weight(), Some(w.n()), false)?))
}

impl HomJson {
    pub fn from_hom(h: &Homomorphism) -> Self {
        HomJson { n: h.n(), perms: h.perms().iter().map(|p| p.iter().map(|v| v + 1).collect()).collect() }
    }

    pub fn to_hom(&self) -> Result<Homomorphism> {
        let perms = self
            .perms
            .iter()
            .map(|p| {
                if p.len() != self.n {
                    return Err(Error::ShapeMismatch(format!("permutation length {} differs from n = {}", p.len(), self.n)));
                }
                p.iter()
                    .map(|&v| v.checked_sub(1).ok_or_else(|| Error::ShapeMismatch("images are 1-based".into())))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        Homomorphism::new(perms)
    }
}

impl LabelingJson {
    pub fn from_labeling(x: &Labeling) -> Self {
        LabelingJson { alphabet: None, symbols: x.symbols.iter().map(|&s| x.alphabet.name(s)).collect() }
    }

    /// Resolves names against `alphabet` (or the embedded alphabet when given).
    pub fn to_labeling(&self, alphabet: Option<&Alphabet>) -> Result<Labeling> {
        let alph = match (&self.alphabet, alphabet) {
            (Some(names), _) => Alphabet::from_names(names.clone())?,
            (None, Some(a)) => a.clone(),
            (None, None) => return Err(Error::ShapeMismatch("labeling needs an alphabet".into())),
        };
        let symbols = self
            .symbols
            .iter()
            .map(|s| alph.index_of(s).ok_or_else(|| Error::ShapeMismatch(format!("unknown symbol {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Labeling::new(alph, symbols)
    }
}

impl SbmSpecJson {
    pub fn to_spec(&self) -> Result<SbmSpec> {
        let alph = Alphabet::from_names(self.alphabet.clone())?;
        let y = LabelingJson { alphabet: None, symbols: self.y.clone() }.to_labeling(Some(&alph))?;
        let reference = self.reference.as_ref().map(|h| h.to_hom()).transpose()?;
        if let Some(h) = &reference {
            if h.rank() != self.rank {
                return Err(Error::ShapeMismatch("reference rank differs from spec rank".into()));
            }
        }
        match (&self.target, reference) {
            (Some(t), reference) => {
                let tw = t.to_weight()?;
                let ball = Alphabet::ball(alph, self.rank, self.k)?;
                let tw = tw.relabel(ball)?;
                let target = DenominatorNWeight::from_weight(tw, y.n() as u64)?;
                SbmSpec::new(y, self.k, target, reference)
            }
            (None, Some(h)) => SbmSpec::from_reference(h, y, self.k),
            (None, None) => Err(Error::ShapeMismatch("spec needs a target or a reference".into())),
        }
    }
}
