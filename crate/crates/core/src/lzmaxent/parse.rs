use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::symbols::SymbolSequence;
use crate::{Error, Result};

/// Dictionary of phrases as a trie; node 0 is the empty phrase.
#[derive(Default)]
struct Trie {
    edges: HashMap<(usize, usize), usize>,
    nodes: usize,
}

impl Trie {
    fn new() -> Self {
        Self {
            edges: HashMap::new(),
            nodes: 1,
        }
    }

    fn child(&self, node: usize, sym: usize) -> Option<usize> {
        self.edges.get(&(node, sym)).copied()
    }

    fn insert(&mut self, node: usize, sym: usize) -> usize {
        *self.edges.entry((node, sym)).or_insert_with(|| {
            self.nodes += 1;
            self.nodes - 1
        })
    }
}

/// Incremental parse of `symbols` into `(start, len)` phrases. The last
/// phrase may repeat an earlier one when the input ends mid-phrase.
fn incremental(symbols: impl ExactSizeIterator<Item = usize>) -> (Vec<(usize, usize)>, bool) {
    let mut trie = Trie::new();
    let mut phrases = Vec::new();
    let mut node = 0;
    let mut start = 0;
    let n = symbols.len();
    for (i, s) in symbols.enumerate() {
        match trie.child(node, s) {
            Some(next) => node = next,
            None => {
                trie.insert(node, s);
                phrases.push((start, i + 1 - start));
                start = i + 1;
                node = 0;
            }
        }
    }
    let incomplete = start < n;
    if incomplete {
        phrases.push((start, n - start));
    }
    (phrases, incomplete)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lz78Parse {
    pub phrases: Vec<Vec<usize>>,
    /// True when the last phrase is a repeat left over at the end of input.
    pub last_incomplete: bool,
}

impl Lz78Parse {
    pub fn count(&self) -> usize {
        self.phrases.len()
    }
}

/// LZ78 incremental parsing: each phrase is the shortest prefix of the rest
/// of the input not already in the dictionary. A trailing incomplete phrase
/// is counted.
pub fn lz78_parse(seq: &SymbolSequence) -> Result<Lz78Parse> {
    if seq.is_empty() {
        return Err(Error::EmptyInput("sequence to parse".into()));
    }
    let s = seq.symbols();
    let (ph, last_incomplete) = incremental(s.iter().copied());
    Ok(Lz78Parse {
        phrases: ph.into_iter().map(|(a, l)| s[a..a + l].to_vec()).collect(),
        last_incomplete,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointPhrase {
    pub start: usize,
    pub u: Vec<usize>,
    pub w: Vec<usize>,
    /// Index into [`JointParse::w_phrases`].
    pub w_index: usize,
}

/// Incremental parse of the pair sequence `((u_i, w_i))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointParse {
    pub len: usize,
    pub phrases: Vec<JointPhrase>,
    /// Distinct `w`-parts in order of first appearance.
    pub w_phrases: Vec<Vec<usize>>,
    /// `c_j`: number of distinct `u`-parts paired with `w_phrases[j]`.
    pub counts: Vec<usize>,
    /// Number of phrases (including a trailing repeat) per `w`-part.
    pub phrase_counts: Vec<usize>,
    pub last_incomplete: bool,
}

impl JointParse {
    pub fn total(&self) -> usize {
        self.phrases.len()
    }

    /// `c(w)`, the number of distinct `w`-parts.
    pub fn distinct_w(&self) -> usize {
        self.w_phrases.len()
    }

    /// `(1/n) Σ_j c_j log₂ c_j`.
    pub fn complexity(&self) -> f64 {
        self.counts
            .iter()
            .map(|&c| c as f64 * (c as f64).log2())
            .sum::<f64>()
            / self.len as f64
    }

    /// `(1/n) Σ_j (c_j + q²) log₂(c_j / 4q²)`.
    pub fn corrected_complexity(&self, q: f64) -> f64 {
        let q2 = q * q;
        self.counts
            .iter()
            .map(|&c| (c as f64 + q2) * (c as f64 / (4.0 * q2)).log2())
            .sum::<f64>()
            / self.len as f64
    }
}

pub fn joint_parse(u: &SymbolSequence, w: &SymbolSequence) -> Result<JointParse> {
    if u.len() != w.len() {
        return Err(Error::LengthMismatch {
            what: "u and w",
            left: u.len(),
            right: w.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput("sequences to parse".into()));
    }
    let nw = w.alphabet_size();
    let (us, ws) = (u.symbols(), w.symbols());
    let (ph, last_incomplete) = incremental((0..us.len()).map(|i| us[i] * nw + ws[i]));
    let mut w_trie = Trie::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut w_phrases = Vec::new();
    let mut counts = Vec::new();
    let mut phrase_counts = Vec::new();
    let last = ph.len() - 1;
    let phrases = ph
        .into_iter()
        .enumerate()
        .map(|(i, (a, l))| {
            let wpart = ws[a..a + l].to_vec();
            let node = wpart.iter().fold(0, |node, &s| w_trie.insert(node, s));
            let j = *index.entry(node).or_insert_with(|| {
                w_phrases.push(wpart.clone());
                counts.push(0);
                phrase_counts.push(0);
                w_phrases.len() - 1
            });
            phrase_counts[j] += 1;
            // a trailing incomplete phrase repeats an earlier pair phrase
            if !(last_incomplete && i == last) {
                counts[j] += 1;
            }
            JointPhrase {
                start: a,
                u: us[a..a + l].to_vec(),
                w: wpart,
                w_index: j,
            }
        })
        .collect();
    Ok(JointParse {
        len: us.len(),
        phrases,
        w_phrases,
        counts,
        phrase_counts,
        last_incomplete,
    })
}

/// Conditional LZ complexity `(1/n) Σ_j c_j(u|w) log₂ c_j(u|w)` in bits per
/// symbol.
pub fn conditional_lz_complexity(u: &SymbolSequence, w: &SymbolSequence) -> Result<f64> {
    Ok(joint_parse(u, w)?.complexity())
}

/// The `q`-corrected variant `(1/n) Σ_j (c_j + q²) log₂(c_j / 4q²)`.
pub fn conditional_lz_complexity_corrected(u: &SymbolSequence, w: &SymbolSequence, q: f64) -> Result<f64> {
    if !(q > 0.0) || q.is_infinite() {
        return Err(Error::param("q must be positive and finite"));
    }
    Ok(joint_parse(u, w)?.corrected_complexity(q))
}
