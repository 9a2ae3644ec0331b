//! Noun/verb pair counts with interned vocabularies.
//!
//! A [`PairCorpus`] stores joint counts `c(n, v)` twice, row-major (per noun)
//! and column-major (per verb), both sorted by id. Marginals are kept
//! alongside and are rebuilt whenever a new corpus is derived.

mod snapshot;
mod split;

pub use snapshot::{CorpusSnapshot, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};
pub use split::{make_folds, split_unseen_test, SplitOutcome, SplitSpec};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid snapshot: {0}")]
    Snapshot(String),
}

/// Dense id of a word in `V1` (head nouns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NounId(pub u32);

/// Dense id of a word in `V2` (verbs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerbId(pub u32);

impl NounId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VerbId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NounId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for VerbId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// One occurrence (or type) of a noun/verb pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub noun: NounId,
    pub verb: VerbId,
}

impl Pair {
    pub fn new(noun: NounId, verb: VerbId) -> Self {
        Pair { noun, verb }
    }
}

/// Append-only string interner. Ids are assigned in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for w in words {
            let w = w.into();
            if vocab.get(&w).is_some() {
                return Err(CorpusError::Snapshot(format!("duplicate word {w:?}")));
            }
            vocab.intern(&w);
        }
        Ok(vocab)
    }

    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = u32::try_from(self.words.len()).expect("vocabulary exceeds u32 ids");
        self.words.push(word.to_owned());
        self.index.insert(word.to_owned(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Sparse joint counts over `V1 x V2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCorpus {
    nouns: Vocabulary,
    verbs: Vocabulary,
    rows: Vec<Vec<(VerbId, u64)>>,
    cols: Vec<Vec<(NounId, u64)>>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    total: u64,
}

impl PairCorpus {
    pub fn empty() -> Self {
        Self::from_counts(Vocabulary::new(), Vocabulary::new(), std::iter::empty())
    }

    /// Builds a corpus from `(pair, count)` entries. Repeated pairs add up and
    /// zero counts are dropped. Panics if an id is outside its vocabulary.
    pub fn from_counts<I>(nouns: Vocabulary, verbs: Vocabulary, counts: I) -> Self
    where
        I: IntoIterator<Item = (Pair, u64)>,
    {
        let mut acc: BTreeMap<Pair, u64> = BTreeMap::new();
        for (pair, c) in counts {
            assert!(pair.noun.index() < nouns.len(), "noun id out of range");
            assert!(pair.verb.index() < verbs.len(), "verb id out of range");
            if c > 0 {
                *acc.entry(pair).or_insert(0) += c;
            }
        }
        let mut rows = vec![Vec::new(); nouns.len()];
        let mut cols = vec![Vec::new(); verbs.len()];
        let mut row_totals = vec![0u64; nouns.len()];
        let mut col_totals = vec![0u64; verbs.len()];
        let mut total = 0u64;
        // BTreeMap order is (noun, verb), so both lists come out sorted.
        for (pair, c) in acc {
            rows[pair.noun.index()].push((pair.verb, c));
            cols[pair.verb.index()].push((pair.noun, c));
            row_totals[pair.noun.index()] += c;
            col_totals[pair.verb.index()] += c;
            total += c;
        }
        PairCorpus {
            nouns,
            verbs,
            rows,
            cols,
            row_totals,
            col_totals,
            total,
        }
    }

    pub fn nouns(&self) -> &Vocabulary {
        &self.nouns
    }

    pub fn verbs(&self) -> &Vocabulary {
        &self.verbs
    }

    pub fn noun_id(&self, word: &str) -> Option<NounId> {
        self.nouns.get(word).map(NounId)
    }

    pub fn verb_id(&self, word: &str) -> Option<VerbId> {
        self.verbs.get(word).map(VerbId)
    }

    pub fn noun_ids(&self) -> impl Iterator<Item = NounId> + '_ {
        (0..self.nouns.len() as u32).map(NounId)
    }

    pub fn verb_ids(&self) -> impl Iterator<Item = VerbId> + '_ {
        (0..self.verbs.len() as u32).map(VerbId)
    }

    pub fn has_noun(&self, n: NounId) -> bool {
        n.index() < self.nouns.len()
    }

    pub fn has_verb(&self, v: VerbId) -> bool {
        v.index() < self.verbs.len()
    }

    /// `c(n, v)`; zero for unseen or out-of-range pairs.
    pub fn count(&self, n: NounId, v: VerbId) -> u64 {
        self.rows
            .get(n.index())
            .and_then(|row| row.binary_search_by_key(&v, |&(id, _)| id).ok().map(|i| row[i].1))
            .unwrap_or(0)
    }

    pub fn is_seen(&self, n: NounId, v: VerbId) -> bool {
        self.count(n, v) > 0
    }

    /// Nonzero entries of a noun's row, sorted by verb id.
    pub fn row(&self, n: NounId) -> &[(VerbId, u64)] {
        self.rows.get(n.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Nonzero entries of a verb's column, sorted by noun id.
    pub fn column(&self, v: VerbId) -> &[(NounId, u64)] {
        self.cols.get(v.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `c(n)`.
    pub fn noun_total(&self, n: NounId) -> u64 {
        self.row_totals.get(n.index()).copied().unwrap_or(0)
    }

    /// `c(v)`.
    pub fn verb_total(&self, v: VerbId) -> u64 {
        self.col_totals.get(v.index()).copied().unwrap_or(0)
    }

    pub fn noun_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn verb_totals(&self) -> &[u64] {
        &self.col_totals
    }

    /// `N`, the number of pair tokens.
    pub fn total_pairs(&self) -> u64 {
        self.total
    }

    /// Number of distinct pair types.
    pub fn type_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// All `(pair, count)` entries in (noun, verb) order.
    pub fn entries(&self) -> impl Iterator<Item = (Pair, u64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().map(move |&(v, c)| (Pair::new(NounId(n as u32), v), c)))
    }

    /// Pair types seen exactly once (equal to the number of singleton tokens).
    pub fn singleton_count(&self) -> u64 {
        self.entries().filter(|&(_, c)| c == 1).count() as u64
    }

    /// Count-of-counts `n_r`: how many pair types occur exactly `r` times.
    pub fn count_of_counts(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for (_, c) in self.entries() {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }

    /// Removes every pair type with count one. Vocabularies, and so ids, are
    /// kept even where a row or column becomes empty.
    pub fn strip_singletons(&self) -> PairCorpus {
        PairCorpus::from_counts(
            self.nouns.clone(),
            self.verbs.clone(),
            self.entries().filter(|&(_, c)| c > 1),
        )
    }

    /// A corpus over the same vocabularies with different counts.
    pub fn with_counts<I>(&self, counts: I) -> PairCorpus
    where
        I: IntoIterator<Item = (Pair, u64)>,
    {
        PairCorpus::from_counts(self.nouns.clone(), self.verbs.clone(), counts)
    }

    pub fn noun_word(&self, n: NounId) -> &str {
        self.nouns.word(n.0).unwrap_or("<unknown>")
    }

    pub fn verb_word(&self, v: VerbId) -> &str {
        self.verbs.word(v.0).unwrap_or("<unknown>")
    }

    /// Checks marginal consistency. Used by tests and snapshot loading.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut total = 0u64;
        for (n, row) in self.rows.iter().enumerate() {
            let s: u64 = row.iter().map(|&(_, c)| c).sum();
            if s != self.row_totals[n] {
                return Err(format!("row total mismatch for noun {n}"));
            }
            if row.iter().any(|&(_, c)| c == 0) {
                return Err(format!("stored zero in row {n}"));
            }
            if row.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(format!("row {n} not strictly sorted"));
            }
            total += s;
        }
        for (v, col) in self.cols.iter().enumerate() {
            let s: u64 = col.iter().map(|&(_, c)| c).sum();
            if s != self.col_totals[v] {
                return Err(format!("column total mismatch for verb {v}"));
            }
        }
        if total != self.total || self.col_totals.iter().sum::<u64>() != self.total {
            return Err("grand total mismatch".into());
        }
        Ok(())
    }
}

/// Reads `noun<TAB>verb[<TAB>count]` lines. Blank lines are skipped; a
/// missing count means one occurrence.
pub fn parse_pairs<R: BufRead>(reader: R) -> Result<PairCorpus, CorpusError> {
    let mut nouns = Vocabulary::new();
    let mut verbs = Vocabulary::new();
    let mut counts: Vec<(Pair, u64)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse_err = |message: String| CorpusError::Parse { line: lineno, message };
        let count = match fields.len() {
            2 => 1,
            3 => {
                let c: u64 = fields[2]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(format!("count {:?} is not an integer", fields[2])))?;
                if c == 0 {
                    return Err(parse_err("count must be positive".into()));
                }
                c
            }
            k => return Err(parse_err(format!("expected 2 or 3 tab-separated fields, found {k}"))),
        };
        let (noun, verb) = (fields[0].trim(), fields[1].trim());
        if noun.is_empty() || verb.is_empty() {
            return Err(parse_err("empty word field".into()));
        }
        let n = NounId(nouns.intern(noun));
        let v = VerbId(verbs.intern(verb));
        counts.push((Pair::new(n, v), count));
    }
    Ok(PairCorpus::from_counts(nouns, verbs, counts))
}
