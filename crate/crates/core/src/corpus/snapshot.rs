//! Versioned JSON snapshot of a corpus. Vocabulary order and zero-count
//! entries survive the round trip, so ids are preserved exactly.

use serde::{Deserialize, Serialize};

use super::{CorpusError, NounId, Pair, PairCorpus, VerbId, Vocabulary};

pub const SNAPSHOT_FORMAT: &str = "simsmooth-corpus";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSnapshot {
    pub format: String,
    pub version: u32,
    pub nouns: Vec<String>,
    pub verbs: Vec<String>,
    /// `(noun id, verb id, count)` in (noun, verb) order.
    pub pairs: Vec<(u32, u32, u64)>,
}

impl CorpusSnapshot {
    pub fn from_corpus(corpus: &PairCorpus) -> Self {
        CorpusSnapshot {
            format: SNAPSHOT_FORMAT.to_owned(),
            version: SNAPSHOT_VERSION,
            nouns: corpus.nouns().words().to_vec(),
            verbs: corpus.verbs().words().to_vec(),
            pairs: corpus.entries().map(|(p, c)| (p.noun.0, p.verb.0, c)).collect(),
        }
    }

    pub fn into_corpus(self) -> Result<PairCorpus, CorpusError> {
        if self.format != SNAPSHOT_FORMAT {
            return Err(CorpusError::Snapshot(format!("unknown format {:?}", self.format)));
        }
        if self.version != SNAPSHOT_VERSION {
            return Err(CorpusError::Snapshot(format!("unsupported version {}", self.version)));
        }
        let nouns = Vocabulary::from_words(self.nouns)?;
        let verbs = Vocabulary::from_words(self.verbs)?;
        for &(n, v, c) in &self.pairs {
            if n as usize >= nouns.len() || v as usize >= verbs.len() || c == 0 {
                return Err(CorpusError::Snapshot(format!("bad entry ({n}, {v}, {c})")));
            }
        }
        let entries = self
            .pairs
            .into_iter()
            .map(|(n, v, c)| (Pair::new(NounId(n), VerbId(v)), c));
        Ok(PairCorpus::from_counts(nouns, verbs, entries))
    }
}

impl PairCorpus {
    pub fn to_snapshot_json(&self) -> String {
        serde_json::to_string(&CorpusSnapshot::from_corpus(self)).expect("snapshot serializes")
    }

    pub fn from_snapshot_json(text: &str) -> Result<PairCorpus, CorpusError> {
        let snap: CorpusSnapshot = serde_json::from_str(text).map_err(|e| CorpusError::Snapshot(e.to_string()))?;
        snap.into_corpus()
    }
}
