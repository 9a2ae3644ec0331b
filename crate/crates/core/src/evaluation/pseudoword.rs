use serde::Serialize;

use super::EvalError;
use crate::corpus::VerbId;

/// Verbs paired into two-way ambiguous pseudo-words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PseudoWordMap {
    pairs: Vec<(VerbId, VerbId)>,
    #[serde(skip)]
    partner: Vec<Option<VerbId>>,
    /// Odd verb out when the covered count is odd.
    dropped: Option<VerbId>,
}

impl PseudoWordMap {
    pub fn pairs(&self) -> &[(VerbId, VerbId)] {
        &self.pairs
    }

    pub fn partner(&self, v: VerbId) -> Option<VerbId> {
        self.partner.get(v.index()).copied().flatten()
    }

    pub fn dropped(&self) -> Option<VerbId> {
        self.dropped
    }

    pub fn is_covered(&self, v: VerbId) -> bool {
        self.partner(v).is_some()
    }
}

/// Sorts verbs with nonzero frequency by descending frequency (ties by id)
/// and pairs neighbors in that order: 1st with 2nd, 3rd with 4th, ...
pub fn build_pseudowords(verb_frequencies: &[u64]) -> Result<PseudoWordMap, EvalError> {
    let mut ranked: Vec<VerbId> = (0..verb_frequencies.len() as u32)
        .map(VerbId)
        .filter(|v| verb_frequencies[v.index()] > 0)
        .collect();
    if ranked.len() < 2 {
        return Err(EvalError::Config(format!(
            "need at least two verbs with training counts for pseudo-words, found {}",
            ranked.len()
        )));
    }
    ranked.sort_by(|a, b| {
        verb_frequencies[b.index()]
            .cmp(&verb_frequencies[a.index()])
            .then(a.cmp(b))
    });
    let mut partner = vec![None; verb_frequencies.len()];
    let mut pairs = Vec::with_capacity(ranked.len() / 2);
    for chunk in ranked.chunks_exact(2) {
        let (a, b) = (chunk[0], chunk[1]);
        partner[a.index()] = Some(b);
        partner[b.index()] = Some(a);
        pairs.push((a, b));
    }
    let dropped = (ranked.len() % 2 == 1).then(|| *ranked.last().expect("non-empty"));
    Ok(PseudoWordMap {
        pairs,
        partner,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_frequency_pairs() {
        // va, vb, vc, vd with 100, 98, 50, 49 (given out of order)
        let m = build_pseudowords(&[50, 100, 49, 98]).unwrap();
        assert_eq!(m.pairs(), &[(VerbId(1), VerbId(3)), (VerbId(0), VerbId(2))]);
        assert_eq!(m.dropped(), None);
    }

    #[test]
    fn odd_count_drops_last() {
        let m = build_pseudowords(&[5, 4, 3, 2, 1]).unwrap();
        assert_eq!(m.pairs().len(), 2);
        assert_eq!(m.dropped(), Some(VerbId(4)));
        assert!(!m.is_covered(VerbId(4)));
    }

    #[test]
    fn involution_without_fixed_points() {
        let freqs: Vec<u64> = (0..11).map(|i| (i * 7 % 5) as u64).collect();
        let m = build_pseudowords(&freqs).unwrap();
        for v in (0..11).map(VerbId) {
            if let Some(p) = m.partner(v) {
                assert_ne!(p, v);
                assert_eq!(m.partner(p), Some(v));
            }
        }
        // zero-frequency verbs are not covered
        assert!(!m.is_covered(VerbId(0)));
    }

    #[test]
    fn ties_by_id() {
        let m = build_pseudowords(&[3, 3, 3, 3]).unwrap();
        assert_eq!(m.pairs(), &[(VerbId(0), VerbId(1)), (VerbId(2), VerbId(3))]);
    }

    #[test]
    fn too_few_verbs() {
        assert!(build_pseudowords(&[4, 0]).is_err());
    }
}
