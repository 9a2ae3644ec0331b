use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_row, check_verb, BaseModel, ModelError};
use crate::corpus::{NounId, PairCorpus, VerbId};
use crate::scalar::Real;

pub const DEFAULT_GT_CUTOFF: u64 = 5;

/// Raw Good-Turing adjusted count `r* = (r + 1) n_{r+1} / n_r`.
pub fn good_turing_count<T: Real>(r: u64, count_of_counts: &BTreeMap<u64, u64>) -> Option<T> {
    let n_r = *count_of_counts.get(&r)?;
    let n_next = count_of_counts.get(&(r + 1)).copied().unwrap_or(0);
    if n_r == 0 {
        return None;
    }
    Some(T::from_count((r + 1) * n_next) / T::from_count(n_r))
}

/// Least-squares line through `(ln r, ln Z_r)`, where
/// `Z_r = n_r / ((t - q) / 2)` spreads each `n_r` over the gap between the
/// neighbouring observed counts `q < r < t`. Only decreasing fits with slope
/// below -1 give sensible adjusted counts.
fn log_linear_fit(cc: &BTreeMap<u64, u64>) -> Option<(f64, f64)> {
    let rs: Vec<(u64, u64)> = cc.iter().filter(|(_, &n)| n > 0).map(|(&r, &n)| (r, n)).collect();
    if rs.len() < 2 {
        return None;
    }
    let points: Vec<(f64, f64)> = rs
        .iter()
        .enumerate()
        .map(|(j, &(r, n))| {
            let q = if j == 0 { 0.0 } else { rs[j - 1].0 as f64 };
            let r = r as f64;
            let t = rs.get(j + 1).map_or(2.0 * r - q, |next| next.0 as f64);
            (r.ln(), (n as f64 / (0.5 * (t - q))).ln())
        })
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let b = sxy / sxx;
    (b < -1.0).then_some((my - b * mx, b))
}

/// Katz discount ratios `d_r` for `1 <= r <= cutoff`; counts above the
/// cutoff are left alone (`d_r = 1`).
///
/// `d_r = (r*/r - mu) / (1 - mu)` with `mu = (k + 1) n_{k+1} / n_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountTable<T> {
    requested_cutoff: u64,
    cutoff: u64,
    ratios: Vec<T>,
    count_of_counts: BTreeMap<u64, u64>,
    smoothed: bool,
    warnings: Vec<String>,
}

impl<T: Real> DiscountTable<T> {
    /// Picks the largest cutoff `k <= requested` for which every `n_r`,
    /// `1 <= r <= k + 1`, is nonzero and every ratio lies in `(0, 1]`.
    /// A cutoff of one always gives `d_1 = 0`, so in practice `k >= 2`.
    ///
    /// Small corpora often have bumpy `n_r` that admit no cutoff at all. The
    /// counts of counts are then replaced by a log-linear fit (averaging
    /// over gaps between observed `r` first) and the search is repeated.
    pub fn from_count_of_counts(count_of_counts: &BTreeMap<u64, u64>, requested: u64) -> Result<Self, ModelError> {
        let raw = |r: u64| T::from_count(count_of_counts.get(&r).copied().unwrap_or(0));
        let mut warnings = Vec::new();
        let mut found = Self::search(raw, requested).map(|hit| (hit, false));
        if found.is_none() {
            if let Some((a, b)) = log_linear_fit(count_of_counts) {
                let fitted = |r: u64| T::lit((a + b * (r as f64).ln()).exp());
                found = Self::search(fitted, requested).map(|hit| (hit, true));
            }
        }
        let Some(((cutoff, ratios), smoothed)) = found else {
            return Err(ModelError::NoDiscountCutoff { requested });
        };
        if smoothed {
            warnings.push("raw counts of counts admit no cutoff; using a log-linear fit".to_string());
        }
        if cutoff < requested {
            warnings.push(format!("Good-Turing cutoff lowered from {requested} to {cutoff}"));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(DiscountTable {
            requested_cutoff: requested,
            cutoff,
            ratios,
            count_of_counts: count_of_counts.clone(),
            smoothed,
            warnings,
        })
    }

    fn search(n: impl Fn(u64) -> T, requested: u64) -> Option<(u64, Vec<T>)> {
        (1..=requested)
            .rev()
            .find_map(|k| Self::ratios_for(&n, k).map(|r| (k, r)))
    }

    fn ratios_for(n: &impl Fn(u64) -> T, k: u64) -> Option<Vec<T>> {
        if (1..=k + 1).any(|r| !(n(r) > T::zero())) {
            return None;
        }
        let mu = T::from_count(k + 1) * n(k + 1) / n(1);
        if mu >= T::one() {
            return None;
        }
        let mut ratios = Vec::with_capacity(k as usize);
        for r in 1..=k {
            let r_star = T::from_count(r + 1) * n(r + 1) / n(r);
            let d = (r_star / T::from_count(r) - mu) / (T::one() - mu);
            if !(d > T::zero() && d <= T::one()) {
                return None;
            }
            ratios.push(d);
        }
        // a table that discounts nothing reserves no mass anywhere
        ratios.iter().any(|&d| d < T::one()).then_some(ratios)
    }

    /// Smallest ratio in the table, applied to rows that would otherwise
    /// reserve nothing.
    pub fn fallback_ratio(&self) -> T {
        self.ratios.iter().copied().fold(T::one(), T::min)
    }

    /// Whether the ratios come from fitted rather than raw counts of counts.
    pub fn is_smoothed(&self) -> bool {
        self.smoothed
    }

    pub fn requested_cutoff(&self) -> u64 {
        self.requested_cutoff
    }

    /// Effective cutoff after any lowering.
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// `d_r`; one above the cutoff.
    pub fn ratio(&self, r: u64) -> T {
        if r >= 1 && r <= self.cutoff {
            self.ratios[(r - 1) as usize]
        } else {
            T::one()
        }
    }

    pub fn count_of_counts(&self) -> &BTreeMap<u64, u64> {
        &self.count_of_counts
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// How a row's seen mass was discounted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    /// Counts up to the cutoff use `d_r`, larger counts are untouched.
    Standard,
    /// No count in the row is discounted by its own ratio (all exceed the
    /// cutoff or hit a ratio of one) while unseen verbs remain; all counts
    /// take the table's smallest ratio so unseen pairs keep mass.
    DiscountAll,
    /// The row already covers every verb with nonzero unigram probability, so
    /// there is nothing to redistribute to and the row stays at MLE.
    Undiscounted,
}

#[derive(Debug, Clone)]
struct RowState<T> {
    mode: RowMode,
    leftover: T,
    alpha: T,
    /// `sum over unseen v of c(v)`, exact.
    unseen_verb_mass: u64,
}

/// Katz back-off with unigram redistribution:
/// seen pairs get `P_d(v|n) = d_r r / c(n)`, unseen pairs `alpha(n) P(v)`.
#[derive(Debug, Clone)]
pub struct KatzModel<T> {
    corpus: Arc<PairCorpus>,
    table: DiscountTable<T>,
    rows: Vec<Option<RowState<T>>>,
}

impl<T: Real> KatzModel<T> {
    /// Builds the discount table from the corpus' own count-of-counts.
    pub fn build(corpus: Arc<PairCorpus>, gt_cutoff: u64) -> Result<Self, ModelError> {
        let table = DiscountTable::from_count_of_counts(&corpus.count_of_counts(), gt_cutoff)?;
        Ok(Self::with_discounts(corpus, table))
    }

    /// Applies an existing discount table, e.g. one estimated before singleton
    /// removal, to this corpus.
    pub fn with_discounts(corpus: Arc<PairCorpus>, table: DiscountTable<T>) -> Self {
        let total = corpus.total_pairs();
        let rows = corpus
            .noun_ids()
            .map(|n| {
                let cn = corpus.noun_total(n);
                if cn == 0 {
                    return None;
                }
                let row = corpus.row(n);
                let seen_verb_mass: u64 = row.iter().map(|&(v, _)| corpus.verb_total(v)).sum();
                let unseen_verb_mass = total - seen_verb_mass;
                let mode = if unseen_verb_mass == 0 {
                    RowMode::Undiscounted
                } else if row.iter().all(|&(_, r)| table.ratio(r) == T::one()) {
                    RowMode::DiscountAll
                } else {
                    RowMode::Standard
                };
                let cn_t = T::from_count(cn);
                let seen: T = row
                    .iter()
                    .map(|&(_, r)| Self::discounted(&table, mode, r))
                    .fold(T::zero(), |acc, x| acc + x)
                    / cn_t;
                let (leftover, alpha) = if mode == RowMode::Undiscounted {
                    (T::zero(), T::zero())
                } else {
                    let leftover = T::one() - seen;
                    let unseen_p = T::from_count(unseen_verb_mass) / T::from_count(total);
                    (leftover, leftover / unseen_p)
                };
                Some(RowState {
                    mode,
                    leftover,
                    alpha,
                    unseen_verb_mass,
                })
            })
            .collect();
        KatzModel { corpus, table, rows }
    }

    fn discounted(table: &DiscountTable<T>, mode: RowMode, r: u64) -> T {
        let d = match mode {
            RowMode::Standard => table.ratio(r),
            RowMode::DiscountAll => table.fallback_ratio(),
            RowMode::Undiscounted => T::one(),
        };
        d * T::from_count(r)
    }

    fn state(&self, n: NounId) -> Result<&RowState<T>, ModelError> {
        check_row(&self.corpus, n)?;
        Ok(self.rows[n.index()].as_ref().expect("defined row has state"))
    }

    pub fn shared_corpus(&self) -> &Arc<PairCorpus> {
        &self.corpus
    }

    pub fn discounts(&self) -> &DiscountTable<T> {
        &self.table
    }

    /// Normalizer `alpha(n)` for unigram redistribution.
    pub fn alpha(&self, n: NounId) -> Result<T, ModelError> {
        Ok(self.state(n)?.alpha)
    }

    /// Mass `1 - sum_seen P_d(v|n)` reserved for unseen verbs.
    pub fn leftover(&self, n: NounId) -> Result<T, ModelError> {
        Ok(self.state(n)?.leftover)
    }

    pub fn row_mode(&self, n: NounId) -> Result<RowMode, ModelError> {
        Ok(self.state(n)?.mode)
    }

    /// `sum of P(v)` over verbs unseen with `n`, computed from exact counts.
    pub fn unseen_unigram_mass(&self, n: NounId) -> Result<T, ModelError> {
        let s = self.state(n)?;
        Ok(T::from_count(s.unseen_verb_mass) / T::from_count(self.corpus.total_pairs()))
    }

    /// `P_d(v | n)` for a seen pair, `None` if unseen.
    pub fn discounted_prob(&self, n: NounId, v: VerbId) -> Result<Option<T>, ModelError> {
        let s = self.state(n)?;
        check_verb(&self.corpus, v)?;
        let r = self.corpus.count(n, v);
        if r == 0 {
            return Ok(None);
        }
        let cn = T::from_count(self.corpus.noun_total(n));
        Ok(Some(Self::discounted(&self.table, s.mode, r) / cn))
    }

    /// Rows that are defined (nonzero noun count), with their leftover mass.
    pub fn leftovers(&self) -> impl Iterator<Item = (NounId, T)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (NounId(i as u32), s.leftover)))
    }
}

impl<T: Real> BaseModel<T> for KatzModel<T> {
    fn corpus(&self) -> &PairCorpus {
        &self.corpus
    }

    fn prob(&self, n: NounId, v: VerbId) -> Result<T, ModelError> {
        match self.discounted_prob(n, v)? {
            Some(p) => Ok(p),
            None => Ok(self.state(n)?.alpha * self.verb_unigram(v)?),
        }
    }

    fn row(&self, n: NounId) -> Result<Vec<(VerbId, T)>, ModelError> {
        self.state(n)?;
        let mut out = Vec::new();
        for v in self.corpus.verb_ids() {
            let p = self.prob(n, v)?;
            if p > T::zero() {
                out.push((v, p));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Pair, Vocabulary};

    /// Corpus with a healthy count-of-counts profile: row `i` has counts
    /// following `pattern` shifted across verbs.
    fn toy() -> PairCorpus {
        let nouns = Vocabulary::from_words((0..6).map(|i| format!("n{i}"))).unwrap();
        let verbs = Vocabulary::from_words((0..12).map(|i| format!("v{i}"))).unwrap();
        let pattern = [1u64, 1, 1, 1, 2, 2, 3, 1, 4, 7];
        let mut entries = Vec::new();
        for n in 0..6u32 {
            for (j, &c) in pattern.iter().enumerate() {
                let v = (n as usize + j * 5) % 12;
                entries.push((Pair::new(NounId(n), VerbId(v as u32)), c));
            }
        }
        PairCorpus::from_counts(nouns, verbs, entries)
    }

    #[test]
    fn good_turing_hand_value() {
        let cc: BTreeMap<u64, u64> = [(1, 3), (2, 1)].into_iter().collect();
        let r: f64 = good_turing_count(1, &cc).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rows_normalize() {
        let c = Arc::new(toy());
        let m = KatzModel::<f64>::build(c.clone(), 5).unwrap();
        for n in c.noun_ids() {
            let s: f64 = c.verb_ids().map(|v| m.prob(n, v).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-8, "row {n} sums to {s}");
        }
    }

    #[test]
    fn unseen_same_frequency_equal_prob() {
        let c = Arc::new(toy());
        let m = KatzModel::<f64>::build(c.clone(), 5).unwrap();
        let n = NounId(0);
        let unseen: Vec<VerbId> = c.verb_ids().filter(|&v| !c.is_seen(n, v)).collect();
        for &a in &unseen {
            for &b in &unseen {
                if c.verb_total(a) == c.verb_total(b) {
                    assert_eq!(m.prob(n, a).unwrap(), m.prob(n, b).unwrap());
                }
            }
            assert_eq!(m.prob(n, a).unwrap(), m.alpha(n).unwrap() * m.verb_unigram(a).unwrap());
        }
    }

    #[test]
    fn cutoff_lowers_when_counts_of_counts_missing() {
        // n_4 = 0, so cutoffs 3..5 are impossible; 2 works.
        let cc: BTreeMap<u64, u64> = [(1, 10), (2, 4), (3, 2), (5, 1)].into_iter().collect();
        let t = DiscountTable::<f64>::from_count_of_counts(&cc, 5).unwrap();
        assert_eq!(t.cutoff(), 2);
        assert!((t.ratio(1) - 0.5).abs() < 1e-12);
        assert!((t.ratio(2) - 0.375).abs() < 1e-12);
        assert_eq!(t.ratio(3), 1.0);
        assert_eq!(t.warnings().len(), 1);
        let none: BTreeMap<u64, u64> = [(2, 4)].into_iter().collect();
        assert_eq!(
            DiscountTable::<f64>::from_count_of_counts(&none, 5),
            Err(ModelError::NoDiscountCutoff { requested: 5 })
        );
    }

    #[test]
    fn bumpy_counts_fall_back_to_fit() {
        // every raw cutoff fails: d_2 > 1 for k = 5 and 3, d_1 <= 0 for k = 4 and 2
        let cc: BTreeMap<u64, u64> = [(1, 100), (2, 20), (3, 30), (4, 5), (5, 8), (6, 3)]
            .into_iter()
            .collect();
        let t = DiscountTable::<f64>::from_count_of_counts(&cc, 5).unwrap();
        assert!(t.is_smoothed());
        assert_eq!(t.cutoff(), 5);
        for r in 1..=5 {
            assert!(t.ratio(r) > 0.0 && t.ratio(r) <= 1.0);
        }
        // flat counts of counts carry no discounting signal
        let flat: BTreeMap<u64, u64> = [(1, 38), (2, 60), (3, 38), (4, 31)].into_iter().collect();
        assert!(DiscountTable::<f64>::from_count_of_counts(&flat, 5).is_err());
    }

    #[test]
    fn zero_count_row_is_an_error() {
        let c = toy();
        let nouns = Vocabulary::from_words((0..7).map(|i| format!("n{i}"))).unwrap();
        let bigger = PairCorpus::from_counts(nouns, c.verbs().clone(), c.entries());
        let m = KatzModel::<f64>::build(Arc::new(bigger), 5).unwrap();
        assert_eq!(
            m.prob(NounId(6), VerbId(0)),
            Err(ModelError::UndefinedConditional(NounId(6)))
        );
    }
}
