use serde::Serialize;
use std::fmt::Write as _;

use super::KatzModel;
use crate::scalar::Real;

/// Diagnostic description of a corpus and the Katz model built on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub nouns: usize,
    pub verbs: usize,
    pub total_pairs: u64,
    pub pair_types: usize,
    pub singletons: u64,
    pub count_of_counts: Vec<(u64, u64)>,
    pub requested_cutoff: u64,
    pub cutoff: u64,
    pub discounts: Vec<(u64, f64)>,
    /// Min, lower quartile, median, upper quartile and max of the per-row
    /// left-over mass.
    pub leftover_quantiles: Option<[f64; 5]>,
    pub warnings: Vec<String>,
}

impl ModelSummary {
    pub fn from_katz<T: Real>(model: &KatzModel<T>) -> Self {
        let corpus = model.shared_corpus();
        let table = model.discounts();
        let mut leftovers: Vec<f64> = model.leftovers().map(|(_, l)| l.to_f64_lossy()).collect();
        leftovers.sort_by(f64::total_cmp);
        let leftover_quantiles = (!leftovers.is_empty()).then(|| {
            let q = |p: f64| leftovers[((leftovers.len() - 1) as f64 * p).round() as usize];
            [q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)]
        });
        ModelSummary {
            nouns: corpus.nouns().len(),
            verbs: corpus.verbs().len(),
            total_pairs: corpus.total_pairs(),
            pair_types: corpus.type_count(),
            singletons: corpus.singleton_count(),
            count_of_counts: table.count_of_counts().iter().map(|(&r, &n)| (r, n)).collect(),
            requested_cutoff: table.requested_cutoff(),
            cutoff: table.cutoff(),
            discounts: (1..=table.cutoff())
                .map(|r| (r, table.ratio(r).to_f64_lossy()))
                .collect(),
            leftover_quantiles,
            warnings: table.warnings().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nouns\t{}", self.nouns);
        let _ = writeln!(s, "verbs\t{}", self.verbs);
        let _ = writeln!(s, "total_pairs\t{}", self.total_pairs);
        let _ = writeln!(s, "pair_types\t{}", self.pair_types);
        let _ = writeln!(s, "singletons\t{}", self.singletons);
        let _ = writeln!(s, "gt_cutoff\t{} (requested {})", self.cutoff, self.requested_cutoff);
        for (r, d) in &self.discounts {
            let _ = writeln!(s, "discount\t{r}\t{d}");
        }
        for (r, n) in self.count_of_counts.iter().take(10) {
            let _ = writeln!(s, "n_r\t{r}\t{n}");
        }
        if let Some(q) = self.leftover_quantiles {
            let _ = writeln!(
                s,
                "leftover_quantiles\t{}\t{}\t{}\t{}\t{}",
                q[0], q[1], q[2], q[3], q[4]
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning\t{w}");
        }
        s
    }
}
