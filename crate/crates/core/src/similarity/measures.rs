use std::cmp::Ordering;

use super::{SimilarityError, SparseDistribution};
use crate::basemodel::{BaseModel, KatzModel, MleModel, ModelError};
use crate::corpus::{NounId, VerbId};
use crate::scalar::Real;

/// `D(p || q) = sum_{v in supp p} p(v) ln(p(v) / q(v))`.
///
/// Only `p`'s support is visited; `q` is looked up per verb and must be
/// strictly positive there.
pub fn kl_divergence<T, F>(p: &SparseDistribution<T>, mut q: F) -> Result<T, SimilarityError>
where
    T: Real,
    F: FnMut(VerbId) -> Result<T, ModelError>,
{
    let mut sum = T::zero();
    for &(v, pv) in p.entries() {
        let qv = q(v)?;
        if !(qv > T::zero()) {
            return Err(SimilarityError::UndefinedDivergence { verb: v });
        }
        sum += pv * (pv / qv).ln();
    }
    Ok(sum)
}

/// `D(p || P_katz(. | other))`.
pub fn kl_to_model<T: Real>(
    p: &SparseDistribution<T>,
    smoothed: &KatzModel<T>,
    other: NounId,
) -> Result<T, SimilarityError> {
    kl_divergence(p, |v| smoothed.prob(other, v))
}

/// Walks two sorted supports together, calling `common` on shared verbs and
/// `only` on verbs present in one side. Returns the number of steps taken.
fn merge<T: Real>(
    p: &SparseDistribution<T>,
    q: &SparseDistribution<T>,
    mut common: impl FnMut(T, T),
    mut only: impl FnMut(T),
) -> usize {
    let (a, b) = (p.entries(), q.entries());
    let (mut i, mut j, mut steps) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        steps += 1;
        match a[i].0.cmp(&b[j].0) {
            Ordering::Equal => {
                common(a[i].1, b[j].1);
                i += 1;
                j += 1;
            }
            Ordering::Less => {
                only(a[i].1);
                i += 1;
            }
            Ordering::Greater => {
                only(b[j].1);
                j += 1;
            }
        }
    }
    for &(_, x) in a[i..].iter().chain(&b[j..]) {
        steps += 1;
        only(x);
    }
    steps
}

/// Total divergence to the average, `A(p, q) = D(p || m) + D(q || m)` with
/// `m = (p + q) / 2`. Ranges over `[0, 2 ln 2]`.
pub fn total_divergence_to_average<T: Real>(p: &SparseDistribution<T>, q: &SparseDistribution<T>) -> T {
    total_divergence_to_average_counted(p, q).0
}

/// As [`total_divergence_to_average`], also returning the merge step count.
///
/// Shared verbs contribute `H(p + q) - H(p) - H(q) + (p + q) ln 2`, written
/// as `p ln(2p / (p+q)) + q ln(2q / (p+q))`; verbs in only one support
/// contribute their mass times `ln 2`. With normalized inputs this is
/// `sum_C {H(p+q) - H(p) - H(q)} + 2 ln 2`, and identical inputs give
/// exactly zero.
pub fn total_divergence_to_average_counted<T: Real>(
    p: &SparseDistribution<T>,
    q: &SparseDistribution<T>,
) -> (T, usize) {
    let two = T::lit(2.0);
    let mut common_sum = T::zero();
    let mut exclusive = T::zero();
    let steps = merge(
        p,
        q,
        |a, b| {
            let s = a + b;
            common_sum += a * (two * a / s).ln() + b * (two * b / s).ln();
        },
        |x| exclusive += x,
    );
    (common_sum + exclusive * T::LN_2(), steps)
}

/// `L(p, q) = sum |p - q|`, in `[0, 2]`, computed as
/// `sum_C |p - q|` plus the mass outside the common support.
pub fn l1_distance<T: Real>(p: &SparseDistribution<T>, q: &SparseDistribution<T>) -> T {
    l1_distance_counted(p, q).0
}

pub fn l1_distance_counted<T: Real>(p: &SparseDistribution<T>, q: &SparseDistribution<T>) -> (T, usize) {
    let mut common = T::zero();
    let mut exclusive = T::zero();
    let steps = merge(p, q, |a, b| common += (a - b).abs(), |x| exclusive += x);
    (common + exclusive, steps)
}

/// Confusion probability
/// `P_C(m | n) = sum_v P(v|n) / P(v) * P(v|m) P(m)` under MLE estimates.
pub fn confusion_probability<T: Real>(mle: &MleModel<T>, n: NounId, m: NounId) -> Result<T, SimilarityError> {
    let corpus = mle.corpus();
    let row = mle.row(n)?;
    let p_m = mle.noun_unigram(m)?;
    let mut sum = T::zero();
    for (v, p_vn) in row {
        let c_mv = corpus.count(m, v);
        if c_mv == 0 {
            continue;
        }
        let p_v = mle.verb_unigram(v)?;
        if !(p_v > T::zero()) {
            return Err(SimilarityError::Inconsistent { verb: v });
        }
        let p_vm = mle.prob(m, v)?;
        sum += p_vn / p_v * p_vm * p_m;
    }
    Ok(sum)
}

/// `P_C(m | n)` for every noun `m`, indexed by noun id. Visits each verb in
/// `n`'s row and that verb's column once; accumulation order per `m` matches
/// [`confusion_probability`].
pub fn confusion_row<T: Real>(mle: &MleModel<T>, n: NounId) -> Result<Vec<T>, SimilarityError> {
    let corpus = mle.corpus();
    let row = mle.row(n)?;
    let total = T::from_count(corpus.total_pairs());
    let mut out = vec![T::zero(); corpus.nouns().len()];
    for (v, p_vn) in row {
        let p_v = mle.verb_unigram(v)?;
        if !(p_v > T::zero()) {
            return Err(SimilarityError::Inconsistent { verb: v });
        }
        let ratio = p_vn / p_v;
        for &(m, c_mv) in corpus.column(v) {
            let c_m = T::from_count(corpus.noun_total(m));
            let p_vm = T::from_count(c_mv) / c_m;
            let p_m = c_m / total;
            out[m.index()] += ratio * p_vm * p_m;
        }
    }
    Ok(out)
}
