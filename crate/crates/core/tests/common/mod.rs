//! Synthetic block corpora with a known latent structure.
//!
//! Nouns and verbs fall into the same number of latent classes. Verb `(c, j)`
//! has class `c` and popularity level `j` with weight `2^j`, so verbs of one
//! level have similar frequencies and end up paired into pseudo-words with
//! each other. A noun draws verbs of its own class `affinity` times more
//! often than others. Noun `i` never sees the verbs of level `i mod levels`
//! in training; its test pairs are drawn from exactly those verbs, so every
//! test pair and every decoy is unseen.

#![allow(dead_code)]

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use simsmooth::corpus::{NounId, Pair, PairCorpus, VerbId, Vocabulary};

#[derive(Debug, Clone)]
pub struct BlockSpec {
    pub classes: usize,
    pub nouns_per_class: usize,
    pub levels: usize,
    pub affinity: f64,
    pub train_tokens: usize,
    pub test_per_noun: usize,
    /// Noun frequency falls off as `1 / rank^s`; 0 gives equal frequencies.
    pub noun_zipf: f64,
    /// Weight multiplier for a noun's secondary class; 1 disables it.
    pub secondary: f64,
    pub popularity: Popularity,
}

/// How verb popularity grows with the level `j`.
#[derive(Debug, Clone, Copy)]
pub enum Popularity {
    /// `2^j`: levels are well separated in frequency.
    Doubling,
    /// `1 / (j + 1)^s`: a long tail of rare levels.
    Zipf(f64),
}

impl BlockSpec {
    /// 40 nouns and 20 verbs in 4 classes, ~20k training pairs.
    pub fn standard() -> Self {
        BlockSpec {
            classes: 4,
            nouns_per_class: 10,
            levels: 5,
            affinity: 10.0,
            train_tokens: 20_000,
            test_per_noun: 50,
            noun_zipf: 0.0,
            secondary: 1.0,
            popularity: Popularity::Doubling,
        }
    }

    /// Same latent structure with a long verb tail: 25 levels (100 verbs)
    /// with Zipfian popularity and Zipfian noun frequencies.
    pub fn long_tail(train_tokens: usize) -> Self {
        BlockSpec {
            levels: 25,
            train_tokens,
            noun_zipf: 1.0,
            popularity: Popularity::Zipf(1.0),
            ..BlockSpec::standard()
        }
    }

    pub fn nouns(&self) -> usize {
        self.classes * self.nouns_per_class
    }

    pub fn verbs(&self) -> usize {
        self.classes * self.levels
    }

    fn noun_class(&self, i: usize) -> usize {
        i / self.nouns_per_class
    }

    fn secondary_class(&self, i: usize) -> usize {
        let c = self.noun_class(i);
        (c + 1 + i % (self.classes - 1)) % self.classes
    }

    fn held_out_level(&self, i: usize) -> usize {
        // interleave so every class holds out every level equally often
        (i % self.nouns_per_class) % self.levels
    }

    fn verb(&self, class: usize, level: usize) -> usize {
        class * self.levels + level
    }

    fn weight(&self, noun: usize, verb: usize) -> f64 {
        let (class, level) = (verb / self.levels, verb % self.levels);
        let pop = match self.popularity {
            Popularity::Doubling => f64::from(1u32 << level),
            Popularity::Zipf(s) => ((level + 1) as f64).powf(-s),
        };
        if class == self.noun_class(noun) {
            pop * self.affinity
        } else if class == self.secondary_class(noun) {
            pop * self.secondary
        } else {
            pop
        }
    }
}

/// Samples `train_tokens` pairs from the full joint distribution, with no
/// held-out verbs; meant to go through the regular train/test split.
pub fn generate_joint(spec: &BlockSpec, seed: u64) -> PairCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nouns, verbs) = vocabularies(spec);
    let noun_dist = WeightedIndex::new(noun_weights(spec)).unwrap();
    let rows: Vec<WeightedIndex<f64>> = (0..spec.nouns())
        .map(|i| WeightedIndex::new((0..spec.verbs()).map(|v| spec.weight(i, v))).unwrap())
        .collect();
    let mut counts = vec![0u64; spec.nouns() * spec.verbs()];
    for _ in 0..spec.train_tokens {
        let n = noun_dist.sample(&mut rng);
        counts[n * spec.verbs() + rows[n].sample(&mut rng)] += 1;
    }
    corpus_from_dense(spec, nouns, verbs, &counts)
}

fn vocabularies(spec: &BlockSpec) -> (Vocabulary, Vocabulary) {
    let nouns = Vocabulary::from_words((0..spec.nouns()).map(|i| format!("n{:02}c{}", i, spec.noun_class(i)))).unwrap();
    let verbs =
        Vocabulary::from_words((0..spec.verbs()).map(|v| format!("v{:02}c{}l{}", v, v / spec.levels, v % spec.levels)))
            .unwrap();
    (nouns, verbs)
}

// Zipf ranks are spread across classes by striding.
fn noun_weights(spec: &BlockSpec) -> Vec<f64> {
    (0..spec.nouns())
        .map(|i| {
            let rank = (i % spec.nouns_per_class) * spec.classes + spec.noun_class(i) + 1;
            (rank as f64).powf(-spec.noun_zipf)
        })
        .collect()
}

fn corpus_from_dense(spec: &BlockSpec, nouns: Vocabulary, verbs: Vocabulary, counts: &[u64]) -> PairCorpus {
    PairCorpus::from_counts(
        nouns,
        verbs,
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| {
            (
                Pair::new(NounId((k / spec.verbs()) as u32), VerbId((k % spec.verbs()) as u32)),
                c,
            )
        }),
    )
}

pub struct BlockData {
    pub train: PairCorpus,
    pub test: Vec<Pair>,
}

pub fn generate(spec: &BlockSpec, seed: u64) -> BlockData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nouns, verbs) = vocabularies(spec);
    let noun_dist = WeightedIndex::new(noun_weights(spec)).unwrap();
    let train_rows: Vec<WeightedIndex<f64>> = (0..spec.nouns())
        .map(|i| {
            let held = spec.held_out_level(i);
            let w: Vec<f64> = (0..spec.verbs())
                .map(|v| {
                    if v % spec.levels == held {
                        0.0
                    } else {
                        spec.weight(i, v)
                    }
                })
                .collect();
            WeightedIndex::new(w).unwrap()
        })
        .collect();

    let mut counts = vec![0u64; spec.nouns() * spec.verbs()];
    for _ in 0..spec.train_tokens {
        let n = noun_dist.sample(&mut rng);
        let v = train_rows[n].sample(&mut rng);
        counts[n * spec.verbs() + v] += 1;
    }
    let train = corpus_from_dense(spec, nouns, verbs, &counts);

    let mut test = Vec::new();
    for i in 0..spec.nouns() {
        let held = spec.held_out_level(i);
        let group: Vec<usize> = (0..spec.classes).map(|c| spec.verb(c, held)).collect();
        let dist = WeightedIndex::new(group.iter().map(|&v| spec.weight(i, v))).unwrap();
        for _ in 0..spec.test_per_noun {
            test.push(Pair::new(NounId(i as u32), VerbId(group[dist.sample(&mut rng)] as u32)));
        }
    }
    BlockData { train, test }
}
