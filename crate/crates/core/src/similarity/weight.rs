use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::SimilarityError;
use crate::corpus::NounId;
use crate::rng::pair_uniform;
use crate::scalar::Real;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "KL")]
    Kl,
    #[serde(rename = "AVG")]
    Avg,
    #[serde(rename = "L1")]
    L1,
    #[serde(rename = "CONFUSION")]
    Confusion,
    #[serde(rename = "RAND")]
    Rand,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Kl,
        Measure::Avg,
        Measure::L1,
        Measure::Confusion,
        Measure::Rand,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Smaller raw value means more similar.
    pub fn is_dissimilarity(self) -> bool {
        matches!(self, Measure::Kl | Measure::Avg | Measure::L1)
    }

    /// Whether the weight has a free `beta` to tune.
    pub fn is_tunable(self) -> bool {
        self.is_dissimilarity()
    }

    /// Upper end of the raw value range.
    pub fn range_max(self) -> f64 {
        match self {
            Measure::Kl => f64::INFINITY,
            Measure::Avg => 2.0 * std::f64::consts::LN_2,
            Measure::L1 => 2.0,
            Measure::Confusion | Measure::Rand => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::Kl => "KL",
            Measure::Avg => "AVG",
            Measure::L1 => "L1",
            Measure::Confusion => "CONFUSION",
            Measure::Rand => "RAND",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "KL" | "D" => Ok(Measure::Kl),
            "AVG" | "A" => Ok(Measure::Avg),
            "L1" | "L" => Ok(Measure::L1),
            "CONFUSION" | "PC" => Ok(Measure::Confusion),
            "RAND" => Ok(Measure::Rand),
            _ => Err(SimilarityError::Config(format!("unknown measure {s:?}"))),
        }
    }
}

/// Which candidates make up `S(n)`.
///
/// Text form: `all`, `top:K`, `threshold:T`, `top:K,threshold:T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Neighborhood {
    All,
    TopK(usize),
    /// Dissimilarities strictly below `t`, or affinities strictly above `t`.
    Threshold(f64),
    TopKAndThreshold(usize, f64),
}

impl Neighborhood {
    pub fn validate(&self, measure: Measure) -> Result<(), SimilarityError> {
        let (k, t) = match *self {
            Neighborhood::All => (None, None),
            Neighborhood::TopK(k) => (Some(k), None),
            Neighborhood::Threshold(t) => (None, Some(t)),
            Neighborhood::TopKAndThreshold(k, t) => (Some(k), Some(t)),
        };
        if k == Some(0) {
            return Err(SimilarityError::Config("neighborhood size must be at least 1".into()));
        }
        if let Some(t) = t {
            if !(t >= 0.0 && t <= measure.range_max()) {
                return Err(SimilarityError::Config(format!(
                    "threshold {t} outside the range of {measure}"
                )));
            }
        }
        Ok(())
    }

    pub fn limit(&self) -> Option<usize> {
        match *self {
            Neighborhood::TopK(k) | Neighborhood::TopKAndThreshold(k, _) => Some(k),
            _ => None,
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match *self {
            Neighborhood::Threshold(t) | Neighborhood::TopKAndThreshold(_, t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Neighborhood::All => write!(f, "all"),
            Neighborhood::TopK(k) => write!(f, "top:{k}"),
            Neighborhood::Threshold(t) => write!(f, "threshold:{t}"),
            Neighborhood::TopKAndThreshold(k, t) => write!(f, "top:{k},threshold:{t}"),
        }
    }
}

impl FromStr for Neighborhood {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimilarityError::Config(format!("bad neighborhood {s:?}"));
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Neighborhood::All);
        }
        let mut k = None;
        let mut t = None;
        for part in s.split(',') {
            let (key, value) = part.split_once(':').ok_or_else(bad)?;
            match key.trim() {
                "top" => k = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "threshold" => t = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        match (k, t) {
            (Some(k), None) => Ok(Neighborhood::TopK(k)),
            (None, Some(t)) => Ok(Neighborhood::Threshold(t)),
            (Some(k), Some(t)) => Ok(Neighborhood::TopKAndThreshold(k, t)),
            (None, None) => Err(bad()),
        }
    }
}

impl TryFrom<String> for Neighborhood {
    type Error = SimilarityError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Neighborhood> for String {
    fn from(n: Neighborhood) -> String {
        n.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig<T> {
    pub measure: Measure,
    /// Exponent scale; ignored by CONFUSION and RAND.
    pub beta: T,
    pub neighborhood: Neighborhood,
    /// Seed for RAND weights.
    pub seed: u64,
}

impl<T: Real> WeightConfig<T> {
    pub fn new(measure: Measure, beta: T) -> Self {
        WeightConfig {
            measure,
            beta,
            neighborhood: Neighborhood::All,
            seed: 0,
        }
    }

    pub fn with_neighborhood(mut self, neighborhood: Neighborhood) -> Self {
        self.neighborhood = neighborhood;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SimilarityError> {
        if self.measure.is_tunable() && !(self.beta > T::zero() && self.beta.is_finite()) {
            return Err(SimilarityError::Config(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        self.neighborhood.validate(self.measure)
    }
}

/// Turns a raw dissimilarity or affinity into a combination weight:
/// KL and AVG give `10^(-beta raw)`, L1 gives `(2 - raw)^beta`, CONFUSION
/// uses the affinity itself and RAND a seeded draw keyed by the noun pair.
pub fn weight<T: Real>(config: &WeightConfig<T>, raw: T, pair: (NounId, NounId)) -> Result<T, SimilarityError> {
    let slack = T::lit(DOMAIN_SLACK);
    if raw < -slack || raw.is_nan() {
        return Err(SimilarityError::Domain {
            measure: config.measure,
            raw: raw.to_f64_lossy(),
        });
    }
    let raw = raw.max(T::zero());
    let ten = T::lit(10.0);
    Ok(match config.measure {
        Measure::Kl | Measure::Avg => ten.powf(-config.beta * raw),
        Measure::L1 => {
            let two = T::lit(2.0);
            if raw > two + slack {
                return Err(SimilarityError::Domain {
                    measure: config.measure,
                    raw: raw.to_f64_lossy(),
                });
            }
            (two - raw).max(T::zero()).powf(config.beta)
        }
        Measure::Confusion => raw,
        Measure::Rand => T::lit(pair_uniform(config.seed, pair.0 .0, pair.1 .0)),
    })
}
