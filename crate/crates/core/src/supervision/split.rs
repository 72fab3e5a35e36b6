//! Seeded, label-stratified train/dev/test partitioning.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::LabeledPattern;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplitError {
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            dev: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self, SplitError> {
        let r = SplitRatios { train, dev, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        let all = [self.train, self.dev, self.test];
        let ok = all.iter().all(|r| r.is_finite() && *r >= 0.0)
            && (all.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(SplitError::BadRatios(all))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<LabeledPattern>,
    pub dev: Vec<LabeledPattern>,
    pub test: Vec<LabeledPattern>,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub warnings: Vec<String>,
}

/// Partitions patterns per label set so each split sees every label group in
/// proportion.
///
/// Each group is shuffled with a generator seeded from `seed` and cut into
/// contiguous blocks of `round(n * train)` and `round(n * dev)` items, the
/// remainder going to test. `Other` patterns never enter the training split;
/// they are shared between dev and test in proportion to those two ratios.
/// Every split keeps the input order.
pub fn split_dataset(
    patterns: Vec<LabeledPattern>,
    ratios: SplitRatios,
    seed: u64,
) -> Result<DatasetSplit, SplitError> {
    ratios.validate()?;
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, p) in patterns.iter().enumerate() {
        groups.entry(p.label_key()).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0u8; patterns.len()];
    let mut warnings = Vec::new();
    for (key, mut members) in groups {
        let n = members.len();
        if n < 3 {
            warnings.push(format!(
                "label group {key} has {n} pattern(s); some splits will not contain it"
            ));
        }
        members.shuffle(&mut rng);
        let other = patterns[members[0]].is_other();
        let (n_train, n_dev) = if other {
            let held_out = ratios.dev + ratios.test;
            let dev_share = if held_out > 0.0 {
                ratios.dev / held_out
            } else {
                0.0
            };
            (0, (n as f64 * dev_share).round() as usize)
        } else {
            let n_train = (n as f64 * ratios.train).round() as usize;
            let n_dev = ((n as f64 * ratios.dev).round() as usize).min(n - n_train);
            (n_train, n_dev)
        };
        for (rank, &i) in members.iter().enumerate() {
            assignment[i] = if rank < n_train {
                0
            } else if rank < n_train + n_dev {
                1
            } else {
                2
            };
        }
    }

    let mut out = DatasetSplit {
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
        warnings,
    };
    for (p, a) in patterns.into_iter().zip(assignment) {
        match a {
            0 => out.train.push(p),
            1 => out.dev.push(p),
            _ => out.test.push(p),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::tests::jeanne;
    use crate::graph::SdpSubgraph;
    use crate::supervision::OTHER;

    fn pattern(i: usize, label: &str) -> LabeledPattern {
        LabeledPattern::new(
            format!("p#{i}#0"),
            SdpSubgraph::new(jeanne(), 5, 5).unwrap(),
            BTreeSet::from([label.to_string()]),
        )
    }

    fn corpus() -> Vec<LabeledPattern> {
        (0..100)
            .map(|i| {
                pattern(
                    i,
                    if i % 4 == 0 {
                        OTHER
                    } else if i % 2 == 0 {
                        "P19"
                    } else {
                        "P569"
                    },
                )
            })
            .collect()
    }

    #[test]
    fn ratios_checked() {
        assert!(SplitRatios::new(0.8, 0.1, 0.1).is_ok());
        assert!(SplitRatios::new(0.8, 0.3, 0.1).is_err());
        assert!(SplitRatios::new(1.2, -0.1, -0.1).is_err());
    }

    #[test]
    fn partition_and_proportions() {
        let split = split_dataset(corpus(), SplitRatios::default(), 7).unwrap();
        assert_eq!(split.train.len() + split.dev.len() + split.test.len(), 100);
        assert!(split.train.iter().all(|p| !p.is_other()));
        let count =
            |v: &[LabeledPattern], l: &str| v.iter().filter(|p| p.labels.contains(l)).count();
        assert_eq!(count(&split.train, "P19"), 20);
        assert_eq!(count(&split.dev, "P19"), 3);
        assert_eq!(count(&split.train, "P569"), 40);
        assert_eq!(count(&split.dev, OTHER) + count(&split.test, OTHER), 25);
        assert!(split.warnings.is_empty());
        let ids = |v: &[LabeledPattern]| v.iter().map(|p| p.instance.clone()).collect::<Vec<_>>();
        let mut sorted = ids(&split.train);
        sorted.sort_by_key(|s| s[2..s.len() - 2].parse::<usize>().unwrap());
        assert_eq!(sorted, ids(&split.train));
    }

    #[test]
    fn seeded() {
        let a = split_dataset(corpus(), SplitRatios::default(), 7).unwrap();
        let b = split_dataset(corpus(), SplitRatios::default(), 7).unwrap();
        let c = split_dataset(corpus(), SplitRatios::default(), 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn small_groups_warn() {
        let split = split_dataset(vec![pattern(0, "P26")], SplitRatios::default(), 1).unwrap();
        assert_eq!(split.train.len(), 1);
        assert_eq!(split.warnings.len(), 1);
    }
}
