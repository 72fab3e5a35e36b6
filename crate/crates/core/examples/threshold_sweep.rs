//! Precision, recall and F1 over a threshold sweep, plus the error breakdown.

use relpat::eval::{
    error_taxonomy, metrics_tsv, records_at, threshold_sweep, Averaging, SampleOutcome,
    ScoredSample,
};
use relpat::semantic::ScoreVector;

fn scored(id: &str, gold: &str, scores: &[(&str, f64)]) -> ScoredSample {
    let v: ScoreVector = scores.iter().map(|(p, s)| (p.to_string(), *s)).collect();
    ScoredSample {
        id: id.into(),
        gold: gold.into(),
        outcome: SampleOutcome::Scored(vec![v]),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = vec![
        scored("s1", "P19", &[("P19", 0.73), ("P569", 0.61)]),
        scored("s2", "P569", &[("P569", 0.57)]),
        scored("s3", "P570", &[("P569", 0.64), ("P570", 0.69)]),
        scored("s4", "P106", &[("P106", 0.35)]),
        scored("s5", "Other", &[("P26", 0.41)]),
        ScoredSample {
            id: "s6".into(),
            gold: "P69".into(),
            outcome: SampleOutcome::NoPattern,
        },
        ScoredSample {
            id: "s7".into(),
            gold: "Other".into(),
            outcome: SampleOutcome::AnchorMissing,
        },
    ];
    let thresholds: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    for averaging in [Averaging::Micro, Averaging::Macro] {
        let rows = threshold_sweep("demo", &samples, &thresholds, averaging)?;
        print!("{}", metrics_tsv(&rows));
    }
    for t in [0.0, 0.6] {
        println!(
            "errors at {t}: {:?}",
            error_taxonomy(&records_at(&samples, t))?
        );
    }
    Ok(())
}
