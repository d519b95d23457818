//! Side-by-side comparison of the two trainers on one labeled dataset:
//! accuracy, training wall time, and feature-extraction wall time.

use crate::error::Result;
use crate::knn::{evaluate, LabeledSet};
use crate::train::{train_greedy, train_mm, TrainConfig};
use std::time::Instant;

/// Measurements for one training method.
#[derive(Debug, Clone)]
pub struct MethodReport {
    pub train_seconds: f64,
    pub extract_seconds: f64,
    pub accuracy: f64,
    pub final_objective: f64,
}

/// Paired reports for the greedy baseline and the joint MM trainer.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub greedy: MethodReport,
    pub mm: MethodReport,
    pub n_train: usize,
    pub n_test: usize,
    pub k: usize,
}

fn run_method(
    train_fn: impl Fn() -> Result<(crate::DdlModel, crate::FeatureSet, crate::TrainTrace)>,
    train: &LabeledSet,
    test: &LabeledSet,
    k: usize,
) -> Result<MethodReport> {
    let t0 = Instant::now();
    let (model, _feats, trace) = train_fn()?;
    let train_seconds = t0.elapsed().as_secs_f64();

    // Extraction time covers freezing the model (pseudoinverse precompute)
    // plus the cascade over the test split.
    let t1 = Instant::now();
    let extractor = model.extractor()?;
    extractor.extract(&test.features)?;
    let extract_seconds = t1.elapsed().as_secs_f64();

    let report = evaluate(&model, train, test, k)?;
    Ok(MethodReport {
        train_seconds,
        extract_seconds,
        accuracy: report.accuracy,
        final_objective: *trace.objective_per_outer.last().unwrap_or(&f64::NAN),
    })
}

/// Trains both methods on the same split and evaluates k-NN accuracy over
/// the extracted features.
pub fn run_bench(
    train: &LabeledSet,
    test: &LabeledSet,
    cfg: &TrainConfig,
    k: usize,
) -> Result<BenchReport> {
    let greedy = run_method(|| train_greedy(&train.features, cfg), train, test, k)?;
    let mm = run_method(|| train_mm(&train.features, cfg), train, test, k)?;
    Ok(BenchReport {
        greedy,
        mm,
        n_train: train.len(),
        n_test: test.len(),
        k,
    })
}

impl BenchReport {
    /// Plain-text comparison table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "dataset: {} train / {} test, k = {}\n",
            self.n_train, self.n_test, self.k
        ));
        out.push_str(&format!(
            "{:<10} {:>12} {:>14} {:>16} {:>18}\n",
            "method", "accuracy", "train_seconds", "extract_seconds", "final_objective"
        ));
        for (name, r) in [("greedy", &self.greedy), ("mm", &self.mm)] {
            out.push_str(&format!(
                "{:<10} {:>12.4} {:>14.3} {:>16.4} {:>18.6e}\n",
                name, r.accuracy, r.train_seconds, r.extract_seconds, r.final_objective
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::Mat;
    use crate::rng::Rng;

    #[test]
    fn bench_runs_on_a_tiny_problem() {
        let mut rng = Rng::new(311);
        let features = |rng: &mut Rng, n: usize| {
            let mut cols = Vec::new();
            let mut labels = Vec::new();
            for j in 0..n {
                let class = j % 2;
                let center = if class == 0 { 0.7 } else { -0.7 };
                cols.push((0..12).map(|_| center + 0.2 * rng.uniform_sym()).collect::<Vec<_>>());
                labels.push(class);
            }
            let m = Mat::from_fn(12, n, |i, j| cols[j][i]);
            LabeledSet::new(m, labels).unwrap()
        };
        let train = features(&mut rng, 24);
        let test = features(&mut rng, 12);
        let mut cfg = TrainConfig::new(vec![6, 3]);
        cfg.outer_iters = 5;
        let report = run_bench(&train, &test, &cfg, 1).unwrap();
        assert!(report.greedy.accuracy >= 0.5);
        assert!(report.mm.accuracy >= 0.5);
        assert!(report.render().contains("greedy"));
    }
}
