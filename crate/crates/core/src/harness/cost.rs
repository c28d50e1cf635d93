//! Measurement cost accounting.
//!
//! One "evaluation" is one estimate of `A` or of the pair `(A, B)` on a fresh
//! preparation of the circuit; each costs `n_shot` shots.

use std::fmt::Write;

use crate::control::{Method, RunRecord};

/// Evaluations a run of `layers` layers needs: `K` for FALQON, `K (L + 1)` for GD-QLC.
pub fn expected_evals(method: &Method, layers: usize) -> u64 {
    let per_layer = match method {
        Method::Falqon | Method::FalqonLagged => 1,
        Method::GdQlc(gd) => gd.l_iters as u64 + 1,
    };
    per_layer * layers as u64
}

pub fn cost_report(method: &Method, rec: &RunRecord, n_shot: u64) -> String {
    let k = rec.layers();
    let evals = rec.expectation_evals;
    let baseline = expected_evals(&Method::Falqon, k);
    let mut s = String::new();
    let _ = writeln!(s, "method:                  {}", method.label());
    let _ = writeln!(s, "layers:                  {k}");
    let _ = writeln!(s, "expectation evaluations: {evals}");
    let _ = writeln!(
        s,
        "shots (N_shot = {n_shot}):   {}",
        evals.saturating_mul(n_shot)
    );
    let _ = writeln!(s, "FALQON at same depth:    {baseline} evaluations");
    if baseline > 0 {
        let _ = writeln!(
            s,
            "ratio to FALQON:         {}",
            evals as f64 / baseline as f64
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{GdConfig, LearningRate};

    #[test]
    fn counts() {
        let gd = Method::GdQlc(GdConfig {
            l_iters: 7,
            lr: LearningRate::LogDecay { c: 0.1 },
        });
        assert_eq!(expected_evals(&gd, 100), 800);
        assert_eq!(expected_evals(&Method::Falqon, 100), 100);
        let rec = RunRecord {
            beta: vec![0.0; 100],
            expectation_evals: 800,
            ..Default::default()
        };
        let text = cost_report(&gd, &rec, 1000);
        assert!(text.contains("800000"), "{text}");
        assert!(text.contains("ratio to FALQON:         8"), "{text}");
    }
}
