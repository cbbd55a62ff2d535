//! The grid transpose is *not* free from scalar block matrices: the mixed
//! moment with the 2×2 block swap approaches −4/b⁴ instead of 0.
//!
//! Run with `cargo run -p haarpt --example nonfreeness_counterexample`.

use haarpt::cli::reproduce::{cmd_reproduce, ReproduceParams};
use haarpt::moments::counterexample_prediction;
use num_traits::ToPrimitive;

fn main() {
    for b in [2u64, 3, 4] {
        println!(
            "predicted limit at b = {b}: {} ≈ {:.6}",
            counterexample_prediction(b),
            counterexample_prediction(b).to_f64().unwrap()
        );
    }

    let params = ReproduceParams {
        b: Some(2),
        d: Some(16),
        samples: Some(2_000),
        seed: 3,
        tolerance: 4.0,
        grid: None,
    };
    let report = cmd_reproduce("counterexample", &params).unwrap();
    for line in &report.human {
        println!("{line}");
    }
}
