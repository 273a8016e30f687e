//! Runs the three selectors on seeded synthetic data and reports how often
//! both informative features land in the top two.
//!
//! cargo run --release --example recovery -- [runs] [noise_sigma]

use std::time::Instant;

use ipm_fs::synthetic::{gen_synthetic, SyntheticSpec};
use ipm_fs::{select, standardize, EstimatorChoice, Method, SelectionConfig, SinkhornConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let noise: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.0);
    let informative = vec![4, 15];
    for method in [Method::Twd, Method::Fawd, Method::Bewd] {
        let est = match method {
            Method::Twd => EstimatorChoice::Exact1d,
            _ => EstimatorChoice::Sinkhorn(SinkhornConfig::default()),
        };
        let cfg = SelectionConfig::new(2, est);
        let start = Instant::now();
        let mut hits = 0;
        for seed in 0..runs {
            let spec = SyntheticSpec {
                n_per_class: 100,
                n_classes: 3,
                n_features: 20,
                informative: informative.clone(),
                shift: 2.0,
                noise_sigma: noise,
                seed,
            };
            let ds = standardize(&gen_synthetic(&spec)?)?;
            let r = select(&ds, method, &cfg)?;
            if informative.iter().all(|f| r.selected.contains(f)) {
                hits += 1;
            }
        }
        println!(
            "{method}: {hits}/{runs} recovered in {:.2?}",
            start.elapsed()
        );
    }
    Ok(())
}
