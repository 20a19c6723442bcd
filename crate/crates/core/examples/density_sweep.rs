//! Sweeps of RIS and BS density written as CSV, as the `sweep` subcommand does.
//!
//! cargo run --release --example density_sweep > sweep.csv

use riscov::cli::{csv_string, run_sweep, NetworkConfig, SweepAxis, SweepOptions};

fn main() {
    let cfg = NetworkConfig {
        thresholds_db: vec![0.0, 10.0],
        ..NetworkConfig::default()
    };
    let options = SweepOptions::default();
    let mut rows = run_sweep(&cfg, SweepAxis::LambdaRis, &[100.0, 1000.0, 10_000.0], &options, None)
        .and_then(|mut r| {
            r.extend(run_sweep(&cfg, SweepAxis::LambdaBs, &[10.0, 25.0, 100.0], &options, None)?);
            Ok(r)
        })
        .unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        });
    rows.retain(|r| r.metric != "gamma_s");
    print!("{}", csv_string(&rows).expect("CSV"));
}
