//! Simulated coverage of all four links against the closed forms.
//!
//! cargo run --release --example mc_coverage -- [trials]

use std::time::Instant;

use riscov::analytic::{coverage_baseline, coverage_path_a, PathB};
use riscov::montecarlo::{estimate_coverage, Metric, NetworkParams, RunSpec};

fn main() -> riscov::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let net = NetworkParams::default();
    let thresholds_db = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    let thresholds: Vec<f64> = thresholds_db.iter().map(|d: &f64| 10f64.powf(d / 10.0)).collect();

    let start = Instant::now();
    let report = estimate_coverage(&RunSpec::new(net, trials, 1), &thresholds)?;
    println!(
        "{trials} drops in {:.1?}, engaged RIS in {:.4} of them",
        start.elapsed(),
        report.engaged_fraction()
    );

    let path_b = PathB::new(&net.query(1.0))?;
    println!(" T_dB   q2     MC_o         q23    MC_a         apx1   apx2   MC_b         MC_s");
    for (k, (&db, &t)) in thresholds_db.iter().zip(&thresholds).enumerate() {
        let q = net.query(t);
        let cell = |m| {
            let e = report.get(m, k);
            format!("{:.4}±{:.3}", e.probability, e.confidence_half_width)
        };
        println!(
            "{db:5.0}  {:.4} {}  {:.4} {}  {:.4} {:.4} {}  {}",
            coverage_baseline(&q)?,
            cell(Metric::GammaO),
            coverage_path_a(&q)?,
            cell(Metric::GammaA),
            path_b.approx1(t)?,
            path_b.approx2(t)?,
            cell(Metric::GammaB),
            cell(Metric::GammaS),
        );
    }
    Ok(())
}
