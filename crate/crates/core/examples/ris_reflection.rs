//! RIS array factor under ideal and quantized phase shifts.
//!
//! cargo run --release --example ris_reflection

use riscov::channel::{
    array_factor, array_factor_phases, ArrayGeometry, PhaseResolution, ReflectionModel,
};
use riscov::rng::labelled;

use rand::Rng;

fn main() -> riscov::Result<()> {
    let m = 100;
    let geom = ArrayGeometry::half_wavelength(28e9, 0.6, 40.0);
    let delays = geom.ideal_compensation(m);
    let ideal = array_factor(&delays, &geom, PhaseResolution::Ideal);
    println!("ideal |AF|^2 = {:.3} (M^2 = {})", ideal.norm_sqr(), m * m);

    let mut rng = labelled(11, "ris_reflection");
    println!("\nbits  eta(sim)  eta(expected)");
    for bits in 1..=4 {
        let res = PhaseResolution::Bits(bits);
        let trials = 2000;
        let mean: f64 = (0..trials)
            .map(|_| {
                let phases: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
                array_factor_phases(&phases, res).norm_sqr()
            })
            .sum::<f64>()
            / trials as f64;
        println!(
            "{bits:4}  {:.4}    {:.4}",
            mean / (m * m) as f64,
            res.expected_efficiency(m as u64)
        );
    }

    println!("\n   M  coherent gain (beta = 0.9, 2 bits)");
    for m in [16, 64, 100, 256] {
        let model = ReflectionModel::new(m, 0.9, PhaseResolution::Bits(2))?;
        println!("{m:4}  {:.1}", model.coherent_gain());
    }
    Ok(())
}
