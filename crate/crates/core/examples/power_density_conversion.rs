//! Equivalence between transmit power and PPP density.
//!
//! cargo run --release --example power_density_conversion

use rand::Rng;
use rand_distr::Exp;

use riscov::channel::power_density_convert;
use riscov::geometry::{sample_ppp, Point};
use riscov::rng::labelled;
use riscov::stats::ks_two_sample;

/// Strongest received power `max P h r^-alpha` over one drop.
fn strongest<R: Rng>(rng: &mut R, intensity: f64, power: f64, alpha: f64) -> riscov::Result<f64> {
    let radius = (2000.0 / (std::f64::consts::PI * intensity)).sqrt();
    let pts = sample_ppp(intensity, radius, rng)?;
    let fade = Exp::new(1.0).expect("unit rate");
    Ok(pts
        .points()
        .iter()
        .map(|p| power * rng.sample(fade) * p.distance(&Point::ORIGIN).powf(-alpha))
        .fold(0.0, f64::max))
}

fn main() -> riscov::Result<()> {
    let (lambda, power, alpha) = (2.5e-5, 5.0, 4.0);
    let conv = power_density_convert(lambda, power, 1.0, alpha)?;
    println!(
        "lambda {lambda:.2e} at P = {power} W  ->  {:.3e} at unit power (scale {:.4})",
        conv.converted_intensity,
        conv.scale()
    );

    let mut rng = labelled(5, "conversion");
    let n = 3000;
    let original: Vec<f64> = (0..n)
        .map(|_| strongest(&mut rng, lambda, power, alpha))
        .collect::<riscov::Result<_>>()?;
    let converted: Vec<f64> = (0..n)
        .map(|_| strongest(&mut rng, conv.converted_intensity, 1.0, alpha))
        .collect::<riscov::Result<_>>()?;
    let ks = ks_two_sample(&original, &converted);
    println!("two-sample KS: D = {:.4}, p = {:.3}", ks.statistic, ks.p_value);

    let twice = conv.then(2.0)?;
    println!(
        "chained: total power {} W, intensity {:.3e}",
        twice.power, twice.converted_intensity
    );
    Ok(())
}
