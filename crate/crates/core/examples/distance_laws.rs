//! Nearest-neighbour distance laws, checked against a short simulation.
//!
//! cargo run --release --example distance_laws

use riscov::geometry::{
    expected_r1, pdf_r1_marginal, prob_ris_closer, rayleigh_quantile, DistanceLaw, R1Conditioning,
};
use riscov::montecarlo::{collect_samples, NetworkParams, Quantity, RunSpec};
use riscov::stats::ks_one_sample;

fn main() -> riscov::Result<()> {
    // 25 BSs and 1000 RISs per km².
    let (lb, lr) = (2.5e-5, 1e-3);
    let net = NetworkParams {
        lambda_bs: lb,
        lambda_ris: lr,
        ..NetworkParams::default()
    };
    let spec = RunSpec::new(net, 20_000, 7);

    println!("Pr(RIS closer than BS) = {:.4}", prob_ris_closer(lb, lr));
    println!("E[r1] = {:.2} m", expected_r1(lb, lr)?);

    let lambda_e = lb * lr / (lb + lr);
    let hi = rayleigh_quantile(0.999, lambda_e);
    println!("\n   r1 [m]   f_r1");
    for k in 1..=8 {
        let r = hi * k as f64 / 8.0;
        println!("{r:9.1}   {:.3e}", pdf_r1_marginal(r, lb, lr)?);
    }

    let laws = [
        (Quantity::R0, DistanceLaw::R0 { lambda_bs: lb }),
        (Quantity::R2, DistanceLaw::R2 { lambda_ris: lr }),
        (
            Quantity::R1,
            DistanceLaw::R1Marginal {
                lambda_bs: lb,
                lambda_ris: lr,
                // Default runs only engage a RIS closer than the serving BS.
                conditioning: R1Conditioning::Engaged,
            },
        ),
    ];
    println!("\nquantity  samples  mean(sim)  mean(law)  KS p-value");
    for (q, law) in laws {
        let mut s = collect_samples(&spec, q)?;
        // The marginal CDF costs a nested quadrature per point.
        s.truncate(2000);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let ks = ks_one_sample(&s, |x| law.cdf(x).unwrap_or(f64::NAN));
        println!(
            "{:8}  {:7}  {:9.2}  {:9.2}  {:.3}",
            q.name(),
            s.len(),
            mean,
            law.mean()?,
            ks.p_value
        );
    }
    Ok(())
}
