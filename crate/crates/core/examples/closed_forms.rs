//! Closed-form coverage of the direct, blocked and RIS-assisted links.
//!
//! cargo run --release --example closed_forms

use riscov::analytic::{
    coverage_baseline, coverage_path_a, interference_factor, interference_factor_quadrature,
    independent_selection, CoverageQuery, PathB,
};

fn main() -> riscov::Result<()> {
    println!("     T   I(T,4)      quadrature");
    for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
        println!(
            "{t:6}   {:.9}  {:.9}",
            interference_factor(t, 4.0)?.value,
            interference_factor_quadrature(t, 4.0)?.value
        );
    }

    let base = CoverageQuery::default();
    let path_b = PathB::new(&base)?;
    let i = path_b.intensities;
    println!(
        "\nconverted intensities per m²: BS {:.3e}, interferers {:.3e}, RIS {:.3e}",
        i.bs, i.interferer, i.ris
    );

    println!("\n T_dB  direct  path A  approx1 approx2 restated  selection");
    for db in (-10..=20).step_by(5) {
        let t = 10f64.powf(db as f64 / 10.0);
        let q = base.with_threshold(t);
        let pa = coverage_path_a(&q)?;
        let a2 = path_b.approx2(t)?;
        println!(
            "{db:5}  {:.4}  {:.4}  {:.4}  {:.4}  {:.4}    {:.4}",
            coverage_baseline(&q)?,
            pa,
            path_b.approx1(t)?,
            a2,
            path_b.restated(t)?,
            independent_selection(pa, a2)
        );
    }

    // The direct-link coverage does not depend on transmit power or density.
    let q = base.with_threshold(3.0);
    let scaled = CoverageQuery {
        lambda_bs: 10.0 * q.lambda_bs,
        p_s: 7.0 * q.p_s,
        ..q
    };
    println!(
        "\nP_s and lambda_BS scaled: {:.15} vs {:.15}",
        coverage_baseline(&q)?,
        coverage_baseline(&scaled)?
    );
    Ok(())
}
