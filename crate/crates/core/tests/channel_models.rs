use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use statrs::function::gamma::gamma;

use riscov::channel::{
    array_factor, array_factor_phases, fade_moment, mean_reflected_power,
    peak_reflection_power, power_density_convert, reflected_power_raw_moment, ArrayGeometry,
    BeamMode, BeamModel, FadingModel, PhaseResolution, ReflectionModel,
};
use riscov::geometry::{expected_r1_neg_power, nearest_distance, sample_ppp, Point};
use riscov::rng::labelled;
use riscov::stats::ks_two_sample;

#[test]
fn half_moment_of_unit_fade_matches_gamma_three_halves() {
    let mut rng = labelled(1, "fade");
    let exp = FadingModel::new(1.0).unwrap().sampler();
    let n = 400_000;
    let mean = (0..n).map(|_| exp.sample(&mut rng).sqrt()).sum::<f64>() / n as f64;
    let target = PI.sqrt() / 2.0;
    assert!((mean / target - 1.0).abs() < 0.005, "{mean} vs {target}");
    assert!((fade_moment(1.0, 4.0).unwrap() - target).abs() < 1e-14);
}

#[test]
fn fade_moment_scales_with_rate() {
    for (mu, alpha) in [(0.5, 3.0), (2.0, 4.0), (4.0, 6.0)] {
        let s = 2.0 / alpha;
        let expected = gamma(1.0 + s) / f64::powf(mu, s);
        assert!((fade_moment(mu, alpha).unwrap() - expected).abs() < 1e-13);
        let mean = FadingModel::new(mu).unwrap().mean();
        assert!((mean - 1.0 / mu).abs() < 1e-15);
    }
}

#[test]
fn ideal_array_gain_is_m_squared() {
    for m in [1usize, 10, 100] {
        let geom = ArrayGeometry::half_wavelength(28e9, 0.7, 55.0);
        let af = array_factor(&geom.ideal_compensation(m), &geom, PhaseResolution::Ideal);
        assert_eq!(af.norm_sqr(), (m * m) as f64, "M = {m}");
    }
}

// Each element is corrected by the nearer of 0 and pi.
fn one_bit_oracle(phases: &[f64]) -> Complex64 {
    phases
        .iter()
        .map(|&p| {
            let w = p.rem_euclid(2.0 * PI);
            let level = if (w - PI).abs() <= PI / 2.0 { PI } else { 0.0 };
            Complex64::from_polar(1.0, w - level)
        })
        .sum()
}

#[test]
fn one_bit_quantization_matches_brute_force() {
    let mut rng = labelled(2, "one_bit");
    let m = 1000;
    let trials = 400;
    let mut eff = 0.0;
    for _ in 0..trials {
        let phases: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let got = array_factor_phases(&phases, PhaseResolution::Bits(1));
        let oracle = one_bit_oracle(&phases);
        assert!((got - oracle).norm() < 1e-9 * m as f64);
        eff += oracle.norm_sqr() / (m * m) as f64;
    }
    eff /= trials as f64;
    let target = (2.0 / PI).powi(2);
    assert!((eff - target).abs() < 0.01, "{eff}");
    let expected = PhaseResolution::Bits(1).expected_efficiency(m as u64);
    assert!((eff - expected).abs() < 0.005);
}

#[test]
fn quantization_levels_wrap() {
    let two = PhaseResolution::Bits(2);
    assert_eq!(two.quantize(0.0), 0.0);
    assert!((two.quantize(PI / 2.0 + 0.1) - PI / 2.0).abs() < 1e-15);
    assert_eq!(two.quantize(2.0 * PI - 0.1), 0.0);
    assert!(PhaseResolution::Bits(0).validate().is_err());
}

#[test]
fn beam_thinning() {
    let single = BeamModel::new(16, BeamMode::SingleBeam).unwrap();
    let split = BeamModel::new(16, BeamMode::SplitBeam).unwrap();
    assert!((single.retention_probability() - 0.25).abs() < 1e-15);
    assert!((split.retention_probability() - (2.0f64 / 16.0).sqrt()).abs() < 1e-15);
    assert!((split.per_beam_power(2.0) - 1.0).abs() < 1e-15);
    assert_eq!(BeamModel::new(1, BeamMode::SplitBeam).unwrap().retention_probability(), 1.0);
}

#[test]
fn strongest_path_is_invariant_under_power_density_conversion() {
    let (lambda, power, alpha) = (2.5e-5, 7.0, 4.0);
    let conv = power_density_convert(lambda, power, 1.0, alpha).unwrap();
    assert!((conv.converted_intensity - power.sqrt() * lambda).abs() < 1e-18);
    let mut rng = labelled(3, "conversion");
    let draw = |rng: &mut _, l: f64, p: f64| {
        let radius = (2000.0 / (PI * l)).sqrt();
        let pts = sample_ppp(l, radius, rng).unwrap();
        nearest_distance(&pts, Point::ORIGIN).unwrap().powf(alpha) / p
    };
    let n = 10_000;
    let a: Vec<f64> = (0..n).map(|_| draw(&mut rng, lambda, power)).collect();
    let b: Vec<f64> = (0..n).map(|_| draw(&mut rng, conv.converted_intensity, 1.0)).collect();
    let ks = ks_two_sample(&a, &b);
    assert!(ks.p_value > 0.01, "{ks:?}");

    let wrong: Vec<f64> = (0..n).map(|_| draw(&mut rng, lambda, 1.0)).collect();
    assert!(ks_two_sample(&a, &wrong).p_value < 1e-6);
}

#[test]
fn conversion_composes() {
    let c = power_density_convert(1e-4, 3.0, 1.0, 4.0).unwrap();
    let twice = c.then(5.0).unwrap();
    let direct = power_density_convert(1e-4, 15.0, 1.0, 4.0).unwrap();
    assert!((twice.converted_intensity / direct.converted_intensity - 1.0).abs() < 1e-14);
}

// r1 by the cosine rule from independent Rayleigh r0, r2 and a uniform angle.
fn r1_draws(n: usize, lb: f64, lr: f64, seed: u64) -> Vec<f64> {
    let mut rng = labelled(seed, "r1_draws");
    let ray = |rng: &mut rand_chacha::ChaCha8Rng, l: f64| {
        (-rng.random::<f64>().ln() / (PI * l)).sqrt()
    };
    (0..n)
        .map(|_| {
            let r0 = ray(&mut rng, lb);
            let r2 = ray(&mut rng, lr);
            let th = rng.random_range(0.0..PI);
            (r0 * r0 + r2 * r2 - 2.0 * r0 * r2 * th.cos()).max(0.0).sqrt()
        })
        .collect()
}

#[test]
fn truncated_negative_moment_matches_sampling() {
    let (lb, lr, eps) = (2.5e-5, 1e-3, 5.0);
    let draws = r1_draws(400_000, lb, lr, 4);
    for p in [1.0, 2.0] {
        let mc = draws.iter().filter(|&&r| r >= eps).map(|r| r.powf(-p)).sum::<f64>()
            / draws.len() as f64;
        let q = expected_r1_neg_power(lb, lr, p, eps).unwrap();
        assert!((mc / q - 1.0).abs() < 0.01, "p = {p}: {mc} vs {q}");
    }
}

#[test]
fn mean_reflected_power_matches_sampling() {
    let (lb, lr, eps, alpha, p_s) = (2.5e-5, 1e-3, 5.0, 3.0, 2.0);
    let model = ReflectionModel::new(100, 0.9, PhaseResolution::Ideal).unwrap();
    let draws = r1_draws(400_000, lb, lr, 5);
    let exp = Exp::new(1.0).unwrap();
    let mut rng = labelled(6, "f1");
    let mc = draws
        .iter()
        .map(|&r| {
            let f1 = exp.sample(&mut rng);
            if r >= eps {
                peak_reflection_power(&model, p_s, f1, r, alpha).unwrap()
            } else {
                0.0
            }
        })
        .sum::<f64>()
        / draws.len() as f64;
    let q = mean_reflected_power(lb, lr, &model, p_s, 1.0, alpha, eps).unwrap();
    assert!((mc / q - 1.0).abs() < 0.03, "{mc} vs {q}");
}

#[test]
fn raw_moment_matches_sampling() {
    let (lb, lr, eps, alpha, p_s, mu) = (2.5e-5, 1e-3, 5.0, 3.0, 2.0, 2.0);
    let model = ReflectionModel::new(100, 0.9, PhaseResolution::Bits(2)).unwrap();
    let draws = r1_draws(400_000, lb, lr, 7);
    let exp = FadingModel::new(mu).unwrap().sampler();
    let mut rng = labelled(8, "f1");
    let values: Vec<f64> = draws
        .iter()
        .map(|&r| {
            let f1 = exp.sample(&mut rng);
            if r >= eps {
                let p = peak_reflection_power(&model, p_s, f1, r, alpha).unwrap();
                (p / mu).powf(2.0 / alpha)
            } else {
                0.0
            }
        })
        .collect();
    let n = values.len() as f64;
    let mc = values.iter().sum::<f64>() / n;
    let se = (values.iter().map(|v| (v - mc).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
    let q = reflected_power_raw_moment(lb, lr, &model, p_s, mu, alpha, eps).unwrap();
    // The r1^-2 tail makes the estimator noisy, so the bound is 4 standard errors.
    assert!((mc - q).abs() < 4.0 * se, "{mc} vs {q} (se {se})");
}
