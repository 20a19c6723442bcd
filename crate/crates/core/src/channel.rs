//! Link-level channel model: exponential small-scale fading, power-law path
//! loss, BS beam thinning, RIS phased-array reflection and the mapping from
//! transmit power to an equivalent unit-power intensity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{path_loss_exponent, positive, Error, Result};
use crate::geometry;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Exponential small-scale power gain with rate `rate_mu` (mean `1 / mu`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    pub rate_mu: f64,
}

impl FadingModel {
    pub fn new(rate_mu: f64) -> Result<Self> {
        positive("mu", rate_mu)?;
        Ok(Self { rate_mu })
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate_mu
    }

    pub fn sampler(&self) -> Exp<f64> {
        Exp::new(self.rate_mu).expect("rate validated at construction")
    }
}

pub fn sample_fade<R: Rng + ?Sized>(model: &FadingModel, rng: &mut R) -> f64 {
    model.sampler().sample(rng)
}

/// `E{f^(2/alpha)} = mu^(-2/alpha) Gamma(2/alpha + 1)` for an exponential gain.
pub fn fade_moment(mu: f64, alpha: f64) -> Result<f64> {
    positive("mu", mu)?;
    positive("alpha", alpha)?;
    let s = 2.0 / alpha;
    Ok(mu.powf(-s) * gamma(s + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamMode {
    SingleBeam,
    SplitBeam,
}

/// BS antenna array with `n_elements` elements and its beam configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamModel {
    pub n_elements: u64,
    pub mode: BeamMode,
}

impl BeamModel {
    pub fn new(n_elements: u64, mode: BeamMode) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::Parameter {
                name: "n_elements",
                value: 0.0,
                reason: "BS array needs at least one element",
            });
        }
        Ok(Self { n_elements, mode })
    }

    fn sqrt_n(&self) -> f64 {
        (self.n_elements as f64).sqrt()
    }

    /// Main-lobe width in radians: `2 pi / sqrt(N)`, or `2 sqrt(2) pi / sqrt(N)`
    /// per beam when split.
    pub fn beamwidth(&self) -> f64 {
        match self.mode {
            BeamMode::SingleBeam => 2.0 * PI / self.sqrt_n(),
            BeamMode::SplitBeam => 2.0 * 2f64.sqrt() * PI / self.sqrt_n(),
        }
    }

    pub fn per_beam_power(&self, p_s: f64) -> f64 {
        match self.mode {
            BeamMode::SingleBeam => p_s,
            BeamMode::SplitBeam => 0.5 * p_s,
        }
    }

    /// Thinning factor `lambda_I / lambda_BS`, before any clamping.
    pub fn thinning_factor(&self) -> f64 {
        match self.mode {
            BeamMode::SingleBeam => 1.0 / self.sqrt_n(),
            BeamMode::SplitBeam => (2.0 / self.n_elements as f64).sqrt(),
        }
    }

    /// Probability that an interfering BS points a main lobe at the UE.
    /// Equal to [`thinning_factor`](Self::thinning_factor) capped at 1, which
    /// only binds for a split beam with `N = 1`.
    pub fn retention_probability(&self) -> f64 {
        self.thinning_factor().min(1.0)
    }
}

/// Intensity of the interfering BS process seen by the UE.
pub fn interferer_intensity(lambda_bs: f64, beam: &BeamModel) -> Result<f64> {
    positive("lambda_bs", lambda_bs)?;
    Ok(lambda_bs * beam.thinning_factor())
}

/// Large-scale attenuation `d^-alpha`.
pub fn path_loss(distance: f64, alpha: f64) -> Result<f64> {
    path_loss_exponent(alpha)?;
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::Domain {
            quantity: "distance",
            value: distance,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(distance.powf(-alpha))
}

/// A PPP of transmitters with power `power` rescaled to the unit-power PPP
/// that produces the same path-loss process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvertedIntensity {
    pub original_intensity: f64,
    pub power: f64,
    pub mu: f64,
    pub alpha: f64,
    pub converted_intensity: f64,
}

impl ConvertedIntensity {
    /// Ratio `converted / original = (power / mu)^(2/alpha)`.
    pub fn scale(&self) -> f64 {
        self.converted_intensity / self.original_intensity
    }

    /// Applies a further power factor to the already converted process.
    pub fn then(&self, power: f64) -> Result<ConvertedIntensity> {
        let next = power_density_convert(self.converted_intensity, power, 1.0, self.alpha)?;
        Ok(ConvertedIntensity {
            original_intensity: self.original_intensity,
            power: self.power * power,
            mu: self.mu,
            alpha: self.alpha,
            converted_intensity: next.converted_intensity,
        })
    }
}

/// `lambda~ = (power / mu)^(2/alpha) lambda`.
pub fn power_density_convert(
    intensity: f64,
    power: f64,
    mu: f64,
    alpha: f64,
) -> Result<ConvertedIntensity> {
    positive("intensity", intensity)?;
    positive("power", power)?;
    positive("mu", mu)?;
    positive("alpha", alpha)?;
    Ok(ConvertedIntensity {
        original_intensity: intensity,
        power,
        mu,
        alpha,
        converted_intensity: (power / mu).powf(2.0 / alpha) * intensity,
    })
}

/// Phase-shifter resolution of each RIS element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseResolution {
    #[default]
    Ideal,
    Bits(u32),
}

impl PhaseResolution {
    pub fn validate(self) -> Result<Self> {
        match self {
            PhaseResolution::Bits(b) if b == 0 || b > 52 => Err(Error::Parameter {
                name: "phase_bits",
                value: b as f64,
                reason: "quantization depth must be between 1 and 52 bits",
            }),
            other => Ok(other),
        }
    }

    /// Rounds a phase to the nearest of the `2^b` uniform levels on `[0, 2 pi)`.
    pub fn quantize(self, phase: f64) -> f64 {
        let wrapped = phase.rem_euclid(2.0 * PI);
        match self {
            PhaseResolution::Ideal => wrapped,
            PhaseResolution::Bits(b) => {
                let levels = (1u64 << b) as f64;
                let step = 2.0 * PI / levels;
                let k = (wrapped / step).round() % levels;
                k * step
            }
        }
    }

    /// Expected `|AF|^2 / M^2` over uniformly distributed target phases:
    /// `sinc^2(pi / 2^b) (1 - 1/M) + 1/M`.
    pub fn expected_efficiency(self, m_elements: u64) -> f64 {
        match self {
            PhaseResolution::Ideal => 1.0,
            PhaseResolution::Bits(b) => {
                let x = PI / (1u64 << b) as f64;
                let sinc = x.sin() / x;
                let inv_m = 1.0 / m_elements.max(1) as f64;
                sinc * sinc * (1.0 - inv_m) + inv_m
            }
        }
    }
}

/// Uniform linear RIS geometry for the delay model
/// `tau_m = m l cos(phi) / c + delta_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    /// Element spacing `l` in meters.
    pub element_spacing: f64,
    /// Arrival angle `phi` in radians.
    pub angle: f64,
    /// Reference path length `d1` in meters.
    pub reference_distance: f64,
    pub carrier_hz: f64,
}

impl ArrayGeometry {
    /// Half-wavelength array at `carrier_hz`.
    pub fn half_wavelength(carrier_hz: f64, angle: f64, reference_distance: f64) -> Self {
        Self {
            element_spacing: 0.5 * SPEED_OF_LIGHT / carrier_hz,
            angle,
            reference_distance,
            carrier_hz,
        }
    }

    /// Geometric propagation delay of element `m` relative to element 0.
    pub fn element_delay(&self, m: usize) -> f64 {
        m as f64 * self.element_spacing * self.angle.cos() / SPEED_OF_LIGHT
    }

    /// Carrier phase accumulated over the reference distance; common to all
    /// elements, so it never affects the array power.
    pub fn reference_phase(&self) -> f64 {
        2.0 * PI * self.carrier_hz * self.reference_distance / SPEED_OF_LIGHT
    }

    /// Compensating delays that co-phase all `m_elements` contributions.
    pub fn ideal_compensation(&self, m_elements: usize) -> Vec<f64> {
        (0..m_elements).map(|m| -self.element_delay(m)).collect()
    }
}

/// Coherent sum `sum_m exp(j (psi_m - q(psi_m)))`, where `q` realises the
/// required phase correction `psi_m` at the given resolution.
pub fn array_factor_phases(target_phases: &[f64], resolution: PhaseResolution) -> Complex64 {
    target_phases
        .iter()
        .map(|&p| {
            let err = match resolution {
                PhaseResolution::Ideal => 0.0,
                r => p.rem_euclid(2.0 * PI) - r.quantize(p),
            };
            Complex64::from_polar(1.0, err)
        })
        .sum()
}

/// Array factor of an RIS whose elements apply the compensating `delays`,
/// relative to the reference path. Ideal phases with
/// [`ArrayGeometry::ideal_compensation`] give amplitude `M`.
pub fn array_factor(
    delays: &[f64],
    geometry: &ArrayGeometry,
    resolution: PhaseResolution,
) -> Complex64 {
    let w = 2.0 * PI * geometry.carrier_hz;
    delays
        .iter()
        .enumerate()
        .map(|(m, &delta)| {
            let arrival = w * geometry.element_delay(m);
            let applied = resolution.quantize(w * delta);
            let total = (arrival + applied).rem_euclid(2.0 * PI);
            // fold to (-pi, pi] so that co-phased terms give cos = 1 exactly
            let total = if total > PI { total - 2.0 * PI } else { total };
            Complex64::from_polar(1.0, total)
        })
        .sum()
}

/// Passive RIS reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionModel {
    pub m_elements: u64,
    pub beta_attenuation: f64,
    pub phase: PhaseResolution,
    /// Element spacing in meters; only the quantization study uses it.
    pub element_spacing: f64,
}

impl ReflectionModel {
    pub fn new(m_elements: u64, beta_attenuation: f64, phase: PhaseResolution) -> Result<Self> {
        let model = Self {
            m_elements,
            beta_attenuation,
            phase,
            element_spacing: 0.5 * SPEED_OF_LIGHT / 28e9,
        };
        model.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if self.m_elements == 0 {
            return Err(Error::Parameter {
                name: "m_elements",
                value: 0.0,
                reason: "RIS needs at least one element",
            });
        }
        if !(self.beta_attenuation > 0.0 && self.beta_attenuation <= 1.0) {
            return Err(Error::Parameter {
                name: "beta",
                value: self.beta_attenuation,
                reason: "attenuation factor must lie in (0, 1]",
            });
        }
        positive("element_spacing", self.element_spacing)?;
        self.phase.validate()?;
        Ok(self)
    }

    /// `M^2 beta eta`, the coherent power gain including quantization loss.
    pub fn coherent_gain(&self) -> f64 {
        let m = self.m_elements as f64;
        m * m * self.beta_attenuation * self.phase.expected_efficiency(self.m_elements)
    }
}

/// Peak power `M^2 beta (P_s / 2) f1 r1^-alpha` reflected by the engaged RIS.
pub fn peak_reflection_power(
    model: &ReflectionModel,
    p_s: f64,
    fade_f1: f64,
    r1: f64,
    alpha: f64,
) -> Result<f64> {
    let loss = path_loss(r1, alpha)?;
    Ok(model.coherent_gain() * (0.5 * p_s) * fade_f1 * loss)
}

/// `E{(P_RIS / mu)^(2/alpha)} = [M^2 beta P_s / (2 mu^2)]^(2/alpha)
/// Gamma(2/alpha + 1) F_R`, with `F_R` the floored `E{r1^-2}`.
pub fn reflected_power_raw_moment(
    lambda_bs: f64,
    lambda_ris: f64,
    model: &ReflectionModel,
    p_s: f64,
    mu: f64,
    alpha: f64,
    epsilon_floor: f64,
) -> Result<f64> {
    let f_r = geometry::expected_inv_r1_squared(lambda_bs, lambda_ris, epsilon_floor)?;
    reflected_power_raw_moment_from(f_r, model, p_s, mu, alpha)
}

/// [`reflected_power_raw_moment`] for a precomputed `F_R`.
pub fn reflected_power_raw_moment_from(
    f_r: f64,
    model: &ReflectionModel,
    p_s: f64,
    mu: f64,
    alpha: f64,
) -> Result<f64> {
    positive("p_s", p_s)?;
    positive("mu", mu)?;
    path_loss_exponent(alpha)?;
    let s = 2.0 / alpha;
    let scale = model.coherent_gain() * p_s / (2.0 * mu * mu);
    Ok(scale.powf(s) * gamma(s + 1.0) * f_r)
}

/// Average peak reflected power `M^2 beta P_s / (2 mu) E{r1^-alpha}`.
pub fn mean_reflected_power(
    lambda_bs: f64,
    lambda_ris: f64,
    model: &ReflectionModel,
    p_s: f64,
    mu: f64,
    alpha: f64,
    epsilon_floor: f64,
) -> Result<f64> {
    positive("p_s", p_s)?;
    positive("mu", mu)?;
    path_loss_exponent(alpha)?;
    let moment = geometry::expected_r1_neg_power(lambda_bs, lambda_ris, alpha, epsilon_floor)?;
    Ok(model.coherent_gain() * p_s / (2.0 * mu) * moment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss(1.0, 4.0).unwrap(), 1.0);
        assert!((path_loss(10.0, 4.0).unwrap() - 1e-4).abs() < 1e-18);
        let ratio = path_loss(5.0, 4.0).unwrap() / path_loss(10.0, 4.0).unwrap();
        assert!((ratio - 16.0).abs() < 1e-12);
        assert!(matches!(path_loss(0.0, 4.0), Err(Error::Domain { .. })));
        assert!(path_loss(1.0, 2.0).is_err());
    }

    #[test]
    fn interferer_intensity_examples() {
        let single = BeamModel::new(16, BeamMode::SingleBeam).unwrap();
        let split = BeamModel::new(16, BeamMode::SplitBeam).unwrap();
        assert!((interferer_intensity(1.0, &single).unwrap() - 0.25).abs() < 1e-15);
        assert!((interferer_intensity(1.0, &split).unwrap() - 0.125f64.sqrt()).abs() < 1e-15);
        let iso = BeamModel::new(1, BeamMode::SingleBeam).unwrap();
        assert_eq!(interferer_intensity(3.0, &iso).unwrap(), 3.0);
        assert!(BeamModel::new(0, BeamMode::SingleBeam).is_err());
    }

    #[test]
    fn split_beam_is_wider_and_carries_half_power() {
        let single = BeamModel::new(16, BeamMode::SingleBeam).unwrap();
        let split = BeamModel::new(16, BeamMode::SplitBeam).unwrap();
        assert!((single.beamwidth() - PI / 2.0).abs() < 1e-15);
        assert!((split.beamwidth() / single.beamwidth() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(split.per_beam_power(2.0), 1.0);
        assert_eq!(BeamModel::new(1, BeamMode::SplitBeam).unwrap().retention_probability(), 1.0);
    }

    #[test]
    fn conversion_examples() {
        let id = power_density_convert(3e-5, 2.0, 2.0, 4.0).unwrap();
        assert_eq!(id.converted_intensity, 3e-5);
        let x4 = power_density_convert(1.0, 16.0, 1.0, 4.0).unwrap();
        assert!((x4.converted_intensity - 4.0).abs() < 1e-15);
        let composed = power_density_convert(2e-5, 3.0, 1.0, 3.5).unwrap().then(5.0).unwrap();
        let once = power_density_convert(2e-5, 15.0, 1.0, 3.5).unwrap();
        assert!((composed.converted_intensity - once.converted_intensity).abs() < 1e-15 * once.converted_intensity);
        assert_eq!(composed.power, 15.0);
    }

    #[test]
    fn fade_moment_values() {
        assert!((fade_moment(1.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((fade_moment(1.0, 4.0).unwrap() - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn quantizer_levels() {
        let one = PhaseResolution::Bits(1);
        assert_eq!(one.quantize(0.1), 0.0);
        assert_eq!(one.quantize(PI - 0.1), PI);
        assert_eq!(one.quantize(2.0 * PI - 0.1), 0.0);
        assert_eq!(one.quantize(-0.1), 0.0);
        assert!(PhaseResolution::Bits(0).validate().is_err());
    }

    #[test]
    fn ideal_array_gain_is_m_squared() {
        let g = ArrayGeometry::half_wavelength(28e9, 0.7, 50.0);
        for m in [1usize, 10, 100] {
            let af = array_factor(&g.ideal_compensation(m), &g, PhaseResolution::Ideal);
            assert_eq!(af.norm_sqr(), (m * m) as f64);
        }
        let single = array_factor(&[1.234e-10], &g, PhaseResolution::Bits(1));
        assert!((single.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expected_efficiency_is_monotone_in_bits() {
        let mut prev = 0.0;
        for b in 1..=8 {
            let e = PhaseResolution::Bits(b).expected_efficiency(100);
            assert!(e > prev && e < 1.0);
            prev = e;
        }
        assert_eq!(PhaseResolution::Ideal.expected_efficiency(100), 1.0);
        assert!((PhaseResolution::Bits(1).expected_efficiency(100) - (2.0 / PI).powi(2)).abs() < 0.01);
    }

    #[test]
    fn peak_reflection_examples() {
        let m = ReflectionModel::new(100, 0.9, PhaseResolution::Ideal).unwrap();
        let p = peak_reflection_power(&m, 2.0, 1.0, 10.0, 4.0).unwrap();
        assert!((p - 0.9).abs() < 1e-12);
        let unit = ReflectionModel::new(1, 1.0, PhaseResolution::Ideal).unwrap();
        assert_eq!(peak_reflection_power(&unit, 3.0, 1.0, 1.0, 4.0).unwrap(), 1.5);
        let m2 = ReflectionModel { m_elements: 200, ..m };
        let p2 = peak_reflection_power(&m2, 2.0, 0.37, 13.0, 3.3).unwrap();
        let p1 = peak_reflection_power(&m, 2.0, 0.37, 13.0, 3.3).unwrap();
        assert_eq!(p2, 4.0 * p1);
        assert!(ReflectionModel::new(10, 1.5, PhaseResolution::Ideal).is_err());
    }

    #[test]
    fn peak_reflection_scaling_laws() {
        let m = ReflectionModel::new(64, 0.8, PhaseResolution::Ideal).unwrap();
        let base = peak_reflection_power(&m, 2.0, 0.5, 20.0, 3.0).unwrap();
        let f2 = peak_reflection_power(&m, 2.0, 1.0, 20.0, 3.0).unwrap();
        assert!((f2 / base - 2.0).abs() < 1e-14);
        let half_beta = ReflectionModel { beta_attenuation: 0.4, ..m };
        let b = peak_reflection_power(&half_beta, 2.0, 0.5, 20.0, 3.0).unwrap();
        assert!((base / b - 2.0).abs() < 1e-14);
        let far = peak_reflection_power(&m, 2.0, 0.5, 60.0, 3.0).unwrap();
        assert!((base / far - 27.0).abs() < 1e-12);
    }
}
