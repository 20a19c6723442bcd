//! Closed-form SIR coverage probabilities.
//!
//! Thresholds are linear ratios here; dB conversion happens at the CLI.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::channel::{self, PhaseResolution, ReflectionModel};
use crate::error::{path_loss_exponent, positive, Error, Result};
use crate::geometry;
use crate::quadrature::Quadrature;

/// Everything a closed-form coverage expression can depend on. SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageQuery {
    pub threshold_t: f64,
    pub alpha: f64,
    pub n_elements: u64,
    pub lambda_bs: f64,
    pub lambda_ris: f64,
    pub m_elements: u64,
    pub beta: f64,
    pub p_s: f64,
    pub mu: f64,
    pub epsilon_floor: f64,
    pub phase: PhaseResolution,
}

impl Default for CoverageQuery {
    fn default() -> Self {
        Self {
            threshold_t: 1.0,
            alpha: 4.0,
            n_elements: 16,
            lambda_bs: 2.5e-5,
            lambda_ris: 5e-2,
            m_elements: 100,
            beta: 0.9,
            p_s: 2.0,
            mu: 1.0,
            epsilon_floor: 1.0,
            phase: PhaseResolution::Ideal,
        }
    }
}

impl CoverageQuery {
    pub fn with_threshold(self, threshold_t: f64) -> Self {
        Self { threshold_t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        positive("threshold_t", self.threshold_t)?;
        path_loss_exponent(self.alpha)?;
        if self.n_elements == 0 {
            return Err(Error::Parameter {
                name: "n_elements",
                value: 0.0,
                reason: "BS array needs at least one element",
            });
        }
        positive("lambda_bs", self.lambda_bs)?;
        positive("lambda_ris", self.lambda_ris)?;
        positive("p_s", self.p_s)?;
        positive("mu", self.mu)?;
        positive("epsilon_floor", self.epsilon_floor)?;
        self.reflection().map(|_| ())
    }

    pub fn reflection(&self) -> Result<ReflectionModel> {
        ReflectionModel::new(self.m_elements, self.beta, self.phase)
    }

    fn sqrt_n(&self) -> f64 {
        (self.n_elements as f64).sqrt()
    }

    fn split_factor(&self) -> f64 {
        (2.0 / self.n_elements as f64).sqrt()
    }
}

/// `I(T, alpha) = T^(2/alpha) int_{T^(-2/alpha)}^inf du / (1 + u^(alpha/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceIntegral {
    pub value: f64,
    pub abs_tolerance: f64,
}

/// [`interference_factor_quadrature`] with the `alpha = 4` closed form
/// `sqrt(T) atan(sqrt(T))`.
pub fn interference_factor(t: f64, alpha: f64) -> Result<InterferenceIntegral> {
    positive("T", t)?;
    path_loss_exponent(alpha)?;
    if alpha == 4.0 {
        let s = t.sqrt();
        let value = s * s.atan();
        return Ok(InterferenceIntegral {
            value,
            abs_tolerance: 4.0 * f64::EPSILON * value,
        });
    }
    interference_factor_quadrature(t, alpha)
}

/// Adaptive quadrature of `I(T, alpha)` to an absolute tolerance of `1e-9`.
pub fn interference_factor_quadrature(t: f64, alpha: f64) -> Result<InterferenceIntegral> {
    scaled_interference_factor(t, alpha, 1.0)
}

/// `T^(2/alpha) int_{T^(-2/alpha)}^inf rho^alpha / (rho^alpha + u^(alpha/2)) du`.
pub fn scaled_interference_factor(t: f64, alpha: f64, rho: f64) -> Result<InterferenceIntegral> {
    positive("T", t)?;
    path_loss_exponent(alpha)?;
    positive("rho", rho)?;
    let s = 2.0 / alpha;
    let ts = t.powf(s);
    let a = 0.5 * alpha;
    let lower = 1.0 / ts;
    // the integrand is flat below u = rho^2 and decays like u^-a beyond it
    let knee = rho * rho;
    let g = |u: f64| 1.0 / (1.0 + (u / knee).powf(a));
    let q = Quadrature {
        abs_tol: 1e-10 / ts,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    let start = lower.max(knee);
    let mut value = 0.0;
    let mut err = 0.0;
    if lower < knee {
        let head = q.integrate(g, lower, knee)?;
        value += head.value;
        err += head.abs_error;
    }
    // u = start * w^(-1/(a-1)) makes the power-law tail a bounded integrand on (0, 1)
    let k = 1.0 / (a - 1.0);
    let tail = q.integrate(
        |w: f64| {
            let u = start * w.powf(-k);
            let v = g(u) * start * k * w.powf(-k - 1.0);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
    )?;
    value += tail.value;
    err += tail.abs_error;
    Ok(InterferenceIntegral {
        value: ts * value,
        abs_tolerance: ts * err,
    })
}

/// Baseline (no RIS) coverage `1 / (1 + I / sqrt(N))`.
pub fn coverage_baseline(q: &CoverageQuery) -> Result<f64> {
    q.validate()?;
    let i = interference_factor(q.threshold_t, q.alpha)?.value;
    Ok(1.0 / (1.0 + i / q.sqrt_n()))
}

/// Baseline coverage before the common power and density cancel:
/// `lambda~_BS / (lambda~_BS + lambda~_I I)`.
pub fn coverage_baseline_general(q: &CoverageQuery) -> Result<f64> {
    q.validate()?;
    let i = interference_factor(q.threshold_t, q.alpha)?.value;
    let lam_bs = channel::power_density_convert(q.lambda_bs, q.p_s, q.mu, q.alpha)?.converted_intensity;
    let lam_i = channel::power_density_convert(q.lambda_bs / q.sqrt_n(), q.p_s, q.mu, q.alpha)?
        .converted_intensity;
    Ok(lam_bs / (lam_bs + lam_i * i))
}

/// Direct-link coverage with a split beam, `1 / (1 + sqrt(2/N) I)`.
pub fn coverage_path_a(q: &CoverageQuery) -> Result<f64> {
    q.validate()?;
    let i = interference_factor(q.threshold_t, q.alpha)?.value;
    Ok(1.0 / (1.0 + q.split_factor() * i))
}

/// Unit-power equivalent intensities of the reflected path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathBIntensities {
    /// Floored `E{r1^-2}` in 1/m².
    pub f_r: f64,
    pub bs: f64,
    pub interferer: f64,
    pub ris: f64,
    /// `sqrt(lambda~_BS / lambda~_RIS)`.
    pub rho: f64,
}

/// Threshold-independent part of the path-B expressions, computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathB {
    pub query: CoverageQuery,
    pub intensities: PathBIntensities,
}

impl PathB {
    pub fn new(q: &CoverageQuery) -> Result<Self> {
        q.validate()?;
        let f_r = geometry::expected_inv_r1_squared(q.lambda_bs, q.lambda_ris, q.epsilon_floor)?;
        Self::with_f_r(q, f_r)
    }

    /// Builds the intensities from a precomputed `F_R`.
    pub fn with_f_r(q: &CoverageQuery, f_r: f64) -> Result<Self> {
        q.validate()?;
        positive("f_r", f_r)?;
        let half_power = 0.5 * q.p_s;
        let bs = channel::power_density_convert(q.lambda_bs, half_power, q.mu, q.alpha)?;
        let interferer =
            channel::power_density_convert(q.split_factor() * q.lambda_bs, half_power, q.mu, q.alpha)?;
        let moment = channel::reflected_power_raw_moment_from(f_r, &q.reflection()?, q.p_s, q.mu, q.alpha)?;
        let ris = moment * q.lambda_ris;
        Ok(Self {
            query: *q,
            intensities: PathBIntensities {
                f_r,
                bs: bs.converted_intensity,
                interferer: interferer.converted_intensity,
                ris,
                rho: (bs.converted_intensity / ris).sqrt(),
            },
        })
    }

    /// Approximation I, from the `r2 ~ rho r0` substitution.
    pub fn approx1(&self, t: f64) -> Result<f64> {
        let PathBIntensities {
            interferer, ris, rho, ..
        } = self.intensities;
        let scaled = scaled_interference_factor(t, self.query.alpha, rho)?.value;
        Ok(ris / (ris + interferer / (rho * rho) * scaled))
    }

    /// Approximation II, `lambda~_RIS / (lambda~_RIS + lambda~_I I)`.
    pub fn approx2(&self, t: f64) -> Result<f64> {
        let i = interference_factor(t, self.query.alpha)?.value;
        Ok(self.intensities.ris / (self.intensities.ris + self.intensities.interferer * i))
    }

    /// Approximation II written with the density-free factors `F1`, `F2`.
    pub fn restated(&self, t: f64) -> Result<f64> {
        let q = &self.query;
        let s = 2.0 / q.alpha;
        let m = q.m_elements as f64;
        let eta = q.phase.expected_efficiency(q.m_elements);
        let f1 = (q.beta * eta / q.mu).powf(s) * gamma(s + 1.0) * self.intensities.f_r;
        let f2 = interference_factor(t, q.alpha)?.value;
        let num = q.lambda_ris * m.powf(2.0 * s) * f1;
        Ok(num / (num + q.split_factor() * q.lambda_bs * f2))
    }
}

pub fn coverage_path_b_approx1(q: &CoverageQuery) -> Result<f64> {
    PathB::new(q)?.approx1(q.threshold_t)
}

pub fn coverage_path_b_approx2(q: &CoverageQuery) -> Result<f64> {
    PathB::new(q)?.approx2(q.threshold_t)
}

pub fn coverage_path_b_restated(q: &CoverageQuery) -> Result<f64> {
    PathB::new(q)?.restated(q.threshold_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approximation {
    One,
    Two,
}

/// Union of two coverage events treated as independent:
/// `1 - (1 - p_a)(1 - p_b)`.
pub fn independent_selection(p_a: f64, p_b: f64) -> f64 {
    1.0 - (1.0 - p_a) * (1.0 - p_b)
}

/// Selection-diversity coverage under the independence approximation. The
/// two paths share the serving BS and interferers, so this is a reference
/// curve only; the simulator's `gamma_s` is the ground truth.
pub fn coverage_selection(q: &CoverageQuery, approx: Approximation) -> Result<f64> {
    let pa = coverage_path_a(q)?;
    let b = PathB::new(q)?;
    let pb = match approx {
        Approximation::One => b.approx1(q.threshold_t)?,
        Approximation::Two => b.approx2(q.threshold_t)?,
    };
    Ok(independent_selection(pa, pb))
}
