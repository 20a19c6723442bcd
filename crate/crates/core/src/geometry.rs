//! Poisson point processes on a disc and the distance laws of the
//! BS / RIS / UE triangle.
//!
//! All lengths are meters and all intensities are points per m². The typical
//! UE sits at the origin. `r0` is the UE to serving-BS distance, `r2` the UE to
//! nearest-RIS distance and `r1` the serving-BS to RIS distance.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::quadrature::{Nested, Quadrature};

/// Probability mass of each Rayleigh factor discarded by the distance
/// quadratures.
pub const TAIL_MASS: f64 = 1e-6;

/// Expected point count the default sampling window must reach.
pub const MIN_EXPECTED_POINTS: f64 = 2000.0;

/// Redraws allowed before an empty process is reported.
pub const MAX_REDRAWS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// One realization of a homogeneous PPP restricted to a disc around the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
    intensity: f64,
    window_radius: f64,
}

impl PointSet {
    pub fn new(points: Vec<Point>, intensity: f64, window_radius: f64) -> Result<Self> {
        positive("intensity", intensity)?;
        positive("window_radius", window_radius)?;
        if let Some(p) = points
            .iter()
            .find(|p| !(p.norm() <= window_radius * (1.0 + 1e-12)))
        {
            return Err(Error::Domain {
                quantity: "point radius",
                value: p.norm(),
                lo: 0.0,
                hi: window_radius,
            });
        }
        Ok(Self {
            points,
            intensity,
            window_radius,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }
}

/// Sampling radius: the larger of ten mean nearest-neighbour distances and the
/// radius holding [`MIN_EXPECTED_POINTS`] points on average.
pub fn default_window_radius(intensity: f64) -> Result<f64> {
    positive("intensity", intensity)?;
    let by_spacing = 10.0 / (2.0 * intensity.sqrt());
    let by_count = (MIN_EXPECTED_POINTS / (PI * intensity)).sqrt();
    Ok(by_spacing.max(by_count))
}

/// Draws a homogeneous PPP of the given intensity on the disc of radius
/// `window_radius` centred at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<PointSet> {
    positive("intensity", intensity)?;
    positive("window_radius", window_radius)?;
    let mean = intensity * PI * window_radius * window_radius;
    let count = Poisson::new(mean)
        .map_err(|_| Error::Parameter {
            name: "intensity",
            value: intensity,
            reason: "expected point count is not a valid Poisson mean",
        })?
        .sample(rng) as usize;
    // rejection from the bounding square: uniform on the disc without trig
    let r2 = window_radius * window_radius;
    let points = (0..count)
        .map(|_| loop {
            let x = window_radius * (2.0 * rng.random::<f64>() - 1.0);
            let y = window_radius * (2.0 * rng.random::<f64>() - 1.0);
            if x * x + y * y <= r2 {
                break Point::new(x, y);
            }
        })
        .collect();
    Ok(PointSet {
        points,
        intensity,
        window_radius,
    })
}

/// [`sample_ppp`] with up to [`MAX_REDRAWS`] redraws of an empty realization.
pub fn sample_nonempty_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<PointSet> {
    for _ in 0..MAX_REDRAWS {
        let set = sample_ppp(intensity, window_radius, rng)?;
        if !set.is_empty() {
            return Ok(set);
        }
    }
    Err(Error::EmptyScenario {
        attempts: MAX_REDRAWS,
        trial: None,
    })
}

/// Index and distance of the point closest to `origin`; ties go to the lowest
/// index.
pub fn nearest(points: &PointSet, origin: Point) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.points.iter().enumerate() {
        let dx = p.x - origin.x;
        let dy = p.y - origin.y;
        let d2 = dx * dx + dy * dy;
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt())).ok_or(Error::EmptyScenario {
        attempts: 1,
        trial: None,
    })
}

pub fn nearest_distance(points: &PointSet, origin: Point) -> Result<f64> {
    nearest(points, origin).map(|(_, d)| d)
}

/// Nearest-point distance density of a PPP of intensity `lambda`.
pub fn rayleigh_pdf(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda * r * (-lambda * PI * r * r).exp()
}

pub fn rayleigh_cdf(r: f64, lambda: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-lambda * PI * r * r).exp_m1()
}

/// Radius below which a nearest-point distance falls with probability `p`.
pub fn rayleigh_quantile(p: f64, lambda: f64) -> f64 {
    (-(-p).ln_1p() / (PI * lambda)).sqrt()
}

fn truncation_radius(lambda: f64) -> f64 {
    rayleigh_quantile(1.0 - TAIL_MASS, lambda)
}

/// Density of the UE to serving-BS distance.
pub fn pdf_r0(r: f64, lambda_bs: f64) -> f64 {
    rayleigh_pdf(r, lambda_bs)
}

/// Density of the UE to nearest-RIS distance.
pub fn pdf_r2(r: f64, lambda_ris: f64) -> f64 {
    rayleigh_pdf(r, lambda_ris)
}

/// Density of `r2` given that the nearest RIS is closer than the serving BS.
pub fn pdf_r2_given_closer(r: f64, lambda_ris: f64, lambda_bs: f64) -> f64 {
    rayleigh_pdf(r, lambda_ris + lambda_bs)
}

/// `Pr(r2 < r0)`: probability that the UE has an engaged RIS.
pub fn prob_ris_closer(lambda_bs: f64, lambda_ris: f64) -> f64 {
    lambda_ris / (lambda_bs + lambda_ris)
}

/// Density of `r1` given `r0` and `r2`, from a uniformly oriented RIS on the
/// circle of radius `r2` around the UE.
pub fn pdf_r1_conditional(r1: f64, r0: f64, r2: f64) -> Result<f64> {
    positive("r0", r0)?;
    positive("r2", r2)?;
    let lo = (r0 - r2).abs();
    let hi = r0 + r2;
    if !(r1 >= lo && r1 <= hi) {
        return Err(Error::Domain {
            quantity: "r1",
            value: r1,
            lo,
            hi,
        });
    }
    if r1 == lo || r1 == hi {
        return Err(Error::SingularPoint { at: r1 });
    }
    // 1 - cos^2 written as a product of the support gaps for accuracy near the edges
    let gap = (r1 * r1 - lo * lo) * (hi * hi - r1 * r1);
    Ok(2.0 * r1 / (PI * gap.sqrt()))
}

/// Conditional CDF `Pr(r1 < R | r0, r2) = theta / pi`.
pub fn cdf_r1_conditional(r: f64, r0: f64, r2: f64) -> f64 {
    let lo = (r0 - r2).abs();
    let hi = r0 + r2;
    if r <= lo {
        0.0
    } else if r >= hi {
        1.0
    } else {
        let c = (r0 * r0 + r2 * r2 - r * r) / (2.0 * r0 * r2);
        c.clamp(-1.0, 1.0).acos() / PI
    }
}

/// Whether the `r1` marginal averages over every drop or only over drops
/// where the RIS is closer than the serving BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum R1Conditioning {
    #[default]
    Unconditional,
    Engaged,
}

fn inner_tol() -> Quadrature {
    Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-9,
        max_intervals: 400,
    }
}

fn outer_tol() -> Quadrature {
    Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_intervals: 1000,
    }
}

/// Marginal density of `r1`, unconditional over the engagement event.
pub fn pdf_r1_marginal(r1: f64, lambda_bs: f64, lambda_ris: f64) -> Result<f64> {
    pdf_r1_marginal_with(r1, lambda_bs, lambda_ris, R1Conditioning::Unconditional)
}

/// Marginal density of `r1`.
///
/// For each `r0` the admissible `r2` interval `(|r0 - r1|, r0 + r1)` is
/// parametrised as `r2 = c + h cos(phi)`, which absorbs the inverse square-root
/// edge singularities of the conditional density. The outer `r0` range is
/// clipped to where the truncated `r2` factor can contribute.
pub fn pdf_r1_marginal_with(
    r1: f64,
    lambda_bs: f64,
    lambda_ris: f64,
    conditioning: R1Conditioning,
) -> Result<f64> {
    positive("lambda_bs", lambda_bs)?;
    positive("lambda_ris", lambda_ris)?;
    if !(r1 > 0.0) {
        return Ok(0.0);
    }
    let r0_max = truncation_radius(lambda_bs);
    let r2_max = truncation_radius(lambda_ris);
    let lo = (r1 - r2_max).max(0.0);
    let hi = r0_max.min(r1 + r2_max);
    if lo >= hi {
        return Ok(0.0);
    }
    let nested = Nested::new();
    let inner_q = inner_tol();
    let inner = |r0: f64| -> f64 {
        let a = (r0 - r1).abs();
        let b = r0 + r1;
        let centre = r0.max(r1);
        let half = r0.min(r1);
        let mut cap = b.min(r2_max);
        if conditioning == R1Conditioning::Engaged {
            cap = cap.min(r0);
        }
        if cap <= a || half <= 0.0 {
            return 0.0;
        }
        let phi_lo = if cap >= b {
            0.0
        } else {
            ((cap - centre) / half).clamp(-1.0, 1.0).acos()
        };
        let integrand = |phi: f64| {
            let r2 = centre + half * phi.cos();
            if r2 <= 0.0 {
                return 0.0;
            }
            2.0 * r1 * pdf_r2(r2, lambda_ris) / (PI * ((r2 + a) * (r2 + b)).sqrt())
        };
        nested.value(inner_q.integrate(integrand, phi_lo, PI))
    };
    let mut breaks = vec![lo];
    if r1 > lo && r1 < hi {
        breaks.push(r1);
    }
    breaks.push(hi);
    let outer = outer_tol().integrate_with_breaks(|r0| pdf_r0(r0, lambda_bs) * inner(r0), &breaks);
    let value = nested.finish(outer)?.value;
    Ok(match conditioning {
        R1Conditioning::Unconditional => value,
        R1Conditioning::Engaged => value / prob_ris_closer(lambda_bs, lambda_ris),
    })
}

/// Average of `inner(r0, r2)` over independent Rayleigh `r0` and `r2`.
/// `extra_breaks` adds `r2` break points for a given `r0`.
fn average_over_pair<I, B>(
    lambda_bs: f64,
    lambda_ris: f64,
    conditioning: R1Conditioning,
    inner: I,
    extra_breaks: B,
    outer_q: Quadrature,
) -> Result<f64>
where
    I: Fn(f64, f64) -> f64,
    B: Fn(f64) -> Vec<f64>,
{
    positive("lambda_bs", lambda_bs)?;
    positive("lambda_ris", lambda_ris)?;
    let r0_max = truncation_radius(lambda_bs);
    let r2_max = truncation_radius(lambda_ris);
    let nested = Nested::new();
    let middle_q = Quadrature {
        rel_tol: outer_q.rel_tol * 0.1,
        ..outer_q
    };
    let middle = |r0: f64| -> f64 {
        let cap = match conditioning {
            R1Conditioning::Unconditional => r2_max,
            R1Conditioning::Engaged => r2_max.min(r0),
        };
        if cap <= 0.0 {
            return 0.0;
        }
        let mut pts = vec![0.0];
        pts.extend(extra_breaks(r0).into_iter().filter(|&x| x > 0.0 && x < cap));
        if r0 < cap {
            pts.push(r0);
        }
        pts.push(cap);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        nested.value(
            middle_q.integrate_with_breaks(|r2| pdf_r2(r2, lambda_ris) * inner(r0, r2), &pts),
        )
    };
    let mut outer_breaks = vec![0.0];
    if r2_max < r0_max {
        outer_breaks.push(r2_max);
    }
    outer_breaks.push(r0_max);
    let outer = outer_q.integrate_with_breaks(|r0| pdf_r0(r0, lambda_bs) * middle(r0), &outer_breaks);
    let value = nested.finish(outer)?.value;
    Ok(match conditioning {
        R1Conditioning::Unconditional => value,
        R1Conditioning::Engaged => value / prob_ris_closer(lambda_bs, lambda_ris),
    })
}

/// Lower angular limit `theta_eps` at which `r1(theta) = eps`, or `None` when
/// the whole circle lies beyond `eps`. Returns `Some(PI)` if none of it does.
fn floor_angle(r0: f64, r2: f64, eps: f64) -> Option<f64> {
    let d = (r0 - r2).abs();
    let s = r0 + r2;
    if d >= eps {
        None
    } else if s <= eps {
        Some(PI)
    } else {
        let t = ((eps * eps - d * d) / (s * s - eps * eps)).sqrt();
        Some(2.0 * t.atan())
    }
}

fn r1_at(r0: f64, r2: f64, theta: f64) -> f64 {
    (r0 * r0 + r2 * r2 - 2.0 * r0 * r2 * theta.cos()).max(0.0).sqrt()
}

/// `E{r1}` from the triple integral over `r0`, `r2` and the RIS angle.
pub fn expected_r1(lambda_bs: f64, lambda_ris: f64) -> Result<f64> {
    expected_r1_with(lambda_bs, lambda_ris, R1Conditioning::Unconditional)
}

pub fn expected_r1_with(
    lambda_bs: f64,
    lambda_ris: f64,
    conditioning: R1Conditioning,
) -> Result<f64> {
    let nested = Nested::new();
    let q = Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_intervals: 200,
    };
    let inner = |r0: f64, r2: f64| {
        nested.value(q.integrate(|th| r1_at(r0, r2, th), 0.0, PI)) / PI
    };
    let v = average_over_pair(lambda_bs, lambda_ris, conditioning, inner, |_| Vec::new(), Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-6,
        max_intervals: 500,
    });
    nested.finish(Ok(crate::quadrature::Integral {
        value: v?,
        abs_error: 0.0,
        evaluations: 0,
    }))
    .map(|i| i.value)
}

/// `E{r1^-2 ; r1 >= eps}` given `r0`, `r2`, using the closed-form angular
/// antiderivative of `1 / (A - B cos theta)`.
fn inv_square_given(r0: f64, r2: f64, eps: f64) -> f64 {
    let d = (r0 - r2).abs();
    let s = r0 + r2;
    match floor_angle(r0, r2, eps) {
        None => 1.0 / (d * s),
        Some(th) if th >= PI => 0.0,
        Some(th) => {
            let t = (0.5 * th).tan();
            // (2 / pi) * (pi/2 - atan(k t)) / (d s), with k = s / d
            if d <= 1e-12 * s {
                2.0 / (PI * s * s * t)
            } else {
                2.0 * d.atan2(s * t) / (PI * s * d)
            }
        }
    }
}

fn floor_breaks(r0: f64, eps: f64) -> Vec<f64> {
    vec![r0 - eps, r0 + eps]
}

/// `F_R = E{r1^-2}` with the integration floor `max(|r0 - r2|, eps)`.
pub fn expected_inv_r1_squared(lambda_bs: f64, lambda_ris: f64, epsilon_floor: f64) -> Result<f64> {
    expected_inv_r1_squared_with(lambda_bs, lambda_ris, epsilon_floor, R1Conditioning::Unconditional)
}

pub fn expected_inv_r1_squared_with(
    lambda_bs: f64,
    lambda_ris: f64,
    epsilon_floor: f64,
    conditioning: R1Conditioning,
) -> Result<f64> {
    positive("epsilon_floor", epsilon_floor)?;
    average_over_pair(
        lambda_bs,
        lambda_ris,
        conditioning,
        |r0, r2| inv_square_given(r0, r2, epsilon_floor),
        |r0| floor_breaks(r0, epsilon_floor),
        Quadrature {
            abs_tol: 1e-300,
            rel_tol: 1e-7,
            max_intervals: 1000,
        },
    )
}

/// `E{r1^-p}` over `r1 >= max(|r0 - r2|, eps)`.
pub fn expected_r1_neg_power(
    lambda_bs: f64,
    lambda_ris: f64,
    power: f64,
    epsilon_floor: f64,
) -> Result<f64> {
    positive("power", power)?;
    positive("epsilon_floor", epsilon_floor)?;
    let nested = Nested::new();
    let q = Quadrature {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_intervals: 400,
    };
    let inner = |r0: f64, r2: f64| {
        let lo = floor_angle(r0, r2, epsilon_floor).unwrap_or(0.0);
        if lo >= PI {
            return 0.0;
        }
        // the integrand peaks at the lower limit; split its first decade
        let split = (lo + 8.0 * ((r0 - r2).abs().max(epsilon_floor) / (r0 * r2).max(1e-300).sqrt()))
            .min(PI);
        nested.value(q.integrate_with_breaks(
            |th| r1_at(r0, r2, th).powf(-power),
            &[lo, split, PI],
        )) / PI
    };
    let v = average_over_pair(
        lambda_bs,
        lambda_ris,
        R1Conditioning::Unconditional,
        inner,
        |r0| floor_breaks(r0, epsilon_floor),
        Quadrature {
            abs_tol: 1e-300,
            rel_tol: 1e-6,
            max_intervals: 1000,
        },
    )?;
    nested
        .finish(Ok(crate::quadrature::Integral {
            value: v,
            abs_error: 0.0,
            evaluations: 0,
        }))
        .map(|i| i.value)
}

/// Analytic distance distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceLaw {
    R0 { lambda_bs: f64 },
    R2 { lambda_ris: f64 },
    R2GivenCloser { lambda_ris: f64, lambda_bs: f64 },
    R1Conditional { r0: f64, r2: f64 },
    R1Marginal {
        lambda_bs: f64,
        lambda_ris: f64,
        conditioning: R1Conditioning,
    },
}

impl DistanceLaw {
    fn rayleigh_intensity(&self) -> Option<f64> {
        match *self {
            DistanceLaw::R0 { lambda_bs } => Some(lambda_bs),
            DistanceLaw::R2 { lambda_ris } => Some(lambda_ris),
            DistanceLaw::R2GivenCloser {
                lambda_ris,
                lambda_bs,
            } => Some(lambda_ris + lambda_bs),
            _ => None,
        }
    }

    /// Closed support interval (upper bound may be infinite).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DistanceLaw::R1Conditional { r0, r2 } => ((r0 - r2).abs(), r0 + r2),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Density, zero-extended outside the support. The conditional `r1` law
    /// returns `+inf` at its two integrable edge singularities.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if let Some(l) = self.rayleigh_intensity() {
            positive("lambda", l)?;
            return Ok(rayleigh_pdf(x, l));
        }
        match *self {
            DistanceLaw::R1Conditional { r0, r2 } => match pdf_r1_conditional(x, r0, r2) {
                Ok(v) => Ok(v),
                Err(Error::Domain { .. }) => Ok(0.0),
                Err(Error::SingularPoint { .. }) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            },
            DistanceLaw::R1Marginal {
                lambda_bs,
                lambda_ris,
                conditioning,
            } => pdf_r1_marginal_with(x, lambda_bs, lambda_ris, conditioning),
            _ => unreachable!(),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if let Some(l) = self.rayleigh_intensity() {
            positive("lambda", l)?;
            return Ok(rayleigh_cdf(x, l));
        }
        match *self {
            DistanceLaw::R1Conditional { r0, r2 } => {
                positive("r0", r0)?;
                positive("r2", r2)?;
                Ok(cdf_r1_conditional(x, r0, r2))
            }
            DistanceLaw::R1Marginal {
                lambda_bs,
                lambda_ris,
                conditioning,
            } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                average_over_pair(
                    lambda_bs,
                    lambda_ris,
                    conditioning,
                    |r0, r2| cdf_r1_conditional(x, r0, r2),
                    |r0| vec![(r0 - x).abs(), r0 + x],
                    Quadrature {
                        abs_tol: 1e-300,
                        rel_tol: 1e-8,
                        max_intervals: 1000,
                    },
                )
            }
            _ => unreachable!(),
        }
    }

    pub fn mean(&self) -> Result<f64> {
        if let Some(l) = self.rayleigh_intensity() {
            positive("lambda", l)?;
            return Ok(0.5 / l.sqrt());
        }
        match *self {
            DistanceLaw::R1Conditional { r0, r2 } => {
                positive("r0", r0)?;
                positive("r2", r2)?;
                Quadrature::default()
                    .integrate(|th| r1_at(r0, r2, th), 0.0, PI)
                    .map(|i| i.value / PI)
            }
            DistanceLaw::R1Marginal {
                lambda_bs,
                lambda_ris,
                conditioning,
            } => expected_r1_with(lambda_bs, lambda_ris, conditioning),
            _ => unreachable!(),
        }
    }
}
