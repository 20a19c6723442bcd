//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with its embedded 7-point Gauss rule is applied on
//! each subinterval; the interval with the largest error estimate is bisected
//! until the global estimate meets `max(abs_tol, rel_tol * |I|)`. Nodes are
//! strictly interior, so integrable endpoint singularities are never sampled.
//!
//! Semi-infinite ranges `[a, inf)` are mapped onto `[0, 1)` with
//! `u = a + t / (1 - t)`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// A converged integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Tolerances and work limits for [`integrate`](Quadrature::integrate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Segment {
        a,
        b,
        value: result,
        error,
    }
}

impl Quadrature {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, seeding the adaptive
    /// partition with the interior break points (kinks, peaks, support edges).
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<Integral> {
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(kronrod15(&mut f, w[0], w[1]));
                evaluations += 15;
            }
        }
        let mut frozen_value = 0.0;
        let mut frozen_error = 0.0;
        let totals = |heap: &BinaryHeap<Segment>, fv: f64, fe: f64| {
            heap.iter()
                .fold((fv, fe), |(v, e), s| (v + s.value, e + s.error))
        };
        loop {
            let (value, error) = totals(&heap, frozen_value, frozen_error);
            let target = self.target(value);
            if error <= target || heap.is_empty() {
                if error <= target {
                    return Ok(Integral {
                        value,
                        abs_error: error,
                        evaluations,
                    });
                }
                return Err(Error::Numerical {
                    estimate: value,
                    achieved: error,
                    requested: target,
                });
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::Numerical {
                    estimate: value,
                    achieved: error,
                    requested: target,
                });
            }
            let worst = heap.pop().expect("heap is non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b)
                || (worst.b - worst.a) <= 1000.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
            {
                frozen_value += worst.value;
                frozen_error += worst.error;
                continue;
            }
            heap.push(kronrod15(&mut f, worst.a, mid));
            heap.push(kronrod15(&mut f, mid, worst.b));
            evaluations += 30;
        }
    }

    /// Integrates `f` over `[a, b]` through `x = c - h cos(t)`, which turns
    /// inverse square-root singularities at either endpoint into a smooth
    /// integrand on `(0, pi)`.
    pub fn integrate_edge_singular<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Result<Integral> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.integrate(
            |t| {
                let s = t.sin();
                let v = f(c - h * t.cos()) * h * s;
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            std::f64::consts::PI,
        )
    }

    /// Integrates `f` over `[a, inf)`.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> Result<Integral> {
        self.integrate(
            |t| {
                let s = 1.0 - t;
                let u = a + t / s;
                let v = f(u) / (s * s);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }
}

/// Runs a nested inner integral, recording the first failure so that the
/// outer integrand can stay infallible.
pub(crate) struct Nested {
    failure: std::cell::Cell<Option<Error>>,
}

impl Nested {
    pub(crate) fn new() -> Self {
        Self {
            failure: std::cell::Cell::new(None),
        }
    }

    pub(crate) fn value(&self, r: Result<Integral>) -> f64 {
        match r {
            Ok(i) => i.value,
            Err(e) => {
                let estimate = match &e {
                    Error::Numerical { estimate, .. } => *estimate,
                    _ => f64::NAN,
                };
                let prev = self.failure.take();
                self.failure.set(prev.or(Some(e)));
                estimate
            }
        }
    }

    pub(crate) fn finish(self, outer: Result<Integral>) -> Result<Integral> {
        let outer = outer?;
        match self.failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(outer),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = Quadrature::default();
        let r = q.integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0).unwrap();
        assert!((r.value - (63.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        let q = Quadrature::with_tolerances(1e-10, 1e-10);
        let r = q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn semi_infinite_lorentzian() {
        let q = Quadrature::default();
        let r = q.integrate_to_infinity(|u| 1.0 / (1.0 + u * u), 0.0).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn break_points_resolve_a_kink() {
        let q = Quadrature::default();
        let r = q
            .integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0])
            .unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn exhausting_the_budget_reports_achieved_tolerance() {
        let q = Quadrature {
            abs_tol: 0.0,
            rel_tol: 1e-15,
            max_intervals: 4,
        };
        let err = q.integrate(|x| (1.0 / x).sin(), 1e-6, 1.0).unwrap_err();
        match err {
            Error::Numerical { achieved, requested, .. } => assert!(achieved > requested),
            other => panic!("unexpected {other:?}"),
        }
    }
}
