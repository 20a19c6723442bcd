//! Monte Carlo simulator for the typical UE at the origin.
//!
//! Each trial drops independent BS and RIS processes, serves the UE from its
//! nearest BS and evaluates four SIRs: the single-beam baseline `gamma_o`,
//! the split-beam direct link `gamma_a`, the reflected link `gamma_b` through
//! the nearest RIS, and the selection-diversity maximum `gamma_s`.
//!
//! SIRs are evaluated at unit per-beam power. The transmit power cancels from
//! every ratio, so `p_s` only scales reported reflected powers.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::CoverageQuery;
use crate::channel::{self, BeamMode, BeamModel, FadingModel, PhaseResolution, ReflectionModel};
use crate::error::{positive, Error, Result};
use crate::geometry::{self, Point, PointSet};
use crate::rng::{substream, Purpose};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "RISCOV_THREADS";

const CHUNK: u64 = 512;

/// Deployment parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub lambda_bs: f64,
    pub lambda_ris: f64,
    pub p_s: f64,
    pub n_elements: u64,
    pub m_elements: u64,
    pub beta: f64,
    pub mu: f64,
    pub alpha: f64,
    pub epsilon_floor: f64,
    pub phase: PhaseResolution,
}

impl Default for NetworkParams {
    fn default() -> Self {
        let q = CoverageQuery::default();
        Self {
            lambda_bs: q.lambda_bs,
            lambda_ris: q.lambda_ris,
            p_s: q.p_s,
            n_elements: q.n_elements,
            m_elements: q.m_elements,
            beta: q.beta,
            mu: q.mu,
            alpha: q.alpha,
            epsilon_floor: q.epsilon_floor,
            phase: q.phase,
        }
    }
}

impl NetworkParams {
    pub fn query(&self, threshold_t: f64) -> CoverageQuery {
        CoverageQuery {
            threshold_t,
            alpha: self.alpha,
            n_elements: self.n_elements,
            lambda_bs: self.lambda_bs,
            lambda_ris: self.lambda_ris,
            m_elements: self.m_elements,
            beta: self.beta,
            p_s: self.p_s,
            mu: self.mu,
            epsilon_floor: self.epsilon_floor,
            phase: self.phase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.query(1.0).validate()
    }

    pub fn reflection(&self) -> Result<ReflectionModel> {
        ReflectionModel::new(self.m_elements, self.beta, self.phase)
    }

    pub fn fading(&self) -> Result<FadingModel> {
        FadingModel::new(self.mu)
    }
}

/// Which drops have an engaged RIS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathBMode {
    /// Only when the nearest RIS is closer than the serving BS.
    #[default]
    Conditional,
    /// Always through the nearest RIS.
    Unconditional,
}

/// How interfering BSs are found to point a main lobe at the UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Independent thinning with the beam's retention probability.
    #[default]
    Thinning,
    /// Uniform main-lobe direction; retained iff the UE is within half a
    /// beamwidth of boresight.
    Explicit,
}

/// Small-scale fading across the RIS elements on the BS to RIS hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadeSharing {
    /// One exponential gain for the whole surface.
    #[default]
    Shared,
    /// One gain per element, combined coherently in amplitude.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub network: NetworkParams,
    pub n_trials: u64,
    pub master_seed: u64,
    pub path_b: PathBMode,
    pub alignment: Alignment,
    pub ris_fades: FadeSharing,
    /// Sampling radii; `None` uses [`geometry::default_window_radius`].
    pub bs_window: Option<f64>,
    pub ris_window: Option<f64>,
}

impl RunSpec {
    pub fn new(network: NetworkParams, n_trials: u64, master_seed: u64) -> Self {
        Self {
            network,
            n_trials,
            master_seed,
            path_b: PathBMode::default(),
            alignment: Alignment::default(),
            ris_fades: FadeSharing::default(),
            bs_window: None,
            ris_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.n_trials == 0 {
            return Err(Error::Parameter {
                name: "n_trials",
                value: 0.0,
                reason: "at least one trial is required",
            });
        }
        for (name, w) in [("bs_window", self.bs_window), ("ris_window", self.ris_window)] {
            if let Some(w) = w {
                positive(name, w)?;
            }
        }
        Ok(())
    }

    fn windows(&self) -> Result<(f64, f64)> {
        let bs = match self.bs_window {
            Some(w) => w,
            None => geometry::default_window_radius(self.network.lambda_bs)?,
        };
        let ris = match self.ris_window {
            Some(w) => w,
            None => geometry::default_window_radius(self.network.lambda_ris)?,
        };
        Ok((bs, ris))
    }
}

/// One realized drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub trial: u64,
    pub bs_points: PointSet,
    pub ris_points: PointSet,
    pub ue: Point,
    pub serving_bs_index: usize,
    /// UE to BS distances, by BS index.
    pub bs_distances: Vec<f64>,
    pub nearest_ris: Option<(usize, f64)>,
    pub engaged_ris_index: Option<usize>,
    /// BS to UE gains `g_i`, by BS index.
    pub g: Vec<f64>,
    /// Shared BS to RIS gain `f1`.
    pub f1: f64,
    /// RIS to UE gain `h`.
    pub h: f64,
    /// Per-element BS to RIS gains in independent-fade mode.
    pub element_fades: Option<Vec<f64>>,
    /// Interferers retained for the single-beam baseline.
    pub single_mask: Vec<bool>,
    /// Interferers retained for the split beam.
    pub split_mask: Vec<bool>,
}

impl Scenario {
    pub fn r0(&self) -> f64 {
        self.bs_distances[self.serving_bs_index]
    }

    pub fn r2(&self) -> Option<f64> {
        self.nearest_ris.map(|(_, d)| d)
    }

    /// Distance from the serving BS to the nearest RIS.
    pub fn r1(&self) -> Option<f64> {
        self.nearest_ris.map(|(j, _)| {
            self.bs_points.points()[self.serving_bs_index].distance(&self.ris_points.points()[j])
        })
    }

    pub fn is_engaged(&self) -> bool {
        self.engaged_ris_index.is_some()
    }

    /// Effective BS to RIS power gain.
    pub fn f_effective(&self) -> f64 {
        match &self.element_fades {
            None => self.f1,
            Some(f) => {
                let amp = f.iter().map(|x| x.sqrt()).sum::<f64>() / f.len() as f64;
                amp * amp
            }
        }
    }

    /// Fraction of non-serving BSs retained in the given mask.
    pub fn retained_fraction(&self, mask: &[bool]) -> Option<f64> {
        let others = mask.len().saturating_sub(1);
        (others > 0).then(|| mask.iter().filter(|&&m| m).count() as f64 / others as f64)
    }

    /// Peak reflected power at transmit power `p_s`, if a RIS is engaged.
    pub fn reflected_power(&self, model: &ReflectionModel, p_s: f64, alpha: f64) -> Option<f64> {
        self.engaged_ris_index?;
        let r1 = self.r1()?;
        channel::peak_reflection_power(model, p_s, self.f_effective(), r1, alpha).ok()
    }
}

fn tag_trial(e: Error, trial: u64) -> Error {
    match e {
        Error::EmptyScenario { attempts, .. } => Error::EmptyScenario {
            attempts,
            trial: Some(trial),
        },
        other => other,
    }
}

/// Draws trial `trial` of `spec`; a pure function of `(master_seed, trial)`.
pub fn drop_scenario(spec: &RunSpec, trial: u64) -> Result<Scenario> {
    let net = &spec.network;
    let (bs_window, ris_window) = spec.windows()?;
    let seed = spec.master_seed;

    let bs_points = geometry::sample_nonempty_ppp(
        net.lambda_bs,
        bs_window,
        &mut substream(seed, trial, Purpose::BaseStations),
    )
    .map_err(|e| tag_trial(e, trial))?;
    let ris_points =
        geometry::sample_ppp(net.lambda_ris, ris_window, &mut substream(seed, trial, Purpose::Surfaces))?;

    let (serving, _) = geometry::nearest(&bs_points, Point::ORIGIN).map_err(|e| tag_trial(e, trial))?;
    let bs_distances: Vec<f64> = bs_points.points().iter().map(Point::norm).collect();
    let r0 = bs_distances[serving];
    let nearest_ris = geometry::nearest(&ris_points, Point::ORIGIN).ok();
    let engaged_ris_index = match (spec.path_b, nearest_ris) {
        (PathBMode::Conditional, Some((j, r2))) if r2 < r0 => Some(j),
        (PathBMode::Unconditional, Some((j, _))) => Some(j),
        _ => None,
    };

    let exp = net.fading()?.sampler();
    let mut fade_rng = substream(seed, trial, Purpose::Fading);
    let g: Vec<f64> = (0..bs_points.len()).map(|_| exp.sample(&mut fade_rng)).collect();
    let f1 = exp.sample(&mut fade_rng);
    let h = exp.sample(&mut fade_rng);
    let element_fades = match spec.ris_fades {
        FadeSharing::Shared => None,
        FadeSharing::Independent => {
            Some((0..net.m_elements).map(|_| exp.sample(&mut fade_rng)).collect())
        }
    };

    let single = BeamModel::new(net.n_elements, BeamMode::SingleBeam)?;
    let split = BeamModel::new(net.n_elements, BeamMode::SplitBeam)?;
    let mut align_rng = substream(seed, trial, Purpose::Alignment);
    let mut single_mask = Vec::with_capacity(bs_points.len());
    let mut split_mask = Vec::with_capacity(bs_points.len());
    match spec.alignment {
        Alignment::Thinning => {
            let (ps, pa) = (single.retention_probability(), split.retention_probability());
            for _ in 0..bs_points.len() {
                let u: f64 = align_rng.random();
                single_mask.push(u < ps);
                split_mask.push(u < pa);
            }
        }
        Alignment::Explicit => {
            let (hs, ha) = (0.5 * single.beamwidth(), 0.5 * split.beamwidth());
            for _ in 0..bs_points.len() {
                let offset = PI * (2.0 * align_rng.random::<f64>() - 1.0);
                single_mask.push(offset.abs() <= hs);
                split_mask.push(offset.abs() <= ha);
            }
        }
    }
    single_mask[serving] = false;
    split_mask[serving] = false;

    Ok(Scenario {
        trial,
        bs_points,
        ris_points,
        ue: Point::ORIGIN,
        serving_bs_index: serving,
        bs_distances,
        nearest_ris,
        engaged_ris_index,
        g,
        f1,
        h,
        element_fades,
        single_mask,
        split_mask,
    })
}

/// `signal / interference`, with `+inf` for an empty interferer set.
pub fn sir(signal: f64, interference: f64) -> f64 {
    if interference > 0.0 {
        signal / interference
    } else {
        f64::INFINITY
    }
}

fn power_law(r: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let r2 = r * r;
        1.0 / (r2 * r2)
    } else {
        r.powf(-alpha)
    }
}

fn interference(s: &Scenario, mask: &[bool], alpha: f64) -> f64 {
    s.bs_distances
        .iter()
        .zip(&s.g)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((&r, &g), _)| g * power_law(r, alpha))
        .sum()
}

/// Single-beam and split-beam interference in one pass; the split set
/// contains the single-beam set under both alignment models.
fn interference_pair(s: &Scenario, alpha: f64) -> (f64, f64) {
    let (mut single, mut split) = (0.0, 0.0);
    for i in 0..s.g.len() {
        if s.split_mask[i] {
            let w = s.g[i] * power_law(s.bs_distances[i], alpha);
            split += w;
            if s.single_mask[i] {
                single += w;
            }
        } else if s.single_mask[i] {
            single += s.g[i] * power_law(s.bs_distances[i], alpha);
        }
    }
    (single, split)
}

fn direct_signal(s: &Scenario, alpha: f64) -> f64 {
    s.g[s.serving_bs_index] * power_law(s.r0(), alpha)
}

fn reflected_signal(s: &Scenario, alpha: f64, reflection: &ReflectionModel) -> Option<f64> {
    let j = s.engaged_ris_index?;
    let ris = s.ris_points.points()[j];
    let r2 = ris.norm();
    let r1 = s.bs_points.points()[s.serving_bs_index].distance(&ris);
    // unit per-beam transmit power
    let p_ris = channel::peak_reflection_power(reflection, 2.0, s.f_effective(), r1, alpha)
        .unwrap_or(f64::INFINITY);
    Some(p_ris * s.h * power_law(r2, alpha))
}

/// Single-beam SIR `g0 r0^-a / sum g_i r_i^-a` over single-beam interferers.
pub fn sir_baseline(s: &Scenario, alpha: f64) -> f64 {
    sir(direct_signal(s, alpha), interference(s, &s.single_mask, alpha))
}

/// Direct-link SIR with a split beam; `P_s / 2` cancels.
pub fn sir_path_a(s: &Scenario, alpha: f64) -> f64 {
    sir(direct_signal(s, alpha), interference(s, &s.split_mask, alpha))
}

/// Reflected-link SIR `P_RIS h r2^-a / sum (P_s/2) g_i r_i^-a`, or `None`
/// without an engaged RIS. Idle surfaces do not interfere.
pub fn sir_path_b(s: &Scenario, alpha: f64, reflection: &ReflectionModel) -> Option<f64> {
    let signal = reflected_signal(s, alpha, reflection)?;
    Some(sir(signal, interference(s, &s.split_mask, alpha)))
}

/// Selection diversity: the stronger of the two paths.
pub fn sir_selection(gamma_a: f64, gamma_b: Option<f64>) -> f64 {
    match gamma_b {
        Some(b) => gamma_a.max(b),
        None => gamma_a,
    }
}

/// All four SIRs of one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSirs {
    pub gamma_o: f64,
    pub gamma_a: f64,
    pub gamma_b: Option<f64>,
    pub gamma_s: f64,
}

pub fn trial_sirs(s: &Scenario, alpha: f64, reflection: &ReflectionModel) -> TrialSirs {
    let (single, split) = interference_pair(s, alpha);
    let direct = direct_signal(s, alpha);
    let gamma_a = sir(direct, split);
    let gamma_b = reflected_signal(s, alpha, reflection).map(|b| sir(b, split));
    TrialSirs {
        gamma_o: sir(direct, single),
        gamma_a,
        gamma_b,
        gamma_s: sir_selection(gamma_a, gamma_b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    GammaO,
    GammaA,
    GammaB,
    GammaS,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::GammaO, Metric::GammaA, Metric::GammaB, Metric::GammaS];

    pub fn name(self) -> &'static str {
        match self {
            Metric::GammaO => "gamma_o",
            Metric::GammaA => "gamma_a",
            Metric::GammaB => "gamma_b",
            Metric::GammaS => "gamma_s",
        }
    }
}

/// Empirical `Pr(SIR > T)` with a 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub threshold_t: f64,
    pub metric: Metric,
    pub probability: f64,
    pub confidence_half_width: f64,
    pub n_trials: u64,
}

impl CoverageEstimate {
    pub fn from_counts(threshold_t: f64, metric: Metric, covered: u64, n: u64) -> Self {
        let p = if n == 0 { f64::NAN } else { covered as f64 / n as f64 };
        Self {
            threshold_t,
            metric,
            probability: p,
            confidence_half_width: 1.96 * (p * (1.0 - p) / n as f64).sqrt(),
            n_trials: n,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.probability - self.confidence_half_width).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.probability + self.confidence_half_width).min(1.0)
    }
}

/// Coverage estimates of one run. `gamma_b` counts only engaged drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub thresholds: Vec<f64>,
    pub estimates: Vec<CoverageEstimate>,
    pub n_trials: u64,
    pub n_engaged: u64,
}

impl CoverageReport {
    pub fn get(&self, metric: Metric, k: usize) -> &CoverageEstimate {
        let m = Metric::ALL.iter().position(|&x| x == metric).expect("known metric");
        &self.estimates[m * self.thresholds.len() + k]
    }

    pub fn curve(&self, metric: Metric) -> &[CoverageEstimate] {
        let m = Metric::ALL.iter().position(|&x| x == metric).expect("known metric");
        let n = self.thresholds.len();
        &self.estimates[m * n..(m + 1) * n]
    }

    pub fn engaged_fraction(&self) -> f64 {
        self.n_engaged as f64 / self.n_trials as f64
    }

    /// `gamma_b` coverage over all drops, counting unengaged drops as outages.
    pub fn gamma_b_unconditioned(&self, k: usize) -> CoverageEstimate {
        let b = self.get(Metric::GammaB, k);
        let covered = (b.probability * b.n_trials as f64).round() as u64;
        CoverageEstimate::from_counts(b.threshold_t, Metric::GammaB, covered, self.n_trials)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts {
    covered: [Vec<u64>; 4],
    engaged: u64,
}

impl Counts {
    fn new(k: usize) -> Self {
        Self {
            covered: std::array::from_fn(|_| vec![0; k]),
            engaged: 0,
        }
    }

    fn merge(mut self, other: &Counts) -> Self {
        for (a, b) in self.covered.iter_mut().zip(&other.covered) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.engaged += other.engaged;
        self
    }
}

/// Worker count from [`THREADS_ENV`], or `None` for rayon's default.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn run_chunks<T, F>(n_trials: u64, threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync + Send,
{
    let n_chunks = n_trials.div_ceil(CHUNK);
    let run = || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| work(c * CHUNK, ((c + 1) * CHUNK).min(n_trials)))
            .collect::<Vec<Result<T>>>()
    };
    let results = match threads.or_else(threads_from_env) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|_| Error::Parameter {
                name: "threads",
                value: n as f64,
                reason: "could not start the worker pool",
            })?
            .install(run),
        None => run(),
    };
    results.into_iter().collect()
}

/// [`estimate_coverage_with_threads`] with the worker count from the
/// environment.
pub fn estimate_coverage(spec: &RunSpec, thresholds: &[f64]) -> Result<CoverageReport> {
    estimate_coverage_with_threads(spec, thresholds, None)
}

/// Empirical CCDFs of all four SIRs at each linear threshold. Trials run in
/// parallel chunks whose integer counters are merged in chunk order, so the
/// result does not depend on the worker count.
pub fn estimate_coverage_with_threads(
    spec: &RunSpec,
    thresholds: &[f64],
    threads: Option<usize>,
) -> Result<CoverageReport> {
    spec.validate()?;
    if spec.n_trials < 100 {
        return Err(Error::Parameter {
            name: "n_trials",
            value: spec.n_trials as f64,
            reason: "coverage estimates need at least 100 trials",
        });
    }
    if let Some(&t) = thresholds.iter().find(|t| t.is_nan()) {
        return Err(Error::Parameter {
            name: "threshold",
            value: t,
            reason: "thresholds must be numbers",
        });
    }
    let alpha = spec.network.alpha;
    let reflection = spec.network.reflection()?;
    let k = thresholds.len();
    let chunks = run_chunks(spec.n_trials, threads, |from, to| {
        let mut c = Counts::new(k);
        for trial in from..to {
            let s = drop_scenario(spec, trial)?;
            let v = trial_sirs(&s, alpha, &reflection);
            if v.gamma_b.is_some() {
                c.engaged += 1;
            }
            for (i, &t) in thresholds.iter().enumerate() {
                c.covered[0][i] += (v.gamma_o > t) as u64;
                c.covered[1][i] += (v.gamma_a > t) as u64;
                c.covered[2][i] += v.gamma_b.is_some_and(|b| b > t) as u64;
                c.covered[3][i] += (v.gamma_s > t) as u64;
            }
        }
        Ok(c)
    })?;
    let total = chunks.iter().fold(Counts::new(k), |acc, c| acc.merge(c));
    let mut estimates = Vec::with_capacity(4 * k);
    for (m, metric) in Metric::ALL.iter().enumerate() {
        let n = if *metric == Metric::GammaB {
            total.engaged
        } else {
            spec.n_trials
        };
        for (i, &t) in thresholds.iter().enumerate() {
            estimates.push(CoverageEstimate::from_counts(t, *metric, total.covered[m][i], n));
        }
    }
    Ok(CoverageReport {
        thresholds: thresholds.to_vec(),
        estimates,
        n_trials: spec.n_trials,
        n_engaged: total.engaged,
    })
}

/// Per-drop quantities available for empirical distributions. `R1` and
/// `PRis` are taken from drops with an engaged RIS, so under
/// [`PathBMode::Conditional`] they follow the laws conditioned on `r2 < r0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    R0,
    R1,
    R2,
    PRis,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::R0 => "r0",
            Quantity::R1 => "r1",
            Quantity::R2 => "r2",
            Quantity::PRis => "p_ris",
        }
    }
}

/// One value per trial in trial order. `r1` and `p_ris` come from engaged
/// drops only; `r2` from every drop with a RIS.
pub fn collect_samples(spec: &RunSpec, quantity: Quantity) -> Result<Vec<f64>> {
    collect_samples_with_threads(spec, quantity, None)
}

pub fn collect_samples_with_threads(
    spec: &RunSpec,
    quantity: Quantity,
    threads: Option<usize>,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let net = spec.network;
    let reflection = net.reflection()?;
    let chunks = run_chunks(spec.n_trials, threads, |from, to| {
        let mut out = Vec::with_capacity((to - from) as usize);
        for trial in from..to {
            let s = drop_scenario(spec, trial)?;
            let v = match quantity {
                Quantity::R0 => Some(s.r0()),
                Quantity::R2 => s.r2(),
                Quantity::R1 => s.engaged_ris_index.and(s.r1()),
                Quantity::PRis => s.reflected_power(&reflection, net.p_s, net.alpha),
            };
            out.extend(v);
        }
        Ok(out)
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "snake_case")]
pub enum Binning {
    Linear { lo: f64, hi: f64, bins: usize },
    Log { lo: f64, hi: f64, bins: usize },
}

impl Binning {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi, bins, log) = match *self {
            Binning::Linear { lo, hi, bins } => (lo, hi, bins, false),
            Binning::Log { lo, hi, bins } => (lo, hi, bins, true),
        };
        if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() || (log && lo <= 0.0) {
            return Err(Error::Parameter {
                name: "binning",
                value: bins as f64,
                reason: "need bins > 0 and finite lo < hi (lo > 0 for log bins)",
            });
        }
        Ok(())
    }

    pub fn edges(&self) -> Vec<f64> {
        match *self {
            Binning::Linear { lo, hi, bins } => (0..=bins)
                .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
                .collect(),
            Binning::Log { lo, hi, bins } => {
                let (a, b) = (lo.ln(), hi.ln());
                (0..=bins)
                    .map(|i| (a + (b - a) * i as f64 / bins as f64).exp())
                    .collect()
            }
        }
    }
}

/// Histogram normalised to unit mass over its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub binning: Binning,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub n_samples: u64,
    pub n_outside: u64,
}

impl Histogram {
    pub fn from_samples(samples: &[f64], binning: Binning) -> Result<Self> {
        binning.validate()?;
        let edges = binning.edges();
        let bins = edges.len() - 1;
        let mut counts = vec![0u64; bins];
        let mut outside = 0;
        for &x in samples {
            // partition_point gives the first edge strictly above x
            let k = edges.partition_point(|&e| e <= x);
            if (1..=bins).contains(&k) {
                counts[k - 1] += 1;
            } else if x == edges[bins] {
                counts[bins - 1] += 1;
            } else {
                outside += 1;
            }
        }
        let inside: u64 = counts.iter().sum();
        let density = counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, w)| {
                if inside == 0 {
                    0.0
                } else {
                    c as f64 / (inside as f64 * (w[1] - w[0]))
                }
            })
            .collect();
        Ok(Self {
            binning,
            edges,
            counts,
            density,
            n_samples: samples.len() as u64,
            n_outside: outside,
        })
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Total mass `sum density_i width_i`.
    pub fn mass(&self) -> f64 {
        self.density.iter().zip(self.widths()).map(|(d, w)| d * w).sum()
    }

    /// L1 distance to a reference density averaged over each bin by
    /// `bin_mass(lo, hi)`.
    pub fn l1_to<F: Fn(f64, f64) -> Result<f64>>(&self, bin_mass: F) -> Result<f64> {
        let mut total = 0.0;
        for (w, d) in self.edges.windows(2).zip(&self.density) {
            let p = bin_mass(w[0], w[1])?;
            total += (d * (w[1] - w[0]) - p).abs();
        }
        Ok(total)
    }
}

/// Normalised histogram of `quantity` over the run.
pub fn empirical_histogram(spec: &RunSpec, quantity: Quantity, binning: Binning) -> Result<Histogram> {
    if spec.n_trials < 1000 {
        return Err(Error::Parameter {
            name: "n_trials",
            value: spec.n_trials as f64,
            reason: "histograms need at least 1000 trials",
        });
    }
    Histogram::from_samples(&collect_samples(spec, quantity)?, binning)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> RunSpec {
        RunSpec::new(NetworkParams::default(), 200, 5)
    }

    #[test]
    fn drop_is_deterministic() {
        let spec = small_spec();
        assert_eq!(drop_scenario(&spec, 17).unwrap(), drop_scenario(&spec, 17).unwrap());
        assert_ne!(drop_scenario(&spec, 17).unwrap(), drop_scenario(&spec, 18).unwrap());
    }

    #[test]
    fn serving_is_nearest_and_masks_are_nested() {
        let spec = small_spec();
        for t in 0..20 {
            let s = drop_scenario(&spec, t).unwrap();
            let r0 = s.r0();
            assert!(s.bs_distances.iter().all(|&d| d >= r0));
            assert!(!s.single_mask[s.serving_bs_index]);
            assert!(s.single_mask.iter().zip(&s.split_mask).all(|(a, b)| !a || *b));
            if let Some(j) = s.engaged_ris_index {
                assert!(s.ris_points.points()[j].norm() < r0);
            }
        }
    }

    fn hand_scenario(interferer_at: Option<f64>) -> Scenario {
        let mut pts = vec![Point::new(1.0, 0.0)];
        if let Some(r) = interferer_at {
            pts.push(Point::new(-r, 0.0));
        }
        let n = pts.len();
        let bs = PointSet::new(pts, 1.0, 10.0).unwrap();
        let ris = PointSet::new(vec![Point::new(0.0, 1.0)], 1.0, 10.0).unwrap();
        Scenario {
            trial: 0,
            bs_distances: bs.points().iter().map(Point::norm).collect(),
            bs_points: bs,
            ris_points: ris,
            ue: Point::ORIGIN,
            serving_bs_index: 0,
            nearest_ris: Some((0, 1.0)),
            engaged_ris_index: Some(0),
            g: vec![1.0; n],
            f1: 1.0,
            h: 1.0,
            element_fades: None,
            single_mask: (0..n).map(|i| i > 0).collect(),
            split_mask: (0..n).map(|i| i > 0).collect(),
        }
    }

    #[test]
    fn baseline_sir_by_hand() {
        let s = hand_scenario(Some(2.0));
        assert!((sir_baseline(&s, 4.0) - 16.0).abs() < 1e-12);
        let lonely = hand_scenario(None);
        assert_eq!(sir_baseline(&lonely, 4.0), f64::INFINITY);
        assert!(sir_baseline(&lonely, 4.0) > 1e6);
        assert_eq!(sir_path_a(&lonely, 4.0), f64::INFINITY);
    }

    #[test]
    fn path_b_unit_configuration() {
        // RIS at distance 1 from the UE and sqrt(2) from the BS; put the
        // interferer at 1 and rescale the BS-RIS distance effect out.
        let s = hand_scenario(Some(1.0));
        let unit = ReflectionModel::new(1, 1.0, PhaseResolution::Ideal).unwrap();
        let b = sir_path_b(&s, 4.0, &unit).unwrap();
        let r1 = 2f64.sqrt();
        assert!((b - r1.powi(-4)).abs() < 1e-12);
        let m10 = ReflectionModel::new(10, 0.9, PhaseResolution::Ideal).unwrap();
        let m100 = ReflectionModel::new(100, 0.9, PhaseResolution::Ideal).unwrap();
        let ratio = sir_path_b(&s, 4.0, &m100).unwrap() / sir_path_b(&s, 4.0, &m10).unwrap();
        assert!((ratio - 100.0).abs() < 1e-10);
    }

    #[test]
    fn selection_examples() {
        assert_eq!(sir_selection(3.0, None), 3.0);
        assert_eq!(sir_selection(3.0, Some(5.0)), 5.0);
    }

    #[test]
    fn too_few_trials_rejected() {
        let spec = RunSpec::new(NetworkParams::default(), 50, 1);
        assert!(estimate_coverage(&spec, &[1.0]).is_err());
    }

    #[test]
    fn histogram_mass_is_one() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let h = Histogram::from_samples(&xs, Binning::Linear { lo: 0.0, hi: 1.0, bins: 7 }).unwrap();
        assert!((h.mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.n_outside, 0);
        let lg = Histogram::from_samples(&[0.5, 2.0, 50.0], Binning::Log { lo: 1.0, hi: 100.0, bins: 2 }).unwrap();
        assert_eq!(lg.counts, vec![1, 1]);
        assert_eq!(lg.n_outside, 1);
    }
}
