//! The five experiment drivers behind the subcommands.

use serde::Serialize;

use crate::analytic::{coverage_baseline, coverage_path_a, independent_selection, PathB};
use crate::error::Error;
use crate::geometry::{self, R1Conditioning};
use crate::montecarlo::{
    collect_samples_with_threads, estimate_coverage_with_threads, Binning, Histogram, Metric,
    PathBMode, Quantity,
};

use super::config::{GateKind, NetworkConfig};
use super::output::ResultRow;
use super::CliError;

pub(crate) fn engine_error(e: Error) -> CliError {
    match e {
        Error::Parameter { .. } | Error::Domain { .. } => CliError::Config(e.to_string()),
        Error::EmptyScenario { .. } => CliError::Simulation(e.to_string()),
        Error::SingularPoint { .. } | Error::Numerical { .. } => CliError::Pipeline(e.to_string()),
    }
}

struct RowFactory<'a> {
    hash: String,
    seed: u64,
    axis: Option<(&'a str, f64)>,
}

impl<'a> RowFactory<'a> {
    fn new(cfg: &NetworkConfig, axis: Option<(&'a str, f64)>) -> RowFactory<'a> {
        RowFactory {
            hash: cfg.hash(),
            seed: cfg.master_seed,
            axis,
        }
    }

    fn row(&self, engine: &str, metric: &str, t_db: Option<f64>, value: f64) -> ResultRow {
        ResultRow {
            engine: engine.into(),
            metric: metric.into(),
            t_db,
            axis_name: self.axis.map(|a| a.0.to_string()).unwrap_or_default(),
            axis_value: self.axis.map(|a| a.1),
            value,
            ci_half_width: None,
            n_trials: None,
            config_hash: self.hash.clone(),
            seed: self.seed,
        }
    }
}

fn analytic_rows(cfg: &NetworkConfig, axis: Option<(&str, f64)>) -> Result<Vec<ResultRow>, CliError> {
    cfg.validate()?;
    if cfg.thresholds_db.is_empty() {
        return Ok(Vec::new());
    }
    let f = RowFactory::new(cfg, axis);
    let net = cfg.network();
    let path_b = PathB::new(&net.query(1.0)).map_err(engine_error)?;
    let mut rows = Vec::new();
    for (&db, t) in cfg.thresholds_db.iter().zip(cfg.thresholds()) {
        let q = net.query(t);
        let q2 = coverage_baseline(&q).map_err(engine_error)?;
        let q23 = coverage_path_a(&q).map_err(engine_error)?;
        let a1 = path_b.approx1(t).map_err(engine_error)?;
        let a2 = path_b.approx2(t).map_err(engine_error)?;
        rows.push(f.row("analytic_q2", Metric::GammaO.name(), Some(db), q2));
        rows.push(f.row("analytic_q23", Metric::GammaA.name(), Some(db), q23));
        rows.push(f.row("approx1", Metric::GammaB.name(), Some(db), a1));
        rows.push(f.row("approx2", Metric::GammaB.name(), Some(db), a2));
        rows.push(f.row("approx1", Metric::GammaS.name(), Some(db), independent_selection(q23, a1)));
        rows.push(f.row("approx2", Metric::GammaS.name(), Some(db), independent_selection(q23, a2)));
    }
    Ok(rows)
}

/// One row per closed form per threshold.
pub fn run_analytic(cfg: &NetworkConfig) -> Result<Vec<ResultRow>, CliError> {
    analytic_rows(cfg, None)
}

/// Simulated coverage of all four metrics.
#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub rows: Vec<ResultRow>,
    pub engaged_fraction: f64,
    pub histograms: Vec<HistogramOutput>,
}

fn mc_rows(
    cfg: &NetworkConfig,
    axis: Option<(&str, f64)>,
    threads: Option<usize>,
) -> Result<(Vec<ResultRow>, f64), CliError> {
    cfg.validate()?;
    let report = estimate_coverage_with_threads(&cfg.run_spec(), &cfg.thresholds(), threads)
        .map_err(engine_error)?;
    let f = RowFactory::new(cfg, axis);
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for (e, &db) in report.curve(metric).iter().zip(&cfg.thresholds_db) {
            let mut r = f.row("mc", metric.name(), Some(db), e.probability);
            r.ci_half_width = Some(e.confidence_half_width);
            r.n_trials = Some(e.n_trials);
            rows.push(r);
        }
    }
    Ok((rows, report.engaged_fraction()))
}

pub fn run_simulate(cfg: &NetworkConfig, threads: Option<usize>) -> Result<SimulateOutput, CliError> {
    let (rows, engaged_fraction) = mc_rows(cfg, None, threads)?;
    let histograms = cfg
        .histograms
        .quantities
        .iter()
        .map(|&q| run_hist(cfg, q, cfg.histograms.bins, threads))
        .collect::<Result<_, _>>()?;
    Ok(SimulateOutput {
        rows,
        engaged_fraction,
        histograms,
    })
}

/// Outcome of one gate at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCheck {
    pub engine: String,
    pub metric: Metric,
    #[serde(rename = "T_db")]
    pub t_db: f64,
    pub kind: GateKind,
    pub reference: f64,
    pub mc: f64,
    pub ci_half_width: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub config_hash: String,
    pub analytic_config_hash: String,
    pub seed: u64,
    pub n_trials: u64,
    pub engaged_fraction: f64,
    pub checks: Vec<GateCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub rows: Vec<ResultRow>,
    pub report: CompareReport,
}

/// Joins analytic rows (from `analytic_cfg`, defaulting to `cfg`) with the
/// simulation of `cfg` and evaluates the gates of `cfg`.
pub fn run_compare(
    cfg: &NetworkConfig,
    analytic_cfg: Option<&NetworkConfig>,
    threads: Option<usize>,
) -> Result<CompareOutput, CliError> {
    let acfg = analytic_cfg.unwrap_or(cfg);
    let analytic = run_analytic(acfg)?;
    let (mc, engaged_fraction) = mc_rows(cfg, None, threads)?;
    let find = |rows: &[ResultRow], engine: &str, metric: Metric, t_db: f64| {
        rows.iter()
            .find(|r| r.engine == engine && r.metric == metric.name() && r.t_db == Some(t_db))
            .cloned()
    };
    let mut checks = Vec::new();
    for gate in &cfg.gates {
        let thresholds = gate.thresholds_db.as_ref().unwrap_or(&cfg.thresholds_db);
        for &t_db in thresholds {
            let reference = find(&analytic, &gate.engine, gate.metric, t_db).ok_or_else(|| {
                CliError::Pipeline(format!(
                    "no {} / {} output at {t_db} dB for gate",
                    gate.engine,
                    gate.metric.name()
                ))
            })?;
            let sim = find(&mc, "mc", gate.metric, t_db).ok_or_else(|| {
                CliError::Pipeline(format!("no mc / {} output at {t_db} dB for gate", gate.metric.name()))
            })?;
            let gap = sim.value - reference.value;
            let pass = match gate.kind {
                GateKind::AbsGap => gap.abs() <= gate.tolerance,
                GateKind::AtLeast => gap >= -gate.tolerance,
            };
            checks.push(GateCheck {
                engine: gate.engine.clone(),
                metric: gate.metric,
                t_db,
                kind: gate.kind,
                reference: reference.value,
                mc: sim.value,
                ci_half_width: sim.ci_half_width.unwrap_or(0.0),
                gap,
                tolerance: gate.tolerance,
                pass,
            });
        }
    }
    let passed = checks.iter().all(|c| c.pass);
    let mut rows = analytic;
    rows.extend(mc);
    Ok(CompareOutput {
        rows,
        report: CompareReport {
            config_hash: cfg.hash(),
            analytic_config_hash: acfg.hash(),
            seed: cfg.master_seed,
            n_trials: cfg.n_trials,
            engaged_fraction,
            checks,
            passed,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    LambdaRis,
    LambdaBs,
    N,
    M,
    T,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::LambdaRis => "lambda_ris_per_km2",
            SweepAxis::LambdaBs => "lambda_bs_per_km2",
            SweepAxis::N => "N",
            SweepAxis::M => "M",
            SweepAxis::T => "T_db",
        }
    }

    fn apply(self, cfg: &NetworkConfig, v: f64) -> Result<NetworkConfig, CliError> {
        let count = |v: f64| -> Result<u64, CliError> {
            if v >= 1.0 && v.fract() == 0.0 && v < 2f64.powi(53) {
                Ok(v as u64)
            } else {
                Err(CliError::Config(format!(
                    "grid value {v} for axis {} must be a positive integer",
                    self.column_name()
                )))
            }
        };
        let mut c = cfg.clone();
        match self {
            SweepAxis::LambdaRis => c.lambda_ris = v,
            SweepAxis::LambdaBs => c.lambda_bs = v,
            SweepAxis::N => c.n_elements = count(v)?,
            SweepAxis::M => c.m_elements = count(v)?,
            SweepAxis::T => c.thresholds_db = vec![v],
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Keep only these metrics; all when empty.
    pub metrics: Vec<String>,
    /// Also run the simulator at every grid point.
    pub with_mc: bool,
}

/// Evaluates every engine at each grid point. Density and `M` axes add the
/// quadrature engine's `mean_r1` (m) and `mean_p_ris` (W).
pub fn run_sweep(
    cfg: &NetworkConfig,
    axis: SweepAxis,
    grid: &[f64],
    options: &SweepOptions,
    threads: Option<usize>,
) -> Result<Vec<ResultRow>, CliError> {
    if grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("sweep grid must be finite and strictly increasing".into()));
    }
    let mut rows = Vec::new();
    for &v in grid {
        let point = axis.apply(cfg, v)?;
        let at = Some((axis.column_name(), v));
        rows.extend(analytic_rows(&point, at)?);
        if matches!(axis, SweepAxis::LambdaRis | SweepAxis::LambdaBs | SweepAxis::M) {
            let f = RowFactory::new(&point, at);
            let net = point.network();
            if axis != SweepAxis::M {
                let r1 = geometry::expected_r1(net.lambda_bs, net.lambda_ris).map_err(engine_error)?;
                rows.push(f.row("quadrature", "mean_r1", None, r1));
            }
            let p = crate::channel::mean_reflected_power(
                net.lambda_bs,
                net.lambda_ris,
                &net.reflection().map_err(engine_error)?,
                net.p_s,
                net.mu,
                net.alpha,
                net.epsilon_floor,
            )
            .map_err(engine_error)?;
            rows.push(f.row("quadrature", "mean_p_ris", None, p));
        }
        if options.with_mc {
            rows.extend(mc_rows(&point, at, threads)?.0);
        }
    }
    if !options.metrics.is_empty() {
        rows.retain(|r| options.metrics.iter().any(|m| m == &r.metric));
    }
    Ok(rows)
}

/// Empirical density of one quantity with the matching analytic density
/// averaged over each bin where one exists.
#[derive(Debug, Clone)]
pub struct HistogramOutput {
    pub quantity: Quantity,
    pub histogram: Histogram,
    pub reference: Option<Vec<f64>>,
}

impl HistogramOutput {
    pub fn l1(&self) -> Option<f64> {
        let r = self.reference.as_ref()?;
        Some(crate::stats::l1_distance(&self.histogram.density, r, &self.histogram.widths()))
    }

    /// Plot-ready columns `bin_lo,bin_hi,density,count,reference`.
    pub fn csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_hi,density,count,reference\n");
        let h = &self.histogram;
        for (i, w) in h.edges.windows(2).enumerate() {
            let reference = self
                .reference
                .as_ref()
                .map(|r| r[i].to_string())
                .unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{}\n", w[0], w[1], h.density[i], h.counts[i], reference));
        }
        s
    }
}

pub fn run_hist(
    cfg: &NetworkConfig,
    quantity: Quantity,
    bins: usize,
    threads: Option<usize>,
) -> Result<HistogramOutput, CliError> {
    cfg.validate()?;
    let spec = cfg.run_spec();
    if spec.n_trials < 1000 {
        return Err(CliError::Config(format!(
            "field `n_trials` = {}: histograms need at least 1000 trials",
            spec.n_trials
        )));
    }
    let net = spec.network;
    let samples = collect_samples_with_threads(&spec, quantity, threads).map_err(engine_error)?;
    let (lb, lr) = (net.lambda_bs, net.lambda_ris);
    let lambda_e = lb * lr / (lb + lr);
    let rayleigh_hi = |l: f64| geometry::rayleigh_quantile(1.0 - 1e-4, l);
    let binning = match quantity {
        Quantity::R0 => Binning::Linear { lo: 0.0, hi: rayleigh_hi(lb), bins },
        Quantity::R2 => Binning::Linear { lo: 0.0, hi: rayleigh_hi(lr), bins },
        Quantity::R1 => Binning::Linear { lo: 0.0, hi: rayleigh_hi(lambda_e), bins },
        Quantity::PRis => {
            let positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0 && x.is_finite()).collect();
            let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = positive.iter().copied().fold(0.0, f64::max);
            if !(hi > lo) {
                return Err(CliError::Simulation("no reflected-power samples to bin".into()));
            }
            Binning::Log { lo, hi, bins }
        }
    };
    let histogram = Histogram::from_samples(&samples, binning).map_err(engine_error)?;
    let bin_average = |cdf: &dyn Fn(f64) -> f64| -> Vec<f64> {
        histogram
            .edges
            .windows(2)
            .map(|w| (cdf(w[1]) - cdf(w[0])) / (w[1] - w[0]))
            .collect()
    };
    let reference = match quantity {
        Quantity::R0 => Some(bin_average(&|r| geometry::rayleigh_cdf(r, lb))),
        Quantity::R2 => Some(bin_average(&|r| geometry::rayleigh_cdf(r, lr))),
        Quantity::R1 => {
            let conditioning = match spec.path_b {
                PathBMode::Conditional => R1Conditioning::Engaged,
                PathBMode::Unconditional => R1Conditioning::Unconditional,
            };
            Some(
                histogram
                    .centres()
                    .iter()
                    .map(|&r| geometry::pdf_r1_marginal_with(r, lb, lr, conditioning))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(engine_error)?,
            )
        }
        Quantity::PRis => None,
    };
    Ok(HistogramOutput {
        quantity,
        histogram,
        reference,
    })
}
