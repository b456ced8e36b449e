//! Parameter sweeps over a [`SimulationConfig`] with tabular output.

mod recipes;

pub use recipes::{recipe, RECIPES};

use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{circulant_residual, reduce_channel, ChannelMatrix};
use crate::config::{CorrelationModel, Scenario, SimulationConfig};
use crate::error::{Error, Result};
use crate::linalg::{pinv, CMat};
use crate::metrics::{
    self, capacity_mimo, capacity_oam, capacity_oam_simplified, capacity_siso, default_correlation,
    identity_correlation,
};
use crate::txrx::{estimate_channel_ls, run_ber, BerDetector, BerOptions};

/// Environment variable holding the worker thread count (0 or unset: all cores).
pub const WORKERS_ENV: &str = "OAMNFC_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CapacityOam,
    CapacityLs,
    CapacitySiso,
    CapacityMimo,
    CapacityMimoWf,
    BerAnalytic,
    BerMc,
    /// Lower bound, simplified closed form and upper bound.
    Bounds,
    CirculantResidual,
    /// LS capacity with perfect CSI minus equal-power MIMO capacity.
    CapacityGap,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::CapacityOam,
        Metric::CapacityLs,
        Metric::CapacitySiso,
        Metric::CapacityMimo,
        Metric::CapacityMimoWf,
        Metric::BerAnalytic,
        Metric::BerMc,
        Metric::Bounds,
        Metric::CirculantResidual,
        Metric::CapacityGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CapacityOam => "capacity_oam",
            Metric::CapacityLs => "capacity_ls",
            Metric::CapacitySiso => "capacity_siso",
            Metric::CapacityMimo => "capacity_mimo",
            Metric::CapacityMimoWf => "capacity_mimo_wf",
            Metric::BerAnalytic => "ber_analytic",
            Metric::BerMc => "ber_mc",
            Metric::Bounds => "bounds",
            Metric::CirculantResidual => "circulant_residual",
            Metric::CapacityGap => "capacity_gap",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::Sweep(format!("unknown metric '{name}'")))
    }

    /// Output columns; BER metrics get one column per configured detector.
    pub fn columns(self, base: &SimulationConfig) -> Vec<String> {
        let det = base.flags.detector;
        let per_detector = |prefix: &str| {
            let mut v = Vec::new();
            if det.blind() {
                v.push(format!("{prefix}_blind"));
            }
            if det.ls() {
                v.push(format!("{prefix}_ls"));
            }
            v
        };
        match self {
            Metric::BerAnalytic => per_detector("ber_analytic"),
            Metric::BerMc => per_detector("ber_mc"),
            Metric::Bounds => vec!["bound_lower".into(), "capacity_simplified".into(), "bound_upper".into()],
            m => vec![m.name().to_string()],
        }
    }
}

/// Inclusive grid `start, start + step, …, stop` in the parameter's boundary units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: &str, start: f64, stop: f64, step: f64) -> Self {
        Axis { name: name.to_string(), start, stop, step }
    }

    /// `points` evenly spaced values covering `[start, stop]`.
    pub fn linspace(name: &str, start: f64, stop: f64, points: usize) -> Self {
        let step = if points > 1 { (stop - start) / (points - 1) as f64 } else { 1.0 };
        Axis::new(name, start, stop, step)
    }

    pub fn validate(&self) -> Result<()> {
        if SimulationConfig::canonical_parameter(&self.name).is_none() {
            return Err(Error::Sweep(format!("axis '{}' is not a configurable parameter", self.name)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Sweep(format!("axis '{}' has non-finite bounds", self.name)));
        }
        if self.stop < self.start || self.step <= 0.0 {
            return Err(Error::Sweep(format!(
                "axis '{}' range [{}, {}] step {} is empty",
                self.name, self.start, self.stop, self.step
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points()).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    #[serde(default)]
    pub base: SimulationConfig,
    pub axes: Vec<Axis>,
    pub metrics: Vec<Metric>,
    /// Bits per point for `ber_mc`.
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> u64 {
    100_000
}

impl SweepSpec {
    /// Reads a TOML spec with top-level `name`, `axes`, `metrics`, `trials`,
    /// `seed` and a `[base]` table in config format.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Sweep(format!("a sweep needs one or two axes, got {}", self.axes.len())));
        }
        for a in &self.axes {
            a.validate()?;
        }
        if self.metrics.is_empty() {
            return Err(Error::Sweep("metric set is empty".into()));
        }
        if self.metrics.contains(&Metric::BerMc) && self.trials == 0 {
            return Err(Error::Sweep("ber_mc needs at least one trial".into()));
        }
        Ok(())
    }

    pub fn axis_names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn metric_columns(&self) -> Vec<String> {
        metric_columns(&self.base, &self.metrics)
    }

    /// Grid coordinates, first axis varying slowest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
        for a in &self.axes {
            let vals = a.values();
            grid = grid
                .into_iter()
                .flat_map(|p| vals.iter().map(move |&v| [p.as_slice(), &[v]].concat()))
                .collect();
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub values: Vec<Option<f64>>,
    /// Condition number of the channel used for LS detection.
    pub condition: Option<f64>,
    /// Why a point or some of its metrics were skipped.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub trials: u64,
    pub config_sha256: String,
    pub spec: SweepSpec,
    pub axes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn skipped(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.values.iter().all(Option::is_none))
    }

    pub fn to_csv(&self) -> String {
        let meta = [
            ("name", self.name.clone()),
            ("version", self.version.clone()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("config_sha256", self.config_sha256.clone()),
            ("spec", serde_json::to_string(&self.spec).expect("spec serializes")),
        ];
        table_csv(&meta, &self.axes, &self.columns, &self.rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Writes JSON when the extension is `.json`, CSV otherwise.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => self.to_json(),
            _ => self.to_csv(),
        };
        std::fs::write(path, body)?;
        Ok(())
    }
}

/// Output columns of `metrics` under the flags of `base`, without duplicates.
pub fn metric_columns(base: &SimulationConfig, metrics: &[Metric]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for m in metrics {
        for c in m.columns(base) {
            if !cols.contains(&c) {
                cols.push(c);
            }
        }
    }
    cols
}

/// CSV with `# key: value` metadata lines, then axes, metric columns,
/// `condition` and `note`. Missing values are empty cells.
pub fn table_csv(meta: &[(&str, String)], axes: &[String], columns: &[String], rows: &[SweepRow]) -> String {
    let mut out = Vec::new();
    for (k, v) in meta {
        writeln!(out, "# {k}: {v}").expect("write to memory");
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let header: Vec<&str> =
            axes.iter().chain(columns).map(String::as_str).chain(["condition", "note"]).collect();
        w.write_record(&header).expect("write to memory");
        for r in rows {
            let rec: Vec<String> = r
                .coords
                .iter()
                .map(|c| c.to_string())
                .chain(r.values.iter().map(|v| fmt_opt(*v)))
                .chain([fmt_opt(r.condition), r.note.clone().unwrap_or_default()])
                .collect();
            w.write_record(&rec).expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    String::from_utf8(out).expect("csv is utf-8")
}

/// Worker count from [`WORKERS_ENV`].
pub fn configured_workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(0),
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with_progress(spec, |_, _| {})
}

/// Evaluates every grid point; `progress(done, total)` fires as points finish.
pub fn run_sweep_with_progress(spec: &SweepSpec, progress: impl Fn(usize, usize) + Sync) -> Result<SweepResult> {
    spec.validate()?;
    let columns = spec.metric_columns();
    let grid = spec.grid();
    let total = grid.len();
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(configured_workers()?)
        .build()
        .map_err(|e| Error::Sweep(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(index, coords)| {
                let names: Vec<&str> = spec.axes.iter().map(|a| a.name.as_str()).collect();
                let row = evaluate_point(&spec.base, &names, coords, &spec.metrics, spec.trials, spec.seed, index as u64);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                row
            })
            .collect()
    });
    Ok(SweepResult {
        name: spec.name.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: spec.seed,
        trials: spec.trials,
        config_sha256: spec.base.digest(),
        spec: spec.clone(),
        axes: spec.axis_names(),
        columns,
        rows,
    })
}

/// Evaluates `metrics` on `base` with `axes` set to `coords`. The random
/// stream is `(seed, index)`, so results do not depend on scheduling.
pub fn evaluate_point(
    base: &SimulationConfig,
    axes: &[&str],
    coords: &[f64],
    metrics: &[Metric],
    trials: u64,
    seed: u64,
    index: u64,
) -> SweepRow {
    let columns = metric_columns(base, metrics);
    let mut row = SweepRow { coords: coords.to_vec(), values: vec![None; columns.len()], condition: None, note: None };
    let mut cfg = base.clone();
    let setup = axes
        .iter()
        .zip(coords)
        .try_for_each(|(a, &v)| cfg.set(a, v))
        .and_then(|_| cfg.scenario());
    let sc = match setup {
        Ok(s) => s,
        Err(e) => {
            row.note = Some(format!("skipped: {e}"));
            return row;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut pt = Point { sc: &sc, ch: None, h_est: None, notes: Vec::new() };
    if let Err(e) = pt.channel() {
        row.note = Some(format!("skipped: {e}"));
        return row;
    }
    row.condition = pt.channel().ok().and_then(|ch| pinv(&ch.h).ok()).map(|p| p.condition);
    for m in metrics {
        let cols = m.columns(base);
        match pt.metric(*m, trials, &mut rng) {
            Ok(vals) => {
                for (c, v) in cols.iter().zip(vals) {
                    let i = columns.iter().position(|x| x == c).expect("column listed");
                    row.values[i] = Some(v);
                }
            }
            Err(e) => pt.notes.push(format!("{}: {e}", m.name())),
        }
    }
    if !pt.notes.is_empty() {
        row.note = Some(pt.notes.join("; "));
    }
    row
}

struct Point<'a> {
    sc: &'a Scenario,
    ch: Option<ChannelMatrix>,
    h_est: Option<CMat>,
    notes: Vec<String>,
}

impl Point<'_> {
    fn channel(&mut self) -> Result<&ChannelMatrix> {
        if self.ch.is_none() {
            let sc = self.sc;
            self.ch = Some(ChannelMatrix::analytic(&sc.geometry, &sc.electrical, sc.flags.inductance_method, sc.flags.crosstalk)?);
        }
        Ok(self.ch.as_ref().expect("just built"))
    }

    fn estimate(&mut self, rng: &mut ChaCha8Rng) -> Result<CMat> {
        if self.h_est.is_none() {
            let sc = self.sc;
            let ch = self.channel()?.clone();
            self.h_est = Some(if sc.flags.estimated_csi {
                sc.pilot.validate_for(ch.n_tx(), ch.n_rx())?;
                estimate_channel_ls(&ch, &sc.pilot, rng)?
            } else {
                ch.h.clone()
            });
        }
        Ok(self.h_est.clone().expect("just built"))
    }

    fn correlation(&self) -> Result<(CMat, CMat)> {
        let g = &self.sc.geometry;
        match self.sc.flags.mimo_correlation {
            CorrelationModel::Coupling => default_correlation(g, self.sc.flags.inductance_method),
            CorrelationModel::Identity => Ok((identity_correlation(g.n_tx), identity_correlation(g.n_rx))),
        }
    }

    fn metric(&mut self, m: Metric, trials: u64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let sc = self.sc;
        let mut budget = sc.budget.clone();
        budget.snr_grid.clear();
        let det = sc.flags.detector;
        Ok(match m {
            Metric::CapacityOam => vec![capacity_oam(self.channel()?, &budget)?.total_bits],
            Metric::CapacityLs => {
                let he = self.estimate(rng)?;
                vec![metrics::capacity_ls(self.channel()?, &he, &budget)?.total_bits]
            }
            Metric::CapacitySiso => vec![capacity_siso(&sc.geometry, &sc.electrical, &budget)?],
            Metric::CapacityMimo | Metric::CapacityMimoWf => {
                let (gt, gr) = self.correlation()?;
                vec![capacity_mimo(self.channel()?, &budget, &gt, &gr, m == Metric::CapacityMimoWf)?.total_bits]
            }
            Metric::BerAnalytic => {
                let mut v = Vec::new();
                if det.blind() {
                    v.push(metrics::ber_oam_analytic(self.channel()?, &budget)?);
                }
                if det.ls() {
                    let he = self.estimate(rng)?;
                    v.push(metrics::ber_ls(self.channel()?, &he, &budget)?);
                }
                v
            }
            Metric::BerMc => {
                let opts = BerOptions { bits_per_point: trials as usize, ..BerOptions::default() };
                let mut detectors = Vec::new();
                if det.blind() {
                    detectors.push(BerDetector::Blind { gains: None });
                }
                if det.ls() {
                    detectors.push(BerDetector::Ls { pilot: sc.pilot });
                }
                let ch = self.channel()?;
                detectors
                    .iter()
                    .map(|d| Ok(run_ber(ch, &budget, d, &opts, rng)?[0].ber))
                    .collect::<Result<_>>()?
            }
            Metric::Bounds => {
                let r = capacity_oam_simplified(&sc.geometry, &sc.electrical, &budget)?;
                let (lo, hi) = r.bounds.expect("simplified capacity carries bounds");
                vec![lo, r.total_bits, hi]
            }
            Metric::CirculantResidual => vec![circulant_residual(&reduce_channel(self.channel()?)?)],
            Metric::CapacityGap => {
                let (gt, gr) = self.correlation()?;
                let ch = self.channel()?;
                let ls = metrics::capacity_ls(ch, &ch.h, &budget)?.total_bits;
                vec![ls - capacity_mimo(ch, &budget, &gt, &gr, false)?.total_bits]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            name: "t".into(),
            base: SimulationConfig::default(),
            axes: vec![Axis::new("d_x", 0.0, 4.0, 2.0)],
            metrics: vec![Metric::CapacityOam, Metric::CapacityLs, Metric::CirculantResidual],
            trials: 10,
            seed: 1,
        }
    }

    #[test]
    fn axis_values_are_inclusive() {
        assert_eq!(Axis::new("D", 0.0, 50.0, 1.0).points(), 51);
        assert_eq!(Axis::linspace("theta_x", -60.0, 60.0, 26).values()[25], 60.0);
        assert_eq!(Axis::new("D", 5.0, 5.0, 1.0).values(), vec![5.0]);
    }

    #[test]
    fn validation() {
        let mut s = small_spec();
        s.metrics.clear();
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.axes[0].name = "colour".into();
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.axes[0].stop = -1.0;
        assert!(s.validate().is_err());
        let mut s = small_spec();
        s.axes = vec![s.axes[0].clone(); 3];
        assert!(s.validate().is_err());
    }

    #[test]
    fn aligned_point_is_circulant() {
        let r = run_sweep(&small_spec()).unwrap();
        assert_eq!(r.rows.len(), 3);
        let res = r.column("circulant_residual").unwrap();
        assert!(res[0].unwrap() < 1e-10 && res[1].unwrap() > 1e-3);
        let oam = r.column("capacity_oam").unwrap();
        assert!(oam[0].unwrap() > oam[2].unwrap());
    }

    #[test]
    fn infeasible_points_are_skipped_with_reason() {
        let mut s = small_spec();
        s.axes = vec![Axis::new("r", 5.0, 15.0, 5.0)];
        let r = run_sweep(&s).unwrap();
        assert!(r.rows[0].note.is_none());
        assert_eq!(r.skipped().count(), 2);
        assert!(r.rows[2].note.as_ref().unwrap().starts_with("skipped:"));
    }

    #[test]
    fn csv_layout() {
        let r = run_sweep(&small_spec()).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# name: t"));
        assert!(lines.iter().any(|l| l.starts_with("# config_sha256: ")));
        let header = lines.iter().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(*header, "d_x,capacity_oam,capacity_ls,circulant_residual,condition,note");
        assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 4);
        let back: SweepResult = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn spec_parses_from_toml() {
        let s = SweepSpec::parse(
            "name = \"x\"\nmetrics = [\"capacity_ls\"]\nseed = 3\n[[axes]]\nname = \"D\"\nstart = 5.0\nstop = 10.0\nstep = 5.0\n[base.geometry]\nn_tx = 4\nn_rx = 4\n",
        )
        .unwrap();
        assert_eq!(s.base.geometry.n_tx, 4);
        assert_eq!(s.grid(), vec![vec![5.0], vec![10.0]]);
        assert!(SweepSpec::parse("name = \"x\"\nmetrics = []\naxes = []\n").is_err());
    }
}
