//! Commands behind the `oamnfc` binary. Each takes resolved inputs, writes
//! its files and returns a report for the caller to print.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{import_s_parameters, matrix_circulant_residual, matrix_to_csv, reduce_matrix, ChannelMatrix, SParameterDocument};
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::harness::{evaluate_point, recipe, run_sweep_with_progress, table_csv, Metric, SweepResult, SweepRow, SweepSpec, RECIPES};
use crate::linalg::{pinv, to_complex, CMat};
use crate::metrics::{self, capacity_mimo, identity_correlation};
use crate::txrx::{estimate_channel_ls, DftOperator};

/// 0 success, 2 configuration or input error, 3 numerical failure.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. }
        | Error::RankDeficient { .. }
        | Error::Intersecting(_)
        | Error::Dimension(_)
        | Error::NotAMultiple { .. } => 3,
        _ => 2,
    }
}

#[derive(Debug, Clone)]
pub struct ChannelDump {
    pub shape: (usize, usize),
    pub files: Vec<PathBuf>,
    /// `None` when `N_r` is not a multiple of `N_t`.
    pub circulant_residual: Option<f64>,
    pub condition: f64,
    pub notice: Option<String>,
}

fn with_digest(digest: &str, body: String) -> String {
    format!("# config_sha256: {digest}\n{body}")
}

/// Writes `H.csv`, `M.csv`, `Mt.csv` and, when `N_r` is a multiple of `N_t`,
/// `H_hat.csv` and `h_oam.csv` into `out_dir`.
pub fn cmd_channel(cfg: &SimulationConfig, out_dir: &Path) -> Result<ChannelDump> {
    let sc = cfg.scenario()?;
    let ch = ChannelMatrix::analytic(&sc.geometry, &sc.electrical, sc.flags.inductance_method, sc.flags.crosstalk)?;
    let mi = ch.inductance.as_ref().expect("analytic channels carry inductances");
    let digest = cfg.digest();
    let mut tables: Vec<(&str, CMat)> =
        vec![("H.csv", ch.h.clone()), ("M.csv", to_complex(&mi.tx_rx)), ("Mt.csv", to_complex(&mi.tx_tx))];
    let mut residual = None;
    let mut notice = None;
    match reduce_matrix(&ch.h) {
        Ok((h_hat, _)) => {
            let d = DftOperator::new(ch.n_tx())?.to_mode_domain(&h_hat)?;
            let h_oam = CMat::from_fn(ch.n_tx(), 1, |l, _| d[(l, l)]);
            residual = Some(matrix_circulant_residual(&h_hat));
            tables.push(("H_hat.csv", h_hat));
            tables.push(("h_oam.csv", h_oam));
        }
        Err(e) => notice = Some(format!("reduction skipped: {e}")),
    }
    let condition = pinv(&ch.h)?.condition;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    for (name, m) in tables {
        let path = out_dir.join(name);
        std::fs::write(&path, with_digest(&digest, matrix_to_csv(&m)))?;
        files.push(path);
    }
    Ok(ChannelDump { shape: ch.h.shape(), files, circulant_residual: residual, condition, notice })
}

/// One row per SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub config_sha256: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl EvaluateReport {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    /// Notes of rows where some metric could not be computed.
    pub fn failures(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter_map(|r| r.note.as_ref().map(|n| format!("snr_db {}: {n}", r.coords[0])))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let meta = [
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("seed", self.seed.to_string()),
            ("config_sha256", self.config_sha256.clone()),
        ];
        table_csv(&meta, &["snr_db".to_string()], &self.columns, &self.rows)
    }

    /// Fixed-width table for terminals.
    pub fn to_text(&self) -> String {
        let header: Vec<&str> = std::iter::once("snr_db").chain(self.columns.iter().map(String::as_str)).collect();
        let width = header.iter().map(|h| h.len()).max().unwrap_or(8).max(12);
        let mut out = String::new();
        for h in &header {
            out.push_str(&format!("{h:>width$} "));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:>width$} ", r.coords[0]));
            for v in &r.values {
                match v {
                    Some(x) => out.push_str(&format!("{x:>width$.6e} ")),
                    None => out.push_str(&format!("{:>width$} ", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvaluateOptions {
    /// Add the closed-form bounds (aligned geometries only).
    pub bounds: bool,
    /// Monte Carlo BER with this many bits per point.
    pub trials: Option<u64>,
    pub seed: u64,
}

fn snr_points(cfg: &SimulationConfig) -> Vec<f64> {
    if cfg.budget.snr_db.is_empty() {
        vec![10.0 * (cfg.budget.tx_power_w / cfg.budget.noise_power_w).log10()]
    } else {
        cfg.budget.snr_db.clone()
    }
}

fn at_snr(cfg: &SimulationConfig, snr: f64) -> Result<SimulationConfig> {
    let mut c = cfg.clone();
    c.budget.snr_db.clear();
    // with no transmit power the configured noise is kept
    if c.budget.tx_power_w > 0.0 {
        c.set("snr_db", snr)?;
    }
    Ok(c)
}

/// Capacity of every scheme and analytic BER at each SNR of the config.
pub fn cmd_evaluate(cfg: &SimulationConfig, opts: &EvaluateOptions) -> Result<EvaluateReport> {
    cfg.validate()?;
    let mut list = vec![
        Metric::CapacityOam,
        Metric::CapacityLs,
        Metric::CapacitySiso,
        Metric::CapacityMimo,
        Metric::CapacityMimoWf,
        Metric::BerAnalytic,
    ];
    if opts.bounds {
        list.push(Metric::Bounds);
    }
    if let Some(t) = opts.trials {
        if t == 0 {
            return Err(Error::Config("--trials must be positive".into()));
        }
        list.push(Metric::BerMc);
    }
    let trials = opts.trials.unwrap_or(1);
    let rows = snr_points(cfg)
        .into_iter()
        .enumerate()
        .map(|(i, snr)| {
            let c = at_snr(cfg, snr)?;
            let mut row = evaluate_point(&c, &[], &[], &list, trials, opts.seed, i as u64);
            row.coords = vec![snr];
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(EvaluateReport {
        config_sha256: cfg.digest(),
        seed: opts.seed,
        columns: crate::harness::metric_columns(cfg, &list),
        rows,
    })
}

/// Runs a named recipe or a TOML spec file. `base`, `seed` and `trials`
/// override the spec when given.
pub fn cmd_sweep(
    target: &str,
    base: Option<&SimulationConfig>,
    seed: Option<u64>,
    trials: Option<u64>,
    out: Option<&Path>,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<SweepResult> {
    let mut spec = if RECIPES.contains(&target) {
        recipe(target)?
    } else if Path::new(target).is_file() {
        SweepSpec::load(target)?
    } else {
        return Err(Error::Sweep(format!(
            "'{target}' is neither a recipe ({}) nor a spec file",
            RECIPES.join(", ")
        )));
    };
    if let Some(b) = base {
        spec.base = b.clone();
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(t) = trials {
        spec.trials = t;
    }
    spec.validate()?;
    let result = run_sweep_with_progress(&spec, progress)?;
    if let Some(path) = out {
        result.write(path)?;
    }
    Ok(result)
}

/// LS-path metrics of a channel taken from an S-parameter document; budget,
/// pilot and flags come from `cfg`.
pub fn cmd_import_s(doc_path: &Path, cfg: &SimulationConfig, seed: u64) -> Result<EvaluateReport> {
    cfg.validate()?;
    let doc = SParameterDocument::read(doc_path)?;
    evaluate_imported(&import_s_parameters(&doc)?, cfg, seed)
}

/// Metrics that need only the channel matrix.
pub fn evaluate_imported(ch: &ChannelMatrix, cfg: &SimulationConfig, seed: u64) -> Result<EvaluateReport> {
    let sc = cfg.scenario()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_est = if sc.flags.estimated_csi {
        sc.pilot.validate_for(ch.n_tx(), ch.n_rx())?;
        estimate_channel_ls(ch, &sc.pilot, &mut rng)?
    } else {
        ch.h.clone()
    };
    let columns: Vec<String> =
        ["capacity_ls", "ber_analytic_ls", "capacity_mimo", "capacity_mimo_wf", "circulant_residual"]
            .map(String::from)
            .to_vec();
    let residual = reduce_matrix(&ch.h).ok().map(|(h, _)| matrix_circulant_residual(&h));
    let gt = identity_correlation(ch.n_tx());
    let gr = identity_correlation(ch.n_rx());
    let condition = pinv(&h_est).ok().map(|p| p.condition);
    let rows = snr_points(cfg)
        .into_iter()
        .map(|snr| {
            let budget = at_snr(cfg, snr)?.scenario()?.budget;
            let mut notes = Vec::new();
            let mut keep = |name: &str, r: Result<f64>| match r {
                Ok(v) => Some(v),
                Err(e) => {
                    notes.push(format!("{name}: {e}"));
                    None
                }
            };
            let values = vec![
                keep("capacity_ls", metrics::capacity_ls(ch, &h_est, &budget).map(|r| r.total_bits)),
                keep("ber_analytic_ls", metrics::ber_ls(ch, &h_est, &budget)),
                keep("capacity_mimo", capacity_mimo(ch, &budget, &gt, &gr, false).map(|r| r.total_bits)),
                keep("capacity_mimo_wf", capacity_mimo(ch, &budget, &gt, &gr, true).map(|r| r.total_bits)),
                residual,
            ];
            let note = (!notes.is_empty()).then(|| notes.join("; "));
            Ok(SweepRow { coords: vec![snr], values, condition, note })
        })
        .collect::<Result<_>>()?;
    Ok(EvaluateReport { config_sha256: cfg.digest(), seed, columns, rows })
}
