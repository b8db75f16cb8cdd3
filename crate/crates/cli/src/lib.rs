//! The `freefit` command line: dimer reports, `U` sweeps to CSV, interaction
//! distances of spectrum files, Kohn-Sham and auxiliary-model reports, and
//! bound verification over a grid.

pub mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use freefit_core::dimer::dimer_entanglement_spectrum;
use freefit_core::entanglement::{local_densities, read_spectrum_file};
use freefit_core::hamiltonians::build_hubbard;
use freefit_core::idistance::{df_numeric_logged, DfResult, RestartLog};
use freefit_core::kohnsham::ks_reduced_density_matrix;
use freefit_core::optmodel::{aux_ground_spectrum, optimal_mu, TriangleDiagnostic};
use freefit_core::pipeline::{
    analyze_point, free_modes_for, verify_point, PointOptions, SweepRow, System,
};
use freefit_core::{
    df_dimer_closed, df_four_level, dimer_closed_form, invert_dimer, invert_iterative,
    reduced_density_matrix, AuxParams, DimerRegime, EntanglementSpectrum, HubbardParams, KsOptions,
    NumericOptions, SectorBasis,
};
use rayon::prelude::*;

use config::{ConfigFile, Defaults, MuForm, Scale, SweepConfig, UGrid};

pub const SEED_ENV: &str = "FREEFIT_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<freefit_core::Error> for CliError {
    fn from(e: freefit_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "freefit",
    version,
    about = "Interaction distance, Kohn-Sham and optimal free models for small Hubbard chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and exact analysis of the half-filled Hubbard dimer.
    Dimer(DimerArgs),
    /// Sweep U and write one CSV row per point.
    Sweep(SweepArgs),
    /// Interaction distance of a spectrum file or of a model ground state.
    Df(DfArgs),
    /// Kohn-Sham potential reproducing the interacting densities.
    Ks(ModelArgs),
    /// Ground-state spectrum of the two-chain auxiliary model.
    Aux(AuxArgs),
    /// Check every bound over a U grid; exit 1 on a violation.
    Verify(GridArgs),
}

#[derive(Debug, Args)]
pub struct DimerArgs {
    #[arg(long = "J", allow_negative_numbers = true)]
    pub hopping: f64,
    #[arg(long = "U", allow_negative_numbers = true)]
    pub interaction: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub dv: f64,
    #[arg(long, value_enum, default_value_t = MuForm::JScaled)]
    pub mu_convention: MuForm,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub hopping: f64,
    #[arg(long = "U", allow_negative_numbers = true)]
    pub interaction: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub dv: f64,
    #[arg(long = "L", default_value_t = 2)]
    pub sites: usize,
    #[arg(long)]
    pub n_up: Option<usize>,
    #[arg(long)]
    pub n_down: Option<usize>,
    /// Site potentials; replaces the linear profile built from `dv`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub potentials: Option<Vec<f64>>,
}

impl ModelArgs {
    fn system(&self) -> System {
        System {
            sites: self.sites,
            n_up: self.n_up.unwrap_or(self.sites.div_ceil(2)),
            n_down: self.n_down.unwrap_or(self.sites / 2),
            hopping: self.hopping,
            potentials: self.potentials.clone(),
            dv: self.dv,
        }
    }

    fn interaction(&self) -> Result<f64, CliError> {
        self.interaction
            .ok_or_else(|| CliError::domain("--U is required"))
    }
}

#[derive(Debug, Args)]
pub struct DfArgs {
    /// Spectrum file: one probability per line, `#` comments, decimals or `p/q`.
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Free modes for the numeric minimizer; prints the restart log.
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allow fewer modes than nonzero levels would need.
    #[arg(long)]
    pub allow_fewer_modes: bool,
}

#[derive(Debug, Args)]
pub struct AuxArgs {
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub hopping: f64,
    /// Chemical potential; otherwise derived from the optimal dimer at `--U`, `--dv`.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "interaction")]
    pub mu: Option<f64>,
    #[arg(long = "U", allow_negative_numbers = true)]
    pub interaction: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub dv: f64,
    #[arg(long, value_enum, default_value_t = MuForm::JScaled)]
    pub mu_convention: MuForm,
}

#[derive(Debug, Args, Clone, Default)]
pub struct GridArgs {
    /// JSON file with any of the fields below; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub hopping: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dv: Option<f64>,
    /// Explicit U values, comma separated.
    #[arg(long = "U", value_delimiter = ',', conflicts_with_all = ["u_min", "u_max", "u_count", "u_scale"])]
    pub u_list: Option<Vec<f64>>,
    #[arg(long = "U-min")]
    pub u_min: Option<f64>,
    #[arg(long = "U-max")]
    pub u_max: Option<f64>,
    #[arg(long = "U-count")]
    pub u_count: Option<usize>,
    #[arg(long = "U-scale", value_enum)]
    pub u_scale: Option<Scale>,
    #[arg(long = "L")]
    pub sites: Option<usize>,
    #[arg(long)]
    pub n_up: Option<usize>,
    #[arg(long)]
    pub n_down: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub potentials: Option<Vec<f64>>,
    /// CSV columns to write, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Seed for the numeric minimizer and observable sampling; defaults to
    /// FREEFIT_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mu_convention: Option<MuForm>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Random observables per point in `verify`.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script plotting the CSV.
    #[arg(long, requires = "out")]
    pub plot_script: Option<PathBuf>,
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::domain(format!("{SEED_ENV}={s} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

impl GridArgs {
    fn as_config(&self, defaults: &Defaults) -> ConfigFile {
        let u_grid = if let Some(v) = &self.u_list {
            Some(UGrid::List(v.clone()))
        } else if self.u_min.is_some()
            || self.u_max.is_some()
            || self.u_count.is_some()
            || self.u_scale.is_some()
        {
            let (min, max, count, scale) = match defaults.u_grid {
                UGrid::Range {
                    min,
                    max,
                    count,
                    scale,
                } => (min, max, count, scale),
                UGrid::List(_) => (0.0, 50.0, 200, Scale::Linear),
            };
            Some(UGrid::Range {
                min: self.u_min.unwrap_or(min),
                max: self.u_max.unwrap_or(max),
                count: self.u_count.unwrap_or(count),
                scale: self.u_scale.unwrap_or(scale),
            })
        } else {
            None
        };
        ConfigFile {
            hopping: self.hopping,
            dv: self.dv,
            u_grid,
            sites: self.sites,
            n_up: self.n_up,
            n_down: self.n_down,
            potentials: self.potentials.clone(),
            outputs: self.columns.clone(),
            seed: self.seed,
            mu_convention: self.mu_convention,
            restarts: self.restarts,
            samples: self.samples,
        }
    }

    pub fn resolve(&self, defaults: Defaults) -> Result<SweepConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::read(p)?,
            None => ConfigFile::default(),
        };
        let env = ConfigFile {
            seed: env_seed()?,
            ..ConfigFile::default()
        };
        let merged = env
            .overridden_by(file)
            .overridden_by(self.as_config(&defaults));
        SweepConfig::resolve(merged, defaults)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            if n == 0 {
                return Err(CliError::domain("--jobs must be positive"));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::domain(e.to_string()))
    }
}

pub fn sweep_defaults() -> Defaults {
    Defaults {
        u_grid: UGrid::Range {
            min: 0.0,
            max: 50.0,
            count: 200,
            scale: Scale::Linear,
        },
        samples: 500,
    }
}

pub fn verify_defaults() -> Defaults {
    Defaults {
        u_grid: UGrid::Range {
            min: 0.0,
            max: 50.0,
            count: 20,
            scale: Scale::Linear,
        },
        samples: 500,
    }
}

pub fn point_options(cfg: &SweepConfig) -> PointOptions {
    let mut opts = PointOptions {
        mu_convention: cfg.mu_convention.into(),
        ..PointOptions::default()
    };
    opts.numeric.restarts = cfg.restarts;
    opts.numeric.seed = cfg.seed;
    opts
}

/// Rows in grid order, computed on `pool`.
pub fn sweep_rows(cfg: &SweepConfig, pool: &rayon::ThreadPool) -> Result<Vec<SweepRow>, CliError> {
    let system = cfg.system();
    let opts = point_options(cfg);
    pool.install(|| {
        cfg.u_values
            .par_iter()
            .map(|&u| {
                analyze_point(&system, u, &opts)
                    .and_then(|a| a.row())
                    .map_err(|e| CliError::domain(format!("U = {u}: {e}")))
            })
            .collect()
    })
}

pub fn format_csv(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# freefit {} sweep", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# config {}",
        serde_json::to_string(cfg).expect("config serializes")
    );
    s.push_str(&cfg.outputs.join(","));
    s.push('\n');
    let idx = cfg.column_indices();
    for row in rows {
        let fields: Vec<String> = idx.iter().map(|&i| format!("{:.16e}", row.0[i])).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

pub fn plot_script(csv: &Path, cfg: &SweepConfig) -> String {
    let csv = csv.display();
    let groups: [(&str, &[&str]); 4] = [
        (
            "trace distance",
            &["DF", "Dtr_int_ks", "Dtr_int_opt", "Dtr_ks_opt"],
        ),
        ("natural metric", &["Dn_int_ks", "Dn_int_opt", "Dn_int_aux"]),
        ("entropy", &["S_int", "S_ks", "S_opt", "S_aux"]),
        ("mu", &["mu"]),
    ];
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {csv}");
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
    s.push_str("set xlabel 'U'\nset multiplot layout 2,2\n");
    for (label, cols) in groups {
        let present: Vec<&str> = cols
            .iter()
            .copied()
            .filter(|c| cfg.outputs.iter().any(|o| o == c))
            .collect();
        if present.is_empty() || !cfg.outputs.iter().any(|o| o == "U") {
            continue;
        }
        let _ = writeln!(s, "set ylabel '{label}'");
        let plots: Vec<String> = present
            .iter()
            .map(|c| format!("'{csv}' using 'U':'{c}' with lines title '{c}'"))
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    s.push_str("unset multiplot\n");
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args.grid.resolve(sweep_defaults())?;
    let rows = sweep_rows(&cfg, &args.grid.pool()?)?;
    let csv = format_csv(&cfg, &rows);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
            if let Some(script) = &args.plot_script {
                write_file(script, &plot_script(path, &cfg))?;
            }
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn levels(s: &EntanglementSpectrum) -> String {
    s.probs()
        .iter()
        .map(|p| format!("{p:.12e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_df(out: &mut dyn Write, r: &DfResult) -> std::io::Result<()> {
    writeln!(out, "DF = {:.16e}", r.df)?;
    writeln!(out, "branch = {}", r.branch.as_str())?;
    let b: Vec<String> = r
        .params
        .values()
        .iter()
        .map(|b| format!("{b:.12e}"))
        .collect();
    writeln!(out, "b = {}", b.join(" "))?;
    writeln!(out, "optimal spectrum = {}", levels(&r.free_spectrum))
}

fn cmd_dimer(a: &DimerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sol = dimer_closed_form(a.hopping, a.interaction, a.dv)?;
    let spectrum = dimer_entanglement_spectrum(&sol);
    let closed = df_dimer_closed(a.hopping, a.interaction, a.dv)?;
    let df = df_four_level(&spectrum)?;
    let ks = invert_dimer(sol.densities(), a.hopping)?;

    writeln!(out, "E = {:.16e}", sol.energy)?;
    let basis = Arc::new(SectorBasis::new(2, 1, 1)?);
    let exact =
        build_hubbard(&HubbardParams::dimer(a.hopping, a.interaction, a.dv), basis)?.ground_state();
    writeln!(out, "E (exact diagonalization) = {:.16e}", exact.energy)?;
    let [n1, n2] = sol.densities();
    writeln!(out, "densities = {n1:.12e} {n2:.12e}")?;
    writeln!(out, "spectrum = {}", levels(&spectrum))?;
    writeln!(out, "S = {:.16e}", spectrum.entropy())?;
    let regime = match closed.regime {
        DimerRegime::StronglyCorrelated => "strongly correlated",
        DimerRegime::Outside => "outside strongly correlated regime",
    };
    writeln!(out, "DF (closed form) = {:.16e} ({regime})", closed.value)?;
    print_df(out, &df)?;
    match optimal_mu(&df, a.hopping, a.mu_convention.into()) {
        Ok(mu) => writeln!(out, "mu = {mu:.16e}")?,
        Err(e) => writeln!(out, "mu = inf ({e})")?,
    }
    writeln!(out, "dv_ks = {:.16e}", ks.dv())?;
    Ok(())
}

fn print_restart_log(out: &mut dyn Write, log: &[RestartLog]) -> std::io::Result<()> {
    writeln!(out, "# restart, value, evaluations, start")?;
    for (k, r) in log.iter().enumerate() {
        let start: Vec<String> = r.start.iter().map(|x| format!("{x:.6}")).collect();
        writeln!(
            out,
            "{k}, {:.16e}, {}, [{}]",
            r.value,
            r.evaluations,
            start.join(" ")
        )?;
    }
    Ok(())
}

fn cmd_df(a: &DfArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spectrum = match &a.file {
        Some(path) => read_spectrum_file(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))??,
        None => {
            let u = a
                .model
                .interaction
                .ok_or_else(|| CliError::domain("give a spectrum file or --U for a model"))?;
            analyze_rho(&a.model.system(), u)?.spectrum()
        }
    };
    writeln!(out, "levels = {}", spectrum.len())?;
    writeln!(out, "spectrum = {}", levels(&spectrum))?;
    writeln!(out, "S = {:.16e}", spectrum.entropy())?;
    let seed = match a.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let opts = NumericOptions {
        restarts: a.restarts,
        seed,
        allow_fewer_modes: a.allow_fewer_modes,
        ..NumericOptions::default()
    };
    match a.modes {
        Some(m) => {
            let (r, log) = df_numeric_logged(&spectrum, m, &opts)?;
            print_df(out, &r)?;
            print_restart_log(out, &log)?;
        }
        None if spectrum.len() <= 4 => print_df(out, &df_four_level(&spectrum)?)?,
        None => {
            let (r, log) = df_numeric_logged(&spectrum, free_modes_for(&spectrum), &opts)?;
            print_df(out, &r)?;
            print_restart_log(out, &log)?;
        }
    }
    Ok(())
}

/// Reduced density matrix of the left half of a model ground state.
fn analyze_rho(system: &System, u: f64) -> Result<freefit_core::DensityMatrixBlock, CliError> {
    if system.hopping == 0.0 {
        return Err(CliError::domain("J must be nonzero"));
    }
    let basis = Arc::new(SectorBasis::new(system.sites, system.n_up, system.n_down)?);
    let params = HubbardParams {
        hopping: system.hopping,
        interaction: u,
        potentials: system.site_potentials()?,
        boundary: Default::default(),
    };
    let psi = build_hubbard(&params, basis.clone())?.ground_state().vector;
    Ok(reduced_density_matrix(&psi, basis.as_ref(), &system.cut())?)
}

fn cmd_ks(a: &ModelArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let system = a.system();
    if system.hopping == 0.0 {
        return Err(CliError::domain("J must be nonzero"));
    }
    let u = a.interaction()?;
    let basis = Arc::new(SectorBasis::new(system.sites, system.n_up, system.n_down)?);
    let params = HubbardParams {
        hopping: system.hopping,
        interaction: u,
        potentials: system.site_potentials()?,
        boundary: Default::default(),
    };
    let psi = build_hubbard(&params, basis.clone())?.ground_state().vector;
    let n = local_densities(&psi, basis.as_ref())?;
    let ks = if system.is_dimer() {
        invert_dimer([n[0], n[1]], system.hopping)?
    } else {
        invert_iterative(&n, system.hopping, basis, &KsOptions::default())?
    };
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.12e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "densities = {}", join(&n))?;
    writeln!(out, "v_ks = {}", join(&ks.v_ks))?;
    writeln!(
        out,
        "dv_ks = {:.16e}",
        ks.v_ks[0] - ks.v_ks[ks.v_ks.len() - 1]
    )?;
    writeln!(out, "residual = {:.3e}", ks.residual)?;
    writeln!(out, "iterations = {}", ks.iterations)?;
    let rho = ks_reduced_density_matrix(&ks, &system.cut())?;
    writeln!(out, "S_ks = {:.16e}", rho.entropy())?;
    Ok(())
}

fn cmd_aux(a: &AuxArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (mu, target) = match (a.mu, a.interaction) {
        (Some(mu), _) => (mu, None),
        (None, Some(u)) => {
            let sol = dimer_closed_form(a.hopping, u, a.dv)?;
            let df = df_four_level(&dimer_entanglement_spectrum(&sol))?;
            (
                optimal_mu(&df, a.hopping, a.mu_convention.into())?,
                Some(df.free_spectrum),
            )
        }
        (None, None) => return Err(CliError::domain("give --mu, or --U for the optimal dimer")),
    };
    if a.hopping == 0.0 {
        return Err(CliError::domain("J must be nonzero"));
    }
    let s = aux_ground_spectrum(&AuxParams {
        hopping: a.hopping,
        mu,
    })?;
    writeln!(out, "mu = {mu:.16e}")?;
    writeln!(out, "spectrum = {}", levels(&s))?;
    writeln!(out, "S_aux = {:.16e}", s.entropy())?;
    if let Some(t) = target {
        let dev = s
            .probs()
            .iter()
            .zip(t.probs())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        writeln!(out, "optimal spectrum = {}", levels(&t))?;
        writeln!(out, "max deviation = {dev:.3e}")?;
    }
    Ok(())
}

fn cmd_verify(g: &GridArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = g.resolve(verify_defaults())?;
    let system = cfg.system();
    let opts = point_options(&cfg);
    let results: Vec<_> = g.pool()?.install(|| {
        cfg.u_values
            .par_iter()
            .enumerate()
            .map(|(k, &u)| {
                let a = analyze_point(&system, u, &opts)?;
                verify_point(&a, cfg.samples, cfg.seed.wrapping_add(k as u64))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut failures = Vec::new();
    let mut c_half = 0;
    let mut c_one = 0;
    for v in &results {
        let o = &v.observables;
        c_half += o.violations_c_half;
        c_one += o.violations_c_one;
        let t = &v.triangle;
        let ratio = match t.diagnostic {
            TriangleDiagnostic::Coincident => "coincident".to_string(),
            TriangleDiagnostic::Finite => format!("{:.4e}", t.ratio),
            TriangleDiagnostic::Diverging => format!("{:.4e} diverging", t.ratio),
        };
        let aux = match &v.density_int_aux {
            Some(r) => format!("{:.3e}", r.slack),
            None => "-".into(),
        };
        writeln!(
            out,
            "U={:<10.4} observables {}/{} ok (min slack {:.3e}) | n1 slack {:.3e} | density KS-opt slack {:.3e} | density int-aux slack {} | DF={:.4e} Dtr_int_ks={:.4e} ratio {}",
            v.interaction,
            o.samples - o.violations,
            o.samples,
            o.min_slack,
            v.site_number.slack,
            v.density_ks_opt.slack,
            aux,
            t.lower.lhs,
            t.lower.rhs,
            ratio,
        )?;
        if !v.hard_bounds_hold() {
            failures.push(v.interaction);
        }
    }
    let total: usize = results.iter().map(|v| v.observables.samples).sum();
    writeln!(
        out,
        "diagnostic: prefactor |O_max|/2 violated {c_half}/{total}, |O_max| violated {c_one}/{total}"
    )?;
    if failures.is_empty() {
        writeln!(out, "all hard bounds hold at {} points", results.len())?;
        Ok(())
    } else {
        let pts: Vec<String> = failures.iter().map(|u| format!("U={u}")).collect();
        Err(CliError::Violation(format!(
            "bound violated at {}",
            pts.join(", ")
        )))
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Dimer(a) => cmd_dimer(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Df(a) => cmd_df(a, out),
        Command::Ks(a) => cmd_ks(a, out),
        Command::Aux(a) => cmd_aux(a, out),
        Command::Verify(g) => cmd_verify(g, out),
    }
}
