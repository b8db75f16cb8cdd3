//! Sweep configuration: an optional JSON file, overridden field by field by
//! command-line flags.

use std::path::Path;

use freefit_core::pipeline::{System, COLUMNS};
use freefit_core::MuConvention;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MuForm {
    /// `2|J| (sqrt(r1/r2) - sqrt(r2/r1))`
    #[default]
    JScaled,
    /// `2 (sqrt(r1/r2) - sqrt(r2/r1))`, independent of J
    Printed,
}

impl From<MuForm> for MuConvention {
    fn from(m: MuForm) -> Self {
        match m {
            MuForm::JScaled => MuConvention::JScaled,
            MuForm::Printed => MuConvention::Printed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UGrid {
    List(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        count: usize,
        #[serde(default)]
        scale: Scale,
    },
}

impl UGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match self {
            UGrid::List(v) => v.clone(),
            UGrid::Range {
                min,
                max,
                count,
                scale,
            } => {
                let (min, max, count) = (*min, *max, *count);
                if count == 0 {
                    return Err(CliError::domain("U grid needs at least one point"));
                }
                if count == 1 {
                    vec![min]
                } else {
                    let step = |k: usize| k as f64 / (count - 1) as f64;
                    match scale {
                        Scale::Linear => (0..count).map(|k| min + (max - min) * step(k)).collect(),
                        Scale::Log => {
                            if min <= 0.0 {
                                return Err(CliError::domain(
                                    "log U grid needs a positive minimum",
                                ));
                            }
                            let (a, b) = (min.ln(), max.ln());
                            (0..count).map(|k| (a + (b - a) * step(k)).exp()).collect()
                        }
                    }
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::domain("U grid is empty"));
        }
        if v.iter().any(|u| !u.is_finite()) {
            return Err(CliError::domain("U grid has non-finite values"));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::domain("U grid must be strictly increasing"));
        }
        Ok(v)
    }
}

/// Every field optional, as read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "J")]
    pub hopping: Option<f64>,
    pub dv: Option<f64>,
    #[serde(rename = "U_grid")]
    pub u_grid: Option<UGrid>,
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    pub n_up: Option<usize>,
    pub n_down: Option<usize>,
    pub potentials: Option<Vec<f64>>,
    pub outputs: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub mu_convention: Option<MuForm>,
    pub restarts: Option<usize>,
    pub samples: Option<usize>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::domain(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            hopping: over.hopping.or(self.hopping),
            dv: over.dv.or(self.dv),
            u_grid: over.u_grid.or(self.u_grid),
            sites: over.sites.or(self.sites),
            n_up: over.n_up.or(self.n_up),
            n_down: over.n_down.or(self.n_down),
            potentials: over.potentials.or(self.potentials),
            outputs: over.outputs.or(self.outputs),
            seed: over.seed.or(self.seed),
            mu_convention: over.mu_convention.or(self.mu_convention),
            restarts: over.restarts.or(self.restarts),
            samples: over.samples.or(self.samples),
        }
    }
}

/// Fully resolved configuration; echoed into the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    #[serde(rename = "J")]
    pub hopping: f64,
    pub dv: f64,
    #[serde(rename = "U")]
    pub u_values: Vec<f64>,
    #[serde(rename = "L")]
    pub sites: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub potentials: Option<Vec<f64>>,
    pub outputs: Vec<String>,
    pub seed: u64,
    pub mu_convention: MuForm,
    pub restarts: usize,
    pub samples: usize,
}

/// Defaults that differ between `sweep` and `verify`.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub u_grid: UGrid,
    pub samples: usize,
}

impl SweepConfig {
    pub fn resolve(c: ConfigFile, defaults: Defaults) -> Result<Self, CliError> {
        let sites = c.sites.unwrap_or(2);
        if sites == 0 {
            return Err(CliError::domain("L must be positive"));
        }
        let n_up = c.n_up.unwrap_or(sites.div_ceil(2));
        let n_down = c.n_down.unwrap_or(sites / 2);
        if n_up > sites || n_down > sites {
            return Err(CliError::domain(format!(
                "{n_up} up and {n_down} down fermions do not fit on {sites} sites"
            )));
        }
        let hopping = c.hopping.unwrap_or(1.0);
        if hopping == 0.0 {
            return Err(CliError::domain("J must be nonzero"));
        }
        let outputs = c
            .outputs
            .unwrap_or_else(|| COLUMNS.iter().map(|s| s.to_string()).collect());
        if let Some(bad) = outputs.iter().find(|o| !COLUMNS.contains(&o.as_str())) {
            return Err(CliError::domain(format!(
                "unknown column {bad}; expected one of {}",
                COLUMNS.join(",")
            )));
        }
        if outputs.is_empty() {
            return Err(CliError::domain("no output columns selected"));
        }
        let restarts = c.restarts.unwrap_or(32);
        if restarts == 0 {
            return Err(CliError::domain("restarts must be positive"));
        }
        Ok(SweepConfig {
            hopping,
            dv: c.dv.unwrap_or(0.5),
            u_values: c.u_grid.unwrap_or(defaults.u_grid).values()?,
            sites,
            n_up,
            n_down,
            potentials: c.potentials,
            outputs,
            seed: c.seed.unwrap_or(0),
            mu_convention: c.mu_convention.unwrap_or_default(),
            restarts,
            samples: c.samples.unwrap_or(defaults.samples),
        })
    }

    pub fn system(&self) -> System {
        System {
            sites: self.sites,
            n_up: self.n_up,
            n_down: self.n_down,
            hopping: self.hopping,
            potentials: self.potentials.clone(),
            dv: self.dv,
        }
    }

    /// Positions of the selected columns in the full row.
    pub fn column_indices(&self) -> Vec<usize> {
        self.outputs
            .iter()
            .map(|o| {
                COLUMNS
                    .iter()
                    .position(|c| c == o)
                    .expect("validated column")
            })
            .collect()
    }
}
