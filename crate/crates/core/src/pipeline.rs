//! Everything computed at one point of a `U` sweep: interacting, Kohn-Sham,
//! optimal and auxiliary states on the left half of the chain, and the
//! distances and entropies between them.

use std::sync::Arc;

use crate::entanglement::{
    local_densities, natural_metric, reduced_density_matrix, trace_distance_matrices,
    DensityMatrixBlock, EntanglementSpectrum,
};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_hubbard, dimer_potentials, AuxParams, Boundary, HubbardParams};
use crate::hilbert::SectorBasis;
use crate::idistance::{df_four_level, df_numeric, DfResult, NumericOptions};
use crate::kohnsham::{
    invert_dimer, invert_iterative, ks_reduced_density_matrix, KsOptions, KsSolution,
};
use crate::optmodel::{
    aux_levels, aux_reduced_density_matrix, density_profile, embed_spectrum, mu_from_levels,
    optimal_state, sample_observables, verify_density_bound, verify_fixed_observable,
    verify_triangle, BoundReport, MuConvention, OptimalState, TriangleReport,
};

/// Lattice, filling and the `U`-independent parameters of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub sites: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub hopping: f64,
    /// Site potentials. `None` spreads `dv` linearly from `dv/2` on the first
    /// site to `-dv/2` on the last.
    pub potentials: Option<Vec<f64>>,
    pub dv: f64,
}

impl System {
    pub fn dimer(hopping: f64, dv: f64) -> Self {
        System {
            sites: 2,
            n_up: 1,
            n_down: 1,
            hopping,
            potentials: None,
            dv,
        }
    }

    pub fn is_dimer(&self) -> bool {
        self.sites == 2 && self.n_up == 1 && self.n_down == 1
    }

    pub fn site_potentials(&self) -> Result<Vec<f64>> {
        match &self.potentials {
            Some(v) if v.len() != self.sites => Err(Error::domain(format!(
                "{} potentials for {} sites",
                v.len(),
                self.sites
            ))),
            Some(v) => Ok(v.clone()),
            None if self.sites == 2 => Ok(dimer_potentials(self.dv)),
            None if self.sites == 1 => Ok(vec![0.0]),
            None => {
                let last = (self.sites - 1) as f64;
                Ok((0..self.sites)
                    .map(|j| self.dv * (0.5 - j as f64 / last))
                    .collect())
            }
        }
    }

    /// Left half of the chain.
    pub fn cut(&self) -> Vec<usize> {
        (0..(self.sites / 2).max(1)).collect()
    }

    pub fn particles(&self) -> f64 {
        (self.n_up + self.n_down) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOptions {
    pub mu_convention: MuConvention,
    pub numeric: NumericOptions,
    pub ks: KsOptions,
}

impl Default for PointOptions {
    fn default() -> Self {
        PointOptions {
            mu_convention: MuConvention::default(),
            numeric: NumericOptions::default(),
            // the residual is a max over sites; keep the summed mismatch
            // below 1e-8 on any desk-scale chain
            ks: KsOptions {
                tol: 1e-10,
                ..KsOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuxState {
    pub mu: f64,
    pub spectrum: EntanglementSpectrum,
    /// Auxiliary levels placed on the interacting eigenvectors.
    pub embedded: DensityMatrixBlock,
}

#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub system: System,
    pub interaction: f64,
    pub energy: f64,
    pub densities: Vec<f64>,
    pub rho_int: DensityMatrixBlock,
    pub df: DfResult,
    pub ks: KsSolution,
    pub rho_ks: DensityMatrixBlock,
    pub opt: OptimalState,
    /// Present for the half-filled dimer only.
    pub aux: Option<AuxState>,
}

/// Smallest mode count whose free spectrum has room for every level.
pub fn free_modes_for(s: &EntanglementSpectrum) -> usize {
    s.len().next_power_of_two().trailing_zeros().max(1) as usize
}

pub fn analyze_point(
    system: &System,
    interaction: f64,
    opts: &PointOptions,
) -> Result<PointAnalysis> {
    if system.hopping == 0.0 {
        return Err(Error::domain("J must be nonzero"));
    }
    let basis = Arc::new(SectorBasis::new(system.sites, system.n_up, system.n_down)?);
    let params = HubbardParams {
        hopping: system.hopping,
        interaction,
        potentials: system.site_potentials()?,
        boundary: Boundary::Open,
    };
    let gs = build_hubbard(&params, basis.clone())?.ground_state();
    let densities = local_densities(&gs.vector, basis.as_ref())?;
    let cut = system.cut();
    let rho_int = reduced_density_matrix(&gs.vector, basis.as_ref(), &cut)?;
    let spectrum = rho_int.spectrum();
    let df = if spectrum.len() <= 4 {
        df_four_level(&spectrum)?
    } else {
        df_numeric(&spectrum, free_modes_for(&spectrum), &opts.numeric)?
    };

    let ks = if system.is_dimer() {
        invert_dimer([densities[0], densities[1]], system.hopping)?
    } else {
        invert_iterative(&densities, system.hopping, basis.clone(), &opts.ks)?
    };
    let rho_ks = ks_reduced_density_matrix(&ks, &cut)?;
    let opt = optimal_state(&rho_int, &df)?;

    let aux = if system.is_dimer() {
        let (r1, r2) = aux_levels(&df)?;
        let mu = mu_from_levels(r1, r2, system.hopping, opts.mu_convention)?;
        let aux_rho = aux_reduced_density_matrix(&AuxParams {
            hopping: system.hopping,
            mu,
        })?;
        let spectrum = aux_rho.spectrum();
        let embedded = embed_spectrum(&rho_int, &spectrum)?;
        Some(AuxState {
            mu,
            spectrum,
            embedded,
        })
    } else {
        None
    };

    Ok(PointAnalysis {
        system: system.clone(),
        interaction,
        energy: gs.energy,
        densities,
        rho_int,
        df,
        ks,
        rho_ks,
        opt,
        aux,
    })
}

pub const COLUMNS: [&str; 15] = [
    "U",
    "E",
    "DF",
    "Dtr_int_ks",
    "Dtr_int_opt",
    "Dtr_ks_opt",
    "Dn_int_ks",
    "Dn_int_opt",
    "Dn_int_aux",
    "S_int",
    "S_ks",
    "S_opt",
    "S_aux",
    "mu",
    "dv_ks",
];

/// One CSV row, in [`COLUMNS`] order. Auxiliary columns are `NaN` away from
/// the dimer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow(pub [f64; 15]);

impl SweepRow {
    pub fn get(&self, column: &str) -> Option<f64> {
        COLUMNS.iter().position(|c| *c == column).map(|i| self.0[i])
    }
}

impl PointAnalysis {
    /// Site densities of the reduced region followed by the rest of the
    /// system's particle count.
    pub fn int_profile(&self) -> Vec<f64> {
        density_profile(&self.rho_int, self.system.particles())
    }

    pub fn row(&self) -> Result<SweepRow> {
        let n = self.system.particles();
        let int_profile = self.int_profile();
        let nan = f64::NAN;
        let (dn_aux, s_aux, mu) = match &self.aux {
            Some(a) => (
                natural_metric(&int_profile, &density_profile(&a.embedded, n))?,
                a.spectrum.entropy(),
                a.mu,
            ),
            None => (nan, nan, nan),
        };
        let v = &self.ks.v_ks;
        Ok(SweepRow([
            self.interaction,
            self.energy,
            self.df.df,
            trace_distance_matrices(&self.rho_int, &self.rho_ks)?,
            trace_distance_matrices(&self.rho_int, &self.opt.matrix)?,
            trace_distance_matrices(&self.rho_ks, &self.opt.matrix)?,
            natural_metric(&self.densities, &self.ks.densities)?,
            natural_metric(&int_profile, &density_profile(&self.opt.matrix, n))?,
            dn_aux,
            self.rho_int.entropy(),
            self.rho_ks.entropy(),
            self.opt.spectrum.entropy(),
            s_aux,
            mu,
            v[0] - v[v.len() - 1],
        ]))
    }
}

/// Counts of random observables against three prefactors `c` in
/// `|<O>_int - <O>_opt| <= c |O_max| D_tr`. Only `c = 2` is a theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSummary {
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    pub violations_c_half: usize,
    pub violations_c_one: usize,
}

#[derive(Debug, Clone)]
pub struct PointVerification {
    pub interaction: f64,
    pub observables: ObservableSummary,
    /// `n_1` on the reduced region.
    pub site_number: BoundReport,
    /// Kohn-Sham against optimal densities.
    pub density_ks_opt: BoundReport,
    pub density_int_aux: Option<BoundReport>,
    pub triangle: TriangleReport,
}

impl PointVerification {
    pub fn hard_bounds_hold(&self) -> bool {
        self.observables.violations == 0
            && self.site_number.satisfied
            && self.density_ks_opt.satisfied
            && self.density_int_aux.is_none_or(|r| r.satisfied)
            && self.triangle.lower.satisfied
    }
}

pub fn verify_point(a: &PointAnalysis, n_samples: usize, seed: u64) -> Result<PointVerification> {
    let samples = sample_observables(&a.rho_int, &a.opt.matrix, n_samples, seed)?;
    let reports: Vec<BoundReport> = samples.iter().map(|s| s.report()).collect();
    let observables = ObservableSummary {
        samples: n_samples,
        violations: reports.iter().filter(|r| !r.satisfied).count(),
        min_slack: reports
            .iter()
            .map(|r| r.slack)
            .fold(f64::INFINITY, f64::min),
        violations_c_half: samples
            .iter()
            .filter(|s| !s.report_with_prefactor(0.5).satisfied)
            .count(),
        violations_c_one: samples
            .iter()
            .filter(|s| !s.report_with_prefactor(1.0).satisfied)
            .count(),
    };
    let n = a.system.particles();
    let site_number = verify_fixed_observable(
        &a.rho_int,
        &a.opt.matrix,
        &a.rho_int.site_number_operator(0),
    )?;
    let ks_profile = {
        let k = a.rho_int.sites().len();
        let mut p = a.ks.densities[..k].to_vec();
        p.push(n - p.iter().sum::<f64>());
        p
    };
    let density_ks_opt = verify_density_bound(&ks_profile, &a.opt.matrix, &a.rho_int, n)?;
    let density_int_aux = a
        .aux
        .as_ref()
        .map(|aux| verify_density_bound(&a.int_profile(), &aux.embedded, &a.rho_int, n))
        .transpose()?;
    let triangle = verify_triangle(&a.rho_int, &a.rho_ks, a.df.df)?;
    Ok(PointVerification {
        interaction: a.interaction,
        observables,
        site_number,
        density_ks_opt,
        density_int_aux,
        triangle,
    })
}
