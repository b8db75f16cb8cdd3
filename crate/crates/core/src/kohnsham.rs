//! Kohn-Sham inversion: the non-interacting chain, with the same hopping as
//! the interacting one, whose ground state reproduces a target set of site
//! densities.

use std::sync::Arc;

use nalgebra::DVector;

use crate::entanglement::{local_densities, reduced_density_matrix, DensityMatrixBlock};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_free_spinful, dimer_potentials};
use crate::hilbert::SectorBasis;

/// Smallest many-body gap accepted for a non-interacting ground state.
pub const MIN_GAP: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KsSolution {
    pub hopping: f64,
    /// Site potentials with zero mean.
    pub v_ks: Vec<f64>,
    pub basis: Arc<SectorBasis>,
    pub state: DVector<f64>,
    pub densities: Vec<f64>,
    /// `max_j |n_j - n_target_j|`.
    pub residual: f64,
    pub iterations: usize,
}

impl KsSolution {
    /// `v_1 - v_2`; only meaningful for two sites.
    pub fn dv(&self) -> f64 {
        self.v_ks[0] - self.v_ks[1]
    }
}

struct FreeGround {
    state: DVector<f64>,
    densities: Vec<f64>,
}

fn free_ground(hopping: f64, potentials: &[f64], basis: &Arc<SectorBasis>) -> Result<FreeGround> {
    let gs = build_free_spinful(hopping, potentials, basis.clone())?.ground_state();
    if gs.gap < MIN_GAP {
        return Err(Error::Degenerate { gap: gs.gap });
    }
    let densities = local_densities(&gs.vector, basis.as_ref())?;
    Ok(FreeGround {
        state: gs.vector,
        densities,
    })
}

/// `dv = 2|J|(1 - n_1) / sqrt(n_1 (2 - n_1))`, from the bonding orbital of the
/// two-site single-particle problem.
pub fn analytic_dimer_dv(n1: f64, hopping: f64) -> f64 {
    2.0 * hopping.abs() * (1.0 - n1) / (n1 * (2.0 - n1)).sqrt()
}

/// Kohn-Sham dimer at half filling by bisection on the potential asymmetry.
pub fn invert_dimer(n_target: [f64; 2], hopping: f64) -> Result<KsSolution> {
    if hopping == 0.0 || !hopping.is_finite() {
        return Err(Error::domain("J must be nonzero"));
    }
    let [t1, t2] = n_target;
    if (t1 + t2 - 2.0).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "dimer densities must sum to 2, got {}",
            t1 + t2
        )));
    }
    if !(t1 > 0.0 && t1 < 2.0) {
        return Err(Error::UnattainableDensity(format!(
            "n_1 = {t1} needs an infinite potential"
        )));
    }
    let basis = Arc::new(SectorBasis::new(2, 1, 1)?);
    let n1_at = |dv: f64| -> Result<f64> {
        Ok(free_ground(hopping, &dimer_potentials(dv), &basis)?.densities[0])
    };

    // n_1 decreases monotonically in dv
    let mut width = hopping.abs();
    while n1_at(width)? > t1 || n1_at(-width)? < t1 {
        width *= 2.0;
        if width > 1e12 * hopping.abs() {
            return Err(Error::UnattainableDensity(format!(
                "no finite potential reaches n_1 = {t1}"
            )));
        }
    }
    let (mut lo, mut hi) = (-width, width);
    let mut iterations = 0;
    while iterations < 400 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let n1 = n1_at(mid)?;
        if n1 == t1 {
            lo = mid;
            hi = mid;
            break;
        }
        if n1 > t1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dv = 0.5 * (lo + hi);
    debug_assert!(
        (dv - analytic_dimer_dv(t1, hopping)).abs() < 1e-6 * (1.0 + dv.abs()),
        "bisection {dv} vs analytic {}",
        analytic_dimer_dv(t1, hopping)
    );
    let v_ks = dimer_potentials(dv);
    let ground = free_ground(hopping, &v_ks, &basis)?;
    let residual = residual(&ground.densities, &n_target);
    Ok(KsSolution {
        hopping,
        v_ks,
        basis,
        state: ground.state,
        densities: ground.densities,
        residual,
        iterations,
    })
}

fn residual(n: &[f64], target: &[f64]) -> f64 {
    n.iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions {
            tol: 1e-8,
            max_iter: 5000,
            initial_step: 1.0,
        }
    }
}

/// Damped fixed point `v <- v + alpha (n_KS[v] - n_target)`, gauge `sum v = 0`.
/// The step is halved and the update retried whenever the residual grows.
pub fn invert_iterative(
    n_target: &[f64],
    hopping: f64,
    basis: Arc<SectorBasis>,
    opts: &KsOptions,
) -> Result<KsSolution> {
    let sites = basis.sites();
    if n_target.len() != sites {
        return Err(Error::domain(format!(
            "{} target densities for {sites} sites",
            n_target.len()
        )));
    }
    let total = (basis.n_up() + basis.n_down()) as f64;
    let sum: f64 = n_target.iter().sum();
    if (sum - total).abs() > 1e-8 {
        return Err(Error::domain(format!(
            "target densities sum to {sum}, sector holds {total}"
        )));
    }
    if let Some(n) = n_target.iter().find(|n| !(0.0..=2.0).contains(*n)) {
        return Err(Error::UnattainableDensity(format!("site density {n}")));
    }

    let mut v = vec![0.0; sites];
    let mut ground = free_ground(hopping, &v, &basis)?;
    let mut res = residual(&ground.densities, n_target);
    let mut alpha = opts.initial_step;
    let mut trace = vec![res];
    let mut iterations = 0;
    while res >= opts.tol {
        if iterations >= opts.max_iter || alpha < 1e-12 {
            return Err(Error::IterationLimit {
                iterations,
                residual: res,
                trace,
            });
        }
        iterations += 1;
        let mut trial: Vec<f64> = v
            .iter()
            .zip(ground.densities.iter().zip(n_target))
            .map(|(vj, (n, t))| vj + alpha * (n - t))
            .collect();
        let mean = trial.iter().sum::<f64>() / sites as f64;
        trial.iter_mut().for_each(|x| *x -= mean);
        let next = free_ground(hopping, &trial, &basis)?;
        let next_res = residual(&next.densities, n_target);
        if next_res > res {
            alpha *= 0.5;
            continue;
        }
        v = trial;
        ground = next;
        res = next_res;
        trace.push(res);
    }
    Ok(KsSolution {
        hopping,
        v_ks: v,
        basis,
        state: ground.state,
        densities: ground.densities,
        residual: res,
        iterations,
    })
}

pub fn ks_reduced_density_matrix(sol: &KsSolution, cut: &[usize]) -> Result<DensityMatrixBlock> {
    reduced_density_matrix(&sol.state, sol.basis.as_ref(), cut)
}
