//! Optimal free state, the two-chain auxiliary model that reproduces it, and
//! checks of the inequalities tying interacting, Kohn-Sham and optimal states
//! together.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::entanglement::{
    natural_metric, reduced_density_matrix, trace_distance_matrices, DensityMatrixBlock,
    EntanglementSpectrum, CLAMP_EPS,
};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_aux_dimer, AuxParams};
use crate::hilbert::{FockBasis, SpinlessBasis};
use crate::idistance::DfResult;
use crate::linalg;

/// Slack allowed on every hard inequality.
pub const BOUND_TOL: f64 = 1e-10;
/// Triangle ratios above this are reported as diverging.
pub const DIVERGING_RATIO: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalState {
    pub spectrum: EntanglementSpectrum,
    pub matrix: DensityMatrixBlock,
}

/// Eigenpairs of `rho` sorted by descending eigenvalue. Diagonal matrices use
/// the label basis directly and break ties by label order.
fn descending_eigenbasis(rho: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = rho.nrows();
    let off_diagonal = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| rho[(i, j)].abs())
        .fold(0.0, f64::max);
    let (values, vectors) = if off_diagonal < CLAMP_EPS {
        (
            rho.diagonal().iter().copied().collect::<Vec<_>>(),
            DMatrix::identity(n, n),
        )
    } else {
        let eig = linalg::eigh_ascending(rho);
        (eig.values, eig.vectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut sorted = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        sorted.set_column(col, &vectors.column(k));
    }
    (order.iter().map(|&k| values[k]).collect(), sorted)
}

/// Replaces the eigenvalues of `rho` by `levels`, matched in descending order.
pub fn embed_spectrum(
    rho: &DensityMatrixBlock,
    levels: &EntanglementSpectrum,
) -> Result<DensityMatrixBlock> {
    let n = rho.dimension();
    if levels.probs().iter().skip(n).any(|&p| p > 0.0) {
        return Err(Error::domain(format!(
            "{} nonzero levels do not fit a {n}-dimensional block",
            levels.probs().iter().filter(|&&p| p > 0.0).count()
        )));
    }
    let q = levels.padded(n);
    let (_, vectors) = descending_eigenbasis(rho.matrix());
    let scaled = DMatrix::from_fn(n, n, |i, k| vectors[(i, k)] * q[k]);
    let mut m = &scaled * vectors.transpose();
    // symmetrize rounding noise
    m = (&m + m.transpose()) * 0.5;
    rho.with_matrix(m)
}

/// Optimal free density matrix: the eigenvectors of `rho_int` carrying the
/// optimal free levels.
pub fn optimal_state(rho_int: &DensityMatrixBlock, df: &DfResult) -> Result<OptimalState> {
    Ok(OptimalState {
        spectrum: df.free_spectrum.clone(),
        matrix: embed_spectrum(rho_int, &df.free_spectrum)?,
    })
}

/// How `mu` scales with the hopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuConvention {
    /// `mu = 2|J| (sqrt(r1/r2) - sqrt(r2/r1))`; reproduces the levels for any `J`.
    #[default]
    JScaled,
    /// `mu = 2 (sqrt(r1/r2) - sqrt(r2/r1))`; agrees with the above only at `|J| = 1`.
    Printed,
}

pub fn mu_from_levels(r1: f64, r2: f64, hopping: f64, convention: MuConvention) -> Result<f64> {
    if r2 <= 0.0 {
        return Err(Error::InfinitePotential(
            "the smaller optimal level is zero".into(),
        ));
    }
    if r1 < r2 {
        return Err(Error::domain(format!("levels out of order: {r1} < {r2}")));
    }
    let shape = 2.0 * ((r1 / r2).sqrt() - (r2 / r1).sqrt());
    Ok(match convention {
        MuConvention::JScaled => hopping.abs() * shape,
        MuConvention::Printed => shape,
    })
}

/// Chain-one occupation levels `((1/2 + b_max)/2, (1/2 - b_max)/2)` of a
/// four-level free spectrum. When `b_min = 0` these are its two distinct levels.
pub fn aux_levels(df: &DfResult) -> Result<(f64, f64)> {
    let b = df.params.values();
    if b.len() != 2 {
        return Err(Error::domain(
            "auxiliary dimer needs a two-mode free spectrum",
        ));
    }
    Ok((0.5 * (0.5 + b[1]), 0.5 * (0.5 - b[1])))
}

pub fn optimal_mu(df: &DfResult, hopping: f64, convention: MuConvention) -> Result<f64> {
    let (r1, r2) = aux_levels(df)?;
    mu_from_levels(r1, r2, hopping, convention)
}

/// Ground state of the auxiliary model with one fermion on each chain.
pub fn aux_ground_state(p: &AuxParams) -> Result<(Arc<SpinlessBasis>, DVector<f64>)> {
    let basis = Arc::new(SpinlessBasis::new(4, 2)?);
    let h = build_aux_dimer(p, basis.clone())?;
    // chain one holds modes 0 and 2, chain two modes 1 and 3
    let keep: Vec<usize> = (0..basis.dimension())
        .filter(|&i| {
            let w = basis.mode_word(i);
            (w & 0b0101).count_ones() == 1 && (w & 0b1010).count_ones() == 1
        })
        .collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |r, c| h.data()[(keep[r], keep[c])]);
    let gs = linalg::ground_state(&sub);
    let mut psi = DVector::zeros(basis.dimension());
    for (k, &i) in keep.iter().enumerate() {
        psi[i] = gs.vector[k];
    }
    Ok((basis, psi))
}

/// Reduced density matrix of the auxiliary ground state on modes `{0, 1}`.
pub fn aux_reduced_density_matrix(p: &AuxParams) -> Result<DensityMatrixBlock> {
    let (basis, psi) = aux_ground_state(p)?;
    reduced_density_matrix(&psi, basis.as_ref(), &[0, 1])
}

pub fn aux_ground_spectrum(p: &AuxParams) -> Result<EntanglementSpectrum> {
    Ok(aux_reduced_density_matrix(p)?.spectrum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        BoundReport {
            lhs,
            rhs,
            satisfied: lhs <= rhs + BOUND_TOL,
            slack: rhs - lhs,
        }
    }
}

/// One random observable evaluated on an interacting/optimal pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSample {
    /// `|<O>_int - <O>_opt|`.
    pub deviation: f64,
    /// Largest eigenvalue of `O` in absolute value.
    pub o_max: f64,
    /// `D_tr(rho_int, rho_opt)`.
    pub trace_distance: f64,
}

impl ObservableSample {
    /// `|O_max| tr|rho - sigma| = 2 |O_max| D_tr`, which always holds.
    pub fn report(&self) -> BoundReport {
        BoundReport::new(self.deviation, 2.0 * self.o_max * self.trace_distance)
    }

    /// The same deviation tested against `c |O_max| D_tr` for another prefactor.
    pub fn report_with_prefactor(&self, c: f64) -> BoundReport {
        BoundReport::new(self.deviation, c * self.o_max * self.trace_distance)
    }
}

/// Hermitian matrix with independent standard normal real and imaginary parts.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    m
}

fn complex_expectation(op: &DMatrix<Complex64>, rho: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            acc += (op[(i, j)] * rho[(j, i)]).re;
        }
    }
    acc
}

pub fn sample_observables(
    rho_int: &DensityMatrixBlock,
    rho_opt: &DensityMatrixBlock,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<ObservableSample>> {
    let d_tr = trace_distance_matrices(rho_int, rho_opt)?;
    let n = rho_int.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_samples)
        .map(|_| {
            let op = random_hermitian(n, &mut rng);
            let o_max = SymmetricEigen::new(op.clone())
                .eigenvalues
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let deviation = (complex_expectation(&op, rho_int.matrix())
                - complex_expectation(&op, rho_opt.matrix()))
            .abs();
            ObservableSample {
                deviation,
                o_max,
                trace_distance: d_tr,
            }
        })
        .collect())
}

/// Checks `|<O>_int - <O>_opt| <= |O_max| tr|rho_int - rho_opt|` on random
/// Hermitian observables.
pub fn verify_observable_bound(
    rho_int: &DensityMatrixBlock,
    rho_opt: &OptimalState,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<BoundReport>> {
    Ok(
        sample_observables(rho_int, &rho_opt.matrix, n_samples, seed)?
            .iter()
            .map(ObservableSample::report)
            .collect(),
    )
}

/// The same bound for a fixed real observable on the block labels.
pub fn verify_fixed_observable(
    rho_int: &DensityMatrixBlock,
    rho_opt: &DensityMatrixBlock,
    op: &DMatrix<f64>,
) -> Result<BoundReport> {
    let d_tr = trace_distance_matrices(rho_int, rho_opt)?;
    let o_max = linalg::eigvals_symmetric(op)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let lhs = (rho_int.expectation(op) - rho_opt.expectation(op)).abs();
    Ok(BoundReport::new(lhs, 2.0 * o_max * d_tr))
}

/// Site densities of `A` followed by the particle count left for the rest of
/// the system.
pub fn density_profile(block: &DensityMatrixBlock, total_particles: f64) -> Vec<f64> {
    let mut n = block.site_densities();
    let in_a: f64 = n.iter().sum();
    n.push(total_particles - in_a);
    n
}

/// Operator norms of the entries of [`density_profile`] on the block labels.
pub fn density_operator_norms(block: &DensityMatrixBlock, total_particles: f64) -> Vec<f64> {
    let sites = block.sites().len();
    let mut norms: Vec<f64> = (0..sites)
        .map(|k| {
            block
                .labels()
                .iter()
                .map(|&l| f64::from(block.occupation(l, k)))
                .fold(0.0, f64::max)
        })
        .collect();
    let rest = block
        .labels()
        .iter()
        .map(|&l| {
            let in_a: u32 = (0..sites).map(|k| block.occupation(l, k)).sum();
            (total_particles - f64::from(in_a)).abs()
        })
        .fold(0.0, f64::max);
    norms.push(rest);
    norms
}

/// Checks `D_n(ref, cand) <= sum_j |n_j,max| tr|rho_int - cand| + D_n(ref, int)`.
/// With `reference` the Kohn-Sham densities the last term is the inversion
/// residual.
pub fn verify_density_bound(
    reference: &[f64],
    candidate: &DensityMatrixBlock,
    rho_int: &DensityMatrixBlock,
    total_particles: f64,
) -> Result<BoundReport> {
    let lhs = natural_metric(reference, &density_profile(candidate, total_particles))?;
    let c: f64 = density_operator_norms(rho_int, total_particles)
        .iter()
        .sum();
    let d_tr = trace_distance_matrices(rho_int, candidate)?;
    let offset = natural_metric(reference, &density_profile(rho_int, total_particles))?;
    Ok(BoundReport::new(lhs, 2.0 * c * d_tr + offset))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleDiagnostic {
    /// Both distances vanish.
    Coincident,
    Finite,
    /// Ratio above [`DIVERGING_RATIO`] or `D_F = 0` with the Kohn-Sham state
    /// still away from the interacting one.
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    /// `D_F <= D_tr(rho_int, rho_KS)`.
    pub lower: BoundReport,
    /// `D_tr(rho_int, rho_KS) / D_F`.
    pub ratio: f64,
    pub diagnostic: TriangleDiagnostic,
}

pub fn verify_triangle(
    rho_int: &DensityMatrixBlock,
    rho_ks: &DensityMatrixBlock,
    df: f64,
) -> Result<TriangleReport> {
    let d_tr = trace_distance_matrices(rho_int, rho_ks)?;
    let lower = BoundReport::new(df, d_tr);
    let tiny = 1e-14;
    let (ratio, diagnostic) = if d_tr <= tiny && df <= tiny {
        (f64::NAN, TriangleDiagnostic::Coincident)
    } else if df <= tiny {
        (f64::INFINITY, TriangleDiagnostic::Diverging)
    } else {
        let r = d_tr / df;
        let flag = if r > DIVERGING_RATIO {
            TriangleDiagnostic::Diverging
        } else {
            TriangleDiagnostic::Finite
        };
        (r, flag)
    };
    Ok(TriangleReport {
        lower,
        ratio,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idistance::df_four_level;

    fn diag_block(p: &[f64]) -> DensityMatrixBlock {
        // one spinful site: labels 0..4 with bit 0 = up, bit 1 = down
        DensityMatrixBlock::new(
            vec![0],
            vec![0b11],
            vec![0, 1, 2, 3],
            DMatrix::from_diagonal(&DVector::from_vec(p.to_vec())),
        )
        .unwrap()
    }

    fn spec(v: &[f64]) -> EntanglementSpectrum {
        EntanglementSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn free_input_is_its_own_optimum() {
        let rho = diag_block(&[0.36, 0.24, 0.24, 0.16]);
        let df = df_four_level(&rho.spectrum()).unwrap();
        let opt = optimal_state(&rho, &df).unwrap();
        assert!(trace_distance_matrices(&rho, &opt.matrix).unwrap() < 1e-12);
    }

    #[test]
    fn one_third_spectrum_optimum() {
        let third = 1.0 / 3.0;
        let rho = diag_block(&[0.0, third, third, third]);
        let df = df_four_level(&rho.spectrum()).unwrap();
        let opt = optimal_state(&rho, &df).unwrap();
        let want = [third, third, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in opt.spectrum.probs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((trace_distance_matrices(&rho, &opt.matrix).unwrap() - df.df).abs() < 1e-12);
    }

    #[test]
    fn optimum_in_a_rotated_basis() {
        // rotate a diagonal state; the optimal matrix rotates with it
        let p = [0.5, 0.3, 0.15, 0.05];
        let (c, s) = (0.6f64, 0.8f64);
        let mut r = DMatrix::identity(4, 4);
        r[(0, 0)] = c;
        r[(0, 1)] = -s;
        r[(1, 0)] = s;
        r[(1, 1)] = c;
        let d = DMatrix::from_diagonal(&DVector::from_vec(p.to_vec()));
        let rho = DensityMatrixBlock::new(
            vec![0],
            vec![0b11],
            vec![0, 1, 2, 3],
            &r * d * r.transpose(),
        )
        .unwrap();
        let df = df_four_level(&rho.spectrum()).unwrap();
        let opt = optimal_state(&rho, &df).unwrap();
        assert!((trace_distance_matrices(&rho, &opt.matrix).unwrap() - df.df).abs() < 1e-12);
    }

    #[test]
    fn mu_formula() {
        assert_eq!(
            mu_from_levels(0.3, 0.3, 1.0, MuConvention::JScaled).unwrap(),
            0.0
        );
        assert!(
            (mu_from_levels(0.4, 0.1, 1.0, MuConvention::JScaled).unwrap() - 3.0).abs() < 1e-12
        );
        assert!(
            (mu_from_levels(0.4, 0.1, 2.0, MuConvention::JScaled).unwrap() - 6.0).abs() < 1e-12
        );
        assert!(
            (mu_from_levels(0.4, 0.1, 2.0, MuConvention::Printed).unwrap() - 3.0).abs() < 1e-12
        );
        assert!(matches!(
            mu_from_levels(0.5, 0.0, 1.0, MuConvention::JScaled),
            Err(Error::InfinitePotential(_))
        ));
        assert!(mu_from_levels(0.1, 0.4, 1.0, MuConvention::JScaled).is_err());
    }

    #[test]
    fn aux_spectra() {
        let s = aux_ground_spectrum(&AuxParams {
            hopping: 1.0,
            mu: 0.0,
        })
        .unwrap();
        for p in s.probs() {
            assert!((p - 0.25).abs() < 1e-12);
        }
        let s = aux_ground_spectrum(&AuxParams {
            hopping: 1.0,
            mu: 3.0,
        })
        .unwrap();
        let want = [0.4, 0.4, 0.1, 0.1];
        for (a, b) in s.probs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{:?}", s.probs());
        }
        // J-scaled convention round-trips at any hopping
        let j = 2.5;
        let mu = mu_from_levels(0.4, 0.1, j, MuConvention::JScaled).unwrap();
        let s = aux_ground_spectrum(&AuxParams { hopping: j, mu }).unwrap();
        for (a, b) in s.probs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_observable_has_zero_deviation() {
        let rho = diag_block(&[0.5, 0.3, 0.15, 0.05]);
        let df = df_four_level(&rho.spectrum()).unwrap();
        let opt = optimal_state(&rho, &df).unwrap();
        let r = verify_fixed_observable(&rho, &opt.matrix, &DMatrix::identity(4, 4)).unwrap();
        assert!(r.lhs < 1e-15 && r.satisfied);
    }

    #[test]
    fn observable_bound_holds_on_random_observables() {
        let rho = diag_block(&[0.1, 0.45, 0.3, 0.15]);
        let df = df_four_level(&rho.spectrum()).unwrap();
        let opt = optimal_state(&rho, &df).unwrap();
        let reports = verify_observable_bound(&rho, &opt, 500, 3).unwrap();
        assert!(reports.iter().all(|r| r.satisfied));
    }

    #[test]
    fn triangle_diagnostics() {
        let a = diag_block(&[0.25; 4]);
        let t = verify_triangle(&a, &a, 0.0).unwrap();
        assert_eq!(t.diagnostic, TriangleDiagnostic::Coincident);
        let b = diag_block(&[0.0, 0.5, 0.5, 0.0]);
        let t = verify_triangle(&b, &a, 0.0).unwrap();
        assert_eq!(t.diagnostic, TriangleDiagnostic::Diverging);
        assert!(t.ratio.is_infinite() && t.lower.satisfied);
        let t = verify_triangle(&b, &a, 0.6).unwrap();
        assert!(!t.lower.satisfied);
    }

    #[test]
    fn density_profile_of_single_site_block() {
        let rho = diag_block(&[0.1, 0.2, 0.3, 0.4]);
        // labels 0 (empty), 1 (up), 2 (down), 3 (both)
        let n = density_profile(&rho, 2.0);
        assert!((n[0] - (0.2 + 0.3 + 0.8)).abs() < 1e-15);
        assert!((n[0] + n[1] - 2.0).abs() < 1e-15);
        assert_eq!(density_operator_norms(&rho, 2.0), vec![2.0, 2.0]);
    }

    #[test]
    fn embed_rejects_oversized_spectra() {
        let rho = diag_block(&[0.25; 4]);
        assert!(embed_spectrum(&rho, &spec(&[0.2; 5])).is_err());
    }
}
