//! Library results against independent reference computations written here
//! from scratch: a cyclic Jacobi eigensolver, brute-force grids over the free
//! parameters, and hand-written dimer matrices.

use std::sync::Arc;

use freefit_core::entanglement::local_densities;
use freefit_core::hamiltonians::build_hubbard;
use freefit_core::idistance::NumericOptions;
use freefit_core::kohnsham::invert_iterative;
use freefit_core::{
    df_four_level, df_numeric, dimer_closed_form, reduced_density_matrix, trace_distance, Boundary,
    EntanglementSpectrum, HubbardParams, KsOptions, SectorBasis,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cyclic Jacobi rotations until the off-diagonal norm vanishes. Returns
/// eigenvalues and eigenvectors (columns), unsorted.
fn jacobi(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn random_density_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
    let m = &g * g.transpose();
    let t = m.trace();
    m / t
}

fn random_spectrum(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x.sort_by(|a, b| b.total_cmp(a));
    x
}

/// All `2^M` products of `1/2 + b_i` or `1/2 - b_i`.
fn products(b: &[f64]) -> Vec<f64> {
    (0..1usize << b.len())
        .map(|mask| {
            b.iter()
                .enumerate()
                .map(|(i, bi)| {
                    if mask >> i & 1 == 1 {
                        0.5 - bi
                    } else {
                        0.5 + bi
                    }
                })
                .product()
        })
        .collect()
}

fn spectral_distance(s: &[f64], b: &[f64]) -> f64 {
    let mut levels = products(b);
    levels.sort_by(|a, b| b.total_cmp(a));
    let n = s.len().max(levels.len());
    (0..n)
        .map(|i| (s.get(i).copied().unwrap_or(0.0) - levels.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn trace_distance_matches_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 4, 7, 16] {
        for _ in 0..20 {
            let r = random_density_matrix(n, &mut rng);
            let s = random_density_matrix(n, &mut rng);
            let (ev, _) = jacobi(&(&r - &s));
            let want = 0.5 * ev.iter().map(|x| x.abs()).sum::<f64>();
            let got = trace_distance(&r, &s).unwrap();
            assert!((got - want).abs() < 1e-12, "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn four_level_matches_brute_force_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let steps = 400;
    for _ in 0..12 {
        let s = random_spectrum(4, &mut rng);
        let r = df_four_level(&EntanglementSpectrum::new(s.clone()).unwrap()).unwrap();
        let mut grid_min = f64::INFINITY;
        for i in 0..=steps {
            for j in i..=steps {
                let b = [0.5 * i as f64 / steps as f64, 0.5 * j as f64 / steps as f64];
                grid_min = grid_min.min(spectral_distance(&s, &b));
            }
        }
        assert!(
            r.df <= grid_min + 1e-12,
            "{s:?}: {} above grid {grid_min}",
            r.df
        );
        // each level moves by at most one grid step per parameter
        assert!(grid_min - r.df <= 2.0 * 0.5 / steps as f64, "{s:?}");
        assert!((spectral_distance(&s, r.params.values()) - r.df).abs() < 1e-12);
    }
}

#[test]
fn numeric_distance_does_not_grow_with_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let opts = NumericOptions {
        restarts: 16,
        allow_fewer_modes: true,
        ..NumericOptions::default()
    };
    for _ in 0..3 {
        let s = EntanglementSpectrum::new(random_spectrum(8, &mut rng)).unwrap();
        let d: Vec<f64> = (1..=4)
            .map(|m| df_numeric(&s, m, &opts).unwrap().df)
            .collect();
        for w in d.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{d:?}");
        }
    }
}

#[test]
fn numeric_matches_four_level_on_random_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = NumericOptions::default();
    for _ in 0..50 {
        let s = EntanglementSpectrum::new(random_spectrum(4, &mut rng)).unwrap();
        let exact = df_four_level(&s).unwrap().df;
        let numeric = df_numeric(&s, 2, &opts).unwrap().df;
        assert!(
            (exact - numeric).abs() < 1e-6,
            "{:?}: {exact} vs {numeric}",
            s.probs()
        );
    }
}

/// Dimer Hamiltonian written out by hand on `|ud,0>, |u,d>, |d,u>, |0,ud>`
/// with the singlet combination symmetric.
fn dimer_by_hand(j: f64, u: f64, dv: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            u + dv,
            -j,
            -j,
            0.0, //
            -j,
            0.0,
            0.0,
            -j, //
            -j,
            0.0,
            0.0,
            -j, //
            0.0,
            -j,
            -j,
            u - dv,
        ],
    )
}

#[test]
fn dimer_closed_form_matches_hand_built_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let j = rng.random_range(0.1..5.0);
        let u = rng.random_range(0.0..60.0);
        let dv = rng.random_range(-3.0..3.0);
        let (ev, vecs) = jacobi(&dimer_by_hand(j, u, dv));
        let k = (0..4).min_by(|&a, &b| ev[a].total_cmp(&ev[b])).unwrap();
        let sol = dimer_closed_form(j, u, dv).unwrap();
        assert!((sol.energy - ev[k]).abs() < 1e-10, "J={j} U={u} dv={dv}");
        let p: Vec<f64> = (0..4).map(|i| vecs[(i, k)].powi(2)).collect();
        for (a, b) in sol.site_one_probabilities().iter().zip(&p) {
            assert!((a - b).abs() < 1e-9);
        }
        let n1 = 2.0 * p[0] + p[1] + p[2];
        assert!((sol.densities()[0] - n1).abs() < 1e-9);
    }
}

#[test]
fn chain_reduced_spectrum_matches_jacobi_of_the_full_state() {
    // rho_A spectrum equals the squared Schmidt values, which are the
    // eigenvalues of the complementary block as well
    let basis = Arc::new(SectorBasis::new(4, 2, 2).unwrap());
    let params = HubbardParams {
        hopping: 1.0,
        interaction: 3.0,
        potentials: vec![0.2, -0.1, 0.3, -0.4],
        boundary: Boundary::Open,
    };
    let psi = build_hubbard(&params, basis.clone())
        .unwrap()
        .ground_state()
        .vector;
    let left = reduced_density_matrix(&psi, basis.as_ref(), &[0, 1]).unwrap();
    let right = reduced_density_matrix(&psi, basis.as_ref(), &[2, 3]).unwrap();
    let mut a = jacobi(left.matrix()).0;
    let mut b = jacobi(right.matrix()).0;
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn ks_inversion_on_four_sites() {
    let basis = Arc::new(SectorBasis::new(4, 2, 2).unwrap());
    let params = HubbardParams {
        hopping: 1.0,
        interaction: 2.0,
        potentials: vec![0.3, 0.1, -0.1, -0.3],
        boundary: Boundary::Open,
    };
    let psi = build_hubbard(&params, basis.clone())
        .unwrap()
        .ground_state()
        .vector;
    let target = local_densities(&psi, basis.as_ref()).unwrap();
    let ks = invert_iterative(&target, 1.0, basis, &KsOptions::default()).unwrap();
    assert!(ks.residual < 1e-8);
    assert!(ks.v_ks.iter().sum::<f64>().abs() < 1e-12);
}
