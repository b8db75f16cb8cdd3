//! Box-constrained Nelder-Mead with deterministic multi-start.
//!
//! Points outside the box are projected onto it before evaluation, so the
//! objective is flat across the boundary and the simplex can slide along it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once the spread of simplex values drops below this.
    pub ftol: f64,
    /// ... and the simplex diameter drops below this.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            ftol: 1e-14,
            xtol: 1e-12,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct BoxBounds {
    pub lo: f64,
    pub hi: f64,
}

impl BoxBounds {
    fn project(&self, x: &mut [f64]) {
        for xi in x {
            *xi = xi.clamp(self.lo, self.hi);
        }
    }
}

struct Counted<'a, F> {
    f: &'a F,
    bounds: BoxBounds,
    evals: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &mut [f64]) -> f64 {
        self.bounds.project(x);
        self.evals += 1;
        (self.f)(x)
    }
}

/// One Nelder-Mead descent from `x0` with an axis-aligned initial simplex of
/// edge `step`.
pub fn nelder_mead<F>(
    f: &F,
    x0: &[f64],
    step: f64,
    bounds: BoxBounds,
    opts: &NelderMeadOptions,
) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Counted {
        f,
        bounds,
        evals: 0,
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut p0 = x0.to_vec();
    let f0 = obj.eval(&mut p0);
    simplex.push((p0.clone(), f0));
    for i in 0..n {
        let mut p = p0.clone();
        // step inward when the vertex would leave the box
        p[i] = if p[i] + step <= bounds.hi {
            p[i] + step
        } else {
            p[i] - step
        };
        let fp = obj.eval(&mut p);
        simplex.push((p, fp));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread <= opts.ftol && diameter <= opts.xtol) || obj.evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let towards = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let mut xr = towards(alpha, &worst);
        let fr = obj.eval(&mut xr);
        if fr < simplex[0].1 {
            let mut xe = towards(gamma, &worst);
            let fe = obj.eval(&mut xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // outside contraction when the reflection improved on the worst
        let t = if fr < simplex[n].1 { rho } else { -rho };
        let mut xc = towards(t, &worst);
        let fc = obj.eval(&mut xc);
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut p: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, x)| b + sigma * (x - b))
                .collect();
            let fp = obj.eval(&mut p);
            *vertex = (p, fp);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    LocalMinimum {
        x,
        value,
        evaluations: obj.evals,
    }
}

/// Re-runs Nelder-Mead from the incumbent with shrinking simplices until a
/// restart stops improving.
pub fn polished<F>(
    f: &F,
    x0: &[f64],
    step: f64,
    bounds: BoxBounds,
    opts: &NelderMeadOptions,
) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = nelder_mead(f, x0, step, bounds, opts);
    let mut step = step;
    let mut evaluations = best.evaluations;
    for _ in 0..8 {
        let again = nelder_mead(f, &best.x, step, bounds, opts);
        evaluations += again.evaluations;
        if again.value < best.value - 1e-16 {
            best = again;
        } else {
            step *= 0.1;
            if step < opts.xtol {
                break;
            }
        }
    }
    best.evaluations = evaluations;
    best
}

/// Latin-hypercube starts in `[lo, hi]^dim`, each sorted ascending so they
/// cover the ordered simplex `lo <= x_1 <= ... <= x_dim <= hi`.
pub fn stratified_ordered_starts(
    dim: usize,
    count: usize,
    bounds: BoxBounds,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = bounds.hi - bounds.lo;
    let strata: Vec<Vec<usize>> = (0..dim)
        .map(|_| {
            let mut perm: Vec<usize> = (0..count).collect();
            for i in (1..count).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            perm
        })
        .collect();
    (0..count)
        .map(|k| {
            let mut x: Vec<f64> = strata
                .iter()
                .map(|perm| {
                    let u: f64 = rng.random();
                    bounds.lo + width * (perm[k] as f64 + u) / count as f64
                })
                .collect();
            x.sort_by(f64::total_cmp);
            x
        })
        .collect()
}

/// Runs [`polished`] from every start concurrently. Results keep the order
/// of `starts`.
pub fn multistart<F>(
    f: &F,
    starts: &[Vec<f64>],
    step: f64,
    bounds: BoxBounds,
    opts: &NelderMeadOptions,
) -> Vec<LocalMinimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    starts
        .par_iter()
        .map(|x0| polished(f, x0, step, bounds, opts))
        .collect()
}
