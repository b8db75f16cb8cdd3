//! Interaction distance: the trace distance from an entanglement spectrum to
//! the closest free (product) spectrum.
//!
//! A free spectrum on `M` modes is generated by parameters `b_i in [0, 1/2]`
//! as all products of `(1/2 + b_i)` or `(1/2 - b_i)`. For four levels the
//! minimum is known in closed form ([`df_four_level`]); for anything else
//! [`df_numeric`] runs a multi-start simplex search.

use crate::entanglement::{trace_distance_spectra, EntanglementSpectrum, NORM_TOL};
use crate::error::{Error, Result};
use crate::minimize::{self, BoxBounds, NelderMeadOptions};

/// Width of the window around `rho_1 = (rho_1 + rho_2)^2` in which both
/// closed-form branches are evaluated.
pub const BRANCH_SLACK: f64 = 1e-14;
/// Largest mode count handled by the numeric minimizer.
pub const MAX_FREE_MODES: usize = 16;

const HALF: BoxBounds = BoxBounds { lo: 0.0, hi: 0.5 };

/// Mode parameters of a free spectrum, kept in canonical ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpectrumParams {
    b: Vec<f64>,
}

impl FreeSpectrumParams {
    pub fn new(mut b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || b.len() > MAX_FREE_MODES {
            return Err(Error::domain(format!(
                "need 1..={MAX_FREE_MODES} mode parameters, got {}",
                b.len()
            )));
        }
        if let Some(x) = b.iter().find(|x| !(0.0..=0.5).contains(*x)) {
            return Err(Error::domain(format!(
                "mode parameter {x} outside [0, 1/2]"
            )));
        }
        b.sort_by(f64::total_cmp);
        Ok(FreeSpectrumParams { b })
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn modes(&self) -> usize {
        self.b.len()
    }
}

/// All `2^M` levels generated by `b`, unsorted.
fn product_levels(b: &[f64]) -> Vec<f64> {
    let mut levels = vec![1.0];
    for &bi in b {
        let (hi, lo) = (0.5 + bi, 0.5 - bi);
        levels = levels.iter().flat_map(|&p| [p * hi, p * lo]).collect();
    }
    levels
}

pub fn free_spectrum_from_params(p: &FreeSpectrumParams) -> EntanglementSpectrum {
    EntanglementSpectrum::new(product_levels(&p.b)).expect("product levels sum to one")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfBranch {
    /// The two largest levels are reproduced exactly.
    MatchedLowLevels,
    /// Optimum on the diagonal `b_1 = b_2`.
    DiagonalB1EqB2,
    Numeric,
}

impl DfBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            DfBranch::MatchedLowLevels => "matched-low-levels",
            DfBranch::DiagonalB1EqB2 => "diagonal-b1-eq-b2",
            DfBranch::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfResult {
    pub df: f64,
    pub params: FreeSpectrumParams,
    pub branch: DfBranch,
    pub free_spectrum: EntanglementSpectrum,
}

fn four_levels(s: &EntanglementSpectrum) -> Result<[f64; 4]> {
    if s.len() > 4 {
        return Err(Error::domain(format!(
            "four-level solver got {} levels",
            s.len()
        )));
    }
    let p = s.padded(4);
    Ok([p[0], p[1], p[2], p[3]])
}

/// Which closed-form branch a four-level spectrum falls in, ignoring the
/// slack window.
pub fn four_level_branch(s: &EntanglementSpectrum) -> DfBranch {
    match four_levels(s) {
        Ok([r1, r2, ..]) if r1 >= (r1 + r2) * (r1 + r2) => DfBranch::DiagonalB1EqB2,
        Ok(_) => DfBranch::MatchedLowLevels,
        Err(_) => DfBranch::Numeric,
    }
}

fn candidate(r: &[f64; 4], branch: DfBranch) -> (f64, [f64; 2]) {
    let [r1, r2, r3, r4] = *r;
    match branch {
        DfBranch::DiagonalB1EqB2 => {
            let b = (r1.sqrt() - 0.5).clamp(0.0, 0.5);
            (2.0 * r1.sqrt() - 2.0 * r1 - r2 - r3, [b, b])
        }
        _ => {
            let s = r1 + r2;
            let b1 = ((r1 - r2) / (2.0 * s)).clamp(0.0, 0.5);
            let b2 = (s - 0.5).clamp(0.0, 0.5);
            ((r1 * r4 - r2 * r3).abs() / s, [b1, b2])
        }
    }
}

fn finish(df: f64, b: Vec<f64>, branch: DfBranch) -> Result<DfResult> {
    let params = FreeSpectrumParams::new(b)?;
    let free_spectrum = free_spectrum_from_params(&params);
    Ok(DfResult {
        df: df.max(0.0),
        params,
        branch,
        free_spectrum,
    })
}

/// Exact interaction distance of a spectrum with at most four levels.
pub fn df_four_level(s: &EntanglementSpectrum) -> Result<DfResult> {
    let r = four_levels(s)?;
    let [r1, r2, ..] = r;
    let gap = r1 - (r1 + r2) * (r1 + r2);
    let branch = if gap > BRANCH_SLACK {
        DfBranch::DiagonalB1EqB2
    } else if gap < -BRANCH_SLACK {
        DfBranch::MatchedLowLevels
    } else {
        // on the seam both branches are continuous; take the smaller,
        // preferring the one that matches the largest levels
        let (d_diag, _) = candidate(&r, DfBranch::DiagonalB1EqB2);
        let (d_match, _) = candidate(&r, DfBranch::MatchedLowLevels);
        if d_match <= d_diag {
            DfBranch::MatchedLowLevels
        } else {
            DfBranch::DiagonalB1EqB2
        }
    };
    let (df, b) = candidate(&r, branch);
    finish(df, b.to_vec(), branch)
}

/// Validating entry point for raw level lists: must be descending and sum to
/// one; shorter lists are zero-padded.
pub fn df_four_level_from_levels(levels: &[f64]) -> Result<DfResult> {
    if levels.len() > 4 {
        return Err(Error::domain("more than four levels"));
    }
    if levels.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::domain("levels must be sorted descending"));
    }
    let sum: f64 = levels.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::domain(format!("levels sum to {sum}, not 1")));
    }
    df_four_level(&EntanglementSpectrum::new(levels.to_vec())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericOptions {
    pub restarts: usize,
    pub seed: u64,
    pub local: NelderMeadOptions,
    /// Permit fewer modes than needed to hold every level; the free spectrum
    /// is then zero-padded.
    pub allow_fewer_modes: bool,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            restarts: 32,
            seed: 0x5eed,
            local: NelderMeadOptions::default(),
            allow_fewer_modes: false,
        }
    }
}

/// Outcome of one restart of [`df_numeric_logged`].
#[derive(Debug, Clone, PartialEq)]
pub struct RestartLog {
    pub start: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

pub fn df_numeric(
    s: &EntanglementSpectrum,
    modes: usize,
    opts: &NumericOptions,
) -> Result<DfResult> {
    df_numeric_logged(s, modes, opts).map(|(r, _)| r)
}

/// Multi-start minimization of the spectral trace distance over
/// `b in [0, 1/2]^modes`.
pub fn df_numeric_logged(
    s: &EntanglementSpectrum,
    modes: usize,
    opts: &NumericOptions,
) -> Result<(DfResult, Vec<RestartLog>)> {
    if modes == 0 || modes > MAX_FREE_MODES {
        return Err(Error::domain(format!(
            "mode count {modes} outside 1..={MAX_FREE_MODES}"
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::domain("at least one restart required"));
    }
    let capacity = 1usize << modes;
    let nonzero = s.probs().iter().filter(|&&p| p > 0.0).count();
    if s.len() > capacity && !opts.allow_fewer_modes && nonzero > capacity {
        return Err(Error::domain(format!(
            "{} levels cannot be matched by {modes} modes ({capacity} levels)",
            s.len()
        )));
    }
    let target = s.padded(capacity);
    let objective = |b: &[f64]| {
        let mut levels = product_levels(b);
        levels.sort_by(|a, b| b.total_cmp(a));
        let mut d: f64 = levels.iter().zip(&target).map(|(x, y)| (x - y).abs()).sum();
        // target levels beyond the free spectrum's reach
        d += target.iter().skip(levels.len()).sum::<f64>();
        0.5 * d
    };

    let starts = minimize::stratified_ordered_starts(modes, opts.restarts, HALF, opts.seed);
    let minima = minimize::multistart(&objective, &starts, 0.1, HALF, &opts.local);
    let (_, best) = minima
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one restart");
    let log = starts
        .iter()
        .zip(&minima)
        .map(|(start, m)| RestartLog {
            start: start.clone(),
            value: m.value,
            evaluations: m.evaluations,
        })
        .collect();
    let params = FreeSpectrumParams::new(best.x.clone())?;
    let free_spectrum = free_spectrum_from_params(&params);
    let df = trace_distance_spectra(s, &free_spectrum);
    Ok((
        DfResult {
            df,
            params,
            branch: DfBranch::Numeric,
            free_spectrum,
        },
        log,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> EntanglementSpectrum {
        EntanglementSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn free_spectra_from_params() {
        let p =
            |b: &[f64]| free_spectrum_from_params(&FreeSpectrumParams::new(b.to_vec()).unwrap());
        assert_eq!(p(&[0.0, 0.0]).probs(), &[0.25; 4]);
        assert_eq!(p(&[0.5, 0.5]).probs(), &[1.0, 0.0, 0.0, 0.0]);
        let s = p(&[0.0, 1.0 / 6.0]);
        let want = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in s.probs().iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(FreeSpectrumParams::new(vec![0.6]).is_err());
        assert!(FreeSpectrumParams::new(vec![-0.1]).is_err());
        assert!(FreeSpectrumParams::new(vec![]).is_err());
    }

    #[test]
    fn one_third_spectrum_distance() {
        let r = df_four_level(&spec(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0])).unwrap();
        assert!((r.df - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(r.branch, DfBranch::MatchedLowLevels);
        assert!(r.params.values()[0].abs() < 1e-12);
        assert!((r.params.values()[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!(
            (trace_distance_spectra(
                &spec(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]),
                &r.free_spectrum
            ) - r.df)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn free_inputs_have_zero_distance() {
        let r = df_four_level(&spec(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.df, 0.0);
        assert_eq!(r.free_spectrum.probs(), &[1.0, 0.0, 0.0, 0.0]);
        let r = df_four_level(&spec(&[0.25; 4])).unwrap();
        assert!(r.df.abs() < 1e-15);
    }

    #[test]
    fn short_spectra_are_padded_and_long_ones_rejected() {
        let r = df_four_level(&spec(&[0.5, 0.5])).unwrap();
        assert!(r.df.abs() < 1e-15);
        assert!(df_four_level(&spec(&[0.2; 5])).is_err());
    }

    #[test]
    fn raw_levels_are_validated() {
        assert!(df_four_level_from_levels(&[0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(df_four_level_from_levels(&[0.5, 0.2, 0.1, 0.1]).is_err());
        assert!(df_four_level_from_levels(&[0.4, 0.3, 0.2, 0.1]).is_ok());
    }

    #[test]
    fn numeric_matches_one_third_spectrum() {
        let s = spec(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]);
        let r = df_numeric(&s, 2, &NumericOptions::default()).unwrap();
        assert!((r.df - 1.0 / 6.0).abs() < 1e-6, "{}", r.df);
    }

    #[test]
    fn numeric_rejects_too_few_modes() {
        let s = spec(&[0.125; 8]);
        assert!(df_numeric(&s, 2, &NumericOptions::default()).is_err());
        let forced = NumericOptions {
            allow_fewer_modes: true,
            ..NumericOptions::default()
        };
        let r = df_numeric(&s, 2, &forced).unwrap();
        assert!((r.df - 0.5).abs() < 1e-6, "{}", r.df);
        assert!(df_numeric(&s, 0, &NumericOptions::default()).is_err());
    }

    #[test]
    fn numeric_is_reproducible() {
        let s = spec(&[0.5, 0.2, 0.15, 0.1, 0.05]);
        let a = df_numeric(&s, 3, &NumericOptions::default()).unwrap();
        let b = df_numeric(&s, 3, &NumericOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
