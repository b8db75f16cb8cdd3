//! Reduced density matrices over site bipartitions, entanglement spectra,
//! entropies, trace distances and local densities.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::FockBasis;
use crate::linalg;

/// Eigenvalues below this are treated as exact zeros.
pub const CLAMP_EPS: f64 = 1e-14;
/// Allowed deviation of a spectrum's sum from one.
pub const NORM_TOL: f64 = 1e-10;
/// Renormalization window accepted by the spectrum file parser.
pub const FILE_NORM_TOL: f64 = 1e-6;

/// Probability vector of a reduced density matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSpectrum {
    probs: Vec<f64>,
}

impl EntanglementSpectrum {
    /// Validates, clamps numerical noise to zero and sorts descending.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("empty spectrum"));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -NORM_TOL || *p > 1.0 + NORM_TOL {
                return Err(Error::domain(format!("level {p} outside [0, 1]")));
            }
            if *p < CLAMP_EPS {
                *p = 0.0;
            }
            *p = p.min(1.0);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("spectrum sums to {sum}, not 1")));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(EntanglementSpectrum { probs })
    }

    /// Like [`EntanglementSpectrum::new`] but rescales sums within `tol` of one.
    pub fn normalized(probs: Vec<f64>, tol: f64) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol {
            return Err(Error::domain(format!(
                "spectrum sums to {sum}, outside the {tol:e} normalization window"
            )));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::domain("negative probability"));
        }
        Self::new(probs.into_iter().map(|p| p / sum).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Levels padded with trailing zeros up to `n`.
    pub fn padded(&self, n: usize) -> Vec<f64> {
        let mut v = self.probs.clone();
        if v.len() < n {
            v.resize(n, 0.0);
        }
        v
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Entanglement energies `-ln p`; zero levels map to `inf`.
    pub fn energies(&self) -> Vec<f64> {
        self.probs.iter().map(|p| -p.ln()).collect()
    }
}

/// Von Neumann entropy `-sum p ln p`; zero levels contribute nothing.
pub fn entropy(s: &EntanglementSpectrum) -> f64 {
    s.probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Half the l1 distance between two spectra, both sorted descending and
/// zero-padded to a common length.
pub fn trace_distance_spectra(p: &EntanglementSpectrum, q: &EntanglementSpectrum) -> f64 {
    let n = p.len().max(q.len());
    let (a, b) = (p.padded(n), q.padded(n));
    0.5 * a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Reduced density matrix of a subsystem `A`.
///
/// Rows and columns are indexed by the local occupation words of `A` that
/// occur in the parent basis, sorted ascending. Bit `k` of a label is the
/// `k`-th mode of `A` in Jordan-Wigner order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixBlock {
    sites: Vec<usize>,
    site_masks: Vec<u64>,
    labels: Vec<u64>,
    matrix: DMatrix<f64>,
}

impl DensityMatrixBlock {
    /// Checks unit trace, symmetry and positivity before accepting `matrix`.
    pub fn new(
        sites: Vec<usize>,
        site_masks: Vec<u64>,
        labels: Vec<u64>,
        matrix: DMatrix<f64>,
    ) -> Result<Self> {
        let block = Self::new_unchecked(sites, site_masks, labels, matrix)?;
        let trace = block.matrix.trace();
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("density matrix trace {trace}")));
        }
        if linalg::max_asymmetry(&block.matrix) > 1e-10 {
            return Err(Error::domain("density matrix is not symmetric"));
        }
        let min = linalg::eigvals_symmetric(&block.matrix)[0];
        if min < -NORM_TOL {
            return Err(Error::domain(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(block)
    }

    fn new_unchecked(
        sites: Vec<usize>,
        site_masks: Vec<u64>,
        labels: Vec<u64>,
        matrix: DMatrix<f64>,
    ) -> Result<Self> {
        if matrix.nrows() != labels.len() || matrix.ncols() != labels.len() {
            return Err(Error::domain("label count does not match matrix size"));
        }
        if site_masks.len() != sites.len() {
            return Err(Error::domain("one occupation mask per site required"));
        }
        Ok(DensityMatrixBlock {
            sites,
            site_masks,
            labels,
            matrix,
        })
    }

    /// Same subsystem, different matrix.
    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(
            self.sites.clone(),
            self.site_masks.clone(),
            self.labels.clone(),
            matrix,
        )
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    /// Occupation of `A`-site `k` (position within [`Self::sites`]) in label `l`.
    pub fn occupation(&self, label: u64, k: usize) -> u32 {
        (label & self.site_masks[k]).count_ones()
    }

    pub fn spectrum(&self) -> EntanglementSpectrum {
        let vals = linalg::eigvals_symmetric(&self.matrix)
            .into_iter()
            .map(|v| if v < CLAMP_EPS { 0.0 } else { v })
            .collect::<Vec<_>>();
        let sum: f64 = vals.iter().sum();
        EntanglementSpectrum::new(vals.into_iter().map(|v| v / sum).collect())
            .expect("density matrix eigenvalues form a spectrum")
    }

    pub fn entropy(&self) -> f64 {
        self.spectrum().entropy()
    }

    /// `tr(rho O)` for an operator on the labels of this block.
    pub fn expectation(&self, op: &DMatrix<f64>) -> f64 {
        (op * &self.matrix).trace()
    }

    /// Diagonal operator counting particles on `A`-site `k`.
    pub fn site_number_operator(&self, k: usize) -> DMatrix<f64> {
        let diag: Vec<f64> = self
            .labels
            .iter()
            .map(|&l| f64::from(self.occupation(l, k)))
            .collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    }

    /// Expected occupation of every site in `A`.
    pub fn site_densities(&self) -> Vec<f64> {
        (0..self.sites.len())
            .map(|k| {
                self.labels
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| self.matrix[(i, i)] * f64::from(self.occupation(l, k)))
                    .sum()
            })
            .collect()
    }
}

fn check_state<B: FockBasis>(state: &DVector<f64>, basis: &B) -> Result<()> {
    if state.len() != basis.dimension() {
        return Err(Error::domain(format!(
            "state has {} amplitudes, basis dimension is {}",
            state.len(),
            basis.dimension()
        )));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("state norm {norm} is not 1")));
    }
    Ok(())
}

/// Gathers the bits of `word` selected by `modes` (ascending) into a dense word.
fn compress(word: u64, modes: &[usize]) -> u64 {
    modes
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &m)| acc | (((word >> m) & 1) << k))
}

/// Sign picked up by moving the occupied `A` modes in front of every occupied
/// `B` mode while keeping the relative order inside each group.
fn reorder_sign(word: u64, a_mask: u64) -> f64 {
    let b_occ = word & !a_mask;
    let mut a_occ = word & a_mask;
    let mut crossings = 0u32;
    while a_occ != 0 {
        let m = a_occ.trailing_zeros();
        crossings += (b_occ & ((1u64 << m) - 1)).count_ones();
        a_occ &= a_occ - 1;
    }
    if crossings.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `rho_A = Tr_B |psi><psi|` for a contiguous block of sites `cut`.
///
/// Modes of `A` are brought in front of the modes of `B` before tracing, so
/// the fermionic signs are those of the ordering `A` then `B`.
pub fn reduced_density_matrix<B: FockBasis>(
    state: &DVector<f64>,
    basis: &B,
    cut: &[usize],
) -> Result<DensityMatrixBlock> {
    check_state(state, basis)?;
    let n_sites = basis.n_sites();
    if cut.is_empty() {
        return Err(Error::UnsupportedPartition("empty region".into()));
    }
    let contiguous = cut.windows(2).all(|w| w[1] == w[0] + 1);
    if !contiguous || cut[cut.len() - 1] >= n_sites {
        return Err(Error::UnsupportedPartition(format!(
            "sites {cut:?} are not a contiguous block of 0..{n_sites}"
        )));
    }

    let mut a_modes: Vec<usize> = cut.iter().flat_map(|&s| basis.site_modes(s)).collect();
    a_modes.sort_unstable();
    let a_mask = a_modes.iter().fold(0u64, |acc, &m| acc | (1 << m));
    let site_masks: Vec<u64> = cut
        .iter()
        .map(|&s| {
            let w = basis
                .site_modes(s)
                .iter()
                .fold(0u64, |acc, &m| acc | (1 << m));
            compress(w, &a_modes)
        })
        .collect();

    let mut labels: Vec<u64> = (0..basis.dimension())
        .map(|i| compress(basis.mode_word(i) & a_mask, &a_modes))
        .collect();
    labels.sort_unstable();
    labels.dedup();

    // environment configuration -> [(A label index, signed amplitude)]
    let mut by_env: BTreeMap<u64, Vec<(usize, f64)>> = BTreeMap::new();
    for i in 0..basis.dimension() {
        let amp = state[i];
        if amp == 0.0 {
            continue;
        }
        let w = basis.mode_word(i);
        let a = compress(w & a_mask, &a_modes);
        let idx = labels.binary_search(&a).expect("label collected above");
        by_env
            .entry(w & !a_mask)
            .or_default()
            .push((idx, reorder_sign(w, a_mask) * amp));
    }

    let d = labels.len();
    let mut rho = DMatrix::zeros(d, d);
    for terms in by_env.values() {
        for &(i, x) in terms {
            for &(j, y) in terms {
                rho[(i, j)] += x * y;
            }
        }
    }
    DensityMatrixBlock::new(cut.to_vec(), site_masks, labels, rho)
}

/// Half the trace norm of `r - s`.
pub fn trace_distance(r: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<f64> {
    if r.shape() != s.shape() {
        return Err(Error::domain(format!(
            "dimension mismatch {:?} vs {:?}",
            r.shape(),
            s.shape()
        )));
    }
    let diff = r - s;
    Ok(0.5
        * linalg::eigvals_symmetric(&diff)
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

pub fn trace_distance_matrices(r: &DensityMatrixBlock, s: &DensityMatrixBlock) -> Result<f64> {
    if r.labels != s.labels {
        return Err(Error::domain(
            "density matrices live on different label sets",
        ));
    }
    trace_distance(&r.matrix, &s.matrix)
}

/// Total occupation `<n_j,up + n_j,down>` of every site.
pub fn local_densities<B: FockBasis>(state: &DVector<f64>, basis: &B) -> Result<Vec<f64>> {
    check_state(state, basis)?;
    let masks: Vec<u64> = (0..basis.n_sites())
        .map(|s| {
            basis
                .site_modes(s)
                .iter()
                .fold(0u64, |acc, &m| acc | (1 << m))
        })
        .collect();
    let mut n = vec![0.0; basis.n_sites()];
    for i in 0..basis.dimension() {
        let w = basis.mode_word(i);
        let p = state[i] * state[i];
        for (nj, &mask) in n.iter_mut().zip(&masks) {
            *nj += p * f64::from((w & mask).count_ones());
        }
    }
    Ok(n)
}

/// `D_n = sum_j |n_j - m_j|`.
pub fn natural_metric(n: &[f64], m: &[f64]) -> Result<f64> {
    if n.len() != m.len() {
        return Err(Error::domain(format!(
            "density vectors of length {} and {}",
            n.len(),
            m.len()
        )));
    }
    Ok(n.iter().zip(m).map(|(a, b)| (a - b).abs()).sum())
}

/// Parses the plain-text spectrum format: one probability per line, `#`
/// comments, blank lines ignored. Entries may be decimals or `p/q` fractions.
pub fn parse_spectrum(text: &str) -> Result<EntanglementSpectrum> {
    let mut probs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let value = parse_number(line).ok_or_else(|| Error::Parse {
            line: lineno + 1,
            message: format!("not a number: {line:?}"),
        })?;
        if !(0.0..=1.0 + FILE_NORM_TOL).contains(&value) {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("probability {value} outside [0, 1]"),
            });
        }
        probs.push(value);
    }
    if probs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no probabilities found".into(),
        });
    }
    EntanglementSpectrum::normalized(probs, FILE_NORM_TOL).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (f64, f64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
            (q != 0.0).then(|| p / q)
        }
        None => s.parse().ok(),
    }
}

pub fn read_spectrum_file(path: &Path) -> std::io::Result<Result<EntanglementSpectrum>> {
    Ok(parse_spectrum(&std::fs::read_to_string(path)?))
}

/// Writes a spectrum in the format read by [`parse_spectrum`].
pub fn format_spectrum(s: &EntanglementSpectrum) -> String {
    let mut out = String::from("# entanglement spectrum, descending\n");
    for p in s.probs() {
        out.push_str(&format!("{p:.17e}\n"));
    }
    out
}
