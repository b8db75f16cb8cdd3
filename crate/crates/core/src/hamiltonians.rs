//! Dense sector matrices for the Hubbard chain, its non-interacting
//! counterpart and the two-chain spinless auxiliary model.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{hop, FockBasis, SectorBasis, SpinlessBasis};
use crate::linalg::{self, GroundState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Parameters of `H = -J sum (c†_j c_{j+1} + h.c.) + sum v_j n_j + U sum n_up n_down`.
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardParams {
    pub hopping: f64,
    pub interaction: f64,
    pub potentials: Vec<f64>,
    pub boundary: Boundary,
}

impl HubbardParams {
    /// Two-site chain with potentials `(dv/2, -dv/2)`.
    pub fn dimer(hopping: f64, interaction: f64, dv: f64) -> Self {
        HubbardParams {
            hopping,
            interaction,
            potentials: dimer_potentials(dv),
            boundary: Boundary::Open,
        }
    }
}

/// Site potentials `(dv/2, -dv/2)`: asymmetry `dv`, zero mean.
pub fn dimer_potentials(dv: f64) -> Vec<f64> {
    vec![0.5 * dv, -0.5 * dv]
}

/// Hopping `-J (c†_1 c_3 + h.c.) - J (c†_2 c_4 + h.c.) - (mu/2) n_1` on four
/// spinless modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub hopping: f64,
    pub mu: f64,
}

/// Dense Hermitian matrix of an operator, tied to the basis it is written in.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<B> {
    basis: Arc<B>,
    data: DMatrix<f64>,
}

impl<B: FockBasis> OperatorMatrix<B> {
    pub fn new(basis: Arc<B>, data: DMatrix<f64>) -> Result<Self> {
        let n = basis.dimension();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::domain(format!(
                "matrix is {}x{}, basis has dimension {n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(OperatorMatrix { basis, data })
    }

    pub fn basis(&self) -> &Arc<B> {
        &self.basis
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn dimension(&self) -> usize {
        self.data.nrows()
    }

    /// `max |H - H^T|`.
    pub fn hermiticity_error(&self) -> f64 {
        linalg::max_asymmetry(&self.data)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvals_symmetric(&self.data)
    }

    pub fn ground_state(&self) -> GroundState {
        linalg::ground_state(&self.data)
    }
}

fn bonds(sites: usize, boundary: Boundary) -> Result<Vec<(usize, usize)>> {
    let mut out: Vec<(usize, usize)> = (0..sites.saturating_sub(1)).map(|j| (j, j + 1)).collect();
    if boundary == Boundary::Periodic {
        if sites < 3 {
            return Err(Error::domain(
                "periodic boundary needs at least 3 sites (L = 2 would double the bond)",
            ));
        }
        out.push((sites - 1, 0));
    }
    Ok(out)
}

/// Adds `-t (c†_a c_b + c†_b c_a)` for every mode pair.
fn add_hopping<B: FockBasis>(
    basis: &B,
    m: &mut DMatrix<f64>,
    pairs: &[(usize, usize)],
    t: f64,
) -> Result<()> {
    for col in 0..basis.dimension() {
        let w = basis.mode_word(col);
        for &(a, b) in pairs {
            for (from, to) in [(a, b), (b, a)] {
                if let Some((w2, sign)) = hop(w, from, to) {
                    let row = basis
                        .index_of_mode_word(w2)
                        .ok_or_else(|| Error::domain("hopping term escaped the sector"))?;
                    m[(row, col)] -= t * sign;
                }
            }
        }
    }
    Ok(())
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite")))
    }
}

pub fn build_hubbard(
    p: &HubbardParams,
    basis: Arc<SectorBasis>,
) -> Result<OperatorMatrix<SectorBasis>> {
    let sites = basis.sites();
    if p.potentials.len() != sites {
        return Err(Error::domain(format!(
            "{} potentials for {sites} sites",
            p.potentials.len()
        )));
    }
    check_finite("J", p.hopping)?;
    check_finite("U", p.interaction)?;
    for &v in &p.potentials {
        check_finite("site potential", v)?;
    }
    let dim = basis.dimension();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, &(up, down)) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for (j, &v) in p.potentials.iter().enumerate() {
            let nu = (up >> j) & 1;
            let nd = (down >> j) & 1;
            diag += v * f64::from(nu + nd) + p.interaction * f64::from(nu * nd);
        }
        m[(i, i)] = diag;
    }
    let mut pairs = Vec::new();
    for (i, j) in bonds(sites, p.boundary)? {
        pairs.push((i, j));
        pairs.push((sites + i, sites + j));
    }
    add_hopping(basis.as_ref(), &mut m, &pairs, p.hopping)?;
    OperatorMatrix::new(basis, m)
}

/// Non-interacting chain with the Hubbard kinetic term (open boundary).
pub fn build_free_spinful(
    hopping: f64,
    potentials: &[f64],
    basis: Arc<SectorBasis>,
) -> Result<OperatorMatrix<SectorBasis>> {
    let p = HubbardParams {
        hopping,
        interaction: 0.0,
        potentials: potentials.to_vec(),
        boundary: Boundary::Open,
    };
    build_hubbard(&p, basis)
}

/// Auxiliary model on four spinless modes; chain one is modes (0, 2),
/// chain two is modes (1, 3).
pub fn build_aux_dimer(
    p: &AuxParams,
    basis: Arc<SpinlessBasis>,
) -> Result<OperatorMatrix<SpinlessBasis>> {
    if basis.modes() != 4 {
        return Err(Error::domain(format!(
            "auxiliary model needs 4 modes, basis has {}",
            basis.modes()
        )));
    }
    if !p.hopping.is_finite() || p.hopping == 0.0 {
        return Err(Error::domain(
            "auxiliary hopping must be finite and nonzero",
        ));
    }
    check_finite("mu", p.mu)?;
    let dim = basis.dimension();
    let mut m = DMatrix::zeros(dim, dim);
    for (i, &w) in basis.states().iter().enumerate() {
        if w & 1 != 0 {
            m[(i, i)] -= 0.5 * p.mu;
        }
    }
    add_hopping(basis.as_ref(), &mut m, &[(0, 2), (1, 3)], p.hopping)?;
    OperatorMatrix::new(basis, m)
}
