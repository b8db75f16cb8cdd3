//! Closed-form ground state of the half-filled, `S_z = 0` Hubbard dimer.
//!
//! Energies are measured from `v_1 + v_2`, so they coincide with the lowest
//! eigenvalue of [`crate::hamiltonians::build_hubbard`] for the zero-mean
//! potentials produced by [`crate::hamiltonians::dimer_potentials`].
//!
//! The four basis kets `|ud,0>, |u,d>, |d,u>, |0,ud>` are products of creation
//! operators written site 1 first and up before down within a site.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;

use crate::entanglement::EntanglementSpectrum;
use crate::error::{Error, Result};
use crate::hilbert::SectorBasis;
use crate::idistance::{self, DfBranch};

/// Closed-form ground state record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerSolution {
    pub hopping: f64,
    pub interaction: f64,
    pub dv: f64,
    pub energy: f64,
    /// `sqrt(U^2 + 3 dv^2 + 12 J^2)`.
    pub amplitude: f64,
    pub theta: f64,
    /// `U + dv - E`.
    pub a: f64,
    /// `U - dv - E`.
    pub b: f64,
    /// Squared norm of [`Self::amps`].
    pub norm: f64,
    /// Unnormalized amplitudes on `|ud,0>, |u,d>, |d,u>, |0,ud>`.
    pub amps: [f64; 4],
}

/// `(up word, down word, sign)` of each closed-form ket in the canonical
/// mode ordering of [`SectorBasis`]. `|d,u> = c†_{1d} c†_{2u}|0>` is the only
/// one out of Jordan-Wigner order.
const KETS: [(u32, u32, f64); 4] = [
    (0b01, 0b01, 1.0),
    (0b01, 0b10, 1.0),
    (0b10, 0b01, -1.0),
    (0b10, 0b10, 1.0),
];

pub fn dimer_closed_form(hopping: f64, interaction: f64, dv: f64) -> Result<DimerSolution> {
    if hopping == 0.0 {
        return Err(Error::domain("J must be nonzero"));
    }
    if ![hopping, interaction, dv].iter().all(|x| x.is_finite()) {
        return Err(Error::domain("dimer parameters must be finite"));
    }
    let (j2, u, dv2) = (hopping * hopping, interaction, dv * dv);
    let amplitude = (u * u + 3.0 * dv2 + 12.0 * j2).sqrt();
    let cos3 = u * (36.0 * j2 - 18.0 * dv2 + 2.0 * u * u)
        / (2.0 * (12.0 * j2 + 3.0 * dv2 + u * u).powf(1.5));
    let theta = cos3.clamp(-1.0, 1.0).acos() / 3.0;
    let energy = -2.0 / 3.0 * amplitude * theta.cos() + 2.0 * u / 3.0;
    let a = u + dv - energy;
    let b = u - dv - energy;
    if b == 0.0 {
        return Err(Error::Singular("U - dv - E vanishes".into()));
    }
    let amps = [2.0 * hopping, a, -a, 2.0 * hopping * a / b];
    let norm = amps.iter().map(|x| x * x).sum();
    let sol = DimerSolution {
        hopping,
        interaction,
        dv,
        energy,
        amplitude,
        theta,
        a,
        b,
        norm,
        amps,
    };
    debug_assert!(
        {
            let err = (sol.energy - numeric_ground_energy(hopping, interaction, dv)).abs();
            err <= 1e-8 * (1.0 + amplitude)
        },
        "closed-form root disagrees with the eigensolver at J={hopping} U={interaction} dv={dv}"
    );
    Ok(sol)
}

fn numeric_ground_energy(hopping: f64, interaction: f64, dv: f64) -> f64 {
    use crate::hamiltonians::{build_hubbard, HubbardParams};
    let basis = Arc::new(SectorBasis::new(2, 1, 1).expect("dimer sector"));
    build_hubbard(&HubbardParams::dimer(hopping, interaction, dv), basis)
        .expect("dimer hamiltonian")
        .ground_state()
        .energy
}

impl DimerSolution {
    /// The other two roots of the cubic, `theta + 2pi/3` and `theta + 4pi/3`.
    pub fn other_roots(&self) -> [f64; 2] {
        [2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|shift| {
            -2.0 / 3.0 * self.amplitude * (self.theta + shift).cos() + 2.0 * self.interaction / 3.0
        })
    }

    /// Normalized amplitudes on `|ud,0>, |u,d>, |d,u>, |0,ud>`.
    pub fn normalized_amps(&self) -> [f64; 4] {
        let s = self.norm.sqrt();
        self.amps.map(|x| x / s)
    }

    /// Normalized ground state expanded in `basis` (must be the `(2, 1, 1)` sector).
    pub fn state_in(&self, basis: &SectorBasis) -> Result<DVector<f64>> {
        if basis.sites() != 2 || basis.n_up() != 1 || basis.n_down() != 1 {
            return Err(Error::domain("dimer state needs the (L=2, 1, 1) sector"));
        }
        let mut psi = DVector::zeros(4);
        for (amp, &(up, down, sign)) in self.normalized_amps().iter().zip(&KETS) {
            psi[basis.index_of(up, down).expect("dimer ket")] = sign * amp;
        }
        Ok(psi)
    }

    /// Site-1 probabilities on `|ud>, |u>, |d>, |0>`, in that order.
    pub fn site_one_probabilities(&self) -> [f64; 4] {
        self.normalized_amps().map(|x| x * x)
    }

    /// Ground-state densities `(n_1, n_2)`.
    pub fn densities(&self) -> [f64; 2] {
        let [dd, u, d, e] = self.site_one_probabilities();
        let n1 = 2.0 * dd + u + d;
        let n2 = u + d + 2.0 * e;
        [n1, n2]
    }
}

/// Spectrum of the site-1 reduced density matrix. The four kets carry
/// distinct site-1 occupations, so the reduced matrix is diagonal.
pub fn dimer_entanglement_spectrum(sol: &DimerSolution) -> EntanglementSpectrum {
    EntanglementSpectrum::new(sol.site_one_probabilities().to_vec())
        .expect("normalized amplitudes give a spectrum")
}

/// Whether the dimer sits in the regime where the compact expression equals
/// the four-level solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimerRegime {
    StronglyCorrelated,
    /// The compact expression is not the interaction distance here; use
    /// [`crate::idistance::df_four_level`] instead.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerDf {
    pub value: f64,
    pub regime: DimerRegime,
}

/// `D_F = (2 J^2 / N) |(b^2 - a^2) / b^2|`.
///
/// The regime is strongly correlated when the singly occupied pair holds the
/// two largest levels and the four-level solver would take its matched-levels
/// branch; there the value is exact.
pub fn df_dimer_closed(hopping: f64, interaction: f64, dv: f64) -> Result<DimerDf> {
    let sol = dimer_closed_form(hopping, interaction, dv)?;
    let (a, b) = (sol.a, sol.b);
    if b == 0.0 {
        return Err(Error::Singular("U - dv - E vanishes".into()));
    }
    let value = 2.0 * hopping * hopping / sol.norm * ((b * b - a * a) / (b * b)).abs();
    let spectrum = dimer_entanglement_spectrum(&sol);
    let singles_lead = b * b >= 4.0 * hopping * hopping;
    let matched = idistance::four_level_branch(&spectrum) == DfBranch::MatchedLowLevels;
    let regime = if singles_lead && matched {
        DimerRegime::StronglyCorrelated
    } else {
        DimerRegime::Outside
    };
    Ok(DimerDf { value, regime })
}

/// Leading large-`U` term `4 J^2 |dv| / U^3`.
pub fn df_dimer_asymptotic(hopping: f64, interaction: f64, dv: f64) -> Result<f64> {
    if interaction <= 0.0 || !interaction.is_finite() {
        return Err(Error::domain("U must be positive"));
    }
    Ok(4.0 * hopping * hopping * dv.abs() / interaction.powi(3))
}
