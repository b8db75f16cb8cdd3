//! Exact diagonalization of small Hubbard chains, interaction distance to the
//! manifold of free-fermion states, Kohn-Sham inversion, and the optimal free
//! auxiliary model.

pub mod dimer;
pub mod entanglement;
pub mod error;
pub mod hamiltonians;
pub mod hilbert;
pub mod idistance;
pub mod kohnsham;
pub mod linalg;
pub mod minimize;
pub mod optmodel;
pub mod pipeline;

pub use dimer::{
    df_dimer_asymptotic, df_dimer_closed, dimer_closed_form, DimerDf, DimerRegime, DimerSolution,
};
pub use entanglement::{
    natural_metric, reduced_density_matrix, trace_distance, trace_distance_matrices,
    DensityMatrixBlock, EntanglementSpectrum,
};
pub use error::{Error, Result};
pub use hamiltonians::{AuxParams, Boundary, HubbardParams, OperatorMatrix};
pub use hilbert::{FockBasis, SectorBasis, SpinlessBasis};
pub use idistance::{
    df_four_level, df_numeric, DfBranch, DfResult, FreeSpectrumParams, NumericOptions,
};
pub use kohnsham::{invert_dimer, invert_iterative, KsOptions, KsSolution};
pub use optmodel::{BoundReport, MuConvention, OptimalState, TriangleReport};
