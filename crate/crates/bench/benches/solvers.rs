use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use freefit_core::hamiltonians::build_hubbard;
use freefit_core::pipeline::{analyze_point, PointOptions, System};
use freefit_core::{
    df_dimer_closed, df_four_level, df_numeric, invert_dimer, reduced_density_matrix,
    EntanglementSpectrum, HubbardParams, NumericOptions, SectorBasis,
};

fn spectra(c: &mut Criterion) {
    let s = EntanglementSpectrum::new(vec![0.45, 0.3, 0.15, 0.1]).unwrap();
    c.bench_function("df_four_level", |b| {
        b.iter(|| df_four_level(black_box(&s)).unwrap())
    });
    let opts = NumericOptions::default();
    c.bench_function("df_numeric_2_modes", |b| {
        b.iter(|| df_numeric(black_box(&s), 2, &opts).unwrap())
    });
    c.bench_function("df_dimer_closed", |b| {
        b.iter(|| df_dimer_closed(1.0, black_box(20.0), 0.5).unwrap())
    });
}

fn lattice(c: &mut Criterion) {
    let basis = Arc::new(SectorBasis::new(6, 3, 3).unwrap());
    let params = HubbardParams {
        hopping: 1.0,
        interaction: 4.0,
        potentials: vec![0.0; 6],
        boundary: Default::default(),
    };
    c.bench_function("hubbard_l6_ground_state", |b| {
        b.iter(|| {
            build_hubbard(&params, basis.clone())
                .unwrap()
                .ground_state()
        })
    });
    let psi = build_hubbard(&params, basis.clone())
        .unwrap()
        .ground_state()
        .vector;
    c.bench_function("rdm_l6_half", |b| {
        b.iter(|| reduced_density_matrix(&psi, basis.as_ref(), &[0, 1, 2]).unwrap())
    });
    c.bench_function("ks_dimer_bisection", |b| {
        b.iter(|| invert_dimer(black_box([1.3, 0.7]), 1.0).unwrap())
    });
}

fn pipeline(c: &mut Criterion) {
    let system = System::dimer(1.0, 0.5);
    let opts = PointOptions::default();
    c.bench_function("dimer_sweep_point", |b| {
        b.iter(|| {
            analyze_point(&system, black_box(10.0), &opts)
                .unwrap()
                .row()
                .unwrap()
        })
    });
}

criterion_group!(benches, spectra, lattice, pipeline);
criterion_main!(benches);
