use std::fs::File;

use nalgebra::Vector3;
use rotframe_core::dirac::{dirac_hamiltonian, rotating_metric};
use rotframe_core::grid::Boundary;
use rotframe_core::io::{
    load_snapshot, read_sparse_triplets, read_trajectory_csv, save_snapshot, write_sparse_triplets, write_trajectory_csv,
};
use rotframe_core::rotframe::{build_hamiltonian, ehrenfest_trajectory, propagate, HamiltonianFlags};
use rotframe_core::{dense, Grid, RotationSetup, WaveState, C64};

#[test]
fn snapshot_resumes_propagation_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::centered(2, 32, 20.0).unwrap().with_boundary(Boundary::Sponge { width: 2.0, strength: 0.5 });
    let setup = RotationSetup::new(1.0, 1.0, 30.0, Vector3::new(0.0, 0.0, 0.4)).unwrap();
    let h = build_hamiltonian(&setup, HamiltonianFlags { include_spin: true, include_spin_orbit: true });
    let s = WaveState::gaussian(g, Vector3::new(1.0, 0.5, 0.0), Vector3::new(0.2, 0.0, 0.0), 1.5, 1.0)
        .with_spinor([C64::new(0.6, 0.0), C64::new(0.0, 0.8)])
        .unwrap();

    let straight = propagate(&s, &h, 0.05, 20).unwrap().state;
    let half = propagate(&s, &h, 0.05, 10).unwrap().state;
    let path = dir.path().join("half.bin");
    save_snapshot(&half, &path).unwrap();
    let resumed = propagate(&load_snapshot(&path).unwrap(), &h, 0.05, 10).unwrap().state;
    assert_eq!(resumed, straight);
}

#[test]
fn trajectory_csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::centered(2, 32, 24.0).unwrap();
    let setup = RotationSetup::natural(1.0, Vector3::new(0.0, 0.0, 0.3)).unwrap();
    let h = build_hamiltonian(&setup, HamiltonianFlags::default());
    let s = WaveState::gaussian(g, Vector3::new(2.0, 0.0, 0.0), Vector3::zeros(), 1.5, 1.0);
    let tr = ehrenfest_trajectory(&s, &h, 0.1, 30, 3).unwrap().to_trajectory();
    let path = dir.path().join("traj.csv");
    write_trajectory_csv(&tr, File::create(&path).unwrap()).unwrap();
    let back = read_trajectory_csv(File::open(&path).unwrap()).unwrap();
    assert_eq!(back, tr);
}

#[test]
fn dirac_matrix_triplets_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = RotationSetup::new(1.0, 1.0, 5.0, Vector3::new(0.0, 0.0, 0.1)).unwrap();
    let g = Grid::centered(1, 12, 10.0).unwrap();
    let m = dirac_hamiltonian(&s, &rotating_metric(&s), &g).unwrap();
    let path = dir.path().join("dirac.txt");
    write_sparse_triplets(&m, 0.0, File::create(&path).unwrap()).unwrap();
    let back = read_sparse_triplets(File::open(&path).unwrap()).unwrap();
    assert_eq!(dense::max_abs_diff(&m, &back), 0.0);
}
