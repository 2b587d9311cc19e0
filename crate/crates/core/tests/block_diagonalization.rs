use coherent_shift::model::*;
use nalgebra::DMatrix;

fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn k_block_union(params: &ModelParams) -> Vec<f64> {
    let n0 = (params.n_sites - 1) / 2;
    let mut all = Vec::new();
    for k in periodic_k_grid(params.n_sites) {
        let b = build_k_block(params, k, n0, KBlockMode::PeriodicExact).unwrap();
        all.extend(sorted_eigs(b.matrix));
    }
    all.sort_by(f64::total_cmp);
    all
}

fn real_space(params: &ModelParams, sector: Sector) -> Vec<f64> {
    let basis = enumerate_basis(params, sector).unwrap();
    let h = build_real_space_hamiltonian(params, &basis).unwrap();
    sorted_eigs(h.to_dense_real().unwrap())
}

fn assert_multiset_eq(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

#[test]
fn k_blocks_reproduce_two_boson_spectrum() {
    for n in [5, 7, 9, 11] {
        let p = ModelParams::bose(1.0, 8.0, 0.5, n, Boundary::Periodic).unwrap();
        assert_multiset_eq(&k_block_union(&p), &real_space(&p, Sector::Bose { n_particles: 2 }), 1e-12);
    }
    // negative hopping and attractive couplings
    let p = ModelParams::bose(-0.7, -3.0, 2.0, 9, Boundary::Periodic).unwrap();
    assert_multiset_eq(&k_block_union(&p), &real_space(&p, Sector::Bose { n_particles: 2 }), 1e-12);
}

/// The `(1, 1)` Fermi sector splits into singlets (the two-boson problem at
/// `V = 0`) and triplets (the `(2, 0)` sector).
#[test]
fn fermi_singlet_k_blocks_share_the_bose_form() {
    for n in [5, 7, 9] {
        let f = ModelParams::fermi(1.0, 6.0, n, Boundary::Periodic).unwrap();
        let b = ModelParams::bose(1.0, 6.0, 0.0, n, Boundary::Periodic).unwrap();
        let mut union = k_block_union(&b);
        union.extend(real_space(&f, Sector::Fermi { n_up: 2, n_down: 0 }));
        union.sort_by(f64::total_cmp);
        assert_multiset_eq(&union, &real_space(&f, Sector::Fermi { n_up: 1, n_down: 1 }), 1e-12);
    }
}

fn translate(c: &Configuration, n: u16) -> Configuration {
    let shift = |v: &[u16]| {
        let mut s: Vec<u16> = v.iter().map(|&x| (x + 1) % n).collect();
        s.sort_unstable();
        s
    };
    match c {
        Configuration::Bose { sites } => Configuration::Bose { sites: shift(sites) },
        Configuration::Fermi { up, down } => Configuration::Fermi { up: shift(up), down: shift(down) },
    }
}

#[test]
fn periodic_bose_hamiltonian_commutes_with_translation() {
    let p = ModelParams::bose(1.0, 5.0, 1.5, 8, Boundary::Periodic).unwrap();
    let basis = enumerate_basis(&p, Sector::Bose { n_particles: 3 }).unwrap();
    let h = build_real_space_hamiltonian(&p, &basis).unwrap().to_dense_real().unwrap();
    let dim = basis.len();
    let mut t = DMatrix::zeros(dim, dim);
    for (i, c) in basis.configurations().enumerate() {
        let j = basis.index_of(&translate(&c, 8)).unwrap();
        t[(j, i)] = 1.0;
    }
    assert!((&h * &t - &t * &h).amax() < 1e-14);
}

#[test]
fn open_chain_breaks_translation_but_keeps_reflection() {
    let n = 7u16;
    let p = ModelParams::bose(1.0, 5.0, 1.5, n as usize, Boundary::Open).unwrap();
    let basis = enumerate_basis(&p, Sector::Bose { n_particles: 2 }).unwrap();
    let h = build_real_space_hamiltonian(&p, &basis).unwrap().to_dense_real().unwrap();
    let dim = basis.len();
    let mut r = DMatrix::zeros(dim, dim);
    for (i, c) in basis.configurations().enumerate() {
        let Configuration::Bose { sites } = c else { unreachable!() };
        let mut m: Vec<u16> = sites.iter().map(|&x| n - 1 - x).collect();
        m.sort_unstable();
        let j = basis.index_of(&Configuration::Bose { sites: m }).unwrap();
        r[(j, i)] = 1.0;
    }
    assert!((&h * &r - &r * &h).amax() < 1e-14);
}

#[test]
fn general_u_dimer_eigenvalues() {
    for u in [-4.0, 0.5, 3.0, 12.0] {
        let p = ModelParams::bose(1.0, u, 0.0, 2, Boundary::Open).unwrap();
        let got = real_space(&p, Sector::Bose { n_particles: 2 });
        let d = (u * u + 16.0f64).sqrt();
        let mut want = vec![u, (u + d) / 2.0, (u - d) / 2.0];
        want.sort_by(f64::total_cmp);
        assert_multiset_eq(&got, &want, 1e-12);
    }
}
