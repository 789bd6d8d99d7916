//! Scratch probes for calibrating the long-running acceptance criteria.
//! All ignored; run explicitly with `cargo test --test probe -- --ignored --nocapture`.

use escg::basis::{BasisFamily, BasisSet};
use escg::law::Law;
use escg::mesh::Mesh;
use escg::scenario::{Scenario, Solver, SolverOptions};
use escg::spatial::{MassMode, QuadOrders, StateField};
use escg::time::{compute_dt, TimeScheme};

fn advect_solver(mesh: &Mesh, p: usize, mass_mode: MassMode, correction: bool) -> Solver<'_> {
    let law = Law::Advection { a: 1.0, b: 0.0 };
    let basis = BasisSet::new(BasisFamily::Lagrange, p).unwrap();
    let mut opts = SolverOptions::new(&law, p);
    opts.mass_mode = mass_mode;
    opts.correction = correction;
    Solver::new(mesh, basis, law, opts).unwrap()
}

#[test]
#[ignore]
fn probe_linear_energy_stability() {
    for (p, scheme) in [(2usize, TimeScheme::SspRk33), (4, TimeScheme::SspRk54)] {
        let mesh = Mesh::generate_square(16, p).unwrap();
        let solver = advect_solver(&mesh, p, MassMode::Exact, false);
        let mut state = solver
            .initial_state(|x| Scenario::AdvectBump.initial(x))
            .unwrap();
        let mut energy = solver.mass_energy(&state);
        let e0 = energy;
        let mut worst_growth: f64 = 0.0;
        let dt = compute_dt(0.3, &mesh, &state, &solver.law);
        println!("p={p}: dt = {dt:.6e}, E0 = {e0:.6e}");
        for step in 0..150 {
            state = match solver.step(&state, dt, scheme) {
                Ok(s) => s,
                Err(e) => {
                    println!("p={p}: ABORT at step {step}: {e}");
                    return;
                }
            };
            let next = solver.mass_energy(&state);
            worst_growth = worst_growth.max((next - energy) / e0);
            energy = next;
        }
        println!(
            "p={p}: E_end/E0 = {:.12}, worst per-step relative growth = {worst_growth:.3e}, max|U| = {:.4}",
            energy / e0,
            state.max().abs().max(state.min().abs())
        );
    }
}

#[test]
#[ignore]
fn probe_crash_and_rescue() {
    let p = 4;
    let mesh = Mesh::generate_square(16, p).unwrap();
    for edge_order in [8usize, 7, 6, 5] {
        for correction in [false, true] {
            let law = Law::Advection { a: 1.0, b: 0.0 };
            let basis = BasisSet::new(BasisFamily::Lagrange, p).unwrap();
            let mut opts = SolverOptions::new(&law, p);
            opts.mass_mode = MassMode::UnderIntegrated;
            opts.correction = correction;
            opts.orders = QuadOrders {
                volume: 8,
                edge: edge_order,
            };
            let solver = Solver::new(&mesh, basis, law, opts).unwrap();
            let mut state = solver
                .initial_state(|x| Scenario::AdvectBump.initial(x))
                .unwrap();
            let dt = compute_dt(0.01, &mesh, &state, &solver.law);
            let mut outcome = String::from("survived");
            let steps = if correction { 1700 } else { 400 };
            let mut worst: f64 = 0.0;
            for step in 0..steps {
                match solver.step(&state, dt, TimeScheme::SspRk54) {
                    Ok(s) => state = s,
                    Err(e) => {
                        outcome = format!("abort at step {step}: {e}");
                        break;
                    }
                }
                let amp = state.max().abs().max(state.min().abs());
                worst = worst.max(amp);
                if amp > 2.5 {
                    outcome = format!("|U| = {amp:.3} at step {step}");
                    break;
                }
            }
            println!(
                "edge={edge_order} correction={correction}: {outcome}, peak |U| = {worst:.4}"
            );
        }
    }
}

#[test]
#[ignore]
fn probe_mass_conditioning() {
    // spectrum of the under-integrated p=4 mass matrix on a small mesh
    let p = 4;
    let mesh = Mesh::generate_square(4, p).unwrap();
    let basis = BasisSet::new(BasisFamily::Lagrange, p).unwrap();
    for mode in [MassMode::Exact, MassMode::UnderIntegrated] {
        let mass = escg::spatial::assemble_mass(&mesh, &basis, mode).unwrap();
        let n = mesh.n_dofs();
        let mut dense = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                dense[(i, j)] = mass.matrix.get(i, j);
            }
        }
        let eig = nalgebra::SymmetricEigen::new(dense);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let negs = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
        println!("{mode:?}: lambda in [{min:.3e}, {max:.3e}], negative count = {negs}");
    }
}

#[test]
#[ignore]
fn probe_rotation_entropy() {
    let p = 3;
    for (rings, cfl) in [(13usize, 0.2f64), (13, 0.1), (16, 0.2)] {
        let mesh = Mesh::generate_disk(rings, p).unwrap();
        let law = Law::Rotation;
        let basis = BasisSet::new(BasisFamily::Bernstein, p).unwrap();
        let opts = SolverOptions::new(&law, p);
        let solver = Solver::new(&mesh, basis, law, opts).unwrap();
        let mut state = solver
            .initial_state(|x| Scenario::Rotation.initial(x))
            .unwrap();
        let s0 = solver.entropy(&state);
        let mut t = 0.0;
        let mut steps = 0usize;
        while t < 1.0 - 1e-13 {
            let dt = compute_dt(cfl, &mesh, &state, &solver.law).min(1.0 - t);
            state = solver.step(&state, dt, TimeScheme::SspRk33).unwrap();
            t += dt;
            steps += 1;
        }
        let change = solver.entropy(&state) - s0;
        println!(
            "rings={rings} cfl={cfl}: {steps} steps, S0 = {s0:.8e}, change = {change:.6e}, max|U| = {:.4}",
            state.max()
        );
    }
}

#[test]
#[ignore]
fn probe_cosflux_entropy_table() {
    let p = 3;
    let rings = 13;
    let mesh = Mesh::generate_disk(rings, p).unwrap();
    let law = Law::CosFlux;
    let basis = BasisSet::new(BasisFamily::Bernstein, p).unwrap();
    let opts = SolverOptions::new(&law, p);
    let solver = Solver::new(&mesh, basis, law, opts).unwrap();
    let mut state = solver
        .initial_state(|x| Scenario::CosFlux.initial(x))
        .unwrap();
    let s0 = solver.entropy(&state);
    let mut t = 0.0;
    let mut steps = 0;
    let mut worst_positive: f64 = f64::NEG_INFINITY;
    while t < 0.2 - 1e-13 {
        let dt = compute_dt(0.1, &mesh, &state, &solver.law).min(0.2 - t);
        state = solver.step(&state, dt, TimeScheme::SspRk33).unwrap();
        t += dt;
        steps += 1;
        let change = solver.entropy(&state) - s0;
        worst_positive = worst_positive.max(change);
        if steps % 20 == 0 {
            println!("  t = {t:.4}: change = {change:.8e}");
        }
    }
    let change = solver.entropy(&state) - s0;
    println!(
        "{} elements, {steps} steps: final change = {change:.8e}, worst recorded = {worst_positive:.3e}, u in [{:.4}, {:.4}]",
        mesh.elements.len(),
        state.min(),
        state.max()
    );
}
