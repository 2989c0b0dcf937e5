//! Map an SU(3) ring onto qubits, count Pauli species and check the sector
//! spectrum against the fermionic oracle.

use sunvqe::fermion_ed::{build_fermionic_hamiltonian, enumerate_sector_basis};
use sunvqe::jw::build_qubit_hamiltonian;
use sunvqe::pauli::{species_counts, term_count_report};
use sunvqe::sparse::hermitian_eigenvalues;
use sunvqe::{HubbardModel, SpinSector};

fn main() -> sunvqe::Result<()> {
    let model = HubbardModel::nearest_neighbor(3, 3, 1.0, 5.0, 1.0, 0.2);
    let sector = SpinSector::uniform(3, 1);
    let h = build_qubit_hamiltonian(&model, &sector)?;

    let counts = species_counts(&h);
    let expected = term_count_report(&model);
    println!("species   mapped  closed-form");
    for (name, a, b) in [
        ("XX", counts.xx, expected.xx),
        ("YY", counts.yy, expected.yy),
        ("XY", counts.xy, expected.xy),
        ("YX", counts.yx, expected.yx),
        ("ZZ", counts.zz, expected.zz),
        ("Z", counts.z, expected.z),
    ] {
        println!("{:<8}{:>8}{:>13}", name, a, b);
    }
    println!(
        "total   {:>8}{:>13}  (+ identity {:.4})",
        counts.total(),
        expected.total(),
        h.constant_term().re
    );

    let basis = enumerate_sector_basis(model.sites, &sector)?;
    let words: Vec<usize> = basis.words().iter().map(|&w| w as usize).collect();
    let qubit = hermitian_eigenvalues(&h.to_dense()?.restrict(&words));
    let fermion = hermitian_eigenvalues(&build_fermionic_hamiltonian(&model, &basis).to_dense());
    let worst = qubit
        .iter()
        .zip(&fermion)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "sector dimension {}, lowest level {:.10}, max spectral mismatch {:.2e}",
        basis.len(),
        qubit[0],
        worst
    );

    println!("\nfirst terms:");
    for line in h.to_text().lines().take(6) {
        println!("  {}", line);
    }
    Ok(())
}
