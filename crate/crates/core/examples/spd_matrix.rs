//! Build a symmetric positive-definite weighting matrix from eigenvalues and
//! rotation angles, then recover the spectrum.
//!
//! `cargo run --example spd_matrix`

use clftraj::spdparam::{build_rotation, build_spd, parameter_count, AngleSet, EigenvalueSet, SpdParameters};
use nalgebra::SymmetricEigen;

fn main() -> clftraj::Result<()> {
    let n = 3;
    let eigenvalues = EigenvalueSet::new(vec![2.0, 30.0, 75.0])?;
    let angles = AngleSet::new(n, vec![0.4, 1.3, 2.2])?;
    let params = SpdParameters::new(eigenvalues, angles)?;
    println!("N = {n}: {} parameters {:?}", parameter_count(n), params.to_flat());

    let q = build_rotation(&params.angles);
    println!("Q ={q:.6}");
    println!("|Q^T Q - I|_max = {:.2e}", (q.transpose() * &q - nalgebra::DMatrix::identity(n, n)).abs().max());

    let k = build_spd(&params)?;
    println!("K ={:.6}", k.matrix());
    let mut spectrum: Vec<f64> = SymmetricEigen::new(k.matrix().clone()).eigenvalues.iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    println!("recovered eigenvalues {spectrum:.10?}");

    let zero = SpdParameters::new(params.eigenvalues.clone(), AngleSet::zeros(n))?;
    println!("all-zero angles give diag(K) ={:.3}", build_spd(&zero)?.matrix());
    Ok(())
}
