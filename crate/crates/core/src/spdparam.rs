//! Symmetric positive-definite matrices from eigenvalues and hyperspherical
//! angles.
//!
//! An `N x N` SPD matrix is written `K = Q diag(lambda) Q^T`. The orthonormal
//! factor `Q` is assembled column by column: column `i` is a unit vector on
//! the `(N - i)`-sphere, described by `N - 1 - i` angles, and mapped into the
//! orthogonal complement of the columns already placed. Together with the `N`
//! eigenvalues this uses exactly `N (N + 1) / 2` parameters.
//!
//! The complement basis is computed deterministically by Gram-Schmidt over
//! the standard basis vectors in index order, so all-zero angles give
//! `Q = I`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance for the orthonormality precondition of [`null_space_orthonormal_basis`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Residuals below this are treated as lying inside the existing span.
const RESIDUAL_TOL: f64 = 1e-12;

/// Number of free parameters of an `n x n` SPD matrix.
pub const fn parameter_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Number of hyperspherical angles for an `n x n` rotation.
pub const fn angle_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The angles of an `N`-dimensional rotation, stored row after row.
///
/// Row `i` (zero based) holds `N - 1 - i` angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    dim: usize,
    angles: Vec<f64>,
}

impl AngleSet {
    pub fn new(dim: usize, angles: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("rotation dimension must be positive".into()));
        }
        if angles.len() != angle_count(dim) {
            return Err(Error::Argument(format!(
                "dimension {dim} needs {} angles, got {}",
                angle_count(dim),
                angles.len()
            )));
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::Argument(format!("non-finite angle {bad}")));
        }
        Ok(Self { dim, angles })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            angles: vec![0.0; angle_count(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    /// Angles of row `i`, which parameterize column `i` of `Q`.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim;
        // rows 0..i hold (n-1) + (n-2) + ... + (n-i) angles
        let start = i * (2 * n - 1 - i) / 2;
        &self.angles[start..start + (n - 1 - i)]
    }
}

/// Strictly positive eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSet(Vec<f64>);

impl EigenvalueSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("empty eigenvalue set".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalue {bad} is not strictly positive"
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpdParameters {
    pub eigenvalues: EigenvalueSet,
    pub angles: AngleSet,
}

impl SpdParameters {
    pub fn new(eigenvalues: EigenvalueSet, angles: AngleSet) -> Result<Self> {
        if eigenvalues.len() != angles.dim() {
            return Err(Error::Argument(format!(
                "{} eigenvalues for a {}-dimensional rotation",
                eigenvalues.len(),
                angles.dim()
            )));
        }
        Ok(Self {
            eigenvalues,
            angles,
        })
    }

    /// Split a flat vector `[lambda_1..lambda_N, theta_11, ..]` of length `N(N+1)/2`.
    pub fn from_flat(dim: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != parameter_count(dim) {
            return Err(Error::Argument(format!(
                "dimension {dim} needs {} parameters, got {}",
                parameter_count(dim),
                flat.len()
            )));
        }
        let (eig, ang) = flat.split_at(dim);
        Self::new(
            EigenvalueSet::new(eig.to_vec())?,
            AngleSet::new(dim, ang.to_vec())?,
        )
    }

    pub fn dim(&self) -> usize {
        self.angles.dim()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.as_slice().to_vec();
        v.extend_from_slice(self.angles.as_slice());
        v
    }
}

/// A validated symmetric positive-definite weighting matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(DMatrix<f64>);

impl WeightMatrix {
    /// Validate symmetry (relative to the largest entry) and positive-definiteness.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&entries, 1e-12)?;
        let lmin = eigenvalue_floor_check(&entries)?;
        if !(lmin > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "smallest eigenvalue {lmin:e}"
            )));
        }
        Ok(Self(entries))
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        EigenvalueSet::new(weights.to_vec())?;
        Ok(Self(DMatrix::from_diagonal(&DVector::from_column_slice(
            weights,
        ))))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0.clone()).eigenvalues.min()
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

fn check_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Contract(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax();
    let asym = (m - m.transpose()).amax();
    if asym > rel_tol * scale {
        return Err(Error::Contract(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Point on the unit sphere in `angles.len() + 1` dimensions.
///
/// Component `k` is `sin(t_1)...sin(t_k) cos(t_{k+1})`, the last component is
/// the product of all sines. With no angles the result is `[1]`.
pub fn hypersphere_unit_vector(angles: &[f64], dim: usize) -> Result<DVector<f64>> {
    if dim == 0 || angles.len() + 1 != dim {
        return Err(Error::Argument(format!(
            "{} angles cannot describe a unit vector of length {dim}",
            angles.len()
        )));
    }
    let mut v = DVector::zeros(dim);
    let mut sin_prod = 1.0;
    for (k, theta) in angles.iter().enumerate() {
        let (s, c) = theta.sin_cos();
        v[k] = sin_prod * c;
        sin_prod *= s;
    }
    v[dim - 1] = sin_prod;
    Ok(v)
}

/// Orthonormal basis of the orthogonal complement of the columns of `partial`.
///
/// `partial` is `n x k` with orthonormal columns, `k < n`; the result is
/// `n x (n - k)`. Candidates are the standard basis vectors taken in index
/// order; each is orthogonalized against everything accepted so far and kept
/// only if a non-negligible residual remains.
pub fn null_space_orthonormal_basis(partial: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = partial.nrows();
    let k = partial.ncols();
    if k >= n {
        return Err(Error::Contract(format!(
            "complement of {k} columns in {n} dimensions is empty"
        )));
    }
    if k > 0 {
        let gram = partial.transpose() * partial;
        let dev = (gram - DMatrix::<f64>::identity(k, k)).amax();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::Contract(format!(
                "input columns are not orthonormal (deviation {dev:e})"
            )));
        }
    }

    let mut accepted: Vec<DVector<f64>> = partial.column_iter().map(|c| c.into_owned()).collect();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(n - k);

    let project_out = |v: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for q in basis {
            let c = q.dot(v);
            v.axpy(-c, q, 1.0);
        }
    };

    for idx in 0..n {
        if out.len() == n - k {
            break;
        }
        let mut r = DVector::zeros(n);
        r[idx] = 1.0;
        project_out(&mut r, &accepted);
        project_out(&mut r, &accepted);
        let norm = r.norm();
        if norm <= RESIDUAL_TOL {
            continue;
        }
        r /= norm;
        project_out(&mut r, &accepted);
        let norm = r.norm();
        if norm < 0.5 {
            continue;
        }
        r /= norm;
        accepted.push(r.clone());
        out.push(r);
    }

    if out.len() != n - k {
        return Err(Error::Contract(format!(
            "found only {} of {} complement vectors",
            out.len(),
            n - k
        )));
    }
    Ok(DMatrix::from_columns(&out))
}

/// Orthonormal `N x N` matrix from hyperspherical angles.
pub fn build_rotation(angles: &AngleSet) -> DMatrix<f64> {
    let n = angles.dim();
    let mut q = DMatrix::<f64>::zeros(n, 0);
    for i in 0..n {
        let vp = hypersphere_unit_vector(angles.row(i), n - i)
            .expect("row length matches dimension by construction");
        let v = if i == 0 {
            vp
        } else {
            let basis = null_space_orthonormal_basis(&q)
                .expect("columns of Q are orthonormal by construction");
            basis * vp
        };
        q = q.insert_column(i, 0.0);
        q.set_column(i, &v);
    }
    q
}

/// `K = Q diag(lambda) Q^T`, symmetrized.
pub fn build_spd(params: &SpdParameters) -> Result<WeightMatrix> {
    let q = build_rotation(&params.angles);
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(
        params.eigenvalues.as_slice(),
    ));
    let k = &q * lambda * q.transpose();
    let k = (&k + k.transpose()) * 0.5;
    Ok(WeightMatrix(k))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn eigenvalue_floor_check(matrix: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(matrix, 1e-12)?;
    Ok(SymmetricEigen::new(matrix.clone()).eigenvalues.min())
}
