//! Smallest eigenpairs of dense symmetric matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// One orthonormal eigenvector per column.
    pub vectors: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-9;

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
    }
    let scale = a.amax().max(1.0);
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Numerical(format!(
                    "matrix not symmetric at ({i}, {j}): {} vs {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// Full eigendecomposition, ascending. Equal eigenvalues keep the solver's
/// column order, so identical input gives identical output.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<EigenPairs> {
    check_symmetric(a)?;
    let eig = SymmetricEigen::new(a.clone());
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigenvalue solver produced non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenPairs { values, vectors })
}

/// The `count` eigenvectors of the smallest eigenvalues as columns.
pub fn smallest_eigenvectors(a: &DMatrix<f64>, count: usize) -> Result<EigenPairs> {
    if count > a.nrows() {
        return Err(Error::Dimension(format!(
            "requested {count} eigenvectors of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let full = symmetric_eigen(a)?;
    Ok(EigenPairs {
        values: full.values[..count].to_vec(),
        vectors: full.vectors.columns(0, count).into_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &b + b.transpose()
    }

    #[test]
    fn zero_matrix_gives_orthonormal_basis() {
        let a = DMatrix::zeros(3, 3);
        let y = smallest_eigenvectors(&a, 2).unwrap().vectors;
        assert!((y.transpose() * &y - DMatrix::identity(2, 2)).amax() < 1e-12);
        assert!((&a * &y).amax() < 1e-12);
    }

    #[test]
    fn diagonal_case() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let pairs = smallest_eigenvectors(&a, 2).unwrap();
        assert_eq!(pairs.values, vec![1.0, 2.0]);
        assert!((pairs.vectors[(1, 0)].abs() - 1.0).abs() < 1e-12);
        assert!((pairs.vectors[(2, 1)].abs() - 1.0).abs() < 1e-12);
        assert!(pairs.vectors[(0, 0)].abs() < 1e-12 && pairs.vectors[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn reconstructs_random_matrix() {
        let a = random_symmetric(8, 3);
        let e = symmetric_eigen(&a).unwrap();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        let back = &e.vectors * lambda * e.vectors.transpose();
        assert!((back - &a).amax() < 1e-8);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn residuals_are_small() {
        let a = random_symmetric(12, 4);
        let e = smallest_eigenvectors(&a, 5).unwrap();
        let norm = a.norm();
        for (c, &lambda) in e.values.iter().enumerate() {
            let y = e.vectors.column(c);
            assert!((&a * y - y * lambda).norm() <= 1e-8 * norm);
        }
    }

    #[test]
    fn rejects_asymmetric_and_oversized() {
        let mut a = random_symmetric(4, 1);
        a[(0, 1)] += 1e-3;
        assert!(matches!(symmetric_eigen(&a), Err(Error::Numerical(_))));
        assert!(matches!(
            smallest_eigenvectors(&random_symmetric(3, 1), 4),
            Err(Error::Dimension(_))
        ));
    }
}
