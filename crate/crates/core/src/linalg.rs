//! Dense symmetric eigen-decomposition (cyclic Jacobi) and the pieces of the
//! SVD the Euclidean paths need.

use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SymEigen<S> {
    pub values: Vec<S>,
    pub vectors: Vec<Vec<S>>,
}

/// Cyclic Jacobi on a row-major symmetric `n x n` matrix.
pub fn sym_eigen<S: Scalar>(matrix: &[S], n: usize) -> SymEigen<S> {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut v = vec![S::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = S::one();
    }
    let scale = a.iter().map(|x| x.abs()).fold(S::zero(), S::max);
    let tiny = S::epsilon() * S::epsilon() * scale.max(S::min_positive_value());
    for _ in 0..MAX_SWEEPS {
        let off: S = (0..n).flat_map(|p| ((p + 1)..n).map(move |q| (p, q))).map(|(p, q)| a[p * n + q] * a[p * n + q]).sum();
        if off.sqrt() <= S::epsilon() * scale || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tiny {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (S::lit(2.0) * apq);
                let sign = if theta < S::zero() { -S::one() } else { S::one() };
                let t = sign / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = (t * t + S::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect(),
    }
}

/// `M^T M` for a row-major `rows x cols` matrix.
pub fn gram_of_columns<S: Scalar>(m: &[S], rows: usize, cols: usize) -> Vec<S> {
    let mut g = vec![S::zero(); cols * cols];
    for i in 0..cols {
        for j in i..cols {
            let s: S = (0..rows).map(|r| m[r * cols + i] * m[r * cols + j]).sum();
            g[i * cols + j] = s;
            g[j * cols + i] = s;
        }
    }
    g
}

/// Largest singular value and an orthonormal basis of the right singular
/// vectors whose singular values lie within `rel_tol * sigma_max` of it.
#[derive(Clone, Debug)]
pub struct TopSingular<S> {
    pub sigma: S,
    pub basis: Vec<Vec<S>>,
    /// All singular values, descending.
    pub spectrum: Vec<S>,
}

pub fn top_singular<S: Scalar>(m: &[S], rows: usize, cols: usize, rel_tol: S) -> TopSingular<S> {
    let eig = sym_eigen(&gram_of_columns(m, rows, cols), cols);
    let spectrum: Vec<S> = eig.values.iter().map(|&l| l.max(S::zero()).sqrt()).collect();
    let sigma = spectrum[0];
    let cut = sigma - rel_tol * sigma;
    let basis = spectrum
        .iter()
        .zip(eig.vectors)
        .filter(|(&s, _)| s >= cut)
        .map(|(_, v)| v)
        .collect();
    TopSingular { sigma, basis, spectrum }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let e = sym_eigen(&[2.0f64, 1.0, 1.0, 2.0], 2);
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = &e.vectors[0];
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((v[0] - v[1]).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let n = 5;
        let mut a = vec![0.0f64; n * n];
        let mut seed = 12345u64;
        for i in 0..n {
            for j in i..n {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let e = sym_eigen(&a, n);
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j]).sum();
                assert!((r - a[i * n + j]).abs() < 1e-13);
            }
        }
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn top_singular_detects_multiplicity() {
        // diag(1, -1) has sigma = 1 with multiplicity two
        let t = top_singular(&[1.0f64, 0.0, 0.0, -1.0], 2, 2, 1e-9);
        assert_eq!(t.basis.len(), 2);
        assert!((t.sigma - 1.0).abs() < 1e-15);
        let t = top_singular(&[2.0f64, 0.0, 0.0, 1.0], 2, 2, 1e-9);
        assert_eq!(t.basis.len(), 1);
        assert!((t.sigma - 2.0).abs() < 1e-15);
    }
}
