//! Dense helpers for the small matrices that appear in the mixers.

use crate::scalar::Scalar;
use num_complex::Complex;

/// Eigendecomposition `A = V diag(values) V^T` of a real symmetric matrix.
/// `vectors` is row-major; column `j` is the eigenvector of `values[j]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub dim: usize,
    pub values: Vec<T>,
    pub vectors: Vec<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations. `a` is row-major `dim x dim` and must be
/// symmetric.
pub fn symmetric_eigen<T: Scalar>(a: &[T], dim: usize) -> SymmetricEigen<T> {
    assert_eq!(a.len(), dim * dim);
    let mut m = a.to_vec();
    let mut v = vec![T::zero(); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = T::one();
    }
    let scale: T = m.iter().map(|x| *x * *x).sum::<T>().sqrt().max(T::min_positive_value());
    let tol = T::epsilon() * scale * T::of(1e-2);
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..dim)
            .flat_map(|p| (0..dim).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[p * dim + q] * m[p * dim + q])
            .sum::<T>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = m[p * dim + q];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = m[p * dim + p];
                let aqq = m[q * dim + q];
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let mkp = m[k * dim + p];
                    let mkq = m[k * dim + q];
                    m[k * dim + p] = c * mkp - s * mkq;
                    m[k * dim + q] = s * mkp + c * mkq;
                }
                for k in 0..dim {
                    let mpk = m[p * dim + k];
                    let mqk = m[q * dim + k];
                    m[p * dim + k] = c * mpk - s * mqk;
                    m[q * dim + k] = s * mpk + c * mqk;
                }
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricEigen {
        dim,
        values: (0..dim).map(|i| m[i * dim + i]).collect(),
        vectors: v,
    }
}

impl<T: Scalar> SymmetricEigen<T> {
    /// `exp(-i t A)` as a row-major complex matrix.
    pub fn propagator(&self, t: T) -> Vec<Complex<T>> {
        let d = self.dim;
        let phases: Vec<Complex<T>> = self
            .values
            .iter()
            .map(|&l| Complex::from_polar(T::one(), -t * l))
            .collect();
        let mut u = vec![Complex::new(T::zero(), T::zero()); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (j, ph) in phases.iter().enumerate() {
                    acc += *ph * (self.vectors[r * d + j] * self.vectors[c * d + j]);
                }
                u[r * d + c] = acc;
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_small_symmetric() {
        let a = [2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let e = symmetric_eigen::<f64>(&a, 3);
        for j in 0..3 {
            for r in 0..3 {
                let av: f64 = (0..3).map(|c| a[r * 3 + c] * e.vectors[c * 3 + j]).sum();
                assert!((av - e.values[j] * e.vectors[r * 3 + j]).abs() < 1e-12);
            }
        }
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }

    #[test]
    fn propagator_is_unitary() {
        let a = [0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let u = symmetric_eigen::<f64>(&a, 3).propagator(0.7);
        for r in 0..3 {
            for c in 0..3 {
                let dot: Complex<f64> = (0..3).map(|k| u[k * 3 + r].conj() * u[k * 3 + c]).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((dot.re - want).abs() < 1e-12 && dot.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = [1.0f32, 0.5, 0.5, 1.0];
        let e = symmetric_eigen::<f32>(&a, 2);
        let mut vals = e.values.clone();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((vals[0] - 0.5).abs() < 1e-6 && (vals[1] - 1.5).abs() < 1e-6);
    }
}
