//! Continuous Lyapunov equation `A X + X A^T + D = 0` for 4x4 symmetric `X`,
//! solved as a dense linear system in the 10 independent entries.

use nalgebra::{Matrix4, SMatrix, SVector};

use crate::error::{Error, Result};

const DIM: usize = 4;
const UNKNOWNS: usize = DIM * (DIM + 1) / 2;

fn sym_index(i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle
    r * DIM - r * (r + 1) / 2 + c
}

/// Solves `a x + x a^T + d = 0`; `d` must be symmetric.
pub fn solve(a: &Matrix4<f64>, d: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let mut lhs = SMatrix::<f64, UNKNOWNS, UNKNOWNS>::zeros();
    let mut rhs = SVector::<f64, UNKNOWNS>::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let row = sym_index(i, j);
            for k in 0..DIM {
                lhs[(row, sym_index(k, j))] += a[(i, k)];
                lhs[(row, sym_index(i, k))] += a[(j, k)];
            }
            rhs[row] = -d[(i, j)];
        }
    }
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    Ok(Matrix4::from_fn(|i, j| sol[sym_index(i, j)]))
}

pub fn residual(a: &Matrix4<f64>, x: &Matrix4<f64>, d: &Matrix4<f64>) -> f64 {
    (a * x + x * a.transpose() + d).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_map_is_bijective() {
        let mut seen = [false; UNKNOWNS];
        for i in 0..DIM {
            for j in i..DIM {
                let k = sym_index(i, j);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(k, sym_index(j, i));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn scalar_damping() {
        // -k X - k X + D = 0  =>  X = D / 2k
        let a = Matrix4::identity() * -2.0;
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 2.0, 3.0, 4.0));
        let x = solve(&a, &d).unwrap();
        assert!((x - d / 4.0).norm() < 1e-15);
    }

    #[test]
    fn general_stable_system_has_small_residual() {
        let a = Matrix4::new(
            -1.0, 0.7, 0.2, -0.3, //
            0.1, -2.0, 1.5, 0.0, //
            -0.4, 0.3, -1.5, 2.2, //
            0.9, -1.1, 0.0, -3.3,
        );
        let b = Matrix4::new(
            1.0, 0.2, 0.0, 0.1, //
            0.3, 1.0, 0.5, 0.0, //
            0.0, 0.1, 2.0, 0.4, //
            0.2, 0.0, 0.3, 1.5,
        );
        let d = b * b.transpose();
        let x = solve(&a, &d).unwrap();
        assert!(residual(&a, &x, &d) < 1e-12 * d.norm());
        assert!((x - x.transpose()).norm() == 0.0);
    }
}
