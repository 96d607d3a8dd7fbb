//! Direct elimination for the tridiagonal systems of the implicit stage.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("singular tridiagonal system at row {row}")]
    Singular { row: usize },
}

/// Thomas elimination for a scalar tridiagonal system.
///
/// `diag` and `rhs` have length `n`; `sub` and `sup` have length `n - 1`
/// (`sub[k]` couples row `k + 1` to `k`, `sup[k]` couples row `k` to `k + 1`).
pub fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    debug_assert_eq!(sub.len(), n - 1);
    debug_assert_eq!(sup.len(), n - 1);
    debug_assert_eq!(rhs.len(), n);

    let mut c = vec![0.0; n - 1];
    let mut d = vec![0.0; n];

    let mut piv = diag[0];
    if !pivot_ok(piv, diag[0], sup.first().copied().unwrap_or(0.0)) {
        return Err(LinalgError::Singular { row: 0 });
    }
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for k in 1..n {
        piv = diag[k] - sub[k - 1] * c[k - 1];
        if !pivot_ok(piv, diag[k], sub[k - 1]) {
            return Err(LinalgError::Singular { row: k });
        }
        if k < n - 1 {
            c[k] = sup[k] / piv;
        }
        d[k] = (rhs[k] - sub[k - 1] * d[k - 1]) / piv;
    }

    let mut x = d;
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(x)
}

fn pivot_ok(piv: f64, diag: f64, off: f64) -> bool {
    let scale = diag.abs().max(off.abs()).max(1e-300);
    piv.is_finite() && piv.abs() > 1e-14 * scale
}

pub type Mat2 = [[f64; 2]; 2];
pub type Vec2 = [f64; 2];

pub fn mat2_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mat2_inv(m: &Mat2) -> Option<Mat2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Block elimination for a tridiagonal system with 2x2 blocks.
///
/// `diag` and `rhs` have length `n`; `sub` and `sup` have length `n - 1`.
pub fn solve_block_tridiagonal(
    sub: &[Mat2],
    diag: &[Mat2],
    sup: &[Mat2],
    rhs: &[Vec2],
) -> Result<Vec<Vec2>, LinalgError> {
    let n = diag.len();
    debug_assert_eq!(sub.len(), n - 1);
    debug_assert_eq!(sup.len(), n - 1);
    debug_assert_eq!(rhs.len(), n);

    // Forward sweep: c[k] = inv(D'_k) * sup[k], d[k] = inv(D'_k) * r'_k
    let mut c = vec![[[0.0; 2]; 2]; n - 1];
    let mut d = vec![[0.0; 2]; n];

    let mut inv = mat2_inv(&diag[0]).ok_or(LinalgError::Singular { row: 0 })?;
    c[0] = mat2_mul(&inv, &sup[0]);
    d[0] = mat2_vec(&inv, &rhs[0]);
    for k in 1..n {
        let a = &sub[k - 1];
        let dp = [
            [
                diag[k][0][0] - (a[0][0] * c[k - 1][0][0] + a[0][1] * c[k - 1][1][0]),
                diag[k][0][1] - (a[0][0] * c[k - 1][0][1] + a[0][1] * c[k - 1][1][1]),
            ],
            [
                diag[k][1][0] - (a[1][0] * c[k - 1][0][0] + a[1][1] * c[k - 1][1][0]),
                diag[k][1][1] - (a[1][0] * c[k - 1][0][1] + a[1][1] * c[k - 1][1][1]),
            ],
        ];
        inv = mat2_inv(&dp).ok_or(LinalgError::Singular { row: k })?;
        if k < n - 1 {
            c[k] = mat2_mul(&inv, &sup[k]);
        }
        let ad = mat2_vec(a, &d[k - 1]);
        d[k] = mat2_vec(&inv, &[rhs[k][0] - ad[0], rhs[k][1] - ad[1]]);
    }

    let mut x = d;
    for k in (0..n - 1).rev() {
        let cx = mat2_vec(&c[k], &x[k + 1]);
        x[k][0] -= cx[0];
        x[k][1] -= cx[1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual_scalar(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], x: &[f64]) -> f64 {
        let n = diag.len();
        let mut worst = 0.0_f64;
        for k in 0..n {
            let mut ax = diag[k] * x[k];
            if k > 0 {
                ax += sub[k - 1] * x[k - 1];
            }
            if k < n - 1 {
                ax += sup[k] * x[k + 1];
            }
            worst = worst.max((ax - rhs[k]).abs());
        }
        worst
    }

    #[test]
    fn scalar_solve_small_system() {
        // [[2,1,0],[1,3,1],[0,1,2]] x = [3,5,3] has solution [1,1,1]
        let x = solve_tridiagonal(&[1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0], &[3.0, 5.0, 3.0])
            .unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_detects_singular() {
        let r = solve_tridiagonal(&[1.0], &[1.0, 1.0], &[1.0], &[1.0, 1.0]);
        assert_eq!(r, Err(LinalgError::Singular { row: 1 }));
    }

    #[test]
    fn block_solve_matches_decoupled_scalars() {
        let n = 17;
        let sub: Vec<f64> = (0..n - 1).map(|k| -0.3 - 0.01 * k as f64).collect();
        let diag: Vec<f64> = (0..n).map(|k| 2.0 + 0.1 * k as f64).collect();
        let sup: Vec<f64> = (0..n - 1).map(|k| -0.4 + 0.02 * k as f64).collect();
        let rhs1: Vec<f64> = (0..n).map(|k| (k as f64).sin()).collect();
        let rhs2: Vec<f64> = (0..n).map(|k| (k as f64 * 0.7).cos()).collect();

        let x1 = solve_tridiagonal(&sub, &diag, &sup, &rhs1).unwrap();
        let x2 = solve_tridiagonal(&sub, &diag, &sup, &rhs2).unwrap();

        let bsub: Vec<Mat2> = sub.iter().map(|&s| [[s, 0.0], [0.0, s]]).collect();
        let bdiag: Vec<Mat2> = diag.iter().map(|&d| [[d, 0.0], [0.0, d]]).collect();
        let bsup: Vec<Mat2> = sup.iter().map(|&s| [[s, 0.0], [0.0, s]]).collect();
        let brhs: Vec<Vec2> = rhs1.iter().zip(&rhs2).map(|(&a, &b)| [a, b]).collect();

        let xb = solve_block_tridiagonal(&bsub, &bdiag, &bsup, &brhs).unwrap();
        for k in 0..n {
            assert!((xb[k][0] - x1[k]).abs() < 1e-13);
            assert!((xb[k][1] - x2[k]).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn scalar_residual_small_for_dominant_systems(
            seed in 0u64..1000,
            n in 4usize..40,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let diag: Vec<f64> = (0..n)
                .map(|_| 2.5 + rng.gen_range(0.0..1.0))
                .collect();
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
            prop_assert!(residual_scalar(&sub, &diag, &sup, &rhs, &x) < 1e-11);
        }

        #[test]
        fn block_residual_small_for_dominant_systems(seed in 0u64..500, n in 4usize..30) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_block = |dom: f64| -> Mat2 {
                [
                    [dom + rng.gen_range(0.0..0.5), rng.gen_range(-0.5..0.5)],
                    [rng.gen_range(-0.5..0.5), dom + rng.gen_range(0.0..0.5)],
                ]
            };
            let sub: Vec<Mat2> = (0..n - 1).map(|_| rand_block(0.0)).collect();
            let sup: Vec<Mat2> = (0..n - 1).map(|_| rand_block(0.0)).collect();
            let diag: Vec<Mat2> = (0..n).map(|_| rand_block(4.0)).collect();
            let rhs: Vec<Vec2> = (0..n)
                .map(|_| [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
                .collect();
            let x = solve_block_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();

            let mut worst = 0.0_f64;
            for k in 0..n {
                let mut ax = mat2_vec(&diag[k], &x[k]);
                if k > 0 {
                    let t = mat2_vec(&sub[k - 1], &x[k - 1]);
                    ax[0] += t[0];
                    ax[1] += t[1];
                }
                if k < n - 1 {
                    let t = mat2_vec(&sup[k], &x[k + 1]);
                    ax[0] += t[0];
                    ax[1] += t[1];
                }
                worst = worst.max((ax[0] - rhs[k][0]).abs()).max((ax[1] - rhs[k][1]).abs());
            }
            prop_assert!(worst < 1e-10);
        }
    }
}
