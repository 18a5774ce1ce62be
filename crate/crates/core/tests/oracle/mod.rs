//! Reference implementations used only by tests. They favour the most
//! direct formula over speed and share no code paths with the library
//! except `matmul` and the eigensolver.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sim2real_gauge_core::{matmul, sym_eigen_descending, LinearProbe, Matrix};

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-pass population mean and standard deviation of one column.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Standardize, form the covariance with explicit loops, eigendecompose and
/// project. Output columns are sign-fixed so the largest-magnitude loading
/// of each component is positive.
pub fn brute_force_pca(e: &Matrix, k: usize) -> Matrix {
    let (n, d) = e.shape();
    let mut x = vec![0.0; n * d];
    for j in 0..d {
        let (mean, std) = mean_std(&e.column(j));
        for i in 0..n {
            x[i * d + j] = if std < 1e-12 { 0.0 } else { (e.get(i, j) - mean) / std };
        }
    }
    let mut cov = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for i in 0..n {
                s += x[i * d + a] * x[i * d + b];
            }
            cov[a * d + b] = s / n as f64;
        }
    }
    for a in 0..d {
        for b in 0..a {
            let avg = 0.5 * (cov[a * d + b] + cov[b * d + a]);
            cov[a * d + b] = avg;
            cov[b * d + a] = avg;
        }
    }
    let eig = sym_eigen_descending(&Matrix::new(d, d, cov).unwrap()).unwrap();
    let mut comps = vec![0.0; d * k];
    for c in 0..k {
        let col = eig.vectors.column(c);
        let pivot = (0..d).fold(0, |p, r| if col[r].abs() > col[p].abs() { r } else { p });
        let sign = col[pivot].signum();
        for r in 0..d {
            comps[r * k + c] = sign * col[r];
        }
    }
    matmul(&Matrix::new(n, d, x).unwrap(), &Matrix::new(d, k, comps).unwrap()).unwrap()
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            for k in 0..b[row].len() {
                b[row][k] -= f * b[col][k];
            }
        }
    }
    let m = b[0].len();
    let mut x = vec![vec![0.0; m]; n];
    for row in (0..n).rev() {
        for k in 0..m {
            let mut s = b[row][k];
            for c in (row + 1)..n {
                s -= a[row][c] * x[c][k];
            }
            x[row][k] = s / a[row][row];
        }
    }
    x
}

/// Exact least-squares affine fit of `a` on `z` over the `train` rows, via
/// the normal equations with an intercept column.
pub fn least_squares_probe(z: &Matrix, a: &Matrix, train: &[usize]) -> LinearProbe {
    let (dz, da) = (z.cols(), a.cols());
    let p = dz + 1;
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![vec![0.0; da]; p];
    for &i in train {
        let mut row = z.row(i).to_vec();
        row.push(1.0);
        for r in 0..p {
            for c in 0..p {
                xtx[r][c] += row[r] * row[c];
            }
            for k in 0..da {
                xty[r][k] += row[r] * a.get(i, k);
            }
        }
    }
    let beta = solve(xtx, xty);
    let weights = Matrix::new(da, dz, (0..da).flat_map(|k| (0..dz).map(|j| beta[j][k]).collect::<Vec<_>>()).collect()).unwrap();
    LinearProbe::new(weights, beta[dz].clone()).unwrap()
}

/// `1/(n·d_a) Σ ‖a_i − (W z_i + b)‖²` over `rows`, written out longhand.
pub fn mse(p: &LinearProbe, z: &Matrix, a: &Matrix, rows: &[usize]) -> f64 {
    let mut total = 0.0;
    for &i in rows {
        for k in 0..a.cols() {
            let mut pred = p.bias[k];
            for j in 0..z.cols() {
                pred += p.weights.get(k, j) * z.get(i, j);
            }
            total += (a.get(i, k) - pred).powi(2);
        }
    }
    total / (rows.len() * a.cols()) as f64
}

/// Z-scores every column with the statistics of the `train` rows.
pub fn zscore_on(x: &Matrix, train: &[usize]) -> Matrix {
    let (n, d) = x.shape();
    let mut out = vec![0.0; n * d];
    for j in 0..d {
        let col: Vec<f64> = train.iter().map(|&i| x.get(i, j)).collect();
        let (mean, std) = mean_std(&col);
        for i in 0..n {
            out[i * d + j] = if std < 1e-12 { 0.0 } else { (x.get(i, j) - mean) / std };
        }
    }
    Matrix::new(n, d, out).unwrap()
}

/// Central finite-difference gradient of the batch-mean squared error
/// `1/B Σ_i ‖a_i − (W z_i + b)‖²` with step `h`.
pub fn finite_difference_gradient(p: &LinearProbe, z: &Matrix, a: &Matrix, h: f64) -> (Matrix, Vec<f64>) {
    let loss = |q: &LinearProbe| {
        let rows: Vec<usize> = (0..z.rows()).collect();
        mse(q, z, a, &rows) * a.cols() as f64
    };
    let (da, dz) = p.weights.shape();
    let mut gw = vec![0.0; da * dz];
    for k in 0..da {
        for j in 0..dz {
            let bump = |delta: f64| {
                let mut w = p.weights.as_slice().to_vec();
                w[k * dz + j] += delta;
                LinearProbe::new(Matrix::new(da, dz, w).unwrap(), p.bias.clone()).unwrap()
            };
            gw[k * dz + j] = (loss(&bump(h)) - loss(&bump(-h))) / (2.0 * h);
        }
    }
    let mut gb = vec![0.0; da];
    for k in 0..da {
        let bump = |delta: f64| {
            let mut b = p.bias.clone();
            b[k] += delta;
            LinearProbe::new(p.weights.clone(), b).unwrap()
        };
        gb[k] = (loss(&bump(h)) - loss(&bump(-h))) / (2.0 * h);
    }
    (Matrix::new(da, dz, gw).unwrap(), gb)
}
