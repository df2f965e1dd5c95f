/// Off-diagonal Frobenius mass at which the cyclic sweeps stop.
pub const OFF_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (unsorted, in diagonal order) and optionally the eigenvectors
/// (column `j` of the row-major `n x n` matrix belongs to value `j`) of a
/// symmetric matrix, together with the final off-diagonal Frobenius mass.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
    pub off: f64,
    pub sweeps: usize,
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    (2.0 * s).sqrt()
}

/// Cyclic Jacobi rotations over the upper triangle in row-major order.
pub fn symmetric_eigen(matrix: &[f64], n: usize, want_vectors: bool) -> Eigen {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut v = want_vectors.then(|| {
        let mut id = vec![0.0; n * n];
        (0..n).for_each(|i| id[i * n + i] = 1.0);
        id
    });
    let mut off = off_norm(&a, n);
    let mut sweeps = 0;
    let mut row_p = vec![0.0; n];
    let mut row_q = vec![0.0; n];
    while off > OFF_TOL && sweeps < MAX_SWEEPS {
        sweeps += 1;
        // Early sweeps skip entries well below the average off-diagonal size.
        let threshold = if sweeps < 4 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if apq == 0.0 {
                    continue;
                }
                // Entries negligible against both diagonals are dropped outright.
                if sweeps > 4 && apq.abs() * 1e18 < app.abs().min(aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                row_p.copy_from_slice(&a[p * n..(p + 1) * n]);
                row_q.copy_from_slice(&a[q * n..(q + 1) * n]);
                for k in 0..n {
                    let (x, y) = (row_p[k], row_q[k]);
                    let np = c * x - s * y;
                    let nq = s * x + c * y;
                    a[p * n + k] = np;
                    a[q * n + k] = nq;
                    a[k * n + p] = np;
                    a[k * n + q] = nq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let (x, y) = (v[k * n + p], v[k * n + q]);
                        v[k * n + p] = c * x - s * y;
                        v[k * n + q] = s * x + c * y;
                    }
                }
            }
        }
        off = off_norm(&a, n);
    }
    Eigen { values: (0..n).map(|i| a[i * n + i]).collect(), vectors: v, off, sweeps }
}
