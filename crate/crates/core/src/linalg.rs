//! Small dense linear algebra for the low-dimensional kernels in this crate.
//!
//! Operand sizes are tiny (ambient dimension + 1 at most), so everything is
//! written directly over `Vec<f64>` rows with fixed iteration order; results
//! are bit-reproducible across runs and thread counts.

pub type Mat = Vec<Vec<f64>>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

pub fn axpy(acc: &mut [f64], s: f64, v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += s * x;
    }
}

pub fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    if n == 0.0 {
        v.to_vec()
    } else {
        scale(v, 1.0 / n)
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn zeros_mat(rows: usize, cols: usize) -> Mat {
    vec![vec![0.0; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros_mat(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn mat_vec(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose(m: &Mat) -> Mat {
    if m.is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut t = zeros_mat(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            t[j][i] = m[i][j];
        }
    }
    t
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter()
        .flat_map(|row| row.iter().map(|x| x * x))
        .sum::<f64>()
        .sqrt()
}

/// Frobenius inner product ⟨a,b⟩_F = Σᵢⱼ aᵢⱼ bᵢⱼ.
pub fn frobenius_inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b).map(|(ra, rb)| dot(ra, rb)).sum()
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det(m: &Mat) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut a: Mat = m.to_vec();
    let mut sign = 1.0;
    let mut result = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            sign = -sign;
        }
        result *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    sign * result
}

/// Solve the square system `m x = b` by LU with partial pivoting.
pub fn solve(m: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(pivot, col);
        x.swap(pivot, col);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= a[col][col];
        for row in 0..col {
            let f = a[row][col];
            x[row] -= f * x[col];
            a[row][col] = 0.0;
        }
    }
    Some(x)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.
///
/// Returns (eigenvalues, eigenvectors) with eigenvectors as rows, sorted by
/// descending eigenvalue. Deterministic: fixed sweep order, fixed iteration cap.
pub fn sym_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.len();
    let mut a = m.to_vec();
    let mut v = identity(n);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frobenius(&a)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = if (a[p][p] - a[q][q]).abs() < 1e-300 {
                    std::f64::consts::FRAC_PI_4 * a[p][q].signum()
                } else {
                    0.5 * (2.0 * a[p][q] / (a[p][p] - a[q][q])).atan()
                };
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp + s * akq;
                    a[k][q] = -s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk + s * aqk;
                    a[q][k] = -s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp + s * vkq;
                    v[k][q] = -s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Mat = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Singular values of a rectangular matrix (rows × cols), descending.
///
/// Computed as square roots of the eigenvalues of the smaller Gram matrix.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.is_empty() || m[0].is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    let gram = if cols <= rows {
        // AᵀA, cols × cols
        let mut g = zeros_mat(cols, cols);
        for i in 0..cols {
            for j in 0..cols {
                g[i][j] = (0..rows).map(|r| m[r][i] * m[r][j]).sum();
            }
        }
        g
    } else {
        let mut g = zeros_mat(rows, rows);
        for i in 0..rows {
            for j in 0..rows {
                g[i][j] = dot(&m[i], &m[j]);
            }
        }
        g
    };
    let (vals, _) = sym_eigen(&gram);
    vals.iter().map(|&l| l.max(0.0).sqrt()).collect()
}

/// Scatter matrix Σ (p−mean)(p−mean)ᵀ of a point set, with the mean.
fn scatter(points: &[Vec<f64>]) -> (Vec<f64>, Mat) {
    let n = points.len();
    let dim = points[0].len();
    let mut mean = vec![0.0; dim];
    for p in points {
        axpy(&mut mean, 1.0, p);
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut s = zeros_mat(dim, dim);
    for p in points {
        let c = sub(p, &mean);
        for i in 0..dim {
            for j in 0..dim {
                s[i][j] += c[i] * c[j];
            }
        }
    }
    (mean, s)
}

/// Maximum pairwise distance of a point set.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(dist(&points[i], &points[j]));
        }
    }
    d
}

/// Collinearity residual: max distance of the points to their best-fit line
/// (principal axis through the centroid), normalized by the set diameter.
///
/// Returns 0 for fewer than 3 points or a degenerate (single-point) set.
pub fn collinearity_residual(points: &[Vec<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let (mean, s) = scatter(points);
    let (_, vecs) = sym_eigen(&s);
    let axis = &vecs[0];
    let diam = diameter(points);
    if diam < 1e-300 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for p in points {
        // explicit perpendicular component; the Pythagorean form
        // |c|² − ⟨c,axis⟩² cancels catastrophically near collinearity
        let mut perp = sub(p, &mean);
        let along = dot(&perp, axis);
        axpy(&mut perp, -along, axis);
        worst = worst.max(norm(&perp));
    }
    worst / diam
}

/// Hyperplane-fit residual: max distance of the points to their best-fit
/// hyperplane (normal = smallest principal axis), normalized by the diameter.
pub fn hyperplane_residual(points: &[Vec<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let (mean, s) = scatter(points);
    let (_, vecs) = sym_eigen(&s);
    let normal = &vecs[vecs.len() - 1];
    let diam = diameter(points);
    if diam < 1e-300 {
        return 0.0;
    }
    points
        .iter()
        .map(|p| dot(&sub(p, &mean), normal).abs())
        .fold(0.0_f64, f64::max)
        / diam
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_matrices() {
        assert!((det(&vec![vec![2.0]]) - 2.0).abs() < 1e-15);
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!((det(&m) + 2.0).abs() < 1e-12);
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(det(&singular).abs() < 1e-12);
    }

    #[test]
    fn solve_roundtrip() {
        let m = vec![
            vec![3.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ];
        let x = vec![1.0, -2.0, 0.5];
        let b = mat_vec(&m, &x);
        let got = solve(&m, &b).unwrap();
        for (a, e) in got.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_diagonal() {
        let m = vec![vec![3.0, 0.0], vec![0.0, 1.0]];
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!(vecs[0][0].abs() > 0.99);
    }

    #[test]
    fn eigen_rotation_invariant() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (vals, vecs) = sym_eigen(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // eigenvector for 3 is (1,1)/√2
        assert!((vecs[0][0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn singular_values_identity_block() {
        // 3×2 matrix with identity block: singular values 1, 1
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]];
        let s = singular_values(&m);
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points_have_zero_residual() {
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![i as f64 * 0.1, i as f64 * 0.2, -(i as f64) * 0.05])
            .collect();
        assert!(collinearity_residual(&pts) < 1e-14);
    }

    #[test]
    fn bent_points_have_positive_residual() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![2.0, 1.0],
            vec![3.0, 0.0],
            vec![4.0, 0.0],
        ];
        assert!(collinearity_residual(&pts) > 0.05);
    }

    #[test]
    fn planar_points_have_zero_hyperplane_residual() {
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push(vec![i as f64, j as f64, 2.0 * i as f64 - j as f64]);
            }
        }
        assert!(hyperplane_residual(&pts) < 1e-12);
    }
}
