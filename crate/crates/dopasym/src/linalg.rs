//! Small dense linear algebra in f64: symmetric eigenvalues (Jacobi),
//! determinants, and principal minors.

/// Jacobi eigenvalue iteration for a symmetric matrix (row-major, size n).
/// Returns eigenvalues (ascending) and, optionally, eigenvectors as columns.
pub fn sym_eig(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frob(&m, n)) || sweep == 99 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

fn frob(m: &[f64], n: usize) -> f64 {
    m.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

/// Determinant via LU with partial pivoting.
pub fn det(a: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut m = a.to_vec();
    let mut sign = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            sign = -sign;
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    let mut acc = sign;
    for i in 0..n {
        acc *= m[i * n + i];
    }
    acc
}

/// Extracts the principal minor of `a` (size n) on the index set `idx`.
pub fn principal_minor(a: &[f64], n: usize, idx: &[usize]) -> Vec<f64> {
    let m = idx.len();
    let mut out = vec![0.0; m * m];
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            out[r * m + c] = a[i * n + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_of_diag_plus_rank1() {
        // A = diag(1,2,3)
        let a = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0];
        let ev = sym_eig(&a, 3);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[2] - 3.0).abs() < 1e-12);
        // 2x2 with known eigenvalues 1±ρ
        let b = [1.0, 0.25, 0.25, 1.0];
        let ev = sym_eig(&b, 2);
        assert!((ev[0] - 0.75).abs() < 1e-13 && (ev[1] - 1.25).abs() < 1e-13);
    }

    #[test]
    fn det_matches_eigenproduct() {
        let a = [2.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 1.5];
        let d = det(&a, 3);
        let ev = sym_eig(&a, 3);
        let p: f64 = ev.iter().product();
        assert!((d - p).abs() < 1e-10, "{d} vs {p}");
    }
}
