//! Exact computation of the discrete orthogonal polynomials: recurrence
//! coefficients by the Stieltjes procedure in arbitrary precision, evaluation,
//! zeros via Sturm bisection on the Jacobi matrix, and the duality identities.

use crate::error::{Error, Result};
use crate::lattice::{log_node_products, WeightFamily};
use crate::prec::{hp, tree_sum, HpComplex};
use rug::ops::CompleteRound;
use rug::Float;
use std::io::Write;

/// Recurrence data of an orthonormal system p_{N,k} on a weighted node set.
///
/// Orthonormal three-term relation: x p_k = b_k p_{k+1} + a_k p_k + b_{k-1} p_{k-1};
/// monic form: π_{k+1} = (x − a_k) π_k − b_{k-1}² π_{k-1}, with
/// b_k = γ_k / γ_{k+1} and γ_k the positive leading coefficient of p_k.
pub struct OrthoSystem {
    pub weights: WeightFamily,
    pub kmax: usize,
    /// a_{N,k} for k = 0..=kmax.
    pub a_coeffs: Vec<Float>,
    /// b_{N,k} for k = 0..kmax (all strictly positive).
    pub b_coeffs: Vec<Float>,
    /// γ_{N,k} for k = 0..=kmax.
    pub gamma: Vec<Float>,
    /// Squared norms h_k = <π_k, π_k> for k = 0..=kmax.
    pub h_norms: Vec<Float>,
    pub precision_bits: u32,
}

/// Builds the monic recurrence by iterated weighted inner products.
pub fn stieltjes_recurrence(w: &WeightFamily, kmax: usize) -> Result<OrthoSystem> {
    let n = w.n();
    if kmax > n - 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "kmax = {kmax} exceeds N-1 = {}",
            n - 1
        )));
    }
    let prec = w.node_set.prec;
    let x = &w.node_set.nodes;
    let wts: Vec<Float> = w.log_weights.iter().map(|lw| lw.clone().exp()).collect();

    let dot = |f: &[Float], g: &[Float]| -> Float {
        let terms: Vec<Float> = (0..n)
            .map(|i| (&f[i] * &g[i]).complete(prec) * &wts[i])
            .collect();
        tree_sum(prec, &terms)
    };
    let dot_x = |f: &[Float], g: &[Float]| -> Float {
        let terms: Vec<Float> = (0..n)
            .map(|i| {
                let fg = (&f[i] * &g[i]).complete(prec);
                fg * &x[i] * &wts[i]
            })
            .collect();
        tree_sum(prec, &terms)
    };

    let mut a = Vec::with_capacity(kmax + 1);
    let mut b = Vec::with_capacity(kmax);
    let mut h = Vec::with_capacity(kmax + 1);

    let mut pi_prev: Vec<Float> = vec![hp(prec, 0.0); n];
    let mut pi: Vec<Float> = vec![hp(prec, 1.0); n];
    let mut h_cur = tree_sum(prec, &wts);
    if !(h_cur.clone().to_f64() > 0.0) {
        return Err(Error::PrecisionExhausted { k: 0 });
    }
    h.push(h_cur.clone());

    for k in 0..=kmax {
        let ak = dot_x(&pi, &pi) / h_cur.clone();
        a.push(ak.clone());
        if k == kmax {
            break;
        }
        // π_{k+1} = (x − a_k) π_k − (h_k / h_{k−1}) π_{k−1}
        let beta = if k == 0 {
            hp(prec, 0.0)
        } else {
            (&h[k] / &h[k - 1]).complete(prec)
        };
        let mut pi_next = Vec::with_capacity(n);
        for i in 0..n {
            let t = (&x[i] - &ak).complete(prec) * &pi[i]
                - (&beta * &pi_prev[i]).complete(prec);
            pi_next.push(t);
        }
        let h_next = dot(&pi_next, &pi_next);
        if !(h_next.clone().to_f64() > 0.0) || !h_next.clone().to_f64().is_finite() {
            return Err(Error::PrecisionExhausted { k: k + 1 });
        }
        let bk = (&h_next / &h_cur).complete(prec).sqrt();
        b.push(bk);
        h.push(h_next.clone());
        pi_prev = pi;
        pi = pi_next;
        h_cur = h_next;
    }

    let gamma: Vec<Float> = h.iter().map(|hk| hk.clone().recip().sqrt()).collect();
    Ok(OrthoSystem {
        weights: w.clone(),
        kmax,
        a_coeffs: a,
        b_coeffs: b,
        gamma,
        h_norms: h,
        precision_bits: prec,
    })
}

/// Runs `build`, doubling the precision on `PrecisionExhausted` up to `max_bits`.
pub fn stieltjes_auto(
    mut build: impl FnMut(u32) -> Result<OrthoSystem>,
    start_bits: u32,
    max_bits: u32,
) -> Result<OrthoSystem> {
    let mut bits = start_bits;
    loop {
        match build(bits) {
            Err(Error::PrecisionExhausted { .. }) if bits < max_bits => bits *= 2,
            other => return other,
        }
    }
}

impl OrthoSystem {
    pub fn n(&self) -> usize {
        self.weights.n()
    }

    /// Forward recurrence at a real point; returns (monic π_k(z), orthonormal p_k(z)).
    pub fn evaluate(&self, k: usize, z: &Float) -> (Float, Float) {
        assert!(k <= self.kmax, "degree {k} exceeds kmax {}", self.kmax);
        let prec = self.precision_bits;
        let mut prev = hp(prec, 0.0);
        let mut cur = hp(prec, 1.0);
        for j in 0..k {
            let beta = if j == 0 {
                hp(prec, 0.0)
            } else {
                (&self.h_norms[j] / &self.h_norms[j - 1]).complete(prec)
            };
            let next = (z - &self.a_coeffs[j]).complete(prec) * &cur - beta * &prev;
            prev = cur;
            cur = next;
        }
        let p = (&cur * &self.gamma[k]).complete(prec);
        (cur, p)
    }

    /// Forward recurrence at a complex point.
    pub fn evaluate_complex(&self, k: usize, z: &HpComplex) -> (HpComplex, HpComplex) {
        assert!(k <= self.kmax);
        let prec = self.precision_bits;
        let mut prev = HpComplex::zero(prec);
        let mut cur = HpComplex::one(prec);
        for j in 0..k {
            let beta = if j == 0 {
                hp(prec, 0.0)
            } else {
                (&self.h_norms[j] / &self.h_norms[j - 1]).complete(prec)
            };
            let shifted = HpComplex::new(
                (&z.re - &self.a_coeffs[j]).complete(prec),
                z.im.clone(),
            );
            let next = shifted.mul(&cur).sub(&prev.scale(&beta));
            prev = cur;
            cur = next;
        }
        let p = cur.scale(&self.gamma[k]);
        (cur, p)
    }

    /// Orthonormal values p_j(x_n) for j = 0..=kupto at every node.
    pub fn orthonormal_node_table(&self, kupto: usize) -> Vec<Vec<Float>> {
        assert!(kupto <= self.kmax);
        let prec = self.precision_bits;
        let n = self.n();
        let x = &self.weights.node_set.nodes;
        let mut rows: Vec<Vec<Float>> = Vec::with_capacity(kupto + 1);
        let mut prev: Vec<Float> = vec![hp(prec, 0.0); n];
        let mut cur: Vec<Float> = vec![hp(prec, 1.0); n];
        for j in 0..=kupto {
            rows.push(cur.iter().map(|v| (v * &self.gamma[j]).complete(prec)).collect());
            if j == kupto {
                break;
            }
            let beta = if j == 0 {
                hp(prec, 0.0)
            } else {
                (&self.h_norms[j] / &self.h_norms[j - 1]).complete(prec)
            };
            let mut next = Vec::with_capacity(n);
            for i in 0..n {
                let t = (&x[i] - &self.a_coeffs[j]).complete(prec) * &cur[i]
                    - (&beta * &prev[i]).complete(prec);
                next.push(t);
            }
            prev = cur;
            cur = next;
        }
        rows
    }

    /// Max |<p_j, p_k> − δ_{jk}| over j, k ≤ kupto.
    pub fn orthonormality_residual(&self, kupto: usize) -> f64 {
        let prec = self.precision_bits;
        let n = self.n();
        let wts: Vec<Float> = self.weights.log_weights.iter().map(|lw| lw.clone().exp()).collect();
        let table = self.orthonormal_node_table(kupto);
        let mut worst: f64 = 0.0;
        for j in 0..=kupto {
            for k in j..=kupto {
                let terms: Vec<Float> = (0..n)
                    .map(|i| (&table[j][i] * &table[k][i]).complete(prec) * &wts[i])
                    .collect();
                let mut s = tree_sum(prec, &terms);
                if j == k {
                    s -= 1u32;
                }
                worst = worst.max(s.abs().to_f64());
            }
        }
        worst
    }

    /// Zeros of π_k as eigenvalues of the k×k Jacobi matrix, by Sturm-sequence
    /// bisection at working precision.
    pub fn zeros(&self, k: usize) -> Result<Vec<Float>> {
        if k < 1 || k > self.kmax {
            return Err(Error::DegreeOutOfRange(format!("zeros of degree {k}")));
        }
        let prec = self.precision_bits;
        let diag: Vec<Float> = self.a_coeffs[..k].to_vec();
        let off2: Vec<Float> = self.b_coeffs[..k.saturating_sub(1)]
            .iter()
            .map(|b| b.clone().square())
            .collect();
        // Sturm count: number of eigenvalues strictly below λ
        let count_below = |lam: &Float| -> usize {
            let mut cnt = 0usize;
            let mut d = hp(prec, 1.0);
            let tiny = {
                let mut t = hp(prec, 1.0);
                t >>= (prec as i32 * 2) as u32;
                t
            };
            for i in 0..k {
                let mut dnew = (&diag[i] - lam).complete(prec);
                if i > 0 {
                    dnew -= (&off2[i - 1] / &d).complete(prec);
                }
                if dnew == 0 {
                    dnew = tiny.clone();
                }
                if dnew < 0 {
                    cnt += 1;
                }
                d = dnew;
            }
            cnt
        };
        // Gershgorin-style global bracket
        let mut lo = self.weights.node_set.a - 1.0;
        let mut hi = self.weights.node_set.b + 1.0;
        for i in 0..k {
            let c = diag[i].to_f64();
            let mut r = 0.0;
            if i > 0 {
                r += self.b_coeffs[i - 1].to_f64().abs();
            }
            if i + 1 < k {
                r += self.b_coeffs[i].to_f64().abs();
            }
            lo = lo.min(c - r - 1.0);
            hi = hi.max(c + r + 1.0);
        }
        let span = hp(prec, hi) - hp(prec, lo);
        let tol = {
            let mut t = span.clone();
            t >>= prec - 16;
            t
        };
        let mut out = Vec::with_capacity(k);
        // Bisect for the j-th smallest eigenvalue: smallest λ with count_below(λ) >= j+1
        for j in 0..k {
            let mut l = hp(prec, lo);
            let mut r = hp(prec, hi);
            while (&r - &l).complete(prec) > tol {
                let mid = ((&l + &r).complete(prec)) >> 1;
                if count_below(&mid) >= j + 1 {
                    r = mid;
                } else {
                    l = mid;
                }
            }
            out.push(((&l + &r).complete(prec)) >> 1);
        }
        for w in out.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::ConvergenceFailure);
            }
        }
        Ok(out)
    }

    /// Checks the Prop-style zero confinement: all zeros in (x_0, x_{N−1}) and
    /// at most one zero in each closed inter-node interval.
    pub fn zeros_confined(&self, zeros: &[Float]) -> bool {
        let nodes = &self.weights.node_set.nodes;
        let n = self.n();
        if zeros.is_empty() {
            return true;
        }
        if zeros[0] <= nodes[0] || zeros[zeros.len() - 1] >= nodes[n - 1] {
            return false;
        }
        for i in 0..n - 1 {
            let cnt = zeros
                .iter()
                .filter(|z| **z >= nodes[i] && **z <= nodes[i + 1])
                .count();
            if cnt > 1 {
                return false;
            }
        }
        true
    }

    /// Writes k, a_k, b_k, gamma_k rows at 30 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# dopasym orthosystem n={} kmax={} prec={}", self.n(), self.kmax, self.precision_bits)?;
        writeln!(out, "k,a_k,b_k,gamma_k")?;
        for k in 0..=self.kmax {
            let bk = if k < self.b_coeffs.len() {
                format!("{:.30e}", self.b_coeffs[k])
            } else {
                String::new()
            };
            writeln!(
                out,
                "{},{:.30e},{},{:.30e}",
                k, self.a_coeffs[k], bk, self.gamma[k]
            )?;
        }
        Ok(())
    }
}

/// Residual report of the duality identities between a system and its dual.
#[derive(Debug, Clone)]
pub struct DualityReport {
    /// max over nodes of the relative residual of the node identity
    /// π̄_{N,k̄}(x_l) = γ_{N,k−1}² w_l Π_{n≠l}(x_l − x_n) · π_{N,k−1}(x_l).
    pub node_identity_rel: f64,
    /// |γ̄_{N,k̄−1} · γ_{N,k} − 1|.
    pub gamma_identity: f64,
}

/// Verifies the duality identities at degree k (and k̄ = N − k).
pub fn check_duality(sys: &OrthoSystem, dual_sys: &OrthoSystem, k: usize) -> Result<DualityReport> {
    let n = sys.n();
    if k < 1 || k > n - 1 {
        return Err(Error::DegreeOutOfRange(format!("k = {k} not in 1..=N-1")));
    }
    let kbar = n - k;
    if k - 1 > sys.kmax || kbar > dual_sys.kmax {
        return Err(Error::DegreeOutOfRange(format!(
            "need k-1 <= kmax ({}) and N-k <= dual kmax ({})",
            sys.kmax, dual_sys.kmax
        )));
    }
    let prec = sys.precision_bits;
    let log_prod = log_node_products(&sys.weights.node_set);
    let gamma_sq = sys.gamma[k - 1].clone().square();
    let mut worst: f64 = 0.0;
    for l in 0..n {
        let (pi_dual, _) = dual_sys.evaluate(kbar, &sys.weights.node_set.nodes[l]);
        let (pi_km1, _) = sys.evaluate(k - 1, &sys.weights.node_set.nodes[l]);
        // signed product Π_{n≠l} (x_l − x_n) = (−1)^{N−1−l} e^{Σ log |x_l − x_n|}
        let sign = if (n - 1 - l) % 2 == 0 { 1.0 } else { -1.0 };
        let prod = log_prod[l].clone().exp() * hp(prec, sign);
        let w_l = sys.weights.log_weights[l].clone().exp();
        let rhs = (&gamma_sq * &w_l).complete(prec) * prod * pi_km1;
        let denom_f = pi_dual.clone().abs().to_f64().max(rhs.clone().abs().to_f64());
        let resid = (pi_dual - rhs).abs().to_f64();
        let rel = if denom_f > 0.0 { resid / denom_f } else { resid };
        worst = worst.max(rel);
    }
    let gamma_identity = ((&dual_sys.gamma[kbar - 1] * &sys.gamma[k]).complete(prec) - 1u32)
        .abs()
        .to_f64();
    Ok(DualityReport {
        node_identity_rel: worst,
        gamma_identity,
    })
}
