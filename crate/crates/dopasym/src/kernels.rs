//! The Christoffel-Darboux reproducing kernel and the determinantal ensemble
//! statistics built from it: correlations, occupation probabilities, the
//! particle-hole kernel, sine/Airy universality comparisons, the Tracy-Widom
//! distribution via Fredholm determinants, and exact sampling.

use crate::equilibrium::EquilibriumMeasure;
use crate::error::{Error, Result};
use crate::linalg::{det, principal_minor, sym_eig};
use crate::orthopoly::OrthoSystem;
use crate::quad::gauss_legendre;
use crate::special::airy;
use rand::Rng;
use rug::ops::CompleteRound;
use rug::Float;

/// Dense N×N reproducing kernel K_{N,k}(x_i, x_j), assembled in high
/// precision and stored in double precision.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<f64>,
    pub nodes: Vec<f64>,
}

impl KernelMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// max |(K² − K)_{ij}|.
    pub fn projection_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += self.get(i, l) * self.get(l, j);
                }
                worst = worst.max((acc - self.get(i, j)).abs());
            }
        }
        worst
    }

    pub fn diag_in_unit_interval(&self, slack: f64) -> bool {
        (0..self.n).all(|i| {
            let d = self.get(i, i);
            d >= -slack && d <= 1.0 + slack
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# dopasym kernel n={} k={}", self.n, self.k)?;
        writeln!(out, "i,j,x_i,x_j,k_ij")?;
        for i in 0..self.n {
            for j in 0..self.n {
                writeln!(
                    out,
                    "{},{},{:.17e},{:.17e},{:.17e}",
                    i, j, self.nodes[i], self.nodes[j], self.get(i, j)
                )?;
            }
        }
        Ok(())
    }
}

/// Builds the rank-k projection kernel by the Christoffel-Darboux formula
/// (two-term off the diagonal, confluent form on it).
pub fn cd_kernel(sys: &OrthoSystem, k: usize) -> Result<KernelMatrix> {
    if k > sys.kmax || k == 0 {
        return Err(Error::DegreeOutOfRange(format!("kernel degree {k}")));
    }
    let n = sys.n();
    let prec = sys.precision_bits;
    let x = &sys.weights.node_set.nodes;
    let table = sys.orthonormal_node_table(k);
    let (pk, pkm1) = (&table[k], &table[k - 1]);
    // derivative recurrence for the monic family, then scale by γ
    let mut dm_prev: Vec<Float> = vec![Float::with_val(prec, 0); n];
    let mut dm: Vec<Float> = vec![Float::with_val(prec, 0); n];
    let mut m_prev: Vec<Float> = vec![Float::with_val(prec, 0); n];
    let mut m_cur: Vec<Float> = vec![Float::with_val(prec, 1); n];
    for j in 0..k {
        let beta = if j == 0 {
            Float::with_val(prec, 0)
        } else {
            (&sys.h_norms[j] / &sys.h_norms[j - 1]).complete(prec)
        };
        let mut m_next = Vec::with_capacity(n);
        let mut dm_next = Vec::with_capacity(n);
        for i in 0..n {
            let shift = (&x[i] - &sys.a_coeffs[j]).complete(prec);
            let mn = shift.clone() * &m_cur[i] - (&beta * &m_prev[i]).complete(prec);
            let dn = m_cur[i].clone() + shift * &dm[i] - (&beta * &dm_prev[i]).complete(prec);
            m_next.push(mn);
            dm_next.push(dn);
        }
        m_prev = m_cur;
        m_cur = m_next;
        dm_prev = dm;
        dm = dm_next;
    }
    let dpk: Vec<Float> = dm.iter().map(|d| (d * &sys.gamma[k]).complete(prec)).collect();
    let dpkm1: Vec<Float> = dm_prev
        .iter()
        .map(|d| (d * &sys.gamma[k - 1]).complete(prec))
        .collect();
    let sqrt_w: Vec<Float> = sys
        .weights
        .log_weights
        .iter()
        .map(|lw| (lw / 2u32).complete(prec).exp())
        .collect();
    let b_km1 = &sys.b_coeffs[k - 1];
    let mut entries = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i..n {
            let val = if i == j {
                let cd = (&dpk[i] * &pkm1[i]).complete(prec) - (&dpkm1[i] * &pk[i]).complete(prec);
                let w = (&sqrt_w[i] * &sqrt_w[i]).complete(prec);
                (w * cd * b_km1).to_f64()
            } else {
                let num = (&pk[i] * &pkm1[j]).complete(prec) - (&pkm1[i] * &pk[j]).complete(prec);
                let dx = (&x[i] - &x[j]).complete(prec);
                let w = (&sqrt_w[i] * &sqrt_w[j]).complete(prec);
                (w * num * b_km1 / dx).to_f64()
            };
            entries[i * n + j] = val;
            entries[j * n + i] = val;
        }
    }
    Ok(KernelMatrix {
        n,
        k,
        entries,
        nodes: sys.weights.node_set.nodes_f64.clone(),
    })
}

/// m-point correlation: det of the principal minor on the index set.
/// Repeated indices give duplicate rows, hence zero (exclusion).
pub fn correlation(kern: &KernelMatrix, idx: &[usize]) -> f64 {
    let minor = principal_minor(&kern.entries, kern.n, idx);
    det(&minor, idx.len())
}

/// P(exactly m particles in B) from the eigenvalues λ_j of K|_B:
/// coefficient of t^m in Π_j ((1−λ_j) + λ_j t).
pub fn occupation_prob(kern: &KernelMatrix, b: &[usize], m: usize) -> f64 {
    if m > b.len() {
        return 0.0;
    }
    let minor = principal_minor(&kern.entries, kern.n, b);
    let eig = sym_eig(&minor, b.len());
    let mut coeffs = vec![0.0f64; b.len() + 1];
    coeffs[0] = 1.0;
    for &lam in &eig {
        let l = lam.clamp(0.0, 1.0);
        for i in (1..coeffs.len()).rev() {
            coeffs[i] = coeffs[i] * (1.0 - l) + coeffs[i - 1] * l;
        }
        coeffs[0] *= 1.0 - l;
    }
    coeffs[m]
}

/// Hole kernel: K̄(x_m, x_n) = (−1)^{m+n+1} K(x_m, x_n) off the diagonal and
/// 1 − K(x, x) on it.
pub fn hole_kernel(kern: &KernelMatrix) -> KernelMatrix {
    let n = kern.n;
    let mut entries = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = if i == j {
                1.0 - kern.get(i, i)
            } else {
                let sign = if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
                sign * kern.get(i, j)
            };
        }
    }
    KernelMatrix {
        n,
        k: n - kern.k,
        entries,
        nodes: kern.nodes.clone(),
    }
}

/// Deviation of the kernel near x from the discrete sine kernel
/// sin(πq(i−j))/(π(i−j)) with q = c ψ(x)/ρ⁰(x); returns (max deviation, q).
pub fn sine_compare(
    kern: &KernelMatrix,
    m: &EquilibriumMeasure,
    x: f64,
    window: usize,
) -> (f64, f64) {
    let q = m.c * m.density_at(x) / (m.rho0)(x);
    let i0 = kern
        .nodes
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let lo = i0.saturating_sub(window);
    let hi = (i0 + window).min(kern.n - 1);
    let mut worst = 0.0f64;
    for i in lo..=hi {
        for j in lo..=hi {
            let model = if i == j {
                q
            } else {
                let d = i as f64 - j as f64;
                (std::f64::consts::PI * q * d).sin() / (std::f64::consts::PI * d)
            };
            worst = worst.max((kern.get(i, j) - model).abs());
        }
    }
    (worst, q)
}

/// Airy kernel A(ξ, η) with the confluent diagonal Ai'(ξ)² − ξ Ai(ξ)².
pub fn airy_kernel(xi: f64, eta: f64) -> f64 {
    if (xi - eta).abs() < 1e-9 {
        let mid = 0.5 * (xi + eta);
        let v = airy(mid);
        v.aip * v.aip - mid * v.ai * v.ai
    } else {
        let a = airy(xi);
        let b = airy(eta);
        (a.ai * b.aip - a.aip * b.ai) / (xi - eta)
    }
}

/// Deviation of the edge-scaled kernel from the Airy kernel near a band edge
/// adjacent to a void. `beta_coeff` is the square-root density coefficient B,
/// `left_edge` selects the ξ sign convention, and nodes with |ξ| ≤ `window`
/// enter the comparison. Returns (max deviation, count of nodes compared).
pub fn airy_compare(
    kern: &KernelMatrix,
    m: &EquilibriumMeasure,
    edge: f64,
    left_edge: bool,
    beta_coeff: f64,
    window: f64,
) -> Result<(f64, usize)> {
    if beta_coeff <= 0.0 {
        return Err(Error::EdgeTypeMismatch(format!(
            "nonpositive edge coefficient {beta_coeff}"
        )));
    }
    let nf = kern.n as f64;
    let scale_x = (nf * std::f64::consts::PI * m.c * beta_coeff).powf(2.0 / 3.0);
    let sign = if left_edge { -1.0 } else { 1.0 };
    let xi = |x: f64| sign * scale_x * (x - edge);
    let rho_edge = (m.rho0)(edge);
    let kscale = nf.powf(1.0 / 3.0) * rho_edge
        / (std::f64::consts::PI * m.c * beta_coeff).powf(2.0 / 3.0);
    let idx: Vec<usize> = (0..kern.n)
        .filter(|&i| xi(kern.nodes[i]).abs() <= window)
        .collect();
    let mut worst = 0.0f64;
    for &i in &idx {
        for &j in &idx {
            let model = airy_kernel(xi(kern.nodes[i]), xi(kern.nodes[j]));
            worst = worst.max((kscale * kern.get(i, j) - model).abs());
        }
    }
    Ok((worst, idx.len()))
}

/// Tracy-Widom CDF F(s) = det(1 − A|_{[s,∞)}) by Nyström quadrature with the
/// rational map t ↦ s + 10(1+t)/(1−t) on Gauss-Legendre nodes.
pub fn tracy_widom_cdf(s: f64, quad_points: usize) -> f64 {
    assert!(quad_points >= 20, "need at least 20 quadrature points");
    let (t, w) = gauss_legendre(quad_points);
    let n = quad_points;
    let mut x = vec![0.0f64; n];
    let mut sw = vec![0.0f64; n];
    for i in 0..n {
        x[i] = s + 10.0 * (1.0 + t[i]) / (1.0 - t[i]);
        let jac = 20.0 / ((1.0 - t[i]) * (1.0 - t[i]));
        sw[i] = (w[i] * jac).sqrt();
    }
    let mut mat = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let a = airy_kernel(x[i], x[j]);
            mat[i * n + j] = (if i == j { 1.0 } else { 0.0 }) - sw[i] * a * sw[j];
        }
    }
    det(&mat, n).clamp(0.0, 1.0)
}

/// Exact sampler for rank-k projection kernels: draw a node from the diagonal,
/// condition by the Schur complement, repeat k times. Deterministic given the
/// caller's generator.
pub fn sample_dpp<R: Rng>(kern: &KernelMatrix, rng: &mut R) -> Result<Vec<usize>> {
    let n = kern.n;
    let k = kern.k;
    // a projection restricted to itself: eigenvalues near {0,1}, k of them 1
    let eig = sym_eig(&kern.entries, n);
    let rank = eig.iter().filter(|&&l| l > 0.5).count();
    if rank != k {
        return Err(Error::RankDeficiency { rank, expected: k });
    }
    let mut kk = kern.entries.clone();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for step in 0..k {
        let mut diag: Vec<f64> = (0..n).map(|i| kk[i * n + i].max(0.0)).collect();
        for c in &chosen {
            diag[*c] = 0.0;
        }
        let total: f64 = diag.iter().sum();
        let u = rng.gen_range(0.0..1.0) * total.max(1e-300);
        let mut acc = 0.0;
        let mut pick = n - 1;
        for (i, d) in diag.iter().enumerate() {
            acc += d;
            if acc >= u && !chosen.contains(&i) {
                pick = i;
                break;
            }
        }
        chosen.push(pick);
        let piv = kk[pick * n + pick];
        if piv.abs() < 1e-12 {
            return Err(Error::RankDeficiency { rank: step, expected: k });
        }
        let col: Vec<f64> = (0..n).map(|i| kk[i * n + pick]).collect();
        for i in 0..n {
            for j in 0..n {
                kk[i * n + j] -= col[i] * col[j] / piv;
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_weights, FamilySpec, NodeSet};
    use crate::orthopoly::stieltjes_recurrence;
    use crate::prec::DEFAULT_PREC;
    use rand::SeedableRng;

    fn hahn_kernel(n: usize, pp: f64, qq: f64, k: usize) -> (OrthoSystem, KernelMatrix) {
        let ns = NodeSet::uniform(n, DEFAULT_PREC);
        let w = make_weights(FamilySpec::Hahn { n_param: pp, q_param: qq }, &ns).unwrap();
        let sys = stieltjes_recurrence(&w, k).unwrap();
        let kern = cd_kernel(&sys, k).unwrap();
        (sys, kern)
    }

    #[test]
    fn kernel_invariants() {
        let (_, kern) = hahn_kernel(30, 1.0, 1.0, 12);
        assert!((kern.trace() - 12.0).abs() < 1e-10, "trace {}", kern.trace());
        assert!(kern.projection_residual() < 1e-8);
        assert!(kern.diag_in_unit_interval(1e-10));
    }

    #[test]
    fn cd_matches_direct_sum() {
        // the telescoped form equals Σ_{j<k} p_j(x)p_j(y)√(w(x)w(y))
        let n = 14usize;
        let k = 6usize;
        let ns = NodeSet::uniform(n, DEFAULT_PREC);
        let w = make_weights(FamilySpec::Krawtchouk { p: 0.3, q: 0.7 }, &ns).unwrap();
        let sys = stieltjes_recurrence(&w, k).unwrap();
        let kern = cd_kernel(&sys, k).unwrap();
        let table = sys.orthonormal_node_table(k);
        let wts = w.weights_f64();
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for row in table.iter().take(k) {
                    acc += row[i].to_f64() * row[j].to_f64();
                }
                acc *= (wts[i] * wts[j]).sqrt();
                assert!(
                    (acc - kern.get(i, j)).abs() < 1e-10,
                    "({i},{j}): {acc} vs {}",
                    kern.get(i, j)
                );
            }
        }
    }

    #[test]
    fn correlation_singleton_and_exclusion() {
        let (_, kern) = hahn_kernel(12, 2.0, 3.0, 5);
        assert!((correlation(&kern, &[3]) - kern.get(3, 3)).abs() < 1e-15);
        assert!(correlation(&kern, &[3, 3]).abs() < 1e-15);
        for set in [&[0usize, 4][..], &[1, 5, 9][..], &[2, 3, 7, 11][..]] {
            assert!(correlation(&kern, set) >= -1e-12);
        }
    }

    #[test]
    fn occupation_probabilities_sum_to_one() {
        let (_, kern) = hahn_kernel(10, 1.0, 2.0, 4);
        let b: Vec<usize> = (0..6).collect();
        let total: f64 = (0..=6).map(|m| occupation_prob(&kern, &b, m)).sum();
        assert!((total - 1.0).abs() < 1e-10, "total {total}");
        let all: Vec<usize> = (0..10).collect();
        assert!((occupation_prob(&kern, &all, 4) - 1.0).abs() < 1e-8);
        assert!(occupation_prob(&kern, &all, 3).abs() < 1e-8);
    }

    #[test]
    fn brute_force_dpp_ground_truth() {
        // exhaustive enumeration of the ensemble at N=8, k=3
        let n = 8usize;
        let k = 3usize;
        let (sys, kern) = hahn_kernel(n, 2.0, 5.0, k);
        let wts = sys.weights.weights_f64();
        let xs = &sys.weights.node_set.nodes_f64;
        let mut configs = Vec::new();
        let mut probs = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let idx = [a, b, c];
                    let mut p = 1.0;
                    for i in 0..3 {
                        p *= wts[idx[i]];
                        for j in (i + 1)..3 {
                            let d = xs[idx[i]] - xs[idx[j]];
                            p *= d * d;
                        }
                    }
                    configs.push(idx);
                    probs.push(p);
                }
            }
        }
        let z: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= z;
        }
        for i in 0..n {
            let mut r1 = 0.0;
            for (cfg, p) in configs.iter().zip(probs.iter()) {
                if cfg.contains(&i) {
                    r1 += p;
                }
            }
            assert!(
                (r1 - kern.get(i, i)).abs() < 1e-10,
                "node {i}: {r1} vs {}",
                kern.get(i, i)
            );
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut r2 = 0.0;
                for (cfg, p) in configs.iter().zip(probs.iter()) {
                    if cfg.contains(&i) && cfg.contains(&j) {
                        r2 += p;
                    }
                }
                let minor = correlation(&kern, &[i, j]);
                assert!((r2 - minor).abs() < 1e-10, "({i},{j}): {r2} vs {minor}");
            }
        }
        let b: Vec<usize> = (0..4).collect();
        for m in 0..=3usize {
            let mut direct = 0.0;
            for (cfg, p) in configs.iter().zip(probs.iter()) {
                let cnt = cfg.iter().filter(|i| b.contains(i)).count();
                if cnt == m {
                    direct += p;
                }
            }
            let viaeig = occupation_prob(&kern, &b, m);
            assert!((direct - viaeig).abs() < 1e-10, "m={m}: {direct} vs {viaeig}");
        }
    }

    #[test]
    fn hole_kernel_identities() {
        let n = 20usize;
        let k = 8usize;
        let (sys, kern) = hahn_kernel(n, 1.0, 1.0, k);
        let hk = hole_kernel(&kern);
        assert!((hk.trace() - (n - k) as f64).abs() < 1e-9);
        // dual-system kernel agrees entrywise
        let wd = crate::lattice::dual_weights(&sys.weights);
        let sysd = stieltjes_recurrence(&wd, n - k).unwrap();
        let kernd = cd_kernel(&sysd, n - k).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (hk.get(i, j) - kernd.get(i, j)).abs() < 1e-8,
                    "({i},{j}): {} vs {}",
                    hk.get(i, j),
                    kernd.get(i, j)
                );
            }
        }
        // det(K|_B) = det(I − K̄|_B)
        for set in [&[0usize, 3, 5][..], &[2, 7, 9, 15][..], &[1, 4][..]] {
            let lhs = correlation(&kern, set);
            let m = set.len();
            let mut id_minus = principal_minor(&hk.entries, n, set);
            for r in 0..m {
                for c in 0..m {
                    let v = id_minus[r * m + c];
                    id_minus[r * m + c] = if r == c { 1.0 - v } else { -v };
                }
            }
            let rhs = det(&id_minus, m);
            assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn inclusion_exclusion_small() {
        let n = 10usize;
        let k = 4usize;
        let (_, kern) = hahn_kernel(n, 2.0, 3.0, k);
        let hk = hole_kernel(&kern);
        let (i, j) = (1usize, 6usize);
        let lhs = correlation(&kern, &[i, j]);
        let rhs = 1.0 - hk.get(i, i) - hk.get(j, j) + correlation(&hk, &[i, j]);
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn sine_comparison_diagonal_and_range() {
        let n = 60usize;
        let nf = n as f64;
        let k = 30usize;
        let ns = NodeSet::uniform(n, DEFAULT_PREC);
        let w = make_weights(
            FamilySpec::Hahn { n_param: nf * 3.0 + 1.0, q_param: nf * 7.0 + 1.0 },
            &ns,
        )
        .unwrap();
        let sys = stieltjes_recurrence(&w, k).unwrap();
        let kern = cd_kernel(&sys, k).unwrap();
        let m = crate::equilibrium::hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let (alpha, beta) = m.bands[0];
        let x = 0.5 * (alpha + beta);
        let (dev, q) = sine_compare(&kern, &m, x, 4);
        assert!(q > 0.0 && q < 1.0, "q = {q}");
        assert!(dev < 0.05, "sine deviation {dev}");
        let i0 = (0..n)
            .min_by(|&a, &b| {
                (kern.nodes[a] - x)
                    .abs()
                    .partial_cmp(&(kern.nodes[b] - x).abs())
                    .unwrap()
            })
            .unwrap();
        assert!((kern.get(i0, i0) - q).abs() < 0.05);
    }

    #[test]
    fn airy_kernel_diagonal_at_zero() {
        // A(0,0) = Ai'(0)²
        let v = airy(0.0);
        assert!((airy_kernel(0.0, 0.0) - v.aip * v.aip).abs() < 1e-12);
    }

    #[test]
    fn tracy_widom_limits_and_convergence() {
        let hi = tracy_widom_cdf(6.0, 60);
        assert!(hi > 1.0 - 1e-6, "F(6) = {hi}");
        let lo = tracy_widom_cdf(-8.0, 60);
        assert!(lo < 1e-3, "F(-8) = {lo}");
        let mut prev = 0.0;
        for i in 0..10 {
            let s = -5.0 + i as f64;
            let v = tracy_widom_cdf(s, 48);
            assert!(v + 1e-9 >= prev, "not monotone at {s}");
            prev = v;
        }
        let v40 = tracy_widom_cdf(0.0, 40);
        let v80 = tracy_widom_cdf(0.0, 80);
        assert!((v40 - v80).abs() < 1e-8, "{v40} vs {v80}");
    }

    #[test]
    fn sampler_exactness_small() {
        let n = 6usize;
        let k = 2usize;
        let (_, kern) = hahn_kernel(n, 1.0, 1.0, k);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let trials = 40_000usize;
        let mut pair_counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let cfg = sample_dpp(&kern, &mut rng).unwrap();
            assert_eq!(cfg.len(), k);
            assert!(cfg[0] != cfg[1], "exclusion violated");
            *pair_counts.entry((cfg[0], cfg[1])).or_insert(0usize) += 1;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let expect = correlation(&kern, &[i, j]);
                let got = *pair_counts.get(&(i, j)).unwrap_or(&0) as f64 / trials as f64;
                let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
                assert!(
                    (got - expect).abs() < 5.0 * sigma + 1e-4,
                    "pair ({i},{j}): {got} vs {expect} (σ={sigma})"
                );
            }
        }
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        assert_eq!(
            sample_dpp(&kern, &mut r1).unwrap(),
            sample_dpp(&kern, &mut r2).unwrap()
        );
    }
}
