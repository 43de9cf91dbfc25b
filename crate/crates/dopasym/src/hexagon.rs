//! Rhombus tilings of the equiangular abc-hexagon: the bijection with boxed
//! plane partitions, exact enumeration and MacMahon counting, the induced
//! Hahn/associated-Hahn column ensembles, the arctic-ellipse boundary, and
//! Tracy-Widom edge-fluctuation statistics.

use crate::equilibrium::{hahn_edge_coeff, hahn_equilibrium, GapType};
use crate::error::{Error, Result};
use crate::kernels::{cd_kernel, sample_dpp, tracy_widom_cdf, KernelMatrix};
use crate::lattice::{make_weights, FamilySpec, NodeSet, WeightFamily};
use crate::orthopoly::stieltjes_recurrence;
use rand::{Rng, SeedableRng};
use rug::{Integer, Rational};
use std::fmt::Write as _;

/// A hexagon with side lengths (a, b, c) and a selected vertical lattice line
/// m ∈ 1..a+b−1 counted from the left.
#[derive(Clone, Copy, Debug)]
pub struct HexagonSpec {
    pub side_a: u64,
    pub side_b: u64,
    pub side_c: u64,
    pub m: u64,
}

impl HexagonSpec {
    pub fn new(side_a: u64, side_b: u64, side_c: u64, m: u64) -> Result<Self> {
        if side_a == 0 || side_b == 0 || side_c == 0 {
            return Err(Error::BadSpec("side lengths must be positive".into()));
        }
        if m == 0 || m >= side_a + side_b {
            return Err(Error::BadSpec(format!(
                "column m = {m} outside 1..{}",
                side_a + side_b - 1
            )));
        }
        Ok(HexagonSpec { side_a, side_b, side_c, m })
    }

    pub fn a_m(&self) -> u64 {
        self.m.abs_diff(self.side_a)
    }

    pub fn b_m(&self) -> u64 {
        self.m.abs_diff(self.side_b)
    }

    /// Number of lattice points on column m.
    pub fn n_points(&self) -> usize {
        let twice = 2 * self.side_c + (self.side_a - self.a_m()) + (self.side_b - self.b_m());
        debug_assert!(twice % 2 == 0);
        (twice / 2) as usize
    }

    /// Number of holes (vertical rhombi) on column m.
    pub fn holes(&self) -> usize {
        self.n_points() - self.side_c as usize
    }
}

/// One tiling, stored as a boxed plane partition: a weakly decreasing
/// side_a × side_b array with entries ≤ side_c, plus per-column hole lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingSample {
    pub heights: Vec<Vec<u32>>,
}

impl TilingSample {
    /// Hole positions (vertical-rhombus positions, counted up from the bottom
    /// lattice point) on each column m = 1..a+b−1.
    pub fn column_holes(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); a + b];
        for (i0, row) in self.heights.iter().enumerate() {
            let i = i0 + 1;
            for (j0, &h) in row.iter().enumerate() {
                let j = j0 + 1;
                let m = a - i + j;
                let xi = if m <= b {
                    h as usize + (a - i)
                } else {
                    h as usize + (b - j)
                };
                cols[m].push(xi);
            }
        }
        for col in cols.iter_mut() {
            col.sort_unstable();
        }
        cols
    }
}

/// The hole ensemble on column m: uniform nodes, Hahn weights with parameters
/// (a_m+1, b_m+1), and L_m occupied sites; the particle ensemble is its dual
/// (associated Hahn) with side_c occupied sites.
pub fn hexagon_ensemble(spec: &HexagonSpec, prec: u32) -> Result<(NodeSet, WeightFamily, usize)> {
    let n = spec.n_points();
    let ns = NodeSet::uniform(n, prec);
    // parameter order pinned by exact enumeration in this projection
    // convention: holes carry the weight with P = b_m+1, Q = a_m+1
    let w = make_weights(
        FamilySpec::Hahn {
            n_param: spec.b_m() as f64 + 1.0,
            q_param: spec.a_m() as f64 + 1.0,
        },
        &ns,
    )?;
    Ok((ns, w, spec.holes()))
}

/// The particle ensemble on column m (associated Hahn, side_c particles).
pub fn hexagon_particle_ensemble(
    spec: &HexagonSpec,
    prec: u32,
) -> Result<(NodeSet, WeightFamily, usize)> {
    let n = spec.n_points();
    let ns = NodeSet::uniform(n, prec);
    let w = make_weights(
        FamilySpec::AssocHahn {
            n_param: spec.b_m() as f64 + 1.0,
            q_param: spec.a_m() as f64 + 1.0,
        },
        &ns,
    )?;
    Ok((ns, w, spec.side_c as usize))
}

/// Exact number of tilings: Π_{i≤a} Π_{j≤b} Π_{k≤c} (i+j+k−1)/(i+j+k−2),
/// evaluated in exact rational arithmetic.
pub fn count_tilings(a: u64, b: u64, c: u64) -> Integer {
    let mut acc = Rational::from(1);
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                acc *= Rational::from((i + j + k - 1, i + j + k - 2));
            }
        }
    }
    debug_assert_eq!(*acc.denom(), Integer::from(1));
    acc.numer().clone()
}

/// Exhaustive enumeration of tilings as boxed plane partitions (weakly
/// decreasing rows and columns, entries ≤ c).
pub fn enumerate_tilings(a: u64, b: u64, c: u64) -> Result<Vec<TilingSample>> {
    let count = count_tilings(a, b, c);
    if count > 1_000_000u64 {
        return Err(Error::TooLarge(count.to_u128().unwrap_or(u128::MAX)));
    }
    let (a, b, c) = (a as usize, b as usize, c as u32);
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(a);
    // generate weakly decreasing rows bounded above elementwise by the
    // previous row
    fn gen_rows(
        rows: &mut Vec<Vec<u32>>,
        a: usize,
        b: usize,
        c: u32,
        out: &mut Vec<TilingSample>,
    ) {
        if rows.len() == a {
            out.push(TilingSample { heights: rows.clone() });
            return;
        }
        let upper: Vec<u32> = match rows.last() {
            Some(prev) => prev.clone(),
            None => vec![c; b],
        };
        let mut row = vec![0u32; b];
        fn gen_row(
            row: &mut Vec<u32>,
            pos: usize,
            upper: &[u32],
            rows: &mut Vec<Vec<u32>>,
            a: usize,
            b: usize,
            c: u32,
            out: &mut Vec<TilingSample>,
        ) {
            if pos == row.len() {
                rows.push(row.clone());
                gen_rows(rows, a, b, c, out);
                rows.pop();
                return;
            }
            let hi = if pos == 0 { upper[0] } else { row[pos - 1].min(upper[pos]) };
            for v in 0..=hi {
                row[pos] = v;
                gen_row(row, pos + 1, upper, rows, a, b, c, out);
            }
        }
        gen_row(&mut row, 0, &upper, rows, a, b, c, out);
    }
    gen_rows(&mut rows, a, b, c as u32, &mut out);
    Ok(out)
}

/// Arctic boundary samples: for each τ the hole-ensemble band endpoints
/// (α(τ), β(τ)) in column coordinates, plus the 2D hexagon coordinates of the
/// corresponding boundary points. Entries at exceptional τ carry `ok=false`.
#[derive(Debug, Clone)]
pub struct ArcticPoint {
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// 2D points ((x, y_alpha), (x, y_beta)) in the rescaled hexagon frame.
    pub lower: (f64, f64),
    pub upper: (f64, f64),
    pub ok: bool,
}

/// Per-column Hahn data of the rescaled hexagon (A, B, C): the hole density
/// and the Hahn parameters at column fraction τ ∈ (0, A+B).
pub fn column_parameters(aa: f64, bb: f64, cc: f64, tau: f64) -> (f64, f64, f64, f64) {
    let a_t = (tau - aa).abs();
    let b_t = (tau - bb).abs();
    let nu = cc + (aa - a_t) / 2.0 + (bb - b_t) / 2.0;
    let c_hole = (aa + bb - a_t - b_t) / (2.0 * cc + aa + bb - a_t - b_t);
    // the first Hahn parameter pairs with the b-side in this convention
    (b_t / nu, a_t / nu, c_hole, nu)
}

pub fn arctic_boundary(aa: f64, bb: f64, cc: f64, tau_grid: &[f64]) -> Vec<ArcticPoint> {
    let mut out = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        if !(0.0 < tau && tau < aa + bb) {
            continue;
        }
        let (ah, bh, c_hole, nu) = column_parameters(aa, bb, cc, tau);
        let y_q = if tau <= bb { -tau / 2.0 } else { (tau - 2.0 * bb) / 2.0 };
        let x2d = 3.0_f64.sqrt() / 2.0 * tau;
        let (c_a, c_b) = crate::equilibrium::hahn_c_thresholds(ah, bh);
        let ok = (c_hole - c_a).abs() > 1e-9 && (c_hole - c_b).abs() > 1e-9;
        let (alpha, beta) = crate::equilibrium::hahn_endpoints(ah, bh, c_hole);
        out.push(ArcticPoint {
            tau,
            alpha,
            beta,
            lower: (x2d, y_q + alpha * nu),
            upper: (x2d, y_q + beta * nu),
            ok,
        });
    }
    out
}

/// The inscribed ellipse of the rescaled hexagon with sides (B, A, C, B, A, C)
/// starting from the origin: returns (center, inverse matrix S = M^{-1}) of
/// (p−O)ᵀ M (p−O) = 1 tangent to all six sides.
pub fn inscribed_ellipse(aa: f64, bb: f64, cc: f64) -> ((f64, f64), [f64; 3]) {
    let s3 = 3.0_f64.sqrt() / 2.0;
    let p1 = (0.0, 0.0);
    let p2 = (s3 * bb, -bb / 2.0);
    let p3 = (p2.0 + s3 * aa, p2.1 + aa / 2.0);
    let p4 = (p3.0, p3.1 + cc);
    let center = ((p1.0 + p4.0) / 2.0, (p1.1 + p4.1) / 2.0);
    // tangency to line n·x = h with |n| = 1: nᵀ S n = (h − n·O)²
    let mut mat = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    let sides = [(p1, p2), (p2, p3), (p3, p4)];
    for (row, (u, v)) in sides.iter().enumerate() {
        let dx = v.0 - u.0;
        let dy = v.1 - u.1;
        let len = (dx * dx + dy * dy).sqrt();
        let n = (dy / len, -dx / len);
        let h = n.0 * u.0 + n.1 * u.1;
        let d = h - (n.0 * center.0 + n.1 * center.1);
        mat[row] = [n.0 * n.0, 2.0 * n.0 * n.1, n.1 * n.1];
        rhs[row] = d * d;
    }
    // solve the 3×3 system for (s11, s12, s22)
    let mut aug = [[0.0f64; 4]; 3];
    for i in 0..3 {
        aug[i][..3].copy_from_slice(&mat[i]);
        aug[i][3] = rhs[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&r1, &r2| aug[r1][col].abs().partial_cmp(&aug[r2][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, piv);
        let d = aug[col][col];
        for k in col..4 {
            aug[col][k] /= d;
        }
        for r in 0..3 {
            if r != col {
                let f = aug[r][col];
                for k in col..4 {
                    aug[r][k] -= f * aug[col][k];
                }
            }
        }
    }
    (center, [aug[0][3], aug[1][3], aug[2][3]])
}

/// Residual |(p−O)ᵀ S^{-1} (p−O) − 1| of a point against the inscribed ellipse.
pub fn ellipse_residual(center: (f64, f64), s: [f64; 3], p: (f64, f64)) -> f64 {
    let (dx, dy) = (p.0 - center.0, p.1 - center.1);
    let det = s[0] * s[2] - s[1] * s[1];
    // M = S^{-1}
    let m11 = s[2] / det;
    let m12 = -s[1] / det;
    let m22 = s[0] / det;
    (m11 * dx * dx + 2.0 * m12 * dx * dy + m22 * dy * dy - 1.0).abs()
}

/// One scale of the edge-fluctuation experiment.
#[derive(Debug, Clone)]
pub struct EdgeStats {
    pub n_scale: usize,
    pub col_n: usize,
    pub samples: usize,
    /// Kolmogorov-Smirnov distance between the empirical CDF of the rescaled
    /// topmost hole and the Tracy-Widom CDF.
    pub ks_distance: f64,
    /// (s, empirical, limit) rows.
    pub table: Vec<(f64, f64, f64)>,
}

/// Samples the topmost hole of the column ensemble for hexagons
/// (a, b, c) = (n, n, 2n) at column m = n/2, rescales by the edge-fluctuation
/// normalization, and compares against the Tracy-Widom CDF.
pub fn edge_fluctuation_stats(
    n_scales: &[usize],
    samples: usize,
    seed: u64,
    prec: u32,
) -> Result<Vec<EdgeStats>> {
    let mut out = Vec::new();
    for &nsc in n_scales {
        if nsc % 2 != 0 {
            return Err(Error::BadSpec("scale n must be even".into()));
        }
        let spec = HexagonSpec::new(nsc as u64, nsc as u64, 2 * nsc as u64, nsc as u64 / 2)?;
        let (_, w, k) = hexagon_ensemble(&spec, prec)?;
        let n = spec.n_points();
        let c_hole = k as f64 / n as f64;
        let ah = spec.b_m() as f64 / n as f64;
        let bh = spec.a_m() as f64 / n as f64;
        let measure = hahn_equilibrium(ah, bh, c_hole)?;
        if measure.gap_types[1] != GapType::Void {
            return Err(Error::WrongGapType(format!(
                "top gap is {:?}, need a void",
                measure.gap_types[1]
            )));
        }
        let beta = measure.bands[0].1;
        let b_coeff = hahn_edge_coeff(measure.hahn.as_ref().unwrap(), false, false);
        let scale = (std::f64::consts::PI * n as f64 * c_hole * b_coeff).powf(2.0 / 3.0);
        let sys = stieltjes_recurrence(&w, k)?;
        let kern = cd_kernel(&sys, k)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ (nsc as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let mut svals = Vec::with_capacity(samples);
        for _ in 0..samples {
            let cfg = sample_dpp(&kern, &mut rng)?;
            let top = *cfg.last().unwrap();
            let x_top = kern.nodes[top];
            svals.push((x_top - beta) * scale);
        }
        svals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // empirical CDF against the limit on a fixed s-grid
        let mut table = Vec::new();
        let mut ks: f64 = 0.0;
        for i in 0..=60 {
            let s = -4.0 + 7.0 * i as f64 / 60.0;
            let emp = svals.partition_point(|&v| v <= s) as f64 / samples as f64;
            let tw = tracy_widom_cdf(s, 40);
            ks = ks.max((emp - tw).abs());
            table.push((s, emp, tw));
        }
        out.push(EdgeStats {
            n_scale: nsc,
            col_n: n,
            samples,
            ks_distance: ks,
            table,
        });
    }
    Ok(out)
}

/// Draws a uniformly random tiling column configuration directly from the
/// determinantal column ensemble (the exact marginal of the uniform tiling).
pub fn sample_column_holes<R: Rng>(
    kern: &KernelMatrix,
    rng: &mut R,
) -> Result<Vec<usize>> {
    sample_dpp(kern, rng)
}

/// Renders a tiling as SVG (three rhombus orientations in three colors).
pub fn tiling_to_svg(t: &TilingSample, a: usize, b: usize, c: usize) -> String {
    let s3 = 3.0_f64.sqrt() / 2.0;
    let scale = 24.0;
    let proj = |x: f64, y: f64, z: f64| -> (f64, f64) {
        let px = s3 * (a as f64 - x + y);
        let py = (a as f64 - x - y) / 2.0 + z;
        (px * scale, -py * scale)
    };
    let mut polys: Vec<(String, &str)> = Vec::new();
    let quad = |p: [(f64, f64, f64); 4]| -> String {
        p.iter()
            .map(|&(x, y, z)| {
                let (px, py) = proj(x, y, z);
                format!("{px:.2},{py:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    // top faces
    for i in 1..=a {
        for j in 1..=b {
            let h = t.heights[i - 1][j - 1] as f64;
            let (x, y) = (i as f64, j as f64);
            polys.push((
                quad([
                    (x - 1.0, y - 1.0, h),
                    (x, y - 1.0, h),
                    (x, y, h),
                    (x - 1.0, y, h),
                ]),
                "#4f81d8",
            ));
        }
    }
    // x-type side faces: for each (j, level) exactly one face
    for j in 1..=b {
        for l in 1..=c {
            let q = (1..=a)
                .filter(|&i| t.heights[i - 1][j - 1] as usize >= l)
                .count() as f64;
            let (y, z) = (j as f64, l as f64);
            polys.push((
                quad([
                    (q, y - 1.0, z - 1.0),
                    (q, y, z - 1.0),
                    (q, y, z),
                    (q, y - 1.0, z),
                ]),
                "#e8b23a",
            ));
        }
    }
    // y-type side faces
    for i in 1..=a {
        for l in 1..=c {
            let r = (1..=b)
                .filter(|&j| t.heights[i - 1][j - 1] as usize >= l)
                .count() as f64;
            let (x, z) = (i as f64, l as f64);
            polys.push((
                quad([
                    (x - 1.0, r, z - 1.0),
                    (x, r, z - 1.0),
                    (x, r, z),
                    (x - 1.0, r, z),
                ]),
                "#c9504f",
            ));
        }
    }
    let width = s3 * (a + b) as f64 * scale + 20.0;
    let height = ((a + b) as f64 / 2.0 + c as f64) * scale + 20.0;
    let offset_y = (a as f64 / 2.0 + c as f64) * scale + 10.0;
    let offset_x = 10.0 - s3 * 0.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">",
        width, height, width, height
    );
    let _ = writeln!(svg, "<g transform=\"translate({offset_x:.1},{offset_y:.1})\">");
    for (pts, color) in polys {
        let _ = writeln!(
            svg,
            "<polygon points=\"{pts}\" fill=\"{color}\" stroke=\"#333\" stroke-width=\"0.6\"/>"
        );
    }
    let _ = writeln!(svg, "</g></svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::correlation;
    use crate::prec::DEFAULT_PREC;

    #[test]
    fn spec_derived_quantities() {
        // a=b=c=2, m=2: a_m=b_m=0, N=4, L_m=2
        let s = HexagonSpec::new(2, 2, 2, 2).unwrap();
        assert_eq!(s.a_m(), 0);
        assert_eq!(s.b_m(), 0);
        assert_eq!(s.n_points(), 4);
        assert_eq!(s.holes(), 2);
        // holes + particles = N
        assert_eq!(s.holes() + s.side_c as usize, s.n_points());
    }

    #[test]
    fn macmahon_counts() {
        assert_eq!(count_tilings(1, 1, 1), 2);
        assert_eq!(count_tilings(2, 2, 2), 20);
        assert_eq!(count_tilings(3, 3, 3), 980);
        // symmetric under permutations
        assert_eq!(count_tilings(2, 3, 4), count_tilings(4, 2, 3));
        assert_eq!(count_tilings(2, 3, 4), count_tilings(3, 2, 4));
    }

    #[test]
    fn enumeration_matches_macmahon() {
        for &(a, b, c) in &[(1u64, 1u64, 1u64), (2, 2, 2), (3, 2, 2), (2, 3, 2), (3, 3, 3), (2, 2, 4)] {
            let ts = enumerate_tilings(a, b, c).unwrap();
            let expect = count_tilings(a, b, c);
            assert_eq!(Integer::from(ts.len() as u64), expect, "({a},{b},{c})");
        }
    }

    #[test]
    fn hole_lists_are_consistent() {
        let (a, b, c) = (3u64, 2u64, 2u64);
        let ts = enumerate_tilings(a, b, c).unwrap();
        for t in &ts {
            let cols = t.column_holes(a as usize, b as usize);
            for m in 1..(a + b) as usize {
                let spec = HexagonSpec::new(a, b, c, m as u64).unwrap();
                let holes = &cols[m];
                assert_eq!(holes.len(), spec.holes(), "column {m} of {t:?}");
                // distinct and in range
                for w in holes.windows(2) {
                    assert!(w[0] < w[1]);
                }
                if let Some(&top) = holes.last() {
                    assert!(top < spec.n_points());
                }
            }
        }
    }

    #[test]
    fn column_marginal_matches_hahn_ensemble() {
        // enumeration marginal at a=b=c=2, m=2 equals the Hahn DPP
        for &(a, b, c, m) in &[(2u64, 2u64, 2u64, 2u64), (3, 2, 2, 2), (2, 3, 2, 3), (3, 2, 2, 4)] {
            let spec = HexagonSpec::new(a, b, c, m).unwrap();
            let ts = enumerate_tilings(a, b, c).unwrap();
            let mut freq: std::collections::HashMap<Vec<usize>, usize> =
                std::collections::HashMap::new();
            for t in &ts {
                let cols = t.column_holes(a as usize, b as usize);
                *freq.entry(cols[m as usize].clone()).or_insert(0) += 1;
            }
            let total = ts.len() as f64;
            // ensemble probabilities from the weight family
            let (_, w, k) = hexagon_ensemble(&spec, DEFAULT_PREC).unwrap();
            let wts = w.weights_f64();
            let xs = &w.node_set.nodes_f64;
            let n = spec.n_points();
            let mut configs: Vec<Vec<usize>> = Vec::new();
            let mut combo = (0..k).collect::<Vec<usize>>();
            loop {
                configs.push(combo.clone());
                // next combination
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if combo[i] != i + n - k {
                        combo[i] += 1;
                        for j in (i + 1)..k {
                            combo[j] = combo[j - 1] + 1;
                        }
                        break;
                    }
                    if i == 0 {
                        combo.clear();
                        break;
                    }
                }
                if combo.is_empty() {
                    break;
                }
                if configs.len() > 100_000 {
                    break;
                }
            }
            let mut probs: Vec<f64> = configs
                .iter()
                .map(|cfg| {
                    let mut p = 1.0;
                    for (ii, &u) in cfg.iter().enumerate() {
                        p *= wts[u];
                        for &v in cfg.iter().skip(ii + 1) {
                            let d = xs[u] - xs[v];
                            p *= d * d;
                        }
                    }
                    p
                })
                .collect();
            let z: f64 = probs.iter().sum();
            for p in probs.iter_mut() {
                *p /= z;
            }
            for (cfg, p) in configs.iter().zip(probs.iter()) {
                let emp = freq.get(cfg).map(|&c| c as f64 / total).unwrap_or(0.0);
                assert!(
                    (emp - p).abs() < 1e-10,
                    "({a},{b},{c}) m={m} cfg {cfg:?}: emp {emp} vs dpp {p}"
                );
            }
        }
    }

    #[test]
    fn hole_and_particle_ensembles_are_dual() {
        let spec = HexagonSpec::new(3, 2, 2, 2).unwrap();
        let (_, holes, _) = hexagon_ensemble(&spec, DEFAULT_PREC).unwrap();
        let (_, parts, _) = hexagon_particle_ensemble(&spec, DEFAULT_PREC).unwrap();
        let dual = crate::lattice::dual_weights(&holes);
        for i in 0..spec.n_points() {
            let d = (dual.log_weights[i].clone() - &parts.log_weights[i]).to_f64();
            assert!(d.abs() < 1e-30, "node {i}: {d}");
        }
    }

    #[test]
    fn hole_plus_particle_density_is_one() {
        for tau in [0.3, 0.8, 1.4, 1.9] {
            let (_, _, c_hole, _) = column_parameters(1.0, 1.0, 1.0, tau);
            let a_t: f64 = (tau - 1.0f64).abs();
            let c_part = 2.0 / (2.0 + 1.0 + 1.0 - a_t - a_t);
            assert!((c_hole + c_part - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn arctic_boundary_on_inscribed_ellipse() {
        let (aa, bb, cc) = (1.0, 1.0, 1.0);
        let taus: Vec<f64> = (1..50).map(|i| 2.0 * i as f64 / 50.0).collect();
        let pts = arctic_boundary(aa, bb, cc, &taus);
        let (center, s) = inscribed_ellipse(aa, bb, cc);
        let mut checked = 0;
        for p in &pts {
            if !p.ok {
                continue;
            }
            let r1 = ellipse_residual(center, s, p.lower);
            let r2 = ellipse_residual(center, s, p.upper);
            assert!(r1 < 1e-8, "τ={}: lower residual {r1}", p.tau);
            assert!(r2 < 1e-8, "τ={}: upper residual {r2}", p.tau);
            checked += 1;
        }
        assert!(checked > 40);
        // symmetric center column: α, β symmetric about 1/2
        let centerpt = arctic_boundary(aa, bb, cc, &[1.0]);
        assert!((centerpt[0].alpha + centerpt[0].beta - 1.0).abs() < 1e-10);
        // continuity across the kink τ = A
        let eps = 1e-7;
        let kink = arctic_boundary(aa, bb, cc, &[1.0 - eps, 1.0 + eps]);
        assert!((kink[0].alpha - kink[1].alpha).abs() < 1e-4);
        assert!((kink[0].beta - kink[1].beta).abs() < 1e-4);
    }

    #[test]
    fn asymmetric_hexagon_boundary_on_ellipse() {
        let (aa, bb, cc) = (1.0, 2.0, 1.5);
        let taus: Vec<f64> = (1..40).map(|i| 3.0 * i as f64 / 40.0).collect();
        let pts = arctic_boundary(aa, bb, cc, &taus);
        let (center, s) = inscribed_ellipse(aa, bb, cc);
        for p in pts.iter().filter(|p| p.ok) {
            assert!(ellipse_residual(center, s, p.lower) < 1e-8, "τ={}", p.tau);
            assert!(ellipse_residual(center, s, p.upper) < 1e-8, "τ={}", p.tau);
        }
    }

    #[test]
    fn svg_has_right_tile_count() {
        let ts = enumerate_tilings(2, 2, 2).unwrap();
        let svg = tiling_to_svg(&ts[5], 2, 2, 2);
        let polys = svg.matches("<polygon").count();
        assert_eq!(polys, 2 * 2 + 2 * 2 + 2 * 2);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn edge_stats_deterministic_and_shrinking() {
        let r1 = edge_fluctuation_stats(&[8], 400, 11, 192).unwrap();
        let r2 = edge_fluctuation_stats(&[8], 400, 11, 192).unwrap();
        assert_eq!(r1[0].ks_distance, r2[0].ks_distance);
        for (s, emp, tw) in &r1[0].table {
            assert!((0.0..=1.0).contains(emp), "emp CDF out of range at {s}");
            assert!((0.0..=1.0).contains(tw));
        }
        // monotone empirical CDF
        for w in r1[0].table.windows(2) {
            assert!(w[0].1 <= w[1].1 + 1e-12);
        }
    }
}
