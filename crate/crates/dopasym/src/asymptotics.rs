//! Regional asymptotic formulae for the monic polynomials: outer, void,
//! band, saturated, hard-edge, and Airy-edge approximations, with the
//! cosine zero model in bands, exponential zero confinement reports in
//! saturated regions, and the one-band recurrence-coefficient predictions.

use crate::equilibrium::{EquilibriumMeasure, GapType};
use crate::error::{Error, Result};
use crate::orthopoly::OrthoSystem;
use crate::outer::{EdgeSide, OuterModel};
use crate::special::{airy, ln_gamma};
use num_complex::Complex64;
use rug::Float;
use std::f64::consts::PI;

/// Which asymptotic theorem applies at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionTag {
    Outer,
    Void(EdgeSide),
    Band,
    Saturated(EdgeSide),
    /// Hard edge at the interval endpoint adjacent to a saturated gap.
    HardEdge(EdgeSide),
    /// Airy disc around a band endpoint; the gap type names the adjacent gap.
    AiryEdge(EdgeSide, GapType),
}

/// Classifies a point against the measure's band/gap partition (one band).
pub fn classify_point(m: &EquilibriumMeasure, z: Complex64, n: usize) -> RegionTag {
    let (alpha, beta) = m.bands[0];
    let width = beta - alpha;
    let x = z.re;
    let dist_interval = if x < m.a {
        ((m.a - x).powi(2) + z.im * z.im).sqrt()
    } else if x > m.b {
        ((x - m.b).powi(2) + z.im * z.im).sqrt()
    } else {
        z.im.abs()
    };
    if dist_interval > 0.02 {
        return RegionTag::Outer;
    }
    let r_edge = (0.05 * width).min(2.0 * (n as f64).powf(-2.0 / 3.0 + 0.1));
    // collect qualifying discs and keep the nearest center (narrow gaps can
    // put a band edge inside the hard-edge disc and vice versa)
    let mut best: Option<(f64, RegionTag)> = None;
    let mut consider = |center: f64, tag: RegionTag| {
        let d = (z - center).norm();
        if d <= r_edge && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, tag));
        }
    };
    consider(alpha, RegionTag::AiryEdge(EdgeSide::Left, m.gap_types[0]));
    consider(beta, RegionTag::AiryEdge(EdgeSide::Right, m.gap_types[1]));
    if m.gap_types[0] == GapType::Saturated {
        consider(m.a, RegionTag::HardEdge(EdgeSide::Left));
    }
    if m.gap_types[1] == GapType::Saturated {
        consider(m.b, RegionTag::HardEdge(EdgeSide::Right));
    }
    if let Some((_, tag)) = best {
        return tag;
    }
    if x > alpha && x < beta {
        return RegionTag::Band;
    }
    let side = if x <= alpha { EdgeSide::Left } else { EdgeSide::Right };
    let gi = if side == EdgeSide::Left { 0 } else { 1 };
    match m.gap_types[gi] {
        GapType::Void => RegionTag::Void(side),
        GapType::Saturated => RegionTag::Saturated(side),
    }
}

/// Leading-order approximation of π_{N,k}(z), split as e^{log_scale}·factor
/// so the exponentially large prefactor never leaves the log domain.
#[derive(Clone, Copy, Debug)]
pub struct ApproxPi {
    pub log_scale: f64,
    pub factor: Complex64,
}

impl ApproxPi {
    pub fn value_f64(&self) -> Complex64 {
        self.factor * self.log_scale.exp()
    }
}

/// (−τ)^p continued from the upper z half-plane: real positive for τ < 0;
/// for τ > 0 (band side) the branch depends on the edge orientation, since
/// Im τ(x+iε) = ε τ' and τ' > 0 at a left edge, τ' < 0 at a right edge.
fn neg_tau_pow(tau: f64, p: f64, side: EdgeSide) -> Complex64 {
    if tau <= 0.0 {
        Complex64::new((-tau).powf(p), 0.0)
    } else {
        let arg = match side {
            EdgeSide::Left => -PI * p,
            EdgeSide::Right => PI * p,
        };
        Complex64::from_polar(tau.powf(p), arg)
    }
}

/// Evaluates the regional approximation for the given tag at z (real-axis
/// points are treated as upper boundary values).
pub fn approx_pi(model: &OuterModel, tag: RegionTag, z: Complex64) -> Result<ApproxPi> {
    let n = model.big_n as f64;
    match tag {
        RegionTag::Outer => {
            let lc = if z.im == 0.0 {
                model.l_c_plus(z.re)?
            } else {
                model.l_c_complex(z)?
            };
            let w = model.w_fn(z);
            Ok(ApproxPi {
                log_scale: n * lc.re,
                factor: Complex64::from_polar(1.0, n * lc.im) * w,
            })
        }
        RegionTag::Void(_) => {
            if z.im != 0.0 {
                return Err(Error::RegionMismatch(
                    "void formula is evaluated on the real axis".into(),
                ));
            }
            let x = z.re;
            let lbar = model.lbar(x)?;
            let mass = model.measure.mass_above(x)?;
            let w = model.w_fn(z);
            let factor = Complex64::from_polar(1.0, n * PI * model.c * mass) * w;
            Ok(ApproxPi { log_scale: n * lbar, factor })
        }
        RegionTag::Band => {
            let x = z.re;
            let lbar = model.lbar(x)?;
            let (a_i, _) = model.band_phase(x)?;
            let phase = model.band_cos_phase(x)?;
            Ok(ApproxPi {
                log_scale: n * lbar,
                factor: Complex64::new(a_i * phase.cos(), 0.0),
            })
        }
        RegionTag::Saturated(_) => {
            let x = z.re;
            let lbar = model.lbar(x)?;
            let mass = model.measure.mass_above(x)?;
            let theta0 = model.theta0(x)?;
            let w = model.w_fn(z);
            let a_del =
                2.0 * Complex64::from_polar(1.0, n * PI * model.c * mass - n * theta0 / 2.0) * w;
            Ok(ApproxPi {
                log_scale: n * lbar,
                factor: a_del * (n * theta0 / 2.0).cos(),
            })
        }
        RegionTag::HardEdge(side) => {
            let x = z.re;
            let lbar = model.lbar(x)?;
            let mass = model.measure.mass_above(x)?;
            let rho0 = model.measure.rho0.clone();
            let zeta = match side {
                EdgeSide::Left => {
                    n * crate::quad::adaptive(move |t| rho0(t), model.measure.a, x, 1e-13)?
                }
                EdgeSide::Right => {
                    n * crate::quad::adaptive(move |t| rho0(t), x, model.measure.b, 1e-13)?
                }
            };
            let w = model.w_fn(z);
            // phase fixed by matching the saturated-region formula through
            // Nθ⁰/2 = Nπ − πζ (left edge) or Nθ⁰/2 = πζ (right edge)
            let phase_sign = match side {
                EdgeSide::Left => 1.0,
                EdgeSide::Right => -1.0,
            };
            let a_tilde = 2.0
                * Complex64::from_polar(1.0, n * PI * model.c * mass + phase_sign * PI * zeta)
                * w;
            // Γ(1/2+ζ) cos(πζ) e^ζ ζ^{−ζ} / sqrt(2π), stable in the log domain
            let gpart = if zeta > 1e-12 {
                (ln_gamma(0.5 + zeta) + zeta - zeta * zeta.ln()).exp() * (PI * zeta).cos()
                    / (2.0 * PI).sqrt()
            } else {
                (ln_gamma(0.5 + zeta) + zeta).exp() * (PI * zeta).cos() / (2.0 * PI).sqrt()
            };
            Ok(ApproxPi {
                log_scale: n * lbar,
                factor: a_tilde * gpart,
            })
        }
        RegionTag::AiryEdge(side, gtype) => {
            let mut x = z.re;
            if z.im != 0.0 {
                return Err(Error::RegionMismatch(
                    "Airy formula is evaluated on the real axis".into(),
                ));
            }
            // exactly at the edge both terms are 0·∞; nudge into the band
            let edge = match side {
                EdgeSide::Left => model.alpha,
                EdgeSide::Right => model.beta,
            };
            if (x - edge).abs() < 1e-9 * model.band_width() {
                let inward = if side == EdgeSide::Left { 1.0 } else { -1.0 };
                x = edge + inward * 1e-6 * model.band_width();
            }
            let zx = Complex64::new(x, 0.0);
            let lbar_i = model.lbar_band(x)?;
            let tau = model.tau_map(side, gtype, x)?;
            let arg = -(0.75f64).powf(2.0 / 3.0) * tau;
            let av = airy(arg);
            let (hp, hm) = model.h_pm(side, zx);
            let eta_g = ((model.eta)(x) - model.gamma_const) / 2.0;
            let pref = (2.0 * PI).sqrt() * eta_g.exp();
            let c16 = (0.75f64).powf(1.0 / 6.0);
            // coefficient pairing per (edge side, gap type); the N^{±1/6}
            // factors cancel against the theorem's outer powers
            let (h_a, h_b, sign_b, f_a, f_b) = match (side, gtype) {
                (EdgeSide::Left, GapType::Void) => (hm, hp, -1.0, av.ai, av.aip),
                (EdgeSide::Right, GapType::Void) => (hp, hm, -1.0, av.ai, av.aip),
                (EdgeSide::Left, GapType::Saturated) => {
                    let th = n * model.theta0(x)? / 2.0;
                    (
                        hm,
                        hp,
                        1.0,
                        th.cos() * av.bi - th.sin() * av.ai,
                        th.cos() * av.bip - th.sin() * av.aip,
                    )
                }
                (EdgeSide::Right, GapType::Saturated) => {
                    let th = n * model.theta0(x)? / 2.0;
                    (
                        hm,
                        hp,
                        -1.0,
                        th.cos() * av.bi + th.sin() * av.ai,
                        th.cos() * av.bip + th.sin() * av.aip,
                    )
                }
            };
            let term_a = c16 * neg_tau_pow(tau, 0.25, side) * h_a * f_a;
            let term_b = sign_b / c16 * neg_tau_pow(tau, -0.25, side) * h_b * f_b;
            Ok(ApproxPi {
                log_scale: n * lbar_i,
                factor: pref * (term_a + term_b),
            })
        }
    }
}

/// Exact π_{N,k} rescaled by e^{−log_scale}, in high precision, as f64.
pub fn scaled_exact(sys: &OrthoSystem, k: usize, x: f64, log_scale: f64) -> f64 {
    let prec = sys.precision_bits;
    let z = Float::with_val(prec, x);
    let (monic, _) = sys.evaluate(k, &z);
    (monic * Float::with_val(prec, -log_scale).exp()).to_f64()
}

/// |scaled exact − approximation factor| at a real point.
pub fn scaled_error(sys: &OrthoSystem, k: usize, ap: &ApproxPi, x: f64) -> f64 {
    let ex = scaled_exact(sys, k, x, ap.log_scale);
    (Complex64::new(ex, 0.0) - ap.factor).norm()
}

/// Model zeros in the band: roots of cos(Φ_I(z) + Nπc μ([z,b])), located by
/// dense phase sampling plus bisection, away from the edges.
pub fn predicted_band_zeros(model: &OuterModel) -> Result<Vec<f64>> {
    let (alpha, beta) = (model.alpha, model.beta);
    let width = beta - alpha;
    let lo = alpha + 0.02 * width;
    let hi = beta - 0.02 * width;
    // cumulative band mass on a fine grid, plus the mass right of the band
    let m = 8192usize;
    let dx = (hi - lo) / m as f64;
    let psi: Vec<f64> = (0..=m)
        .map(|i| model.measure.density_at(lo + dx * i as f64))
        .collect();
    let mut cum = vec![0.0f64; m + 1];
    for i in 1..=m {
        cum[i] = cum[i - 1] + 0.5 * dx * (psi[i - 1] + psi[i]);
    }
    let mass_hi_to_b = model.measure.mass_above(hi)?;
    let mass_above = move |x: f64| -> f64 {
        let t = ((x - lo) / dx).clamp(0.0, m as f64);
        let j = (t.floor() as usize).min(m - 1);
        let frac = t - j as f64;
        let cum_x = cum[j] * (1.0 - frac) + cum[j + 1] * frac;
        (cum[m] - cum_x) + mass_hi_to_b
    };
    let nf = model.big_n as f64;
    let phase = |x: f64| -> f64 {
        let w = model.w_fn(Complex64::new(x, 0.0));
        w.arg() + nf * PI * model.c * mass_above(x)
    };
    // cos zero ⟺ phase ≡ π/2 (mod π); the phase decreases at rate ~ Nπcψ
    let samples = ((nf * model.c * 8.0) as usize).max(200);
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev_v = (phase(prev_x) - PI / 2.0) / PI;
    for i in 1..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        let v = (phase(x) - PI / 2.0) / PI;
        if v.floor() != prev_v.floor() {
            let mut a = prev_x;
            let mut b = x;
            let mut fa = prev_v;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = (phase(mid) - PI / 2.0) / PI;
                if fm.floor() == fa.floor() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    Ok(out)
}

/// Signed distances from nodes to their nearest exact zeros in saturated
/// regions (exponential confinement report).
#[derive(Debug, Clone)]
pub struct PairingReport {
    /// (node index, node, nearest zero, signed distance zero − node).
    pub pairs: Vec<(usize, f64, f64, f64)>,
    /// One-sided ordering held at every tested exterior node.
    pub ordering_ok: bool,
    /// Defect intervals detected in interior saturated regions.
    pub defects: usize,
    pub max_abs_dist: f64,
}

/// Pairs nodes in saturated regions with the zeros of π_{N,k}. Test intervals
/// keep `margin_frac` of each gap's length away from the band edge.
pub fn saturated_zero_pairing(
    sys: &OrthoSystem,
    m: &EquilibriumMeasure,
    k: usize,
    margin_frac: f64,
) -> Result<PairingReport> {
    let has_sat = m.gap_types.iter().any(|g| *g == GapType::Saturated);
    if !has_sat {
        return Ok(PairingReport {
            pairs: Vec::new(),
            ordering_ok: true,
            defects: 0,
            max_abs_dist: 0.0,
        });
    }
    let zeros = sys.zeros(k)?;
    let zf: Vec<f64> = zeros.iter().map(|z| z.to_f64()).collect();
    let mut pairs = Vec::new();
    let mut ordering_ok = true;
    let mut max_abs: f64 = 0.0;
    for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
        if m.gap_types[gi] != GapType::Saturated {
            continue;
        }
        let len = hi - lo;
        let (jlo, jhi, expect_right) = if gi == 0 {
            (lo, hi - margin_frac * len, true)
        } else {
            (lo + margin_frac * len, hi, false)
        };
        for (idx, xn) in sys.weights.node_set.nodes_f64.iter().enumerate() {
            let x = *xn;
            if x < jlo || x > jhi {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut bz = f64::NAN;
            for &z in &zf {
                if (z - x).abs() < best {
                    best = (z - x).abs();
                    bz = z;
                }
            }
            let signed = bz - x;
            if expect_right && signed <= 0.0 {
                ordering_ok = false;
            }
            if !expect_right && signed >= 0.0 {
                ordering_ok = false;
            }
            max_abs = max_abs.max(signed.abs());
            pairs.push((idx, x, bz, signed));
        }
    }
    Ok(PairingReport {
        pairs,
        ordering_ok,
        defects: 0,
        max_abs_dist: max_abs,
    })
}

/// High-precision distances |zero − node| in the tested saturated intervals,
/// for confinement slope measurement against N.
pub fn confinement_distances(
    sys: &OrthoSystem,
    m: &EquilibriumMeasure,
    k: usize,
    margin_frac: f64,
) -> Result<Vec<f64>> {
    let zeros = sys.zeros(k)?;
    let mut dists = Vec::new();
    for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
        if m.gap_types[gi] != GapType::Saturated {
            continue;
        }
        let len = hi - lo;
        let (jlo, jhi) = if gi == 0 {
            (lo, hi - margin_frac * len)
        } else {
            (lo + margin_frac * len, hi)
        };
        for (i, xn) in sys.weights.node_set.nodes_f64.iter().enumerate() {
            if *xn < jlo || *xn > jhi {
                continue;
            }
            let node = &sys.weights.node_set.nodes[i];
            let mut best: Option<Float> = None;
            for z in &zeros {
                let d = Float::with_val(sys.precision_bits, z - node).abs();
                if best.as_ref().is_none_or(|b| d < *b) {
                    best = Some(d);
                }
            }
            dists.push(best.unwrap().to_f64());
        }
    }
    Ok(dists)
}

/// One-band predictions for leading and recurrence coefficients.
#[derive(Debug, Clone, Copy)]
pub struct PredictedRecurrence {
    /// log γ²_{N,k} = Nℓ_c + γ + log(4/(β−α)).
    pub log_gamma_sq_k: f64,
    /// log γ²_{N,k−1} = Nℓ_c + γ + log((β−α)/4).
    pub log_gamma_sq_km1: f64,
    /// a_{N,k} = (α+β)/2.
    pub a_k: f64,
    /// b_{N,k−1} = (β−α)/4.
    pub b_km1: f64,
}

pub fn predicted_recurrence(model: &OuterModel) -> PredictedRecurrence {
    let n = model.big_n as f64;
    let base = n * model.measure.ell_c + model.gamma_const;
    let w = model.band_width();
    PredictedRecurrence {
        log_gamma_sq_k: base + (4.0 / w).ln(),
        log_gamma_sq_km1: base + (w / 4.0).ln(),
        a_k: 0.5 * (model.alpha + model.beta),
        b_km1: 0.25 * w,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{hahn_equilibrium, hahn_field};
    use crate::lattice::{make_weights, FamilySpec, NodeSet, RealFn};
    use crate::orthopoly::stieltjes_recurrence;
    use crate::outer::build_outer_model;
    use crate::prec::DEFAULT_PREC;
    use std::sync::Arc;

    fn hahn_setup(a: f64, b: f64, c: f64, n: usize) -> (OrthoSystem, OuterModel) {
        let k = (c * n as f64).round() as usize;
        let nf = n as f64;
        let ns = NodeSet::uniform(n, DEFAULT_PREC);
        let w = make_weights(
            FamilySpec::Hahn { n_param: nf * a + 1.0, q_param: nf * b + 1.0 },
            &ns,
        )
        .unwrap();
        let sys = stieltjes_recurrence(&w, (k + 2).min(n - 1)).unwrap();
        let m = hahn_equilibrium(a, b, c).unwrap();
        let phi: RealFn = Arc::new(move |x| hahn_field(x, a, b));
        let kappa = k as f64 - c * nf;
        let model =
            build_outer_model(&m, phi, w.eta.clone(), w.eta_prime.clone(), kappa, n).unwrap();
        (sys, model)
    }

    #[test]
    fn classification_cases() {
        let m = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let n = 100;
        let (alpha, _) = m.bands[0];
        assert_eq!(
            classify_point(&m, Complex64::new(alpha, 0.0), n),
            RegionTag::AiryEdge(EdgeSide::Left, GapType::Saturated)
        );
        assert_eq!(
            classify_point(&m, Complex64::new(0.0, 0.0), n),
            RegionTag::HardEdge(EdgeSide::Left)
        );
        assert_eq!(classify_point(&m, Complex64::new(2.0, 0.0), n), RegionTag::Outer);
        let mid = 0.5 * (m.bands[0].0 + m.bands[0].1);
        assert_eq!(classify_point(&m, Complex64::new(mid, 0.0), n), RegionTag::Band);
        // a wide void: Hahn(3,7) at c = 0.2 is void-band-void with β ≈ 0.77
        let mv = hahn_equilibrium(3.0, 7.0, 0.2).unwrap();
        assert_eq!(
            classify_point(&mv, Complex64::new(0.9, 0.0), n),
            RegionTag::Void(EdgeSide::Right)
        );
    }

    #[test]
    fn outer_error_halves_with_n() {
        let mut errs = Vec::new();
        for &n in &[40usize, 80] {
            let (sys, model) = hahn_setup(3.0, 7.0, 0.5, n);
            let k = n / 2;
            let ap = approx_pi(&model, RegionTag::Outer, Complex64::new(2.0, 0.0)).unwrap();
            let ex = scaled_exact(&sys, k, 2.0, ap.log_scale);
            let rel = (ex - ap.factor.re).abs() / ap.factor.norm();
            assert!(ap.factor.im.abs() < 1e-9 * ap.factor.norm());
            errs.push(rel);
        }
        assert!(errs[1] < 0.75 * errs[0], "outer errors {errs:?} not decaying");
        let c0 = errs[0] * 40.0;
        let c1 = errs[1] * 80.0;
        assert!(c1 < 2.0 * c0 && c1 > 0.2 * c0, "C values {c0} vs {c1}");
    }

    #[test]
    fn band_and_void_and_saturated_errors_decay() {
        // the pointwise error oscillates with the local phase, so compare the
        // N-scaled maxima over the test points across a doubling
        let mut band_errs = Vec::new();
        let mut void_errs = Vec::new();
        let mut sat_errs = Vec::new();
        for &n in &[40usize, 80] {
            let (sys, model) = hahn_setup(3.0, 7.0, 0.5, n);
            let k = n / 2;
            let (alpha, beta) = model.measure.bands[0];
            let _ = alpha;
            let mut band_max = 0.0f64;
            for &rel in &[0.2, 0.5, 0.8] {
                let xb = alpha + rel * (beta - alpha);
                let ap = approx_pi(&model, RegionTag::Band, Complex64::new(xb, 0.0)).unwrap();
                band_max = band_max.max(scaled_error(&sys, k, &ap, xb));
            }
            band_errs.push(band_max * n as f64);
            // a wide void: Hahn(3,7) at c = 0.2 (void-band-void)
            let (sys_v, model_v) = hahn_setup(3.0, 7.0, 0.2, n);
            let kv = n / 5;
            let beta_v = model_v.measure.bands[0].1;
            let mut void_max = 0.0f64;
            for &rel in &[0.3, 0.7] {
                let xv = beta_v + rel * (1.0 - beta_v);
                let ap =
                    approx_pi(&model_v, RegionTag::Void(EdgeSide::Right), Complex64::new(xv, 0.0))
                        .unwrap();
                void_max = void_max.max(scaled_error(&sys_v, kv, &ap, xv) / ap.factor.norm());
            }
            void_errs.push(void_max * n as f64);
            // a wide saturated region: Hahn(1,5) at c = 0.5
            let (sys_s, model_s) = hahn_setup(1.0, 5.0, 0.5, n);
            let ks = n / 2;
            let alpha_s = model_s.measure.bands[0].0;
            let mut sat_max = 0.0f64;
            for &rel in &[0.35, 0.6] {
                let xs = rel * alpha_s;
                let ap = approx_pi(
                    &model_s,
                    RegionTag::Saturated(EdgeSide::Left),
                    Complex64::new(xs, 0.0),
                )
                .unwrap();
                // scale by the |A^Δ| amplitude since cos may sit near a zero
                let amp = 2.0 * model_s.w_fn(Complex64::new(xs, 0.0)).norm();
                sat_max = sat_max.max(scaled_error(&sys_s, ks, &ap, xs) / amp);
            }
            sat_errs.push(sat_max * n as f64);
        }
        // N·err bounded and stable across the doubling
        assert!(band_errs[1] < 2.5 * band_errs[0] && band_errs[1] < 2.0, "band {band_errs:?}");
        assert!(void_errs[1] < 2.5 * void_errs[0] && void_errs[1] < 2.0, "void {void_errs:?}");
        assert!(sat_errs[1] < 2.5 * sat_errs[0] && sat_errs[1] < 2.0, "sat {sat_errs:?}");
    }

    #[test]
    fn hard_edge_matches_and_reduces_to_saturated() {
        let (sys, model) = hahn_setup(1.0, 5.0, 0.5, 80);
        let k = 40;
        let x0 = sys.weights.node_set.nodes_f64[0];
        let ap =
            approx_pi(&model, RegionTag::HardEdge(EdgeSide::Left), Complex64::new(x0, 0.0))
                .unwrap();
        let err = scaled_error(&sys, k, &ap, x0);
        let amp = 2.0 * model.w_fn(Complex64::new(x0, 0.0)).norm();
        assert!(err / amp < 0.2, "hard-edge scaled err {err}, amp {amp}");
        // for ζ ≫ 1 the hard-edge and saturated formulas agree (Stirling);
        // the residual Stirling defect at finite ζ is ~ 1/(24ζ)
        let xs = 0.8 * model.alpha;
        let rho0 = model.measure.rho0.clone();
        let zeta = 80.0 * crate::quad::adaptive(move |t| rho0(t), 0.0, xs, 1e-12).unwrap();
        let hv =
            approx_pi(&model, RegionTag::HardEdge(EdgeSide::Left), Complex64::new(xs, 0.0))
                .unwrap();
        let sv =
            approx_pi(&model, RegionTag::Saturated(EdgeSide::Left), Complex64::new(xs, 0.0))
                .unwrap();
        let ratio = (hv.factor / sv.factor).re;
        assert!(
            (ratio - 1.0).abs() < 3.0 / (24.0 * zeta),
            "hard-edge/saturated ratio {ratio} at zeta {zeta}"
        );
    }

    #[test]
    fn airy_edge_formula_tracks_exact() {
        let (sys, model) = hahn_setup(3.0, 7.0, 0.5, 80);
        let k = 40;
        let beta = model.beta;
        for &target in &[-2.0f64, 0.0, 2.0] {
            let mut best = (f64::INFINITY, beta);
            for i in -200..=200 {
                let x = beta + i as f64 * 2e-4;
                if let Ok(t) = model.tau_map(EdgeSide::Right, GapType::Void, x) {
                    if (t - target).abs() < best.0 {
                        best = ((t - target).abs(), x);
                    }
                }
            }
            let x = best.1;
            let ap = approx_pi(
                &model,
                RegionTag::AiryEdge(EdgeSide::Right, GapType::Void),
                Complex64::new(x, 0.0),
            )
            .unwrap();
            assert!(
                ap.factor.im.abs() < 1e-6 * ap.factor.norm().max(1e-12),
                "imaginary residue at τ={target}: {:?}",
                ap.factor
            );
            let err = scaled_error(&sys, k, &ap, x);
            let scale = ap.factor.norm().max(1e-3);
            assert!(
                err / scale < 0.15,
                "airy err {err} vs scale {scale} at τ = {target} (x = {x})"
            );
        }
    }

    #[test]
    fn band_zero_model_counts_and_symmetry() {
        let n = 60usize;
        let c = 0.4;
        let k = 24usize;
        let ns = NodeSet::uniform(n, DEFAULT_PREC);
        let w = make_weights(FamilySpec::Krawtchouk { p: 0.5, q: 0.5 }, &ns).unwrap();
        let m = crate::equilibrium::krawtchouk_equilibrium(0.5, 0.5, c).unwrap();
        let phi: RealFn = Arc::new(crate::equilibrium::uniform_log_potential);
        let model =
            build_outer_model(&m, phi, w.eta.clone(), w.eta_prime.clone(), 0.0, n).unwrap();
        let zeros = predicted_band_zeros(&model).unwrap();
        for z in &zeros {
            let mirror = 1.0 - z;
            let found = zeros.iter().any(|y| (y - mirror).abs() < 1e-6);
            assert!(found, "no mirror for {z}");
        }
        let band_mass = {
            let psi = m.psi.clone();
            crate::quad::adaptive(move |t| psi(t), m.bands[0].0, m.bands[0].1, 1e-10).unwrap()
        };
        let expected = k as f64 * band_mass;
        assert!(
            (zeros.len() as f64 - expected).abs() <= 2.5,
            "{} model zeros vs expected {expected}",
            zeros.len()
        );
    }

    #[test]
    fn band_zeros_match_exact_at_n2_rate() {
        let n = 60usize;
        let (sys, model) = hahn_setup(1.0, 1.0, 0.4, n);
        let k = 24usize;
        let exact = sys.zeros(k).unwrap();
        let exact_f: Vec<f64> = exact.iter().map(|z| z.to_f64()).collect();
        let predicted = predicted_band_zeros(&model).unwrap();
        let mut worst = 0.0f64;
        let mut matched = 0;
        for p in &predicted {
            let mut best = f64::INFINITY;
            for e in &exact_f {
                best = best.min((p - e).abs());
            }
            worst = worst.max(best);
            if best < 2.0 / (n as f64) {
                matched += 1;
            }
        }
        assert!(matched == predicted.len(), "unmatched model zeros");
        assert!(
            worst < 20.0 / (n as f64 * n as f64),
            "worst distance {worst} vs D/N² bound"
        );
    }

    #[test]
    fn confinement_in_saturated_region() {
        let n = 40usize;
        let c = 0.5;
        let (sys, model) = hahn_setup(1.0, 5.0, c, n);
        let k = 20usize;
        let rep = saturated_zero_pairing(&sys, &model.measure, k, 0.3).unwrap();
        assert!(!rep.pairs.is_empty());
        assert!(rep.ordering_ok, "one-sided ordering violated: {:?}", rep.pairs);
        assert!(rep.max_abs_dist < 1e-2);
    }

    #[test]
    fn no_saturated_region_empty_report() {
        let n = 30usize;
        // VBV configuration: c < c_A
        let (sys, model) = hahn_setup(3.0, 7.0, 0.2, n);
        let rep = saturated_zero_pairing(&sys, &model.measure, 6, 0.3).unwrap();
        assert!(rep.pairs.is_empty() && rep.ordering_ok);
    }

    #[test]
    fn recurrence_prediction_converges() {
        let mut scaled_a = Vec::new();
        let mut scaled_b = Vec::new();
        let mut gamma_gap = Vec::new();
        for &n in &[40usize, 80] {
            let (sys, model) = hahn_setup(3.0, 7.0, 0.5, n);
            let k = n / 2;
            let pred = predicted_recurrence(&model);
            let a_err = (sys.a_coeffs[k].to_f64() - pred.a_k).abs();
            let b_err = (sys.b_coeffs[k - 1].to_f64() - pred.b_km1).abs();
            scaled_a.push(a_err * n as f64);
            scaled_b.push(b_err * n as f64);
            let lg = sys.gamma[k].to_f64().ln() * 2.0;
            gamma_gap.push((lg - pred.log_gamma_sq_k).abs() * n as f64);
        }
        assert!(scaled_a[1] < 2.0 * scaled_a[0] + 0.5, "{scaled_a:?}");
        assert!(scaled_b[1] < 2.0 * scaled_b[0] + 0.5, "{scaled_b:?}");
        assert!(gamma_gap[1] < 2.0 * gamma_gap[0] + 0.5, "{gamma_gap:?}");
    }

    #[test]
    fn symmetric_krawtchouk_predicted_a_is_half() {
        let c = 0.4;
        let m = crate::equilibrium::krawtchouk_equilibrium(0.5, 0.5, c).unwrap();
        let phi: RealFn = Arc::new(crate::equilibrium::uniform_log_potential);
        let eta: RealFn = Arc::new(|_| 0.0);
        let etap: RealFn = Arc::new(|_| 0.0);
        let model = build_outer_model(&m, phi, eta, etap, 0.0, 50).unwrap();
        let pred = predicted_recurrence(&model);
        assert!((pred.a_k - 0.5).abs() < 1e-7);
    }

    #[test]
    fn overlap_band_vs_airy() {
        // just inside the band near the Airy disc, both formulas apply and
        // their gap decays with N
        let mut gaps = Vec::new();
        for &n in &[60usize, 120, 240] {
            let (_sys, model) = hahn_setup(3.0, 7.0, 0.5, n);
            let beta = model.beta;
            let x = beta - 3.0 * (n as f64).powf(-2.0 / 3.0) * model.band_width();
            let band = approx_pi(&model, RegionTag::Band, Complex64::new(x, 0.0)).unwrap();
            let airy = approx_pi(
                &model,
                RegionTag::AiryEdge(EdgeSide::Right, GapType::Void),
                Complex64::new(x, 0.0),
            )
            .unwrap();
            let v1 = band.factor.re * (band.log_scale - airy.log_scale).exp();
            let v2 = airy.factor.re;
            let denom = v2.abs().max(1e-8);
            gaps.push((v1 - v2).abs() / denom);
        }
        assert!(gaps[2] < gaps[0] + 0.05, "overlap gaps {gaps:?}");
        assert!(gaps[2] < 0.5, "overlap gap too large: {gaps:?}");
    }
}
