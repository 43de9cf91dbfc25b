//! Constrained equilibrium measures: the closed-form Hahn solution, one-band
//! endpoint equations for general fields (Krawtchouk included), a projected
//! gradient solver for the discretized energy, variational verification, and
//! the particle-hole dual measure.

use crate::error::{Error, Result};
use crate::lattice::{Family, RealFn, WeightFamily};
use crate::quad::{adaptive, gauss_chebyshev, gauss_legendre, integrate_log_singular};
use std::io::Write;
use std::sync::Arc;

/// Gap classification: lower constraint active (void) or upper (saturated).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum GapType {
    Void,
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureSource {
    HahnClosedForm,
    KrawtchoukEndpoint,
    NumericalQp,
    Dual,
}

/// Hahn equilibrium configuration (for parameters with A ≤ B, plus the
/// reflected case).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HahnConfig {
    VoidBandVoid,
    SaturatedBandVoid,
    VoidBandSaturated,
    SaturatedBandSaturated,
}

/// Closed-form handle for the Hahn equilibrium density.
#[derive(Clone, Debug)]
pub struct HahnClosedForm {
    pub a_param: f64,
    pub b_param: f64,
    pub c: f64,
    pub config: HahnConfig,
    pub alpha: f64,
    pub beta: f64,
    /// k1..k4 of the arctan representation (in the A ≤ B frame).
    pub k: [f64; 4],
    /// Density was built in the (B, A) frame and reflected through x ↦ 1−x.
    pub swapped: bool,
}

/// Minimizer of the constrained logarithmic energy.
#[derive(Clone)]
pub struct EquilibriumMeasure {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    /// Band intervals (α_j, β_j), ordered and disjoint.
    pub bands: Vec<(f64, f64)>,
    /// Gap types, one per gap: (a,α_0), (β_0,α_1), ..., (β_G,b).
    pub gap_types: Vec<GapType>,
    /// Lagrange multiplier (Robin constant).
    pub ell_c: f64,
    /// Full-domain density dμ/dx (0 on voids, ρ⁰/c on saturated regions).
    pub psi: RealFn,
    pub rho0: RealFn,
    pub grid_x: Vec<f64>,
    pub grid_density: Vec<f64>,
    pub source: MeasureSource,
    pub hahn: Option<HahnClosedForm>,
}

impl std::fmt::Debug for EquilibriumMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EquilibriumMeasure")
            .field("c", &self.c)
            .field("bands", &self.bands)
            .field("gap_types", &self.gap_types)
            .field("ell_c", &self.ell_c)
            .field("source", &self.source)
            .finish()
    }
}

impl EquilibriumMeasure {
    pub fn density_at(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    /// ρ⁰(x)/c − ψ(x), the complementary density.
    pub fn psi_bar_at(&self, x: f64) -> f64 {
        (self.rho0)(x) / self.c - (self.psi)(x)
    }

    /// μ([x, b]).
    pub fn mass_above(&self, x: f64) -> Result<f64> {
        let psi = self.psi.clone();
        if x >= self.b {
            return Ok(0.0);
        }
        let lo = x.max(self.a);
        adaptive(move |t| psi(t), lo, self.b, 1e-11)
    }

    pub fn total_mass(&self) -> Result<f64> {
        self.mass_above(self.a)
    }

    /// Checks membership of x in a band; returns the band index.
    pub fn band_containing(&self, x: f64) -> Option<usize> {
        self.bands.iter().position(|&(al, be)| x > al && x < be)
    }

    /// The gap intervals, in order, parallel to `gap_types`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.bands.len() + 1);
        let mut lo = self.a;
        for &(al, be) in &self.bands {
            out.push((lo, al));
            lo = be;
        }
        out.push((lo, self.b));
        out
    }

    /// CSV rows (x, density, constraint_lo, constraint_hi, region_tag).
    pub fn write_csv<W: Write>(&self, mut out: W, points: usize) -> Result<()> {
        writeln!(out, "# dopasym equilibrium c={} source={:?}", self.c, self.source)?;
        writeln!(out, "x,density,constraint_lo,constraint_hi,region")?;
        for i in 0..points {
            let x = self.a + (self.b - self.a) * (i as f64 + 0.5) / points as f64;
            let region = if self.band_containing(x).is_some() {
                "band"
            } else {
                let gaps = self.gaps();
                let gi = gaps
                    .iter()
                    .position(|&(lo, hi)| x >= lo && x <= hi)
                    .unwrap_or(0);
                match self.gap_types[gi] {
                    GapType::Void => "void",
                    GapType::Saturated => "saturated",
                }
            };
            writeln!(
                out,
                "{:.17e},{:.17e},0,{:.17e},{}",
                x,
                self.density_at(x),
                (self.rho0)(x) / self.c,
                region
            )?;
        }
        Ok(())
    }
}

/// External field φ(x) = V(x) + ∫ log|x−y| ρ⁰(y) dy.
///
/// For ρ⁰ ≡ 1 on (0,1) the log-potential has the closed form
/// x log x + (1−x) log(1−x) − 1.
pub fn external_field(w: &WeightFamily) -> RealFn {
    let v = w.v.clone();
    let ns = &w.node_set;
    if ns.is_uniform() {
        Arc::new(move |x: f64| v(x) + uniform_log_potential(x))
    } else {
        let rho0 = ns.rho0.clone();
        let (a, b) = (ns.a, ns.b);
        Arc::new(move |x: f64| {
            let r = rho0.clone();
            let pot = integrate_log_singular(&move |y| r(y), x, a, b, 1e-12)
                .expect("log-potential quadrature failed");
            v(x) + pot
        })
    }
}

/// ∫_0^1 log|x−y| dy = x log x + (1−x) log(1−x) − 1, continuous at 0 and 1.
pub fn uniform_log_potential(x: f64) -> f64 {
    let t = |u: f64| if u <= 0.0 { 0.0 } else { u * u.ln() };
    t(x) + t(1.0 - x) - 1.0
}

/// Hahn external field (valid for any A, B > 0).
pub fn hahn_field(x: f64, a: f64, b: f64) -> f64 {
    crate::lattice::hahn_v_limit(x, a, b) + uniform_log_potential(x)
}

/// The exceptional thresholds c_A, c_B of the Hahn family.
pub fn hahn_c_thresholds(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (
        (-s + (s * s + 4.0 * a).sqrt()) / 2.0,
        (-s + (s * s + 4.0 * b).sqrt()) / 2.0,
    )
}

/// Hahn band endpoints (α, β) for A, B ≥ 0 and c in (0,1). The smaller root
/// comes from the product of the roots to avoid cancellation when α is tiny.
pub fn hahn_endpoints(a: f64, b: f64, c: f64) -> (f64, f64) {
    let d = c * (1.0 - c) * (a + c) * (b + c) * (a + b + c) * (a + b + c + 1.0);
    let den = (a + b + 2.0 * c).powi(2);
    let num = (b - a + 2.0) * c * c + (a + b) * (b - a + 2.0) * c + a * (a + b);
    let beta = (num + 2.0 * d.sqrt()) / den;
    // αβ = ((c² + (A+B)c − A)/(A+B+2c))², so the small root never suffers
    // cancellation against 2√D
    let t = c * c + (a + b) * c - a;
    let alpha = (t * t / den) / beta;
    (alpha, beta)
}

const EXCEPTIONAL_RADIUS: f64 = 1e-9;

/// Closed-form constrained equilibrium measure for the Hahn weight.
pub fn hahn_equilibrium(a_param: f64, b_param: f64, c: f64) -> Result<EquilibriumMeasure> {
    if a_param <= 0.0 || b_param <= 0.0 || !(0.0 < c && c < 1.0) {
        return Err(Error::BadParams(format!(
            "need A,B > 0 and 0 < c < 1; got A={a_param}, B={b_param}, c={c}"
        )));
    }
    let (c_a, c_b) = hahn_c_thresholds(a_param, b_param);
    if (c - c_a).abs() < EXCEPTIONAL_RADIUS || (c - c_b).abs() < EXCEPTIONAL_RADIUS {
        return Err(Error::ExceptionalC { c, radius: EXCEPTIONAL_RADIUS });
    }
    if a_param <= b_param {
        hahn_equilibrium_ordered(a_param, b_param, c)
    } else {
        // x ↦ 1−x, A ↔ B symmetry; the field changes by a constant absorbed in ℓ_c
        let base = hahn_equilibrium_ordered(b_param, a_param, c)?;
        let (alpha, beta) = (1.0 - base.bands[0].1, 1.0 - base.bands[0].0);
        let psi_base = base.psi.clone();
        let psi: RealFn = Arc::new(move |x: f64| psi_base(1.0 - x));
        // Δ = φ_{A,B}(x) − φ_{B,A}(1−x), constant in x
        let x0 = 0.5 * (alpha + beta);
        let delta = hahn_field(x0, a_param, b_param) - hahn_field(1.0 - x0, b_param, a_param);
        let ell_c = base.ell_c + delta;
        let gap_types = vec![base.gap_types[1], base.gap_types[0]];
        let mut hahn = base.hahn.clone().unwrap();
        hahn.a_param = a_param;
        hahn.b_param = b_param;
        hahn.swapped = true;
        hahn.alpha = alpha;
        hahn.beta = beta;
        hahn.config = match hahn.config {
            HahnConfig::SaturatedBandVoid => HahnConfig::VoidBandSaturated,
            other => other,
        };
        let (grid_x, grid_density) = sample_grid(&psi, 0.0, 1.0, 1024);
        let rho0: RealFn = Arc::new(|_| 1.0);
        Ok(EquilibriumMeasure {
            c,
            a: 0.0,
            b: 1.0,
            bands: vec![(alpha, beta)],
            gap_types,
            ell_c,
            psi,
            rho0,
            grid_x,
            grid_density,
            source: MeasureSource::HahnClosedForm,
            hahn: Some(hahn),
        })
    }
}

fn sample_grid(psi: &RealFn, a: f64, b: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..m).map(|i| a + (b - a) * (i as f64 + 0.5) / m as f64).collect();
    let ds = xs.iter().map(|&x| psi(x)).collect();
    (xs, ds)
}

/// Signs of the four arctan terms per configuration, order (k1, k2, k3, k4).
fn hahn_signs(config: HahnConfig) -> [f64; 4] {
    match config {
        HahnConfig::VoidBandVoid => [-1.0, 1.0, 1.0, -1.0],
        HahnConfig::SaturatedBandVoid => [-1.0, 1.0, 1.0, 1.0],
        // only reachable through the A > B reflection of SBV
        HahnConfig::VoidBandSaturated => [-1.0, 1.0, 1.0, 1.0],
        HahnConfig::SaturatedBandSaturated => [-1.0, -1.0, 1.0, 1.0],
    }
}

fn hahn_equilibrium_ordered(a_param: f64, b_param: f64, c: f64) -> Result<EquilibriumMeasure> {
    let (c_a, c_b) = hahn_c_thresholds(a_param, b_param);
    let (alpha, beta) = hahn_endpoints(a_param, b_param, c);
    let config = if c < c_a {
        HahnConfig::VoidBandVoid
    } else if c < c_b {
        HahnConfig::SaturatedBandVoid
    } else {
        HahnConfig::SaturatedBandSaturated
    };
    let k = [
        ((1.0 + b_param - alpha) / (1.0 + b_param - beta)).sqrt(),
        ((1.0 - alpha) / (1.0 - beta)).sqrt(),
        ((a_param + alpha) / (a_param + beta)).sqrt(),
        (alpha / beta).sqrt(),
    ];
    let signs = hahn_signs(config);
    let de_base = if config == HahnConfig::SaturatedBandSaturated {
        1.0 / c
    } else {
        0.0
    };
    let (al, be) = (alpha, beta);
    let cc = c;
    let band_density = move |x: f64| -> f64 {
        let t = ((be - x) / (x - al)).sqrt();
        let mut s = 0.0;
        for j in 0..4 {
            s += signs[j] * (k[j] * t).atan();
        }
        de_base + s / (std::f64::consts::PI * cc)
    };
    let gap_types = match config {
        HahnConfig::VoidBandVoid => vec![GapType::Void, GapType::Void],
        HahnConfig::SaturatedBandVoid => vec![GapType::Saturated, GapType::Void],
        HahnConfig::VoidBandSaturated => vec![GapType::Void, GapType::Saturated],
        HahnConfig::SaturatedBandSaturated => {
            vec![GapType::Saturated, GapType::Saturated]
        }
    };
    let left_sat = gap_types[0] == GapType::Saturated;
    let right_sat = gap_types[1] == GapType::Saturated;
    let psi: RealFn = Arc::new(move |x: f64| {
        if x <= al {
            if left_sat {
                1.0 / cc
            } else {
                0.0
            }
        } else if x >= be {
            if right_sat {
                1.0 / cc
            } else {
                0.0
            }
        } else {
            band_density(x)
        }
    });

    // Lagrange multiplier: (β−α){[log(β−α)−1]K1 − 2 log2 K2 + 2 K3} + φ(β) + extra
    let kc = |f: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.0;
        for j in 0..4 {
            s += signs[j] * f(k[j]);
        }
        -s // the K-constants carry the opposite signs of the density terms
    };
    let k1 = kc(&|kj| kj / (1.0 + kj));
    let k2 = kc(&|kj| kj / (1.0 - kj * kj));
    let k3 = kc(&|kj| (1.0 + kj).ln() / (1.0 - kj * kj));
    let w = beta - alpha;
    let extra = match config {
        HahnConfig::VoidBandVoid => 0.0,
        HahnConfig::SaturatedBandVoid => 2.0 * w * w.ln() + 2.0 * alpha - 2.0 * beta * beta.ln(),
        HahnConfig::VoidBandSaturated => unreachable!("A <= B frame"),
        HahnConfig::SaturatedBandSaturated => {
            2.0 - 2.0 * beta * beta.ln() - 2.0 * (1.0 - beta) * (1.0 - beta).ln()
        }
    };
    let ell_c = w * ((w.ln() - 1.0) * k1 - 2.0 * 2.0_f64.ln() * k2 + 2.0 * k3)
        + hahn_field(beta, a_param, b_param)
        + extra;

    let (grid_x, grid_density) = sample_grid(&psi, 0.0, 1.0, 1024);
    let rho0: RealFn = Arc::new(|_| 1.0);
    Ok(EquilibriumMeasure {
        c,
        a: 0.0,
        b: 1.0,
        bands: vec![(alpha, beta)],
        gap_types,
        ell_c,
        psi,
        rho0,
        grid_x,
        grid_density,
        source: MeasureSource::HahnClosedForm,
        hahn: Some(HahnClosedForm {
            a_param,
            b_param,
            c,
            config,
            alpha,
            beta,
            k,
            swapped: false,
        }),
    })
}

/// One-band ansatz moment conditions for a field derivative on (0,1):
/// M0 = (1/2π)∫_band φ'/w dy − S_L ∫_0^α dy/w + S_R ∫_β^1 dy/w,
/// M1 = (1/2π)∫_band yφ'/w dy − S_L ∫_0^α y dy/w + S_R ∫_β^1 y dy/w − c,
/// where w is the square-root weight appropriate to each interval.
fn one_band_moments(
    phi_prime: &dyn Fn(f64) -> f64,
    alpha: f64,
    beta: f64,
    sat_left: bool,
    sat_right: bool,
    c: f64,
) -> (f64, f64) {
    let n_cheb = 200;
    let m0_band =
        gauss_chebyshev(|y| phi_prime(y), alpha, beta, n_cheb) / (2.0 * std::f64::consts::PI);
    let m1_band =
        gauss_chebyshev(|y| y * phi_prime(y), alpha, beta, n_cheb) / (2.0 * std::f64::consts::PI);
    // gap integrals with the substitution u = sqrt(dist to the near edge)
    let gl = gauss_legendre(60);
    let left = |weight_y: bool| -> f64 {
        if alpha <= 0.0 {
            return 0.0;
        }
        let umax = alpha.sqrt();
        let mut acc = 0.0;
        for (t, w) in gl.0.iter().zip(gl.1.iter()) {
            let u = 0.5 * umax * (t + 1.0);
            let y = alpha - u * u;
            let f = 2.0 / (beta - y).sqrt();
            acc += w * 0.5 * umax * f * if weight_y { y } else { 1.0 };
        }
        acc
    };
    let right = |weight_y: bool| -> f64 {
        if beta >= 1.0 {
            return 0.0;
        }
        let umax = (1.0 - beta).sqrt();
        let mut acc = 0.0;
        for (t, w) in gl.0.iter().zip(gl.1.iter()) {
            let u = 0.5 * umax * (t + 1.0);
            let y = beta + u * u;
            let f = 2.0 / (y - alpha).sqrt();
            acc += w * 0.5 * umax * f * if weight_y { y } else { 1.0 };
        }
        acc
    };
    let mut m0 = m0_band;
    let mut m1 = m1_band - c;
    if sat_left {
        m0 -= left(false);
        m1 -= left(true);
    }
    if sat_right {
        m0 += right(false);
        m1 += right(true);
    }
    (m0, m1)
}

/// Solves the one-band endpoint equations by a coarse scan plus damped Newton.
pub fn solve_one_band_endpoints(
    phi_prime: &dyn Fn(f64) -> f64,
    sat_left: bool,
    sat_right: bool,
    c: f64,
) -> Result<(f64, f64)> {
    let obj = |al: f64, be: f64| -> f64 {
        let (m0, m1) = one_band_moments(phi_prime, al, be, sat_left, sat_right, c);
        m0 * m0 + m1 * m1
    };
    let mut best = (0.25, 0.75, f64::INFINITY);
    for i in 1..40 {
        let s = i as f64 / 40.0;
        for j in 1..40 {
            let dmax = s.min(1.0 - s);
            let d = dmax * j as f64 / 40.5;
            let (al, be) = (s - d, s + d);
            if al <= 1e-6 || be >= 1.0 - 1e-6 {
                continue;
            }
            let v = obj(al, be);
            if v < best.2 {
                best = (al, be, v);
            }
        }
    }
    let (mut al, mut be, _) = best;
    for _ in 0..200 {
        let (m0, m1) = one_band_moments(phi_prime, al, be, sat_left, sat_right, c);
        if m0.abs() + m1.abs() < 1e-13 {
            break;
        }
        let h = 1e-7;
        let (m0a, m1a) = one_band_moments(phi_prime, al + h, be, sat_left, sat_right, c);
        let (m0b, m1b) = one_band_moments(phi_prime, al, be + h, sat_left, sat_right, c);
        let j00 = (m0a - m0) / h;
        let j01 = (m0b - m0) / h;
        let j10 = (m1a - m1) / h;
        let j11 = (m1b - m1) / h;
        let det = j00 * j11 - j01 * j10;
        if det.abs() < 1e-18 {
            return Err(Error::NoConvergence("singular Jacobian in endpoint Newton".into()));
        }
        let full_da = -(j11 * m0 - j01 * m1) / det;
        let full_db = -(-j10 * m0 + j00 * m1) / det;
        let cur = m0 * m0 + m1 * m1;
        let mut lam = 1.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for _ in 0..60 {
            let (na, nb) = (al + lam * full_da, be + lam * full_db);
            if na > 1e-9 && nb < 1.0 - 1e-9 && na < nb && obj(na, nb) <= cur {
                da = lam * full_da;
                db = lam * full_db;
                break;
            }
            lam *= 0.5;
        }
        al += da;
        be += db;
        if da.abs() + db.abs() < 1e-15 {
            break;
        }
    }
    let (m0, m1) = one_band_moments(phi_prime, al, be, sat_left, sat_right, c);
    if m0.abs() + m1.abs() > 1e-9 {
        return Err(Error::NoConvergence(format!(
            "endpoint residual {:.3e}",
            m0.abs() + m1.abs()
        )));
    }
    Ok((al, be))
}

/// Band density for a general one-band measure on (0,1):
/// ψ(x) = (ρ(x)/2π²c)[∫ (φ'(y)−φ'(x))/((y−x) ρ(y)) dy + 2π(S_L K_L + S_R K_R)]
/// with ρ(x) = sqrt((x−α)(β−x)).
fn one_band_density(
    phi_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    alpha: f64,
    beta: f64,
    sat_left: bool,
    sat_right: bool,
    c: f64,
) -> RealFn {
    let gl = gauss_legendre(80);
    Arc::new(move |x: f64| {
        if x <= alpha {
            return if sat_left { 1.0 / c } else { 0.0 };
        }
        if x >= beta {
            return if sat_right { 1.0 / c } else { 0.0 };
        }
        let rho = ((x - alpha) * (beta - x)).sqrt();
        let fx = phi_prime(x);
        // PV∫ g(x)/((y−x)ρ(y)) dy vanishes, so only the smooth difference
        // quotient remains; the Chebyshev rule absorbs the 1/ρ weight.
        let p = gauss_chebyshev(
            |y| {
                if (y - x).abs() < 1e-12 {
                    (phi_prime(x + 1e-6) - phi_prime(x - 1e-6)) / 2e-6
                } else {
                    (phi_prime(y) - fx) / (y - x)
                }
            },
            alpha,
            beta,
            240,
        );
        let mut gaps = 0.0;
        if sat_left && alpha > 0.0 {
            let umax = alpha.sqrt();
            let mut acc = 0.0;
            for (t, w) in gl.0.iter().zip(gl.1.iter()) {
                let u = 0.5 * umax * (t + 1.0);
                let y = alpha - u * u;
                acc += w * 0.5 * umax * 2.0 / ((beta - y).sqrt() * (x - y));
            }
            gaps += acc;
        }
        if sat_right && beta < 1.0 {
            let umax = (1.0 - beta).sqrt();
            let mut acc = 0.0;
            for (t, w) in gl.0.iter().zip(gl.1.iter()) {
                let u = 0.5 * umax * (t + 1.0);
                let y = beta + u * u;
                acc += w * 0.5 * umax * 2.0 / ((y - alpha).sqrt() * (y - x));
            }
            gaps += acc;
        }
        rho / (2.0 * std::f64::consts::PI * std::f64::consts::PI * c)
            * (p + 2.0 * std::f64::consts::PI * gaps)
    })
}

/// Krawtchouk gap configuration and endpoints by the one-band moment
/// conditions applied to φ'(x) = log(q/p) + log(x/(1−x)).
pub fn krawtchouk_endpoints(p: f64, q: f64, c: f64) -> Result<(f64, f64, [GapType; 2])> {
    if p <= 0.0 || q <= 0.0 || !(0.0 < c && c < 1.0) {
        return Err(Error::BadParams(format!("need p,q > 0, 0<c<1; got p={p}, q={q}, c={c}")));
    }
    let ph = p / (p + q);
    let qh = q / (p + q);
    if (c - ph).abs() < EXCEPTIONAL_RADIUS || (c - qh).abs() < EXCEPTIONAL_RADIUS {
        return Err(Error::ExceptionalC { c, radius: EXCEPTIONAL_RADIUS });
    }
    let l = (q / p).ln();
    let phi_prime = move |x: f64| l + (x / (1.0 - x)).ln();
    let (lo, hi) = (ph.min(qh), ph.max(qh));
    let (sat_left, sat_right) = if c < lo {
        (false, false)
    } else if c > hi {
        (true, true)
    } else if ph <= qh {
        // p ≤ q: the saturated region grows from the left
        (true, false)
    } else {
        (false, true)
    };
    let (alpha, beta) = solve_one_band_endpoints(&phi_prime, sat_left, sat_right, c)?;
    let types = [
        if sat_left { GapType::Saturated } else { GapType::Void },
        if sat_right { GapType::Saturated } else { GapType::Void },
    ];
    Ok((alpha, beta, types))
}

/// Full Krawtchouk equilibrium measure (endpoints + band density + ℓ_c).
pub fn krawtchouk_equilibrium(p: f64, q: f64, c: f64) -> Result<EquilibriumMeasure> {
    let (alpha, beta, types) = krawtchouk_endpoints(p, q, c)?;
    let l = (q / p).ln();
    let phi_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
        Arc::new(move |x: f64| l + (x / (1.0 - x)).ln());
    let sat_left = types[0] == GapType::Saturated;
    let sat_right = types[1] == GapType::Saturated;
    let psi = one_band_density(phi_prime, alpha, beta, sat_left, sat_right, c);
    let (grid_x, grid_density) = sample_grid(&psi, 0.0, 1.0, 1024);
    let rho0: RealFn = Arc::new(|_| 1.0);
    let mut m = EquilibriumMeasure {
        c,
        a: 0.0,
        b: 1.0,
        bands: vec![(alpha, beta)],
        gap_types: types.to_vec(),
        ell_c: 0.0,
        psi,
        rho0,
        grid_x,
        grid_density,
        source: MeasureSource::KrawtchoukEndpoint,
        hahn: None,
    };
    let phi: RealFn = Arc::new(move |x: f64| l * x + uniform_log_potential(x));
    let mid = 0.5 * (alpha + beta);
    m.ell_c = variational_derivative(&m, &phi, c, mid)?;
    Ok(m)
}

/// δE_c/δμ(x) = −2c ∫ log|x−y| dμ(y) + φ(x), by singularity-splitting quadrature.
pub fn variational_derivative(
    m: &EquilibriumMeasure,
    phi: &RealFn,
    c: f64,
    x: f64,
) -> Result<f64> {
    let mut log_int = 0.0;
    for &(al, be) in &m.bands {
        let psi = m.psi.clone();
        log_int += integrate_log_singular(&move |y| psi(y), x, al, be, 1e-11)?;
    }
    for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
        if m.gap_types[gi] == GapType::Saturated && hi > lo {
            let rho0 = m.rho0.clone();
            let cc = m.c;
            log_int += integrate_log_singular(&move |y| rho0(y) / cc, x, lo, hi, 1e-11)?;
        }
    }
    Ok(-2.0 * c * log_int + phi(x))
}

/// Residuals and margins of the equilibrium variational conditions.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VariationalReport {
    /// max |δE_c/δμ − ℓ_c| over the band grid.
    pub band_residual: f64,
    /// min (δE_c/δμ − ℓ_c) over void grids (+∞ if no voids).
    pub void_margin: f64,
    /// min (ℓ_c − δE_c/δμ) over saturated grids (+∞ if none).
    pub sat_margin: f64,
}

/// Evaluates the variational conditions on interior verification grids.
pub fn verify_variational(
    m: &EquilibriumMeasure,
    phi: &RealFn,
    c: f64,
) -> Result<VariationalReport> {
    let mut band_residual: f64 = 0.0;
    for &(al, be) in &m.bands {
        for i in 0..15 {
            let x = al + (be - al) * (0.06 + 0.88 * i as f64 / 14.0);
            let de = variational_derivative(m, phi, c, x)?;
            band_residual = band_residual.max((de - m.ell_c).abs());
        }
    }
    let mut void_margin = f64::INFINITY;
    let mut sat_margin = f64::INFINITY;
    for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
        if hi - lo < 1e-12 {
            continue;
        }
        for i in 0..7 {
            let x = lo + (hi - lo) * (0.12 + 0.76 * i as f64 / 6.0);
            let de = variational_derivative(m, phi, c, x)?;
            match m.gap_types[gi] {
                GapType::Void => void_margin = void_margin.min(de - m.ell_c),
                GapType::Saturated => sat_margin = sat_margin.min(m.ell_c - de),
            }
        }
    }
    Ok(VariationalReport {
        band_residual,
        void_margin,
        sat_margin,
    })
}

/// Particle-hole dual: dμ̄/dx = (ρ⁰ − c dμ/dx)/(1−c) at parameter 1−c, with
/// voids and saturated regions exchanged and ℓ_{1−c} = −ℓ_c.
pub fn dual_measure(m: &EquilibriumMeasure) -> EquilibriumMeasure {
    let c = m.c;
    let cbar = 1.0 - c;
    let psi = m.psi.clone();
    let rho0 = m.rho0.clone();
    let psi_bar: RealFn = Arc::new(move |x: f64| (rho0(x) - c * psi(x)) / cbar);
    let gap_types = m
        .gap_types
        .iter()
        .map(|g| match g {
            GapType::Void => GapType::Saturated,
            GapType::Saturated => GapType::Void,
        })
        .collect();
    let (grid_x, grid_density) = sample_grid(&psi_bar, m.a, m.b, m.grid_x.len().max(64));
    EquilibriumMeasure {
        c: cbar,
        a: m.a,
        b: m.b,
        bands: m.bands.clone(),
        gap_types,
        ell_c: -m.ell_c,
        psi: psi_bar,
        rho0: m.rho0.clone(),
        grid_x,
        grid_density,
        source: MeasureSource::Dual,
        hahn: None,
    }
}

/// Square-root edge coefficient lim density/√dist at a band edge, by
/// Richardson extrapolation; `inward` is +1 at a left edge, −1 at a right edge.
pub fn edge_sqrt_coeff_numeric(
    density: &dyn Fn(f64) -> f64,
    edge: f64,
    inward: f64,
    band_width: f64,
) -> f64 {
    let d1 = 1e-4 * band_width;
    let d2 = d1 / 4.0;
    let b1 = density(edge + inward * d1) / d1.sqrt();
    let b2 = density(edge + inward * d2) / d2.sqrt();
    (4.0 * b2 - b1) / 3.0
}

/// Analytic square-root edge coefficient for a Hahn closed-form measure:
/// the positive B with ψ ≈ B √dist at a void-adjacent edge (`for_psi_bar` =
/// false) or ψ̄ ≈ B √dist at a saturated-adjacent edge (`for_psi_bar` = true).
pub fn hahn_edge_coeff(h: &HahnClosedForm, left_edge: bool, for_psi_bar: bool) -> f64 {
    if h.swapped {
        let mut base = h.clone();
        base.swapped = false;
        std::mem::swap(&mut base.a_param, &mut base.b_param);
        base.alpha = 1.0 - h.beta;
        base.beta = 1.0 - h.alpha;
        base.config = match h.config {
            HahnConfig::VoidBandSaturated => HahnConfig::SaturatedBandVoid,
            other => other,
        };
        return hahn_edge_coeff(&base, !left_edge, for_psi_bar);
    }
    let signs = hahn_signs(h.config);
    let w = h.beta - h.alpha;
    let coeff_psi = if left_edge {
        // atan(kT) = π/2 − (1/k)(1/T) + O(T^{-3}), 1/T = sqrt((x−α)/(β−x))
        let mut s = 0.0;
        for j in 0..4 {
            s -= signs[j] / h.k[j];
        }
        s / (std::f64::consts::PI * h.c * w.sqrt())
    } else {
        // atan(kT) ≈ kT, T = sqrt((β−x)/(x−α))
        let mut s = 0.0;
        for j in 0..4 {
            s += signs[j] * h.k[j];
        }
        s / (std::f64::consts::PI * h.c * w.sqrt())
    };
    if for_psi_bar {
        -coeff_psi
    } else {
        coeff_psi
    }
}

/// Discretized constrained energy minimization by projected gradient with a
/// monotone line search. Q_ij = −2c log|x_i−x_j| off-diagonal with the
/// midpoint-cell self-energy −2c(log(Δ/2)−1) on the diagonal; constraints
/// 0 ≤ m_i ≤ ρ⁰(x_i)Δ/c and Σ m_i = 1.
pub fn solve_equilibrium_qp(
    phi: &RealFn,
    rho0: &RealFn,
    a: f64,
    b: f64,
    c: f64,
    m_cells: usize,
) -> Result<EquilibriumMeasure> {
    if m_cells < 64 {
        return Err(Error::BadParams(format!("grid size {m_cells} < 64")));
    }
    let n = m_cells;
    let dx = (b - a) / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| a + dx * (i as f64 + 0.5)).collect();
    let phis: Vec<f64> = xs.iter().map(|&x| phi(x)).collect();
    let upper: Vec<f64> = xs.iter().map(|&x| rho0(x) * dx / c).collect();
    let mut q = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = if i == j {
                -2.0 * c * ((dx / 2.0).ln() - 1.0)
            } else {
                -2.0 * c * (xs[i] - xs[j]).abs().ln()
            };
        }
    }
    let qdot = |m: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            let row = &q[i * n..(i + 1) * n];
            for (j, mj) in m.iter().enumerate() {
                acc += row[j] * mj;
            }
            out[i] = acc;
        }
        out
    };
    let energy = |m: &[f64], qm: &[f64]| -> f64 {
        (0..n).map(|i| 0.5 * m[i] * qm[i] + phis[i] * m[i]).sum()
    };
    let project = |v: &[f64]| -> Vec<f64> {
        let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total = |lam: f64| -> f64 {
            v.iter()
                .zip(upper.iter())
                .map(|(&vi, &ui)| (vi - lam).clamp(0.0, ui))
                .sum()
        };
        while total(lo) < 1.0 {
            lo -= 1.0;
        }
        while total(hi) > 1.0 {
            hi += 1.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if total(mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lam = 0.5 * (lo + hi);
        v.iter()
            .zip(upper.iter())
            .map(|(&vi, &ui)| (vi - lam).clamp(0.0, ui))
            .collect()
    };
    let mut m: Vec<f64> = project(&upper.iter().map(|&u| 0.5 * u).collect::<Vec<_>>());
    let mut qm = qdot(&m);
    let mut e = energy(&m, &qm);
    let mut step = 1.0;
    let mut stall = 0usize;
    for _ in 0..6000 {
        let g: Vec<f64> = (0..n).map(|i| qm[i] + phis[i]).collect();
        let mut moved = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..n).map(|i| m[i] - step * g[i]).collect();
            let mp = project(&trial);
            let qmp = qdot(&mp);
            let ep = energy(&mp, &qmp);
            if ep <= e {
                let delta: f64 = (0..n).map(|i| (mp[i] - m[i]).abs()).sum();
                let improve = e - ep;
                m = mp;
                qm = qmp;
                e = ep;
                step *= 1.6;
                moved = true;
                if delta < 1e-13 || improve < 1e-15 * (1.0 + e.abs()) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            step *= 0.5;
        }
        if !moved || stall > 4 {
            break;
        }
    }
    // band detection: maximal runs strictly interior to both bounds
    let margin = 1e-6;
    let interior: Vec<bool> = (0..n)
        .map(|i| m[i] > margin * upper[i] && m[i] < upper[i] * (1.0 - margin))
        .collect();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if interior[i] {
            let start = i;
            while i < n && interior[i] {
                i += 1;
            }
            runs.push((start, i - 1));
        } else {
            i += 1;
        }
    }
    runs.retain(|&(s, t)| t - s + 1 >= 3);
    if runs.is_empty() {
        return Err(Error::DegenerateBandDetection);
    }
    let bands: Vec<(f64, f64)> = runs
        .iter()
        .map(|&(s, t)| (a + dx * s as f64, a + dx * (t + 1) as f64))
        .collect();
    let mut gap_types = Vec::new();
    let mut gap_cells: Vec<(usize, usize)> = Vec::new();
    let mut prev_end = 0usize;
    for &(s, t) in &runs {
        gap_cells.push((prev_end, s));
        prev_end = t + 1;
    }
    gap_cells.push((prev_end, n));
    for &(s, t) in &gap_cells {
        let mut sat_votes = 0usize;
        let mut tot = 0usize;
        for j in s..t {
            if !interior[j] {
                tot += 1;
                if m[j] >= upper[j] * 0.5 {
                    sat_votes += 1;
                }
            }
        }
        gap_types.push(if tot > 0 && sat_votes * 2 > tot {
            GapType::Saturated
        } else {
            GapType::Void
        });
    }
    // ℓ_c: trimmed mean of the discrete variational derivative over the band
    let g: Vec<f64> = (0..n).map(|i| qm[i] + phis[i]).collect();
    let (s0, t0) = runs[0];
    let trim = ((t0 - s0 + 1) / 10).max(1);
    let lo_i = s0 + trim;
    let hi_i = t0.saturating_sub(trim);
    let mut ell = 0.0;
    let mut cnt = 0usize;
    for gj in g.iter().take(hi_i + 1).skip(lo_i) {
        ell += gj;
        cnt += 1;
    }
    let ell_c = if cnt > 0 { ell / cnt as f64 } else { g[(s0 + t0) / 2] };
    let dens: Vec<f64> = m.iter().map(|&mi| mi / dx).collect();
    let xs_cl = xs.clone();
    let dens_cl = dens.clone();
    let psi: RealFn = Arc::new(move |x: f64| {
        if x <= xs_cl[0] {
            return dens_cl[0];
        }
        if x >= xs_cl[n - 1] {
            return dens_cl[n - 1];
        }
        let t = (x - xs_cl[0]) / dx;
        let j = (t.floor() as usize).min(n - 2);
        let frac = t - j as f64;
        dens_cl[j] * (1.0 - frac) + dens_cl[j + 1] * frac
    });
    Ok(EquilibriumMeasure {
        c,
        a,
        b,
        bands,
        gap_types,
        ell_c,
        psi,
        rho0: rho0.clone(),
        grid_x: xs,
        grid_density: dens,
        source: MeasureSource::NumericalQp,
        hahn: None,
    })
}

/// JSON summary (bands, gap types, ℓ_c, thresholds for Hahn).
#[derive(serde::Serialize)]
pub struct MeasureSummary {
    pub c: f64,
    pub bands: Vec<(f64, f64)>,
    pub gap_types: Vec<GapType>,
    pub ell_c: f64,
    pub c_a: Option<f64>,
    pub c_b: Option<f64>,
}

impl EquilibriumMeasure {
    pub fn summary(&self) -> MeasureSummary {
        let thresholds = self
            .hahn
            .as_ref()
            .map(|h| hahn_c_thresholds(h.a_param, h.b_param));
        MeasureSummary {
            c: self.c,
            bands: self.bands.clone(),
            gap_types: self.gap_types.clone(),
            ell_c: self.ell_c,
            c_a: thresholds.map(|t| t.0),
            c_b: thresholds.map(|t| t.1),
        }
    }
}

/// Equilibrium measure for a weight family, choosing the closed form when one
/// exists and the QP solver otherwise.
pub fn family_equilibrium(w: &WeightFamily, c: f64, qp_cells: usize) -> Result<EquilibriumMeasure> {
    match w.family {
        Family::Hahn { .. } => {
            let (a, b) = w.hahn_ab().unwrap();
            hahn_equilibrium(a, b, c)
        }
        Family::AssocHahn { .. } => {
            let (a, b) = w.hahn_ab().unwrap();
            // holes of the Hahn ensemble: dual of the Hahn measure at 1−c
            Ok(dual_measure(&hahn_equilibrium(a, b, 1.0 - c)?))
        }
        Family::Krawtchouk { p, q } => krawtchouk_equilibrium(p, q, c),
        Family::Custom => {
            let phi = external_field(w);
            solve_equilibrium_qp(
                &phi,
                &w.node_set.rho0.clone(),
                w.node_set.a,
                w.node_set.b,
                c,
                qp_cells,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_and_configuration() {
        let (c_a, c_b) = hahn_c_thresholds(3.0, 7.0);
        assert!((c_a - (-10.0 + 112.0_f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((c_b - (-10.0 + 128.0_f64.sqrt()) / 2.0).abs() < 1e-15);
        let m = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        assert_eq!(m.gap_types[0], GapType::Saturated);
        assert_eq!(m.gap_types[1], GapType::Void);
    }

    #[test]
    fn density_limits_at_edges() {
        let m = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let (al, be) = m.bands[0];
        assert!((m.density_at(al + 1e-9 * (be - al)) - 2.0).abs() < 1e-3);
        assert!(m.density_at(be - 1e-9 * (be - al)).abs() < 1e-3);
        for i in 1..20 {
            let x = al + (be - al) * i as f64 / 20.0;
            let d = m.density_at(x);
            assert!(d > 0.0 && d < 1.0 / m.c + 1e-12);
        }
    }

    #[test]
    fn hahn_normalization() {
        for &(a, b, c) in &[(3.0, 7.0, 0.2), (3.0, 7.0, 0.5), (3.0, 7.0, 0.9), (2.0, 2.0, 0.35)] {
            let m = hahn_equilibrium(a, b, c).unwrap();
            let mass = m.total_mass().unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "mass {mass} for c={c}");
        }
    }

    #[test]
    fn exceptional_c_rejected() {
        let (c_a, _) = hahn_c_thresholds(3.0, 7.0);
        assert!(matches!(
            hahn_equilibrium(3.0, 7.0, c_a),
            Err(Error::ExceptionalC { .. })
        ));
    }

    #[test]
    fn swap_symmetry() {
        let m1 = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let m2 = hahn_equilibrium(7.0, 3.0, 0.5).unwrap();
        for &x in &[0.2, 0.4, 0.55, 0.7, 0.9] {
            let d = (m1.density_at(x) - m2.density_at(1.0 - x)).abs();
            assert!(d < 1e-12, "x={x}: {d}");
        }
        assert_eq!(m2.gap_types[1], GapType::Saturated);
    }

    #[test]
    fn hahn_variational_consistency() {
        let a = 3.0;
        let b = 7.0;
        let c = 0.5;
        let m = hahn_equilibrium(a, b, c).unwrap();
        let phi: RealFn = Arc::new(move |x| hahn_field(x, a, b));
        let rep = verify_variational(&m, &phi, c).unwrap();
        assert!(
            rep.band_residual < 1e-6 * m.ell_c.abs(),
            "band residual {} vs ell {}",
            rep.band_residual,
            m.ell_c
        );
        assert!(rep.void_margin > 0.0);
        assert!(rep.sat_margin > 0.0);
    }

    #[test]
    fn perturbed_density_fails_variational() {
        let a = 3.0;
        let b = 7.0;
        let c = 0.5;
        let m = hahn_equilibrium(a, b, c).unwrap();
        let psi = m.psi.clone();
        let (al, be) = m.bands[0];
        let psi2: RealFn = Arc::new(move |x: f64| {
            if x > al && x < be {
                1.01 * psi(x)
            } else {
                psi(x)
            }
        });
        let mut m2 = m.clone();
        m2.psi = psi2;
        let phi: RealFn = Arc::new(move |x| hahn_field(x, a, b));
        let rep = verify_variational(&m2, &phi, c).unwrap();
        assert!(rep.band_residual > 1e-4 * m2.ell_c.abs());
    }

    #[test]
    fn dual_measure_involution_and_normalization() {
        let m = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let d = dual_measure(&m);
        assert!((d.total_mass().unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(d.gap_types[0], GapType::Void);
        assert!((d.ell_c + m.ell_c).abs() < 1e-14);
        let dd = dual_measure(&d);
        for &x in &[0.1, 0.3, 0.5, 0.8] {
            assert!((dd.density_at(x) - m.density_at(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_is_complementary_density() {
        let m = hahn_equilibrium(3.0, 7.0, 0.42).unwrap();
        let d = dual_measure(&m);
        for &x in &[0.15, 0.4, 0.6, 0.85] {
            let recon = (1.0 - m.c) * d.density_at(x) + m.c * m.density_at(x);
            assert!((recon - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn field_closed_form_at_half() {
        let v = uniform_log_potential(0.5);
        assert!((v - (-(2.0_f64.ln()) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn krawtchouk_symmetric_endpoints() {
        let (al, be, types) = krawtchouk_endpoints(0.5, 0.5, 0.4).unwrap();
        assert!((al + be - 1.0).abs() < 1e-8, "α+β = {}", al + be);
        // symmetric case has the known band edge 1/2 − sqrt(c(1−c))
        assert!((al - (0.5 - (0.4_f64 * 0.6).sqrt())).abs() < 1e-6, "α = {al}");
        assert_eq!(types[0], GapType::Void);
        let (_, _, types) = krawtchouk_endpoints(0.5, 0.5, 0.3).unwrap();
        assert_eq!(types, [GapType::Void, GapType::Void]);
        let (_, _, types) = krawtchouk_endpoints(0.5, 0.5, 0.7).unwrap();
        assert_eq!(types, [GapType::Saturated, GapType::Saturated]);
    }

    #[test]
    fn one_band_solver_reproduces_hahn_endpoints() {
        for &(a, b, c) in &[(3.0, 7.0, 0.2), (3.0, 7.0, 0.5), (3.0, 7.0, 0.95)] {
            let (alpha, beta) = hahn_endpoints(a, b, c);
            let (c_a, c_b) = hahn_c_thresholds(a, b);
            let (sl, sr) = (c > c_a, c > c_b);
            let phi_prime =
                move |x: f64| -((a + x).ln()) + (1.0 + b - x).ln() + (x / (1.0 - x)).ln();
            let (al2, be2) = solve_one_band_endpoints(&phi_prime, sl, sr, c).unwrap();
            assert!(
                (al2 - alpha).abs() < 1e-7 && (be2 - beta).abs() < 1e-7,
                "c={c}: ({al2},{be2}) vs ({alpha},{beta})"
            );
        }
    }

    #[test]
    fn general_band_density_matches_hahn_arctan() {
        let (a, b, c) = (3.0, 7.0, 0.5);
        let m = hahn_equilibrium(a, b, c).unwrap();
        let (alpha, beta) = m.bands[0];
        let phi_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
            Arc::new(move |x: f64| -((a + x).ln()) + (1.0 + b - x).ln() + (x / (1.0 - x)).ln());
        let psi = one_band_density(phi_prime, alpha, beta, true, false, c);
        for i in 1..10 {
            let x = alpha + (beta - alpha) * i as f64 / 10.0;
            let d = (psi(x) - m.density_at(x)).abs();
            assert!(d < 1e-6, "x={x}: {} vs {}", psi(x), m.density_at(x));
        }
    }

    #[test]
    fn krawtchouk_qp_cross_validation() {
        let (p, q, c) = (0.5, 0.5, 0.38);
        let (alpha, beta, _) = krawtchouk_endpoints(p, q, c).unwrap();
        let l = (q / p).ln();
        let phi: RealFn = Arc::new(move |x: f64| l * x + uniform_log_potential(x));
        let rho0: RealFn = Arc::new(|_| 1.0);
        let m = solve_equilibrium_qp(&phi, &rho0, 0.0, 1.0, c, 256).unwrap();
        let grid = 1.0 / 256.0;
        assert_eq!(m.bands.len(), 1);
        assert!((m.bands[0].0 - alpha).abs() < 3.0 * grid, "{} vs {alpha}", m.bands[0].0);
        assert!((m.bands[0].1 - beta).abs() < 3.0 * grid);
    }

    #[test]
    fn qp_matches_hahn_closed_form() {
        let (a, b, c) = (3.0, 7.0, 0.5);
        let exact = hahn_equilibrium(a, b, c).unwrap();
        let phi: RealFn = Arc::new(move |x| hahn_field(x, a, b));
        let rho0: RealFn = Arc::new(|_| 1.0);
        let m = 512;
        let qp = solve_equilibrium_qp(&phi, &rho0, 0.0, 1.0, c, m).unwrap();
        let dx = 1.0 / m as f64;
        let l1: f64 = qp
            .grid_x
            .iter()
            .zip(qp.grid_density.iter())
            .map(|(&x, &d)| (d - exact.density_at(x)).abs() * dx)
            .sum();
        assert!(l1 < 0.02, "L1 = {l1}");
        assert!((qp.bands[0].0 - exact.bands[0].0).abs() < 3.0 * dx);
        assert!((qp.bands[0].1 - exact.bands[0].1).abs() < 3.0 * dx);
        assert_eq!(qp.gap_types[0], GapType::Saturated);
        assert_eq!(qp.gap_types[1], GapType::Void);
        assert!(
            (qp.ell_c - exact.ell_c).abs() < 0.05 * exact.ell_c.abs().max(1.0),
            "ell {} vs {}",
            qp.ell_c,
            exact.ell_c
        );
    }

    #[test]
    fn edge_coeff_analytic_vs_numeric() {
        let m = hahn_equilibrium(3.0, 7.0, 0.5).unwrap();
        let h = m.hahn.as_ref().unwrap();
        let (al, be) = m.bands[0];
        let analytic = hahn_edge_coeff(h, false, false);
        let psi = m.psi.clone();
        let numeric = edge_sqrt_coeff_numeric(&move |x| psi(x), be, -1.0, be - al);
        assert!(
            ((analytic - numeric) / analytic).abs() < 1e-4,
            "{analytic} vs {numeric}"
        );
        let analytic_bar = hahn_edge_coeff(h, true, true);
        let m2 = m.clone();
        let numeric_bar = edge_sqrt_coeff_numeric(&move |x| m2.psi_bar_at(x), al, 1.0, be - al);
        assert!(
            ((analytic_bar - numeric_bar) / analytic_bar).abs() < 1e-4,
            "{analytic_bar} vs {numeric_bar}"
        );
    }
}
