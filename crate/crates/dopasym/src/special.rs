//! In-house special functions: Airy Ai/Bi with derivatives and the log-gamma
//! function, accurate to ~1e-13 on the ranges the asymptotic formulae need.

use rug::ops::Pow;
use rug::Float;

const SERIES_RADIUS: f64 = 9.0;
const SERIES_PREC: u32 = 384;

/// Airy values (Ai, Ai', Bi, Bi') at a real point.
#[derive(Clone, Copy, Debug)]
pub struct AiryValues {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

/// Airy functions of a real argument.
///
/// Maclaurin series summed in extended precision for |x| <= 9 (the two series
/// cancel to ~e^{18} on the positive axis, which double precision cannot
/// absorb), asymptotic expansions beyond.
pub fn airy(x: f64) -> AiryValues {
    if x.abs() <= SERIES_RADIUS {
        airy_series(x)
    } else if x > 0.0 {
        airy_asymptotic_pos(x)
    } else {
        airy_asymptotic_neg(-x)
    }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).ai
}

pub fn airy_bi(x: f64) -> f64 {
    airy(x).bi
}

fn airy_series(x: f64) -> AiryValues {
    let p = SERIES_PREC;
    let x3 = Float::with_val(p, x).square() * x;
    // f  = Σ a_k x^{3k},   a_{k+1}/a_k = 1/((3k+2)(3k+3))
    // g  = Σ b_k x^{3k+1}, b_{k+1}/b_k = 1/((3k+3)(3k+4))
    let mut f = Float::with_val(p, 1);
    let mut fp = Float::with_val(p, 0); // f' = Σ 3k a_k x^{3k-1}
    let mut g = Float::with_val(p, x);
    let mut gp = Float::with_val(p, 1); // g' = Σ (3k+1) b_k x^{3k}
    let mut ta = Float::with_val(p, 1); // a_k x^{3k}
    let mut tb = Float::with_val(p, x); // b_k x^{3k+1}
    let mut k = 0u64;
    loop {
        let ka = 3 * k + 2;
        let kb = 3 * k + 3;
        ta *= &x3;
        ta /= ka * kb;
        tb *= &x3;
        tb /= kb * (kb + 1);
        k += 1;
        f += &ta;
        g += &tb;
        // derivative terms: 3k·a_k x^{3k-1} and (3k+1)·b_k x^{3k}
        if x != 0.0 {
            fp += Float::with_val(p, &ta * (3 * k)) / x;
        }
        gp += Float::with_val(p, &tb * (3 * k + 1)) / x;
        if ta.clone().abs() < 1e-40 && tb.clone().abs() < 1e-40 && k > 4 {
            break;
        }
        if k > 400 {
            break;
        }
    }
    if x == 0.0 {
        fp = Float::with_val(p, 0);
        gp = Float::with_val(p, 1);
    }
    // c1 = Ai(0) = 3^{-2/3}/Γ(2/3), c2 = -Ai'(0) = 3^{-1/3}/Γ(1/3)
    let third = Float::with_val(p, 1) / 3u32;
    let c1 = Float::with_val(p, 3).pow(-Float::with_val(p, 2) / 3u32)
        / (Float::with_val(p, 2) / 3u32).gamma();
    let c2 = Float::with_val(p, 3).pow(-third.clone()) / third.gamma();
    let sqrt3 = Float::with_val(p, 3).sqrt();
    let ai = Float::with_val(p, &c1 * &f) - Float::with_val(p, &c2 * &g);
    let aip = Float::with_val(p, &c1 * &fp) - Float::with_val(p, &c2 * &gp);
    let bi = (Float::with_val(p, &c1 * &f) + Float::with_val(p, &c2 * &g)) * &sqrt3;
    let bip = (Float::with_val(p, &c1 * &fp) + Float::with_val(p, &c2 * &gp)) * &sqrt3;
    AiryValues {
        ai: ai.to_f64(),
        aip: aip.to_f64(),
        bi: bi.to_f64(),
        bip: bip.to_f64(),
    }
}

/// Asymptotic coefficients u_k (and v_k = u_k (6k+1)/(1-6k)), DLMF 9.7.
fn asymptotic_uv(max_k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..=max_k {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * kf * (2.0 * kf - 1.0));
        u.push(next);
        v.push(next * (6.0 * kf + 1.0) / (1.0 - 6.0 * kf));
    }
    (u, v)
}

/// Sums Σ c_k t^k with optimal truncation (stop when terms grow).
fn asymptotic_sum(coeffs: impl Iterator<Item = f64>, inv_zeta: f64) -> f64 {
    let mut acc = 0.0;
    let mut pw = 1.0;
    let mut last = f64::INFINITY;
    for c in coeffs {
        let term = c * pw;
        if term.abs() > last {
            break;
        }
        acc += term;
        last = term.abs();
        pw *= inv_zeta;
        if last < 1e-18 * acc.abs().max(1.0) {
            break;
        }
    }
    acc
}

fn airy_asymptotic_pos(x: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let iz = 1.0 / zeta;
    let (u, v) = asymptotic_uv(40);
    let sum_ai = asymptotic_sum(u.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }), iz);
    let sum_bi = asymptotic_sum(u.iter().copied(), iz);
    let sum_aip = asymptotic_sum(v.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }), iz);
    let sum_bip = asymptotic_sum(v.iter().copied(), iz);
    let sp = std::f64::consts::PI.sqrt();
    let x4 = x.powf(0.25);
    AiryValues {
        ai: (-zeta).exp() / (2.0 * sp * x4) * sum_ai,
        aip: -x4 * (-zeta).exp() / (2.0 * sp) * sum_aip,
        bi: zeta.exp() / (sp * x4) * sum_bi,
        bip: x4 * zeta.exp() / sp * sum_bip,
    }
}

fn airy_asymptotic_neg(t: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * t.powf(1.5);
    let iz2 = 1.0 / (zeta * zeta);
    let (u, v) = asymptotic_uv(40);
    let alt = |k: usize, c: f64| if k % 2 == 0 { c } else { -c };
    let p: f64 = asymptotic_sum((0..u.len() / 2).map(|k| alt(k, u[2 * k])), iz2);
    let q = asymptotic_sum((0..u.len() / 2).map(|k| alt(k, u[2 * k + 1])), iz2) / zeta;
    let r = asymptotic_sum((0..v.len() / 2).map(|k| alt(k, v[2 * k])), iz2);
    let s = asymptotic_sum((0..v.len() / 2).map(|k| alt(k, v[2 * k + 1])), iz2) / zeta;
    let sp = std::f64::consts::PI.sqrt();
    let t4 = t.powf(0.25);
    let (sn, cs) = (zeta + std::f64::consts::FRAC_PI_4).sin_cos();
    AiryValues {
        ai: (sn * p - cs * q) / (sp * t4),
        aip: -t4 / sp * (cs * r + sn * s),
        bi: (cs * p + sn * q) / (sp * t4),
        bip: t4 / sp * (sn * r - cs * s),
    }
}

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0 (Lanczos approximation with
/// reflection handled by the caller; our uses have x >= 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires positive argument, got {x}");
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π/sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// The digamma function ψ(x) for x > 0 (asymptotic series after argument shift).
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ψ(x) ~ ln x - 1/(2x) - Σ B_{2n}/(2n x^{2n})
    acc + x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))))
}
