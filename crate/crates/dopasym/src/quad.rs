//! Quadrature: Gauss-Legendre rules, adaptive refinement, and integrals with
//! logarithmic singularities.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_pd(n, x);
        dp = d;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_pd(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and derivative at x.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Values integrable by the adaptive routine.
pub trait QuadValue:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn qzero() -> Self;
    fn qnorm(&self) -> f64;
}

impl QuadValue for f64 {
    fn qzero() -> Self {
        0.0
    }
    fn qnorm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn qzero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn qnorm(&self) -> f64 {
        self.norm()
    }
}

fn fixed_gl<T: QuadValue>(f: &mut dyn FnMut(f64) -> T, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> T {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = T::qzero();
    for (x, w) in gl.0.iter().zip(gl.1.iter()) {
        acc = acc + f(c + h * x) * (w * h);
    }
    acc
}

/// Adaptive Gauss-Legendre quadrature of `f` over [a, b] to absolute
/// tolerance `tol` (bisection refinement, 15/31-point error estimate).
pub fn adaptive<T: QuadValue>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, tol: f64) -> Result<T> {
    let gl15 = gauss_legendre(15);
    let gl31 = gauss_legendre(31);
    let mut total = T::qzero();
    let mut scale = 0.0f64;
    let mut panels = 0usize;
    // Work stack of (a, b, coarse estimate, local tol, depth).
    let first = fixed_gl(&mut f, a, b, &gl15);
    let mut stack = vec![(a, b, first, tol, 0usize)];
    while let Some((lo, hi, coarse, ltol, depth)) = stack.pop() {
        panels += 1;
        if panels > 40_000 {
            return Err(Error::QuadratureFailure(format!(
                "panel budget exhausted near [{lo}, {hi}]"
            )));
        }
        let fine = fixed_gl(&mut f, lo, hi, &gl31);
        let err = (fine - coarse).qnorm();
        scale = scale.max(fine.qnorm());
        // below local tolerance, or indistinguishable from roundoff noise
        let floor = 1e-15 * (1.0 + scale + total.qnorm());
        if (err.is_finite() && err <= ltol.max(floor)) || depth >= 40 {
            if depth >= 40 && !(err <= 1e3 * ltol.max(floor)) {
                return Err(Error::QuadratureFailure(format!(
                    "max refinement depth reached on [{lo}, {hi}], err = {err:.3e}"
                )));
            }
            total = total + fine;
        } else {
            let mid = 0.5 * (lo + hi);
            let left = fixed_gl(&mut f, lo, mid, &gl15);
            let right = fixed_gl(&mut f, mid, hi, &gl15);
            stack.push((lo, mid, left, 0.5 * ltol, depth + 1));
            stack.push((mid, hi, right, 0.5 * ltol, depth + 1));
        }
    }
    Ok(total)
}

/// Exact value of ∫_a^b log|x - y| dy for finite a < b.
pub fn log_kernel_primitive(x: f64, a: f64, b: f64) -> f64 {
    let term = |t: f64| {
        if t.abs() < 1e-300 {
            0.0
        } else {
            t * (t.abs().ln() - 1.0)
        }
    };
    // ∫_a^b log|x-y| dy = G(x-a) - G(x-b) with G(t) = t(log|t| - 1)
    term(x - a) - term(x - b)
}

/// ∫_a^b f(y) log|x - y| dy with the singularity at y = x subtracted:
/// the smooth part is integrated adaptively and f(x)·∫log|x-y|dy is added
/// in closed form. Valid whether or not x lies in [a, b].
pub fn integrate_log_singular(
    f: &dyn Fn(f64) -> f64,
    x: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    if x < a || x > b {
        // No singularity inside; still split near the closest endpoint for safety.
        return adaptive(|y| f(y) * (x - y).abs().max(1e-300).ln(), a, b, tol);
    }
    let fx = f(x);
    let smooth = |y: f64| {
        let d = (x - y).abs();
        if d < 1e-300 {
            0.0
        } else {
            (f(y) - fx) * d.ln()
        }
    };
    let left = if x > a {
        adaptive(smooth, a, x, 0.5 * tol)?
    } else {
        0.0
    };
    let right = if b > x {
        adaptive(smooth, x, b, 0.5 * tol)?
    } else {
        0.0
    };
    Ok(left + right + fx * log_kernel_primitive(x, a, b))
}

/// Gauss-Chebyshev quadrature: ∫_a^b g(y) / sqrt((y-a)(b-y)) dy ≈ (π/n) Σ g(y_j)
/// with y_j = (a+b)/2 + (b-a)/2 · cos((2j-1)π/(2n)).
pub fn gauss_chebyshev(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let s = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let mut acc = 0.0;
    for j in 1..=n {
        let th = (2.0 * j as f64 - 1.0) * std::f64::consts::PI / (2.0 * n as f64);
        acc += g(s + d * th.cos());
    }
    acc * std::f64::consts::PI / n as f64
}
