//! One-band analytic ingredients consumed by the asymptotic formulae: the
//! square root R, the fourth-root λ with u, v, the scalar function h built
//! from η' and κ, the functions W and Z, the gap factors H±, logarithmic
//! potentials and phases, and the conformal edge maps τ.

use crate::equilibrium::{variational_derivative, EquilibriumMeasure, GapType};
use crate::error::{Error, Result};
use crate::lattice::RealFn;
use crate::quad::{adaptive, integrate_log_singular};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Analytic data for a one-band equilibrium measure at degree k = cN + κ.
pub struct OuterModel {
    pub measure: EquilibriumMeasure,
    pub phi: RealFn,
    pub eta: RealFn,
    pub eta_prime: RealFn,
    pub kappa: f64,
    pub big_n: usize,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    /// γ = η(β) − 2h(β).
    pub gamma_const: f64,
    eta_active: bool,
}

/// Which band endpoint an edge map refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSide {
    Left,
    Right,
}

pub fn build_outer_model(
    measure: &EquilibriumMeasure,
    phi: RealFn,
    eta: RealFn,
    eta_prime: RealFn,
    kappa: f64,
    big_n: usize,
) -> Result<OuterModel> {
    if measure.bands.len() != 1 {
        return Err(Error::MultiBand(measure.bands.len()));
    }
    let (alpha, beta) = measure.bands[0];
    // η' participates only if it is not identically negligible on the band
    let mut eta_active = false;
    for i in 0..17 {
        let x = alpha + (beta - alpha) * i as f64 / 16.0;
        if eta_prime(x).abs() > 1e-12 {
            eta_active = true;
            break;
        }
    }
    let mut model = OuterModel {
        measure: measure.clone(),
        phi,
        eta,
        eta_prime,
        kappa,
        big_n,
        c: measure.c,
        alpha,
        beta,
        gamma_const: 0.0,
        eta_active,
    };
    let h_beta = model.h_at_beta()?;
    model.gamma_const = (model.eta)(beta) - 2.0 * h_beta;
    Ok(model)
}

impl OuterModel {
    pub fn band_width(&self) -> f64 {
        self.beta - self.alpha
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }

    /// R(z) = sqrt((z−α)(z−β)), analytic off [α, β], R ~ z at ∞.
    pub fn r(&self, z: Complex64) -> Complex64 {
        (z - self.alpha).sqrt() * (z - self.beta).sqrt()
    }

    /// λ(z) with λ⁴ = (z−α)/(z−β), analytic off the exterior rays, λ → 1 as
    /// z → ∞ in the upper half-plane (and → −i in the lower). Real arguments
    /// are treated as upper boundary values.
    pub fn lambda(&self, z: Complex64) -> Complex64 {
        let r = (z - self.alpha) / (z - self.beta);
        if z.im > 0.0 {
            // arg(r) ∈ (−π, 0): the principal fourth root is the right branch
            r.powf(0.25)
        } else if z.im < 0.0 {
            Complex64::new(0.0, -1.0) * r.powf(0.25)
        } else {
            let x = z.re;
            if x > self.beta || x < self.alpha {
                Complex64::new(r.re.powf(0.25), 0.0)
            } else {
                // band: arg(r) → −π from above
                let m = ((x - self.alpha) / (self.beta - x)).powf(0.25);
                m * Complex64::from_polar(1.0, -PI / 4.0)
            }
        }
    }

    /// u = (λ + 1/λ)/2 and v = (λ − 1/λ)/(2i).
    pub fn u_v(&self, z: Complex64) -> (Complex64, Complex64) {
        let l = self.lambda(z);
        let li = 1.0 / l;
        let u = 0.5 * (l + li);
        let v = (l - li) / Complex64::new(0.0, 2.0);
        (u, v)
    }

    fn anchor(&self) -> f64 {
        self.beta + 10.0 * self.band_width()
    }

    /// ∫_α^β η'(x) sqrt((x−α)(β−x)) / (x−ζ) dx by the Chebyshev rule.
    fn eta_cauchy(&self, zeta: Complex64) -> Complex64 {
        let n = 240;
        let s = 0.5 * (self.alpha + self.beta);
        let d = 0.5 * self.band_width();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            let th = (2.0 * j as f64 - 1.0) * PI / (2.0 * n as f64);
            let x = s + d * th.cos();
            let w2 = (x - self.alpha) * (self.beta - x);
            acc += (self.eta_prime)(x) * w2 / (x - zeta);
        }
        acc * PI / n as f64
    }

    /// η-part of h' (the κ part κ/R has a closed-form antiderivative).
    fn h_prime_eta_only(&self, zeta: Complex64) -> Complex64 {
        self.eta_cauchy(zeta) / (2.0 * PI * self.r(zeta))
    }

    /// h(z) = κ log((z − (α+β)/2 + R(z))/2) + h_η(z) for Im z ≥ 0 (real z is
    /// the upper boundary value); Im z < 0 follows by conjugation symmetry.
    pub fn h(&self, z: Complex64) -> Complex64 {
        if z.im < 0.0 {
            return self.h(z.conj()).conj();
        }
        let hk = self.kappa * self.h_kernel_log(z);
        if !self.eta_active {
            return hk;
        }
        hk + self.h_eta(z)
    }

    /// log((z − s̄ + R(z))/2) with the cut on (−∞, β], upper boundary values.
    fn h_kernel_log(&self, z: Complex64) -> Complex64 {
        let w = (z - self.midpoint() + self.r(z)) / 2.0;
        if z.im == 0.0 && w.im == 0.0 && w.re < 0.0 {
            // on the cut left of α: the limit from above carries +iπ
            Complex64::new(w.re.abs().ln(), PI)
        } else {
            w.ln()
        }
    }

    /// h_η(z) for Im z ≥ 0: path z → z+iY → anchor+iY → anchor plus the real
    /// tail anchor → ∞, staying inside the analyticity domain ℂ∖(−∞, β].
    fn h_eta(&self, z: Complex64) -> Complex64 {
        let anchor = self.anchor();
        if z.im == 0.0 && z.re >= anchor {
            return self.h_eta_tail(z.re);
        }
        let y = (2.0 * self.band_width()).max(2.0 * z.im);
        let p1 = Complex64::new(z.re, y);
        let p2 = Complex64::new(anchor, y);
        let p3 = Complex64::new(anchor, 0.0);
        // h_η(z) = h_η(anchor) − ∫_z^{anchor} h'_η along the path
        let mut path_int = Complex64::new(0.0, 0.0);
        for (from, to) in [(z, p1), (p1, p2), (p2, p3)] {
            let dir = to - from;
            if dir.norm() == 0.0 {
                continue;
            }
            path_int += adaptive(|t| self.h_prime_eta_only(from + dir * t) * dir, 0.0, 1.0, 1e-12)
                .unwrap_or_default();
        }
        self.h_eta_tail(anchor) - path_int
    }

    /// h_η(x) = −∫_x^∞ h'_η(s) ds for real x ≥ anchor, by a rational map.
    fn h_eta_tail(&self, x: f64) -> Complex64 {
        adaptive(
            |t| {
                let s = x + t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                -self.h_prime_eta_only(Complex64::new(s, 0.0)) * jac
            },
            0.0,
            1.0 - 1e-9,
            1e-13,
        )
        .unwrap_or_default()
    }

    /// h(β) as the one-sided limit along the real axis from the right.
    fn h_at_beta(&self) -> Result<f64> {
        let hk = self.kappa * (self.band_width() / 4.0).ln();
        if !self.eta_active {
            return Ok(hk);
        }
        // u = sqrt(s−β): the integrand h'_η·(ds/du) reduces to
        // eta_cauchy(s)/(2π sqrt(s−α))·2, finite down to u = 0
        let anchor = self.anchor();
        let umax = (anchor - self.beta).sqrt();
        let seg = adaptive(
            |u| {
                let s = self.beta + u * u;
                let val = self.eta_cauchy(Complex64::new(s, 0.0))
                    / (std::f64::consts::PI * (s - self.alpha).sqrt());
                val.re
            },
            0.0,
            umax,
            1e-12,
        )?;
        let tail = self.h_eta_tail(anchor).re;
        Ok(hk + (tail - seg))
    }

    /// W(z): u e^h in the upper half-plane, −v e^h in the lower; real z is the
    /// upper boundary value.
    pub fn w_fn(&self, z: Complex64) -> Complex64 {
        let (u, v) = self.u_v(z);
        let h = self.h(z);
        if z.im >= 0.0 {
            u * h.exp()
        } else {
            -v * h.exp()
        }
    }

    /// Z(z): i v e^{−h} above, i u e^{−h} below.
    pub fn z_fn(&self, z: Complex64) -> Complex64 {
        let (u, v) = self.u_v(z);
        let h = self.h(z);
        if z.im >= 0.0 {
            Complex64::new(0.0, 1.0) * v * (-h).exp()
        } else {
            Complex64::new(0.0, 1.0) * u * (-h).exp()
        }
    }

    /// θ_Γ constants: −2πc for the left exterior gap, 0 for the right one.
    pub fn theta_gap(&self, side: EdgeSide) -> f64 {
        match side {
            EdgeSide::Left => -2.0 * PI * self.c,
            EdgeSide::Right => 0.0,
        }
    }

    /// H±_Γ(z) = W/√2 e^{(γ−η−iN·sgn(Im z)·θ_Γ)/2} ± Z/√2 e^{−(…)/2}; real z
    /// uses the upper value sgn = +1.
    pub fn h_pm(&self, side: EdgeSide, z: Complex64) -> (Complex64, Complex64) {
        let s = if z.im < 0.0 { -1.0 } else { 1.0 };
        let theta = self.theta_gap(side);
        let expo = Complex64::new(
            self.gamma_const - (self.eta)(z.re),
            -(self.big_n as f64) * s * theta,
        ) / 2.0;
        let w = self.w_fn(z) / 2.0_f64.sqrt();
        let zf = self.z_fn(z) / 2.0_f64.sqrt();
        (
            w * expo.exp() + zf * (-expo).exp(),
            w * expo.exp() - zf * (-expo).exp(),
        )
    }

    /// Real part of L_c on the axis: c ∫ log|x−y| dμ(y).
    pub fn lbar(&self, x: f64) -> Result<f64> {
        let m = &self.measure;
        let mut acc = 0.0;
        for &(al, be) in &m.bands {
            let psi = m.psi.clone();
            acc += integrate_log_singular(&move |y| psi(y), x, al, be, 1e-11)?;
        }
        for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
            if m.gap_types[gi] == GapType::Saturated && hi > lo {
                let rho0 = m.rho0.clone();
                let cc = m.c;
                acc += integrate_log_singular(&move |y| rho0(y) / cc, x, lo, hi, 1e-11)?;
            }
        }
        Ok(self.c * acc)
    }

    /// Upper boundary value L_c(x + i0) = L̄(x) + iπc μ([x,b]).
    pub fn l_c_plus(&self, x: f64) -> Result<Complex64> {
        let re = self.lbar(x)?;
        let im = PI * self.c * self.measure.mass_above(x)?;
        Ok(Complex64::new(re, im))
    }

    /// L_c(z) for genuinely complex z by direct quadrature of c∫log(z−y)dμ.
    pub fn l_c_complex(&self, z: Complex64) -> Result<Complex64> {
        let m = &self.measure;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(al, be) in &m.bands {
            let psi = m.psi.clone();
            acc += adaptive(move |y| (z - y).ln() * psi(y), al, be, 1e-10)?;
        }
        for (gi, &(lo, hi)) in m.gaps().iter().enumerate() {
            if m.gap_types[gi] == GapType::Saturated && hi > lo {
                let rho0 = m.rho0.clone();
                let cc = m.c;
                acc += adaptive(move |y| (z - y).ln() * (rho0(y) / cc), lo, hi, 1e-10)?;
            }
        }
        Ok(self.c * acc)
    }

    /// θ⁰(x) = 2π ∫_x^b ρ⁰.
    pub fn theta0(&self, x: f64) -> Result<f64> {
        let rho0 = self.measure.rho0.clone();
        Ok(2.0 * PI * adaptive(move |t| rho0(t), x, self.measure.b, 1e-12)?)
    }

    /// δE_c/δμ(x) evaluated with the stored field.
    pub fn variational_at(&self, x: f64) -> Result<f64> {
        variational_derivative(&self.measure, &self.phi, self.c, x)
    }

    /// Conformal edge map τ at a band edge, on the real axis. The requested
    /// gap type must match the measure; `x` may be on either side of the edge.
    pub fn tau_map(&self, side: EdgeSide, expected: GapType, x: f64) -> Result<f64> {
        let gi = match side {
            EdgeSide::Left => 0,
            EdgeSide::Right => 1,
        };
        let actual = self.measure.gap_types[gi];
        if actual != expected {
            return Err(Error::EdgeMismatch(format!(
                "{side:?} gap is {actual:?}, requested {expected:?}"
            )));
        }
        let edge = match side {
            EdgeSide::Left => self.alpha,
            EdgeSide::Right => self.beta,
        };
        let inside_band = match side {
            EdgeSide::Left => x >= edge,
            EdgeSide::Right => x <= edge,
        };
        let nf = self.big_n as f64;
        if inside_band {
            // τ = (2πNc ∫_edge^x dens)^{2/3}, dens = ψ (void) or ψ̄ (saturated)
            let m = self.measure.clone();
            let use_bar = expected == GapType::Saturated;
            let dens = move |t: f64| {
                if use_bar {
                    m.psi_bar_at(t)
                } else {
                    m.density_at(t)
                }
            };
            let (lo, hi) = if x < edge { (x, edge) } else { (edge, x) };
            let integral = adaptive(dens, lo, hi, 1e-12)?;
            Ok((2.0 * PI * nf * self.c * integral.abs()).powf(2.0 / 3.0))
        } else {
            // gap side: (−τ)^{3/2} = N ξ_Γ with ξ_Γ = ±(δE/δμ − ℓ_c)
            let de = self.variational_at(x)?;
            let xi = match expected {
                GapType::Void => de - self.measure.ell_c,
                GapType::Saturated => self.measure.ell_c - de,
            };
            if xi < 0.0 {
                return Err(Error::QuadratureFailure(format!(
                    "negative variational margin {xi:.3e} at x = {x}"
                )));
            }
            Ok(-((nf * xi).powf(2.0 / 3.0)))
        }
    }

    /// L̄_I continued across the adjacent gap: L̄_I = L̄_Γ ± (1/2N)(−τ)^{3/2}
    /// (+ for voids, − for saturated regions); equals L̄ inside the band.
    pub fn lbar_band(&self, x: f64) -> Result<f64> {
        if x >= self.alpha && x <= self.beta {
            return self.lbar(x);
        }
        let side = if x < self.alpha {
            EdgeSide::Left
        } else {
            EdgeSide::Right
        };
        let gi = if side == EdgeSide::Left { 0 } else { 1 };
        let gtype = self.measure.gap_types[gi];
        let tau = self.tau_map(side, gtype, x)?;
        let corr = (-tau).max(0.0).powf(1.5) / (2.0 * self.big_n as f64);
        let sign = match gtype {
            GapType::Void => 1.0,
            GapType::Saturated => -1.0,
        };
        Ok(self.lbar(x)? + sign * corr)
    }

    /// Band amplitude/phase: W_+(x) = ½ A_I(x) e^{iΦ_I(x)}.
    pub fn band_phase(&self, x: f64) -> Result<(f64, f64)> {
        let margin = 0.02 * self.band_width();
        if x < self.alpha + margin || x > self.beta - margin {
            return Err(Error::TooCloseToEdge);
        }
        let w = self.w_fn(Complex64::new(x, 0.0));
        Ok((2.0 * w.norm(), w.arg()))
    }

    /// Total phase of the band cosine at x: Φ_I(x) + Nπc μ([x,b]).
    pub fn band_cos_phase(&self, x: f64) -> Result<f64> {
        let (_, phi_i) = self.band_phase(x)?;
        Ok(phi_i + self.big_n as f64 * PI * self.c * self.measure.mass_above(x)?)
    }
}
