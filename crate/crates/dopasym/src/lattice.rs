//! Node sets defined by a density function through the quantization rule, and
//! the classical (Krawtchouk, Hahn, associated Hahn) and custom weight
//! families together with their duals.

use crate::error::{Error, Result};
use crate::prec::{hp, tree_sum};
use crate::quad::adaptive;
use rug::ops::CompleteRound;
use rug::Float;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A finite set of orthogonalization nodes in (a, b), placed by the
/// quantization rule ∫_a^{x_n} ρ⁰ = (2n+1)/(2N).
#[derive(Clone)]
pub struct NodeSet {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub rho0: RealFn,
    /// Nodes at working precision, strictly increasing.
    pub nodes: Vec<Float>,
    /// Same nodes rounded to f64 for the double-precision layers.
    pub nodes_f64: Vec<f64>,
    pub prec: u32,
    uniform: bool,
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NodeSet")
            .field("n", &self.n)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("uniform", &self.uniform)
            .finish()
    }
}

impl NodeSet {
    /// Equally spaced nodes (2n+1)/(2N) on (0, 1); ρ⁰ ≡ 1. Node values are
    /// exact at the working precision.
    pub fn uniform(n: usize, prec: u32) -> Self {
        assert!(n >= 1);
        let nodes: Vec<Float> = (0..n)
            .map(|i| Float::with_val(prec, 2 * i as u64 + 1) / (2 * n as u64))
            .collect();
        let nodes_f64 = nodes.iter().map(|x| x.to_f64()).collect();
        NodeSet {
            n,
            a: 0.0,
            b: 1.0,
            rho0: Arc::new(|_| 1.0),
            nodes,
            nodes_f64,
            prec,
            uniform: true,
        }
    }

    pub fn is_uniform(&self) -> bool {
        if self.uniform {
            return true;
        }
        let n = self.n as f64;
        self.a == 0.0
            && self.b == 1.0
            && self
                .nodes_f64
                .iter()
                .enumerate()
                .all(|(i, &x)| (x - (2.0 * i as f64 + 1.0) / (2.0 * n)).abs() < 1e-12)
    }

    /// Residual of the quantization rule at each node (uses adaptive
    /// quadrature of ρ⁰).
    pub fn quantization_residuals(&self) -> Result<Vec<f64>> {
        let mut res = Vec::with_capacity(self.n);
        let mut acc = 0.0;
        let mut prev = self.a;
        for (i, &x) in self.nodes_f64.iter().enumerate() {
            let rho = self.rho0.clone();
            acc += adaptive(move |t| rho(t), prev, x, 1e-15)?;
            res.push(acc - (2.0 * i as f64 + 1.0) / (2.0 * self.n as f64));
            prev = x;
        }
        Ok(res)
    }
}

/// Builds a node set from a density by bracketed bisection on the cumulative
/// integral of ρ⁰.
pub fn build_node_set(
    rho0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    a: f64,
    b: f64,
    n: usize,
    prec: u32,
) -> Result<NodeSet> {
    if n < 1 || !(a < b) {
        return Err(Error::BadParams(format!("need N >= 1 and a < b, got N={n}, [{a},{b}]")));
    }
    let rho0: RealFn = Arc::new(rho0);
    // positivity on a dense sample
    let samples = 64 * n.max(8);
    for i in 0..samples {
        // strictly interior samples: densities may vanish at the endpoints
        let x = a + (b - a) * (i as f64 + 0.5) / samples as f64;
        if rho0(x) <= 0.0 {
            return Err(Error::NonPositiveDensity { x });
        }
    }
    let r = rho0.clone();
    let mass = adaptive(move |t| r(t), a, b, 1e-14)?;
    if (mass - 1.0).abs() > 1e-12 {
        return Err(Error::Unnormalized { mass });
    }
    // cumulative integral via one adaptive pass per gap, then bisection
    let mut nodes_f64 = Vec::with_capacity(n);
    let mut lo_anchor = a; // left end of current bracket with known cumulative
    let mut acc_anchor = 0.0;
    for i in 0..n {
        let target = (2.0 * i as f64 + 1.0) / (2.0 * n as f64);
        let mut lo = lo_anchor;
        let mut hi = b;
        // F(x) = acc_anchor + ∫_{lo_anchor}^x rho0; increasing since rho0 > 0
        let cumulative = |x: f64| -> Result<f64> {
            let r = rho0.clone();
            Ok(acc_anchor + adaptive(move |t| r(t), lo_anchor, x, 1e-15)?)
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cumulative(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (b - a) {
                break;
            }
        }
        let x = 0.5 * (lo + hi);
        acc_anchor = cumulative(x)?;
        lo_anchor = x;
        nodes_f64.push(x);
    }
    let nodes: Vec<Float> = nodes_f64.iter().map(|&x| hp(prec, x)).collect();
    Ok(NodeSet {
        n,
        a,
        b,
        rho0,
        nodes,
        nodes_f64,
        prec,
        uniform: false,
    })
}

/// Weight family tag with its defining parameters.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// Krawtchouk with positive parameters p, q.
    Krawtchouk { p: f64, q: f64 },
    /// Hahn with positive parameters P, Q (for scaled families P = NA+1, Q = NB+1).
    Hahn { n_param: f64, q_param: f64 },
    /// Associated Hahn with positive parameters P, Q.
    AssocHahn { n_param: f64, q_param: f64 },
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Krawtchouk { .. } => "krawtchouk",
            Family::Hahn { .. } => "hahn",
            Family::AssocHahn { .. } => "assoc_hahn",
            Family::Custom => "custom",
        }
    }
}

/// A positive weight on a node set, stored in the log domain at working
/// precision, with its continuum decomposition data V and η.
#[derive(Clone)]
pub struct WeightFamily {
    pub node_set: NodeSet,
    pub family: Family,
    pub log_weights: Vec<Float>,
    /// Fixed exponent V(x) of the continuum limit.
    pub v: RealFn,
    /// Derivative V'(x).
    pub v_prime: RealFn,
    /// Correction η(x) = N(V_N(x) − V(x)); bounded as N → ∞.
    pub eta: RealFn,
    /// Derivative η'(x).
    pub eta_prime: RealFn,
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFamily")
            .field("family", &self.family)
            .field("n", &self.node_set.n)
            .finish()
    }
}

/// Specification for `make_weights`.
pub enum FamilySpec {
    Krawtchouk { p: f64, q: f64 },
    Hahn { n_param: f64, q_param: f64 },
    AssocHahn { n_param: f64, q_param: f64 },
    /// Custom exponent V_N: weights w_n = exp(−N·V_N(x_n))·Π|x_n − x_m|^{−1}.
    Custom { v_n: RealFn },
}

/// Σ_{m≠n} log|x_n − x_m| for each n, at working precision.
pub fn log_node_products(ns: &NodeSet) -> Vec<Float> {
    let prec = ns.prec;
    let n = ns.n;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let terms: Vec<Float> = (0..n)
            .filter(|&m| m != i)
            .map(|m| {
                let d = (&ns.nodes[i] - &ns.nodes[m]).complete(prec);
                d.abs().ln()
            })
            .collect();
        out.push(tree_sum(prec, &terms));
    }
    out
}

fn ln_gamma_hp(prec: u32, x: Float) -> Float {
    x.ln_gamma()
}

/// Constructs the weight family (log domain, log-gamma based; no overflow).
pub fn make_weights(spec: FamilySpec, node_set: &NodeSet) -> Result<WeightFamily> {
    let prec = node_set.prec;
    let n = node_set.n;
    let nf = n as f64;
    match spec {
        FamilySpec::Krawtchouk { p, q } => {
            if p <= 0.0 || q <= 0.0 {
                return Err(Error::BadParams(format!("Krawtchouk needs p,q > 0, got p={p}, q={q}")));
            }
            if !node_set.is_uniform() {
                return Err(Error::NodeMismatch);
            }
            // log w_n = (N−1)log N + ½log(pq) − N log q − lnΓ(N)
            //         + lnΓ(N) − lnΓ(n+1) − lnΓ(N−n) + n log p + (N−1−n) log q
            let lp = hp(prec, p).ln();
            let lq = hp(prec, q).ln();
            let base = (hp(prec, nf).ln() * (nf - 1.0))
                + (hp(prec, p) * q).ln() / 2u32
                - (lq.clone() * nf);
            let log_weights: Vec<Float> = (0..n)
                .map(|i| {
                    let i_f = i as f64;
                    base.clone() - ln_gamma_hp(prec, hp(prec, i_f + 1.0))
                        - ln_gamma_hp(prec, hp(prec, nf - i_f))
                        + (lp.clone() * i_f)
                        + (lq.clone() * (nf - 1.0 - i_f))
                })
                .collect();
            let l = (q / p).ln();
            Ok(WeightFamily {
                node_set: node_set.clone(),
                family: Family::Krawtchouk { p, q },
                log_weights,
                v: Arc::new(move |x| l * x),
                v_prime: Arc::new(move |_| l),
                eta: Arc::new(|_| 0.0),
                eta_prime: Arc::new(|_| 0.0),
            })
        }
        FamilySpec::Hahn { n_param: pp, q_param: qq } => {
            if pp <= 0.0 || qq <= 0.0 {
                return Err(Error::BadParams(format!("Hahn needs P,Q > 0, got P={pp}, Q={qq}")));
            }
            if !node_set.is_uniform() {
                return Err(Error::NodeMismatch);
            }
            // log w_n = (N−1)log N + lnΓ(n+P) − lnΓ(n+1) − lnΓ(P)
            //           + lnΓ(N+Q−1−n) − lnΓ(N−n) − lnΓ(N+Q−1)
            let base = hp(prec, nf).ln() * (nf - 1.0) - ln_gamma_hp(prec, hp(prec, pp))
                - ln_gamma_hp(prec, hp(prec, nf + qq - 1.0));
            let log_weights: Vec<Float> = (0..n)
                .map(|i| {
                    let i_f = i as f64;
                    base.clone() + ln_gamma_hp(prec, hp(prec, i_f + pp))
                        - ln_gamma_hp(prec, hp(prec, i_f + 1.0))
                        + ln_gamma_hp(prec, hp(prec, nf + qq - 1.0 - i_f))
                        - ln_gamma_hp(prec, hp(prec, nf - i_f))
                })
                .collect();
            let (v, v_prime, eta, eta_prime) = hahn_decomposition(nf, pp, qq, 1.0);
            Ok(WeightFamily {
                node_set: node_set.clone(),
                family: Family::Hahn { n_param: pp, q_param: qq },
                log_weights,
                v,
                v_prime,
                eta,
                eta_prime,
            })
        }
        FamilySpec::AssocHahn { n_param: pp, q_param: qq } => {
            if pp <= 0.0 || qq <= 0.0 {
                return Err(Error::BadParams(format!(
                    "associated Hahn needs P,Q > 0, got P={pp}, Q={qq}"
                )));
            }
            if !node_set.is_uniform() {
                return Err(Error::NodeMismatch);
            }
            // log w_n = (N−1)log N + lnΓ(N+Q−1) + lnΓ(P) − lnΓ(n+1) − lnΓ(P+n)
            //           − lnΓ(N−n) − lnΓ(N+Q−1−n)
            let base = hp(prec, nf).ln() * (nf - 1.0)
                + ln_gamma_hp(prec, hp(prec, nf + qq - 1.0))
                + ln_gamma_hp(prec, hp(prec, pp));
            let log_weights: Vec<Float> = (0..n)
                .map(|i| {
                    let i_f = i as f64;
                    base.clone() - ln_gamma_hp(prec, hp(prec, i_f + 1.0))
                        - ln_gamma_hp(prec, hp(prec, i_f + pp))
                        - ln_gamma_hp(prec, hp(prec, nf - i_f))
                        - ln_gamma_hp(prec, hp(prec, nf + qq - 1.0 - i_f))
                })
                .collect();
            let (v, v_prime, eta, eta_prime) = hahn_decomposition(nf, pp, qq, -1.0);
            Ok(WeightFamily {
                node_set: node_set.clone(),
                family: Family::AssocHahn { n_param: pp, q_param: qq },
                log_weights,
                v,
                v_prime,
                eta,
                eta_prime,
            })
        }
        FamilySpec::Custom { v_n } => {
            let log_prod = log_node_products(node_set);
            let log_weights: Vec<Float> = (0..n)
                .map(|i| {
                    let x = node_set.nodes_f64[i];
                    hp(prec, -nf * v_n(x)) - &log_prod[i]
                })
                .collect();
            let vp = v_n.clone();
            let vn2 = v_n.clone();
            let vn3 = v_n.clone();
            Ok(WeightFamily {
                node_set: node_set.clone(),
                family: Family::Custom,
                log_weights,
                v: v_n.clone(),
                v_prime: Arc::new(move |x| {
                    let h = 1e-6;
                    (vp(x + h) - vp(x - h)) / (2.0 * h)
                }),
                eta: Arc::new(move |_| {
                    let _ = &vn2;
                    0.0
                }),
                eta_prime: Arc::new(move |_| {
                    let _ = &vn3;
                    0.0
                }),
            })
        }
    }
}

/// V, V', η, η' for Hahn (sign = +1) or associated Hahn (sign = −1) with
/// P = NA+1 interpreted through A = (P−1)/N, B = (Q−1)/N.
fn hahn_decomposition(nf: f64, pp: f64, qq: f64, sign: f64) -> (RealFn, RealFn, RealFn, RealFn) {
    let a = (pp - 1.0) / nf;
    let b = (qq - 1.0) / nf;
    let v = move |x: f64| sign * hahn_v_limit(x, a, b);
    let v_prime = move |x: f64| sign * ((b + 1.0 - x) / (a + x)).ln();
    // exact η_N(x) = N (V_N(x) − V(x)) through log-gamma
    let eta = move |x: f64| {
        let vn = hahn_vn_exact(x, nf, pp, qq);
        sign * nf * (vn - hahn_v_limit(x, a, b))
    };
    let eta_prime = move |x: f64| {
        // d/dx of N·V_N = −N ψ(Nx+P−1/2) + N ψ(N(1−x)+Q−1/2); minus N·V'
        let d_vn = -crate::special::digamma(nf * x + pp - 0.5)
            + crate::special::digamma(nf * (1.0 - x) + qq - 0.5);
        sign * nf * (d_vn - ((b + 1.0 - x) / (a + x)).ln())
    };
    (
        Arc::new(v),
        Arc::new(v_prime),
        Arc::new(eta),
        Arc::new(eta_prime),
    )
}

/// Limiting Hahn exponent V(x; A, B).
pub fn hahn_v_limit(x: f64, a: f64, b: f64) -> f64 {
    a * a.ln() + (b + 1.0) * (b + 1.0).ln()
        - (a + x) * (a + x).ln()
        - (b + 1.0 - x) * (b + 1.0 - x).ln()
}

/// Exact finite-N Hahn exponent V_N(x; P, Q) (analytic in x).
pub fn hahn_vn_exact(x: f64, nf: f64, pp: f64, qq: f64) -> f64 {
    (crate::special::ln_gamma(pp) + crate::special::ln_gamma(nf + qq - 1.0)
        - crate::special::ln_gamma(nf * x + pp - 0.5)
        - crate::special::ln_gamma(nf * (1.0 - x) + qq - 0.5))
        / nf
}

impl WeightFamily {
    pub fn n(&self) -> usize {
        self.node_set.n
    }

    /// Scaled Hahn parameters (A, B) with P = NA+1, Q = NB+1, for (assoc) Hahn.
    pub fn hahn_ab(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Hahn { n_param, q_param } | Family::AssocHahn { n_param, q_param } => {
                let nf = self.n() as f64;
                Some(((n_param - 1.0) / nf, (q_param - 1.0) / nf))
            }
            _ => None,
        }
    }

    /// Weights in f64 (may overflow to inf for large N; prefer `log_weights`).
    pub fn weights_f64(&self) -> Vec<f64> {
        self.log_weights.iter().map(|lw| lw.clone().exp().to_f64()).collect()
    }
}

/// Dual weights: log w̄_n = −log w_n − 2 Σ_{m≠n} log|x_n − x_m|, with the
/// family tag mapped to its dual.
pub fn dual_weights(w: &WeightFamily) -> WeightFamily {
    let log_prod = log_node_products(&w.node_set);
    let log_weights: Vec<Float> = w
        .log_weights
        .iter()
        .zip(log_prod.iter())
        .map(|(lw, lp)| -(lw.clone()) - (lp * 2u32).complete(w.node_set.prec))
        .collect();
    let family = match w.family {
        Family::Krawtchouk { p, q } => Family::Krawtchouk { p: q, q: p },
        Family::Hahn { n_param, q_param } => Family::AssocHahn { n_param, q_param },
        Family::AssocHahn { n_param, q_param } => Family::Hahn { n_param, q_param },
        Family::Custom => Family::Custom,
    };
    let (v, vp, eta, etap) = (
        w.v.clone(),
        w.v_prime.clone(),
        w.eta.clone(),
        w.eta_prime.clone(),
    );
    WeightFamily {
        node_set: w.node_set.clone(),
        family,
        log_weights,
        v: Arc::new(move |x| -v(x)),
        v_prime: Arc::new(move |x| -vp(x)),
        eta: Arc::new(move |x| -eta(x)),
        eta_prime: Arc::new(move |x| -etap(x)),
    }
}

/// Serializable form of a weight family.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct WeightFamilyJson {
    pub family: String,
    pub params: Vec<f64>,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// Log-weights as decimal strings (50 significant digits).
    pub log_weights: Vec<String>,
}

impl WeightFamily {
    pub fn to_json(&self) -> WeightFamilyJson {
        let params = match self.family {
            Family::Krawtchouk { p, q } => vec![p, q],
            Family::Hahn { n_param, q_param } | Family::AssocHahn { n_param, q_param } => {
                vec![n_param, q_param]
            }
            Family::Custom => vec![],
        };
        WeightFamilyJson {
            family: self.family.name().to_string(),
            params,
            n: self.node_set.n,
            a: self.node_set.a,
            b: self.node_set.b,
            log_weights: self
                .log_weights
                .iter()
                .map(|lw| format!("{:.50e}", lw))
                .collect(),
        }
    }
}
