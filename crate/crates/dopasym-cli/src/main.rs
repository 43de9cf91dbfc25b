//! Command-line front end: recurrence tables, equilibrium measures,
//! asymptotic error sweeps, kernel statistics, the Tracy-Widom table, and
//! hexagon tiling experiments, all with reproducible machine-readable output.

use clap::{Args, Parser, Subcommand};
use dopasym::asymptotics::{
    approx_pi, classify_point, predicted_band_zeros, predicted_recurrence, scaled_exact, RegionTag,
};
use dopasym::equilibrium::{
    dual_measure, external_field, hahn_equilibrium, krawtchouk_equilibrium, solve_equilibrium_qp,
    verify_variational, EquilibriumMeasure, GapType,
};
use dopasym::error::Error;
use dopasym::hexagon::{
    arctic_boundary, count_tilings, edge_fluctuation_stats, enumerate_tilings, hexagon_ensemble,
    tiling_to_svg, HexagonSpec,
};
use dopasym::kernels::{cd_kernel, hole_kernel, sample_dpp, sine_compare, tracy_widom_cdf};
use dopasym::lattice::{make_weights, FamilySpec, NodeSet, RealFn, WeightFamily};
use dopasym::orthopoly::{stieltjes_recurrence, OrthoSystem};
use dopasym::outer::{build_outer_model, EdgeSide, OuterModel};
use num_complex::Complex64;
use rand::SeedableRng;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "dopasym", version, about = "discrete orthogonal polynomial asymptotics")]
struct Cli {
    /// JSON config file; when given, its contents override the subcommand flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, serde::Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Recurrence table (and optional zeros) of a discrete orthogonal system
    Poly(PolyArgs),
    /// Equilibrium measure: closed form or numerical, with variational report
    Equilibrium(EquilibriumArgs),
    /// Per-theorem error sweeps against the exact polynomials
    Asymptotics(AsymptoticsArgs),
    /// Kernel invariants and sine/Airy comparisons
    Kernel(KernelArgs),
    /// Tracy-Widom CDF table
    Tw(TwArgs),
    /// Hexagon tilings: count, enumerate, sample, arctic boundary, edge stats
    Hexagon(HexagonArgs),
}

#[derive(Args, serde::Deserialize, Clone)]
struct FamilyArgs {
    /// Family: krawtchouk | hahn | assoc-hahn
    #[arg(long)]
    family: String,
    /// Krawtchouk p
    #[arg(long)]
    p: Option<f64>,
    /// Krawtchouk q
    #[arg(long)]
    q: Option<f64>,
    /// Hahn A (P = N·A + 1)
    #[arg(long = "A")]
    #[serde(rename = "A", default)]
    a_param: Option<f64>,
    /// Hahn B (Q = N·B + 1)
    #[arg(long = "B")]
    #[serde(rename = "B", default)]
    b_param: Option<f64>,
}

impl FamilyArgs {
    fn spec(&self, n: usize) -> Result<FamilySpec, Error> {
        let nf = n as f64;
        match self.family.as_str() {
            "krawtchouk" => Ok(FamilySpec::Krawtchouk {
                p: self.p.ok_or_else(|| Error::BadParams("missing --p".into()))?,
                q: self.q.ok_or_else(|| Error::BadParams("missing --q".into()))?,
            }),
            "hahn" => Ok(FamilySpec::Hahn {
                n_param: nf * self.a_param.ok_or_else(|| Error::BadParams("missing --A".into()))?
                    + 1.0,
                q_param: nf * self.b_param.ok_or_else(|| Error::BadParams("missing --B".into()))?
                    + 1.0,
            }),
            "assoc-hahn" => Ok(FamilySpec::AssocHahn {
                n_param: nf * self.a_param.ok_or_else(|| Error::BadParams("missing --A".into()))?
                    + 1.0,
                q_param: nf * self.b_param.ok_or_else(|| Error::BadParams("missing --B".into()))?
                    + 1.0,
            }),
            other => Err(Error::BadParams(format!("unknown family '{other}'"))),
        }
    }

    fn echo(&self) -> String {
        let mut s = format!("family={}", self.family);
        if let Some(p) = self.p {
            s.push_str(&format!(" p={p}"));
        }
        if let Some(q) = self.q {
            s.push_str(&format!(" q={q}"));
        }
        if let Some(a) = self.a_param {
            s.push_str(&format!(" A={a}"));
        }
        if let Some(b) = self.b_param {
            s.push_str(&format!(" B={b}"));
        }
        s
    }
}

#[derive(Args, serde::Deserialize, Clone)]
struct PolyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    #[arg(long)]
    kmax: usize,
    /// Also compute the zeros of degree k
    #[arg(long)]
    #[serde(default)]
    zeros: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    prec: Option<u32>,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Args, serde::Deserialize, Clone)]
struct EquilibriumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    c: f64,
    /// Solve numerically (projected gradient) instead of the closed form
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    qp: bool,
    /// QP grid size
    #[arg(long, default_value_t = 512)]
    #[serde(default = "default_grid")]
    grid: usize,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    /// JSON summary path
    #[arg(long)]
    #[serde(default)]
    json: Option<PathBuf>,
}

fn default_grid() -> usize {
    512
}

#[derive(Args, serde::Deserialize, Clone)]
struct AsymptoticsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    c: f64,
    /// Comma-separated N values
    #[arg(long = "N-list", value_delimiter = ',')]
    #[serde(rename = "N_list")]
    n_list: Vec<usize>,
    #[arg(long)]
    #[serde(default)]
    prec: Option<u32>,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Args, serde::Deserialize, Clone)]
struct KernelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Sine-kernel comparison window (node offsets)
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_window")]
    window: usize,
    #[arg(long)]
    #[serde(default)]
    c: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    prec: Option<u32>,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    /// Sample this many configurations from the ensemble
    #[arg(long)]
    #[serde(default)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_seed")]
    seed: u64,
}

fn default_window() -> usize {
    4
}

fn default_seed() -> u64 {
    1
}

#[derive(Args, serde::Deserialize, Clone)]
struct TwArgs {
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    #[serde(default = "tw_smin")]
    s_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    #[serde(default = "tw_smax")]
    s_max: f64,
    #[arg(long, default_value_t = 0.05)]
    #[serde(default = "tw_step")]
    step: f64,
    #[arg(long, default_value_t = 60)]
    #[serde(default = "tw_quad")]
    quad: usize,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
}

fn tw_smin() -> f64 {
    -6.0
}
fn tw_smax() -> f64 {
    4.0
}
fn tw_step() -> f64 {
    0.05
}
fn tw_quad() -> usize {
    60
}

#[derive(Args, serde::Deserialize, Clone)]
struct HexagonArgs {
    /// count | enumerate | sample | arctic | edge-stats | svg
    action: String,
    #[arg(long)]
    #[serde(default)]
    a: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    b: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    c: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    m: Option<u64>,
    /// Rescaled side lengths for `arctic`
    #[arg(long = "A")]
    #[serde(rename = "A", default)]
    aa: Option<f64>,
    #[arg(long = "B")]
    #[serde(rename = "B", default)]
    bb: Option<f64>,
    #[arg(long = "C")]
    #[serde(rename = "C", default)]
    cc: Option<f64>,
    #[arg(long, default_value_t = 50)]
    #[serde(default = "default_tau_grid")]
    grid: usize,
    /// Scales for edge-stats (comma-separated)
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    scales: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_samples")]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_seed")]
    seed: u64,
    /// Tiling index for `svg`
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    index: usize,
    #[arg(long)]
    #[serde(default)]
    prec: Option<u32>,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
}

fn default_tau_grid() -> usize {
    50
}
fn default_samples() -> usize {
    1000
}

fn env_prec() -> u32 {
    std::env::var("DOPASYM_PRECISION_BITS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(dopasym::prec::DEFAULT_PREC)
}

/// Output sink: file or stdout, with the provenance header already written.
fn open_out(path: &Option<PathBuf>, echo: &str) -> Result<Box<dyn Write>, Error> {
    let mut w: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(w, "# dopasym v{VERSION} {echo}")?;
    Ok(w)
}

fn build_system(fam: &FamilyArgs, n: usize, kmax: usize, prec: u32) -> Result<OrthoSystem, Error> {
    let ns = NodeSet::uniform(n, prec);
    let w = make_weights(fam.spec(n)?, &ns)?;
    stieltjes_recurrence(&w, kmax)
}

fn family_measure(fam: &FamilyArgs, c: f64) -> Result<EquilibriumMeasure, Error> {
    match fam.family.as_str() {
        "hahn" => hahn_equilibrium(
            fam.a_param.ok_or_else(|| Error::BadParams("missing --A".into()))?,
            fam.b_param.ok_or_else(|| Error::BadParams("missing --B".into()))?,
            c,
        ),
        "assoc-hahn" => Ok(dual_measure(&hahn_equilibrium(
            fam.a_param.ok_or_else(|| Error::BadParams("missing --A".into()))?,
            fam.b_param.ok_or_else(|| Error::BadParams("missing --B".into()))?,
            1.0 - c,
        )?)),
        "krawtchouk" => krawtchouk_equilibrium(
            fam.p.ok_or_else(|| Error::BadParams("missing --p".into()))?,
            fam.q.ok_or_else(|| Error::BadParams("missing --q".into()))?,
            c,
        ),
        other => Err(Error::BadParams(format!("no equilibrium for family '{other}'"))),
    }
}

fn outer_model_for(
    fam: &FamilyArgs,
    w: &WeightFamily,
    c: f64,
    n: usize,
    k: usize,
) -> Result<OuterModel, Error> {
    let measure = family_measure(fam, c)?;
    let phi = external_field(w);
    let kappa = k as f64 - c * n as f64;
    build_outer_model(&measure, phi, w.eta.clone(), w.eta_prime.clone(), kappa, n)
}

fn run_poly(args: &PolyArgs) -> Result<(), Error> {
    let prec = args.prec.unwrap_or_else(env_prec);
    let sys = build_system(&args.family, args.n, args.kmax, prec)?;
    let mut out = open_out(
        &args.out,
        &format!("poly {} N={} kmax={} prec={}", args.family.echo(), args.n, args.kmax, prec),
    )?;
    sys.write_csv(&mut out)?;
    if let Some(k) = args.zeros {
        let zeros = sys.zeros(k)?;
        writeln!(out, "# zeros of degree {k}")?;
        writeln!(out, "j,zero")?;
        for (j, z) in zeros.iter().enumerate() {
            writeln!(out, "{j},{:.30e}", z)?;
        }
    }
    Ok(())
}

fn run_equilibrium(args: &EquilibriumArgs) -> Result<(), Error> {
    let measure = if args.qp {
        let n_probe = 64;
        let ns = NodeSet::uniform(n_probe, 64);
        let w = make_weights(args.family.spec(n_probe)?, &ns)?;
        let phi = external_field(&w);
        let rho0: RealFn = Arc::new(|_| 1.0);
        solve_equilibrium_qp(&phi, &rho0, 0.0, 1.0, args.c, args.grid)?
    } else {
        family_measure(&args.family, args.c)?
    };
    let n_probe = 64;
    let ns = NodeSet::uniform(n_probe, 64);
    let w = make_weights(args.family.spec(n_probe)?, &ns)?;
    let phi = external_field(&w);
    let report = verify_variational(&measure, &phi, args.c)?;
    let mut out = open_out(
        &args.out,
        &format!(
            "equilibrium {} c={} qp={} grid={}",
            args.family.echo(),
            args.c,
            args.qp,
            args.grid
        ),
    )?;
    measure.write_csv(&mut out, args.grid)?;
    writeln!(
        out,
        "# variational band_residual={:.17e} void_margin={:.17e} sat_margin={:.17e} ell_c={:.17e}",
        report.band_residual, report.void_margin, report.sat_margin, measure.ell_c
    )?;
    if let Some(jp) = &args.json {
        let summary = measure.summary();
        let blob = serde_json::json!({
            "summary": summary,
            "variational": report,
        });
        std::fs::write(jp, serde_json::to_string_pretty(&blob).unwrap())?;
    }
    Ok(())
}

fn run_asymptotics(args: &AsymptoticsArgs) -> Result<(), Error> {
    let prec = args.prec.unwrap_or_else(env_prec);
    let mut out = open_out(
        &args.out,
        &format!(
            "asymptotics {} c={} N={:?} prec={}",
            args.family.echo(),
            args.c,
            args.n_list,
            prec
        ),
    )?;
    writeln!(out, "theorem,N,test_point,scaled_exact,approx_factor,scaled_error")?;
    for &n in &args.n_list {
        let k = (args.c * n as f64).round() as usize;
        let kmax = (k + 2).min(n - 1);
        let ns = NodeSet::uniform(n, prec);
        let w = make_weights(args.family.spec(n)?, &ns)?;
        let sys = stieltjes_recurrence(&w, kmax)?;
        let model = outer_model_for(&args.family, &w, args.c, n, k)?;
        let (alpha, beta) = model.measure.bands[0];
        let mut rows: Vec<(String, f64, RegionTag)> = Vec::new();
        rows.push(("outer".into(), model.measure.b + 1.0, RegionTag::Outer));
        for &rel in &[0.2, 0.5, 0.8] {
            rows.push(("band".into(), alpha + rel * (beta - alpha), RegionTag::Band));
        }
        let gaps = model.measure.gaps();
        for (gi, &(lo, hi)) in gaps.iter().enumerate() {
            if hi - lo < 1e-9 {
                continue;
            }
            let side = if gi == 0 { EdgeSide::Left } else { EdgeSide::Right };
            let tag = match model.measure.gap_types[gi] {
                GapType::Void => RegionTag::Void(side),
                GapType::Saturated => RegionTag::Saturated(side),
            };
            let name = match model.measure.gap_types[gi] {
                GapType::Void => "void",
                GapType::Saturated => "saturated",
            };
            for &rel in &[0.3, 0.7] {
                rows.push((name.into(), lo + rel * (hi - lo), tag));
            }
            if model.measure.gap_types[gi] == GapType::Saturated {
                let x_edge = if gi == 0 { model.measure.a } else { model.measure.b };
                let x = x_edge + if gi == 0 { 0.3 / n as f64 } else { -0.3 / n as f64 };
                rows.push(("hard_edge".into(), x, RegionTag::HardEdge(side)));
            }
        }
        // Airy points at τ ≈ {−2, 0, 2} around each edge
        for (side, edge, gtype) in [
            (EdgeSide::Left, alpha, model.measure.gap_types[0]),
            (EdgeSide::Right, beta, model.measure.gap_types[1]),
        ] {
            for &target in &[-2.0f64, 0.0, 2.0] {
                let mut best = (f64::INFINITY, edge);
                for i in -300..=300 {
                    let x = edge + i as f64 * 1e-4 * (beta - alpha);
                    if x <= model.measure.a || x >= model.measure.b {
                        continue;
                    }
                    if let Ok(t) = model.tau_map(side, gtype, x) {
                        if (t - target).abs() < best.0 {
                            best = ((t - target).abs(), x);
                        }
                    }
                }
                rows.push(("airy_edge".into(), best.1, RegionTag::AiryEdge(side, gtype)));
            }
        }
        for (name, x, tag) in rows {
            let ap = approx_pi(&model, tag, Complex64::new(x, 0.0))?;
            let ex = scaled_exact(&sys, k, x, ap.log_scale);
            let err = (ex - ap.factor.re).hypot(ap.factor.im);
            writeln!(
                out,
                "{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
                name, n, x, ex, ap.factor.re, err
            )?;
        }
        // recurrence-coefficient predictions
        let pred = predicted_recurrence(&model);
        writeln!(
            out,
            "recurrence_a,{},{:.17e},{:.17e},{:.17e},{:.17e}",
            n,
            0.5 * (alpha + beta),
            sys.a_coeffs[k].to_f64(),
            pred.a_k,
            (sys.a_coeffs[k].to_f64() - pred.a_k).abs()
        )?;
        writeln!(
            out,
            "recurrence_b,{},{:.17e},{:.17e},{:.17e},{:.17e}",
            n,
            0.25 * (beta - alpha),
            sys.b_coeffs[k - 1].to_f64(),
            pred.b_km1,
            (sys.b_coeffs[k - 1].to_f64() - pred.b_km1).abs()
        )?;
        // band-zero model quality
        let zeros = sys.zeros(k)?;
        let predicted = predicted_band_zeros(&model)?;
        let mut worst = 0.0f64;
        for p in &predicted {
            let mut bestd = f64::INFINITY;
            for z in &zeros {
                bestd = bestd.min((z.to_f64() - p).abs());
            }
            worst = worst.max(bestd);
        }
        writeln!(
            out,
            "band_zeros,{},{:.17e},{},{},{:.17e}",
            n,
            worst,
            predicted.len(),
            zeros.len(),
            worst
        )?;
        let _ = classify_point(&model.measure, Complex64::new(0.5, 0.0), n);
    }
    Ok(())
}

fn run_kernel(args: &KernelArgs) -> Result<(), Error> {
    let prec = args.prec.unwrap_or_else(env_prec);
    let sys = build_system(&args.family, args.n, args.k, prec)?;
    let kern = cd_kernel(&sys, args.k)?;
    let mut out = open_out(
        &args.out,
        &format!(
            "kernel {} N={} k={} window={} seed={}",
            args.family.echo(),
            args.n,
            args.k,
            args.window,
            args.seed
        ),
    )?;
    writeln!(out, "stat,value")?;
    writeln!(out, "trace,{:.17e}", kern.trace())?;
    writeln!(out, "trace_minus_k,{:.17e}", kern.trace() - args.k as f64)?;
    writeln!(out, "projection_residual,{:.17e}", kern.projection_residual())?;
    writeln!(out, "hole_trace,{:.17e}", hole_kernel(&kern).trace())?;
    let c = args.c.unwrap_or(args.k as f64 / args.n as f64);
    if let Ok(measure) = family_measure(&args.family, c) {
        let (albe, bebe) = measure.bands[0];
        let x = 0.5 * (albe + bebe);
        let (dev, q) = sine_compare(&kern, &measure, x, args.window);
        writeln!(out, "sine_deviation,{:.17e}", dev)?;
        writeln!(out, "sine_q,{:.17e}", q)?;
        if measure.gap_types[1] == GapType::Void {
            if let Some(h) = measure.hahn.as_ref() {
                let bcoef = dopasym::equilibrium::hahn_edge_coeff(h, false, false);
                let (adev, cnt) =
                    dopasym::kernels::airy_compare(&kern, &measure, bebe, false, bcoef, 2.5)?;
                writeln!(out, "airy_deviation,{:.17e}", adev)?;
                writeln!(out, "airy_points,{cnt}")?;
            }
        }
    }
    if let Some(s) = args.samples {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
        writeln!(out, "# samples: newline-delimited index lists")?;
        for _ in 0..s {
            let cfg = sample_dpp(&kern, &mut rng)?;
            let line: Vec<String> = cfg.iter().map(|i| i.to_string()).collect();
            writeln!(out, "sample,{}", line.join(" "))?;
        }
    }
    Ok(())
}

fn run_tw(args: &TwArgs) -> Result<(), Error> {
    let mut out = open_out(
        &args.out,
        &format!(
            "tw s=[{},{}] step={} quad={}",
            args.s_min, args.s_max, args.step, args.quad
        ),
    )?;
    writeln!(out, "s,cdf")?;
    let steps = ((args.s_max - args.s_min) / args.step).round() as usize;
    for i in 0..=steps {
        let s = args.s_min + args.step * i as f64;
        writeln!(out, "{:.17e},{:.17e}", s, tracy_widom_cdf(s, args.quad))?;
    }
    Ok(())
}

fn run_hexagon(args: &HexagonArgs) -> Result<(), Error> {
    let need =
        |x: Option<u64>, name: &str| x.ok_or_else(|| Error::BadParams(format!("missing --{name}")));
    match args.action.as_str() {
        "count" => {
            let (a, b, c) = (need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
            let mut out = open_out(&args.out, &format!("hexagon count a={a} b={b} c={c}"))?;
            writeln!(out, "tilings,{}", count_tilings(a, b, c))?;
            Ok(())
        }
        "enumerate" => {
            let (a, b, c) = (need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
            let ts = enumerate_tilings(a, b, c)?;
            let mut out = open_out(&args.out, &format!("hexagon enumerate a={a} b={b} c={c}"))?;
            writeln!(out, "index,heights")?;
            for (i, t) in ts.iter().enumerate() {
                let rows: Vec<String> = t
                    .heights
                    .iter()
                    .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                    .collect();
                writeln!(out, "{},{}", i, rows.join(";"))?;
            }
            Ok(())
        }
        "sample" => {
            let (a, b, c) = (need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
            let m = need(args.m, "m")?;
            let prec = args.prec.unwrap_or_else(env_prec);
            let spec = HexagonSpec::new(a, b, c, m)?;
            let (_, w, k) = hexagon_ensemble(&spec, prec)?;
            let sys = stieltjes_recurrence(&w, k)?;
            let kern = cd_kernel(&sys, k)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            let mut out = open_out(
                &args.out,
                &format!(
                    "hexagon sample a={a} b={b} c={c} m={m} samples={} seed={}",
                    args.samples, args.seed
                ),
            )?;
            for _ in 0..args.samples {
                let cfg = sample_dpp(&kern, &mut rng)?;
                let line: Vec<String> = cfg.iter().map(|i| i.to_string()).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
            Ok(())
        }
        "arctic" => {
            let (aa, bb, cc) = (
                args.aa.ok_or_else(|| Error::BadParams("missing --A".into()))?,
                args.bb.ok_or_else(|| Error::BadParams("missing --B".into()))?,
                args.cc.ok_or_else(|| Error::BadParams("missing --C".into()))?,
            );
            let taus: Vec<f64> = (1..args.grid)
                .map(|i| (aa + bb) * i as f64 / args.grid as f64)
                .collect();
            let pts = arctic_boundary(aa, bb, cc, &taus);
            let mut out = open_out(
                &args.out,
                &format!("hexagon arctic A={aa} B={bb} C={cc} grid={}", args.grid),
            )?;
            writeln!(out, "tau,alpha,beta,x,y_lower,y_upper,ok")?;
            for p in pts {
                writeln!(
                    out,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                    p.tau, p.alpha, p.beta, p.lower.0, p.lower.1, p.upper.1, p.ok
                )?;
            }
            Ok(())
        }
        "edge-stats" => {
            let scales = if args.scales.is_empty() {
                vec![16, 32]
            } else {
                args.scales.clone()
            };
            let prec = args.prec.unwrap_or_else(env_prec);
            let stats = edge_fluctuation_stats(&scales, args.samples, args.seed, prec)?;
            let mut out = open_out(
                &args.out,
                &format!(
                    "hexagon edge-stats scales={scales:?} samples={} seed={}",
                    args.samples, args.seed
                ),
            )?;
            writeln!(out, "n,s,empirical,tracy_widom,ks")?;
            for st in stats {
                for (s, emp, tw) in &st.table {
                    writeln!(
                        out,
                        "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                        st.n_scale, s, emp, tw, st.ks_distance
                    )?;
                }
            }
            Ok(())
        }
        "svg" => {
            let (a, b, c) = (need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?);
            let ts = enumerate_tilings(a, b, c)?;
            if args.index >= ts.len() {
                return Err(Error::BadParams(format!(
                    "index {} out of range ({} tilings)",
                    args.index,
                    ts.len()
                )));
            }
            let svg = tiling_to_svg(&ts[args.index], a as usize, b as usize, c as usize);
            match &args.out {
                Some(p) => std::fs::write(p, svg)?,
                None => print!("{svg}"),
            }
            Ok(())
        }
        other => Err(Error::BadParams(format!("unknown hexagon action '{other}'"))),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BadParams(_)
        | Error::BadSpec(_)
        | Error::DegreeOutOfRange(_)
        | Error::NodeMismatch
        | Error::NonPositiveDensity { .. }
        | Error::Unnormalized { .. }
        | Error::ExceptionalC { .. }
        | Error::WrongGapType(_)
        | Error::EdgeMismatch(_)
        | Error::EdgeTypeMismatch(_)
        | Error::RegionMismatch(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() {
    let cli = Cli::parse();
    let command = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("dopasym: cannot read config: {e}");
                    std::process::exit(2);
                }
            };
            match serde_json::from_str::<Command>(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("dopasym: bad config: {e}");
                    std::process::exit(2);
                }
            }
        }
        None => cli.command,
    };
    let result = match &command {
        Command::Poly(a) => run_poly(a),
        Command::Equilibrium(a) => run_equilibrium(a),
        Command::Asymptotics(a) => run_asymptotics(a),
        Command::Kernel(a) => run_kernel(a),
        Command::Tw(a) => run_tw(a),
        Command::Hexagon(a) => run_hexagon(a),
    };
    if let Err(e) = result {
        eprintln!("dopasym: {e}");
        std::process::exit(exit_code_for(&e));
    }
}
