//! Subcommand implementations.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use steinlab::gaussian::{gaussian_sweep, GaussianPoint};
use steinlab::hypothesis_testing::{exponent_curve, Strategy};
use steinlab::inequalities::{plog2_max, plog2_max_oracle_detail, stress_lemma2, stress_lemma_c1, stress_lemma_c2, StressReport};
use steinlab::info_spectrum::{classical_errors, classical_np, spectral_functionals, spectral_grid, threshold_test, DistributionPair};
use steinlab::measurement_design::{
    chernoff_markov_bound, design_measurement, sigma_spectrum_under_rho, variance_identity_gap, ChernoffPoint, DesignReport,
};
use steinlab::numerics::least_squares;
use steinlab::operator_algebra::{relative_entropy, tensor_power};
use steinlab::schur_weyl::{irreducible_decomposition, verify_block_commutativity, SchurSummary};
use steinlab_acceptance::CRITERIA;

use crate::config::{self, check_epsilon, field_error, io_error, merge, n_values, require, CliError, ComplexArg, ConfigFile, StateSource};
use crate::output::{write_json, write_manifest, write_rows, Ctx};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchurArgs {
    /// Number of tensor factors.
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random product states used for the commutator check.
    #[arg(long)]
    pub trials: Option<usize>,
    /// JSON output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn schur(ctx: &Ctx, flags: &SchurArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (SchurArgs, Value) = merge(flags, cfg)?;
    let n = require(a.n, "n")?;
    let k = a.k.unwrap_or(2);
    if n == 0 || k < 2 {
        return Err(field_error(if n == 0 { "n" } else { "k" }, "need n >= 1 and k >= 2"));
    }
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let d = irreducible_decomposition(n, k, seed)?;
    let norm = verify_block_commutativity(&d, a.trials.unwrap_or(20), seed)?;
    let summary = SchurSummary::new(&d, norm);
    if let Some(out) = &a.out {
        write_json(out, &summary)?;
    }
    ctx.emit(&summary, || {
        format!(
            "n={} k={} blocks={} w={} bound={} max_commutator_norm={:.3e}",
            summary.n,
            summary.k,
            summary.block_dims.len(),
            summary.w,
            summary.bound,
            summary.max_commutator_norm
        )
    });
    write_manifest(ctx, Some(seed), &merged, &a.out.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignArgs {
    /// Null state: JSON file with {dim, re, im} or a list of real rows.
    #[arg(long)]
    pub rho: Option<StateSource>,
    /// Alternative state (must be faithful).
    #[arg(long)]
    pub sigma: Option<StateSource>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Levels `a` at which to evaluate the Chernoff tail bound, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn design(ctx: &Ctx, flags: &DesignArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (DesignArgs, Value) = merge(flags, cfg)?;
    let rho = require(a.rho, "rho")?.load("rho")?;
    let sigma = require(a.sigma, "sigma")?.load("sigma")?;
    let n = require(a.n, "n")?;
    if n == 0 {
        return Err(field_error("n", "must be positive"));
    }
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let d = irreducible_decomposition(n, rho.dim(), seed)?;
    let dm = design_measurement(&rho, &sigma, &d)?;
    let rho_n = tensor_power(&rho, n)?;
    let spectrum = sigma_spectrum_under_rho(&dm, &rho_n, &tensor_power(&sigma, n)?, n)?;
    let gap = match variance_identity_gap(&dm, &rho, &sigma, n) {
        Ok(g) => Some(g),
        Err(e) if matches!(e.kind, steinlab::ErrorKind::IdentityNotApplicable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let chernoff = a
        .a
        .unwrap_or_default()
        .into_iter()
        .map(|level| {
            Ok(ChernoffPoint { a: level, bound: chernoff_markov_bound(&dm, &rho_n, n, level)?, tail: spectrum.p_tail_above(level) })
        })
        .collect::<steinlab::Result<Vec<_>>>()?;
    let report = DesignReport {
        n,
        k: rho.dim(),
        block_dims: d.block_dims.clone(),
        joint_block_dims: dm.joint_blocks.ranks(),
        outcomes: dm.m.len(),
        spectrum,
        variance_identity_gap: gap,
        chernoff,
    };
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    let summary = json!({
        "n": n,
        "blocks": report.block_dims.len(),
        "joint_blocks": report.joint_block_dims.len(),
        "outcomes": report.outcomes,
        "variance_identity_gap": gap,
        "chernoff": report.chernoff,
    });
    ctx.emit(&summary, || {
        let mut s = format!(
            "n={n} blocks={} joint_blocks={} outcomes={} variance_identity_gap={}",
            report.block_dims.len(),
            report.joint_block_dims.len(),
            report.outcomes,
            gap.map_or("n/a".to_string(), |g| format!("{g:.3e}"))
        );
        for p in &report.chernoff {
            s += &format!("\na={} bound={:.6} tail={:.6e} exp(-n*bound)={:.6e}", p.a, p.bound, p.tail, (-(n as f64) * p.bound).exp());
        }
        s
    });
    write_manifest(ctx, Some(seed), &merged, &a.out.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentArgs {
    #[arg(long)]
    pub rho: Option<StateSource>,
    #[arg(long)]
    pub sigma: Option<StateSource>,
    /// Bound on the first error.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Explicit ascending list of n, overriding n-min/n-max.
    #[arg(long, value_delimiter = ',')]
    pub n_range: Option<Vec<usize>>,
    /// quantum_np, designed_measurement, naive_product_basis or all; comma separated.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also report both finite-n surrogates of the large-deviation exponent.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub dagger: Option<bool>,
}

#[derive(Serialize)]
struct ExponentRow {
    n: usize,
    alpha: f64,
    beta: f64,
    minus_log_beta_over_n: f64,
    strategy: &'static str,
    seed: u64,
}

fn strategies(names: Option<Vec<String>>) -> Result<Vec<Strategy>, CliError> {
    let names = names.unwrap_or_else(|| vec!["quantum_np".into()]);
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend(Strategy::ALL);
        } else {
            out.push(name.parse().map_err(|e| field_error("strategy", e))?);
        }
    }
    out.dedup();
    Ok(out)
}

pub fn exponent(ctx: &Ctx, flags: &ExponentArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (ExponentArgs, Value) = merge(flags, cfg)?;
    let rho = require(a.rho, "rho")?.load("rho")?;
    let sigma = require(a.sigma, "sigma")?.load("sigma")?;
    let eps = check_epsilon(a.eps.unwrap_or(0.05), "eps")?;
    let ns = n_values(a.n_range, a.n_min, a.n_max)?;
    let strategies = strategies(a.strategy)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let d = relative_entropy(&rho, &sigma)?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for s in strategies {
        let curve = exponent_curve(&rho, &sigma, eps, &ns, s, seed)?;
        for (i, &n) in curve.n_values.iter().enumerate() {
            let beta = curve.beta_values[i];
            rows.push(ExponentRow {
                n,
                alpha: curve.alpha_values[i],
                beta,
                minus_log_beta_over_n: -beta.ln() / n as f64,
                strategy: s.name(),
                seed,
            });
        }
        let dagger = a.dagger.unwrap_or(false).then(|| curve.dagger_surrogates());
        summaries.push(json!({
            "strategy": s.name(),
            "slope": curve.slope_estimate,
            "rms_residual": curve.rms_residual,
            "fit_n": &curve.n_values[curve.fit_start..],
            "relative_entropy": d,
            "dagger": dagger,
        }));
    }
    write_rows(ctx, a.csv.as_deref(), &rows)?;
    if a.csv.is_some() || ctx.json {
        for s in &summaries {
            ctx.emit(s, || {
                let mut line = format!(
                    "{}: slope {:.6} nats/copy over n={} (D = {:.6}, rms {:.2e})",
                    s["strategy"].as_str().unwrap_or(""),
                    s["slope"].as_f64().unwrap_or(f64::NAN),
                    s["fit_n"],
                    d,
                    s["rms_residual"].as_f64().unwrap_or(f64::NAN)
                );
                if !s["dagger"].is_null() {
                    line += &format!("; dagger limsup_rule {} liminf_rule {}", s["dagger"]["limsup_rule"], s["dagger"]["liminf_rule"]);
                }
                line
            });
        }
    }
    write_manifest(ctx, Some(seed), &merged, &a.csv.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IspecArgs {
    /// JSON list of {n, p: [...], q: [...]}.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Level for the Neyman–Pearson summary.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct IspecRow {
    n: usize,
    lambda: f64,
    alpha: f64,
    beta: f64,
    e_minus_n_lambda: f64,
}

fn load_pairs(path: &Path) -> Result<Vec<DistributionPair>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| field_error("pairs", format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let pairs: Vec<DistributionPair> = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| field_error(&format!("pairs{}", e.path()).replace("pairs.", "pairs"), e.into_inner()))?;
    if pairs.is_empty() {
        return Err(field_error("pairs", "empty list"));
    }
    for (i, p) in pairs.iter().enumerate() {
        p.validate().map_err(|e| field_error(&format!("pairs[{i}]"), e))?;
    }
    Ok(pairs)
}

pub fn ispec(ctx: &Ctx, flags: &IspecArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (IspecArgs, Value) = merge(flags, cfg)?;
    let pairs = load_pairs(&require(a.pairs, "pairs")?)?;
    let eps = check_epsilon(a.eps.unwrap_or(0.05), "eps")?;
    let mut rows = Vec::new();
    for dp in &pairs {
        for lambda in spectral_grid(dp) {
            let (alpha, beta) = classical_errors(dp, &threshold_test(dp, lambda));
            rows.push(IspecRow { n: dp.n, lambda, alpha, beta, e_minus_n_lambda: (-(dp.n as f64) * lambda).exp() });
        }
    }
    write_rows(ctx, a.csv.as_deref(), &rows)?;
    if a.csv.is_some() || ctx.json {
        let records = spectral_functionals(&pairs)?;
        for (dp, rec) in pairs.iter().zip(&records) {
            let np = classical_np(dp, eps)?;
            let summary = json!({
                "n": dp.n,
                "outcomes": dp.len(),
                "beta_star": np.beta_star,
                "alpha": np.alpha,
                "quantiles": rec.quantiles,
                "infinite_mass": rec.infinite_mass,
            });
            ctx.emit(&summary, || {
                let q: Vec<String> =
                    rec.quantiles.iter().map(|q| format!("delta {}: [{:.6}, {:.6}]", q.delta, q.lower, q.upper)).collect();
                format!(
                    "n={} beta*={:.6e} (alpha {:.4}) quantiles {} infinite_mass {}",
                    dp.n,
                    np.beta_star,
                    np.alpha,
                    q.join(", "),
                    rec.infinite_mass
                )
            });
        }
    }
    write_manifest(ctx, None, &merged, &a.csv.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IneqArgs {
    /// 2 (entropy bound), 3 (plog2 constant), c1 or c2 (operator inequalities).
    #[arg(long)]
    pub lemma: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for witness dumps on failure.
    #[arg(long)]
    pub witness_dir: Option<PathBuf>,
}

pub fn ineq(ctx: &Ctx, flags: &IneqArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, _): (IneqArgs, Value) = merge(flags, cfg)?;
    let lemma = require(a.lemma, "lemma")?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let report: StressReport = match lemma.as_str() {
        "2" => stress_lemma2(a.trials.unwrap_or(200), seed)?,
        "c1" => stress_lemma_c1(a.trials.unwrap_or(500), seed)?,
        "c2" => stress_lemma_c2(a.trials.unwrap_or(100), seed)?,
        "3" => return plog2_report(ctx),
        other => return Err(field_error("lemma", format!("expected 2, 3, c1 or c2, got '{other}'"))),
    };
    let witness_path = if report.passed() {
        None
    } else {
        let dir = a.witness_dir.unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let path = dir.join(format!("ineq-{}-witnesses.json", report.name));
        write_json(&path, &report.witnesses)?;
        Some(path)
    };
    let summary = json!({
        "lemma": lemma,
        "passed": report.passed(),
        "trials": report.trials,
        "checks": report.checks,
        "violations": report.violations,
        "extremal_slack": report.extremal,
        "tolerance": report.tolerance,
        "witnesses": witness_path.as_ref().map(|p| p.display().to_string()),
    });
    ctx.emit(&summary, || {
        let mut s = format!(
            "{} lemma {lemma}: {} checks, {} violations, extremal slack {:.6e} (tolerance {:.0e})",
            if report.passed() { "PASS" } else { "FAIL" },
            report.checks,
            report.violations,
            report.extremal,
            report.tolerance
        );
        if let Some(p) = &witness_path {
            s += &format!("\nwitnesses written to {}", p.display());
        }
        s
    });
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("cli::ineq: lemma {lemma} violated in {} checks", report.violations)))
    }
}

fn plog2_report(ctx: &Ctx) -> Result<(), CliError> {
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for k in 2..=4 {
        let closed = plog2_max(k)?;
        let oracle = plog2_max_oracle_detail(k, 1_000_000)?;
        worst = worst.max((closed - oracle.value).abs());
        rows.push(json!({"k": k, "closed_form": closed, "oracle": oracle}));
    }
    let passed = worst <= 1e-8;
    ctx.emit(&json!({"lemma": "3", "passed": passed, "max_deviation": worst, "rows": rows}), || {
        let mut s = format!("{} lemma 3: closed form vs oracle, max deviation {worst:.3e}", if passed { "PASS" } else { "FAIL" });
        for r in &rows {
            s += &format!(
                "\nk={} closed {:.10} oracle {:.10} interior {}",
                r["k"],
                r["closed_form"].as_f64().unwrap_or(f64::NAN),
                r["oracle"]["value"].as_f64().unwrap_or(f64::NAN),
                r["oracle"]["interior"]
            );
        }
        s
    });
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("cli::ineq: plog2 closed form deviates from the oracle by {worst:.3e}")))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianArgs {
    /// Null displacement as RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<ComplexArg>,
    /// Alternative displacement as RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Option<ComplexArg>,
    /// Mean thermal photon number.
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_range: Option<Vec<usize>>,
    /// Half-width of the acceptance window around |theta0 - theta1|.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fock cutoff; 0 or absent picks max(40, ceil(8 (nbar + n |theta0 - theta1|^2))) per n.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct GaussianRow {
    n: usize,
    alpha: f64,
    beta: f64,
    minus_log_beta_over_n: f64,
    #[serde(rename = "closed_form_D")]
    closed_form_d: f64,
}

pub fn gaussian(ctx: &Ctx, flags: &GaussianArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (GaussianArgs, Value) = merge(flags, cfg)?;
    let theta0 = require(a.theta0, "theta0")?.value();
    let theta1 = require(a.theta1, "theta1")?.value();
    let nbar = require(a.nbar, "nbar")?;
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(field_error("nbar", format!("must be positive, got {nbar}")));
    }
    let eps = require(a.eps, "eps")?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(field_error("eps", format!("must be positive, got {eps}")));
    }
    let ns = n_values(a.n_range, a.n_min, a.n_max)?;
    let pts: Vec<GaussianPoint> = gaussian_sweep(theta0, theta1, nbar, &ns, eps, a.cutoff.unwrap_or(0))?;
    let rows: Vec<GaussianRow> = pts
        .iter()
        .map(|p| GaussianRow {
            n: p.n,
            alpha: p.alpha,
            beta: p.beta,
            minus_log_beta_over_n: p.minus_log_beta_over_n,
            closed_form_d: p.closed_form_d,
        })
        .collect();
    write_rows(ctx, a.csv.as_deref(), &rows)?;
    if a.csv.is_some() || ctx.json {
        let xs: Vec<f64> = pts.iter().map(|p| p.n as f64).collect();
        let fit = |ys: Vec<f64>| least_squares(&xs, &ys).map(|f| f.slope);
        let slope = fit(pts.iter().map(|p| -p.beta.ln()).collect());
        let center = fit(pts.iter().map(|p| -p.beta_center.ln()).collect());
        let d = pts[0].closed_form_d;
        let summary = json!({"slope": slope, "centre_region_slope": center, "closed_form_D": d, "max_cutoff": pts.iter().map(|p| p.cutoff).max()});
        ctx.emit(&summary, || {
            let show = |v: Option<f64>| v.map_or("n/a".to_string(), |s| format!("{s:.6}"));
            format!("beta slope {} nats/copy (centre-region slope {}), closed-form D {d:.6}", show(slope), show(center))
        });
    }
    write_manifest(ctx, None, &merged, &a.csv.iter().map(PathBuf::as_path).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Artifact directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Subset of criteria, comma separated (default all).
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
}

pub fn selftest(ctx: &Ctx, flags: &SelftestArgs, cfg: Option<&ConfigFile>) -> Result<(), CliError> {
    let (a, merged): (SelftestArgs, Value) = merge(flags, cfg)?;
    let seed = a.seed.unwrap_or(steinlab_acceptance::DEFAULT_SEED);
    let dir = a.out.unwrap_or_else(|| PathBuf::from("steinlab-selftest"));
    let ids = a.criteria.unwrap_or_else(|| CRITERIA.to_vec());
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        return Err(field_error("criteria", format!("unknown criterion {bad}")));
    }
    let outcomes = steinlab_acceptance::selftest(&ids, seed, &dir, |o| {
        ctx.emit(o, || format!("{} [{:.1}s]", o.line(), o.elapsed_secs));
    })
    .map_err(|e| io_error(&dir, e))?;
    write_manifest(ctx, Some(seed), &merged, &[dir.join("summary.txt").as_path()])?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("cli::selftest: criteria {} failed", failed.join(", "))))
    }
}

/// Dispatch on the config file's `experiment` key; a `--dim-cap` flag beats the config's `dim_cap`.
pub fn run_config(ctx: &mut Ctx, path: &Path, dim_cap_flag: Option<usize>) -> Result<(), CliError> {
    let cfg = config::load_config(path)?;
    let experiment = require(cfg.experiment.clone(), "experiment")?;
    if let Some(cap) = dim_cap_flag.or(cfg.dim_cap) {
        steinlab::limits::set_dim_cap(cap);
    }
    let cfg = Some(&cfg);
    match experiment.as_str() {
        "schur" => {
            ctx.command = "schur";
            schur(ctx, &SchurArgs::default(), cfg)
        }
        "design" => {
            ctx.command = "design";
            design(ctx, &DesignArgs::default(), cfg)
        }
        "exponent" => {
            ctx.command = "exponent";
            exponent(ctx, &ExponentArgs::default(), cfg)
        }
        "ispec" => {
            ctx.command = "ispec";
            ispec(ctx, &IspecArgs::default(), cfg)
        }
        "ineq" => {
            ctx.command = "ineq";
            ineq(ctx, &IneqArgs::default(), cfg)
        }
        "gaussian" => {
            ctx.command = "gaussian";
            gaussian(ctx, &GaussianArgs::default(), cfg)
        }
        "selftest" => {
            ctx.command = "selftest";
            selftest(ctx, &SelftestArgs::default(), cfg)
        }
        other => Err(field_error("experiment", format!("unknown experiment '{other}'"))),
    }
}
