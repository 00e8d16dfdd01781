//! The `payne-quad` command line.
//!
//! Every subcommand prints (or writes with `--out`) a JSON report with
//! `"schema": 1`, except `table`, which emits CSV. Exit codes: 0 pass,
//! 1 property failure, 2 usage or configuration error, 3 cap exceeded.
//!
//! Caps may be overridden by environment variables:
//! `PAYNE_QUAD_CLOSURE_CAP`, `PAYNE_QUAD_PAIR_CAP`, `PAYNE_QUAD_POINT_CAP`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::closure::DEFAULT_CAP;
use crate::constructions::{
    conjugate_spec, normal_form, search_s4_params, Construction, ConstructionConfig, ConstructionParams, Variant,
};
use crate::error::{exit, Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::group::{check_theorem_main, CheckMode, GroupSpec, DEFAULT_PAIR_CAP};
use crate::invariants::{
    compare_claim_exact, compute_invariants, materialize, s2_upper_series_claim, shifted_claim, thompson,
    upper_central_series_small, verify_central_series_claim, verify_point_regular, verify_point_regular_sampled,
    InvariantOptions, NcCase, SMALL_ORDER_CAP,
};
use crate::quadrangle::{build_payne, build_wq, verify_gq, DEFAULT_POINT_CAP};
use crate::report::{write_output, Report};
use crate::tables::{run_row, to_csv, Preset, TABLE_SERIES_CAP};

#[derive(Parser, Debug)]
#[command(name = "payne-quad", version, about = "Point-regular groups of the Payne derived quadrangle of W(q)")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build W(q) (and optionally its Payne derivation) and check the axioms.
    Quad(QuadArgs),
    /// Validate a construction config and print the completed parameters.
    Build(BuildArgs),
    /// Check the closure conditions on T and theta over pairs of points.
    Check(CheckArgs),
    /// Check that the group acts regularly on the points.
    Regular(RegularArgs),
    /// Exponent, center, central series and Thompson subgroup.
    Invariants(InvariantArgs),
    /// Lower (and upper) central series, optionally against a claimed series.
    Series(SeriesArgs),
    /// Certify the Thompson subgroup.
    Thompson(ConfigArg),
    /// Conjugate a pre-normal-form construction into normal form and compare.
    Conjugate(ConjugateArgs),
    /// Reproduce a preset table as CSV.
    Table(TableArgs),
    /// Search parameters satisfying conditions (i)-(v) of S4.
    SearchParams(SearchArgs),
}

#[derive(Args, Debug)]
pub struct ConfigArg {
    /// Construction config (JSON).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Args, Debug)]
pub struct QuadArgs {
    /// Field, "p^m" or "p^m/c0,..,cm".
    #[arg(long)]
    pub field: String,
    /// Also build and check the Payne derivation.
    #[arg(long)]
    pub payne: bool,
    #[arg(long)]
    pub point_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Also run the closure check: "exhaustive" or "sample:N:SEED".
    #[arg(long)]
    pub check: Option<String>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Check every pair.
    #[arg(long, conflicts_with_all = ["mode", "samples"])]
    pub exhaustive: bool,
    /// "exhaustive" or "sample:N:SEED".
    #[arg(long)]
    pub mode: Option<String>,
    /// Number of sampled pairs.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub pair_cap: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RegularArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Sampled (element, line) pairs for q <= 27.
    #[arg(long, default_value_t = 1000)]
    pub lines: u64,
    /// Sampled elements for larger q.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct InvariantArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::invariants::EXPONENT_SAMPLES)]
    pub exponent_samples: u64,
    /// Cap on central series terms.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub no_thompson: bool,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub cap: Option<usize>,
    /// Also compute the upper series (q <= 27).
    #[arg(long)]
    pub upper: bool,
    /// Claimed upper series for S2 with mu_C = 1: "zero", "monomial:K" or
    /// "one-minus-g:K".
    #[arg(long)]
    pub claim: Option<String>,
    /// Samples per level for the claim.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Skip the lower series (useful with --claim at large q).
    #[arg(long)]
    pub no_lower: bool,
}

#[derive(Args, Debug)]
pub struct ConjugateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Sampled points when the group is too large to compare exhaustively.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, default_value = "S4")]
    pub variant: String,
    #[arg(long = "mu-b")]
    pub mu_b: Option<String>,
    #[arg(long = "mu-c")]
    pub mu_c: Option<String>,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::PASS };
        }
    };
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(passed) => {
            if passed {
                exit::PASS
            } else {
                exit::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Table(a) => cmd_table(a, out),
        Command::Quad(a) => emit(cmd_quad(a)?, out),
        Command::Build(a) => emit(cmd_build(a)?, out),
        Command::Check(a) => emit(cmd_check(a)?, out),
        Command::Regular(a) => emit(cmd_regular(a)?, out),
        Command::Invariants(a) => emit(cmd_invariants(a)?, out),
        Command::Series(a) => emit(cmd_series(a)?, out),
        Command::Thompson(a) => emit(cmd_thompson(a)?, out),
        Command::Conjugate(a) => emit(cmd_conjugate(a)?, out),
        Command::SearchParams(a) => emit(cmd_search(a)?, out),
    }
}

fn emit(report: Report, out: Option<&Path>) -> Result<bool> {
    report.emit(out)?;
    Ok(report.passed)
}

fn cap_from<T: FromStr + Copy>(flag: Option<T>, var: &str, default: T) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(var) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{var}={s:?} is not a number"))),
        Err(_) => Ok(default),
    }
}

fn load(path: &Path) -> Result<Construction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ConstructionConfig::from_json(&text)?.build()
}

fn base_report(command: &str, c: &Construction, result: impl serde::Serialize) -> Result<Report> {
    Ok(Report::new(command, result)?
        .with_field(c.ctx())
        .with_config(c.params_json()))
}

fn cmd_quad(a: &QuadArgs) -> Result<Report> {
    let ctx = FieldCtx::parse(&a.field)?;
    let cap = cap_from(a.point_cap, "PAYNE_QUAD_POINT_CAP", DEFAULT_POINT_CAP)?;
    let q = ctx.q();
    let wq = build_wq(&ctx, cap)?;
    let wq_report = verify_gq(&wq, q, q);
    let mut passed = wq_report.passed;
    let mut result = json!({ "wq": wq_report });
    if a.payne {
        let qp = build_payne(&ctx, &wq)?;
        let r = verify_gq(&qp, q - 1, q + 1);
        passed &= r.passed;
        result["payne"] = serde_json::to_value(&r).expect("serializes");
    }
    Ok(Report::new("quad", result)?.with_field(&ctx).with_passed(passed))
}

fn cmd_build(a: &BuildArgs) -> Result<Report> {
    let c = load(&a.config)?;
    let mut result = json!({
        "label": c.spec.label(),
        "order": c.spec.order(),
        "generators": c.spec.generators().iter().map(|g| g.display(c.ctx())).collect::<Vec<_>>(),
    });
    let mut passed = true;
    if let Some(mode) = &a.check {
        let cap = cap_from(None, "PAYNE_QUAD_PAIR_CAP", DEFAULT_PAIR_CAP)?;
        let r = check_theorem_main(&c.spec, CheckMode::parse(mode)?, cap)?;
        passed = r.passed;
        result["check"] = serde_json::to_value(&r).expect("serializes");
    }
    Ok(base_report("build", &c, result)?.with_passed(passed))
}

fn cmd_check(a: &CheckArgs) -> Result<Report> {
    let c = load(&a.config)?;
    let q = c.ctx().q();
    let mode = if a.exhaustive {
        CheckMode::Exhaustive
    } else if let Some(m) = &a.mode {
        CheckMode::parse(m)?
    } else if let Some(n) = a.samples {
        CheckMode::Sample { n, seed: a.seed }
    } else if q <= 9 {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sample {
            n: 1_000_000,
            seed: a.seed,
        }
    };
    let cap = cap_from(a.pair_cap, "PAYNE_QUAD_PAIR_CAP", DEFAULT_PAIR_CAP)?;
    let r = check_theorem_main(&c.spec, mode, cap)?;
    let passed = r.passed;
    let mut rep = base_report("check", &c, r)?.with_passed(passed);
    if let CheckMode::Sample { seed, .. } = mode {
        rep = rep.with_seed(seed);
    }
    Ok(rep)
}

fn cmd_regular(a: &RegularArgs) -> Result<Report> {
    let c = load(&a.config)?;
    let spec = &c.spec;
    let r = if spec.order() <= SMALL_ORDER_CAP {
        let qp = if a.lines > 0 {
            let cap = cap_from(None, "PAYNE_QUAD_POINT_CAP", DEFAULT_POINT_CAP)?;
            let wq = build_wq(c.ctx(), cap)?;
            Some(build_payne(c.ctx(), &wq)?)
        } else {
            None
        };
        verify_point_regular(spec, qp.as_ref(), a.lines, a.seed)?
    } else {
        verify_point_regular_sampled(spec, a.samples, a.seed)
    };
    let passed = r.passed;
    Ok(base_report("regular", &c, r)?.with_passed(passed).with_seed(a.seed))
}

fn cmd_invariants(a: &InvariantArgs) -> Result<Report> {
    let c = load(&a.config)?;
    let opts = InvariantOptions {
        seed: a.seed,
        exponent_samples: a.exponent_samples,
        series_cap: cap_from(a.cap, "PAYNE_QUAD_CLOSURE_CAP", DEFAULT_CAP)?,
        thompson: !a.no_thompson,
    };
    let r = compute_invariants(&c.spec, &opts)?;
    eprintln!("invariants computed in {} ms", r.elapsed_ms);
    Ok(base_report("invariants", &c, r)?.with_seed(a.seed))
}

fn parse_claim(s: &str) -> Result<NcCase> {
    let bad = || Error::Parse(format!("claim {s:?}: expected zero, monomial:K or one-minus-g:K"));
    let (name, k) = match s.split_once(':') {
        Some((n, k)) => (n, Some(k.parse::<usize>().map_err(|_| bad())?)),
        None => (s, None),
    };
    match (name, k) {
        ("zero", None) => Ok(NcCase::Zero),
        ("monomial", Some(k)) => Ok(NcCase::Monomial { k }),
        ("one-minus-g", Some(k)) => Ok(NcCase::OneMinusG { k }),
        _ => Err(bad()),
    }
}

fn cmd_series(a: &SeriesArgs) -> Result<Report> {
    let c = load(&a.config)?;
    let spec = &c.spec;
    let ctx = c.ctx();
    let cap = cap_from(a.cap, "PAYNE_QUAD_CLOSURE_CAP", DEFAULT_CAP)?;
    let mut result = json!({});
    let mut passed = true;
    let lower = if a.no_lower {
        None
    } else {
        let s = crate::invariants::lower_central_series(spec, cap)?;
        result["lower"] = serde_json::to_value(s.summary()).expect("serializes");
        Some(s)
    };
    let small = spec.order() <= SMALL_ORDER_CAP;
    let upper = if a.upper {
        if !small {
            return Err(Error::cap(SMALL_ORDER_CAP as usize, "upper series needs q <= 27"));
        }
        let u = materialize(spec, SMALL_ORDER_CAP)?;
        let s = upper_central_series_small(spec, &u)?;
        result["upper"] = serde_json::to_value(s.summary()).expect("serializes");
        if let Some(l) = &lower {
            let same = l.class == s.class;
            result["lengths_agree"] = json!(same);
            passed &= same;
        }
        Some(s)
    } else {
        None
    };
    if let Some(claim) = &a.claim {
        let case = parse_claim(claim)?;
        if c.params.variant != Variant::S2 || c.params.mu_c != Some(FieldElem::ONE) {
            return Err(Error::InvalidParams("claims are stated for S2 with muC = 1".into()));
        }
        let levels = s2_upper_series_claim(ctx, c.l, case)?;
        let report = verify_central_series_claim(spec, &levels, a.samples, a.seed);
        let negative = verify_central_series_claim(spec, &shifted_claim(ctx, &levels), a.samples, a.seed);
        passed &= report.passed && !negative.passed;
        result["claim"] = json!({
            "case": case,
            "hypothesis_l_gt_1": c.l > 1,
            "report": report,
            "negative_control": {
                "shift": "Z~_i = Z_{i-1}",
                "passed": negative.passed,
                "first_failure": negative.first_failure,
            },
        });
        if let Some(u) = &upper {
            let exact = compare_claim_exact(ctx, &levels, u);
            result["claim"]["exact_match"] = json!(exact);
            result["claim"]["exact_class_match"] = json!(levels.len() == u.class);
        }
    }
    Ok(base_report("series", &c, result)?.with_passed(passed).with_seed(a.seed))
}

fn cmd_thompson(a: &ConfigArg) -> Result<Report> {
    let c = load(&a.config)?;
    let u = materialize(&c.spec, SMALL_ORDER_CAP)?;
    let r = thompson(&c.spec, &u)?;
    let passed = r.order().is_some();
    Ok(base_report("thompson", &c, r)?.with_passed(passed))
}

fn cmd_conjugate(a: &ConjugateArgs) -> Result<Report> {
    let pre = load(&a.config)?;
    let ctx = pre.ctx();
    let (h, target) = normal_form(&pre)?;
    let conj = conjugate_spec(&pre.spec, h)?;
    let norm = Construction::build(pre.spec.ctx_arc().clone(), target)?;
    let (compared, mismatch) = compare_specs(&conj, &norm.spec, a.samples, a.seed)?;
    let passed = mismatch.is_none();
    let result = json!({
        "conjugator": h.display(ctx),
        "normal_form": norm.params_json(),
        "mode": if conj.order() <= SMALL_ORDER_CAP { "exhaustive".to_string() } else { format!("sample:{}:seed{}", a.samples, a.seed) },
        "points_compared": compared,
        "mismatch": mismatch,
    });
    Ok(base_report("conjugate", &pre, result)?.with_passed(passed).with_seed(a.seed))
}

/// Pointwise comparison of two specs: every point when small, else samples.
pub fn compare_specs(x: &GroupSpec, y: &GroupSpec, samples: u64, seed: u64) -> Result<(u64, Option<String>)> {
    let ctx = x.ctx();
    let check = |pt: [FieldElem; 3]| {
        let (g, h) = (x.elem_at_point(pt), y.elem_at_point(pt));
        (g != h).then(|| format!("{} vs {}", g.display(ctx), h.display(ctx)))
    };
    if x.order() <= SMALL_ORDER_CAP {
        let mut n = 0;
        for g in y.enumerate(SMALL_ORDER_CAP)? {
            n += 1;
            if let Some(m) = check(g.point()) {
                return Ok((n, Some(m)));
            }
        }
        Ok((n, None))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples {
            let pt = [ctx.random(&mut rng), ctx.random(&mut rng), ctx.random(&mut rng)];
            if let Some(m) = check(pt) {
                return Ok((i + 1, Some(m)));
            }
        }
        Ok((samples, None))
    }
}

fn cmd_table(a: &TableArgs, out: Option<&Path>) -> Result<bool> {
    let preset = Preset::by_name(&a.preset)?;
    let cap = cap_from(a.cap, "PAYNE_QUAD_CLOSURE_CAP", TABLE_SERIES_CAP)?;
    let ctx = Arc::new(FieldCtx::parse(preset.field)?);
    let mut results = Vec::new();
    for row in &preset.rows {
        let r = run_row(&ctx, &preset, row, cap)?;
        eprintln!(
            "{} S1={}: class {} (expected {}) in {:.1}s",
            row.variant,
            row.s1_expanded,
            r.class,
            row.expected_class,
            r.elapsed.as_secs_f64()
        );
        results.push(r);
    }
    write_output(out, &to_csv(&results))?;
    Ok(results.iter().all(|r| r.matches && r.in_bound))
}

fn cmd_search(a: &SearchArgs) -> Result<Report> {
    let ctx = Arc::new(FieldCtx::parse(&a.field)?);
    let variant = Variant::from_str(&a.variant)?;
    let mut base = ConstructionParams::new(variant);
    if let Some(s) = &a.mu_b {
        base = base.with_mu_b(ctx.parse_elem(s)?);
    }
    if let Some(s) = &a.mu_c {
        base = base.with_mu_c(ctx.parse_elem(s)?);
    }
    if let Some(l) = a.lambda {
        base = base.with_lambda(l);
    }
    let c = search_s4_params(&ctx, base, a.seed, a.budget)?;
    let result = json!({ "found": true, "budget": a.budget });
    Ok(base_report("search-params", &c, result)?.with_seed(a.seed))
}
