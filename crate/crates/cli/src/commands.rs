//! Subcommand implementations.

use std::path::PathBuf;

use holosup::bergman::{basis_sum_diag, reproduce_check};
use holosup::bessel::{bessel_j, bessel_ref, certify_regime_bounds, BesselKind, XRule};
use holosup::forms::{
    delta, eta_form, eta_power_form, monomial_form, orthonormal_basis_full, petersson_norm, CuspForm, FormRecord,
    DEFAULT_COEFFS,
};
use holosup::modgroup::{GroupElement, Subgroup};
use holosup::multiplier::MultiplierSystem;
use holosup::report::{ScanReport, ScanSummary};
use holosup::spectral::{coeff_square_sum, poincare_coeff, KloostermanContext};
use holosup::supnorm::{
    lemma_suite, region_stability, stability_suite, theorem12_report, theorem3_scan, width_within_index, StabilityCheck,
    Theorem3Config,
};
use holosup::Complex64;
use serde_json::{json, Value};

use crate::args::{BergmanCmd, BesselCmd, CheckCmd, Cli, Command, FormsCmd, ScanCmd, SuiteCmd};
use crate::config::RunConfig;
use crate::output::{json_text, to_value, write_csv};
use crate::CliError;

const DEFAULT_WEIGHT: f64 = 12.0;
const DEFAULT_C_MAX: i64 = 10_000;
const DEFAULT_KERNEL_TOL: f64 = 1e-8;
/// Quadrature tolerance of the reproducing check; the 2-d integral is the
/// slowest default computation.
const DEFAULT_REPRODUCE_TOL: f64 = 1e-6;
const DEFAULT_NORM_TOL: f64 = 1e-10;
const DEFAULT_BASIS_TOL: f64 = 1e-10;
const DEFAULT_LEMMA_COUNT: usize = 100;
const DEFAULT_THEOREM12_DENSITY: usize = 10;

/// The effective configuration: defaults, then the file, then the flags.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    Ok(file.overlay(cli.global.as_config()))
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn group(&self) -> Result<Option<Subgroup>, CliError> {
        self.cfg.group.as_deref().map(|g| g.parse::<Subgroup>().map_err(CliError::from)).transpose()
    }

    fn system(&self) -> Result<MultiplierSystem, CliError> {
        let desc = match (&self.cfg.multiplier, self.cfg.weight) {
            (Some(m), _) => m.clone(),
            (None, w) => format!("trivial:k={}", w.unwrap_or(DEFAULT_WEIGHT)),
        };
        Ok(MultiplierSystem::parse(&desc, self.group()?.as_ref())?)
    }

    fn c_max(&self, default: i64) -> i64 {
        self.cfg.c_max.unwrap_or(default)
    }

    fn coeffs(&self) -> usize {
        self.cfg.coeffs.unwrap_or(DEFAULT_COEFFS)
    }

    /// A form from its descriptor, restricted to the configured group.
    fn form(&self, desc: &str) -> Result<CuspForm, CliError> {
        let f = parse_form(desc, self.coeffs())?;
        match self.group()? {
            Some(g) if &g != f.group() => Ok(f.restrict(g)?),
            _ => Ok(f),
        }
    }

    fn emit(&self, v: &Value) -> Result<(), CliError> {
        let text = json_text(v);
        match &self.cfg.json {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_csv(&self, reports: &[&ScanReport]) -> Result<(), CliError> {
        match &self.cfg.csv {
            Some(p) => write_csv(p, reports),
            None => Ok(()),
        }
    }

    /// Writes the per-bound summaries of a report and its rows.
    fn emit_report(&self, r: &ScanReport) -> Result<(), CliError> {
        for n in &r.notes {
            eprintln!("note: {n}");
        }
        self.emit_csv(&[r])?;
        self.emit(&to_value(&summaries(r)))?;
        verdict(r.passed, &r.suite)
    }
}

fn verdict(passed: bool, what: &str) -> Result<(), CliError> {
    if passed {
        Ok(())
    } else {
        Err(CliError::Check(format!("{what} did not pass")))
    }
}

/// One summary per bound name, in name order.
pub fn summaries(r: &ScanReport) -> Vec<ScanSummary> {
    r.fitted.keys().map(|name| r.summary_for(name)).collect()
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_numbers<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(usage(format!("{what} needs {n} comma-separated numbers, got '{s}'")));
    }
    parts.iter().map(|p| p.parse().map_err(|_| usage(format!("bad number '{p}' in {what}")))).collect()
}

/// `a,b,c,d`, or the identity when absent.
pub fn parse_tau(s: Option<&str>) -> Result<GroupElement, CliError> {
    match s {
        None => Ok(GroupElement::identity()),
        Some(s) => {
            let v: Vec<i64> = parse_numbers(s, 4, "--tau")?;
            Ok(GroupElement::new(v[0], v[1], v[2], v[3])?)
        }
    }
}

/// `x,y` with `y > 0`.
pub fn parse_point(s: &str, what: &str) -> Result<Complex64, CliError> {
    let v: Vec<f64> = parse_numbers(s, 2, what)?;
    if !(v[1] > 0.0) || !v[0].is_finite() || !v[1].is_finite() {
        return Err(usage(format!("{what} must lie in the upper half-plane, got '{s}'")));
    }
    Ok(Complex64::new(v[0], v[1]))
}

/// `delta`, `eta:p=P`, `etapow:r=R` or `monomial:a=A,b=B,c=C`.
pub fn parse_form(desc: &str, count: usize) -> Result<CuspForm, CliError> {
    let (head, rest) = desc.trim().split_once(':').unwrap_or((desc.trim(), ""));
    let mut params = std::collections::BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("expected key=value in '{kv}'")))?;
        let v: u32 = v.trim().parse().map_err(|_| usage(format!("bad exponent in '{kv}'")))?;
        params.insert(k.trim().to_string(), v);
    }
    let get = |k: &str| params.get(k).copied().ok_or_else(|| usage(format!("form '{desc}' is missing '{k}'")));
    let f = match head {
        "delta" => delta(count),
        "eta" => eta_form(get("p")?, count),
        "etapow" => eta_power_form(get("r")?, count),
        "monomial" => monomial_form(get("a")?, get("b")?, get("c")?, count),
        other => return Err(usage(format!("unknown form '{other}'"))),
    };
    Ok(f?)
}

fn weight_u32(k: f64) -> Result<u32, CliError> {
    if k.fract() == 0.0 && k > 0.0 && k <= u32::MAX as f64 {
        Ok(k as u32)
    } else {
        Err(usage(format!("an integral weight is needed, got {k}")))
    }
}

fn stability_summaries(c: &StabilityCheck) -> Vec<ScanSummary> {
    let passed = c.passed();
    summaries(&c.fine)
        .into_iter()
        .map(|mut s| {
            s.passed = passed;
            s
        })
        .collect()
}

fn stability_value(c: &StabilityCheck) -> Value {
    json!({
        "suite": c.suite,
        "density": c.density,
        "drift": c.drift,
        "passed": c.passed(),
        "summaries": to_value(&stability_summaries(c)),
    })
}

fn set_workers(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        if n == 0 {
            return Err(usage("--workers must be positive"));
        }
        // A second call in the same process (tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    set_workers(cfg.workers)?;
    let ctx = Ctx { cfg };
    match &cli.command {
        Command::Bessel(cmd) => bessel(&ctx, cmd),
        Command::Kloosterman { tau, r, m, c } => {
            let sys = ctx.system()?;
            let tau = parse_tau(tau.as_deref())?;
            let k = KloostermanContext::new(&sys, &tau)?;
            let v = k.sum(*r, *m, *c)?;
            ctx.emit(&json!({
                "value": to_value(&v),
                "tail_bound": 0.0,
                "c_max": c,
                "trivial_bound": k.trivial_bound(*c),
            }))
        }
        Command::PoincareCoeff { tau, m, r } => {
            let sys = ctx.system()?;
            let p = poincare_coeff(&sys, &parse_tau(tau.as_deref())?, *m, *r, ctx.c_max(DEFAULT_C_MAX))?;
            ctx.emit(&to_value(&p))
        }
        Command::CoeffSquareSum { tau, m } => {
            let sys = ctx.system()?;
            let s = coeff_square_sum(&sys, &parse_tau(tau.as_deref())?, *m, ctx.c_max(DEFAULT_C_MAX))?;
            ctx.emit(&to_value(&s))
        }
        Command::Bergman(cmd) => bergman(&ctx, cmd),
        Command::Forms(cmd) => forms(&ctx, cmd),
        Command::Scan(cmd) => scan(&ctx, cmd),
        Command::Check(cmd) => check(&ctx, cmd),
        Command::Suite(SuiteCmd::All) => suite_all(&ctx),
    }
}

fn bessel(ctx: &Ctx, cmd: &BesselCmd) -> Result<(), CliError> {
    match cmd {
        BesselCmd::Eval { kind, order, x } => {
            let kind: BesselKind = kind.parse()?;
            let value = match kind {
                BesselKind::J => bessel_j(*order, *x)?,
                other => bessel_ref(other, *order, *x)?,
            };
            ctx.emit(&json!({ "kind": format!("{kind:?}"), "order": order, "x": x, "value": value }))
        }
        BesselCmd::Certify { rho, points } => {
            let rule = XRule { points: points.unwrap_or(XRule::default().points), ..XRule::default() };
            let r = certify_regime_bounds(rho, &rule)?;
            ctx.emit_report(&r)
        }
    }
}

fn bergman(ctx: &Ctx, cmd: &BergmanCmd) -> Result<(), CliError> {
    match cmd {
        BergmanCmd::Diag { z, tau } => {
            let sys = ctx.system()?;
            let z = parse_point(z, "--z")?;
            let tol = ctx.cfg.kernel_tol.unwrap_or(DEFAULT_KERNEL_TOL);
            let d = basis_sum_diag(&sys, &parse_tau(tau.as_deref())?, z, tol)?;
            ctx.emit(&to_value(&d))
        }
        BergmanCmd::Reproduce { form, w } => {
            let f = ctx.form(form)?;
            let w = parse_point(w, "--w")?;
            let tol = ctx.cfg.quad_tol.unwrap_or(DEFAULT_REPRODUCE_TOL);
            let c = reproduce_check(&f, w, tol)?;
            let err = c.relative_error();
            ctx.emit(&json!({
                "lhs": to_value(&c.lhs),
                "rhs": to_value(&c.rhs),
                "quad_error": c.quad_error,
                "relative_error": err,
            }))?;
            // The identity holds up to the quadrature error, with a margin.
            let allowed = 10.0 * (c.quad_error / c.rhs.norm()).max(tol);
            verdict(err <= allowed, "the reproducing identity")
        }
    }
}

fn forms(ctx: &Ctx, cmd: &FormsCmd) -> Result<(), CliError> {
    match cmd {
        FormsCmd::Build { form: Some(desc), .. } => ctx.emit(&to_value(&ctx.form(desc)?)),
        FormsCmd::Build { form: None, .. } => {
            let k = weight_u32(ctx.cfg.weight.map_or_else(|| ctx.system().map(|s| s.weight()), Ok)?)?;
            let tol = ctx.cfg.basis_tol.unwrap_or(DEFAULT_BASIS_TOL);
            let b = orthonormal_basis_full(k, ctx.coeffs(), tol)?;
            ctx.emit(&json!({
                "weight": k,
                "dim": b.forms.len(),
                "gram_condition": b.gram_condition,
                "forms": to_value(&b.forms),
            }))
        }
        FormsCmd::Norm { form, form_file } => {
            let f = match (form, form_file) {
                (Some(desc), _) => ctx.form(desc)?,
                (None, Some(p)) => read_form(p)?,
                (None, None) => return Err(usage("give --form or --form-file")),
            };
            let tol = ctx.cfg.quad_tol.unwrap_or(DEFAULT_NORM_TOL);
            let norm = petersson_norm(&f, tol)?;
            ctx.emit(&json!({ "norm_squared": norm, "weight": f.weight(), "group": f.group().descriptor() }))
        }
    }
}

fn read_form(p: &PathBuf) -> Result<CuspForm, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
    let r: FormRecord = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    Ok(CuspForm::from_record(&r)?)
}

fn theorem3_config(ctx: &Ctx) -> Theorem3Config {
    let d = Theorem3Config::default();
    Theorem3Config {
        k_list: ctx.cfg.k_list.clone().unwrap_or(d.k_list),
        grid_density: ctx.cfg.grid_density.unwrap_or(d.grid_density),
        coeffs: ctx.cfg.coeffs.unwrap_or(d.coeffs),
        c_max: ctx.c_max(d.c_max),
        refinements: ctx.cfg.refinements.unwrap_or(d.refinements),
    }
}

fn scan(ctx: &Ctx, cmd: &ScanCmd) -> Result<(), CliError> {
    match cmd {
        ScanCmd::Theorem3 => ctx.emit_report(&theorem3_scan(&theorem3_config(ctx))?),
        ScanCmd::Theorem12 { form } => {
            let f = ctx.form(form)?;
            let r = theorem12_report(&f, ctx.cfg.grid_density.unwrap_or(DEFAULT_THEOREM12_DENSITY))?;
            ctx.emit_report(&r)
        }
    }
}

fn check(ctx: &Ctx, cmd: &CheckCmd) -> Result<(), CliError> {
    match cmd {
        CheckCmd::Lemmas => ctx.emit_report(&lemma_suite(ctx.cfg.lemma_count.unwrap_or(DEFAULT_LEMMA_COUNT))),
        CheckCmd::Regions => {
            let c = region_stability()?;
            ctx.emit_csv(&[&c.coarse, &c.fine])?;
            ctx.emit(&stability_value(&c))?;
            verdict(c.passed(), "regions")
        }
    }
}

/// Lemmas, the density-doubling suites, the weight scan, the cusp widths
/// and the pointwise bounds for Delta, as one ordered list of summaries.
fn suite_all(ctx: &Ctx) -> Result<(), CliError> {
    let mut out: Vec<ScanSummary> = Vec::new();
    let mut reports: Vec<ScanReport> = Vec::new();
    fn record(r: ScanReport, out: &mut Vec<ScanSummary>, reports: &mut Vec<ScanReport>) {
        for n in &r.notes {
            eprintln!("note: {}: {n}", r.suite);
        }
        out.extend(summaries(&r));
        reports.push(r);
    }

    record(lemma_suite(ctx.cfg.lemma_count.unwrap_or(DEFAULT_LEMMA_COUNT)), &mut out, &mut reports);
    for c in stability_suite()? {
        out.extend(stability_summaries(&c));
        reports.push(c.fine);
    }
    record(theorem3_scan(&theorem3_config(ctx))?, &mut out, &mut reports);
    let groups: Vec<Subgroup> = (1..=12).map(Subgroup::gamma0).chain((2..=6).map(Subgroup::gamma)).collect::<Result<_, _>>()?;
    record(width_within_index(&groups), &mut out, &mut reports);
    let d = delta(ctx.coeffs())?;
    record(theorem12_report(&d, ctx.cfg.grid_density.unwrap_or(DEFAULT_THEOREM12_DENSITY))?, &mut out, &mut reports);

    ctx.emit_csv(&reports.iter().collect::<Vec<_>>())?;
    ctx.emit(&to_value(&out))?;
    let failed: Vec<&str> = out.iter().filter(|s| !s.passed).map(|s| s.suite.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("failed: {}", failed.join(", "))))
    }
}
