use std::io::{self, Write};
use std::time::Instant;

use anyhow::Context;
use biharmonic::expansion::{
    detect_regime, fit_expansion, ordering_chain, representation_check, variation_kernel, window_shift_stability,
    Regime,
};
use biharmonic::ladder::{compute_ladder_unchecked, ladder_length_formula, parity_boundary_check};
use biharmonic::shooting::shoot;
use biharmonic::verify::{self, Scope, SuiteReport, VerifyConfig};
use biharmonic::{compute_ladder, compute_pc, compute_spectrum, Error, ProblemParams};
use serde_json::{json, Value};

use crate::args::{Dimension, ExpandArgs, Format, Point, ScopeArg, SolveArgs, VerifyArgs};
use crate::config::{self, Tolerances, EIGEN_ROOT_TOL, RUNG_COINCIDENCE_TOL};
use crate::report::{emit, num, object, sink, Checks};
use crate::{Ctx, InputError};

/// Adds an explanation to subcritical-input errors.
fn explain(e: Error) -> anyhow::Error {
    match &e {
        Error::SubcriticalInput { n, .. } if *n <= 12 => {
            let hint = format!(
                "for n = {n} the critical exponent is p_c = ∞ (finite only for n ≥ 13): every p above \
                 (n+4)/(n−4) gives a complex eigenvalue pair"
            );
            anyhow::Error::new(e).context(hint)
        }
        Error::SubcriticalInput { n, .. } => {
            let hint = match compute_pc(*n) {
                Ok(pc) => format!("the spectrum is real only for p ≥ p_c({n}) = {pc:.16e}; try --p pc or --p pc+0.5"),
                Err(_) => "the spectrum is real only for p ≥ p_c".to_owned(),
            };
            anyhow::Error::new(e).context(hint)
        }
        _ => e.into(),
    }
}

fn params(p: &Point, ctx: &Ctx) -> anyhow::Result<ProblemParams> {
    let n = config::dimension(p.n, &ctx.file)?;
    let pv = config::exponent(n, p.p.as_deref(), ctx.file.p.as_ref())?;
    Ok(ProblemParams::new(n, pv)?)
}

fn pc_value(n: u32) -> Value {
    compute_pc(n).map_or(json!("inf"), num)
}

pub fn spectrum(a: &Point, ctx: &Ctx) -> anyhow::Result<bool> {
    let tol = Tolerances::resolve(&a.tol, &ctx.file.tol, EIGEN_ROOT_TOL)?;
    let params = params(a, ctx)?;
    let spec = compute_spectrum(&params).map_err(explain)?;

    let mut checks = Checks::new();
    checks.push(
        "eigenvalue polynomial residual",
        spec.poly_residual < tol.root,
        format!("{:.3e} (tol {:.1e})", spec.poly_residual, tol.root),
    );
    checks.push(
        "reflection symmetry about λ*",
        spec.symmetry_residual < tol.root * (1.0 + spec.lambda_star.abs()),
        format!("{:.3e}", spec.symmetry_residual),
    );
    checks.push("ordering λ₁ < 2λ* < λ₂ ≤ λ* ≤ λ₃ < 0 < λ₄", spec.ordering_holds(), "");
    let [l1, l2, l3, l4] = spec.lambdas;
    let report = object(vec![
        ("n", json!(params.n)),
        ("p", num(params.p)),
        ("p_c", pc_value(params.n)),
        ("m", num(params.m())),
        ("lambda_star", num(spec.lambda_star)),
        ("lambda1", num(l1)),
        ("lambda2", num(l2)),
        ("lambda3", num(l3)),
        ("lambda4", num(l4)),
        ("amplitude", num(spec.amplitude)),
        ("degenerate", json!(spec.degenerate)),
        ("symmetry_residual", num(spec.symmetry_residual)),
        ("poly_residual", num(spec.poly_residual)),
        ("checks", checks.to_value()),
    ]);
    emit(&report, ctx.format(Format::Json), &mut *sink(ctx.out())?)?;
    Ok(checks.passed())
}

pub fn critical(a: &Dimension, ctx: &Ctx) -> anyhow::Result<bool> {
    let n = config::dimension(a.n, &ctx.file)?;
    let tol = Tolerances::resolve(&a.tol, &ctx.file.tol, RUNG_COINCIDENCE_TOL)?;
    let format = ctx.format(Format::Json);
    if n <= 12 {
        let report = object(vec![
            ("n", json!(n)),
            ("p_c", json!("inf")),
            ("N", json!(0)),
            ("message", json!(format!("p_c = ∞ for n = {n}: a finite critical exponent exists only for n ≥ 13"))),
        ]);
        emit(&report, format, &mut *sink(ctx.out())?)?;
        return Ok(true);
    }

    let mut checks = Checks::new();
    let formula = ladder_length_formula(n)?;
    let parity = parity_boundary_check(n)?;
    let mut fields = vec![("n", json!(n))];
    match compute_ladder_unchecked(n) {
        Ok(l) => {
            checks.push(
                "rung count = closed formula",
                l.len() == formula,
                format!("computed {}, formula {formula}", l.len()),
            );
            let mut worst: f64 = 0.0;
            for (i, &pk) in l.rungs.iter().enumerate() {
                let s = compute_spectrum(&ProblemParams::new(n, pk)?)?;
                worst = worst.max((s.l2() - (i + 1) as f64 * s.l3()).abs() / s.l3().abs());
            }
            checks.push(
                "λ₂ = kλ₃ at every rung",
                worst < tol.root,
                format!("max {worst:.3e} (tol {:.1e})", tol.root),
            );
            fields.extend([
                ("p_c", num(l.p_c)),
                ("N", json!(l.len())),
                ("N_formula", json!(formula)),
                ("rungs", Value::Array(l.rungs.iter().map(|&p| num(p)).collect())),
                ("tail_limits", Value::Array(l.tail_limits.iter().map(|&t| num(t)).collect())),
            ]);
        }
        Err(e @ Error::LadderMismatch { .. }) => {
            checks.push("rung count = closed formula", false, e.to_string());
            fields.extend([("p_c", pc_value(n)), ("N_formula", json!(formula))]);
        }
        Err(e) => return Err(e.into()),
    }
    checks.push(
        "parity boundary ℱ((n−9)/2)",
        parity.passed(),
        format!(
            "direct {:.6e}, factored {:.6e}, positive {} (expected {})",
            parity.direct,
            parity.factored,
            parity.positive,
            n >= 20
        ),
    );
    fields.push(("parity_boundary", serde_json::to_value(&parity)?));
    fields.push(("checks", checks.to_value()));
    emit(&object(fields), format, &mut *sink(ctx.out())?)?;
    Ok(checks.passed())
}

struct Shot {
    params: ProblemParams,
    tol: Tolerances,
    sol: biharmonic::shooting::RadialSolution,
}

fn run_shot(a: &SolveArgs, ctx: &Ctx) -> anyhow::Result<Shot> {
    let tol = Tolerances::resolve(&a.point.tol, &ctx.file.tol, EIGEN_ROOT_TOL)?;
    let params = params(&a.point, ctx)?;
    let alpha = config::alpha(a.alpha, &ctx.file)?;
    let r_max = config::r_max(a.r_max, &ctx.file)?;
    compute_spectrum(&params).map_err(explain)?;
    let t = Instant::now();
    let sol = shoot(&params, alpha, &tol.controls(r_max)).map_err(explain)?;
    eprintln!("shooting: {:.2}s, {} restarts", t.elapsed().as_secs_f64(), sol.restarts);
    Ok(Shot { params, tol, sol })
}

pub fn solve(a: &SolveArgs, ctx: &Ctx) -> anyhow::Result<bool> {
    let Shot { params, tol, sol } = run_shot(a, ctx)?;
    let dev = (sol.limit_ratio() - 1.0).abs();
    let negative = sol.y.iter().all(|&y| y < 0.0);
    let nondecreasing = sol.y.windows(2).all(|w| w[1] >= w[0]);
    let mut checks = Checks::new();
    checks.push("r^mφ(r_max)/L within target", dev < tol.target, format!("|ratio − 1| = {dev:.3e}"));
    checks.push("Y negative", negative, "");
    checks.push("Y nondecreasing", nondecreasing, "");
    let summary = object(vec![
        ("n", json!(params.n)),
        ("p", num(params.p)),
        ("alpha", num(sol.alpha)),
        ("v0", num(sol.v0)),
        ("amplitude", num(sol.amplitude)),
        ("r_max", num(sol.r_max())),
        ("nodes", json!(sol.len())),
        ("limit_ratio", num(sol.limit_ratio())),
        ("error_estimate", num(sol.error_estimate)),
        ("restarts", json!(sol.restarts)),
        ("checks", checks.to_value()),
    ]);
    let format = ctx.format(Format::Json);
    match ctx.out() {
        Some(path) => {
            let mut f = sink(Some(path))?;
            sol.write_csv(&mut f).with_context(|| format!("writing {}", path.display()))?;
            f.flush()?;
            emit(&summary, format, &mut *sink(None)?)?;
        }
        None => {
            let mut out = sink(None)?;
            sol.write_csv(&mut out)?;
            out.flush()?;
            emit(&summary, format, &mut io::stderr().lock())?;
        }
    }
    Ok(checks.passed())
}

pub fn expand(a: &ExpandArgs, ctx: &Ctx) -> anyhow::Result<bool> {
    let n = config::dimension(a.solve.point.n, &ctx.file)?;
    let ladder = compute_ladder(n)?;
    let Shot { params, tol, sol } = run_shot(&a.solve, ctx)?;
    let spec = compute_spectrum(&params)?;
    let regime = detect_regime(&params, &ladder, tol.rung)?;

    let window = a.window.or(ctx.file.window.map(|[lo, hi]| (lo, hi)));
    if let Some((lo, hi)) = window {
        let (s0, s1) = (sol.s_grid[0], *sol.s_grid.last().unwrap_or(&0.0));
        if !(lo < hi) || lo < s0 || hi > s1 {
            return Err(InputError(format!("--window {lo},{hi} must lie inside the resolved range [{s0}, {s1}]")).into());
        }
    }
    let fit = fit_expansion(&sol, &spec, regime, window).map_err(|e| match (&e, window) {
        (Error::WindowTooShort(_) | Error::IllConditioned(_), Some(_)) => InputError(format!("--window: {e}")).into(),
        _ => anyhow::Error::new(e),
    })?;

    let mut checks = Checks::new();
    checks.push(
        "a0 = L",
        fit.a0_relative_error() < tol.fit,
        format!("relative error {:.3e} (tol {:.1e})", fit.a0_relative_error(), tol.fit),
    );
    checks.push(
        "residual slope ≤ theoretical + slack",
        fit.slope_within_bound(),
        format!("{:.4} ≤ {:.4}", fit.residual_slope, fit.remainder_exponent + fit.slack),
    );
    match window_shift_stability(&sol, &spec, &fit, 0.1) {
        Ok(shifts) => {
            let worst = shifts.iter().map(|s| s.change / s.std_error).fold(0.0, f64::max);
            checks.push(
                "coefficients stable under a 10% window shift",
                shifts.iter().all(|s| s.stable),
                format!("max change {worst:.2} SE"),
            );
        }
        Err(e) => checks.push("coefficients stable under a 10% window shift", false, format!("error: {e}")),
    }
    if let Regime::A { k } = regime {
        let chain = ordering_chain(&spec, k);
        checks.push("ordering chain λ₁ < λ₂+λ₃ < (k+1)λ₃ < λ₂ < kλ₃ < 0", chain.iter().all(|&b| b), format!("{chain:?}"));
    }
    match representation_check(&sol, &spec, &variation_kernel(&spec, 2.3)) {
        Ok(d) => checks.push("variation-of-constants representation", d < 1e-3, format!("{d:.3e}")),
        Err(e) => checks.push("variation-of-constants representation", false, format!("error: {e}")),
    }

    let report = object(vec![
        ("n", json!(params.n)),
        ("p", num(params.p)),
        ("regime", json!(regime.label())),
        ("k", json!(regime.k())),
        ("window", json!([num(fit.window.0), num(fit.window.1)])),
        ("coefficients", serde_json::to_value(&fit.coefficients)?),
        ("residual_slope", num(fit.residual_slope)),
        ("theoretical_slope", num(fit.remainder_exponent)),
        ("slack", num(fit.slack)),
        ("amplitude", num(fit.amplitude)),
        ("condition", num(fit.condition)),
        ("lambdas", json!(spec.lambdas.map(num))),
        ("checks", checks.to_value()),
    ]);
    emit(&report, ctx.format(Format::Json), &mut *sink(ctx.out())?)?;
    Ok(checks.passed())
}

pub fn verify(a: &VerifyArgs, ctx: &Ctx) -> anyhow::Result<bool> {
    let tol = Tolerances::resolve(&a.tol, &ctx.file.tol, EIGEN_ROOT_TOL)?;
    let (n_min, n_max) = config::n_range((a.n_min, a.n_max), &ctx.file, (13, 60), (13, 200))?;
    let scope = match a.scope.or(ctx.file.scope).unwrap_or(ScopeArg::Full) {
        ScopeArg::Algebraic => Scope::Algebraic,
        ScopeArg::Full => Scope::Full,
    };
    let r_max = config::r_max(None, &ctx.file)?;
    let cfg = VerifyConfig { scope, n_min, n_max, shoot: tol.controls(r_max), ..VerifyConfig::default() };

    let reports = verify::run(&cfg);
    let mut err = io::stderr().lock();
    for r in &reports {
        writeln!(err, "{} {} ({:.2}s)", if r.passed() { "PASS" } else { "FAIL" }, r.suite, r.elapsed.as_secs_f64())?;
        for c in &r.checks {
            writeln!(err, "  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
    }
    let passed = reports.iter().all(SuiteReport::passed);
    let mut out = sink(ctx.out())?;
    match ctx.format(Format::Json) {
        Format::Json => {
            let report = json!({ "n_min": n_min, "n_max": n_max, "scope": scope, "passed": passed, "suites": reports
                .iter()
                .map(|r| json!({ "suite": r.suite, "passed": r.passed(), "checks": r.checks }))
                .collect::<Vec<_>>() });
            emit(&report, Format::Json, &mut *out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["suite", "check", "passed", "detail"])?;
            for r in &reports {
                for c in &r.checks {
                    w.write_record([r.suite.as_str(), &c.name, if c.passed { "true" } else { "false" }, &c.detail])?;
                }
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(passed)
}
