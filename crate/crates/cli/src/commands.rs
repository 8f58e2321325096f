use std::fmt::Write as _;
use std::io::Read as _;

use nonoverlap::certificates::{certify as certify_set, theorem_bound, FullCertificate};
use nonoverlap::corollary::{blocked_counting_check, corollary_check};
use nonoverlap::extremal::{exhaustive_gamma, gamma_n2_formula, greedy_gamma};
use nonoverlap::families::{
    asymptotic_scan, closed_form_mu_u, no_run_probability_f64, poisson_estimate, ProductFamilySpec,
};
use nonoverlap::format::{format_word, format_word_set, parse_word_set};
use nonoverlap::overlap::{non_overlap_bruteforce, non_overlap_incremental};
use nonoverlap::sampling::seeded_proper_sets;
use nonoverlap::{Ratio, WordSet};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS};
use crate::output::{Format, Rendered, Table};
use crate::{
    CertifyArgs, Context, CorollaryArgs, FamilyArgs, Method, SearchArgs, SetSource, USetArgs,
};

/// Output of a subcommand: report, default format, exit code.
pub type Outcome = (Rendered, Format, u8);

/// Explicit families above this `n` report `mu(U)` in floating point only.
pub const EXACT_FAMILY_MAX_N: u64 = 20_000;

fn exit_for(passed: bool) -> u8 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(value)?)
}

fn load_set(source: &SetSource) -> Result<WordSet, CliError> {
    let path = source
        .set_file
        .as_ref()
        .ok_or_else(|| CliError::usage("--set-file is required"))?;
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
    };
    let set = parse_word_set(&text)?;
    for (flag, given, actual) in [("--q", source.q, set.q()), ("--n", source.n, set.n())] {
        if let Some(given) = given {
            if given != actual {
                return Err(CliError::usage(format!(
                    "{flag} {given} does not match the file header value {actual}"
                )));
            }
        }
    }
    Ok(set)
}

pub fn u_set(args: &USetArgs) -> Result<Outcome, CliError> {
    let a = load_set(&args.source)?;
    let (u, agree) = match args.method {
        Method::Brute => (non_overlap_bruteforce(&a)?, None),
        Method::Incremental => (non_overlap_incremental(&a)?.u, None),
        Method::Both => {
            let brute = non_overlap_bruteforce(&a)?;
            let incremental = non_overlap_incremental(&a)?.u;
            let agree = brute == incremental;
            (brute, Some(agree))
        }
    };
    let mu = u.measure();
    let passed = agree.unwrap_or(true);
    let method = match args.method {
        Method::Brute => "brute",
        Method::Incremental => "incremental",
        Method::Both => "both",
    };

    let mut text = format_word_set(&u);
    let _ = writeln!(text, "# mu={mu}");
    if let Some(agree) = agree {
        let _ = writeln!(text, "# agree: {agree}");
    }
    let mut table: Table = vec![vec!["index".into(), "word".into()]];
    table.extend(
        u.iter()
            .zip(u.words())
            .map(|(i, w)| vec![i.to_string(), format_word(&w)]),
    );

    let json = json!({
        "command": "u-set",
        "q": a.q(),
        "n": a.n(),
        "method": method,
        "alpha": to_json(&a.measure())?,
        "u": to_json(&u)?,
        "mu": to_json(&mu)?,
        "agree": agree,
        "passed": passed,
    });
    Ok((
        Rendered::new(json).with_table(table).with_text(text),
        Format::Text,
        exit_for(passed),
    ))
}

fn certificate_text(cert: &FullCertificate) -> String {
    let t = &cert.theorem;
    let mut out = String::new();
    let _ = writeln!(out, "q={} n={}", t.q, t.n);
    let _ = writeln!(out, "alpha: {}", t.alpha);
    let _ = writeln!(out, "gamma_n: {}", t.gamma_n);
    let _ = writeln!(out, "lhs: {} ({:.9})", t.lhs, t.lhs.to_f64());
    let _ = writeln!(
        out,
        "rho: {:.12} in [{:.12}, {:.12}]",
        t.rho,
        t.rho_lo.to_f64(),
        t.rho_hi.to_f64()
    );
    let _ = writeln!(
        out,
        "rhs: {:.9} (tolerance {:e}, pass {})",
        t.rhs, t.tolerance, t.inner_pass
    );
    let _ = writeln!(
        out,
        "outer bound: {} (pass {})",
        t.outer_bound, t.outer_pass
    );
    let _ = writeln!(out, "bound on gamma_n: {}", t.bound);
    let _ = writeln!(
        out,
        "beta inequality: min slack {}, pass {}",
        cert.beta.min_slack, cert.beta.passed
    );
    let _ = writeln!(
        out,
        "gamma inequality: min slack {}, tight at {:?}, pass {}",
        cert.gamma.min_slack, cert.gamma.tight, cert.gamma.passed
    );
    let _ = writeln!(out, "slice maxima: pass {}", cert.lambda_pass);
    let _ = writeln!(out, "passed: {}", cert.passed);
    out
}

fn profile_table(cert: &FullCertificate) -> Table {
    let p = &cert.profile;
    let mut table: Table = vec![[
        "j",
        "alpha",
        "beta",
        "gamma",
        "delta",
        "d_measure",
        "beta_slack",
        "gamma_slack",
    ]
    .map(String::from)
    .to_vec()];
    for j in 0..p.n as usize {
        table.push(vec![
            (j + 1).to_string(),
            p.alpha[j].to_string(),
            p.beta[j].to_string(),
            p.gamma[j + 1].to_string(),
            p.delta[j].to_string(),
            p.d_measure[j].to_string(),
            cert.beta.slacks[j].to_string(),
            cert.gamma.slacks[j].to_string(),
        ]);
    }
    table
}

pub fn certify(args: &CertifyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let Some(count) = args.random else {
        let a = load_set(&args.source)?;
        let cert = certify_set(&a, ctx.tolerance)?;
        let json = json!({
            "command": "certify",
            "mode": "file",
            "set": to_json(&a)?,
            "certificate": to_json(&cert)?,
            "passed": cert.passed,
        });
        let rendered = Rendered::new(json)
            .with_table(profile_table(&cert))
            .with_text(certificate_text(&cert));
        return Ok((rendered, Format::Json, exit_for(cert.passed)));
    };

    let (Some(q), Some(n)) = (args.source.q, args.source.n) else {
        return Err(CliError::usage("--random needs --q and --n"));
    };
    let sets = seeded_proper_sets(q, n, count, ctx.seed)?;
    let certs = sets
        .par_iter()
        .map(|a| certify_set(a, ctx.tolerance))
        .collect::<Result<Vec<_>, _>>()?;
    let passed_count = certs.iter().filter(|c| c.passed).count();
    let passed = passed_count == certs.len();

    let mut results = Vec::with_capacity(certs.len());
    let mut table: Table = vec![[
        "index",
        "count",
        "alpha",
        "gamma_n",
        "lhs",
        "rhs",
        "outer_bound",
        "beta_pass",
        "gamma_pass",
        "passed",
    ]
    .map(String::from)
    .to_vec()];
    let mut text = String::new();
    for (i, (a, cert)) in sets.iter().zip(&certs).enumerate() {
        let t = &cert.theorem;
        results.push(json!({
            "index": i,
            "set": to_json(a)?,
            "lambda_pass": cert.lambda_pass,
            "beta_min_slack": to_json(&cert.beta.min_slack)?,
            "gamma_min_slack": to_json(&cert.gamma.min_slack)?,
            "gamma_tight": cert.gamma.tight,
            "theorem": to_json(t)?,
            "passed": cert.passed,
        }));
        table.push(vec![
            i.to_string(),
            a.count().to_string(),
            t.alpha.to_string(),
            t.gamma_n.to_string(),
            t.lhs.to_string(),
            format!("{:.12}", t.rhs),
            t.outer_bound.to_string(),
            cert.beta.passed.to_string(),
            cert.gamma.passed.to_string(),
            cert.passed.to_string(),
        ]);
        let _ = writeln!(
            text,
            "{i}: alpha={} lhs={} rhs={:.9} passed={}",
            t.alpha, t.lhs, t.rhs, cert.passed
        );
    }
    let _ = writeln!(text, "passed {passed_count}/{}", certs.len());
    let json = json!({
        "command": "certify",
        "mode": "random",
        "q": q,
        "n": n,
        "seed": ctx.seed,
        "count": count,
        "passed_count": passed_count,
        "results": results,
        "passed": passed,
    });
    Ok((
        Rendered::new(json).with_table(table).with_text(text),
        Format::Json,
        exit_for(passed),
    ))
}

pub fn search(args: &SearchArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let result = if args.greedy {
        greedy_gamma(args.q, args.n, args.m, args.restarts, ctx.seed)?
    } else {
        exhaustive_gamma(args.q, args.n, args.m)?
    };
    let bound = theorem_bound(&result.alpha, args.n)?;
    let within_bound = result.best_mu_u <= bound;
    let n2 = if args.n == 2 {
        Some(to_json(&gamma_n2_formula(&result.alpha)?)?)
    } else {
        None
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "q={} n={} m={} method={}",
        args.q,
        args.n,
        args.m,
        if args.greedy { "greedy" } else { "exhaustive" }
    );
    let _ = writeln!(text, "alpha: {}", result.alpha);
    let _ = writeln!(
        text,
        "best mu(U): {} ({:.9})",
        result.best_mu_u,
        result.best_mu_u.to_f64()
    );
    let _ = writeln!(text, "upper bound: {} ({:.9})", bound, bound.to_f64());
    let _ = writeln!(text, "explored: {}", result.explored);
    let _ = writeln!(
        text,
        "witnesses: {} (showing {})",
        result.witness_count,
        result.witnesses.len()
    );
    for w in &result.witnesses {
        let words: Vec<String> = w.words().map(|x| format_word(&x)).collect();
        let _ = writeln!(text, "  {{{}}}", words.join(", "));
    }

    let json = json!({
        "command": "search",
        "result": to_json(&result)?,
        "theorem_bound": to_json(&bound)?,
        "n2_formula": n2,
        "passed": within_bound,
    });
    Ok((
        Rendered::new(json).with_text(text),
        Format::Json,
        exit_for(within_bound),
    ))
}

/// `1 - Pr` for an exact `Pr`, and `1 - e^-lambda`, compared on the complement
/// side so tiny `lambda` keeps its precision.
///
/// `scale = alpha n (1 - p)` turns the interval for `Pr` into one for `alpha n mu(U)`.
fn poisson_json(
    n: u64,
    k: u64,
    p: f64,
    scale: f64,
    prob: ProbValue,
) -> Result<(Value, bool), CliError> {
    let est = poisson_estimate(n, k, p)?;
    let lo = (est.approx - est.error_bound).max(0.0) * scale;
    let hi = (est.approx + est.error_bound).min(1.0) * scale;
    let complement = match &prob {
        ProbValue::Exact(r) => (Ratio::one() - r).to_f64(),
        ProbValue::Float(v) => 1.0 - v,
    };
    let deviation = (complement + (-est.lambda).exp_m1()).abs();
    // the float recurrence carries its own rounding error
    let slack = match prob {
        ProbValue::Exact(_) => 0.0,
        ProbValue::Float(_) => 1e-9,
    };
    let holds = deviation <= est.error_bound + slack;
    Ok((
        json!({
            "lambda": est.lambda,
            "approx": est.approx,
            "error_bound": est.error_bound,
            "deviation": deviation,
            "alpha_n_mu_interval": [lo, hi],
            "holds": holds,
        }),
        holds,
    ))
}

enum ProbValue {
    Exact(Ratio),
    Float(f64),
}

pub fn family(args: &FamilyArgs) -> Result<Outcome, CliError> {
    let target = (-1.0f64).exp();
    if let Some(alpha) = args.alpha {
        let point = asymptotic_scan(args.n, alpha, args.rounding)?;
        let (poisson, holds) = if args.n >= 2 {
            let (v, h) = poisson_json(
                args.n,
                point.k,
                point.p,
                alpha * args.n as f64 * (1.0 - point.p),
                ProbValue::Float(point.prob_no_run),
            )?;
            (v, h)
        } else {
            (Value::Null, true)
        };
        let json = json!({
            "command": "family",
            "mode": "auto",
            "n": args.n,
            "k": point.k,
            "rounding": args.rounding,
            "p": point.p,
            "alpha": alpha,
            "alpha_exact": Value::Null,
            "prob_no_run": point.prob_no_run,
            "mu_u": Value::Null,
            "mu_u_float": point.mu_u,
            "alpha_n_mu": Value::Null,
            "alpha_n_mu_float": point.scaled,
            "poisson": poisson,
            "target": target,
            "deviation_from_target": (point.scaled - target).abs(),
            "passed": holds,
        });
        return Ok((Rendered::new(json), Format::Json, exit_for(holds)));
    }

    let (Some(q), Some(s), Some(k)) = (args.q, args.s, args.k) else {
        return Err(CliError::usage(
            "give either --q --s --n --k or --alpha --n",
        ));
    };
    let n = u32::try_from(args.n)
        .map_err(|_| CliError::usage(format!("n = {} is too large", args.n)))?;
    let spec = ProductFamilySpec::new(q, s, n, k)?;
    let p = s as f64 / q as f64;
    let alpha_exact = spec.alpha();
    let prob_float = no_run_probability_f64(args.n - 1, k as u64, p);
    let mu_float = (1.0 - p) * prob_float;
    let exact = if args.n <= EXACT_FAMILY_MAX_N {
        Some(closed_form_mu_u(&spec)?)
    } else {
        None
    };
    let scaled_exact = exact
        .as_ref()
        .map(|mu| &alpha_exact * mu * Ratio::from_integer(n as i64));
    let (poisson, holds) = if n >= 2 {
        let prob = match &exact {
            Some(mu) => ProbValue::Exact(mu / (Ratio::one() - spec.p())),
            None => ProbValue::Float(prob_float),
        };
        let scale = alpha_exact.to_f64() * args.n as f64 * (1.0 - p);
        poisson_json(args.n, k as u64, p, scale, prob)?
    } else {
        (Value::Null, true)
    };
    let alpha = alpha_exact.to_f64();
    let json = json!({
        "command": "family",
        "mode": "explicit",
        "q": q,
        "s": s,
        "n": n,
        "k": k,
        "p": p,
        "alpha": alpha,
        "alpha_exact": to_json(&alpha_exact)?,
        "prob_no_run": prob_float,
        "mu_u": exact.as_ref().map(to_json).transpose()?,
        "mu_u_float": mu_float,
        "alpha_n_mu": scaled_exact.as_ref().map(to_json).transpose()?,
        "alpha_n_mu_float": alpha * n as f64 * mu_float,
        "poisson": poisson,
        "target": target,
        "deviation_from_target": (alpha * n as f64 * mu_float - target).abs(),
        "passed": holds,
    });
    Ok((Rendered::new(json), Format::Json, exit_for(holds)))
}

pub fn corollary(args: &CorollaryArgs) -> Result<Outcome, CliError> {
    let a = load_set(&args.source)?;
    let report = corollary_check(&a, args.t)?;
    let blocked = if args.blocked {
        Some(blocked_counting_check(&a, args.t)?)
    } else {
        None
    };
    let passed = report.passed && blocked.as_ref().is_none_or(|b| b.passed);
    let json = json!({
        "command": "corollary",
        "report": to_json(&report)?,
        "blocked": blocked.as_ref().map(to_json).transpose()?,
        "passed": passed,
    });
    Ok((Rendered::new(json), Format::Json, exit_for(passed)))
}
