use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use kasami_core::correlation::{full_distribution, Engine, BRUTE_MAX_N, SPECTRAL_MAX_N};
use kasami_core::families::{build_family, export, FamilyKind, FamilyParams};
use kasami_core::fieldeq::census;
use kasami_core::gf2n::{format_polynomial, parse_polynomial};
use kasami_core::histogram::as_entry_list;
use kasami_core::quadform::{check_k, is_admissible_k};
use kasami_core::theory::{build_code, dual_low_weights, family_size, predict, PredictionName};
use kasami_core::verify::verify;
use kasami_core::{FieldCtx, Histogram};
use serde::Serialize;
use serde_json::json;

use crate::cli::{CensusArgs, CodeArgs, CorrArgs, FamilySelect, FieldArgs, GenArgs, VerifyArgs};

/// Exit status of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Mismatch,
}

/// A command that could not run. `code` is the process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// Bad flags, unsupported sizes, resource limits, I/O.
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    /// Parameters that fail validation.
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("I/O error: {e}"))
    }
}

type CmdResult = Result<Outcome, Failure>;

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Mismatch
    }
}

pub fn field_ctx(n: u32, poly: Option<&str>) -> Result<FieldCtx, Failure> {
    let poly = poly
        .map(parse_polynomial)
        .transpose()
        .map_err(|e| Failure::usage(e.to_string()))?;
    FieldCtx::with_polynomial(n, poly).map_err(|e| Failure::usage(e.to_string()))
}

fn validate_k(n: u32, k: u32) -> Result<(), Failure> {
    check_k(n, k).map_err(|e| Failure::invalid(e.to_string()))
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::usage(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn hist_json(h: &Histogram) -> serde_json::Value {
    as_entry_list::serialize(h, serde_json::value::Serializer).expect("histograms serialize")
}

fn family_params<'a>(ctx: &'a FieldCtx, sel: &FamilySelect) -> Result<FamilyParams<'a>, Failure> {
    let kind = FamilyKind::from(sel.kind);
    match kind {
        FamilyKind::GeneralizedFk => {
            let k = sel
                .k
                .ok_or_else(|| Failure::usage("--k is required for --kind fk"))?;
            validate_k(ctx.n(), k)?;
        }
        _ => {
            if sel.k.is_some() {
                eprintln!(
                    "warning: --k is ignored for {kind}; using k = n/2 + 1 = {}",
                    ctx.half() + 1
                );
            }
        }
    }
    FamilyParams::new(ctx, kind, sel.k).map_err(|e| Failure::invalid(e.to_string()))
}

pub fn field_info(args: &FieldArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.n, poly)?;
    let n = ctx.n();
    let admissible: Vec<u32> = (1..n).filter(|&k| is_admissible_k(n, k)).collect();
    let info = json!({
        "n": n,
        "polynomial": format_polynomial(ctx.polynomial()),
        "order": ctx.order(),
        "subfield_size": ctx.subfield_size(),
        "alpha": ctx.alpha().to_string(),
        "beta": ctx.beta().to_string(),
        "beta_log": ctx.format_log(ctx.beta()),
        "admissible_k": admissible,
        "family_size": family_size(n).to_string(),
    });
    emit(&info, args.out.as_deref())?;
    Ok(Outcome::Pass)
}

pub fn family_gen(args: &GenArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.family.n, poly)?;
    let params = family_params(&ctx, &args.family)?;
    let fam = build_family(params);
    let mut w = open_out(args.out.as_deref())?;
    export(&fam, args.format.into(), &mut w)?;
    w.flush()?;
    eprintln!(
        "{} family, n = {}, k = {}: {} sequences of period {}",
        params.kind,
        ctx.n(),
        params.k,
        fam.len(),
        fam.period()
    );
    Ok(Outcome::Pass)
}

pub fn corr(args: &CorrArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.family.n, poly)?;
    let params = family_params(&ctx, &args.family)?;
    let engine = Engine::from(args.engine);
    let limit = match engine {
        Engine::Brute => BRUTE_MAX_N,
        Engine::Spectral => SPECTRAL_MAX_N,
    };
    if ctx.n() > limit && !args.force {
        return Err(Failure::usage(format!(
            "the {engine} engine is limited to n <= {limit}; pass --force to run n = {}",
            ctx.n()
        )));
    }
    let fam = build_family(params);
    let mut report = full_distribution(&fam, engine).map_err(|e| Failure::usage(e.to_string()))?;
    report
        .attach_prediction()
        .map_err(|e| Failure::invalid(e.to_string()))?;
    emit(&report, args.out.as_deref())?;
    let verdict = match report.matches {
        Some(true) => "matches the closed form",
        Some(false) => "DIFFERS from the closed form",
        None => "no closed form for this kind",
    };
    eprintln!(
        "{} engine: {} sequences, R_max = {}, {verdict}",
        engine, report.family_size, report.r_max
    );
    Ok(outcome(report.matches != Some(false)))
}

pub fn run_verify(args: &VerifyArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.n, poly)?;
    validate_k(ctx.n(), args.k)?;
    let report = verify(&ctx, args.k, args.seed).map_err(|e| Failure::usage(e.to_string()))?;
    eprint!("{}", report.table());
    emit(&report, args.out.as_deref())?;
    Ok(outcome(report.all_pass()))
}

pub fn code_weights(args: &CodeArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.n, poly)?;
    validate_k(ctx.n(), args.k)?;
    let code = build_code(&ctx, args.k, args.force).map_err(|e| Failure::usage(e.to_string()))?;
    let predicted = predict(PredictionName::CodeWeights, ctx.n(), args.k)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let dual = dual_low_weights(&code, 3).map_err(|e| Failure::invalid(e.to_string()))?;
    let weights_match = predicted.histogram == code.weights;
    let dual_zero = dual.iter().all(|b| b.bits() == 0);
    let report = json!({
        "n": code.n,
        "k": code.k,
        "length": code.length,
        "dimension": code.dimension,
        "weights": hist_json(&code.weights),
        "predicted": hist_json(&predicted.histogram),
        "match": weights_match,
        "dual_low_weights": dual.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "dual_low_weights_zero": dual_zero,
    });
    emit(&report, args.out.as_deref())?;
    Ok(outcome(weights_match && dual_zero))
}

pub fn run_census(args: &CensusArgs, poly: Option<&str>) -> CmdResult {
    let ctx = field_ctx(args.n, poly)?;
    validate_k(ctx.n(), args.k)?;
    let c = census(&ctx, args.k, args.force).map_err(|e| Failure::usage(e.to_string()))?;
    emit(&c, args.out.as_deref())?;
    Ok(outcome(c.all_match()))
}
