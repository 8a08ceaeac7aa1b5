//! `qsymbol`: JSON front end for the invariance checkers and norms.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Serialize;

use qsymbol_core::invariance::{equivalence_report, schur_function, support_of, SupportSet};
use qsymbol_core::io::{
    group_to_json, phi_from_json, to_json, GroupJson, RealizationDescriptor, RealizationRef, SymbolJson,
};
use qsymbol_core::norms::{haagerup_bound, schur_cb_norm, NormReport, DEFAULT_NORM_TOL};
use qsymbol_core::symbol::{from_schur_function, invariant_schur_function, random_antidiagonal, random_symbol};
use qsymbol_core::{
    random, Error, FiniteGroup, GroupSpec, Realization, RealizationKind, Symbol, SymbolAmbient, TheoremTag,
    C64,
};

const DEFAULT_GROUP: &str = "Z2";
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qsymbol", version, about = "Invariance checks and cb-norms for finite quantum group symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariance criterion on a symbol and report whether they agree.
    Check(CheckArgs),
    /// Completely bounded norm of a Schur multiplier, or the factorization bound of a symbol.
    Norm(NormArgs),
    /// Dump a realization or a symbol.
    Describe(DescribeArgs),
    /// Validate or emit Cayley tables.
    #[command(subcommand)]
    Group(GroupCommand),
}

#[derive(Args, Clone)]
struct Common {
    /// Group name (`Z6`, `D4`, `S3`, `Z2xZ3`) or a Cayley table JSON file.
    #[arg(long)]
    group: Option<String>,
    /// `commutative` or `cocommutative`.
    #[arg(long)]
    realization: Option<RealizationKind>,
    /// `identity`, `random`, `antidiagonal-random`, `invariant-random` or `file:PATH`.
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Which equivalence to check: 2.3, 3.2, 4.3 or 5.6.
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[group(id = "method", required = true, multiple = false, args = ["schur", "haagerup"])]
struct NormArgs {
    /// Exact cb-norm of the Schur multiplier with function `--phi`.
    #[arg(long)]
    schur: bool,
    /// Factorization bounds of `--symbol`.
    #[arg(long)]
    haagerup: bool,
    /// Row-major `[re, im]` array of the Schur function.
    #[arg(long)]
    phi: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NORM_TOL)]
    tol: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DescribeArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Check a table (JSON file) or named group against the group axioms.
    Validate {
        source: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the Cayley table JSON of a named group.
    Emit {
        spec: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failures that end a run with exit code 1.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<u8, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Norm(args) => cmd_norm(args),
        Command::Describe(args) => cmd_describe(args),
        Command::Group(cmd) => cmd_group(cmd),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), InputError> {
    let mut text = to_json(value)?;
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_group(source: &str) -> Result<FiniteGroup, InputError> {
    if source.ends_with(".json") || Path::new(source).is_file() {
        let text = fs::read_to_string(source).map_err(|e| InputError(format!("{source}: {e}")))?;
        Ok(qsymbol_core::io::group_from_json(&text)?)
    } else {
        Ok(FiniteGroup::build(&GroupSpec::parse(source)?)?)
    }
}

/// A symbol file holds either symbol JSON or a Schur function array.
enum SymbolFile {
    Terms(SymbolJson),
    Phi(DMatrix<C64>),
}

fn read_symbol_file(path: &str) -> Result<SymbolFile, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?;
    if text.trim_start().starts_with('[') {
        Ok(SymbolFile::Phi(phi_from_json(&text)?))
    } else {
        Ok(SymbolFile::Terms(serde_json::from_str(&text)?))
    }
}

/// Realization and symbol named by the flags; `kind` overrides `--realization`.
struct Resolved {
    realization: Realization,
    symbol: Option<Symbol>,
}

fn resolve(common: &Common, kind: Option<RealizationKind>, default_symbol: Option<&str>) -> Result<Resolved, InputError> {
    if let (Some(forced), Some(asked)) = (kind, common.realization) {
        if forced != asked {
            return Err(InputError(format!("--realization {asked} conflicts with the requested theorem")));
        }
    }
    let source = common.symbol.as_deref().or(default_symbol);
    let file = match source.and_then(|s| s.strip_prefix("file:")) {
        Some(path) => Some(read_symbol_file(path)?),
        None => None,
    };
    let embedded = match &file {
        Some(SymbolFile::Terms(json)) => json.realization.clone(),
        _ => None,
    };
    let group = match (&common.group, &embedded) {
        (Some(g), _) => load_group(g)?,
        (None, Some(RealizationRef { group, .. })) => group.resolve()?,
        (None, None) => match &file {
            Some(SymbolFile::Phi(phi)) => FiniteGroup::cyclic(phi.nrows())?,
            _ => load_group(DEFAULT_GROUP)?,
        },
    };
    let kind = kind
        .or(common.realization)
        .or(embedded.map(|e| e.kind))
        .unwrap_or(RealizationKind::Commutative);
    if kind == RealizationKind::Custom {
        return Err(InputError("custom realizations are only available through the library".into()));
    }
    let realization = Realization::build(kind, &group)?;
    let symbol = match (source, file) {
        (None, _) => None,
        (Some(_), Some(SymbolFile::Terms(json))) => Some(json.to_symbol(&realization)?),
        (Some(_), Some(SymbolFile::Phi(phi))) => Some(from_schur_function(&realization, &phi)?),
        (Some(name), None) => Some(generate(&realization, name, common.seed)?),
    };
    Ok(Resolved { realization, symbol })
}

fn generate(r: &Realization, name: &str, seed: u64) -> Result<Symbol, InputError> {
    let mut rng = random::rng(seed);
    Ok(match name {
        "identity" => Symbol::identity(r.ambient().space().clone(), SymbolAmbient::Span(r.ambient().clone()))?,
        "random" => random_symbol(r, &mut rng)?,
        "antidiagonal-random" => random_antidiagonal(r, &mut rng)?,
        "invariant-random" => {
            let g = r.group().ok_or_else(|| InputError("invariant symbols need a group".into()))?;
            let u = random::weights(&mut rng, g.order());
            from_schur_function(r, &invariant_schur_function(g, &u))?
        }
        other => return Err(InputError(format!("unknown symbol source `{other}`"))),
    })
}

fn cmd_check(args: CheckArgs) -> Outcome {
    let theorem = args.theorem.as_deref().map(TheoremTag::parse).transpose()?;
    let forced = match theorem {
        Some(TheoremTag::Cocommutative) => Some(RealizationKind::Cocommutative),
        Some(TheoremTag::Commutative) => Some(RealizationKind::Commutative),
        _ => None,
    };
    let resolved = resolve(&args.common, forced, Some("random"))?;
    let chi = resolved.symbol.expect("a default symbol source is set");
    let mut report = equivalence_report(&resolved.realization, &chi, args.tol)?;
    if let Some(tag) = theorem {
        report.theorem = tag;
    }
    report.seed = Some(args.common.seed);
    emit(&report, args.common.output.as_deref())?;
    if report.agree {
        return Ok(0);
    }
    eprintln!(
        "disagreement: direct={} symbolic={} flip_identity={} closed_form={:?} oracle_agrees={:?}",
        report.direct, report.symbolic, report.flip_identity, report.closed_form, report.oracle_agrees
    );
    Ok(2)
}

#[derive(Serialize)]
struct SchurNormOutput {
    #[serde(flatten)]
    result: NormReport,
    seed: u64,
}

#[derive(Serialize)]
struct HaagerupOutput {
    #[serde(flatten)]
    raw: NormReport,
    canonical: NormReport,
    terms: usize,
    seed: u64,
}

fn cmd_norm(args: NormArgs) -> Outcome {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Error::InvalidTolerance(args.tol).into());
    }
    let common = &args.common;
    if args.haagerup {
        let chi = match common.symbol.as_deref().and_then(|s| s.strip_prefix("file:")) {
            Some(path) => match read_symbol_file(path)? {
                SymbolFile::Terms(json) if json.realization.is_none() && common.group.is_none() => {
                    json.to_full_symbol(json.factor_dim()?)?
                }
                _ => resolve(common, None, None)?.symbol.expect("symbol source given"),
            },
            None => resolve(common, None, Some("identity"))?.symbol.expect("default symbol source"),
        };
        let hb = haagerup_bound(&chi)?;
        let out = HaagerupOutput {
            raw: hb.raw.report(),
            canonical: hb.canonical.report(),
            terms: chi.len(),
            seed: common.seed,
        };
        emit(&out, common.output.as_deref())?;
        return Ok(0);
    }
    let (group, phi) = match &args.phi {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let phi = phi_from_json(&text)?;
            let group = match &common.group {
                Some(g) => load_group(g)?,
                None => FiniteGroup::cyclic(phi.nrows())?,
            };
            (group, phi)
        }
        None => {
            let resolved = resolve(common, Some(RealizationKind::Commutative), Some("identity"))?;
            let chi = resolved.symbol.expect("default symbol source");
            let phi = schur_function(&resolved.realization, &chi)?;
            (resolved.realization.group().expect("built-in realization").clone(), phi)
        }
    };
    let result = schur_cb_norm(&group, &phi, args.tol)?;
    let out = SchurNormOutput {
        result: result.report(),
        seed: common.seed,
    };
    emit(&out, common.output.as_deref())?;
    Ok(if result.converged { 0 } else { 3 })
}

#[derive(Serialize)]
struct SymbolDescription {
    realization: RealizationRef,
    terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    schur_function: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<SupportSet>,
    seed: u64,
}

fn cmd_describe(args: DescribeArgs) -> Outcome {
    let common = &args.common;
    let resolved = resolve(common, None, None)?;
    let r = &resolved.realization;
    let Some(chi) = resolved.symbol else {
        emit(&RealizationDescriptor::describe(r)?, common.output.as_deref())?;
        return Ok(0);
    };
    let group = r.group().expect("built-in realization");
    let (schur, support) = match r.kind() {
        RealizationKind::Commutative => (
            Some(qsymbol_core::io::matrix_to_rows(&schur_function(r, &chi)?)),
            None,
        ),
        _ => (None, Some(support_of(r, &chi, DEFAULT_TOL)?)),
    };
    let out = SymbolDescription {
        realization: RealizationRef {
            kind: r.kind(),
            group: qsymbol_core::io::GroupRef::Table(GroupJson::from_group(group)),
        },
        terms: chi.len(),
        schur_function: schur,
        support,
        seed: common.seed,
    };
    emit(&out, common.output.as_deref())?;
    Ok(0)
}

fn cmd_group(cmd: GroupCommand) -> Outcome {
    match cmd {
        GroupCommand::Validate { source, output } => {
            let report = if source.ends_with(".json") || Path::new(&source).is_file() {
                let text = fs::read_to_string(&source).map_err(|e| InputError(format!("{source}: {e}")))?;
                let json: GroupJson = serde_json::from_str(&text)?;
                qsymbol_core::groups::validate(&json.cayley)
            } else {
                FiniteGroup::build(&GroupSpec::parse(&source)?)?.validate()
            };
            emit(&report, output.as_deref())?;
            Ok(if report.passed { 0 } else { 2 })
        }
        GroupCommand::Emit { spec, output } => {
            let group = load_group(&spec)?;
            let mut text = group_to_json(&group)?;
            text.push('\n');
            match output {
                Some(path) => fs::write(path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            Ok(0)
        }
    }
}
