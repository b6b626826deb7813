use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use teamlogic::eval::{eval_eso, eval_team, EvalConfig, ExistsMode, GqSearch, Interpretation, OrMode};
use teamlogic::harness::{check_equiv, run_sweep, Caps, FormulaSource, Property, SweepReport, SweepSpec};
use teamlogic::model::{parse_structure, parse_team, Structure};
use teamlogic::quantifiers::{format_subset, QuantifierRegistry};
use teamlogic::syntax::{parse_formula, Dialect, ParseOptions, Signature};
use teamlogic::transform::{
    dq_to_eso, eso_to_dq, eso_to_dq_total, flatten_functions, to_normal_form, Flavor, FreshSymbol, Note,
};
use teamlogic::Error;

/// Instance spaces up to this size are swept exhaustively by default.
const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
const DEFAULT_RANDOM: u64 = 500;

#[derive(Parser)]
#[command(name = "teamlogic", version, about = "Model checking for dependence and independence logic with generalized quantifiers")]
struct Cli {
    /// Output style: plain text or one JSON record per line.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Extensional quantifier files to register before running.
    #[arg(long = "load", value_name = "FILE", global = true)]
    load: Vec<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Dq,
    Iq,
    Fo,
    Eso,
}

impl From<DialectArg> for Dialect {
    fn from(d: DialectArg) -> Self {
        match d {
            DialectArg::Dq => Dialect::Dq,
            DialectArg::Iq => Dialect::Iq,
            DialectArg::Fo => Dialect::Fo,
            DialectArg::Eso => Dialect::Eso,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrArg {
    Paper,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExistsArg {
    Paper,
    Lax,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Full,
    Minimal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Nf,
    Dq,
    Eso,
}

#[derive(Args)]
struct Semantics {
    #[arg(long, value_enum, default_value = "paper")]
    or_mode: OrArg,
    #[arg(long, value_enum, default_value = "paper")]
    exists_mode: ExistsArg,
    #[arg(long, value_enum, default_value = "full")]
    gq_search: SearchArg,
    /// Prune witness searches by testing partial teams (downward-closed formulas only).
    #[arg(long)]
    prune: bool,
}

impl Semantics {
    fn config(&self) -> EvalConfig {
        EvalConfig::default()
            .with_or_mode(match self.or_mode {
                OrArg::Paper => OrMode::Paper,
                OrArg::Strict => OrMode::Strict,
            })
            .with_exists_mode(match self.exists_mode {
                ExistsArg::Paper => ExistsMode::Paper,
                ExistsArg::Lax => ExistsMode::Lax,
            })
            .with_gq_search(match self.gq_search {
                SearchArg::Full => GqSearch::Full,
                SearchArg::Minimal => GqSearch::Minimal,
            })
            .with_pruning(self.prune)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a team formula on a structure and a team.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        team: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value = "iq")]
        dialect: DialectArg,
        #[command(flatten)]
        semantics: Semantics,
    },
    /// Evaluate an ESO(Q) sentence, reading free relations from team files.
    EvalEso {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// `R=FILE`: interpret `R` as rel(X) of the team in FILE.
        #[arg(long = "rel", value_name = "R=FILE")]
        rels: Vec<String>,
    },
    /// Translate between ESO(Q) and D(Q)/I(Q).
    Translate {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        formula: String,
        /// `d` (negative occurrences, D(Q)) or `i` (exact, I(Q)); inferred when absent.
        #[arg(long)]
        flavor: Option<Flavor>,
        /// Guard the D(Q) translation for universes where this quantifier accepts nothing.
        #[arg(long)]
        quantifier: Option<String>,
        /// Team variables in order, for `--to eso`; defaults to the free variables.
        #[arg(long, value_delimiter = ',')]
        domain: Vec<String>,
        /// Name of the team relation, for `--to eso`.
        #[arg(long, default_value = "R")]
        rel: String,
    },
    /// Check a property over a space of structures, teams and formulas.
    Sweep {
        #[arg(long)]
        property: Property,
        #[arg(long, default_value = "2")]
        sizes: String,
        #[arg(long, default_value = "P/1")]
        signature: String,
        #[arg(long, value_delimiter = ',')]
        quantifiers: Vec<String>,
        /// Number of random instances (random formulas for the connective lemma).
        #[arg(long, conflicts_with = "exhaustive")]
        count: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sweep the whole space regardless of its size.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Collect every counterexample instead of stopping at the first.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum)]
        dialect: Option<DialectArg>,
        /// Explicit formulas instead of generated ones; `[Q ` stands for each quantifier.
        #[arg(long = "formula")]
        formulas: Vec<String>,
        #[command(flatten)]
        semantics: Semantics,
    },
    /// Compare two sentences on every structure of the given sizes.
    CheckEquiv {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, default_value = "2")]
        sizes: String,
        #[arg(long, default_value = "P/1")]
        signature: String,
    },
    /// Inspect quantifiers.
    Quant {
        #[arg(long, group = "action")]
        list: bool,
        #[arg(long, group = "action", value_name = "NAME")]
        validate: Option<String>,
        #[arg(long, group = "action", value_name = "NAME")]
        dual: Option<String>,
        #[arg(long, group = "action", value_name = "NAME")]
        show: Option<String>,
        /// Universe sizes for --validate, e.g. `1..4` or `2,3`.
        #[arg(long, default_value = "1..4")]
        sizes: String,
        /// Universe size for --show and --dual.
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
}

/// What a command found: 0 for pass/true, 1 for counterexample/false.
type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {e}"),
                Format::Machine => eprintln!("{}", json!({ "error": e.to_string() })),
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let mut reg = QuantifierRegistry::with_builtins();
    for path in &cli.load {
        reg.load_extensional(&read(path)?)?;
    }
    let out = Out(cli.format);
    match &cli.command {
        Command::Eval {
            model,
            team,
            formula,
            dialect,
            semantics,
        } => {
            let m = load_structure(model)?;
            let x = parse_team(&read(team)?)?;
            let sig = m.signature();
            let phi = parse_formula(formula, &ParseOptions::new((*dialect).into()).signature(&sig).registry(&reg))?;
            let verdict = eval_team(&m, &x, &phi, &reg, &semantics.config())?;
            out.verdict("eval", verdict);
            Ok(verdict)
        }
        Command::EvalEso { model, formula, rels } => {
            let m = load_structure(model)?;
            let mut sig = m.signature();
            let mut interp = Interpretation::new();
            for spec in rels {
                let (name, path) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::Precondition(format!("`--rel {spec}` is not of the form R=FILE")))?;
                let x = parse_team(&read(Path::new(path))?)?;
                sig.add_relation(name, x.vars().len())?;
                interp = interp.relation(name, x.relation(m.size())?);
            }
            let phi = parse_formula(formula, &ParseOptions::new(Dialect::Eso).signature(&sig).registry(&reg))?;
            let verdict = eval_eso(&m, &phi, &interp, &reg, &EvalConfig::default())?;
            out.verdict("eval-eso", verdict);
            Ok(verdict)
        }
        Command::Translate {
            to,
            formula,
            flavor,
            quantifier,
            domain,
            rel,
        } => translate(out, &reg, *to, formula, *flavor, quantifier.as_deref(), domain, rel),
        Command::Sweep {
            property,
            sizes,
            signature,
            quantifiers,
            count,
            seed,
            exhaustive,
            depth,
            all,
            dialect,
            formulas,
            semantics,
        } => {
            let mut spec = SweepSpec::new(*property)
                .signature(Signature::parse_list(signature)?)
                .sizes(parse_sizes(sizes)?)
                .quantifiers(quantifiers.iter().cloned())
                .collect_all(*all)
                .config(semantics.config());
            if let Some(d) = dialect {
                spec = spec.dialect((*d).into());
            }
            let random = |count| {
                if *property == Property::ConnectiveLemma {
                    FormulaSource::RandomFormulas {
                        seed: *seed,
                        count,
                        depth: *depth,
                    }
                } else {
                    FormulaSource::RandomInstances {
                        seed: *seed,
                        count,
                        depth: *depth,
                    }
                }
            };
            let report = if !formulas.is_empty() {
                run_sweep(&spec.explicit(formulas.iter().cloned()), &reg)?
            } else if *exhaustive {
                run_sweep(&spec.source(FormulaSource::Exhaustive { depth: *depth }), &reg)?
            } else if let Some(count) = count {
                run_sweep(&spec.source(random(*count)), &reg)?
            } else {
                // exhaustive when the space is small enough, random otherwise
                let capped = spec.clone().source(FormulaSource::Exhaustive { depth: *depth }).caps(Caps {
                    instances: EXHAUSTIVE_LIMIT,
                    ..Caps::default()
                });
                match run_sweep(&capped, &reg) {
                    Err(Error::CapExceeded { .. }) => run_sweep(&spec.source(random(DEFAULT_RANDOM)), &reg)?,
                    other => other?,
                }
            };
            out.report(&report);
            Ok(report.passed())
        }
        Command::CheckEquiv {
            lhs,
            rhs,
            sizes,
            signature,
        } => {
            let sig = Signature::parse_list(signature)?;
            let report = check_equiv(lhs, rhs, &parse_sizes(sizes)?, &sig, &reg, &EvalConfig::default())?;
            out.report(&report);
            Ok(report.passed())
        }
        Command::Quant {
            list,
            validate,
            dual,
            show,
            sizes,
            size,
        } => {
            if *list {
                for name in reg.names() {
                    let q = reg.resolve(&name)?;
                    out.line(format!("{name}/{}", q.arity()), json!({ "name": name, "arity": q.arity() }));
                }
                Ok(true)
            } else if let Some(name) = validate {
                validate_quantifier(out, &reg, name, &parse_sizes(sizes)?)
            } else if let Some(name) = dual {
                show_members(out, &reg, &format!("{name}^d"), *size)
            } else if let Some(name) = show {
                show_members(out, &reg, name, *size)
            } else {
                Err(Error::Precondition("quant needs one of --list, --validate, --dual, --show".into()))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn translate(
    out: Out,
    reg: &QuantifierRegistry,
    to: Target,
    formula: &str,
    flavor: Option<Flavor>,
    quantifier: Option<&str>,
    domain: &[String],
    rel: &str,
) -> Outcome {
    let opts = ParseOptions::new(match to {
        Target::Eso => Dialect::Iq,
        _ => Dialect::Eso,
    })
    .registry(reg);
    let phi = parse_formula(formula, &opts)?;
    let (text, fresh, notes, min_universe) = match to {
        Target::Nf => {
            let r = to_normal_form(&phi)?;
            (r.output.to_string(), r.fresh, r.notes, r.min_universe)
        }
        Target::Dq => {
            let r = match quantifier {
                Some(q) => eso_to_dq_total(&phi, q, reg)?,
                None => to_normal_form(&phi)?.then(flatten_functions)?.then(eso_to_dq)?,
            };
            (r.output.to_string(), r.fresh, r.notes, r.min_universe)
        }
        Target::Eso => {
            let domain: Vec<String> = if domain.is_empty() {
                phi.free_vars().into_iter().collect()
            } else {
                domain.to_vec()
            };
            let flavor = flavor.unwrap_or(if phi.contains_indep() {
                Flavor::IExact
            } else {
                Flavor::DNegative
            });
            let r = dq_to_eso(&phi, &domain, rel, flavor)?;
            (r.output.to_string(), r.fresh, r.notes, r.min_universe)
        }
    };
    out.translation(&text, &fresh, &notes, min_universe);
    Ok(true)
}

fn validate_quantifier(out: Out, reg: &QuantifierRegistry, name: &str, sizes: &[usize]) -> Outcome {
    let q = reg.resolve(name)?;
    let mut ok = true;
    for &n in sizes {
        let monotone = q.is_monotone_on(n)?;
        let (no_empty, has_full) = q.check_nontriviality(n)?;
        let members = q.members(n)?.len();
        ok &= monotone;
        out.line(
            format!("size {n}: monotone={monotone} empty-rejected={no_empty} full-accepted={has_full} members={members}"),
            json!({
                "quantifier": name,
                "size": n,
                "monotone": monotone,
                "empty_rejected": no_empty,
                "full_accepted": has_full,
                "members": members,
            }),
        );
    }
    Ok(ok)
}

fn show_members(out: Out, reg: &QuantifierRegistry, name: &str, n: usize) -> Outcome {
    let q = reg.resolve(name)?;
    for mask in q.members(n)? {
        let set = format_subset(n, q.arity(), mask);
        out.line(set.clone(), json!({ "quantifier": name, "size": n, "member": set }));
    }
    Ok(true)
}

#[derive(Clone, Copy)]
struct Out(Format);

impl Out {
    fn line(self, text: String, record: serde_json::Value) {
        match self.0 {
            Format::Text => emit(&format!("{text}\n")),
            Format::Machine => emit(&format!("{record}\n")),
        }
    }

    fn verdict(self, command: &str, verdict: bool) {
        self.line(verdict.to_string(), json!({ "command": command, "result": verdict }));
    }

    fn report(self, report: &SweepReport) {
        match self.0 {
            Format::Text => emit(&report.to_string()),
            Format::Machine => emit(&format!("{}\n", report.to_json_line())),
        }
    }

    fn translation(self, text: &str, fresh: &[FreshSymbol], notes: &[Note], min_universe: usize) {
        match self.0 {
            Format::Text => {
                emit(&format!("{text}\n"));
                for s in fresh {
                    emit(&format!("fresh {s}\n"));
                }
                if min_universe > 1 {
                    emit(&format!("requires universe size >= {min_universe}\n"));
                }
            }
            Format::Machine => emit(&format!(
                "{}\n",
                json!({
                    "output": text,
                    "fresh": fresh.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "notes": notes.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "min_universe": min_universe,
                })
            )),
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<Structure, Error> {
    parse_structure(&read(path)?)
}

/// `2,3` or `1..4` (inclusive).
fn parse_sizes(text: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::Precondition(format!("bad size list `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}
