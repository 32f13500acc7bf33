pub mod corpus;
pub mod selftest;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use ordalg::algebra::{basis_separating_probe, obs_equiv, oracle_applicable, oracle_separating_probe, parse_vector_text, Vector};
use ordalg::basis::{decompose_totals, decompose_weak, Decomposition, Route as BasisRoute};
use ordalg::event::{sym, Sym};
use ordalg::picalc::{cross_check, outcome_term, parse_term, translate, Term};
use ordalg::plays::Play;
use ordalg::semiring::{Scalar, SemiringDescriptor};
use ordalg::Error;
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INEQUIVALENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ordalg", version, about = "Order algebras of processes: evaluate, translate and compare terms")]
pub struct Cli {
    #[arg(long, global = true, default_value = "nat", value_parser = ["nat", "int", "rat", "bool", "maymust-may", "maymust-must"])]
    pub semiring: String,
    #[arg(long, global = true, value_enum, default_value_t = RouteFlag::Basis)]
    pub route: RouteFlag,
    /// Largest probe support the oracle enumerates.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_support: usize,
    /// Free names of the translation, overriding the inferred ones.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alphabet: Option<Vec<String>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteFlag {
    Basis,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Dot,
    Jsonl,
}

/// Inputs are file paths when such a file exists, else inline text. Files
/// ending in `.vec` hold vectors in the line format; anything else is a term.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operational outcome of a term.
    Eval { input: String },
    /// Observational equivalence of two terms or two vectors.
    Equiv { left: String, right: String },
    /// Translation of a term into the algebra.
    Translate { input: String },
    /// Coordinates of a vector, or of a term's translation, in the basis.
    Basis { input: String },
    /// Outcome of the parallel composition next to the denotational pairing.
    Probe { left: String, right: String },
    /// The acceptance suite; `ORDALG_SEED` fixes the random corpora.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

enum Input {
    Term(Term),
    Vector(Vector),
}

fn read_input(arg: &str, sr: SemiringDescriptor) -> ordalg::Result<Input> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {arg}: {e}")))?;
        if path.extension().is_some_and(|x| x == "vec") {
            return Ok(Input::Vector(parse_vector_text(&text, sr)?));
        }
        return Ok(Input::Term(parse_term(&text, sr)?));
    }
    Ok(Input::Term(parse_term(arg, sr)?))
}

fn read_term(arg: &str, sr: SemiringDescriptor) -> ordalg::Result<Term> {
    match read_input(arg, sr)? {
        Input::Term(t) => Ok(t),
        Input::Vector(_) => Err(Error::Usage(format!("{arg}: expected a term, found a vector file"))),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    sr: SemiringDescriptor,
}

impl Ctx<'_> {
    fn alphabet(&self, terms: &[&Term]) -> ordalg::Result<BTreeSet<Sym>> {
        let free: BTreeSet<Sym> = terms.iter().flat_map(|t| t.free_roots()).collect();
        let Some(names) = &self.cli.alphabet else { return Ok(free) };
        let given: BTreeSet<Sym> = names.iter().map(|s| sym(s.trim())).collect();
        match free.difference(&given).next() {
            Some(x) => Err(Error::Usage(format!("free name `{x}` missing from --alphabet"))),
            None => Ok(given),
        }
    }

    fn vectors(&self, args: &[&str]) -> ordalg::Result<Vec<Vector>> {
        let inputs = args.iter().map(|a| read_input(a, self.sr)).collect::<ordalg::Result<Vec<_>>>()?;
        let terms: Vec<&Term> = inputs.iter().filter_map(|i| if let Input::Term(t) = i { Some(t) } else { None }).collect();
        if !terms.is_empty() && terms.len() != inputs.len() {
            return Err(Error::Usage("cannot mix terms and vector files".into()));
        }
        let alphabet = self.alphabet(&terms)?;
        inputs
            .into_iter()
            .map(|i| match i {
                Input::Term(t) => translate(self.sr, &t, &alphabet),
                Input::Vector(v) => Ok(v),
            })
            .collect()
    }
}

fn json_play(c: &Scalar, r: &Play) -> serde_json::Value {
    let events: Vec<String> = r.support().iter().map(|e| e.to_string()).collect();
    let pairs: Vec<[String; 2]> = r.strict_pairs().into_iter().map(|(i, j)| [events[i].clone(), events[j].clone()]).collect();
    json!({ "coef": c.to_string(), "events": events, "pairs": pairs })
}

fn emit_plays<'a>(out: &mut dyn Write, format: Format, terms: impl IntoIterator<Item = (&'a Play, &'a Scalar)>) -> std::io::Result<()> {
    for (r, c) in terms {
        match format {
            Format::Text => writeln!(out, "{}", ordalg::algebra::play_line(c, r))?,
            Format::Jsonl => writeln!(out, "{}", json_play(c, r))?,
            Format::Dot => write!(out, "// coefficient {c}\n{}", r.to_dot())?,
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, writing the report to `out`.
/// Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure::Engine(e)) => {
            let _ = writeln!(err, "ordalg: {e}");
            match e {
                Error::Unsupported(_) => EXIT_UNSUPPORTED,
                Error::Usage(_) | Error::Parse { .. } => EXIT_USAGE,
            }
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "ordalg: {e}");
            EXIT_USAGE
        }
    }
}

enum Failure {
    Engine(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let sr = SemiringDescriptor::from_flag(&cli.semiring)?;
    let ctx = Ctx { cli, sr };
    let no_dot = |what: &str| Error::Usage(format!("--format dot applies to plays, not to {what}"));
    match &cli.command {
        Command::Eval { input } => {
            let t = read_term(input, sr)?;
            let v = outcome_term(sr, &t);
            match cli.format {
                Format::Text => writeln!(out, "{v}")?,
                Format::Jsonl => writeln!(out, "{}", json!({ "outcome": v.to_string() }))?,
                Format::Dot => return Err(no_dot("outcomes").into()),
            }
            Ok(EXIT_OK)
        }
        Command::Translate { input } => {
            let t = read_term(input, sr)?;
            let v = translate(sr, &t, &ctx.alphabet(&[&t])?)?;
            emit_plays(out, cli.format, v.terms())?;
            Ok(EXIT_OK)
        }
        Command::Basis { input } => {
            let v = ctx.vectors(&[input])?.remove(0);
            let Decomposition { base, coords } = match BasisRoute::for_semiring(sr)? {
                BasisRoute::Totals => decompose_totals(&v)?,
                BasisRoute::Weak => decompose_weak(&v)?,
            };
            if cli.format == Format::Text {
                let name = match base {
                    BasisRoute::Totals => "total orders",
                    BasisRoute::Weak => "weak total orders",
                };
                writeln!(out, "# basis: {name}")?;
            }
            emit_plays(out, cli.format, coords.iter())?;
            Ok(EXIT_OK)
        }
        Command::Equiv { left, right } => {
            let vs = ctx.vectors(&[left, right])?;
            let (u, v) = (&vs[0], &vs[1]);
            let (equivalent, probe) = match cli.route {
                RouteFlag::Basis => {
                    let eq = obs_equiv(u, v)?;
                    let probe = if eq {
                        None
                    } else if oracle_applicable(u, v, cli.max_support)? {
                        oracle_separating_probe(u, v, cli.max_support)?
                    } else {
                        basis_separating_probe(u, v)?
                    };
                    (eq, probe)
                }
                RouteFlag::Oracle => {
                    if !oracle_applicable(u, v, cli.max_support)? {
                        return Err(Error::Unsupported(format!(
                            "the oracle route needs every probe support within --max-support {}",
                            cli.max_support
                        ))
                        .into());
                    }
                    let probe = oracle_separating_probe(u, v, cli.max_support)?;
                    (probe.is_none(), probe)
                }
            };
            match cli.format {
                Format::Text => {
                    writeln!(out, "{}", if equivalent { "equivalent" } else { "inequivalent" })?;
                    if let Some((t, x, y)) = &probe {
                        writeln!(out, "probe {t} gives {x} against {y}")?;
                    }
                }
                Format::Jsonl => {
                    let probe = probe.as_ref().map(|(t, x, y)| json!({ "play": t.to_string(), "left": x.to_string(), "right": y.to_string() }));
                    writeln!(out, "{}", json!({ "equivalent": equivalent, "probe": probe }))?;
                }
                Format::Dot => {
                    if let Some((t, _, _)) = &probe {
                        write!(out, "{}", t.to_dot())?;
                    }
                }
            }
            Ok(if equivalent { EXIT_OK } else { EXIT_INEQUIVALENT })
        }
        Command::Probe { left, right } => {
            let (p, q) = (read_term(left, sr)?, read_term(right, sr)?);
            let (operational, denotational) = cross_check(sr, &p, &q)?;
            match cli.format {
                Format::Text => writeln!(out, "operational {operational}\ndenotational {denotational}")?,
                Format::Jsonl => writeln!(
                    out,
                    "{}",
                    json!({ "operational": operational.to_string(), "denotational": denotational.to_string() })
                )?,
                Format::Dot => return Err(no_dot("outcomes").into()),
            }
            Ok(if operational == denotational { EXIT_OK } else { EXIT_INEQUIVALENT })
        }
        Command::Selftest { only } => {
            let seed = corpus::seed_from_env(1);
            let ids: Vec<u8> = match only {
                Some(id) if (1..=selftest::CRITERIA.len() as u8).contains(id) => vec![*id],
                Some(id) => return Err(Error::Usage(format!("no criterion {id}")).into()),
                None => selftest::CRITERIA.iter().map(|c| c.0).collect(),
            };
            let mut all = true;
            for id in ids {
                let r = selftest::run_criterion(id, seed);
                all &= r.passed;
                match cli.format {
                    Format::Jsonl => writeln!(
                        out,
                        "{}",
                        json!({ "criterion": r.id, "name": r.name, "passed": r.passed, "detail": r.detail,
                                "seconds": r.elapsed.as_secs_f64(), "limit": r.limit.as_secs() })
                    )?,
                    _ => writeln!(out, "{r}")?,
                }
            }
            Ok(if all { EXIT_OK } else { EXIT_INEQUIVALENT })
        }
    }
}
