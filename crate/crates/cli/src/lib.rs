//! Command logic for the `modeloids` binary, callable in-process through [`run`].
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; for `ef`, the structures are equivalent |
//! | 1 | a verifier found a violation; for `ef`, not equivalent |
//! | 2 | usage, syntax or validation error in the input |
//! | 3 | I/O error |
//! | 4 | `ef` only: the derivative and the game oracle disagree |
//! | 5 | a configured size bound was exceeded |

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use modeloids::catmod::{CategoricalModeloid, VerifiedCategory};
use modeloids::efgames::{build_category_d, certificate_from, ef_equiv_oracle, Bounds, CategoryD, EfVerdict};
use modeloids::freecat::parse_category;
use modeloids::invsemi::{check_representation, parse_table, InverseSemigroupTable, Semimodeloid, TableFile};
use modeloids::modeloid::{parse_modeloid, Modeloid};
use modeloids::pbij::DEFAULT_MAX_CARRIER;
use modeloids::structfmt::{parse_structures, Structure, StructureFile};
use modeloids::{random, DerivativeChain, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "modeloids",
    version,
    about = "Modeloids, inverse semigroups and Ehrenfeucht-Fraïssé equivalence"
)]
struct Cli {
    /// Output style; `machine` prints sorted `key: value` lines.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest universe accepted per structure.
    #[arg(long, default_value_t = Bounds::default().max_universe, global = true)]
    max_universe: usize,
    /// Largest number of rounds accepted.
    #[arg(long, default_value_t = Bounds::default().max_rounds, global = true)]
    max_rounds: usize,
    /// Largest carrier accepted for modeloids.
    #[arg(long, default_value_t = DEFAULT_MAX_CARRIER, global = true)]
    max_carrier: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileKind {
    Structures,
    Table,
    Category,
    Modeloid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    Semigroup,
    Category,
    InverseCategory,
    Modeloid,
    Semimodeloid,
    CategoricalModeloid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeriveKind {
    Modeloid,
    Semimodeloid,
    CategoricalModeloid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate an input file.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FileKind::Structures)]
        kind: FileKind,
    },
    /// Decide m-round Ehrenfeucht-Fraïssé equivalence of two structures.
    Ef {
        file: PathBuf,
        /// First structure; defaults to the first in the file.
        #[arg(long)]
        left: Option<String>,
        /// Second structure; defaults to the second in the file.
        #[arg(long)]
        right: Option<String>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Write the back-and-forth certificate here when the structures are equivalent.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Check the axioms of a table, category or modeloid file.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        file: PathBuf,
    },
    /// Iterate the derivative and report the sizes of the chain.
    Derive {
        #[arg(value_enum, required_unless_present = "random")]
        kind: Option<DeriveKind>,
        #[arg(required_unless_present = "random")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Instead of a file, derive this many seeded random modeloids.
        #[arg(long, conflicts_with_all = ["kind", "file"])]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the Wagner-Preston representation of an inverse semigroup table.
    Embed { file: PathBuf },
    /// Print the category of partial isomorphisms between two structures.
    Category {
        file: PathBuf,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        /// Append a `members` line listing every morphism.
        #[arg(long)]
        with_members: bool,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: report.code,
            stdout: report.render(cli.format),
            stderr: report.stderr,
        },
        Err(failure) => Outcome {
            code: failure.code(),
            stdout: String::new(),
            stderr: format!("error: {failure}\n"),
        },
    }
}

enum Failure {
    Io(PathBuf, std::io::Error),
    Lib(Option<PathBuf>, Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(..) => EXIT_IO,
            Failure::Lib(_, e) if e.is_resource() => EXIT_RESOURCE,
            Failure::Lib(..) => EXIT_INPUT,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(path, e) => write!(f, "{}: {e}", path.display()),
            Failure::Lib(Some(path), e) => write!(f, "{}: {e}", path.display()),
            Failure::Lib(None, e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(None, e)
    }
}

struct Report {
    code: i32,
    fields: Vec<(String, String)>,
    /// Printed verbatim instead of the fields.
    raw: Option<String>,
    stderr: String,
}

impl Report {
    fn new() -> Self {
        Report {
            code: EXIT_OK,
            fields: Vec::new(),
            raw: None,
            stderr: String::new(),
        }
    }

    fn field(&mut self, key: impl Into<String>, value: impl Display) {
        self.fields.push((key.into(), value.to_string()));
    }

    /// Records a failed check: exit code 1 and a diagnostic.
    fn violation(&mut self, message: impl Display) {
        self.field("violation", &message);
        self.stderr.push_str(&format!("violation: {message}\n"));
        self.code = EXIT_NEGATIVE;
    }

    fn render(&self, format: Format) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut fields: Vec<&(String, String)> = self.fields.iter().collect();
        if format == Format::Machine {
            fields.sort();
        }
        fields.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn at<T>(path: &Path, result: modeloids::Result<T>) -> Result<T, Failure> {
    result.map_err(|e| Failure::Lib(Some(path.to_path_buf()), e))
}

/// Zero-padded keys so that machine output sorts in index order.
fn indexed(prefix: &str, i: usize, count: usize) -> String {
    let width = count.saturating_sub(1).to_string().len();
    format!("{prefix}.{i:0width$}")
}

fn joined<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let bounds = Bounds {
        max_universe: cli.max_universe,
        max_rounds: cli.max_rounds,
        ..Bounds::default()
    };
    match &cli.command {
        Command::Validate { file, kind } => validate(file, *kind, cli.max_carrier),
        Command::Ef {
            file,
            left,
            right,
            rounds,
            certificate,
        } => ef(
            file,
            left.as_deref(),
            right.as_deref(),
            *rounds,
            certificate.as_deref(),
            &bounds,
        ),
        Command::Verify { kind, file } => verify(*kind, file, cli.max_carrier),
        Command::Derive {
            kind,
            file,
            rounds,
            random,
            seed,
        } => match (random, kind, file) {
            (Some(count), _, _) => derive_random(*count, *seed, *rounds, cli.max_carrier.min(4)),
            (None, Some(kind), Some(file)) => derive(*kind, file, *rounds, cli.max_carrier),
            _ => unreachable!("clap requires kind and file without --random"),
        },
        Command::Embed { file } => embed(file),
        Command::Category {
            file,
            left,
            right,
            with_members,
        } => category(file, left.as_deref(), right.as_deref(), *with_members, &bounds),
    }
}

fn validate(file: &Path, kind: FileKind, max_carrier: usize) -> Result<Report, Failure> {
    let text = read(file)?;
    let mut report = Report::new();
    match kind {
        FileKind::Structures => {
            let parsed = at(file, parse_structures(&text))?;
            let v = &parsed.vocabulary;
            report.field(
                "vocabulary",
                joined(
                    v.relations()
                        .iter()
                        .map(|(r, k)| format!("{r}/{k}"))
                        .chain(v.constants().iter().cloned()),
                ),
            );
            report.field("structures", joined(parsed.structures.iter().map(Structure::name)));
            for s in &parsed.structures {
                report.field(format!("universe.{}", s.name()), s.universe());
            }
        }
        FileKind::Table => {
            let parsed = at(file, parse_table(&text))?;
            report.field("order", parsed.table.order());
        }
        FileKind::Category => {
            let parsed = at(file, parse_category(&text))?;
            report.field("morphisms", parsed.category.morphism_count());
        }
        FileKind::Modeloid => {
            let parsed = at(file, parse_modeloid(&text, max_carrier))?;
            report.field("carrier", parsed.carrier().size());
            report.field("members", parsed.len());
        }
    }
    report.field("valid", true);
    Ok(report)
}

fn pick<'f>(
    file: &'f StructureFile,
    path: &Path,
    name: Option<&str>,
    position: usize,
) -> Result<&'f Structure, Failure> {
    let found = match name {
        Some(name) => file.get(name),
        None => file.structures.get(position),
    };
    found.ok_or_else(|| {
        let wanted = name.map_or_else(
            || format!("structure number {}", position + 1),
            |n| format!("structure {n}"),
        );
        Failure::Lib(Some(path.to_path_buf()), Error::Input(format!("{wanted} not found")))
    })
}

fn ef(
    file: &Path,
    left: Option<&str>,
    right: Option<&str>,
    rounds: usize,
    certificate: Option<&Path>,
    bounds: &Bounds,
) -> Result<Report, Failure> {
    let text = read(file)?;
    let parsed = at(file, parse_structures(&text))?;
    let a = pick(&parsed, file, left, 0)?;
    let b = pick(&parsed, file, right, 1)?;
    if rounds > bounds.max_rounds {
        return Err(Error::Bound {
            what: "rounds",
            actual: rounds,
            limit: bounds.max_rounds,
        }
        .into());
    }
    let d = build_category_d(a, b, bounds)?;
    let chain = d.derivative_chain(rounds);
    let EfVerdict {
        equivalent, witness, ..
    } = d.verdict(chain.last(), rounds);
    let oracle = ef_equiv_oracle(a, b, rounds, bounds)?;

    let mut report = Report::new();
    report.field("left", a.name());
    report.field("right", b.name());
    report.field("equivalent", equivalent);
    report.field("rounds", rounds);
    report.field("method", "derivative");
    report.field("oracle-agrees", equivalent == oracle);
    report.field("witness", witness.map_or_else(|| "none".to_string(), |w| w.to_string()));
    report.field("morphisms", d.category().morphism_count() - 1);
    report.field(
        "surviving",
        chain.last().members().iter().filter(|&&m| m != d.star()).count(),
    );
    if let Some(path) = certificate {
        match certificate_from(&d, &chain) {
            Some(cert) => {
                std::fs::write(path, cert.to_text()).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
                report.field("certificate", path.display());
            }
            None => report.field("certificate", "none"),
        }
    }
    report.code = if equivalent { EXIT_OK } else { EXIT_NEGATIVE };
    if equivalent != oracle {
        report.code = EXIT_DISAGREEMENT;
        report.stderr = format!(
            "invariant breach: derivative says {equivalent}, game oracle says {oracle} for {} and {} at {rounds} rounds\n{}",
            a.name(),
            b.name(),
            modeloids::structfmt::print_structures(&parsed.vocabulary, &[a.clone(), b.clone()])
        );
    }
    Ok(report)
}

fn semigroup_report(report: &mut Report, parsed: TableFile) -> Option<InverseSemigroupTable> {
    let table = parsed.table.clone();
    if let Some((x, y, z)) = table.associativity_failure() {
        report.violation(format!("associativity fails at ({x}, {y}, {z})"));
        return None;
    }
    if let Ok(c) = table.characterize(parsed.inv.as_deref()) {
        report.field("characterization.axiomatic", c.axiomatic);
        report.field("characterization.unique-inverses", c.unique_inverses);
        report.field("characterization.regular-commuting", c.regular_and_idempotents_commute);
    }
    match parsed.into_inverse_semigroup() {
        Ok(t) => match t.verify() {
            Ok(()) => Some(t),
            Err(v) => {
                report.violation(v);
                None
            }
        },
        Err(_) => {
            let x = table.elements().find(|&x| table.inverses_of(x).len() != 1).unwrap_or(0);
            report.violation(format!(
                "unique inverse: no inv line, and {x} has inverses [{}]",
                joined(table.inverses_of(x))
            ));
            None
        }
    }
}

fn verify(kind: VerifyKind, file: &Path, max_carrier: usize) -> Result<Report, Failure> {
    let text = read(file)?;
    let mut report = Report::new();
    match kind {
        VerifyKind::Semigroup => {
            let parsed = at(file, parse_table(&text))?;
            if let Some(t) = semigroup_report(&mut report, parsed) {
                report.field("order", t.order());
                report.field("neutral", t.neutral().map_or("none".into(), |e| e.to_string()));
                report.field("zero", t.zero().map_or("none".into(), |e| e.to_string()));
            }
        }
        VerifyKind::Category => {
            let c = at(file, parse_category(&text))?.category;
            report.field("morphisms", c.morphism_count());
            if let Err(v) = c.verify_category() {
                report.violation(v);
            }
        }
        VerifyKind::InverseCategory => {
            let c = at(file, parse_category(&text))?.category;
            report.field("morphisms", c.morphism_count());
            match c.verify_inverse_category_unique() {
                Ok(_) => report.field("unique-inverse", "ok"),
                Err(v) => report.violation(v),
            }
            if c.inverse_table().is_some() {
                match c.verify_inverse_category_equational() {
                    Ok(()) => report.field("equational", "ok"),
                    Err(v) => report.violation(format!("equational: {v}")),
                }
            } else {
                report.field("equational", "skipped (no inv line)");
            }
        }
        VerifyKind::Modeloid => {
            let m = at(file, parse_modeloid(&text, max_carrier))?;
            report.field("members", m.len());
            if let Err(v) = m.verify() {
                report.violation(v);
            }
        }
        VerifyKind::Semimodeloid => {
            let s = load_semimodeloid(file, &text)?;
            report.field("members", s.members().len());
            if let Err(v) = s.verify() {
                report.violation(v);
            }
        }
        VerifyKind::CategoricalModeloid => {
            let m = load_categorical(file, &text)?;
            report.field("members", m.len());
            if let Err(v) = m.verify() {
                report.violation(v);
            }
        }
    }
    if report.code == EXIT_OK {
        report.field("verdict", "ok");
    }
    Ok(report)
}

fn load_semimodeloid(file: &Path, text: &str) -> Result<Semimodeloid, Failure> {
    let parsed = at(file, parse_table(text))?;
    let members = parsed.members.clone();
    let table = at(file, parsed.into_inverse_semigroup())?;
    match members {
        Some(members) => at(file, Semimodeloid::new(table, members)),
        None => at(file, Semimodeloid::whole(table)),
    }
}

fn load_categorical(file: &Path, text: &str) -> Result<CategoricalModeloid, Failure> {
    let parsed = at(file, parse_category(text))?;
    let ambient = std::sync::Arc::new(at(file, VerifiedCategory::new(parsed.category))?);
    match parsed.members {
        Some(members) => at(file, CategoricalModeloid::new(ambient, members)),
        None => Ok(CategoricalModeloid::whole(ambient)),
    }
}

fn chain_fields<T>(report: &mut Report, chain: &DerivativeChain<T>, size: impl Fn(&T) -> usize) {
    report.field("sizes", joined(chain.terms.iter().map(size)));
    report.field(
        "stabilized-at",
        chain
            .stabilized_at
            .map_or_else(|| "none".to_string(), |k| k.to_string()),
    );
}

fn derive(kind: DeriveKind, file: &Path, rounds: usize, max_carrier: usize) -> Result<Report, Failure> {
    let text = read(file)?;
    let mut report = Report::new();
    report.field("rounds", rounds);
    match kind {
        DeriveKind::Modeloid => {
            let m = at(file, parse_modeloid(&text, max_carrier))?;
            if let Err(v) = m.verify() {
                report.violation(v);
                return Ok(report);
            }
            let chain = m.iterate_derivative(rounds)?;
            chain_fields(&mut report, &chain, Modeloid::len);
            report.field("final", joined(chain.last().members()));
        }
        DeriveKind::Semimodeloid => {
            let s = load_semimodeloid(file, &text)?;
            if let Err(v) = s.verify() {
                report.violation(v);
                return Ok(report);
            }
            let chain = s.iterate_derivative(rounds);
            chain_fields(&mut report, &chain, |s| s.members().len());
            report.field("final", joined(chain.last().members()));
        }
        DeriveKind::CategoricalModeloid => {
            let m = load_categorical(file, &text)?;
            if let Err(v) = m.verify() {
                report.violation(v);
                return Ok(report);
            }
            let chain = m.iterate_derivative(rounds)?;
            chain_fields(&mut report, &chain, CategoricalModeloid::len);
            report.field("final", joined(chain.last().members()));
        }
    }
    Ok(report)
}

fn derive_random(count: usize, seed: u64, rounds: usize, max_carrier: usize) -> Result<Report, Failure> {
    let mut rng = random::rng(seed);
    let mut report = Report::new();
    report.field("seed", seed);
    report.field("count", count);
    report.field("rounds", rounds);
    for i in 0..count {
        let m = random::modeloid(&mut rng, max_carrier)?;
        let chain = m.iterate_derivative(rounds)?;
        let key = indexed("modeloid", i, count);
        report.field(format!("{key}.carrier"), m.carrier().size());
        report.field(format!("{key}.sizes"), joined(chain.terms.iter().map(Modeloid::len)));
        report.field(
            format!("{key}.stabilized-at"),
            chain
                .stabilized_at
                .map_or_else(|| "none".to_string(), |k| k.to_string()),
        );
    }
    Ok(report)
}

fn embed(file: &Path) -> Result<Report, Failure> {
    let text = read(file)?;
    let parsed = at(file, parse_table(&text))?;
    let mut report = Report::new();
    let Some(t) = semigroup_report(&mut report, parsed) else {
        return Ok(report);
    };
    let omega = t.wagner_preston()?;
    for (a, image) in omega.iter().enumerate() {
        report.field(indexed("omega", a, omega.len()), image);
    }
    let checks = check_representation(&t, &omega);
    report.field("injective", checks.injective);
    report.field("multiplicative", checks.multiplicative);
    report.field("order-faithful", checks.order_faithful);
    if !checks.all_hold() {
        report.code = EXIT_NEGATIVE;
    }
    Ok(report)
}

fn category(
    file: &Path,
    left: Option<&str>,
    right: Option<&str>,
    with_members: bool,
    bounds: &Bounds,
) -> Result<Report, Failure> {
    let text = read(file)?;
    let parsed = at(file, parse_structures(&text))?;
    let a = pick(&parsed, file, left, 0)?;
    let d = match (right, parsed.structures.len()) {
        (None, 1) => CategoryD::build(vec![a.clone()], bounds)?,
        _ => build_category_d(a, pick(&parsed, file, right, 1)?, bounds)?,
    };
    let mut out = d.category().to_text();
    if with_members {
        out.push_str(&format!("members {}\n", joined(d.category().morphisms())));
    }
    let mut report = Report::new();
    report.raw = Some(out);
    Ok(report)
}
