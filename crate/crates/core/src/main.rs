use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use latmodel::enumeration::{count_report, run, EnumerationRequest, Enumerated, Family, Kind};
use latmodel::io::{
    dot_export, lattice_to_json, parse_arrow_set, parse_lattice, serialize_arrow_set, serialize_model_structure,
};
use latmodel::model::{
    af_interval, assemble_model_structure, check_pair_acw, check_pair_afw, is_weak_equivalence_set,
};
use latmodel::reproduce::{acceptance_table, reproduce, select};
use latmodel::{ArrowSet, Error, Lattice};

#[derive(Parser)]
#[command(name = "latmodel", version, about = "Transfer systems and model structures on finite lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a lattice.
    Lattice {
        #[arg(value_enum)]
        action: LatticeAction,
        /// chain:N, grid:M,N, diamond:N, pentagon, file:PATH, or a JSON path
        #[arg(long)]
        lattice: String,
    },
    /// Enumerate systems, weak equivalence sets or model structures as
    /// newline-delimited JSON.
    Enumerate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        lattice: String,
        /// Print a count report instead of the objects
        #[arg(long)]
        count: bool,
        /// Only objects contained in this arrow set
        #[arg(long)]
        within: Option<PathBuf>,
        /// Only objects containing this arrow set
        #[arg(long)]
        superset_of: Option<PathBuf>,
        #[arg(long, env = "LATMODEL_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Decide whether an arrow set is a weak equivalence set, or whether a
    /// (weak equivalences, acyclic (co)fibrations) pair is a model structure.
    Check {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        weq: PathBuf,
        #[arg(long, conflicts_with = "ac")]
        af: Option<PathBuf>,
        #[arg(long)]
        ac: Option<PathBuf>,
    },
    /// All acyclic fibration classes for a weak equivalence set.
    Interval {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        weq: PathBuf,
    },
    /// Write a lattice as JSON, or as a DOT Hasse diagram with overlays.
    Export {
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        lattice: String,
        /// Arrow-set files to highlight (DOT only)
        #[arg(long)]
        overlay: Vec<PathBuf>,
    },
    /// Recompute the table of known counts and compare.
    Reproduce {
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, env = "LATMODEL_JOBS", default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeAction {
    Show,
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Transfer,
    Cotransfer,
    Decomposable,
    Weq,
    Model,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Transfer => Kind::Transfer,
            KindArg::Cotransfer => Kind::Cotransfer,
            KindArg::Decomposable => Kind::Decomposable,
            KindArg::Weq => Kind::WeqSet,
            KindArg::Model => Kind::ModelStructure,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Chain,
    Grid,
    Diamond,
    Pentagon,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Chain => Family::Chain,
            FamilyArg::Grid => Family::GridN1,
            FamilyArg::Diamond => Family::Diamond,
            FamilyArg::Pentagon => Family::Pentagon,
        }
    }
}

/// How a command ended short of success.
enum Failure {
    /// The thing checked does not hold.
    Mismatch,
    Error(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn read_set<'a>(l: &'a Lattice, path: &PathBuf) -> Result<ArrowSet<'a>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_arrow_set(l, &text)?)
}

fn verdict(out: &mut impl Write, value: serde_json::Value, holds: bool) -> Result<(), Failure> {
    writeln!(out, "{value}")?;
    if holds {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn execute(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    match cli.command {
        Command::Lattice { action, lattice } => {
            let result = parse_lattice(&lattice);
            match action {
                LatticeAction::Validate => match result {
                    Ok(l) => writeln!(out, "valid lattice: {} elements, {} arrows", l.len(), l.arrow_count())?,
                    Err(e @ (Error::Cycle(_) | Error::NotALattice { .. } | Error::NonCover(..))) => {
                        writeln!(out, "invalid: {e}")?;
                        return Err(Failure::Mismatch);
                    }
                    Err(e) => return Err(e.into()),
                },
                LatticeAction::Show => {
                    let l = result?;
                    writeln!(out, "elements: {}", l.len())?;
                    let labels: Vec<&str> = (0..l.len()).map(|x| l.display_label(x)).collect();
                    writeln!(out, "labels: {}", labels.join(" "))?;
                    writeln!(out, "bottom: {}  top: {}", l.display_label(l.bottom()), l.display_label(l.top()))?;
                    writeln!(out, "non-identity arrows: {}", l.arrow_count())?;
                    writeln!(out, "covers:")?;
                    for &(x, y) in l.covers() {
                        writeln!(out, "  {} -> {}", l.display_label(x), l.display_label(y))?;
                    }
                }
            }
        }
        Command::Enumerate {
            kind,
            lattice,
            count,
            within,
            superset_of,
            jobs,
        } => {
            let l = parse_lattice(&lattice)?;
            let kind = Kind::from(kind);
            if count && within.is_none() && superset_of.is_none() {
                let report = count_report(&l, &lattice, &[kind], jobs)?;
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
                return Ok(());
            }
            let mut req = EnumerationRequest::new(&l, kind);
            if let Some(p) = &within {
                req = req.within(read_set(&l, p)?);
            }
            if let Some(p) = &superset_of {
                req = req.superset_of(read_set(&l, p)?);
            }
            if count {
                req = req.count_only();
            }
            match run(&req, jobs)? {
                Enumerated::Sets(sets) => {
                    for s in sets {
                        writeln!(out, "{}", serialize_arrow_set(&s))?;
                    }
                }
                Enumerated::Models(models) => {
                    for m in models {
                        writeln!(out, "{}", serialize_model_structure(&m))?;
                    }
                }
                Enumerated::Count(n) => writeln!(out, "{}", json!({"lattice": lattice, "kind": kind, "count": n}))?,
            }
        }
        Command::Check { lattice, weq, af, ac } => {
            let l = parse_lattice(&lattice)?;
            let w = read_set(&l, &weq)?;
            match (af, ac) {
                (Some(p), _) => {
                    let t = read_set(&l, &p)?;
                    let ok = check_pair_afw(&w, &t)?;
                    let mut value = json!({"acyclic_fibrations": ok});
                    if ok {
                        let m = assemble_model_structure(&w, &t)?;
                        value["model_structure"] =
                            serde_json::from_str(&serialize_model_structure(&m)).expect("valid JSON");
                    }
                    verdict(out, value, ok)?;
                }
                (None, Some(p)) => {
                    let k = read_set(&l, &p)?;
                    let ok = check_pair_acw(&w, &k)?;
                    verdict(out, json!({"acyclic_cofibrations": ok}), ok)?;
                }
                (None, None) => {
                    let ok = is_weak_equivalence_set(&w)?;
                    verdict(out, json!({"weak_equivalence_set": ok}), ok)?;
                }
            }
        }
        Command::Interval { lattice, weq } => {
            let l = parse_lattice(&lattice)?;
            let w = read_set(&l, &weq)?;
            let iv = match af_interval(&w) {
                Err(Error::NotWeakEquivalenceSet) => {
                    writeln!(out, "{}", json!({"weak_equivalence_set": false}))?;
                    return Err(Failure::Mismatch);
                }
                other => other?,
            };
            let to_value = |s: &ArrowSet<'_>| -> serde_json::Value {
                serde_json::from_str(&serialize_arrow_set(s)).expect("valid JSON")
            };
            let value = json!({
                "af_min": to_value(&iv.af_min),
                "af_max": to_value(&iv.af_max),
                "members": iv.members.iter().map(to_value).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("valid JSON"))?;
        }
        Command::Export {
            format,
            lattice,
            overlay,
        } => {
            let l = parse_lattice(&lattice)?;
            match format {
                Format::Json => {
                    if !overlay.is_empty() {
                        return Err(Error::InvalidArgument(String::from("overlays need --format dot")).into());
                    }
                    writeln!(out, "{}", lattice_to_json(&l))?;
                }
                Format::Dot => {
                    const PALETTE: [&str; 4] = ["color=blue, penwidth=2", "color=red, style=dashed", "color=darkgreen", "color=orange"];
                    let mut overlays = Vec::with_capacity(overlay.len());
                    for (i, p) in overlay.iter().enumerate() {
                        overlays.push((read_set(&l, p)?, PALETTE[i % PALETTE.len()]));
                    }
                    write!(out, "{}", dot_export(&l, &overlays)?)?;
                }
            }
        }
        Command::Reproduce { family, max_n, jobs } => {
            let rows = select(acceptance_table(), family.map(Family::from), max_n);
            let results = reproduce(&rows, jobs)?;
            let mut all = true;
            writeln!(out, "{:<8} {:<42} {:>10} {:>10}  ok", "lattice", "quantity", "expected", "computed")?;
            for r in &results {
                all &= r.matches();
                writeln!(
                    out,
                    "{:<8} {:<42} {:>10} {:>10}  {}",
                    r.row.lattice_name(),
                    r.row.quantity_name(),
                    r.row.expected,
                    r.computed,
                    if r.matches() { "yes" } else { "NO" }
                )?;
            }
            writeln!(out, "{} of {} rows match", results.iter().filter(|r| r.matches()).count(), results.len())?;
            if !all {
                return Err(Failure::Mismatch);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = execute(cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(Failure::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_)
                | Error::InvalidArgument(_)
                | Error::UnknownElement(_)
                | Error::NotComparable(..)
                | Error::MixedLattices
                | Error::Cycle(_)
                | Error::NotALattice { .. }
                | Error::NonCover(..)
                | Error::TooManyArrows(_)
                | Error::PreconditionViolated(_)
                | Error::NotDecomposable(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
