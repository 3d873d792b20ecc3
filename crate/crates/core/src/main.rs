use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Parser, Subcommand};

use ccloop::construct::{check_semidirect_theorem, holomorph, semidirect, ActionMap};
use ccloop::identities::{check_identity, classify, parse_identity, Property};
use ccloop::report::{analyze, Report};
use ccloop::search::{find_models, SearchError, SearchSpec, SearchStatus, Symmetry};
use ccloop::structure::{generate_subloop, quotient, StructureError};
use ccloop::suite::run_suite;
use ccloop::{ElemSet, LoopTable, Perm};

const GRAMMAR: &str = "identity grammar: variables [a-z]+, constant 1, infix * \\ /, postfix ^l ^r, \
parentheses, one `=`; postfix binds tighter than *, which binds tighter than \\ and /; all left-associative";

#[derive(Parser)]
#[command(name = "ccloop", version, about = "Finite loop workbench for CC-loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a sorted key/value report of a loop's properties and structure.
    Analyze { table: PathBuf },
    /// Check named properties (default: cc); exit 1 if any fails.
    Verify {
        table: PathBuf,
        /// Property names, e.g. cc pa wip extra.
        properties: Vec<String>,
    },
    /// Check a universally quantified identity; exit 1 with a witness if it fails.
    Check { table: PathBuf, identity: String },
    /// Subloop generated by a set of elements.
    Subloop {
        table: PathBuf,
        /// Comma-separated generators.
        #[arg(long, value_name = "ELEMS")]
        generators: String,
    },
    /// Quotient by a normal subloop, emitted as a table.
    Quotient {
        table: PathBuf,
        /// Comma-separated members of the subloop.
        #[arg(long, value_name = "ELEMS")]
        subloop: String,
    },
    /// Semidirect product A x| K, emitted as a table.
    Semidirect {
        a: PathBuf,
        k: PathBuf,
        /// Action file, one `a: images` line per element of A; trivial if omitted.
        #[arg(long)]
        action: Option<PathBuf>,
        /// Print the three theorem conditions instead of the table.
        #[arg(long)]
        theorem: bool,
    },
    /// NAut(Q) x| Q, emitted as a table.
    Holomorph {
        table: PathBuf,
        /// Restrict to a subgroup of NAut(Q): one image array per line.
        #[arg(long)]
        subgroup: Option<PathBuf>,
        /// Also write the action as a sidecar file.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Search for loops of a given order; models are printed as tables.
    Search {
        /// Spec file of `key = value` lines; flags override it.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        order: Option<usize>,
        /// Comma-separated properties or identities.
        #[arg(long)]
        require: Option<String>,
        #[arg(long)]
        forbid: Option<String>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iso_reduce: bool,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<u64>,
        #[arg(long)]
        no_restarts: bool,
        /// `lnh` (default) or `none`.
        #[arg(long)]
        symmetry: Option<String>,
    },
    /// Run the full verification battery and print a pass/fail table.
    PaperSuite,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn fails(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LoopTable, Failure> {
    LoopTable::parse_tbl(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn elems(q: &LoopTable, list: &str) -> Result<ElemSet, Failure> {
    let mut out = ElemSet::empty(q.order());
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let x: usize = item.parse().map_err(|_| usage(format!("not an element: `{item}`")))?;
        if x >= q.order() {
            return Err(usage(format!("element {x} is outside 0..{}", q.order())));
        }
        out.insert(x);
    }
    Ok(out)
}

fn structure_failure(e: StructureError) -> Failure {
    match e {
        StructureError::NotSubloop(_) | StructureError::NotNormal(_) => fails(e),
        _ => usage(e),
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Analyze { table } => {
            print!("{}", analyze(&load(&table)?));
            Ok(())
        }
        Command::Verify { table, properties } => {
            let q = load(&table)?;
            let props = if properties.is_empty() { vec!["cc".to_string()] } else { properties };
            let props: Vec<Property> = props
                .iter()
                .map(|p| Property::from_str(p).map_err(usage))
                .collect::<Result<_, _>>()?;
            let report = classify(&q);
            let mut out = Report::new();
            for &p in &props {
                out.insert(format!("is.{}", p.name()), if report.get(p) { "yes" } else { "no" });
                if let Some(w) = report.witnesses.get(&p) {
                    out.insert(format!("witness.{}", p.name()), w);
                }
            }
            print!("{out}");
            if props.iter().all(|&p| report.get(p)) {
                Ok(())
            } else {
                Err(fails("property fails"))
            }
        }
        Command::Check { table, identity } => {
            let q = load(&table)?;
            let id = parse_identity(&identity).map_err(|e| usage(format!("{e}\n{GRAMMAR}")))?;
            let out = check_identity(&q, &id).map_err(usage)?;
            match out.counterexample {
                None => {
                    println!("holds: {id}");
                    Ok(())
                }
                Some(c) => {
                    let assign: Vec<String> = id.vars.iter().zip(&c).map(|(v, x)| format!("{v}={x}")).collect();
                    println!("fails: {id}");
                    println!("witness: {}", assign.join(" "));
                    Err(fails("identity fails"))
                }
            }
        }
        Command::Subloop { table, generators } => {
            let q = load(&table)?;
            let info = generate_subloop(&q, &elems(&q, &generators)?);
            let mut r = Report::new();
            r.insert("generators", ElemSet::from_slice(q.order(), &info.generators));
            r.insert("members", &info.members);
            r.insert("order", info.order());
            r.insert("normal", if info.is_normal { "yes" } else { "no" });
            r.insert(
                "group",
                if ccloop::structure::is_associative_subset(&q, &info.members) { "yes" } else { "no" },
            );
            print!("{r}");
            Ok(())
        }
        Command::Quotient { table, subloop } => {
            let q = load(&table)?;
            let quot = quotient(&q, &elems(&q, &subloop)?).map_err(structure_failure)?;
            print!("{}", quot.table.to_tbl());
            Ok(())
        }
        Command::Semidirect { a, k, action, theorem } => {
            let (a, k) = (load(&a)?, load(&k)?);
            let phi = match action {
                Some(path) => ActionMap::parse_sidecar(&read(&path)?, &a, &k).map_err(usage)?,
                None => ActionMap::trivial(&a, &k),
            };
            if theorem {
                let t = check_semidirect_theorem(&a, &k, &phi).map_err(fails)?;
                let mut r = Report::new();
                let yn = |b: bool| if b { "yes" } else { "no" };
                r.insert("cc", yn(t.cc));
                r.insert("nuclear", yn(t.nuclear));
                r.insert("triples", yn(t.triples));
                r.insert("agree", yn(t.agree()));
                print!("{r}");
                return if t.agree() { Ok(()) } else { Err(fails("theorem conditions disagree")) };
            }
            print!("{}", semidirect(&a, &k, &phi).map_err(usage)?.to_tbl());
            Ok(())
        }
        Command::Holomorph { table, subgroup, sidecar } => {
            let q = load(&table)?;
            let perms = match subgroup {
                Some(path) => Some(parse_perms(&read(&path)?)?),
                None => None,
            };
            let h = holomorph(&q, perms.as_deref()).map_err(fails)?;
            if let Some(path) = sidecar {
                let phi = ActionMap::new(&h.group, &q, h.perms.clone()).map_err(usage)?;
                fs::write(&path, phi.to_sidecar()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            print!("{}", h.table.to_tbl());
            Ok(())
        }
        Command::Search { spec, order, require, forbid, limit, seed, iso_reduce, time_limit, no_restarts, symmetry } => {
            let mut s = match &spec {
                Some(path) => SearchSpec::from_str(&read(path)?).map_err(usage)?,
                None => SearchSpec::new(order.ok_or_else(|| usage("search needs --order or --spec"))?),
            };
            if let Some(n) = order {
                s.order = n;
            }
            if let Some(r) = require {
                s = s.require(&r).map_err(usage)?;
            }
            if let Some(f) = forbid {
                s = s.forbid(&f).map_err(usage)?;
            }
            if let Some(l) = limit {
                s = s.limit(l);
            }
            if let Some(seed) = seed {
                s = s.seed(seed);
            }
            if iso_reduce {
                s = s.iso_reduce(true);
            }
            if let Some(t) = time_limit {
                s = s.time_limit(Duration::from_secs(t));
            }
            if no_restarts {
                s = s.restarts(false);
            }
            if let Some(sym) = symmetry {
                s = s.symmetry(match sym.as_str() {
                    "lnh" => Symmetry::Lnh,
                    "none" => Symmetry::None,
                    other => return Err(usage(format!("unknown symmetry `{other}`"))),
                });
            }
            match find_models(&s) {
                Ok(out) => {
                    for m in &out.models {
                        println!("{}", m.to_tbl());
                    }
                    let status = match out.status {
                        SearchStatus::Exhausted => "exhausted",
                        SearchStatus::LimitReached => "limit reached",
                        SearchStatus::TimedOut => "timed out",
                    };
                    println!("# status: {status}");
                    println!("# {}", out.stats);
                    Ok(())
                }
                Err(SearchError::Unsatisfiable(stats)) => {
                    println!("# status: unsatisfiable");
                    println!("# {stats}");
                    Err(fails("no model exists"))
                }
                Err(e) => Err(usage(e)),
            }
        }
        Command::PaperSuite => {
            let report = run_suite();
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(fails("some checks failed"))
            }
        }
    }
}

fn parse_perms(src: &str) -> Result<Vec<Perm>, Failure> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let images = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| usage(format!("not an element: `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            Perm::from_images(images).map_err(usage)
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ccloop: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
