use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dlfrontier::characterize::{characterize, fits, verify_unique, ExampleSet};
use dlfrontier::frontier::{frontier_with, DialectChoice, Options};
use dlfrontier::learner::{
    default_budget, learn, learn_with_normal_form, seed_query_over, Outcome, SimulatedOracle,
};
use dlfrontier::normal::normalize;
use dlfrontier::parse::{parse_abox, parse_concept, parse_cq, parse_ontology};
use dlfrontier::reasoner::Reasoner;
use dlfrontier::testkit::{bruteforce_frontier_check, Verdict};
use dlfrontier::{BasicConcept, Cq, Eli, Ontology};

#[derive(Parser)]
#[command(
    name = "dlfrontier",
    version,
    about = "Frontiers, learning and characterization of ELI queries under DL-Lite"
)]
struct Cli {
    /// Worker threads. Every subcommand currently runs on one thread, so
    /// only 1 is accepted.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=1))]
    jobs: u16,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Auto,
    R,
    F,
}

impl From<DialectArg> for DialectChoice {
    fn from(d: DialectArg) -> DialectChoice {
        match d {
            DialectArg::Auto => DialectChoice::Auto,
            DialectArg::R => DialectChoice::R,
            DialectArg::F => DialectChoice::F,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of an ontology.
    Normalize {
        #[arg(short = 'o', long = "ontology")]
        ontology: PathBuf,
    },
    /// Decide a single reasoning question.
    Check {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        /// Is the first query contained in the second?
        #[arg(long, num_args = 2, value_names = ["Q1", "Q2"])]
        contains: Option<Vec<PathBuf>>,
        #[arg(long, num_args = 2, value_names = ["Q1", "Q2"])]
        equivalent: Option<Vec<PathBuf>>,
        /// Does the first basic concept imply the second? Concepts are
        /// given inline, e.g. `A` or `some r-`.
        #[arg(long, num_args = 2, value_names = ["B1", "B2"])]
        entails: Option<Vec<String>>,
        /// Is the ABox consistent with the ontology?
        #[arg(long, value_name = "ABOX")]
        satisfiable: Option<PathBuf>,
        /// Print the dialect of the ontology.
        #[arg(long)]
        dialect: bool,
    },
    /// Certain answers of a query on an ABox.
    Answer {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 'a', long = "abox")]
        abox: PathBuf,
        #[arg(short = 'q', long = "query")]
        query: Option<PathBuf>,
        /// Individual to test; without it, all answers are listed.
        #[arg(long)]
        ind: Option<String>,
        /// Print the universal model up to this depth as JSON.
        #[arg(long, value_name = "DEPTH")]
        dump_model: Option<usize>,
    },
    /// Compute a frontier of an ELIQ.
    Frontier {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 'q', long = "query")]
        query: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: DialectArg,
        /// Drop members equivalent to an earlier one.
        #[arg(long)]
        prune: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Learn a target query from a simulated membership oracle.
    Learn {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 't', long = "target")]
        target: PathBuf,
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long)]
        budget: Option<usize>,
        /// Write the learning trace as JSON.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Learn over the normal form and rewrite the oracle's ABoxes.
        #[arg(long)]
        normal_form: bool,
    },
    /// Write data examples that characterize a query.
    Characterize {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 'q', long = "query")]
        query: PathBuf,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Brute-force checks for CI pipelines.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Check completeness of the computed frontier up to a size bound.
    Frontier {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 'q', long = "query")]
        query: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, value_enum, default_value = "auto")]
        dialect: DialectArg,
    },
    /// Check that the characterizing examples admit no other query.
    Unique {
        #[arg(short = 'o', long = "ontology")]
        ontology: Option<PathBuf>,
        #[arg(short = 'q', long = "query")]
        query: PathBuf,
        /// Defaults to one more than the number of query variables.
        #[arg(long)]
        bound: Option<usize>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn ontology(path: &Option<PathBuf>) -> anyhow::Result<Ontology> {
    match path {
        Some(p) => Ok(parse_ontology(&read(p)?)?),
        None => Ok(Ontology::default()),
    }
}

fn query(path: &Path) -> anyhow::Result<Cq> {
    Ok(parse_cq(read(path)?.trim())?)
}

fn basic(text: &str) -> anyhow::Result<BasicConcept> {
    match parse_concept(text)? {
        Eli::Top => Ok(BasicConcept::Top),
        Eli::Atom(a) => Ok(BasicConcept::Atomic(a)),
        Eli::Exists(r, f) if *f == Eli::Top => Ok(BasicConcept::Exists(r)),
        other => bail!("`{other}` is not a basic concept"),
    }
}

fn verdict(yes: bool) -> ExitCode {
    println!("{}", if yes { "yes" } else { "no" });
    if yes {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Normalize { ontology: path } => {
            let o = parse_ontology(&read(&path)?)?;
            let (n, fresh) = normalize(&o);
            print!("{n}");
            for (x, c) in &fresh {
                println!("# {x} = {c}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            ontology: path,
            contains,
            equivalent,
            entails,
            satisfiable,
            dialect,
        } => {
            let o = ontology(&path)?;
            let r = Reasoner::new(&o)?;
            if let Some(qs) = contains {
                return Ok(verdict(r.contained(&query(&qs[0])?, &query(&qs[1])?)?));
            }
            if let Some(qs) = equivalent {
                return Ok(verdict(r.equivalent(&query(&qs[0])?, &query(&qs[1])?)?));
            }
            if let Some(bs) = entails {
                return Ok(verdict(r.entails_basic(&basic(&bs[0])?, &basic(&bs[1])?)));
            }
            if let Some(a) = satisfiable {
                return Ok(verdict(r.abox_satisfiable(&parse_abox(&read(&a)?)?)));
            }
            if dialect {
                println!("{}", o.dialect());
                return Ok(ExitCode::SUCCESS);
            }
            bail!("nothing to check: pass --contains, --equivalent, --entails, --satisfiable or --dialect")
        }
        Command::Answer {
            ontology: path,
            abox,
            query: q,
            ind,
            dump_model,
        } => {
            let o = ontology(&path)?;
            let a = parse_abox(&read(&abox)?)?;
            let r = Reasoner::new(&o)?;
            if let Some(depth) = dump_model {
                let prefix = r.universal_prefix(&a, depth)?;
                println!("{}", serde_json::to_string_pretty(&prefix)?);
                return Ok(ExitCode::SUCCESS);
            }
            let Some(q) = q else {
                bail!("--query is required unless --dump-model is given");
            };
            let q = query(&q)?;
            match ind {
                Some(i) => Ok(verdict(r.certain_answer(&a, &q, &i.as_str().into()))),
                None => {
                    let answers: Vec<_> = a
                        .individuals()
                        .into_iter()
                        .filter(|i| r.certain_answer(&a, &q, i))
                        .collect();
                    for i in &answers {
                        println!("{i}");
                    }
                    Ok(if answers.is_empty() {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    })
                }
            }
        }
        Command::Frontier {
            ontology: path,
            query: q,
            dialect,
            prune,
            format,
        } => {
            let o = ontology(&path)?;
            let q = query(&q)?;
            let f = frontier_with(
                &o,
                &q,
                Options {
                    dialect: dialect.into(),
                    prune,
                },
            )?;
            if format == Format::Json {
                let out = json!({
                    "query": q.to_string(),
                    "dialect": o.dialect().to_string(),
                    "member_count": f.members.len(),
                    "total_vars": f.total_vars(),
                    "members": f.members.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                for m in &f.members {
                    println!("{m}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Learn {
            ontology: path,
            target,
            seed,
            budget,
            trace,
            normal_form,
        } => {
            let o = ontology(&path)?;
            let t = query(&target)?;
            let budget = budget.unwrap_or_else(|| default_budget(&o, t.var_count()));
            let mut oracle = SimulatedOracle::new(&o, &t)?;
            let seed = match seed {
                Some(p) => Some(query(&p)?),
                None if normal_form => None,
                None => Some(seed_query_over(&o, &t.signature())?),
            };
            let result = if normal_form {
                learn_with_normal_form(&o, &mut oracle, seed.as_ref(), budget)?
            } else {
                learn(&o, &mut oracle, seed.as_ref().unwrap(), budget)?
            };
            if let Some(p) = trace {
                fs::write(&p, serde_json::to_string_pretty(&result.to_json())? + "\n")
                    .with_context(|| format!("cannot write {}", p.display()))?;
            }
            match &result.outcome {
                Outcome::Success(h) => {
                    println!("{h}");
                    eprintln!("membership queries: {}", result.membership_queries);
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::BudgetExceeded => {
                    eprintln!("budget of {budget} membership queries exceeded");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Characterize {
            ontology: path,
            query: q,
            out_dir,
        } => {
            let o = ontology(&path)?;
            let q = query(&q)?;
            let e = characterize(&o, &q)?;
            write_examples(&out_dir, &e)?;
            println!(
                "{} positive, {} negative examples written to {}",
                e.positives.len(),
                e.negatives.len(),
                out_dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { what } => match what {
            Verify::Frontier {
                ontology: path,
                query: q,
                bound,
                dialect,
            } => {
                let o = ontology(&path)?;
                let q = query(&q)?;
                let f = frontier_with(
                    &o,
                    &q,
                    Options {
                        dialect: dialect.into(),
                        prune: false,
                    },
                )?;
                report(bruteforce_frontier_check(&o, &q, &f.members, bound)?)
            }
            Verify::Unique {
                ontology: path,
                query: q,
                bound,
            } => {
                let o = ontology(&path)?;
                let q = query(&q)?;
                let e = characterize(&o, &q)?;
                if !fits(&o, &q, &e)? {
                    bail!("the query does not fit its own examples");
                }
                let bound = bound.unwrap_or(q.var_count() + 1);
                report(verify_unique(&o, &q, &e, bound)?)
            }
        },
    }
}

fn report(v: Verdict) -> anyhow::Result<ExitCode> {
    match v {
        Verdict::Ok => {
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Counterexample(c) => {
            println!("counterexample: {c}");
            Ok(ExitCode::from(1))
        }
    }
}

fn write_examples(dir: &Path, e: &ExampleSet) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut manifest = Vec::new();
    let groups = [("positive", &e.positives), ("negative", &e.negatives)];
    for (kind, list) in groups {
        for (i, ex) in list.iter().enumerate() {
            let file = format!("{kind}_{i}.abox");
            fs::write(dir.join(&file), ex.abox.to_string())
                .with_context(|| format!("cannot write {file}"))?;
            manifest.push(json!({
                "file": file,
                "anchor": ex.individual.as_str(),
                "polarity": kind,
            }));
        }
    }
    let text = serde_json::to_string_pretty(&json!({ "examples": manifest }))?;
    fs::write(dir.join("manifest.json"), text + "\n").context("cannot write manifest.json")?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let reason = e
                .downcast_ref::<dlfrontier::Error>()
                .map(|d| d.reason())
                .unwrap_or("io");
            eprintln!("error [{reason}]: {e:#}");
            ExitCode::from(2)
        }
    }
}
