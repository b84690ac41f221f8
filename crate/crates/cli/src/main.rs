use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use modalchar::characterize::{
    characterize_conj_diamond, characterize_positive, characterize_uniform, check_duality, refute_bot_fragment,
    refute_full_language, ExampleSet,
};
use modalchar::kripke::{enumerate_models, ModelFile, PointedModel, PropSet};
use modalchar::learn::{learn_version_space, serve_teacher, simulate_oracle, MembershipOracle, StdioOracle};
use modalchar::semantics::satisfies;
use modalchar::simulation::{bisimilar, simulates, weakly_simulates, SimWitness};
use modalchar::syntax::{enumerate_formulas, parse_formula, Connective, Formula, Fragment, Polarity};
use modalchar::verify::verify_characterization;
use modalchar::Budget;

/// Finite characterizations of modal formulas by examples.
#[derive(Parser)]
#[command(name = "modalchar", version)]
struct Cli {
    /// Upper bound on models, types and relation pairs built by one command.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_models: usize,
    /// Upper bound on formula classes built by one command.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_formulas: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Model-check a formula at the point of a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Is the target bisimilar to the source?
    Bisim(RelArgs),
    /// Does the target simulate the source?
    Sim(RelArgs),
    /// Does the target weakly simulate the source?
    Wsim(RelArgs),
    /// Compute an example set characterizing a formula within a fragment.
    Characterize {
        /// Fragment spec such as `pos:&,|,<>,[]`.
        #[arg(long)]
        fragment: String,
        #[arg(long)]
        formula: String,
        /// Comma-separated propositions (default: those of the formula).
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = Construction::Auto)]
        method: Construction,
        /// Write the example set here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List fragment formulas up to a depth that fit the examples but are not
    /// equivalent to the formula, one JSON object per line.
    Verify {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        examples: PathBuf,
        #[arg(long)]
        fragment: String,
        #[arg(long)]
        max_depth: usize,
    },
    /// Check the duality contract of an example set on a model universe.
    Duality {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        examples: PathBuf,
        #[arg(long)]
        universe_depth: usize,
        /// Leave out the grafted loops.
        #[arg(long)]
        no_grafts: bool,
    },
    /// Produce a formula that fits a []F-consistent example set but is not []F.
    Refute {
        #[arg(long)]
        examples: PathBuf,
        /// Stay inside the positive fragment with F by using a fresh variable.
        #[arg(long, requires = "fresh")]
        bot_variant: bool,
        #[arg(long)]
        fresh: Option<String>,
    },
    /// Enumerate bisimulation types or formula classes.
    Enumerate {
        #[command(subcommand)]
        what: EnumerateCmd,
    },
    /// Learn a fragment formula from membership queries.
    Learn {
        #[arg(long)]
        fragment: String,
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
        #[arg(long)]
        depth: usize,
        /// Answer queries with this hidden formula.
        #[arg(long, conflicts_with = "oracle_cmd", required_unless_present = "oracle_cmd")]
        oracle_formula: Option<String>,
        /// Run this shell command as a teacher over the stdio protocol.
        #[arg(long)]
        oracle_cmd: Option<String>,
    },
    /// Act as a stdio-protocol teacher for a hidden formula.
    Teach {
        #[arg(long)]
        formula: String,
    },
}

#[derive(Args)]
struct RelArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Print the witness relation.
    #[arg(long)]
    witness: bool,
}

#[derive(Subcommand)]
enum EnumerateCmd {
    /// One model per line.
    Models {
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        grafts: bool,
    },
    /// One formula per line.
    Formulas {
        #[arg(long)]
        fragment: String,
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Auto,
    ConjDiamond,
    Positive,
    Uniform,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let budget = Budget::new(cli.max_models, cli.max_formulas);
    let mut out = io::stdout().lock();
    match cli.command {
        Cmd::Check { model, formula } => {
            let f = formula_arg(&formula)?;
            let m = load_model(&model, &vars(&f)?)?;
            let holds = satisfies(&m, &f)?;
            writeln!(out, "{holds}")?;
            Ok(holds)
        }
        Cmd::Bisim(a) => relate(&a, &mut out, bisimilar),
        Cmd::Sim(a) => relate(&a, &mut out, simulates),
        Cmd::Wsim(a) => relate(&a, &mut out, weakly_simulates),
        Cmd::Characterize {
            fragment,
            formula,
            props,
            method,
            out: path,
        } => {
            let f = formula_arg(&formula)?;
            let props = match props {
                Some(p) => PropSet::new(p)?,
                None => vars(&f)?,
            };
            let fr = Fragment::parse(&fragment, props)?;
            let e = characterize(&f, &fr, method, &budget)?;
            emit(&mut out, path.as_deref(), &e.to_json())?;
            Ok(true)
        }
        Cmd::Verify {
            formula,
            examples,
            fragment,
            max_depth,
        } => {
            let f = formula_arg(&formula)?;
            let e = load_examples(&examples)?;
            let fr = Fragment::parse(&fragment, e.props.union(&vars(&f)?)?)?;
            let report = verify_characterization(&f, &e, &fr, max_depth, &budget)?;
            write!(out, "{}", report.to_json_lines())?;
            eprintln!(
                "{} competitor(s) up to depth {} ({} method)",
                report.competitors.len(),
                report.depth_bound,
                serde_json::to_value(report.method)?.as_str().unwrap_or_default()
            );
            Ok(report.unique())
        }
        Cmd::Duality {
            formula,
            examples,
            universe_depth,
            no_grafts,
        } => {
            let f = formula_arg(&formula)?;
            let e = load_examples(&examples)?;
            let e = e.widen(&e.props.union(&vars(&f)?)?)?;
            let universe = enumerate_models(&e.props, universe_depth, !no_grafts, &budget)?;
            let report = check_duality(&f, &e, &universe)?;
            for v in &report.violations {
                let line = json!({"index": v.index, "side": v.side, "model": ModelFile::from(&v.model)});
                writeln!(out, "{line}")?;
            }
            eprintln!("{} violation(s) over {} models", report.violations.len(), universe.len());
            Ok(report.holds())
        }
        Cmd::Refute {
            examples,
            bot_variant,
            fresh,
        } => {
            let e = load_examples(&examples)?;
            let phi = match (bot_variant, fresh) {
                (true, Some(q)) => refute_bot_fragment(&e, &q, &budget)?,
                _ => refute_full_language(&e, &budget)?,
            };
            writeln!(out, "{phi}")?;
            Ok(true)
        }
        Cmd::Enumerate { what } => {
            match what {
                EnumerateCmd::Models { props, depth, grafts } => {
                    for m in enumerate_models(&PropSet::new(props)?, depth, grafts, &budget)? {
                        writeln!(out, "{}", m.to_json())?;
                    }
                }
                EnumerateCmd::Formulas { fragment, props, depth } => {
                    let props = PropSet::new(props)?;
                    let fr = Fragment::parse(&fragment, props.clone())?;
                    let universe = enumerate_models(&props, depth, false, &budget)?;
                    for f in enumerate_formulas(&fr, depth, &universe, &budget)? {
                        writeln!(out, "{f}")?;
                    }
                }
            }
            Ok(true)
        }
        Cmd::Learn {
            fragment,
            props,
            depth,
            oracle_formula,
            oracle_cmd,
        } => {
            let hidden = oracle_formula.as_deref().map(formula_arg).transpose()?;
            let props = match (props, &hidden) {
                (Some(p), _) => PropSet::new(p)?,
                (None, Some(h)) => vars(h)?,
                (None, None) => bail!("--props is required with --oracle-cmd"),
            };
            let fr = Fragment::parse(&fragment, props)?;
            let (answer, queries) = match (hidden, oracle_cmd) {
                (Some(h), _) => {
                    let mut oracle = simulate_oracle(h);
                    let g = learn_version_space(&fr, depth, &mut oracle, &budget)?;
                    (g, oracle.queries())
                }
                (None, Some(cmd)) => learn_from_process(&cmd, &fr, depth, &budget)?,
                (None, None) => unreachable!("clap requires one oracle"),
            };
            writeln!(out, "{answer}")?;
            eprintln!("{queries} membership queries");
            Ok(true)
        }
        Cmd::Teach { formula } => {
            let f = formula_arg(&formula)?;
            let answer = serve_teacher(&f, io::stdin().lock(), &mut out)?;
            match answer {
                Some(g) => {
                    eprintln!("learner answered {g}");
                    Ok(true)
                }
                None => bail!("learner closed the stream without an answer"),
            }
        }
    }
}

fn formula_arg(text: &str) -> Result<Formula> {
    Ok(parse_formula(text)?)
}

fn vars(f: &Formula) -> Result<PropSet> {
    Ok(PropSet::new(f.variables())?)
}

/// Loads a model and widens it by `extra`.
fn load_model(path: &Path, extra: &PropSet) -> Result<PointedModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let m = file.into_model(None)?;
    Ok(m.widen(&m.props().union(extra)?)?)
}

fn load_examples(path: &Path) -> Result<ExampleSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ExampleSet::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn relate(
    a: &RelArgs,
    out: &mut impl Write,
    rel: fn(&PointedModel, &PointedModel) -> modalchar::Result<Option<SimWitness>>,
) -> Result<bool> {
    let source = load_model(&a.source, &PropSet::empty())?;
    let target = load_model(&a.target, &PropSet::empty())?;
    let props = source.props().union(target.props())?;
    let (source, target) = (source.widen(&props)?, target.widen(&props)?);
    let w = rel(&target, &source)?;
    writeln!(out, "{}", w.is_some())?;
    if let (true, Some(w)) = (a.witness, &w) {
        writeln!(out, "{}", json!({"kind": w.kind, "pairs": w.named_pairs()}))?;
    }
    Ok(w.is_some())
}

fn characterize(f: &Formula, fr: &Fragment, method: Construction, budget: &Budget) -> Result<ExampleSet> {
    let method = match method {
        Construction::Auto => {
            let existential = fr.polarity == Polarity::Positive
                && fr.connectives.iter().all(|c| matches!(c, Connective::Dia | Connective::And));
            if existential {
                Construction::ConjDiamond
            } else if fr.polarity == Polarity::Positive {
                Construction::Positive
            } else {
                Construction::Uniform
            }
        }
        m => m,
    };
    Ok(match method {
        Construction::ConjDiamond => characterize_conj_diamond(f, fr)?,
        Construction::Positive => characterize_positive(f, fr, budget)?,
        _ => {
            let negated: BTreeMap<String, Polarity> = fr
                .props
                .iter()
                .filter(|p| fr.polarity == Polarity::Negative || negated_in(f, p))
                .map(|p| (p.to_string(), Polarity::Negative))
                .collect();
            characterize_uniform(f, &negated, fr, budget)?
        }
    })
}

fn negated_in(f: &Formula, p: &str) -> bool {
    let mut found = false;
    let _ = f.map_literals::<()>(&mut |lit| {
        if matches!(lit, Formula::NegAtom(q) if q == p) {
            found = true;
        }
        Ok(lit.clone())
    });
    found
}

fn emit(out: &mut impl Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn learn_from_process(cmd: &str, fr: &Fragment, depth: usize, budget: &Budget) -> Result<(Formula, usize)> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .with_context(|| format!("starting teacher `{cmd}`"))?;
    let stdin = child.stdin.take().expect("piped stdin");
    let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
    let mut oracle = StdioOracle::new(stdout, stdin);
    let learned = learn_version_space(fr, depth, &mut oracle, budget);
    let result = match learned {
        Ok(g) => {
            oracle.finish(&g)?;
            Ok((g, oracle.queries()))
        }
        Err(e) => Err(e.into()),
    };
    drop(oracle);
    let status = child.wait()?;
    if result.is_ok() && !status.success() {
        bail!("teacher exited with {status}");
    }
    result
}
