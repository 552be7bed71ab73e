//! `provlock` — privacy analysis for provenance views of module workflows.

mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use provlock::closures::classify_single_predecessor;
use provlock::fixtures::{fixture_json, fixture_names};
use provlock::model::{build_workflow, CostModel, Workflow, WorkflowSpec};
use provlock::optimize::{optimize_workflow, OptimizeRoute};
use provlock::privacy::{gamma_achieved, GammaTargets};
use provlock::public_safety::{enumerate_udsafe, ModuleView};
use provlock::standalone::enumerate_safe_subsets;
use provlock::{Error, Result};

#[derive(Parser)]
#[command(name = "provlock", version, about = "Module-privacy analysis for workflow provenance views")]
struct Cli {
    /// Worker threads for independent analyses (also via PROVLOCK_JOBS).
    #[arg(long, global = true, env = "PROVLOCK_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a workflow description.
    Validate {
        /// Workflow JSON file, or the name of a bundled fixture.
        spec: String,
    },
    /// Enumerate standalone-safe hidden subsets of one module (Step I).
    Safe {
        spec: String,
        #[arg(long)]
        module: String,
        #[arg(long)]
        gamma: u64,
        /// Restrict candidates to output attributes.
        #[arg(long)]
        outputs_only: bool,
    },
    /// Enumerate UD-safe hidden subsets of one module (Step II).
    Udsafe {
        spec: String,
        #[arg(long)]
        module: String,
    },
    /// Check Γ-workflow-privacy of a hidden set against the exact oracle.
    Verify {
        spec: String,
        /// Attributes to hide, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        hide: Vec<String>,
        #[arg(long)]
        gamma: u64,
    },
    /// Find a minimum-cost hidden set meeting a privacy target.
    Optimize {
        spec: String,
        #[arg(long)]
        gamma: u64,
        #[arg(long, value_enum, default_value_t = RouteArg::SinglePred)]
        route: RouteArg,
        /// Re-verify the returned plan with the possible-worlds oracle.
        #[arg(long)]
        check: bool,
    },
    /// Regenerate a bundled fixture's tables and diff against the expected
    /// output.
    Reproduce {
        /// One of the bundled fixture names.
        fixture: String,
    },
    /// Classify a workflow's shape (single-predecessor or not).
    Classify {
        spec: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    SinglePred,
    General,
    Both,
}

fn load(spec: &str) -> Result<Workflow> {
    let text: String = if fixture_names().contains(&spec) {
        fixture_json(spec)?.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?
    };
    build_workflow(&WorkflowSpec::from_json(&text)?)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 1,
        Error::NoFeasiblePlan(_) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Validate { spec } => {
            let w = load(&spec)?;
            println!(
                "ok: {} modules, {} attributes, initial inputs {{{}}}",
                w.modules.len(),
                w.universe.len(),
                w.universe.names(w.initial).join(",")
            );
            Ok(0)
        }
        Cmd::Safe { spec, module, gamma, outputs_only } => {
            let w = load(&spec)?;
            let m = w.module(&module)?;
            let cat = enumerate_safe_subsets(&w.universe, m, gamma, outputs_only);
            println!("{}", serde_json::to_string_pretty(&cat.to_json(&w.universe)).unwrap());
            Ok(0)
        }
        Cmd::Udsafe { spec, module } => {
            let w = load(&spec)?;
            let cat = enumerate_udsafe(&ModuleView::of(w.module(&module)?));
            println!("{}", serde_json::to_string_pretty(&cat.to_json(&w.universe)).unwrap());
            Ok(0)
        }
        Cmd::Verify { spec, hide, gamma } => {
            let w = load(&spec)?;
            let h = w.universe.set_of(&hide)?;
            let r = w.relation(None)?;
            let rep = gamma_achieved(&r, &w, h);
            println!("{}", serde_json::to_string_pretty(&rep.to_json(&w.universe)).unwrap());
            Ok(if rep.gamma >= gamma { 0 } else { 3 })
        }
        Cmd::Optimize { spec, gamma, route, check } => {
            let w = load(&spec)?;
            let cost = CostModel::<f64>::from_universe(&w.universe);
            let targets = GammaTargets::Uniform(gamma);
            let (plan, total) = match route {
                RouteArg::SinglePred => {
                    optimize_workflow(&w, &targets, &cost, OptimizeRoute::SinglePred)?
                }
                RouteArg::General => {
                    optimize_workflow(&w, &targets, &cost, OptimizeRoute::General)?
                }
                RouteArg::Both if cli.jobs >= 2 => both_parallel(&w, &targets, &cost)?,
                RouteArg::Both => optimize_workflow(&w, &targets, &cost, OptimizeRoute::Both)?,
            };
            let mut doc = serde_json::to_value(plan.to_json(&w.universe)).unwrap();
            doc["cost"] = total.into();
            if check {
                let r = w.relation(None)?;
                let achieved = gamma_achieved(&r, &w, plan.hidden).gamma;
                doc["oracle_gamma"] = achieved.into();
                if achieved < gamma {
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                    return Ok(3);
                }
            }
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
        Cmd::Reproduce { fixture } => {
            let got = report::report(&fixture)?;
            print!("{got}");
            match report::expected(&fixture) {
                Some(want) if want == got => Ok(0),
                Some(_) => {
                    eprintln!("mismatch against bundled expected output");
                    Ok(2)
                }
                None => Err(Error::Parse(format!("no expected output for {fixture}"))),
            }
        }
        Cmd::Classify { spec } => {
            let w = load(&spec)?;
            let class = classify_single_predecessor(&w);
            println!("{}", serde_json::to_string_pretty(&class).unwrap());
            Ok(0)
        }
    }
}

/// Run the two optimizer routes on separate threads and keep the cheaper
/// valid result.
fn both_parallel(
    w: &Workflow,
    targets: &GammaTargets,
    cost: &CostModel<f64>,
) -> Result<(provlock::privacy::AssemblyPlan, f64)> {
    std::thread::scope(|s| {
        let sp = s.spawn(|| optimize_workflow(w, targets, cost, OptimizeRoute::SinglePred));
        let gen = optimize_workflow(w, targets, cost, OptimizeRoute::General);
        let sp = sp.join().expect("optimizer thread panicked");
        match (sp, gen) {
            (Ok(a), Ok(b)) => Ok(if a.1 <= b.1 { a } else { b }),
            (Ok(a), Err(_)) => Ok(a),
            (Err(_), Ok(b)) => Ok(b),
            (Err(e), Err(_)) => Err(e),
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error (exit 1 per the documented contract).
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
