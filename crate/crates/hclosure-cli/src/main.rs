//! Command line front end for the hclosure checkers.
//!
//! Every subcommand reads relation or coloring files, runs one library
//! pipeline, and exits 0 on an affirmative verdict, 1 on a negative verdict
//! (with a witness in the report), or 2 on bad input. Reports are prose by
//! default and JSON under `--json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hclosure::ramsey::{homogeneous_subset, PairColoring, RamseyError};
use hclosure::relations::{
    check_disjunctive_termination, check_h_closure, is_h_well_founded_finite,
    is_well_founded_finite, Certificate, Relation, RelationError, Witness,
};
use hclosure::simulation::{verify_covering_bounded, verify_pairing_simulation, LemmaReport};
use hclosure::trees::{covers, graft, is_t1t2_tree, BinaryTree};

#[derive(Parser)]
#[command(name = "hclosure", version, about = "Finite well-foundedness checkers")]
struct Cli {
    /// Emit the report as JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide well-foundedness (no cycles) of a relation.
    CheckWf { relation: PathBuf },
    /// Decide strong well-foundedness (no loops) of a relation.
    CheckHwf { relation: PathBuf },
    /// Check that a union of relations is loop-free exactly when all parts are.
    HClosure {
        #[arg(required = true)]
        relations: Vec<PathBuf>,
    },
    /// Certify a step relation terminating via a disjunctive cover.
    Termination {
        step: PathBuf,
        #[arg(required = true)]
        pieces: Vec<PathBuf>,
    },
    /// Grow a covering tree over a chain one element at a time.
    GraftDemo {
        t1: PathBuf,
        t2: PathBuf,
        /// Chain elements, outermost first.
        chain: Vec<usize>,
    },
    /// Verify that splitting bounded colored lists simulates the product
    /// structure of the two relations.
    VerifyLemma31 {
        t1: PathBuf,
        t2: PathBuf,
        /// Longest colored list considered.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Also verify this many random relation pairs of the same size.
        #[arg(long, default_value_t = 0)]
        random_instances: usize,
        /// Seed for the random instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify that grafting extends every covering tree along bounded chains.
    VerifyLemma32 {
        t1: PathBuf,
        t2: PathBuf,
        /// Longest chain considered.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Largest tree considered, counted in nonempty branches.
        #[arg(long, default_value_t = 8)]
        max_branches: usize,
        /// Also verify this many random relation pairs of the same size.
        #[arg(long, default_value_t = 0)]
        random_instances: usize,
        /// Seed for the random instances.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search a pair coloring for a homogeneous subset.
    Ramsey {
        coloring: PathBuf,
        /// Size of the subset to look for.
        #[arg(short, default_value_t = 3)]
        k: usize,
    },
    /// Print the height of every element of an acyclic relation.
    Heights { relation: PathBuf },
}

/// Bad input: message printed to stderr, exit 2.
struct InputError(String);

impl From<RelationError> for InputError {
    fn from(e: RelationError) -> InputError {
        InputError(e.to_string())
    }
}

impl From<RamseyError> for InputError {
    fn from(e: RamseyError) -> InputError {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(affirmative) => {
            if affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, InputError> {
    match &cli.command {
        Command::CheckWf { relation } => {
            let r = load_relation(relation)?;
            let cert = is_well_founded_finite(&r);
            revalidate(&cert, &r)?;
            print_certificate(&cert, cli.json);
            Ok(cert.verdict.is_affirmative())
        }
        Command::CheckHwf { relation } => {
            let r = load_relation(relation)?;
            let cert = is_h_well_founded_finite(&r);
            revalidate(&cert, &r)?;
            print_certificate(&cert, cli.json);
            Ok(cert.verdict.is_affirmative())
        }
        Command::HClosure { relations } => {
            let ts = load_relations(relations)?;
            let cert = check_h_closure(&ts)?;
            let union = Relation::union(&ts)?;
            revalidate(&cert, &union)?;
            if !cli.json {
                for (path, t) in relations.iter().zip(&ts) {
                    let verdict = is_h_well_founded_finite(t).verdict;
                    println!("piece {}: {verdict}", path.display());
                }
                println!("union of {} piece(s):", ts.len());
            }
            print_certificate(&cert, cli.json);
            Ok(cert.verdict.is_affirmative())
        }
        Command::Termination { step, pieces } => {
            let step = load_relation(step)?;
            let ts = load_relations(pieces)?;
            let cert = check_disjunctive_termination(&step, &ts)?;
            revalidate_termination(&cert, &step, &ts)?;
            if !cli.json {
                let covered = !matches!(cert.witness, Some(Witness::UncoveredPair(_, _)));
                println!(
                    "closure of step covered by the union of {} piece(s): {}",
                    ts.len(),
                    if covered { "yes" } else { "no" }
                );
                if covered {
                    for i in 0..ts.len() {
                        let status = match cert.witness {
                            Some(Witness::RelationLoop { index, .. }) if index == i => "no",
                            Some(Witness::RelationLoop { index, .. }) if index < i => "not checked",
                            _ => "yes",
                        };
                        println!("piece {i} loop-free: {status}");
                    }
                }
            }
            print_certificate(&cert, cli.json);
            Ok(cert.verdict.is_affirmative())
        }
        Command::GraftDemo { t1, t2, chain } => {
            let t1 = load_relation(t1)?;
            let t2 = load_relation(t2)?;
            run_graft_demo(&t1, &t2, chain, cli.json)?;
            Ok(true)
        }
        Command::VerifyLemma31 { t1, t2, max_len, random_instances, seed } => {
            let t1 = load_relation(t1)?;
            let t2 = load_relation(t2)?;
            require_same_size(&t1, &t2)?;
            let report = verify_pairing_simulation(&t1, &t2, *max_len);
            let verify = |a: &Relation, b: &Relation| verify_pairing_simulation(a, b, *max_len);
            finish_lemma(cli, report, &t1, *random_instances, *seed, verify)
        }
        Command::VerifyLemma32 { t1, t2, max_len, max_branches, random_instances, seed } => {
            let t1 = load_relation(t1)?;
            let t2 = load_relation(t2)?;
            require_same_size(&t1, &t2)?;
            let report = verify_covering_bounded(&t1, &t2, *max_len, *max_branches);
            let verify =
                |a: &Relation, b: &Relation| verify_covering_bounded(a, b, *max_len, *max_branches);
            finish_lemma(cli, report, &t1, *random_instances, *seed, verify)
        }
        Command::Ramsey { coloring, k } => {
            let col = PairColoring::parse_text(&read_file(coloring)?)?;
            let found = homogeneous_subset(&col, *k);
            if let Some((subset, color)) = &found {
                for a in 0..subset.len() {
                    for b in a + 1..subset.len() {
                        if col.color(subset[a], subset[b]) != *color {
                            return Err(internal_witness_error(&format!(
                                "pair ({}, {}) is not color {color}",
                                subset[a], subset[b]
                            )));
                        }
                    }
                }
            }
            match (&found, cli.json) {
                (Some((subset, color)), false) => {
                    println!(
                        "homogeneous subset of size {k}, color {color}: {}",
                        join(subset.iter())
                    );
                }
                (None, false) => {
                    println!(
                        "no homogeneous subset of size {k} among {} vertices",
                        col.vertex_count()
                    );
                }
                (_, true) => {
                    let value = match &found {
                        Some((subset, color)) => serde_json::json!({
                            "verdict": "homogeneous-subset-found",
                            "k": k,
                            "subset": subset,
                            "color": color.index(),
                        }),
                        None => serde_json::json!({
                            "verdict": "no-homogeneous-subset",
                            "k": k,
                        }),
                    };
                    println!("{value}");
                }
            }
            Ok(found.is_some())
        }
        Command::Heights { relation } => {
            let r = load_relation(relation)?;
            let cert = is_well_founded_finite(&r);
            revalidate(&cert, &r)?;
            if !cli.json {
                if let Some(Witness::HeightMap(heights)) = &cert.witness {
                    for (x, h) in heights.iter().enumerate() {
                        println!("height({x}) = {h}");
                    }
                    return Ok(true);
                }
            }
            print_certificate(&cert, cli.json);
            Ok(cert.verdict.is_affirmative())
        }
    }
}

// ---- input ----

fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_relation(path: &Path) -> Result<Relation, InputError> {
    Relation::parse_text(&read_file(path)?)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_relations(paths: &[PathBuf]) -> Result<Vec<Relation>, InputError> {
    paths.iter().map(|p| load_relation(p)).collect()
}

fn require_same_size(t1: &Relation, t2: &Relation) -> Result<(), InputError> {
    if t1.size() != t2.size() {
        return Err(InputError(format!(
            "universe size mismatch: expected {}, got {}",
            t1.size(),
            t2.size()
        )));
    }
    Ok(())
}

// ---- reports ----

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_certificate(cert: &Certificate, json: bool) {
    if json {
        println!("{}", serde_json::to_string(cert).expect("certificates serialize"));
        return;
    }
    println!("verdict: {}", cert.verdict);
    match &cert.witness {
        None => {}
        Some(Witness::Cycle(cycle)) => {
            println!("witness (cycle): {}", join(cycle.iter()));
        }
        Some(Witness::Loop(x)) => println!("witness (loop): {x}"),
        Some(Witness::HeightMap(heights)) => {
            println!("witness (height-map): {}", join(heights.iter()));
        }
        Some(Witness::UncoveredPair(a, b)) => {
            println!("witness (uncovered-pair): ({a}, {b}) is in the closure but not the union");
        }
        Some(Witness::RelationLoop { index, element }) => {
            println!("witness (relation-loop): piece {index} relates {element} to itself");
        }
    }
}

fn internal_witness_error(detail: &str) -> InputError {
    InputError(format!("internal: witness failed re-validation: {detail}"))
}

/// Negative verdicts must come with evidence the relation itself confirms.
fn revalidate(cert: &Certificate, r: &Relation) -> Result<(), InputError> {
    match &cert.witness {
        Some(Witness::Cycle(cycle)) => {
            let closed = cycle.len() >= 2 && cycle.first() == cycle.last();
            let stepped = cycle.windows(2).all(|w| r.contains(w[0], w[1]));
            if !closed || !stepped {
                return Err(internal_witness_error(&format!("cycle {cycle:?}")));
            }
        }
        Some(Witness::Loop(x)) => {
            if !r.contains(*x, *x) {
                return Err(internal_witness_error(&format!("loop {x}")));
            }
        }
        Some(Witness::HeightMap(heights)) => {
            let consistent = heights.len() == r.size()
                && r.pairs().all(|(a, b)| heights[a] < heights[b]);
            if !consistent {
                return Err(internal_witness_error("height map"));
            }
        }
        _ => {}
    }
    Ok(())
}

fn revalidate_termination(
    cert: &Certificate,
    step: &Relation,
    ts: &[Relation],
) -> Result<(), InputError> {
    match &cert.witness {
        Some(Witness::UncoveredPair(a, b)) => {
            let in_closure = step.transitive_closure().contains(*a, *b);
            let covered = ts.iter().any(|t| t.contains(*a, *b));
            if !in_closure || covered {
                return Err(internal_witness_error(&format!("uncovered pair ({a}, {b})")));
            }
        }
        Some(Witness::RelationLoop { index, element }) => {
            if !ts.get(*index).is_some_and(|t| t.contains(*element, *element)) {
                return Err(internal_witness_error(&format!(
                    "loop {element} in piece {index}"
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

// ---- graft demo ----

fn run_graft_demo(
    t1: &Relation,
    t2: &Relation,
    chain: &[usize],
    json: bool,
) -> Result<(), InputError> {
    require_same_size(t1, t2)?;
    let union = Relation::union(&[t1.clone(), t2.clone()])?;
    if let Some((i, j)) = union.h_list_violation(chain)? {
        return Err(InputError(format!(
            "chain is not decreasing transitive in the union: positions ({i}, {j}), \
             elements {} and {}",
            chain[i], chain[j]
        )));
    }
    let mut stages = vec![BinaryTree::nil()];
    for (grown, &y) in chain.iter().enumerate() {
        let prefix = &chain[..grown];
        let last = stages.last().expect("starts nonempty");
        let next = graft(t1, t2, last, prefix, y)
            .map_err(|e| InputError(format!("graft failed at element {y}: {e}")))?;
        let consistent = next.is_one_step_extension_of(last)
            && is_t1t2_tree(t1, t2, &next)?
            && covers(&next, &chain[..=grown]);
        if !consistent {
            return Err(internal_witness_error(&format!("stage after adding {y}")));
        }
        stages.push(next);
    }
    if json {
        let value = serde_json::json!({ "chain": chain, "stages": stages });
        println!("{value}");
    } else {
        let mut added = String::from("start");
        for (stage, tree) in stages.iter().enumerate() {
            println!("stage {stage} ({added}): {tree}");
            if stage < chain.len() {
                added = format!("added {}", chain[stage]);
            }
        }
    }
    Ok(())
}

// ---- lemma verification ----

fn finish_lemma(
    cli: &Cli,
    report: LemmaReport,
    sample_like: &Relation,
    random_instances: usize,
    seed: u64,
    verify: impl Fn(&Relation, &Relation) -> LemmaReport,
) -> Result<bool, InputError> {
    let mut failed: Option<LemmaReport> = None;
    if !report.pass {
        failed = Some(report.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verified_random = 0;
    for _ in 0..random_instances {
        if failed.is_some() {
            break;
        }
        let a = Relation::random(&mut rng, sample_like.size());
        let b = Relation::random(&mut rng, sample_like.size());
        let sampled = verify(&a, &b);
        if sampled.pass {
            verified_random += 1;
        } else {
            failed = Some(sampled);
        }
    }
    let shown = failed.as_ref().unwrap_or(&report);
    if cli.json {
        println!("{}", serde_json::to_string(shown).expect("reports serialize"));
    } else {
        let mut line = format!(
            "lemma {}: {} ({}, bound {})",
            shown.lemma,
            if shown.pass { "pass" } else { "fail" },
            shown.instance,
            shown.bound
        );
        if let Some(detail) = &shown.counterexample {
            write!(line, "\ncounterexample: {detail}").expect("writing to a string");
        }
        if random_instances > 0 && shown.pass {
            write!(line, "\nalso verified {verified_random} random instance(s), seed {seed}")
                .expect("writing to a string");
        }
        println!("{line}");
    }
    Ok(shown.pass)
}
