//! Command-line front end: file ingestion, orchestration of the
//! counterfactual and empirical analyses, and reproducible reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! invariant failure. Statistical significance never affects the exit
//! code; analyses are reports, not gates.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scc_core::empirical::{
    irreducibility_contrast, msc_contrast, singularity_contrast, ContrastResult, Design,
};
use scc_core::engine::{
    avoidance_representation, essential_prime_implicants, pla_dump, prime_implicants, Avoidance,
    Representation,
};
use scc_core::error::Error;
use scc_core::interaction::{
    is_irreducible, is_singular, msc_under_monotonicity, pns, CausePartition, PartialAssignment,
};
use scc_core::io::{read_counts_path, read_truth_table_path};
use scc_core::report::{extend_cause_set, rules, Finding, RepresentationExport};
use scc_core::trees::{enumerate_trees, enumerate_trees_unbounded, m_irred, m_sing, LiteralTree};
use scc_core::{Literal, LiteralSet, MonotoneClass, WeightMode};

#[derive(Parser)]
#[command(
    name = "scc",
    version,
    about = "Sufficient-component-cause analysis of binary outcomes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze potential-outcome tables: implicants, irreducibility and
    /// singularity witnesses, PNS.
    Analyze(AnalyzeArgs),
    /// Run empirical interaction tests on stratified count data.
    Test(TestArgs),
    /// Enumerate spanning trees on a literal set with degrees and
    /// coefficient vectors (JSON lines).
    Trees(TreesArgs),
    /// Print the linear-restriction coefficient vectors and inequalities.
    Coef(CoefArgs),
    /// Build, export, check or avoid sufficient-cause representations.
    Repr(ReprArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Truth-table CSV (header id,weight,D000,...).
    file: PathBuf,
    /// Conjunction to query, e.g. `X2,!X3`; repeatable.
    #[arg(long = "b")]
    b: Vec<String>,
    /// Treat weights as probabilities (enables PNS).
    #[arg(long)]
    prob_mode: bool,
    /// Also run the minimal-sufficient-cause witness search at the
    /// all-zero context (context variables must be monotone).
    #[arg(long)]
    msc: bool,
    /// Comma-separated labels of additional variables declared not
    /// causally influenced by the modelled causes; findings are extended
    /// to the enlarged set with the assertion recorded.
    #[arg(long)]
    assume_uninfluenced: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct TestArgs {
    /// Counts CSV.
    file: PathBuf,
    #[arg(long, value_enum)]
    design: DesignArg,
    /// Comma-separated exposure column names, in order (X1, X2, ...).
    #[arg(long)]
    exposures: String,
    /// Comma-separated stratum column names.
    #[arg(long)]
    strata: Option<String>,
    /// Queried conjunction; literals may use exposure names or X-numbers.
    #[arg(long = "b")]
    b: String,
    /// Literals assumed positively monotone (prefix ! asserts the
    /// complement is monotone), e.g. `Smoking,NAT2` or `X1,X2`.
    #[arg(long)]
    assume_monotone: Option<String>,
    /// Subset of b to use for the tree conditions; defaults to every
    /// literal of b that is declared monotone.
    #[arg(long)]
    bplus: Option<String>,
    /// Context values for the variables outside b, e.g. `X3=0`.
    #[arg(long)]
    c2: Option<String>,
    /// Continuity correction added to every cell of a stratum containing
    /// a zero cell (case-control only).
    #[arg(long)]
    continuity: Option<f64>,
    /// Allow tree enumeration beyond 8 monotone literals.
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Cohort,
    CaseControl,
}

impl From<DesignArg> for Design {
    fn from(d: DesignArg) -> Design {
        match d {
            DesignArg::Cohort => Design::Cohort,
            DesignArg::CaseControl => Design::CaseControl,
        }
    }
}

#[derive(Args)]
struct TreesArgs {
    /// Number of positive literals X1..Xn to span.
    #[arg(long, conflicts_with = "b")]
    n: Option<usize>,
    /// Conjunction whose monotone part the trees span.
    #[arg(long = "b")]
    b: Option<String>,
    /// Monotone subset of b (defaults to all of b).
    #[arg(long)]
    bplus: Option<String>,
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args)]
struct CoefArgs {
    /// Full conjunction for the restriction lattice, e.g. `X1,X2,X3`.
    #[arg(long = "b")]
    b: String,
    /// Monotone subset spanned by the trees (empty for none).
    #[arg(long)]
    bplus: Option<String>,
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ReprArgs {
    /// Truth-table CSV.
    file: PathBuf,
    /// Build the representation avoiding this conjunction instead of the
    /// canonical one.
    #[arg(long)]
    avoid: Option<String>,
    /// Verify a previously exported representation JSON against the file.
    #[arg(long, conflicts_with = "avoid")]
    check: Option<PathBuf>,
    /// Include PLA-style truth-table dumps per individual.
    #[arg(long)]
    pla: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    // Die quietly when stdout is a closed pipe (e.g. piped into head).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Test(args) => cmd_test(args),
        Command::Trees(args) => cmd_trees(args),
        Command::Coef(args) => cmd_coef(args),
        Command::Repr(args) => cmd_repr(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_class() as u8)
        }
    }
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct IndividualReport {
    id: String,
    weight: f64,
    prime_implicants: Vec<Vec<String>>,
    essential_prime_implicants: Vec<Vec<String>>,
    tautology: bool,
    monotone_profile: Vec<MonotoneClass>,
}

#[derive(Serialize)]
struct QueryReport {
    b: Vec<String>,
    irreducible: Finding,
    singular: Finding,
    #[serde(skip_serializing_if = "Option::is_none")]
    msc_under_monotonicity: Option<Finding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    msc_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pns: Option<f64>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    k: usize,
    weight_mode: WeightMode,
    individuals: Vec<IndividualReport>,
    queries: Vec<QueryReport>,
}

fn var_labels(k: usize) -> Vec<String> {
    (1..=k).map(|j| format!("X{j}")).collect()
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let mode = if args.prob_mode { WeightMode::Probability } else { WeightMode::Count };
    let pop = read_truth_table_path(&args.file, mode)?;
    let k = pop.k();
    let extension: Vec<String> = args
        .assume_uninfluenced
        .as_deref()
        .map(split_labels)
        .unwrap_or_default();

    let individuals = pop
        .members()
        .iter()
        .map(|m| {
            let pi = prime_implicants(&m.table);
            let epi = essential_prime_implicants(&m.table);
            IndividualReport {
                id: m.id.clone(),
                weight: m.weight,
                prime_implicants: pi.implicants.iter().map(|b| b.labels()).collect(),
                essential_prime_implicants: epi.implicants.iter().map(|b| b.labels()).collect(),
                tautology: pi.tautology,
                monotone_profile: m.table.monotone_profile(),
            }
        })
        .collect();

    let mut queries = Vec::new();
    for spec in &args.b {
        let b = LiteralSet::parse(spec).map_err(|e| usage(e.to_string()))?;
        let p = CausePartition::new(b.clone(), k).map_err(|e| usage(e.to_string()))?;
        let relative = var_labels(k);

        let w = is_irreducible(&pop, &p)?;
        let mut irreducible = Finding::new(
            format!("{{{b}}} is irreducible (a sufficient cause containing it appears in every representation)"),
            relative.clone(),
            w.is_some(),
            rules::IRREDUCIBILITY_WITNESS,
        )
        .with_witness(w);

        let w = is_singular(&pop, &p)?;
        let mut singular = Finding::new(
            format!("{{{b}}} is singular (some individual has it as their unique minimal sufficient cause)"),
            relative.clone(),
            w.is_some(),
            rules::SINGULARITY_EXACT_TABLE,
        )
        .with_witness(w);

        let (mut msc_finding, mut msc_note) = (None, None);
        if args.msc {
            match msc_under_monotonicity(&pop, &p) {
                Ok(w) => {
                    msc_finding = Some(
                        Finding::new(
                            format!("{{{b}}} is a minimal sufficient cause for some individual"),
                            relative.clone(),
                            w.is_some(),
                            rules::MSC_AT_BASELINE_CONTEXT,
                        )
                        .with_witness(w)
                        .with_assumption("context variables verified positively monotone on all tables"),
                    );
                }
                Err(e @ Error::MonotonicityViolation { .. }) => {
                    msc_note = Some(format!("skipped: {e}"));
                }
                Err(e) => return Err(e.into()),
            }
        }

        let pns_value = if args.prob_mode && b.len() == k {
            Some(pns(&pop, &b)?)
        } else {
            None
        };

        if !extension.is_empty() {
            irreducible = extend_cause_set(&irreducible, &extension);
            singular = extend_cause_set(&singular, &extension);
            msc_finding = msc_finding.map(|f| extend_cause_set(&f, &extension));
        }

        queries.push(QueryReport {
            b: b.labels(),
            irreducible,
            singular,
            msc_under_monotonicity: msc_finding,
            msc_note,
            pns: pns_value,
        });
    }

    let report = AnalyzeReport {
        k,
        weight_mode: mode,
        individuals,
        queries,
    };
    match args.format {
        Format::Json => print_json(&report)?,
        Format::Text => render_analyze(&report),
    }
    Ok(())
}

fn render_finding(f: &Finding) {
    println!("  {}: {}", if f.holds { "YES" } else { "no " }, f.claim);
    if let Some(w) = &f.witness {
        println!("       witness: individual {} at context {}", w.id, w.context.label());
    }
    for a in &f.assumptions {
        println!("       assumption: {a}");
    }
}

fn render_analyze(r: &AnalyzeReport) {
    println!("k = {} causes, {} individuals", r.k, r.individuals.len());
    for ind in &r.individuals {
        println!("individual {} (weight {}):", ind.id, ind.weight);
        if ind.tautology {
            println!("  outcome is constant 1 (tautology; no nonempty implicants)");
        }
        let join = |sets: &Vec<Vec<String>>| {
            if sets.is_empty() {
                "(none)".to_string()
            } else {
                sets.iter()
                    .map(|s| format!("{{{}}}", s.join(",")))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        println!("  minimal sufficient causes: {}", join(&ind.prime_implicants));
        println!("  essential prime implicants: {}", join(&ind.essential_prime_implicants));
        let profile: Vec<String> = ind
            .monotone_profile
            .iter()
            .enumerate()
            .map(|(j, c)| format!("X{}={:?}", j + 1, c))
            .collect();
        println!("  monotonicity: {}", profile.join(" "));
    }
    for q in &r.queries {
        println!("query b = {{{}}}:", q.b.join(","));
        render_finding(&q.irreducible);
        render_finding(&q.singular);
        if let Some(f) = &q.msc_under_monotonicity {
            render_finding(f);
        }
        if let Some(n) = &q.msc_note {
            println!("  msc: {n}");
        }
        if let Some(p) = q.pns {
            println!("  PNS = {p}");
        }
    }
}

// ------------------------------------------------------------------- test

#[derive(Serialize)]
struct StratumReport {
    stratum: String,
    results: Vec<ContrastResult>,
    any_positive: bool,
    min_p_one_sided: Option<f64>,
    conclusions: Vec<String>,
}

#[derive(Serialize)]
struct TestReport {
    design: Design,
    exposures: Vec<String>,
    b: Vec<String>,
    bplus: Vec<String>,
    declared_monotone: Vec<String>,
    contexts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuity: Option<f64>,
    conditions_tried: usize,
    strata: Vec<StratumReport>,
}

fn split_labels(s: &str) -> Vec<String> {
    s.split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn parse_literal_token(tok: &str, exposures: &[String]) -> Result<Literal, CliError> {
    let (negated, name) = match tok.strip_prefix('!') {
        Some(r) => (true, r.trim()),
        None => (false, tok.trim()),
    };
    if let Some(var) = exposures.iter().position(|e| e == name) {
        return Ok(Literal { var, negated });
    }
    Literal::parse(tok.trim()).map_err(|_| {
        usage(format!(
            "literal `{tok}` matches no exposure column and is not an X-number; exposures: {}",
            exposures.join(",")
        ))
    })
}

fn parse_literal_list(s: &str, exposures: &[String]) -> Result<LiteralSet, CliError> {
    if s.trim().is_empty() {
        return Ok(LiteralSet::empty());
    }
    let lits = s
        .split(',')
        .map(|tok| parse_literal_token(tok, exposures))
        .collect::<Result<Vec<_>, CliError>>()?;
    LiteralSet::new(lits).map_err(|e| usage(e.to_string()))
}

fn parse_context(s: &str, exposures: &[String]) -> Result<PartialAssignment, CliError> {
    let mut pairs = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("context entry `{part}` must be name=0 or name=1")))?;
        let lit = parse_literal_token(name, exposures)?;
        if lit.negated {
            return Err(usage("context entries name plain variables, not literals"));
        }
        let v = match value.trim() {
            "0" => false,
            "1" => true,
            other => return Err(usage(format!("context value must be 0 or 1, got `{other}`"))),
        };
        pairs.push((lit.var, v));
    }
    PartialAssignment::new(pairs).map_err(|e| usage(e.to_string()))
}

fn cmd_test(args: TestArgs) -> Result<(), CliError> {
    let exposures = split_labels(&args.exposures);
    if exposures.is_empty() {
        return Err(usage("--exposures must name at least one column"));
    }
    let strata_cols = args.strata.as_deref().map(split_labels).unwrap_or_default();
    let design: Design = args.design.into();
    let data = read_counts_path(&args.file, design, &exposures, &strata_cols)?;
    let k = data.k();

    let b = parse_literal_list(&args.b, &exposures)?;
    if b.is_empty() {
        return Err(usage("--b must name at least one literal"));
    }
    if b.literals().iter().any(|l| l.var >= k) {
        return Err(usage("--b references a variable outside the declared exposures"));
    }
    let declared = match &args.assume_monotone {
        Some(s) => parse_literal_list(s, &exposures)?,
        None => LiteralSet::empty(),
    };
    let bplus = match &args.bplus {
        Some(s) => {
            let bp = parse_literal_list(s, &exposures)?;
            if !bp.is_subset_of(&b) {
                return Err(usage("--bplus must be a subset of --b"));
            }
            if !bp.is_subset_of(&declared) {
                return Err(usage(
                    "--bplus literals must be declared monotone via --assume-monotone",
                ));
            }
            bp
        }
        None => {
            let lits: Vec<Literal> = b
                .literals()
                .iter()
                .copied()
                .filter(|l| declared.contains(l))
                .collect();
            LiteralSet::new(lits).expect("subset of a valid set")
        }
    };

    let c2_vars: Vec<usize> = (0..k).filter(|v| !b.covers_var(*v)).collect();
    let contexts: Vec<PartialAssignment> = if c2_vars.is_empty() {
        vec![PartialAssignment::empty()]
    } else if let Some(s) = &args.c2 {
        let ctx = parse_context(s, &exposures)?;
        if ctx.vars() != c2_vars {
            return Err(usage(
                "--c2 must assign exactly the exposures not mentioned in --b",
            ));
        }
        vec![ctx]
    } else if design == Design::Cohort {
        let p = CausePartition::new(b.clone(), k).map_err(|e| usage(e.to_string()))?;
        (0..p.context_count())
            .map(|i| p.c2_assignment(i))
            .collect::<Result<Vec<_>, Error>>()?
    } else {
        // Case-control contrasts only support the all-zero context.
        vec![
            PartialAssignment::new(c2_vars.iter().map(|&v| (v, false)).collect())
                .expect("distinct variables"),
        ]
    };

    let trees = if args.allow_large {
        enumerate_trees_unbounded(&bplus)?
    } else {
        enumerate_trees(&bplus)?
    };

    let c2_all_monotone = c2_vars.iter().all(|&v| declared.contains(&Literal::pos(v)));
    let mut strata_reports = Vec::new();
    let mut conditions_tried = 0usize;
    for stratum in data.strata() {
        let mut results: Vec<ContrastResult> = Vec::new();
        let mut conclusions = Vec::new();
        for ctx in &contexts {
            for tree in &trees {
                let r = irreducibility_contrast(
                    &data, &b, &bplus, tree, ctx, &stratum, args.continuity,
                )?;
                if r.positive {
                    conclusions.push(format!(
                        "positive estimate for {}: consistent with a sufficient cause containing {{{b}}}{}",
                        r.condition_id,
                        if b.len() == k {
                            "; at full width this is also a minimal sufficient cause for some individual"
                        } else {
                            ""
                        }
                    ));
                }
                results.push(r);
            }
        }
        if b.len() == k {
            for tree in &trees {
                let r = singularity_contrast(&data, &b, &bplus, tree, &stratum, args.continuity)?;
                if r.positive {
                    conclusions.push(format!(
                        "positive estimate for {}: consistent with {{{b}}} being the unique minimal sufficient cause of some individual",
                        r.condition_id
                    ));
                }
                results.push(r);
            }
        } else if c2_all_monotone && contexts.iter().any(|c| c.pairs().iter().all(|&(_, v)| !v)) {
            for tree in &trees {
                let r = msc_contrast(&data, &b, &bplus, tree, &stratum, args.continuity)?;
                if r.positive {
                    conclusions.push(format!(
                        "positive estimate for {}: consistent with {{{b}}} being a minimal sufficient cause for some individual",
                        r.condition_id
                    ));
                }
                results.push(r);
            }
        }
        conditions_tried += results.len();
        let any_positive = results.iter().any(|r| r.positive);
        let min_p = results
            .iter()
            .map(|r| r.p_one_sided)
            .min_by(|a, b| a.partial_cmp(b).expect("p-values are finite"));
        if !any_positive {
            conclusions.push("no condition has a positive point estimate".to_string());
        }
        strata_reports.push(StratumReport {
            stratum,
            results,
            any_positive,
            min_p_one_sided: min_p,
            conclusions,
        });
    }

    let report = TestReport {
        design,
        exposures,
        b: b.labels(),
        bplus: bplus.labels(),
        declared_monotone: declared.labels(),
        contexts: contexts.iter().map(|c| c.label()).collect(),
        continuity: args.continuity,
        conditions_tried,
        strata: strata_reports,
    };
    match args.format {
        Format::Json => print_json(&report)?,
        Format::Text => render_test(&report),
    }
    Ok(())
}

fn render_test(r: &TestReport) {
    println!(
        "design={} b={{{}}} bplus={{{}}} declared-monotone={{{}}} contexts=[{}]",
        r.design.label(),
        r.b.join(","),
        r.bplus.join(","),
        r.declared_monotone.join(","),
        r.contexts.join("; ")
    );
    println!(
        "{} conditions tried (each sufficient on its own; no multiplicity correction)",
        r.conditions_tried
    );
    for s in &r.strata {
        println!("stratum {}:", s.stratum);
        for c in &s.results {
            println!(
                "  {}\n    estimate {:+.4}  se {:.4}  95% CI ({:+.4}, {:+.4})  one-sided p {:.4}",
                c.condition_id, c.estimate, c.std_error, c.ci_low, c.ci_high, c.p_one_sided
            );
            for w in &c.warnings {
                println!("    warning: {w}");
            }
        }
        if let Some(first) = s.results.first() {
            for a in &first.assumptions {
                println!("  assumption: {a}");
            }
        }
        for line in &s.conclusions {
            println!("  conclusion: {line}");
        }
        if let Some(p) = s.min_p_one_sided {
            println!("  smallest one-sided p across conditions: {p:.4}");
        }
    }
}

// ------------------------------------------------------------ trees, coef

#[derive(Serialize)]
struct TreeLine {
    tree: String,
    edges: Vec<(String, String)>,
    degrees: Vec<(String, usize)>,
    m_irred: Vec<(String, i64)>,
    inequality_irred: String,
    m_sing: Vec<(String, i64)>,
    inequality_sing: String,
}

fn tree_line(b: &LiteralSet, bplus: &LiteralSet, tree: &LiteralTree) -> Result<TreeLine, Error> {
    let mi = m_irred(b, bplus, tree)?;
    let ms = m_sing(b, bplus, tree)?;
    let coeffs = |cv: &scc_core::trees::CoefficientVector| {
        cv.entries()
            .iter()
            .enumerate()
            .map(|(mask, &m)| (cv.subset_label(mask), m))
            .collect::<Vec<_>>()
    };
    Ok(TreeLine {
        tree: tree.to_string(),
        edges: tree
            .edge_literals()
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        degrees: tree
            .vertices()
            .iter()
            .map(|v| (v.to_string(), tree.degree(v).expect("vertex present")))
            .collect(),
        m_irred: coeffs(&mi),
        inequality_irred: mi.inequality(),
        m_sing: coeffs(&ms),
        inequality_sing: ms.inequality(),
    })
}

fn trees_spec(
    n: Option<usize>,
    b: Option<&String>,
    bplus: Option<&String>,
) -> Result<(LiteralSet, LiteralSet), CliError> {
    match (n, b) {
        (Some(n), None) => {
            let all = LiteralSet::new((0..n).map(Literal::pos).collect()).expect("distinct vars");
            Ok((all.clone(), all))
        }
        (None, Some(spec)) => {
            let b = LiteralSet::parse(spec).map_err(|e| usage(e.to_string()))?;
            let bplus = match bplus {
                Some(s) => {
                    let bp = LiteralSet::parse(s).map_err(|e| usage(e.to_string()))?;
                    if !bp.is_subset_of(&b) {
                        return Err(usage("--bplus must be a subset of --b"));
                    }
                    bp
                }
                None => b.clone(),
            };
            Ok((b, bplus))
        }
        _ => Err(usage("provide exactly one of --n or --b")),
    }
}

fn cmd_trees(args: TreesArgs) -> Result<(), CliError> {
    let (b, bplus) = trees_spec(args.n, args.b.as_ref(), args.bplus.as_ref())?;
    let trees = if args.allow_large {
        enumerate_trees_unbounded(&bplus)?
    } else {
        enumerate_trees(&bplus)?
    };
    for tree in &trees {
        let line = tree_line(&b, &bplus, tree)?;
        println!("{}", serde_json::to_string(&line).expect("serializable"));
    }
    Ok(())
}

fn cmd_coef(args: CoefArgs) -> Result<(), CliError> {
    let b = LiteralSet::parse(&args.b).map_err(|e| usage(e.to_string()))?;
    if b.is_empty() {
        return Err(usage("--b must name at least one literal"));
    }
    let bplus = match &args.bplus {
        Some(s) => {
            let bp = LiteralSet::parse(s).map_err(|e| usage(e.to_string()))?;
            if !bp.is_subset_of(&b) {
                return Err(usage("--bplus must be a subset of --b"));
            }
            bp
        }
        None => LiteralSet::empty(),
    };
    let trees = if args.allow_large {
        enumerate_trees_unbounded(&bplus)?
    } else {
        enumerate_trees(&bplus)?
    };
    let lines = trees
        .iter()
        .map(|t| tree_line(&b, &bplus, t))
        .collect::<Result<Vec<_>, Error>>()?;
    match args.format {
        Format::Json => {
            for line in &lines {
                println!("{}", serde_json::to_string(line).expect("serializable"));
            }
        }
        Format::Text => {
            for line in &lines {
                println!("tree {}:", line.tree);
                println!("  irreducible if {}", line.inequality_irred);
                println!("  singular    if {}", line.inequality_sing);
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------------- repr

#[derive(Serialize)]
struct ReprReport {
    kind: String,
    constructible: bool,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    avoided: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    export: Option<RepresentationExport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pla: Vec<String>,
}

fn cmd_repr(args: ReprArgs) -> Result<(), CliError> {
    let pop = read_truth_table_path(&args.file, WeightMode::Count)?;
    let pla = if args.pla {
        pop.members()
            .iter()
            .map(|m| pla_dump(&m.table, &format!("D_{}", m.id)))
            .collect()
    } else {
        Vec::new()
    };

    let report = if let Some(path) = &args.check {
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        let export: RepresentationExport = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { row: 0, msg: e.to_string() })?;
        let rep = export.to_representation(&pop)?;
        let verified = rep.verify(&pop)?;
        ReprReport {
            kind: "check".to_string(),
            constructible: true,
            verified,
            avoided: None,
            export: None,
            pla,
        }
    } else if let Some(spec) = &args.avoid {
        let b = LiteralSet::parse(spec).map_err(|e| usage(e.to_string()))?;
        let p = CausePartition::new(b.clone(), pop.k()).map_err(|e| usage(e.to_string()))?;
        match avoidance_representation(&pop, &p)? {
            Avoidance::Constructed(rep) => {
                if !rep.verify(&pop)? {
                    return Err(Error::Internal(
                        "avoidance construction returned an unverified representation".to_string(),
                    )
                    .into());
                }
                ReprReport {
                    kind: "avoidance".to_string(),
                    constructible: true,
                    verified: true,
                    avoided: Some(b.labels()),
                    export: Some(RepresentationExport::from_representation(&rep, &pop)),
                    pla,
                }
            }
            Avoidance::NotConstructible => ReprReport {
                kind: "avoidance".to_string(),
                constructible: false,
                verified: false,
                avoided: Some(b.labels()),
                export: None,
                pla,
            },
        }
    } else {
        let rep = Representation::canonical(&pop)?;
        if !rep.verify(&pop)? {
            return Err(Error::Internal(
                "canonical representation failed verification".to_string(),
            )
            .into());
        }
        ReprReport {
            kind: "canonical".to_string(),
            constructible: true,
            verified: true,
            avoided: None,
            export: Some(RepresentationExport::from_representation(&rep, &pop)),
            pla,
        }
    };

    match args.format {
        Format::Json => print_json(&report)?,
        Format::Text => {
            println!("representation: {}", report.kind);
            if let Some(avoided) = &report.avoided {
                println!("avoiding: {{{}}}", avoided.join(","));
            }
            if !report.constructible {
                println!(
                    "not constructible: every representation contains a conjunct including the set (it is irreducible)"
                );
            } else {
                println!("verified: {}", report.verified);
                if let Some(export) = &report.export {
                    for (conjunct, ids) in export.conjuncts.iter().zip(&export.membership) {
                        println!(
                            "  {{{}}} <- members [{}]",
                            conjunct.join(","),
                            ids.join(",")
                        );
                    }
                }
            }
            for p in &report.pla {
                print!("{p}");
            }
        }
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}
