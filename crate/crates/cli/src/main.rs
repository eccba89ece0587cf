//! `muse`: generate, filter, solve and merge MUSE CSP instances, parse word
//! lattices, and run the profile and timing experiments.
//!
//! Exit status: 0 on success, 1 when a required solution or parse does not
//! exist, 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use muse_core::cdg::{build_network, builtin_grammar, prune, Builtin, Grammar, Network, WordGraph};
use muse_core::combine::combine;
use muse_core::harness::{
    gen_random, profile_csv, random_muse, run_profile, run_timing, timing_csv, Language, ProfileRow, ProfileSpec,
    RandomShape, Topology, TopologySpec,
};
use muse_core::io::{apply_shares, format_assignment, parse_instance, parse_muse, parse_shares, write_muse};
use muse_core::search::extract_all_with;
use muse_core::{
    muse_ac1, muse_ac1_with, muse_ac_pc_fixpoint, muse_pc1_with, oracle_muse_arc_fixpoint, oracle_muse_pair_fixpoint,
    oracle_muse_path_fixpoint, Ac1Options, Discipline, MuseInstance, Pc1Options,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "muse", version, about = "Multiply segmented constraint satisfaction")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random instance.
    Gen(GenArgs),
    /// MUSE arc consistency; prints the filtered instance.
    Ac(FilterArgs),
    /// MUSE path consistency; prints the filtered instance.
    Pc(PcArgs),
    /// Arc consistency, then every solution on every segment.
    Solve(SolveArgs),
    /// Parse a sentence, word graph or full lattice with a grammar.
    Parse(ParseArgs),
    /// Merge CSP files into one instance whose segments are the inputs.
    Combine(CombineArgs),
    /// Label-count profile over constraint probabilities (CSV).
    Profile(ProfileArgs),
    /// Parse-extraction timing with and without arc consistency (CSV).
    Timing(TimingArgs),
    /// Cross-check the propagation engines against brute-force fixpoints.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Tree,
    Lattice,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    topology: Shape,
    #[arg(long, default_value_t = 2)]
    branching: usize,
    #[arg(long, default_value_t = 4)]
    path_length: usize,
    #[arg(long, default_value_t = 3)]
    labels: usize,
    /// Probability that a pairwise entry is admissible.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Node limit for `--topology random`.
    #[arg(long, default_value_t = 6)]
    max_nodes: usize,
    /// Segment limit for `--topology random`.
    #[arg(long, default_value_t = 4)]
    max_segments: usize,
}

#[derive(Args)]
struct FilterArgs {
    file: PathBuf,
    /// Print worklist events to stderr.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    lifo: bool,
}

#[derive(Args)]
struct PcArgs {
    #[command(flatten)]
    filter: FilterArgs,
    /// Alternate with arc consistency until neither changes anything.
    #[arg(long)]
    with_ac: bool,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Search without the support sets left by arc consistency.
    #[arg(long)]
    unguided: bool,
    /// Print only the first solution.
    #[arg(long)]
    first: bool,
}

#[derive(Args)]
struct ParseArgs {
    /// Built-in grammar (g1, g2/abc, g3/ww) or a grammar file.
    #[arg(long, short)]
    grammar: String,
    /// Words as `form:category`, space separated.
    #[arg(long, conflicts_with_all = ["graph", "lattice"])]
    sentence: Option<String>,
    /// Word graph file.
    #[arg(long, conflicts_with = "lattice")]
    graph: Option<PathBuf>,
    /// Full lattice of this length over the grammar's categories.
    #[arg(long)]
    lattice: Option<usize>,
    /// Print each distinct category string instead of full parses.
    #[arg(long)]
    strings: bool,
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct CombineArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// `SHARE name: file:node ...` lines naming nodes that are one variable.
    #[arg(long)]
    shares: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, value_enum, default_value = "tree")]
    topology: Shape,
    #[arg(long, default_value_t = 2)]
    branching: usize,
    #[arg(long, default_value_t = 4)]
    path_length: usize,
    #[arg(long, default_value_t = 3)]
    labels: usize,
    #[arg(long, default_value_t = 6)]
    instances: usize,
    #[arg(long, default_value_t = 1996)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct TimingArgs {
    #[arg(long, default_value = "abc")]
    lang: Language,
    /// Largest n (abc: lattice length 3n; ww: length 2n).
    #[arg(long)]
    max: Option<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Skip the unfiltered search above this n.
    #[arg(long)]
    raw_max: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 600)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_nodes: usize,
    #[arg(long, default_value_t = 4)]
    max_labels: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// An input problem rather than a failed search.
#[derive(Debug)]
struct InputError(anyhow::Error);

fn input<T>(r: Result<T>) -> std::result::Result<T, InputError> {
    r.map_err(InputError)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_muse(path: &Path) -> Result<MuseInstance> {
    parse_muse(&read(path)?).with_context(|| path.display().to_string())
}

fn discipline(lifo: bool) -> Discipline {
    if lifo {
        Discipline::Lifo
    } else {
        Discipline::Fifo
    }
}

fn gen(a: &GenArgs) -> Result<()> {
    let m = match a.topology {
        Shape::Random => {
            let shape = RandomShape {
                max_nodes: a.max_nodes,
                max_labels: a.labels,
                max_segments: a.max_segments,
                p: a.p,
            };
            if !(0.0..=1.0).contains(&a.p) || a.max_nodes == 0 || a.labels == 0 {
                bail!("need p in [0,1] and positive node and label limits");
            }
            random_muse(&shape, &mut ChaCha8Rng::seed_from_u64(a.seed))
        }
        kind => gen_random(&TopologySpec {
            kind: topology(kind)?,
            branching: a.branching,
            path_length: a.path_length,
            labels: a.labels,
            p: a.p,
            seed: a.seed,
        })?,
    };
    print!("{}", write_muse(&m));
    Ok(())
}

fn topology(s: Shape) -> Result<Topology> {
    match s {
        Shape::Tree => Ok(Topology::Tree),
        Shape::Lattice => Ok(Topology::Lattice),
        Shape::Random => bail!("the experiment needs a tree or lattice topology"),
    }
}

fn ac(a: &FilterArgs) -> Result<()> {
    let m = load_muse(&a.file)?;
    let (m, st) = muse_ac1_with(m, Ac1Options { discipline: discipline(a.lifo), trace: a.trace });
    for e in st.trace() {
        eprintln!("{e}");
    }
    print!("{}", write_muse(&m));
    Ok(())
}

fn pc(a: &PcArgs) -> Result<()> {
    let m = load_muse(&a.filter.file)?;
    let m = if a.with_ac {
        muse_ac_pc_fixpoint(m)
    } else {
        let opts = Pc1Options { discipline: discipline(a.filter.lifo), trace: a.filter.trace };
        let (m, st) = muse_pc1_with(m, opts);
        for e in st.trace() {
            eprintln!("{e}");
        }
        m
    };
    print!("{}", write_muse(&m));
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<bool> {
    let m = load_muse(&a.file)?;
    let (m, st) = muse_ac1(m);
    let (found, _) = extract_all_with(&m, (!a.unguided).then_some(&st));
    let shown = if a.first { found.len().min(1) } else { found.len() };
    for s in found.iter().take(shown) {
        println!("{}", format_assignment(m.csp(), s));
    }
    Ok(!found.is_empty())
}

fn grammar(spec: &str) -> Result<Grammar> {
    if let Ok(b) = spec.parse::<Builtin>() {
        return Ok(builtin_grammar(b));
    }
    let text = read(Path::new(spec))?;
    Grammar::parse(&text).with_context(|| spec.to_string())
}

fn word_graph(a: &ParseArgs, g: &Grammar) -> Result<WordGraph> {
    if let Some(s) = &a.sentence {
        let words: Vec<(&str, &str)> = s
            .split_whitespace()
            .map(|w| w.split_once(':').with_context(|| format!("expected form:category, got '{w}'")))
            .collect::<Result<_>>()?;
        if words.is_empty() {
            bail!("empty sentence");
        }
        return Ok(WordGraph::sentence(&words));
    }
    if let Some(path) = &a.graph {
        return WordGraph::parse(&read(path)?).with_context(|| path.display().to_string());
    }
    if let Some(len) = a.lattice {
        if len == 0 {
            bail!("lattice length must be positive");
        }
        let cats: Vec<&str> = g.categories.iter().map(String::as_str).collect();
        return Ok(WordGraph::full_lattice(len, &cats));
    }
    bail!("give one of --sentence, --graph or --lattice")
}

fn parse_cmd(a: &ParseArgs) -> std::result::Result<bool, InputError> {
    let g = input(grammar(&a.grammar))?;
    let wg = input(word_graph(a, &g))?;
    let mut net: Network = input(build_network(&wg, &g).map_err(Into::into))?;
    prune(&mut net);
    let (m, st) = muse_ac1_with(net.muse, Ac1Options { trace: a.trace, ..Default::default() });
    for e in st.trace() {
        eprintln!("{e}");
    }
    let (parses, _) = extract_all_with(&m, Some(&st));
    net.muse = m;
    if a.strings {
        let strings: std::collections::BTreeSet<Vec<String>> =
            parses.iter().map(|p| net.category_string(p)).collect();
        for s in &strings {
            println!("{}", s.join(" "));
        }
    } else {
        for (k, p) in parses.iter().enumerate() {
            if k > 0 {
                println!();
            }
            print!("{}", net.format(p));
        }
    }
    eprintln!("{} parse(s), {} role values left", parses.len(), net.muse.csp().total_labels());
    Ok(!parses.is_empty())
}

fn combine_cmd(a: &CombineArgs) -> Result<()> {
    let shares = match &a.shares {
        Some(p) => parse_shares(&read(p)?).with_context(|| p.display().to_string())?,
        None => Vec::new(),
    };
    let mut csps = Vec::new();
    for path in &a.files {
        let mut csp = parse_instance(&read(path)?)
            .with_context(|| path.display().to_string())?
            .csp;
        let key = path.to_string_lossy();
        let base = path.file_name().map(|f| f.to_string_lossy()).unwrap_or_default();
        // Share lines may refer to a file by the path given or by its name.
        apply_shares(&mut csp, &key, &shares)?;
        if base != key {
            apply_shares(&mut csp, &base, &shares)?;
        }
        csps.push(csp);
    }
    let (m, dag) = combine(&csps)?;
    if dag.fell_back {
        eprintln!("note: merged with the prefix-tree fallback");
    }
    print!("{}", write_muse(&m));
    Ok(())
}

fn profile_table(rows: &[ProfileRow]) -> String {
    let mut out = format!("{:>5} {:>9} {:>9} {:>9} {:>9}\n", "p", "after", "solution", "csp_ac", "unused");
    for r in rows {
        out += &format!(
            "{:>5.2} {:>9.2} {:>9.2} {:>9.2} {:>9.2}\n",
            r.p, r.after, r.solution, r.csp_ac, r.unused
        );
    }
    out
}

fn profile(a: &ProfileArgs) -> Result<()> {
    let spec = ProfileSpec {
        kind: topology(a.topology)?,
        branching: a.branching,
        path_length: a.path_length,
        labels: a.labels,
        ps: ProfileSpec::default_ps(),
        instances: a.instances,
        seed: a.seed,
    };
    let rows = run_profile(&spec)?;
    match a.format {
        Format::Csv => print!("{}", profile_csv(a.seed, &rows)),
        Format::Text => print!("{}", profile_table(&rows)),
    }
    Ok(())
}

fn timing(a: &TimingArgs) -> Result<()> {
    let max = a.max.unwrap_or(match a.lang {
        Language::Abc => 7,
        Language::Ww => 8,
    });
    if max == 0 {
        bail!("--max must be positive");
    }
    let sizes: Vec<usize> = (1..=max).collect();
    let rows = run_timing(a.lang, &sizes, a.reps, a.raw_max)?;
    match a.format {
        Format::Csv => print!("{}", timing_csv(&rows)),
        Format::Text => {
            println!("{:>3} {:>12} {:>12} {:>8}", "n", "t_raw", "t_muse", "parses");
            for r in &rows {
                println!("{:>3} {:>12.6} {:>12.6} {:>8}", r.n, r.t_raw, r.t_muse, r.parses_muse);
            }
        }
    }
    Ok(())
}

fn oracle_check(a: &OracleArgs) -> Result<()> {
    if a.max_nodes == 0 || a.max_labels == 0 {
        bail!("node and label limits must be positive");
    }
    let mut counts = [0usize; 4];
    let mut total = 0;
    for (k, p) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let shape = RandomShape {
            max_nodes: a.max_nodes,
            max_labels: a.max_labels,
            max_segments: 4,
            p,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(k as u64));
        for _ in 0..a.instances / 3 {
            let m = random_muse(&shape, &mut rng);
            total += 1;
            let (ac, _) = muse_ac1(m.clone());
            let lifo = muse_ac1_with(m.clone(), Ac1Options { discipline: Discipline::Lifo, trace: false }).0;
            let (pc, _) = muse_pc1_with(m.clone(), Pc1Options::default());
            let checks = [
                ac == oracle_muse_arc_fixpoint(m.clone()),
                ac == oracle_muse_pair_fixpoint(m.clone()),
                pc == oracle_muse_path_fixpoint(m.clone()),
                ac == lifo,
            ];
            for (c, ok) in counts.iter_mut().zip(checks) {
                *c += usize::from(ok);
            }
        }
    }
    let names = ["ac1_vs_segment_fixpoint", "ac1_vs_pair_fixpoint", "pc1_vs_path_fixpoint", "ac1_fifo_vs_lifo"];
    match a.format {
        Format::Csv => {
            println!("# seed={}", a.seed);
            println!("check,agree,total");
            for (n, c) in names.iter().zip(counts) {
                println!("{n},{c},{total}");
            }
        }
        Format::Text => {
            for (n, c) in names.iter().zip(counts) {
                println!("{n:<26} {c}/{total}");
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> std::result::Result<bool, InputError> {
    match &cli.cmd {
        Cmd::Gen(a) => input(gen(a)).map(|_| true),
        Cmd::Ac(a) => input(ac(a)).map(|_| true),
        Cmd::Pc(a) => input(pc(a)).map(|_| true),
        Cmd::Solve(a) => input(solve(a)),
        Cmd::Parse(a) => parse_cmd(a),
        Cmd::Combine(a) => input(combine_cmd(a)).map(|_| true),
        Cmd::Profile(a) => input(profile(a)).map(|_| true),
        Cmd::Timing(a) => input(timing(a)).map(|_| true),
        Cmd::OracleCheck(a) => input(oracle_check(a)).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
