//! Command-line frontend. All computation lives in the library; this binary
//! parses arguments, dispatches, and writes files.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specbip::bench::{parse_manifest, run_manifest};
use specbip::bipartize::{
    detect_anticommunity, partition_frustration, bipartize, BipartizeOptions, RoundingMode,
};
use specbip::graph::{connected_components, extract_subgraph, frustration, Graph};
use specbip::io::{
    load_graph, load_graph_path, load_partition, load_permutation, save_dense_array, save_graph,
    save_partition, save_permutation, save_symmetric_matrix, GraphFormat,
};
use specbip::linalg::eigh;
use specbip::metrics::{
    bipartivity_from_values, csv_row, error_indices, node_error, QualityReport, CSV_HEADER,
};
use specbip::plotdata::{eigplot_data, spy_data};
use specbip::testgen::TestSpec;
use specbip::{bench::generate_experiment, Error};

#[derive(Parser)]
#[command(
    name = "specbip",
    about = "Spectral bipartization and anti-community detection",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random experiment: ground truth, perturbed, scrambled
    /// graph, and the scrambling permutation.
    Gen(GenArgs),
    /// Bipartize a graph (or detect an anti-community) and write the
    /// permutation, partition, reconstructed matrix, and quality report.
    Bipartize(BipartizeArgs),
    /// Run a benchmark manifest and write the CSV table.
    Bench(BenchArgs),
    /// Write the eigenvalue magnitude profile of a graph.
    Eigplot(EigplotArgs),
    /// Write the sparsity pattern of a graph, optionally permuted.
    Spy(SpyArgs),
    /// List connected components.
    Components(ComponentsArgs),
    /// Compute quality metrics for a graph against optional references.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    xi: f64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    weighted: bool,
    /// Trial index within the seed's stream family.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Graph file format: pajek, mm, or tsv.
    #[arg(long, default_value = "mm")]
    format: String,
}

#[derive(Args)]
struct BipartizeArgs {
    /// Input graph file (.net/.paj, .mtx/.mm, or .tsv/.txt).
    graph: PathBuf,
    /// Supply the set cardinalities instead of estimating them.
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    /// Rounding mode: signed, nonnegative, binary, or integer.
    #[arg(long, default_value = "binary")]
    mode: String,
    /// Report the result as an anti-community.
    #[arg(long)]
    anticommunity: bool,
    /// For disconnected graphs: largest (analyze the largest component) or
    /// all (every component above --min-component).
    #[arg(long)]
    component: Option<String>,
    #[arg(long, default_value_t = 10)]
    min_component: usize,
    #[arg(long, default_value_t = 100.0)]
    gap_ratio: f64,
    #[arg(long, default_value_t = 1e-8)]
    zero_tol: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also dump the dense reconstructed matrix (array format).
    #[arg(long)]
    dump_dense: bool,
    /// Override the input format detection.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output CSV path; overrides the manifest's `out` key. Defaults to
    /// stdout when neither is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit one row per trial instead of means.
    #[arg(long)]
    per_trial: bool,
}

#[derive(Args)]
struct EigplotArgs {
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    /// Restrict to the largest connected component first.
    #[arg(long)]
    component: Option<String>,
}

#[derive(Args)]
struct SpyArgs {
    graph: PathBuf,
    /// Node permutation file to apply before plotting.
    #[arg(long)]
    perm: Option<PathBuf>,
    /// Separator value to embed for partition lines.
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ComponentsArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 10)]
    min_component: usize,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct MetricsArgs {
    graph: PathBuf,
    /// Matrix Market file to compare against (as the approximation).
    #[arg(long)]
    against: Option<PathBuf>,
    /// Partition file for the frustration column.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// True partition file for the node-error column.
    #[arg(long)]
    true_partition: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::UnknownFormat(_) => 2,
        Error::NonFinite | Error::NoConvergence { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> specbip::Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Bipartize(args) => cmd_bipartize(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Eigplot(args) => cmd_eigplot(args),
        Command::Spy(args) => cmd_spy(args),
        Command::Components(args) => cmd_components(args),
        Command::Metrics(args) => cmd_metrics(args),
    }
}

fn load_input(path: &Path, format: Option<&str>) -> specbip::Result<Graph> {
    let (g, report) = match format {
        Some(name) => {
            let fmt = GraphFormat::from_name(name)?;
            let text = std::fs::read_to_string(path)?;
            load_graph(&text, fmt)?
        }
        None => load_graph_path(path)?,
    };
    if report.self_loops > 0 {
        eprintln!("note: dropped {} self-loops", report.self_loops);
    }
    if report.duplicate_edges > 0 {
        eprintln!("note: merged {} duplicate edge lines", report.duplicate_edges);
    }
    Ok(g)
}

fn file_extension(format: GraphFormat) -> &'static str {
    match format {
        GraphFormat::Pajek => "net",
        GraphFormat::MatrixMarket => "mtx",
        GraphFormat::EdgeList => "tsv",
    }
}

fn cmd_gen(args: GenArgs) -> specbip::Result<()> {
    let spec = TestSpec {
        n1: args.n1,
        n2: args.n2,
        xi: args.xi,
        eta: args.eta,
        seed: args.seed,
        weighted: args.weighted,
    };
    spec.validate()?;
    let format = GraphFormat::from_name(&args.format)?;
    let ext = file_extension(format);
    std::fs::create_dir_all(&args.out)?;
    let exp = generate_experiment(&spec, args.trial);
    let files = [
        (format!("ground_truth.{}", ext), save_graph(&exp.truth, format)),
        (format!("perturbed.{}", ext), save_graph(&exp.perturbed, format)),
        (format!("scrambled.{}", ext), save_graph(&exp.scrambled, format)),
        ("permutation.txt".to_string(), save_permutation(&exp.permutation)),
    ];
    for (name, contents) in files {
        let path = args.out.join(&name);
        std::fs::write(&path, contents)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_bipartize(args: BipartizeArgs) -> specbip::Result<()> {
    let g = load_input(&args.graph, args.format.as_deref())?;
    let mode = RoundingMode::from_name(&args.mode)?;
    let cardinalities = match (args.n1, args.n2) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => {
            return Err(Error::InvalidOptions(
                "--n1 and --n2 must be given together".into(),
            ))
        }
    };
    let opts = BipartizeOptions {
        cardinalities,
        gap_ratio: args.gap_ratio,
        zero_tol: args.zero_tol,
        mode,
    };

    let targets: Vec<(String, Graph)> = if g.is_connected() {
        vec![(String::new(), g)]
    } else {
        let cc = connected_components(&g);
        match args.component.as_deref() {
            Some("largest") => {
                vec![(String::new(), extract_subgraph(&g, cc.largest())?)]
            }
            Some("all") => cc
                .components
                .iter()
                .filter(|c| c.len() > args.min_component)
                .enumerate()
                .map(|(k, c)| Ok((format!("c{}_", k), extract_subgraph(&g, c)?)))
                .collect::<specbip::Result<Vec<_>>>()?,
            Some(other) => {
                return Err(Error::InvalidOptions(format!(
                    "--component must be largest or all, got {:?}",
                    other
                )))
            }
            None => return Err(Error::Disconnected),
        }
    };
    if targets.is_empty() {
        return Err(Error::InvalidOptions(format!(
            "no component has more than {} nodes",
            args.min_component
        )));
    }

    std::fs::create_dir_all(&args.out)?;
    for (prefix, sub) in targets {
        run_bipartize_target(&args, &prefix, &sub, &opts)?;
    }
    Ok(())
}

fn run_bipartize_target(
    args: &BipartizeArgs,
    prefix: &str,
    g: &Graph,
    opts: &BipartizeOptions,
) -> specbip::Result<()> {
    let start = std::time::Instant::now();
    let (bip, anti) = if args.anticommunity {
        let a = detect_anticommunity(g, opts)?;
        (a.bipartization.clone(), Some(a))
    } else {
        (bipartize(g, opts)?, None)
    };
    let elapsed = start.elapsed().as_secs_f64();

    let out = &args.out;
    let write = |name: String, contents: String| -> specbip::Result<()> {
        let path = out.join(name);
        std::fs::write(&path, contents)?;
        println!("wrote {}", path.display());
        Ok(())
    };

    write(format!("{}permutation.txt", prefix), save_permutation(&bip.sigma))?;
    write(format!("{}partition.txt", prefix), save_partition(&bip.partition))?;
    write(
        format!("{}a_b.mtx", prefix),
        save_symmetric_matrix(&bip.a_b, specbip::metrics::NONZERO_TOL),
    )?;
    if args.dump_dense {
        write(format!("{}a_b_dense.mtx", prefix), save_dense_array(&bip.a_b))?;
    }

    let out_fact = eigh(&bip.a_b)?;
    let b_s = bipartivity_from_values(&out_fact.values);
    let (e_b, e_a) = match error_indices(
        &g.to_dense(),
        &bip.a_b,
        bip.n1(),
        bip.n2(),
        Some(&bip.sigma),
    ) {
        Ok((e_b, e_a)) => (Some(e_b), Some(e_a)),
        Err(Error::EmptyCrossBlock) => (None, None),
        Err(e) => return Err(e),
    };
    let report = QualityReport {
        i_b: 1.0 - b_s,
        b_s,
        e_b,
        e_a,
        e_n: None,
        e_n_count: None,
        frustration: partition_frustration(g, &bip)?,
        time_s: elapsed,
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    csv.push_str(&csv_row(
        bip.n1(),
        bip.n2(),
        0.0,
        0.0,
        0,
        if args.anticommunity {
            "anticommunity"
        } else if bip.supplied {
            "specbip-n1"
        } else {
            "specbip"
        },
        &report,
    ));
    csv.push('\n');
    write(format!("{}quality.csv", prefix), csv)?;

    let mut diag = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(diag, "nodes = {}", g.n());
    let _ = writeln!(diag, "edges = {}", g.edge_count());
    let _ = writeln!(diag, "n1 = {}", bip.n1());
    let _ = writeln!(diag, "n2 = {}", bip.n2());
    let _ = writeln!(diag, "cardinalities_supplied = {}", bip.supplied);
    let _ = writeln!(diag, "gap_found = {}", bip.estimate.gap_found);
    let _ = writeln!(diag, "gap_index = {}", bip.estimate.k);
    let _ = writeln!(diag, "zero_eigenvalues = {}", bip.estimate.zero_count);
    let _ = writeln!(diag, "estimated_n1 = {}", bip.estimate.n1);
    let _ = writeln!(diag, "estimated_n2 = {}", bip.estimate.n2);
    let _ = writeln!(diag, "mode = {}", bip.mode.name());
    let _ = writeln!(diag, "procrustes_defect_u1 = {:e}", bip.defects.u1);
    let _ = writeln!(diag, "procrustes_defect_v = {:e}", bip.defects.v);
    let _ = writeln!(diag, "procrustes_defect_u2 = {:e}", bip.defects.u2);
    let _ = writeln!(
        diag,
        "diagonal_block_residual = {:e}",
        bip.defects.diagonal_residual
    );
    if let Some(anti) = anti {
        let _ = writeln!(diag, "anticommunity_size = {}", bip.n1());
        let _ = writeln!(diag, "internal_edges = {}", anti.internal_edge_count);
        let _ = writeln!(diag, "internal_weight = {}", anti.internal_weight);
        let _ = writeln!(diag, "interacting_nodes = {}", anti.interacting_nodes);
    }
    write(format!("{}diagnostics.txt", prefix), diag)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> specbip::Result<()> {
    let text = std::fs::read_to_string(&args.manifest)?;
    let mut manifest = parse_manifest(&text)?;
    if args.per_trial {
        manifest.per_trial = true;
    }
    let outcome = run_manifest(&manifest)?;
    for w in &outcome.warnings {
        eprintln!("warning: {}", w);
    }
    let out = args.out.clone().or_else(|| manifest.out.clone().map(PathBuf::from));
    match out {
        Some(path) => {
            std::fs::write(&path, outcome.csv)?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", outcome.csv),
    }
    Ok(())
}

fn restrict_to_largest(g: Graph, component: Option<&str>) -> specbip::Result<Graph> {
    match component {
        Some("largest") => {
            let cc = connected_components(&g);
            extract_subgraph(&g, cc.largest())
        }
        Some(other) => Err(Error::InvalidOptions(format!(
            "--component must be largest, got {:?}",
            other
        ))),
        None => Ok(g),
    }
}

fn write_or_print(out: Option<&Path>, contents: String) -> specbip::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, contents)?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", contents),
    }
    Ok(())
}

fn cmd_eigplot(args: EigplotArgs) -> specbip::Result<()> {
    let g = load_input(&args.graph, args.format.as_deref())?;
    let g = restrict_to_largest(g, args.component.as_deref())?;
    let data = eigplot_data(&g)?;
    write_or_print(args.out.as_deref(), data)
}

fn cmd_spy(args: SpyArgs) -> specbip::Result<()> {
    let g = load_input(&args.graph, args.format.as_deref())?;
    let perm = match &args.perm {
        Some(path) => Some(load_permutation(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let data = spy_data(&g, perm.as_ref(), args.n1);
    write_or_print(args.out.as_deref(), data)
}

fn cmd_components(args: ComponentsArgs) -> specbip::Result<()> {
    let g = load_input(&args.graph, args.format.as_deref())?;
    let cc = connected_components(&g);
    println!("components = {}", cc.components.len());
    let above: Vec<&Vec<usize>> = cc
        .components
        .iter()
        .filter(|c| c.len() > args.min_component)
        .collect();
    println!(
        "components_above_{} = {}",
        args.min_component,
        above.len()
    );
    for (k, c) in cc.components.iter().take(10).enumerate() {
        println!("component_{}_size = {}", k, c.len());
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> specbip::Result<()> {
    let g = load_input(&args.graph, args.format.as_deref())?;
    let fact = eigh(&g.to_dense())?;
    let b_s = bipartivity_from_values(&fact.values);

    let partition = match &args.partition {
        Some(path) => Some(load_partition(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let frustration_value = match &partition {
        Some(p) => frustration(&g, p)?,
        None => 0.0,
    };
    let (e_n, e_n_count) = match (&args.true_partition, &partition) {
        (Some(path), Some(got)) => {
            let truth = load_partition(&std::fs::read_to_string(path)?)?;
            let (e_n, count) = node_error(&truth, got)?;
            (Some(e_n), Some(count))
        }
        _ => (None, None),
    };
    let (e_b, e_a) = match (&args.against, &partition) {
        (Some(path), Some(p)) => {
            let (approx, _) = load_graph_path(path)?;
            if approx.n() != g.n() {
                return Err(Error::SizeMismatch(format!(
                    "approximation has {} nodes, graph has {}",
                    approx.n(),
                    g.n()
                )));
            }
            // order both so set 1 comes first
            let mut order: Vec<usize> = (0..g.n()).collect();
            order.sort_by_key(|&i| (p.label(i), i));
            let perm = specbip::graph::NodePermutation::from_ordering(&order)?;
            match error_indices(
                &g.to_dense(),
                &approx.to_dense(),
                p.n1,
                p.n2,
                Some(&perm),
            ) {
                Ok((e_b, e_a)) => (Some(e_b), Some(e_a)),
                Err(Error::EmptyCrossBlock) => (None, None),
                Err(e) => return Err(e),
            }
        }
        _ => (None, None),
    };

    let report = QualityReport {
        i_b: 1.0 - b_s,
        b_s,
        e_b,
        e_a,
        e_n,
        e_n_count,
        frustration: frustration_value,
        time_s: 0.0,
    };
    let (n1, n2) = match &partition {
        Some(p) => (p.n1, p.n2),
        None => (g.n(), 0),
    };
    println!("{}", CSV_HEADER);
    println!("{}", csv_row(n1, n2, 0.0, 0.0, 0, "metrics", &report));
    Ok(())
}
