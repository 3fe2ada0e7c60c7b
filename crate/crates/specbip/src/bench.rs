//! Benchmark manifests and the harness that reproduces the random-graph
//! experiment tables as CSV data.
//!
//! A manifest is a text file of flat `key = value` blocks separated by blank
//! lines. Each block expands to a grid of cells (`n1n2` pairs × `xi` × `eta`)
//! sharing `trials`, `methods`, `seed`, and `weighted`. Trials run in a
//! worker pool with one RNG stream per trial index, and rows are emitted in
//! deterministic (cell, method) order regardless of completion order.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bipartize::{
    bipartize_with_factorization, BipartizeOptions, RoundingMode,
};
use crate::graph::{
    connected_components, extract_subgraph, frustration, Graph, NodePermutation, Partition,
};
use crate::linalg::eigh;
use crate::metrics::{
    bipartivity_from_values, csv_row, error_indices, node_error, QualityReport, CSV_HEADER,
};
use crate::redblack::red_black_order;
use crate::testgen::{
    parse_field, parse_key_value, perturb, random_bipartite, scramble, trial_seeds, TestSpec,
};
use crate::{Error, Result};

/// Benchmark method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Spectral bipartization with estimated cardinalities.
    Specbip,
    /// Spectral bipartization with the true cardinalities supplied.
    SpecbipN1,
    /// BFS parity two-coloring.
    RedBlack,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Specbip => "specbip",
            Method::SpecbipN1 => "specbip-n1",
            Method::RedBlack => "redblack",
        }
    }

    pub fn from_name(name: &str) -> Result<Method> {
        match name.trim().to_ascii_lowercase().as_str() {
            "specbip" => Ok(Method::Specbip),
            "specbip-n1" | "specbip-n" => Ok(Method::SpecbipN1),
            "redblack" | "red-black" => Ok(Method::RedBlack),
            other => Err(Error::InvalidOptions(format!(
                "unknown method {:?}",
                other
            ))),
        }
    }
}

/// One expansion cell: a test spec plus the shared run parameters.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub spec: TestSpec,
}

/// Parsed manifest.
#[derive(Debug, Clone)]
pub struct BenchManifest {
    pub cells: Vec<BenchCell>,
    pub trials: usize,
    pub methods: Vec<Method>,
    /// Report wall times; disable for byte-identical reruns.
    pub timing: bool,
    /// Emit one row per trial (with a trailing `trial` column) instead of
    /// means.
    pub per_trial: bool,
    /// Output path suggested by the manifest; the CLI flag overrides it.
    pub out: Option<String>,
}

fn parse_usize_pair(line: usize, tok: &str) -> Result<(usize, usize)> {
    let (a, b) = tok.split_once('x').ok_or_else(|| Error::Parse {
        line,
        msg: format!("expected `n1xn2`, got {:?}", tok),
    })?;
    Ok((parse_field(line, a.trim())?, parse_field(line, b.trim())?))
}

/// Parses a benchmark manifest.
pub fn parse_manifest(text: &str) -> Result<BenchManifest> {
    let mut manifest = BenchManifest {
        cells: Vec::new(),
        trials: 10,
        methods: vec![Method::SpecbipN1, Method::Specbip, Method::RedBlack],
        timing: true,
        per_trial: false,
        out: None,
    };
    let mut block: Vec<(usize, String, String)> = Vec::new();
    let mut blocks: Vec<Vec<(usize, String, String)>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            if !block.is_empty() {
                blocks.push(std::mem::take(&mut block));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (k, v) = parse_key_value(idx + 1, line)?;
        block.push((idx + 1, k, v));
    }
    if !block.is_empty() {
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "manifest has no blocks".into(),
        });
    }

    let mut cell_index = 0u64;
    for block in blocks {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut xis: Vec<f64> = Vec::new();
        let mut etas: Vec<f64> = vec![0.0];
        let mut seed = 1u64;
        let mut weighted = false;
        let mut eta_given = false;
        for (line, key, value) in block {
            match key.as_str() {
                "n1n2" => {
                    for tok in value.split(',') {
                        pairs.push(parse_usize_pair(line, tok.trim())?);
                    }
                }
                "xi" => {
                    for tok in value.split(',') {
                        xis.push(parse_field(line, tok.trim())?);
                    }
                }
                "eta" => {
                    if !eta_given {
                        etas.clear();
                        eta_given = true;
                    }
                    for tok in value.split(',') {
                        etas.push(parse_field(line, tok.trim())?);
                    }
                }
                "trials" => manifest.trials = parse_field(line, &value)?,
                "seed" => seed = parse_field(line, &value)?,
                "weighted" => weighted = parse_field(line, &value)?,
                "methods" => {
                    manifest.methods = value
                        .split(',')
                        .map(Method::from_name)
                        .collect::<Result<Vec<_>>>()?;
                }
                "timing" => {
                    manifest.timing = match value.to_ascii_lowercase().as_str() {
                        "on" | "true" | "wall" => true,
                        "off" | "false" | "none" => false,
                        other => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("timing must be on or off, got {:?}", other),
                            })
                        }
                    }
                }
                "per_trial" | "per-trial" => manifest.per_trial = parse_field(line, &value)?,
                "out" => manifest.out = Some(value),
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown manifest key {:?}", other),
                    })
                }
            }
        }
        if pairs.is_empty() || xis.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "each manifest block needs n1n2 and xi".into(),
            });
        }
        for &(n1, n2) in &pairs {
            for &xi in &xis {
                for &eta in &etas {
                    let spec = TestSpec {
                        n1,
                        n2,
                        xi,
                        eta,
                        seed: seed.wrapping_add(cell_index),
                        weighted,
                    };
                    spec.validate()?;
                    manifest.cells.push(BenchCell { spec });
                    cell_index += 1;
                }
            }
        }
    }
    if manifest.trials < 1 {
        return Err(Error::InvalidOptions("trials must be at least 1".into()));
    }
    if manifest.methods.is_empty() {
        return Err(Error::InvalidOptions(
            "at least one method is required".into(),
        ));
    }
    Ok(manifest)
}

/// The four artifacts of one generated experiment.
#[derive(Debug, Clone)]
pub struct GeneratedExperiment {
    /// Unperturbed bipartite graph in block order.
    pub truth: Graph,
    /// Truth with the diagonal-block perturbation applied.
    pub perturbed: Graph,
    /// Perturbed graph under the scrambling permutation.
    pub scrambled: Graph,
    /// Ground-truth scrambling permutation.
    pub permutation: NodePermutation,
}

/// Generates the experiment graphs for one (spec, trial) pair using the
/// documented per-trial seed derivation.
pub fn generate_experiment(spec: &TestSpec, trial: usize) -> GeneratedExperiment {
    let (gen_seed, pert_seed, scr_seed) = trial_seeds(spec.seed, trial);
    let truth = random_bipartite(&TestSpec {
        seed: gen_seed,
        ..*spec
    });
    let perturbed = perturb(&truth, spec.n1, spec.eta, spec.weighted, pert_seed);
    let (scrambled, permutation) = scramble(&perturbed, scr_seed);
    GeneratedExperiment {
        truth,
        perturbed,
        scrambled,
        permutation,
    }
}

struct TrialContext {
    /// Graph the methods actually run on (largest component if the
    /// scrambled graph is disconnected).
    g_run: Graph,
    /// Per-node true labels of `g_run`.
    true_part: Partition,
    /// Ground-truth adjacency restricted to the kept nodes, rows and
    /// columns sorted so the true set 1 comes first.
    a_true_aligned: DMatrix<f64>,
    /// Reindexing from `g_run` order to the aligned order above.
    align: NodePermutation,
    /// Counts of true labels among kept nodes.
    k1: usize,
    k2: usize,
}

fn build_trial_context(spec: &TestSpec, trial: usize) -> Result<TrialContext> {
    let exp = generate_experiment(spec, trial);
    let n = exp.scrambled.n();

    let keep: Vec<usize> = if exp.scrambled.is_connected() {
        (0..n).collect()
    } else {
        connected_components(&exp.scrambled).largest().to_vec()
    };
    let g_run = extract_subgraph(&exp.scrambled, &keep)?;

    let unscramble = exp.permutation.inverse();
    // block-order index of each kept node
    let block_idx: Vec<usize> = keep.iter().map(|&v| unscramble.apply(v)).collect();
    let labels: Vec<u8> = block_idx
        .iter()
        .map(|&b| if b < spec.n1 { 1 } else { 2 })
        .collect();
    let true_part = Partition::from_membership(labels.clone())?;
    let (k1, k2) = (true_part.n1, true_part.n2);

    // aligned order: set-1 nodes first, stable by block index
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by_key(|&l| (labels[l], block_idx[l]));
    let align = NodePermutation::from_ordering(&order)?;

    let k = keep.len();
    let a_true_aligned = DMatrix::from_fn(k, k, |r, s| {
        exp.truth.weight(block_idx[order[r]], block_idx[order[s]])
    });

    Ok(TrialContext {
        g_run,
        true_part,
        a_true_aligned,
        align,
        k1,
        k2,
    })
}

fn aligned(m: &DMatrix<f64>, align: &NodePermutation) -> DMatrix<f64> {
    let order = align.ordering();
    let k = order.len();
    DMatrix::from_fn(k, k, |r, s| m[(order[r], order[s])])
}

fn run_methods(
    ctx: &TrialContext,
    methods: &[Method],
    timing: bool,
) -> Result<Vec<(Method, QualityReport)>> {
    let eigh_start = Instant::now();
    let fact = eigh(&ctx.g_run.to_dense())?;
    let eigh_time = eigh_start.elapsed().as_secs_f64();

    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let report = match method {
            Method::Specbip | Method::SpecbipN1 => {
                let opts = if method == Method::SpecbipN1 {
                    BipartizeOptions {
                        cardinalities: Some((ctx.k1.max(ctx.k2), ctx.k1.min(ctx.k2))),
                        mode: RoundingMode::Binary,
                        ..Default::default()
                    }
                } else {
                    BipartizeOptions::default()
                };
                let bip = bipartize_with_factorization(&ctx.g_run, &fact, &opts)?;
                let out_fact = eigh(&bip.a_b)?;
                let b_s = bipartivity_from_values(&out_fact.values);
                let (e_b, e_a) = if ctx.k1 > 0 && ctx.k2 > 0 {
                    let a_b_aligned = aligned(&bip.a_b, &ctx.align);
                    match error_indices(&ctx.a_true_aligned, &a_b_aligned, ctx.k1, ctx.k2, None)
                    {
                        Ok((e_b, e_a)) => (Some(e_b), Some(e_a)),
                        Err(Error::EmptyCrossBlock) => (None, None),
                        Err(e) => return Err(e),
                    }
                } else {
                    (None, None)
                };
                let (e_n, e_n_count) = node_error(&ctx.true_part, &bip.partition)?;
                QualityReport {
                    i_b: 1.0 - b_s,
                    b_s,
                    e_b,
                    e_a,
                    e_n: Some(e_n),
                    e_n_count: Some(e_n_count),
                    frustration: frustration(&ctx.g_run, &bip.partition)?,
                    time_s: if timing {
                        eigh_time + start.elapsed().as_secs_f64()
                    } else {
                        0.0
                    },
                }
            }
            Method::RedBlack => {
                let (part, _, _) = red_black_order(&ctx.g_run, 0)?;
                // the baseline only reorders, so its output matrix is the
                // input graph; the bipartivity and block indices describe
                // that graph under the true blocks
                let b_s = bipartivity_from_values(&fact.values);
                let e_b = if ctx.k1 > 0 && ctx.k2 > 0 {
                    let g_aligned = aligned(&ctx.g_run.to_dense(), &ctx.align);
                    match error_indices(&ctx.a_true_aligned, &g_aligned, ctx.k1, ctx.k2, None) {
                        Ok((e_b, _)) => Some(e_b),
                        Err(Error::EmptyCrossBlock) => None,
                        Err(e) => return Err(e),
                    }
                } else {
                    None
                };
                let (e_n, e_n_count) = node_error(&ctx.true_part, &part)?;
                QualityReport {
                    i_b: 1.0 - b_s,
                    b_s,
                    e_b,
                    e_a: None,
                    e_n: Some(e_n),
                    e_n_count: Some(e_n_count),
                    frustration: frustration(&ctx.g_run, &part)?,
                    time_s: if timing {
                        start.elapsed().as_secs_f64()
                    } else {
                        0.0
                    },
                }
            }
        };
        rows.push((method, report));
    }
    Ok(rows)
}

/// Everything a bench run produces.
#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub csv: String,
    /// Per-trial failures, recorded instead of aborting the run.
    pub warnings: Vec<String>,
}

/// Runs the manifest and renders the CSV table. Rows appear in manifest
/// cell order, then method order; per-trial rows (when enabled) append the
/// trial index as a trailing column.
pub fn run_manifest(manifest: &BenchManifest) -> Result<BenchOutcome> {
    let jobs: Vec<(usize, usize)> = (0..manifest.cells.len())
        .flat_map(|c| (0..manifest.trials).map(move |t| (c, t)))
        .collect();

    let results: Vec<(usize, usize, Result<Vec<(Method, QualityReport)>>)> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let outcome = build_trial_context(&manifest.cells[c].spec, t)
                .and_then(|ctx| run_methods(&ctx, &manifest.methods, manifest.timing));
            (c, t, outcome)
        })
        .collect();

    let mut per_cell: Vec<Vec<Option<Vec<(Method, QualityReport)>>>> =
        vec![vec![None; manifest.trials]; manifest.cells.len()];
    let mut warnings = Vec::new();
    for (c, t, outcome) in results {
        match outcome {
            Ok(rows) => per_cell[c][t] = Some(rows),
            Err(e) => warnings.push(format!(
                "cell {} trial {}: {}",
                c, t, e
            )),
        }
    }

    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    if manifest.per_trial {
        csv.push_str(",trial");
    }
    csv.push('\n');

    for (c, cell) in manifest.cells.iter().enumerate() {
        let spec = &cell.spec;
        if manifest.per_trial {
            for (t, slot) in per_cell[c].iter().enumerate() {
                if let Some(rows) = slot {
                    for (method, report) in rows {
                        let row = csv_row(
                            spec.n1,
                            spec.n2,
                            spec.xi,
                            spec.eta,
                            spec.seed,
                            method.name(),
                            report,
                        );
                        csv.push_str(&row);
                        csv.push_str(&format!(",{}\n", t));
                    }
                }
            }
        } else {
            for &method in &manifest.methods {
                let mut agg = MeanAccumulator::default();
                for slot in per_cell[c].iter().flatten() {
                    if let Some((_, report)) = slot.iter().find(|(m, _)| *m == method) {
                        agg.add(report);
                    }
                }
                if let Some(mean) = agg.mean() {
                    let row = csv_row(
                        spec.n1,
                        spec.n2,
                        spec.xi,
                        spec.eta,
                        spec.seed,
                        method.name(),
                        &mean,
                    );
                    csv.push_str(&row);
                    csv.push('\n');
                }
            }
        }
    }
    Ok(BenchOutcome { csv, warnings })
}

#[derive(Default)]
struct MeanAccumulator {
    count: usize,
    i_b: f64,
    b_s: f64,
    e_b: Option<f64>,
    e_a: Option<f64>,
    e_n: Option<f64>,
    frustration: f64,
    time_s: f64,
}

impl MeanAccumulator {
    fn add(&mut self, r: &QualityReport) {
        self.count += 1;
        self.i_b += r.i_b;
        self.b_s += r.b_s;
        if let Some(v) = r.e_b {
            *self.e_b.get_or_insert(0.0) += v;
        }
        if let Some(v) = r.e_a {
            *self.e_a.get_or_insert(0.0) += v;
        }
        if let Some(v) = r.e_n {
            *self.e_n.get_or_insert(0.0) += v;
        }
        self.frustration += r.frustration;
        self.time_s += r.time_s;
    }

    fn mean(&self) -> Option<QualityReport> {
        if self.count == 0 {
            return None;
        }
        let k = self.count as f64;
        Some(QualityReport {
            i_b: self.i_b / k,
            b_s: self.b_s / k,
            e_b: self.e_b.map(|v| v / k),
            e_a: self.e_a.map(|v| v / k),
            e_n: self.e_n.map(|v| v / k),
            e_n_count: None,
            frustration: self.frustration / k,
            time_s: self.time_s / k,
        })
    }
}

/// Convenience wrapper: run the quality comparison for one cell and return
/// the per-method mean of a single metric, used by tests.
pub fn mean_metric(
    manifest: &BenchManifest,
    cell: usize,
    method: Method,
    metric: fn(&QualityReport) -> Option<f64>,
) -> Result<Option<f64>> {
    let mut acc = 0.0;
    let mut count = 0usize;
    for t in 0..manifest.trials {
        let ctx = build_trial_context(&manifest.cells[cell].spec, t)?;
        let rows = run_methods(&ctx, &[method], manifest.timing)?;
        if let Some(v) = metric(&rows[0].1) {
            acc += v;
            count += 1;
        }
    }
    Ok(if count == 0 {
        None
    } else {
        Some(acc / count as f64)
    })
}
