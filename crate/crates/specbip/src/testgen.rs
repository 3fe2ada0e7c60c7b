//! Seeded generation of random bipartite test graphs, diagonal-block
//! perturbations, and scrambling permutations.
//!
//! All randomness comes from ChaCha8, a portable counter-based generator:
//! the same spec produces bit-identical graphs on every platform. The
//! stream-splitting rule for benchmark trials lives in [`trial_seeds`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodePermutation};
use crate::{Error, Result};

/// Parameters of one random experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSpec {
    /// Size of the larger set.
    pub n1: usize,
    /// Size of the smaller set.
    pub n2: usize,
    /// Density of the cross block.
    pub xi: f64,
    /// Density of the diagonal-block perturbation.
    pub eta: f64,
    pub seed: u64,
    /// Draw weights uniformly from (0, 1] instead of using 1.
    pub weighted: bool,
}

impl TestSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n2 < 1 || self.n1 < self.n2 {
            return Err(Error::InvalidOptions(format!(
                "cardinalities must satisfy n1 >= n2 >= 1, got ({}, {})",
                self.n1, self.n2
            )));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::InvalidOptions(format!(
                "cross density must lie in (0, 1], got {}",
                self.xi
            )));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::InvalidOptions(format!(
                "perturbation density must lie in [0, 1), got {}",
                self.eta
            )));
        }
        Ok(())
    }

    /// Flat `key = value` block used in benchmark manifests and gen output.
    pub fn to_key_values(&self) -> String {
        format!(
            "n1 = {}\nn2 = {}\nxi = {:e}\neta = {:e}\nseed = {}\nweighted = {}\n",
            self.n1, self.n2, self.xi, self.eta, self.seed, self.weighted
        )
    }

    pub fn from_key_values(text: &str) -> Result<TestSpec> {
        let mut spec = TestSpec {
            n1: 0,
            n2: 0,
            xi: 0.0,
            eta: 0.0,
            seed: 0,
            weighted: false,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = parse_key_value(idx + 1, line)?;
            match key.as_str() {
                "n1" => spec.n1 = parse_field(idx + 1, &value)?,
                "n2" => spec.n2 = parse_field(idx + 1, &value)?,
                "xi" => spec.xi = parse_field(idx + 1, &value)?,
                "eta" => spec.eta = parse_field(idx + 1, &value)?,
                "seed" => spec.seed = parse_field(idx + 1, &value)?,
                "weighted" => spec.weighted = parse_field(idx + 1, &value)?,
                other => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("unknown key {:?}", other),
                    })
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub(crate) fn parse_key_value(line: usize, text: &str) -> Result<(String, String)> {
    match text.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_ascii_lowercase(), v.trim().to_string())),
        None => Err(Error::Parse {
            line,
            msg: format!("expected `key = value`, got {:?}", text),
        }),
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(line: usize, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {:?}", value),
    })
}

fn draw_weight(rng: &mut ChaCha8Rng, weighted: bool) -> f64 {
    if weighted {
        // uniform on (0, 1]
        1.0 - rng.gen::<f64>()
    } else {
        1.0
    }
}

/// Builds a random bipartite graph in block order: nodes `0..n1` form set 1
/// and `n1..n1+n2` set 2. Each of the `n1 * n2` cross entries is present
/// independently with probability `xi`; one extra entry is added to any row
/// or column of the cross block that came out empty, so no node is
/// isolated. Deterministic for a fixed spec.
pub fn random_bipartite(spec: &TestSpec) -> Graph {
    spec.validate().expect("valid spec");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n1, n2) = (spec.n1, spec.n2);
    let mut edges = Vec::new();
    let mut row_count = vec![0usize; n1];
    let mut col_count = vec![0usize; n2];
    for i in 0..n1 {
        for j in 0..n2 {
            if rng.gen::<f64>() < spec.xi {
                edges.push((i, n1 + j, draw_weight(&mut rng, spec.weighted)));
                row_count[i] += 1;
                col_count[j] += 1;
            }
        }
    }
    for i in 0..n1 {
        if row_count[i] == 0 {
            let j = rng.gen_range(0..n2);
            edges.push((i, n1 + j, draw_weight(&mut rng, spec.weighted)));
            col_count[j] += 1;
        }
    }
    for j in 0..n2 {
        if col_count[j] == 0 {
            let i = rng.gen_range(0..n1);
            edges.push((i, n1 + j, draw_weight(&mut rng, spec.weighted)));
        }
    }
    Graph::from_edges(n1 + n2, edges).expect("generated edges are valid")
}

/// Adds symmetric edges inside the two diagonal blocks of a block-ordered
/// bipartite graph, each unordered pair independently with probability
/// `eta`. The cross block is untouched.
pub fn perturb(g: &Graph, n1: usize, eta: f64, weighted: bool, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&eta), "perturbation density in [0, 1]");
    if eta == 0.0 {
        return g.clone();
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> =
        g.entries().iter().copied().collect();
    let block = |lo: usize, hi: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<_>| {
        for i in lo..hi {
            for j in (i + 1)..hi {
                if rng.gen::<f64>() < eta {
                    edges.push((i, j, draw_weight(rng, weighted)));
                }
            }
        }
    };
    block(0, n1, &mut rng, &mut edges);
    block(n1, n, &mut rng, &mut edges);
    Graph::from_edges(n, edges).expect("perturbed edges are valid")
}

/// Applies a uniformly random node permutation (Fisher-Yates) to the graph
/// and returns it together with the permutation, so callers can undo the
/// scrambling: `permute(scrambled, p.inverse())` restores the input.
pub fn scramble(g: &Graph, seed: u64) -> (Graph, NodePermutation) {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let p = NodePermutation::from_ordering(&order).expect("shuffle is a bijection");
    let scrambled = crate::graph::permute(g, &p).expect("sizes match");
    (scrambled, p)
}

/// Stream-splitting rule for benchmark trials: trial `t` of a cell with
/// base seed `s` reads three 64-bit values from ChaCha8 stream `t + 1`
/// seeded with `s`, used as the generation, perturbation, and scrambling
/// seeds in that order.
pub fn trial_seeds(seed: u64, trial: usize) -> (u64, u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    (rng.gen::<u64>(), rng.gen::<u64>(), rng.gen::<u64>())
}
