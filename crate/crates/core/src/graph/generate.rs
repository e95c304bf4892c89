use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{Edge, Graph, WeightedGraph};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Number of unordered vertex pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Pair code `v(v-1)/2 + u` (with `u < v`) back to the pair.
fn decode_pair(code: usize) -> Edge {
    // Largest v with v(v-1)/2 <= code, corrected for float rounding.
    let mut v = ((1.0 + (1.0 + 8.0 * code as f64).sqrt()) / 2.0) as usize;
    while v * (v - 1) / 2 > code {
        v -= 1;
    }
    while (v + 1) * v / 2 <= code {
        v += 1;
    }
    (code - v * (v - 1) / 2, v)
}

/// Uniform random graph `G(n, m)` with its edges in uniformly random order.
///
/// Edges are the first `m` positions of a lazily materialized Fisher-Yates
/// shuffle of all pair codes, so for `m' < m` the call with `m'` and the same
/// seed returns exactly the `m'`-prefix of the call with `m`.
pub fn gen_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let total = pair_count(n);
    if m > total {
        return Err(Error::invalid(format!(
            "m = {m} exceeds the {total} vertex pairs of n = {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok(gnm_with(n, m, &mut rng))
}

pub(crate) fn gnm_with<R: Rng>(n: usize, m: usize, rng: &mut R) -> Graph {
    let total = pair_count(n);
    debug_assert!(m <= total);
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * m);
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let j = rng.gen_range(i..total);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        edges.push(decode_pair(at_j));
    }
    Graph { n, edges }
}

/// Binomial random graph `G(n, p)`, edges in pair-code order.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok(gnp_with(n, p, &mut rng))
}

pub(crate) fn gnp_with<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let total = pair_count(n);
    let mut edges = Vec::new();
    if p <= 0.0 {
        return Graph { n, edges };
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }
    edges.reserve((total as f64 * p * 1.1) as usize + 16);
    // Geometric gaps between successive present pairs.
    let log_q = (-p).ln_1p();
    let mut code: usize = 0;
    loop {
        let r: f64 = rng.gen();
        let gap = ((-r).ln_1p() / log_q).floor();
        if !gap.is_finite() || gap >= (total - code) as f64 {
            break;
        }
        code += gap as usize;
        edges.push(decode_pair(code));
        code += 1;
        if code >= total {
            break;
        }
    }
    Graph { n, edges }
}

/// Edge-weight law. Each kind has a linear density slope at zero,
/// `P[X <= eps] ~ slope * eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDistribution {
    Uniform01,
    Uniform { upper: f64 },
    Exponential { rate: f64 },
}

impl WeightDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightDistribution::Uniform01 => Ok(()),
            WeightDistribution::Uniform { upper } if upper.is_finite() && upper > 0.0 => Ok(()),
            WeightDistribution::Exponential { rate } if rate.is_finite() && rate > 0.0 => Ok(()),
            other => Err(Error::invalid(format!("bad weight distribution {other}"))),
        }
    }

    /// The constant `a` with `P[X <= eps] ~ a * eps` as `eps -> 0+`.
    pub fn density_slope(&self) -> f64 {
        match *self {
            WeightDistribution::Uniform01 => 1.0,
            WeightDistribution::Uniform { upper } => 1.0 / upper,
            WeightDistribution::Exponential { rate } => rate,
        }
    }

    /// Inverse CDF at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            WeightDistribution::Uniform01 => u,
            WeightDistribution::Uniform { upper } => upper * u,
            WeightDistribution::Exponential { rate } => -(-u).ln_1p() / rate,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen())
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDistribution::Uniform01 => write!(f, "uniform01"),
            WeightDistribution::Uniform { upper } => write!(f, "uniform:{upper}"),
            WeightDistribution::Exponential { rate } => write!(f, "exp:{rate}"),
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    /// Accepts `uniform01`, `uniform:<b>` and `exp:<rate>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let param = |rest: &str| -> Result<f64> {
            rest.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad distribution parameter in {s:?}")))
        };
        let dist = if s == "uniform01" {
            WeightDistribution::Uniform01
        } else if let Some(rest) = s.strip_prefix("uniform:") {
            WeightDistribution::Uniform {
                upper: param(rest)?,
            }
        } else if let Some(rest) = s.strip_prefix("exp:") {
            WeightDistribution::Exponential { rate: param(rest)? }
        } else {
            return Err(Error::invalid(format!("unknown distribution {s:?}")));
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Complete graph with i.i.d. weights, edges sorted by `(weight, pair code)`.
///
/// The first `m` edges of the result form a `G(n, m)` sample in uniformly
/// random order.
pub fn gen_weighted_complete(
    n: usize,
    dist: WeightDistribution,
    seed: u64,
) -> Result<WeightedGraph> {
    let mut rng = rng_from_seed(seed);
    weighted_complete_with(n, dist, &mut rng)
}

pub(crate) fn weighted_complete_with<R: Rng>(
    n: usize,
    dist: WeightDistribution,
    rng: &mut R,
) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(Error::invalid("complete graph needs n >= 1"));
    }
    dist.validate()?;
    let total = pair_count(n);
    let mut keyed: Vec<(f64, usize)> = (0..total).map(|code| (dist.sample(rng), code)).collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let edges = keyed.iter().map(|&(_, code)| decode_pair(code)).collect();
    let weights = keyed.into_iter().map(|(w, _)| w).collect();
    Ok(WeightedGraph {
        graph: Graph { n, edges },
        weights,
    })
}
