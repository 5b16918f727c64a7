//! Initial codebooks: uniform random rows, k-means++ D² sampling, or an
//! explicit codebook, followed by Lloyd and best-of-`n_init` selection.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::squared_distance;
use crate::lloyd::{lloyd_fit, LloydConfig, LloydResult};
use crate::matrix::{Codebook, DataMatrix};
use crate::rng::{label, stream};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init<T> {
    #[default]
    KMeansPlusPlus,
    Random,
    Explicit(Codebook<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedConfig<T> {
    pub init: Init<T>,
    pub n_init: usize,
    pub rng_seed: u64,
}

impl<T> Default for SeedConfig<T> {
    fn default() -> Self {
        Self {
            init: Init::KMeansPlusPlus,
            n_init: 10,
            rng_seed: 0,
        }
    }
}

fn check_k<T: Scalar>(x: &DataMatrix<T>, k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if k > x.n() {
        return Err(Error::TooManyCentroids { k, n: x.n() });
    }
    Ok(())
}

/// `k` distinct data rows drawn uniformly without replacement.
pub fn random_seed<T: Scalar, R: Rng + ?Sized>(
    x: &DataMatrix<T>,
    k: usize,
    rng: &mut R,
) -> Result<Codebook<T>> {
    check_k(x, k)?;
    let picked = sample(rng, x.n(), k).into_vec();
    Codebook::from_data_rows(x, &picked)
}

/// k-means++ seeding with a uniformly drawn first centroid.
pub fn kmeanspp_seed<T: Scalar, R: Rng + ?Sized>(
    x: &DataMatrix<T>,
    k: usize,
    rng: &mut R,
) -> Result<Codebook<T>> {
    check_k(x, k)?;
    let first = rng.random_range(0..x.n());
    kmeanspp_seed_from(x, k, first, rng)
}

/// k-means++ seeding starting from data row `first`.
///
/// Each further centroid is the data row `i` drawn with probability
/// `D(i)² / Σ D²`, where `D` is the distance to the nearest chosen centroid.
/// If every `D` is zero before `k` rows are chosen, the remaining rows are
/// drawn uniformly among those not chosen yet.
pub fn kmeanspp_seed_from<T: Scalar, R: Rng + ?Sized>(
    x: &DataMatrix<T>,
    k: usize,
    first: usize,
    rng: &mut R,
) -> Result<Codebook<T>> {
    check_k(x, k)?;
    if first >= x.n() {
        return Err(invalid("first", format!("row {first} out of range")));
    }
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; x.n()];
    let mut weights: Vec<f64> = x
        .rows()
        .map(|p| squared_distance(p, x.row(first)).to_acc())
        .collect();
    chosen.push(first);
    taken[first] = true;
    weights[first] = 0.0;

    while chosen.len() < k {
        let next = draw_d2(&weights, rng).unwrap_or_else(|| {
            let free: Vec<usize> = (0..x.n()).filter(|&i| !taken[i]).collect();
            free[rng.random_range(0..free.len())]
        });
        chosen.push(next);
        taken[next] = true;
        let c = x.row(next);
        for (w, p) in weights.iter_mut().zip(x.rows()) {
            let dist = squared_distance(p, c).to_acc();
            if dist < *w {
                *w = dist;
            }
        }
        weights[next] = 0.0;
    }
    Codebook::from_data_rows(x, &chosen)
}

/// Inverse-CDF draw over non-negative weights; `None` when all are zero.
fn draw_d2<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    // rounding left target at or above the running sum
    last_positive
}

/// Builds one initial codebook according to `init`.
pub fn initial_codebook<T: Scalar, R: Rng + ?Sized>(
    x: &DataMatrix<T>,
    k: usize,
    init: &Init<T>,
    rng: &mut R,
) -> Result<Codebook<T>> {
    match init {
        Init::KMeansPlusPlus => kmeanspp_seed(x, k, rng),
        Init::Random => random_seed(x, k, rng),
        Init::Explicit(c) => {
            if c.k() != k {
                return Err(invalid(
                    "init",
                    format!("explicit codebook has {} centroids, expected {k}", c.k()),
                ));
            }
            if c.dim() != x.dim() {
                return Err(Error::DimensionMismatch {
                    data: x.dim(),
                    codebook: c.dim(),
                });
            }
            check_k(x, k)?;
            Ok(c.clone())
        }
    }
}

/// Seeds and runs Lloyd `n_init` times, returning the lowest-SSE result
/// (lowest run index among equal SSEs). Run `r` draws from
/// `stream(rng_seed, [SEEDING, r])`; an explicit codebook is fitted once.
pub fn seed_and_fit<T: Scalar>(
    x: &DataMatrix<T>,
    k: usize,
    cfg: &SeedConfig<T>,
    lloyd: &LloydConfig,
) -> Result<LloydResult<T>> {
    if cfg.n_init < 1 {
        return Err(invalid("n_init", "must be at least 1"));
    }
    lloyd.validate()?;
    let runs = match cfg.init {
        Init::Explicit(_) => 1,
        _ => cfg.n_init,
    };
    let results: Vec<Result<LloydResult<T>>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(cfg.rng_seed, &[label::SEEDING, r as u64]);
            let init = initial_codebook(x, k, &cfg.init, &mut rng)?;
            lloyd_fit(x, &init, lloyd)
        })
        .collect();

    let mut best: Option<LloydResult<T>> = None;
    for result in results {
        let result = result?;
        if best.as_ref().is_none_or(|b| result.sse < b.sse) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one run"))
}
