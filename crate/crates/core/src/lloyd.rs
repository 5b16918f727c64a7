//! Lloyd's algorithm: alternate nearest-centroid assignment and mean update.

use crate::error::{invalid, Error, Result};
use crate::geometry::{assign_nearest, Assignment};
use crate::matrix::{Codebook, DataMatrix};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    /// Relative Frobenius-norm centroid shift below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LloydConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl LloydConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(invalid(
                "tol",
                format!("must be finite and >= 0, got {}", self.tol),
            ));
        }
        if self.max_iter < 1 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult<T> {
    pub codebook: Codebook<T>,
    pub sse: f64,
    /// Number of mean updates performed.
    pub iterations: usize,
    pub converged: bool,
    /// Number of empty Voronoi sets that were repaired along the way.
    pub empty_repairs: usize,
}

/// Runs Lloyd iterations from `init` until the relative centroid shift drops
/// below `cfg.tol` or `cfg.max_iter` updates have been made.
pub fn lloyd_fit<T: Scalar>(
    x: &DataMatrix<T>,
    init: &Codebook<T>,
    cfg: &LloydConfig,
) -> Result<LloydResult<T>> {
    cfg.validate()?;
    if init.k() > x.n() {
        return Err(Error::TooManyCentroids {
            k: init.k(),
            n: x.n(),
        });
    }
    let mut codebook = init.clone();
    let mut assignment = assign_nearest(x, &codebook)?;
    let mut iterations = 0;
    let mut converged = false;
    let mut empty_repairs = 0;

    while iterations < cfg.max_iter {
        let (next, repaired) = update_means(x, &codebook, &assignment);
        iterations += 1;
        empty_repairs += repaired;
        let shift = frobenius_distance(&next, &codebook);
        let scale = frobenius_norm(&codebook).max(f64::EPSILON);
        codebook = next;
        assignment = assign_nearest(x, &codebook)?;
        if shift == 0.0 || shift / scale < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(LloydResult {
        sse: assignment.sse(),
        codebook,
        iterations,
        converged,
        empty_repairs,
    })
}

/// Mean of every Voronoi set. A centroid whose set is empty is moved onto the
/// point with the largest current `d1` (lowest index among equals); several
/// empty sets take successive points in that order.
fn update_means<T: Scalar>(
    x: &DataMatrix<T>,
    codebook: &Codebook<T>,
    assignment: &Assignment<T>,
) -> (Codebook<T>, usize) {
    let (k, d) = (codebook.k(), codebook.dim());
    let mut sums = vec![0.0f64; k * d];
    let mut counts = vec![0usize; k];
    for (p, &j) in x.rows().zip(&assignment.nearest) {
        counts[j] += 1;
        for (s, &v) in sums[j * d..(j + 1) * d].iter_mut().zip(p) {
            *s += v.to_acc();
        }
    }

    let values = sums
        .chunks_exact(d)
        .zip(&counts)
        .flat_map(|(s, &cnt)| {
            s.iter().map(move |&v| {
                if cnt > 0 {
                    T::from_acc(v / cnt as f64)
                } else {
                    T::zero()
                }
            })
        })
        .collect();
    let mut next = Codebook::from_parts_unchecked(values, k, d);

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() {
        let mut order: Vec<usize> = (0..x.n()).collect();
        order.sort_by(|&a, &b| {
            assignment.d1[b]
                .partial_cmp(&assignment.d1[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for (&j, &i) in empty.iter().zip(&order) {
            next.row_mut(j).copy_from_slice(x.row(i));
        }
    }
    (next, empty.len())
}

fn frobenius_distance<T: Scalar>(a: &Codebook<T>, b: &Codebook<T>) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&u, &v)| {
            let diff = (u - v).to_acc();
            diff * diff
        })
        .sum::<f64>()
        .sqrt()
}

fn frobenius_norm<T: Scalar>(a: &Codebook<T>) -> f64 {
    a.as_slice()
        .iter()
        .map(|&v| v.to_acc() * v.to_acc())
        .sum::<f64>()
        .sqrt()
}
