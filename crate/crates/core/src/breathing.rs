//! Breathing k-means.
//!
//! Starting from a k-means++ solution, each breathing cycle inserts `m`
//! centroids next to the centroids with the largest error ("breathe in"),
//! runs Lloyd on the enlarged codebook, deletes the `m` centroids of lowest
//! utility while freezing the close neighbours of every deleted centroid
//! ("breathe out"), and runs Lloyd again. A cycle that fails to lower the
//! best SSE by the relative amount `tol` decrements `m`; the loop ends when
//! `m` reaches zero and the best codebook seen is returned.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{centroid_errors, centroid_stats, distance, mean_nn_distance};
use crate::lloyd::{lloyd_fit, LloydConfig, LloydResult, DEFAULT_TOL};
use crate::matrix::{Codebook, DataMatrix};
use crate::rng::{label, stream};
use crate::scalar::Scalar;
use crate::seeding::{seed_and_fit, SeedConfig};

pub const DEFAULT_M: usize = 5;
pub const DEFAULT_THETA: f64 = 1.1;
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct BreathingConfig<T> {
    /// Initial breathing depth.
    pub m0: usize,
    /// Freezing range, relative to the mean nearest-neighbour distance
    /// between centroids.
    pub theta: f64,
    /// Minimum relative SSE decrease for a cycle to count as an improvement.
    pub tol: f64,
    /// Offset scale for inserted centroids, relative to the RMS quantization
    /// error.
    pub epsilon: f64,
    pub lloyd: LloydConfig,
    /// Seeding; `seeding.rng_seed` also drives the breathe-in offsets.
    pub seeding: SeedConfig<T>,
}

impl<T> Default for BreathingConfig<T> {
    fn default() -> Self {
        Self {
            m0: DEFAULT_M,
            theta: DEFAULT_THETA,
            tol: DEFAULT_TOL,
            epsilon: DEFAULT_EPSILON,
            lloyd: LloydConfig::default(),
            seeding: SeedConfig::default(),
        }
    }
}

impl<T> BreathingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || self.theta <= 0.0 {
            return Err(invalid("theta", format!("must be > 0, got {}", self.theta)));
        }
        if !self.tol.is_finite() || self.tol < 0.0 {
            return Err(invalid("tol", format!("must be >= 0, got {}", self.tol)));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(invalid(
                "epsilon",
                format!("must be > 0, got {}", self.epsilon),
            ));
        }
        if self.seeding.n_init < 1 {
            return Err(invalid("n_init", "must be at least 1"));
        }
        self.lloyd.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub codebook: Codebook<T>,
    pub sse: f64,
    /// SSE of the k-means++ (or other seeding) solution the cycles started from.
    pub seeding_sse: f64,
    pub breathing_cycles: usize,
    /// Lloyd iterations summed over seeding and every breathing cycle.
    pub lloyd_iterations_total: usize,
    pub wall_time: Duration,
    pub rng_seed: u64,
}

/// Adds `m` centroids: copies of the `m` highest-error centroids (lowest index
/// first among equal errors), each shifted by its own random offset
/// `epsilon * sqrt(SSE / n) * u` with `u` uniform on `[-0.5, 0.5]^d`.
pub fn breathe_in<T: Scalar, R: Rng + ?Sized>(
    x: &DataMatrix<T>,
    c: &Codebook<T>,
    m: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<Codebook<T>> {
    if m < 1 {
        return Err(invalid("m", "must be at least 1"));
    }
    if m > c.k() {
        return Err(invalid(
            "m",
            format!("cannot copy {m} of {} centroids", c.k()),
        ));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(invalid("epsilon", "must be > 0"));
    }
    let errors = centroid_errors(x, c)?;
    let total: f64 = errors.iter().sum();
    let scale = epsilon * (total / x.n() as f64).sqrt();

    let mut order: Vec<usize> = (0..c.k()).collect();
    order.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]));

    let mut out = c.clone();
    let mut row = vec![T::zero(); c.dim()];
    for &src in &order[..m] {
        let source = c.row(src);
        // a perfect fit leaves no error to scale by; jitter at rounding level
        let s = if scale > 0.0 {
            scale
        } else {
            let mag = source
                .iter()
                .fold(1.0f64, |acc, v| acc.max(v.to_acc().abs()));
            4.0 * T::epsilon().to_acc() * mag
        };
        for (dst, &v) in row.iter_mut().zip(source) {
            let u = rng.random::<f64>() - 0.5;
            *dst = v + T::from_acc(s * u);
        }
        out.push(&row)?;
    }
    Ok(out)
}

/// Outcome of a breathe-out step with the bookkeeping used to select deletions.
#[derive(Debug, Clone, PartialEq)]
pub struct BreatheOut<T> {
    pub codebook: Codebook<T>,
    /// Deleted centroid indices, in selection order.
    pub deleted: Vec<usize>,
    pub frozen: Vec<usize>,
    /// Neighbourhood radius `theta * mean_nn_distance`.
    pub kappa: f64,
    /// True if some neighbour within `kappa` of a deleted centroid was left
    /// unfrozen because the frozen set had reached `k - m`.
    pub guard_fired: bool,
}

/// Deletes `m` centroids, see [`breathe_out_detailed`].
pub fn breathe_out<T: Scalar>(
    x: &DataMatrix<T>,
    c: &Codebook<T>,
    m: usize,
    theta: f64,
) -> Result<Codebook<T>> {
    Ok(breathe_out_detailed(x, c, m, theta)?.codebook)
}

/// Deletes `m` low-utility centroids with neighbourhood freezing.
///
/// Centroids are visited in ascending utility order (lowest index first among
/// equal utilities). A visited centroid that is not frozen is deleted, and
/// every surviving centroid closer than `kappa` to it is frozen, nearest
/// first, as long as fewer than `k - m` centroids are frozen.
pub fn breathe_out_detailed<T: Scalar>(
    x: &DataMatrix<T>,
    c: &Codebook<T>,
    m: usize,
    theta: f64,
) -> Result<BreatheOut<T>> {
    let k = c.k();
    if m < 1 || m >= k {
        return Err(invalid(
            "m",
            format!("need 1 <= m < k, got m = {m}, k = {k}"),
        ));
    }
    if theta.is_nan() || theta <= 0.0 {
        return Err(invalid("theta", "must be > 0"));
    }
    let stats = centroid_stats(x, c)?;
    let kappa = theta * mean_nn_distance(c)?;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| stats.utility[a].total_cmp(&stats.utility[b]));

    let mut deleted = Vec::with_capacity(m);
    let mut is_deleted = vec![false; k];
    let mut frozen = Vec::new();
    let mut is_frozen = vec![false; k];
    let mut guard_fired = false;

    for &i in &order {
        if is_frozen[i] {
            continue;
        }
        is_deleted[i] = true;
        deleted.push(i);

        let mut neighbours: Vec<(f64, usize)> = (0..k)
            .filter(|&j| j != i && !is_deleted[j] && !is_frozen[j])
            .map(|j| (distance(c.row(i), c.row(j)).to_acc(), j))
            .filter(|&(dist, _)| dist < kappa)
            .collect();
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, j) in neighbours {
            if frozen.len() + m < k {
                is_frozen[j] = true;
                frozen.push(j);
            } else {
                guard_fired = true;
            }
        }

        if deleted.len() == m {
            break;
        }
    }

    if deleted.len() < m {
        // cannot happen: at most k - m are frozen, so m remain deletable
        return Err(Error::TooFewCentroids { required: m, k });
    }
    Ok(BreatheOut {
        codebook: c.without(&is_deleted)?,
        deleted,
        frozen,
        kappa,
        guard_fired,
    })
}

/// Breathing depth actually used: the enlarged codebook must neither copy
/// more centroids than exist nor exceed the number of data points.
pub fn effective_depth(m0: usize, k: usize, n: usize) -> usize {
    m0.min(k).min(n.saturating_sub(k))
}

/// Full breathing k-means: seeding followed by breathing cycles.
pub fn bkm_fit<T: Scalar>(
    x: &DataMatrix<T>,
    k: usize,
    cfg: &BreathingConfig<T>,
) -> Result<FitResult<T>> {
    cfg.validate()?;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if k > x.n() {
        return Err(Error::TooManyCentroids { k, n: x.n() });
    }
    let start = Instant::now();
    let seeded = seed_and_fit(x, k, &cfg.seeding, &cfg.lloyd)?;
    let mut result = breathe_from(x, seeded, cfg)?;
    result.wall_time = start.elapsed();
    Ok(result)
}

/// Breathing cycles starting from an already fitted codebook.
///
/// `wall_time` covers the cycles only. With `k = 1` or an effective depth
/// of zero the seeded solution is returned unchanged.
pub fn breathe_from<T: Scalar>(
    x: &DataMatrix<T>,
    seeded: LloydResult<T>,
    cfg: &BreathingConfig<T>,
) -> Result<FitResult<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let k = seeded.codebook.k();
    let mut result = FitResult {
        sse: seeded.sse,
        seeding_sse: seeded.sse,
        breathing_cycles: 0,
        lloyd_iterations_total: seeded.iterations,
        wall_time: Duration::ZERO,
        rng_seed: cfg.seeding.rng_seed,
        codebook: seeded.codebook,
    };
    if k == 1 {
        return Ok(result);
    }

    let mut rng = stream(cfg.seeding.rng_seed, &[label::BREATHING]);
    let mut m = effective_depth(cfg.m0, k, x.n());
    let mut current = result.codebook.clone();
    while m > 0 {
        result.breathing_cycles += 1;
        let enlarged = breathe_in(x, &current, m, cfg.epsilon, &mut rng)?;
        let grown = lloyd_fit(x, &enlarged, &cfg.lloyd)?;
        let reduced = breathe_out(x, &grown.codebook, m, cfg.theta)?;
        let shrunk = lloyd_fit(x, &reduced, &cfg.lloyd)?;
        result.lloyd_iterations_total += grown.iterations + shrunk.iterations;

        if shrunk.sse < result.sse * (1.0 - cfg.tol) {
            result.sse = shrunk.sse;
            result.codebook = shrunk.codebook.clone();
        } else {
            m -= 1;
        }
        current = shrunk.codebook;
    }
    result.wall_time = start.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{assign, sse};
    use crate::seeding::Init;

    fn line(v: &[f64]) -> DataMatrix<f64> {
        DataMatrix::new(v.to_vec(), v.len(), 1).unwrap()
    }

    fn book(v: &[f64]) -> Codebook<f64> {
        Codebook::new(v.to_vec(), v.len(), 1).unwrap()
    }

    #[test]
    fn breathe_in_copies_highest_error_centroid() {
        let x = line(&[0.0, 1.0, 5.0]);
        let c = book(&[0.0, 5.0]);
        let out = breathe_in(&x, &c, 1, 0.01, &mut stream(1, &[])).unwrap();
        assert_eq!(out.k(), 3);
        assert_eq!(&out.as_slice()[..2], &[0.0, 5.0]);
        let bound = 0.01 * (1.0f64 / 3.0).sqrt() / 2.0;
        let added = out.row(2)[0];
        assert!(added != 0.0 && added.abs() <= bound, "{added}");
    }

    #[test]
    fn breathe_in_breaks_error_ties_by_index() {
        let x = line(&[-1.0, 1.0, 9.0, 11.0, 19.0, 21.0]);
        let c = book(&[0.0, 10.0, 20.0]);
        let out = breathe_in(&x, &c, 2, 0.01, &mut stream(2, &[])).unwrap();
        assert!((out.row(3)[0] - 0.0).abs() < 0.01);
        assert!((out.row(4)[0] - 10.0).abs() < 0.01);
    }

    #[test]
    fn breathe_in_offsets_are_independent_and_bounded() {
        let x = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [4.0, 0.0], [5.0, 1.0]]).unwrap();
        let c = Codebook::from_rows(&[[0.5, 0.5], [4.5, 0.5]]).unwrap();
        let delta = (sse(&x, &c).unwrap() / 4.0).sqrt();
        let out = breathe_in(&x, &c, 2, 0.5, &mut stream(3, &[])).unwrap();
        let off0: Vec<f64> = out
            .row(2)
            .iter()
            .zip(c.row(0))
            .map(|(a, b)| a - b)
            .collect();
        let off1: Vec<f64> = out
            .row(3)
            .iter()
            .zip(c.row(1))
            .map(|(a, b)| a - b)
            .collect();
        assert_ne!(off0, off1);
        for v in off0.iter().chain(&off1) {
            assert!(v.abs() <= 0.5 * delta * 0.5);
        }
    }

    #[test]
    fn breathe_in_with_zero_error_still_moves() {
        let x = line(&[1.0, 2.0]);
        let c = book(&[1.0, 2.0]);
        let out = breathe_in(&x, &c, 1, 0.01, &mut stream(4, &[])).unwrap();
        assert_eq!(out.k(), 3);
        assert!(out.row(2)[0].is_finite());
        assert!(breathe_in(&x, &c, 0, 0.01, &mut stream(4, &[])).is_err());
        assert!(breathe_in(&x, &c, 3, 0.01, &mut stream(4, &[])).is_err());
    }

    #[test]
    fn breathe_out_keeps_one_per_pair() {
        let pts = [0.0, 0.1, 10.0, 10.1];
        let x = line(&pts);
        let c = book(&pts);
        let r = breathe_out_detailed(&x, &c, 2, 1.1).unwrap();
        assert!((r.kappa - 0.11).abs() < 1e-12);
        assert_eq!(r.codebook.as_slice(), &[0.1, 10.1]);
        assert!(!r.guard_fired);
    }

    #[test]
    fn breathe_out_minimal_case() {
        let x = line(&[0.0, 1.0, 2.0, 10.0]);
        let c = book(&[1.0, 10.0]);
        // utilities: centroid 0 -> 81+100+64-(1+0+1)=243, centroid 1 -> 81
        assert_eq!(breathe_out(&x, &c, 1, 1.1).unwrap().as_slice(), &[1.0]);
        let x = line(&[0.0, 4.0]);
        let c = book(&[0.0, 4.0]);
        assert_eq!(breathe_out(&x, &c, 1, 1.1).unwrap().as_slice(), &[4.0]);
        assert!(breathe_out(&x, &c, 2, 1.1).is_err());
    }

    #[test]
    fn duplicate_pair_loses_only_one_member() {
        // cluster A around 0 with a coincident centroid pair, cluster B at 100
        let x = line(&[-1.0, -0.5, 0.0, 0.5, 1.0, 99.0, 99.5, 100.0, 100.5, 101.0]);
        let c = book(&[0.0, 0.0, 99.5, 100.5]);
        let r = breathe_out_detailed(&x, &c, 1, 1.1).unwrap();
        assert_eq!(r.deleted.len(), 1);
        let kept = r.codebook.as_slice();
        assert_eq!(kept.iter().filter(|&&v| v == 0.0).count(), 1);

        let r = breathe_out_detailed(&x, &c, 2, 1.1).unwrap();
        let kept = r.codebook.as_slice();
        assert_eq!(kept.iter().filter(|&&v| v == 0.0).count(), 1, "{kept:?}");
    }

    #[test]
    fn guard_stops_freezing() {
        // huge theta freezes everything near; the guard must leave m deletable
        let x = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let c = book(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let r = breathe_out_detailed(&x, &c, 2, 100.0).unwrap();
        assert_eq!(r.deleted.len(), 2);
        assert_eq!(r.codebook.k(), 3);
        assert!(r.guard_fired);
        assert!(r.frozen.len() <= 3);
    }

    fn blobs() -> DataMatrix<f64> {
        let mut rows = Vec::new();
        for (cx, cy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)] {
            for i in 0..25 {
                let a = i as f64 * 0.7;
                rows.push([
                    cx + a.cos() * (i % 5) as f64 * 0.3,
                    cy + a.sin() * (i / 5) as f64 * 0.3,
                ]);
            }
        }
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn zero_depth_returns_seeding() {
        let x = blobs();
        let mut cfg = BreathingConfig::<f64>::default();
        cfg.seeding.rng_seed = 11;
        cfg.m0 = 0;
        let r = bkm_fit(&x, 6, &cfg).unwrap();
        let s = seed_and_fit(&x, 6, &cfg.seeding, &cfg.lloyd).unwrap();
        assert_eq!(r.sse, s.sse);
        assert_eq!(r.codebook, s.codebook);
        assert_eq!(r.breathing_cycles, 0);
    }

    #[test]
    fn single_centroid_returns_seeding() {
        let x = blobs();
        let cfg = BreathingConfig::<f64>::default();
        let r = bkm_fit(&x, 1, &cfg).unwrap();
        let s = seed_and_fit(&x, 1, &cfg.seeding, &cfg.lloyd).unwrap();
        assert_eq!(r.codebook, s.codebook);
        assert_eq!(r.breathing_cycles, 0);
    }

    #[test]
    fn fit_never_worse_than_seeding_and_deterministic() {
        let x = blobs();
        for seed in 0..5 {
            let mut cfg = BreathingConfig::<f64>::default();
            cfg.seeding.rng_seed = seed;
            cfg.seeding.n_init = 1;
            let r = bkm_fit(&x, 9, &cfg).unwrap();
            assert!(r.sse <= r.seeding_sse);
            assert_eq!(r.sse, sse(&x, &r.codebook).unwrap());
            assert_eq!(r.codebook.k(), 9);
            assert!(r.breathing_cycles >= cfg.m0);
            let again = bkm_fit(&x, 9, &cfg).unwrap();
            assert_eq!(again.codebook, r.codebook);
            assert_eq!(again.sse, r.sse);
            assert_eq!(again.breathing_cycles, r.breathing_cycles);
        }
    }

    #[test]
    fn depth_is_clamped_to_available_points() {
        assert_eq!(effective_depth(5, 3, 100), 3);
        assert_eq!(effective_depth(5, 10, 12), 2);
        assert_eq!(effective_depth(5, 10, 10), 0);
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let cfg = BreathingConfig::<f64>::default();
        let r = bkm_fit(&x, 3, &cfg).unwrap();
        assert_eq!(r.codebook.k(), 3);
        let r = bkm_fit(&x, 4, &cfg).unwrap();
        assert_eq!(r.sse, 0.0);
    }

    #[test]
    fn explicit_init_is_used() {
        let x = blobs();
        let init =
            Codebook::from_rows(&[[0.0, 0.0], [0.5, 0.5], [1.0, 1.0], [10.0, 10.0]]).unwrap();
        let cfg = BreathingConfig {
            seeding: SeedConfig {
                init: Init::Explicit(init.clone()),
                n_init: 1,
                rng_seed: 3,
            },
            ..BreathingConfig::default()
        };
        let r = bkm_fit(&x, 4, &cfg).unwrap();
        let base = lloyd_fit(&x, &init, &cfg.lloyd).unwrap();
        assert_eq!(r.seeding_sse, base.sse);
        assert!(r.sse < base.sse);
        // every blob ends up with one centroid
        let blob_centers =
            DataMatrix::from_rows(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]]).unwrap();
        let mut owners = assign(&blob_centers, &r.codebook).unwrap().nearest;
        owners.sort();
        assert_eq!(owners, vec![0, 1, 2, 3]);
    }

    #[test]
    fn invalid_config_rejected() {
        let x = blobs();
        let cfg = BreathingConfig::<f64> {
            theta: 0.0,
            ..Default::default()
        };
        assert!(bkm_fit(&x, 3, &cfg).is_err());
        let cfg = BreathingConfig::<f64>::default();
        assert!(matches!(
            bkm_fit(&x, 1000, &cfg),
            Err(Error::TooManyCentroids { .. })
        ));
    }
}
