//! Seedable synthetic data sets: Gaussian grids, the unit square, Norm25-style
//! high-dimensional mixtures and general axis-aligned Gaussian mixtures.
//!
//! All generators are pure functions of their parameters and the generator
//! state they are handed.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::matrix::{Codebook, DataMatrix};
use crate::rng::stream;
use crate::scalar::Scalar;

/// Defaults for the 5×5 grid family.
pub const GRID_SPACING: f64 = 1.0;
pub const GRID_SIGMA_X: f64 = 0.08;
pub const GRID_SIGMA_Y: f64 = 0.16;

/// Minimum separation of Norm25-style centers, in units of sigma.
pub const NORM25_MIN_SEPARATION: f64 = 20.0;
const CENTER_ATTEMPTS: usize = 1000;

/// Splits `n` items over `g` groups; the first `n % g` groups get one extra.
pub fn split_counts(n: usize, g: usize) -> Vec<usize> {
    (0..g).map(|i| n / g + usize::from(i < n % g)).collect()
}

fn check_sigma(name: &'static str, sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(invalid(
            name,
            format!("must be finite and >= 0, got {sigma}"),
        ));
    }
    Ok(())
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Points on a `rows × cols` grid of axis-aligned Gaussians.
///
/// Grid node `g` sits at `((g % cols) * spacing, (g / cols) * spacing)`;
/// point `i` is drawn from node `i % (rows * cols)`.
pub fn gen_gaussian_grid<T: Scalar, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    n: usize,
    sigma_x: f64,
    sigma_y: f64,
    spacing: f64,
    rng: &mut R,
) -> Result<DataMatrix<T>> {
    let g = rows * cols;
    if g == 0 {
        return Err(invalid("rows/cols", "grid must have at least one node"));
    }
    if n < g {
        return Err(invalid(
            "n",
            format!("need at least one point per node ({g})"),
        ));
    }
    check_sigma("sigma_x", sigma_x)?;
    check_sigma("sigma_y", sigma_y)?;
    if !spacing.is_finite() || spacing <= 0.0 {
        return Err(invalid("spacing", "must be > 0"));
    }
    let mut values = Vec::with_capacity(2 * n);
    for i in 0..n {
        let node = i % g;
        let cx = (node % cols) as f64 * spacing;
        let cy = (node / cols) as f64 * spacing;
        values.push(T::from_acc(cx + sigma_x * normal(rng)));
        values.push(T::from_acc(cy + sigma_y * normal(rng)));
    }
    DataMatrix::new(values, n, 2)
}

/// Grid node coordinates in the order used by [`gen_gaussian_grid`].
pub fn grid_centers<T: Scalar>(rows: usize, cols: usize, spacing: f64) -> Result<Codebook<T>> {
    let values = (0..rows * cols)
        .flat_map(|node| {
            [
                T::from_acc((node % cols) as f64 * spacing),
                T::from_acc((node / cols) as f64 * spacing),
            ]
        })
        .collect();
    Codebook::new(values, rows * cols, 2)
}

/// `n` i.i.d. points uniform on the unit square.
pub fn gen_uniform_square<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix<T>> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let values = (0..2 * n)
        .map(|_| T::from_acc(rng.random::<f64>()))
        .collect();
    DataMatrix::new(values, n, 2)
}

/// `g` centers uniform in `[0, side]^d` whose pairwise distances all exceed
/// `min_dist`; redraws the whole set until that holds.
pub fn separated_centers<R: Rng + ?Sized>(
    g: usize,
    d: usize,
    side: f64,
    min_dist: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if g == 0 || d == 0 {
        return Err(invalid("g/d", "must be at least 1"));
    }
    if !side.is_finite() || side <= 0.0 {
        return Err(invalid("side", "must be > 0"));
    }
    for _ in 0..CENTER_ATTEMPTS {
        let centers: Vec<Vec<f64>> = (0..g)
            .map(|_| (0..d).map(|_| rng.random::<f64>() * side).collect())
            .collect();
        let ok = (0..g).all(|a| {
            (a + 1..g).all(|b| {
                let d2: f64 = centers[a]
                    .iter()
                    .zip(&centers[b])
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum();
                d2.sqrt() > min_dist
            })
        });
        if ok {
            return Ok(centers);
        }
    }
    Err(invalid(
        "side",
        format!("could not place {g} centers {min_dist} apart in {CENTER_ATTEMPTS} attempts"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norm25Params {
    pub n: usize,
    pub d: usize,
    pub g: usize,
    pub side: f64,
    pub sigma: f64,
}

impl Default for Norm25Params {
    fn default() -> Self {
        Self {
            n: 10_000,
            d: 15,
            g: 25,
            side: 500.0,
            sigma: 1.0,
        }
    }
}

/// Norm25-style data: `g` centers uniform in a hypercube, points split
/// round-robin over unit-variance (scaled by `sigma`) isotropic Gaussians.
/// Returns the data and the true centers.
pub fn gen_norm25_style<T: Scalar, R: Rng + ?Sized>(
    p: &Norm25Params,
    rng: &mut R,
) -> Result<(DataMatrix<T>, Codebook<T>)> {
    check_sigma("sigma", p.sigma)?;
    if p.n < p.g {
        return Err(invalid("n", "need at least one point per center"));
    }
    let centers = separated_centers(p.g, p.d, p.side, NORM25_MIN_SEPARATION * p.sigma, rng)?;
    let mut values = Vec::with_capacity(p.n * p.d);
    for i in 0..p.n {
        let c = &centers[i % p.g];
        values.extend(c.iter().map(|&v| T::from_acc(v + p.sigma * normal(rng))));
    }
    let center_values = centers.iter().flatten().map(|&v| T::from_acc(v)).collect();
    Ok((
        DataMatrix::new(values, p.n, p.d)?,
        Codebook::new(center_values, p.g, p.d)?,
    ))
}

/// Axis-aligned Gaussian mixture with explicit centers, per-axis standard
/// deviations and point counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub centers: Vec<Vec<f64>>,
    /// One per-axis standard deviation vector per cluster.
    pub sigmas: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
}

impl MixtureSpec {
    /// Circular clusters of equal `sigma` with `n` points split round-robin.
    pub fn isotropic(centers: Vec<Vec<f64>>, sigma: f64, n: usize) -> Self {
        let d = centers.first().map_or(0, Vec::len);
        let g = centers.len();
        Self {
            sigmas: vec![vec![sigma; d]; g],
            counts: split_counts(n, g),
            centers,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        let g = self.centers.len();
        if g == 0 {
            return Err(invalid("centers", "need at least one cluster"));
        }
        if self.sigmas.len() != g || self.counts.len() != g {
            return Err(invalid("sigmas/counts", "need one entry per cluster"));
        }
        let d = self.centers[0].len();
        if d == 0 {
            return Err(invalid("centers", "need at least one dimension"));
        }
        for (c, s) in self.centers.iter().zip(&self.sigmas) {
            if c.len() != d || s.len() != d {
                return Err(invalid("centers", "all clusters must share one dimension"));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(invalid("centers", "must be finite"));
            }
            for &sigma in s {
                check_sigma("sigmas", sigma)?;
            }
        }
        if self.counts.iter().sum::<usize>() == 0 {
            return Err(invalid("counts", "need at least one point"));
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Samples a mixture; points are emitted cluster by cluster.
pub fn gen_gaussian_mixture<T: Scalar, R: Rng + ?Sized>(
    spec: &MixtureSpec,
    rng: &mut R,
) -> Result<DataMatrix<T>> {
    let d = spec.validate()?;
    let n = spec.n();
    let mut values = Vec::with_capacity(n * d);
    for ((center, sigma), &count) in spec.centers.iter().zip(&spec.sigmas).zip(&spec.counts) {
        for _ in 0..count {
            values.extend(
                center
                    .iter()
                    .zip(sigma)
                    .map(|(&c, &s)| T::from_acc(c + s * normal(rng))),
            );
        }
    }
    DataMatrix::new(values, n, d)
}

/// Generator family plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    GaussianGrid {
        rows: usize,
        cols: usize,
        n: usize,
        sigma_x: f64,
        sigma_y: f64,
        spacing: f64,
    },
    UniformSquare {
        n: usize,
    },
    Norm25Style(Norm25Params),
    GaussianMixture(MixtureSpec),
}

impl GenSpec {
    /// The 5×5 grid with the crate's default spread.
    pub fn gmd5x5(n: usize) -> Self {
        GenSpec::GaussianGrid {
            rows: 5,
            cols: 5,
            n,
            sigma_x: GRID_SIGMA_X,
            sigma_y: GRID_SIGMA_Y,
            spacing: GRID_SPACING,
        }
    }
}

/// Generated data plus ground-truth centers where the family has them.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated<T> {
    pub data: DataMatrix<T>,
    pub centers: Option<Codebook<T>>,
}

/// Runs the generator for `spec` on `stream(seed, [])`.
pub fn generate<T: Scalar>(spec: &GenSpec, seed: u64) -> Result<Generated<T>> {
    let mut rng = stream(seed, &[]);
    Ok(match spec {
        GenSpec::GaussianGrid {
            rows,
            cols,
            n,
            sigma_x,
            sigma_y,
            spacing,
        } => Generated {
            data: gen_gaussian_grid(*rows, *cols, *n, *sigma_x, *sigma_y, *spacing, &mut rng)?,
            centers: Some(grid_centers(*rows, *cols, *spacing)?),
        },
        GenSpec::UniformSquare { n } => Generated {
            data: gen_uniform_square(*n, &mut rng)?,
            centers: None,
        },
        GenSpec::Norm25Style(p) => {
            let (data, centers) = gen_norm25_style(p, &mut rng)?;
            Generated {
                data,
                centers: Some(centers),
            }
        }
        GenSpec::GaussianMixture(m) => {
            let data = gen_gaussian_mixture(m, &mut rng)?;
            let values = m
                .centers
                .iter()
                .flatten()
                .map(|&v| T::from_acc(v))
                .collect();
            let centers =
                Codebook::new(values, m.centers.len(), data.dim()).map_err(|_| Error::Empty)?;
            Generated {
                data,
                centers: Some(centers),
            }
        }
    })
}
