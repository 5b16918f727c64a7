//! Nearest/second-nearest assignment and the error aggregates built on it.
//!
//! Ties are resolved towards the lowest centroid index. Aggregates are summed
//! in data-row order so results are bit-stable for a given input ordering.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Codebook, DataMatrix};
use crate::scalar::Scalar;

/// Rows per parallel work item when assigning points.
const PAR_CHUNK: usize = 256;
/// Below this many distance evaluations assignment runs sequentially.
const PAR_THRESHOLD: usize = 1 << 15;

#[inline]
pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let diff = x - y;
        acc + diff * diff
    })
}

#[inline]
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    squared_distance(a, b).sqrt()
}

fn check_dims<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<()> {
    if x.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            data: x.dim(),
            codebook: c.dim(),
        });
    }
    Ok(())
}

/// Second-nearest centroid per point; only defined for `k >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondNearest<T> {
    pub index: Vec<usize>,
    pub d2: Vec<T>,
}

/// Per-point nearest and second-nearest centroids with squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    pub nearest: Vec<usize>,
    pub d1: Vec<T>,
    /// `None` when the codebook has a single centroid.
    pub second: Option<SecondNearest<T>>,
}

impl<T: Scalar> Assignment<T> {
    pub fn len(&self) -> usize {
        self.nearest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nearest.is_empty()
    }

    /// Sum of `d1`, accumulated in row order.
    pub fn sse(&self) -> f64 {
        self.d1.iter().map(|v| v.to_acc()).sum()
    }
}

#[inline]
fn nearest_two<T: Scalar>(p: &[T], c: &Codebook<T>) -> (usize, T, usize, T) {
    let (mut i1, mut b1) = (0, T::infinity());
    let (mut i2, mut b2) = (usize::MAX, T::infinity());
    for (j, centroid) in c.rows().enumerate() {
        let dist = squared_distance(p, centroid);
        if dist < b1 {
            i2 = i1;
            b2 = b1;
            i1 = j;
            b1 = dist;
        } else if dist < b2 || i2 == usize::MAX {
            i2 = j;
            b2 = dist;
        }
    }
    (i1, b1, i2, b2)
}

#[inline]
fn nearest_one<T: Scalar>(p: &[T], c: &Codebook<T>) -> (usize, T) {
    let (mut i1, mut b1) = (0, T::infinity());
    for (j, centroid) in c.rows().enumerate() {
        let dist = squared_distance(p, centroid);
        if dist < b1 {
            i1 = j;
            b1 = dist;
        }
    }
    (i1, b1)
}

fn map_rows<T: Scalar, R: Send, F>(x: &DataMatrix<T>, work: usize, f: F) -> Vec<R>
where
    F: Fn(&[T]) -> R + Sync + Send,
{
    if work < PAR_THRESHOLD {
        x.rows().map(f).collect()
    } else {
        x.as_slice()
            .par_chunks(PAR_CHUNK * x.dim())
            .flat_map_iter(|block| block.chunks_exact(x.dim()).map(&f).collect::<Vec<_>>())
            .collect()
    }
}

/// Nearest and (for `k >= 2`) second-nearest centroid of every point.
pub fn assign<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<Assignment<T>> {
    check_dims(x, c)?;
    let work = x.n() * c.k() * x.dim();
    if c.k() == 1 {
        return Ok(nearest_only(x, c, work));
    }
    let found = map_rows(x, work, |p| nearest_two(p, c));
    let n = found.len();
    let mut a = Assignment {
        nearest: Vec::with_capacity(n),
        d1: Vec::with_capacity(n),
        second: Some(SecondNearest {
            index: Vec::with_capacity(n),
            d2: Vec::with_capacity(n),
        }),
    };
    let second = a.second.as_mut().expect("k >= 2");
    for (i1, b1, i2, b2) in found {
        a.nearest.push(i1);
        a.d1.push(b1);
        second.index.push(i2);
        second.d2.push(b2);
    }
    Ok(a)
}

/// Nearest centroid only; cheaper than [`assign`] when `d2` is not needed.
pub fn assign_nearest<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<Assignment<T>> {
    check_dims(x, c)?;
    Ok(nearest_only(x, c, x.n() * c.k() * x.dim()))
}

fn nearest_only<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>, work: usize) -> Assignment<T> {
    let (nearest, d1) = map_rows(x, work, |p| nearest_one(p, c)).into_iter().unzip();
    Assignment {
        nearest,
        d1,
        second: None,
    }
}

/// Summed squared error: every point's squared distance to its nearest centroid.
pub fn sse<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<f64> {
    Ok(assign_nearest(x, c)?.sse())
}

/// Per-centroid error, utility and Voronoi-set size.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidStats {
    /// Sum of `d1` over each centroid's Voronoi set.
    pub error: Vec<f64>,
    /// Sum of `d2 - d1` over each centroid's Voronoi set: the SSE increase
    /// caused by deleting that centroid alone.
    pub utility: Vec<f64>,
    pub voronoi_count: Vec<usize>,
}

impl CentroidStats {
    pub fn total_error(&self) -> f64 {
        self.error.iter().sum()
    }
}

/// Error and utility of every centroid; needs `k >= 2`.
pub fn centroid_stats<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<CentroidStats> {
    if c.k() < 2 {
        return Err(Error::TooFewCentroids {
            required: 2,
            k: c.k(),
        });
    }
    let a = assign(x, c)?;
    Ok(stats_from_assignment(&a, c.k()))
}

pub(crate) fn stats_from_assignment<T: Scalar>(a: &Assignment<T>, k: usize) -> CentroidStats {
    let mut stats = CentroidStats {
        error: vec![0.0; k],
        utility: vec![0.0; k],
        voronoi_count: vec![0; k],
    };
    for (i, (&j, &d1)) in a.nearest.iter().zip(&a.d1).enumerate() {
        stats.error[j] += d1.to_acc();
        stats.voronoi_count[j] += 1;
        if let Some(second) = &a.second {
            stats.utility[j] += (second.d2[i] - d1).to_acc();
        }
    }
    stats
}

/// Per-centroid error only (nearest assignment); valid for any `k >= 1`.
pub fn centroid_errors<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<Vec<f64>> {
    let a = assign_nearest(x, c)?;
    Ok(stats_from_assignment(&a, c.k()).error)
}

/// Root mean squared quantization error, `sqrt(SSE / n)`.
pub fn mean_quantization_distance<T: Scalar>(x: &DataMatrix<T>, c: &Codebook<T>) -> Result<f64> {
    Ok((sse(x, c)? / x.n() as f64).sqrt())
}

/// Distance from each centroid to its nearest other centroid (Euclidean).
pub fn nearest_neighbor_distances<T: Scalar>(c: &Codebook<T>) -> Result<Vec<f64>> {
    if c.k() < 2 {
        return Err(Error::TooFewCentroids {
            required: 2,
            k: c.k(),
        });
    }
    Ok((0..c.k())
        .map(|i| {
            (0..c.k())
                .filter(|&j| j != i)
                .map(|j| distance(c.row(i), c.row(j)).to_acc())
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Mean over centroids of the distance to the nearest other centroid.
pub fn mean_nn_distance<T: Scalar>(c: &Codebook<T>) -> Result<f64> {
    let nn = nearest_neighbor_distances(c)?;
    Ok(nn.iter().sum::<f64>() / nn.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(rows: &[&[f64]]) -> DataMatrix<f64> {
        DataMatrix::from_rows(rows).unwrap()
    }

    fn book(rows: &[&[f64]]) -> Codebook<f64> {
        Codebook::from_rows(rows).unwrap()
    }

    #[test]
    fn assign_two_points_two_centroids() {
        let x = data(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let c = book(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let a = assign(&x, &c).unwrap();
        assert_eq!(a.nearest, vec![0, 1]);
        assert_eq!(a.d1, vec![0.0, 1.0]);
        let s = a.second.unwrap();
        assert_eq!(s.index, vec![1, 0]);
        assert_eq!(s.d2, vec![9.0, 4.0]);
    }

    #[test]
    fn assign_identity_and_tie() {
        let x = data(&[&[1.5, -2.0]]);
        let c = book(&[&[1.5, -2.0], &[4.0, 4.0]]);
        let a = assign(&x, &c).unwrap();
        assert_eq!((a.nearest[0], a.d1[0]), (0, 0.0));

        let x = data(&[&[1.0, 1.0]]);
        let c = book(&[&[0.0, 0.0], &[2.0, 2.0]]);
        let a = assign(&x, &c).unwrap();
        assert_eq!(a.nearest, vec![0]);
        assert_eq!(a.d1, vec![2.0]);
        let s = a.second.unwrap();
        assert_eq!((s.index[0], s.d2[0]), (1, 2.0));
    }

    #[test]
    fn tie_among_three_prefers_lowest_indices() {
        let x = data(&[&[0.0]]);
        let c = book(&[&[5.0], &[-1.0], &[1.0], &[1.0]]);
        let a = assign(&x, &c).unwrap();
        assert_eq!(a.nearest, vec![1]);
        assert_eq!(a.second.unwrap().index, vec![2]);
    }

    #[test]
    fn single_centroid_has_no_second() {
        let x = data(&[&[0.0], &[4.0]]);
        let c = book(&[&[1.0]]);
        let a = assign(&x, &c).unwrap();
        assert!(a.second.is_none());
        assert_eq!(a.d1, vec![1.0, 9.0]);
        assert!(centroid_stats(&x, &c).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let x = data(&[&[0.0, 1.0]]);
        let c = book(&[&[0.0]]);
        assert_eq!(
            assign(&x, &c),
            Err(Error::DimensionMismatch {
                data: 2,
                codebook: 1
            })
        );
        assert!(sse(&x, &c).is_err());
    }

    #[test]
    fn sse_examples() {
        let x = data(&[&[0.0], &[1.0], &[5.0]]);
        assert_eq!(sse(&x, &book(&[&[0.0], &[5.0]])).unwrap(), 1.0);
        assert_eq!(sse(&x, &book(&[&[0.0], &[1.0], &[5.0]])).unwrap(), 0.0);
    }

    #[test]
    fn stats_example() {
        let x = data(&[&[0.0], &[1.0], &[5.0]]);
        let c = book(&[&[0.0], &[5.0]]);
        let s = centroid_stats(&x, &c).unwrap();
        assert_eq!(s.error, vec![1.0, 0.0]);
        assert_eq!(s.utility, vec![40.0, 25.0]);
        assert_eq!(s.voronoi_count, vec![2, 1]);
    }

    #[test]
    fn duplicates_have_zero_utility() {
        let x = data(&[&[0.0], &[1.0], &[5.0], &[6.0]]);
        let c = book(&[&[0.5], &[5.5], &[0.5]]);
        let s = centroid_stats(&x, &c).unwrap();
        assert_eq!(s.utility[0], 0.0);
        assert_eq!(s.utility[2], 0.0);
        assert!(s.utility[1] > 0.0);
    }

    #[test]
    fn symmetric_singletons_have_equal_utility() {
        let x = data(&[&[0.0], &[1.0], &[10.0], &[11.0]]);
        let c = book(&[&[0.0], &[1.0], &[10.0], &[11.0]]);
        let s = centroid_stats(&x, &c).unwrap();
        assert!(s.utility.iter().all(|&u| u == 1.0));
    }

    #[test]
    fn quantization_distance_examples() {
        let x = data(&[&[0.0], &[1.0], &[5.0]]);
        let q = mean_quantization_distance(&x, &book(&[&[0.0], &[5.0]])).unwrap();
        assert!((q - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let x = data(&[&[0.0], &[2.0]]);
        assert_eq!(
            mean_quantization_distance(&x, &book(&[&[1.0]])).unwrap(),
            1.0
        );
        let x = data(&[&[3.0]]);
        assert_eq!(
            mean_quantization_distance(&x, &book(&[&[3.0]])).unwrap(),
            0.0
        );
    }

    #[test]
    fn mean_nn_distance_examples() {
        let c = book(&[&[0.0], &[1.0], &[3.0]]);
        assert!((mean_nn_distance(&c).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        // equilateral triangle with side 2
        let h = 3.0f64.sqrt();
        let c = book(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, h]]);
        assert!((mean_nn_distance(&c).unwrap() - 2.0).abs() < 1e-12);
        let c = book(&[&[0.0], &[0.0], &[4.0]]);
        assert_eq!(nearest_neighbor_distances(&c).unwrap(), vec![0.0, 0.0, 4.0]);
        assert!(mean_nn_distance(&book(&[&[1.0]])).is_err());
    }

    #[test]
    fn parallel_path_matches_sequential() {
        let n = 3000;
        let vals: Vec<f64> = (0..n * 2)
            .map(|i| ((i * 7919) % 1013) as f64 / 101.0)
            .collect();
        let x = DataMatrix::new(vals, n, 2).unwrap();
        let cvals: Vec<f64> = (0..40).map(|i| (i * 37 % 11) as f64).collect();
        let c = Codebook::new(cvals, 20, 2).unwrap();
        let par = assign(&x, &c).unwrap();
        for (i, p) in x.rows().enumerate() {
            let (i1, b1, i2, b2) = nearest_two(p, &c);
            assert_eq!(par.nearest[i], i1);
            assert_eq!(par.d1[i], b1);
            let s = par.second.as_ref().unwrap();
            assert_eq!((s.index[i], s.d2[i]), (i2, b2));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let x = DataMatrix::from_rows(&[[0.0f32], [1.0], [5.0]]).unwrap();
        let c = Codebook::from_rows(&[[0.0f32], [5.0]]).unwrap();
        let s = centroid_stats(&x, &c).unwrap();
        assert_eq!(s.utility, vec![40.0, 25.0]);
    }
}
