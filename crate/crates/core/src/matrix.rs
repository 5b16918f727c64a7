//! Row-major point containers: the data set and the codebook.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn validate<T: Scalar>(values: &[T], rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Empty);
    }
    if rows.checked_mul(cols) != Some(values.len()) {
        return Err(Error::Shape {
            rows,
            cols,
            len: values.len(),
        });
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / cols,
            col: pos % cols,
        });
    }
    Ok(())
}

fn from_rows<T: Scalar, R: AsRef<[T]>>(rows: &[R]) -> Result<(Vec<T>, usize, usize)> {
    let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
    let mut values = Vec::with_capacity(rows.len() * cols);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != cols {
            return Err(Error::Shape {
                rows: i + 1,
                cols,
                len: values.len() + r.len(),
            });
        }
        values.extend_from_slice(r);
    }
    validate(&values, rows.len(), cols)?;
    Ok((values, rows.len(), cols))
}

/// `n` data points in `d` dimensions, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix<T> {
    values: Vec<T>,
    n: usize,
    d: usize,
}

impl<T: Scalar> DataMatrix<T> {
    /// Builds a data matrix from row-major values.
    pub fn new(values: Vec<T>, n: usize, d: usize) -> Result<Self> {
        validate(&values, n, d)?;
        Ok(Self { values, n, d })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let (values, n, d) = from_rows(rows)?;
        Ok(Self { values, n, d })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
}

/// An ordered set of `k` centroids in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    values: Vec<T>,
    k: usize,
    d: usize,
}

impl<T: Scalar> Codebook<T> {
    pub fn new(values: Vec<T>, k: usize, d: usize) -> Result<Self> {
        validate(&values, k, d)?;
        Ok(Self { values, k, d })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let (values, k, d) = from_rows(rows)?;
        Ok(Self { values, k, d })
    }

    /// Codebook made of copies of the given data rows, in the given order.
    pub fn from_data_rows(data: &DataMatrix<T>, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty);
        }
        let mut values = Vec::with_capacity(indices.len() * data.dim());
        for &i in indices {
            values.extend_from_slice(data.row(i));
        }
        Ok(Self {
            values,
            k: indices.len(),
            d: data.dim(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    /// Appends a centroid; the row must have `dim()` finite entries.
    pub fn push(&mut self, row: &[T]) -> Result<()> {
        validate(row, 1, self.d)?;
        self.values.extend_from_slice(row);
        self.k += 1;
        Ok(())
    }

    /// Copy without the rows flagged in `drop`, original order preserved.
    pub fn without(&self, drop: &[bool]) -> Result<Self> {
        debug_assert_eq!(drop.len(), self.k);
        let values: Vec<T> = self
            .rows()
            .zip(drop)
            .filter(|(_, &gone)| !gone)
            .flat_map(|(r, _)| r.iter().copied())
            .collect();
        let k = values.len() / self.d;
        if k == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            values,
            k,
            d: self.d,
        })
    }

    /// Codebook with a single centroid removed.
    pub fn without_index(&self, index: usize) -> Result<Self> {
        let mut drop = vec![false; self.k];
        drop[index] = true;
        self.without(&drop)
    }

    /// Reinterprets the centroids as a data matrix (e.g. for self-distances).
    pub fn to_data(&self) -> DataMatrix<T> {
        DataMatrix {
            values: self.values.clone(),
            n: self.k,
            d: self.d,
        }
    }

    pub(crate) fn from_parts_unchecked(values: Vec<T>, k: usize, d: usize) -> Self {
        debug_assert_eq!(values.len(), k * d);
        Self { values, k, d }
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.values[i * self.d..(i + 1) * self.d]
    }
}
