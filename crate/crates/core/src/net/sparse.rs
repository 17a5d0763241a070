//! Sparse nonnegative-integer incidence storage.
//!
//! Entries live in two compressed layouts: column-major (filled as
//! transitions are appended) and a row-major transposed index built once the
//! matrix is complete. Both layouts hold exactly the same `(row, col, value)`
//! set; zero entries are never stored.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparseError {
    #[error("entry ({row}, {col}) is outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("entry ({row}, {col}) has value 0; zero entries must be absent")]
    ZeroValue { row: usize, col: usize },
    #[error("entry ({row}, {col}) is duplicated or out of row-major order")]
    Unordered { row: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RowIndex {
    ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<u32>,
}

/// A `rows x cols` sparse matrix of positive integer counts with row and
/// column scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIncidence {
    num_rows: usize,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<u32>,
    row_counts: Vec<u32>,
    row_index: Option<RowIndex>,
}

impl Default for SparseIncidence {
    fn default() -> Self {
        Self::empty(0)
    }
}

impl SparseIncidence {
    /// A matrix with `num_rows` rows and no columns.
    pub(crate) fn empty(num_rows: usize) -> Self {
        Self {
            num_rows,
            col_ptr: vec![0],
            col_rows: Vec::new(),
            col_vals: Vec::new(),
            row_counts: vec![0; num_rows],
            row_index: None,
        }
    }

    /// Builds a complete matrix from `(row, col, value)` triplets sorted by
    /// row then column, as written in snapshots.
    pub fn from_sorted_triplets<I>(num_rows: usize, num_cols: usize, triplets: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let mut col_counts = vec![0usize; num_cols];
        let mut entries = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (row, col, value) in triplets {
            if row >= num_rows || col >= num_cols {
                return Err(SparseError::OutOfBounds {
                    row,
                    col,
                    rows: num_rows,
                    cols: num_cols,
                });
            }
            if value == 0 {
                return Err(SparseError::ZeroValue { row, col });
            }
            if let Some(prev) = last {
                if prev >= (row, col) {
                    return Err(SparseError::Unordered { row, col });
                }
            }
            last = Some((row, col));
            col_counts[col] += 1;
            entries.push((row as u32, col as u32, value));
        }

        let mut col_ptr = Vec::with_capacity(num_cols + 1);
        col_ptr.push(0);
        for count in &col_counts {
            col_ptr.push(col_ptr.last().unwrap() + count);
        }
        let nnz = entries.len();
        let mut col_rows = vec![0u32; nnz];
        let mut col_vals = vec![0u32; nnz];
        let mut cursor = col_ptr[..num_cols].to_vec();
        let mut row_counts = vec![0u32; num_rows];
        // Row-major input keeps rows ascending inside each column.
        for &(row, col, value) in &entries {
            let slot = &mut cursor[col as usize];
            col_rows[*slot] = row;
            col_vals[*slot] = value;
            *slot += 1;
            row_counts[row as usize] += 1;
        }

        let mut matrix = Self {
            num_rows,
            col_ptr,
            col_rows,
            col_vals,
            row_counts,
            row_index: None,
        };
        matrix.build_row_index();
        Ok(matrix)
    }

    /// Builds a complete matrix column by column. Each column is a list of
    /// `(row, value)` pairs; rows must be distinct and values positive.
    pub fn from_columns<I, C>(num_rows: usize, columns: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = (usize, u32)>,
    {
        let mut matrix = Self::empty(num_rows);
        let mut scratch = Vec::new();
        for column in columns {
            let col = matrix.num_cols();
            scratch.clear();
            for (row, value) in column {
                if row >= num_rows {
                    return Err(SparseError::OutOfBounds {
                        row,
                        col,
                        rows: num_rows,
                        cols: col + 1,
                    });
                }
                if value == 0 {
                    return Err(SparseError::ZeroValue { row, col });
                }
                scratch.push((row as u32, value));
            }
            scratch.sort_unstable_by_key(|&(row, _)| row);
            if let Some(w) = scratch.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(SparseError::Unordered {
                    row: w[0].0 as usize,
                    col,
                });
            }
            matrix.push_sorted_column(&scratch);
        }
        matrix.build_row_index();
        Ok(matrix)
    }

    pub(crate) fn grow_rows(&mut self, num_rows: usize) {
        if num_rows > self.num_rows {
            self.num_rows = num_rows;
            self.row_counts.resize(num_rows, 0);
            self.row_index = None;
        }
    }

    /// Appends one column. `entries` must be sorted by row with distinct rows
    /// that are already in range.
    pub(crate) fn push_sorted_column(&mut self, entries: &[(u32, u32)]) {
        for &(row, value) in entries {
            debug_assert!((row as usize) < self.num_rows);
            debug_assert!(value > 0);
            self.col_rows.push(row);
            self.col_vals.push(value);
            self.row_counts[row as usize] += 1;
        }
        self.col_ptr.push(self.col_rows.len());
        self.row_index = None;
    }

    /// Builds the row-major transposed index with a counting sort over the
    /// column-major entries.
    pub(crate) fn build_row_index(&mut self) {
        let mut ptr = Vec::with_capacity(self.num_rows + 1);
        ptr.push(0usize);
        for &count in &self.row_counts {
            ptr.push(ptr.last().unwrap() + count as usize);
        }
        let nnz = self.col_rows.len();
        let mut cols = vec![0u32; nnz];
        let mut vals = vec![0u32; nnz];
        let mut cursor = ptr[..self.num_rows].to_vec();
        for col in 0..self.num_cols() {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                let slot = &mut cursor[self.col_rows[k] as usize];
                cols[*slot] = col as u32;
                vals[*slot] = self.col_vals[k];
                *slot += 1;
            }
        }
        self.row_index = Some(RowIndex { ptr, cols, vals });
    }

    pub(crate) fn has_row_index(&self) -> bool {
        self.row_index.is_some()
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    /// Total number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.col_rows.len()
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_counts[row] as usize
    }

    pub fn col_nnz(&self, col: usize) -> usize {
        self.col_ptr[col + 1] - self.col_ptr[col]
    }

    /// Row indices of column `col`, ascending.
    pub fn col_rows(&self, col: usize) -> &[u32] {
        &self.col_rows[self.col_ptr[col]..self.col_ptr[col + 1]]
    }

    /// Values of column `col`, aligned with [`Self::col_rows`].
    pub fn col_values(&self, col: usize) -> &[u32] {
        &self.col_vals[self.col_ptr[col]..self.col_ptr[col + 1]]
    }

    /// `(row, value)` pairs of column `col`, ascending by row.
    pub fn col(&self, col: usize) -> impl ExactSizeIterator<Item = (usize, u32)> + '_ {
        self.col_rows(col)
            .iter()
            .zip(self.col_values(col))
            .map(|(&r, &v)| (r as usize, v))
    }

    /// Column indices of row `row`, ascending.
    ///
    /// Panics if the row index has not been built, which only happens on a
    /// net that is still under construction.
    pub fn row_cols(&self, row: usize) -> &[u32] {
        let index = self.row_index.as_ref().expect("row index is built on seal");
        &index.cols[index.ptr[row]..index.ptr[row + 1]]
    }

    pub fn row_values(&self, row: usize) -> &[u32] {
        let index = self.row_index.as_ref().expect("row index is built on seal");
        &index.vals[index.ptr[row]..index.ptr[row + 1]]
    }

    /// `(col, value)` pairs of row `row`, ascending by column.
    pub fn row(&self, row: usize) -> impl ExactSizeIterator<Item = (usize, u32)> + '_ {
        self.row_cols(row)
            .iter()
            .zip(self.row_values(row))
            .map(|(&c, &v)| (c as usize, v))
    }

    /// Value at `(row, col)`, 0 when absent.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        let rows = self.col_rows(col);
        match rows.binary_search(&(row as u32)) {
            Ok(k) => self.col_values(col)[k],
            Err(_) => 0,
        }
    }

    /// All entries as `(row, col, value)` sorted by row then column.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.num_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Sum of each column's values.
    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.num_cols())
            .map(|c| self.col_values(c).iter().map(|&v| v as u64).sum())
            .collect()
    }

    /// Dense copy, row-major. Intended for small matrices (tests, examples).
    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut dense = vec![vec![0u32; self.num_cols()]; self.num_rows];
        for (row, col, value) in self.triplets() {
            dense[row][col] = value;
        }
        dense
    }
}
