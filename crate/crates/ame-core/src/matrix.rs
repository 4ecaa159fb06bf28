//! Dense matrices over a finite field: determinants, minors, superregularity,
//! Cauchy construction, and the gate embeddings used by the factorizations.
//!
//! Matrices are immutable values storing element codes row-major; every
//! operation returns a new matrix, so values can be shared freely across
//! threads during census sweeps.

use itertools::Itertools;
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("expected a {0}x{0} matrix, got {1}x{2}")]
    NotSquareOfSize(usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("data length {0} does not match {1}x{2}")]
    DataLength(usize, usize, usize),
    #[error("Cauchy parameters must be pairwise distinct")]
    CauchyRepeatedParameter,
    #[error("invalid index pair ({0}, {1}); need 1 <= j < k <= {2}")]
    BadPair(usize, usize, usize),
    #[error("permutation is not a bijection on 0..{0}")]
    BadPermutation(usize),
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

/// Where a 2x2 gate sits inside a 3x3 embedding: rows/columns (1,2), (1,3),
/// or (2,3), identity elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    A,
    B,
    C,
}

/// Dense matrix over a finite field, entries stored as codes.
#[derive(Clone, PartialEq, Eq)]
pub struct FFMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl std::fmt::Debug for FFMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FFMatrix[{:?}] {}x{} ", self.field, self.rows, self.cols)?;
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

impl FFMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength(data.len(), rows, cols));
        }
        for &c in &data {
            if c >= field.order() {
                return Err(FieldError::CodeOutOfRange {
                    code: c as i64,
                    order: field.order(),
                }
                .into());
            }
        }
        Ok(FFMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Build from signed integer literals; negatives are normalized mod p for
    /// prime fields.
    pub fn from_ints(field: Field, rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatrixError::Parse("ragged rows".into()));
            }
            for &v in row {
                data.push(field.element_from_int(v)?.code());
            }
        }
        FFMatrix::new(field, r, c, data)
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FFMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = FFMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry code at (i, j), 0-based.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn elem(&self, i: usize, j: usize) -> FieldElement {
        self.field.element(self.get(i, j)).expect("entry in range")
    }

    pub fn set(&mut self, i: usize, j: usize, code: u32) {
        debug_assert!(code < self.field.order());
        self.data[i * self.cols + j] = code;
    }

    pub fn codes(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &FFMatrix) -> Result<FFMatrix, MatrixError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch.into());
        }
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let f = &self.field;
        let mut out = FFMatrix::zeros(self.field.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u32;
                for k in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, k), other.get(k, j)));
                }
                out.data[i * out.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Apply the matrix to a vector of codes.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u32;
                for (k, &x) in v.iter().enumerate() {
                    acc = f.add(acc, f.mul(self.get(i, k), x));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> FFMatrix {
        let mut out = FFMatrix::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// New matrix whose row i is `self`'s row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<FFMatrix, MatrixError> {
        check_permutation(perm, self.rows)?;
        let mut out = FFMatrix::zeros(self.field.clone(), self.rows, self.cols);
        for (i, &src) in perm.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(src));
        }
        Ok(out)
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Result<FFMatrix, MatrixError> {
        check_permutation(perm, self.cols)?;
        let mut out = FFMatrix::zeros(self.field.clone(), self.rows, self.cols);
        for i in 0..self.rows {
            for (j, &src) in perm.iter().enumerate() {
                out.data[i * self.cols + j] = self.get(i, src);
            }
        }
        Ok(out)
    }

    /// Reverse both row and column order (the site reflection 1 <-> n).
    pub fn reversed(&self) -> FFMatrix {
        let rev_r: Vec<usize> = (0..self.rows).rev().collect();
        let rev_c: Vec<usize> = (0..self.cols).rev().collect();
        self.permute_rows(&rev_r)
            .and_then(|m| m.permute_cols(&rev_c))
            .expect("reversal is a permutation")
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> FFMatrix {
        let mut out = FFMatrix::zeros(self.field.clone(), row_idx.len(), col_idx.len());
        for (i, &r) in row_idx.iter().enumerate() {
            for (j, &c) in col_idx.iter().enumerate() {
                out.data[i * col_idx.len() + j] = self.get(r, c);
            }
        }
        out
    }

    /// Determinant by Gaussian elimination with field inverses.
    pub fn det(&self) -> Result<FieldElement, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let code = self.det_code();
        Ok(self.field.element(code).expect("det in range"))
    }

    /// Code-level determinant of a square matrix.
    pub(crate) fn det_code(&self) -> u32 {
        debug_assert!(self.is_square());
        let n = self.rows;
        let f = &self.field;
        let mut m = self.data.clone();
        let mut det = 1u32;
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| m[r * n + col] != 0) {
                Some(r) => r,
                None => return 0,
            };
            if pivot_row != col {
                for j in 0..n {
                    m.swap(col * n + j, pivot_row * n + j);
                }
                det = f.neg(det);
            }
            let pivot = m[col * n + col];
            det = f.mul(det, pivot);
            let pivot_inv = f.inv(pivot).expect("pivot nonzero");
            for r in col + 1..n {
                let factor = f.mul(m[r * n + col], pivot_inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = f.mul(factor, m[col * n + j]);
                    m[r * n + j] = f.sub(m[r * n + j], sub);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<FFMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let f = &self.field;
        // augmented elimination [M | I] -> [I | M^-1]
        let mut m = self.data.clone();
        let mut inv = FFMatrix::identity(self.field.clone(), n).data;
        for col in 0..n {
            let pivot_row =
                (col..n).find(|&r| m[r * n + col] != 0).ok_or(MatrixError::Singular)?;
            if pivot_row != col {
                for j in 0..n {
                    m.swap(col * n + j, pivot_row * n + j);
                    inv.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot_inv = f.inv(m[col * n + col]).expect("pivot nonzero");
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], pivot_inv);
                inv[col * n + j] = f.mul(inv[col * n + j], pivot_inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[r * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    let sm = f.mul(factor, m[col * n + j]);
                    m[r * n + j] = f.sub(m[r * n + j], sm);
                    let si = f.mul(factor, inv[col * n + j]);
                    inv[r * n + j] = f.sub(inv[r * n + j], si);
                }
            }
        }
        FFMatrix::new(self.field.clone(), n, n, inv)
    }

    /// Superregularity: every minor of every size is nonzero.
    pub fn all_minors_nonzero(&self) -> Result<bool, MatrixError> {
        Ok(self.first_vanishing_minor()?.is_none())
    }

    /// The first vanishing minor in scan order (increasing size, then
    /// lexicographic row and column subsets), or `None` when superregular.
    pub fn first_vanishing_minor(&self) -> Result<Option<Minor>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        // 1x1 minors are the entries themselves
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) == 0 {
                    return Ok(Some(Minor {
                        rows: vec![i],
                        cols: vec![j],
                    }));
                }
            }
        }
        for size in 2..=n {
            for rows in (0..n).combinations(size) {
                for cols in (0..n).combinations(size) {
                    if self.submatrix(&rows, &cols).det_code() == 0 {
                        return Ok(Some(Minor { rows, cols }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Cauchy matrix g_ij = 1 / (x_i - y_j); all parameters must be distinct.
    pub fn cauchy(field: &Field, xs: &[u32], ys: &[u32]) -> Result<FFMatrix, MatrixError> {
        let mut seen = std::collections::HashSet::new();
        for &v in xs.iter().chain(ys) {
            if v >= field.order() {
                return Err(FieldError::CodeOutOfRange {
                    code: v as i64,
                    order: field.order(),
                }
                .into());
            }
            if !seen.insert(v) {
                return Err(MatrixError::CauchyRepeatedParameter);
            }
        }
        let mut out = FFMatrix::zeros(field.clone(), xs.len(), ys.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let diff = field.sub(x, y);
                // x_i != y_j, so the difference is invertible
                out.data[i * ys.len() + j] = field.inv(diff).expect("distinct parameters");
            }
        }
        Ok(out)
    }

    /// Closed-form Cauchy determinant prod_{i<j}(x_i-x_j)(y_j-y_i) / prod_{ij}(x_i-y_j).
    pub fn cauchy_det(field: &Field, xs: &[u32], ys: &[u32]) -> Result<FieldElement, MatrixError> {
        if xs.len() != ys.len() {
            return Err(MatrixError::DimensionMismatch(xs.len(), 1, ys.len(), 1));
        }
        let f = field;
        let mut num = 1u32;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                num = f.mul(num, f.sub(xs[i], xs[j]));
                num = f.mul(num, f.sub(ys[j], ys[i]));
            }
        }
        let mut den = 1u32;
        for &x in xs {
            for &y in ys {
                den = f.mul(den, f.sub(x, y));
            }
        }
        let inv = f.inv(den).ok_or(MatrixError::CauchyRepeatedParameter)?;
        Ok(field.element(f.mul(num, inv)).unwrap())
    }

    /// Embed a 2x2 gate into a 3x3 map: slot A acts on rows/cols (1,2),
    /// slot B on (1,3), slot C on (2,3), identity elsewhere.
    pub fn embed6(gate: &FFMatrix, slot: Slot) -> Result<FFMatrix, MatrixError> {
        if gate.rows != 2 || gate.cols != 2 {
            return Err(MatrixError::NotSquareOfSize(2, gate.rows, gate.cols));
        }
        let pair = match slot {
            Slot::A => (1, 2),
            Slot::B => (1, 3),
            Slot::C => (2, 3),
        };
        Self::embed_pair(gate, pair, 3)
    }

    /// Embed a 2x2 gate into the identity on rows/columns j and k (1-based).
    pub fn embed8(gate: &FFMatrix, pair: (usize, usize)) -> Result<FFMatrix, MatrixError> {
        if gate.rows != 2 || gate.cols != 2 {
            return Err(MatrixError::NotSquareOfSize(2, gate.rows, gate.cols));
        }
        Self::embed_pair(gate, pair, 4)
    }

    fn embed_pair(gate: &FFMatrix, (j, k): (usize, usize), size: usize) -> Result<FFMatrix, MatrixError> {
        if j == 0 || k <= j || k > size {
            return Err(MatrixError::BadPair(j, k, size));
        }
        let (j, k) = (j - 1, k - 1);
        let mut out = FFMatrix::identity(gate.field.clone(), size);
        out.set(j, j, gate.get(0, 0));
        out.set(j, k, gate.get(0, 1));
        out.set(k, j, gate.get(1, 0));
        out.set(k, k, gate.get(1, 1));
        Ok(out)
    }

    /// First minors, weighted minors, and 2x2 principal-pair determinants of a
    /// 4x4 matrix.
    pub fn cofactors(&self) -> Result<CofactorTable, MatrixError> {
        if self.rows != 4 || self.cols != 4 {
            return Err(MatrixError::NotSquareOfSize(4, self.rows, self.cols));
        }
        let f = &self.field;
        let mut m = [[0u32; 4]; 4];
        let mut weighted = [[0u32; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let rows: Vec<usize> = (0..4).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
                m[i][j] = self.submatrix(&rows, &cols).det_code();
                weighted[i][j] = f.mul(self.get(i, j), m[i][j]);
            }
        }
        let mut pair_dets = Vec::with_capacity(6);
        for (i, j) in (0..4).tuple_combinations() {
            let d = f.sub(
                f.mul(self.get(i, i), self.get(j, j)),
                f.mul(self.get(i, j), self.get(j, i)),
            );
            pair_dets.push(((i + 1, j + 1), d));
        }
        Ok(CofactorTable {
            m,
            weighted,
            pair_dets,
        })
    }

    // ---- text format ----

    /// Serialize: field header line, then one line per row of integer codes.
    pub fn to_text(&self) -> String {
        let mut s = self.field.header();
        s.push('\n');
        for i in 0..self.rows {
            let line = self.row(i).iter().map(|c| c.to_string()).join(" ");
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// Parse the matrix text format. The field comes from the leading header
    /// line unless `field_override` is given, in which case a header is still
    /// allowed (and wins on conflict). Negative entries are accepted for
    /// prime fields.
    pub fn from_text(text: &str, field_override: Option<Field>) -> Result<FFMatrix, MatrixError> {
        let mut field = field_override;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with("field") {
                field = Some(Field::parse_header(line)?);
                continue;
            }
            let row: Result<Vec<i64>, _> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i64>()
                        .map_err(|_| MatrixError::Parse(format!("bad entry `{tok}`")))
                })
                .collect();
            rows.push(row?);
        }
        let field = field.ok_or_else(|| MatrixError::Parse("missing field header".into()))?;
        if rows.is_empty() {
            return Err(MatrixError::Parse("no matrix rows".into()));
        }
        FFMatrix::from_ints(field, &rows)
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<(), MatrixError> {
    if perm.len() != n {
        return Err(MatrixError::BadPermutation(n));
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || seen[i] {
            return Err(MatrixError::BadPermutation(n));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Row/column subset identifying one minor (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl std::fmt::Display for Minor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let one_based = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).join(",");
        write!(
            f,
            "rows {{{}}} x cols {{{}}}",
            one_based(&self.rows),
            one_based(&self.cols)
        )
    }
}

/// Minor data of a 4x4 matrix G: `m[i][j]` is det of G with row i and column
/// j deleted, `weighted[i][j] = g_ij * m[i][j]`, and `pair_dets` holds the
/// determinant of the submatrix on rows and columns {i, j} keyed 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofactorTable {
    pub m: [[u32; 4]; 4],
    pub weighted: [[u32; 4]; 4],
    pub pair_dets: Vec<((usize, usize), u32)>,
}

impl CofactorTable {
    /// First minor m_ij, 1-based indices.
    pub fn minor(&self, i: usize, j: usize) -> u32 {
        self.m[i - 1][j - 1]
    }

    /// Weighted minor M_ij = g_ij * m_ij, 1-based indices.
    pub fn weighted_minor(&self, i: usize, j: usize) -> u32 {
        self.weighted[i - 1][j - 1]
    }

    /// Pair determinant N_ij = det G[i,j | i,j], 1-based indices with i < j.
    pub fn pair_det(&self, i: usize, j: usize) -> u32 {
        self.pair_dets
            .iter()
            .find(|((a, b), _)| (*a, *b) == (i, j))
            .map(|&(_, d)| d)
            .expect("valid pair")
    }
}
