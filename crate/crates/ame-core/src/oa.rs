//! Orthogonal arrays from classical bijective maps, strength verification,
//! and the combinatorial forms of unitarity, dual unitarity, and perfection.
//!
//! A bijective map u: X^m -> X^m over an alphabet of D symbols induces an
//! array with D^m rows (a..., u(a)...) and 2m columns. The array has strength
//! m exactly when the corresponding state is absolutely maximally entangled,
//! which for linear maps b = G a happens exactly when G is superregular.

use itertools::Itertools;
use thiserror::Error;

use crate::matrix::{FFMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OaError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("map table is not a bijection")]
    NotBijective,
    #[error("map must be square over its alphabet (got {0} entries for arity {1})")]
    BadTable(usize, usize),
    #[error("gate reshuffles need arity 2, got {0}")]
    BadArity(usize),
    #[error("column index {0} out of range for {1} columns")]
    ColumnOutOfRange(usize, usize),
    #[error("bipartition report supports k in {{6, 8}}, got {0}")]
    UnsupportedK(usize),
    #[error("bipartition report needs D^(k/2) rows, got {0} (expected {1})")]
    WrongRowCount(usize, usize),
    #[error("alphabet size must be at least 2")]
    TrivialAlphabet,
    #[error("malformed array text: {0}")]
    Parse(String),
}

/// Mixed-radix code of a tuple, most significant digit = first position.
pub fn tuple_code(tuple: &[u32], d: u32) -> u64 {
    tuple.iter().fold(0u64, |acc, &x| acc * d as u64 + x as u64)
}

/// Inverse of [`tuple_code`].
pub fn tuple_decode(mut code: u64, len: usize, d: u32) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (code % d as u64) as u32;
        code /= d as u64;
    }
    out
}

/// A bijective map X^m -> X^m stored as a full lookup table indexed by the
/// mixed-radix code of the input tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalMap {
    d: u32,
    arity: usize,
    table: Vec<u64>,
}

impl ClassicalMap {
    /// Build from an explicit table of output codes; validates bijectivity.
    pub fn new(d: u32, arity: usize, table: Vec<u64>) -> Result<Self, OaError> {
        if d < 2 {
            return Err(OaError::TrivialAlphabet);
        }
        let size = (d as u64).pow(arity as u32) as usize;
        if table.len() != size {
            return Err(OaError::BadTable(table.len(), arity));
        }
        let mut seen = vec![false; size];
        for &out in &table {
            let idx = out as usize;
            if idx >= size || seen[idx] {
                return Err(OaError::NotBijective);
            }
            seen[idx] = true;
        }
        Ok(ClassicalMap { d, arity, table })
    }

    /// The linear map b = G a for an invertible square matrix G.
    pub fn from_matrix(g: &FFMatrix) -> Result<Self, OaError> {
        if !g.is_square() {
            return Err(MatrixError::NotSquare(g.rows(), g.cols()).into());
        }
        if g.det_code() == 0 {
            return Err(MatrixError::Singular.into());
        }
        let d = g.field().order();
        let m = g.rows();
        let size = (d as u64).pow(m as u32);
        let mut table = Vec::with_capacity(size as usize);
        for code in 0..size {
            let a = tuple_decode(code, m, d);
            let b = g.apply(&a);
            table.push(tuple_code(&b, d));
        }
        // invertibility of G guarantees bijectivity
        Ok(ClassicalMap {
            d,
            arity: m,
            table,
        })
    }

    pub fn identity(d: u32, arity: usize) -> Self {
        let size = (d as u64).pow(arity as u32);
        ClassicalMap {
            d,
            arity,
            table: (0..size).collect(),
        }
    }

    pub fn alphabet(&self) -> u32 {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Output tuple for an input tuple.
    pub fn apply(&self, input: &[u32]) -> Vec<u32> {
        let code = tuple_code(input, self.d);
        tuple_decode(self.table[code as usize], self.arity, self.d)
    }

    /// Combinatorial unitarity of the three reshuffles of an arity-2 gate.
    pub fn gate_reshuffles(&self) -> Result<ReshuffleReport, OaError> {
        if self.arity != 2 {
            return Err(OaError::BadArity(self.arity));
        }
        let arr = OrthogonalArray::from_map(self);
        // columns: 0 = a1, 1 = a2, 2 = b1, 3 = b2
        let u_ok = arr.subset_orthogonal(&[0, 1])? && arr.subset_orthogonal(&[2, 3])?;
        let ut_ok = arr.subset_orthogonal(&[0, 3])? && arr.subset_orthogonal(&[1, 2])?;
        let ur_ok = arr.subset_orthogonal(&[0, 2])? && arr.subset_orthogonal(&[1, 3])?;
        Ok(ReshuffleReport { u_ok, ut_ok, ur_ok })
    }
}

/// Unitarity verdicts for the operator, its partial transpose, and its
/// diagonal reshuffle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReshuffleReport {
    pub u_ok: bool,
    pub ut_ok: bool,
    pub ur_ok: bool,
}

impl ReshuffleReport {
    pub fn dual_unitary(&self) -> bool {
        self.u_ok && self.ut_ok
    }

    pub fn perfect(&self) -> bool {
        self.u_ok && self.ut_ok && self.ur_ok
    }
}

/// A D-symbol array with k columns stored as explicit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    d: u32,
    columns: usize,
    data: Vec<u16>,
    declared_strength: Option<usize>,
}

impl OrthogonalArray {
    pub fn new(d: u32, columns: usize, rows: Vec<Vec<u32>>) -> Result<Self, OaError> {
        if d < 2 {
            return Err(OaError::TrivialAlphabet);
        }
        let mut data = Vec::with_capacity(rows.len() * columns);
        for row in &rows {
            if row.len() != columns {
                return Err(OaError::Parse("ragged rows".into()));
            }
            for &v in row {
                if v >= d {
                    return Err(OaError::Parse(format!("symbol {v} not below {d}")));
                }
                data.push(v as u16);
            }
        }
        Ok(OrthogonalArray {
            d,
            columns,
            data,
            declared_strength: None,
        })
    }

    /// Rows (a..., u(a)...) for all inputs in ascending code order.
    pub fn from_map(map: &ClassicalMap) -> Self {
        let d = map.d;
        let m = map.arity;
        let size = map.table.len();
        let mut data = Vec::with_capacity(size * 2 * m);
        for code in 0..size {
            for x in tuple_decode(code as u64, m, d) {
                data.push(x as u16);
            }
            for x in tuple_decode(map.table[code], m, d) {
                data.push(x as u16);
            }
        }
        OrthogonalArray {
            d,
            columns: 2 * m,
            data,
            declared_strength: None,
        }
    }

    /// Convenience: the array of the linear map b = G a.
    pub fn from_matrix(g: &FFMatrix) -> Result<Self, OaError> {
        Ok(Self::from_map(&ClassicalMap::from_matrix(g)?))
    }

    pub fn symbols(&self) -> u32 {
        self.d
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn row_count(&self) -> usize {
        if self.columns == 0 {
            0
        } else {
            self.data.len() / self.columns
        }
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.columns..(i + 1) * self.columns]
    }

    pub fn declared_strength(&self) -> Option<usize> {
        self.declared_strength
    }

    pub fn with_declared_strength(mut self, s: usize) -> Self {
        self.declared_strength = Some(s);
        self
    }

    /// True when every tuple over the chosen columns appears exactly
    /// rows / D^|cols| times. With row count = D^|cols| this is multiplicity
    /// exactly one.
    pub fn subset_orthogonal(&self, cols: &[usize]) -> Result<bool, OaError> {
        for &c in cols {
            if c >= self.columns {
                return Err(OaError::ColumnOutOfRange(c, self.columns));
            }
        }
        let rows = self.row_count() as u64;
        let cells = (self.d as u64).checked_pow(cols.len() as u32);
        let cells = match cells {
            Some(c) if c <= rows && rows % c == 0 => c,
            _ => return Ok(false),
        };
        let lambda = rows / cells;
        let mut counts = vec![0u64; cells as usize];
        for r in 0..self.row_count() {
            let row = self.row(r);
            let mut code = 0u64;
            for &c in cols {
                code = code * self.d as u64 + row[c] as u64;
            }
            counts[code as usize] += 1;
            if counts[code as usize] > lambda {
                return Ok(false);
            }
        }
        Ok(counts.iter().all(|&c| c == lambda))
    }

    /// Largest s such that every s-column projection is orthogonal; 0 if none.
    pub fn strength(&self) -> usize {
        let rows = self.row_count() as u64;
        let mut max_s = 0usize;
        let mut cells = 1u64;
        while max_s < self.columns {
            match cells.checked_mul(self.d as u64) {
                Some(next) if next <= rows && rows % next == 0 => {
                    cells = next;
                    max_s += 1;
                }
                _ => break,
            }
        }
        let mut best = 0;
        for s in 1..=max_s {
            let all_ok = (0..self.columns)
                .combinations(s)
                .all(|cols| self.subset_orthogonal(&cols).unwrap_or(false));
            if all_ok {
                best = s;
            } else {
                break;
            }
        }
        best
    }

    /// Orthogonality verdicts for every balanced column subset, with the
    /// theorem labels for k = 6 when a decomposition direction is given.
    pub fn bipartition_report(
        &self,
        direction: Option<crate::factor6::Direction>,
    ) -> Result<BipartitionReport, OaError> {
        let k = self.columns;
        if k != 6 && k != 8 {
            return Err(OaError::UnsupportedK(k));
        }
        let expected = (self.d as u64).pow((k / 2) as u32) as usize;
        if self.row_count() != expected {
            return Err(OaError::WrongRowCount(self.row_count(), expected));
        }
        let mut subsets = Vec::new();
        for cols in (0..k).combinations(k / 2) {
            let orthogonal = self.subset_orthogonal(&cols)?;
            subsets.push(SubsetVerdict {
                cols,
                orthogonal,
                class: None,
            });
        }
        if k == 6 {
            if let Some(dir) = direction {
                for subset in subsets.iter_mut() {
                    subset.class = Some(classify6(&subset.cols, dir));
                }
            }
        }
        Ok(BipartitionReport {
            d: self.d,
            k,
            subsets,
        })
    }

    // ---- CSV ----

    /// CSV export: one data row per array row, integer symbols, no header.
    /// When `field_comment` is given it is emitted as a leading `# field ...`
    /// line so the import can recover the alphabet.
    pub fn to_csv(&self, field_comment: Option<&crate::field::Field>) -> String {
        let mut s = String::new();
        if let Some(f) = field_comment {
            s.push_str("# ");
            s.push_str(&f.header());
            s.push('\n');
        }
        for r in 0..self.row_count() {
            let line = self.row(r).iter().map(|v| v.to_string()).join(",");
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// Parse the CSV format, honoring an optional `# field ...` comment line.
    /// Without one the alphabet size defaults to max symbol + 1.
    pub fn from_csv(text: &str) -> Result<Self, OaError> {
        let mut d: Option<u32> = None;
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if rest.starts_with("field") {
                    let f = crate::field::Field::parse_header(rest)
                        .map_err(|e| OaError::Parse(e.to_string()))?;
                    d = Some(f.order());
                }
                continue;
            }
            let row: Result<Vec<u32>, _> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u32>()
                        .map_err(|_| OaError::Parse(format!("bad symbol `{tok}`")))
                })
                .collect();
            rows.push(row?);
        }
        if rows.is_empty() {
            return Err(OaError::Parse("no rows".into()));
        }
        let columns = rows[0].len();
        let d = match d {
            Some(d) => d,
            None => rows.iter().flatten().copied().max().unwrap_or(0) + 1,
        };
        OrthogonalArray::new(d.max(2), columns, rows)
    }
}

/// How a balanced subset relates to the k = 6 tensor-network guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetClass {
    /// One of the three hexagon-axis cuts; orthogonal whenever the factor
    /// gates are dual unitary.
    Hexagonal,
    /// Becomes a hexagon cut after exchanging one tensor's outer leg pair;
    /// orthogonal whenever the factor gates are perfect.
    PairExchange,
    /// Picks one site from each tensor pair; not implied by gate perfection
    /// and must be checked.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetVerdict {
    /// 0-based column indices.
    pub cols: Vec<usize>,
    pub orthogonal: bool,
    pub class: Option<SubsetClass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitionReport {
    pub d: u32,
    pub k: usize,
    /// All C(k, k/2) balanced subsets, lexicographic order.
    pub subsets: Vec<SubsetVerdict>,
}

impl BipartitionReport {
    /// The C(k, k/2) / 2 unordered bipartitions: each pairs a subset
    /// containing column 0 with its complement; orthogonal means both halves
    /// are orthogonal.
    pub fn bipartitions(&self) -> Vec<BipartitionVerdict> {
        let mut out = Vec::new();
        for v in &self.subsets {
            if !v.cols.contains(&0) {
                continue;
            }
            let complement: Vec<usize> =
                (0..self.k).filter(|c| !v.cols.contains(c)).collect();
            let other = self
                .subsets
                .iter()
                .find(|s| s.cols == complement)
                .expect("complement subset present");
            out.push(BipartitionVerdict {
                left: v.cols.clone(),
                right: complement,
                orthogonal: v.orthogonal && other.orthogonal,
                class: v.class,
            });
        }
        out
    }

    /// Number of maximally-entangled bipartitions.
    pub fn orthogonal_bipartitions(&self) -> usize {
        self.bipartitions().iter().filter(|b| b.orthogonal).count()
    }

    /// All bipartitions orthogonal: the array describes an AME state.
    pub fn is_ame(&self) -> bool {
        self.subsets.iter().all(|s| s.orthogonal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartitionVerdict {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub orthogonal: bool,
    pub class: Option<SubsetClass>,
}

/// Classify a balanced 6-column subset for the given decomposition direction.
///
/// Forward pairs the sites (1,2), (3,4), (5,6) to the tensors A, B, C; the
/// backward network pairs (4,5), (1,6), (2,3). The backward classification
/// equals the forward one after the site permutation (1 3)(4 6), which is the
/// operator-space exchange 1 <-> 3.
fn classify6(cols: &[usize], direction: crate::factor6::Direction) -> SubsetClass {
    use crate::factor6::Direction;
    // canonical form: the half containing column 0, as a sorted mask
    let mask: u8 = cols.iter().map(|&c| 1u8 << c).sum();
    let canon = if mask & 1 != 0 { mask } else { !mask & 0x3f };
    let set = |sites: [usize; 3]| -> u8 { sites.iter().map(|&s| 1u8 << (s - 1)).sum() };
    let hexagonal = [set([1, 2, 3]), set([1, 5, 6]), set([1, 2, 6])];
    let (pair_exchange, residual) = match direction {
        Direction::Forward => (
            [set([1, 2, 4]), set([1, 2, 5]), set([1, 3, 4])],
            [set([1, 3, 5]), set([1, 4, 5]), set([1, 3, 6]), set([1, 4, 6])],
        ),
        Direction::Backward => (
            [set([1, 4, 5]), set([1, 4, 6]), set([1, 3, 6])],
            [set([1, 2, 4]), set([1, 2, 5]), set([1, 3, 4]), set([1, 3, 5])],
        ),
    };
    if hexagonal.contains(&canon) {
        SubsetClass::Hexagonal
    } else if pair_exchange.contains(&canon) {
        SubsetClass::PairExchange
    } else {
        debug_assert!(residual.contains(&canon));
        SubsetClass::Residual
    }
}

/// Feasibility of an AME-grade orthogonal array (strength k/2 on k columns)
/// for the given alphabet size, by the classical nonexistence results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// Ruled out; the payload cites the obstruction.
    Infeasible(&'static str),
    /// Not excluded by the bounds implemented here.
    NotExcluded,
}

/// Nonexistence screen for (D, k) with k in {6, 8}.
///
/// # Panics
///
/// Panics when k is not 6 or 8.
pub fn bush_feasibility(d: u32, k: usize) -> Feasibility {
    assert!(k == 6 || k == 8, "feasibility screen covers k in {{6, 8}}");
    match (k, d) {
        (6, d) if d <= 3 => Feasibility::Infeasible("Bush bound: no strength-3 OA on 6 columns for D <= 3"),
        (8, d) if d <= 5 => Feasibility::Infeasible("Bush bound: no strength-4 OA on 8 columns for D <= 5"),
        (_, 6) => Feasibility::Infeasible(
            "no pair of orthogonal Latin squares of order 6, so no strength-2 OA on 4 columns",
        ),
        _ => Feasibility::NotExcluded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    /// The strength-2 array of the map (b1, b2) = (a1 + a2, a1 - a2) over Z3.
    fn z3_example_array() -> OrthogonalArray {
        let f3 = Field::prime(3).unwrap();
        let g = FFMatrix::from_ints(f3, &[vec![1, 1], vec![1, -1]]).unwrap();
        OrthogonalArray::from_matrix(&g).unwrap()
    }

    #[test]
    fn z3_map_matches_tabulated_rows() {
        let arr = z3_example_array();
        assert_eq!(arr.row_count(), 9);
        // input (1, 1) maps to (2, 0)
        assert_eq!(arr.row(4), &[1, 1, 2, 0]);
        assert_eq!(arr.row(0), &[0, 0, 0, 0]);
        assert_eq!(arr.row(8), &[2, 2, 1, 0]);
    }

    #[test]
    fn z3_array_has_strength_2() {
        let arr = z3_example_array();
        assert!(arr.subset_orthogonal(&[0, 1]).unwrap());
        assert!(arr.subset_orthogonal(&[2, 3]).unwrap());
        assert_eq!(arr.strength(), 2);
    }

    #[test]
    fn duplicate_rows_break_orthogonality() {
        let arr = OrthogonalArray::new(
            2,
            2,
            vec![vec![0, 0], vec![0, 0], vec![1, 0], vec![1, 1]],
        )
        .unwrap();
        assert!(!arr.subset_orthogonal(&[0, 1]).unwrap());
        assert!(matches!(
            arr.subset_orthogonal(&[0, 5]).unwrap_err(),
            OaError::ColumnOutOfRange(5, 2)
        ));
    }

    #[test]
    fn identity_map_array() {
        let map = ClassicalMap::identity(4, 1);
        let arr = OrthogonalArray::from_map(&map);
        for r in 0..4 {
            assert_eq!(arr.row(r)[0], arr.row(r)[1]);
        }
        assert_eq!(arr.strength(), 1);
    }

    #[test]
    fn identity_gate_reshuffles() {
        let map = ClassicalMap::identity(3, 2);
        let rep = map.gate_reshuffles().unwrap();
        assert_eq!((rep.u_ok, rep.ut_ok, rep.ur_ok), (true, true, false));
        assert!(rep.dual_unitary());
        assert!(!rep.perfect());
    }

    #[test]
    fn superregular_2x2_gate_is_perfect() {
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::from_ints(f5, &[vec![1, 1], vec![1, 2]]).unwrap();
        let map = ClassicalMap::from_matrix(&g).unwrap();
        assert!(map.gate_reshuffles().unwrap().perfect());
    }

    #[test]
    fn no_perfect_gate_exists_for_d2() {
        // exhaustive over all 24 bijections on X^2 with D = 2
        let perms = (0..4u64).permutations(4);
        let mut found = 0;
        for perm in perms {
            let map = ClassicalMap::new(2, 2, perm).unwrap();
            if map.gate_reshuffles().unwrap().perfect() {
                found += 1;
            }
        }
        assert_eq!(found, 0);
    }

    #[test]
    fn arity_one_map_rejected_for_reshuffles() {
        let map = ClassicalMap::identity(3, 1);
        assert!(matches!(map.gate_reshuffles(), Err(OaError::BadArity(1))));
    }

    #[test]
    fn non_bijective_table_rejected() {
        assert!(matches!(
            ClassicalMap::new(2, 1, vec![0, 0]),
            Err(OaError::NotBijective)
        ));
    }

    #[test]
    fn singular_matrix_rejected() {
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::from_ints(f5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(ClassicalMap::from_matrix(&g).is_err());
    }

    #[test]
    fn bush_feasibility_table() {
        assert!(matches!(bush_feasibility(3, 6), Feasibility::Infeasible(_)));
        assert!(matches!(bush_feasibility(2, 6), Feasibility::Infeasible(_)));
        assert!(matches!(bush_feasibility(6, 8), Feasibility::Infeasible(_)));
        assert!(matches!(bush_feasibility(6, 6), Feasibility::Infeasible(_)));
        assert!(matches!(bush_feasibility(5, 8), Feasibility::Infeasible(_)));
        assert_eq!(bush_feasibility(7, 8), Feasibility::NotExcluded);
        assert_eq!(bush_feasibility(4, 6), Feasibility::NotExcluded);
        assert_eq!(bush_feasibility(5, 6), Feasibility::NotExcluded);
    }

    #[test]
    fn csv_round_trip() {
        let arr = z3_example_array();
        let f3 = Field::prime(3).unwrap();
        let csv = arr.to_csv(Some(&f3));
        assert!(csv.starts_with("# field 3 1\n0,0,0,0\n"));
        let back = OrthogonalArray::from_csv(&csv).unwrap();
        assert_eq!(back, arr);
        // without the field comment the alphabet is inferred
        let inferred = OrthogonalArray::from_csv(&arr.to_csv(None)).unwrap();
        assert_eq!(inferred.symbols(), 3);
    }

    #[test]
    fn report_classifies_ten_bipartitions() {
        use crate::factor6::Direction;
        let f5 = Field::prime(5).unwrap();
        let g = FFMatrix::from_ints(
            f5,
            &[vec![1, 1, 1], vec![1, 2, -2], vec![1, -2, -1]],
        )
        .unwrap();
        let arr = OrthogonalArray::from_matrix(&g).unwrap();
        let report = arr.bipartition_report(Some(Direction::Forward)).unwrap();
        assert_eq!(report.subsets.len(), 20);
        let parts = report.bipartitions();
        assert_eq!(parts.len(), 10);
        assert!(report.is_ame());
        let count = |class: SubsetClass| {
            parts.iter().filter(|b| b.class == Some(class)).count()
        };
        assert_eq!(count(SubsetClass::Hexagonal), 3);
        assert_eq!(count(SubsetClass::PairExchange), 3);
        assert_eq!(count(SubsetClass::Residual), 4);
    }

    #[test]
    fn report_rejects_wrong_shapes() {
        let arr = z3_example_array();
        assert!(matches!(
            arr.bipartition_report(None),
            Err(OaError::UnsupportedK(4))
        ));
    }
}
