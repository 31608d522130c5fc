//! Facet-vertex incidence matrices.
//!
//! Rows are facets, columns are vertices. Each row is stored as a single
//! 64-bit word with column 0 in the most significant bit, so comparing two
//! rows as unsigned integers orders them lexicographically with column 0
//! first. Columns are produced on demand with the same convention (row 0 in
//! the most significant bit).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Maximum number of rows or columns a matrix may have.
pub const MAX_WIDTH: usize = 64;

/// The word with only position `j` set (position 0 is the most significant bit).
#[inline]
pub const fn bit(j: usize) -> u64 {
    1u64 << (63 - j)
}

/// The word with positions `0..n` set.
#[inline]
pub const fn low_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        !0u64 << (64 - n)
    }
}

/// `a` is a subset of `b` (equality counts).
#[inline]
pub const fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Iterates the set positions of a word in increasing order.
#[inline]
pub fn positions(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let p = word.leading_zeros() as usize;
            word &= !bit(p);
            Some(p)
        }
    })
}

/// Packs the bits of `word` selected by `mask` into the leading positions,
/// preserving their order.
#[inline]
pub fn compress(word: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    for (k, p) in positions(mask).enumerate() {
        if word & bit(p) != 0 {
            out |= bit(k);
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("{0} exceeds the supported width of {MAX_WIDTH}")]
    TooWide(usize),
    #[error("row {row} has bits outside the {cols} declared columns")]
    StrayBits { row: usize, cols: usize },
    #[error("row index {index} out of range for a matrix with {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A 0/1 matrix with facets as rows and vertices as columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IncidenceMatrix {
    cols: usize,
    rows: Vec<u64>,
}

impl IncidenceMatrix {
    /// Builds a matrix from row words (column 0 in the most significant bit).
    pub fn new(cols: usize, rows: Vec<u64>) -> Result<Self, MatrixError> {
        if cols == 0 || rows.is_empty() {
            return Err(MatrixError::Empty);
        }
        if cols > MAX_WIDTH {
            return Err(MatrixError::TooWide(cols));
        }
        if rows.len() > MAX_WIDTH {
            return Err(MatrixError::TooWide(rows.len()));
        }
        let mask = low_mask(cols);
        if let Some(row) = rows.iter().position(|r| r & !mask != 0) {
            return Err(MatrixError::StrayBits { row, cols });
        }
        Ok(Self { cols, rows })
    }

    pub fn from_bools(rows: &[Vec<bool>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut words = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixError::Parse {
                    line: i + 2,
                    message: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            words.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .fold(0u64, |w, (j, _)| w | bit(j)),
            );
        }
        Self::new(cols, words)
    }

    /// The incidence matrix of the `(n-1)`-simplex: the complement of the
    /// `n × n` identity.
    pub fn simplex(n: usize) -> Self {
        let mask = low_mask(n);
        Self::new(n, (0..n).map(|i| mask & !bit(i)).collect()).expect("simplex size within bounds")
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn row_words(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] & bit(j) != 0
    }

    /// Column `j` as a word over rows (row 0 in the most significant bit).
    pub fn column(&self, j: usize) -> u64 {
        let b = bit(j);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, &r)| r & b != 0)
            .fold(0u64, |w, (i, _)| w | bit(i))
    }

    pub fn column_words(&self) -> Vec<u64> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            cols: self.rows.len(),
            rows: self.column_words(),
        }
    }

    pub fn row_ones(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    pub fn column_ones(&self, j: usize) -> u32 {
        self.column(j).count_ones()
    }

    /// Total number of ones.
    pub fn ones(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    /// Mask of all column positions.
    pub fn column_mask(&self) -> u64 {
        low_mask(self.cols)
    }

    /// Applies a row permutation and a column permutation: entry `(i, j)` of
    /// the result is entry `(row_order[i], col_order[j])` of `self`.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        debug_assert_eq!(row_order.len(), self.rows.len());
        debug_assert_eq!(col_order.len(), self.cols);
        let rows = row_order
            .iter()
            .map(|&src| {
                let r = self.rows[src];
                col_order
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| r & bit(c) != 0)
                    .fold(0u64, |w, (j, _)| w | bit(j))
            })
            .collect();
        Self {
            cols: self.cols,
            rows,
        }
    }

    /// Keeps the columns selected by `mask` (in their original order) and
    /// returns the restricted rows.
    pub fn restrict_columns(&self, mask: u64) -> Self {
        Self {
            cols: mask.count_ones() as usize,
            rows: self.rows.iter().map(|&r| compress(r, mask)).collect(),
        }
    }

    /// Rows sorted ascending as unsigned integers.
    pub fn with_sorted_rows(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.sort_unstable();
        Self {
            cols: self.cols,
            rows,
        }
    }

    /// Appends a column given as a word over rows.
    pub fn with_column(&self, column: u64) -> Result<Self, MatrixError> {
        if self.cols == MAX_WIDTH {
            return Err(MatrixError::TooWide(self.cols + 1));
        }
        let j = self.cols;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| if column & bit(i) != 0 { r | bit(j) } else { r })
            .collect();
        Ok(Self {
            cols: self.cols + 1,
            rows,
        })
    }

    pub fn with_row(&self, row: u64) -> Result<Self, MatrixError> {
        let mut rows = self.rows.clone();
        rows.push(row);
        Self::new(self.cols, rows)
    }

    /// True iff no row is a subset of another row (duplicates count).
    pub fn rows_form_antichain(&self) -> bool {
        antichain(&self.rows)
    }

    pub fn columns_form_antichain(&self) -> bool {
        antichain(&self.column_words())
    }
}

fn antichain(words: &[u64]) -> bool {
    for (a, &x) in words.iter().enumerate() {
        for (b, &y) in words.iter().enumerate() {
            if a != b && is_subset(x, y) {
                return false;
            }
        }
    }
    true
}

impl fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IncidenceMatrix({}x{})", self.rows.len(), self.cols)?;
        for &r in &self.rows {
            write!(f, "\n  ")?;
            for j in 0..self.cols {
                f.write_str(if r & bit(j) != 0 { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

/// Text form: a header line `k n`, then `k` lines of `n` space-separated
/// entries, newline-terminated.
impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows.len(), self.cols)?;
        for &r in &self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                f.write_str(if r & bit(j) != 0 { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for IncidenceMatrix {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut all = parse_matrices(s)?;
        match all.len() {
            1 => Ok(all.pop().unwrap()),
            0 => Err(MatrixError::Parse {
                line: 1,
                message: "no matrix found".into(),
            }),
            n => Err(MatrixError::Parse {
                line: 1,
                message: format!("expected one matrix, found {n}"),
            }),
        }
    }
}

/// Parses zero or more matrices in text form; blank lines between blocks are
/// ignored.
pub fn parse_matrices(s: &str) -> Result<Vec<IncidenceMatrix>, MatrixError> {
    let mut out = Vec::new();
    let mut lines = s.lines().enumerate().peekable();
    loop {
        while let Some((_, l)) = lines.peek() {
            if l.trim().is_empty() {
                lines.next();
            } else {
                break;
            }
        }
        let Some((hno, header)) = lines.next() else {
            break;
        };
        let err = |line: usize, message: String| MatrixError::Parse {
            line: line + 1,
            message,
        };
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(err(hno, format!("expected header `k n`, found {header:?}")));
        }
        let k: usize = dims[0]
            .parse()
            .map_err(|_| err(hno, format!("bad row count {:?}", dims[0])))?;
        let n: usize = dims[1]
            .parse()
            .map_err(|_| err(hno, format!("bad column count {:?}", dims[1])))?;
        if k == 0 || n == 0 {
            return Err(MatrixError::Empty);
        }
        if n > MAX_WIDTH || k > MAX_WIDTH {
            return Err(MatrixError::TooWide(n.max(k)));
        }
        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            let Some((lno, line)) = lines.next() else {
                return Err(err(hno, format!("expected {k} rows, file ended")));
            };
            let entries: Vec<&str> = line.split(' ').collect();
            if entries.len() != n {
                return Err(err(
                    lno,
                    format!("expected {n} entries, found {}", entries.len()),
                ));
            }
            let mut word = 0u64;
            for (j, e) in entries.iter().enumerate() {
                match e.trim_end_matches('\r') {
                    "1" => word |= bit(j),
                    "0" => {}
                    other => return Err(err(lno, format!("invalid entry {other:?}"))),
                }
            }
            rows.push(word);
        }
        out.push(IncidenceMatrix::new(n, rows)?);
    }
    Ok(out)
}

/// Writes matrices as text blocks separated by blank lines.
pub fn format_matrices(matrices: &[IncidenceMatrix]) -> String {
    matrices
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Extracts the incidence matrix of the facet in row `i`: keep the columns
/// on that facet, drop row `i`, then drop every row contained in another
/// surviving row. Of two equal rows the one with the smaller index is kept.
/// Surviving rows and columns keep their relative order.
pub fn get_facet(m: &IncidenceMatrix, i: usize) -> Result<IncidenceMatrix, MatrixError> {
    if i >= m.rows() {
        return Err(MatrixError::RowOutOfRange {
            index: i,
            rows: m.rows(),
        });
    }
    let mask = m.rows[i];
    let restricted: Vec<u64> = m
        .rows
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &r)| compress(r, mask))
        .collect();
    let rows = maximal_rows(&restricted);
    let cols = mask.count_ones() as usize;
    if rows.is_empty() || cols == 0 {
        return Err(MatrixError::Empty);
    }
    Ok(IncidenceMatrix { cols, rows })
}

/// Drops every word contained in another word of the list; of equal words
/// the first is kept.
pub fn maximal_rows(words: &[u64]) -> Vec<u64> {
    let mut keep = Vec::with_capacity(words.len());
    'outer: for (a, &x) in words.iter().enumerate() {
        for (b, &y) in words.iter().enumerate() {
            if a != b && is_subset(x, y) && (x != y || b < a) {
                continue 'outer;
            }
        }
        keep.push(x);
    }
    keep
}

/// True iff the intersection of any two columns is contained in no third
/// column.
pub fn is_two_neighborly(m: &IncidenceMatrix) -> bool {
    columns_two_neighborly(&m.column_words())
}

/// The column test of [`is_two_neighborly`] on column words.
pub fn columns_two_neighborly(cols: &[u64]) -> bool {
    let n = cols.len();
    for u in 0..n {
        for v in u + 1..n {
            let meet = cols[u] & cols[v];
            for (w, &cw) in cols.iter().enumerate() {
                if w != u && w != v && is_subset(meet, cw) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether appending `c` to a column list that is already 2-neighborly keeps
/// it so. Only triples involving `c` are examined.
pub fn extends_two_neighborly(cols: &[u64], c: u64) -> bool {
    for (u, &cu) in cols.iter().enumerate() {
        let meet = cu & c;
        for (w, &cw) in cols.iter().enumerate() {
            if w != u && is_subset(meet, cw) {
                return false;
            }
        }
    }
    for u in 0..cols.len() {
        for v in u + 1..cols.len() {
            if is_subset(cols[u] & cols[v], c) {
                return false;
            }
        }
    }
    true
}

/// [`extends_two_neighborly`] for a `c` already known to extend every
/// column but the last: only triples holding both `c` and the last column.
pub fn extends_two_neighborly_last(cols: &[u64], c: u64) -> bool {
    let Some((&x, rest)) = cols.split_last() else {
        return true;
    };
    let meet = x & c;
    rest.iter().all(|&u| !is_subset(meet, u) && !is_subset(u & c, x) && !is_subset(u & x, c))
}

/// One violated incidence-matrix property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowTooSparse { row: usize, ones: u32 },
    ColumnTooSparse { col: usize, ones: u32 },
    RowSubset { row: usize, of: usize },
    ColumnSubset { col: usize, of: usize },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::RowTooSparse { .. } => "min-ones-per-row",
            Violation::ColumnTooSparse { .. } => "min-ones-per-column",
            Violation::RowSubset { .. } => "row-antichain",
            Violation::ColumnSubset { .. } => "column-antichain",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowTooSparse { row, ones } => write!(f, "row {row} has only {ones} ones"),
            Violation::ColumnTooSparse { col, ones } => {
                write!(f, "column {col} has only {ones} ones")
            }
            Violation::RowSubset { row, of } => write!(f, "row {row} is a subset of row {of}"),
            Violation::ColumnSubset { col, of } => {
                write!(f, "column {col} is a subset of column {of}")
            }
        }
    }
}

/// Checks the properties every incidence matrix of a `d`-polytope has:
/// at least `d` ones per row and per column, and rows and columns forming
/// antichains under inclusion.
pub fn validate(m: &IncidenceMatrix, d: u32) -> Vec<Violation> {
    let mut out = Vec::new();
    for (row, r) in m.rows.iter().enumerate() {
        let ones = r.count_ones();
        if ones < d {
            out.push(Violation::RowTooSparse { row, ones });
        }
    }
    let cols = m.column_words();
    for (col, c) in cols.iter().enumerate() {
        let ones = c.count_ones();
        if ones < d {
            out.push(Violation::ColumnTooSparse { col, ones });
        }
    }
    for (row, &x) in m.rows.iter().enumerate() {
        if let Some(of) = (0..m.rows.len()).find(|&b| b != row && is_subset(x, m.rows[b])) {
            out.push(Violation::RowSubset { row, of });
        }
    }
    for (col, &x) in cols.iter().enumerate() {
        if let Some(of) = (0..cols.len()).find(|&b| b != col && is_subset(x, cols[b])) {
            out.push(Violation::ColumnSubset { col, of });
        }
    }
    out
}

/// The pyramid: a new apex column on every old facet, plus the base facet
/// containing every old vertex.
pub fn pyramid(m: &IncidenceMatrix) -> Result<IncidenceMatrix, MatrixError> {
    let apex = m.cols;
    if apex >= MAX_WIDTH || m.rows() >= MAX_WIDTH {
        return Err(MatrixError::TooWide(apex + 1));
    }
    let mut rows: Vec<u64> = m.rows.iter().map(|&r| r | bit(apex)).collect();
    rows.push(low_mask(m.cols));
    IncidenceMatrix::new(m.cols + 1, rows)
}

/// The `k`-fold pyramid.
pub fn pyramid_k(m: &IncidenceMatrix, k: usize) -> Result<IncidenceMatrix, MatrixError> {
    (0..k).try_fold(m.clone(), |acc, _| pyramid(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6() -> IncidenceMatrix {
        crate::fixtures::fig6()
    }

    #[test]
    fn bit_helpers() {
        assert_eq!(bit(0), 1 << 63);
        assert_eq!(low_mask(3), 0b111 << 61);
        assert_eq!(positions(bit(2) | bit(5)).collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(compress(bit(1) | bit(4), bit(1) | bit(3) | bit(4)), bit(0) | bit(2));
    }

    #[test]
    fn text_round_trip_matches_layout() {
        let m = IncidenceMatrix::simplex(3);
        let text = m.to_string();
        assert_eq!(text, "3 3\n0 1 1\n1 0 1\n1 1 0\n");
        assert_eq!(text.parse::<IncidenceMatrix>().unwrap(), m);
    }

    #[test]
    fn parser_rejects_ragged_rows() {
        let err = "2 3\n0 1 1\n1 0\n".parse::<IncidenceMatrix>().unwrap_err();
        assert!(matches!(err, MatrixError::Parse { line: 3, .. }), "{err}");
        assert!("2 3\n0 1 1\n".parse::<IncidenceMatrix>().is_err());
        assert!("1 2\n0 2\n".parse::<IncidenceMatrix>().is_err());
        assert!("1 2\n0  1\n".parse::<IncidenceMatrix>().is_err());
    }

    #[test]
    fn parse_many_blocks() {
        let a = IncidenceMatrix::simplex(3);
        let b = IncidenceMatrix::simplex(4);
        let text = format_matrices(&[a.clone(), b.clone()]);
        assert_eq!(parse_matrices(&text).unwrap(), vec![a, b]);
        assert!(parse_matrices("\n\n").unwrap().is_empty());
    }

    #[test]
    fn facet_of_simplex_is_simplex() {
        let s5 = IncidenceMatrix::simplex(6);
        assert_eq!(get_facet(&s5, 0).unwrap(), IncidenceMatrix::simplex(5));
        for i in 0..6 {
            let f = get_facet(&s5, i).unwrap();
            assert_eq!((f.rows(), f.cols()), (5, 5));
        }
    }

    #[test]
    fn get_facet_row_out_of_range() {
        let s = IncidenceMatrix::simplex(4);
        assert_eq!(
            get_facet(&s, 4).unwrap_err(),
            MatrixError::RowOutOfRange { index: 4, rows: 4 }
        );
    }

    #[test]
    fn get_facet_keeps_first_of_equal_rows() {
        // rows 1 and 2 restrict to the same word on row 0's columns
        let m = IncidenceMatrix::from_bools(&[
            vec![true, true, true, false],
            vec![true, true, false, true],
            vec![true, true, false, false],
            vec![false, true, true, true],
        ])
        .unwrap();
        let f = get_facet(&m, 0).unwrap();
        assert_eq!(f.cols(), 3);
        assert_eq!(f.row_words(), &[bit(0) | bit(1), bit(1) | bit(2)]);
    }

    #[test]
    fn maximal_rows_drops_subsets_and_duplicates() {
        let w = [bit(0), bit(0) | bit(1), bit(0) | bit(1), bit(2)];
        assert_eq!(maximal_rows(&w), vec![bit(0) | bit(1), bit(2)]);
    }

    #[test]
    fn simplices_are_two_neighborly() {
        for n in 5..12 {
            assert!(is_two_neighborly(&IncidenceMatrix::simplex(n)));
        }
    }

    #[test]
    fn fig6_is_not_two_neighborly() {
        // oracle: explicit triple loop over columns
        let m = fig6();
        let mut witness = None;
        'scan: for u in 0..9 {
            for v in 0..9 {
                for w in 0..9 {
                    if u != v && v != w && u != w {
                        let all = (0..9).all(|i| !(m.get(i, u) && m.get(i, v)) || m.get(i, w));
                        if all {
                            witness = Some((u, v, w));
                            break 'scan;
                        }
                    }
                }
            }
        }
        assert!(witness.is_some());
        assert!(!is_two_neighborly(&m));
    }

    proptest::proptest! {
        #[test]
        fn last_column_check_completes_the_prefix_check(
            cols in proptest::collection::vec(0u64..1 << 12, 1..9),
            c in 0u64..1 << 12,
        ) {
            let cols: Vec<u64> = cols.iter().map(|w| w << 52).collect();
            let c = c << 52;
            let (head, _) = cols.split_at(cols.len() - 1);
            proptest::prop_assert_eq!(
                extends_two_neighborly(head, c) && extends_two_neighborly_last(&cols, c),
                extends_two_neighborly(&cols, c)
            );
        }
    }

    #[test]
    fn incremental_neighborliness_agrees_with_full_check() {
        let m = fig6();
        let cols = m.column_words();
        for take in 2..cols.len() {
            let prefix = &cols[..take];
            if !columns_two_neighborly(prefix) {
                continue;
            }
            let mut full = prefix.to_vec();
            full.push(cols[take]);
            assert_eq!(
                extends_two_neighborly(prefix, cols[take]),
                columns_two_neighborly(&full)
            );
        }
        // duplicate column is rejected
        let s = IncidenceMatrix::simplex(6).column_words();
        assert!(!extends_two_neighborly(&s, s[2]));
    }

    #[test]
    fn validate_reports_each_kind() {
        assert!(validate(&IncidenceMatrix::simplex(6), 5).is_empty());
        let dup = IncidenceMatrix::simplex(6).with_row(low_mask(6) & !bit(0)).unwrap();
        let v = validate(&dup, 3);
        assert!(v.iter().any(|x| x.kind() == "row-antichain"));
        let v = validate(&IncidenceMatrix::simplex(4), 4);
        assert!(v.iter().any(|x| x.kind() == "min-ones-per-row"));
        assert!(v.iter().any(|x| x.kind() == "min-ones-per-column"));
        let m = IncidenceMatrix::from_bools(&[vec![true, true], vec![true, false]]).unwrap();
        let kinds: Vec<_> = validate(&m, 1).iter().map(Violation::kind).collect();
        assert!(kinds.contains(&"column-antichain"));
    }

    #[test]
    fn fig6_satisfies_five_polytope_properties() {
        // direct scan: each row and column of the printed matrix has >= 5 ones
        let m = fig6();
        for i in 0..9 {
            assert!(m.row_ones(i) >= 5);
            assert!(m.column_ones(i) >= 5);
        }
        assert!(validate(&m, 5).is_empty());
    }

    #[test]
    fn pyramid_shapes() {
        let s4 = IncidenceMatrix::simplex(5);
        let p = pyramid(&s4).unwrap();
        assert_eq!((p.rows(), p.cols()), (6, 6));
        assert_eq!(p.with_sorted_rows(), IncidenceMatrix::simplex(6).with_sorted_rows());
        let m = fig6();
        let p = pyramid(&m).unwrap();
        assert_eq!((p.rows(), p.cols()), (10, 10));
        assert_eq!(p.column(9).count_ones(), 9);
        assert_eq!(p.row(9), low_mask(9));
        assert_eq!(pyramid_k(&m, 3).unwrap().cols(), 12);
    }

    #[test]
    fn transpose_and_permute() {
        let m = fig6();
        assert_eq!(m.transpose().transpose(), m);
        let id: Vec<usize> = (0..9).collect();
        assert_eq!(m.permuted(&id, &id), m);
        let rev: Vec<usize> = (0..9).rev().collect();
        let p = m.permuted(&rev, &id);
        assert_eq!(p.row(0), m.row(8));
    }
}
