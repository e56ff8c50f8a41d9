//! Underlined-codeword tables.
//!
//! A table row is an `m`-bit string with `u` underlined positions, all of
//! which hold ones. A valid table has one row per `u`-subset of `1..=m` and
//! the property that the punctured balls around its rows (the row itself
//! plus every string obtained by flipping one non-underlined bit) never
//! overlap. That second property is what lets [`CodeTable::decode`] correct
//! a single error outside the underlined positions.
//!
//! Positions are 1-indexed everywhere in the public API. Internally a row is
//! a pair of `u64` masks with bit `p - 1` standing for position `p`.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

/// Largest supported block length.
pub const MAX_BLOCK_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("missing `m=<int> u=<int>` header line")]
    HeaderMissing,
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("invalid parameters m={m} u={u} (need 1 <= u <= m <= {MAX_BLOCK_LEN})")]
    BadParameters { m: usize, u: usize },
    #[error("line {line}: expected {expected} characters, found {found}")]
    LengthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unexpected character {ch:?}")]
    BadCharacter { line: usize, ch: char },
    #[error("line {line}: expected {expected} underlined positions, found {found}")]
    UnderlineCountMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: position {position} is underlined but holds 0")]
    UnderlinedZero { line: usize, position: usize },
    #[error("line {line}: expected `<bits> <underline>`")]
    MalformedLine { line: usize },
}

/// An `m`-bit string with a set of underlined positions.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Codeword {
    len: usize,
    bits: u64,
    underline: u64,
}

fn mask_of(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Packs a slice of bits (index 0 is position 1) into a mask.
pub fn pack_bits(word: &[bool]) -> u64 {
    debug_assert!(word.len() <= MAX_BLOCK_LEN);
    word.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// Mask with the given 1-indexed positions set.
pub fn positions_mask(positions: &[usize]) -> u64 {
    positions
        .iter()
        .fold(0u64, |acc, &p| acc | (1u64 << (p - 1)))
}

/// 1-indexed positions of the set bits of `mask`, ascending.
pub fn mask_positions(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize + 1);
        rest &= rest - 1;
    }
    out
}

impl Codeword {
    /// Builds a codeword from raw masks, checking that every underlined
    /// position holds a one and that both masks fit in `len` bits.
    pub fn from_masks(len: usize, bits: u64, underline: u64) -> Option<Self> {
        if len == 0 || len > MAX_BLOCK_LEN {
            return None;
        }
        let valid = mask_of(len);
        if bits & !valid != 0 || underline & !valid != 0 || underline & !bits != 0 {
            return None;
        }
        Some(Codeword {
            len,
            bits,
            underline,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn underline_mask(&self) -> u64 {
        self.underline
    }

    /// Bit at 1-indexed position `p`.
    pub fn bit(&self, p: usize) -> bool {
        self.bits >> (p - 1) & 1 == 1
    }

    pub fn is_underlined(&self, p: usize) -> bool {
        self.underline >> (p - 1) & 1 == 1
    }

    pub fn underlined(&self) -> Vec<usize> {
        mask_positions(self.underline)
    }

    pub fn free_positions(&self) -> Vec<usize> {
        mask_positions(!self.underline & mask_of(self.len))
    }

    pub fn free_mask(&self) -> u64 {
        !self.underline & mask_of(self.len)
    }

    /// The punctured ball: the word itself followed by each single flip of a
    /// non-underlined position, in ascending position order.
    pub fn ball(&self) -> impl Iterator<Item = u64> + '_ {
        let free = self.free_positions();
        std::iter::once(self.bits).chain(free.into_iter().map(move |p| self.bits ^ (1 << (p - 1))))
    }

    pub fn bits_string(&self) -> String {
        bits_to_string(self.bits, self.len)
    }

    pub fn underline_string(&self) -> String {
        (0..self.len)
            .map(|i| {
                if self.underline >> i & 1 == 1 {
                    '^'
                } else {
                    '.'
                }
            })
            .collect()
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Codeword({} {})",
            self.bits_string(),
            self.underline_string()
        )
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.bits_string(), self.underline_string())
    }
}

/// Renders the low `len` bits of `bits` with position 1 first.
pub fn bits_to_string(bits: u64, len: usize) -> String {
    (0..len)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Outcome of decoding a word against a table. Row indices are 0-based
/// offsets into [`CodeTable::rows`]; positions are 1-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeResult {
    Exact(usize),
    OneError { row: usize, position: usize },
    NoMatch,
}

/// An immutable table of codewords with lookup indices.
#[derive(Clone)]
pub struct CodeTable {
    m: usize,
    u: usize,
    rows: Vec<Codeword>,
    by_underline: HashMap<u64, usize>,
    // ball member -> (row, flipped position or 0 for the row itself)
    ball_index: HashMap<u64, (usize, usize)>,
}

impl fmt::Debug for CodeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeTable")
            .field("m", &self.m)
            .field("u", &self.u)
            .field("rows", &self.rows.len())
            .finish()
    }
}

impl PartialEq for CodeTable {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.u == other.u && self.rows == other.rows
    }
}

impl Eq for CodeTable {}

impl CodeTable {
    /// Builds a table, checking the per-row invariants. Coverage and
    /// disjointness are not checked here; see [`verify_table`].
    pub fn new(m: usize, u: usize, rows: Vec<Codeword>) -> Result<Self, TableError> {
        if u == 0 || u > m || m > MAX_BLOCK_LEN {
            return Err(TableError::BadParameters { m, u });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len != m {
                return Err(TableError::LengthMismatch {
                    line: i + 1,
                    expected: m,
                    found: row.len,
                });
            }
            let found = row.underline.count_ones() as usize;
            if found != u {
                return Err(TableError::UnderlineCountMismatch {
                    line: i + 1,
                    expected: u,
                    found,
                });
            }
        }
        let mut by_underline = HashMap::with_capacity(rows.len());
        let mut ball_index = HashMap::with_capacity(rows.len() * (m - u + 1));
        for (i, row) in rows.iter().enumerate() {
            by_underline.entry(row.underline).or_insert(i);
            ball_index.entry(row.bits).or_insert((i, 0));
            for p in row.free_positions() {
                ball_index
                    .entry(row.bits ^ (1 << (p - 1)))
                    .or_insert((i, p));
            }
        }
        Ok(CodeTable {
            m,
            u,
            rows,
            by_underline,
            ball_index,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn rows(&self) -> &[Codeword] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Returns a copy of the table with rows replaced.
    pub fn with_rows(&self, rows: Vec<Codeword>) -> Result<Self, TableError> {
        CodeTable::new(self.m, self.u, rows)
    }

    /// Index of the row whose underline set is exactly `subset`.
    pub fn lookup_index(&self, underline: u64) -> Option<usize> {
        self.by_underline.get(&underline).copied()
    }

    /// The row whose underlined positions are exactly `subset` (1-indexed).
    pub fn lookup_by_underline(&self, subset: &[usize]) -> Result<&Codeword, LookupError> {
        if subset.iter().any(|&p| p == 0 || p > self.m) {
            return Err(LookupError::NotFound(subset.to_vec()));
        }
        self.lookup_index(positions_mask(subset))
            .map(|i| &self.rows[i])
            .ok_or_else(|| {
                let mut s = subset.to_vec();
                s.sort_unstable();
                LookupError::NotFound(s)
            })
    }

    /// Decodes a packed word using the precomputed ball index.
    pub fn decode_packed(&self, word: u64) -> DecodeResult {
        match self.ball_index.get(&word) {
            Some(&(row, 0)) => DecodeResult::Exact(row),
            Some(&(row, position)) => DecodeResult::OneError { row, position },
            None => DecodeResult::NoMatch,
        }
    }

    /// Decodes a word given as `m` bits, position 1 first.
    pub fn decode(&self, word: &[bool]) -> DecodeResult {
        assert_eq!(word.len(), self.m, "word length must equal block length");
        self.decode_packed(pack_bits(word))
    }

    /// Same answer as [`decode_packed`](Self::decode_packed), computed by
    /// scanning every row and every admissible flip.
    pub fn decode_by_scan(&self, word: u64) -> DecodeResult {
        if let Some(row) = self.rows.iter().position(|r| r.bits == word) {
            return DecodeResult::Exact(row);
        }
        for (row, r) in self.rows.iter().enumerate() {
            let diff = r.bits ^ word;
            if diff.count_ones() == 1 && diff & r.underline == 0 {
                return DecodeResult::OneError {
                    row,
                    position: diff.trailing_zeros() as usize + 1,
                };
            }
        }
        DecodeResult::NoMatch
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("no row is underlined at {0:?}")]
    NotFound(Vec<usize>),
}

/// Parses a table in the UCODE v1 text format.
pub fn parse_table(text: &str) -> Result<CodeTable, TableError> {
    let mut header: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let Some((m, u)) = header else {
            header = Some(parse_header(line, line_no)?);
            continue;
        };
        rows.push(parse_row(line, line_no, m, u)?);
    }
    let (m, u) = header.ok_or(TableError::HeaderMissing)?;
    CodeTable::new(m, u, rows)
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), TableError> {
    let bad = || TableError::BadHeader {
        line: line_no,
        text: line.to_string(),
    };
    let mut parts = line.split_whitespace();
    let m = parts
        .next()
        .and_then(|s| s.strip_prefix("m="))
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| {
            // a data line where the header should be
            if line.starts_with(['0', '1']) {
                TableError::HeaderMissing
            } else {
                bad()
            }
        })?;
    let u = parts
        .next()
        .and_then(|s| s.strip_prefix("u="))
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    if u == 0 || u > m || m > MAX_BLOCK_LEN {
        return Err(TableError::BadParameters { m, u });
    }
    Ok((m, u))
}

fn parse_row(line: &str, line_no: usize, m: usize, u: usize) -> Result<Codeword, TableError> {
    let (bits_text, marks_text) = line
        .split_once(' ')
        .ok_or(TableError::MalformedLine { line: line_no })?;
    for text in [bits_text, marks_text] {
        let found = text.chars().count();
        if found != m {
            return Err(TableError::LengthMismatch {
                line: line_no,
                expected: m,
                found,
            });
        }
    }
    let mut bits = 0u64;
    for (i, ch) in bits_text.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => bits |= 1 << i,
            _ => return Err(TableError::BadCharacter { line: line_no, ch }),
        }
    }
    let mut underline = 0u64;
    for (i, ch) in marks_text.chars().enumerate() {
        match ch {
            '.' => {}
            '^' => {
                if bits >> i & 1 == 0 {
                    return Err(TableError::UnderlinedZero {
                        line: line_no,
                        position: i + 1,
                    });
                }
                underline |= 1 << i;
            }
            _ => return Err(TableError::BadCharacter { line: line_no, ch }),
        }
    }
    let found = underline.count_ones() as usize;
    if found != u {
        return Err(TableError::UnderlineCountMismatch {
            line: line_no,
            expected: u,
            found,
        });
    }
    Ok(Codeword {
        len: m,
        bits,
        underline,
    })
}

/// Writes a table in UCODE v1: header line then one line per row.
pub fn serialize_table(table: &CodeTable) -> String {
    let mut out = String::with_capacity(16 + table.rows.len() * (2 * table.m + 2));
    out.push_str(&format!("m={} u={}\n", table.m, table.u));
    for row in &table.rows {
        out.push_str(&row.bits_string());
        out.push(' ');
        out.push_str(&row.underline_string());
        out.push('\n');
    }
    out
}

/// Underline sets that appear more than once, with the 1-based rows holding them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateUnderline {
    pub positions: Vec<usize>,
    pub rows: Vec<usize>,
}

/// Two rows whose punctured balls share a member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallCollision {
    pub word: String,
    pub first_row: usize,
    pub second_row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageCheck {
    pub expected_rows: u128,
    pub rows: usize,
    pub duplicates: Vec<DuplicateUnderline>,
    pub missing: Vec<Vec<usize>>,
    /// Set when C(m,u) is too large to list missing subsets.
    pub missing_not_enumerated: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointnessCheck {
    pub ball_members: usize,
    pub distinct_members: usize,
    pub collisions: Vec<BallCollision>,
    pub pass: bool,
}

/// Result of [`verify_table`]. Row numbers in the report are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub m: usize,
    pub u: usize,
    pub coverage: CoverageCheck,
    pub disjointness: DisjointnessCheck,
}

impl TableReport {
    pub fn pass(&self) -> bool {
        self.coverage.pass && self.disjointness.pass
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

const ENUMERATE_MISSING_LIMIT: u128 = 1 << 22;

/// Checks coverage (every `u`-subset underlined exactly once) and pairwise
/// disjointness of punctured balls. All violations are reported.
pub fn verify_table(table: &CodeTable) -> TableReport {
    let m = table.m;
    let u = table.u;
    let expected_rows = binomial(m as u64, u as u64);

    let mut holders: HashMap<u64, Vec<usize>> = HashMap::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        holders.entry(row.underline).or_default().push(i + 1);
    }
    let mut duplicates: Vec<DuplicateUnderline> = holders
        .iter()
        .filter(|(_, rows)| rows.len() > 1)
        .map(|(&mask, rows)| DuplicateUnderline {
            positions: mask_positions(mask),
            rows: rows.clone(),
        })
        .collect();
    duplicates.sort_by(|a, b| a.rows.cmp(&b.rows));

    let (missing, missing_not_enumerated) = if expected_rows <= ENUMERATE_MISSING_LIMIT {
        let missing = (1..=m)
            .combinations(u)
            .filter(|subset| !holders.contains_key(&positions_mask(subset)))
            .collect();
        (missing, false)
    } else {
        (Vec::new(), holders.len() as u128 != expected_rows)
    };
    let coverage_pass = duplicates.is_empty()
        && missing.is_empty()
        && !missing_not_enumerated
        && table.rows.len() as u128 == expected_rows;

    let mut owner: HashMap<u64, usize> = HashMap::with_capacity(table.rows.len() * (m - u + 1));
    let mut collisions = Vec::new();
    let mut members = 0usize;
    for (i, row) in table.rows.iter().enumerate() {
        for word in row.ball() {
            members += 1;
            match owner.get(&word) {
                Some(&first) => collisions.push(BallCollision {
                    word: bits_to_string(word, m),
                    first_row: first + 1,
                    second_row: i + 1,
                }),
                None => {
                    owner.insert(word, i);
                }
            }
        }
    }

    TableReport {
        m,
        u,
        coverage: CoverageCheck {
            expected_rows,
            rows: table.rows.len(),
            duplicates,
            missing,
            missing_not_enumerated,
            pass: coverage_pass,
        },
        disjointness: DisjointnessCheck {
            ball_members: members,
            distinct_members: owner.len(),
            pass: collisions.is_empty(),
            collisions,
        },
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "coverage: {} ({} rows, expected {})",
            verdict(self.coverage.pass),
            self.coverage.rows,
            self.coverage.expected_rows
        )?;
        for d in &self.coverage.duplicates {
            writeln!(
                f,
                "  duplicate underline {:?} in rows {:?}",
                d.positions, d.rows
            )?;
        }
        for s in &self.coverage.missing {
            writeln!(f, "  missing underline {:?}", s)?;
        }
        if self.coverage.missing_not_enumerated {
            writeln!(f, "  underline sets incomplete (too many subsets to list)")?;
        }
        writeln!(
            f,
            "disjointness: {} ({} ball members, {} distinct)",
            verdict(self.disjointness.pass),
            self.disjointness.ball_members,
            self.disjointness.distinct_members
        )?;
        for c in &self.disjointness.collisions {
            writeln!(
                f,
                "  {} lies in the balls of rows {} and {}",
                c.word, c.first_row, c.second_row
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> CodeTable {
        crate::canonical_table()
    }

    #[test]
    fn parses_first_and_last_canonical_rows() {
        let t = canonical();
        assert_eq!(t.len(), 220);
        assert_eq!(t.rows()[0].bits_string(), "111000100000");
        assert_eq!(t.rows()[0].underlined(), vec![1, 2, 3]);
        assert_eq!(t.rows()[219].bits_string(), "110100000111");
        assert_eq!(t.rows()[219].underlined(), vec![10, 11, 12]);
    }

    #[test]
    fn short_bit_string_is_length_mismatch() {
        let err = parse_table("m=12 u=3\n11100010000 ^^^.........\n").unwrap_err();
        assert!(matches!(
            err,
            TableError::LengthMismatch {
                line: 2,
                expected: 12,
                found: 11
            }
        ));
    }

    #[test]
    fn caret_over_zero_is_rejected() {
        let err = parse_table("m=12 u=3\n011000000000 ^^..........\n").unwrap_err();
        assert_eq!(
            err,
            TableError::UnderlinedZero {
                line: 2,
                position: 1
            }
        );
    }

    #[test]
    fn other_parse_errors() {
        assert_eq!(
            parse_table("111000100000 ^^^.........\n").unwrap_err(),
            TableError::HeaderMissing
        );
        assert_eq!(
            parse_table("# only a comment\n").unwrap_err(),
            TableError::HeaderMissing
        );
        assert!(matches!(
            parse_table("m=12 u=3\n111000100020 ^^^.........\n").unwrap_err(),
            TableError::BadCharacter { ch: '2', .. }
        ));
        assert!(matches!(
            parse_table("m=12 u=3\n111100100000 ^^^^........\n").unwrap_err(),
            TableError::UnderlineCountMismatch {
                expected: 3,
                found: 4,
                ..
            }
        ));
        assert!(matches!(
            parse_table("m=4 u=1\n1000\n").unwrap_err(),
            TableError::MalformedLine { line: 2 }
        ));
        assert!(matches!(
            parse_table("m=4 u=9\n").unwrap_err(),
            TableError::BadParameters { m: 4, u: 9 }
        ));
    }

    #[test]
    fn serialize_empty_and_single_row() {
        let empty = CodeTable::new(12, 3, vec![]).unwrap();
        assert_eq!(serialize_table(&empty), "m=12 u=3\n");
        assert_eq!(parse_table(&serialize_table(&empty)).unwrap(), empty);

        let text = "m=12 u=3\n111000100000 ^^^.........\n";
        let single = parse_table(text).unwrap();
        assert_eq!(serialize_table(&single), text);
    }

    #[test]
    fn canonical_table_verifies() {
        let report = verify_table(&canonical());
        assert!(report.pass(), "{report}");
        assert_eq!(report.coverage.rows, 220);
        assert_eq!(report.coverage.expected_rows, 220);
        assert_eq!(report.disjointness.ball_members, 2200);
        assert_eq!(report.disjointness.distinct_members, 2200);
    }

    #[test]
    fn duplicated_row_breaks_coverage() {
        let t = canonical();
        let mut rows = t.rows().to_vec();
        rows[1] = rows[0];
        let report = verify_table(&t.with_rows(rows).unwrap());
        assert!(!report.coverage.pass);
        assert_eq!(
            report.coverage.duplicates,
            vec![DuplicateUnderline {
                positions: vec![1, 2, 3],
                rows: vec![1, 2]
            }]
        );
        assert_eq!(report.coverage.missing, vec![vec![1, 2, 4]]);
    }

    #[test]
    fn overlapping_balls_are_reported() {
        let t = parse_table("m=4 u=1\n1000 ^...\n1100 .^..\n").unwrap();
        let report = verify_table(&t);
        assert!(!report.disjointness.pass);
        assert!(report.disjointness.collisions.contains(&BallCollision {
            word: "1100".into(),
            first_row: 1,
            second_row: 2,
        }));
    }

    #[test]
    fn lookup_examples() {
        let t = canonical();
        assert_eq!(
            t.lookup_by_underline(&[1, 2, 3]).unwrap().bits_string(),
            "111000100000"
        );
        assert_eq!(
            t.lookup_by_underline(&[1, 2, 4]).unwrap().bits_string(),
            "111110000000"
        );
        assert_eq!(
            t.lookup_by_underline(&[12, 10, 11]).unwrap().bits_string(),
            "110100000111"
        );
        let short = t.with_rows(t.rows()[..219].to_vec()).unwrap();
        assert_eq!(
            short.lookup_by_underline(&[10, 11, 12]).unwrap_err(),
            LookupError::NotFound(vec![10, 11, 12])
        );
    }

    fn word(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn decode_examples() {
        let t = canonical();
        assert_eq!(t.decode(&word("111000100000")), DecodeResult::Exact(0));
        assert_eq!(
            t.decode(&word("111010100000")),
            DecodeResult::OneError {
                row: 0,
                position: 5
            }
        );
        assert_eq!(t.decode(&word("000000000000")), DecodeResult::NoMatch);
    }

    #[test]
    fn decode_agrees_with_scan_on_whole_cube() {
        let t = canonical();
        for w in 0u64..1 << 12 {
            assert_eq!(t.decode_packed(w), t.decode_by_scan(w), "word {w:012b}");
        }
    }

    #[test]
    fn every_ball_member_decodes_to_its_row() {
        let t = canonical();
        for (i, row) in t.rows().iter().enumerate() {
            assert_eq!(t.decode_packed(row.bits()), DecodeResult::Exact(i));
            for p in row.free_positions() {
                let got = t.decode_packed(row.bits() ^ (1 << (p - 1)));
                assert_eq!(
                    got,
                    DecodeResult::OneError {
                        row: i,
                        position: p
                    }
                );
                assert!(!row.is_underlined(p));
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }
}
