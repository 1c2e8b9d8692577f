//! Gelfand-Zetlin patterns for the gl(n|n) chain inside pso(2n+1|2n).
//!
//! Row `r` of a rank-`n` pattern has `⌈r/2⌉` negative-indexed entries
//! `m_{-i,r}` and `⌊r/2⌋` positive-indexed entries `m_{i,r}`. Rows are shown
//! as `[m_{-k},…,m_{-1};m_1,…]`. Row `2n` is the top row.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{ratio, Rational};
use crate::graded::WeightVector;

/// `ρ(i) = 2i` for `i > 0`, `−2i−1` for `i < 0`.
pub fn rho(i: i64) -> Result<usize> {
    match i {
        0 => Err(Error::ZeroIndex),
        i if i > 0 => Ok(2 * i as usize),
        i => Ok((-2 * i - 1) as usize),
    }
}

/// Inverse of [`rho`] on row indices `r ≥ 1`.
pub fn rho_inverse(r: usize) -> i64 {
    if r.is_multiple_of(2) {
        (r / 2) as i64
    } else {
        -(r.div_ceil(2) as i64)
    }
}

/// One row; `neg[i-1] = m_{-i}` and `pos[i-1] = m_i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GzRow {
    pub neg: Vec<i64>,
    pub pos: Vec<i64>,
}

impl GzRow {
    pub fn zero(index: usize) -> Self {
        GzRow { neg: vec![0; index.div_ceil(2)], pos: vec![0; index / 2] }
    }

    /// Row `index` of the form `[ν;0]`, or `None` if `ν` does not fit.
    pub fn stable(index: usize, nu: &[i64]) -> Option<Self> {
        let k = index.div_ceil(2);
        let nu = trim(nu);
        if nu.len() > k {
            return None;
        }
        let mut row = GzRow::zero(index);
        for (a, &v) in nu.iter().enumerate() {
            row.neg[k - 1 - a] = v;
        }
        Some(row)
    }

    /// Builds a row from its display order `m_{-k},…,m_{-1},m_1,…`.
    pub fn from_display(index: usize, values: &[i64]) -> Result<Self> {
        let k = index.div_ceil(2);
        if values.len() != k + index / 2 {
            return Err(Error::MalformedPattern(format!(
                "row {index} needs {} entries, got {}",
                k + index / 2,
                values.len()
            )));
        }
        Ok(GzRow { neg: values[..k].iter().rev().copied().collect(), pos: values[k..].to_vec() })
    }

    pub fn display_values(&self) -> Vec<i64> {
        self.neg.iter().rev().chain(&self.pos).copied().collect()
    }

    pub fn neg_at(&self, i: usize) -> i64 {
        self.neg[i - 1]
    }

    pub fn pos_at(&self, i: usize) -> i64 {
        self.pos[i - 1]
    }

    pub fn sum(&self) -> i64 {
        self.neg.iter().chain(&self.pos).sum()
    }

    fn positive_count(&self) -> i64 {
        self.pos.iter().filter(|&&m| m > 0).count() as i64
    }

    /// The partition `ν` if the row has the form `[ν;0]`.
    pub fn as_stable(&self) -> Option<Vec<i64>> {
        if self.pos.iter().any(|&m| m != 0) {
            return None;
        }
        let nu: Vec<i64> = self.neg.iter().rev().copied().collect();
        let ok = nu.windows(2).all(|w| w[0] >= w[1]) && nu.iter().all(|&m| m >= 0);
        ok.then(|| trim(&nu))
    }
}

impl fmt::Display for GzRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg: Vec<String> = self.neg.iter().rev().map(i64::to_string).collect();
        let pos: Vec<String> = self.pos.iter().map(i64::to_string).collect();
        write!(f, "[{};{}]", neg.join(","), pos.join(","))
    }
}

fn trim(nu: &[i64]) -> Vec<i64> {
    let end = nu.iter().rposition(|&m| m != 0).map_or(0, |p| p + 1);
    nu[..end].to_vec()
}

/// The top row `[m]^{2n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TopRow {
    n: usize,
    row: GzRow,
}

impl TopRow {
    /// Builds and checks a top row from `m_{-n},…,m_{-1}` and `m_1,…,m_n`.
    pub fn new(neg_display: &[i64], pos: &[i64]) -> Result<Self> {
        let n = neg_display.len();
        if n == 0 || pos.len() != n {
            return Err(Error::MalformedPattern(format!(
                "top row needs n ≥ 1 entries on each side, got {} and {}",
                n,
                pos.len()
            )));
        }
        let row = GzRow { neg: neg_display.iter().rev().copied().collect(), pos: pos.to_vec() };
        let top = TopRow { n, row };
        if let Some(why) = top.condition_one() {
            return Err(Error::InvalidTopRow(format!("{top}: {why}")));
        }
        Ok(top)
    }

    pub fn zero(n: usize) -> Self {
        TopRow { n, row: GzRow::zero(2 * n) }
    }

    /// Parses `"1,0;0,0"` (brackets optional).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse(format!("top row {s:?} needs ';'")))?;
        let nums = |t: &str| -> Result<Vec<i64>> {
            t.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<i64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
                .collect()
        };
        TopRow::new(&nums(a)?, &nums(b)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self) -> &GzRow {
        &self.row
    }

    pub fn total(&self) -> i64 {
        self.row.sum()
    }

    /// `m_{-n,2n}`, the label bounded by `p`.
    pub fn first_label(&self) -> i64 {
        self.row.neg[self.n - 1]
    }

    /// Condition 1: both sides weakly decreasing, nonnegative, and
    /// `m_{-1} ≥ #{i > 0 : m_i > 0}`. Comparisons only where both indices exist.
    fn condition_one(&self) -> Option<String> {
        let r = &self.row;
        if r.neg.iter().chain(&r.pos).any(|&m| m < 0) {
            return Some("negative entry".into());
        }
        for j in (2..=self.n).rev() {
            if r.neg_at(j) < r.neg_at(j - 1) {
                return Some(format!("m(-{j}) < m(-{})", j - 1));
            }
        }
        for j in 1..self.n {
            if r.pos_at(j) < r.pos_at(j + 1) {
                return Some(format!("m({j}) < m({})", j + 1));
            }
        }
        if r.neg_at(1) < r.positive_count() {
            return Some("m(-1) < #{i: m(i) > 0}".into());
        }
        None
    }

    pub fn satisfies_condition_one(&self) -> bool {
        self.condition_one().is_none()
    }

    /// All valid top rows of rank `n` with entry total `level`.
    pub fn all_with_total(n: usize, level: usize) -> Vec<TopRow> {
        let mut out = Vec::new();
        let cells = 2 * n;
        let mut current = vec![0i64; cells];
        fn rec(n: usize, pos: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<TopRow>) {
            if pos == cur.len() {
                if left == 0 {
                    let (a, b) = cur.split_at(n);
                    if let Ok(t) = TopRow::new(a, b) {
                        out.push(t);
                    }
                }
                return;
            }
            // Weakly decreasing on each side bounds every entry by its left neighbour.
            let bound = if pos == 0 || pos == n { left } else { left.min(cur[pos - 1]) };
            for v in (0..=bound).rev() {
                cur[pos] = v;
                rec(n, pos + 1, left - v, cur, out);
            }
            cur[pos] = 0;
        }
        rec(n, 0, level as i64, &mut current, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for TopRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.row.fmt(f)
    }
}

/// A full pattern; `rows[r-1]` is row `r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GZPattern {
    n: usize,
    rows: Vec<GzRow>,
}

impl GZPattern {
    /// Checks only the shape; use [`validate_finite`] for the conditions.
    pub fn new(n: usize, rows: Vec<GzRow>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRank(n));
        }
        if rows.len() != 2 * n {
            return Err(Error::MalformedPattern(format!("rank {n} needs {} rows, got {}", 2 * n, rows.len())));
        }
        for (k, row) in rows.iter().enumerate() {
            let r = k + 1;
            if row.neg.len() != r.div_ceil(2) || row.pos.len() != r / 2 {
                return Err(Error::MalformedPattern(format!("row {r} has shape ({};{})", row.neg.len(), row.pos.len())));
            }
        }
        Ok(GZPattern { n, rows })
    }

    /// Builds a pattern from rows in display order, row 1 first.
    pub fn from_display(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.len() != 2 * n {
            return Err(Error::MalformedPattern(format!("rank {n} needs {} rows, got {}", 2 * n, rows.len())));
        }
        let rows = rows.iter().enumerate().map(|(k, v)| GzRow::from_display(k + 1, v)).collect::<Result<_>>()?;
        GZPattern::new(n, rows)
    }

    pub fn zero(n: usize) -> Self {
        GZPattern { n, rows: (1..=2 * n).map(GzRow::zero).collect() }
    }

    /// The pattern of `c̄_i^+|0⟩`: rows `ρ(i)..2n` are `[1,0,…;0,…]`.
    pub fn creation(n: usize, i: i64) -> Result<Self> {
        let start = rho(i)?;
        if start > 2 * n {
            return Err(Error::OutOfRange { mode: i, rank: n });
        }
        let rows = (1..=2 * n)
            .map(|r| if r >= start { GzRow::stable(r, &[1]).expect("fits") } else { GzRow::zero(r) })
            .collect();
        Ok(GZPattern { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `r`, `1 ≤ r ≤ 2n`.
    pub fn row(&self, r: usize) -> &GzRow {
        &self.rows[r - 1]
    }

    pub fn rows(&self) -> &[GzRow] {
        &self.rows
    }

    pub fn top(&self) -> TopRow {
        TopRow { n: self.n, row: self.rows[2 * self.n - 1].clone() }
    }

    pub fn level(&self) -> i64 {
        self.top().total()
    }
}

impl fmt::Display for GZPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().rev().map(GzRow::to_string).collect();
        f.write_str(&rows.join(" "))
    }
}

impl Serialize for GZPattern {
    /// Rows in display order, top row last.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<i64>> = self.rows.iter().map(GzRow::display_values).collect();
        rows.serialize(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GzVerdict {
    Pass,
    /// Condition numbers follow the validator's list; `0` flags a negative entry.
    Fail { condition: u8, position: String },
}

impl GzVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, GzVerdict::Pass)
    }

    fn fail(condition: u8, position: impl Into<String>) -> Self {
        GzVerdict::Fail { condition, position: position.into() }
    }
}

/// Horizontal-strip check between row `2s` and row `2s+1`:
/// `#{i ∈ [1,s] : m_{i,2s} > 0} ≤ m_{-1,2s+1}`.
fn containment_holds(even: &GzRow, odd_above: &GzRow) -> bool {
    even.positive_count() <= odd_above.neg_at(1)
}

/// Checks the seven branching conditions, then condition 8, the
/// containment `#{i ∈ [1,s] : m_{i,2s} > 0} ≤ m_{-1,2s+1}` for `s ∈ [1, n−1]`.
///
/// Without condition 8 the list admits patterns whose weights fall outside
/// the module (e.g. `[1,0;0,0] [1,0;0] [1;1] [0]` at rank 2).
pub fn validate_finite(p: &GZPattern) -> GzVerdict {
    let n = p.n;
    let row = |r: usize| p.row(r);
    for r in 1..=2 * n {
        if row(r).neg.iter().chain(&row(r).pos).any(|&m| m < 0) {
            return GzVerdict::fail(0, format!("row {r}"));
        }
    }
    if let Some(why) = p.top().condition_one() {
        return GzVerdict::fail(1, format!("row {}: {why}", 2 * n));
    }
    for s in 1..=n {
        for i in 1..=s {
            let theta = row(2 * s).neg_at(i) - row(2 * s - 1).neg_at(i);
            if !(0..=1).contains(&theta) {
                return GzVerdict::fail(2, format!("i=-{i}, row {}", 2 * s - 1));
            }
        }
    }
    for s in 1..n {
        for i in 1..=s {
            let theta = row(2 * s).pos_at(i) - row(2 * s + 1).pos_at(i);
            if !(0..=1).contains(&theta) {
                return GzVerdict::fail(3, format!("i={i}, row {}", 2 * s));
            }
        }
    }
    for s in 1..=n {
        if row(2 * s).neg_at(1) < row(2 * s).positive_count() {
            return GzVerdict::fail(4, format!("row {}", 2 * s));
        }
    }
    for s in 2..=n {
        if row(2 * s - 1).neg_at(1) < row(2 * s - 1).positive_count() {
            return GzVerdict::fail(5, format!("row {}", 2 * s - 1));
        }
    }
    for s in 2..=n {
        for i in 1..s {
            let (up, mid) = (row(2 * s), row(2 * s - 1));
            if up.pos_at(i) < mid.pos_at(i) || mid.pos_at(i) < up.pos_at(i + 1) {
                return GzVerdict::fail(6, format!("i={i}, row {}", 2 * s - 1));
            }
        }
    }
    for s in 1..n {
        for i in 1..=s {
            let (up, mid) = (row(2 * s + 1), row(2 * s));
            if up.neg_at(i + 1) < mid.neg_at(i) || mid.neg_at(i) < up.neg_at(i) {
                return GzVerdict::fail(7, format!("i=-{i}, row {}", 2 * s));
            }
        }
    }
    for s in 1..n {
        if !containment_holds(row(2 * s), row(2 * s + 1)) {
            return GzVerdict::fail(8, format!("row {}", 2 * s));
        }
    }
    GzVerdict::Pass
}

/// The same conditions in the re-indexed form used for infinite patterns
/// (six conditions plus containment as 7), applied to every `r` whose rows
/// lie in the given body of `2s` rows.
fn validate_body(rows: &[GzRow]) -> GzVerdict {
    let top = rows.len();
    let row = |r: usize| &rows[r - 1];
    for (k, r) in rows.iter().enumerate() {
        if r.neg.iter().chain(&r.pos).any(|&m| m < 0) {
            return GzVerdict::fail(0, format!("row {}", k + 1));
        }
    }
    for r in (1..).take_while(|r| 2 * r <= top) {
        for i in 1..=r {
            let theta = row(2 * r).neg_at(i) - row(2 * r - 1).neg_at(i);
            if !(0..=1).contains(&theta) {
                return GzVerdict::fail(1, format!("i=-{i}, row {}", 2 * r - 1));
            }
        }
    }
    for r in (1..).take_while(|r| 2 * r < top) {
        for i in 1..=r {
            let theta = row(2 * r).pos_at(i) - row(2 * r + 1).pos_at(i);
            if !(0..=1).contains(&theta) {
                return GzVerdict::fail(2, format!("i={i}, row {}", 2 * r));
            }
        }
    }
    for r in (1..).take_while(|r| 2 * r <= top) {
        if row(2 * r).neg_at(1) < row(2 * r).positive_count() {
            return GzVerdict::fail(3, format!("row {}", 2 * r));
        }
    }
    for r in (1..).take_while(|r| 2 * r < top) {
        if row(2 * r + 1).neg_at(1) < row(2 * r + 1).positive_count() {
            return GzVerdict::fail(4, format!("row {}", 2 * r + 1));
        }
    }
    for r in (1..).take_while(|r| 2 * r + 2 <= top) {
        for i in 1..=r {
            let (up, mid) = (row(2 * r + 2), row(2 * r + 1));
            if up.pos_at(i) < mid.pos_at(i) || mid.pos_at(i) < up.pos_at(i + 1) {
                return GzVerdict::fail(5, format!("i={i}, row {}", 2 * r + 1));
            }
        }
    }
    for r in (1..).take_while(|r| 2 * r < top) {
        for i in 1..=r {
            let (up, mid) = (row(2 * r + 1), row(2 * r));
            if up.neg_at(i + 1) < mid.neg_at(i) || mid.neg_at(i) < up.neg_at(i) {
                return GzVerdict::fail(6, format!("i=-{i}, row {}", 2 * r));
            }
        }
    }
    for r in (1..).take_while(|r| 2 * r < top) {
        if !containment_holds(row(2 * r), row(2 * r + 1)) {
            return GzVerdict::fail(7, format!("row {}", 2 * r));
        }
    }
    GzVerdict::Pass
}

/// Candidate rows below `above` (row `index + 1`), in lexicographic display order.
fn rows_below(above: &GzRow, index: usize) -> Vec<GzRow> {
    let mut ranges: Vec<Vec<i64>> = Vec::new();
    if index % 2 == 1 {
        // Odd row 2s-1 below row 2s: θ on negatives, betweenness on positives.
        let s = index.div_ceil(2);
        for i in (1..=s).rev() {
            let m = above.neg_at(i);
            ranges.push(((m - 1).max(0)..=m).collect());
        }
        for i in 1..s {
            ranges.push((above.pos_at(i + 1)..=above.pos_at(i)).collect());
        }
    } else {
        // Even row 2s below row 2s+1: betweenness on negatives, θ on positives.
        let s = index / 2;
        for i in (1..=s).rev() {
            ranges.push((above.neg_at(i)..=above.neg_at(i + 1)).collect());
        }
        for i in 1..=s {
            let m = above.pos_at(i);
            ranges.push((m..=m + 1).collect());
        }
    }
    let k = index.div_ceil(2);
    let mut out: Vec<GzRow> = ranges
        .into_iter()
        .multi_cartesian_product()
        .map(|vals| GzRow { neg: vals[..k].iter().rev().copied().collect(), pos: vals[k..].to_vec() })
        .filter(|row| row.neg_at(1) >= row.positive_count())
        .filter(|row| index % 2 == 1 || containment_holds(row, above))
        .collect();
    out.sort_by_key(GzRow::display_values);
    out
}

/// All patterns with the given top row, rows chosen top-down in lexicographic order.
pub fn enumerate_patterns(top: &TopRow) -> Vec<GZPattern> {
    let n = top.n;
    let mut out = Vec::new();
    let mut stack = vec![top.row.clone()];
    fn rec(n: usize, stack: &mut Vec<GzRow>, out: &mut Vec<GZPattern>) {
        let index = 2 * n - stack.len();
        if index == 0 {
            let rows: Vec<GzRow> = stack.iter().rev().cloned().collect();
            out.push(GZPattern { n, rows });
            return;
        }
        let above = stack.last().expect("nonempty").clone();
        for row in rows_below(&above, index) {
            stack.push(row);
            rec(n, stack, out);
            stack.pop();
        }
    }
    rec(n, &mut stack, &mut out);
    out
}

/// `vacuum + Σ_r (|row r| − |row r−1|) ε_{ρ⁻¹(r)}` with vacuum `−p/2` on
/// negative and `+p/2` on positive indices.
pub fn pattern_weight(pattern: &GZPattern, p: &Rational) -> WeightVector {
    let mut w = vacuum_weight(pattern.n, p);
    let mut prev = 0;
    for r in 1..=2 * pattern.n {
        let sum = pattern.row(r).sum();
        w.add_to(rho_inverse(r), &Rational::from_integer((sum - prev).into()));
        prev = sum;
    }
    w
}

pub fn vacuum_weight(n: usize, p: &Rational) -> WeightVector {
    let half = p * ratio(1, 2);
    let mut w = WeightVector::new();
    for i in 1..=n as i64 {
        w.add_to(-i, &-half.clone());
        w.add_to(i, &half);
    }
    w
}

/// Tops `[m]_{+(k)}` for `k ∈ [-n,n]*` that still satisfy condition 1.
pub fn tensor_branch(top: &TopRow) -> Vec<TopRow> {
    let n = top.n;
    let mut out = Vec::new();
    for k in (1..=n).rev().map(|i| -(i as i64)).chain(1..=n as i64) {
        let mut row = top.row.clone();
        if k < 0 {
            row.neg[(-k - 1) as usize] += 1;
        } else {
            row.pos[(k - 1) as usize] += 1;
        }
        let cand = TopRow { n, row };
        if cand.satisfies_condition_one() {
            out.push(cand);
        }
    }
    out
}

/// Smallest `s` such that rows `s..2n` all equal `[ν;0]` for one partition `ν`.
pub fn stability_index(pattern: &GZPattern) -> Option<usize> {
    let top = 2 * pattern.n;
    let nu = pattern.row(top).as_stable()?;
    let mut s = top;
    while s > 1 && pattern.row(s - 1).as_stable().as_ref() == Some(&nu) {
        s -= 1;
    }
    Some(s)
}

fn stable_partition(pattern: &GZPattern) -> Result<Vec<i64>> {
    pattern
        .row(2 * pattern.n)
        .as_stable()
        .ok_or_else(|| Error::Precondition(format!("top row {} is not of the form [ν;0]", pattern.top())))
}

/// Rank `n+1` pattern with two more `[ν;0]` rows on top.
pub fn phi_extend(pattern: &GZPattern) -> Result<GZPattern> {
    let nu = stable_partition(pattern)?;
    let n = pattern.n;
    let mut rows = pattern.rows.clone();
    rows.push(GzRow::stable(2 * n + 1, &nu).expect("ν fits a longer row"));
    rows.push(GzRow::stable(2 * n + 2, &nu).expect("ν fits a longer row"));
    Ok(GZPattern { n: n + 1, rows })
}

/// A row-stable pattern of infinite rank, stored by its even stability index
/// `2s`, the partition `ν` and the body of rows `1..2s`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InfiniteGZPattern {
    stability: usize,
    nu: Vec<i64>,
    body: Vec<GzRow>,
}

impl InfiniteGZPattern {
    /// Builds from a body of `2s` rows; the stored form is normalized to the
    /// smallest even stability index.
    pub fn new(nu: Vec<i64>, body: Vec<GzRow>) -> Result<Self> {
        if body.is_empty() || !body.len().is_multiple_of(2) {
            return Err(Error::MalformedPattern(format!("body must have an even number of rows, got {}", body.len())));
        }
        let pattern = GZPattern::new(body.len() / 2, body)?;
        let nu = trim(&nu);
        let top = pattern.row(2 * pattern.n);
        if top.as_stable().as_ref() != Some(&nu) {
            return Err(Error::MalformedPattern(format!("row {} is {top}, not [ν;0] for ν = {nu:?}", 2 * pattern.n)));
        }
        phi_to_infinite(&pattern)
    }

    pub fn stability(&self) -> usize {
        self.stability
    }

    pub fn nu(&self) -> &[i64] {
        &self.nu
    }

    pub fn body(&self) -> &[GzRow] {
        &self.body
    }

    /// Row `r` of the infinite pattern.
    pub fn row(&self, r: usize) -> GzRow {
        if r <= self.body.len() {
            self.body[r - 1].clone()
        } else {
            GzRow::stable(r, &self.nu).expect("ν fits above the body")
        }
    }
}

impl Serialize for InfiniteGZPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let body: Vec<Vec<i64>> = self.body.iter().map(GzRow::display_values).collect();
        let mut st = s.serialize_struct("InfiniteGZPattern", 3)?;
        st.serialize_field("stability", &self.stability)?;
        st.serialize_field("nu", &self.nu)?;
        st.serialize_field("body", &body)?;
        st.end()
    }
}

/// Checks the infinite-rank conditions, the stable form of row `2s` and `ν₁ ≤ p`.
/// Conditions 1–7 are those of [`validate_body`]; 8 is the stable form and 9 the cutoff.
pub fn validate_infinite(pattern: &InfiniteGZPattern, p: &Rational) -> GzVerdict {
    let verdict = validate_body(&pattern.body);
    if !verdict.passed() {
        return verdict;
    }
    let top = pattern.body.len();
    if pattern.body[top - 1].as_stable().as_deref() != Some(pattern.nu.as_slice()) {
        return GzVerdict::fail(8, format!("row {top}"));
    }
    if let Some(&nu1) = pattern.nu.first() {
        if Rational::from_integer(nu1.into()) > *p {
            return GzVerdict::fail(9, format!("ν₁ = {nu1}"));
        }
    }
    GzVerdict::Pass
}

/// `φ_{2n,∞}`: requires the top row to be `[ν;0]`.
pub fn phi_to_infinite(pattern: &GZPattern) -> Result<InfiniteGZPattern> {
    let nu = stable_partition(pattern)?;
    let s = stability_index(pattern).expect("top row is stable");
    let even = s.div_ceil(2).max(1) * 2;
    Ok(InfiniteGZPattern { stability: even, nu, body: pattern.rows[..even].to_vec() })
}

/// `φ_{2s,∞}^{-1}`: the rank-`s` restriction, for `2s` at least the stability index.
pub fn phi_from_infinite(pattern: &InfiniteGZPattern, two_s: usize) -> Result<GZPattern> {
    if !two_s.is_multiple_of(2) || two_s == 0 {
        return Err(Error::Precondition(format!("row index {two_s} must be even and positive")));
    }
    if two_s < pattern.stability {
        return Err(Error::Precondition(format!(
            "row {two_s} is below the stability index {}",
            pattern.stability
        )));
    }
    let rows = (1..=two_s).map(|r| pattern.row(r)).collect();
    GZPattern::new(two_s / 2, rows)
}

/// Patterns grouped by weight, over all valid tops with total `level`.
/// With `cutoff = Some(p)` only tops with `m_{-n,2n} ≤ p` are counted.
pub fn count_patterns(n: usize, p: &Rational, level: usize, cutoff: Option<i64>) -> BTreeMap<WeightVector, usize> {
    let mut out = BTreeMap::new();
    for top in TopRow::all_with_total(n, level) {
        if cutoff.is_some_and(|c| top.first_label() > c) {
            continue;
        }
        for pattern in enumerate_patterns(&top) {
            *out.entry(pattern_weight(&pattern, p)).or_insert(0) += 1;
        }
    }
    out
}

/// Basis of the level-`L` part of the irreducible module: patterns with `m_{-n,2n} ≤ p`.
pub fn count_basis(n: usize, p: i64, level: usize) -> BTreeMap<WeightVector, usize> {
    count_patterns(n, &Rational::from_integer(p.into()), level, Some(p))
}

/// Convenience: total basis size at a level.
pub fn basis_size(n: usize, p: i64, level: usize) -> usize {
    count_basis(n, p, level).values().sum()
}
