//! Matrix realization of pso(2n+1|2n) and pso(∞|∞).
//!
//! Rows and columns are labelled by integers in `[-2n, 2n]`. Block index
//! `i > 0` owns matrix indices `{2i-1, 2i}`, block `i < 0` owns `{2i, 2i+1}`
//! and block `0` is the single index `0`. An element of rank `m` is also an
//! element of every rank `n > m`; brackets promote to the larger rank.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{exact_rank, rat, ratio, Echelon, ExactMatrix, QSqrt2, Rational};

/// An element `(a1, a2)` of ℤ2×ℤ2.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Grade {
    pub a1: u8,
    pub a2: u8,
}

impl Grade {
    pub const ZERO: Grade = Grade { a1: 0, a2: 0 };
    /// Grade of parafermion generators.
    pub const FERMI: Grade = Grade { a1: 1, a2: 1 };
    /// Grade of paraboson generators.
    pub const BOSE: Grade = Grade { a1: 1, a2: 0 };
    pub const MIXED: Grade = Grade { a1: 0, a2: 1 };
    pub const ALL: [Grade; 4] = [Grade::ZERO, Grade::MIXED, Grade::BOSE, Grade::FERMI];

    pub fn new(a1: u8, a2: u8) -> Self {
        Grade { a1: a1 & 1, a2: a2 & 1 }
    }

    /// `a·b = a1 b1 + a2 b2 (mod 2)`.
    pub fn dot(self, other: Grade) -> u8 {
        (self.a1 * other.a1 + self.a2 * other.a2) & 1
    }

    /// `(−1)^{a·b}`.
    pub fn sign(self, other: Grade) -> i64 {
        if self.dot(other) == 0 {
            1
        } else {
            -1
        }
    }
}

impl Add for Grade {
    type Output = Grade;
    fn add(self, o: Grade) -> Grade {
        Grade { a1: self.a1 ^ o.a1, a2: self.a2 ^ o.a2 }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a1, self.a2].serialize(s)
    }
}

/// The 2×2 forms defining the block constraints.
pub struct BlockForm;

impl BlockForm {
    pub const I: [[i64; 2]; 2] = [[0, 1], [1, 0]];
    pub const J: [[i64; 2]; 2] = [[0, 1], [-1, 0]];
}

/// Grade of the matrix position `(row, col)`, read off the block grading table.
pub fn position_grade(row: i64, col: i64) -> Result<Grade> {
    use std::cmp::Ordering::*;
    Ok(match (row.cmp(&0), col.cmp(&0)) {
        (Equal, Equal) => return Err(Error::OriginPosition),
        (Less, Less) | (Greater, Greater) => Grade::ZERO,
        (Less, Equal) | (Equal, Less) => Grade::FERMI,
        (Greater, Equal) | (Equal, Greater) => Grade::BOSE,
        (Less, Greater) | (Greater, Less) => Grade::MIXED,
    })
}

/// Matrix indices owned by a block index.
pub fn block_indices(block: i64) -> Vec<i64> {
    match block {
        0 => vec![0],
        b if b > 0 => vec![2 * b - 1, 2 * b],
        b => vec![2 * b, 2 * b + 1],
    }
}

/// Smallest rank whose index range `[-2n, 2n]` contains `index`.
fn rank_of_index(index: i64) -> usize {
    index.unsigned_abs().div_ceil(2) as usize
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "plus" | "create" => Ok(Sign::Plus),
            "-" | "minus" | "annihilate" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("not a sign: {s:?}"))),
        }
    }
}

/// The parastatistics operator `c̄_mode^sign`: a parafermion for negative
/// modes, a paraboson for positive ones.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub mode: i64,
    pub sign: Sign,
}

impl Generator {
    pub fn new(mode: i64, sign: Sign) -> Result<Self> {
        if mode == 0 {
            return Err(Error::ZeroIndex);
        }
        Ok(Generator { mode, sign })
    }

    pub fn plus(mode: i64) -> Self {
        assert_ne!(mode, 0, "mode must be nonzero");
        Generator { mode, sign: Sign::Plus }
    }

    pub fn minus(mode: i64) -> Self {
        assert_ne!(mode, 0, "mode must be nonzero");
        Generator { mode, sign: Sign::Minus }
    }

    pub fn grade(self) -> Grade {
        mode_grade(self.mode)
    }

    pub fn dagger(self) -> Generator {
        Generator { mode: self.mode, sign: self.sign.flip() }
    }

    pub fn name(self) -> String {
        let kind = if self.mode < 0 { 'f' } else { 'b' };
        format!("{kind}({},{})", self.mode, self.sign.symbol())
    }

    pub fn matrix(self) -> AlgebraElement {
        generator(self.mode, self.sign).expect("nonzero mode")
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn mode_grade(mode: i64) -> Grade {
    if mode < 0 {
        Grade::FERMI
    } else {
        Grade::BOSE
    }
}

/// Finitely supported weight `Σ w_i ε_i`; zero coefficients are not stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct WeightVector(BTreeMap<i64, Rational>);

impl WeightVector {
    pub fn new() -> Self {
        WeightVector::default()
    }

    pub fn get(&self, i: i64) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_to(&mut self, i: i64, k: &Rational) {
        let v = self.get(i) + k;
        if v.is_zero() {
            self.0.remove(&i);
        } else {
            self.0.insert(i, v);
        }
    }

    pub fn with(mut self, i: i64, k: Rational) -> Self {
        self.add_to(i, &k);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.0.iter().map(|(&i, v)| (i, v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Componentwise difference.
    pub fn minus(&self, other: &WeightVector) -> WeightVector {
        let mut out = self.clone();
        for (i, v) in other.iter() {
            out.add_to(i, &-v.clone());
        }
        out
    }

    /// `[w_{-n},…,w_{-1};w_1,…,w_n]` over the modes of rank `n`.
    pub fn display(&self, n: usize) -> String {
        let n = n as i64;
        let neg: Vec<String> = (1..=n).rev().map(|i| self.get(-i).to_string()).collect();
        let pos: Vec<String> = (1..=n).map(|i| self.get(i).to_string()).collect();
        format!("[{};{}]", neg.join(","), pos.join(","))
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(i64, String)> = self.iter().map(|(i, v)| (i, v.to_string())).collect();
        pairs.serialize(s)
    }
}

/// A finitely supported matrix over ℚ(√2) with a rank tag and optional grade.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    rank: usize,
    entries: BTreeMap<(i64, i64), QSqrt2>,
    grade: Option<Grade>,
}

impl PartialEq for AlgebraElement {
    /// Equality of the underlying (infinite) matrices.
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for AlgebraElement {}

impl AlgebraElement {
    /// The zero element of rank `rank`, tagged with `grade`.
    pub fn zero(rank: usize, grade: Grade) -> Self {
        AlgebraElement { rank, entries: BTreeMap::new(), grade: Some(grade) }
    }

    /// Builds an element from entries; the grade is inferred when every
    /// nonzero entry sits in a position of the same grade.
    pub fn from_entries(rank: usize, entries: impl IntoIterator<Item = ((i64, i64), QSqrt2)>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank(rank));
        }
        let bound = 2 * rank as i64;
        let mut map = BTreeMap::new();
        for ((r, c), v) in entries {
            if v.is_zero() {
                continue;
            }
            if (r, c) == (0, 0) {
                return Err(Error::OriginPosition);
            }
            if r.abs() > bound || c.abs() > bound {
                return Err(Error::OutOfRange { mode: r.abs().max(c.abs()), rank });
            }
            let slot: &mut QSqrt2 = map.entry((r, c)).or_default();
            *slot = slot.clone() + v;
        }
        map.retain(|_, v: &mut QSqrt2| !v.is_zero());
        let mut e = AlgebraElement { rank, entries: map, grade: None };
        e.grade = e.infer_grade();
        Ok(e)
    }

    /// The matrix unit `e_{ij}`.
    pub fn unit(rank: usize, i: i64, j: i64) -> Result<Self> {
        Self::from_entries(rank, [((i, j), QSqrt2::one())])
    }

    fn infer_grade(&self) -> Option<Grade> {
        let mut grades = self.entries.keys().map(|&(r, c)| position_grade(r, c).expect("origin excluded"));
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    /// Re-tags the element with an explicit grade, checking it against the support.
    pub fn with_grade(mut self, grade: Grade) -> Result<Self> {
        match self.infer_grade() {
            Some(g) if g != grade => Err(Error::NotHomogeneous),
            None if !self.entries.is_empty() => Err(Error::NotHomogeneous),
            _ => {
                self.grade = Some(grade);
                Ok(self)
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn grade(&self) -> Option<Grade> {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, r: i64, c: i64) -> QSqrt2 {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i64, i64), &QSqrt2)> {
        self.entries.iter()
    }

    /// Smallest rank containing the support.
    pub fn support_rank(&self) -> usize {
        self.entries
            .keys()
            .map(|&(r, c)| rank_of_index(r).max(rank_of_index(c)))
            .max()
            .unwrap_or(1)
            .max(1)
    }

    /// Same matrix viewed at a larger rank.
    pub fn embed(&self, rank: usize) -> Result<Self> {
        if rank < self.support_rank() {
            return Err(Error::InvalidRank(rank));
        }
        Ok(AlgebraElement { rank, ..self.clone() })
    }

    fn combine(&self, other: &Self, k: &QSqrt2) -> Self {
        let mut entries = self.entries.clone();
        for (&pos, v) in &other.entries {
            let slot = entries.entry(pos).or_default();
            *slot = slot.clone() + &(k.clone() * v);
        }
        entries.retain(|_, v| !v.is_zero());
        let grade = match (self.grade, other.grade) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ if entries.is_empty() => self.grade.or(other.grade),
            _ => None,
        };
        let mut out = AlgebraElement { rank: self.rank.max(other.rank), entries, grade };
        if out.grade.is_none() {
            out.grade = out.infer_grade();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &QSqrt2::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-QSqrt2::one())
    }

    pub fn scale(&self, k: &QSqrt2) -> Self {
        let mut out = self.clone();
        if k.is_zero() {
            out.entries.clear();
        } else {
            for v in out.entries.values_mut() {
                *v = v.clone() * k;
            }
        }
        out
    }

    pub fn scale_rational(&self, k: &Rational) -> Self {
        self.scale(&QSqrt2::rational(k.clone()))
    }

    /// Plain matrix product; the grade is additive for homogeneous factors.
    pub fn matmul(&self, other: &Self) -> Self {
        let mut by_row: BTreeMap<i64, Vec<(i64, &QSqrt2)>> = BTreeMap::new();
        for (&(r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut entries: BTreeMap<(i64, i64), QSqrt2> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    let slot = entries.entry((r, c)).or_default();
                    *slot = slot.clone() + &(a.clone() * b);
                }
            }
        }
        entries.retain(|_, v| !v.is_zero());
        let grade = match (self.grade, other.grade) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        AlgebraElement { rank: self.rank.max(other.rank), entries, grade }
    }

    /// `xy − yx`, regardless of grades.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// `xy + yx`, regardless of grades.
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.matmul(other).add(&other.matmul(self))
    }

    pub fn trace(&self) -> QSqrt2 {
        self.entries
            .iter()
            .filter(|((r, c), _)| r == c)
            .fold(QSqrt2::zero(), |acc, (_, v)| acc + v)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(r, c)| r == c)
    }

    pub fn is_rational(&self) -> bool {
        self.entries.values().all(QSqrt2::is_rational)
    }

    /// Flattens to `(4n+1)²` entries in row-major order over `[-2n, 2n]²`.
    pub fn flatten(&self, rank: usize) -> Vec<QSqrt2> {
        let side = 4 * rank + 1;
        let off = 2 * rank as i64;
        let mut v = vec![QSqrt2::zero(); side * side];
        for (&(r, c), x) in &self.entries {
            assert!(r.abs() <= off && c.abs() <= off, "entry outside flattening rank");
            v[(r + off) as usize * side + (c + off) as usize] = x.clone();
        }
        v
    }

    /// Flattening over ℚ: every ℚ(√2) entry contributes its two rational parts.
    pub fn flatten_rational(&self, rank: usize) -> Vec<Rational> {
        self.flatten(rank).into_iter().flat_map(|x| [x.a, x.b]).collect()
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .entries
            .iter()
            .map(|((r, c), v)| format!("({v})e[{r},{c}]"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// `⟦x, y⟧ = xy − (−1)^{a·b} yx` for homogeneous `x`, `y` of grades `a`, `b`.
pub fn graded_bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    let (Some(a), Some(b)) = (x.grade, y.grade) else {
        return Err(Error::NotHomogeneous);
    };
    let xy = x.matmul(y);
    let yx = y.matmul(x);
    let mut out = if a.sign(b) == 1 { xy.sub(&yx) } else { xy.add(&yx) };
    out.grade = Some(a + b);
    Ok(out)
}

/// `c̄_i^±` as a matrix: parafermion combination for `i < 0`, paraboson for `i > 0`.
pub fn generator(i: i64, sign: Sign) -> Result<AlgebraElement> {
    if i == 0 {
        return Err(Error::ZeroIndex);
    }
    let s2 = |k: i64| QSqrt2::sqrt2_multiple(rat(k));
    let m = i.abs();
    let entries = match (i < 0, sign) {
        (true, Sign::Plus) => [((-2 * m, 0), s2(1)), ((0, -2 * m + 1), s2(-1))],
        (true, Sign::Minus) => [((0, -2 * m), s2(1)), ((-2 * m + 1, 0), s2(-1))],
        (false, Sign::Plus) => [((0, 2 * m), s2(1)), ((2 * m - 1, 0), s2(1))],
        (false, Sign::Minus) => [((0, 2 * m - 1), s2(1)), ((2 * m, 0), s2(-1))],
    };
    AlgebraElement::from_entries(m as usize, entries)?.with_grade(mode_grade(i))
}

/// `h_i = ½⟦c̄_i^+, c̄_i^−⟧`.
pub fn cartan_h(i: i64) -> Result<AlgebraElement> {
    gl_e(i, i)
}

/// `E_{jk} = ½⟦c̄_j^+, c̄_k^−⟧`.
pub fn gl_e(j: i64, k: i64) -> Result<AlgebraElement> {
    let b = graded_bracket(&generator(j, Sign::Plus)?, &generator(k, Sign::Minus)?)?;
    Ok(b.scale_rational(&ratio(1, 2)))
}

/// ℤ2 degree of `E_{jk}` inside gl(n|n): 0 when `j`, `k` have the same sign.
pub fn gl_degree(j: i64, k: i64) -> u8 {
    u8::from((j < 0) != (k < 0))
}

/// Modes `[-n, n]*` in increasing order.
pub fn modes(n: usize) -> Vec<i64> {
    let n = n as i64;
    (-n..=n).filter(|&i| i != 0).collect()
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ConstraintFamily {
    /// `I Y_{-i,-j} + Y_{-j,-i}ᵀ I = 0`
    NegNeg,
    /// `J Y_{i,j} + Y_{j,i}ᵀ J = 0`
    PosPos,
    /// `I Y_{-i,j} + Y_{j,-i}ᵀ J = 0`
    NegPos,
    /// `Y_{0,-j} + Y_{-j,0}ᵀ I = 0`
    ZeroNeg,
    /// `Y_{0,j} − Y_{j,0}ᵀ J = 0`
    ZeroPos,
    /// The (0,0) entry must vanish.
    Origin,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BlockVerdict {
    Pass,
    Fail { family: ConstraintFamily, i: i64, j: i64 },
}

impl BlockVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, BlockVerdict::Pass)
    }
}

type Small = Vec<Vec<QSqrt2>>;

fn block(y: &AlgebraElement, bi: i64, bj: i64) -> Small {
    let rows = block_indices(bi);
    let cols = block_indices(bj);
    rows.iter().map(|&r| cols.iter().map(|&c| y.entry(r, c)).collect()).collect()
}

fn form(m: [[i64; 2]; 2]) -> Small {
    m.iter().map(|r| r.iter().map(|&x| QSqrt2::from_int(x)).collect()).collect()
}

fn small_mul(a: &Small, b: &Small) -> Small {
    let inner = b.len();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..inner).fold(QSqrt2::zero(), |acc, k| acc + &(a[i][k].clone() * &b[k][j])))
                .collect()
        })
        .collect()
}

fn small_t(a: &Small) -> Small {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn small_combine(a: &Small, b: &Small, sign: i64) -> Vec<QSqrt2> {
    let s = QSqrt2::from_int(sign);
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x.clone() + &(s.clone() * y))
        .collect()
}

/// Every scalar residual of the block constraints, tagged with its family
/// and block pair, in a fixed order.
fn constraint_residuals(y: &AlgebraElement, rank: usize) -> Vec<(ConstraintFamily, i64, i64, Vec<QSqrt2>)> {
    let (i_form, j_form) = (form(BlockForm::I), form(BlockForm::J));
    let n = rank as i64;
    let mut out = Vec::new();
    out.push((ConstraintFamily::Origin, 0, 0, vec![y.entry(0, 0)]));
    for i in 1..=n {
        for j in 1..=n {
            let lhs = small_mul(&i_form, &block(y, -i, -j));
            let rhs = small_mul(&small_t(&block(y, -j, -i)), &i_form);
            out.push((ConstraintFamily::NegNeg, i, j, small_combine(&lhs, &rhs, 1)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let lhs = small_mul(&j_form, &block(y, i, j));
            let rhs = small_mul(&small_t(&block(y, j, i)), &j_form);
            out.push((ConstraintFamily::PosPos, i, j, small_combine(&lhs, &rhs, 1)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let lhs = small_mul(&i_form, &block(y, -i, j));
            let rhs = small_mul(&small_t(&block(y, j, -i)), &j_form);
            out.push((ConstraintFamily::NegPos, i, j, small_combine(&lhs, &rhs, 1)));
        }
    }
    for j in 1..=n {
        let rhs = small_mul(&small_t(&block(y, -j, 0)), &i_form);
        out.push((ConstraintFamily::ZeroNeg, 0, j, small_combine(&block(y, 0, -j), &rhs, 1)));
    }
    for j in 1..=n {
        let rhs = small_mul(&small_t(&block(y, j, 0)), &j_form);
        out.push((ConstraintFamily::ZeroPos, 0, j, small_combine(&block(y, 0, j), &rhs, -1)));
    }
    out
}

/// Checks the defining block constraints; reports the first violated family and block pair.
pub fn block_constraints_check(y: &AlgebraElement) -> BlockVerdict {
    let rank = y.rank().max(y.support_rank());
    for (family, i, j, residual) in constraint_residuals(y, rank) {
        if residual.iter().any(|x| !x.is_zero()) {
            return BlockVerdict::Fail { family, i, j };
        }
    }
    BlockVerdict::Pass
}

/// Dimension of the space of matrices satisfying the block constraints,
/// optionally restricted to positions of one grade.
pub fn constrained_dim(rank: usize, grade: Option<Grade>) -> usize {
    let n = 2 * rank as i64;
    let positions: Vec<(i64, i64)> = (-n..=n)
        .flat_map(|r| (-n..=n).map(move |c| (r, c)))
        .filter(|&(r, c)| (r, c) != (0, 0))
        .filter(|&(r, c)| grade.is_none_or(|g| position_grade(r, c).ok() == Some(g)))
        .collect();
    // Columns are the residual vectors of the matrix units; all coefficients are rational.
    let columns: Vec<Vec<Rational>> = positions
        .iter()
        .map(|&(r, c)| {
            let unit = AlgebraElement::unit(rank, r, c).expect("in range");
            constraint_residuals(&unit, rank)
                .into_iter()
                .flat_map(|(_, _, _, v)| v)
                .map(|x| x.a)
                .collect()
        })
        .collect();
    let rows = columns.first().map_or(0, Vec::len);
    let mut m = ExactMatrix::zeros(rows, columns.len());
    for (c, col) in columns.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            m[(r, c)] = x.clone();
        }
    }
    positions.len() - exact_rank(&m)
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum RelationFamily {
    Parafermion,
    Paraboson,
    RelativeParaboson,
    RelativeParafermion,
}

impl RelationFamily {
    pub const ALL: [RelationFamily; 4] = [
        RelationFamily::Parafermion,
        RelationFamily::Paraboson,
        RelationFamily::RelativeParaboson,
        RelationFamily::RelativeParafermion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationFamily::Parafermion => "parafermion",
            RelationFamily::Paraboson => "paraboson",
            RelationFamily::RelativeParaboson => "relative-paraboson",
            RelationFamily::RelativeParafermion => "relative-parafermion",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        RelationFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation family {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub family: &'static str,
    pub n: usize,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<String>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn delta(a: i64, b: i64) -> i64 {
    i64::from(a == b)
}

/// One shape of triple relation: `⟦⟦x_j^ξ, y_k^η⟧, z_l^ε⟧ = rhs`.
struct TripleShape {
    x_fermi: bool,
    y_fermi: bool,
    z_fermi: bool,
    /// Right-hand side as `(coefficient, generator)` terms, from `(j, k, l, ξ, η, ε)`.
    rhs: Rhs,
}

type Rhs = fn(i64, i64, i64, i64, i64, i64) -> Vec<(i64, Generator)>;

fn f_mode(j: i64) -> i64 {
    -j
}

fn gen(mode: i64, s: i64) -> Generator {
    Generator { mode, sign: if s > 0 { Sign::Plus } else { Sign::Minus } }
}

fn shapes(family: RelationFamily) -> Vec<TripleShape> {
    match family {
        RelationFamily::Parafermion => vec![TripleShape {
            x_fermi: true,
            y_fermi: true,
            z_fermi: true,
            rhs: |j, k, l, xi, eta, eps| {
                vec![
                    ((eps - eta).abs() * delta(k, l), gen(f_mode(j), xi)),
                    (-(eps - xi).abs() * delta(j, l), gen(f_mode(k), eta)),
                ]
            },
        }],
        RelationFamily::Paraboson => vec![TripleShape {
            x_fermi: false,
            y_fermi: false,
            z_fermi: false,
            rhs: |j, k, l, xi, eta, eps| {
                vec![((eps - xi) * delta(j, l), gen(k, eta)), ((eps - eta) * delta(k, l), gen(j, xi))]
            },
        }],
        RelationFamily::RelativeParaboson => vec![
            mixed_shape(true, true, false, |_, _, _, _, _, _| vec![]),
            mixed_shape(false, false, true, |_, _, _, _, _, _| vec![]),
            mixed_shape(true, false, true, |j, k, l, xi, eta, eps| {
                vec![((eps - xi).abs() * delta(j, l), gen(k, eta))]
            }),
            mixed_shape(true, false, false, |j, k, l, xi, eta, eps| {
                vec![((eps - eta) * delta(k, l), gen(f_mode(j), xi))]
            }),
        ],
        RelationFamily::RelativeParafermion => vec![
            mixed_shape(true, true, false, |_, _, _, _, _, _| vec![]),
            mixed_shape(false, false, true, |_, _, _, _, _, _| vec![]),
            mixed_shape(true, false, true, |j, k, l, xi, eta, eps| {
                vec![(-(eps - xi).abs() * delta(j, l), gen(k, eta))]
            }),
            mixed_shape(true, false, false, |j, k, l, xi, eta, eps| {
                vec![((eps - eta) * delta(k, l), gen(f_mode(j), xi))]
            }),
        ],
    }
}

fn mixed_shape(x_fermi: bool, y_fermi: bool, z_fermi: bool, rhs: Rhs) -> TripleShape {
    TripleShape { x_fermi, y_fermi, z_fermi, rhs }
}

/// Evaluates both sides of every instance of a triple-relation family on
/// the matrix generators of rank `n`.
///
/// Indices `j, k, l` run over `[1, n]` (a parafermion index `j` is mode `-j`)
/// and all three signs over `±`. Every bracket is the graded bracket, so the
/// relative parafermion family is read as a statement about `⟦·,·⟧`.
pub fn relation_check(family: RelationFamily, n: usize) -> Result<RelationReport> {
    if n == 0 {
        return Err(Error::InvalidRank(n));
    }
    let n_i = n as i64;
    let signs = [1i64, -1];
    let mut report = RelationReport {
        family: family.name(),
        n,
        instances: 0,
        passed: 0,
        failed: 0,
        first_counterexample: None,
    };
    for shape in shapes(family) {
        let m = |idx: i64, fermi: bool| if fermi { f_mode(idx) } else { idx };
        for j in 1..=n_i {
            for k in 1..=n_i {
                for l in 1..=n_i {
                    for &xi in &signs {
                        for &eta in &signs {
                            for &eps in &signs {
                                let x = gen(m(j, shape.x_fermi), xi);
                                let y = gen(m(k, shape.y_fermi), eta);
                                let z = gen(m(l, shape.z_fermi), eps);
                                let lhs = graded_bracket(&graded_bracket(&x.matrix(), &y.matrix())?, &z.matrix())?;
                                let rhs = (shape.rhs)(j, k, l, xi, eta, eps).into_iter().fold(
                                    AlgebraElement::zero(n, lhs.grade().unwrap_or(Grade::ZERO)),
                                    |acc, (c, g)| acc.add(&g.matrix().scale_rational(&rat(c))),
                                );
                                report.instances += 1;
                                if lhs == rhs {
                                    report.passed += 1;
                                } else {
                                    report.failed += 1;
                                    if report.first_counterexample.is_none() {
                                        report.first_counterexample = Some(format!(
                                            "⟦⟦{x}, {y}⟧, {z}⟧: lhs = {lhs}, rhs = {rhs}",
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Checks `⟦E_jk, E_lm⟧ = δ_kl E_jm − (−1)^{deg(jk)·deg(lm)} δ_jm E_lk` for all
/// `j, k, l, m ∈ [-n, n]*`, together with `E_ii = h_i`.
pub fn gl_relation_check(n: usize) -> Result<RelationReport> {
    if n == 0 {
        return Err(Error::InvalidRank(n));
    }
    let ms = modes(n);
    let mut report = RelationReport {
        family: "gl-embedding",
        n,
        instances: 0,
        passed: 0,
        failed: 0,
        first_counterexample: None,
    };
    let mut record = |ok: bool, what: &dyn Fn() -> String| {
        report.instances += 1;
        if ok {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.first_counterexample.is_none() {
                report.first_counterexample = Some(what());
            }
        }
    };
    for &i in &ms {
        record(gl_e(i, i)? == cartan_h(i)?, &|| format!("E({i},{i}) ≠ h({i})"));
    }
    for &j in &ms {
        for &k in &ms {
            let ejk = gl_e(j, k)?;
            for &l in &ms {
                for &m in &ms {
                    let lhs = graded_bracket(&ejk, &gl_e(l, m)?)?;
                    let sign = if gl_degree(j, k) * gl_degree(l, m) == 1 { -1 } else { 1 };
                    let rhs = gl_e(j, m)?
                        .scale_rational(&rat(delta(k, l)))
                        .sub(&gl_e(l, k)?.scale_rational(&rat(sign * delta(j, m))));
                    record(lhs == rhs, &|| format!("⟦E({j},{k}), E({l},{m})⟧: lhs = {lhs}, rhs = {rhs}"));
                }
            }
        }
    }
    Ok(report)
}

/// A named element of the canonical basis of pso(2n+1|2n).
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub name: String,
    pub element: AlgebraElement,
}

/// Canonical basis: the 4n generators, the Cartan elements `h(i)`, the
/// off-diagonal `E(j,k)`, then the raising and lowering pairs
/// `P+(j,k) = ⟦c̄_j^+, c̄_k^+⟧` and `P-(j,k) = ⟦c̄_j^−, c̄_k^−⟧` (`j ≤ k`, nonzero).
pub fn canonical_basis(n: usize) -> Result<Vec<BasisElement>> {
    if n == 0 {
        return Err(Error::InvalidRank(n));
    }
    let ms = modes(n);
    let mut out = Vec::new();
    let mut push = |name: String, element: AlgebraElement| -> Result<()> {
        out.push(BasisElement { name, element: element.embed(n)? });
        Ok(())
    };
    for &i in ms.iter().filter(|&&i| i < 0).rev().chain(ms.iter().filter(|&&i| i > 0)) {
        for sign in [Sign::Plus, Sign::Minus] {
            let g = Generator { mode: i, sign };
            push(g.name(), g.matrix())?;
        }
    }
    for &i in &ms {
        push(format!("h({i})"), cartan_h(i)?)?;
    }
    for &j in &ms {
        for &k in &ms {
            if j != k {
                push(format!("E({j},{k})"), gl_e(j, k)?)?;
            }
        }
    }
    for sign in [Sign::Plus, Sign::Minus] {
        for (a, &j) in ms.iter().enumerate() {
            for &k in &ms[a..] {
                let e = graded_bracket(&generator(j, sign)?, &generator(k, sign)?)?;
                if !e.is_zero() {
                    push(format!("P{}({j},{k})", sign.symbol()), e)?;
                }
            }
        }
    }
    Ok(out)
}

/// Expresses elements in a fixed basis over ℚ(√2).
pub struct BasisDecomposer {
    rank: usize,
    names: Vec<String>,
    echelon: Echelon<QSqrt2>,
}

impl BasisDecomposer {
    pub fn new(rank: usize, basis: &[BasisElement]) -> Result<Self> {
        let side = 4 * rank + 1;
        let mut echelon = Echelon::new(side * side);
        for b in basis {
            if !echelon.insert(b.element.flatten(rank)) {
                return Err(Error::Internal(format!("basis element {} is dependent", b.name)));
            }
        }
        Ok(BasisDecomposer { rank, names: basis.iter().map(|b| b.name.clone()).collect(), echelon })
    }

    pub fn decompose(&self, x: &AlgebraElement) -> Option<Vec<(String, QSqrt2)>> {
        let coords = self.echelon.coordinates(&x.flatten(self.rank))?;
        Some(
            self.names
                .iter()
                .zip(coords)
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| (n.clone(), c))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketTerm {
    pub basis: String,
    pub coeff: QSqrt2,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureConstant {
    pub x: String,
    pub y: String,
    pub bracket: Vec<BracketTerm>,
}

/// `⟦x, y⟧` for every ordered pair of canonical basis elements, expanded in the basis.
pub fn structure_constants(n: usize) -> Result<Vec<StructureConstant>> {
    let basis = canonical_basis(n)?;
    let dec = BasisDecomposer::new(n, &basis)?;
    let mut out = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            let b = graded_bracket(&x.element, &y.element)?;
            let terms = dec
                .decompose(&b)
                .ok_or_else(|| Error::Internal(format!("⟦{}, {}⟧ leaves the algebra", x.name, y.name)))?;
            out.push(StructureConstant {
                x: x.name.clone(),
                y: y.name.clone(),
                bracket: terms.into_iter().map(|(basis, coeff)| BracketTerm { basis, coeff }).collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub n: usize,
    pub generator_span: usize,
    pub closure_dim: usize,
    pub constrained_dim: usize,
    pub expected: usize,
    pub all_elements_constrained: bool,
}

impl ClosureReport {
    pub fn consistent(&self) -> bool {
        self.closure_dim == self.expected && self.constrained_dim == self.expected && self.all_elements_constrained
    }
}

/// Spans the generators and their iterated brackets until the span stops
/// growing. Rank is measured over ℚ on the two-part flattening of each entry.
pub fn bracket_closure(n: usize) -> Result<ClosureReport> {
    if n == 0 {
        return Err(Error::InvalidRank(n));
    }
    let gens: Vec<AlgebraElement> = modes(n)
        .into_iter()
        .flat_map(|i| [Sign::Plus, Sign::Minus].map(|s| generator(i, s)))
        .map(|g| g.and_then(|g| g.embed(n)))
        .collect::<Result<_>>()?;
    let side = 4 * n + 1;
    let mut echelon = Echelon::<Rational>::new(2 * side * side);
    let mut span: Vec<AlgebraElement> = Vec::new();
    for g in &gens {
        if echelon.insert(g.flatten_rational(n)) {
            span.push(g.clone());
        }
    }
    let generator_span = echelon.rank();
    let mut frontier = span.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &gens {
            for x in &frontier {
                let b = graded_bracket(g, x)?;
                if !b.is_zero() && echelon.insert(b.flatten_rational(n)) {
                    next.push(b);
                }
            }
        }
        span.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(ClosureReport {
        n,
        generator_span,
        closure_dim: echelon.rank(),
        constrained_dim: constrained_dim(n, None),
        expected: 4 * n * (2 * n + 1),
        all_elements_constrained: span.iter().all(|x| block_constraints_check(x).passed()),
    })
}

pub fn bracket_closure_dim(n: usize) -> Result<usize> {
    Ok(bracket_closure(n)?.closure_dim)
}

/// Eigenvalues of `ad h_i` on `x` for all modes `i` of `x`'s rank.
pub fn adjoint_weight(x: &AlgebraElement) -> Result<WeightVector> {
    let rank = x.rank().max(x.support_rank());
    let mut w = WeightVector::new();
    let Some((&(r, c), pivot)) = x.entries().next() else {
        return Ok(w);
    };
    for i in modes(rank) {
        let b = graded_bracket(&cartan_h(i)?, x)?;
        let lambda = b.entry(r, c) * &pivot.q2_inv()?;
        if !lambda.is_rational() || b != x.scale(&lambda) {
            return Err(Error::NotEigenvector(i));
        }
        w.add_to(i, &lambda.a);
    }
    Ok(w)
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub n: usize,
    pub triples: usize,
    pub grading_failures: usize,
    pub symmetry_failures: usize,
    pub jacobi_failures: usize,
    pub first_failure: Option<String>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.grading_failures + self.symmetry_failures + self.jacobi_failures == 0
    }
}

/// Checks grade additivity, graded antisymmetry and the graded Jacobi identity on each triple.
pub fn axiom_check(n: usize, triples: &[(AlgebraElement, AlgebraElement, AlgebraElement)]) -> Result<AxiomReport> {
    let mut rep = AxiomReport {
        n,
        triples: triples.len(),
        grading_failures: 0,
        symmetry_failures: 0,
        jacobi_failures: 0,
        first_failure: None,
    };
    for (x, y, z) in triples {
        let (a, b) = (x.grade().ok_or(Error::NotHomogeneous)?, y.grade().ok_or(Error::NotHomogeneous)?);
        let xy = graded_bracket(x, y)?;
        let note = |rep: &mut AxiomReport, what: &str| {
            if rep.first_failure.is_none() {
                rep.first_failure = Some(format!("{what} fails on x = {x}, y = {y}, z = {z}"));
            }
        };
        let inferred = xy.clone().with_grade(a + b);
        if inferred.is_err() || !block_constraints_check(&xy).passed() {
            rep.grading_failures += 1;
            note(&mut rep, "grading");
        }
        let yx = graded_bracket(y, x)?;
        if xy != yx.scale_rational(&rat(-a.sign(b))) {
            rep.symmetry_failures += 1;
            note(&mut rep, "symmetry");
        }
        let lhs = graded_bracket(x, &graded_bracket(y, z)?)?;
        let rhs = graded_bracket(&xy, z)?
            .add(&graded_bracket(y, &graded_bracket(x, z)?)?.scale_rational(&rat(a.sign(b))));
        if lhs != rhs {
            rep.jacobi_failures += 1;
            note(&mut rep, "jacobi");
        }
    }
    Ok(rep)
}

/// All ordered triples of canonical basis elements.
pub fn basis_triples(n: usize) -> Result<Vec<(AlgebraElement, AlgebraElement, AlgebraElement)>> {
    let basis = canonical_basis(n)?;
    let mut out = Vec::with_capacity(basis.len().pow(3));
    for x in &basis {
        for y in &basis {
            for z in &basis {
                out.push((x.element.clone(), y.element.clone(), z.element.clone()));
            }
        }
    }
    Ok(out)
}

/// A random homogeneous element: small rational combination of the basis
/// elements of one randomly chosen grade.
pub fn random_homogeneous<R: Rng>(basis: &[BasisElement], rng: &mut R) -> AlgebraElement {
    let rank = basis.first().map_or(1, |b| b.element.rank());
    let grade = Grade::ALL[rng.gen_range(0..4)];
    let mut acc = AlgebraElement::zero(rank, grade);
    for b in basis.iter().filter(|b| b.element.grade() == Some(grade)) {
        if rng.gen_bool(0.5) {
            continue;
        }
        let k = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        acc = acc.add(&b.element.scale_rational(&k));
    }
    acc.with_grade(grade).expect("single-grade combination")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> QSqrt2 {
        QSqrt2::from_int(k)
    }

    fn s2(k: i64) -> QSqrt2 {
        QSqrt2::sqrt2_multiple(rat(k))
    }

    fn el(rank: usize, entries: &[((i64, i64), QSqrt2)]) -> AlgebraElement {
        AlgebraElement::from_entries(rank, entries.iter().cloned()).unwrap()
    }

    #[test]
    fn grade_arithmetic() {
        assert_eq!(Grade::FERMI + Grade::BOSE, Grade::MIXED);
        assert_eq!(Grade::FERMI.dot(Grade::FERMI), 0);
        assert_eq!(Grade::BOSE.dot(Grade::BOSE), 1);
        assert_eq!(Grade::MIXED.dot(Grade::FERMI), 1);
    }

    #[test]
    fn block_forms() {
        let i = form(BlockForm::I);
        let j = form(BlockForm::J);
        assert_eq!(small_mul(&i, &i), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        assert_eq!(small_mul(&j, &j), vec![vec![q(-1), q(0)], vec![q(0), q(-1)]]);
    }

    #[test]
    fn position_grade_table() {
        assert_eq!(position_grade(-2, 0).unwrap(), Grade::new(1, 1));
        assert_eq!(position_grade(0, 2).unwrap(), Grade::new(1, 0));
        assert_eq!(position_grade(-1, 1).unwrap(), Grade::new(0, 1));
        assert_eq!(position_grade(3, 1).unwrap(), Grade::ZERO);
        assert_eq!(position_grade(0, 0), Err(Error::OriginPosition));
    }

    #[test]
    fn generator_matrices() {
        assert_eq!(generator(-1, Sign::Plus).unwrap(), el(1, &[((-2, 0), s2(1)), ((0, -1), s2(-1))]));
        assert_eq!(generator(1, Sign::Minus).unwrap(), el(1, &[((0, 1), s2(1)), ((2, 0), s2(-1))]));
        assert_eq!(generator(2, Sign::Plus).unwrap(), el(2, &[((0, 4), s2(1)), ((3, 0), s2(1))]));
        assert_eq!(generator(0, Sign::Plus), Err(Error::ZeroIndex));
        assert_eq!(generator(-2, Sign::Minus).unwrap().grade(), Some(Grade::FERMI));
        assert_eq!(generator(2, Sign::Minus).unwrap().rank(), 2);
    }

    #[test]
    fn block_constraints() {
        for i in [-2, -1, 1, 2] {
            for s in [Sign::Plus, Sign::Minus] {
                assert!(block_constraints_check(&generator(i, s).unwrap().embed(2).unwrap()).passed());
            }
        }
        assert!(block_constraints_check(&AlgebraElement::zero(1, Grade::ZERO)).passed());
        // e_{1,1} is not in sp(2); e_{1,2} is.
        let e11 = AlgebraElement::unit(1, 1, 1).unwrap();
        assert_eq!(
            block_constraints_check(&e11),
            BlockVerdict::Fail { family: ConstraintFamily::PosPos, i: 1, j: 1 }
        );
        assert!(block_constraints_check(&AlgebraElement::unit(1, 1, 2).unwrap()).passed());
        let e02 = AlgebraElement::unit(1, 0, 2).unwrap();
        assert_eq!(
            block_constraints_check(&e02),
            BlockVerdict::Fail { family: ConstraintFamily::ZeroPos, i: 0, j: 1 }
        );
    }

    #[test]
    fn bracket_examples() {
        let bm = generator(1, Sign::Minus).unwrap();
        let bp = generator(1, Sign::Plus).unwrap();
        let b = graded_bracket(&bm, &bp).unwrap();
        assert_eq!(b, el(1, &[((1, 1), q(2)), ((2, 2), q(-2))]));
        assert_eq!(b.grade(), Some(Grade::ZERO));
        let h1 = cartan_h(1).unwrap();
        assert_eq!(graded_bracket(&h1, &bp).unwrap(), bp);
        let x = gl_e(1, 2).unwrap();
        assert!(graded_bracket(&x, &x).unwrap().is_zero());
        let mixed = bp.add(&generator(-1, Sign::Plus).unwrap());
        assert_eq!(mixed.grade(), None);
        assert_eq!(graded_bracket(&mixed, &bp), Err(Error::NotHomogeneous));
    }

    #[test]
    fn cartan_elements() {
        assert_eq!(cartan_h(1).unwrap(), el(1, &[((1, 1), q(1)), ((2, 2), q(-1))]));
        assert_eq!(cartan_h(-1).unwrap(), el(1, &[((-2, -2), q(1)), ((-1, -1), q(-1))]));
        for i in [-3, -2, -1, 1, 2, 3] {
            let h = cartan_h(i).unwrap();
            assert!(h.is_diagonal());
            assert!(h.trace().is_zero());
            let (a, b) = if i > 0 { (2 * i - 1, 2 * i) } else { (2 * i, 2 * i + 1) };
            assert_eq!(h, el(i.unsigned_abs() as usize, &[((a, a), q(1)), ((b, b), q(-1))]));
        }
        assert_eq!(cartan_h(0), Err(Error::ZeroIndex));
    }

    #[test]
    fn gl_embedding_examples() {
        for i in [-2, -1, 1, 2] {
            assert_eq!(gl_e(i, i).unwrap(), cartan_h(i).unwrap());
        }
        assert_eq!(gl_e(1, -1).unwrap().grade(), Some(Grade::MIXED));
        assert_eq!(gl_e(1, 2).unwrap().grade(), Some(Grade::ZERO));
        assert_eq!(gl_degree(1, -1), 1);
        assert_eq!(gl_degree(-2, -1), 0);
        assert_eq!(gl_e(0, 1), Err(Error::ZeroIndex));
    }

    #[test]
    fn adjoint_weights() {
        let w = adjoint_weight(&generator(1, Sign::Plus).unwrap()).unwrap();
        assert_eq!(w, WeightVector::new().with(1, rat(1)));
        let w = adjoint_weight(&generator(-1, Sign::Minus).unwrap()).unwrap();
        assert_eq!(w, WeightVector::new().with(-1, rat(-1)));
        assert!(adjoint_weight(&cartan_h(1).unwrap()).unwrap().is_zero());
        let not_eigen = generator(1, Sign::Plus).unwrap().add(&generator(1, Sign::Minus).unwrap());
        assert!(matches!(adjoint_weight(&not_eigen), Err(Error::NotEigenvector(1))));
    }

    #[test]
    fn relation_examples() {
        let rep = relation_check(RelationFamily::Paraboson, 1).unwrap();
        assert_eq!((rep.instances, rep.failed), (8, 0));
        assert!(relation_check(RelationFamily::RelativeParaboson, 2).unwrap().all_pass());
        assert!(relation_check(RelationFamily::Parafermion, 2).unwrap().all_pass());
        let pf = relation_check(RelationFamily::RelativeParafermion, 1).unwrap();
        assert!(pf.failed > 0);
        assert!(pf.first_counterexample.is_some());
    }

    #[test]
    fn gl_relations_small() {
        let rep = gl_relation_check(1).unwrap();
        assert_eq!(rep.instances, 2 + 16);
        assert!(rep.all_pass(), "{:?}", rep.first_counterexample);
    }

    #[test]
    fn closure_small() {
        let rep = bracket_closure(1).unwrap();
        assert_eq!(rep.generator_span, 4);
        assert_eq!(rep.closure_dim, 12);
        assert!(rep.consistent());
    }

    #[test]
    fn graded_parts_dimensions() {
        for n in 1..=2 {
            let n2 = n * n;
            assert_eq!(constrained_dim(n, Some(Grade::ZERO)) + constrained_dim(n, Some(Grade::FERMI)), 4 * n2 + 2 * n);
            assert_eq!(constrained_dim(n, Some(Grade::BOSE)), 2 * n);
            assert_eq!(constrained_dim(n, Some(Grade::MIXED)), 4 * n2);
        }
    }

    #[test]
    fn canonical_basis_size() {
        for n in 1..=2 {
            let basis = canonical_basis(n).unwrap();
            assert_eq!(basis.len(), 4 * n * (2 * n + 1));
            assert!(BasisDecomposer::new(n, &basis).is_ok());
        }
    }

    #[test]
    fn generator_brackets_are_rational() {
        let ms = modes(2);
        for &i in &ms {
            for &j in &ms {
                for (s, t) in [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Minus)] {
                    let b = graded_bracket(&generator(i, s).unwrap(), &generator(j, t).unwrap()).unwrap();
                    assert!(b.is_rational(), "⟦c{i}{s:?}, c{j}{t:?}⟧ has a √2 entry");
                }
            }
        }
    }

    #[test]
    fn embedding_commutes_with_bracket() {
        let x = gl_e(1, -1).unwrap();
        let y = generator(-1, Sign::Plus).unwrap();
        let direct = graded_bracket(&x, &y).unwrap().embed(3).unwrap();
        let lifted = graded_bracket(&x.embed(3).unwrap(), &y.embed(3).unwrap()).unwrap();
        assert_eq!(direct, lifted);
        assert_eq!(lifted.rank(), 3);
        assert!(x.embed(0).is_err());
    }
}
