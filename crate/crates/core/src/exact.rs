//! Exact scalars (ℚ and ℚ(√2)) and exact linear algebra over them.
//!
//! Everything here is deterministic: pivots are always taken at the first
//! nonzero entry in row-major scan order, so ranks, kernels and witnesses are
//! reproducible bit-for-bit.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form: `"p/q"` reduced, `"p"` for integers, `"0"` for zero.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// serde adapter storing a [`Rational`] as its canonical string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Minimal field interface shared by [`Rational`] and [`QSqrt2`].
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn inverse(&self) -> Option<Self>;
}

impl Field for Rational {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// An element `a + b·√2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        QSqrt2 { a, b: Rational::zero() }
    }

    pub fn from_int(a: i64) -> Self {
        Self::rational(rat(a))
    }

    /// `k·√2`.
    pub fn sqrt2_multiple(k: Rational) -> Self {
        QSqrt2 { a: Rational::zero(), b: k }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QSqrt2 { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a² − 2b²`; zero only for zero since √2 is irrational.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat(2) * &self.b * &self.b
    }

    pub fn q2_mul(&self, other: &QSqrt2) -> QSqrt2 {
        QSqrt2 {
            a: &self.a * &other.a + rat(2) * &self.b * &other.b,
            b: &self.a * &other.b + &other.a * &self.b,
        }
    }

    pub fn q2_inv(&self) -> Result<QSqrt2> {
        let norm = self.norm();
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QSqrt2 { a: &self.a / &norm, b: -&self.b / &norm })
    }

    pub fn scale(&self, k: &Rational) -> QSqrt2 {
        QSqrt2 { a: &self.a * k, b: &self.b * k }
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => write!(f, "{} + {}√2", self.a, self.b),
        }
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::default()
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        QSqrt2::from_int(1)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Add<&QSqrt2> for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a + &o.a, b: self.b + &o.b }
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Sub<&QSqrt2> for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2 { a: self.a - &o.a, b: self.b - &o.b }
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        self.q2_mul(&o)
    }
}

impl Mul<&QSqrt2> for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        self.q2_mul(o)
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { a: -self.a, b: -self.b }
    }
}

impl Div for QSqrt2 {
    type Output = QSqrt2;
    /// Panics on division by zero; use [`QSqrt2::q2_inv`] for a checked inverse.
    fn div(self, o: QSqrt2) -> QSqrt2 {
        self.q2_mul(&o.q2_inv().expect("division by zero in ℚ(√2)"))
    }
}

impl Field for QSqrt2 {
    fn inverse(&self) -> Option<Self> {
        self.q2_inv().ok()
    }
}

#[derive(Serialize, Deserialize)]
struct QSqrt2Repr {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational")]
    b: Rational,
}

impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSqrt2Repr { a: self.a.clone(), b: self.b.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QSqrt2Repr::deserialize(d)?;
        Ok(QSqrt2 { a: r.a, b: r.b })
    }
}

/// Dense rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_matrix(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[Rational]) -> Result<Rational> {
        let mv = self.mul_vector(v)?;
        Ok(v.iter().zip(&mv).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    pub fn sub_matrix(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: &Rational) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Principal submatrix on the given index list.
    pub fn principal(&self, idx: &[usize]) -> ExactMatrix {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension("column mismatch in vstack".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { rows: self.rows + other.rows, cols, data })
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Clears denominators row by row, giving an integer matrix of equal rank.
fn integer_rows(m: &ExactMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|r| {
            let row = m.row(r);
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect()
}

/// Rank over ℚ by fraction-free (Bareiss) elimination.
pub fn exact_rank(m: &ExactMatrix) -> usize {
    let mut a = integer_rows(m);
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        let (top, below) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in below {
            let factor = std::mem::take(&mut row[c]);
            for (x, y) in row[c + 1..].iter_mut().zip(&pivot_row[c + 1..]) {
                *x = (&pivot * &*x - &factor * y) / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Reduced row echelon form; returns the reduced matrix and its pivot columns.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            let v = &a[(r, j)] * &inv;
            a[(r, j)] = v;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols {
                let v = &a[(i, j)] - &f * &a[(r, j)];
                a[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right null space, one vector per free column (in column order).
pub fn exact_kernel(m: &ExactMatrix) -> Vec<Vec<Rational>> {
    let (reduced, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Solves `M x = b` for square nonsingular `M`.
pub fn solve(m: &ExactMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    if !m.is_square() || b.len() != m.rows {
        return Err(Error::Dimension("solve needs a square system".into()));
    }
    let n = m.rows;
    let mut aug = ExactMatrix::zeros(n, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (reduced, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::Singular);
    }
    Ok((0..n).map(|i| reduced[(i, n)].clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    PositiveSemidefinite,
    /// A vector with `vᵀMv = value < 0`.
    Witness { vector: Vec<Rational>, value: Rational },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::PositiveSemidefinite)
    }
}

/// Decides positive semidefiniteness by symmetric rational elimination (LDLᵀ).
///
/// The working matrix is kept as `Bᵀ M B` for a tracked change of basis `B`,
/// so any negative direction found during elimination is mapped back to the
/// original coordinates and re-checked against `M` directly.
pub fn psd_certificate(m: &ExactMatrix) -> Result<PsdVerdict> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows;
    let mut s = m.clone();
    let mut basis = ExactMatrix::identity(n);
    let mut active: Vec<usize> = (0..n).collect();

    let witness = |v: Vec<Rational>| -> Result<PsdVerdict> {
        let value = m.quadratic_form(&v)?;
        debug_assert!(value.is_negative());
        Ok(PsdVerdict::Witness { vector: v, value })
    };
    let column = |basis: &ExactMatrix, k: usize| -> Vec<Rational> {
        (0..n).map(|i| basis[(i, k)].clone()).collect()
    };

    while !active.is_empty() {
        if let Some(&k) = active.iter().find(|&&k| s[(k, k)].is_negative()) {
            return witness(column(&basis, k));
        }
        let Some(pos) = active.iter().position(|&k| s[(k, k)].is_positive()) else {
            // Zero diagonal: any nonzero off-diagonal entry gives an indefinite 2x2 minor.
            for (x, &k) in active.iter().enumerate() {
                for &l in &active[x + 1..] {
                    if !s[(k, l)].is_zero() {
                        let t = if s[(k, l)].is_positive() { -Rational::one() } else { Rational::one() };
                        let v: Vec<Rational> = (0..n)
                            .map(|i| &basis[(i, k)] + &t * &basis[(i, l)])
                            .collect();
                        return witness(v);
                    }
                }
            }
            break;
        };
        let k = active.remove(pos);
        let pivot = s[(k, k)].clone();
        let pivot_row: Vec<Rational> = (0..n).map(|j| s[(k, j)].clone()).collect();
        for &j in &active {
            let f = &pivot_row[j] / &pivot;
            if f.is_zero() {
                continue;
            }
            for i in 0..n {
                let v = &basis[(i, j)] - &f * &basis[(i, k)];
                basis[(i, j)] = v;
            }
            for &i in &active {
                let v = &s[(i, j)] - &f * &pivot_row[i];
                s[(i, j)] = v;
            }
        }
    }
    Ok(PsdVerdict::PositiveSemidefinite)
}

/// Incrementally built echelon basis that can also express vectors in terms
/// of the vectors inserted so far.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    dim: usize,
    rows: Vec<(usize, Vec<F>, Vec<F>)>,
    inserted: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Returns the residual of `v` and the combination of accepted vectors
    /// that was subtracted from it.
    fn reduce(&self, mut v: Vec<F>) -> (Vec<F>, Vec<F>) {
        let mut combo = vec![F::zero(); self.inserted];
        for (pivot, row, row_combo) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone() * &row[*pivot].inverse().expect("zero pivot");
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.clone() - &(f.clone() * r);
                }
            }
            for (c, rc) in combo.iter_mut().zip(row_combo) {
                if !rc.is_zero() {
                    *c = c.clone() + &(f.clone() * rc);
                }
            }
        }
        (v, combo)
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    pub fn insert(&mut self, v: Vec<F>) -> bool {
        assert_eq!(v.len(), self.dim, "echelon vector length");
        let (residual, combo) = self.reduce(v);
        let Some(pivot) = residual.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        // residual = v - Σ combo_i · accepted_i
        let mut own: Vec<F> = combo.into_iter().map(|c| -c).collect();
        own.push(F::one());
        for (_, _, rc) in self.rows.iter_mut() {
            rc.push(F::zero());
        }
        self.rows.push((pivot, residual, own));
        self.inserted += 1;
        true
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v.to_vec()).0.iter().all(Zero::is_zero)
    }

    /// Coefficients of `v` in the accepted vectors, or `None` outside the span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let (residual, combo) = self.reduce(v.to_vec());
        residual.iter().all(Zero::is_zero).then_some(combo)
    }
}
