//! Creation words, vectors of the induced module and the contravariant form.
//!
//! A word `(i₁,…,i_L)` stands for `c̄_{i₁}^+ ⋯ c̄_{i_L}^+ |0⟩`. Annihilators and
//! pair elements are pushed through a word one letter at a time, using the
//! triple brackets of the matrix realization for the commutator terms.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{rat, ExactMatrix, QSqrt2, Rational};
use crate::graded::{graded_bracket, mode_grade, Generator, Grade, Sign};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct CreationWord(Vec<i64>);

impl CreationWord {
    pub fn vacuum() -> Self {
        CreationWord(Vec::new())
    }

    pub fn new(modes: Vec<i64>) -> Result<Self> {
        if modes.contains(&0) {
            return Err(Error::ZeroIndex);
        }
        Ok(CreationWord(modes))
    }

    pub fn modes(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest `|mode|` in the word, 0 for the vacuum.
    pub fn max_mode(&self) -> usize {
        self.0.iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn grade(&self) -> Grade {
        word_grade(self)
    }

    /// `c̄_i^+` times this word.
    pub fn prepend(&self, i: i64) -> CreationWord {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        CreationWord(v)
    }

    fn split_first(&self) -> Option<(i64, CreationWord)> {
        let (&first, rest) = self.0.split_first()?;
        Some((first, CreationWord(rest.to_vec())))
    }
}

impl fmt::Display for CreationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn word_grade(w: &CreationWord) -> Grade {
    w.0.iter().fold(Grade::ZERO, |g, &m| g + mode_grade(m))
}

/// Rational combination of creation words.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FockVector(BTreeMap<CreationWord, Rational>);

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::word(CreationWord::vacuum())
    }

    pub fn word(w: CreationWord) -> Self {
        FockVector(BTreeMap::from([(w, Rational::one())]))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CreationWord, Rational)>) -> Self {
        let mut v = FockVector::zero();
        for (w, c) in terms {
            v.add_term(w, &c);
        }
        v
    }

    pub fn add_term(&mut self, w: CreationWord, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(w).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (w, c) in &other.0 {
            self.add_term(w.clone(), &(c * k));
        }
    }

    pub fn scale(&self, k: &Rational) -> FockVector {
        let mut out = FockVector::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn coeff(&self, w: &CreationWord) -> Rational {
        self.0.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn vacuum_coeff(&self) -> Rational {
        self.coeff(&CreationWord::vacuum())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CreationWord, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_mode(&self) -> usize {
        self.0.keys().map(CreationWord::max_mode).max().unwrap_or(0)
    }

    /// Left multiplication by `c̄_i^+`.
    pub fn prepend(&self, i: i64) -> FockVector {
        FockVector(self.0.iter().map(|(w, c)| (w.prepend(i), c.clone())).collect())
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|(w, c)| format!("{c}·{w}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for FockVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            word: &'a CreationWord,
            coeff: String,
        }
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (w, c) in &self.0 {
            seq.serialize_element(&Term { word: w, coeff: c.to_string() })?;
        }
        seq.end()
    }
}

/// `⟦⟦x, y⟧, z⟧` expanded in single generators, computed from the matrices at
/// rank `max(|modes|)`.
pub fn triple_constants(x: Generator, y: Generator, z: Generator) -> Result<Vec<(Generator, Rational)>> {
    let rank = [x.mode, y.mode, z.mode].iter().map(|m| m.unsigned_abs() as usize).max().unwrap_or(1);
    let t = graded_bracket(&graded_bracket(&x.matrix(), &y.matrix())?, &z.matrix())?;
    decompose_generators(&t, rank)
}

/// Reads an element as a combination of generators, checking the reconstruction exactly.
fn decompose_generators(t: &crate::graded::AlgebraElement, rank: usize) -> Result<Vec<(Generator, Rational)>> {
    let r = rank as i64;
    let half = QSqrt2::sqrt2_multiple(crate::exact::ratio(1, 2));
    let mut terms = Vec::new();
    let mut rebuilt = crate::graded::AlgebraElement::zero(rank, t.grade().unwrap_or(Grade::ZERO));
    for mode in (-r..=r).filter(|&m| m != 0) {
        for sign in [Sign::Plus, Sign::Minus] {
            let m = mode.abs();
            let pos = match (mode < 0, sign) {
                (true, Sign::Plus) => (-2 * m, 0),
                (true, Sign::Minus) => (0, -2 * m),
                (false, Sign::Plus) => (0, 2 * m),
                (false, Sign::Minus) => (0, 2 * m - 1),
            };
            // Each generator is the only one touching its characteristic entry `±√2`.
            let c = t.entry(pos.0, pos.1) * &half;
            if c.is_zero() {
                continue;
            }
            if !c.is_rational() {
                return Err(Error::Internal(format!("irrational triple constant {c}")));
            }
            let g = Generator { mode, sign };
            rebuilt = rebuilt.add(&g.matrix().scale(&c));
            terms.push((g, c.a));
        }
    }
    if rebuilt != *t {
        return Err(Error::Internal(format!("triple bracket {t} is not a combination of generators")));
    }
    Ok(terms)
}

type TripleKey = (Generator, Generator, Generator);
type PairKey = (Generator, Generator, CreationWord);

/// Evaluates operators on the induced module `V̄(p)` at a fixed rank.
///
/// Results are memoized per word; the caches make the engine `!Sync`.
type TripleTerms = Vec<(Generator, Rational)>;

pub struct FockEngine {
    rank: usize,
    p: Rational,
    triples: RefCell<HashMap<TripleKey, Rc<TripleTerms>>>,
    annihilations: RefCell<HashMap<(i64, CreationWord), Rc<FockVector>>>,
    pairs: RefCell<HashMap<PairKey, Rc<FockVector>>>,
}

impl FockEngine {
    pub fn new(rank: usize, p: Rational) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank(rank));
        }
        if !p.is_positive() {
            return Err(Error::Precondition(format!("order p must be positive, got {p}")));
        }
        Ok(FockEngine {
            rank,
            p,
            triples: RefCell::default(),
            annihilations: RefCell::default(),
            pairs: RefCell::default(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    fn check_mode(&self, mode: i64) -> Result<()> {
        if mode == 0 {
            return Err(Error::ZeroIndex);
        }
        if mode.unsigned_abs() as usize > self.rank {
            return Err(Error::OutOfRange { mode, rank: self.rank });
        }
        Ok(())
    }

    fn check_vector(&self, v: &FockVector) -> Result<()> {
        for (w, _) in v.terms() {
            for &m in w.modes() {
                self.check_mode(m)?;
            }
        }
        Ok(())
    }

    fn triple(&self, x: Generator, y: Generator, z: Generator) -> Rc<Vec<(Generator, Rational)>> {
        if let Some(t) = self.triples.borrow().get(&(x, y, z)) {
            return t.clone();
        }
        let t = Rc::new(triple_constants(x, y, z).expect("generator triple brackets are generator combinations"));
        self.triples.borrow_mut().insert((x, y, z), t.clone());
        t
    }

    fn annihilate_word(&self, l: i64, w: &CreationWord) -> Rc<FockVector> {
        let Some((k, rest)) = w.split_first() else {
            return Rc::new(FockVector::zero());
        };
        if let Some(v) = self.annihilations.borrow().get(&(l, w.clone())) {
            return v.clone();
        }
        // c̄_l^− c̄_k^+ = ⟦c̄_l^−, c̄_k^+⟧ + (−1)^{a·b} c̄_k^+ c̄_l^−
        let mut out = (*self.pair_word(Generator::minus(l), Generator::plus(k), &rest)).clone();
        let s = mode_grade(l).sign(mode_grade(k));
        out.add_scaled(&self.annihilate_word(l, &rest).prepend(k), &rat(s));
        let out = Rc::new(out);
        self.annihilations.borrow_mut().insert((l, w.clone()), out.clone());
        out
    }

    fn apply_word(&self, g: Generator, w: &CreationWord) -> Rc<FockVector> {
        match g.sign {
            Sign::Plus => Rc::new(FockVector::word(w.prepend(g.mode))),
            Sign::Minus => self.annihilate_word(g.mode, w),
        }
    }

    fn pair_word(&self, x: Generator, y: Generator, w: &CreationWord) -> Rc<FockVector> {
        let s_xy = x.grade().sign(y.grade());
        if x.sign == Sign::Plus && y.sign == Sign::Plus {
            let mut v = FockVector::word(w.prepend(y.mode).prepend(x.mode));
            v.add_term(w.prepend(x.mode).prepend(y.mode), &rat(-s_xy));
            return Rc::new(v);
        }
        let key = (x, y, w.clone());
        if let Some(v) = self.pairs.borrow().get(&key) {
            return v.clone();
        }
        let out = match w.split_first() {
            None => {
                let delta = x.mode == y.mode;
                let v = match (x.sign, y.sign) {
                    (Sign::Minus, Sign::Plus) if delta => self.p.clone(),
                    (Sign::Plus, Sign::Minus) if delta => -(rat(s_xy) * &self.p),
                    _ => Rational::zero(),
                };
                FockVector::vacuum().scale(&v)
            }
            Some((m, rest)) => {
                // ⟦x,y⟧ c̄_m^+ = ⟦⟦x,y⟧, c̄_m^+⟧ + (−1)^{(a+b)·c} c̄_m^+ ⟦x,y⟧
                let mut out = FockVector::zero();
                for (g, c) in self.triple(x, y, Generator::plus(m)).iter() {
                    out.add_scaled(&self.apply_word(*g, &rest), c);
                }
                let s = (x.grade() + y.grade()).sign(mode_grade(m));
                out.add_scaled(&self.pair_word(x, y, &rest).prepend(m), &rat(s));
                out
            }
        };
        let out = Rc::new(out);
        self.pairs.borrow_mut().insert(key, out.clone());
        out
    }

    /// `c̄_i^+ v`.
    pub fn apply_creation(&self, i: i64, v: &FockVector) -> Result<FockVector> {
        self.check_mode(i)?;
        self.check_vector(v)?;
        Ok(v.prepend(i))
    }

    /// `c̄_l^− v`.
    pub fn apply_annihilation(&self, l: i64, v: &FockVector) -> Result<FockVector> {
        self.check_mode(l)?;
        self.check_vector(v)?;
        let mut out = FockVector::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.annihilate_word(l, w), c);
        }
        Ok(out)
    }

    pub fn apply(&self, g: Generator, v: &FockVector) -> Result<FockVector> {
        match g.sign {
            Sign::Plus => self.apply_creation(g.mode, v),
            Sign::Minus => self.apply_annihilation(g.mode, v),
        }
    }

    /// `⟦x, y⟧ v` for the pair element of two generators.
    pub fn pair_apply(&self, x: Generator, y: Generator, v: &FockVector) -> Result<FockVector> {
        self.check_mode(x.mode)?;
        self.check_mode(y.mode)?;
        self.check_vector(v)?;
        let mut out = FockVector::zero();
        for (w, c) in v.terms() {
            out.add_scaled(&self.pair_word(x, y, w), c);
        }
        Ok(out)
    }

    /// Vacuum coefficient of `c̄_{i_L}^− ⋯ c̄_{i_1}^− v` for the word `(i_1,…,i_L)`.
    fn bra_word(&self, w: &CreationWord, v: &FockVector) -> Rational {
        let mut state = v.clone();
        for &i in w.modes() {
            if state.is_zero() {
                break;
            }
            let mut next = FockVector::zero();
            for (u, c) in state.terms() {
                // Only words one letter longer than what remains can reach the vacuum.
                next.add_scaled(&self.annihilate_word(i, u), c);
            }
            state = next;
        }
        state.vacuum_coeff()
    }

    /// The contravariant form `⟨v1|v2⟩`.
    pub fn inner_product(&self, v1: &FockVector, v2: &FockVector) -> Result<Rational> {
        self.check_vector(v1)?;
        self.check_vector(v2)?;
        let mut total = Rational::zero();
        for (w, c) in v1.terms() {
            let filtered = FockVector::from_terms(
                v2.terms().filter(|(u, _)| u.len() == w.len()).map(|(u, k)| (u.clone(), k.clone())),
            );
            total += c * self.bra_word(w, &filtered);
        }
        Ok(total)
    }

    pub fn gram_matrix(&self, words: &[CreationWord]) -> Result<ExactMatrix> {
        let n = words.len();
        let mut g = ExactMatrix::zeros(n, n);
        let vectors: Vec<FockVector> = words.iter().map(|w| FockVector::word(w.clone())).collect();
        for r in 0..n {
            for s in 0..n {
                g[(r, s)] = self.inner_product(&vectors[r], &vectors[s])?;
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn w(m: &[i64]) -> CreationWord {
        CreationWord::new(m.to_vec()).unwrap()
    }

    fn wv(m: &[i64]) -> FockVector {
        FockVector::word(w(m))
    }

    fn engine(n: usize, p: i64) -> FockEngine {
        FockEngine::new(n, rat(p)).unwrap()
    }

    #[test]
    fn word_grades() {
        assert_eq!(word_grade(&w(&[])), Grade::ZERO);
        assert_eq!(word_grade(&w(&[-1])), Grade::new(1, 1));
        assert_eq!(word_grade(&w(&[-1, 2])), Grade::new(0, 1));
        assert_eq!(CreationWord::new(vec![1, 0]), Err(Error::ZeroIndex));
    }

    #[test]
    fn triple_examples() {
        let b1p = Generator::plus(1);
        let b1m = Generator::minus(1);
        let f1p = Generator::plus(-1);
        let f1m = Generator::minus(-1);
        assert_eq!(triple_constants(b1m, b1p, b1p).unwrap(), vec![(b1p, rat(2))]);
        assert_eq!(triple_constants(f1m, f1p, f1p).unwrap(), vec![(f1p, rat(-2))]);
        assert!(triple_constants(f1p, f1p, b1p).unwrap().is_empty());
    }

    #[test]
    fn creation_examples() {
        let e = engine(2, 1);
        assert_eq!(e.apply_creation(1, &FockVector::vacuum()).unwrap(), wv(&[1]));
        assert_eq!(e.apply_creation(-2, &wv(&[1])).unwrap(), wv(&[-2, 1]));
        let mut v = wv(&[1]).scale(&rat(2));
        v.add_scaled(&wv(&[-1]), &rat(-3));
        let mut expect = wv(&[2, 1]).scale(&rat(2));
        expect.add_scaled(&wv(&[2, -1]), &rat(-3));
        assert_eq!(e.apply_creation(2, &v).unwrap(), expect);
        assert!(matches!(e.apply_creation(3, &v), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn annihilation_examples() {
        for p in 1..=3 {
            let e = engine(1, p);
            assert_eq!(e.apply_annihilation(1, &wv(&[1])).unwrap(), FockVector::vacuum().scale(&rat(p)));
            assert_eq!(e.apply_annihilation(1, &wv(&[1, 1])).unwrap(), wv(&[1]).scale(&rat(2)));
            assert_eq!(e.apply_annihilation(-1, &wv(&[-1, -1])).unwrap(), wv(&[-1]).scale(&rat(2 * p - 2)));
            assert!(e.apply_annihilation(-1, &FockVector::vacuum()).unwrap().is_zero());
        }
    }

    #[test]
    fn pair_examples() {
        let e = engine(2, 3);
        let (b1m, b1p) = (Generator::minus(1), Generator::plus(1));
        assert_eq!(e.pair_apply(b1m, b1p, &FockVector::vacuum()).unwrap(), FockVector::vacuum().scale(&rat(3)));
        assert_eq!(e.pair_apply(b1m, b1p, &wv(&[1])).unwrap(), wv(&[1]).scale(&rat(5)));
        let r = e.pair_apply(Generator::minus(-1), Generator::minus(-2), &FockVector::vacuum()).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn inner_product_examples() {
        let e = engine(2, 2);
        assert_eq!(e.inner_product(&FockVector::vacuum(), &FockVector::vacuum()).unwrap(), rat(1));
        assert_eq!(e.inner_product(&wv(&[1]), &wv(&[2])).unwrap(), rat(0));
        for p in 1..=3 {
            let e = engine(1, p);
            assert_eq!(e.inner_product(&wv(&[1, 1]), &wv(&[1, 1])).unwrap(), rat(2 * p));
            assert_eq!(e.inner_product(&wv(&[-1, -1]), &wv(&[-1, -1])).unwrap(), rat(p * (2 * p - 2)));
        }
    }

    #[test]
    fn mixed_level_two_gram() {
        let e = FockEngine::new(1, ratio(7, 3)).unwrap();
        let p = ratio(7, 3);
        let g = e.gram_matrix(&[w(&[-1, 1]), w(&[1, -1])]).unwrap();
        let off = &p * (rat(2) - &p);
        let expect = ExactMatrix::from_rows(vec![vec![&p * &p, off.clone()], vec![off, &p * &p]]).unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn gram_examples() {
        let e = engine(1, 3);
        assert_eq!(e.gram_matrix(&[w(&[])]).unwrap(), ExactMatrix::identity(1));
        assert_eq!(e.gram_matrix(&[w(&[1]), w(&[-1])]).unwrap(), ExactMatrix::identity(2).scale(&rat(3)));
        let words: Vec<CreationWord> = [[-1, -1], [-1, 1], [1, -1], [1, 1]].iter().map(|m| w(m)).collect();
        let g = e.gram_matrix(&words).unwrap();
        assert!(g.is_symmetric());
        assert_eq!(g[(3, 3)], rat(6));
    }

    #[test]
    fn rejects_nonpositive_order() {
        assert!(FockEngine::new(1, rat(0)).is_err());
        assert!(FockEngine::new(0, rat(1)).is_err());
    }

    #[test]
    fn fock_vector_json() {
        let mut v = wv(&[1, -2]);
        v.add_term(w(&[]), &ratio(-1, 2));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[{"word":[],"coeff":"-1/2"},{"word":[1,-2],"coeff":"1"}]"#
        );
    }
    fn ops(e: &FockEngine, word: &[Generator], v: &FockVector) -> FockVector {
        word.iter().rev().fold(v.clone(), |acc, &g| e.apply(g, &acc).unwrap())
    }

    /// `[[x, y]_s1, z]_s2 v` with `[a, b]_s = ab + s·ba`.
    fn nested(e: &FockEngine, x: Generator, y: Generator, z: Generator, s1: i64, s2: i64, v: &FockVector) -> FockVector {
        let (s1, s2) = (rat(s1), rat(s2));
        let mut out = ops(e, &[x, y, z], v);
        out.add_scaled(&ops(e, &[y, x, z], v), &s1);
        out.add_scaled(&ops(e, &[z, x, y], v), &s2);
        out.add_scaled(&ops(e, &[z, y, x], v), &(&s1 * &s2));
        out
    }

    #[test]
    fn literal_relative_parafermion_fails_on_fock_space() {
        let e = engine(1, 2);
        let (fp, bp, fm) = (Generator::plus(-1), Generator::plus(1), Generator::minus(-1));
        let states = [FockVector::vacuum(), wv(&[1]), wv(&[-1]), wv(&[1, -1])];
        let mut pf_fails = 0;
        for v in &states {
            let target = e.apply(bp, v).unwrap().scale(&rat(2));
            assert_eq!(nested(&e, fp, bp, fm, 1, 1, v), target);
            if nested(&e, fp, bp, fm, -1, -1, v) != target.scale(&rat(-1)) {
                pf_fails += 1;
            }
        }
        assert!(pf_fails > 0);
    }
}
