//! The Fock space `Ṽ(p)`: the induced module modulo the radical of its
//! contravariant form, built level by level from Gram matrices of words.

use std::collections::BTreeMap;
use std::io::Write;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::{CreationWord, FockEngine, FockVector};
use crate::error::{Error, Result};
use crate::exact::{exact_kernel, exact_rank, psd_certificate, rat, solve, ExactMatrix, PsdVerdict, Rational};
use crate::graded::{mode_grade, modes, Generator, Grade, Sign, WeightVector};
use crate::gz::vacuum_weight;

/// Vacuum weight plus `ε_i` for every letter `i`.
pub fn word_weight(w: &CreationWord, n: usize, p: &Rational) -> Result<WeightVector> {
    let mut weight = vacuum_weight(n, p);
    for &m in w.modes() {
        if m.unsigned_abs() as usize > n {
            return Err(Error::OutOfRange { mode: m, rank: n });
        }
        weight.add_to(m, &Rational::one());
    }
    Ok(weight)
}

/// All words of length `level` over `[-n,n]*`, in lexicographic order.
pub fn all_words(n: usize, level: usize) -> Vec<CreationWord> {
    if level == 0 {
        return vec![CreationWord::vacuum()];
    }
    let ms = modes(n);
    std::iter::repeat_n(ms, level)
        .multi_cartesian_product()
        .map(|m| CreationWord::new(m).expect("nonzero modes"))
        .collect()
}

/// The words of one level and weight with their Gram data.
#[derive(Clone, Debug)]
pub struct LevelBlock {
    pub n: usize,
    pub p: Rational,
    pub level: usize,
    pub weight: WeightVector,
    pub words: Vec<CreationWord>,
    pub gram: ExactMatrix,
    pub rank: usize,
    /// Kernel of the Gram matrix in word coordinates.
    pub radical: Vec<Vec<Rational>>,
    /// Indices of the words kept as quotient coordinates.
    pub representatives: Vec<usize>,
}

impl LevelBlock {
    pub fn representative_gram(&self) -> ExactMatrix {
        self.gram.principal(&self.representatives)
    }

    pub fn representative_words(&self) -> Vec<CreationWord> {
        self.representatives.iter().map(|&i| self.words[i].clone()).collect()
    }
}

/// Greedy choice: keep a word when it raises the rank of the principal
/// Gram submatrix of the words kept so far.
fn choose_representatives(gram: &ExactMatrix, rank: usize) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..gram.rows() {
        if kept.len() == rank {
            break;
        }
        let mut trial = kept.clone();
        trial.push(i);
        if exact_rank(&gram.principal(&trial)) == trial.len() {
            kept = trial;
        }
    }
    kept
}

/// Groups the words of one level by weight and computes each block's Gram data.
pub fn build_level(engine: &FockEngine, level: usize) -> Result<Vec<LevelBlock>> {
    let n = engine.rank();
    let p = engine.p().clone();
    let mut groups: BTreeMap<WeightVector, Vec<CreationWord>> = BTreeMap::new();
    for w in all_words(n, level) {
        groups.entry(word_weight(&w, n, &p)?).or_default().push(w);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (weight, words) in groups {
        let gram = engine.gram_matrix(&words)?;
        let rank = exact_rank(&gram);
        let radical = exact_kernel(&gram);
        let representatives = choose_representatives(&gram, rank);
        out.push(LevelBlock { n, p: p.clone(), level, weight, words, gram, rank, radical, representatives });
    }
    Ok(out)
}

/// Dimension of the level-`L` weight spaces of the induced module, counted
/// by PBW monomials in the positive part: the `2n` creators and the
/// pair elements `⟦c̄_j^+, c̄_k^+⟧` (`j ≤ k`, nonzero). Elements whose grade
/// `a` has `a·a = 1` occur at most once in a monomial.
pub fn induced_dims(n: usize, p: &Rational, level: usize) -> BTreeMap<WeightVector, usize> {
    let ms = modes(n);
    let index = |m: i64| ms.iter().position(|&x| x == m).expect("mode in range");
    // (offset vector, grade) for every basis element of the positive part.
    let mut elements: Vec<(Vec<usize>, Grade)> = Vec::new();
    for &i in &ms {
        let mut v = vec![0; ms.len()];
        v[index(i)] += 1;
        elements.push((v, mode_grade(i)));
    }
    for (a, &j) in ms.iter().enumerate() {
        for &k in &ms[a..] {
            if j == k && j < 0 {
                continue;
            }
            let mut v = vec![0; ms.len()];
            v[index(j)] += 1;
            v[index(k)] += 1;
            elements.push((v, mode_grade(j) + mode_grade(k)));
        }
    }
    let mut states: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(vec![0; ms.len()], 1)]);
    for (v, g) in &elements {
        let size: usize = v.iter().sum();
        let max_power = if g.dot(*g) == 1 { 1 } else { level / size };
        let mut next: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (state, count) in &states {
            let total: usize = state.iter().sum();
            for e in 0..=max_power {
                if total + e * size > level {
                    break;
                }
                let s: Vec<usize> = state.iter().zip(v).map(|(a, b)| a + e * b).collect();
                *next.entry(s).or_insert(0) += count;
            }
        }
        states = next;
    }
    let mut out = BTreeMap::new();
    for (state, count) in states {
        if state.iter().sum::<usize>() != level {
            continue;
        }
        let mut w = vacuum_weight(n, p);
        for (k, &e) in state.iter().enumerate() {
            w.add_to(ms[k], &rat(e as i64));
        }
        out.insert(w, count);
    }
    out
}

/// Levels `0..=max_level` of `Ṽ(p)` together with the engine that built them.
pub struct ModuleSnapshot {
    n: usize,
    p: Rational,
    max_level: usize,
    levels: Vec<Vec<LevelBlock>>,
    engine: FockEngine,
}

impl ModuleSnapshot {
    pub fn build(n: usize, p: Rational, max_level: usize) -> Result<Self> {
        let engine = FockEngine::new(n, p.clone())?;
        let levels = (0..=max_level).map(|l| build_level(&engine, l)).collect::<Result<_>>()?;
        Ok(ModuleSnapshot { n, p, max_level, levels, engine })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn engine(&self) -> &FockEngine {
        &self.engine
    }

    pub fn level(&self, level: usize) -> &[LevelBlock] {
        self.levels.get(level).map_or(&[], Vec::as_slice)
    }

    pub fn block(&self, level: usize, weight: &WeightVector) -> Option<&LevelBlock> {
        self.level(level).iter().find(|b| &b.weight == weight)
    }

    /// Quotient dimension per `(level, weight)`, blocks of rank zero omitted.
    pub fn dimension_table(&self) -> BTreeMap<(usize, WeightVector), usize> {
        self.levels
            .iter()
            .flatten()
            .filter(|b| b.rank > 0)
            .map(|b| ((b.level, b.weight.clone()), b.rank))
            .collect()
    }

    /// Representative coordinates of a vector lying in the given block.
    pub fn coordinates(&self, level: usize, weight: &WeightVector, v: &FockVector) -> Result<Vec<Rational>> {
        let Some(block) = self.block(level, weight) else {
            return if v.is_zero() {
                Ok(Vec::new())
            } else {
                Err(Error::Precondition(format!("no block at level {level} for weight {}", weight.display(self.n))))
            };
        };
        if block.representatives.len() != block.rank {
            return Err(Error::Internal("no nonsingular principal representative set".into()));
        }
        let reps = block.representative_words();
        let b: Vec<Rational> = reps
            .iter()
            .map(|r| self.engine.inner_product(&FockVector::word(r.clone()), v))
            .collect::<Result<_>>()?;
        solve(&block.representative_gram(), &b)
    }

    fn target(&self, g: Generator, level: usize, source: &WeightVector) -> Result<(usize, WeightVector)> {
        let target_level = match g.sign {
            Sign::Plus => level + 1,
            Sign::Minus => level
                .checked_sub(1)
                .ok_or_else(|| Error::Precondition("annihilation needs level ≥ 1".into()))?,
        };
        if target_level > self.max_level {
            return Err(Error::Precondition(format!("level {target_level} was not built")));
        }
        let weight = source.clone().with(g.mode, rat(g.sign.value()));
        Ok((target_level, weight))
    }

    fn target_size(&self, level: usize, weight: &WeightVector) -> usize {
        self.block(level, weight).map_or(0, |b| b.rank)
    }

    /// Matrix of `g` from the quotient block `(level, source)` to its target
    /// block, in representative coordinates; rows index target representatives.
    pub fn action_matrix(&self, g: Generator, level: usize, source: &WeightVector) -> Result<ExactMatrix> {
        let (tl, tw) = self.target(g, level, source)?;
        let rows = self.target_size(tl, &tw);
        let Some(block) = self.block(level, source) else {
            return Ok(ExactMatrix::zeros(rows, 0));
        };
        let mut m = ExactMatrix::zeros(rows, block.rank);
        for (c, r) in block.representative_words().into_iter().enumerate() {
            let image = self.engine.apply(g, &FockVector::word(r))?;
            let x = self.coordinates(tl, &tw, &image)?;
            for (row, val) in x.into_iter().enumerate() {
                m[(row, c)] = val;
            }
        }
        Ok(m)
    }

    pub fn generator_action(&self, g: Generator, level: usize) -> Result<GeneratorAction> {
        let mut blocks = Vec::new();
        for b in self.level(level) {
            let (_, target) = self.target(g, level, &b.weight)?;
            blocks.push(BlockAction {
                source: b.weight.clone(),
                target,
                matrix: self.action_matrix(g, level, &b.weight)?,
            });
        }
        Ok(GeneratorAction { generator: g, level, blocks })
    }

    /// Checks `G_{L+1} A⁺ = (A⁻)ᵀ G_L` for `c̄_i^±` on every block of level `L`.
    pub fn adjointness_check(&self, i: i64, level: usize) -> Result<bool> {
        for b in self.level(level) {
            let plus = self.action_matrix(Generator::plus(i), level, &b.weight)?;
            let (tl, tw) = self.target(Generator::plus(i), level, &b.weight)?;
            let Some(tb) = self.block(tl, &tw) else { continue };
            let minus = self.action_matrix(Generator::minus(i), tl, &tw)?;
            let lhs = tb.representative_gram().mul_matrix(&plus)?;
            let rhs = minus.transpose().mul_matrix(&b.representative_gram())?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Compares `A⁻_j A⁺_k − (−1)^{a·b} A⁺_k A⁻_j` with the pair element
    /// `⟦c̄_j^−, c̄_k^+⟧` on every quotient block of level `L`.
    pub fn closure_check(&self, j: i64, k: i64, level: usize) -> Result<bool> {
        let (gm, gp) = (Generator::minus(j), Generator::plus(k));
        let s = mode_grade(j).sign(mode_grade(k));
        for b in self.level(level) {
            if b.rank == 0 {
                continue;
            }
            let w = &b.weight;
            let up = w.clone().with(k, rat(1));
            let first = self.action_matrix(gm, level + 1, &up)?.mul_matrix(&self.action_matrix(gp, level, w)?)?;
            let target = up.clone().with(j, rat(-1));
            let rows = self.target_size(level, &target);
            let second = if level == 0 {
                ExactMatrix::zeros(rows, b.rank)
            } else {
                let down = w.clone().with(j, rat(-1));
                self.action_matrix(gp, level - 1, &down)?.mul_matrix(&self.action_matrix(gm, level, w)?)?
            };
            let composed = first.sub_matrix(&second.scale(&rat(s)))?;
            let mut direct = ExactMatrix::zeros(rows, b.rank);
            for (c, r) in b.representative_words().into_iter().enumerate() {
                let image = self.engine.pair_apply(gm, gp, &FockVector::word(r))?;
                for (row, val) in self.coordinates(level, &target, &image)?.into_iter().enumerate() {
                    direct[(row, c)] = val;
                }
            }
            if composed != direct {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn psd_report(&self) -> Result<Vec<(usize, WeightVector, PsdVerdict)>> {
        self.levels
            .iter()
            .flatten()
            .map(|b| Ok((b.level, b.weight.clone(), psd_certificate(&b.gram)?)))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Block<'a> {
            weight: String,
            words: &'a [CreationWord],
            rank: usize,
            radical_dim: usize,
        }
        #[derive(Serialize)]
        struct Level<'a> {
            #[serde(rename = "L")]
            level: usize,
            blocks: Vec<Block<'a>>,
        }
        let levels: Vec<Level> = self
            .levels
            .iter()
            .enumerate()
            .map(|(l, blocks)| Level {
                level: l,
                blocks: blocks
                    .iter()
                    .map(|b| Block {
                        weight: b.weight.display(self.n),
                        words: &b.words,
                        rank: b.rank,
                        radical_dim: b.radical.len(),
                    })
                    .collect(),
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "n": self.n,
            "p": self.p.to_string(),
            "levels": levels,
        })
    }

    /// One CSV row per block: level, weight, word count, rank, radical dimension.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Internal(e.to_string());
        wr.write_record(["L", "weight", "words", "rank", "radicalDim"]).map_err(io)?;
        for b in self.levels.iter().flatten() {
            wr.write_record([
                b.level.to_string(),
                b.weight.display(self.n),
                b.words.len().to_string(),
                b.rank.to_string(),
                b.radical.len().to_string(),
            ])
            .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Internal(e.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct BlockAction {
    pub source: WeightVector,
    pub target: WeightVector,
    /// Rows index target representatives, columns source representatives.
    pub matrix: ExactMatrix,
}

#[derive(Clone, Debug)]
pub struct GeneratorAction {
    pub generator: Generator,
    pub level: usize,
    pub blocks: Vec<BlockAction>,
}

pub fn dimension_table(n: usize, p: Rational, max_level: usize) -> Result<BTreeMap<(usize, WeightVector), usize>> {
    Ok(ModuleSnapshot::build(n, p, max_level)?.dimension_table())
}

#[derive(Clone, Debug, Serialize)]
pub struct LowestWeightReport {
    pub n: usize,
    pub p: String,
    pub annihilated: bool,
    pub pair_values_ok: bool,
    /// `h_i` eigenvalue of the vacuum for each mode.
    pub cartan_eigenvalues: Vec<(i64, String)>,
    pub eigenvalues_ok: bool,
}

impl LowestWeightReport {
    pub fn passed(&self) -> bool {
        self.annihilated && self.pair_values_ok && self.eigenvalues_ok
    }
}

/// Vacuum checks: `c̄_j^−|0⟩ = 0`, `⟦c̄_j^−, c̄_k^+⟧|0⟩ = pδ_jk|0⟩` and the `h_i` eigenvalues.
pub fn lowest_weight_check(n: usize, p: Rational) -> Result<LowestWeightReport> {
    let engine = FockEngine::new(n, p.clone())?;
    let vac = FockVector::vacuum();
    let ms = modes(n);
    let mut annihilated = true;
    let mut pair_values_ok = true;
    for &j in &ms {
        annihilated &= engine.apply_annihilation(j, &vac)?.is_zero();
        for &k in &ms {
            let v = engine.pair_apply(Generator::minus(j), Generator::plus(k), &vac)?;
            let expect = if j == k { vac.scale(&p) } else { FockVector::zero() };
            pair_values_ok &= v == expect;
        }
    }
    let half = Rational::new(1.into(), 2.into());
    let vacuum = vacuum_weight(n, &p);
    let mut cartan_eigenvalues = Vec::new();
    let mut eigenvalues_ok = true;
    for &i in &ms {
        let hv = engine.pair_apply(Generator::plus(i), Generator::minus(i), &vac)?.scale(&half);
        let lambda = hv.vacuum_coeff();
        eigenvalues_ok &= hv == vac.scale(&lambda) && lambda == vacuum.get(i);
        cartan_eigenvalues.push((i, lambda.to_string()));
    }
    Ok(LowestWeightReport { n, p: p.to_string(), annihilated, pair_values_ok, cartan_eigenvalues, eigenvalues_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityReport {
    pub n: usize,
    pub p: String,
    pub max_level: usize,
    /// Joint annihilator kernel dimension per level `1..=max_level`.
    pub kernel_dims: Vec<usize>,
}

impl IrreducibilityReport {
    pub fn passed(&self) -> bool {
        self.kernel_dims.iter().all(|&d| d == 0)
    }
}

/// Dimension of the joint kernel of all `c̄_i^−` on the quotient, level by level.
pub fn irreducibility_probe(snapshot: &ModuleSnapshot, max_level: usize) -> Result<IrreducibilityReport> {
    if max_level == 0 || max_level > snapshot.max_level {
        return Err(Error::Precondition(format!("max level must lie in 1..={}", snapshot.max_level)));
    }
    let mut kernel_dims = Vec::new();
    for level in 1..=max_level {
        let mut dim = 0;
        for b in snapshot.level(level).iter().filter(|b| b.rank > 0) {
            let mut stacked = ExactMatrix::zeros(0, b.rank);
            for i in modes(snapshot.n) {
                stacked = stacked.vstack(&snapshot.action_matrix(Generator::minus(i), level, &b.weight)?)?;
            }
            dim += b.rank - exact_rank(&stacked);
        }
        kernel_dims.push(dim);
    }
    Ok(IrreducibilityReport { n: snapshot.n, p: snapshot.p.to_string(), max_level, kernel_dims })
}

/// `c̄_i^± v` on the infinite-rank Fock space, computed at truncation
/// rank `max(|i|, modes of v) + 1`.
pub fn infinite_action(g: Generator, v: &FockVector, p: &Rational) -> Result<FockVector> {
    let rank = g.mode.unsigned_abs() as usize;
    infinite_action_at(g, v, p, rank.max(v.max_mode()) + 1)
}

/// [`infinite_action`] at an explicit truncation rank.
pub fn infinite_action_at(g: Generator, v: &FockVector, p: &Rational, rank: usize) -> Result<FockVector> {
    let needed = (g.mode.unsigned_abs() as usize).max(v.max_mode());
    if rank < needed {
        return Err(Error::Precondition(format!("truncation rank {rank} is below {needed}")));
    }
    FockEngine::new(rank, p.clone())?.apply(g, v)
}

/// `⟨v1|v2⟩` at an explicit truncation rank.
pub fn infinite_inner_product_at(v1: &FockVector, v2: &FockVector, p: &Rational, rank: usize) -> Result<Rational> {
    FockEngine::new(rank, p.clone())?.inner_product(v1, v2)
}

/// Whether every block's Gram kernel vectors pair to zero with every word of the block.
pub fn radical_is_isotropic(block: &LevelBlock) -> bool {
    block.radical.iter().all(|v| {
        block.gram.mul_vector(v).map(|r| r.iter().all(Zero::is_zero)).unwrap_or(false)
    })
}
