//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pso_core::engine::{CreationWord, FockEngine, FockVector};
use pso_core::exact::{rat, Rational};
use pso_core::fock::{induced_dims, irreducibility_probe, ModuleSnapshot};
use pso_core::gz::{self, TopRow};
use pso_core::graded::{self, position_grade, AlgebraElement, Generator, Grade, RelationFamily, Sign, WeightVector};

type Check = std::result::Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check, Duration);

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn parity(a: Grade, b: Grade) -> i64 {
    if (a.a1 * b.a1 + a.a2 * b.a2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    let (a, b) = (x.grade().unwrap(), y.grade().unwrap());
    let yx = y.matmul(x).scale_rational(&rat(parity(a, b)));
    x.matmul(y).sub(&yx).with_grade(a + b).expect("homogeneous bracket")
}

/// Grading, symmetry and Jacobi for one homogeneous triple.
fn axioms_hold(x: &AlgebraElement, y: &AlgebraElement, z: &AlgebraElement) -> std::result::Result<(), String> {
    let (a, b, c) = (x.grade().unwrap(), y.grade().unwrap(), z.grade().unwrap());
    let xy = bracket(x, y);
    if xy.entries().any(|(&(r, col), _)| position_grade(r, col).ok() != Some(a + b)) {
        return fail(format!("grading: [{x}, {y}] leaves degree {}", a + b));
    }
    let yx = bracket(y, x).scale_rational(&rat(-parity(a, b)));
    if xy != yx {
        return fail(format!("symmetry: {x}, {y}"));
    }
    let t1 = bracket(x, &bracket(y, z)).scale_rational(&rat(parity(a, c)));
    let t2 = bracket(y, &bracket(z, x)).scale_rational(&rat(parity(b, a)));
    let t3 = bracket(z, &xy).scale_rational(&rat(parity(c, b)));
    if !t1.add(&t2).add(&t3).is_zero() {
        return fail(format!("jacobi: {x}, {y}, {z}"));
    }
    Ok(())
}

fn crit1() -> Check {
    let triples = graded::basis_triples(1).map_err(e)?;
    if triples.len() != 12usize.pow(3) {
        return fail(format!("expected 1728 basis triples at n=1, got {}", triples.len()));
    }
    for (x, y, z) in &triples {
        axioms_hold(x, y, z)?;
    }
    let lib = graded::axiom_check(1, &triples).map_err(e)?;
    if !lib.all_pass() {
        return fail(format!("library axiom check at n=1: {:?}", lib.first_failure));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2usize, 3] {
        let basis = graded::canonical_basis(n).map_err(e)?;
        let mut sample = Vec::new();
        for _ in 0..200 {
            let t = (
                graded::random_homogeneous(&basis, &mut rng),
                graded::random_homogeneous(&basis, &mut rng),
                graded::random_homogeneous(&basis, &mut rng),
            );
            axioms_hold(&t.0, &t.1, &t.2)?;
            sample.push(t);
        }
        let lib = graded::axiom_check(n, &sample).map_err(e)?;
        if !lib.all_pass() {
            return fail(format!("library axiom check at n={n}: {:?}", lib.first_failure));
        }
    }
    Ok("1728 basis triples at n=1, 200 random triples at n=2 and n=3".into())
}

fn crit2() -> Check {
    let mut counts = Vec::new();
    for family in [RelationFamily::Parafermion, RelationFamily::Paraboson, RelationFamily::RelativeParaboson] {
        let rep = graded::relation_check(family, 2).map_err(e)?;
        if !rep.all_pass() || rep.instances == 0 {
            return fail(format!("{} fails: {:?}", family.name(), rep.first_counterexample));
        }
        counts.push(format!("{} {}/{}", family.name(), rep.passed, rep.instances));
    }
    let pf = graded::relation_check(RelationFamily::RelativeParafermion, 2).map_err(e)?;
    if pf.failed == 0 {
        return fail("relative-parafermion relations hold everywhere");
    }
    counts.push(format!("relative-parafermion fails {}/{}", pf.failed, pf.instances));
    Ok(counts.join(", "))
}

fn crit3() -> Check {
    let mut dims = Vec::new();
    for n in 1..=3usize {
        let rep = graded::bracket_closure(n).map_err(e)?;
        let expected = 4 * n * (2 * n + 1);
        if rep.closure_dim != expected || rep.constrained_dim != expected || !rep.all_elements_constrained {
            return fail(format!("n={n}: {rep:?}, expected {expected}"));
        }
        dims.push(rep.closure_dim.to_string());
    }
    Ok(format!("closure dimensions {}", dims.join(", ")))
}

fn crit4() -> Check {
    let rep = graded::gl_relation_check(2).map_err(e)?;
    if !rep.all_pass() {
        return fail(format!("{:?}", rep.first_counterexample));
    }
    let ms = graded::modes(2);
    let grade = |j: i64, k: i64| graded::mode_grade(j) + graded::mode_grade(k);
    let mut count = 0;
    for &j in &ms {
        if graded::cartan_h(j).map_err(e)? != graded::gl_e(j, j).map_err(e)? {
            return fail(format!("E({j},{j}) differs from h({j})"));
        }
        for &k in &ms {
            for &l in &ms {
                for &m in &ms {
                    let x = graded::gl_e(j, k).map_err(e)?;
                    let y = graded::gl_e(l, m).map_err(e)?;
                    let s = parity(grade(j, k), grade(l, m));
                    let lhs = x.matmul(&y).sub(&y.matmul(&x).scale_rational(&rat(s)));
                    let mut rhs = AlgebraElement::zero(2, Grade::ZERO);
                    if k == l {
                        rhs = rhs.add(&graded::gl_e(j, m).map_err(e)?);
                    }
                    if j == m {
                        rhs = rhs.sub(&graded::gl_e(l, k).map_err(e)?.scale_rational(&rat(s)));
                    }
                    if lhs != rhs {
                        return fail(format!("E({j},{k}), E({l},{m})"));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} bracket instances and 4 Cartan identities at n=2"))
}

fn crit5() -> Check {
    let vac = FockVector::vacuum();
    for p in 1..=3i64 {
        let engine = FockEngine::new(2, rat(p)).map_err(e)?;
        if engine.inner_product(&vac, &vac).map_err(e)? != Rational::one() {
            return fail(format!("<0|0> != 1 at p={p}"));
        }
        for j in graded::modes(2) {
            if !engine.apply(Generator::minus(j), &vac).map_err(e)?.is_zero() {
                return fail(format!("c({j},-)|0> != 0 at p={p}"));
            }
            for k in graded::modes(2) {
                let expected = vac.scale(&rat(if j == k { p } else { 0 }));
                let pair = engine.pair_apply(Generator::minus(j), Generator::plus(k), &vac).map_err(e)?;
                let composed = engine
                    .apply(Generator::minus(j), &engine.apply(Generator::plus(k), &vac).map_err(e)?)
                    .map_err(e)?;
                if pair != expected || composed != expected {
                    return fail(format!("pair ({j},{k}) at p={p}: {pair} / {composed}"));
                }
            }
        }
    }
    Ok("vacuum norm, annihilation and 16 pair eigenvalues for p=1,2,3".into())
}

fn crit6() -> Check {
    let mut seen = Vec::new();
    for p in 1..=3i64 {
        let engine = FockEngine::new(1, rat(p)).map_err(e)?;
        let square = |i: i64| -> std::result::Result<Rational, String> {
            let g = Generator::plus(i);
            let v = engine.apply(g, &engine.apply(g, &FockVector::vacuum()).map_err(e)?).map_err(e)?;
            engine.inner_product(&v, &v).map_err(e)
        };
        let (b, f) = (square(1)?, square(-1)?);
        if b != rat(2 * p) || f != rat(p * (2 * p - 2)) {
            return fail(format!("p={p}: boson {b}, fermion {f}"));
        }
        seen.push(format!("p={p}: {b}, {f}"));
    }
    Ok(seen.join("; "))
}

fn without_zeros(m: BTreeMap<WeightVector, usize>) -> BTreeMap<WeightVector, usize> {
    m.into_iter().filter(|(_, c)| *c > 0).collect()
}

fn crit7() -> Check {
    let mut blocks = 0;
    for n in 1..=2usize {
        for p in 1..=2i64 {
            let snap = ModuleSnapshot::build(n, rat(p), 4).map_err(e)?;
            let table = snap.dimension_table();
            for level in 0..=4usize {
                let gram: BTreeMap<_, _> =
                    table.iter().filter(|((l, _), _)| *l == level).map(|((_, w), d)| (w.clone(), *d)).collect();
                let patterns = without_zeros(gz::count_basis(n, p, level));
                if gram != patterns {
                    return fail(format!("n={n} p={p} L={level}: gram {gram:?} vs patterns {patterns:?}"));
                }
                blocks += gram.len();
            }
        }
    }
    Ok(format!("{blocks} weight spaces agree for n<=2, p<=2, L<=4"))
}

fn crit8() -> Check {
    let mut blocks = 0;
    for n in 1..=2usize {
        for p in 1..=3i64 {
            let pr = rat(p);
            let snap = ModuleSnapshot::build(n, pr.clone(), 4).map_err(e)?;
            for (level, w, verdict) in snap.psd_report().map_err(e)? {
                if !verdict.is_psd() {
                    return fail(format!("n={n} p={p} L={level} {}: not PSD", w.display(n)));
                }
            }
            for level in 0..=4usize {
                let induced = induced_dims(n, &pr, level);
                let uncut = gz::count_patterns(n, &pr, level, None);
                let cut = gz::count_patterns(n, &pr, level, Some(p));
                if induced != uncut {
                    return fail(format!("n={n} p={p} L={level}: induced dimensions differ from uncut pattern counts"));
                }
                for (w, &dim) in &induced {
                    let rank = snap.block(level, w).map_or(0, |b| b.rank);
                    let radical = dim.checked_sub(rank).ok_or_else(|| format!("rank {rank} exceeds {dim}"))?;
                    let expected = uncut[w] - cut.get(w).copied().unwrap_or(0);
                    if radical != expected {
                        return fail(format!(
                            "n={n} p={p} L={level} {}: radical {radical}, patterns {expected}",
                            w.display(n)
                        ));
                    }
                    blocks += 1;
                }
            }
        }
    }
    Ok(format!("PSD and radical dimensions on {blocks} weight spaces, p=1,2,3"))
}

fn crit9() -> Check {
    let mut checks = 0;
    for n in 1..=2usize {
        for p in 1..=3i64 {
            let snap = ModuleSnapshot::build(n, rat(p), 4).map_err(e)?;
            for level in 0..=3usize {
                for i in graded::modes(n) {
                    if !snap.adjointness_check(i, level).map_err(e)? {
                        return fail(format!("adjointness n={n} p={p} L={level} i={i}"));
                    }
                    for k in graded::modes(n) {
                        if !snap.closure_check(i, k, level).map_err(e)? {
                            return fail(format!("closure n={n} p={p} L={level} ({i},{k})"));
                        }
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} adjointness checks with pair closure, n<=2, p<=3, L<=3"))
}

fn random_mode<R: Rng>(rng: &mut R) -> i64 {
    let m = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn crit10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut nonzero = 0;
    for case in 0..50 {
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let g = Generator::new(random_mode(&mut rng), sign).map_err(e)?;
        let len = rng.gen_range(0..=3);
        let word = CreationWord::new((0..len).map(|_| random_mode(&mut rng)).collect()).map_err(e)?;
        let v = FockVector::word(word);
        let p = rat(rng.gen_range(1..=3));
        let base = (g.mode.unsigned_abs() as usize).max(v.max_mode());
        let results = (base..base + 3)
            .map(|r| pso_core::fock::infinite_action_at(g, &v, &p, r))
            .collect::<pso_core::Result<Vec<_>>>()
            .map_err(e)?;
        if results.windows(2).any(|w| w[0] != w[1]) {
            return fail(format!("case {case}: {} on {v} depends on the truncation", g.name()));
        }
        if results[0] != pso_core::fock::infinite_action(g, &v, &p).map_err(e)? {
            return fail(format!("case {case}: infinite_action disagrees"));
        }
        if !results[0].is_zero() {
            nonzero += 1;
        }
    }
    let mut trips = 0;
    for n in 1..=3usize {
        for total in 0..=3usize {
            for top in TopRow::all_with_total(n, total) {
                for pat in gz::enumerate_patterns(&top).into_iter().filter(|q| gz::stability_index(q).is_some()) {
                    let inf = gz::phi_to_infinite(&pat).map_err(e)?;
                    if gz::phi_from_infinite(&inf, 2 * n).map_err(e)? != pat {
                        return fail(format!("round trip fails for {pat}"));
                    }
                    let ext = gz::phi_extend(&pat).map_err(e)?;
                    if gz::phi_to_infinite(&ext).map_err(e)? != inf {
                        return fail(format!("extension changes the infinite pattern of {pat}"));
                    }
                    trips += 1;
                }
            }
        }
    }
    if trips == 0 {
        return fail("no stable patterns enumerated");
    }
    Ok(format!("50 truncation cases ({nonzero} nonzero), {trips} stable pattern round trips"))
}

fn crit11() -> Check {
    let mut dims = Vec::new();
    for n in 1..=2usize {
        for p in 1..=2i64 {
            let snap = ModuleSnapshot::build(n, rat(p), 3).map_err(e)?;
            let rep = irreducibility_probe(&snap, 3).map_err(e)?;
            if !rep.passed() {
                return fail(format!("n={n} p={p}: kernel dimensions {:?}", rep.kernel_dims));
            }
            dims.push(format!("n={n},p={p}"));
        }
    }
    Ok(format!("annihilator kernels vanish at L=1..3 for {}", dims.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "axioms", crit1, Duration::from_secs(60)),
        (2, "triple relations", crit2, Duration::from_secs(30)),
        (3, "bracket closure", crit3, Duration::from_secs(120)),
        (4, "gl embedding", crit4, Duration::from_secs(60)),
        (5, "Fock ground state", crit5, Duration::from_secs(60)),
        (6, "single-mode norms", crit6, Duration::from_secs(60)),
        (7, "Gram rank vs patterns", crit7, Duration::from_secs(600)),
        (8, "unitarity and radical", crit8, Duration::from_secs(600)),
        (9, "adjointness and closure", crit9, Duration::from_secs(600)),
        (10, "infinite rank", crit10, Duration::from_secs(600)),
        (11, "irreducibility probe", crit11, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; took {took:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({name}): {detail} [{took:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}): {why} [{took:.2?}]");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
