//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raag_core::abelian::{fixed_lattice, periodic_lattice, IntMatrix};
use raag_core::alphabet::{Alphabet, GraphGroup, IndependenceRelation};
use raag_core::fixpoint::{
    chain_experiment, classify_group, fix_in_ball, per_equals_fix_of_power_check, per_in_ball,
    projection_invariant_check, Answer, ProductType, Scope, SquareProduct,
};
use raag_core::freesub::{benois_closure, fold, reduced_words_automaton, Nfa};
use raag_core::morphism::{example_fgno_auto, witness_endo, AutoVerdict};
use raag_core::trace::ball_enumerate;
use raag_core::{GroupElement, Letter, Morphism, Word};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn path3() -> Arc<GraphGroup> {
    GraphGroup::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
}

fn monomial(group: &Arc<GraphGroup>, parts: &[(usize, usize)]) -> GroupElement {
    GroupElement::from_letters(
        group,
        parts
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n(Letter::pos(g), e)),
    )
}

fn transitive_with_diagonal(rel: &IndependenceRelation, n: usize) -> bool {
    (0..n).all(|x| {
        (0..n).all(|y| {
            (0..n).all(|z| !(rel.related_or_equal(x, y) && rel.related_or_equal(y, z)) || rel.related_or_equal(x, z))
        })
    })
}

fn classification_equivalence() -> Check {
    let mut graphs = 0;
    for n in 1..=5usize {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let chosen: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let rel = IndependenceRelation::from_pairs(n, &chosen).map_err(|e| e.to_string())?;
            let oracle = transitive_with_diagonal(&rel, n);
            let (cliques, triple) = rel.is_union_of_cliques();
            ensure(cliques == oracle, || format!("n={n} mask={mask:b}: clique test disagrees"))?;
            if let Some([a, b, c]) = triple {
                ensure(
                    rel.related(a, b) && rel.related(b, c) && !rel.related(a, c) && a != c,
                    || format!("n={n} mask={mask:b}: bad witness triple"),
                )?;
            }
            let group = GraphGroup::new(Alphabet::new(&names).unwrap(), rel).map_err(|e| e.to_string())?;
            let verdict = classify_group(&group, Scope::Endomorphisms);
            ensure((verdict.answer == Answer::AllFinitelyGenerated) == oracle, || {
                format!("n={n} mask={mask:b}: verdict {:?}", verdict.answer)
            })?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} graphs"))
}

fn witness_endomorphism() -> Check {
    let g = path3();
    let phi = witness_endo(&g, [0, 1, 2]).map_err(|e| e.to_string())?;
    let report = projection_invariant_check(&phi, &[0, 2], 6).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("violations {:?}", report.violations))?;
    for i in 0..=6 {
        let u = monomial(&g, &[(0, i), (2, i)]);
        ensure(phi.apply(&u).unwrap() == u, || format!("a^{i} c^{i} not fixed"))?;
    }
    for i in 0..=4 {
        for j in 0..=4 {
            if i != j {
                let u = monomial(&g, &[(0, i), (2, j)]);
                ensure(phi.apply(&u).unwrap() != u, || format!("a^{i} c^{j} fixed"))?;
            }
        }
    }
    Ok(format!("{} fixed points in the radius-6 ball", report.fixed_points))
}

fn chain_experiment_path() -> Check {
    let g = path3();
    let phi = witness_endo(&g, [0, 1, 2]).unwrap();
    let report = chain_experiment(&phi, &[0, 2], 6).map_err(|e| e.to_string())?;
    ensure(report.strictly_ascending(), || "a probe was accepted".into())?;
    ensure(report.monotone, || "chain is not monotone".into())?;

    let level2 = fold(&[0, 2], &[monomial(&g, &[(0, 1), (2, 1)]).word().clone(), monomial(&g, &[(0, 2), (2, 2)]).word().clone()])
        .map_err(|e| e.to_string())?;
    ensure(level2.states() == 3, || format!("level 2 has {} states", level2.states()))?;
    let a_edges: Vec<(usize, usize)> = level2
        .signature()
        .into_iter()
        .filter(|&(_, x, _)| x == 0)
        .map(|(s, _, t)| (s, t))
        .collect();
    let has_a3 = a_edges.iter().any(|&(_, m)| {
        a_edges
            .iter()
            .any(|&(p, q)| p == m && a_edges.iter().any(|&(r, _)| r == q))
    });
    ensure(!has_a3, || "level 2 has an a^3 path".into())?;

    let f2 = GraphGroup::from_names(&["a", "c"], &[]).unwrap();
    let reduced: Vec<Word> = ball_enumerate(&f2, 6)
        .iter()
        .map(|u| Word(u.letters().iter().map(|l| Letter { gen: 2 * l.gen, ..*l }).collect()))
        .collect();
    let mut checked = 0;
    for n in 1..=6usize {
        let gens: Vec<Word> = (1..=n).map(|k| monomial(&g, &[(0, k), (2, k)]).word().clone()).collect();
        let graph = fold(&[0, 2], &gens).map_err(|e| e.to_string())?;
        let factors: Vec<Word> = gens.iter().flat_map(|w| [w.clone(), w.inverse()]).collect();
        let mut products: HashSet<Word> = HashSet::from([Word::empty()]);
        let mut layer = vec![Word::empty()];
        for _ in 0..5 {
            layer = layer
                .iter()
                .flat_map(|p| factors.iter().map(move |f| p.concat(f).free_reduce()))
                .filter(|w| products.insert(w.clone()))
                .collect();
        }
        for w in &reduced {
            let expect = products.contains(w);
            ensure(graph.member(w) == expect, || {
                format!("level {n}: member({}) = {}", w.display(&g.alphabet), !expect)
            })?;
            checked += 1;
        }
    }
    let states: Vec<String> = report.levels.iter().map(|l| l.states.to_string()).collect();
    Ok(format!("states per level [{}], {checked} membership cross-checks", states.join(",")))
}

/// Each letter edge is present with probability `density`, each ε-edge
/// with half that.
fn random_nfa(rng: &mut ChaCha8Rng, gens: &[usize], density: f64) -> Nfa {
    let mut nfa = Nfa::new(gens);
    let n = rng.gen_range(1..=5);
    nfa.add_states(n);
    nfa.set_initial(0);
    for s in 0..n {
        if rng.gen_bool(0.35) {
            nfa.set_final(s);
        }
    }
    nfa.set_final(rng.gen_range(0..n));
    let labels: Vec<Option<Letter>> = std::iter::once(None)
        .chain(gens.iter().flat_map(|&g| [Some(Letter::pos(g)), Some(Letter::neg(g))]))
        .collect();
    for s in 0..n {
        for t in 0..n {
            for &label in &labels {
                let p = if label.is_none() { density / 2.0 } else { density };
                if rng.gen_bool(p) {
                    nfa.add_transition(s, label, t);
                }
            }
        }
    }
    nfa
}

fn push_free(w: &[Letter], x: Letter) -> Vec<Letter> {
    let mut v = w.to_vec();
    if v.last() == Some(&x.inv()) {
        v.pop();
    } else {
        v.push(x);
    }
    v
}

/// Reductions of accepted inputs of length at most `input_len`, restricted
/// to results of length at most `out_len`.
fn reductions_of_accepted(nfa: &Nfa, input_len: usize, out_len: usize) -> BTreeSet<Vec<Letter>> {
    let mut eps: Vec<Vec<usize>> = vec![vec![]; nfa.states()];
    let mut moves: Vec<Vec<(Letter, usize)>> = vec![vec![]; nfa.states()];
    for &(s, label, t) in nfa.transitions() {
        match label {
            None => eps[s].push(t),
            Some(x) => moves[s].push((x, t)),
        }
    }
    let close = |set: BTreeSet<(usize, Vec<Letter>)>| -> BTreeSet<(usize, Vec<Letter>)> {
        let mut out = set.clone();
        let mut stack: Vec<_> = set.into_iter().collect();
        while let Some((s, w)) = stack.pop() {
            for &t in &eps[s] {
                if out.insert((t, w.clone())) {
                    stack.push((t, w.clone()));
                }
            }
        }
        out
    };
    let initial = nfa.initial_states().iter().map(|&s| (s, vec![])).collect();
    let mut frontier = close(initial);
    let mut accepted = BTreeSet::new();
    for step in 0..=input_len {
        for (s, w) in &frontier {
            if nfa.final_states().contains(s) && w.len() <= out_len {
                accepted.insert(w.clone());
            }
        }
        if step == input_len {
            break;
        }
        let remaining = input_len - step - 1;
        let next = frontier
            .iter()
            .flat_map(|(s, w)| moves[*s].iter().map(move |&(x, t)| (t, push_free(w, x))))
            .filter(|(_, w)| w.len() <= out_len + remaining)
            .collect();
        frontier = close(next);
    }
    accepted
}

/// Shortest accepted input reducing to each reduced word of length at most
/// `out_len`, searching over all inputs whose intermediate reductions stay
/// within length `bound`.
fn shortest_witnesses(nfa: &Nfa, bound: usize, out_len: usize) -> BTreeMap<Vec<Letter>, usize> {
    let mut dist: HashMap<(usize, Vec<Letter>), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in nfa.initial_states() {
        dist.insert((s, vec![]), 0);
        queue.push_back((s, vec![]));
    }
    while let Some((s, w)) = queue.pop_front() {
        let d = dist[&(s, w.clone())];
        for &(_, label, t) in nfa.transitions().filter(|tr| tr.0 == s) {
            let (v, cost) = match label {
                None => (w.clone(), 0),
                Some(x) => (push_free(&w, x), 1),
            };
            if v.len() > bound || dist.get(&(t, v.clone())).is_some_and(|&old| old <= d + cost) {
                continue;
            }
            dist.insert((t, v.clone()), d + cost);
            if cost == 0 {
                queue.push_front((t, v));
            } else {
                queue.push_back((t, v));
            }
        }
    }
    let mut out: BTreeMap<Vec<Letter>, usize> = BTreeMap::new();
    for ((s, w), d) in dist {
        if nfa.final_states().contains(&s) && w.len() <= out_len {
            let e = out.entry(w).or_insert(d);
            *e = (*e).min(d);
        }
    }
    out
}

fn all_inputs(gens: &[usize], max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = gens.iter().flat_map(|&g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| letters.iter().map(move |&x| w.concat(&Word(vec![x]))))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn benois_closure_random() -> Check {
    let gens = [0usize, 2];
    let reduced = reduced_words_automaton(&gens);
    let inputs = all_inputs(&gens, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nonempty = 0;
    let mut beyond_twelve: Vec<String> = Vec::new();
    for trial in 0..20 {
        let nfa = random_nfa(&mut rng, &gens, 0.1);
        let closure = benois_closure(&nfa);
        for w in &inputs {
            if nfa.accepts(w) {
                ensure(closure.accepts(&w.free_reduce()), || {
                    format!("nfa {trial}: reduction of accepted input {:?} rejected", w.letters())
                })?;
            }
        }
        let accepted = closure.enumerate_accepted(6);
        for w in &accepted {
            ensure(reduced.accepts(w), || format!("nfa {trial}: unreduced {:?}", w.letters()))?;
        }
        let short = reductions_of_accepted(&nfa, 12, 6);
        for w in &short {
            ensure(closure.accepts(&Word(w.clone())), || format!("nfa {trial}: missed {w:?}"))?;
        }
        let witnesses = shortest_witnesses(&nfa, 10, 6);
        let got: BTreeSet<&Vec<Letter>> = accepted.iter().map(|w| &w.0).collect();
        ensure(got == witnesses.keys().collect(), || {
            format!("nfa {trial}: accepted words differ from the witness search")
        })?;
        let longest = accepted
            .iter()
            .filter(|w| !short.contains(&w.0))
            .map(|w| witnesses[&w.0])
            .max();
        if let Some(len) = longest {
            let missing = accepted.iter().filter(|w| !short.contains(&w.0)).count();
            beyond_twelve.push(format!("nfa {trial}: {missing} words need inputs up to length {len}"));
        }
        if !accepted.is_empty() {
            nonempty += 1;
        }
    }
    let summary = format!("20 automata, {nonempty} with nonempty language, closure exact against the witness search");
    if beyond_twelve.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; but some accepted words have no accepted input of length <= 12: {}",
            beyond_twelve.join("; ")
        ))
    }
}

fn box_points(dim: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    (0..side.pow(dim as u32)).map(move |mut code| {
        (0..dim)
            .map(|_| {
                let d = (code % side) as i64 - bound;
                code /= side;
                d
            })
            .collect()
    })
}

fn lattice_matches_box(m: &IntMatrix) -> Result<usize, String> {
    let lattice = fixed_lattice(m).map_err(|e| e.to_string())?;
    let mut solutions = 0;
    for u in box_points(m.rows(), 5) {
        let v: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
        let fixed = m.act(&v).unwrap() == v;
        ensure(lattice.contains(&v).unwrap() == fixed, || format!("disagreement at {u:?}"))?;
        solutions += usize::from(fixed);
    }
    Ok(solutions)
}

fn abelian_layer() -> Check {
    let g = path3();
    let phi = witness_endo(&g, [0, 1, 2]).unwrap();
    let m = phi.abelianization_matrix();
    let basis = fixed_lattice(m).map_err(|e| e.to_string())?.basis_i64();
    ensure(basis == vec![vec![1, 0, 1], vec![0, 1, 0]], || format!("path basis {basis:?}"))?;
    let path_points = lattice_matches_box(m)?;

    let (_, ex) = example_fgno_auto();
    let lattice = fixed_lattice(ex.abelianization_matrix()).map_err(|e| e.to_string())?;
    ensure(lattice.rank() == 3, || format!("rank {}", lattice.rank()))?;
    for row in lattice.basis_i64() {
        ensure(row[0] == row[3] && row[3] == row[4], || format!("basis row {row:?}"))?;
    }
    let ex_points = lattice_matches_box(ex.abelianization_matrix())?;
    Ok(format!("box solutions: {path_points} (path), {ex_points} (five generators)"))
}

fn five_generator_example() -> Check {
    let (g, phi) = example_fgno_auto();
    let (mut verified_at, mut cert_ok) = (None, false);
    for depth in 1..=3 {
        let cert = phi.certify_automorphism(depth);
        if cert.verdict == AutoVerdict::Verified {
            verified_at = Some(depth);
            cert_ok = cert.check(&phi);
            break;
        }
    }
    let depth = verified_at.ok_or("not verified by depth 3")?;
    ensure(cert_ok, || "preimage words do not check".into())?;
    let fixed = fix_in_ball(&phi, 4);
    ensure(!fixed.is_empty(), || "no fixed points".into())?;
    for u in &fixed {
        ensure(u.project_pi(0) == u.project_pi(3) && u.project_pi(3) == u.project_pi(4), || {
            format!("{u} breaks the exponent-sum invariant")
        })?;
    }
    for i in 0..=4 {
        let u = monomial(&g, &[(0, i), (4, i), (3, i)]);
        ensure(phi.apply(&u).unwrap() == u, || format!("a^{i} e^{i} d^{i} not fixed"))?;
    }
    let report = chain_experiment(&phi, &[0, 4, 3], 4).map_err(|e| e.to_string())?;
    ensure(report.strictly_ascending(), || "a probe was accepted".into())?;
    Ok(format!("verified at depth {depth}, {} fixed points in the radius-4 ball", fixed.len()))
}

fn signed_permutations(gens: [usize; 2]) -> Vec<[(usize, bool); 2]> {
    let mut out = Vec::new();
    for swap in [false, true] {
        for s0 in [false, true] {
            for s1 in [false, true] {
                let (t0, t1) = if swap { (gens[1], gens[0]) } else { (gens[0], gens[1]) };
                out.push([(t0, s0), (t1, s1)]);
            }
        }
    }
    out
}

fn show(g: usize, inverse: bool, names: &[&str]) -> String {
    format!("{}{}", names[g], if inverse { "^-1" } else { "" })
}

fn square_example() -> Check {
    let sq = SquareProduct::standard();
    let names = ["a", "b", "c", "d"];
    let swap = sq
        .morphism_from_pairs([("", "c"), ("", "d"), ("a", ""), ("b", "")])
        .map_err(|e| e.to_string())?;
    let kind = sq.classify(&swap);
    ensure(matches!(kind, ProductType::TypeII { .. }), || format!("swap classified {}", kind.label()))?;
    let fix = sq.fix_generators(&swap, &kind, None, None).map_err(|e| e.to_string())?;
    let shown: Vec<String> = fix.iter().map(|u| u.to_string()).collect();
    ensure(shown == ["a c", "b d"], || format!("generators {shown:?}"))?;
    for u in &fix {
        ensure(swap.apply(u).unwrap() == *u, || format!("{u} not fixed"))?;
    }
    let per = per_equals_fix_of_power_check(&swap, 3, 4);
    ensure(per.equal(), || format!("swap: {per:?}"))?;

    let mut sampled = 0;
    for left in signed_permutations([0, 1]) {
        for right in signed_permutations([2, 3]) {
            let l: Vec<String> = left.iter().map(|&(g, s)| show(g, s, &names)).collect();
            let r: Vec<String> = right.iter().map(|&(g, s)| show(g, s, &names)).collect();
            let phi = sq
                .morphism_from_pairs([(&l[0], ""), (&l[1], ""), ("", &r[0]), ("", &r[1])])
                .map_err(|e| e.to_string())?;
            let kind = sq.classify(&phi);
            ensure(matches!(kind, ProductType::TypeI { .. }), || format!("{l:?} {r:?} classified {}", kind.label()))?;
            let fix = sq.fix_generators(&phi, &kind, None, None).map_err(|e| e.to_string())?;
            for u in &fix {
                ensure(phi.apply(u).unwrap() == *u, || format!("{u} not fixed"))?;
            }
            sampled += 1;
        }
    }
    let rotation = sq
        .morphism_from_pairs([("b^-1", ""), ("a", ""), ("", "d"), ("", "c^-1")])
        .map_err(|e| e.to_string())?;
    let per = per_equals_fix_of_power_check(&rotation, 3, 4);
    ensure(per.equal(), || format!("rotation: {per:?}"))?;
    Ok(format!("swap and {sampled} factor-preserving signed permutations"))
}

fn periodic_layer() -> Check {
    let g = path3();
    let phi: Morphism = witness_endo(&g, [0, 1, 2]).unwrap();
    let per = per_in_ball(&phi, 4, 4);
    for (u, _) in &per {
        ensure(u.project_pi(0) == u.project_pi(2), || format!("{u} breaks the exponent-sum invariant"))?;
    }
    let m = phi.abelianization_matrix();
    let fixed = fixed_lattice(m).map_err(|e| e.to_string())?;
    let periodic = periodic_lattice(m, 4).map_err(|e| e.to_string())?;
    ensure(fixed == periodic, || format!("fixed {fixed} vs periodic {periodic}"))?;
    Ok(format!("{} periodic points in the radius-4 ball", per.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 classification equivalence", classification_equivalence, Some(Duration::from_secs(10))),
        ("2 witness endomorphism", witness_endomorphism, Some(Duration::from_secs(60))),
        ("3 chain experiment", chain_experiment_path, None),
        ("4 reduction closure", benois_closure_random, None),
        ("5 abelian layer", abelian_layer, None),
        ("6 five-generator automorphism", five_generator_example, Some(Duration::from_secs(300))),
        ("7 product of free groups", square_example, None),
        ("8 periodic layer", periodic_layer, None),
    ];
    let mut failures = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (other, _) => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
