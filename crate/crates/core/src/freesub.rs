//! Free-group machinery: Stallings foldings for finitely generated subgroups
//! and Benois closure for rational subsets.
//!
//! Free words reuse [`Letter`] with generator indices of the ambient
//! alphabet; a free alphabet is a list of those indices.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Gen};
use crate::error::{Error, Result};
use crate::trace::{Letter, Word};

fn symmetric_letters(gens: &[Gen]) -> Vec<Letter> {
    let mut v: Vec<Letter> = gens.iter().flat_map(|&g| [Letter::pos(g), Letter::neg(g)]).collect();
    v.sort();
    v
}

fn check_letters(gens: &[Gen], w: &Word) -> Result<()> {
    match w.letters().iter().find(|l| !gens.contains(&l.gen)) {
        Some(l) => Err(Error::Precondition(format!(
            "letter with generator index {} outside the free alphabet",
            l.gen
        ))),
        None => Ok(()),
    }
}

/// Folded core graph of a finitely generated subgroup; state 0 is the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedGraph {
    gens: Vec<Gen>,
    generators: Vec<Word>,
    states: usize,
    out: Vec<BTreeMap<Gen, usize>>,
    inc: Vec<BTreeMap<Gen, usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so the base stays 0
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Stallings folding of the flower graph on `generators`.
pub fn fold(gens: &[Gen], generators: &[Word]) -> Result<FoldedGraph> {
    let mut gens = gens.to_vec();
    gens.sort_unstable();
    gens.dedup();
    let mut reduced = Vec::with_capacity(generators.len());
    let mut edges: Vec<(usize, Gen, usize)> = Vec::new();
    let mut states = 1;
    for w in generators {
        check_letters(&gens, w)?;
        let w = w.free_reduce();
        if w.is_empty() {
            continue;
        }
        let mut prev = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                states += 1;
                states - 1
            };
            if l.inverse {
                edges.push((next, l.gen, prev));
            } else {
                edges.push((prev, l.gen, next));
            }
            prev = next;
        }
        reduced.push(w);
    }

    let mut uf = UnionFind((0..states).collect());
    loop {
        let mut merged = false;
        let mut by_source: HashMap<(usize, Gen), usize> = HashMap::new();
        let mut by_target: HashMap<(usize, Gen), usize> = HashMap::new();
        for &(p, x, q) in &edges {
            let (p, q) = (uf.find(p), uf.find(q));
            if let Some(&q2) = by_source.get(&(p, x)) {
                merged |= uf.union(q, q2);
            } else {
                by_source.insert((p, x), q);
            }
            let q = uf.find(q);
            let p = uf.find(p);
            if let Some(&p2) = by_target.get(&(q, x)) {
                merged |= uf.union(p, p2);
            } else {
                by_target.insert((q, x), p);
            }
        }
        if !merged {
            break;
        }
    }
    let mut folded: BTreeSet<(usize, Gen, usize)> = BTreeSet::new();
    for &(p, x, q) in &edges {
        folded.insert((uf.find(p), x, uf.find(q)));
    }

    // prune hanging trees, keeping the base
    loop {
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for &(p, _, q) in &folded {
            *degree.entry(p).or_default() += 1;
            *degree.entry(q).or_default() += 1;
        }
        let leaves: BTreeSet<usize> = degree
            .iter()
            .filter(|&(&v, &d)| v != 0 && d <= 1)
            .map(|(&v, _)| v)
            .collect();
        if leaves.is_empty() {
            break;
        }
        folded.retain(|(p, _, q)| !leaves.contains(p) && !leaves.contains(q));
    }

    Ok(renumber(gens, reduced, &folded))
}

/// Canonical numbering by breadth-first search from the base, visiting
/// outgoing then incoming edges in generator order.
fn renumber(gens: Vec<Gen>, generators: Vec<Word>, edges: &BTreeSet<(usize, Gen, usize)>) -> FoldedGraph {
    let mut out_raw: HashMap<usize, BTreeMap<Gen, usize>> = HashMap::new();
    let mut inc_raw: HashMap<usize, BTreeMap<Gen, usize>> = HashMap::new();
    for &(p, x, q) in edges {
        out_raw.entry(p).or_default().insert(x, q);
        inc_raw.entry(q).or_default().insert(x, p);
    }
    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![0];
    number.insert(0, 0);
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        let neighbours = out_raw
            .get(&v)
            .into_iter()
            .flat_map(|m| m.values())
            .chain(inc_raw.get(&v).into_iter().flat_map(|m| m.values()));
        for &w in neighbours {
            if let std::collections::hash_map::Entry::Vacant(slot) = number.entry(w) {
                slot.insert(order.len());
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let states = order.len();
    let mut out = vec![BTreeMap::new(); states];
    let mut inc = vec![BTreeMap::new(); states];
    for &(p, x, q) in edges {
        let (p, q) = (number[&p], number[&q]);
        out[p].insert(x, q);
        inc[q].insert(x, p);
    }
    FoldedGraph {
        gens,
        generators,
        states,
        out,
        inc,
    }
}

impl FoldedGraph {
    pub fn states(&self) -> usize {
        self.states
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum()
    }

    pub fn free_alphabet(&self) -> &[Gen] {
        &self.gens
    }

    /// The (freely reduced, non-trivial) generators the graph was folded from.
    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// `(source, generator, target)` triples in canonical numbering; equal
    /// signatures mean isomorphic based graphs.
    pub fn signature(&self) -> Vec<(usize, Gen, usize)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(p, m)| m.iter().map(move |(&x, &q)| (p, x, q)))
            .collect()
    }

    fn step(&self, state: usize, l: Letter) -> Option<usize> {
        if l.inverse {
            self.inc[state].get(&l.gen).copied()
        } else {
            self.out[state].get(&l.gen).copied()
        }
    }

    /// True iff the free reduction of `w` labels a closed path at the base.
    pub fn member(&self, w: &Word) -> bool {
        let mut state = 0;
        for &l in w.free_reduce().letters() {
            match self.step(state, l) {
                Some(next) => state = next,
                None => return false,
            }
        }
        state == 0
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = String::from("digraph folded {\n  rankdir=LR;\n  0 [shape=doublecircle];\n");
        for (p, x, q) in self.signature() {
            let _ = writeln!(s, "  {p} -> {q} [label=\"{}\"];", alphabet.name(x));
        }
        s.push_str("}\n");
        s
    }
}

/// Nondeterministic automaton over `Ã = A ∪ A⁻¹` with ε-moves (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    gens: Vec<Gen>,
    states: usize,
    transitions: BTreeSet<(usize, Option<Letter>, usize)>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

impl Nfa {
    pub fn new(gens: &[Gen]) -> Self {
        let mut gens = gens.to_vec();
        gens.sort_unstable();
        gens.dedup();
        Nfa {
            gens,
            states: 0,
            transitions: BTreeSet::new(),
            initial: BTreeSet::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    pub fn add_states(&mut self, k: usize) -> std::ops::Range<usize> {
        let start = self.states;
        self.states += k;
        start..self.states
    }

    pub fn add_transition(&mut self, from: usize, label: Option<Letter>, to: usize) {
        assert!(from < self.states && to < self.states, "state out of range");
        if let Some(l) = label {
            assert!(self.gens.contains(&l.gen), "letter outside the free alphabet");
        }
        self.transitions.insert((from, label, to));
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial.insert(s);
    }

    pub fn set_final(&mut self, s: usize) {
        self.finals.insert(s);
    }

    pub fn free_alphabet(&self) -> &[Gen] {
        &self.gens
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn transitions(&self) -> impl Iterator<Item = &(usize, Option<Letter>, usize)> {
        self.transitions.iter()
    }

    pub fn initial_states(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn final_states(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    /// Accepts exactly the single word `w`.
    pub fn from_word(gens: &[Gen], w: &Word) -> Self {
        let mut nfa = Nfa::new(gens);
        let mut cur = nfa.add_state();
        nfa.set_initial(cur);
        for &l in w.letters() {
            let next = nfa.add_state();
            nfa.add_transition(cur, Some(l), next);
            cur = next;
        }
        nfa.set_final(cur);
        nfa
    }

    /// `x₁* x₂* ⋯ x_k*` over positive letters.
    pub fn monomial_star(gens: &[Gen], order: &[Gen]) -> Self {
        let mut nfa = Nfa::new(gens);
        let states: Vec<usize> = nfa.add_states(order.len().max(1)).collect();
        nfa.set_initial(states[0]);
        for (i, &x) in order.iter().enumerate() {
            nfa.add_transition(states[i], Some(Letter::pos(x)), states[i]);
            if i + 1 < order.len() {
                nfa.add_transition(states[i], None, states[i + 1]);
            }
        }
        nfa.set_final(*states.last().unwrap());
        nfa
    }

    pub fn epsilon_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut closure = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for &(_, _, q) in self.transitions.range((p, None, 0)..=(p, None, usize::MAX)) {
                if closure.insert(q) {
                    stack.push(q);
                }
            }
        }
        closure
    }

    fn letter_step(&self, set: &BTreeSet<usize>, l: Letter) -> BTreeSet<usize> {
        let mut next = BTreeSet::new();
        for &p in set {
            for &(_, _, q) in self.transitions.range((p, Some(l), 0)..=(p, Some(l), usize::MAX)) {
                next.insert(q);
            }
        }
        self.epsilon_closure(&next)
    }

    fn start_set(&self) -> BTreeSet<usize> {
        self.epsilon_closure(&self.initial)
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut cur = self.start_set();
        for &l in w.letters() {
            if cur.is_empty() {
                return false;
            }
            cur = self.letter_step(&cur, l);
        }
        cur.iter().any(|s| self.finals.contains(s))
    }

    /// All accepted words of length at most `max_len`, in shortlex order.
    pub fn enumerate_accepted(&self, max_len: usize) -> Vec<Word> {
        let letters = symmetric_letters(&self.gens);
        let mut found = Vec::new();
        let mut layer = vec![(Vec::new(), self.start_set())];
        for len in 0..=max_len {
            for (w, set) in &layer {
                if set.iter().any(|s| self.finals.contains(s)) {
                    found.push(Word(w.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, set) in &layer {
                for &l in &letters {
                    let s = self.letter_step(set, l);
                    if !s.is_empty() {
                        let mut v = w.clone();
                        v.push(l);
                        next.push((v, s));
                    }
                }
            }
            layer = next;
        }
        found
    }

    /// Whether every `p →x→ · →ε*→ · →x⁻¹→ s` has a direct ε-move `p → s`.
    pub fn is_saturated(&self) -> bool {
        self.saturation_candidates().is_empty()
    }

    fn saturation_candidates(&self) -> Vec<(usize, usize)> {
        let mut missing = Vec::new();
        let mut closures: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for &(p, label, p2) in &self.transitions {
            let Some(x) = label else { continue };
            let reach = closures
                .entry(p2)
                .or_insert_with(|| self.epsilon_closure(&BTreeSet::from([p2])))
                .clone();
            for q2 in reach {
                let inv = Some(x.inv());
                for &(_, _, q) in self.transitions.range((q2, inv, 0)..=(q2, inv, usize::MAX)) {
                    if !self.transitions.contains(&(p, None, q)) {
                        missing.push((p, q));
                    }
                }
            }
        }
        missing
    }

    /// Adds cancellation ε-moves until none is missing.
    pub fn saturate(&self) -> Nfa {
        let mut nfa = self.clone();
        loop {
            let missing = nfa.saturation_candidates();
            if missing.is_empty() {
                return nfa;
            }
            for (p, q) in missing {
                nfa.transitions.insert((p, None, q));
            }
        }
    }

    /// Product automaton; ε-moves advance one side at a time.
    pub fn intersect(&self, other: &Nfa) -> Result<Nfa> {
        if self.gens != other.gens {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = Nfa::new(&self.gens);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |out: &mut Nfa, queue: &mut VecDeque<(usize, usize)>, pair: (usize, usize)| {
            *index.entry(pair).or_insert_with(|| {
                queue.push_back(pair);
                out.add_state()
            })
        };
        for &p in &self.initial {
            for &q in &other.initial {
                let s = intern(&mut out, &mut queue, (p, q));
                out.set_initial(s);
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let here = intern(&mut out, &mut queue, (p, q));
            if self.finals.contains(&p) && other.finals.contains(&q) {
                out.set_final(here);
            }
            for &(_, label, p2) in self.transitions.range((p, None, 0)..(p + 1, None, 0)) {
                match label {
                    None => {
                        let t = intern(&mut out, &mut queue, (p2, q));
                        out.transitions.insert((here, None, t));
                    }
                    Some(l) => {
                        for &(_, _, q2) in other.transitions.range((q, Some(l), 0)..=(q, Some(l), usize::MAX)) {
                            let t = intern(&mut out, &mut queue, (p2, q2));
                            out.transitions.insert((here, Some(l), t));
                        }
                    }
                }
            }
            for &(_, _, q2) in other.transitions.range((q, None, 0)..=(q, None, usize::MAX)) {
                let t = intern(&mut out, &mut queue, (p, q2));
                out.transitions.insert((here, None, t));
            }
        }
        Ok(out)
    }

    /// Disjoint union.
    pub fn union(&self, other: &Nfa) -> Result<Nfa> {
        if self.gens != other.gens {
            return Err(Error::AlphabetMismatch);
        }
        let mut out = self.clone();
        let shift = out.states;
        out.states += other.states;
        for &(p, l, q) in &other.transitions {
            out.transitions.insert((p + shift, l, q + shift));
        }
        out.initial.extend(other.initial.iter().map(|s| s + shift));
        out.finals.extend(other.finals.iter().map(|s| s + shift));
        Ok(out)
    }

    /// Complete deterministic automaton for the complement within `Ã*`.
    fn complement_in_free_monoid(&self) -> Nfa {
        let letters = symmetric_letters(&self.gens);
        let mut out = Nfa::new(&self.gens);
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let start = self.start_set();
        index.insert(start.clone(), out.add_state());
        out.set_initial(0);
        queue.push_back(start);
        while let Some(set) = queue.pop_front() {
            let here = index[&set];
            if !set.iter().any(|s| self.finals.contains(s)) {
                out.set_final(here);
            }
            for &l in &letters {
                let next = self.letter_step(&set, l);
                let t = match index.get(&next) {
                    Some(&t) => t,
                    None => {
                        let t = out.add_state();
                        index.insert(next.clone(), t);
                        queue.push_back(next);
                        t
                    }
                };
                out.transitions.insert((here, Some(l), t));
            }
        }
        out
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = String::from("digraph nfa {\n  rankdir=LR;\n");
        for st in 0..self.states {
            let shape = if self.finals.contains(&st) { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {st} [shape={shape}];");
        }
        for (i, st) in self.initial.iter().enumerate() {
            let _ = writeln!(s, "  init{i} [shape=point];\n  init{i} -> {st};");
        }
        for &(p, l, q) in &self.transitions {
            let label = match l {
                None => "ε".to_string(),
                Some(l) => Word(vec![l]).display(alphabet).to_string(),
            };
            let _ = writeln!(s, "  {p} -> {q} [label=\"{label}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// The `2|A|+1`-state automaton of reduced words: state `0` is the start,
/// the others remember the last letter and forbid its inverse next.
pub fn reduced_words_automaton(gens: &[Gen]) -> Nfa {
    let mut nfa = Nfa::new(gens);
    let letters = symmetric_letters(&nfa.gens);
    let start = nfa.add_state();
    let last: Vec<usize> = nfa.add_states(letters.len()).collect();
    nfa.set_initial(start);
    nfa.set_final(start);
    for &s in &last {
        nfa.set_final(s);
    }
    for (j, &y) in letters.iter().enumerate() {
        nfa.add_transition(start, Some(y), last[j]);
        for (i, &x) in letters.iter().enumerate() {
            if y != x.inv() {
                nfa.add_transition(last[i], Some(y), last[j]);
            }
        }
    }
    nfa
}

/// Automaton whose language is a set of reduced words: a rational subset of
/// the free group identified with its reduced representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionAutomaton {
    nfa: Nfa,
}

impl ReductionAutomaton {
    pub fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.nfa.accepts(w)
    }

    pub fn enumerate_accepted(&self, max_len: usize) -> Vec<Word> {
        self.nfa.enumerate_accepted(max_len)
    }

    pub fn empty(gens: &[Gen]) -> Self {
        ReductionAutomaton { nfa: Nfa::new(gens) }
    }

    pub fn union(&self, other: &ReductionAutomaton) -> Result<Self> {
        Ok(ReductionAutomaton {
            nfa: self.nfa.union(&other.nfa)?,
        })
    }

    pub fn intersection(&self, other: &ReductionAutomaton) -> Result<Self> {
        Ok(ReductionAutomaton {
            nfa: self.nfa.intersect(&other.nfa)?,
        })
    }

    /// Complement inside the reduced words `R_A`.
    pub fn complement(&self) -> Self {
        let comp = self.nfa.complement_in_free_monoid();
        ReductionAutomaton {
            nfa: comp
                .intersect(&reduced_words_automaton(&self.nfa.gens))
                .expect("same alphabet"),
        }
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        self.nfa.to_dot(alphabet)
    }
}

/// Accepts exactly the free reductions of the words accepted by `input`.
pub fn benois_closure(input: &Nfa) -> ReductionAutomaton {
    let saturated = input.saturate();
    let reduced = reduced_words_automaton(&input.gens);
    ReductionAutomaton {
        nfa: saturated.intersect(&reduced).expect("same alphabet"),
    }
}

/// Reduced words of the subgroup: Benois closure of the flower automaton
/// built on the generators and their inverses.
pub fn subgroup_language(graph: &FoldedGraph) -> ReductionAutomaton {
    let mut flower = Nfa::new(&graph.gens);
    let base = flower.add_state();
    flower.set_initial(base);
    flower.set_final(base);
    for w in &graph.generators {
        for petal in [w.clone(), w.inverse()] {
            let mut cur = base;
            for (i, &l) in petal.letters().iter().enumerate() {
                let next = if i + 1 == petal.len() { base } else { flower.add_state() };
                flower.add_transition(cur, Some(l), next);
                cur = next;
            }
        }
    }
    benois_closure(&flower)
}
