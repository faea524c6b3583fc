//! Classification verdicts and desk-scale evidence about fixed and periodic
//! points: ball scans, projection invariants, the ascending chain of folded
//! subgroups, and the analysis of automorphisms of `F₂ × F₂`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Classification, Gen, GraphGroup};
use crate::error::{Error, Result};
use crate::freesub::{self, FoldedGraph, Nfa};
use crate::morphism::{witness_auto, witness_endo, Morphism};
use crate::trace::{ball_enumerate, check_independent, GroupElement, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Endomorphisms,
    Automorphisms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    AllFinitelyGenerated,
    NotAllFinitelyGenerated,
    OutsideTheoremScope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub scope: Scope,
    pub answer: Answer,
    pub classification: Classification,
    pub witness: Option<Morphism>,
}

/// Endomorphisms: every fixed subgroup is finitely generated iff the graph
/// is a disjoint union of cliques. Automorphisms: the same holds on
/// transitive forests; elsewhere the answer depends on the graph.
pub fn classify_group(group: &Arc<GraphGroup>, scope: Scope) -> Verdict {
    let classification = group.relation.classify();
    let (answer, witness) = match (scope, classification.witness_triple) {
        (_, None) => (Answer::AllFinitelyGenerated, None),
        (Scope::Endomorphisms, Some(t)) => (
            Answer::NotAllFinitelyGenerated,
            Some(witness_endo(group, t).expect("triple from the classifier")),
        ),
        (Scope::Automorphisms, Some(_)) if !classification.is_transitive_forest => {
            (Answer::OutsideTheoremScope, None)
        }
        (Scope::Automorphisms, Some(t)) => (
            Answer::NotAllFinitelyGenerated,
            Some(witness_auto(group, t).expect("transitive forest with a valid triple")),
        ),
    };
    Verdict {
        scope,
        answer,
        classification,
        witness,
    }
}

/// Ball elements fixed by `phi`, in shortlex order.
pub fn fix_in_ball(phi: &Morphism, radius: usize) -> Vec<GroupElement> {
    let ball = ball_enumerate(phi.group(), radius);
    ball.into_par_iter()
        .filter(|u| phi.apply_unchecked(u.letters()) == *u)
        .collect()
}

/// Ball elements with their least period `k ≤ kmax`, in shortlex order.
pub fn per_in_ball(phi: &Morphism, radius: usize, kmax: usize) -> Vec<(GroupElement, usize)> {
    let powers: Vec<Morphism> = (1..=kmax).map(|k| phi.power(k)).collect();
    let ball = ball_enumerate(phi.group(), radius);
    ball.into_par_iter()
        .filter_map(|u| {
            powers
                .iter()
                .position(|p| p.apply_unchecked(u.letters()) == u)
                .map(|k| (u, k + 1))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantViolation {
    pub element: String,
    pub exponents: Vec<i64>,
}

/// Checks that every fixed point in a ball has equal exponent sums on the
/// given generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub generators: Vec<String>,
    pub radius: usize,
    pub fixed_points: usize,
    pub violations: Vec<InvariantViolation>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn projection_invariant_check(phi: &Morphism, gens: &[Gen], radius: usize) -> Result<InvariantReport> {
    let group = phi.group();
    if gens.len() < 2 {
        return Err(Error::Precondition("need at least two generators to compare".into()));
    }
    if let Some(&g) = gens.iter().find(|&&g| g >= group.rank()) {
        return Err(Error::Precondition(format!("generator index {g} out of range")));
    }
    let fixed = fix_in_ball(phi, radius);
    let violations = fixed
        .iter()
        .filter_map(|u| {
            let exps: Vec<i64> = gens.iter().map(|&g| u.project_pi(g)).collect();
            (exps.iter().any(|&e| e != exps[0])).then(|| InvariantViolation {
                element: u.to_string(),
                exponents: exps,
            })
        })
        .collect();
    Ok(InvariantReport {
        generators: gens.iter().map(|&g| group.name(g).to_string()).collect(),
        radius,
        fixed_points: fixed.len(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub level: usize,
    pub generators: usize,
    pub states: usize,
    pub probe: String,
    pub probe_member: bool,
    /// Reduced words of `H_n ∩ x₁*⋯x_k*` up to the probe length.
    pub monomials: Vec<String>,
}

/// Ascending chain `H_1 ⊆ H_2 ⊆ …` of folded subgroups of the free group on
/// an independent tuple, each generated by projections of verified fixed
/// points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub tuple: Vec<String>,
    pub levels: Vec<ChainLevel>,
    /// Every level-`n` generator is a member at level `n+1`.
    pub monotone: bool,
    /// First level from which every probe is a member.
    pub stabilized_at: Option<usize>,
}

impl ChainReport {
    pub fn stabilized(&self) -> bool {
        self.stabilized_at.is_some()
    }

    /// No probe ever lands in its level: each inclusion `H_n ⊂ H_{n+1}` is
    /// strict.
    pub fn strictly_ascending(&self) -> bool {
        self.levels.iter().all(|l| !l.probe_member)
    }
}

fn monomial(tuple: &[Gen], exps: &[usize]) -> Word {
    Word(
        tuple
            .iter()
            .zip(exps)
            .flat_map(|(&g, &e)| std::iter::repeat_n(Letter::pos(g), e))
            .collect(),
    )
}

/// For `n = 1..=levels`, folds the projections of the fixed monomials
/// `x₁^{i₁}⋯x_k^{i_k}` with `0 ≤ i_j ≤ n` and probes the diagonal
/// `x₁^{n+1}⋯x_k^{n+1}`. Requires the diagonal monomials up to exponent
/// `levels + 1` to be fixed, so every probe lies in the projected fixed
/// subgroup.
pub fn chain_experiment(phi: &Morphism, tuple: &[Gen], levels: usize) -> Result<ChainReport> {
    let group = phi.group();
    if tuple.len() < 2 {
        return Err(Error::Precondition("the tuple needs at least two generators".into()));
    }
    if let Some(&g) = tuple.iter().find(|&&g| g >= group.rank()) {
        return Err(Error::Precondition(format!("generator index {g} out of range")));
    }
    check_independent(group, tuple)?;
    let k = tuple.len();
    for i in 1..=levels + 1 {
        let diag = GroupElement::from_letters(group, monomial(tuple, &vec![i; k]).0);
        if phi.apply_unchecked(diag.letters()) != diag {
            return Err(Error::Precondition(format!(
                "diagonal element {diag} is not fixed (image {})",
                phi.apply_unchecked(diag.letters())
            )));
        }
    }

    let stars = freesub::benois_closure(&Nfa::monomial_star(tuple, tuple));
    let mut graphs: Vec<FoldedGraph> = Vec::with_capacity(levels);
    let mut records = Vec::with_capacity(levels);
    for n in 1..=levels {
        let mut gens = Vec::new();
        let base = n + 1;
        for code in 1..base.pow(k as u32) {
            let exps: Vec<usize> = (0..k).rev().map(|j| code / base.pow(j as u32) % base).collect();
            let u = GroupElement::from_letters(group, monomial(tuple, &exps).0);
            if phi.apply_unchecked(u.letters()) == u {
                gens.push(u.project_psi(tuple)?);
            }
        }
        let graph = freesub::fold(tuple, &gens)?;
        let probe = monomial(tuple, &vec![n + 1; k]);
        let lang = freesub::subgroup_language(&graph).intersection(&stars)?;
        let monomials = lang
            .enumerate_accepted(k * (n + 1))
            .iter()
            .map(|w| w.display(&group.alphabet).to_string())
            .collect();
        records.push(ChainLevel {
            level: n,
            generators: gens.len(),
            states: graph.states(),
            probe: probe.display(&group.alphabet).to_string(),
            probe_member: graph.member(&probe),
            monomials,
        });
        graphs.push(graph);
    }
    let monotone = graphs
        .windows(2)
        .all(|pair| pair[0].generators().iter().all(|g| pair[1].member(g)));
    let stabilized_at = match records.iter().rposition(|l| !l.probe_member) {
        None => records.first().map(|l| l.level),
        Some(last_miss) => records.get(last_miss + 1).map(|l| l.level),
    };
    Ok(ChainReport {
        tuple: tuple.iter().map(|&g| group.name(g).to_string()).collect(),
        levels: records,
        monotone,
        stabilized_at,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerPowerReport {
    pub radius: usize,
    pub kmax: usize,
    pub kmax_square: usize,
    pub periodic: usize,
    pub periodic_of_square: usize,
    pub only_for_phi: Vec<String>,
    pub only_for_square: Vec<String>,
}

impl PerPowerReport {
    pub fn equal(&self) -> bool {
        self.only_for_phi.is_empty() && self.only_for_square.is_empty()
    }
}

/// Compares periodic points of `φ` (periods up to `kmax`) with those of `φ²`
/// (periods up to `⌈kmax/2⌉`) on a ball.
pub fn per_equals_fix_of_power_check(phi: &Morphism, radius: usize, kmax: usize) -> PerPowerReport {
    let kmax_square = kmax.div_ceil(2);
    let collect = |m: &Morphism, k: usize| -> BTreeMap<(usize, Vec<Letter>), String> {
        per_in_ball(m, radius, k)
            .into_iter()
            .map(|(u, _)| ((u.len(), u.letters().to_vec()), u.to_string()))
            .collect()
    };
    let per = collect(phi, kmax);
    let per_sq = collect(&phi.power(2), kmax_square);
    let only = |a: &BTreeMap<_, String>, b: &BTreeMap<_, String>| -> Vec<String> {
        a.iter().filter(|(k, _)| !b.contains_key(*k)).map(|(_, v)| v.clone()).collect()
    };
    PerPowerReport {
        radius,
        kmax,
        kmax_square,
        periodic: per.len(),
        periodic_of_square: per_sq.len(),
        only_for_phi: only(&per, &per_sq),
        only_for_square: only(&per_sq, &per),
    }
}

/// Endomorphism of a free factor, given by images of its two generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeEndo {
    images: BTreeMap<Gen, Word>,
}

impl FreeEndo {
    pub fn new(images: BTreeMap<Gen, Word>) -> Self {
        FreeEndo { images }
    }

    pub fn image(&self, g: Gen) -> &Word {
        &self.images[&g]
    }

    pub fn apply(&self, w: &Word) -> Word {
        let letters: Vec<Letter> = w
            .letters()
            .iter()
            .flat_map(|l| {
                let img = &self.images[&l.gen];
                if l.inverse {
                    img.inverse().0
                } else {
                    img.0.clone()
                }
            })
            .collect();
        Word(letters).free_reduce()
    }

    /// `self` then `other`.
    pub fn then(&self, other: &FreeEndo) -> FreeEndo {
        FreeEndo {
            images: self.images.iter().map(|(&g, w)| (g, other.apply(w))).collect(),
        }
    }

    /// Each generator goes to a single letter and the generators are
    /// permuted.
    pub fn is_signed_permutation(&self) -> bool {
        let targets: BTreeSet<Gen> = self
            .images
            .values()
            .filter_map(|w| match w.letters() {
                [l] => Some(l.gen),
                _ => None,
            })
            .collect();
        targets.len() == self.images.len() && targets.iter().all(|g| self.images.contains_key(g))
    }

    /// For a signed permutation, reduced words map letter by letter to
    /// reduced words, so the fixed words are exactly those spelled with
    /// letters in singleton positive orbits.
    pub fn signed_permutation_fix(&self) -> Option<Vec<Word>> {
        self.is_signed_permutation().then(|| {
            self.images
                .iter()
                .filter(|(&g, w)| w.letters() == [Letter::pos(g)])
                .map(|(&g, _)| Word(vec![Letter::pos(g)]))
                .collect()
        })
    }
}

/// `F_{x₁,x₂} × F_{y₁,y₂}` realized as the graph group of a 4-cycle, with
/// the isomorphism `ψ: xᵢ ↦ yᵢ` between the factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareProduct {
    group: Arc<GraphGroup>,
    left: [Gen; 2],
    right: [Gen; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductType {
    /// `(u, v) ↦ (uφ₁, vφ₂)`.
    TypeI { phi1: FreeEndo, phi2: FreeEndo },
    /// `(u, v) ↦ (vφ₂ψ⁻¹, uφ₁ψ)`.
    TypeII { phi1: FreeEndo, phi2: FreeEndo },
    NotRecognized(String),
}

impl ProductType {
    pub fn label(&self) -> &'static str {
        match self {
            ProductType::TypeI { .. } => "TypeI",
            ProductType::TypeII { .. } => "TypeII",
            ProductType::NotRecognized(_) => "NotRecognized",
        }
    }
}

impl SquareProduct {
    /// Generators `a, b, c, d` with `F_{a,b} × F_{c,d}`, `ψ: a ↦ c, b ↦ d`.
    pub fn standard() -> Self {
        let group = GraphGroup::from_names(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        )
        .expect("static graph");
        SquareProduct {
            group,
            left: [0, 1],
            right: [2, 3],
        }
    }

    pub fn new(group: &Arc<GraphGroup>, left: [Gen; 2], right: [Gen; 2]) -> Result<Self> {
        let rel = &group.relation;
        let mut all = vec![left[0], left[1], right[0], right[1]];
        all.sort_unstable();
        all.dedup();
        if group.rank() != 4 || all.len() != 4 || all[3] >= 4 {
            return Err(Error::Precondition("need four distinct generators".into()));
        }
        let shape = !rel.related(left[0], left[1])
            && !rel.related(right[0], right[1])
            && left.iter().all(|&x| right.iter().all(|&y| rel.related(x, y)));
        if !shape {
            return Err(Error::Precondition("graph is not the square of F2 x F2".into()));
        }
        Ok(SquareProduct {
            group: group.clone(),
            left,
            right,
        })
    }

    pub fn group(&self) -> &Arc<GraphGroup> {
        &self.group
    }

    pub fn left(&self) -> [Gen; 2] {
        self.left
    }

    pub fn right(&self) -> [Gen; 2] {
        self.right
    }

    /// The two coordinates of an element.
    pub fn split(&self, u: &GroupElement) -> (Word, Word) {
        (
            u.project_psi(&self.left).expect("independent"),
            u.project_psi(&self.right).expect("independent"),
        )
    }

    pub fn pair(&self, u: &Word, v: &Word) -> GroupElement {
        GroupElement::from_letters(&self.group, u.letters().iter().chain(v.letters()).copied())
    }

    fn rename(w: &Word, from: [Gen; 2], to: [Gen; 2]) -> Word {
        Word(
            w.letters()
                .iter()
                .map(|l| Letter {
                    gen: if l.gen == from[0] { to[0] } else { to[1] },
                    inverse: l.inverse,
                })
                .collect(),
        )
    }

    /// `ψ`: left factor to right factor.
    pub fn psi(&self, w: &Word) -> Word {
        Self::rename(w, self.left, self.right)
    }

    pub fn psi_inv(&self, w: &Word) -> Word {
        Self::rename(w, self.right, self.left)
    }

    /// Morphism from coordinate pairs `(left word, right word)` for the
    /// generators in `left[0], left[1], right[0], right[1]` order.
    pub fn morphism_from_pairs(&self, pairs: [(&str, &str); 4]) -> Result<Morphism> {
        let order = [self.left[0], self.left[1], self.right[0], self.right[1]];
        let mut images = vec![GroupElement::identity(&self.group); 4];
        for (&g, (u, v)) in order.iter().zip(pairs) {
            let u = Word::parse(&self.group.alphabet, u)?;
            let v = Word::parse(&self.group.alphabet, v)?;
            if u.letters().iter().any(|l| !self.left.contains(&l.gen))
                || v.letters().iter().any(|l| !self.right.contains(&l.gen))
            {
                return Err(Error::Precondition(format!(
                    "image of {} has a coordinate outside its factor",
                    self.group.name(g)
                )));
            }
            images[g] = self.pair(&u, &v);
        }
        Morphism::new(&self.group, images)
    }

    /// Recognizes factor-preserving (type I) and factor-swapping (type II)
    /// automorphism shapes.
    pub fn classify(&self, phi: &Morphism) -> ProductType {
        let coords: Vec<(Word, Word)> = (0..4).map(|g| self.split(phi.image(g))).collect();
        let in_left = |g: Gen| !coords[g].0.is_empty() && coords[g].1.is_empty();
        let in_right = |g: Gen| coords[g].0.is_empty() && !coords[g].1.is_empty();
        let name = |g: Gen| self.group.name(g).to_string();
        let [x1, x2] = self.left;
        let [y1, y2] = self.right;

        let swaps = if self.left.iter().all(|&g| in_left(g)) && self.right.iter().all(|&g| in_right(g)) {
            false
        } else if self.left.iter().all(|&g| in_right(g)) && self.right.iter().all(|&g| in_left(g)) {
            true
        } else {
            let bad = (0..4)
                .find(|&g| !(in_left(g) || in_right(g)))
                .or_else(|| (0..4).find(|&g| in_left(g) != in_left(x1) || self.right.contains(&g) && in_left(g) == in_left(x1)))
                .unwrap_or(x1);
            let (u, v) = &coords[bad];
            return ProductType::NotRecognized(format!(
                "image of {} has coordinates ({}, {}); an automorphism must map each factor into a single factor",
                name(bad),
                u.display(&self.group.alphabet),
                v.display(&self.group.alphabet)
            ));
        };
        for (p, q) in [(x1, x2), (y1, y2)] {
            if phi.image(p).commutes(phi.image(q)).unwrap_or(true) {
                return ProductType::NotRecognized(format!(
                    "images of {} and {} commute, so the map is not injective",
                    name(p),
                    name(q)
                ));
            }
        }
        if !swaps {
            let phi1 = FreeEndo::new(self.left.iter().map(|&g| (g, coords[g].0.clone())).collect());
            let phi2 = FreeEndo::new(self.right.iter().map(|&g| (g, coords[g].1.clone())).collect());
            ProductType::TypeI { phi1, phi2 }
        } else {
            let phi1 = FreeEndo::new(self.left.iter().map(|&g| (g, self.psi_inv(&coords[g].1))).collect());
            let phi2 = FreeEndo::new(self.right.iter().map(|&g| (g, self.psi(&coords[g].0))).collect());
            ProductType::TypeII { phi1, phi2 }
        }
    }

    fn psi_endo(&self) -> FreeEndo {
        FreeEndo::new(self.left.iter().zip(self.right).map(|(&x, y)| (x, Word(vec![Letter::pos(y)]))).collect())
    }

    fn psi_inv_endo(&self) -> FreeEndo {
        FreeEndo::new(self.right.iter().zip(self.left).map(|(&y, x)| (y, Word(vec![Letter::pos(x)]))).collect())
    }

    /// Generators of `Fix φ` for a recognized automorphism.
    ///
    /// Type I: `first` and `second` generate `Fix φ₁` and `Fix φ₂`; type II:
    /// `first` generates `K = Fix φ₁ψφ₂ψ⁻¹` and `second` is unused. A `None`
    /// is filled in only when the relevant free endomorphism is a signed
    /// permutation of the letters. Supplied generators are checked, and
    /// every output generator is verified fixed by `φ`.
    pub fn fix_generators(
        &self,
        phi: &Morphism,
        kind: &ProductType,
        first: Option<&[Word]>,
        second: Option<&[Word]>,
    ) -> Result<Vec<GroupElement>> {
        let resolve = |endo: &FreeEndo, given: Option<&[Word]>, what: &str| -> Result<Vec<Word>> {
            let gens = match given {
                Some(g) => g.to_vec(),
                None => endo.signed_permutation_fix().ok_or_else(|| {
                    Error::Precondition(format!(
                        "generators of {what} must be supplied: not a signed permutation"
                    ))
                })?,
            };
            for z in &gens {
                if endo.apply(z) != z.free_reduce() {
                    return Err(Error::Precondition(format!(
                        "{} is not fixed by {what}",
                        z.display(&self.group.alphabet)
                    )));
                }
            }
            Ok(gens)
        };
        let out: Vec<GroupElement> = match kind {
            ProductType::TypeI { phi1, phi2 } => {
                let left = resolve(phi1, first, "phi1")?;
                let right = resolve(phi2, second, "phi2")?;
                let empty = Word::empty();
                left.iter()
                    .map(|z| self.pair(z, &empty))
                    .chain(right.iter().map(|z| self.pair(&empty, z)))
                    .collect()
            }
            ProductType::TypeII { phi1, phi2 } => {
                let phi1_psi = phi1.then(&self.psi_endo());
                let theta = phi1_psi.then(phi2).then(&self.psi_inv_endo());
                let k = resolve(&theta, first, "K")?;
                k.iter().map(|z| self.pair(z, &phi1_psi.apply(z))).collect()
            }
            ProductType::NotRecognized(why) => {
                return Err(Error::Precondition(format!("automorphism not recognized: {why}")))
            }
        };
        for u in &out {
            if phi.apply(u)? != *u {
                return Err(Error::Precondition(format!("generator {u} is not fixed")));
            }
        }
        Ok(out)
    }
}
