//! Elements of a graph group as canonical reduced traces.
//!
//! A word is reduced when no letter can be cancelled against a later inverse
//! across letters that commute with it. The canonical representative of an
//! element is the lexicographically least word in the commutation class of
//! its reduced form, with letters ordered by generator then sign (`x < x^-1`).

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Gen, GraphGroup};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(gen: Gen) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn neg(gen: Gen) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// Raw sequence of letters over `A ∪ A⁻¹`, possibly unreduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses whitespace-separated `name` / `name^-1` tokens.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, inverse) = match token.split_once('^') {
                None => (token, false),
                Some((name, "-1")) => (name, true),
                Some(_) => return Err(Error::BadToken(token.to_string())),
            };
            if name.is_empty() {
                return Err(Error::BadToken(token.to_string()));
            }
            letters.push(Letter {
                gen: alphabet.lookup(name)?,
                inverse,
            });
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Free reduction (no commutation).
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `x^k` as a word (`k` may be negative).
    pub fn power_of(gen: Gen, k: i64) -> Word {
        let l = if k < 0 { Letter::neg(gen) } else { Letter::pos(gen) };
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay {
            letters: &self.0,
            alphabet,
        }
    }
}

pub struct WordDisplay<'a> {
    letters: &'a [Letter],
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.alphabet.name(l.gen))?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

/// Appends `x` to a reduced word, cancelling it against the nearest earlier
/// `x⁻¹` reachable through letters commuting with `x`.
fn push_reduced(group: &GraphGroup, out: &mut Vec<Letter>, x: Letter) {
    for i in (0..out.len()).rev() {
        let y = out[i];
        if y == x.inv() {
            out.remove(i);
            return;
        }
        if y.gen == x.gen || !group.relation.related(y.gen, x.gen) {
            break;
        }
    }
    out.push(x);
}

/// Lexicographically least word in the commutation class of `word`: emit the
/// least letter among those commuting with everything still before them.
fn canonicalize(group: &GraphGroup, word: &[Letter]) -> Vec<Letter> {
    let mut rest: Vec<Letter> = word.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for k in 0..rest.len() {
            let x = rest[k];
            if let Some(b) = best {
                if rest[b] <= x {
                    continue;
                }
            }
            let available = rest[..k]
                .iter()
                .all(|y| y.gen != x.gen && group.relation.related(y.gen, x.gen));
            if available {
                best = Some(k);
            }
        }
        out.push(rest.remove(best.expect("first letter is always available")));
    }
    out
}

fn reduce_letters(group: &GraphGroup, letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out = Vec::new();
    for l in letters {
        push_reduced(group, &mut out, l);
    }
    out
}

/// Element of a graph group, stored as its canonical word.
#[derive(Clone, Debug)]
pub struct GroupElement {
    group: Arc<GraphGroup>,
    word: Word,
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
            && (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group)
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

impl GroupElement {
    pub fn identity(group: &Arc<GraphGroup>) -> Self {
        GroupElement {
            group: group.clone(),
            word: Word::empty(),
        }
    }

    pub fn generator(group: &Arc<GraphGroup>, g: Gen) -> Self {
        GroupElement {
            group: group.clone(),
            word: Word(vec![Letter::pos(g)]),
        }
    }

    pub fn from_letters(group: &Arc<GraphGroup>, letters: impl IntoIterator<Item = Letter>) -> Self {
        let reduced = reduce_letters(group, letters);
        GroupElement {
            group: group.clone(),
            word: Word(canonicalize(group, &reduced)),
        }
    }

    pub fn parse(group: &Arc<GraphGroup>, text: &str) -> Result<Self> {
        Ok(normal_form(group, &Word::parse(&group.alphabet, text)?))
    }

    pub fn group(&self) -> &Arc<GraphGroup> {
        &self.group
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn letters(&self) -> &[Letter] {
        &self.word.0
    }

    /// Normal-form length; reduced words are geodesic.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    fn check_same(&self, other: &GroupElement) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &GroupElement) -> GroupElement {
        GroupElement::from_letters(
            &self.group,
            self.letters().iter().chain(other.letters()).copied(),
        )
    }

    pub fn invert(&self) -> GroupElement {
        GroupElement {
            word: Word(canonicalize(&self.group, &self.word.inverse().0)),
            group: self.group.clone(),
        }
    }

    /// `k`-th power, `k ∈ ℤ`.
    pub fn pow(&self, k: i64) -> GroupElement {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let letters: Vec<Letter> = (0..k.unsigned_abs())
            .flat_map(|_| base.letters().iter().copied())
            .collect();
        GroupElement::from_letters(&self.group, letters)
    }

    pub fn commutes(&self, other: &GroupElement) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other) == other.mul_unchecked(self))
    }

    /// The homomorphism `π_a`: signed exponent sum of `a`.
    pub fn project_pi(&self, a: Gen) -> i64 {
        self.letters()
            .iter()
            .filter(|l| l.gen == a)
            .map(|l| l.sign())
            .sum()
    }

    /// All exponent sums, indexed by generator (the abelianization image).
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0; self.group.rank()];
        for l in self.letters() {
            v[l.gen] += l.sign();
        }
        v
    }

    /// The retraction onto the free group on an independent subset `a0`:
    /// delete the other letters, then freely reduce.
    pub fn project_psi(&self, a0: &[Gen]) -> Result<Word> {
        check_independent(&self.group, a0)?;
        Ok(project_psi_unchecked(self.letters(), a0))
    }

    pub fn display(&self) -> WordDisplay<'_> {
        self.word.display(&self.group.alphabet)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display().fmt(f)
    }
}

pub(crate) fn project_psi_unchecked(letters: &[Letter], a0: &[Gen]) -> Word {
    Word(letters.iter().copied().filter(|l| a0.contains(&l.gen)).collect()).free_reduce()
}

/// Fails if two distinct members of `a0` commute.
pub fn check_independent(group: &GraphGroup, a0: &[Gen]) -> Result<()> {
    for (i, &x) in a0.iter().enumerate() {
        for &y in &a0[i + 1..] {
            if x != y && group.relation.related(x, y) {
                return Err(Error::NotIndependent(
                    group.name(x).to_string(),
                    group.name(y).to_string(),
                ));
            }
        }
    }
    Ok(())
}

pub fn normal_form(group: &Arc<GraphGroup>, w: &Word) -> GroupElement {
    GroupElement::from_letters(group, w.0.iter().copied())
}

/// Shortlex key: length first, then letters.
pub fn shortlex_key(u: &GroupElement) -> (usize, &[Letter]) {
    (u.len(), u.letters())
}

/// Every element of normal-form length at most `radius`, in shortlex order.
pub fn ball_enumerate(group: &Arc<GraphGroup>, radius: usize) -> Vec<GroupElement> {
    let letters: Vec<Letter> = (0..group.rank())
        .flat_map(|g| [Letter::pos(g), Letter::neg(g)])
        .collect();
    let mut all = vec![GroupElement::identity(group)];
    let mut frontier = vec![Word::empty()];
    for len in 1..=radius {
        let mut seen: HashSet<Word> = HashSet::new();
        for w in &frontier {
            for &x in &letters {
                let mut v = w.0.clone();
                push_reduced(group, &mut v, x);
                if v.len() == len {
                    seen.insert(Word(canonicalize(group, &v)));
                }
            }
        }
        let mut level: Vec<Word> = seen.into_iter().collect();
        level.sort();
        all.extend(level.iter().map(|w| GroupElement {
            group: group.clone(),
            word: w.clone(),
        }));
        frontier = level;
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Arc<GraphGroup> {
        GraphGroup::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    fn nf(g: &Arc<GraphGroup>, s: &str) -> String {
        GroupElement::parse(g, s).unwrap().to_string()
    }

    #[test]
    fn normal_form_examples() {
        let g = path3();
        assert_eq!(nf(&g, "b a"), "a b");
        assert_eq!(nf(&g, "a a^-1"), "");
        assert_eq!(nf(&g, "c b a"), "b c a");
        assert_eq!(nf(&g, "a b a^-1"), "b");
        assert_eq!(nf(&g, "a c a^-1"), "a c a^-1");
    }

    #[test]
    fn multiply_examples() {
        let g = path3();
        let u = GroupElement::parse(&g, "a b").unwrap();
        let v = GroupElement::parse(&g, "b^-1 c").unwrap();
        assert_eq!(u.multiply(&v).unwrap().to_string(), "a c");
        assert!(u.multiply(&u.invert()).unwrap().is_identity());
        let e = GroupElement::identity(&g);
        assert_eq!(e.multiply(&v).unwrap(), v);
    }

    #[test]
    fn alphabet_mismatch() {
        let g = path3();
        let h = GraphGroup::from_names(&["a", "b"], &[]).unwrap();
        let u = GroupElement::generator(&g, 0);
        let v = GroupElement::generator(&h, 0);
        assert_eq!(u.multiply(&v), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn invert_examples() {
        let g = path3();
        assert_eq!(GroupElement::parse(&g, "a b").unwrap().invert().to_string(), "a^-1 b^-1");
        assert!(GroupElement::identity(&g).invert().is_identity());
        assert_eq!(GroupElement::parse(&g, "a c").unwrap().invert().to_string(), "c^-1 a^-1");
    }

    #[test]
    fn commutes_examples() {
        let g = path3();
        let p = |s| GroupElement::parse(&g, s).unwrap();
        assert!(p("a").commutes(&p("b")).unwrap());
        assert!(!p("a").commutes(&p("c")).unwrap());
        assert!(p("a b").commutes(&p("b a")).unwrap());
    }

    #[test]
    fn projections() {
        let g = path3();
        let p = |s| GroupElement::parse(&g, s).unwrap();
        assert_eq!(p("a a c a^-1").project_pi(0), 1);
        assert_eq!(p("a b b^-1 c").project_pi(1), 0);
        assert_eq!(GroupElement::identity(&g).project_pi(0), 0);

        let psi = p("a b c").project_psi(&[0, 2]).unwrap();
        assert_eq!(psi.display(&g.alphabet).to_string(), "a c");
        assert!(GroupElement::identity(&g).project_psi(&[0, 2]).unwrap().is_empty());
        assert!(matches!(p("a").project_psi(&[0, 1]), Err(Error::NotIndependent(_, _))));
    }

    #[test]
    fn psi_on_example_two_graph() {
        let g = GraphGroup::from_names(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("c", "e"), ("b", "e")],
        )
        .unwrap();
        let u = GroupElement::parse(&g, "a b^-1 e b c d c^-1").unwrap();
        let psi = u.project_psi(&[0, 3, 4]).unwrap();
        assert_eq!(psi.display(&g.alphabet).to_string(), "a e d");
    }

    #[test]
    fn ball_examples() {
        let g = path3();
        assert_eq!(ball_enumerate(&g, 0).len(), 1);
        let f2 = GraphGroup::from_names(&["a", "b"], &[]).unwrap();
        assert_eq!(ball_enumerate(&f2, 1).len(), 5);
        let z2 = GraphGroup::from_names(&["a", "b"], &[("a", "b")]).unwrap();
        assert_eq!(ball_enumerate(&z2, 2).len(), 13);
    }

    #[test]
    fn word_parse_errors() {
        let g = path3();
        assert!(matches!(Word::parse(&g.alphabet, "a^2"), Err(Error::BadToken(_))));
        assert!(matches!(Word::parse(&g.alphabet, "^-1"), Err(Error::BadToken(_))));
        assert!(matches!(Word::parse(&g.alphabet, "z"), Err(Error::UnknownGenerator(_))));
        assert!(Word::parse(&g.alphabet, "   ").unwrap().is_empty());
    }
}
