//! Endomorphisms of graph groups given by generator images.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::abelian::IntMatrix;
use crate::alphabet::{Gen, GraphGroup};
use crate::error::{Error, Result};
use crate::trace::{GroupElement, Letter, Word};

/// Default preimage search depth for [`Morphism::certify_automorphism`].
pub const DEFAULT_SEARCH_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    group: Arc<GraphGroup>,
    images: Vec<GroupElement>,
    inverse_images: Vec<GroupElement>,
    abelianization: IntMatrix,
}

impl Morphism {
    /// Checks that commuting generators have commuting images.
    pub fn new(group: &Arc<GraphGroup>, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != group.rank() {
            return Err(Error::DimensionMismatch {
                expected: group.rank(),
                found: images.len(),
            });
        }
        for img in &images {
            if !Arc::ptr_eq(img.group(), group) && **img.group() != **group {
                return Err(Error::AlphabetMismatch);
            }
        }
        for (x, y) in group.relation.edges() {
            if !images[x].commutes(&images[y])? {
                return Err(Error::WellDefinednessViolation(
                    group.name(x).to_string(),
                    group.name(y).to_string(),
                ));
            }
        }
        let n = group.rank();
        let rows: Vec<Vec<i64>> = images.iter().map(GroupElement::exponent_vector).collect();
        let abelianization = if n == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_i64(&rows)
        };
        let inverse_images = images.iter().map(GroupElement::invert).collect();
        Ok(Morphism {
            group: group.clone(),
            images,
            inverse_images,
            abelianization,
        })
    }

    /// Builds from image words given as text, one per generator in order.
    pub fn from_strs(group: &Arc<GraphGroup>, images: &[&str]) -> Result<Self> {
        let images = images
            .iter()
            .map(|s| GroupElement::parse(group, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, images)
    }

    pub fn identity(group: &Arc<GraphGroup>) -> Self {
        let images = (0..group.rank())
            .map(|g| GroupElement::generator(group, g))
            .collect();
        Self::new(group, images).expect("identity is well defined")
    }

    pub fn from_document(group: &Arc<GraphGroup>, doc: &MorphismDocument) -> Result<Self> {
        let mut images: Vec<GroupElement> = (0..group.rank())
            .map(|g| GroupElement::generator(group, g))
            .collect();
        for (name, text) in &doc.images {
            let g = group.alphabet.lookup(name)?;
            images[g] = GroupElement::parse(group, text)?;
        }
        Self::new(group, images)
    }

    pub fn from_json(group: &Arc<GraphGroup>, text: &str) -> Result<Self> {
        let doc: MorphismDocument =
            serde_json::from_str(text).map_err(|e| Error::MorphismDocument(e.to_string()))?;
        Self::from_document(group, &doc)
    }

    /// Every image spelled out explicitly.
    pub fn to_document(&self) -> MorphismDocument {
        MorphismDocument {
            images: (0..self.group.rank())
                .map(|g| (self.group.name(g).to_string(), self.images[g].to_string()))
                .collect(),
        }
    }

    pub fn group(&self) -> &Arc<GraphGroup> {
        &self.group
    }

    pub fn image(&self, g: Gen) -> &GroupElement {
        &self.images[g]
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    fn letter_image(&self, l: Letter) -> &GroupElement {
        if l.inverse {
            &self.inverse_images[l.gen]
        } else {
            &self.images[l.gen]
        }
    }

    pub fn apply(&self, u: &GroupElement) -> Result<GroupElement> {
        if !Arc::ptr_eq(u.group(), &self.group) && **u.group() != *self.group {
            return Err(Error::AlphabetMismatch);
        }
        Ok(self.apply_unchecked(u.letters()))
    }

    pub(crate) fn apply_unchecked(&self, letters: &[Letter]) -> GroupElement {
        GroupElement::from_letters(
            &self.group,
            letters
                .iter()
                .flat_map(|&l| self.letter_image(l).letters().iter().copied()),
        )
    }

    pub fn apply_word(&self, w: &Word) -> GroupElement {
        self.apply_unchecked(w.letters())
    }

    /// `self` followed by `other` (maps act on the right: `x ↦ (xφ)ψ`).
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        let images = self
            .images
            .iter()
            .map(|img| other.apply(img))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(&self.group, images)
    }

    /// `φⁿ`; `n = 0` gives the identity.
    pub fn power(&self, n: usize) -> Morphism {
        let mut acc = Morphism::identity(&self.group);
        for _ in 0..n {
            acc = acc.then(self).expect("same group");
        }
        acc
    }

    /// `M[x][y] = π_y(xφ)`.
    pub fn abelianization_matrix(&self) -> &IntMatrix {
        &self.abelianization
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(g, img)| img.letters() == [Letter::pos(g)])
    }

    /// Bounded search for a surjectivity certificate. Surjective endomorphisms
    /// of graph groups are automorphisms because these groups are hopfian.
    pub fn certify_automorphism(&self, depth: usize) -> AutoCertificate {
        let determinant = self
            .abelianization
            .determinant()
            .expect("abelianization is square");
        if determinant.abs() != BigInt::one() {
            return AutoCertificate {
                verdict: AutoVerdict::Refuted,
                determinant,
                preimages: None,
                depth,
            };
        }
        let n = self.group.rank();
        let mut found: Vec<Option<Word>> = vec![None; n];
        let mut missing = n;
        let mut seen: HashMap<Word, Word> = HashMap::new();
        let identity = GroupElement::identity(&self.group);
        seen.insert(identity.word().clone(), Word::empty());
        let mut frontier = vec![(identity, Word::empty())];
        let factors: Vec<Letter> = (0..n).flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
        for _ in 0..depth {
            if missing == 0 {
                break;
            }
            let mut next = Vec::new();
            for (elem, path) in &frontier {
                for &f in &factors {
                    let prod = elem.mul_unchecked(self.letter_image(f));
                    if seen.contains_key(prod.word()) {
                        continue;
                    }
                    let mut p = path.0.clone();
                    p.push(f);
                    let p = Word(p);
                    seen.insert(prod.word().clone(), p.clone());
                    if let [l] = prod.letters() {
                        if !l.inverse && found[l.gen].is_none() {
                            found[l.gen] = Some(p.clone());
                            missing -= 1;
                        }
                    }
                    next.push((prod, p));
                }
            }
            frontier = next;
        }
        if missing == 0 {
            AutoCertificate {
                verdict: AutoVerdict::Verified,
                determinant,
                preimages: Some(found.into_iter().map(Option::unwrap).collect()),
                depth,
            }
        } else {
            AutoCertificate {
                verdict: AutoVerdict::Unknown,
                determinant,
                preimages: None,
                depth,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoVerdict {
    Verified,
    Refuted,
    Unknown,
}

/// Outcome of [`Morphism::certify_automorphism`]. Each preimage is a word in
/// the images: letter `x^±1` stands for `(xφ)^±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutoCertificate {
    pub verdict: AutoVerdict,
    pub determinant: BigInt,
    pub preimages: Option<Vec<Word>>,
    pub depth: usize,
}

impl AutoCertificate {
    /// Re-evaluates the preimage words through `phi`.
    pub fn check(&self, phi: &Morphism) -> bool {
        let det_ok = self.determinant.abs() == BigInt::one();
        match self.verdict {
            AutoVerdict::Refuted => !det_ok,
            AutoVerdict::Unknown => true,
            AutoVerdict::Verified => {
                let Some(pre) = &self.preimages else { return false };
                det_ok
                    && pre.len() == phi.group.rank()
                    && pre.iter().enumerate().all(|(g, w)| {
                        phi.apply_word(w) == GroupElement::generator(&phi.group, g)
                    })
            }
        }
    }
}

/// Serialized form: `{"images": {"a": "a b", "c": "b^-1 c"}}`. Missing
/// generators map to themselves; the empty string denotes the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDocument {
    pub images: BTreeMap<String, String>,
}

fn check_triple(group: &GraphGroup, [a, b, c]: [Gen; 3]) -> Result<()> {
    let n = group.rank();
    if a >= n || b >= n || c >= n {
        return Err(Error::InvalidTriple("generator index out of range".into()));
    }
    if a == b || b == c || a == c {
        return Err(Error::InvalidTriple("generators must be distinct".into()));
    }
    let rel = &group.relation;
    if !rel.related(a, b) || !rel.related(b, c) {
        return Err(Error::InvalidTriple(format!(
            "need ({0},{1}) and ({1},{2}) in I",
            group.name(a),
            group.name(b),
            group.name(c)
        )));
    }
    if rel.related(a, c) {
        return Err(Error::InvalidTriple(format!(
            "({},{}) must not be in I",
            group.name(a),
            group.name(c)
        )));
    }
    Ok(())
}

fn witness_images(
    group: &Arc<GraphGroup>,
    [a, b, c]: [Gen; 3],
    others: impl Fn(Gen) -> GroupElement,
) -> Vec<GroupElement> {
    (0..group.rank())
        .map(|x| {
            if x == a {
                GroupElement::from_letters(group, [Letter::pos(a), Letter::pos(b)])
            } else if x == b {
                GroupElement::generator(group, b)
            } else if x == c {
                GroupElement::from_letters(group, [Letter::neg(b), Letter::pos(c)])
            } else {
                others(x)
            }
        })
        .collect()
}

/// `a ↦ ab, b ↦ b, c ↦ b⁻¹c`, everything else killed.
pub fn witness_endo(group: &Arc<GraphGroup>, triple: [Gen; 3]) -> Result<Morphism> {
    check_triple(group, triple)?;
    let images = witness_images(group, triple, |_| GroupElement::identity(group));
    Morphism::new(group, images)
}

/// `a ↦ ab, c ↦ b⁻¹c`, everything else fixed. Needs a transitive forest.
pub fn witness_auto(group: &Arc<GraphGroup>, triple: [Gen; 3]) -> Result<Morphism> {
    if let (false, Some(w)) = group.relation.is_transitive_forest() {
        let names: Vec<&str> = w.vertices.iter().map(|&v| group.name(v)).collect();
        return Err(Error::NotTransitiveForest(format!(
            "induced {:?} on {}",
            w.kind,
            names.join(",")
        )));
    }
    check_triple(group, triple)?;
    let images = witness_images(group, triple, |x| GroupElement::generator(group, x));
    Morphism::new(group, images)
}

/// The five-generator graph with edges a–b, b–c, c–d, c–e, b–e together with
/// the automorphism `a ↦ ab⁻¹, d ↦ dc⁻¹, e ↦ ebc`.
pub fn example_fgno_auto() -> (Arc<GraphGroup>, Morphism) {
    let group = GraphGroup::from_names(
        &["a", "b", "c", "d", "e"],
        &[("a", "b"), ("b", "c"), ("c", "d"), ("c", "e"), ("b", "e")],
    )
    .expect("static graph");
    let phi = Morphism::from_strs(&group, &["a b^-1", "b", "c", "d c^-1", "e b c"])
        .expect("well defined");
    (group, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::ball_enumerate;

    fn path3() -> Arc<GraphGroup> {
        GraphGroup::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
    }

    fn el(g: &Arc<GraphGroup>, s: &str) -> GroupElement {
        GroupElement::parse(g, s).unwrap()
    }

    #[test]
    fn make_morphism_examples() {
        let g = path3();
        assert!(Morphism::from_strs(&g, &["a b", "b", "b^-1 c"]).is_ok());
        assert_eq!(
            Morphism::from_strs(&g, &["a", "a", "c"]),
            Err(Error::WellDefinednessViolation("b".into(), "c".into()))
        );
        assert!(Morphism::identity(&g).is_identity());
        assert!(matches!(
            Morphism::from_strs(&g, &["a"]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_witness() {
        let g = path3();
        let phi = witness_endo(&g, [0, 1, 2]).unwrap();
        assert_eq!(phi.apply(&el(&g, "a c")).unwrap().to_string(), "a c");
        assert!(phi.apply(&GroupElement::identity(&g)).unwrap().is_identity());
        assert_eq!(phi.apply(&el(&g, "a")).unwrap().to_string(), "a b");
    }

    #[test]
    fn powers_of_witness() {
        let g = path3();
        let phi = witness_endo(&g, [0, 1, 2]).unwrap();
        assert_eq!(phi.power(3).image(0).to_string(), "a b b b");
        assert_eq!(phi.power(2).image(2).to_string(), "b^-1 b^-1 c");
        assert_eq!(phi.power(1), phi);
        assert!(phi.power(0).is_identity());
        assert_eq!(phi.power(2).power(3), phi.power(6));
    }

    #[test]
    fn abelianization_examples() {
        let g = path3();
        let phi = witness_endo(&g, [0, 1, 2]).unwrap();
        assert_eq!(
            phi.abelianization_matrix().to_i64().unwrap(),
            vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, -1, 1]]
        );
        assert_eq!(*Morphism::identity(&g).abelianization_matrix(), IntMatrix::identity(3));
        let (_, ex2) = example_fgno_auto();
        assert_eq!(
            ex2.abelianization_matrix().to_i64().unwrap(),
            vec![
                vec![1, -1, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
                vec![0, 0, -1, 1, 0],
                vec![0, 1, 1, 0, 1],
            ]
        );
    }

    #[test]
    fn witness_endo_examples() {
        let p4 = GraphGroup::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")])
            .unwrap();
        let phi = witness_endo(&p4, [0, 1, 2]).unwrap();
        assert_eq!(phi.image(0).to_string(), "a b");
        assert!(phi.image(3).is_identity());
        let k3 = GraphGroup::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")])
            .unwrap();
        assert!(matches!(witness_endo(&k3, [0, 1, 2]), Err(Error::InvalidTriple(_))));
    }

    #[test]
    fn witness_auto_examples() {
        let g = path3();
        let phi = witness_auto(&g, [0, 1, 2]).unwrap();
        assert_eq!(phi.image(1).to_string(), "b");
        assert_eq!(phi.image(2).to_string(), "b^-1 c");

        let star = GraphGroup::from_names(&["a", "b", "c", "d"], &[("b", "a"), ("b", "c"), ("b", "d")])
            .unwrap();
        let phi = witness_auto(&star, [0, 1, 2]).unwrap();
        assert_eq!(phi.image(3).to_string(), "d");
        assert_eq!(phi.certify_automorphism(2).verdict, AutoVerdict::Verified);

        let p4 = GraphGroup::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")])
            .unwrap();
        assert!(matches!(witness_auto(&p4, [0, 1, 2]), Err(Error::NotTransitiveForest(_))));
    }

    #[test]
    fn fgno_examples() {
        let (g, phi) = example_fgno_auto();
        assert_eq!(phi.apply(&el(&g, "a e d")).unwrap().to_string(), "a e d");
        assert_eq!(phi.apply(&el(&g, "a")).unwrap().to_string(), "a b^-1");
        assert_eq!(phi.abelianization_matrix().determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn certify_examples() {
        let (_, ex2) = example_fgno_auto();
        let cert = ex2.certify_automorphism(3);
        assert_eq!(cert.verdict, AutoVerdict::Verified);
        assert!(cert.check(&ex2));

        let g = GraphGroup::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c")]).unwrap();
        let endo = witness_endo(&g, [0, 1, 2]).unwrap();
        let cert = endo.certify_automorphism(4);
        assert_eq!(cert.verdict, AutoVerdict::Refuted);
        assert_eq!(cert.determinant, BigInt::from(0));

        let id = Morphism::identity(&path3());
        assert_eq!(id.certify_automorphism(1).verdict, AutoVerdict::Verified);
    }

    #[test]
    fn unknown_is_honest() {
        let f2 = GraphGroup::from_names(&["a", "b"], &[]).unwrap();
        let phi = Morphism::from_strs(&f2, &["a b a b", "b a b"]).unwrap();
        // abelianization [[2,2],[1,2]] has det 2: refuted
        assert_eq!(phi.certify_automorphism(2).verdict, AutoVerdict::Refuted);
        // determinant 1, preimages need words of length 3
        let psi = Morphism::from_strs(&f2, &["a b a", "a b"]).unwrap();
        let cert = psi.certify_automorphism(1);
        assert_eq!(cert.verdict, AutoVerdict::Unknown);
        assert!(cert.check(&psi));
        assert_eq!(psi.certify_automorphism(3).verdict, AutoVerdict::Verified);
    }

    #[test]
    fn document_defaults() {
        let g = path3();
        let phi = Morphism::from_json(&g, r#"{"images": {"a": "a b", "c": "b^-1 c"}}"#).unwrap();
        assert_eq!(phi.image(1).to_string(), "b");
        let killed = Morphism::from_json(&g, r#"{"images": {"b": ""}}"#).unwrap();
        assert!(killed.image(1).is_identity());
        assert_eq!(Morphism::from_document(&g, &phi.to_document()).unwrap(), phi);
        assert!(matches!(
            Morphism::from_json(&g, r#"{"images": {"z": "a"}}"#),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn homomorphism_law_on_ball() {
        let (g, phi) = example_fgno_auto();
        let ball = ball_enumerate(&g, 2);
        for u in ball.iter().step_by(7) {
            for v in ball.iter().step_by(11) {
                let lhs = phi.apply(&u.multiply(v).unwrap()).unwrap();
                let rhs = phi.apply(u).unwrap().multiply(&phi.apply(v).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
