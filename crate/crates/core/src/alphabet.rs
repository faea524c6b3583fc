//! Independence alphabets and the graph predicates used to classify graph
//! groups: clique unions (transitivity of `I ∪ Δ`) and transitive forests.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a generator in its [`Alphabet`].
pub type Gen = usize;

/// Ordered list of generator names. The list order is the total order used
/// for every lexicographic choice in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Gen>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        let mut owned = Vec::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if name.is_empty() || name.contains('^') || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidGeneratorName(name.to_string()));
            }
            if index.insert(name.to_string(), i).is_some() {
                return Err(Error::DuplicateGenerator(name.to_string()));
            }
            owned.push(name.to_string());
        }
        Ok(Alphabet { names: owned, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<Gen> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }
}

/// Symmetric irreflexive relation on generator indices, stored as a set of
/// pairs `(i, j)` with `i < j` plus a dense adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceRelation {
    n: usize,
    edges: BTreeSet<(Gen, Gen)>,
    adj: Vec<Vec<bool>>,
}

impl IndependenceRelation {
    pub fn empty(n: usize) -> Self {
        IndependenceRelation {
            n,
            edges: BTreeSet::new(),
            adj: vec![vec![false; n]; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut rel = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                rel.insert(i, j).expect("distinct indices");
            }
        }
        rel
    }

    /// Builds a relation from index pairs. Panics on out-of-range indices;
    /// self-loops are rejected.
    pub fn from_pairs(n: usize, pairs: &[(Gen, Gen)]) -> Result<Self> {
        let mut rel = Self::empty(n);
        for &(i, j) in pairs {
            assert!(i < n && j < n, "generator index out of range");
            rel.insert(i, j)?;
        }
        Ok(rel)
    }

    fn insert(&mut self, i: Gen, j: Gen) -> Result<()> {
        if i == j {
            return Err(Error::SelfLoop(i.to_string()));
        }
        self.edges.insert((i.min(j), i.max(j)));
        self.adj[i][j] = true;
        self.adj[j][i] = true;
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `(i, j) ∈ I`. Always false on the diagonal.
    pub fn related(&self, i: Gen, j: Gen) -> bool {
        self.adj[i][j]
    }

    /// `(i, j) ∈ I ∪ Δ`.
    pub fn related_or_equal(&self, i: Gen, j: Gen) -> bool {
        i == j || self.adj[i][j]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Gen, Gen)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, i: Gen) -> impl Iterator<Item = Gen> + '_ {
        (0..self.n).filter(move |&j| self.adj[i][j])
    }

    /// Connected components ordered by least member, members ascending.
    pub fn components(&self) -> Vec<Vec<Gen>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut groups: Vec<Vec<Gen>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for v in 0..self.n {
            let root = find(&mut parent, v);
            let k = *slot.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[k].push(v);
        }
        groups
    }

    /// True iff every connected component is complete. On failure returns the
    /// lexicographically least `(a, b, c)` with `(a,b), (b,c) ∈ I`, `(a,c) ∉ I`
    /// and `a ≠ c`.
    pub fn is_union_of_cliques(&self) -> (bool, Option<[Gen; 3]>) {
        for a in 0..self.n {
            for b in 0..self.n {
                if !self.adj[a][b] {
                    continue;
                }
                for c in 0..self.n {
                    if c != a && self.adj[b][c] && !self.adj[a][c] {
                        return (false, Some([a, b, c]));
                    }
                }
            }
        }
        (true, None)
    }

    /// True iff there is no induced path or cycle on four vertices. The first
    /// offending 4-subset (in lexicographic order of vertex sets) is returned,
    /// its vertices listed along the path or cycle.
    pub fn is_transitive_forest(&self) -> (bool, Option<ForbiddenSubgraph>) {
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if let Some(w) = self.induced_forbidden([a, b, c, d]) {
                            return (false, Some(w));
                        }
                    }
                }
            }
        }
        (true, None)
    }

    fn induced_forbidden(&self, vs: [Gen; 4]) -> Option<ForbiddenSubgraph> {
        let mut degree = [0usize; 4];
        let mut edges = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.adj[vs[i]][vs[j]] {
                    degree[i] += 1;
                    degree[j] += 1;
                    edges += 1;
                }
            }
        }
        let kind = match (edges, degree.iter().all(|&d| d == 2)) {
            (4, true) => ForbiddenKind::Cycle4,
            (3, _) if degree.iter().all(|&d| d == 1 || d == 2) && degree.contains(&1) => {
                ForbiddenKind::Path4
            }
            _ => return None,
        };
        // walk the path (from its lesser endpoint) or the cycle (from vs[0])
        let start = match kind {
            ForbiddenKind::Path4 => (0..4).find(|&i| degree[i] == 1).unwrap(),
            ForbiddenKind::Cycle4 => 0,
        };
        let mut order = vec![start];
        while order.len() < 4 {
            let last = *order.last().unwrap();
            let next = (0..4)
                .filter(|i| !order.contains(i) && self.adj[vs[last]][vs[*i]])
                .min()?;
            order.push(next);
        }
        Some(ForbiddenSubgraph {
            kind,
            vertices: [vs[order[0]], vs[order[1]], vs[order[2]], vs[order[3]]],
        })
    }

    /// Connected components, provided each of them is a clique.
    pub fn decompose(&self) -> Result<Vec<Vec<Gen>>> {
        if !self.is_union_of_cliques().0 {
            return Err(Error::NotCliqueUnion);
        }
        Ok(self.components())
    }

    pub fn classify(&self) -> Classification {
        let (is_clique_union, witness_triple) = self.is_union_of_cliques();
        let (is_transitive_forest, forbidden_witness) = self.is_transitive_forest();
        Classification {
            is_clique_union,
            witness_triple,
            is_transitive_forest,
            forbidden_witness,
            factors: self.components(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForbiddenKind {
    Path4,
    Cycle4,
}

/// Four vertices inducing a path (listed end to end) or a 4-cycle (listed
/// around the cycle).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForbiddenSubgraph {
    pub kind: ForbiddenKind,
    pub vertices: [Gen; 4],
}

impl ForbiddenSubgraph {
    /// Re-checks the certificate against a relation.
    pub fn validate(&self, rel: &IndependenceRelation) -> bool {
        let v = self.vertices;
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| v[i] != v[j]));
        let consecutive = (0..3).all(|i| rel.related(v[i], v[i + 1]));
        let closing = rel.related(v[3], v[0]);
        let chords = !rel.related(v[0], v[2]) && !rel.related(v[1], v[3]);
        distinct
            && consecutive
            && chords
            && match self.kind {
                ForbiddenKind::Path4 => !closing,
                ForbiddenKind::Cycle4 => closing,
            }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_clique_union: bool,
    pub witness_triple: Option<[Gen; 3]>,
    pub is_transitive_forest: bool,
    pub forbidden_witness: Option<ForbiddenSubgraph>,
    pub factors: Vec<Vec<Gen>>,
}

/// An independence alphabet `(A, I)`: the data presenting a graph group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphGroup {
    pub alphabet: Alphabet,
    pub relation: IndependenceRelation,
}

impl GraphGroup {
    pub fn new(alphabet: Alphabet, relation: IndependenceRelation) -> Result<Arc<Self>> {
        if alphabet.len() != relation.size() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.len(),
                found: relation.size(),
            });
        }
        Ok(Arc::new(GraphGroup { alphabet, relation }))
    }

    /// Builds a group from generator names and edges given by name.
    pub fn from_names(generators: &[&str], edges: &[(&str, &str)]) -> Result<Arc<Self>> {
        let alphabet = Alphabet::new(generators)?;
        let mut relation = IndependenceRelation::empty(alphabet.len());
        for &(x, y) in edges {
            let (i, j) = (alphabet.lookup(x)?, alphabet.lookup(y)?);
            relation
                .insert(i, j)
                .map_err(|_| Error::SelfLoop(x.to_string()))?;
        }
        Self::new(alphabet, relation)
    }

    pub fn from_json(text: &str) -> Result<Arc<Self>> {
        let (alphabet, relation) = parse_alphabet(text)?;
        Self::new(alphabet, relation)
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn commute(&self, x: Gen, y: Gen) -> bool {
        self.relation.related_or_equal(x, y)
    }

    pub fn name(&self, g: Gen) -> &str {
        self.alphabet.name(g)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            generators: self.alphabet.names().to_vec(),
            edges: self
                .relation
                .edges()
                .map(|(i, j)| [self.name(i).to_string(), self.name(j).to_string()])
                .collect(),
        }
    }
}

impl fmt::Display for GraphGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({{{}}}; ", self.alphabet.names().join(","))?;
        let edges: Vec<String> = self
            .relation
            .edges()
            .map(|(i, j)| format!("{}-{}", self.name(i), self.name(j)))
            .collect();
        write!(f, "{{{}}})", edges.join(","))
    }
}

/// Serialized form: `{"generators": ["a","b"], "edges": [["a","b"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub generators: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

impl GraphDocument {
    pub fn build(&self) -> Result<(Alphabet, IndependenceRelation)> {
        let alphabet = Alphabet::new(&self.generators)?;
        let mut relation = IndependenceRelation::empty(alphabet.len());
        for [x, y] in &self.edges {
            let (i, j) = (alphabet.lookup(x)?, alphabet.lookup(y)?);
            if i == j {
                return Err(Error::SelfLoop(x.clone()));
            }
            relation.insert(i, j)?;
        }
        Ok((alphabet, relation))
    }
}

pub fn parse_alphabet(text: &str) -> Result<(Alphabet, IndependenceRelation)> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| Error::GraphDocument(e.to_string()))?;
    doc.build()
}
