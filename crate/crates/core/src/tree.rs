//! The n-regular tree T(n) covering the Kronecker quiver K(n).
//!
//! A vertex is a reduced walk starting at vertex 1 of K(n), written
//! first-traversed-first. Walks from vertex 1 must start with a forward
//! arrow and alternate direction afterwards, so the sign of each letter
//! is determined by its position and only the labels are stored.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Label = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn at(position: usize) -> Sign {
        if position.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A signed arrow label: `+i` traverses `gamma_i` forwards, `-i` backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub sign: Sign,
    pub label: Label,
}

impl Letter {
    pub fn plus(label: Label) -> Self {
        Letter {
            sign: Sign::Plus,
            label,
        }
    }

    pub fn minus(label: Label) -> Self {
        Letter {
            sign: Sign::Minus,
            label,
        }
    }
}

/// A vertex of T(n): a reduced alternating word.
///
/// Ordering is canonical: by length, then lexicographically by label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexWord {
    // field order matters for the derived ordering
    len: usize,
    labels: Vec<Label>,
}

impl VertexWord {
    pub fn root() -> Self {
        VertexWord {
            len: 0,
            labels: Vec::new(),
        }
    }

    /// Word from labels; consecutive labels must differ.
    pub fn from_labels(labels: Vec<Label>) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidWalk("labels start at 1".into()));
        }
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidWalk(format!("{labels:?} is not reduced")));
        }
        Ok(VertexWord {
            len: labels.len(),
            labels,
        })
    }

    fn from_labels_unchecked(labels: Vec<Label>) -> Self {
        VertexWord {
            len: labels.len(),
            labels,
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &label)| Letter {
                sign: Sign::at(i),
                label,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    /// Even length: the word lies over vertex 1 of K(n).
    pub fn in_first_fiber(&self) -> bool {
        self.len.is_multiple_of(2)
    }

    /// Image under the covering map: 1 or 2.
    pub fn fiber(&self) -> u8 {
        if self.in_first_fiber() {
            1
        } else {
            2
        }
    }

    pub fn max_label(&self) -> Label {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        self.labels.iter().all(|&l| l >= 1 && (l as usize) <= n)
    }

    pub fn parent(&self) -> Option<VertexWord> {
        if self.is_root() {
            None
        } else {
            Some(VertexWord::from_labels_unchecked(
                self.labels[..self.len - 1].to_vec(),
            ))
        }
    }

    pub fn last_label(&self) -> Option<Label> {
        self.labels.last().copied()
    }

    /// Appends a label; `None` if that would backtrack.
    pub fn child(&self, label: Label) -> Option<VertexWord> {
        if self.last_label() == Some(label) {
            return None;
        }
        let mut labels = self.labels.clone();
        labels.push(label);
        Some(VertexWord::from_labels_unchecked(labels))
    }

    pub fn prefix(&self, k: usize) -> VertexWord {
        VertexWord::from_labels_unchecked(self.labels[..k].to_vec())
    }

    pub fn common_prefix_len(&self, other: &VertexWord) -> usize {
        self.labels
            .iter()
            .zip(&other.labels)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Label of the edge between adjacent words.
    pub fn edge_label(&self, other: &VertexWord) -> Option<Label> {
        let (short, long) = if self.len < other.len {
            (self, other)
        } else {
            (other, self)
        };
        (long.len == short.len + 1 && long.labels[..short.len] == short.labels[..])
            .then(|| long.labels[short.len])
    }
}

impl fmt::Display for VertexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters()
            .iter()
            .map(|l| {
                let s = if l.sign == Sign::Plus { '+' } else { '-' };
                format!("{s}{}", l.label)
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for VertexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl VertexWord {
    /// Human-facing name: `root` for the empty word.
    pub fn display_name(&self) -> String {
        if self.is_root() {
            "root".to_string()
        } else {
            self.to_string()
        }
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|tok| {
            let (sign, rest) = match tok.as_bytes().first() {
                Some(b'+') => (Sign::Plus, &tok[1..]),
                Some(b'-') => (Sign::Minus, &tok[1..]),
                _ => return Err(Error::Parse(format!("letter {tok:?} lacks a sign"))),
            };
            let label: Label = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad label in {tok:?}")))?;
            Ok(Letter { sign, label })
        })
        .collect()
}

impl FromStr for VertexWord {
    type Err = Error;

    /// Parses the dot-separated form, e.g. `+1.-2.+3`; the empty string is
    /// the root. The word must already be reduced.
    fn from_str(s: &str) -> Result<Self> {
        let letters = parse_letters(s)?;
        check_alternating(&letters)?;
        let w = VertexWord::from_labels(letters.iter().map(|l| l.label).collect())?;
        Ok(w)
    }
}

impl Serialize for VertexWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for VertexWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_alternating(letters: &[Letter]) -> Result<()> {
    for (i, l) in letters.iter().enumerate() {
        if l.sign != Sign::at(i) {
            return Err(Error::InvalidWalk(format!(
                "letter {i} has the wrong direction; walks from vertex 1 alternate starting forwards"
            )));
        }
        if l.label == 0 {
            return Err(Error::InvalidWalk("labels start at 1".into()));
        }
    }
    Ok(())
}

/// Cancels adjacent inverse pairs in an alternating walk from vertex 1.
pub fn normalize(letters: &[Letter]) -> Result<VertexWord> {
    check_alternating(letters)?;
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        match stack.last() {
            Some(top) if top.label == l.label && top.sign != l.sign => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Ok(VertexWord::from_labels_unchecked(
        stack.iter().map(|l| l.label).collect(),
    ))
}

/// The n neighbours of `v`, each with the label of the connecting edge,
/// in canonical vertex order.
pub fn neighbors(v: &VertexWord, n: usize) -> Vec<(VertexWord, Label)> {
    let mut out = Vec::with_capacity(n);
    if let (Some(p), Some(l)) = (v.parent(), v.last_label()) {
        out.push((p, l));
    }
    for label in 1..=n as Label {
        if let Some(c) = v.child(label) {
            out.push((c, label));
        }
    }
    out
}

pub fn distance(u: &VertexWord, v: &VertexWord) -> usize {
    u.len() + v.len() - 2 * u.common_prefix_len(v)
}

/// The vertices of the unique path from `u` to `v`, inclusive.
pub fn path(u: &VertexWord, v: &VertexWord) -> Vec<VertexWord> {
    let k = u.common_prefix_len(v);
    let mut out: Vec<VertexWord> = (k..=u.len()).rev().map(|i| u.prefix(i)).collect();
    out.extend((k + 1..=v.len()).map(|i| v.prefix(i)));
    out
}

/// Center of a finite tree: the middle vertex or middle edge of a diameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Center {
    Vertex(VertexWord),
    /// Endpoints in canonical order.
    Edge(VertexWord, VertexWord),
}

impl Center {
    pub fn edge(a: VertexWord, b: VertexWord) -> Self {
        if a <= b {
            Center::Edge(a, b)
        } else {
            Center::Edge(b, a)
        }
    }

    pub fn vertices(&self) -> Vec<&VertexWord> {
        match self {
            Center::Vertex(v) => vec![v],
            Center::Edge(a, b) => vec![a, b],
        }
    }

    pub fn contains(&self, v: &VertexWord) -> bool {
        self.vertices().contains(&v)
    }

    pub fn is_edge(&self) -> bool {
        matches!(self, Center::Edge(..))
    }

    pub fn distance_to(&self, v: &VertexWord) -> usize {
        self.vertices()
            .into_iter()
            .map(|c| distance(c, v))
            .min()
            .unwrap()
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Center::Vertex(v) => write!(f, "{}", v.display_name()),
            Center::Edge(a, b) => write!(f, "{{{},{}}}", a.display_name(), b.display_name()),
        }
    }
}

impl Serialize for Center {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Center {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vs: Vec<VertexWord> = Vec::deserialize(d)?;
        match vs.len() {
            1 => Ok(Center::Vertex(vs.into_iter().next().unwrap())),
            2 => {
                let mut it = vs.into_iter();
                Ok(Center::edge(it.next().unwrap(), it.next().unwrap()))
            }
            k => Err(serde::de::Error::custom(format!(
                "a center has one or two vertices, got {k}"
            ))),
        }
    }
}

/// A finite convex subtree of T(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    vertices: BTreeSet<VertexWord>,
}

/// Diameter data of a finite tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeShape {
    pub diameter: usize,
    pub center: Center,
    pub radius: usize,
    /// One diameter path, endpoint to endpoint.
    pub path: Vec<VertexWord>,
}

impl FiniteTree {
    pub fn vertices(&self) -> &BTreeSet<VertexWord> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &VertexWord) -> bool {
        self.vertices.contains(v)
    }

    /// Members adjacent to `v`, with edge labels.
    pub fn tree_neighbors(&self, v: &VertexWord) -> Vec<VertexWord> {
        let mut out = Vec::new();
        if let Some(p) = v.parent() {
            if self.vertices.contains(&p) {
                out.push(p);
            }
        }
        // children present in the set share v as a prefix
        let lo = v.len() + 1;
        for w in self
            .vertices
            .range(VertexWord::from_labels_unchecked(vec![0; lo])..)
        {
            if w.len() > lo {
                break;
            }
            if w.labels[..v.len()] == v.labels[..] {
                out.push(w.clone());
            }
        }
        out
    }

    fn adjacency(&self) -> BTreeMap<&VertexWord, Vec<&VertexWord>> {
        let mut adj: BTreeMap<&VertexWord, Vec<&VertexWord>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for v in &self.vertices {
            if let Some(p) = v.parent() {
                if let Some((pk, _)) = self.vertices.get(&p).map(|k| (k, ())) {
                    adj.get_mut(v).unwrap().push(pk);
                    adj.get_mut(pk).unwrap().push(v);
                }
            }
        }
        for list in adj.values_mut() {
            list.sort();
        }
        adj
    }

    /// BFS from `start`; returns distances and BFS parents.
    fn sweep<'a>(
        adj: &BTreeMap<&'a VertexWord, Vec<&'a VertexWord>>,
        start: &'a VertexWord,
    ) -> BTreeMap<&'a VertexWord, (usize, Option<&'a VertexWord>)> {
        let mut seen = BTreeMap::new();
        seen.insert(start, (0, None));
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = seen[v].0;
            for &w in &adj[v] {
                if !seen.contains_key(w) {
                    seen.insert(w, (d + 1, Some(v)));
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    fn farthest<'a>(
        dist: &BTreeMap<&'a VertexWord, (usize, Option<&'a VertexWord>)>,
    ) -> &'a VertexWord {
        // first vertex in canonical order among the farthest
        let max = dist.values().map(|x| x.0).max().unwrap();
        dist.iter()
            .find(|(_, x)| x.0 == max)
            .map(|(v, _)| *v)
            .unwrap()
    }

    /// Diameter, center and radius by double sweep.
    pub fn shape(&self) -> TreeShape {
        let adj = self.adjacency();
        let start = self.vertices.iter().next().expect("nonempty tree");
        let first = Self::farthest(&Self::sweep(&adj, start));
        let from_first = Self::sweep(&adj, first);
        let second = Self::farthest(&from_first);
        let mut path = vec![second.clone()];
        let mut cur = second;
        while let Some(prev) = from_first[cur].1 {
            path.push(prev.clone());
            cur = prev;
        }
        let d = path.len() - 1;
        let r = d / 2;
        let center = if d % 2 == 0 {
            Center::Vertex(path[r].clone())
        } else {
            Center::edge(path[r].clone(), path[r + 1].clone())
        };
        TreeShape {
            diameter: d,
            center,
            radius: r,
            path,
        }
    }
}

/// The minimal subtree containing every vertex of `s`.
pub fn minimal_subtree<'a>(s: impl IntoIterator<Item = &'a VertexWord>) -> Result<FiniteTree> {
    let mut it = s.into_iter();
    let first = it.next().ok_or(Error::EmptyVertexSet)?;
    let mut vertices = BTreeSet::from([first.clone()]);
    for v in it {
        vertices.extend(path(first, v));
    }
    Ok(FiniteTree { vertices })
}

pub fn diameter_center_radius(t: &FiniteTree) -> TreeShape {
    t.shape()
}

/// All vertices within distance `r` of the center, by BFS in T(n).
pub fn ball(center: &Center, r: usize, n: usize) -> FiniteTree {
    let mut vertices: BTreeSet<VertexWord> = BTreeSet::new();
    let mut queue: VecDeque<(VertexWord, usize)> = VecDeque::new();
    for c in center.vertices() {
        if vertices.insert(c.clone()) {
            queue.push_back((c.clone(), 0));
        }
    }
    while let Some((v, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for (w, _) in neighbors(&v, n) {
            if vertices.insert(w.clone()) {
                queue.push_back((w, d + 1));
            }
        }
    }
    FiniteTree { vertices }
}

/// Reflection of T(n) across the edge `{root, +1}`: an involutive,
/// label-preserving automorphism exchanging the two fibers.
pub fn reflect_beta(v: &VertexWord) -> VertexWord {
    match v.labels.first() {
        Some(1) => VertexWord::from_labels_unchecked(v.labels[1..].to_vec()),
        _ => {
            let mut labels = Vec::with_capacity(v.len() + 1);
            labels.push(1);
            labels.extend_from_slice(&v.labels);
            VertexWord::from_labels_unchecked(labels)
        }
    }
}

/// An element of the fundamental group of K(n) at vertex 1: a reduced
/// closed walk of even length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    word: VertexWord,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            word: VertexWord::root(),
        }
    }

    pub fn new(word: VertexWord) -> Result<Self> {
        if !word.in_first_fiber() {
            return Err(Error::InvalidWalk(format!(
                "{word:?} does not return to vertex 1"
            )));
        }
        Ok(GroupElement { word })
    }

    pub fn word(&self) -> &VertexWord {
        &self.word
    }

    pub fn inverse(&self) -> GroupElement {
        let rev: Vec<Label> = self.word.labels.iter().rev().copied().collect();
        GroupElement {
            word: VertexWord::from_labels_unchecked(rev),
        }
    }

    /// Concatenation: `self` traversed first, then `other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut letters = self.word.letters();
        letters.extend(shifted_letters(&other.word, self.word.len()));
        GroupElement {
            word: normalize(&letters).expect("closed walks compose"),
        }
    }
}

fn shifted_letters(w: &VertexWord, offset: usize) -> Vec<Letter> {
    w.labels
        .iter()
        .enumerate()
        .map(|(i, &label)| Letter {
            sign: Sign::at(i + offset),
            label,
        })
        .collect()
}

/// The action `g.[v] = [v w^-1]`: the walk `w^-1` followed by `v`.
pub fn translate(v: &VertexWord, g: &GroupElement) -> VertexWord {
    let inv = g.inverse();
    let mut letters = inv.word.letters();
    letters.extend(shifted_letters(v, inv.word.len()));
    normalize(&letters).expect("group elements end at vertex 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> VertexWord {
        s.parse().unwrap()
    }

    #[test]
    fn normalize_examples() {
        let r = normalize(&[Letter::plus(1), Letter::minus(1)]).unwrap();
        assert!(r.is_root());
        let r = normalize(&[
            Letter::plus(1),
            Letter::minus(2),
            Letter::plus(2),
            Letter::minus(1),
        ])
        .unwrap();
        assert!(r.is_root());
        let r = normalize(&[Letter::plus(1), Letter::minus(2)]).unwrap();
        assert_eq!(r, w("+1.-2"));
        assert!(normalize(&[Letter::minus(1)]).is_err());
        assert!(normalize(&[Letter::plus(1), Letter::plus(2)]).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w(""), VertexWord::root());
        assert_eq!(w("+1.-2.+3").to_string(), "+1.-2.+3");
        assert!("+1.-1".parse::<VertexWord>().is_err());
        assert!("-1".parse::<VertexWord>().is_err());
        assert!("+1.+2".parse::<VertexWord>().is_err());
        assert!("1".parse::<VertexWord>().is_err());
    }

    #[test]
    fn neighbor_examples() {
        let got = neighbors(&VertexWord::root(), 3);
        assert_eq!(got, vec![(w("+1"), 1), (w("+2"), 2), (w("+3"), 3)]);
        let got = neighbors(&w("+1"), 3);
        assert_eq!(got, vec![(w(""), 1), (w("+1.-2"), 2), (w("+1.-3"), 3)]);
        let got = neighbors(&w("+1.-2"), 3);
        assert_eq!(
            got,
            vec![(w("+1"), 2), (w("+1.-2.+1"), 1), (w("+1.-2.+3"), 3)]
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&w(""), &w("")), 0);
        assert_eq!(distance(&w("+1"), &w("+2")), 2);
        assert_eq!(distance(&w(""), &w("+1.-2")), 2);
    }

    #[test]
    fn minimal_subtree_examples() {
        let t = minimal_subtree([&w("")]).unwrap();
        assert_eq!(t.len(), 1);
        let t = minimal_subtree([&w("+1"), &w("+2")]).unwrap();
        assert_eq!(
            t.vertices().iter().cloned().collect::<Vec<_>>(),
            vec![w(""), w("+1"), w("+2")]
        );
        let t = minimal_subtree([&w("+1"), &w("+3"), &w("")]).unwrap();
        assert_eq!(t.len(), 3);
        assert!(minimal_subtree(std::iter::empty::<&VertexWord>()).is_err());
    }

    #[test]
    fn shape_examples() {
        let t = minimal_subtree([&w("")]).unwrap();
        let s = t.shape();
        assert_eq!((s.diameter, s.radius), (0, 0));
        assert_eq!(s.center, Center::Vertex(w("")));

        let t = minimal_subtree([&w("+1"), &w(""), &w("+3")]).unwrap();
        let s = t.shape();
        assert_eq!((s.diameter, s.radius), (2, 1));
        assert_eq!(s.center, Center::Vertex(w("")));

        let t = minimal_subtree([&w(""), &w("+2")]).unwrap();
        let s = t.shape();
        assert_eq!((s.diameter, s.radius), (1, 0));
        assert_eq!(s.center, Center::edge(w(""), w("+2")));
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ball(&Center::Vertex(w("")), 0, 3).len(), 1);
        let b = ball(&Center::Vertex(w("")), 1, 3);
        assert_eq!(b.len(), 4);
        // independent enumeration: all words of length <= 3 filtered by distance
        let b = ball(&Center::edge(w(""), w("+2")), 1, 3);
        let expected: BTreeSet<VertexWord> = ["", "+2", "+1", "+3", "+2.-1", "+2.-3"]
            .iter()
            .map(|s| w(s))
            .collect();
        assert_eq!(b.vertices(), &expected);
    }

    fn all_words(n: usize, max_len: usize) -> Vec<VertexWord> {
        let mut out = vec![VertexWord::root()];
        let mut frontier = vec![VertexWord::root()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for v in &frontier {
                for l in 1..=n as Label {
                    if let Some(c) = v.child(l) {
                        next.push(c);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn beta_examples() {
        assert_eq!(reflect_beta(&w("")), w("+1"));
        assert_eq!(reflect_beta(&w("+1")), w(""));
        assert_eq!(reflect_beta(&w("+2")), w("+1.-2"));
        let ball3 = all_words(3, 3);
        for u in &ball3 {
            assert_eq!(reflect_beta(&reflect_beta(u)), *u);
            assert_ne!(reflect_beta(u).fiber(), u.fiber());
            for v in &ball3 {
                assert_eq!(distance(&reflect_beta(u), &reflect_beta(v)), distance(u, v));
                if let Some(l) = u.edge_label(v) {
                    assert_eq!(reflect_beta(u).edge_label(&reflect_beta(v)), Some(l));
                }
            }
        }
    }

    #[test]
    fn translate_examples() {
        let g = GroupElement::new(w("+1.-2")).unwrap();
        assert_eq!(translate(&w("+3"), &GroupElement::identity()), w("+3"));
        assert_eq!(translate(&VertexWord::root(), &g), *g.inverse().word());
        assert_eq!(g.inverse().word(), &w("+2.-1"));
        assert!(GroupElement::new(w("+1")).is_err());
    }

    fn arb_word(n: usize, max_len: usize) -> impl Strategy<Value = VertexWord> {
        proptest::collection::vec(1..=n as Label, 0..=max_len).prop_map(|mut ls| {
            ls.dedup();
            VertexWord::from_labels(ls).unwrap()
        })
    }

    fn arb_group(n: usize) -> impl Strategy<Value = GroupElement> {
        arb_word(n, 6).prop_map(|v| {
            let mut labels = v.labels().to_vec();
            if labels.len() % 2 == 1 {
                labels.pop();
            }
            GroupElement::new(VertexWord::from_labels(labels).unwrap()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_is_confluent(base in arb_word(4, 6), inserts in proptest::collection::vec((0usize..8, 1u32..=4), 0..4)) {
            // insert cancelling pairs at random positions in some order
            let mut letters = base.letters();
            for (pos, label) in inserts {
                let pos = pos % (letters.len() + 1);
                let s = Sign::at(pos);
                letters.insert(pos, Letter { sign: s.flipped(), label });
                letters.insert(pos, Letter { sign: s, label });
            }
            let once = normalize(&letters).unwrap();
            prop_assert_eq!(&once, &base);
            prop_assert_eq!(normalize(&once.letters()).unwrap(), once);
        }

        #[test]
        fn neighbors_are_symmetric(v in arb_word(3, 6)) {
            let ns = neighbors(&v, 3);
            prop_assert_eq!(ns.len(), 3);
            for (u, l) in ns {
                prop_assert_eq!(distance(&u, &v), 1);
                prop_assert!(neighbors(&u, 3).contains(&(v.clone(), l)));
            }
        }

        #[test]
        fn four_point_condition(a in arb_word(3, 5), b in arb_word(3, 5), c in arb_word(3, 5), d in arb_word(3, 5)) {
            let mut s = [
                distance(&a, &b) + distance(&c, &d),
                distance(&a, &c) + distance(&b, &d),
                distance(&a, &d) + distance(&b, &c),
            ];
            s.sort();
            prop_assert_eq!(s[1], s[2]);
            prop_assert_eq!(distance(&a, &b), distance(&b, &a));
            prop_assert_eq!(path(&a, &b).len(), distance(&a, &b) + 1);
        }

        #[test]
        fn translation_is_isometry(u in arb_word(3, 5), v in arb_word(3, 5), g in arb_group(3), h in arb_group(3)) {
            let (tu, tv) = (translate(&u, &g), translate(&v, &g));
            prop_assert_eq!(distance(&tu, &tv), distance(&u, &v));
            prop_assert_eq!(tu.fiber(), u.fiber());
            if let Some(l) = u.edge_label(&v) {
                prop_assert_eq!(tu.edge_label(&tv), Some(l));
            }
            // translating by g then h is translating by the concatenation g h
            prop_assert_eq!(translate(&translate(&u, &g), &h), translate(&u, &g.compose(&h)));
        }
    }
}
