//! Words over the direction set, full subtrees and patterns.
//!
//! The direction set of a `k`-ary tree is `{0, .., k-1}`. A vertex of the tree is a
//! [`Word`]; the root is the empty word. A [`Pattern`] labels a finite *full* subtree
//! (every vertex has either zero or `k` children) and is stored as a recursive node so the
//! fullness invariant cannot be violated once arity has been checked.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// The arity `k` of the regular rooted tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeSignature {
    arity: usize,
}

impl TreeSignature {
    pub fn new(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        Ok(TreeSignature { arity })
    }

    pub fn arity(self) -> usize {
        self.arity
    }

    /// Number of words of length at most `n - 1`.
    pub fn delta_size(self, n: usize) -> usize {
        (0..n).map(|i| self.arity.pow(i as u32)).sum()
    }

    /// The full subtree of all words of length at most `n - 1`.
    pub fn delta(self, n: usize) -> Result<FullSubtree> {
        if n == 0 {
            return Err(Error::ZeroHeight);
        }
        Ok(FullSubtree::complete(self.arity, n))
    }
}

/// A vertex of the tree, i.e. a finite sequence of directions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn directions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// Same as [`Word::is_root`].
    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    pub fn child(&self, direction: usize) -> Word {
        let mut d = self.0.clone();
        d.push(direction);
        Word(d)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        Word(d)
    }

    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Word(rest.to_vec()))
    }

    pub fn check(&self, sig: TreeSignature) -> Result<()> {
        match self.0.iter().find(|&&d| d >= sig.arity()) {
            Some(_) => Err(Error::OutOfSupport(self.clone())),
            None => Ok(()),
        }
    }
}

impl From<Vec<usize>> for Word {
    fn from(d: Vec<usize>) -> Self {
        Word(d)
    }
}

impl From<&[usize]> for Word {
    fn from(d: &[usize]) -> Self {
        Word(d.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let sep = if self.0.iter().all(|&d| d < 10) {
            ""
        } else {
            "."
        };
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// A letter, referenced by its index in an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub usize);

/// Returns true when `token` can appear in the text formats.
pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty()
        && !token
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')')
}

/// A finite ordered list of distinct printable tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if !is_valid_token(s) {
                return Err(Error::InvalidToken(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.symbols[letter.0]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn letter(&self, token: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == token).map(Letter)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len()).map(Letter)
    }
}

/// A finite full subtree: a leaf, or a vertex with exactly `k` child subtrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FullSubtree {
    children: Vec<FullSubtree>,
}

impl FullSubtree {
    pub fn leaf() -> Self {
        FullSubtree {
            children: Vec::new(),
        }
    }

    pub fn node(children: Vec<FullSubtree>) -> Self {
        FullSubtree { children }
    }

    fn complete(arity: usize, n: usize) -> Self {
        if n <= 1 {
            FullSubtree::leaf()
        } else {
            let child = FullSubtree::complete(arity, n - 1);
            FullSubtree::node(vec![child; arity])
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self) -> &[FullSubtree] {
        &self.children
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(FullSubtree::height)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(FullSubtree::size).sum::<usize>()
    }

    pub fn check(&self, sig: TreeSignature) -> Result<()> {
        if !self.children.is_empty() && self.children.len() != sig.arity() {
            return Err(Error::WrongArity {
                expected: sig.arity(),
                found: self.children.len(),
            });
        }
        self.children.iter().try_for_each(|c| c.check(sig))
    }

    pub fn at(&self, w: &Word) -> Option<&FullSubtree> {
        let mut node = self;
        for &d in w.directions() {
            node = node.children.get(d)?;
        }
        Some(node)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.at(w).is_some()
    }

    /// All vertices in preorder.
    pub fn words(&self) -> Vec<Word> {
        let mut out = Vec::new();
        self.collect_words(&mut Vec::new(), &mut out);
        out
    }

    fn collect_words(&self, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
        out.push(Word(prefix.clone()));
        for (d, c) in self.children.iter().enumerate() {
            prefix.push(d);
            c.collect_words(prefix, out);
            prefix.pop();
        }
    }

    /// `Some(n)` when this is exactly the set of words of length `< n`.
    pub fn delta_height(&self) -> Option<usize> {
        if self.is_leaf() {
            return Some(1);
        }
        let first = self.children[0].delta_height()?;
        if self
            .children
            .iter()
            .all(|c| c.delta_height() == Some(first))
        {
            Some(first + 1)
        } else {
            None
        }
    }
}

/// A labeling of a finite full subtree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    label: Letter,
    children: Vec<Pattern>,
}

impl Pattern {
    pub fn leaf(label: Letter) -> Self {
        Pattern {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: Letter, children: Vec<Pattern>) -> Self {
        Pattern { label, children }
    }

    /// A pattern of the unary tree, read as a word from the root downwards.
    pub fn chain(letters: &[Letter]) -> Self {
        let (first, rest) = letters
            .split_first()
            .expect("chain needs at least one letter");
        if rest.is_empty() {
            Pattern::leaf(*first)
        } else {
            Pattern::node(*first, vec![Pattern::chain(rest)])
        }
    }

    /// Labels `shape` with `label(w)` at each vertex `w`.
    pub fn from_shape(shape: &FullSubtree, mut label: impl FnMut(&Word) -> Letter) -> Self {
        fn go(
            s: &FullSubtree,
            w: &mut Vec<usize>,
            label: &mut impl FnMut(&Word) -> Letter,
        ) -> Pattern {
            let a = label(&Word(w.clone()));
            let children = s
                .children
                .iter()
                .enumerate()
                .map(|(d, c)| {
                    w.push(d);
                    let p = go(c, w, label);
                    w.pop();
                    p
                })
                .collect();
            Pattern::node(a, children)
        }
        go(shape, &mut Vec::new(), &mut label)
    }

    /// Labels `shape` with `labels` consumed in preorder.
    pub fn from_preorder(shape: &FullSubtree, labels: &[Letter]) -> Self {
        let mut it = labels.iter();
        Pattern::from_shape(shape, |_| *it.next().expect("one label per vertex"))
    }

    pub fn constant(shape: &FullSubtree, a: Letter) -> Self {
        Pattern::from_shape(shape, |_| a)
    }

    pub fn label(&self) -> Letter {
        self.label
    }

    pub fn children(&self) -> &[Pattern] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Pattern::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Pattern::size).sum::<usize>()
    }

    pub fn shape(&self) -> FullSubtree {
        FullSubtree::node(self.children.iter().map(Pattern::shape).collect())
    }

    /// Checks the arity of every inner vertex and that all labels are letters of an
    /// alphabet with `alphabet_len` symbols.
    pub fn check(&self, sig: TreeSignature, alphabet_len: usize) -> Result<()> {
        if self.label.0 >= alphabet_len {
            return Err(Error::LetterOutOfRange(self.label.0));
        }
        if !self.children.is_empty() && self.children.len() != sig.arity() {
            return Err(Error::WrongArity {
                expected: sig.arity(),
                found: self.children.len(),
            });
        }
        self.children
            .iter()
            .try_for_each(|c| c.check(sig, alphabet_len))
    }

    /// `Some(n)` when the support is exactly the words of length `< n`.
    pub fn block_size(&self) -> Option<usize> {
        self.shape().delta_height()
    }

    pub fn at(&self, w: &Word) -> Option<&Pattern> {
        let mut node = self;
        for &d in w.directions() {
            node = node.children.get(d)?;
        }
        Some(node)
    }

    pub fn get(&self, w: &Word) -> Option<Letter> {
        self.at(w).map(|p| p.label)
    }

    /// Labels in preorder.
    pub fn preorder(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.size());
        fn go(p: &Pattern, out: &mut Vec<Letter>) {
            out.push(p.label);
            p.children.iter().for_each(|c| go(c, out));
        }
        go(self, &mut out);
        out
    }

    /// `(w, p(w))` for every vertex, in preorder.
    pub fn entries(&self) -> Vec<(Word, Letter)> {
        self.shape()
            .words()
            .into_iter()
            .zip(self.preorder())
            .collect()
    }

    pub fn map_labels(&self, f: &impl Fn(Letter) -> Letter) -> Pattern {
        Pattern::node(
            f(self.label),
            self.children.iter().map(|c| c.map_labels(f)).collect(),
        )
    }

    /// The pattern `m ↦ p(wm)` on support `m ∈ shape`.
    pub fn subpattern(&self, w: &Word, shape: &FullSubtree) -> Result<Pattern> {
        let base = self.at(w).ok_or_else(|| Error::OutOfSupport(w.clone()))?;
        fn go(p: &Pattern, s: &FullSubtree, w: &mut Vec<usize>) -> Result<Pattern> {
            if s.is_leaf() {
                return Ok(Pattern::leaf(p.label));
            }
            if p.children.len() != s.children.len() {
                w.push(0);
                return Err(Error::OutOfSupport(Word(w.clone())));
            }
            let mut children = Vec::with_capacity(s.children.len());
            for (d, (pc, sc)) in p.children.iter().zip(&s.children).enumerate() {
                w.push(d);
                children.push(go(pc, sc, w)?);
                w.pop();
            }
            Ok(Pattern::node(p.label, children))
        }
        go(base, shape, &mut w.directions().to_vec())
    }

    /// Restriction to the words of length `< n`.
    pub fn restrict(&self, n: usize) -> Result<Pattern> {
        if n == 0 {
            return Err(Error::ZeroHeight);
        }
        if n == 1 {
            return Ok(Pattern::leaf(self.label));
        }
        if self.children.is_empty() {
            return Err(Error::OutOfSupport(Word(vec![0])));
        }
        let children = self
            .children
            .iter()
            .map(|c| c.restrict(n - 1))
            .collect::<Result<_>>()?;
        Ok(Pattern::node(self.label, children))
    }
}

/// The translate `w·p`, supported on `wT`, with `(w·p)(wm) = p(m)`.
pub fn translate(w: &Word, p: &Pattern) -> BTreeMap<Word, Letter> {
    p.entries()
        .into_iter()
        .map(|(m, a)| (w.concat(&m), a))
        .collect()
}

/// Every block of `Δ_n` over `alphabet_len` letters, labels in preorder-lexicographic order.
pub fn all_blocks(
    sig: TreeSignature,
    alphabet_len: usize,
    n: usize,
) -> Result<impl Iterator<Item = Pattern>> {
    let shape = sig.delta(n)?;
    Ok(Labelings::new(shape, alphabet_len))
}

/// All extensions to a common block size of a finite set of blocks.
pub fn extend_blocks<'a>(
    sig: TreeSignature,
    alphabet: &Alphabet,
    blocks: impl IntoIterator<Item = &'a Pattern>,
) -> Result<BTreeSet<Pattern>> {
    let blocks: Vec<&Pattern> = blocks.into_iter().collect();
    let mut sizes = Vec::with_capacity(blocks.len());
    for b in &blocks {
        b.check(sig, alphabet.len())?;
        sizes.push(b.block_size().ok_or(Error::NotABlock)?);
    }
    let n = match sizes.iter().max() {
        Some(&n) => n,
        None => return Ok(BTreeSet::new()),
    };
    let mut out = BTreeSet::new();
    for (b, &size) in blocks.iter().zip(&sizes) {
        out.extend(extensions(sig, alphabet.len(), b, size, n));
    }
    Ok(out)
}

/// All blocks on `Δ_n` whose restriction to `Δ_size` is `b`.
pub(crate) fn extensions(
    sig: TreeSignature,
    alphabet_len: usize,
    b: &Pattern,
    size: usize,
    n: usize,
) -> Vec<Pattern> {
    if size == n {
        return vec![b.clone()];
    }
    if size == 1 {
        // grow all k children freely
        let subs: Vec<Pattern> =
            Labelings::new(FullSubtree::complete(sig.arity(), n - 1), alphabet_len).collect();
        return product(&vec![subs; sig.arity()])
            .into_iter()
            .map(|children| Pattern::node(b.label, children))
            .collect();
    }
    let per_child: Vec<Vec<Pattern>> = b
        .children
        .iter()
        .map(|c| extensions(sig, alphabet_len, c, size - 1, n - 1))
        .collect();
    product(&per_child)
        .into_iter()
        .map(|children| Pattern::node(b.label, children))
        .collect()
}

pub(crate) fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for prefix in &acc {
            for o in options {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// Full subtrees of height at most `max_height`, in recursive order: the leaf first,
/// then inner vertices whose child tuples run lexicographically over the smaller list.
pub fn shapes_up_to(sig: TreeSignature, max_height: usize) -> Vec<FullSubtree> {
    if max_height == 0 {
        return Vec::new();
    }
    let mut shapes = vec![FullSubtree::leaf()];
    for _ in 1..max_height {
        let mut next = vec![FullSubtree::leaf()];
        next.extend(
            product(&vec![shapes.clone(); sig.arity()])
                .into_iter()
                .map(FullSubtree::node),
        );
        shapes = next;
    }
    shapes
}

/// Every full-tree-pattern of height at most `max_height`, each exactly once.
///
/// Shapes come in the order of [`shapes_up_to`]; for each shape the labels run
/// lexicographically over the preorder vertex sequence. The count grows doubly
/// exponentially in `max_height`, so callers must keep it small.
pub fn enumerate_patterns(
    sig: TreeSignature,
    alphabet: &Alphabet,
    max_height: usize,
) -> Result<impl Iterator<Item = Pattern>> {
    if max_height == 0 {
        return Err(Error::ZeroHeight);
    }
    let q = alphabet.len();
    Ok(shapes_up_to(sig, max_height)
        .into_iter()
        .flat_map(move |s| Labelings::new(s, q)))
}

/// Number of patterns [`enumerate_patterns`] would yield, saturating.
pub fn count_patterns(sig: TreeSignature, alphabet_len: usize, max_height: usize) -> u128 {
    shapes_up_to(sig, max_height)
        .iter()
        .map(|s| {
            (alphabet_len as u128)
                .checked_pow(s.size() as u32)
                .unwrap_or(u128::MAX)
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// All labelings of one shape, odometer order with the last preorder vertex fastest.
struct Labelings {
    shape: FullSubtree,
    digits: Vec<usize>,
    base: usize,
    done: bool,
}

impl Labelings {
    fn new(shape: FullSubtree, base: usize) -> Self {
        let size = shape.size();
        Labelings {
            shape,
            digits: vec![0; size],
            base,
            done: base == 0,
        }
    }
}

impl Iterator for Labelings {
    type Item = Pattern;

    fn next(&mut self) -> Option<Pattern> {
        if self.done {
            return None;
        }
        let labels: Vec<Letter> = self.digits.iter().map(|&d| Letter(d)).collect();
        let out = Pattern::from_preorder(&self.shape, &labels);
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}
