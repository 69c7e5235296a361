//! Unrestricted Rabin automata over `k`-ary trees.
//!
//! An automaton is a finite set of named states together with *transition bundles*
//! `(source; letter; terminal_0, .., terminal_{k-1})`. There are no initial states and no
//! acceptance condition: a configuration is accepted when every vertex can be mapped to a
//! state so that each vertex, its label and its children form a bundle.

mod glue;
mod regular;

pub use glue::{glue_blocks, Glued};
pub use regular::{
    apply_machine, default_choice, regular_approximation, xi_machine, RegularMachine,
};

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::tree::{Alphabet, Letter, Pattern, TreeSignature};

pub type StateId = usize;

/// A transition bundle `(source; label; terminals)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle {
    pub source: StateId,
    pub label: Letter,
    pub terminals: Vec<StateId>,
}

impl Bundle {
    pub fn new(source: StateId, label: Letter, terminals: Vec<StateId>) -> Self {
        Bundle {
            source,
            label,
            terminals,
        }
    }
}

/// State names may not contain whitespace.
pub fn is_valid_state_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace)
}

/// An unrestricted Rabin automaton. Bundles are kept sorted and free of duplicates, so
/// bundle indices are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    signature: TreeSignature,
    alphabet: Alphabet,
    states: Vec<String>,
    bundles: Vec<Bundle>,
    from_source: Vec<Vec<usize>>,
    by_label: Vec<Vec<usize>>,
}

/// A map from the vertices of `T⁺` to states, stored with the same recursive shape as
/// the accepted pattern plus one extra level below its leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Run {
    pub state: StateId,
    pub children: Vec<Run>,
}

impl Run {
    pub fn leaf(state: StateId) -> Self {
        Run {
            state,
            children: Vec::new(),
        }
    }
}

impl Automaton {
    pub fn new(
        signature: TreeSignature,
        alphabet: Alphabet,
        states: Vec<String>,
        mut bundles: Vec<Bundle>,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for s in &states {
            if !is_valid_state_name(s) {
                return Err(Error::InvalidToken(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        for b in &bundles {
            if b.terminals.len() != signature.arity() {
                return Err(Error::WrongArity {
                    expected: signature.arity(),
                    found: b.terminals.len(),
                });
            }
            if b.label.0 >= alphabet.len() {
                return Err(Error::LetterOutOfRange(b.label.0));
            }
            if let Some(&bad) = std::iter::once(&b.source)
                .chain(&b.terminals)
                .find(|&&s| s >= states.len())
            {
                return Err(Error::StateOutOfRange(bad));
            }
        }
        bundles.sort();
        bundles.dedup();
        Ok(Self::from_sorted(signature, alphabet, states, bundles))
    }

    fn from_sorted(
        signature: TreeSignature,
        alphabet: Alphabet,
        states: Vec<String>,
        bundles: Vec<Bundle>,
    ) -> Self {
        let mut from_source = vec![Vec::new(); states.len()];
        let mut by_label = vec![Vec::new(); alphabet.len()];
        for (i, b) in bundles.iter().enumerate() {
            from_source[b.source].push(i);
            by_label[b.label.0].push(i);
        }
        Automaton {
            signature,
            alphabet,
            states,
            bundles,
            from_source,
            by_label,
        }
    }

    /// The automaton with no states; it presents the empty shift.
    pub fn empty(signature: TreeSignature, alphabet: Alphabet) -> Self {
        Self::from_sorted(signature, alphabet, Vec::new(), Vec::new())
    }

    /// One state carrying a bundle loop for every letter.
    pub fn full_shift(signature: TreeSignature, alphabet: Alphabet) -> Self {
        let bundles = alphabet
            .letters()
            .map(|a| Bundle::new(0, a, vec![0; signature.arity()]))
            .collect();
        Self::from_sorted(signature, alphabet, vec!["s".to_string()], bundles)
    }

    pub fn signature(&self) -> TreeSignature {
        self.signature
    }

    pub fn arity(&self) -> usize {
        self.signature.arity()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle_indices_from(&self, s: StateId) -> &[usize] {
        &self.from_source[s]
    }

    pub fn bundles_from(&self, s: StateId) -> impl Iterator<Item = &Bundle> + '_ {
        self.from_source[s].iter().map(move |&i| &self.bundles[i])
    }

    pub fn bundles_labeled(&self, a: Letter) -> impl Iterator<Item = &Bundle> + '_ {
        self.by_label[a.0].iter().map(move |&i| &self.bundles[i])
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn check_compatible(&self, other: &Automaton) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch);
        }
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    pub(crate) fn check_pattern(&self, p: &Pattern) -> Result<()> {
        p.check(self.signature, self.alphabet.len())
            .map_err(|e| match e {
                Error::LetterOutOfRange(_) => Error::AlphabetMismatch,
                e => e,
            })
    }

    /// For every vertex `w` of `p`, the set of states `s` for which some map `α` with
    /// `α(w) = s` satisfies the bundle condition on the subtree below `w`. The children
    /// of leaves range over `leaf_children`.
    pub(crate) fn possible(&self, p: &Pattern, leaf_children: &[bool]) -> Possible {
        let children: Vec<Possible> = p
            .children()
            .iter()
            .map(|c| self.possible(c, leaf_children))
            .collect();
        let mut set = vec![false; self.num_states()];
        for b in self.bundles_labeled(p.label()) {
            if set[b.source] {
                continue;
            }
            let ok = if children.is_empty() {
                b.terminals.iter().all(|&t| leaf_children[t])
            } else {
                b.terminals.iter().zip(&children).all(|(&t, c)| c.set[t])
            };
            if ok {
                set[b.source] = true;
            }
        }
        Possible { set, children }
    }

    /// Top-down witness extraction, lowest bundle index first.
    pub(crate) fn extract_run(
        &self,
        p: &Pattern,
        poss: &Possible,
        state: StateId,
        leaf_children: &[bool],
    ) -> Run {
        let b = self
            .bundles_from(state)
            .find(|b| {
                b.label == p.label()
                    && if poss.children.is_empty() {
                        b.terminals.iter().all(|&t| leaf_children[t])
                    } else {
                        b.terminals
                            .iter()
                            .zip(&poss.children)
                            .all(|(&t, c)| c.set[t])
                    }
            })
            .expect("state was marked possible");
        let children = if p.is_leaf() {
            b.terminals.iter().map(|&t| Run::leaf(t)).collect()
        } else {
            p.children()
                .iter()
                .zip(&poss.children)
                .zip(&b.terminals)
                .map(|((c, cp), &t)| self.extract_run(c, cp, t, leaf_children))
                .collect()
        };
        Run { state, children }
    }

    /// Whether a full-tree-pattern is accepted: some map from `T⁺` to states satisfies
    /// the bundle condition at every vertex of `T`. For an essential automaton this is
    /// exactly membership of the pattern in the presented shift.
    pub fn accepts(&self, p: &Pattern) -> Result<bool> {
        Ok(self.accepting_run(p)?.is_some())
    }

    /// Like [`Automaton::accepts`], returning a witness run.
    pub fn accepting_run(&self, p: &Pattern) -> Result<Option<Run>> {
        self.check_pattern(p)?;
        let all = vec![true; self.num_states()];
        let poss = self.possible(p, &all);
        Ok(poss
            .set
            .iter()
            .position(|&x| x)
            .map(|s| self.extract_run(p, &poss, s, &all)))
    }

    /// Checks that `run` is an accepting map for `p`.
    pub fn is_run_for(&self, p: &Pattern, run: &Run) -> bool {
        if run.children.len() != self.arity() || run.state >= self.num_states() {
            return false;
        }
        let terminals: Vec<StateId> = run.children.iter().map(|r| r.state).collect();
        let bundle = Bundle::new(run.state, p.label(), terminals);
        if self.bundles.binary_search(&bundle).is_err() {
            return false;
        }
        if p.is_leaf() {
            run.children
                .iter()
                .all(|r| r.children.is_empty() && r.state < self.num_states())
        } else {
            p.children()
                .iter()
                .zip(&run.children)
                .all(|(c, r)| self.is_run_for(c, r))
        }
    }

    pub fn is_essential(&self) -> bool {
        self.from_source.iter().all(|v| !v.is_empty())
    }

    /// The greatest sub-automaton in which every state is the source of a bundle, together
    /// with the map from old state ids to new ones.
    pub fn essential_part(&self) -> (Automaton, Vec<Option<StateId>>) {
        let n = self.num_states();
        let mut alive = vec![true; n];
        loop {
            let mut next = vec![false; n];
            for b in &self.bundles {
                if alive[b.source] && b.terminals.iter().all(|&t| alive[t]) {
                    next[b.source] = true;
                }
            }
            if next == alive {
                break;
            }
            alive = next;
        }
        self.restrict_states(&alive)
    }

    pub fn essentialize(&self) -> Automaton {
        self.essential_part().0
    }

    /// Keeps the states flagged in `keep` and the bundles touching only kept states.
    pub(crate) fn restrict_states(&self, keep: &[bool]) -> (Automaton, Vec<Option<StateId>>) {
        let mut map = vec![None; self.num_states()];
        let mut states = Vec::new();
        for (s, name) in self.states.iter().enumerate() {
            if keep[s] {
                map[s] = Some(states.len());
                states.push(name.clone());
            }
        }
        let bundles: Vec<Bundle> = self
            .bundles
            .iter()
            .filter_map(|b| {
                let source = map[b.source]?;
                let terminals = b
                    .terminals
                    .iter()
                    .map(|&t| map[t])
                    .collect::<Option<Vec<_>>>()?;
                Some(Bundle::new(source, b.label, terminals))
            })
            .collect();
        // order is preserved by the monotone renaming
        (
            Self::from_sorted(self.signature, self.alphabet.clone(), states, bundles),
            map,
        )
    }

    /// Bundles starting at each state carry pairwise distinct labels.
    pub fn is_deterministic(&self) -> bool {
        self.from_source.iter().all(|idx| {
            let mut labels: Vec<Letter> = idx.iter().map(|&i| self.bundles[i].label).collect();
            let n = labels.len();
            labels.sort();
            labels.dedup();
            labels.len() == n
        })
    }

    /// Bundles terminating at each terminal sequence carry pairwise distinct labels.
    pub fn is_codeterministic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.bundles
            .iter()
            .all(|b| seen.insert((b.terminals.as_slice(), b.label)))
    }

    /// Every (terminal sequence, letter) pair has a bundle.
    pub fn is_cocomplete(&self) -> bool {
        let seen: std::collections::HashSet<(&[StateId], Letter)> = self
            .bundles
            .iter()
            .map(|b| (b.terminals.as_slice(), b.label))
            .collect();
        let n = self.num_states() as u128;
        let tuples = n.checked_pow(self.arity() as u32).unwrap_or(u128::MAX);
        seen.len() as u128 == tuples.saturating_mul(self.alphabet.len() as u128)
    }

    /// The product automaton on `S1 × S2`; it presents the intersection of the two shifts.
    /// The pair `(i, j)` gets id `i * |S2| + j` and name `(name_i,name_j)`.
    pub fn join(&self, other: &Automaton) -> Result<Automaton> {
        self.check_compatible(other)?;
        let n2 = other.num_states();
        let states = self
            .states
            .iter()
            .flat_map(|a| other.states.iter().map(move |b| format!("({a},{b})")))
            .collect();
        let mut bundles = Vec::new();
        for a in self.alphabet.letters() {
            for b1 in self.bundles_labeled(a) {
                for b2 in other.bundles_labeled(a) {
                    let terminals = b1
                        .terminals
                        .iter()
                        .zip(&b2.terminals)
                        .map(|(&x, &y)| x * n2 + y)
                        .collect();
                    bundles.push(Bundle::new(b1.source * n2 + b2.source, a, terminals));
                }
            }
        }
        bundles.sort();
        Ok(Self::from_sorted(
            self.signature,
            self.alphabet.clone(),
            states,
            bundles,
        ))
    }

    /// Successor lists of the graph with an edge `s → t_σ(b)` for every bundle `b` from `s`.
    fn successor_graph(&self) -> Vec<Vec<StateId>> {
        let mut succ = vec![Vec::new(); self.num_states()];
        for b in &self.bundles {
            succ[b.source].extend(b.terminals.iter().copied());
        }
        for v in &mut succ {
            v.sort_unstable();
            v.dedup();
        }
        succ
    }

    /// Every state reaches every other state by a bundle path.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.num_states();
        if n == 0 {
            return true;
        }
        let succ = self.successor_graph();
        let mut pred = vec![Vec::new(); n];
        for (s, ts) in succ.iter().enumerate() {
            for &t in ts {
                pred[t].push(s);
            }
        }
        reach_all(&succ, 0) && reach_all(&pred, 0)
    }

    /// A shortest bundle path from `from` to `to`, as `(bundle index, direction)` steps.
    /// Ties are broken by bundle index, then direction.
    pub fn shortest_bundle_path(&self, from: StateId, to: StateId) -> Option<Vec<(usize, usize)>> {
        let n = self.num_states();
        let mut prev: Vec<Option<(StateId, usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            if s == to {
                let mut path = Vec::new();
                let mut cur = s;
                while cur != from {
                    let (p, b, d) = prev[cur].expect("visited");
                    path.push((b, d));
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &bi in &self.from_source[s] {
                for (d, &t) in self.bundles[bi].terminals.iter().enumerate() {
                    if !seen[t] {
                        seen[t] = true;
                        prev[t] = Some((s, bi, d));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// Index of each `(terminals, label)` pair, for co-deterministic lookups.
    pub(crate) fn terminal_index(&self) -> HashMap<(Vec<StateId>, Letter), Vec<usize>> {
        let mut idx: HashMap<(Vec<StateId>, Letter), Vec<usize>> = HashMap::new();
        for (i, b) in self.bundles.iter().enumerate() {
            idx.entry((b.terminals.clone(), b.label))
                .or_default()
                .push(i);
        }
        idx
    }

    /// Every block of size `n` accepted by this automaton, sorted.
    pub fn accepted_blocks(&self, n: usize) -> Result<Vec<Pattern>> {
        if n == 0 {
            return Err(Error::ZeroHeight);
        }
        // rooted[s] = blocks of the current size accepted with root state s
        let mut rooted: Vec<Vec<Pattern>> = (0..self.num_states())
            .map(|s| {
                let mut v: Vec<Pattern> = self
                    .bundles_from(s)
                    .map(|b| Pattern::leaf(b.label))
                    .collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        for _ in 1..n {
            let next = (0..self.num_states())
                .map(|s| {
                    let mut v = Vec::new();
                    for b in self.bundles_from(s) {
                        let choices: Vec<Vec<Pattern>> =
                            b.terminals.iter().map(|&t| rooted[t].clone()).collect();
                        for children in crate::tree::product(&choices) {
                            v.push(Pattern::node(b.label, children));
                        }
                    }
                    v.sort();
                    v.dedup();
                    v
                })
                .collect();
            rooted = next;
        }
        let mut all: Vec<Pattern> = rooted.into_iter().flatten().collect();
        all.sort();
        all.dedup();
        Ok(all)
    }
}

fn reach_all(graph: &[Vec<StateId>], start: StateId) -> bool {
    let mut seen = vec![false; graph.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        for &t in &graph[s] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen.iter().all(|&x| x)
}

#[derive(Debug, Clone)]
pub(crate) struct Possible {
    pub set: Vec<bool>,
    pub children: Vec<Possible>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::tree::{enumerate_patterns, Word};

    pub fn l(i: usize) -> Letter {
        Letter(i)
    }

    pub fn leaf(i: usize) -> Pattern {
        Pattern::leaf(Letter(i))
    }

    pub fn node(i: usize, children: Vec<Pattern>) -> Pattern {
        Pattern::node(Letter(i), children)
    }

    pub fn aut(
        k: usize,
        letters: &[&str],
        states: &[&str],
        bundles: &[(usize, usize, &[usize])],
    ) -> Automaton {
        Automaton::new(
            TreeSignature::new(k).unwrap(),
            Alphabet::new(letters.iter().copied()).unwrap(),
            states.iter().map(|s| s.to_string()).collect(),
            bundles
                .iter()
                .map(|&(s, a, t)| Bundle::new(s, Letter(a), t.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    pub fn monochromatic() -> Automaton {
        aut(
            2,
            &["a", "b"],
            &["a", "b"],
            &[
                (0, 0, &[0, 0]),
                (0, 0, &[1, 1]),
                (1, 1, &[0, 0]),
                (1, 1, &[1, 1]),
            ],
        )
    }

    pub fn even_sum() -> Automaton {
        aut(
            2,
            &["0", "1"],
            &["0", "1"],
            &[
                (0, 0, &[0, 0]),
                (0, 0, &[1, 1]),
                (1, 1, &[0, 1]),
                (1, 1, &[1, 0]),
            ],
        )
    }

    pub fn golden() -> Automaton {
        aut(
            1,
            &["0", "1"],
            &["0", "1"],
            &[(0, 0, &[0]), (0, 0, &[1]), (1, 1, &[0])],
        )
    }

    pub fn even() -> Automaton {
        aut(
            1,
            &["0", "1"],
            &["0", "1"],
            &[(0, 1, &[0]), (0, 0, &[1]), (1, 0, &[0])],
        )
    }

    #[test]
    fn membership_examples() {
        let m = monochromatic();
        assert!(m.accepts(&node(0, vec![leaf(0), leaf(0)])).unwrap());
        assert!(!m.accepts(&node(0, vec![leaf(0), leaf(1)])).unwrap());
        let e = even_sum();
        assert!(e.accepts(&node(0, vec![leaf(1), leaf(1)])).unwrap());
        assert!(!e.accepts(&node(0, vec![leaf(0), leaf(1)])).unwrap());
    }

    #[test]
    fn witness_run_is_valid() {
        let e = even_sum();
        let p = node(0, vec![node(1, vec![leaf(0), leaf(1)]), leaf(1)]);
        let run = e.accepting_run(&p).unwrap().unwrap();
        assert!(e.is_run_for(&p, &run));
        assert_eq!(run.state, 0);
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        assert_eq!(golden().accepts(&leaf(2)), Err(Error::AlphabetMismatch));
        assert!(matches!(
            golden().accepts(&node(0, vec![leaf(0), leaf(0)])),
            Err(Error::WrongArity { .. })
        ));
    }

    #[test]
    fn essentialize_examples() {
        let m = monochromatic();
        assert_eq!(m.essentialize(), m);
        let lonely = aut(1, &["a"], &["s"], &[]);
        assert!(lonely.essentialize().is_empty());
        let sink = aut(
            2,
            &["a", "b"],
            &["s", "d"],
            &[(0, 0, &[0, 0]), (0, 1, &[1, 1])],
        );
        let e = sink.essentialize();
        assert_eq!(e.states(), &["s".to_string()]);
        assert_eq!(e.bundles(), &[Bundle::new(0, l(0), vec![0, 0])]);
        assert_eq!(e.essentialize(), e);
    }

    #[test]
    fn determinism_checks() {
        let m = monochromatic();
        assert!(!m.is_deterministic());
        assert!(m.is_codeterministic());
        assert!(!m.is_cocomplete());
        let full = Automaton::full_shift(
            TreeSignature::new(2).unwrap(),
            Alphabet::new(["a", "b"]).unwrap(),
        );
        assert!(full.is_deterministic() && full.is_codeterministic() && full.is_cocomplete());
    }

    #[test]
    fn join_examples() {
        let m = monochromatic();
        let j = m.join(&m).unwrap();
        assert_eq!(j.num_states(), 4);
        let diag: Vec<bool> = (0..4).map(|i| i / 2 == i % 2).collect();
        let (d, _) = j.restrict_states(&diag);
        assert_eq!(d.bundles().len(), m.bundles().len());
        let full = Automaton::full_shift(m.signature(), m.alphabet().clone());
        let fj = full.join(&m).unwrap();
        assert_eq!(fj.bundles().len(), m.bundles().len());
        assert_eq!(
            golden().join(&monochromatic()),
            Err(Error::SignatureMismatch)
        );
    }

    #[test]
    fn strong_connectivity_examples() {
        let full = Automaton::full_shift(
            TreeSignature::new(2).unwrap(),
            Alphabet::new(["a"]).unwrap(),
        );
        assert!(full.is_strongly_connected());
        assert!(monochromatic().is_strongly_connected());
        let sink = aut(
            2,
            &["a", "b"],
            &["s", "d"],
            &[(0, 0, &[0, 0]), (0, 1, &[1, 1])],
        );
        assert!(!sink.is_strongly_connected());
        assert_eq!(
            monochromatic().shortest_bundle_path(0, 1),
            Some(vec![(1, 0)])
        );
        assert_eq!(monochromatic().shortest_bundle_path(0, 0), Some(vec![]));
    }

    #[test]
    fn accepted_blocks_golden() {
        let blocks = golden().accepted_blocks(2).unwrap();
        let words: Vec<Vec<Letter>> = blocks.iter().map(|p| p.preorder()).collect();
        assert_eq!(
            words,
            vec![vec![l(0), l(0)], vec![l(0), l(1)], vec![l(1), l(0)]]
        );
    }

    #[test]
    fn essentialize_preserves_acceptance() {
        let sink = aut(
            2,
            &["a", "b"],
            &["s", "d", "e"],
            &[
                (0, 0, &[0, 0]),
                (0, 1, &[1, 2]),
                (2, 0, &[1, 1]),
                (2, 1, &[0, 2]),
            ],
        );
        let e = sink.essentialize();
        let sig = sink.signature();
        // accepted patterns of the essential part are accepted by the original
        for p in enumerate_patterns(sig, sink.alphabet(), 3).unwrap() {
            if e.accepts(&p).unwrap() {
                assert!(sink.accepts(&p).unwrap());
            }
        }
        let _ = Word::root();
    }
}
