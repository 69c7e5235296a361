//! Finite-tree automata: subset construction, complementation and emptiness.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::rabin::{Automaton, Bundle, Run, StateId};
use crate::tree::{count_patterns, enumerate_patterns, product, Pattern};

/// An automaton with initial states `ℐ` and a final state `F`. A full-tree-pattern is
/// accepted when some run maps the root into `ℐ` and every vertex just below the pattern
/// to `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTreeAutomaton {
    base: Automaton,
    initial: BTreeSet<StateId>,
    final_state: StateId,
}

impl FiniteTreeAutomaton {
    pub fn new(
        base: Automaton,
        initial: impl IntoIterator<Item = StateId>,
        final_state: StateId,
    ) -> Result<Self> {
        let initial: BTreeSet<StateId> = initial.into_iter().collect();
        let n = base.num_states();
        if let Some(&bad) = initial
            .iter()
            .chain(std::iter::once(&final_state))
            .find(|&&s| s >= n)
        {
            return Err(Error::StateOutOfRange(bad));
        }
        Ok(FiniteTreeAutomaton {
            base,
            initial,
            final_state,
        })
    }

    pub fn base(&self) -> &Automaton {
        &self.base
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    fn final_set(&self) -> Vec<bool> {
        let mut v = vec![false; self.base.num_states()];
        v[self.final_state] = true;
        v
    }

    pub fn accepts(&self, p: &Pattern) -> Result<bool> {
        Ok(self.accepting_run(p)?.is_some())
    }

    /// An accepting run, choosing the lowest possible initial state.
    pub fn accepting_run(&self, p: &Pattern) -> Result<Option<Run>> {
        self.base.check_pattern(p)?;
        let leaves = self.final_set();
        let poss = self.base.possible(p, &leaves);
        let root = self.initial.iter().copied().find(|&s| poss.set[s]);
        Ok(root.map(|s| self.base.extract_run(p, &poss, s, &leaves)))
    }

    /// The complement automaton: a sink `K` collects every missing `(terminals, letter)`
    /// pair, making the result co-complete while keeping it co-deterministic. Initial
    /// states become `(S ∖ ℐ) ∪ {K}`.
    pub fn complement(&self) -> Result<FiniteTreeAutomaton> {
        if !self.base.is_codeterministic() {
            return Err(Error::NotCodeterministic);
        }
        let a = &self.base;
        let n = a.num_states();
        let mut sink = "K".to_string();
        while a.state_index(&sink).is_some() {
            sink.push('\'');
        }
        let mut states = a.states().to_vec();
        states.push(sink);
        let present: std::collections::HashSet<(&[StateId], usize)> = a
            .bundles()
            .iter()
            .map(|b| (b.terminals.as_slice(), b.label.0))
            .collect();
        let mut bundles = a.bundles().to_vec();
        let all: Vec<StateId> = (0..=n).collect();
        for tuple in product(&vec![all; a.arity()]) {
            for letter in a.alphabet().letters() {
                if !present.contains(&(tuple.as_slice(), letter.0)) {
                    bundles.push(Bundle::new(n, letter, tuple.clone()));
                }
            }
        }
        let base = Automaton::new(a.signature(), a.alphabet().clone(), states, bundles)?;
        let initial = (0..n)
            .filter(|s| !self.initial.contains(s))
            .chain(std::iter::once(n));
        FiniteTreeAutomaton::new(base, initial, self.final_state)
    }

    /// For every state, the height of the shortest pattern rooted there (with leaves
    /// below mapped to `F`) and the bundle certifying it.
    fn productive(&self) -> Vec<Option<(usize, usize)>> {
        let a = &self.base;
        let n = a.num_states();
        let mut cert: Vec<Option<(usize, usize)>> = vec![None; n];
        for (i, b) in a.bundles().iter().enumerate() {
            if cert[b.source].is_none() && b.terminals.iter().all(|&t| t == self.final_state) {
                cert[b.source] = Some((1, i));
            }
        }
        let mut height = 1;
        loop {
            height += 1;
            let mut changed = false;
            let mut next = cert.clone();
            for (i, b) in a.bundles().iter().enumerate() {
                if next[b.source].is_none() && b.terminals.iter().all(|&t| cert[t].is_some()) {
                    next[b.source] = Some((height, i));
                    changed = true;
                }
            }
            cert = next;
            if !changed {
                return cert;
            }
        }
    }

    /// Whether no pattern is accepted, by the productive-state fixpoint.
    pub fn is_empty(&self) -> bool {
        let cert = self.productive();
        self.initial.iter().all(|&s| cert[s].is_none())
    }

    /// A shortest accepted pattern, of height at most the number of states.
    pub fn witness(&self) -> Option<Pattern> {
        let cert = self.productive();
        let root = self
            .initial
            .iter()
            .copied()
            .filter_map(|s| cert[s].map(|(h, _)| (h, s)))
            .min()?
            .1;
        fn build(a: &Automaton, cert: &[Option<(usize, usize)>], s: StateId) -> Pattern {
            let (h, bi) = cert[s].expect("productive");
            let b = &a.bundles()[bi];
            if h == 1 {
                Pattern::leaf(b.label)
            } else {
                Pattern::node(
                    b.label,
                    b.terminals.iter().map(|&t| build(a, cert, t)).collect(),
                )
            }
        }
        Some(build(&self.base, &cert, root))
    }

    /// Emptiness by scanning every pattern of height at most `max(|S|, 1)`, refusing to
    /// scan more than `limit` patterns. Returns the first accepted pattern.
    pub fn brute_force_witness(&self, limit: u128) -> Result<Option<Pattern>> {
        let a = &self.base;
        let h = a.num_states().max(1);
        let count = count_patterns(a.signature(), a.alphabet().len(), h);
        if count > limit {
            return Err(Error::ResourceLimit { limit });
        }
        for p in enumerate_patterns(a.signature(), a.alphabet(), h)? {
            if self.accepts(&p)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

/// Subset construction restricted to the subsets met bottom-up, starting from the full
/// state set. Returns the subsets in creation order and the bundles between them.
fn subset_closure(a: &Automaton) -> (Vec<Vec<StateId>>, Vec<Bundle>) {
    let full: Vec<StateId> = (0..a.num_states()).collect();
    let mut subsets = vec![full];
    let mut index: HashMap<Vec<StateId>, usize> = HashMap::new();
    index.insert(subsets[0].clone(), 0);
    if a.num_states() == 0 {
        return (subsets, Vec::new());
    }
    let mut bundles = Vec::new();
    let mut done = 0;
    while done < subsets.len() {
        let total = subsets.len();
        // every tuple with at least one entry among the subsets added in the last round
        let members: Vec<Vec<bool>> = subsets
            .iter()
            .map(|s| {
                let mut m = vec![false; a.num_states()];
                s.iter().for_each(|&x| m[x] = true);
                m
            })
            .collect();
        let ids: Vec<usize> = (0..total).collect();
        for tuple in product(&vec![ids; a.arity()]) {
            if tuple.iter().all(|&i| i < done) {
                continue;
            }
            for letter in a.alphabet().letters() {
                let mut sources: Vec<StateId> = a
                    .bundles_labeled(letter)
                    .filter(|b| b.terminals.iter().zip(&tuple).all(|(&t, &i)| members[i][t]))
                    .map(|b| b.source)
                    .collect();
                sources.sort_unstable();
                sources.dedup();
                if sources.is_empty() {
                    continue;
                }
                let id = match index.get(&sources) {
                    Some(&id) => id,
                    None => {
                        subsets.push(sources.clone());
                        index.insert(sources, subsets.len() - 1);
                        subsets.len() - 1
                    }
                };
                bundles.push(Bundle::new(id, letter, tuple.clone()));
            }
        }
        done = total;
    }
    (subsets, bundles)
}

fn subset_automaton(a: &Automaton) -> Automaton {
    let (subsets, bundles) = subset_closure(a);
    let names = subsets
        .iter()
        .map(|s| {
            format!(
                "{{{}}}",
                s.iter()
                    .map(|&x| a.state_name(x))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    Automaton::new(a.signature(), a.alphabet().clone(), names, bundles)
        .expect("subset bundles are well formed")
}

/// A co-deterministic essential automaton presenting the same shift.
pub fn codeterminize(a: &Automaton) -> Automaton {
    subset_automaton(&a.essentialize()).essentialize()
}

/// The finite-tree automaton recognizing the full-tree-patterns of the shift presented
/// by `a`: the subset automaton with every subset initial and the full set final.
pub fn full_pattern_fta(a: &Automaton) -> FiniteTreeAutomaton {
    let base = subset_automaton(&a.essentialize());
    let n = base.num_states();
    FiniteTreeAutomaton::new(base, 0..n, 0).expect("the full set is state 0")
}

/// The finite-tree automaton recognizing the full-tree-patterns outside the shift.
pub fn complement_of_shift(a: &Automaton) -> FiniteTreeAutomaton {
    full_pattern_fta(a)
        .complement()
        .expect("subset automata are co-deterministic")
}
