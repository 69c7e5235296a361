//! Shifts of finite type given by forbidden blocks, and their higher-block presentations.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::rabin::{Automaton, Bundle};
use crate::text::block_name;
use crate::tree::{extend_blocks, product, Alphabet, Letter, Pattern, TreeSignature};

/// A shift of finite type: configurations in which no forbidden block occurs. All
/// forbidden blocks live on `Δ_memory`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    signature: TreeSignature,
    alphabet: Alphabet,
    memory: usize,
    forbidden: BTreeSet<Pattern>,
}

impl SftSpec {
    /// Extends a mixed-size set of forbidden blocks to the largest block size.
    pub fn normalize(
        signature: TreeSignature,
        alphabet: Alphabet,
        raw: &[Pattern],
    ) -> Result<Self> {
        Self::with_memory(signature, alphabet, 1, raw)
    }

    /// Like [`SftSpec::normalize`], with memory at least `memory`.
    pub fn with_memory(
        signature: TreeSignature,
        alphabet: Alphabet,
        memory: usize,
        raw: &[Pattern],
    ) -> Result<Self> {
        if memory == 0 {
            return Err(Error::ZeroHeight);
        }
        let mut forbidden = extend_blocks(signature, &alphabet, raw)?;
        let current = forbidden
            .iter()
            .next()
            .and_then(Pattern::block_size)
            .unwrap_or(1);
        let memory = memory.max(current);
        if current < memory {
            forbidden = forbidden
                .iter()
                .flat_map(|p| {
                    crate::tree::extensions(signature, alphabet.len(), p, current, memory)
                })
                .collect();
        }
        Ok(SftSpec {
            signature,
            alphabet,
            memory,
            forbidden,
        })
    }

    pub fn full_shift(signature: TreeSignature, alphabet: Alphabet) -> Self {
        SftSpec {
            signature,
            alphabet,
            memory: 1,
            forbidden: BTreeSet::new(),
        }
    }

    pub fn signature(&self) -> TreeSignature {
        self.signature
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn forbidden(&self) -> &BTreeSet<Pattern> {
        &self.forbidden
    }

    /// The same shift described with forbidden blocks on `Δ_m`, `m ≥ memory`.
    pub fn lift(&self, m: usize) -> SftSpec {
        if m <= self.memory {
            return self.clone();
        }
        let forbidden = self
            .forbidden
            .iter()
            .flat_map(|p| {
                crate::tree::extensions(self.signature, self.alphabet.len(), p, self.memory, m)
            })
            .collect();
        SftSpec {
            signature: self.signature,
            alphabet: self.alphabet.clone(),
            memory: m,
            forbidden,
        }
    }

    /// True when no forbidden block occurs anywhere inside `p`.
    pub fn avoids(&self, p: &Pattern) -> bool {
        let shape = self
            .signature
            .delta(self.memory)
            .expect("memory is positive");
        p.shape()
            .words()
            .iter()
            .all(|w| match p.subpattern(w, &shape) {
                Ok(sub) => !self.forbidden.contains(&sub),
                Err(_) => true,
            })
    }

    /// The co-deterministic higher-block presentation, essentialized.
    ///
    /// States are the blocks on `Δ_{N-1}` with `N = max(memory, 2)` that extend to a
    /// configuration of the shift; a bundle is an allowed block on `Δ_N`, going from its
    /// restriction to `Δ_{N-1}` to the sub-blocks rooted at the children and labeled by
    /// its root letter.
    pub fn presentation(&self) -> Automaton {
        let n = self.memory.max(2);
        let graph = BlockGraph::build(self, n);
        graph
            .into_automaton(self.signature, &self.alphabet, self.alphabet.clone(), |p| {
                Ok(p.label())
            })
            .expect("root labels are always defined")
    }

    /// The blocks on `Δ_n` that occur in some configuration of the shift.
    pub fn blocks(&self, n: usize) -> Result<Vec<Pattern>> {
        self.presentation().accepted_blocks(n)
    }
}

/// Blocks on `Δ_n` avoiding `forbidden` (all on `Δ_m`) at every vertex where they fit.
pub(crate) fn avoiding_blocks(
    sig: TreeSignature,
    alphabet_len: usize,
    forbidden: &BTreeSet<Pattern>,
    m: usize,
    n: usize,
) -> Vec<Pattern> {
    if n == 1 {
        return (0..alphabet_len)
            .map(|a| Pattern::leaf(Letter(a)))
            .filter(|p| m > 1 || !forbidden.contains(p))
            .collect();
    }
    let below = avoiding_blocks(sig, alphabet_len, forbidden, m, n - 1);
    let tuples = product(&vec![below; sig.arity()]);
    let mut out = Vec::new();
    for a in 0..alphabet_len {
        for children in &tuples {
            let p = Pattern::node(Letter(a), children.clone());
            let ok = n < m || !forbidden.contains(&p.restrict(m).expect("n >= m"));
            if ok {
                out.push(p);
            }
        }
    }
    out
}

/// The essential part of the higher-block graph of a shift of finite type on `Δ_n`
/// blocks: states are `Δ_{n-1}` blocks, edges are the glued `Δ_n` blocks.
pub(crate) struct BlockGraph {
    pub states: Vec<Pattern>,
    pub edges: Vec<(usize, Pattern, Vec<usize>)>,
}

impl BlockGraph {
    pub fn build(x: &SftSpec, n: usize) -> BlockGraph {
        debug_assert!(n >= 2 && n >= x.memory);
        let sig = x.signature;
        let q = x.alphabet.len();
        let states = avoiding_blocks(sig, q, &x.forbidden, x.memory, n - 1);
        let index: HashMap<&Pattern, usize> =
            states.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut edges = Vec::new();
        for glued in avoiding_blocks(sig, q, &x.forbidden, x.memory, n) {
            let source = index[&glued.restrict(n - 1).expect("n >= 2")];
            let terminals: Vec<usize> = glued.children().iter().map(|c| index[c]).collect();
            edges.push((source, glued, terminals));
        }
        drop(index);
        // remove dead states until stable
        let mut alive = vec![true; states.len()];
        loop {
            let mut next = vec![false; states.len()];
            for (s, _, ts) in &edges {
                if alive[*s] && ts.iter().all(|&t| alive[t]) {
                    next[*s] = true;
                }
            }
            if next == alive {
                break;
            }
            alive = next;
        }
        let mut map = vec![usize::MAX; states.len()];
        let mut kept = Vec::new();
        for (i, p) in states.into_iter().enumerate() {
            if alive[i] {
                map[i] = kept.len();
                kept.push(p);
            }
        }
        let edges = edges
            .into_iter()
            .filter(|(s, _, ts)| alive[*s] && ts.iter().all(|&t| alive[t]))
            .map(|(s, g, ts)| (map[s], g, ts.iter().map(|&t| map[t]).collect()))
            .collect();
        BlockGraph {
            states: kept,
            edges,
        }
    }

    /// Labels every edge with `label(glued block)`.
    pub fn into_automaton(
        self,
        sig: TreeSignature,
        state_alphabet: &Alphabet,
        out: Alphabet,
        label: impl Fn(&Pattern) -> Result<Letter>,
    ) -> Result<Automaton> {
        let names = self
            .states
            .iter()
            .map(|p| block_name(p, state_alphabet, sig.arity()))
            .collect();
        let bundles = self
            .edges
            .iter()
            .map(|(s, g, ts)| Ok(Bundle::new(*s, label(g)?, ts.clone())))
            .collect::<Result<Vec<_>>>()?;
        Automaton::new(sig, out, names, bundles)
    }
}
