//! Cellular automata between tree shifts and their image automata.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rabin::Automaton;
use crate::sft::{BlockGraph, SftSpec};
use crate::text::format_pattern;
use crate::tree::{Alphabet, Letter, Pattern, TreeSignature};

/// A cellular automaton `τ(f)(w) = μ(f^w|Δ_n)` defined on a shift of finite type.
///
/// The local table covers exactly the blocks of size `n` of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellularAutomaton {
    domain: SftSpec,
    target: Alphabet,
    memory: usize,
    table: BTreeMap<Pattern, Letter>,
}

impl CellularAutomaton {
    /// Builds a cellular automaton from explicit rules. Rules for blocks that do not
    /// occur in the domain are dropped; a missing domain block is an error.
    pub fn new(
        domain: SftSpec,
        target: Alphabet,
        memory: usize,
        rules: impl IntoIterator<Item = (Pattern, Letter)>,
    ) -> Result<Self> {
        if memory == 0 {
            return Err(Error::ZeroHeight);
        }
        let sig = domain.signature();
        let mut given = BTreeMap::new();
        for (p, b) in rules {
            p.check(sig, domain.alphabet().len())?;
            if p.block_size() != Some(memory) {
                return Err(Error::NotABlock);
            }
            if b.0 >= target.len() {
                return Err(Error::LetterOutOfRange(b.0));
            }
            given.insert(p, b);
        }
        let mut table = BTreeMap::new();
        for p in domain.blocks(memory)? {
            match given.get(&p) {
                Some(&b) => {
                    table.insert(p, b);
                }
                None => return Err(Error::MissingRule(format_pattern(&p, domain.alphabet()))),
            }
        }
        Ok(CellularAutomaton {
            domain,
            target,
            memory,
            table,
        })
    }

    /// The table `p ↦ rule(p)` over every domain block of size `memory`.
    pub fn from_fn(
        domain: SftSpec,
        target: Alphabet,
        memory: usize,
        rule: impl Fn(&Pattern) -> Letter,
    ) -> Result<Self> {
        if memory == 0 {
            return Err(Error::ZeroHeight);
        }
        let mut table = BTreeMap::new();
        for p in domain.blocks(memory)? {
            let b = rule(&p);
            if b.0 >= target.len() {
                return Err(Error::LetterOutOfRange(b.0));
            }
            table.insert(p, b);
        }
        Ok(CellularAutomaton {
            domain,
            target,
            memory,
            table,
        })
    }

    /// The identity map of a shift of finite type.
    pub fn identity(domain: SftSpec) -> Result<Self> {
        let target = domain.alphabet().clone();
        Self::from_fn(domain, target, 1, |p| p.label())
    }

    pub fn signature(&self) -> TreeSignature {
        self.domain.signature()
    }

    pub fn domain(&self) -> &SftSpec {
        &self.domain
    }

    pub fn source(&self) -> &Alphabet {
        self.domain.alphabet()
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn table(&self) -> &BTreeMap<Pattern, Letter> {
        &self.table
    }

    pub fn rule(&self, block: &Pattern) -> Option<Letter> {
        self.table.get(block).copied()
    }

    /// Applies the local rule at every vertex of `Δ_m` of a block on `Δ_{m+n-1}`.
    pub fn apply_to_pattern(&self, p: &Pattern) -> Result<Pattern> {
        p.check(self.signature(), self.source().len())?;
        let size = p.block_size().ok_or(Error::NotABlock)?;
        if size < self.memory {
            return Err(Error::NotABlock);
        }
        let m = size + 1 - self.memory;
        let window = self.signature().delta(self.memory)?;
        let out_shape = self.signature().delta(m)?;
        let mut failure = None;
        let q = Pattern::from_shape(&out_shape, |w| {
            let sub = p
                .subpattern(w, &window)
                .expect("window fits inside the block");
            match self.table.get(&sub) {
                Some(&b) => b,
                None => {
                    failure.get_or_insert_with(|| format_pattern(&sub, self.source()));
                    Letter(0)
                }
            }
        });
        match failure {
            Some(block) => Err(Error::OutsideDomain(block)),
            None => Ok(q),
        }
    }

    /// The higher-block automaton presenting the image `τ(X)`.
    ///
    /// States are the domain blocks on `Δ_{N-1}` with `N = max(n, memory of X, 2)`; a bundle
    /// is a domain block on `Δ_N` labeled by the rule applied to its restriction to `Δ_n`.
    pub fn image_automaton(&self) -> Result<Automaton> {
        let n = self.memory.max(self.domain.memory()).max(2);
        let graph = BlockGraph::build(&self.domain, n);
        graph.into_automaton(
            self.signature(),
            self.source(),
            self.target.clone(),
            |glued| {
                let window = glued.restrict(self.memory).expect("n <= N");
                self.table
                    .get(&window)
                    .copied()
                    .ok_or_else(|| Error::MissingRule(format_pattern(&window, self.source())))
            },
        )
    }

    /// The composite `τ ∘ prior`, where `prior` is a one-cell relabeling whose image lies
    /// in the domain of `τ`.
    pub fn compose_relabel(&self, prior: &CellularAutomaton) -> Result<CellularAutomaton> {
        if prior.memory != 1 {
            return Err(Error::NotABlock);
        }
        if prior.signature() != self.signature() {
            return Err(Error::SignatureMismatch);
        }
        if prior.target != *self.source() {
            return Err(Error::AlphabetMismatch);
        }
        let relabel = |a: Letter| prior.table[&Pattern::leaf(a)];
        let mut table = BTreeMap::new();
        for z in prior.domain.blocks(self.memory)? {
            let image = z.map_labels(&relabel);
            let b = self
                .table
                .get(&image)
                .copied()
                .ok_or_else(|| Error::OutsideDomain(format_pattern(&image, self.source())))?;
            table.insert(z, b);
        }
        Ok(CellularAutomaton {
            domain: prior.domain.clone(),
            target: self.target.clone(),
            memory: self.memory,
            table,
        })
    }
}

/// The bundle shift of an essential automaton and its labeling map.
///
/// The domain is the shift of finite type over the bundle alphabet `b0, b1, ..` in which
/// the bundle at a vertex must end, in every direction, where the bundle at that child
/// begins. The one-cell map sends a bundle to its label; its image is the shift presented
/// by the automaton.
pub fn sft_cover(a: &Automaton) -> Result<(SftSpec, CellularAutomaton)> {
    if !a.is_essential() {
        return Err(Error::NotEssential);
    }
    let sig = a.signature();
    let bundles = a.bundles();
    if bundles.is_empty() {
        let alphabet = Alphabet::new(["void"])?;
        let z = SftSpec::normalize(sig, alphabet, &[Pattern::leaf(Letter(0))])?;
        let tau = CellularAutomaton {
            domain: z.clone(),
            target: a.alphabet().clone(),
            memory: 1,
            table: BTreeMap::new(),
        };
        return Ok((z, tau));
    }
    let alphabet = Alphabet::new((0..bundles.len()).map(|i| format!("b{i}")))?;
    let forbidden: Vec<Pattern> = crate::tree::all_blocks(sig, bundles.len(), 2)?
        .filter(|p| {
            let root = &bundles[p.label().0];
            p.children()
                .iter()
                .zip(&root.terminals)
                .any(|(c, &t)| bundles[c.label().0].source != t)
        })
        .collect();
    let z = SftSpec::with_memory(sig, alphabet, 2, &forbidden)?;
    let table = (0..bundles.len())
        .map(|i| (Pattern::leaf(Letter(i)), bundles[i].label))
        .collect();
    let tau = CellularAutomaton {
        domain: z.clone(),
        target: a.alphabet().clone(),
        memory: 1,
        table,
    };
    Ok((z, tau))
}
