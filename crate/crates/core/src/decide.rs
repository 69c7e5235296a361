//! Decision procedures: shift equality, fullness, surjectivity and injectivity of
//! cellular automata.

use std::collections::HashMap;
use std::fmt;

use crate::cellular::{sft_cover, CellularAutomaton};
use crate::error::{Error, Result};
use crate::fta::{complement_of_shift, FiniteTreeAutomaton};
use crate::rabin::{Automaton, StateId};
use crate::text::format_pattern;
use crate::tree::{product, Letter, Pattern};

/// Which side of a comparison a separating pattern belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The pattern occurs in the first shift only.
    First,
    /// The pattern occurs in the second shift only.
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A full-tree-pattern found in exactly one of the compared shifts.
    Pattern { pattern: Pattern, side: Side },
    /// A surviving nondiagonal state of the self-join of an image automaton.
    StatePair(String, String),
}

/// The answer of a decision procedure, with a witness when the answer is negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Witness>,
    /// Sizes of the intermediate automata, in construction order.
    pub stats: Vec<(&'static str, usize)>,
}

impl Verdict {
    fn yes(stats: Vec<(&'static str, usize)>) -> Self {
        Verdict {
            answer: true,
            witness: None,
            stats,
        }
    }

    fn no(witness: Witness, stats: Vec<(&'static str, usize)>) -> Self {
        Verdict {
            answer: false,
            witness: Some(witness),
            stats,
        }
    }

    pub fn pattern(&self) -> Option<&Pattern> {
        match &self.witness {
            Some(Witness::Pattern { pattern, .. }) => Some(pattern),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.answer { "yes" } else { "no" })
    }
}

fn check_same_kind(a1: &Automaton, a2: &Automaton) -> Result<()> {
    if a1.signature() != a2.signature() {
        return Err(Error::SignatureMismatch);
    }
    if a1.alphabet() != a2.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    Ok(())
}

/// How a pair state of the product was first reached.
#[derive(Clone)]
enum Cert {
    Leaf(Letter),
    Node(Letter, Vec<usize>),
}

/// Whether two automata present the same shift.
///
/// Both complements are co-deterministic and co-complete, so every pattern has exactly
/// one run in each, and the root pair of the product run tells on which sides the
/// pattern lies. Pairs are explored bottom-up from the final pair, height by height,
/// stopping at the first pair that separates the shifts.
pub fn equal_shifts(a1: &Automaton, a2: &Automaton) -> Result<Verdict> {
    check_same_kind(a1, a2)?;
    let c1 = complement_of_shift(a1);
    let c2 = complement_of_shift(a2);
    let stats = vec![
        ("complement 1", c1.base().num_states()),
        ("complement 2", c2.base().num_states()),
    ];
    let k1 = *c1.initial().iter().next().expect("complement has a sink");
    let k2 = *c2.initial().iter().next().expect("complement has a sink");
    let t1 = c1.base().terminal_index();
    let t2 = c2.base().terminal_index();
    let sig = a1.signature();
    let letters: Vec<Letter> = a1.alphabet().letters().collect();

    let step = |ts1: Vec<StateId>, ts2: Vec<StateId>, a: Letter| -> (StateId, StateId) {
        let s1 = c1.base().bundles()[t1[&(ts1, a)][0]].source;
        let s2 = c2.base().bundles()[t2[&(ts2, a)][0]].source;
        (s1, s2)
    };

    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut certs: Vec<Cert> = Vec::new();
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let separates = |(s1, s2): (StateId, StateId)| -> Option<Side> {
        if s1 != k1 && s2 == k2 {
            Some(Side::First)
        } else if s1 == k1 && s2 != k2 {
            Some(Side::Second)
        } else {
            None
        }
    };

    let mut found = None;
    let f1 = c1.final_state();
    let f2 = c2.final_state();
    for &a in &letters {
        let pair = step(vec![f1; sig.arity()], vec![f2; sig.arity()], a);
        if let std::collections::hash_map::Entry::Vacant(e) = index.entry(pair) {
            e.insert(pairs.len());
            pairs.push(pair);
            certs.push(Cert::Leaf(a));
            if found.is_none() {
                found = separates(pair).map(|side| (pairs.len() - 1, side));
            }
        }
    }
    let mut done = 0;
    while found.is_none() && done < pairs.len() {
        let total = pairs.len();
        let ids: Vec<usize> = (0..total).collect();
        'outer: for tuple in product(&vec![ids; sig.arity()]) {
            if tuple.iter().all(|&i| i < done) {
                continue;
            }
            let ts1: Vec<StateId> = tuple.iter().map(|&i| pairs[i].0).collect();
            let ts2: Vec<StateId> = tuple.iter().map(|&i| pairs[i].1).collect();
            for &a in &letters {
                let pair = step(ts1.clone(), ts2.clone(), a);
                if index.contains_key(&pair) {
                    continue;
                }
                index.insert(pair, pairs.len());
                pairs.push(pair);
                certs.push(Cert::Node(a, tuple.clone()));
                if let Some(side) = separates(pair) {
                    found = Some((pairs.len() - 1, side));
                    break 'outer;
                }
            }
        }
        done = total;
    }
    let mut stats = stats;
    stats.push(("product pairs", pairs.len()));
    match found {
        None => Ok(Verdict::yes(stats)),
        Some((i, side)) => {
            fn build(certs: &[Cert], i: usize) -> Pattern {
                match &certs[i] {
                    Cert::Leaf(a) => Pattern::leaf(*a),
                    Cert::Node(a, children) => {
                        Pattern::node(*a, children.iter().map(|&c| build(certs, c)).collect())
                    }
                }
            }
            Ok(Verdict::no(
                Witness::Pattern {
                    pattern: build(&certs, i),
                    side,
                },
                stats,
            ))
        }
    }
}

fn fta_verdict(c: &FiniteTreeAutomaton, side: Side) -> Verdict {
    let stats = vec![("complement", c.base().num_states())];
    match c.witness() {
        None => Verdict::yes(stats),
        Some(pattern) => Verdict::no(Witness::Pattern { pattern, side }, stats),
    }
}

/// Whether the automaton presents the full shift. A witness is a missing pattern, on
/// [`Side::Second`] (the full shift).
pub fn is_full(a: &Automaton) -> Verdict {
    fta_verdict(&complement_of_shift(a), Side::Second)
}

/// As [`is_full`], but deciding emptiness of the complement by scanning every pattern of
/// height at most its number of states.
pub fn is_full_brute_force(a: &Automaton, limit: u128) -> Result<Verdict> {
    let c = complement_of_shift(a);
    let stats = vec![("complement", c.base().num_states())];
    Ok(match c.brute_force_witness(limit)? {
        None => Verdict::yes(stats),
        Some(pattern) => Verdict::no(
            Witness::Pattern {
                pattern,
                side: Side::Second,
            },
            stats,
        ),
    })
}

/// Whether `τ(X) = Y`, where `X` is the domain of `τ`. A pattern witness on
/// [`Side::Second`] lies in `Y` but not in the image.
pub fn decide_surjective(tau: &CellularAutomaton, y: &Automaton) -> Result<Verdict> {
    let image = tau.image_automaton()?;
    let mut v = equal_shifts(&image, y)?;
    v.stats.insert(0, ("image states", image.num_states()));
    Ok(v)
}

/// Surjectivity of `τ` restricted to a sofic shift `X` given by an automaton. `X` is
/// covered by its bundle shift `Z` and the image of `Z` under the composite is compared
/// with `Y`.
pub fn decide_surjective_sofic(
    tau: &CellularAutomaton,
    x: &Automaton,
    y: &Automaton,
) -> Result<Verdict> {
    let (_, relabel) = sft_cover(&x.essentialize())?;
    let composite = tau.compose_relabel(&relabel)?;
    decide_surjective(&composite, y)
}

/// Whether `τ` is injective on its domain: the self-join of the image automaton, once
/// essentialized, must contain only diagonal states.
pub fn decide_injective(tau: &CellularAutomaton) -> Result<Verdict> {
    let image = tau.image_automaton()?;
    let n = image.num_states();
    let joined = image.join(&image)?;
    let (essential, map) = joined.essential_part();
    let stats = vec![
        ("image states", n),
        ("essential join states", essential.num_states()),
    ];
    let pair = (0..n * n).find(|&i| i / n != i % n && map[i].is_some());
    Ok(match pair {
        None => Verdict::yes(stats),
        Some(i) => Verdict::no(
            Witness::StatePair(
                image.state_name(i / n).to_string(),
                image.state_name(i % n).to_string(),
            ),
            stats,
        ),
    })
}

/// Outcome of the surjunctivity harness: an injective endomorphism of a shift of finite
/// type must be surjective, so `violation` is expected to be false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurjunctivityReport {
    pub injective: Verdict,
    pub surjective: Verdict,
    pub violation: bool,
}

/// Checks injective ⇒ surjective for an endomorphism `τ: X → X` of a shift of finite type.
pub fn surjunctivity_check(tau: &CellularAutomaton) -> Result<SurjunctivityReport> {
    let x = tau.domain();
    if tau.target() != x.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let presentation = x.presentation();
    let image = tau.image_automaton()?;
    let inside = equal_shifts(&image.join(&presentation)?, &image)?;
    if let Some(p) = inside.pattern() {
        return Err(Error::ImageNotContained(format_pattern(p, x.alphabet())));
    }
    let injective = decide_injective(tau)?;
    let surjective = decide_surjective(tau, &presentation)?;
    let violation = injective.answer && !surjective.answer;
    Ok(SurjunctivityReport {
        injective,
        surjective,
        violation,
    })
}
