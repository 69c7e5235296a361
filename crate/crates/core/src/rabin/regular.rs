use std::collections::{BTreeMap, VecDeque};

use super::{Automaton, Run, StateId};
use crate::cellular::CellularAutomaton;
use crate::error::{Error, Result};
use crate::text::format_pattern;
use crate::tree::{Letter, Pattern};

/// A configuration with finitely many shifts, given as a finite colored transition
/// system: the label at `w` is the color of the state reached from the root along `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularMachine {
    colors: Vec<Letter>,
    steps: Vec<Vec<usize>>,
    root: usize,
}

impl RegularMachine {
    /// Builds a machine, keeping only the states reachable from `root` (renumbered in
    /// breadth-first order, so the root becomes state 0).
    pub fn new(colors: Vec<Letter>, steps: Vec<Vec<usize>>, root: usize) -> Result<Self> {
        let n = colors.len();
        if steps.len() != n {
            return Err(Error::StateOutOfRange(steps.len()));
        }
        if root >= n {
            return Err(Error::StateOutOfRange(root));
        }
        let arity = steps.first().map_or(0, Vec::len);
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        for row in &steps {
            if row.len() != arity {
                return Err(Error::WrongArity {
                    expected: arity,
                    found: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= n) {
                return Err(Error::StateOutOfRange(bad));
            }
        }
        let mut order = vec![usize::MAX; n];
        let mut queue = VecDeque::from([root]);
        let mut seen = Vec::new();
        order[root] = 0;
        seen.push(root);
        while let Some(s) = queue.pop_front() {
            for &t in &steps[s] {
                if order[t] == usize::MAX {
                    order[t] = seen.len();
                    seen.push(t);
                    queue.push_back(t);
                }
            }
        }
        let colors = seen.iter().map(|&s| colors[s]).collect();
        let steps = seen
            .iter()
            .map(|&s| steps[s].iter().map(|&t| order[t]).collect())
            .collect();
        Ok(RegularMachine {
            colors,
            steps,
            root: 0,
        })
    }

    pub fn arity(&self) -> usize {
        self.steps[0].len()
    }

    pub fn num_states(&self) -> usize {
        self.colors.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn color(&self, s: usize) -> Letter {
        self.colors[s]
    }

    pub fn step(&self, s: usize, direction: usize) -> usize {
        self.steps[s][direction]
    }

    /// The block on `Δ_height` read from state `s`.
    pub fn unroll_from(&self, s: usize, height: usize) -> Result<Pattern> {
        if height == 0 {
            return Err(Error::ZeroHeight);
        }
        if height == 1 {
            return Ok(Pattern::leaf(self.colors[s]));
        }
        let children = self.steps[s]
            .iter()
            .map(|&t| self.unroll_from(t, height - 1))
            .collect::<Result<_>>()?;
        Ok(Pattern::node(self.colors[s], children))
    }

    pub fn unroll(&self, height: usize) -> Result<Pattern> {
        self.unroll_from(self.root, height)
    }

    /// Number of distinct shifts of the configuration, i.e. the size of the minimal
    /// machine (Moore partition refinement).
    pub fn orbit_size(&self) -> usize {
        let mut class: Vec<usize> = self.colors.iter().map(|c| c.0).collect();
        let mut count = distinct(&class);
        loop {
            let keys: Vec<(usize, Vec<usize>)> = (0..self.num_states())
                .map(|s| (class[s], self.steps[s].iter().map(|&t| class[t]).collect()))
                .collect();
            let mut ids = BTreeMap::new();
            let next: Vec<usize> = keys
                .into_iter()
                .map(|k| {
                    let n = ids.len();
                    *ids.entry(k).or_insert(n)
                })
                .collect();
            let c = distinct(&next);
            class = next;
            if c == count {
                return c;
            }
            count = c;
        }
    }
}

fn distinct(v: &[usize]) -> usize {
    let mut w = v.to_vec();
    w.sort_unstable();
    w.dedup();
    w.len()
}

/// The lowest-indexed bundle from every state.
pub fn default_choice(a: &Automaton) -> Result<Vec<usize>> {
    (0..a.num_states())
        .map(|s| {
            a.bundle_indices_from(s)
                .first()
                .copied()
                .ok_or(Error::NotEssential)
        })
        .collect()
}

fn check_choice(a: &Automaton, xi: &[usize]) -> Result<()> {
    if !a.is_essential() {
        return Err(Error::NotEssential);
    }
    if xi.len() != a.num_states()
        || xi
            .iter()
            .enumerate()
            .any(|(s, &b)| a.bundles().get(b).map(|b| b.source) != Some(s))
    {
        return Err(Error::InvalidChoice);
    }
    Ok(())
}

/// The configuration obtained by always following the chosen bundle `xi[s]` from `s`.
pub fn xi_machine(a: &Automaton, s: StateId, xi: &[usize]) -> Result<RegularMachine> {
    check_choice(a, xi)?;
    if s >= a.num_states() {
        return Err(Error::StateOutOfRange(s));
    }
    let colors = xi.iter().map(|&b| a.bundles()[b].label).collect();
    let steps = xi
        .iter()
        .map(|&b| a.bundles()[b].terminals.clone())
        .collect();
    RegularMachine::new(colors, steps, s)
}

/// A regular configuration agreeing with `p` on its support: below every leaf of `p`
/// the configuration continues with the chosen-bundle machine of the run state there.
pub fn regular_approximation(
    a: &Automaton,
    p: &Pattern,
    run: &Run,
    xi: &[usize],
) -> Result<RegularMachine> {
    check_choice(a, xi)?;
    a.check_pattern(p)?;
    if !a.is_run_for(p, run) {
        return Err(Error::InvalidRun);
    }
    // states 0..|S| are the xi-machine; the vertices of p follow
    let mut colors: Vec<Letter> = xi.iter().map(|&b| a.bundles()[b].label).collect();
    let mut steps: Vec<Vec<usize>> = xi
        .iter()
        .map(|&b| a.bundles()[b].terminals.clone())
        .collect();
    fn add(p: &Pattern, run: &Run, colors: &mut Vec<Letter>, steps: &mut Vec<Vec<usize>>) -> usize {
        let id = colors.len();
        colors.push(p.label());
        steps.push(Vec::new());
        let row = if p.is_leaf() {
            run.children.iter().map(|r| r.state).collect()
        } else {
            p.children()
                .iter()
                .zip(&run.children)
                .map(|(c, r)| add(c, r, colors, steps))
                .collect()
        };
        steps[id] = row;
        id
    }
    let root = add(p, run, &mut colors, &mut steps);
    RegularMachine::new(colors, steps, root)
}

/// The image of a regular configuration under a cellular automaton, on the same
/// transition graph. Fails if the configuration leaves the domain.
pub fn apply_machine(tau: &CellularAutomaton, m: &RegularMachine) -> Result<RegularMachine> {
    let domain = tau.domain();
    let depth = domain.memory();
    let mut colors = Vec::with_capacity(m.num_states());
    for s in 0..m.num_states() {
        let local = m.unroll_from(s, depth)?;
        if domain.forbidden().contains(&local) {
            return Err(Error::OutsideDomain(format_pattern(
                &local,
                domain.alphabet(),
            )));
        }
        let window = m.unroll_from(s, tau.memory())?;
        let b = tau
            .rule(&window)
            .ok_or_else(|| Error::OutsideDomain(format_pattern(&window, domain.alphabet())))?;
        colors.push(b);
    }
    let steps = (0..m.num_states()).map(|s| m.steps[s].clone()).collect();
    RegularMachine::new(colors, steps, m.root)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{even_sum, golden, leaf, monochromatic, node};
    use super::*;
    use crate::sft::SftSpec;
    use crate::tree::{Alphabet, TreeSignature};

    fn l(i: usize) -> Letter {
        Letter(i)
    }

    #[test]
    fn xi_examples() {
        let full = Automaton::full_shift(
            TreeSignature::new(2).unwrap(),
            Alphabet::new(["a", "b"]).unwrap(),
        );
        let m = xi_machine(&full, 0, &default_choice(&full).unwrap()).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(
            m.unroll(3).unwrap(),
            Pattern::constant(&full.signature().delta(3).unwrap(), l(0))
        );

        let mono = monochromatic();
        // bundles sorted: (a;a;aa) (a;a;bb) (b;b;aa) (b;b;bb)
        let m = xi_machine(&mono, 0, &[1, 2]).unwrap();
        assert_eq!(m.orbit_size(), 2);
        let u = m.unroll(3).unwrap();
        assert_eq!(u.preorder(), vec![l(0), l(1), l(0), l(0), l(1), l(0), l(0)]);
        assert!(mono.accepts(&u).unwrap());

        let g = xi_machine(&golden(), 0, &[0, 2]).unwrap();
        assert_eq!(g.unroll(4).unwrap().preorder(), vec![l(0); 4]);
        assert_eq!(xi_machine(&golden(), 0, &[2, 0]), Err(Error::InvalidChoice));
    }

    #[test]
    fn unroll_alternating() {
        let m = RegularMachine::new(vec![l(0), l(1)], vec![vec![1], vec![0]], 0).unwrap();
        assert_eq!(
            m.unroll(4).unwrap().preorder(),
            vec![l(0), l(1), l(0), l(1)]
        );
        assert_eq!(m.unroll(1).unwrap(), leaf(0));
    }

    #[test]
    fn orbit_of_redundant_machine() {
        let m = RegularMachine::new(vec![l(0), l(0), l(5)], vec![vec![1], vec![0], vec![2]], 0)
            .unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.orbit_size(), 1);
    }

    #[test]
    fn approximation_matches_pattern() {
        let e = even_sum();
        let p = node(0, vec![leaf(1), leaf(1)]);
        let run = e.accepting_run(&p).unwrap().unwrap();
        let m = regular_approximation(&e, &p, &run, &default_choice(&e).unwrap()).unwrap();
        assert_eq!(m.unroll(2).unwrap(), p);
        assert!(e.accepts(&m.unroll(4).unwrap()).unwrap());
        let bad = Run {
            state: 1,
            children: run.children.clone(),
        };
        assert_eq!(
            regular_approximation(&e, &p, &bad, &default_choice(&e).unwrap()),
            Err(Error::InvalidRun)
        );
    }

    #[test]
    fn apply_golden_even() {
        let sig = TreeSignature::new(1).unwrap();
        let bits = Alphabet::new(["0", "1"]).unwrap();
        let x = SftSpec::normalize(sig, bits.clone(), &[Pattern::chain(&[l(1), l(1)])]).unwrap();
        let tau = CellularAutomaton::from_fn(x, bits.clone(), 2, |p| {
            let w = p.preorder();
            l(usize::from(w[0] == w[1]))
        })
        .unwrap();
        let alt = RegularMachine::new(vec![l(0), l(1)], vec![vec![1], vec![0]], 0).unwrap();
        let out = apply_machine(&tau, &alt).unwrap();
        assert_eq!(out.unroll(5).unwrap().preorder(), vec![l(0); 5]);
        assert_eq!(out.orbit_size(), 1);
        let ones = RegularMachine::new(vec![l(1)], vec![vec![0]], 0).unwrap();
        assert!(matches!(
            apply_machine(&tau, &ones),
            Err(Error::OutsideDomain(_))
        ));
    }
}
