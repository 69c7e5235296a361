use std::collections::HashMap;

use super::{Automaton, Run, StateId};
use crate::error::{Error, Result};
use crate::tree::{Pattern, Word};

/// An accepted pattern extending `p` at the root, together with the words `wv` at which
/// a translate of `q` was placed (one for every vertex `w` just below `p`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glued {
    pub pattern: Pattern,
    pub anchors: Vec<Word>,
}

/// Extends `p` so that a copy of `q` occurs below every vertex just outside `p`.
///
/// For each such vertex `w`, a shortest bundle path from the state of `w` in a run of `p`
/// to the root state of a run of `q` supplies the connecting labels. Siblings leaving
/// the path are closed off with a single vertex labeled by their lowest bundle.
pub fn glue_blocks(a: &Automaton, p: &Pattern, q: &Pattern) -> Result<Glued> {
    if !a.is_essential() {
        return Err(Error::NotEssential);
    }
    if !a.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let run_p = a
        .accepting_run(p)?
        .ok_or(Error::NotAccepted("first pattern"))?;
    let run_q = a
        .accepting_run(q)?
        .ok_or(Error::NotAccepted("second pattern"))?;
    let target = run_q.state;
    let mut paths: HashMap<StateId, Vec<(usize, usize)>> = HashMap::new();
    let mut anchors = Vec::new();
    let pattern = extend(
        a,
        p,
        &run_p,
        q,
        target,
        &mut paths,
        &mut Vec::new(),
        &mut anchors,
    );
    Ok(Glued { pattern, anchors })
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &Automaton,
    p: &Pattern,
    run: &Run,
    q: &Pattern,
    target: StateId,
    paths: &mut HashMap<StateId, Vec<(usize, usize)>>,
    word: &mut Vec<usize>,
    anchors: &mut Vec<Word>,
) -> Pattern {
    let children = if p.is_leaf() {
        run.children
            .iter()
            .enumerate()
            .map(|(d, r)| {
                word.push(d);
                let path = paths
                    .entry(r.state)
                    .or_insert_with(|| {
                        a.shortest_bundle_path(r.state, target)
                            .expect("strongly connected")
                    })
                    .clone();
                let mut anchor = word.clone();
                anchor.extend(path.iter().map(|&(_, dir)| dir));
                anchors.push(Word::from(anchor));
                let g = follow(a, &path, q);
                word.pop();
                g
            })
            .collect()
    } else {
        p.children()
            .iter()
            .zip(&run.children)
            .enumerate()
            .map(|(d, (c, r))| {
                word.push(d);
                let g = extend(a, c, r, q, target, paths, word, anchors);
                word.pop();
                g
            })
            .collect()
    };
    Pattern::node(p.label(), children)
}

fn follow(a: &Automaton, path: &[(usize, usize)], q: &Pattern) -> Pattern {
    match path.split_first() {
        None => q.clone(),
        Some((&(bi, dir), rest)) => {
            let b = &a.bundles()[bi];
            let children = b
                .terminals
                .iter()
                .enumerate()
                .map(|(d, &t)| {
                    if d == dir {
                        follow(a, rest, q)
                    } else {
                        let lowest = &a.bundles()[a.bundle_indices_from(t)[0]];
                        Pattern::leaf(lowest.label)
                    }
                })
                .collect();
            Pattern::node(b.label, children)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{even_sum, leaf, monochromatic};
    use super::*;
    use crate::tree::{Alphabet, Letter, TreeSignature};

    fn check(a: &Automaton, p: &Pattern, q: &Pattern) -> Glued {
        let g = glue_blocks(a, p, q).unwrap();
        assert!(a.accepts(&g.pattern).unwrap());
        for w in &g.anchors {
            assert_eq!(g.pattern.subpattern(w, &q.shape()).unwrap(), *q);
        }
        g
    }

    #[test]
    fn full_shift_single_letters() {
        let full = Automaton::full_shift(
            TreeSignature::new(2).unwrap(),
            Alphabet::new(["a"]).unwrap(),
        );
        let g = check(&full, &leaf(0), &leaf(0));
        assert_eq!(g.pattern, Pattern::node(Letter(0), vec![leaf(0), leaf(0)]));
        assert_eq!(g.anchors, vec![Word::from(vec![0]), Word::from(vec![1])]);
    }

    #[test]
    fn monochromatic_a_then_b() {
        let g = check(&monochromatic(), &leaf(0), &leaf(1));
        assert_eq!(g.pattern.label(), Letter(0));
        assert_eq!(g.anchors.len(), 2);
    }

    #[test]
    fn even_sum_zero_then_one() {
        check(&even_sum(), &leaf(0), &leaf(1));
    }

    #[test]
    fn rejects_unaccepted() {
        let m = monochromatic();
        let bad = Pattern::node(Letter(0), vec![leaf(0), leaf(1)]);
        assert_eq!(
            glue_blocks(&m, &bad, &leaf(0)),
            Err(Error::NotAccepted("first pattern"))
        );
    }
}
