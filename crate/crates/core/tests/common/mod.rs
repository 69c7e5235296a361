//! Test corpus and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::{
    all_blocks, Alphabet, Automaton, Bundle, CellularAutomaton, FiniteTreeAutomaton, Letter,
    Pattern, SftSpec, TreeSignature,
};

pub fn sig(k: usize) -> TreeSignature {
    TreeSignature::new(k).unwrap()
}

pub fn letters(q: usize) -> Alphabet {
    Alphabet::new((0..q).map(|i| ["a", "b", "c", "d"][i])).unwrap()
}

pub fn bits() -> Alphabet {
    Alphabet::new(["0", "1"]).unwrap()
}

pub fn l(i: usize) -> Letter {
    Letter(i)
}

pub fn word(s: &str) -> Pattern {
    let letters: Vec<Letter> = s
        .chars()
        .map(|c| Letter(c.to_digit(10).unwrap() as usize))
        .collect();
    Pattern::chain(&letters)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn parse_automaton(text: &str) -> Automaton {
    text.parse().unwrap()
}

pub fn monochromatic() -> Automaton {
    parse_automaton("arity 2\nalphabet a b\nstates a b\nbundle a a a a\nbundle a a b b\nbundle b b a a\nbundle b b b b\n")
}

pub fn even_sum() -> Automaton {
    parse_automaton("arity 2\nalphabet 0 1\nstates 0 1\nbundle 0 0 0 0\nbundle 0 0 1 1\nbundle 1 1 0 1\nbundle 1 1 1 0\n")
}

pub fn golden() -> Automaton {
    parse_automaton("arity 1\nalphabet 0 1\nstates 0 1\nbundle 0 0 0\nbundle 0 0 1\nbundle 1 1 0\n")
}

pub fn even() -> Automaton {
    parse_automaton("arity 1\nalphabet 0 1\nstates 0 1\nbundle 0 1 0\nbundle 0 0 1\nbundle 1 0 0\n")
}

pub fn golden_sft() -> SftSpec {
    SftSpec::normalize(sig(1), bits(), &[word("11")]).unwrap()
}

pub fn golden_even_ca() -> CellularAutomaton {
    CellularAutomaton::from_fn(golden_sft(), bits(), 2, |p| {
        let w = p.preorder();
        l(usize::from(w[0] == w[1]))
    })
    .unwrap()
}

pub fn xor_ca() -> CellularAutomaton {
    CellularAutomaton::from_fn(SftSpec::full_shift(sig(1), bits()), bits(), 3, |p| {
        let w = p.preorder();
        l((w[0].0 + w[2].0) % 2)
    })
    .unwrap()
}

/// A random automaton: every possible bundle is kept with probability `density`.
pub fn random_automaton(
    rng: &mut impl Rng,
    k: usize,
    q: usize,
    n: usize,
    density: f64,
) -> Automaton {
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut bundles = Vec::new();
    let tuples = product(n, k);
    for s in 0..n {
        for a in 0..q {
            for t in &tuples {
                if rng.gen_bool(density) {
                    bundles.push(Bundle::new(s, Letter(a), t.clone()));
                }
            }
        }
    }
    Automaton::new(sig(k), letters(q), states, bundles).unwrap()
}

/// A random nonempty essential automaton with at most `max_states` states.
pub fn random_essential(rng: &mut impl Rng, k: usize, q: usize, max_states: usize) -> Automaton {
    loop {
        let n = rng.gen_range(1..=max_states);
        let density = rng.gen_range(0.1..0.6);
        let a = random_automaton(rng, k, q, n, density).essentialize();
        if !a.is_empty() {
            return a;
        }
    }
}

fn product(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut acc = vec![Vec::new()];
    for _ in 0..k {
        acc = acc
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n).map(move |x| {
                    let mut v = p.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    acc
}

/// The fixed corpus: the named examples plus seeded random automata with at most three
/// states, arity at most two and at most two letters. Not all are essential.
pub fn corpus() -> Vec<Automaton> {
    let mut out = vec![monochromatic(), even_sum(), golden(), even()];
    out.push(Automaton::full_shift(sig(2), letters(2)));
    out.push(Automaton::full_shift(sig(1), letters(2)));
    out.push(Automaton::empty(sig(2), letters(2)));
    let mut r = rng(0x5eed);
    for i in 0..48 {
        let k = 1 + i % 2;
        let q = 1 + (i / 2) % 2;
        let n = 1 + (i / 4) % 3;
        let density = r.gen_range(0.1..0.5);
        out.push(random_automaton(&mut r, k, q, n, density));
    }
    out
}

/// Random finite-tree automata with at most three states.
pub fn fta_corpus() -> Vec<FiniteTreeAutomaton> {
    let mut out = Vec::new();
    let mut r = rng(0xf7a);
    for i in 0..60 {
        let k = 1 + i % 2;
        let q = 1 + (i / 2) % 2;
        let n = 1 + (i / 4) % 3;
        let density = r.gen_range(0.05..0.4);
        let a = random_automaton(&mut r, k, q, n, density);
        let initial: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let f = r.gen_range(0..n);
        out.push(FiniteTreeAutomaton::new(a, initial, f).unwrap());
    }
    out
}

/// Acceptance by trying every map from `T⁺` to states.
pub fn brute_accepts(a: &Automaton, p: &Pattern) -> bool {
    let n = a.num_states();
    if n == 0 {
        return false;
    }
    let k = a.arity();
    // vertices of T⁺ in preorder: (label or None for outside vertices, children ids)
    let mut vertices: Vec<(Option<Letter>, Vec<usize>)> = Vec::new();
    fn collect(p: &Pattern, k: usize, vs: &mut Vec<(Option<Letter>, Vec<usize>)>) -> usize {
        let id = vs.len();
        vs.push((Some(p.label()), Vec::new()));
        let children = if p.is_leaf() {
            (0..k)
                .map(|_| {
                    vs.push((None, Vec::new()));
                    vs.len() - 1
                })
                .collect()
        } else {
            p.children().iter().map(|c| collect(c, k, vs)).collect()
        };
        vs[id].1 = children;
        id
    }
    collect(p, k, &mut vertices);
    let m = vertices.len();
    let mut alpha = vec![0usize; m];
    loop {
        let ok = vertices
            .iter()
            .enumerate()
            .all(|(v, (label, children))| match label {
                None => true,
                Some(a_) => {
                    let b =
                        Bundle::new(alpha[v], *a_, children.iter().map(|&c| alpha[c]).collect());
                    a.bundles().contains(&b)
                }
            });
        if ok {
            return true;
        }
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            alpha[i] += 1;
            if alpha[i] < n {
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
    }
}

/// Whether `p` (a block of `x`'s alphabet) extends to a block `depth` levels larger that
/// avoids every forbidden block.
pub fn extendable(x: &SftSpec, p: &Pattern, depth: usize) -> bool {
    if !x.avoids(p) {
        return false;
    }
    if depth == 0 {
        return true;
    }
    one_level_extensions(p, x.signature().arity(), x.alphabet().len())
        .into_iter()
        .any(|e| extendable(x, &e, depth - 1))
}

fn one_level_extensions(p: &Pattern, k: usize, q: usize) -> Vec<Pattern> {
    if p.is_leaf() {
        let leaves: Vec<Pattern> = (0..q).map(|a| Pattern::leaf(Letter(a))).collect();
        let mut acc: Vec<Vec<Pattern>> = vec![Vec::new()];
        for _ in 0..k {
            acc = acc
                .into_iter()
                .flat_map(|v| {
                    leaves.iter().map(move |c| {
                        let mut w = v.clone();
                        w.push(c.clone());
                        w
                    })
                })
                .collect();
        }
        return acc
            .into_iter()
            .map(|cs| Pattern::node(p.label(), cs))
            .collect();
    }
    let mut acc: Vec<Vec<Pattern>> = vec![Vec::new()];
    for c in p.children() {
        let options = one_level_extensions(c, k, q);
        acc = acc
            .into_iter()
            .flat_map(|v| {
                options.iter().map(move |o| {
                    let mut w = v.clone();
                    w.push(o.clone());
                    w
                })
            })
            .collect();
    }
    acc.into_iter()
        .map(|cs| Pattern::node(p.label(), cs))
        .collect()
}

/// The blocks of `x` on `Δ_n` by bounded extension search.
pub fn brute_blocks(x: &SftSpec, n: usize) -> Vec<Pattern> {
    let naive_states = all_blocks(x.signature(), x.alphabet().len(), x.memory().max(2) - 1)
        .unwrap()
        .filter(|p| x.avoids(p))
        .count();
    let mut out: Vec<Pattern> = all_blocks(x.signature(), x.alphabet().len(), n)
        .unwrap()
        .filter(|p| extendable(x, p, naive_states))
        .collect();
    out.sort();
    out
}

/// A random shift of finite type with memory at most two.
pub fn random_sft(rng: &mut impl Rng, k: usize, q: usize) -> SftSpec {
    let memory = rng.gen_range(1..=2);
    let candidates: Vec<Pattern> = all_blocks(sig(k), q, memory).unwrap().collect();
    let p = if memory == 1 { 0.15 } else { 0.2 };
    let forbidden: Vec<Pattern> = candidates.into_iter().filter(|_| rng.gen_bool(p)).collect();
    SftSpec::with_memory(sig(k), letters(q), memory, &forbidden).unwrap()
}

/// A random cellular automaton on `x` with values in `x`'s alphabet.
pub fn random_ca(rng: &mut impl Rng, x: &SftSpec, memory: usize) -> CellularAutomaton {
    let q = x.alphabet().len();
    let blocks = x.blocks(memory).unwrap();
    let table: Vec<(Pattern, Letter)> = blocks
        .into_iter()
        .map(|b| (b, Letter(rng.gen_range(0..q))))
        .collect();
    CellularAutomaton::new(x.clone(), x.alphabet().clone(), memory, table).unwrap()
}
