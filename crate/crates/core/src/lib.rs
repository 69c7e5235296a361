//! Sofic tree shifts on regular rooted trees.
//!
//! Configurations label every vertex of the `k`-ary tree with a letter. This crate works
//! with the shifts of such configurations presented by unrestricted Rabin automata, with
//! shifts of finite type and with cellular automata between them, and decides
//!
//! * whether two automata present the same shift ([`equal_shifts`]) or the full shift
//!   ([`is_full`]),
//! * whether a cellular automaton is surjective onto a sofic shift ([`decide_surjective`]),
//! * whether a cellular automaton on a shift of finite type is injective
//!   ([`decide_injective`]).
//!
//! ```
//! use treeshift::{Automaton, CellularAutomaton, SftSpec, equal_shifts};
//!
//! let golden: SftSpec = "arity 1\nalphabet 0 1\nforbid (1 (1))\n".parse().unwrap();
//! let tau: CellularAutomaton = "arity 1\nin_alphabet 0 1\nout_alphabet 0 1\nmemory 2\n\
//!     domain_memory 2\nforbid (1 (1))\n\
//!     rule (0 (0)) 1\nrule (0 (1)) 0\nrule (1 (0)) 0\n".parse().unwrap();
//! let even: Automaton = "arity 1\nalphabet 0 1\nstates 0 1\n\
//!     bundle 0 1 0\nbundle 0 0 1\nbundle 1 0 0\n".parse().unwrap();
//! assert_eq!(golden.presentation().num_states(), 2);
//! assert!(equal_shifts(&tau.image_automaton().unwrap(), &even).unwrap().answer);
//! ```

pub mod cellular;
pub mod decide;
pub mod error;
pub mod fta;
pub mod rabin;
pub mod sft;
pub mod text;
pub mod tree;

pub use cellular::{sft_cover, CellularAutomaton};
pub use decide::{
    decide_injective, decide_surjective, decide_surjective_sofic, equal_shifts, is_full,
    is_full_brute_force, surjunctivity_check, Side, SurjunctivityReport, Verdict, Witness,
};
pub use error::{Error, Result};
pub use fta::{codeterminize, complement_of_shift, full_pattern_fta, FiniteTreeAutomaton};
pub use rabin::{
    apply_machine, default_choice, glue_blocks, regular_approximation, xi_machine, Automaton,
    Bundle, Glued, RegularMachine, Run, StateId,
};
pub use sft::SftSpec;
pub use text::{
    detect_kind, format_pattern, parse_pattern, parse_pattern_file, ObjectKind, ParseError,
};
pub use tree::{
    all_blocks, count_patterns, enumerate_patterns, extend_blocks, shapes_up_to, translate,
    Alphabet, FullSubtree, Letter, Pattern, TreeSignature, Word,
};
