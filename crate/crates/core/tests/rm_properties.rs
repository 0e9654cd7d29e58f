//! Reward machine semantics: guard specificity, the implicit self-loop, the
//! text format, and exhaustive checks of the two builtin machines against
//! hand-written transition tables.

use proptest::prelude::*;
use rmnoise_core::rm::{cookieworld_rm, parse, render, symbolworld_rm, TieBreak, Transition};
use rmnoise_core::{Alphabet, LabelSet, RewardMachine, RmError, StateId};

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

fn with_tie_break(rm: &RewardMachine, tie_break: TieBreak) -> RewardMachine {
    let states = rm.states().map(|u| rm.state_name(u).to_string()).collect();
    RewardMachine::new(
        states,
        rm.alphabet().clone(),
        rm.initial(),
        rm.terminal(),
        rm.transitions().to_vec(),
        tie_break,
    )
    .unwrap()
}

fn all_labels(rm: &RewardMachine) -> impl Iterator<Item = LabelSet> {
    (0..1u64 << rm.alphabet().len()).map(LabelSet::from_bits)
}

fn live_states(rm: &RewardMachine) -> Vec<StateId> {
    rm.states().filter(|u| !rm.is_terminal(*u)).collect()
}

/// Random machines over five propositions: states 0..=2 live, 3 terminal.
fn arb_machine() -> impl Strategy<Value = RewardMachine> {
    let edge = (0usize..3, 1u64..32, 0usize..4, prop_oneof![Just(0.0), Just(1.0), Just(-1.0)]);
    (prop::collection::vec(edge, 0..12), any::<bool>()).prop_map(|(edges, first)| {
        let mut transitions: Vec<Transition> = Vec::new();
        for (s, g, t, r) in edges {
            let guard = LabelSet::from_bits(g);
            if transitions.iter().any(|x| x.source.0 == s && x.guard == guard) {
                continue;
            }
            transitions.push(Transition {
                source: StateId(s),
                guard,
                target: StateId(t),
                reward: r,
            });
        }
        RewardMachine::new(
            (0..4).map(|i| format!("u{i}")).collect(),
            Alphabet::new(NAMES).unwrap(),
            StateId(0),
            StateId(3),
            transitions,
            if first { TieBreak::FirstDeclared } else { TieBreak::Reject },
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn chosen_guard_is_a_maximal_match(rm in arb_machine(), bits in 0u64..32, u in 0usize..3) {
        let label = LabelSet::from_bits(bits);
        let matching: Vec<&Transition> = rm
            .outgoing(StateId(u))
            .filter(|t| t.guard.is_subset(label))
            .collect();
        match rm.step(StateId(u), label) {
            Ok(step) => {
                if matching.is_empty() {
                    prop_assert_eq!(step.next_state, StateId(u));
                    prop_assert_eq!(step.reward, 0.0);
                } else {
                    let top = matching.iter().map(|t| t.guard.len()).max().unwrap();
                    let winner = matching
                        .iter()
                        .find(|t| t.guard.len() == top)
                        .unwrap();
                    prop_assert_eq!(step.next_state, winner.target);
                    prop_assert_eq!(step.reward, winner.reward);
                }
            }
            Err(RmError::Ambiguous { .. }) => {
                prop_assert_eq!(rm.tie_break(), TieBreak::Reject);
                let top = matching.iter().map(|t| t.guard.len()).max().unwrap();
                let outcomes: Vec<(StateId, f64)> = matching
                    .iter()
                    .filter(|t| t.guard.len() == top)
                    .map(|t| (t.target, t.reward))
                    .collect();
                prop_assert!(outcomes.iter().any(|o| *o != outcomes[0]));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn adding_events_never_picks_a_less_specific_guard(
        rm in arb_machine(), bits in 0u64..32, extra in 0usize..5, u in 0usize..3
    ) {
        let rm = with_tie_break(&rm, TieBreak::FirstDeclared);
        let size_of = |label: LabelSet| {
            rm.outgoing(StateId(u))
                .filter(|t| t.guard.is_subset(label))
                .map(|t| t.guard.len())
                .max()
                .unwrap_or(0)
        };
        let small = LabelSet::from_bits(bits);
        prop_assert!(size_of(small.with(extra)) >= size_of(small));
    }

    #[test]
    fn stepping_is_deterministic(rm in arb_machine(), bits in 0u64..32, u in 0usize..3) {
        let label = LabelSet::from_bits(bits);
        prop_assert_eq!(rm.step(StateId(u), label), rm.step(StateId(u), label));
    }

    #[test]
    fn text_round_trip(rm in arb_machine()) {
        let text = render(&rm);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &rm);
        prop_assert_eq!(render(&back), text);
    }
}

#[test]
fn builtin_machines_round_trip_through_text() {
    for rm in [cookieworld_rm(), symbolworld_rm()] {
        assert_eq!(parse(&render(&rm)).unwrap(), rm);
    }
}

#[test]
fn stepping_from_terminal_is_an_error() {
    let rm = cookieworld_rm();
    assert!(matches!(
        rm.step(rm.terminal(), LabelSet::EMPTY),
        Err(RmError::StepFromTerminal(_))
    ));
}

fn has(rm: &RewardMachine, label: LabelSet, name: &str) -> bool {
    label.contains(rm.alphabet().index_of(name).unwrap())
}

/// CookieWorld as drawn: press the button in the orange room, enter the room
/// holding the cookie, eat it. A re-press from u2/u3 restarts the search.
fn cookie_oracle(rm: &RewardMachine, u: usize, l: LabelSet) -> (usize, f64) {
    let on = |n: &str| has(rm, l, n);
    let pressed = on("room_orange") && on("button");
    match u {
        0 if pressed => (1, 0.0),
        0 => (0, 0.0),
        1 if on("room_blue") && on("cookie") => (2, 0.0),
        1 if on("room_green") && on("cookie") => (3, 0.0),
        1 if on("room_green") => (2, 0.0),
        1 if on("room_blue") => (3, 0.0),
        1 => (1, 0.0),
        2 | 3 if pressed => (1, 0.0),
        2 | 3 if on("eaten") => (4, 1.0),
        2 | 3 => (u, 0.0),
        _ => unreachable!(),
    }
}

#[test]
fn cookieworld_matches_its_table_on_every_label() {
    let rm = cookieworld_rm();
    for u in live_states(&rm) {
        for l in all_labels(&rm) {
            let step = rm.step(u, l).unwrap();
            assert_eq!(
                (step.next_state.0, step.reward),
                cookie_oracle(&rm, u.0, l),
                "u{} {{{}}}",
                u.0,
                rm.alphabet().format(l)
            );
        }
    }
}

const SYMBOLS: [&str; 3] = ["club", "spade", "diamond"];

/// SymbolWorld task numbering: (symbol, arrow) -> state.
fn task_of(symbol: &str, arrow: Option<&str>) -> usize {
    match (symbol, arrow) {
        ("club", Some("right")) => 1,
        ("spade", Some("right")) => 2,
        ("diamond", Some("right")) => 3,
        ("club", None) => 4,
        ("spade", None) => 5,
        ("diamond", None) => 6,
        ("spade", Some("left")) => 7,
        ("diamond", Some("left")) => 8,
        ("club", Some("left")) => 9,
        _ => unreachable!(),
    }
}

fn one_of<'a>(rm: &RewardMachine, l: LabelSet, prefix: &str, names: &[&'a str]) -> Result<Option<&'a str>, ()> {
    let present: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| has(rm, l, &format!("{prefix}{n}")))
        .collect();
    match present.len() {
        0 => Ok(None),
        1 => Ok(Some(present[0])),
        _ => Err(()),
    }
}

/// Labels the environment can emit: at most one room, one displayed
/// symbol, one arrow and one collected symbol.
fn consistent(rm: &RewardMachine, l: LabelSet) -> bool {
    one_of(rm, l, "room_", &["orange", "green", "blue"]).is_ok()
        && one_of(rm, l, "sym_", &SYMBOLS).is_ok()
        && one_of(rm, l, "arrow_", &["right", "left"]).is_ok()
        && one_of(rm, l, "got_", &SYMBOLS).is_ok()
}

fn symbol_oracle(rm: &RewardMachine, u: usize, l: LabelSet) -> (usize, f64) {
    let seen = one_of(rm, l, "sym_", &SYMBOLS).unwrap();
    let arrow = one_of(rm, l, "arrow_", &["right", "left"]).unwrap();
    let got = one_of(rm, l, "got_", &SYMBOLS).unwrap();
    if u == 0 {
        return match seen {
            Some(s) if has(rm, l, "room_orange") => (task_of(s, arrow), 0.0),
            _ => (0, 0.0),
        };
    }
    let (symbol, arrow) = [
        ("club", Some("right")),
        ("spade", Some("right")),
        ("diamond", Some("right")),
        ("club", None),
        ("spade", None),
        ("diamond", None),
        ("spade", Some("left")),
        ("diamond", Some("left")),
        ("club", Some("left")),
    ][u - 1];
    match got {
        Some(g) if g != symbol => (10, -1.0),
        Some(_) if has(rm, l, "room_green") => (10, if arrow == Some("left") { -1.0 } else { 1.0 }),
        Some(_) if has(rm, l, "room_blue") => (10, if arrow == Some("right") { -1.0 } else { 1.0 }),
        _ => (u, 0.0),
    }
}

#[test]
fn symbolworld_matches_its_table_on_consistent_labels() {
    let rm = symbolworld_rm();
    let strict = with_tie_break(&rm, TieBreak::Reject);
    let mut checked = 0;
    for u in live_states(&rm) {
        for l in all_labels(&rm).filter(|l| consistent(&rm, *l)) {
            let step = strict.step(u, l).unwrap();
            assert_eq!(
                (step.next_state.0, step.reward),
                symbol_oracle(&rm, u.0, l),
                "u{} {{{}}}",
                u.0,
                rm.alphabet().format(l)
            );
            checked += 1;
        }
    }
    // Per live state: room, symbol and got each 4 ways (incl. absent), arrow 3.
    assert_eq!(checked, 10 * 4 * 4 * 3 * 4);
}

#[test]
fn cookieworld_consistent_labels_need_no_tie_break() {
    let rm = cookieworld_rm();
    let strict = with_tie_break(&rm, TieBreak::Reject);
    for u in live_states(&rm) {
        for l in all_labels(&rm) {
            let rooms = ["room_orange", "room_green", "room_blue"]
                .iter()
                .filter(|n| has(&rm, l, n))
                .count();
            if rooms <= 1 {
                assert!(strict.step(u, l).is_ok(), "u{} {{{}}}", u.0, rm.alphabet().format(l));
            }
        }
    }
}

#[test]
fn every_label_has_a_successor_under_first_declared() {
    for rm in [cookieworld_rm(), symbolworld_rm()] {
        let strict = with_tie_break(&rm, TieBreak::Reject);
        let mut ties = 0;
        for u in live_states(&rm) {
            for l in all_labels(&rm) {
                rm.step(u, l).unwrap();
                if strict.step(u, l).is_err() {
                    ties += 1;
                }
            }
        }
        // Noise can produce mixed labels, so some ties must exist.
        assert!(ties > 0);
    }
}
