//! The hand-crafted machines for the two grid worlds.
//!
//! Both machines resolve equal-size guard conflicts by declaration order, so
//! that every label (including ones no ground-truth trajectory produces, such
//! as those created by noise) has a defined successor.

use alloc::format;

use super::{RewardMachine, RmBuilder, TieBreak};
use crate::grid::{Constraint, SymbolKind};
use crate::label::Alphabet;

pub const COOKIEWORLD_EVENTS: [&str; 6] = [
    "room_orange",
    "room_green",
    "room_blue",
    "button",
    "cookie",
    "eaten",
];

pub const SYMBOLWORLD_EVENTS: [&str; 11] = [
    "room_orange",
    "room_green",
    "room_blue",
    "sym_club",
    "sym_spade",
    "sym_diamond",
    "got_club",
    "got_spade",
    "got_diamond",
    "arrow_right",
    "arrow_left",
];

/// State index of each SymbolWorld task. `u0` is the initial state and
/// `u10` the terminal one.
///
/// | task          | state |
/// |---------------|-------|
/// | club, right   | u1    |
/// | spade, right  | u2    |
/// | diamond, right| u3    |
/// | club, none    | u4    |
/// | spade, none   | u5    |
/// | diamond, none | u6    |
/// | spade, left   | u7    |
/// | diamond, left | u8    |
/// | club, left    | u9    |
pub const SYMBOLWORLD_TASK_STATES: [(SymbolKind, Constraint, usize); 9] = [
    (SymbolKind::Club, Constraint::Right, 1),
    (SymbolKind::Spade, Constraint::Right, 2),
    (SymbolKind::Diamond, Constraint::Right, 3),
    (SymbolKind::Club, Constraint::None, 4),
    (SymbolKind::Spade, Constraint::None, 5),
    (SymbolKind::Diamond, Constraint::None, 6),
    (SymbolKind::Spade, Constraint::Left, 7),
    (SymbolKind::Diamond, Constraint::Left, 8),
    (SymbolKind::Club, Constraint::Left, 9),
];

pub fn cookieworld_rm() -> RewardMachine {
    let alphabet = Alphabet::new(COOKIEWORLD_EVENTS).expect("static alphabet");
    let mut b = RmBuilder::new(alphabet);
    for u in ["u0", "u1", "u2", "u3", "u4"] {
        b.state(u).expect("distinct names");
    }
    b.initial("u0").and_then(|b| b.terminal("u4")).expect("marks");
    b.tie_break(TieBreak::FirstDeclared)
        .transition("u0", "u1", &["room_orange", "button"], 0.0)
        // u2: the cookie is in the blue room
        .transition("u1", "u2", &["room_blue", "cookie"], 0.0)
        .transition("u1", "u2", &["room_green"], 0.0)
        // u3: the cookie is in the green room
        .transition("u1", "u3", &["room_green", "cookie"], 0.0)
        .transition("u1", "u3", &["room_blue"], 0.0)
        .transition("u2", "u4", &["eaten"], 1.0)
        .transition("u3", "u4", &["eaten"], 1.0)
        .transition("u2", "u1", &["room_orange", "button"], 0.0)
        .transition("u3", "u1", &["room_orange", "button"], 0.0);
    b.build().expect("cookieworld machine is well formed")
}

pub fn symbolworld_rm() -> RewardMachine {
    let alphabet = Alphabet::new(SYMBOLWORLD_EVENTS).expect("static alphabet");
    let mut b = RmBuilder::new(alphabet);
    for i in 0..=10 {
        b.state(&format!("u{i}")).expect("distinct names");
    }
    b.initial("u0").and_then(|b| b.terminal("u10")).expect("marks");
    b.tie_break(TieBreak::FirstDeclared);

    for symbol in SymbolKind::ALL {
        for constraint in Constraint::ALL {
            let task = format!("u{}", task_state(symbol, constraint));
            let seen = symbol.seen_event();
            match constraint.arrow_event() {
                Some(arrow) => b.transition("u0", &task, &["room_orange", seen, arrow], 0.0),
                None => b.transition("u0", &task, &["room_orange", seen], 0.0),
            };
        }
    }

    for (symbol, constraint, index) in SYMBOLWORLD_TASK_STATES {
        let task = format!("u{index}");
        let got = symbol.got_event();
        let (green, blue) = match constraint {
            Constraint::Right => (1.0, -1.0),
            Constraint::Left => (-1.0, 1.0),
            Constraint::None => (1.0, 1.0),
        };
        b.transition(&task, "u10", &["room_green", got], green);
        b.transition(&task, "u10", &["room_blue", got], blue);
        for other in SymbolKind::ALL.into_iter().filter(|s| *s != symbol) {
            b.transition(&task, "u10", &[other.got_event()], -1.0);
        }
    }
    b.build().expect("symbolworld machine is well formed")
}

/// Index of the SymbolWorld state pursuing `(symbol, constraint)`.
pub fn task_state(symbol: SymbolKind, constraint: Constraint) -> usize {
    SYMBOLWORLD_TASK_STATES
        .iter()
        .find(|(s, c, _)| *s == symbol && *c == constraint)
        .map(|(_, _, i)| *i)
        .expect("table covers all nine tasks")
}
