//! Line-oriented text format for reward machines.
//!
//! ```text
//! # comment
//! alphabet a,b,c
//! tiebreak first
//! state u0 init
//! state u1
//! state u2 terminal
//! trans u0 -> u1 on a,b reward 0
//! trans u1 -> u2 on c reward 1
//! ```
//!
//! `alphabet` must be the first statement. The remaining statements may come
//! in any order, except that transitions keep their relative order (it
//! decides ties under `tiebreak first`). `tiebreak` is optional and defaults
//! to `reject`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{RewardMachine, RmBuilder, RmError, TieBreak};
use crate::label::Alphabet;

fn syntax(line: usize, message: impl Into<String>) -> RmError {
    RmError::Syntax {
        line,
        message: message.into(),
    }
}

fn split_names(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

pub fn parse(text: &str) -> Result<RewardMachine, RmError> {
    let mut builder: Option<RmBuilder> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        if keyword == "alphabet" {
            if builder.is_some() {
                return Err(syntax(line_no, "alphabet declared twice"));
            }
            let names = split_names(rest);
            let alphabet = Alphabet::new(&names).map_err(|e| syntax(line_no, e.to_string()))?;
            builder = Some(RmBuilder::new(alphabet));
            continue;
        }
        let b = builder
            .as_mut()
            .ok_or_else(|| syntax(line_no, "the alphabet must be declared first"))?;
        match keyword {
            "state" => {
                let mut parts = rest.split_whitespace();
                let name = parts
                    .next()
                    .ok_or_else(|| syntax(line_no, "state needs a name"))?;
                b.state(name).map_err(|e| syntax(line_no, e.to_string()))?;
                for marker in parts {
                    match marker {
                        "init" => b.initial(name),
                        "terminal" => b.terminal(name),
                        other => return Err(syntax(line_no, format!("unknown state marker {other:?}"))),
                    }
                    .map_err(|e| syntax(line_no, e.to_string()))?;
                }
            }
            "tiebreak" => match rest {
                "first" => {
                    b.tie_break(TieBreak::FirstDeclared);
                }
                "reject" => {
                    b.tie_break(TieBreak::Reject);
                }
                other => return Err(syntax(line_no, format!("unknown tiebreak mode {other:?}"))),
            },
            "trans" => parse_transition(b, rest, line_no)?,
            other => return Err(syntax(line_no, format!("unknown statement {other:?}"))),
        }
    }
    builder
        .ok_or_else(|| syntax(0, "missing alphabet declaration"))?
        .build()
}

// `FROM -> TO on a,b reward R`
fn parse_transition(b: &mut RmBuilder, rest: &str, line_no: usize) -> Result<(), RmError> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    let (from, to, guard, reward) = match tokens.as_slice() {
        [from, "->", to, "on", guard @ .., "reward", reward] if !guard.is_empty() => {
            (*from, *to, guard.concat(), *reward)
        }
        _ => {
            return Err(syntax(
                line_no,
                "expected `trans FROM -> TO on EVENTS reward R`",
            ))
        }
    };
    let reward: f64 = reward
        .parse()
        .map_err(|_| syntax(line_no, format!("invalid reward {reward:?}")))?;
    let guard = split_names(&guard);
    if guard.is_empty() {
        return Err(syntax(line_no, "guard lists no events"));
    }
    b.transition(from, to, &guard, reward);
    Ok(())
}

pub fn render(rm: &RewardMachine) -> String {
    let mut out = String::new();
    let names: Vec<&str> = rm.alphabet().props().iter().map(|p| p.as_str()).collect();
    let _ = writeln!(out, "alphabet {}", names.join(","));
    if rm.tie_break() == TieBreak::FirstDeclared {
        out.push_str("tiebreak first\n");
    }
    for u in rm.states() {
        let _ = write!(out, "state {}", rm.state_name(u));
        if u == rm.initial() {
            out.push_str(" init");
        }
        if u == rm.terminal() {
            out.push_str(" terminal");
        }
        out.push('\n');
    }
    for t in rm.transitions() {
        let _ = writeln!(
            out,
            "trans {} -> {} on {} reward {}",
            rm.state_name(t.source),
            rm.state_name(t.target),
            rm.alphabet().format(t.guard),
            t.reward
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rm::{cookieworld_rm, symbolworld_rm, StateId};

    #[test]
    fn parses_a_transition_line() {
        let rm = parse(
            "alphabet room_orange,button\nstate u0 init\nstate u1 terminal\n\
             trans u0 -> u1 on room_orange,button reward 0\n",
        )
        .unwrap();
        let t = &rm.transitions()[0];
        assert_eq!(t.source, StateId(0));
        assert_eq!(t.target, StateId(1));
        assert_eq!(t.guard, rm.alphabet().label(["room_orange", "button"]).unwrap());
        assert_eq!(t.reward, 0.0);
    }

    #[test]
    fn statements_after_alphabet_are_order_insensitive() {
        let rm = parse(
            "# leading comment\nalphabet a\ntrans u0 -> u1 on a reward 1 # trailing\n\
             state u1 terminal\nstate u0 init\n",
        )
        .unwrap();
        assert_eq!(rm.initial(), rm.state_id("u0").unwrap());
        assert_eq!(rm.num_states(), 2);
    }

    #[test]
    fn builtins_round_trip() {
        for rm in [cookieworld_rm(), symbolworld_rm()] {
            let text = render(&rm);
            assert_eq!(parse(&text).unwrap(), rm);
            assert_eq!(render(&parse(&text).unwrap()), text);
        }
    }

    #[test]
    fn outgoing_terminal_transition_is_rejected() {
        let mut text = render(&cookieworld_rm());
        text.push_str("trans u4 -> u0 on eaten reward 0\n");
        assert_eq!(parse(&text), Err(RmError::TerminalOutgoing("u4".into())));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse("alphabet a\nstate u0 init\ntrans u0 => u1 on a reward 0\n").unwrap_err();
        assert!(matches!(err, RmError::Syntax { line: 3, .. }), "{err:?}");
        let err = parse("state u0\nalphabet a\n").unwrap_err();
        assert!(matches!(err, RmError::Syntax { line: 1, .. }));
        let err = parse("alphabet a\nstate u0 init\nstate u1 terminal\ntrans u0 -> u1 on a reward x\n")
            .unwrap_err();
        assert!(matches!(err, RmError::Syntax { line: 4, .. }));
        let err = parse("alphabet a\nfrobnicate\n").unwrap_err();
        assert!(matches!(err, RmError::Syntax { line: 2, .. }));
    }
}
