//! Plain-text MDP format.
//!
//! ```text
//! # optional comment lines
//! <n_states> <n_actions> <gamma>
//! rewards
//! <R(0)>
//! ...                         (n_states lines)
//! transitions <count>
//! <s> <a> <s'> <p>            (one line per nonzero probability)
//! mask
//! <bits>                      (n_states lines of n_actions '0'/'1' chars)
//! ```
//!
//! Reals are written in shortest round-trip form, so write → read is lossless.

use std::fmt::Write as _;

use super::TabularMdp;
use crate::error::{Error, Result};

pub fn write_mdp(mdp: &TabularMdp) -> String {
    let mut out = String::new();
    out.push_str("# ralp tabular mdp\n");
    let _ = writeln!(out, "{} {} {:?}", mdp.n_states(), mdp.n_actions(), mdp.gamma());
    out.push_str("rewards\n");
    for r in mdp.rewards() {
        let _ = writeln!(out, "{r:?}");
    }
    let count: usize = mdp.transitions.iter().map(Vec::len).sum();
    let _ = writeln!(out, "transitions {count}");
    for s in 0..mdp.n_states() {
        for a in 0..mdp.n_actions() {
            for &(next, p) in mdp.successors(s, a) {
                let _ = writeln!(out, "{s} {a} {next} {p:?}");
            }
        }
    }
    out.push_str("mask\n");
    for s in 0..mdp.n_states() {
        let bits: String = (0..mdp.n_actions())
            .map(|a| if mdp.is_allowed(s, a) { '1' } else { '0' })
            .collect();
        out.push_str(&bits);
        out.push('\n');
    }
    out
}

pub fn read_mdp(text: &str) -> Result<TabularMdp> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next_line = |expect: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of input, wanted {expect}")))
    };

    let (ln, header) = next_line("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(ln, "header must be `n_states n_actions gamma`"));
    }
    let n_states: usize = parse(ln, fields[0])?;
    let n_actions: usize = parse(ln, fields[1])?;
    let gamma: f64 = parse(ln, fields[2])?;

    let (ln, tag) = next_line("rewards")?;
    if tag != "rewards" {
        return Err(Error::parse(ln, "expected `rewards`"));
    }
    let mut rewards = Vec::with_capacity(n_states);
    for _ in 0..n_states {
        let (ln, l) = next_line("reward")?;
        rewards.push(parse(ln, l)?);
    }

    let (ln, tag) = next_line("transitions")?;
    let count: usize = match tag.split_once(' ') {
        Some(("transitions", n)) => parse(ln, n.trim())?,
        _ => return Err(Error::parse(ln, "expected `transitions <count>`")),
    };
    let mut transitions = vec![Vec::new(); n_states * n_actions];
    for _ in 0..count {
        let (ln, l) = next_line("transition triple")?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::parse(ln, "transition line must be `s a s' p`"));
        }
        let s: usize = parse(ln, f[0])?;
        let a: usize = parse(ln, f[1])?;
        let next: usize = parse(ln, f[2])?;
        let p: f64 = parse(ln, f[3])?;
        if s >= n_states || a >= n_actions {
            return Err(Error::parse(ln, "state or action out of range"));
        }
        transitions[s * n_actions + a].push((next, p));
    }

    let (ln, tag) = next_line("mask")?;
    if tag != "mask" {
        return Err(Error::parse(ln, "expected `mask`"));
    }
    let mut allowed = Vec::with_capacity(n_states * n_actions);
    for _ in 0..n_states {
        let (ln, l) = next_line("mask row")?;
        if l.len() != n_actions {
            return Err(Error::parse(ln, format!("mask row must have {n_actions} bits")));
        }
        for c in l.chars() {
            allowed.push(match c {
                '1' => true,
                '0' => false,
                _ => return Err(Error::parse(ln, "mask bits must be 0 or 1")),
            });
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::parse(ln, "trailing content"));
    }
    TabularMdp::new(n_states, n_actions, transitions, rewards, gamma, allowed)
}

fn parse<T: std::str::FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{field}`")))
}
