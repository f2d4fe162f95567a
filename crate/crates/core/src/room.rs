//! The room gridworld: a square grid with a 3×3 reward block in each corner.
//!
//! Gold blocks (+1) sit at the `(1,1)` and `(n,n)` corners, red blocks (−1)
//! at `(1,n)` and `(n,1)`. Moves are deterministic; moving into a wall leaves
//! the agent in place. States are numbered row-major from 1-indexed
//! coordinates: `s = (row − 1)·n + (col − 1)`.
//!
//! The stable variant removes every action that would increase the Manhattan
//! distance to the nearest gold block, which turns the distance to the gold
//! corners into a Lyapunov function while keeping the optimal policy.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::TabularMdp;

pub const ROOM_SIZE: usize = 25;
pub const ROOM_GAMMA: f64 = 0.95;
pub const BLOCK: usize = 3;

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;
pub const ACTION_NAMES: [&str; 4] = ["up", "down", "left", "right"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Free,
    Stable,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Variant::Free),
            "stable" => Ok(Variant::Stable),
            other => Err(Error::InvalidArgument(format!("unknown domain variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoomDomain {
    pub mdp: TabularMdp,
    pub size: usize,
    /// 1-indexed `(row, col)` per state.
    pub coords: Vec<(usize, usize)>,
    pub gold_cells: Vec<usize>,
    pub red_cells: Vec<usize>,
    pub variant: Variant,
}

/// A candidate Lyapunov function: values per state, the exception set `B`,
/// and the contraction factor once computed.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpec {
    pub values: Vec<f64>,
    pub exception_set: Vec<usize>,
    pub beta: Option<f64>,
}

impl LyapunovSpec {
    pub fn new(values: Vec<f64>, exception_set: Vec<usize>) -> Result<Self> {
        if let Some(s) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("Lyapunov value at state {s} is negative")));
        }
        if exception_set.iter().any(|&s| s >= values.len()) {
            return Err(Error::InvalidArgument("exception state out of range".into()));
        }
        Ok(Self {
            values,
            exception_set,
            beta: None,
        })
    }

    pub fn in_exception_set(&self, s: usize) -> bool {
        self.exception_set.contains(&s)
    }
}

/// The 25×25 room domain.
pub fn build_room_domain(variant: Variant) -> RoomDomain {
    RoomDomain::with_size(ROOM_SIZE, variant).expect("default room size is valid")
}

impl RoomDomain {
    /// Room of side `size` (at least 6 so the four corner blocks are disjoint).
    pub fn with_size(size: usize, variant: Variant) -> Result<Self> {
        if size < 2 * BLOCK {
            return Err(Error::InvalidArgument(format!("room size {size} below {}", 2 * BLOCK)));
        }
        let n_states = size * size;
        let coords: Vec<(usize, usize)> = (0..n_states).map(|s| (s / size + 1, s % size + 1)).collect();
        let far = size - BLOCK + 1;
        let in_block = |r: usize, c: usize, r0: usize, c0: usize| {
            (r0..r0 + BLOCK).contains(&r) && (c0..c0 + BLOCK).contains(&c)
        };
        let mut gold_cells = Vec::new();
        let mut red_cells = Vec::new();
        let mut rewards = vec![0.0; n_states];
        for (s, &(r, c)) in coords.iter().enumerate() {
            if in_block(r, c, 1, 1) || in_block(r, c, far, far) {
                gold_cells.push(s);
                rewards[s] = 1.0;
            } else if in_block(r, c, 1, far) || in_block(r, c, far, 1) {
                red_cells.push(s);
                rewards[s] = -1.0;
            }
        }

        let mut transitions = Vec::with_capacity(n_states * 4);
        let mut allowed = Vec::with_capacity(n_states * 4);
        for &(r, c) in &coords {
            let here = gold_distance(size, r, c);
            for a in 0..4 {
                let (nr, nc) = step(size, r, c, a);
                let ok = match variant {
                    Variant::Free => true,
                    Variant::Stable => gold_distance(size, nr, nc) <= here,
                };
                allowed.push(ok);
                transitions.push(if ok {
                    vec![((nr - 1) * size + (nc - 1), 1.0)]
                } else {
                    Vec::new()
                });
            }
        }
        let mdp = TabularMdp::new(n_states, 4, transitions, rewards, ROOM_GAMMA, allowed)?;
        Ok(Self {
            mdp,
            size,
            coords,
            gold_cells,
            red_cells,
            variant,
        })
    }

    pub fn state(&self, row: usize, col: usize) -> usize {
        (row - 1) * self.size + (col - 1)
    }

    pub fn n_states(&self) -> usize {
        self.size * self.size
    }

    /// Image of `s` under the 180° rotation `(r, c) → (n+1−r, n+1−c)`.
    pub fn rotate(&self, s: usize) -> usize {
        let (r, c) = self.coords[s];
        self.state(self.size + 1 - r, self.size + 1 - c)
    }

    /// Deterministic successor of `(s, a)` ignoring the action mask.
    pub fn next_state(&self, s: usize, a: usize) -> usize {
        let (r, c) = self.coords[s];
        let (nr, nc) = step(self.size, r, c, a);
        self.state(nr, nc)
    }

    /// Manhattan distances to the `(1,1)` and `(n,n)` gold blocks.
    pub fn gold_block_distances(&self, s: usize) -> (usize, usize) {
        let (r, c) = self.coords[s];
        block_distances(self.size, r, c)
    }

    /// Equidistant from both gold blocks.
    pub fn on_ridge(&self, s: usize) -> bool {
        let (a, b) = self.gold_block_distances(s);
        a == b
    }

    /// Coordinates as `(row, col)` reals, the input space of the RBF features.
    pub fn feature_coords(&self) -> Vec<[f64; 2]> {
        self.coords.iter().map(|&(r, c)| [r as f64, c as f64]).collect()
    }

    /// `state,row,col` sidecar CSV.
    pub fn coords_csv(&self) -> String {
        let mut out = String::from("state,row,col\n");
        for (s, (r, c)) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "{s},{r},{c}");
        }
        out
    }
}

/// Manhattan distance to the nearest of the corner states `(1,1)` and
/// `(n,n)`, with those two corners as the exception set.
pub fn manhattan_lyapunov(domain: &RoomDomain) -> LyapunovSpec {
    let n = domain.size;
    let values = domain
        .coords
        .iter()
        .map(|&(r, c)| ((r - 1) + (c - 1)).min((n - r) + (n - c)) as f64)
        .collect();
    LyapunovSpec {
        values,
        exception_set: vec![domain.state(1, 1), domain.state(n, n)],
        beta: None,
    }
}

fn step(size: usize, r: usize, c: usize, a: usize) -> (usize, usize) {
    match a {
        UP => (r.saturating_sub(1).max(1), c),
        DOWN => ((r + 1).min(size), c),
        LEFT => (r, c.saturating_sub(1).max(1)),
        RIGHT => (r, (c + 1).min(size)),
        _ => unreachable!("room domain has four actions"),
    }
}

fn block_distances(size: usize, r: usize, c: usize) -> (usize, usize) {
    let near = r.saturating_sub(BLOCK) + c.saturating_sub(BLOCK);
    let far_edge = size - BLOCK + 1;
    let far = far_edge.saturating_sub(r) + far_edge.saturating_sub(c);
    (near, far)
}

fn gold_distance(size: usize, r: usize, c: usize) -> usize {
    let (a, b) = block_distances(size, r, c);
    a.min(b)
}
