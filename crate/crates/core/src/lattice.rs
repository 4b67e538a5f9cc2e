//! Periodic square and triangular lattices with two qubit slots per edge.
//!
//! Stars are indexed row-major with `x` fastest: `s = i + Lx·j`.
//!
//! Square: edge `2s` is the horizontal edge `h(i,j)` from `(i,j)` to `(i+1,j)`, edge `2s+1`
//! is the vertical edge `v(i,j)` from `(i,j)` to `(i,j+1)`. Plaquette `p(i,j)` has `(i,j)` as
//! its lower-left corner.
//!
//! Triangular (lattice vectors `û0 = (1,0)`, `û1 = (0,1)`, `û2 = (-1,1)` in star
//! coordinates): edge `3s+k` runs from `s` to `s+ûk`. Triangle `2s` is the upward triangle
//! `(s, s+û0, s+û1)`, triangle `2s+1` the downward triangle `(s+û0, s+û1, s+û0+û1)`.
//!
//! Every edge carries slot 0 on the left of its direction and slot 1 on the right, so for
//! square edges slot 0 is `h^u` / `v^l` and slot 1 is `h^d` / `v^r`. A plaquette uses the
//! slot of each boundary edge that faces it.

use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Square,
    Triangular,
}

/// Role of an edge seen from one of its stars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Left,
    Right,
    Down,
    Up,
    /// Triangular edge leaving along `+ûk` (`positive`) or arriving from `-ûk`.
    Dir {
        axis: u8,
        positive: bool,
    },
}

/// The eight slots around a square-lattice star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSlots {
    /// `h^u(i-1,j)`, `h^d(i-1,j)`.
    pub left: [usize; 2],
    /// `h^u(i,j)`, `h^d(i,j)`.
    pub right: [usize; 2],
    /// `v^l(i,j-1)`, `v^r(i,j-1)`.
    pub down: [usize; 2],
    /// `v^l(i,j)`, `v^r(i,j)`.
    pub up: [usize; 2],
}

impl StarSlots {
    pub fn all(&self) -> [usize; 8] {
        let [a, b] = self.left;
        let [c, d] = self.right;
        let [e, f] = self.down;
        let [g, h] = self.up;
        [a, b, c, d, e, f, g, h]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    kind: LatticeKind,
    lx: usize,
    ly: usize,
}

impl TorusLattice {
    pub fn new(kind: LatticeKind, lx: usize, ly: usize) -> Result<Self> {
        if lx < 2 || ly < 2 {
            return Err(GadgetError::DegenerateLattice { lx, ly });
        }
        Ok(TorusLattice { kind, lx, ly })
    }

    pub fn square(lx: usize, ly: usize) -> Result<Self> {
        TorusLattice::new(LatticeKind::Square, lx, ly)
    }

    pub fn triangular(lx: usize, ly: usize) -> Result<Self> {
        TorusLattice::new(LatticeKind::Triangular, lx, ly)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn n_stars(&self) -> usize {
        self.lx * self.ly
    }

    fn edges_per_star(&self) -> usize {
        match self.kind {
            LatticeKind::Square => 2,
            LatticeKind::Triangular => 3,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.edges_per_star() * self.n_stars()
    }

    pub fn n_plaquettes(&self) -> usize {
        match self.kind {
            LatticeKind::Square => self.n_stars(),
            LatticeKind::Triangular => 2 * self.n_stars(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_edges()
    }

    pub fn n_gadget_sites(&self) -> usize {
        match self.kind {
            LatticeKind::Square => self.n_stars(),
            LatticeKind::Triangular => 6 * self.n_stars(),
        }
    }

    /// Star at `(i,j)` with periodic wrap.
    pub fn star(&self, i: isize, j: isize) -> usize {
        let i = i.rem_euclid(self.lx as isize) as usize;
        let j = j.rem_euclid(self.ly as isize) as usize;
        i + self.lx * j
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.lx, s / self.lx)
    }

    pub fn translate(&self, s: usize, dx: isize, dy: isize) -> usize {
        let (i, j) = self.coords(s);
        self.star(i as isize + dx, j as isize + dy)
    }

    fn check_star(&self, s: usize) -> Result<()> {
        if s >= self.n_stars() {
            return Err(GadgetError::IndexOutOfRange {
                kind: "star",
                index: s,
                limit: self.n_stars(),
            });
        }
        Ok(())
    }

    pub fn slot(edge: usize, side: usize) -> usize {
        2 * edge + side
    }

    /// Edge of a slot and its side.
    pub fn slot_edge(q: usize) -> (usize, usize) {
        (q / 2, q % 2)
    }

    /// Lattice step along `ûk` (triangular) or along x / y for square axes 0 / 1.
    pub fn axis_step(&self, axis: usize) -> (isize, isize) {
        match (self.kind, axis) {
            (LatticeKind::Square, 0) | (LatticeKind::Triangular, 0) => (1, 0),
            (LatticeKind::Square, _) | (LatticeKind::Triangular, 1) => (0, 1),
            (LatticeKind::Triangular, _) => (-1, 1),
        }
    }

    /// Edge leaving `s` along axis `k`.
    pub fn edge_from(&self, s: usize, axis: usize) -> usize {
        self.edges_per_star() * s + axis
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let per = self.edges_per_star();
        let (s, axis) = (e / per, e % per);
        let (dx, dy) = self.axis_step(axis);
        (s, self.translate(s, dx, dy))
    }

    pub fn edge_axis(&self, e: usize) -> usize {
        e % self.edges_per_star()
    }

    pub fn incident(&self, s: usize) -> Result<Vec<(usize, Role)>> {
        self.check_star(s)?;
        let out = match self.kind {
            LatticeKind::Square => {
                let left = self.translate(s, -1, 0);
                let down = self.translate(s, 0, -1);
                vec![
                    (2 * left, Role::Left),
                    (2 * s, Role::Right),
                    (2 * down + 1, Role::Down),
                    (2 * s + 1, Role::Up),
                ]
            }
            LatticeKind::Triangular => (0..3)
                .flat_map(|k| {
                    let (dx, dy) = self.axis_step(k);
                    let back = self.translate(s, -dx, -dy);
                    [
                        (
                            self.edge_from(s, k),
                            Role::Dir {
                                axis: k as u8,
                                positive: true,
                            },
                        ),
                        (
                            self.edge_from(back, k),
                            Role::Dir {
                                axis: k as u8,
                                positive: false,
                            },
                        ),
                    ]
                })
                .collect(),
        };
        Ok(out)
    }

    pub fn hu(&self, i: isize, j: isize) -> usize {
        Self::slot(2 * self.star(i, j), 0)
    }

    pub fn hd(&self, i: isize, j: isize) -> usize {
        Self::slot(2 * self.star(i, j), 1)
    }

    pub fn vl(&self, i: isize, j: isize) -> usize {
        Self::slot(2 * self.star(i, j) + 1, 0)
    }

    pub fn vr(&self, i: isize, j: isize) -> usize {
        Self::slot(2 * self.star(i, j) + 1, 1)
    }

    pub fn star_slots(&self, s: usize) -> StarSlots {
        let (i, j) = self.coords(s);
        let (i, j) = (i as isize, j as isize);
        StarSlots {
            left: [self.hu(i - 1, j), self.hd(i - 1, j)],
            right: [self.hu(i, j), self.hd(i, j)],
            down: [self.vl(i, j - 1), self.vr(i, j - 1)],
            up: [self.vl(i, j), self.vr(i, j)],
        }
    }

    /// Triangular edge slot `E_k(s + (di,dj))`, `side`.
    pub fn tri_slot(&self, s: usize, di: isize, dj: isize, axis: usize, side: usize) -> usize {
        Self::slot(self.edge_from(self.translate(s, di, dj), axis), side)
    }

    /// Square: `[bottom, right, top, left]` slots facing the plaquette.
    /// Triangular: the three slots facing the triangle.
    pub fn plaquette_qubits(&self, p: usize) -> Result<Vec<usize>> {
        if p >= self.n_plaquettes() {
            return Err(GadgetError::IndexOutOfRange {
                kind: "plaquette",
                index: p,
                limit: self.n_plaquettes(),
            });
        }
        Ok(match self.kind {
            LatticeKind::Square => {
                let (i, j) = self.coords(p);
                let (i, j) = (i as isize, j as isize);
                vec![
                    self.hu(i, j),
                    self.vl(i + 1, j),
                    self.hd(i, j + 1),
                    self.vr(i, j),
                ]
            }
            LatticeKind::Triangular => {
                let s = p / 2;
                if p.is_multiple_of(2) {
                    vec![
                        self.tri_slot(s, 0, 0, 0, 0),
                        self.tri_slot(s, 0, 0, 1, 1),
                        self.tri_slot(s, 1, 0, 2, 0),
                    ]
                } else {
                    vec![
                        self.tri_slot(s, 1, 0, 2, 1),
                        self.tri_slot(s, 1, 0, 1, 0),
                        self.tri_slot(s, 0, 1, 0, 1),
                    ]
                }
            }
        })
    }

    /// Triangular: the six slot pairs `A_s(k)`, `k = 0..5`, each the two slots of the
    /// triangle in sector `k` that touch `s`. Sectors run clockwise starting with the
    /// upward triangle to the upper left of `s`.
    pub fn tri_sector_slots(&self, s: usize) -> [[usize; 2]; 6] {
        let t = |di, dj, axis, side| self.tri_slot(s, di, dj, axis, side);
        [
            [t(-1, 0, 0, 0), t(0, 0, 2, 0)],
            [t(0, 0, 2, 1), t(0, 0, 1, 0)],
            [t(0, 0, 1, 1), t(0, 0, 0, 0)],
            [t(0, 0, 0, 1), t(1, -1, 2, 1)],
            [t(1, -1, 2, 0), t(0, -1, 1, 1)],
            [t(0, -1, 1, 0), t(-1, 0, 0, 1)],
        ]
    }

    /// Triangles (plaquette ids) in sectors `0..5` around `s`.
    pub fn tri_sector_plaquettes(&self, s: usize) -> [usize; 6] {
        let up = |di, dj| 2 * self.translate(s, di, dj);
        let down = |di, dj| 2 * self.translate(s, di, dj) + 1;
        [
            up(-1, 0),
            down(-1, 0),
            up(0, 0),
            down(0, -1),
            up(0, -1),
            down(-1, -1),
        ]
    }
}
