//! Square-lattice geometry shared by the toric and quantum-double builders: the periodic
//! torus plus two open fixtures used only in tests.

use serde::{Deserialize, Serialize};

use super::{Geometry, Orientation};
use crate::lattice::{StarSlots, TorusLattice};

/// An edge whose two stars are both present, so it carries `C_e` and a shield term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeInfo {
    pub id: usize,
    pub slots: [usize; 2],
    pub tail: usize,
    pub head: usize,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareGeometry {
    pub geometry: Geometry,
    pub n_stars: usize,
    pub n_slots: usize,
    pub stars: Vec<StarSlots>,
    /// `[bottom, right, top, left]` slots.
    pub plaquettes: Vec<[usize; 4]>,
    pub edges: Vec<EdgeInfo>,
}

impl SquareGeometry {
    pub fn torus(l: &TorusLattice) -> Self {
        let n = l.n_stars();
        let stars = (0..n).map(|s| l.star_slots(s)).collect();
        let plaquettes = (0..n)
            .map(|p| {
                let q = l.plaquette_qubits(p).expect("plaquette in range");
                [q[0], q[1], q[2], q[3]]
            })
            .collect();
        let edges = (0..l.n_edges())
            .map(|e| {
                let (tail, head) = l.endpoints(e);
                EdgeInfo {
                    id: e,
                    slots: [2 * e, 2 * e + 1],
                    tail,
                    head,
                    orientation: if e % 2 == 0 {
                        Orientation::Horizontal
                    } else {
                        Orientation::Vertical
                    },
                }
            })
            .collect();
        SquareGeometry {
            geometry: Geometry::Torus(*l),
            n_stars: n,
            n_slots: l.n_qubits(),
            stars,
            plaquettes,
            edges,
        }
    }

    /// One star with its eight slots and no plaquette or edge terms.
    pub fn one_star() -> Self {
        SquareGeometry {
            geometry: Geometry::OneStar,
            n_stars: 1,
            n_slots: 8,
            stars: vec![StarSlots {
                left: [0, 1],
                right: [2, 3],
                down: [4, 5],
                up: [6, 7],
            }],
            plaquettes: vec![],
            edges: vec![],
        }
    }

    /// Two stars sharing one horizontal edge; only the shared edge is interior.
    pub fn patch_2x1() -> Self {
        SquareGeometry {
            geometry: Geometry::Patch2x1,
            n_stars: 2,
            n_slots: 14,
            stars: vec![
                StarSlots {
                    left: [0, 1],
                    right: [2, 3],
                    down: [4, 5],
                    up: [6, 7],
                },
                StarSlots {
                    left: [2, 3],
                    right: [8, 9],
                    down: [10, 11],
                    up: [12, 13],
                },
            ],
            plaquettes: vec![],
            edges: vec![EdgeInfo {
                id: 1,
                slots: [2, 3],
                tail: 0,
                head: 1,
                orientation: Orientation::Horizontal,
            }],
        }
    }

    pub fn torus_lattice(&self) -> Option<&TorusLattice> {
        match &self.geometry {
            Geometry::Torus(l) => Some(l),
            _ => None,
        }
    }

    /// Slot pairs of the hop schedule `A_s(m)`, `m = 0..3`.
    pub fn schedule_slots(&self, s: usize) -> [[usize; 2]; 4] {
        let st = &self.stars[s];
        [
            [st.left[0], st.up[0]],
            [st.right[0], st.up[1]],
            [st.right[1], st.down[1]],
            [st.left[1], st.down[0]],
        ]
    }
}
