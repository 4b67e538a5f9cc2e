//! Hamiltonian terms, hop schedules, shield pairs, logical operators and connectors for
//! the three gadget variants.

mod double;
mod square;
mod toric;
mod triangular;

pub use double::{build_quantum_double, build_quantum_double_with, DoubleShield};
pub use square::{EdgeInfo, SquareGeometry};
pub use toric::{
    build_connector, build_hop_schedule, build_logicals, build_modified_toric, build_shield,
    build_toric, t_down, t_left, t_right, t_up, TdProfile, ToricOptions,
};
pub use triangular::{
    build_triangular, tri_head_corners, tri_t_minus, tri_t_plus, tri_tail_corners,
};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GadgetError, Result};
use crate::group::GroupTable;
use crate::lattice::TorusLattice;
use crate::op::{Key, Op, SiteLayout};
use crate::pauli::PauliOperator;

pub const TERMSET_SCHEMA: u32 = 1;

/// Couplings in units of `U`; `r` is the triangular sector penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub j: f64,
    pub u: f64,
    pub t: f64,
    pub r: Option<f64>,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            j: 0.09,
            u: 1.0,
            t: 0.375,
            r: None,
        }
    }
}

impl Couplings {
    pub fn new(j: f64, u: f64, t: f64) -> Self {
        Couplings { j, u, t, r: None }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn value(&self, c: Coupling) -> f64 {
        match c {
            Coupling::J => self.j,
            Coupling::U => self.u,
            Coupling::T => self.t,
            Coupling::R => self.r.unwrap_or(0.0),
        }
    }

    fn validate(&self, triangular: bool) -> Result<()> {
        if !(self.j > 0.0 && self.u > 0.0 && self.t > 0.0) {
            return Err(GadgetError::Validation(format!(
                "couplings must be positive, got J={} U={} t={}",
                self.j, self.u, self.t
            )));
        }
        match (triangular, self.r) {
            (true, Some(r)) if r > 0.0 => Ok(()),
            (true, _) => Err(GadgetError::Validation(
                "the triangular variant needs R > 0".into(),
            )),
            (false, Some(_)) => Err(GadgetError::Validation(
                "R is only meaningful for the triangular variant".into(),
            )),
            (false, None) => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coupling {
    J,
    U,
    T,
    R,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Plaquette,
    Edge,
    Onsite,
    Hop,
    Mixing,
    Shield,
    Penalty,
}

/// `factor · coupling · op`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    pub coupling: Coupling,
    pub factor: f64,
    pub star: Option<usize>,
    pub op: Op,
}

/// How a subspace-generating move changes the per-star label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelStep {
    Forward,
    /// Quantum double only: switch the generator index at `λ = 0`.
    Switch {
        to: u16,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub star: usize,
    pub step: LabelStep,
    pub op: Op,
}

/// Per-star label alphabet of the λ-representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LabelSpace {
    /// `λ ∈ 0..period`; `(D†)^{period/2}` is the star operator.
    Cycle { period: u16 },
    /// `(λ, g, f)` with `λ ∈ 0..4`, `g` a generator index, `f ∈ G`;
    /// encoded as `λ + 4·(g + n_gen·f)`.
    Double { group: GroupTable },
}

impl LabelSpace {
    pub fn radix(&self) -> u16 {
        match self {
            LabelSpace::Cycle { period } => *period,
            LabelSpace::Double { group } => (4 * group.generators().len() * group.order()) as u16,
        }
    }

    pub fn n_gen(&self) -> usize {
        match self {
            LabelSpace::Cycle { .. } => 1,
            LabelSpace::Double { group } => group.generators().len(),
        }
    }

    pub fn encode_double(&self, lambda: u16, g: u16, f: u16) -> u16 {
        lambda + 4 * (g + self.n_gen() as u16 * f)
    }

    /// `(λ, generator index, f)`.
    pub fn decode_double(&self, label: u16) -> (u16, u16, u16) {
        let n_gen = self.n_gen() as u16;
        (label % 4, (label / 4) % n_gen, label / (4 * n_gen))
    }

    /// Label of a star at rest given its first gadget digit.
    pub fn rest_label(&self, gadget_digit: u8) -> u16 {
        match self {
            LabelSpace::Cycle { .. } => 0,
            LabelSpace::Double { .. } => self.encode_double(0, gadget_digit as u16 / 4, 0),
        }
    }

    pub fn act(&self, label: u16, step: LabelStep) -> u16 {
        match (self, step) {
            (LabelSpace::Cycle { period }, LabelStep::Forward) => (label + 1) % period,
            (LabelSpace::Cycle { .. }, LabelStep::Switch { .. }) => label,
            (LabelSpace::Double { group }, LabelStep::Forward) => {
                let (l, g, f) = self.decode_double(label);
                if l < 3 {
                    self.encode_double(l + 1, g, f)
                } else {
                    let gen = group.generators()[g as usize];
                    self.encode_double(0, g, group.mul(gen, f as usize) as u16)
                }
            }
            (LabelSpace::Double { .. }, LabelStep::Switch { to }) => {
                let (l, _, f) = self.decode_double(label);
                self.encode_double(l, to, f)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalPair {
    pub x: PauliOperator,
    pub z: PauliOperator,
}

/// Stabilizer-level data of the qubit models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSet {
    pub stars: Vec<PauliOperator>,
    pub plaquettes: Vec<PauliOperator>,
    pub edges: Vec<PauliOperator>,
    /// Per star, the ordered two-body hop operators `A_s(m)`.
    pub schedule: Vec<Vec<PauliOperator>>,
    pub logicals: Vec<LogicalPair>,
}

/// Stabilizer-level data of the quantum double, as operators on packed configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupOps {
    /// `stars[s][g]` is `A^g_s` for every `g ∈ G`.
    pub stars: Vec<Vec<Op>>,
    pub plaquettes: Vec<Op>,
    pub edges: Vec<Op>,
    /// `schedule[s][gi][m]` is `A^g_s(m)` for generator index `gi`.
    pub schedule: Vec<Vec<Vec<Op>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Axis(u8),
}

/// A shield interaction between the gadgets at the two ends of `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShieldPair {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub orientation: Orientation,
    /// Index of the shield term inside `TermSet::terms`.
    pub term: usize,
    /// Index of the matching edge term inside `TermSet::terms`.
    pub edge_term: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Toric,
    QuantumDouble { group: GroupTable },
    Triangular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Torus(TorusLattice),
    OneStar,
    Patch2x1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSet {
    pub schema_version: u32,
    pub variant: Variant,
    pub geometry: Geometry,
    pub couplings: Couplings,
    pub layout: SiteLayout,
    pub n_stars: usize,
    /// Gadget sites of each star.
    pub gadget_sites: Vec<Vec<usize>>,
    pub labels: LabelSpace,
    pub terms: Vec<Term>,
    pub moves: Vec<Move>,
    pub shield: Vec<ShieldPair>,
    pub pauli: Option<PauliSet>,
    pub group_ops: Option<GroupOps>,
    /// Per star, `U_s` as a gadget-controlled operator.
    pub connector: Vec<Op>,
    /// All gadgets at rest, all qudits in the identity / `|0⟩`.
    pub rest: Key,
}

impl TermSet {
    pub fn coeff(&self, term: &Term) -> f64 {
        term.factor * self.couplings.value(term.coupling)
    }

    pub fn torus(&self) -> Option<&TorusLattice> {
        match &self.geometry {
            Geometry::Torus(l) => Some(l),
            _ => None,
        }
    }

    /// Rest gadgets with the qudit digits `qudits`.
    pub fn reference(&self, qudits: &[u8]) -> Result<Key> {
        let mut key = self.rest;
        if qudits.len() != self.layout.n_qudit() {
            return Err(GadgetError::SiteCountMismatch {
                left: self.layout.n_qudit(),
                right: qudits.len(),
            });
        }
        for (q, &v) in qudits.iter().enumerate() {
            if v >= self.layout.dim(self.layout.qudit(q)) {
                return Err(GadgetError::IndexOutOfRange {
                    kind: "qudit value",
                    index: v as usize,
                    limit: self.layout.dim(self.layout.qudit(q)) as usize,
                });
            }
            key = self.layout.set(key, self.layout.qudit(q), v);
        }
        Ok(key)
    }

    /// Rest gadgets with the qubits flipped by an X-type Pauli.
    pub fn reference_from_pauli(&self, p: &PauliOperator) -> Result<Key> {
        let digits: Vec<u8> = (0..self.layout.n_qudit())
            .map(|q| p.x_mask().get(q) as u8)
            .collect();
        self.reference(&digits)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: TermSet = serde_json::from_str(s)?;
        if t.schema_version != TERMSET_SCHEMA {
            return Err(GadgetError::Config(format!(
                "unsupported term-set schema {}",
                t.schema_version
            )));
        }
        Ok(t)
    }

    /// SHA-256 of the compact serialization.
    pub fn fingerprint(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        let digest = Sha256::digest(&bytes);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Re-runs every structural check of the builders.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.pauli {
            toric::validate_pauli(p, self.torus().is_some())?;
        }
        validate_moves_commute_with_plaquettes(self)
    }
}

/// Every subspace move leaves every plaquette term invariant, checked exhaustively on the
/// joint support of each overlapping pair.
pub(crate) fn validate_moves_commute_with_plaquettes(ts: &TermSet) -> Result<()> {
    let plaquettes: Vec<&Term> = ts
        .terms
        .iter()
        .filter(|t| t.kind == TermKind::Plaquette)
        .collect();
    for (mi, mv) in ts.moves.iter().enumerate() {
        let ms = mv.op.support();
        for p in &plaquettes {
            let ps = p.op.support();
            if !ms.iter().any(|s| ps.contains(s)) {
                continue;
            }
            // factors of a product outside the plaquette's support commute with it
            let (op, joint) = match &mv.op {
                Op::Product(maps) => (
                    Op::Product(
                        maps.iter()
                            .filter(|m| ps.contains(&m.site))
                            .cloned()
                            .collect(),
                    ),
                    ps.clone(),
                ),
                other => {
                    let mut joint: Vec<usize> = ms.iter().chain(&ps).copied().collect();
                    joint.sort_unstable();
                    joint.dedup();
                    (other.clone(), joint)
                }
            };
            if !commute_on_support(&ts.layout, &op, &p.op, &joint) {
                return Err(GadgetError::Validation(format!(
                    "move {mi} does not commute with a plaquette term"
                )));
            }
        }
    }
    Ok(())
}

/// Exhaustive check that a monomial `a` and a diagonal `d` commute, over every assignment
/// of the listed sites (other sites held at 0).
pub(crate) fn commute_on_support(layout: &SiteLayout, a: &Op, d: &Op, sites: &[usize]) -> bool {
    let dims: Vec<usize> = sites.iter().map(|&s| layout.dim(s) as usize).collect();
    let total: usize = dims.iter().product();
    (0..total).all(|mut idx| {
        let mut key: Key = 0;
        for (&s, &dim) in sites.iter().zip(&dims) {
            key = layout.set(key, s, (idx % dim) as u8);
            idx /= dim;
        }
        match a.apply(layout, key) {
            None => true,
            Some((k2, _)) => {
                let before = d.apply(layout, key).map_or(0.0, |x| x.1);
                let after = d.apply(layout, k2).map_or(0.0, |x| x.1);
                before == after
            }
        }
    })
}
