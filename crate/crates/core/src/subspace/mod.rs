//! Invariant subspaces `M(d)`: enumeration in label space, restricted Hamiltonians, the
//! one-body reduction, ground states and localized excitations.

mod reduce;
mod states;

pub use reduce::{
    lambda_reduce, reduction_deviation, ring_sectors, verify_shield_cancellation, LambdaReduction,
    RingSectors, ShieldRow, ShieldTable,
};
pub use states::{
    apply_connector, build_ground_state, create_excitation, factorization_fidelity,
    ground_state_oracle, logical_commutator, pauli_to_op, product_state, toric_factorized_overlap,
    Excitation, ExcitationKind, GroundState,
};

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GadgetError, Result};
use crate::model::{LabelSpace, Move, TermSet, Variant};
use crate::op::{Key, SparseVec};
use crate::sparse::CsrMatrix;

pub const DEFAULT_BUDGET: usize = 1 << 22;

/// `GADGET_BUDGET` if set and valid, otherwise [`DEFAULT_BUDGET`].
pub fn default_budget() -> usize {
    std::env::var("GADGET_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Mixed-radix packing of per-star labels, star 0 least significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCodec {
    radix: u64,
    n_stars: usize,
}

impl LabelCodec {
    pub fn new(radix: u16, n_stars: usize) -> Result<Self> {
        let bits = (radix as f64).log2() * n_stars as f64;
        if bits > 63.0 {
            return Err(GadgetError::Unsupported(format!(
                "{n_stars} stars with {radix} labels each do not fit a 64-bit label code"
            )));
        }
        Ok(LabelCodec {
            radix: radix as u64,
            n_stars,
        })
    }

    #[inline]
    pub fn digit(&self, code: u64, s: usize) -> u16 {
        ((code / self.radix.pow(s as u32)) % self.radix) as u16
    }

    #[inline]
    pub fn with_digit(&self, code: u64, s: usize, v: u16) -> u64 {
        let p = self.radix.pow(s as u32);
        code - self.digit(code, s) as u64 * p + v as u64 * p
    }

    pub fn encode(&self, labels: &[u16]) -> u64 {
        labels
            .iter()
            .rev()
            .fold(0, |acc, &l| acc * self.radix + l as u64)
    }

    pub fn decode(&self, code: u64) -> Vec<u16> {
        (0..self.n_stars).map(|s| self.digit(code, s)).collect()
    }
}

/// Basis of one invariant subspace.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub representative: Key,
    /// States ordered by their canonical (lexicographically smallest) label.
    pub states: Vec<Key>,
    pub index: HashMap<Key, usize>,
    pub codec: LabelCodec,
    /// Every label code naming each state, ascending.
    pub state_codes: Vec<Vec<u64>>,
    pub label_to_state: HashMap<u64, u32>,
    /// Canonical label code of the all-rest configuration.
    pub rest_code: u64,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn canonical_label(&self, i: usize) -> Vec<u16> {
        self.state_codes[i]
            .iter()
            .map(|&c| self.codec.decode(c))
            .min()
            .expect("every state has a label")
    }

    /// Number of states named by exactly `k` labels, for each `k`.
    pub fn alias_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.state_codes {
            *h.entry(c.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn n_labels(&self) -> usize {
        self.label_to_state.len()
    }

    pub fn state_of_label(&self, code: u64) -> Option<usize> {
        self.label_to_state.get(&code).map(|&i| i as usize)
    }

    pub fn to_sparse(&self, v: &[f64]) -> SparseVec {
        self.states
            .iter()
            .zip(v)
            .filter(|(_, &a)| a != 0.0)
            .map(|(&k, &a)| (k, a))
            .collect()
    }

    /// Dense coordinates; fails if `v` has weight outside the subspace.
    pub fn from_sparse(&self, v: &SparseVec) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        for (k, &a) in v {
            match self.index.get(k) {
                Some(&i) => out[i] = a,
                None if a.abs() < 1e-14 => {}
                None => {
                    return Err(GadgetError::Validation(
                        "vector has weight outside the subspace".into(),
                    ))
                }
            }
        }
        Ok(out)
    }

    pub fn dump(&self, ts: &TermSet) -> SubspaceDump {
        let mut h = Sha256::new();
        for i in 0..self.len() {
            for l in self.canonical_label(i) {
                h.update(l.to_le_bytes());
            }
        }
        SubspaceDump {
            schema_version: 1,
            variant: match &ts.variant {
                Variant::Toric => "toric".into(),
                Variant::QuantumDouble { group } => format!("quantum_double:{}", group.name()),
                Variant::Triangular => "triangular".into(),
            },
            representative: format!("{:032x}", self.representative),
            size: self.len(),
            labels: self.n_labels(),
            alias_histogram: self.alias_histogram(),
            lambda_table_sha256: h.finalize().iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDump {
    pub schema_version: u32,
    pub variant: String,
    pub representative: String,
    pub size: usize,
    pub labels: usize,
    pub alias_histogram: BTreeMap<usize, usize>,
    pub lambda_table_sha256: String,
}

fn rest_labels(ts: &TermSet, reference: Key) -> Result<Vec<u16>> {
    (0..ts.n_stars)
        .map(|s| {
            let sites = &ts.gadget_sites[s];
            let at_rest = match &ts.labels {
                LabelSpace::Cycle { .. } => sites
                    .iter()
                    .all(|&g| ts.layout.get(reference, g) == ts.layout.get(ts.rest, g)),
                LabelSpace::Double { .. } => ts.layout.get(reference, sites[0]).is_multiple_of(4),
            };
            if !at_rest {
                return Err(GadgetError::Validation(format!(
                    "reference has gadget {s} away from rest"
                )));
            }
            Ok(ts.labels.rest_label(ts.layout.get(reference, sites[0])))
        })
        .collect()
}

/// Closure of `reference` under every subspace move, tracked in label space.
pub fn enumerate_subspace(ts: &TermSet, reference: Key, budget: usize) -> Result<SubspaceBasis> {
    let codec = LabelCodec::new(ts.labels.radix(), ts.n_stars)?;
    let rest = rest_labels(ts, reference)?;
    let rest_code = codec.encode(&rest);
    let by_star: Vec<Vec<&Move>> = (0..ts.n_stars)
        .map(|s| ts.moves.iter().filter(|m| m.star == s).collect())
        .collect();

    let mut label_key: HashMap<u64, Key> = HashMap::from([(rest_code, reference)]);
    let mut key_state: HashMap<Key, u32> = HashMap::from([(reference, 0)]);
    let mut keys = vec![reference];
    let mut codes: Vec<Vec<u64>> = vec![vec![rest_code]];
    let mut queue = VecDeque::from([rest_code]);
    while let Some(code) = queue.pop_front() {
        let key = label_key[&code];
        for (s, moves) in by_star.iter().enumerate() {
            for mv in moves {
                let Some((k2, _)) = mv.op.apply(&ts.layout, key) else {
                    continue;
                };
                let l2 = ts.labels.act(codec.digit(code, s), mv.step);
                let c2 = codec.with_digit(code, s, l2);
                if let Some(&prev) = label_key.get(&c2) {
                    if prev != k2 {
                        return Err(GadgetError::InconsistentLabel {
                            label: codec.decode(c2),
                        });
                    }
                    continue;
                }
                label_key.insert(c2, k2);
                queue.push_back(c2);
                let next = keys.len() as u32;
                let st = *key_state.entry(k2).or_insert(next);
                if st == next {
                    if keys.len() >= budget {
                        return Err(GadgetError::BudgetExceeded { budget });
                    }
                    keys.push(k2);
                    codes.push(Vec::new());
                }
                codes[st as usize].push(c2);
            }
        }
    }

    let mut order: Vec<(Vec<u16>, usize)> = codes
        .iter_mut()
        .enumerate()
        .map(|(i, c)| {
            c.sort_unstable();
            let canon = c.iter().map(|&x| codec.decode(x)).min().expect("labelled");
            (canon, i)
        })
        .collect();
    order.sort();
    let states: Vec<Key> = order.iter().map(|&(_, i)| keys[i]).collect();
    let state_codes: Vec<Vec<u64>> = order
        .iter()
        .map(|&(_, i)| std::mem::take(&mut codes[i]))
        .collect();
    let index = states.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let label_to_state = state_codes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&x| (x, i as u32)))
        .collect();
    Ok(SubspaceBasis {
        representative: reference,
        states,
        index,
        codec,
        state_codes,
        label_to_state,
        rest_code,
    })
}

/// The restricted Hamiltonian; every term is applied to every basis state and must stay
/// inside the subspace.
pub fn assemble_restricted(ts: &TermSet, basis: &SubspaceBasis) -> Result<CsrMatrix> {
    let coeffs: Vec<f64> = ts.terms.iter().map(|t| ts.coeff(t)).collect();
    let columns = basis
        .states
        .par_iter()
        .enumerate()
        .map(|(j, &key)| {
            let mut col = Vec::with_capacity(ts.terms.len());
            let mut diag = 0.0;
            for (ti, term) in ts.terms.iter().enumerate() {
                if let Some((k2, a)) = term.op.apply(&ts.layout, key) {
                    if k2 == key {
                        diag += coeffs[ti] * a;
                    } else {
                        let i = *basis
                            .index
                            .get(&k2)
                            .ok_or(GadgetError::OutOfBasis { term: ti, state: j })?;
                        col.push((i, coeffs[ti] * a));
                    }
                }
            }
            col.push((j, diag));
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    // columns of H are the rows of Hᵀ; symmetry makes them the rows of H
    let m = CsrMatrix::from_rows(columns)?;
    let asym = m.max_asymmetry();
    if asym > 1e-12 * m.norm_bound().max(1.0) {
        return Err(GadgetError::NotSymmetric(asym));
    }
    Ok(m)
}

/// Checks that every term maps the subspace into itself.
pub fn verify_invariance(ts: &TermSet, basis: &SubspaceBasis) -> Result<()> {
    assemble_restricted(ts, basis).map(|_| ())
}

/// `H v` by direct term application.
pub fn apply_hamiltonian(ts: &TermSet, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for term in &ts.terms {
        let c = ts.coeff(term);
        for (&k, &a) in v {
            if let Some((k2, b)) = term.op.apply(&ts.layout, k) {
                *out.entry(k2).or_insert(0.0) += c * a * b;
            }
        }
    }
    out
}

/// `‖H v − E v‖₂` and the Rayleigh quotient, by direct term application.
pub fn eigen_residual(ts: &TermSet, v: &SparseVec, energy: f64) -> (f64, f64) {
    let hv = apply_hamiltonian(ts, v);
    let norm2: f64 = v.values().map(|a| a * a).sum();
    let rayleigh = crate::op::sparse_dot(v, &hv) / norm2;
    let mut r = hv;
    crate::op::sparse_axpy(&mut r, -energy, v);
    (crate::op::sparse_norm(&r), rayleigh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusLattice;
    use crate::model::{build_toric, Couplings, SquareGeometry, ToricOptions};

    #[test]
    fn codec_round_trip() {
        let c = LabelCodec::new(8, 4).unwrap();
        let l = vec![3, 0, 7, 5];
        assert_eq!(c.decode(c.encode(&l)), l);
        assert_eq!(c.digit(c.with_digit(c.encode(&l), 2, 1), 2), 1);
        assert!(LabelCodec::new(24, 14).is_err());
    }

    #[test]
    fn one_star_has_eight_states() {
        let ts = build_toric(
            &SquareGeometry::one_star(),
            Couplings::default(),
            &ToricOptions::default(),
        )
        .unwrap();
        let b = enumerate_subspace(&ts, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.alias_histogram(), BTreeMap::from([(1, 8)]));
    }

    #[test]
    fn budget_is_enforced() {
        let g = SquareGeometry::torus(&TorusLattice::square(2, 2).unwrap());
        let ts = build_toric(&g, Couplings::default(), &ToricOptions::default()).unwrap();
        assert!(matches!(
            enumerate_subspace(&ts, 0, 100),
            Err(GadgetError::BudgetExceeded { budget: 100 })
        ));
    }
}
