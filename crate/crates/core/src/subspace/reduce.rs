//! The λ-representation: per-star one-body matrices, the diagonal residual, and the edge
//! versus shield tables.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SubspaceBasis;
use crate::error::{GadgetError, Result};
use crate::model::{Orientation, TermKind, TermSet};
use crate::sparse::CsrMatrix;
use crate::spectral::symmetric_eigen;

#[derive(Clone, Debug)]
pub struct LambdaReduction {
    pub radix: usize,
    /// `h[s]` acts on the label of star `s`, all other stars held at rest.
    pub h: Vec<DMatrix<f64>>,
    /// Per state, `⟨H_e + H_shield⟩`.
    pub residual: Vec<f64>,
    /// Per state, `⟨H_p⟩`.
    pub plaquette: Vec<f64>,
}

impl LambdaReduction {
    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Plaquette energy if it is the same on every state.
    pub fn plaquette_constant(&self) -> Option<f64> {
        let first = *self.plaquette.first()?;
        self.plaquette.iter().all(|&p| p == first).then_some(first)
    }
}

pub fn lambda_reduce(ts: &TermSet, basis: &SubspaceBasis) -> Result<LambdaReduction> {
    let radix = ts.labels.radix() as usize;
    let codec = &basis.codec;
    let mut h = Vec::with_capacity(ts.n_stars);
    for s in 0..ts.n_stars {
        let mut m = DMatrix::zeros(radix, radix);
        for lambda in 0..radix {
            let code = codec.with_digit(basis.rest_code, s, lambda as u16);
            let Some(i) = basis.state_of_label(code) else {
                continue;
            };
            let key = basis.states[i];
            for term in ts.terms.iter().filter(|t| t.star == Some(s)) {
                let Some((k2, a)) = term.op.apply(&ts.layout, key) else {
                    continue;
                };
                let j = *basis.index.get(&k2).ok_or_else(|| {
                    GadgetError::Validation("star term leaves the subspace".into())
                })?;
                let target = basis.state_codes[j]
                    .iter()
                    .find(|&&c| {
                        (0..ts.n_stars)
                            .all(|r| r == s || codec.digit(c, r) == codec.digit(basis.rest_code, r))
                    })
                    .ok_or_else(|| {
                        GadgetError::Validation(format!("a term of star {s} moves another star"))
                    })?;
                m[(codec.digit(*target, s) as usize, lambda)] += ts.coeff(term) * a;
            }
        }
        h.push(m);
    }

    let mut residual = vec![0.0; basis.len()];
    let mut plaquette = vec![0.0; basis.len()];
    for (i, &key) in basis.states.iter().enumerate() {
        for term in ts.terms.iter().filter(|t| t.star.is_none()) {
            let Some((k2, a)) = term.op.apply(&ts.layout, key) else {
                continue;
            };
            if k2 != key {
                return Err(GadgetError::NonDiagonalResidual(format!(
                    "{:?} term is off-diagonal on state {i}",
                    term.kind
                )));
            }
            let v = ts.coeff(term) * a;
            match term.kind {
                TermKind::Plaquette => plaquette[i] += v,
                _ => residual[i] += v,
            }
        }
    }
    Ok(LambdaReduction {
        radix,
        h,
        residual,
        plaquette,
    })
}

/// Largest entry of `H − (Σ_s h_s + residual + plaquette)` over the subspace.
pub fn reduction_deviation(
    basis: &SubspaceBasis,
    red: &LambdaReduction,
    h: &CsrMatrix,
) -> Result<f64> {
    let codec = &basis.codec;
    let mut worst: f64 = 0.0;
    for j in 0..basis.len() {
        let code = codec.encode(&basis.canonical_label(j));
        let mut col: Vec<(usize, f64)> = vec![(j, red.residual[j] + red.plaquette[j])];
        for (s, hs) in red.h.iter().enumerate() {
            let l = codec.digit(code, s) as usize;
            for l2 in 0..red.radix {
                let v = hs[(l2, l)];
                if v == 0.0 {
                    continue;
                }
                let i = basis
                    .state_of_label(codec.with_digit(code, s, l2 as u16))
                    .ok_or_else(|| {
                        GadgetError::Validation("reduced move leaves the label space".into())
                    })?;
                col.push((i, v));
            }
        }
        col.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for (i, v) in col {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        let direct: Vec<(usize, f64)> = h.row(j).collect();
        for &(i, v) in &merged {
            worst = worst.max((v - h.get(j, i)).abs());
        }
        for (i, v) in direct {
            if merged.binary_search_by_key(&i, |e| e.0).is_err() {
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Eigen-decomposition of a ring matrix split by the half-period shift `λ → λ + n/2`.
#[derive(Clone, Debug)]
pub struct RingSectors {
    pub even_values: Vec<f64>,
    pub odd_values: Vec<f64>,
    /// Lifted eigenvectors on the full ring, columns match the values.
    pub even_vectors: DMatrix<f64>,
    pub odd_vectors: DMatrix<f64>,
}

impl RingSectors {
    pub fn e0(&self) -> f64 {
        self.even_values[0]
    }

    pub fn even_gap(&self) -> f64 {
        self.even_values[1] - self.even_values[0]
    }

    pub fn odd_gap(&self) -> f64 {
        self.odd_values[0] - self.even_values[0]
    }

    pub fn alpha0(&self) -> Vec<f64> {
        let v: Vec<f64> = self.even_vectors.column(0).iter().copied().collect();
        // fix the sign so amplitudes are reproducible
        let sign = if v.iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        v.iter().map(|x| sign * x).collect()
    }

    pub fn alpha_odd(&self) -> Vec<f64> {
        let v: Vec<f64> = self.odd_vectors.column(0).iter().copied().collect();
        let first = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        v.iter().map(|x| x * first.signum()).collect()
    }
}

/// `h` must commute with the half-period shift.
pub fn ring_sectors(h: &DMatrix<f64>) -> Result<RingSectors> {
    let n = h.nrows();
    if !n.is_multiple_of(2) {
        return Err(GadgetError::Validation("ring length must be even".into()));
    }
    let half = n / 2;
    for a in 0..n {
        for b in 0..n {
            if (h[(a, b)] - h[((a + half) % n, (b + half) % n)]).abs() > 1e-14 {
                return Err(GadgetError::Validation(
                    "one-body matrix is not invariant under the half-period shift".into(),
                ));
            }
        }
    }
    let block =
        |sign: f64| DMatrix::from_fn(half, half, |a, b| h[(a, b)] + sign * h[(a, b + half)]);
    let lift = |vecs: &DMatrix<f64>, sign: f64| {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_fn(n, half, |a, c| {
            if a < half {
                r * vecs[(a, c)]
            } else {
                sign * r * vecs[(a - half, c)]
            }
        })
    };
    let (ev, evec) = symmetric_eigen(block(1.0));
    let (od, ovec) = symmetric_eigen(block(-1.0));
    Ok(RingSectors {
        even_vectors: lift(&evec, 1.0),
        odd_vectors: lift(&ovec, -1.0),
        even_values: ev,
        odd_values: od,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShieldRow {
    pub lambda: u16,
    pub lambda2: u16,
    /// Eigenvalue of the edge operator (`C_e` or its projector).
    pub edge_value: f64,
    /// Value of the shield factor.
    pub shield_value: f64,
    /// `H_e + H_shield` on this pair, in units of `J`.
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShieldTable {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub orientation: Orientation,
    pub rows: Vec<ShieldRow>,
    pub mismatches: usize,
}

/// For every shield pair, the edge and shield values with the two end stars at every
/// label pair and all other stars at rest. `basis` must be an `M(0)`-type subspace.
pub fn verify_shield_cancellation(ts: &TermSet, basis: &SubspaceBasis) -> Result<Vec<ShieldTable>> {
    let radix = ts.labels.radix();
    let codec = &basis.codec;
    let value = |ti: usize, key| {
        ts.terms[ti]
            .op
            .apply(&ts.layout, key)
            .map_or(0.0, |(_, a)| a)
    };
    ts.shield
        .iter()
        .map(|sp| {
            let mut rows = Vec::with_capacity(radix as usize * radix as usize);
            for l1 in 0..radix {
                for l2 in 0..radix {
                    let code = codec.with_digit(
                        codec.with_digit(basis.rest_code, sp.tail, l1),
                        sp.head,
                        l2,
                    );
                    let i = basis.state_of_label(code).ok_or_else(|| {
                        GadgetError::Validation("label pair missing from the subspace".into())
                    })?;
                    let key = basis.states[i];
                    let edge_value = value(sp.edge_term, key);
                    let shield_value = value(sp.term, key);
                    let sum = ts.terms[sp.edge_term].factor * edge_value
                        + ts.terms[sp.term].factor * shield_value;
                    rows.push(ShieldRow {
                        lambda: l1,
                        lambda2: l2,
                        edge_value,
                        shield_value,
                        sum,
                    });
                }
            }
            Ok(ShieldTable {
                edge: sp.edge,
                tail: sp.tail,
                head: sp.head,
                orientation: sp.orientation,
                mismatches: rows.iter().filter(|r| r.sum != 0.0).count(),
                rows,
            })
        })
        .collect()
}
