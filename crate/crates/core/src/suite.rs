//! Verification suites and sector spectra, each producing report checks.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::algebra_suite;
use crate::double::{moves_commute, qd_enumerate, qd_ground_state, qd_lambda_reduce};
use crate::error::{GadgetError, Result};
use crate::model::{TermSet, Variant};
use crate::op::Key;
use crate::pauli::PauliOperator;
use crate::report::{Check, Oracle};
use crate::spectral::{eigensolve, ground_info, SolverConfig, Spectrum};
use crate::subspace::{
    apply_connector, assemble_restricted, build_ground_state, create_excitation,
    enumerate_subspace, factorization_fidelity, lambda_reduce, logical_commutator,
    reduction_deviation, toric_factorized_overlap, verify_invariance, verify_shield_cancellation,
    ExcitationKind, SubspaceBasis,
};

/// Tolerance for eigen-residuals and degeneracies, in units of `U`.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Tolerance for sums of a handful of couplings that cancel exactly in exact arithmetic.
pub const ROUNDING_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Shield,
    Invariance,
    Unitary,
    Excitation,
}

impl FromStr for Suite {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "shield" => Suite::Shield,
            "invariance" => Suite::Invariance,
            "unitary" => Suite::Unitary,
            "excitation" => Suite::Excitation,
            _ => return Err(GadgetError::Config(format!("unknown suite {s:?}"))),
        })
    }
}

pub fn run_suite(ts: &TermSet, suite: Suite, budget: usize) -> Result<Vec<Check>> {
    match suite {
        Suite::Algebra => algebra_checks(ts),
        Suite::Shield => shield_checks(ts, &ground_subspace(ts, budget)?),
        Suite::Invariance => invariance_checks(ts, budget),
        Suite::Unitary => unitary_checks(ts, &ground_subspace(ts, budget)?),
        Suite::Excitation => excitation_checks(ts, &ground_subspace(ts, budget)?),
    }
}

fn is_double(ts: &TermSet) -> bool {
    matches!(ts.variant, Variant::QuantumDouble { .. })
}

/// `M(0)` with every term checked to stay inside.
pub fn ground_subspace(ts: &TermSet, budget: usize) -> Result<SubspaceBasis> {
    if is_double(ts) {
        return qd_enumerate(ts, ts.rest, budget);
    }
    let b = enumerate_subspace(ts, ts.rest, budget)?;
    verify_invariance(ts, &b)?;
    Ok(b)
}

fn algebra_checks(ts: &TermSet) -> Result<Vec<Check>> {
    let r = algebra_suite(ts)?;
    let ex = Oracle::ExactAlgebra;
    let mut out = vec![
        Check::count("stabilizers_commute", r.noncommuting_pairs, 0, ex),
        Check::count(
            "schedule_commutes_with_plaquettes",
            r.schedule_violations,
            0,
            ex,
        ),
        Check::count("half_cycle_is_star", r.half_cycle_failures, 0, ex),
        Check::count("full_cycle_is_identity", r.full_cycle_failures, 0, ex),
    ];
    if let Some(id) = r.star_product_identity {
        out.push(Check::new("star_product_is_identity", id, id, ex).expect(true, 0.0));
    }
    if let Some(n) = r.number_violations {
        out.push(Check::count("gadget_number_conserved", n, 0, ex));
    }
    Ok(out)
}

fn shield_checks(ts: &TermSet, basis: &SubspaceBasis) -> Result<Vec<Check>> {
    let tables = verify_shield_cancellation(ts, basis)?;
    let rows: usize = tables.iter().map(|t| t.rows.len()).sum();
    let mismatches: usize = tables.iter().map(|t| t.mismatches).sum();
    let red = lambda_reduce(ts, basis)?;
    let scale = ts.couplings.j.abs().max(1.0);
    Ok(vec![
        Check::new(
            "shield_tables",
            !tables.is_empty(),
            (tables.len(), rows),
            Oracle::ExactAlgebra,
        ),
        Check::count("shield_mismatches", mismatches, 0, Oracle::ExactAlgebra),
        Check::at_most(
            "edge_plus_shield_residual",
            red.max_abs_residual(),
            ROUNDING_TOL * scale,
            Oracle::ExactAlgebra,
        ),
    ])
}

fn invariance_checks(ts: &TermSet, budget: usize) -> Result<Vec<Check>> {
    let b = ground_subspace(ts, budget)?;
    let mut out = vec![
        Check::new("ground_subspace_closed", true, b.len(), Oracle::BfsCount),
        Check::new(
            "alias_histogram",
            true,
            b.alias_histogram(),
            Oracle::BfsCount,
        ),
    ];
    let h = assemble_restricted(ts, &b)?;
    if is_double(ts) {
        let r = qd_lambda_reduce(ts, &b)?;
        let dev = r.deviation.iter().map(|d| d.max()).fold(0.0, f64::max);
        out.push(Check::at_most(
            "one_body_matches_label_algebra",
            dev,
            1e-12,
            Oracle::ExactAlgebra,
        ));
        out.push(Check::new(
            "moves_commute",
            moves_commute(ts, &b),
            true,
            Oracle::ExactAlgebra,
        ));
        let dev = reduction_deviation(&b, &r.reduction, &h)?;
        out.push(Check::at_most(
            "reduction_deviation",
            dev,
            1e-12,
            Oracle::ExactAlgebra,
        ));
    } else {
        let red = lambda_reduce(ts, &b)?;
        let dev = reduction_deviation(&b, &red, &h)?;
        out.push(Check::at_most(
            "reduction_deviation",
            dev,
            1e-12,
            Oracle::ExactAlgebra,
        ));
        let plaq = red.plaquette_constant();
        out.push(Check::new(
            "plaquette_constant",
            plaq.is_some(),
            plaq,
            Oracle::ExactAlgebra,
        ));
    }
    Ok(out)
}

fn unitary_checks(ts: &TermSet, basis: &SubspaceBasis) -> Result<Vec<Check>> {
    let h = assemble_restricted(ts, basis)?;
    if is_double(ts) {
        let red = qd_lambda_reduce(ts, basis)?;
        let gs = qd_ground_state(ts, basis, &red.reduction, &h)?;
        let plaq = gs
            .plaquettes
            .iter()
            .map(|p| (p - 1.0).abs())
            .fold(0.0, f64::max);
        return Ok(vec![
            Check::at_most(
                "product_state_residual",
                gs.residual,
                SPECTRAL_TOL,
                Oracle::ProductFormula,
            ),
            Check::close(
                "factorization_fidelity",
                gs.fidelity,
                1.0,
                SPECTRAL_TOL,
                Oracle::ExactAlgebra,
            ),
            Check::at_most(
                "plaquettes_satisfied",
                plaq,
                SPECTRAL_TOL,
                Oracle::ExactAlgebra,
            ),
        ]);
    }
    let pauli = ts
        .pauli
        .as_ref()
        .ok_or_else(|| GadgetError::Unsupported("needs Pauli logicals".into()))?;
    let red = lambda_reduce(ts, basis)?;
    let gs = build_ground_state(basis, &red, &h)?;
    let psi = basis.to_sparse(&gs.vector);
    let u = apply_connector(ts, &psi, false)?;
    let a0 = gs.sectors[0].alpha0();
    let mut out = vec![
        Check::at_most(
            "product_state_residual",
            gs.residual,
            SPECTRAL_TOL,
            Oracle::ProductFormula,
        ),
        Check::close(
            "factorization_fidelity",
            factorization_fidelity(ts, &u),
            1.0,
            SPECTRAL_TOL,
            Oracle::ExactAlgebra,
        ),
        Check::close(
            "toric_factorized_overlap",
            toric_factorized_overlap(ts, &u, &a0)?,
            1.0,
            SPECTRAL_TOL,
            Oracle::ExactAlgebra,
        ),
    ];
    for (i, l) in pauli.logicals.iter().enumerate() {
        for (name, p) in [("x", &l.x), ("z", &l.z)] {
            out.push(Check::at_most(
                format!("logical_{name}{}_commutes", i + 1),
                logical_commutator(ts, p, &psi)?,
                SPECTRAL_TOL,
                Oracle::ExactAlgebra,
            ));
        }
    }
    Ok(out)
}

/// The excitations checked by the excitation suite on an `L×L` torus.
pub fn standard_excitations(ts: &TermSet) -> Result<Vec<ExcitationKind>> {
    let l = ts
        .torus()
        .ok_or_else(|| GadgetError::Unsupported("excitations need a torus".into()))?;
    let far = l.star(1, 1);
    Ok(vec![
        ExcitationKind::VortexPair { a: 0, b: far },
        ExcitationKind::ChargePair {
            row: 0,
            start: 0,
            len: 1,
        },
        ExcitationKind::FluxPair {
            col: 0,
            start: 0,
            len: 1,
        },
        ExcitationKind::SingleOdd { star: 0 },
    ])
}

fn excitation_checks(ts: &TermSet, basis: &SubspaceBasis) -> Result<Vec<Check>> {
    if ts.variant != Variant::Toric {
        return Err(GadgetError::Unsupported(
            "the excitation suite is for the toric model".into(),
        ));
    }
    let h = assemble_restricted(ts, basis)?;
    let red = lambda_reduce(ts, basis)?;
    let gs = build_ground_state(basis, &red, &h)?;
    let mut out = Vec::new();
    for kind in standard_excitations(ts)? {
        let e = create_excitation(ts, basis, &gs, kind)?;
        let tag = match kind {
            ExcitationKind::VortexPair { .. } => "vortex_pair",
            ExcitationKind::ChargePair { .. } => "charge_pair",
            ExcitationKind::FluxPair { .. } => "flux_pair",
            ExcitationKind::SingleOdd { .. } => {
                // a lone odd star is outside M(0); the construction must vanish
                out.push(Check::at_most(
                    "single_odd_annihilated",
                    e.raw_norm,
                    SPECTRAL_TOL,
                    Oracle::ExactAlgebra,
                ));
                continue;
            }
        };
        out.push(Check::at_most(
            format!("{tag}_residual"),
            e.residual,
            SPECTRAL_TOL,
            Oracle::ExactAlgebra,
        ));
        out.push(Check::close(
            format!("{tag}_energy"),
            e.rayleigh,
            e.expected_energy,
            SPECTRAL_TOL,
            Oracle::ProductFormula,
        ));
    }
    Ok(out)
}

/// Which invariant subspaces to diagonalize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorSpec {
    /// `M(0)`.
    Zero,
    /// `M(0)` and its images under `X̄₁`, `X̄₂`, `X̄₁X̄₂`.
    All,
    /// One logical sector, `(x1, x2)` flags.
    Logical(bool, bool),
    /// `M(d)` for explicit qudit digits.
    Digits(Vec<u8>),
}

/// `0`, `all`, `x1`, `x2`, `x1x2`, or `d:` followed by one digit per qudit.
impl FromStr for SectorSpec {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "0" => SectorSpec::Zero,
            "all" => SectorSpec::All,
            "x1" => SectorSpec::Logical(true, false),
            "x2" => SectorSpec::Logical(false, true),
            "x1x2" => SectorSpec::Logical(true, true),
            other => match other.strip_prefix("d:") {
                Some(d) => SectorSpec::Digits(
                    d.chars()
                        .map(|c| {
                            c.to_digit(10).map(|v| v as u8).ok_or_else(|| {
                                GadgetError::Config(format!("bad digit {c:?} in sector spec"))
                            })
                        })
                        .collect::<Result<_>>()?,
                ),
                None => return Err(GadgetError::Config(format!("unknown sector {other:?}"))),
            },
        })
    }
}

fn logical_reference(ts: &TermSet, x1: bool, x2: bool) -> Result<Key> {
    let pauli = ts
        .pauli
        .as_ref()
        .ok_or_else(|| GadgetError::Unsupported("logical sectors need Pauli logicals".into()))?;
    let n = pauli.stars[0].n_sites();
    let chosen = [x1, x2]
        .into_iter()
        .zip(&pauli.logicals)
        .filter(|(on, _)| *on)
        .map(|(_, l)| &l.x);
    ts.reference_from_pauli(&PauliOperator::product(n, chosen)?)
}

/// Named reference configurations for a sector spec.
pub fn sector_references(ts: &TermSet, spec: &SectorSpec) -> Result<Vec<(String, Key)>> {
    Ok(match spec {
        SectorSpec::Zero => vec![("0".into(), ts.rest)],
        SectorSpec::All => [(false, false), (true, false), (false, true), (true, true)]
            .into_iter()
            .map(|(a, b)| Ok((sector_name(a, b), logical_reference(ts, a, b)?)))
            .collect::<Result<_>>()?,
        SectorSpec::Logical(a, b) => vec![(sector_name(*a, *b), logical_reference(ts, *a, *b)?)],
        SectorSpec::Digits(d) => vec![(
            format!("d:{}", d.iter().map(|v| v.to_string()).collect::<String>()),
            ts.reference(d)?,
        )],
    })
}

fn sector_name(x1: bool, x2: bool) -> String {
    match (x1, x2) {
        (false, false) => "0".into(),
        (true, false) => "x1".into(),
        (false, true) => "x2".into(),
        (true, true) => "x1x2".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub sector: String,
    pub states: usize,
    pub spectrum: Spectrum,
}

pub fn sector_spectrum(
    ts: &TermSet,
    name: &str,
    reference: Key,
    k: usize,
    cfg: &SolverConfig,
    budget: usize,
) -> Result<SectorSpectrum> {
    let b = enumerate_subspace(ts, reference, budget)?;
    let h = assemble_restricted(ts, &b)?;
    let cfg = SolverConfig {
        vectors: true,
        ..*cfg
    };
    Ok(SectorSpectrum {
        sector: name.to_string(),
        states: b.len(),
        spectrum: eigensolve(&h, k.min(b.len()), &cfg)?,
    })
}

/// Residual bounds on every pair and, for several sectors, equal lowest levels. With
/// `k ≥ 2` the degeneracy inside each sector is added up to a ground dimension.
pub fn spectrum_checks(sectors: &[SectorSpectrum]) -> Vec<Check> {
    let mut out = Vec::new();
    for s in sectors {
        let worst = s.spectrum.residuals.iter().copied().fold(0.0, f64::max);
        let oracle = match s.spectrum.method {
            crate::spectral::Method::Dense => Oracle::DenseEig,
            _ => Oracle::IterativeEig,
        };
        out.push(Check::at_most(
            format!("sector_{}_residual", s.sector),
            worst,
            SPECTRAL_TOL,
            oracle,
        ));
    }
    if sectors.len() > 1 {
        let lows: Vec<f64> = sectors.iter().map(|s| s.spectrum.lowest()).collect();
        let min = lows.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = lows.iter().map(|e| e - min).fold(0.0, f64::max);
        out.push(Check::at_most(
            "sector_ground_spread",
            spread,
            SPECTRAL_TOL,
            Oracle::DenseEig,
        ));
        let dims: Option<usize> = sectors
            .iter()
            .filter(|s| s.spectrum.lowest() - min <= SPECTRAL_TOL)
            .map(|s| {
                ground_info(&s.spectrum, SPECTRAL_TOL)
                    .ok()
                    .map(|g| g.degeneracy)
            })
            .sum();
        if let Some(d) = dims {
            out.push(Check::new(
                "ground_dimension_in_sectors",
                true,
                d,
                Oracle::DenseEig,
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sector_specs() {
        assert_eq!("all".parse::<SectorSpec>().unwrap(), SectorSpec::All);
        assert_eq!(
            "x1x2".parse::<SectorSpec>().unwrap(),
            SectorSpec::Logical(true, true)
        );
        assert_eq!(
            "d:0110".parse::<SectorSpec>().unwrap(),
            SectorSpec::Digits(vec![0, 1, 1, 0])
        );
        assert!("y".parse::<SectorSpec>().is_err());
        assert!("d:01a".parse::<SectorSpec>().is_err());
        assert!("spectral".parse::<Suite>().is_err());
    }
}
