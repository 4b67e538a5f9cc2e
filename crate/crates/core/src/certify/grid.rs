//! Exhaustive grid search over `(J, t, β_ℓr, β_du)` at fixed `U`.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certified_gap, hs_spectrum, GapParams};
use crate::error::{GadgetError, Result};

/// Gaps closer than this count as ties; ties go to the lexicographically smallest point.
pub const TIE_TOL: f64 = 1e-12;

/// `start, start+step, …` up to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        GridAxis { start, stop, step }
    }

    pub fn point(x: f64) -> Self {
        GridAxis::new(x, x, 1.0)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        // rounded so that grid points print and compare like their decimal spelling
        (0..n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl FromStr for GridAxis {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self> {
        let nums: Vec<f64> = s
            .split(':')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| GadgetError::Config(format!("bad grid value {x:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        match nums[..] {
            [x] => Ok(GridAxis::point(x)),
            [a, b, c] if c > 0.0 => Ok(GridAxis::new(a, b, c)),
            _ => Err(GadgetError::Config(format!(
                "grid axis must be `x` or `start:stop:step` with step > 0, got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub u: f64,
    pub j: GridAxis,
    pub t: GridAxis,
    pub beta_lr: GridAxis,
    pub beta_du: GridAxis,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            u: 1.0,
            j: GridAxis::new(0.02, 0.20, 0.005),
            t: GridAxis::new(0.05, 0.60, 0.025),
            beta_lr: GridAxis::new(-0.5, 0.5, 0.05),
            beta_du: GridAxis::new(-0.5, 0.5, 0.05),
        }
    }
}

/// `default`, or `;`-separated `key=axis` overrides of the default grid with keys
/// `U`, `J`, `t`, `blr`, `bdu`; e.g. `J=0.0625;t=0.0625`.
impl FromStr for GridSpec {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self> {
        let mut g = GridSpec::default();
        let s = s.trim();
        if s.is_empty() || s == "default" {
            return Ok(g);
        }
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GadgetError::Config(format!("expected key=value, got {part:?}")))?;
            match k.trim() {
                "U" | "u" => {
                    g.u = v
                        .trim()
                        .parse()
                        .map_err(|e| GadgetError::Config(format!("bad U {v:?}: {e}")))?
                }
                "J" | "j" => g.j = v.parse()?,
                "t" => g.t = v.parse()?,
                "blr" | "beta_lr" => g.beta_lr = v.parse()?,
                "bdu" | "beta_du" => g.beta_du = v.parse()?,
                other => return Err(GadgetError::Config(format!("unknown grid key {other:?}"))),
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRow {
    pub j: f64,
    pub t: f64,
    pub beta_lr: f64,
    pub beta_du: f64,
    pub per_star_margin: f64,
    pub inter_bound: f64,
    pub intra_bound: f64,
    pub certified_gap: f64,
}

impl LandscapeRow {
    fn key(&self) -> [f64; 4] {
        [self.j, self.t, self.beta_lr, self.beta_du]
    }
}

#[derive(Clone, Debug)]
pub struct Optimum {
    pub u: f64,
    pub best: LandscapeRow,
    /// Every grid point, `J` slowest and `β_du` fastest.
    pub landscape: Vec<LandscapeRow>,
}

impl Optimum {
    pub fn best_params(&self) -> GapParams {
        GapParams {
            u: self.u,
            t: self.best.t,
            j: self.best.j,
            beta_lr: self.best.beta_lr,
            beta_du: self.best.beta_du,
        }
    }
}

pub fn optimize_params(grid: &GridSpec) -> Result<Optimum> {
    let (js, ts, bl, bd) = (
        grid.j.values(),
        grid.t.values(),
        grid.beta_lr.values(),
        grid.beta_du.values(),
    );
    if js.is_empty() || ts.is_empty() || bl.is_empty() || bd.is_empty() {
        return Err(GadgetError::EmptyGrid);
    }
    if grid.u.is_nan() || grid.u <= 0.0 {
        return Err(GadgetError::Config("grid needs U > 0".into()));
    }
    let spectra: Vec<_> = ts.iter().map(|&t| hs_spectrum(grid.u, t)).collect();
    let per_j = ts.len() * bl.len() * bd.len();
    let landscape: Vec<LandscapeRow> = (0..js.len() * per_j)
        .into_par_iter()
        .map(|idx| {
            let (ji, rest) = (idx / per_j, idx % per_j);
            let ti = rest / (bl.len() * bd.len());
            let (li, di) = ((rest / bd.len()) % bl.len(), rest % bd.len());
            let p = GapParams {
                u: grid.u,
                t: ts[ti],
                j: js[ji],
                beta_lr: bl[li],
                beta_du: bd[di],
            };
            let hs = &spectra[ti];
            let (margin, gap) = certified_gap(&p, hs);
            LandscapeRow {
                j: p.j,
                t: p.t,
                beta_lr: p.beta_lr,
                beta_du: p.beta_du,
                per_star_margin: margin,
                inter_bound: super::STAR_MULTIPLICITY * margin,
                intra_bound: hs.intra_gap,
                certified_gap: gap,
            }
        })
        .collect();
    let best = *landscape
        .iter()
        .reduce(|a, b| {
            let better = b.certified_gap > a.certified_gap + TIE_TOL
                || ((b.certified_gap - a.certified_gap).abs() <= TIE_TOL && b.key() < a.key());
            if better {
                b
            } else {
                a
            }
        })
        .expect("grid is nonempty");
    Ok(Optimum {
        u: grid.u,
        best,
        landscape,
    })
}

pub fn write_landscape_csv<W: Write>(rows: &[LandscapeRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_axis_lengths() {
        let g = GridSpec::default();
        assert_eq!(g.j.values().len(), 37);
        assert_eq!(g.t.values().len(), 23);
        assert_eq!(g.beta_lr.values().len(), 21);
        assert!(g.j.values().contains(&0.09));
        assert!(g.beta_du.values().contains(&0.0));
    }

    #[test]
    fn single_point_grid() {
        let g: GridSpec = "J=0.09;t=0.375;blr=0.25;bdu=0".parse().unwrap();
        let o = optimize_params(&g).unwrap();
        assert_eq!(o.landscape.len(), 1);
        assert_eq!(o.best_params(), GapParams::default());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let g: GridSpec = "J=0.2:0.1:0.01".parse().unwrap();
        assert!(matches!(optimize_params(&g), Err(GadgetError::EmptyGrid)));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!("q=1".parse::<GridSpec>().is_err());
        assert!("J=1:2".parse::<GridSpec>().is_err());
    }
}
