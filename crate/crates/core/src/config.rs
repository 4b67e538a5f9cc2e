//! Model configuration files (TOML).
//!
//! ```toml
//! [lattice]
//! kind = "square"          # square | triangular | one_star | patch_2x1
//! lx = 2
//! ly = 2
//!
//! [model]
//! variant = "toric"        # toric | quantum_double | triangular
//! td_profile = "derived"   # toric: derived | literal
//! shield = "derived"       # quantum double: derived | literal
//!
//! [group]                  # quantum double only
//! preset = "cyclic"        # cyclic | s3 | d4, or give `table` instead
//! order = 3                # cyclic only
//! generators = [1]
//!
//! [couplings]
//! j = 0.09
//! u = 1.0
//! t = 0.375
//! r = 1.0                  # triangular only
//!
//! [logicals]
//! col = 0
//! row = 0
//! ```
//!
//! Every key except `lattice.kind` and `model.variant` has the default shown, except
//! `group.generators`, which the quantum double requires.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::group::{GroupDescriptor, GroupPreset, GroupTable};
use crate::lattice::TorusLattice;
use crate::model::{
    build_quantum_double_with, build_toric, build_triangular, Couplings, DoubleShield,
    SquareGeometry, TdProfile, TermSet, ToricOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeChoice {
    Square,
    Triangular,
    OneStar,
    #[serde(rename = "patch_2x1")]
    Patch2x1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: LatticeChoice,
    #[serde(default = "two")]
    pub lx: usize,
    #[serde(default = "two")]
    pub ly: usize,
}

fn two() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantChoice {
    Toric,
    QuantumDouble,
    Triangular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub variant: VariantChoice,
    #[serde(default)]
    pub td_profile: TdProfile,
    #[serde(default)]
    pub shield: DoubleShield,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Cyclic,
    S3,
    D4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub preset: Option<PresetName>,
    pub order: Option<usize>,
    pub table: Option<Vec<Vec<usize>>>,
    pub generators: Vec<usize>,
}

impl GroupSection {
    pub fn build(&self) -> Result<GroupTable> {
        let descriptor = match (&self.preset, &self.table) {
            (Some(_), Some(_)) => {
                return Err(GadgetError::Config(
                    "give either group.preset or group.table".into(),
                ))
            }
            (None, Some(t)) => GroupDescriptor::Table(t.clone()),
            (Some(PresetName::Cyclic), None) => {
                let n = self
                    .order
                    .ok_or_else(|| GadgetError::Config("cyclic group needs group.order".into()))?;
                GroupDescriptor::Preset(GroupPreset::Cyclic(n))
            }
            (Some(PresetName::S3), None) => GroupDescriptor::Preset(GroupPreset::S3),
            (Some(PresetName::D4), None) => GroupDescriptor::Preset(GroupPreset::D4),
            (None, None) => {
                return Err(GadgetError::Config(
                    "group needs a preset or a table".into(),
                ))
            }
        };
        GroupTable::build(&descriptor, &self.generators)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(default = "default_j")]
    pub j: f64,
    #[serde(default = "default_u")]
    pub u: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    pub r: Option<f64>,
}

fn default_j() -> f64 {
    Couplings::default().j
}

fn default_u() -> f64 {
    Couplings::default().u
}

fn default_t() -> f64 {
    Couplings::default().t
}

impl Default for CouplingSection {
    fn default() -> Self {
        CouplingSection {
            j: default_j(),
            u: default_u(),
            t: default_t(),
            r: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicalSection {
    #[serde(default)]
    pub col: usize,
    #[serde(default)]
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lattice: LatticeSection,
    pub model: ModelSection,
    pub group: Option<GroupSection>,
    #[serde(default)]
    pub couplings: CouplingSection,
    #[serde(default)]
    pub logicals: LogicalSection,
}

impl std::str::FromStr for ModelConfig {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| GadgetError::Config(e.to_string()))
    }
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| GadgetError::Config(e.to_string()))
    }

    /// The 2×2 toric torus at the default couplings.
    pub fn default_toric() -> Self {
        ModelConfig {
            lattice: LatticeSection {
                kind: LatticeChoice::Square,
                lx: 2,
                ly: 2,
            },
            model: ModelSection {
                variant: VariantChoice::Toric,
                td_profile: TdProfile::default(),
                shield: DoubleShield::default(),
            },
            group: None,
            couplings: CouplingSection::default(),
            logicals: LogicalSection::default(),
        }
    }

    fn couplings(&self) -> Couplings {
        let c = &self.couplings;
        Couplings {
            j: c.j,
            u: c.u,
            t: c.t,
            r: c.r,
        }
    }

    fn square_geometry(&self) -> Result<SquareGeometry> {
        let l = &self.lattice;
        Ok(match l.kind {
            LatticeChoice::Square => SquareGeometry::torus(&TorusLattice::square(l.lx, l.ly)?),
            LatticeChoice::OneStar => SquareGeometry::one_star(),
            LatticeChoice::Patch2x1 => SquareGeometry::patch_2x1(),
            LatticeChoice::Triangular => {
                return Err(GadgetError::Config(format!(
                    "{:?} needs a square lattice or fixture",
                    self.model.variant
                )))
            }
        })
    }

    pub fn build(&self) -> Result<TermSet> {
        if self.group.is_some() && self.model.variant != VariantChoice::QuantumDouble {
            return Err(GadgetError::Config(
                "[group] is only used by the quantum double".into(),
            ));
        }
        match self.model.variant {
            VariantChoice::Toric => {
                let opts = ToricOptions {
                    td: self.model.td_profile,
                    logical_col: self.logicals.col,
                    logical_row: self.logicals.row,
                };
                build_toric(&self.square_geometry()?, self.couplings(), &opts)
            }
            VariantChoice::QuantumDouble => {
                let group = self
                    .group
                    .as_ref()
                    .ok_or_else(|| GadgetError::Config("quantum double needs [group]".into()))?
                    .build()?;
                build_quantum_double_with(
                    &self.square_geometry()?,
                    &group,
                    self.couplings(),
                    self.model.shield,
                )
            }
            VariantChoice::Triangular => {
                if self.lattice.kind != LatticeChoice::Triangular {
                    return Err(GadgetError::Config(
                        "triangular needs lattice.kind = \"triangular\"".into(),
                    ));
                }
                let l = TorusLattice::triangular(self.lattice.lx, self.lattice.ly)?;
                let c = self.couplings();
                let c = if c.r.is_none() { c.with_r(1.0) } else { c };
                build_triangular(&l, c, (self.logicals.col, self.logicals.row))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_toric_round_trips() {
        let c = ModelConfig::default_toric();
        let back: ModelConfig = c.to_toml().unwrap().parse().unwrap();
        assert_eq!(back, c);
        assert_eq!(back.build().unwrap().n_stars, 4);
    }

    #[test]
    fn quantum_double_needs_generators() {
        let src = "[lattice]\nkind = \"one_star\"\n[model]\nvariant = \"quantum_double\"\n\
                   [group]\npreset = \"s3\"\n";
        assert!(src.parse::<ModelConfig>().is_err());
        let ok = format!("{src}generators = [1, 3]\n");
        let ts = ok.parse::<ModelConfig>().unwrap().build().unwrap();
        assert_eq!(ts.labels.radix(), 48);
    }

    #[test]
    fn rejects_unknown_keys_and_mismatches() {
        assert!(
            "[lattice]\nkind = \"square\"\nlz = 3\n[model]\nvariant = \"toric\"\n"
                .parse::<ModelConfig>()
                .is_err()
        );
        let c: ModelConfig = "[lattice]\nkind = \"square\"\n[model]\nvariant = \"triangular\"\n"
            .parse()
            .unwrap();
        assert!(matches!(c.build(), Err(GadgetError::Config(_))));
    }
}
