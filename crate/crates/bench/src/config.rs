//! Study configuration files (TOML). Unknown keys are rejected.

use std::path::Path;

use bezier_bbar::elasticity2d::{InfSupPair, PressureSpace};
use bezier_bbar::Formulation;
use serde::Deserialize;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Project,
    BeamStudy,
    ElasticityStudy,
    Infsup,
    Spy,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Project => "project",
            StudyKind::BeamStudy => "beam-study",
            StudyKind::ElasticityStudy => "elasticity-study",
            StudyKind::Infsup => "infsup",
            StudyKind::Spy => "spy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    /// Method labels; empty selects every method of the study.
    #[serde(default)]
    pub methods: Vec<String>,
    pub degrees: Vec<usize>,
    /// Elements per direction. May be omitted for beam studies with a
    /// fixed dof budget.
    #[serde(default)]
    pub meshes: Vec<usize>,
    /// CSV file name inside the output directory.
    pub output: Option<String>,
    /// Seed of the randomized invariant checks run by `--verify`.
    #[serde(default)]
    pub seed: u64,
    pub beam: Option<BeamSection>,
    pub elasticity: Option<ElasticitySection>,
    pub projection: Option<ProjectionSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    /// Length-to-thickness ratios.
    #[serde(default = "default_slenderness")]
    pub slenderness: Vec<f64>,
    /// Derive the mesh from a total dof count per degree instead of `meshes`.
    pub total_dofs: Option<usize>,
}

fn default_slenderness() -> Vec<f64> {
    vec![1e3]
}

impl Default for BeamSection {
    fn default() -> Self {
        Self {
            slenderness: default_slenderness(),
            total_dofs: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElasticityProblemKind {
    Cook,
    Plate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PressureDegree {
    #[default]
    Reduced,
    Equal,
}

impl From<PressureDegree> for PressureSpace {
    fn from(p: PressureDegree) -> Self {
        match p {
            PressureDegree::Reduced => PressureSpace::Reduced,
            PressureDegree::Equal => PressureSpace::Equal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticitySection {
    pub problem: ElasticityProblemKind,
    pub young: Option<f64>,
    pub poisson: Option<f64>,
    #[serde(default)]
    pub pressure: PressureDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionTarget {
    /// The planar demo curve on `[0, 3]`.
    #[default]
    DemoCurve,
    /// `sin(πx)` on `[0, 1]`.
    Sine,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSection {
    #[serde(default)]
    pub target: ProjectionTarget,
}

/// Projection variants compared by the `project` study.
pub const PROJECTION_METHODS: [&str; 2] = ["bezier", "global"];

impl StudyConfig {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            BenchError::Config(msg) => BenchError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let cfg: StudyConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), BenchError> {
        let err = |m: String| Err(BenchError::Config(m));
        if self.degrees.is_empty() {
            return err("`degrees` must not be empty".into());
        }
        let min_degree = match self.study {
            StudyKind::BeamStudy | StudyKind::ElasticityStudy | StudyKind::Infsup | StudyKind::Spy => 1,
            StudyKind::Project => 0,
        };
        if let Some(p) = self.degrees.iter().find(|p| **p < min_degree || **p > 8) {
            return err(format!("degree {p} outside {min_degree}..=8"));
        }
        let dof_budget = self.beam.as_ref().and_then(|b| b.total_dofs).is_some();
        if self.meshes.is_empty() && !dof_budget {
            return err("`meshes` must not be empty".into());
        }
        if self.meshes.contains(&0) {
            return err("mesh sizes must be positive".into());
        }
        let sections = [
            ("beam", self.beam.is_some(), matches!(self.study, StudyKind::BeamStudy | StudyKind::Spy)),
            ("elasticity", self.elasticity.is_some(), self.study == StudyKind::ElasticityStudy),
            ("projection", self.projection.is_some(), self.study == StudyKind::Project),
        ];
        for (name, present, allowed) in sections {
            if present && !allowed {
                return err(format!("section [{name}] does not apply to study `{}`", self.study.name()));
            }
        }
        if self.study == StudyKind::ElasticityStudy && self.elasticity.is_none() {
            return err("elasticity-study needs an [elasticity] section".into());
        }
        if let Some(b) = &self.beam {
            if b.slenderness.is_empty() || b.slenderness.iter().any(|s| !(*s > 0.0)) {
                return err("beam.slenderness must hold positive ratios".into());
            }
            if dof_budget && !self.meshes.is_empty() {
                return err("give either `meshes` or beam.total_dofs, not both".into());
            }
        }
        if let Some(e) = &self.elasticity {
            if let Some(nu) = e.poisson {
                if !(0.0..0.5).contains(&nu) {
                    return err(format!("poisson {nu} outside [0, 0.5)"));
                }
            }
            if let Some(y) = e.young {
                if !(y > 0.0) {
                    return err(format!("young {y} must be positive"));
                }
            }
        }
        for m in &self.methods {
            let known = match self.study {
                StudyKind::Project => PROJECTION_METHODS.contains(&m.as_str()),
                StudyKind::Infsup => InfSupPair::ALL.iter().any(|p| p.label() == m),
                _ => Formulation::from_label(m).is_some(),
            };
            if !known {
                return err(format!("unknown method `{m}` for study `{}`", self.study.name()));
            }
        }
        Ok(())
    }

    /// Selected method labels in canonical order.
    pub fn method_labels(&self) -> Vec<String> {
        let all: Vec<&str> = match self.study {
            StudyKind::Project => PROJECTION_METHODS.to_vec(),
            StudyKind::Infsup => InfSupPair::ALL.iter().map(|p| p.label()).collect(),
            _ => Formulation::ALL.iter().map(|f| f.label()).collect(),
        };
        all.into_iter()
            .filter(|l| self.methods.is_empty() || self.methods.iter().any(|m| m == l))
            .map(str::to_string)
            .collect()
    }

    pub fn output_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{}.csv", self.study.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_beam_config() {
        let cfg = StudyConfig::parse("study = \"beam-study\"\ndegrees = [2]\nmeshes = [4, 8]\n").unwrap();
        assert_eq!(cfg.study, StudyKind::BeamStudy);
        assert_eq!(cfg.method_labels(), ["Q", "T-L2", "S-TP", "NS-TP"]);
        assert_eq!(cfg.output_name(), "beam-study.csv");
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let e = StudyConfig::parse("study = \"spy\"\ndegrees = [2]\nmeshes = [4]\ncolour = 1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("colour") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn invalid_values() {
        for text in [
            "study = \"beam-study\"\ndegrees = []\nmeshes = [4]",
            "study = \"beam-study\"\ndegrees = [2]\nmeshes = [0]",
            "study = \"beam-study\"\ndegrees = [2]\nmeshes = [4]\nmethods = [\"X\"]",
            "study = \"infsup\"\ndegrees = [4]\nmeshes = [1]\nmethods = [\"S-TP\"]",
            "study = \"elasticity-study\"\ndegrees = [2]\nmeshes = [2]",
            "study = \"project\"\ndegrees = [2]\nmeshes = [2]\n[beam]\nslenderness = [10.0]",
            "study = \"elasticity-study\"\ndegrees = [2]\nmeshes = [2]\n[elasticity]\nproblem = \"cook\"\npoisson = 0.5",
            "study = \"beam-study\"\ndegrees = [2]\nmeshes = [4]\n[beam]\ntotal_dofs = 32",
        ] {
            assert!(StudyConfig::parse(text).is_err(), "{text}");
        }
    }
}
