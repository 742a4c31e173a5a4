use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{GapError, Result};

/// Scalar radial potential added to both diagonal entries of a Dirac channel.
///
/// The serialized form is the config-file form, e.g.
/// `{"kind":"coulomb","nu":0.5}` or `{"kind":"sum","terms":[...]}`. Tables read
/// from a file are resolved with [`PotentialSpec::resolve_files`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `-nu / r`.
    Coulomb { nu: f64 },
    /// `-nu / (r + a)`; bounded, with a Coulomb tail.
    SoftCoulomb { nu: f64, a: f64 },
    Constant { c: f64 },
    /// One sample per grid node. Half-node values interpolate linearly and the
    /// last one uses the decay to zero at `r_max`.
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        samples: Vec<f64>,
    },
    Sum { terms: Vec<PotentialSpec> },
}

impl PotentialSpec {
    pub fn coulomb(nu: f64) -> Self {
        PotentialSpec::Coulomb { nu }
    }

    pub fn constant(c: f64) -> Self {
        PotentialSpec::Constant { c }
    }

    pub fn table(samples: Vec<f64>) -> Self {
        PotentialSpec::Table { file: None, samples }
    }

    pub fn sum(terms: Vec<PotentialSpec>) -> Self {
        PotentialSpec::Sum { terms }
    }

    /// Check parameter ranges. Coulomb strengths must lie in `[0, 1)`.
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Coulomb { nu } => {
                if !(0.0..1.0).contains(nu) {
                    return Err(GapError::InvalidPotential(format!(
                        "Coulomb strength nu={nu} outside [0, 1)"
                    )));
                }
            }
            PotentialSpec::SoftCoulomb { nu, a } => {
                if !nu.is_finite() || !(a.is_finite() && *a > 0.0) {
                    return Err(GapError::InvalidPotential(format!(
                        "soft Coulomb needs finite nu and a > 0, got nu={nu}, a={a}"
                    )));
                }
            }
            PotentialSpec::Constant { c } => {
                if !c.is_finite() {
                    return Err(GapError::InvalidPotential(format!("constant {c} is not finite")));
                }
            }
            PotentialSpec::Table { file, samples } => {
                if samples.is_empty() {
                    return Err(GapError::InvalidPotential(match file {
                        Some(f) => format!("table file {f} not loaded"),
                        None => "empty table".into(),
                    }));
                }
                if samples.iter().any(|x| !x.is_finite()) {
                    return Err(GapError::InvalidPotential("table has non-finite samples".into()));
                }
            }
            PotentialSpec::Sum { terms } => {
                for t in terms {
                    t.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Load every `table` term that names a file, relative to `base`.
    pub fn resolve_files(&mut self, base: &Path) -> Result<()> {
        match self {
            PotentialSpec::Table { file: Some(f), samples } if samples.is_empty() => {
                let path = base.join(f.as_str());
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| GapError::Io { path: path.clone(), source })?;
                *samples = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(|l| {
                        l.parse::<f64>().map_err(|_| {
                            GapError::Parse(format!("{}: invalid sample '{l}'", path.display()))
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            PotentialSpec::Sum { terms } => {
                for t in terms {
                    t.resolve_files(base)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Total constant offset and the remaining position-dependent terms.
    pub fn split_constant(&self) -> (f64, Vec<PotentialSpec>) {
        let mut c = 0.0;
        let mut rest = Vec::new();
        self.split_into(&mut c, &mut rest);
        (c, rest)
    }

    fn split_into(&self, c: &mut f64, rest: &mut Vec<PotentialSpec>) {
        match self {
            PotentialSpec::Constant { c: k } => *c += k,
            PotentialSpec::Sum { terms } => terms.iter().for_each(|t| t.split_into(c, rest)),
            other => rest.push(other.clone()),
        }
    }

    /// Largest Coulomb strength among the singular terms.
    pub fn coulomb_strength(&self) -> f64 {
        match self {
            PotentialSpec::Coulomb { nu } => *nu,
            PotentialSpec::Sum { terms } => terms.iter().map(Self::coulomb_strength).sum(),
            _ => 0.0,
        }
    }

    /// Largest `|V|` over the grid nodes and midpoints.
    pub fn sup_norm(&self, grid: &RadialGrid) -> Result<f64> {
        let (nodes, half) = self.sample(grid)?;
        Ok(nodes.iter().chain(&half).fold(0.0, |m, v| m.max(v.abs())))
    }

    /// Values at the grid nodes `r_i` and at the midpoints `r_{i+1/2}`.
    pub fn sample(&self, grid: &RadialGrid) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        let n = grid.len();
        let mut at_nodes = vec![0.0; n];
        let mut at_half = vec![0.0; n];
        self.accumulate(grid, &mut at_nodes, &mut at_half)?;
        Ok((at_nodes, at_half))
    }

    fn accumulate(&self, grid: &RadialGrid, nodes: &mut [f64], half: &mut [f64]) -> Result<()> {
        let n = grid.len();
        match self {
            PotentialSpec::Coulomb { nu } => {
                for i in 0..n {
                    nodes[i] -= nu / grid.node(i);
                    half[i] -= nu / grid.half_node(i);
                }
            }
            PotentialSpec::SoftCoulomb { nu, a } => {
                for i in 0..n {
                    nodes[i] -= nu / (grid.node(i) + a);
                    half[i] -= nu / (grid.half_node(i) + a);
                }
            }
            PotentialSpec::Constant { c } => {
                nodes.iter_mut().chain(half.iter_mut()).for_each(|v| *v += c);
            }
            PotentialSpec::Table { samples, .. } => {
                if samples.len() != n {
                    return Err(GapError::InvalidPotential(format!(
                        "table has {} samples, grid has {n} nodes",
                        samples.len()
                    )));
                }
                for i in 0..n {
                    nodes[i] += samples[i];
                    let next = if i + 1 < n { samples[i + 1] } else { 0.0 };
                    half[i] += 0.5 * (samples[i] + next);
                }
            }
            PotentialSpec::Sum { terms } => {
                for t in terms {
                    t.accumulate(grid, nodes, half)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_forms() {
        let p: PotentialSpec = serde_json::from_str(r#"{"kind":"coulomb","nu":0.5}"#).unwrap();
        assert_eq!(p, PotentialSpec::coulomb(0.5));
        let p: PotentialSpec = serde_json::from_str(
            r#"{"kind":"sum","terms":[{"kind":"coulomb","nu":0.5},{"kind":"constant","c":0.1}]}"#,
        )
        .unwrap();
        assert_eq!(p.split_constant(), (0.1, vec![PotentialSpec::coulomb(0.5)]));
        let p: PotentialSpec = serde_json::from_str(r#"{"kind":"table","file":"v.txt"}"#).unwrap();
        assert!(p.validate().is_err());
        assert!(serde_json::from_str::<PotentialSpec>(r#"{"kind":"coulomb","nu":0.5,"z":1}"#).is_err());
    }

    #[test]
    fn coulomb_range_enforced() {
        assert!(PotentialSpec::coulomb(1.0).validate().is_err());
        assert!(PotentialSpec::coulomb(-0.1).validate().is_err());
        assert!(PotentialSpec::coulomb(0.0).validate().is_ok());
    }

    #[test]
    fn samples_at_nodes_and_midpoints() {
        let g = RadialGrid::new(17.0, 16).unwrap();
        let (v, vh) = PotentialSpec::sum(vec![PotentialSpec::coulomb(0.5), PotentialSpec::constant(2.0)])
            .sample(&g)
            .unwrap();
        assert_eq!(v[0], 2.0 - 0.5);
        assert_eq!(vh[0], 2.0 - 0.5 / 1.5);
    }

    #[test]
    fn sup_norm_of_soft_coulomb() {
        let g = RadialGrid::new(17.0, 16).unwrap();
        let sup = PotentialSpec::SoftCoulomb { nu: 1.0, a: 1.0 }.sup_norm(&g).unwrap();
        assert_eq!(sup, 0.5);
    }

    #[test]
    fn table_length_must_match() {
        let g = RadialGrid::new(17.0, 16).unwrap();
        assert!(PotentialSpec::table(vec![0.0; 15]).sample(&g).is_err());
        let (v, vh) = PotentialSpec::table((0..16).map(|i| i as f64).collect()).sample(&g).unwrap();
        assert_eq!(v[3], 3.0);
        assert_eq!(vh[3], 3.5);
        assert_eq!(vh[15], 7.5);
    }

    #[test]
    fn loads_table_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("v.txt"), "1\n2\n\n3\n").unwrap();
        let mut p = PotentialSpec::Table { file: Some("v.txt".into()), samples: vec![] };
        p.resolve_files(dir.path()).unwrap();
        assert_eq!(p, PotentialSpec::Table { file: Some("v.txt".into()), samples: vec![1.0, 2.0, 3.0] });
        let mut missing = PotentialSpec::Table { file: Some("nope.txt".into()), samples: vec![] };
        let err = missing.resolve_files(dir.path()).unwrap_err();
        assert!(err.to_string().contains("nope.txt"));
    }
}
