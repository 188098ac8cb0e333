//! Truss description and its text file format.
//!
//! Files are TOML with lengths in cm, forces in kN, modulus in GPa, density
//! in kN/m^3, stresses in MPa and areas in cm^2; see `data/ten_bar.toml`.
//! Internally everything is converted to kN and cm.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::VariableSpec;

const TEN_BAR: &str = include_str!("../../data/ten_bar.toml");
const SEVENTEEN_BAR: &str = include_str!("../../data/seventeen_bar.toml");

/// Names accepted by [`benchmark_model`].
pub const BENCHMARKS: [&str; 2] = ["ten_bar", "seventeen_bar"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDef {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub fix_x: bool,
    #[serde(default)]
    pub fix_y: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberDef {
    pub id: usize,
    pub nodes: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadDef {
    pub node: usize,
    #[serde(default)]
    pub fx: f64,
    #[serde(default)]
    pub fy: f64,
}

/// On-disk schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrussFile {
    pub name: String,
    pub youngs_modulus_gpa: f64,
    pub density_kn_per_m3: f64,
    pub displacement_limit_cm: f64,
    pub stress_limit_mpa: f64,
    pub area_min_cm2: f64,
    pub area_max_cm2: f64,
    pub area_step_cm2: f64,
    pub nodes: Vec<NodeDef>,
    pub members: Vec<MemberDef>,
    #[serde(default)]
    pub loads: Vec<LoadDef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub id: usize,
    /// Node indices (0-based into [`TrussModel::nodes`]).
    pub start: usize,
    pub end: usize,
    pub length: f64,
    /// Direction cosines.
    pub cos: f64,
    pub sin: f64,
}

/// A 2-D pin-jointed truss in kN/cm units.
#[derive(Debug, Clone, PartialEq)]
pub struct TrussModel {
    pub name: String,
    /// External node ids, in index order.
    pub node_ids: Vec<usize>,
    pub nodes: Vec<(f64, f64)>,
    pub members: Vec<Member>,
    /// `true` for every restrained degree of freedom (2 per node, x then y).
    pub fixed: Vec<bool>,
    /// Nodal load vector, kN.
    pub loads: Vec<f64>,
    /// kN/cm^2.
    pub youngs_modulus: f64,
    /// kN/cm^3.
    pub density: f64,
    /// cm, applied to every free degree of freedom.
    pub displacement_limit: f64,
    /// kN/cm^2, tension and compression.
    pub stress_limit: f64,
    /// Bounds and resolution of every member area, cm^2.
    pub area: VariableSpec,
}

impl TrussModel {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: TrussFile = toml::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        TrussModel::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrussModel::from_toml(&text).map_err(|e| match e {
            Error::Model(msg) => Error::Model(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_file(file: TrussFile) -> Result<Self> {
        let bad = |msg: String| Error::Model(msg);
        for (what, v) in [
            ("youngs_modulus_gpa", file.youngs_modulus_gpa),
            ("density_kn_per_m3", file.density_kn_per_m3),
            ("displacement_limit_cm", file.displacement_limit_cm),
            ("stress_limit_mpa", file.stress_limit_mpa),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("{what} must be positive, got {v}")));
            }
        }
        let area = VariableSpec::new(file.area_min_cm2, file.area_max_cm2, file.area_step_cm2)?;
        if area.lower <= 0.0 {
            return Err(bad("area_min_cm2 must be positive".into()));
        }

        let mut index = HashMap::new();
        for (i, n) in file.nodes.iter().enumerate() {
            if index.insert(n.id, i).is_some() {
                return Err(bad(format!("duplicate node id {}", n.id)));
            }
        }
        let node_index = |id: usize| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| bad(format!("unknown node id {id}")))
        };
        let nodes: Vec<(f64, f64)> = file.nodes.iter().map(|n| (n.x, n.y)).collect();

        let mut members = Vec::with_capacity(file.members.len());
        for m in &file.members {
            let start = node_index(m.nodes[0])?;
            let end = node_index(m.nodes[1])?;
            let (dx, dy) = (nodes[end].0 - nodes[start].0, nodes[end].1 - nodes[start].1);
            let length = dx.hypot(dy);
            if length <= 0.0 {
                return Err(bad(format!("member {} has zero length", m.id)));
            }
            members.push(Member {
                id: m.id,
                start,
                end,
                length,
                cos: dx / length,
                sin: dy / length,
            });
        }
        if members.is_empty() {
            return Err(bad("truss has no members".into()));
        }

        let mut fixed = vec![false; 2 * nodes.len()];
        for (i, n) in file.nodes.iter().enumerate() {
            fixed[2 * i] = n.fix_x;
            fixed[2 * i + 1] = n.fix_y;
        }
        let mut loads = vec![0.0; 2 * nodes.len()];
        for l in &file.loads {
            let i = node_index(l.node)?;
            loads[2 * i] += l.fx;
            loads[2 * i + 1] += l.fy;
        }

        Ok(TrussModel {
            name: file.name,
            node_ids: file.nodes.iter().map(|n| n.id).collect(),
            nodes,
            members,
            fixed,
            loads,
            // 1 GPa = 100 kN/cm^2, 1 kN/m^3 = 1e-6 kN/cm^3, 1 MPa = 0.1 kN/cm^2
            youngs_modulus: file.youngs_modulus_gpa * 100.0,
            density: file.density_kn_per_m3 * 1e-6,
            displacement_limit: file.displacement_limit_cm,
            stress_limit: file.stress_limit_mpa * 0.1,
            area,
        })
    }

    /// Index of the node with external id `id`.
    pub fn node(&self, id: usize) -> Option<usize> {
        self.node_ids.iter().position(|&n| n == id)
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.fixed.len()).filter(|&d| !self.fixed[d]).collect()
    }

    pub fn area_specs(&self) -> Vec<VariableSpec> {
        vec![self.area; self.members.len()]
    }

    /// Structural weight `sum(rho * A * L)` in kN for areas in cm^2.
    pub fn weight(&self, areas: &[f64]) -> f64 {
        self.members
            .iter()
            .zip(areas)
            .map(|(m, a)| self.density * a * m.length)
            .sum()
    }
}

/// One of the shipped benchmark trusses.
pub fn benchmark_model(name: &str) -> Result<TrussModel> {
    let text = match name {
        "ten_bar" | "ten-bar" | "10" => TEN_BAR,
        "seventeen_bar" | "seventeen-bar" | "17" => SEVENTEEN_BAR,
        other => {
            return Err(Error::Unknown {
                kind: "truss model",
                name: other.to_string(),
            })
        }
    };
    TrussModel::from_toml(text)
}

/// Benchmark name, or a path to a model file.
pub fn resolve_model(name_or_path: &str) -> Result<TrussModel> {
    match benchmark_model(name_or_path) {
        Err(Error::Unknown { .. }) if Path::new(name_or_path).exists() => {
            TrussModel::load(Path::new(name_or_path))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_bar_shape() {
        let m = benchmark_model("ten_bar").unwrap();
        assert_eq!(m.members.len(), 10);
        assert_eq!(m.nodes.len(), 6);
        assert_eq!(m.free_dofs().len(), 8);
        let diag = m.members.iter().find(|mem| mem.id == 2).unwrap();
        assert!((diag.length - 1293.157).abs() / 1293.157 < 1e-6);
        assert_eq!(m.area.lower, 0.6452);
        assert_eq!(m.area.step, 0.0223);
        assert!((m.youngs_modulus - 6894.76).abs() < 1e-9);
    }

    #[test]
    fn seventeen_bar_shape() {
        let m = benchmark_model("seventeen_bar").unwrap();
        assert_eq!(m.members.len(), 17);
        assert_eq!(m.free_dofs().len(), 14);
        let diag = m.members.iter().find(|mem| mem.id == 2).unwrap();
        // 254 * sqrt(2) = 359.2102; the tabulated 359.2068 is rounded
        assert!((diag.length - 254.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((diag.length - 359.2068).abs() / 359.2068 < 1e-5);
        assert!((m.stress_limit - 34.475).abs() < 1e-12);
    }

    #[test]
    fn unknown_model() {
        assert!(matches!(
            benchmark_model("nine_bar"),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn rejects_bad_files() {
        let base = TEN_BAR.replace("nodes = [4, 5]", "nodes = [4, 42]");
        assert!(matches!(TrussModel::from_toml(&base), Err(Error::Model(_))));
        let neg = TEN_BAR.replace("density_kn_per_m3 = 27.1447", "density_kn_per_m3 = -1.0");
        assert!(TrussModel::from_toml(&neg).is_err());
        assert!(TrussModel::from_toml("name = 3").is_err());
    }
}
