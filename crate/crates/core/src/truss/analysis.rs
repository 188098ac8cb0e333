//! Linear direct-stiffness analysis of 2-D bar trusses.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::truss::model::TrussModel;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    /// All degrees of freedom, x then y per node; restrained ones are 0. cm.
    pub displacements: Vec<f64>,
    /// Axial stress per member, tension positive. kN/cm^2.
    pub stresses: Vec<f64>,
    /// kN.
    pub weight: f64,
}

impl AnalysisResult {
    /// Vertical displacement of node index `node`.
    pub fn vertical(&self, node: usize) -> f64 {
        self.displacements[2 * node + 1]
    }

    pub fn max_abs_displacement(&self) -> f64 {
        self.displacements.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn max_abs_stress(&self) -> f64 {
        self.stresses.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

fn check_areas(model: &TrussModel, areas: &[f64]) -> Result<()> {
    if areas.len() != model.members.len() {
        return Err(Error::Layout(format!(
            "{} areas for {} members",
            areas.len(),
            model.members.len()
        )));
    }
    let spec = model.area;
    let slack = 1e-9 * spec.step;
    for (i, &a) in areas.iter().enumerate() {
        if !(a.is_finite() && a >= spec.lower - slack && a <= spec.upper + slack) {
            return Err(Error::OutOfBounds {
                index: i,
                value: a,
                lower: spec.lower,
                upper: spec.upper,
            });
        }
    }
    Ok(())
}

/// Global stiffness matrix over all degrees of freedom (supports included).
pub fn global_stiffness(model: &TrussModel, areas: &[f64]) -> DMatrix<f64> {
    let n = model.fixed.len();
    let mut k = DMatrix::zeros(n, n);
    for (m, &area) in model.members.iter().zip(areas) {
        let axial = model.youngs_modulus * area / m.length;
        let t = [-m.cos, -m.sin, m.cos, m.sin];
        let dofs = [2 * m.start, 2 * m.start + 1, 2 * m.end, 2 * m.end + 1];
        for (a, &da) in dofs.iter().enumerate() {
            for (b, &db) in dofs.iter().enumerate() {
                k[(da, db)] += axial * t[a] * t[b];
            }
        }
    }
    k
}

/// Stiffness restricted to the free degrees of freedom.
pub fn reduced_stiffness(model: &TrussModel, areas: &[f64]) -> (DMatrix<f64>, Vec<usize>) {
    let full = global_stiffness(model, areas);
    let free = model.free_dofs();
    let reduced = DMatrix::from_fn(free.len(), free.len(), |i, j| full[(free[i], free[j])]);
    (reduced, free)
}

/// Solve `K d = F` and recover member stresses and weight.
pub fn analyze(model: &TrussModel, areas: &[f64]) -> Result<AnalysisResult> {
    check_areas(model, areas)?;
    let (k, free) = reduced_stiffness(model, areas);
    let f = DVector::from_iterator(free.len(), free.iter().map(|&d| model.loads[d]));

    let chol = k.clone().cholesky().ok_or_else(|| Error::Unstable {
        pivot: first_bad_pivot(&k),
    })?;
    // Cholesky succeeds on numerically singular matrices with tiny pivots.
    let scale = k.diagonal().amax();
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, &p| m.min(p));
    if min_pivot.is_nan() || min_pivot * min_pivot <= 1e-12 * scale {
        return Err(Error::Unstable {
            pivot: first_bad_pivot(&k),
        });
    }
    let solution = chol.solve(&f);

    let mut displacements = vec![0.0; model.fixed.len()];
    for (i, &d) in free.iter().enumerate() {
        displacements[d] = solution[i];
    }
    let stresses = model
        .members
        .iter()
        .map(|m| {
            let du = displacements[2 * m.end] - displacements[2 * m.start];
            let dv = displacements[2 * m.end + 1] - displacements[2 * m.start + 1];
            model.youngs_modulus * (m.cos * du + m.sin * dv) / m.length
        })
        .collect();
    Ok(AnalysisResult {
        displacements,
        stresses,
        weight: model.weight(areas),
    })
}

fn first_bad_pivot(k: &DMatrix<f64>) -> usize {
    let scale = k.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut a = k.clone();
    let n = a.nrows();
    for p in 0..n {
        let pivot = a[(p, p)];
        if pivot <= 1e-12 * scale {
            return p;
        }
        for i in p + 1..n {
            let factor = a[(i, p)] / pivot;
            for j in p..n {
                a[(i, j)] -= factor * a[(p, j)];
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truss::model::TrussFile;
    use crate::truss::{benchmark_model, TrussModel};

    fn single_bar(load: f64) -> TrussModel {
        let text = format!(
            r#"
            name = "bar"
            youngs_modulus_gpa = 200.0
            density_kn_per_m3 = 78.5
            displacement_limit_cm = 1.0
            stress_limit_mpa = 250.0
            area_min_cm2 = 1.0
            area_max_cm2 = 100.0
            area_step_cm2 = 0.5
            nodes = [
              {{ id = 1, x = 0.0, y = 0.0, fix_x = true, fix_y = true }},
              {{ id = 2, x = 300.0, y = 0.0, fix_y = true }},
            ]
            members = [{{ id = 1, nodes = [1, 2] }}]
            loads = [{{ node = 2, fx = {load} }}]
            "#
        );
        TrussModel::from_toml(&text).unwrap()
    }

    #[test]
    fn single_bar_matches_closed_form() {
        let model = single_bar(50.0);
        let r = analyze(&model, &[10.0]).unwrap();
        let e = 200.0 * 100.0;
        let tip = 50.0 * 300.0 / (e * 10.0);
        assert!((r.displacements[2] - tip).abs() <= 1e-10 * tip);
        assert!((r.stresses[0] - 5.0).abs() <= 1e-10 * 5.0);
        assert!((r.weight - 78.5e-6 * 10.0 * 300.0).abs() < 1e-12);
    }

    #[test]
    fn zero_load_gives_zero_response() {
        let model = single_bar(0.0);
        let r = analyze(&model, &[10.0]).unwrap();
        assert!(r.displacements.iter().all(|&d| d == 0.0));
        assert!(r.stresses.iter().all(|&s| s == 0.0));
        assert!(r.weight > 0.0);
    }

    #[test]
    fn mechanism_is_unstable() {
        let mut file: TrussFile = toml::from_str(
            r#"
            name = "mech"
            youngs_modulus_gpa = 200.0
            density_kn_per_m3 = 78.5
            displacement_limit_cm = 1.0
            stress_limit_mpa = 250.0
            area_min_cm2 = 1.0
            area_max_cm2 = 100.0
            area_step_cm2 = 0.5
            nodes = [
              { id = 1, x = 0.0, y = 0.0, fix_x = true, fix_y = true },
              { id = 2, x = 300.0, y = 0.0 },
            ]
            members = [{ id = 1, nodes = [1, 2] }]
            loads = [{ node = 2, fy = -1.0 }]
            "#,
        )
        .unwrap();
        let model = TrussModel::from_file(file.clone()).unwrap();
        assert!(matches!(
            analyze(&model, &[10.0]),
            Err(Error::Unstable { .. })
        ));
        file.nodes[1].fix_y = true;
        let model = TrussModel::from_file(file).unwrap();
        assert!(analyze(&model, &[10.0]).is_ok());
    }

    #[test]
    fn area_bounds_are_checked() {
        let model = benchmark_model("ten_bar").unwrap();
        assert!(matches!(
            analyze(&model, &[0.1; 10]),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(analyze(&model, &[1.0; 9]), Err(Error::Layout(_))));
    }

    #[test]
    fn doubling_areas_halves_displacements() {
        let model = benchmark_model("ten_bar").unwrap();
        let a = [20.0, 30.0, 10.0, 40.0, 5.0, 25.0, 3.0, 35.0, 2.0, 8.0];
        let a2: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        let r1 = analyze(&model, &a).unwrap();
        let r2 = analyze(&model, &a2).unwrap();
        assert!((r2.weight - 2.0 * r1.weight).abs() < 1e-12 * r1.weight);
        for (d1, d2) in r1.displacements.iter().zip(&r2.displacements) {
            assert!((d1 - 2.0 * d2).abs() <= 1e-9 * d1.abs().max(1e-12));
        }
    }

    #[test]
    fn equilibrium_at_free_nodes() {
        let model = benchmark_model("seventeen_bar").unwrap();
        let areas: Vec<f64> = (0..17).map(|i| 5.0 + 3.0 * i as f64).collect();
        let r = analyze(&model, &areas).unwrap();
        // K d assembled member by member from N = sigma * A must equal F.
        let mut internal = vec![0.0; model.fixed.len()];
        for ((m, s), a) in model.members.iter().zip(&r.stresses).zip(&areas) {
            let n = s * a;
            internal[2 * m.start] -= n * m.cos;
            internal[2 * m.start + 1] -= n * m.sin;
            internal[2 * m.end] += n * m.cos;
            internal[2 * m.end + 1] += n * m.sin;
        }
        let scale = model.loads.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        for d in model.free_dofs() {
            assert!(
                (internal[d] - model.loads[d]).abs() <= 1e-8 * scale,
                "dof {d}: {} vs {}",
                internal[d],
                model.loads[d]
            );
        }
    }
}
