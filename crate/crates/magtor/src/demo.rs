//! Built-in demonstration systems.
//!
//! All Gram matrices here use the interleaved coordinate order
//! (x₁, y₁, x₂, y₂, …, x_m, y_m): the metric diag(a₁², b₁², …, a_m², b_m²)
//! encodes h = Σ (a_j² dx_j² + b_j² dy_j²) and [`product_form`] encodes
//! ω = Σ c_j dx_j ∧ dy_j as consecutive 2×2 blocks [[0, c_j], [−c_j, 0]].

use crate::model::{MetricGram, SymplecticGram, TorusMagneticSystem};
use crate::Result;

/// Gram matrix of ω = Σ c_j dx_j∧dy_j in interleaved coordinates.
pub fn product_form(coeffs: &[i64]) -> Result<SymplecticGram> {
    let n = 2 * coeffs.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (j, &c) in coeffs.iter().enumerate() {
        rows[2 * j][2 * j + 1] = c;
        rows[2 * j + 1][2 * j] = -c;
    }
    SymplecticGram::from_rows(&rows)
}

/// Diagonal metric with integer diagonal entries, interleaved coordinates.
pub fn product_metric(diag: &[i64]) -> Result<MetricGram> {
    let entries: Vec<(i64, i64)> = diag.iter().map(|&d| (d, 1)).collect();
    MetricGram::from_diag(&entries)
}

/// The standard Kähler torus: identity metric with ω = Σ dx_j∧dy_j.
pub fn standard_system(m: usize) -> TorusMagneticSystem {
    let sys = TorusMagneticSystem::new(
        product_metric(&vec![1; 2 * m]).expect("valid diagonal"),
        product_form(&vec![1; m]).expect("valid product form"),
    );
    sys.expect("matching dimensions")
}

/// Two magnetic forms on the same 4-torus with metric
/// h = dx₁² + dy₁² + dx₂² + 4 dy₂²: ω = 2dx₁∧dy₁ + 2dx₂∧dy₂ and
/// ω′ = dx₁∧dy₁ + 4dx₂∧dy₂.
///
/// Both systems share the spectral signature {1, 2} and volume 4, so their
/// Landau spectra agree at every quantization level; neither is Kähler, and
/// their Chern invariant factors (2,2) vs (1,4) show the twisted phase
/// spaces are not symplectomorphic.
pub fn non_kahler_pair() -> (TorusMagneticSystem, TorusMagneticSystem) {
    let h = product_metric(&[1, 1, 1, 4]).expect("valid diagonal");
    let w1 = product_form(&[2, 2]).expect("valid form");
    let w2 = product_form(&[1, 4]).expect("valid form");
    (
        TorusMagneticSystem::new(h.clone(), w1).expect("matching dimensions"),
        TorusMagneticSystem::new(h, w2).expect("matching dimensions"),
    )
}

/// Two Kähler structures of equal volume on the 4-torus:
/// (h = dx₁² + 4dy₁² + dx₂² + 4dy₂², ω = 2dx₁∧dy₁ + 2dx₂∧dy₂) and
/// (h′ = dx₁² + dy₁² + 4dx₂² + 4dy₂², ω′ = dx₁∧dy₁ + 4dx₂∧dy₂).
///
/// All four d² values are 1 for both systems, so the pair is Kähler and the
/// Landau spectra agree at every level. The metrics are isometric via the
/// coordinate swap y₁ ↔ x₂; the magnetic forms still have different Chern
/// invariant factors.
pub fn kahler_pair() -> (TorusMagneticSystem, TorusMagneticSystem) {
    let h1 = product_metric(&[1, 4, 1, 4]).expect("valid diagonal");
    let w1 = product_form(&[2, 2]).expect("valid form");
    let h2 = product_metric(&[1, 1, 4, 4]).expect("valid diagonal");
    let w2 = product_form(&[1, 4]).expect("valid form");
    (
        TorusMagneticSystem::new(h1, w1).expect("matching dimensions"),
        TorusMagneticSystem::new(h2, w2).expect("matching dimensions"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_system;

    #[test]
    fn demo_systems_validate() {
        let (a, b) = non_kahler_pair();
        assert!(validate_system(&a).passed());
        assert!(validate_system(&b).passed());
        let (a, b) = kahler_pair();
        assert!(validate_system(&a).passed());
        assert!(validate_system(&b).passed());
        assert!(validate_system(&standard_system(3)).passed());
    }
}
