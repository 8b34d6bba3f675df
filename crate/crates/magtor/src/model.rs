//! Torus magnetic systems: metric and magnetic Gram matrices, exact
//! validation, the map F = 𝐡⁻¹𝛚, spectral signatures, and symplectic volume.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::linalg::{exact_sqrt, IntMat, RatMat};
use crate::{Error, Result};

/// Gram matrix 𝐡 of a translation-invariant metric: symmetric positive
/// definite with rational entries, even dimension 2m.
///
/// Construction checks shape only; the arithmetic invariants (symmetry,
/// positive definiteness) are verified exactly by [`validate_system`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGram {
    mat: RatMat,
}

impl MetricGram {
    pub fn new(mat: RatMat) -> Result<Self> {
        check_even_square(mat.rows(), mat.cols())?;
        Ok(MetricGram { mat })
    }

    /// Diagonal metric Σ c_i e_i², entries as (numerator, denominator).
    pub fn from_diag(diag: &[(i64, i64)]) -> Result<Self> {
        let entries: Vec<BigRational> =
            diag.iter().map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect();
        Self::new(RatMat::from_diag(&entries))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &RatMat {
        &self.mat
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.mat.to_f64()
    }

    pub fn is_symmetric(&self) -> bool {
        self.mat.is_symmetric()
    }

    /// Exact positive-definiteness test: every leading principal minor > 0.
    /// Returns the order of the first non-positive minor on failure.
    pub fn positive_definite_violation(&self) -> Option<usize> {
        self.mat
            .leading_minor_dets()
            .iter()
            .position(|d| !d.is_positive())
            .map(|idx| idx + 1)
    }
}

/// Gram matrix 𝛚 of a translation-invariant magnetic 2-form: integer entries
/// (integrality of the cohomology class on ℤ^{2m}), skew-symmetric,
/// nondegenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticGram {
    mat: IntMat,
}

impl SymplecticGram {
    pub fn new(mat: IntMat) -> Result<Self> {
        check_even_square(mat.rows(), mat.cols())?;
        Ok(SymplecticGram { mat })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMat::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.mat
    }

    pub fn to_rat(&self) -> RatMat {
        self.mat.to_rat()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.mat.to_f64()
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.mat.is_skew_symmetric()
    }

    pub fn det(&self) -> BigInt {
        self.mat.det()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }
}

/// A flat 2m-torus carrying a metric and a nondegenerate integral magnetic
/// form, both translation invariant and given by their Gram matrices in one
/// fixed basis of the lattice ℤ^{2m}.
///
/// No coordinate ordering is imposed here; callers supply full Gram matrices.
/// The built-in [`crate::demo`] systems use the interleaved order
/// (x₁, y₁, …, x_m, y_m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusMagneticSystem {
    m: usize,
    metric: MetricGram,
    magnetic: SymplecticGram,
}

impl TorusMagneticSystem {
    pub fn new(metric: MetricGram, magnetic: SymplecticGram) -> Result<Self> {
        if metric.dim() != magnetic.dim() {
            return Err(Error::DimensionMismatch(format!(
                "metric is {}x{0} but magnetic form is {}x{1}",
                metric.dim(),
                magnetic.dim()
            )));
        }
        let m = metric.dim() / 2;
        Ok(TorusMagneticSystem { m, metric, magnetic })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    pub fn metric(&self) -> &MetricGram {
        &self.metric
    }

    pub fn magnetic(&self) -> &SymplecticGram {
        &self.magnetic
    }
}

/// One named invariant check with verdict.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

/// Result of [`validate_system`]: every type invariant, checked exactly.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// First violated invariant as a structured error, if any.
    pub fn first_failure(&self) -> Option<Error> {
        self.checks.iter().find(|c| !c.passed).map(|c| match c.name {
            "metric_symmetric" => Error::MetricNotSymmetric,
            "metric_positive_definite" => {
                let order = c
                    .detail
                    .as_deref()
                    .and_then(|d| d.split_whitespace().last())
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(0);
                Error::MetricNotPositiveDefinite { order }
            }
            "magnetic_skew_symmetric" => Error::MagneticNotSkew,
            "magnetic_nondegenerate" => Error::MagneticDegenerate,
            _ => Error::Precondition(c.name.to_string()),
        })
    }
}

/// Verify all type invariants of a system with exact arithmetic.
pub fn validate_system(sys: &TorusMagneticSystem) -> ValidationReport {
    let mut checks = Vec::new();

    checks.push(Check {
        name: "dimensions_even_and_matching",
        passed: true, // enforced by the constructors
        detail: Some(format!("2m = {}", sys.dim())),
    });

    let sym = sys.metric().is_symmetric();
    checks.push(Check { name: "metric_symmetric", passed: sym, detail: None });

    let pd_violation = if sym { sys.metric().positive_definite_violation() } else { None };
    checks.push(Check {
        name: "metric_positive_definite",
        passed: sym && pd_violation.is_none(),
        detail: pd_violation.map(|k| format!("non-positive leading minor of order {k}")),
    });

    let skew = sys.magnetic().is_skew_symmetric();
    checks.push(Check { name: "magnetic_skew_symmetric", passed: skew, detail: None });

    let det = sys.magnetic().det();
    checks.push(Check {
        name: "magnetic_nondegenerate",
        passed: !det.is_zero(),
        detail: Some(format!("det = {det}")),
    });

    checks.push(Check {
        name: "magnetic_integer_entries",
        passed: true, // enforced by the integer entry type
        detail: None,
    });

    ValidationReport { checks }
}

/// Validate and convert the report's first failure into an error.
pub fn ensure_valid(sys: &TorusMagneticSystem) -> Result<()> {
    match validate_system(sys).first_failure() {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

/// The matrix 𝐅 = 𝐡⁻¹𝛚, exactly. Its trace vanishes and 𝐡𝐅 = 𝛚.
pub fn f_matrix(sys: &TorusMagneticSystem) -> Result<RatMat> {
    let h_inv = sys.metric().matrix().inverse().ok_or(Error::Singular)?;
    Ok(h_inv.mul(&sys.magnetic().to_rat()))
}

/// The multiset {d₁² ≤ … ≤ d_m²} of positive imaginary parts of the
/// eigenvalues of 𝐅 = 𝐡⁻¹𝛚, together with the symplectic volume V = √det 𝛚.
///
/// The d² values are sorted ascending with repeats kept; comparisons are
/// multiset comparisons.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSignature {
    d_squared: Vec<f64>,
    sympl_volume: f64,
    m: usize,
}

impl SpectralSignature {
    pub fn new(mut d_squared: Vec<f64>, sympl_volume: f64, m: usize) -> Result<Self> {
        if d_squared.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} d² values for m = {m}",
                d_squared.len()
            )));
        }
        if d_squared.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Precondition("d² values must be positive and finite".into()));
        }
        if !(sympl_volume > 0.0) {
            return Err(Error::Precondition("symplectic volume must be positive".into()));
        }
        d_squared.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SpectralSignature { d_squared, sympl_volume, m })
    }

    pub fn d_squared(&self) -> &[f64] {
        &self.d_squared
    }

    pub fn sympl_volume(&self) -> f64 {
        self.sympl_volume
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sum_d_squared(&self) -> f64 {
        self.d_squared.iter().sum()
    }

    /// The volume as an exact positive integer; errors when it is not within
    /// relative 1e-9 of one (quantization requires an integral class).
    pub fn volume_int(&self) -> Result<BigInt> {
        let rounded = self.sympl_volume.round();
        if rounded < 1.0
            || (self.sympl_volume - rounded).abs() > 1e-9 * (1.0 + self.sympl_volume.abs())
        {
            return Err(Error::NonIntegralVolume(self.sympl_volume));
        }
        BigInt::from_f64(rounded).ok_or(Error::NonIntegralVolume(self.sympl_volume))
    }

    /// Multiset comparison of the d² values at relative tolerance `tol`.
    pub fn d_squared_close(&self, other: &Self, tol: f64) -> bool {
        self.m == other.m
            && self
                .d_squared
                .iter()
                .zip(&other.d_squared)
                .all(|(a, b)| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())))
    }
}

/// Paired singular values of S = L⁻¹𝛚L⁻ᵗ where 𝐡 = LᵗL.
///
/// S is skew-symmetric, so its singular values occur in equal pairs
/// σ₁=σ₂ ≥ σ₃=σ₄ ≥ …; the d_j² are the pair values. A pairing gap above
/// `tol` signals numerical breakdown and is reported as an error.
fn paired_singular_values(h: &DMatrix<f64>, w: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let chol = nalgebra::Cholesky::new(h.clone())
        .ok_or(Error::MetricNotPositiveDefinite { order: 0 })?;
    let l = chol.l();
    // S = L⁻¹ W L⁻ᵗ computed with two triangular solves
    let y = l.solve_lower_triangular(w).ok_or(Error::Singular)?;
    let z = l.solve_lower_triangular(&y.transpose()).ok_or(Error::Singular)?;
    let s = z.transpose();
    // remove the symmetric part left by round-off
    let s = (&s - s.transpose()) * 0.5;
    let svd = s.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    pair_descending(&sv, tol)
}

/// Collapse a descending list of singular values into pair representatives,
/// rejecting lists whose adjacent pairs disagree beyond `tol` (relative).
fn pair_descending(sv: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut d2 = Vec::with_capacity(sv.len() / 2);
    for j in 0..sv.len() / 2 {
        let hi = sv[2 * j];
        let lo = sv[2 * j + 1];
        let gap = (hi - lo).abs() / (1.0 + hi.abs());
        if gap > tol {
            return Err(Error::PairingFailure { index: 2 * j, gap });
        }
        d2.push(lo);
    }
    Ok(d2)
}

/// Spectral signature of a validated system at relative tolerance `tol`.
pub fn spectral_signature(sys: &TorusMagneticSystem, tol: f64) -> Result<SpectralSignature> {
    let volume = symplectic_volume(sys.magnetic())?;
    spectral_signature_f64(&sys.metric().to_f64(), sys.magnetic(), volume, tol, sys.m())
}

/// Spectral signature for a binary64 metric Gram matrix (deformed metrics)
/// against an integer magnetic form whose exact volume is supplied.
pub fn spectral_signature_f64(
    h: &DMatrix<f64>,
    magnetic: &SymplecticGram,
    volume: BigInt,
    tol: f64,
    m: usize,
) -> Result<SpectralSignature> {
    if h.nrows() != magnetic.dim() || h.ncols() != magnetic.dim() {
        return Err(Error::DimensionMismatch(format!(
            "metric {}x{} vs magnetic {}",
            h.nrows(),
            h.ncols(),
            magnetic.dim()
        )));
    }
    let d2 = paired_singular_values(h, &magnetic.to_f64(), tol)?;
    let v = volume.to_f64().ok_or_else(|| Error::Parse("volume out of f64 range".into()))?;
    SpectralSignature::new(d2, v, m)
}

/// √det(𝛚) as an exact positive integer.
///
/// For an integer skew-symmetric matrix the determinant is the square of the
/// Pfaffian, so a failed square root signals an internal arithmetic bug
/// rather than bad input.
pub fn symplectic_volume(magnetic: &SymplecticGram) -> Result<BigInt> {
    let det = magnetic.det();
    if det.is_zero() {
        return Err(Error::MagneticDegenerate);
    }
    exact_sqrt(&det)
}

fn check_even_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 || rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    Ok(())
}

/// Exact Pfaffian of an integer skew-symmetric matrix, by recursive
/// expansion along the first row. Exponential in the dimension; fine for the
/// desk-scale matrices handled here.
pub fn pfaffian(w: &IntMat) -> Result<BigInt> {
    if !w.is_square() {
        return Err(Error::NotSquare { rows: w.rows(), cols: w.cols() });
    }
    if !w.is_skew_symmetric() {
        return Err(Error::MagneticNotSkew);
    }
    if w.rows() % 2 != 0 {
        return Ok(BigInt::zero());
    }
    let idx: Vec<usize> = (0..w.rows()).collect();
    Ok(pfaffian_rec(w, &idx))
}

fn pfaffian_rec(w: &IntMat, idx: &[usize]) -> BigInt {
    let n = idx.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut acc = BigInt::zero();
    let i = idx[0];
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let a = &w[(i, j)];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> =
            idx.iter().enumerate().filter(|&(p, _)| p != 0 && p != pos).map(|(_, &v)| v).collect();
        let term = a * pfaffian_rec(w, &rest);
        if pos % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::linalg::rat_to_f64;
    use num_rational::BigRational;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn standard_block_j(m: usize) -> SymplecticGram {
        // [[0, I],[−I, 0]] in block coordinate order
        let n = 2 * m;
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..m {
            rows[i][m + i] = 1;
            rows[m + i][i] = -1;
        }
        SymplecticGram::from_rows(&rows).unwrap()
    }

    #[test]
    fn standard_structure_validates() {
        let h = MetricGram::from_diag(&[(1, 1); 4]).unwrap();
        let w = standard_block_j(2);
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let report = validate_system(&sys);
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn degenerate_magnetic_is_flagged() {
        let h = MetricGram::from_diag(&[(1, 1); 4]).unwrap();
        let w = SymplecticGram::from_rows(&[
            vec![0, 0, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, -1, 0, 0],
            vec![0, 0, 0, 0],
        ])
        .unwrap();
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let report = validate_system(&sys);
        assert!(!report.passed());
        assert!(matches!(report.first_failure(), Some(Error::MagneticDegenerate)));
    }

    #[test]
    fn indefinite_metric_is_flagged() {
        let h = MetricGram::from_diag(&[(1, 1), (-1, 1), (1, 1), (1, 1)]).unwrap();
        let w = standard_block_j(2);
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let report = validate_system(&sys);
        assert!(!report.passed());
        assert!(matches!(
            report.first_failure(),
            Some(Error::MetricNotPositiveDefinite { order: 2 })
        ));
    }

    #[test]
    fn f_matrix_is_identity_like_for_standard_data() {
        let h = MetricGram::from_diag(&[(1, 1); 4]).unwrap();
        let w = standard_block_j(2);
        let sys = TorusMagneticSystem::new(h, w.clone()).unwrap();
        let f = f_matrix(&sys).unwrap();
        assert_eq!(f, w.to_rat());
    }

    #[test]
    fn f_matrix_blocks_for_diagonal_metric() {
        // 𝐡 = diag(1,4,1,4) in (x₁,y₁,x₂,y₂) order, 𝛚 = 2dx₁∧dy₁ + 2dx₂∧dy₂
        let h = MetricGram::from_diag(&[(1, 1), (4, 1), (1, 1), (4, 1)]).unwrap();
        let w = demo::product_form(&[2, 2]).unwrap();
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let f = f_matrix(&sys).unwrap();
        let expected = RatMat::from_rows(vec![
            vec![rat(0, 1), rat(2, 1), rat(0, 1), rat(0, 1)],
            vec![rat(-1, 2), rat(0, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(2, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-1, 2), rat(0, 1)],
        ])
        .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn h_times_f_recovers_magnetic_form_exactly() {
        let h = MetricGram::from_diag(&[(3, 2), (4, 1), (7, 5), (4, 3)]).unwrap();
        let w = demo::product_form(&[2, 6]).unwrap();
        let sys = TorusMagneticSystem::new(h.clone(), w.clone()).unwrap();
        let f = f_matrix(&sys).unwrap();
        assert_eq!(h.matrix().mul(&f), w.to_rat());
        assert!(f.trace().is_zero());
    }

    #[test]
    fn volume_of_product_form_is_coefficient_product() {
        let w = demo::product_form(&[2, 2]).unwrap();
        assert_eq!(symplectic_volume(&w).unwrap(), BigInt::from(4));
        let w = demo::product_form(&[1, 4]).unwrap();
        assert_eq!(symplectic_volume(&w).unwrap(), BigInt::from(4));
        let j = standard_block_j(3);
        assert_eq!(symplectic_volume(&j).unwrap(), BigInt::from(1));
    }

    #[test]
    fn signature_of_standard_kahler_torus_is_all_ones() {
        let h = MetricGram::from_diag(&[(1, 1); 6]).unwrap();
        let w = standard_block_j(3);
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let sig = spectral_signature(&sys, crate::DEFAULT_TOL).unwrap();
        assert_eq!(sig.m(), 3);
        for &d in sig.d_squared() {
            assert!((d - 1.0).abs() < 1e-12);
        }
        assert_eq!(sig.volume_int().unwrap(), BigInt::from(1));
    }

    #[test]
    fn signature_closed_form_for_weighted_blocks() {
        // 𝐡 = h_{a,b}, 𝛚 = ω_r gives d_j² = r_j/(a_j b_j)
        let h = MetricGram::from_diag(&[(1, 1), (4, 1), (9, 1), (4, 1)]).unwrap();
        let w = demo::product_form(&[3, 6]).unwrap();
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let sig = spectral_signature(&sys, crate::DEFAULT_TOL).unwrap();
        let expected = [1.0, 1.5]; // {3/(1·2), 6/(3·2)} sorted
        for (d, e) in sig.d_squared().iter().zip(expected) {
            assert!((d - e).abs() < 1e-10, "{d} vs {e}");
        }
        assert_eq!(sig.volume_int().unwrap(), BigInt::from(18));
    }

    #[test]
    fn det_f_equals_product_of_d_fourth_powers() {
        let h = MetricGram::from_diag(&[(2, 1), (3, 1), (5, 2), (7, 3)]).unwrap();
        let w = demo::product_form(&[2, 4]).unwrap();
        let sys = TorusMagneticSystem::new(h, w).unwrap();
        let f = f_matrix(&sys).unwrap();
        let sig = spectral_signature(&sys, crate::DEFAULT_TOL).unwrap();
        let det_f = rat_to_f64(&f.det());
        let prod: f64 = sig.d_squared().iter().map(|d| d * d).product();
        assert!((det_f - prod).abs() <= 1e-8 * (1.0 + det_f.abs()));
    }

    #[test]
    fn pairing_failure_detected_on_unpaired_values() {
        let err = pair_descending(&[5.0, 3.0, 1.0, 1.0], 1e-10).unwrap_err();
        assert!(matches!(err, Error::PairingFailure { index: 0, .. }));
        let ok = pair_descending(&[3.0, 3.0, 1.0, 1.0], 1e-10).unwrap();
        assert_eq!(ok, vec![3.0, 1.0]);
    }

    #[test]
    fn pairing_succeeds_on_valid_skew_input() {
        let h = DMatrix::<f64>::identity(4, 4);
        let mut w = DMatrix::<f64>::zeros(4, 4);
        w[(0, 1)] = 2.0;
        w[(1, 0)] = -2.0;
        w[(2, 3)] = 5.0;
        w[(3, 2)] = -5.0;
        let d2 = paired_singular_values(&h, &w, 1e-10).unwrap();
        assert!((d2[0] - 5.0).abs() < 1e-12);
        assert!((d2[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let w = demo::product_form(&[2, 3]).unwrap();
        let pf = pfaffian(w.matrix()).unwrap();
        assert_eq!(&pf * &pf, w.det());
        assert_eq!(pf, BigInt::from(6));
    }

    #[test]
    fn volume_is_exact_square_root_of_determinant() {
        let w = SymplecticGram::from_rows(&[
            vec![0, 3, 1, -2],
            vec![-3, 0, 4, 0],
            vec![-1, -4, 0, 5],
            vec![2, 0, -5, 0],
        ])
        .unwrap();
        let v = symplectic_volume(&w).unwrap();
        assert_eq!(&v * &v, w.det());
    }
}
