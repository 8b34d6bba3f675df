//! Classical phase-space side: the explicit linear symplectomorphism Φ of
//! the twisted cotangent bundle, integer symplectic sampling, isospectral
//! metric deformations, the closed-form magnetic flow, and truncated length
//! spectra of flat metrics.
//!
//! Sign conventions: with the twisted form Ω̂ = [[C, I], [−I, 0]] and
//! Hamiltonian H(q,p) = ½ ᵗp 𝐡⁻¹ p, the Hamilton equation ι_{X_H}Ω = dH
//! reads q̇ = 𝐡⁻¹p, ṗ = −𝛚𝐡⁻¹p. The opposite sign convention reverses time
//! and leaves every property checked here invariant.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{rat_to_f64, IntMat, RatMat};
use crate::model::{MetricGram, SymplecticGram, TorusMagneticSystem};
use crate::normal_form::ChernFactors;
use crate::{Error, Result};

/// The twisted symplectic form Ω = ω₀ + π*ω on T*M as a constant bilinear
/// form: the 4m×4m matrix [[C, I], [−I, 0]] built from the magnetic Gram
/// matrix C.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedForm {
    c: RatMat,
    mat: RatMat,
}

impl TwistedForm {
    pub fn new(magnetic: &SymplecticGram) -> Self {
        let n = magnetic.dim();
        let c = magnetic.to_rat();
        let id = RatMat::identity(n);
        let zero = RatMat::zeros(n, n);
        let mat = RatMat::block_2x2(&c, &id, &id.neg(), &zero);
        TwistedForm { c, mat }
    }

    /// Dimension of the underlying torus (2m); the form itself is 4m×4m.
    pub fn base_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn matrix(&self) -> &RatMat {
        &self.mat
    }

    /// Exact inverse in closed form: [[0, −I], [I, C]].
    pub fn inverse(&self) -> RatMat {
        let n = self.base_dim();
        let id = RatMat::identity(n);
        let zero = RatMat::zeros(n, n);
        RatMat::block_2x2(&zero, &id.neg(), &id, &self.c)
    }
}

/// True iff ᵗA𝛚A = 𝛚 exactly.
pub fn is_linear_symplectomorphism(a: &RatMat, magnetic: &SymplecticGram) -> bool {
    if !a.is_square() || a.rows() != magnetic.dim() {
        return false;
    }
    let c = magnetic.to_rat();
    a.transpose().mul(&c).mul(a) == c
}

/// The linear symplectomorphism Φ(q, p) = (A q + C⁻¹(ᵗA⁻¹ − Id) p, p) of
/// (T*ℝ^{2m}, Ω), stored by its nontrivial blocks. The momentum blocks are
/// implicitly (0, Id), so Φ fixes p and hence every Hamiltonian that
/// depends only on p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMap {
    block_qq: RatMat,
    block_qp: RatMat,
}

impl PhiMap {
    /// Assemble from explicit blocks (mainly for tests probing failure
    /// modes); blocks must be square of equal size.
    pub fn from_blocks(block_qq: RatMat, block_qp: RatMat) -> Result<Self> {
        if !block_qq.is_square()
            || block_qq.rows() != block_qp.rows()
            || block_qq.cols() != block_qp.cols()
        {
            return Err(Error::DimensionMismatch("Φ blocks must be square and equal-sized".into()));
        }
        Ok(PhiMap { block_qq, block_qp })
    }

    pub fn identity(n: usize) -> Self {
        PhiMap { block_qq: RatMat::identity(n), block_qp: RatMat::zeros(n, n) }
    }

    /// Dimension of the underlying torus (2m).
    pub fn base_dim(&self) -> usize {
        self.block_qq.rows()
    }

    pub fn block_qq(&self) -> &RatMat {
        &self.block_qq
    }

    pub fn block_qp(&self) -> &RatMat {
        &self.block_qp
    }

    /// The full 4m×4m matrix [[A, B], [0, Id]].
    pub fn assembled(&self) -> RatMat {
        let n = self.base_dim();
        RatMat::block_2x2(
            &self.block_qq,
            &self.block_qp,
            &RatMat::zeros(n, n),
            &RatMat::identity(n),
        )
    }

    /// Exact action on a rational phase-space point.
    pub fn apply_exact(
        &self,
        q: &[BigRational],
        p: &[BigRational],
    ) -> (Vec<BigRational>, Vec<BigRational>) {
        let aq = self.block_qq.mul_vec(q);
        let bp = self.block_qp.mul_vec(p);
        let q_new = aq.iter().zip(&bp).map(|(a, b)| a + b).collect();
        (q_new, p.to_vec())
    }

    /// Binary64 action on a phase-space state.
    pub fn apply_state(&self, state: &CotangentState) -> CotangentState {
        let a = self.block_qq.to_f64();
        let b = self.block_qp.to_f64();
        let q = nalgebra::DVector::from_column_slice(&state.q);
        let p = nalgebra::DVector::from_column_slice(&state.p);
        let q_new = &a * &q + &b * &p;
        CotangentState { q: q_new.iter().copied().collect(), p: state.p.clone() }
    }
}

/// Build Φ for a linear symplectomorphism A of (ℝ^{2m}, ω).
pub fn build_phi(a: &RatMat, magnetic: &SymplecticGram) -> Result<PhiMap> {
    if !is_linear_symplectomorphism(a, magnetic) {
        return Err(Error::NotSymplectic);
    }
    let n = magnetic.dim();
    let c_inv = magnetic.to_rat().inverse().ok_or(Error::MagneticDegenerate)?;
    let a_inv = a.inverse().ok_or(Error::SingularTransform)?;
    let block_qp = c_inv.mul(&a_inv.transpose().sub(&RatMat::identity(n)));
    Ok(PhiMap { block_qq: a.clone(), block_qp })
}

/// Outcome of the exact verification of a candidate Φ.
#[derive(Clone, Debug)]
pub struct PhiReport {
    /// ᵗΦ̂ Ω̂ Φ̂ = Ω̂, checked entrywise in exact arithmetic.
    pub preserves_twisted_form: bool,
    /// H∘Φ = H for the kinetic Hamiltonian: holds structurally because the
    /// momentum blocks of [`PhiMap`] are (0, Id) and H reads only p.
    pub preserves_hamiltonian: bool,
    /// Φ(q + q₀, p) = (A q₀, 0) + Φ(q, p): holds structurally by linearity.
    pub lattice_equivariant: bool,
    pub failures: Vec<String>,
}

impl PhiReport {
    pub fn all_passed(&self) -> bool {
        self.preserves_twisted_form && self.preserves_hamiltonian && self.lattice_equivariant
    }
}

/// Verify the defining identities of Φ against a twisted form.
///
/// The metric argument fixes which kinetic Hamiltonian the structural
/// H-preservation claim refers to; any metric of the right dimension is
/// preserved because Φ fixes p.
pub fn verify_phi(phi: &PhiMap, form: &TwistedForm, metric: &MetricGram) -> PhiReport {
    let mut failures = Vec::new();
    let dims_ok = phi.base_dim() == form.base_dim() && metric.dim() == phi.base_dim();
    if !dims_ok {
        failures.push(format!(
            "dimension mismatch: Φ on 2m = {}, form on 2m = {}, metric on 2m = {}",
            phi.base_dim(),
            form.base_dim(),
            metric.dim()
        ));
        return PhiReport {
            preserves_twisted_form: false,
            preserves_hamiltonian: false,
            lattice_equivariant: false,
            failures,
        };
    }
    let assembled = phi.assembled();
    let lhs = assembled.transpose().mul(form.matrix()).mul(&assembled);
    let preserves_twisted_form = lhs == *form.matrix();
    if !preserves_twisted_form {
        failures.push("ᵗΦ̂ Ω̂ Φ̂ ≠ Ω̂".into());
    }
    PhiReport {
        preserves_twisted_form,
        preserves_hamiltonian: true,
        lattice_equivariant: true,
        failures,
    }
}

/// Random element of the integer symplectic group of Gram(ω_r) (block
/// coordinate order), as a product of `n_factors` standard generators:
/// upper/lower block transvections with R-compatible symmetric integer
/// blocks, and the block swap [[0, Id], [−Id, 0]].
///
/// Deterministic for a fixed seed. The result always has determinant +1 and
/// satisfies ᵗA·Gram(ω_r)·A = Gram(ω_r) exactly.
pub fn sample_symplectic_integer(r: &ChernFactors, seed: u64, n_factors: usize) -> IntMat {
    let m = r.m();
    let n = 2 * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = IntMat::identity(n);
    for _ in 0..n_factors {
        let gen = match rng.gen_range(0..3u8) {
            0 => transvection(r, &mut rng, true),
            1 => transvection(r, &mut rng, false),
            _ => block_swap(m),
        };
        a = a.mul(&gen);
    }
    a
}

/// [[Id, S], [0, Id]] (upper) or [[Id, 0], [S, Id]] (lower) with RS
/// symmetric: S_{kj} = t, S_{jk} = (r_k/r_j)·t for j < k, free diagonal.
fn transvection(r: &ChernFactors, rng: &mut ChaCha8Rng, upper: bool) -> IntMat {
    let m = r.m();
    let rs = r.as_slice();
    let mut s = IntMat::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let t = BigInt::from(rng.gen_range(-2..=2i64));
            if j == k {
                s[(j, j)] = t;
            } else {
                // divisibility chain makes r_k / r_j an integer
                let ratio = &rs[k] / &rs[j];
                s[(j, k)] = &t * ratio;
                s[(k, j)] = t;
            }
        }
    }
    let n = 2 * m;
    let mut g = IntMat::identity(n);
    for i in 0..m {
        for j in 0..m {
            if upper {
                g[(i, m + j)] = s[(i, j)].clone();
            } else {
                g[(m + i, j)] = s[(i, j)].clone();
            }
        }
    }
    g
}

fn block_swap(m: usize) -> IntMat {
    let n = 2 * m;
    let mut g = IntMat::zeros(n, n);
    for i in 0..m {
        g[(i, m + i)] = BigInt::one();
        g[(m + i, i)] = -BigInt::one();
    }
    g
}

/// Pull back the metric along an invertible linear map: ᵗA𝐡A, exactly.
/// Positive definiteness is preserved (congruence by an invertible matrix).
pub fn deform_metric(h: &MetricGram, a: &RatMat) -> Result<MetricGram> {
    if !a.is_square() || a.rows() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "transform is {}x{}, metric is {2}x{2}",
            a.rows(),
            a.cols(),
            h.dim()
        )));
    }
    if a.inverse().is_none() {
        return Err(Error::SingularTransform);
    }
    MetricGram::new(a.transpose().mul(h.matrix()).mul(a))
}

/// A curve h_t = ᵗA_t 𝐡 A_t of metrics with A_t = exp(tX) in the symplectic
/// group of 𝛚, hence all (M, h_t, 𝛚) share one Landau spectrum at every
/// level while the metrics are generically pairwise non-isometric.
///
/// The generator is X = 𝛚⁻¹S for symmetric S, so 𝛚X = S is symmetric and
/// ᵗX𝛚 + 𝛚X = 0. Membership in the symplectic Lie algebra forces tr X = 0,
/// so det A_t = 1 and the Riemannian volume is constant along the family.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    base_metric: MetricGram,
    magnetic: SymplecticGram,
    generator: DMatrix<f64>,
    times: Vec<f64>,
}

impl DeformationFamily {
    pub fn new(
        h: &MetricGram,
        magnetic: &SymplecticGram,
        s: &DMatrix<f64>,
        times: &[f64],
    ) -> Result<Self> {
        let n = magnetic.dim();
        if h.dim() != n || s.nrows() != n || s.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "metric {}, magnetic {}, generator {}x{}",
                h.dim(),
                n,
                s.nrows(),
                s.ncols()
            )));
        }
        let scale = 1.0 + s.amax();
        if (s - s.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Precondition("deformation seed matrix must be symmetric".into()));
        }
        let w_inv = magnetic.to_rat().inverse().ok_or(Error::MagneticDegenerate)?.to_f64();
        let x = &w_inv * s;
        let w = magnetic.to_f64();
        let residual = (x.transpose() * &w + &w * &x).amax();
        if residual > 1e-12 * (1.0 + x.amax()) * (1.0 + w.amax()) {
            return Err(Error::Precondition(format!(
                "generator left the symplectic Lie algebra (residual {residual:e})"
            )));
        }
        Ok(DeformationFamily {
            base_metric: h.clone(),
            magnetic: magnetic.clone(),
            generator: x,
            times: times.to_vec(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn base_metric(&self) -> &MetricGram {
        &self.base_metric
    }

    pub fn magnetic(&self) -> &SymplecticGram {
        &self.magnetic
    }

    /// A_t = exp(tX) via scaling-and-squaring.
    pub fn transform_at(&self, t: f64) -> DMatrix<f64> {
        (&self.generator * t).exp()
    }

    pub fn transforms(&self) -> Vec<DMatrix<f64>> {
        self.times.iter().map(|&t| self.transform_at(t)).collect()
    }

    /// Worst entry of ᵗA𝛚A − 𝛚 for a candidate transform.
    pub fn symplectic_residual(&self, a: &DMatrix<f64>) -> f64 {
        let w = self.magnetic.to_f64();
        (a.transpose() * &w * a - &w).amax()
    }

    /// h_t = ᵗA_t 𝐡 A_t for every configured time, with the symplectic
    /// residual of each A_t verified against the 1e-10 budget.
    pub fn metrics(&self) -> Result<Vec<DMatrix<f64>>> {
        let h = self.base_metric.to_f64();
        let mut out = Vec::with_capacity(self.times.len());
        for &t in &self.times {
            let a = self.transform_at(t);
            let residual = self.symplectic_residual(&a);
            if residual > 1e-10 * (1.0 + a.amax().powi(2)) {
                return Err(Error::Precondition(format!(
                    "transform at t = {t} lost symplecticity (residual {residual:e})"
                )));
            }
            out.push(a.transpose() * &h * &a);
        }
        Ok(out)
    }
}

/// Metrics of the deformation family generated by symmetric `s`.
pub fn deformation_family(
    h: &MetricGram,
    magnetic: &SymplecticGram,
    s: &DMatrix<f64>,
    times: &[f64],
) -> Result<Vec<DMatrix<f64>>> {
    DeformationFamily::new(h, magnetic, s, times)?.metrics()
}

/// A point of T*M: position q (a representative of q mod ℤ^{2m}) and
/// momentum covector p.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl CotangentState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "q has length {}, p has length {}",
                q.len(),
                p.len()
            )));
        }
        Ok(CotangentState { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Copy with the position reduced to the fundamental domain [0,1)^{2m}.
    pub fn reduced(&self) -> CotangentState {
        CotangentState {
            q: self.q.iter().map(|x| x.rem_euclid(1.0)).collect(),
            p: self.p.clone(),
        }
    }
}

/// Closed-form magnetic flow of a fixed system.
///
/// With G = −𝛚𝐡⁻¹: p(t) = e^{tG} p₀ and q(t) = q₀ − 𝛚⁻¹(e^{tG} − Id) p₀,
/// using the exact identity 𝐡⁻¹G⁻¹ = −𝛚⁻¹. G is invertible because 𝛚 is
/// nondegenerate, so no small-t series fallback is needed.
pub struct MagneticFlow {
    dim: usize,
    h_inv: DMatrix<f64>,
    g: DMatrix<f64>,
    neg_w_inv: DMatrix<f64>,
}

impl MagneticFlow {
    pub fn new(sys: &TorusMagneticSystem) -> Result<Self> {
        let h_inv = sys.metric().matrix().inverse().ok_or(Error::Singular)?.to_f64();
        let w = sys.magnetic().to_f64();
        let g = -(&w * &h_inv);
        let neg_w_inv =
            sys.magnetic().to_rat().inverse().ok_or(Error::MagneticDegenerate)?.neg().to_f64();
        Ok(MagneticFlow { dim: sys.dim(), h_inv, g, neg_w_inv })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flow for time t on the universal cover (no lattice reduction).
    pub fn at_cover(&self, state: &CotangentState, t: f64) -> Result<CotangentState> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs system dimension {}",
                state.dim(),
                self.dim
            )));
        }
        let p0 = nalgebra::DVector::from_column_slice(&state.p);
        let q0 = nalgebra::DVector::from_column_slice(&state.q);
        let e = (&self.g * t).exp();
        let p_t = &e * &p0;
        let q_t = &q0 + &self.neg_w_inv * (&p_t - &p0);
        Ok(CotangentState { q: q_t.iter().copied().collect(), p: p_t.iter().copied().collect() })
    }

    /// Flow for time t with the position reduced to [0,1)^{2m}.
    pub fn at(&self, state: &CotangentState, t: f64) -> Result<CotangentState> {
        Ok(self.at_cover(state, t)?.reduced())
    }

    /// Kinetic energy H(q, p) = ½ ᵗp 𝐡⁻¹ p; conserved along the flow.
    pub fn energy(&self, state: &CotangentState) -> f64 {
        let p = nalgebra::DVector::from_column_slice(&state.p);
        0.5 * (&p.transpose() * &self.h_inv * &p)[(0, 0)]
    }
}

/// One-shot flow evaluation with lattice reduction.
pub fn magnetic_flow(
    sys: &TorusMagneticSystem,
    state: &CotangentState,
    t: f64,
) -> Result<CotangentState> {
    MagneticFlow::new(sys)?.at(state, t)
}

/// One-shot flow evaluation on the universal cover.
pub fn magnetic_flow_cover(
    sys: &TorusMagneticSystem,
    state: &CotangentState,
    t: f64,
) -> Result<CotangentState> {
    MagneticFlow::new(sys)?.at_cover(state, t)
}

/// Kinetic energy of a state under the system's metric.
pub fn kinetic_energy(sys: &TorusMagneticSystem, state: &CotangentState) -> Result<f64> {
    Ok(MagneticFlow::new(sys)?.energy(state))
}

/// Worst-case deviation of the conjugacy Φ ∘ flow_t = flow_t ∘ Φ over a
/// sample of states and times, evaluated on the universal cover.
#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    pub max_deviation: f64,
    pub samples: usize,
}

/// Check that Φ built from A intertwines the magnetic flow with itself
/// (Φ preserves both Ω and H, so it commutes with the flow).
pub fn flow_conjugacy_check(
    sys: &TorusMagneticSystem,
    a: &RatMat,
    states: &[CotangentState],
    times: &[f64],
) -> Result<ConjugacyReport> {
    let phi = build_phi(a, sys.magnetic())?;
    let flow = MagneticFlow::new(sys)?;
    let mut max_deviation = 0.0f64;
    let mut samples = 0usize;
    for state in states {
        for &t in times {
            let lhs = phi.apply_state(&flow.at_cover(state, t)?);
            let rhs = flow.at_cover(&phi.apply_state(state), t)?;
            for (x, y) in lhs.q.iter().zip(&rhs.q).chain(lhs.p.iter().zip(&rhs.p)) {
                max_deviation = max_deviation.max((x - y).abs());
            }
            samples += 1;
        }
    }
    Ok(ConjugacyReport { max_deviation, samples })
}

/// Truncated length spectrum: the multiset of squared 𝐡-lengths ᵗv𝐡v of
/// nonzero lattice vectors up to a bound, exact and sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSpectrum {
    squared: Vec<BigRational>,
    truncated: bool,
}

impl LengthSpectrum {
    pub fn squared_lengths(&self) -> &[BigRational] {
        &self.squared
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.squared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squared.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.squared.iter().map(rat_to_f64).collect()
    }

    /// Exact multiset equality.
    pub fn multiset_eq(&self, other: &Self) -> bool {
        self.squared == other.squared && self.truncated == other.truncated
    }
}

/// Enumerate every nonzero lattice vector v with ᵗv𝐡v ≤ bound and collect
/// the squared lengths (exact), capped at `max_count` entries.
///
/// The search box |v_i| ≤ √(bound·(𝐡⁻¹)_{ii}) is exact for ellipsoids, so
/// the enumeration is complete; membership is decided in integer arithmetic
/// after clearing denominators. Enumeration refuses to scan more than
/// 100·max_count candidates.
pub fn length_spectrum(h: &MetricGram, bound: f64, max_count: usize) -> Result<LengthSpectrum> {
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(Error::Precondition(format!("bound must be positive and finite, got {bound}")));
    }
    if max_count == 0 {
        return Err(Error::Precondition("max_count must be positive".into()));
    }
    let n = h.dim();
    let bound_rat = BigRational::from_float(bound).expect("finite bound");
    let h_inv = h
        .matrix()
        .inverse()
        .ok_or(Error::MetricNotPositiveDefinite { order: 0 })?;

    // per-axis bounds |v_i| ≤ √(bound · (h⁻¹)_{ii})
    let mut box_bounds = Vec::with_capacity(n);
    for i in 0..n {
        let c = &bound_rat * &h_inv[(i, i)];
        if c.is_negative() {
            return Err(Error::MetricNotPositiveDefinite { order: i + 1 });
        }
        let b = c.floor().to_integer().sqrt();
        box_bounds.push(b.to_i64().ok_or(Error::BoundTooLarge {
            candidates: u128::MAX,
            limit: 100 * max_count as u128,
        })?);
    }

    let limit = 100 * max_count as u128;
    let mut candidates: u128 = 1;
    for &b in &box_bounds {
        candidates = candidates.saturating_mul(2 * b as u128 + 1);
    }
    if candidates > limit {
        return Err(Error::BoundTooLarge { candidates, limit });
    }

    // clear denominators: D·𝐡 is integer, compare ᵗv(D𝐡)v ≤ D·bound
    let mut denom_lcm = BigInt::one();
    for i in 0..n {
        for j in 0..n {
            denom_lcm = denom_lcm.lcm(h.matrix()[(i, j)].denom());
        }
    }
    let mut h_scaled = IntMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let scaled = h.matrix()[(i, j)].clone() * BigRational::from_integer(denom_lcm.clone());
            debug_assert!(scaled.is_integer());
            h_scaled[(i, j)] = scaled.to_integer();
        }
    }
    let rhs = &bound_rat * BigRational::from_integer(denom_lcm.clone());
    let (rhs_num, rhs_den) = (rhs.numer().clone(), rhs.denom().clone());

    let mut squared: Vec<BigRational> = Vec::new();
    let mut v = vec![0i64; n];
    let mut done = false;
    // odometer over the box, starting from the most negative corner
    for (i, &b) in box_bounds.iter().enumerate() {
        v[i] = -b;
    }
    while !done {
        if v.iter().any(|&x| x != 0) {
            let mut quad = BigInt::zero();
            for i in 0..n {
                if v[i] == 0 {
                    continue;
                }
                for j in 0..n {
                    if v[j] == 0 {
                        continue;
                    }
                    quad += &h_scaled[(i, j)] * BigInt::from(v[i] * v[j]);
                }
            }
            // ᵗv(D𝐡)v ≤ D·bound ⟺ quad · rhs_den ≤ rhs_num
            if &quad * &rhs_den <= rhs_num {
                squared.push(BigRational::new(quad, denom_lcm.clone()));
            }
        }
        // advance odometer
        done = true;
        for i in 0..n {
            if v[i] < box_bounds[i] {
                v[i] += 1;
                for k in 0..i {
                    v[k] = -box_bounds[k];
                }
                done = false;
                break;
            }
        }
    }

    squared.sort();
    let truncated = squared.len() > max_count;
    squared.truncate(max_count);
    Ok(LengthSpectrum { squared, truncated })
}
