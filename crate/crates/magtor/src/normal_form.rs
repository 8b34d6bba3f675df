//! Integer normal form of skew-symmetric forms: Chern invariant factors,
//! the unimodular congruence witnessing them, and the phase-space
//! obstruction derived from factor comparison.
//!
//! Every integer skew-symmetric nondegenerate 2m×2m matrix 𝛚 is congruent
//! over ℤ to the block form [[0, R], [−R, 0]] with R = diag(r₁, …, r_m),
//! r₁ | r₂ | … | r_m positive. The tuple (r₁, …, r_m) is unique (the Chern
//! invariant factors); the witnessing basis change A is unimodular.
//!
//! The sign of det(A) is not a free choice: Pf(ᵗA𝛚A) = det(A)·Pf(𝛚), and the
//! block normal form has Pfaffian (−1)^{m(m−1)/2}·r₁⋯r_m, so
//! det(A) = (−1)^{m(m−1)/2}·r₁⋯r_m / Pf(𝛚) ∈ {+1, −1} is determined by the
//! input's Pfaffian sign. A det = −1 witness cannot be repaired: any E with
//! ᵗE·NF·E = NF is symplectic for NF and symplectic matrices have
//! determinant +1. [`UnimodularTransform`] therefore reports the determinant
//! honestly instead of pretending it is always +1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::IntMat;
use crate::model::SymplecticGram;
use crate::{Error, Result};

/// The divisibility chain r₁ | r₂ | … | r_m of positive integers attached to
/// an integral symplectic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernFactors {
    r: Vec<BigInt>,
}

impl ChernFactors {
    pub fn new(r: Vec<BigInt>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Precondition("empty factor tuple".into()));
        }
        if r.iter().any(|x| !x.is_positive()) {
            return Err(Error::Precondition("Chern factors must be positive".into()));
        }
        for w in r.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::Precondition(format!(
                    "divisibility chain violated: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(ChernFactors { r })
    }

    pub fn from_i64(r: &[i64]) -> Result<Self> {
        Self::new(r.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.r
    }

    pub fn product(&self) -> BigInt {
        self.r.iter().product()
    }
}

impl std::fmt::Display for ChernFactors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.r.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Integer basis change A with |det A| = 1 and ᵗA𝛚A in block normal form.
///
/// det(A) is +1 exactly when the Pfaffian sign of the input permits (see the
/// module docs); it is exposed rather than normalized away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularTransform {
    a: IntMat,
    det: i32,
}

impl UnimodularTransform {
    pub fn new(a: IntMat) -> Result<Self> {
        let d = a.det();
        let det = if d == BigInt::one() {
            1
        } else if d == -BigInt::one() {
            -1
        } else {
            return Err(Error::Precondition(format!("matrix has determinant {d}, not ±1")));
        };
        Ok(UnimodularTransform { a, det })
    }

    pub fn matrix(&self) -> &IntMat {
        &self.a
    }

    pub fn det(&self) -> i32 {
        self.det
    }
}

/// Gram matrix [[0, R], [−R, 0]] of ω_r = Σ r_j dx_j∧dy_j in the block
/// coordinate order (x₁, …, x_m, y₁, …, y_m).
pub fn block_normal_form(r: &ChernFactors) -> IntMat {
    let m = r.m();
    let mut nf = IntMat::zeros(2 * m, 2 * m);
    for (j, rj) in r.as_slice().iter().enumerate() {
        nf[(j, m + j)] = rj.clone();
        nf[(m + j, j)] = -rj.clone();
    }
    nf
}

/// Skew-symmetric Smith-type reduction tracking the basis change.
struct SkewReducer {
    w: IntMat,
    a: IntMat,
}

impl SkewReducer {
    fn new(w: IntMat) -> Self {
        let n = w.rows();
        SkewReducer { w, a: IntMat::identity(n) }
    }

    /// Swap basis vectors i and j.
    fn swap(&mut self, i: usize, j: usize) {
        self.w.swap_rows(i, j);
        self.w.swap_cols(i, j);
        self.a.swap_cols(i, j);
    }

    /// Negate basis vector i.
    fn negate(&mut self, i: usize) {
        self.w.negate_row(i);
        self.w.negate_col(i);
        self.a.negate_col(i);
    }

    /// Basis vector update e_dst += c · e_src (an integer transvection).
    fn add(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        self.w.row_add(dst, src, c);
        self.w.col_add(dst, src, c);
        self.a.col_add(dst, src, c);
    }

    /// Nonzero entry of minimal absolute value in the trailing block,
    /// ties broken by lowest row then lowest column index.
    fn select_pivot(&self, base: usize) -> Option<(usize, usize)> {
        let n = self.w.rows();
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in base..n {
            for j in i + 1..n {
                let v = &self.w[(i, j)];
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                match &best {
                    Some((b, _, _)) if *b <= a => {}
                    _ => best = Some((a, i, j)),
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    /// Establish the k-th canonical pair at rows (base, base+1): positive
    /// pivot, cleared rows/columns, pivot dividing the whole trailing block.
    fn reduce_pair(&mut self, base: usize) -> Result<()> {
        let n = self.w.rows();
        loop {
            let (pi, mut pj) = self.select_pivot(base).ok_or(Error::MagneticDegenerate)?;
            if pi != base {
                self.swap(base, pi);
                if pj == base {
                    pj = pi;
                }
            }
            if pj != base + 1 {
                self.swap(base + 1, pj);
            }
            if self.w[(base, base + 1)].is_negative() {
                self.negate(base + 1);
            }
            let c = self.w[(base, base + 1)].clone();
            debug_assert!(c.is_positive());

            // clear ω(u, e_l) and ω(v, e_l) for the rest of the basis
            let mut dirty = false;
            for l in base + 2..n {
                let t = self.w[(base, l)].clone();
                if !t.is_zero() {
                    let q = t.div_floor(&c);
                    self.add(l, base + 1, &-q); // ω(u, e_l) ← t mod c
                    if !self.w[(base, l)].is_zero() {
                        dirty = true;
                    }
                }
                let s = self.w[(base + 1, l)].clone();
                if !s.is_zero() {
                    let q = s.div_floor(&c);
                    self.add(l, base, &q); // ω(v, e_l) ← s mod c
                    if !self.w[(base + 1, l)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // leftover remainders are smaller than the pivot; reselect
                continue;
            }

            // force the pivot to divide the trailing block so the
            // divisibility chain holds by construction
            if let Some(i) = self.find_nondivisible_row(base + 2, &c) {
                self.add(base, i, &BigInt::one());
                continue;
            }
            return Ok(());
        }
    }

    fn find_nondivisible_row(&self, from: usize, c: &BigInt) -> Option<usize> {
        let n = self.w.rows();
        for i in from..n {
            for j in i + 1..n {
                if !(&self.w[(i, j)] % c).is_zero() {
                    return Some(i);
                }
            }
        }
        None
    }
}

/// Compute the Chern invariant factors of a nondegenerate integer
/// skew-symmetric form along with a unimodular A such that ᵗA𝛚A is the block
/// normal form [[0, R], [−R, 0]].
pub fn chern_invariant_factors(
    magnetic: &SymplecticGram,
) -> Result<(ChernFactors, UnimodularTransform)> {
    if !magnetic.is_skew_symmetric() {
        return Err(Error::MagneticNotSkew);
    }
    if !magnetic.is_nondegenerate() {
        return Err(Error::MagneticDegenerate);
    }
    let n = magnetic.dim();
    let m = n / 2;
    let mut red = SkewReducer::new(magnetic.matrix().clone());
    for k in 0..m {
        red.reduce_pair(2 * k)?;
    }
    let r: Vec<BigInt> = (0..m).map(|k| red.w[(2 * k, 2 * k + 1)].clone()).collect();
    let factors = ChernFactors::new(r)?;

    // permute the interleaved pairs (u₁, v₁, …) to block order (u₁, …, v₁, …)
    let mut p = IntMat::zeros(n, n);
    for j in 0..m {
        p[(2 * j, j)] = BigInt::one();
        p[(2 * j + 1, m + j)] = BigInt::one();
    }
    let a = red.a.mul(&p);
    debug_assert_eq!(magnetic.matrix().congruence(&a), block_normal_form(&factors));
    let transform = UnimodularTransform::new(a)?;
    Ok((factors, transform))
}

/// Exact verification: ᵗA𝛚A equals the block normal form of `r` entrywise,
/// A is unimodular, and the divisibility chain holds.
///
/// The factor chain and positivity are enforced by [`ChernFactors`]
/// construction; unimodularity (|det A| = 1) by [`UnimodularTransform`].
/// The determinant is ±1 with the sign dictated by the input's Pfaffian
/// orientation, so the check here is entrywise equality plus unimodularity.
pub fn verify_normal_form(
    magnetic: &SymplecticGram,
    r: &ChernFactors,
    a: &UnimodularTransform,
) -> bool {
    if magnetic.dim() != 2 * r.m() || a.matrix().rows() != magnetic.dim() {
        return false;
    }
    if a.det().abs() != 1 {
        return false;
    }
    magnetic.matrix().congruence(a.matrix()) == block_normal_form(r)
}

/// Outcome of comparing Chern invariant factors of two magnetic forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstructionVerdict {
    /// Different factor tuples: the twisted cotangent phase spaces
    /// (T*M, Ω) and (T*M, Ω′) are not symplectomorphic — nor are they with
    /// the zero section removed.
    NotSymplectomorphic,
    /// Equal factor tuples: the comparison is silent. Equal factors yield a
    /// base homeomorphism pulling one form to the other, but the forms need
    /// not be cohomologous, so no equivalence is asserted.
    Inconclusive,
}

impl std::fmt::Display for ObstructionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObstructionVerdict::NotSymplectomorphic => write!(f, "NotSymplectomorphic"),
            ObstructionVerdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub verdict: ObstructionVerdict,
    pub factors1: ChernFactors,
    pub factors2: ChernFactors,
}

/// Compare the Chern invariant factors of two magnetic forms on the same
/// torus and report whether the twisted phase spaces can be told apart.
pub fn phase_space_obstruction(
    magnetic1: &SymplecticGram,
    magnetic2: &SymplecticGram,
) -> Result<ObstructionReport> {
    if magnetic1.dim() != magnetic2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "forms of dimension {} and {}",
            magnetic1.dim(),
            magnetic2.dim()
        )));
    }
    let (factors1, _) = chern_invariant_factors(magnetic1)?;
    let (factors2, _) = chern_invariant_factors(magnetic2)?;
    let verdict = if factors1 == factors2 {
        ObstructionVerdict::Inconclusive
    } else {
        ObstructionVerdict::NotSymplectomorphic
    };
    Ok(ObstructionReport { verdict, factors1, factors2 })
}
