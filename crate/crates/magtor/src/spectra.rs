//! Landau spectra, their comparison across quantization levels, Kähler
//! detection, and reconstruction of the spectral signature from a spectrum.
//!
//! At level k (ħ = 1/k) a system with signature {d₁², …, d_m²} and integer
//! symplectic volume V has eigenvalues (1/k)·ν(𝐣) with
//! ν(𝐣) = π Σ d_i²(2j_i + 1) over 𝐣 ∈ (ℤ≥0)^m, each tuple contributing
//! multiplicity k^m·V. Distinct tuples with equal ν merge into one level
//! whose multiplicities add.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::model::{
    ensure_valid, f_matrix, spectral_signature, symplectic_volume, SpectralSignature,
    TorusMagneticSystem,
};
use crate::{Error, Result};

/// Energies closer than MERGE_TOL·(1 + E) are one Landau level.
pub const MERGE_TOL: f64 = 1e-9;

/// A truncated Landau spectrum: sorted distinct energies with exact
/// multiplicities, every multiplicity a positive multiple of k^m·V.
#[derive(Clone, Debug, PartialEq)]
pub struct LandauSpectrum {
    k: u32,
    cutoff: f64,
    levels: Vec<(f64, BigInt)>,
}

impl LandauSpectrum {
    /// Assemble a spectrum from parts (used by parsers); levels must be
    /// sorted strictly ascending with positive multiplicities.
    pub fn from_parts(k: u32, cutoff: f64, levels: Vec<(f64, BigInt)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("quantization level k must be positive".into()));
        }
        if levels.is_empty() {
            return Err(Error::Precondition("spectrum has no levels".into()));
        }
        for pair in levels.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InconsistentSpectrum("energies not strictly increasing".into()));
            }
        }
        if levels.iter().any(|(e, m)| !e.is_finite() || *e <= 0.0 || !m.is_positive()) {
            return Err(Error::InconsistentSpectrum(
                "energies must be positive and finite, multiplicities positive".into(),
            ));
        }
        Ok(LandauSpectrum { k, cutoff, levels })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn levels(&self) -> &[(f64, BigInt)] {
        &self.levels
    }

    pub fn ground_level(&self) -> &(f64, BigInt) {
        &self.levels[0]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Sum of d_i²·(2 j_i + 1) enumerated over the box ν ≤ budget; returns the
/// raw Σ d_i² j_i offsets (one entry per index tuple).
///
/// Complete by construction: ν is monotone in every j_i, so the per-axis
/// bound j_i ≤ (budget − Σd²)/(2 d_i²) with early pruning misses no tuple.
fn enumerate_offsets(d2: &[f64], budget: f64) -> Vec<f64> {
    fn rec(d2: &[f64], axis: usize, acc: f64, budget: f64, out: &mut Vec<f64>) {
        if axis == d2.len() {
            out.push(acc);
            return;
        }
        let mut j = 0u64;
        loop {
            let offset = acc + 2.0 * d2[axis] * j as f64;
            if offset > budget * (1.0 + 1e-12) + 1e-12 {
                break;
            }
            rec(d2, axis + 1, offset, budget, out);
            j += 1;
        }
    }
    let mut out = Vec::new();
    rec(d2, 0, 0.0, budget, &mut out);
    out
}

/// Merge raw energies into distinct levels, multiplicities summed.
fn merge_levels(mut raw: Vec<f64>, unit: &BigInt) -> Vec<(f64, BigInt)> {
    raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut levels: Vec<(f64, BigInt)> = Vec::new();
    for e in raw {
        match levels.last_mut() {
            Some((e0, mult)) if (e - *e0).abs() <= MERGE_TOL * (1.0 + e.abs()) => {
                *mult += unit;
            }
            _ => levels.push((e, unit.clone())),
        }
    }
    levels
}

/// All Landau levels of `sig` at level `k` up to `cutoff`.
pub fn landau_spectrum(sig: &SpectralSignature, k: u32, cutoff: f64) -> Result<LandauSpectrum> {
    if k == 0 {
        return Err(Error::Precondition("quantization level k must be positive".into()));
    }
    let v = sig.volume_int()?;
    let kf = k as f64;
    let sum_d2 = sig.sum_d_squared();
    let ground = PI / kf * sum_d2;
    if ground > cutoff * (1.0 + 1e-12) {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    // ν(𝐣)/k ≤ cutoff  ⟺  Σ d²(2j+1) ≤ k·cutoff/π
    let budget = kf * cutoff / PI - sum_d2;
    let unit = BigInt::from(k).pow(sig.m() as u32) * &v;
    let raw: Vec<f64> = enumerate_offsets(sig.d_squared(), budget)
        .into_iter()
        .map(|offset| PI * (sum_d2 + offset) / kf)
        .collect();
    let levels = merge_levels(raw, &unit);
    LandauSpectrum::from_parts(k, cutoff, levels)
}

/// Result of comparing two spectra truncated to their common cutoff.
#[derive(Clone, Debug)]
pub struct SpectraComparison {
    pub equal: bool,
    /// Human-readable description of the first mismatch, when unequal.
    pub mismatch: Option<String>,
}

/// Multiset equality of two spectra at the same level k: energies within
/// `tol` (relative), multiplicities exactly, truncated to min(cutoffs).
pub fn spectra_equal(
    s1: &LandauSpectrum,
    s2: &LandauSpectrum,
    tol: f64,
) -> Result<SpectraComparison> {
    if s1.k() != s2.k() {
        return Err(Error::Precondition(format!(
            "spectra at different quantization levels: {} vs {}",
            s1.k(),
            s2.k()
        )));
    }
    let cut = s1.cutoff().min(s2.cutoff()) * (1.0 + 1e-12);
    let l1: Vec<_> = s1.levels().iter().filter(|(e, _)| *e <= cut).collect();
    let l2: Vec<_> = s2.levels().iter().filter(|(e, _)| *e <= cut).collect();
    if l1.len() != l2.len() {
        return Ok(SpectraComparison {
            equal: false,
            mismatch: Some(format!("level counts differ: {} vs {}", l1.len(), l2.len())),
        });
    }
    for (i, ((e1, m1), (e2, m2))) in l1.iter().zip(&l2).enumerate() {
        if (e1 - e2).abs() > tol * (1.0 + e1.abs().max(e2.abs())) {
            return Ok(SpectraComparison {
                equal: false,
                mismatch: Some(format!("energy mismatch at level {i}: {e1} vs {e2}")),
            });
        }
        if m1 != m2 {
            return Ok(SpectraComparison {
                equal: false,
                mismatch: Some(format!("multiplicity mismatch at level {i}: {m1} vs {m2}")),
            });
        }
    }
    Ok(SpectraComparison { equal: true, mismatch: None })
}

/// Which clause of the equivalence test failed, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceClause {
    SignatureMismatch,
    VolumeMismatch,
}

/// Verdict and evidence for quantum equivalence of two systems.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub signature1: SpectralSignature,
    pub signature2: SpectralSignature,
    pub volume1: BigInt,
    pub volume2: BigInt,
    pub failed: Option<EquivalenceClause>,
}

/// Decide spectral equality at every quantization level: true iff the d²
/// multisets agree within `tol` and the symplectic volumes agree exactly.
///
/// A true verdict asserts Landau-spectrum equality for every k ≥ 1; the full
/// multisets are always compared (volume plus metric determinant would
/// suffice only in the Kähler-constrained setting).
pub fn quantum_equivalent(
    sys1: &TorusMagneticSystem,
    sys2: &TorusMagneticSystem,
    tol: f64,
) -> Result<EquivalenceReport> {
    if sys1.dim() != sys2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "systems of dimension {} and {}",
            sys1.dim(),
            sys2.dim()
        )));
    }
    let signature1 = spectral_signature(sys1, tol)?;
    let signature2 = spectral_signature(sys2, tol)?;
    let volume1 = symplectic_volume(sys1.magnetic())?;
    let volume2 = symplectic_volume(sys2.magnetic())?;
    let volumes_equal = volume1 == volume2;
    let signatures_equal = signature1.d_squared_close(&signature2, tol);
    let failed = if !volumes_equal {
        Some(EquivalenceClause::VolumeMismatch)
    } else if !signatures_equal {
        Some(EquivalenceClause::SignatureMismatch)
    } else {
        None
    };
    Ok(EquivalenceReport {
        equivalent: failed.is_none(),
        signature1,
        signature2,
        volume1,
        volume2,
        failed,
    })
}

/// Kähler test: true iff every d_j² lies in [1 − tol, 1 + tol].
///
/// Marginal passes (worst deviation above tol/4) are confirmed by the exact
/// rational identity F² + Id = 0, which characterizes compatibility with a
/// complex structure (the structure being F itself).
pub fn is_kahler(sys: &TorusMagneticSystem, tol: f64) -> Result<bool> {
    let sig = spectral_signature(sys, tol)?;
    let worst = sig
        .d_squared()
        .iter()
        .map(|d| (d - 1.0).abs())
        .fold(0.0f64, f64::max);
    if worst > tol {
        return Ok(false);
    }
    if worst > 0.25 * tol {
        let f = f_matrix(sys)?;
        let f2 = f.mul(&f);
        let minus_id = crate::linalg::RatMat::identity(sys.dim()).neg();
        return Ok(f2 == minus_id);
    }
    Ok(true)
}

/// Signature recovered from a spectrum, with bookkeeping.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub signature: SpectralSignature,
    /// Number of distinct input levels inspected before termination.
    pub levels_consumed: usize,
    /// Whether regenerating the spectrum from the recovered signature
    /// reproduces the input up to its cutoff.
    pub consistent: bool,
}

/// Recover the spectral signature from a Landau spectrum.
///
/// Inductive peeling: the ground energy μ₁ fixes Σd² = kμ₁/π; the next
/// unexplained level always sits at μ₁ + (2π/k)·d² for the smallest d² not
/// yet fully accounted for, and its leftover multiplicity divided by the
/// ground multiplicity counts the repeats of that d². Once the recovered sum
/// reaches Σd², m is known and V = mult(μ₁)/k^m.
pub fn reconstruct_signature(spec: &LandauSpectrum) -> Result<ReconstructionResult> {
    let k = spec.k();
    let kf = k as f64;
    let levels = spec.levels();
    let (mu1, base) = (levels[0].0, levels[0].1.clone());
    let total = kf * mu1 / PI; // Σ d_i²
    let sum_tol = 1e-7 * (1.0 + total);

    let mut found: Vec<f64> = Vec::new(); // d² values, one entry per repeat
    let mut consumed = 1usize;

    while total - found.iter().sum::<f64>() > sum_tol {
        // levels explained by the d² found so far: μ₁ + (2π/k)·Σ d²_i j_i
        let budget = kf * spec.cutoff() / PI - total;
        let offsets = enumerate_offsets(&found, budget.max(0.0));
        let explained = merge_levels(
            offsets.into_iter().map(|o| mu1 + PI * o / kf).collect(),
            &base,
        );

        // walk the input; the first level whose multiplicity exceeds its
        // explained part yields the next distinct d²
        let mut next: Option<(usize, f64, BigInt)> = None;
        for (idx, (e, mult)) in levels.iter().enumerate() {
            let explained_mult = explained
                .iter()
                .find(|(ee, _)| (ee - e).abs() <= 10.0 * MERGE_TOL * (1.0 + e.abs()))
                .map(|(_, m)| m.clone())
                .unwrap_or_else(BigInt::zero);
            if *mult < explained_mult {
                return Err(Error::InconsistentSpectrum(format!(
                    "level {e} has multiplicity {mult}, below the {explained_mult} \
                     required by the already-recovered d² values"
                )));
            }
            let leftover = mult - &explained_mult;
            if !leftover.is_zero() {
                next = Some((idx, *e, leftover));
                break;
            }
        }
        let (idx, mu_next, leftover) = next.ok_or_else(|| {
            Error::InsufficientCutoff(format!(
                "all {} levels explained but Σd² = {total} not yet reached (sum so far {})",
                levels.len(),
                found.iter().sum::<f64>()
            ))
        })?;
        consumed = consumed.max(idx + 1);

        let d2 = kf * (mu_next - mu1) / (2.0 * PI);
        if d2 <= 0.0 {
            return Err(Error::InconsistentSpectrum(
                "unexplained level at or below the ground energy".into(),
            ));
        }
        let (count, rem) = leftover.div_rem(&base);
        if !rem.is_zero() || !count.is_positive() {
            return Err(Error::InconsistentSpectrum(format!(
                "leftover multiplicity {leftover} at energy {mu_next} is not a positive \
                 multiple of the ground multiplicity {base}"
            )));
        }
        let count = count.to_usize().ok_or_else(|| {
            Error::InconsistentSpectrum("repeat count out of range".into())
        })?;
        if found.iter().sum::<f64>() + d2 * count as f64 > total + sum_tol {
            return Err(Error::InconsistentSpectrum(format!(
                "recovered d² values overshoot Σd² = {total}"
            )));
        }
        found.extend(std::iter::repeat(d2).take(count));
    }

    let m = found.len();
    let km = BigInt::from(k).pow(m as u32);
    let (v, rem) = base.div_rem(&km);
    if !rem.is_zero() || !v.is_positive() {
        return Err(Error::InconsistentSpectrum(format!(
            "ground multiplicity {base} is not a positive multiple of k^m = {km}"
        )));
    }
    let signature = SpectralSignature::new(
        found,
        v.to_f64().ok_or_else(|| Error::InconsistentSpectrum("volume out of range".into()))?,
        m,
    )?;

    let consistent = match landau_spectrum(&signature, k, spec.cutoff()) {
        Ok(regen) => spectra_equal(spec, &regen, 1e-6)?.equal,
        Err(_) => false,
    };

    Ok(ReconstructionResult { signature, levels_consumed: consumed, consistent })
}

/// Per-level outcome of the empirical all-k comparison.
#[derive(Clone, Debug)]
pub struct AllKReport {
    pub per_k: Vec<bool>,
    pub all_equal: bool,
    /// Verdict of the invariant-based test, for cross-checking.
    pub invariant_verdict: bool,
    /// Whether the empirical levels all agree with the invariant verdict.
    pub consistent: bool,
}

/// Compare the truncated spectra of two systems at k = 1..=k_max and check
/// the outcome against the invariant-based equivalence verdict.
pub fn all_k_consistency(
    sys1: &TorusMagneticSystem,
    sys2: &TorusMagneticSystem,
    k_max: u32,
    cutoff: f64,
    tol: f64,
) -> Result<AllKReport> {
    ensure_valid(sys1)?;
    ensure_valid(sys2)?;
    let verdict = quantum_equivalent(sys1, sys2, tol)?;
    let sig1 = &verdict.signature1;
    let sig2 = &verdict.signature2;
    let mut per_k = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let s1 = landau_spectrum(sig1, k, cutoff)?;
        let s2 = landau_spectrum(sig2, k, cutoff)?;
        per_k.push(spectra_equal(&s1, &s2, tol)?.equal);
    }
    let all_equal = per_k.iter().all(|&b| b);
    Ok(AllKReport {
        all_equal,
        consistent: per_k.iter().all(|&b| b == verdict.equivalent),
        invariant_verdict: verdict.equivalent,
        per_k,
    })
}
