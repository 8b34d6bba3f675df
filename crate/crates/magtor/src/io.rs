//! JSON input/output schemas.
//!
//! System documents: `{ "m": int, "metric": [[rational]], "magnetic": [[int]] }`
//! with matrices row-major of size 2m×2m and rationals written either as
//! JSON integers or as strings `"p/q"` in lowest terms.
//!
//! Spectrum documents: `{ "k": int, "cutoff": real, "levels": [[energy,
//! multiplicity-as-string]] }`; multiplicities travel as decimal strings
//! because they outgrow 64-bit integers for large k·V.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{IntMat, RatMat};
use crate::model::{MetricGram, SymplecticGram, TorusMagneticSystem};
use crate::spectra::LandauSpectrum;
use crate::{Error, Result};

/// A rational matrix entry: integer or "p/q" string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalEntry {
    Int(i64),
    Str(String),
}

impl RationalEntry {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            RationalEntry::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            RationalEntry::Str(s) => parse_rational(s),
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_integer() {
            if let Some(i) = r.numer().to_i64() {
                return RationalEntry::Int(i);
            }
        }
        RationalEntry::Str(format_rational(r))
    }
}

/// Parse "p/q" (normalized to lowest terms, positive denominator) or a bare
/// integer string.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad denominator {den:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt =
            s.parse().map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Lowest-terms "p/q" (or plain "p" for integers), denominator positive.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// On-disk form of a torus magnetic system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemDoc {
    pub m: usize,
    pub metric: Vec<Vec<RationalEntry>>,
    pub magnetic: Vec<Vec<i64>>,
}

impl SystemDoc {
    pub fn to_system(&self) -> Result<TorusMagneticSystem> {
        let n = 2 * self.m;
        if self.m == 0 {
            return Err(Error::Parse("field \"m\" must be positive".into()));
        }
        if self.metric.len() != n || self.metric.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("field \"metric\" must be a {n}x{n} matrix")));
        }
        if self.magnetic.len() != n || self.magnetic.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("field \"magnetic\" must be a {n}x{n} matrix")));
        }
        let mut metric_rows = Vec::with_capacity(n);
        for row in &self.metric {
            let converted: Result<Vec<BigRational>> =
                row.iter().map(RationalEntry::to_rational).collect();
            metric_rows.push(converted?);
        }
        let metric = MetricGram::new(RatMat::from_rows(metric_rows)?)?;
        let magnetic = SymplecticGram::new(IntMat::from_rows(&self.magnetic)?)?;
        TorusMagneticSystem::new(metric, magnetic)
    }

    pub fn from_system(sys: &TorusMagneticSystem) -> Self {
        let n = sys.dim();
        let metric = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| RationalEntry::from_rational(&sys.metric().matrix()[(i, j)]))
                    .collect()
            })
            .collect();
        let magnetic = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        sys.magnetic().matrix()[(i, j)]
                            .to_i64()
                            .expect("magnetic entry exceeds i64 in serialization")
                    })
                    .collect()
            })
            .collect();
        SystemDoc { m: sys.m(), metric, magnetic }
    }
}

pub fn system_from_json(text: &str) -> Result<TorusMagneticSystem> {
    let doc: SystemDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("system document: {e}")))?;
    doc.to_system()
}

pub fn system_to_json(sys: &TorusMagneticSystem) -> String {
    serde_json::to_string_pretty(&SystemDoc::from_system(sys)).expect("serializable document")
}

/// On-disk form of a Landau spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub k: u32,
    pub cutoff: f64,
    pub levels: Vec<(f64, String)>,
}

impl SpectrumDoc {
    pub fn to_spectrum(&self) -> Result<LandauSpectrum> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for (e, m) in &self.levels {
            let mult: BigInt = m
                .trim()
                .parse()
                .map_err(|err| Error::Parse(format!("bad multiplicity {m:?}: {err}")))?;
            levels.push((*e, mult));
        }
        LandauSpectrum::from_parts(self.k, self.cutoff, levels)
    }

    pub fn from_spectrum(spec: &LandauSpectrum) -> Self {
        SpectrumDoc {
            k: spec.k(),
            cutoff: spec.cutoff(),
            levels: spec.levels().iter().map(|(e, m)| (*e, m.to_string())).collect(),
        }
    }
}

pub fn spectrum_from_json(text: &str) -> Result<LandauSpectrum> {
    let doc: SpectrumDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spectrum document: {e}")))?;
    doc.to_spectrum()
}

pub fn spectrum_to_json(spec: &LandauSpectrum) -> String {
    serde_json::to_string_pretty(&SpectrumDoc::from_spectrum(spec)).expect("serializable document")
}

/// Parse a bare rational matrix (used for transforms and deformation seeds).
pub fn rational_matrix_from_json(text: &str) -> Result<RatMat> {
    let doc: Vec<Vec<RationalEntry>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix document: {e}")))?;
    let mut rows = Vec::with_capacity(doc.len());
    for row in &doc {
        let converted: Result<Vec<BigRational>> =
            row.iter().map(RationalEntry::to_rational).collect();
        rows.push(converted?);
    }
    RatMat::from_rows(rows)
}

/// Parse a bare binary64 matrix.
pub fn f64_matrix_from_json(text: &str) -> Result<nalgebra::DMatrix<f64>> {
    let doc: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix document: {e}")))?;
    let rows = doc.len();
    let cols = doc.first().map(Vec::len).unwrap_or(0);
    if doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(nalgebra::DMatrix::from_fn(rows, cols, |i, j| doc[i][j]))
}

/// On-disk form of a phase-space state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

pub fn state_from_json(text: &str) -> Result<crate::classical::CotangentState> {
    let doc: StateDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state document: {e}")))?;
    crate::classical::CotangentState::new(doc.q, doc.p)
}
