#![allow(dead_code)]

//! Shared test support: independent oracles and random input generators.
//!
//! The Smith-normal-form oracle here deliberately uses plain row/column
//! operations on `Vec<Vec<BigInt>>` — not the congruence machinery under
//! test — so factor comparisons cross-check two genuinely different
//! algorithms.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use magtor::linalg::{IntMat, RatMat};
use magtor::model::{MetricGram, SymplecticGram, TorusMagneticSystem};

/// Diagonal of the Smith normal form (absolute values, divisibility chain),
/// by classical two-sided reduction with unimodular row/column operations.
pub fn smith_normal_form(mat: &IntMat) -> Vec<BigInt> {
    let n_rows = mat.rows();
    let n_cols = mat.cols();
    let mut m: Vec<Vec<BigInt>> = (0..n_rows)
        .map(|i| (0..n_cols).map(|j| mat[(i, j)].clone()).collect())
        .collect();

    let steps = n_rows.min(n_cols);
    let mut t = 0;
    'outer: while t < steps {
        // smallest nonzero entry of the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..n_rows {
            for j in t..n_cols {
                if m[i][j].is_zero() {
                    continue;
                }
                match pivot {
                    Some((pi, pj)) if m[pi][pj].abs() <= m[i][j].abs() => {}
                    _ => pivot = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -std::mem::take(x);
            }
        }

        // clear the pivot column
        for i in t + 1..n_rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = m[i][t].div_floor(&m[t][t]);
            for j in t..n_cols {
                let d = &q * &m[t][j];
                m[i][j] -= d;
            }
            if !m[i][t].is_zero() {
                continue 'outer; // smaller remainder became the new minimum
            }
        }
        // clear the pivot row
        for j in t + 1..n_cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = m[t][j].div_floor(&m[t][t]);
            for i in t..n_rows {
                let d = &q * &m[i][t];
                m[i][j] -= d;
            }
            if !m[t][j].is_zero() {
                continue 'outer;
            }
        }
        // pivot must divide the trailing block
        for i in t + 1..n_rows {
            for j in t + 1..n_cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    for col in t..n_cols {
                        let add = m[i][col].clone();
                        m[t][col] += add;
                    }
                    continue 'outer;
                }
            }
        }
        t += 1;
    }

    (0..steps).map(|i| m[i][i].abs()).collect()
}

/// Uniform random integer skew-symmetric nondegenerate Gram matrix with
/// entries in [−max_entry, max_entry], resampled until nondegenerate.
pub fn random_skew_nondegenerate(rng: &mut ChaCha8Rng, m: usize, max_entry: i64) -> SymplecticGram {
    loop {
        let n = 2 * m;
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-max_entry..=max_entry);
                rows[i][j] = v;
                rows[j][i] = -v;
            }
        }
        let w = SymplecticGram::from_rows(&rows).expect("even square");
        if w.is_nondegenerate() {
            return w;
        }
    }
}

/// Exact rational SPD metric ᵗB·B + Id with random integer B.
pub fn random_spd_metric(rng: &mut ChaCha8Rng, n: usize) -> MetricGram {
    let rows: Vec<Vec<i64>> =
        (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let b = RatMat::from_i64_rows(&rows).expect("square");
    let spd = b.transpose().mul(&b).add(&RatMat::identity(n));
    MetricGram::new(spd).expect("even square")
}

/// Random valid torus magnetic system.
pub fn random_system(rng: &mut ChaCha8Rng, m: usize) -> TorusMagneticSystem {
    let metric = random_spd_metric(rng, 2 * m);
    let magnetic = random_skew_nondegenerate(rng, m, 6);
    TorusMagneticSystem::new(metric, magnetic).expect("matching dimensions")
}

/// Random unimodular (det +1) integer matrix as a product of transvections.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, ops: usize) -> IntMat {
    let mut b = IntMat::identity(n);
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let c = BigInt::from(rng.gen_range(-3..=3i64));
        b.col_add(i, j, &c);
    }
    b
}

/// Fourth-order Runge-Kutta integration of q̇ = 𝐡⁻¹p, ṗ = −𝛚𝐡⁻¹p.
pub fn rk4_flow(
    h_inv: &DMatrix<f64>,
    w: &DMatrix<f64>,
    q0: &[f64],
    p0: &[f64],
    t: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut q = nalgebra::DVector::from_column_slice(q0);
    let mut p = nalgebra::DVector::from_column_slice(p0);
    let dt = t / steps as f64;
    let deriv = |p: &nalgebra::DVector<f64>| {
        let qdot = h_inv * p;
        let pdot = -(w * h_inv * p);
        (qdot, pdot)
    };
    for _ in 0..steps {
        let (k1q, k1p) = deriv(&p);
        let (k2q, k2p) = deriv(&(&p + &k1p * (dt / 2.0)));
        let (k3q, k3p) = deriv(&(&p + &k2p * (dt / 2.0)));
        let (k4q, k4p) = deriv(&(&p + &k3p * dt));
        q += (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (dt / 6.0);
        p += (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (dt / 6.0);
    }
    (q.iter().copied().collect(), p.iter().copied().collect())
}

/// Relative multiset comparison of sorted float slices.
pub fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}
