//! Command-line front end: parse system files, run the library operations,
//! and emit JSON (or CSV, for trajectories) reports.
//!
//! Exit codes: 0 for success or a positive verdict, 1 for a negative
//! mathematical verdict (not equivalent, not Kähler, obstruction found,
//! failed validation), 2 for input or precondition errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use magtor::classical::{
    build_phi, deformation_family, length_spectrum, CotangentState, MagneticFlow, TwistedForm,
};
use magtor::io::{
    f64_matrix_from_json, format_rational, rational_matrix_from_json, spectrum_from_json,
    state_from_json, system_from_json, SpectrumDoc, SystemDoc,
};
use magtor::linalg::RatMat;
use magtor::model::{
    spectral_signature, spectral_signature_f64, symplectic_volume, validate_system,
    SpectralSignature, TorusMagneticSystem,
};
use magtor::normal_form::{
    chern_invariant_factors, phase_space_obstruction, verify_normal_form, ChernFactors,
    ObstructionVerdict,
};
use magtor::spectra::{
    all_k_consistency, is_kahler, landau_spectrum, quantum_equivalent, reconstruct_signature,
};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "magtor",
    version,
    about = "Magnetic systems on flat even tori: signatures, Landau spectra, \
             normal forms, symplectomorphisms, flows"
)]
struct Cli {
    /// Relative tolerance for floating comparisons (default: MAGTOR_TOL
    /// environment variable, then 1e-9)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Optional JSON file with per-check tolerance overrides
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every system invariant with exact arithmetic
    Validate { system: PathBuf },
    /// Spectral signature {d_j²} and symplectic volume
    Signature { system: PathBuf },
    /// Chern invariant factors and the unimodular witness
    NormalForm { system: PathBuf },
    /// Landau spectrum at level k up to an energy cutoff
    Spectrum {
        system: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        cutoff: f64,
    },
    /// Decide quantum equivalence of two systems
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Additionally compare truncated spectra at k = 1..=k_max
        #[arg(long)]
        k_max: Option<u32>,
        /// Energy cutoff for the per-k comparison (default 25π)
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Kähler detection
    Kahler { system: PathBuf },
    /// Recover the spectral signature from a spectrum document
    Reconstruct { spectrum: PathBuf },
    /// Compare Chern invariant factors of two magnetic forms
    Obstruction { a: PathBuf, b: PathBuf },
    /// Build and verify the phase-space symplectomorphism for a transform
    Phi { system: PathBuf, transform: PathBuf },
    /// Isospectral metric deformation family h_t = ᵗA_t 𝐡 A_t
    Deform {
        system: PathBuf,
        /// Symmetric seed matrix (JSON); omitted: drawn from --seed
        generator: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Magnetic flow trajectory as CSV rows (t, q, p, H)
    Flow {
        system: PathBuf,
        state: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Truncated length spectrum of the metric
    Lengths {
        system: PathBuf,
        #[arg(long)]
        bound: f64,
        #[arg(long, default_value_t = 1000)]
        max_count: usize,
    },
    /// Reproduce the built-in demonstration pairs end to end
    Demo,
}

/// Per-check tolerance overrides; anything unset falls back to the base
/// tolerance resolved from --tol / MAGTOR_TOL / 1e-9.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceConfig {
    default: Option<f64>,
    signature: Option<f64>,
    spectra: Option<f64>,
    kahler: Option<f64>,
}

struct Tolerances {
    signature: f64,
    spectra: f64,
    kahler: f64,
}

fn resolve_tolerances(
    cli_tol: Option<f64>,
    config: &ToleranceConfig,
) -> Result<Tolerances, String> {
    let env_tol = match std::env::var("MAGTOR_TOL") {
        Ok(s) => Some(s.parse::<f64>().map_err(|e| format!("MAGTOR_TOL: {e}"))?),
        Err(_) => None,
    };
    let base = cli_tol.or(config.default).or(env_tol).unwrap_or(magtor::DEFAULT_TOL);
    if !(base > 0.0) {
        return Err(format!("tolerance must be positive, got {base}"));
    }
    Ok(Tolerances {
        signature: config.signature.unwrap_or(base),
        spectra: config.spectra.unwrap_or(base),
        kahler: config.kahler.unwrap_or(base),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("{}", serde_json::to_string_pretty(&json!({ "error": msg })).unwrap());
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parse a system document and run exact validation; every command except
/// `validate` requires a valid system.
fn load_system(path: &Path) -> Result<TorusMagneticSystem, String> {
    let sys = system_from_json(&read_file(path)?).map_err(|e| e.to_string())?;
    let report = validate_system(&sys);
    if let Some(err) = report.first_failure() {
        return Err(format!("{}: {err}", path.display()));
    }
    Ok(sys)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn signature_value(sig: &SpectralSignature) -> Value {
    json!({
        "m": sig.m(),
        "d_squared": sig.d_squared(),
        "volume": sig.sympl_volume(),
    })
}

fn factors_value(factors: &ChernFactors) -> Value {
    use num_traits::ToPrimitive;
    Value::Array(
        factors
            .as_slice()
            .iter()
            .map(|r| match r.to_i64() {
                Some(v) => Value::from(v),
                None => Value::from(r.to_string()),
            })
            .collect(),
    )
}

fn run(cli: Cli) -> Result<u8, String> {
    let config: ToleranceConfig = match &cli.config {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => ToleranceConfig::default(),
    };
    let tols = resolve_tolerances(cli.tol, &config)?;

    match &cli.command {
        Command::Validate { system } => {
            let sys = system_from_json(&read_file(system)?).map_err(|e| e.to_string())?;
            let report = validate_system(&sys);
            let doc = json!({
                "passed": report.passed(),
                "checks": report.checks.iter().map(|c| json!({
                    "name": c.name,
                    "passed": c.passed,
                    "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_NEGATIVE })
        }

        Command::Signature { system } => {
            let sys = load_system(system)?;
            let sig = spectral_signature(&sys, tols.signature).map_err(|e| e.to_string())?;
            let volume = symplectic_volume(sys.magnetic()).map_err(|e| e.to_string())?;
            let mut doc = signature_value(&sig);
            doc["volume_exact"] = Value::from(volume.to_string());
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::NormalForm { system } => {
            let sys = load_system(system)?;
            let (factors, transform) =
                chern_invariant_factors(sys.magnetic()).map_err(|e| e.to_string())?;
            let verified = verify_normal_form(sys.magnetic(), &factors, &transform);
            let a = transform.matrix();
            let rows: Vec<Vec<String>> = (0..a.rows())
                .map(|i| (0..a.cols()).map(|j| a[(i, j)].to_string()).collect())
                .collect();
            let doc = json!({
                "factors": factors_value(&factors),
                "det": transform.det(),
                "transform": rows,
                "verified": verified,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::Spectrum { system, k, cutoff } => {
            let sys = load_system(system)?;
            let sig = spectral_signature(&sys, tols.signature).map_err(|e| e.to_string())?;
            let spec = landau_spectrum(&sig, *k, *cutoff).map_err(|e| e.to_string())?;
            let doc = SpectrumDoc::from_spectrum(&spec);
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::Equiv { a, b, k_max, cutoff } => {
            let sys_a = load_system(a)?;
            let sys_b = load_system(b)?;
            let rep =
                quantum_equivalent(&sys_a, &sys_b, tols.spectra).map_err(|e| e.to_string())?;
            let mut doc = json!({
                "equivalent": rep.equivalent,
                "signature_a": signature_value(&rep.signature1),
                "signature_b": signature_value(&rep.signature2),
                "volume_a": rep.volume1.to_string(),
                "volume_b": rep.volume2.to_string(),
                "failed_clause": rep.failed.as_ref().map(|c| format!("{c:?}")),
            });
            if let Some(k_max) = k_max {
                let cutoff = cutoff.unwrap_or(25.0 * std::f64::consts::PI);
                let all_k = all_k_consistency(&sys_a, &sys_b, *k_max, cutoff, tols.spectra)
                    .map_err(|e| e.to_string())?;
                doc["spectra_equal_per_k"] = json!(all_k.per_k);
                doc["spectra_match_verdict"] = json!(all_k.consistent);
            }
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if rep.equivalent { EXIT_OK } else { EXIT_NEGATIVE })
        }

        Command::Kahler { system } => {
            let sys = load_system(system)?;
            let verdict = is_kahler(&sys, tols.kahler).map_err(|e| e.to_string())?;
            let sig = spectral_signature(&sys, tols.signature).map_err(|e| e.to_string())?;
            let doc = json!({ "kahler": verdict, "d_squared": sig.d_squared() });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if verdict { EXIT_OK } else { EXIT_NEGATIVE })
        }

        Command::Reconstruct { spectrum } => {
            let spec = spectrum_from_json(&read_file(spectrum)?).map_err(|e| e.to_string())?;
            let rec = reconstruct_signature(&spec).map_err(|e| e.to_string())?;
            let mut doc = signature_value(&rec.signature);
            doc["levels_consumed"] = json!(rec.levels_consumed);
            doc["consistent"] = json!(rec.consistent);
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::Obstruction { a, b } => {
            let sys_a = load_system(a)?;
            let sys_b = load_system(b)?;
            let rep = phase_space_obstruction(sys_a.magnetic(), sys_b.magnetic())
                .map_err(|e| e.to_string())?;
            let doc = json!({
                "verdict": rep.verdict.to_string(),
                "factors_a": factors_value(&rep.factors1),
                "factors_b": factors_value(&rep.factors2),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(match rep.verdict {
                ObstructionVerdict::Inconclusive => EXIT_OK,
                ObstructionVerdict::NotSymplectomorphic => EXIT_NEGATIVE,
            })
        }

        Command::Phi { system, transform } => {
            let sys = load_system(system)?;
            let a =
                rational_matrix_from_json(&read_file(transform)?).map_err(|e| e.to_string())?;
            let phi = build_phi(&a, sys.magnetic()).map_err(|e| e.to_string())?;
            let form = TwistedForm::new(sys.magnetic());
            let report = magtor::classical::verify_phi(&phi, &form, sys.metric());
            let fmt = |m: &RatMat| -> Vec<Vec<String>> {
                (0..m.rows())
                    .map(|i| (0..m.cols()).map(|j| format_rational(&m[(i, j)])).collect())
                    .collect()
            };
            let doc = json!({
                "block_qq": fmt(phi.block_qq()),
                "block_qp": fmt(phi.block_qp()),
                "preserves_twisted_form": report.preserves_twisted_form,
                "preserves_hamiltonian": report.preserves_hamiltonian,
                "lattice_equivariant": report.lattice_equivariant,
                "failures": report.failures,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_NEGATIVE })
        }

        Command::Deform { system, generator, times, seed } => {
            let sys = load_system(system)?;
            let n = sys.dim();
            let s = match generator {
                Some(path) => {
                    f64_matrix_from_json(&read_file(path)?).map_err(|e| e.to_string())?
                }
                None => random_symmetric(n, *seed),
            };
            let metrics = deformation_family(sys.metric(), sys.magnetic(), &s, times)
                .map_err(|e| e.to_string())?;
            let volume = symplectic_volume(sys.magnetic()).map_err(|e| e.to_string())?;
            let mut entries = Vec::with_capacity(times.len());
            for (t, h_t) in times.iter().zip(&metrics) {
                let sig = spectral_signature_f64(
                    h_t,
                    sys.magnetic(),
                    volume.clone(),
                    tols.signature,
                    sys.m(),
                )
                .map_err(|e| e.to_string())?;
                let rows: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| h_t[(i, j)]).collect()).collect();
                entries.push(json!({
                    "t": t,
                    "metric": rows,
                    "signature": signature_value(&sig),
                }));
            }
            emit(&cli.out, &serde_json::to_string_pretty(&Value::Array(entries)).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::Flow { system, state, times } => {
            let sys = load_system(system)?;
            let state = state_from_json(&read_file(state)?).map_err(|e| e.to_string())?;
            let flow = MagneticFlow::new(&sys).map_err(|e| e.to_string())?;
            let n = sys.dim();
            let mut csv = String::new();
            csv.push('t');
            for i in 1..=n {
                csv.push_str(&format!(",q{i}"));
            }
            for i in 1..=n {
                csv.push_str(&format!(",p{i}"));
            }
            csv.push_str(",H\n");
            for &t in times {
                let out = flow.at(&state, t).map_err(|e| e.to_string())?;
                let energy = flow.energy(&out);
                csv.push_str(&format!("{t}"));
                for x in out.q.iter().chain(&out.p) {
                    csv.push_str(&format!(",{x}"));
                }
                csv.push_str(&format!(",{energy}\n"));
            }
            emit(&cli.out, &csv)?;
            Ok(EXIT_OK)
        }

        Command::Lengths { system, bound, max_count } => {
            let sys = load_system(system)?;
            let spec =
                length_spectrum(sys.metric(), *bound, *max_count).map_err(|e| e.to_string())?;
            let doc = json!({
                "bound": bound,
                "count": spec.len(),
                "truncated": spec.truncated(),
                "squared_lengths": spec.to_f64(),
                "squared_lengths_exact": spec
                    .squared_lengths()
                    .iter()
                    .map(format_rational)
                    .collect::<Vec<_>>(),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }

        Command::Demo => {
            let doc = demo_report(&tols)?;
            emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(EXIT_OK)
        }
    }
}

/// Deterministic symmetric seed matrix for `deform --seed`.
fn random_symmetric(n: usize, seed: u64) -> nalgebra::DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..=1.0);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

fn pair_report(
    sys_a: &TorusMagneticSystem,
    sys_b: &TorusMagneticSystem,
    tols: &Tolerances,
) -> Result<Value, String> {
    let equiv = quantum_equivalent(sys_a, sys_b, tols.spectra).map_err(|e| e.to_string())?;
    let kahler_a = is_kahler(sys_a, tols.kahler).map_err(|e| e.to_string())?;
    let kahler_b = is_kahler(sys_b, tols.kahler).map_err(|e| e.to_string())?;
    let obstruction =
        phase_space_obstruction(sys_a.magnetic(), sys_b.magnetic()).map_err(|e| e.to_string())?;
    let all_k = all_k_consistency(sys_a, sys_b, 4, 25.0 * std::f64::consts::PI, tols.spectra)
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "system_a": serde_json::to_value(SystemDoc::from_system(sys_a)).unwrap(),
        "system_b": serde_json::to_value(SystemDoc::from_system(sys_b)).unwrap(),
        "signature_a": signature_value(&equiv.signature1),
        "signature_b": signature_value(&equiv.signature2),
        "quantum_equivalent": equiv.equivalent,
        "kahler_a": kahler_a,
        "kahler_b": kahler_b,
        "chern_factors_a": factors_value(&obstruction.factors1),
        "chern_factors_b": factors_value(&obstruction.factors2),
        "phase_space_obstruction": obstruction.verdict.to_string(),
        "spectra_equal_k1_to_k4": all_k.per_k,
    }))
}

/// End-to-end reproduction of the two built-in demonstration pairs.
fn demo_report(tols: &Tolerances) -> Result<Value, String> {
    let (a1, b1) = magtor::demo::non_kahler_pair();
    let (a2, b2) = magtor::demo::kahler_pair();
    let pair1 = pair_report(&a1, &b1, tols)?;
    let mut pair2 = pair_report(&a2, &b2, tols)?;

    // the Kähler pair's metrics are isometric: length spectra must agree
    let lengths_a = length_spectrum(a2.metric(), 10.0, 4000).map_err(|e| e.to_string())?;
    let lengths_b = length_spectrum(b2.metric(), 10.0, 4000).map_err(|e| e.to_string())?;
    pair2["length_spectra_agree_at_bound_10"] = json!(lengths_a.multiset_eq(&lengths_b));

    // flow sanity on the first system: energy conservation along a sample
    let flow = MagneticFlow::new(&a1).map_err(|e| e.to_string())?;
    let state = CotangentState::new(vec![0.0, 0.0, 0.0, 0.0], vec![1.0, 0.5, -0.25, 2.0])
        .map_err(|e| e.to_string())?;
    let e0 = flow.energy(&state);
    let drift = [0.5, 2.0, 8.0]
        .iter()
        .map(|&t| (flow.energy(&flow.at(&state, t).unwrap()) - e0).abs())
        .fold(0.0f64, f64::max);

    // exact classical-equivalence witness for a sampled transform
    let (factors, transform) =
        chern_invariant_factors(a1.magnetic()).map_err(|e| e.to_string())?;
    let sampled = magtor::classical::sample_symplectic_integer(&factors, 1, 6);
    let t_rat = transform.matrix().to_rat();
    let witness = t_rat
        .mul(&sampled.to_rat())
        .mul(&t_rat.inverse().expect("unimodular transform is invertible"));
    let phi = build_phi(&witness, a1.magnetic()).map_err(|e| e.to_string())?;
    let phi_report =
        magtor::classical::verify_phi(&phi, &TwistedForm::new(a1.magnetic()), a1.metric());

    Ok(json!({
        "tolerance": tols.spectra,
        "magnetic_pair_shared_metric": pair1,
        "kahler_pair_distinct_metrics": pair2,
        "flow_energy_drift": drift,
        "sampled_phi_preserves_twisted_form": phi_report.preserves_twisted_form,
    }))
}
