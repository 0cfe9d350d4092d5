//! Command-line zero-structure analysis of state-space systems.
//!
//! Subcommands: `analyze` (zero modules and geometric profile),
//! `factorize` (inner factors and the squared function, written as JSON),
//! `verify` (invariant battery on one system plus seeded random samples),
//! `oracle` (exact rational cross-check).
//!
//! Exit codes: 0 success, 1 failed verification/mismatch, 2 parse error,
//! 3 hypothesis violation without --force, 4 Riccati failure,
//! 5 non-rational entries for `oracle`.

mod oracle;
mod output;
mod sysfile;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zeromod::error::Error;
use zeromod::geometry;
use zeromod::inner::squaring;
use zeromod::matrix::Tolerance;
use zeromod::zeros::zero_report;

use output::{complex_pair, fmt_complex, g12, yesno};

#[derive(Parser)]
#[command(name = "zeromod", version, about = "Zero-module structure and inner factorizations of proper transfer functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonFlags {
    /// Residual tolerance; the rank tolerance is tol/100.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Proceed when (C, A) is not observable (results flagged).
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zero report: finite zeros, module dimensions, kernel indices.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Inner factors K, L, K_left, L_left and the reductions F_r, F_rl.
    Factorize {
        file: PathBuf,
        /// Output directory for the factor JSON files.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Invariant checks on the system, plus seeded random sample systems.
    Verify {
        file: PathBuf,
        /// Number of random sample systems.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Seed for the sample generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check stored factor files (from `factorize --out`) against the
        /// system instead of recomputing them.
        #[arg(long)]
        factors: Option<PathBuf>,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Exact Smith-McMillan and minimal-basis cross-check (rational entries).
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn tolerance(flags: &CommonFlags) -> Tolerance {
    Tolerance::new(flags.tol * 1e-2, flags.tol)
}

fn checked_tolerance(flags: &CommonFlags) -> Result<Tolerance, u8> {
    if !(flags.tol > 0.0 && flags.tol.is_finite()) {
        eprintln!("error: --tol must be a positive finite number");
        return Err(2);
    }
    Ok(tolerance(flags))
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::NotObservable => 3,
        Error::RiccatiFailure(_)
        | Error::ImaginaryAxisEigenvalue(_)
        | Error::NoStabilizingSolution(_) => 4,
        Error::DimensionMismatch(_) | Error::NonFinite => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Analyze { file, flags } => cmd_analyze(&file, &flags),
        Cmd::Factorize { file, out, flags } => cmd_factorize(&file, &out, &flags),
        Cmd::Verify {
            file,
            samples,
            seed,
            factors,
            flags,
        } => verify::cmd_verify(&file, samples, seed, factors.as_deref(), &flags),
        Cmd::Oracle { file, flags } => oracle::cmd_oracle(&file, &flags),
    };
    ExitCode::from(code)
}

pub(crate) fn load_or_exit(path: &std::path::Path) -> Result<sysfile::SystemFile, u8> {
    sysfile::load(path).map_err(|e| {
        eprintln!("error: {}", e.message());
        2
    })
}

fn cmd_analyze(file: &std::path::Path, flags: &CommonFlags) -> u8 {
    let tol = match checked_tolerance(flags) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sf = match load_or_exit(file) {
        Ok(sf) => sf,
        Err(code) => return code,
    };
    let ss = &sf.ss;
    let observable = ss.is_observable(&tol);
    let report = match zero_report(ss, &tol, flags.force) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let profile = geometry::profile(ss, &tol);
    let minimal = ss.is_minimal(&tol);

    if flags.json {
        let mut doc = report.to_json();
        let obj = doc.as_object_mut().unwrap();
        obj.insert(
            "finite_zeros".into(),
            report.finite_zeros.iter().map(|&z| complex_pair(z)).collect(),
        );
        obj.insert("observable".into(), observable.into());
        obj.insert("minimal".into(), minimal.into());
        obj.insert(
            "subspace_dims".into(),
            serde_json::json!({
                "vstar": profile.vstar.dim(),
                "cstar": profile.cstar.dim(),
                "rstar": profile.rstar.dim(),
                "reach": profile.reach.dim(),
                "vstar_left": profile.vstar_left.dim(),
                "cstar_left": profile.cstar_left.dim(),
            }),
        );
        obj.insert(
            "system".into(),
            serde_json::json!({
                "states": ss.order(), "inputs": ss.inputs(), "outputs": ss.outputs(),
            }),
        );
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!(
            "system: {} states, {} inputs, {} outputs",
            ss.order(),
            ss.inputs(),
            ss.outputs()
        );
        println!("(C,A) observable: {}", yesno(observable));
        println!("realization minimal: {}", yesno(minimal));
        if report.finite_zeros.is_empty() {
            println!("finite zeros: none");
        } else {
            let zs: Vec<String> = report.finite_zeros.iter().map(|&z| fmt_complex(z)).collect();
            println!("finite zeros: {}", zs.join(", "));
        }
        println!(
            "dim Z = {}   dim Zinf = {}   dim W(ker) = {}   dim W(Im) = {}",
            report.dim_z, report.dim_zinf, report.dim_wker, report.dim_wim
        );
        println!("kernel indices: {:?}", report.kernel_indices);
        println!(
            "subspaces: dim V* = {}, dim C* = {}, dim R* = {}, dim <A|B> = {}",
            profile.vstar.dim(),
            profile.cstar.dim(),
            profile.rstar.dim(),
            profile.reach.dim()
        );
        println!("McMillan degree: {}", report.mcmillan);
        println!(
            "counting identity (degree = Z + Zinf + Wker + WIm): {}",
            if report.identity_holds { "OK" } else { "VIOLATED" }
        );
    }
    0
}

fn cmd_factorize(file: &std::path::Path, out: &std::path::Path, flags: &CommonFlags) -> u8 {
    let tol = match checked_tolerance(flags) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sf = match load_or_exit(file) {
        Ok(sf) => sf,
        Err(code) => return code,
    };
    if !flags.force && !sf.ss.is_observable(&tol) {
        eprintln!("error: (C, A) not observable; rerun with --force to proceed");
        return 3;
    }
    let fac = match squaring(&sf.ss, &tol) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return 2;
    }
    let files = [
        ("K.json", fac.k.to_json()),
        ("L.json", fac.l.to_json()),
        ("K_left.json", fac.k_left.to_json()),
        ("L_left.json", fac.l_left.to_json()),
        ("F_r.json", fac.f_r.to_json()),
        ("F_rl.json", fac.f_rl.to_json()),
        ("certificates.json", fac.certificates_json()),
    ];
    for (name, doc) in files {
        let path = out.join(name);
        if let Err(e) = std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if flags.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&fac.certificates_json()).unwrap()
        );
    } else {
        let h = &fac.hypothesis;
        println!(
            "wrote K, L, K_left, L_left, F_r, F_rl, certificates to {}",
            out.display()
        );
        println!("A spectrum in closed LHP: {}", yesno(h.a_spectrum_closed_lhp));
        println!(
            "degree preservation expected: {}",
            yesno(h.degree_preservation_expected)
        );
        println!(
            "McMillan degree: F = {}, F_rl = {} ({})",
            h.mcmillan_f,
            h.mcmillan_frl,
            if h.degree_preserved {
                "preserved"
            } else {
                "dropped"
            }
        );
        println!(
            "grid defects: inner = {}, unitary = {}, annihilation = {}, reconstruction = {}",
            g12(fac.checks.inner_defect_right.max(fac.checks.inner_defect_left)),
            g12(fac.checks.unitary_defect_right.max(fac.checks.unitary_defect_left)),
            g12(fac.checks.annihilation_right.max(fac.checks.annihilation_left)),
            g12(fac.checks.reconstruction_frl)
        );
    }
    0
}
