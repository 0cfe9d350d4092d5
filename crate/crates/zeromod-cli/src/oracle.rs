//! The `oracle` subcommand: exact Smith-McMillan and minimal-basis data for
//! rational-entry systems, with a match table against the float pipeline.

use num_complex::Complex64;
use polyoracle::{
    degmin, minimal_kernel_basis, rat_to_f64, smith_mcmillan, ss_to_rational, RootLoc,
    SmithMcMillan,
};
use zeromod::matrix::{cr, Matrix};
use zeromod::schur::eigenvalues;
use zeromod::zeros::{spectrum_matching_distance, zero_report};

use crate::output::{fmt_complex, g12};
use crate::CommonFlags;

/// Numeric values of the exact zero locations: rational roots directly,
/// factor roots through companion-matrix eigenvalues.
pub fn root_values(locs: &[(RootLoc, usize)]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for (loc, mult) in locs {
        match loc {
            RootLoc::Rational(r) => {
                for _ in 0..*mult {
                    out.push(cr(rat_to_f64(r)));
                }
            }
            RootLoc::Factor(p) => {
                let coeffs = p.monic().coeffs_f64();
                let k = coeffs.len() - 1;
                let mut comp = Matrix::zeros(k, k);
                for i in 1..k {
                    comp[(i, i - 1)] = cr(1.0);
                }
                for i in 0..k {
                    comp[(i, k - 1)] = cr(-coeffs[i]);
                }
                if let Ok(evs) = eigenvalues(&comp) {
                    for _ in 0..*mult {
                        out.extend(evs.iter().copied());
                    }
                }
            }
        }
    }
    out
}

fn describe_roots(locs: &[(RootLoc, usize)]) -> String {
    if locs.is_empty() {
        return "none".to_string();
    }
    locs.iter()
        .map(|(loc, m)| match loc {
            RootLoc::Rational(r) => format!("{r} (x{m})"),
            RootLoc::Factor(p) => format!("roots of {p:?} (x{m})"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn describe_sm(sm: &SmithMcMillan) -> Vec<String> {
    let mut lines = Vec::new();
    lines.push(format!("normal rank: {}", sm.normal_rank));
    for (i, (e, p)) in sm.epsilons.iter().zip(&sm.psis).enumerate() {
        lines.push(format!("  eps_{i} / psi_{i} = ({e:?}) / ({p:?})"));
    }
    lines.push(format!("zeros: {}", describe_roots(&sm.zeros)));
    lines.push(format!("poles: {}", describe_roots(&sm.poles)));
    lines
}

pub fn cmd_oracle(file: &std::path::Path, flags: &CommonFlags) -> u8 {
    let tol = match crate::checked_tolerance(flags) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sf = match crate::load_or_exit(file) {
        Ok(sf) => sf,
        Err(code) => return code,
    };
    let Some(rational) = &sf.rational else {
        eprintln!("error: oracle needs rational entries (integers or \"p/q\" strings)");
        return 5;
    };
    if !flags.force && !sf.ss.is_observable(&tol) {
        eprintln!("error: (C, A) not observable; rerun with --force to proceed");
        return 3;
    }

    let (num, den) = ss_to_rational(rational);
    let sm = smith_mcmillan(&num, &den);
    let basis = minimal_kernel_basis(&num);
    let mut degrees: Vec<usize> = (0..basis.cols()).map(|j| basis.col_degree(j)).collect();
    degrees.sort_unstable();
    let kernel_degmin = degmin(&basis);
    let left_basis = minimal_kernel_basis(&num.transpose());
    let left_degmin = degmin(&left_basis);

    let report = match zero_report(&sf.ss, &tol, flags.force) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return crate::exit_for(&e);
        }
    };
    let exact_zeros = root_values(&sm.zeros);
    let zero_dist = spectrum_matching_distance(&exact_zeros, &report.finite_zeros);
    let mut float_indices = report.kernel_indices.clone();
    float_indices.sort_unstable();

    let rows = [
        (
            "finite zeros",
            zero_dist <= 1e-6,
            format!("multiset distance {}", g12(zero_dist)),
        ),
        (
            "dim Z",
            sm.zero_count() == report.dim_z,
            format!("exact {} vs float {}", sm.zero_count(), report.dim_z),
        ),
        (
            "dim W(ker)",
            kernel_degmin == report.dim_wker,
            format!("exact {} vs float {}", kernel_degmin, report.dim_wker),
        ),
        (
            "kernel indices",
            degrees == float_indices,
            format!("exact {degrees:?} vs float {float_indices:?}"),
        ),
        (
            "dim W(Im)",
            left_degmin == report.dim_wim,
            format!("exact {} vs float {}", left_degmin, report.dim_wim),
        ),
    ];
    let mismatches = rows.iter().filter(|(_, ok, _)| !ok).count();

    if flags.json {
        let doc = serde_json::json!({
            "normal_rank": sm.normal_rank,
            "zeros": exact_zeros.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "zero_count": sm.zero_count(),
            "pole_count": sm.pole_count(),
            "minimal_basis_degrees": degrees,
            "degmin_kernel": kernel_degmin,
            "degmin_left_kernel": left_degmin,
            "comparison": rows.iter().map(|(name, ok, detail)| serde_json::json!({
                "row": name, "match": ok, "detail": detail,
            })).collect::<Vec<_>>(),
            "mismatches": mismatches,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("exact Smith-McMillan form:");
        for line in describe_sm(&sm) {
            println!("  {line}");
        }
        if basis.cols() == 0 {
            println!("minimal basis: none (full column rank)");
        } else {
            println!(
                "minimal basis: {} column(s), degrees {:?}, degmin {}",
                basis.cols(),
                degrees,
                kernel_degmin
            );
        }
        println!("left kernel degmin: {left_degmin}");
        if !exact_zeros.is_empty() {
            let zs: Vec<String> = exact_zeros.iter().map(|&z| fmt_complex(z)).collect();
            println!("zero values: {}", zs.join(", "));
        }
        println!("comparison against the float pipeline:");
        for (name, ok, detail) in &rows {
            println!(
                "  [{}] {name}: {detail}",
                if *ok { "MATCH" } else { "MISMATCH" }
            );
        }
    }
    u8::from(mismatches > 0)
}
