//! The `verify` subcommand: run the invariant battery on one system, then
//! on a seeded batch of random minimal observable samples.

use std::path::Path;

use zeromod::geometry;
use zeromod::inner::{annihilation_defect, isometry_defect, squaring};
use zeromod::matrix::{Matrix, Tolerance};
use zeromod::sample::{random_system, Rng, SystemSpec};
use zeromod::ss::{EvalGrid, StateSpace};
use zeromod::subspace::{intersect, join, max_principal_angle, subspace_eq};
use zeromod::zeros::zero_report;

use crate::output::g12;
use crate::CommonFlags;

struct Battery {
    failures: usize,
    json: bool,
    lines: Vec<serde_json::Value>,
}

impl Battery {
    fn new(json: bool) -> Self {
        Battery {
            failures: 0,
            json,
            lines: vec![],
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        if self.json {
            self.lines.push(serde_json::json!({
                "check": name, "pass": pass, "detail": detail,
            }));
        } else {
            println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        }
    }
}

fn verify_system(b: &mut Battery, label: &str, ss: &StateSpace, tol: &Tolerance) {
    match squaring(ss, tol) {
        Ok(fac) => {
            let c = &fac.checks;
            b.check(
                &format!("{label}: inner certificates"),
                c.inner_defect_right <= 1e-8
                    && c.inner_defect_left <= 1e-8
                    && c.unitary_defect_right <= 1e-8
                    && c.unitary_defect_left <= 1e-8,
                format!(
                    "K defect {}, [K,L] defect {}",
                    g12(c.inner_defect_right.max(c.inner_defect_left)),
                    g12(c.unitary_defect_right.max(c.unitary_defect_left))
                ),
            );
            b.check(
                &format!("{label}: annihilation F*K"),
                c.annihilation_right <= 1e-8 && c.annihilation_left <= 1e-8,
                format!("defect {}", g12(c.annihilation_right.max(c.annihilation_left))),
            );
            b.check(
                &format!("{label}: reconstruction"),
                c.reconstruction_fr <= 1e-7 && c.reconstruction_frl <= 1e-7,
                format!(
                    "F_r {}, F_rl {}",
                    g12(c.reconstruction_fr),
                    g12(c.reconstruction_frl)
                ),
            );
            // Subspace identities of the right reduction.
            let v = geometry::vstar(&fac.minimal, tol);
            let v_r = geometry::vstar(&fac.f_r, tol);
            let c_r = geometry::cstar(&fac.f_r, tol);
            let cs = geometry::cstar(&fac.minimal, tol);
            let rs = intersect(&v, &cs).expect("ambient");
            let id1 = subspace_eq(&v, &v_r);
            let id2 = intersect(&v_r, &c_r).map(|s| s.dim() == 0).unwrap_or(false);
            let id3 = join(&rs, &c_r)
                .map(|s| subspace_eq(&s, &cs))
                .unwrap_or(false);
            let angle = max_principal_angle(&v, &v_r).unwrap_or(f64::INFINITY);
            b.check(
                &format!("{label}: subspace identities"),
                id1 && id2 && id3,
                format!("V* angle {}, V*^C* trivial {}, R*vC*_r=C* {}", g12(angle), id2, id3),
            );
        }
        Err(e) => {
            b.check(&format!("{label}: factorization"), false, format!("{e}"));
        }
    }
    verify_counting(b, label, ss, tol);
}

fn verify_counting(b: &mut Battery, label: &str, ss: &StateSpace, tol: &Tolerance) {
    match zero_report(ss, tol, false) {
        Ok(rep) => {
            b.check(
                &format!("{label}: counting identity"),
                rep.identity_holds,
                format!(
                    "degree {} = {} + {} + {} + {}",
                    rep.mcmillan, rep.dim_z, rep.dim_zinf, rep.dim_wker, rep.dim_wim
                ),
            );
        }
        Err(e) => {
            b.check(&format!("{label}: zero report"), false, format!("{e}"));
        }
    }
}

fn load_factor(dir: &Path, name: &str) -> Result<StateSpace, String> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("bad JSON in {name}: {e}"))?;
    StateSpace::from_json(&v).map_err(|e| format!("bad system in {name}: {e}"))
}

/// Check the stored factor files against the system in the file.
fn verify_stored(b: &mut Battery, ss: &StateSpace, dir: &Path, tol: &Tolerance) {
    let loaded: Result<Vec<StateSpace>, String> =
        ["K.json", "L.json", "K_left.json", "L_left.json", "F_r.json", "F_rl.json"]
            .iter()
            .map(|name| load_factor(dir, name))
            .collect();
    let [k, l, k_left, l_left, f_r, f_rl]: [StateSpace; 6] = match loaded {
        Ok(v) => v.try_into().unwrap(),
        Err(e) => {
            b.check("factors: load", false, e);
            return;
        }
    };
    let lpc = l.para_conjugate();
    let llpc = l_left.para_conjugate();
    let all = [&k, &l, &k_left, &l_left, &f_r, &f_rl, &lpc, &llpc, ss];
    let grid = match EvalGrid::for_systems(&all) {
        Ok(g) => g,
        Err(e) => {
            b.check("factors: grid", false, e.to_string());
            return;
        }
    };
    let inner_k = isometry_defect(&k, &grid, tol).unwrap_or(f64::INFINITY);
    b.check(
        "factors: inner defect of K",
        inner_k <= 1e-8,
        format!("{}", g12(inner_k)),
    );
    let mut unitary = 0.0f64;
    for z in grid.imaginary_axis_points() {
        let (Ok(kv), Ok(lv)) = (k.eval(z, tol), l.eval(z, tol)) else {
            unitary = f64::INFINITY;
            break;
        };
        let kl = Matrix::hstack(&[&kv, &lv]);
        let d = (&(&kl.adjoint() * &kl) - &Matrix::identity(kl.cols())).norm_fro();
        unitary = unitary.max(d / kl.norm_fro().powi(2).max(1.0));
    }
    b.check("factors: [K, L] unitarity", unitary <= 1e-8, format!("{}", g12(unitary)));
    let ann = annihilation_defect(ss, &k, &grid, tol).unwrap_or(f64::INFINITY);
    b.check("factors: annihilation F*K", ann <= 1e-8, format!("{}", g12(ann)));
    let mut rec_fr = 0.0f64;
    let mut rec_frl = 0.0f64;
    for &z in grid.points() {
        let (Ok(fv), Ok(frv), Ok(frlv), Ok(lv), Ok(llv)) = (
            ss.eval(z, tol),
            f_r.eval(z, tol),
            f_rl.eval(z, tol),
            lpc.eval(z, tol),
            llpc.eval(z, tol),
        ) else {
            rec_fr = f64::INFINITY;
            break;
        };
        let scale = fv.norm_fro().max(1.0);
        rec_fr = rec_fr.max((&(&frv * &lv) - &fv).norm_fro() / scale);
        rec_frl = rec_frl.max((&(&(&llv * &frlv) * &lv) - &fv).norm_fro() / scale);
    }
    b.check(
        "factors: reconstruction",
        rec_fr <= 1e-7 && rec_frl <= 1e-7,
        format!("F_r {}, F_rl {}", g12(rec_fr), g12(rec_frl)),
    );
    // Subspace identity against the stored reduction.
    let v = geometry::vstar(ss, tol);
    let v_r = geometry::vstar(&f_r, tol);
    b.check(
        "factors: V*(F_r) = V*(F)",
        subspace_eq(&v, &v_r),
        format!(
            "dims {} vs {}",
            v.dim(),
            v_r.dim()
        ),
    );
}

pub fn cmd_verify(
    file: &std::path::Path,
    samples: usize,
    seed: u64,
    factors: Option<&Path>,
    flags: &CommonFlags,
) -> u8 {
    let tol = match crate::checked_tolerance(flags) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sf = match crate::load_or_exit(file) {
        Ok(sf) => sf,
        Err(code) => return code,
    };
    if !flags.force && !sf.ss.is_observable(&tol) {
        eprintln!("error: (C, A) not observable; rerun with --force to proceed");
        return 3;
    }
    let mut battery = Battery::new(flags.json);
    if let Some(dir) = factors {
        verify_stored(&mut battery, &sf.ss, dir, &tol);
        verify_counting(&mut battery, "file", &sf.ss, &tol);
    } else {
        verify_system(&mut battery, "file", &sf.ss, &tol);
    }

    let mut rng = Rng::new(seed);
    let spec = SystemSpec::default();
    for k in 0..samples {
        let ss = random_system(&mut rng, &spec, &tol);
        match zero_report(&ss, &tol, false) {
            Ok(rep) => battery.check(
                &format!("sample {k}: counting identity"),
                rep.identity_holds,
                format!(
                    "n={} p={} q={}: {} = {}+{}+{}+{}",
                    ss.order(),
                    ss.outputs(),
                    ss.inputs(),
                    rep.mcmillan,
                    rep.dim_z,
                    rep.dim_zinf,
                    rep.dim_wker,
                    rep.dim_wim
                ),
            ),
            Err(e) => battery.check(&format!("sample {k}: zero report"), false, format!("{e}")),
        }
    }

    if flags.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "checks": battery.lines,
                "failures": battery.failures,
            }))
            .unwrap()
        );
    } else if battery.failures == 0 {
        println!("all checks passed");
    } else {
        println!("{} check(s) FAILED", battery.failures);
    }
    u8::from(battery.failures > 0)
}
