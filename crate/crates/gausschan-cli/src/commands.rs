//! The six subcommands: load files, call the library, render one report.

use std::path::Path;

use serde_json::json;

use gausschan::channel::{cp_check, cp_witness, p_map_norm};
use gausschan::gauge::{self, GaugeCase};
use gausschan::linalg::{self, min_eig_hermitian, spectral_norm, symplectic_form};
use gausschan::semigroup::{
    bounded_noise_check, embeddable_x, in_exp_sp, infdiv_necessary, invariant_state, simple_form,
    split_exp_sp, EmbeddabilityVerdict, SemigroupError,
};
use gausschan::{ComplexMatrix, LinalgError, RealMatrix, Tolerance};

use crate::format::{matrix_to_rows, ChannelFile, GeneratorFile};
use crate::report::Report;
use crate::CliError;

fn complex_to_json(m: &ComplexMatrix) -> serde_json::Value {
    json!({
        "re": matrix_to_rows(&linalg::re_part(m)),
        "im": matrix_to_rows(&linalg::im_part(m)),
    })
}

fn emit(report: &Report, json_mode: bool) {
    if json_mode {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_human());
    }
}

fn reversibility_certificates(x: &RealMatrix, y: &RealMatrix) -> (f64, f64) {
    let sigma = symplectic_form(x.nrows() / 2);
    let symp_resid = (x * &sigma * x.transpose() - &sigma).norm();
    (symp_resid, y.norm())
}

fn is_reversible_raw(x: &RealMatrix, y: &RealMatrix, tol: Tolerance) -> bool {
    let (symp, ynorm) = reversibility_certificates(x, y);
    let xs = spectral_norm(x);
    symp <= tol.band((xs * xs).max(1.0)) && ynorm <= tol.band(1.0)
}

pub fn cmd_check(path: &Path, tol: Tolerance, json_mode: bool) -> Result<i32, CliError> {
    let file = ChannelFile::load(path)?;
    let (x, y) = file.matrices()?;
    let mut report = Report::new("check", file.display_label(path), tol.abs_eps);

    let sym_resid = (&y - y.transpose()).norm();
    if sym_resid > tol.band(spectral_norm(&y).max(1.0)) {
        return Err(CliError::Domain(format!(
            "y is not symmetric within tolerance: residual {sym_resid:.3e}"
        )));
    }
    let witness = cp_witness(&x, &y);
    let min_eig = min_eig_hermitian(&witness).map_err(|e| CliError::Domain(e.to_string()))?;
    let cp = cp_check(&x, &y, tol).map_err(|e| CliError::Domain(e.to_string()))?;
    report.push("cp", cp, json!({ "min_eig": min_eig }));

    let (symp_resid, y_norm) = reversibility_certificates(&x, &y);
    let reversible = is_reversible_raw(&x, &y, tol);
    report.push(
        "reversible",
        reversible,
        json!({ "symplectic_residual": symp_resid, "noise_norm": y_norm }),
    );

    emit(&report, json_mode);
    Ok(if cp { 0 } else { 1 })
}

pub fn cmd_compose(
    path1: &Path,
    path2: &Path,
    out: &Path,
    tol: Tolerance,
    json_mode: bool,
) -> Result<i32, CliError> {
    let f1 = ChannelFile::load(path1)?;
    let f2 = ChannelFile::load(path2)?;
    let c1 = f1.to_channel(tol)?;
    let c2 = f2.to_channel(tol)?;
    let composed = c1.compose(&c2).map_err(|e| CliError::Domain(e.to_string()))?;
    let label = format!("{} . {}", f1.display_label(path1), f2.display_label(path2));
    ChannelFile::from_channel(&composed, Some(label.clone())).save(out)?;

    let mut report = Report::new("compose", label, tol.abs_eps);
    let cp = cp_check(composed.x(), composed.y(), tol).map_err(|e| CliError::Domain(e.to_string()))?;
    report.push("cp", cp, serde_json::Value::Null);
    report.push_with_note(
        "order",
        "heisenberg",
        serde_json::Value::Null,
        "the signal first goes through the second operand, then the first",
    );
    report.push("written", out.display().to_string(), serde_json::Value::Null);
    emit(&report, json_mode);
    Ok(0)
}

pub fn cmd_classify(path: &Path, tol: Tolerance, json_mode: bool) -> Result<i32, CliError> {
    let file = ChannelFile::load(path)?;
    let c = file.to_channel(tol)?;
    let mut report = Report::new("classify", file.display_label(path), tol.abs_eps);

    let min_eig = min_eig_hermitian(&cp_witness(c.x(), c.y()))
        .map_err(|e| CliError::Domain(e.to_string()))?;
    report.push("cp", true, json!({ "min_eig": min_eig }));

    let reversible = c.is_reversible(tol);
    report.push("reversible", reversible, json!({ "p_map_norm": p_map_norm(&c) }));

    let idempotent = c.is_idempotent(tol);
    if idempotent {
        match c.idempotent_normal_form(tol) {
            Ok(nf) => report.push(
                "idempotent",
                true,
                json!({
                    "identity_modes": nf.identity_modes,
                    "noise_eigenvalues": nf.noise_eigenvalues,
                }),
            ),
            Err(e) => report.push_with_note("idempotent", true, serde_json::Value::Null, e.to_string()),
        }
    } else {
        report.push("idempotent", false, serde_json::Value::Null);
    }

    if gauge::is_gauge_covariant(&c, tol) {
        let g = gauge::hat(&c, tol).map_err(|e| CliError::Domain(e.to_string()))?;
        let cls = gauge::classify(&g, tol).map_err(|e| CliError::Domain(e.to_string()))?;
        let case = case_name(cls.case);
        let mut certificate = json!({ "k_spectrum": cls.spectrum });
        if let Some(y0) = &cls.invariant_cov {
            certificate["invariant_cov"] = complex_to_json(y0);
        }
        if let Some(anchor) = &cls.anchor {
            certificate["anchor"] = complex_to_json(anchor);
        }
        if !cls.blocks.is_empty() {
            certificate["blocks"] = json!(cls
                .blocks
                .iter()
                .map(|b| json!({ "case": case_name(b.case), "eigenvalues": b.eigenvalues }))
                .collect::<Vec<_>>());
        }
        report.push("gauge_case", case, certificate);
    } else {
        report.push("gauge_case", "not gauge-covariant", serde_json::Value::Null);
    }

    let det = c.x().determinant();
    let infdiv = infdiv_necessary(&c, tol);
    if infdiv {
        report.push("infdiv_necessary", true, json!({ "det_x": det }));
    } else {
        report.push_with_note(
            "infdiv_necessary",
            false,
            json!({ "det_x": det }),
            "det X < 0: not infinitesimal divisible",
        );
    }

    match embeddable_x(c.x(), tol).map_err(|e| CliError::Domain(e.to_string()))? {
        EmbeddabilityVerdict::Yes { .. } => {
            report.push("embeddable_x", "yes", serde_json::Value::Null)
        }
        EmbeddabilityVerdict::No { jordan } => {
            let js: Vec<_> = jordan
                .iter()
                .map(|r| json!({ "eigenvalue": r.eigenvalue, "block_sizes": r.block_sizes }))
                .collect();
            report.push("embeddable_x", "no", json!({ "jordan": js }));
        }
        EmbeddabilityVerdict::Indeterminate { reason } => {
            report.push_with_note("embeddable_x", "indeterminate", serde_json::Value::Null, reason)
        }
    }

    emit(&report, json_mode);
    Ok(0)
}

fn case_name(case: GaugeCase) -> &'static str {
    match case {
        GaugeCase::StatePreparation => "i (state preparation)",
        GaugeCase::ContractiveWithInvariant => "ii (contractive, invariant state)",
        GaugeCase::AdditiveNoise => "iii (additive noise)",
        GaugeCase::Amplifying => "iv (amplifying)",
        GaugeCase::Mixed => "mixed",
    }
}

pub fn cmd_divide(
    path: &Path,
    epsilon: Option<f64>,
    out_left: &Path,
    out_right: &Path,
    tol: Tolerance,
    json_mode: bool,
) -> Result<i32, CliError> {
    let file = ChannelFile::load(path)?;
    let c = file.to_channel(tol)?;
    let division = match epsilon {
        Some(e) => c.divide_with_epsilon(tol, e),
        None => c.divide(tol),
    }
    .map_err(|e| CliError::Domain(e.to_string()))?;

    let label = file.display_label(path);
    ChannelFile::from_channel(&division.left, Some(format!("{label} [left factor]"))).save(out_left)?;
    ChannelFile::from_channel(&division.right, Some(format!("{label} [right factor]")))
        .save(out_right)?;

    let mut report = Report::new("divide", label, tol.abs_eps);
    report.push("composition_residual", division.residual(&c), serde_json::Value::Null);
    if let Some(eps) = division.epsilon {
        report.push("epsilon", eps, serde_json::Value::Null);
    }
    if division.used_kernel_branch {
        report.push_with_note(
            "branch",
            "kernel-projector",
            serde_json::Value::Null,
            "X is singular; the right factor adds the kernel projector as noise",
        );
    } else {
        report.push("branch", "class-scaling", serde_json::Value::Null);
    }
    for (name, factor) in [("left", &division.left), ("right", &division.right)] {
        let cp = cp_check(factor.x(), factor.y(), tol).map_err(|e| CliError::Domain(e.to_string()))?;
        report.push(
            &format!("{name}_factor"),
            if factor.is_reversible(tol) { "reversible" } else { "non-reversible" },
            json!({ "cp": cp, "p_map_norm": p_map_norm(factor) }),
        );
    }
    report.push("written_left", out_left.display().to_string(), serde_json::Value::Null);
    report.push("written_right", out_right.display().to_string(), serde_json::Value::Null);
    emit(&report, json_mode);
    Ok(0)
}

pub fn cmd_semigroup(
    path: &Path,
    times: &[f64],
    out_dir: &Path,
    tol: Tolerance,
    json_mode: bool,
) -> Result<i32, CliError> {
    let file = GeneratorFile::load(path)?;
    let generator = file.to_generator(tol)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    let label = file.display_label(path);
    let mut report = Report::new("semigroup", label.clone(), tol.abs_eps);

    for &t in times {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Domain(format!("evolution time must be nonnegative, got {t}")));
        }
        let c = generator.evolve(t).map_err(|e| CliError::Domain(e.to_string()))?;
        let out = out_dir.join(format!("evolve_t{t}.json"));
        ChannelFile::from_channel(&c, Some(format!("{label} at t={t}"))).save(&out)?;
        let cp = cp_check(c.x(), c.y(), tol).map_err(|e| CliError::Domain(e.to_string()))?;
        report.push(
            &format!("evolve[t={t}]"),
            out.display().to_string(),
            json!({ "cp": cp }),
        );
    }

    match simple_form(&generator, tol) {
        Ok(sf) => {
            report.push("simple_form", "yes", json!({ "anchor": matrix_to_rows(sf.anchor()) }));
            match invariant_state(&sf, tol) {
                Some(state) => report.push(
                    "invariant_state",
                    "yes",
                    json!({ "cov": matrix_to_rows(state.cov()) }),
                ),
                None => report.push_with_note(
                    "invariant_state",
                    "no",
                    serde_json::Value::Null,
                    "anchor is not a valid covariance matrix",
                ),
            }
        }
        Err(SemigroupError::Linalg(LinalgError::SingularKroneckerSum)) => {
            report.push_with_note(
                "simple_form",
                "no",
                serde_json::Value::Null,
                "no simple form: drift eigenvalue pair sums to zero (non-diagonal noise cannot be matched)",
            );
        }
        Err(e) => return Err(CliError::Domain(e.to_string())),
    }

    match bounded_noise_check(&generator, tol) {
        Ok((bounded, anchor)) => {
            let cert = anchor
                .map(|a| json!({ "anchor": matrix_to_rows(&a) }))
                .unwrap_or(serde_json::Value::Null);
            report.push("bounded_noise", bounded, cert);
        }
        Err(SemigroupError::Indeterminate(reason)) => {
            report.push_with_note("bounded_noise", "indeterminate", serde_json::Value::Null, reason);
        }
        Err(e) => return Err(CliError::Domain(e.to_string())),
    }

    let (h, l) = generator.lindblad_export().map_err(|e| CliError::Domain(e.to_string()))?;
    report.push(
        "lindblad",
        "exported",
        json!({ "hamiltonian": matrix_to_rows(&h), "coefficients": complex_to_json(&l) }),
    );

    emit(&report, json_mode);
    Ok(0)
}

pub fn cmd_embed_check(path: &Path, tol: Tolerance, json_mode: bool) -> Result<i32, CliError> {
    let file = ChannelFile::load(path)?;
    let (x, y) = file.matrices()?;
    let mut report = Report::new("embed-check", file.display_label(path), tol.abs_eps);

    let verdict = embeddable_x(&x, tol).map_err(|e| CliError::Domain(e.to_string()))?;
    let mut exit = 0;
    match &verdict {
        EmbeddabilityVerdict::Yes { witness } => {
            report.push(
                "embeddable_x",
                "yes",
                json!({
                    "witness_a": matrix_to_rows(witness.a()),
                    "witness_b": matrix_to_rows(witness.b()),
                    "witness_h": matrix_to_rows(witness.h()),
                }),
            );
        }
        EmbeddabilityVerdict::No { jordan } => {
            exit = 1;
            let js: Vec<_> = jordan
                .iter()
                .map(|r| json!({ "eigenvalue": r.eigenvalue, "block_sizes": r.block_sizes }))
                .collect();
            report.push("embeddable_x", "no", json!({ "jordan": js }));
        }
        EmbeddabilityVerdict::Indeterminate { reason } => {
            report.push_with_note("embeddable_x", "indeterminate", serde_json::Value::Null, reason);
        }
    }

    if is_reversible_raw(&x, &y, tol) {
        match in_exp_sp(&x, tol).map_err(|e| CliError::Domain(e.to_string()))? {
            EmbeddabilityVerdict::Yes { .. } => report.push("in_exp_sp", "yes", serde_json::Value::Null),
            EmbeddabilityVerdict::No { .. } => report.push("in_exp_sp", "no", serde_json::Value::Null),
            EmbeddabilityVerdict::Indeterminate { reason } => {
                report.push_with_note("in_exp_sp", "indeterminate", serde_json::Value::Null, reason)
            }
        }
        let (p, o) = split_exp_sp(&x, tol).map_err(|e| CliError::Domain(e.to_string()))?;
        let sigma = symplectic_form(x.nrows() / 2);
        let product_residual = (&p * &o - &x).norm();
        let p_symp = (&p * &sigma * p.transpose() - &sigma).norm();
        let o_symp = (&o * &sigma * o.transpose() - &sigma).norm();
        report.push(
            "split_exp_sp",
            "computed",
            json!({
                "positive_factor": matrix_to_rows(&p),
                "orthogonal_factor": matrix_to_rows(&o),
                "product_residual": product_residual,
                "positive_symplectic_residual": p_symp,
                "orthogonal_symplectic_residual": o_symp,
            }),
        );
    }

    emit(&report, json_mode);
    Ok(exit)
}
