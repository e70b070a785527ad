//! Deterministic CSV/JSON emission for every table and figure.
//!
//! Numbers are written with a fixed 12-digit scientific format (the shortest
//! representation a reader needs; rounding is the formatter's
//! nearest-representable rule and ties cannot arise from irrational data).
//! Re-running with the same configuration and version produces byte-identical
//! files; the manifest records the config hash instead of a timestamp.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use cubic_splitting::koch::phi_rationality_report;
use cubic_splitting::rat::ratio_to_string;
use cubic_splitting::resonances::{brute_scan, ScanReport};
use cubic_splitting::splitting::{
    h_profiles, max_splitting_estimate, torus_grid, EstimateReport, SplittingProfile, TorusGrid,
};

use crate::pipeline::{Analysis, PipelineError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn fm(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Serialize)]
pub struct KochSummary {
    #[serde(rename = "T")]
    pub t: Vec<Vec<i64>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<i64>>,
    pub lambda: LambdaSummary,
    pub phi: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub kappa: f64,
    pub first_row_norm: f64,
    pub op_norm: f64,
    pub sign_s: i8,
    /// Ingredients of the oscillation amplitude: |u₂|², |u₃|², ⟨u₂,u₃⟩ and
    /// the derived Z₁, Z₂, θ, δ.
    pub u2_norm_sq: f64,
    pub u3_norm_sq: f64,
    pub u2_dot_u3: f64,
    pub z1: f64,
    pub z2: f64,
    pub theta: f64,
    pub delta: f64,
    pub phi_quotients: Vec<i64>,
    pub phi_convergents: Vec<(String, String)>,
}

#[derive(Serialize)]
pub struct LambdaSummary {
    /// Coordinates in the basis 1, Ω, Ω² as p/q strings.
    pub coords: [String; 3],
    pub decimal: f64,
}

pub fn koch_summary(analysis: &Analysis) -> KochSummary {
    let k = &analysis.koch;
    let mat = |m: &cubic_splitting::koch::IntMatrix3| {
        m.to_i64s()
            .expect("matrix entries fit i64")
            .iter()
            .map(|r| r.to_vec())
            .collect()
    };
    let cf = phi_rationality_report(k.phi, 100_000);
    let dot = |a: &[cubic_splitting::real::Real; 3], b: &[cubic_splitting::real::Real; 3]| {
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).to_f64()
    };
    KochSummary {
        t: mat(&k.t),
        u: mat(&k.u),
        lambda: LambdaSummary {
            coords: k.lambda_exact.coord_strings(),
            decimal: k.lambda.to_f64(),
        },
        phi: k.phi.to_f64(),
        mu2: k.mu2.to_f64(),
        mu3: k.mu3.to_f64(),
        kappa: k.kappa.to_f64(),
        first_row_norm: k.first_row_norm,
        op_norm: k.op_norm,
        sign_s: k.field.sign_s(),
        u2_norm_sq: dot(&k.u2, &k.u2),
        u3_norm_sq: dot(&k.u3, &k.u3),
        u2_dot_u3: dot(&k.u2, &k.u3),
        z1: analysis.osc.z1.to_f64(),
        z2: analysis.osc.z2.to_f64(),
        theta: analysis.osc.theta.to_f64(),
        delta: analysis.osc.delta.to_f64(),
        phi_quotients: cf.quotients,
        phi_convergents: cf.convergents,
    }
}

#[derive(Serialize)]
pub struct ConstantsSummary {
    pub z1: f64,
    pub z2: f64,
    pub theta: f64,
    pub delta: f64,
    pub delta_sq_coords: [String; 3],
    pub q0: f64,
    pub q_hat: [String; 2],
    pub q_hathat: [String; 2],
    pub gamma_star: f64,
    pub gamma_star_coords: [String; 3],
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub psi_hat: f64,
    pub k_qhat: f64,
    pub j0_plus: f64,
    pub b0_minus: f64,
    pub weak_sep: bool,
    pub strong_sep: bool,
    pub multiple_primaries: bool,
    pub c0: f64,
    pub d0: f64,
    pub xi0: f64,
    pub j1_zero: f64,
    pub j0_minus: f64,
    pub j1_plus: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    pub window_semantics: String,
    pub zeta0: f64,
    pub lambda0: f64,
    pub delta_zeroed: bool,
}

pub fn constants_summary(analysis: &Analysis) -> ConstantsSummary {
    let c = &analysis.classified.constants;
    let p = &analysis.params;
    let lambda0 = cubic_splitting::koch::lambda_floor(c.gamma_asymptotic, analysis.koch.kappa)
        .map(|x| x.to_f64())
        .unwrap_or(f64::NAN);
    ConstantsSummary {
        z1: c.z1.to_f64(),
        z2: c.z2.to_f64(),
        theta: c.theta.to_f64(),
        delta: c.delta.to_f64(),
        delta_sq_coords: analysis.osc.delta_sq_exact.coord_strings(),
        q0: c.q0.to_f64(),
        q_hat: [c.q_hat[0].to_string(), c.q_hat[1].to_string()],
        q_hathat: [c.q_hathat[0].to_string(), c.q_hathat[1].to_string()],
        gamma_star: c.gamma_star.to_f64(),
        gamma_star_coords: c.gamma_star_exact.coord_strings(),
        gamma_minus: c.gamma_asymptotic.to_f64(),
        gamma_plus: (c.gamma_star.to_f64()) * (1.0 + c.delta.to_f64()),
        psi_hat: c.psi_hat.to_f64(),
        k_qhat: c.k_qhat.to_f64(),
        j0_plus: c.j0_plus.to_f64(),
        b0_minus: c.b0_minus.to_f64(),
        weak_sep: c.weak_sep,
        strong_sep: c.strong_sep_input,
        multiple_primaries: c.multiple_primaries,
        c0: p.c0,
        d0: p.d0,
        xi0: p.xi0,
        j1_zero: p.j1_zero,
        j0_minus: p.j0_minus,
        j1_plus: p.j1_plus,
        n_minus: p.n_minus,
        n_plus: p.n_plus,
        window_semantics: format!("{:?}", p.window_semantics),
        zeta0: p.zeta0,
        lambda0,
        delta_zeroed: p.delta_zeroed,
    }
}

/// Primitive table mirroring the published layout:
/// k0, gamma_minus, gamma_star, gamma_plus, gamma_tilde.
pub fn primitives_csv(analysis: &Analysis) -> String {
    let mut s = String::from(
        "q1,q2,k0_1,k0_2,k0_3,essential,r_q,gamma_minus,gamma_star,gamma_plus,gamma_tilde\n",
    );
    for rec in &analysis.classified.primitives {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            rec.q[0],
            rec.q[1],
            rec.k0[0],
            rec.k0[1],
            rec.k0[2],
            rec.essential,
            fm(rec.r_q.to_f64()),
            fm(rec.gamma_minus.to_f64()),
            fm(rec.gamma_star.to_f64()),
            fm(rec.gamma_plus.to_f64()),
            fm(rec.gamma_star_norm.map(|x| x.to_f64()).unwrap_or(f64::NAN)),
        ));
    }
    s
}

/// Scatter of (ln|k|, −ln|⟨k,ω⟩|) with sequence classification.
pub fn scatter_csv(report: &ScanReport) -> String {
    let mut s = String::from("ln_norm,neg_ln_divisor,sequence_id,is_primary,n\n");
    for e in &report.entries {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fm(e.ln_norm),
            fm(e.neg_ln_divisor),
            e.seq_index,
            e.is_primary,
            e.n
        ));
    }
    s
}

pub fn scan_summary_json(report: &ScanReport) -> serde_json::Value {
    serde_json::json!({
        "k_max": report.k_max,
        "quasi_resonances": report.entries.len(),
        "sequences": report.scan_primitives.len(),
        "min_gamma": report.min_gamma,
        "gamma_minus_line": report.gamma_minus_line,
        "gamma_plus_line": report.gamma_plus_line,
        "band_exceptions": report.band_exceptions,
        "unclassified": report.unclassified,
    })
}

/// Envelope profile (one row per ζ grid point).
pub fn profile_csv(profile: &SplittingProfile) -> String {
    let mut s =
        String::from("zeta,eps,F1,F1_bar,h2,S1_q1,S1_q2,S1_n,is_corner,S2_q1,S2_q2,S2_n,valid\n");
    for i in 0..profile.zeta.len() {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fm(profile.zeta[i]),
            fm(profile.eps[i]),
            fm(profile.f1[i]),
            fm(profile.f1_bar[i]),
            fm(profile.f2[i]),
            profile.s1[i].q[0],
            profile.s1[i].q[1],
            profile.s1[i].n,
            profile.is_corner[i],
            profile.s2[i].q[0],
            profile.s2[i].q[1],
            profile.s2[i].n,
            profile.valid[i],
        ));
    }
    s
}

pub fn torus_csv(grid: &TorusGrid) -> String {
    let res = grid.resolution;
    let mut s = String::with_capacity(res * res * 40);
    s.push_str("x,y,value,region_n\n");
    for i in 0..res {
        for j in 0..res {
            s.push_str(&format!(
                "{},{},{},{}\n",
                fm(i as f64 / res as f64),
                fm(j as f64 / res as f64),
                fm(grid.values[i * res + j]),
                grid.region[i * res + j]
            ));
        }
    }
    s
}

const PLOT_STUB: &str = r#"#!/usr/bin/env python3
"""Companion plot stub for the emitted CSV files.

Usage: python3 plot.py <out-dir>
"""
import sys
import csv
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")

def rows(name):
    with open(out / name) as f:
        return list(csv.DictReader(f))

h1 = rows("h1.csv")
z = [float(r["zeta"]) for r in h1]
plt.figure(figsize=(9, 4))
plt.plot(z, [float(r["F1"]) for r in h1], lw=0.8, label="F1")
plt.plot(z, [float(r["h2"]) for r in h1], lw=0.5, alpha=0.6, label="h2")
plt.xlabel("zeta"); plt.ylabel("envelope"); plt.legend()
plt.savefig(out / "h1.png", dpi=150)

sc = rows("scatter.csv")
plt.figure(figsize=(6, 6))
prim = [r for r in sc if r["is_primary"] == "true"]
sec = [r for r in sc if r["is_primary"] != "true"]
plt.scatter([float(r["ln_norm"]) for r in sec], [float(r["neg_ln_divisor"]) for r in sec], s=2, c="gray")
plt.scatter([float(r["ln_norm"]) for r in prim], [float(r["neg_ln_divisor"]) for r in prim], s=6, c="red")
plt.xlabel("ln |k|"); plt.ylabel("-ln |<k, omega>|")
plt.savefig(out / "scatter.png", dpi=150)
print("wrote", out / "h1.png", "and", out / "scatter.png")
"#;

/// Everything `analyze` writes, with paths.
pub struct ReportBundle {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub estimates: Vec<EstimateReport>,
    pub scan: ScanReport,
}

fn write(out: &mut Vec<PathBuf>, path: PathBuf, content: &str) -> Result<(), PipelineError> {
    let mut f = fs::File::create(&path)?;
    f.write_all(content.as_bytes())?;
    out.push(path);
    Ok(())
}

/// Runs the full pipeline outputs into `config.out_dir`.
pub fn run_analyze(analysis: &Analysis) -> Result<ReportBundle, PipelineError> {
    let cfg = &analysis.config;
    fs::create_dir_all(&cfg.out_dir)?;
    let mut files = Vec::new();
    let dir = cfg.out_dir.clone();

    let koch = koch_summary(analysis);
    write(
        &mut files,
        dir.join("koch.json"),
        &serde_json::to_string_pretty(&koch).unwrap(),
    )?;
    let consts = constants_summary(analysis);
    write(
        &mut files,
        dir.join("constants.json"),
        &serde_json::to_string_pretty(&consts).unwrap(),
    )?;
    write(
        &mut files,
        dir.join("primitives.csv"),
        &primitives_csv(analysis),
    )?;

    let scan = brute_scan(&analysis.koch, &analysis.classified.constants, cfg.kmax)
        .map_err(PipelineError::Resonance)?;
    write(&mut files, dir.join("scatter.csv"), &scatter_csv(&scan))?;
    write(
        &mut files,
        dir.join("scan.json"),
        &serde_json::to_string_pretty(&scan_summary_json(&scan)).unwrap(),
    )?;

    // the torus maximum sharpens the dominance cut used by the profile
    let grid = torus_grid(&analysis.params, cfg.torus_resolution);
    write(&mut files, dir.join("upsilon.csv"), &torus_csv(&grid))?;
    let mut params = analysis.params.clone();
    params.tighten_cut(grid.j1_star);

    let profile = h_profiles(
        &analysis.koch,
        &params,
        cfg.zeta_min,
        cfg.zeta_max,
        cfg.zeta_step,
    )?;
    write(&mut files, dir.join("h1.csv"), &profile_csv(&profile))?;

    let mut estimates = Vec::new();
    for &eps in &cfg.estimate_eps {
        let mu = eps.powf(cfg.mu_exponent);
        estimates.push(max_splitting_estimate(&params, eps, mu)?);
    }
    write(
        &mut files,
        dir.join("estimates.json"),
        &serde_json::to_string_pretty(&estimates).unwrap(),
    )?;

    let manifest = serde_json::json!({
        "version": VERSION,
        "config_hash": cfg.hash(),
        "config": cfg.canonical_string(),
        "preset": cfg.preset,
        "precision_digits": cfg.precision_digits,
        "field": {
            "r": [ratio_to_string(&cfg.r[0]), ratio_to_string(&cfg.r[1]), ratio_to_string(&cfg.r[2])],
            "a": [ratio_to_string(&cfg.a[0]), ratio_to_string(&cfg.a[1]), ratio_to_string(&cfg.a[2])],
        },
        "torus": {
            "j1_star": grid.j1_star,
            "j0_minus_observed": grid.j0_minus_observed,
            "confluence": grid.confluence,
            "argmax": grid.j1_location,
        },
        "corners": profile.corners.len(),
    });
    write(
        &mut files,
        dir.join("manifest.json"),
        &serde_json::to_string_pretty(&manifest).unwrap(),
    )?;
    write(&mut files, dir.join("plot.py"), PLOT_STUB)?;

    Ok(ReportBundle {
        out_dir: dir,
        files,
        estimates,
        scan,
    })
}

/// Text rendering of the `koch` subcommand (human form).
pub fn koch_text(s: &KochSummary) -> String {
    let mat = |m: &Vec<Vec<i64>>| {
        m.iter()
            .map(|r| format!("  [{:>3} {:>3} {:>3}]", r[0], r[1], r[2]))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let conv = s
        .phi_convergents
        .iter()
        .map(|(p, q)| format!("{p}/{q}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "T =\n{}\nU =\n{}\nlambda = {} + {}*Omega + {}*Omega^2 = {:.15}\n\
         |T_(1)| = {:.12}   |T| = {:.12}\nphi = {:.15}   (sign s = {})\n\
         mu2 = {:.15}   mu3 = {:.15}\nkappa = {:.12}\n\
         |u2|^2 = {:.12}   |u3|^2 = {:.12}   <u2,u3> = {:.12}\n\
         Z1 = {:.12}   Z2 = {:.12}   theta = {:.12}   delta = {:.12}\n\
         phi quotients: {:?}\nphi convergents: {}\n",
        mat(&s.t),
        mat(&s.u),
        s.lambda.coords[0],
        s.lambda.coords[1],
        s.lambda.coords[2],
        s.lambda.decimal,
        s.first_row_norm,
        s.op_norm,
        s.phi,
        s.sign_s,
        s.mu2,
        s.mu3,
        s.kappa,
        s.u2_norm_sq,
        s.u3_norm_sq,
        s.u2_dot_u3,
        s.z1,
        s.z2,
        s.theta,
        s.delta,
        s.phi_quotients,
        conv
    )
}

pub fn write_string(path: &Path, content: &str) -> Result<(), PipelineError> {
    let mut f = fs::File::create(path)?;
    f.write_all(content.as_bytes())?;
    Ok(())
}
