//! `soliton-lab`: builds surfaces, runs identity checks, spectra and
//! estimate certificates, and writes JSON/CSV reports plus a manifest.

mod convert;
mod opts;
mod output;
mod surface;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use solitonlab::estimates::{
    batch_csv, bootstrap_pointwise_bound, choi_schoen, integral_curvature_decay, log_cutoff_energy,
    mean_value_monotonicity, random_annulus_cutoffs, scale_invariant_energy, ssy_inequality, theta, EstimateReport,
};
use solitonlab::gaussian::{entropy, volume_growth_certificate};
use solitonlab::geometry::{compute_geometry, fields_csv, shrinker_residual};
use solitonlab::stability::{
    eigen_identity_residuals, first_eigenvalue, simons_identity_residual, SpectrumReport, DEFAULT_TOL_DISC,
};
use solitonlab::surfaces::{CatalogId, SampledHypersurface};
use solitonlab::translators::{
    bowl_solve, translator_curvature_report, translator_first_eigenvalue, translator_residual,
    translator_simons_residual,
};
use solitonlab::vecops::{norm, unit_sphere_area};

use opts::{Opts, Params};
use output::Run;
use surface::Density;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or violated precondition: exit 2, no manifest.
    Usage(String),
    /// The computation itself broke down: exit 1 with a manifest.
    Failed(String),
}

impl From<solitonlab::Error> for CliError {
    fn from(e: solitonlab::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Failed(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "soliton-lab",
    version,
    about = "Numerical laboratory for mean curvature flow solitons"
)]
struct Cli {
    /// Output directory for reports and the manifest.
    #[arg(long, global = true, env = "SOLITONLAB_OUT", default_value = "soliton-out")]
    out: PathBuf,
    /// TOML file with parameter defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the closed-form surfaces.
    Catalog {
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Shrinker residual, eigenfunction identities and Simons identity.
    Verify(Opts),
    /// Dirichlet eigenvalues of -L on B_R and the delta-stability verdict.
    Spectrum(Opts),
    /// Entropy via the F-functional search.
    Entropy(Opts),
    /// Estimate certificates.
    Estimates {
        which: Estimate,
        #[command(flatten)]
        opts: Opts,
    },
    /// Translator computations (default surface: the bowl).
    Translator {
        which: TranslatorCmd,
        #[command(flatten)]
        opts: Opts,
    },
    /// Convert between JSON reports and CSV tables.
    Convert { input: PathBuf, output: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimate {
    Prop31,
    Meanvalue,
    Bootstrap,
    Choischoen,
    Ssy,
    Lemma43,
    Logcutoff,
    Volgrowth,
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslatorCmd {
    Bowl,
    Residual,
    Spectrum,
    Simons,
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config.as_deref();
    match cli.cmd {
        Cmd::Catalog { json, n } => catalog(json, n),
        Cmd::Verify(o) => dispatch("verify", &o, config, &cli.out, verify),
        Cmd::Spectrum(o) => dispatch("spectrum", &o, config, &cli.out, spectrum),
        Cmd::Entropy(o) => dispatch("entropy", &o, config, &cli.out, entropy_cmd),
        Cmd::Estimates { which, opts } => {
            let name = format!("estimates {}", which.to_possible_value().unwrap().get_name());
            dispatch(&name, &opts, config, &cli.out, |p, r| estimates(which, p, r))
        }
        Cmd::Translator { which, opts } => {
            let name = format!("translator {}", which.to_possible_value().unwrap().get_name());
            dispatch(&name, &opts, config, &cli.out, |p, r| translator(which, p, r))
        }
        Cmd::Convert { input, output } => match convert::convert(&input, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Usage(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        CliError::Failed(m) => {
            eprintln!("failed: {m}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(
    name: &str,
    opts: &Opts,
    config: Option<&Path>,
    out: &Path,
    body: impl FnOnce(&mut Params, &mut Run) -> Result<(), CliError>,
) -> ExitCode {
    let setup = Params::new(opts, config).and_then(|p| Ok((p, Run::new(out, name)?)));
    let (mut params, mut run) = match setup {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let outcome = body(&mut params, &mut run);
    let error = match outcome {
        Err(CliError::Usage(m)) => return fail(CliError::Usage(m)),
        Err(CliError::Failed(m)) => Some(m),
        Ok(()) => None,
    };
    if let Err(e) = run.finish(&params.effective, error.clone()) {
        return fail(e);
    }
    match error {
        Some(m) => fail(CliError::Failed(m)),
        None if run.pass() => ExitCode::SUCCESS,
        None => ExitCode::from(1),
    }
}

fn catalog(as_json: bool, n: usize) -> ExitCode {
    if n < 2 {
        return fail(CliError::Usage(format!(
            "intrinsic dimension must be at least 2, got {n}"
        )));
    }
    let mut e = vec![0.0; n + 1];
    e[n] = 1.0;
    let mut ids = vec![CatalogId::Sphere { n }];
    ids.extend((1..n).map(|k| CatalogId::Cylinder { k, n }));
    ids.push(CatalogId::Hyperplane {
        normal: e.clone(),
        offset: 0.0,
    });
    ids.push(CatalogId::TiltedPlaneGraph { normal: e });
    ids.push(CatalogId::NearPlaneShrinker { n, edge_height: 0.05 });
    ids.push(CatalogId::Bowl { n });
    if as_json {
        let rows: Vec<_> = ids
            .iter()
            .map(|id| json!({"id": id, "label": id.label(), "compact": id.is_compact()}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&rows).unwrap());
    } else {
        for id in &ids {
            println!("{}", id.label());
        }
        if n > 6 {
            println!("note: the curvature estimates are only certified for n <= 6");
        }
    }
    ExitCode::SUCCESS
}

/// The pointwise curvature estimates behind these certificates need n <= 6.
/// Catalog surfaces are checked before they are sampled.
fn require_low_dim(p: &mut Params, what: &str) -> Result<(), CliError> {
    if p.string("surface", None)? == "file" {
        return Ok(());
    }
    let n = surface::catalog_id(p)?.dim();
    if n > 6 {
        return Err(CliError::Usage(format!("{what} requires 2 <= n <= 6, got n = {n}")));
    }
    Ok(())
}

fn require_low_dim_built(s: &SampledHypersurface, what: &str) -> Result<(), CliError> {
    if s.n > 6 {
        return Err(CliError::Usage(format!("{what} requires 2 <= n <= 6, got n = {}", s.n)));
    }
    Ok(())
}

fn tolerance_report(name: &str, value: f64, tol: f64, source: &str) -> EstimateReport {
    let mut r = EstimateReport::new(name);
    r.param("tol", tol);
    r.param("surface", source);
    r.finish(value, tol)
}

fn verify(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let s = surface::build(p, Density::Fine)?;
    let geo = compute_geometry(&s)?;
    let res = shrinker_residual(&s, &geo);
    run.data("fields.csv", &fields_csv(&s, &geo, &res.residual))?;
    let tol = p.f64("tol", Some(1e-10))?;
    let rep = tolerance_report("shrinker_residual", res.sup, tol, &s.source);
    run.report("shrinker_residual", &rep, rep.pass)?;

    let d = s.ambient_dim();
    let v = vec![1.0 / (d as f64).sqrt(); d];
    let ids = eigen_identity_residuals(&s, &v)?;
    let tol = p.f64("tol_identity", Some(1e-3))?;
    let mut rep = tolerance_report("eigen_identities", ids.r_h.max(ids.r_v), tol, &s.source);
    rep.measure("LH_minus_H", ids.r_h);
    rep.measure("Lv_minus_half_v", ids.r_v);
    rep.measure("v", v);
    run.report("eigen_identities", &rep, rep.pass)?;

    let simons = simons_identity_residual(&s)?;
    let rep = tolerance_report("simons_identity", simons, p.f64("tol_simons", Some(1e-8))?, &s.source);
    run.report("simons_identity", &rep, rep.pass)
}

fn region(p: &mut Params, s: &SampledHypersurface) -> Result<f64, CliError> {
    if s.coverage.is_complete() && !p.has("R") {
        Ok(f64::INFINITY)
    } else {
        p.f64("R", None)
    }
}

fn spectrum(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let s = surface::build(p, Density::Coarse)?;
    let r = region(p, &s)?;
    let m = p.usize("m", Some(4))?;
    let delta = p.opt_f64("delta")?;
    let tol = p.f64("tol_disc", Some(DEFAULT_TOL_DISC))?;
    let seed = if p.has("seed") {
        Some(p.u64("seed", None)?)
    } else {
        None
    };
    let spec = first_eigenvalue(&s, r, m)?;
    let rep = SpectrumReport::new(&spec, delta, tol, seed);
    println!("lambda1 = {:.6}", spec.lambda1());
    run.report("spectrum", &rep, rep.verdict.unwrap_or(true))
}

fn entropy_cmd(p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let s = surface::build(p, Density::Fine)?;
    let hint = p.opt_f64("lambda0")?;
    let e = entropy(&s, hint)?;
    println!("entropy = {:.7} at t0 = {:.6}", e.value, e.t0);
    run.report("entropy", &e, e.converged)
}

fn base_point(p: &mut Params, s: &SampledHypersurface) -> Result<Vec<f64>, CliError> {
    if p.has("x0") {
        let x = p.vec("x0", None)?;
        if x.len() != s.ambient_dim() {
            return Err(CliError::Usage(format!("--x0 needs {} coordinates", s.ambient_dim())));
        }
        return Ok(x);
    }
    let origin = vec![0.0; s.ambient_dim()];
    let i = s
        .nearest_sample(&origin)
        .ok_or_else(|| CliError::Usage("surface has no samples".into()))?;
    let x = s.samples[i].x.clone();
    p.effective.insert("x0".into(), json!(x));
    Ok(x)
}

fn estimates(which: Estimate, p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let density = match which {
        Estimate::Prop31 | Estimate::Bootstrap => Density::Coarse,
        _ => Density::Fine,
    };
    let q = if matches!(which, Estimate::Ssy) {
        p.f64("q", Some(0.0))?
    } else {
        0.0
    };
    let guarded = match which {
        Estimate::Bootstrap => Some("the bootstrap bound"),
        Estimate::Choischoen => Some("the Choi-Schoen estimate"),
        Estimate::Logcutoff => Some("the logarithmic cutoff estimate"),
        Estimate::Ssy if q > 0.0 => Some("the q > 0 estimate"),
        _ => None,
    };
    if let Some(what) = guarded {
        require_low_dim(p, what)?;
    }
    let s = surface::build(p, density)?;
    if let Some(what) = guarded {
        require_low_dim_built(&s, what)?;
    }
    let rep = match which {
        Estimate::Prop31 => {
            let (r, l, a) = (p.f64("R", None)?, p.f64("lambda0", None)?, p.f64("a", Some(0.5))?);
            integral_curvature_decay(&s, r, l, a)?
        }
        Estimate::Meanvalue => {
            let x0 = base_point(p, &s)?;
            let (r, smax, k) = (
                p.f64("R", None)?,
                p.f64("smax", Some(1.0))?,
                p.usize("radii", Some(16))?,
            );
            let t = mean_value_monotonicity(&s, &x0, r, smax, k)?;
            run.data("meanvalue.csv", &t.to_csv())?;
            return run.report("meanvalue", &t, t.monotone);
        }
        Estimate::Bootstrap => {
            let x0 = base_point(p, &s)?;
            bootstrap_pointwise_bound(&s, &x0, p.f64("R", None)?, p.f64("lambda0", None)?)?
        }
        Estimate::Choischoen => {
            let x0 = base_point(p, &s)?;
            choi_schoen(&s, &x0, p.f64("r0", None)?, p.opt_f64("epsilon")?)?
        }
        Estimate::Ssy => {
            let (a, r) = (p.opt_f64("a")?, p.f64("R", None)?);
            let cutoffs = random_annulus_cutoffs(
                s.ambient_dim(),
                r,
                p.usize("cutoffs", Some(20))?,
                p.u64("seed", Some(0))?,
            )?;
            let mut reports = Vec::with_capacity(cutoffs.len());
            for c in &cutoffs {
                reports.push(ssy_inequality(&s, c, q, a, r)?);
            }
            run.data("ssy.csv", &batch_csv(&reports))?;
            for (i, rep) in reports.iter().enumerate() {
                run.report(&format!("ssy-{i:03}"), rep, rep.pass)?;
            }
            return Ok(());
        }
        Estimate::Lemma43 => {
            let x0 = base_point(p, &s)?;
            let r = p.f64("r", Some(theta(norm(&x0)) / 2.0))?;
            scale_invariant_energy(&s, &x0, r, p.f64("p", Some(2.0))?, p.f64("lambda0", None)?)?
        }
        Estimate::Logcutoff => {
            let x0 = base_point(p, &s)?;
            let rings = p.u64("rings", Some(3))? as u32;
            log_cutoff_energy(&s, &x0, p.f64("r0", None)?, rings, p.f64("lambda0", None)?)?
        }
        Estimate::Volgrowth => {
            let x0 = base_point(p, &s)?;
            volume_growth_certificate(&s, &x0, p.f64("r", None)?, p.f64("lambda0", None)?)?
        }
    };
    if !rep.hypothesis_holds {
        println!("hypothesis: {}", rep.hypothesis_status);
    }
    let name = rep.name.clone();
    run.report(&name, &rep, rep.pass)
}

fn translator(which: TranslatorCmd, p: &mut Params, run: &mut Run) -> Result<(), CliError> {
    let n = p.usize("n", Some(2))?;
    // Convex hypersurfaces have at most the area of the ball boundary inside a ball.
    let lambda0_default = unit_sphere_area(n);
    let bowl_wanted = !p.has("surface") || p.string("surface", None)? == "bowl";
    let (s, bowl) = if bowl_wanted {
        let rmax = p.f64("rmax", Some(6.0))?;
        let b = bowl_solve(n, rmax, p.f64("step", Some(0.01))?)?;
        (b.surface.clone(), Some(b))
    } else if matches!(which, TranslatorCmd::Bowl) {
        return Err(CliError::Usage(
            "translator bowl builds its own surface; drop --surface".into(),
        ));
    } else {
        (surface::build(p, Density::Coarse)?, None)
    };
    match which {
        TranslatorCmd::Bowl => {
            let b = bowl.expect("bowl surface");
            run.data("bowl_profile.csv", &b.to_csv()?)?;
            let rep = translator_curvature_report(&s, p.f64("lambda0", Some(lambda0_default))?)?;
            println!(
                "sup |A|^2 = {:.6}",
                rep.measurements["sup_normA2"].as_f64().unwrap_or(f64::NAN)
            );
            run.report("translator_curvature", &rep, rep.pass)
        }
        TranslatorCmd::Residual => {
            let res = translator_residual(&s)?;
            let rep = tolerance_report("translator_residual", res.sup, p.f64("tol", Some(1e-6))?, &s.source);
            run.report("translator_residual", &rep, rep.pass)
        }
        TranslatorCmd::Simons => {
            let annulus = if p.has("annulus") {
                match p.vec("annulus", None)?[..] {
                    [lo, hi] if lo < hi => Some((lo, hi)),
                    _ => return Err(CliError::Usage("--annulus needs two increasing radii".into())),
                }
            } else {
                None
            };
            let v = translator_simons_residual(&s, annulus)?;
            let rep = tolerance_report("translator_simons", v, p.f64("tol", Some(1e-3))?, &s.source);
            run.report("translator_simons", &rep, rep.pass)
        }
        TranslatorCmd::Spectrum => {
            let region = p.opt_f64("R")?;
            let (m, scale) = (p.usize("m", Some(4))?, p.f64("potential_scale", Some(1.0))?);
            let tol = p.f64("tol_disc", Some(DEFAULT_TOL_DISC))?;
            let spec = translator_first_eigenvalue(&s, region, m, scale)?;
            let rep = SpectrumReport::new(&spec, Some(p.f64("delta", Some(0.0))?), tol, None);
            println!("lambda1 = {:.6}", spec.lambda1());
            run.report("translator_spectrum", &rep, rep.verdict.unwrap_or(true))
        }
        TranslatorCmd::Report => {
            let rep = translator_curvature_report(&s, p.f64("lambda0", Some(lambda0_default))?)?;
            run.report("translator_curvature", &rep, rep.pass)
        }
    }
}
