//! The subcommands, as plain functions returning their artifacts.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use limitcycle::curve::{relative_error_percent, AmplitudeCurve};
use limitcycle::format::sig12;
use limitcycle::geometry::{
    bundled_curve, continuity_report, curve_distance, domain_audit, fit_cycle, joints, CurveDistance,
    DomainDefect, Joint, PiecewiseCurve, Variant, BUNDLED_EPS,
};
use limitcycle::ham::{amplitude_ham, control_h};
use limitcycle::integrator::{exact_amplitude, limit_cycle, CycleRecord};
use limitcycle::irgm::{amplitude_irgm, h_rg_curve, vdp_fit};
use limitcycle::oscillators::OscillatorSpec;
use limitcycle::rgflow::a_rg;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Method, RunConfig, System};
use crate::output::{eps_tag, write_csv, write_json, write_text, Cell};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeRecord {
    pub system: System,
    pub eps: f64,
    pub method: Method,
    pub amplitude: f64,
}

/// Amplitude of `system` at `eps` by one method.
pub fn amplitude(system: System, eps: f64, method: Method, cfg: &RunConfig) -> Result<f64> {
    ensure!(eps > 0.0 && eps.is_finite(), "epsilon must be positive, got {eps}");
    Ok(match method {
        Method::Exact => exact_amplitude(&system.kind(), eps, &cfg.integrator)?,
        Method::Ham => {
            ensure!(
                system == System::Rayleigh,
                "the HAM control table is calibrated for rayleigh only"
            );
            amplitude_ham(eps, &cfg.ham_control)?
        }
        Method::Rg => a_rg(eps)?,
        Method::Irgm => match system {
            System::Vdp if cfg.irgm_h.is_none() && eps != 1.0 => vdp_fit(eps)?,
            _ => {
                let h = match cfg.irgm_h {
                    Some(h) => h,
                    None if eps == 1.0 => 0.0,
                    None => bail!("irgm away from eps = 1 needs --h-rg (or irgm_h in the config)"),
                };
                amplitude_irgm(eps, h, cfg.preset().constant())?
            }
        },
        Method::Fit => {
            ensure!(system == System::Vdp, "the piecewise fit exists for vdp only");
            vdp_fit(eps)?
        }
    })
}

pub fn cmd_amplitude(system: System, eps: f64, method: Method, cfg: &RunConfig) -> Result<AmplitudeRecord> {
    Ok(AmplitudeRecord {
        system,
        eps,
        method,
        amplitude: amplitude(system, eps, method, cfg)?,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub eps: f64,
    pub a_exact: Option<f64>,
    pub a_ham: Option<f64>,
    pub a_rg: Option<f64>,
    /// IRGM closed form, or the piecewise fit for VdP.
    pub a_irgm: Option<f64>,
    pub rel_err_ham: Option<f64>,
    pub rel_err_rg: Option<f64>,
    pub rel_err_irgm: Option<f64>,
    pub error: Option<String>,
}

impl ComparisonRow {
    pub const HEADER: [&'static str; 9] = [
        "eps",
        "a_exact",
        "a_ham",
        "a_rg",
        "a_irgm",
        "rel_err_ham",
        "rel_err_rg",
        "rel_err_irgm",
        "error",
    ];

    pub fn cells(&self) -> Vec<Cell> {
        vec![
            self.eps.into(),
            self.a_exact.into(),
            self.a_ham.into(),
            self.a_rg.into(),
            self.a_irgm.into(),
            self.rel_err_ham.into(),
            self.rel_err_rg.into(),
            self.rel_err_irgm.into(),
            self.error.clone().map_or(Cell::Empty, Cell::Text),
        ]
    }
}

fn comparison_row(system: System, eps: f64, methods: &[Method], cfg: &RunConfig) -> ComparisonRow {
    let mut row = ComparisonRow {
        eps,
        ..Default::default()
    };
    let mut errors = Vec::new();
    let mut run = |m: Method| match amplitude(system, eps, m, cfg) {
        Ok(a) => Some(a),
        Err(e) => {
            errors.push(format!("{m}: {e:#}"));
            None
        }
    };
    let has = |m: Method| methods.contains(&m);
    if has(Method::Exact) {
        row.a_exact = run(Method::Exact);
    }
    if has(Method::Ham) {
        row.a_ham = run(Method::Ham);
    }
    if has(Method::Rg) {
        row.a_rg = run(Method::Rg);
    }
    if has(Method::Irgm) {
        row.a_irgm = run(Method::Irgm);
    } else if has(Method::Fit) {
        row.a_irgm = run(Method::Fit);
    }
    if let Some(exact) = row.a_exact {
        let rel = |a: Option<f64>| a.map(|a| relative_error_percent(a, exact));
        row.rel_err_ham = rel(row.a_ham);
        row.rel_err_rg = rel(row.a_rg);
        row.rel_err_irgm = rel(row.a_irgm);
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Rows for every grid point, computed on up to `jobs` threads, in grid order.
pub fn comparison_rows(
    system: System,
    grid: &[f64],
    methods: &[Method],
    cfg: &RunConfig,
    jobs: Option<usize>,
) -> Result<Vec<ComparisonRow>> {
    let work = || {
        grid.par_iter()
            .map(|&e| comparison_row(system, e, methods, cfg))
            .collect::<Vec<_>>()
    };
    match jobs.or(cfg.jobs) {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(work)),
        None => Ok(work()),
    }
}

pub type Column = fn(&ComparisonRow) -> Option<f64>;

/// One series per column with at least one value.
pub fn amplitude_plot(title: String, rows: &[ComparisonRow], columns: &[(&str, Column, Style)]) -> Plot {
    let mut plot = Plot::new(title, "epsilon", "amplitude");
    for &(name, f, style) in columns {
        let pts: Vec<_> = rows.iter().map(|r| (r.eps, f(r).unwrap_or(f64::NAN))).collect();
        if pts.iter().any(|p| p.1.is_finite()) {
            plot = plot.with(Series::new(name, pts, style));
        }
    }
    plot
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub system: System,
    pub points: usize,
    pub failed_points: usize,
    pub max_rel_err_ham: Option<f64>,
    pub max_rel_err_rg: Option<f64>,
    pub max_rel_err_irgm: Option<f64>,
    pub files: Vec<PathBuf>,
}

fn max_of(rows: &[ComparisonRow], f: impl Fn(&ComparisonRow) -> Option<f64>) -> Option<f64> {
    rows.iter().filter_map(f).reduce(f64::max)
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path, jobs: Option<usize>) -> Result<SweepSummary> {
    cfg.validate()?;
    let system = cfg.system;
    let rows = comparison_rows(system, &cfg.eps_grid, &cfg.methods, cfg, jobs)?;
    let mut files = Vec::new();
    let cells: Vec<_> = rows.iter().map(ComparisonRow::cells).collect();
    files.push(write_csv(
        &out.join(format!("sweep_{system}.csv")),
        &ComparisonRow::HEADER,
        &cells,
    )?);

    let irgm_label = if system == System::Vdp && !cfg.methods.contains(&Method::Irgm) {
        "fit"
    } else {
        "irgm"
    };
    let plot = amplitude_plot(
        format!("{system} limit-cycle amplitude"),
        &rows,
        &[
            ("exact", |r| r.a_exact, Style::Solid),
            ("ham", |r| r.a_ham, Style::Dashed),
            ("rg", |r| r.a_rg, Style::Dashed),
            (irgm_label, |r| r.a_irgm, Style::Dashed),
        ],
    );
    files.push(write_text(&out.join(format!("sweep_{system}.svg")), &plot.to_svg())?);

    // control-parameter curves
    let exact = AmplitudeCurve::new(
        limitcycle::curve::CurveMethod::Exact,
        rows.iter().filter_map(|r| r.a_exact.map(|a| (r.eps, a))).collect(),
    );
    if !exact.is_empty() {
        let c = cfg.preset().constant();
        let h_rg = h_rg_curve(&cfg.eps_grid, c, |e| exact.value_at(e));
        let mut rows_h = Vec::new();
        let (mut ham_pts, mut rg_pts) = (Vec::new(), Vec::new());
        for &e in &cfg.eps_grid {
            let h_ham = (system == System::Rayleigh)
                .then(|| control_h(e, &cfg.ham_control).ok())
                .flatten();
            let h = h_rg.value_at(e);
            ham_pts.push((e, h_ham.unwrap_or(f64::NAN)));
            rg_pts.push((e, h.unwrap_or(f64::NAN)));
            rows_h.push(vec![e.into(), h_ham.into(), h.into()]);
        }
        files.push(write_csv(
            &out.join(format!("control_{system}.csv")),
            &["eps", "h_ham", "h_rg"],
            &rows_h,
        )?);
        let mut plot = Plot::new(format!("{system} control parameters"), "epsilon", "h");
        for (name, pts) in [("h_ham", ham_pts), ("h_rg", rg_pts)] {
            if pts.iter().any(|p| p.1.is_finite()) {
                plot = plot.with(Series::new(name, pts, Style::Solid));
            }
        }
        files.push(write_text(&out.join(format!("control_{system}.svg")), &plot.to_svg())?);
    }

    Ok(SweepSummary {
        system,
        points: rows.len(),
        failed_points: rows.iter().filter(|r| r.error.is_some()).count(),
        max_rel_err_ham: max_of(&rows, |r| r.rel_err_ham),
        max_rel_err_rg: max_of(&rows, |r| r.rel_err_rg),
        max_rel_err_irgm: max_of(&rows, |r| r.rel_err_irgm),
        files,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveScore {
    pub label: String,
    pub pieces: usize,
    pub distance: Option<CurveDistance>,
    /// Every interior joint.
    pub joints: Vec<Joint>,
    /// Joints with a gap above tolerance or a non-real side.
    pub flagged_joints: Vec<Joint>,
    pub domain_defects: Vec<DomainDefect>,
}

fn score(label: &str, curve: &PiecewiseCurve, cycle: &CycleRecord, tol: f64) -> CurveScore {
    CurveScore {
        label: label.to_string(),
        pieces: curve.pieces().len(),
        distance: curve_distance(curve, cycle).ok(),
        joints: joints(curve, tol),
        flagged_joints: continuity_report(curve, tol),
        domain_defects: domain_audit(curve),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleSummary {
    pub system: System,
    pub eps: f64,
    pub amplitude: f64,
    pub period: f64,
    pub iterations: usize,
    pub curves: Vec<CurveScore>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CycleOptions {
    pub fit_tol: Option<f64>,
    pub max_pieces: usize,
    pub appendix_c: bool,
}

/// Continuity tolerance used for the bundled tables.
pub const APPENDIX_TOL: f64 = 0.1;

pub fn cmd_cycle(system: System, eps: f64, opts: CycleOptions, cfg: &RunConfig, out: &Path) -> Result<CycleSummary> {
    let spec = OscillatorSpec::new(system.kind(), eps)?;
    let cycle = limit_cycle(&spec, &cfg.integrator)?;
    let tag = format!("{system}_eps{}", eps_tag(eps));
    let mut files = Vec::new();

    let mut buf = Vec::new();
    cycle.write_csv(&mut buf)?;
    files.push(write_text(
        &out.join(format!("cycle_{tag}.csv")),
        std::str::from_utf8(&buf)?,
    )?);

    let mut plot = Plot::new(format!("{system} limit cycle, eps = {}", sig12(eps)), "y", "z");
    plot.equal_aspect = true;
    plot = plot.with(Series::new(
        "exact",
        cycle.samples.iter().map(|p| (p.y, p.z)).collect(),
        Style::Solid,
    ));
    let mut curves = Vec::new();

    if let Some(tol) = opts.fit_tol {
        ensure!(tol > 0.0, "fit tolerance must be positive");
        let fit = fit_cycle(&cycle, tol, opts.max_pieces)?;
        files.push(write_text(
            &out.join(format!("fit_{tag}.toml")),
            &fit.to_toml_string()?,
        )?);
        plot = plot.with(Series::new("fit", curve_polyline(&fit), Style::Dashed));
        curves.push(score("fit", &fit, &cycle, 2.0 * tol));
    }
    if opts.appendix_c {
        if (eps - BUNDLED_EPS).abs() > 1e-12 {
            eprintln!(
                "note: the bundled curves were drawn for eps = {}, comparing against eps = {}",
                sig12(BUNDLED_EPS),
                sig12(eps)
            );
        }
        for (label, variant) in [("appendix_c", Variant::Verbatim), ("appendix_c_clipped", Variant::Clipped)] {
            let curve = bundled_curve(&system.kind(), variant)?;
            if variant == Variant::Verbatim {
                plot = plot.with(Series::new(label, curve_polyline(&curve), Style::Dashed));
            }
            curves.push(score(label, &curve, &cycle, APPENDIX_TOL));
        }
    }
    files.push(write_text(&out.join(format!("cycle_{tag}.svg")), &plot.to_svg())?);

    let summary = CycleSummary {
        system,
        eps,
        amplitude: cycle.amplitude,
        period: cycle.period,
        iterations: cycle.iterations,
        curves,
        files,
    };
    if !summary.curves.is_empty() {
        let path = out.join(format!("curves_{tag}.json"));
        write_json(&path, &summary.curves)?;
    }
    Ok(summary)
}

/// Upper half then lower half, with a break between the halves.
pub fn curve_polyline(curve: &PiecewiseCurve) -> Vec<(f64, f64)> {
    let mut upper = Vec::new();
    for p in curve.pieces() {
        let [lo, hi] = p.domain;
        for i in 1..=100 {
            let y = lo + (hi - lo) * f64::from(i) / 100.0;
            upper.push((y, p.formula(y).unwrap_or(f64::NAN)));
        }
    }
    if curve.symmetric() {
        let lower: Vec<_> = upper.iter().map(|&(y, z)| (-y, -z)).collect();
        upper.push((f64::NAN, f64::NAN));
        upper.extend(lower);
    }
    upper
}

/// Errors that signal a failed computation rather than bad input.
pub fn is_convergence_failure(err: &anyhow::Error) -> bool {
    use limitcycle::integrator::IntegratorError;
    use limitcycle::rgflow::RgError;
    err.chain().any(|e| {
        if let Some(ie) = e.downcast_ref::<IntegratorError>() {
            return ie.is_convergence_failure();
        }
        matches!(
            e.downcast_ref::<RgError>(),
            Some(RgError::FlowNotSettled { .. } | RgError::FlowFailed(_) | RgError::Root(_))
        )
    })
}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if is_convergence_failure(err) {
        2
    } else {
        1
    }
}
