//! The reproduction bundle: figure data, plots and a list of discrepancies.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Result;
use limitcycle::curve::{linear_grid, relative_error_percent, AmplitudeCurve, CurveMethod};
use limitcycle::format::sig;
use limitcycle::geometry::{
    bundled_curve, continuity_report, curve_distance, domain_audit, fit_cycle, joints, CurveDistance,
    DomainDefect, Joint, Variant, BUNDLED_EPS,
};
use limitcycle::ham::{amplitude_ham, breakpoint_jumps, control_h, solve_orders};
use limitcycle::integrator::limit_cycle;
use limitcycle::irgm::{
    amplitude_flow, amplitude_irgm, calibrate_constant, h_rg_curve, vdp_fit, vdp_fit_jump,
    IrgmPreset, RAYLEIGH_BOUNDARY, RAYLEIGH_C, VDP_BOUNDARY, VDP_TABULATED_C,
};
use limitcycle::oscillators::OscillatorSpec;
use serde::Serialize;

use crate::commands::{amplitude_plot, comparison_rows, curve_polyline, ComparisonRow, APPENDIX_TOL};
use crate::config::{Method, RunConfig, System};
use crate::output::{write_csv, write_json, write_text, Cell};
use crate::svg::{Plot, Series, Style};

/// Grid of the exact VdP peak search.
pub const PEAK_GRID: (f64, f64, f64) = (0.5, 4.0, 0.05);
/// Fit tolerance for the fitted cycle overlays.
pub const REPORT_FIT_TOL: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub boundary_amplitude: f64,
    pub computed_c: f64,
    pub tabulated_c: f64,
    pub difference: f64,
    pub amplitude_at_1_with_tabulated_c: f64,
}

fn calibration(boundary: f64, tabulated: f64) -> Result<Calibration> {
    let computed = calibrate_constant(boundary, 1.0)?;
    Ok(Calibration {
        boundary_amplitude: boundary,
        computed_c: computed,
        tabulated_c: tabulated,
        difference: tabulated - computed,
        amplitude_at_1_with_tabulated_c: amplitude_irgm(1.0, 0.0, tabulated)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBound {
    pub claimed_percent: f64,
    pub max_percent: Option<f64>,
    pub at_eps: Option<f64>,
    pub holds: bool,
}

fn bound(rows: &[ComparisonRow], f: fn(&ComparisonRow) -> Option<f64>, claimed: f64) -> ErrorBound {
    let worst = rows
        .iter()
        .filter_map(|r| f(r).map(|e| (r.eps, e)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    ErrorBound {
        claimed_percent: claimed,
        max_percent: worst.map(|w| w.1),
        at_eps: worst.map(|w| w.0),
        holds: worst.is_some_and(|w| w.1 < claimed),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolicCheck {
    pub quantity: &'static str,
    pub reference: &'static str,
    pub derived: String,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixAudit {
    pub system: System,
    pub domain_defects: Vec<DomainDefect>,
    pub joints: Vec<Joint>,
    pub flagged_joints: Vec<Joint>,
    pub distance_verbatim: Option<CurveDistance>,
    pub distance_clipped: Option<CurveDistance>,
    pub fit_pieces: usize,
    pub fit_distance: Option<CurveDistance>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancies {
    pub rayleigh_calibration: Calibration,
    pub vdp_calibration: Calibration,
    pub vdp_constant_consistent: bool,
    pub ham_bound: ErrorBound,
    pub ham_breakpoint_jumps: Vec<(f64, f64)>,
    pub ham_symbolic: Vec<SymbolicCheck>,
    pub rg_error_at_5: Option<f64>,
    pub vdp_fit_bound: ErrorBound,
    pub vdp_fit_jump_at_3: f64,
    pub vdp_fit_argmax: (f64, f64),
    pub vdp_exact_argmax: Option<(f64, f64)>,
    pub appendix_c: Vec<AppendixAudit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub discrepancies: Discrepancies,
    pub files: Vec<PathBuf>,
}

struct Bundle<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Bundle<'_> {
    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        self.files.push(write_csv(&self.dir.join(name), header, rows)?);
        Ok(())
    }

    fn svg(&mut self, name: &str, plot: &Plot) -> Result<()> {
        self.files.push(write_text(&self.dir.join(name), &plot.to_svg())?);
        Ok(())
    }

    fn rows(&mut self, name: &str, rows: &[ComparisonRow]) -> Result<()> {
        let cells: Vec<_> = rows.iter().map(ComparisonRow::cells).collect();
        self.csv(name, &ComparisonRow::HEADER, &cells)
    }
}

fn default_vdp_grid(cfg: &RunConfig) -> Vec<f64> {
    let mut g = vec![0.1];
    g.extend(cfg.eps_grid.iter().copied().filter(|&e| e > 0.1 && e <= 50.0));
    g
}

pub fn cmd_report(
    cfg: &RunConfig,
    out: &Path,
    rayleigh_grid: Option<Vec<f64>>,
    vdp_grid: Option<Vec<f64>>,
    jobs: Option<usize>,
) -> Result<ReportSummary> {
    cfg.validate()?;
    let ray_grid = rayleigh_grid.unwrap_or_else(|| cfg.eps_grid.clone());
    let vdp_grid = vdp_grid.unwrap_or_else(|| default_vdp_grid(cfg));
    let mut b = Bundle {
        dir: out,
        files: Vec::new(),
    };

    let ray_cfg = RunConfig {
        system: System::Rayleigh,
        irgm_preset: Some(IrgmPreset::Rayleigh),
        ..cfg.clone()
    };
    let ray = comparison_rows(
        System::Rayleigh,
        &ray_grid,
        &[Method::Exact, Method::Ham, Method::Rg],
        &ray_cfg,
        jobs,
    )?;
    let vdp_cfg = RunConfig {
        system: System::Vdp,
        irgm_preset: None,
        ..cfg.clone()
    };
    let vdp = comparison_rows(System::Vdp, &vdp_grid, &[Method::Exact, Method::Fit], &vdp_cfg, jobs)?;

    // fig 1: exact vs HAM, fig 3: exact vs RG, fig 5: exact vs fit
    b.rows("fig1_rayleigh_ham.csv", &ray)?;
    b.svg(
        "fig1_rayleigh_ham.svg",
        &amplitude_plot(
            "Rayleigh: exact and HAM amplitude".into(),
            &ray,
            &[("exact", |r| r.a_exact, Style::Solid), ("ham", |r| r.a_ham, Style::Dashed)],
        ),
    )?;
    b.rows("fig3_rayleigh_rg.csv", &ray)?;
    b.svg(
        "fig3_rayleigh_rg.svg",
        &amplitude_plot(
            "Rayleigh: exact and RG amplitude".into(),
            &ray,
            &[("exact", |r| r.a_exact, Style::Solid), ("rg", |r| r.a_rg, Style::Dashed)],
        ),
    )?;
    b.rows("fig5_vdp_fit.csv", &vdp)?;
    b.svg(
        "fig5_vdp_fit.svg",
        &amplitude_plot(
            "Van der Pol: exact amplitude and piecewise fit".into(),
            &vdp,
            &[("exact", |r| r.a_exact, Style::Solid), ("fit", |r| r.a_irgm, Style::Dashed)],
        ),
    )?;

    // fig 2: HAM control parameter, fig 4 and 6: h_RG curves
    let ham_h: Vec<(f64, f64)> = ray_grid
        .iter()
        .filter_map(|&e| control_h(e, &cfg.ham_control).ok().map(|h| (e, h)))
        .collect();
    b.csv(
        "fig2_ham_control.csv",
        &["eps", "h_ham"],
        &ham_h.iter().map(|&(e, h)| vec![e.into(), h.into()]).collect::<Vec<_>>(),
    )?;
    b.svg(
        "fig2_ham_control.svg",
        &Plot::new("HAM convergence-control parameter", "epsilon", "h").with(Series::new(
            "h_ham",
            ham_h.clone(),
            Style::Solid,
        )),
    )?;

    let ham_targets = |e: f64| amplitude_ham(e, &cfg.ham_control).ok();
    let h_from_ham = h_rg_curve(&ray_grid, RAYLEIGH_C, ham_targets);
    let h_from_exact = h_rg_curve(&ray_grid, RAYLEIGH_C, |e| exact_at(&ray, e));
    h_curve_files(&mut b, "fig4_rayleigh_h_rg", "Rayleigh nonlinear-time exponent", &[
        ("h_rg_ham", &h_from_ham),
        ("h_rg_exact", &h_from_exact),
    ])?;
    let c_vdp = IrgmPreset::VdpConsistent.constant();
    let h_vdp = h_rg_curve(&vdp_grid, c_vdp, |e| exact_at(&vdp, e));
    let h_vdp_tabulated = h_rg_curve(&vdp_grid, VDP_TABULATED_C, |e| exact_at(&vdp, e));
    h_curve_files(&mut b, "fig6_vdp_h_rg", "Van der Pol nonlinear-time exponent", &[
        ("h_rg_consistent_c", &h_vdp),
        ("h_rg_tabulated_c", &h_vdp_tabulated),
    ])?;

    // fig 7: cycles at the bundled epsilon with fitted and bundled curves
    let mut audits = Vec::new();
    for system in [System::Rayleigh, System::Vdp] {
        audits.push(cycle_figure(&mut b, system, cfg)?);
    }

    // amplitude flow toward the limit cycle
    let taus = linear_grid(0.0, 10.0, 0.1);
    let a0s = [0.5, 1.0, 2.0, 3.0, 4.0];
    let mut flow_rows = Vec::new();
    for &t in &taus {
        let mut row = vec![Cell::Num(t)];
        row.extend(a0s.iter().map(|&a0| Cell::Num(amplitude_flow(t, a0))));
        flow_rows.push(row);
    }
    b.csv("flow_amplitude.csv", &["tau", "a0_0.5", "a0_1", "a0_2", "a0_3", "a0_4"], &flow_rows)?;
    let mut flow_plot = Plot::new("Amplitude flow", "tau", "a");
    for &a0 in &a0s {
        flow_plot = flow_plot.with(Series::new(
            format!("a0 = {a0}"),
            taus.iter().map(|&t| (t, amplitude_flow(t, a0))).collect(),
            Style::Solid,
        ));
    }
    b.svg("flow_amplitude.svg", &flow_plot)?;

    let peak = vdp_peak(cfg, jobs)?;
    b.rows("vdp_peak_search.csv", &peak)?;

    let disc = discrepancies(cfg, &ray, &vdp, &peak, audits)?;
    b.files.push(write_json(&out.join("report.json"), &disc)?);
    b.files.push(write_text(&out.join("report.md"), &markdown(&disc))?);
    Ok(ReportSummary {
        discrepancies: disc,
        files: b.files,
    })
}

fn exact_at(rows: &[ComparisonRow], eps: f64) -> Option<f64> {
    rows.iter().find(|r| r.eps == eps).and_then(|r| r.a_exact)
}

fn h_curve_files(b: &mut Bundle<'_>, stem: &str, title: &str, curves: &[(&str, &AmplitudeCurve)]) -> Result<()> {
    let mut eps: Vec<f64> = curves
        .iter()
        .flat_map(|(_, c)| c.points().iter().map(|p| p.0))
        .collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    let rows: Vec<Vec<Cell>> = eps
        .iter()
        .map(|&e| {
            let mut row = vec![Cell::Num(e)];
            row.extend(curves.iter().map(|(_, c)| Cell::from(c.value_at(e))));
            row
        })
        .collect();
    let mut header = vec!["eps"];
    header.extend(curves.iter().map(|(n, _)| *n));
    b.csv(&format!("{stem}.csv"), &header, &rows)?;
    let mut plot = Plot::new(title, "epsilon", "h_RG");
    for (name, c) in curves {
        plot = plot.with(Series::new(*name, c.points().to_vec(), Style::Solid));
    }
    b.svg(&format!("{stem}.svg"), &plot)
}

fn cycle_figure(b: &mut Bundle<'_>, system: System, cfg: &RunConfig) -> Result<AppendixAudit> {
    let spec = OscillatorSpec::new(system.kind(), BUNDLED_EPS)?;
    let cycle = limit_cycle(&spec, &cfg.integrator)?;
    let verbatim = bundled_curve(&system.kind(), Variant::Verbatim)?;
    let clipped = verbatim.clipped()?;
    let fit = fit_cycle(&cycle, REPORT_FIT_TOL, 40)?;

    let stem = format!("fig7_{system}_cycle");
    let exact_pts: Vec<_> = cycle.samples.iter().map(|p| (p.y, p.z)).collect();
    b.csv(
        &format!("{stem}.csv"),
        &["y", "z"],
        &exact_pts.iter().map(|&(y, z)| vec![y.into(), z.into()]).collect::<Vec<_>>(),
    )?;
    b.files.push(write_text(&b.dir.join(format!("fig7_{system}_fit.toml")), &fit.to_toml_string()?)?);
    let mut plot = Plot::new(format!("{system} limit cycle, eps = 5"), "y", "z")
        .with(Series::new("exact", exact_pts, Style::Solid))
        .with(Series::new("bundled", curve_polyline(&verbatim), Style::Dashed))
        .with(Series::new("fit", curve_polyline(&fit), Style::Dashed));
    plot.equal_aspect = true;
    b.svg(&format!("{stem}.svg"), &plot)?;

    Ok(AppendixAudit {
        system,
        domain_defects: domain_audit(&verbatim),
        joints: joints(&verbatim, APPENDIX_TOL),
        flagged_joints: continuity_report(&verbatim, APPENDIX_TOL),
        distance_verbatim: curve_distance(&verbatim, &cycle).ok(),
        distance_clipped: curve_distance(&clipped, &cycle).ok(),
        fit_pieces: fit.pieces().len(),
        fit_distance: curve_distance(&fit, &cycle).ok(),
    })
}

fn vdp_peak(cfg: &RunConfig, jobs: Option<usize>) -> Result<Vec<ComparisonRow>> {
    let (lo, hi, step) = PEAK_GRID;
    let grid = linear_grid(lo, hi, step);
    let vdp_cfg = RunConfig {
        system: System::Vdp,
        ..cfg.clone()
    };
    comparison_rows(System::Vdp, &grid, &[Method::Exact], &vdp_cfg, jobs)
}

fn discrepancies(
    cfg: &RunConfig,
    ray: &[ComparisonRow],
    vdp: &[ComparisonRow],
    peak: &[ComparisonRow],
    appendix_c: Vec<AppendixAudit>,
) -> Result<Discrepancies> {
    let rayleigh_calibration = calibration(RAYLEIGH_BOUNDARY, RAYLEIGH_C)?;
    let vdp_calibration = calibration(VDP_BOUNDARY, VDP_TABULATED_C)?;
    let vdp_constant_consistent = vdp_calibration.difference.abs() <= 2e-4;

    let orders = solve_orders(1)?;
    let ham_symbolic = vec![
        SymbolicCheck {
            quantity: "omega_1",
            reference: "-1/16 h e^2",
            derived: orders[1].omega.to_string(),
            matches: orders[1].omega == limitcycle::trigpoly::Poly2::term(-1, 16, 1, 2),
        },
        SymbolicCheck {
            quantity: "a_1",
            reference: "1/8 h e^2",
            derived: orders[1].amp.to_string(),
            matches: orders[1].amp == limitcycle::trigpoly::Poly2::term(1, 8, 1, 2),
        },
    ];

    let fit_grid = linear_grid(0.5, 4.0, 0.01);
    let fit_curve = AmplitudeCurve::from_fn(CurveMethod::Fit, &fit_grid, |e| vdp_fit(e).unwrap_or(f64::NAN));
    let vdp_fit_argmax = fit_curve.argmax().unwrap_or((f64::NAN, f64::NAN));
    let exact_peak = AmplitudeCurve::new(
        CurveMethod::Exact,
        peak.iter().filter_map(|r| r.a_exact.map(|a| (r.eps, a))).collect(),
    );

    let rg_error_at_5 = ray
        .iter()
        .find(|r| r.eps == 5.0)
        .and_then(|r| r.rel_err_rg)
        .or_else(|| {
            let exact = limitcycle::integrator::exact_amplitude(
                &System::Rayleigh.kind(),
                5.0,
                &cfg.integrator,
            )
            .ok()?;
            Some(relative_error_percent(limitcycle::rgflow::a_rg(5.0).ok()?, exact))
        });

    Ok(Discrepancies {
        rayleigh_calibration,
        vdp_calibration,
        vdp_constant_consistent,
        ham_bound: bound(ray, |r| r.rel_err_ham, 1.0),
        ham_breakpoint_jumps: breakpoint_jumps(&cfg.ham_control)?,
        ham_symbolic,
        rg_error_at_5,
        vdp_fit_bound: bound(vdp, |r| r.rel_err_irgm, 0.05),
        vdp_fit_jump_at_3: vdp_fit_jump().2,
        vdp_fit_argmax,
        vdp_exact_argmax: exact_peak.argmax(),
        appendix_c,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| sig(v, 6))
}

fn markdown(d: &Discrepancies) -> String {
    let mut s = String::from("# Reproduction report\n\n");
    let yes_no = |b: bool| if b { "yes" } else { "no" };

    let _ = writeln!(s, "## Integration constants\n");
    for (name, c) in [("Rayleigh", &d.rayleigh_calibration), ("Van der Pol", &d.vdp_calibration)] {
        let _ = writeln!(
            s,
            "- {name}: boundary amplitude {} at eps = 1 gives C = {}; tabulated C = {} (difference {}); \
             the tabulated C gives a(1) = {}.",
            sig(c.boundary_amplitude, 6),
            sig(c.computed_c, 6),
            sig(c.tabulated_c, 6),
            sig(c.difference, 3),
            sig(c.amplitude_at_1_with_tabulated_c, 7),
        );
    }
    let _ = writeln!(
        s,
        "- Van der Pol tabulated constant consistent with its boundary amplitude: {}.\n",
        yes_no(d.vdp_constant_consistent)
    );

    let _ = writeln!(s, "## HAM\n");
    let _ = writeln!(
        s,
        "- Max relative error vs exact: {}% at eps = {} (claimed < 1%: {}).",
        opt(d.ham_bound.max_percent),
        opt(d.ham_bound.at_eps),
        yes_no(d.ham_bound.holds)
    );
    for (e, j) in &d.ham_breakpoint_jumps {
        let _ = writeln!(s, "- Amplitude jump at breakpoint eps = {}: {}.", sig(*e, 4), sig(*j, 3));
    }
    for c in &d.ham_symbolic {
        let _ = writeln!(
            s,
            "- {}: reference `{}`, derived `{}`, match: {}.",
            c.quantity,
            c.reference,
            c.derived,
            yes_no(c.matches)
        );
    }

    let _ = writeln!(s, "\n## RG\n");
    let _ = writeln!(s, "- Relative error of the RG amplitude at eps = 5: {}%.\n", opt(d.rg_error_at_5));

    let _ = writeln!(s, "## Van der Pol fit\n");
    let _ = writeln!(
        s,
        "- Max relative error vs exact: {}% at eps = {} (claimed < 0.05%: {}).",
        opt(d.vdp_fit_bound.max_percent),
        opt(d.vdp_fit_bound.at_eps),
        yes_no(d.vdp_fit_bound.holds)
    );
    let _ = writeln!(s, "- Jump between the fit branches at eps = 3: {}.", sig(d.vdp_fit_jump_at_3, 3));
    let _ = writeln!(
        s,
        "- Fit maximum: a = {} at eps = {}.",
        sig(d.vdp_fit_argmax.1, 7),
        sig(d.vdp_fit_argmax.0, 4)
    );
    if let Some((e, a)) = d.vdp_exact_argmax {
        let _ = writeln!(
            s,
            "- Exact maximum on the 0.05 grid over [0.5, 4]: a = {} at eps = {}.",
            sig(a, 7),
            sig(e, 4)
        );
    }

    let _ = writeln!(s, "\n## Bundled piecewise curves (eps = 5)\n");
    for a in &d.appendix_c {
        let _ = writeln!(s, "### {}\n", a.system);
        for def in &a.domain_defects {
            let (lo, hi) = (sig(def.domain[0], 5), sig(def.domain[1], 5));
            let _ = match def.real {
                Some(r) => writeln!(
                    s,
                    "- Piece {} on ({lo}, {hi}] is real only on [{}, {}].",
                    def.piece,
                    sig(r[0], 5),
                    sig(r[1], 5)
                ),
                None => writeln!(s, "- Piece {} on ({lo}, {hi}] is imaginary on its whole domain.", def.piece),
            };
        }
        for j in &a.joints {
            let _ = writeln!(
                s,
                "- Joint {} at y = {}: gap {} ({:?}).",
                j.index,
                sig(j.y, 5),
                opt(j.gap),
                j.status
            );
        }
        let dist = |d: &Option<CurveDistance>| d.map_or_else(|| "n/a".into(), |d| sig(d.max, 4));
        let _ = writeln!(
            s,
            "- Max distance to the exact cycle: verbatim {}, clipped {}; automatic fit ({} pieces) {}.\n",
            dist(&a.distance_verbatim),
            dist(&a.distance_clipped),
            a.fit_pieces,
            dist(&a.fit_distance)
        );
    }
    s
}
