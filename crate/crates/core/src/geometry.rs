//! Piecewise arc/segment curves in the `(y, z)` phase plane.
//!
//! A [`PiecewiseCurve`] describes the upper half of a cycle as `z(y)` over
//! contiguous half-open domains `(lo, hi]`; when `symmetric` is set the lower
//! half is the image under `(y, z) -> (-y, -z)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::CycleRecord;
use crate::oscillators::SystemKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("curve has no pieces")]
    NoPieces,
    #[error("piece {piece}: empty domain ({lo}, {hi}]")]
    EmptyDomain { piece: usize, lo: f64, hi: f64 },
    #[error("piece {piece}: radius squared must be positive, got {radius_sq}")]
    BadRadius { piece: usize, radius_sq: f64 },
    #[error("pieces {piece} and {next} are not contiguous ({hi} vs {lo})", next = piece + 1)]
    NotContiguous { piece: usize, hi: f64, lo: f64 },
    #[error("y = {0} lies outside every piece domain")]
    OutsideDomain(f64),
    #[error("y = {y} is outside the real domain of arc piece {piece}")]
    NonReal { y: f64, piece: usize },
    #[error("curve has no evaluable sample points")]
    NoEvaluablePoints,
    #[error("cycle did not converge")]
    CycleNotConverged,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("upper half is not a graph over y (y decreases at sample {0})")]
    NonSimpleUpperHalf(usize),
    #[error("fit needs more than {0} pieces")]
    TooManyPieces(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("no bundled curve for {0}")]
    NoBundledCurve(String),
    #[error("curve file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceKind {
    /// `(y − Y0)² + (z − Z0)² = r²`, one branch. `center` is `[Y0, Z0]`.
    Arc {
        center: [f64; 2],
        radius_sq: f64,
        branch: Branch,
    },
    /// `z = slope·y + intercept`.
    Segment { slope: f64, intercept: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePiece {
    #[serde(flatten)]
    pub kind: PieceKind,
    /// Half-open `(lo, hi]`.
    pub domain: [f64; 2],
}

impl CurvePiece {
    pub fn arc(center: [f64; 2], radius_sq: f64, branch: Branch, lo: f64, hi: f64) -> Self {
        Self {
            kind: PieceKind::Arc {
                center,
                radius_sq,
                branch,
            },
            domain: [lo, hi],
        }
    }

    pub fn segment(slope: f64, intercept: f64, lo: f64, hi: f64) -> Self {
        Self {
            kind: PieceKind::Segment { slope, intercept },
            domain: [lo, hi],
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.domain[0] < y && y <= self.domain[1]
    }

    /// Formula value at `y`, ignoring the domain; `None` where an arc is
    /// imaginary.
    pub fn formula(&self, y: f64) -> Option<f64> {
        match self.kind {
            PieceKind::Segment { slope, intercept } => Some(slope * y + intercept),
            PieceKind::Arc {
                center,
                radius_sq,
                branch,
            } => {
                let d = y - center[0];
                let disc = radius_sq - d * d;
                (disc >= 0.0).then(|| center[1] + branch.sign() * disc.sqrt())
            }
        }
    }

    /// Part of the domain where the formula is real, as `[lo, hi]`.
    pub fn real_domain(&self) -> Option<[f64; 2]> {
        let [lo, hi] = self.domain;
        match self.kind {
            PieceKind::Segment { .. } => Some([lo, hi]),
            PieceKind::Arc {
                center, radius_sq, ..
            } => {
                let r = radius_sq.sqrt();
                let (a, b) = (lo.max(center[0] - r), hi.min(center[0] + r));
                (a <= b).then_some([a, b])
            }
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self.kind {
            PieceKind::Arc { radius_sq, .. } => Some(radius_sq.sqrt()),
            PieceKind::Segment { .. } => None,
        }
    }
}

/// Upper-half curve built from contiguous pieces ordered by `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveFile", into = "CurveFile")]
pub struct PiecewiseCurve {
    pieces: Vec<CurvePiece>,
    symmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    symmetric: bool,
    pieces: Vec<CurvePiece>,
}

impl TryFrom<CurveFile> for PiecewiseCurve {
    type Error = GeometryError;

    fn try_from(f: CurveFile) -> Result<Self, Self::Error> {
        PiecewiseCurve::new(f.pieces, f.symmetric)
    }
}

impl From<PiecewiseCurve> for CurveFile {
    fn from(c: PiecewiseCurve) -> Self {
        CurveFile {
            symmetric: c.symmetric,
            pieces: c.pieces,
        }
    }
}

const JOINT_TOL: f64 = 1e-12;

impl PiecewiseCurve {
    /// Checks domains and contiguity. Arcs whose domain is not fully real
    /// are accepted; see [`domain_audit`].
    pub fn new(pieces: Vec<CurvePiece>, symmetric: bool) -> Result<Self, GeometryError> {
        if pieces.is_empty() {
            return Err(GeometryError::NoPieces);
        }
        for (i, p) in pieces.iter().enumerate() {
            let [lo, hi] = p.domain;
            if !(lo < hi) {
                return Err(GeometryError::EmptyDomain { piece: i, lo, hi });
            }
            if let PieceKind::Arc { radius_sq, .. } = p.kind {
                if !(radius_sq > 0.0 && radius_sq.is_finite()) {
                    return Err(GeometryError::BadRadius { piece: i, radius_sq });
                }
            }
        }
        for (i, w) in pieces.windows(2).enumerate() {
            let (hi, lo) = (w[0].domain[1], w[1].domain[0]);
            if (hi - lo).abs() > JOINT_TOL * hi.abs().max(1.0) {
                return Err(GeometryError::NotContiguous { piece: i, hi, lo });
            }
        }
        Ok(Self { pieces, symmetric })
    }

    pub fn pieces(&self) -> &[CurvePiece] {
        &self.pieces
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn domain(&self) -> [f64; 2] {
        [self.pieces[0].domain[0], self.pieces[self.pieces.len() - 1].domain[1]]
    }

    pub fn from_toml_str(s: &str) -> Result<Self, GeometryError> {
        toml::from_str(s).map_err(|e| GeometryError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String, GeometryError> {
        toml::to_string(self).map_err(|e| GeometryError::Parse(e.to_string()))
    }

    /// Every piece domain intersected with its real interval; pieces with no
    /// real part are dropped.
    pub fn clipped(&self) -> Result<Self, GeometryError> {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                p.real_domain().filter(|d| d[0] < d[1]).map(|d| CurvePiece {
                    kind: p.kind,
                    domain: d,
                })
            })
            .collect();
        Self::new(pieces, self.symmetric)
    }

    /// Lower half `z(y) = −upper(−y)`; requires a symmetric curve.
    pub fn eval_lower(&self, y: f64) -> Result<f64, GeometryError> {
        eval_piecewise(self, -y).map(|z| -z)
    }

    /// `per_piece` evenly spaced evaluable points per piece (upper half, then
    /// the reflected lower half when symmetric).
    pub fn sample(&self, per_piece: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let [lo, hi] = p.domain;
            for i in 1..=per_piece {
                let y = lo + (hi - lo) * i as f64 / per_piece as f64;
                if let Some(z) = p.formula(y) {
                    out.push((y, z));
                }
            }
        }
        if self.symmetric {
            let lower: Vec<_> = out.iter().map(|&(y, z)| (-y, -z)).collect();
            out.extend(lower);
        }
        out
    }
}

/// Evaluates the piece whose domain contains `y`.
pub fn eval_piecewise(curve: &PiecewiseCurve, y: f64) -> Result<f64, GeometryError> {
    let (i, p) = curve
        .pieces
        .iter()
        .enumerate()
        .find(|(_, p)| p.contains(y))
        .ok_or(GeometryError::OutsideDomain(y))?;
    p.formula(y).ok_or(GeometryError::NonReal { y, piece: i })
}

/// A piece whose domain reaches beyond its real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainDefect {
    pub piece: usize,
    pub domain: [f64; 2],
    /// `None` when the piece is imaginary everywhere on its domain.
    pub real: Option<[f64; 2]>,
}

pub fn domain_audit(curve: &PiecewiseCurve) -> Vec<DomainDefect> {
    curve
        .pieces
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let real = p.real_domain();
            (real != Some(p.domain)).then_some(DomainDefect {
                piece: i,
                domain: p.domain,
                real,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointStatus {
    Ok,
    GapAboveTol,
    /// At least one neighbour is imaginary at the joint.
    NonReal,
}

/// Both neighbours evaluated at an interior joint (joint `i` sits between
/// pieces `i` and `i + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Joint {
    pub index: usize,
    pub y: f64,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub gap: Option<f64>,
    pub status: JointStatus,
}

pub fn joints(curve: &PiecewiseCurve, tol: f64) -> Vec<Joint> {
    curve
        .pieces
        .windows(2)
        .enumerate()
        .map(|(index, w)| {
            let y = w[0].domain[1];
            let (left, right) = (w[0].formula(y), w[1].formula(y));
            let gap = left.zip(right).map(|(l, r)| (l - r).abs());
            let status = match gap {
                None => JointStatus::NonReal,
                Some(g) if g > tol => JointStatus::GapAboveTol,
                Some(_) => JointStatus::Ok,
            };
            Joint {
                index,
                y,
                left,
                right,
                gap,
                status,
            }
        })
        .collect()
}

/// Joints with a gap above `tol` or a non-real side.
pub fn continuity_report(curve: &PiecewiseCurve, tol: f64) -> Vec<Joint> {
    joints(curve, tol)
        .into_iter()
        .filter(|j| j.status != JointStatus::Ok)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveDistance {
    pub max: f64,
    pub mean: f64,
}

const DISTANCE_SAMPLES: usize = 200;

/// Distance from curve samples to the closed polyline of the cycle.
pub fn curve_distance(
    curve: &PiecewiseCurve,
    cycle: &CycleRecord,
) -> Result<CurveDistance, GeometryError> {
    if !cycle.converged {
        return Err(GeometryError::CycleNotConverged);
    }
    let poly: Vec<_> = cycle.samples.iter().map(|p| (p.y, p.z)).collect();
    distance_to_polyline(curve, &poly)
}

/// Like [`curve_distance`] against an arbitrary closed polyline.
pub fn distance_to_polyline(
    curve: &PiecewiseCurve,
    poly: &[(f64, f64)],
) -> Result<CurveDistance, GeometryError> {
    if poly.len() < 2 {
        return Err(GeometryError::TooFewSamples {
            needed: 2,
            got: poly.len(),
        });
    }
    let pts = curve.sample(DISTANCE_SAMPLES);
    if pts.is_empty() {
        return Err(GeometryError::NoEvaluablePoints);
    }
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for &p in &pts {
        let d = (0..poly.len())
            .map(|i| point_segment(p, poly[i], poly[(i + 1) % poly.len()]))
            .fold(f64::INFINITY, f64::min);
        max = max.max(d);
        sum += d;
    }
    Ok(CurveDistance {
        max,
        mean: sum / pts.len() as f64,
    })
}

fn point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Radius above which a window is fitted by a straight segment.
pub const LINE_RADIUS: f64 = 1e3;

/// Greedy arc/segment fit of the cycle's upper half (from its leftmost to
/// its rightmost point, where `z ≥ 0` in the flow direction).
pub fn fit_cycle(
    cycle: &CycleRecord,
    tol: f64,
    max_pieces: usize,
) -> Result<PiecewiseCurve, GeometryError> {
    if !cycle.converged {
        return Err(GeometryError::CycleNotConverged);
    }
    let upper = upper_half(cycle)?;
    let (lo, hi) = (cycle.y_min(), cycle.y_max());
    let symmetric = (lo + hi).abs() <= 1e-6 * hi.abs().max(1.0);
    fit_graph(&upper, tol, max_pieces, symmetric)
}

/// Samples from the leftmost point of the cycle to its end, which is the
/// rightmost point.
pub fn upper_half(cycle: &CycleRecord) -> Result<Vec<(f64, f64)>, GeometryError> {
    let s = &cycle.samples;
    if s.len() < 3 {
        return Err(GeometryError::TooFewSamples {
            needed: 3,
            got: s.len(),
        });
    }
    let start = s
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.y.total_cmp(&b.1.y))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(s.len() - start);
    for (i, p) in s.iter().enumerate().skip(start) {
        match out.last() {
            Some(&(y, _)) if p.y < y => return Err(GeometryError::NonSimpleUpperHalf(i)),
            Some(&(y, _)) if p.y == y => {}
            _ => out.push((p.y, p.z)),
        }
    }
    Ok(out)
}

/// Greedy fit of points with strictly increasing `y`.
pub fn fit_graph(
    pts: &[(f64, f64)],
    tol: f64,
    max_pieces: usize,
    symmetric: bool,
) -> Result<PiecewiseCurve, GeometryError> {
    if !(tol > 0.0) {
        return Err(GeometryError::BadTolerance(tol));
    }
    if pts.len() < 2 {
        return Err(GeometryError::TooFewSamples {
            needed: 2,
            got: pts.len(),
        });
    }
    if let Some(i) = pts.windows(2).position(|w| w[1].0 <= w[0].0) {
        return Err(GeometryError::NonSimpleUpperHalf(i + 1));
    }
    let n = pts.len();
    let mut pieces = Vec::new();
    let mut s = 0;
    while s < n - 1 {
        if pieces.len() == max_pieces {
            return Err(GeometryError::TooManyPieces(max_pieces));
        }
        let fits = |e: usize| fit_window(&pts[s..=e], tol);
        // gallop, then bisect on the last window that fits
        let mut good = (s + 1).max((s + 2).min(n - 1));
        let mut best = fits(good).unwrap_or_else(|| chord(&pts[s..=good]));
        let mut bad = None;
        let mut step = 2;
        while bad.is_none() && good < n - 1 {
            let e = (good + step).min(n - 1);
            match fits(e) {
                Some(p) => {
                    good = e;
                    best = p;
                    step *= 2;
                }
                None => bad = Some(e),
            }
        }
        if let Some(mut b) = bad {
            while b - good > 1 {
                let mid = (good + b) / 2;
                match fits(mid) {
                    Some(p) => {
                        good = mid;
                        best = p;
                    }
                    None => b = mid,
                }
            }
        }
        let (y0, y1) = (pts[s].0, pts[good].0);
        pieces.push(CurvePiece {
            kind: best,
            domain: [y0, y1],
        });
        s = good;
    }
    PiecewiseCurve::new(pieces, symmetric)
}

fn chord(w: &[(f64, f64)]) -> PieceKind {
    let (a, b) = (w[0], w[w.len() - 1]);
    let slope = (b.1 - a.1) / (b.0 - a.0);
    PieceKind::Segment {
        slope,
        intercept: a.1 - slope * a.0,
    }
}

/// Best circle or line for the window with max vertical residual ≤ tol.
fn fit_window(w: &[(f64, f64)], tol: f64) -> Option<PieceKind> {
    let (lo, hi) = (w[0].0, w[w.len() - 1].0);
    let mut options: Vec<(f64, PieceKind)> = Vec::new();
    if let Some((slope, intercept)) = fit_line(w) {
        let k = PieceKind::Segment { slope, intercept };
        options.push((vertical_residual(w, &k), k));
    }
    if w.len() >= 3 {
        if let Some(c) = fit_circle(w) {
            let k = arc_for(w, c, lo, hi);
            let mut best = (vertical_residual(w, &k), k, c.2);
            if best.0 > 0.5 * tol && best.0 < 4.0 * tol {
                if let Some(r) = refine_circle(w, c) {
                    let k = arc_for(w, r, lo, hi);
                    let res = vertical_residual(w, &k);
                    if res < best.0 {
                        best = (res, k, r.2);
                    }
                }
            }
            if best.2 <= LINE_RADIUS {
                options.push((best.0, best.1));
            }
        }
    }
    options
        .into_iter()
        .filter(|(res, _)| *res <= tol)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, k)| k)
}

/// Arc on the side of the centre holding most of the window, with the
/// radius grown so that `[lo, hi]` stays real.
fn arc_for(w: &[(f64, f64)], (a, b, r): (f64, f64, f64), lo: f64, hi: f64) -> PieceKind {
    let above = w.iter().map(|p| p.1 - b).sum::<f64>();
    let branch = if above >= 0.0 {
        Branch::Upper
    } else {
        Branch::Lower
    };
    let reach = (lo - a).abs().max((hi - a).abs());
    PieceKind::Arc {
        center: [a, b],
        radius_sq: (r * r).max(reach * reach),
        branch,
    }
}

fn vertical_residual(w: &[(f64, f64)], kind: &PieceKind) -> f64 {
    let piece = CurvePiece {
        kind: *kind,
        domain: [f64::NEG_INFINITY, f64::INFINITY],
    };
    w.iter()
        .map(|&(y, z)| piece.formula(y).map_or(f64::INFINITY, |f| (z - f).abs()))
        .fold(0.0, f64::max)
}

fn centroid(w: &[(f64, f64)]) -> (f64, f64) {
    let n = w.len() as f64;
    let (sy, sz) = w.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (sy / n, sz / n)
}

/// Total least squares line `z = k·y + b`; `None` if vertical.
fn fit_line(w: &[(f64, f64)]) -> Option<(f64, f64)> {
    let (my, mz) = centroid(w);
    let (mut syy, mut syz, mut szz) = (0.0, 0.0, 0.0);
    for &(y, z) in w {
        let (dy, dz) = (y - my, z - mz);
        syy += dy * dy;
        syz += dy * dz;
        szz += dz * dz;
    }
    // principal direction of the 2x2 scatter matrix
    let theta = 0.5 * (2.0 * syz).atan2(syy - szz);
    let (c, s) = (theta.cos(), theta.sin());
    if c.abs() < 1e-12 {
        return None;
    }
    let k = s / c;
    Some((k, mz - k * my))
}

/// Algebraic (Kåsa) circle fit in centred, rescaled coordinates: `(a, b, r)`.
fn fit_circle(w: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let (my, mz) = centroid(w);
    let spread = w
        .iter()
        .fold(0.0f64, |m, p| m.max((p.0 - my).abs()).max((p.1 - mz).abs()));
    if spread == 0.0 {
        return None;
    }
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for &(y, z) in w {
        let (u, v) = ((y - my) / spread, (z - mz) / spread);
        let row = [u, v, 1.0];
        let q = -(u * u + v * v);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * q;
        }
    }
    let [d, e, f] = solve3(m, rhs)?;
    let (a, b) = (-d / 2.0, -e / 2.0);
    let r2 = a * a + b * b - f;
    (r2 > 0.0 && r2.is_finite()).then(|| (a * spread + my, b * spread + mz, r2.sqrt() * spread))
}

/// Gauss-Newton on the geometric distance.
fn refine_circle(w: &[(f64, f64)], (mut a, mut b, mut r): (f64, f64, f64)) -> Option<(f64, f64, f64)> {
    for _ in 0..20 {
        let mut m = [[0.0; 3]; 3];
        let mut g = [0.0; 3];
        for &(y, z) in w {
            let d = (y - a).hypot(z - b);
            if d == 0.0 {
                return None;
            }
            let jac = [-(y - a) / d, -(z - b) / d, -1.0];
            let res = d - r;
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += jac[i] * jac[j];
                }
                g[i] -= jac[i] * res;
            }
        }
        let [da, db, dr] = solve3(m, g)?;
        a += da;
        b += db;
        r += dr;
        if da.abs().max(db.abs()).max(dr.abs()) < 1e-12 * r.abs().max(1.0) {
            break;
        }
    }
    (r > 0.0 && r.is_finite()).then_some((a, b, r))
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if !(d.abs() > 1e-14 * scale.powi(3)) {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = r[i];
        }
        *o = det(&mk) / d;
    }
    Some(out)
}

const RAYLEIGH_DATA: &str = include_str!("../data/rayleigh_eps5.toml");
const VDP_DATA: &str = include_str!("../data/vdp_eps5.toml");

/// Which copy of a bundled curve to load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// As tabulated, including imaginary subdomains.
    Verbatim,
    /// Domains cut to where each arc is real.
    Clipped,
}

/// Bundled hand-matched upper-half curves for ε = 5.
pub fn bundled_curve(system: &SystemKind, variant: Variant) -> Result<PiecewiseCurve, GeometryError> {
    let text = match system {
        SystemKind::Rayleigh => RAYLEIGH_DATA,
        SystemKind::VanDerPol => VDP_DATA,
        other => return Err(GeometryError::NoBundledCurve(other.name().to_string())),
    };
    let curve = PiecewiseCurve::from_toml_str(text)?;
    match variant {
        Variant::Verbatim => Ok(curve),
        Variant::Clipped => curve.clipped(),
    }
}

/// The ε at which the bundled curves were drawn.
pub const BUNDLED_EPS: f64 = 5.0;
