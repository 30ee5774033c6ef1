//! Paths in the four-punctured plane and adaptive integration of
//! `dz / sqrt(z (z - 1) (z - t))` with continuous square-root tracking.
//!
//! The square root is never taken on a fixed cut. Each quadrature node picks
//! whichever of the two roots lies closest to the value at the previous node,
//! and a panel is bisected whenever two consecutive values turn by more than
//! [`MAX_BRANCH_TURN`] or the coarse and fine tracks disagree at the panel end.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_SEPARATION_FLOOR: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest argument change of the tracked root between consecutive nodes.
pub const MAX_BRANCH_TURN: f64 = PI / 4.0;

const MAX_DEPTH: usize = 40;
const MAX_PANELS: usize = 200_000;
const CONTINUITY_GAP: f64 = 1e-12;
const MAX_DETOURS: usize = 8;

/// One of the finite branch points of the spectral double cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Puncture {
    Zero,
    One,
    T,
}

impl Puncture {
    pub const ALL: [Puncture; 3] = [Puncture::Zero, Puncture::One, Puncture::T];

    pub fn label(self) -> &'static str {
        match self {
            Puncture::Zero => "0",
            Puncture::One => "1",
            Puncture::T => "t",
        }
    }
}

impl fmt::Display for Puncture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Branch points `{0, 1, t}` (with `infinity` implicit) and the minimum distance
/// any path must keep from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PunctureConfig {
    t: Complex64,
    separation_floor: f64,
}

impl PunctureConfig {
    pub fn new(t: Complex64) -> Result<Self> {
        Self::with_floor(t, DEFAULT_SEPARATION_FLOOR)
    }

    pub fn with_floor(t: Complex64, separation_floor: f64) -> Result<Self> {
        if !(separation_floor > 0.0 && separation_floor.is_finite()) {
            return Err(Error::Config(format!(
                "separation floor must be positive and finite, got {separation_floor}"
            )));
        }
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Geometry(format!("t = {t} is not finite")));
        }
        let d = t.norm().min((t - 1.0).norm());
        if d <= separation_floor {
            return Err(Error::Geometry(format!(
                "t = {t} lies within {separation_floor:e} of another branch point"
            )));
        }
        Ok(PunctureConfig {
            t,
            separation_floor,
        })
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn separation_floor(&self) -> f64 {
        self.separation_floor
    }

    pub fn position(&self, p: Puncture) -> Complex64 {
        match p {
            Puncture::Zero => Complex64::new(0.0, 0.0),
            Puncture::One => Complex64::new(1.0, 0.0),
            Puncture::T => self.t,
        }
    }

    pub fn positions(&self) -> [Complex64; 3] {
        Puncture::ALL.map(|p| self.position(p))
    }

    /// `z (z - 1) (z - t)`.
    pub fn cubic(&self, z: Complex64) -> Complex64 {
        z * (z - 1.0) * (z - self.t)
    }

    /// Distance from puncture `p` to the closest other finite puncture.
    pub fn nearest_other_distance(&self, p: Puncture) -> f64 {
        let here = self.position(p);
        Puncture::ALL
            .iter()
            .filter(|&&q| q != p)
            .map(|&q| (self.position(q) - here).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        Puncture::ALL
            .iter()
            .map(|&p| self.nearest_other_distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A smooth piece of a path, parameterized over `s` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        /// Signed; positive is counter-clockwise.
        sweep: f64,
    },
}

impl Segment {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(radius, start_angle + sweep * s),
        }
    }

    /// `dz/ds`.
    pub fn derivative(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => Complex64::i() * sweep * Complex64::from_polar(radius, start_angle + sweep * s),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Segment::Arc {
                center,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
        }
    }

    /// Euclidean distance from `z` to the point set traced by the segment.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => point_segment_distance(z, from, to),
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let v = z - center;
                let on_circle = (v.norm() - radius).abs();
                if sweep.abs() >= TAU || v.norm() == 0.0 {
                    return on_circle;
                }
                // angle of v measured from the start, in the sweep direction
                let rel = (v.arg() - start_angle) * sweep.signum();
                if rel.rem_euclid(TAU) <= sweep.abs() {
                    on_circle
                } else {
                    (z - self.start()).norm().min((z - self.end()).norm())
                }
            }
        }
    }
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = ((z - a) * d.conj()).re / len2;
    (z - (a + d * s.clamp(0.0, 1.0))).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reversed,
}

/// A piecewise-smooth path made of consecutive [`Segment`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    segments: Vec<Segment>,
    orientation: Orientation,
}

impl ParamPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Geometry("path has no segments".into()));
        }
        let scale = segments
            .iter()
            .flat_map(|s| [s.start().norm(), s.end().norm(), s.length()])
            .fold(1.0, f64::max);
        for (k, pair) in segments.windows(2).enumerate() {
            let gap = (pair[0].end() - pair[1].start()).norm();
            if gap > CONTINUITY_GAP * scale {
                return Err(Error::Geometry(format!(
                    "segments {k} and {} do not meet (gap {gap:e})",
                    k + 1
                )));
            }
        }
        Ok(ParamPath {
            segments,
            orientation: Orientation::Forward,
        })
    }

    /// Full positively oriented circle starting and ending at `center + radius`.
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        ParamPath::new(vec![Segment::Arc {
            center,
            radius,
            start_angle: 0.0,
            sweep: TAU,
        }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn is_closed(&self) -> bool {
        let scale = self.length().max(1.0);
        (self.end() - self.start()).norm() <= CONTINUITY_GAP * scale
    }

    pub fn reversed(&self) -> ParamPath {
        ParamPath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            orientation: match self.orientation {
                Orientation::Forward => Orientation::Reversed,
                Orientation::Reversed => Orientation::Forward,
            },
        }
    }

    /// Smallest distance from `z` to any point of the path.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Winding number of a closed path about `z`, by summing argument
    /// increments over samples fine enough that no step turns by more than
    /// a small angle.
    pub fn winding_number_about(&self, z: Complex64) -> Result<i64> {
        if !self.is_closed() {
            return Err(Error::Geometry("winding number needs a closed path".into()));
        }
        let clearance = self.distance_to(z);
        if clearance == 0.0 {
            return Err(Error::Geometry(format!("path passes through {z}")));
        }
        let mut total = 0.0;
        for seg in &self.segments {
            let n = ((seg.length() / (0.05 * clearance)).ceil() as usize).clamp(16, 1_000_000);
            let mut prev = seg.point(0.0) - z;
            for k in 1..=n {
                let cur = seg.point(k as f64 / n as f64) - z;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        Ok((total / TAU).round() as i64)
    }
}

/// Which of the two square roots of the cubic is selected, relative to the
/// principal root at the point where it is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchState {
    Principal,
    Opposite,
}

impl BranchState {
    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            BranchState::Principal
        } else {
            BranchState::Opposite
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            BranchState::Principal => 1,
            BranchState::Opposite => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BranchState::Principal => BranchState::Opposite,
            BranchState::Opposite => BranchState::Principal,
        }
    }

    fn apply(self, root: Complex64) -> Complex64 {
        match self {
            BranchState::Principal => root,
            BranchState::Opposite => -root,
        }
    }

    /// Classifies `value` as one of `±principal`.
    fn classify(value: Complex64, principal: Complex64) -> Self {
        if (value * principal.conj()).re >= 0.0 {
            BranchState::Principal
        } else {
            BranchState::Opposite
        }
    }
}

/// Builds a keyhole loop based at `z0` around `puncture`: a corridor from `z0`
/// to the circle of the given radius, one positive turn around the circle, and
/// the same corridor back.
///
/// The corridor is the straight segment from `z0` when it clears the other
/// punctures by a quarter of their minimum pairwise distance. Otherwise it
/// detours around each blocking puncture on the side the straight segment
/// already passes (the right-hand side when it hits the puncture head on).
pub fn make_puncture_loop(
    config: &PunctureConfig,
    puncture: Puncture,
    z0: Complex64,
    radius: f64,
) -> Result<ParamPath> {
    let floor = config.separation_floor();
    let center = config.position(puncture);
    let nearest = config.nearest_other_distance(puncture);
    if !(radius > floor) {
        return Err(Error::Geometry(format!(
            "loop radius {radius:e} must exceed the separation floor {floor:e}"
        )));
    }
    if radius >= 0.5 * nearest {
        return Err(Error::Geometry(format!(
            "loop radius {radius} around {puncture} must be below half the distance {nearest} to the nearest other puncture"
        )));
    }
    for p in Puncture::ALL {
        if (z0 - config.position(p)).norm() <= floor {
            return Err(Error::Geometry(format!(
                "basepoint {z0} lies on puncture {p}"
            )));
        }
    }
    if (z0 - center).norm() <= radius {
        return Err(Error::Geometry(format!(
            "basepoint {z0} lies inside the loop of radius {radius} around {puncture}"
        )));
    }

    let blockers: Vec<Complex64> = Puncture::ALL
        .iter()
        .filter(|&&p| p != puncture)
        .map(|&p| config.position(p))
        .collect();
    let clearance = 0.25 * config.min_pairwise_distance();
    let mut waypoints = vec![z0];
    route(z0, center, &blockers, clearance, 0, &mut waypoints)?;
    // the route ends at the puncture itself; stop on the circle instead
    waypoints.pop();
    let last = *waypoints.last().expect("route keeps the basepoint");
    let to_last = last - center;
    if to_last.norm() <= radius {
        return Err(Error::Geometry(format!(
            "corridor to {puncture} enters the loop circle (radius {radius} too large)"
        )));
    }
    let entry = center + to_last * (radius / to_last.norm());
    waypoints.push(entry);

    let corridor: Vec<Segment> = waypoints
        .windows(2)
        .map(|w| Segment::Line {
            from: w[0],
            to: w[1],
        })
        .collect();
    for (k, seg) in corridor.iter().enumerate() {
        for &q in &blockers {
            if seg.distance_to(q) <= floor.max(1e-3 * clearance) {
                return Err(Error::Geometry(format!(
                    "corridor to {puncture} passes within {:e} of puncture {q}",
                    seg.distance_to(q)
                )));
            }
        }
        if k + 1 < corridor.len() && seg.distance_to(center) <= radius {
            return Err(Error::Geometry(format!(
                "corridor to {puncture} crosses the loop circle (radius {radius} too large)"
            )));
        }
    }
    for &q in &blockers {
        if (q - center).norm() <= radius {
            return Err(Error::Geometry(format!(
                "loop around {puncture} would enclose {q}"
            )));
        }
    }

    let mut segments = corridor.clone();
    segments.push(Segment::Arc {
        center,
        radius,
        start_angle: to_last.arg(),
        sweep: TAU,
    });
    segments.extend(corridor.iter().rev().map(Segment::reversed));
    ParamPath::new(segments)
}

fn route(
    from: Complex64,
    to: Complex64,
    blockers: &[Complex64],
    clearance: f64,
    depth: usize,
    out: &mut Vec<Complex64>,
) -> Result<()> {
    let dir = to - from;
    let len = dir.norm();
    if len == 0.0 {
        out.push(to);
        return Ok(());
    }
    let unit = dir / len;
    // first blocker along the segment
    let hit = blockers
        .iter()
        .filter(|&&q| point_segment_distance(q, from, to) < clearance)
        .map(|&q| (((q - from) * unit.conj()).re, q))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((_, q)) = hit else {
        out.push(to);
        return Ok(());
    };
    if depth >= MAX_DETOURS {
        return Err(Error::Geometry(
            "corridor could not be routed around the punctures".into(),
        ));
    }
    // cross > 0: q is left of the direction, so pass it on the right
    let cross = (unit.conj() * (q - from)).im;
    let right = -Complex64::i() * unit;
    let side = if cross >= 0.0 { right } else { -right };
    let waypoint = q + side * clearance;
    let rest: Vec<Complex64> = blockers.iter().copied().filter(|&b| b != q).collect();
    route(from, waypoint, &rest, clearance, depth + 1, out)?;
    route(waypoint, to, &rest, clearance, depth + 1, out)
}

/// Result of [`integrate_branch_tracked`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedIntegral {
    pub value: Complex64,
    /// Branch at the path end relative to the principal root there.
    pub final_state: BranchState,
    /// Sum of accepted per-panel discrepancies between one panel and its two halves.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Integrates `dz / sqrt(z (z - 1) (z - t))` along `path`, continuing the
/// square root from `initial` (relative to the principal root at the path start).
pub fn integrate_branch_tracked(
    path: &ParamPath,
    config: &PunctureConfig,
    initial: BranchState,
    tol: f64,
) -> Result<TrackedIntegral> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    check_separation(path, config)?;

    let start = path.start();
    let mut root = initial.apply(config.cubic(start).sqrt());
    let total_len = path.length();
    let mut acc = Accumulator::default();
    for seg in path.segments() {
        let share = if total_len > 0.0 {
            tol * seg.length() / total_len
        } else {
            tol
        };
        let mut tracker = PanelIntegrator {
            seg,
            config,
            rule: GaussLegendre::panel_rule(),
        };
        root = tracker.adaptive(0.0, 1.0, root, share, 0, &mut acc)?;
    }
    let end = path.end();
    Ok(TrackedIntegral {
        value: acc.value,
        final_state: BranchState::classify(root, config.cubic(end).sqrt()),
        error_estimate: acc.error,
        panels: acc.panels,
    })
}

/// Non-adaptive composite rule over `panels` equal panels of a single segment.
/// Returns the refined (two-half) value and the summed whole-versus-halves
/// discrepancy, which is the quantity the adaptive driver compares to its tolerance.
pub fn uniform_panel_integral(
    seg: &Segment,
    config: &PunctureConfig,
    initial: BranchState,
    panels: usize,
) -> Result<(Complex64, f64)> {
    if panels == 0 {
        return Err(Error::Config("need at least one panel".into()));
    }
    let integrator = PanelIntegrator {
        seg,
        config,
        rule: GaussLegendre::panel_rule(),
    };
    let mut root = initial.apply(config.cubic(seg.start()).sqrt());
    let mut value = Complex64::new(0.0, 0.0);
    let mut estimate = 0.0;
    for k in 0..panels {
        let a = k as f64 / panels as f64;
        let b = (k + 1) as f64 / panels as f64;
        let step = integrator.split(a, b, root);
        root = step.end_root;
        value += step.refined;
        estimate += step.discrepancy;
    }
    Ok((value, estimate))
}

fn check_separation(path: &ParamPath, config: &PunctureConfig) -> Result<()> {
    let floor = config.separation_floor();
    for (k, seg) in path.segments().iter().enumerate() {
        for p in Puncture::ALL {
            let d = seg.distance_to(config.position(p));
            if d <= floor {
                return Err(Error::Geometry(format!(
                    "segment {k} passes within {d:e} of branch point {p} (floor {floor:e})"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct Accumulator {
    value: Complex64,
    error: f64,
    panels: usize,
}

struct PanelIntegrator<'a> {
    seg: &'a Segment,
    config: &'a PunctureConfig,
    rule: &'static GaussLegendre,
}

struct Track {
    sum: Complex64,
    end_root: Complex64,
    smooth: bool,
}

struct Split {
    refined: Complex64,
    discrepancy: f64,
    end_root: Complex64,
    consistent: bool,
}

impl PanelIntegrator<'_> {
    fn continue_root(&self, z: Complex64, prev: Complex64) -> (Complex64, bool) {
        let r = self.config.cubic(z).sqrt();
        let r = if (r - prev).norm_sqr() <= (r + prev).norm_sqr() {
            r
        } else {
            -r
        };
        let turn = (r * prev.conj()).arg().abs();
        (r, turn < MAX_BRANCH_TURN)
    }

    /// Gauss-Legendre on `[a, b]`, tracking the root through the nodes in order.
    fn track(&self, a: f64, b: f64, start_root: Complex64) -> Track {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut prev = start_root;
        let mut smooth = true;
        let mut sum = Complex64::new(0.0, 0.0);
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let s = mid + half * x;
            let (root, ok) = self.continue_root(self.seg.point(s), prev);
            smooth &= ok;
            sum += self.seg.derivative(s) / root * *w;
            prev = root;
        }
        let (end_root, ok) = self.continue_root(self.seg.point(b), prev);
        Track {
            sum: sum * half,
            end_root,
            smooth: smooth && ok,
        }
    }

    fn split(&self, a: f64, b: f64, start_root: Complex64) -> Split {
        let m = 0.5 * (a + b);
        let whole = self.track(a, b, start_root);
        let left = self.track(a, m, start_root);
        let right = self.track(m, b, left.end_root);
        let refined = left.sum + right.sum;
        let agree = (whole.end_root - right.end_root).norm() < 0.5 * right.end_root.norm();
        Split {
            refined,
            discrepancy: (whole.sum - refined).norm(),
            end_root: right.end_root,
            consistent: whole.smooth && left.smooth && right.smooth && agree,
        }
    }

    fn adaptive(
        &mut self,
        a: f64,
        b: f64,
        start_root: Complex64,
        tol: f64,
        depth: usize,
        acc: &mut Accumulator,
    ) -> Result<Complex64> {
        let step = self.split(a, b, start_root);
        if step.consistent && step.discrepancy <= tol {
            acc.value += step.refined;
            acc.error += step.discrepancy;
            acc.panels += 1;
            return Ok(step.end_root);
        }
        if depth >= MAX_DEPTH || acc.panels >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "no convergence on parameter window [{a}, {b}] after {depth} bisections \
                 (discrepancy {:e}, local tolerance {tol:e})",
                step.discrepancy
            )));
        }
        let m = 0.5 * (a + b);
        let mid_root = self.adaptive(a, m, start_root, 0.5 * tol, depth + 1, acc)?;
        self.adaptive(m, b, mid_root, 0.5 * tol, depth + 1, acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn keyhole_around_zero_winds_once() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = make_puncture_loop(&cfg, Puncture::Zero, c(-2.0, 0.0), 0.1).unwrap();
        assert!(path.is_closed());
        assert_eq!(path.winding_number_about(c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(path.winding_number_about(c(1.0, 0.0)).unwrap(), 0);
        assert_eq!(path.winding_number_about(c(2.0, 0.5)).unwrap(), 0);
    }

    #[test]
    fn keyhole_detours_around_blocking_puncture() {
        // the straight corridor from -2 to 1 runs through 0
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = make_puncture_loop(&cfg, Puncture::One, c(-2.0, 0.0), 0.3).unwrap();
        assert_eq!(path.winding_number_about(c(1.0, 0.0)).unwrap(), 1);
        assert_eq!(path.winding_number_about(c(0.0, 0.0)).unwrap(), 0);
        assert_eq!(path.winding_number_about(c(2.0, 0.5)).unwrap(), 0);
        assert!(path.distance_to(c(0.0, 0.0)) > 0.1);
    }

    #[test]
    fn oversized_radius_is_rejected() {
        let cfg = PunctureConfig::new(c(2.0, 0.0)).unwrap();
        let err = make_puncture_loop(&cfg, Puncture::Zero, c(-2.0, -2.0), 10.0).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn basepoint_inside_circle_is_rejected() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let err = make_puncture_loop(&cfg, Puncture::Zero, c(0.05, 0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn t_on_branch_point_is_rejected() {
        assert!(PunctureConfig::new(c(1.0, 0.0)).is_err());
        assert!(PunctureConfig::new(c(0.0, 1e-9)).is_err());
    }

    #[test]
    fn path_through_branch_point_is_rejected() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = ParamPath::circle(c(0.5, 0.0), 0.5).unwrap();
        let err = integrate_branch_tracked(&path, &cfg, BranchState::Principal, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn discontinuous_segments_are_rejected() {
        let segs = vec![
            Segment::Line {
                from: c(0.0, 1.0),
                to: c(1.0, 1.0),
            },
            Segment::Line {
                from: c(1.0, 1.1),
                to: c(2.0, 1.0),
            },
        ];
        assert!(ParamPath::new(segs).is_err());
    }

    #[test]
    fn empty_circle_integrates_to_zero() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = ParamPath::circle(c(-1.0, 1.0), 0.5).unwrap();
        let r = integrate_branch_tracked(&path, &cfg, BranchState::Principal, DEFAULT_TOL).unwrap();
        assert!(r.value.norm() < DEFAULT_TOL, "{}", r.value);
        assert_eq!(r.final_state, BranchState::Principal);
        assert!(r.error_estimate < DEFAULT_TOL);
    }

    #[test]
    fn single_branch_point_flips_the_branch() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        for (center, state) in [
            (c(0.0, 0.0), BranchState::Principal),
            (c(1.0, 0.0), BranchState::Opposite),
            (c(2.0, 0.5), BranchState::Principal),
        ] {
            let path = ParamPath::circle(center + c(0.05, 0.02), 0.3).unwrap();
            let r = integrate_branch_tracked(&path, &cfg, state, DEFAULT_TOL).unwrap();
            assert_eq!(r.final_state, state.flipped());
        }
    }

    #[test]
    fn two_branch_points_keep_the_branch() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = ParamPath::circle(c(0.5, 0.0), 0.8).unwrap();
        let r = integrate_branch_tracked(&path, &cfg, BranchState::Principal, DEFAULT_TOL).unwrap();
        assert_eq!(r.final_state, BranchState::Principal);
        assert!(r.value.norm() > 1.0);
    }

    #[test]
    fn opposite_initial_branch_negates_value() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = make_puncture_loop(&cfg, Puncture::T, c(-2.0, -2.0), 0.25).unwrap();
        let p = integrate_branch_tracked(&path, &cfg, BranchState::Principal, DEFAULT_TOL).unwrap();
        let m = integrate_branch_tracked(&path, &cfg, BranchState::Opposite, DEFAULT_TOL).unwrap();
        assert!((p.value + m.value).norm() < 1e-13 * p.value.norm());
        assert_eq!(p.final_state, m.final_state.flipped());
    }

    #[test]
    fn arc_distance_respects_angular_extent() {
        let arc = Segment::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start_angle: 0.0,
            sweep: PI / 2.0,
        };
        assert!((arc.distance_to(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        // below the real axis: outside the quarter arc, closest is the start point (1, 0)
        assert!((arc.distance_to(c(0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-15);
        let rev = arc.reversed();
        assert!((rev.distance_to(c(0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((rev.start() - arc.end()).norm() < 1e-15);
    }

    #[test]
    fn zero_tolerance_is_rejected() {
        let cfg = PunctureConfig::new(c(2.0, 0.5)).unwrap();
        let path = ParamPath::circle(c(-1.0, 1.0), 0.5).unwrap();
        assert!(integrate_branch_tracked(&path, &cfg, BranchState::Principal, 0.0).is_err());
    }
}
