//! End-to-end runs: sample the loop `phi -> [1 : X1 : X2 : X3]` for fixed
//! `R`, push it into the nerve, count its winding, and collect the arc and
//! transition diagnostics across a sweep of `R`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{PunctureConfig, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::nerve::{
    first_undersampled, nerve_angle, winding_number, NervePoint, PartitionOfUnity, Trajectory,
    TrajectorySample, DEFAULT_NEAR_INFINITY_THRESHOLD, DEFAULT_TUBE_WIDTH,
};
use crate::periods::{
    half_periods, period_triangle, HalfPeriods, PeriodTriangle, DEFAULT_BASEPOINT,
};
use crate::rotation::{
    arc_decomposition, dominant_side, wrap_angle, ArcDecomposition, CriticalAngles, Side,
};
use crate::traces::{projective_normalize, trace_coordinates, MuProfile};

pub const DEFAULT_SAMPLES: usize = 360;
pub const MIN_SAMPLES: usize = 36;
pub const DEFAULT_REFINEMENT_CAP: u32 = 12;
pub const DEFAULT_VERTEX_THRESHOLD: f64 = 0.5;
pub const DEFAULT_WIDTH_TOL: f64 = 1e-6;

/// Automatic guard band: this many transition widths at the smallest `R` ...
pub const GUARD_WIDTH_FACTOR: f64 = 10.0;
/// ... but never more than this fraction of the shortest arc.
pub const GUARD_ARC_FRACTION: f64 = 0.25;

/// Complex numbers as `[re, im]` in config and report files.
mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq([z.re, z.im])
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(with = "complex_pair")]
    pub t: Complex64,
    #[serde(rename = "R")]
    pub r_values: Vec<f64>,
    /// Initial size of the uniform phi grid.
    pub samples: usize,
    /// `zero`, `const:MU0,MU1,MUT`, `random:SEED[:HARMONICS]` or plain
    /// `random`, which takes its seed from `seed`.
    pub mu: String,
    pub seed: u64,
    #[serde(with = "complex_pair")]
    pub basepoint: Complex64,
    pub quadrature_tol: f64,
    pub near_infinity_threshold: f64,
    pub tube_width: f64,
    /// Half-width in radians excluded around each critical angle in the arc
    /// checks; `None` picks it from the measured transition widths.
    pub guard_band: Option<f64>,
    pub refinement_cap: u32,
    pub vertex_threshold: f64,
    pub width_tol: f64,
    /// Record wall-clock times in the report. Off by default so reports are
    /// reproducible byte for byte.
    pub timing: bool,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            t: Complex64::new(2.0, 0.5),
            r_values: vec![1e2, 1e4, 1e6],
            samples: DEFAULT_SAMPLES,
            mu: "zero".into(),
            seed: 0,
            basepoint: DEFAULT_BASEPOINT,
            quadrature_tol: DEFAULT_TOL,
            near_infinity_threshold: DEFAULT_NEAR_INFINITY_THRESHOLD,
            tube_width: DEFAULT_TUBE_WIDTH,
            guard_band: None,
            refinement_cap: DEFAULT_REFINEMENT_CAP,
            vertex_threshold: DEFAULT_VERTEX_THRESHOLD,
            width_tol: DEFAULT_WIDTH_TOL,
            timing: false,
            json: None,
            csv: None,
            svg: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn mu_profile(&self) -> Result<MuProfile> {
        if self.mu.trim() == "random" {
            return Ok(MuProfile::random(self.seed));
        }
        self.mu.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "samples must be at least {MIN_SAMPLES}, got {}",
                self.samples
            )));
        }
        if let Some(r) = self.r_values.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("R values must be positive, got {r}")));
        }
        if !(self.vertex_threshold > 0.0 && self.vertex_threshold < 1.0) {
            return Err(Error::Config(format!(
                "vertex threshold must lie in (0, 1), got {}",
                self.vertex_threshold
            )));
        }
        if !(self.width_tol > 0.0 && self.quadrature_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if let Some(g) = self.guard_band {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config(format!(
                    "guard band must be non-negative, got {g}"
                )));
            }
        }
        PartitionOfUnity::new(self.near_infinity_threshold, self.tube_width)?;
        self.mu_profile()?;
        Ok(())
    }
}

/// Everything about a configuration that does not depend on `R`: the periods
/// are integrated once and shared by all runs.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub half_periods: HalfPeriods,
    pub triangle: PeriodTriangle,
    pub angles: CriticalAngles,
    pub arcs: ArcDecomposition,
    mu: MuProfile,
    partition: PartitionOfUnity,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let t = config.t;
        let setup = || -> Result<_> {
            let punctures = PunctureConfig::new(t)?;
            let hp = half_periods(&punctures, config.basepoint, config.quadrature_tol)?;
            let tri = period_triangle(&hp)?;
            let (angles, arcs) = arc_decomposition(&tri)?;
            Ok((hp, tri, angles, arcs))
        };
        let (half_periods, triangle, angles, arcs) = setup().map_err(|e| e.with_t(t))?;
        Experiment::from_parts(config, half_periods, triangle, angles, arcs)
    }

    /// Builds an experiment around a given triangle, e.g. a synthetic one.
    pub fn with_triangle(config: ExperimentConfig, triangle: PeriodTriangle) -> Result<Self> {
        config.validate()?;
        let (angles, arcs) = arc_decomposition(&triangle).map_err(|e| e.with_t(config.t))?;
        let zero = Complex64::new(0.0, 0.0);
        let hp = HalfPeriods {
            pi0: zero,
            pi1: -triangle.a,
            pit: triangle.b,
            basepoint: config.basepoint,
            tol_used: 0.0,
            max_error_estimate: 0.0,
        };
        Experiment::from_parts(config, hp, triangle, angles, arcs)
    }

    fn from_parts(
        config: ExperimentConfig,
        half_periods: HalfPeriods,
        triangle: PeriodTriangle,
        angles: CriticalAngles,
        arcs: ArcDecomposition,
    ) -> Result<Self> {
        let mu = config.mu_profile()?;
        let partition = PartitionOfUnity::new(config.near_infinity_threshold, config.tube_width)?;
        Ok(Experiment {
            config,
            half_periods,
            triangle,
            angles,
            arcs,
            mu,
            partition,
        })
    }

    pub fn mu(&self) -> &MuProfile {
        &self.mu
    }

    pub fn sample(&self, r: f64, phi: f64) -> Result<TrajectorySample> {
        let tt = trace_coordinates(r, phi, &self.triangle, &self.mu)?;
        let point = projective_normalize(&tt);
        let nerve = self.partition.apply(&point)?;
        let angle = nerve_angle(&nerve)?;
        Ok(TrajectorySample {
            phi,
            point,
            nerve,
            angle,
        })
    }

    fn sample_all(&self, r: f64, phis: &[f64]) -> Result<Vec<TrajectorySample>> {
        let results: Vec<Result<TrajectorySample>> =
            phis.par_iter().map(|&phi| self.sample(r, phi)).collect();
        // report the error at the smallest phi, whatever thread found it first
        results.into_iter().collect()
    }

    /// Closed trajectory on the uniform grid, bisected wherever an angle step
    /// reaches `pi/2`, at most `refinement_cap` times per grid interval.
    pub fn run_trajectory(&self, r: f64) -> Result<Trajectory> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Config(format!("R must be positive, got {r}")));
        }
        let n = self.config.samples;
        let phis: Vec<f64> = (0..=n)
            .map(|k| {
                if k == n {
                    TAU
                } else {
                    TAU * k as f64 / n as f64
                }
            })
            .collect();
        let mut samples = self.sample_all(r, &phis)?;
        // depth[i] is the bisection level of the interval from sample i to i + 1
        let mut depth = vec![0u32; n];
        loop {
            let bad: Vec<usize> = (0..samples.len() - 1)
                .filter(|&i| {
                    first_undersampled(&[samples[i].angle, samples[i + 1].angle]).is_some()
                })
                .collect();
            if bad.is_empty() {
                break;
            }
            if let Some(&i) = bad
                .iter()
                .find(|&&i| depth[i] >= self.config.refinement_cap)
            {
                let (lo, hi) = (&samples[i], &samples[i + 1]);
                return Err(Error::Undersampled {
                    phi_lo: lo.phi,
                    phi_hi: hi.phi,
                    step: crate::rotation::wrapped_difference(hi.angle, lo.angle),
                });
            }
            let mids: Vec<f64> = bad
                .iter()
                .map(|&i| 0.5 * (samples[i].phi + samples[i + 1].phi))
                .collect();
            let new = self.sample_all(r, &mids)?;
            let mut merged = Vec::with_capacity(samples.len() + new.len());
            let mut merged_depth = Vec::with_capacity(depth.len() + new.len());
            let mut new_iter = bad.iter().zip(new).peekable();
            for (i, s) in samples.into_iter().enumerate() {
                merged.push(s);
                if i == depth.len() {
                    break;
                }
                match new_iter.peek() {
                    Some((&j, _)) if j == i => {
                        let (_, mid) = new_iter.next().unwrap();
                        merged.push(mid);
                        merged_depth.push(depth[i] + 1);
                        merged_depth.push(depth[i] + 1);
                    }
                    _ => merged_depth.push(depth[i]),
                }
            }
            samples = merged;
            depth = merged_depth;
        }
        Trajectory::new(samples, true)
    }

    /// Width of the phi-interval around each critical angle on which the
    /// nerve point is closer to the matching vertex than `vertex_threshold`
    /// (strictly above it), located by bisection to `width_tol`.
    pub fn transition_widths(&self, r: f64, vertex_threshold: f64) -> Result<[f64; 3]> {
        if !(vertex_threshold > 0.0 && vertex_threshold < 1.0) {
            return Err(Error::Config(format!(
                "vertex threshold must lie in (0, 1), got {vertex_threshold}"
            )));
        }
        let mut widths = [0.0; 3];
        for side in Side::ALL {
            let k = side.index();
            let center = self.angles.get(side);
            let inside = |phi: f64| -> Result<bool> {
                Ok(self.sample(r, wrap_angle(phi))?.nerve.bary[k] > vertex_threshold)
            };
            if !inside(center)? {
                return Err(Error::NotNearInfinity(format!(
                    "no vertex interval around the critical angle of side {side} at R = {r}"
                )));
            }
            // stay within the two neighbouring arcs
            let reach = Side::ALL
                .iter()
                .filter(|&&s| s != side)
                .map(|&s| crate::rotation::wrapped_difference(self.angles.get(s), center).abs())
                .fold(PI, f64::min);
            let mut total = 0.0;
            for dir in [1.0, -1.0] {
                total += self.half_width(center, dir, reach, &inside)?;
            }
            widths[k] = total;
        }
        Ok(widths)
    }

    fn half_width(
        &self,
        center: f64,
        dir: f64,
        reach: f64,
        inside: &dyn Fn(f64) -> Result<bool>,
    ) -> Result<f64> {
        let tol = self.config.width_tol;
        let mut lo = 0.0;
        let mut hi = tol;
        while inside(center + dir * hi)? {
            lo = hi;
            hi *= 2.0;
            if hi >= reach {
                if inside(center + dir * reach)? {
                    return Ok(reach);
                }
                hi = reach;
                break;
            }
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if inside(center + dir * mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The configured guard band, or the automatic one: a multiple of the
    /// largest transition width at the smallest `R`, capped by the arcs.
    pub fn guard_band(&self) -> Result<f64> {
        if let Some(g) = self.config.guard_band {
            return Ok(g);
        }
        let cap = GUARD_ARC_FRACTION * self.arcs.shortest_arc();
        let Some(r_min) = self.config.r_values.iter().copied().reduce(f64::min) else {
            return Ok(cap);
        };
        let widths = self.transition_widths(r_min, self.config.vertex_threshold)?;
        let widest = widths.iter().copied().fold(0.0, f64::max);
        Ok((GUARD_WIDTH_FACTOR * widest).min(cap))
    }

    pub fn run(&self, r: f64, guard: f64) -> Result<(Trajectory, RunReport)> {
        let start = Instant::now();
        let traj = self.run_trajectory(r)?;
        let winding = winding_number(&traj)?;
        let arc_edges = self.arc_edges(&traj, guard);
        let (min_margin, min_log_gap) = self.guarded_margins(&traj, guard);
        let transition_widths = self.transition_widths(r, self.config.vertex_threshold)?;
        let elapsed_ms = self
            .config
            .timing
            .then(|| start.elapsed().as_secs_f64() * 1e3);
        let report = RunReport {
            t: self.config.t,
            r,
            winding,
            samples: traj.samples.len(),
            critical_angles: self.angles.as_array(),
            arc_edges,
            min_margin,
            min_log_gap,
            transition_widths,
            elapsed_ms,
        };
        Ok((traj, report))
    }

    /// Samples strictly inside `I_k`, at least `guard` from its ends, must
    /// have `bary_k = 0`, i.e. lie on the edge opposite `v_k`.
    pub fn arc_edges(&self, traj: &Trajectory, guard: f64) -> [ArcEdgeReport; 3] {
        Side::ALL.map(|side| {
            let k = side.index();
            let arc = self.arcs.arc(side);
            let mut checked = 0;
            let mut mismatches = 0;
            let mut first_mismatch = None;
            for s in &traj.samples {
                if !arc.contains_interior(s.phi, guard) {
                    continue;
                }
                checked += 1;
                if !s.nerve.on_edge_opposite(k) {
                    mismatches += 1;
                    first_mismatch.get_or_insert(s.phi);
                }
            }
            let (a, b) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
            ArcEdgeReport {
                arc: format!("I{}", side.number()),
                start: arc.start,
                end: arc.end,
                edge: format!("[v{a}v{b}]"),
                checked,
                mismatches,
                first_mismatch,
            }
        })
    }

    /// Over all guarded arc samples: the smallest projected-length margin of
    /// the dominant side and the smallest log-modulus gap between the
    /// largest and second largest trace.
    pub fn guarded_margins(&self, traj: &Trajectory, guard: f64) -> (f64, f64) {
        let mut min_margin = f64::INFINITY;
        let mut min_gap = f64::INFINITY;
        for s in &traj.samples {
            if self.arcs.arc_containing(s.phi, guard).is_none() {
                continue;
            }
            let (_, margin) = dominant_side(&self.triangle, s.phi);
            min_margin = min_margin.min(margin);
            let mut l = s.point.trace_log_moduli();
            l.sort_by(|x, y| y.total_cmp(x));
            min_gap = min_gap.min(l[0] - l[1]);
        }
        (min_margin, min_gap)
    }

    /// Runs every `R` of the configuration without judging the outcome.
    pub fn report(&self) -> Result<VerificationReport> {
        let guard = self.guard_band()?;
        let results: Vec<Result<RunReport>> = self
            .config
            .r_values
            .par_iter()
            .map(|&r| self.run(r, guard).map(|(_, report)| report))
            .collect();
        let runs: Vec<RunReport> = results.into_iter().collect::<Result<_>>()?;
        let reference = runs.first().map(|r| r.winding);
        let smallest_passing_r = runs
            .iter()
            .filter(|r| r.winding.abs() == 1 && Some(r.winding) == reference)
            .filter(|r| r.arc_edges.iter().all(|e| e.mismatches == 0))
            .map(|r| r.r)
            .reduce(f64::min);
        Ok(VerificationReport {
            t: self.config.t,
            mu: self.mu.to_string(),
            guard_band: guard,
            runs,
            smallest_passing_r,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcEdgeReport {
    pub arc: String,
    pub start: f64,
    pub end: f64,
    pub edge: String,
    pub checked: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(with = "complex_pair")]
    pub t: Complex64,
    #[serde(rename = "R")]
    pub r: f64,
    pub winding: i64,
    pub samples: usize,
    pub critical_angles: [f64; 3],
    pub arc_edges: [ArcEdgeReport; 3],
    pub min_margin: f64,
    pub min_log_gap: f64,
    pub transition_widths: [f64; 3],
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "complex_pair")]
    pub t: Complex64,
    pub mu: String,
    pub guard_band: f64,
    pub runs: Vec<RunReport>,
    #[serde(rename = "smallest_passing_R")]
    pub smallest_passing_r: Option<f64>,
}

impl VerificationReport {
    /// Fails unless every run winds exactly once, all with the same sign,
    /// and (for a positive guard band) every guarded sample sits on its edge.
    pub fn certify(&self) -> Result<()> {
        let mut sign = None;
        for run in &self.runs {
            if run.winding.abs() != 1 {
                return Err(Error::TheoremViolation(format!(
                    "winding {} at R = {}",
                    run.winding, run.r
                )));
            }
            if *sign.get_or_insert(run.winding) != run.winding {
                return Err(Error::TheoremViolation(format!(
                    "winding changes sign at R = {}",
                    run.r
                )));
            }
            if self.guard_band > 0.0 {
                if let Some(e) = run.arc_edges.iter().find(|e| e.mismatches > 0) {
                    return Err(Error::TheoremViolation(format!(
                        "{} of {} samples of {} leave {} at R = {} (first at phi = {})",
                        e.mismatches,
                        e.checked,
                        e.arc,
                        e.edge,
                        run.r,
                        e.first_mismatch.unwrap_or(f64::NAN)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn run_trajectory(cfg: &ExperimentConfig, r: f64) -> Result<Trajectory> {
    Experiment::new(cfg.clone())?.run_trajectory(r)
}

pub fn verify_theorem(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let report = Experiment::new(cfg.clone())?.report()?;
    report.certify()?;
    Ok(report)
}

pub fn transition_widths(
    cfg: &ExperimentConfig,
    r: f64,
    vertex_threshold: f64,
) -> Result<[f64; 3]> {
    Experiment::new(cfg.clone())?.transition_widths(r, vertex_threshold)
}

pub const CSV_HEADER: &str = "phi,l1,l2,l3,bary1,bary2,bary3,nerve_angle";

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(200 * traj.samples.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let [l1, l2, l3] = s.point.trace_log_moduli();
        let [b1, b2, b3] = s.nerve.bary;
        let row = [s.phi, l1, l2, l3, b1, b2, b3, s.angle]
            .map(|v| format!("{v:.16e}"))
            .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// The nerve triangle with the loop drawn on top, segments coloured by phi.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    const SIZE: f64 = 400.0;
    let vertices: [(f64, f64); 3] = std::array::from_fn(|j| {
        let theta = PI / 2.0 - TAU * j as f64 / 3.0;
        (
            SIZE / 2.0 + 160.0 * theta.cos(),
            SIZE / 2.0 - 160.0 * theta.sin() + 20.0,
        )
    });
    let place = |p: &NervePoint| {
        let x = (0..3).map(|j| p.bary[j] * vertices[j].0).sum::<f64>();
        let y = (0..3).map(|j| p.bary[j] * vertices[j].1).sum::<f64>();
        (x, y)
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let [(x1, y1), (x2, y2), (x3, y3)] = vertices;
    let _ = writeln!(
        out,
        r#"<polygon points="{x1:.2},{y1:.2} {x2:.2},{y2:.2} {x3:.2},{y3:.2}" fill="none" stroke="lightgray" stroke-width="8"/>"#
    );
    for w in traj.samples.windows(2) {
        let (ax, ay) = place(&w[0].nerve);
        let (bx, by) = place(&w[1].nerve);
        let hue = 360.0 * w[0].phi / TAU;
        let _ = writeln!(
            out,
            r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="hsl({hue:.1},80%,45%)" stroke-width="3"/>"#
        );
    }
    for (j, (x, y)) in vertices.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="16">v{}</text>"#,
            x + 10.0,
            y - 8.0,
            j + 1
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
