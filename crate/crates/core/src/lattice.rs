//! Geometric validators for the two lattice couplings.
//!
//! Hexagonal faces: a flat-top hexagon of side `r_r` split into six central
//! equilateral triangles. The face is closed when the upper, lower-left and
//! lower-right triangles each hold a firewall. With `r_f = r_r` a firewall
//! anywhere in a triangle covers all of it, so uncovered devices can only sit
//! in the three remaining (open) triangles; the blocking check asserts that no
//! two uncovered devices in different open triangles are within `r_r`.
//!
//! Square lattice: side `s = r_r / √5`, so two adjacent cells form a `2s x s`
//! rectangle with diagonal exactly `r_r`. An edge is open when both of its
//! cells hold a device and its dependency region A(e) holds no firewall.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ceil_tol;
use crate::error::{invalid, Result};
use crate::network::{NetworkConfig, Realization};
use crate::seed;
use crate::spatial::{sample_ppp, GridIndex, Point, Rect, Window};

/// Sectors (central triangles) that must be occupied for a closed face:
/// upper, lower-left, lower-right.
pub const CLOSED_SECTORS: [usize; 3] = [1, 3, 5];
pub const OPEN_SECTORS: [usize; 3] = [0, 2, 4];

#[inline]
fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Boundary-inclusive point-in-triangle test. `eps` absorbs rounding on edges.
pub fn point_in_triangle(p: &Point, tri: &[Point; 3], eps: f64) -> bool {
    let d1 = cross(&tri[0], &tri[1], p);
    let d2 = cross(&tri[1], &tri[2], p);
    let d3 = cross(&tri[2], &tri[0], p);
    let has_neg = d1 < -eps || d2 < -eps || d3 < -eps;
    let has_pos = d1 > eps || d2 > eps || d3 > eps;
    !(has_neg && has_pos)
}

pub fn sample_in_triangle<R: Rng>(rng: &mut R, tri: &[Point; 3]) -> Point {
    let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    Point::new(
        tri[0].x + u * (tri[1].x - tri[0].x) + v * (tri[2].x - tri[0].x),
        tri[0].y + u * (tri[1].y - tri[0].y) + v * (tri[2].y - tri[0].y),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexFace {
    pub center: Point,
    pub side: f64,
    /// Counter-clockwise rotation in radians; 0 is flat-top.
    pub rotation: f64,
}

impl HexFace {
    pub fn new(center: Point, side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(invalid(format!("hexagon side must be > 0, got {side}")));
        }
        Ok(Self {
            center,
            side,
            rotation: 0.0,
        })
    }

    pub fn vertex(&self, k: usize) -> Point {
        let angle = self.rotation + PI / 3.0 * (k % 6) as f64;
        Point::new(
            self.center.x + self.side * angle.cos(),
            self.center.y + self.side * angle.sin(),
        )
    }

    /// Central triangle between vertices `k` and `k + 1`.
    pub fn sector(&self, k: usize) -> [Point; 3] {
        [self.center, self.vertex(k), self.vertex(k + 1)]
    }

    /// The three triangles that must each hold a firewall.
    pub fn triangles(&self) -> [[Point; 3]; 3] {
        CLOSED_SECTORS.map(|k| self.sector(k))
    }

    fn eps(&self) -> f64 {
        1e-12 * self.side * self.side
    }

    /// Sector containing `p`, `None` outside the hexagon. Points on a shared
    /// boundary report the lowest sector.
    pub fn sector_of(&self, p: &Point) -> Option<usize> {
        (0..6).find(|&k| point_in_triangle(p, &self.sector(k), self.eps()))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.sector_of(p).is_some()
    }

    pub fn area(&self) -> f64 {
        1.5 * 3f64.sqrt() * self.side * self.side
    }

    /// Uniform point in the hexagon.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Point {
        let k = rng.random_range(0..6);
        sample_in_triangle(rng, &self.sector(k))
    }

    /// Smallest window containing the hexagon.
    pub fn bounding_window(&self) -> Result<Window> {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for k in 0..6 {
            let v = self.vertex(k);
            x0 = x0.min(v.x);
            y0 = y0.min(v.y);
            x1 = x1.max(v.x);
            y1 = y1.max(v.y);
        }
        Window::new(x0, y0, x1, y1)
    }
}

/// True iff every designated triangle holds at least one firewall.
pub fn hex_face_closed(face: &HexFace, firewalls: &[Point]) -> bool {
    let eps = face.eps();
    face.triangles()
        .iter()
        .all(|t| firewalls.iter().any(|f| point_in_triangle(f, t, eps)))
}

/// Monte Carlo frequency of closed faces under a PPP of `lambda_f`
/// firewalls, one independent pattern per sample.
pub fn closed_face_frequency(lambda_f: f64, side: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(invalid("samples must be >= 1"));
    }
    let face = HexFace::new(Point::new(0.0, 0.0), side)?;
    let window = face.bounding_window()?;
    let closed = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let fw = sample_ppp(lambda_f, window, seed::mix(seed, i))?;
            Ok::<_, crate::Error>(hex_face_closed(&face, &fw.points) as usize)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = closed as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockingCounterexample {
    pub firewalls: [Point; 3],
    pub p: Point,
    pub q: Point,
}

/// Looks for two uncovered candidates in different open sectors within
/// `face.side` of each other. A candidate is uncovered when it is farther
/// than `r_f` from every firewall.
pub fn find_blocking_violation(face: &HexFace, firewalls: &[Point], r_f: f64, candidates: &[Point]) -> Option<(Point, Point)> {
    let r_f2 = r_f * r_f;
    let side2 = face.side * face.side;
    let uncovered: Vec<(usize, Point)> = candidates
        .iter()
        .filter(|c| firewalls.iter().all(|f| f.dist_sq(c) > r_f2))
        .filter_map(|c| face.sector_of(c).map(|k| (k, *c)))
        .collect();
    for (i, (ki, p)) in uncovered.iter().enumerate() {
        for (kj, q) in &uncovered[i + 1..] {
            if ki != kj && p.dist_sq(q) <= side2 {
                return Some((*p, *q));
            }
        }
    }
    None
}

/// Candidate devices per configuration in the blocking search.
pub const BLOCKING_CANDIDATES: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockingReport {
    pub trials: usize,
    pub uncovered_candidates: usize,
    /// Smallest distance seen between uncovered candidates in different open sectors.
    pub min_cross_sector_separation: f64,
    pub counterexample: Option<BlockingCounterexample>,
}

/// Worst-case closed-face search with `r_f = side`: one firewall uniform in
/// each designated triangle, candidate devices uniform in the hexagon.
pub fn blocking_search(side: f64, trials: usize, seed: u64) -> Result<BlockingReport> {
    let face = HexFace::new(Point::new(0.0, 0.0), side)?;
    let side2 = side * side;
    let per_trial: Vec<(usize, f64, Option<BlockingCounterexample>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::mix(seed, t));
            let firewalls = face.triangles().map(|tri| sample_in_triangle(&mut rng, &tri));
            let candidates: Vec<Point> = (0..BLOCKING_CANDIDATES).map(|_| face.sample(&mut rng)).collect();
            let uncovered: Vec<(usize, Point)> = candidates
                .iter()
                .filter(|c| firewalls.iter().all(|f| f.dist_sq(c) > side2))
                .filter_map(|c| face.sector_of(c).map(|k| (k, *c)))
                .collect();
            let mut min_sep = f64::INFINITY;
            for (i, (ki, p)) in uncovered.iter().enumerate() {
                for (kj, q) in &uncovered[i + 1..] {
                    if ki != kj {
                        min_sep = min_sep.min(p.dist(q));
                    }
                }
            }
            let violation = find_blocking_violation(&face, &firewalls, side, &candidates)
                .map(|(p, q)| BlockingCounterexample { firewalls, p, q });
            (uncovered.len(), min_sep, violation)
        })
        .collect();
    Ok(BlockingReport {
        trials,
        uncovered_candidates: per_trial.iter().map(|r| r.0).sum(),
        min_cross_sector_separation: per_trial.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        counterexample: per_trial.into_iter().find_map(|r| r.2),
    })
}

/// `None` when the search finds no violation.
pub fn blocking_counterexample_search(side: f64, trials: usize, seed: u64) -> Result<Option<BlockingCounterexample>> {
    Ok(blocking_search(side, trials, seed)?.counterexample)
}

fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))
}

fn segment_hits_triangle(a: &Point, b: &Point, tri: &[Point; 3]) -> bool {
    point_in_triangle(a, tri, 0.0)
        || point_in_triangle(b, tri, 0.0)
        || (0..3).any(|i| segments_intersect(a, b, &tri[i], &tri[(i + 1) % 3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingLog {
    pub segments: usize,
    /// Both endpoints farther than `r_f` from every firewall.
    pub uncovered_segments: usize,
    /// Uncovered segments passing through a designated triangle.
    pub through_closed_triangle: usize,
}

/// Exploratory: samples segments of length `<= side` with endpoints around
/// the face (possibly outside it) and counts uncovered ones that pass over a
/// designated triangle. Nothing is asserted about the counts.
pub fn crossing_exploration(side: f64, trials: usize, seed: u64) -> Result<CrossingLog> {
    let face = HexFace::new(Point::new(0.0, 0.0), side)?;
    let side2 = side * side;
    let logs: Vec<CrossingLog> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::mix(seed, t));
            let firewalls = face.triangles().map(|tri| sample_in_triangle(&mut rng, &tri));
            let mut log = CrossingLog {
                segments: 0,
                uncovered_segments: 0,
                through_closed_triangle: 0,
            };
            for _ in 0..BLOCKING_CANDIDATES {
                let r = 1.5 * side * rng.random::<f64>().sqrt();
                let th = 2.0 * PI * rng.random::<f64>();
                let a = Point::new(r * th.cos(), r * th.sin());
                let len = side * rng.random::<f64>();
                let phi = 2.0 * PI * rng.random::<f64>();
                let b = Point::new(a.x + len * phi.cos(), a.y + len * phi.sin());
                log.segments += 1;
                let uncovered = |p: &Point| firewalls.iter().all(|f| f.dist_sq(p) > side2);
                if uncovered(&a) && uncovered(&b) {
                    log.uncovered_segments += 1;
                    if face.triangles().iter().any(|tri| segment_hits_triangle(&a, &b, tri)) {
                        log.through_closed_triangle += 1;
                    }
                }
            }
            log
        })
        .collect();
    Ok(logs.into_iter().fold(
        CrossingLog {
            segments: 0,
            uncovered_segments: 0,
            through_closed_triangle: 0,
        },
        |acc, l| CrossingLog {
            segments: acc.segments + l.segments,
            uncovered_segments: acc.uncovered_segments + l.uncovered_segments,
            through_closed_triangle: acc.through_closed_triangle + l.through_closed_triangle,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeOrientation {
    /// Separates a lower cell S1 from an upper cell S2.
    Horizontal,
    /// Separates a left cell S1 from a right cell S2.
    Vertical,
}

/// Square lattice of side `r_r / √5` anchored at `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareLattice {
    pub origin: Point,
    pub s: f64,
    pub r_f: f64,
}

impl SquareLattice {
    pub fn new(origin: Point, r_r: f64, r_f: f64) -> Result<Self> {
        if !(r_r.is_finite() && r_r > 0.0 && r_f.is_finite() && r_f > 0.0) {
            return Err(invalid(format!("need r_r, r_f > 0, got {r_r}, {r_f}")));
        }
        Ok(Self {
            origin,
            s: r_r / 5f64.sqrt(),
            r_f,
        })
    }

    /// Cells A(e) extends beyond S1 ∪ S2 on every side: ceil(r_f / s).
    pub fn reach(&self) -> i64 {
        ceil_tol(self.r_f / self.s)
    }

    /// Closed rectangle covering cells `i0..=i1` by `j0..=j1`.
    pub fn cells_rect(&self, i0: i64, j0: i64, i1: i64, j1: i64) -> Rect {
        Rect::new(
            self.origin.x + i0 as f64 * self.s,
            self.origin.y + j0 as f64 * self.s,
            self.origin.x + (i1 + 1) as f64 * self.s,
            self.origin.y + (j1 + 1) as f64 * self.s,
        )
    }

    pub fn cell(&self, i: i64, j: i64) -> Rect {
        self.cells_rect(i, j, i, j)
    }

    /// Vertical edge `(i, j)` lies on `x = i s`, between cells `(i-1, j)` and `(i, j)`;
    /// horizontal edge `(i, j)` lies on `y = j s`, between cells `(i, j-1)` and `(i, j)`.
    pub fn edge(&self, orientation: EdgeOrientation, i: i64, j: i64) -> SquareEdge {
        SquareEdge {
            lattice: *self,
            orientation,
            i,
            j,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareEdge {
    pub lattice: SquareLattice,
    pub orientation: EdgeOrientation,
    pub i: i64,
    pub j: i64,
}

impl SquareEdge {
    /// Cell coordinates of (S1, S2).
    pub fn cells(&self) -> ((i64, i64), (i64, i64)) {
        match self.orientation {
            EdgeOrientation::Vertical => ((self.i - 1, self.j), (self.i, self.j)),
            EdgeOrientation::Horizontal => ((self.i, self.j - 1), (self.i, self.j)),
        }
    }

    pub fn s1(&self) -> Rect {
        let ((i, j), _) = self.cells();
        self.lattice.cell(i, j)
    }

    pub fn s2(&self) -> Rect {
        let (_, (i, j)) = self.cells();
        self.lattice.cell(i, j)
    }

    pub fn union_rect(&self) -> Rect {
        let ((i0, j0), (i1, j1)) = self.cells();
        self.lattice.cells_rect(i0, j0, i1, j1)
    }

    /// Corners of S1 ∪ S2.
    pub fn corners(&self) -> [Point; 4] {
        let r = self.union_rect();
        [
            Point::new(r.x0, r.y0),
            Point::new(r.x1, r.y0),
            Point::new(r.x1, r.y1),
            Point::new(r.x0, r.y1),
        ]
    }

    /// Smallest cell-aligned region containing the radius-`r_f` disks around
    /// the corners of S1 ∪ S2.
    pub fn dependency_region(&self) -> Rect {
        let ((i0, j0), (i1, j1)) = self.cells();
        let k = self.lattice.reach();
        self.lattice.cells_rect(i0 - k, j0 - k, i1 + k, j1 + k)
    }

    /// Size of A(e) in cells, `(width, height)`.
    pub fn dependency_cells(&self) -> (u64, u64) {
        let k = self.lattice.reach() as u64;
        match self.orientation {
            EdgeOrientation::Vertical => (2 * k + 2, 2 * k + 1),
            EdgeOrientation::Horizontal => (2 * k + 1, 2 * k + 2),
        }
    }
}

/// Open iff S1 and S2 each hold a device and A(e) holds no firewall.
pub fn square_edge_open(edge: &SquareEdge, devices: &[Point], firewalls: &[Point]) -> bool {
    let (s1, s2, a) = (edge.s1(), edge.s2(), edge.dependency_region());
    devices.iter().any(|d| s1.contains(d))
        && devices.iter().any(|d| s2.contains(d))
        && !firewalls.iter().any(|f| a.contains(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub edges_checked: usize,
    pub open_edges: usize,
    /// Open edges whose devices are not all mutually in range, all
    /// susceptible and all in one ISG component.
    pub violations: usize,
}

/// Checks every open lattice edge whose two cells lie inside the window.
pub fn verify_open_edge_coupling(realization: &Realization, lattice_origin: Point) -> Result<CouplingReport> {
    let lattice = SquareLattice::new(lattice_origin, realization.r_r, realization.r_f)?;
    let window = realization.window();
    let devices = &realization.devices.points;
    let firewalls = &realization.firewalls.points;
    let s = lattice.s;
    let dev_index = GridIndex::build(devices, s)?;
    let fw_index = GridIndex::build(firewalls, realization.r_f.max(s))?;
    let vertex = realization.vertex_of_device();
    let labels = &realization.isg.component_label;
    let r2 = realization.r_r * realization.r_r;

    // cell columns/rows fully inside the window
    let i_lo = ceil_tol((window.x_min - lattice.origin.x) / s);
    let i_hi = ((window.x_max - lattice.origin.x) / s).floor() as i64 - 1;
    let j_lo = ceil_tol((window.y_min - lattice.origin.y) / s);
    let j_hi = ((window.y_max - lattice.origin.y) / s).floor() as i64 - 1;

    let mut cell_cache = std::collections::HashMap::new();
    let mut cell_devices = |i: i64, j: i64| -> Vec<usize> {
        cell_cache
            .entry((i, j))
            .or_insert_with(|| dev_index.within_rect(devices, &lattice.cell(i, j)))
            .clone()
    };

    let mut report = CouplingReport {
        edges_checked: 0,
        open_edges: 0,
        violations: 0,
    };
    let mut edges = Vec::new();
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            if i > i_lo {
                edges.push(lattice.edge(EdgeOrientation::Vertical, i, j));
            }
            if j > j_lo {
                edges.push(lattice.edge(EdgeOrientation::Horizontal, i, j));
            }
        }
    }
    for edge in edges {
        report.edges_checked += 1;
        let ((a0, b0), (a1, b1)) = edge.cells();
        let d1 = cell_devices(a0, b0);
        if d1.is_empty() {
            continue;
        }
        let d2 = cell_devices(a1, b1);
        if d2.is_empty() {
            continue;
        }
        if !fw_index.within_rect(firewalls, &edge.dependency_region()).is_empty() {
            continue;
        }
        report.open_edges += 1;
        let mut members = d1;
        members.extend(d2);
        members.sort_unstable();
        members.dedup();

        let in_range = members
            .iter()
            .enumerate()
            .all(|(n, &a)| members[n + 1..].iter().all(|&b| devices[a].dist_sq(&devices[b]) <= r2));
        let verts: Option<Vec<usize>> = members.iter().map(|&d| vertex[d]).collect();
        let one_component = verts
            .as_ref()
            .is_some_and(|v| v.iter().all(|&k| labels[k] == labels[v[0]]));
        if !(in_range && one_component) {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// The dependent-edge region: `(2a - 2) x (2b - 1)` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct A0Region {
    pub a: u64,
    pub b: u64,
}

impl A0Region {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a < 2 || b < 2 {
            return Err(invalid(format!("need a, b >= 2, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn width_cells(&self) -> u64 {
        2 * self.a - 2
    }

    pub fn height_cells(&self) -> u64 {
        2 * self.b - 1
    }
}

/// Counts unit lattice edges with both endpoints in the closed A0 region by
/// walking every edge of a larger surrounding patch.
pub fn count_dependent_edges_bruteforce(a: u64, b: u64) -> Result<u64> {
    let region = A0Region::new(a, b)?;
    let (w, h) = (region.width_cells() as i64, region.height_cells() as i64);
    let inside = |x: i64, y: i64| (0..=w).contains(&x) && (0..=h).contains(&y);
    let mut count = 0;
    for x in -2..=w + 2 {
        for y in -2..=h + 2 {
            if inside(x, y) && inside(x + 1, y) {
                count += 1;
            }
            if inside(x, y) && inside(x, y + 1) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Minimal separations between two horizontal edges that make their
/// dependency regions disjoint: `(2s ceil(r_f/s), 2s ceil(r_f/s) + 2s)`.
/// The first is the gap between side-by-side edges on one row, the second
/// the distance between parallel edges stacked in one column.
pub fn independence_offsets(r_f: f64, s: f64) -> Result<(f64, f64)> {
    if !(r_f.is_finite() && r_f > 0.0 && s.is_finite() && s > 0.0) {
        return Err(invalid(format!("need r_f, s > 0, got {r_f}, {s}")));
    }
    let k = ceil_tol(r_f / s) as f64;
    Ok((2.0 * s * k, 2.0 * s * k + 2.0 * s))
}

/// One row of a validator report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorRow {
    pub check_name: String,
    pub trials: usize,
    pub violations: usize,
    pub details: String,
}

pub fn write_validator_csv<W: Write>(rows: &[ValidatorRow], mut out: W) -> Result<()> {
    writeln!(out, "check_name,trials,violations,details")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},\"{}\"",
            r.check_name,
            r.trials,
            r.violations,
            r.details.replace('"', "\"\"")
        )?;
    }
    Ok(())
}

/// Trial counts for [`run_validation_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSize {
    pub face_samples: usize,
    pub blocking_trials: usize,
    pub coupling_realizations: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self {
            face_samples: 2000,
            blocking_trials: 100_000,
            coupling_realizations: 100,
        }
    }
}

/// Random configurations for the open-edge coupling check, from sparse to
/// dense devices and from no firewalls to heavy protection.
pub fn coupling_configs(count: usize, master_seed: u64) -> Result<Vec<(NetworkConfig, Point)>> {
    const LAMBDA_R: [f64; 5] = [0.3, 0.8, 1.5, 3.0, 6.0];
    const LAMBDA_F: [f64; 5] = [0.0, 0.01, 0.03, 0.07, 0.15];
    const R_F: [f64; 2] = [2.0, 3.0];
    let mut rng = seed::rng(seed::mix(master_seed, 0x1a77));
    (0..count)
        .map(|n| {
            let cfg = NetworkConfig::new(
                LAMBDA_R[n % LAMBDA_R.len()],
                2.0,
                LAMBDA_F[(n / LAMBDA_R.len()) % LAMBDA_F.len()],
                R_F[(n / (LAMBDA_R.len() * LAMBDA_F.len())) % R_F.len()],
                40.0,
                seed::mix(master_seed, n as u64),
            )?;
            let origin = Point::new(rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0);
            Ok((cfg, origin))
        })
        .collect()
}

/// Runs every lattice check and returns one row per check.
pub fn run_validation_suite(master_seed: u64, size: SuiteSize) -> Result<Vec<ValidatorRow>> {
    let mut rows = Vec::new();
    let r_r = 2.0;
    let base = crate::bounds::subcritical_sufficient_intensity_rounded(r_r)?;
    for (n, mult) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let lambda_f = mult * base;
        let (freq, se) = closed_face_frequency(lambda_f, r_r, size.face_samples, seed::mix(master_seed, 100 + n as u64))?;
        let expected = crate::bounds::closed_face_probability(lambda_f, r_r)?;
        let ok = (freq - expected).abs() <= 3.0 * se.max(f64::EPSILON);
        rows.push(ValidatorRow {
            check_name: format!("closed_face_frequency_x{mult}"),
            trials: size.face_samples,
            violations: usize::from(!ok),
            details: format!("lambda_f={lambda_f} observed={freq} expected={expected} se={se}"),
        });
    }

    let blocking = blocking_search(r_r, size.blocking_trials, seed::mix(master_seed, 200))?;
    rows.push(ValidatorRow {
        check_name: "hex_blocking".into(),
        trials: size.blocking_trials,
        violations: usize::from(blocking.counterexample.is_some()),
        details: format!(
            "uncovered_candidates={} min_cross_sector_separation={}",
            blocking.uncovered_candidates, blocking.min_cross_sector_separation
        ),
    });

    let configs = coupling_configs(size.coupling_realizations, seed::mix(master_seed, 300))?;
    let reports: Vec<CouplingReport> = configs
        .par_iter()
        .map(|(cfg, origin)| {
            let r = crate::network::build_isg(cfg, seed::trial_seed(cfg.master_seed, 0))?;
            verify_open_edge_coupling(&r, *origin)
        })
        .collect::<Result<_>>()?;
    rows.push(ValidatorRow {
        check_name: "open_edge_coupling".into(),
        trials: reports.len(),
        violations: reports.iter().map(|r| r.violations).sum(),
        details: format!(
            "edges_checked={} open_edges={}",
            reports.iter().map(|r| r.edges_checked).sum::<usize>(),
            reports.iter().map(|r| r.open_edges).sum::<usize>()
        ),
    });

    let mut mismatches = 0;
    for a in 2..=8 {
        for b in 2..=8 {
            if count_dependent_edges_bruteforce(a, b)? != crate::bounds::dependent_edge_count(a, b) {
                mismatches += 1;
            }
        }
    }
    rows.push(ValidatorRow {
        check_name: "dependent_edge_count".into(),
        trials: 49,
        violations: mismatches,
        details: format!("a,b in [2,8]; (4,3) -> {}", count_dependent_edges_bruteforce(4, 3)?),
    });
    Ok(rows)
}
