//! Homogeneous Poisson point processes on rectangles and uniform-grid
//! fixed-radius neighbor queries.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{invalid, Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Closed axis-aligned rectangle, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let w = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        w.validate()?;
        Ok(w)
    }

    /// `[0, size] x [0, size]`.
    pub fn square(size: f64) -> Result<Self> {
        Self::new(0.0, 0.0, size, size)
    }

    pub fn validate(&self) -> Result<()> {
        let coords = [self.x_min, self.y_min, self.x_max, self.y_max];
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid(format!("window has non-finite bounds: {self:?}")));
        }
        if self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(invalid(format!("degenerate window: {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Grows the window by `margin` on every side.
    pub fn expanded(&self, margin: f64) -> Result<Self> {
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(invalid(format!("margin must be finite and >= 0, got {margin}")));
        }
        Self::new(
            self.x_min - margin,
            self.y_min - margin,
            self.x_max + margin,
            self.y_max + margin,
        )
    }
}

/// A realized point pattern together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub intensity: f64,
    pub window: Window,
    pub seed: u64,
}

impl PointSet {
    /// Wraps hand-placed points. Every point must lie in `window`; the
    /// recorded intensity is the empirical one.
    pub fn from_points(window: Window, points: Vec<Point>) -> Result<Self> {
        window.validate()?;
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(invalid(format!("point {p:?} outside window {window:?}")));
        }
        let intensity = points.len() as f64 / window.area();
        Ok(Self {
            points,
            intensity,
            window,
            seed: 0,
        })
    }

    pub fn empty(window: Window) -> Self {
        Self {
            points: Vec::new(),
            intensity: 0.0,
            window,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `x,y` rows with 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y")?;
        for p in &self.points {
            writeln!(out, "{},{}", sig_digits(p.x, 9), sig_digits(p.y, 9))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`PointSet::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, window: Window) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line == "x,y") {
                continue;
            }
            let mut fields = line.split(',');
            let parse = |f: Option<&str>| -> Result<f64> {
                f.and_then(|s| s.trim().parse().ok()).ok_or_else(|| {
                    Error::Csv(format!("line {}: expected `x,y`, got `{line}`", lineno + 1))
                })
            };
            let x = parse(fields.next())?;
            let y = parse(fields.next())?;
            points.push(Point::new(x, y));
        }
        Self::from_points(window, points)
    }
}

/// Formats `v` in plain decimal with `digits` significant digits.
pub fn sig_digits(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Smallest `k` with `P(Poisson(mean) <= k) >= u`.
///
/// Monotone in `mean` for fixed `u`, which is what makes point sets drawn
/// from one seed nested across intensities.
pub fn poisson_quantile(mean: f64, u: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    let mut hi = (mean + 40.0 * mean.sqrt() + 40.0).ceil() as u64;
    while dist.cdf(hi) < u {
        hi *= 2;
    }
    let mut lo = 0u64;
    if dist.cdf(0) >= u {
        return 0;
    }
    // invariant: cdf(lo) < u <= cdf(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if dist.cdf(mid) >= u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Samples a homogeneous PPP of `intensity` points per m² on `window`.
///
/// The count is drawn by inverting the Poisson CDF at the first uniform of
/// the stream and coordinates follow from the rest, so two calls with the
/// same seed and intensities `a <= b` return nested point lists: the first is
/// a prefix of the second.
pub fn sample_ppp(intensity: f64, window: Window, seed: u64) -> Result<PointSet> {
    if !intensity.is_finite() || intensity < 0.0 {
        return Err(invalid(format!(
            "intensity must be finite and >= 0, got {intensity}"
        )));
    }
    window.validate()?;
    let mut rng = seed::rng(seed);
    let u: f64 = rng.random();
    let n = poisson_quantile(intensity * window.area(), u) as usize;
    let (w, h) = (window.width(), window.height());
    let points = (0..n)
        .map(|_| {
            let x = window.x_min + rng.random::<f64>() * w;
            let y = window.y_min + rng.random::<f64>() * h;
            Point::new(x.min(window.x_max), y.min(window.y_max))
        })
        .collect();
    Ok(PointSet {
        points,
        intensity,
        window,
        seed,
    })
}

/// Axis-aligned closed rectangle used for region queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// True when the open interiors intersect (positive-area overlap).
    pub fn overlaps_interior(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn diagonal(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }
}

pub type Cell = (i64, i64);

/// Uniform grid: a point at `(x, y)` is stored in cell
/// `(floor(x / cell_size), floor(y / cell_size))`. Cells span the bounding
/// box of the indexed points and are stored contiguously.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_size: f64,
    origin: Cell,
    nx: i64,
    ny: i64,
    /// `start[c]..start[c + 1]` indexes `order` for cell `c`.
    start: Vec<usize>,
    order: Vec<usize>,
}

impl GridIndex {
    pub fn build(points: &[Point], cell_size: f64) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(invalid(format!("cell_size must be > 0, got {cell_size}")));
        }
        let cells: Vec<Cell> = points.iter().map(|p| cell_of(p, cell_size)).collect();
        let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for &(cx, cy) in &cells {
            lo = (lo.0.min(cx), lo.1.min(cy));
            hi = (hi.0.max(cx), hi.1.max(cy));
        }
        let (nx, ny) = if cells.is_empty() { (0, 0) } else { (hi.0 - lo.0 + 1, hi.1 - lo.1 + 1) };
        let flat = |(cx, cy): Cell| ((cy - lo.1) * nx + (cx - lo.0)) as usize;
        let mut start = vec![0usize; (nx * ny) as usize + 1];
        for &c in &cells {
            start[flat(c) + 1] += 1;
        }
        for k in 1..start.len() {
            start[k] += start[k - 1];
        }
        let mut fill = start.clone();
        let mut order = vec![0usize; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            let f = flat(c);
            order[fill[f]] = i;
            fill[f] += 1;
        }
        Ok(Self {
            cell_size,
            origin: lo,
            nx,
            ny,
            start,
            order,
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_of(&self, p: &Point) -> Cell {
        cell_of(p, self.cell_size)
    }

    /// Members of `cell`, ascending.
    pub fn bucket(&self, cell: Cell) -> &[usize] {
        let (x, y) = (cell.0.wrapping_sub(self.origin.0), cell.1.wrapping_sub(self.origin.1));
        if x < 0 || y < 0 || x >= self.nx || y >= self.ny {
            return &[];
        }
        let f = (y * self.nx + x) as usize;
        &self.order[self.start[f]..self.start[f + 1]]
    }

    /// Non-empty cells with their members.
    pub fn buckets(&self) -> impl Iterator<Item = (Cell, &[usize])> {
        (0..self.ny).flat_map(move |y| (0..self.nx).map(move |x| (self.origin.0 + x, self.origin.1 + y)))
            .map(|c| (c, self.bucket(c)))
            .filter(|(_, b)| !b.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn ring(&self, radius: f64) -> i64 {
        (radius / self.cell_size).ceil() as i64
    }

    /// Indices of `points` within closed distance `radius` of `query`, ascending.
    pub fn neighbors_within(&self, points: &[Point], query: Point, radius: f64) -> Result<Vec<usize>> {
        if radius.is_nan() || radius < 0.0 {
            return Err(invalid(format!("radius must be >= 0, got {radius}")));
        }
        let mut out = Vec::new();
        self.visit_within(points, query, radius, |i| {
            out.push(i);
            true
        });
        out.sort_unstable();
        Ok(out)
    }

    /// True if some point lies within closed distance `radius` of `query`.
    pub fn any_within(&self, points: &[Point], query: Point, radius: f64) -> bool {
        let mut found = false;
        self.visit_within(points, query, radius, |_| {
            found = true;
            false
        });
        found
    }

    /// Calls `f` for each point within `radius`; stops early when `f` returns false.
    fn visit_within(&self, points: &[Point], query: Point, radius: f64, mut f: impl FnMut(usize) -> bool) {
        if self.order.is_empty() {
            return;
        }
        let r2 = radius * radius;
        let ring = self.ring(radius);
        let (cx, cy) = self.cell_of(&query);
        for dx in -ring..=ring {
            for dy in -ring..=ring {
                for &i in self.bucket((cx + dx, cy + dy)) {
                    if points[i].dist_sq(&query) <= r2 && !f(i) {
                        return;
                    }
                }
            }
        }
    }

    /// Indices of points inside the closed rectangle, ascending.
    pub fn within_rect(&self, points: &[Point], rect: &Rect) -> Vec<usize> {
        let (cx0, cy0) = cell_of(&Point::new(rect.x0, rect.y0), self.cell_size);
        let (cx1, cy1) = cell_of(&Point::new(rect.x1, rect.y1), self.cell_size);
        let mut out = Vec::new();
        for cx in cx0..=cx1 {
            for cy in cy0..=cy1 {
                out.extend(self.bucket((cx, cy)).iter().copied().filter(|&i| rect.contains(&points[i])));
            }
        }
        out.sort_unstable();
        out
    }

    /// Calls `f(i, j)` once for every unordered pair `i < j` at distance `<= radius`.
    pub fn for_each_pair_within(&self, points: &[Point], radius: f64, mut f: impl FnMut(usize, usize)) {
        let r2 = radius * radius;
        let ring = self.ring(radius);
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = self.cell_of(p);
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for &j in self.bucket((cx + dx, cy + dy)) {
                        if j > i && points[j].dist_sq(p) <= r2 {
                            f(i, j);
                        }
                    }
                }
            }
        }
    }
}

#[inline]
fn cell_of(p: &Point, cell_size: f64) -> Cell {
    ((p.x / cell_size).floor() as i64, (p.y / cell_size).floor() as i64)
}

/// Exhaustive O(n) scan; the reference for [`GridIndex::neighbors_within`].
pub fn brute_force_neighbors(points: &[Point], query: Point, radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dist_sq(&query) <= r2)
        .map(|(i, _)| i)
        .collect()
}
