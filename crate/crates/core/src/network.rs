//! Device graph, protected/susceptible split and the infection-susceptible
//! graph (ISG): the device graph restricted to devices outside every
//! firewall's secured zone.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::seed;
use crate::spatial::{sample_ppp, sig_digits, GridIndex, Point, PointSet, Window};

/// Model parameters for one family of realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Device intensity, devices per m².
    pub lambda_r: f64,
    /// Device-to-device range, m.
    pub r_r: f64,
    /// Firewall intensity, firewalls per m².
    pub lambda_f: f64,
    /// Secured-zone radius, m.
    pub r_f: f64,
    pub window: Window,
    pub master_seed: u64,
    /// Firewalls are sampled on the window grown by this much on every side.
    #[serde(default)]
    pub firewall_margin: f64,
    /// Permits `r_f < r_r`.
    #[serde(default)]
    pub allow_small_rf: bool,
}

impl NetworkConfig {
    /// Square `size x size` window, no firewall margin.
    pub fn new(lambda_r: f64, r_r: f64, lambda_f: f64, r_f: f64, size: f64, master_seed: u64) -> Result<Self> {
        let cfg = Self {
            lambda_r,
            r_r,
            lambda_f,
            r_f,
            window: Window::square(size)?,
            master_seed,
            firewall_margin: 0.0,
            allow_small_rf: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        for (name, v) in [("lambda_r", self.lambda_r), ("lambda_f", self.lambda_f)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("r_r", self.r_r), ("r_f", self.r_f)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(self.firewall_margin.is_finite() && self.firewall_margin >= 0.0) {
            return Err(invalid(format!(
                "firewall_margin must be finite and >= 0, got {}",
                self.firewall_margin
            )));
        }
        if self.r_f < self.r_r && !self.allow_small_rf {
            return Err(invalid(format!(
                "r_f = {} < r_r = {}; set allow_small_rf to override",
                self.r_f, self.r_r
            )));
        }
        Ok(())
    }

    pub fn with_lambda_f(mut self, lambda_f: f64) -> Self {
        self.lambda_f = lambda_f;
        self
    }

    pub fn with_lambda_r(mut self, lambda_r: f64) -> Self {
        self.lambda_r = lambda_r;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.firewall_margin = margin;
        self
    }

    pub fn firewall_window(&self) -> Result<Window> {
        self.window.expanded(self.firewall_margin)
    }
}

/// Partition of device indices into protected (inside some secured zone)
/// and susceptible.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub protected_idx: Vec<usize>,
    pub susceptible_idx: Vec<usize>,
}

impl Classification {
    pub fn device_count(&self) -> usize {
        self.protected_idx.len() + self.susceptible_idx.len()
    }

    pub fn protected_fraction(&self) -> Option<f64> {
        let n = self.device_count();
        (n > 0).then(|| self.protected_idx.len() as f64 / n as f64)
    }
}

/// Device `i` is protected iff some firewall is within closed distance `r_f`.
pub fn classify_devices(devices: &PointSet, firewalls: &PointSet, r_f: f64) -> Result<Classification> {
    classify_points(&devices.points, &firewalls.points, r_f)
}

pub(crate) fn classify_points(devices: &[Point], firewalls: &[Point], r_f: f64) -> Result<Classification> {
    if !(r_f.is_finite() && r_f > 0.0) {
        return Err(invalid(format!("r_f must be > 0, got {r_f}")));
    }
    let index = GridIndex::build(firewalls, r_f)?;
    let (mut protected_idx, mut susceptible_idx) = (Vec::new(), Vec::new());
    for (i, d) in devices.iter().enumerate() {
        if index.any_within(firewalls, *d, r_f) {
            protected_idx.push(i);
        } else {
            susceptible_idx.push(i);
        }
    }
    Ok(Classification {
        protected_idx,
        susceptible_idx,
    })
}

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Label of each element: the smallest element of its set.
    pub fn canonical_labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut min_of_root = vec![usize::MAX; n];
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        for (i, &r) in roots.iter().enumerate() {
            min_of_root[r] = min_of_root[r].min(i);
        }
        roots.into_iter().map(|r| min_of_root[r]).collect()
    }
}

/// Component labels of the random geometric graph on `points` with closed
/// connection radius `radius`. Labels are the smallest member index.
pub fn component_labels(points: &[Point], radius: f64) -> Result<Vec<usize>> {
    check_radius(radius)?;
    let index = GridIndex::build(points, radius)?;
    let mut uf = UnionFind::new(points.len());
    index.for_each_pair_within(points, radius, |i, j| {
        uf.union(i, j);
    });
    Ok(uf.canonical_labels())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be > 0, got {radius}")));
    }
    Ok(())
}

/// Adjacency lists plus component labels of a random geometric graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Rgg {
    pub adjacency: Vec<Vec<usize>>,
    pub component: Vec<usize>,
}

pub fn build_rgg(points: &[Point], radius: f64) -> Result<Rgg> {
    check_radius(radius)?;
    let index = GridIndex::build(points, radius)?;
    let mut adjacency = vec![Vec::new(); points.len()];
    let mut uf = UnionFind::new(points.len());
    index.for_each_pair_within(points, radius, |i, j| {
        adjacency[i].push(j);
        adjacency[j].push(i);
        uf.union(i, j);
    });
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(Rgg {
        adjacency,
        component: uf.canonical_labels(),
    })
}

/// Infection-susceptible graph. Vertex `k` is device `vertices[k]`;
/// adjacency and component labels are in vertex positions.
#[derive(Debug, Clone, PartialEq)]
pub struct IsgGraph {
    pub vertices: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
    pub component_label: Vec<usize>,
}

impl IsgGraph {
    pub fn build(devices: &[Point], susceptible: &[usize], r_r: f64) -> Result<Self> {
        let pts: Vec<Point> = susceptible.iter().map(|&i| devices[i]).collect();
        let rgg = build_rgg(&pts, r_r)?;
        Ok(Self {
            vertices: susceptible.to_vec(),
            adjacency: rgg.adjacency,
            component_label: rgg.component,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Component sizes keyed by label, ascending label order.
    pub fn component_sizes(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![0usize; self.len()];
        for &l in &self.component_label {
            counts[l] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentSummary {
    /// `None` for an empty graph.
    pub label: Option<usize>,
    pub size: usize,
}

/// Largest ISG component; ties go to the smallest label.
pub fn largest_component(isg: &IsgGraph) -> ComponentSummary {
    let mut best = ComponentSummary { label: None, size: 0 };
    for (label, size) in isg.component_sizes() {
        if size > best.size {
            best = ComponentSummary {
                label: Some(label),
                size,
            };
        }
    }
    best
}

/// One sampled world.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub devices: PointSet,
    pub firewalls: PointSet,
    pub classification: Classification,
    pub isg: IsgGraph,
    pub r_r: f64,
    pub r_f: f64,
}

impl Realization {
    /// Builds a realization from given point sets.
    pub fn from_parts(devices: PointSet, firewalls: PointSet, r_r: f64, r_f: f64) -> Result<Self> {
        let classification = classify_devices(&devices, &firewalls, r_f)?;
        let isg = IsgGraph::build(&devices.points, &classification.susceptible_idx, r_r)?;
        Ok(Self {
            devices,
            firewalls,
            classification,
            isg,
            r_r,
            r_f,
        })
    }

    pub fn window(&self) -> Window {
        self.devices.window
    }

    /// ISG vertex position of each device, `None` for protected devices.
    pub fn vertex_of_device(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.devices.len()];
        for (k, &d) in self.isg.vertices.iter().enumerate() {
            map[d] = Some(k);
        }
        map
    }

    /// Debug dump: `x,y,kind,component`, devices first then firewalls.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,kind,component")?;
        let vertex = self.vertex_of_device();
        for (i, p) in self.devices.points.iter().enumerate() {
            let (kind, comp) = match vertex[i] {
                Some(k) => ("susceptible", self.isg.component_label[k] as i64),
                None => ("protected", -1),
            };
            writeln!(out, "{},{},{kind},{comp}", sig_digits(p.x, 9), sig_digits(p.y, 9))?;
        }
        for p in &self.firewalls.points {
            writeln!(out, "{},{},firewall,-1", sig_digits(p.x, 9), sig_digits(p.y, 9))?;
        }
        Ok(())
    }
}

/// Device and firewall point sets for trial `trial_seed`.
pub fn sample_world(config: &NetworkConfig, trial_seed: u64) -> Result<(PointSet, PointSet)> {
    config.validate()?;
    let devices = sample_ppp(
        config.lambda_r,
        config.window,
        seed::stream_seed(trial_seed, seed::DEVICE_STREAM),
    )?;
    let firewalls = sample_ppp(
        config.lambda_f,
        config.firewall_window()?,
        seed::stream_seed(trial_seed, seed::FIREWALL_STREAM),
    )?;
    Ok((devices, firewalls))
}

/// Samples devices and firewalls for one trial, classifies the devices and
/// builds the ISG.
pub fn build_isg(config: &NetworkConfig, trial_seed: u64) -> Result<Realization> {
    let (devices, firewalls) = sample_world(config, trial_seed)?;
    Realization::from_parts(devices, firewalls, config.r_r, config.r_f)
}
