//! Point-set generators, point and edge files, stats CSV and SVG output.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use thiserror::Error;

use crate::graph::{Edge, Provenance, YaoGraph};
use crate::kernel::{turn_direction, KernelMode, Point};
use crate::sweep::PassStats;

/// Center and standard deviation per axis of the gaussian distribution.
pub const GAUSSIAN_CENTER: f64 = 0.5;
pub const GAUSSIAN_SIGMA: f64 = 0.25;
/// Center coordinate and radius of the circle distribution.
pub const CIRCLE_CENTER: f64 = 0.5;
pub const CIRCLE_RADIUS: f64 = 0.5;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("duplicate-input: {path}:{line} repeats the point on line {first_line}")]
    DuplicateInput { path: PathBuf, line: usize, first_line: usize },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    Uniform,
    Gaussian,
    Grid,
    Circle,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [Distribution::Uniform, Distribution::Gaussian, Distribution::Grid, Distribution::Circle];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Gaussian => "gaussian",
            Distribution::Grid => "grid",
            Distribution::Circle => "circle",
        }
    }

    /// Name with the fixed parameters, as written to stats files.
    pub fn label(self) -> String {
        match self {
            Distribution::Gaussian => format!("gaussian(center={GAUSSIAN_CENTER} sigma={GAUSSIAN_SIGMA})"),
            Distribution::Circle => format!("circle(center={CIRCLE_CENTER} radius={CIRCLE_RADIUS})"),
            d => d.name().to_string(),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown distribution {s:?} (expected uniform, gaussian, grid or circle)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub distribution: Distribution,
    pub n: usize,
    pub seed: u64,
}

/// Side of the smallest square lattice with at least `n` points.
fn lattice_side(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

/// Points for `spec`. The result depends only on `spec`.
///
/// Grid points are the corners of the `s × s` lattice spanning the unit
/// square, `s = ceil(√n)`, taken row by row; their coordinates `j / (s - 1)`
/// are exact only when `s - 1` is a power of two.
pub fn generate(spec: &GeneratorSpec) -> Vec<Point> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coords: Vec<(f64, f64)> = match spec.distribution {
        Distribution::Uniform => (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect(),
        Distribution::Gaussian => {
            let normal = Normal::new(GAUSSIAN_CENTER, GAUSSIAN_SIGMA).expect("valid normal parameters");
            (0..n).map(|_| (normal.sample(&mut rng), normal.sample(&mut rng))).collect()
        }
        Distribution::Grid => {
            let side = lattice_side(n);
            let scale = side.saturating_sub(1).max(1) as f64;
            (0..n).map(|j| ((j % side) as f64 / scale, (j / side) as f64 / scale)).collect()
        }
        Distribution::Circle => (0..n)
            .map(|j| {
                let d = turn_direction(j as u64, n as u64);
                (CIRCLE_CENTER + CIRCLE_RADIUS * d.x, CIRCLE_CENTER + CIRCLE_RADIUS * d.y)
            })
            .collect(),
    };
    crate::kernel::points_from_coords(&coords)
}

/// Parses a point file: one `x y` pair per line, `#` comments and blank
/// lines ignored. Ids follow line order. `path` only labels errors.
pub fn parse_points<R: BufRead>(reader: R, path: &Path) -> Result<Vec<Point>, IoError> {
    let mut points = Vec::new();
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err(path))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |message: String| IoError::Parse { path: path.to_path_buf(), line: line_no, message };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected two numbers, found {}", fields.len())));
        }
        let mut xy = [0.0; 2];
        for (v, f) in xy.iter_mut().zip(&fields) {
            *v = f.parse::<f64>().map_err(|e| parse_err(format!("{f:?}: {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("non-finite coordinate {f:?}")));
            }
        }
        // + 0.0 folds -0.0 into 0.0
        let key = ((xy[0] + 0.0).to_bits(), (xy[1] + 0.0).to_bits());
        if let Some(&first_line) = seen.get(&key) {
            return Err(IoError::DuplicateInput { path: path.to_path_buf(), line: line_no, first_line });
        }
        seen.insert(key, line_no);
        points.push(Point::new(points.len(), xy[0], xy[1]));
    }
    Ok(points)
}

pub fn read_points(path: &Path) -> Result<Vec<Point>, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_points(BufReader::new(file), path)
}

/// Writes `x y` lines with 17 significant digits, enough to read back the
/// same doubles.
pub fn write_points(points: &[Point], path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "# {} points", points.len()).map_err(io_err(path))?;
    for p in points {
        writeln!(w, "{:.16e} {:.16e}", p.x, p.y).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes the `n k` header and one `source target cone` line per edge.
pub fn write_edges(g: &YaoGraph, path: &Path) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "{} {}", g.n, g.k).map_err(io_err(path))?;
    for e in &g.edges {
        writeln!(w, "{} {} {}", e.source, e.target, e.cone).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads an edge file written by [`write_edges`].
pub fn read_edges(path: &Path, provenance: Provenance) -> Result<YaoGraph, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |message: String| IoError::Parse { path: path.to_path_buf(), line: i + 1, message };
        let nums = body
            .split_whitespace()
            .map(|f| f.parse::<usize>().map_err(|e| parse_err(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        match (header, nums.as_slice()) {
            (None, &[n, k]) => header = Some((n, k)),
            (None, _) => return Err(parse_err("expected header \"n k\"".into())),
            (Some((n, k)), &[source, target, cone]) if source < n && target < n && cone < k => edges.push(Edge { source, target, cone }),
            (Some(_), &[_, _, _]) => return Err(parse_err("edge out of range".into())),
            (Some(_), _) => return Err(parse_err("expected \"source target cone\"".into())),
        }
    }
    let (n, k) = header.ok_or_else(|| IoError::Parse { path: path.to_path_buf(), line: 1, message: "missing header".into() })?;
    Ok(YaoGraph::new(n, k, edges, provenance))
}

/// Per-cone event counters of a sweepline run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EventCounters {
    pub n_input: usize,
    pub n_intersection: usize,
    pub n_deletion: usize,
    pub max_dynamic_queue: usize,
    pub max_sweepline_size: usize,
}

/// One row of the stats CSV. Sweepline runs give one row per cone; naive
/// and grid runs give one row for the whole run without cone or counters.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRecord {
    pub algorithm: String,
    pub kernel: KernelMode,
    /// The cone was rerun with the extended kernel after a numerical failure.
    pub fallback: bool,
    pub distribution: String,
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
    pub cone_index: Option<usize>,
    pub counters: Option<EventCounters>,
    /// `None` when the run did not finish within its time limit.
    pub wall_time_nanos: Option<u64>,
}

pub const STATS_HEADER: [&str; 13] = [
    "algorithm",
    "kernel",
    "distribution",
    "n",
    "k",
    "seed",
    "coneIndex",
    "nInput",
    "nIntersection",
    "nDeletion",
    "maxDynamicQueue",
    "maxSweeplineSize",
    "wallTimeNanos",
];

/// Kernel column value of a cone that fell back.
pub const FALLBACK_KERNEL: &str = "inexact->extended";
/// Wall time column value of a run that hit its time limit.
pub const DNF: &str = "DNF";

/// Describes one run in stats rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RunLabel {
    pub algorithm: String,
    pub kernel: KernelMode,
    pub distribution: String,
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
}

impl RunLabel {
    fn record(&self, cone_index: Option<usize>, counters: Option<EventCounters>, wall_time_nanos: Option<u64>) -> StatsRecord {
        StatsRecord {
            algorithm: self.algorithm.clone(),
            kernel: self.kernel,
            fallback: false,
            distribution: self.distribution.clone(),
            n: self.n,
            k: self.k,
            seed: self.seed,
            cone_index,
            counters,
            wall_time_nanos,
        }
    }

    /// Single row for a run without per-cone counters.
    pub fn whole_run(&self, wall_time_nanos: u64) -> StatsRecord {
        self.record(None, None, Some(wall_time_nanos))
    }

    /// Single row for a run that did not finish.
    pub fn dnf(&self) -> StatsRecord {
        self.record(None, None, None)
    }

    /// One row per cone of a sweepline run. Sub-wedge passes of a cone are
    /// summed and their maxima combined.
    pub fn per_cone(&self, stats: &[PassStats]) -> Vec<StatsRecord> {
        let mut rows: Vec<StatsRecord> = Vec::with_capacity(self.k);
        for s in stats {
            let row = match rows.iter().position(|r| r.cone_index == Some(s.cone)) {
                Some(i) => &mut rows[i],
                None => {
                    rows.push(self.record(Some(s.cone), Some(EventCounters::default()), Some(0)));
                    rows.last_mut().unwrap()
                }
            };
            row.fallback |= s.fallback;
            if s.fallback {
                row.kernel = KernelMode::Extended;
            }
            let c = row.counters.as_mut().unwrap();
            c.n_input += s.n_input;
            c.n_intersection += s.n_intersection;
            c.n_deletion += s.n_deletion;
            c.max_dynamic_queue = c.max_dynamic_queue.max(s.max_dynamic_queue);
            c.max_sweepline_size = c.max_sweepline_size.max(s.max_sweepline_size);
            *row.wall_time_nanos.as_mut().unwrap() += s.wall_time_nanos;
        }
        rows.sort_by_key(|r| r.cone_index);
        rows
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes a header row and one row per record.
pub fn write_stats(records: &[StatsRecord], path: &Path) -> Result<(), IoError> {
    let csv_err = |source| IoError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(STATS_HEADER).map_err(csv_err)?;
    for r in records {
        let c = r.counters;
        w.write_record([
            r.algorithm.clone(),
            if r.fallback { FALLBACK_KERNEL.to_string() } else { r.kernel.name().to_string() },
            r.distribution.clone(),
            r.n.to_string(),
            r.k.to_string(),
            opt(r.seed),
            opt(r.cone_index),
            opt(c.map(|c| c.n_input)),
            opt(c.map(|c| c.n_intersection)),
            opt(c.map(|c| c.n_deletion)),
            opt(c.map(|c| c.max_dynamic_queue)),
            opt(c.map(|c| c.max_sweepline_size)),
            r.wall_time_nanos.map_or_else(|| DNF.to_string(), |t| t.to_string()),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a stats CSV written by [`write_stats`].
pub fn read_stats(path: &Path) -> Result<Vec<StatsRecord>, IoError> {
    let csv_err = |source| IoError::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != STATS_HEADER {
        return Err(IoError::Parse { path: path.to_path_buf(), line: 1, message: format!("unexpected header {header:?}") });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let bad = |col: &str, v: &str| IoError::Parse { path: path.to_path_buf(), line, message: format!("{col}: {v:?}") };
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<Option<u64>, IoError> {
            match field(j) {
                "" => Ok(None),
                v => v.parse().map(Some).map_err(|_| bad(STATS_HEADER[j], v)),
            }
        };
        let req = |j: usize| -> Result<u64, IoError> { num(j)?.ok_or_else(|| bad(STATS_HEADER[j], "")) };
        let (kernel, fallback) = match field(1) {
            FALLBACK_KERNEL => (KernelMode::Extended, true),
            v => (v.parse().map_err(|_| bad("kernel", v))?, false),
        };
        let counters = match (num(7)?, num(8)?, num(9)?, num(10)?, num(11)?) {
            (Some(a), Some(b), Some(c), Some(d), Some(e)) => Some(EventCounters {
                n_input: a as usize,
                n_intersection: b as usize,
                n_deletion: c as usize,
                max_dynamic_queue: d as usize,
                max_sweepline_size: e as usize,
            }),
            (None, None, None, None, None) => None,
            _ => return Err(bad("counters", "partially empty")),
        };
        out.push(StatsRecord {
            algorithm: field(0).to_string(),
            kernel,
            fallback,
            distribution: field(2).to_string(),
            n: req(3)? as usize,
            k: req(4)? as usize,
            seed: num(5)?,
            cone_index: num(6)?.map(|c| c as usize),
            counters,
            wall_time_nanos: match field(12) {
                DNF => None,
                v => Some(v.parse().map_err(|_| bad("wallTimeNanos", v))?),
            },
        });
    }
    Ok(out)
}

/// Renders points as circles and edges as arrows, scaled into an 800 px
/// square viewport.
pub fn svg_string(points: &[Point], g: Option<&YaoGraph>) -> String {
    const SIZE: f64 = 800.0;
    const MARGIN: f64 = 20.0;
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y);
    let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 1.0 };
    // y grows downwards in SVG
    let at = |p: &Point| (MARGIN + (p.x - lo_x) * scale, SIZE - MARGIN - (p.y - lo_y) * scale);
    let radius = (SIZE / (4.0 * (points.len().max(1) as f64).sqrt())).clamp(0.5, 4.0);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" \
         orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#555\"/></marker></defs>\n",
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if let Some(g) = g {
        s.push_str("<g stroke=\"#555\" stroke-width=\"0.6\" marker-end=\"url(#arrow)\">\n");
        for e in &g.edges {
            let ((x1, y1), (x2, y2)) = (at(&points[e.source]), at(&points[e.target]));
            s.push_str(&format!("<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>\n"));
        }
        s.push_str("</g>\n");
    }
    s.push_str("<g fill=\"#c0392b\">\n");
    for p in points {
        let (x, y) = at(p);
        s.push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius:.2}\"/>\n"));
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn write_svg(points: &[Point], g: Option<&YaoGraph>, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, svg_string(points, g)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Vec2;

    fn spec(distribution: Distribution, n: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec { distribution, n, seed }
    }

    fn coords(points: &[Point]) -> Vec<(f64, f64)> {
        points.iter().map(|p| (p.x, p.y)).collect()
    }

    #[test]
    fn grid_of_four_is_the_unit_square() {
        assert_eq!(coords(&generate(&spec(Distribution::Grid, 4, 0))), vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn grid_truncates_row_major() {
        let g = generate(&spec(Distribution::Grid, 7, 0));
        assert_eq!(g.len(), 7);
        // 3 x 3 lattice, last row holds a single point
        assert_eq!(coords(&g)[6], (0.0, 1.0));
        assert_eq!(coords(&g)[2], (1.0, 0.0));
        assert_eq!(coords(&generate(&spec(Distribution::Grid, 1, 0))), vec![(0.0, 0.0)]);
        for n in [1usize, 2, 4, 5, 99, 100, 101, 1024] {
            let s = lattice_side(n);
            assert!(s * s >= n && (s == 0 || (s - 1) * (s - 1) < n), "n={n}");
        }
    }

    #[test]
    fn circle_of_four_hits_the_axes() {
        assert_eq!(coords(&generate(&spec(Distribution::Circle, 4, 0))), vec![(1.0, 0.5), (0.5, 1.0), (0.0, 0.5), (0.5, 0.0)]);
        for p in generate(&spec(Distribution::Circle, 360, 0)) {
            let r = (p.pos() - Vec2::new(0.5, 0.5)).norm2().sqrt();
            assert!((r - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        for d in Distribution::ALL {
            assert_eq!(generate(&spec(d, 1000, 9)), generate(&spec(d, 1000, 9)));
        }
        assert_ne!(generate(&spec(Distribution::Uniform, 10, 1)), generate(&spec(Distribution::Uniform, 10, 2)));
    }

    #[test]
    fn uniform_and_gaussian_moments() {
        let n = 20000;
        let mean = |v: &[Point], f: fn(&Point) -> f64| v.iter().map(f).sum::<f64>() / v.len() as f64;
        let u = generate(&spec(Distribution::Uniform, n, 3));
        assert!(u.iter().all(|p| (0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.y)));
        assert!((mean(&u, |p| p.x) - 0.5).abs() < 0.01);
        let g = generate(&spec(Distribution::Gaussian, n, 3));
        let (mx, my) = (mean(&g, |p| p.x), mean(&g, |p| p.y));
        let sd = (g.iter().map(|p| (p.x - mx).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mx - 0.5).abs() < 0.01 && (my - 0.5).abs() < 0.01);
        assert!((sd - 0.25).abs() < 0.01);
        // not clipped to the unit square
        assert!(g.iter().any(|p| p.x < 0.0 || p.x > 1.0));
    }

    #[test]
    fn parses_points_with_comments() {
        let pts = parse_points("# header\n0 0\n\n1 1  # trailing\n".as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(pts, vec![Point::new(0, 0.0, 0.0), Point::new(1, 1.0, 1.0)]);
    }

    #[test]
    fn rejects_bad_point_files() {
        let err = parse_points("0 0\n0 0\n".as_bytes(), Path::new("f")).unwrap_err();
        assert!(matches!(err, IoError::DuplicateInput { line: 2, first_line: 1, .. }));
        assert!(err.to_string().starts_with("duplicate-input"));
        let err = parse_points("0 0\n-0 0\n".as_bytes(), Path::new("f")).unwrap_err();
        assert!(matches!(err, IoError::DuplicateInput { line: 2, .. }));
        let err = parse_points("1 2\n3\n".as_bytes(), Path::new("f")).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }), "{err}");
        let err = parse_points("1 nan\n".as_bytes(), Path::new("f")).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }), "{err}");
        let err = parse_points("1 inf\n".as_bytes(), Path::new("f")).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }), "{err}");
        assert!(matches!(parse_points("x 1\n".as_bytes(), Path::new("f")), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn point_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        for d in Distribution::ALL {
            let pts = generate(&spec(d, 1000, 5));
            write_points(&pts, &path).unwrap();
            assert_eq!(read_points(&path).unwrap(), pts, "{d}");
        }
        let odd = crate::kernel::points_from_coords(&[(f64::MIN_POSITIVE, -1e300), (0.1 + 0.2, 1.0 / 3.0)]);
        write_points(&odd, &path).unwrap();
        assert_eq!(read_points(&path).unwrap(), odd);
    }

    fn graph(n: usize, k: usize, edges: Vec<Edge>) -> YaoGraph {
        YaoGraph::new(n, k, edges, Provenance { algorithm: "test".into(), kernel: KernelMode::Extended })
    }

    #[test]
    fn edge_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.txt");
        let g = graph(2, 6, vec![Edge { source: 0, target: 1, cone: 0 }, Edge { source: 1, target: 0, cone: 3 }]);
        write_edges(&g, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "2 6\n0 1 0\n1 0 3\n");
        assert_eq!(read_edges(&path, g.provenance.clone()).unwrap(), g);
        let empty = graph(0, 6, vec![]);
        write_edges(&empty, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "0 6\n");
        std::fs::write(&path, "2 6\n0 2 0\n").unwrap();
        assert!(matches!(read_edges(&path, g.provenance.clone()), Err(IoError::Parse { line: 2, .. })));
    }

    fn pass(cone: usize, sub_wedge: usize, kernel: KernelMode) -> PassStats {
        PassStats {
            cone,
            sub_wedge,
            kernel,
            fallback: kernel == KernelMode::Extended,
            n_input: 10,
            n_intersection: 4 + sub_wedge,
            n_deletion: 1,
            max_dynamic_queue: 3 + sub_wedge,
            max_sweepline_size: 6,
            final_sweepline_size: 2,
            rotations: 0,
            wall_time_nanos: 100,
        }
    }

    fn label(distribution: Distribution, k: usize, seed: u64) -> RunLabel {
        RunLabel {
            algorithm: "sweepline".into(),
            kernel: KernelMode::Inexact,
            distribution: distribution.label(),
            n: 10,
            k,
            seed: Some(seed),
        }
    }

    #[test]
    fn stats_rows_per_cone() {
        let stats = vec![pass(0, 0, KernelMode::Inexact), pass(0, 1, KernelMode::Extended), pass(1, 0, KernelMode::Inexact)];
        let rows = label(Distribution::Uniform, 2, 1).per_cone(&stats);
        assert_eq!(rows.len(), 2);
        let c = rows[0].counters.unwrap();
        assert_eq!((c.n_input, c.n_intersection, c.max_dynamic_queue), (20, 9, 4));
        assert!(rows[0].fallback && rows[0].kernel == KernelMode::Extended);
        assert_eq!(rows[0].wall_time_nanos, Some(200));
        assert!(!rows[1].fallback && rows[1].kernel == KernelMode::Inexact);
    }

    #[test]
    fn stats_csv_round_trip() {
        // 3 seeds x 4 distributions -> 12 k rows
        let k = 6;
        let mut all = Vec::new();
        for seed in 0..3 {
            for d in Distribution::ALL {
                all.extend(label(d, k, seed).per_cone(&(0..k).map(|c| pass(c, 0, KernelMode::Inexact)).collect::<Vec<_>>()));
            }
        }
        assert_eq!(all.len(), 12 * k);
        let mut naive = label(Distribution::Grid, k, 0);
        naive.algorithm = "naive".into();
        all.push(naive.whole_run(12345));
        all.push(naive.dnf());
        all.extend(label(Distribution::Uniform, 2, 1).per_cone(&[pass(0, 0, KernelMode::Extended)]));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_stats(&all, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&STATS_HEADER.join(",")));
        assert!(text.contains("naive,inexact,grid,10,6,0,,,,,,,DNF"));
        assert!(text.contains(FALLBACK_KERNEL));
        assert!(text.contains("gaussian(center=0.5 sigma=0.25)"));
        assert_eq!(read_stats(&path).unwrap(), all);

        std::fs::write(&path, "a,b\n").unwrap();
        assert!(matches!(read_stats(&path), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn svg_has_points_and_arrows() {
        let pts = generate(&spec(Distribution::Grid, 4, 0));
        let g = graph(4, 4, vec![Edge { source: 0, target: 1, cone: 0 }, Edge { source: 0, target: 2, cone: 1 }]);
        let s = svg_string(&pts, Some(&g));
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<circle").count(), 4);
        assert_eq!(s.matches("<line").count(), 2);
        // point (0, 0) maps to the lower-left corner of the viewport
        assert!(s.contains("cx=\"20.00\" cy=\"780.00\""));
        let single = svg_string(&pts[..1], None);
        assert_eq!(single.matches("<circle").count(), 1);
    }
}
