//! SVG and text drawings of tiling files.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gaptile::{read_tiling, IntervalTiling, RectangleTiling, TilingFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{CmdResult, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Svg,
    Ascii,
}

#[derive(Args)]
pub struct RenderArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "svg")]
    target: Target,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Side of one grid cell in SVG units.
    #[arg(long, default_value_t = 24)]
    cell: u32,
    /// Seed for the color scheme.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First point of the interval window.
    #[arg(long, default_value_t = 0)]
    start: u64,
    /// Points of an interval tiling to draw.
    #[arg(long, default_value_t = 200)]
    window: u64,
}

pub fn run(a: RenderArgs) -> CmdResult {
    let file =
        read_tiling(&a.file).map_err(|e| Failure::io(format!("{}: {e}", a.file.display())))?;
    let text = match file {
        TilingFile::Rectangle { .. } => {
            let r = file.into_rectangle().expect("rectangle");
            if r.paths.is_empty() {
                return Err(Failure::io(format!(
                    "{}: no paths to draw",
                    a.file.display()
                )));
            }
            let colors = palette(r.paths.len(), a.seed);
            match a.target {
                Target::Svg => rect_svg(&r, &colors, a.cell),
                Target::Ascii => rect_ascii(&r),
            }
        }
        TilingFile::Interval { .. } => {
            let t = file.into_interval().expect("interval");
            if t.tiles.is_empty() {
                return Err(Failure::io(format!(
                    "{}: no tiles to draw",
                    a.file.display()
                )));
            }
            if a.window == 0 || a.start >= t.length {
                return Err(Failure::io(format!(
                    "window [{}, {}) misses the interval [0, {})",
                    a.start,
                    a.start.saturating_add(a.window),
                    t.length
                )));
            }
            let w = Window::new(&t, a.start, a.window);
            let colors = palette(t.tiles.len(), a.seed);
            match a.target {
                Target::Svg => interval_svg(&t, &w, &colors, a.cell),
                Target::Ascii => interval_ascii(&t, &w),
            }
        }
    };
    match &a.out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// One HSL color per index, shuffled hues so neighbors differ.
fn palette(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.random_range(0.0..360.0);
    (0..n)
        .map(|i| {
            // golden-angle spacing keeps adjacent indices apart
            let h = (offset + i as f64 * 137.507_764) % 360.0;
            let s = rng.random_range(55..80);
            let l = rng.random_range(42..58);
            format!("hsl({h:.1},{s}%,{l}%)")
        })
        .collect()
}

fn rect_svg(r: &RectangleTiling, colors: &[String], cell: u32) -> String {
    let c = cell as f64;
    let (w, h) = (r.width as f64 * c, r.height as f64 * c);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#fff"/>"##);
    for x in 0..=r.width {
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="0" x2="{0}" y2="{h}" stroke="#ddd"/>"##,
            x as f64 * c
        );
    }
    for y in 0..=r.height {
        let _ = writeln!(
            s,
            r##"<line x1="0" y1="{0}" x2="{w}" y2="{0}" stroke="#ddd"/>"##,
            y as f64 * c
        );
    }
    // y grows upward in the tiling, downward in SVG
    let center = |p: [i64; 2]| {
        (
            (p[0] as f64 + 0.5) * c,
            (r.height as f64 - p[1] as f64 - 0.5) * c,
        )
    };
    for (i, path) in r.paths.iter().enumerate() {
        let color = &colors[i];
        let pts: Vec<String> = path
            .points()
            .iter()
            .map(|&p| {
                let (x, y) = center(p);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{:.1}" stroke-linejoin="round"/>"#,
            pts.join(" "),
            c * 0.18
        );
        for &p in path.points() {
            let (x, y) = center(p);
            let _ = writeln!(
                s,
                r#"<circle cx="{x}" cy="{y}" r="{:.1}" fill="{color}"/>"#,
                c * 0.3
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn symbol(i: usize) -> char {
    const SYMBOLS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    SYMBOLS[i % SYMBOLS.len()] as char
}

fn rect_ascii(r: &RectangleTiling) -> String {
    let mut grid = vec![vec!['.'; r.width as usize]; r.height as usize];
    for (i, path) in r.paths.iter().enumerate() {
        for &[x, y] in path.points() {
            if (0..r.width as i64).contains(&x) && (0..r.height as i64).contains(&y) {
                grid[y as usize][x as usize] = symbol(i);
            }
        }
    }
    let mut s = format!("{} x {}, {} paths\n", r.width, r.height, r.paths.len());
    for row in grid.iter().rev() {
        s.extend(row.iter());
        s.push('\n');
    }
    s
}

/// The visible slice of an interval tiling.
struct Window {
    lo: u64,
    hi: u64,
    /// Tile index owning each visible point.
    owner: Vec<Option<usize>>,
}

impl Window {
    fn new(t: &IntervalTiling, start: u64, len: u64) -> Self {
        let lo = start;
        let hi = start.saturating_add(len).min(t.length);
        let mut owner = vec![None; (hi - lo) as usize];
        for (i, tile) in t.tiles.iter().enumerate() {
            if tile.last() < lo as i64 || tile.first() >= hi as i64 {
                continue;
            }
            for &p in tile.points() {
                if p >= lo as i64 && p < hi as i64 {
                    owner[(p as u64 - lo) as usize] = Some(i);
                }
            }
        }
        Window { lo, hi, owner }
    }

    fn truncated(&self, t: &IntervalTiling) -> bool {
        self.lo > 0 || self.hi < t.length
    }

    fn marker(&self, t: &IntervalTiling) -> String {
        format!(
            "truncated: showing [{}, {}] of [0, {}]",
            self.lo,
            self.hi - 1,
            t.length - 1
        )
    }
}

fn interval_svg(t: &IntervalTiling, w: &Window, colors: &[String], cell: u32) -> String {
    let c = cell as f64;
    let n = w.hi - w.lo;
    let width = n as f64 * c;
    // strip of cells plus room for arcs above and a caption below
    let arc_room = 3.0 * c;
    let height = arc_room + c + 1.2 * c;
    let base = arc_room;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect width="{width}" height="{height}" fill="#fff"/>"##
    );
    for (j, owner) in w.owner.iter().enumerate() {
        let x = j as f64 * c;
        let fill = owner.map_or("#eee", |i| colors[i].as_str());
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{base}" width="{c}" height="{c}" fill="{fill}" stroke="#fff"/>"##
        );
    }
    // arcs join consecutive points of each tile; height grows with the gap
    let max_gap = t.gap_set.max_distance().max(1) as f64;
    let mut drawn = vec![false; t.tiles.len()];
    for &i in w.owner.iter().flatten() {
        if std::mem::replace(&mut drawn[i], true) {
            continue;
        }
        for pair in t.tiles[i].points().windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a < w.lo as i64 || b >= w.hi as i64 {
                continue;
            }
            let xa = (a as u64 - w.lo) as f64 * c + c / 2.0;
            let xb = (b as u64 - w.lo) as f64 * c + c / 2.0;
            let rise = arc_room * 0.9 * ((b - a) as f64 / max_gap).sqrt();
            let _ = writeln!(
                s,
                r#"<path d="M{xa},{base} Q{},{} {xb},{base}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                (xa + xb) / 2.0,
                base - 2.0 * rise,
                colors[i]
            );
        }
    }
    if w.truncated(t) {
        let _ = writeln!(
            s,
            r##"<text x="2" y="{}" font-family="monospace" font-size="{:.0}" fill="#a00">{}</text>"##,
            base + c + c,
            c * 0.6,
            w.marker(t)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn interval_ascii(t: &IntervalTiling, w: &Window) -> String {
    let mut s = format!(
        "interval [0, {}], {} tiles, gaps {}\n",
        t.length - 1,
        t.tiles.len(),
        t.gap_set
    );
    for (row, chunk) in w.owner.chunks(60).enumerate() {
        let _ = write!(s, "{:>8} ", w.lo + row as u64 * 60);
        s.extend(chunk.iter().map(|o| o.map_or('.', symbol)));
        s.push('\n');
    }
    if w.truncated(t) {
        let _ = writeln!(s, "... {}", w.marker(t));
    }
    s
}
