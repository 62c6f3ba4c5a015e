//! Rectangle framework extracted from the diagonal-marker substitutions.
//!
//! One plane of the three-layer marker product sees, along its horizontal
//! axis, vertical line markers from the side-5 and side-2 substitutions and,
//! along its vertical axis, horizontal line markers from the side-3
//! substitution. A slice materializes those layers for one plane index `r`:
//! the marker content of plane `r` is column `r` of the corresponding
//! expansion (the shear turns columns into in-plane lines; the per-plane
//! translation it adds is phase data recorded in the provenance, not
//! asserted). Line spacings are exact powers, so each slice is partitioned
//! into rectangles of one size carrying entry marks of one power-of-two
//! period.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point};
use crate::pattern::Pattern;

use super::{expand, marker_alphabet, Expansion, Substitution};

/// Where a marker layer came from: which substitution side, the expansion
/// depth used, the extracted plane index, and the phase shift a sheared
/// reading of that plane would add.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerProvenance {
    pub side: usize,
    pub depth: u32,
    pub row: i64,
    pub shear_phase: i64,
}

/// Marker layers of one plane over a window. Vertical-line layers are
/// constant along the vertical axis and are stored per column; the
/// horizontal-line layer is constant along the horizontal axis and is
/// stored per row.
#[derive(Clone, Debug)]
pub struct FrameworkSlice {
    window: BoxRegion,
    line_cols: Vec<bool>,  // side-5 layer, indexed by column offset
    entry_cols: Vec<bool>, // side-2 layer, indexed by column offset
    line_rows: Vec<bool>,  // side-3 layer, indexed by row offset
    provenance: [LayerProvenance; 3],
}

impl FrameworkSlice {
    pub fn window(&self) -> &BoxRegion {
        &self.window
    }

    pub fn provenance(&self) -> &[LayerProvenance; 3] {
        &self.provenance
    }

    pub fn line_col_marked(&self, x: i64) -> bool {
        self.line_cols[(x - self.window.lo().0[0]) as usize]
    }

    pub fn entry_col_marked(&self, x: i64) -> bool {
        self.entry_cols[(x - self.window.lo().0[0]) as usize]
    }

    pub fn line_row_marked(&self, y: i64) -> bool {
        self.line_rows[(y - self.window.lo().0[1]) as usize]
    }

    fn marked_cols(&self) -> Vec<i64> {
        let x0 = self.window.lo().0[0];
        self.line_cols
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| x0 + i as i64)
            .collect()
    }

    fn marked_entry_cols(&self) -> Vec<i64> {
        let x0 = self.window.lo().0[0];
        self.entry_cols
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| x0 + i as i64)
            .collect()
    }

    fn marked_rows(&self) -> Vec<i64> {
        let y0 = self.window.lo().0[1];
        self.line_rows
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| y0 + i as i64)
            .collect()
    }

    /// Materialize one layer as a 2D marker pattern over the window (used
    /// to assert the invariance along the replicated axis).
    pub fn layer_pattern(&self, layer: usize) -> Pattern {
        let a = marker_alphabet();
        let mark = a.lookup("b").unwrap();
        let blank = a.lookup("o").unwrap();
        let cells = self
            .window
            .points()
            .iter()
            .map(|p| {
                let marked = match layer {
                    0 => self.line_col_marked(p.0[0]),
                    1 => self.entry_col_marked(p.0[0]),
                    _ => self.line_row_marked(p.0[1]),
                };
                (p.clone(), if marked { mark } else { blank })
            })
            .collect();
        Pattern::new(2, a, cells).expect("window is non-empty")
    }
}

/// Cache of expansions keyed by substitution side and depth.
#[derive(Default)]
pub(crate) struct ExpansionCache {
    map: HashMap<(usize, u32), Expansion>,
}

impl ExpansionCache {
    fn get(&mut self, side: usize, depth: u32) -> Result<&Expansion> {
        if !self.map.contains_key(&(side, depth)) {
            let s = Substitution::diagonal(side)?;
            let mark = s.alphabet().lookup("b").unwrap();
            let e = expand(&s, mark, depth)?;
            self.map.insert((side, depth), e);
        }
        Ok(&self.map[&(side, depth)])
    }
}

fn depth_for(side: usize, needed: i64) -> Result<u32> {
    let mut d = 1u32;
    let mut s = side as i64;
    // Strictly greater so the seed corner cell is never sampled.
    while s <= needed {
        s = s
            .checked_mul(side as i64)
            .ok_or_else(|| Error::ResourceLimit("expansion depth overflows".into()))?;
        d += 1;
        if d > 16 {
            return Err(Error::ResourceLimit(format!(
                "depth for side {side} covering {needed} is too large"
            )));
        }
    }
    Ok(d)
}

/// Build the marker layers of plane `r` over `window`. `t` floors the
/// depth of the side-5 expansion (deeper content is identical on the
/// sampled cells; the floor keeps the declared scale in the provenance).
pub fn build_framework_slice(t: u32, r: i64, window: &BoxRegion) -> Result<FrameworkSlice> {
    build_framework_slice_cached(t, r, window, &mut ExpansionCache::default())
}

pub(crate) fn build_framework_slice_cached(
    t: u32,
    r: i64,
    window: &BoxRegion,
    cache: &mut ExpansionCache,
) -> Result<FrameworkSlice> {
    if window.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "framework slices are two-dimensional".into(),
        ));
    }
    let (x0, x1) = (window.lo().0[0], window.hi().0[0]);
    let (y0, y1) = (window.lo().0[1], window.hi().0[1]);
    if r < 1 || x0 < 1 || y0 < 1 {
        return Err(Error::WindowOutOfRange(
            "plane index and window coordinates must be positive".into(),
        ));
    }

    let mut provenance = Vec::with_capacity(3);
    let mut layers: Vec<Vec<bool>> = Vec::with_capacity(3);
    for (side, lo, hi) in [(5usize, x0, x1), (2, x0, x1), (3, y0, y1)] {
        let mut depth = depth_for(side, r.max(hi))?;
        if side == 5 {
            depth = depth.max(t);
        }
        let e = cache.get(side, depth)?;
        let mark = marker_alphabet().lookup("b").unwrap();
        let marks: Vec<bool> = (lo..=hi)
            .map(|pos| e.get(r, pos).map(|s| s == mark).unwrap_or(false))
            .collect();
        layers.push(marks);
        provenance.push(LayerProvenance {
            side,
            depth,
            row: r,
            shear_phase: r,
        });
    }
    let line_rows = layers.pop().unwrap();
    let entry_cols = layers.pop().unwrap();
    let line_cols = layers.pop().unwrap();
    let provenance: [LayerProvenance; 3] = provenance.try_into().unwrap();
    Ok(FrameworkSlice {
        window: window.clone(),
        line_cols,
        entry_cols,
        line_rows,
        provenance,
    })
}

/// A calculation rectangle: width an exact power of 5, height a power of 3,
/// entry period a power of 2 not exceeding the width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub origin: Point,
    pub width: i64,
    pub height: i64,
    pub entry_len: i64,
    pub width_exp: u32,
    pub height_exp: u32,
    pub entry_exp: u32,
}

impl Rectangle {
    pub fn new(origin: Point, width: i64, height: i64, entry_len: i64) -> Result<Self> {
        let width_exp = exact_log(width, 5).ok_or_else(|| {
            Error::NonPowerSpacing(format!("width {width} is not a power of 5"))
        })?;
        let height_exp = exact_log(height, 3).ok_or_else(|| {
            Error::NonPowerSpacing(format!("height {height} is not a power of 3"))
        })?;
        let entry_exp = exact_log(entry_len, 2).ok_or_else(|| {
            Error::NonPowerSpacing(format!("entry length {entry_len} is not a power of 2"))
        })?;
        if entry_len > width {
            return Err(Error::EntryExceedsWidth {
                entry: entry_len as u64,
                width: width as u64,
            });
        }
        Ok(Rectangle {
            origin,
            width,
            height,
            entry_len,
            width_exp,
            height_exp,
            entry_exp,
        })
    }

    pub fn exponents(&self) -> (u32, u32, u32) {
        (self.width_exp, self.height_exp, self.entry_exp)
    }

    pub fn contains(&self, p: &Point) -> bool {
        let (x, y) = (p.0[0], p.0[1]);
        x >= self.origin.0[0]
            && x < self.origin.0[0] + self.width
            && y >= self.origin.0[1]
            && y < self.origin.0[1] + self.height
    }
}

fn exact_log(value: i64, base: i64) -> Option<u32> {
    if value < 1 {
        return None;
    }
    let mut v = value;
    let mut e = 0u32;
    while v % base == 0 {
        v /= base;
        e += 1;
    }
    if v == 1 && e >= 1 {
        Some(e)
    } else {
        None
    }
}

fn uniform_gap(marks: &[i64], what: &str) -> Result<i64> {
    if marks.len() < 2 {
        return Err(Error::NonPowerSpacing(format!(
            "{what}: fewer than two marks in the window"
        )));
    }
    let gap = marks[1] - marks[0];
    for w in marks.windows(2) {
        if w[1] - w[0] != gap {
            return Err(Error::NonPowerSpacing(format!(
                "{what}: gaps {} and {} differ",
                gap,
                w[1] - w[0]
            )));
        }
    }
    Ok(gap)
}

/// Cut a slice into its rectangles. Line marks are corners; rectangles with
/// origins left/below the window are included when they reach into it, so
/// the returned list covers the window exactly once.
pub fn decompose_rectangles(slice: &FrameworkSlice) -> Result<Vec<Rectangle>> {
    let cols = slice.marked_cols();
    let rows = slice.marked_rows();
    let entries = slice.marked_entry_cols();
    let width = uniform_gap(&cols, "vertical lines")?;
    let height = uniform_gap(&rows, "horizontal lines")?;
    let entry = uniform_gap(&entries, "entry marks")?;

    let (x0, x1) = (slice.window.lo().0[0], slice.window.hi().0[0]);
    let (y0, y1) = (slice.window.lo().0[1], slice.window.hi().0[1]);
    // Extend the corner grid periodically to cover the window.
    let mut first_col = cols[0];
    while first_col > x0 {
        first_col -= width;
    }
    let mut first_row = rows[0];
    while first_row > y0 {
        first_row -= height;
    }

    let mut out = Vec::new();
    let mut y = first_row;
    while y <= y1 {
        let mut x = first_col;
        while x <= x1 {
            out.push(Rectangle::new(
                Point::new(vec![x, y]),
                width,
                height,
                entry,
            )?);
            x += width;
        }
        y += height;
    }
    Ok(out)
}

/// Outcome of the rectangle-framework sweep.
#[derive(Clone, Debug)]
pub struct FrameworkReport {
    pub t_max: u32,
    /// (width exp, height exp, entry exp) -> witness plane index.
    pub observed: Vec<((u32, u32, u32), i64)>,
    /// Combination which should have a grown partner but does not, with the
    /// missing partner and the witness plane of the base combination.
    pub growth_misses: Vec<((u32, u32, u32), (u32, u32, u32), i64)>,
    /// Planes skipped because the entry period exceeds the width there, or
    /// because a spacing exceeds the sweep scale.
    pub skipped_planes: Vec<(i64, String)>,
    /// Partition or uniformity failures: plane and message.
    pub failures: Vec<(i64, String)>,
    pub planes_checked: usize,
}

impl FrameworkReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.growth_misses.is_empty()
    }

    pub fn observed_width_exps(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.observed.iter().map(|((m, _, _), _)| *m).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "framework sweep to scale {}: {} planes checked",
            self.t_max, self.planes_checked
        )
        .unwrap();
        for ((m, p, n), r) in &self.observed {
            writeln!(
                out,
                "observed rectangles 5^{m} x 3^{p} with entry period 2^{n} (plane {r})"
            )
            .unwrap();
        }
        for ((m, p, n), missing, r) in &self.growth_misses {
            writeln!(
                out,
                "MISS: ({m},{p},{n}) at plane {r} lacks partner {missing:?}"
            )
            .unwrap();
        }
        for (r, msg) in &self.failures {
            writeln!(out, "FAIL at plane {r}: {msg}").unwrap();
        }
        if self.passed() {
            writeln!(out, "proposition witnessed for all observed combinations").unwrap();
        }
        out
    }
}

/// Sweep planes up to the given scale: every slice must partition into
/// uniform rectangles, and every observed size combination must have both
/// grown partners (one step wider, one step taller) at the same entry
/// period, as long as the grown exponent is within scale.
pub fn verify_framework_proposition(
    t_max: u32,
    window_cap: Option<&BoxRegion>,
) -> Result<FrameworkReport> {
    if t_max < 1 || t_max > 4 {
        return Err(Error::Validation(
            "framework sweep supports scales 1 through 4".into(),
        ));
    }
    let entry_cap = t_max.saturating_sub(1).max(1);
    let r_max = 4 * 5i64.pow(t_max);
    let mut cache = ExpansionCache::default();
    let mut observed: Vec<((u32, u32, u32), i64)> = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    let mut planes_checked = 0usize;

    for r in 1..=r_max {
        let m = val_exp(r, 5) + 1;
        let p = val_exp(r, 3) + 1;
        let n = val_exp(r, 2) + 1;
        if m > t_max || p > t_max || n > entry_cap {
            skipped.push((r, format!("spacing exponents ({m},{p},{n}) beyond scale")));
            continue;
        }
        let width = 5i64.pow(m);
        let height = 3i64.pow(p);
        if 2i64.pow(n) > width {
            skipped.push((r, "entry period exceeds width".to_string()));
            continue;
        }
        let wx = 2 * width + 1;
        let wy = 2 * height + 1;
        let (wx, wy) = match window_cap {
            Some(cap) => (wx.min(cap.side(0)), wy.min(cap.side(1))),
            None => (wx, wy),
        };
        let window = BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![wx, wy]))?;
        let slice = build_framework_slice_cached(t_max, r, &window, &mut cache)?;
        planes_checked += 1;
        let rects = match decompose_rectangles(&slice) {
            Ok(rects) => rects,
            Err(e) => {
                failures.push((r, e.to_string()));
                continue;
            }
        };
        // Uniform sizes.
        if !rects
            .iter()
            .all(|rc| rc.width == width && rc.height == height)
        {
            failures.push((r, "rectangle sizes are not uniform".to_string()));
            continue;
        }
        // Exact partition of the window.
        for cell in window.points() {
            let covering = rects.iter().filter(|rc| rc.contains(&cell)).count();
            if covering != 1 {
                failures.push((
                    r,
                    format!("cell {cell:?} covered by {covering} rectangles"),
                ));
                break;
            }
        }
        let combo = (m, p, n);
        if !observed.iter().any(|(c, _)| *c == combo) {
            observed.push((combo, r));
        }
    }

    observed.sort();
    let mut growth_misses = Vec::new();
    for ((m, p, n), r) in &observed {
        if *m < t_max {
            let partner = (m + 1, *p, *n);
            if !observed.iter().any(|(c, _)| *c == partner) {
                growth_misses.push(((*m, *p, *n), partner, *r));
            }
        }
        if *p < t_max {
            let partner = (*m, p + 1, *n);
            if !observed.iter().any(|(c, _)| *c == partner) {
                growth_misses.push(((*m, *p, *n), partner, *r));
            }
        }
    }

    Ok(FrameworkReport {
        t_max,
        observed,
        growth_misses,
        skipped_planes: skipped,
        failures,
        planes_checked,
    })
}

fn val_exp(mut v: i64, base: i64) -> u32 {
    let mut e = 0;
    while v % base == 0 {
        v /= base;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_layers_follow_ruler_structure() {
        // Plane 6 = 2 * 3: width 5^1, height 3^2 = 9, entry 2^2 = 4.
        let window = BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![21, 19])).unwrap();
        let slice = build_framework_slice(2, 6, &window).unwrap();
        for x in 1..=21 {
            assert_eq!(slice.line_col_marked(x), (x - 6).rem_euclid(5) == 0);
            assert_eq!(slice.entry_col_marked(x), (x - 6).rem_euclid(4) == 0);
        }
        for y in 1..=19 {
            assert_eq!(slice.line_row_marked(y), (y - 6).rem_euclid(9) == 0);
        }
    }

    #[test]
    fn decompose_reads_exponents() {
        // Plane 150 = 2 * 3 * 5^2: width 125, height 9, entry 4.
        let window =
            BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![260, 20])).unwrap();
        let slice = build_framework_slice(3, 150, &window).unwrap();
        let rects = decompose_rectangles(&slice).unwrap();
        assert!(!rects.is_empty());
        for rc in &rects {
            assert_eq!(rc.width, 125);
            assert_eq!(rc.height, 9);
            assert_eq!(rc.entry_len, 4);
            assert_eq!(rc.exponents(), (3, 2, 2));
        }
    }

    #[test]
    fn layer_patterns_are_axis_invariant() {
        let window = BoxRegion::new(Point::new(vec![1, 1]), Point::new(vec![11, 7])).unwrap();
        let slice = build_framework_slice(1, 4, &window).unwrap();
        // Vertical-marker layers repeat along y; horizontal along x.
        let p0 = slice.layer_pattern(0);
        let p2 = slice.layer_pattern(2);
        for x in 1..=11i64 {
            let base = p0.get(&Point::new(vec![x, 1])).unwrap();
            for y in 2..=7 {
                assert_eq!(p0.get(&Point::new(vec![x, y])), Some(base));
            }
        }
        for y in 1..=7i64 {
            let base = p2.get(&Point::new(vec![1, y])).unwrap();
            for x in 2..=11 {
                assert_eq!(p2.get(&Point::new(vec![x, y])), Some(base));
            }
        }
    }

    #[test]
    fn entry_exceeding_width_is_an_error() {
        assert!(matches!(
            Rectangle::new(Point::new(vec![0, 0]), 5, 3, 8),
            Err(Error::EntryExceedsWidth { .. })
        ));
        assert!(Rectangle::new(Point::new(vec![0, 0]), 6, 3, 2).is_err());
    }

    #[test]
    fn sweep_scale_two_passes() {
        let report = verify_framework_proposition(2, None).unwrap();
        assert!(report.passed(), "{}", report.render());
        assert_eq!(report.observed_width_exps(), vec![1, 2]);
    }
}
