//! Lattice points and axis-aligned boxes.
//!
//! All enumeration in the crate follows one fixed scan order: points are
//! compared by their coordinate sequence read from the last coordinate down
//! to the first, so the first coordinate varies fastest when a box is
//! scanned. Every deterministic listing in the crate derives from this
//! order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Point {
        Point(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Point {
        Point(self.0.iter().map(|a| a * k).collect())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        // Scan order: last coordinate is most significant.
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An axis-aligned box `[lo, hi]` with inclusive bounds.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoxRegion {
    lo: Point,
    hi: Point,
}

impl BoxRegion {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch(format!(
                "box bounds have dims {} and {}",
                lo.dim(),
                hi.dim()
            )));
        }
        if lo.0.iter().zip(&hi.0).any(|(a, b)| a > b) {
            return Err(Error::Validation(format!("box lo {lo:?} exceeds hi {hi:?}")));
        }
        Ok(BoxRegion { lo, hi })
    }

    /// The elementary box `[-n, n]^d`.
    pub fn elementary(n: i64, dim: usize) -> Self {
        BoxRegion {
            lo: Point(vec![-n; dim]),
            hi: Point(vec![n; dim]),
        }
    }

    /// The box `[0, n-1]` in one dimension (a word window of length n).
    pub fn line(n: i64) -> Self {
        debug_assert!(n >= 1);
        BoxRegion {
            lo: Point(vec![0]),
            hi: Point(vec![n - 1]),
        }
    }

    /// The box `[0, a-1] x [0, b-1]`.
    pub fn grid(a: i64, b: i64) -> Self {
        debug_assert!(a >= 1 && b >= 1);
        BoxRegion {
            lo: Point(vec![0, 0]),
            hi: Point(vec![a - 1, b - 1]),
        }
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn side(&self, axis: usize) -> i64 {
        self.hi.0[axis] - self.lo.0[axis] + 1
    }

    pub fn cell_count(&self) -> u64 {
        (0..self.dim()).map(|a| self.side(a) as u64).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.0
                .iter()
                .enumerate()
                .all(|(i, c)| self.lo.0[i] <= *c && *c <= self.hi.0[i])
    }

    pub fn contains_box(&self, other: &BoxRegion) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Grow the box by `k` in every direction.
    pub fn inflate(&self, k: i64) -> BoxRegion {
        BoxRegion {
            lo: Point(self.lo.0.iter().map(|c| c - k).collect()),
            hi: Point(self.hi.0.iter().map(|c| c + k).collect()),
        }
    }

    /// Translate the box by `v`.
    pub fn translate(&self, v: &Point) -> BoxRegion {
        BoxRegion {
            lo: self.lo.add(v),
            hi: self.hi.add(v),
        }
    }

    /// Bounding box of the Minkowski sum `self + offsets`.
    pub fn minkowski_hull(&self, offsets: &[Point]) -> BoxRegion {
        debug_assert!(!offsets.is_empty());
        let d = self.dim();
        let mut lo = self.lo.0.clone();
        let mut hi = self.hi.0.clone();
        for a in 0..d {
            let min_off = offsets.iter().map(|p| p.0[a]).min().unwrap();
            let max_off = offsets.iter().map(|p| p.0[a]).max().unwrap();
            lo[a] += min_off;
            hi[a] += max_off;
        }
        BoxRegion {
            lo: Point(lo),
            hi: Point(hi),
        }
    }

    /// Bounding box of a non-empty point set.
    pub fn bounding(points: &[Point]) -> Result<BoxRegion> {
        let first = points.first().ok_or(Error::EmptySupport)?;
        let d = first.dim();
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for p in &points[1..] {
            for a in 0..d {
                lo[a] = lo[a].min(p.0[a]);
                hi[a] = hi[a].max(p.0[a]);
            }
        }
        Ok(BoxRegion {
            lo: Point(lo),
            hi: Point(hi),
        })
    }

    /// All points of the box in scan order (first coordinate fastest).
    pub fn points(&self) -> Vec<Point> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.cell_count() as usize);
        let mut cur = self.lo.0.clone();
        loop {
            out.push(Point(cur.clone()));
            let mut axis = 0;
            loop {
                if axis == d {
                    return out;
                }
                cur[axis] += 1;
                if cur[axis] <= self.hi.0[axis] {
                    break;
                }
                cur[axis] = self.lo.0[axis];
                axis += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_order_first_coordinate_fastest() {
        let b = BoxRegion::grid(2, 2);
        let pts = b.points();
        let expect = [(0, 0), (1, 0), (0, 1), (1, 1)];
        for (p, (x, y)) in pts.iter().zip(expect) {
            assert_eq!(p.0, vec![x, y]);
        }
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(sorted, pts);
    }

    #[test]
    fn elementary_box_bounds() {
        let b = BoxRegion::elementary(2, 3);
        assert_eq!(b.cell_count(), 125);
        assert!(b.contains(&Point::new(vec![-2, 0, 2])));
        assert!(!b.contains(&Point::new(vec![3, 0, 0])));
    }

    #[test]
    fn minkowski_hull_covers_offsets() {
        let b = BoxRegion::line(3);
        let hull = b.minkowski_hull(&[Point::new(vec![0]), Point::new(vec![2])]);
        assert_eq!(hull.lo().0, vec![0]);
        assert_eq!(hull.hi().0, vec![4]);
    }
}
