//! Finite point configurations on the real line and the windows they are
//! observed through.
//!
//! A [`PointConfiguration`] is a simple (no repeated points), sorted, finite
//! set of coordinates. Windows are closed intervals `[lo, hi]`; points lying
//! exactly on a boundary belong to the window. Boundary hits have probability
//! zero for every continuous sampler in this crate, but the convention keeps
//! restriction deterministic.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Window {
    lo: f64,
    hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() {
            return Err(Error::NonFinite(lo));
        }
        if !hi.is_finite() {
            return Err(Error::NonFinite(hi));
        }
        if lo >= hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The centered window `[-p/2, p/2]`.
    pub fn centered(p: f64) -> Result<Self> {
        Self::new(-0.5 * p, 0.5 * p)
    }

    /// The symmetric window `[-r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(-r, r)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Distance from `x` to the window (zero inside).
    pub fn dist(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    pub(crate) fn check_nested_in(&self, outer: &Window) -> Result<()> {
        if outer.contains_window(self) {
            Ok(())
        } else {
            Err(Error::WindowNesting {
                inner_lo: self.lo,
                inner_hi: self.hi,
                outer_lo: outer.lo,
                outer_hi: outer.hi,
            })
        }
    }
}

impl TryFrom<[f64; 2]> for Window {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Window::new(v[0], v[1])
    }
}

impl From<Window> for [f64; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

/// Signed point count minus window length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    count: usize,
    length: f64,
}

impl Discrepancy {
    pub fn value(&self) -> f64 {
        self.count as f64 - self.length
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// A finite simple point configuration, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PointConfiguration {
    points: Vec<f64>,
}

impl PointConfiguration {
    /// Sorts and validates `coords`.
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        coords.sort_by(f64::total_cmp);
        if let Some(w) = coords.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0]));
        }
        // -0.0 and 0.0 compare equal above; normalize the sign for stable output.
        for x in &mut coords {
            if *x == 0.0 {
                *x = 0.0;
            }
        }
        Ok(Self { points: coords })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Wraps an already sorted, strictly increasing, finite sequence.
    pub(crate) fn from_sorted_unchecked(points: Vec<f64>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Self { points }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.points.iter().copied()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.points
    }

    /// Index range of the points lying in `w`.
    fn range_in(&self, w: &Window) -> std::ops::Range<usize> {
        let start = self.points.partition_point(|&x| x < w.lo);
        let end = self.points.partition_point(|&x| x <= w.hi);
        start..end
    }

    /// The restriction `γ_Λ`: points with `lo <= x <= hi`.
    pub fn restrict(&self, w: &Window) -> PointConfiguration {
        Self::from_sorted_unchecked(self.points[self.range_in(w)].to_vec())
    }

    /// Points of `self` in `outer` but not in `inner`.
    pub fn annulus(&self, inner: &Window, outer: &Window) -> PointConfiguration {
        let pts = self.points[self.range_in(outer)]
            .iter()
            .copied()
            .filter(|&x| !inner.contains(x))
            .collect();
        Self::from_sorted_unchecked(pts)
    }

    /// Points of `self` outside `w`.
    pub fn complement(&self, w: &Window) -> PointConfiguration {
        let r = self.range_in(w);
        let mut pts = Vec::with_capacity(self.len() - r.len());
        pts.extend_from_slice(&self.points[..r.start]);
        pts.extend_from_slice(&self.points[r.end..]);
        Self::from_sorted_unchecked(pts)
    }

    pub fn count_in(&self, w: &Window) -> usize {
        self.range_in(w).len()
    }

    /// Union of two configurations; fails on a shared point.
    pub fn union(&self, other: &PointConfiguration) -> Result<PointConfiguration> {
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.points, &other.points);
        while i < a.len() && j < b.len() {
            match a[i].total_cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return Err(Error::DuplicatePoint(a[i])),
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        Ok(Self::from_sorted_unchecked(merged))
    }

    /// Rotates a configuration of the circle `Λ_n = [-n/2, n/2)` by `shift`.
    pub fn rotate_periodic(&self, shift: f64, period: f64) -> Result<PointConfiguration> {
        let half = 0.5 * period;
        let coords = self
            .points
            .iter()
            .map(|&x| {
                let mut y = (x + shift + half).rem_euclid(period) - half;
                if y >= half {
                    y -= period;
                }
                y
            })
            .collect();
        PointConfiguration::new(coords)
    }
}

impl TryFrom<Vec<f64>> for PointConfiguration {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PointConfiguration::new(v)
    }
}

impl From<PointConfiguration> for Vec<f64> {
    fn from(c: PointConfiguration) -> Self {
        c.points
    }
}

/// Count of `gamma` in `w` minus `|w|`.
pub fn discrepancy(gamma: &PointConfiguration, w: &Window) -> Discrepancy {
    Discrepancy {
        count: gamma.count_in(w),
        length: w.length(),
    }
}

/// Minimal total displacement over all pairings of `a` with `b`.
///
/// In one dimension the monotone (sorted-order) coupling is optimal for the
/// cost `|x - y|`, so this is `Σ |a_i - b_i|` over the sorted sequences.
pub fn w1_distance(a: &PointConfiguration, b: &PointConfiguration) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(crate::sum::csum(
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()),
    ))
}

/// Writes one JSON array per line.
pub fn write_jsonl<'a, W, I>(mut out: W, configs: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PointConfiguration>,
{
    for c in configs {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads one configuration per non-empty line.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<PointConfiguration>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
