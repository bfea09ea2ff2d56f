//! Bounded time scales: nonempty closed subsets of the reals assembled
//! from finite point sets, uniform lattices, geometric lattices, and
//! continuous intervals.
//!
//! The jump operators follow the usual conventions: `sigma(t)` is the
//! least scale point strictly greater than `t` (with `sigma(max) = max`),
//! `rho(t)` the greatest point strictly less than `t` (with
//! `rho(min) = min`), and the graininess is `mu(t) = sigma(t) - t`.
//! A point is right-scattered exactly when `mu(t) > 0`.
//!
//! Scales can be written in a small textual language:
//!
//! ```text
//! Z:1..10            integers 1..=10
//! h:0.5:1..4         uniform lattice 1, 1.5, ..., 4
//! q:2:0..6           geometric lattice 2^0, 2^1, ..., 2^6
//! set:{0.5,1,2.25}   explicit finite set
//! R:0..1             continuous interval [0, 1]
//! union(R:0..1; set:{2,3})
//! ```
//!
//! The parser ignores whitespace. Membership tests snap to represented
//! points within [`MEMBERSHIP_TOL`] so that values computed by callers
//! (e.g. mapped through an expression) re-locate exactly.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance for deciding that a query value names a
/// represented scale point.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// One maximal building block of a scale.
///
/// Within a normalized [`TimeScale`] the segments are sorted ascending
/// and pairwise disjoint, and no two can be merged.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// Sorted, strictly increasing list of isolated points.
    FiniteSet(Vec<f64>),
    /// Points `start + i * step` for `i` in `0..count`.
    UniformLattice { start: f64, step: f64, count: usize },
    /// Points `ratio^k` for `k` in `first_exp..=last_exp`, ratio > 1.
    GeometricLattice {
        ratio: f64,
        first_exp: i32,
        last_exp: i32,
    },
    /// The closed interval `[lo, hi]`, lo < hi.
    ContinuousInterval { lo: f64, hi: f64 },
}

impl Segment {
    pub fn min(&self) -> f64 {
        match self {
            Segment::FiniteSet(v) => v[0],
            Segment::UniformLattice { start, .. } => *start,
            Segment::GeometricLattice { ratio, first_exp, .. } => ratio.powi(*first_exp),
            Segment::ContinuousInterval { lo, .. } => *lo,
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Segment::FiniteSet(v) => v[v.len() - 1],
            Segment::UniformLattice { start, step, count } => {
                lattice_point(*start, *step, count - 1)
            }
            Segment::GeometricLattice { ratio, last_exp, .. } => ratio.powi(*last_exp),
            Segment::ContinuousInterval { hi, .. } => *hi,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        match self {
            Segment::FiniteSet(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidSegment("finite set has no points".into()));
                }
                if !v.iter().all(|x| finite(*x)) {
                    return Err(Error::InvalidSegment("finite set has non-finite points".into()));
                }
                if v.windows(2).any(|w| w[1] - w[0] <= MEMBERSHIP_TOL) {
                    return Err(Error::InvalidSegment(
                        "finite set points must be strictly increasing".into(),
                    ));
                }
            }
            Segment::UniformLattice { start, step, count } => {
                if !finite(*start) || !finite(*step) || *step <= 0.0 {
                    return Err(Error::InvalidSegment("lattice step must be positive".into()));
                }
                if *count == 0 {
                    return Err(Error::InvalidSegment("lattice has no points".into()));
                }
            }
            Segment::GeometricLattice { ratio, first_exp, last_exp } => {
                if !finite(*ratio) || *ratio <= 1.0 {
                    return Err(Error::InvalidSegment("geometric ratio must exceed 1".into()));
                }
                if first_exp > last_exp {
                    return Err(Error::InvalidSegment(
                        "geometric exponent range is empty".into(),
                    ));
                }
                if !finite(ratio.powi(*last_exp)) {
                    return Err(Error::InvalidSegment("geometric lattice overflows".into()));
                }
            }
            Segment::ContinuousInterval { lo, hi } => {
                if !finite(*lo) || !finite(*hi) || !(lo < hi) {
                    return Err(Error::InvalidSegment(
                        "interval requires finite lo < hi".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn is_interval(&self) -> bool {
        matches!(self, Segment::ContinuousInterval { .. })
    }

    /// Enumerates the represented points of a discrete segment.
    /// Panics on intervals; callers check `is_interval` first.
    fn enumerate(&self) -> Vec<f64> {
        match self {
            Segment::FiniteSet(v) => v.clone(),
            Segment::UniformLattice { start, step, count } => {
                (0..*count).map(|i| lattice_point(*start, *step, i)).collect()
            }
            Segment::GeometricLattice { ratio, first_exp, last_exp } => {
                (*first_exp..=*last_exp).map(|k| ratio.powi(k)).collect()
            }
            Segment::ContinuousInterval { .. } => unreachable!("interval is not discrete"),
        }
    }
}

/// Points of a uniform lattice are always produced by this one formula
/// so that membership snapping and iteration agree bit-for-bit.
fn lattice_point(start: f64, step: f64, index: usize) -> f64 {
    start + (index as f64) * step
}

/// Density of a point on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    Scattered,
    Dense,
}

/// Two-sided classification of a scale point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PointClass {
    pub right: Density,
    pub left: Density,
    pub is_min: bool,
    pub is_max: bool,
}

/// Where a located query value sits inside the scale.
#[derive(Debug, Clone, Copy)]
enum Pos {
    /// A represented point: set member, lattice node, or interval endpoint.
    Node(f64),
    /// Strictly inside a continuous interval.
    Interior(f64),
}

impl Pos {
    fn value(self) -> f64 {
        match self {
            Pos::Node(v) | Pos::Interior(v) => v,
        }
    }
}

/// A nonempty bounded time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
}

impl TimeScale {
    /// Builds a scale from segments, normalizing them: intervals that
    /// overlap or touch are merged, discrete points swallowed by an
    /// interval are dropped, overlapping discrete segments are fused
    /// into finite sets, and a discrete segment straddling an interval
    /// is split around it.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            s.validate()?;
        }

        let mut intervals: Vec<(f64, f64)> = segments
            .iter()
            .filter_map(|s| match s {
                Segment::ContinuousInterval { lo, hi } => Some((*lo, *hi)),
                _ => None,
            })
            .collect();
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some((_, phi)) if lo <= *phi + MEMBERSHIP_TOL => *phi = phi.max(hi),
                _ => merged.push((lo, hi)),
            }
        }

        // Discrete segments survive as typed lattices only when no point
        // is absorbed by an interval and no other discrete segment
        // overlaps their hull; otherwise they decay to finite sets.
        let absorbed = |x: f64| {
            merged
                .iter()
                .any(|(lo, hi)| x >= lo - MEMBERSHIP_TOL && x <= hi + MEMBERSHIP_TOL)
        };
        let mut discrete: Vec<Segment> = Vec::new();
        for s in &segments {
            if s.is_interval() {
                continue;
            }
            let pts = s.enumerate();
            let kept: Vec<f64> = pts.iter().copied().filter(|x| !absorbed(*x)).collect();
            if kept.is_empty() {
                continue;
            }
            if kept.len() == pts.len() && !hull_crosses(&kept, &merged) {
                discrete.push(s.clone());
            } else {
                for run in split_runs(&kept, &merged) {
                    discrete.push(Segment::FiniteSet(run));
                }
            }
        }

        // Fuse discrete segments whose hulls overlap.
        discrete.sort_by(|a, b| a.min().total_cmp(&b.min()));
        loop {
            let mut fused = false;
            'outer: for i in 0..discrete.len() {
                for j in i + 1..discrete.len() {
                    if discrete[j].min() <= discrete[i].max() + MEMBERSHIP_TOL {
                        let mut pts = discrete[i].enumerate();
                        pts.extend(discrete[j].enumerate());
                        pts.sort_by(|a, b| a.total_cmp(b));
                        pts.dedup_by(|a, b| (*a - *b).abs() <= MEMBERSHIP_TOL);
                        discrete.remove(j);
                        discrete[i] = Segment::FiniteSet(pts);
                        fused = true;
                        break 'outer;
                    }
                }
            }
            if !fused {
                break;
            }
        }

        let mut all: Vec<Segment> = merged
            .into_iter()
            .map(|(lo, hi)| Segment::ContinuousInterval { lo, hi })
            .collect();
        all.extend(discrete);
        all.sort_by(|a, b| a.min().total_cmp(&b.min()));
        if all.is_empty() {
            return Err(Error::EmptyScale);
        }
        for w in all.windows(2) {
            if w[1].min() <= w[0].max() + MEMBERSHIP_TOL {
                return Err(Error::InvalidSegment(format!(
                    "segments overlap near {}",
                    w[1].min()
                )));
            }
        }
        for s in &all {
            s.validate()?;
        }
        Ok(TimeScale { segments: all })
    }

    /// Integers `lo..=hi`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyScale);
        }
        Self::from_segments(vec![Segment::UniformLattice {
            start: lo as f64,
            step: 1.0,
            count: (hi - lo) as usize + 1,
        }])
    }

    /// Uniform lattice `start, start+step, ...` with `count` points.
    pub fn uniform(start: f64, step: f64, count: usize) -> Result<Self> {
        Self::from_segments(vec![Segment::UniformLattice { start, step, count }])
    }

    /// Geometric lattice `ratio^k` for `k` in `first_exp..=last_exp`.
    pub fn geometric(ratio: f64, first_exp: i32, last_exp: i32) -> Result<Self> {
        Self::from_segments(vec![Segment::GeometricLattice { ratio, first_exp, last_exp }])
    }

    /// Explicit finite set; the points are sorted and deduplicated.
    pub fn finite_set(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSegment("finite set has non-finite points".into()));
        }
        points.sort_by(|a, b| a.total_cmp(b));
        points.dedup_by(|a, b| (*a - *b).abs() <= MEMBERSHIP_TOL);
        if points.is_empty() {
            return Err(Error::EmptyScale);
        }
        Self::from_segments(vec![Segment::FiniteSet(points)])
    }

    /// Continuous interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::from_segments(vec![Segment::ContinuousInterval { lo, hi }])
    }

    /// Union of existing scales.
    pub fn union_of(parts: &[TimeScale]) -> Result<Self> {
        let mut segs = Vec::new();
        for p in parts {
            segs.extend(p.segments.iter().cloned());
        }
        Self::from_segments(segs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn min(&self) -> f64 {
        self.segments[0].min()
    }

    pub fn max(&self) -> f64 {
        self.segments[self.segments.len() - 1].max()
    }

    /// True when the scale has no continuous interval.
    pub fn is_discrete(&self) -> bool {
        self.segments.iter().all(|s| !s.is_interval())
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_ok()
    }

    /// Finds the segment holding `t` and snaps `t` to the represented
    /// point when it is within [`MEMBERSHIP_TOL`] of one.
    fn locate(&self, t: f64) -> Result<(usize, Pos)> {
        if !t.is_finite() {
            return Err(Error::PointNotInScale { point: t });
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if t < seg.min() - MEMBERSHIP_TOL {
                break;
            }
            if t > seg.max() + MEMBERSHIP_TOL {
                continue;
            }
            match seg {
                Segment::FiniteSet(v) => {
                    let j = nearest_index(v, t);
                    if (v[j] - t).abs() <= MEMBERSHIP_TOL {
                        return Ok((i, Pos::Node(v[j])));
                    }
                }
                Segment::UniformLattice { start, step, count } => {
                    let raw = ((t - start) / step).round();
                    let j = raw.clamp(0.0, (count - 1) as f64) as usize;
                    let p = lattice_point(*start, *step, j);
                    if (p - t).abs() <= MEMBERSHIP_TOL {
                        return Ok((i, Pos::Node(p)));
                    }
                }
                Segment::GeometricLattice { ratio, first_exp, last_exp } => {
                    if t > 0.0 {
                        let guess = (t.ln() / ratio.ln()).round() as i32;
                        for k in guess.saturating_sub(1)..=guess.saturating_add(1) {
                            if k >= *first_exp && k <= *last_exp {
                                let p = ratio.powi(k);
                                if (p - t).abs() <= MEMBERSHIP_TOL {
                                    return Ok((i, Pos::Node(p)));
                                }
                            }
                        }
                    }
                }
                Segment::ContinuousInterval { lo, hi } => {
                    if (t - lo).abs() <= MEMBERSHIP_TOL {
                        return Ok((i, Pos::Node(*lo)));
                    }
                    if (t - hi).abs() <= MEMBERSHIP_TOL {
                        return Ok((i, Pos::Node(*hi)));
                    }
                    if t > *lo && t < *hi {
                        return Ok((i, Pos::Interior(t)));
                    }
                }
            }
        }
        Err(Error::PointNotInScale { point: t })
    }

    /// Canonical representative of `t` in the scale (snapped value).
    pub fn canonical(&self, t: f64) -> Result<f64> {
        Ok(self.locate(t)?.1.value())
    }

    /// Forward jump operator; `sigma(max) = max`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let (i, pos) = self.locate(t)?;
        let t = pos.value();
        let within = match &self.segments[i] {
            Segment::FiniteSet(v) => {
                let j = nearest_index(v, t);
                (j + 1 < v.len()).then(|| v[j + 1])
            }
            Segment::UniformLattice { start, step, count } => {
                let j = ((t - start) / step).round() as usize;
                (j + 1 < *count).then(|| lattice_point(*start, *step, j + 1))
            }
            Segment::GeometricLattice { ratio, first_exp: _, last_exp } => {
                let k = (t.ln() / ratio.ln()).round() as i32;
                (k < *last_exp).then(|| ratio.powi(k + 1))
            }
            Segment::ContinuousInterval { hi, .. } => (t < *hi).then_some(t),
        };
        match within {
            Some(s) => Ok(s),
            None if i + 1 < self.segments.len() => Ok(self.segments[i + 1].min()),
            None => Ok(t),
        }
    }

    /// Backward jump operator; `rho(min) = min`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let (i, pos) = self.locate(t)?;
        let t = pos.value();
        let within = match &self.segments[i] {
            Segment::FiniteSet(v) => {
                let j = nearest_index(v, t);
                (j > 0).then(|| v[j - 1])
            }
            Segment::UniformLattice { start, step, .. } => {
                let j = ((t - start) / step).round() as usize;
                (j > 0).then(|| lattice_point(*start, *step, j - 1))
            }
            Segment::GeometricLattice { ratio, first_exp, .. } => {
                let k = (t.ln() / ratio.ln()).round() as i32;
                (k > *first_exp).then(|| ratio.powi(k - 1))
            }
            Segment::ContinuousInterval { lo, .. } => (t > *lo).then_some(t),
        };
        match within {
            Some(s) => Ok(s),
            None if i > 0 => Ok(self.segments[i - 1].max()),
            None => Ok(t),
        }
    }

    /// Graininess `mu(t) = sigma(t) - t`; zero exactly at right-dense
    /// points and at the scale maximum.
    pub fn mu(&self, t: f64) -> Result<f64> {
        let t = self.canonical(t)?;
        Ok(self.sigma(t)? - t)
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let t = self.canonical(t)?;
        let right = if self.sigma(t)? > t { Density::Scattered } else { Density::Dense };
        let left = if self.rho(t)? < t { Density::Scattered } else { Density::Dense };
        Ok(PointClass {
            right,
            left,
            is_min: t == self.min(),
            is_max: t == self.max(),
        })
    }

    /// Bounds of the continuous interval containing `t`, if any.
    pub fn containing_interval(&self, t: f64) -> Option<(f64, f64)> {
        self.segments.iter().find_map(|seg| match seg {
            Segment::ContinuousInterval { lo, hi }
                if t >= lo - MEMBERSHIP_TOL && t <= hi + MEMBERSHIP_TOL =>
            {
                Some((*lo, *hi))
            }
            _ => None,
        })
    }

    /// Scale point nearest to `x` (ties resolve to the lower point).
    pub fn nearest_point(&self, x: f64) -> f64 {
        if x <= self.min() {
            return self.min();
        }
        if x >= self.max() {
            return self.max();
        }
        let mut best = self.min();
        let mut best_d = (x - best).abs();
        for seg in &self.segments {
            let cand = match seg {
                Segment::ContinuousInterval { lo, hi } => x.clamp(*lo, *hi),
                Segment::FiniteSet(v) => v[nearest_index(v, x)],
                Segment::UniformLattice { start, step, count } => {
                    let j = ((x - start) / step).round().clamp(0.0, (count - 1) as f64);
                    lattice_point(*start, *step, j as usize)
                }
                Segment::GeometricLattice { ratio, first_exp, last_exp } => {
                    let mut c = ratio.powi(*first_exp);
                    if x > 0.0 {
                        let k = ((x.ln() / ratio.ln()).round() as i32)
                            .clamp(*first_exp, *last_exp);
                        for kk in [k - 1, k, k + 1] {
                            if kk >= *first_exp && kk <= *last_exp {
                                let p = ratio.powi(kk);
                                if (p - x).abs() < (c - x).abs() {
                                    c = p;
                                }
                            }
                        }
                    }
                    c
                }
            };
            if (cand - x).abs() < best_d {
                best = cand;
                best_d = (cand - x).abs();
            }
        }
        best
    }

    /// Right-scattered points of `[a, b)` paired with their effective
    /// graininess `min(mu(t), b - t)`, plus the continuous pieces of
    /// `[a, b]`. Effective graininesses and piece lengths partition
    /// `b - a` exactly.
    #[allow(clippy::type_complexity)]
    pub fn iterate_scattered(&self, a: f64, b: f64) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        let a = self.canonical(a)?;
        let b = self.canonical(b)?;
        if a > b {
            return Err(Error::EmptyRange { a, b });
        }
        let mut scattered = Vec::new();
        let mut pieces = Vec::new();
        if a == b {
            return Ok((scattered, pieces));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.max() < a && !matches!(seg, Segment::ContinuousInterval { hi, .. } if *hi >= a)
            {
                continue;
            }
            if seg.min() >= b {
                break;
            }
            match seg {
                Segment::ContinuousInterval { lo, hi } => {
                    let plo = lo.max(a);
                    let phi = hi.min(b);
                    if phi > plo {
                        pieces.push((plo, phi));
                    }
                    // The right endpoint is itself right-scattered when
                    // the scale continues past this interval.
                    if *hi >= a && *hi < b {
                        let mu = self.next_min(i) - hi;
                        if mu > 0.0 {
                            scattered.push((*hi, mu.min(b - hi)));
                        }
                    }
                }
                _ => {
                    let pts = seg.enumerate();
                    for (j, p) in pts.iter().copied().enumerate() {
                        if p < a || p >= b {
                            continue;
                        }
                        let next = if j + 1 < pts.len() { pts[j + 1] } else { self.next_min(i) };
                        let mu = next - p;
                        if mu > 0.0 {
                            scattered.push((p, mu.min(b - p)));
                        }
                    }
                }
            }
        }
        Ok((scattered, pieces))
    }

    fn next_min(&self, i: usize) -> f64 {
        if i + 1 < self.segments.len() {
            self.segments[i + 1].min()
        } else {
            self.segments[i].max()
        }
    }

    /// Deterministic sample grid over `[lo, hi]`: every discrete point
    /// in range, plus endpoints and `interior` evenly spaced interior
    /// samples of each continuous piece.
    pub fn sample_grid(&self, lo: f64, hi: f64, interior: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for seg in &self.segments {
            match seg {
                Segment::ContinuousInterval { lo: slo, hi: shi } => {
                    let plo = slo.max(lo);
                    let phi = shi.min(hi);
                    if phi < plo {
                        continue;
                    }
                    out.push(plo);
                    let len = phi - plo;
                    if len > 0.0 {
                        for j in 1..=interior {
                            out.push(plo + len * j as f64 / (interior + 1) as f64);
                        }
                        out.push(phi);
                    }
                }
                _ => {
                    for p in seg.enumerate() {
                        if p >= lo && p <= hi {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses the scale mini-language; see the module docs for the grammar.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = ScaleParser { src: text.as_bytes(), pos: 0 };
        let segs = p.parse_scale()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Syntax {
                offset: p.pos,
                message: "unexpected trailing input".into(),
            });
        }
        TimeScale::from_segments(segs)
    }
}

impl std::str::FromStr for TimeScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TimeScale::parse(s)
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.len() > 1 {
            write!(f, "union(")?;
            for (i, s) in self.segments.iter().enumerate() {
                if i > 0 {
                    write!(f, "; ")?;
                }
                write_segment(f, s)?;
            }
            write!(f, ")")
        } else {
            write_segment(f, &self.segments[0])
        }
    }
}

fn write_segment(f: &mut fmt::Formatter<'_>, s: &Segment) -> fmt::Result {
    match s {
        Segment::FiniteSet(v) => {
            write!(f, "set:{{")?;
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")
        }
        Segment::UniformLattice { start, step, count } => {
            let last = lattice_point(*start, *step, count - 1);
            if *step == 1.0 && start.fract() == 0.0 {
                write!(f, "Z:{start}..{last}")
            } else {
                write!(f, "h:{step}:{start}..{last}")
            }
        }
        Segment::GeometricLattice { ratio, first_exp, last_exp } => {
            write!(f, "q:{ratio}:{first_exp}..{last_exp}")
        }
        Segment::ContinuousInterval { lo, hi } => write!(f, "R:{lo}..{hi}"),
    }
}

/// Index of the element of sorted `v` nearest to `t`.
fn nearest_index(v: &[f64], t: f64) -> usize {
    match v.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(j) => j,
        Err(0) => 0,
        Err(j) if j == v.len() => v.len() - 1,
        Err(j) => {
            if (t - v[j - 1]).abs() <= (v[j] - t).abs() {
                j - 1
            } else {
                j
            }
        }
    }
}

fn hull_crosses(points: &[f64], intervals: &[(f64, f64)]) -> bool {
    intervals
        .iter()
        .any(|(lo, _)| points[0] < *lo && points[points.len() - 1] > *lo)
}

/// Splits a sorted point list into maximal runs lying between intervals.
fn split_runs(points: &[f64], intervals: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let mut runs: Vec<Vec<f64>> = Vec::new();
    for &p in points {
        let gap = intervals.iter().filter(|(_, hi)| *hi < p).count();
        match runs.last_mut() {
            Some(run)
                if intervals.iter().filter(|(_, hi)| *hi < run[run.len() - 1]).count() == gap =>
            {
                run.push(p)
            }
            _ => runs.push(vec![p]),
        }
    }
    runs
}

struct ScaleParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ScaleParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.pos,
                message: format!("expected `{}`", b as char),
            })
        }
    }

    fn tag(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w = word.as_bytes();
        if self.src.len() - self.pos >= w.len() && &self.src[self.pos..self.pos + w.len()] == w {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    /// Decimal literal; stops before `..` so range syntax lexes cleanly.
    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') || self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let mut seen_digit = false;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_digit() {
                seen_digit = true;
                self.pos += 1;
            } else if c == b'.' {
                if self.src.get(self.pos + 1) == Some(&b'.') {
                    break;
                }
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && seen_digit {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                if !matches!(self.src.get(self.pos), Some(d) if d.is_ascii_digit()) {
                    self.pos = save;
                    break;
                }
            } else {
                break;
            }
        }
        if !seen_digit {
            return Err(Error::Syntax { offset: start, message: "expected a number".into() });
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("invalid number `{text}`"),
        })
    }

    fn range(&mut self) -> Result<(f64, f64)> {
        let a = self.number()?;
        self.expect(b'.')?;
        if self.src.get(self.pos) != Some(&b'.') {
            return Err(Error::Syntax { offset: self.pos, message: "expected `..`".into() });
        }
        self.pos += 1;
        let b = self.number()?;
        Ok((a, b))
    }

    fn int_from(&mut self, x: f64, offset: usize) -> Result<i64> {
        if x.fract().abs() > 1e-9 || x.abs() > 1e15 {
            return Err(Error::Syntax {
                offset,
                message: format!("expected an integer, found {x}"),
            });
        }
        Ok(x.round() as i64)
    }

    fn parse_scale(&mut self) -> Result<Vec<Segment>> {
        self.skip_ws();
        let offset = self.pos;
        if self.tag("union") {
            self.expect(b'(')?;
            let mut segs = self.parse_scale()?;
            while self.peek() == Some(b';') {
                self.pos += 1;
                segs.extend(self.parse_scale()?);
            }
            self.expect(b')')?;
            Ok(segs)
        } else if self.tag("set") {
            self.expect(b':')?;
            self.expect(b'{')?;
            let mut pts = vec![self.number()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                pts.push(self.number()?);
            }
            self.expect(b'}')?;
            pts.sort_by(|a, b| a.total_cmp(b));
            pts.dedup_by(|a, b| (*a - *b).abs() <= MEMBERSHIP_TOL);
            Ok(vec![Segment::FiniteSet(pts)])
        } else if self.tag("Z") {
            self.expect(b':')?;
            let off = self.pos;
            let (a, b) = self.range()?;
            let lo = a.ceil();
            let hi = b.floor();
            if lo > hi {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("no integers in [{a}, {b}]"),
                });
            }
            Ok(vec![Segment::UniformLattice {
                start: lo,
                step: 1.0,
                count: (hi - lo) as usize + 1,
            }])
        } else if self.tag("h") {
            self.expect(b':')?;
            let off = self.pos;
            let step = self.number()?;
            self.expect(b':')?;
            let (a, b) = self.range()?;
            if !(step > 0.0) {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("step must be positive, found {step}"),
                });
            }
            if b < a {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("empty lattice range [{a}, {b}]"),
                });
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok(vec![Segment::UniformLattice { start: a, step, count }])
        } else if self.tag("q") {
            self.expect(b':')?;
            let off = self.pos;
            let ratio = self.number()?;
            self.expect(b':')?;
            let ko = self.pos;
            let (k0, k1) = self.range()?;
            if !(ratio > 1.0) {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("ratio must exceed 1, found {ratio}"),
                });
            }
            let k0 = self.int_from(k0, ko)?;
            let k1 = self.int_from(k1, ko)?;
            if k0 > k1 {
                return Err(Error::Syntax {
                    offset: ko,
                    message: "empty exponent range".into(),
                });
            }
            Ok(vec![Segment::GeometricLattice {
                ratio,
                first_exp: k0 as i32,
                last_exp: k1 as i32,
            }])
        } else if self.tag("R") {
            self.expect(b':')?;
            let off = self.pos;
            let (a, b) = self.range()?;
            if !(a < b) {
                return Err(Error::Syntax {
                    offset: off,
                    message: format!("interval requires lo < hi, found [{a}, {b}]"),
                });
            }
            Ok(vec![Segment::ContinuousInterval { lo: a, hi: b }])
        } else {
            Err(Error::Syntax {
                offset,
                message: "expected one of `Z`, `h`, `q`, `set`, `R`, `union`".into(),
            })
        }
    }
}
