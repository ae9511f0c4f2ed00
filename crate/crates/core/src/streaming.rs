//! Segment-wise least-squares filtering for long or continuous records.
//!
//! The record is tiled into fixed-length segments that overlap by a fixed
//! amount; the final segment is right-aligned to the end of the record, so
//! it may overlap its predecessor by more. Each segment is filtered on its
//! own and neighbours are blended over a transition region centred in their
//! overlap. Since every segment is transient-free, no warm-up samples need
//! to be discarded.
//!
//! At most two segments contribute to any output sample, and their weights
//! sum to exactly `1.0`: the larger weight `w >= 0.5` is computed and the
//! smaller one is `1.0 - w`, which is exact in floating point.
//!
//! [`StreamingNotch`] accepts the record in chunks. When a segment has been
//! filtered, output is committed up to the start of that segment (the end of
//! its blend with the previous one), so committed outputs never depend on
//! samples past the end of the most recently completed segment. The lag
//! between input and committed output is below `segment_len + step`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cls::BandedClsFilter;
use crate::error::{Error, Result};
use crate::types::{NotchSpec, SignalVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Crossfade {
    /// Hard switch at the centre of the overlap.
    Rect,
    #[default]
    RaisedCosine,
}

impl fmt::Display for Crossfade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Crossfade::Rect => "rect",
            Crossfade::RaisedCosine => "raised-cosine",
        })
    }
}

impl FromStr for Crossfade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "rect" => Ok(Crossfade::Rect),
            "raised-cosine" | "cosine" => Ok(Crossfade::RaisedCosine),
            other => Err(Error::Usage(format!(
                "unknown crossfade '{other}' (expected rect or raised-cosine)"
            ))),
        }
    }
}

/// Segment length and overlap, in samples, plus the blending shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentPlan {
    segment_len: usize,
    overlap: usize,
    crossfade: Crossfade,
}

impl SegmentPlan {
    pub fn new(segment_len: usize, overlap: usize, crossfade: Crossfade) -> Result<Self> {
        if segment_len < 3 {
            return Err(Error::Parameter(format!("segment length must be at least 3, got {segment_len}")));
        }
        if overlap >= segment_len {
            return Err(Error::Parameter(format!(
                "overlap {overlap} must be shorter than the segment ({segment_len})"
            )));
        }
        if !overlap.is_multiple_of(2) {
            return Err(Error::Parameter(format!("overlap must be even, got {overlap}")));
        }
        Ok(Self {
            segment_len,
            overlap,
            crossfade,
        })
    }

    /// 10 s segments with 20% overlap (rounded down to even) and a
    /// raised-cosine crossfade.
    pub fn default_for_rate(fs_hz: f64) -> Result<Self> {
        let segment_len = (10.0 * fs_hz).round() as usize;
        Self::new(segment_len, default_overlap(segment_len), Crossfade::RaisedCosine)
    }

    pub fn segment_len(&self) -> usize {
        self.segment_len
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn crossfade(&self) -> Crossfade {
        self.crossfade
    }

    fn step(&self) -> usize {
        self.segment_len - self.overlap
    }

    /// Segment starts and transition regions for a record of `total_len`.
    pub fn layout(&self, total_len: usize) -> Result<SegmentLayout> {
        let starts = plan_segments(total_len, self.segment_len, self.overlap)?;
        let mut transitions = Vec::with_capacity(starts.len().saturating_sub(1));
        let mut prev_end = 0;
        for pair in starts.windows(2) {
            let t = self.transition(pair[0], pair[1], prev_end);
            prev_end = t.end();
            transitions.push(t);
        }
        Ok(SegmentLayout {
            plan: *self,
            total_len,
            starts,
            transitions,
        })
    }

    /// Region between the segment starting at `left` and the one at `right`.
    /// `prev_end` is the end of the previous region, which this one must not
    /// overlap.
    fn transition(&self, left: usize, right: usize, prev_end: usize) -> Transition {
        let shared = left + self.segment_len - right;
        let centre = (right + shared / 2).max(prev_end);
        // Consecutive regions may not overlap, so each takes at most half
        // the distance between its segment starts.
        let half = match self.crossfade {
            Crossfade::Rect => 0,
            Crossfade::RaisedCosine => (self.overlap / 2)
                .min((right - left) / 2)
                .min(centre - prev_end)
                .min(left + self.segment_len - centre),
        };
        Transition {
            start: centre - half,
            len: 2 * half,
        }
    }
}

/// Default overlap for a segment length: 20%, rounded down to even.
pub fn default_overlap(segment_len: usize) -> usize {
    (segment_len / 5) & !1
}

/// Deterministic tiling: starts `0, step, 2 step, ...` while a whole
/// segment fits, then one right-aligned segment covering the tail if needed.
pub fn plan_segments(total_len: usize, segment_len: usize, overlap: usize) -> Result<Vec<usize>> {
    if segment_len < 3 || overlap >= segment_len {
        return Err(Error::Parameter(format!(
            "invalid segmentation: length {segment_len}, overlap {overlap}"
        )));
    }
    if total_len < segment_len {
        return Err(Error::Parameter(format!(
            "record of {total_len} samples is shorter than one segment ({segment_len})"
        )));
    }
    let step = segment_len - overlap;
    let mut starts = vec![0];
    let mut start = 0;
    while start + segment_len < total_len {
        let next = start + step;
        if next + segment_len > total_len {
            starts.push(total_len - segment_len);
            break;
        }
        starts.push(next);
        start = next;
    }
    Ok(starts)
}

/// Blending region `[start, start + len)` between consecutive segments.
/// The left segment's weight falls from 1 to 0 across it. A zero-length
/// region is a hard cut at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub start: usize,
    pub len: usize,
}

impl Transition {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    /// `(left weight, right weight)` at offset `j` into the region.
    fn weights(&self, j: usize) -> (f64, f64) {
        let phase = PI * (j as f64 + 0.5) / self.len as f64;
        if 2 * j < self.len {
            let left = 0.5 + 0.5 * phase.cos();
            (left, 1.0 - left)
        } else {
            let right = 0.5 - 0.5 * phase.cos();
            (1.0 - right, right)
        }
    }
}

/// A [`SegmentPlan`] applied to a concrete record length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    pub plan: SegmentPlan,
    pub total_len: usize,
    pub starts: Vec<usize>,
    /// `transitions[i]` joins segment `i` and `i + 1`.
    pub transitions: Vec<Transition>,
}

impl SegmentLayout {
    /// Weight of segment `i` at each of its samples.
    pub fn segment_weights(&self, i: usize) -> Vec<f64> {
        let start = self.starts[i];
        let seg = self.plan.segment_len;
        let mut w = vec![0.0; seg];
        let from = if i == 0 { 0 } else { self.transitions[i - 1].start };
        let to = self.transitions.get(i).map_or(self.total_len, |t| t.end());
        for (t, slot) in (from..to).zip(&mut w[from - start..]) {
            *slot = 1.0;
            if i > 0 {
                let tr = self.transitions[i - 1];
                if t < tr.end() {
                    *slot = tr.weights(t - tr.start).1;
                }
            }
            if let Some(tr) = self.transitions.get(i) {
                if t >= tr.start {
                    *slot = tr.weights(t - tr.start).0;
                }
            }
        }
        w
    }
}

/// Merges filtered segments in order, emitting output as soon as it is final.
#[derive(Debug, Clone)]
struct Stitcher {
    plan: SegmentPlan,
    prev: Option<(usize, Vec<f64>)>,
    prev_region_end: usize,
    emitted: usize,
}

impl Stitcher {
    fn new(plan: SegmentPlan) -> Self {
        Self {
            plan,
            prev: None,
            prev_region_end: 0,
            emitted: 0,
        }
    }

    fn add(&mut self, start: usize, y: Vec<f64>, out: &mut Vec<f64>) {
        if let Some((prev_start, prev_y)) = self.prev.take() {
            let tr = self.plan.transition(prev_start, start, self.prev_region_end);
            out.extend_from_slice(&prev_y[self.emitted - prev_start..tr.start - prev_start]);
            for j in 0..tr.len {
                let t = tr.start + j;
                let (wl, wr) = tr.weights(j);
                out.push(wl * prev_y[t - prev_start] + wr * y[t - start]);
            }
            self.emitted = tr.end();
            self.prev_region_end = tr.end();
        }
        self.prev = Some((start, y));
    }

    fn finish(mut self, total_len: usize, out: &mut Vec<f64>) {
        if let Some((start, y)) = self.prev.take() {
            out.extend_from_slice(&y[self.emitted - start..total_len - start]);
            self.emitted = total_len;
        }
    }
}

fn check_plan_fits(x_len: usize, plan: &SegmentPlan) -> Result<()> {
    if x_len < plan.segment_len {
        return Err(Error::Parameter(format!(
            "record of {x_len} samples is shorter than one segment ({})",
            plan.segment_len
        )));
    }
    Ok(())
}

/// Filters each segment independently with the banded solver and stitches
/// the outputs. Returns the denoised signal.
pub fn segmented_filter(x: &SignalVector, spec: &NotchSpec, plan: &SegmentPlan) -> Result<SignalVector> {
    check_plan_fits(x.len(), plan)?;
    let starts = plan_segments(x.len(), plan.segment_len, plan.overlap)?;
    let filter = BandedClsFilter::new(plan.segment_len, spec)?;
    let samples = x.samples();
    let outputs = starts
        .par_iter()
        .map(|&s| filter.apply(&samples[s..s + plan.segment_len]).map(|(_, y)| y))
        .collect::<Result<Vec<_>>>()?;

    let mut stitcher = Stitcher::new(*plan);
    let mut out = Vec::with_capacity(x.len());
    for (&s, y) in starts.iter().zip(outputs) {
        stitcher.add(s, y, &mut out);
    }
    stitcher.finish(x.len(), &mut out);
    Ok(x.with_samples(out))
}

/// Chunk-fed variant of [`segmented_filter`] with identical output.
///
/// Single consumer: feed with [`push`](Self::push), then call
/// [`finish`](Self::finish). The concatenation of everything returned equals
/// the batch result bit for bit.
#[derive(Debug, Clone)]
pub struct StreamingNotch {
    plan: SegmentPlan,
    filter: BandedClsFilter,
    stitcher: Stitcher,
    /// Samples from `origin` onwards.
    buffer: Vec<f64>,
    origin: usize,
    received: usize,
    next_start: usize,
    last_end: usize,
}

impl StreamingNotch {
    pub fn new(spec: &NotchSpec, plan: SegmentPlan) -> Result<Self> {
        Ok(Self {
            plan,
            filter: BandedClsFilter::new(plan.segment_len, spec)?,
            stitcher: Stitcher::new(plan),
            buffer: Vec::new(),
            origin: 0,
            received: 0,
            next_start: 0,
            last_end: 0,
        })
    }

    /// Number of samples fed so far.
    pub fn received(&self) -> usize {
        self.received
    }

    fn run_segment(&mut self, start: usize, out: &mut Vec<f64>) -> Result<()> {
        let from = start - self.origin;
        let (_, y) = self.filter.apply(&self.buffer[from..from + self.plan.segment_len])?;
        self.stitcher.add(start, y, out);
        self.last_end = start + self.plan.segment_len;
        Ok(())
    }

    /// Feeds samples; returns outputs that became final.
    pub fn push(&mut self, chunk: &[f64]) -> Result<Vec<f64>> {
        if let Some(v) = chunk.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite sample {v} in stream")));
        }
        self.buffer.extend_from_slice(chunk);
        self.received += chunk.len();
        let mut out = Vec::new();
        while self.next_start + self.plan.segment_len <= self.received {
            let start = self.next_start;
            self.run_segment(start, &mut out)?;
            self.next_start += self.plan.step();
            // the tail segment may start anywhere after `start`
            self.buffer.drain(..start - self.origin);
            self.origin = start;
        }
        Ok(out)
    }

    /// Ends the stream, filtering the right-aligned tail segment if needed.
    pub fn finish(mut self) -> Result<Vec<f64>> {
        check_plan_fits(self.received, &self.plan)?;
        let mut out = Vec::new();
        if self.last_end < self.received {
            self.run_segment(self.received - self.plan.segment_len, &mut out)?;
        }
        let total = self.received;
        self.stitcher.finish(total, &mut out);
        Ok(out)
    }
}
