use serde::{Deserialize, Serialize};

use super::curve::BoundaryCurve;
use super::point::{point_segment_distance, Point};
use crate::error::{Error, Result};

/// One bubble: a boundary with a stable identity that survives surgery
/// relabeling (children get fresh labels, the parent label is retired).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bubble {
    pub label: u32,
    pub curve: BoundaryCurve,
}

/// Timestamped collection of disjoint bubbles (the air domain).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BubbleSystem {
    pub bubbles: Vec<Bubble>,
    pub time: f64,
}

impl BubbleSystem {
    pub fn new(curves: Vec<BoundaryCurve>) -> Result<Self> {
        let sys = BubbleSystem {
            bubbles: curves
                .into_iter()
                .enumerate()
                .map(|(i, curve)| Bubble {
                    label: i as u32,
                    curve,
                })
                .collect(),
            time: 0.0,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bubbles.is_empty() {
            return Err(Error::validation("system has no bubbles"));
        }
        for b in &self.bubbles {
            b.curve.validate(false)?;
        }
        if self.total_area() <= 0.0 {
            return Err(Error::validation("total area must be positive"));
        }
        if self.pairwise_clearance() <= 0.0 {
            return Err(Error::validation("bubbles must be pairwise disjoint"));
        }
        // positive clearance does not rule out nesting
        for i in 0..self.bubbles.len() {
            for j in 0..self.bubbles.len() {
                if i != j
                    && self.bubbles[i]
                        .curve
                        .contains(self.bubbles[j].curve.vertex(0))
                {
                    return Err(Error::validation(format!(
                        "bubble {} is nested inside bubble {}",
                        self.bubbles[j].label, self.bubbles[i].label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn total_area(&self) -> f64 {
        self.bubbles.iter().map(|b| b.curve.area()).sum()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.bubbles.iter().map(|b| b.curve.area()).collect()
    }

    /// Minimum boundary-to-boundary distance over bubble pairs.
    /// Infinity for a single bubble.
    pub fn pairwise_clearance(&self) -> f64 {
        let n = self.bubbles.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(curve_gap(&self.bubbles[i].curve, &self.bubbles[j].curve));
                if best <= 0.0 {
                    return best;
                }
            }
        }
        best
    }

    /// Index of the bubble whose region contains `p`, if any.
    pub fn bubble_containing(&self, p: Point) -> Option<usize> {
        self.bubbles.iter().position(|b| b.curve.contains(p))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bubble_containing(p).is_some()
    }

    pub fn distance_to_any_boundary(&self, p: Point) -> f64 {
        self.bubbles
            .iter()
            .map(|b| b.curve.distance_to_boundary(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn next_label(&self) -> u32 {
        self.bubbles.iter().map(|b| b.label).max().map_or(0, |m| m + 1)
    }

    /// Mean vertex spacing across all boundaries.
    pub fn mean_spacing(&self) -> f64 {
        let total_perim: f64 = self.bubbles.iter().map(|b| b.curve.perimeter()).sum();
        let total_pts: usize = self.bubbles.iter().map(|b| b.curve.len()).sum();
        total_perim / total_pts as f64
    }
}

/// Minimum distance between two boundaries, with a bounding-box early exit.
pub fn curve_gap(a: &BoundaryCurve, b: &BoundaryCurve) -> f64 {
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    // if one contains the other's bbox entirely we still need the scan;
    // the quick reject only applies to separated boxes
    let dx = (blo.x - ahi.x).max(alo.x - bhi.x).max(0.0);
    let dy = (blo.y - ahi.y).max(alo.y - bhi.y).max(0.0);
    let box_gap = dx.hypot(dy);
    let bp = b.points();
    let m = bp.len();
    let mut best = f64::INFINITY;
    for &p in a.points() {
        for j in 0..m {
            best = best.min(point_segment_distance(p, bp[j], bp[(j + 1) % m]));
        }
    }
    // vertex-to-segment both ways catches segment-segment minima at vertices
    let ap = a.points();
    let n = ap.len();
    for &p in bp {
        for i in 0..n {
            best = best.min(point_segment_distance(p, ap[i], ap[(i + 1) % n]));
        }
    }
    debug_assert!(best >= box_gap - 1e-12);
    best
}
