use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;

use super::curve::{sample_curve, sample_unit_circle, winding_number, WindingOptions};

/// Largest boundary polyline examined for self-intersections.
pub const MAX_POLYLINE: usize = 8192;
const MIN_POLYLINE: usize = 1024;

#[derive(Debug, Clone, Serialize)]
pub struct UnivalenceReport {
    pub univalent: bool,
    /// Polyline size used for the simplicity test.
    pub samples: usize,
    /// First pair of non-adjacent boundary segments found to meet.
    pub intersecting_segments: Option<(usize, usize)>,
    /// Interior probe whose image is not encircled exactly once, with the winding found.
    pub failed_probe: Option<(Complex64, i64)>,
}

/// Sixteen interior points on two staggered rings.
pub fn probe_points() -> Vec<Complex64> {
    (0..16)
        .map(|i| {
            let (radius, offset) = if i < 8 { (0.35, 0.0) } else { (0.7, 0.5) };
            Complex64::from_polar(radius, 2.0 * PI * ((i % 8) as f64 + offset) / 8.0)
        })
        .collect()
}

/// Decides univalence of an analytic map on the closed unit disk: the
/// boundary image must be a simple closed curve and must wind exactly once
/// around the images of the interior probes.
pub fn univalence_check<F>(f: F, options: &WindingOptions) -> Result<UnivalenceReport>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let curve = sample_curve(&f, options)?;
    let m = curve.len().clamp(MIN_POLYLINE, MAX_POLYLINE);
    let values = if m == curve.len() {
        curve.values
    } else {
        sample_unit_circle(&f, m, 0.0)?
    };
    if let Some(pair) = self_intersection(&values) {
        return Ok(UnivalenceReport {
            univalent: false,
            samples: m,
            intersecting_segments: Some(pair),
            failed_probe: None,
        });
    }
    for z in probe_points() {
        let w = f(z)?;
        let index = winding_number(|t| Ok(f(t)? - w), options)?;
        if index != 1 {
            return Ok(UnivalenceReport {
                univalent: false,
                samples: m,
                intersecting_segments: None,
                failed_probe: Some((z, index)),
            });
        }
    }
    Ok(UnivalenceReport {
        univalent: true,
        samples: m,
        intersecting_segments: None,
        failed_probe: None,
    })
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn on_segment(p: Complex64, q: Complex64, r: Complex64) -> bool {
    r.re >= p.re.min(q.re)
        && r.re <= p.re.max(q.re)
        && r.im >= p.im.min(q.im)
        && r.im <= p.im.max(q.im)
}

/// Closed-segment intersection including touching and collinear overlap.
pub fn segments_meet(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// First pair of non-adjacent segments of the closed polyline that meet,
/// found by sweeping segments sorted on their left end.
pub fn self_intersection(points: &[Complex64]) -> Option<(usize, usize)> {
    let m = points.len();
    if m < 4 {
        return None;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % m]);
    let mut order: Vec<usize> = (0..m).collect();
    let left = |i: usize| seg(i).0.re.min(seg(i).1.re);
    order.sort_by(|&a, &b| left(a).total_cmp(&left(b)));
    let mut found: Option<(usize, usize)> = None;
    for (pos, &i) in order.iter().enumerate() {
        let (a, b) = seg(i);
        let right = a.re.max(b.re);
        let (lo, hi) = (a.im.min(b.im), a.im.max(b.im));
        for &j in &order[pos + 1..] {
            let (c, d) = seg(j);
            if c.re.min(d.re) > right {
                break;
            }
            let adjacent = (i + 1) % m == j || (j + 1) % m == i;
            if adjacent || c.im.max(d.im) < lo || c.im.min(d.im) > hi {
                continue;
            }
            if segments_meet(a, b, c, d) {
                let pair = (i.min(j), i.max(j));
                if found.is_none_or(|f| pair < f) {
                    found = Some(pair);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> WindingOptions {
        WindingOptions::default()
    }

    #[test]
    fn identity_and_square() {
        assert!(univalence_check(Ok, &opts()).unwrap().univalent);
        let sq = univalence_check(|z: Complex64| Ok(z * z), &opts()).unwrap();
        assert!(!sq.univalent);
        assert!(sq.intersecting_segments.is_some());
    }

    #[test]
    fn quadratic_threshold() {
        // z + d z^2 is univalent on the closed disk iff |d| <= 1/2.
        for (d, expected) in [(0.4, true), (0.6, false)] {
            for phase in [0.0, 1.0, 2.5] {
                let dc = Complex64::from_polar(d, phase);
                let c = Complex64::new(0.7, -0.2);
                let r = univalence_check(|z| Ok(c * z + c * dc * z * z), &opts()).unwrap();
                assert_eq!(r.univalent, expected, "d={d} phase={phase}");
            }
        }
    }

    #[test]
    fn polyline_simplicity() {
        let m = 64;
        let pts: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
            .collect();
        assert_eq!(self_intersection(&pts), None);
        let figure8: Vec<Complex64> = (0..m)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                Complex64::new(t.sin(), (2.0 * t).sin() / 2.0)
            })
            .collect();
        assert!(self_intersection(&figure8).is_some());
        assert_eq!(probe_points().len(), 16);
    }

    #[test]
    fn segment_predicates() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        assert!(segments_meet(
            c(0.0, 0.0),
            c(1.0, 1.0),
            c(0.0, 1.0),
            c(1.0, 0.0)
        ));
        assert!(!segments_meet(
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(1.0, 1.0)
        ));
        assert!(segments_meet(
            c(0.0, 0.0),
            c(2.0, 0.0),
            c(1.0, 0.0),
            c(3.0, 0.0)
        ));
        assert!(segments_meet(
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 1.0)
        ));
    }
}
