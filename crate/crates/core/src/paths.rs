//! Polylines, horizontality defects and integration of horizontal controls.
//!
//! Paths live in the universal cover of the chart: coordinates are never
//! wrapped, so lengths and enclosed areas of loops come out unwrapped.

use std::io::Write;

use crate::error::{Error, Result};
use crate::forms::{frame_from_normal, OneForm};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Vec3>,
    closed: bool,
}

impl Polyline {
    /// Open or closed polyline; a closed one does not repeat its first vertex.
    pub fn new(vertices: Vec<Vec3>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Invalid(
                "a polyline needs at least two vertices".into(),
            ));
        }
        let p = Self { vertices, closed };
        if let Some(index) = p.segments().position(|(a, b)| a == b) {
            return Err(Error::ZeroSegment { index });
        }
        Ok(p)
    }

    /// Zero-length path sitting at `p`.
    pub fn point(p: Vec3) -> Self {
        Self {
            vertices: vec![p],
            closed: false,
        }
    }

    pub fn segment(a: Vec3, b: Vec3) -> Result<Self> {
        Self::new(vec![a, b], false)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn start(&self) -> Vec3 {
        self.vertices[0]
    }

    pub fn end(&self) -> Vec3 {
        if self.closed {
            self.vertices[0]
        } else {
            *self.vertices.last().unwrap()
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.vertices.len();
        let count = match (n, self.closed) {
            (1, _) => 0,
            (_, true) => n,
            (_, false) => n - 1,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        if self.closed {
            vertices[1..].reverse();
        } else {
            vertices.reverse();
        }
        Self {
            vertices,
            closed: self.closed,
        }
    }

    /// Insert the midpoint of every segment.
    pub fn refined(&self) -> Self {
        let mut vertices = Vec::with_capacity(2 * self.vertices.len());
        for (a, b) in self.segments() {
            vertices.push(a);
            vertices.push(0.5 * (a + b));
        }
        if !self.closed {
            vertices.push(self.end());
        }
        Self {
            vertices,
            closed: self.closed,
        }
    }

    /// The closed loop `gamma0 - gamma1` for two open paths sharing their start.
    ///
    /// If the ends of the two paths do not coincide the loop picks up the
    /// short connecting segment between them.
    pub fn loop_from(gamma0: &Polyline, gamma1: &Polyline) -> Result<Self> {
        if gamma0.closed || gamma1.closed {
            return Err(Error::Invalid("loop_from expects open paths".into()));
        }
        let mut vertices = gamma0.vertices.clone();
        let back = gamma1.reversed();
        for v in back.vertices.iter().take(back.vertices.len() - 1) {
            if vertices.last() != Some(v) {
                vertices.push(*v);
            }
        }
        if vertices.last() == vertices.first() {
            vertices.pop();
        }
        Self::new(vertices, true)
    }

    /// Path concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Polyline) -> Result<Self> {
        if self.closed || other.closed {
            return Err(Error::Invalid("cannot concatenate closed polylines".into()));
        }
        let mut vertices = self.vertices.clone();
        for v in &other.vertices {
            if vertices.last() != Some(v) {
                vertices.push(*v);
            }
        }
        if vertices.len() == 1 {
            return Ok(Self::point(vertices[0]));
        }
        Self::new(vertices, false)
    }

    pub fn translated(&self, d: Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + d).collect(),
            closed: self.closed,
        }
    }

    /// Euclidean diameter of the vertex set.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Point at arclength `s` from the start, `0 <= s <= length`.
    pub fn point_at(&self, s: f64) -> Result<Vec3> {
        let total = self.length();
        if !(0.0..=total).contains(&s) {
            return Err(Error::OutOfRange {
                name: "arclength",
                range: "[0, length]",
                value: s,
            });
        }
        let mut left = s;
        let mut last = self.start();
        for (a, b) in self.segments() {
            let l = (b - a).norm();
            if left <= l {
                return Ok(a + (b - a) * (left / l));
            }
            left -= l;
            last = b;
        }
        Ok(last)
    }

    /// Distance from `x` to the polyline.
    pub fn distance_to(&self, x: &Vec3) -> f64 {
        if self.is_trivial() {
            return (x - self.vertices[0]).norm();
        }
        self.segments()
            .map(|(a, b)| {
                let d = b - a;
                let t = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                (x - (a + d * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// One vertex per row: `x,y,z`. A closed polyline repeats its first vertex.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,z")?;
        let repeat = self.closed.then_some(&self.vertices[0]);
        for v in self.vertices.iter().chain(repeat) {
            writeln!(w, "{},{},{}", v.x, v.y, v.z)?;
        }
        Ok(())
    }
}

pub fn path_length(p: &Polyline) -> f64 {
    p.length()
}

/// Mean of `|alpha_unit(gamma')|` along the path, midpoint rule per segment.
pub fn horizontality_defect(p: &Polyline, alpha: &OneForm) -> f64 {
    let mut num = 0.0;
    let mut len = 0.0;
    for (a, b) in p.segments() {
        let d = b - a;
        let mid = 0.5 * (a + b);
        num += alpha.unit_normal(&mid).dot(&d).abs();
        len += d.norm();
    }
    if len > 0.0 {
        num / len
    } else {
        0.0
    }
}

/// Horizontal controls `(u1, u2)` in the kernel frame, applied for `step` each.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSequence {
    pub controls: Vec<[f64; 2]>,
    pub step: f64,
    pub start: Vec3,
}

impl ControlSequence {
    pub fn new(controls: Vec<[f64; 2]>, step: f64, start: Vec3) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::OutOfRange {
                name: "step",
                range: "(0, inf)",
                value: step,
            });
        }
        if controls.iter().flatten().any(|u| !u.is_finite()) {
            return Err(Error::Invalid("controls must be finite".into()));
        }
        Ok(Self {
            controls,
            step,
            start,
        })
    }

    /// `sum h |u_k|`, the length of the integrated path.
    pub fn length(&self) -> f64 {
        self.controls
            .iter()
            .map(|u| self.step * u[0].hypot(u[1]))
            .sum()
    }
}

/// Explicit first-order stepping `x_{k+1} = x_k + h (u1 e1(x_k) + u2 e2(x_k))`.
pub fn integrate_controls(c: &ControlSequence, alpha: &OneForm) -> Polyline {
    let mut vertices = Vec::with_capacity(c.controls.len() + 1);
    let mut x = c.start;
    vertices.push(x);
    for u in &c.controls {
        if u[0] == 0.0 && u[1] == 0.0 {
            continue;
        }
        let (e1, e2) = frame_from_normal(&alpha.unit_normal(&x));
        let next = x + c.step * (u[0] * e1 + u[1] * e2);
        if next != x {
            x = next;
            vertices.push(x);
        }
    }
    if vertices.len() == 1 {
        Polyline::point(c.start)
    } else {
        Polyline {
            vertices,
            closed: false,
        }
    }
}

/// Endpoint and length of the integrated path without storing vertices.
#[inline]
pub(crate) fn integrate_endpoint(
    alpha: &OneForm,
    start: Vec3,
    step: f64,
    controls: impl Iterator<Item = [f64; 2]>,
) -> (Vec3, f64) {
    let mut x = start;
    let mut len = 0.0;
    for u in controls {
        let speed = u[0].hypot(u[1]);
        if speed == 0.0 {
            continue;
        }
        let (e1, e2) = frame_from_normal(&alpha.unit_normal(&x));
        x += step * (u[0] * e1 + u[1] * e2);
        len += step * speed;
    }
    (x, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MetricChart;

    fn square(s: f64) -> Polyline {
        Polyline::new(
            vec![
                Vec3::zeros(),
                Vec3::new(s, 0.0, 0.0),
                Vec3::new(s, s, 0.0),
                Vec3::new(0.0, s, 0.0),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(
            Polyline::segment(Vec3::zeros(), Vec3::x())
                .unwrap()
                .length(),
            1.0
        );
        assert_eq!(square(1.0).length(), 4.0);
        assert_eq!(Polyline::point(Vec3::zeros()).length(), 0.0);
    }

    #[test]
    fn rejects_zero_segments() {
        let e = Polyline::new(vec![Vec3::zeros(), Vec3::zeros(), Vec3::x()], false);
        assert!(matches!(e, Err(Error::ZeroSegment { index: 0 })));
        let e = Polyline::new(vec![Vec3::zeros(), Vec3::x(), Vec3::zeros()], true);
        assert!(matches!(e, Err(Error::ZeroSegment { index: 2 })));
    }

    #[test]
    fn defects() {
        let h = OneForm::heisenberg(0.5, &MetricChart::default());
        let xs = Polyline::segment(Vec3::zeros(), Vec3::x()).unwrap();
        assert_eq!(horizontality_defect(&xs, &h), 0.0);
        let zs = Polyline::segment(Vec3::zeros(), Vec3::z()).unwrap();
        assert_eq!(horizontality_defect(&zs, &h), 1.0);
        let f = OneForm::dz(0.5);
        assert_eq!(
            horizontality_defect(&square(0.3).translated(Vec3::new(0.0, 0.0, 0.2)), &f),
            0.0
        );
    }

    #[test]
    fn zero_controls_give_trivial_path() {
        let c = ControlSequence::new(vec![[0.0, 0.0]; 10], 0.1, Vec3::new(1.0, 2.0, 3.0)).unwrap();
        let p = integrate_controls(&c, &OneForm::dz(0.5));
        assert!(p.is_trivial());
        assert_eq!(p.start(), Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(p.length(), 0.0);
    }

    #[test]
    fn loop_from_closes_paths() {
        let g0 = Polyline::segment(Vec3::zeros(), Vec3::z()).unwrap();
        let g1 = Polyline::new(vec![Vec3::zeros(), Vec3::x(), Vec3::z()], false).unwrap();
        let l = Polyline::loop_from(&g0, &g1).unwrap();
        assert!(l.is_closed());
        assert_eq!(l.vertices().len(), 3);
        assert!((l.length() - (1.0 + 1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        square(1.0).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("x,y,z\n0,0,0\n"));
    }
}
