//! Disk fillings of loops, boundary integrals, and the Stokes-type ratios.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::Rotation3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::OneForm;
use crate::paths::Polyline;
use crate::Vec3;

/// Twice the flat isoperimetric constant `1/(4 pi)`.
pub const DEFAULT_C_M: f64 = 1.0 / (2.0 * PI);
pub const DEFAULT_DELTA_M: f64 = 0.5;
pub const DEFAULT_SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedDisk {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Vertex indices of the boundary loop, in order.
    pub boundary: Vec<usize>,
}

fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

impl TriangulatedDisk {
    pub fn area(&self) -> f64 {
        area_of(&self.vertices, &self.triangles)
    }

    pub fn boundary_loop(&self) -> Result<Polyline> {
        Polyline::new(
            self.boundary.iter().map(|&i| self.vertices[i]).collect(),
            true,
        )
    }

    pub fn boundary_length(&self) -> f64 {
        let n = self.boundary.len();
        (0..n)
            .map(|i| {
                (self.vertices[self.boundary[(i + 1) % n]] - self.vertices[self.boundary[i]]).norm()
            })
            .sum()
    }

    pub fn boundary_diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (k, &i) in self.boundary.iter().enumerate() {
            for &j in &self.boundary[k + 1..] {
                d = d.max((self.vertices[i] - self.vertices[j]).norm());
            }
        }
        d
    }

    fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// True when the edges used by exactly one triangle form the single
    /// cycle listed in `boundary`.
    pub fn has_single_boundary_cycle(&self) -> bool {
        let mut count = std::collections::BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        let free: BTreeSet<(usize, usize)> = count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(e, _)| e)
            .collect();
        let n = self.boundary.len();
        let cycle: BTreeSet<(usize, usize)> = (0..n)
            .map(|i| {
                let (a, b) = (self.boundary[i], self.boundary[(i + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect();
        free == cycle && cycle.len() == n
    }

    /// Largest distance from a disk vertex to the loop `gamma`.
    pub fn max_distance_to(&self, gamma: &Polyline) -> f64 {
        self.vertices
            .iter()
            .map(|v| gamma.distance_to(v))
            .fold(0.0, f64::max)
    }

    /// OFF text: header, vertex list, triangle list, then the boundary as a comment.
    pub fn write_off<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "OFF")?;
        writeln!(w, "{} {} 0", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(w, "{} {} {}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        let b: Vec<String> = self.boundary.iter().map(usize::to_string).collect();
        writeln!(w, "# boundary {}", b.join(" "))
    }
}

fn area_of(vertices: &[Vec3], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| triangle_area(&vertices[t[0]], &vertices[t[1]], &vertices[t[2]]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillConfig {
    /// Concentric rings between the cone apex and the loop.
    pub rings: usize,
    pub smoothing_iters: usize,
    pub delta_m: f64,
    pub c_m: f64,
}

impl Default for FillConfig {
    fn default() -> Self {
        Self {
            rings: 8,
            smoothing_iters: 200,
            delta_m: DEFAULT_DELTA_M,
            c_m: DEFAULT_C_M,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillReport {
    pub area: f64,
    pub boundary_length: f64,
    /// `c_M |Gamma|^2`
    pub area_bound: f64,
    pub max_distance: f64,
    /// `c_M |Gamma|`
    pub distance_bound: f64,
    pub cone_area: f64,
    pub accepted_steps: usize,
}

impl FillReport {
    pub fn area_ok(&self) -> bool {
        self.area <= self.area_bound
    }

    pub fn distance_ok(&self) -> bool {
        self.max_distance <= self.distance_bound
    }
}

/// Fill a closed loop with a disk.
///
/// The apex is the arclength centroid of the loop; by Wirtinger's
/// inequality the cone over it has area at most `|Gamma|^2 / (4 pi)` in any
/// dimension. The cone is subdivided into rings and interior vertices are
/// Laplacian-smoothed, keeping a step only when it lowers the total area.
/// Boundary vertices are never moved.
pub fn fill_disk(gamma: &Polyline, cfg: &FillConfig) -> Result<(TriangulatedDisk, FillReport)> {
    if !gamma.is_closed() {
        return Err(Error::OpenPolyline);
    }
    let length = gamma.length();
    if !(length < cfg.delta_m) {
        return Err(Error::LoopTooLong {
            length,
            delta_m: cfg.delta_m,
        });
    }
    let rings = cfg.rings.max(1);
    let b = gamma.vertices();
    let n = b.len();

    let apex = gamma
        .segments()
        .map(|(a, c)| (a + c) * (0.5 * (c - a).norm()))
        .sum::<Vec3>()
        / length;

    // vertex 0 is the apex; ring j (1..=rings) occupies 1 + (j-1) n .. 1 + j n
    let mut vertices = Vec::with_capacity(1 + rings * n);
    vertices.push(apex);
    for j in 1..=rings {
        let t = j as f64 / rings as f64;
        for v in b {
            vertices.push(if j == rings {
                *v
            } else {
                apex + (v - apex) * t
            });
        }
    }
    let idx = |j: usize, i: usize| 1 + (j - 1) * n + (i % n);
    let mut triangles = Vec::with_capacity(n * (2 * rings - 1));
    for i in 0..n {
        triangles.push([0, idx(1, i), idx(1, i + 1)]);
    }
    for j in 1..rings {
        for i in 0..n {
            triangles.push([idx(j, i), idx(j + 1, i), idx(j + 1, i + 1)]);
            triangles.push([idx(j, i), idx(j + 1, i + 1), idx(j, i + 1)]);
        }
    }
    let boundary: Vec<usize> = (0..n).map(|i| idx(rings, i)).collect();
    let interior = 1 + (rings - 1) * n;

    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); interior];
    for t in &triangles {
        for k in 0..3 {
            let (a, c) = (t[k], t[(k + 1) % 3]);
            if a < interior {
                neighbors[a].insert(c);
            }
            if c < interior {
                neighbors[c].insert(a);
            }
        }
    }

    let cone_area = area_of(&vertices, &triangles);
    let mut area = cone_area;
    let mut mu = 0.5;
    let mut accepted = 0;
    for _ in 0..cfg.smoothing_iters {
        if mu < 1.0 / 64.0 {
            break;
        }
        let mut trial = vertices.clone();
        for (v, nb) in neighbors.iter().enumerate() {
            let avg = nb.iter().map(|&u| vertices[u]).sum::<Vec3>() / nb.len() as f64;
            trial[v] = vertices[v] + (avg - vertices[v]) * mu;
        }
        let trial_area = area_of(&trial, &triangles);
        if trial_area < area {
            vertices = trial;
            area = trial_area;
            accepted += 1;
        } else {
            mu *= 0.5;
        }
    }

    let disk = TriangulatedDisk {
        vertices,
        triangles,
        boundary,
    };
    let c_m = cfg.c_m;
    let report = FillReport {
        area,
        boundary_length: length,
        area_bound: c_m * length * length,
        max_distance: disk.max_distance_to(gamma),
        distance_bound: c_m * length,
        cone_area,
        accepted_steps: accepted,
    };
    Ok((disk, report))
}

/// `int_gamma alpha` with two-point Gauss quadrature on every segment.
pub fn boundary_integral(alpha: &OneForm, gamma: &Polyline) -> Result<f64> {
    if !gamma.is_closed() {
        return Err(Error::OpenPolyline);
    }
    Ok(line_integral(alpha, gamma))
}

/// Same quadrature on an open or closed path.
pub fn line_integral(alpha: &OneForm, gamma: &Polyline) -> f64 {
    let g = 0.5 / 3f64.sqrt();
    gamma
        .segments()
        .map(|(a, b)| {
            let d = b - a;
            0.5 * (alpha.eval(&(a + d * (0.5 - g)), &d) + alpha.eval(&(a + d * (0.5 + g)), &d))
        })
        .sum()
}

/// `|int_{dD} alpha| / (|dD|^(1-theta) |D|^theta)`.
///
/// `sigma` is the admissibility scale: the disk must satisfy
/// `max(diam dD, |dD|) < sigma`.
pub fn stokes_ratio(
    alpha: &OneForm,
    disk: &TriangulatedDisk,
    theta: f64,
    sigma: f64,
) -> Result<f64> {
    let len = disk.boundary_length();
    let area = disk.area();
    if !(len > 0.0) || !(area > 0.0) {
        return Err(Error::DegenerateDisk(format!("length {len}, area {area}")));
    }
    let size = disk.boundary_diameter().max(len);
    if !(size < sigma) {
        return Err(Error::NotAdmissible { size, sigma });
    }
    let integral = boundary_integral(alpha, &disk.boundary_loop()?)?;
    Ok(integral.abs() / (len.powf(1.0 - theta) * area.powf(theta)))
}

/// Loop generators for [`estimate_k`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiskFamily {
    /// Horizontal round circles with radius uniform in `[r_min, r_max]`.
    FlatCircles {
        r_min: f64,
        r_max: f64,
        segments: usize,
        center_half_width: f64,
    },
    /// Randomly rotated star-shaped loops with saddle-type bending, perimeter
    /// uniform in `[0.2, 0.98] * max_perimeter`.
    RandomLoops {
        max_perimeter: f64,
        segments: usize,
        center_half_width: f64,
        nonplanarity: f64,
    },
}

impl DiskFamily {
    pub fn admissible(sigma: f64) -> Self {
        Self::RandomLoops {
            max_perimeter: sigma,
            segments: 64,
            center_half_width: 0.4,
            nonplanarity: 0.3,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Polyline {
        match *self {
            Self::FlatCircles {
                r_min,
                r_max,
                segments,
                center_half_width,
            } => {
                let r = if r_max > r_min {
                    rng.gen_range(r_min..=r_max)
                } else {
                    r_min
                };
                let c = random_center(rng, center_half_width);
                circle(c, r, segments)
            }
            Self::RandomLoops {
                max_perimeter,
                segments,
                center_half_width,
                nonplanarity,
            } => {
                let perimeter = max_perimeter * rng.gen_range(0.2..0.98);
                let c = random_center(rng, center_half_width);
                random_loop(rng, c, perimeter, nonplanarity, segments)
            }
        }
    }
}

fn random_center(rng: &mut ChaCha8Rng, h: f64) -> Vec3 {
    if h > 0.0 {
        Vec3::new(
            rng.gen_range(-h..h),
            rng.gen_range(-h..h),
            rng.gen_range(-h..h),
        )
    } else {
        Vec3::zeros()
    }
}

/// Counterclockwise circle in the horizontal plane through `center`.
pub fn circle(center: Vec3, radius: f64, segments: usize) -> Polyline {
    let v = (0..segments)
        .map(|k| {
            let a = TAU * k as f64 / segments as f64;
            center + Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
        })
        .collect();
    Polyline::new(v, true).expect("circle has distinct vertices")
}

/// Star-shaped loop with random radial harmonics, bent out of plane, rotated
/// at random and scaled to the given perimeter.
pub fn random_loop(
    rng: &mut ChaCha8Rng,
    center: Vec3,
    perimeter: f64,
    nonplanarity: f64,
    segments: usize,
) -> Polyline {
    let radial: Vec<(f64, f64)> = (2..=4)
        .map(|_| (rng.gen_range(-0.15..0.15), rng.gen_range(0.0..TAU)))
        .collect();
    let bend = (
        rng.gen_range(-1.0..1.0) * nonplanarity,
        rng.gen_range(0.0..TAU),
    );
    let rot = Rotation3::from_euler_angles(
        rng.gen_range(0.0..TAU),
        rng.gen_range(0.0..PI),
        rng.gen_range(0.0..TAU),
    );
    let raw: Vec<Vec3> = (0..segments)
        .map(|k| {
            let a = TAU * k as f64 / segments as f64;
            let r = 1.0
                + radial
                    .iter()
                    .enumerate()
                    .map(|(j, (c, ph))| c * ((j + 2) as f64 * a + ph).cos())
                    .sum::<f64>();
            rot * Vec3::new(r * a.cos(), r * a.sin(), bend.0 * (2.0 * a + bend.1).cos())
        })
        .collect();
    let unit = Polyline::new(raw, true).expect("star loop has distinct vertices");
    let s = perimeter / unit.length();
    Polyline::new(
        unit.vertices().iter().map(|v| center + v * s).collect(),
        true,
    )
    .expect("scaled loop")
}

/// Horizontal lift of a circle of radius `r` through the origin for the
/// contact form `dz - (x dy - y dx)/2`, closed by the vertical segment back
/// down. Its height gain is the enclosed area `pi r^2`.
pub fn lifted_circle_loop(r: f64, segments: usize) -> Polyline {
    let top = PI * r * r;
    let mut v: Vec<Vec3> = (0..segments)
        .map(|k| {
            let t = TAU * k as f64 / segments as f64;
            Vec3::new(
                r * t.sin(),
                r * (1.0 - t.cos()),
                0.5 * r * r * (t - t.sin()),
            )
        })
        .collect();
    let drop = (segments / 8).max(2);
    v.extend((0..drop).map(|j| Vec3::new(0.0, 0.0, top * (1.0 - j as f64 / drop as f64))));
    Polyline::new(v, true).expect("lifted loop has distinct vertices")
}

/// Named test loops, each scaled to perimeter below `delta_m`.
pub fn loop_corpus(delta_m: f64, seed: u64) -> Vec<(String, Polyline)> {
    let target = 0.9 * delta_m;
    let scale_to = |g: Polyline, perimeter: f64| -> Polyline {
        let s = perimeter / g.length();
        let c = g.start();
        Polyline::new(g.vertices().iter().map(|v| c + (v - c) * s).collect(), true)
            .expect("scaled loop")
    };
    let param = |n: usize, f: &dyn Fn(f64) -> Vec3| -> Polyline {
        Polyline::new((0..n).map(|k| f(TAU * k as f64 / n as f64)).collect(), true)
            .expect("parametrized loop")
    };
    let mut out = vec![
        (
            "circle".to_string(),
            scale_to(circle(Vec3::zeros(), 1.0, 64), target),
        ),
        (
            "small_circle".to_string(),
            scale_to(circle(Vec3::new(0.2, -0.1, 0.3), 1.0, 32), 0.05 * delta_m),
        ),
        (
            "tilted_ellipse".to_string(),
            scale_to(
                param(64, &|t| Vec3::new(2.0 * t.cos(), t.sin(), 0.7 * t.sin())),
                target,
            ),
        ),
        (
            "square".to_string(),
            scale_to(
                Polyline::new(
                    vec![
                        Vec3::zeros(),
                        Vec3::new(1.0, 0.0, 0.0),
                        Vec3::new(1.0, 0.0, 1.0),
                        Vec3::new(0.0, 0.0, 1.0),
                    ],
                    true,
                )
                .unwrap(),
                target,
            ),
        ),
        (
            "saddle".to_string(),
            scale_to(
                param(64, &|t| Vec3::new(t.cos(), t.sin(), 0.5 * (2.0 * t).cos())),
                target,
            ),
        ),
        (
            "thin_rectangle".to_string(),
            scale_to(
                Polyline::new(
                    vec![
                        Vec3::zeros(),
                        Vec3::new(1.0, 0.0, 0.0),
                        Vec3::new(1.0, 0.02, 0.0),
                        Vec3::new(0.0, 0.02, 0.0),
                    ],
                    true,
                )
                .unwrap(),
                target,
            ),
        ),
        (
            "out_and_back".to_string(),
            scale_to(
                Polyline::new(
                    vec![
                        Vec3::zeros(),
                        Vec3::new(0.5, 0.2, 0.1),
                        Vec3::new(1.0, 0.4, 0.2),
                        Vec3::new(0.5, 0.2, 0.1),
                    ],
                    true,
                )
                .unwrap(),
                target,
            ),
        ),
    ];
    let r = {
        // perimeter 2 pi r + pi r^2 = target
        let a = PI;
        let b = TAU;
        (-b + (b * b + 4.0 * a * target).sqrt()) / (2.0 * a)
    };
    out.push((
        "lifted_circle".to_string(),
        lifted_circle_loop(r * 0.999, 64),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..24 {
        let bend = [0.0, 0.3, 0.6, 1.0][i % 4];
        let perimeter = delta_m * rng.gen_range(0.1..0.95);
        let c = random_center(&mut rng, 0.4);
        out.push((
            format!("star_{i}"),
            random_loop(&mut rng, c, perimeter, bend, 48),
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KSample {
    pub boundary_length: f64,
    pub area: f64,
    pub boundary_integral: f64,
    /// `stokes_ratio / norm_upper`
    pub normalized_ratio: f64,
    /// `|int_{dD} alpha| / |D|`
    pub smooth_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KEstimate {
    pub k_hat: f64,
    pub norm_upper: f64,
    pub samples: Vec<KSample>,
}

impl KEstimate {
    pub fn max_smooth_ratio(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.smooth_ratio)
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "trial,boundary_length,area,boundary_integral,normalized_ratio,smooth_ratio"
        )?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                i,
                s.boundary_length,
                s.area,
                s.boundary_integral,
                s.normalized_ratio,
                s.smooth_ratio
            )?;
        }
        Ok(())
    }
}

/// Empirical sup of `stokes_ratio / ||alpha||` over `trials` disks.
///
/// Trial `i` draws from its own random stream, so the sample sets are nested
/// in `trials` and the estimate is nondecreasing in it.
pub fn estimate_k(
    alpha: &OneForm,
    theta: f64,
    family: &DiskFamily,
    trials: usize,
    seed: u64,
    fill: &FillConfig,
    sigma: f64,
) -> Result<KEstimate> {
    if trials < 1 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let norm = alpha.norm_upper;
    let samples = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let gamma = family.sample(&mut rng);
            let (disk, report) = fill_disk(&gamma, fill)?;
            let ratio = stokes_ratio(alpha, &disk, theta, sigma)?;
            let integral = boundary_integral(alpha, &gamma)?;
            Ok(KSample {
                boundary_length: report.boundary_length,
                area: report.area,
                boundary_integral: integral,
                normalized_ratio: if norm > 0.0 { ratio / norm } else { 0.0 },
                smooth_ratio: integral.abs() / report.area,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KEstimate {
        k_hat: samples
            .iter()
            .map(|s| s.normalized_ratio)
            .fold(0.0, f64::max),
        norm_upper: norm,
        samples,
    })
}
