//! Single-qubit states on the Bloch ball, the stabilizer octahedron, and the
//! magic directions around it.
//!
//! The octahedron `O` is the convex hull of the six Pauli eigenstates. H-type
//! magic directions point through the 12 edge midpoints of `O`, T-type
//! directions through its 8 face centres.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::knownmaps;

/// Tolerance on norm and positivity when checking physicality.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// `sqrt((1 + 1/sqrt(2)) / 2)`, the H-fidelity above which the new
/// procedure distills.
pub fn f_h_star() -> f64 {
    ((1.0 + FRAC_1_SQRT_2) / 2.0).sqrt()
}

/// Distance from the origin of the plane beyond which T distillation works.
pub fn t_plane_distance() -> f64 {
    (3.0f64 / 7.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// The pure `+1` eigenstate of the Hadamard gate.
    pub fn h_state() -> Self {
        Self::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2)
    }

    /// The H-line point `(x, 0, x)`.
    pub fn on_h_line(x: f64) -> Self {
        Self::new(x, 0.0, x)
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn l1_norm(&self) -> f64 {
        self.x.abs() + self.y.abs() + self.z.abs()
    }

    /// Largest single-qubit Pauli expectation magnitude.
    pub fn max_pauli_expectation(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_physical(&self) -> bool {
        self.dot(self) <= 1.0 + PHYSICAL_TOL
    }

    pub fn check_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::NonPhysical { x: self.x, y: self.y, z: self.z })
        }
    }

    pub fn to_density(&self) -> SingleQubitDensity {
        bloch_to_density(self)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

fn parse_coordinate(token: &str) -> Result<f64> {
    let t = token.trim();
    match t {
        "isq2" | "+isq2" => Ok(FRAC_1_SQRT_2),
        "-isq2" => Ok(-FRAC_1_SQRT_2),
        "1/2" => Ok(0.5),
        "-1/2" => Ok(-0.5),
        _ => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad Bloch coordinate `{t}`"))),
    }
}

impl FromStr for BlochVector {
    type Err = Error;

    /// Parses `x,y,z`. Besides decimals, the tokens `isq2`/`-isq2`
    /// (`±1/sqrt(2)`) and `1/2`/`-1/2` are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected `x,y,z`, got `{s}`")));
        }
        Ok(Self::new(parse_coordinate(parts[0])?, parse_coordinate(parts[1])?, parse_coordinate(parts[2])?))
    }
}

/// 2x2 density matrix entries of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitDensity {
    pub rho00: f64,
    pub rho11: f64,
    pub rho01: Complex64,
    pub rho10: Complex64,
}

impl SingleQubitDensity {
    pub fn is_physical(&self) -> bool {
        let trace_ok = (self.rho00 + self.rho11 - 1.0).abs() <= PHYSICAL_TOL;
        let herm_ok = (self.rho10 - self.rho01.conj()).norm() <= PHYSICAL_TOL;
        let det = self.rho00 * self.rho11 - self.rho01.norm_sqr();
        trace_ok && herm_ok && det >= -PHYSICAL_TOL
    }

    pub fn to_bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    /// Entry `rho_{ij}`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match (i, j) {
            (0, 0) => Complex64::new(self.rho00, 0.0),
            (0, 1) => self.rho01,
            (1, 0) => self.rho10,
            _ => Complex64::new(self.rho11, 0.0),
        }
    }
}

pub fn bloch_to_density(v: &BlochVector) -> SingleQubitDensity {
    let rho01 = Complex64::new(v.x / 2.0, -v.y / 2.0);
    SingleQubitDensity { rho00: (1.0 + v.z) / 2.0, rho11: (1.0 - v.z) / 2.0, rho01, rho10: rho01.conj() }
}

pub fn density_to_bloch(rho: &SingleQubitDensity) -> BlochVector {
    BlochVector::new(2.0 * rho.rho01.re, -2.0 * rho.rho01.im, rho.rho00 - rho.rho11)
}

/// Closed convex hull of the six Pauli eigenstates.
pub fn octahedron_contains(v: &BlochVector) -> bool {
    v.l1_norm() <= 1.0
}

/// The 12 unit vectors through the edge midpoints of the octahedron.
pub fn h_directions() -> [BlochVector; 12] {
    let s = FRAC_1_SQRT_2;
    let mut out = [BlochVector::default(); 12];
    let mut k = 0;
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        out[k] = BlochVector::new(a * s, b * s, 0.0);
        out[k + 1] = BlochVector::new(a * s, 0.0, b * s);
        out[k + 2] = BlochVector::new(0.0, a * s, b * s);
        k += 3;
    }
    out
}

/// The 8 unit vectors through the face centres of the octahedron.
pub fn t_directions() -> [BlochVector; 8] {
    let s = 1.0 / 3f64.sqrt();
    let mut out = [BlochVector::default(); 8];
    for (k, item) in out.iter_mut().enumerate() {
        let sx = if k & 4 != 0 { -s } else { s };
        let sy = if k & 2 != 0 { -s } else { s };
        let sz = if k & 1 != 0 { -s } else { s };
        *item = BlochVector::new(sx, sy, sz);
    }
    out
}

fn nearest(v: &BlochVector, dirs: &[BlochVector]) -> (BlochVector, f64) {
    dirs.iter()
        .map(|d| (*d, v.dot(d)))
        .fold((dirs[0], f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Nearest H axis and the projection length `r . h` onto it.
pub fn nearest_h_axis(v: &BlochVector) -> (BlochVector, f64) {
    nearest(v, &h_directions())
}

/// Nearest T axis and the projection length `r . t` onto it.
pub fn nearest_t_axis(v: &BlochVector) -> (BlochVector, f64) {
    nearest(v, &t_directions())
}

/// Maximum fidelity with any of the 12 H-type magic states,
/// `max_h sqrt((1 + r . h) / 2)`.
pub fn h_fidelity(v: &BlochVector) -> f64 {
    let (_, proj) = nearest_h_axis(v);
    ((1.0 + proj) / 2.0).max(0.0).sqrt()
}

/// Orthogonal projection `(r . a) a` onto a unit axis.
pub fn twirl_onto(v: &BlochVector, axis: &BlochVector) -> BlochVector {
    axis.scale(v.dot(axis))
}

/// H-twirl onto the nearest edge-midpoint axis.
pub fn twirl_h(v: &BlochVector) -> BlochVector {
    let (axis, _) = nearest_h_axis(v);
    twirl_onto(v, &axis)
}

/// T-twirl onto the nearest face-centre axis.
pub fn twirl_t(v: &BlochVector) -> BlochVector {
    let (axis, _) = nearest_t_axis(v);
    twirl_onto(v, &axis)
}

/// Magic-axis mixture error probability, `p` in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorRate(f64);

impl ErrorRate {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=0.5).contains(&p) {
            Ok(Self(p))
        } else {
            Err(Error::OutOfRange { value: p, range: "[0, 1/2]" })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `x = (1 - 2p) / sqrt(2)`.
pub fn p_to_x(p: ErrorRate) -> f64 {
    (1.0 - 2.0 * p.0) * FRAC_1_SQRT_2
}

/// Inverse of [`p_to_x`], defined for `x` in `[0, 1/sqrt(2)]`.
pub fn x_to_p(x: f64) -> Result<ErrorRate> {
    let tol = 1e-15;
    if !(-tol..=FRAC_1_SQRT_2 + tol).contains(&x) {
        return Err(Error::OutOfRange { value: x, range: "[0, 1/sqrt(2)]" });
    }
    let p = (1.0 - std::f64::consts::SQRT_2 * x) / 2.0;
    Ok(ErrorRate(p.clamp(0.0, 0.5)))
}

/// `p` for an H-line coordinate without range checks; used for map outputs
/// that may leave the physical H segment.
pub fn x_to_p_unchecked(x: f64) -> f64 {
    (1.0 - std::f64::consts::SQRT_2 * x) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    Simulable,
    HDistillableNew,
    HDistillableBk,
    TDistillable,
    Gap,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::Simulable => "SIMULABLE",
            RegionLabel::HDistillableNew => "H_DISTILLABLE_NEW",
            RegionLabel::HDistillableBk => "H_DISTILLABLE_BK",
            RegionLabel::TDistillable => "T_DISTILLABLE",
            RegionLabel::Gap => "GAP",
        };
        f.write_str(s)
    }
}

/// Full classification: the scalar label plus every distillability flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub label: RegionLabel,
    pub simulable: bool,
    pub h_new: bool,
    pub h_bk: bool,
    pub t: bool,
    pub h_fidelity: f64,
    /// H-axis error after twirling onto the nearest edge direction.
    pub h_error: f64,
    /// Largest projection onto a face-centre axis.
    pub t_projection: f64,
}

impl RegionReport {
    pub fn flags(&self) -> Vec<RegionLabel> {
        let mut out = Vec::new();
        if self.h_new {
            out.push(RegionLabel::HDistillableNew);
        }
        if self.h_bk {
            out.push(RegionLabel::HDistillableBk);
        }
        if self.t {
            out.push(RegionLabel::TDistillable);
        }
        out
    }
}

pub fn classify_region(v: &BlochVector) -> Result<RegionReport> {
    v.check_physical()?;
    let fidelity = h_fidelity(v);
    let (_, h_proj) = nearest_h_axis(v);
    let (_, t_proj) = nearest_t_axis(v);
    let h_error = (1.0 - h_proj) / 2.0;

    let simulable = octahedron_contains(v);
    let (h_new, h_bk, t) = if simulable {
        (false, false, false)
    } else {
        (fidelity > f_h_star(), h_error < knownmaps::bk15_threshold(), t_proj > t_plane_distance())
    };
    let label = if simulable {
        RegionLabel::Simulable
    } else if h_new {
        RegionLabel::HDistillableNew
    } else if h_bk {
        RegionLabel::HDistillableBk
    } else if t {
        RegionLabel::TDistillable
    } else {
        RegionLabel::Gap
    };
    Ok(RegionReport { label, simulable, h_new, h_bk, t, h_fidelity: fidelity, h_error, t_projection: t_proj })
}

/// A rotation symmetry of the octahedron: a signed permutation matrix with
/// determinant +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OctahedralRotation {
    m: [[i8; 3]; 3],
}

impl OctahedralRotation {
    pub fn identity() -> Self {
        Self { m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] }
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        self.m
    }

    fn determinant(m: &[[i8; 3]; 3]) -> i32 {
        let m = |i: usize, j: usize| m[i][j] as i32;
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }

    /// All 24 rotations.
    pub fn all() -> Vec<Self> {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(24);
        for perm in PERMS {
            for signs in 0..8u8 {
                let mut m = [[0i8; 3]; 3];
                for (row, &col) in perm.iter().enumerate() {
                    m[row][col] = if signs >> row & 1 == 1 { -1 } else { 1 };
                }
                if Self::determinant(&m) == 1 {
                    out.push(Self { m });
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        let r = [v.x, v.y, v.z];
        let row = |i: usize| (0..3).map(|j| self.m[i][j] as f64 * r[j]).sum::<f64>();
        BlochVector::new(row(0), row(1), row(2))
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Self { m }
    }

    pub fn inverse(&self) -> Self {
        let mut m = [[0i8; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[j][i];
            }
        }
        Self { m }
    }
}
