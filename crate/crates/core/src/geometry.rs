//! Antenna array placement and transmit-to-receive distances.
//!
//! Arrays lie along the y-axis with boresight along +x: the transmit array
//! sits in the plane `x = 0` and the receive array in `x = separation`.
//! Element indices are 0-based in code; element 1 of the documentation is
//! index 0 here.

use std::ops::{Add, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinate is not finite: ({0}, {1}, {2})")]
    NonFinite(f64, f64, f64),
    #[error("array must contain at least one element")]
    Empty,
    #[error("elements {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("transmit array has {tx} elements but receive array has {rx}")]
    SizeMismatch { tx: usize, rx: usize },
    #[error("tx element {tx} and rx element {rx} coincide")]
    ZeroLinkDistance { tx: usize, rx: usize },
    #[error("separation must be positive and finite, got {0} m")]
    Separation(f64),
    #[error("spacing must be positive and finite for n > 1, got {0} m")]
    Spacing(f64),
    #[error("rotation is not orthonormal (max |R·Rᵀ - I| = {0:.3e})")]
    NotOrthonormal(f64),
    #[error("paraxial distances need a positive boresight offset, tx {tx} / rx {rx} have {axial} m")]
    NonPositiveAxial { tx: usize, rx: usize, axial: f64 },
    #[error("distance matrix entries must be positive and finite")]
    InvalidDistance,
}

/// A point in 3D space, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self { x, y, z })
        } else {
            Err(GeometryError::NonFinite(x, y, z))
        }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let d = *other - *self;
        d.x.hypot(d.y).hypot(d.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3 { x: self.x + rhs.x, y: self.y + rhs.y, z: self.z + rhs.z }
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3 { x: self.x - rhs.x, y: self.y - rhs.y, z: self.z - rhs.z }
    }
}

/// Orthonormal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3([[f64; 3]; 3]);

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    const TOLERANCE: f64 = 1e-12;

    /// Checks `R·Rᵀ = I` within 1e-12 entrywise.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[i][k] * m[j][k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        // NaN fails this comparison too.
        if worst <= Self::TOLERANCE {
            Ok(Self(m))
        } else {
            Err(GeometryError::NotOrthonormal(worst))
        }
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn then(&self, next: &Rotation3) -> Rotation3 {
        let (a, b) = (next.0, self.0);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Rotation3(m)
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let m = &self.0;
        Point3 {
            x: m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            y: m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            z: m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.0
    }
}

/// Ordered antenna element positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    elements: Vec<Point3>,
}

impl ArrayGeometry {
    pub fn new(elements: Vec<Point3>) -> Result<Self, GeometryError> {
        if elements.is_empty() {
            return Err(GeometryError::Empty);
        }
        for (i, p) in elements.iter().enumerate() {
            Point3::new(p.x, p.y, p.z)?;
            for (j, q) in elements.iter().enumerate().skip(i + 1) {
                if p.distance(q) <= 0.0 {
                    return Err(GeometryError::Coincident(i, j));
                }
            }
        }
        Ok(Self { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Point3] {
        &self.elements
    }

    pub fn centroid(&self) -> Point3 {
        let n = self.elements.len() as f64;
        let sum = self.elements.iter().fold(Point3::ORIGIN, |acc, p| acc + *p);
        Point3 { x: sum.x / n, y: sum.y / n, z: sum.z / n }
    }

    /// Maps every element `p → R·p + t`.
    pub fn transform(&self, rotation: &Rotation3, translation: Point3) -> Result<Self, GeometryError> {
        Self::new(
            self.elements
                .iter()
                .map(|p| rotation.apply(*p) + translation)
                .collect(),
        )
    }

    /// Rotates about the array centroid, leaving the centroid in place.
    pub fn rotate_about_centroid(&self, rotation: &Rotation3) -> Result<Self, GeometryError> {
        let c = self.centroid();
        let t = c - rotation.apply(c);
        self.transform(rotation, t)
    }
}

/// Paired transmit and receive arrays with equal element counts.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry {
    tx: ArrayGeometry,
    rx: ArrayGeometry,
}

impl LinkGeometry {
    pub fn new(tx: ArrayGeometry, rx: ArrayGeometry) -> Result<Self, GeometryError> {
        if tx.len() != rx.len() {
            return Err(GeometryError::SizeMismatch { tx: tx.len(), rx: rx.len() });
        }
        for (i, p) in tx.elements().iter().enumerate() {
            for (j, q) in rx.elements().iter().enumerate() {
                if p.distance(q) <= 0.0 {
                    return Err(GeometryError::ZeroLinkDistance { tx: i, rx: j });
                }
            }
        }
        Ok(Self { tx, rx })
    }

    pub fn tx(&self) -> &ArrayGeometry {
        &self.tx
    }

    pub fn rx(&self) -> &ArrayGeometry {
        &self.rx
    }

    pub fn n(&self) -> usize {
        self.tx.len()
    }

    /// Applies one rigid transform to both arrays.
    pub fn transform(&self, rotation: &Rotation3, translation: Point3) -> Result<Self, GeometryError> {
        Self::new(
            self.tx.transform(rotation, translation)?,
            self.rx.transform(rotation, translation)?,
        )
    }

    /// Exact Euclidean distance from every tx element to every rx element.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n();
        let mut entries = Vec::with_capacity(n * n);
        for p in self.tx.elements() {
            for q in self.rx.elements() {
                entries.push(p.distance(q));
            }
        }
        DistanceMatrix { n, entries }
    }

    /// Fresnel (paraxial) approximation `d ≈ a + r²/(2a)` where `a` is the
    /// boresight offset along x and `r` the transverse offset. This is the
    /// approximation under which the closed-form design equations are exact.
    pub fn paraxial_distance_matrix(&self) -> Result<DistanceMatrix, GeometryError> {
        let n = self.n();
        let mut entries = Vec::with_capacity(n * n);
        for (i, p) in self.tx.elements().iter().enumerate() {
            for (j, q) in self.rx.elements().iter().enumerate() {
                let d = *q - *p;
                if d.x <= 0.0 {
                    return Err(GeometryError::NonPositiveAxial { tx: i, rx: j, axial: d.x });
                }
                let r2 = d.y * d.y + d.z * d.z;
                entries.push(d.x + r2 / (2.0 * d.x));
            }
        }
        Ok(DistanceMatrix { n, entries })
    }
}

/// Two parallel uniform linear arrays, tx element `i` facing rx element `i`.
///
/// The arrays are centred on the x-axis, so for `n = 2` the direct paths
/// have length `separation` and the cross paths `√(separation² + spacing²)`.
pub fn build_parallel_ulas(n: usize, spacing: f64, separation: f64) -> Result<LinkGeometry, GeometryError> {
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(GeometryError::Separation(separation));
    }
    if n == 0 {
        return Err(GeometryError::Empty);
    }
    if n > 1 && !(spacing > 0.0 && spacing.is_finite()) {
        return Err(GeometryError::Spacing(spacing));
    }
    let offset = (n as f64 - 1.0) / 2.0;
    let y = |i: usize| if n == 1 { 0.0 } else { (i as f64 - offset) * spacing };
    let tx = (0..n).map(|i| Point3::new(0.0, y(i), 0.0)).collect::<Result<Vec<_>, _>>()?;
    let rx = (0..n).map(|i| Point3::new(separation, y(i), 0.0)).collect::<Result<Vec<_>, _>>()?;
    LinkGeometry::new(ArrayGeometry::new(tx)?, ArrayGeometry::new(rx)?)
}

/// N×N path lengths in meters; entry `(i, j)` runs from tx `i` to rx `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps explicit row-major path lengths, e.g. exact-equality
    /// constructions that no physical placement reproduces bit-for-bit.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self, GeometryError> {
        if n == 0 || entries.len() != n * n || !entries.iter().all(|d| *d > 0.0 && d.is_finite()) {
            return Err(GeometryError::InvalidDistance);
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, tx: usize, rx: usize) -> f64 {
        self.entries[tx * self.n + rx]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Adds the same length to every path.
    pub fn offset(&self, delta: f64) -> Result<Self, GeometryError> {
        Self::from_entries(self.n, self.entries.iter().map(|d| d + delta).collect())
    }
}
