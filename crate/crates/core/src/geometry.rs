//! Surface layout and transmitter positions.
//!
//! The surface is a `side_count × side_count` grid of square elements with
//! side `element_side`, deployed edge to edge and centered at the origin of
//! the XY-plane. Elements are numbered from 1, left to right and row by row
//! starting at the top (largest `y`). Centers are computed from the index on
//! demand; no coordinate table is ever stored.

use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        math::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A transmitter in the XZ-plane, given by its distance from the surface
/// center and its angle from broadside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UePolar {
    distance: f64,
    angle: f64,
}

impl UePolar {
    /// `distance` in meters (> 0), `angle` in radians within `[-π/2, π/2]`.
    pub fn new(distance: f64, angle: f64) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::InvalidParameter {
                what: "distance",
                value: distance,
            });
        }
        if !(angle.is_finite() && angle.abs() <= FRAC_PI_2) {
            return Err(Error::AngleOutOfRange { radians: angle });
        }
        Ok(Self { distance, angle })
    }

    pub fn from_degrees(distance: f64, degrees: f64) -> Result<Self> {
        Self::new(distance, degrees.to_radians())
    }

    /// Polar form of the XZ-plane point `(x, 0, z)`; requires `z ≥ 0`.
    pub fn from_xz(x: f64, z: f64) -> Result<Self> {
        if !(z >= 0.0) {
            return Err(Error::SourceBehindSurface { z });
        }
        Self::new(math::hypot(x, z), math::atan2(x, z))
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_point(&self) -> Point3 {
        let (s, c) = math::sincos(self.angle);
        Point3::new(self.distance * s, 0.0, self.distance * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGrid {
    side_count: u32,
    element_side: f64,
}

impl ElementGrid {
    pub fn new(side_count: u32, element_side: f64) -> Result<Self> {
        if side_count == 0 {
            return Err(Error::InvalidParameter {
                what: "side count",
                value: 0.0,
            });
        }
        if !(element_side.is_finite() && element_side > 0.0) {
            return Err(Error::InvalidParameter {
                what: "element side",
                value: element_side,
            });
        }
        Ok(Self {
            side_count,
            element_side,
        })
    }

    /// The grid whose side length is the multiple of `element_side` nearest
    /// to `target_length`, never less than one element.
    ///
    /// The realized length ([`ElementGrid::length`]) is what downstream code
    /// reports; it differs from the request unless the division is exact.
    pub fn for_length(target_length: f64, element_side: f64) -> Result<Self> {
        if !(target_length.is_finite() && target_length > 0.0) {
            return Err(Error::InvalidParameter {
                what: "surface length",
                value: target_length,
            });
        }
        if !(element_side.is_finite() && element_side > 0.0) {
            return Err(Error::InvalidParameter {
                what: "element side",
                value: element_side,
            });
        }
        let ratio = math::round(target_length / element_side);
        if ratio < 1.0 {
            log::debug!(
                "surface length {target_length} m is below one element of {element_side} m; using one element"
            );
        }
        if ratio > u32::MAX as f64 {
            return Err(Error::InvalidParameter {
                what: "surface length",
                value: target_length,
            });
        }
        Self::new((ratio as u32).max(1), element_side)
    }

    /// Elements along one side (√N).
    pub fn side_count(&self) -> u32 {
        self.side_count
    }

    /// Element side √A in meters.
    pub fn element_side(&self) -> f64 {
        self.element_side
    }

    /// Element area A.
    pub fn element_area(&self) -> f64 {
        self.element_side * self.element_side
    }

    /// Total element count N.
    pub fn len(&self) -> u64 {
        let n = self.side_count as u64;
        n * n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Realized surface side L = √N · √A.
    pub fn length(&self) -> f64 {
        self.side_count as f64 * self.element_side
    }

    /// Total area N·A = L².
    pub fn area(&self) -> f64 {
        let l = self.length();
        l * l
    }

    /// Center of element `n`, 1-based.
    pub fn element_center(&self, n: u64) -> Result<Point3> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                count: self.len(),
            });
        }
        let (x, y) = self.center_xy(n - 1);
        Ok(Point3::new(x, y, 0.0))
    }

    /// Center of the element with 0-based index `index`, unchecked.
    #[inline]
    pub(crate) fn center_xy(&self, index: u64) -> (f64, f64) {
        let n = self.side_count as u64;
        let column = index % n;
        let row = index / n;
        (self.column_x(column), self.row_y(row))
    }

    #[inline]
    pub(crate) fn column_x(&self, column: u64) -> f64 {
        -self.half_span() + self.element_side * column as f64
    }

    #[inline]
    pub(crate) fn row_y(&self, row: u64) -> f64 {
        self.half_span() - self.element_side * row as f64
    }

    /// Largest center coordinate, (√N − 1)·√A / 2.
    #[inline]
    fn half_span(&self) -> f64 {
        (self.side_count as f64 - 1.0) * self.element_side / 2.0
    }

    /// Distance from `p` to the nearest element center.
    pub fn min_center_distance(&self, p: &Point3) -> f64 {
        let n = self.side_count as i64;
        let nearest = |coord: f64, from_low: bool| -> f64 {
            // index offset of the nearest center along one axis
            let t = if from_low {
                (coord + self.half_span()) / self.element_side
            } else {
                (self.half_span() - coord) / self.element_side
            };
            let k = (math::round(t) as i64).clamp(0, n - 1) as u64;
            if from_low {
                self.column_x(k)
            } else {
                self.row_y(k)
            }
        };
        let center = Point3::new(nearest(p.x, true), nearest(p.y, false), 0.0);
        p.distance(&center)
    }

    /// Iterator over all centers in index order.
    pub fn centers(&self) -> impl Iterator<Item = Point3> + '_ {
        (0..self.len()).map(move |i| {
            let (x, y) = self.center_xy(i);
            Point3::new(x, y, 0.0)
        })
    }
}
