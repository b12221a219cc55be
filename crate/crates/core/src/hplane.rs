//! Geometry of the upper half-plane and its orientation-preserving isometries.
//!
//! Isometries are stored as a unit-Frobenius-norm 2×2 matrix `m` together with
//! a natural-log scale `s`, so the represented `SL(2,R)` matrix is `e^s · m`
//! (up to sign). Products of thousands of loxodromics stay finite because only
//! `s` grows. Distances are evaluated with `asinh`-based formulas, which are
//! accurate both for tiny and for enormous displacements.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default four-point hyperbolicity constant used for the hyperbolic plane.
///
/// `ln 3` is a safe (not sharp) value for the Gromov-product form of the
/// four-point condition on `H²`.
pub const DEFAULT_DELTA: f64 = 1.098_612_288_668_109_8;

/// Relative half-width of the band around `|tr| = 2` where classification is refused.
pub const PARABOLIC_BAND: f64 = 1e-8;

/// Below this relative distance from `|tr| = 2` the trace is taken to be exactly 2.
const EXACT_PARABOLIC: f64 = 1e-12;

/// Products whose Frobenius norm falls below this are treated as numerically zero.
const MIN_PRODUCT_NORM: f64 = 1e-200;

/// Chordal gap below which two boundary points are considered equal.
const BOUNDARY_GAP: f64 = 1e-9;

type Mat = [[f64; 2]; 2];

fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn frobenius(a: &Mat) -> f64 {
    a[0][0].hypot(a[0][1]).hypot(a[1][0].hypot(a[1][1]))
}

fn scaled(a: &Mat, k: f64) -> Mat {
    [[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]]
}

/// `asinh(e^l)` without overflow.
fn asinh_exp(l: f64) -> f64 {
    if l > 20.0 {
        l + (1.0 + (1.0 + (-2.0 * l).exp()).sqrt()).ln()
    } else {
        l.exp().asinh()
    }
}

/// `acosh(e^l)` without overflow; zero for `l <= 0`.
fn acosh_exp(l: f64) -> f64 {
    if l <= 0.0 {
        0.0
    } else if l > 20.0 {
        l + (1.0 + (1.0 - (-2.0 * l).exp()).sqrt()).ln()
    } else {
        l.exp().acosh()
    }
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    re: f64,
    im: f64,
}

impl HPoint {
    /// The canonical basepoint `i`.
    pub const I: HPoint = HPoint { re: 0.0, im: 1.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() && im > 0.0 {
            Ok(Self { re, im })
        } else {
            Err(Error::InvalidPoint { re, im })
        }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// Affine map `w ↦ re + im·w` sending `i` to this point, as a matrix.
    fn frame(&self) -> Mat {
        let r = self.im.sqrt();
        [[r, self.re / r], [0.0, 1.0 / r]]
    }

    fn frame_inverse(&self) -> Mat {
        let r = self.im.sqrt();
        [[1.0 / r, -self.re / r], [0.0, r]]
    }
}

/// Hyperbolic distance `arccosh(1 + |z−w|²/(2 im z im w))`, in its `asinh` form.
pub fn distance(z: &HPoint, w: &HPoint) -> f64 {
    let chord = (z.re - w.re).hypot(z.im - w.im);
    2.0 * (chord / (2.0 * z.im.sqrt() * w.im.sqrt())).asinh()
}

/// Gromov product `(x, y)_o`.
pub fn gromov_product(x: &HPoint, y: &HPoint, o: &HPoint) -> f64 {
    0.5 * (distance(o, x) + distance(o, y) - distance(x, y))
}

/// A point of `∂H = R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    /// Chordal distance on the boundary circle; handles `∞` through the inversion chart.
    pub fn chordal_distance(&self, other: &BoundaryPoint) -> f64 {
        match (*self, *other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
            (BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) => 1.0 / (1.0 + x * x).sqrt(),
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
                (x - y).abs() / ((1.0 + x * x).sqrt() * (1.0 + y * y).sqrt())
            }
        }
    }

    /// Angle on the unit circle of the disk model centered at `i`, in `(-π, π]`.
    pub fn disk_angle(&self) -> f64 {
        match *self {
            BoundaryPoint::Infinity => 0.0,
            // x = -cot(α/2)  ⇔  α = 2·atan2(1, -x)
            BoundaryPoint::Finite(x) => {
                let a = 2.0 * 1.0f64.atan2(-x);
                if a > PI {
                    a - 2.0 * PI
                } else {
                    a
                }
            }
        }
    }

    /// Inverse of [`BoundaryPoint::disk_angle`].
    pub fn from_disk_angle(alpha: f64) -> BoundaryPoint {
        let half = 0.5 * alpha;
        if half.sin().abs() < 1e-300 {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(-half.cos() / half.sin())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// Orientation-preserving isometry of `H` stored as `e^logscale · m`, `‖m‖_F = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledIsometry {
    m: Mat,
    logscale: f64,
}

impl ScaledIsometry {
    pub fn identity() -> Self {
        Self {
            m: [[FRAC_1_SQRT_2, 0.0], [0.0, FRAC_1_SQRT_2]],
            logscale: 0.5 * LN_2,
        }
    }

    /// Builds the isometry of a real matrix with positive determinant (rescaled to `det = 1`).
    pub fn from_matrix(a: [[f64; 2]; 2]) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if !(det > 0.0 && det.is_finite()) || a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        let n = frobenius(&a);
        Ok(Self {
            m: scaled(&a, 1.0 / n),
            logscale: n.ln() - 0.5 * det.ln(),
        })
    }

    /// Hyperbolic translation of length `length` along the imaginary axis, towards `∞`.
    pub fn axial_translation(length: f64) -> Self {
        let h = 0.5 * length;
        // diag(e^h, e^-h) normalized: both entries divided by sqrt(e^2h + e^-2h)
        let w = (1.0 + (-4.0 * h.abs()).exp()).sqrt();
        let (big, small) = (1.0 / w, (-2.0 * h.abs()).exp() / w);
        let m = if h >= 0.0 {
            [[big, 0.0], [0.0, small]]
        } else {
            [[small, 0.0], [0.0, big]]
        };
        Self {
            m,
            logscale: h.abs() + w.ln(),
        }
    }

    /// Rotation by angle `theta` about `i`.
    pub fn rotation_about_i(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self {
            m: scaled(&[[c, s], [-s, c]], FRAC_1_SQRT_2),
            logscale: 0.5 * LN_2,
        }
    }

    /// Normalized matrix `m` (unit Frobenius norm).
    pub fn normalized(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn logscale(&self) -> f64 {
        self.logscale
    }

    /// The represented `SL(2,R)` matrix `e^s·m`; entries overflow to `±∞` for huge scales.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        scaled(&self.m, self.logscale.exp())
    }

    pub fn compose(&self, other: &ScaledIsometry) -> Result<ScaledIsometry> {
        let p = mul(&self.m, &other.m);
        let n = frobenius(&p);
        if !n.is_finite() || n < MIN_PRODUCT_NORM {
            return Err(Error::NumericallyZeroProduct);
        }
        Ok(Self {
            m: scaled(&p, 1.0 / n),
            logscale: self.logscale + other.logscale + n.ln(),
        })
    }

    /// Inverse via the adjugate; the Frobenius norm and the scale are unchanged.
    pub fn inverse(&self) -> ScaledIsometry {
        let [[a, b], [c, d]] = self.m;
        Self {
            m: [[d, -b], [-c, a]],
            logscale: self.logscale,
        }
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &ScaledIsometry) -> Result<ScaledIsometry> {
        h.compose(self)?.compose(&h.inverse())
    }

    /// Möbius action; the scale cancels except through `det m = e^{-2s}`.
    pub fn apply(&self, z: &HPoint) -> Result<HPoint> {
        let [[a, b], [c, d]] = self.m;
        let (x, y) = (z.re, z.im);
        let den_re = c * x + d;
        let den_im = c * y;
        let den = den_re * den_re + den_im * den_im;
        if !(den > 0.0) {
            return Err(Error::BoundaryImage);
        }
        let im = (-2.0 * self.logscale + y.ln() - den.ln()).exp();
        let re = (a * c * (x * x + y * y) + (a * d + b * c) * x + b * d) / den;
        if !(im > 0.0 && im.is_finite() && re.is_finite()) {
            return Err(Error::BoundaryImage);
        }
        Ok(HPoint { re, im })
    }

    /// Normalized matrix conjugated into the frame of `z` (so that `z` becomes `i`).
    fn in_frame(&self, z: &HPoint) -> Mat {
        mul(&mul(&z.frame_inverse(), &self.m), &z.frame())
    }

    /// `d(z, g·z)` from `2 sinh(d/2) = |c z² + (d − a) z − b| / im z`, in log space.
    pub fn displacement(&self, z: &HPoint) -> f64 {
        let [[a, b], [c, d]] = self.m;
        let (x, y) = (z.re, z.im);
        let lin = d - a;
        let re = c * (x * x / y - y) + lin * (x / y) - b / y;
        let im = 2.0 * c * x + lin;
        let r = re.hypot(im);
        if r == 0.0 {
            return 0.0;
        }
        2.0 * asinh_exp(self.logscale + r.ln() - LN_2)
    }

    /// `ln |tr|` of the represented matrix (`-∞` for trace zero).
    pub fn log_abs_trace(&self) -> f64 {
        self.logscale + (self.m[0][0] + self.m[1][1]).abs().ln()
    }

    /// Trace of the represented matrix, sign fixed by the stored representative.
    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]) * self.logscale.exp()
    }

    fn is_identity(&self) -> bool {
        let [[a, b], [c, d]] = self.m;
        b.abs() <= EXACT_PARABOLIC && c.abs() <= EXACT_PARABOLIC && (a - d).abs() <= EXACT_PARABOLIC
    }

    pub fn classify(&self) -> Result<Classification> {
        let lt = self.log_abs_trace();
        if lt > LN_2 + 1e-3 {
            return Ok(Classification::Loxodromic);
        }
        if self.is_identity() {
            return Ok(Classification::Elliptic);
        }
        let tr = lt.exp();
        let gap = (tr - 2.0) / 2.0;
        if gap.abs() <= EXACT_PARABOLIC {
            Ok(Classification::Parabolic)
        } else if gap.abs() <= PARABOLIC_BAND {
            Err(Error::NearParabolic { trace: self.trace() })
        } else if gap > 0.0 {
            Ok(Classification::Loxodromic)
        } else {
            Ok(Classification::Elliptic)
        }
    }

    /// `2·arccosh(|tr|/2)`, zero when `|tr| ≤ 2`.
    pub fn translation_length(&self) -> f64 {
        2.0 * acosh_exp(self.log_abs_trace() - LN_2)
    }

    /// Boundary fixed points: two for loxodromic, one for parabolic, none for elliptic.
    pub fn fixed_points(&self) -> Result<Vec<BoundaryPoint>> {
        if self.is_identity() {
            return Err(Error::IdentityFixedPoints);
        }
        let class = self.classify()?;
        let [[a, b], [c, d]] = self.m;
        let c_zero = c.abs() <= 1e-15;
        match class {
            Classification::Elliptic => Ok(Vec::new()),
            Classification::Parabolic => {
                if c_zero {
                    Ok(vec![BoundaryPoint::Infinity])
                } else {
                    Ok(vec![BoundaryPoint::Finite((a - d) / (2.0 * c))])
                }
            }
            Classification::Loxodromic => {
                // c z² + (d − a) z − b = 0
                if c_zero {
                    return Ok(vec![BoundaryPoint::Infinity, BoundaryPoint::Finite(b / (d - a))]);
                }
                let det = (-2.0 * self.logscale).exp();
                let disc = ((a + d) * (a + d) - 4.0 * det).max(0.0);
                let lin = d - a;
                let q = -0.5 * (lin + lin.signum() * disc.sqrt());
                let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
                let (z1, z2) = (q / c, -b / q);
                Ok(vec![BoundaryPoint::Finite(z1), BoundaryPoint::Finite(z2)])
            }
        }
    }

    /// Attracting boundary fixed point of a loxodromic isometry.
    pub fn attracting_fixed_point(&self) -> Result<BoundaryPoint> {
        if self.classify()? != Classification::Loxodromic {
            return Err(Error::NotLoxodromic(format!("trace {}", self.trace())));
        }
        let [[a, _], [c, d]] = self.m;
        // eigenvalue on (z, 1) is cz + d; on (1, 0) it is a
        let multiplier = |p: &BoundaryPoint| match *p {
            BoundaryPoint::Infinity => a.abs(),
            BoundaryPoint::Finite(z) => (c * z + d).abs(),
        };
        let pts = self.fixed_points()?;
        let best = pts
            .iter()
            .copied()
            .max_by(|p, q| multiplier(p).total_cmp(&multiplier(q)))
            .expect("loxodromic isometries have two fixed points");
        Ok(best)
    }

    /// Boundary endpoint (as a disk angle about `o`) of the geodesic ray from `o` through `g·o`.
    pub fn ray_endpoint_angle(&self, o: &HPoint) -> f64 {
        let [[a, b], [c, d]] = self.in_frame(o);
        let num = (a - d).atan2(b + c);
        let den = (a + d).atan2(b - c);
        let mut alpha = num - den;
        while alpha > PI {
            alpha -= 2.0 * PI;
        }
        while alpha <= -PI {
            alpha += 2.0 * PI;
        }
        alpha
    }

    /// Boundary endpoint of the ray from `i` through `g·i`, as an extended real.
    pub fn ray_endpoint(&self) -> BoundaryPoint {
        BoundaryPoint::from_disk_angle(self.ray_endpoint_angle(&HPoint::I))
    }

    /// Equality up to the projective sign, with absolute tolerance on the normalized
    /// entries and on the log-scale.
    pub fn approx_eq(&self, other: &ScaledIsometry, tol: f64) -> bool {
        if (self.logscale - other.logscale).abs() > tol {
            return false;
        }
        let diff = |sign: f64| {
            self.m
                .iter()
                .flatten()
                .zip(other.m.iter().flatten())
                .map(|(x, y)| (x - sign * y).abs())
                .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0)) <= tol
    }
}

/// Whether two loxodromic isometries have disjoint fixed-point pairs.
pub fn independent(g: &ScaledIsometry, h: &ScaledIsometry) -> Result<bool> {
    for x in [g, h] {
        if x.classify()? != Classification::Loxodromic {
            return Err(Error::NotLoxodromic(format!("trace {}", x.trace())));
        }
    }
    let (fg, fh) = (g.fixed_points()?, h.fixed_points()?);
    let gap = fg
        .iter()
        .flat_map(|p| fh.iter().map(move |q| p.chordal_distance(q)))
        .fold(f64::INFINITY, f64::min);
    Ok(gap > BOUNDARY_GAP)
}
