use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::word::{Letter, ReducedWord, MAX_RANK};
use crate::error::{Error, Result};
use crate::hplane::ScaledIsometry;

/// Named representation families of free (and one surface) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `a` translates by `t` along the imaginary axis; `b` is `a` rotated by `theta` about `i`.
    Schottky { t: f64, theta: f64 },
    /// Punctured-torus representation with `tr A = x`, `tr B = y` and commutator trace −2.
    Fricke { x: f64, y: f64 },
    /// Side pairings of the regular octagon with interior angles π/4 (genus 2).
    Octagon,
    /// Explicit generator matrices, each with positive determinant.
    Custom { matrices: Vec<[[f64; 2]; 2]> },
}

/// Homomorphism from a free group into the isometries of `H`.
#[derive(Clone, Debug)]
pub struct Representation {
    images: Vec<ScaledIsometry>,
    inverses: Vec<ScaledIsometry>,
    family: Family,
}

/// Third Fricke coordinate: the larger root of `z² − xyz + x² + y² = 0`.
pub fn fricke_z(x: f64, y: f64) -> Result<f64> {
    let disc = x * x * y * y - 4.0 * (x * x + y * y);
    if disc < 0.0 {
        return Err(Error::FrickeDiscriminant { x, y });
    }
    Ok(0.5 * (x * y + disc.sqrt()))
}

fn schottky(t: f64, theta: f64) -> Result<Vec<ScaledIsometry>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("schottky t = {t} must be positive")));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidParameter(format!("schottky theta = {theta} must lie in (0, π)")));
    }
    let a = ScaledIsometry::axial_translation(t);
    let b = a.conjugate_by(&ScaledIsometry::rotation_about_i(theta))?;
    Ok(vec![a, b])
}

fn fricke(x: f64, y: f64) -> Result<Vec<ScaledIsometry>> {
    if !(x > 2.0 && y > 2.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("fricke traces ({x}, {y}) must exceed 2")));
    }
    let z = fricke_z(x, y)?;
    let lam = 0.5 * (x + (x * x - 4.0).sqrt());
    let gap = lam - 1.0 / lam;
    let p = (z - y / lam) / gap;
    let s = y - p;
    let qr = p * s - 1.0;
    let (q, r) = if qr >= 0.0 {
        (qr.sqrt(), qr.sqrt())
    } else {
        ((-qr).sqrt(), -(-qr).sqrt())
    };
    Ok(vec![
        ScaledIsometry::from_matrix([[lam, 0.0], [0.0, 1.0 / lam]])?,
        ScaledIsometry::from_matrix([[p, q], [r, s]])?,
    ])
}

fn octagon() -> Result<Vec<ScaledIsometry>> {
    // cosh(t/2) = 1 + √2 is half the distance between opposite sides
    let t = 2.0 * (1.0 + 2f64.sqrt()).acosh();
    let a = ScaledIsometry::axial_translation(t);
    (0..4)
        .map(|k| a.conjugate_by(&ScaledIsometry::rotation_about_i(k as f64 * FRAC_PI_4)))
        .collect()
}

impl Representation {
    pub fn new(family: Family) -> Result<Self> {
        let images = match &family {
            Family::Schottky { t, theta } => schottky(*t, *theta)?,
            Family::Fricke { x, y } => fricke(*x, *y)?,
            Family::Octagon => octagon()?,
            Family::Custom { matrices } => {
                if matrices.is_empty() || matrices.len() > MAX_RANK {
                    return Err(Error::InvalidParameter(format!(
                        "custom representation needs 1..={MAX_RANK} matrices"
                    )));
                }
                matrices
                    .iter()
                    .map(|m| ScaledIsometry::from_matrix(*m))
                    .collect::<Result<_>>()?
            }
        };
        let inverses = images.iter().map(ScaledIsometry::inverse).collect();
        Ok(Self { images, inverses, family })
    }

    pub fn from_images(images: Vec<ScaledIsometry>) -> Result<Self> {
        if images.is_empty() || images.len() > MAX_RANK {
            return Err(Error::InvalidParameter(format!("rank must lie in 1..={MAX_RANK}")));
        }
        let matrices = images.iter().map(ScaledIsometry::matrix).collect();
        let inverses = images.iter().map(ScaledIsometry::inverse).collect();
        Ok(Self { images, inverses, family: Family::Custom { matrices } })
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Image of a single signed letter.
    #[inline]
    pub fn letter_image(&self, l: Letter) -> &ScaledIsometry {
        let k = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.images[k]
        } else {
            &self.inverses[k]
        }
    }

    /// `ρ(w)`: the product of the letter images in word order.
    pub fn eval(&self, w: &ReducedWord) -> Result<ScaledIsometry> {
        w.check_rank(self.rank())?;
        let mut acc = ScaledIsometry::identity();
        for &l in w.letters() {
            acc = acc.compose(self.letter_image(l))?;
        }
        Ok(acc)
    }

    /// `g ρ g⁻¹`, recorded as a custom family.
    pub fn conjugate(&self, g: &ScaledIsometry) -> Result<Representation> {
        let images = self
            .images
            .iter()
            .map(|x| x.conjugate_by(g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(images)
    }
}
