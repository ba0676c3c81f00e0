use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthographic render parameters linking 3D millimetres to 2D pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderScale {
    /// Rendered image side in pixels.
    pub s_img: f64,
    /// Model scale applied before rendering.
    pub s_3d: f64,
    /// Orthographic camera scale.
    pub s_ort: f64,
}

impl RenderScale {
    /// The released dataset's renders: 2000 px images, 0.01 model scale,
    /// orthographic scale 2.714.
    pub const REPAIR: RenderScale = RenderScale {
        s_img: 2000.0,
        s_3d: 0.01,
        s_ort: 2.714,
    };

    pub fn new(s_img: f64, s_3d: f64, s_ort: f64) -> Result<Self> {
        let s = RenderScale { s_img, s_3d, s_ort };
        s.factor()?;
        Ok(s)
    }

    /// Pixels per millimetre: `s_img * s_3d / s_ort`.
    pub fn factor(&self) -> Result<f64> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(self.s_img) && ok(self.s_3d) && ok(self.s_ort)) {
            return Err(Error::InvalidInput(format!(
                "render scale fields must be positive: {self:?}"
            )));
        }
        Ok(self.s_img * self.s_3d / self.s_ort)
    }
}

pub fn mm_to_px(t_mm: [f64; 2], scale: &RenderScale) -> Result<[f64; 2]> {
    let f = scale.factor()?;
    Ok([t_mm[0] * f, t_mm[1] * f])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dataset_factor() {
        let f = RenderScale::new(2000.0, 0.01, 2.714).unwrap().factor().unwrap();
        assert_eq!(format!("{f:.3}"), "7.369");
    }

    #[test]
    fn zero_translation() {
        assert_eq!(mm_to_px([0.0, 0.0], &RenderScale::REPAIR).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn scaled_translation() {
        let s = RenderScale::new(7.369, 1.0, 1.0).unwrap();
        let p = mm_to_px([10.0, -5.0], &s).unwrap();
        assert_abs_diff_eq!(p[0], 73.69, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], -36.845, epsilon = 1e-12);
    }

    #[test]
    fn non_positive_rejected() {
        assert!(RenderScale::new(2000.0, 0.0, 2.714).is_err());
        assert!(mm_to_px([1.0, 1.0], &RenderScale { s_img: -1.0, s_3d: 1.0, s_ort: 1.0 }).is_err());
    }
}
