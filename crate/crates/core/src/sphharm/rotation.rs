use crate::Mat3;

/// Orientation `(alpha, beta, gamma)` in the active z-y-z convention.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    pub fn matrix(&self) -> Mat3 {
        rotation_matrix(self)
    }
}

/// Active rotation by `a` about z.
pub fn rz(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Active rotation by `b` about y.
pub fn ry(b: f64) -> Mat3 {
    let (s, c) = b.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// `Rz(alpha) Ry(beta) Rz(gamma)`, written out in closed form.
pub fn rotation_matrix(rho: &EulerAngles) -> Mat3 {
    let (sa, ca) = rho.alpha.sin_cos();
    let (sb, cb) = rho.beta.sin_cos();
    let (sg, cg) = rho.gamma.sin_cos();
    Mat3::new(
        ca * cb * cg - sa * sg,
        -ca * cb * sg - sa * cg,
        ca * sb,
        sa * cb * cg + ca * sg,
        -sa * cb * sg + ca * cg,
        sa * sb,
        -sb * cg,
        sb * sg,
        cb,
    )
}
