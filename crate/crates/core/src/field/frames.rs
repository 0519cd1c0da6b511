use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Vec3 = [f64; 3];

/// `(e_r, e_theta)` at polar angle `theta`.
pub fn polar_basis(theta: f64) -> (Vec2, Vec2) {
    let (s, c) = theta.sin_cos();
    ([c, s], [-s, c])
}

/// `(e_r, e_phi, e_theta)` with `phi` the polar and `theta` the azimuthal
/// angle. The triple is right-handed.
pub fn spherical_basis(phi: f64, theta: f64) -> Result<(Vec3, Vec3, Vec3)> {
    let (sp, cp) = phi.sin_cos();
    if !(phi > 0.0 && phi < std::f64::consts::PI) || sp.abs() < 1e-300 {
        return Err(Error::DegeneratePole(phi));
    }
    let (st, ct) = theta.sin_cos();
    Ok((
        [sp * ct, sp * st, cp],
        [cp * ct, cp * st, -sp],
        [-st, ct, 0.0],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn cross(a: Vec3, b: Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn polar_axis_cases() {
        let (er, et) = polar_basis(0.0);
        assert_eq!(er, [1.0, 0.0]);
        assert_eq!(et, [-0.0, 1.0]);
        let (er, et) = polar_basis(FRAC_PI_2);
        assert!((er[0]).abs() < 1e-16 && (er[1] - 1.0).abs() < 1e-16);
        assert!((et[0] + 1.0).abs() < 1e-16 && et[1].abs() < 1e-16);
        let (er, et) = polar_basis(FRAC_PI_4);
        let h = 2f64.sqrt() / 2.0;
        assert!((er[0] - h).abs() < 1e-15 && (er[1] - h).abs() < 1e-15);
        assert!((et[0] + h).abs() < 1e-15 && (et[1] - h).abs() < 1e-15);
    }

    #[test]
    fn spherical_equator_and_pole() {
        let (er, _, _) = spherical_basis(FRAC_PI_2, 0.0).unwrap();
        assert!((er[0] - 1.0).abs() < 1e-16 && er[1].abs() < 1e-16 && er[2].abs() < 1e-16);
        let (er, _, _) = spherical_basis(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!(er[0].abs() < 1e-16 && (er[1] - 1.0).abs() < 1e-16);
        assert!(matches!(spherical_basis(0.0, 1.0), Err(Error::DegeneratePole(_))));
        assert!(matches!(spherical_basis(PI, 1.0), Err(Error::DegeneratePole(_))));
    }

    #[test]
    fn frames_are_orthonormal_and_right_handed() {
        for i in 0..40 {
            let t = -3.0 + 0.17 * i as f64;
            let (a, b) = polar_basis(t);
            assert!((dot(&a, &a) - 1.0).abs() < 1e-14);
            assert!((dot(&b, &b) - 1.0).abs() < 1e-14);
            assert!(dot(&a, &b).abs() < 1e-14);
            let phi = 0.05 + 0.075 * i as f64;
            let (er, ep, et) = spherical_basis(phi, t).unwrap();
            let frame = [er, ep, et];
            for (p, u) in frame.iter().enumerate() {
                for (q, v) in frame.iter().enumerate() {
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((dot(u, v) - want).abs() < 1e-14);
                }
            }
            let c = cross(er, ep);
            for k in 0..3 {
                assert!((c[k] - et[k]).abs() < 1e-14);
            }
        }
    }
}
