use nalgebra::Vector3;

/// Expresses a global point in a limb frame rotated by `beta` about the X axis.
pub fn to_local_frame(point: &Vector3<f64>, beta: f64) -> Vector3<f64> {
    let (s, c) = beta.sin_cos();
    Vector3::new(point.x, point.y * c + point.z * s, -point.y * s + point.z * c)
}

/// Inverse of [`to_local_frame`].
pub fn to_global_frame(local: &Vector3<f64>, beta: f64) -> Vector3<f64> {
    to_local_frame(local, -beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_angle_is_identity() {
        let p = Vector3::new(0.3, -1.2, 4.0);
        assert_eq!(to_local_frame(&p, 0.0), p);
    }

    #[test]
    fn rotation_by_two_thirds_pi() {
        let q = to_local_frame(&Vector3::new(0.0, 1.0, 0.0), 2.0 * PI / 3.0);
        assert!((q - Vector3::new(0.0, -0.5, -0.866_025_403_784_438_6)).amax() < 1e-15);
    }

    proptest! {
        #[test]
        fn preserves_norm(x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64,
                          beta in -10.0..10.0f64) {
            let p = Vector3::new(x, y, z);
            prop_assert!((to_local_frame(&p, beta).norm() - p.norm()).abs() < 1e-12);
        }

        #[test]
        fn global_undoes_local(x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64,
                               beta in -10.0..10.0f64) {
            let p = Vector3::new(x, y, z);
            prop_assert!((to_global_frame(&to_local_frame(&p, beta), beta) - p).amax() < 1e-12);
        }
    }
}
