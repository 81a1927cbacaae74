//! Minimal 2x2 real matrix arithmetic: everything the planar cocycle needs.

/// 2x2 real matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Mat2 { m: [[m11, m12], [m21, m22]] }
    }

    pub fn diag(d1: f64, d2: f64) -> Self {
        Mat2::new(d1, 0.0, 0.0, d2)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] * o.m[0][0] + self.m[0][1] * o.m[1][0],
            self.m[0][0] * o.m[0][1] + self.m[0][1] * o.m[1][1],
            self.m[1][0] * o.m[0][0] + self.m[1][1] * o.m[1][0],
            self.m[1][0] * o.m[0][1] + self.m[1][1] * o.m[1][1],
        )
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    pub fn col(&self, j: usize) -> [f64; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    /// Largest Euclidean column norm.
    pub fn max_col_norm(&self) -> f64 {
        let c0 = self.m[0][0].hypot(self.m[1][0]);
        let c1 = self.m[0][1].hypot(self.m[1][1]);
        c0.max(c1)
    }

    /// Spectral norm (largest singular value), closed form for 2x2.
    pub fn op_norm(&self) -> f64 {
        // Singular values from the eigenvalues of M^T M.
        let [[a, b], [c, d]] = self.m;
        let s = a * a + b * b + c * c + d * d;
        let det = self.det();
        let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
        (0.5 * (s + disc)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_product() {
        let a = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let b = Mat2::new(0.0, 1.0, -1.0, 0.0);
        assert_eq!(a.det(), -2.0);
        let ab = a.mul_mat(&b);
        assert_eq!(ab.m, [[-2.0, 1.0], [-4.0, 3.0]]);
        assert!((ab.det() - a.det() * b.det()).abs() < 1e-14);
    }

    #[test]
    fn op_norm_matches_known_cases() {
        let r = Mat2::new(0.6, -0.8, 0.8, 0.6); // rotation: norm 1
        assert!((r.op_norm() - 1.0).abs() < 1e-12);
        let d = Mat2::diag(3.0, -7.0);
        assert!((d.op_norm() - 7.0).abs() < 1e-12);
    }
}
