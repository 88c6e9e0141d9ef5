//! The two auxiliary radial profiles and the rank-one-corrected matrix field
//! built from them.
//!
//! `d_eval` is the C^{1,1} profile that is constant near zero, quadratic in
//! the middle, and exactly 1/t past half its scale; `pi_eval` is the C^{1,1}
//! profile that equals 1 up to its scale and then bends so that
//! `pi^{n-1}(pi + t pi')` never exceeds one. Both are pinned down by explicit
//! piecewise formulas; the scaled variants come from the exact scaling rules
//! `d_c(t) = (2/c) d(2t/c)` and `pi_lambda(t) = pi(t/lambda)`.

use crate::scalar::Real;
use crate::{Error, Result};

/// Base profile with scale 2: 5/4 on [0, 1/2], the quadratic -t^2 + t + 1 on
/// [1/2, 1], and 1/t beyond. Returns (value, derivative).
fn d_base<R: Real>(t: R) -> (R, R) {
    let half = R::of(0.5);
    let one = R::one();
    if t < half {
        (R::of(1.25), R::zero())
    } else if t < one {
        (-t * t + t + one, -(t + t) + one)
    } else {
        (one / t, -(one) / (t * t))
    }
}

/// Profile value and derivative for scale `c > 0` at `t >= 0`.
pub fn d_eval<R: Real>(c: R, t: R) -> Result<(R, R)> {
    if !(c > R::zero()) {
        return Err(Error::InvalidParameter(
            "profile scale must be positive".into(),
        ));
    }
    if t < R::zero() {
        return Err(Error::InvalidParameter(
            "profile argument must be >= 0".into(),
        ));
    }
    // d_c(t) = lambda^-1 d(t/lambda) with lambda = c/2, so the 1/t branch
    // starts exactly at t = c/2.
    let lambda = c * R::of(0.5);
    let (v, s) = d_base(t / lambda);
    Ok((v / lambda, s / (lambda * lambda)))
}

/// Hermite cubic on [1, 2] with a(1) = a'(1) = 0, a(2) = 1, a'(2) = 1/2;
/// written in s = t - 1 as 2.5 s^2 - 1.5 s^3. Its derivative 5s - 4.5 s^2 is
/// nonnegative on [0, 1], so the ramp is non-decreasing.
fn ramp<R: Real>(t: R) -> (R, R) {
    let s = t - R::one();
    let a = R::of(2.5) * s * s - R::of(1.5) * s * s * s;
    let da = R::of(5.0) * s - R::of(4.5) * s * s;
    (a, da)
}

/// r(t) = t^n pi(t)^n for the base (scale-1) profile. Returns (r, r').
fn r_base<R: Real>(n: i32, t: R) -> (R, R) {
    let one = R::one();
    let two = R::of(2.0);
    let nf = R::of(n as f64);
    let tn = t.powi(n);
    let tn1 = t.powi(n - 1);
    if t <= one {
        (tn, nf * tn1)
    } else if t < two {
        let (a, da) = ramp(t);
        (tn - a, nf * tn1 - da)
    } else {
        (tn - t * R::of(0.5), nf * tn1 - R::of(0.5))
    }
}

/// Profile value and derivative for scale `lambda > 0`, dimension `n >= 2`,
/// at `t >= 0`. The profile is identically 1 on [0, lambda].
pub fn pi_eval<R: Real>(lambda: R, n: i32, t: R) -> Result<(R, R)> {
    if !(lambda > R::zero()) {
        return Err(Error::InvalidParameter(
            "profile scale must be positive".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "profile dimension must be >= 2".into(),
        ));
    }
    if t < R::zero() {
        return Err(Error::InvalidParameter(
            "profile argument must be >= 0".into(),
        ));
    }
    let u = t / lambda;
    let one = R::one();
    if u <= one {
        return Ok((one, R::zero()));
    }
    let (r, dr) = r_base(n, u);
    // pi(u) = r^(1/n) / u; pi'(u) = r^(1/n - 1) r' / (n u) - r^(1/n) / u^2
    let inv_n = one / R::of(n as f64);
    let root = r.powf(inv_n);
    let p = root / u;
    let dp = root / r * dr * inv_n / u - root / (u * u);
    // chain rule for the lambda-scaling
    Ok((p, dp / lambda))
}

/// Which radial profile a matrix field is built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadialProfile<R> {
    D { c: R },
    Pi { lambda: R, dim: i32 },
}

impl<R: Real> RadialProfile<R> {
    pub fn eval(&self, t: R) -> Result<(R, R)> {
        match *self {
            RadialProfile::D { c } => d_eval(c, t),
            RadialProfile::Pi { lambda, dim } => pi_eval(lambda, dim, t),
        }
    }
}

/// Dense n-by-n matrix, row major. Only what the matrix field needs.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<R> {
    pub dim: usize,
    data: Vec<R>,
}

impl<R: Real> SquareMatrix<R> {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![R::zero(); dim * dim],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).fold(R::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn is_symmetric(&self, tol: R) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

fn norm<R: Real>(v: &[R]) -> R {
    v.iter().fold(R::zero(), |a, &x| a + x * x).sqrt()
}

/// The matrix field `W(v) = p(|v|) I + (p'(|v|)/|v|) v (x) v`.
///
/// Symmetric, with eigenvalue `p(|v|)` on the hyperplane perpendicular to `v`
/// and `p(|v|) + p'(|v|) |v|` along `v`. At `v = 0` the rank-one term drops
/// (the profiles are flat near zero).
pub fn w_matrix<R: Real>(profile: &RadialProfile<R>, v: &[R]) -> Result<SquareMatrix<R>> {
    let dim = match *profile {
        RadialProfile::Pi { dim, .. } => dim as usize,
        RadialProfile::D { .. } => v.len(),
    };
    if v.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "vector has length {}, profile dimension is {dim}",
            v.len()
        )));
    }
    let t = norm(v);
    let (val, slope) = profile.eval(t)?;
    let mut m = SquareMatrix::zeros(dim);
    for i in 0..dim {
        m.set(i, i, val);
    }
    if t > R::zero() {
        let coeff = slope / t;
        for i in 0..dim {
            for j in 0..dim {
                let cur = m.get(i, j);
                m.set(i, j, cur + coeff * v[i] * v[j]);
            }
        }
    }
    Ok(m)
}

/// `det W(v)` from the eigenvalues: `p^{n-1} (p + |v| p')`.
pub fn det_w<R: Real>(profile: &RadialProfile<R>, v: &[R]) -> Result<R> {
    let dim = match *profile {
        RadialProfile::Pi { dim, .. } => dim as usize,
        RadialProfile::D { .. } => v.len(),
    };
    if v.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "vector has length {}, profile dimension is {dim}",
            v.len()
        )));
    }
    let t = norm(v);
    let (val, slope) = profile.eval(t)?;
    Ok(val.powi(dim as i32 - 1) * (val + t * slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_base_case_values() {
        let (d, dp) = d_eval(2.0f64, 0.0).unwrap();
        assert_eq!(d, 1.25);
        assert_eq!(dp, 0.0);
        let (d, dp) = d_eval(2.0f64, 1.0).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!((dp + 1.0).abs() < 1e-15);
        let (d, dp) = d_eval(2.0f64, 2.0).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!((dp + 0.25).abs() < 1e-15);
    }

    #[test]
    fn d_seams_match_between_branches() {
        // Branch formulas evaluated at the seams must agree in value and
        // derivative (C^{1,1} gluing).
        let quad = |t: f64| (-t * t + t + 1.0, -2.0 * t + 1.0);
        let inv = |t: f64| (1.0 / t, -1.0 / (t * t));
        let flat = (1.25, 0.0);
        let (qv, qd) = quad(0.5);
        assert!((qv - flat.0).abs() < 1e-12 && (qd - flat.1).abs() < 1e-12);
        let (qv, qd) = quad(1.0);
        let (iv, id) = inv(1.0);
        assert!((qv - iv).abs() < 1e-12 && (qd - id).abs() < 1e-12);
    }

    #[test]
    fn d_inverse_branch_starts_at_half_scale() {
        for c in [0.5f64, 2.0, 3.0, 10.0] {
            for frac in [0.51, 0.7, 1.0, 3.0] {
                let t = c * frac;
                let (d, _) = d_eval(c, t).unwrap();
                assert!(
                    (d - 1.0 / t).abs() < 1e-14 / t,
                    "c={c} t={t}: d={d} vs 1/t={}",
                    1.0 / t
                );
            }
            let (d, dp) = d_eval(c, 0.1 * c).unwrap();
            assert_eq!(dp, 0.0, "flat branch near zero");
            assert!((d - 2.5 / c).abs() < 1e-14);
        }
    }

    #[test]
    fn d_inequalities_on_dense_grid() {
        for c in [0.5f64, 2.0, 7.0] {
            for i in 0..10_000 {
                let t = 10.0 * c * (i as f64 + 0.5) / 10_000.0;
                let (d, dp) = d_eval(c, t).unwrap();
                assert!(d > 0.0, "d > 0 at t={t}");
                assert!(d + t * dp >= -1e-12, "d + t d' >= 0 at t={t}, c={c}");
            }
        }
    }

    #[test]
    fn pi_base_case_values() {
        let (p, dp) = pi_eval(1.0f64, 2, 0.5).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(dp, 0.0);
        let (p, _) = pi_eval(1.0f64, 2, 2.0).unwrap();
        assert!((p - 3.0f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn pi_seam_is_c1_at_scale() {
        // r branches at u = 1: t^n vs t^n - a(t); a(1) = a'(1) = 0.
        let (a, da) = ramp(1.0f64);
        assert_eq!(a, 0.0);
        assert_eq!(da, 0.0);
        // and at u = 2: t^n - a(t) vs t^n - t/2; a(2) = 1, a'(2) = 1/2.
        let (a, da) = ramp(2.0f64);
        assert!((a - 1.0).abs() < 1e-15);
        assert!((da - 0.5).abs() < 1e-15);
        // pi is continuous with one-sided derivative 0 at t = lambda.
        let (p, dp) = pi_eval(1.0f64, 2, 1.0).unwrap();
        assert_eq!((p, dp), (1.0, 0.0));
        let (p_right, dp_right) = pi_eval(1.0f64, 2, 1.0 + 1e-9).unwrap();
        assert!((p_right - 1.0).abs() < 1e-12);
        assert!(dp_right.abs() < 1e-7);
    }

    #[test]
    fn pi_inequalities_on_dense_grid() {
        for lambda in [0.1f64, 1.0, 10.0] {
            for n in [2i32, 3] {
                let mut sup_p: f64 = 0.0;
                for i in 0..10_000 {
                    let t = 10.0 * lambda * (i as f64 + 0.5) / 10_000.0;
                    let (p, dp) = pi_eval(lambda, n, t).unwrap();
                    assert!(p > 0.0);
                    let det = p.powi(n - 1) * (p + t * dp);
                    assert!(det <= 1.0 + 1e-12, "det={det} at t={t}");
                    if t >= 2.0 * lambda {
                        assert!(det < 1.0 - 1e-9, "strict drop past 2*lambda, det={det}");
                    }
                    if t <= lambda {
                        assert_eq!(p, 1.0);
                    }
                    sup_p = sup_p.max(p);
                }
                assert!(sup_p <= 1.0 + 1e-12, "profile stays bounded by 1");
            }
        }
    }

    #[test]
    fn w_matrix_examples() {
        // flat region: (5/4) I
        let w = w_matrix(&RadialProfile::D { c: 2.0f64 }, &[0.0, 0.0]).unwrap();
        assert!((w.get(0, 0) - 1.25).abs() < 1e-15);
        assert!((w.get(1, 1) - 1.25).abs() < 1e-15);
        assert_eq!(w.get(0, 1), 0.0);

        // |v| = 2 with c = 2: eigenvalues 1/2 and 0
        let prof = RadialProfile::D { c: 2.0f64 };
        let v = [2.0, 0.0];
        let w = w_matrix(&prof, &v).unwrap();
        let along = w.mul_vec(&[1.0, 0.0]);
        let perp = w.mul_vec(&[0.0, 1.0]);
        assert!(along[0].abs() < 1e-14 && along[1].abs() < 1e-14);
        assert!((perp[1] - 0.5).abs() < 1e-14);
        assert!(det_w(&prof, &v).unwrap().abs() < 1e-14);

        // pi-profile inside its scale: identity
        let w = w_matrix(
            &RadialProfile::Pi {
                lambda: 1.0f64,
                dim: 2,
            },
            &[0.5, 0.0],
        )
        .unwrap();
        assert_eq!((w.get(0, 0), w.get(1, 1), w.get(0, 1)), (1.0, 1.0, 0.0));
    }

    #[test]
    fn det_w_examples() {
        let prof = RadialProfile::D { c: 2.0f64 };
        assert!(det_w(&prof, &[3.0, 0.0]).unwrap().abs() < 1e-13);
        assert!((det_w(&prof, &[0.0, 0.0]).unwrap() - 1.5625).abs() < 1e-14);
        let pi = RadialProfile::Pi {
            lambda: 1.0f64,
            dim: 2,
        };
        assert_eq!(det_w(&pi, &[0.3, 0.4]).unwrap(), 1.0);
    }

    #[test]
    fn w_eigen_relation_along_v() {
        let profiles = [
            RadialProfile::D { c: 2.0f64 },
            RadialProfile::Pi {
                lambda: 1.0,
                dim: 2,
            },
        ];
        let vecs: [[f64; 2]; 4] = [[0.3, -0.8], [1.7, 0.4], [2.5, 2.5], [0.01, 0.0]];
        for prof in &profiles {
            for v in &vecs {
                let t = (v[0] * v[0] + v[1] * v[1]).sqrt();
                let (val, slope) = prof.eval(t).unwrap();
                let w = w_matrix(prof, v).unwrap();
                assert!(w.is_symmetric(1e-14));
                let unit = [v[0] / t, v[1] / t];
                let out = w.mul_vec(&unit);
                let eig = val + slope * t;
                assert!(
                    (out[0] - eig * unit[0]).abs() < 1e-12
                        && (out[1] - eig * unit[1]).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn det_w_nonnegative_for_d_profile() {
        let prof = RadialProfile::D { c: 1.3f64 };
        for i in 0..2000 {
            let ang = i as f64 * 0.01;
            let r = 0.002 * i as f64;
            let v = [r * ang.cos(), r * ang.sin()];
            assert!(det_w(&prof, &v).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn dimension_three_works() {
        let prof = RadialProfile::Pi {
            lambda: 2.0f64,
            dim: 3,
        };
        let v = [1.0, 2.0, 2.0]; // |v| = 3
        let w = w_matrix(&prof, &v).unwrap();
        assert_eq!(w.dim, 3);
        let d = det_w(&prof, &v).unwrap();
        let t = 3.0f64;
        let (p, dp) = pi_eval(2.0, 3, t).unwrap();
        assert!((d - p.powi(2) * (p + t * dp)).abs() < 1e-14);
        // mismatched dimension is rejected
        assert!(w_matrix(&prof, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn f32_profiles_evaluate() {
        let (d, _) = d_eval(2.0f32, 2.0).unwrap();
        assert!((d - 0.5).abs() < 1e-6);
        let (p, _) = pi_eval(1.0f32, 2, 2.0).unwrap();
        assert!((p - 3.0f32.sqrt() / 2.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(d_eval(0.0f64, 1.0).is_err());
        assert!(d_eval(1.0f64, -0.1).is_err());
        assert!(pi_eval(1.0f64, 1, 0.5).is_err());
        assert!(pi_eval(-1.0f64, 2, 0.5).is_err());
    }
}
