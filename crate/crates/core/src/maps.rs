//! The map gallery, generic evaluatable maps, smooth bumps, and mollification.

use std::sync::Arc;

use crate::geom::{Mat2, Vec2};
use crate::scalar::Real;
use crate::{Error, Result};

/// How regular a map is, for hypothesis gating downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    SingularAtPoints,
    Discontinuous,
}

type EvalFn<R> = Arc<dyn Fn(Vec2<R>) -> Vec2<R> + Send + Sync>;
type DiffFn<R> = Arc<dyn Fn(Vec2<R>) -> Mat2<R> + Send + Sync>;

/// An evaluatable planar map with an optional exact differential.
///
/// Immutable after construction; `eval` must be re-entrant so values can be
/// shared across workers.
#[derive(Clone)]
pub struct MapField<R> {
    label: String,
    smoothness: Smoothness,
    singular_points: Vec<Vec2<R>>,
    eval_fn: EvalFn<R>,
    diff_fn: Option<DiffFn<R>>,
}

impl<R: Real> MapField<R> {
    pub fn new(
        label: impl Into<String>,
        smoothness: Smoothness,
        singular_points: Vec<Vec2<R>>,
        eval_fn: EvalFn<R>,
        diff_fn: Option<DiffFn<R>>,
    ) -> Self {
        MapField {
            label: label.into(),
            smoothness,
            singular_points,
            eval_fn,
            diff_fn,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn singular_points(&self) -> &[Vec2<R>] {
        &self.singular_points
    }

    pub fn eval(&self, p: Vec2<R>) -> Vec2<R> {
        (self.eval_fn)(p)
    }

    pub fn has_differential(&self) -> bool {
        self.diff_fn.is_some()
    }

    /// Exact differential at `p`, when available.
    pub fn differential(&self, p: Vec2<R>) -> Option<Mat2<R>> {
        self.diff_fn.as_ref().map(|f| f(p))
    }

    /// Central finite-difference differential with step `h`.
    pub fn differential_fd(&self, p: Vec2<R>, h: R) -> Mat2<R> {
        let half = R::of(0.5) / h;
        let ex = Vec2::new(h, R::zero());
        let ey = Vec2::new(R::zero(), h);
        let dx = (self.eval(p + ex) - self.eval(p - ex)).scale(half);
        let dy = (self.eval(p + ey) - self.eval(p - ey)).scale(half);
        Mat2::new(dx.x, dy.x, dx.y, dy.y)
    }

    pub fn is_singular_at(&self, p: Vec2<R>, tolerance: R) -> bool {
        self.singular_points.iter().any(|s| s.dist(p) <= tolerance)
    }

    /// The map `x -> lambda * f(x)`.
    pub fn scaled(&self, lambda: R) -> MapField<R> {
        let f = self.eval_fn.clone();
        let d = self.diff_fn.clone();
        MapField {
            label: format!("{}*{}", self.label, lambda),
            smoothness: self.smoothness,
            singular_points: self.singular_points.clone(),
            eval_fn: Arc::new(move |p| f(p).scale(lambda)),
            diff_fn: d.map(|d| -> DiffFn<R> { Arc::new(move |p| d(p).scale(lambda)) }),
        }
    }
}

impl<R: Real> std::fmt::Debug for MapField<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MapField")
            .field("label", &self.label)
            .field("smoothness", &self.smoothness)
            .field("singular_points", &self.singular_points)
            .field("differential", &self.diff_fn.is_some())
            .finish()
    }
}

/// Complex power z^k together with its complex derivative k z^(k-1).
///
/// Small |k| only, so repeated multiplication is exact enough and avoids the
/// branch cut of exp(k log z). Negative k means 1/z^|k| (singular at 0).
fn cpow<R: Real>(z: Vec2<R>, k: i32) -> (Vec2<R>, Vec2<R>) {
    let cmul = |a: Vec2<R>, b: Vec2<R>| Vec2::new(a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x);
    let cinv = |a: Vec2<R>| {
        let n = a.norm_sq();
        Vec2::new(a.x / n, -a.y / n)
    };
    let m = k.unsigned_abs();
    let mut w = Vec2::new(R::one(), R::zero());
    for _ in 0..m {
        w = cmul(w, z);
    }
    if k < 0 {
        w = cinv(w);
    }
    // k z^(k-1) = k z^k / z
    let deriv = cmul(w, cinv(z)).scale(R::of(k as f64));
    (w, deriv)
}

/// Real 2x2 Jacobian of a holomorphic map with complex derivative `w`.
fn holomorphic_jacobian<R: Real>(w: Vec2<R>) -> Mat2<R> {
    Mat2::new(w.x, -w.y, w.y, w.x)
}

/// Named gallery entries with their parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum GalleryMap {
    Identity,
    /// z -> z^k as a planar real map; k < 0 is 1/z^|k| with 0 singular.
    Power {
        k: i32,
    },
    /// z -> conj(z)^k, the negative-degree control family.
    ConjPower {
        k: u32,
    },
    /// z -> conj(z).
    Conjugation,
    Constant {
        value: (f64, f64),
    },
    /// x -> (log log(2/|x|), 0), clamped near the origin.
    LogLog,
    /// grad of (x^4 + y^4)/4, i.e. (x^3, y^3); curl-free.
    GradientQuartic,
    /// x -> delta * (-y, x).
    Rotation {
        delta: f64,
    },
}

/// Radius below which the log-log map is frozen at its boundary value. The
/// singularity is logarithmic, so this keeps every pairing finite while the
/// map stays discontinuous at every coarser scale.
pub const LOGLOG_CLAMP: f64 = 1e-8;

impl GalleryMap {
    pub fn names() -> &'static [&'static str] {
        &[
            "identity",
            "power",
            "conj-power",
            "conjugation",
            "constant",
            "loglog",
            "gradient-quartic",
            "rotation",
        ]
    }

    /// Resolve a CLI-style selector.
    pub fn parse(
        name: &str,
        k: Option<i32>,
        delta: Option<f64>,
        value: Option<(f64, f64)>,
    ) -> Result<Self> {
        match name {
            "identity" => Ok(GalleryMap::Identity),
            "power" => {
                let k = k.ok_or_else(|| Error::InvalidParameter("power needs --k".into()))?;
                if k == 0 {
                    return Err(Error::InvalidParameter("power exponent k = 0".into()));
                }
                Ok(GalleryMap::Power { k })
            }
            "conj-power" => {
                let k = k.ok_or_else(|| Error::InvalidParameter("conj-power needs --k".into()))?;
                if k <= 0 {
                    return Err(Error::InvalidParameter(
                        "conj-power exponent must be positive".into(),
                    ));
                }
                Ok(GalleryMap::ConjPower { k: k as u32 })
            }
            "conjugation" => Ok(GalleryMap::Conjugation),
            "constant" => Ok(GalleryMap::Constant {
                value: value.unwrap_or((1.0, 0.0)),
            }),
            "loglog" | "loglog-counterexample" => Ok(GalleryMap::LogLog),
            "gradient-quartic" => Ok(GalleryMap::GradientQuartic),
            "rotation" => {
                let delta = delta
                    .ok_or_else(|| Error::InvalidParameter("rotation needs --delta".into()))?;
                Ok(GalleryMap::Rotation { delta })
            }
            other => Err(Error::UnknownMap(other.into())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GalleryMap::Identity => "identity".into(),
            GalleryMap::Power { k } => format!("power-{k}"),
            GalleryMap::ConjPower { k } => format!("conj-power-{k}"),
            GalleryMap::Conjugation => "conjugation".into(),
            GalleryMap::Constant { value } => format!("constant-({},{})", value.0, value.1),
            GalleryMap::LogLog => "loglog-counterexample".into(),
            GalleryMap::GradientQuartic => "gradient-quartic".into(),
            GalleryMap::Rotation { delta } => format!("rotation-{delta}"),
        }
    }

    pub fn build<R: Real>(&self) -> Result<MapField<R>> {
        let label = self.label();
        Ok(match *self {
            GalleryMap::Identity => MapField::new(
                label,
                Smoothness::Smooth,
                vec![],
                Arc::new(|p| p),
                Some(Arc::new(|_| Mat2::identity())),
            ),
            GalleryMap::Power { k } => {
                if k == 0 {
                    return Err(Error::InvalidParameter("power exponent k = 0".into()));
                }
                let singular = if k < 0 { vec![Vec2::zero()] } else { vec![] };
                let smooth = if k < 0 {
                    Smoothness::SingularAtPoints
                } else {
                    Smoothness::Smooth
                };
                MapField::new(
                    label,
                    smooth,
                    singular,
                    Arc::new(move |p| cpow(p, k).0),
                    Some(Arc::new(move |p| holomorphic_jacobian(cpow(p, k).1))),
                )
            }
            GalleryMap::ConjPower { k } => {
                let k = k as i32;
                let conj = |p: Vec2<R>| Vec2::new(p.x, -p.y);
                MapField::new(
                    label,
                    Smoothness::Smooth,
                    vec![],
                    Arc::new(move |p| conj(cpow(p, k).0)),
                    Some(Arc::new(move |p| {
                        let h = holomorphic_jacobian(cpow(p, k).1);
                        // conj after z^k: negate the second row
                        Mat2::new(h.a, h.b, -h.c, -h.d)
                    })),
                )
            }
            GalleryMap::Conjugation => MapField::new(
                label,
                Smoothness::Smooth,
                vec![],
                Arc::new(|p| Vec2::new(p.x, -p.y)),
                Some(Arc::new(|_| {
                    Mat2::new(R::one(), R::zero(), R::zero(), -R::one())
                })),
            ),
            GalleryMap::Constant { value } => {
                let c = Vec2::of(value.0, value.1);
                MapField::new(
                    label,
                    Smoothness::Smooth,
                    vec![],
                    Arc::new(move |_| c),
                    Some(Arc::new(|_| Mat2::zero())),
                )
            }
            GalleryMap::LogLog => {
                let clamp = R::of(LOGLOG_CLAMP);
                let two = R::of(2.0);
                MapField::new(
                    label,
                    Smoothness::Discontinuous,
                    vec![Vec2::zero()],
                    Arc::new(move |p| {
                        let t = p.norm().max(clamp);
                        Vec2::new((two / t).ln().ln(), R::zero())
                    }),
                    Some(Arc::new(move |p| {
                        let t = p.norm();
                        if t < clamp {
                            return Mat2::zero();
                        }
                        // d/dt log log(2/t) = -1 / (t log(2/t))
                        let g = -(R::one()) / (t * (two / t).ln());
                        Mat2::new(g * p.x / t, g * p.y / t, R::zero(), R::zero())
                    })),
                )
            }
            GalleryMap::GradientQuartic => {
                let three = R::of(3.0);
                MapField::new(
                    label,
                    Smoothness::Smooth,
                    vec![],
                    Arc::new(|p| Vec2::new(p.x * p.x * p.x, p.y * p.y * p.y)),
                    Some(Arc::new(move |p| {
                        Mat2::new(three * p.x * p.x, R::zero(), R::zero(), three * p.y * p.y)
                    })),
                )
            }
            GalleryMap::Rotation { delta } => {
                let d = R::of(delta);
                MapField::new(
                    label,
                    Smoothness::Smooth,
                    vec![],
                    Arc::new(move |p| Vec2::new(-d * p.y, d * p.x)),
                    Some(Arc::new(move |_| Mat2::new(R::zero(), -d, d, R::zero()))),
                )
            }
        })
    }
}

/// Convenience wrapper over [`GalleryMap::build`].
pub fn gallery<R: Real>(spec: &GalleryMap) -> Result<MapField<R>> {
    spec.build()
}

/// The rotation-distortion wrapper `f_delta = f + delta * (-y, x)`.
pub fn rotate_distort<R: Real>(f: &MapField<R>, delta: R) -> MapField<R> {
    let eval = f.eval_fn.clone();
    let diff = f.diff_fn.clone();
    let twist = Mat2::new(R::zero(), -delta, delta, R::zero());
    MapField {
        label: format!("{}#twist{}", f.label, delta),
        smoothness: f.smoothness,
        singular_points: f.singular_points.clone(),
        eval_fn: Arc::new(move |p| eval(p) + Vec2::new(-delta * p.y, delta * p.x)),
        diff_fn: diff.map(|d| -> DiffFn<R> { Arc::new(move |p| d(p) + twist) }),
    }
}

/// Pointwise determinant of the differential: exact when available, central
/// finite differences with step `h` otherwise.
pub fn jacobian_det<R: Real>(f: &MapField<R>, x: Vec2<R>, h: R) -> Result<R> {
    if f.is_singular_at(x, R::of(1e-12)) {
        return Err(Error::SingularPoint {
            x: x.x.f64(),
            y: x.y.f64(),
        });
    }
    Ok(match f.differential(x) {
        Some(m) => m.det(),
        None => f.differential_fd(x, h).det(),
    })
}

/// A compactly supported smooth bump with exact gradient.
///
/// Profile `amplitude * exp(-1/(1 - |u|^2))` for `u = (x - center)/radius`,
/// zero outside the support ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunction<R> {
    pub center: Vec2<R>,
    pub radius: R,
    pub amplitude: R,
}

impl<R: Real> TestFunction<R> {
    pub fn new(center: Vec2<R>, radius: R, amplitude: R) -> Result<Self> {
        if !(radius > R::zero()) {
            return Err(Error::InvalidParameter(
                "bump radius must be positive".into(),
            ));
        }
        Ok(TestFunction {
            center,
            radius,
            amplitude,
        })
    }

    pub fn standard(center: Vec2<R>, radius: R) -> Result<Self> {
        Self::new(center, radius, R::one())
    }

    pub fn eval(&self, p: Vec2<R>) -> R {
        let t = (p - self.center).norm_sq() / (self.radius * self.radius);
        if t >= R::one() {
            return R::zero();
        }
        self.amplitude * (-(R::one()) / (R::one() - t)).exp()
    }

    pub fn gradient(&self, p: Vec2<R>) -> Vec2<R> {
        let u = p - self.center;
        let r2 = self.radius * self.radius;
        let t = u.norm_sq() / r2;
        if t >= R::one() {
            return Vec2::zero();
        }
        let one = R::one();
        let phi = self.amplitude * (-(one) / (one - t)).exp();
        // d phi / d t = -phi / (1-t)^2, grad t = 2 u / r^2
        let dt = -phi / ((one - t) * (one - t));
        u.scale(dt * (one + one) / r2)
    }

    /// Integral over the plane via the radial profile moment.
    pub fn integral(&self) -> R {
        R::two_pi() * self.radius * self.radius * self.amplitude * R::of(bump_radial_moment())
    }

    /// 5x5-style bump family on a square grid of centers around `center`,
    /// spread over `half_width` per axis.
    pub fn grid_family(
        center: Vec2<R>,
        half_width: R,
        per_axis: usize,
        radius: R,
    ) -> Result<Vec<Self>> {
        if per_axis < 1 {
            return Err(Error::InvalidParameter("empty bump family".into()));
        }
        let mut out = Vec::with_capacity(per_axis * per_axis);
        for i in 0..per_axis {
            for j in 0..per_axis {
                let frac = |k: usize| {
                    if per_axis == 1 {
                        R::zero()
                    } else {
                        R::of(2.0 * k as f64 / (per_axis as f64 - 1.0) - 1.0)
                    }
                };
                let c = center + Vec2::new(half_width * frac(i), half_width * frac(j));
                out.push(TestFunction::standard(c, radius)?);
            }
        }
        Ok(out)
    }

    /// Bump family with centers on concentric rings around `center`; every
    /// support stays at least `min(ring) - radius` away from the center.
    pub fn ring_family(center: Vec2<R>, rings: &[(R, usize)], radius: R) -> Result<Vec<Self>> {
        if rings.is_empty() || rings.iter().any(|&(_, n)| n == 0) {
            return Err(Error::InvalidParameter("empty bump family".into()));
        }
        let mut out = Vec::new();
        for (ring_idx, &(r, count)) in rings.iter().enumerate() {
            for k in 0..count {
                let angle =
                    R::two_pi() * R::of(k as f64 / count as f64) + R::of(0.3 * ring_idx as f64);
                let c = center + Vec2::new(r * angle.cos(), r * angle.sin());
                out.push(TestFunction::standard(c, radius)?);
            }
        }
        Ok(out)
    }
}

/// `int_0^1 u exp(-1/(1-u^2)) du`, computed once by Simpson's rule.
fn bump_radial_moment() -> f64 {
    use std::sync::OnceLock;
    static MOMENT: OnceLock<f64> = OnceLock::new();
    *MOMENT.get_or_init(|| {
        let n = 20_000usize; // even
        let h = 1.0 / n as f64;
        let f = |u: f64| {
            let t = u * u;
            if t >= 1.0 {
                0.0
            } else {
                u * (-1.0 / (1.0 - t)).exp()
            }
        };
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    })
}

/// Mollification parameters: kernel scale and tensor nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierSpec<R> {
    pub epsilon: R,
    pub kernel_sample_count: usize,
}

impl<R: Real> MollifierSpec<R> {
    pub fn new(epsilon: R, kernel_sample_count: usize) -> Result<Self> {
        if !(epsilon > R::zero()) {
            return Err(Error::InvalidParameter(
                "mollifier scale must be positive".into(),
            ));
        }
        if kernel_sample_count < 4 {
            return Err(Error::InvalidParameter(
                "kernel needs at least 4 nodes per axis".into(),
            ));
        }
        Ok(MollifierSpec {
            epsilon,
            kernel_sample_count,
        })
    }
}

/// Convolution with the standard radial bump scaled to unit mass.
///
/// The kernel is discretized on a symmetric midpoint grid and normalized by
/// its discrete mass, so constants are reproduced exactly and affine maps are
/// fixed points up to rounding. When `f` carries an exact differential the
/// mollified map does too (the same weighted sum applied to `Df`), which is
/// exactly the derivative of the discretized convolution.
pub fn mollify<R: Real>(f: &MapField<R>, spec: &MollifierSpec<R>) -> Result<MapField<R>> {
    let eps = spec.epsilon;
    let k = spec.kernel_sample_count;

    // Symmetric midpoint nodes on [-eps, eps]^2 inside the kernel support.
    let mut nodes: Vec<(Vec2<R>, R)> = Vec::new();
    let h = (eps + eps) / R::of(k as f64);
    let half = R::of(0.5);
    for i in 0..k {
        for j in 0..k {
            let y = Vec2::new(
                -eps + h * (R::of(i as f64) + half),
                -eps + h * (R::of(j as f64) + half),
            );
            let t = y.norm_sq() / (eps * eps);
            if t < R::one() {
                let w = (-(R::one()) / (R::one() - t)).exp();
                nodes.push((y, w));
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::InvalidParameter(
            "mollifier kernel grid produced no interior nodes".into(),
        ));
    }
    let mass = nodes.iter().fold(R::zero(), |acc, &(_, w)| acc + w);
    let nodes = Arc::new(
        nodes
            .into_iter()
            .map(|(y, w)| (y, w / mass))
            .collect::<Vec<_>>(),
    );

    let eval = f.eval_fn.clone();
    let nodes_e = nodes.clone();
    let eval_fn: EvalFn<R> = Arc::new(move |x| {
        let mut acc = Vec2::zero();
        for &(y, w) in nodes_e.iter() {
            acc = acc + eval(x - y).scale(w);
        }
        acc
    });

    let diff_fn: Option<DiffFn<R>> = f.diff_fn.clone().map(|d| -> DiffFn<R> {
        let nodes_d = nodes.clone();
        Arc::new(move |x| {
            let mut acc = Mat2::zero();
            for &(y, w) in nodes_d.iter() {
                acc = acc + d(x - y).scale(w);
            }
            acc
        })
    });

    Ok(MapField {
        label: format!("{}~{}", f.label, eps),
        smoothness: Smoothness::Smooth,
        singular_points: f.singular_points.clone(),
        eval_fn,
        diff_fn,
    })
}
