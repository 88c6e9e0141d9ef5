//! Gagliardo seminorms on domains and circles, the restriction inequality,
//! the half-space extension energy, and the modulus-of-continuity bound.
//!
//! All pairwise double integrals drop pairs closer than the diagonal
//! exclusion radius and extrapolate the sum linearly from two exclusion radii
//! back to zero; the integrand is singular but integrable, and the
//! extrapolation removes the leading cutoff bias.

use serde::{Deserialize, Serialize};

use crate::degree::CircleTrace;
use crate::geom::{sample_domain, Domain, GridSpec, QuadratureSpec, Scheme, Vec2};
use crate::maps::MapField;
use crate::scalar::Real;
use crate::sum::batched_sum_pair_with;
use crate::tol::{DEGENERATE_EPS, REGRESSION_SLACK};
use crate::verify::VerificationReport;
use crate::{Error, Result};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fractional smoothness and integrability, with the planar dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalParams<R> {
    pub s: R,
    pub p: R,
    pub dim: usize,
}

impl<R: Real> FractionalParams<R> {
    pub fn new(s: R, p: R) -> Result<Self> {
        if !(s > R::zero() && s < R::one()) {
            return Err(Error::InvalidParameter(format!(
                "smoothness s = {s} must lie in (0, 1)"
            )));
        }
        if !(p > R::one()) {
            return Err(Error::InvalidParameter(format!(
                "integrability p = {p} must exceed 1"
            )));
        }
        Ok(FractionalParams { s, p, dim: 2 })
    }

    /// Critical scaling p = n/s.
    pub fn critical(s: R) -> Result<Self> {
        let s_checked = Self::new(s, R::of(2.0))?.s;
        Self::new(s_checked, R::of(2.0) / s)
    }

    /// Whether s clears the n/(n+1) threshold required for Jacobian pairings.
    pub fn jacobian_admissible(&self) -> bool {
        self.s >= R::of(self.dim as f64 / (self.dim as f64 + 1.0))
    }

    /// s - 1/p > 0, required whenever traces/restrictions are taken.
    pub fn trace_admissible(&self) -> bool {
        self.s - R::one() / self.p > R::zero()
    }

    /// Kernel exponent n + s p of the planar double integral.
    pub fn kernel_exponent(&self) -> R {
        R::of(self.dim as f64) + self.s * self.p
    }
}

/// A seminorm value with its refinement history.
#[derive(Clone, Debug)]
pub struct SeminormEstimate<R> {
    pub value: R,
    pub scheme: String,
    pub refinement_trend: Vec<R>,
}

impl<R: Real> SeminormEstimate<R> {
    pub fn to_record(&self, label: &str, params: &FractionalParams<R>) -> SeminormRecord {
        SeminormRecord {
            label: label.to_string(),
            s: params.s.f64(),
            p: params.p.f64(),
            value: self.value.f64(),
            trend: self.refinement_trend.iter().map(|v| v.f64()).collect(),
            scheme: self.scheme.clone(),
        }
    }
}

/// JSON record for seminorm results.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeminormRecord {
    pub label: String,
    pub s: f64,
    pub p: f64,
    pub value: f64,
    pub trend: Vec<f64>,
    pub scheme: String,
}

/// Interior nodes of `domain` with singular points of `f` dropped.
fn interior_nodes<R: Real>(
    f: &MapField<R>,
    domain: &Domain<R>,
    per_axis: usize,
) -> Result<Vec<(Vec2<R>, R)>> {
    let nodes = sample_domain(domain, &GridSpec::new(per_axis.max(4))?)?;
    Ok(nodes
        .into_iter()
        .filter(|&(p, _)| !f.is_singular_at(p, R::of(1e-12)))
        .collect())
}

/// One tensor-grid level of the pairwise sum at exclusion radii
/// (delta, 2 delta); returns the linearly extrapolated p-power sum.
fn pair_sum_tensor<R: Real>(
    f: &MapField<R>,
    nodes: &[(Vec2<R>, R)],
    params: &FractionalParams<R>,
    delta: R,
) -> Result<R> {
    let m = nodes.len();
    if m < 2 {
        return Err(Error::EmptySample);
    }
    // every pair inside the exclusion radius means nothing to integrate
    let (mut lo, mut hi) = (nodes[0].0, nodes[0].0);
    for &(x, _) in nodes {
        lo = Vec2::new(lo.x.min(x.x), lo.y.min(x.y));
        hi = Vec2::new(hi.x.max(x.x), hi.y.max(x.y));
    }
    if delta > (hi.x - lo.x).max(hi.y - lo.y) {
        return Err(Error::EmptyPairSet);
    }
    let kernel_exp = params.kernel_exponent();
    let p = params.p;
    let values: Vec<Vec2<R>> = nodes.iter().map(|&(x, _)| f.eval(x)).collect();
    let two = R::of(2.0);
    let (s_delta, s_2delta) = batched_sum_pair_with(m, 64, |i| {
        let (xi, wi) = nodes[i];
        let fi = values[i];
        let mut near = R::zero();
        let mut far = R::zero();
        for j in (i + 1)..m {
            let (xj, wj) = nodes[j];
            let d = xi.dist(xj);
            if d < delta {
                continue;
            }
            let g = fi.dist(values[j]).powf(p) / d.powf(kernel_exp) * wi * wj;
            near = near + g;
            if d >= delta * two {
                far = far + g;
            }
        }
        (near + near, far + far)
    });
    if !(s_delta > R::zero()) && !(s_2delta > R::zero()) {
        // constant maps: zero numerator, extrapolation is exact
        return Ok(R::zero());
    }
    // linear extrapolation in the exclusion radius: S(0) ~ 2 S(d) - S(2d)
    Ok(s_delta + (s_delta - s_2delta))
}

/// Monte-Carlo level over `pairs` uniform point pairs.
fn pair_sum_monte_carlo<R: Real>(
    f: &MapField<R>,
    domain: &Domain<R>,
    params: &FractionalParams<R>,
    pairs: usize,
    seed: u64,
    delta: R,
) -> Result<R> {
    let kernel_exp = params.kernel_exponent();
    let p = params.p;
    let (lo, hi) = domain.bbox();
    let (lox, loy, hix, hiy) = (lo.x.f64(), lo.y.f64(), hi.x.f64(), hi.y.f64());
    let measure = domain.measure();
    let two = R::of(2.0);

    let draw = |rng: &mut ChaCha8Rng| loop {
        let q = Vec2::of(rng.gen_range(lox..hix), rng.gen_range(loy..hiy));
        if domain.contains_interior(q) && !f.is_singular_at(q, R::of(1e-12)) {
            return q;
        }
    };

    const PAIR_BATCH: usize = 4096;
    let batches = pairs.div_ceil(PAIR_BATCH);
    let (s_delta, s_2delta) = batched_sum_pair_with(batches, 1, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let lo_i = b * PAIR_BATCH;
        let hi_i = (lo_i + PAIR_BATCH).min(pairs);
        let mut near = R::zero();
        let mut far = R::zero();
        for _ in lo_i..hi_i {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let d = x.dist(y);
            if d < delta {
                continue;
            }
            let g = f.eval(x).dist(f.eval(y)).powf(p) / d.powf(kernel_exp);
            near = near + g;
            if d >= delta * two {
                far = far + g;
            }
        }
        (near, far)
    });
    let norm = measure * measure / R::of(pairs as f64);
    let (s_delta, s_2delta) = (s_delta * norm, s_2delta * norm);
    Ok((s_delta + (s_delta - s_2delta)).max(R::zero()))
}

/// Gagliardo seminorm of `f` over `domain`: the p-th root of the pairwise
/// double integral, reported with a three-level refinement trend.
pub fn gagliardo_seminorm<R: Real>(
    f: &MapField<R>,
    domain: &Domain<R>,
    params: &FractionalParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<SeminormEstimate<R>> {
    quad.validate_for(domain)?;
    let levels: Vec<usize> = [4usize, 2, 1]
        .iter()
        .map(|&div| (quad.sample_count / div).max(16))
        .collect();

    let mut trend = Vec::with_capacity(levels.len());
    match quad.scheme {
        Scheme::TensorMidpoint => {
            let (lo, hi) = domain.bbox();
            let extent = (hi.x - lo.x).max(hi.y - lo.y);
            let final_spacing = extent / R::of(*levels.last().unwrap() as f64);
            for &n in &levels {
                let nodes = interior_nodes(f, domain, n)?;
                if nodes.len() < 2 {
                    return Err(Error::EmptySample);
                }
                let spacing = extent / R::of(n as f64);
                let delta = quad.diagonal_exclusion * spacing / final_spacing;
                let sum = pair_sum_tensor(f, &nodes, params, delta)?;
                trend.push(sum.max(R::zero()).powf(R::one() / params.p));
            }
        }
        Scheme::MonteCarlo { seed } => {
            for (lvl, &pairs) in levels.iter().enumerate() {
                let sum = pair_sum_monte_carlo(
                    f,
                    domain,
                    params,
                    pairs,
                    seed.wrapping_add(lvl as u64),
                    quad.diagonal_exclusion,
                )?;
                trend.push(sum.powf(R::one() / params.p));
            }
        }
    }

    Ok(SeminormEstimate {
        value: *trend.last().unwrap(),
        scheme: quad.scheme.name().to_string(),
        refinement_trend: trend,
    })
}

/// Discrete Gagliardo double sum of a circle trace with geodesic distance
/// and uniform (periodic trapezoid) weights. The circle is one-dimensional,
/// so the kernel exponent is 1 + s p.
pub fn circle_seminorm<R: Real>(trace: &CircleTrace<R>, params: &FractionalParams<R>) -> Result<R> {
    let m = trace.len();
    if m < 32 {
        return Err(Error::TooFewCircleSamples { got: m, need: 32 });
    }
    let samples = trace.samples();
    let r = trace.radius;
    let step = R::two_pi() / R::of(m as f64);
    let w = r * step;
    let kernel_exp = R::one() + params.s * params.p;
    let p = params.p;

    let (sum, _) = batched_sum_pair_with(m, 64, |i| {
        let fi = samples[i];
        let mut acc = R::zero();
        #[allow(clippy::needless_range_loop)] // gap arithmetic needs the index
        for j in (i + 1)..m {
            let gap = (j - i).min(m - (j - i));
            let d = r * step * R::of(gap as f64);
            acc = acc + fi.dist(samples[j]).powf(p) / d.powf(kernel_exp) * w * w;
        }
        (acc + acc, R::zero())
    });
    Ok(sum.powf(R::one() / p))
}

/// Compares the radial integral of circle seminorms against the bulk
/// seminorm: `(int_0^R [f]^p_{dB(r)} dr)^{1/p} <= C [f]_{B(R)}`.
pub fn restriction_inequality_check<R: Real>(
    f: &MapField<R>,
    ball: &Domain<R>,
    params: &FractionalParams<R>,
    radii_count: usize,
    quad: &QuadratureSpec<R>,
    fitted_constant: f64,
) -> Result<VerificationReport> {
    if radii_count < 8 {
        return Err(Error::InvalidParameter(
            "restriction check needs at least 8 radii".into(),
        ));
    }
    if !params.trace_admissible() {
        return Err(Error::InvalidParameter(
            "restriction check needs s - 1/p > 0".into(),
        ));
    }
    let (center, radius) = match *ball {
        Domain::Ball { center, radius } => (center, radius),
        _ => {
            return Err(Error::InvalidDomain(
                "restriction check needs a ball".into(),
            ))
        }
    };

    const TRACE_SAMPLES: usize = 512;
    let mut radial: Vec<(R, R)> = vec![(R::zero(), R::zero())];
    for k in 1..=radii_count {
        let r = radius * R::of(k as f64 / (radii_count as f64 + 1.0));
        let trace = CircleTrace::sample(f, center, r, TRACE_SAMPLES)?;
        let v = circle_seminorm(&trace, params)?;
        radial.push((r, v.powf(params.p)));
    }
    let mut integral = R::zero();
    for w in radial.windows(2) {
        let (r0, v0) = w[0];
        let (r1, v1) = w[1];
        integral = integral + (r1 - r0) * (v0 + v1) * R::of(0.5);
    }
    let lhs = integral.powf(R::one() / params.p);
    let rhs = gagliardo_seminorm(f, ball, params, quad)?.value;

    let mut report = VerificationReport::new("restriction-inequality", "Lemma 2.3");
    report.quantity("lhs", lhs.f64());
    report.quantity("rhs", rhs.f64());
    report.quantity("fitted_constant", fitted_constant);
    if lhs.f64() < DEGENERATE_EPS && rhs.f64() < DEGENERATE_EPS {
        report.quantity("degenerate", 1.0);
        report.quantity("ratio", 0.0);
        report.pass = true;
        return Ok(report);
    }
    let ratio = lhs.f64() / rhs.f64();
    report.quantity("ratio", ratio);
    report.pass = ratio.is_finite() && ratio <= fitted_constant * (1.0 + REGRESSION_SLACK);
    Ok(report)
}

/// Truncation of the upper half space used by the extension energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionTruncation<R> {
    pub height: R,
    pub resolution: usize,
}

/// Radius where the fixed smooth cutoff starts decaying; it reaches zero at
/// [`CUTOFF_OUTER`].
pub const CUTOFF_INNER: f64 = 1.0;
pub const CUTOFF_OUTER: f64 = 2.0;

fn cutoff<R: Real>(t: R) -> R {
    let inner = R::of(CUTOFF_INNER);
    let outer = R::of(CUTOFF_OUTER);
    if t <= inner {
        R::one()
    } else if t >= outer {
        R::zero()
    } else {
        // cos^2 ramp: C^1 and monotone
        let u = (t - inner) / (outer - inner) * R::pi() * R::of(0.5);
        let c = u.cos();
        c * c
    }
}

/// Weighted gradient energy of the harmonic (Poisson) extension of the
/// cut-off map to the upper half space, truncated at `height`:
/// `int t^{(1 - 1/p - s) p} |DF|^p dx dt`, evaluated at the exponent p of
/// `params`. The equivalence check against `[f]^n` raises it to the power s
/// externally.
pub fn halfspace_extension_energy<R: Real>(
    f: &MapField<R>,
    params: &FractionalParams<R>,
    truncation: &ExtensionTruncation<R>,
) -> Result<R> {
    let k = truncation.resolution;
    if k < 8 {
        return Err(Error::InvalidParameter(
            "extension energy needs at least 8 nodes per axis".into(),
        ));
    }
    let outer = R::of(CUTOFF_OUTER);
    let span = outer + outer;
    let spacing = span / R::of(k as f64);
    let t_min = spacing;
    if !(truncation.height > t_min) {
        return Err(Error::InvalidParameter(
            "truncation height must exceed the grid spacing".into(),
        ));
    }

    // source nodes: f times the cutoff on [-2, 2]^2
    let half = R::of(0.5);
    let mut src: Vec<(Vec2<R>, Vec2<R>, R)> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let y = Vec2::new(
                -outer + spacing * (R::of(i as f64) + half),
                -outer + spacing * (R::of(j as f64) + half),
            );
            let chi = cutoff(y.norm());
            if chi > R::zero() && !f.is_singular_at(y, R::of(1e-12)) {
                src.push((y, f.eval(y).scale(chi), spacing * spacing));
            }
        }
    }
    if src.is_empty() {
        return Err(Error::EmptySample);
    }

    // geometric t-levels concentrated near the boundary where the weight
    // carries the mass
    let levels = (k / 4).max(8);
    let rho = (truncation.height / t_min).powf(R::one() / R::of(levels as f64));
    let sqrt_rho = rho.sqrt();
    let ts: Vec<(R, R)> = (0..levels)
        .map(|j| {
            let t = t_min * rho.powi(j as i32) * sqrt_rho;
            (t, t * (sqrt_rho - R::one() / sqrt_rho))
        })
        .collect();

    let p = params.p;
    let weight_exp = p * (R::one() - R::one() / p - params.s);
    let inv_two_pi = R::one() / R::two_pi();
    let three = R::of(3.0);
    let two = R::of(2.0);

    // energy integral over x in the same box as the source
    let xs: Vec<Vec2<R>> = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            Vec2::new(
                -outer + spacing * (R::of(i as f64) + half),
                -outer + spacing * (R::of(j as f64) + half),
            )
        })
        .collect();
    let wx = spacing * spacing;

    let energy = crate::sum::batched_sum_with(xs.len(), 8, |ix| {
        let x = xs[ix];
        let mut acc = R::zero();
        for &(t, wt) in &ts {
            // gradient of the Poisson convolution via kernel derivatives
            let mut dx = Vec2::zero();
            let mut dy = Vec2::zero();
            let mut dt = Vec2::zero();
            for &(ysrc, val, wy) in &src {
                let d = x - ysrc;
                let r2 = t * t + d.norm_sq();
                let r5 = r2 * r2 * r2.sqrt();
                let grad_coeff = -three * t / r5 * inv_two_pi * wy;
                let dt_coeff = (d.norm_sq() - two * t * t) / r5 * inv_two_pi * wy;
                dx = dx + val.scale(grad_coeff * d.x);
                dy = dy + val.scale(grad_coeff * d.y);
                dt = dt + val.scale(dt_coeff);
            }
            let frob2 = dx.norm_sq() + dy.norm_sq() + dt.norm_sq();
            acc = acc + t.powf(weight_exp) * frob2.powf(p * half) * wx * wt;
        }
        acc
    });
    Ok(energy)
}

/// Oscillation-to-seminorm modulus bound over nested radius pairs:
/// `osc(dB(r))^p log(R/r) <= C [f]^p_{B(R)}`.
pub fn modulus_bound_check<R: Real>(
    f: &MapField<R>,
    ball: &Domain<R>,
    params: &FractionalParams<R>,
    pair_count: usize,
    quad: &QuadratureSpec<R>,
    fitted_constant: f64,
    oscillation_monotone: bool,
) -> Result<VerificationReport> {
    if pair_count == 0 {
        return Err(Error::InvalidParameter(
            "need at least one radius pair".into(),
        ));
    }
    let (center, radius) = match *ball {
        Domain::Ball { center, radius } => (center, radius),
        _ => return Err(Error::InvalidDomain("modulus check needs a ball".into())),
    };
    let r_outer = radius * R::of(0.5);
    let outer_ball = Domain::ball(center, r_outer)?;
    let rhs_pow = gagliardo_seminorm(f, &outer_ball, params, quad)?
        .value
        .powf(params.p)
        .f64();

    let mut report = VerificationReport::new("modulus-bound", "Proposition 4.1");
    report.hypothesis_met = oscillation_monotone;
    report.quantity("fitted_constant", fitted_constant);
    report.quantity("rhs_seminorm_pow", rhs_pow);

    const TRACE_SAMPLES: usize = 512;
    let mut max_ratio = 0.0f64;
    let mut degenerate = true;
    for k in 1..=pair_count {
        let r = r_outer * R::of(0.5f64.powi(k as i32));
        let trace = CircleTrace::sample(f, center, r, TRACE_SAMPLES)?;
        let osc = trace.image_diameter();
        let lhs = osc.powf(params.p).f64() * (r_outer / r).ln().f64();
        report.quantity(&format!("osc_{k}"), osc.f64());
        report.quantity(&format!("lhs_{k}"), lhs);
        if lhs > DEGENERATE_EPS || rhs_pow > DEGENERATE_EPS {
            degenerate = false;
            max_ratio = max_ratio.max(lhs / rhs_pow);
        }
    }
    if degenerate {
        report.quantity("degenerate", 1.0);
        report.quantity("max_ratio", 0.0);
        report.pass = true;
        return Ok(report);
    }
    report.quantity("max_ratio", max_ratio);
    report.pass = !report.hypothesis_met
        || (max_ratio.is_finite() && max_ratio <= fitted_constant * (1.0 + REGRESSION_SLACK));
    Ok(report)
}
