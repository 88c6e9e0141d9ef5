//! Winding numbers of circle traces and the degree-based checkers.
//!
//! Degree is computed by summed signed angle increments. The result carries a
//! trust flag: it is trusted only when every increment stays below pi/2 (the
//! sampling resolves the winding) and the increment sum lands near a multiple
//! of 2 pi.

use crate::geom::{sample_circle_offset, sample_domain, Domain, GridSpec, Vec2};
use crate::jacobian::Verdict;
use crate::maps::{MapField, Smoothness};
use crate::scalar::Real;
use crate::verify::VerificationReport;
use crate::{Error, Result};

use crate::tol::DIAMETER_FACTOR;

/// Fraction of the boundary-image diameter used as the probe margin and the
/// interior-membership capture radius.
pub const PROBE_MARGIN_FRACTION: f64 = 0.02;

/// Values of a map sampled at equispaced angles on a circle.
#[derive(Clone, Debug)]
pub struct CircleTrace<R> {
    pub center: Vec2<R>,
    pub radius: R,
    pub map_label: String,
    samples: Vec<Vec2<R>>,
}

impl<R: Real> CircleTrace<R> {
    /// Sample `f` at `m >= 32` equispaced angles, counterclockwise from 0.
    pub fn sample(f: &MapField<R>, center: Vec2<R>, radius: R, m: usize) -> Result<Self> {
        Self::sample_with_offset(f, center, radius, m, R::zero())
    }

    pub fn sample_with_offset(
        f: &MapField<R>,
        center: Vec2<R>,
        radius: R,
        m: usize,
        offset: R,
    ) -> Result<Self> {
        if m < 32 {
            return Err(Error::TooFewCircleSamples { got: m, need: 32 });
        }
        let pts = sample_circle_offset(center, radius, m, offset)?;
        Ok(CircleTrace {
            center,
            radius,
            map_label: f.label().to_string(),
            samples: pts.into_iter().map(|p| f.eval(p)).collect(),
        })
    }

    pub fn from_samples(
        center: Vec2<R>,
        radius: R,
        map_label: impl Into<String>,
        samples: Vec<Vec2<R>>,
    ) -> Result<Self> {
        if samples.len() < 32 {
            return Err(Error::TooFewCircleSamples {
                got: samples.len(),
                need: 32,
            });
        }
        Ok(CircleTrace {
            center,
            radius,
            map_label: map_label.into(),
            samples,
        })
    }

    pub fn samples(&self) -> &[Vec2<R>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Oscillation of the trace: diameter of its image.
    pub fn image_diameter(&self) -> R {
        let mut best = R::zero();
        for (i, a) in self.samples.iter().enumerate() {
            for b in &self.samples[i + 1..] {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    pub fn min_distance_to(&self, p: Vec2<R>) -> R {
        self.samples
            .iter()
            .map(|s| s.dist(p))
            .fold(R::infinity(), R::min)
    }

    /// Bounding box of the image.
    pub fn image_bbox(&self) -> (Vec2<R>, Vec2<R>) {
        let mut lo = self.samples[0];
        let mut hi = self.samples[0];
        for s in &self.samples {
            lo = Vec2::new(lo.x.min(s.x), lo.y.min(s.y));
            hi = Vec2::new(hi.x.max(s.x), hi.y.max(s.y));
        }
        (lo, hi)
    }

    /// CSV export: `angle,f1,f2` with a header row.
    pub fn to_csv(&self) -> String {
        let m = self.samples.len();
        let mut out = String::from("angle,f1,f2\n");
        for (k, s) in self.samples.iter().enumerate() {
            let angle = std::f64::consts::TAU * k as f64 / m as f64;
            out.push_str(&format!("{},{},{}\n", angle, s.x.f64(), s.y.f64()));
        }
        out
    }
}

/// Outcome of a winding-number computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeResult<R> {
    pub degree: i64,
    /// Distance from the probe to the sampled boundary image.
    pub min_distance: R,
    /// |sum of signed increments - 2 pi degree|.
    pub angle_residual: R,
    /// False when some increment reached pi/2 or the residual is large.
    pub trusted: bool,
}

/// Winding number of `trace` around `p` by signed angle increments.
pub fn winding_degree<R: Real>(trace: &CircleTrace<R>, p: Vec2<R>) -> Result<DegreeResult<R>> {
    let min_distance = trace.min_distance_to(p);
    if !(min_distance > R::zero()) {
        return Err(Error::DegreeUndefined {
            x: p.x.f64(),
            y: p.y.f64(),
        });
    }
    let m = trace.samples.len();
    let mut total = R::zero();
    let mut max_step = R::zero();
    for k in 0..m {
        let a = trace.samples[k] - p;
        let b = trace.samples[(k + 1) % m] - p;
        let step = a.cross(b).atan2(a.dot(b));
        max_step = max_step.max(step.abs());
        total = total + step;
    }
    let two_pi = R::two_pi();
    let degree = (total / two_pi).round().f64() as i64;
    let angle_residual = (total - two_pi * R::of(degree as f64)).abs();
    let trusted = max_step < R::pi() * R::of(0.5) && angle_residual < R::pi() * R::of(0.25);
    Ok(DegreeResult {
        degree,
        min_distance,
        angle_residual,
        trusted,
    })
}

/// Fixed 7x7 probe grid scaled to the bounding box of the trace image.
pub fn default_probes<R: Real>(trace: &CircleTrace<R>) -> Vec<Vec2<R>> {
    let (lo, hi) = trace.image_bbox();
    let mut probes = Vec::with_capacity(49);
    for i in 0..7 {
        for j in 0..7 {
            let fx = R::of(i as f64 / 6.0);
            let fy = R::of(j as f64 / 6.0);
            probes.push(Vec2::new(
                lo.x + (hi.x - lo.x) * fx,
                lo.y + (hi.y - lo.y) * fy,
            ));
        }
    }
    probes
}

fn admissible<R: Real>(trace: &CircleTrace<R>, p: Vec2<R>, margin: R) -> bool {
    trace.min_distance_to(p) > margin
}

/// Degree over the smaller circle never exceeds the degree over the larger
/// concentric one. Gated on a nonnegative-or-positive sign verdict supplied
/// by the caller.
pub fn degree_monotonicity_check<R: Real>(
    f: &MapField<R>,
    x0: Vec2<R>,
    r: R,
    r_outer: R,
    probes: &[Vec2<R>],
    m: usize,
    verdict: Verdict,
) -> Result<VerificationReport> {
    if !(r < r_outer) {
        return Err(Error::InvalidParameter("need r < R".into()));
    }
    let inner = CircleTrace::sample(f, x0, r, m)?;
    let outer = CircleTrace::sample(f, x0, r_outer, m)?;
    let margin_in = inner.image_diameter() * R::of(PROBE_MARGIN_FRACTION);
    let margin_out = outer.image_diameter() * R::of(PROBE_MARGIN_FRACTION);

    let mut report = VerificationReport::new("degree-monotonicity", "Proposition 1.7");
    report.hypothesis_met = matches!(
        verdict,
        Verdict::NonnegativeEvidence | Verdict::PositiveEvidence
    );

    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut min_inner = i64::MAX;
    let mut max_outer = i64::MIN;
    for &p in probes {
        if !admissible(&inner, p, margin_in) || !admissible(&outer, p, margin_out) {
            report.skipped_probes += 1;
            continue;
        }
        let di = winding_degree(&inner, p)?;
        let dout = winding_degree(&outer, p)?;
        if !(di.trusted && dout.trusted) {
            report.skipped_probes += 1;
            continue;
        }
        checked += 1;
        min_inner = min_inner.min(di.degree);
        max_outer = max_outer.max(dout.degree);
        if di.degree > dout.degree {
            violations += 1;
        }
    }
    report.quantity("probes_checked", checked as f64);
    report.quantity("violations", violations as f64);
    if checked > 0 {
        report.quantity("min_inner_degree", min_inner as f64);
        report.quantity("max_outer_degree", max_outer as f64);
    }
    report.pass = !report.hypothesis_met || (checked > 0 && violations == 0);
    Ok(report)
}

/// Degree over a single circle is nonnegative under the same gating.
pub fn degree_nonnegativity_check<R: Real>(
    f: &MapField<R>,
    x0: Vec2<R>,
    radius: R,
    probes: &[Vec2<R>],
    m: usize,
    verdict: Verdict,
) -> Result<VerificationReport> {
    let trace = CircleTrace::sample(f, x0, radius, m)?;
    let margin = trace.image_diameter() * R::of(PROBE_MARGIN_FRACTION);

    let mut report = VerificationReport::new("degree-nonnegativity", "Proposition 1.8");
    report.hypothesis_met = matches!(
        verdict,
        Verdict::NonnegativeEvidence | Verdict::PositiveEvidence
    );

    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut min_degree = i64::MAX;
    for &p in probes {
        if !admissible(&trace, p, margin) {
            report.skipped_probes += 1;
            continue;
        }
        let d = winding_degree(&trace, p)?;
        if !d.trusted {
            report.skipped_probes += 1;
            continue;
        }
        checked += 1;
        min_degree = min_degree.min(d.degree);
        if d.degree < 0 {
            violations += 1;
        }
    }
    report.quantity("probes_checked", checked as f64);
    report.quantity("violations", violations as f64);
    if checked > 0 {
        report.quantity("min_degree", min_degree as f64);
    }
    report.pass = !report.hypothesis_met || (checked > 0 && violations == 0);
    Ok(report)
}

/// Every value attained in the interior (and off the boundary image) has
/// degree at least one. Gated on a positive sign verdict and smoothness.
pub fn sense_preserving_check<R: Real>(
    f: &MapField<R>,
    ball: &Domain<R>,
    probes: &[Vec2<R>],
    m: usize,
    verdict: Verdict,
) -> Result<VerificationReport> {
    let (center, radius) = match *ball {
        Domain::Ball { center, radius } => (center, radius),
        _ => {
            return Err(Error::InvalidDomain(
                "sense-preserving check needs a ball".into(),
            ))
        }
    };
    let trace = CircleTrace::sample(f, center, radius, m)?;
    let rho_bd = trace.image_diameter();
    let margin = rho_bd * R::of(PROBE_MARGIN_FRACTION);

    // fine interior image sample for the membership test
    let grid = GridSpec::new(96)?;
    let image: Vec<Vec2<R>> = sample_domain(ball, &grid)?
        .into_iter()
        .filter(|&(p, _)| !f.is_singular_at(p, R::of(1e-12)))
        .map(|(p, _)| f.eval(p))
        .collect();

    let mut report = VerificationReport::new("sense-preserving", "Proposition 1.10");
    report.hypothesis_met =
        verdict == Verdict::PositiveEvidence && f.smoothness() == Smoothness::Smooth;

    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut min_degree = i64::MAX;
    for &p in probes {
        let attained = image.iter().map(|q| q.dist(p)).fold(R::infinity(), R::min) < margin;
        if !attained || !admissible(&trace, p, margin) {
            report.skipped_probes += 1;
            continue;
        }
        let d = winding_degree(&trace, p)?;
        if !d.trusted {
            report.skipped_probes += 1;
            continue;
        }
        checked += 1;
        min_degree = min_degree.min(d.degree);
        if d.degree < 1 {
            violations += 1;
        }
    }
    report.quantity("probes_checked", checked as f64);
    report.quantity("violations", violations as f64);
    if checked > 0 {
        report.quantity("min_degree", min_degree as f64);
    }
    report.pass = !report.hypothesis_met || (checked > 0 && violations == 0);
    Ok(report)
}

/// Interior image diameter is controlled by the boundary image diameter:
/// `rho_in <= 40 rho_bd`. Records the sharper empirical ratio.
pub fn essential_diameter_check<R: Real>(
    f: &MapField<R>,
    ball: &Domain<R>,
    interior_grid: &GridSpec,
    m: usize,
    verdict: Verdict,
) -> Result<VerificationReport> {
    let (center, radius) = match *ball {
        Domain::Ball { center, radius } => (center, radius),
        _ => {
            return Err(Error::InvalidDomain(
                "essential-diameter check needs a ball".into(),
            ))
        }
    };
    let trace = CircleTrace::sample(f, center, radius, m)?;
    let rho_bd = trace.image_diameter();

    let image: Vec<Vec2<R>> = sample_domain(ball, interior_grid)?
        .into_iter()
        .filter(|&(p, _)| !f.is_singular_at(p, R::of(1e-12)))
        .map(|(p, _)| f.eval(p))
        .collect();
    let mut rho_in = R::zero();
    for (i, a) in image.iter().enumerate() {
        for b in &image[i + 1..] {
            rho_in = rho_in.max(a.dist(*b));
        }
    }

    let mut report = VerificationReport::new("essential-diameter", "Proposition 1.9");
    report.hypothesis_met = verdict == Verdict::PositiveEvidence;
    report.quantity("rho_boundary", rho_bd.f64());
    report.quantity("rho_interior", rho_in.f64());
    let ratio = if rho_bd > R::zero() {
        (rho_in / rho_bd).f64()
    } else if rho_in > R::zero() {
        f64::INFINITY
    } else {
        0.0
    };
    report.quantity("ratio", ratio);
    report.quantity("factor_bound", DIAMETER_FACTOR);
    report.pass = !report.hypothesis_met || ratio <= DIAMETER_FACTOR;
    Ok(report)
}

/// Oscillation (image diameter) of circle traces at each radius.
pub fn oscillation_profile<R: Real>(
    f: &MapField<R>,
    x0: Vec2<R>,
    radii: &[R],
    m: usize,
) -> Result<Vec<(R, R)>> {
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("radii must be increasing".into()));
    }
    radii
        .iter()
        .map(|&r| {
            let t = CircleTrace::sample(f, x0, r, m)?;
            Ok((r, t.image_diameter()))
        })
        .collect()
}

/// Smallest factor L such that `osc(r) <= L * osc(rho)` for all sampled
/// `r < rho` in the profile; 1 for genuinely monotone profiles.
pub fn oscillation_monotonicity_factor<R: Real>(profile: &[(R, R)]) -> f64 {
    let mut factor = 1.0f64;
    for (i, &(_, osc_small)) in profile.iter().enumerate() {
        for &(_, osc_large) in &profile[i + 1..] {
            if osc_large > R::zero() {
                factor = factor.max((osc_small / osc_large).f64());
            } else if osc_small > R::zero() {
                factor = f64::INFINITY;
            }
        }
    }
    factor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::GalleryMap;

    type P = Vec2<f64>;

    fn trace_of(g: &GalleryMap, r: f64, m: usize) -> CircleTrace<f64> {
        let f = g.build().unwrap();
        CircleTrace::sample(&f, P::zero(), r, m).unwrap()
    }

    #[test]
    fn winding_oracle_values() {
        let cases: Vec<(GalleryMap, i64)> = vec![
            (GalleryMap::Identity, 1),
            (GalleryMap::Power { k: 2 }, 2),
            (GalleryMap::Power { k: 3 }, 3),
            (GalleryMap::Power { k: -2 }, -2),
            (GalleryMap::Conjugation, -1),
            (GalleryMap::ConjPower { k: 3 }, -3),
        ];
        for (g, expect) in cases {
            let t = trace_of(&g, 1.0, 512);
            let d = winding_degree(&t, P::zero()).unwrap();
            assert_eq!(d.degree, expect, "{}", g.label());
            assert!(d.trusted);
            assert!(d.angle_residual < 1e-9);
        }
        let t = trace_of(&GalleryMap::Constant { value: (2.0, 0.0) }, 1.0, 512);
        let d = winding_degree(&t, P::zero()).unwrap();
        assert_eq!(d.degree, 0);
        assert!(d.trusted);
    }

    #[test]
    fn degree_stable_at_every_radius() {
        for k in [-3i32, -1, 1, 3] {
            for r in [0.5, 1.0, 2.0] {
                let g = if k > 0 {
                    GalleryMap::Power { k }
                } else {
                    GalleryMap::ConjPower { k: (-k) as u32 }
                };
                let t = trace_of(&g, r, 256);
                assert_eq!(winding_degree(&t, P::zero()).unwrap().degree, k as i64);
            }
        }
    }

    #[test]
    fn probe_on_image_is_rejected() {
        let t = trace_of(&GalleryMap::Identity, 1.0, 64);
        // (1, 0) is the first sample itself
        assert!(winding_degree(&t, P::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn coarse_sampling_flags_untrusted() {
        // probe wedged between two adjacent samples, just inside the image:
        // the increment across the gap blows past pi/2
        let t = trace_of(&GalleryMap::Identity, 1.0, 32);
        let half_step = std::f64::consts::PI / 32.0;
        let p = P::new(0.99 * half_step.cos(), 0.99 * half_step.sin());
        let d = winding_degree(&t, p).unwrap();
        assert!(!d.trusted, "near-boundary probe must be untrusted");
    }

    #[test]
    fn doubling_samples_keeps_degree() {
        for g in [
            GalleryMap::Power { k: 2 },
            GalleryMap::Power { k: 3 },
            GalleryMap::Conjugation,
        ] {
            let a = winding_degree(&trace_of(&g, 1.0, 256), P::new(0.1, 0.05)).unwrap();
            let b = winding_degree(&trace_of(&g, 1.0, 512), P::new(0.1, 0.05)).unwrap();
            assert!(a.trusted && b.trusted);
            assert_eq!(a.degree, b.degree);
        }
    }

    #[test]
    fn translation_equivariance() {
        let t = trace_of(&GalleryMap::Power { k: 2 }, 1.0, 128);
        let v = P::new(3.0, -1.5);
        let moved = CircleTrace::from_samples(
            t.center,
            t.radius,
            t.map_label.clone(),
            t.samples().iter().map(|&s| s + v).collect(),
        )
        .unwrap();
        let p = P::new(0.2, 0.1);
        assert_eq!(
            winding_degree(&t, p).unwrap().degree,
            winding_degree(&moved, p + v).unwrap().degree
        );
    }

    #[test]
    fn monotonicity_power2_passes() {
        let f = GalleryMap::Power { k: 2 }.build::<f64>().unwrap();
        let probes = vec![P::zero(), P::new(0.36, 0.0), P::new(0.1, 0.1)];
        let rep = degree_monotonicity_check(
            &f,
            P::zero(),
            0.5,
            1.0,
            &probes,
            512,
            Verdict::PositiveEvidence,
        )
        .unwrap();
        assert!(rep.hypothesis_met && rep.pass);
        assert_eq!(rep.quantities["violations"], 0.0);
    }

    #[test]
    fn monotonicity_gap_probe_zero_vs_two() {
        // p = 0.36 sits outside the image of the inner circle (radius 0.25
        // disk boundary image) and inside the outer one.
        let f = GalleryMap::Power { k: 2 }.build::<f64>().unwrap();
        let inner = CircleTrace::sample(&f, P::zero(), 0.5, 4096).unwrap();
        let outer = CircleTrace::sample(&f, P::zero(), 1.0, 4096).unwrap();
        let p = P::new(0.36, 0.0);
        assert_eq!(winding_degree(&inner, p).unwrap().degree, 0);
        assert_eq!(winding_degree(&outer, p).unwrap().degree, 2);
    }

    #[test]
    fn conjugation_is_gated_not_failed() {
        let f = GalleryMap::Conjugation.build::<f64>().unwrap();
        let probes = vec![P::zero()];
        let rep =
            degree_monotonicity_check(&f, P::zero(), 0.5, 1.0, &probes, 256, Verdict::SignChanging)
                .unwrap();
        assert!(!rep.hypothesis_met);
        assert!(rep.pass, "gated checks never report a failure");
    }

    #[test]
    fn nonnegativity_examples() {
        let f = GalleryMap::Power { k: 2 }.build::<f64>().unwrap();
        let rep = degree_nonnegativity_check(
            &f,
            P::zero(),
            1.0,
            &[P::zero()],
            512,
            Verdict::PositiveEvidence,
        )
        .unwrap();
        assert!(rep.pass && rep.quantities["min_degree"] == 2.0);

        let id = GalleryMap::Identity.build::<f64>().unwrap();
        let rep = degree_nonnegativity_check(
            &id,
            P::zero(),
            1.0,
            &[P::new(2.0, 0.0)],
            512,
            Verdict::PositiveEvidence,
        )
        .unwrap();
        assert!(rep.pass && rep.quantities["min_degree"] == 0.0);
    }

    #[test]
    fn sense_preserving_examples() {
        let ball = Domain::ball(P::zero(), 1.0).unwrap();
        let f = GalleryMap::Power { k: 2 }.build::<f64>().unwrap();
        let rep = sense_preserving_check(
            &f,
            &ball,
            &[P::new(0.1, 0.0)],
            512,
            Verdict::PositiveEvidence,
        )
        .unwrap();
        assert!(rep.pass && rep.quantities["min_degree"] >= 1.0);

        let conj = GalleryMap::Conjugation.build::<f64>().unwrap();
        let rep =
            sense_preserving_check(&conj, &ball, &[P::zero()], 512, Verdict::SignChanging).unwrap();
        assert!(!rep.hypothesis_met && rep.pass);
    }

    #[test]
    fn essential_diameter_identity_ratio_one() {
        let ball = Domain::ball(P::zero(), 0.8).unwrap();
        let f = GalleryMap::Identity.build::<f64>().unwrap();
        let rep = essential_diameter_check(
            &f,
            &ball,
            &GridSpec::new(64).unwrap(),
            256,
            Verdict::PositiveEvidence,
        )
        .unwrap();
        assert!(rep.pass);
        let ratio = rep.quantities["ratio"];
        assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn oscillation_profiles() {
        let id = GalleryMap::Identity.build::<f64>().unwrap();
        let radii = [0.25, 0.5, 0.75];
        let prof = oscillation_profile(&id, P::zero(), &radii, 256).unwrap();
        for &(r, osc) in &prof {
            assert!((osc - 2.0 * r).abs() < 1e-3);
        }
        assert!(oscillation_monotonicity_factor(&prof) <= 1.0 + 1e-9);

        let p2 = GalleryMap::Power { k: 2 }.build::<f64>().unwrap();
        let prof = oscillation_profile(&p2, P::zero(), &radii, 256).unwrap();
        for &(r, osc) in &prof {
            assert!((osc - 2.0 * r * r).abs() < 1e-2, "r={r} osc={osc}");
        }

        let c = GalleryMap::Constant { value: (1.0, 1.0) }
            .build::<f64>()
            .unwrap();
        let prof = oscillation_profile(&c, P::zero(), &radii, 256).unwrap();
        assert!(prof.iter().all(|&(_, osc)| osc == 0.0));

        assert!(oscillation_profile(&id, P::zero(), &[0.5, 0.25], 64).is_err());
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let t = trace_of(&GalleryMap::Identity, 1.0, 32);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("angle,f1,f2"));
        assert_eq!(lines.count(), 32);
    }

    #[test]
    fn trace_needs_32_samples() {
        let f = GalleryMap::Identity.build::<f64>().unwrap();
        assert!(CircleTrace::sample(&f, P::zero(), 1.0, 16).is_err());
    }
}
