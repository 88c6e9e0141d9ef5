//! Shared oracles for the integration suites. These stay independent of the
//! library's internal quadrature paths: plain Simpson rules and a
//! high-resolution winding reference.
#![allow(dead_code)] // each test binary uses its own subset

use fracdeg::degree::{winding_degree, CircleTrace};
use fracdeg::{Map, Point};

/// `int g(|x|) phi(x) dx` for the standard bump of radius `rho` at the
/// origin, by a fine 1-D Simpson rule in the radial variable.
pub fn radial_bump_integral(rho: f64, g: impl Fn(f64) -> f64) -> f64 {
    let n = 40_000usize;
    let h = rho / n as f64;
    let f = |r: f64| {
        let t = (r / rho).powi(2);
        if t >= 1.0 {
            return 0.0;
        }
        g(r) * (-1.0 / (1.0 - t)).exp() * r
    };
    let mut s = f(0.0) + f(rho);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    std::f64::consts::TAU * s * h / 3.0
}

/// Reference winding number at 4096 samples.
pub fn winding_oracle(f: &Map, center: Point, r: f64, p: Point) -> i64 {
    let trace = CircleTrace::sample(f, center, r, 4096).unwrap();
    let d = winding_degree(&trace, p).unwrap();
    assert!(d.trusted, "oracle winding must be trusted");
    d.degree
}
