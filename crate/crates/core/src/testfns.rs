//! Even test functions g whose Fourier transforms ĝ have compact support.
//!
//! Fourier convention: ĝ(y) = ∫ g(x) e^{−2πixy} dx.

use crate::error::{Error, Result};
use crate::quad;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Zero,
    /// ĝ(u) = max(0, 1 − |u|/σ)
    Fejer(f64),
    /// Pointwise product of two Fejér functions; ĝ is the convolution.
    Product(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionPair {
    shape: Shape,
    support: f64,
    ghat_scale: f64,
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

fn fejer_g(s: f64, x: f64) -> f64 {
    let v = sinc(PI * s * x);
    s * v * v
}

fn triangle(s: f64, u: f64) -> f64 {
    (1.0 - u.abs() / s).max(0.0)
}

/// (T_a ∗ T_b)(u) for the unit-height triangles T_a, T_b, written as a
/// combination of truncated cubes.
fn triangle_convolution(a: f64, b: f64, u: f64) -> f64 {
    let u = u.abs();
    if u >= a + b {
        return 0.0;
    }
    const C: [f64; 3] = [1.0, -2.0, 1.0];
    let mut acc = 0.0;
    for (i, ci) in C.iter().enumerate() {
        for (j, cj) in C.iter().enumerate() {
            let shift = (i as f64 - 1.0) * a + (j as f64 - 1.0) * b;
            let t = u - shift;
            if t > 0.0 {
                acc += ci * cj * t * t * t;
            }
        }
    }
    (acc / (6.0 * a * b)).max(0.0)
}

impl TestFunctionPair {
    pub fn fejer(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("support must be positive, got {sigma}")));
        }
        Ok(Self {
            shape: Shape::Fejer(sigma),
            support: sigma,
            ghat_scale: 1.0,
        })
    }

    /// g ≡ 0, nominally supported on [−σ, σ].
    pub fn zero(sigma: f64) -> Self {
        Self {
            shape: Shape::Zero,
            support: sigma.max(f64::MIN_POSITIVE),
            ghat_scale: 1.0,
        }
    }

    /// The pair (g₁g₂, ĝ₁∗ĝ₂).
    pub fn product(&self, other: &Self) -> Result<Self> {
        let support = self.support + other.support;
        let shape = match (&self.shape, &other.shape) {
            (Shape::Zero, _) | (_, Shape::Zero) => Shape::Zero,
            (Shape::Fejer(a), Shape::Fejer(b)) => Shape::Product(*a, *b),
            _ => {
                return Err(Error::Domain(
                    "products are only formed from two Fejér factors".into(),
                ))
            }
        };
        Ok(Self {
            shape,
            support,
            ghat_scale: self.ghat_scale * other.ghat_scale,
        })
    }

    /// Same g with ĝ multiplied by `factor`; no longer a Fourier pair unless
    /// `factor` is 1. Exists to exercise [`verify_pair`].
    pub fn with_ghat_scaled(&self, factor: f64) -> Self {
        Self {
            ghat_scale: self.ghat_scale * factor,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.shape == Shape::Zero
    }

    /// σ with ĝ(u) = 0 for |u| ≥ σ.
    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn g(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Zero => 0.0,
            Shape::Fejer(s) => fejer_g(s, x),
            Shape::Product(a, b) => fejer_g(a, x) * fejer_g(b, x),
        }
    }

    pub fn ghat(&self, u: f64) -> f64 {
        let v = match self.shape {
            Shape::Zero => 0.0,
            Shape::Fejer(s) => triangle(s, u),
            Shape::Product(a, b) => triangle_convolution(a, b, u),
        };
        self.ghat_scale * v
    }

    pub fn g0(&self) -> f64 {
        self.g(0.0)
    }

    pub fn ghat0(&self) -> f64 {
        self.ghat(0.0)
    }

    /// C with |g(x)| ≤ C/x² for all x.
    pub fn tail_constant(&self) -> f64 {
        match self.shape {
            Shape::Zero => 0.0,
            Shape::Fejer(s) => 1.0 / (PI * PI * s),
            Shape::Product(a, b) => (b / (PI * PI * a)).min(a / (PI * PI * b)),
        }
    }

    /// c such that g(x) − c/x² oscillates with mean zero at large x.
    pub fn mean_tail_coefficient(&self) -> f64 {
        match self.shape {
            Shape::Fejer(s) => 1.0 / (2.0 * PI * PI * s),
            _ => 0.0,
        }
    }

    /// Points of [0, σ] where ĝ fails to be smooth.
    pub fn ghat_breakpoints(&self) -> Vec<f64> {
        let mut pts = match self.shape {
            Shape::Zero => vec![0.0, self.support],
            Shape::Fejer(s) => vec![0.0, s],
            Shape::Product(a, b) => vec![0.0, (a - b).abs(), a, b, a + b],
        };
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        pts
    }

    /// Largest x beyond which |g| stays below `eps`, from the C/x² envelope.
    pub fn decay_radius(&self, eps: f64) -> f64 {
        (self.tail_constant() / eps).sqrt()
    }
}

fn merged_breaks(f1: &TestFunctionPair, f2: &TestFunctionPair) -> Vec<f64> {
    let top = f1.support().min(f2.support());
    let mut pts: Vec<f64> = f1
        .ghat_breakpoints()
        .into_iter()
        .chain(f2.ghat_breakpoints())
        .filter(|&u| u < top)
        .collect();
    pts.push(top);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    pts
}

/// ∫ ĝ₁(u)ĝ₂(u) du, which equals (g₁g₂)^(0).
pub fn plancherel_product_at_0(f1: &TestFunctionPair, f2: &TestFunctionPair) -> Result<f64> {
    if f1.is_zero() || f2.is_zero() {
        return Ok(0.0);
    }
    let h = |u: f64| f1.ghat(u) * f2.ghat(u);
    Ok(2.0 * quad::simpson_pieces(&h, &merged_breaks(f1, f2), 1e-14)?)
}

/// ∫ |u| ĝ₁(u)ĝ₂(u) du.
pub fn weighted_abs_integral(f1: &TestFunctionPair, f2: &TestFunctionPair) -> Result<f64> {
    if f1.is_zero() || f2.is_zero() {
        return Ok(0.0);
    }
    let h = |u: f64| u * f1.ghat(u) * f2.ghat(u);
    Ok(2.0 * quad::simpson_pieces(&h, &merged_breaks(f1, f2), 1e-14)?)
}

/// ∫ |u| ĝ(u) du.
pub fn abs_moment(f: &TestFunctionPair) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let h = |u: f64| u * f.ghat(u);
    Ok(2.0 * quad::simpson_pieces(&h, &f.ghat_breakpoints(), 1e-14)?)
}

/// Checks |∫ g(x) cos(2πxy) dx − ĝ(y)| < tol at every grid point.
///
/// The integral is cut at X = 4C/tol, where |g(x)| ≤ C/x², so the
/// discarded tails contribute at most tol/2.
pub fn verify_pair(f: &TestFunctionPair, grid: &[f64], tol: f64) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let x_max = 4.0 * f.tail_constant() / tol;
    for &y in grid {
        let integral = if x_max > 0.0 {
            let h = |x: f64| f.g(x) * (2.0 * PI * x * y).cos();
            let width = 0.25 / (f.support() + y.abs());
            2.0 * quad::simpson_panels(&h, 0.0, x_max, width, 0.1 * tol)?
        } else {
            0.0
        };
        if (integral - f.ghat(y)).abs() >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}
