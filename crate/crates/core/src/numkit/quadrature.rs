//! Fixed quadrature rules on the reference interval [-1, 1] and the
//! composite / semi-infinite drivers built on them.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NumError;

/// Codomain of an integrand: real or complex.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn is_finite_value(&self) -> bool;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussLegendre,
    TanhSinh,
    Trapezoid,
}

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes,
            weights,
            kind: RuleKind::GaussLegendre,
        }
    }

    /// Tanh–sinh (double exponential) rule with step `h`, truncated where the
    /// weights underflow.
    pub fn tanh_sinh(h: f64) -> Self {
        assert!(h > 0.0 && h < 1.0, "tanh-sinh step must lie in (0, 1)");
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let half_pi = 0.5 * PI;
        let mut k = 0i64;
        loop {
            let t = k as f64 * h;
            let u = half_pi * t.sinh();
            let x = u.tanh();
            let w = h * half_pi * t.cosh() / u.cosh().powi(2);
            // 1 - |x| computed without cancellation.
            let gap = 1.0 / (u.abs().exp() * u.cosh());
            if w < 1e-300 || gap < 1e-300 || !w.is_finite() {
                break;
            }
            if k == 0 {
                nodes.push(x);
                weights.push(w);
            } else {
                nodes.push(x);
                weights.push(w);
                nodes.push(-x);
                weights.push(w);
            }
            k += 1;
        }
        let mut paired: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        // drop nodes that rounded onto the endpoints
        paired.retain(|(x, _)| x.abs() < 1.0);
        let (nodes, weights) = paired.into_iter().unzip();
        Self {
            nodes,
            weights,
            kind: RuleKind::TanhSinh,
        }
    }

    /// Closed trapezoid rule with `n >= 2` equally spaced points.
    pub fn trapezoid(n: usize) -> Self {
        assert!(n >= 2, "trapezoid rule needs at least two points");
        let h = 2.0 / (n - 1) as f64;
        let nodes = (0..n).map(|i| -1.0 + h * i as f64).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        Self {
            nodes,
            weights,
            kind: RuleKind::Trapezoid,
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]` with this rule mapped affinely.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> Result<T, NumError>
    where
        T: Integrand,
        F: FnMut(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let v = f(t);
            if !v.is_finite_value() {
                return Err(NumError::NonFinite { node: t });
            }
            acc = acc + v * w;
        }
        Ok(acc * half)
    }

    /// Split `[a, b]` into `panels` equal pieces and apply the rule on each.
    pub fn integrate_composite<T, F>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> Result<T, NumError>
    where
        T: Integrand,
        F: FnMut(f64) -> T,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut acc = T::zero();
        for p in 0..panels {
            let lo = a + width * p as f64;
            let hi = if p + 1 == panels { b } else { lo + width };
            acc = acc + self.integrate(lo, hi, &mut f)?;
        }
        Ok(acc)
    }

    /// Nodes and weights of the composite rule on `[a, b]`, for callers that
    /// tabulate an integrand once and reuse it.
    pub fn composite_grid(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.len());
        let mut ws = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let lo = a + width * p as f64;
            let half = 0.5 * width;
            let mid = lo + half;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                xs.push(mid + half * x);
                ws.push(w * half);
            }
        }
        (xs, ws)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Estimate `∫_a^b f` with the given rule.
pub fn integrate_1d<T, F>(f: F, a: f64, b: f64, rule: &QuadratureRule) -> Result<T, NumError>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    if a > b {
        return Err(NumError::Domain(format!("integration bounds out of order: [{a}, {b}]")));
    }
    rule.integrate(a, b, f)
}

/// Result of a truncated semi-infinite integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfinite<T> {
    pub value: T,
    /// Magnitude of the contribution of the last truncation segment
    /// `[30 s, 40 s]`; an upper estimate of the discarded remainder.
    pub tail_bound: f64,
}

/// Panel layout for [`integrate_semi_infinite_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteOptions {
    pub decay_scale: f64,
    /// Upper bound on the panel width; set it below the oscillation period of
    /// oscillatory integrands.
    pub max_panel_width: f64,
    /// Truncation point in units of `decay_scale`.
    pub cutoff_scales: f64,
}

impl SemiInfiniteOptions {
    pub fn new(decay_scale: f64) -> Self {
        Self {
            decay_scale,
            max_panel_width: 0.5 * decay_scale,
            cutoff_scales: 40.0,
        }
    }

    /// Shrink panels so that each spans at most a quarter period of
    /// `angular_frequency`.
    pub fn oscillating(mut self, angular_frequency: f64) -> Self {
        let w = angular_frequency.abs();
        if w > 0.0 {
            self.max_panel_width = self.max_panel_width.min(0.5 * PI / w);
        }
        self
    }
}

const TAIL_FRACTION_LIMIT: f64 = 1e-6;

/// `∫_0^∞ f` for integrands decaying at least like `exp(-t / decay_scale)`,
/// truncated at `40 decay_scale`.
pub fn integrate_semi_infinite<T, F>(
    f: F,
    decay_scale: f64,
    rule: &QuadratureRule,
) -> Result<SemiInfinite<T>, NumError>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    integrate_semi_infinite_with(f, SemiInfiniteOptions::new(decay_scale), rule)
}

pub fn integrate_semi_infinite_with<T, F>(
    mut f: F,
    opts: SemiInfiniteOptions,
    rule: &QuadratureRule,
) -> Result<SemiInfinite<T>, NumError>
where
    T: Integrand,
    F: FnMut(f64) -> T,
{
    let s = opts.decay_scale;
    if !(s.is_finite() && s > 0.0) {
        return Err(NumError::Domain(format!("decay scale must be positive, got {s}")));
    }
    let cutoff = opts.cutoff_scales * s;
    let tail_start = 0.75 * cutoff;
    let panels_for = |len: f64| (len / opts.max_panel_width).ceil().max(1.0) as usize;
    let head: T = rule.integrate_composite(0.0, tail_start, panels_for(tail_start), &mut f)?;
    let tail: T = rule.integrate_composite(
        tail_start,
        cutoff,
        panels_for(cutoff - tail_start),
        &mut f,
    )?;
    let total = head + tail;
    let tail_mag = tail.magnitude();
    if tail_mag > TAIL_FRACTION_LIMIT * total.magnitude() {
        return Err(NumError::NotDecaying {
            tail: tail_mag,
            total: total.magnitude(),
        });
    }
    Ok(SemiInfinite {
        value: total,
        tail_bound: tail_mag,
    })
}
