//! Zhang–Shu scaling limiter keeping the linear reconstruction in [0, 1].

/// Scaling factor ϑ = min(|1 − a|/|M − a|, |a|/|m − a|, 1), where M and m
/// are the larger and smaller endpoint values `a ± b`.
pub fn zhang_shu_theta(a: f64, b: f64) -> f64 {
    let hi = (a - b).max(a + b);
    let lo = (a - b).min(a + b);
    let mut theta: f64 = 1.0;
    if hi != a {
        theta = theta.min((1.0 - a).abs() / (hi - a).abs());
    }
    if lo != a {
        theta = theta.min(a.abs() / (lo - a).abs());
    }
    theta
}

/// Limited slope ϑ·b for a cell average `a ∈ [0, 1]`.
///
/// Computed as `sign(b)·min(|b|, a, 1 − a)`, which equals ϑ·b and keeps
/// both endpoints inside [0, 1] in floating point.
#[inline]
pub fn zhang_shu_limit(a: f64, b: f64) -> f64 {
    let m = b.abs().min(a).min(1.0 - a);
    if b < 0.0 {
        -m
    } else {
        m
    }
}

/// Running diagnostics collected while limiting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterStats {
    /// Cell averages found outside [0, 1] and clamped.
    pub clamps: u64,
    /// Smallest endpoint value seen after limiting.
    pub min_endpoint: f64,
    /// Largest endpoint value seen after limiting.
    pub max_endpoint: f64,
}

impl Default for LimiterStats {
    fn default() -> Self {
        Self {
            clamps: 0,
            min_endpoint: f64::INFINITY,
            max_endpoint: f64::NEG_INFINITY,
        }
    }
}

/// Limits every cell of a coefficient vector laid out as all `a` then all `b`.
pub fn limit_coeffs(coeffs: &mut [f64], stats: &mut LimiterStats) {
    let cells = coeffs.len() / 2;
    let (a, b) = coeffs.split_at_mut(cells);
    let mut lo = stats.min_endpoint;
    let mut hi = stats.max_endpoint;
    for (av, bv) in a.iter_mut().zip(b.iter_mut()) {
        if *av < 0.0 || *av > 1.0 {
            *av = av.clamp(0.0, 1.0);
            *bv = 0.0;
            stats.clamps += 1;
        } else {
            *bv = zhang_shu_limit(*av, *bv);
        }
        let m = bv.abs();
        lo = lo.min(*av - m);
        hi = hi.max(*av + m);
    }
    stats.min_endpoint = lo;
    stats.max_endpoint = hi;
}
