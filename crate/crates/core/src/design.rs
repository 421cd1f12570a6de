//! Optimal spacing and distance for parallel 2×2 arrays.
//!
//! Orthogonal sub-channels need the cross path to exceed the direct path by
//! an odd multiple of a quarter wavelength, `√(d² + s²) − d = (2p+1)λ/4`.
//! Under the paraxial approximation `√(d² + s²) − d ≈ s²/(2d)` this gives the
//! closed form `s² = (2p+1)·d·λ/2`; [`refine_exact`] solves the unapproximated
//! condition numerically.

use thiserror::Error;

use crate::channel::Carrier;

/// Closed-form solutions with `distance <= FAR_FIELD_RATIO * spacing` are
/// flagged: the paraxial approximation is no longer trustworthy there.
pub const FAR_FIELD_RATIO: f64 = 10.0;

/// Bisection stops once the bracket is narrower than this, in meters.
pub const ROOT_INTERVAL: f64 = 1e-14;

/// Largest residual accepted from the exact refinement, in meters.
pub const REFINED_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("distance must be positive and finite, got {0} m")]
    Distance(f64),
    #[error("spacing must be positive and finite, got {0} m")]
    Spacing(f64),
    #[error("no root bracketed for p={p} around {variable} = {seed} m; far-field assumption invalid (d={distance} m, s={spacing} m)")]
    NoRoot { p: u32, variable: Vary, seed: f64, distance: f64, spacing: f64 },
    #[error("refinement stalled with residual {0:.3e} m")]
    Stalled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vary {
    Spacing,
    Distance,
}

impl std::fmt::Display for Vary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Vary::Spacing => "spacing",
            Vary::Distance => "distance",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Exact,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSolution {
    pub spacing: f64,
    pub distance: f64,
    pub p: u32,
    pub wavelength: f64,
    /// `√(d² + s²) − d` from exact geometry.
    pub path_difference: f64,
    /// `|path_difference − (2p+1)λ/4|`.
    pub residual: f64,
    pub method: Method,
}

impl DesignSolution {
    fn new(spacing: f64, distance: f64, p: u32, wavelength: f64, method: Method) -> Self {
        let path_difference = path_difference(spacing, distance);
        let residual = (path_difference - target_difference(p, wavelength)).abs();
        Self { spacing, distance, p, wavelength, path_difference, residual, method }
    }

    /// Whether the paraxial approximation behind the closed form holds,
    /// i.e. `distance > 10·spacing`.
    pub fn far_field_ok(&self) -> bool {
        self.distance > FAR_FIELD_RATIO * self.spacing
    }
}

/// Exact `√(d² + s²) − d`, rearranged to avoid cancellation when `s ≪ d`.
pub fn path_difference(spacing: f64, distance: f64) -> f64 {
    spacing * spacing / (distance.hypot(spacing) + distance)
}

/// `(2p+1)·λ/4`.
pub fn target_difference(p: u32, wavelength: f64) -> f64 {
    (2 * p + 1) as f64 * wavelength / 4.0
}

pub fn optimal_spacing(distance: f64, carrier: &Carrier, p: u32) -> Result<DesignSolution, DesignError> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(DesignError::Distance(distance));
    }
    let lam = carrier.wavelength();
    let spacing = ((2 * p + 1) as f64 * distance * lam / 2.0).sqrt();
    Ok(DesignSolution::new(spacing, distance, p, lam, Method::ClosedForm))
}

/// Closed-form distances `d_p = 2s² / ((2p+1)λ)` for `p = 0..=p_max`,
/// longest first. Entries past the far-field guard are still returned.
pub fn optimal_distances(spacing: f64, carrier: &Carrier, p_max: u32) -> Result<Vec<DesignSolution>, DesignError> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(DesignError::Spacing(spacing));
    }
    let lam = carrier.wavelength();
    Ok((0..=p_max)
        .map(|p| {
            let distance = 2.0 * spacing * spacing / ((2 * p + 1) as f64 * lam);
            DesignSolution::new(spacing, distance, p, lam, Method::ClosedForm)
        })
        .collect())
}

/// Solves `√(d² + s²) − d = (2p+1)λ/4` exactly in one variable, holding the
/// other at the seed value. The search is confined to `[seed/2, 2·seed]`,
/// so seeds far from the paraxial regime fail to bracket a root.
pub fn refine_exact(seed: &DesignSolution, carrier: &Carrier, vary: Vary) -> Result<DesignSolution, DesignError> {
    let lam = carrier.wavelength();
    let current = DesignSolution::new(seed.spacing, seed.distance, seed.p, lam, Method::Exact);
    if current.residual < REFINED_RESIDUAL {
        return Ok(current);
    }
    let target = target_difference(seed.p, lam);
    let (x0, f): (f64, Box<dyn Fn(f64) -> f64>) = match vary {
        Vary::Spacing => (seed.spacing, Box::new(|s| path_difference(s, seed.distance) - target)),
        Vary::Distance => (seed.distance, Box::new(|d| path_difference(seed.spacing, d) - target)),
    };
    let no_root = || DesignError::NoRoot {
        p: seed.p,
        variable: vary,
        seed: x0,
        distance: seed.distance,
        spacing: seed.spacing,
    };
    let root = bisect(&f, 0.5 * x0, 2.0 * x0).ok_or_else(no_root)?;
    let refined = match vary {
        Vary::Spacing => DesignSolution::new(root, seed.distance, seed.p, lam, Method::Exact),
        Vary::Distance => DesignSolution::new(seed.spacing, root, seed.p, lam, Method::Exact),
    };
    if refined.residual < REFINED_RESIDUAL {
        Ok(refined)
    } else {
        Err(DesignError::Stalled(refined.residual))
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    while hi - lo > ROOT_INTERVAL {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(lo + 0.5 * (hi - lo))
}
