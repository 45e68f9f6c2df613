//! Internal adaptive quadrature tuned to the exponential-tail outage
//! integrals. Not a general-purpose integrator.
//!
//! Semi-infinite axes are mapped through `x = s*t/(1-t)` with `s` equal to
//! the mean of the corresponding exponential factor, which conditions the
//! integrand well, and the transformed integral over `[0, 1]` is refined by
//! adaptive bisection with a 15-point Gauss-Kronrod rule per panel.

// rule constants carried at the precision of the published tables
#![allow(clippy::excessive_precision)]

/// Kronrod abscissae for the 15-point rule (non-negative half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Embedded 7-point Gauss weights (for the odd-index abscissae of `XGK`).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Hard cap on integrand evaluations per axis.
pub const MAX_EVALS_PER_AXIS: usize = 1 << 15;

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum QuadFailure {
    /// Error estimate still above the requested tolerance at the eval cap.
    NoConvergence { achieved_rel_err: f64, evals: usize },
    /// The integrand produced NaN or infinity.
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// 15-point Gauss-Kronrod rule on `[a, b]`; the error estimate is the scaled
/// discrepancy between the Kronrod and embedded Gauss results.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadFailure> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    for (k, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1 + f2;
        kronrod += WGK[k] * sum;
        if k % 2 == 1 {
            gauss += WG[k / 2] * sum;
        }
    }
    if !kronrod.is_finite() {
        return Err(QuadFailure::NonFinite);
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Ok(Panel { a, b, value, err })
}

/// Adaptively integrates `f` over `[0, 1]` to the requested relative
/// tolerance, bisecting the panel with the largest error estimate until the
/// budget runs out.
pub fn integrate_unit<F: Fn(f64) -> f64>(
    f: F,
    rel_tol: f64,
    max_evals: usize,
) -> Result<QuadResult, QuadFailure> {
    let mut panels = vec![gk15(&f, 0.0, 1.0)?];
    let mut evals = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = rel_tol * total.abs().max(f64::MIN_POSITIVE);
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_err: err,
                evals,
            });
        }
        if evals + 30 > max_evals {
            return Err(QuadFailure::NoConvergence {
                achieved_rel_err: err / total.abs().max(f64::MIN_POSITIVE),
                evals,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        panels.push(gk15(&f, a, mid)?);
        panels.push(gk15(&f, mid, b)?);
        evals += 30;
    }
}

/// Integrates `f` over `[0, inf)` via the mean-scaled substitution
/// `x = scale*t/(1-t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    scale: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<QuadResult, QuadFailure> {
    debug_assert!(scale > 0.0);
    integrate_unit(
        move |t| {
            // the rule never samples panel endpoints, so t < 1 always
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = scale * t / one_minus;
            let jac = scale / (one_minus * one_minus);
            f(x) * jac
        },
        rel_tol,
        max_evals,
    )
}
