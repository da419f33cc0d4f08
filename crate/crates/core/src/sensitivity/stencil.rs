//! Central finite-difference stencils and their tensor products.

use super::SensitivityError;

/// Offsets (in steps) and weights of the pure central stencils, before division by `h^order`.
fn pure_stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => &[],
    }
}

/// Largest offset the stencil of `order` reaches, in steps.
pub fn reach(order: usize) -> f64 {
    if order >= 3 {
        2.0
    } else {
        1.0
    }
}

/// Default step for an `order`-th derivative at `x`.
///
/// First order uses `max(1e-6, 1e-4 |x|)`. Higher orders divide round-off by
/// `h^2` or `h^3`, so they use proportionally larger steps.
pub fn default_step(x: f64, order: usize) -> f64 {
    let (abs, rel): (f64, f64) = match order {
        0 | 1 => (1e-6, 1e-4),
        2 => (1e-4, 1e-3),
        _ => (1e-3, 1e-2),
    };
    abs.max(rel * x.abs())
}

/// One differentiation axis: coordinate index, order along it, step.
#[derive(Debug, Clone, Copy)]
pub struct Axis {
    pub index: usize,
    pub order: usize,
    pub step: f64,
}

/// Tensor product of pure central stencils along each axis.
///
/// Axes must be distinct coordinates. With a single axis this is the plain
/// central difference of that order; with two or three order-1 axes it is
/// the 4-point / 8-point cross stencil.
pub fn tensor_difference<F>(f: F, point: &[f64], axes: &[Axis]) -> Result<f64, SensitivityError>
where
    F: Fn(&[f64]) -> f64,
{
    for (i, ax) in axes.iter().enumerate() {
        if ax.index >= point.len() {
            return Err(SensitivityError::BadVariable(format!(
                "coordinate {} out of range for a {}-dimensional point",
                ax.index,
                point.len()
            )));
        }
        if !(1..=3).contains(&ax.order) {
            return Err(SensitivityError::InvalidOrder(ax.order));
        }
        if !(ax.step.is_finite() && ax.step > 0.0) {
            return Err(SensitivityError::InvalidStep(ax.step));
        }
        if axes[..i].iter().any(|a| a.index == ax.index) {
            return Err(SensitivityError::BadVariable(
                "differentiation axes must be distinct".into(),
            ));
        }
    }
    if axes.is_empty() {
        return Err(SensitivityError::InvalidOrder(0));
    }

    let stencils: Vec<&[(f64, f64)]> = axes.iter().map(|a| pure_stencil(a.order)).collect();
    let mut counters = vec![0usize; axes.len()];
    let mut shifted = point.to_vec();
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for (k, ax) in axes.iter().enumerate() {
            let (offset, w) = stencils[k][counters[k]];
            shifted[ax.index] = point[ax.index] + offset * ax.step;
            weight *= w;
        }
        if weight != 0.0 {
            let value = f(&shifted);
            if !value.is_finite() {
                return Err(SensitivityError::NonFinite { point: shifted.clone() });
            }
            total += weight * value;
        }
        // odometer over stencil entries
        let mut k = 0;
        loop {
            if k == axes.len() {
                let scale: f64 = axes.iter().map(|a| a.step.powi(a.order as i32)).product();
                return Ok(total / scale);
            }
            counters[k] += 1;
            if counters[k] < stencils[k].len() {
                break;
            }
            counters[k] = 0;
            k += 1;
        }
    }
}

/// Central difference of a scalar function.
///
/// Order 1: `(f(x+h) - f(x-h)) / 2h`; order 2: `(f(x+h) - 2f(x) + f(x-h)) / h^2`;
/// order 3: `(f(x+2h) - 2f(x+h) + 2f(x-h) - f(x-2h)) / 2h^3`.
pub fn central_difference<F>(f: F, x: f64, order: usize, step: Option<f64>) -> Result<f64, SensitivityError>
where
    F: Fn(f64) -> f64,
{
    let step = step.unwrap_or_else(|| default_step(x, order));
    tensor_difference(|p: &[f64]| f(p[0]), &[x], &[Axis { index: 0, order, step }])
}

/// Mixed partial over 2 or 3 distinct coordinates (4-point / 8-point cross stencils).
pub fn mixed_difference<F>(f: F, point: &[f64], vars: &[usize], step: Option<f64>) -> Result<f64, SensitivityError>
where
    F: Fn(&[f64]) -> f64,
{
    if !(2..=3).contains(&vars.len()) {
        return Err(SensitivityError::BadVariable(
            "mixed differences take 2 or 3 variables".into(),
        ));
    }
    let order = vars.len();
    let axes: Vec<Axis> = vars
        .iter()
        .map(|&index| Axis {
            index,
            order: 1,
            step: step.unwrap_or_else(|| default_step(point.get(index).copied().unwrap_or(0.0), order)),
        })
        .collect();
    tensor_difference(f, point, &axes)
}
