//! Central finite differences with one level of Richardson extrapolation.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;

/// Step for first derivatives at a point of Euclidean norm `norm`.
pub fn first_step(norm: f64) -> f64 {
    1e-5 * norm.max(1.0)
}

/// Step for second derivatives at a point of Euclidean norm `norm`.
pub fn second_step(norm: f64) -> f64 {
    1e-4 * norm.max(1.0).sqrt()
}

pub fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn shifted(p: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[axis] += delta;
    q
}

/// Plain central difference of a scalar function along one axis.
pub fn central<F>(f: &F, p: &[f64], axis: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    Ok((f(&shifted(p, axis, h))? - f(&shifted(p, axis, -h))?) / (2.0 * h))
}

/// Fourth-order partial derivative: Richardson combination of central
/// differences at `h` and `h/2`.
pub fn partial<F>(f: &F, p: &[f64], axis: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let coarse = central(f, p, axis, h)?;
    let fine = central(f, p, axis, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Componentwise fourth-order partial derivative of a vector-valued function.
pub fn partial_vec<F>(f: &F, p: &[f64], axis: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let diff = |step: f64| -> Result<Vec<f64>> {
        let plus = f(&shifted(p, axis, step))?;
        let minus = f(&shifted(p, axis, -step))?;
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b) / (2.0 * step))
            .collect())
    };
    let coarse = diff(h)?;
    let fine = diff(0.5 * h)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

pub fn gradient<F>(f: &F, p: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..p.len()).map(|i| partial(f, p, i, h)).collect()
}

/// Symmetric matrix of second partials, row-major.
pub fn hessian<F>(f: &F, p: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = p.len();
    let f0 = f(p)?;
    let second = |i: usize, j: usize, s: f64| -> Result<f64> {
        if i == j {
            let plus = f(&shifted(p, i, s))?;
            let minus = f(&shifted(p, i, -s))?;
            Ok((plus - 2.0 * f0 + minus) / (s * s))
        } else {
            let at = |si: f64, sj: f64| f(&shifted(&shifted(p, i, si), j, sj));
            Ok((at(s, s)? - at(s, -s)? - at(-s, s)? + at(-s, -s)?) / (4.0 * s * s))
        }
    };
    let mut out = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let coarse = second(i, j, h)?;
            let fine = second(i, j, 0.5 * h)?;
            let v = (4.0 * fine - coarse) / 3.0;
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(out)
}
