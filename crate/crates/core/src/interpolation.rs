//! Adaptive piecewise Chebyshev interpolation of expensive scalar functions.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes per accepted piece (Chebyshev points of the second kind, degree 32).
const FINE: usize = 33;
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone)]
struct Piece {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64) -> f64 {
        barycentric(&self.nodes, &self.values, x)
    }
}

/// Barycentric formula for Chebyshev points of the second kind.
fn barycentric(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let last = nodes.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (&xj, &fj)) in nodes.iter().zip(values).enumerate() {
        let d = x - xj;
        if d == 0.0 {
            return fj;
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == last {
            w *= 0.5;
        }
        let w = w / d;
        num += w * fj;
        den += w;
    }
    num / den
}

fn chebyshev_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let m = (count - 1) as f64;
    (0..count)
        .map(|j| {
            let c = (PI * j as f64 / m).cos();
            // ascending order, endpoints hit exactly
            match j {
                0 => a,
                _ if j == count - 1 => b,
                _ => a + 0.5 * (b - a) * (1.0 - c),
            }
        })
        .collect()
}

/// Piecewise interpolant with a guaranteed (sampled) error below `tol`.
#[derive(Debug, Clone)]
pub struct ChebyshevTable {
    pieces: Vec<Piece>,
    tol: f64,
}

impl ChebyshevTable {
    /// Samples `f` on `[a, b]`, bisecting until a degree-16 interpolant
    /// reproduces the interleaved degree-32 nodes to within `tol`; the
    /// degree-32 interpolant is kept.
    pub fn build<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        if !(b > a) {
            return Err(Error::invalid("interpolation interval", format!("[{a}, {b}]")));
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("interpolation tolerance", format!("{tol}")));
        }
        let mut pieces = build_piece(&f, a, b, tol, 0)?;
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        Ok(ChebyshevTable { pieces, tol })
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].a, self.pieces[self.pieces.len() - 1].b)
    }

    /// Piece boundaries in ascending order, both ends included.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pieces.iter().map(|p| p.a).collect();
        out.push(self.pieces[self.pieces.len() - 1].b);
        out
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Evaluates the interpolant; arguments outside the domain are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.b < x);
        let piece = &self.pieces[idx.min(self.pieces.len() - 1)];
        piece.eval(x.clamp(piece.a, piece.b))
    }
}

fn build_piece<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<Vec<Piece>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let nodes = chebyshev_nodes(a, b, FINE);
    let values = nodes
        .par_iter()
        .map(|&x| f(x))
        .collect::<Result<Vec<f64>>>()?;

    let coarse_nodes: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    let coarse_values: Vec<f64> = values.iter().step_by(2).copied().collect();
    let err = nodes
        .iter()
        .zip(&values)
        .skip(1)
        .step_by(2)
        .map(|(&x, &v)| (barycentric(&coarse_nodes, &coarse_values, x) - v).abs())
        .fold(0.0, f64::max);

    if err <= tol {
        return Ok(vec![Piece { a, b, nodes, values }]);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NoConvergence {
            value: values[FINE / 2],
            abs_error: err,
            intervals: 1 << depth.min(30),
        });
    }
    let mid = 0.5 * (a + b);
    let (left, right) = rayon::join(
        || build_piece(f, a, mid, tol, depth + 1),
        || build_piece(f, mid, b, tol, depth + 1),
    );
    let mut out = left?;
    out.extend(right?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let table = ChebyshevTable::build(|x: f64| Ok(x.sin() * (-x).exp()), 0.0, 10.0, 1e-12).unwrap();
        for k in 0..=1000 {
            let x = k as f64 * 0.01;
            assert!((table.eval(x) - x.sin() * (-x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn refines_near_sharp_feature() {
        let f = |x: f64| 0.15 * (1.0 + 1e4 * x * x).ln();
        let table = ChebyshevTable::build(|x| Ok(f(x)), 0.0, 2.0 * PI, 1e-11).unwrap();
        assert!(table.len() > 1);
        let bps = table.breakpoints();
        assert_eq!(bps[0], 0.0);
        assert_eq!(*bps.last().unwrap(), 2.0 * PI);
        for k in 0..=5000 {
            let x = 2.0 * PI * k as f64 / 5000.0;
            assert!((table.eval(x) - f(x)).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn propagates_sample_errors() {
        let res = ChebyshevTable::build(
            |x| if x > 0.5 { Err(Error::invalid("x", "boom")) } else { Ok(x) },
            0.0,
            1.0,
            1e-6,
        );
        assert!(res.is_err());
    }
}
