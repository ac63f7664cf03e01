//! Uniform radial grid `r_j = j·dr`, shell quadrature in the `d`-dimensional
//! measure, and off-grid interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::sphere_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub d: u32,
    pub dr: f64,
    /// Index of the last node; the grid has `n + 1` nodes.
    pub n: usize,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(d: u32, n: usize, r_max: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidConfig(format!("grid needs at least 4 cells, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidConfig(format!("r_max = {r_max} must be positive and finite")));
        }
        Ok(Self {
            d,
            dr: r_max / n as f64,
            n,
            r_max,
        })
    }

    /// Same outer radius with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self::new(self.d, self.n * factor, self.r_max).expect("refinement of a valid grid")
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        j as f64 * self.dr
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |j| self.r(j))
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }

    pub fn c_d(&self) -> f64 {
        sphere_area(self.d)
    }

    pub fn check_range(&self, lo: f64, hi: f64) -> Result<()> {
        let slack = 1e-12 * self.r_max;
        if lo < -slack || hi > self.r_max + slack || lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::RangeOutsideGrid {
                lo,
                hi,
                r_max: self.r_max,
            });
        }
        Ok(())
    }

    /// Cell index `j` with `r_j ≤ r < r_{j+1}` and the fractional offset, clamped to the last cell.
    #[inline]
    fn locate(&self, r: f64) -> (usize, f64) {
        let x = (r / self.dr).max(0.0);
        let j = (x.floor() as usize).min(self.n - 1);
        (j, x - j as f64)
    }
}

/// A section of the light cone `|x| = t - η` between two times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSection {
    pub eta: f64,
    pub t1: f64,
    pub t2: f64,
}

impl ConeSection {
    pub fn new(eta: f64, t1: f64, t2: f64) -> Result<Self> {
        if !(t1 >= eta) {
            return Err(Error::InvalidConfig(format!("cone section starts at t1 = {t1} < eta = {eta}")));
        }
        if !(t2 > t1) {
            return Err(Error::InvalidConfig(format!("cone section needs t2 > t1, got [{t1}, {t2}]")));
        }
        Ok(Self { eta, t1, t2 })
    }

    pub fn radius_at(&self, t: f64) -> f64 {
        t - self.eta
    }
}

/// `∫_{lo}^{hi} g(r) dr` for nodal samples `g`, trapezoidal with linear
/// reconstruction inside the two partial end cells.
pub fn line_integral(grid: &RadialGrid, g: &[f64], lo: f64, hi: f64) -> Result<f64> {
    grid.check_range(lo, hi)?;
    debug_assert_eq!(g.len(), grid.len());
    Ok(line_integral_with(grid, lo, hi, |j| g[j]))
}

/// [`line_integral`] over a node function evaluated on demand. The range is clamped to the grid.
#[inline]
pub fn line_integral_with(grid: &RadialGrid, lo: f64, hi: f64, g: impl Fn(usize) -> f64) -> f64 {
    let lo = lo.clamp(0.0, grid.r_max);
    let hi = hi.clamp(0.0, grid.r_max);
    if hi <= lo {
        return 0.0;
    }
    let dr = grid.dr;
    let (ja, fa) = grid.locate(lo);
    let (jb, fb) = grid.locate(hi);
    let lin = |j: usize, f: f64| {
        let (a, b) = (g(j), g(j + 1));
        a + f * (b - a)
    };
    if ja == jb {
        return 0.5 * (lin(ja, fa) + lin(jb, fb)) * (fb - fa) * dr;
    }
    let mut total = 0.5 * (lin(ja, fa) + g(ja + 1)) * (1.0 - fa);
    let mut inner = 0.0;
    for j in ja + 1..jb {
        inner += g(j) + g(j + 1);
    }
    total += 0.5 * inner;
    total += 0.5 * (g(jb) + lin(jb, fb)) * fb;
    total * dr
}

/// `∫_{lo}^{hi} h dr` where `h` is constant on each cell `[r_j, r_{j+1}]`.
pub fn cell_integral(grid: &RadialGrid, h: &[f64], lo: f64, hi: f64) -> Result<f64> {
    grid.check_range(lo, hi)?;
    debug_assert_eq!(h.len(), grid.n);
    Ok(cell_integral_with(grid, lo, hi, |j| h[j]))
}

/// [`cell_integral`] over a cell function evaluated on demand. The range is clamped to the grid.
#[inline]
pub fn cell_integral_with(grid: &RadialGrid, lo: f64, hi: f64, h: impl Fn(usize) -> f64) -> f64 {
    let lo = lo.clamp(0.0, grid.r_max);
    let hi = hi.clamp(0.0, grid.r_max);
    if hi <= lo {
        return 0.0;
    }
    let (ja, fa) = grid.locate(lo);
    let (jb, fb) = grid.locate(hi);
    if ja == jb {
        return h(ja) * (fb - fa) * grid.dr;
    }
    let mut total = h(ja) * (1.0 - fa) + h(jb) * fb;
    for j in ja + 1..jb {
        total += h(j);
    }
    total * grid.dr
}

/// `c_d ∫_{r_a}^{r_b} f(r) r^{d-1} dr` for nodal samples of a radial `f`.
pub fn shell_integral(grid: &RadialGrid, f: &[f64], r_a: f64, r_b: f64) -> Result<f64> {
    let k = grid.d as i32 - 1;
    let g: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(j, v)| if *v == 0.0 { 0.0 } else { v * grid.r(j).powi(k) })
        .collect();
    Ok(grid.c_d() * line_integral(grid, &g, r_a, r_b)?)
}

/// Value at `r` by 4-point Lagrange interpolation on the surrounding nodes,
/// linear in the first and last cells.
pub fn interpolate(grid: &RadialGrid, samples: &[f64], r: f64) -> Result<f64> {
    grid.check_range(r, r)?;
    Ok(interpolate_unchecked(grid, samples, r))
}

#[inline]
pub(crate) fn interpolate_unchecked(grid: &RadialGrid, s: &[f64], r: f64) -> f64 {
    let (j, x) = grid.locate(r);
    if j == 0 || j + 2 > grid.n {
        return s[j] + x * (s[j + 1] - s[j]);
    }
    // Nodes at offsets -1, 0, 1, 2 relative to j.
    let (xm, x0, x1, x2) = (x + 1.0, x, x - 1.0, x - 2.0);
    let lm = -x0 * x1 * x2 / 6.0;
    let l0 = xm * x1 * x2 / 2.0;
    let l1 = -xm * x0 * x2 / 2.0;
    let l2 = xm * x0 * x1 / 6.0;
    lm * s[j - 1] + l0 * s[j] + l1 * s[j + 1] + l2 * s[j + 2]
}

/// Interpolated value and radial derivative at `r`. Nodal derivatives are
/// centered differences (one-sided second order at the ends).
pub fn value_and_slope(grid: &RadialGrid, s: &[f64], r: f64) -> (f64, f64) {
    let n = grid.n;
    let inv = 0.5 / grid.dr;
    let slope = |j: usize| {
        if j == 0 {
            (-3.0 * s[0] + 4.0 * s[1] - s[2]) * inv
        } else if j == n {
            (3.0 * s[n] - 4.0 * s[n - 1] + s[n - 2]) * inv
        } else {
            (s[j + 1] - s[j - 1]) * inv
        }
    };
    let (j, x) = grid.locate(r);
    if j == 0 || j + 2 > n {
        let v = s[j] + x * (s[j + 1] - s[j]);
        let d = slope(j) + x * (slope(j + 1) - slope(j));
        return (v, d);
    }
    let (xm, x0, x1, x2) = (x + 1.0, x, x - 1.0, x - 2.0);
    let l = [-x0 * x1 * x2 / 6.0, xm * x1 * x2 / 2.0, -xm * x0 * x2 / 2.0, xm * x0 * x1 / 6.0];
    let mut v = 0.0;
    let mut d = 0.0;
    for (i, li) in l.iter().enumerate() {
        let node = j + i - 1;
        v += li * s[node];
        d += li * slope(node);
    }
    (v, d)
}

/// Integrals of a radial field `u` in physical variables, each carrying the
/// `c_d r^{d-1}` measure. None is square-rooted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `∫ u²`
    pub l2: f64,
    /// `∫ u_r²`
    pub h1_dot: f64,
    /// `∫ |u|^{p+1}`
    pub lp1: f64,
    /// `∫ u²/r²`
    pub hardy_term: f64,
}

pub fn norms(grid: &RadialGrid, u: &[f64], p: f64) -> Norms {
    let d = grid.d as i32;
    let dr = grid.dr;
    let c_d = grid.c_d();
    let rmax = grid.r_max;

    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let pw: Vec<f64> = u.iter().map(|v| v.abs().powf(p + 1.0)).collect();
    let l2 = shell_integral(grid, &sq, 0.0, rmax).unwrap_or(0.0);
    let lp1 = shell_integral(grid, &pw, 0.0, rmax).unwrap_or(0.0);

    let mut h1_dot = 0.0;
    for j in 0..grid.n {
        let slope = (u[j + 1] - u[j]) / dr;
        h1_dot += slope * slope * ((j as f64 + 0.5) * dr).powi(d - 1);
    }
    h1_dot *= c_d * dr;

    // The first cell takes u(r_1)² over the weight ∫_0^{r_1} r^{d-3} dr.
    let r1 = dr;
    let mut hardy = sq[1] * r1.powi(d - 2) / (d as f64 - 2.0);
    let g: Vec<f64> = (0..=grid.n)
        .map(|j| if j == 0 { 0.0 } else { sq[j] * grid.r(j).powi(d - 3) })
        .collect();
    hardy += line_integral(grid, &g, r1, rmax).unwrap_or(0.0);

    Norms {
        l2,
        h1_dot,
        lp1,
        hardy_term: c_d * hardy,
    }
}
