//! Closed-form radial free wave in three dimensions. With `ψ(s) = s·u0(|s|)`
//! and `χ(s) = s·u1(|s|)` (odd extensions), `w = r u` is
//! `½[ψ(r+t) + ψ(r-t)] + ½∫_{r-t}^{r+t} χ`.

use serde::{Deserialize, Serialize};

use super::data::{InitialData, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub u: f64,
    pub u_r: f64,
    pub u_t: f64,
    pub w: f64,
    pub w_r: f64,
    pub w_t: f64,
}

struct Odd<'a>(&'a Profile);

impl Odd<'_> {
    fn f(&self, s: f64) -> f64 {
        s * self.0.value(s.abs())
    }

    fn d1(&self, s: f64) -> f64 {
        let a = s.abs();
        self.0.value(a) + a * self.0.derivative(a)
    }

    fn d2(&self, s: f64) -> f64 {
        let a = s.abs();
        s.signum() * (2.0 * self.0.derivative(a) + a * self.0.second_derivative(a))
    }
}

const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let panels = ((hi - lo).abs() / 0.02).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = lo + (i as f64 + 0.5) * h;
        for (x, wgt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += wgt * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * total
}

/// Exact `(u, u_r, u_t)` and the reduced `(w, w_r, w_t)` of the three-dimensional free wave.
pub fn dalembert_free_d3(data: &InitialData, r: f64, t: f64) -> OracleSample {
    let psi = Odd(&data.u0);
    let chi = Odd(&data.u1);
    let has_velocity = data.u1 != Profile::Zero;
    let (a, b) = (r + t, r - t);

    let mut w = 0.5 * (psi.f(a) + psi.f(b));
    let mut w_r = 0.5 * (psi.d1(a) + psi.d1(b));
    let mut w_t = 0.5 * (psi.d1(a) - psi.d1(b));
    if has_velocity {
        w += 0.5 * integrate(|s| chi.f(s), b, a);
        w_r += 0.5 * (chi.f(a) - chi.f(b));
        w_t += 0.5 * (chi.f(a) + chi.f(b));
    }

    if r == 0.0 {
        let tt = t.abs();
        let u = psi.d1(tt) + if has_velocity { chi.f(t) } else { 0.0 };
        let u_t = psi.d2(t) + if has_velocity { chi.d1(t) } else { 0.0 };
        return OracleSample { u, u_r: 0.0, u_t, w: 0.0, w_r, w_t: 0.0 };
    }
    OracleSample {
        u: w / r,
        u_r: (r * w_r - w) / (r * r),
        u_t: w_t / r,
        w,
        w_r,
        w_t,
    }
}

/// `g₊(η) = -½(ψ'(η) + χ(η))`, the limit of `½(w_t - w_r)(t - η, t)`.
pub fn radiation_free_d3(data: &InitialData, eta: f64) -> f64 {
    -0.5 * (Odd(&data.u0).d1(eta) + Odd(&data.u1).f(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn static_gaussian_at_rest() {
        let data = InitialData::gaussian(1.0, 0.0, 1.0);
        let s = dalembert_free_d3(&data, 0.7, 0.0);
        assert_relative_eq!(s.u, (-0.49f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(s.u_t, 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.u_r, -1.4 * (-0.49f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn textbook_formula() {
        let data = InitialData::gaussian(1.0, 0.0, 1.0);
        let psi = |s: f64| s * (-s * s).exp();
        for &(r, t) in &[(0.5, 1.0), (2.0, 0.3), (3.0, 5.0)] {
            let s = dalembert_free_d3(&data, r, t);
            assert_relative_eq!(s.u, (psi(r + t) + psi(r - t)) / (2.0 * r), max_relative = 1e-14);
        }
    }

    #[test]
    fn origin_limit_is_continuous() {
        let data = InitialData::gaussian(1.0, 0.0, 1.0);
        for &t in &[0.0, 0.4, 1.3, 3.0] {
            let at0 = dalembert_free_d3(&data, 0.0, t);
            let near = dalembert_free_d3(&data, 1e-5, t);
            assert!(at0.u.is_finite());
            assert_relative_eq!(at0.u, near.u, epsilon = 1e-8);
            assert_relative_eq!(at0.u_t, near.u_t, epsilon = 1e-6);
        }
        // u(0, t) = ψ'(t) = (1 - 2t²)e^{-t²}.
        let t: f64 = 1.3;
        assert_relative_eq!(dalembert_free_d3(&data, 0.0, t).u, (1.0 - 2.0 * t * t) * (-t * t).exp(), max_relative = 1e-14);
    }

    #[test]
    fn radiation_of_gaussian() {
        let data = InitialData::gaussian(1.0, 0.0, 1.0);
        assert_relative_eq!(radiation_free_d3(&data, 0.0), -0.5, epsilon = 1e-15);
        for &eta in &[-1.0f64, 0.5, 2.0] {
            let exact = -0.5 * (1.0 - 2.0 * eta * eta) * (-eta * eta).exp();
            assert_relative_eq!(radiation_free_d3(&data, eta), exact, epsilon = 1e-15);
        }
        // ½(w_t - w_r)(t - η, t) is exactly g₊(η) once t ≥ η.
        for &eta in &[0.5, 1.5] {
            let t = 6.0;
            let s = dalembert_free_d3(&data, t - eta, t);
            assert_relative_eq!(0.5 * (s.w_t - s.w_r), radiation_free_d3(&data, eta), epsilon = 1e-13);
        }
    }

    #[test]
    fn velocity_data_solves_wave_equation() {
        let data = InitialData::new(Profile::Zero, Profile::Gaussian { amplitude: 1.0, center: 1.0, width: 0.7 });
        let (r, t, h) = (1.3, 0.8, 1e-3);
        let w = |r: f64, t: f64| dalembert_free_d3(&data, r, t).w;
        let wtt = (w(r, t + h) - 2.0 * w(r, t) + w(r, t - h)) / (h * h);
        let wrr = (w(r + h, t) - 2.0 * w(r, t) + w(r - h, t)) / (h * h);
        assert_relative_eq!(wtt, wrr, epsilon = 1e-5);
        let s0 = dalembert_free_d3(&data, r, 0.0);
        assert_relative_eq!(s0.u_t, data.u1.value(r), max_relative = 1e-12);
        assert_relative_eq!(s0.u, 0.0, epsilon = 1e-15);
    }
}
