#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use steptunnel::PiecewiseConstantPotential;

/// Localized barrier: leads at zero, `n` interfaces, widths in [0.05, 0.5),
/// interior levels in [-50, 80).
pub fn random_barrier<R: Rng>(rng: &mut R, max_interfaces: usize) -> PiecewiseConstantPotential {
    let n = rng.gen_range(1..=max_interfaces);
    let mut x = vec![rng.gen_range(-5.0..5.0)];
    for _ in 1..n {
        let w: f64 = rng.gen_range(0.05..0.5);
        x.push(x[x.len() - 1] + w);
    }
    let mut v = vec![0.0];
    v.extend((1..n).map(|_| rng.gen_range(-50.0..80.0)));
    v.push(0.0);
    PiecewiseConstantPotential::new(x, v).unwrap()
}

/// Transmission by integrating `ψ'' = (V - E) ψ` with classical RK4 from the
/// right lead, where `ψ = e^{iκx}`, back to the left lead.
pub fn rk4_transmission(p: &PiecewiseConstantPotential, energy: f64, step: f64) -> f64 {
    let k = energy.sqrt();
    let bp = p.breakpoints();
    let levels = p.levels();
    let i = Complex64::i();
    let x_end = bp[bp.len() - 1];
    let mut psi = (i * k * x_end).exp();
    let mut dpsi = i * k * psi;
    for r in (1..bp.len()).rev() {
        let (a, b) = (bp[r - 1], bp[r]);
        let q = levels[r] - energy;
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let h = -(b - a) / n as f64;
        for _ in 0..n {
            let f = |y: Complex64, dy: Complex64| (dy, q * y);
            let (k1y, k1d) = f(psi, dpsi);
            let (k2y, k2d) = f(psi + 0.5 * h * k1y, dpsi + 0.5 * h * k1d);
            let (k3y, k3d) = f(psi + 0.5 * h * k2y, dpsi + 0.5 * h * k2d);
            let (k4y, k4d) = f(psi + h * k3y, dpsi + h * k3d);
            psi += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            dpsi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        }
    }
    // ψ = A e^{iκx} + B e^{-iκx} at the first breakpoint
    let x0 = bp[0];
    let a = (psi + dpsi / (i * k)) * 0.5 * (-i * k * x0).exp();
    1.0 / a.norm_sqr()
}

/// Single rectangular barrier transmission, `V0` wide `delta`, `E != V0`.
pub fn single_barrier_t(v0: f64, delta: f64, energy: f64) -> f64 {
    let s = v0 * v0 / (4.0 * energy * (energy - v0));
    let q = (energy - v0).abs().sqrt() * delta;
    if energy > v0 {
        1.0 / (1.0 + s * q.sin().powi(2))
    } else {
        1.0 / (1.0 - s * q.sinh().powi(2))
    }
}
