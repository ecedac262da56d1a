//! Reference solutions computed independently of the simulator.
#![allow(dead_code)]

use mfc_core::plant::{PlantRuntime, StateSpaceSystem};
use nalgebra::{DMatrix, DVector};

/// `exp(M)` by scaling and squaring around a truncated Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm: f64 = m.iter().map(|v| v.abs()).sum();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(squarings);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Exact zero-order-hold discretization `(e^{Ah}, \int_0^h e^{As} ds B)` via the
/// augmented matrix `[[A, B], [0, 0]]`.
pub fn zoh_exact(a: &DMatrix<f64>, b: &DVector<f64>, h: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = a.nrows();
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * h));
    aug.view_mut((0, n), (n, 1)).copy_from(&(b * h));
    let e = expm(&aug);
    (e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, 1)).column(0).into_owned())
}

/// Outputs `y(k h)` for `k = 0..=steps` of a delay-free plant under constant `u`,
/// propagated with the exact discretization.
pub fn exact_response(sys: &StateSpaceSystem, x0: &DVector<f64>, u: f64, h: f64, steps: usize) -> Vec<f64> {
    let (ad, bd) = zoh_exact(sys.a(), sys.b(), h);
    let mut x = x0.clone();
    let mut out = vec![(sys.c() * &x)[0]];
    for _ in 0..steps {
        x = &ad * &x + &bd * u;
        out.push((sys.c() * &x)[0]);
    }
    out
}

/// Method of steps for `x' = A x + A_tau x(t - tau) + B u`, `x = x0` for `t <= 0`.
///
/// Fine RK4 with `tau` an integer multiple of `h`; the history between grid
/// points is cubic Hermite using the stored derivatives. Returns `y(k h)`.
pub fn dde_response(
    sys: &StateSpaceSystem,
    x0: &DVector<f64>,
    u: f64,
    h: f64,
    steps: usize,
) -> Vec<f64> {
    let delay = sys.state_delay().expect("plant with a state delay");
    let lag = (delay.tau / h).round() as usize;
    assert!((lag as f64 * h - delay.tau).abs() < 1e-12 * delay.tau.max(1.0));

    let f = |x: &DVector<f64>, xd: &DVector<f64>| sys.a() * x + &delay.a_tau * xd + sys.b() * u;
    let mut xs: Vec<DVector<f64>> = vec![x0.clone()];
    let mut dxs: Vec<DVector<f64>> = vec![f(x0, x0)];

    // History value at grid index j plus fraction theta of a step.
    let history = |xs: &[DVector<f64>], dxs: &[DVector<f64>], j: isize, theta: f64| -> DVector<f64> {
        if j < 0 {
            return x0.clone();
        }
        let j = j as usize;
        if theta == 0.0 {
            return xs[j].clone();
        }
        let (p0, p1, m0, m1) = (&xs[j], &xs[j + 1], &dxs[j], &dxs[j + 1]);
        let t = theta;
        let h00 = 2.0 * t.powi(3) - 3.0 * t * t + 1.0;
        let h10 = t.powi(3) - 2.0 * t * t + t;
        let h01 = -2.0 * t.powi(3) + 3.0 * t * t;
        let h11 = t.powi(3) - t * t;
        p0 * h00 + m0 * (h10 * h) + p1 * h01 + m1 * (h11 * h)
    };

    for k in 0..steps {
        let j = k as isize - lag as isize;
        let d0 = history(&xs, &dxs, j, 0.0);
        let d_half = history(&xs, &dxs, j, 0.5);
        let d1 = history(&xs, &dxs, j + 1, 0.0);
        let x = xs[k].clone();
        let k1 = f(&x, &d0);
        let k2 = f(&(&x + &k1 * (0.5 * h)), &d_half);
        let k3 = f(&(&x + &k2 * (0.5 * h)), &d_half);
        let k4 = f(&(&x + &k3 * h), &d1);
        let next = &x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        dxs.push(f(&next, &d1));
        xs.push(next);
    }
    // The derivative before t = 0 is zero, so the j = -1 interval is the constant x0.
    xs.iter().map(|x| (sys.c() * x)[0]).collect()
}

/// Open-loop outputs `y(k ts)` for `k = 0..=steps` from the simulator itself.
pub fn simulate(sys: &StateSpaceSystem, x0: Option<DVector<f64>>, u: f64, ts: f64, steps: usize) -> Vec<f64> {
    let bank = vec![sys.clone()];
    let capacity = sys.state_delay().map_or(0.0, |d| d.tau).max(sys.output_delay());
    let mut rt = PlantRuntime::new(&bank, 0, x0, capacity).expect("valid runtime");
    let mut out = vec![rt.measure(&bank).expect("measure")];
    for _ in 0..steps {
        out.push(rt.zoh_step(&bank, u, ts).expect("finite step"));
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Step error of a first-order plant `1/(tau_c s + 1)` against `1 - e^{-t/tau_c}`.
pub fn first_order_step_error(tau_c: f64, ts: f64, horizon: f64) -> f64 {
    let sys = StateSpaceSystem::first_order("first-order", 1.0 / tau_c, 1.0 / tau_c).unwrap();
    let steps = (horizon / ts).round() as usize;
    let y = simulate(&sys, None, 1.0, ts, steps);
    y.iter()
        .enumerate()
        .map(|(k, v)| (v - (1.0 - (-(k as f64) * ts / tau_c).exp())).abs())
        .fold(0.0, f64::max)
}
