//! Time evolution `ψ(t + dt) = e^{-iH dt} ψ(t)` by Chebyshev expansion (default)
//! or Lanczos/Krylov projection.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::SparseHermitianOperator;

type C64 = Complex64;

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-6;
/// Largest Krylov space tried before reporting non-convergence.
pub const MAX_KRYLOV_DIM: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Chebyshev,
    Lanczos,
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(invalid("tol", format!("must lie in [{MIN_TOL:e}, {MAX_TOL:e}]")));
    }
    Ok(())
}

/// `J_0(x) ..= J_{n_max}(x)` for `x >= 0` by Miller's backward recurrence,
/// normalized with `J_0 + 2 Σ J_{2m} = 1`.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j_sequence needs finite x >= 0");
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 20 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let (mut j_next, mut j_cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{k-1}
        let n = k - 1;
        if n <= n_max {
            out[n] = j_cur;
        }
        if n % 2 == 0 && n > 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            let s = 1e-250;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Fixed-step Chebyshev propagator. The spectrum is enclosed by Gershgorin
/// discs, so the truncation bound holds for every state.
pub struct ChebyshevPropagator<'a> {
    h: &'a SparseHermitianOperator,
    center: f64,
    half_width: f64,
    coeffs: Vec<C64>,
    phase: C64,
    /// Bound on the dropped coefficients, an upper bound of the local error.
    tail: f64,
    buf: [Vec<C64>; 3],
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(h: &'a SparseHermitianOperator, dt: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(invalid("dt", "must be finite and nonzero"));
        }
        let (lo, hi) = h.gershgorin_bounds();
        let center = 0.5 * (lo + hi);
        let half_width = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-12;
        let x = half_width * dt.abs();
        let n_big = (1.5 * x).ceil() as usize + 80;
        let j = bessel_j_sequence(x, n_big);
        // smallest order beyond which the coefficient tail drops below tol/10
        let mut tail = 0.0;
        let mut m = n_big;
        while m > 1 {
            let next = tail + 2.0 * j[m].abs();
            if next > 0.1 * tol {
                break;
            }
            tail = next;
            m -= 1;
        }
        let rot = C64::new(0.0, -dt.signum());
        let mut coeffs = Vec::with_capacity(m + 1);
        let mut pow = C64::new(1.0, 0.0);
        for (n, &jn) in j.iter().enumerate().take(m + 1) {
            coeffs.push(if n == 0 { C64::from(jn) } else { pow * (2.0 * jn) });
            pow *= rot;
        }
        let dim = h.dim();
        let zero = C64::new(0.0, 0.0);
        Ok(Self {
            h,
            center,
            half_width,
            coeffs,
            phase: C64::from_polar(1.0, -center * dt),
            tail,
            buf: [vec![zero; dim], vec![zero; dim], vec![zero; dim]],
        })
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn error_bound(&self) -> f64 {
        self.tail
    }

    pub fn step(&mut self, psi: &mut [C64]) -> Result<()> {
        let scale = 1.0 / self.half_width;
        let [p0, p1, p2] = &mut self.buf;
        p0.copy_from_slice(psi);
        for (a, &x) in psi.iter_mut().zip(p0.iter()) {
            *a = x * self.coeffs[0];
        }
        if self.coeffs.len() > 1 {
            self.h.apply_shifted(p0, p1, self.center, scale);
            let c = self.coeffs[1];
            for (a, &x) in psi.iter_mut().zip(p1.iter()) {
                *a += x * c;
            }
        }
        for &c in self.coeffs.iter().skip(2) {
            self.h.apply_shifted(p1, p2, self.center, 2.0 * scale);
            for ((a, y), &x0) in psi.iter_mut().zip(p2.iter_mut()).zip(p0.iter()) {
                *y -= x0;
                *a += *y * c;
            }
            std::mem::swap(p0, p1);
            std::mem::swap(p1, p2);
        }
        let mut norm = 0.0;
        for a in psi.iter_mut() {
            *a *= self.phase;
            norm += a.norm_sqr();
        }
        if !norm.is_finite() {
            return Err(Error::NonConvergence {
                step: 0,
                residual: f64::INFINITY,
                tol: self.tail,
            });
        }
        Ok(())
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// One Krylov step with full reorthogonalization. Returns the propagated
/// state and the a-posteriori error estimate `‖ψ‖ β_m |(e^{-iT dt} e_1)_m|`.
pub fn lanczos_step(h: &SparseHermitianOperator, psi: &[C64], dt: f64, tol: f64) -> Result<(Vec<C64>, f64)> {
    check_tol(tol)?;
    let beta0 = norm(psi);
    if beta0 == 0.0 {
        return Ok((psi.to_vec(), 0.0));
    }
    let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|x| x / beta0).collect()];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut w = vec![C64::new(0.0, 0.0); psi.len()];
    loop {
        let j = basis.len() - 1;
        h.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for v in &basis {
            let c = dot(v, &w);
            for (x, y) in w.iter_mut().zip(v) {
                *x -= c * y;
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        // y = V e^{-iΛ dt} V^T e_1
        let y: Vec<C64> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|s| {
                        let v = eig.eigenvectors[(r, s)] * eig.eigenvectors[(0, s)];
                        C64::from_polar(v, -eig.eigenvalues[s] * dt)
                    })
                    .sum()
            })
            .collect();
        let estimate = beta0 * b * y[m - 1].norm();
        let exhausted = b <= 1e-14 * beta0.max(1.0);
        if estimate <= tol || exhausted {
            let mut out = vec![C64::new(0.0, 0.0); psi.len()];
            for (v, c) in basis.iter().zip(&y) {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += c * x * beta0;
                }
            }
            return Ok((out, estimate));
        }
        if m >= MAX_KRYLOV_DIM.min(psi.len()) {
            return Err(Error::NonConvergence {
                step: 0,
                residual: estimate,
                tol,
            });
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

/// Stepper over either method, reporting the failing step on non-convergence.
pub struct Propagator<'a> {
    h: &'a SparseHermitianOperator,
    method: Method,
    dt: f64,
    tol: f64,
    chebyshev: Option<ChebyshevPropagator<'a>>,
    steps: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a SparseHermitianOperator, method: Method, dt: f64, tol: f64) -> Result<Self> {
        check_tol(tol)?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(invalid("dt", "must be finite and nonzero"));
        }
        let chebyshev = match method {
            Method::Chebyshev => Some(ChebyshevPropagator::new(h, dt, tol)?),
            Method::Lanczos => None,
        };
        Ok(Self {
            h,
            method,
            dt,
            tol,
            chebyshev,
            steps: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn step(&mut self, psi: &mut [C64]) -> Result<()> {
        self.steps += 1;
        let step = self.steps;
        let tag = |e: Error| match e {
            Error::NonConvergence { residual, tol, .. } => Error::NonConvergence { step, residual, tol },
            other => other,
        };
        match &mut self.chebyshev {
            Some(c) => c.step(psi).map_err(tag),
            None => {
                let (out, _) = lanczos_step(self.h, psi, self.dt, self.tol).map_err(tag)?;
                psi.copy_from_slice(&out);
                Ok(())
            }
        }
    }
}

/// Trajectory `[(0, ψ0), (dt, ψ(dt)), …]` up to `t_total`; a final shorter
/// step lands exactly on `t_total`.
pub fn propagate(
    h: &SparseHermitianOperator,
    psi: &[C64],
    dt: f64,
    t_total: f64,
    tol: f64,
) -> Result<Vec<(f64, Vec<C64>)>> {
    propagate_with(h, psi, dt, t_total, tol, Method::Chebyshev)
}

pub fn propagate_with(
    h: &SparseHermitianOperator,
    psi: &[C64],
    dt: f64,
    t_total: f64,
    tol: f64,
    method: Method,
) -> Result<Vec<(f64, Vec<C64>)>> {
    if psi.len() != h.dim() {
        return Err(invalid("psi", "length differs from the operator dimension"));
    }
    if !(dt > 0.0 && t_total >= 0.0 && t_total.is_finite()) {
        return Err(invalid("dt", "need dt > 0 and finite t_total >= 0"));
    }
    let full = (t_total / dt + 1e-9).floor() as usize;
    let rest = t_total - full as f64 * dt;
    let mut out = vec![(0.0, psi.to_vec())];
    let mut state = psi.to_vec();
    let mut prop = Propagator::new(h, method, dt, tol)?;
    for i in 1..=full {
        prop.step(&mut state)?;
        out.push((i as f64 * dt, state.clone()));
    }
    if rest > 1e-9 * dt {
        Propagator::new(h, method, rest, tol)?.step(&mut state)?;
        out.push((t_total, state));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// J_n(x) = (1/π) ∫_0^π cos(nτ - x sin τ) dτ by the trapezoid rule, which
    /// converges geometrically for this periodic integrand.
    fn bessel_quadrature(n: usize, x: f64) -> f64 {
        let m = 4000;
        let h = std::f64::consts::PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for i in 1..m {
            s += f(i as f64 * h);
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn bessel_values() {
        let j = bessel_j_sequence(1.0, 5);
        assert!((j[0] - 0.7651976865579666).abs() < 1e-15);
        assert!((j[1] - 0.4400505857449335).abs() < 1e-15);
        for x in [0.3, 2.5, 17.0, 80.0] {
            let j = bessel_j_sequence(x, 120);
            for n in [0, 1, 2, 7, 30, 60, 100] {
                assert!((j[n] - bessel_quadrature(n, x)).abs() < 1e-12, "n={n} x={x}");
            }
        }
        assert_eq!(bessel_j_sequence(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
    }

    fn ring(n: usize) -> SparseHermitianOperator {
        let mut e: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, -1.0)).collect();
        e.push((0, n - 1, -1.0));
        e.push((3, 3, 0.7));
        SparseHermitianOperator::from_real_upper(n, e).unwrap()
    }

    fn exact(h: &SparseHermitianOperator, psi: &[C64], t: f64) -> Vec<C64> {
        let d = h.to_dense_real().unwrap();
        let eig = SymmetricEigen::new(d);
        let v = &eig.eigenvectors;
        let n = psi.len();
        let proj: Vec<C64> = (0..n).map(|s| (0..n).map(|r| psi[r] * v[(r, s)]).sum()).collect();
        (0..n)
            .map(|r| (0..n).map(|s| proj[s] * v[(r, s)] * C64::from_polar(1.0, -eig.eigenvalues[s] * t)).sum())
            .collect()
    }

    #[test]
    fn both_methods_match_dense_exponential() {
        let h = ring(24);
        let mut psi = vec![C64::new(0.0, 0.0); 24];
        psi[2] = C64::new(0.6, 0.0);
        psi[5] = C64::new(0.0, 0.8);
        for method in [Method::Chebyshev, Method::Lanczos] {
            let traj = propagate_with(&h, &psi, 0.3, 2.0, 1e-12, method).unwrap();
            assert_eq!(traj.len(), 8);
            assert!((traj.last().unwrap().0 - 2.0).abs() < 1e-15);
            let want = exact(&h, &psi, 2.0);
            let got = &traj.last().unwrap().1;
            let err: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-10, "{method:?}: {err}");
        }
    }

    #[test]
    fn backward_step_inverts_forward() {
        let h = ring(30);
        let mut psi = vec![C64::new(0.0, 0.0); 30];
        psi[7] = C64::new(1.0, 0.0);
        let orig = psi.clone();
        ChebyshevPropagator::new(&h, 3.0, 1e-12).unwrap().step(&mut psi).unwrap();
        ChebyshevPropagator::new(&h, -3.0, 1e-12).unwrap().step(&mut psi).unwrap();
        let fidelity = dot(&orig, &psi).norm_sqr();
        assert!((1.0 - fidelity).abs() < 1e-12);
    }

    #[test]
    fn lanczos_reports_nonconvergence() {
        let h = ring(200);
        let psi: Vec<C64> = (0..200).map(|i| C64::new(((i * 7) % 13) as f64, 0.0)).collect();
        match Propagator::new(&h, Method::Lanczos, 80.0, 1e-12).unwrap().step(&mut psi.clone()) {
            Err(Error::NonConvergence { step, residual, .. }) => {
                assert_eq!(step, 1);
                assert!(residual > 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerance_window_enforced() {
        let h = ring(5);
        assert!(Propagator::new(&h, Method::Chebyshev, 0.1, 1e-3).is_err());
        assert!(Propagator::new(&h, Method::Chebyshev, 0.1, 1e-13).is_err());
    }
}
