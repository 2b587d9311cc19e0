//! Single-particle transmission through an [`ImpurityChain`]: closed form,
//! Green's-function trace, and plane-wave matching.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::effective::{ImpurityChain, PairKind};
use crate::error::{invalid, Error, Result};

type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmissionResult {
    pub k: f64,
    pub energy: f64,
    /// Only the plane-wave method produces amplitudes.
    pub r_amp: Option<C64>,
    pub t_amp: Option<C64>,
    pub transmission: f64,
    pub reflection: f64,
}

fn check_momentum(k: f64) -> Result<()> {
    if !(k > 0.0 && k < std::f64::consts::PI) {
        return Err(Error::MomentumDomain {
            k,
            reason: "incident momentum must lie strictly inside (0, π)",
        });
    }
    Ok(())
}

/// Lead wavevector whose plane wave `e^{iql}` carries positive flux.
///
/// The lead band is `E = 2 t cos q` with velocity `-2 t sin q`; for the
/// physical sign `t = -κ < 0` this is just `k`.
fn lead_wavevector(lead_hopping: f64, k: f64) -> f64 {
    if lead_hopping < 0.0 {
        k
    } else {
        -k
    }
}

fn device_matrix(chain: &ImpurityChain) -> DMatrix<C64> {
    let n = chain.device_len();
    let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for (j, &e) in chain.device_potentials.iter().enumerate() {
        h[(j, j)] = e.into();
    }
    for (j, &t) in chain.device_hoppings.iter().enumerate() {
        h[(j, j + 1)] = t.into();
        h[(j + 1, j)] = t.into();
    }
    h
}

/// `T = Tr[Γ₁ G^R Γ₂ G^A]` with `Σ = t e^{iq}` on both contact sites and
/// `Γ = i(Σ - Σ†)`.
pub fn negf_transmission(chain: &ImpurityChain, k: f64) -> Result<TransmissionResult> {
    check_momentum(k)?;
    chain.validate()?;
    let t = chain.lead_hopping;
    let energy = 2.0 * t * k.cos();
    let n = chain.device_len();
    if n == 0 {
        return Ok(TransmissionResult {
            k,
            energy,
            r_amp: None,
            t_amp: None,
            transmission: 1.0,
            reflection: 0.0,
        });
    }
    let q = lead_wavevector(t, k);
    let sigma = C64::from_polar(t, q);
    let zero = C64::new(0.0, 0.0);
    let mut sigma1 = DMatrix::from_element(n, n, zero);
    let mut sigma2 = DMatrix::from_element(n, n, zero);
    sigma1[(0, 0)] = sigma;
    sigma2[(n - 1, n - 1)] = sigma;
    let gamma = |s: &DMatrix<C64>| (s - s.adjoint()) * C64::i();
    let (gamma1, gamma2) = (gamma(&sigma1), gamma(&sigma2));

    let a = DMatrix::identity(n, n) * C64::from(energy) - device_matrix(chain) - &sigma1 - &sigma2;
    let gr = a.lu().try_inverse().ok_or(Error::Singular("retarded Green's function"))?;
    let ga = gr.adjoint();
    let transmission = (gamma1 * &gr * gamma2 * ga).trace().re;
    Ok(TransmissionResult {
        k,
        energy,
        r_amp: None,
        t_amp: None,
        transmission,
        reflection: 1.0 - transmission,
    })
}

/// Amplitude at chain site `l` as (coefficients over the unknowns
/// `[r, ψ_0..ψ_{n-1}, t]`, inhomogeneous part).
fn amplitude(l: i64, n: usize, q: f64) -> (Vec<(usize, C64)>, C64) {
    let phase = |x: f64| C64::from_polar(1.0, x);
    let lf = l as f64;
    if l < 0 {
        (vec![(0, phase(-q * lf))], phase(q * lf))
    } else if (l as usize) < n {
        (vec![(1 + l as usize, C64::new(1.0, 0.0))], C64::new(0.0, 0.0))
    } else {
        (vec![(n + 1, phase(q * lf))], C64::new(0.0, 0.0))
    }
}

/// Matches `e^{iql} + r e^{-iql}` (left lead) and `t e^{iql}` (right lead)
/// through the device by solving the Schrödinger equation on sites
/// `-1..=n` as a dense linear system.
pub fn planewave_scattering(chain: &ImpurityChain, k: f64) -> Result<TransmissionResult> {
    check_momentum(k)?;
    chain.validate()?;
    let t_lead = chain.lead_hopping;
    let energy = 2.0 * t_lead * k.cos();
    let q = lead_wavevector(t_lead, k);
    let n = chain.device_len();
    let dim = n + 2;
    let potential = |l: i64| -> f64 {
        if l >= 0 && (l as usize) < n {
            chain.device_potentials[l as usize]
        } else {
            0.0
        }
    };
    // bond between l and l + 1
    let bond = |l: i64| -> f64 {
        if l >= 0 && (l as usize) + 1 < n {
            chain.device_hoppings[l as usize]
        } else {
            t_lead
        }
    };

    let mut a = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let mut b = DVector::from_element(dim, C64::new(0.0, 0.0));
    for (row, l) in (-1..=n as i64).enumerate() {
        // (E - ε_l) ψ_l - t_{l-1} ψ_{l-1} - t_l ψ_{l+1} = 0
        for (site, coef) in [(l, energy - potential(l)), (l - 1, -bond(l - 1)), (l + 1, -bond(l))] {
            let (terms, constant) = amplitude(site, n, q);
            for (col, c) in terms {
                a[(row, col)] += c * coef;
            }
            b[row] -= constant * coef;
        }
    }
    let x = a.lu().solve(&b).ok_or(Error::Singular("plane-wave matching system"))?;
    let (r, t) = (x[0], x[n + 1]);
    Ok(TransmissionResult {
        k,
        energy,
        r_amp: Some(r),
        t_amp: Some(t),
        transmission: t.norm_sqr(),
        reflection: r.norm_sqr(),
    })
}

/// Closed-form transmission of the two-site impurity (potentials `2V`,
/// internal bond `-2κ`) embedded in a `-κ` chain.
pub fn analytic_t12(kappa: f64, v: f64, k: f64) -> f64 {
    let x = v / kappa;
    let c = k.cos();
    let denom: f64 = [-1.0, 1.0]
        .iter()
        .map(|l| 4.0 * (x + l) * (x + l) + 4.0 * (x + l) * c + 1.0)
        .product();
    debug_assert!(denom > 0.0, "denominator must stay positive, got {denom}");
    16.0 * k.sin().powi(2) / denom
}

/// Contact potentials `(V_R⁺, V_R⁻)` with unit transmission at momentum `k`.
pub fn resonance_v(kappa: f64, k: f64) -> (f64, f64) {
    let c = k.cos();
    let root = (c * c + 3.0).sqrt();
    let a = 0.5 * kappa * (-c + root);
    let b = 0.5 * kappa * (-c - root);
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Transmission averaged over the momentum distribution of a Gaussian packet
/// of spatial width `sigma` (momentum width `1/(2σ)`), restricted to `(0, π)`.
pub fn packet_averaged_t12(kappa: f64, v: f64, k0: f64, sigma: f64) -> f64 {
    let n = 4000;
    let h = std::f64::consts::PI / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..n {
        let k = i as f64 * h;
        let w = (-2.0 * sigma * sigma * (k - k0) * (k - k0)).exp();
        num += w * analytic_t12(kappa, v, k);
        den += w;
    }
    num / den
}

/// One row of a transmission sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransmissionRow {
    pub k: f64,
    pub v: f64,
    pub t_analytic: f64,
    pub t_negf: f64,
    pub t_planewave: f64,
    pub v_r_plus: f64,
    pub v_r_minus: f64,
}

/// Evaluates all three methods on the impurity chain of `kind` at every
/// `(k, V)` pair, rows ordered with `V` outermost. Uniform chains have the
/// closed-form value 1.
pub fn transmission_grid(kind: PairKind, kappa: f64, ks: &[f64], vs: &[f64]) -> Result<Vec<TransmissionRow>> {
    if !(kappa.is_finite() && kappa != 0.0) {
        return Err(invalid("kappa", "must be finite and nonzero"));
    }
    let pairs: Vec<(f64, f64)> = vs.iter().flat_map(|&v| ks.iter().map(move |&k| (k, v))).collect();
    pairs
        .par_iter()
        .map(|&(k, v)| {
            let (chain, t_analytic) = match kind {
                PairKind::OnsiteBose => (onsite_chain(kappa, v), analytic_t12(kappa, v, k)),
                _ => (ImpurityChain::uniform(kappa, kind.shift_distance()), 1.0),
            };
            let (v_r_plus, v_r_minus) = resonance_v(kappa, k);
            Ok(TransmissionRow {
                k,
                v,
                t_analytic,
                t_negf: negf_transmission(&chain, k)?.transmission,
                t_planewave: planewave_scattering(&chain, k)?.transmission,
                v_r_plus,
                v_r_minus,
            })
        })
        .collect()
}

/// The impurity chain of an on-site pair with contact interaction `v`.
pub fn onsite_chain(kappa: f64, v: f64) -> ImpurityChain {
    ImpurityChain {
        lead_hopping: -kappa,
        device_potentials: vec![2.0 * v, 2.0 * v],
        device_hoppings: vec![-2.0 * kappa],
        shift_distance: 1,
    }
}
