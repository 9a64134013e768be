//! Toda action variables from the arcosh and the moment formula, and the
//! quotients `J_n = I_n / gamma_n`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi_spectral::{discriminant, discriminant_noise, SpectrumN};
use crate::quadrature::{theta_doubling, Node, MAX_NODES, QUAD_TOL};
use crate::roots::ScaledProduct;
use crate::toda_model::TodaState;

/// Interior arcosh arguments may dip below 1 by this much (or by a multiple
/// of the discriminant's rounding bound, if larger) before it counts as a
/// sign bookkeeping error.
const ARCOSH_SLACK: f64 = 1e-10;
const NOISE_FACTOR: f64 = 8.0;

/// Actions `I_n` and quotients `J_n` for `n = 1..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    pub i: Vec<f64>,
    pub j: Vec<f64>,
}

impl ActionSet {
    pub fn action(&self, n: usize) -> f64 {
        self.i[n - 1]
    }

    pub fn quotient(&self, n: usize) -> f64 {
        self.j[n - 1]
    }
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn collect(spectrum: &SpectrumN, i: Vec<f64>) -> ActionSet {
    let j = i.iter().zip(spectrum.gap_lengths()).map(|(&a, &g)| if g > 0.0 { a / g } else { 0.0 }).collect();
    ActionSet { i, j }
}

/// Absolute floor for the gap quadratures: values of arcosh and of the root
/// near the band edges only carry the discriminant's absolute accuracy.
fn abs_floor(gamma: f64) -> f64 {
    1e-10 * gamma * gamma
}

/// `I_n = (1/pi) int_gap arcosh((-1)^{N-n} Delta / 2) dmu`.
///
/// With `x = (-1)^{N-n} Delta / 2` the integrand is evaluated as
/// `asinh(sqrt(x^2 - 1))`, the root taken from the eigenvalue product so that
/// it keeps full relative accuracy up to the gap ends. `Delta` itself only
/// supplies the sign check.
pub fn actions_arcosh(state: &TodaState, spectrum: &SpectrumN) -> Result<ActionSet> {
    let n = spectrum.n();
    let q = state.prod_q();
    let i = (1..n)
        .into_par_iter()
        .map(|g| {
            if spectrum.is_closed(g) {
                return Ok(0.0);
            }
            let (lo, hi) = spectrum.gap(g);
            let s = parity(n + g);
            let v = theta_doubling(
                |t| {
                    let node = Node::on(lo, hi, t);
                    let x = 0.5 * s * discriminant(state, node.x).0;
                    let slack = ARCOSH_SLACK.max(NOISE_FACTOR * discriminant_noise(state, node.x));
                    if x < 1.0 - slack {
                        return Err(Error::NegativeArcoshArgument { n: g, value: x });
                    }
                    let w = node.weight(lo, hi);
                    let root = 0.5 * w / (q * spectrum.inv_sqrt_product(node.x, g));
                    Ok(root.asinh() * w)
                },
                16,
                QUAD_TOL,
                abs_floor(hi - lo),
                MAX_NODES,
            )?;
            Ok(v / PI)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(collect(spectrum, i))
}

/// `I_n = (1/pi) int_gap (mu - dot lambda_n) Delta' / sqrt(Delta^2 - 4)(mu - i0) dmu`.
///
/// On gap `n` the root at `mu - i0` is `(-1)^{N+1-n}` times the positive root.
/// Both `Delta'` and the root are taken in product form,
/// `Delta' = (N / q_N) prod_k (mu - dot lambda_k)` and
/// `|sqrt(Delta^2 - 4)| = sqrt(prod_j |mu - lambda_j|) / q_N`, so the `q_N`
/// cancel and small gaps keep their relative accuracy.
pub fn actions_moment(_state: &TodaState, spectrum: &SpectrumN) -> Result<ActionSet> {
    let n = spectrum.n();
    let dots = spectrum.dot_lambdas();
    let i = (1..n)
        .into_par_iter()
        .map(|g| {
            if spectrum.is_closed(g) {
                return Ok(0.0);
            }
            let (lo, hi) = spectrum.gap(g);
            let dot = spectrum.dot_lambda(g);
            let sign = parity(n + 1 + g);
            let v = theta_doubling(
                |t| {
                    let node = Node::on(lo, hi, t);
                    let d = node.minus(dot, lo, hi);
                    let mut p = ScaledProduct::default();
                    p.mul(n as f64 * d * d);
                    for (k, &l) in dots.iter().enumerate() {
                        if k + 1 != g {
                            p.mul(node.x - l);
                        }
                    }
                    p.mul(spectrum.inv_sqrt_product(node.x, g));
                    Ok(p.value())
                },
                16,
                QUAD_TOL,
                abs_floor(hi - lo),
                MAX_NODES,
            )?;
            Ok(sign * v / PI)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(collect(spectrum, i))
}

/// `J_n = I_n / gamma_n`, and 0 on closed gaps.
pub fn j_quotients(actions: &ActionSet, spectrum: &SpectrumN) -> Vec<f64> {
    collect(spectrum, actions.i.clone()).j
}
