//! Objective functions of a spin configuration: Ising energy, cut weight
//! and the relaxation correction.
//!
//! All sums run over ordered node pairs, matching
//! H = ½ Σ_{m,n} A_{m,n} σ_m σ_n and C = ¼ Σ_{m,n} A_{m,n} (1 − σ_m σ_n),
//! so H + 2C = ½ Σ_{m,n} A_{m,n} identically.

use crate::error::{Error, Result};
use crate::network::SpinNetwork;
use crate::phase::{PhasePoint, Spin};

fn check_len(net: &SpinNetwork, got: usize) -> Result<()> {
    if got != net.len() {
        return Err(Error::Dimension { expected: net.len(), got });
    }
    Ok(())
}

/// Weight of the cut induced by the partition σ:
/// C(σ) = ¼ Σ_{m,n} A_{m,n} (1 − σ_m σ_n).
pub fn discrete_cut(net: &SpinNetwork, sigma: &[Spin]) -> Result<f64> {
    check_len(net, sigma.len())?;
    let mut acc = 0.0;
    for (m, n, w) in net.edges() {
        if sigma[m] != sigma[n] {
            acc += w;
        }
    }
    Ok(acc)
}

/// Classical Ising energy H(σ) = ½ Σ_{m,n} A_{m,n} σ_m σ_n.
pub fn ising_energy(net: &SpinNetwork, sigma: &[Spin]) -> Result<f64> {
    check_len(net, sigma.len())?;
    let mut acc = 0.0;
    for (m, n, w) in net.edges() {
        acc += w * f64::from(sigma[m]) * f64::from(sigma[n]);
    }
    Ok(acc)
}

/// Correction to the cut due to relaxation:
/// ΔC_V2 = ¼ Σ_{m,n} A_{m,n} σ_m σ_n |X_m − X_n|.
pub fn cut_correction(net: &SpinNetwork, points: &[PhasePoint]) -> Result<f64> {
    check_len(net, points.len())?;
    let mut acc = 0.0;
    for (m, n, w) in net.edges() {
        let s = f64::from(points[m].sigma()) * f64::from(points[n].sigma());
        acc += 0.5 * w * s * (points[m].continuous() - points[n].continuous()).abs();
    }
    Ok(acc)
}

/// Relaxed cut function C_V2 = C(σ) + ΔC_V2; the Lyapunov functional of
/// the evolution.
pub fn relaxed_cut(net: &SpinNetwork, points: &[PhasePoint]) -> Result<f64> {
    let sigma: Vec<Spin> = points.iter().map(PhasePoint::sigma).collect();
    Ok(discrete_cut(net, &sigma)? + cut_correction(net, points)?)
}
