//! First-order integration of the V2 equations of motion
//!
//!   dX_m/dt = σ_m Σ_n A_{m,n} σ_n sgn(X_m − X_n),
//!
//! with sgn regularized to sgnε(u) = clamp(u/ε, −1, 1) for ε > 0 and the
//! exact convention sgn(0) = 0 for ε = 0. In the canonical θ coordinate a
//! boundary crossing is a plain wrap; σ flips and X resets implicitly, and
//! the rates stay continuous across the transition.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::detect_clusters;
use crate::error::{Error, Result};
use crate::network::SpinNetwork;
use crate::objective::relaxed_cut;
use crate::phase::PhasePoint;

/// Integration and termination parameters. Time is measured in units of
/// the equations of motion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Step size; keep below 1.
    pub dt: f64,
    /// Half-width of the sgn regularization; 0 selects the exact
    /// best-effort mode.
    pub epsilon: f64,
    pub t_max: f64,
    /// Maximum free-spin rate magnitude that counts as equilibrium.
    pub eq_tol: f64,
    /// Duration the rate bound must hold before the run terminates.
    pub eq_window: f64,
    /// Maximum crossing-phase distance for same-cluster membership.
    pub cluster_tol: f64,
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-2,
            epsilon: 1e-3,
            t_max: 100.0,
            eq_tol: 1e-6,
            eq_window: 1.0,
            cluster_tol: 1e-2,
            seed: 0,
        }
    }
}

impl IntegratorConfig {
    /// Defaults with the equilibrium tolerance scaled to the network's
    /// largest coupling.
    pub fn for_network(net: &SpinNetwork) -> Self {
        let scale = net.max_abs_weight().max(1e-12);
        IntegratorConfig { eq_tol: 1e-6 * scale, ..Default::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidInput("dt must be positive".into()));
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("eq_tol", self.eq_tol),
            ("eq_window", self.eq_window),
            ("cluster_tol", self.cluster_tol),
            ("t_max", self.t_max),
        ] {
            if !(v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Result of an `evolve` run.
#[derive(Debug, Clone)]
pub struct TerminalState {
    pub points: Vec<PhasePoint>,
    /// Strong-cluster partition at `cluster_tol`, ordered by smallest
    /// member index.
    pub clusters: Vec<Vec<usize>>,
    pub elapsed: f64,
    /// Sampled (t, C_V2) values along the trajectory.
    pub lyapunov_trace: Vec<(f64, f64)>,
    pub converged: bool,
}

fn regularized_sign(u: f64, epsilon: f64) -> f64 {
    if epsilon > 0.0 {
        (u / epsilon).clamp(-1.0, 1.0)
    } else if u > 0.0 {
        1.0
    } else if u < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn decompose(points: &[PhasePoint]) -> (Vec<f64>, Vec<f64>) {
    let sigma: Vec<f64> = points.iter().map(|p| f64::from(p.sigma())).collect();
    let x: Vec<f64> = points.iter().map(PhasePoint::continuous).collect();
    (sigma, x)
}

fn rates_into(
    net: &SpinNetwork,
    sigma: &[f64],
    x: &[f64],
    epsilon: f64,
    out: &mut [f64],
) {
    for m in 0..net.len() {
        if net.is_clamped(m) {
            out[m] = 0.0;
            continue;
        }
        let mut acc = 0.0;
        for &(n, w) in net.neighbors(m) {
            acc += w * sigma[n] * regularized_sign(x[m] - x[n], epsilon);
        }
        out[m] = sigma[m] * acc;
    }
}

/// dX/dt per node; clamped nodes report zero but still appear in their
/// neighbors' sums.
pub fn rate(net: &SpinNetwork, points: &[PhasePoint], cfg: &IntegratorConfig) -> Result<Vec<f64>> {
    if points.len() != net.len() {
        return Err(Error::Dimension { expected: net.len(), got: points.len() });
    }
    let (sigma, x) = decompose(points);
    let mut out = vec![0.0; net.len()];
    rates_into(net, &sigma, &x, cfg.epsilon, &mut out);
    Ok(out)
}

/// One explicit first-order update θ ← wrap(θ + dt · rate).
pub fn step(
    net: &SpinNetwork,
    points: &[PhasePoint],
    cfg: &IntegratorConfig,
) -> Result<Vec<PhasePoint>> {
    let rates = rate(net, points, cfg)?;
    apply_step(points, &rates, cfg.dt)
}

fn apply_step(points: &[PhasePoint], rates: &[f64], dt: f64) -> Result<Vec<PhasePoint>> {
    points
        .iter()
        .zip(rates)
        .map(|(p, r)| {
            if !r.is_finite() {
                return Err(Error::Numeric(format!("non-finite rate {r}")));
            }
            Ok(p.rotated(dt * r))
        })
        .collect()
}

/// Runs the dynamics until every free node's rate magnitude stays within
/// `eq_tol` for a contiguous `eq_window`, or `t_max` elapses. Reaching
/// `t_max` first is not an error; the state comes back with
/// `converged = false`.
pub fn evolve(
    net: &SpinNetwork,
    initial: &[PhasePoint],
    cfg: &IntegratorConfig,
) -> Result<TerminalState> {
    evolve_observed(net, initial, cfg, |_, _| {})
}

/// `evolve` with a per-step observer (called with (t, state) before each
/// step and once on the terminal state).
pub fn evolve_observed(
    net: &SpinNetwork,
    initial: &[PhasePoint],
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(f64, &[PhasePoint]),
) -> Result<TerminalState> {
    cfg.validate()?;
    if initial.len() != net.len() {
        return Err(Error::Dimension { expected: net.len(), got: initial.len() });
    }
    for (&node, placed) in net.clamps() {
        if (initial[node].theta() - placed.theta()).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "clamped node {node} is not at its fixed placement"
            )));
        }
    }

    let n = net.len();
    let free = net.free_nodes();
    let mut points = initial.to_vec();
    let mut trace = Vec::new();

    // Degenerate networks are their own equilibrium.
    if n == 0 || free.is_empty() {
        observer(0.0, &points);
        trace.push((0.0, relaxed_cut(net, &points).unwrap_or(0.0)));
        let clusters = detect_clusters(&points, cfg.cluster_tol);
        return Ok(TerminalState {
            points,
            clusters,
            elapsed: 0.0,
            lyapunov_trace: trace,
            converged: true,
        });
    }

    let trace_stride = ((0.25 / cfg.dt).round() as usize).max(1);
    let mut sigma = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut rates = vec![0.0; n];

    let mut t = 0.0;
    let mut held = 0.0;
    let mut converged = false;
    let mut step_index = 0usize;

    loop {
        for (i, p) in points.iter().enumerate() {
            sigma[i] = f64::from(p.sigma());
            x[i] = p.continuous();
        }
        rates_into(net, &sigma, &x, cfg.epsilon, &mut rates);

        if step_index % trace_stride == 0 {
            trace.push((t, relaxed_cut(net, &points)?));
        }
        observer(t, &points);

        let max_rate = free.iter().map(|&m| rates[m].abs()).fold(0.0, f64::max);
        if !max_rate.is_finite() {
            return Err(Error::Numeric("non-finite rate during evolution".into()));
        }
        if max_rate <= cfg.eq_tol {
            held += cfg.dt;
            if held >= cfg.eq_window {
                converged = true;
                break;
            }
        } else {
            held = 0.0;
        }
        if t >= cfg.t_max {
            break;
        }

        for &m in &free {
            points[m] = points[m].rotated(cfg.dt * rates[m]);
        }
        t += cfg.dt;
        step_index += 1;
    }

    trace.push((t, relaxed_cut(net, &points)?));
    let clusters = detect_clusters(&points, cfg.cluster_tol);
    Ok(TerminalState { points, clusters, elapsed: t, lyapunov_trace: trace, converged })
}

/// Seeded random initial state: free nodes uniform on [−2, 2), clamped
/// nodes at their fixed placements.
pub fn sample_initial(net: &SpinNetwork, cfg: &IntegratorConfig) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..net.len())
        .map(|m| match net.clamps().get(&m) {
            Some(p) => *p,
            None => PhasePoint::new(rng.gen_range(-2.0..2.0)),
        })
        .collect()
}

/// Evolves while dumping CSV rows (t, theta_0, …, theta_{n−1}, C_V2).
pub fn write_trajectory_csv<W: Write>(
    net: &SpinNetwork,
    initial: &[PhasePoint],
    cfg: &IntegratorConfig,
    writer: W,
) -> Result<TerminalState> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((0..net.len()).map(|i| format!("theta_{i}")));
    header.push("C_V2".to_string());
    w.write_record(&header).map_err(|e| Error::Data(e.to_string()))?;

    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    let term = evolve_observed(net, initial, cfg, |t, pts| {
        rows.push((t, pts.iter().map(PhasePoint::theta).collect()));
    })?;
    for (t, thetas) in rows {
        let mut record = vec![format!("{t}")];
        record.extend(thetas.iter().map(|v| format!("{v}")));
        let mut pts: Vec<PhasePoint> = thetas.iter().map(|&v| PhasePoint::new(v)).collect();
        pts.truncate(net.len());
        record.push(format!("{}", relaxed_cut(net, &pts)?));
        w.write_record(&record).map_err(|e| Error::Data(e.to_string()))?;
    }
    w.flush()?;
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::complete_graph;
    use crate::objective::cut_correction;
    use crate::phase::Spin;

    fn k5() -> SpinNetwork {
        complete_graph(5)
    }

    #[test]
    fn equal_components_give_zero_rates() {
        let net = k5();
        let pts: Vec<PhasePoint> = [1, -1, 1, -1, 1]
            .iter()
            .map(|&s: &Spin| PhasePoint::from_parts(s, 0.2))
            .collect();
        let cfg = IntegratorConfig { epsilon: 0.0, ..Default::default() };
        assert_eq!(rate(&net, &pts, &cfg).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn two_node_rate_by_direct_substitution() {
        let mut net = SpinNetwork::new(2);
        net.set_weight(0, 1, 1.0).unwrap();
        let pts = [PhasePoint::from_parts(1, 0.5), PhasePoint::from_parts(1, -0.5)];
        let cfg = IntegratorConfig { epsilon: 0.0, ..Default::default() };
        assert_eq!(rate(&net, &pts, &cfg).unwrap(), vec![1.0, -1.0]);
    }

    /// Finite-difference oracle for 2 ∂ΔC_V2/∂X_m, evaluated away from
    /// the |·| kinks.
    fn fd_gradient(net: &SpinNetwork, points: &[PhasePoint], m: usize, h: f64) -> f64 {
        let mut plus = points.to_vec();
        plus[m] = PhasePoint::from_parts(points[m].sigma(), points[m].continuous() + h);
        let mut minus = points.to_vec();
        minus[m] = PhasePoint::from_parts(points[m].sigma(), points[m].continuous() - h);
        let up = cut_correction(net, &plus).unwrap();
        let down = cut_correction(net, &minus).unwrap();
        2.0 * (up - down) / (2.0 * h)
    }

    #[test]
    fn rate_matches_finite_difference_gradient_on_k5() {
        let net = k5();
        let cfg = IntegratorConfig { epsilon: 0.0, seed: 7, ..Default::default() };
        // A state with well-separated continuous components.
        let xs = [-0.8, -0.35, 0.05, 0.42, 0.77];
        let sg: [Spin; 5] = [1, -1, -1, 1, 1];
        let pts: Vec<PhasePoint> = sg
            .iter()
            .zip(xs)
            .map(|(&s, x)| PhasePoint::from_parts(s, x))
            .collect();
        let rates = rate(&net, &pts, &cfg).unwrap();
        for m in 0..5 {
            let fd = fd_gradient(&net, &pts, m, 1e-7);
            assert!(
                (rates[m] - fd).abs() < 1e-6,
                "node {m}: rate {} vs fd {}",
                rates[m],
                fd
            );
        }
    }

    #[test]
    fn step_wraps_and_flips_sigma() {
        let mut net = SpinNetwork::new(2);
        net.set_weight(0, 1, 1.0).unwrap();
        // Node 0 sits just below θ = 2 and drifts upward.
        let pts = [PhasePoint::new(0.999 * 2.0), PhasePoint::new(0.5)];
        let cfg = IntegratorConfig { dt: 0.01, epsilon: 0.0, ..Default::default() };
        assert_eq!(pts[0].sigma(), 1);
        let next = step(&net, &pts, &cfg).unwrap();
        assert_eq!(next[0].sigma(), -1);
        assert!(next[0].theta() < -1.9);
    }

    #[test]
    fn rates_are_continuous_across_the_wrap() {
        let mut net = SpinNetwork::new(3);
        net.set_weight(0, 1, 1.0).unwrap();
        net.set_weight(0, 2, -0.5).unwrap();
        net.set_weight(1, 2, 0.75).unwrap();
        let cfg = IntegratorConfig { epsilon: 1e-3, ..Default::default() };
        // Other spins well away from the boundary.
        let before = [PhasePoint::new(2.0 - 1e-9), PhasePoint::new(0.5), PhasePoint::new(-1.3)];
        let after = [PhasePoint::new(-2.0 + 1e-9), PhasePoint::new(0.5), PhasePoint::new(-1.3)];
        let rb = rate(&net, &before, &cfg).unwrap();
        let ra = rate(&net, &after, &cfg).unwrap();
        for m in 0..3 {
            assert!(
                (rb[m] - ra[m]).abs() < 1e-6,
                "node {m} jumped: {} vs {}",
                rb[m],
                ra[m]
            );
        }
    }

    #[test]
    fn clamped_nodes_never_move() {
        let mut net = complete_graph(3);
        net.clamp(0, PhasePoint::new(0.5)).unwrap();
        let cfg = IntegratorConfig { t_max: 5.0, seed: 3, ..Default::default() };
        let initial = sample_initial(&net, &cfg);
        let term = evolve(&net, &initial, &cfg).unwrap();
        assert_eq!(term.points[0].theta(), 0.5);
    }

    #[test]
    fn clamp_to_clamp_edges_do_not_affect_free_trajectories() {
        let mut a = complete_graph(4);
        a.clamp(0, PhasePoint::new(0.3)).unwrap();
        a.clamp(1, PhasePoint::new(-1.1)).unwrap();
        let mut b = a.clone();
        b.set_weight(0, 1, -7.5).unwrap();

        let cfg = IntegratorConfig { t_max: 3.0, seed: 11, ..Default::default() };
        let init = sample_initial(&a, &cfg);
        let ta = evolve(&a, &init, &cfg).unwrap();
        let tb = evolve(&b, &init, &cfg).unwrap();
        for m in 2..4 {
            assert_eq!(ta.points[m].theta(), tb.points[m].theta());
        }
    }

    #[test]
    fn zero_weight_network_is_already_an_equilibrium() {
        let net = SpinNetwork::new(4);
        let cfg = IntegratorConfig { t_max: 10.0, seed: 2, ..Default::default() };
        let init = sample_initial(&net, &cfg);
        let term = evolve(&net, &init, &cfg).unwrap();
        assert!(term.converged);
        assert!((term.elapsed - cfg.eq_window).abs() <= cfg.dt + 1e-12);
        for (p, q) in init.iter().zip(&term.points) {
            assert_eq!(p.theta(), q.theta());
        }
    }

    #[test]
    fn all_clamped_network_returns_immediately() {
        let mut net = SpinNetwork::new(2);
        net.set_weight(0, 1, 1.0).unwrap();
        net.clamp(0, PhasePoint::new(0.1)).unwrap();
        net.clamp(1, PhasePoint::new(1.1)).unwrap();
        let cfg = IntegratorConfig::default();
        let init = sample_initial(&net, &cfg);
        let term = evolve(&net, &init, &cfg).unwrap();
        assert!(term.converged);
        assert_eq!(term.elapsed, 0.0);
    }

    #[test]
    fn same_seed_reproduces_initial_state() {
        let net = complete_graph(6);
        let cfg = IntegratorConfig { seed: 42, ..Default::default() };
        let a = sample_initial(&net, &cfg);
        let b = sample_initial(&net, &cfg);
        assert_eq!(
            a.iter().map(PhasePoint::theta).collect::<Vec<_>>(),
            b.iter().map(PhasePoint::theta).collect::<Vec<_>>()
        );
    }

    #[test]
    fn sampled_theta_mean_is_near_zero() {
        let net = SpinNetwork::new(1);
        let mut acc = 0.0;
        for seed in 0..100_000u64 {
            let cfg = IntegratorConfig { seed, ..Default::default() };
            acc += sample_initial(&net, &cfg)[0].theta();
        }
        assert!((acc / 1e5).abs() < 0.05);
    }

    #[test]
    fn k5_converges_and_the_lyapunov_trace_climbs() {
        let net = k5();
        let cfg = IntegratorConfig { t_max: 60.0, seed: 5, ..IntegratorConfig::for_network(&k5()) };
        let init = sample_initial(&net, &cfg);
        let term = evolve(&net, &init, &cfg).unwrap();
        assert!(term.converged);
        let first = term.lyapunov_trace.first().unwrap().1;
        let last = term.lyapunov_trace.last().unwrap().1;
        assert!(last >= first - 1e-9);
        // Terminal relaxed cut should sit at the maximum cut of K5.
        assert!((last - 6.0).abs() < 0.05, "terminal C_V2 = {last}");
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let net = k5();
        let cfg = IntegratorConfig { t_max: 1.0, seed: 1, ..Default::default() };
        let init = sample_initial(&net, &cfg);
        let mut buf = Vec::new();
        write_trajectory_csv(&net, &init, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,theta_0,theta_1,theta_2,theta_3,theta_4,C_V2");
        assert!(lines.count() >= 2);
    }
}
