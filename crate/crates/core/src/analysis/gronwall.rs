//! Discrete Gronwall inequality: from `e_n <= c g_n + tau sum_{k<n} e_k` conclude
//! `max e <= c (1 + tau)^N max g`.

/// Outcome of [`discrete_gronwall_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallVerdict {
    /// First index `n` (1-based) where the hypothesis fails, if any.
    pub hypothesis_violated_at: Option<usize>,
    /// Measured `max e / max g`.
    pub ratio: f64,
    /// `c (1 + tau)^N`.
    pub bound: f64,
    pub holds: bool,
}

pub fn discrete_gronwall_check(e: &[f64], g: &[f64], tau: f64, c: f64) -> GronwallVerdict {
    assert_eq!(e.len(), g.len(), "sequences must have equal length");
    assert!(tau > 0.0 && c > 0.0, "tau and c must be positive");
    let n = e.len();
    let bound = c * (1.0 + tau).powi(n as i32);
    let mut partial = 0.0;
    let mut violated = None;
    for i in 0..n {
        let rhs = c * g[i] + tau * partial;
        if e[i] > rhs * (1.0 + 1e-12) {
            violated = Some(i + 1);
            break;
        }
        partial += e[i];
    }
    let emax = e.iter().copied().fold(0.0, f64::max);
    let gmax = g.iter().copied().fold(0.0, f64::max);
    let ratio = if gmax > 0.0 { emax / gmax } else if emax == 0.0 { 0.0 } else { f64::INFINITY };
    GronwallVerdict { hypothesis_violated_at: violated, ratio, bound, holds: violated.is_none() && ratio <= bound }
}
