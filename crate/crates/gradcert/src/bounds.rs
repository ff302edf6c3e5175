//! The analytic chain that certifies a lower bound on `|grad S|^2 / S` over
//! a ball around a structured initialization, plus derivative bounds and the
//! doubling search for the output scale.
//!
//! Setup: the first weight matrix and all biases are zero, the middle weight
//! matrices have entries in `[delta, k_max]`, and the output weights are at
//! least `A`. For any parameter point within `delta/2` of such a `w`:
//!
//! * pre-activation magnitudes at the data points are bounded by the
//!   recursion `a_1 = M delta d + delta`,
//!   `a_l = gamma_{l-1}(a_{l-1}) (k_max + delta/2) d_{l-1} + delta`,
//! * activation slopes along the chain are at least
//!   `c_l = min_{|u| <= a_l} sigma_l'(u)`,
//! * every entry of the backpropagated row `q` is at least
//!   `(A - delta/2) (delta/2)^{L-2} d_{L-1}...d_2 c_{L-1}...c_1`,
//!
//! which lower-bounds the loss ratio by
//! `4 alpha (A - delta/2)^2 (delta/2)^{2L-4} (d_{L-1}..d_2 c_{L-1}..c_1)^2 d_1`
//! with `alpha` the minimum eigenvalue of the data Gram matrix `(1/n) X^T X`.
//! Since the `c_l` do not depend on `A`, growing `A` eventually satisfies the
//! ball criterion `4 S(w) < (delta/2)^2 * bound`, and doubling finds such an
//! `A` in logarithmically many probes.

use alloc::format;
use alloc::vec::Vec;

use crate::certificate::{
    build_certificate, AlphaEstimate, BoundMode, Certificate, LipschitzBounds,
};
use crate::error::{Error, Result};
use crate::init::theorem3_init;
use crate::linalg::{dot, max_abs, Ball, Matrix};
use crate::math;
use crate::nn::{Dataset, NetworkArchitecture, NetworkObjective, NetworkParams};
use crate::objective::Objective;
use crate::oracle::min_eigen_sym;
use crate::rng::{derive_seed, sample_in_ball, SplitMix64};

/// Envelope constants for the structured initialization: entry range
/// `[delta, k_max]` of the middle weights, data magnitude `m_data`, the
/// per-layer pre-activation bounds `a` and slope floors `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitEnvelope {
    pub delta: f64,
    pub k_max: f64,
    /// `k_max + delta/2`, the entry cap after perturbing by `delta/2`.
    pub k_prime: f64,
    pub m_data: f64,
    /// `a_1 ... a_{L-1}`: pre-activation magnitude caps per hidden layer.
    pub a: Vec<f64>,
    /// `c_1 ... c_{L-1}`: slope floors over `[-a_l, a_l]`.
    pub c: Vec<f64>,
}

impl InitEnvelope {
    pub fn new(
        arch: &NetworkArchitecture,
        delta: f64,
        k_max: f64,
        m_data: f64,
    ) -> Result<Self> {
        let a = magnitude_recursion(arch, delta, k_max, m_data)?;
        let mut c = Vec::with_capacity(a.len());
        for (act, a_l) in arch.activations().iter().zip(a.iter()) {
            c.push(act.min_slope(*a_l)?);
        }
        Ok(InitEnvelope {
            delta,
            k_max,
            k_prime: k_max + delta / 2.0,
            m_data,
            a,
            c,
        })
    }

    pub fn for_dataset(
        arch: &NetworkArchitecture,
        data: &Dataset,
        delta: f64,
        k_max: f64,
    ) -> Result<Self> {
        Self::new(arch, delta, k_max, data.max_abs_entry())
    }
}

/// Pre-activation magnitude caps `a_1 ... a_{L-1}` for parameter points
/// within `delta/2` of the structured initialization, given middle entries
/// at most `k_max` and input entries at most `m_data`.
pub fn magnitude_recursion(
    arch: &NetworkArchitecture,
    delta: f64,
    k_max: f64,
    m_data: f64,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Input(format!("delta must be positive and finite, got {delta}")));
    }
    if !(k_max >= delta) {
        return Err(Error::Input(format!(
            "k_max must be at least delta, got k_max={k_max} delta={delta}"
        )));
    }
    if !(m_data >= 0.0) || !m_data.is_finite() {
        return Err(Error::Input(format!("m_data must be nonnegative, got {m_data}")));
    }
    let depth = arch.depth();
    let k_prime = k_max + delta / 2.0;
    let mut a = Vec::with_capacity(depth - 1);
    a.push(m_data * delta * arch.input_dim() as f64 + delta);
    for l in 1..depth - 1 {
        let prev_gamma = arch.activations()[l - 1].gamma(a[l - 1]);
        a.push(prev_gamma * k_prime * arch.layer_dims()[l - 1] as f64 + delta);
    }
    Ok(a)
}

/// The certified lower bound on `|grad S(w')|^2 / S(w')` over the ball of
/// radius `delta/2` around any initialization matching the envelope, given
/// output weights at least `a_scale`.
pub fn analytic_pl_lower_bound(
    arch: &NetworkArchitecture,
    envelope: &InitEnvelope,
    alpha_data: f64,
    a_scale: f64,
) -> Result<f64> {
    if !(alpha_data > 0.0) {
        return Err(Error::Input(format!(
            "alpha_data must be positive, got {alpha_data}"
        )));
    }
    if !(a_scale > envelope.delta / 2.0) {
        return Err(Error::Input(format!(
            "output scale must exceed delta/2 = {}, got {a_scale}",
            envelope.delta / 2.0
        )));
    }
    let depth = arch.depth();
    let half_delta = envelope.delta / 2.0;
    let mid_dims: f64 = arch.layer_dims()[1..depth - 1]
        .iter()
        .map(|d| *d as f64)
        .product();
    let slopes: f64 = envelope.c.iter().product();
    let core = mid_dims * slopes;
    let d1 = arch.layer_dims()[0] as f64;
    Ok(4.0
        * alpha_data
        * (a_scale - half_delta)
        * (a_scale - half_delta)
        * math::pow(half_delta, (2 * depth - 4) as f64)
        * core
        * core
        * d1)
}

/// Extreme eigenvalues of the data Gram matrix `(1/n) X^T X`.
pub fn data_alpha_beta(data: &Dataset) -> Result<(f64, f64)> {
    let n = data.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(data.input(i), data.input(j)) / n as f64;
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    min_eigen_sym(&g)
}

/// First/second partial-derivative bounds for an objective over a ball:
/// `L1` on the ball itself, `L2` on the ball of twice the radius. Analytic
/// mode requires the objective to supply closed-form bounds; sampled mode
/// probes `10 p` random points (with a 1.5x safety factor) and marks the
/// result heuristic.
pub fn lipschitz_bounds(
    f: &dyn Objective,
    ball: &Ball,
    mode: BoundMode,
    seed: u64,
) -> Result<LipschitzBounds> {
    match mode {
        BoundMode::Analytic => match f.analytic_partial_bounds(ball) {
            Some((l1, l2)) => Ok(LipschitzBounds {
                l1,
                l2,
                mode: BoundMode::Analytic,
            }),
            None => Err(Error::Unsupported(
                "objective has no analytic derivative bounds; use sampled mode".into(),
            )),
        },
        BoundMode::Sampled => sampled_partial_bounds(f, ball, seed),
    }
}

fn sampled_partial_bounds(f: &dyn Objective, ball: &Ball, seed: u64) -> Result<LipschitzBounds> {
    const SAFETY: f64 = 1.5;
    let p = f.dim();
    let n_points = 10 * p;
    let mut grad = alloc::vec![0.0; p];

    let mut rng = SplitMix64::new(derive_seed(seed, "lipschitz-l1"));
    let mut l1 = 0.0f64;
    for _ in 0..n_points {
        let x = sample_in_ball(&mut rng, ball);
        f.gradient_into(&x, &mut grad);
        l1 = l1.max(max_abs(&grad));
    }

    // Second partials on the doubled ball, by central differences of the
    // analytic gradient (one Hessian column per coordinate probe).
    let wide = ball.scaled(2.0);
    let mut rng = SplitMix64::new(derive_seed(seed, "lipschitz-l2"));
    let h = 1e-5 * (1.0 + max_abs(ball.center()) + wide.radius());
    let mut l2 = 0.0f64;
    let mut plus = alloc::vec![0.0; p];
    for _ in 0..n_points {
        let mut x = sample_in_ball(&mut rng, &wide);
        for j in 0..p {
            let xj = x[j];
            x[j] = xj + h;
            f.gradient_into(&x, &mut plus);
            x[j] = xj - h;
            f.gradient_into(&x, &mut grad);
            x[j] = xj;
            for (a, b) in plus.iter().zip(grad.iter()) {
                l2 = l2.max(math::abs(a - b) / (2.0 * h));
            }
        }
    }

    if !(l1 > 0.0) {
        // A gradient that vanishes on every sample still needs a usable
        // certificate; fall back to a tiny positive bound.
        l1 = 1e-12;
    }
    if !(l2 > 0.0) {
        l2 = 1e-12;
    }
    Ok(LipschitzBounds {
        l1: l1 * SAFETY,
        l2: l2 * SAFETY,
        mode: BoundMode::Sampled,
    })
}

/// Conservative analytic partial-derivative bounds for the squared loss of
/// a network over a parameter ball, from layerwise entry caps.
///
/// With `rho` the ball radius, entry caps `w_l = max|W_l| + rho` and
/// `b_l = max|b_l| + rho`, forward magnitudes obey
/// `g_l <= w_l d_{l-1} f_{l-1} + b_l` and `f_l <= gamma_l(g_l)`. Per-entry
/// derivative bounds follow two routes (backpropagated and forward
/// recursion); the smaller is kept. Second-derivative caps use the forward
/// recursion `Q_l <= sigma''_max P_l^2 + C2 (2 P_{l-1} + w_l d_{l-1}
/// Q_{l-1})`. Finally `L1 = 2 R P` and `L2 = 2 (P^2 + R Q)` with `R` the
/// residual cap. Crude, but only ever shrinks the certified step size.
pub fn network_partial_bounds(
    arch: &NetworkArchitecture,
    data: &Dataset,
    ball: &Ball,
) -> Option<(f64, f64)> {
    if ball.dim() != arch.param_count() || data.input_dim() != arch.input_dim() {
        return None;
    }
    let l1 = network_partial_bound_at(arch, data, ball.center(), ball.radius()).0;
    let l2 = network_partial_bound_at(arch, data, ball.center(), 2.0 * ball.radius()).1;
    Some((l1, l2))
}

fn network_partial_bound_at(
    arch: &NetworkArchitecture,
    data: &Dataset,
    center: &[f64],
    rho: f64,
) -> (f64, f64) {
    let depth = arch.depth();
    let m_data = data.max_abs_entry();
    let y_max = max_abs(data.targets());

    let w_cap: Vec<f64> = (0..depth)
        .map(|l| max_abs(&center[arch.weight_range(l)]) + rho)
        .collect();
    let b_cap: Vec<f64> = (0..depth)
        .map(|l| max_abs(&center[arch.bias_range(l)]) + rho)
        .collect();

    // forward magnitude caps
    let mut f_cap = alloc::vec![0.0; depth + 1];
    f_cap[0] = m_data;
    let mut g_cap = alloc::vec![0.0; depth];
    for l in 0..depth {
        g_cap[l] = w_cap[l] * arch.fan_in(l) as f64 * f_cap[l] + b_cap[l];
        f_cap[l + 1] = if l < depth - 1 {
            arch.activations()[l].gamma(g_cap[l])
        } else {
            g_cap[l]
        };
    }
    let resid_cap = y_max + f_cap[depth];

    // backpropagated per-entry bound on |df/dtheta|
    let mut u_cap = alloc::vec![0.0; depth];
    u_cap[depth - 1] = 1.0;
    for l in (0..depth - 1).rev() {
        u_cap[l] = arch.activations()[l].slope_cap()
            * w_cap[l + 1]
            * arch.layer_dims()[l + 1] as f64
            * u_cap[l + 1];
    }
    let p_back = (0..depth)
        .map(|l| u_cap[l] * f_cap[l].max(1.0))
        .fold(0.0f64, f64::max);

    // forward recursion for first/second derivative caps of layer outputs
    let mut p_fwd = 0.0f64; // P_{l-1}
    let mut q_fwd = 0.0f64; // Q_{l-1}
    for l in 0..depth {
        let fan = arch.fan_in(l) as f64;
        let pg = f_cap[l].max(1.0) + w_cap[l] * fan * p_fwd;
        let qg = 2.0 * p_fwd + w_cap[l] * fan * q_fwd;
        if l < depth - 1 {
            let act = arch.activations()[l];
            q_fwd = act.second_deriv_cap() * pg * pg + act.slope_cap() * qg;
            p_fwd = act.slope_cap() * pg;
        } else {
            q_fwd = qg;
            p_fwd = pg;
        }
    }

    let p_cap = p_back.min(p_fwd);
    let l1 = 2.0 * resid_cap * p_cap;
    let l2 = 2.0 * (p_cap * p_cap + resid_cap * q_fwd);
    (l1, l2)
}

/// Everything needed to run a certified training experiment: the output
/// scale found by doubling, the initialization anchored at the certificate
/// ball center, and the certificate itself.
#[derive(Debug, Clone)]
pub struct TrainSetup {
    pub a_scale: f64,
    pub eta: f64,
    pub certificate: Certificate,
    pub params: NetworkParams,
    pub envelope: InitEnvelope,
    pub alpha_data: f64,
    pub alpha_pl: f64,
}

const A_SEARCH_CAP: f64 = 1e12;
/// Required relative margin of `r^2 alpha` over `4 S(w)` at the accepted
/// output scale, guarding the strict criterion against rounding.
const A_SEARCH_MARGIN: f64 = 1.10;

/// Doubling search for the output scale: starting at `a_scale = delta`,
/// double until `4 S(w) < (delta/2)^2 * bound(a_scale)` holds with at least
/// a 10% relative margin, then build the certificate on the ball of radius
/// `delta/2` around the structured initialization drawn with `seed`.
pub fn find_a(
    arch: &NetworkArchitecture,
    data: &Dataset,
    delta: f64,
    k_max: f64,
    seed: u64,
    lipschitz_mode: BoundMode,
) -> Result<TrainSetup> {
    if data.input_dim() != arch.input_dim() {
        return Err(Error::Input(format!(
            "data has input dimension {}, network expects {}",
            data.input_dim(),
            arch.input_dim()
        )));
    }
    let (alpha_data, _beta) = data_alpha_beta(data)?;
    if alpha_data <= 1e-12 {
        return Err(Error::DataDegeneracy { alpha_data });
    }
    let envelope = InitEnvelope::for_dataset(arch, data, delta, k_max)?;
    let s0 = data.mean_sq_targets();
    let r = delta / 2.0;

    let mut a_scale = delta;
    loop {
        let bound = analytic_pl_lower_bound(arch, &envelope, alpha_data, a_scale)?;
        if r * r * bound >= A_SEARCH_MARGIN * 4.0 * s0 {
            break;
        }
        a_scale *= 2.0;
        if a_scale > A_SEARCH_CAP {
            return Err(Error::SearchFailed {
                scale_reached: a_scale,
            });
        }
    }
    let alpha_pl = analytic_pl_lower_bound(arch, &envelope, alpha_data, a_scale)?;

    let params = theorem3_init(arch, delta, k_max, a_scale, seed)?;
    let ball = Ball::new(params.flat().to_vec(), r)?;
    let objective = NetworkObjective::new(arch.clone(), data.clone())?;
    let lipschitz = lipschitz_bounds(
        &objective,
        &ball,
        lipschitz_mode,
        derive_seed(seed, "find-a-lipschitz"),
    )?;
    let certificate = build_certificate(
        &objective,
        &ball,
        AlphaEstimate::analytic(alpha_pl)?,
        lipschitz,
    )?;
    Ok(TrainSetup {
        a_scale,
        eta: certificate.eta,
        certificate,
        params,
        envelope,
        alpha_data,
        alpha_pl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{self, Activation};
    use alloc::vec;

    fn linear_arch(input_dim: usize, dims: Vec<usize>) -> NetworkArchitecture {
        let acts = vec![Activation::Linear; dims.len() - 1];
        NetworkArchitecture::new(input_dim, dims, acts).unwrap()
    }

    #[test]
    fn magnitude_recursion_worked_example() {
        // depth 3, linear activations, d = 2, d1 = 2, delta = K = M = 1:
        // a1 = 1*1*2 + 1 = 3, a2 = 3 * 1.5 * 2 + 1 = 10.
        let arch = linear_arch(2, vec![2, 1, 1]);
        let a = magnitude_recursion(&arch, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(a, vec![3.0, 10.0]);
    }

    #[test]
    fn magnitude_recursion_degenerate_data() {
        let arch = linear_arch(4, vec![3, 1]);
        let a = magnitude_recursion(&arch, 0.25, 0.5, 0.0).unwrap();
        assert_eq!(a, vec![0.25]);
    }

    #[test]
    fn magnitude_recursion_is_monotone() {
        let arch = NetworkArchitecture::new(
            3,
            vec![4, 3, 1],
            vec![Activation::Tanh, Activation::Tanh],
        )
        .unwrap();
        let base = magnitude_recursion(&arch, 0.2, 0.5, 1.0).unwrap();
        for (bumped, name) in [
            (magnitude_recursion(&arch, 0.2, 0.5, 1.5).unwrap(), "m"),
            (magnitude_recursion(&arch, 0.3, 0.5, 1.0).unwrap(), "delta"),
            (magnitude_recursion(&arch, 0.2, 0.8, 1.0).unwrap(), "k_max"),
        ] {
            for (b, a) in bumped.iter().zip(base.iter()) {
                assert!(b >= a, "recursion not monotone in {name}: {b} < {a}");
            }
        }
    }

    #[test]
    fn envelope_bounds_preactivations() {
        // Random perturbations within delta/2 of a structured init must keep
        // every pre-activation inside the a_l caps.
        let arch = NetworkArchitecture::new(
            4,
            vec![3, 2, 1],
            vec![Activation::Tanh, Activation::Softplus],
        )
        .unwrap();
        let data = Dataset::new(
            vec![
                vec![0.5, -0.25, 0.8, 0.1],
                vec![-0.3, 0.6, 0.2, -0.9],
            ],
            vec![0.4, -0.2],
        )
        .unwrap();
        let (delta, k_max) = (0.2, 0.3);
        let envelope = InitEnvelope::for_dataset(&arch, &data, delta, k_max).unwrap();
        let params = theorem3_init(&arch, delta, k_max, 1.0, 9).unwrap();
        let ball = Ball::new(params.flat().to_vec(), delta / 2.0).unwrap();
        let mut rng = SplitMix64::new(31);
        for _ in 0..10 {
            let w = sample_in_ball(&mut rng, &ball);
            let perturbed = NetworkParams::from_flat(&arch, w).unwrap();
            for i in 0..data.len() {
                let (_, cache) = nn::forward(&arch, &perturbed, data.input(i)).unwrap();
                for (l, a_l) in envelope.a.iter().enumerate() {
                    let worst = max_abs(&cache.pre[l]);
                    assert!(
                        worst <= *a_l + 1e-12,
                        "layer {l}: |g| = {worst} exceeds a_l = {a_l}"
                    );
                }
            }
        }
    }

    #[test]
    fn pl_bound_two_layer_specialization() {
        // depth 2: no middle matrices, (delta/2)^0 = 1, bound =
        // 4 alpha (A - delta/2)^2 c1^2 d1.
        let arch = NetworkArchitecture::new(3, vec![4, 1], vec![Activation::Tanh]).unwrap();
        let envelope = InitEnvelope::new(&arch, 0.5, 0.5, 1.0).unwrap();
        let bound = analytic_pl_lower_bound(&arch, &envelope, 0.7, 2.0).unwrap();
        let c1 = envelope.c[0];
        let expect = 4.0 * 0.7 * (2.0 - 0.25) * (2.0 - 0.25) * c1 * c1 * 4.0;
        assert!((bound - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn pl_bound_monotone_in_scale_and_alpha() {
        let arch = NetworkArchitecture::new(
            3,
            vec![2, 2, 1],
            vec![Activation::Tanh, Activation::Tanh],
        )
        .unwrap();
        let envelope = InitEnvelope::new(&arch, 0.1, 0.2, 0.5).unwrap();
        let b = |alpha: f64, a: f64| analytic_pl_lower_bound(&arch, &envelope, alpha, a).unwrap();
        assert!(b(0.5, 2.0) > b(0.5, 1.0));
        assert!(b(0.9, 1.0) > b(0.5, 1.0));
        assert!(analytic_pl_lower_bound(&arch, &envelope, 0.5, 0.04).is_err());
    }

    #[test]
    fn pl_bound_holds_at_sampled_perturbations() {
        let arch = NetworkArchitecture::new(
            4,
            vec![3, 1],
            vec![Activation::Tanh],
        )
        .unwrap();
        let data = Dataset::new(
            vec![vec![0.6, 0.1, -0.4, 0.2], vec![-0.2, 0.5, 0.3, -0.1]],
            vec![0.5, -0.7],
        )
        .unwrap();
        let setup = find_a(&arch, &data, 0.1, 0.1, 4, BoundMode::Sampled).unwrap();
        let ball = &setup.certificate.ball;
        let mut rng = SplitMix64::new(17);
        let mut checked = 0;
        while checked < 20 {
            let w = sample_in_ball(&mut rng, ball);
            let perturbed = NetworkParams::from_flat(&arch, w).unwrap();
            let ratio = nn::pl_ratio(&arch, &perturbed, &data).unwrap();
            if ratio == f64::INFINITY {
                continue;
            }
            assert!(
                ratio >= setup.alpha_pl * (1.0 - 1e-9),
                "ratio {ratio} under bound {}",
                setup.alpha_pl
            );
            checked += 1;
        }
    }

    #[test]
    fn find_a_zero_targets_accepts_immediately() {
        let arch = NetworkArchitecture::new(
            3,
            vec![2, 1],
            vec![Activation::Tanh],
        )
        .unwrap();
        let data = Dataset::new(
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        let setup = find_a(&arch, &data, 0.2, 0.2, 1, BoundMode::Sampled).unwrap();
        assert_eq!(setup.a_scale, 0.2);
    }

    #[test]
    fn find_a_doubling_is_minimal() {
        let arch = NetworkArchitecture::new(
            4,
            vec![3, 1],
            vec![Activation::Tanh],
        )
        .unwrap();
        let data = Dataset::new(
            vec![vec![0.7, 0.1, 0.0, -0.2], vec![0.1, -0.6, 0.3, 0.2]],
            vec![0.9, -0.8],
        )
        .unwrap();
        let (delta, k_max) = (0.1, 0.1);
        let setup = find_a(&arch, &data, delta, k_max, 2, BoundMode::Sampled).unwrap();
        let r = delta / 2.0;
        let s0 = data.mean_sq_targets();
        let meets = |a: f64| {
            let bound =
                analytic_pl_lower_bound(&arch, &setup.envelope, setup.alpha_data, a).unwrap();
            r * r * bound >= A_SEARCH_MARGIN * 4.0 * s0
        };
        assert!(meets(setup.a_scale));
        if setup.a_scale > delta {
            assert!(!meets(setup.a_scale / 2.0), "doubling overshot");
        }
        // and the certificate criterion itself holds
        let (holds, slack) = crate::certificate::check_criterion(
            setup.certificate.f_x0,
            r,
            &setup.certificate.alpha,
        );
        assert!(holds && slack > 0.0);
    }

    #[test]
    fn find_a_rejects_dependent_inputs() {
        let arch = NetworkArchitecture::new(
            2,
            vec![2, 1],
            vec![Activation::Tanh],
        )
        .unwrap();
        // three samples in dimension two cannot be independent
        let data = Dataset::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        assert!(matches!(
            find_a(&arch, &data, 0.1, 0.1, 1, BoundMode::Sampled),
            Err(Error::DataDegeneracy { .. })
        ));
    }

    #[test]
    fn data_alpha_beta_examples() {
        // orthonormal columns scaled by sqrt(n): (1/n) X^T X = I
        let n = 3usize;
        let s = math::sqrt(n as f64);
        let data = Dataset::new(
            vec![
                vec![s, 0.0, 0.0, 0.0],
                vec![0.0, s, 0.0, 0.0],
                vec![0.0, 0.0, s, 0.0],
            ],
            vec![0.0; 3],
        )
        .unwrap();
        let (lo, hi) = data_alpha_beta(&data).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);

        // duplicated column: singular
        let dup = Dataset::new(vec![vec![1.0, 2.0], vec![1.0, 2.0]], vec![0.0; 2]).unwrap();
        let (lo, _) = data_alpha_beta(&dup).unwrap();
        assert!(lo.abs() < 1e-12);

        // closed form: eigenvalues of (1/2)[[1,1],[1,2]] are (3 +- sqrt 5)/4
        let two = Dataset::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]], vec![0.0; 2]).unwrap();
        let (lo, hi) = data_alpha_beta(&two).unwrap();
        let root = math::sqrt(5.0);
        assert!((lo - (3.0 - root) / 4.0).abs() < 1e-12);
        assert!((hi - (3.0 + root) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_quadratic_analytic() {
        let q = crate::objective::Quadratic::isotropic(2);
        let ball = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let b = lipschitz_bounds(&q, &ball, BoundMode::Analytic, 0).unwrap();
        assert_eq!((b.l1, b.l2), (2.0, 2.0));
        assert_eq!(b.mode, BoundMode::Analytic);
    }

    #[test]
    fn sampled_bounds_never_exceed_analytic_on_networks() {
        let arch = NetworkArchitecture::new(
            2,
            vec![3, 1],
            vec![Activation::Tanh],
        )
        .unwrap();
        let data = Dataset::new(
            vec![vec![0.8, -0.1], vec![0.2, 0.7]],
            vec![0.3, -0.5],
        )
        .unwrap();
        let params = theorem3_init(&arch, 0.2, 0.3, 1.5, 5).unwrap();
        let objective = NetworkObjective::new(arch.clone(), data).unwrap();
        let ball = Ball::new(params.flat().to_vec(), 0.1).unwrap();
        let analytic = lipschitz_bounds(&objective, &ball, BoundMode::Analytic, 0).unwrap();
        let sampled = lipschitz_bounds(&objective, &ball, BoundMode::Sampled, 1).unwrap();
        assert!(sampled.l1 <= analytic.l1, "L1 sampled {} > analytic {}", sampled.l1, analytic.l1);
        assert!(sampled.l2 <= analytic.l2, "L2 sampled {} > analytic {}", sampled.l2, analytic.l2);
    }

    #[test]
    fn network_bounds_linear_net_closed_form() {
        // depth 2, linear activation, so the documented recursion collapses:
        // f_cap = [M, g1, g2], u-route P = max(w2 * max(M,1), max(g1,1)),
        // forward Q = 2 max(M,1), L1 = 2 R P, L2 = 2 (P^2 + 2 R max(M,1)).
        let arch = linear_arch(2, vec![1, 1]);
        let data = Dataset::new(vec![vec![0.5, -2.0]], vec![0.25]).unwrap();
        let mut params = NetworkParams::zeros(&arch);
        params.weights_mut(&arch, 0).copy_from_slice(&[0.4, 0.1]);
        params.weights_mut(&arch, 1)[0] = 3.0;
        let ball = Ball::new(params.flat().to_vec(), 0.5).unwrap();
        let got = network_partial_bounds(&arch, &data, &ball).unwrap();

        let check = |rho: f64| {
            let m: f64 = 2.0;
            let (w1, b1) = (0.4 + rho, rho);
            let (w2, b2) = (3.0 + rho, rho);
            let g1 = w1 * 2.0 * m + b1;
            let g2 = w2 * 1.0 * g1 + b2;
            let resid = 0.25 + g2;
            let p_back = (w2 * m.max(1.0)).max(g1.max(1.0));
            let p_fwd = {
                let p1 = m.max(1.0);
                g1.max(1.0) + w2 * 1.0 * p1
            };
            let p = p_back.min(p_fwd);
            let q = 2.0 * m.max(1.0);
            (2.0 * resid * p, 2.0 * (p * p + resid * q))
        };
        let l1_expect = check(0.5).0;
        let l2_expect = check(1.0).1;
        assert!((got.0 - l1_expect).abs() < 1e-12 * l1_expect, "{got:?}");
        assert!((got.1 - l2_expect).abs() < 1e-12 * l2_expect, "{got:?}");
    }
}
