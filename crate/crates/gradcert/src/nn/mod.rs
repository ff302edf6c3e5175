//! Feedforward networks: forward pass, analytic backpropagation, the
//! backpropagated row vectors `q`, the Gram matrix of per-sample parameter
//! gradients, and the squared-error loss as an [`Objective`] over the flat
//! parameter vector.
//!
//! Conventions: depth `L >= 2`, output dimension 1, output activation is the
//! identity. The flat parameter layout is `W_1` row-major, then `b_1`, then
//! `W_2`, `b_2`, and so on; everything that serializes or finite-differences
//! parameters relies on this order.

pub mod activation;

pub use activation::Activation;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, ensure_finite, max_abs, norm, Ball, Matrix};
use crate::objective::Objective;
use crate::oracle::{self, ZERO_LOSS_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkArchitecture {
    input_dim: usize,
    layer_dims: Vec<usize>,
    activations: Vec<Activation>,
    /// Per-layer `(weight offset, bias offset)` into the flat vector.
    offsets: Vec<(usize, usize)>,
    param_count: usize,
}

impl NetworkArchitecture {
    /// `layer_dims` are the hidden and output dimensions `d_1 ... d_L` with
    /// `d_L = 1`; `activations` covers layers `1 ... L-1` (the output layer
    /// is the identity).
    pub fn new(
        input_dim: usize,
        layer_dims: Vec<usize>,
        activations: Vec<Activation>,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Input("input dimension must be positive".into()));
        }
        let depth = layer_dims.len();
        if depth < 2 {
            return Err(Error::Input(format!(
                "need depth at least 2 (one hidden layer), got {depth}"
            )));
        }
        if layer_dims.iter().any(|d| *d == 0) {
            return Err(Error::Input("layer dimensions must be positive".into()));
        }
        if *layer_dims.last().unwrap() != 1 {
            return Err(Error::Input(format!(
                "output dimension must be 1, got {}",
                layer_dims.last().unwrap()
            )));
        }
        if activations.len() != depth - 1 {
            return Err(Error::Input(format!(
                "need {} activations for depth {depth}, got {}",
                depth - 1,
                activations.len()
            )));
        }
        for act in &activations {
            act.validate()?;
        }
        let mut offsets = Vec::with_capacity(depth);
        let mut cursor = 0usize;
        let mut prev = input_dim;
        for d in &layer_dims {
            let w_off = cursor;
            cursor += d * prev;
            let b_off = cursor;
            cursor += d;
            offsets.push((w_off, b_off));
            prev = *d;
        }
        Ok(NetworkArchitecture {
            input_dim,
            layer_dims,
            activations,
            offsets,
            param_count: cursor,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn depth(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn width(&self) -> usize {
        *self.layer_dims.iter().max().unwrap()
    }

    /// Total parameter count `sum_l d_l (d_{l-1} + 1)`.
    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn fan_in(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.layer_dims[layer - 1]
        }
    }

    pub fn weight_range(&self, layer: usize) -> core::ops::Range<usize> {
        let (w, _) = self.offsets[layer];
        w..w + self.layer_dims[layer] * self.fan_in(layer)
    }

    pub fn bias_range(&self, layer: usize) -> core::ops::Range<usize> {
        let (_, b) = self.offsets[layer];
        b..b + self.layer_dims[layer]
    }
}

/// Flat parameter vector tied to an architecture's layout.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    flat: Vec<f64>,
}

impl NetworkParams {
    pub fn zeros(arch: &NetworkArchitecture) -> Self {
        NetworkParams {
            flat: vec![0.0; arch.param_count()],
        }
    }

    pub fn from_flat(arch: &NetworkArchitecture, flat: Vec<f64>) -> Result<Self> {
        if flat.len() != arch.param_count() {
            return Err(Error::Input(format!(
                "parameter vector has length {}, architecture needs {}",
                flat.len(),
                arch.param_count()
            )));
        }
        ensure_finite(&flat, "parameters")?;
        Ok(NetworkParams { flat })
    }

    pub fn flat(&self) -> &[f64] {
        &self.flat
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.flat
    }

    pub fn weights<'a>(&'a self, arch: &NetworkArchitecture, layer: usize) -> &'a [f64] {
        &self.flat[arch.weight_range(layer)]
    }

    pub fn bias<'a>(&'a self, arch: &NetworkArchitecture, layer: usize) -> &'a [f64] {
        &self.flat[arch.bias_range(layer)]
    }

    pub fn weights_mut<'a>(&'a mut self, arch: &NetworkArchitecture, layer: usize) -> &'a mut [f64] {
        &mut self.flat[arch.weight_range(layer)]
    }

    pub fn bias_mut<'a>(&'a mut self, arch: &NetworkArchitecture, layer: usize) -> &'a mut [f64] {
        &mut self.flat[arch.bias_range(layer)]
    }
}

/// Training data: `n` input columns of dimension `d` and scalar targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Input("dataset needs at least one sample".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::Input(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let d = inputs[0].len();
        if d == 0 {
            return Err(Error::Input("inputs must have positive dimension".into()));
        }
        for x in &inputs {
            if x.len() != d {
                return Err(Error::Input("inputs have inconsistent dimensions".into()));
            }
            ensure_finite(x, "input")?;
        }
        ensure_finite(&targets, "targets")?;
        Ok(Dataset { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Largest input entry magnitude, the `M` of the envelope recursion.
    pub fn max_abs_entry(&self) -> f64 {
        self.inputs.iter().map(|x| max_abs(x)).fold(0.0, f64::max)
    }

    /// `(1/n) sum y_i^2`, the loss at any all-zero-output parameter point.
    pub fn mean_sq_targets(&self) -> f64 {
        self.targets.iter().map(|y| y * y).sum::<f64>() / self.len() as f64
    }
}

/// Per-layer forward state: pre-activations, post-activations, and the
/// activation slopes at the pre-activations (the diagonal of `D_l`).
#[derive(Debug, Clone)]
pub struct LayerCache {
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
    pub slope: Vec<Vec<f64>>,
}

impl LayerCache {
    pub fn for_arch(arch: &NetworkArchitecture) -> Self {
        let alloc_layers = |a: &NetworkArchitecture| {
            a.layer_dims.iter().map(|d| vec![0.0; *d]).collect::<Vec<_>>()
        };
        LayerCache {
            pre: alloc_layers(arch),
            post: alloc_layers(arch),
            slope: alloc_layers(arch),
        }
    }
}

/// Reusable buffers for repeated gradient evaluation.
pub struct Workspace {
    cache: LayerCache,
    up: Vec<f64>,
    down: Vec<f64>,
}

impl Workspace {
    pub fn for_arch(arch: &NetworkArchitecture) -> Self {
        let width = arch.width().max(arch.input_dim);
        Workspace {
            cache: LayerCache::for_arch(arch),
            up: vec![0.0; width],
            down: vec![0.0; width],
        }
    }
}

fn forward_flat(arch: &NetworkArchitecture, flat: &[f64], x: &[f64], cache: &mut LayerCache) -> f64 {
    let depth = arch.depth();
    for li in 0..depth {
        let rows = arch.layer_dims[li];
        let cols = arch.fan_in(li);
        let w = &flat[arch.weight_range(li)];
        let b = &flat[arch.bias_range(li)];
        let (done, rest) = cache.post.split_at_mut(li);
        let input: &[f64] = if li == 0 { x } else { &done[li - 1] };
        let pre = &mut cache.pre[li];
        for i in 0..rows {
            let row = &w[i * cols..(i + 1) * cols];
            pre[i] = b[i] + dot(row, input);
        }
        let post = &mut rest[0];
        let slope = &mut cache.slope[li];
        if li < depth - 1 {
            let act = arch.activations[li];
            for i in 0..rows {
                post[i] = act.value(pre[i]);
                slope[i] = act.deriv(pre[i]);
            }
        } else {
            post.copy_from_slice(pre);
            slope.fill(1.0);
        }
    }
    cache.post[depth - 1][0]
}

/// Reverse sweep: add `scale * d f / d w` to `out`, reusing the forward
/// cache. `cache` must hold the forward state for `(flat, x)`.
fn accumulate_grad_flat(
    arch: &NetworkArchitecture,
    flat: &[f64],
    x: &[f64],
    ws: &mut Workspace,
    scale: f64,
    out: &mut [f64],
) {
    let depth = arch.depth();
    ws.up[0] = 1.0;
    let mut up_len = 1usize;
    for li in (0..depth).rev() {
        let rows = arch.layer_dims[li];
        let cols = arch.fan_in(li);
        let w = &flat[arch.weight_range(li)];
        let w_off = arch.weight_range(li).start;
        let b_off = arch.bias_range(li).start;
        debug_assert_eq!(rows, up_len);
        {
            let input: &[f64] = if li == 0 { x } else { &ws.cache.post[li - 1] };
            for i in 0..rows {
                let u = scale * ws.up[i];
                let block = &mut out[w_off + i * cols..w_off + (i + 1) * cols];
                for (o, inp) in block.iter_mut().zip(input.iter()) {
                    *o += u * inp;
                }
                out[b_off + i] += u;
            }
        }
        if li > 0 {
            let slope = &ws.cache.slope[li - 1];
            for j in 0..cols {
                let mut acc = 0.0;
                for i in 0..rows {
                    acc += ws.up[i] * w[i * cols + j];
                }
                ws.down[j] = acc * slope[j];
            }
            core::mem::swap(&mut ws.up, &mut ws.down);
            up_len = cols;
        }
    }
}

/// Forward pass returning the scalar prediction and the full layer cache.
pub fn forward(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    x: &[f64],
) -> Result<(f64, LayerCache)> {
    if x.len() != arch.input_dim {
        return Err(Error::Input(format!(
            "input has dimension {}, network expects {}",
            x.len(),
            arch.input_dim
        )));
    }
    let mut cache = LayerCache::for_arch(arch);
    let pred = forward_flat(arch, params.flat(), x, &mut cache);
    Ok((pred, cache))
}

/// Gradient of the network output with respect to all parameters.
pub fn grad_network(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    x: &[f64],
) -> Result<Vec<f64>> {
    if x.len() != arch.input_dim {
        return Err(Error::Input("input dimension mismatch".into()));
    }
    let mut ws = Workspace::for_arch(arch);
    let mut out = vec![0.0; arch.param_count()];
    forward_flat(arch, params.flat(), x, &mut ws.cache);
    accumulate_grad_flat(arch, params.flat(), x, &mut ws, 1.0, &mut out);
    Ok(out)
}

fn loss_flat(arch: &NetworkArchitecture, flat: &[f64], data: &Dataset, cache: &mut LayerCache) -> f64 {
    let mut total = 0.0;
    for i in 0..data.len() {
        let pred = forward_flat(arch, flat, data.input(i), cache);
        let resid = data.target(i) - pred;
        total += resid * resid;
    }
    total / data.len() as f64
}

/// Mean squared error `S(w) = (1/n) sum (y_i - f(x_i, w))^2`.
pub fn loss(arch: &NetworkArchitecture, params: &NetworkParams, data: &Dataset) -> Result<f64> {
    check_data(arch, data)?;
    let mut cache = LayerCache::for_arch(arch);
    Ok(loss_flat(arch, params.flat(), data, &mut cache))
}

fn grad_loss_flat(
    arch: &NetworkArchitecture,
    flat: &[f64],
    data: &Dataset,
    ws: &mut Workspace,
    out: &mut [f64],
) {
    out.fill(0.0);
    let n = data.len() as f64;
    for i in 0..data.len() {
        let pred = forward_flat(arch, flat, data.input(i), &mut ws.cache);
        let scale = 2.0 * (pred - data.target(i)) / n;
        accumulate_grad_flat(arch, flat, data.input(i), ws, scale, out);
    }
}

/// Gradient of the mean squared error: `(2/n) sum (f(x_i,w) - y_i) grad_w f`.
pub fn grad_loss(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    data: &Dataset,
) -> Result<Vec<f64>> {
    check_data(arch, data)?;
    let mut ws = Workspace::for_arch(arch);
    let mut out = vec![0.0; arch.param_count()];
    grad_loss_flat(arch, params.flat(), data, &mut ws, &mut out);
    Ok(out)
}

fn check_data(arch: &NetworkArchitecture, data: &Dataset) -> Result<()> {
    if data.input_dim() != arch.input_dim {
        return Err(Error::Input(format!(
            "data has input dimension {}, network expects {}",
            data.input_dim(),
            arch.input_dim
        )));
    }
    Ok(())
}

/// The backpropagated row vector `q(x, w)`: entry `i` is the derivative of
/// the output with respect to the pre-activation `g_1[i]`, computed as the
/// explicit product `W_L D_{L-1} W_{L-1} ... W_2 D_1` so it can cross-check
/// the reverse-mode path. The first-layer weight gradient factorizes as
/// `d f / d (W_1)_{ij} = x_j q_i`.
pub fn q_vector(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    x: &[f64],
) -> Result<Vec<f64>> {
    let (_, cache) = forward(arch, params, x)?;
    let depth = arch.depth();
    let flat = params.flat();
    let mut row: Vec<f64> = flat[arch.weight_range(depth - 1)].to_vec();
    for li in (1..depth - 1).rev() {
        for (r, s) in row.iter_mut().zip(cache.slope[li].iter()) {
            *r *= s;
        }
        let rows = arch.layer_dims[li];
        let cols = arch.fan_in(li);
        let w = &flat[arch.weight_range(li)];
        let mut next = vec![0.0; cols];
        for i in 0..rows {
            let ri = row[i];
            for j in 0..cols {
                next[j] += ri * w[i * cols + j];
            }
        }
        row = next;
    }
    for (r, s) in row.iter_mut().zip(cache.slope[0].iter()) {
        *r *= s;
    }
    Ok(row)
}

/// The `n x n` Gram matrix `H(w)` of per-sample parameter gradients:
/// `H_ij = grad_w f(x_i, w) . grad_w f(x_j, w)`. Positive semidefinite by
/// construction.
pub fn gram_matrix(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    data: &Dataset,
) -> Result<Matrix> {
    check_data(arch, data)?;
    let n = data.len();
    let mut grads = Vec::with_capacity(n);
    let mut ws = Workspace::for_arch(arch);
    for i in 0..n {
        let mut g = vec![0.0; arch.param_count()];
        forward_flat(arch, params.flat(), data.input(i), &mut ws.cache);
        accumulate_grad_flat(arch, params.flat(), data.input(i), &mut ws, 1.0, &mut g);
        grads.push(g);
    }
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(&grads[i], &grads[j]);
            h.set(i, j, v);
            h.set(j, i, v);
        }
    }
    Ok(h)
}

/// Smallest eigenvalue of a Gram matrix via the Jacobi oracle.
pub fn min_eig_gram(h: &Matrix) -> Result<f64> {
    if !h.is_symmetric(1e-10) {
        return Err(Error::Input("Gram matrix must be symmetric".into()));
    }
    Ok(oracle::min_eigen_sym(h)?.0)
}

/// The ratio `|grad S(w)|^2 / S(w)`, with `f64::INFINITY` when the loss is
/// zero (below the absolute zero-loss tolerance).
pub fn pl_ratio(
    arch: &NetworkArchitecture,
    params: &NetworkParams,
    data: &Dataset,
) -> Result<f64> {
    let s = loss(arch, params, data)?;
    if s <= ZERO_LOSS_TOL {
        return Ok(f64::INFINITY);
    }
    let g = grad_loss(arch, params, data)?;
    let gn = norm(&g);
    Ok(gn * gn / s)
}

/// The squared-error loss of a fixed network and dataset, as an objective
/// over the flat parameter vector.
#[derive(Debug, Clone)]
pub struct NetworkObjective {
    arch: NetworkArchitecture,
    data: Dataset,
}

impl NetworkObjective {
    pub fn new(arch: NetworkArchitecture, data: Dataset) -> Result<Self> {
        check_data(&arch, &data)?;
        Ok(NetworkObjective { arch, data })
    }

    pub fn arch(&self) -> &NetworkArchitecture {
        &self.arch
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }
}

impl Objective for NetworkObjective {
    fn dim(&self) -> usize {
        self.arch.param_count()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut cache = LayerCache::for_arch(&self.arch);
        loss_flat(&self.arch, x, &self.data, &mut cache)
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        let mut ws = Workspace::for_arch(&self.arch);
        grad_loss_flat(&self.arch, x, &self.data, &mut ws, grad);
    }

    fn analytic_partial_bounds(&self, ball: &Ball) -> Option<(f64, f64)> {
        crate::bounds::network_partial_bounds(&self.arch, &self.data, ball)
    }
}
