//! Minimal dense-network substrate.
//!
//! A [`ParamStore`] owns every trainable tensor and a disjoint partition of
//! all scalars into named groups; [`DenseNet`] is a stack of affine layers
//! plus elementwise activations evaluated against a store. Reverse-mode
//! gradients are computed layer-by-layer without a tape: nets here are a few
//! layers deep and the backward pass recomputes the forward activations it
//! needs.

use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};
use crate::linalg::Mat;
use rand::Rng;

/// Index of a parameter inside a [`ParamStore`].
pub type ParamId = usize;

/// Index of a group inside a [`ParamStore`] (registration order).
pub type GroupId = usize;

/// A contiguous row range of one parameter, owned by a group.
///
/// Row-major storage makes a row range a contiguous scalar slice, for both
/// weight matrices and bias column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSlice {
    pub param: ParamId,
    pub row_start: usize,
    pub row_end: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDef {
    pub name: String,
    pub slices: Vec<GroupSlice>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamEntry {
    name: String,
    value: Mat,
}

/// Named parameter tensors plus a disjoint group partition of every scalar.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamStore {
    params: Vec<ParamEntry>,
    groups: Vec<GroupDef>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_param(&mut self, name: &str, value: Mat) -> Result<ParamId> {
        if self.params.iter().any(|p| p.name == name) {
            return Err(EditKitError::Config(format!("duplicate parameter name {name}")));
        }
        self.params.push(ParamEntry { name: name.to_string(), value });
        Ok(self.params.len() - 1)
    }

    pub fn add_group(&mut self, name: &str, slices: Vec<GroupSlice>) -> Result<GroupId> {
        if self.groups.iter().any(|g| g.name == name) {
            return Err(EditKitError::Config(format!("duplicate group name {name}")));
        }
        for s in &slices {
            let p = self.param(s.param)?;
            if s.row_start >= s.row_end || s.row_end > p.rows {
                return Err(EditKitError::Shape(format!(
                    "group {name}: rows {}..{} out of range for {}x{} parameter",
                    s.row_start, s.row_end, p.rows, p.cols
                )));
            }
        }
        self.groups.push(GroupDef { name: name.to_string(), slices });
        Ok(self.groups.len() - 1)
    }

    pub fn param(&self, id: ParamId) -> Result<&Mat> {
        self.params
            .get(id)
            .map(|p| &p.value)
            .ok_or_else(|| EditKitError::Lookup { kind: "parameter", name: id.to_string() })
    }

    pub fn param_mut(&mut self, id: ParamId) -> Result<&mut Mat> {
        self.params
            .get_mut(id)
            .map(|p| &mut p.value)
            .ok_or_else(|| EditKitError::Lookup { kind: "parameter", name: id.to_string() })
    }

    pub fn param_name(&self, id: ParamId) -> &str {
        &self.params[id].name
    }

    pub fn param_id(&self, name: &str) -> Result<ParamId> {
        self.params
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| EditKitError::Lookup { kind: "parameter", name: name.to_string() })
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, g: GroupId) -> Result<&GroupDef> {
        self.groups
            .get(g)
            .ok_or_else(|| EditKitError::Lookup { kind: "group", name: g.to_string() })
    }

    pub fn group_id(&self, name: &str) -> Result<GroupId> {
        self.groups
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| EditKitError::Lookup { kind: "group", name: name.to_string() })
    }

    pub fn groups(&self) -> &[GroupDef] {
        &self.groups
    }

    pub fn group_len(&self, g: GroupId) -> Result<usize> {
        let def = self.group(g)?;
        let mut n = 0;
        for s in &def.slices {
            n += (s.row_end - s.row_start) * self.param(s.param)?.cols;
        }
        Ok(n)
    }

    /// Concatenated scalars of a group, in slice order.
    pub fn group_vec(&self, g: GroupId) -> Result<Vec<f64>> {
        let def = self.group(g)?;
        let mut out = Vec::new();
        for s in &def.slices {
            out.extend_from_slice(self.param(s.param)?.row_block(s.row_start, s.row_end));
        }
        Ok(out)
    }

    pub fn set_group_vec(&mut self, g: GroupId, vals: &[f64]) -> Result<()> {
        let def = self.group(g)?.clone();
        let mut offset = 0;
        for s in &def.slices {
            let block = self.param_mut(s.param)?.row_block_mut(s.row_start, s.row_end);
            let n = block.len();
            block.copy_from_slice(&vals[offset..offset + n]);
            offset += n;
        }
        if offset != vals.len() {
            return Err(EditKitError::Shape(format!(
                "group {} expects {} scalars, got {}",
                def.name,
                offset,
                vals.len()
            )));
        }
        Ok(())
    }

    /// Euclidean norm of one group's concatenated scalars.
    pub fn group_norm(&self, g: GroupId) -> Result<f64> {
        let def = self.group(g)?;
        let mut acc = 0.0;
        for s in &def.slices {
            for x in self.param(s.param)?.row_block(s.row_start, s.row_end) {
                acc += x * x;
            }
        }
        Ok(acc.sqrt())
    }

    /// Norms of all groups, indexed by [`GroupId`].
    pub fn group_norms(&self) -> Vec<f64> {
        (0..self.groups.len()).map(|g| self.group_norm(g).unwrap()).collect()
    }

    /// Sets every scalar of the group to exactly 0.0.
    pub fn zero_group(&mut self, g: GroupId) -> Result<()> {
        let def = self.group(g)?.clone();
        for s in &def.slices {
            self.param_mut(s.param)?
                .row_block_mut(s.row_start, s.row_end)
                .fill(0.0);
        }
        Ok(())
    }

    /// Checks that the groups cover every scalar exactly once.
    pub fn validate_partition(&self) -> Result<()> {
        let mut covered: Vec<Vec<bool>> =
            self.params.iter().map(|p| vec![false; p.value.rows]).collect();
        for g in &self.groups {
            for s in &g.slices {
                if s.param >= covered.len() {
                    return Err(EditKitError::Lookup {
                        kind: "parameter",
                        name: s.param.to_string(),
                    });
                }
                for r in s.row_start..s.row_end {
                    if covered[s.param][r] {
                        return Err(EditKitError::Config(format!(
                            "row {r} of parameter {} covered twice",
                            self.params[s.param].name
                        )));
                    }
                    covered[s.param][r] = true;
                }
            }
        }
        for (p, rows) in covered.iter().enumerate() {
            if let Some(r) = rows.iter().position(|c| !c) {
                return Err(EditKitError::Config(format!(
                    "row {r} of parameter {} not covered by any group",
                    self.params[p].name
                )));
            }
        }
        Ok(())
    }
}

/// Gradient (or momentum) buffers, shape-congruent with a [`ParamStore`].
#[derive(Debug, Clone)]
pub struct GradRecord {
    mats: Vec<Mat>,
}

impl GradRecord {
    pub fn zeros_like(store: &ParamStore) -> Self {
        GradRecord {
            mats: store
                .params
                .iter()
                .map(|p| Mat::zeros(p.value.rows, p.value.cols))
                .collect(),
        }
    }

    pub fn mat(&self, id: ParamId) -> &Mat {
        &self.mats[id]
    }

    pub fn mat_mut(&mut self, id: ParamId) -> &mut Mat {
        &mut self.mats[id]
    }

    pub fn fill_zero(&mut self) {
        for m in &mut self.mats {
            m.data.fill(0.0);
        }
    }

    pub fn group_vec(&self, store: &ParamStore, g: GroupId) -> Result<Vec<f64>> {
        let def = store.group(g)?;
        let mut out = Vec::new();
        for s in &def.slices {
            out.extend_from_slice(self.mats[s.param].row_block(s.row_start, s.row_end));
        }
        Ok(out)
    }

    pub fn set_group_vec(&mut self, store: &ParamStore, g: GroupId, vals: &[f64]) -> Result<()> {
        let def = store.group(g)?;
        let mut offset = 0;
        for s in &def.slices {
            let block = self.mats[s.param].row_block_mut(s.row_start, s.row_end);
            let n = block.len();
            block.copy_from_slice(&vals[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.mats.iter().all(|m| m.data.iter().all(|x| x.is_finite()))
    }

    /// max |g| over every entry, for logging.
    pub fn max_abs(&self) -> f64 {
        self.mats
            .iter()
            .flat_map(|m| m.data.iter())
            .fold(0.0_f64, |a, &x| a.max(x.abs()))
    }
}

/// Elementwise activation. The relu subgradient at 0 is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
        }
    }

    #[inline]
    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// One affine layer: `act(W x + b)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    pub weight: ParamId,
    pub bias: ParamId,
    pub activation: Activation,
    pub in_dim: usize,
    pub out_dim: usize,
}

/// How a net's parameters are partitioned into groups at build time.
pub enum Grouping {
    /// One group per layer (weights + bias), named `{prefix}.l{i}`.
    PerLayer,
    /// Output rows split into equal contiguous blocks, named
    /// `{prefix}.r{block}`. Only valid for single-layer nets whose output
    /// width is divisible by the block count.
    OutputRegions(usize),
}

/// Feed-forward dense network whose parameters live in a [`ParamStore`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
}

impl DenseNet {
    /// Creates parameters (seeded uniform Xavier weights scaled by
    /// `init_scale`, zero biases) and groups for a net with the given layer
    /// widths.
    pub fn build(
        store: &mut ParamStore,
        prefix: &str,
        widths: &[usize],
        activations: &[Activation],
        grouping: Grouping,
        init_scale: f64,
        rng: &mut impl Rng,
    ) -> Result<DenseNet> {
        if widths.len() < 2 {
            return Err(EditKitError::Config("net needs at least one layer".into()));
        }
        if activations.len() != widths.len() - 1 {
            return Err(EditKitError::Config(format!(
                "{} layers but {} activations",
                widths.len() - 1,
                activations.len()
            )));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(EditKitError::Config("zero layer width".into()));
        }
        let mut layers = Vec::new();
        for i in 0..widths.len() - 1 {
            let (fan_in, fan_out) = (widths[i], widths[i + 1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt() * init_scale;
            let mut w = Mat::zeros(fan_out, fan_in);
            for v in &mut w.data {
                *v = rng.random_range(-s..=s);
            }
            let weight = store.add_param(&format!("{prefix}.l{i}.w"), w)?;
            let bias = store.add_param(&format!("{prefix}.l{i}.b"), Mat::zeros(fan_out, 1))?;
            layers.push(Layer {
                weight,
                bias,
                activation: activations[i],
                in_dim: fan_in,
                out_dim: fan_out,
            });
        }
        match grouping {
            Grouping::PerLayer => {
                for (i, l) in layers.iter().enumerate() {
                    store.add_group(
                        &format!("{prefix}.l{i}"),
                        vec![
                            GroupSlice { param: l.weight, row_start: 0, row_end: l.out_dim },
                            GroupSlice { param: l.bias, row_start: 0, row_end: l.out_dim },
                        ],
                    )?;
                }
            }
            Grouping::OutputRegions(blocks) => {
                if layers.len() != 1 {
                    return Err(EditKitError::Config(
                        "region grouping requires a single-layer net".into(),
                    ));
                }
                let l = &layers[0];
                if blocks == 0 || l.out_dim % blocks != 0 {
                    return Err(EditKitError::Config(format!(
                        "{} output rows not divisible into {} region blocks",
                        l.out_dim, blocks
                    )));
                }
                let rows_per = l.out_dim / blocks;
                for r in 0..blocks {
                    let (r0, r1) = (r * rows_per, (r + 1) * rows_per);
                    store.add_group(
                        &format!("{prefix}.r{r}"),
                        vec![
                            GroupSlice { param: l.weight, row_start: r0, row_end: r1 },
                            GroupSlice { param: l.bias, row_start: r0, row_end: r1 },
                        ],
                    )?;
                }
            }
        }
        Ok(DenseNet { layers })
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    /// Forward pass. Deterministic given identical store and input.
    pub fn forward(&self, store: &ParamStore, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim() {
            return Err(EditKitError::Shape(format!(
                "forward: input length {} != first layer width {}",
                input.len(),
                self.in_dim()
            )));
        }
        let mut x = input.to_vec();
        for l in &self.layers {
            let w = store.param(l.weight)?;
            let b = store.param(l.bias)?;
            let mut z = w.matvec(&x)?;
            for (zi, bi) in z.iter_mut().zip(b.data.iter()) {
                *zi += bi;
            }
            for zi in &mut z {
                *zi = l.activation.apply(*zi);
            }
            x = z;
        }
        Ok(x)
    }

    /// Gradients of `<output, cotangent>` w.r.t. every parameter and the
    /// input. Parameter gradients are accumulated into `grads`; the input
    /// cotangent is returned.
    pub fn backward_into(
        &self,
        store: &ParamStore,
        input: &[f64],
        cotangent: &[f64],
        grads: &mut GradRecord,
    ) -> Result<Vec<f64>> {
        if input.len() != self.in_dim() {
            return Err(EditKitError::Shape(format!(
                "backward: input length {} != first layer width {}",
                input.len(),
                self.in_dim()
            )));
        }
        if cotangent.len() != self.out_dim() {
            return Err(EditKitError::Shape(format!(
                "backward: cotangent length {} != output width {}",
                cotangent.len(),
                self.out_dim()
            )));
        }
        // Forward, keeping per-layer inputs and pre-activations.
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let mut preacts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let mut x = input.to_vec();
        for l in &self.layers {
            let w = store.param(l.weight)?;
            let b = store.param(l.bias)?;
            let mut z = w.matvec(&x)?;
            for (zi, bi) in z.iter_mut().zip(b.data.iter()) {
                *zi += bi;
            }
            inputs.push(x);
            let mut a = z.clone();
            for ai in &mut a {
                *ai = l.activation.apply(*ai);
            }
            preacts.push(z);
            x = a;
        }
        // Reverse sweep.
        let mut cot = cotangent.to_vec();
        for (i, l) in self.layers.iter().enumerate().rev() {
            let z = &preacts[i];
            let xin = &inputs[i];
            let mut dz = cot;
            for (d, zi) in dz.iter_mut().zip(z.iter()) {
                *d *= l.activation.derivative(*zi);
            }
            grads.mat_mut(l.weight).add_outer(&dz, xin, 1.0);
            {
                let db = grads.mat_mut(l.bias);
                for (g, d) in db.data.iter_mut().zip(dz.iter()) {
                    *g += d;
                }
            }
            cot = store.param(l.weight)?.matvec_t(&dz)?;
        }
        Ok(cot)
    }

    /// Convenience wrapper returning a fresh [`GradRecord`] plus the input
    /// cotangent.
    pub fn backward(
        &self,
        store: &ParamStore,
        input: &[f64],
        cotangent: &[f64],
    ) -> Result<(GradRecord, Vec<f64>)> {
        let mut grads = GradRecord::zeros_like(store);
        let input_cot = self.backward_into(store, input, cotangent, &mut grads)?;
        Ok((grads, input_cot))
    }

    /// Parameter ids of this net, in layer order.
    pub fn param_ids(&self) -> Vec<ParamId> {
        self.layers.iter().flat_map(|l| [l.weight, l.bias]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_layer(store: &mut ParamStore, w: Mat, b: Vec<f64>, act: Activation) -> DenseNet {
        let (out_dim, in_dim) = (w.rows, w.cols);
        let weight = store.add_param("t.l0.w", w).unwrap();
        let bias = store.add_param("t.l0.b", Mat::col_vec(&b)).unwrap();
        store
            .add_group(
                "t.l0",
                vec![
                    GroupSlice { param: weight, row_start: 0, row_end: out_dim },
                    GroupSlice { param: bias, row_start: 0, row_end: out_dim },
                ],
            )
            .unwrap();
        DenseNet {
            layers: vec![Layer { weight, bias, activation: act, in_dim, out_dim }],
        }
    }

    /// Straight-line evaluator used as an independent oracle: no Mat helpers,
    /// explicit index loops.
    fn naive_forward(store: &ParamStore, net: &DenseNet, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        for l in &net.layers {
            let w = store.param(l.weight).unwrap();
            let b = store.param(l.bias).unwrap();
            let mut y = vec![0.0; l.out_dim];
            for r in 0..l.out_dim {
                let mut acc = b.data[r];
                for c in 0..l.in_dim {
                    acc += w.data[r * l.in_dim + c] * x[c];
                }
                y[r] = l.activation.apply(acc);
            }
            x = y;
        }
        x
    }

    #[test]
    fn forward_identity_single_layer() {
        let mut store = ParamStore::new();
        let net = single_layer(&mut store, Mat::identity(2), vec![0.0, 0.0], Activation::Identity);
        assert_eq!(net.forward(&store, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn forward_hand_computed_affine() {
        let mut store = ParamStore::new();
        let w = Mat::from_vec(2, 2, vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        let net = single_layer(&mut store, w, vec![1.0, 1.0], Activation::Identity);
        assert_eq!(net.forward(&store, &[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn forward_matches_naive_evaluator_on_random_three_layer_tanh_net() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let net = DenseNet::build(
            &mut store,
            "n",
            &[5, 9, 7, 4],
            &[Activation::Tanh, Activation::Tanh, Activation::Tanh],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        // Biases initialize to zero; give them nonzero values for the check.
        for l in &net.layers {
            let b = store.param_mut(l.bias).unwrap();
            for (i, v) in b.data.iter_mut().enumerate() {
                *v = 0.1 * (i as f64 + 1.0);
            }
        }
        let input: Vec<f64> = (0..5).map(|i| 0.3 * (i as f64) - 0.7).collect();
        let got = net.forward(&store, &input).unwrap();
        let want = naive_forward(&store, &net, &input);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_shape_error() {
        let mut store = ParamStore::new();
        let net = single_layer(&mut store, Mat::identity(2), vec![0.0, 0.0], Activation::Identity);
        assert!(matches!(net.forward(&store, &[1.0]), Err(EditKitError::Shape(_))));
    }

    #[test]
    fn backward_zero_cotangent_gives_zero_grads() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = DenseNet::build(
            &mut store,
            "n",
            &[3, 4, 2],
            &[Activation::Tanh, Activation::Identity],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        let (grads, input_cot) = net.backward(&store, &[0.5, -0.5, 0.1], &[0.0, 0.0]).unwrap();
        assert!(input_cot.iter().all(|&x| x == 0.0));
        for id in net.param_ids() {
            assert!(grads.mat(id).data.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn backward_scalar_linear_product_rule() {
        // y = w * x with w = 5, x = 2: dy/dw = 2, dy/dx = 5.
        let mut store = ParamStore::new();
        let w = Mat::from_vec(1, 1, vec![5.0]).unwrap();
        let net = single_layer(&mut store, w, vec![0.0], Activation::Identity);
        let (grads, input_cot) = net.backward(&store, &[2.0], &[1.0]).unwrap();
        assert_eq!(grads.mat(net.layers[0].weight).data[0], 2.0);
        assert_eq!(input_cot, vec![5.0]);
    }

    #[test]
    fn backward_matches_central_finite_differences() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = DenseNet::build(
            &mut store,
            "n",
            &[4, 6, 3],
            &[Activation::Tanh, Activation::Tanh],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        let input = vec![0.3, -0.8, 0.2, 0.9];
        let cot = vec![0.7, -1.1, 0.4];
        let (grads, _) = net.backward(&store, &input, &cot).unwrap();

        let h = 1e-5;
        let loss = |store: &ParamStore| {
            let out = net.forward(store, &input).unwrap();
            out.iter().zip(cot.iter()).map(|(o, c)| o * c).sum::<f64>()
        };
        for id in net.param_ids() {
            for k in 0..store.param(id).unwrap().len() {
                let orig = store.param(id).unwrap().data[k];
                store.param_mut(id).unwrap().data[k] = orig + h;
                let up = loss(&store);
                store.param_mut(id).unwrap().data[k] = orig - h;
                let down = loss(&store);
                store.param_mut(id).unwrap().data[k] = orig;
                let fd = (up - down) / (2.0 * h);
                let an = grads.mat(id).data[k];
                let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(1e-8);
                assert!(rel < 1e-4, "param {id} entry {k}: analytic {an} vs fd {fd}");
            }
        }
    }

    #[test]
    fn group_norms_trivial_cases() {
        let mut store = ParamStore::new();
        let p = store.add_param("v", Mat::col_vec(&[3.0, 4.0, 3.0])).unwrap();
        store
            .add_group("g1", vec![GroupSlice { param: p, row_start: 0, row_end: 2 }])
            .unwrap();
        store
            .add_group("g2", vec![GroupSlice { param: p, row_start: 2, row_end: 3 }])
            .unwrap();
        store.validate_partition().unwrap();
        assert_eq!(store.group_norm(0).unwrap(), 5.0);
        assert_eq!(store.group_norm(1).unwrap(), 3.0);

        store.zero_group(0).unwrap();
        store.zero_group(0).unwrap(); // idempotent
        assert_eq!(store.group_norm(0).unwrap(), 0.0);
        assert_eq!(store.group_norm(1).unwrap(), 3.0);
        assert!(store.param(p).unwrap().data[..2].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn group_norms_match_flatten_oracle_and_zeroing_bookkeeping() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        DenseNet::build(
            &mut store,
            "a",
            &[6, 8],
            &[Activation::Identity],
            Grouping::OutputRegions(4),
            1.0,
            &mut rng,
        )
        .unwrap();
        DenseNet::build(
            &mut store,
            "b",
            &[4, 4, 4],
            &[Activation::Tanh, Activation::Tanh],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        store.validate_partition().unwrap();

        // Flatten-then-norm oracle per group.
        for g in 0..store.num_groups() {
            let flat = store.group_vec(g).unwrap();
            let want = flat.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((store.group_norm(g).unwrap() - want).abs() < 1e-12);
        }

        // Zeroing each group in turn drops the total squared norm by exactly
        // that group's squared norm.
        for g in 0..store.num_groups() {
            let total_before: f64 = store.group_norms().iter().map(|n| n * n).sum();
            let gsq = store.group_norm(g).unwrap().powi(2);
            store.zero_group(g).unwrap();
            let total_after: f64 = store.group_norms().iter().map(|n| n * n).sum();
            assert!((total_before - gsq - total_after).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_group_unknown_id_is_lookup_error() {
        let mut store = ParamStore::new();
        assert!(matches!(store.zero_group(0), Err(EditKitError::Lookup { .. })));
        assert!(store.group_id("nope").is_err());
    }

    #[test]
    fn partition_counts_cover_all_scalars() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        DenseNet::build(
            &mut store,
            "n",
            &[5, 8, 3],
            &[Activation::Relu, Activation::Identity],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        store.validate_partition().unwrap();
        let by_groups: usize = (0..store.num_groups())
            .map(|g| store.group_len(g).unwrap())
            .sum();
        assert_eq!(by_groups, store.num_scalars());
    }

    #[test]
    fn forward_backward_deterministic() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = DenseNet::build(
            &mut store,
            "n",
            &[4, 4],
            &[Activation::Tanh],
            Grouping::PerLayer,
            1.0,
            &mut rng,
        )
        .unwrap();
        let x = vec![0.1, 0.2, 0.3, 0.4];
        let c = vec![1.0, -1.0, 0.5, 0.25];
        assert_eq!(net.forward(&store, &x).unwrap(), net.forward(&store, &x).unwrap());
        let (g1, i1) = net.backward(&store, &x, &c).unwrap();
        let (g2, i2) = net.backward(&store, &x, &c).unwrap();
        assert_eq!(i1, i2);
        for id in net.param_ids() {
            assert_eq!(g1.mat(id).data, g2.mat(id).data);
        }
    }
}
