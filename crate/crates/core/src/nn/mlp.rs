use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
/// Fully connected layer, `y = x Wᵀ + b` with `W` of shape `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            weight: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    /// Orthogonal weights scaled by `gain`, zero bias.
    pub fn orthogonal<R: Rng + ?Sized>(inputs: usize, outputs: usize, gain: f64, rng: &mut R) -> Self {
        let (rows, cols) = (inputs.max(outputs), inputs.min(outputs));
        // Gram-Schmidt on the columns of a Gaussian (rows × cols) matrix.
        let mut q = Array2::<f64>::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal));
        for c in 0..cols {
            for prev in 0..c {
                let dot = q.column(c).dot(&q.column(prev));
                let prev_col = q.column(prev).to_owned();
                q.column_mut(c).scaled_add(-dot, &prev_col);
            }
            let norm = q.column(c).dot(&q.column(c)).sqrt();
            q.column_mut(c).mapv_inplace(|v| v / norm);
        }
        let weight = if outputs >= inputs { q } else { q.reversed_axes().as_standard_layout().into_owned() };
        Dense {
            weight: weight * gain,
            bias: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.nrows()
    }
}

/// Multi-layer perceptron: tanh on every hidden layer, linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Activations kept from a forward pass: entry `l` is the input of layer `l`,
/// the final entry is the network output.
#[derive(Debug, Clone)]
pub struct MlpCache {
    pub activations: Vec<Array2<f64>>,
}

impl MlpCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("cache holds at least the input")
    }
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Self {
        Mlp {
            layers: sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Forward pass over a batch laid out as rows.
    pub fn forward(&self, x: ArrayView2<f64>) -> MlpCache {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.as_standard_layout().into_owned());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = activations[l].dot(&layer.weight.t()).as_standard_layout().into_owned();
            z += &layer.bias;
            if l < last {
                z.mapv_inplace(f64::tanh);
            }
            activations.push(z);
        }
        MlpCache { activations }
    }

    /// Reverse pass. `d_out` is the loss gradient with respect to the output
    /// rows; returned gradients are summed over the batch.
    pub fn backward(&self, cache: &MlpCache, d_out: ArrayView2<f64>) -> Mlp {
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        let mut delta = d_out.to_owned();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.activations[l];
            let weight = delta.t().dot(input).as_standard_layout().into_owned();
            let bias = delta.sum_axis(Axis(0));
            grads.push(Dense { weight, bias });
            if l > 0 {
                let mut prev = delta.dot(&layer.weight);
                prev.zip_mut_with(input, |d, &a| *d *= 1.0 - a * a);
                delta = prev;
            }
        }
        grads.reverse();
        Mlp { layers: grads }
    }

    pub fn tensors(&self) -> impl Iterator<Item = &[f64]> {
        self.layers.iter().flat_map(|l| {
            [
                l.weight.as_slice().expect("standard layout"),
                l.bias.as_slice().expect("contiguous"),
            ]
        })
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers.iter_mut().flat_map(|l| {
            [
                l.weight.as_slice_mut().expect("standard layout"),
                l.bias.as_slice_mut().expect("contiguous"),
            ]
        })
    }
}
