//! A small fully connected regressor: ReLU hidden layers, one linear
//! output, squared-error loss, inverted dropout, and Adam updates.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Row-major `outputs × inputs` weights.
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Layer {
    fn he<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Layer {
        let normal = Normal::new(0.0, (2.0 / inputs as f64).sqrt()).expect("positive scale");
        Layer {
            w: (0..outputs).map(|_| (0..inputs).map(|_| normal.sample(rng)).collect()).collect(),
            b: vec![0.0; outputs],
        }
    }

    fn zeros_like(&self) -> Layer {
        Layer {
            w: self.w.iter().map(|row| vec![0.0; row.len()]).collect(),
            b: vec![0.0; self.b.len()],
        }
    }

    fn inputs(&self) -> usize {
        self.w.first().map_or(0, Vec::len)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

/// Per-layer parameter gradients, shaped like [`Mlp::layers`].
pub type Gradients = Vec<Layer>;

impl Mlp {
    /// He-initialized network with the given hidden widths and one output.
    pub fn new<R: Rng + ?Sized>(inputs: usize, hidden: &[usize], rng: &mut R) -> Mlp {
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut width = inputs;
        for &h in hidden {
            layers.push(Layer::he(width, h, rng));
            width = h;
        }
        layers.push(Layer::he(width, 1, rng));
        Mlp { layers }
    }

    pub fn inputs(&self) -> usize {
        self.layers.first().map_or(0, Layer::inputs)
    }

    /// Inference pass (dropout off).
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            a = layer.apply(&a);
            if i < last {
                a.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        a[0]
    }

    /// Mean squared error over `(x, y)` pairs in inference mode.
    pub fn mse(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let n = xs.len().max(1) as f64;
        xs.iter().zip(ys).map(|(x, y)| (self.predict(x) - y).powi(2)).sum::<f64>() / n
    }

    pub fn zero_gradients(&self) -> Gradients {
        self.layers.iter().map(Layer::zeros_like).collect()
    }

    /// Mean squared error over a batch and its gradient. Hidden activations
    /// are dropped with probability `dropout` and survivors scaled by
    /// `1 / (1 − dropout)`; pass 0 to disable.
    pub fn loss_and_gradients<R: Rng + ?Sized>(
        &self,
        xs: &[Vec<f64>],
        ys: &[f64],
        dropout: f64,
        rng: &mut R,
    ) -> (f64, Gradients) {
        let mut grads = self.zero_gradients();
        let n = xs.len() as f64;
        let keep_scale = if dropout > 0.0 { 1.0 / (1.0 - dropout) } else { 1.0 };
        let last = self.layers.len() - 1;
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            // activations[i] is the input to layer i
            let mut activations = vec![x.clone()];
            let mut masks: Vec<Vec<f64>> = Vec::with_capacity(last);
            for (i, layer) in self.layers.iter().enumerate() {
                let mut z = layer.apply(&activations[i]);
                if i < last {
                    let mask: Vec<f64> = z
                        .iter()
                        .map(|&v| {
                            let alive = dropout == 0.0 || rng.random::<f64>() >= dropout;
                            if v > 0.0 && alive {
                                keep_scale
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    z.iter_mut().zip(&mask).for_each(|(v, m)| *v *= m);
                    masks.push(mask);
                }
                activations.push(z);
            }
            let err = activations[last + 1][0] - y;
            loss += err * err;
            // backward: delta is dLoss/dz for the current layer's output
            let mut delta = vec![2.0 * err / n];
            for i in (0..=last).rev() {
                let input = &activations[i];
                for (o, d) in delta.iter().enumerate() {
                    grads[i].b[o] += d;
                    for (g, v) in grads[i].w[o].iter_mut().zip(input) {
                        *g += d * v;
                    }
                }
                if i > 0 {
                    let layer = &self.layers[i];
                    let mask = &masks[i - 1];
                    delta = (0..layer.inputs())
                        .map(|j| layer.w.iter().zip(&delta).map(|(row, d)| row[j] * d).sum::<f64>() * mask[j])
                        .collect();
                }
            }
        }
        (loss / n, grads)
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.w.iter_mut().flat_map(|r| r.iter_mut()).chain(l.b.iter_mut()))
    }

    fn flatten(grads: &Gradients) -> impl Iterator<Item = f64> + '_ {
        grads
            .iter()
            .flat_map(|l| l.w.iter().flat_map(|r| r.iter().copied()).chain(l.b.iter().copied()))
    }
}

/// Largest relative error between backpropagated gradients (dropout off)
/// and central finite differences with step `h`, over every parameter.
pub fn gradient_check(net: &Mlp, xs: &[Vec<f64>], ys: &[f64], h: f64) -> f64 {
    let mut rng = crate::seed::rng_from(0);
    let (_, grads) = net.loss_and_gradients(xs, ys, 0.0, &mut rng);
    let analytic: Vec<f64> = Mlp::flatten(&grads).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let bumped = |delta: f64| {
            let mut n = net.clone();
            *n.params_mut().nth(i).expect("parameter index") += delta;
            n.mse(xs, ys)
        };
        let numeric = (bumped(h) - bumped(-h)) / (2.0 * h);
        let scale = numeric.abs().max(a.abs()).max(1e-4);
        worst = worst.max((numeric - a).abs() / scale);
    }
    worst
}

/// Adam optimizer state.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Adam {
        let count = Mlp::flatten(&net.zero_gradients()).count();
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; count],
            v: vec![0.0; count],
        }
    }

    pub fn update(&mut self, net: &mut Mlp, grads: &Gradients) {
        self.step = self.step.saturating_add(1);
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (((p, g), m), v) in net.params_mut().zip(Mlp::flatten(grads)).zip(&mut self.m).zip(&mut self.v) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
    }
}
