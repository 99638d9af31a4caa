use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre rule mapped to `[a, b]`, nodes in increasing order.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(count: usize, a: f64, b: f64) -> Self {
        let count = NonZeroUsize::new(count.max(1)).expect("non-zero");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(count)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * ((b - a) * x + (b + a)), 0.5 * (b - a) * w))
            .collect();
        pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }
}
