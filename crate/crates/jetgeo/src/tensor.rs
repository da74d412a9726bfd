//! Dense component containers for tensors at a point, in value and jet form.
//!
//! Component arrays are indexed contravariant-slots-first, row-major over the
//! chart dimension. Index helpers are shared between the value-level
//! [`Tensor`] and the jet-level [`JetTensor`].

use crate::jet::Jet;

/// Iterates all rank-`rank` multi-indices over `0..dim`, odometer order.
pub fn indices(dim: usize, rank: usize) -> IndexIter {
    IndexIter {
        dim,
        idx: vec![0; rank],
        done: false,
    }
}

pub struct IndexIter {
    dim: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        self.done = true;
        for k in (0..self.idx.len()).rev() {
            self.idx[k] += 1;
            if self.idx[k] < self.dim {
                self.done = false;
                break;
            }
            self.idx[k] = 0;
        }
        if self.idx.is_empty() {
            self.done = true;
        }
        Some(out)
    }
}

pub(crate) fn flat_index(dim: usize, idx: &[usize]) -> usize {
    let mut f = 0;
    for &i in idx {
        debug_assert!(i < dim);
        f = f * dim + i;
    }
    f
}

/// Value-level dense tensor components at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dim: usize,
    contra: usize,
    co: usize,
    comps: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, contra: usize, co: usize) -> Tensor {
        Tensor {
            dim,
            contra,
            co,
            comps: vec![0.0; dim.pow((contra + co) as u32)],
        }
    }

    pub fn from_fn(dim: usize, contra: usize, co: usize, mut f: impl FnMut(&[usize]) -> f64) -> Tensor {
        let mut t = Tensor::zeros(dim, contra, co);
        for idx in indices(dim, contra + co) {
            let v = f(&idx);
            *t.get_mut(&idx) = v;
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> (usize, usize) {
        (self.contra, self.co)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.comps[flat_index(self.dim, idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut f64 {
        &mut self.comps[flat_index(self.dim, idx)]
    }

    pub fn comps(&self) -> &[f64] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.comps.len(), other.comps.len(), "tensor shape mismatch");
        Tensor {
            dim: self.dim,
            contra: self.contra,
            co: self.co,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Tensor {
        Tensor {
            dim: self.dim,
            contra: self.contra,
            co: self.co,
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }
}

/// Jet-level dense tensor components at a point. All component jets share one
/// spec; the common truncation order is the tensor's `order`.
#[derive(Clone, Debug)]
pub struct JetTensor {
    dim: usize,
    contra: usize,
    co: usize,
    comps: Vec<Jet>,
}

impl JetTensor {
    pub fn from_components(dim: usize, contra: usize, co: usize, comps: Vec<Jet>) -> JetTensor {
        assert_eq!(comps.len(), dim.pow((contra + co) as u32), "component count");
        debug_assert!(comps.windows(2).all(|w| w[0].spec() == w[1].spec()));
        JetTensor {
            dim,
            contra,
            co,
            comps,
        }
    }

    pub fn from_fn(
        dim: usize,
        contra: usize,
        co: usize,
        mut f: impl FnMut(&[usize]) -> Jet,
    ) -> JetTensor {
        let comps = indices(dim, contra + co).map(|idx| f(&idx)).collect();
        JetTensor::from_components(dim, contra, co, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> (usize, usize) {
        (self.contra, self.co)
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[flat_index(self.dim, idx)]
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(Jet::is_finite)
    }

    pub fn truncated(&self, order: usize) -> JetTensor {
        JetTensor {
            dim: self.dim,
            contra: self.contra,
            co: self.co,
            comps: self.comps.iter().map(|j| j.truncated(order)).collect(),
        }
    }

    /// Constant terms as a value tensor.
    pub fn values(&self) -> Tensor {
        Tensor {
            dim: self.dim,
            contra: self.contra,
            co: self.co,
            comps: self.comps.iter().map(Jet::value).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetTensor {
        JetTensor {
            dim: self.dim,
            contra: self.contra,
            co: self.co,
            comps: self.comps.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpec;

    #[test]
    fn index_iteration_is_row_major() {
        let all: Vec<_> = indices(2, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(indices(3, 0).count(), 1);
        assert_eq!(indices(3, 3).count(), 27);
    }

    #[test]
    fn jet_tensor_values_roundtrip() {
        let spec = JetSpec::new(2, 1).unwrap();
        let t = JetTensor::from_fn(2, 0, 2, |idx| {
            Jet::constant(&spec, (idx[0] * 2 + idx[1]) as f64)
        });
        let v = t.values();
        assert_eq!(v.get(&[1, 0]), 2.0);
        assert_eq!(v.max_abs(), 3.0);
    }
}
