use serde::{Deserialize, Serialize};

use super::MAX_DIM;
use crate::error::{invalid, Result};

/// Coefficient array over a cell or patch, lexicographic with axis 0 fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorField {
    extents: Vec<usize>,
    values: Vec<f64>,
}

impl TensorField {
    pub fn new(extents: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_extents(&extents)?;
        let n: usize = extents.iter().product();
        if values.len() != n {
            return Err(invalid(format!("tensor has {} values, extents {extents:?} need {n}", values.len())));
        }
        Ok(Self { extents, values })
    }

    pub fn zeros(extents: &[usize]) -> Result<Self> {
        let n = extents.iter().product();
        Self::new(extents.to_vec(), vec![0.0; n])
    }

    pub fn from_fn(extents: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_extents(extents)?;
        let n: usize = extents.iter().product();
        let mut idx = vec![0usize; extents.len()];
        let mut values = Vec::with_capacity(n);
        for flat in 0..n {
            let mut rem = flat;
            for (a, &e) in extents.iter().enumerate() {
                idx[a] = rem % e;
                rem /= e;
            }
            values.push(f(&idx));
        }
        Self::new(extents.to_vec(), values)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Axis strides `1, n0, n0*n1, ...`.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.dim());
        let mut acc = 1;
        for &e in &self.extents {
            s.push(acc);
            acc *= e;
        }
        s
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim());
        let mut flat = 0;
        let mut stride = 1;
        for (&i, &e) in idx.iter().zip(&self.extents) {
            debug_assert!(i < e);
            flat += i * stride;
            stride *= e;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let f = self.flat_index(idx);
        self.values[f] = v;
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_extents(extents: &[usize]) -> Result<()> {
    if extents.is_empty() || extents.len() > MAX_DIM {
        return Err(invalid(format!("tensor rank {} outside 1..={MAX_DIM}", extents.len())));
    }
    if extents.contains(&0) {
        return Err(invalid("zero tensor extent"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_follow_lexicographic_order() {
        let t = TensorField::from_fn(&[2, 3, 4], |i| (i[0] + 10 * i[1] + 100 * i[2]) as f64).unwrap();
        assert_eq!(t.strides(), vec![1, 2, 6]);
        assert_eq!(t.values()[1], 1.0);
        assert_eq!(t.values()[2], 10.0);
        assert_eq!(t.values()[6], 100.0);
        assert_eq!(t.get(&[1, 2, 3]), 321.0);
    }

    #[test]
    fn rejects_mismatched_length() {
        assert!(TensorField::new(vec![2, 2], vec![0.0; 3]).is_err());
        assert!(TensorField::new(vec![2, 2, 2, 2], vec![0.0; 16]).is_err());
    }
}
