//! Dense row-major tensors and pairwise contraction.
//!
//! Contraction is a plain bilinear sum: nothing is conjugated. Span
//! dimensions over ℂ are invariant under entrywise conjugation, so every
//! injectivity verdict can be computed from the unconjugated tensors.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::InvalidTensor(format!("zero extent in shape {shape:?}")));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::InvalidTensor(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTensor("non-finite entry".into()));
        }
        Ok(DenseTensor { shape, data })
    }

    /// Rank-0 tensor.
    pub fn scalar(value: T) -> Self {
        DenseTensor { shape: Vec::new(), data: vec![value] }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        DenseTensor { shape, data: vec![T::zero(); len] }
    }

    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            increment(&mut idx, &shape);
        }
        DenseTensor { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> Option<&T> {
        if index.len() != self.shape.len() || index.iter().zip(&self.shape).any(|(i, e)| i >= e) {
            return None;
        }
        Some(&self.data[offset(index, &self.shape)])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseTensor<U> {
        DenseTensor { shape: self.shape.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(DenseTensor { shape: self.shape.clone(), data })
    }

    /// Reorders axes: axis `p` of the result is axis `perm[p]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.rank())?;
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let old_strides = strides(&self.shape);
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; shape.len()];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src].clone());
            // odometer step, tracking the source offset incrementally
            for ax in (0..shape.len()).rev() {
                idx[ax] += 1;
                src += src_strides[ax];
                if idx[ax] < shape[ax] {
                    break;
                }
                src -= src_strides[ax] * shape[ax];
                idx[ax] = 0;
            }
        }
        Ok(DenseTensor { shape, data })
    }

    /// Fixes the listed axes to the given indices and drops them.
    pub fn fix_axes(&self, fixed: &[(usize, usize)]) -> Result<Self> {
        let mut pinned = vec![None; self.rank()];
        for &(axis, index) in fixed {
            if axis >= self.rank() {
                return Err(Error::AxisOutOfRange { axis, rank: self.rank() });
            }
            if index >= self.shape[axis] || pinned[axis].is_some() {
                return Err(Error::InvalidAxes(format!("cannot fix axis {axis} to {index}")));
            }
            pinned[axis] = Some(index);
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|&a| pinned[a].is_none()).collect();
        let shape: Vec<usize> = keep.iter().map(|&a| self.shape[a]).collect();
        let st = strides(&self.shape);
        let base: usize = pinned.iter().enumerate().filter_map(|(a, p)| p.map(|i| i * st[a])).sum();
        let out = DenseTensor::from_fn(shape, |idx| {
            let off: usize = base + idx.iter().zip(&keep).map(|(i, &a)| i * st[a]).sum::<usize>();
            self.data[off].clone()
        });
        Ok(out)
    }
}

/// Ordered edge labels, one per tensor axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisOrder<L> {
    labels: Vec<L>,
}

impl<L: PartialEq + Clone + Debug> AxisOrder<L> {
    pub fn new(labels: Vec<L>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidAxes(format!("duplicate axis label {l:?}")));
            }
        }
        Ok(AxisOrder { labels })
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &L) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `perm[p]` = position in `self` of the label at position `p` of `target`.
    pub fn permutation_to(&self, target: &AxisOrder<L>) -> Result<Vec<usize>> {
        if target.len() != self.len() {
            return Err(Error::InvalidAxes("target is not a permutation of the axis order".into()));
        }
        target
            .labels
            .iter()
            .map(|l| {
                self.position(l)
                    .ok_or_else(|| Error::InvalidAxes(format!("label {l:?} missing from axis order")))
            })
            .collect()
    }
}

/// Contracts `axes1` of `t1` against `axes2` of `t2`.
///
/// Result axes are the unmatched axes of `t1` in order followed by the
/// unmatched axes of `t2` in order.
pub fn contract_pair<T: Scalar>(
    t1: &DenseTensor<T>,
    axes1: &[usize],
    t2: &DenseTensor<T>,
    axes2: &[usize],
) -> Result<DenseTensor<T>> {
    if axes1.len() != axes2.len() {
        return Err(Error::InvalidAxes(format!(
            "{} axes matched against {}",
            axes1.len(),
            axes2.len()
        )));
    }
    check_axis_list(axes1, t1.rank())?;
    check_axis_list(axes2, t2.rank())?;
    for (&a, &b) in axes1.iter().zip(axes2) {
        if t1.shape[a] != t2.shape[b] {
            return Err(Error::ShapeMismatch(format!(
                "axis {a} has extent {} but axis {b} has extent {}",
                t1.shape[a], t2.shape[b]
            )));
        }
    }
    let free1: Vec<usize> = (0..t1.rank()).filter(|a| !axes1.contains(a)).collect();
    let free2: Vec<usize> = (0..t2.rank()).filter(|a| !axes2.contains(a)).collect();

    let perm1: Vec<usize> = free1.iter().chain(axes1).copied().collect();
    let perm2: Vec<usize> = axes2.iter().chain(&free2).copied().collect();
    let a = t1.permute(&perm1)?;
    let b = t2.permute(&perm2)?;

    let m: usize = free1.iter().map(|&x| t1.shape[x]).product();
    let k: usize = axes1.iter().map(|&x| t1.shape[x]).product();
    let n: usize = free2.iter().map(|&x| t2.shape[x]).product();

    let mut out = vec![T::zero(); m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for kk in 0..k {
            let aik = &a.data[i * k + kk];
            if aik.is_zero() {
                continue;
            }
            let brow = &b.data[kk * n..(kk + 1) * n];
            for (o, bkj) in row.iter_mut().zip(brow) {
                o.mul_add_assign(aik, bkj);
            }
        }
    }
    let shape = free1
        .iter()
        .map(|&x| t1.shape[x])
        .chain(free2.iter().map(|&x| t2.shape[x]))
        .collect();
    Ok(DenseTensor { shape, data: out })
}

/// Outer product; shape is `shape(t1) ++ shape(t2)`.
pub fn tensor_product<T: Scalar>(t1: &DenseTensor<T>, t2: &DenseTensor<T>) -> DenseTensor<T> {
    let mut data = Vec::with_capacity(t1.len() * t2.len());
    for x in &t1.data {
        data.extend(t2.data.iter().map(|y| x.mul(y)));
    }
    let shape = t1.shape.iter().chain(&t2.shape).copied().collect();
    DenseTensor { shape, data }
}

/// Row-major data of `t` with its axes (labelled by `order`) rearranged into
/// `target` order.
pub fn flatten<T: Scalar, L: PartialEq + Clone + Debug>(
    t: &DenseTensor<T>,
    order: &AxisOrder<L>,
    target: &AxisOrder<L>,
) -> Result<Vec<T>> {
    if order.len() != t.rank() {
        return Err(Error::InvalidAxes(format!(
            "axis order has {} labels for a rank-{} tensor",
            order.len(),
            t.rank()
        )));
    }
    let perm = order.permutation_to(target)?;
    Ok(t.permute(&perm)?.data)
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

fn offset(index: &[usize], shape: &[usize]) -> usize {
    index.iter().zip(shape).fold(0, |acc, (i, e)| acc * e + i)
}

/// Row-major odometer increment.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) {
    for ax in (0..shape.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < shape[ax] {
            return;
        }
        idx[ax] = 0;
    }
}

fn check_axis_list(axes: &[usize], rank: usize) -> Result<()> {
    for (i, &a) in axes.iter().enumerate() {
        if a >= rank {
            return Err(Error::AxisOutOfRange { axis: a, rank });
        }
        if axes[..i].contains(&a) {
            return Err(Error::InvalidAxes(format!("axis {a} listed twice")));
        }
    }
    Ok(())
}

fn check_permutation(perm: &[usize], rank: usize) -> Result<()> {
    if perm.len() != rank {
        return Err(Error::InvalidAxes(format!("permutation of length {} for rank {rank}", perm.len())));
    }
    check_axis_list(perm, rank)
}
