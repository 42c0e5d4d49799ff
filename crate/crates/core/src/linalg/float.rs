use crate::error::{Error, Result};
use crate::scalar::C64;

use super::{EngineTag, Matrix, RankEngine, SpanBasis};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatEngine {
    tolerance: f64,
}

impl FloatEngine {
    pub fn new(tolerance: f64) -> Self {
        FloatEngine { tolerance }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

impl RankEngine for FloatEngine {
    type Elem = C64;
    type Basis = FloatBasis;

    fn tag(&self) -> EngineTag {
        EngineTag::Float
    }

    fn new_basis(&self, ambient: usize) -> FloatBasis {
        FloatBasis { ambient, tolerance: self.tolerance, raw: Vec::new(), q_re: Vec::new(), q_im: Vec::new() }
    }
}

/// Orthonormal basis kept in split real/imaginary planes (one row per basis
/// vector), alongside the raw accepted vectors.
#[derive(Clone, Debug)]
pub struct FloatBasis {
    ambient: usize,
    tolerance: f64,
    raw: Vec<Vec<C64>>,
    q_re: Vec<f64>,
    q_im: Vec<f64>,
}

/// Candidates projected together in [`FloatBasis::insert_many`].
const BLOCK: usize = 64;

impl FloatBasis {
    fn q_rows(&self, from: usize) -> impl Iterator<Item = (&[f64], &[f64])> {
        let len = self.ambient.max(1);
        self.q_re[from * len..].chunks_exact(len).zip(self.q_im[from * len..].chunks_exact(len))
    }

    /// Residual of `v` after MGS, with the norms before and after. A second
    /// sweep runs only when the first removes more than `1 − 1/√2` of the norm.
    fn residual(&self, v: &[C64]) -> (Vec<f64>, Vec<f64>, f64, f64) {
        let mut wr: Vec<f64> = v.iter().map(|z| z.re).collect();
        let mut wi: Vec<f64> = v.iter().map(|z| z.im).collect();
        let norm0 = norm(&wr, &wi);
        if norm0 == 0.0 {
            return (wr, wi, 0.0, 0.0);
        }
        let mut before = norm0;
        loop {
            for (qr, qi) in self.q_rows(0) {
                let (cr, ci) = dot_conj(qr, qi, &wr, &wi);
                axpy_neg(cr, ci, qr, qi, &mut wr, &mut wi);
            }
            let n = norm(&wr, &wi);
            if n >= std::f64::consts::FRAC_1_SQRT_2 * before || n <= self.tolerance * norm0 || before < norm0 {
                return (wr, wi, norm0, n);
            }
            before = n;
        }
    }

    fn accept(&mut self, v: &[C64], mut wr: Vec<f64>, mut wi: Vec<f64>, n: f64) {
        let inv = 1.0 / n;
        wr.iter_mut().for_each(|x| *x *= inv);
        wi.iter_mut().for_each(|x| *x *= inv);
        self.q_re.extend_from_slice(&wr);
        self.q_im.extend_from_slice(&wi);
        self.raw.push(v.to_vec());
    }

    fn check_len(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::LengthMismatch { expected: self.ambient, got: v.len() });
        }
        Ok(())
    }

    /// Two block CGS passes of the rows of `w` against the stored basis.
    fn project_block(&self, wr: &mut [f64], wi: &mut [f64], b: usize) {
        let (k, len) = (self.raw.len(), self.ambient);
        if k == 0 || len == 0 {
            return;
        }
        let (qr, qi) = (&self.q_re[..], &self.q_im[..]);
        let mut cr = vec![0.0; k * b];
        let mut ci = vec![0.0; k * b];
        for _ in 0..2 {
            // C = Q^H W, k×b
            gemm(k, len, b, 1.0, qr, (len, 1), wr, (1, len), 0.0, &mut cr, (b, 1));
            gemm(k, len, b, 1.0, qi, (len, 1), wi, (1, len), 1.0, &mut cr, (b, 1));
            gemm(k, len, b, 1.0, qr, (len, 1), wi, (1, len), 0.0, &mut ci, (b, 1));
            gemm(k, len, b, -1.0, qi, (len, 1), wr, (1, len), 1.0, &mut ci, (b, 1));
            // W -= Cᵀ Q, rows of W
            gemm(b, k, len, -1.0, &cr, (1, b), qr, (len, 1), 1.0, wr, (len, 1));
            gemm(b, k, len, 1.0, &ci, (1, b), qi, (len, 1), 1.0, wr, (len, 1));
            gemm(b, k, len, -1.0, &cr, (1, b), qi, (len, 1), 1.0, wi, (len, 1));
            gemm(b, k, len, -1.0, &ci, (1, b), qr, (len, 1), 1.0, wi, (len, 1));
        }
    }
}

/// `c ← α·a·b + β·c` for strided real matrices; `a` is `m×k`, `b` is `k×n`.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
    (rsc, csc): (usize, usize),
) {
    let span = |rows: usize, cols: usize, rs: usize, cs: usize| (rows - 1) * rs + (cols - 1) * cs + 1;
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    assert!(a.len() >= span(m, k, rsa, csa) && b.len() >= span(k, n, rsb, csb) && c.len() >= span(m, n, rsc, csc));
    // SAFETY: the asserted extents cover every index the kernel touches, and
    // `c` is borrowed mutably apart from `a` and `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            rsc as isize,
            csc as isize,
        );
    }
}

impl SpanBasis for FloatBasis {
    type Elem = C64;

    fn ambient(&self) -> usize {
        self.ambient
    }

    fn dim(&self) -> usize {
        self.raw.len()
    }

    fn insert(&mut self, v: &[C64]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() {
            return Ok(false);
        }
        let (wr, wi, norm0, n) = self.residual(v);
        if !(norm0 > 0.0 && n > self.tolerance * norm0) {
            return Ok(false);
        }
        self.accept(v, wr, wi, n);
        Ok(true)
    }

    fn contains(&self, v: &[C64]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() {
            return Ok(true);
        }
        let (_, _, norm0, n) = self.residual(v);
        Ok(!(norm0 > 0.0 && n > self.tolerance * norm0))
    }

    fn vectors(&self) -> &[Vec<C64>] {
        &self.raw
    }

    fn insert_many(&mut self, vs: &[&[C64]]) -> Result<Vec<bool>> {
        for v in vs {
            self.check_len(v)?;
        }
        let len = self.ambient;
        let mut out = Vec::with_capacity(vs.len());
        for chunk in vs.chunks(BLOCK) {
            if self.is_full() {
                out.extend(std::iter::repeat_n(false, chunk.len()));
                continue;
            }
            let b = chunk.len();
            let mut wr: Vec<f64> = chunk.iter().flat_map(|v| v.iter().map(|z| z.re)).collect();
            let mut wi: Vec<f64> = chunk.iter().flat_map(|v| v.iter().map(|z| z.im)).collect();
            let norms: Vec<f64> = (0..b).map(|j| norm(&wr[j * len..(j + 1) * len], &wi[j * len..(j + 1) * len])).collect();
            self.project_block(&mut wr, &mut wi, b);
            let first_new = self.raw.len();
            for (j, v) in chunk.iter().enumerate() {
                if self.is_full() || norms[j] == 0.0 {
                    out.push(false);
                    continue;
                }
                let mut r = wr[j * len..(j + 1) * len].to_vec();
                let mut i = wi[j * len..(j + 1) * len].to_vec();
                for _ in 0..2 {
                    for (qr, qi) in self.q_rows(first_new) {
                        let (cr, ci) = dot_conj(qr, qi, &r, &i);
                        axpy_neg(cr, ci, qr, qi, &mut r, &mut i);
                    }
                }
                let n = norm(&r, &i);
                let ok = n > self.tolerance * norms[j];
                if ok {
                    self.accept(v, r, i, n);
                }
                out.push(ok);
            }
        }
        Ok(out)
    }
}

const LANES: usize = 4;

fn norm(re: &[f64], im: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let (rc, rr) = (re.chunks_exact(LANES), re.chunks_exact(LANES).remainder());
    let (ic, ir) = (im.chunks_exact(LANES), im.chunks_exact(LANES).remainder());
    for (a, b) in rc.zip(ic) {
        for k in 0..LANES {
            acc[k] += a[k] * a[k] + b[k] * b[k];
        }
    }
    let mut s: f64 = acc.iter().sum();
    for (a, b) in rr.iter().zip(ir) {
        s += a * a + b * b;
    }
    s.sqrt()
}

/// `⟨q, w⟩ = Σ conj(q)·w`
fn dot_conj(qr: &[f64], qi: &[f64], wr: &[f64], wi: &[f64]) -> (f64, f64) {
    let mut re = [0.0f64; LANES];
    let mut im = [0.0f64; LANES];
    let n = qr.len() / LANES * LANES;
    for base in (0..n).step_by(LANES) {
        let (a, b) = (&qr[base..base + LANES], &qi[base..base + LANES]);
        let (c, d) = (&wr[base..base + LANES], &wi[base..base + LANES]);
        for k in 0..LANES {
            re[k] += a[k] * c[k] + b[k] * d[k];
            im[k] += a[k] * d[k] - b[k] * c[k];
        }
    }
    let mut sr: f64 = re.iter().sum();
    let mut si: f64 = im.iter().sum();
    for k in n..qr.len() {
        sr += qr[k] * wr[k] + qi[k] * wi[k];
        si += qr[k] * wi[k] - qi[k] * wr[k];
    }
    (sr, si)
}

/// `w -= c·q`
fn axpy_neg(cr: f64, ci: f64, qr: &[f64], qi: &[f64], wr: &mut [f64], wi: &mut [f64]) {
    for (((a, b), c), d) in qr.iter().zip(qi).zip(wr.iter_mut()).zip(wi.iter_mut()) {
        *c -= cr * a - ci * b;
        *d -= cr * b + ci * a;
    }
}

/// Determinant data of a float matrix after scaling every column to unit norm.
///
/// By Hadamard's inequality `abs_det ≤ 1`; `min_pivot` is the smallest pivot
/// magnitude of partial-pivoting LU on the scaled matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatDeterminant {
    pub abs_det: f64,
    pub log10_abs_det: f64,
    pub min_pivot: f64,
}

impl FloatDeterminant {
    pub fn passes(&self, threshold: f64) -> bool {
        self.min_pivot > threshold && self.log10_abs_det.is_finite()
    }
}

pub fn determinant_float(m: &Matrix<C64>) -> Result<FloatDeterminant> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let singular = FloatDeterminant { abs_det: 0.0, log10_abs_det: f64::NEG_INFINITY, min_pivot: 0.0 };
    // column-major working copy with unit columns
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let col = &mut a[j * n..(j + 1) * n];
        for (i, z) in col.iter_mut().enumerate() {
            *z = *m.get(i, j);
        }
        let s = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if s == 0.0 {
            return Ok(singular);
        }
        col.iter_mut().for_each(|z| *z /= s);
    }
    match lu_in_place(&mut a, n) {
        Some(pivots) => {
            let min_pivot = pivots.iter().copied().fold(if n == 0 { 1.0 } else { f64::INFINITY }, f64::min);
            let log10: f64 = pivots.iter().map(|p| p.log10()).sum();
            Ok(FloatDeterminant { abs_det: 10f64.powf(log10), log10_abs_det: log10, min_pivot })
        }
        None => Ok(singular),
    }
}

const PANEL: usize = 128;

/// Blocked right-looking LU with partial pivoting on a column-major `n×n`
/// matrix. Returns the pivot magnitudes, or `None` on an exactly zero pivot.
fn lu_in_place(a: &mut [C64], n: usize) -> Option<Vec<f64>> {
    let mut pivots = Vec::with_capacity(n);
    for k0 in (0..n).step_by(PANEL) {
        let kb = PANEL.min(n - k0);
        let mut swaps = Vec::with_capacity(kb);
        for k in k0..k0 + kb {
            let (p, pmag) = (k..n).map(|i| (i, a[k * n + i].norm())).fold((k, -1.0), |b, x| if x.1 > b.1 { x } else { b });
            if pmag == 0.0 {
                return None;
            }
            swaps.push(p);
            // columns left of the panel never influence the determinant
            if p != k {
                for j in k0..k0 + kb {
                    a.swap(j * n + k, j * n + p);
                }
            }
            pivots.push(pmag);
            let piv = a[k * n + k];
            for z in a[k * n + k + 1..(k + 1) * n].iter_mut() {
                *z /= piv;
            }
            for j in k + 1..k0 + kb {
                let u = a[j * n + k];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                let (left, right) = a.split_at_mut(j * n);
                let l = &left[k * n + k + 1..(k + 1) * n];
                for (x, li) in right[k + 1..n].iter_mut().zip(l) {
                    *x -= li * u;
                }
            }
        }
        let rest = k0 + kb;
        if rest == n {
            break;
        }
        for col in a[rest * n..].chunks_exact_mut(n) {
            for (k, &p) in (k0..).zip(&swaps) {
                col.swap(k, p);
            }
        }
        // U12 = L11⁻¹ A12
        for j in rest..n {
            for k in k0..k0 + kb {
                let u = a[j * n + k];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                for i in k + 1..k0 + kb {
                    let l = a[k * n + i];
                    a[j * n + i] -= l * u;
                }
            }
        }
        // A22 -= L21 U12
        let m2 = n - rest;
        let ptr = a.as_mut_ptr() as *mut [f64; 2];
        // SAFETY: L21, U12 and A22 are disjoint blocks of `a`; C64 is laid out as [re, im].
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m2,
                kb,
                m2,
                [-1.0, 0.0],
                ptr.add(k0 * n + rest) as *const _,
                1,
                n as isize,
                ptr.add(rest * n + k0) as *const _,
                1,
                n as isize,
                [1.0, 0.0],
                ptr.add(rest * n + rest),
                1,
                n as isize,
            );
        }
    }
    Some(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_vector_accepted_dependent_rejected() {
        let e = FloatEngine::new(1e-9);
        let mut b = e.new_basis(2);
        assert!(b.insert(&[C64::new(1.0, 1.0), C64::new(0.0, 0.0)]).unwrap());
        assert!(b.insert(&[C64::new(0.0, 0.0), C64::new(0.0, -2.0)]).unwrap());
        assert!(b.is_full());
        assert!(!b.insert(&[C64::new(5.0, 0.0), C64::new(1.0, 0.0)]).unwrap());
        assert!(b.contains(&[C64::new(5.0, 0.0), C64::new(1.0, 0.0)]).unwrap());
    }

    #[test]
    fn batched_insertion_matches_one_by_one() {
        // 150 vectors in ℂ^96 spanning a 70-dimensional subspace, with repeats
        let gen = |k: usize, i: usize| {
            let x = ((k * 7919 + i * 104_729) % 1013) as f64 / 1013.0 - 0.5;
            C64::new(x, ((k * 31 + i * 17) % 97) as f64 / 97.0 - 0.5)
        };
        let base: Vec<Vec<C64>> = (0..70).map(|k| (0..96).map(|i| gen(k, i)).collect()).collect();
        let vs: Vec<Vec<C64>> = (0..150)
            .map(|j| if j % 3 == 2 { base[(j * 11) % 70].iter().map(|z| z * 2.0).collect() } else { base[j % 70].clone() })
            .collect();
        let refs: Vec<&[C64]> = vs.iter().map(|v| v.as_slice()).collect();
        let e = FloatEngine::new(1e-9);
        let mut one = e.new_basis(96);
        let seq: Vec<bool> = refs.iter().map(|v| one.insert(v).unwrap()).collect();
        let mut many = e.new_basis(96);
        assert_eq!(many.insert_many(&refs).unwrap(), seq);
        assert_eq!(many.dim(), 70);
        assert_eq!(many.vectors(), one.vectors());
    }

    #[test]
    fn zero_vector_is_never_accepted() {
        let mut b = FloatEngine::new(1e-9).new_basis(3);
        assert!(!b.insert(&[C64::new(0.0, 0.0); 3]).unwrap());
        assert_eq!(b.dim(), 0);
    }

    #[test]
    fn relative_tolerance_is_scale_free() {
        for scale in [1e-150, 1e-20, 1.0, 1e20, 1e150] {
            let mut b = FloatEngine::new(1e-9).new_basis(2);
            assert!(b.insert(&[C64::new(scale, 0.0), C64::new(0.0, 0.0)]).unwrap());
            assert!(!b.insert(&[C64::new(scale, 0.0), C64::new(scale * 1e-12, 0.0)]).unwrap());
            assert!(b.insert(&[C64::new(scale, 0.0), C64::new(scale * 1e-6, 0.0)]).unwrap());
        }
    }

    #[test]
    fn float_determinant_basics() {
        let id = Matrix::<C64>::identity(4);
        let d = determinant_float(&id).unwrap();
        assert!((d.abs_det - 1.0).abs() < 1e-12);
        assert!(d.passes(1e-10));

        let rep = Matrix::from_fn(3, 3, |i, j| C64::new(if i == 2 { 1.0 } else { (i + j) as f64 }, 0.0));
        let rep = Matrix::from_fn(3, 3, |i, j| if i == 1 { *rep.get(0, j) } else { *rep.get(i, j) });
        assert!(!determinant_float(&rep).unwrap().passes(1e-10));

        // [[1, 2], [3, 4]] has det -2; columns have norms √10 and √20
        let m = Matrix::new(2, 2, vec![C64::new(1., 0.), C64::new(2., 0.), C64::new(3., 0.), C64::new(4., 0.)]).unwrap();
        let d = determinant_float(&m).unwrap();
        assert!((d.abs_det - 2.0 / (10f64.sqrt() * 20f64.sqrt())).abs() < 1e-12);
    }

    /// Unblocked elimination without column scaling, as an independent reference.
    fn reference_log10_det(m: &Matrix<C64>) -> f64 {
        let n = m.rows();
        let mut a: Vec<Vec<C64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut acc = 0.0;
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm())).unwrap();
            a.swap(k, p);
            acc += a[k][k].norm().log10();
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    let t = f * a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        acc
    }

    #[test]
    fn blocked_lu_matches_reference_across_panels() {
        let mut s = 12345u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for n in [1, 5, 63, 64, 65, 150] {
            let m = Matrix::from_fn(n, n, |_, _| C64::new(next(), next()));
            let d = determinant_float(&m).unwrap();
            let col_norms: f64 = (0..n).map(|j| m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().log10()).sum();
            let expected = reference_log10_det(&m) - col_norms;
            assert!((d.log10_abs_det - expected).abs() < 1e-8, "n={n}: {} vs {expected}", d.log10_abs_det);
        }
    }
}
