//! Double forms on an `n`-dimensional Euclidean space, in an orthonormal frame.
//!
//! A `(p,q)` double form `ω` is stored by its values `ω(e_I, e_J)` on the
//! lexicographic bases of `Λ^p` and `Λ^q`. The metric `g` is the identity
//! `(1,1)` form; the exterior product is the shuffle-sign product (the
//! Kulkarni-Nomizu product on bilinear forms).

use std::sync::OnceLock;

use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::multiindex::{basis_table, binomial, full_mask, shuffle_sign, IndexError, MultiIndex, Sign, MAX_DIM};
use crate::scalar::{factorial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("bidegree ({p},{q}) out of range for dimension {n}")]
    DegreeOutOfRange { n: usize, p: usize, q: usize },
    #[error("degree overflow: ({p},{q}) exceeds dimension {n}")]
    DegreeOverflow { n: usize, p: usize, q: usize },
    #[error("contraction of a ({p},{q}) form: both degrees must be positive")]
    ContractionOfScalar { p: usize, q: usize },
    #[error("bidegree mismatch: ({0},{1}) vs ({2},{3})")]
    BidegreeMismatch(usize, usize, usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("coefficient array has shape {got:?}, expected {expected:?}")]
    ShapeMismatch { got: (usize, usize), expected: (usize, usize) },
    #[error(transparent)]
    Index(#[from] IndexError),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// A `(p,q)` double form with dense coefficients over lexicographic bases.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleForm<S = f64> {
    n: usize,
    p: usize,
    q: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> DoubleForm<S> {
    pub fn zeros(n: usize, p: usize, q: usize) -> Result<Self> {
        if n > MAX_DIM {
            return Err(IndexError::DimensionTooLarge(n).into());
        }
        if p > n || q > n {
            return Err(AlgebraError::DegreeOutOfRange { n, p, q });
        }
        let len = binomial(n, p) * binomial(n, q);
        Ok(Self { n, p, q, coeffs: vec![S::zero(); len] })
    }

    /// The `(0,0)` form with value `value`.
    pub fn scalar(n: usize, value: S) -> Self {
        Self { n, p: 0, q: 0, coeffs: vec![value] }
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, S::one())
    }

    /// The metric `g`, i.e. the identity bilinear form.
    pub fn metric(n: usize) -> Self {
        let mut coeffs = vec![S::zero(); n * n];
        for i in 0..n {
            coeffs[i * n + i] = S::one();
        }
        Self { n, p: 1, q: 1, coeffs }
    }

    /// Builds a form from rows indexed by the bases of `Λ^p` and `Λ^q`.
    pub fn from_rows(n: usize, p: usize, q: usize, rows: Vec<Vec<S>>) -> Result<Self> {
        let mut form = Self::zeros(n, p, q)?;
        let expected = (form.rows(), form.cols());
        let got = (rows.len(), rows.first().map_or(0, Vec::len));
        if got.0 != expected.0 || rows.iter().any(|r| r.len() != expected.1) {
            return Err(AlgebraError::ShapeMismatch { got, expected });
        }
        form.coeffs = rows.into_iter().flatten().collect();
        Ok(form)
    }

    /// A `(1,1)` form from an `n × n` matrix, `B(e_i, e_j) = m[i][j]`.
    pub fn from_matrix(m: Vec<Vec<S>>) -> Result<Self> {
        let n = m.len();
        Self::from_rows(n, 1, 1, m)
    }

    pub fn diagonal(values: &[S]) -> Self {
        let n = values.len();
        let mut form = Self::zeros(n, 1, 1).expect("(1,1) fits any n");
        for (i, v) in values.iter().enumerate() {
            form.coeffs[i * n + i] = v.clone();
        }
        form
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn rows(&self) -> usize {
        binomial(self.n, self.p)
    }

    pub fn cols(&self) -> usize {
        binomial(self.n, self.q)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff_rows(&self) -> Vec<Vec<S>> {
        self.coeffs.chunks(self.cols().max(1)).map(<[S]>::to_vec).collect()
    }

    /// Coefficient by basis positions.
    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.coeffs[row * self.cols() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: S) {
        let cols = self.cols();
        self.coeffs[row * cols + col] = value;
    }

    /// `ω(e_I, e_J)`.
    pub fn value(&self, i: &MultiIndex, j: &MultiIndex) -> Result<&S> {
        if i.dim() != self.n || j.dim() != self.n {
            return Err(AlgebraError::DimensionMismatch(self.n, i.dim().max(j.dim())));
        }
        if i.degree() != self.p || j.degree() != self.q {
            return Err(AlgebraError::BidegreeMismatch(self.p, self.q, i.degree(), j.degree()));
        }
        Ok(self.get(i.position(), j.position()))
    }

    /// The value of a `(0,0)` form.
    pub fn as_scalar(&self) -> Option<&S> {
        (self.p == 0 && self.q == 0).then(|| &self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(self.n, other.n));
        }
        if (self.p, self.q) != (other.p, other.q) {
            return Err(AlgebraError::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { n: self.n, p: self.p, q: self.q, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(Self { n: self.n, p: self.p, q: self.q, coeffs })
    }

    pub fn scale(&self, factor: &S) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * factor.clone()).collect();
        Self { n: self.n, p: self.p, q: self.q, coeffs }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// `ωᵀ(a, b) = ω(b, a)`.
    pub fn transpose(&self) -> Self {
        let (rows, cols) = (self.rows(), self.cols());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for j in 0..cols {
            for i in 0..rows {
                coeffs.push(self.coeffs[i * cols + j].clone());
            }
        }
        Self { n: self.n, p: self.q, q: self.p, coeffs }
    }

    /// Exterior (shuffle) product `ω·θ` of a `(p,q)` and an `(r,s)` form.
    pub fn exterior_product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let (p, q) = (self.p + other.p, self.q + other.q);
        if p > n || q > n {
            return Err(AlgebraError::DegreeOverflow { n, p, q });
        }
        if let Some(s) = self.as_scalar() {
            return Ok(other.scale(s));
        }
        if let Some(s) = other.as_scalar() {
            return Ok(self.scale(s));
        }
        let row_splits = splits(n, p, self.p);
        let col_splits = splits(n, q, self.q);
        let (lc, rc) = (self.cols(), other.cols());
        let mut out = Self::zeros(n, p, q)?;
        let cols = out.cols();
        for (a, rs) in row_splits.iter().enumerate() {
            for (b, cs) in col_splits.iter().enumerate() {
                let mut acc = S::zero();
                for &(i, i2, si) in rs {
                    for &(j, j2, sj) in cs {
                        let left = &self.coeffs[i * lc + j];
                        if left.is_zero() {
                            continue;
                        }
                        let right = &other.coeffs[i2 * rc + j2];
                        if right.is_zero() {
                            continue;
                        }
                        let term = left.clone() * right.clone();
                        acc = if (si * sj).is_minus() { acc - term } else { acc + term };
                    }
                }
                out.coeffs[a * cols + b] = acc;
            }
        }
        Ok(out)
    }

    /// `ω^k`, the k-fold exterior power; `ω^0` is the unit scalar.
    pub fn power(&self, k: usize) -> Result<Self> {
        let (p, q) = (self.p * k, self.q * k);
        if p > self.n || q > self.n {
            return Err(AlgebraError::DegreeOverflow { n: self.n, p, q });
        }
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = acc.exterior_product(self)?;
        }
        Ok(acc)
    }

    /// The contraction `c`, adjoint of multiplication by `g`.
    pub fn contraction(&self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(AlgebraError::ContractionOfScalar { p: self.p, q: self.q });
        }
        let n = self.n;
        let table = basis_table(n);
        let mut out = Self::zeros(n, self.p - 1, self.q - 1)?;
        let cols = out.cols();
        let self_cols = self.cols();
        for (a, &rmask) in table.by_degree[self.p - 1].iter().enumerate() {
            for (b, &cmask) in table.by_degree[self.q - 1].iter().enumerate() {
                let mut acc = S::zero();
                let mut free = full_mask(n) & !rmask & !cmask;
                while free != 0 {
                    let i = free.trailing_zeros();
                    free &= free - 1;
                    let bit = 1u32 << i;
                    let sign = shuffle_sign(bit, rmask) * shuffle_sign(bit, cmask);
                    let r = table.rank[(rmask | bit) as usize] as usize;
                    let c = table.rank[(cmask | bit) as usize] as usize;
                    let v = self.coeffs[r * self_cols + c].clone();
                    acc = if sign.is_minus() { acc - v } else { acc + v };
                }
                out.coeffs[a * cols + b] = acc;
            }
        }
        Ok(out)
    }

    /// `c^k ω`.
    pub fn contract_times(&self, k: usize) -> Result<Self> {
        let mut acc = self.clone();
        for _ in 0..k {
            acc = acc.contraction()?;
        }
        Ok(acc)
    }

    /// `g·ω`.
    pub fn mult_by_metric(&self) -> Result<Self> {
        Self::metric(self.n).exterior_product(self)
    }

    /// Generalized Hodge star `(*ω)(·,·) = (−1)^{(p+q)(n−p−q)} ω(*·, *·)`.
    pub fn hodge_star(&self) -> Self {
        let n = self.n;
        let table = basis_table(n);
        let (op, oq) = (n - self.p, n - self.q);
        let exponent = (self.p + self.q) as i64 * (n as i64 - self.p as i64 - self.q as i64);
        let global = Sign::from_parity(exponent.rem_euclid(2) as u32);
        let full = full_mask(n);
        let self_cols = self.cols();
        let out_cols = binomial(n, oq);
        let mut coeffs = vec![S::zero(); binomial(n, op) * out_cols];
        for (a, &k) in table.by_degree[op].iter().enumerate() {
            let kc = full & !k;
            let sk = shuffle_sign(k, kc);
            let r = table.rank[kc as usize] as usize;
            for (b, &l) in table.by_degree[oq].iter().enumerate() {
                let lc = full & !l;
                let sign = global * sk * shuffle_sign(l, lc);
                let c = table.rank[lc as usize] as usize;
                let v = self.coeffs[r * self_cols + c].clone();
                coeffs[a * out_cols + b] = if sign.is_minus() { -v } else { v };
            }
        }
        Self { n, p: op, q: oq, coeffs }
    }

    /// `⟨ω, θ⟩ = *(ω · *θ)`.
    pub fn inner_product(&self, other: &Self) -> Result<S> {
        self.check_same_shape(other)?;
        let top = self.exterior_product(&other.hodge_star())?;
        Ok(top.hodge_star().coeffs[0].clone())
    }

    /// `Σ_{I,J} ω(e_I,e_J) θ(e_I,e_J)`; equal to [`Self::inner_product`].
    pub fn component_inner(&self, other: &Self) -> Result<S> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// `max |ω − θ|` over coefficients, computed in `S` before rounding.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
            .fold(0.0, f64::max))
    }

    /// Relative deviation `‖ω−θ‖∞ / max(1, ‖ω‖∞, ‖θ‖∞)`.
    pub fn rel_diff(&self, other: &Self) -> Result<f64> {
        let scale = 1f64.max(self.max_abs()).max(other.max_abs());
        Ok(self.max_abs_diff(other)? / scale)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.p == self.q && self.max_abs_diff(&self.transpose()).is_ok_and(|d| d <= tol)
    }

    pub fn to_f64(&self) -> DoubleForm<f64> {
        DoubleForm {
            n: self.n,
            p: self.p,
            q: self.q,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `g^m / m!`.
    pub fn metric_power_normalized(n: usize, m: usize) -> Result<Self> {
        let gm = Self::metric(n).power(m)?;
        Ok(gm.scale(&(S::one() / factorial::<S>(m))))
    }
}

/// `(rank I, rank I', sign(I, I'))` for a split `K = I ⊔ I'`.
type Split = (usize, usize, Sign);

/// For every degree-`degree` basis element `K`, the decompositions `K = I ⊔ J`
/// with `|I| = p` as `(rank I, rank J, shuffle sign)`; cached per `(n, degree, p)`.
fn splits(n: usize, degree: usize, p: usize) -> &'static [Vec<Split>] {
    static CACHE: OnceLock<Vec<OnceLock<Vec<Vec<Split>>>>> = OnceLock::new();
    let side = MAX_DIM + 1;
    let cache = CACHE.get_or_init(|| (0..side * side * side).map(|_| OnceLock::new()).collect());
    cache[(n * side + degree) * side + p].get_or_init(|| {
        let table = basis_table(n);
        table.by_degree[degree]
            .iter()
            .map(|&k| {
                let mut out = Vec::new();
                let mut sub = k;
                loop {
                    if sub.count_ones() as usize == p {
                        let rest = k & !sub;
                        out.push((table.rank[sub as usize] as usize, table.rank[rest as usize] as usize, shuffle_sign(sub, rest)));
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & k;
                }
                out
            })
            .collect()
    })
}

impl<S: Scalar> Serialize for DoubleForm<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<Vec<f64>> = self.to_f64().coeff_rows();
        let mut st = serializer.serialize_struct("DoubleForm", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("coeffs", &rows)?;
        st.end()
    }
}

/// A symmetric bilinear form: a `(1,1)` double form with symmetric coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SymBilinearForm<S: Scalar = f64>(DoubleForm<S>);

impl<S: Scalar> SymBilinearForm<S> {
    /// Symmetrizes `(A + Aᵀ)/2`; exact when the input is already symmetric.
    pub fn new(form: DoubleForm<S>) -> Result<Self> {
        if form.bidegree() != (1, 1) {
            let (p, q) = form.bidegree();
            return Err(AlgebraError::BidegreeMismatch(1, 1, p, q));
        }
        let n = form.dim();
        let mut out = form.clone();
        let two = S::from_int(2);
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (form.get(i, j).clone() + form.get(j, i).clone()) / two.clone();
                out.set(i, j, avg.clone());
                out.set(j, i, avg);
            }
        }
        Ok(Self(out))
    }

    pub fn from_matrix(m: Vec<Vec<S>>) -> Result<Self> {
        Self::new(DoubleForm::from_matrix(m)?)
    }

    pub fn diagonal(values: &[S]) -> Self {
        Self(DoubleForm::diagonal(values))
    }

    pub fn metric(n: usize) -> Self {
        Self(DoubleForm::metric(n))
    }

    pub fn zero(n: usize) -> Self {
        Self(DoubleForm::zeros(n, 1, 1).expect("(1,1) fits any n"))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn form(&self) -> &DoubleForm<S> {
        &self.0
    }

    pub fn into_form(self) -> DoubleForm<S> {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        self.0.get(i, j)
    }

    pub fn matrix(&self) -> Vec<Vec<S>> {
        self.0.coeff_rows()
    }

    /// `B(x, y) = Σ B_ij x_i y_j`.
    pub fn eval(&self, x: &[S], y: &[S]) -> S {
        let n = self.dim();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.0.get(i, j).clone() * x[i].clone() * y[j].clone();
            }
        }
        acc
    }

    pub fn trace(&self) -> S {
        (0..self.dim()).fold(S::zero(), |acc, i| acc + self.0.get(i, i).clone())
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self(self.0.scale(factor))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.try_add(&other.0)?))
    }

    pub fn to_f64(&self) -> SymBilinearForm<f64> {
        SymBilinearForm(self.0.to_f64())
    }
}

impl<S: Scalar> From<SymBilinearForm<S>> for DoubleForm<S> {
    fn from(b: SymBilinearForm<S>) -> Self {
        b.0
    }
}

impl<S: Scalar> AsRef<DoubleForm<S>> for SymBilinearForm<S> {
    fn as_ref(&self) -> &DoubleForm<S> {
        &self.0
    }
}
