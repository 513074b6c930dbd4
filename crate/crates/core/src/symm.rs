//! Elementary symmetric functions and Newton transformations of a symmetric
//! bilinear form, computed through contractions and stars of its exterior powers.

use serde::Serialize;

use crate::double_form::{AlgebraError, DoubleForm, Result, SymBilinearForm};
use crate::scalar::{factorial, Scalar};

fn check_degree(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(AlgebraError::DegreeOutOfRange { n, p: k, q: k });
    }
    Ok(())
}

/// `s_k(B) = c^k(B^k) / (k!)²`.
pub fn elementary_symmetric<S: Scalar>(b: &SymBilinearForm<S>, k: usize) -> Result<S> {
    let n = b.dim();
    check_degree(n, k)?;
    let full = b.form().power(k)?.contract_times(k)?;
    let kf = factorial::<S>(k);
    Ok(full.as_scalar().expect("full contraction is a scalar").clone() / (kf.clone() * kf))
}

/// `s_k(B) = *(g^{n−k} B^k) / (k!(n−k)!)`, the star route.
pub fn elementary_symmetric_star<S: Scalar>(b: &SymBilinearForm<S>, k: usize) -> Result<S> {
    let n = b.dim();
    check_degree(n, k)?;
    let top = DoubleForm::metric(n).power(n - k)?.exterior_product(&b.form().power(k)?)?;
    let v = top.hodge_star().as_scalar().expect("star of an (n,n) form").clone();
    Ok(v / (factorial::<S>(k) * factorial::<S>(n - k)))
}

/// `t_k(B) = *(g^{n−k−1} B^k) / ((n−k−1)! k!)`, with `t_n = 0`.
pub fn newton_transform<S: Scalar>(b: &SymBilinearForm<S>, k: usize) -> Result<SymBilinearForm<S>> {
    let n = b.dim();
    check_degree(n, k)?;
    if k == n {
        return Ok(SymBilinearForm::zero(n));
    }
    let prod = DoubleForm::metric(n).power(n - k - 1)?.exterior_product(&b.form().power(k)?)?;
    let norm = factorial::<S>(n - k - 1) * factorial::<S>(k);
    SymBilinearForm::new(prod.hodge_star().scale(&(S::one() / norm)))
}

/// `t_k(B) = s_k g − c^{k−1}B^k/((k−1)! k!)` for `1 ≤ k < n`, `t_0 = g`.
pub fn newton_transform_contraction<S: Scalar>(b: &SymBilinearForm<S>, k: usize) -> Result<SymBilinearForm<S>> {
    let n = b.dim();
    check_degree(n, k)?;
    if k == n {
        return Ok(SymBilinearForm::zero(n));
    }
    let sk = elementary_symmetric(b, k)?;
    let g = DoubleForm::<S>::metric(n).scale(&sk);
    if k == 0 {
        return SymBilinearForm::new(g);
    }
    let tail = b.form().power(k)?.contract_times(k - 1)?;
    let tail = tail.scale(&(S::one() / (factorial::<S>(k - 1) * factorial::<S>(k))));
    SymBilinearForm::new(g.try_sub(&tail)?)
}

/// `s_k(B + λg) = Σ_i (n−i)! / ((k−i)!(n−k)!) · s_i(B) λ^{k−i}`.
pub fn shift_expansion<S: Scalar>(b: &SymBilinearForm<S>, lambda: &S, k: usize) -> Result<S> {
    let n = b.dim();
    check_degree(n, k)?;
    let mut acc = S::zero();
    for i in 0..=k {
        // C(n−i, k−i): each eigenvalue product of size i extends in that many ways
        let coeff = factorial::<S>(n - i) / (factorial::<S>(k - i) * factorial::<S>(n - k));
        let pow = (0..k - i).fold(S::one(), |a, _| a * lambda.clone());
        acc = acc + coeff * elementary_symmetric(b, i)? * pow;
    }
    Ok(acc)
}

/// `s_0..s_n` of a symmetric bilinear form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricFunctionTable<S: Scalar = f64> {
    values: Vec<S>,
    #[serde(skip)]
    source: SymBilinearForm<S>,
}

impl<S: Scalar> SymmetricFunctionTable<S> {
    pub fn of(b: &SymBilinearForm<S>) -> Result<Self> {
        let values = (0..=b.dim()).map(|k| elementary_symmetric(b, k)).collect::<Result<_>>()?;
        Ok(Self { values, source: b.clone() })
    }

    /// A table not tied to a concrete form, e.g. for conversion formulas.
    /// `values[0]` is expected to be 1.
    pub fn from_values(values: Vec<S>) -> Self {
        let n = values.len().saturating_sub(1);
        Self { values, source: SymBilinearForm::zero(n) }
    }

    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    /// `s_k`, or zero beyond the table.
    pub fn get(&self, k: usize) -> S {
        self.values.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn source(&self) -> &SymBilinearForm<S> {
        &self.source
    }
}
