//! Pointwise curvature invariants of a Riemann tensor given as a `(2,2)` double
//! form: Gauss-Bonnet curvatures `h_2k`, Einstein-Lovelock tensors `T_2k`, the
//! odd curvatures `h_{2k+1}(N)` of a submanifold and the generalized Laplacian
//! `ℓ_2k` at a point.
//!
//! Where two closed forms exist for the same invariant, both are exposed: the
//! contraction route (`c^{2k}R^k/(2k)!` and friends) is the production path,
//! the star route (`*(g^{n−2k}R^k)/(n−2k)!`) is kept as an independent check.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::double_form::{AlgebraError, DoubleForm, Result, SymBilinearForm};
use crate::multiindex::enumerate_multiindices;
use crate::scalar::{factorial, Scalar};
use crate::symm::SymmetricFunctionTable;

/// Riemann curvature tensor as a symmetric `(2,2)` double form, normalized so
/// that the unit sphere has `R = g²/2` and `R(e_i∧e_j, e_i∧e_j)` is the
/// sectional curvature of the plane `e_i∧e_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CurvatureTensor<S: Scalar = f64>(DoubleForm<S>);

impl<S: Scalar> CurvatureTensor<S> {
    pub fn new(form: DoubleForm<S>) -> Result<Self> {
        if form.bidegree() != (2, 2) {
            let (p, q) = form.bidegree();
            return Err(AlgebraError::BidegreeMismatch(2, 2, p, q));
        }
        Ok(Self(form))
    }

    pub fn flat(n: usize) -> Self {
        Self(DoubleForm::zeros(n, 2, 2).expect("n ≥ 2"))
    }

    /// `λ g²/2`, constant sectional curvature `λ`.
    pub fn constant(n: usize, lambda: S) -> Self {
        let g2 = DoubleForm::<S>::metric(n).power(2).expect("n ≥ 2");
        Self(g2.scale(&(lambda / S::from_int(2))))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn form(&self) -> &DoubleForm<S> {
        &self.0
    }

    /// `R(e_a, e_b, e_c, e_d)` extended skew-symmetrically in each pair.
    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> S {
        fn pair(n: usize, a: usize, b: usize) -> Option<(usize, bool)> {
            if a == b {
                return None;
            }
            let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };
            let idx = crate::multiindex::MultiIndex::new(n, vec![lo, hi]).ok()?;
            Some((idx.position(), flip))
        }
        let n = self.dim();
        match (pair(n, a, b), pair(n, c, d)) {
            (Some((r, f1)), Some((s, f2))) => {
                let v = self.0.get(r, s).clone();
                if f1 ^ f2 {
                    -v
                } else {
                    v
                }
            }
            _ => S::zero(),
        }
    }

    /// `max |R(a,b,c,d) + R(b,c,a,d) + R(c,a,b,d)|` over all index tuples.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let sum = self.component(a, b, c, d) + self.component(b, c, a, d) + self.component(c, a, b, d);
                        worst = worst.max(sum.to_f64().abs());
                    }
                }
            }
        }
        worst
    }

    pub fn to_f64(&self) -> CurvatureTensor<f64> {
        CurvatureTensor(self.0.to_f64())
    }
}

/// Einstein-Lovelock tensor `T_2k` of an `n`-manifold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LovelockTensor<S: Scalar = f64> {
    pub form: SymBilinearForm<S>,
    /// `2k`
    pub order: usize,
}

impl<S: Scalar> LovelockTensor<S> {
    pub fn dim(&self) -> usize {
        self.form.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    Degenerate,
}

fn check_even_order(n: usize, k: usize) -> Result<()> {
    if 2 * k > n {
        return Err(AlgebraError::DegreeOutOfRange { n, p: 2 * k, q: 2 * k });
    }
    Ok(())
}

/// `R = λ g²/2 + ½ Σ_α B_α²` over an orthonormal normal frame, evaluated
/// componentwise as `R(e_a∧e_b, e_c∧e_d) = λ(δ_ac δ_bd − δ_ad δ_bc) + Σ_α (B_ac B_bd − B_ad B_bc)`.
pub fn gauss_equation<S: Scalar>(n: usize, second_forms: &[SymBilinearForm<S>], ambient_curvature: &S) -> Result<CurvatureTensor<S>> {
    if let Some(b) = second_forms.iter().find(|b| b.dim() != n) {
        return Err(AlgebraError::DimensionMismatch(n, b.dim()));
    }
    let pairs: Vec<(usize, usize)> = enumerate_multiindices(n, 2)?.iter().map(|m| (m.entries()[0], m.entries()[1])).collect();
    let mut form = DoubleForm::zeros(n, 2, 2)?;
    for (row, &(a, b)) in pairs.iter().enumerate() {
        for (col, &(c, d)) in pairs.iter().enumerate() {
            let mut v = if (a, b) == (c, d) { ambient_curvature.clone() } else { S::zero() };
            for bf in second_forms {
                v = v + bf.entry(a, c).clone() * bf.entry(b, d).clone() - bf.entry(a, d).clone() * bf.entry(b, c).clone();
            }
            form.set(row, col, v);
        }
    }
    Ok(CurvatureTensor(form))
}

/// `h_2k = c^{2k}R^k / (2k)!`.
pub fn gauss_bonnet_h<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<S> {
    check_even_order(r.dim(), k)?;
    let full = r.form().power(k)?.contract_times(2 * k)?;
    Ok(full.as_scalar().expect("scalar").clone() / factorial::<S>(2 * k))
}

/// `h_2k = *(g^{n−2k} R^k) / (n−2k)!`.
pub fn gauss_bonnet_h_star<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<S> {
    let n = r.dim();
    check_even_order(n, k)?;
    let top = DoubleForm::metric(n).power(n - 2 * k)?.exterior_product(&r.form().power(k)?)?;
    Ok(top.hodge_star().as_scalar().expect("scalar").clone() / factorial::<S>(n - 2 * k))
}

/// `T_2k = h_2k g − c^{2k−1}R^k/(2k−1)!`, with `T_0 = g` and `T_n = 0`.
pub fn lovelock_tensor<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<LovelockTensor<S>> {
    let n = r.dim();
    check_even_order(n, k)?;
    let form = if k == 0 {
        SymBilinearForm::metric(n)
    } else if 2 * k == n {
        SymBilinearForm::zero(n)
    } else {
        let rk = r.form().power(k)?;
        let partial = rk.contract_times(2 * k - 1)?;
        let h = partial.contraction()?.as_scalar().expect("scalar").clone() / factorial::<S>(2 * k);
        let g = DoubleForm::<S>::metric(n).scale(&h);
        let tail = partial.scale(&(S::one() / factorial::<S>(2 * k - 1)));
        SymBilinearForm::new(g.try_sub(&tail)?)?
    };
    Ok(LovelockTensor { form, order: 2 * k })
}

/// `T_2k = *(g^{n−2k−1} R^k) / (n−2k−1)!`, zero when `2k = n`.
pub fn lovelock_tensor_star<S: Scalar>(r: &CurvatureTensor<S>, k: usize) -> Result<LovelockTensor<S>> {
    let n = r.dim();
    check_even_order(n, k)?;
    let form = if 2 * k == n {
        SymBilinearForm::zero(n)
    } else {
        let prod = DoubleForm::metric(n).power(n - 2 * k - 1)?.exterior_product(&r.form().power(k)?)?;
        SymBilinearForm::new(prod.hodge_star().scale(&(S::one() / factorial::<S>(n - 2 * k - 1))))?
    };
    Ok(LovelockTensor { form, order: 2 * k })
}

/// `h_{2k+1}(N) = ⟨T_2k, B_N⟩`; zero when `n = 2k`.
pub fn gauss_bonnet_h_odd<S: Scalar>(r: &CurvatureTensor<S>, b_n: &SymBilinearForm<S>, k: usize) -> Result<S> {
    let n = r.dim();
    if b_n.dim() != n {
        return Err(AlgebraError::DimensionMismatch(n, b_n.dim()));
    }
    check_even_order(n, k)?;
    let t = lovelock_tensor(r, k)?;
    h_odd_from_lovelock(&t, b_n)
}

/// `⟨T_2k, B_N⟩` for an already computed Lovelock tensor.
pub fn h_odd_from_lovelock<S: Scalar>(t: &LovelockTensor<S>, b_n: &SymBilinearForm<S>) -> Result<S> {
    t.form.form().inner_product(b_n.form())
}

/// `h_{2k+1}(N) = *(g^{n−2k−1} R^k B_N) / (n−2k−1)!`.
pub fn gauss_bonnet_h_odd_star<S: Scalar>(r: &CurvatureTensor<S>, b_n: &SymBilinearForm<S>, k: usize) -> Result<S> {
    let n = r.dim();
    if b_n.dim() != n {
        return Err(AlgebraError::DimensionMismatch(n, b_n.dim()));
    }
    check_even_order(n, k)?;
    if 2 * k == n {
        return Ok(S::zero());
    }
    let top = DoubleForm::metric(n)
        .power(n - 2 * k - 1)?
        .exterior_product(&r.form().power(k)?)?
        .exterior_product(b_n.form())?;
    Ok(top.hodge_star().as_scalar().expect("scalar").clone() / factorial::<S>(n - 2 * k - 1))
}

/// Gauss-Bonnet curvature `h_2k` of a hypersurface in a space form of
/// curvature `c`, from the symmetric functions of its shape operator:
/// `h_2k = Σ_i k!(2k−2i)!(n−2k+2i)! / (i!(k−i)!) · s_{2k−2i} c^i / (2^k (n−2k)!)`.
pub fn spaceform_h_from_s<S: Scalar>(s: &SymmetricFunctionTable<S>, c: &S, k: usize) -> Result<S> {
    let n = s.dim();
    check_even_order(n, k)?;
    let mut acc = S::zero();
    for i in 0..=k {
        let coeff = factorial::<S>(k) * factorial::<S>(2 * k - 2 * i) * factorial::<S>(n + 2 * i - 2 * k)
            / (factorial::<S>(i) * factorial::<S>(k - i));
        acc = acc + coeff * s.get(2 * k - 2 * i) * pow(c, i);
    }
    Ok(acc / (pow(&S::from_int(2), k) * factorial::<S>(n - 2 * k)))
}

/// Inverse of [`spaceform_h_from_s`]: `s_2k` from `h_0, h_2, …, h_2k`
/// (`h_even[i]` holds `h_{2i}`):
/// `s_2k = k!/((2k)!(n−2k)!) Σ_i (−1)^{k−i} 2^i(n−2i)!/(i!(k−i)!) h_2i c^{k−i}`.
pub fn spaceform_s_from_h<S: Scalar>(h_even: &[S], c: &S, n: usize, k: usize) -> Result<S> {
    check_even_order(n, k)?;
    if h_even.len() <= k {
        return Err(AlgebraError::DegreeOutOfRange { n, p: 2 * k, q: 2 * (h_even.len().max(1) - 1) });
    }
    let mut acc = S::zero();
    for i in 0..=k {
        let coeff = pow(&S::from_int(2), i) * factorial::<S>(n - 2 * i) / (factorial::<S>(i) * factorial::<S>(k - i));
        let term = coeff * h_even[i].clone() * pow(c, k - i);
        acc = if (k - i) % 2 == 1 { acc - term } else { acc + term };
    }
    Ok(acc * factorial::<S>(k) / (factorial::<S>(2 * k) * factorial::<S>(n - 2 * k)))
}

/// `h_{2k+1}` of a hypersurface in a space form of curvature `λ`, as a
/// polynomial in the odd symmetric functions of the shape operator.
pub fn hypersurface_minimality_polynomial<S: Scalar>(s: &SymmetricFunctionTable<S>, lambda: &S, k: usize) -> Result<S> {
    let n = s.dim();
    if 2 * k >= n {
        return Err(AlgebraError::DegreeOutOfRange { n, p: 2 * k + 1, q: 2 * k + 1 });
    }
    let mut acc = S::zero();
    for i in 0..=k {
        let num = factorial::<S>(k) * factorial::<S>(2 * k - 2 * i + 1) * factorial::<S>(n - 2 * k - 1 + 2 * i) * pow(lambda, i);
        let den = factorial::<S>(i) * factorial::<S>(k - i) * factorial::<S>(n - 2 * k - 1) * pow(&S::from_int(2), k);
        acc = acc + num / den * s.get(2 * k - 2 * i + 1);
    }
    Ok(acc)
}

/// `ℓ_2k(f) = −⟨T_2k, Hess f⟩` at a point.
pub fn ell2k_pointwise<S: Scalar>(t: &LovelockTensor<S>, hess: &SymBilinearForm<S>) -> Result<S> {
    if t.dim() != hess.dim() {
        return Err(AlgebraError::DimensionMismatch(t.dim(), hess.dim()));
    }
    Ok(-t.form.form().inner_product(hess.form())?)
}

/// Ascending eigenvalues of a symmetric bilinear form.
pub fn spectrum(b: &SymBilinearForm<f64>) -> Vec<f64> {
    let n = b.dim();
    if n == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_row_slice(n, n, b.form().coeffs());
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub const DEGENERATE_EIGENVALUE: f64 = 1e-10;

/// Definiteness of `T_2k`, the ellipticity criterion for `ℓ_2k`.
pub fn is_definite<S: Scalar>(t: &LovelockTensor<S>) -> Definiteness {
    let ev = spectrum(&t.form.to_f64());
    if ev.iter().any(|v| v.abs() <= DEGENERATE_EIGENVALUE) {
        Definiteness::Degenerate
    } else if ev.iter().all(|&v| v > 0.0) {
        Definiteness::Positive
    } else if ev.iter().all(|&v| v < 0.0) {
        Definiteness::Negative
    } else {
        Definiteness::Indefinite
    }
}

fn pow<S: Scalar>(base: &S, e: usize) -> S {
    (0..e).fold(S::one(), |acc, _| acc * base.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::factorial_f64;
    use crate::symm::elementary_symmetric;

    fn unit_sphere(n: usize) -> CurvatureTensor<f64> {
        gauss_equation(n, &[SymBilinearForm::metric(n)], &0.0).unwrap()
    }

    #[test]
    fn gauss_equation_matches_exterior_squares() {
        let b1 = SymBilinearForm::from_matrix(vec![vec![0.3, -1.0, 0.2, 0.0], vec![-1.0, 0.5, 0.1, 0.7], vec![0.2, 0.1, -0.4, 0.6], vec![0.0, 0.7, 0.6, 1.1]]).unwrap();
        let b2 = SymBilinearForm::diagonal(&[1.0, -2.0, 0.5, 0.25]);
        let lambda = 0.7;
        let half = 0.5;
        let expected = DoubleForm::metric(4)
            .power(2)
            .unwrap()
            .scale(&(lambda * half))
            .try_add(&b1.form().power(2).unwrap().scale(&half))
            .unwrap()
            .try_add(&b2.form().power(2).unwrap().scale(&half))
            .unwrap();
        let r = gauss_equation(4, &[b1, b2], &lambda).unwrap();
        assert!(r.form().max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn gauss_equation_examples() {
        assert_eq!(unit_sphere(3), CurvatureTensor::constant(3, 1.0));
        assert_eq!(gauss_equation::<f64>(3, &[], &0.0).unwrap(), CurvatureTensor::flat(3));
        assert_eq!(
            gauss_equation(4, &[SymBilinearForm::zero(4)], &0.5).unwrap(),
            CurvatureTensor::constant(4, 0.5)
        );
        let bad = gauss_equation(3, &[SymBilinearForm::<f64>::metric(2)], &0.0);
        assert_eq!(bad, Err(AlgebraError::DimensionMismatch(3, 2)));
    }

    #[test]
    fn sectional_curvature_normalization() {
        let r = unit_sphere(3);
        assert_eq!(r.component(0, 1, 0, 1), 1.0);
        assert_eq!(r.component(1, 0, 0, 1), -1.0);
        assert_eq!(r.bianchi_defect(), 0.0);
    }

    #[test]
    fn sphere_gauss_bonnet_values() {
        for n in 2..=6 {
            let r = unit_sphere(n);
            for k in 0..=n / 2 {
                let expected = factorial_f64(n) / (2f64.powi(k as i32) * factorial_f64(n - 2 * k));
                assert!((gauss_bonnet_h(&r, k).unwrap() - expected).abs() < 1e-9 * expected);
                assert!((gauss_bonnet_h_star(&r, k).unwrap() - expected).abs() < 1e-9 * expected);
            }
        }
        assert_eq!(gauss_bonnet_h(&unit_sphere(4), 1).unwrap(), 6.0);
        assert_eq!(gauss_bonnet_h(&unit_sphere(4), 0).unwrap(), 1.0);
        assert!(gauss_bonnet_h(&unit_sphere(4), 3).is_err());
    }

    #[test]
    fn lovelock_examples() {
        let r = unit_sphere(4);
        assert_eq!(lovelock_tensor(&r, 0).unwrap().form, SymBilinearForm::metric(4));
        assert_eq!(lovelock_tensor(&r, 2).unwrap().form, SymBilinearForm::zero(4));
        let t2 = lovelock_tensor(&r, 1).unwrap();
        assert_eq!(t2.form, SymBilinearForm::metric(4).scale(&3.0));
        assert!(t2.form.form().max_abs_diff(lovelock_tensor_star(&r, 1).unwrap().form.form()).unwrap() < 1e-12);
    }

    #[test]
    fn odd_curvature_examples() {
        let n = 5;
        let b = SymBilinearForm::diagonal(&[0.3, -1.0, 2.0, 0.5, 0.1]);
        let flat = CurvatureTensor::flat(n);
        assert!((gauss_bonnet_h_odd(&flat, &b, 0).unwrap() - b.trace()).abs() < 1e-12);
        assert_eq!(gauss_bonnet_h_odd(&flat, &b, 1).unwrap(), 0.0);
        let lambda = 0.7;
        let r = CurvatureTensor::constant(n, lambda);
        for k in 0..=2 {
            let expected = factorial_f64(n - 1) * lambda.powi(k as i32)
                / (factorial_f64(n - 2 * k - 1) * 2f64.powi(k as i32))
                * b.trace();
            let got = gauss_bonnet_h_odd(&r, &b, k).unwrap();
            assert!((got - expected).abs() < 1e-10, "k={k}: {got} vs {expected}");
            assert!((gauss_bonnet_h_odd_star(&r, &b, k).unwrap() - expected).abs() < 1e-10);
        }
        assert_eq!(gauss_bonnet_h_odd(&r, &SymBilinearForm::zero(n), 1).unwrap(), 0.0);
        // n = 2k
        let r4 = unit_sphere(4);
        assert_eq!(gauss_bonnet_h_odd_star(&r4, &SymBilinearForm::metric(4), 2).unwrap(), 0.0);
        assert_eq!(gauss_bonnet_h_odd(&r4, &SymBilinearForm::metric(4), 2).unwrap(), 0.0);
    }

    #[test]
    fn flat_space_reduces_to_symmetric_functions() {
        // c = 0: h_2k = (2k)!/2^k s_2k
        let b = SymBilinearForm::diagonal(&[1.0, 2.0, -0.5, 3.0, 0.25]);
        let s = SymmetricFunctionTable::of(&b).unwrap();
        let r = gauss_equation(5, &[b.clone()], &0.0).unwrap();
        for k in 0..=2 {
            let direct = gauss_bonnet_h(&r, k).unwrap();
            let converted = spaceform_h_from_s(&s, &0.0, k).unwrap();
            let single = factorial_f64(2 * k) / 2f64.powi(k as i32) * s.get(2 * k);
            assert!((direct - converted).abs() < 1e-9);
            assert!((direct - single).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_sphere_conversion() {
        let s = SymmetricFunctionTable::of(&SymBilinearForm::<f64>::metric(4)).unwrap();
        assert_eq!(s.get(2), 6.0);
        assert!((spaceform_h_from_s(&s, &0.0, 1).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn minimality_polynomial_reductions() {
        let b = SymBilinearForm::diagonal(&[1.0, 1.0, 2.0]);
        let s = SymmetricFunctionTable::of(&b).unwrap();
        assert!((hypersurface_minimality_polynomial(&s, &0.0, 1).unwrap() - 3.0 * s.get(3)).abs() < 1e-12);
        assert!((hypersurface_minimality_polynomial(&s, &1.3, 0).unwrap() - s.get(1)).abs() < 1e-12);
        let r = gauss_equation(3, &[b.clone()], &1.0).unwrap();
        let direct = gauss_bonnet_h_odd(&r, &b, 1).unwrap();
        assert!((hypersurface_minimality_polynomial(&s, &1.0, 1).unwrap() - direct).abs() < 1e-12);
        assert!(hypersurface_minimality_polynomial(&s, &1.0, 2).is_err());
        assert_eq!(elementary_symmetric(&b, 3).unwrap(), 2.0);
    }

    #[test]
    fn ell_examples() {
        let g = lovelock_tensor(&CurvatureTensor::flat(3), 0).unwrap();
        let hess = SymBilinearForm::metric(3);
        assert_eq!(ell2k_pointwise(&g, &hess).unwrap(), -3.0);
        let scaled = LovelockTensor { form: g.form.scale(&2.5), order: 2 };
        assert_eq!(ell2k_pointwise(&scaled, &hess).unwrap(), -7.5);
        assert_eq!(ell2k_pointwise(&g, &SymBilinearForm::zero(3)).unwrap(), 0.0);
        assert!(ell2k_pointwise(&g, &SymBilinearForm::zero(2)).is_err());
    }

    #[test]
    fn definiteness() {
        let g = LovelockTensor { form: SymBilinearForm::<f64>::metric(3), order: 0 };
        assert_eq!(is_definite(&g), Definiteness::Positive);
        let neg = LovelockTensor { form: g.form.scale(&-1.0), order: 0 };
        assert_eq!(is_definite(&neg), Definiteness::Negative);
        let mixed = LovelockTensor { form: SymBilinearForm::diagonal(&[1.0, -1.0]), order: 0 };
        assert_eq!(is_definite(&mixed), Definiteness::Indefinite);
        let flat_t2 = lovelock_tensor(&CurvatureTensor::<f64>::flat(3), 1).unwrap();
        assert_eq!(is_definite(&flat_t2), Definiteness::Degenerate);
    }
}
