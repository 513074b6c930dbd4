//! Randomized certification of the algebraic identities of double forms,
//! symmetric functions and curvature invariants.
//!
//! Each identity is evaluated on seeded random instances and the worst relative
//! deviation `|a − b| / max(1, |a|, |b|)` is recorded. In exact mode
//! ([`num_rational::BigRational`] coefficients) every deviation must be zero.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{
    gauss_bonnet_h, gauss_bonnet_h_odd, gauss_bonnet_h_odd_star, gauss_bonnet_h_star, gauss_equation,
    lovelock_tensor, lovelock_tensor_star, spaceform_h_from_s, spaceform_s_from_h, CurvatureTensor,
};
use crate::double_form::{DoubleForm, Result, SymBilinearForm};
use crate::multiindex::{basis_table, binomial};
use crate::scalar::{factorial, Scalar};
use crate::symm::{
    elementary_symmetric, elementary_symmetric_star, newton_transform, newton_transform_contraction,
    shift_expansion, SymmetricFunctionTable,
};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { n_min: 2, n_max: 6, trials: 200, seed: 42, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub checks: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub mode: &'static str,
    pub config: SuiteConfig,
    pub identities: Vec<IdentityResult>,
    pub all_passed: bool,
}

impl SuiteReport {
    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.identities.iter().find(|r| r.name == name)
    }
}

struct Tally {
    entries: Vec<(String, usize, f64)>,
}

impl Tally {
    fn record(&mut self, name: &str, deviation: f64) {
        // NaN must never look like a pass
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        match self.entries.iter_mut().find(|(n, ..)| n == name) {
            Some(entry) => {
                entry.1 += 1;
                entry.2 = entry.2.max(deviation);
            }
            None => self.entries.push((name.to_string(), 1, deviation)),
        }
    }

    fn forms<S: Scalar>(&mut self, name: &str, a: &DoubleForm<S>, b: &DoubleForm<S>) -> Result<()> {
        self.record(name, a.rel_diff(b)?);
        Ok(())
    }

    fn scalars<S: Scalar>(&mut self, name: &str, a: &S, b: &S) {
        self.record(name, rel_scalar(a, b));
    }
}

fn rel_scalar<S: Scalar>(a: &S, b: &S) -> f64 {
    let diff = (a.clone() - b.clone()).to_f64().abs();
    diff / 1f64.max(a.to_f64().abs()).max(b.to_f64().abs())
}

fn random_form<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> DoubleForm<S> {
    let rows = (0..binomial(n, p)).map(|_| (0..binomial(n, q)).map(|_| S::sample(rng)).collect()).collect();
    DoubleForm::from_rows(n, p, q, rows).expect("shape matches")
}

pub(crate) fn random_symmetric<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> SymBilinearForm<S> {
    let mut m = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = S::sample(rng);
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    SymBilinearForm::from_matrix(m).expect("square")
}

/// A random curvature-type tensor `Σ_m A_m·C_m` of products of symmetric
/// bilinear forms; such sums satisfy the first Bianchi identity.
pub fn random_bianchi_tensor<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> CurvatureTensor<S> {
    let mut acc = DoubleForm::zeros(n, 2, 2).expect("n ≥ 2");
    for _ in 0..terms {
        let a = random_symmetric::<S>(rng, n);
        let c = random_symmetric::<S>(rng, n);
        acc = acc.try_add(&a.form().exterior_product(c.form()).expect("(2,2) fits")).expect("same shape");
    }
    CurvatureTensor::new(acc).expect("(2,2)")
}

/// Determinant by Gaussian elimination with partial pivoting (exact on rationals).
fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let k = m.len();
    let mut det = S::one();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).expect("finite"))
            .expect("non-empty");
        if m[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col].clone();
        for row in (col + 1)..k {
            let factor = m[row][col].clone() / m[col][col].clone();
            for c in col..k {
                let v = m[col][c].clone() * factor.clone();
                m[row][c] = m[row][c].clone() - v;
            }
        }
    }
    det
}

fn sign_factor<S: Scalar>(p: usize, q: usize, n: usize) -> S {
    let e = (p + q) as i64 * (n as i64 - p as i64 - q as i64);
    if e.rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    }
}

/// Runs every identity for `n_min ≤ n ≤ n_max`, `trials` instances per `n`.
pub fn run_suite<S: Scalar>(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut tally = Tally { entries: Vec::new() };
    for n in config.n_min..=config.n_max {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ ((n as u64) << 32));
        for _ in 0..config.trials {
            algebra_trial::<S>(&mut tally, &mut rng, n)?;
            symmetric_trial::<S>(&mut tally, &mut rng, n)?;
            if n >= 2 {
                curvature_trial::<S>(&mut tally, &mut rng, n)?;
            }
        }
    }
    let tol = if S::EXACT { 0.0 } else { config.tolerance };
    let identities: Vec<IdentityResult> = tally
        .entries
        .into_iter()
        .map(|(name, checks, max_deviation)| IdentityResult { name, checks, max_deviation, passed: max_deviation <= tol })
        .collect();
    let all_passed = identities.iter().all(|r| r.passed);
    Ok(SuiteReport {
        mode: if S::EXACT { "exact" } else { "float" },
        config: config.clone(),
        identities,
        all_passed,
    })
}

fn algebra_trial<S: Scalar>(t: &mut Tally, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    for p in 0..=n {
        for q in 0..=n {
            let w = random_form::<S>(rng, n, p, q);
            let theta = random_form::<S>(rng, n, p, q);
            let s = sign_factor::<S>(p, q, n);

            t.forms("double_star", &w.hodge_star().hodge_star(), &w.scale(&s))?;

            let star_route = w.inner_product(&theta)?;
            let swapped = w.hodge_star().exterior_product(&theta)?.hodge_star();
            let swapped = swapped.as_scalar().expect("scalar").clone() * s;
            t.scalars("inner_product_star_symmetry", &star_route, &swapped);
            t.scalars("inner_product_component_sum", &star_route, &w.component_inner(&theta)?);

            // with this star convention the pair holds up to (−1)^{n(p+q)}
            let parity = if (n * (p + q)) % 2 == 0 { S::one() } else { -S::one() };
            if p < n && q < n {
                let via_star = w.hodge_star().contraction()?.hodge_star().scale(&parity);
                t.forms("metric_mult_via_star", &w.mult_by_metric()?, &via_star)?;
                let upper = random_form::<S>(rng, n, p + 1, q + 1);
                let lhs = w.mult_by_metric()?.inner_product(&upper)?;
                let rhs = w.inner_product(&upper.contraction()?)?;
                t.scalars("adjointness", &lhs, &rhs);
            }
            if p > 0 && q > 0 {
                let via_star = w.hodge_star().mult_by_metric()?.hodge_star().scale(&parity);
                t.forms("contraction_via_star", &w.contraction()?, &via_star)?;
            }
        }
    }

    // determinant law on a random symmetric form
    let b = random_symmetric::<S>(rng, n);
    let m = b.matrix();
    let table = basis_table(n);
    for k in 1..=n {
        let bk = b.form().power(k)?;
        let kf = factorial::<S>(k);
        let basis = &table.by_degree[k];
        for (r, &rm) in basis.iter().enumerate() {
            for (c, &cm) in basis.iter().enumerate() {
                let rows: Vec<usize> = (0..n).filter(|i| rm & (1 << i) != 0).collect();
                let cols: Vec<usize> = (0..n).filter(|i| cm & (1 << i) != 0).collect();
                let sub = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                t.scalars("determinant_law", bk.get(r, c), &(kf.clone() * determinant(sub)));
            }
        }
    }

    // star/contraction identities for products of symmetric forms
    for j in 1..=2usize.min(n) {
        let mut w = DoubleForm::one(n);
        for _ in 0..j {
            w = w.exterior_product(random_symmetric::<S>(rng, n).form())?;
        }
        let p = j;
        let lhs = DoubleForm::metric(n).power(n - p)?.exterior_product(&w)?.hodge_star();
        let lhs = lhs.scale(&(S::one() / factorial::<S>(n - p)));
        let cp = w.contract_times(p)?.scale(&(S::one() / factorial::<S>(p)));
        t.forms("star_metric_power_full", &lhs, &cp)?;
        if p < n {
            let lhs = DoubleForm::metric(n).power(n - p - 1)?.exterior_product(&w)?.hodge_star();
            let lhs = lhs.scale(&(S::one() / factorial::<S>(n - p - 1)));
            let tail = w.contract_times(p - 1)?.scale(&(S::one() / factorial::<S>(p - 1)));
            let rhs = cp.mult_by_metric()?.try_sub(&tail)?;
            t.forms("star_metric_power_partial", &lhs, &rhs)?;
        }
    }
    Ok(())
}

fn symmetric_trial<S: Scalar>(t: &mut Tally, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let b = random_symmetric::<S>(rng, n);
    let table = SymmetricFunctionTable::of(&b)?;
    for k in 0..=n {
        t.scalars("symmetric_function_star_route", &table.get(k), &elementary_symmetric_star(&b, k)?);
        let tk = newton_transform(&b, k)?;
        let pairing = tk.form().inner_product(b.form())?;
        t.scalars("newton_pairing", &pairing, &(S::from_int(k as i64 + 1) * table.get(k + 1)));
        t.scalars("newton_trace", &tk.trace(), &(S::from_int((n - k) as i64) * table.get(k)));
        if k < n {
            t.forms("newton_contraction_form", tk.form(), newton_transform_contraction(&b, k)?.form())?;
        }
    }
    for lambda in [S::from_int(-2), S::from_int(-1), S::from_ratio(1, 2), S::from_int(3)] {
        let shifted = SymBilinearForm::new(b.form().try_add(&DoubleForm::metric(n).scale(&lambda))?)?;
        for k in 0..=n {
            t.scalars("shift_expansion", &shift_expansion(&b, &lambda, k)?, &elementary_symmetric(&shifted, k)?);
        }
    }
    Ok(())
}

fn curvature_trial<S: Scalar>(t: &mut Tally, rng: &mut ChaCha8Rng, n: usize) -> Result<()> {
    let r = random_bianchi_tensor::<S>(rng, n, 2);
    let b_n = random_symmetric::<S>(rng, n);
    for k in 0..=n / 2 {
        let h = gauss_bonnet_h(&r, k)?;
        t.scalars("gauss_bonnet_dual_route", &h, &gauss_bonnet_h_star(&r, k)?);
        let tk = lovelock_tensor(&r, k)?;
        t.forms("lovelock_dual_route", tk.form.form(), lovelock_tensor_star(&r, k)?.form.form())?;
        t.scalars("lovelock_trace", &tk.form.trace(), &(S::from_int((n - 2 * k) as i64) * h));
        t.scalars("odd_curvature_dual_route", &gauss_bonnet_h_odd(&r, &b_n, k)?, &gauss_bonnet_h_odd_star(&r, &b_n, k)?);
    }

    // hypersurface in a space form: conversions against the Gauss equation
    let shape = random_symmetric::<S>(rng, n);
    let c = S::sample(rng);
    let s = SymmetricFunctionTable::of(&shape)?;
    let r = gauss_equation(n, std::slice::from_ref(&shape), &c)?;
    let mut h_even = Vec::new();
    for k in 0..=n / 2 {
        let h = spaceform_h_from_s(&s, &c, k)?;
        t.scalars("spaceform_matches_gauss_equation", &h, &gauss_bonnet_h(&r, k)?);
        h_even.push(h);
    }
    for k in 0..=n / 2 {
        t.scalars("spaceform_round_trip", &spaceform_s_from_h(&h_even, &c, n, k)?, &s.get(2 * k));
    }
    Ok(())
}
