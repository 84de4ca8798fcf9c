//! Hermitian metrics given by their fundamental 2-form and an almost complex
//! structure: dual pairing on 1-forms, Gram matrices of coframes, traces,
//! Chern connection curvature and Chern-Ricci quantities.

use crate::acs::{Acs, AcsField};
use crate::calculus::{del_scalar, i_ddbar, i_ddbar_form, I};
use crate::chart::ChartId;
use crate::error::{Error, Result};
use crate::form::{Coeff, Form, FormJet};
use crate::jet::{Jet, C64};
use crate::linalg::{
    conj, form_trace, form_wedge_mul, inverse, mat_mul, scalar_form_mul, transpose, FormMatrix,
    Matrix,
};

/// Antisymmetric matrix `W` with `ω(u, v) = uᵀ W v`.
pub fn form_matrix<C: Coeff>(omega: &Form<C>, like: &C) -> Result<Matrix<C>> {
    if omega.degree() != 2 {
        return Err(Error::WrongDegree {
            expected: 2,
            found: omega.degree(),
        });
    }
    let n = omega.dim();
    let mut w = vec![vec![like.zero_like(); n]; n];
    for (&mask, c) in omega.terms() {
        let i = mask.trailing_zeros() as usize;
        let j = (31 - (mask & !(1 << i)).leading_zeros()) as usize;
        w[i][j] = c.clone();
        w[j][i] = c.scale_c(C64::new(-1.0, 0.0));
    }
    Ok(w)
}

/// Riemannian metric `g(u, v) = ω(u, Jv)` as a matrix on tangent vectors.
pub fn riemannian_matrix<C: Coeff>(omega: &Form<C>, j: &Acs<C>, like: &C) -> Result<Matrix<C>> {
    let w = form_matrix(omega, like)?;
    let jv = transpose(&j.matrix().to_vec());
    Ok(mat_mul(&w, &jv))
}

/// Inverse metric on 1-forms; the Hermitian pairing is `⟨a, b⟩ = aᵀ G⁻¹ b̄`.
pub fn dual_metric<C: Coeff>(omega: &Form<C>, j: &Acs<C>, like: &C) -> Result<Matrix<C>> {
    let g = riemannian_matrix(omega, j, like)?;
    inverse(&g).map_err(|_| Error::DegenerateMetric("ω(·, J·) is singular".into()))
}

pub fn pairing<C: Coeff>(ginv: &Matrix<C>, a: &Form<C>, b: &Form<C>, like: &C) -> Result<C> {
    let zero = like.zero_like();
    let av = a.one_form_coeffs(&zero)?;
    let bv: Vec<C> = b.one_form_coeffs(&zero)?.iter().map(|c| c.conj_c()).collect();
    let mut acc = zero;
    for (i, ai) in av.iter().enumerate() {
        if ai.negligible() {
            continue;
        }
        for (k, bk) in bv.iter().enumerate() {
            if bk.negligible() {
                continue;
            }
            acc = acc.add_c(&ai.mul_c(&ginv[i][k]).mul_c(bk));
        }
    }
    Ok(acc)
}

/// `H_ij = ⟨e_i, e_j⟩` for a list of 1-forms.
pub fn gram<C: Coeff>(omega: &Form<C>, j: &Acs<C>, frame: &[Form<C>], like: &C) -> Result<Matrix<C>> {
    let ginv = dual_metric(omega, j, like)?;
    let mut h = Vec::with_capacity(frame.len());
    for a in frame {
        let mut row = Vec::with_capacity(frame.len());
        for b in frame {
            row.push(pairing(&ginv, a, b, like)?);
        }
        h.push(row);
    }
    Ok(h)
}

/// `ω^k`.
pub fn power<C: Coeff>(omega: &Form<C>, k: usize, like: &C) -> Form<C> {
    let mut out = Form::scalar(omega.dim(), like.one_like());
    for _ in 0..k {
        out = out.wedge(omega);
    }
    out
}

fn top<C: Coeff>(f: &Form<C>, like: &C) -> C {
    f.top_coeff().cloned().unwrap_or_else(|| like.zero_like())
}

/// Metric trace `Λα` of a 2-form, defined by `n ω^{n−1} ∧ α = (Λα) ωⁿ`.
pub fn trace<C: Coeff>(omega: &Form<C>, alpha: &Form<C>, like: &C) -> Result<C> {
    let n = omega.dim() / 2;
    let num = top(&power(omega, n - 1, like).wedge(alpha), like);
    let den = top(&power(omega, n, like), like);
    if den.magnitude() == 0.0 {
        return Err(Error::DegenerateMetric("ωⁿ vanishes".into()));
    }
    Ok(num.mul_c(&den.recip_c()?).scale_c(C64::new(n as f64, 0.0)))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `‖Ω‖²_ω`, from `i^{n²} Ω ∧ Ω̄ = ‖Ω‖² ωⁿ/n!`.
pub fn omega_norm_sq<C: Coeff>(omega: &Form<C>, vol: &Form<C>, like: &C) -> Result<C> {
    let n = omega.dim() / 2;
    if vol.degree() != n {
        return Err(Error::WrongDegree {
            expected: n,
            found: vol.degree(),
        });
    }
    let num = top(&vol.wedge(&vol.conj()), like).scale_c(I.powu((n * n) as u32));
    let den = top(&power(omega, n, like), like).scale_c(C64::new(1.0 / factorial(n), 0.0));
    if den.magnitude() == 0.0 {
        return Err(Error::DegenerateMetric("ωⁿ vanishes".into()));
    }
    let r = num.mul_c(&den.recip_c()?);
    Ok(r)
}

/// `‖Ω‖_ω` as a jet, checking that the squared norm is positive.
pub fn omega_norm_jet(omega: &FormJet, vol: &FormJet, like: &Jet) -> Result<Jet> {
    let sq = omega_norm_sq(omega, vol, like)?;
    let v = sq.value();
    if !(v.re > 0.0) || v.im.abs() > 1e-9 * v.re {
        return Err(Error::DegenerateMetric(format!("‖Ω‖² = {v}")));
    }
    sq.sqrt()
}

/// A Hermitian metric field on a chart together with its complex structure
/// and a nowhere-vanishing holomorphic volume form.
pub trait HermitianMetricField: Send + Sync {
    fn chart(&self) -> ChartId;
    /// The fundamental 2-form at coordinate jets `x`.
    fn metric(&self, x: &[Jet]) -> Result<FormJet>;
    fn structure(&self, x: &[Jet]) -> Result<AcsField>;
    fn volume(&self, x: &[Jet]) -> Result<FormJet>;
    /// Derivative orders consumed building the metric from coordinate jets.
    fn extra_order(&self) -> usize {
        0
    }
}

/// Chern-Ricci form `ρ = i∂∂̄ log ‖Ω‖²` (equal to `−i∂∂̄ log det g` in any
/// holomorphic chart).
pub fn chern_ricci(omega: &FormJet, vol: &FormJet, j: &AcsField) -> Result<FormJet> {
    let like = any_coeff(omega)?;
    let sq = omega_norm_sq(omega, vol, &like)?;
    i_ddbar(&sq.ln()?, j)
}

fn any_coeff(f: &FormJet) -> Result<Jet> {
    f.terms()
        .values()
        .next()
        .cloned()
        .ok_or_else(|| Error::DegenerateMetric("zero form".into()))
}

/// Chern scalar curvature `s = Λρ`.
pub fn chern_scalar(omega: &FormJet, vol: &FormJet, j: &AcsField) -> Result<Jet> {
    let rho = chern_ricci(omega, vol, j)?;
    let like = any_coeff(omega)?;
    trace(omega, &rho, &like)
}

/// Complex Laplacian `Δf = Λ(i∂∂̄f)`.
pub fn laplacian(omega: &FormJet, f: &Jet, j: &AcsField) -> Result<Jet> {
    let like = any_coeff(omega)?;
    trace(omega, &i_ddbar(f, j)?, &like)
}

/// Chern curvature of a Gram matrix `H` of a holomorphic frame: with
/// `θ = H̄⁻¹∂H̄`, returns `dθ + θ∧θ`. Its (1,1) part is `∂̄θ` and its
/// (2,0) part vanishes identically.
pub fn chern_curvature(h: &Matrix<Jet>, j: &AcsField) -> Result<FormMatrix<Jet>> {
    let theta = connection(h, j)?;
    let mut dtheta = Vec::with_capacity(theta.len());
    for row in &theta {
        let mut r = Vec::with_capacity(row.len());
        for t in row {
            r.push(t.d()?);
        }
        dtheta.push(r);
    }
    let tt = form_wedge_mul(&theta, &theta);
    Ok(dtheta
        .iter()
        .zip(&tt)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
        .collect())
}

/// Connection matrix `H̄⁻¹∂H̄`.
pub fn connection(h: &Matrix<Jet>, j: &AcsField) -> Result<FormMatrix<Jet>> {
    let gbar = conj(h);
    let ginv = inverse(&gbar).map_err(|_| Error::Singular("Gram matrix"))?;
    let mut dg = Vec::with_capacity(gbar.len());
    for row in &gbar {
        let mut r = Vec::with_capacity(row.len());
        for g in row {
            r.push(del_scalar(g, j)?);
        }
        dg.push(r);
    }
    Ok(scalar_form_mul(&ginv, &dg))
}

pub fn curvature_trace(f: &FormMatrix<Jet>) -> FormJet {
    form_trace(f)
}

/// `tr(F ∧ F)`.
pub fn curvature_trace_sq(f: &FormMatrix<Jet>) -> FormJet {
    form_trace(&form_wedge_mul(f, f))
}

/// Extremal balanced Euler-Lagrange residual form
/// `2(n−1) i∂∂̄s ∧ ρ − i∂∂̄((2Δs + s²) ω)` for a metric on an n-fold.
pub fn extremal_form(omega: &FormJet, vol: &FormJet, j: &AcsField) -> Result<FormJet> {
    let n = omega.dim() / 2;
    let like = any_coeff(omega)?;
    let rho = chern_ricci(omega, vol, j)?;
    let s = trace(omega, &rho, &like)?;
    let lap = laplacian(omega, &s, j)?;
    let lhs = i_ddbar(&s, j)?
        .wedge(&rho)
        .scale(2.0 * (n as f64 - 1.0));
    let weight = &(&lap * 2.0) + &(&s * &s);
    let rhs = i_ddbar_form(&omega.mul_coeff(&weight), j)?;
    Ok(lhs.sub(&rhs))
}
