//! Calabi-type metrics `ω_{u,v,f,g} = e^{u+f}ω + ie^{v+g} ∂R∧∂̄R/R` on the
//! total space of the canonical bundle `K_M`, their Chern-Ricci quantities,
//! and the extremal balanced Euler-Lagrange residual.

use serde::{Deserialize, Serialize};

use crate::acs::AcsField;
use crate::calculus::{del_scalar, delbar_scalar, I};
use crate::chart::{dz, dzbar, ChartId, ChartPoint};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::form::{FormJet, FormValue};
use crate::hermitian::{self, omega_norm_sq, power, HermitianMetricField};
use crate::jet::{Jet, JetSpace, C64};
use crate::linalg::{det, Matrix};
use crate::residual::Residual;

/// Kähler base `(M, ω = i h_{j k̄} dz^j∧dz̄^k)` on one holomorphic chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "base")]
pub enum BaseKahlerModel {
    /// `h_{11̄} = (1+|z|²)⁻²` on `ℂP¹`.
    FubiniStudyCp1,
    /// `h_{j k̄} = δ_{jk}` on a chart of a flat torus of dimension `n`.
    FlatTorusChart { n: usize },
}

impl BaseKahlerModel {
    pub fn name(&self) -> &'static str {
        match self {
            BaseKahlerModel::FubiniStudyCp1 => "fubini_study_cp1",
            BaseKahlerModel::FlatTorusChart { .. } => "flat_torus_chart",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            BaseKahlerModel::FubiniStudyCp1 => 1,
            BaseKahlerModel::FlatTorusChart { n } => n,
        }
    }

    /// `h_{j k̄}` at base coordinate jets `[Re z¹, Im z¹, …]`.
    pub fn coefficients(&self, z: &[Jet]) -> Result<Matrix<Jet>> {
        let n = self.n();
        if z.len() != 2 * n || n == 0 {
            return Err(Error::ChartMismatch(format!("{} base coordinates for n = {n}", z.len())));
        }
        let zero = z[0].scale(0.0);
        Ok(match self {
            BaseKahlerModel::FubiniStudyCp1 => {
                let s = (&(&z[0] * &z[0]) + &(&z[1] * &z[1])).add_scalar(1.0);
                vec![vec![(&s * &s).recip()?]]
            }
            BaseKahlerModel::FlatTorusChart { .. } => (0..n)
                .map(|j| (0..n).map(|k| if j == k { zero.add_scalar(1.0) } else { zero.clone() }).collect())
                .collect(),
        })
    }
}

/// `i h_{j k̄} dz^j∧dz̄^k` on a chart of real dimension `dim` whose first `n`
/// complex pairs are the base coordinates.
fn kahler_form(h: &Matrix<Jet>, dim: usize, like: &Jet) -> FormJet {
    let mut out = FormJet::zero(dim, 2);
    for (j, row) in h.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            out = out.add(&dz(dim, j, like).wedge(&dzbar(dim, k, like)).mul_coeff(c));
        }
    }
    out.scale(I)
}

fn holomorphic_volume(dim: usize, like: &Jet) -> FormJet {
    let mut out = FormJet::scalar(dim, like.scale(0.0).add_scalar(1.0));
    for k in 0..dim / 2 {
        out = out.wedge(&dz(dim, k, like));
    }
    out
}

/// The base metric itself as a metric field on `ChartId::Base{n}`.
#[derive(Clone, Copy, Debug)]
pub struct BaseMetric(pub BaseKahlerModel);

impl HermitianMetricField for BaseMetric {
    fn chart(&self) -> ChartId {
        ChartId::Base { n: self.0.n() }
    }
    fn metric(&self, x: &[Jet]) -> Result<FormJet> {
        Ok(kahler_form(&self.0.coefficients(x)?, x.len(), &x[0]))
    }
    fn structure(&self, x: &[Jet]) -> Result<AcsField> {
        Ok(AcsField::standard(x.len(), &x[0]))
    }
    fn volume(&self, x: &[Jet]) -> Result<FormJet> {
        Ok(holomorphic_volume(x.len(), &x[0]))
    }
}

/// `u, v` live on `M` (evaluated on the base coordinates), `f, g` are
/// profiles of `R` (evaluated on `[R]`).
#[derive(Clone, Debug)]
pub struct CalabiParams {
    pub u: ScalarField,
    pub v: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    pub c: f64,
}

impl CalabiParams {
    /// `u = v = f = g = 0`, giving `ω₀`.
    pub fn zero() -> Self {
        let z = ScalarField::constant(0.0);
        CalabiParams {
            u: z.clone(),
            v: z.clone(),
            f: z.clone(),
            g: z,
            c: 0.0,
        }
    }

    /// The constant-length branch `v = −nu`, `g = −nf + c`.
    pub fn constant_length(u: ScalarField, f: ScalarField, c: f64, n: usize) -> Self {
        let k = -(n as f64);
        CalabiParams {
            v: u.times(k),
            g: f.times(k).plus(&ScalarField::constant(c)),
            u,
            f,
            c,
        }
    }
}

/// A Calabi-type metric on `ChartId::CanonicalBundle{n}` with coordinates
/// `(z¹, …, zⁿ, t)`.
#[derive(Clone, Debug)]
pub struct CalabiMetric {
    pub base: BaseKahlerModel,
    pub params: CalabiParams,
}

struct CalabiParts {
    /// `e^{u+f} ω`.
    horizontal: FormJet,
    /// `i e^{v+g} ∂R∧∂̄R/R`.
    vertical: FormJet,
}

impl CalabiMetric {
    pub fn new(base: BaseKahlerModel, params: CalabiParams) -> Self {
        CalabiMetric { base, params }
    }

    fn dim(&self) -> usize {
        2 * self.base.n() + 2
    }

    /// `R = |t|²/det h`.
    pub fn fiber_norm(&self, x: &[Jet]) -> Result<Jet> {
        let n = self.base.n();
        let h = det(&self.base.coefficients(&x[..2 * n])?);
        let t2 = &(&x[2 * n] * &x[2 * n]) + &(&x[2 * n + 1] * &x[2 * n + 1]);
        if t2.re() <= 0.0 {
            return Err(Error::OutsideDomain("the zero section t = 0 is excluded".into()));
        }
        t2.div_jet(&h)
    }

    fn parts(&self, x: &[Jet]) -> Result<CalabiParts> {
        let dim = self.dim();
        if x.len() != dim {
            return Err(Error::ChartMismatch(format!("{} coordinates on K_M with n = {}", x.len(), self.base.n())));
        }
        let n = self.base.n();
        let like = &x[0];
        let z = &x[..2 * n];
        let j = AcsField::standard(dim, like);
        let r = self.fiber_norm(x)?;
        let omega = kahler_form(&self.base.coefficients(z)?, dim, like);
        let p = &self.params;
        let wf = (&p.u.eval(z)? + &p.f.eval(std::slice::from_ref(&r))?).exp();
        let wg = (&p.v.eval(z)? + &p.g.eval(std::slice::from_ref(&r))?).exp();
        // ∂R∧∂̄R/R = h⁻¹(dt − t∂log h)∧(dt̄ − t̄∂̄log h), which avoids dividing
        // jets by the small R near the zero section
        let h = det(&self.base.coefficients(z)?);
        let log_h = h.ln()?;
        let t = &x[2 * n] + &x[2 * n + 1].scale(I);
        let a = dz(dim, n, like).sub(&del_scalar(&log_h, &j)?.mul_coeff(&t));
        let b = dzbar(dim, n, like).sub(&delbar_scalar(&log_h, &j)?.mul_coeff(&t.conj()));
        Ok(CalabiParts {
            horizontal: omega.mul_coeff(&wf),
            vertical: a.wedge(&b).mul_coeff(&wg.div_jet(&h)?).scale(I),
        })
    }
}

impl HermitianMetricField for CalabiMetric {
    fn chart(&self) -> ChartId {
        ChartId::CanonicalBundle { n: self.base.n() }
    }
    fn metric(&self, x: &[Jet]) -> Result<FormJet> {
        let p = self.parts(x)?;
        Ok(p.horizontal.add(&p.vertical))
    }
    fn structure(&self, x: &[Jet]) -> Result<AcsField> {
        Ok(AcsField::standard(x.len(), &x[0]))
    }
    fn volume(&self, x: &[Jet]) -> Result<FormJet> {
        Ok(holomorphic_volume(x.len(), &x[0]))
    }
    /// `∂R` costs one order.
    fn extra_order(&self) -> usize {
        1
    }
}

/// Coordinate jets good for `order` derivatives of the metric.
fn jets_for(field: &dyn HermitianMetricField, p: &ChartPoint, order: usize) -> Vec<Jet> {
    p.jets(order + field.extra_order())
}

fn check_chart(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<()> {
    if p.chart != field.chart() {
        return Err(Error::ChartMismatch(format!("metric lives on {}, point on {}", field.chart(), p.chart)));
    }
    Ok(())
}

pub fn calabi_metric(base: BaseKahlerModel, params: &CalabiParams, p: &ChartPoint) -> Result<FormValue> {
    let m = CalabiMetric::new(base, params.clone());
    check_chart(&m, p)?;
    Ok(m.metric(&jets_for(&m, p, 0))?.value())
}

/// Sup-coefficient of `dω`.
pub fn kahler_residual(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<f64> {
    check_chart(field, p)?;
    Ok(field.metric(&jets_for(field, p, 1))?.d()?.value().sup_norm())
}

/// Chern scalar curvature `Λρ` of any metric field.
pub fn chern_scalar(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<f64> {
    check_chart(field, p)?;
    let x = jets_for(field, p, 2);
    let s = hermitian::chern_scalar(&field.metric(&x)?, &field.volume(&x)?, &field.structure(&x)?)?;
    Ok(s.re())
}

/// Chern-Ricci form `ρ` at a point.
pub fn chern_ricci(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<FormValue> {
    check_chart(field, p)?;
    let x = jets_for(field, p, 2);
    Ok(hermitian::chern_ricci(&field.metric(&x)?, &field.volume(&x)?, &field.structure(&x)?)?.value())
}

/// `‖Ω‖` of a metric field.
pub fn omega_norm(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<f64> {
    check_chart(field, p)?;
    let x = jets_for(field, p, 0);
    let sq = omega_norm_sq(&field.metric(&x)?, &field.volume(&x)?, &x[0])?;
    let v = sq.value();
    if !(v.re > 0.0) {
        return Err(Error::DegenerateMetric(format!("‖Ω‖² = {v}")));
    }
    Ok(v.re.sqrt())
}

/// Population variance of `‖Ω‖` across a sample.
pub fn constant_norm_residual(base: BaseKahlerModel, params: &CalabiParams, sample: &[ChartPoint]) -> Result<f64> {
    let m = CalabiMetric::new(base, params.clone());
    let norms = sample.iter().map(|p| omega_norm(&m, p)).collect::<Result<Vec<_>>>()?;
    if norms.is_empty() {
        return Ok(0.0);
    }
    let k = norms.len() as f64;
    let mean = norms.iter().sum::<f64>() / k;
    Ok(norms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k)
}

/// `e^{(n+1)f} = (n+1) s e^c R + C₀`, the balanced profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileF {
    pub s: f64,
    pub c: f64,
    pub c0: f64,
    pub n: usize,
}

impl ProfileF {
    pub fn eval(&self, r: &Jet) -> Result<Jet> {
        let k = (self.n + 1) as f64;
        let arg = (r * (k * self.s * self.c.exp())).add_scalar(self.c0);
        if !(arg.re() > 0.0) {
            return Err(Error::DomainViolation(format!(
                "profile argument {} is not positive",
                arg.re()
            )));
        }
        Ok(arg.ln()? * (1.0 / k))
    }

    pub fn field(&self) -> ScalarField {
        let me = *self;
        ScalarField::new(
            format!("log({}*{}*exp({})*R+{})/{}", self.n + 1, self.s, self.c, self.c0, self.n + 1),
            move |x: &[Jet]| me.eval(&x[0]),
        )
    }

    /// `|e^{(n+1)f−c} f′ − s|` at `R`.
    pub fn ode_residual(&self, r: f64) -> Result<f64> {
        let sp = JetSpace::shared(1, 1);
        let f = self.eval(&Jet::variable(&sp, 0, r))?;
        let k = (self.n + 1) as f64;
        let lhs = (f.value().re * k - self.c).exp() * f.partial_value(&[0])?.re;
        Ok((lhs - self.s).abs())
    }
}

/// Positivity of the logarithm's argument is checked where the profile is
/// evaluated.
pub fn solve_profile_f(s_const: f64, c: f64, c0: f64, n: usize) -> Result<ProfileF> {
    if n == 0 {
        return Err(Error::Config("base dimension must be positive".into()));
    }
    if ![s_const, c, c0].iter().all(|v| v.is_finite()) {
        return Err(Error::Config("profile constants must be finite".into()));
    }
    Ok(ProfileF { s: s_const, c, c0, n })
}

/// Sup-coefficient of `d(ωⁿ)` on the `(n+1)`-fold `K_M`.
pub fn km_balanced_residual(base: BaseKahlerModel, params: &CalabiParams, p: &ChartPoint) -> Result<Residual> {
    let m = CalabiMetric::new(base, params.clone());
    check_chart(&m, p)?;
    let x = jets_for(&m, p, 1);
    let parts = m.parts(&x)?;
    let n = base.n();
    let like = &x[0];
    // ωⁿ = Pⁿ + nPⁿ⁻¹Q since Q∧Q = 0
    let pn = power(&parts.horizontal, n, like);
    let mixed = power(&parts.horizontal, n - 1, like)
        .wedge(&parts.vertical)
        .scale(n as f64);
    let a = pn.d()?.value();
    let b = mixed.d()?.value();
    Ok(Residual::of(a.add(&b).sup_norm(), &[a.sup_norm(), b.sup_norm()]))
}

/// Sup-coefficient of `2(n−1)i∂∂̄s∧ρ − i∂∂̄((2Δs + s²)ω)`; needs order-6 jets.
pub fn extremal_residual(field: &dyn HermitianMetricField, p: &ChartPoint) -> Result<Residual> {
    check_chart(field, p)?;
    let x = jets_for(field, p, 6);
    let omega = field.metric(&x)?;
    let vol = field.volume(&x)?;
    let j = field.structure(&x)?;
    let r = hermitian::extremal_form(&omega, &vol, &j)?.value();
    let scale = omega.value().sup_norm();
    Ok(Residual::new(r.sup_norm(), scale))
}

/// The metric of the theorem on `K_{ℂP¹}`: FS base, `u = 0`, constant length,
/// `f` from the balanced profile with `C₀ = c0`.
pub fn theorem_metric_kcp1(c: f64, c0: f64) -> Result<(CalabiMetric, ProfileF)> {
    let base = BaseKahlerModel::FubiniStudyCp1;
    let s = 2.0; // Λρ for h = (1+|z|²)⁻²
    let prof = solve_profile_f(s, c, c0, base.n())?;
    let params = CalabiParams::constant_length(ScalarField::constant(0.0), prof.field(), c, base.n());
    Ok((CalabiMetric::new(base, params), prof))
}

pub fn kcp1_point(z: C64, t: C64) -> Result<ChartPoint> {
    ChartPoint::new(ChartId::CanonicalBundle { n: 1 }, vec![z.re, z.im, t.re, t.im])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_point(z: C64) -> ChartPoint {
        ChartPoint::new(ChartId::Base { n: 1 }, vec![z.re, z.im]).unwrap()
    }

    #[test]
    fn fubini_study_scalar_curvature() {
        let b = BaseMetric(BaseKahlerModel::FubiniStudyCp1);
        for z in [C64::new(0.3, -0.2), C64::new(1.5, 0.7), C64::new(-2.0, 0.1)] {
            let s = chern_scalar(&b, &base_point(z)).unwrap();
            assert!((s - 2.0).abs() < 1e-12, "{s}");
            let rho = chern_ricci(&b, &base_point(z)).unwrap();
            let w = b.metric(&base_point(z).jets(0)).unwrap().value();
            assert!(rho.approx_eq(&w.scale(2.0), 1e-12));
        }
        let flat = BaseMetric(BaseKahlerModel::FlatTorusChart { n: 1 });
        assert!(chern_scalar(&flat, &base_point(C64::new(0.2, 0.4))).unwrap().abs() < 1e-14);
    }

    #[test]
    fn profile_closed_form() {
        let p = solve_profile_f(2.0, 0.0, 1.0, 1).unwrap();
        let sp = JetSpace::shared(1, 0);
        for r in [0.1, 1.0, 7.5] {
            let f = p.eval(&Jet::constant(&sp, r)).unwrap().re();
            assert!((f - 0.5 * (1.0 + 4.0 * r).ln()).abs() < 1e-14);
            assert!(p.ode_residual(r).unwrap() < 1e-12);
        }
        let flat = solve_profile_f(0.0, 0.3, 2.0, 2).unwrap();
        assert!(flat.ode_residual(3.0).unwrap() < 1e-14);
    }

    #[test]
    fn omega_zero_kahler_iff_ricci_flat_base() {
        let p = kcp1_point(C64::new(0.4, -0.3), C64::new(0.8, 0.5)).unwrap();
        let fs = CalabiMetric::new(BaseKahlerModel::FubiniStudyCp1, CalabiParams::zero());
        let flat = CalabiMetric::new(BaseKahlerModel::FlatTorusChart { n: 1 }, CalabiParams::zero());
        assert!(kahler_residual(&flat, &p).unwrap() < 1e-12);
        assert!(kahler_residual(&fs, &p).unwrap() > 1e-3);
    }

    #[test]
    fn theorem_metric_certificate() {
        let (m, _) = theorem_metric_kcp1(0.0, 1.0).unwrap();
        let pts: Vec<_> = [(0.4, -0.3, 0.8, 0.5), (1.2, 0.7, -0.3, 0.9), (-0.5, 0.2, 1.4, -0.6)]
            .iter()
            .map(|&(a, b, c, d)| kcp1_point(C64::new(a, b), C64::new(c, d)).unwrap())
            .collect();
        assert!(constant_norm_residual(m.base, &m.params, &pts).unwrap() < 1e-20);
        for p in &pts {
            assert!(km_balanced_residual(m.base, &m.params, p).unwrap().abs < 1e-12);
            assert!(chern_scalar(&m, p).unwrap().abs() < 1e-10);
        }
        let wrong = CalabiParams::constant_length(
            ScalarField::constant(0.0),
            ScalarField::new("R", |x: &[Jet]| Ok(x[0].clone())),
            0.0,
            1,
        );
        assert!(km_balanced_residual(m.base, &wrong, &pts[0]).unwrap().abs > 1e-3);
    }

    #[test]
    fn theorem_metric_is_extremal() {
        let (m, _) = theorem_metric_kcp1(0.2, 0.5).unwrap();
        let p = kcp1_point(C64::new(0.4, -0.3), C64::new(0.8, 0.5)).unwrap();
        assert!(chern_ricci(&m, &p).unwrap().sup_norm() < 1e-10);
        let r = extremal_residual(&m, &p).unwrap();
        assert!(r.abs < 1e-8, "{r:?}");
    }
}
