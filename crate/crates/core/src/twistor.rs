//! The twistor chart `(ζ, z1, z2)` of `Y = ℂ × N`, its complex structure
//! `𝔉 = j ⊕ (αI + βJ + γK)`, the holomorphic volume form, the ansatz metric
//! and the (1,0)-coframe `{dζ, θ1, θ2}`.

use crate::acs::{AcsField, AlmostComplexStructure};
use crate::calculus::{delbar_scalar, I};
use crate::chart::{dz, dzbar, ChartId, ChartPoint};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::form::{Coeff, FormJet, FormValue};
use crate::hermitian::{omega_norm_jet, HermitianMetricField};
use crate::hyperkahler::{fiber_images, fiber_vars, triple_jets, wirtinger, Hessian, HyperkahlerModel, KahlerPotential};
use crate::jet::{Jet, C64};

pub const DIM: usize = 6;

/// Point on the unit sphere corresponding to `ζ ∈ ℂ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereCoords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SphereCoords {
    pub fn norm_sq(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta + self.gamma * self.gamma
    }
}

pub fn sphere_map(zeta: C64) -> SphereCoords {
    let s = 1.0 + zeta.norm_sqr();
    SphereCoords {
        alpha: (1.0 - zeta.norm_sqr()) / s,
        beta: 2.0 * zeta.re / s,
        gamma: 2.0 * zeta.im / s,
    }
}

/// `s = 1 + |ζ|²` and `(α, β, γ)` as jets.
#[derive(Clone, Debug)]
pub struct SphereJets {
    pub s: Jet,
    pub alpha: Jet,
    pub beta: Jet,
    pub gamma: Jet,
}

pub fn sphere_jets(zr: &Jet, zi: &Jet) -> Result<SphereJets> {
    let r2 = &(zr * zr) + &(zi * zi);
    let s = r2.add_scalar(1.0);
    let inv = s.recip()?;
    Ok(SphereJets {
        alpha: &(-&r2).add_scalar(1.0) * &inv,
        beta: &(zr * 2.0) * &inv,
        gamma: &(zi * 2.0) * &inv,
        s,
    })
}

/// All model data on the twistor chart at one point, as jets.
#[derive(Clone, Debug)]
pub struct TwistorData {
    pub model: HyperkahlerModel,
    pub x: Vec<Jet>,
    pub zeta: Jet,
    pub sphere: SphereJets,
    pub hess: Hessian,
    /// `(ω_I, ω_J, ω_K)` pulled back to the twistor chart.
    pub triple: [FormJet; 3],
    pub acs: AcsField,
}

impl TwistorData {
    pub fn new(model: &HyperkahlerModel, x: Vec<Jet>) -> Result<Self> {
        if x.len() != DIM {
            return Err(Error::ChartMismatch(format!("{} twistor coordinates", x.len())));
        }
        let zeta = &x[0] + &x[1] * I;
        let sphere = sphere_jets(&x[0], &x[1])?;
        let hess = model.hessian(&x[2..], fiber_vars(2))?;
        let triple = triple_jets(&hess, DIM, 1);
        let like = &x[0];
        let mut images = vec![(
            dz(DIM, 0, like).scale(I),
            dzbar(DIM, 0, like).scale(-I),
        )];
        images.extend(fiber_images(&hess, &sphere.alpha, &sphere.beta, &sphere.gamma, DIM, 1));
        let acs = AcsField::from_complex_images(images, like)?;
        Ok(TwistorData {
            model: *model,
            x,
            zeta,
            sphere,
            hess,
            triple,
            acs,
        })
    }

    pub fn at(model: &HyperkahlerModel, p: &ChartPoint, order: usize) -> Result<Self> {
        if p.chart != ChartId::Twistor {
            return Err(Error::ChartMismatch(format!("expected a twistor point, got {}", p.chart)));
        }
        model.check_domain(&p.coords[2..])?;
        TwistorData::new(model, p.jets(order))
    }

    pub fn like(&self) -> &Jet {
        &self.x[0]
    }

    pub fn dzeta(&self) -> FormJet {
        dz(DIM, 0, self.like())
    }

    /// `ω_ζ = αω_I + βω_J + γω_K`.
    pub fn omega_zeta(&self) -> FormJet {
        let [wi, wj, wk] = &self.triple;
        wi.mul_coeff(&self.sphere.alpha)
            .add(&wj.mul_coeff(&self.sphere.beta))
            .add(&wk.mul_coeff(&self.sphere.gamma))
    }

    /// `dζ ∧ dζ̄`.
    pub fn dzeta_dzetabar(&self) -> FormJet {
        let l = self.like();
        dz(DIM, 0, l).wedge(&dzbar(DIM, 0, l))
    }

    /// Round metric `2i/s² dζ∧dζ̄`.
    pub fn omega_cp1(&self) -> Result<FormJet> {
        let inv2 = (&self.sphere.s * &self.sphere.s).recip()?;
        Ok(self.dzeta_dzetabar().mul_coeff(&inv2).scale(C64::new(0.0, 2.0)))
    }

    /// `vol_N = ω_I²/2`.
    pub fn vol_n(&self) -> FormJet {
        self.triple[0].wedge(&self.triple[0]).scale(0.5)
    }

    /// `Ω = (−2ζω_I + (1−ζ²)ω_J + i(1+ζ²)ω_K) ∧ dζ`.
    pub fn volume(&self) -> FormJet {
        let z2 = &self.zeta * &self.zeta;
        let [wi, wj, wk] = &self.triple;
        let a = wi.mul_coeff(&(&self.zeta * -2.0));
        let b = wj.mul_coeff(&(-&z2).add_scalar(1.0));
        let c = wk.mul_coeff(&(z2.add_scalar(1.0) * I));
        a.add(&b).add(&c).wedge(&self.dzeta())
    }
}

pub fn twistor_acs(m: &HyperkahlerModel, p: &ChartPoint) -> Result<AlmostComplexStructure> {
    Ok(TwistorData::at(m, p, 0)?.acs.value())
}

pub fn holomorphic_volume(m: &HyperkahlerModel, p: &ChartPoint) -> Result<FormValue> {
    Ok(TwistorData::at(m, p, 0)?.volume().value())
}

/// Parameters of the ansatz metric.
#[derive(Clone, Debug)]
pub struct AnsatzParams {
    /// Function of ζ, evaluated on `[Re ζ, Im ζ]`.
    pub g: ScalarField,
    /// Function on `N`, evaluated on `[x1, x2, x3, x4]`.
    pub h: ScalarField,
    pub alpha_prime: f64,
    /// When false the `s⁻²` factor in front of `ω_ζ` is dropped (a deliberate
    /// counterexample).
    pub fiber_scaling: bool,
}

impl AnsatzParams {
    pub fn new(g: ScalarField, h: ScalarField, alpha_prime: f64) -> Self {
        AnsatzParams {
            g,
            h,
            alpha_prime,
            fiber_scaling: true,
        }
    }

    pub fn trivial(alpha_prime: f64) -> Self {
        AnsatzParams::new(ScalarField::constant(0.0), ScalarField::constant(0.0), alpha_prime)
    }

    pub fn without_fiber_scaling(mut self) -> Self {
        self.fiber_scaling = false;
        self
    }

    pub fn g_jet(&self, d: &TwistorData) -> Result<Jet> {
        self.g.eval(&d.x[..2])
    }

    pub fn h_jet(&self, d: &TwistorData) -> Result<Jet> {
        self.h.eval(&d.x[2..])
    }
}

/// `ω = e^{2h+g}/s² ω_ζ + e^{2g} ω_ℂP¹`.
pub fn ansatz_jets(d: &TwistorData, params: &AnsatzParams) -> Result<FormJet> {
    let g = params.g_jet(d)?;
    let h = params.h_jet(d)?;
    let inv2 = (&d.sphere.s * &d.sphere.s).recip()?;
    let mut fiber = (&(&h * 2.0) + &g).exp();
    if params.fiber_scaling {
        fiber = &fiber * &inv2;
    }
    let base = (&g * 2.0).exp();
    Ok(d.omega_zeta().mul_coeff(&fiber).add(&d.omega_cp1()?.mul_coeff(&base)))
}

pub fn ansatz_metric(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<FormValue> {
    let d = TwistorData::at(m, p, 0)?;
    Ok(ansatz_jets(&d, params)?.value())
}

/// `ω² = 2e^{4h+2g}/s⁴ vol_N + 2e^{2h+3g}/s² ω_ζ ∧ ω_ℂP¹`.
pub fn ansatz_square_closed_form(d: &TwistorData, params: &AnsatzParams) -> Result<FormJet> {
    let g = params.g_jet(d)?;
    let h = params.h_jet(d)?;
    let s2 = &d.sphere.s * &d.sphere.s;
    let a = (&(&h * 4.0) + &(&g * 2.0)).exp().div_jet(&(&s2 * &s2))? * 2.0;
    let b = (&(&h * 2.0) + &(&g * 3.0)).exp().div_jet(&s2)? * 2.0;
    Ok(d.vol_n()
        .mul_coeff(&a)
        .add(&d.omega_zeta().wedge(&d.omega_cp1()?).mul_coeff(&b)))
}

/// `‖Ω‖_ω` at a point.
pub fn omega_norm(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<f64> {
    let d = TwistorData::at(m, p, 0)?;
    let w = ansatz_jets(&d, params)?;
    Ok(omega_norm_jet(&w, &d.volume(), d.like())?.re())
}

/// The ansatz as a metric field on the twistor chart.
#[derive(Clone, Debug)]
pub struct TwistorMetric {
    pub model: HyperkahlerModel,
    pub params: AnsatzParams,
}

impl HermitianMetricField for TwistorMetric {
    fn chart(&self) -> ChartId {
        ChartId::Twistor
    }
    fn metric(&self, x: &[Jet]) -> Result<FormJet> {
        ansatz_jets(&TwistorData::new(&self.model, x.to_vec())?, &self.params)
    }
    fn structure(&self, x: &[Jet]) -> Result<AcsField> {
        Ok(TwistorData::new(&self.model, x.to_vec())?.acs)
    }
    fn volume(&self, x: &[Jet]) -> Result<FormJet> {
        Ok(TwistorData::new(&self.model, x.to_vec())?.volume())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartDirection {
    /// `(ζ, w1, w2) ↦ (ζ, u1, u2)`.
    ToTwistor,
    /// `(ζ, u1, u2) ↦ (ζ, w1, w2)`.
    ToC3,
}

/// The biholomorphism `ℂ³ ≅ Y` for `N = ℝ⁴`.
pub fn c3_chart_map(direction: ChartDirection, p: &ChartPoint) -> Result<ChartPoint> {
    let zeta = C64::new(p.coords[0], p.coords[1]);
    let a = p.complex(1);
    let b = p.complex(2);
    let (chart_in, chart_out, x, y) = match direction {
        ChartDirection::ToTwistor => {
            let s = 1.0 + zeta.norm_sqr();
            (
                ChartId::C3,
                ChartId::Twistor,
                (a - I * zeta * b.conj()) / s,
                (b + I * zeta * a.conj()) / s,
            )
        }
        ChartDirection::ToC3 => (
            ChartId::Twistor,
            ChartId::C3,
            a + I * zeta * b.conj(),
            b - I * zeta * a.conj(),
        ),
    };
    if p.chart != chart_in {
        return Err(Error::ChartMismatch(format!(
            "chart map expects a {chart_in} point, got {}",
            p.chart
        )));
    }
    ChartPoint::new(chart_out, vec![zeta.re, zeta.im, x.re, x.im, y.re, y.im])
}

/// `(w1, w2)` as jets on the twistor chart of the flat model.
pub fn holomorphic_coordinates(d: &TwistorData) -> [Jet; 2] {
    let u1 = &d.x[2] + &d.x[3] * I;
    let u2 = &d.x[4] + &d.x[5] * I;
    let iz = &d.zeta * I;
    [&u1 + &(&iz * &u2.conj()), &u2 - &(&iz * &u1.conj())]
}

/// `dw1 = du1 + iū2 dζ + iζ dū2`, `dw2 = du2 − iū1 dζ − iζ dū1`, with
/// coefficients at the full order of the data.
pub fn holomorphic_differentials(d: &TwistorData) -> [FormJet; 2] {
    let l = d.like();
    let u1b = (&d.x[2] + &d.x[3] * I).conj();
    let u2b = (&d.x[4] + &d.x[5] * I).conj();
    let iz = &d.zeta * I;
    let dw1 = dz(DIM, 1, l)
        .add(&d.dzeta().mul_coeff(&(&u2b * I)))
        .add(&dzbar(DIM, 2, l).mul_coeff(&iz));
    let dw2 = dz(DIM, 2, l)
        .sub(&d.dzeta().mul_coeff(&(&u1b * I)))
        .sub(&dzbar(DIM, 1, l).mul_coeff(&iz));
    [dw1, dw2]
}

fn check_zeta(d: &TwistorData) -> Result<()> {
    if d.zeta.value().norm() < 1e-12 {
        return Err(Error::OutsideDomain("the θ coframe needs ζ ≠ 0".into()));
    }
    Ok(())
}

/// `θ1 = 2iκ_{12̄}/ζ dz1 + 2iκ_{22̄}/ζ dz2 + dz̄1`,
/// `θ2 = 2iκ_{11̄}/ζ dz1 + 2iκ_{21̄}/ζ dz2 − dz̄2`.
pub fn theta_jets(d: &TwistorData) -> Result<[FormJet; 2]> {
    check_zeta(d)?;
    let l = d.like();
    let c = d.zeta.recip()? * C64::new(0.0, 2.0);
    let k = &d.hess;
    let (dz1, dz2) = (dz(DIM, 1, l), dz(DIM, 2, l));
    let t1 = dz1
        .mul_coeff(&(&c * &k[0][1]))
        .add(&dz2.mul_coeff(&(&c * &k[1][1])))
        .add(&dzbar(DIM, 1, l));
    let t2 = dz1
        .mul_coeff(&(&c * &k[0][0]))
        .add(&dz2.mul_coeff(&(&c * &k[1][0])))
        .sub(&dzbar(DIM, 2, l));
    Ok([t1, t2])
}

pub fn theta_coframe(m: &HyperkahlerModel, p: &ChartPoint) -> Result<(FormValue, FormValue)> {
    let d = TwistorData::at(m, p, 0)?;
    let [a, b] = theta_jets(&d)?;
    Ok((a.value(), b.value()))
}

/// Coefficients `(dz_k, dz̄_k)` of a 1-form for each complex pair.
pub fn complex_components<C: Coeff>(eta: &crate::form::Form<C>, like: &C) -> Result<Vec<(C, C)>> {
    let a = eta.one_form_coeffs(&like.zero_like())?;
    let h = C64::new(0.5, 0.0);
    Ok((0..a.len() / 2)
        .map(|k| {
            let im = a[2 * k + 1].scale_c(I);
            (a[2 * k].sub_c(&im).scale_c(h), a[2 * k].add_c(&im).scale_c(h))
        })
        .collect())
}

/// `dw_i = L_i dζ + C_i θ1 − D_i θ2` for the global holomorphic coframe of
/// the flat model.
#[derive(Clone, Debug)]
pub struct FrameJets {
    pub l: [Jet; 2],
    pub c: [Jet; 2],
    pub d: [Jet; 2],
    /// Sup-residual of the reconstruction.
    pub reconstruction: f64,
}

impl FrameJets {
    /// `E` with rows `(C_i, D_i)`.
    pub fn e(&self) -> [[Jet; 2]; 2] {
        [
            [self.c[0].clone(), self.d[0].clone()],
            [self.c[1].clone(), self.d[1].clone()],
        ]
    }
}

fn require_flat(d: &TwistorData) -> Result<()> {
    if !d.model.is_flat() {
        return Err(Error::ChartMismatch(
            "global holomorphic coordinates are only available for flat ℝ⁴".into(),
        ));
    }
    Ok(())
}

pub fn frame_jets(d: &TwistorData) -> Result<FrameJets> {
    require_flat(d)?;
    let [t1, t2] = theta_jets(d)?;
    let dw = holomorphic_differentials(d);
    let like = d.like();
    let mut l = Vec::new();
    let mut c = Vec::new();
    let mut dd = Vec::new();
    let mut recon: f64 = 0.0;
    for w in &dw {
        let comp = complex_components(w, like)?;
        let (li, ci, di) = (comp[0].0.clone(), comp[1].1.clone(), comp[2].1.clone());
        let rebuilt = d
            .dzeta()
            .mul_coeff(&li)
            .add(&t1.mul_coeff(&ci))
            .sub(&t2.mul_coeff(&di));
        recon = recon.max(w.sub(&rebuilt).value().sup_norm());
        l.push(li);
        c.push(ci);
        dd.push(di);
    }
    let pair = |v: Vec<Jet>| -> [Jet; 2] { v.try_into().expect("two entries") };
    Ok(FrameJets {
        l: pair(l),
        c: pair(c),
        d: pair(dd),
        reconstruction: recon,
    })
}

/// Frame decomposition at a point, with `L`, `E` as values.
#[derive(Clone, Debug)]
pub struct FrameDecomposition {
    pub l: [C64; 2],
    pub e: [[C64; 2]; 2],
    pub reconstruction: f64,
    /// Residual of the `∂̄C`, `∂̄D` system.
    pub simp_residual: f64,
    /// Residual of `2ζ∂̄L = −C((1−α)θ1 − 2dz̄1) + D((1−α)θ2 + 2dz̄2)`.
    pub l_residual: f64,
}

/// `κ_{i j̄ k̄}` from the Hessian jets.
fn kappa_third(d: &TwistorData, i: usize, j: usize, k: usize) -> Result<Jet> {
    let v = fiber_vars(2);
    wirtinger(&d.hess[i][j], v[2 * k], v[2 * k + 1], true)
}

pub fn frame_decompose(m: &HyperkahlerModel, p: &ChartPoint) -> Result<FrameDecomposition> {
    let d = TwistorData::at(m, p, 1)?;
    let f = frame_jets(&d)?;
    let [t1, t2] = theta_jets(&d)?;
    let (tb1, tb2) = (t1.conj(), t2.conj());
    let like = d.like();
    let bg = &d.sphere.beta - &(&d.sphere.gamma * I); // β − iγ
    let pref = &bg * I;
    let k3 = |i, j, k| kappa_third(&d, i, j, k);
    // Σ_(a, b) pattern  X θ̄1 − Y θ̄2
    let comb = |x: Jet, y: Jet| tb1.mul_coeff(&x).sub(&tb2.mul_coeff(&y));
    let one_m_alpha = (-&d.sphere.alpha).add_scalar(1.0);
    let dzb1 = dzbar(DIM, 1, like);
    let dzb2 = dzbar(DIM, 2, like);
    let mut simp: f64 = 0.0;
    let mut lres: f64 = 0.0;
    for i in 0..2 {
        let (c, dd) = (&f.c[i], &f.d[i]);
        let rhs_c = comb(k3(0, 0, 1)?, k3(1, 0, 1)?)
            .mul_coeff(c)
            .sub(&comb(k3(0, 0, 0)?, k3(1, 0, 0)?).mul_coeff(dd))
            .mul_coeff(&pref);
        let rhs_d = comb(k3(0, 1, 1)?, k3(1, 1, 1)?)
            .mul_coeff(c)
            .sub(&comb(k3(0, 0, 1)?, k3(1, 0, 1)?).mul_coeff(dd))
            .mul_coeff(&pref);
        let lhs_c = delbar_scalar(c, &d.acs)?;
        let lhs_d = delbar_scalar(dd, &d.acs)?;
        simp = simp
            .max(lhs_c.sub(&rhs_c).value().sup_norm())
            .max(lhs_d.sub(&rhs_d).value().sup_norm());

        let lhs_l = delbar_scalar(&f.l[i], &d.acs)?.mul_coeff(&(&d.zeta * 2.0));
        let rhs_l = t1
            .mul_coeff(&one_m_alpha)
            .sub(&dzb1.scale(2.0))
            .mul_coeff(c)
            .neg()
            .add(&t2.mul_coeff(&one_m_alpha).add(&dzb2.scale(2.0)).mul_coeff(dd));
        lres = lres.max(lhs_l.sub(&rhs_l).value().sup_norm());
    }
    let v = |j: &Jet| j.value();
    Ok(FrameDecomposition {
        l: [v(&f.l[0]), v(&f.l[1])],
        e: [[v(&f.c[0]), v(&f.d[0])], [v(&f.c[1]), v(&f.d[1])]],
        reconstruction: f.reconstruction,
        simp_residual: simp,
        l_residual: lres,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(z: C64, x: [f64; 4]) -> ChartPoint {
        ChartPoint::twistor(z, x).unwrap()
    }

    #[test]
    fn sphere_map_special_values() {
        let s = sphere_map(C64::new(0.0, 0.0));
        assert_eq!((s.alpha, s.beta, s.gamma), (1.0, 0.0, 0.0));
        let s = sphere_map(C64::new(1.0, 0.0));
        assert!((s.alpha).abs() < 1e-16 && (s.beta - 1.0).abs() < 1e-16 && s.gamma == 0.0);
        let s = sphere_map(C64::new(0.0, 1.0));
        assert!((s.alpha).abs() < 1e-16 && s.beta == 0.0 && (s.gamma - 1.0).abs() < 1e-16);
    }

    #[test]
    fn structure_at_the_origin_fiber() {
        let m = HyperkahlerModel::FlatR4;
        let p = pt(C64::new(0.0, 0.0), [0.3, 0.1, -0.4, 0.2]);
        let j = twistor_acs(&m, &p).unwrap();
        let one = C64::new(1.0, 0.0);
        assert!(j.apply(&dz(6, 0, &one)).unwrap().approx_eq(&dz(6, 0, &one).scale(I), 1e-15));
        // restricted to N it is I
        for k in 1..3 {
            let img = j.apply(&dz(6, k, &one)).unwrap();
            assert!(img.approx_eq(&dz(6, k, &one).scale(I), 1e-15));
        }
    }

    #[test]
    fn structure_at_zeta_one() {
        // (α, β, γ) = (0, 1, 0): 𝔉 du1 = J du1 = −dū2
        let m = HyperkahlerModel::FlatR4;
        let p = pt(C64::new(1.0, 0.0), [0.3, 0.1, -0.4, 0.2]);
        let j = twistor_acs(&m, &p).unwrap();
        let one = C64::new(1.0, 0.0);
        let img = j.apply(&dz(6, 1, &one)).unwrap();
        assert!(img.approx_eq(&dzbar(6, 2, &one).neg(), 1e-15), "{img}");
    }

    #[test]
    fn trivial_ansatz_at_origin() {
        let m = HyperkahlerModel::FlatR4;
        let p = pt(C64::new(0.0, 0.0), [0.3, 0.1, -0.4, 0.2]);
        let w = ansatz_metric(&m, &AnsatzParams::trivial(2.0), &p).unwrap();
        let one = C64::new(1.0, 0.0);
        let wi = dz(6, 1, &one)
            .wedge(&dzbar(6, 1, &one))
            .add(&dz(6, 2, &one).wedge(&dzbar(6, 2, &one)))
            .scale(C64::new(0.0, 0.5));
        let expect = wi.add(&dz(6, 0, &one).wedge(&dzbar(6, 0, &one)).scale(C64::new(0.0, 2.0)));
        assert!(w.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn chart_map_special_values() {
        let p = pt(C64::new(0.0, 0.0), [0.3, 0.1, -0.4, 0.2]);
        let q = c3_chart_map(ChartDirection::ToC3, &p).unwrap();
        assert_eq!(q.coords[2..], p.coords[2..]);
        assert!(c3_chart_map(ChartDirection::ToTwistor, &p).is_err());
    }

    #[test]
    fn flat_theta_and_frame() {
        let m = HyperkahlerModel::FlatR4;
        let z = C64::new(0.6, -0.3);
        let p = pt(z, [0.3, 0.1, -0.4, 0.2]);
        let (t1, _) = theta_coframe(&m, &p).unwrap();
        let one = C64::new(1.0, 0.0);
        let expect = dz(6, 2, &one).scale(I / z).add(&dzbar(6, 1, &one));
        assert!(t1.approx_eq(&expect, 1e-15));
        let f = frame_decompose(&m, &p).unwrap();
        let u1 = p.complex(1);
        let u2 = p.complex(2);
        assert!((f.e[0][0]).norm() < 1e-15 && (f.e[0][1] - I * z).norm() < 1e-15);
        assert!((f.e[1][0] + I * z).norm() < 1e-15 && f.e[1][1].norm() < 1e-15);
        assert!((f.l[0] - I * u2.conj()).norm() < 1e-15 && (f.l[1] + I * u1.conj()).norm() < 1e-15);
        assert!(f.reconstruction < 1e-14);
        assert!(f.simp_residual < 1e-12 && f.l_residual < 1e-12, "{f:?}");
    }

    #[test]
    fn theta_needs_nonzero_zeta() {
        let m = HyperkahlerModel::FlatR4;
        let p = pt(C64::new(0.0, 0.0), [0.3, 0.1, -0.4, 0.2]);
        assert!(matches!(theta_coframe(&m, &p), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn gram_list_on_eguchi_hanson() {
        use crate::hermitian::gram;
        use crate::linalg::inverse;
        let m = HyperkahlerModel::EguchiHanson { a: 0.8 };
        let z = C64::new(0.4, 0.7);
        let p = pt(z, [0.5, -0.2, 0.3, 0.6]);
        let params = AnsatzParams::new(ScalarField::constant(0.3), ScalarField::constant(-0.2), 2.0);
        let d = TwistorData::at(&m, &p, 0).unwrap();
        let w = ansatz_jets(&d, &params).unwrap().value();
        let j = d.acs.value();
        let [t1, t2] = theta_jets(&d).unwrap();
        let one = C64::new(1.0, 0.0);
        let h = gram(&w, &j, &[dz(6, 0, &one), t1.value(), t2.value()], &one).unwrap();
        let s = 1.0 + z.norm_sqr();
        let (g, hh) = (0.3f64, -0.2f64);
        assert!((h[0][0] - s * s / (2.0 * (2.0 * g).exp())).norm() < 1e-12);
        assert!(h[0][1].norm() < 1e-12 && h[0][2].norm() < 1e-12);
        let kappa: Vec<Vec<C64>> = d.hess.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
        let k = inverse(&kappa).unwrap();
        let c = s.powi(3) / (z.norm_sqr() * (2.0 * hh + g).exp());
        assert!((h[1][1] - c * k[0][0]).norm() < 1e-12, "{:?} {:?}", h, k);
        assert!((h[2][2] - c * k[1][1]).norm() < 1e-12);
        assert!((h[1][2] + c * k[0][1]).norm() < 1e-12, "{} {} {}", h[1][2], c * k[0][1], c * k[1][0]);
    }
}
