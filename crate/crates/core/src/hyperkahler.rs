//! Hyperkähler 4-manifolds given by a Kähler potential on an I-holomorphic
//! chart `(z1, z2)` normalized so that `ω_J + iω_K = dz1 ∧ dz2`.

use serde::{Deserialize, Serialize};

use crate::acs::{AcsField, AlmostComplexStructure};
use crate::calculus::I;
use crate::chart::{dz, dzbar, ChartId, ChartPoint};
use crate::error::{Error, Result};
use crate::form::{Coeff, FormJet, FormValue};
use crate::hermitian::{chern_curvature, gram};
use crate::jet::{Jet, C64};
use crate::linalg::{form_matrix_sup, FormMatrix, Matrix};

/// `κ_{i j̄}` as jets.
pub type Hessian = [[Jet; 2]; 2];

/// Real-variable indices `[Re z1, Im z1, Re z2, Im z2]` inside the jet space.
pub type FiberVars = [usize; 4];

pub fn fiber_vars(offset: usize) -> FiberVars {
    [offset, offset + 1, offset + 2, offset + 3]
}

/// `∂f/∂z` (or `∂f/∂z̄` when `bar`) for the complex coordinate with real
/// parts at variables `re`, `im`.
pub fn wirtinger(f: &Jet, re: usize, im: usize, bar: bool) -> Result<Jet> {
    let fx = f.partial(re)?;
    let fy = f.partial(im)?;
    let s = if bar { 1.0 } else { -1.0 };
    Ok((&fx + &fy * C64::new(0.0, s)) * 0.5)
}

pub trait KahlerPotential: Send + Sync {
    /// `κ` from the four real fiber coordinates.
    fn potential(&self, x: &[Jet]) -> Result<Jet>;

    /// Hessian `κ_{i j̄}`; the default differentiates the potential.
    fn hessian(&self, x: &[Jet], vars: FiberVars) -> Result<Hessian> {
        hessian_ad(self, x, vars)
    }
}

/// `κ_{i j̄}` by differentiating the potential jet (loses two orders).
pub fn hessian_ad<P: KahlerPotential + ?Sized>(p: &P, x: &[Jet], vars: FiberVars) -> Result<Hessian> {
    let k = p.potential(x)?;
    let mut out: Vec<Vec<Jet>> = Vec::with_capacity(2);
    for i in 0..2 {
        let ki = wirtinger(&k, vars[2 * i], vars[2 * i + 1], false)?;
        let mut row = Vec::with_capacity(2);
        for j in 0..2 {
            row.push(wirtinger(&ki, vars[2 * j], vars[2 * j + 1], true)?);
        }
        out.push(row);
    }
    let [r0, r1]: [Vec<Jet>; 2] = out.try_into().expect("two rows");
    Ok([r0.try_into().expect("2"), r1.try_into().expect("2")])
}

/// `κ_{11̄}κ_{22̄} − κ_{12̄}κ_{21̄}`.
pub fn hessian_det(h: &Hessian) -> Jet {
    &(&h[0][0] * &h[1][1]) - &(&h[0][1] * &h[1][0])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum HyperkahlerModel {
    FlatR4,
    /// Eguchi-Hanson with scale `a` on the double cover `ℂ² ∖ {0}`.
    EguchiHanson { a: f64 },
}

impl HyperkahlerModel {
    pub fn name(&self) -> &'static str {
        match self {
            HyperkahlerModel::FlatR4 => "flat_r4",
            HyperkahlerModel::EguchiHanson { .. } => "eguchi_hanson",
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, HyperkahlerModel::FlatR4)
    }

    /// Rejects points outside the model's chart.
    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        match *self {
            HyperkahlerModel::FlatR4 => Ok(()),
            HyperkahlerModel::EguchiHanson { a } => {
                if !(a > 0.0) {
                    return Err(Error::OutsideDomain(format!("Eguchi-Hanson scale {a}")));
                }
                let t: f64 = x.iter().map(|v| v * v).sum();
                if t <= 1e-12 {
                    return Err(Error::OutsideDomain(
                        "Eguchi-Hanson chart excludes the origin".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn check_jets(&self, x: &[Jet]) -> Result<()> {
        let v: Vec<f64> = x.iter().map(|j| j.re()).collect();
        self.check_domain(&v)
    }

    /// `t = |z1|² + |z2|²`.
    fn radius_sq(x: &[Jet]) -> Jet {
        x.iter().map(|v| v * v).reduce(|a, b| a + b).expect("four coordinates")
    }
}

impl KahlerPotential for HyperkahlerModel {
    fn potential(&self, x: &[Jet]) -> Result<Jet> {
        self.check_jets(x)?;
        let t = HyperkahlerModel::radius_sq(x);
        match *self {
            HyperkahlerModel::FlatR4 => Ok(t * 0.5),
            HyperkahlerModel::EguchiHanson { a } => {
                // f(t) = ½[S + a² log t − a² log(a² + S)], S = √(t² + a⁴)
                let a2 = a * a;
                let s = (&t * &t).add_scalar(a2 * a2).sqrt()?;
                let lt = t.ln()?;
                let la = s.add_scalar(a2).ln()?;
                Ok((&s + &(&lt - &la) * a2) * 0.5)
            }
        }
    }

    fn hessian(&self, x: &[Jet], _vars: FiberVars) -> Result<Hessian> {
        self.check_jets(x)?;
        let z = [&x[0] + &x[1] * I, &x[2] + &x[3] * I];
        let t = HyperkahlerModel::radius_sq(x);
        // κ_{i j̄} = f'(t) δ_ij + f''(t) z̄_i z_j
        let (f1, f2) = match *self {
            HyperkahlerModel::FlatR4 => (Jet::constant(t.space(), 0.5).truncate(t.order()), t.scale(0.0)),
            HyperkahlerModel::EguchiHanson { a } => {
                let a4 = a.powi(4);
                let s = (&t * &t).add_scalar(a4).sqrt()?;
                let f1 = s.div_jet(&(&t * 2.0))?;
                let f2 = (&(&s * &t) * &t).recip()? * (-0.5 * a4);
                (f1, f2)
            }
        };
        let entry = |i: usize, j: usize| {
            let mut e = &(&z[i].conj() * &z[j]) * &f2;
            if i == j {
                e = &e + &f1;
            }
            e
        };
        Ok([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }
}

/// Jets of `κ` at a fiber point (all mixed Wirtinger partials queryable).
pub struct KappaJet {
    jet: Jet,
}

impl KappaJet {
    /// Mixed partial `∂^{|a|+|b|}κ / ∂z_{a…} ∂z̄_{b…}` at the point.
    pub fn partial(&self, holo: &[usize], anti: &[usize]) -> Result<C64> {
        let mut j = self.jet.clone();
        for &i in holo {
            j = wirtinger(&j, 2 * i, 2 * i + 1, false)?;
        }
        for &i in anti {
            j = wirtinger(&j, 2 * i, 2 * i + 1, true)?;
        }
        Ok(j.value())
    }

    pub fn value(&self) -> C64 {
        self.jet.value()
    }
}

pub fn kappa_jet(m: &HyperkahlerModel, p: &ChartPoint, order: usize) -> Result<KappaJet> {
    fiber_point(p)?;
    Ok(KappaJet {
        jet: m.potential(&p.jets(order))?,
    })
}

fn fiber_point(p: &ChartPoint) -> Result<()> {
    if p.chart != ChartId::Fiber {
        return Err(Error::ChartMismatch(format!(
            "hyperkähler model evaluated on the {} chart",
            p.chart
        )));
    }
    Ok(())
}

/// `(ω_I, ω_J, ω_K)` at a point.
#[derive(Clone, Debug)]
pub struct HyperkahlerTriple {
    pub omega_i: FormValue,
    pub omega_j: FormValue,
    pub omega_k: FormValue,
}

/// Triple of jet-valued 2-forms; z1, z2 sit at complex pairs
/// `pair`, `pair + 1` of a chart of real dimension `dim`.
pub fn triple_jets(hess: &Hessian, dim: usize, pair: usize) -> [FormJet; 3] {
    let like = &hess[0][0];
    let dzs = [dz(dim, pair, like), dz(dim, pair + 1, like)];
    let dzbs = [dzbar(dim, pair, like), dzbar(dim, pair + 1, like)];
    let mut wi = FormJet::zero(dim, 2);
    for i in 0..2 {
        for j in 0..2 {
            wi = wi.add(&dzs[i].wedge(&dzbs[j]).mul_coeff(&hess[i][j]));
        }
    }
    let wi = wi.scale(I);
    let hol = dzs[0].wedge(&dzs[1]);
    let wj = hol.add(&hol.conj()).scale(0.5);
    let wk = hol.sub(&hol.conj()).scale(C64::new(0.0, -0.5));
    [wi, wj, wk]
}

pub fn hk_triple(m: &HyperkahlerModel, p: &ChartPoint) -> Result<HyperkahlerTriple> {
    fiber_point(p)?;
    let x = p.jets(0);
    let h = m.hessian(&x, fiber_vars(0))?;
    let [a, b, c] = triple_jets(&h, 4, 0);
    Ok(HyperkahlerTriple {
        omega_i: a.value(),
        omega_j: b.value(),
        omega_k: c.value(),
    })
}

/// Images of `dz_k, dz̄_k` (k = 1, 2) under `aI + bJ + cK`.
pub fn fiber_images(
    hess: &Hessian,
    a: &Jet,
    b: &Jet,
    c: &Jet,
    dim: usize,
    pair: usize,
) -> Vec<(FormJet, FormJet)> {
    let like = &hess[0][0];
    let dz1 = dz(dim, pair, like);
    let dz2 = dz(dim, pair + 1, like);
    let dzb1 = dzbar(dim, pair, like);
    let dzb2 = dzbar(dim, pair + 1, like);
    let k = hess;
    let plus = (b + &(c * I)) * 2.0; // 2(b + ic)
    let minus = (b - &(c * I)) * 2.0; // 2(b − ic)
    let ia = a * I;
    let comb = |x: &Jet, f: &FormJet, y: &Jet, g: &FormJet| f.mul_coeff(x).add(&g.mul_coeff(y));

    let img_dz1 = dz1
        .mul_coeff(&ia)
        .sub(&comb(&k[1][0], &dzb1, &k[1][1], &dzb2).mul_coeff(&plus));
    let img_dz2 = dz2
        .mul_coeff(&ia)
        .add(&comb(&k[0][0], &dzb1, &k[0][1], &dzb2).mul_coeff(&plus));
    let img_dzb1 = dzb1
        .mul_coeff(&-&ia)
        .sub(&comb(&k[0][1], &dz1, &k[1][1], &dz2).mul_coeff(&minus));
    let img_dzb2 = dzb2
        .mul_coeff(&-&ia)
        .add(&comb(&k[0][0], &dz1, &k[1][0], &dz2).mul_coeff(&minus));
    vec![(img_dz1, img_dzb1), (img_dz2, img_dzb2)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quaternion {
    I,
    J,
    K,
}

/// `I`, `J` or `K` as a jet-valued structure on the fiber chart.
pub fn quaternion_structure(hess: &Hessian, which: Quaternion) -> Result<AcsField> {
    let like = &hess[0][0];
    let one = like.one_like();
    let zero = like.scale(0.0);
    let (a, b, c) = match which {
        Quaternion::I => (one, zero.clone(), zero),
        Quaternion::J => (zero.clone(), one, zero),
        Quaternion::K => (zero.clone(), zero, one),
    };
    AcsField::from_complex_images(fiber_images(hess, &a, &b, &c, 4, 0), like)
}

pub fn quaternion_action(
    m: &HyperkahlerModel,
    p: &ChartPoint,
    eta: &FormValue,
    which: Quaternion,
) -> Result<FormValue> {
    fiber_point(p)?;
    let x = p.jets(0);
    let s = quaternion_structure(&m.hessian(&x, fiber_vars(0))?, which)?;
    s.value().apply(eta)
}

pub fn quaternion_acs(m: &HyperkahlerModel, p: &ChartPoint, which: Quaternion) -> Result<AlmostComplexStructure> {
    fiber_point(p)?;
    let x = p.jets(0);
    Ok(quaternion_structure(&m.hessian(&x, fiber_vars(0))?, which)?.value())
}

/// Largest `|det κ_{i j̄} − 1/4|` over a sample, with the Hessian obtained by
/// differentiating the potential itself.
pub fn validate_hyperkahler<P: KahlerPotential + ?Sized>(m: &P, sample: &[ChartPoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample {
        fiber_point(p)?;
        let h = hessian_ad(m, &p.jets(2), fiber_vars(0))?;
        worst = worst.max((hessian_det(&h).value() - 0.25).norm());
    }
    Ok(worst)
}

/// Anti-self-duality residual of a curvature matrix against a triple.
pub fn asd_residual_of(f: &FormMatrix<Jet>, triple: &[FormJet; 3], j: &AlmostComplexStructure) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for entry in f.iter().flatten() {
        let v = entry.value();
        for w in triple {
            worst = worst.max(v.wedge(&w.value()).sup_norm());
        }
        let parts = j.decompose(&v)?;
        worst = worst.max(parts[&(2, 0)].sup_norm()).max(parts[&(0, 2)].sup_norm());
    }
    Ok(worst)
}

/// Chern curvature of `T*N` in the frame `{dz1, dz2}` for the metric `ω_I`.
pub fn cotangent_curvature(hess: &Hessian) -> Result<(FormMatrix<Jet>, [FormJet; 3], AcsField)> {
    let like = &hess[0][0];
    let triple = triple_jets(hess, 4, 0);
    let j = AcsField::standard(4, like);
    let frame = [dz(4, 0, like), dz(4, 1, like)];
    let h: Matrix<Jet> = gram(&triple[0], &j, &frame, like)?;
    Ok((chern_curvature(&h, &j)?, triple, j))
}

pub fn asd_residual(m: &HyperkahlerModel, p: &ChartPoint) -> Result<f64> {
    fiber_point(p)?;
    let x = p.jets(2);
    let hess = m.hessian(&x, fiber_vars(0))?;
    let (f, triple, j) = cotangent_curvature(&hess)?;
    asd_residual_of(&f, &triple, &j.value())
}

/// Largest curvature coefficient (used to show the Eguchi-Hanson check is not
/// vacuous).
pub fn curvature_size(m: &HyperkahlerModel, p: &ChartPoint) -> Result<f64> {
    fiber_point(p)?;
    let hess = m.hessian(&p.jets(2), fiber_vars(0))?;
    Ok(form_matrix_sup(&cotangent_curvature(&hess)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: [f64; 4]) -> ChartPoint {
        ChartPoint::new(ChartId::Fiber, x.to_vec()).unwrap()
    }

    #[test]
    fn flat_hessian_values() {
        let k = kappa_jet(&HyperkahlerModel::FlatR4, &pt([0.3, -0.2, 0.5, 0.1]), 3).unwrap();
        assert!((k.partial(&[0], &[0]).unwrap() - 0.5).norm() < 1e-15);
        assert!((k.partial(&[1], &[1]).unwrap() - 0.5).norm() < 1e-15);
        assert!(k.partial(&[0], &[1]).unwrap().norm() < 1e-15);
        assert!(k.partial(&[0, 1], &[0]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn flat_triple() {
        let t = hk_triple(&HyperkahlerModel::FlatR4, &pt([0.3, -0.2, 0.5, 0.1])).unwrap();
        let one = C64::new(1.0, 0.0);
        let expect = dz(4, 0, &one)
            .wedge(&dzbar(4, 0, &one))
            .add(&dz(4, 1, &one).wedge(&dzbar(4, 1, &one)))
            .scale(C64::new(0.0, 0.5));
        assert!(t.omega_i.approx_eq(&expect, 1e-15));
        assert!(t.omega_j.wedge(&t.omega_k).sup_norm() < 1e-15);
        assert!(t.omega_i.wedge(&t.omega_j).sup_norm() < 1e-15);
    }

    #[test]
    fn flat_quaternion_table() {
        let m = HyperkahlerModel::FlatR4;
        let p = pt([0.3, -0.2, 0.5, 0.1]);
        let one = C64::new(1.0, 0.0);
        let jdz1 = quaternion_action(&m, &p, &dz(4, 0, &one), Quaternion::J).unwrap();
        assert!(jdz1.approx_eq(&dzbar(4, 1, &one).neg(), 1e-15));
        let kdz2 = quaternion_action(&m, &p, &dz(4, 1, &one), Quaternion::K).unwrap();
        assert!(kdz2.approx_eq(&dzbar(4, 0, &one).scale(I), 1e-15));
        let idz1 = quaternion_action(&m, &p, &dz(4, 0, &one), Quaternion::I).unwrap();
        assert!(idz1.approx_eq(&dz(4, 0, &one).scale(I), 1e-15));
    }

    #[test]
    fn eguchi_hanson_rejects_origin() {
        let m = HyperkahlerModel::EguchiHanson { a: 1.0 };
        assert!(matches!(
            kappa_jet(&m, &pt([0.0; 4]), 2),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn eguchi_hanson_analytic_hessian_matches_potential() {
        let m = HyperkahlerModel::EguchiHanson { a: 1.3 };
        let p = pt([0.7, -0.4, 0.2, 0.9]);
        let x = p.jets(4);
        let an = m.hessian(&x, fiber_vars(0)).unwrap();
        let ad = hessian_ad(&m, &x, fiber_vars(0)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let diff = &an[i][j].truncate(2) - &ad[i][j];
                assert!(diff.max_abs() < 1e-11, "{i}{j}: {}", diff.max_abs());
            }
        }
    }
}
