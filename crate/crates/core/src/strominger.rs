//! Residuals of the Strominger system for the twistor ansatz: conformal
//! balance, the Hermitian-Yang-Mills condition for the quotient bundle `E′`,
//! the anomaly equation, and the curvature identities relating them.

use crate::acs::{AcsField, AlmostComplexStructure};
use crate::calculus::{dbar_d, del_scalar, delbar_scalar, i_ddbar_form, I};
use crate::chart::{dz, dzbar, ChartPoint};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::form::{FormJet, FormValue};
use crate::hermitian::{chern_curvature, gram, omega_norm_jet};
use crate::hyperkahler::{fiber_images, HyperkahlerModel};
use crate::jet::{Jet, JetSpace, C64};
use crate::linalg::{conj, det, form_trace, form_wedge_mul, inverse, FormMatrix, Matrix};
use crate::residual::Residual;
use crate::twistor::{ansatz_jets, frame_jets, holomorphic_differentials, AnsatzParams, TwistorData, DIM};

/// Gram matrix of the holomorphic frame `{dζ, ζdw1, ζdw2}`.
#[derive(Clone, Debug)]
pub struct HermitianGram {
    pub h: Matrix<C64>,
    pub frame: &'static str,
    /// `A = s²/(2e^{2g})`.
    pub a: f64,
    /// `B = s³/e^{2h+g}`.
    pub b: f64,
}

impl HermitianGram {
    /// `max |H − H†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.h.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.h[i][j] - self.h[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Sylvester's criterion on the leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.h.len()).all(|k| {
            let minor: Matrix<C64> = self.h[..k].iter().map(|r| r[..k].to_vec()).collect();
            det(&minor).re > 0.0
        })
    }
}

#[derive(Clone, Debug)]
pub struct QuotientGram {
    pub u: Matrix<C64>,
}

/// A matrix of 2-forms at a point.
#[derive(Clone, Debug)]
pub struct CurvatureValue {
    pub entries: Matrix<FormValue>,
}

impl CurvatureValue {
    pub fn from_jets(f: &FormMatrix<Jet>) -> Self {
        CurvatureValue {
            entries: f.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect(),
        }
    }

    pub fn trace(&self) -> FormValue {
        form_trace(&self.entries)
    }

    pub fn sup(&self) -> f64 {
        self.entries.iter().flatten().map(|e| e.sup_norm()).fold(0.0, f64::max)
    }

    /// Largest (2,0) or (0,2) coefficient among the entries.
    pub fn type_defect(&self, j: &AlmostComplexStructure) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for e in self.entries.iter().flatten() {
            let parts = j.decompose(e)?;
            for key in [(2, 0), (0, 2)] {
                worst = worst.max(parts.get(&key).map_or(0.0, |f| f.sup_norm()));
            }
        }
        Ok(worst)
    }

    /// `max |F_ab + conj(F_ba)|`; Chern curvature in a frame with Gram `H`
    /// is skew-Hermitian only up to conjugation by `H`, so this is reported
    /// for orthonormal-like frames only.
    pub fn skew_hermitian_defect(&self) -> f64 {
        let n = self.entries.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                worst = worst.max(self.entries[a][b].add(&self.entries[b][a].conj()).sup_norm());
            }
        }
        worst
    }
}

/// Everything needed on the flat twistor chart at one point.
struct TwistorFrames {
    data: TwistorData,
    omega: FormJet,
    /// `ζL_i`.
    l: [Jet; 2],
    u: Matrix<Jet>,
    h: Matrix<Jet>,
    a: Jet,
    b: Jet,
}

impl TwistorFrames {
    fn new(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint, order: usize) -> Result<Self> {
        let data = TwistorData::at(m, p, order)?;
        let f = frame_jets(&data)?;
        let omega = ansatz_jets(&data, params)?;
        let like = data.like().clone();
        let zeta = data.zeta.clone();

        let [dw1, dw2] = holomorphic_differentials(&data);
        let frame = [data.dzeta(), dw1.mul_coeff(&zeta), dw2.mul_coeff(&zeta)];
        let h = gram(&omega, &data.acs, &frame, &like)?;

        let kappa: Matrix<Jet> = data.hess.iter().map(|r| r.to_vec()).collect();
        let k = inverse(&kappa).map_err(|_| Error::Singular("κ"))?;
        let e = f.e();
        let mut u = vec![vec![like.scale(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        u[i][j] = &u[i][j] + &(&(&e[i][a] * &k[a][b]) * &e[j][b].conj());
                    }
                }
            }
        }

        let g = params.g_jet(&data)?;
        let hh = params.h_jet(&data)?;
        let s = &data.sphere.s;
        let s2 = s * s;
        let a = s2.div_jet(&(&g * 2.0).exp())? * 0.5;
        let b = (&s2 * s).div_jet(&(&(&hh * 2.0) + &g).exp())?;
        let l = [&zeta * &f.l[0], &zeta * &f.l[1]];
        Ok(TwistorFrames {
            data,
            omega,
            l,
            u,
            h,
            a,
            b,
        })
    }

    fn acs(&self) -> &AcsField {
        &self.data.acs
    }

    /// `A(1; L)(1, L̄ᵀ) + B diag(0, U)`.
    fn assembled_gram(&self) -> Matrix<Jet> {
        let one = self.a.scale(0.0).add_scalar(1.0);
        let v = [one, self.l[0].clone(), self.l[1].clone()];
        let mut out = Vec::with_capacity(3);
        for i in 0..3 {
            let mut row = Vec::with_capacity(3);
            for j in 0..3 {
                let mut e = &(&self.a * &v[i]) * &v[j].conj();
                if i > 0 && j > 0 {
                    e = &e + &(&self.b * &self.u[i - 1][j - 1]);
                }
                row.push(e);
            }
            out.push(row);
        }
        out
    }

    fn quotient_curvature(&self) -> Result<FormMatrix<Jet>> {
        chern_curvature(&self.u, self.acs())
    }

    fn chern(&self) -> Result<FormMatrix<Jet>> {
        chern_curvature(&self.h, self.acs())
    }

    /// `W = ∂̄Lᵀ Ū⁻¹ ∂L̄`.
    fn w(&self) -> Result<FormJet> {
        let ubar_inv = inverse(&conj(&self.u)).map_err(|_| Error::Singular("U"))?;
        let mut out = FormJet::zero(DIM, 2);
        for i in 0..2 {
            let a = delbar_scalar(&self.l[i], self.acs())?;
            for j in 0..2 {
                let b = del_scalar(&self.l[j].conj(), self.acs())?;
                out = out.add(&a.wedge(&b).mul_coeff(&ubar_inv[i][j]));
            }
        }
        Ok(out)
    }
}

fn matrix_gap(a: &Matrix<Jet>, b: &Matrix<Jet>) -> (f64, f64) {
    let mut gap: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            gap = gap.max((x.value() - y.value()).norm());
            size = size.max(x.value().norm()).max(y.value().norm());
        }
    }
    (gap, size)
}

/// Sup-coefficient of `d(‖Ω‖_ω ω²)`. Works for any model.
pub fn balanced_residual(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<Residual> {
    let d = TwistorData::at(m, p, 1)?;
    let omega = ansatz_jets(&d, params)?;
    let norm = omega_norm_jet(&omega, &d.volume(), d.like())?;
    let w2 = omega.wedge(&omega);
    let total = w2.mul_coeff(&norm).d()?.value();
    // d(Nω²) = dN∧ω² + N dω²
    let dn = crate::calculus::d_scalar(&norm, DIM)?.value();
    let t1 = dn.wedge(&w2.value()).sup_norm();
    let t2 = w2.d()?.value().sup_norm() * norm.value().norm();
    Ok(Residual::of(total.sup_norm(), &[t1, t2]))
}

/// Direct Gram matrix of `{dζ, ζdw1, ζdw2}` and its defect against the
/// closed form `A(1; L)(1, L̄ᵀ) + B diag(0, U)`.
pub fn hermitian_gram(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<(HermitianGram, Residual)> {
    let t = TwistorFrames::new(m, params, p, 0)?;
    let (gap, size) = matrix_gap(&t.h, &t.assembled_gram());
    let gram = HermitianGram {
        h: t.h.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect(),
        frame: "dζ, ζdw₁, ζdw₂",
        a: t.a.re(),
        b: t.b.re(),
    };
    Ok((gram, Residual::new(gap, size)))
}

/// `U = EKĒᵀ` and `F′ = ∂̄(Ū⁻¹∂Ū)`.
pub fn quotient_gram(m: &HyperkahlerModel, p: &ChartPoint, params: &AnsatzParams) -> Result<(QuotientGram, CurvatureValue)> {
    let t = TwistorFrames::new(m, params, p, 2)?;
    let f = t.quotient_curvature()?;
    Ok((
        QuotientGram {
            u: t.u.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect(),
        },
        CurvatureValue::from_jets(&f),
    ))
}

/// Chern curvature `R` of the twistor Gram matrix.
pub fn twistor_chern_curvature(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<CurvatureValue> {
    let t = TwistorFrames::new(m, params, p, 2)?;
    Ok(CurvatureValue::from_jets(&t.chern()?))
}

/// `F∧ω²` plus the (2,0)/(0,2) parts of `F`, for any matrix of 2-forms.
pub fn hym_residual_of(f: &CurvatureValue, omega: &FormValue, j: &AlmostComplexStructure) -> Result<Residual> {
    let w2 = omega.wedge(omega);
    let mut abs: f64 = 0.0;
    for e in f.entries.iter().flatten() {
        abs = abs.max(e.wedge(&w2).sup_norm());
    }
    abs += f.type_defect(j)?;
    Ok(Residual::new(abs, f.sup() * w2.sup_norm()))
}

pub fn hym_residual(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<Residual> {
    let t = TwistorFrames::new(m, params, p, 2)?;
    let f = CurvatureValue::from_jets(&t.quotient_curvature()?);
    hym_residual_of(&f, &t.omega.value(), &t.acs().value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureIdentities {
    /// `tr R` against `∂̄∂log A + 2∂̄∂log B + tr F′`.
    pub c1: Residual,
    /// `tr F′` against zero.
    pub trace: Residual,
    /// `tr(R∧R)` against `2∂∂̄((A/B)W) + 2(∂̄∂log B)² + tr(F′∧F′)`.
    pub c2: Residual,
    /// `W` against `(2i/s)(αω_I + βω_J + γω_K)`.
    pub w: Residual,
}

fn defect(lhs: &FormValue, rhs: &FormValue) -> Residual {
    Residual::of(lhs.sub(rhs).sup_norm(), &[lhs.sup_norm(), rhs.sup_norm()])
}

/// Optional perturbation added to `W` before it enters the identities.
pub fn curvature_identities_with(
    m: &HyperkahlerModel,
    params: &AnsatzParams,
    p: &ChartPoint,
    w_shift: Option<&dyn Fn(&TwistorData) -> FormJet>,
) -> Result<CurvatureIdentities> {
    let t = TwistorFrames::new(m, params, p, 3)?;
    let j = t.acs();
    let r = t.chern()?;
    let fq = t.quotient_curvature()?;
    let tr_f = form_trace(&fq);
    let dd_log_a = dbar_d(&t.a.ln()?, j)?;
    let dd_log_b = dbar_d(&t.b.ln()?, j)?;

    let c1_rhs = dd_log_a.add(&dd_log_b.scale(2.0)).add(&tr_f);
    let c1 = defect(&form_trace(&r).value(), &c1_rhs.value());

    let trace = Residual::of(
        tr_f.value().sup_norm(),
        &[CurvatureValue::from_jets(&fq).sup()],
    );

    let mut w = t.w()?;
    if let Some(shift) = w_shift {
        w = w.add(&shift(&t.data));
    }
    let s_inv = t.data.sphere.s.recip()?;
    let w_expect = t.data.omega_zeta().mul_coeff(&s_inv).scale(C64::new(0.0, 2.0));
    let w_res = defect(&w.value(), &w_expect.value());

    let ab = t.a.div_jet(&t.b)?;
    // ∂∂̄η = −i · (i∂∂̄η)
    let ddbar_aw = i_ddbar_form(&w.mul_coeff(&ab), j)?.scale(-I);
    let c2_rhs = ddbar_aw
        .scale(2.0)
        .add(&dd_log_b.wedge(&dd_log_b).scale(2.0))
        .add(&form_trace(&form_wedge_mul(&fq, &fq)));
    let c2 = defect(&form_trace(&form_wedge_mul(&r, &r)).value(), &c2_rhs.value());
    Ok(CurvatureIdentities {
        c1,
        trace,
        c2,
        w: w_res,
    })
}

pub fn curvature_identities(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<CurvatureIdentities> {
    curvature_identities_with(m, params, p, None)
}

/// Sup-coefficient of `i∂∂̄ω − (α′/4)(tr(R∧R) − tr(F′∧F′))`.
pub fn anomaly_residual(m: &HyperkahlerModel, params: &AnsatzParams, p: &ChartPoint) -> Result<Residual> {
    let t = TwistorFrames::new(m, params, p, 2)?;
    let lhs = i_ddbar_form(&t.omega, t.acs())?.value();
    let r = t.chern()?;
    let fq = t.quotient_curvature()?;
    let k = params.alpha_prime / 4.0;
    let rr = form_trace(&form_wedge_mul(&r, &r)).value().scale(k);
    let ff = form_trace(&form_wedge_mul(&fq, &fq)).value().scale(k);
    let total = lhs.sub(&rr.sub(&ff));
    Ok(Residual::of(
        total.sup_norm(),
        &[lhs.sup_norm(), rr.sup_norm(), ff.sup_norm()],
    ))
}

/// `I`, `J` or `K` acting on the `N` factor of the twistor chart (and as `i`
/// on `dζ`).
fn fiber_quaternion(d: &TwistorData, which: usize) -> Result<AcsField> {
    let like = d.like();
    let one = like.scale(0.0).add_scalar(1.0);
    let zero = like.scale(0.0);
    let mut abc = [zero.clone(), zero.clone(), zero];
    abc[which] = one;
    let mut images = vec![(dz(DIM, 0, like).scale(I), dzbar(DIM, 0, like).scale(-I))];
    images.extend(fiber_images(&d.hess, &abc[0], &abc[1], &abc[2], DIM, 1));
    AcsField::from_complex_images(images, like)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialResidual {
    /// `(∂̄∂h)² − ∂̄∂h ∧ (3∂̄∂log s − ∂̄∂g)` with `∂̄∂h` from the radial expansion.
    pub residual: Residual,
    /// Sup gap between the expansion and `∂̄∂h` computed directly from jets.
    pub expansion_mismatch: f64,
    /// Sup gap in `dρ∧Idρ + 4ρ ω_I = Jdρ∧Kdρ`.
    pub rho_identity: f64,
}

/// Radial reduction for `h = h(ρ)`, `ρ = |u|²`, on the flat model with `g`
/// constant. The profile is evaluated on `[ρ]`.
pub fn radial_h_residual(profile: &ScalarField, p: &ChartPoint) -> Result<RadialResidual> {
    let m = HyperkahlerModel::FlatR4;
    let d = TwistorData::at(&m, p, 2)?;
    let rho = d.x[2..].iter().map(|v| v * v).reduce(|a, b| a + b).expect("fiber coordinates");
    let rho0 = rho.re();
    if rho0 <= 1e-12 {
        return Err(Error::OutsideDomain("radial reduction needs ρ > 0".into()));
    }
    let sp1 = JetSpace::shared(1, 2);
    let prof = profile.eval(&Jet::coordinates(&sp1, &[rho0]))?;
    let h1 = prof.partial_value(&[0])?;
    let h2 = prof.partial_value(&[0, 0])?;

    let drho = crate::calculus::d_scalar(&rho, DIM)?.value();
    let fz = d.acs.value();
    let quats = [0, 1, 2]
        .map(|k| fiber_quaternion(&d, k).map(|a| a.value()));
    let [qi, qj, qk] = quats;
    let (qi, qj, qk) = (qi?, qj?, qk?);
    let sph = [&d.sphere.alpha, &d.sphere.beta, &d.sphere.gamma]
        .map(|c| crate::calculus::d_scalar(c, DIM).map(|f| f.value()));
    let [da, db, dc] = sph;
    let (da, db, dc) = (da?, db?, dc?);
    let omega_zeta = d.omega_zeta().value();

    // 2i∂̄∂h = h'' dρ∧𝔉dρ + h'(dα∧Idρ + dβ∧Jdρ + dγ∧Kdρ) − 4h' ω_ζ
    let two_i_ddh = drho
        .wedge(&fz.apply(&drho)?)
        .scale(h2)
        .add(
            &da.wedge(&qi.apply(&drho)?)
                .add(&db.wedge(&qj.apply(&drho)?))
                .add(&dc.wedge(&qk.apply(&drho)?))
                .scale(h1),
        )
        .sub(&omega_zeta.scale(4.0 * h1));
    let ddh = two_i_ddh.scale(C64::new(0.0, -0.5));

    let direct = dbar_d(&profile.eval(&[rho])?, &d.acs)?.value();
    let expansion_mismatch = ddh.sub(&direct).sup_norm();

    // 3∂̄∂log s = (3i/2) ω_ℂP¹ for constant g
    let base = d.omega_cp1()?.value().scale(C64::new(0.0, 1.5));
    let lhs = ddh.wedge(&ddh);
    let rhs = ddh.wedge(&base);
    let residual = Residual::of(lhs.sub(&rhs).sup_norm(), &[lhs.sup_norm(), rhs.sup_norm()]);

    let wi = d.triple[0].value();
    let id_lhs = drho.wedge(&qi.apply(&drho)?).add(&wi.scale(4.0 * rho0));
    let id_rhs = qj.apply(&drho)?.wedge(&qk.apply(&drho)?);
    Ok(RadialResidual {
        residual,
        expansion_mismatch,
        rho_identity: id_lhs.sub(&id_rhs).sup_norm(),
    })
}
