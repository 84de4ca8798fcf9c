mod common;

use common::*;
use rand::Rng;
use strominger_core::calabi::*;
use strominger_core::chart::{ChartId, ChartPoint};
use strominger_core::expr::{compile_str, Role};
use strominger_core::fields::ScalarField;
use strominger_core::form::FormJet;
use strominger_core::hermitian::HermitianMetricField;
use strominger_core::hyperkahler::HyperkahlerModel;
use strominger_core::jet::{Jet, C64};
use strominger_core::twistor::{AnsatzParams, TwistorMetric};

const FS: BaseKahlerModel = BaseKahlerModel::FubiniStudyCp1;

fn base_point(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> ChartPoint {
    let coords = (0..2 * n).map(|_| r.gen_range(-2.0..2.0)).collect();
    ChartPoint::new(ChartId::Base { n }, coords).unwrap()
}

/// `λω` for a fixed metric field.
struct Scaled<M>(M, f64);

impl<M: HermitianMetricField> HermitianMetricField for Scaled<M> {
    fn chart(&self) -> ChartId {
        self.0.chart()
    }
    fn metric(&self, x: &[Jet]) -> strominger_core::Result<FormJet> {
        Ok(self.0.metric(x)?.scale(self.1))
    }
    fn structure(&self, x: &[Jet]) -> strominger_core::Result<strominger_core::acs::AcsField> {
        self.0.structure(x)
    }
    fn volume(&self, x: &[Jet]) -> strominger_core::Result<FormJet> {
        self.0.volume(x)
    }
    fn extra_order(&self) -> usize {
        self.0.extra_order()
    }
}

#[test]
fn fubini_study_scalar_curvature_is_constant() {
    let mut r = rng(41);
    let b = BaseMetric(FS);
    let s: Vec<f64> = (0..200).map(|_| chern_scalar(&b, &base_point(&mut r, 1)).unwrap()).collect();
    let (lo, hi) = s.iter().fold((f64::MAX, f64::MIN), |(a, c), &x| (a.min(x), c.max(x)));
    assert!(hi - lo <= 1e-9, "spread {}", hi - lo);
    assert!((s[0] - 2.0).abs() <= 1e-10, "value {}", s[0]);
    let flat = BaseMetric(BaseKahlerModel::FlatTorusChart { n: 2 });
    assert!(chern_scalar(&flat, &base_point(&mut r, 2)).unwrap().abs() <= 1e-14);
}

#[test]
fn scaling_the_metric_divides_the_scalar_curvature() {
    let mut r = rng(42);
    for lambda in [0.5, 3.0] {
        let p = base_point(&mut r, 1);
        let s = chern_scalar(&BaseMetric(FS), &p).unwrap();
        let sl = chern_scalar(&Scaled(BaseMetric(FS), lambda), &p).unwrap();
        assert!((sl - s / lambda).abs() <= 1e-10);
        let q = kcp1(&mut r);
        let m = CalabiMetric::new(FS, CalabiParams::zero());
        let s = chern_scalar(&m, &q).unwrap();
        let sl = chern_scalar(&Scaled(m, lambda), &q).unwrap();
        assert!((sl - s / lambda).abs() <= 1e-9 * s.abs().max(1.0));
    }
}

#[test]
fn zero_params_reduce_to_omega_zero() {
    let mut r = rng(43);
    for _ in 0..20 {
        let p = kcp1(&mut r);
        let w = calabi_metric(FS, &CalabiParams::zero(), &p).unwrap();
        // ω + i∂R∧∂̄R/R by direct differentiation of R = |t|²(1+|z|²)²
        let x = p.jets(1);
        let one = x[0].scale(0.0).add_scalar(1.0);
        let s = (&(&x[0] * &x[0]) + &(&x[1] * &x[1])).add_scalar(1.0);
        let rr = &(&(&x[2] * &x[2]) + &(&x[3] * &x[3])) * &(&s * &s);
        let j = strominger_core::acs::AcsField::standard(4, &x[0]);
        let dr = strominger_core::calculus::del_scalar(&rr, &j).unwrap();
        let dbr = strominger_core::calculus::delbar_scalar(&rr, &j).unwrap();
        let base = strominger_core::chart::dz(4, 0, &one)
            .wedge(&strominger_core::chart::dzbar(4, 0, &one))
            .mul_coeff(&(&s * &s).recip().unwrap());
        let expect = base
            .add(&dr.wedge(&dbr).mul_coeff(&rr.recip().unwrap()))
            .scale(strominger_core::calculus::I)
            .value();
        assert!(w.approx_eq(&expect, 1e-10 * expect.sup_norm()));
    }
    let zero = kcp1_point(C64::new(0.3, 0.1), C64::new(0.0, 0.0)).unwrap();
    assert!(calabi_metric(FS, &CalabiParams::zero(), &zero).is_err());
}

#[test]
fn constant_length_branch() {
    let mut r = rng(44);
    let pts: Vec<_> = (0..100).map(|_| kcp1(&mut r)).collect();
    let u = compile_str("0.3*zr - 0.2*zi^2", Role::Base).unwrap();
    let f = compile_str("log(1 + R)", Role::Profile).unwrap();
    let branch = CalabiParams::constant_length(u.clone(), f.clone(), 0.4, 1);
    assert!(constant_norm_residual(FS, &branch, &pts).unwrap() <= 1e-9);
    let mut off = branch.clone();
    off.g = f.times(-1.0).plus(&compile_str("0.1*R", Role::Profile).unwrap());
    assert!(constant_norm_residual(FS, &off, &pts).unwrap() >= 1e-3);
    let trivial = CalabiParams::constant_length(ScalarField::constant(0.0), ScalarField::constant(0.0), 0.0, 1);
    assert!(constant_norm_residual(FS, &trivial, &pts).unwrap() <= 1e-10);
}

#[test]
fn omega_zero_is_kahler_exactly_on_the_flat_base() {
    let mut r = rng(45);
    let fs = CalabiMetric::new(FS, CalabiParams::zero());
    let flat = CalabiMetric::new(BaseKahlerModel::FlatTorusChart { n: 1 }, CalabiParams::zero());
    for _ in 0..30 {
        let p = kcp1(&mut r);
        assert!(kahler_residual(&flat, &p).unwrap() <= 1e-9);
        assert!(kahler_residual(&fs, &p).unwrap() >= 1e-3);
    }
}

#[test]
fn balanced_profile_on_both_bases() {
    let mut r = rng(46);
    let (m, _) = theorem_metric_kcp1(0.0, 1.0).unwrap();
    let flat = BaseKahlerModel::FlatTorusChart { n: 2 };
    let prof = solve_profile_f(0.0, 0.0, 1.0, 2).unwrap();
    let flat_params = CalabiParams::constant_length(ScalarField::constant(0.0), prof.field(), 0.0, 2);
    let wrong = CalabiParams::constant_length(ScalarField::constant(0.0), compile_str("R", Role::Profile).unwrap(), 0.0, 1);
    for _ in 0..30 {
        let p = kcp1(&mut r);
        assert!(km_balanced_residual(FS, &m.params, &p).unwrap().passes(1e-8, 1e-8));
        // the defect scales with R, so stay away from the zero section
        if p.coords[2].hypot(p.coords[3]) >= 0.5 {
            assert!(km_balanced_residual(FS, &wrong, &p).unwrap().abs >= 1e-3);
        }
        let q = ChartPoint::new(
            ChartId::CanonicalBundle { n: 2 },
            vec![r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), 0.7, -0.4],
        )
        .unwrap();
        assert!(km_balanced_residual(flat, &flat_params, &q).unwrap().abs <= 1e-10);
    }
}

#[test]
fn profile_satisfies_its_ode() {
    let mut r = rng(47);
    for (s, c, c0, n) in [(2.0, 0.0, 1.0, 1), (2.0, 0.5, 0.3, 1), (1.5, -0.2, 2.0, 3), (0.0, 0.1, 1.0, 2)] {
        let p = solve_profile_f(s, c, c0, n).unwrap();
        for _ in 0..200 {
            let rr = r.gen_range(1e-6..10.0);
            assert!(p.ode_residual(rr).unwrap() <= 1e-12);
        }
    }
    let flat = solve_profile_f(0.0, 0.0, 3.0, 1).unwrap().field();
    let sp = strominger_core::jet::JetSpace::shared(1, 1);
    let f = flat.eval(&[Jet::variable(&sp, 0, 4.2)]).unwrap();
    assert!(f.partial_value(&[0]).unwrap().norm() == 0.0);
    let neg = solve_profile_f(-1.0, 0.0, 1.0, 1).unwrap();
    assert!(neg.eval(&Jet::constant(&strominger_core::jet::JetSpace::shared(1, 0), 5.0)).is_err());
    assert!(solve_profile_f(1.0, f64::NAN, 1.0, 1).is_err());
}

#[test]
fn theorem_metric_is_chern_ricci_flat_balanced_and_extremal() {
    let mut r = rng(48);
    let (m, _) = theorem_metric_kcp1(0.0, 1.0).unwrap();
    let pts: Vec<_> = (0..40).map(|_| kcp1(&mut r)).collect();
    assert!(constant_norm_residual(m.base, &m.params, &pts).unwrap() <= 1e-9);
    for p in &pts[..10] {
        assert!(chern_scalar(&m, p).unwrap().abs() <= 1e-8);
        assert!(chern_ricci(&m, p).unwrap().sup_norm() <= 1e-8);
    }
    for p in &pts[..2] {
        let e = extremal_residual(&m, p).unwrap();
        assert!(e.abs <= 1e-8, "{e:?}");
    }
}

#[test]
fn twistor_ansatz_with_curved_scalar_is_not_extremal() {
    let params = AnsatzParams::new(
        compile_str("0.3*zr^2 - 0.2*zi", Role::G).unwrap(),
        compile_str("0.2*x1*x2 + 0.1*x3^2", Role::H).unwrap(),
        2.0,
    );
    let m = TwistorMetric { model: HyperkahlerModel::FlatR4, params };
    let p = ChartPoint::twistor(c(0.4, -0.3), [0.5, 0.2, -0.3, 0.6]).unwrap();
    let e = extremal_residual(&m, &p).unwrap();
    assert!(e.abs >= 1e-4, "{e:?}");
}
