//! Sparse exterior algebra over the real coordinate differentials of a chart.
//!
//! A basis element `dx^{i1} ∧ … ∧ dx^{ik}` with `i1 < … < ik` is stored as a
//! bitmask. Coefficients are generic so the same code handles pointwise
//! values ([`FormValue`]) and jet-valued forms ([`FormJet`]) that can still
//! be differentiated.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::{Jet, C64};

/// Coefficient ring for forms.
pub trait Coeff: Clone + Send + Sync + fmt::Debug {
    fn add_c(&self, other: &Self) -> Self;
    fn sub_c(&self, other: &Self) -> Self;
    fn mul_c(&self, other: &Self) -> Self;
    fn scale_c(&self, k: C64) -> Self;
    fn conj_c(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn recip_c(&self) -> Result<Self>;
    fn negligible(&self) -> bool;
    /// Magnitude of the value at the base point.
    fn magnitude(&self) -> f64;
}

impl Coeff for C64 {
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_c(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_c(&self, k: C64) -> Self {
        self * k
    }
    fn conj_c(&self) -> Self {
        self.conj()
    }
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        C64::new(1.0, 0.0)
    }
    fn recip_c(&self) -> Result<Self> {
        if self.norm() == 0.0 {
            return Err(Error::Singular("scalar inverse"));
        }
        Ok(1.0 / self)
    }
    fn negligible(&self) -> bool {
        self.norm() < 1e-300
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coeff for Jet {
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_c(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_c(&self, k: C64) -> Self {
        self.scale(k)
    }
    fn conj_c(&self) -> Self {
        self.conj()
    }
    fn zero_like(&self) -> Self {
        self.scale(0.0)
    }
    fn one_like(&self) -> Self {
        Jet::constant(self.space(), 1.0).truncate(self.order())
    }
    fn recip_c(&self) -> Result<Self> {
        self.recip()
    }
    fn negligible(&self) -> bool {
        self.is_negligible()
    }
    fn magnitude(&self) -> f64 {
        self.value().norm()
    }
}

/// Sign of `dx^a ∧ dx^b` relative to the sorted basis element `a | b`.
pub fn wedge_sign(a: u32, b: u32) -> f64 {
    debug_assert_eq!(a & b, 0);
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Homogeneous differential form of a fixed degree on a chart of real
/// dimension `dim`.
#[derive(Clone, Debug)]
pub struct Form<C> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<u32, C>,
}

pub type FormValue = Form<C64>;
pub type FormJet = Form<Jet>;

impl<C: Coeff> Form<C> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= 16, "charts above real dimension 16 are not supported");
        Form {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(dim: usize, c: C) -> Self {
        let mut f = Form::zero(dim, 0);
        f.insert(0, c);
        f
    }

    /// `c · dx^{i1} ∧ … ∧ dx^{ik}` for arbitrary (possibly unsorted) indices.
    pub fn monomial(dim: usize, indices: &[usize], c: C) -> Self {
        let mut f = Form::zero(dim, indices.len());
        let mut mask = 0u32;
        let mut sign = 1.0;
        for &i in indices {
            assert!(i < dim, "differential index out of range");
            let bit = 1u32 << i;
            if mask & bit != 0 {
                return f;
            }
            sign *= wedge_sign(mask, bit);
            mask |= bit;
        }
        f.insert(mask, c.scale_c(C64::from(sign)));
        f
    }

    /// 1-form `Σ coeffs[i] dx^i`.
    pub fn one_form(coeffs: Vec<C>) -> Self {
        let dim = coeffs.len();
        let mut f = Form::zero(dim, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            f.insert(1 << i, c);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<u32, C> {
        &self.terms
    }

    pub fn get(&self, mask: u32) -> Option<&C> {
        self.terms.get(&mask)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` to the coefficient of `mask`, dropping negligible results.
    pub fn insert(&mut self, mask: u32, c: C) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        debug_assert!(self.dim == 32 || mask >> self.dim == 0);
        if let Some(old) = self.terms.get_mut(&mask) {
            *old = old.add_c(&c);
            if old.negligible() {
                self.terms.remove(&mask);
            }
        } else if !c.negligible() {
            self.terms.insert(mask, c);
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "forms on different charts");
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.insert(m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.insert(m, c.scale_c(C64::from(-1.0)));
        }
        out
    }

    pub fn scale(&self, k: impl Into<C64>) -> Self {
        let k = k.into();
        self.map(|c| c.scale_c(k))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj_c())
    }

    /// Multiply every coefficient by a scalar of the coefficient ring.
    pub fn mul_coeff(&self, k: &C) -> Self {
        self.map(|c| c.mul_c(k))
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (&m, c) in &self.terms {
            out.insert(m, f(c));
        }
        out
    }

    pub fn map_into<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.dim, self.degree);
        for (&m, c) in &self.terms {
            out.insert(m, f(c));
        }
        out
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ChartMismatch(format!(
                "wedge of forms on charts of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        if self.degree + other.degree > self.dim {
            return Err(Error::DegreeOverflow {
                lhs: self.degree,
                rhs: other.degree,
                dim: self.dim,
            });
        }
        let mut out = Form::zero(self.dim, self.degree + other.degree);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let s = wedge_sign(a, b);
                out.insert(a | b, ca.mul_c(cb).scale_c(C64::from(s)));
            }
        }
        Ok(out)
    }

    /// Wedge product; panics on chart mismatch or degree overflow.
    pub fn wedge(&self, other: &Self) -> Self {
        self.try_wedge(other).expect("wedge")
    }

    /// Coefficients of a 1-form as a dense vector.
    pub fn one_form_coeffs(&self, zero: &C) -> Result<Vec<C>> {
        if self.degree != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                found: self.degree,
            });
        }
        Ok((0..self.dim)
            .map(|i| self.terms.get(&(1 << i)).cloned().unwrap_or_else(|| zero.clone()))
            .collect())
    }

    /// Coefficient of the top-degree basis element.
    pub fn top_coeff(&self) -> Option<&C> {
        if self.degree != self.dim {
            return None;
        }
        self.terms.get(&((1u32 << self.dim) - 1))
    }

    /// Largest coefficient magnitude at the base point (the residual norm
    /// used throughout).
    pub fn sup_norm(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}

impl FormJet {
    /// Exterior derivative; lowers the jet order by one.
    pub fn d(&self) -> Result<FormJet> {
        let mut out = Form::zero(self.dim, self.degree + 1);
        if self.degree >= self.dim {
            return Ok(out);
        }
        for (&m, c) in &self.terms {
            for i in 0..self.dim {
                let bit = 1u32 << i;
                if m & bit != 0 {
                    continue;
                }
                let dc = c.partial(i)?;
                out.insert(m | bit, dc.scale(wedge_sign(bit, m)));
            }
        }
        Ok(out)
    }

    pub fn value(&self) -> FormValue {
        self.map_into(|c| c.value())
    }

    /// Lowest valid jet order among the coefficients.
    pub fn jet_order(&self) -> Option<usize> {
        self.terms.values().map(|c| c.order()).min()
    }
}

impl FormValue {
    pub fn approx_eq(&self, other: &FormValue, tol: f64) -> bool {
        self.sub(other).sup_norm() <= tol
    }
}

impl fmt::Display for FormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            for i in 0..self.dim {
                if m & (1 << i) != 0 {
                    write!(f, " dx{i}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;
    use proptest::prelude::*;

    fn one(dim: usize, i: usize) -> FormValue {
        Form::monomial(dim, &[i], C64::new(1.0, 0.0))
    }

    #[test]
    fn basis_wedge() {
        let w = one(4, 0).wedge(&one(4, 1));
        assert_eq!(w.terms().len(), 1);
        assert_eq!(w.get(0b11), Some(&C64::new(1.0, 0.0)));
        let w = one(4, 1).wedge(&one(4, 0));
        assert_eq!(w.get(0b11), Some(&C64::new(-1.0, 0.0)));
    }

    #[test]
    fn repeated_differential_vanishes() {
        // (dζ ∧ dζ̄) ∧ dζ on the plane, with dζ = dx + i dy
        let dz = FormValue::one_form(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let dzb = dz.conj();
        assert!(dz.wedge(&dzb).wedge(&dz).is_zero());
    }

    #[test]
    fn wedge_errors() {
        let a = one(3, 0);
        let b = one(4, 1);
        assert!(matches!(a.try_wedge(&b), Err(Error::ChartMismatch(_))));
        let top = one(2, 0).wedge(&one(2, 1));
        assert!(matches!(
            top.try_wedge(&one(2, 0)),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn d_of_x_dy() {
        let sp = JetSpace::shared(2, 2);
        let x = Jet::coordinates(&sp, &[0.4, 0.1]);
        let f = FormJet::monomial(2, &[1], x[0].clone());
        let df = f.d().unwrap().value();
        assert_eq!(df.get(0b11).map(|c| c.re), Some(1.0));
    }

    fn arb_form(dim: usize, degree: usize) -> impl Strategy<Value = FormValue> {
        let masks: Vec<u32> = (0u32..(1 << dim))
            .filter(|m| m.count_ones() as usize == degree)
            .collect();
        let n = masks.len();
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(move |cs| {
            let mut f = FormValue::zero(dim, degree);
            for (m, (re, im)) in masks.iter().zip(cs) {
                f.insert(*m, C64::new(re, im));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn graded_commutativity(a in arb_form(6, 1), b in arb_form(6, 2), c in arb_form(6, 3)) {
            let ab = a.wedge(&b);
            let ba = b.wedge(&a);
            prop_assert!(ab.approx_eq(&ba, 1e-12));
            let ac = a.wedge(&c);
            let ca = c.wedge(&a);
            prop_assert!(ac.approx_eq(&ca.neg(), 1e-12));
            prop_assert!(a.wedge(&a).sup_norm() < 1e-12);
        }

        #[test]
        fn wedge_is_associative(a in arb_form(6, 1), b in arb_form(6, 2), c in arb_form(6, 2)) {
            let l = a.wedge(&b).wedge(&c);
            let r = a.wedge(&b.wedge(&c));
            prop_assert!(l.approx_eq(&r, 1e-10));
        }
    }
}
