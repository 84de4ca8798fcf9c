//! Exterior and Dolbeault calculus on jet-valued forms.
//!
//! `∂` and `∂̄` are obtained from `d` and the type projectors of a jet-valued
//! almost complex structure, so nothing here assumes the chart coordinates are
//! holomorphic.

use std::collections::BTreeMap;

use crate::acs::{AcsField, AlmostComplexStructure};
use crate::chart::{ChartPoint, JetField};
use crate::error::{Error, Result};
use crate::form::{FormJet, FormValue};
use crate::jet::{Jet, C64};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn wedge(a: &FormValue, b: &FormValue) -> Result<FormValue> {
    a.try_wedge(b)
}

/// `d` of a form field at a point (field order must be at least 1).
pub fn exterior_derivative(f: &JetField<FormJet>, p: &ChartPoint) -> Result<FormValue> {
    if f.order() < 1 {
        return Err(Error::InsufficientOrder {
            needed: 1,
            available: f.order(),
        });
    }
    Ok(f.at(p, 1)?.d()?.value())
}

pub fn acs_apply(j: &AlmostComplexStructure, eta: &FormValue) -> Result<FormValue> {
    j.apply(eta)
}

pub fn type_decompose(
    eta: &FormValue,
    j: &AlmostComplexStructure,
) -> Result<BTreeMap<(usize, usize), FormValue>> {
    j.decompose(eta)
}

/// `(∂η, ∂̄η)` at a point.
pub fn dolbeault_split(
    f: &JetField<FormJet>,
    p: &ChartPoint,
    j: &JetField<AcsField>,
) -> Result<(FormValue, FormValue)> {
    if f.order() < 1 {
        return Err(Error::InsufficientOrder {
            needed: 1,
            available: f.order(),
        });
    }
    let eta = f.at(p, 1)?;
    let jf = j.at(p, 1)?;
    Ok((del(&eta, &jf)?.value(), delbar(&eta, &jf)?.value()))
}

/// `i∂∂̄f` at a point.
pub fn ddbar_scalar(f: &JetField<Jet>, p: &ChartPoint, j: &JetField<AcsField>) -> Result<FormValue> {
    if f.order() < 2 {
        return Err(Error::InsufficientOrder {
            needed: 2,
            available: f.order(),
        });
    }
    let v = f.at(p, 2)?;
    let jf = j.at(p, 2)?;
    Ok(i_ddbar(&v, &jf)?.value())
}

fn scalar_form(f: &Jet, dim: usize) -> FormJet {
    let mut out = FormJet::zero(dim, 0);
    out.insert(0, f.clone());
    out
}

/// `df` of a scalar jet.
pub fn d_scalar(f: &Jet, dim: usize) -> Result<FormJet> {
    scalar_form(f, dim).d()
}

/// `∂f` of a scalar.
pub fn del_scalar(f: &Jet, j: &AcsField) -> Result<FormJet> {
    j.project_10(&d_scalar(f, j.dim())?)
}

/// `∂̄f` of a scalar.
pub fn delbar_scalar(f: &Jet, j: &AcsField) -> Result<FormJet> {
    j.project_01(&d_scalar(f, j.dim())?)
}

/// `∂η = Σ π^{p+1,q} d η^{p,q}`.
pub fn del(eta: &FormJet, j: &AcsField) -> Result<FormJet> {
    split(eta, j, true)
}

/// `∂̄η = Σ π^{p,q+1} d η^{p,q}`.
pub fn delbar(eta: &FormJet, j: &AcsField) -> Result<FormJet> {
    split(eta, j, false)
}

fn split(eta: &FormJet, j: &AcsField, holomorphic: bool) -> Result<FormJet> {
    let k = eta.degree();
    let mut out = FormJet::zero(eta.dim(), k + 1);
    if k == 0 {
        let d = eta.d()?;
        return if holomorphic { j.project_10(&d) } else { j.project_01(&d) };
    }
    for ((p, q), part) in j.decompose(eta)? {
        if part.is_zero() {
            continue;
        }
        let d = part.d()?;
        let (tp, tq) = if holomorphic { (p + 1, q) } else { (p, q + 1) };
        if tp + tq > eta.dim() || tp > eta.dim() / 2 || tq > eta.dim() / 2 {
            continue;
        }
        out = out.add(&j.project(&d, tp, tq)?);
    }
    Ok(out)
}

/// `i∂∂̄f`, computed as `i π^{1,1} d(∂̄f)`.
pub fn i_ddbar(f: &Jet, j: &AcsField) -> Result<FormJet> {
    let dbar = delbar_scalar(f, j)?;
    Ok(j.project(&dbar.d()?, 1, 1)?.scale(I))
}

/// `∂̄∂f = −∂∂̄f`.
pub fn dbar_d(f: &Jet, j: &AcsField) -> Result<FormJet> {
    Ok(i_ddbar(f, j)?.scale(I))
}

/// `i∂∂̄η` for a form `η` (`i π d π d η`, exact for integrable structures).
pub fn i_ddbar_form(eta: &FormJet, j: &AcsField) -> Result<FormJet> {
    Ok(del(&delbar(eta, j)?, j)?.scale(I))
}
