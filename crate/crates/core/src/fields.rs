//! Real scalar functions supplied as jet evaluators.
//!
//! A field takes the coordinate jets of the space it lives on: `[Re ζ, Im ζ]`
//! for fiber functions `g`, `[x1, x2, x3, x4]` for functions `h` on `N`,
//! `[R]` for profiles of the fiber norm, base coordinates for `u`, `v`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::jet::Jet;

type Eval = dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync;

#[derive(Clone)]
pub struct ScalarField {
    label: String,
    eval: Arc<Eval>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.label)
    }
}

impl ScalarField {
    pub fn new(label: impl Into<String>, eval: impl Fn(&[Jet]) -> Result<Jet> + Send + Sync + 'static) -> Self {
        ScalarField {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::new(format!("{c}"), move |x: &[Jet]| Ok(x[0].scale(0.0).add_scalar(c)))
    }

    /// `c·log(ρ)` on `N`, where `ρ = Σ x_i²`.
    pub fn log_radius(c: f64) -> Self {
        ScalarField::new(format!("{c}*log(rho)"), move |x: &[Jet]| {
            let rho = x.iter().map(|v| v * v).reduce(|a, b| a + b).expect("coordinates");
            Ok(rho.ln()? * c)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Jet> {
        (self.eval)(x)
    }

    /// `self + other`.
    pub fn plus(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(format!("({})+({})", self.label, other.label), move |x: &[Jet]| {
            Ok(a.eval(x)? + b.eval(x)?)
        })
    }

    /// `k · self`.
    pub fn times(&self, k: f64) -> ScalarField {
        let a = self.clone();
        ScalarField::new(format!("{k}*({})", self.label), move |x: &[Jet]| Ok(a.eval(x)? * k))
    }
}
