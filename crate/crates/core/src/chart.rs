//! Coordinate charts, sample points and jet-valued fields on them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{Coeff, Form};
use crate::jet::{Jet, JetSpace, C64};

/// Named charts. Real coordinates come in (re, im) pairs for every complex
/// coordinate the chart carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartId {
    /// `(Re ζ, Im ζ, x1, x2, x3, x4)` on `ℂ × N`, with `z1 = x1 + i x2`,
    /// `z2 = x3 + i x4` the I-holomorphic coordinates of `N`.
    Twistor,
    /// `(Re ζ, Im ζ, Re w1, Im w1, Re w2, Im w2)`, holomorphic coordinates of ℂ³.
    C3,
    /// The hyperkähler 4-manifold itself, `(x1, x2, x3, x4)`.
    Fiber,
    /// A single complex coordinate.
    Line,
    /// Base coordinates `z^1..z^n` of a Kähler manifold.
    Base { n: usize },
    /// `(z^1..z^n, t)` on the total space of the canonical bundle.
    CanonicalBundle { n: usize },
}

impl ChartId {
    pub fn real_dim(&self) -> usize {
        match self {
            ChartId::Twistor | ChartId::C3 => 6,
            ChartId::Fiber => 4,
            ChartId::Line => 2,
            ChartId::Base { n } => 2 * n,
            ChartId::CanonicalBundle { n } => 2 * n + 2,
        }
    }

    pub fn complex_dim(&self) -> usize {
        self.real_dim() / 2
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::Twistor => write!(f, "twistor"),
            ChartId::C3 => write!(f, "c3"),
            ChartId::Fiber => write!(f, "fiber"),
            ChartId::Line => write!(f, "line"),
            ChartId::Base { n } => write!(f, "base{n}"),
            ChartId::CanonicalBundle { n } => write!(f, "canonical_bundle{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(chart: ChartId, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != chart.real_dim() {
            return Err(Error::InvalidPoint(format!(
                "{} coordinates on the {chart} chart (expects {})",
                coords.len(),
                chart.real_dim()
            )));
        }
        if let Some(x) = coords.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {x}")));
        }
        Ok(ChartPoint { chart, coords })
    }

    /// Twistor point from ζ and the four real coordinates of `N`.
    pub fn twistor(zeta: Complex64, x: [f64; 4]) -> Result<Self> {
        ChartPoint::new(ChartId::Twistor, vec![zeta.re, zeta.im, x[0], x[1], x[2], x[3]])
    }

    /// The fiber coordinate ζ (first complex pair) on charts that have one.
    pub fn zeta(&self) -> Option<Complex64> {
        match self.chart {
            ChartId::Twistor | ChartId::C3 | ChartId::Line => {
                Some(Complex64::new(self.coords[0], self.coords[1]))
            }
            _ => None,
        }
    }

    /// `s = 1 + |ζ|²`.
    pub fn s(&self) -> Option<f64> {
        self.zeta().map(|z| 1.0 + z.norm_sqr())
    }

    /// Complex coordinate number `k` (pair `2k, 2k+1`).
    pub fn complex(&self, k: usize) -> Complex64 {
        Complex64::new(self.coords[2 * k], self.coords[2 * k + 1])
    }

    pub fn jets(&self, order: usize) -> Vec<Jet> {
        let space = JetSpace::shared(self.coords.len(), order);
        Jet::coordinates(&space, &self.coords)
    }
}

/// Differentiable map from a chart into some jet-valued quantity.
pub struct JetField<T> {
    chart: ChartId,
    order: usize,
    eval: Arc<dyn Fn(&[Jet]) -> Result<T> + Send + Sync>,
}

impl<T> Clone for JetField<T> {
    fn clone(&self) -> Self {
        JetField {
            chart: self.chart,
            order: self.order,
            eval: self.eval.clone(),
        }
    }
}

impl<T> JetField<T> {
    pub fn new(
        chart: ChartId,
        order: usize,
        eval: impl Fn(&[Jet]) -> Result<T> + Send + Sync + 'static,
    ) -> Self {
        JetField {
            chart,
            order,
            eval: Arc::new(eval),
        }
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Evaluate with coordinate jets of the given order.
    pub fn at(&self, p: &ChartPoint, order: usize) -> Result<T> {
        if p.chart != self.chart {
            return Err(Error::ChartMismatch(format!(
                "field on {} evaluated at a {} point",
                self.chart, p.chart
            )));
        }
        if order > self.order {
            return Err(Error::InsufficientOrder {
                needed: order,
                available: self.order,
            });
        }
        (self.eval)(&p.jets(order))
    }

    pub fn eval_jets(&self, x: &[Jet]) -> Result<T> {
        (self.eval)(x)
    }
}

/// `dz_k = dx_{2k} + i dx_{2k+1}` with coefficients in the ring of `like`.
pub fn dz<C: Coeff>(dim: usize, k: usize, like: &C) -> Form<C> {
    let unit = like.one_like();
    let mut f = Form::zero(dim, 1);
    f.insert(1 << (2 * k), unit.clone());
    f.insert(1 << (2 * k + 1), unit.scale_c(C64::new(0.0, 1.0)));
    f
}

/// `dz̄_k`.
pub fn dzbar<C: Coeff>(dim: usize, k: usize, like: &C) -> Form<C> {
    dz(dim, k, like).conj()
}
