//! Almost complex structures acting on forms, and the (p,q) projectors they
//! induce.
//!
//! `J` is stored as the matrix of its action on the real coframe:
//! `J(dx^j) = Σ_i m[i][j] dx^i`. Extended as a derivation `D` to k-forms it
//! acts on the (p,q) component by `i(p − q)`, so each type projector is a
//! Lagrange polynomial in `D`. This needs nothing beyond `J² = −1` and works
//! equally for pointwise values and for jets.

use std::collections::BTreeMap;

use crate::chart::{dz, dzbar};
use crate::error::{Error, Result};
use crate::form::{Coeff, Form};
use crate::jet::{Jet, C64};

#[derive(Clone, Debug)]
pub struct Acs<C> {
    dim: usize,
    m: Vec<Vec<C>>,
}

/// Pointwise almost complex structure.
pub type AlmostComplexStructure = Acs<C64>;
/// Jet-valued almost complex structure (can be differentiated through).
pub type AcsField = Acs<Jet>;

impl<C: Coeff> Acs<C> {
    pub fn from_matrix(m: Vec<Vec<C>>) -> Self {
        let dim = m.len();
        assert!(m.iter().all(|row| row.len() == dim), "square matrix required");
        Acs { dim, m }
    }

    /// Build from the images of the complex coframe: `images[k] = (J dz_k, J dz̄_k)`
    /// for each complex coordinate pair of the chart.
    pub fn from_complex_images(images: Vec<(Form<C>, Form<C>)>, like: &C) -> Result<Self> {
        let dim = 2 * images.len();
        let zero = like.zero_like();
        let mut m = vec![vec![zero.clone(); dim]; dim];
        let half = C64::new(0.5, 0.0);
        let half_over_i = C64::new(0.0, -0.5);
        for (k, (jdz, jdzb)) in images.iter().enumerate() {
            let re = jdz.add(jdzb).scale(half);
            let im = jdz.sub(jdzb).scale(half_over_i);
            let re = re.one_form_coeffs(&zero)?;
            let im = im.one_form_coeffs(&zero)?;
            for i in 0..dim {
                m[i][2 * k] = re[i].clone();
                m[i][2 * k + 1] = im[i].clone();
            }
        }
        Ok(Acs { dim, m })
    }

    /// The standard structure with `J dz_k = i dz_k` on every pair.
    pub fn standard(dim: usize, like: &C) -> Self {
        assert!(dim % 2 == 0, "odd real dimension");
        let images = (0..dim / 2)
            .map(|k| {
                let a = dz(dim, k, like).scale(C64::new(0.0, 1.0));
                let b = dzbar(dim, k, like).scale(C64::new(0.0, -1.0));
                (a, b)
            })
            .collect();
        Acs::from_complex_images(images, like).expect("standard structure")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Vec<C>] {
        &self.m
    }

    /// `J η` for a 1-form `η`.
    pub fn apply(&self, eta: &Form<C>) -> Result<Form<C>> {
        if eta.degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                found: eta.degree(),
            });
        }
        self.derivation(eta)
    }

    /// `J` extended as a derivation to forms of any degree.
    pub fn derivation(&self, eta: &Form<C>) -> Result<Form<C>> {
        if eta.dim() != self.dim {
            return Err(Error::ChartMismatch(format!(
                "structure on dimension {} applied to a form on dimension {}",
                self.dim,
                eta.dim()
            )));
        }
        let mut out = Form::zero(self.dim, eta.degree());
        for (&mask, c) in eta.terms() {
            let mut rest_bits = mask;
            while rest_bits != 0 {
                let i = rest_bits.trailing_zeros() as usize;
                rest_bits &= rest_bits - 1;
                let bit_i = 1u32 << i;
                let slot = (mask & (bit_i - 1)).count_ones() as i64;
                let rest = mask & !bit_i;
                for (target, row) in self.m.iter().enumerate() {
                    let entry = &row[i];
                    if entry.negligible() {
                        continue;
                    }
                    let bit_t = 1u32 << target;
                    if rest & bit_t != 0 {
                        continue;
                    }
                    let pos = (rest & (bit_t - 1)).count_ones() as i64;
                    let sign = if (pos - slot).abs() % 2 == 0 { 1.0 } else { -1.0 };
                    out.insert(rest | bit_t, c.mul_c(entry).scale_c(C64::new(sign, 0.0)));
                }
            }
        }
        Ok(out)
    }

    fn feasible_types(&self, degree: usize) -> std::ops::RangeInclusive<usize> {
        let n = self.dim / 2;
        degree.saturating_sub(n)..=degree.min(n)
    }

    /// Component of type (p, q) with `p + q = deg η`.
    pub fn project(&self, eta: &Form<C>, p: usize, q: usize) -> Result<Form<C>> {
        let k = eta.degree();
        if p + q != k {
            return Err(Error::WrongDegree {
                expected: p + q,
                found: k,
            });
        }
        let mut out = eta.clone();
        if !self.feasible_types(k).contains(&q) {
            return Ok(Form::zero(self.dim, k));
        }
        let lambda = |q: usize| C64::new(0.0, k as f64 - 2.0 * q as f64);
        for other in self.feasible_types(k) {
            if other == q {
                continue;
            }
            let shift = lambda(other);
            let denom = lambda(q) - shift;
            let d = self.derivation(&out)?;
            out = d.sub(&out.scale(shift)).scale(1.0 / denom);
        }
        Ok(out)
    }

    /// All (p, q) components of `η`, keyed by (p, q).
    pub fn decompose(&self, eta: &Form<C>) -> Result<BTreeMap<(usize, usize), Form<C>>> {
        let k = eta.degree();
        let mut out = BTreeMap::new();
        for q in self.feasible_types(k) {
            out.insert((k - q, q), self.project(eta, k - q, q)?);
        }
        Ok(out)
    }

    /// The (1,0) part `½(η − iJη)` of a 1-form.
    pub fn project_10(&self, eta: &Form<C>) -> Result<Form<C>> {
        let j = self.apply(eta)?;
        Ok(eta.sub(&j.scale(C64::new(0.0, 1.0))).scale(0.5))
    }

    /// The (0,1) part `½(η + iJη)` of a 1-form.
    pub fn project_01(&self, eta: &Form<C>) -> Result<Form<C>> {
        let j = self.apply(eta)?;
        Ok(eta.add(&j.scale(C64::new(0.0, 1.0))).scale(0.5))
    }
}

impl AlmostComplexStructure {
    /// `max |(J² + 1)_{ij}|`.
    pub fn square_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
                for k in 0..n {
                    s += self.m[i][k] * self.m[k][j];
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Largest imaginary part of the matrix entries.
    pub fn imaginary_defect(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}

impl AcsField {
    pub fn value(&self) -> AlmostComplexStructure {
        Acs {
            dim: self.dim,
            m: self
                .m
                .iter()
                .map(|row| row.iter().map(|c| c.value()).collect())
                .collect(),
        }
    }
}
