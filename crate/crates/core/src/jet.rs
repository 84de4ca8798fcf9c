//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] is the Taylor polynomial of a complex-valued function of `n`
//! real variables around a fixed point, truncated at a total degree. Every
//! arithmetic operation propagates exact derivatives; differentiation drops
//! the valid order by one, so a computation that starts from coordinate jets
//! of order `k` can consume at most `k` derivatives in total.
//!
//! Coefficients are stored as normalized Taylor coefficients
//! `f = Σ a_e ε^e` (so the mixed partial is `a_e · e!`), ordered by total
//! degree so that any valid truncation is a prefix of the buffer.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Monomial tables shared by every jet of the same shape.
pub struct JetSpace {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degree_start: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// (a, b, c): monomial a times monomial b lands on c; sorted by deg c.
    pairs: Vec<(u32, u32, u32)>,
    pair_end: Vec<usize>,
    /// Per variable: (src, dst, factor) sorted by deg src.
    deriv: Vec<Vec<(u32, u32, f64)>>,
    deriv_end: Vec<Vec<usize>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("monomials", &self.exponents.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(var: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if var + 1 == cur.len() {
            cur[var] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u8;
            rec(var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u8; nvars];
    rec(0, degree, &mut cur, &mut out);
    out
}

impl JetSpace {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(exponents.len());
            exponents.extend(monomials_of_degree(nvars, d));
        }
        degree_start.push(exponents.len());
        let lookup: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let degree = |e: &[u8]| e.iter().map(|&x| x as usize).sum::<usize>();

        let mut pairs = Vec::new();
        for (a, ea) in exponents.iter().enumerate() {
            for (b, eb) in exponents.iter().enumerate() {
                if degree(ea) + degree(eb) > order {
                    continue;
                }
                let sum: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                pairs.push((a as u32, b as u32, lookup[&sum] as u32));
            }
        }
        pairs.sort_by_key(|&(_, _, c)| c);
        let mut pair_end = vec![0; order + 1];
        for (d, end) in pair_end.iter_mut().enumerate() {
            let limit = degree_start[d + 1] as u32;
            *end = pairs.partition_point(|&(_, _, c)| c < limit);
        }

        let mut deriv = Vec::with_capacity(nvars);
        let mut deriv_end = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut list = Vec::new();
            for (src, e) in exponents.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[v] -= 1;
                list.push((src as u32, lookup[&lowered] as u32, e[v] as f64));
            }
            // already sorted by src, hence by deg src
            let ends = (0..=order)
                .map(|d| {
                    let limit = degree_start[d + 1] as u32;
                    list.partition_point(|&(s, _, _)| s < limit)
                })
                .collect();
            deriv.push(list);
            deriv_end.push(ends);
        }

        JetSpace {
            nvars,
            order,
            exponents,
            degree_start,
            lookup,
            pairs,
            pair_end,
            deriv,
            deriv_end,
        }
    }

    /// Shared space for `nvars` variables truncated at `order`.
    pub fn shared(nvars: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn len_upto(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }

    pub fn monomial_count(&self) -> usize {
        self.exponents.len()
    }
}

/// Truncated Taylor expansion with complex coefficients.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order {}, value {})", self.order, self.c[0])
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: impl Into<C64>) -> Jet {
        let mut c = vec![ZERO; space.len_upto(space.order)];
        c[0] = value.into();
        Jet {
            space: space.clone(),
            order: space.order,
            c,
        }
    }

    pub fn zero(space: &Arc<JetSpace>) -> Jet {
        Jet::constant(space, ZERO)
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: f64) -> Jet {
        assert!(var < space.nvars, "variable index out of range");
        let mut j = Jet::constant(space, value);
        if space.order >= 1 {
            let mut e = vec![0u8; space.nvars];
            e[var] = 1;
            j.c[space.lookup[&e]] = C64::new(1.0, 0.0);
        }
        j
    }

    /// Coordinate jets for every variable of `space` at `point`.
    pub fn coordinates(space: &Arc<JetSpace>, point: &[f64]) -> Vec<Jet> {
        assert_eq!(point.len(), space.nvars, "point dimension mismatch");
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(space, i, x))
            .collect()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    /// Highest derivative order still exact in this jet.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn re(&self) -> f64 {
        self.c[0].re
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.c
    }

    /// Mixed partial derivative at the expansion point; `multi` lists the
    /// variable index once per differentiation.
    pub fn partial_value(&self, multi: &[usize]) -> Result<C64> {
        if multi.len() > self.order {
            return Err(Error::InsufficientOrder {
                needed: multi.len(),
                available: self.order,
            });
        }
        let mut e = vec![0u8; self.space.nvars];
        for &v in multi {
            e[v] += 1;
        }
        let factorial: f64 = e
            .iter()
            .map(|&k| (1..=k as u64).product::<u64>() as f64)
            .product();
        Ok(self.c[self.space.lookup[&e]] * factorial)
    }

    /// Partial derivative in variable `var` as a jet of one lower order.
    pub fn partial(&self, var: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::InsufficientOrder {
                needed: 1,
                available: 0,
            });
        }
        let order = self.order - 1;
        let mut c = vec![ZERO; self.space.len_upto(order)];
        let list = &self.space.deriv[var];
        for &(src, dst, f) in &list[..self.space.deriv_end[var][self.order]] {
            c[dst as usize] += self.c[src as usize] * f;
        }
        Ok(Jet {
            space: self.space.clone(),
            order,
            c,
        })
    }

    /// Restrict to a lower valid order.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: self.space.clone(),
            order,
            c: self.c[..self.space.len_upto(order)].to_vec(),
        }
    }

    pub fn conj(&self) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            c: self.c.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: impl Into<C64>) -> Jet {
        let k = k.into();
        Jet {
            space: self.space.clone(),
            order: self.order,
            c: self.c.iter().map(|z| z * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: impl Into<C64>) -> Jet {
        let mut out = self.clone();
        out.c[0] += k.into();
        out
    }

    pub fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// True when every coefficient is below `1e-300` in magnitude.
    pub fn is_negligible(&self) -> bool {
        self.c.iter().all(|z| z.norm() < 1e-300)
    }

    /// Largest coefficient magnitude, a cheap norm for pruning and scaling.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn same_space(&self, other: &Jet) {
        debug_assert!(
            Arc::ptr_eq(&self.space, &other.space),
            "jets from different spaces"
        );
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(C64, C64) -> C64) -> Jet {
        self.same_space(other);
        let order = self.order.min(other.order);
        let n = self.space.len_upto(order);
        let c = self.c[..n]
            .iter()
            .zip(&other.c[..n])
            .map(|(&a, &b)| f(a, b))
            .collect();
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        self.same_space(other);
        let order = self.order.min(other.order);
        if other.is_constant() {
            return self.truncate(order).scale(other.c[0]);
        }
        if self.is_constant() {
            return other.truncate(order).scale(self.c[0]);
        }
        let n = self.space.len_upto(order);
        let mut c = vec![ZERO; n];
        let a = &self.c;
        let b = &other.c;
        for &(i, j, k) in &self.space.pairs[..self.space.pair_end[order]] {
            c[k as usize] += a[i as usize] * b[j as usize];
        }
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// `Σ_k taylor[k] · (self − self(0))^k`, i.e. composition with a
    /// univariate function whose normalized Taylor coefficients at the
    /// constant term are given.
    pub fn compose(&self, taylor: &[C64]) -> Jet {
        let mut nil = self.clone();
        nil.c[0] = ZERO;
        let top = self.order.min(taylor.len().saturating_sub(1));
        let mut acc = Jet::constant(&self.space, taylor[top]).truncate(self.order);
        for k in (0..top).rev() {
            acc = acc.mul_jet(&nil);
            acc.c[0] += taylor[k];
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.c[0];
        if a.norm() == 0.0 {
            return Err(Error::DomainViolation("division by zero".into()));
        }
        let inv = 1.0 / a;
        let mut t = Vec::with_capacity(self.order + 1);
        let mut p = inv;
        for _ in 0..=self.order {
            t.push(p);
            p *= -inv;
        }
        Ok(self.compose(&t))
    }

    pub fn div_jet(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn exp(&self) -> Jet {
        let e = self.c[0].exp();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(e / fact);
        }
        self.compose(&t)
    }

    /// Principal logarithm; rejects arguments with non-positive real part
    /// when they are (numerically) real.
    pub fn ln(&self) -> Result<Jet> {
        let a = self.c[0];
        if a.norm() == 0.0 || (a.im.abs() <= 1e-12 * a.re.abs().max(1e-300) && a.re <= 0.0) {
            return Err(Error::DomainViolation(format!("log of {a}")));
        }
        let mut t = Vec::with_capacity(self.order + 1);
        t.push(a.ln());
        let inv = 1.0 / a;
        let mut p = inv;
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(p * (sign / k as f64));
            p *= inv;
        }
        Ok(self.compose(&t))
    }

    /// `self^p` for real `p` via the generalized binomial series.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let a = self.c[0];
        if a.norm() == 0.0 {
            if p >= 0.0 && p.fract() == 0.0 {
                return Ok(self.powi(p as i32));
            }
            return Err(Error::DomainViolation(format!("{a}^{p}")));
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let base = a.powf(p);
        let inv = 1.0 / a;
        let mut binom = 1.0;
        let mut ip = C64::new(1.0, 0.0);
        for k in 0..=self.order {
            if k > 0 {
                binom *= (p - (k as f64 - 1.0)) / k as f64;
                ip *= inv;
            }
            t.push(base * ip * binom);
        }
        Ok(self.compose(&t))
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self
                .recip()
                .map(|r| r.powi(-n))
                .unwrap_or_else(|_| self.scale(f64::NAN));
        }
        let mut acc = Jet::constant(&self.space, 1.0).truncate(self.order);
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_jet(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_jet(&base);
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.c[0];
        if a.im.abs() <= 1e-12 * a.re.abs().max(1e-300) && a.re <= 0.0 {
            return Err(Error::DomainViolation(format!("sqrt of {a}")));
        }
        self.powf(0.5)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        self.compose(&trig_taylor(s, c, self.order))
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.c[0].sin(), self.c[0].cos());
        // cos' = -sin, so shift the sine cycle by one
        self.compose(&trig_taylor(c, -s, self.order))
    }
}

/// Taylor coefficients of a function with f = v0, f' = v1, f'' = −v0, …
fn trig_taylor(v0: C64, v1: C64, order: usize) -> Vec<C64> {
    let cycle = [v0, v1, -v0, -v1];
    let mut fact = 1.0;
    (0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            cycle[k % 4] / fact
        })
        .collect()
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<C64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: C64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_scalar(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn monomial_counts_match_binomials() {
        // C(n + k, k)
        assert_eq!(JetSpace::shared(6, 4).monomial_count(), 210);
        assert_eq!(JetSpace::shared(4, 7).monomial_count(), 330);
        assert_eq!(JetSpace::shared(1, 3).monomial_count(), 4);
    }

    #[test]
    fn polynomial_partials_are_exact() {
        let sp = JetSpace::shared(2, 4);
        let x = Jet::coordinates(&sp, &[0.7, -1.3]);
        // f = x^3 y^2
        let f = x[0].powi(3) * x[1].powi(2);
        let (a, b) = (0.7_f64, -1.3_f64);
        let fxxy = f.partial_value(&[0, 0, 1]).unwrap();
        assert!(close(fxxy, C64::from(6.0 * a * 2.0 * b), 1e-14));
        let fxxyy = f.partial_value(&[0, 1, 0, 1]).unwrap();
        assert!(close(fxxyy, C64::from(6.0 * a * 2.0), 1e-14));
        assert!(f.partial_value(&[0, 0, 0, 0, 1]).is_err());
    }

    #[test]
    fn partial_lowers_order_and_commutes() {
        let sp = JetSpace::shared(3, 4);
        let x = Jet::coordinates(&sp, &[0.3, 0.2, -0.4]);
        let f = (&x[0] * &x[1]).exp() * (&x[2] + 2.0).ln().unwrap();
        let a = f.partial(0).unwrap().partial(2).unwrap();
        let b = f.partial(2).unwrap().partial(0).unwrap();
        assert_eq!(a.order(), 2);
        for (p, q) in a.coefficients().iter().zip(b.coefficients()) {
            assert!((p - q).norm() < 1e-14);
        }
        let err = f.partial(0).unwrap().partial(0).unwrap().partial(1).unwrap();
        let err = err.partial(1).unwrap().partial(2);
        assert!(matches!(err, Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let sp = JetSpace::shared(1, 4);
        let x = Jet::variable(&sp, 0, 0.9);
        let v = 0.9_f64;
        let e = x.exp();
        assert!(close(e.partial_value(&[0, 0, 0]).unwrap(), C64::from(v.exp()), 1e-14));
        let l = x.ln().unwrap();
        assert!(close(l.partial_value(&[0, 0]).unwrap(), C64::from(-1.0 / (v * v)), 1e-14));
        let s = x.sqrt().unwrap();
        assert!(close(
            s.partial_value(&[0, 0, 0]).unwrap(),
            C64::from(3.0 / 8.0 * v.powf(-2.5)),
            1e-13
        ));
        let sn = x.sin();
        assert!(close(sn.partial_value(&[0, 0, 0]).unwrap(), C64::from(-v.cos()), 1e-14));
        let cs = x.cos();
        assert!(close(cs.partial_value(&[0, 0, 0, 0]).unwrap(), C64::from(v.cos()), 1e-14));
        let r = x.recip().unwrap();
        assert!(close(r.partial_value(&[0, 0, 0]).unwrap(), C64::from(-6.0 / v.powi(4)), 1e-13));
        let p = x.powf(-1.5).unwrap();
        assert!(close(
            p.partial_value(&[0, 0]).unwrap(),
            C64::from(-1.5 * -2.5 * v.powf(-3.5)),
            1e-13
        ));
    }

    #[test]
    fn domain_errors() {
        let sp = JetSpace::shared(1, 2);
        let x = Jet::variable(&sp, 0, -1.0);
        assert!(x.ln().is_err());
        assert!(x.sqrt().is_err());
        assert!(Jet::zero(&sp).recip().is_err());
    }
}
