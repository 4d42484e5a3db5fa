//! Differential forms on jet prolongations, always in the contact basis.
//!
//! A [`Form`] is a sum of `coefficient * θ_1 ∧ ... ∧ θ_q` with the covectors
//! strictly increasing in the [`Covector`] order (every `dx` before every
//! `ω`). Contact degree is therefore the number of `ω` factors, and `p_k` is
//! plain grade selection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::multiindex::MultiIndex;
use crate::symexpr::{qi, BundleContext, Coord, Expr, Q};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Covector {
    Dx(u8),
    Omega(u8, MultiIndex),
}

impl Covector {
    pub fn is_contact(&self) -> bool {
        matches!(self, Covector::Omega(..))
    }

    pub fn omega(sigma: u8, j: &[u8]) -> Self {
        Covector::Omega(sigma, MultiIndex::new(j))
    }
}

pub type Wedge = Vec<Covector>;

/// Sorts a wedge product; `None` if a covector repeats.
pub fn sort_wedge(mut w: Wedge) -> Option<(Wedge, i64)> {
    let mut sign = 1;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && w[j - 1] == w[j] {
            return None;
        }
    }
    Some((w, sign))
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Form {
    terms: BTreeMap<Wedge, Expr>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn scalar(e: Expr) -> Self {
        Form::term(e, Vec::new())
    }

    /// Single term; the wedge is sorted with sign.
    pub fn term(c: Expr, w: Wedge) -> Self {
        let mut f = Form::zero();
        f.push(w, c);
        f
    }

    pub fn dx(i: u8) -> Self {
        Form::term(Expr::one(), vec![Covector::Dx(i)])
    }

    pub fn omega(sigma: u8, j: &[u8]) -> Self {
        Form::term(Expr::one(), vec![Covector::omega(sigma, j)])
    }

    /// `dy^σ_J = ω^σ_J + y^σ_{Jj} dx^j`: the only place `dy` exists.
    pub fn dy(sigma: u8, j: &[u8], ctx: &BundleContext) -> Self {
        let mut f = Form::omega(sigma, j);
        let jm = MultiIndex::new(j);
        for i in 1..=ctx.n {
            f.push(vec![Covector::Dx(i)], Expr::coord(Coord::Y(sigma, jm.append(i))));
        }
        f
    }

    /// `ds_{i_1..i_s} = ∂_{i_s} ⌟ ... ⌟ ∂_{i_1} ⌟ (dx^1 ∧ ... ∧ dx^n)`.
    pub fn ds(n: u8, block: &[u8]) -> Self {
        let mut f = Form::term(Expr::one(), (1..=n).map(Covector::Dx).collect());
        for &i in block {
            f = f.contract_dx(i);
        }
        f
    }

    /// Adds `c * w`, sorting `w` first.
    pub fn push(&mut self, w: Wedge, c: Expr) {
        if c.is_zero() {
            return;
        }
        if let Some((w, sign)) = sort_wedge(w) {
            let c = if sign < 0 { -c } else { c };
            self.push_sorted(w, c);
        }
    }

    fn push_sorted(&mut self, w: Wedge, c: Expr) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Wedge, &Expr)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &[Covector]) -> Expr {
        self.terms.get(w).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn add(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.push_sorted(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.push_sorted(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Form {
        self.scale(&qi(-1))
    }

    pub fn scale(&self, q: &Q) -> Form {
        self.map_coeffs(|c| c.scale(q))
    }

    pub fn mul_expr(&self, e: &Expr) -> Form {
        self.map_coeffs(|c| c * e)
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Expr) -> Expr) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            out.push_sorted(w.clone(), f(c));
        }
        out
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(&Wedge) -> bool) -> Form {
        Form {
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend(wb.iter().cloned());
                out.push(w, ca * cb);
            }
        }
        out
    }

    /// The `k`-contact component.
    pub fn p(&self, k: usize) -> Form {
        self.filter_terms(|w| contact_degree(w) == k)
    }

    /// Component of total degree `q`.
    pub fn degree_part(&self, q: usize) -> Form {
        self.filter_terms(|w| w.len() == q)
    }

    pub fn contact_degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|w| contact_degree(w)).collect()
    }

    pub fn horizontal_degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|w| w.len() - contact_degree(w)).collect()
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|w| w.len()).collect()
    }

    pub fn max_contact_degree(&self) -> usize {
        self.contact_degrees().into_iter().max().unwrap_or(0)
    }

    /// Highest jet order among coefficients and contact covectors.
    pub fn order(&self) -> usize {
        let mut r = 0;
        for (w, c) in &self.terms {
            r = r.max(c.order());
            for cv in w {
                if let Covector::Omega(_, j) = cv {
                    r = r.max(j.len() + 1);
                }
            }
        }
        r
    }

    /// Interior product with the vector field taking the value `v(θ)` on each
    /// basis covector.
    pub fn contract(&self, v: &dyn Fn(&Covector) -> Option<Expr>) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            for (p, cv) in w.iter().enumerate() {
                if let Some(val) = v(cv) {
                    let mut rest = w.clone();
                    rest.remove(p);
                    let mut coef = c * &val;
                    if p % 2 == 1 {
                        coef = -coef;
                    }
                    out.push_sorted(rest, coef);
                }
            }
        }
        out
    }

    pub fn contract_dx(&self, i: u8) -> Form {
        self.contract(&|cv| match cv {
            Covector::Dx(j) if *j == i => Some(Expr::one()),
            _ => None,
        })
    }

    /// Formal contraction with `∂/∂y^σ_J`, the field dual to `ω^σ_J`.
    pub fn contract_omega(&self, sigma: u8, j: &MultiIndex) -> Form {
        self.contract(&|cv| match cv {
            Covector::Omega(s, k) if *s == sigma && k == j => Some(Expr::one()),
            _ => None,
        })
    }

    /// `J^rΞ ⌟ ρ` for a vertical field: `ω^σ_J ↦ d_J Ξ^σ`, `dx ↦ 0`.
    pub fn contract_prolonged(&self, xi: &[Expr], ctx: &BundleContext) -> Form {
        let mut cache: BTreeMap<(u8, MultiIndex), Expr> = BTreeMap::new();
        for w in self.terms.keys() {
            for cv in w {
                if let Covector::Omega(s, j) = cv {
                    cache
                        .entry((*s, j.clone()))
                        .or_insert_with(|| xi[*s as usize - 1].total_derivative_multi(j.entries(), ctx));
                }
            }
        }
        self.contract(&|cv| match cv {
            Covector::Omega(s, j) => cache.get(&(*s, j.clone())).cloned(),
            Covector::Dx(_) => None,
        })
    }

    /// Total derivative of forms: `d_i dx^j = 0`, `d_i ω^σ_J = ω^σ_{Ji}`.
    pub fn total_derivative(&self, i: u8, ctx: &BundleContext) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            out.push_sorted(w.clone(), c.total_derivative(i, ctx));
            for (p, cv) in w.iter().enumerate() {
                if let Covector::Omega(s, j) = cv {
                    let mut w2 = w.clone();
                    w2[p] = Covector::Omega(*s, j.append(i));
                    out.push(w2, c.clone());
                }
            }
        }
        out
    }

    pub fn total_derivative_multi(&self, j: &[u8], ctx: &BundleContext) -> Form {
        let mut f = self.clone();
        for &i in j {
            f = f.total_derivative(i, ctx);
        }
        f
    }

    /// Exterior derivative, with `d ω^σ_J = dx^j ∧ ω^σ_{Jj}`.
    pub fn exterior_d(&self, ctx: &BundleContext) -> Form {
        let mut out = Form::zero();
        for (w, c) in &self.terms {
            for i in 1..=ctx.n {
                let mut w2 = vec![Covector::Dx(i)];
                w2.extend(w.iter().cloned());
                out.push(w2, c.total_derivative(i, ctx));
            }
            for y in c.fiber_dependencies(ctx) {
                let dc = c.partial(&y);
                if let Coord::Y(s, j) = y {
                    let mut w2 = vec![Covector::Omega(s, j)];
                    w2.extend(w.iter().cloned());
                    out.push(w2, dc);
                }
            }
            for (p, cv) in w.iter().enumerate() {
                if let Covector::Omega(s, j) = cv {
                    let coef = if p % 2 == 1 { -c } else { c.clone() };
                    for k in 1..=ctx.n {
                        let mut w2 = w[..p].to_vec();
                        w2.push(Covector::Dx(k));
                        w2.push(Covector::Omega(*s, j.append(k)));
                        w2.extend(w[p + 1..].iter().cloned());
                        out.push(w2, coef.clone());
                    }
                }
            }
        }
        out
    }

    /// Horizontal differential from the local formula `(-1)^q d_iρ ∧ dx^i`,
    /// applied to each homogeneous degree.
    pub fn d_h(&self, ctx: &BundleContext) -> Form {
        let mut out = Form::zero();
        for q in self.degrees() {
            let part = self.degree_part(q);
            for i in 1..=ctx.n {
                let t = part.total_derivative(i, ctx).wedge(&Form::dx(i));
                out = if q % 2 == 1 { out.sub(&t) } else { out.add(&t) };
            }
        }
        out
    }

    /// Horizontal differential by grading, `Σ_k p_k d p_k ρ`.
    pub fn d_h_graded(&self, ctx: &BundleContext) -> Form {
        let mut out = Form::zero();
        for k in self.contact_degrees() {
            out = out.add(&self.p(k).exterior_d(ctx).p(k));
        }
        out
    }

    /// Contact differential `Σ_k p_{k+1} d p_k ρ`.
    pub fn d_c(&self, ctx: &BundleContext) -> Form {
        let mut out = Form::zero();
        for k in self.contact_degrees() {
            out = out.add(&self.p(k).exterior_d(ctx).p(k + 1));
        }
        out
    }
}

pub fn contact_degree(w: &[Covector]) -> usize {
    w.iter().filter(|c| c.is_contact()).count()
}

/// `ds_b` for an ordered block, cached by the caller when hot.
pub fn ds_ordered(n: u8, block: &[u8]) -> Form {
    Form::ds(n, block)
}

/// Splits a purely horizontal monomial `dx_D` (D increasing, |D| = n - s) into
/// the increasing complement block `b` and the sign with `dx_D = ε ds_b`.
pub fn horizontal_to_ds(n: u8, d: &[u8]) -> (Vec<u8>, i64) {
    let b: Vec<u8> = (1..=n).filter(|i| !d.contains(i)).collect();
    let ds = Form::ds(n, &b);
    let w: Wedge = d.iter().map(|&i| Covector::Dx(i)).collect();
    let c = ds.coefficient(&w);
    let sign = if c == Expr::one() { 1 } else { -1 };
    (b, sign)
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = crate::frontend::Names::default_for(4);
        write!(f, "{}", crate::frontend::print::form_text(self, 0, &names))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl From<Expr> for Form {
    fn from(e: Expr) -> Self {
        Form::scalar(e)
    }
}
