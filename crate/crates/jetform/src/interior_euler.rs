//! Interior Euler operator, integration by parts and residual operators.
//!
//! Conventions: `η` and `ξ` are keyed by `(σ, sorted multi-index)`. The
//! ordered-tuple sums of the theory become sorted sums weighted by
//! [`tuple_multiplicity`], so that
//! `Σ_J ω^σ_J ∧ η^J_σ = p_kρ` and `Σ_I mult(I) d_I(ω^σ ∧ ξ^I_σ) = p_kρ`.
//! `χ` is keyed by `(increasing block, sorted I)` and read back with the
//! block sign for any ordering.

use std::collections::BTreeMap;

use crate::error::{JetError, Result};
use crate::forms::{horizontal_to_ds, Covector, Form};
use crate::multiindex::{binomial, enumerate_upto, factorial, permutations, sort_with_sign, splits, tuple_multiplicity, MultiIndex};
use crate::symexpr::{q, qi, BundleContext};

#[derive(Clone, Debug, PartialEq)]
pub struct EtaDecomposition {
    pub k: usize,
    pub entries: BTreeMap<(u8, MultiIndex), Form>,
}

impl EtaDecomposition {
    pub fn new(k: usize) -> Self {
        EtaDecomposition { k, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, sigma: u8, j: MultiIndex, f: &Form) {
        let e = self.entries.entry((sigma, j)).or_insert_with(Form::zero);
        *e = e.add(f);
    }

    pub fn recompose(&self) -> Form {
        let mut out = Form::zero();
        for ((s, j), eta) in &self.entries {
            out = out.add(&Form::omega(*s, j.entries()).wedge(eta));
        }
        out
    }

    pub fn get(&self, sigma: u8, j: &MultiIndex) -> Form {
        self.entries.get(&(sigma, j.clone())).cloned().unwrap_or_else(Form::zero)
    }
}

/// `η^J_σ = (1/k) ∂/∂y^σ_J ⌟ p_kρ`, checked by recomposition.
pub fn eta_decompose(rho: &Form, k: usize) -> Result<EtaDecomposition> {
    let pk = rho.p(k);
    let mut eta = EtaDecomposition::new(k);
    if k == 0 {
        return Ok(eta);
    }
    let mut keys = std::collections::BTreeSet::new();
    for (w, _) in pk.terms() {
        for c in w {
            if let Covector::Omega(s, j) = c {
                keys.insert((*s, j.clone()));
            }
        }
    }
    let inv = q(1, k as i64);
    for (s, j) in keys {
        let f = pk.contract_omega(s, &j).scale(&inv);
        if !f.is_zero() {
            eta.entries.insert((s, j), f);
        }
    }
    let diff = eta.recompose().sub(&pk);
    if !diff.is_zero() {
        return Err(JetError::RecompositionFailure(format!("{:?}", diff)));
    }
    Ok(eta)
}

/// Integration-by-parts data: `ξ^I_σ` and the extracted `χ^{b; I}`.
#[derive(Clone, Debug)]
pub struct XiFamily {
    pub k: usize,
    pub s: usize,
    pub xi: BTreeMap<(u8, MultiIndex), Form>,
    pub chi: BTreeMap<(Vec<u8>, MultiIndex), Form>,
}

impl XiFamily {
    /// `χ^{b; I}` for an ordered block, with the block sign.
    pub fn chi_at(&self, block: &[u8], i: &MultiIndex) -> Form {
        match sort_with_sign(block) {
            None => Form::zero(),
            Some((b, sg)) => match self.chi.get(&(b, i.clone())) {
                None => Form::zero(),
                Some(f) => {
                    if sg < 0 {
                        f.neg()
                    } else {
                        f.clone()
                    }
                }
            },
        }
    }

    /// `χ^{[b i] I}`: antisymmetrized over the `s+1` leading slots, where
    /// the last slot of the block is the first entry of the multi-index.
    pub fn chi_antisym(&self, block: &[u8], i: &MultiIndex) -> Form {
        let len = block.len();
        let mut out = Form::zero();
        for (p, sg) in permutations(len) {
            let u: Vec<u8> = p.iter().map(|&a| block[a]).collect();
            let f = self.chi_at(&u[..len - 1], &i.append(u[len - 1]));
            out = if sg < 0 { out.sub(&f) } else { out.add(&f) };
        }
        out.scale(&q(1, factorial(len) as i64))
    }

    /// Largest `|I|` carrying a nonzero `χ`.
    pub fn rank(&self) -> usize {
        self.chi.keys().map(|(_, i)| i.len()).max().unwrap_or(0)
    }

    /// `ω^σ ∧ ξ^∅_σ`.
    pub fn source(&self) -> Form {
        let mut out = Form::zero();
        for ((s, i), f) in &self.xi {
            if i.is_empty() {
                out = out.add(&Form::omega(*s, &[]).wedge(f));
            }
        }
        out
    }
}

/// `ξ^I = Σ_J mult(J) (-1)^|J| C(|I|+|J|, |J|) d_J η^{IJ} / mult(IJ)`, with
/// the exactness identity checked against `target`.
pub fn ibp_from_eta(eta: &EtaDecomposition, target: &Form, s: usize, ctx: &BundleContext) -> Result<XiFamily> {
    let mut xi: BTreeMap<(u8, MultiIndex), Form> = BTreeMap::new();
    for ((sigma, kk), e) in &eta.entries {
        let mk = tuple_multiplicity(kk) as i64;
        for (i, j) in splits(kk) {
            let sign = if j.len() % 2 == 0 { 1 } else { -1 };
            let c = qi(sign * tuple_multiplicity(&j) as i64 * binomial(kk.len(), j.len()) as i64) / qi(mk);
            let term = e.total_derivative_multi(j.entries(), ctx).scale(&c);
            let slot = xi.entry((*sigma, i)).or_insert_with(Form::zero);
            *slot = slot.add(&term);
        }
    }
    xi.retain(|_, f| !f.is_zero());

    let mut check = Form::zero();
    for ((sigma, i), f) in &xi {
        let w = Form::omega(*sigma, &[]).wedge(f);
        let w = w.total_derivative_multi(i.entries(), ctx).scale(&qi(tuple_multiplicity(i) as i64));
        check = check.add(&w);
    }
    let diff = check.sub(target);
    if !diff.is_zero() {
        return Err(JetError::ExpansionMismatch(format!("{:?}", diff)));
    }

    let n = ctx.n;
    let k = eta.k;
    let mut ds_cache: BTreeMap<Vec<u8>, (Vec<u8>, i64)> = BTreeMap::new();
    let mut chi: BTreeMap<(Vec<u8>, MultiIndex), Form> = BTreeMap::new();
    let inv_sfact = q(1, factorial(s) as i64);
    let outer = if ((n as usize).saturating_sub(s) * k) % 2 == 0 { 1 } else { -1 };
    for ((sigma, i), f) in &xi {
        let w = Form::omega(*sigma, &[]).wedge(f);
        for (mono, c) in w.terms() {
            let split = mono.iter().position(|cv| cv.is_contact()).unwrap_or(mono.len());
            let d: Vec<u8> = mono[..split]
                .iter()
                .map(|cv| match cv {
                    Covector::Dx(i) => *i,
                    _ => unreachable!(),
                })
                .collect();
            if d.len() + s != n as usize {
                return Err(JetError::NotHomogeneous);
            }
            let (b, eps) = ds_cache.entry(d.clone()).or_insert_with(|| horizontal_to_ds(n, &d)).clone();
            let coef = c.scale(&(inv_sfact.clone() * qi(outer * eps)));
            let piece = Form::term(coef, mono[split..].to_vec());
            let slot = chi.entry((b, i.clone())).or_insert_with(Form::zero);
            *slot = slot.add(&piece);
        }
    }
    chi.retain(|_, f| !f.is_zero());
    Ok(XiFamily { k, s, xi, chi })
}

pub fn ibp_expand(rho: &Form, k: usize, s: usize, ctx: &BundleContext) -> Result<XiFamily> {
    let eta = eta_decompose(rho, k)?;
    ibp_from_eta(&eta, &rho.p(k), s, ctx)
}

/// `𝓘(ρ) = (1/k) ω^σ ∧ Σ_J (-1)^|J| d_J(∂/∂y^σ_J ⌟ p_kρ)`.
pub fn interior_euler(rho: &Form, k: usize, ctx: &BundleContext) -> Result<Form> {
    let eta = eta_decompose(rho, k)?;
    let mut out = Form::zero();
    for ((sigma, j), e) in &eta.entries {
        let t = e.total_derivative_multi(j.entries(), ctx);
        let t = if j.len() % 2 == 1 { t.neg() } else { t };
        out = out.add(&Form::omega(*sigma, &[]).wedge(&t));
    }
    Ok(out)
}

/// `(-1)^k/(s+1) Σ_{b,i,I} d_I χ^{b; iI} ∧ ds_{b i}` over ordered tuples.
/// Only the antisymmetric part of `χ` in `[b i]` survives the contraction
/// with `ds_{b i}`.
pub fn residual_from_xi(fam: &XiFamily, ctx: &BundleContext) -> Form {
    let n = ctx.n;
    let s = fam.s;
    let mut out = Form::zero();
    for ((b, kk), chi) in &fam.chi {
        if kk.is_empty() {
            continue;
        }
        let mut seen = Vec::new();
        for &i in kk.entries() {
            if seen.contains(&i) {
                continue;
            }
            seen.push(i);
            let rest = kk.remove(i).unwrap();
            let mut block = b.clone();
            block.push(i);
            let ds = Form::ds(n, &block);
            if ds.is_zero() {
                continue;
            }
            let t = chi.total_derivative_multi(rest.entries(), ctx).scale(&qi(tuple_multiplicity(&rest) as i64));
            out = out.add(&t.wedge(&ds));
        }
    }
    let sign = if fam.k % 2 == 0 { 1 } else { -1 };
    out.scale(&(qi(sign * factorial(s) as i64) / qi(s as i64 + 1)))
}

/// Top-degree residual operator (`s = 0`).
pub fn residual_top(rho: &Form, k: usize, ctx: &BundleContext) -> Result<Form> {
    let fam = ibp_expand(rho, k, 0, ctx)?;
    Ok(residual_from_xi(&fam, ctx))
}

/// Lower-degree residual operator for `(n-s)`-horizontal `k`-contact forms.
pub fn residual_lower(rho: &Form, k: usize, s: usize, ctx: &BundleContext) -> Result<Form> {
    let fam = ibp_expand(rho, k, s, ctx)?;
    Ok(residual_from_xi(&fam, ctx))
}

/// Right-hand side of the divergence identity:
/// `Σ_{b,i,I} d_i d_I χ^{[b i] I} ∧ ds_b` over ordered tuples.
pub fn prop_div_rhs(fam: &XiFamily, ctx: &BundleContext) -> Form {
    antisym_sum(fam, ctx, false)
}

fn antisym_sum(fam: &XiFamily, ctx: &BundleContext, middle: bool) -> Form {
    let n = ctx.n;
    let s = fam.s;
    let r = fam.rank();
    let mut out = Form::zero();
    if r == 0 {
        return out;
    }
    for b in crate::multiindex::increasing(n, s) {
        let ds = Form::ds(n, &b);
        for i in 1..=n {
            let mut block = b.clone();
            block.push(i);
            for ii in enumerate_upto(n, r - 1) {
                let anti = fam.chi_antisym(&block, &ii);
                let f = if middle { fam.chi_at(&b, &ii.append(i)).sub(&anti) } else { anti };
                if f.is_zero() {
                    continue;
                }
                let t = f
                    .total_derivative_multi(ii.entries(), ctx)
                    .total_derivative(i, ctx)
                    .scale(&qi(tuple_multiplicity(&ii) as i64));
                out = out.add(&t.wedge(&ds));
            }
        }
    }
    out.scale(&qi(factorial(s) as i64))
}

/// The three parts of `p_1ρ` for a 1-contact `(n-s)`-horizontal form.
#[derive(Clone, Debug)]
pub struct LowerSplit {
    pub source: Form,
    pub middle: Form,
    pub boundary: Form,
    pub residual: Form,
}

impl LowerSplit {
    pub fn total(&self) -> Form {
        self.source.add(&self.middle).add(&self.boundary)
    }
}

pub fn split_lower(rho: &Form, s: usize, ctx: &BundleContext) -> Result<LowerSplit> {
    let fam = ibp_expand(rho, 1, s, ctx)?;
    let residual = residual_from_xi(&fam, ctx);
    Ok(LowerSplit {
        source: fam.source(),
        middle: antisym_sum(&fam, ctx, true),
        boundary: residual.d_h(ctx),
        residual,
    })
}

/// Codegree of a homogeneous `k`-contact part: `n` minus its horizontal degree.
pub fn codegree(rho: &Form, k: usize, ctx: &BundleContext) -> Result<usize> {
    let h = rho.p(k).horizontal_degrees();
    match h.len() {
        0 => Ok(0),
        1 => {
            let h = *h.iter().next().unwrap();
            Ok(ctx.n as usize - h.min(ctx.n as usize))
        }
        _ => Err(JetError::NotHomogeneous),
    }
}
