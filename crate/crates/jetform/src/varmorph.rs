//! Variational morphisms and their splittings.
//!
//! A morphism of codegree `s` carries coefficients `A^{i_1..i_s J}_σ` over
//! ordered tuples, and pairs with a vertical field as
//! `⟨V|J^rΞ⟩ = Σ A^{i_1..i_s J}_σ d_JΞ^σ ds_{i_1..i_s}` (all tuples ordered).
//! Its associated 1-contact form is `Σ A^{i_1..i_s J}_σ ω^σ_J ∧ ds_{i_1..i_s}`.
//! The fibered connection is the flat one of the chart.

use std::collections::BTreeMap;

use crate::error::{JetError, Result};
use crate::forms::{horizontal_to_ds, Covector, Form};
use crate::multiindex::{factorial, orderings, permutations, sort_with_sign, tuple_multiplicity, tuples, CoefficientTensor, MultiIndex};
use crate::symexpr::{q, qi, BundleContext, Expr};

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalMorphism {
    pub s: usize,
    pub r: usize,
    pub coeffs: CoefficientTensor,
}

/// How a morphism maps to a form: boundary morphisms pick up a minus sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormSign {
    Plain,
    Boundary,
}

impl VariationalMorphism {
    pub fn new(coeffs: CoefficientTensor, r: usize) -> Self {
        VariationalMorphism { s: coeffs.s, r, coeffs }
    }

    pub fn zero(n: u8, s: usize, r: usize) -> Self {
        VariationalMorphism::new(CoefficientTensor::new(n, s), r)
    }

    pub fn n(&self) -> u8 {
        self.coeffs.n
    }

    pub fn get(&self, sigma: u8, tuple: &[u8]) -> Expr {
        self.coeffs.get(sigma, tuple)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn sub(&self, other: &Self) -> Self {
        VariationalMorphism::new(self.coeffs.sub(&other.coeffs), self.r.max(other.r))
    }

    pub fn add(&self, other: &Self) -> Self {
        VariationalMorphism::new(self.coeffs.add(&other.coeffs), self.r.max(other.r))
    }

    /// `⟨V|J^rΞ⟩` as a horizontal `(n-s)`-form.
    pub fn evaluate(&self, xi: &[Expr], ctx: &BundleContext) -> Form {
        let mut dxi: BTreeMap<(u8, MultiIndex), Expr> = BTreeMap::new();
        let mut ds: BTreeMap<Vec<u8>, Form> = BTreeMap::new();
        let mut acc: BTreeMap<Vec<u8>, Expr> = BTreeMap::new();
        for (sigma, tup, a) in self.coeffs.iter() {
            let (b, j) = tup.split_at(self.s);
            let Some((bs, sg)) = sort_with_sign(b) else { continue };
            let jm = MultiIndex::new(j);
            let d = dxi
                .entry((sigma, jm.clone()))
                .or_insert_with(|| xi[sigma as usize - 1].total_derivative_multi(jm.entries(), ctx));
            let t = a * &*d;
            let slot = acc.entry(bs).or_insert_with(Expr::zero);
            *slot = if sg < 0 { &*slot - &t } else { &*slot + &t };
        }
        let mut out = Form::zero();
        for (b, c) in acc {
            let f = ds.entry(b.clone()).or_insert_with(|| Form::ds(ctx.n, &b));
            out = out.add(&f.mul_expr(&c));
        }
        out
    }

    /// `Σ A^{bJ}_σ ω^σ_J ∧ ds_b`, negated for boundary morphisms.
    pub fn to_contact_form(&self, sign: FormSign) -> Form {
        let n = self.n();
        let mut acc: BTreeMap<(Vec<u8>, u8, MultiIndex), Expr> = BTreeMap::new();
        for (sigma, tup, a) in self.coeffs.iter() {
            let (b, j) = tup.split_at(self.s);
            let Some((bs, sg)) = sort_with_sign(b) else { continue };
            let slot = acc.entry((bs, sigma, MultiIndex::new(j))).or_insert_with(Expr::zero);
            *slot = if sg < 0 { &*slot - a } else { &*slot + a };
        }
        let mut out = Form::zero();
        for ((b, sigma, j), c) in acc {
            let f = Form::omega(sigma, j.entries()).wedge(&Form::ds(n, &b)).mul_expr(&c);
            out = out.add(&f);
        }
        match sign {
            FormSign::Plain => out,
            FormSign::Boundary => out.neg(),
        }
    }

    /// Coefficients antisymmetric over the block and the first rank index
    /// vanish (for every entry with `|J| ≥ 1`).
    pub fn is_reduced(&self) -> bool {
        let pos: Vec<usize> = (0..=self.s).collect();
        let mut higher = CoefficientTensor::new(self.n(), self.s);
        for (sigma, tup, a) in self.coeffs.iter() {
            if tup.len() > self.s {
                higher.set(sigma, tup, a.clone());
            }
        }
        higher.antisymmetrize(&pos).is_zero()
    }
}

/// Fills every ordering of `b` (signed) and `j` with `value`.
fn spread(t: &mut CoefficientTensor, sigma: u8, b: &[u8], j: &MultiIndex, value: &Expr) {
    for (p, sg) in permutations(b.len()) {
        let pb: Vec<u8> = p.iter().map(|&a| b[a]).collect();
        for jo in orderings(j) {
            let mut key = pb.clone();
            key.extend(&jo);
            let v = if sg < 0 { -value } else { value.clone() };
            t.add_to(sigma, &key, &v);
        }
    }
}

/// Reads a 1-contact `(n-s)`-horizontal form back as a morphism of codegree `s`.
pub fn from_contact_form_with(rho: &Form, s: usize, ctx: &BundleContext) -> Result<VariationalMorphism> {
    let n = ctx.n;
    if rho.degrees().iter().any(|&d| d > n as usize + 1) {
        let degree = *rho.degrees().iter().max().unwrap();
        return Err(JetError::DegreeTooHigh { degree, max: n as usize + 1 });
    }
    if rho.contact_degrees().iter().any(|&k| k != 1) {
        return Err(JetError::NotOneContact);
    }
    let mut t = CoefficientTensor::new(n, s);
    let mut r = 0;
    let sfact = factorial(s) as i64;
    for (w, c) in rho.terms() {
        let (d, om) = w.split_at(w.len() - 1);
        if d.len() + s != n as usize {
            return Err(JetError::NotHomogeneous);
        }
        let d: Vec<u8> = d
            .iter()
            .map(|cv| match cv {
                Covector::Dx(i) => *i,
                _ => unreachable!(),
            })
            .collect();
        let Covector::Omega(sigma, j) = &om[0] else { unreachable!() };
        r = r.max(j.len());
        let (b, eps) = horizontal_to_ds(n, &d);
        let sign = if d.len() % 2 == 1 { -eps } else { eps };
        let v = c.scale(&(qi(sign) / qi(sfact * tuple_multiplicity(j) as i64)));
        spread(&mut t, *sigma, &b, j, &v);
    }
    Ok(VariationalMorphism::new(t, r))
}

pub fn from_contact_form(rho: &Form, ctx: &BundleContext) -> Result<VariationalMorphism> {
    let h = rho.horizontal_degrees();
    let s = match h.len() {
        0 => 0,
        1 => ctx.n as usize - *h.iter().next().unwrap(),
        _ => return Err(JetError::NotHomogeneous),
    };
    from_contact_form_with(rho, s, ctx)
}

/// Horizontal `(n-s)`-form as a rank-0 morphism of codegree `s`.
pub fn from_horizontal_form(f: &Form, s: usize, ctx: &BundleContext) -> Result<VariationalMorphism> {
    let n = ctx.n;
    let mut t = CoefficientTensor::new(n, s);
    let sfact = factorial(s) as i64;
    for (w, c) in f.terms() {
        if w.iter().any(|cv| cv.is_contact()) || w.len() + s != n as usize {
            return Err(JetError::NotHomogeneous);
        }
        let d: Vec<u8> = w
            .iter()
            .map(|cv| match cv {
                Covector::Dx(i) => *i,
                _ => unreachable!(),
            })
            .collect();
        let (b, eps) = horizontal_to_ds(n, &d);
        spread(&mut t, 0, &b, &MultiIndex::empty(), &c.scale(&q(eps, sfact)));
    }
    Ok(VariationalMorphism::new(retag_sigma(t), 0))
}

// rank-0 horizontal data has no fiber index; store it under σ = 1
fn retag_sigma(t: CoefficientTensor) -> CoefficientTensor {
    let mut out = CoefficientTensor::new(t.n, t.s);
    for (_, tup, e) in t.iter() {
        out.add_to(1, tup, e);
    }
    out
}

/// `Div Q` for a rank-0 morphism of codegree `s ≥ 1`, through `d_H`.
/// Here `Q` is read as the horizontal form `Σ Q^b ds_b` (σ ignored).
pub fn divergence(qm: &VariationalMorphism, ctx: &BundleContext) -> Result<VariationalMorphism> {
    if qm.s == 0 {
        return Err(JetError::UnsupportedCase("divergence needs codegree s >= 1".into()));
    }
    let mut f = Form::zero();
    for (_, tup, a) in qm.coeffs.iter() {
        if tup.len() == qm.s {
            f = f.add(&Form::ds(ctx.n, tup).mul_expr(a));
        }
    }
    from_horizontal_form(&f.d_h(ctx), qm.s - 1, ctx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Canonical,
    SplitLike,
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub volume: VariationalMorphism,
    pub boundary: VariationalMorphism,
    pub flavor: Flavor,
}

impl SplitResult {
    /// `⟨V|Ξ⟩ - ⟨E|Ξ⟩ - Div⟨T|Ξ⟩`; zero when the splitting is correct.
    pub fn defect(&self, v: &VariationalMorphism, xi: &[Expr], ctx: &BundleContext) -> Form {
        v.evaluate(xi, ctx)
            .sub(&self.volume.evaluate(xi, ctx))
            .sub(&self.boundary.evaluate(xi, ctx).d_h(ctx))
    }
}

fn dsum(t: &CoefficientTensor, sigma: u8, prefix: &[u8], suffix: &[u8], ctx: &BundleContext) -> Expr {
    // Σ_k d_k t[prefix, k, suffix]
    let mut acc = Expr::zero();
    for k in 1..=ctx.n {
        let mut key = prefix.to_vec();
        key.push(k);
        key.extend_from_slice(suffix);
        let v = t.get(sigma, &key);
        if !v.is_zero() {
            acc = &acc + &v.total_derivative(k, ctx);
        }
    }
    acc
}

/// Codegree-0 canonical splitting: `e_σ = Σ_J (-1)^|J| d_J A^J_σ` and the
/// boundary recurrence `t^{iL} = A^{iL} - d_l t^{liL}`.
pub fn split_codegree0(v: &VariationalMorphism, ctx: &BundleContext) -> Result<SplitResult> {
    if v.s != 0 {
        return Err(JetError::UnsupportedCase(format!("codegree-0 splitting given codegree {}", v.s)));
    }
    let n = ctx.n;
    let r = v.r;
    let mut e = CoefficientTensor::new(n, 0);
    for (sigma, tup, a) in v.coeffs.iter() {
        let d = a.total_derivative_multi(tup, ctx);
        let d = if tup.len() % 2 == 1 { -d } else { d };
        e.add_to(sigma, &[], &d);
    }
    let mut t = CoefficientTensor::new(n, 1);
    for len in (1..=r).rev() {
        for tup in tuples(n, len) {
            for sigma in 1..=ctx.m {
                let val = &v.get(sigma, &tup) - &dsum(&t, sigma, &[], &tup, ctx);
                t.set(sigma, &tup, val);
            }
        }
    }
    Ok(SplitResult {
        volume: VariationalMorphism::new(e, 0),
        boundary: VariationalMorphism::new(t, r.saturating_sub(1)),
        flavor: Flavor::Canonical,
    })
}

/// The splitting read off the integration-by-parts decomposition:
/// `t̂^{b i L} = A^{[b i] L} - d_k t̂^{b i L k}`, `T' = t̂/(s+1)` and
/// `ê^{bJ} = A^{bJ} - d_i t̂^{b i J} - t̂^{bJ}` (the last term only for `|J| ≥ 1`).
/// Volume coefficients keep their exact, non-symmetric tuple keys.
pub fn split_like(v: &VariationalMorphism, ctx: &BundleContext) -> Result<SplitResult> {
    let n = ctx.n;
    let s = v.s;
    let r = v.r;
    let block: Vec<usize> = (0..=s).collect();
    let anti = v.coeffs.antisymmetrize(&block);
    let mut that = CoefficientTensor::new(n, s + 1);
    if r >= 1 {
        for len in (s + 1..=s + r).rev() {
            for tup in tuples(n, len) {
                if sort_with_sign(&tup[..s + 1]).is_none() {
                    continue;
                }
                for sigma in 1..=ctx.m {
                    let val = &anti.get(sigma, &tup) - &dsum(&that, sigma, &tup, &[], ctx);
                    that.set(sigma, &tup, val);
                }
            }
        }
    }
    let mut e = CoefficientTensor::new(n, s);
    for len in s..=s + r {
        for tup in tuples(n, len) {
            if sort_with_sign(&tup[..s]).is_none() {
                continue;
            }
            for sigma in 1..=ctx.m {
                let mut val = &v.get(sigma, &tup) - &dsum(&that, sigma, &tup[..s], &tup[s..], ctx);
                if len > s {
                    val = &val - &that.get(sigma, &tup);
                }
                e.set(sigma, &tup, val);
            }
        }
    }
    let tprime = that.scale(&q(1, s as i64 + 1));
    Ok(SplitResult {
        volume: VariationalMorphism::new(e, r),
        boundary: VariationalMorphism::new(tprime, r.saturating_sub(1)),
        flavor: Flavor::SplitLike,
    })
}

/// Canonical codegree-`s` splitting for the explicitly known cases:
/// rank 1 with any codegree, and rank 2 with codegree 1.
pub fn split_canonical_codegree_s(v: &VariationalMorphism, ctx: &BundleContext) -> Result<SplitResult> {
    match (v.r, v.s) {
        (1, s) => Ok(canonical_rank1(v, s, ctx)),
        (2, 1) => Ok(canonical_rank2_codegree1(v, ctx)),
        (r, s) => Err(JetError::UnsupportedCase(format!("canonical splitting for rank {} and codegree {}", r, s))),
    }
}

fn canonical_rank1(v: &VariationalMorphism, s: usize, ctx: &BundleContext) -> SplitResult {
    let n = ctx.n;
    let block: Vec<usize> = (0..=s).collect();
    let anti = v.coeffs.antisymmetrize(&block);
    let mut e = CoefficientTensor::new(n, s);
    let mut t = CoefficientTensor::new(n, s + 1);
    for b in tuples(n, s) {
        if sort_with_sign(&b).is_none() {
            continue;
        }
        for sigma in 1..=ctx.m {
            // E^b = A^b - d_k A^{[bk]}
            let val = &v.get(sigma, &b) - &dsum(&anti, sigma, &b, &[], ctx);
            e.set(sigma, &b, val);
            for j in 1..=n {
                let mut key = b.clone();
                key.push(j);
                // E^{bj} = A^{bj} - A^{[bj]},  T^{bj} = A^{[bj]}/(s+1)
                e.set(sigma, &key, &v.get(sigma, &key) - &anti.get(sigma, &key));
                t.set(sigma, &key, anti.get(sigma, &key).scale(&q(1, s as i64 + 1)));
            }
        }
    }
    SplitResult {
        volume: VariationalMorphism::new(e, 1),
        boundary: VariationalMorphism::new(t, 0),
        flavor: Flavor::Canonical,
    }
}

fn canonical_rank2_codegree1(v: &VariationalMorphism, ctx: &BundleContext) -> SplitResult {
    let n = ctx.n;
    let a = &v.coeffs;
    let anti = a.antisymmetrize(&[0, 1]);
    let sym2 = a.symmetrize(&[0, 1]);
    let sym3 = a.symmetrize(&[0, 1, 2]);
    let two3 = q(2, 3);
    let mut e = CoefficientTensor::new(n, 1);
    let mut t = CoefficientTensor::new(n, 2);
    for sigma in 1..=ctx.m {
        for i in 1..=n {
            // A^i - d_a A^{[ia]} + 2/3 d_b d_a A^{[ib]a}; the sign is fixed by E' - E = -𝒟α
            let mut e0 = &a.get(sigma, &[i]) - &dsum(&anti, sigma, &[i], &[], ctx);
            for bb in 1..=n {
                for aa in 1..=n {
                    let x = anti.get(sigma, &[i, bb, aa]);
                    if !x.is_zero() {
                        e0 = &e0 + &x.total_derivative(aa, ctx).total_derivative(bb, ctx).scale(&two3);
                    }
                }
            }
            e.set(sigma, &[i], e0);
            for j1 in 1..=n {
                // A^{(ij)} + 2/3 d_a A^{aij} - 2/3 d_a A^{(ij)a}
                let mut e1 = sym2.get(sigma, &[i, j1]);
                for aa in 1..=n {
                    let x = &a.get(sigma, &[aa, i, j1]) - &sym2.get(sigma, &[i, j1, aa]);
                    if !x.is_zero() {
                        e1 = &e1 + &x.total_derivative(aa, ctx).scale(&two3);
                    }
                }
                e.set(sigma, &[i, j1], e1);
                for j2 in 1..=n {
                    e.set(sigma, &[i, j1, j2], sym3.get(sigma, &[i, j1, j2]));
                }
            }
            for i2 in 1..=n {
                // 1/2 (A^{[i i2]} - 2/3 d_a A^{[i i2]a}) and 1/2 * 4/3 A^{[i i2]j}
                let t0 = &anti.get(sigma, &[i, i2]) - &dsum(&anti, sigma, &[i, i2], &[], ctx).scale(&two3);
                t.set(sigma, &[i, i2], t0.scale(&q(1, 2)));
                for j in 1..=n {
                    t.set(sigma, &[i, i2, j], anti.get(sigma, &[i, i2, j]).scale(&two3));
                }
            }
        }
    }
    SplitResult {
        volume: VariationalMorphism::new(e, 2),
        boundary: VariationalMorphism::new(t, 1),
        flavor: Flavor::Canonical,
    }
}

/// Discrepancy between the two rank-2 codegree-1 splittings:
/// `α = T' - T` and `𝒟α` with `⟨𝒟α|J²Ξ⟩ = Div⟨α|J¹Ξ⟩`.
#[derive(Clone, Debug)]
pub struct AlphaResult {
    pub alpha: VariationalMorphism,
    pub d_alpha: VariationalMorphism,
    pub canonical: SplitResult,
    pub like: SplitResult,
}

pub fn alpha_discrepancy(v: &VariationalMorphism, ctx: &BundleContext) -> Result<AlphaResult> {
    if (v.r, v.s) != (2, 1) {
        return Err(JetError::UnsupportedCase(format!("alpha needs rank 2, codegree 1; got rank {}, codegree {}", v.r, v.s)));
    }
    let canonical = split_canonical_codegree_s(v, ctx)?;
    let like = split_like(v, ctx)?;
    let alpha = like.boundary.sub(&canonical.boundary);
    let dform = alpha.to_contact_form(FormSign::Plain).d_h(ctx).neg();
    let d_alpha = from_contact_form_with(&dform, 1, ctx)?;
    Ok(AlphaResult {
        alpha,
        d_alpha,
        canonical,
        like,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn read_off_simple_forms() {
        let c = BundleContext::new(1, 1, 1);
        let rho = Form::omega(1, &[]).wedge(&Form::ds(1, &[]));
        let v = from_contact_form(&rho, &c).unwrap();
        assert_eq!(v.get(1, &[]), Expr::one());
        let rho = Form::omega(1, &[1]).wedge(&Form::dx(1)).mul_expr(&Expr::y(1, &[1]));
        let v = from_contact_form(&rho, &c).unwrap();
        assert_eq!(v.get(1, &[1]), Expr::y(1, &[1]));
        assert_eq!(v.to_contact_form(FormSign::Plain), rho);
    }

    #[test]
    fn boundary_sign() {
        let c = BundleContext::new(2, 1, 1);
        let mut t = CoefficientTensor::new(2, 1);
        t.set(1, &[1], Expr::one());
        let tm = VariationalMorphism::new(t, 0);
        assert_eq!(tm.to_contact_form(FormSign::Boundary), Form::omega(1, &[]).wedge(&Form::ds(2, &[1])).neg());
        assert!(VariationalMorphism::zero(2, 1, 0).to_contact_form(FormSign::Boundary).is_zero());
        let _ = c;
    }

    #[test]
    fn round_trip_random() {
        let c = BundleContext::new(3, 2, 2);
        let mut rng = corpus::rng(3);
        for s in 0..3 {
            let rho = corpus::form(&mut rng, &c, 2, 3 - s, 1, 4, 2);
            let v = from_contact_form(&rho, &c).unwrap();
            assert_eq!(v.to_contact_form(FormSign::Plain), rho);
            let xi = corpus::generic_xi(&c);
            assert_eq!(v.evaluate(&xi, &c), rho.contract_prolonged(&xi, &c));
        }
    }

    #[test]
    fn codegree0_rank1() {
        let c = BundleContext::new(2, 1, 1);
        let a = corpus::generic_tensor(&c, 0, 1, 1);
        let v = VariationalMorphism::new(a.clone(), 1);
        let sp = split_codegree0(&v, &c).unwrap();
        let expect = &a.get(1, &[]) - &(&a.get(1, &[1]).total_derivative(1, &c) + &a.get(1, &[2]).total_derivative(2, &c));
        assert_eq!(sp.volume.get(1, &[]), expect);
        assert_eq!(sp.boundary.get(1, &[2]), a.get(1, &[2]));
        assert!(sp.defect(&v, &corpus::generic_xi(&c), &c).is_zero());
    }

    #[test]
    fn divergence_twice_vanishes() {
        let c = BundleContext::new(3, 1, 1);
        let mut rng = corpus::rng(5);
        let f = corpus::form(&mut rng, &c, 1, 1, 0, 3, 2);
        let qm = from_horizontal_form(&f, 2, &c).unwrap();
        let d1 = divergence(&qm, &c).unwrap();
        let d2 = divergence(&d1, &c).unwrap();
        assert!(d2.is_zero());
    }

    #[test]
    fn split_like_identity() {
        for (n, s, r) in [(2u8, 1usize, 1usize), (2, 1, 2), (3, 2, 1), (2, 0, 2)] {
            let c = BundleContext::new(n, 1, r as u8);
            let v = VariationalMorphism::new(corpus::generic_tensor(&c, s, r, 1), r);
            let sp = split_like(&v, &c).unwrap();
            assert!(sp.defect(&v, &corpus::generic_xi(&c), &c).is_zero(), "n={} s={} r={}", n, s, r);
        }
    }

    #[test]
    fn canonical_identities_and_reducedness() {
        for (n, s, r) in [(2u8, 1usize, 1usize), (3, 2, 1), (2, 1, 2), (3, 1, 2)] {
            let c = BundleContext::new(n, 1, r as u8);
            let v = VariationalMorphism::new(corpus::generic_tensor(&c, s, r, 1), r);
            let sp = split_canonical_codegree_s(&v, &c).unwrap();
            assert!(sp.defect(&v, &corpus::generic_xi(&c), &c).is_zero(), "n={} s={} r={}", n, s, r);
            assert!(sp.volume.is_reduced());
        }
        let c = BundleContext::new(3, 1, 3);
        let v = VariationalMorphism::new(corpus::generic_tensor(&c, 1, 3, 0), 3);
        assert!(matches!(split_canonical_codegree_s(&v, &c), Err(JetError::UnsupportedCase(_))));
    }

    #[test]
    fn rank1_splittings_agree() {
        let c = BundleContext::new(3, 1, 1);
        let v = VariationalMorphism::new(corpus::generic_tensor(&c, 1, 1, 1), 1);
        let a = split_like(&v, &c).unwrap();
        let b = split_canonical_codegree_s(&v, &c).unwrap();
        assert_eq!(a.volume.to_contact_form(FormSign::Plain), b.volume.to_contact_form(FormSign::Plain));
        assert_eq!(a.boundary, b.boundary);
    }

    #[test]
    fn alpha_closes_the_gap() {
        let c = BundleContext::new(2, 1, 2);
        let v = VariationalMorphism::new(corpus::generic_tensor(&c, 1, 2, 1), 2);
        let res = alpha_discrepancy(&v, &c).unwrap();
        let gap = res.like.volume.to_contact_form(FormSign::Plain).sub(&res.canonical.volume.to_contact_form(FormSign::Plain));
        assert_eq!(gap, res.d_alpha.to_contact_form(FormSign::Plain).neg());
        let anti = v.coeffs.antisymmetrize(&[0, 1]);
        let sixth = q(-1, 6);
        assert_eq!(res.alpha.get(1, &[1, 2, 1]), anti.get(1, &[1, 2, 1]).scale(&sixth));
        let d = &anti.get(1, &[1, 2, 1]).total_derivative(1, &c) + &anti.get(1, &[1, 2, 2]).total_derivative(2, &c);
        assert_eq!(res.alpha.get(1, &[1, 2]), d.scale(&sixth));
    }
}
