//! Lagrangians, the Euler–Lagrange form and Lepage equivalents built by the
//! recurrence `ρ_q = ρ_{q-1} - p_q 𝓡(dρ_{q-1})`.

use crate::error::{JetError, Result};
use crate::forms::{Covector, Form};
use crate::interior_euler::{eta_decompose, ibp_from_eta, interior_euler, residual_from_xi, EtaDecomposition};
use crate::multiindex::{factorial, tuple_multiplicity, MultiIndex};
use crate::symexpr::{q, BundleContext, Coord, Expr};

/// How the `|J| = 1` derivative terms of `p_q dρ_{q-1}` are grouped when
/// integrating by parts at second order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbpPolicy {
    /// The new `ω_j` leads only when the old factor already carries a
    /// derivative contact form.
    Plain,
    /// Every `ω_j` produced by differentiation leads.
    Generalized,
    /// Each term is shared equally among its contact factors. At first
    /// order this gives the `1/(q!)^2` weighting, which is closed for
    /// null Lagrangians.
    Symmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    pub density: Expr,
    pub order: usize,
}

impl Lagrangian {
    pub fn new(density: Expr) -> Result<Self> {
        let order = density.order().max(1);
        if order > 2 {
            return Err(JetError::UnsupportedOrder(order));
        }
        Ok(Lagrangian { density, order })
    }

    /// `λ = 𝓛 ds`.
    pub fn form(&self, ctx: &BundleContext) -> Form {
        Form::ds(ctx.n, &[]).mul_expr(&self.density)
    }

    /// `∂𝓛/∂y^σ_J` for an ordered tuple `J`: the sorted partial shared among
    /// the orderings.
    pub fn momentum(&self, sigma: u8, j: &[u8]) -> Expr {
        dpart(&self.density, sigma, j)
    }

    /// `f^j_σ = p^j_σ - d_k p^{jk}_σ`.
    pub fn f1(&self, sigma: u8, j: u8, ctx: &BundleContext) -> Expr {
        let mut out = self.momentum(sigma, &[j]);
        for k in 1..=ctx.n {
            out = &out - &self.momentum(sigma, &[j, k]).total_derivative(k, ctx);
        }
        out
    }
}

fn dpart(e: &Expr, sigma: u8, j: &[u8]) -> Expr {
    let mi = MultiIndex::new(j);
    let d = e.partial(&Coord::Y(sigma, mi.clone()));
    let m = tuple_multiplicity(&mi) as i64;
    if m == 1 {
        d
    } else {
        d.scale(&q(1, m))
    }
}

/// `E(λ) = 𝓘(dλ)`.
pub fn euler_lagrange(l: &Lagrangian, ctx: &BundleContext) -> Result<Form> {
    interior_euler(&l.form(ctx).exterior_d(ctx), 1, ctx)
}

/// Groups `p_q dρ` by a leading contact factor. For each term `c W` of the
/// `(q-1)`-contact part and each `y_J` in `c`, the summand `∂c/∂y_J ω_J ∧ W`
/// goes to `η^J` when `ω_J` leads, or to `η^L` as `-∂c ω_J ∧ ι_L W` when the
/// first lowest-order factor `ω_L` of `W` leads.
pub fn leading_eta(rho: &Form, qdeg: usize, policy: IbpPolicy, ctx: &BundleContext) -> EtaDecomposition {
    let mut eta = EtaDecomposition::new(qdeg);
    for (w, c) in rho.p(qdeg - 1).terms() {
        let lowest = w
            .iter()
            .filter_map(|cv| match cv {
                Covector::Omega(s, l) => Some((l.len(), *s, l.clone())),
                _ => None,
            })
            .min_by_key(|(o, _, _)| *o);
        for y in c.fiber_dependencies(ctx) {
            let Coord::Y(sigma, j) = y.clone() else { continue };
            let dc = c.partial(&y);
            if dc.is_zero() {
                continue;
            }
            let wf = Form::term(dc, w.clone());
            let derivative_leads = match &lowest {
                None => true,
                Some((o, _, _)) => {
                    let one_allowed = j.len() == 1
                        && match policy {
                            IbpPolicy::Generalized | IbpPolicy::Symmetric => true,
                            IbpPolicy::Plain => w.iter().any(|cv| matches!(cv, Covector::Omega(_, l) if !l.is_empty())),
                        };
                    one_allowed || j.len() <= *o
                }
            };
            if derivative_leads {
                eta.add(sigma, j, &wf);
            } else {
                let (_, ls, l) = lowest.clone().unwrap();
                let rest = wf.contract_omega(ls, &l);
                eta.add(ls, l, &Form::omega(sigma, j.entries()).wedge(&rest).neg());
            }
        }
    }
    eta.entries.retain(|_, f| !f.is_zero());
    eta
}

/// One step `ρ_q = ρ_{q-1} - p_q 𝓡(dρ_{q-1})`.
pub fn rossi_step(prev: &Form, qdeg: usize, policy: IbpPolicy, ctx: &BundleContext) -> Result<Form> {
    let target = prev.exterior_d(ctx).p(qdeg);
    let eta = match policy {
        IbpPolicy::Symmetric => eta_decompose(&target, qdeg)?,
        _ => leading_eta(prev, qdeg, policy, ctx),
    };
    let diff = eta.recompose().sub(&target);
    if !diff.is_zero() {
        return Err(JetError::RecompositionFailure(format!("{:?}", diff)));
    }
    let fam = ibp_from_eta(&eta, &target, qdeg - 1, ctx)?;
    let res = residual_from_xi(&fam, ctx).p(qdeg);
    Ok(prev.sub(&res))
}

/// `[ρ_1, …, ρ_n]`. The policy only matters for second-order Lagrangians.
pub fn rossi_sequence(l: &Lagrangian, policy: IbpPolicy, ctx: &BundleContext) -> Result<Vec<Form>> {
    let mut out = Vec::new();
    let mut rho = l.form(ctx);
    for qdeg in 1..=ctx.n as usize {
        rho = rossi_step(&rho, qdeg, policy, ctx)?;
        out.push(rho.clone());
    }
    Ok(out)
}

/// Poincaré–Cartan form from the first step of the recurrence.
pub fn poincare_cartan(l: &Lagrangian, ctx: &BundleContext) -> Result<Form> {
    rossi_step(&l.form(ctx), 1, IbpPolicy::Plain, ctx)
}

/// `𝓛ds + f^j ω ∧ ds_j + p^{jk} ω_k ∧ ds_j`.
pub fn poincare_cartan_closed(l: &Lagrangian, ctx: &BundleContext) -> Form {
    let mut out = l.form(ctx);
    for sigma in 1..=ctx.m {
        for j in 1..=ctx.n {
            let ds = Form::ds(ctx.n, &[j]);
            out = out.add(&Form::omega(sigma, &[]).wedge(&ds).mul_expr(&l.f1(sigma, j, ctx)));
            if l.order == 2 {
                for k in 1..=ctx.n {
                    out = out.add(&Form::omega(sigma, &[k]).wedge(&ds).mul_expr(&l.momentum(sigma, &[j, k])));
                }
            }
        }
    }
    out
}

/// Σ over chains of distinct `(σ_a, i_a)` pairs of `1/q! ∂^q g ω…ω ∧ last ∧ ds_{i…}`,
/// where `g` is differentiated by `y^{σ_a}_{i_a}` and `last(g)` supplies the
/// final factor. Repeated `σ` or `i` give zero wedges and are pruned.
fn chain_sum(
    g: &Expr,
    depth: usize,
    prefix: &mut Vec<(u8, u8)>,
    ctx: &BundleContext,
    weight: &dyn Fn(usize) -> i64,
    tail: &dyn Fn(&Expr, &[(u8, u8)]) -> Form,
    out: &mut Form,
) {
    if g.is_zero() {
        return;
    }
    let t = tail(g, prefix);
    if !t.is_zero() {
        *out = out.add(&t.scale(&q(1, weight(prefix.len()))));
    }
    if depth == 0 {
        return;
    }
    for sigma in 1..=ctx.m {
        for i in 1..=ctx.n {
            if prefix.iter().any(|&(s, j)| s == sigma || j == i) {
                continue;
            }
            let d = g.partial(&Coord::Y(sigma, MultiIndex::new(&[i])));
            prefix.push((sigma, i));
            chain_sum(&d, depth - 1, prefix, ctx, weight, tail, out);
            prefix.pop();
        }
    }
}

fn omegas(prefix: &[(u8, u8)]) -> Form {
    let mut f = Form::scalar(Expr::one());
    for &(s, _) in prefix {
        f = f.wedge(&Form::omega(s, &[]));
    }
    f
}

fn block(prefix: &[(u8, u8)]) -> Vec<u8> {
    prefix.iter().map(|&(_, i)| i).collect()
}

/// First-order Krupka–Betounes form
/// `𝓛ds + Σ_q 1/q! ∂^q𝓛/∂y^{σ_1}_{i_1}…∂y^{σ_q}_{i_q} ω^{σ_1}∧…∧ω^{σ_q}∧ds_{i_1…i_q}`.
pub fn krupka_betounes_first(l: &Lagrangian, ctx: &BundleContext) -> Result<Form> {
    if l.order != 1 {
        return Err(JetError::UnsupportedOrder(l.order));
    }
    let mut out = Form::zero();
    let n = ctx.n;
    chain_sum(
        &l.density,
        n as usize,
        &mut Vec::new(),
        ctx,
        &|k| factorial(k) as i64,
        &|g, pre| omegas(pre).wedge(&Form::ds(n, &block(pre))).mul_expr(g),
        &mut out,
    );
    Ok(out)
}

/// The same sum weighted by `1/(q!)^2`; the terminal form of the recurrence
/// under [`IbpPolicy::Symmetric`].
pub fn krupka_betounes_symmetric(l: &Lagrangian, ctx: &BundleContext) -> Result<Form> {
    if l.order != 1 {
        return Err(JetError::UnsupportedOrder(l.order));
    }
    let mut out = Form::zero();
    let n = ctx.n;
    chain_sum(
        &l.density,
        n as usize,
        &mut Vec::new(),
        ctx,
        &|k| (factorial(k) * factorial(k)) as i64,
        &|g, pre| omegas(pre).wedge(&Form::ds(n, &block(pre))).mul_expr(g),
        &mut out,
    );
    Ok(out)
}

/// Closed forms of the second-order recurrence. `Plain` gives
/// `𝓛ds + f^iω∧ds_i + Σ_q 1/q! ∂^q𝓛/∂y_{i_1}…∂y_{i_{q-1}}∂y_{i_q j} ω…ω∧ω_j∧ds_{i_1…i_q}`;
/// `Generalized` adds `Σ_q 1/(q+1)! ∂^q f^{i_{q+1}}/∂y_{i_1}…∂y_{i_q} ω…ω∧ω∧ds_{i_1…i_{q+1}}`.
pub fn kb_second_order(l: &Lagrangian, policy: IbpPolicy, ctx: &BundleContext) -> Result<Form> {
    if policy == IbpPolicy::Symmetric {
        return Err(JetError::UnsupportedCase("no second-order closed form for the symmetric grouping".into()));
    }
    let n = ctx.n;
    let m = ctx.m;
    let mut out = l.form(ctx);
    for sigma in 1..=m {
        for i in 1..=n {
            out = out.add(&Form::omega(sigma, &[]).wedge(&Form::ds(n, &[i])).mul_expr(&l.f1(sigma, i, ctx)));
        }
    }
    // Σ_{q≥1}: the prefix carries q-1 first-order derivatives.
    chain_sum(
        &l.density,
        n as usize - 1,
        &mut Vec::new(),
        ctx,
        &|k| factorial(k + 1) as i64,
        &|g, pre| {
            let mut acc = Form::zero();
            for sigma in 1..=m {
                for i in 1..=n {
                    if pre.iter().any(|&(_, a)| a == i) {
                        continue;
                    }
                    let mut b = block(pre);
                    b.push(i);
                    let ds = Form::ds(n, &b);
                    for j in 1..=n {
                        let c = dpart(g, sigma, &[i, j]);
                        if !c.is_zero() {
                            acc = acc.add(&omegas(pre).wedge(&Form::omega(sigma, &[j])).wedge(&ds).mul_expr(&c));
                        }
                    }
                }
            }
            acc
        },
        &mut out,
    );
    if policy == IbpPolicy::Generalized {
        for sigma in 1..=m {
            for i in 1..=n {
                let f = l.f1(sigma, i, ctx);
                let mut extra = Form::zero();
                chain_sum(
                    &f,
                    n as usize - 1,
                    &mut Vec::new(),
                    ctx,
                    &|k| factorial(k + 1) as i64,
                    &|g, pre| {
                        if pre.is_empty() || pre.iter().any(|&(_, a)| a == i) {
                            return Form::zero();
                        }
                        let mut b = block(pre);
                        b.push(i);
                        omegas(pre).wedge(&Form::omega(sigma, &[])).wedge(&Form::ds(n, &b)).mul_expr(g)
                    },
                    &mut extra,
                );
                out = out.add(&extra);
            }
        }
    }
    Ok(out)
}

/// `ρ_2 = 𝓛ds + f^iω∧ds_i + f^{ij}ω_j∧ds_i + ½∂^{i_1}f^{i_2j_2}ω∧ω_{j_2}∧ds_{i_1i_2}`.
pub fn rho2_displayed(l: &Lagrangian, ctx: &BundleContext) -> Form {
    let n = ctx.n;
    let mut out = poincare_cartan_closed(l, ctx);
    for s1 in 1..=ctx.m {
        for s2 in 1..=ctx.m {
            for i1 in 1..=n {
                for i2 in 1..=n {
                    let ds = Form::ds(n, &[i1, i2]);
                    if ds.is_zero() {
                        continue;
                    }
                    for j2 in 1..=n {
                        let c = dpart(&l.momentum(s2, &[i2, j2]), s1, &[i1]).scale(&q(1, 2));
                        if !c.is_zero() {
                            out = out.add(&Form::omega(s1, &[]).wedge(&Form::omega(s2, &[j2])).wedge(&ds).mul_expr(&c));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Defects of the Lepage conditions: `p_0ρ - λ` and `p_1dρ - E(λ)`.
#[derive(Clone, Debug)]
pub struct LepageReport {
    pub horizontal_defect: Form,
    pub source_defect: Form,
}

impl LepageReport {
    pub fn holds(&self) -> bool {
        self.horizontal_defect.is_zero() && self.source_defect.is_zero()
    }
}

pub fn lepage_check(rho: &Form, l: &Lagrangian, ctx: &BundleContext) -> Result<LepageReport> {
    let el = euler_lagrange(l, ctx)?;
    Ok(LepageReport {
        horizontal_defect: rho.p(0).sub(&l.form(ctx)),
        source_defect: rho.exterior_d(ctx).p(1).sub(&el),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn y(s: u8, j: &[u8]) -> Expr {
        Expr::y(s, j)
    }

    #[test]
    fn free_particle_el() {
        let c = BundleContext::new(1, 1, 2);
        let l = Lagrangian::new(y(1, &[1]).pow(2).scale(&q(1, 2))).unwrap();
        let el = euler_lagrange(&l, &c).unwrap();
        assert_eq!(el, Form::omega(1, &[]).wedge(&Form::dx(1)).mul_expr(&y(1, &[1, 1])).neg());
    }

    #[test]
    fn poincare_cartan_matches_closed_form() {
        let c = BundleContext::new(2, 1, 3);
        let l = Lagrangian::new(&(&y(1, &[1, 1]) * &y(1, &[2])) + &y(1, &[1, 2]).pow(2)).unwrap();
        assert_eq!(poincare_cartan(&l, &c).unwrap(), poincare_cartan_closed(&l, &c));
        assert!(lepage_check(&poincare_cartan_closed(&l, &c), &l, &c).unwrap().holds());
    }

    #[test]
    fn kb_first_order_recurrence() {
        for (n, m, seed) in [(2u8, 1u8, 1u64), (2, 2, 2), (3, 1, 3), (3, 2, 4)] {
            let c = BundleContext::new(n, m, 2);
            let mut rng = corpus::rng(seed);
            let l = Lagrangian::new(corpus::poly(&mut rng, &c, 1, 3, 4)).unwrap();
            let seq = rossi_sequence(&l, IbpPolicy::Generalized, &c).unwrap();
            let kb = krupka_betounes_first(&l, &c).unwrap();
            assert_eq!(seq.last().unwrap(), &kb, "n={} m={}", n, m);
            assert!(lepage_check(&kb, &l, &c).unwrap().holds());
        }
    }

    #[test]
    fn second_order_rho2() {
        let c = BundleContext::new(2, 1, 4);
        let mut rng = corpus::rng(11);
        let l = Lagrangian::new(&corpus::poly(&mut rng, &c, 2, 2, 3) + &(&y(1, &[1, 2]) * &y(1, &[1]))).unwrap();
        let seq = rossi_sequence(&l, IbpPolicy::Plain, &c).unwrap();
        assert_eq!(seq[1], rho2_displayed(&l, &c));
    }

    #[test]
    fn third_order_is_rejected() {
        assert!(matches!(Lagrangian::new(y(1, &[1, 1, 1])), Err(JetError::UnsupportedOrder(3))));
    }

    #[test]
    fn second_order_closed_forms() {
        for (n, m, seed) in [(2u8, 1u8, 5u64), (3, 1, 6), (2, 2, 7)] {
            let c = BundleContext::new(n, m, 4);
            let mut rng = corpus::rng(seed);
            let l = Lagrangian::new(&corpus::poly(&mut rng, &c, 2, 3, 4) + &(&y(1, &[1, 2]) * &y(1, &[1]))).unwrap();
            for policy in [IbpPolicy::Plain, IbpPolicy::Generalized] {
                let seq = rossi_sequence(&l, policy, &c).unwrap();
                let closed = kb_second_order(&l, policy, &c).unwrap();
                assert_eq!(seq.last().unwrap(), &closed, "n={} m={} {:?}", n, m, policy);
            }
        }
    }

    #[test]
    fn symmetric_grouping_closes_null_lagrangians() {
        let c = BundleContext::new(2, 2, 2);
        let jac2 = &(&y(1, &[1]) * &y(2, &[2])) - &(&y(1, &[2]) * &y(2, &[1]));
        let l = Lagrangian::new(jac2).unwrap();
        let rho = rossi_sequence(&l, IbpPolicy::Symmetric, &c).unwrap().pop().unwrap();
        assert_eq!(rho, krupka_betounes_symmetric(&l, &c).unwrap());
        // u_1 v_2 - u_2 v_1 = d(u dv) horizontally; its equivalent is du ∧ dv
        assert!(rho.exterior_d(&c).is_zero());
        assert!(!krupka_betounes_first(&l, &c).unwrap().exterior_d(&c).is_zero());

        let c = BundleContext::new(3, 3, 2);
        let mut det = Expr::zero();
        for (p, sign) in [([1, 2, 3], 1), ([2, 3, 1], 1), ([3, 1, 2], 1), ([1, 3, 2], -1), ([3, 2, 1], -1), ([2, 1, 3], -1)] {
            let t = &(&y(1, &[p[0]]) * &y(2, &[p[1]])) * &y(3, &[p[2]]);
            det = &det + &t.scale(&q(sign, 1));
        }
        let l = Lagrangian::new(det).unwrap();
        let rho = krupka_betounes_symmetric(&l, &c).unwrap();
        assert!(rho.exterior_d(&c).is_zero());
        assert!(lepage_check(&rho, &l, &c).unwrap().holds());
    }

    #[test]
    fn symmetric_recurrence_matches_closed_form() {
        for (n, m, seed) in [(2u8, 2u8, 21u64), (3, 2, 22)] {
            let c = BundleContext::new(n, m, 2);
            let mut rng = corpus::rng(seed);
            let l = Lagrangian::new(corpus::poly(&mut rng, &c, 1, 3, 4)).unwrap();
            let seq = rossi_sequence(&l, IbpPolicy::Symmetric, &c).unwrap();
            assert_eq!(seq.last().unwrap(), &krupka_betounes_symmetric(&l, &c).unwrap(), "n={} m={}", n, m);
        }
    }
}
