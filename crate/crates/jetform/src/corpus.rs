//! Seeded random and generic inputs for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::{Covector, Form};
use crate::multiindex::{orderings, permutations, sort_with_sign, tuples, CoefficientTensor, MultiIndex};
use crate::symexpr::{BundleContext, Coord, Expr};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates available at a given order (base coordinates included).
pub fn coords(ctx: &BundleContext, order: usize) -> Vec<Coord> {
    let mut v: Vec<Coord> = (1..=ctx.n).map(Coord::X).collect();
    v.extend(ctx.fiber_coords(order));
    v
}

/// Random polynomial with small integer coefficients.
pub fn poly(rng: &mut Rng8, ctx: &BundleContext, order: usize, degree: usize, nterms: usize) -> Expr {
    let cs = coords(ctx, order);
    let mut e = Expr::zero();
    for _ in 0..nterms {
        let d = rng.gen_range(0..=degree);
        let mut m = Expr::from_i64(rng.gen_range(-3..=3));
        for _ in 0..d {
            m = &m * &Expr::coord(cs.choose(rng).unwrap().clone());
        }
        e = &e + &m;
    }
    e
}

/// Like [`poly`] but without base coordinates.
pub fn fiber_poly(rng: &mut Rng8, ctx: &BundleContext, order: usize, degree: usize, nterms: usize) -> Expr {
    let cs = ctx.fiber_coords(order);
    let mut e = Expr::zero();
    for _ in 0..nterms {
        let d = rng.gen_range(0..=degree);
        let mut m = Expr::from_i64(rng.gen_range(-3..=3));
        for _ in 0..d {
            m = &m * &Expr::coord(cs.choose(rng).unwrap().clone());
        }
        e = &e + &m;
    }
    e
}

/// Random form with every term of horizontal degree `h` and contact degree `k`.
pub fn form(rng: &mut Rng8, ctx: &BundleContext, order: usize, h: usize, k: usize, nterms: usize, degree: usize) -> Form {
    let omegas: Vec<Covector> = ctx
        .fiber_coords(order)
        .into_iter()
        .map(|c| match c {
            Coord::Y(s, j) => Covector::Omega(s, j),
            _ => unreachable!(),
        })
        .collect();
    let dxs: Vec<Covector> = (1..=ctx.n).map(Covector::Dx).collect();
    let mut f = Form::zero();
    if h > dxs.len() || k > omegas.len() {
        return f;
    }
    for _ in 0..nterms {
        let mut w: Vec<Covector> = dxs.choose_multiple(rng, h).cloned().collect();
        w.extend(omegas.choose_multiple(rng, k).cloned());
        let c = poly(rng, ctx, order, degree, 2);
        f = f.add(&Form::term(c, w));
    }
    f
}

/// Random form mixing several bidegrees.
pub fn mixed_form(rng: &mut Rng8, ctx: &BundleContext, order: usize) -> Form {
    let mut f = Form::zero();
    for _ in 0..3 {
        let h = rng.gen_range(0..=ctx.n as usize);
        let k = rng.gen_range(0..=2);
        f = f.add(&form(rng, ctx, order, h, k, 2, 2));
    }
    f
}

/// Canonical tensor (antisymmetric block, symmetric `J`) with entries of
/// every length `s..=s+r`, filled by `value(σ, increasing block, sorted J)`.
pub fn canonical_tensor(ctx: &BundleContext, s: usize, r: usize, mut value: impl FnMut(u8, &[u8], &MultiIndex) -> Expr) -> CoefficientTensor {
    let mut t = CoefficientTensor::new(ctx.n, s);
    for len in 0..=r {
        for b in crate::multiindex::increasing(ctx.n, s) {
            for j in crate::multiindex::enumerate(ctx.n, len) {
                for sigma in 1..=ctx.m {
                    let v = value(sigma, &b, &j);
                    if v.is_zero() {
                        continue;
                    }
                    for (p, sg) in permutations(s) {
                        let pb: Vec<u8> = p.iter().map(|&a| b[a]).collect();
                        for jo in orderings(&j) {
                            let mut key = pb.clone();
                            key.extend(&jo);
                            t.set(sigma, &key, if sg < 0 { -&v } else { v.clone() });
                        }
                    }
                }
            }
        }
    }
    t
}

/// Generic symbolic coefficients `A^{bJ}_σ` depending on jets up to `order`.
pub fn generic_tensor(ctx: &BundleContext, s: usize, r: usize, order: u8) -> CoefficientTensor {
    canonical_tensor(ctx, s, r, |sigma, b, j| Expr::opaque("A", b, j.entries(), sigma, order))
}

/// Random polynomial coefficients, canonicalized.
pub fn random_tensor(rng: &mut Rng8, ctx: &BundleContext, s: usize, r: usize, order: usize) -> CoefficientTensor {
    canonical_tensor(ctx, s, r, |_, _, _| {
        if rng.gen_bool(0.25) {
            Expr::zero()
        } else {
            poly(rng, ctx, order, 2, 2)
        }
    })
}

/// Generic vertical field `Ξ^σ(x, y)`.
pub fn generic_xi(ctx: &BundleContext) -> Vec<Expr> {
    (1..=ctx.m).map(|s| Expr::opaque("Xi", &[], &[], s, 0)).collect()
}

/// Random polynomial vertical field of order 0.
pub fn random_xi(rng: &mut Rng8, ctx: &BundleContext) -> Vec<Expr> {
    (1..=ctx.m).map(|_| poly(rng, ctx, 0, 2, 3)).collect()
}

/// Every ordered tuple key `(σ, tuple)` for blocks of length `s` and `J` up to `r`.
pub fn all_keys(ctx: &BundleContext, s: usize, r: usize) -> Vec<(u8, Vec<u8>)> {
    let mut out = Vec::new();
    for len in s..=s + r {
        for t in tuples(ctx.n, len) {
            if sort_with_sign(&t[..s]).is_none() {
                continue;
            }
            for sigma in 1..=ctx.m {
                out.push((sigma, t.clone()));
            }
        }
    }
    out
}
