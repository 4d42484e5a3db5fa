//! Exact scalar algebra over jet coordinates.
//!
//! An [`Expr`] is a polynomial with rational coefficients whose atoms are jet
//! coordinates `x^i`, `y^σ_J`, or opaque function symbols carrying a list of
//! formal partial derivatives. The representation is always normalized, so
//! structural equality is symbolic equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::multiindex::{enumerate_upto, MultiIndex};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Base dimension, fiber dimension and declared jet order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleContext {
    pub n: u8,
    pub m: u8,
    pub r: u8,
}

impl BundleContext {
    pub fn new(n: u8, m: u8, r: u8) -> Self {
        assert!(n >= 1 && m >= 1, "bundle needs n >= 1 and m >= 1");
        BundleContext { n, m, r }
    }

    /// Every fiber coordinate `y^σ_J` with `|J| <= order`.
    pub fn fiber_coords(&self, order: usize) -> Vec<Coord> {
        let mut out = Vec::new();
        for sigma in 1..=self.m {
            for j in enumerate_upto(self.n, order) {
                out.push(Coord::Y(sigma, j));
            }
        }
        out
    }
}

/// A jet coordinate. Fiber indices `σ` and base indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    X(u8),
    Y(u8, MultiIndex),
}

impl Coord {
    pub fn y(sigma: u8, j: &[u8]) -> Self {
        Coord::Y(sigma, MultiIndex::new(j))
    }

    pub fn order(&self) -> usize {
        match self {
            Coord::X(_) => 0,
            Coord::Y(_, j) => j.len(),
        }
    }
}

/// Opaque function symbol `name^{block|multi}_σ(x, y, ..., y_{order})` with
/// formal partial derivatives (kept sorted).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Opaque {
    pub name: String,
    pub block: Vec<u8>,
    pub multi: Vec<u8>,
    pub sigma: u8,
    pub order: u8,
    pub partials: Vec<Coord>,
}

impl Opaque {
    pub fn depends_on(&self, c: &Coord) -> bool {
        match c {
            Coord::X(_) => true,
            Coord::Y(_, j) => j.len() <= self.order as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    C(Coord),
    F(Arc<Opaque>),
}

/// Sorted list of (atom, exponent) pairs; empty means the constant 1.
pub type Monomial = Vec<(Atom, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Normalized polynomial over jet-coordinate atoms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Q>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Expr { terms }
    }

    pub fn from_i64(c: i64) -> Self {
        Expr::constant(qi(c))
    }

    pub fn atom(a: Atom) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(a, 1)], Q::one());
        Expr { terms }
    }

    pub fn coord(c: Coord) -> Self {
        Expr::atom(Atom::C(c))
    }

    pub fn x(i: u8) -> Self {
        Expr::coord(Coord::X(i))
    }

    pub fn y(sigma: u8, j: &[u8]) -> Self {
        Expr::coord(Coord::y(sigma, j))
    }

    /// Opaque function of `(x, y, ..., y_order)` with no derivatives taken yet.
    pub fn opaque(name: &str, block: &[u8], multi: &[u8], sigma: u8, order: u8) -> Self {
        Expr::atom(Atom::F(Arc::new(Opaque {
            name: name.to_string(),
            block: block.to_vec(),
            multi: multi.to_vec(),
            sigma,
            order,
            partials: Vec::new(),
        })))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut e = Expr::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the expression has no atoms.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Normal form. Expressions are kept normalized, so this is a clone.
    pub fn normalize(&self) -> Self {
        self.clone()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Expr::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Sign of the leading coefficient (used by printers).
    pub fn leading_is_negative(&self) -> bool {
        self.terms.values().next().map(|c| c.is_negative()).unwrap_or(false)
    }

    /// Product rule: sum over factors of `exp * atom^(exp-1) * rest * f(atom)`.
    fn derive(&self, f: &dyn Fn(&Atom) -> Expr) -> Expr {
        let mut out = Expr::zero();
        let mut cache: BTreeMap<&Atom, Expr> = BTreeMap::new();
        for (mono, c) in &self.terms {
            for (p, (atom, exp)) in mono.iter().enumerate() {
                let da = cache.entry(atom).or_insert_with(|| f(atom));
                if da.is_zero() {
                    continue;
                }
                let mut rest = mono.clone();
                if *exp == 1 {
                    rest.remove(p);
                } else {
                    rest[p].1 -= 1;
                }
                let k = c * qi(*exp as i64);
                for (dm, dc) in &da.terms {
                    out.add_term(mono_mul(&rest, dm), &k * dc);
                }
            }
        }
        out
    }

    /// Formal partial derivative with respect to one stored coordinate.
    pub fn partial(&self, c: &Coord) -> Expr {
        self.derive(&|a| atom_partial(a, c))
    }

    /// Total derivative `d_i`.
    pub fn total_derivative(&self, i: u8, ctx: &BundleContext) -> Expr {
        self.derive(&|a| atom_total(a, i, ctx))
    }

    /// `d_J = d_{j_s} ... d_{j_1}`.
    pub fn total_derivative_multi(&self, j: &[u8], ctx: &BundleContext) -> Expr {
        let mut e = self.clone();
        for &i in j {
            e = e.total_derivative(i, ctx);
        }
        e
    }

    /// Fiber coordinates the expression may depend on, including every
    /// argument of opaque symbols.
    pub fn fiber_dependencies(&self, ctx: &BundleContext) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        for mono in self.terms.keys() {
            for (a, _) in mono {
                match a {
                    Atom::C(c @ Coord::Y(..)) => {
                        out.insert(c.clone());
                    }
                    Atom::C(Coord::X(_)) => {}
                    Atom::F(f) => out.extend(ctx.fiber_coords(f.order as usize)),
                }
            }
        }
        out
    }

    /// Highest jet order among explicit coordinates and opaque arguments.
    pub fn order(&self) -> usize {
        let mut r = 0;
        for mono in self.terms.keys() {
            for (a, _) in mono {
                r = r.max(match a {
                    Atom::C(c) => c.order(),
                    Atom::F(f) => f.order as usize,
                });
            }
        }
        r
    }

    pub fn substitute(&self, f: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
        let mut out = Expr::zero();
        for (mono, c) in &self.terms {
            let mut acc = Expr::constant(c.clone());
            for (a, e) in mono {
                let v = f(a).unwrap_or_else(|| Expr::atom(a.clone()));
                acc = &acc * &v.pow(*e);
            }
            out = &out + &acc;
        }
        out
    }
}

fn atom_partial(a: &Atom, c: &Coord) -> Expr {
    match a {
        Atom::C(x) => {
            if x == c {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::F(f) => {
            if !f.depends_on(c) {
                return Expr::zero();
            }
            let mut g = (**f).clone();
            let pos = g.partials.partition_point(|p| p <= c);
            g.partials.insert(pos, c.clone());
            Expr::atom(Atom::F(Arc::new(g)))
        }
    }
}

fn atom_total(a: &Atom, i: u8, ctx: &BundleContext) -> Expr {
    match a {
        Atom::C(Coord::X(j)) => {
            if *j == i {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::C(Coord::Y(s, j)) => Expr::coord(Coord::Y(*s, j.append(i))),
        Atom::F(f) => {
            let mut out = atom_partial(a, &Coord::X(i));
            for c in ctx.fiber_coords(f.order as usize) {
                if let Coord::Y(s, j) = &c {
                    let lifted = Expr::coord(Coord::Y(*s, j.append(i)));
                    out = &out + &(&lifted * &atom_partial(a, &c));
                }
            }
            out
        }
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&qi(-1))
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        &self + &rhs
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::frontend::print::expr_text(self, &crate::frontend::Names::default_for(4)))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}
