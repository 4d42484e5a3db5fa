//! Plain-text and LaTeX printers.
//!
//! Text output is accepted back by the parser. Each form term prints as
//! `coefficient contact-factors /\ ds(b)`, where the horizontal factor is
//! rewritten through `dx_D = ±ds_b`.

use num::{One, Signed};

use super::Names;
use crate::forms::{horizontal_to_ds, Covector, Form};
use crate::symexpr::{Atom, Coord, Expr, Opaque, Q};

fn digits(j: &[u8]) -> String {
    j.iter().map(|d| d.to_string()).collect()
}

fn rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn coord_text(c: &Coord, names: &Names) -> String {
    match c {
        Coord::X(i) => format!("x{}", i),
        Coord::Y(s, j) if j.is_empty() => names.field(*s),
        Coord::Y(s, j) => format!("{}_{}", names.field(*s), digits(j.entries())),
    }
}

fn opaque_text(f: &Opaque, names: &Names) -> String {
    let mut s = format!("{}[{};{};{}]", f.name, digits(&f.block), digits(&f.multi), f.sigma);
    if !f.partials.is_empty() {
        let ps: Vec<String> = f.partials.iter().map(|c| coord_text(c, names)).collect();
        s = format!("D[{}]{}", ps.join(","), s);
    }
    s
}

fn atom_text(a: &Atom, names: &Names) -> String {
    match a {
        Atom::C(c) => coord_text(c, names),
        Atom::F(f) => opaque_text(f, names),
    }
}

/// One signed term: returns (is_negative, body without sign).
fn term_text(mono: &[(Atom, u32)], c: &Q, names: &Names) -> (bool, String) {
    let neg = c.is_negative();
    let a = c.abs();
    let mut parts = Vec::new();
    if mono.is_empty() || !a.is_one() {
        parts.push(rational(&a));
    }
    for (atom, e) in mono {
        let t = atom_text(atom, names);
        parts.push(if *e == 1 { t } else { format!("{}^{}", t, e) });
    }
    (neg, parts.join("*"))
}

pub fn expr_text(e: &Expr, names: &Names) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (mono, c)) in e.terms().enumerate() {
        let (neg, body) = term_text(mono, c, names);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

fn covector_text(c: &Covector, names: &Names) -> String {
    match c {
        Covector::Dx(i) => format!("dx{}", i),
        Covector::Omega(s, j) if j.is_empty() => format!("w({})", names.field(*s)),
        Covector::Omega(s, j) => format!("w({},{})", names.field(*s), digits(j.entries())),
    }
}

/// A form term rewritten as `sign * coefficient * contact /\ ds_b`.
pub struct DisplayTerm {
    pub coeff: Expr,
    pub contact: Vec<Covector>,
    pub block: Vec<u8>,
}

/// Rewrites every term as contact factors followed by `ds_b`.
pub fn display_terms(f: &Form, n: u8) -> Vec<DisplayTerm> {
    f.terms()
        .map(|(w, c)| {
            let split = w.iter().position(|cv| cv.is_contact()).unwrap_or(w.len());
            let d: Vec<u8> = w[..split]
                .iter()
                .map(|cv| match cv {
                    Covector::Dx(i) => *i,
                    _ => unreachable!(),
                })
                .collect();
            let (block, eps) = horizontal_to_ds(n, &d);
            let k = w.len() - split;
            let flip = (d.len() * k) % 2 == 1;
            let sign = if flip { -eps } else { eps };
            DisplayTerm {
                coeff: if sign < 0 { -c } else { c.clone() },
                contact: w[split..].to_vec(),
                block,
            }
        })
        .collect()
}

fn block_text(block: &[u8], n: u8) -> Option<String> {
    if block.len() == n as usize {
        None
    } else if block.is_empty() {
        Some("ds".to_string())
    } else {
        let b: Vec<String> = block.iter().map(|i| i.to_string()).collect();
        Some(format!("ds({})", b.join(",")))
    }
}

/// Text form; `n = 0` prints raw `dx` factors instead of `ds` blocks.
pub fn form_text(f: &Form, n: u8, names: &Names) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<(Expr, Vec<String>)> = if n == 0 {
        f.terms()
            .map(|(w, c)| (c.clone(), w.iter().map(|cv| covector_text(cv, names)).collect()))
            .collect()
    } else {
        display_terms(f, n)
            .into_iter()
            .map(|t| {
                let mut ws: Vec<String> = t.contact.iter().map(|cv| covector_text(cv, names)).collect();
                if let Some(b) = block_text(&t.block, n) {
                    ws.push(b);
                }
                (t.coeff, ws)
            })
            .collect()
    };
    let mut out = String::new();
    for (idx, (c, ws)) in terms.iter().enumerate() {
        let (neg, body) = coefficient_text(c, names, !ws.is_empty());
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let wedge = ws.join(" /\\ ");
        match (body.is_empty(), wedge.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&wedge),
            (false, true) => out.push_str(&body),
            (false, false) => {
                out.push_str(&body);
                out.push(' ');
                out.push_str(&wedge);
            }
        }
    }
    out
}

/// Coefficient of a wedge: sign pulled out, unit suppressed when a wedge
/// follows, sums parenthesized.
fn coefficient_text(c: &Expr, names: &Names, has_wedge: bool) -> (bool, String) {
    if c.num_terms() == 1 {
        let (mono, q) = c.terms().next().unwrap();
        let (neg, body) = term_text(mono, q, names);
        if has_wedge && mono.is_empty() && q.abs().is_one() {
            return (neg, String::new());
        }
        return (neg, body);
    }
    let neg = c.leading_is_negative();
    let inner = if neg { -c } else { c.clone() };
    (neg, format!("({})", expr_text(&inner, names)))
}

fn rational_latex(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn coord_latex(c: &Coord, names: &Names) -> String {
    match c {
        Coord::X(i) => format!("x^{{{}}}", i),
        Coord::Y(s, j) if j.is_empty() => names.field(*s),
        Coord::Y(s, j) => format!("{}_{{{}}}", names.field(*s), digits(j.entries())),
    }
}

fn atom_latex(a: &Atom, names: &Names) -> String {
    match a {
        Atom::C(c) => coord_latex(c, names),
        Atom::F(f) => {
            let mut s = format!("{}^{{{}{}}}_{{{}}}", f.name, digits(&f.block), digits(&f.multi), f.sigma);
            if !f.partials.is_empty() {
                let ps: Vec<String> = f.partials.iter().map(|c| format!("\\partial {}", coord_latex(c, names))).collect();
                s = format!("\\frac{{\\partial^{{{}}} {}}}{{{}}}", f.partials.len(), s, ps.join(" "));
            }
            s
        }
    }
}

fn term_latex(mono: &[(Atom, u32)], c: &Q, names: &Names) -> (bool, String) {
    let neg = c.is_negative();
    let a = c.abs();
    let mut parts = Vec::new();
    if mono.is_empty() || !a.is_one() {
        parts.push(rational_latex(&a));
    }
    for (atom, e) in mono {
        let t = atom_latex(atom, names);
        parts.push(if *e == 1 { t } else { format!("{{{}}}^{{{}}}", t, e) });
    }
    (neg, parts.join(" "))
}

pub fn expr_latex(e: &Expr, names: &Names) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (mono, c)) in e.terms().enumerate() {
        let (neg, body) = term_latex(mono, c, names);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

fn covector_latex(c: &Covector, names: &Names) -> String {
    match c {
        Covector::Dx(i) => format!("dx^{{{}}}", i),
        Covector::Omega(s, j) if j.is_empty() => format!("\\omega^{{{}}}", names.field(*s)),
        Covector::Omega(s, j) => format!("\\omega^{{{}}}_{{{}}}", names.field(*s), digits(j.entries())),
    }
}

pub fn form_latex(f: &Form, n: u8, names: &Names) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, t) in display_terms(f, n).into_iter().enumerate() {
        let mut ws: Vec<String> = t.contact.iter().map(|cv| covector_latex(cv, names)).collect();
        if t.block.len() < n as usize {
            ws.push(if t.block.is_empty() { "ds".to_string() } else { format!("ds_{{{}}}", digits(&t.block)) });
        }
        let (neg, body) = if t.coeff.num_terms() == 1 {
            let (mono, q) = t.coeff.terms().next().unwrap();
            let (neg, b) = term_latex(mono, q, names);
            if !ws.is_empty() && mono.is_empty() && q.abs().is_one() {
                (neg, String::new())
            } else {
                (neg, b)
            }
        } else {
            let neg = t.coeff.leading_is_negative();
            let inner = if neg { -&t.coeff } else { t.coeff.clone() };
            (neg, format!("\\left({}\\right)", expr_latex(&inner, names)))
        };
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let wedge = ws.join(" \\wedge ");
        match (body.is_empty(), wedge.is_empty()) {
            (true, true) => out.push('1'),
            (true, false) => out.push_str(&wedge),
            (false, true) => out.push_str(&body),
            (false, false) => {
                out.push_str(&body);
                out.push_str(" \\, ");
                out.push_str(&wedge);
            }
        }
    }
    out
}

/// Delimiter balance check used on LaTeX output.
pub fn latex_balanced(s: &str) -> bool {
    let mut depth = 0i64;
    for ch in s.chars() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0 && s.matches("\\left(").count() == s.matches("\\right)").count()
}
