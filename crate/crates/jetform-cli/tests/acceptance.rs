//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always visible under `cargo test`.

use std::process::Command;
use std::time::Instant;

use rand::Rng;

use jetform::corpus;
use jetform::frontend::print::{form_latex, form_text, latex_balanced};
use jetform::frontend::{parser, verify, Names};
use jetform::interior_euler::interior_euler;
use jetform::lepage::{self, IbpPolicy, Lagrangian};
use jetform::multiindex::CoefficientTensor;
use jetform::symexpr::q;
use jetform::varmorph::{self, VariationalMorphism};
use jetform::{BundleContext, Expr, Form};

type Check = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn all_pass(outcomes: impl IntoIterator<Item = verify::Outcome>) -> Result<usize, String> {
    let mut checks = 0;
    for o in outcomes {
        if let Some((label, diff)) = &o.failure {
            return Err(format!("{}: {} left {:?}", o.identity, label, diff));
        }
        checks += o.checks;
    }
    Ok(checks)
}

fn c1_decomposition() -> Check {
    let mut forms = 0;
    let mut outs = Vec::new();
    for (n, m) in [(1u8, 1u8), (1, 2), (2, 1), (2, 2)] {
        for seed in 0..7 {
            outs.push(verify::eq32(n, m, seed).map_err(|e| e.to_string())?);
            forms += 2;
        }
    }
    let checks = all_pass(outs)?;
    ensure(forms >= 50, || format!("only {} forms", forms))?;
    Ok(format!("{} forms (k = 1, 2), {} exact checks", forms, checks))
}

fn c2_interior_euler_properties() -> Check {
    // (b) and (c) run on the decomposition corpus; (d) on constructed members of the kernel
    let mut members = 0;
    for (n, m) in [(1u8, 1u8), (1, 2), (2, 1), (2, 2)] {
        for seed in 0..7 {
            let o = verify::eq32(n, m, seed).map_err(|e| e.to_string())?;
            all_pass([o])?;
        }
    }
    let mut rng = corpus::rng(2024);
    for idx in 0..10 {
        let n = 1 + (idx % 2) as u8;
        let m = 1 + (idx / 5) as u8;
        let ctx = BundleContext::new(n, m, 3);
        let k = 1 + idx % 2;
        let theta = if idx % 4 < 2 {
            // p_k dβ for a k-contact (n+k-1)-form β
            let beta = corpus::form(&mut rng, &ctx, 2, n as usize - 1, k, 3, 2);
            beta.exterior_d(&ctx).p(k)
        } else {
            // β = ω^σ_J ∧ γ strongly contact
            let gamma = corpus::form(&mut rng, &ctx, 1, n as usize - 1, k - 1, 2, 2);
            let sigma = rng.gen_range(1..=m);
            let j: Vec<u8> = (0..rng.gen_range(0..=1)).map(|_| rng.gen_range(1..=n)).collect();
            Form::omega(sigma, &j).wedge(&gamma).exterior_d(&ctx).p(k)
        };
        ensure(!theta.is_zero(), || format!("kernel member {} degenerated to zero", idx))?;
        let ie = interior_euler(&theta, k, &ctx).map_err(|e| e.to_string())?;
        ensure(ie.is_zero(), || format!("I(member {}) = {:?}", idx, ie))?;
        members += 1;
    }
    Ok(format!("boundary annihilation and idempotence on 56 forms; kernel on {} constructed members", members))
}

fn c3_volume() -> Check {
    let mut outs = Vec::new();
    for (n, m) in [(1u8, 1u8), (2, 1), (2, 2), (3, 1)] {
        for seed in 0..4 {
            outs.push(verify::prop_volume(n, m, seed).map_err(|e| e.to_string())?);
        }
    }
    let checks = all_pass(outs)?;
    Ok(format!("{} exact checks, orders 1 and 2, generic field", checks))
}

fn c4_divergence() -> Check {
    let mut outs = Vec::new();
    let mut instances = 0;
    for (n, m) in [(2u8, 1u8), (2, 2), (3, 1)] {
        for seed in 0..4 {
            outs.push(verify::prop_div(n, m, seed).map_err(|e| e.to_string())?);
            instances += 4;
        }
    }
    let checks = all_pass(outs)?;
    ensure(instances >= 20, || format!("only {} instances", instances))?;
    Ok(format!("{} instances over s, k in {{1, 2}}, {} exact checks", instances, checks))
}

fn c5_rank_one() -> Check {
    let mut outs = Vec::new();
    for (n, m) in [(1u8, 1u8), (2, 1), (2, 2), (3, 1), (3, 2)] {
        for seed in 0..3 {
            outs.push(verify::prop_r1(n, m, seed).map_err(|e| e.to_string())?);
        }
    }
    let checks = all_pass(outs)?;
    Ok(format!("{} exact checks, s < n <= 3", checks))
}

fn c6_alpha() -> Check {
    let mut checks = 0;
    for n in [2u8, 3] {
        checks += all_pass([verify::prop_da_generic(n, 1).map_err(|e| e.to_string())?])?;
    }
    Ok(format!("generic coefficients, n = 2, 3; {} exact checks (alpha = -1/6 terms, E' = E - D alpha, T' = T + alpha)", checks))
}

fn sym2(a: &CoefficientTensor, s: u8, i: u8, j: u8, tail: &[u8]) -> Expr {
    let k1: Vec<u8> = [&[i, j][..], tail].concat();
    let k2: Vec<u8> = [&[j, i][..], tail].concat();
    (&a.get(s, &k1) + &a.get(s, &k2)).scale(&q(1, 2))
}

fn anti2(a: &CoefficientTensor, s: u8, i: u8, j: u8, tail: &[u8]) -> Expr {
    let k1: Vec<u8> = [&[i, j][..], tail].concat();
    let k2: Vec<u8> = [&[j, i][..], tail].concat();
    (&a.get(s, &k1) - &a.get(s, &k2)).scale(&q(1, 2))
}

fn c7_rank_two_coefficients() -> Check {
    let two3 = q(2, 3);
    for n in [2u8, 3] {
        let ctx = BundleContext::new(n, 1, 2);
        let a = corpus::generic_tensor(&ctx, 1, 2, 1);
        let v = VariationalMorphism::new(a.clone(), 2);
        let sp = varmorph::split_canonical_codegree_s(&v, &ctx).map_err(|e| e.to_string())?;
        let (e, t) = (&sp.volume, &sp.boundary);
        let d = |x: Expr, i: u8| x.total_derivative(i, &ctx);
        let mut literal = e.coeffs.clone();
        for i in 1..=n {
            let mut dd = Expr::zero();
            let mut d1 = Expr::zero();
            for aa in 1..=n {
                d1 = &d1 + &d(anti2(&a, 1, i, aa, &[]), aa);
                for b in 1..=n {
                    dd = &dd + &d(d(anti2(&a, 1, i, b, &[aa]), aa), b);
                }
            }
            let base = &a.get(1, &[i]) - &d1;
            let shown = &base - &dd.scale(&two3);
            let forced = &base + &dd.scale(&two3);
            ensure(e.get(1, &[i]) == forced, || format!("E^{} differs from A^i - d_aA^[ia] + 2/3 d_bd_aA^[ib]a", i))?;
            literal.set(1, &[i], shown);
            for j1 in 1..=n {
                let mut c = sym2(&a, 1, i, j1, &[]);
                for aa in 1..=n {
                    c = &c + &d(a.get(1, &[aa, i, j1]), aa).scale(&two3);
                    c = &c - &d(sym2(&a, 1, i, j1, &[aa]), aa).scale(&two3);
                }
                ensure(e.get(1, &[i, j1]) == c, || format!("E^({}{}) coefficient", i, j1))?;
                for j2 in 1..=n {
                    let p = [i, j1, j2];
                    let mut s3 = Expr::zero();
                    for (x, y, z) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
                        s3 = &s3 + &a.get(1, &[p[x], p[y], p[z]]);
                    }
                    ensure(e.get(1, &p) == s3.scale(&q(1, 6)), || format!("E^({}{}{}) coefficient", i, j1, j2))?;
                }
            }
            for i2 in 1..=n {
                let mut da = Expr::zero();
                for aa in 1..=n {
                    da = &da + &d(anti2(&a, 1, i, i2, &[aa]), aa);
                }
                let t0 = (&anti2(&a, 1, i, i2, &[]) - &da.scale(&two3)).scale(&q(1, 2));
                ensure(t.get(1, &[i, i2]) == t0, || format!("T^[{}{}] coefficient", i, i2))?;
                for j in 1..=n {
                    let t1 = anti2(&a, 1, i, i2, &[j]).scale(&q(2, 3));
                    ensure(t.get(1, &[i, i2, j]) == t1, || format!("T^[{}{}]{} coefficient", i, i2, j))?;
                }
            }
        }
        let xi = corpus::generic_xi(&ctx);
        ensure(sp.defect(&v, &xi, &ctx).is_zero(), || "splitting identity fails".into())?;
        ensure(sp.volume.is_reduced(), || "volume part is not reduced".into())?;
        let shown = varmorph::SplitResult {
            volume: VariationalMorphism::new(literal, 2),
            ..sp.clone()
        };
        ensure(!shown.defect(&v, &xi, &ctx).is_zero(), || "the -2/3 variant unexpectedly satisfies the identity".into())?;
    }
    Ok("every closed-form E and T coefficient, n = 2, 3; the d_bd_aA^[ib]a term enters E^i with +2/3 (the -2/3 variant violates the splitting identity)".into())
}

fn c8_krupka_betounes() -> Check {
    let mut count = 0;
    for n in [2u8, 3] {
        for m in [1u8, 2] {
            for seed in 0..10 {
                all_pass([verify::kb_first(n, m, 100 + seed).map_err(|e| e.to_string())?])?;
                count += 1;
            }
        }
    }
    let ctx = BundleContext::new(2, 2, 2);
    let names = Names::default_for(2);
    let l = Lagrangian::new(parser::parse_expr("u_x*v_y - u_y*v_x", &ctx, &names).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let seq = lepage::rossi_sequence(&l, IbpPolicy::Generalized, &ctx).map_err(|e| e.to_string())?;
    let d = seq[1].exterior_d(&ctx);
    ensure(d.is_zero(), || {
        let sym = lepage::krupka_betounes_symmetric(&l, &ctx).map(|f| f.exterior_d(&ctx).is_zero()).unwrap_or(false);
        format!(
            "{} random Lagrangians match the closed formula, but for the null Lagrangian d rho_2 = {}; the 1/(q!)^2-weighted equivalent is {}closed",
            count,
            form_text(&d, 2, &names),
            if sym { "" } else { "not " }
        )
    })?;
    Ok(format!("{} random Lagrangians; null Lagrangian gives closed rho_2", count))
}

fn c9_second_order() -> Check {
    let mut outs = Vec::new();
    for (n, m) in [(2u8, 1u8), (2, 2), (3, 1)] {
        for seed in 0..3 {
            outs.push(verify::rossi_rho2(n, m, seed).map_err(|e| e.to_string())?);
            outs.push(verify::kb_second(n, m, seed).map_err(|e| e.to_string())?);
        }
    }
    let checks = all_pass(outs)?;
    Ok(format!("{} exact checks: rho_2, both closed forms, first-order reduction", checks))
}

fn c10_euler_lagrange() -> Check {
    let cases: [(u8, u8, u8, &str, &str); 3] = [
        (2, 1, 1, "1/2*(u_x^2 + u_y^2)", "-(u_11 + u_22) w(u) /\\ ds"),
        (1, 1, 2, "1/2*u_11^2", "u_1111 w(u) /\\ ds"),
        (2, 2, 1, "u_x*v_y - u_y*v_x", "0"),
    ];
    for (n, m, r, src, want) in cases {
        let ctx = BundleContext::new(n, m, r);
        let names = Names::default_for(m);
        let l = Lagrangian::new(parser::parse_expr(src, &ctx, &names).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let el = lepage::euler_lagrange(&l, &ctx).map_err(|e| e.to_string())?;
        let ctx4 = BundleContext::new(n, m, 4);
        let expected = parser::parse_form(want, &ctx4, &names).map_err(|e| e.to_string())?;
        ensure(el == expected, || format!("{}: got {}", src, form_text(&el, n, &names)))?;
    }
    Ok("Dirichlet, second-order particle and null Lagrangian".into())
}

fn c11_calculus() -> Check {
    let mut rng = corpus::rng(99);
    let mut count = 0;
    for idx in 0..120 {
        let n = 1 + (idx % 3) as u8;
        let m = 1 + (idx % 2) as u8;
        let ctx = BundleContext::new(n, m, 4);
        let a = corpus::mixed_form(&mut rng, &ctx, 2);
        let b = corpus::mixed_form(&mut rng, &ctx, 1);
        let d = |f: &Form| f.exterior_d(&ctx);
        let dh = |f: &Form| f.d_h(&ctx);
        let dc = |f: &Form| f.d_c(&ctx);
        ensure(d(&d(&a)).is_zero(), || format!("d^2 on form {}", idx))?;
        ensure(dh(&dh(&a)).is_zero(), || format!("d_H^2 on form {}", idx))?;
        ensure(dc(&dc(&a)).is_zero(), || format!("d_C^2 on form {}", idx))?;
        ensure(dh(&dc(&a)) == dc(&dh(&a)).neg(), || format!("d_H d_C = -d_C d_H on form {}", idx))?;
        ensure(dh(&a) == a.d_h_graded(&ctx), || format!("d_H definitions disagree on form {}", idx))?;
        ensure(d(&a) == dh(&a).add(&dc(&a)), || format!("d = d_H + d_C on form {}", idx))?;
        for i in 1..=n {
            for j in 1..=n {
                let ij = a.total_derivative(i, &ctx).total_derivative(j, &ctx);
                let ji = a.total_derivative(j, &ctx).total_derivative(i, &ctx);
                ensure(ij == ji, || format!("d_{}d_{} on form {}", i, j, idx))?;
            }
            let lhs = a.wedge(&b).total_derivative(i, &ctx);
            let rhs = a.total_derivative(i, &ctx).wedge(&b).add(&a.wedge(&b.total_derivative(i, &ctx)));
            ensure(lhs == rhs, || format!("Leibniz for d_{} on form {}", i, idx))?;
        }
        for deg in a.degrees() {
            let ap = a.degree_part(deg);
            let sign = |f: Form| if deg % 2 == 1 { f.neg() } else { f };
            let lhs = d(&ap.wedge(&b));
            let rhs = d(&ap).wedge(&b).add(&sign(ap.wedge(&d(&b))));
            ensure(lhs == rhs, || format!("Leibniz for d on form {}", idx))?;
            let lhs = dh(&ap.wedge(&b));
            let rhs = dh(&ap).wedge(&b).add(&sign(ap.wedge(&dh(&b))));
            ensure(lhs == rhs, || format!("Leibniz for d_H on form {}", idx))?;
        }
        count += 1;
    }
    Ok(format!("{} random mixed forms, n <= 3", count))
}

fn jetform(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jetform")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn golden_corpus() -> Vec<(u8, u8, Form)> {
    let fixed: [(u8, u8, &str); 8] = [
        (2, 1, "-(u_11 + u_22) w(u) /\\ ds"),
        (2, 1, "w(u) /\\ ds(1)"),
        (1, 1, "u_1 * w(u,1) /\\ dx1"),
        (2, 2, "1/2*u_1^2*v ds + 3/4 w(u) /\\ w(v,12) /\\ ds(2)"),
        (3, 1, "x1*u_13 w(u,2) /\\ ds(1,3) - u w(u) /\\ w(u,33)"),
        (3, 3, "y1_1*y3 w(y2) /\\ ds(2)"),
        (2, 1, "dx1 /\\ dx1 + w(u)"),
        (2, 1, "-2/3 x2^2 dx2 + u_2 dy(u,1) /\\ dx1"),
    ];
    let mut out = Vec::new();
    for (n, m, src) in fixed {
        let ctx = BundleContext::new(n, m, 3);
        out.push((n, m, parser::parse_form(src, &ctx, &Names::default_for(m)).expect("golden form parses")));
    }
    let mut rng = corpus::rng(7);
    for idx in 0..60 {
        let n = 1 + (idx % 3) as u8;
        let m = 1 + (idx % 4) as u8;
        let ctx = BundleContext::new(n, m, 3);
        out.push((n, m, corpus::mixed_form(&mut rng, &ctx, 2)));
    }
    out
}

fn c12_cli() -> Check {
    let mut runs = 0;
    for (n, m) in [("2", "1"), ("2", "2")] {
        let (code, text) = jetform(&["verify", "--identity", "all", "--seeds", "5", "--base-dim", n, "--fiber-dim", m]);
        ensure(code == 0, || format!("verify exited {}:\n{}", code, text))?;
        runs += text.lines().filter(|l| l.starts_with("PASS")).count();
    }
    ensure(runs == 2 * 5 * verify::IDENTITIES.len(), || format!("expected {} PASS lines, saw {}", 2 * 5 * verify::IDENTITIES.len(), runs))?;

    let corpus = golden_corpus();
    for (idx, (n, m, f)) in corpus.iter().enumerate() {
        let names = Names::default_for(*m);
        let ctx = BundleContext::new(*n, *m, 3);
        let text = form_text(f, *n, &names);
        let back = parser::parse_form(&text, &ctx, &names).map_err(|e| format!("golden {}: {} on {:?}", idx, e, text))?;
        ensure(&back == f, || format!("golden {} does not round-trip: {}", idx, text))?;
        ensure(latex_balanced(&form_latex(f, *n, &names)), || format!("golden {} latex unbalanced", idx))?;
    }

    let json_args = ["kb", "--base-dim", "2", "--fiber-dim", "2", "--format", "json", "u_x*v_y - u_y*v_x"];
    let (c1, j1) = jetform(&json_args);
    let (c2, j2) = jetform(&json_args);
    ensure(c1 == 0 && c2 == 0 && j1 == j2 && !j1.is_empty(), || "json output differs between runs".into())?;

    let latex_runs: [&[&str]; 9] = [
        &["decompose", "u*w(u,1) /\\ ds(1) + u_1 ds"],
        &["ieuler", "u_1*w(u,1) /\\ ds"],
        &["residual", "u_1*w(u,1) /\\ ds"],
        &["split", "u_2*w(u,1) /\\ ds"],
        &["splitlike", "u*w(u,1) /\\ ds(1)"],
        &["pc", "1/2*u_x^2"],
        &["kb", "u_x*u_y"],
        &["el", "1/2*u_x^2"],
        &["alpha", "u_2*w(u,12) /\\ ds(1) + w(u,1) /\\ ds(2)"],
    ];
    for args in latex_runs {
        let mut v: Vec<&str> = args.to_vec();
        v.extend(["--format", "latex", "--order", "2"]);
        let (code, text) = jetform(&v);
        ensure(code == 0, || format!("{} exited {}", args[0], code))?;
        ensure(latex_balanced(&text), || format!("{} latex unbalanced: {}", args[0], text))?;
    }
    let (code, _) = jetform(&["el", "--order", "1", "u_xx"]);
    ensure(code == 2, || format!("order violation exited {}", code))?;
    Ok(format!("{} verify runs PASS; {} golden forms round-trip; json byte-stable; latex balanced", runs, corpus.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("decomposition p_k rho = I(rho) + p_k d p_k R(rho)", c1_decomposition),
        ("interior Euler operator properties", c2_interior_euler_properties),
        ("codegree-0 volume and boundary parts", c3_volume),
        ("lower-degree residual divergence identity", c4_divergence),
        ("rank-1 splittings coincide", c5_rank_one),
        ("alpha discrepancy of rank-2 splittings", c6_alpha),
        ("rank-2 codegree-1 canonical coefficients", c7_rank_two_coefficients),
        ("first-order Krupka-Betounes recurrence", c8_krupka_betounes),
        ("second-order Lepage equivalents", c9_second_order),
        ("Euler-Lagrange sanity", c10_euler_lagrange),
        ("calculus substrate", c11_calculus),
        ("command line", c12_cli),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {} ({:.1}s): {}", idx + 1, name, secs, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({:.1}s): {}", idx + 1, name, secs, why);
            }
        }
    }
    if failed > 0 {
        println!("{} of 12 criteria failed", failed);
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
