//! JSON documents (`jetform-json/1`). Object keys are emitted sorted, so the
//! output is byte-stable for a given form.

use serde_json::{json, Value};

use super::print::expr_text;
use super::Names;
use crate::forms::{contact_degree, Covector, Form};

pub const VERSION: &str = "jetform-json/1";

fn covector_json(c: &Covector, names: &Names) -> Value {
    match c {
        Covector::Dx(i) => json!({"kind": "dx", "index": i}),
        Covector::Omega(s, j) => json!({
            "kind": "omega",
            "field": names.field(*s),
            "multi": j.entries(),
        }),
    }
}

pub fn form_json(f: &Form, names: &Names) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(w, c)| {
            let k = contact_degree(w);
            json!({
                "coeff": expr_text(c, names),
                "wedge": w.iter().map(|cv| covector_json(cv, names)).collect::<Vec<_>>(),
                "grading": {"horizontal": w.len() - k, "contact": k},
            })
        })
        .collect();
    let h = f.horizontal_degrees();
    let k = f.contact_degrees();
    let grading = if h.len() == 1 && k.len() == 1 {
        json!({"horizontal": h.iter().next(), "contact": k.iter().next()})
    } else {
        Value::Null
    };
    json!({
        "version": VERSION,
        "terms": terms,
        "grading": grading,
        "order": f.order(),
    })
}

pub fn form_json_string(f: &Form, names: &Names) -> String {
    serde_json::to_string_pretty(&form_json(f, names)).expect("json values always serialize")
}
