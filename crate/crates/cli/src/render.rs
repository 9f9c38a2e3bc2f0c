//! Plain-text rendering of a JSON report.

use serde_json::Value;

/// Indented `key: value` lines; term arrays render as sums.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    write(v, 0, &mut out);
    out
}

fn is_term(v: &Value) -> bool {
    v.as_object().is_some_and(|o| o.contains_key("coeff") && (o.contains_key("anti") || o.contains_key("holo")))
}

fn term(v: &Value) -> String {
    let o = v.as_object().expect("term object");
    let mut parts = vec![format!("({})", o["coeff"].as_str().unwrap_or("?"))];
    if let Some(m) = o.get("mono").and_then(Value::as_object) {
        for (name, e) in m {
            match e.as_u64() {
                Some(1) => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
    }
    let idx = |key: &str, prefix: &str| -> Vec<String> {
        o.get(key)
            .and_then(Value::as_array)
            .map(|a| a.iter().map(|i| format!("{prefix}{i}")).collect())
            .unwrap_or_default()
    };
    let wedge: Vec<String> = idx("holo", "w").into_iter().chain(idx("anti", "~w")).collect();
    if !wedge.is_empty() {
        parts.push(wedge.join("^"));
    }
    if let Some(k) = o.get("vec") {
        parts.push(format!("X{k}"));
    }
    parts.join(" ")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Object(o) if o.is_empty() => Some("{}".into()),
        Value::Array(a) if a.iter().all(is_term) => Some(a.iter().map(term).collect::<Vec<_>>().join(" + ")),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn write(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn terms_render_as_sums() {
        let v = json!({"phi": [{"coeff": "1", "mono": {"t11": 1}, "anti": [1], "vec": 1},
                               {"coeff": "-1", "mono": {"t11": 1, "t22": 1}, "anti": [3], "vec": 3}]});
        assert_eq!(text(&v), "phi: (1) t11 ~w1 X1 + (-1) t11 t22 ~w3 X3\n");
    }

    #[test]
    fn nested_objects_indent() {
        let v = json!({"a": {"b": 1, "c": [true, false]}, "d": [{"e": null}]});
        assert_eq!(text(&v), "a:\n  b: 1\n  c: [true, false]\nd:\n  -\n    e: -\n");
    }
}
