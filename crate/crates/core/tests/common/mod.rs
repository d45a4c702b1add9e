#![allow(dead_code)]

use serde_json::Value;

pub fn report_schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn type_matches(v: &Value, t: &str) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

/// Validates `v` against the keyword subset used by the shipped schema:
/// type, enum, required, properties, additionalProperties, items, $ref into
/// `$defs`, oneOf, minLength, maxLength, minimum.
pub fn validate(root: &Value, schema: &Value, v: &Value, path: &str) -> Vec<String> {
    let mut errs = Vec::new();
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return validate(root, &root["$defs"][name], v, path);
    }
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_matches(v, s),
            Value::Array(ts) => ts.iter().filter_map(Value::as_str).any(|s| type_matches(v, s)),
            _ => true,
        };
        if !ok {
            errs.push(format!("{path}: expected type {t}, got {v}"));
            return errs;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errs.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(alts) = schema.get("oneOf").and_then(Value::as_array) {
        let matching = alts.iter().filter(|a| validate(root, a, v, path).is_empty()).count();
        if matching != 1 {
            errs.push(format!("{path}: {matching} oneOf branches match"));
        }
    }
    if let Some(s) = v.as_str() {
        let n = s.chars().count() as u64;
        if schema.get("minLength").and_then(Value::as_u64).is_some_and(|m| n < m) {
            errs.push(format!("{path}: too short"));
        }
        if schema.get("maxLength").and_then(Value::as_u64).is_some_and(|m| n > m) {
            errs.push(format!("{path}: too long"));
        }
    }
    if let (Some(x), Some(m)) = (v.as_f64(), schema.get("minimum").and_then(Value::as_f64)) {
        if x < m {
            errs.push(format!("{path}: {x} < {m}"));
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(req) = schema.get("required").and_then(Value::as_array) {
            for k in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(k) {
                    errs.push(format!("{path}: missing {k}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (k, val) in obj {
            let sub = format!("{path}/{k}");
            match props.and_then(|p| p.get(k)) {
                Some(s) => errs.extend(validate(root, s, val, &sub)),
                None => match schema.get("additionalProperties") {
                    Some(Value::Bool(false)) => errs.push(format!("{sub}: unexpected property")),
                    Some(s @ Value::Object(_)) => errs.extend(validate(root, s, val, &sub)),
                    _ => {}
                },
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            errs.extend(validate(root, items, x, &format!("{path}/{i}")));
        }
    }
    errs
}

pub fn schema_errors(report_json: &str) -> Vec<String> {
    let schema = report_schema();
    let v: Value = serde_json::from_str(report_json).unwrap();
    validate(&schema, &schema, &v, "")
}
