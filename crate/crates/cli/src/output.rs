//! One result record rendered as JSON or as a two-line TSV table. Both
//! renderings keep the field order the record was built with.

use metricstat::format;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    List(Vec<Field>),
    Null,
}

impl Field {
    fn to_json(&self) -> Value {
        match self {
            Field::Num(v) => json_number(*v),
            Field::Int(v) => Value::from(*v),
            Field::Bool(b) => Value::Bool(*b),
            Field::Str(s) => Value::String(s.clone()),
            Field::List(xs) => Value::Array(xs.iter().map(Field::to_json).collect()),
            Field::Null => Value::Null,
        }
    }

    fn to_tsv(&self) -> String {
        match self {
            Field::Num(v) => format::number(*v),
            Field::Int(v) => v.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Str(s) => s.clone(),
            Field::List(xs) => xs.iter().map(Field::to_tsv).collect::<Vec<_>>().join(","),
            Field::Null => "NA".into(),
        }
    }
}

/// Six significant digits; whole numbers become JSON integers.
pub fn json_number(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let r = format::round_significant(v);
    if r == r.trunc() && r.abs() < 1e15 {
        return Value::from(r as i64);
    }
    Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Debug, Default)]
pub struct Record {
    fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn push(&mut self, key: &'static str, value: Field) -> &mut Self {
        self.fields.push((key, value));
        self
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self
            .fields
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_json()))
            .collect();
        let mut s = serde_json::to_string(&Value::Object(map)).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_tsv(&self) -> String {
        let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = self.fields.iter().map(|(_, v)| v.to_tsv()).collect();
        format!("{}\n{}\n", header.join("\t"), row.join("\t"))
    }
}
