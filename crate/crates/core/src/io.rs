//! JSON and DOT serialization, and parsing of lattice specs such as
//! `grid:2,1` or `file:lattice.json`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arrows::{same_lattice, ArrowSet};
use crate::error::{Error, Result};
use crate::lattice::{Arrow, Elem, Lattice, Shape};
use crate::lifting::Wfs;
use crate::model::ModelStructure;

/// A lattice named by family and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedFamilySpec {
    Chain(usize),
    Grid(usize, usize),
    Diamond(usize),
    Pentagon,
    File(String),
}

impl NamedFamilySpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (family, params) = spec.split_once(':').unwrap_or((spec, ""));
        let ints = || -> Result<Vec<usize>> {
            params
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad parameter {p:?} in lattice spec {spec:?}")))
                })
                .collect()
        };
        let arity = |want: usize, got: Vec<usize>| -> Result<Vec<usize>> {
            if got.len() == want {
                Ok(got)
            } else {
                Err(Error::Parse(format!(
                    "{family} takes {want} parameter(s), got {} in {spec:?}",
                    got.len()
                )))
            }
        };
        match family {
            "chain" => Ok(NamedFamilySpec::Chain(arity(1, ints()?)?[0])),
            "grid" => {
                let p = arity(2, ints()?)?;
                Ok(NamedFamilySpec::Grid(p[0], p[1]))
            }
            "diamond" => Ok(NamedFamilySpec::Diamond(arity(1, ints()?)?[0])),
            "pentagon" if params.is_empty() => Ok(NamedFamilySpec::Pentagon),
            "pentagon" => Err(Error::Parse(String::from("pentagon takes no parameters"))),
            "file" if !params.is_empty() => Ok(NamedFamilySpec::File(params.to_string())),
            _ => Err(Error::Parse(format!("unknown lattice spec {spec:?}"))),
        }
    }

    pub fn build(&self) -> Result<Lattice> {
        match self {
            NamedFamilySpec::Chain(n) => Ok(Lattice::chain(*n)),
            NamedFamilySpec::Grid(m, n) => Lattice::grid(*m, *n),
            NamedFamilySpec::Diamond(n) => Lattice::diamond(*n),
            NamedFamilySpec::Pentagon => Ok(Lattice::pentagon()),
            NamedFamilySpec::File(path) => read_lattice_file(Path::new(path)),
        }
    }

    /// The family string a constructor-built lattice can be rebuilt from.
    pub fn of(l: &Lattice) -> Option<String> {
        match *l.shape() {
            Shape::Chain(n) => Some(format!("chain:{n}")),
            Shape::Grid(m, n) => Some(format!("grid:{m},{n}")),
            Shape::Diamond(n) => Some(format!("diamond:{n}")),
            Shape::Pentagon => Some(String::from("pentagon")),
            Shape::Other => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    pub labels: Vec<String>,
    pub covers: Vec<[Elem; 2]>,
}

impl LatticeJson {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeJson {
            labels: l.labels().to_vec(),
            covers: l.covers().iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    pub fn build(&self) -> Result<Lattice> {
        let covers: Vec<(Elem, Elem)> = self.covers.iter().map(|&[x, y]| (x, y)).collect();
        Lattice::from_cover_relations(self.labels.clone(), &covers)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_lattice_file(path: &Path) -> Result<Lattice> {
    lattice_from_json(&read_file(path)?)
}

pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    let doc: LatticeJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("lattice JSON: {e}")))?;
    doc.build()
}

pub fn lattice_to_json(l: &Lattice) -> String {
    serde_json::to_string(&LatticeJson::from_lattice(l)).expect("lattice serializes")
}

/// A named family spec, inline lattice JSON, or a path to a lattice JSON
/// file.
pub fn parse_lattice(spec: &str) -> Result<Lattice> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return lattice_from_json(trimmed);
    }
    match NamedFamilySpec::parse(spec) {
        Ok(named) => named.build(),
        Err(_) if Path::new(spec).is_file() => read_lattice_file(Path::new(spec)),
        Err(e) => Err(e),
    }
}

fn lattice_value(l: &Lattice) -> Value {
    match NamedFamilySpec::of(l) {
        Some(name) => Value::String(name),
        None => serde_json::to_value(LatticeJson::from_lattice(l)).expect("lattice serializes"),
    }
}

fn lattice_from_value(v: &Value) -> Result<Lattice> {
    match v {
        Value::String(s) => parse_lattice(s),
        other => {
            let doc: LatticeJson = serde_json::from_value(other.clone())
                .map_err(|e| Error::Parse(format!("lattice JSON: {e}")))?;
            doc.build()
        }
    }
}

fn pairs_value(s: &ArrowSet<'_>) -> Value {
    Value::Array(
        s.iter()
            .map(|a| Value::Array(vec![a.src.into(), a.tgt.into()]))
            .collect(),
    )
}

fn endpoint(l: &Lattice, v: &Value) -> Result<Elem> {
    match v {
        Value::Number(n) => match n.as_u64() {
            Some(i) if (i as usize) < l.len() => Ok(i as usize),
            _ => Err(Error::UnknownElement(n.to_string())),
        },
        Value::String(s) => l.element(s).ok_or_else(|| Error::UnknownElement(s.clone())),
        other => Err(Error::Parse(format!("arrow endpoint must be an index or label, got {other}"))),
    }
}

fn set_from_value<'a>(l: &'a Lattice, v: &Value) -> Result<ArrowSet<'a>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Parse(String::from("arrows must be a list of [src, tgt] pairs")))?;
    let mut arrows = Vec::with_capacity(items.len());
    for item in items {
        match item.as_array().map(Vec::as_slice) {
            Some([s, t]) => arrows.push(Arrow::new(endpoint(l, s)?, endpoint(l, t)?)),
            _ => return Err(Error::Parse(format!("arrow must be a [src, tgt] pair, got {item}"))),
        }
    }
    ArrowSet::from_arrows(l, arrows)
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))
}

fn field<'v>(doc: &'v Value, key: &str) -> Result<&'v Value> {
    doc.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn check_lattice(l: &Lattice, doc: &Value) -> Result<()> {
    match doc.get("lattice") {
        Some(v) if !same_lattice(l, &lattice_from_value(v)?) => Err(Error::MixedLattices),
        _ => Ok(()),
    }
}

/// `{"lattice": ..., "arrows": [[src, tgt], ...]}`, arrows in index order.
pub fn serialize_arrow_set(s: &ArrowSet<'_>) -> String {
    let doc = serde_json::json!({
        "lattice": lattice_value(s.lattice()),
        "arrows": pairs_value(s),
    });
    doc.to_string()
}

/// The lattice named inside an arrow-set, WFS or model-structure document.
pub fn lattice_of_document(text: &str) -> Result<Lattice> {
    lattice_from_value(field(&parse_json(text)?, "lattice")?)
}

/// Read an arrow set on `l`. A `lattice` field, if present, must describe
/// the same lattice.
pub fn parse_arrow_set<'a>(l: &'a Lattice, text: &str) -> Result<ArrowSet<'a>> {
    let doc = parse_json(text)?;
    check_lattice(l, &doc)?;
    set_from_value(l, field(&doc, "arrows")?)
}

pub fn serialize_wfs(w: &Wfs<'_>) -> String {
    serde_json::json!({
        "left": serde_json::from_str::<Value>(&serialize_arrow_set(w.left())).expect("valid JSON"),
        "right": serde_json::from_str::<Value>(&serialize_arrow_set(w.right())).expect("valid JSON"),
    })
    .to_string()
}

pub fn parse_wfs<'a>(l: &'a Lattice, text: &str) -> Result<Wfs<'a>> {
    let doc = parse_json(text)?;
    let side = |key| -> Result<ArrowSet<'a>> {
        let v = field(&doc, key)?;
        check_lattice(l, v)?;
        set_from_value(l, field(v, "arrows")?)
    };
    Wfs::new(side("left")?, side("right")?)
}

/// `{"lattice": ..., "W": [...], "AC": [...], "C": [...], "AF": [...], "F": [...]}`.
pub fn serialize_model_structure(m: &ModelStructure<'_>) -> String {
    serde_json::json!({
        "lattice": lattice_value(m.lattice()),
        "W": pairs_value(&m.weq),
        "AC": pairs_value(&m.acof),
        "C": pairs_value(&m.cof),
        "AF": pairs_value(&m.afib),
        "F": pairs_value(&m.fib),
    })
    .to_string()
}

/// Read the five classes as written; no axioms are checked.
pub fn parse_model_structure<'a>(l: &'a Lattice, text: &str) -> Result<ModelStructure<'a>> {
    let doc = parse_json(text)?;
    check_lattice(l, &doc)?;
    let class = |key| set_from_value(l, field(&doc, key)?);
    Ok(ModelStructure {
        weq: class("W")?,
        acof: class("AC")?,
        cof: class("C")?,
        afib: class("AF")?,
        fib: class("F")?,
    })
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Hasse diagram in DOT, bottom to top, with cover edges in gray. Each
/// overlay draws its arrows with the given attribute list, for example
/// `color=red, penwidth=2`.
pub fn dot_export(l: &Lattice, overlays: &[(ArrowSet<'_>, &str)]) -> Result<String> {
    if overlays.iter().any(|(s, _)| !same_lattice(l, s.lattice())) {
        return Err(Error::MixedLattices);
    }
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for x in 0..l.len() {
        writeln!(out, "  n{x} [label={}];", dot_quote(l.display_label(x))).unwrap();
    }
    for &(x, y) in l.covers() {
        writeln!(out, "  n{x} -> n{y} [color=gray, arrowhead=none];").unwrap();
    }
    for (k, (s, style)) in overlays.iter().enumerate() {
        for a in s.iter() {
            writeln!(
                out,
                "  n{} -> n{} [{style}, constraint=false, class=\"overlay{k}\"];",
                a.src, a.tgt
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{af_interval, assemble_model_structure};

    #[test]
    fn named_specs() {
        assert_eq!(parse_lattice("grid:2,1").unwrap(), Lattice::grid(2, 1).unwrap());
        assert_eq!(parse_lattice("pentagon").unwrap(), Lattice::pentagon());
        assert_eq!(parse_lattice("chain:3").unwrap(), Lattice::chain(3));
        assert_eq!(parse_lattice("diamond:4").unwrap(), Lattice::diamond(4).unwrap());
        for bad in ["grid:2", "chain", "chain:x", "torus:3", "pentagon:1", "diamond:1,2"] {
            assert!(matches!(parse_lattice(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn lattice_json_round_trip() {
        for l in [Lattice::pentagon(), Lattice::grid(2, 1).unwrap(), Lattice::diamond(3).unwrap()] {
            let text = lattice_to_json(&l);
            let back = lattice_from_json(&text).unwrap();
            assert_eq!(back, l);
            assert_eq!(lattice_to_json(&back), text);
        }
    }

    #[test]
    fn cyclic_cover_json() {
        let text = r#"{"labels": ["p", "q"], "covers": [[0, 1], [1, 0]]}"#;
        match parse_lattice(text) {
            Err(Error::Cycle(names)) => {
                assert!(names.contains(&"p".to_string()) && names.contains(&"q".to_string()))
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn arrow_set_round_trip() {
        let g = Lattice::grid(2, 1).unwrap();
        let t = ArrowSet::from_pairs(&g, &[(0, 1), (2, 3)]).unwrap().generate_transfer();
        let text = serialize_arrow_set(&t);
        assert!(text.starts_with(r#"{"lattice":"grid:2,1","arrows":[[0,1],"#));
        let back = parse_arrow_set(&g, &text).unwrap();
        assert_eq!(back.bits(), t.bits());
        assert_eq!(serialize_arrow_set(&back), text);
    }

    #[test]
    fn arrow_set_errors() {
        let c = Lattice::chain(3);
        let text = r#"{"lattice": "chain:3", "arrows": [[2, 1]]}"#;
        assert_eq!(parse_arrow_set(&c, text), Err(Error::NotComparable("2".into(), "1".into())));
        let text = r#"{"lattice": "chain:3", "arrows": [[0, 9]]}"#;
        assert_eq!(parse_arrow_set(&c, text), Err(Error::UnknownElement("9".into())));
        let text = r#"{"lattice": "chain:2", "arrows": []}"#;
        assert_eq!(parse_arrow_set(&c, text), Err(Error::MixedLattices));
        let text = r#"{"arrows": [["0", "3"]]}"#;
        assert_eq!(parse_arrow_set(&c, text).unwrap().len(), 1);
    }

    #[test]
    fn model_structure_round_trip() {
        let sq = Lattice::grid(1, 1).unwrap();
        let w = ArrowSet::complete(&sq);
        for t in af_interval(&w).unwrap().members {
            let m = assemble_model_structure(&w, &t).unwrap();
            let text = serialize_model_structure(&m);
            assert_eq!(parse_model_structure(&sq, &text).unwrap(), m);
            assert_eq!(lattice_of_document(&text).unwrap(), sq);
        }
    }

    #[test]
    fn wfs_round_trip() {
        let c = Lattice::chain(2);
        let t = ArrowSet::from_pairs(&c, &[(1, 2)]).unwrap();
        let w = Wfs::from_transfer(&t).unwrap();
        let text = serialize_wfs(&w);
        assert_eq!(parse_wfs(&c, &text).unwrap(), w);
    }

    #[test]
    fn custom_lattice_embeds_json() {
        let l = lattice_from_json(r#"{"labels": ["lo", "hi"], "covers": [[0, 1]]}"#).unwrap();
        let s = ArrowSet::complete(&l);
        let text = serialize_arrow_set(&s);
        assert!(text.contains(r#""labels":["lo","hi"]"#));
        assert_eq!(parse_arrow_set(&l, &text).unwrap(), s);
    }

    #[test]
    fn dot_output() {
        let p = Lattice::pentagon();
        let dot = dot_export(&p, &[]).unwrap();
        assert_eq!(dot.matches("[label=").count(), 5);
        assert_eq!(dot.matches("color=gray").count(), 5);
        assert_eq!(dot, dot_export(&p, &[]).unwrap());

        let g = Lattice::grid(2, 1).unwrap();
        let t = ArrowSet::from_pairs(&g, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let ed = crate::lifting::downward_extension(&t);
        let dot = dot_export(&g, &[(t, "color=blue"), (ed, "color=red")]).unwrap();
        assert_eq!(dot.matches("color=blue").count(), 3);
        assert_eq!(dot.matches("color=red").count(), 6);

        let other = Lattice::chain(1);
        assert_eq!(dot_export(&g, &[(ArrowSet::empty(&other), "")]), Err(Error::MixedLattices));

        let d = Lattice::diamond(2).unwrap();
        assert!(dot_export(&d, &[]).unwrap().contains("\"⊥\""));
    }
}
