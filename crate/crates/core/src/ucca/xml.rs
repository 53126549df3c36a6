//! UCCA standard XML (layer 0 terminals, layer 1 foundational units).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{validate, CategorySet, Terminal, UccaError, UccaPassage, UccaUnit};

/// Lenient parse result: the passage plus anything dropped on ingest.
#[derive(Debug, Clone)]
pub struct XmlParse {
    pub passage: UccaPassage,
    pub warnings: Vec<String>,
}

fn id_number(id: &str) -> u64 {
    id.rsplit('.').next().and_then(|n| n.parse().ok()).unwrap_or(u64::MAX)
}

/// Serializes one passage. Ids are regenerated in preorder.
pub fn serialize_xml(p: &UccaPassage) -> String {
    let c = p.canonicalize();
    let mut s = String::new();
    write_root(&c, &mut s);
    s
}

/// Serializes several passages into one document under a `<passages>` element.
pub fn serialize_xml_many(ps: &[UccaPassage]) -> String {
    let mut s = String::from("<passages>\n");
    for p in ps {
        write_root(&p.canonicalize(), &mut s);
    }
    s.push_str("</passages>\n");
    s
}

fn write_root(c: &UccaPassage, s: &mut String) {
    let _ = writeln!(
        s,
        "<root passageID=\"{}\" annotationID=\"0\">",
        escape(c.passage_id.as_str())
    );
    s.push_str("  <attributes />\n  <layer layerID=\"0\">\n    <attributes />\n");
    for (i, t) in c.terminals.iter().enumerate() {
        let kind = if t.punct { "Punctuation" } else { "Word" };
        let _ = writeln!(
            s,
            "    <node ID=\"0.{}\" type=\"{kind}\">\n      <attributes paragraph=\"1\" paragraph_position=\"{}\" text=\"{}\" />\n    </node>",
            i + 1,
            i + 1,
            escape(t.text.as_str())
        );
    }
    s.push_str("  </layer>\n  <layer layerID=\"1\">\n    <attributes />\n");
    let mut ids: Vec<&String> = c.units.keys().collect();
    ids.sort_by_key(|id| id_number(id));
    for id in ids {
        let u = &c.units[id];
        let all_punct = !u.anchors.is_empty()
            && u.anchors
                .iter()
                .all(|a| c.terminals.get(a - 1).is_some_and(|t| t.punct));
        let kind = if all_punct { "PNCT" } else { "FN" };
        let _ = writeln!(
            s,
            "    <node ID=\"{}\" type=\"{kind}\">\n      <attributes />",
            escape(id.as_str())
        );
        for a in &u.anchors {
            let _ = writeln!(
                s,
                "      <edge toID=\"0.{a}\" type=\"Terminal\">\n        <attributes />\n        <category tag=\"Terminal\" />\n      </edge>"
            );
        }
        for e in c.edges.iter().filter(|e| &e.parent == id) {
            let first = e.categories.first().map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(s, "      <edge toID=\"{}\" type=\"{first}\">", escape(e.child.as_str()));
            if e.remote {
                s.push_str("        <attributes remote=\"True\" />\n");
            } else {
                s.push_str("        <attributes />\n");
            }
            for cat in e.categories.iter() {
                let _ = writeln!(s, "        <category tag=\"{cat}\" />");
            }
            s.push_str("      </edge>\n");
        }
        s.push_str("    </node>\n");
    }
    s.push_str("  </layer>\n</root>\n");
}

#[derive(Default)]
struct RawNode {
    layer: String,
    kind: String,
    text: String,
    implicit: bool,
    edges: Vec<RawEdge>,
}

#[derive(Default)]
struct RawEdge {
    to: String,
    kind: String,
    remote: bool,
    tags: Vec<String>,
}

#[derive(Default)]
struct RawPassage {
    id: String,
    nodes: Vec<(String, RawNode)>,
}

fn attrs(e: &BytesStart<'_>) -> Result<HashMap<String, String>, UccaError> {
    let mut m = HashMap::new();
    for a in e.attributes() {
        let a = a.map_err(|x| UccaError::Malformed(x.to_string()))?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a
            .unescape_value()
            .map_err(|x| UccaError::Malformed(x.to_string()))?
            .into_owned();
        m.insert(key, value);
    }
    Ok(m)
}

fn read_raw(input: &str) -> Result<Vec<RawPassage>, UccaError> {
    let mut reader = Reader::from_str(input);
    reader.config_mut().trim_text(true);
    let mut out: Vec<RawPassage> = Vec::new();
    let mut layer = String::new();
    let mut in_node = false;
    let mut in_edge = false;
    loop {
        let ev = reader
            .read_event()
            .map_err(|e| UccaError::Malformed(format!("xml: {e}")))?;
        let (start, empty) = match &ev {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            Event::End(e) => {
                match e.name().as_ref() {
                    b"node" => in_node = false,
                    b"edge" => in_edge = false,
                    b"layer" => layer.clear(),
                    _ => {}
                }
                continue;
            }
            Event::Eof => break,
            _ => continue,
        };
        let Some(e) = start else { continue };
        let a = attrs(&e)?;
        match e.name().as_ref() {
            b"root" => out.push(RawPassage {
                id: a.get("passageID").cloned().unwrap_or_default(),
                nodes: Vec::new(),
            }),
            b"layer" => {
                if !empty {
                    layer = a.get("layerID").cloned().unwrap_or_default();
                }
            }
            b"node" => {
                let p = out
                    .last_mut()
                    .ok_or_else(|| UccaError::Malformed("node outside root".into()))?;
                let id = a
                    .get("ID")
                    .cloned()
                    .ok_or_else(|| UccaError::Malformed("node without ID".into()))?;
                p.nodes.push((
                    id,
                    RawNode {
                        layer: layer.clone(),
                        kind: a.get("type").cloned().unwrap_or_default(),
                        ..Default::default()
                    },
                ));
                in_node = !empty;
            }
            b"edge" => {
                let node = out
                    .last_mut()
                    .and_then(|p| p.nodes.last_mut())
                    .filter(|_| in_node)
                    .ok_or_else(|| UccaError::Malformed("edge outside node".into()))?;
                node.1.edges.push(RawEdge {
                    to: a
                        .get("toID")
                        .cloned()
                        .ok_or_else(|| UccaError::Malformed("edge without toID".into()))?,
                    kind: a.get("type").cloned().unwrap_or_default(),
                    ..Default::default()
                });
                in_edge = !empty;
            }
            b"attributes" => {
                let Some(node) = out.last_mut().and_then(|p| p.nodes.last_mut()) else {
                    continue;
                };
                if in_edge {
                    if let Some(edge) = node.1.edges.last_mut() {
                        edge.remote = a.get("remote").is_some_and(|v| v == "True");
                    }
                } else if in_node {
                    node.1.implicit = a.get("implicit").is_some_and(|v| v == "True");
                    if let Some(t) = a.get("text") {
                        node.1.text = t.clone();
                    }
                }
            }
            b"category" if in_edge => {
                // Refinement-layer categories carry a parent_name; only foundational tags are kept.
                if a.get("parent_name").is_some_and(|v| !v.is_empty()) {
                    continue;
                }
                if let Some(edge) = out
                    .last_mut()
                    .and_then(|p| p.nodes.last_mut())
                    .and_then(|n| n.1.edges.last_mut())
                {
                    if let Some(tag) = a.get("tag") {
                        edge.tags.push(tag.clone());
                    }
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

fn build(raw: RawPassage) -> Result<XmlParse, UccaError> {
    let mut warnings = Vec::new();
    let mut terminals: Vec<(u64, String, Terminal)> = Vec::new();
    for (id, n) in &raw.nodes {
        if n.layer == "0" {
            terminals.push((
                id_number(id),
                id.clone(),
                Terminal {
                    text: n.text.clone(),
                    punct: n.kind == "Punctuation",
                },
            ));
        }
    }
    terminals.sort_by_key(|t| t.0);
    let position: HashMap<String, usize> = terminals
        .iter()
        .enumerate()
        .map(|(i, t)| (t.1.clone(), i + 1))
        .collect();

    let mut dropped: HashSet<&str> = HashSet::new();
    for (id, n) in &raw.nodes {
        if n.layer == "1" && (n.implicit || n.kind == "LKG") {
            if n.implicit {
                warnings.push(format!("dropped implicit unit {id}"));
            }
            dropped.insert(id.as_str());
        }
    }
    let layer1: Vec<&(String, RawNode)> = raw
        .nodes
        .iter()
        .filter(|(id, n)| n.layer == "1" && !dropped.contains(id.as_str()))
        .collect();
    let known: HashSet<&str> = layer1.iter().map(|(id, _)| id.as_str()).collect();

    let mut p = UccaPassage {
        passage_id: raw.id.clone(),
        terminals: terminals.into_iter().map(|t| t.2).collect(),
        units: BTreeMap::new(),
        edges: Vec::new(),
        root: String::new(),
    };
    for (id, n) in &layer1 {
        let mut anchors = BTreeSet::new();
        for e in &n.edges {
            if e.kind == "Terminal" || e.tags.iter().any(|t| t == "Terminal") {
                let pos = position
                    .get(e.to.as_str())
                    .ok_or_else(|| UccaError::Malformed(format!("terminal edge from {id} to unknown {}", e.to)))?;
                anchors.insert(*pos);
            }
        }
        p.units.insert(
            id.clone(),
            UccaUnit {
                id: id.clone(),
                anchors,
            },
        );
    }
    for (id, n) in &layer1 {
        for e in &n.edges {
            if e.kind == "Terminal" || e.tags.iter().any(|t| t == "Terminal") {
                continue;
            }
            if e.kind == "LinkRelation" || e.kind == "LinkArgument" {
                continue;
            }
            if dropped.contains(e.to.as_str()) {
                continue;
            }
            if !known.contains(e.to.as_str()) {
                return Err(UccaError::Malformed(format!("edge from {id} to unknown unit {}", e.to)));
            }
            let categories: CategorySet = if e.tags.is_empty() {
                e.kind.parse()?
            } else {
                let mut s = CategorySet::EMPTY;
                for t in &e.tags {
                    s.insert(t.parse()?);
                }
                s
            };
            p.add_edge(id, &e.to, categories, e.remote);
        }
    }
    p.root = if known.contains("1.1") {
        "1.1".to_string()
    } else {
        let with_parent: HashSet<&str> = p.edges.iter().filter(|e| !e.remote).map(|e| e.child.as_str()).collect();
        layer1
            .iter()
            .map(|(id, _)| id.as_str())
            .find(|id| !with_parent.contains(id))
            .ok_or_else(|| UccaError::Malformed("no root unit".into()))?
            .to_string()
    };
    // Units whose only content was implicit children end up empty and are pruned.
    loop {
        let empty: Vec<String> = p
            .units
            .values()
            .filter(|u| u.id != p.root && u.anchors.is_empty() && p.primary_children(&u.id).next().is_none())
            .map(|u| u.id.clone())
            .filter(|id| {
                raw.nodes
                    .iter()
                    .any(|(rid, n)| rid == id && n.edges.iter().any(|e| dropped.contains(e.to.as_str())))
            })
            .collect();
        if empty.is_empty() {
            break;
        }
        for id in empty {
            warnings.push(format!("dropped unit {id} left empty by implicit removal"));
            p.units.remove(&id);
            p.edges.retain(|e| e.parent != id && e.child != id);
        }
    }
    Ok(XmlParse { passage: p, warnings })
}

/// Parses every `<root>` element in the input.
pub fn parse_xml_all(input: &str) -> Result<Vec<XmlParse>, UccaError> {
    read_raw(input)?.into_iter().map(build).collect()
}

/// Parses the first passage, keeping whatever structure is present.
pub fn parse_xml(input: &str) -> Result<XmlParse, UccaError> {
    parse_xml_all(input)?
        .into_iter()
        .next()
        .ok_or_else(|| UccaError::Malformed("no <root> element".into()))
}

/// Parses the first passage and rejects it unless it validates.
pub fn parse_xml_strict(input: &str) -> Result<UccaPassage, UccaError> {
    let parsed = parse_xml(input)?;
    let violations = validate(&parsed.passage);
    if violations.is_empty() {
        Ok(parsed.passage)
    } else {
        Err(UccaError::Invalid {
            id: parsed.passage.passage_id.clone(),
            violations: violations.iter().map(|v| v.to_string()).collect(),
        })
    }
}
