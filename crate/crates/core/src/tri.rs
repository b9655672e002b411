//! Edge-colored ideal triangulations: data model, the `qtv-triangulation v1`
//! text format, and the built-in census.
//!
//! Only the edge-class pattern is stored. Each tetrahedron lists the classes
//! of its edges in the order `(e12, e13, e23, e34, e24, e14)`, which is the
//! slot order of the 6j-symbol `{e12 e13 e23; e34 e24 e14}`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const HEADER: &str = "qtv-triangulation v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTriangulation {
    pub name: String,
    pub num_edge_classes: usize,
    pub tets: Vec<[u32; 6]>,
}

impl ColoredTriangulation {
    /// Checks indices and non-emptiness; unused classes are allowed.
    pub fn new(name: impl Into<String>, num_edge_classes: usize, tets: Vec<[u32; 6]>) -> Result<Self> {
        if tets.is_empty() {
            return Err(Error::EmptyTriangulation);
        }
        for (t, tet) in tets.iter().enumerate() {
            for &c in tet {
                if c as usize >= num_edge_classes {
                    return Err(Error::Index { index: c as usize, edges: num_edge_classes, line: t + 1 });
                }
            }
        }
        Ok(ColoredTriangulation { name: name.into(), num_edge_classes, tets })
    }

    /// Number of tet slots occupied by each edge class.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.num_edge_classes];
        for tet in &self.tets {
            for &c in tet {
                m[c as usize] += 1;
            }
        }
        m
    }
}

/// Reference geometry for a census entry. Used only as a comparison target.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldMeta {
    pub vol: f64,
    pub cs: Option<f64>,
    pub source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

pub fn parse(text: &str) -> Result<ColoredTriangulation> {
    let mut saw_header = false;
    let mut name = String::new();
    let mut edges: Option<(usize, usize)> = None; // (E, line)
    let mut tets = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(&(col, first)) = tokens.first() else { continue };
        let syntax = |col: usize, msg: String| Error::Syntax { line: line_no, col, msg };

        if !saw_header {
            if content.trim() != HEADER {
                return Err(syntax(col, format!("expected `{HEADER}`")));
            }
            saw_header = true;
            continue;
        }
        match first {
            "name" => {
                if edges.is_some() || !name.is_empty() {
                    return Err(syntax(col, "`name` must appear once, before `edges`".into()));
                }
                let rest = content.trim_start()["name".len()..].trim();
                if rest.is_empty() {
                    return Err(syntax(col + 4, "missing name".into()));
                }
                name = rest.to_string();
            }
            "edges" => {
                if edges.is_some() {
                    return Err(syntax(col, "duplicate `edges` line".into()));
                }
                if tokens.len() != 2 {
                    return Err(syntax(col, "expected `edges <count>`".into()));
                }
                let (c, tok) = tokens[1];
                let e: usize = tok.parse().map_err(|_| syntax(c, format!("bad edge count `{tok}`")))?;
                if e == 0 {
                    return Err(syntax(c, "edge count must be positive".into()));
                }
                edges = Some((e, line_no));
            }
            "tet" => {
                let Some((e, _)) = edges else {
                    return Err(syntax(col, "`tet` before `edges`".into()));
                };
                if tokens.len() != 7 {
                    let c = tokens.get(7).map_or(content.trim_end().chars().count() + 1, |t| t.0);
                    return Err(syntax(c, format!("expected 6 edge classes, found {}", tokens.len() - 1)));
                }
                let mut tet = [0u32; 6];
                for (slot, &(c, tok)) in tet.iter_mut().zip(&tokens[1..]) {
                    let v: u32 = tok.parse().map_err(|_| syntax(c, format!("bad edge class `{tok}`")))?;
                    if v as usize >= e {
                        return Err(Error::Index { index: v as usize, edges: e, line: line_no });
                    }
                    *slot = v;
                }
                tets.push(tet);
            }
            other => return Err(syntax(col, format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(Error::Syntax { line: 1, col: 1, msg: format!("expected `{HEADER}`") });
    }
    let Some((e, _)) = edges else {
        return Err(Error::Syntax { line: text.lines().count().max(1), col: 1, msg: "missing `edges` line".into() });
    };
    if tets.is_empty() {
        return Err(Error::EmptyTriangulation);
    }
    Ok(ColoredTriangulation { name, num_edge_classes: e, tets })
}

/// Whitespace-separated tokens with 1-based character columns.
fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (byte, ch)) in s.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, byte)),
            (true, Some((c, b))) => {
                out.push((c, &s[b..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, b)) = start {
        out.push((c, &s[b..]));
    }
    out
}

pub fn serialize(ct: &ColoredTriangulation) -> String {
    let mut s = String::new();
    s.push_str(HEADER);
    s.push('\n');
    if !ct.name.is_empty() {
        let _ = writeln!(s, "name {}", ct.name);
    }
    let _ = writeln!(s, "edges {}", ct.num_edge_classes);
    for t in &ct.tets {
        let _ = writeln!(s, "tet {} {} {} {} {} {}", t[0], t[1], t[2], t[3], t[4], t[5]);
    }
    s
}

pub fn validate(ct: &ColoredTriangulation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if ct.tets.is_empty() {
        out.push(Diagnostic { severity: Severity::Error, message: "no tetrahedra".into() });
        return out;
    }
    let mut mult = vec![0usize; ct.num_edge_classes];
    for (t, tet) in ct.tets.iter().enumerate() {
        for &c in tet {
            match mult.get_mut(c as usize) {
                Some(m) => *m += 1,
                None => out.push(Diagnostic {
                    severity: Severity::Error,
                    message: format!("tet {t}: edge class {c} out of range"),
                }),
            }
        }
    }
    for (c, &m) in mult.iter().enumerate() {
        if m == 0 {
            out.push(Diagnostic { severity: Severity::Warning, message: format!("edge class {c} is unused") });
        } else {
            out.push(Diagnostic { severity: Severity::Info, message: format!("edge class {c} occurs {m} times") });
        }
    }
    out
}

/// Names accepted by [`census`].
pub const CENSUS_NAMES: [&str; 13] = [
    "unknot", "trefoil", "hopf", "t24", "t26", "fig8", "fig8_sister", "k52", "m36", "k61", "gieseking",
    "n21", "mmin",
];

const A: u32 = 0;
const B: u32 = 1;
const C: u32 = 2;
const D: u32 = 3;

fn meta(vol: f64, source: &str) -> Option<ManifoldMeta> {
    Some(ManifoldMeta { vol, cs: None, source: source.to_string() })
}

pub fn census(name: &str) -> Result<(ColoredTriangulation, Option<ManifoldMeta>)> {
    let (tets, m): (Vec<[u32; 6]>, _) = match name {
        "unknot" => (vec![[A, A, A, A, A, B], [A, A, A, A, A, A]], None),
        "trefoil" => (vec![[A, A, A, A, A, B]; 2], None),
        "hopf" => (vec![[A, A, A, A, A, C], [A, A, A, B, B, B], [A, A, A, B, B, B]], None),
        "t24" => (vec![[A, A, B, C, C, C], [A, A, B, C, C, C], [B, B, B, A, A, D], [B, B, B, A, A, A]], None),
        "t26" => (vec![[A, A, C, B, B, A], [A, A, C, B, B, A], [B, B, C, B, B, B], [B, B, D, B, B, C]], None),
        // Every face of this pattern is (a,a,b) or (b,b,a).
        "fig8" => (vec![[A, A, B, A, B, B]; 2], meta(2.02988, "figure-eight knot complement")),
        "fig8_sister" => (vec![[A, A, B, A, B, B]; 2], meta(2.02988, "figure-eight sister")),
        "k52" => (vec![[A, A, B, B, C, C], [A, A, B, B, C, C], [A, B, C, B, B, C]], meta(2.82812, "5_2 knot complement")),
        "m36" => (vec![[A, A, B, B, C, C], [A, A, B, B, C, C], [A, B, C, A, A, C]], meta(2.82812, "census manifold M3_6")),
        "k61" => (
            vec![[A, A, B, A, D, B], [A, C, C, B, B, D], [B, B, C, A, C, D], [B, B, C, B, D, C]],
            meta(3.163963, "6_1 knot complement"),
        ),
        "gieseking" => (vec![[A; 6]], meta(1.014942, "Gieseking manifold")),
        "n21" => (vec![[A, B, B, A, B, B]; 2], meta(1.831931, "census manifold N2_1")),
        "mmin" => (vec![[A; 6]; 2], meta(6.452, "smallest manifold with totally geodesic boundary")),
        _ => return Err(Error::UnknownCensusName(name.to_string())),
    };
    let e = tets.iter().flatten().max().map_or(0, |&m| m as usize + 1);
    Ok((ColoredTriangulation::new(name, e, tets)?, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIG8: &str = "qtv-triangulation v1\n# figure eight\nname fig8\nedges 2\ntet 0 0 1 0 1 1\ntet 0 0 1 0 1 1 # second\n";

    #[test]
    fn parses_two_tet_file() {
        let ct = parse(FIG8).unwrap();
        assert_eq!(ct.tets.len(), 2);
        assert_eq!(ct.num_edge_classes, 2);
        assert_eq!(ct.name, "fig8");
        assert_eq!(ct, census("fig8").unwrap().0);
    }

    #[test]
    fn index_error() {
        let err = parse("qtv-triangulation v1\nedges 2\ntet 0 0 5 0 0 0\n").unwrap_err();
        assert_eq!(err, Error::Index { index: 5, edges: 2, line: 3 });
    }

    #[test]
    fn syntax_errors_carry_position() {
        let cases = [
            ("hello\n", 1, 1),
            ("qtv-triangulation v1\nedges x\n", 2, 7),
            ("qtv-triangulation v1\nedges 1\ntet 0 0 0 0 0\n", 3, 14),
            ("qtv-triangulation v1\nedges 1\n  tet 0 0 z 0 0 0\n", 3, 11),
            ("qtv-triangulation v1\ntet 0 0 0 0 0 0\n", 2, 1),
            ("qtv-triangulation v1\nedges 1\nfoo\n", 3, 1),
        ];
        for (text, line, col) in cases {
            match parse(text) {
                Err(Error::Syntax { line: l, col: c, .. }) => assert_eq!((l, c), (line, col), "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_triangulation() {
        assert_eq!(parse("qtv-triangulation v1\nedges 3\n"), Err(Error::EmptyTriangulation));
        assert_eq!(ColoredTriangulation::new("x", 1, vec![]), Err(Error::EmptyTriangulation));
    }

    #[test]
    fn census_entries() {
        for name in CENSUS_NAMES {
            let (ct, _) = census(name).unwrap();
            assert!(validate(&ct).iter().all(|d| d.severity == Severity::Info), "{name}");
            assert_eq!(parse(&serialize(&ct)).unwrap(), ct);
        }
        let (ct, m) = census("fig8").unwrap();
        assert_eq!((ct.tets.len(), ct.num_edge_classes), (2, 2));
        assert_eq!(m.unwrap().vol, 2.02988);
        let (ct, m) = census("mmin").unwrap();
        assert_eq!((ct.tets.len(), ct.num_edge_classes), (2, 1));
        assert_eq!(m.unwrap().vol, 6.452);
        let (ct, _) = census("gieseking").unwrap();
        assert_eq!((ct.tets.len(), ct.num_edge_classes), (1, 1));
        assert_eq!(census("k61").unwrap().0.num_edge_classes, 4);
        assert!(census("unknot").unwrap().1.is_none());
        assert_eq!(census("nope"), Err(Error::UnknownCensusName("nope".into())));
    }

    #[test]
    fn validate_reports() {
        let ct = ColoredTriangulation::new("x", 3, vec![[0, 0, 1, 0, 1, 1]]).unwrap();
        let d = validate(&ct);
        assert!(d.iter().any(|x| x.severity == Severity::Warning && x.message.contains('2')));
        let empty = ColoredTriangulation { name: String::new(), num_edge_classes: 1, tets: vec![] };
        assert_eq!(validate(&empty)[0].severity, Severity::Error);
        assert_eq!(ct.multiplicities(), vec![3, 3, 0]);
    }

    proptest! {
        #[test]
        fn round_trip(
            name in "[A-Za-z0-9_][A-Za-z0-9_ .-]{0,20}[A-Za-z0-9_]|",
            e in 1usize..8,
            raw in prop::collection::vec(prop::array::uniform6(0u32..100), 1..10),
        ) {
            let tets = raw.into_iter().map(|t| t.map(|c| c % e as u32)).collect();
            let ct = ColoredTriangulation::new(name, e, tets).unwrap();
            prop_assert_eq!(parse(&serialize(&ct)).unwrap(), ct);
        }
    }
}
