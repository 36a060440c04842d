//! Plain-text formats for point sets, queries, set families and reports.
//!
//! Numbers are written in the shortest form that reads back to the same
//! `f64`. Blank lines and lines starting with `#` are skipped on input.

use crate::error::{Error, Result};
use crate::geometry::{BallRange, BoxRange, HalfspaceRange, Hyperplane, PointSet, Range, Side, SimplexRange};
use crate::hardness::SetIntersectionInstance;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| parse_err(line, format!("not a number: `{tok}`")))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Header line `d n`, then one point per line.
pub fn write_points(ps: &PointSet) -> String {
    let mut out = format!("{} {}\n", ps.dim(), ps.len());
    for p in ps.iter() {
        out.push_str(&join(p));
        out.push('\n');
    }
    out
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `d n` header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let [d, n] = h[..] else {
        return Err(parse_err(hl, "header must be `d n`"));
    };
    let d: usize = d.parse().map_err(|_| parse_err(hl, format!("bad dimension `{d}`")))?;
    let n: usize = n.parse().map_err(|_| parse_err(hl, format!("bad point count `{n}`")))?;
    if d == 0 {
        return Err(parse_err(hl, "dimension must be at least 1"));
    }
    let mut coords = Vec::with_capacity(n.saturating_mul(d).min(1 << 24));
    let mut seen = 0;
    for (ln, line) in lines {
        let before = coords.len();
        for tok in line.split_whitespace() {
            let x = parse_num(tok, ln)?;
            if !x.is_finite() {
                return Err(parse_err(ln, "coordinates must be finite"));
            }
            coords.push(x);
        }
        if coords.len() - before != d {
            return Err(parse_err(ln, format!("expected {d} coordinates, found {}", coords.len() - before)));
        }
        seen += 1;
    }
    if seen != n {
        return Err(parse_err(hl, format!("header announces {n} points, found {seen}")));
    }
    PointSet::new(d, coords)
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(" ")
}

pub fn write_query(q: &Range) -> Result<String> {
    Ok(match q {
        Range::Box(b) => format!("BOX {} {}", join(&b.lo), join(&b.hi)),
        Range::Simplex(s) => format!("SIMPLEX {}", join(&s.vertices().concat())),
        Range::Halfspace(h) => format!(
            "HALFSPACE {} {} {}",
            join(&h.plane.coeffs),
            fmt_f64(h.plane.offset),
            if h.side == Side::Below { "below" } else { "above" }
        )
        .replace("HALFSPACE  ", "HALFSPACE "),
        Range::Ball(b) => format!("BALL {} {}", join(&b.center), fmt_f64(b.radius)),
        Range::Polytope(_) => return Err(Error::InvalidParameter("polytope queries have no text form".into())),
    })
}

pub fn write_queries(qs: &[Range]) -> Result<String> {
    let mut out = String::new();
    for q in qs {
        out.push_str(&write_query(q)?);
        out.push('\n');
    }
    Ok(out)
}

/// One query per line; the dimension is inferred from the number count.
pub fn parse_query(line: &str, ln: usize) -> Result<Range> {
    let mut toks = line.split_whitespace();
    let kind = toks.next().ok_or_else(|| parse_err(ln, "empty query"))?;
    let mut rest: Vec<&str> = toks.collect();
    let side = if kind == "HALFSPACE" {
        match rest.pop() {
            Some("below") => Side::Below,
            Some("above") => Side::Above,
            other => return Err(parse_err(ln, format!("halfspace side must be `below` or `above`, got {other:?}"))),
        }
    } else {
        Side::Below
    };
    let nums = rest.iter().map(|t| parse_num(t, ln)).collect::<Result<Vec<f64>>>()?;
    let k = nums.len();
    let wrap = |e: Error| parse_err(ln, e.to_string());
    match kind {
        "BOX" if k >= 2 && k % 2 == 0 => {
            let (lo, hi) = nums.split_at(k / 2);
            BoxRange::new(lo.to_vec(), hi.to_vec()).map(Range::Box).map_err(wrap)
        }
        "SIMPLEX" => {
            let d = (1..=k).find(|d| d * (d + 1) >= k).filter(|d| d * (d + 1) == k);
            let d = d.ok_or_else(|| parse_err(ln, format!("{k} numbers do not form d+1 points in d dimensions")))?;
            SimplexRange::new(nums.chunks(d).map(<[f64]>::to_vec).collect()).map(Range::Simplex).map_err(wrap)
        }
        "HALFSPACE" if k >= 2 => {
            let plane = Hyperplane::new(nums[..k - 1].to_vec(), nums[k - 1]).map_err(wrap)?;
            Ok(Range::Halfspace(HalfspaceRange::new(plane, side)))
        }
        "BALL" if k >= 2 => BallRange::new(nums[..k - 1].to_vec(), nums[k - 1]).map(Range::Ball).map_err(wrap),
        "BOX" | "HALFSPACE" | "BALL" => Err(parse_err(ln, format!("wrong number count {k} for {kind}"))),
        _ => Err(parse_err(ln, format!("unknown query kind `{kind}`"))),
    }
}

pub fn parse_queries(text: &str) -> Result<Vec<Range>> {
    content_lines(text).map(|(ln, l)| parse_query(l, ln)).collect()
}

/// Header line `m`, then one set per line as `size v1 .. v_size`.
pub fn write_sets(inst: &SetIntersectionInstance) -> String {
    let mut out = format!("{}\n", inst.len());
    for s in inst.sets() {
        out.push_str(&s.len().to_string());
        for &v in s {
            out.push(' ');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

pub fn parse_sets(text: &str) -> Result<SetIntersectionInstance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing set count"))?;
    let m: usize = header.parse().map_err(|_| parse_err(hl, format!("bad set count `{header}`")))?;
    let mut sets = Vec::with_capacity(m.min(1 << 20));
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let k: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "each set starts with its size"))?;
        let vals = toks.map(|t| parse_num(t, ln)).collect::<Result<Vec<f64>>>()?;
        if vals.len() != k {
            return Err(parse_err(ln, format!("set announces {k} values, found {}", vals.len())));
        }
        sets.push(vals);
    }
    if sets.len() != m {
        return Err(parse_err(hl, format!("header announces {m} sets, found {}", sets.len())));
    }
    SetIntersectionInstance::new(sets)
}

/// A report: `key=value` lines, a blank line, then a tab-separated table
/// whose first row is the header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub fields: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}={v}\n"));
        }
        if !self.columns.is_empty() {
            out.push('\n');
            out.push_str(&self.columns.join("\t"));
            out.push('\n');
            for r in &self.rows {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report> {
        let mut rep = Report::default();
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        for (ln, line) in lines.by_ref() {
            if line.is_empty() {
                break;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| parse_err(ln, "expected `key=value`"))?;
            rep.fields.push((k.to_string(), v.to_string()));
        }
        if let Some((_, header)) = lines.next() {
            rep.columns = header.split('\t').map(str::to_string).collect();
            for (ln, line) in lines {
                let row: Vec<String> = line.split('\t').map(str::to_string).collect();
                if row.len() != rep.columns.len() {
                    return Err(parse_err(ln, format!("expected {} columns, found {}", rep.columns.len(), row.len())));
                }
                rep.rows.push(row);
            }
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6..1e6f64, any::<f64>().prop_filter("finite", |x| x.is_finite()), Just(-0.0), Just(0.1)]
    }

    proptest! {
        #[test]
        fn points_round_trip(d in 1usize..5, raw in prop::collection::vec(finite(), 0..60)) {
            let n = raw.len() / d;
            let ps = PointSet::new(d, raw[..n * d].to_vec()).unwrap();
            let back = parse_points(&write_points(&ps)).unwrap();
            prop_assert_eq!(back.dim(), d);
            let bits = |p: &PointSet| p.raw().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&ps));
        }

        #[test]
        fn queries_round_trip(d in 1usize..4, xs in prop::collection::vec(-1e3..1e3f64, 20), below in any::<bool>()) {
            let mut qs = vec![
                Range::Box(BoxRange::new(xs[..d].iter().map(|x| x - 1.0).collect(), xs[..d].to_vec()).unwrap()),
                Range::Ball(BallRange::new(xs[..d].to_vec(), xs[d].abs()).unwrap()),
                Range::Simplex(SimplexRange::new(xs.chunks(d).take(d + 1).map(<[f64]>::to_vec).collect()).unwrap()),
            ];
            if d >= 2 {
                let h = Hyperplane::new(xs[..d - 1].to_vec(), xs[d]).unwrap();
                qs.push(Range::Halfspace(HalfspaceRange::new(h, if below { Side::Below } else { Side::Above })));
            }
            let text = write_queries(&qs).unwrap();
            prop_assert_eq!(parse_queries(&text).unwrap(), qs);
        }

        #[test]
        fn report_round_trip(vals in prop::collection::vec(finite(), 0..12)) {
            let rep = Report {
                fields: vec![("structure".into(), "ortho".into()), ("slope".into(), fmt_f64(0.75))],
                columns: vec!["n".into(), "x".into()],
                rows: vals.iter().enumerate().map(|(i, &v)| vec![i.to_string(), fmt_f64(v)]).collect(),
            };
            prop_assert_eq!(Report::parse(&rep.write()).unwrap(), rep);
        }
    }

    #[test]
    fn query_lines() {
        let q = parse_query("HALFSPACE 0.5 -1 2 above", 1).unwrap();
        assert_eq!(q.dim(), 3);
        assert_eq!(write_query(&q).unwrap(), "HALFSPACE 0.5 -1.0 2.0 above");
        assert_eq!(parse_query("SIMPLEX 0 0 1 0 0 1", 1).unwrap().dim(), 2);
        assert!(parse_query("SIMPLEX 0 0 1 0 0", 1).is_err());
        assert!(parse_query("BOX 0 0 1", 1).is_err());
        assert!(parse_query("BALL 0 0 -1", 1).is_err());
        assert!(parse_query("CONE 1 2", 1).is_err());
        assert!(parse_query("HALFSPACE 1 2 sideways", 1).is_err());
    }

    #[test]
    fn malformed_points() {
        assert!(matches!(parse_points("2 2\n0 0\n1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_points("2 3\n0 0\n1 1\n").is_err());
        assert!(parse_points("2 1\n0 inf\n").is_err());
        assert!(parse_points("").is_err());
        let ps = parse_points("# comment\n2 1\n\n0.5 1e-3\n").unwrap();
        assert_eq!(ps.point(0), &[0.5, 1e-3]);
    }

    #[test]
    fn sets_round_trip() {
        let inst = SetIntersectionInstance::new(vec![vec![3.0, 1.0], vec![], vec![0.25]]).unwrap();
        let back = parse_sets(&write_sets(&inst)).unwrap();
        assert_eq!(back.sets(), inst.sets());
        assert!(parse_sets("2\n1 3\n").is_err());
        assert!(parse_sets("1\n2 3\n").is_err());
    }
}
