//! Newick input and output.
//!
//! Leaves carry integer labels `0..=r`; splits are read off the clades and
//! stored by their 0-free side. Output is canonical: leaf 0 first, then
//! children ordered by their smallest label, numbers printed with 12
//! significant digits.

use std::path::Path;

use crate::error::{Error, Result};
use crate::split::{LabelSet, Split};
use crate::tree::TreePoint;

#[derive(Debug)]
enum Node {
    Leaf { label: usize, len: Option<f64>, at: usize },
    Inner { children: Vec<Node>, len: Option<f64>, at: usize },
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && !b"(),:;".contains(&self.s[self.pos]) && !self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn length(&mut self) -> Result<Option<f64>> {
        if self.peek() != Some(b':') {
            return Ok(None);
        }
        self.pos += 1;
        let at = self.pos;
        let tok = self.token();
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(Error::Syntax { offset: at, msg: format!("bad branch length '{tok}'") }),
        }
    }

    fn node(&mut self, depth: usize) -> Result<Node> {
        if depth > 512 {
            return self.err("nesting too deep");
        }
        let at = self.pos;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut children = vec![self.node(depth + 1)?];
            loop {
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        children.push(self.node(depth + 1)?);
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
            // internal node names (e.g. support values) are ignored
            let _ = self.token();
            let len = self.length()?;
            Ok(Node::Inner { children, len, at })
        } else {
            let at = self.pos;
            let tok = self.token();
            if tok.is_empty() {
                return self.err("expected a leaf label");
            }
            let label = tok
                .parse::<usize>()
                .map_err(|_| Error::Syntax { offset: at, msg: format!("leaf label '{tok}' is not an integer") })?;
            let len = self.length()?;
            Ok(Node::Leaf { label, len, at })
        }
    }
}

fn parse_node(text: &str) -> Result<Node> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let root = p.node(0)?;
    if p.peek() != Some(b';') {
        return p.err("expected ';'");
    }
    p.pos += 1;
    if p.peek().is_some() {
        return p.err("trailing characters after ';'");
    }
    Ok(root)
}

fn max_label(n: &Node) -> usize {
    match n {
        Node::Leaf { label, .. } => *label,
        Node::Inner { children, .. } => children.iter().map(max_label).max().unwrap_or(0),
    }
}

/// Parse a Newick string over a known label set.
pub fn parse_tree(text: &str, labels: &LabelSet) -> Result<TreePoint> {
    let root = parse_node(text)?;
    build(&root, labels)
}

/// Parse a Newick string, taking `r` to be the largest leaf label.
pub fn parse_tree_infer(text: &str) -> Result<TreePoint> {
    let root = parse_node(text)?;
    let labels = LabelSet::new(max_label(&root))?;
    build(&root, &labels)
}

struct Acc {
    labels: LabelSet,
    seen: u64,
    pendants: Vec<f64>,
    interior: Vec<(u64, f64, usize)>,
}

fn build(root: &Node, labels: &LabelSet) -> Result<TreePoint> {
    if matches!(root, Node::Leaf { .. }) {
        return Err(Error::InvalidTree("tree has a single leaf".into()));
    }
    let mut acc = Acc { labels: *labels, seen: 0, pendants: vec![0.0; labels.num_pendants()], interior: Vec::new() };
    collect(root, true, &mut acc)?;
    let all = labels.full_mask() | 1;
    if acc.seen != all {
        let missing: Vec<String> = (0..=labels.r()).filter(|i| acc.seen & (1 << i) == 0).map(|i| i.to_string()).collect();
        return Err(Error::InvalidTree(format!("missing leaf labels: {}", missing.join(","))));
    }
    acc.interior.sort_by_key(|e| e.0);
    let mut edges: Vec<(Split, f64)> = Vec::new();
    let mut i = 0;
    while i < acc.interior.len() {
        let (mask, mut len, at) = acc.interior[i];
        let mut j = i + 1;
        // a degree-2 node yields the same split twice
        while j < acc.interior.len() && acc.interior[j].0 == mask {
            len += acc.interior[j].1;
            j += 1;
        }
        if !(len > 0.0) {
            return Err(Error::Syntax { offset: at, msg: format!("interior branch length {len} must be > 0") });
        }
        edges.push((Split::from_mask(labels, mask)?, len));
        i = j;
    }
    TreePoint::new(*labels, edges, acc.pendants)
}

/// Returns the clade mask (bit 0 included when leaf 0 is below).
fn collect(n: &Node, is_root: bool, acc: &mut Acc) -> Result<u64> {
    let (mask, len, at) = match n {
        Node::Leaf { label, len, at } => {
            if *label > acc.labels.r() {
                return Err(Error::Syntax { offset: *at, msg: format!("leaf label {label} exceeds r = {}", acc.labels.r()) });
            }
            let bit = 1u64 << label;
            if acc.seen & bit != 0 {
                return Err(Error::Syntax { offset: *at, msg: format!("duplicate leaf label {label}") });
            }
            acc.seen |= bit;
            (bit, *len, *at)
        }
        Node::Inner { children, len, at } => {
            let mut m = 0;
            for c in children {
                m |= collect(c, false, acc)?;
            }
            (m, *len, *at)
        }
    };
    if is_root {
        return Ok(mask);
    }
    let len = match (len, n) {
        (Some(l), _) => l,
        (None, Node::Leaf { .. }) => 0.0,
        (None, Node::Inner { .. }) => {
            return Err(Error::Syntax { offset: at, msg: "interior branch without a length".into() })
        }
    };
    let all = acc.labels.full_mask() | 1;
    let side = if mask & 1 != 0 { all ^ mask } else { mask };
    match side.count_ones() as usize {
        0 => return Err(Error::Syntax { offset: at, msg: "edge above the whole tree".into() }),
        1 => add_pendant(acc, side.trailing_zeros() as usize, len, at)?,
        k if k == acc.labels.r() => add_pendant(acc, 0, len, at)?,
        _ => acc.interior.push((side, len, at)),
    }
    Ok(mask)
}

fn add_pendant(acc: &mut Acc, label: usize, len: f64, at: usize) -> Result<()> {
    if len < 0.0 {
        return Err(Error::Syntax { offset: at, msg: format!("negative pendant length {len}") });
    }
    acc.pendants[label] += len;
    Ok(())
}

/// Format a number with 12 significant digits, shortest form.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.11e}", x).parse().unwrap_or(x);
    format!("{rounded}")
}

/// Canonical Newick string.
pub fn serialize_tree(t: &TreePoint) -> String {
    let mut out = String::from("(0:");
    out.push_str(&format_number(t.pendants()[0]));
    let full = t.labels().full_mask();
    write_children(t, full, &mut out);
    out.push_str(");");
    out
}

fn write_children(t: &TreePoint, within: u64, out: &mut String) {
    // maximal splits strictly inside `within`
    let inner: Vec<(Split, f64)> = t.edges().filter(|(s, _)| s.mask() & within == s.mask() && s.mask() != within).collect();
    let mut children: Vec<(u64, Option<f64>)> = inner
        .iter()
        .filter(|(s, _)| !inner.iter().any(|(o, _)| o.mask() != s.mask() && o.mask() & s.mask() == s.mask()))
        .map(|(s, l)| (s.mask(), Some(*l)))
        .collect();
    let covered = children.iter().fold(0u64, |a, c| a | c.0);
    for b in crate::split::bits(within & !covered) {
        children.push((1u64 << b, None));
    }
    children.sort_by_key(|c| c.0.trailing_zeros());
    for (mask, len) in children {
        out.push(',');
        match len {
            None => {
                let b = mask.trailing_zeros() as usize;
                out.push_str(&format!("{b}:{}", format_number(t.pendants()[b])));
            }
            Some(l) => {
                let mut sub = String::new();
                write_children(t, mask, &mut sub);
                out.push('(');
                out.push_str(&sub[1..]);
                out.push_str("):");
                out.push_str(&format_number(l));
            }
        }
    }
}

/// Read a file with one Newick tree per line. Blank lines and lines
/// starting with `#` are skipped. `r` is inferred from the first tree when
/// `labels` is `None`.
pub fn read_trees(path: &Path, labels: Option<LabelSet>) -> Result<Vec<TreePoint>> {
    let text = std::fs::read_to_string(path)?;
    parse_trees(&text, labels)
}

/// Same as [`read_trees`] on an in-memory string.
pub fn parse_trees(text: &str, labels: Option<LabelSet>) -> Result<Vec<TreePoint>> {
    let mut labels = labels;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t = match labels {
            Some(l) => parse_tree(line, &l),
            None => parse_tree_infer(line),
        }
        .map_err(|e| match e {
            Error::Syntax { offset, msg } => Error::Syntax { offset, msg: format!("line {}: {msg}", lineno + 1) },
            Error::InvalidTree(msg) => Error::InvalidTree(format!("line {}: {msg}", lineno + 1)),
            other => other,
        })?;
        labels = Some(*t.labels());
        out.push(t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_split_example() {
        let l = LabelSet::new(4).unwrap();
        let t = parse_tree("((1:1,2:1):3,3:1,4:1,0:0);", &l).unwrap();
        assert_eq!(t.splits(), &[Split::new(&l, &[1, 2]).unwrap()]);
        assert_eq!(t.lengths(), &[3.0]);
        assert_eq!(t.pendants(), &[0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn reads_star() {
        let t = parse_tree_infer("(0:0,1:1,2:1,3:1);").unwrap();
        assert_eq!(t.labels().r(), 3);
        assert_eq!(t.num_splits(), 0);
        assert_eq!(serialize_tree(&t), "(0:0,1:1,2:1,3:1);");
    }

    #[test]
    fn rerooted_input_gives_same_splits() {
        let l = LabelSet::new(4).unwrap();
        let a = parse_tree("((1:1,2:1):3,3:1,4:1,0:0);", &l).unwrap();
        // leaf 0 buried inside a clade
        let b = parse_tree("((0:0,3:1,4:1):3,1:1,2:1);", &l).unwrap();
        assert_eq!(a, b);
        // binary root: the two root edges merge into one split
        let c = parse_tree("(((1:1,2:1):1,0:0):2,(3:1,4:1):0.5);", &LabelSet::new(4).unwrap());
        let c = c.unwrap();
        assert_eq!(c.splits().len(), 2);
    }

    #[test]
    fn round_trip() {
        let l = LabelSet::new(5).unwrap();
        let t = parse_tree("(0:0.5,((1:1,2:0.25):1.5,3:2):0.125,(4:1,5:3):7.75);", &l).unwrap();
        let s = serialize_tree(&t);
        assert_eq!(parse_tree(&s, &l).unwrap(), t);
        assert_eq!(s, "(0:0.5,((1:1,2:0.25):1.5,3:2):0.125,(4:1,5:3):7.75);");
    }

    #[test]
    fn errors() {
        let l = LabelSet::new(3).unwrap();
        assert!(matches!(parse_tree("(0:0,1:1,2:1,3:1)", &l), Err(Error::Syntax { .. })));
        assert!(matches!(parse_tree("(0:0,1:1,1:1,3:1);", &l), Err(Error::Syntax { .. })));
        assert!(parse_tree("(0:0,1:1,3:1);", &l).is_err());
        assert!(parse_tree("(0:0,(1:1,2:1):0,3:1);", &l).is_err());
        assert!(parse_tree("(0:0,(1:1,2:1):-1,3:1);", &l).is_err());
        assert!(parse_tree("(0:0,1:x,2:1,3:1);", &l).is_err());
        assert!(parse_tree("(0:0,1:1,2:1,a:1);", &l).is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_number(-1.5), "-1.5");
    }

    #[test]
    fn file_reader_skips_comments() {
        let txt = "# header\n(0:0,1:1,2:1,3:1);\n\n(0:0,(1:1,2:1):2,3:1);\n";
        let ts = parse_trees(txt, None).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].num_splits(), 1);
    }
}
