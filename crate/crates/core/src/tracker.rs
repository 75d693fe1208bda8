//! Tracking geodesic supports along a segment inside one orthant.
//!
//! The segment is straight in squared coordinates `xi_e = x_e^2`. There the
//! ratio-order condition between adjacent pairs is linear in `lambda`, and
//! after renormalizing a pair's weights the cover condition is linear in a
//! rescaled parameter. So supports can be updated event by event instead of
//! recomputed from scratch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{gtp_geodesic, min_weight_cover, SupportPair, SupportSequence, COVER_TOL};
use crate::split::Split;
use crate::tree::TreePoint;

const MAX_EVENTS_PER_TREE: usize = 10_000;

/// A segment `xi(lambda) = xi0 + lambda (xi1 - xi0)` in squared coordinates.
/// `X1` may drop splits of `X0` (it then lies on a face of the orthant).
#[derive(Debug, Clone)]
pub struct Segment {
    x0: TreePoint,
    x1: TreePoint,
    xi0: Vec<f64>,
    xi1: Vec<f64>,
}

impl Segment {
    pub fn new(x0: &TreePoint, x1: &TreePoint) -> Result<Self> {
        x0.labels().check_same(x1.labels())?;
        if let Some(s) = x1.splits().iter().find(|s| !x0.contains(s)) {
            return Err(Error::InvalidArgument(format!("split {s} of X1 is not in the orthant of X0")));
        }
        let xi0 = x0.lengths().iter().map(|l| l * l).collect();
        let xi1 = x0.splits().iter().map(|s| x1.length(s).powi(2)).collect();
        Ok(Self { x0: x0.clone(), x1: x1.clone(), xi0, xi1 })
    }

    pub fn splits(&self) -> &[Split] {
        self.x0.splits()
    }

    /// Squared interior coordinates at `lambda`.
    pub fn xi_at(&self, lambda: f64) -> Vec<f64> {
        self.xi0.iter().zip(&self.xi1).map(|(a, b)| a + lambda * (b - a)).collect()
    }

    fn xi(&self, i: usize, lambda: f64) -> f64 {
        self.xi0[i] + lambda * (self.xi1[i] - self.xi0[i])
    }

    fn pendant(&self, k: usize, lambda: f64) -> f64 {
        let (a, b) = (self.x0.pendants()[k].powi(2), self.x1.pendants()[k].powi(2));
        (a + lambda * (b - a)).max(0.0).sqrt()
    }

    /// The tree `X^lambda`.
    pub fn point_at(&self, lambda: f64) -> Result<TreePoint> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
        }
        let edges = self.splits().iter().enumerate().map(|(i, s)| (*s, self.xi(i, lambda).max(0.0).sqrt())).collect();
        let pendants = (0..self.x0.labels().num_pendants()).map(|k| self.pendant(k, lambda)).collect();
        Ok(TreePoint::from_unsorted(*self.x0.labels(), edges, pendants))
    }

    fn index(&self, s: &Split) -> Result<usize> {
        self.x0.index_of(s).ok_or_else(|| Error::InvalidArgument(format!("split {s} is not on the segment")))
    }
}

/// What happens at a boundary event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// A split of `X0` reaches length zero.
    OFace { split: Split },
    /// Pairs `pair` and `pair + 1` merge.
    P2Merge { pair: usize },
    /// Pair `pair` splits into `(a1, b1), (a2, b2)`.
    P3Split { pair: usize, a1: Vec<Split>, b1: Vec<Split>, a2: Vec<Split>, b2: Vec<Split> },
}

impl EventKind {
    fn rank(&self) -> u8 {
        match self {
            EventKind::OFace { .. } => 0,
            EventKind::P2Merge { .. } => 1,
            EventKind::P3Split { .. } => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EventKind::OFace { .. } => "o_face",
            EventKind::P2Merge { .. } => "p2_merge",
            EventKind::P3Split { .. } => "p3_split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEvent {
    pub lambda: f64,
    /// Data tree index; `None` for face events, which concern the segment.
    pub tree: Option<usize>,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Pair with `A` as indices into the segment splits and `B` as `T` edges.
#[derive(Debug, Clone, PartialEq)]
struct IPair {
    a: Vec<usize>,
    b: Vec<(Split, f64)>,
}

impl IPair {
    fn b_sq(&self) -> f64 {
        self.b.iter().map(|e| e.1 * e.1).sum()
    }

    fn a_sq(&self, seg: &Segment, lambda: f64) -> f64 {
        self.a.iter().map(|&i| seg.xi(i, lambda)).sum()
    }
}

fn to_ipairs(seg: &Segment, t: &TreePoint, pairs: &[SupportPair]) -> Result<Vec<IPair>> {
    pairs
        .iter()
        .map(|p| {
            Ok(IPair {
                a: p.a.iter().map(|s| seg.index(s)).collect::<Result<_>>()?,
                b: p.b.iter().map(|s| (*s, t.length(s))).collect(),
            })
        })
        .collect()
}

/// Root of the ratio-order condition between `p` and `q` (q follows p),
/// at or after `from`.
fn p2_root(seg: &Segment, p: &IPair, q: &IPair, from: f64) -> Option<f64> {
    // g(l) = |B_p|^2 sum_{A_q} xi(l) - |B_q|^2 sum_{A_p} xi(l) >= 0
    let (bp, bq) = (p.b_sq(), q.b_sq());
    let g0 = bp * q.a_sq(seg, 0.0) - bq * p.a_sq(seg, 0.0);
    let g1 = bp * q.a_sq(seg, 1.0) - bq * p.a_sq(seg, 1.0);
    let a = g1 - g0;
    if a >= 0.0 {
        return None;
    }
    let root = (-g0 / a).max(from);
    (root <= 1.0).then_some(root)
}

/// Result of a cover-condition crossing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P3Crossing {
    pub lambda: f64,
    pub a1: Vec<Split>,
    pub b1: Vec<Split>,
    pub a2: Vec<Split>,
    pub b2: Vec<Split>,
}

/// First `lambda >= from` where pair `p` stops satisfying the cover
/// condition, with the partition of the violating minimum cover.
fn p3_root(seg: &Segment, p: &IPair, from: f64) -> Option<(f64, Vec<bool>, Vec<bool>)> {
    if p.a.len() < 2 && p.b.len() < 2 {
        return None;
    }
    let s0 = p.a_sq(seg, from);
    let s1 = p.a_sq(seg, 1.0);
    let v0: Vec<f64> = p.a.iter().map(|&i| seg.xi(i, from) / s0).collect();
    let v1: Vec<f64> = if s1 > 0.0 { p.a.iter().map(|&i| seg.xi(i, 1.0) / s1).collect() } else { v0.clone() };
    let bn = p.b_sq();
    let wb: Vec<f64> = p.b.iter().map(|e| e.1 * e.1 / bn).collect();
    let incompatible = |i: usize, j: usize| !seg.splits()[p.a[i]].compatible(&p.b[j].0);
    let weights = |lt: f64| -> Vec<f64> { v0.iter().zip(&v1).map(|(a, b)| (1.0 - lt) * a + lt * b).collect() };
    let value = |c1: &[bool], d2: &[bool], w: &[f64]| -> f64 {
        c1.iter().zip(w).filter(|c| *c.0).map(|c| c.1).sum::<f64>() + d2.iter().zip(&wb).filter(|c| *c.0).map(|c| c.1).sum::<f64>()
    };

    let mut cover = min_weight_cover(&weights(1.0), &wb, incompatible);
    if cover.value >= 1.0 - COVER_TOL {
        return None;
    }
    let mut lt = 1.0;
    for _ in 0..1000 {
        let c0 = value(&cover.c1, &cover.d2, &v0);
        let c1 = value(&cover.c1, &cover.d2, &v1);
        // the cover's value is linear in the rescaled parameter
        let root = if c0 <= 1.0 { 0.0 } else { ((c0 - 1.0) / (c0 - c1)).clamp(0.0, lt) };
        let next = min_weight_cover(&weights(root), &wb, incompatible);
        if next.value >= 1.0 - COVER_TOL || root == 0.0 || root >= lt {
            lt = root;
            break;
        }
        lt = root;
        cover = next;
    }
    // back to the segment parameter
    let (k0, k1) = ((1.0 - lt) / s0, if s1 > 0.0 { lt / s1 } else { 0.0 });
    let lambda = if s1 > 0.0 { from + (1.0 - from) * k1 / (k0 + k1) } else { from + (1.0 - from) * lt };
    Some((lambda, cover.c1, cover.d2))
}

fn split_pair(p: &IPair, c1: &[bool], d2: &[bool]) -> (IPair, IPair) {
    let mut first = IPair { a: Vec::new(), b: Vec::new() };
    let mut second = IPair { a: Vec::new(), b: Vec::new() };
    for (k, &i) in p.a.iter().enumerate() {
        if c1[k] {
            first.a.push(i)
        } else {
            second.a.push(i)
        }
    }
    for (k, e) in p.b.iter().enumerate() {
        if d2[k] {
            second.b.push(*e)
        } else {
            first.b.push(*e)
        }
    }
    (first, second)
}

/// Ratio-order crossings for adjacent pairs of each support (valid at 0).
pub fn p2_crossings(seg: &Segment, targets: &[TreePoint], supports: &[SupportSequence]) -> Result<Vec<BoundaryEvent>> {
    let mut out = Vec::new();
    for (k, (t, sup)) in targets.iter().zip(supports).enumerate() {
        let pairs = to_ipairs(seg, t, &sup.pairs)?;
        for l in 0..pairs.len().saturating_sub(1) {
            if let Some(lambda) = p2_root(seg, &pairs[l], &pairs[l + 1], 0.0) {
                if lambda > 0.0 {
                    out.push(BoundaryEvent { lambda, tree: Some(k), kind: EventKind::P2Merge { pair: l } });
                }
            }
        }
    }
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(out)
}

/// First crossing of the cover condition for one pair (valid at 0).
pub fn p3_crossing(seg: &Segment, target: &TreePoint, pair: &SupportPair) -> Result<Option<P3Crossing>> {
    let p = &to_ipairs(seg, target, std::slice::from_ref(pair))?[0];
    Ok(p3_root(seg, p, 0.0).filter(|r| r.0 > 0.0).map(|(lambda, c1, d2)| {
        let (f, s) = split_pair(p, &c1, &d2);
        let names = |q: &IPair| -> (Vec<Split>, Vec<Split>) {
            (q.a.iter().map(|&i| seg.splits()[i]).collect(), q.b.iter().map(|e| e.0).collect())
        };
        let ((a1, b1), (a2, b2)) = (names(&f), names(&s));
        P3Crossing { lambda, a1, b1, a2, b2 }
    }))
}

/// Supports of one data tree along the segment.
#[derive(Debug, Clone)]
struct TreeTrack {
    /// `(start lambda, pairs)`; each entry is valid until the next start.
    intervals: Vec<(f64, Vec<IPair>)>,
    /// Segment splits common with `T`, with their `T` length.
    common_x: Vec<(usize, f64)>,
    /// Squared length of `T` splits compatible with the segment but absent from it.
    t_only_sq: f64,
}

/// Result of [`track_segment`].
#[derive(Debug, Clone)]
pub struct Tracking {
    seg: Segment,
    data: Vec<TreePoint>,
    tracks: Vec<TreeTrack>,
    events: Vec<BoundaryEvent>,
}

fn track_tree(seg: &Segment, t: &TreePoint, k: usize, events: &mut Vec<BoundaryEvent>) -> Result<TreeTrack> {
    let g = gtp_geodesic(&seg.x0, t)?;
    let mut pairs = to_ipairs(seg, t, &g.support().pairs)?;
    let common_x = seg
        .splits()
        .iter()
        .enumerate()
        .filter(|(_, s)| g.support().common.contains(s))
        .map(|(i, s)| (i, t.length(s)))
        .collect();
    let t_only_sq = g.support().common.iter().filter(|s| !seg.x0.contains(s)).map(|s| t.length(s).powi(2)).sum();
    let mut intervals = vec![(0.0, pairs.clone())];
    let mut at = 0.0;
    for _ in 0..MAX_EVENTS_PER_TREE {
        let mut best: Option<(f64, EventKind, usize, Option<(Vec<bool>, Vec<bool>)>)> = None;
        let mut consider = |lam: f64, kind: EventKind, l: usize, part: Option<(Vec<bool>, Vec<bool>)>| {
            let better = match &best {
                None => true,
                Some((bl, bk, _, _)) => lam < bl - 1e-12 || (lam <= bl + 1e-12 && kind.rank() < bk.rank()),
            };
            if better {
                best = Some((lam, kind, l, part));
            }
        };
        for l in 0..pairs.len().saturating_sub(1) {
            if let Some(lam) = p2_root(seg, &pairs[l], &pairs[l + 1], at) {
                consider(lam, EventKind::P2Merge { pair: l }, l, None);
            }
        }
        for (l, p) in pairs.iter().enumerate() {
            if let Some((lam, c1, d2)) = p3_root(seg, p, at) {
                let (f, s) = split_pair(p, &c1, &d2);
                let names = |q: &IPair| -> (Vec<Split>, Vec<Split>) {
                    (q.a.iter().map(|&i| seg.splits()[i]).collect(), q.b.iter().map(|e| e.0).collect())
                };
                let ((a1, b1), (a2, b2)) = (names(&f), names(&s));
                consider(lam, EventKind::P3Split { pair: l, a1, b1, a2, b2 }, l, Some((c1, d2)));
            }
        }
        let Some((lam, kind, l, part)) = best else {
            return Ok(TreeTrack { intervals, common_x, t_only_sq });
        };
        match &kind {
            EventKind::P2Merge { .. } => {
                let q = pairs.remove(l + 1);
                pairs[l].a.extend(q.a);
                pairs[l].b.extend(q.b);
            }
            EventKind::P3Split { .. } => {
                let (c1, d2) = part.expect("split events carry a partition");
                let (f, s) = split_pair(&pairs[l], &c1, &d2);
                pairs[l] = f;
                pairs.insert(l + 1, s);
            }
            EventKind::OFace { .. } => unreachable!(),
        }
        at = lam;
        events.push(BoundaryEvent { lambda: lam, tree: Some(k), kind });
        intervals.push((lam, pairs.clone()));
    }
    Err(Error::Inconsistent(format!("support tracking for tree {k} exceeded {MAX_EVENTS_PER_TREE} events")))
}

/// Track the supports toward every data tree along the segment.
pub fn track_segment(seg: &Segment, data: &[TreePoint]) -> Result<Tracking> {
    let mut events = Vec::new();
    for (i, s) in seg.splits().iter().enumerate() {
        if seg.xi1[i] == 0.0 {
            events.push(BoundaryEvent { lambda: 1.0, tree: None, kind: EventKind::OFace { split: *s } });
        }
    }
    let mut tracks = Vec::with_capacity(data.len());
    for (k, t) in data.iter().enumerate() {
        tracks.push(track_tree(seg, t, k, &mut events)?);
    }
    events.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.kind.rank().cmp(&b.kind.rank()))
            .then(a.tree.cmp(&b.tree))
    });
    Ok(Tracking { seg: seg.clone(), data: data.to_vec(), tracks, events })
}

impl Tracking {
    pub fn events(&self) -> &[BoundaryEvent] {
        &self.events
    }

    fn interval(&self, k: usize, lambda: f64) -> &[IPair] {
        let iv = &self.tracks[k].intervals;
        let pos = iv.partition_point(|(start, _)| *start <= lambda);
        &iv[pos.saturating_sub(1)].1
    }

    /// Squared distance from `X^lambda` to data tree `k`, from the tracked support.
    pub fn distance_sq(&self, k: usize, lambda: f64) -> f64 {
        let seg = &self.seg;
        let tr = &self.tracks[k];
        let t = &self.data[k];
        let mut d2 = tr.t_only_sq;
        for p in self.interval(k, lambda) {
            d2 += (p.a_sq(seg, lambda).max(0.0).sqrt() + p.b_sq().sqrt()).powi(2);
        }
        for &(i, tl) in &tr.common_x {
            d2 += (seg.xi(i, lambda).max(0.0).sqrt() - tl).powi(2);
        }
        for (kk, q) in t.pendants().iter().enumerate() {
            d2 += (seg.pendant(kk, lambda) - q).powi(2);
        }
        d2
    }

    /// `sum_k w_k d(X^lambda, T^k)^2`.
    pub fn frechet_value(&self, weights: &[f64], lambda: f64) -> f64 {
        (0..self.data.len()).map(|k| weights[k] * self.distance_sq(k, lambda)).sum()
    }

    /// Tracked support toward tree `k` at `lambda`.
    pub fn support_at(&self, k: usize, lambda: f64) -> Vec<SupportPair> {
        self.interval(k, lambda)
            .iter()
            .map(|p| SupportPair {
                a: p.a.iter().map(|&i| self.seg.splits()[i]).collect(),
                b: p.b.iter().map(|e| e.0).collect(),
                a_norm: p.a_sq(&self.seg, lambda).max(0.0).sqrt(),
                b_norm: p.b_sq().sqrt(),
            })
            .collect()
    }

    /// Events as CSV (`lambda,tree,kind,pair`).
    pub fn events_csv(&self) -> String {
        let mut s = String::from("lambda,tree,kind,pair\n");
        for e in &self.events {
            let tree = e.tree.map_or(String::new(), |t| t.to_string());
            let pair = match &e.kind {
                EventKind::P2Merge { pair } | EventKind::P3Split { pair, .. } => pair.to_string(),
                EventKind::OFace { split } => split.to_string().replace(',', " "),
            };
            s.push_str(&format!("{},{tree},{},{pair}\n", crate::newick::format_number(e.lambda), e.kind.label()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_tree;
    use crate::split::LabelSet;

    fn tr(s: &str) -> TreePoint {
        parse_tree(s, &LabelSet::new(5).unwrap()).unwrap()
    }

    #[test]
    fn constant_segment_has_no_events() {
        let x = tr("(0:0,((1:1,2:1):1,3:1):2,4:1,5:1);");
        let t = tr("(0:0,1:1,(2:1,(3:1,4:1):2):1,5:1);");
        let seg = Segment::new(&x, &x).unwrap();
        let tracking = track_segment(&seg, std::slice::from_ref(&t)).unwrap();
        assert!(tracking.events().is_empty());
        let g = gtp_geodesic(&x, &t).unwrap();
        assert!((tracking.distance_sq(0, 0.5) - g.distance().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn p2_root_solves_the_linear_equation() {
        // two singleton pairs with unit B sides; squared A lengths cross
        let l5 = LabelSet::new(5).unwrap();
        let s12 = Split::new(&l5, &[1, 2]).unwrap();
        let s123 = Split::new(&l5, &[1, 2, 3]).unwrap();
        let x0 = TreePoint::new(l5, vec![(s12, 1.0), (s123, 3.0)], vec![0.0; 6]).unwrap();
        let x1 = TreePoint::new(l5, vec![(s12, 3.0), (s123, 1.0)], vec![0.0; 6]).unwrap();
        let seg = Segment::new(&x0, &x1).unwrap();
        let p = IPair { a: vec![0], b: vec![(s12, 1.0)] };
        let q = IPair { a: vec![1], b: vec![(s123, 1.0)] };
        // g(l) = xi_q - xi_p = (9 - 8l) - (1 + 8l) = 8 - 16 l: root at 1/2
        let r = p2_root(&seg, &p, &q, 0.0).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!(p2_root(&seg, &q, &p, 0.0).is_none());
    }
}
