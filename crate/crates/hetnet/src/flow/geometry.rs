//! Heteroclinic connections as geometric objects.
//!
//! Each robust connection lives inside a two-dimensional fixed-point plane
//! and is obtained numerically exactly once: shoot from a small offset along
//! the escape eigenvector, follow the flow to the target equilibrium, and
//! resample the swept curve at uniform arc length. Symmetry copies are not
//! re-integrated — they are group images of the base curve.
//!
//! The union of the copies belonging to a cycle (or to the whole network)
//! supports fast distance queries through a static k-d tree over the
//! polyline vertices with exact point-to-segment refinement; distances are
//! correct up to the polyline resolution.

use super::integrate::Flight;
use super::{ARC_RESOLUTION, BOX_FACTOR};
use crate::cycles::{Connection, CycleId};
use crate::model::{
    enumerate_group, find_equilibria, eigen_table, EqClass, Equilibrium, ModelParams, State,
    SymmetryElement,
};
use crate::{Error, Result};

/// Offset (relative to the node amplitude) of the shooting seed along the
/// escape eigenvector.
const SEED_OFFSET: f64 = 1e-6;

/// Capture radius around the landing equilibrium.
const CAPTURE_RADIUS: f64 = 1e-6;

/// Integration tolerance used for shooting.
const SHOT_TOL: f64 = 1e-10;

/// Time budget for a single node-to-node shot. The slowest admissible
/// escapes run at rates around 0.1, giving flight times of a few hundred
/// units; anything beyond this is a wrong-branch or wrong-sign bug.
const SHOT_BUDGET: f64 = 5e3;

/// What the distance structure should cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Cycle(CycleId),
    Network,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Cycle(c) => c.name(),
            Target::Network => "network",
        }
    }
}

/// One connection followed from node to node, resampled at uniform arc
/// length (endpoints are the exact equilibrium coordinates).
#[derive(Clone, Debug)]
pub struct ConnectionPath {
    pub connection: Connection,
    pub from: Equilibrium,
    pub to: Equilibrium,
    pub points: Vec<State>,
    /// Unit escape direction at `from` (the seeded eigenvector branch).
    pub exit_dir: State,
    /// Unit direction from `to` toward the incoming curve (the slow stable
    /// eigendirection of the landing node, detected from the shot).
    pub entry_dir: State,
}

impl ConnectionPath {
    /// The polyline vertex halfway along the curve — a canonical "point on
    /// the connection, away from both nodes".
    pub fn midpoint(&self) -> State {
        self.points[self.points.len() / 2]
    }

    /// Image of the path under a symmetry element.
    pub fn transported(&self, g: &SymmetryElement) -> ConnectionPath {
        let move_eq = |eq: &Equilibrium| Equilibrium {
            class: eq.class,
            group_element: g.compose(&eq.group_element),
            amplitude: eq.amplitude,
            coords: g.apply(&eq.coords),
        };
        ConnectionPath {
            connection: self.connection,
            from: move_eq(&self.from),
            to: move_eq(&self.to),
            points: self.points.iter().map(|s| g.apply(s)).collect(),
            exit_dir: g.apply(&self.exit_dir),
            entry_dir: g.apply(&self.entry_dir),
        }
    }
}

/// Escape branch of each connection: eigenvector index (1-based, into the
/// main frame of the source node), branch sign, and the landing class.
/// Branch signs follow the coordinate conventions of the equilibrium
/// templates; the landing tests below pin every row.
fn branch(conn: Connection) -> (EqClass, usize, f64, EqClass) {
    match conn {
        Connection::K31 => (EqClass::Xi3, 1, 1.0, EqClass::Xi1),
        Connection::K12 => (EqClass::Xi1, 5, 1.0, EqClass::Xi2),
        Connection::K23 => (EqClass::Xi2, 6, -1.0, EqClass::Xi3),
        Connection::K14 => (EqClass::Xi1, 6, 1.0, EqClass::Xi4),
        Connection::K43 => (EqClass::Xi4, 5, -1.0, EqClass::Xi3),
        Connection::K45 => (EqClass::Xi4, 2, 1.0, EqClass::Xi5),
        Connection::K51 => (EqClass::Xi5, 3, 1.0, EqClass::Xi1),
    }
}

/// In-plane contraction at the landing node of each connection: the
/// eigenvalue (class, 1-based index) that must be negative for the target
/// to attract inside the connection plane. Together with a positive escape
/// eigenvalue this makes the connection a robust saddle-sink arc.
fn landing_contraction(conn: Connection) -> (EqClass, usize) {
    match conn {
        Connection::K31 => (EqClass::Xi1, 4),
        Connection::K12 => (EqClass::Xi2, 1),
        Connection::K23 | Connection::K43 => (EqClass::Xi3, 5),
        Connection::K14 => (EqClass::Xi4, 1),
        Connection::K45 => (EqClass::Xi5, 6),
        Connection::K51 => (EqClass::Xi1, 2),
    }
}

/// Follows one connection from its source equilibrium to the landing copy.
///
/// Errors with `PremisesViolated` when the escape eigenvalue is not
/// positive (the connection does not exist for these parameters) and with
/// `CheckFailed` when the shot escapes the bounding box or exhausts its
/// time budget (which would contradict the established branch table).
pub fn shoot_connection(p: &ModelParams, connection: Connection) -> Result<ConnectionPath> {
    let eqs = find_equilibria(p)?;
    let (from_class, k, sign, to_class) = branch(connection);
    let from = *eqs.require(from_class)?;
    let to_rep = *eqs.require(to_class)?;
    let eig = eigen_table(p, &from)?;
    let lam = eig.lam(k);
    if lam <= crate::BOUNDARY_TOL {
        return Err(Error::PremisesViolated(format!(
            "connection {} absent: escape eigenvalue {} = {lam:.6e} is not positive",
            connection.name(),
            crate::model::eigen_label(from_class, k),
        )));
    }
    let (land_class, land_k) = landing_contraction(connection);
    let land_eig = eigen_table(p, eqs.require(land_class)?)?;
    let land_lam = land_eig.lam(land_k);
    if land_lam >= -crate::BOUNDARY_TOL {
        return Err(Error::PremisesViolated(format!(
            "connection {} absent: in-plane landing eigenvalue {} = {land_lam:.6e} is not negative",
            connection.name(),
            crate::model::eigen_label(land_class, land_k),
        )));
    }
    let exit_dir = eig.vec(k).scale(sign);

    let group = enumerate_group();
    let copies = to_rep.orbit(&group);
    let box_radius = box_radius(&eqs);

    let s0 = from.coords.add_scaled(SEED_OFFSET * from.amplitude, &exit_dir);
    let mut fl = Flight::new(p, s0, SHOT_TOL, false)?;
    let mut raw = vec![s0];
    let landed = loop {
        fl.advance()?;
        raw.push(fl.y);
        if let Some(copy) = copies
            .iter()
            .find(|c| fl.y.dist(&c.coords) < CAPTURE_RADIUS)
        {
            break *copy;
        }
        if fl.y.0.iter().any(|v| v.abs() > box_radius) {
            return Err(Error::CheckFailed(format!(
                "connection {} left the bounding box (radius {box_radius:.3})",
                connection.name()
            )));
        }
        if fl.tau > SHOT_BUDGET {
            return Err(Error::CheckFailed(format!(
                "connection {} made no landing within t = {SHOT_BUDGET:e}",
                connection.name()
            )));
        }
    };

    // The position offset at capture is aligned with the slow stable
    // eigendirection of the landing node to O(capture radius).
    let capture_offset = raw.last().unwrap().add_scaled(-1.0, &landed.coords);
    let entry_dir = capture_offset.scale(1.0 / capture_offset.norm());

    let mut curve = Vec::with_capacity(raw.len() + 2);
    curve.push(from.coords);
    curve.extend_from_slice(&raw);
    curve.push(landed.coords);
    let points = resample(&curve, ARC_RESOLUTION);

    Ok(ConnectionPath {
        connection,
        from,
        to: landed,
        points,
        exit_dir,
        entry_dir,
    })
}

/// Half-width of the escape box: no admissible trajectory that stays on the
/// attractor side of the dynamics reaches these coordinate values.
fn box_radius(eqs: &crate::model::EquilibriaSet) -> f64 {
    let max_amp = eqs
        .present
        .iter()
        .map(|e| e.amplitude)
        .fold(0.1, f64::max);
    BOX_FACTOR * max_amp
}

/// Resamples a polyline at uniform arc spacing (chord-length parameter).
/// First and last input points are preserved exactly.
fn resample(curve: &[State], resolution: f64) -> Vec<State> {
    let mut out = Vec::new();
    out.push(curve[0]);
    let mut carried = 0.0;
    for w in curve.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let mut s = resolution - carried;
        while s < len {
            let t = s / len;
            let mut q = [0.0; 6];
            for i in 0..6 {
                q[i] = a.0[i] + t * (b.0[i] - a.0[i]);
            }
            out.push(State(q));
            s += resolution;
        }
        carried = len - (s - resolution);
    }
    out.push(curve[curve.len() - 1]);
    out
}

/// The connection set swept by a target.
fn base_connections(target: Target) -> &'static [Connection] {
    match target {
        Target::Cycle(CycleId::C123) => &[Connection::K31, Connection::K12, Connection::K23],
        Target::Cycle(CycleId::C143) => &[Connection::K31, Connection::K14, Connection::K43],
        Target::Cycle(CycleId::C145) => &[Connection::K14, Connection::K45, Connection::K51],
        Target::Network => &[
            Connection::K31,
            Connection::K12,
            Connection::K23,
            Connection::K14,
            Connection::K43,
            Connection::K45,
            Connection::K51,
        ],
    }
}

/// The one-dimensional invariant set of a cycle or of the whole network,
/// with fast distance queries.
pub struct NetworkGeometry {
    pub target: Target,
    pub paths: Vec<ConnectionPath>,
    /// Connections of the target that do not exist at these parameters
    /// (their escape eigenvalue is not positive), with the reason. The
    /// distance structure covers the existing part of the set.
    pub missing: Vec<(Connection, String)>,
    kd: KdTree,
    box_radius: f64,
}

impl NetworkGeometry {
    /// Shoots every base connection of `target` once and closes the set
    /// under the cycle symmetries. Errors if no connection of the target
    /// exists; individual absent connections are recorded in `missing`.
    pub fn build(p: &ModelParams, target: Target) -> Result<NetworkGeometry> {
        let eqs = find_equilibria(p)?;
        let box_radius = box_radius(&eqs);

        let mut bases: Vec<(Connection, ConnectionPath)> = Vec::new();
        let mut missing = Vec::new();
        for &conn in base_connections(target) {
            match shoot_connection(p, conn) {
                Ok(path) => bases.push((conn, path)),
                Err(Error::PremisesViolated(reason)) => missing.push((conn, reason)),
                Err(other) => return Err(other),
            }
        }
        if bases.is_empty() {
            return Err(Error::PremisesViolated(format!(
                "no connection of {} exists at these parameters: {}",
                target.name(),
                missing
                    .iter()
                    .map(|(c, r)| format!("{} ({r})", c.name()))
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }

        // Equilibria and connections in the same group orbit are the same
        // object; the invariant set is the full orbit of the base arcs.
        // Identity goes first so every base keeps its untransported copy.
        let mut group = enumerate_group();
        group.sort_by_key(|g| *g != SymmetryElement::IDENTITY);
        let mut paths: Vec<ConnectionPath> = Vec::new();
        let mut seen: Vec<(Connection, [i64; 12])> = Vec::new();
        for g in &group {
            for (conn, base) in &bases {
                let image = base.transported(g);
                let key = (*conn, quantize_pair(&image.from.coords, &image.to.coords));
                if !seen.contains(&key) {
                    seen.push(key);
                    paths.push(image);
                }
            }
        }

        let kd = KdTree::build(&paths);
        Ok(NetworkGeometry {
            target,
            paths,
            missing,
            kd,
            box_radius,
        })
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    /// Distance from `s` to the set, exact up to the polyline resolution.
    pub fn distance(&self, s: &State) -> f64 {
        self.query(s).0
    }

    /// Distance plus the (path, segment) index realising it.
    fn query(&self, s: &State) -> (f64, (usize, usize)) {
        let nearest = self.kd.nearest(s);
        let mut best = (f64::INFINITY, (0usize, 0usize));
        for &(path_idx, vert_idx) in nearest.iter() {
            let pts = &self.paths[path_idx].points;
            let lo = vert_idx.saturating_sub(2);
            let hi = (vert_idx + 2).min(pts.len() - 2);
            for seg in lo..=hi {
                let d = point_segment_distance(s, &pts[seg], &pts[seg + 1]);
                if d < best.0 {
                    best = (d, (path_idx, seg));
                }
            }
        }
        best
    }

    /// Distance via the listed segment window only (an upper bound on the
    /// true distance).
    fn segment_window_distance(&self, s: &State, path_idx: usize, seg: usize) -> (f64, usize) {
        let pts = &self.paths[path_idx].points;
        let lo = seg.saturating_sub(3);
        let hi = (seg + 3).min(pts.len() - 2);
        let mut best = (f64::INFINITY, seg);
        for j in lo..=hi {
            let d = point_segment_distance(s, &pts[j], &pts[j + 1]);
            if d < best.0 {
                best = (d, j);
            }
        }
        best
    }

    /// A reusable query handle that tracks the segment a trajectory is
    /// following, so that consecutive distance checks cost a handful of
    /// point-segment tests instead of a tree search.
    pub fn probe(&self) -> DistanceProbe<'_> {
        DistanceProbe {
            geo: self,
            cache: None,
        }
    }

    /// The base path of `conn` (identity copy), when present.
    pub fn path(&self, conn: Connection) -> Option<&ConnectionPath> {
        self.paths
            .iter()
            .find(|p| p.connection == conn && p.from.group_element == SymmetryElement::IDENTITY)
    }
}

/// See [`NetworkGeometry::probe`].
pub struct DistanceProbe<'a> {
    geo: &'a NetworkGeometry,
    cache: Option<(usize, usize)>,
}

impl DistanceProbe<'_> {
    /// Distance to the set. When the cached segment window already proves
    /// the distance is at most `accept_below`, that (upper-bound) value is
    /// returned without a tree search; any value larger than `accept_below`
    /// is an exact distance.
    pub fn distance_capped(&mut self, s: &State, accept_below: f64) -> f64 {
        if let Some((path_idx, seg)) = self.cache {
            let (d, j) = self.geo.segment_window_distance(s, path_idx, seg);
            if d <= accept_below {
                self.cache = Some((path_idx, j));
                return d;
            }
        }
        let (d, key) = self.geo.query(s);
        self.cache = Some(key);
        d
    }
}

fn quantize_pair(a: &State, b: &State) -> [i64; 12] {
    let mut out = [0i64; 12];
    for i in 0..6 {
        out[i] = (a.0[i] / 1e-7).round() as i64;
        out[6 + i] = (b.0[i] / 1e-7).round() as i64;
    }
    out
}

fn point_segment_distance(s: &State, a: &State, b: &State) -> f64 {
    let mut ab2 = 0.0;
    let mut t = 0.0;
    for i in 0..6 {
        let d = b.0[i] - a.0[i];
        ab2 += d * d;
        t += (s.0[i] - a.0[i]) * d;
    }
    let t = if ab2 > 0.0 { (t / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut acc = 0.0;
    for i in 0..6 {
        let q = a.0[i] + t * (b.0[i] - a.0[i]);
        let d = s.0[i] - q;
        acc += d * d;
    }
    acc.sqrt()
}

// ---------------------------------------------------------------------------
// Static k-d tree over the polyline vertices.

struct KdNode {
    /// Index into `verts`.
    point: u32,
    axis: u8,
    left: i32,
    right: i32,
}

struct KdTree {
    verts: Vec<[f64; 6]>,
    /// (path index, vertex index) per vert.
    meta: Vec<(u32, u32)>,
    nodes: Vec<KdNode>,
    root: i32,
}

impl KdTree {
    fn build(paths: &[ConnectionPath]) -> KdTree {
        let mut verts = Vec::new();
        let mut meta = Vec::new();
        for (pi, path) in paths.iter().enumerate() {
            for (vi, s) in path.points.iter().enumerate() {
                verts.push(s.0);
                meta.push((pi as u32, vi as u32));
            }
        }
        let mut idx: Vec<u32> = (0..verts.len() as u32).collect();
        let mut nodes = Vec::with_capacity(verts.len());
        let root = Self::split(&verts, &mut idx, 0, &mut nodes);
        KdTree {
            verts,
            meta,
            nodes,
            root,
        }
    }

    fn split(verts: &[[f64; 6]], idx: &mut [u32], depth: u8, nodes: &mut Vec<KdNode>) -> i32 {
        if idx.is_empty() {
            return -1;
        }
        let axis = depth % 6;
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            verts[a as usize][axis as usize]
                .partial_cmp(&verts[b as usize][axis as usize])
                .unwrap()
        });
        let point = idx[mid];
        let slot = nodes.len();
        nodes.push(KdNode {
            point,
            axis,
            left: -1,
            right: -1,
        });
        let (lo, rest) = idx.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = Self::split(verts, lo, depth + 1, nodes);
        let right = Self::split(verts, hi, depth + 1, nodes);
        nodes[slot].left = left;
        nodes[slot].right = right;
        slot as i32
    }

    /// The four nearest vertices to `s` as (path, vertex) pairs.
    fn nearest(&self, s: &State) -> Vec<(usize, usize)> {
        let mut best: [(f64, u32); 4] = [(f64::INFINITY, u32::MAX); 4];
        self.search(self.root, s, &mut best);
        best.iter()
            .filter(|(_, i)| *i != u32::MAX)
            .map(|&(_, i)| {
                let (p, v) = self.meta[i as usize];
                (p as usize, v as usize)
            })
            .collect()
    }

    fn search(&self, node: i32, s: &State, best: &mut [(f64, u32); 4]) {
        if node < 0 {
            return;
        }
        let n = &self.nodes[node as usize];
        let v = &self.verts[n.point as usize];
        let mut d2 = 0.0;
        for i in 0..6 {
            let d = s.0[i] - v[i];
            d2 += d * d;
        }
        if d2 < best[3].0 {
            best[3] = (d2, n.point);
            best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        let diff = s.0[n.axis as usize] - v[n.axis as usize];
        let (first, second) = if diff <= 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.search(first, s, best);
        if diff * diff < best[3].0 {
            self.search(second, s, best);
        }
    }
}
