//! Cross-sections at the equilibria and maps between them.
//!
//! A section is a small disc `{u_pinned = h}` in eigen-coordinates centred
//! on a connection's crossing point near a node. Frames are adapted: inside
//! a degenerate eigenvalue group the basis is rotated so that one vector
//! points exactly along the connection's in-plane direction, which puts the
//! connection at the centre of the section regardless of which symmetry
//! copy of the node it visits.
//!
//! `local_exponent_regression` measures the power laws of the node passage
//! maps one coordinate at a time: each transverse coordinate gets its own
//! probe flight so that the cubic cross-terms of the field never couple two
//! probes, and rows whose output falls below the rounding floor of their
//! coordinate class are dropped rather than fitted.

use super::geometry::ConnectionPath;
use super::integrate::{validate_tol, Flight};
use super::SECTION_RADIUS_FACTOR;
use crate::cycles::Connection;
use crate::model::{eigen_label, eigen_table, find_equilibria, EqClass, Equilibrium, ModelParams, State};
use crate::{Error, Result};

/// Crossing direction of a section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InOut {
    /// Pinned coordinate decreasing through h: flow entering the node ball.
    In,
    /// Pinned coordinate increasing through h: flow leaving the node ball.
    Out,
}

/// Trajectories are expected to cross a section within this multiple of h
/// of the node; crossings farther out are counted but not accepted.
const LINEAR_DOMAIN_FACTOR: f64 = 10.0;

/// Absolute output floor for coordinates that share their support with
/// O(h)-sized background values: below this, pair-differencing noise can
/// contaminate the value.
const FLOOR_SHARED: f64 = 1e-13;

/// Output floor for coordinates whose support is disjoint from all
/// background values. Such coordinates evolve multiplicatively (every term
/// of the field carries the coordinate itself as a factor), so they keep
/// relative accuracy at any magnitude; the floor only guards against
/// denormal breakdown.
const FLOOR_PROTECTED: f64 = 1e-18;

/// One cross-section near a node.
#[derive(Clone, Debug)]
pub struct SectionSpec {
    pub node: Equilibrium,
    pub connection: Connection,
    /// Orthonormal eigenframe rows (adapted within degenerate groups).
    pub basis: [State; 6],
    /// Eigenvalue of each basis row.
    pub lambda: [f64; 6],
    /// Row pinned at +h (the connection direction).
    pub pinned: usize,
    /// Row along the node's own axis.
    pub radial: usize,
    pub in_or_out: InOut,
    pub h: f64,
}

impl SectionSpec {
    /// Orthonormality and labelling sanity.
    pub fn validate(&self) -> Result<()> {
        for i in 0..6 {
            for j in i..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = self.basis[i].dot(&self.basis[j]);
                if (got - want).abs() > 1e-12 {
                    return Err(Error::InvalidParams(format!(
                        "section basis not orthonormal: <b{i},b{j}> = {got:e}"
                    )));
                }
            }
        }
        if self.pinned == self.radial {
            return Err(Error::InvalidParams(
                "section pins the radial coordinate".into(),
            ));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParams(format!("section radius {:?}", self.h)));
        }
        Ok(())
    }

    /// Point of the section with the given eigen-coordinates; the pinned
    /// component of `u` is ignored and fixed at h.
    pub fn embed(&self, u: &[f64; 6]) -> State {
        let mut s = self.node.coords;
        for k in 0..6 {
            let c = if k == self.pinned { self.h } else { u[k] };
            s = s.add_scaled(c, &self.basis[k]);
        }
        s
    }

    /// Eigen-coordinates of a state relative to the node.
    pub fn coords(&self, s: &State) -> [f64; 6] {
        let off = s.add_scaled(-1.0, &self.node.coords);
        let mut u = [0.0; 6];
        for k in 0..6 {
            u[k] = off.dot(&self.basis[k]);
        }
        u
    }

    /// Signed section function: zero on the section plane.
    fn g(&self, s: &State) -> f64 {
        s.add_scaled(-1.0, &self.node.coords).dot(&self.basis[self.pinned]) - self.h
    }

    fn direction_ok(&self, g_prev: f64, g_cur: f64) -> bool {
        match self.in_or_out {
            InOut::In => g_prev > 0.0 && g_cur <= 0.0,
            InOut::Out => g_prev < 0.0 && g_cur >= 0.0,
        }
    }
}

/// Section radius used throughout: a fixed fraction of the smallest
/// present equilibrium amplitude.
pub fn section_radius(p: &ModelParams) -> Result<f64> {
    let eqs = find_equilibria(p)?;
    let min_amp = eqs
        .present
        .iter()
        .map(|e| e.amplitude)
        .fold(f64::INFINITY, f64::min);
    if !min_amp.is_finite() {
        return Err(Error::InvalidParams("no equilibrium present".into()));
    }
    Ok(SECTION_RADIUS_FACTOR * min_amp)
}

/// Adapted eigenframe at one node copy, oriented by an incoming and an
/// outgoing connection. The entry slot is the in-plane contracting
/// direction of the incoming connection; the exit slot is the escape
/// direction of the outgoing one.
#[derive(Clone, Debug)]
pub struct NodeChart {
    pub eq: Equilibrium,
    pub incoming: Connection,
    pub outgoing: Connection,
    pub basis: [State; 6],
    pub lambda: [f64; 6],
    pub radial: usize,
    pub entry: usize,
    pub exit: usize,
    pub h: f64,
}

impl NodeChart {
    /// Builds the chart at `incoming.to` (which must equal `outgoing.from`
    /// as a point). Within a degenerate eigenvalue group the frame is
    /// rotated so that the slot's vector matches the connection direction
    /// exactly; for simple eigenvalues only the sign is adjusted.
    pub fn build(
        p: &ModelParams,
        incoming: &ConnectionPath,
        outgoing: &ConnectionPath,
        h: f64,
    ) -> Result<NodeChart> {
        if incoming.to.coords.dist(&outgoing.from.coords) > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "chart nodes disagree: {} lands at {:?} but {} starts at {:?}",
                incoming.connection.name(),
                incoming.to.coords,
                outgoing.connection.name(),
                outgoing.from.coords
            )));
        }
        let eq = incoming.to;
        let eig = eigen_table(p, &eq)?;
        let mut basis = eig.basis.main;
        let lambda = eig.lambda;
        let radial = eig
            .radial
            .iter()
            .position(|&r| r)
            .expect("every eigen table marks a radial row");

        // In-plane direction of the incoming curve at distance ~h from the
        // node: take the polyline vertex nearest that arc distance and
        // project out everything outside the target eigen group below.
        let n = incoming.points.len();
        let steps_in = ((h / super::ARC_RESOLUTION).round() as usize).clamp(1, n - 1);
        let entry_probe = incoming.points[n - 1 - steps_in].add_scaled(-1.0, &eq.coords);

        let entry = align_slot(&mut basis, &lambda, &entry_probe, radial)?;
        let exit = align_slot(&mut basis, &lambda, &outgoing.exit_dir, radial)?;
        if entry == exit {
            return Err(Error::InvalidParams(
                "incoming and outgoing directions fall in the same eigen group".into(),
            ));
        }

        let chart = NodeChart {
            eq,
            incoming: incoming.connection,
            outgoing: outgoing.connection,
            basis,
            lambda,
            radial,
            entry,
            exit,
            h,
        };
        chart.section_in().validate()?;
        Ok(chart)
    }

    pub fn section_in(&self) -> SectionSpec {
        SectionSpec {
            node: self.eq,
            connection: self.incoming,
            basis: self.basis,
            lambda: self.lambda,
            pinned: self.entry,
            radial: self.radial,
            in_or_out: InOut::In,
            h: self.h,
        }
    }

    pub fn section_out(&self) -> SectionSpec {
        SectionSpec {
            node: self.eq,
            connection: self.outgoing,
            basis: self.basis,
            lambda: self.lambda,
            pinned: self.exit,
            radial: self.radial,
            in_or_out: InOut::Out,
            h: self.h,
        }
    }
}

/// Finds the eigen group (set of slots with equal eigenvalue, radial slot
/// excluded) that contains `dir`, rotates the group's basis vectors so the
/// lowest slot of the group points along `dir`, and returns that slot.
fn align_slot(
    basis: &mut [State; 6],
    lambda: &[f64; 6],
    dir: &State,
    radial: usize,
) -> Result<usize> {
    let norm = dir.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidParams("zero direction for section frame".into()));
    }
    let d = dir.scale(1.0 / norm);

    // Partition the non-radial slots into equal-eigenvalue groups.
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut assigned = [false; 6];
    for k in 0..6 {
        if k == radial || assigned[k] {
            continue;
        }
        let mut group = vec![k];
        assigned[k] = true;
        for j in (k + 1)..6 {
            if j != radial
                && !assigned[j]
                && (lambda[j] - lambda[k]).abs() <= 1e-9 * lambda[k].abs().max(1.0)
            {
                group.push(j);
                assigned[j] = true;
            }
        }
        let proj: f64 = group.iter().map(|&j| d.dot(&basis[j]).powi(2)).sum();
        if best.as_ref().map_or(true, |(_, p)| proj > *p) {
            best = Some((group, proj));
        }
    }
    let (group, proj) = best.expect("six slots always yield a group");
    // The direction may carry a radial component (a connection curve bends
    // toward the node inside its invariant plane), but plane invariance
    // keeps every other transverse group at exactly zero, so the winning
    // group's projection is the in-plane transverse direction itself.
    if proj < 1e-12 {
        return Err(Error::InvalidParams(format!(
            "direction lies outside every eigen group (best projection {proj:.3e})"
        )));
    }
    let mut in_group = State::zero();
    for &j in &group {
        in_group = in_group.add_scaled(d.dot(&basis[j]), &basis[j]);
    }
    let d = in_group.scale(1.0 / in_group.norm());

    // Rotate: lowest slot takes the direction itself; the remaining slots
    // are re-orthonormalised inside the group. A candidate that collapses
    // is the one the direction replaced; it is skipped.
    let lead = group[0];
    let mut new_vecs = vec![d];
    for &j in &group {
        if new_vecs.len() == group.len() {
            break;
        }
        let mut v = basis[j];
        for w in &new_vecs {
            v = v.add_scaled(-v.dot(w), w);
        }
        let n = v.norm();
        if n > 1e-6 {
            new_vecs.push(v.scale(1.0 / n));
        }
    }
    if new_vecs.len() != group.len() {
        return Err(Error::InvalidParams(
            "degenerate group collapsed during re-orthonormalisation".into(),
        ));
    }
    for (slot, v) in group.iter().zip(new_vecs) {
        basis[*slot] = v;
    }
    Ok(lead)
}

/// A located section crossing.
#[derive(Clone, Debug)]
pub struct SectionHit {
    /// Index into the target list.
    pub which: usize,
    pub state: State,
    pub t: f64,
    /// Crossings of a target plane that happened outside the linear domain
    /// (transverse norm > 10 h) before this hit; they are skipped.
    pub far_crossings: usize,
}

/// Why a flight ended.
#[derive(Clone, Debug)]
pub enum FlightOutcome {
    Hit(SectionHit),
    /// Left the bounding box without crossing a target.
    BoxExit { t: f64, state: State },
    /// Exhausted the time budget.
    Budget { t: f64, state: State },
}

/// Integrates from `s0` until one of `targets` is crossed in its stated
/// direction inside its linear domain, the bounding box is left, or the
/// budget runs out. Crossings are located by bisection to 1e-10 in time.
pub fn fly_to_sections(
    p: &ModelParams,
    s0: &State,
    tol: f64,
    budget_t: f64,
    box_radius: f64,
    targets: &[&SectionSpec],
) -> Result<FlightOutcome> {
    validate_tol(tol)?;
    let mut fl = Flight::new(p, *s0, tol, false)?;
    let mut g_prev: Vec<f64> = targets.iter().map(|t| t.g(s0)).collect();
    let mut far = 0usize;
    loop {
        fl.advance()?;
        // Candidate crossings within this step, earliest first.
        let mut hit: Option<(f64, usize, State)> = None;
        for (i, sec) in targets.iter().enumerate() {
            let g_cur = sec.g(&fl.y);
            if sec.direction_ok(g_prev[i], g_cur) {
                let (dt, state) = bisect_crossing(&fl, sec, g_prev[i])?;
                if hit.as_ref().map_or(true, |(best, _, _)| dt < *best) {
                    hit = Some((dt, i, state));
                }
            }
            g_prev[i] = g_cur;
        }
        if let Some((dt, which, state)) = hit {
            let transverse = state.dist(&targets[which].node.coords);
            if transverse <= LINEAR_DOMAIN_FACTOR * targets[which].h {
                return Ok(FlightOutcome::Hit(SectionHit {
                    which,
                    state,
                    t: fl.tau_prev + dt,
                    far_crossings: far,
                }));
            }
            far += 1;
        }
        if fl.y.0.iter().any(|v| v.abs() > box_radius) {
            return Ok(FlightOutcome::BoxExit {
                t: fl.tau,
                state: fl.y,
            });
        }
        if fl.tau > budget_t {
            return Ok(FlightOutcome::Budget {
                t: fl.tau,
                state: fl.y,
            });
        }
    }
}

/// Bisection on the section function over the last accepted step.
fn bisect_crossing(fl: &Flight, sec: &SectionSpec, g_at_start: f64) -> Result<(f64, State)> {
    let mut lo = 0.0;
    let mut hi = fl.h_last;
    let sign_lo = g_at_start > 0.0;
    let mut state = fl.y;
    for _ in 0..80 {
        if hi - lo < 1e-10 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let s = fl.state_within(mid)?;
        if (sec.g(&s) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
            state = s;
        }
    }
    Ok((hi, state))
}

/// Result of a section-to-section map evaluation.
#[derive(Clone, Debug)]
pub enum MapOutcome {
    Landed {
        /// Eigen-coordinates in the target section's frame.
        coords: [f64; 6],
        flight_time: f64,
    },
    /// Budget or bounding-box exit before reaching the target.
    Missed { after: f64, reason: String },
}

/// Follows the flow from a point of `from` (given by its eigen-coordinates)
/// to the first admissible crossing of `to`.
pub fn section_map(
    p: &ModelParams,
    from: &SectionSpec,
    to: &SectionSpec,
    u: &[f64; 6],
    tol: f64,
    budget_t: f64,
) -> Result<MapOutcome> {
    from.validate()?;
    to.validate()?;
    let mut transverse = 0.0;
    for (k, v) in u.iter().enumerate() {
        if k != from.pinned {
            transverse += v * v;
        }
    }
    if transverse.sqrt() > from.h {
        return Err(Error::InvalidParams(format!(
            "section input norm {:e} exceeds the section radius {:e}",
            transverse.sqrt(),
            from.h
        )));
    }
    let eqs = find_equilibria(p)?;
    let box_radius = super::BOX_FACTOR
        * eqs
            .present
            .iter()
            .map(|e| e.amplitude)
            .fold(0.1, f64::max);
    let s0 = from.embed(u);
    match fly_to_sections(p, &s0, tol, budget_t, box_radius, &[to])? {
        FlightOutcome::Hit(hit) => Ok(MapOutcome::Landed {
            coords: to.coords(&hit.state),
            flight_time: hit.t,
        }),
        FlightOutcome::BoxExit { t, .. } => Ok(MapOutcome::Missed {
            after: t,
            reason: "left the bounding box".into(),
        }),
        FlightOutcome::Budget { t, .. } => Ok(MapOutcome::Missed {
            after: t,
            reason: "time budget exhausted".into(),
        }),
    }
}

/// One fitted exponent of a node passage map.
#[derive(Clone, Debug)]
pub struct RegressionRow {
    /// 1-based eigenvalue index of the measured coordinate.
    pub slot: usize,
    pub label: String,
    /// Slope predicted by the linearisation: −λ_slot / λ_escape.
    pub expected: f64,
    /// Fitted slope of ln|u_out| against ln(input magnitude), when enough
    /// ladder points stayed above the coordinate's noise floor.
    pub measured: Option<f64>,
    /// Ladder points used in the fit.
    pub points: usize,
    pub note: String,
}

/// Exponent regression of one node passage map.
#[derive(Clone, Debug)]
pub struct RegressionReport {
    pub node: EqClass,
    pub incoming: Connection,
    pub outgoing: Connection,
    /// 1-based eigenvalue index of the escape coordinate.
    pub escape_slot: usize,
    pub h: f64,
    pub rows: Vec<RegressionRow>,
    /// Flights that missed the exit section (dropped ladder points).
    pub missed_flights: usize,
}

/// Measures the local passage map at `node` between two of its connections
/// against the linearised power laws.
///
/// `ladder` holds the input magnitudes of the escape coordinate, relative
/// to the section radius (each entry m places the start at u_escape = m·h).
/// Each transverse coordinate is probed in its own flight so the cubic
/// cross-terms of the field cannot couple two probe coordinates; the entry
/// coordinate (pinned at h) is measured on a bare flight with no probe.
pub fn local_exponent_regression(
    p: &ModelParams,
    node: EqClass,
    incoming: Connection,
    outgoing: Connection,
    ladder: &[f64],
) -> Result<RegressionReport> {
    if incoming.to() != node || outgoing.from() != node {
        return Err(Error::InvalidParams(format!(
            "node {} does not join {} -> {}",
            node.name(),
            incoming.name(),
            outgoing.name()
        )));
    }
    if ladder.len() < 4 {
        return Err(Error::InvalidParams(format!(
            "regression ladder needs at least 4 magnitudes, got {}",
            ladder.len()
        )));
    }
    let mut ms: Vec<f64> = ladder.to_vec();
    ms.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if !(ms[0] <= 2e-2 && ms[ms.len() - 1] > 0.0) {
        return Err(Error::InvalidParams(
            "ladder magnitudes must lie in (0, 2e-2]".into(),
        ));
    }
    if ms[0] / ms[ms.len() - 1] < 10.0 {
        return Err(Error::InvalidParams(
            "ladder must span at least one decade".into(),
        ));
    }
    let m_min = ms[ms.len() - 1];

    let h = section_radius(p)?;
    let incoming_path = super::geometry::shoot_connection(p, incoming)?;
    let outgoing_base = super::geometry::shoot_connection(p, outgoing)?;
    let outgoing_path = outgoing_base.transported(&incoming_path.to.group_element);
    let chart = NodeChart::build(p, &incoming_path, &outgoing_path, h)?;
    let sec_in = chart.section_in();
    let sec_out = chart.section_out();

    let lam_esc = chart.lambda[chart.exit];
    let eqs = find_equilibria(p)?;
    let box_radius = super::BOX_FACTOR
        * eqs
            .present
            .iter()
            .map(|e| e.amplitude)
            .fold(0.1, f64::max);
    let budget = 3.0 * (1.0 / m_min).ln() / lam_esc + 50.0;
    let tol = 1e-10;

    let measured_slots: Vec<usize> = (0..6)
        .filter(|&k| k != chart.exit && k != chart.radial)
        .collect();

    let mut rows = Vec::new();
    let mut missed_flights = 0usize;
    let mut crossings = 0usize;

    for &slot in &measured_slots {
        let is_entry = slot == chart.entry;
        let protected = row_is_protected(&chart, slot);
        let floor = if protected { FLOOR_PROTECTED } else { FLOOR_SHARED };
        let r_c = chart.lambda[slot] / lam_esc;
        // Probe size: keep expanding rows inside the section at the
        // smallest magnitude (outputs scale like m^{-r_c} for r_c > 0).
        let c0 = 0.2 * h * m_min.powf(r_c.max(0.0));

        let mut pts: Vec<(f64, f64)> = Vec::new();
        let mut below_floor = 0usize;
        for &m in &ms {
            let mut u = [0.0; 6];
            u[chart.exit] = m * h;
            if !is_entry {
                u[slot] = c0;
            }
            let s0 = sec_in.embed(&u);
            match fly_to_sections(p, &s0, tol, budget, box_radius, &[&sec_out])? {
                FlightOutcome::Hit(hit) => {
                    crossings += 1;
                    let out = sec_out.coords(&hit.state)[slot];
                    if out.abs() >= floor {
                        pts.push((m.ln(), out.abs().ln()));
                    } else {
                        below_floor += 1;
                    }
                }
                _ => missed_flights += 1,
            }
        }

        let mut note = String::new();
        if below_floor > 0 {
            note = format!("{below_floor} ladder points below the {floor:e} output floor");
        }
        let measured = if pts.len() >= 4 {
            Some(fit_slope(&pts))
        } else {
            if note.is_empty() {
                note = format!("only {} usable ladder points", pts.len());
            }
            None
        };
        rows.push(RegressionRow {
            slot: slot + 1,
            label: eigen_label(chart.eq.class, slot + 1),
            expected: -chart.lambda[slot] / lam_esc,
            measured,
            points: pts.len(),
            note,
        });
    }

    if crossings < 4 {
        return Err(Error::TooFewCrossings {
            got: crossings,
            need: 4,
        });
    }

    Ok(RegressionReport {
        node,
        incoming,
        outgoing,
        escape_slot: chart.exit + 1,
        h,
        rows,
        missed_flights,
    })
}

/// Whether the probed row keeps relative accuracy at arbitrarily small
/// magnitudes on its own probe flight.
///
/// Every term of the x-equations carries its own coordinate as a factor,
/// so x coordinates evolve multiplicatively: an exact zero stays zero and
/// a small value never absorbs additive noise from larger ones. The
/// y-equations have one additive source each (the mixed terms y2·x3² etc.),
/// live only when both source coordinates are active on the probe. Rows
/// supported on unfed coordinates are protected and get the lower floor.
fn row_is_protected(chart: &NodeChart, slot: usize) -> bool {
    let mut active = [false; 6];
    for v in [
        &chart.eq.coords,
        &chart.basis[chart.entry],
        &chart.basis[chart.exit],
        &chart.basis[slot],
    ] {
        for i in 0..6 {
            if v.0[i].abs() > 1e-9 {
                active[i] = true;
            }
        }
    }
    let fed = |a: &[bool; 6], i: usize| match i {
        3 => a[4] && a[2] || a[5] && a[1],
        4 => a[5] && a[0] || a[3] && a[2],
        5 => a[3] && a[1] || a[4] && a[0],
        _ => false,
    };
    // Feeds can activate a coordinate that feeds another; close first.
    for _ in 0..3 {
        for i in 3..6 {
            if fed(&active, i) {
                active[i] = true;
            }
        }
    }
    (0..6).all(|i| chart.basis[slot].0[i].abs() <= 1e-9 || i < 3 || !fed(&active, i))
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
