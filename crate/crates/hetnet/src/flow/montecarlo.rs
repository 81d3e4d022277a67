//! Monte Carlo measurements of attraction: δ-basin fractions of sample
//! balls, the two-sided local stability index along a connection, escape
//! statistics for whole cross-sections, and a deterministic witness that
//! the connection set is not asymptotically stable.
//!
//! Sampling is reproducible: work item `i` draws from stream `i` of one
//! counter-mode generator seeded by the caller, so results are identical
//! for a fixed seed regardless of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles::{classify_cycle, Connection, CycleId};
use crate::flow::geometry::{ConnectionPath, NetworkGeometry, Target};
use crate::flow::integrate::Flight;
use crate::flow::section::{section_radius, NodeChart};
use crate::flow::PASSAGE_BUDGET;
use crate::model::{find_equilibria, EigenTable, EqClass, ModelParams, State};
use crate::{Error, Result, BOUNDARY_TOL};

/// Integration tolerance for Monte Carlo flights. Escape and attraction
/// are decided against distances of order δ, many orders above the local
/// error, so the stepper can run coarser than the regression flights.
const MC_TOL: f64 = 1e-9;

/// Passage budget for escape statistics; repelling dynamics ejects nearby
/// points within a handful of node passages.
const ESCAPE_PASSAGES: u32 = 12;

/// Dwell cushion added to every passage-time estimate, in time units.
const PASSAGE_TAIL: f64 = 10.0;

/// An ε ladder needs at least this many rungs spanning [`MIN_LADDER_SPAN`]
/// (one and a half decades) before slopes are worth fitting.
const MIN_LADDER: usize = 4;
const MIN_LADDER_SPAN: f64 = 31.622776601683793;

/// Counts below this are treated as consistent with zero when fitting.
const MIN_COUNT: usize = 3;

/// Perturbation sizes for the instability witness.
const WITNESS_ETAS: [f64; 4] = [1e-4, 1e-5, 1e-6, 1e-7];

fn stream_rng(seed: u64, item: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(item);
    rng
}

/// One standard normal pair (Box–Muller).
fn gaussians(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = std::f64::consts::TAU * u2;
    (r * th.cos(), r * th.sin())
}

/// Uniform draw from the ball of the given radius in the coordinate slots
/// where `mask` is true: isotropic Gaussian direction, `u^(1/dim)` radius.
fn ball_offset(rng: &mut ChaCha8Rng, mask: &[bool; 6], radius: f64) -> [f64; 6] {
    let dim = mask.iter().filter(|m| **m).count();
    debug_assert!(dim > 0);
    loop {
        let (a, b) = gaussians(rng);
        let (c, d) = gaussians(rng);
        let (e, f) = gaussians(rng);
        let raw = [a, b, c, d, e, f];
        let mut v = [0.0; 6];
        let mut norm2 = 0.0;
        for i in 0..6 {
            if mask[i] {
                v[i] = raw[i];
                norm2 += raw[i] * raw[i];
            }
        }
        if norm2 < 1e-24 {
            continue; // astronomically rare; redrawing keeps the law exact
        }
        let u: f64 = rng.gen();
        let scale = radius * u.powf(1.0 / dim as f64) / norm2.sqrt();
        for x in &mut v {
            *x *= scale;
        }
        return v;
    }
}

/// The eigenvalue that drives escape along `conn` (the expanding half of
/// its saddle-sink pair).
fn escape_rate(conn: Connection, table: &EigenTable) -> f64 {
    let (j, k) = match conn {
        Connection::K31 => (3, 1),
        Connection::K12 => (1, 5),
        Connection::K23 => (2, 6),
        Connection::K14 => (1, 6),
        Connection::K43 => (4, 5),
        Connection::K45 => (4, 2),
        Connection::K51 => (5, 3),
    };
    table.lam(j, k)
}

/// Worst-case duration of one node-to-node passage: the slowest present
/// escape rate must grow a deviation of size `0.01 ε` out to the box
/// scale, plus a fixed dwell cushion.
fn passage_time(geo: &NetworkGeometry, table: &EigenTable, eps: f64) -> f64 {
    let mut lam_min = f64::INFINITY;
    for path in &geo.paths {
        lam_min = lam_min.min(escape_rate(path.connection, table));
    }
    let lam = if lam_min.is_finite() { lam_min.max(1e-3) } else { 1e-3 };
    (geo.box_radius() / (0.01 * eps)).ln().max(1.0) / lam + PASSAGE_TAIL
}

enum Fate {
    InBasin,
    Escaped,
    Undecided,
}

/// Flies `s0` for at most `budget_t`, watching the distance to the set.
/// Escaped means the distance exceeded δ; in-basin means the orbit
/// survived the budget and ended clearly inside (below δ/3); anything
/// else is undecided.
fn orbit_fate(
    p: &ModelParams,
    geo: &NetworkGeometry,
    s0: State,
    delta: f64,
    budget_t: f64,
) -> Result<Fate> {
    let mut probe = geo.probe();
    let mut fl = Flight::new(p, s0, MC_TOL, false)?;
    loop {
        let d = probe.distance_capped(&fl.y, 0.8 * delta);
        if d > delta {
            return Ok(Fate::Escaped);
        }
        if fl.tau >= budget_t {
            return Ok(if d <= delta / 3.0 {
                Fate::InBasin
            } else {
                Fate::Undecided
            });
        }
        fl.advance_with_cap(budget_t)?;
    }
}

fn validate_ball(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0 && delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "ball radii must be positive and finite, got epsilon = {epsilon}, delta = {delta}"
        )));
    }
    if epsilon > delta / 10.0 {
        return Err(Error::InvalidParams(format!(
            "epsilon = {epsilon} must sit at least an order of magnitude inside the tube radius delta = {delta}"
        )));
    }
    Ok(())
}

/// Outcome of sampling one ε-ball against the δ-basin of the set.
#[derive(Clone, Debug, Serialize)]
pub struct BasinEstimate {
    /// Fraction of samples attracted: `in_basin / total`.
    pub s: f64,
    /// Binomial standard error of `s`.
    pub stderr: f64,
    pub in_basin: usize,
    pub escaped: usize,
    /// Samples that neither left the δ-tube nor settled onto the set
    /// within the budget. They count against `s` (not known attracted);
    /// a large count marks the estimate unreliable.
    pub undecided: usize,
    pub total: usize,
    /// Integration budget each sample received, in time units.
    pub budget_t: f64,
}

/// Fraction of the ε-ball around `x` that the δ-tube of the target set
/// keeps and attracts. Samples are uniform in the ball; each orbit flies
/// until it leaves the tube or exhausts a passage-count budget.
pub fn estimate_basin_fraction(
    p: &ModelParams,
    x: &State,
    target: Target,
    epsilon: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<BasinEstimate> {
    validate_ball(epsilon, delta)?;
    if samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let table = EigenTable::compute(p)?;
    let geo = NetworkGeometry::build(p, target)?;
    basin_fraction_with(p, &geo, &table, x, epsilon, delta, samples, seed)
}

#[allow(clippy::too_many_arguments)]
fn basin_fraction_with(
    p: &ModelParams,
    geo: &NetworkGeometry,
    table: &EigenTable,
    x: &State,
    epsilon: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<BasinEstimate> {
    validate_ball(epsilon, delta)?;
    if samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("ball centre {x:?}")));
    }
    let budget_t = f64::from(PASSAGE_BUDGET) * passage_time(geo, table, epsilon);
    let mask = [true; 6];
    let (mut in_basin, mut escaped, mut undecided) = (0usize, 0usize, 0usize);
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64);
        let off = ball_offset(&mut rng, &mask, epsilon);
        let s0 = x.add_scaled(1.0, &State(off));
        match orbit_fate(p, geo, s0, delta, budget_t)? {
            Fate::InBasin => in_basin += 1,
            Fate::Escaped => escaped += 1,
            Fate::Undecided => undecided += 1,
        }
    }
    let s = in_basin as f64 / samples as f64;
    let stderr = (s * (1.0 - s) / samples as f64).sqrt();
    Ok(BasinEstimate {
        s,
        stderr,
        in_basin,
        escaped,
        undecided,
        total: samples,
        budget_t,
    })
}

/// One rung of an ε ladder.
#[derive(Clone, Debug, Serialize)]
pub struct LadderPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub estimate: BasinEstimate,
}

/// Local stability index measured from ball fractions over an ε ladder at
/// one point of a connection. The deficit exponents are the slopes of
/// ln S and ln(1 − S) against ln ε; the index is their difference.
#[derive(Clone, Debug, Serialize)]
pub struct IndexEstimate {
    pub connection: Connection,
    /// Evaluation point: the midpoint of the connection arc. The index is
    /// constant along orbits, so any interior point represents the arc.
    pub x: State,
    pub ladder: Vec<LadderPoint>,
    /// Slope of ln S against ln ε; `None` when fewer than three rungs had
    /// a measurably positive S.
    pub sigma_minus: Option<f64>,
    /// Slope of ln(1 − S) against ln ε; `None` when fewer than three
    /// rungs had measurably many samples outside the basin.
    pub sigma_plus: Option<f64>,
    /// `sigma_plus − sigma_minus` when both slopes were measurable.
    pub sigma: Option<f64>,
    /// No sample escaped at any ε: consistent with S ≡ 1, index +∞.
    pub plus_infinity_consistent: bool,
    /// No sample was attracted at any ε: consistent with S ≡ 0, index −∞.
    pub minus_infinity_consistent: bool,
    /// Some rung left more than a tenth of its samples undecided.
    pub low_confidence: bool,
}

impl IndexEstimate {
    /// CSV of the ladder, one line per rung, stable column order.
    pub fn ladder_csv(&self) -> String {
        let mut out =
            String::from("connection,epsilon,delta,samples,in_basin,escaped,undecided,s,stderr\n");
        for pt in &self.ladder {
            let e = &pt.estimate;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.connection.name(),
                pt.epsilon,
                pt.delta,
                e.total,
                e.in_basin,
                e.escaped,
                e.undecided,
                e.s,
                e.stderr
            ));
        }
        out
    }
}

/// Measures the local stability index of `connection` within `target` by
/// sampling ε-balls of every ladder rung `(ε, δ)` at the arc midpoint.
pub fn estimate_stability_index(
    p: &ModelParams,
    connection: Connection,
    target: Target,
    ladder: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<IndexEstimate> {
    let in_target = match target {
        Target::Cycle(c) => c.connections().contains(&connection),
        Target::Network => true,
    };
    if !in_target {
        return Err(Error::InvalidParams(format!(
            "{} is not a connection of {}",
            connection.name(),
            target.name()
        )));
    }
    if ladder.len() < MIN_LADDER {
        return Err(Error::InvalidParams(format!(
            "the epsilon ladder needs at least {MIN_LADDER} rungs, got {}",
            ladder.len()
        )));
    }
    for &(eps, delta) in ladder {
        validate_ball(eps, delta)?;
    }
    let (lo, hi) = ladder
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(eps, _)| {
            (lo.min(eps), hi.max(eps))
        });
    if hi / lo < MIN_LADDER_SPAN {
        return Err(Error::InvalidParams(format!(
            "the epsilon ladder must span at least one and a half decades, got {lo} to {hi}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }

    let table = EigenTable::compute(p)?;
    let geo = NetworkGeometry::build(p, target)?;
    let Some(path) = geo.path(connection) else {
        let why = geo
            .missing
            .iter()
            .find(|(c, _)| *c == connection)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| "not part of the built set".into());
        return Err(Error::PremisesViolated(format!(
            "{} does not exist at these parameters: {why}",
            connection.name()
        )));
    };
    let x = path.midpoint();

    let mut points = Vec::with_capacity(ladder.len());
    for (i, &(eps, delta)) in ladder.iter().enumerate() {
        let rung_seed = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i as u64 + 1));
        let estimate = basin_fraction_with(p, &geo, &table, &x, eps, delta, samples, rung_seed)?;
        points.push(LadderPoint {
            epsilon: eps,
            delta,
            estimate,
        });
    }

    let n = samples as f64;
    let mut minus_pts = Vec::new();
    let mut plus_pts = Vec::new();
    let mut plus_inf = true;
    let mut minus_inf = true;
    let mut low_confidence = false;
    for pt in &points {
        let est = &pt.estimate;
        if est.escaped > 0 {
            plus_inf = false;
        }
        if est.in_basin > 0 {
            minus_inf = false;
        }
        if est.undecided * 10 > est.total {
            low_confidence = true;
        }
        let s = est.s;
        if est.in_basin >= MIN_COUNT {
            // var(ln S) ≈ (1 − S) / (n S); continuity-correct the S = 1 case.
            let w = n * s / (1.0 - s).max(0.5 / n);
            minus_pts.push((pt.epsilon.ln(), s.ln(), w));
        }
        let out_count = est.total - est.in_basin;
        if out_count >= MIN_COUNT {
            let q = 1.0 - s;
            let w = n * q / s.max(0.5 / n);
            plus_pts.push((pt.epsilon.ln(), q.ln(), w));
        }
    }
    let sigma_minus = wls_slope(&minus_pts);
    let sigma_plus = wls_slope(&plus_pts);
    let sigma = match (sigma_plus, sigma_minus) {
        (Some(pl), Some(mi)) => Some(pl - mi),
        _ => None,
    };
    Ok(IndexEstimate {
        connection,
        x,
        ladder: points,
        sigma_minus,
        sigma_plus,
        sigma,
        plus_infinity_consistent: plus_inf,
        minus_infinity_consistent: minus_inf,
        low_confidence,
    })
}

/// Weighted least-squares slope of `(x, y, w)` points; `None` below three
/// points or without spread in the abscissa.
fn wls_slope(pts: &[(f64, f64, f64)]) -> Option<f64> {
    if pts.len() < MIN_COUNT {
        return None;
    }
    let wsum: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / wsum;
    let ybar = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / wsum;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    (sxx > 1e-12).then(|| sxy / sxx)
}

/// Escape statistics for a ball of section states around the arrival
/// point of a connection.
#[derive(Clone, Debug, Serialize)]
pub struct EscapeReport {
    pub connection: Connection,
    pub epsilon: f64,
    pub delta: f64,
    pub escaped: usize,
    pub stayed: usize,
    pub total: usize,
    pub fraction_stayed: f64,
    pub budget_t: f64,
}

/// Samples the entry cross-section where `connection` lands with a ball
/// of section states of radius ε and counts how many orbits leave the
/// δ-tube of the network. Requires both cycles through ξ1 to be
/// completely unstable — the regime where almost every section state
/// must escape.
pub fn section_escape_test(
    p: &ModelParams,
    connection: Connection,
    delta: f64,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<EscapeReport> {
    let table = EigenTable::compute(p)?;
    both_cycles_completely_unstable(&table)?;
    validate_ball(epsilon, delta)?;
    if samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let h = section_radius(p)?;
    if epsilon > h {
        return Err(Error::InvalidParams(format!(
            "the section ball radius {epsilon} exceeds the section radius {h}"
        )));
    }
    let geo = NetworkGeometry::build(p, Target::Network)?;
    let Some(path) = geo.path(connection) else {
        let why = geo
            .missing
            .iter()
            .find(|(c, _)| *c == connection)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| "not part of the built set".into());
        return Err(Error::PremisesViolated(format!(
            "{} does not exist at these parameters: {why}",
            connection.name()
        )));
    };
    let outgoing = outgoing_at_landing(&geo, path)?;
    let chart = NodeChart::build(p, path, &outgoing, h)?;
    let sec = chart.section_in();
    let mut mask = [true; 6];
    mask[sec.pinned] = false;

    let budget_t = f64::from(ESCAPE_PASSAGES) * passage_time(&geo, &table, epsilon);
    let (mut escaped, mut stayed) = (0usize, 0usize);
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64);
        let u = ball_offset(&mut rng, &mask, epsilon);
        let s0 = sec.embed(&u);
        match orbit_fate(p, &geo, s0, delta, budget_t)? {
            Fate::Escaped => escaped += 1,
            Fate::InBasin | Fate::Undecided => stayed += 1,
        }
    }
    Ok(EscapeReport {
        connection,
        epsilon,
        delta,
        escaped,
        stayed,
        total: samples,
        fraction_stayed: stayed as f64 / samples as f64,
        budget_t,
    })
}

/// Any connection leaving the class where `path` lands, transported to
/// the landing copy; needed to chart the section frame there.
fn outgoing_at_landing(geo: &NetworkGeometry, path: &ConnectionPath) -> Result<ConnectionPath> {
    for &c in outgoing_candidates(path.connection.to()) {
        if let Some(base) = geo.path(c) {
            return Ok(base.transported(&path.to.group_element));
        }
    }
    Err(Error::PremisesViolated(format!(
        "no outgoing connection exists at the landing point of {}",
        path.connection.name()
    )))
}

fn outgoing_candidates(class: EqClass) -> &'static [Connection] {
    match class {
        EqClass::Xi1 => &[Connection::K12, Connection::K14],
        EqClass::Xi2 => &[Connection::K23],
        EqClass::Xi3 => &[Connection::K31],
        EqClass::Xi4 => &[Connection::K43, Connection::K45],
        EqClass::Xi5 => &[Connection::K51],
    }
}

/// Errors unless both cycles through ξ1 are completely unstable. The
/// ξ3ξ1ξ4 side must satisfy its classifier premises; the ξ3ξ1ξ2 side may
/// instead be certified by an expanding transverse pair at ξ2, which
/// ejects every nearby point regardless of the within-cycle race.
fn both_cycles_completely_unstable(table: &EigenTable) -> Result<()> {
    let r143 = match classify_cycle(CycleId::C143, table) {
        Ok(r) => r,
        Err(Error::PremisesViolated(why)) => {
            return Err(Error::OutsideHypothesis(format!(
                "the xi3-xi1-xi4 cycle is not classified here: {why}"
            )))
        }
        Err(e) => return Err(e),
    };
    if !r143.verdict.completely_unstable {
        return Err(Error::OutsideHypothesis(
            "the xi3-xi1-xi4 cycle is not completely unstable".into(),
        ));
    }
    match classify_cycle(CycleId::C123, table) {
        Ok(r) if r.verdict.completely_unstable => Ok(()),
        Ok(_) => Err(Error::OutsideHypothesis(
            "the xi3-xi1-xi2 cycle is not completely unstable".into(),
        )),
        Err(Error::PremisesViolated(_)) => c123_unstable_by_transverse_expansion(table),
        Err(e) => Err(e),
    }
}

/// The ξ3ξ1ξ2 cycle exists (three saddle-sink arcs) while the transverse
/// pair at ξ2 expands: the cycle then repels a full-measure neighbourhood
/// even though it sits outside the sign table the classifier covers.
fn c123_unstable_by_transverse_expansion(table: &EigenTable) -> Result<()> {
    let gates: [(f64, &str, bool); 7] = [
        (table.lam(3, 1), "lambda31", true),
        (table.lam(1, 4), "lambda14", false),
        (table.lam(1, 5), "lambda15", true),
        (table.lam(2, 1), "lambda21", false),
        (table.lam(2, 6), "lambda26", true),
        (table.lam(3, 5), "lambda35", false),
        (table.lam(2, 2), "lambda22", true),
    ];
    for (value, name, wants_positive) in gates {
        let ok = if wants_positive {
            value > BOUNDARY_TOL
        } else {
            value < -BOUNDARY_TOL
        };
        if !ok {
            return Err(Error::OutsideHypothesis(format!(
                "the xi3-xi1-xi2 cycle is not certified unstable: {name} = {value} is not {}",
                if wants_positive { "positive" } else { "negative" }
            )));
        }
    }
    Ok(())
}

/// One verified perturbation size of the instability witness.
#[derive(Clone, Debug, Serialize)]
pub struct EtaRun {
    pub eta: f64,
    /// Time at which the orbit's distance to the set first exceeded δ.
    pub witness_time: f64,
    pub max_dist: f64,
}

/// A family of arbitrarily small perturbations of a node that all leave
/// the δ-tube of the set, demonstrating that the set does not attract a
/// full neighbourhood.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    /// Node whose expanding directions supplied the perturbation.
    pub node: EqClass,
    /// Label of the perturbation direction, e.g. "e42+e45".
    pub direction: String,
    pub delta: f64,
    pub runs: Vec<EtaRun>,
    /// Control: an equally sized perturbation along the departure tangent
    /// of a connection at the same node; its orbit rides within the set
    /// and must stay δ-close throughout the same budget.
    pub control_direction: String,
    pub control_max_dist: f64,
}

/// Demonstrates that the connection set is not asymptotically stable:
/// finds an expanding direction at one of the nodes whose perturbed orbit
/// leaves the δ-tube for every size η ∈ {1e−4 … 1e−7}, and checks that a
/// within-set perturbation of the largest size stays inside.
///
/// Candidate directions are mixes of two expanding eigendirections (pairs
/// first, then single directions), scanned over the nodes in a fixed
/// order; which channel actually leaves the tube depends on the sign
/// regime, so the first verified one is reported.
pub fn verify_not_asymptotically_stable(p: &ModelParams, delta: f64) -> Result<WitnessReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta must be positive and finite, got {delta}"
        )));
    }
    let table = EigenTable::compute(p)?;
    let eqs = find_equilibria(p)?;
    let geo = NetworkGeometry::build(p, Target::Network)?;

    let mut tried: Vec<String> = Vec::new();
    let classes = [
        EqClass::Xi4,
        EqClass::Xi5,
        EqClass::Xi2,
        EqClass::Xi1,
        EqClass::Xi3,
    ];
    for class in classes {
        let Some(eq) = eqs.get(class) else { continue };
        let data = table.get(class);
        let j = class.idx();
        let expanding: Vec<usize> = (1..=6)
            .filter(|&k| !data.radial[k - 1] && data.lam(k) > BOUNDARY_TOL)
            .collect();
        if expanding.is_empty() {
            continue;
        }

        let mut candidates: Vec<(String, State, f64)> = Vec::new();
        for (i, &ka) in expanding.iter().enumerate() {
            for &kb in &expanding[i + 1..] {
                let v = data.vec(ka).add_scaled(1.0, &data.vec(kb));
                candidates.push((
                    format!("e{j}{ka}+e{j}{kb}"),
                    v.scale(1.0 / v.norm()),
                    data.lam(ka).min(data.lam(kb)),
                ));
            }
        }
        for &k in &expanding {
            candidates.push((format!("e{j}{k}"), data.vec(k), data.lam(k)));
        }

        for (label, v, lam_weak) in candidates {
            match witness_runs(p, &geo, &eq.coords, &v, lam_weak, delta)? {
                Some(runs) => {
                    let (control_direction, control_max_dist) =
                        witness_control(p, &geo, class, lam_weak, delta)?;
                    return Ok(WitnessReport {
                        node: class,
                        direction: label,
                        delta,
                        runs,
                        control_direction,
                        control_max_dist,
                    });
                }
                None => tried.push(format!("{} at {}", label, class.name())),
            }
        }
    }
    Err(Error::CheckFailed(format!(
        "no expanding perturbation left the delta = {delta} tube; tried: {}",
        if tried.is_empty() {
            "no node offered an expanding direction".to_owned()
        } else {
            tried.join(", ")
        }
    )))
}

/// Flies every η of the witness ladder along `v`; `Some(runs)` when each
/// size escaped the tube, `None` as soon as one stays inside its budget.
fn witness_runs(
    p: &ModelParams,
    geo: &NetworkGeometry,
    node: &State,
    v: &State,
    lam_weak: f64,
    delta: f64,
) -> Result<Option<Vec<EtaRun>>> {
    let mut runs = Vec::with_capacity(WITNESS_ETAS.len());
    for &eta in &WITNESS_ETAS {
        let budget = witness_budget(geo, lam_weak, eta);
        let s0 = node.add_scaled(eta, v);
        let (max_dist, hit) = max_excursion(p, geo, s0, delta, budget)?;
        match hit {
            Some(t) => runs.push(EtaRun {
                eta,
                witness_time: t,
                max_dist,
            }),
            None => return Ok(None),
        }
    }
    Ok(Some(runs))
}

/// Rides the departure tangent of the first existing connection at
/// `class` with the largest witness η; errors unless the orbit stays
/// δ-close to the set for the whole budget.
fn witness_control(
    p: &ModelParams,
    geo: &NetworkGeometry,
    class: EqClass,
    lam_weak: f64,
    delta: f64,
) -> Result<(String, f64)> {
    let path = outgoing_candidates(class)
        .iter()
        .find_map(|&c| geo.path(c))
        .ok_or_else(|| {
            Error::OutsideHypothesis(format!(
                "no within-set connection leaves {} to serve as a control",
                class.name()
            ))
        })?;
    let eta = WITNESS_ETAS[0];
    let budget = witness_budget(geo, lam_weak, eta);
    let s0 = path.from.coords.add_scaled(eta, &path.exit_dir);
    let (max_dist, hit) = max_excursion(p, geo, s0, delta, budget)?;
    if hit.is_some() {
        return Err(Error::CheckFailed(format!(
            "the within-set control along {} left the delta tube (distance {max_dist})",
            path.connection.name()
        )));
    }
    Ok((path.connection.name().to_owned(), max_dist))
}

fn witness_budget(geo: &NetworkGeometry, lam_weak: f64, eta: f64) -> f64 {
    2.0 * (geo.box_radius() / eta).ln() / lam_weak.max(1e-3) + 50.0
}

/// Largest distance from the set seen along the orbit (an upper bound
/// while the orbit stays capped-close), plus the first time the distance
/// exceeded δ, if any — at which point the flight stops.
fn max_excursion(
    p: &ModelParams,
    geo: &NetworkGeometry,
    s0: State,
    delta: f64,
    budget_t: f64,
) -> Result<(f64, Option<f64>)> {
    let mut probe = geo.probe();
    let mut fl = Flight::new(p, s0, MC_TOL, false)?;
    let mut max_dist: f64 = 0.0;
    loop {
        let d = probe.distance_capped(&fl.y, 0.8 * delta);
        max_dist = max_dist.max(d);
        if d > delta {
            return Ok((max_dist, Some(fl.tau)));
        }
        if fl.tau >= budget_t {
            return Ok((max_dist, None));
        }
        fl.advance_with_cap(budget_t)?;
    }
}
