//! Shooting for the entire radial solution of `Δ²φ = φ^p`, `φ(0) = α`.
//!
//! Trajectories start from the regular series at a small radius, run in the
//! radial chart up to `r_switch`, and continue in the Emden–Fowler chart
//! written for `Y = W − L`, which keeps full relative precision while `Y`
//! decays by tens of orders of magnitude. Every trajectory is sampled on the
//! uniform grid `sⱼ = j·Δs`.
//!
//! The entire solution sits on the stable manifold of a saddle whose unstable
//! rate `λ₄ − λ₃` is large, so a single bisection on `v0 = Δφ(0)` only follows
//! it for a few units of `s`. Once the two bracketing trajectories separate,
//! the shooter restarts from their common state and bisects again along the
//! unstable eigendirection `(1, λ₄, λ₄², λ₄³)`, repeating until `r_max`.

pub mod checks;
mod solution;
pub mod system;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Advance, Control, Dop853, OdeSystem, Tolerance};
use crate::params::ProblemParams;
use crate::roots::bisect;
use crate::spectrum::{compute_spectrum, eigen_poly_eval};

pub use checks::{
    decay_slope, emden_fowler_residual, emden_fowler_residual_grid, limit_deviation,
    y_integral_identity_check, DecaySlope,
};
pub use solution::{z_from_y, RadialSolution};
use system::{ef_to_radial, radial_to_ef, taylor_seed, EmdenFowlerSystem, RadialSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootControls {
    pub r_max: f64,
    pub r_min: f64,
    /// Radius at which integration moves from the `r` chart to the `s` chart.
    pub r_switch: f64,
    /// Grid spacing in `s`.
    pub ds: f64,
    /// Integrator relative tolerance.
    pub rtol: f64,
    /// Series start radius in units of the natural length `α^{−1/m}`.
    pub seed_radius: f64,
    /// `|φ| > blowup_factor·α` counts as blow-up.
    pub blowup_factor: f64,
    /// Also classify `W > L` as blow-up and `W′ < 0` as sign loss, which
    /// stops doomed trajectories long before the hard thresholds.
    pub monotone_exit: bool,
    pub probe_min: f64,
    pub probe_max: f64,
    pub probes_per_decade: usize,
    pub max_bisections: usize,
    /// Relative separation of the bracketing trajectories that triggers a restart.
    pub divergence_tol: f64,
    pub max_restarts: usize,
    /// Required `|r^m φ(r_max)/L − 1|`.
    pub target_tol: f64,
}

impl Default for ShootControls {
    fn default() -> Self {
        Self {
            r_max: 1e4,
            r_min: 1e-2,
            r_switch: 10.0,
            ds: 1e-2,
            rtol: 1e-13,
            seed_radius: 1e-4,
            blowup_factor: 1e8,
            monotone_exit: true,
            probe_min: 1e-6,
            probe_max: 1e3,
            probes_per_decade: 10,
            max_bisections: 400,
            divergence_tol: 1e-10,
            max_restarts: 200,
            target_tol: 1e-2,
        }
    }
}

impl ShootControls {
    fn validate(&self) -> Result<()> {
        let ok = self.r_min > 0.0
            && self.r_switch > self.r_min
            && self.r_max > self.r_min
            && self.ds > 0.0
            && self.rtol > 0.0
            && self.seed_radius > 0.0
            && self.probe_min > 0.0
            && self.probe_max > self.probe_min
            && self.probes_per_decade > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("inconsistent shooting controls: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Persisted,
    BlowUp { r: f64 },
    SignLoss { r: f64 },
}

impl Outcome {
    fn same_kind(&self, other: &Outcome) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Result of integrating one trajectory with a given `v0`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialOutcome {
    Solution(Box<RadialSolution>),
    BlowUp { r: f64 },
    SignLoss { r: f64 },
}

/// The positive root `λ₄` of `𝒫`, which exists for every supercritical `p`.
pub fn unstable_eigenvalue(params: &ProblemParams) -> Result<f64> {
    let f = |l: f64| eigen_poly_eval(params, l);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParams("no positive eigenvalue".into()));
        }
    }
    bisect(f, 0.0, hi)
}

#[derive(Debug, Clone, Copy)]
enum Event {
    BlowUp,
    SignLoss,
    /// `φ` actually crossed zero; located by interval halving.
    Crossing,
}

#[derive(Debug, Clone)]
struct Trajectory {
    start: usize,
    s_states: Vec<[f64; 4]>,
    r_states: Vec<[f64; 4]>,
    outcome: Outcome,
}

impl Trajectory {
    fn end(&self) -> usize {
        self.start + self.s_states.len() - 1
    }
}

struct Grid {
    j_min: i64,
    j_switch: i64,
    j_end: i64,
    ds: f64,
}

impl Grid {
    fn new(c: &ShootControls) -> Self {
        let idx = |x: f64| {
            let j = x.ln() / c.ds;
            if (j - j.round()).abs() < 1e-9 {
                j.round() as i64
            } else {
                j.ceil() as i64
            }
        };
        let j_min = (c.r_min.ln() / c.ds).round() as i64;
        let j_end = idx(c.r_max).max(j_min + 1);
        let j_switch = ((c.r_switch.ln() / c.ds).round() as i64).clamp(j_min, j_end);
        Self { j_min, j_switch, j_end, ds: c.ds }
    }
    fn s(&self, i: usize) -> f64 {
        (self.j_min + i as i64) as f64 * self.ds
    }
    fn last(&self) -> usize {
        (self.j_end - self.j_min) as usize
    }
    fn switch(&self) -> usize {
        (self.j_switch - self.j_min) as usize
    }
}

struct Shooter<'a> {
    params: ProblemParams,
    c: &'a ShootControls,
    alpha: f64,
    nf: f64,
    m: f64,
    amp: f64,
    lambda4: f64,
    radial: RadialSystem,
    ef: EmdenFowlerSystem,
    grid: Grid,
    tol: Tolerance,
}

impl<'a> Shooter<'a> {
    fn new(params: &ProblemParams, alpha: f64, c: &'a ShootControls) -> Result<Self> {
        let params = ProblemParams::new(params.n, params.p)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
        }
        c.validate()?;
        // rejects p below p_c, where the entire solution oscillates about L
        let spec = compute_spectrum(&params)?;
        let amp = spec.amplitude;
        Ok(Self {
            c,
            alpha,
            nf: params.nf(),
            m: params.m(),
            amp,
            lambda4: spec.l4(),
            radial: RadialSystem { n: params.nf(), p: params.p },
            ef: EmdenFowlerSystem::new(params.n, params.p, amp),
            grid: Grid::new(c),
            tol: Tolerance { rtol: c.rtol, atol: 0.0, floor: 1e-3 },
            params,
        })
    }

    fn seed_r(&self) -> f64 {
        self.c.seed_radius * self.alpha.powf(-1.0 / self.m)
    }

    fn check_radial(&self, r: f64, y: &[f64; 4]) -> Option<Event> {
        let u = y[0];
        if u < 0.0 {
            return Some(Event::Crossing);
        }
        if u.abs() > self.c.blowup_factor * self.alpha {
            return Some(Event::BlowUp);
        }
        if self.c.monotone_exit {
            if r.powf(self.m) * u > self.amp {
                return Some(Event::BlowUp);
            }
            if self.m * u + r * y[1] < 0.0 {
                return Some(Event::SignLoss);
            }
        }
        None
    }

    fn check_ef(&self, s: f64, y: &[f64; 4]) -> Option<Event> {
        let w = self.amp + y[0];
        if w < 0.0 {
            return Some(Event::Crossing);
        }
        if (-self.m * s).exp() * w > self.c.blowup_factor * self.alpha {
            return Some(Event::BlowUp);
        }
        if self.c.monotone_exit {
            if y[0] > 0.0 {
                return Some(Event::BlowUp);
            }
            if y[1] < 0.0 {
                return Some(Event::SignLoss);
            }
        }
        None
    }

    /// Halves `[t0, t1]` until the first time `negative` holds is pinned down.
    fn refine<S: OdeSystem<4>>(
        &self,
        sys: &S,
        mut t0: f64,
        mut y0: [f64; 4],
        mut t1: f64,
        negative: impl Fn(&[f64; 4]) -> bool,
    ) -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (t0 + t1);
            if mid == t0 || mid == t1 {
                break;
            }
            let mut solver = Dop853::new(self.tol);
            let h = 0.25 * (mid - t0);
            match solver.advance(sys, t0, &y0, mid, h, |_, _| Control::<()>::Continue) {
                Ok(Advance::Reached { y, .. }) => {
                    if negative(&y) {
                        t1 = mid;
                    } else {
                        t0 = mid;
                        y0 = y;
                    }
                }
                _ => break,
            }
        }
        0.5 * (t0 + t1)
    }

    fn outcome_of(&self, ev: Event, t_event: f64) -> Outcome {
        match ev {
            Event::BlowUp => Outcome::BlowUp { r: t_event },
            Event::SignLoss | Event::Crossing => Outcome::SignLoss { r: t_event },
        }
    }

    fn run_radial(&self, v0: f64) -> Result<Trajectory> {
        let g = &self.grid;
        let i_sw = g.switch();
        let mut traj =
            Trajectory { start: 0, s_states: vec![], r_states: vec![], outcome: Outcome::Persisted };
        let push = |traj: &mut Trajectory, r: f64, st: [f64; 4]| {
            traj.r_states.push(st);
            traj.s_states.push(radial_to_ef(self.nf, self.m, self.amp, r, &st));
        };
        let r_seed = self.seed_r();
        let mut i = 0;
        while i <= i_sw && g.s(i).exp() <= r_seed {
            let r = g.s(i).exp();
            push(&mut traj, r, taylor_seed(self.nf, self.params.p, self.alpha, v0, r));
            i += 1;
        }
        let mut t = r_seed;
        let mut y = taylor_seed(self.nf, self.params.p, self.alpha, v0, r_seed);
        let mut h = 0.1 * r_seed;
        let mut solver = Dop853::new(self.tol);
        while i <= i_sw {
            let target = g.s(i).exp();
            let mut prev = (t, y);
            let res = solver.advance(&self.radial, t, &y, target, h, |tt, yy| {
                match self.check_radial(tt, yy) {
                    Some(ev) => Control::Stop(ev),
                    None => {
                        prev = (tt, *yy);
                        Control::Continue
                    }
                }
            });
            match res {
                Ok(Advance::Reached { y: yn, h: hn }) => {
                    t = target;
                    y = yn;
                    h = hn;
                    push(&mut traj, t, y);
                    i += 1;
                }
                Ok(Advance::Stopped { t: ts, reason, .. }) => {
                    let r = match reason {
                        Event::Crossing => {
                            self.refine(&self.radial, prev.0, prev.1, ts, |s| s[0] < 0.0)
                        }
                        _ => ts,
                    };
                    traj.outcome = self.outcome_of(reason, r);
                    return Ok(traj);
                }
                Err(e) => {
                    if prev.1[0] > self.alpha {
                        traj.outcome = Outcome::BlowUp { r: prev.0 };
                        return Ok(traj);
                    }
                    return Err(e);
                }
            }
        }
        if i_sw < g.last() {
            let st = *traj.s_states.last().unwrap();
            self.run_ef(i_sw, st, &mut traj)?;
        }
        Ok(traj)
    }

    /// Continues `traj` in the `s` chart from node `i0` (whose state is already stored).
    fn run_ef(&self, i0: usize, state: [f64; 4], traj: &mut Trajectory) -> Result<()> {
        let g = &self.grid;
        let mut t = g.s(i0);
        let mut y = state;
        let mut h = 0.5 * g.ds;
        let mut solver = Dop853::new(self.tol);
        for i in i0 + 1..=g.last() {
            let target = g.s(i);
            let mut prev = (t, y);
            let res = solver.advance(&self.ef, t, &y, target, h, |tt, yy| {
                match self.check_ef(tt, yy) {
                    Some(ev) => Control::Stop(ev),
                    None => {
                        prev = (tt, *yy);
                        Control::Continue
                    }
                }
            });
            match res {
                Ok(Advance::Reached { y: yn, h: hn }) => {
                    t = target;
                    y = yn;
                    h = hn;
                    traj.s_states.push(y);
                }
                Ok(Advance::Stopped { t: ts, reason, .. }) => {
                    let s = match reason {
                        Event::Crossing => {
                            let amp = self.amp;
                            self.refine(&self.ef, prev.0, prev.1, ts, |st| amp + st[0] < 0.0)
                        }
                        _ => ts,
                    };
                    traj.outcome = self.outcome_of(reason, s.exp());
                    return Ok(());
                }
                Err(e) => {
                    if prev.1[0] > 0.0 {
                        traj.outcome = Outcome::BlowUp { r: prev.0.exp() };
                        return Ok(());
                    }
                    return Err(e);
                }
            }
        }
        traj.outcome = Outcome::Persisted;
        Ok(())
    }

    fn run_from(&self, i0: usize, state: [f64; 4]) -> Result<Trajectory> {
        let mut traj = Trajectory {
            start: i0,
            s_states: vec![state],
            r_states: vec![],
            outcome: Outcome::Persisted,
        };
        if i0 < self.grid.last() {
            self.run_ef(i0, state, &mut traj)?;
        }
        Ok(traj)
    }

    /// Bisects a scalar parameter between two trajectories of opposite fate.
    fn bisect_fates<F>(
        &self,
        mut a: (f64, Trajectory),
        mut b: (f64, Trajectory),
        width: f64,
        trial: F,
    ) -> Result<Bisected>
    where
        F: Fn(f64) -> Result<Trajectory>,
    {
        for _ in 0..self.c.max_bisections {
            let mid = 0.5 * (a.0 + b.0);
            if mid == a.0 || mid == b.0 || (b.0 - a.0).abs() <= width {
                return Ok(Bisected::Bracket(a.1, b.1, (a.0, b.0)));
            }
            let t = trial(mid)?;
            if t.outcome == Outcome::Persisted {
                return Ok(Bisected::Persisted(t, mid));
            }
            if t.outcome.same_kind(&a.1.outcome) {
                a = (mid, t);
            } else {
                b = (mid, t);
            }
        }
        Ok(Bisected::Bracket(a.1, b.1, (a.0, b.0)))
    }

    /// Last node at which the two trajectories agree to `divergence_tol`.
    fn agreement(&self, a: &Trajectory, b: &Trajectory) -> usize {
        let tol = self.c.divergence_tol;
        let end = a.end().min(b.end());
        let mut ok = a.start;
        for i in a.start..=end {
            let (x, y) = (&a.s_states[i - a.start], &b.s_states[i - b.start]);
            let close = |k: usize| (x[k] - y[k]).abs() <= tol * x[k].abs().max(y[k].abs());
            if !(close(0) && close(1)) {
                break;
            }
            ok = i;
        }
        ok
    }
}

enum Bisected {
    Persisted(Trajectory, f64),
    Bracket(Trajectory, Trajectory, (f64, f64)),
}

/// Node states accumulated across restarts.
struct Assembly {
    s_states: Vec<Option<[f64; 4]>>,
    r_states: Vec<Option<[f64; 4]>>,
}

impl Assembly {
    fn commit_pair(&mut self, a: &Trajectory, b: &Trajectory, upto: usize) {
        for i in a.start..=upto {
            let (x, y) = (&a.s_states[i - a.start], &b.s_states[i - b.start]);
            self.s_states[i] = Some(std::array::from_fn(|k| 0.5 * (x[k] + y[k])));
            let ri = i - a.start;
            if ri < a.r_states.len() && ri < b.r_states.len() {
                let (x, y) = (&a.r_states[ri], &b.r_states[ri]);
                self.r_states[i] = Some(std::array::from_fn(|k| 0.5 * (x[k] + y[k])));
            } else if i < self.r_states.len() {
                self.r_states[i] = None;
            }
        }
    }

    fn commit(&mut self, t: &Trajectory) {
        for (off, st) in t.s_states.iter().enumerate() {
            let i = t.start + off;
            self.s_states[i] = Some(*st);
            if i < self.r_states.len() {
                self.r_states[i] = t.r_states.get(off).copied();
            }
        }
    }
}

impl Shooter<'_> {
    fn probe(&self) -> Result<ProbeResult> {
        let c = self.c;
        let decades = (c.probe_max / c.probe_min).log10();
        let count = (decades * c.probes_per_decade as f64).ceil() as usize + 1;
        let mut prev: Option<(f64, Trajectory)> = None;
        let mut seen = Vec::new();
        // from the most negative v0 towards zero
        for k in 0..count {
            let v0 = -c.probe_max * (c.probe_min / c.probe_max).powf(k as f64 / (count - 1) as f64);
            let t = self.run_radial(v0)?;
            if t.outcome == Outcome::Persisted {
                return Ok(ProbeResult::Persisted(t, v0));
            }
            seen.push(t.outcome);
            if let Some((pv, pt)) = prev.take() {
                if !pt.outcome.same_kind(&t.outcome) {
                    return Ok(ProbeResult::Bracket((pv, pt), (v0, t)));
                }
            }
            prev = Some((v0, t));
        }
        let blow = seen.iter().filter(|o| matches!(o, Outcome::BlowUp { .. })).count();
        Err(Error::BracketNotFound(format!(
            "{} probes of v0 in [-{:e}, -{:e}]: {} blow-up, {} sign loss",
            seen.len(),
            c.probe_max,
            c.probe_min,
            blow,
            seen.len() - blow
        )))
    }

    fn finish(&self, asm: Assembly, v0: f64, restarts: usize) -> Result<RadialSolution> {
        let g = &self.grid;
        let len = g.last() + 1;
        let mut sol = RadialSolution {
            params: self.params,
            alpha: self.alpha,
            v0,
            amplitude: self.amp,
            lambda4: self.lambda4,
            ds: g.ds,
            r_grid: Vec::with_capacity(len),
            phi: Vec::with_capacity(len),
            dphi: Vec::with_capacity(len),
            lap: Vec::with_capacity(len),
            dlap: Vec::with_capacity(len),
            s_grid: Vec::with_capacity(len),
            w: Vec::with_capacity(len),
            y: Vec::with_capacity(len),
            z: vec![],
            y_derivs: Vec::with_capacity(len),
            error_estimate: 0.0,
            restarts,
            switch_index: g.switch(),
        };
        for i in 0..len {
            let st = asm.s_states[i].ok_or_else(|| {
                Error::NoConvergence(format!("node {i} was never reached"))
            })?;
            let s = g.s(i);
            let rs = asm.r_states.get(i).copied().flatten().unwrap_or_else(|| {
                ef_to_radial(self.nf, self.m, self.amp, s, &st)
            });
            sol.s_grid.push(s);
            sol.r_grid.push(s.exp());
            sol.phi.push(rs[0]);
            sol.dphi.push(rs[1]);
            sol.lap.push(rs[2]);
            sol.dlap.push(rs[3]);
            sol.w.push(self.amp + st[0]);
            sol.y.push(st[0]);
            sol.y_derivs.push([st[1], st[2], st[3]]);
        }
        sol.z = z_from_y(&sol.y, g.ds, self.lambda4);
        // The final segment is a trajectory that merely survived to r_max, so
        // its unstable component is bounded only by |Y| itself there.
        let y_end = sol.y.last().unwrap().abs();
        sol.error_estimate = 2.0 * f64::EPSILON * self.amp + y_end;
        if let Some(i) = sol.phi.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NoConvergence(format!("solution not positive at r = {}", sol.r_grid[i])));
        }
        let dev = (sol.limit_ratio() - 1.0).abs();
        if !(dev < self.c.target_tol) {
            return Err(Error::NoConvergence(format!(
                "|r^m phi/L - 1| = {dev:e} at r_max exceeds target {:e}",
                self.c.target_tol
            )));
        }
        Ok(sol)
    }

    fn shoot(&self) -> Result<RadialSolution> {
        let g = &self.grid;
        let len = g.last() + 1;
        let mut asm =
            Assembly { s_states: vec![None; len], r_states: vec![None; g.switch().min(g.last()) + 1] };

        let (a, b) = match self.probe()? {
            ProbeResult::Persisted(t, v0) => {
                asm.commit(&t);
                return self.finish(asm, v0, 0);
            }
            ProbeResult::Bracket(a, b) => (a, b),
        };
        let (mut ta, mut tb, v0) = match self.bisect_fates(a, b, 0.0, |v| self.run_radial(v))? {
            Bisected::Persisted(t, v0) => {
                asm.commit(&t);
                return self.finish(asm, v0, 0);
            }
            Bisected::Bracket(ta, tb, (va, vb)) => (ta, tb, 0.5 * (va + vb)),
        };

        let mut restarts = 0;
        let mut last_restart: Option<usize> = None;
        loop {
            let ok = self.agreement(&ta, &tb);
            asm.commit_pair(&ta, &tb, ok);
            if ok >= g.last() {
                return self.finish(asm, v0, restarts);
            }
            if last_restart.is_some_and(|r| ok <= r) {
                return Err(Error::NoConvergence(format!(
                    "no progress past s = {:.3} after {restarts} restarts",
                    g.s(ok)
                )));
            }
            if restarts >= self.c.max_restarts {
                return Err(Error::NoConvergence(format!(
                    "restart limit {} reached at s = {:.3}",
                    self.c.max_restarts,
                    g.s(ok)
                )));
            }
            restarts += 1;
            last_restart = Some(ok);
            let base = asm.s_states[ok].unwrap();
            match self.restart(ok, base)? {
                Bisected::Persisted(t, _) => {
                    asm.commit(&t);
                    return self.finish(asm, v0, restarts);
                }
                Bisected::Bracket(a, b, _) => {
                    ta = a;
                    tb = b;
                }
            }
        }
    }

    fn restart(&self, i0: usize, base: [f64; 4]) -> Result<Bisected> {
        let l4 = self.lambda4;
        let scale = base[0].abs().max(f64::MIN_POSITIVE);
        let dir = [scale, scale * l4, scale * l4 * l4, scale * l4 * l4 * l4];
        let trial = |eps: f64| {
            let st: [f64; 4] = std::array::from_fn(|k| base[k] + eps * dir[k]);
            self.run_from(i0, st)
        };
        let mut w = 1e-7;
        loop {
            let lo = trial(-w)?;
            if lo.outcome == Outcome::Persisted {
                return Ok(Bisected::Persisted(lo, -w));
            }
            let hi = trial(w)?;
            if hi.outcome == Outcome::Persisted {
                return Ok(Bisected::Persisted(hi, w));
            }
            if !lo.outcome.same_kind(&hi.outcome) {
                return self.bisect_fates((-w, lo), (w, hi), 2e-17, trial);
            }
            w *= 10.0;
            if w > 1.0 {
                return Err(Error::NoConvergence(format!(
                    "no fate change along the unstable direction at s = {:.3}",
                    self.grid.s(i0)
                )));
            }
        }
    }
}

enum ProbeResult {
    Persisted(Trajectory, f64),
    Bracket((f64, Trajectory), (f64, Trajectory)),
}

/// Integrates one trajectory with shooting value `v0` up to `controls.r_max`.
pub fn integrate_radial(
    params: &ProblemParams,
    alpha: f64,
    v0: f64,
    controls: &ShootControls,
) -> Result<RadialOutcome> {
    let sh = Shooter::new(params, alpha, controls)?;
    let t = sh.run_radial(v0)?;
    match t.outcome {
        Outcome::BlowUp { r } => Ok(RadialOutcome::BlowUp { r }),
        Outcome::SignLoss { r } => Ok(RadialOutcome::SignLoss { r }),
        Outcome::Persisted => {
            let len = sh.grid.last() + 1;
            let mut asm = Assembly {
                s_states: vec![None; len],
                r_states: vec![None; sh.grid.switch().min(sh.grid.last()) + 1],
            };
            asm.commit(&t);
            let relaxed = ShootControls { target_tol: f64::INFINITY, ..controls.clone() };
            let sh = Shooter { c: &relaxed, ..sh };
            Ok(RadialOutcome::Solution(Box::new(sh.finish(asm, v0, 0)?)))
        }
    }
}

/// Finds the entire solution with `φ(0) = alpha` out to `controls.r_max`.
pub fn shoot(params: &ProblemParams, alpha: f64, controls: &ShootControls) -> Result<RadialSolution> {
    Shooter::new(params, alpha, controls)?.shoot()
}
