//! Explicit Runge–Kutta integration with the Dormand–Prince 8(5,3) pair.
//!
//! Only what the radial shooter needs: fixed-size states, step-size control
//! with the combined 5th/3rd order error estimate, and a per-step callback that
//! can stop the integration.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const STAGES: usize = 12;

const C: [f64; STAGES] = [
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510e+00,
    0.281649658092772603273242802490e+00,
    0.333333333333333333333333333333e+00,
    0.25e+00,
    0.307692307692307692307692307692e+00,
    0.651282051282051282051282051282e+00,
    0.6e+00,
    0.857142857142857142857142857142e+00,
    1.0,
];

const A2: [f64; 1] = [5.26001519587677318785587544488e-2];
const A3: [f64; 2] = [1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2];
const A4: [f64; 3] = [2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2];
const A5: [f64; 4] = [
    2.41365134159266685502369798665e-1,
    0.0,
    -8.84549479328286085344864962717e-1,
    9.24834003261792003115737966543e-1,
];
const A6: [f64; 5] = [
    3.7037037037037037037037037037e-2,
    0.0,
    0.0,
    1.70828608729473871279604482173e-1,
    1.25467687566822425016691814123e-1,
];
const A7: [f64; 6] = [
    3.7109375e-2,
    0.0,
    0.0,
    1.70252211019544039314978060272e-1,
    6.02165389804559606850219397283e-2,
    -1.7578125e-2,
];
const A8: [f64; 7] = [
    3.70920001185047927108779319836e-2,
    0.0,
    0.0,
    1.70383925712239993810214054705e-1,
    1.07262030446373284651809199168e-1,
    -1.53194377486244017527936158236e-2,
    8.27378916381402288758473766002e-3,
];
const A9: [f64; 8] = [
    6.24110958716075717114429577812e-1,
    0.0,
    0.0,
    -3.36089262944694129406857109825e0,
    -8.68219346841726006818189891453e-1,
    2.75920996994467083049415600797e1,
    2.01540675504778934086186788979e1,
    -4.34898841810699588477366255144e1,
];
const A10: [f64; 9] = [
    4.77662536438264365890433908527e-1,
    0.0,
    0.0,
    -2.48811461997166764192642586468e0,
    -5.90290826836842996371446475743e-1,
    2.12300514481811942347288949897e1,
    1.52792336328824235832596922938e1,
    -3.32882109689848629194453265587e1,
    -2.03312017085086261358222928593e-2,
];
const A11: [f64; 10] = [
    -9.3714243008598732571704021658e-1,
    0.0,
    0.0,
    5.18637242884406370830023853209e0,
    1.09143734899672957818500254654e0,
    -8.14978701074692612513997267357e0,
    -1.85200656599969598641566180701e1,
    2.27394870993505042818970056734e1,
    2.49360555267965238987089396762e0,
    -3.0467644718982195003823669022e0,
];
const A12: [f64; 11] = [
    2.27331014751653820792359768449e0,
    0.0,
    0.0,
    -1.05344954667372501984066689879e1,
    -2.00087205822486249909675718444e0,
    -1.79589318631187989172765950534e1,
    2.79488845294199600508499808837e1,
    -2.85899827713502369474065508674e0,
    -8.87285693353062954433549289258e0,
    1.23605671757943030647266201528e1,
    6.43392746015763530355970484046e-1,
];

const B: [f64; STAGES] = [
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566e0,
    1.89151789931450038304281599044e0,
    -5.8012039600105847814672114227e0,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512e+00,
    0.733846688281611857341361741547e+00,
    0.220588235294117647058823529412e-01,
];

const E: [f64; STAGES] = [
    0.1312004499419488073250102996e-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+01,
    -0.4957589496572501915214079952e+00,
    0.1664377182454986536961530415e+01,
    -0.3503288487499736816886487290e+00,
    0.3341791187130174790297318841e+00,
    0.8192320648511571246570742613e-01,
    -0.2235530786388629525884427845e-01,
];

fn a_row(stage: usize) -> &'static [f64] {
    match stage {
        1 => &A2,
        2 => &A3,
        3 => &A4,
        4 => &A5,
        5 => &A6,
        6 => &A7,
        7 => &A8,
        8 => &A9,
        9 => &A10,
        10 => &A11,
        11 => &A12,
        _ => &[],
    }
}

/// Right-hand side `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

/// Mixed error scale `atol + rtol·max(|yᵢ|, |ŷᵢ|, floor·‖y‖∞)`.
///
/// The `floor` term keeps components that pass through zero from forcing
/// absurdly small steps when the state as a whole is tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub floor: f64,
}

impl Tolerance {
    pub fn relative(rtol: f64) -> Self {
        Self { rtol, atol: 0.0, floor: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// What a step callback asks the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control<R> {
    Continue,
    Stop(R),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Advance<const N: usize, R> {
    /// Reached the target; `h` is the step size to try next.
    Reached { y: [f64; N], h: f64 },
    /// A callback stopped the integration after the step ending at `t`.
    Stopped { t: f64, y: [f64; N], reason: R },
}

#[derive(Debug, Clone)]
pub struct Dop853 {
    pub tol: Tolerance,
    pub max_steps: u64,
    pub h_max: f64,
    pub stats: Stats,
}

impl Dop853 {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, max_steps: 5_000_000, h_max: f64::INFINITY, stats: Stats::default() }
    }

    /// One trial step. Returns the candidate state and the normalised error.
    pub fn step<S: OdeSystem<N>, const N: usize>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64; N],
        h: f64,
    ) -> ([f64; N], f64) {
        let mut k = [[0.0; N]; STAGES];
        sys.rhs(t, y, &mut k[0]);
        for s in 1..STAGES {
            let row = a_row(s);
            let mut ys = *y;
            for (j, a) in row.iter().enumerate() {
                if *a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * k[j][i];
                    }
                }
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            sys.rhs(t + C[s] * h, &ys, &mut tail[0]);
        }
        self.stats.evaluations += STAGES as u64;

        let mut incr = [0.0; N];
        let mut err5 = [0.0; N];
        for s in 0..STAGES {
            for i in 0..N {
                incr[i] += B[s] * k[s][i];
                err5[i] += E[s] * k[s][i];
            }
        }
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] = y[i] + h * incr[i];
        }
        if y_new.iter().any(|v| !v.is_finite()) {
            return (y_new, f64::INFINITY);
        }

        let norm = y.iter().chain(y_new.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
        let (mut e5, mut e3) = (0.0, 0.0);
        for i in 0..N {
            let sc = self.tol.atol
                + self.tol.rtol * y[i].abs().max(y_new[i].abs()).max(self.tol.floor * norm);
            if sc == 0.0 {
                continue;
            }
            let err3 = incr[i] - BHH[0] * k[0][i] - BHH[1] * k[8][i] - BHH[2] * k[11][i];
            e5 += (err5[i] / sc).powi(2);
            e3 += (err3 / sc).powi(2);
        }
        let mut deno = e5 + 0.01 * e3;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * e5 * (1.0 / (N as f64 * deno)).sqrt();
        (y_new, if err.is_finite() { err } else { f64::INFINITY })
    }

    /// Integrates from `t0` to `t1`, calling `on_step` after every accepted step.
    pub fn advance<S, F, R, const N: usize>(
        &mut self,
        sys: &S,
        t0: f64,
        y0: &[f64; N],
        t1: f64,
        h: f64,
        mut on_step: F,
    ) -> Result<Advance<N, R>>
    where
        S: OdeSystem<N>,
        F: FnMut(f64, &[f64; N]) -> Control<R>,
    {
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut y = *y0;
        let mut h = dir * h.abs().min(self.h_max).max(1e-12 * (t1 - t0).abs());
        if t1 == t0 {
            return Ok(Advance::Reached { y, h });
        }
        let mut steps = 0u64;
        loop {
            let remaining = t1 - t;
            let last = (h * 1.01 - remaining) * dir >= 0.0;
            let h_try = if last { remaining } else { h };
            if h_try.abs() <= 1e-15 * t.abs().max(1.0) {
                return Err(Error::StepFailure { t, reason: "step size underflow".into() });
            }
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::StepFailure { t, reason: "too many steps".into() });
            }
            let (y_new, err) = self.step(sys, t, &y, h_try);
            if err <= 1.0 {
                self.stats.accepted += 1;
                let fac = (err.powf(1.0 / 8.0) / 0.9).clamp(1.0 / 6.0, 3.0);
                let h_next = dir * (h_try.abs() / fac).min(self.h_max);
                t = if last { t1 } else { t + h_try };
                y = y_new;
                if let Control::Stop(reason) = on_step(t, &y) {
                    return Ok(Advance::Stopped { t, y, reason });
                }
                if last {
                    // keep the pre-truncation step size for the next interval
                    let h_keep = if h_next.abs() > h.abs() { h_next } else { h };
                    return Ok(Advance::Reached { y, h: h_keep });
                }
                h = h_next;
            } else {
                self.stats.rejected += 1;
                let fac = if err.is_finite() { (err.powf(1.0 / 8.0) / 0.9).min(3.0) } else { 10.0 };
                h = h_try / fac.max(1.5);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem<2> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay(f64);
    impl OdeSystem<1> for Decay {
        fn rhs(&self, _t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = self.0 * y[0];
        }
    }

    #[test]
    fn harmonic_oscillator_to_tight_tolerance() {
        let mut solver = Dop853::new(Tolerance { rtol: 1e-13, atol: 1e-15, floor: 0.0 });
        let out = solver
            .advance(&Oscillator, 0.0, &[1.0, 0.0], 20.0, 0.1, |_, _| Control::<()>::Continue)
            .unwrap();
        match out {
            Advance::Reached { y, .. } => {
                assert!((y[0] - 20f64.cos()).abs() < 1e-11);
                assert!((y[1] + 20f64.sin()).abs() < 1e-11);
            }
            Advance::Stopped { .. } => panic!("unexpected stop"),
        }
    }

    #[test]
    fn pure_relative_tolerance_tracks_tiny_decaying_solution() {
        let mut solver = Dop853::new(Tolerance::relative(1e-13));
        let out = solver
            .advance(&Decay(-9.0), 0.0, &[1e-200], 10.0, 0.1, |_, _| Control::<()>::Continue)
            .unwrap();
        let Advance::Reached { y, .. } = out else { panic!() };
        let exact = 1e-200 * (-90.0f64).exp();
        assert!(((y[0] - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn callback_stops_integration() {
        let mut solver = Dop853::new(Tolerance::relative(1e-10));
        let out = solver
            .advance(&Decay(1.0), 0.0, &[1.0], 10.0, 0.1, |_, y| {
                if y[0] > 100.0 {
                    Control::Stop("big")
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        match out {
            Advance::Stopped { t, y, reason } => {
                assert_eq!(reason, "big");
                assert!(y[0] > 100.0 && t < 10.0);
            }
            _ => panic!("expected stop"),
        }
    }
}
