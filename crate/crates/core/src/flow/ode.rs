//! Dormand–Prince 5(4) for autonomous planar systems with dense output.
//! Stage times are not needed since the right-hand side has no `t`.

use std::ops::ControlFlow;

pub type Vec2 = [f64; 2];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// y5 - y4
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense output
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step magnitude before giving up.
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_min: 1e-12,
            h_max: 1.0,
            max_steps: 5_000_000,
        }
    }
}

/// One accepted step with its interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep {
    pub t0: f64,
    /// Signed step size.
    pub h: f64,
    rcont: [Vec2; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn y0(&self) -> Vec2 {
        self.rcont[0]
    }

    pub fn y1(&self) -> Vec2 {
        [self.rcont[0][0] + self.rcont[1][0], self.rcont[0][1] + self.rcont[1][1]]
    }

    /// Interpolated state at `t` inside the step.
    pub fn eval(&self, t: f64) -> Vec2 {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        let mut y = [0.0; 2];
        for i in 0..2 {
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Underflow {
    pub t: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Finish {
    /// Reached `t_end`.
    End,
    /// The step callback asked to stop.
    Stopped,
    /// Ran out of steps at the given time.
    MaxSteps(f64),
}

fn axpy(y: Vec2, h: f64, terms: &[(f64, &Vec2)]) -> Vec2 {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn err_norm(err: Vec2, y0: Vec2, y1: Vec2, o: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn initial_step<F: FnMut(Vec2) -> Vec2>(f: &mut F, y0: Vec2, f0: Vec2, dir: f64, o: &OdeOptions) -> f64 {
    let sc = |i: usize, y: Vec2| o.atol + o.rtol * y[i].abs();
    let norm = |v: Vec2, y: Vec2| ((v[0] / sc(0, y)).powi(2) + (v[1] / sc(1, y)).powi(2)).sqrt() / 2f64.sqrt();
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(o.h_max);
    let y1 = axpy(y0, dir * h0, &[(1.0, &f0)]);
    let f1 = f(y1);
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]], y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1).min(o.h_max);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6
    }
}

/// Integrates `y' = f(y)` from `t0` to `t_end` (either direction), handing
/// every accepted step to `on_step`.
pub fn dopri5<F, O>(mut f: F, t0: f64, y0: Vec2, t_end: f64, opts: &OdeOptions, mut on_step: O) -> Result<Finish, Underflow>
where
    F: FnMut(Vec2) -> Vec2,
    O: FnMut(&DenseStep) -> ControlFlow<()>,
{
    if t_end == t0 {
        return Ok(Finish::End);
    }
    let dir = (t_end - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(y);
    let mut h = initial_step(&mut f, y, k1, dir, opts).min((t_end - t0).abs());
    let mut steps = 0usize;
    let mut rejected_last = false;

    loop {
        if steps >= opts.max_steps {
            return Ok(Finish::MaxSteps(t));
        }
        let remaining = (t_end - t).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-13) {
            h = remaining;
            last = true;
        }
        if h < opts.h_min && !last {
            return Err(Underflow { t, h: h * dir });
        }
        let hs = h * dir;

        let k2 = f(axpy(y, hs, &[(A21, &k1)]));
        let k3 = f(axpy(y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(axpy(y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(axpy(y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(axpy(y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(y1);
        let mut e = [0.0; 2];
        for i in 0..2 {
            e[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = err_norm(e, y, y1, opts);
        steps += 1;

        if !err.is_finite() {
            h *= 0.2;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            let mut rcont = [[0.0; 2]; 5];
            for i in 0..2 {
                let dy = y1[i] - y[i];
                let bspl = hs * k1[i] - dy;
                rcont[0][i] = y[i];
                rcont[1][i] = dy;
                rcont[2][i] = bspl;
                rcont[3][i] = dy - hs * k7[i] - bspl;
                rcont[4][i] = hs
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h: hs, rcont };
            t = if last { t_end } else { t + hs };
            y = y1;
            k1 = k7;
            if on_step(&step).is_break() {
                return Ok(Finish::Stopped);
            }
            if last {
                return Ok(Finish::End);
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(opts.h_max);
            rejected_last = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            rejected_last = true;
        }
    }
}

/// All accepted steps of one integration, usable as a continuous solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseSolution {
    pub steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn t_start(&self) -> Option<f64> {
        self.steps.first().map(|s| s.t0)
    }

    pub fn t_end(&self) -> Option<f64> {
        self.steps.last().map(|s| s.t1())
    }

    fn locate(&self, t: f64) -> Option<&DenseStep> {
        let first = self.steps.first()?;
        let forward = first.h > 0.0;
        let idx = self.steps.partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        self.steps.get(idx).filter(|s| s.contains(t))
    }

    pub fn eval(&self, t: f64) -> Option<Vec2> {
        self.locate(t).map(|s| s.eval(t))
    }
}
