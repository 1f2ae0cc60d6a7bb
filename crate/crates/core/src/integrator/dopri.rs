//! Dormand–Prince 5(4) stepper with Hairer's continuous extension.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Why a step could not be taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepFailure {
    Underflow { t: f64, h: f64 },
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

/// An accepted step with its dense-output polynomial.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t0 + θ h`, `θ ∈ [0, 1]`.
    pub fn at_fraction(&self, theta: f64) -> [f64; N] {
        let th1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rcont;
            *o = r[0][i]
                + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])));
        }
        out
    }

    pub fn at(&self, t: f64) -> [f64; N] {
        self.at_fraction((t - self.t0) / self.h)
    }
}

/// Adaptive stepper state. The right-hand side is supplied on each call so
/// the stepper owns no closure.
#[derive(Debug, Clone)]
pub struct Dopri5<const N: usize> {
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    tol: Tolerances,
    rejected_last: bool,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<const N: usize> Dopri5<N> {
    pub fn new<F>(f: &F, t0: f64, y0: [f64; N], tol: Tolerances) -> Self
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let k1 = f(t0, &y0);
        let mut s = Self {
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            tol,
            rejected_last: false,
            accepted: 0,
            rejected: 0,
            evaluations: 1,
        };
        s.h = s.initial_step(f);
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs().max(b.abs())
    }

    fn rms(&self, v: &[f64; N], reference: &[f64; N]) -> f64 {
        let s: f64 = (0..N)
            .map(|i| {
                let sk = self.scale(reference[i], reference[i]);
                (v[i] / sk).powi(2)
            })
            .sum();
        (s / N as f64).sqrt()
    }

    fn initial_step<F>(&mut self, f: &F) -> f64
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let d0 = self.rms(&self.y, &self.y);
        let d1 = self.rms(&self.k1, &self.y);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(self.tol.max_step);
        let y1 = axpy(&self.y, h0, &[(1.0, &self.k1)]);
        let f1 = f(self.t + h0, &y1);
        self.evaluations += 1;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = f1[i] - self.k1[i];
        }
        let d2 = self.rms(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.tol.max_step)
    }

    /// Takes one accepted step, never stepping past `t_limit`.
    pub fn step<F>(&mut self, f: &F, t_limit: f64) -> Result<DenseStep<N>, StepFailure>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        loop {
            let remaining = t_limit - self.t;
            let mut h = self.h.min(self.tol.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(StepFailure::Underflow { t: self.t, h });
            }

            let (t, y, k1) = (self.t, self.y, self.k1);
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y1 = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y1);
            self.evaluations += 6;

            if y1.iter().chain(k7.iter()).any(|v| !v.is_finite()) {
                // shrink and retry; a genuinely singular field underflows
                self.h = h * FAC_MIN;
                self.rejected += 1;
                self.rejected_last = true;
                if self.h <= 1e-14 * t.abs().max(1.0) {
                    return Err(StepFailure::NonFinite { t });
                }
                continue;
            }

            let mut err_acc = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sk = self.scale(y[i], y1[i]);
                err_acc += (e / sk).powi(2);
            }
            let err = (err_acc / N as f64).sqrt();

            if err <= 1.0 {
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    rcont[0][i] = y[i];
                    rcont[1][i] = dy;
                    rcont[2][i] = bspl;
                    rcont[3][i] = dy - h * k7[i] - bspl;
                    rcont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                };
                let fac = if self.rejected_last { fac.min(1.0) } else { fac };
                self.rejected_last = false;
                // keep the pre-clipping step size when we only shortened to hit t_limit
                let base = if last { self.h.max(h) } else { h };
                self.h = base * fac;
                self.t = if last { t_limit } else { t + h };
                self.y = y1;
                self.k1 = k7;
                self.accepted += 1;
                return Ok(DenseStep {
                    t0: t,
                    h,
                    y0: y,
                    y1,
                    rcont,
                });
            }

            self.rejected += 1;
            self.rejected_last = true;
            self.h = h * (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    fn run(tol: f64, t_end: f64) -> ([f64; 2], usize) {
        let tols = Tolerances { rel: tol, abs: tol, max_step: 1.0 };
        let mut s = Dopri5::new(&harmonic, 0.0, [1.0, 0.0], tols);
        while s.t() < t_end {
            s.step(&harmonic, t_end).unwrap();
        }
        (s.y(), s.accepted)
    }

    #[test]
    fn harmonic_period_returns_to_start() {
        let (y, _) = run(1e-10, 2.0 * std::f64::consts::PI);
        assert!((y[0] - 1.0).abs() < 1e-8);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn dense_output_is_accurate_inside_steps() {
        let tols = Tolerances { rel: 1e-9, abs: 1e-12, max_step: 0.5 };
        let mut s = Dopri5::new(&harmonic, 0.0, [1.0, 0.0], tols);
        let mut worst: f64 = 0.0;
        while s.t() < 10.0 {
            let st = s.step(&harmonic, 10.0).unwrap();
            for j in 1..8 {
                let th = j as f64 / 8.0;
                let t = st.t0 + th * st.h;
                let y = st.at_fraction(th);
                worst = worst.max((y[0] - t.cos()).abs()).max((y[1] + t.sin()).abs());
            }
        }
        assert!(worst < 1e-7, "dense error {worst}");
    }

    #[test]
    fn exponential_decay() {
        let f = |_t: f64, y: &[f64; 1]| [-2.0 * y[0]];
        let tols = Tolerances { rel: 1e-10, abs: 1e-14, max_step: 1.0 };
        let mut s = Dopri5::new(&f, 0.0, [1.0], tols);
        while s.t() < 3.0 {
            s.step(&f, 3.0).unwrap();
        }
        assert!((s.y()[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y², y(0) = 1 blows up at t = 1
        let f = |_t: f64, y: &[f64; 1]| [y[0] * y[0]];
        let tols = Tolerances { rel: 1e-8, abs: 1e-10, max_step: 0.1 };
        let mut s = Dopri5::new(&f, 0.0, [1.0], tols);
        let mut failure = None;
        for _ in 0..100_000 {
            match s.step(&f, 2.0) {
                Ok(_) => {}
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        assert!(failure.is_some());
        assert!(s.t() < 1.0 + 1e-6);
    }
}
