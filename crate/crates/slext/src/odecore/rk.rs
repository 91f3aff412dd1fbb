//! Dormand-Prince 5(4) with FSAL and the standard quartic dense output.
//!
//! The initial vector is rescaled to unit sup norm before integration so the
//! mixed absolute/relative error weights stay meaningful for solutions that
//! start at magnitudes far from 1 (singular endpoint germs routinely start
//! near 1e-8 or 1e+2). The dense coefficients are scaled back afterwards.

use crate::error::{Error, Result};

pub struct OdeOpts {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Interior abscissae a step must land on instead of crossing.
    pub breakpoints: Vec<f64>,
    /// Rescale the initial vector to unit sup norm. Must be switched off for
    /// inhomogeneous systems, where scaling the state does not commute with
    /// the forcing; those may also start from the zero vector.
    pub normalize: bool,
}

impl Default for OdeOpts {
    fn default() -> Self {
        OdeOpts {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 200_000,
            breakpoints: Vec::new(),
            normalize: true,
        }
    }
}

struct Segment<const N: usize> {
    x0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, x: f64) -> [f64; N] {
        let th = (x - self.x0) / self.h;
        let th1 = 1.0 - th;
        let [c1, c2, c3, c4, c5] = &self.cont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
        }
        out
    }
}

pub struct DenseOutput<const N: usize> {
    segs: Vec<Segment<N>>,
    /// Ascending left edges of the segments, for binary search.
    edges: Vec<f64>,
    lo: f64,
    hi: f64,
    end: [f64; N],
}

impl<const N: usize> DenseOutput<N> {
    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn end_state(&self) -> [f64; N] {
        self.end
    }

    pub fn eval(&self, x: f64) -> Result<[f64; N]> {
        let slack = 1e-12 * (self.hi - self.lo).max(1.0);
        if x < self.lo - slack || x > self.hi + slack {
            return Err(Error::OutOfRange { x, lo: self.lo, hi: self.hi });
        }
        let x = x.clamp(self.lo, self.hi);
        let i = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
        Ok(self.segs[i].eval(x))
    }
}

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
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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

#[inline]
fn axpyn<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
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

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction) and return
/// a dense interpolant over the whole span.
pub fn integrate<const N: usize>(
    f: &(impl Fn(f64, &[f64; N]) -> [f64; N] + ?Sized),
    x0: f64,
    x1: f64,
    y0: [f64; N],
    opts: &OdeOpts,
) -> Result<DenseOutput<N>> {
    if !(x0.is_finite() && x1.is_finite()) || x0 == x1 {
        return Err(Error::BadInterval { a: x0, b: x1 });
    }
    let scale = if opts.normalize {
        let s = y0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if s == 0.0 || !s.is_finite() {
            return Err(Error::DenominatorZero("zero or non-finite initial data for integration"));
        }
        s
    } else {
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::DenominatorZero("non-finite initial data for integration"));
        }
        1.0
    };
    let mut y = y0;
    for v in &mut y {
        *v /= scale;
    }

    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut bps: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|&b| (b - x0) * dir > 1e-14 * span && (x1 - b) * dir > 1e-14 * span)
        .collect();
    bps.sort_by(|p, q| (dir * p).partial_cmp(&(dir * q)).unwrap());
    let mut next_bp = 0usize;

    let mut x = x0;
    let mut k1 = f(x, &y);
    let mut h = dir * initial_step(f, x, &y, &k1, opts, span);
    let mut segs: Vec<Segment<N>> = Vec::new();
    let mut facmax = 10.0;

    for _step in 0..opts.max_steps {
        if (x - x1) * dir >= 0.0 {
            break;
        }
        // land exactly on the next breakpoint / the far end
        let target = if next_bp < bps.len() { bps[next_bp] } else { x1 };
        if (x + h - target) * dir > 0.0 {
            h = target - x;
        }
        if h.abs() < f64::EPSILON * x.abs().max(span) {
            return Err(Error::StepUnderflow { x, h });
        }

        let k2 = f(x + C2 * h, &axpyn(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpyn(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpyn(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpyn(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + h,
            &axpyn(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let ynew = axpyn(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x + h, &ynew);

        let mut err = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sk) * (e / sk);
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            // accept: record dense coefficients for this step
            let mut ydiff = [0.0; N];
            let mut bspl = [0.0; N];
            let mut c5 = [0.0; N];
            for i in 0..N {
                ydiff[i] = ynew[i] - y[i];
                bspl[i] = h * k1[i] - ydiff[i];
                c5[i] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let mut c4v = [0.0; N];
            for i in 0..N {
                c4v[i] = ydiff[i] - h * k7[i] - bspl[i];
            }
            segs.push(Segment { x0: x, h, cont: [y, ydiff, bspl, c4v, c5] });

            x += h;
            y = ynew;
            k1 = k7;
            if next_bp < bps.len() && (x - bps[next_bp]) * dir >= 0.0 {
                next_bp += 1;
            }
            let fac = (0.9 * (1.0 / err).powf(0.2)).clamp(0.2, facmax);
            h *= fac;
            facmax = 10.0;
        } else {
            let fac = (0.9 * (1.0 / err).powf(0.2)).clamp(0.2, 1.0);
            h *= fac;
            facmax = 1.0;
        }
        if h.abs() > span {
            h = dir * span;
        }
    }
    if (x - x1) * dir < 0.0 {
        return Err(Error::TooManySteps(opts.max_steps));
    }

    // scale back and orient ascending
    for s in &mut segs {
        for c in &mut s.cont {
            for v in c.iter_mut() {
                *v *= scale;
            }
        }
    }
    for v in &mut y {
        *v *= scale;
    }
    if dir < 0.0 {
        segs.reverse();
    }
    let edges: Vec<f64> = segs.iter().map(|s| s.x0.min(s.x0 + s.h)).collect();
    Ok(DenseOutput {
        segs,
        edges,
        lo: x0.min(x1),
        hi: x0.max(x1),
        end: y,
    })
}

/// Hairer's automatic initial step selection, order 5.
fn initial_step<const N: usize>(
    f: &(impl Fn(f64, &[f64; N]) -> [f64; N] + ?Sized),
    x: f64,
    y: &[f64; N],
    f0: &[f64; N],
    opts: &OdeOpts,
    span: f64,
) -> f64 {
    let sk = |yi: f64| opts.atol + opts.rtol * yi.abs();
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        d0 += (y[i] / sk(y[i])).powi(2);
        d1 += (f0[i] / sk(y[i])).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * (d0 / d1) };
    let h0 = h0.min(span);

    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(x + h0, &y1);
    let mut d2 = 0.0;
    for i in 0..N {
        d2 += ((f1[i] - f0[i]) / sk(y[i])).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;

    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / dm).powf(0.2) };
    h1.min(100.0 * h0).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dense_output_is_locally_quintic() {
        // exp decays; interpolation between step points must be ~1e-11
        let f = |_x: f64, y: &[f64; 1]| [-y[0]];
        let d = integrate(&f, 0.0, 2.0, [1.0], &OdeOpts::default()).unwrap();
        for k in 0..=40 {
            let x = 2.0 * k as f64 / 40.0;
            assert_relative_eq!(d.eval(x).unwrap()[0], (-x).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_zero_initial_vector() {
        let f = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        assert!(integrate(&f, 0.0, 1.0, [0.0, 0.0], &OdeOpts::default()).is_err());
    }

    #[test]
    fn out_of_range_eval_errors() {
        let f = |_x: f64, y: &[f64; 1]| [y[0]];
        let d = integrate(&f, 0.0, 1.0, [1.0], &OdeOpts::default()).unwrap();
        assert!(d.eval(1.5).is_err());
        assert!(d.eval(-0.1).is_err());
    }

    #[test]
    fn tiny_initial_scale_keeps_relative_accuracy() {
        // y0 ~ 1e-9: internal normalization must keep relative error tight
        let f = |_x: f64, y: &[f64; 1]| [y[0]];
        let d = integrate(&f, 0.0, 1.0, [1e-9], &OdeOpts::default()).unwrap();
        assert_relative_eq!(d.end_state()[0], 1e-9 * 1.0f64.exp(), max_relative = 1e-10);
    }
}
