//! Double-double arithmetic used by the transforms.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 106 bits of mantissa. Only the handful of operations the FFT needs
//! are provided. Products use Dekker splitting, so no FMA is required.

use core::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const TAU: Dd = Dd {
        hi: core::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };

    #[inline(always)]
    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// `a + b` for an arbitrary pair of doubles.
    #[inline(always)]
    pub fn from_pair(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Nearest double and what it leaves out.
    #[inline(always)]
    pub fn split_f64(self) -> (f64, f64) {
        let (r, e) = two_sum(self.hi, self.lo);
        (r, e)
    }

    #[inline(always)]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (s, e) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: s, lo: e }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self - Dd::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - Dd::from_f64(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline(always)]
    fn add(self, b: Dd) -> Dd {
        // Sloppy addition: the error is bounded by 2^-104·(|a| + |b|), which is
        // all a transform needs.
        let (s, e) = two_sum(self.hi, b.hi);
        let (s, e) = quick_two_sum(s, e + (self.lo + b.lo));
        Dd { hi: s, lo: e }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline(always)]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline(always)]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline(always)]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (s, e) = quick_two_sum(p, e);
        Dd { hi: s, lo: e }
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    #[inline(always)]
    pub const fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    #[inline(always)]
    pub fn conj(self) -> CDd {
        CDd {
            re: self.re,
            im: -self.im,
        }
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline(always)]
    fn add(self, b: CDd) -> CDd {
        CDd::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for CDd {
    type Output = CDd;
    #[inline(always)]
    fn sub(self, b: CDd) -> CDd {
        CDd::new(self.re - b.re, self.im - b.im)
    }
}

impl Mul for CDd {
    type Output = CDd;
    #[inline(always)]
    fn mul(self, b: CDd) -> CDd {
        CDd::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

/// `(cos 2πq, sin 2πq)` for a dyadic fraction `q` in `[0, 1)`, to double-double
/// accuracy.
pub(crate) fn cis_turns(q: f64) -> (Dd, Dd) {
    debug_assert!((0.0..1.0).contains(&q));
    // Octant reduction is exact for dyadic q.
    let oct = libm::floor(q * 8.0);
    let r = q - oct / 8.0;
    let oct = oct as u32;
    // Inside each odd octant work from the upper edge so the Taylor argument
    // stays in [0, π/4].
    let (r, mirrored) = if oct % 2 == 1 {
        (0.125 - r, true)
    } else {
        (r, false)
    };
    let x = Dd::TAU.mul_f64(r);
    let (c, s) = taylor_cos_sin(x);
    // Angle within the quadrant is either x or π/2 - x.
    let (c, s) = if mirrored { (s, c) } else { (c, s) };
    match oct / 2 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

fn taylor_cos_sin(x: Dd) -> (Dd, Dd) {
    let x2 = x * x;
    let eps = 1e-34;
    let mut sin = x;
    let mut term = x;
    let mut k = 1.0;
    loop {
        term = -(term * x2).div_f64((2.0 * k) * (2.0 * k + 1.0));
        sin = sin + term;
        k += 1.0;
        if term.abs().hi < eps {
            break;
        }
    }
    let mut cos = Dd::ONE;
    let mut term = Dd::ONE;
    let mut k = 1.0;
    loop {
        term = -(term * x2).div_f64((2.0 * k - 1.0) * (2.0 * k));
        cos = cos + term;
        k += 1.0;
        if term.abs().hi < eps {
            break;
        }
    }
    (cos, sin)
}
