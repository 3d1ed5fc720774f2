//! Bessel functions of the first kind, orders 0 and 1.

use crate::scalar::Real;

/// `(J0(x), J1(x))`: ascending series for small arguments, Miller's backward
/// recurrence normalized by `J0 + 2 sum J_2k = 1` otherwise.
pub fn bessel_j01<T: Real>(x: T) -> (T, T) {
    let ax = x.abs();
    let (j0, j1) = if ax < T::one() {
        series(ax)
    } else {
        miller(ax)
    };
    // J1 is odd
    if x < T::zero() {
        (j0, -j1)
    } else {
        (j0, j1)
    }
}

pub fn bessel_j0<T: Real>(x: T) -> T {
    bessel_j01(x).0
}

pub fn bessel_j1<T: Real>(x: T) -> T {
    bessel_j01(x).1
}

fn series<T: Real>(x: T) -> (T, T) {
    let y = x * x * T::lit(0.25);
    let mut t0 = T::one();
    let mut t1 = x * T::lit(0.5);
    let (mut j0, mut j1) = (t0, t1);
    for k in 1..40 {
        let kf = T::from_usize_lossy(k);
        t0 = -t0 * y / (kf * kf);
        t1 = -t1 * y / (kf * (kf + T::one()));
        j0 += t0;
        j1 += t1;
        if t0.abs() < T::epsilon() * T::lit(1e-3) && t1.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    (j0, j1)
}

fn miller<T: Real>(x: T) -> (T, T) {
    let xf = x.as_f64();
    let mut start = (xf + 30.0 + 8.0 * xf.sqrt()) as usize;
    start += start % 2;
    let two = T::lit(2.0);
    let big = T::lit(1e100);
    let (mut jp1, mut j) = (T::zero(), T::lit(1e-30));
    let mut norm = T::zero();
    let mut j1 = T::zero();
    for n in (1..=start).rev() {
        let jm1 = two * T::from_usize_lossy(n) / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{n-1}
        if n - 1 == 1 {
            j1 = j;
        }
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += two * j;
        }
        if j.abs() > big {
            j = j / big;
            jp1 = jp1 / big;
            norm = norm / big;
            j1 = j1 / big;
        }
    }
    norm += j;
    (j / norm, j1 / norm)
}
