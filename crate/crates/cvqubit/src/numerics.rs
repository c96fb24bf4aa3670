//! Self-contained numerical substrate: modified Bessel functions I0/I1,
//! a small dense Hermitian eigensolver, the PSD matrix square root, and
//! monotone bisection.
//!
//! The eigensolver works on the 8x8 real-symmetric embedding of a 4x4
//! Hermitian matrix and uses cyclic Jacobi rotations, which converge
//! unconditionally; no general non-symmetric solver exists anywhere in
//! the crate.

use crate::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Tolerance below which a matrix is accepted as Hermitian on input.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// 2x2 complex matrix (row major).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Mat2([[o, z], [z, o]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += self.0[i][k] * rhs.0[k][j];
                }
            }
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = self.0[j][i].conj();
            }
        }
        Mat2(out)
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Max elementwise deviation of U†U from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut dev: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((p.0[i][j] - C64::new(expect, 0.0)).norm());
            }
        }
        dev
    }
}

/// 4x4 complex matrix (row major).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[C64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    pub fn mul(&self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    /// Elementwise complex conjugate (no transpose).
    pub fn conj(&self) -> Mat4 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, rhs: &Mat4) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        dev
    }
}

/// Modified Bessel function of the first kind, order 0 or 1, by the
/// ascending power series with term-ratio stopping.
///
/// Valid for 0 <= y <= 60, which covers pair-coherent states up to a mean
/// photon number around 50; the series is stable in double precision over
/// that range, so no asymptotic branch is needed.
pub fn bessel_i(order: u32, y: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::Domain(format!(
            "bessel_i supports orders 0 and 1, got {order}"
        )));
    }
    if !y.is_finite() || !(0.0..=60.0).contains(&y) {
        return Err(Error::Domain(format!(
            "bessel_i argument must lie in [0, 60], got {y}"
        )));
    }
    let q = y * y / 4.0;
    let mut term = if order == 0 { 1.0 } else { y / 2.0 };
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        // I0: t_{m} = t_{m-1} * q / m^2 ; I1: t_m = t_{m-1} * q / (m (m+1))
        let denom = if order == 0 {
            (m as f64) * (m as f64)
        } else {
            (m as f64) * ((m + 1) as f64)
        };
        term *= q / denom;
        sum += term;
        if term < sum * 1e-17 || m > 500 {
            break;
        }
    }
    Ok(sum)
}

type Sym8 = [[f64; 8]; 8];

/// Cyclic Jacobi eigendecomposition of a real symmetric 8x8 matrix.
/// Returns (eigenvalues, eigenvector columns) with a = V diag(d) V^T.
fn jacobi_eigh8(mut a: Sym8) -> ([f64; 8], Sym8) {
    const N: usize = 8;
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut d = [0.0; N];
    let mut b = [0.0; N];
    let mut z;
    for i in 0..N {
        d[i] = a[i][i];
        b[i] = a[i][i];
    }

    for sweep in 1..=50 {
        z = [0.0; N];
        let mut sm = 0.0;
        for p in 0..N - 1 {
            for q in p + 1..N {
                sm += a[p][q].abs();
            }
        }
        if sm == 0.0 {
            return (d, v);
        }
        let thresh = if sweep < 4 {
            0.2 * sm / ((N * N) as f64)
        } else {
            0.0
        };
        for p in 0..N - 1 {
            for q in p + 1..N {
                let g = 100.0 * a[p][q].abs();
                if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p][q] = 0.0;
                } else if a[p][q].abs() > thresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[p][q] / h
                    } else {
                        let theta = 0.5 * h / a[p][q];
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[p][q];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p][q] = 0.0;
                    for j in 0..p {
                        let g = a[j][p];
                        let h = a[j][q];
                        a[j][p] = g - s * (h + g * tau);
                        a[j][q] = h + s * (g - h * tau);
                    }
                    for j in p + 1..q {
                        let g = a[p][j];
                        let h = a[j][q];
                        a[p][j] = g - s * (h + g * tau);
                        a[j][q] = h + s * (g - h * tau);
                    }
                    for j in q + 1..N {
                        let g = a[p][j];
                        let h = a[q][j];
                        a[p][j] = g - s * (h + g * tau);
                        a[q][j] = h + s * (g - h * tau);
                    }
                    for row in v.iter_mut() {
                        let g = row[p];
                        let h = row[q];
                        row[p] = g - s * (h + g * tau);
                        row[q] = h + s * (g - h * tau);
                    }
                }
            }
        }
        for i in 0..N {
            b[i] += z[i];
            d[i] = b[i];
        }
    }
    (d, v)
}

/// Real-symmetric embedding [[A, -B], [B, A]] of the Hermitian H = A + iB.
/// Symmetrizes the input so roundoff asymmetry cannot leak in.
fn embed_hermitian(m: &Mat4) -> Sym8 {
    let mut e = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let re = 0.5 * (m.0[i][j].re + m.0[j][i].re);
            let im = 0.5 * (m.0[i][j].im - m.0[j][i].im);
            e[i][j] = re;
            e[i + 4][j + 4] = re;
            e[i][j + 4] = -im;
            e[i + 4][j] = im;
        }
    }
    e
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending.
///
/// Each eigenvalue of H appears exactly twice in the spectrum of the 8x8
/// embedding, so the sorted list collapses back by taking every other entry.
pub fn eigvals_hermitian4(m: &Mat4) -> Result<[f64; 4]> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::Contract(format!(
            "eigvals_hermitian4 input deviates from Hermitian by {dev:e}"
        )));
    }
    let (mut d, _) = jacobi_eigh8(embed_hermitian(m));
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok([d[0], d[2], d[4], d[6]])
}

/// Hermitian PSD square root S of M, with S Hermitian PSD and S*S = M.
///
/// Eigenvalues in [-1e-8, 0) are clamped to zero so truncation noise cannot
/// poison downstream concurrence values; anything below -1e-8 is rejected.
pub fn sqrt_psd4(m: &Mat4) -> Result<Mat4> {
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::Contract(format!(
            "sqrt_psd4 input deviates from Hermitian by {dev:e}"
        )));
    }
    let (d, v) = jacobi_eigh8(embed_hermitian(m));
    let lam_max = d.iter().fold(0.0f64, |a, &b| a.max(b));
    // Rank-deficiency noise must go to exactly zero: sqrt amplifies a 1e-16
    // eigenvalue to 1e-8, which would leak into concurrence values.
    let floor = 1e-13 * lam_max;
    let mut s = [0.0; 8];
    for i in 0..8 {
        if d[i] < -1e-8 {
            return Err(Error::NotPsd { min_eig: d[i] });
        }
        s[i] = if d[i] <= floor { 0.0 } else { d[i].sqrt() };
    }
    // S8 = V sqrt(D) V^T, then pull the complex 4x4 back out of the embedding.
    let mut s8 = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for k in 0..8 {
                acc += v[i][k] * s[k] * v[j][k];
            }
            s8[i][j] = acc;
        }
    }
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let re = 0.5 * (s8[i][j] + s8[i + 4][j + 4]);
            let im = 0.5 * (s8[i + 4][j] - s8[i][j + 4]);
            out.0[i][j] = C64::new(re, im);
        }
    }
    Ok(out)
}

/// Bisection for f(x) = target on [lo, hi], f nondecreasing.
///
/// Stops when |f(x) - target| <= tol or the interval width drops below tol.
pub fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::Domain(format!(
            "bisect_increasing needs finite lo <= hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo > target || f_hi < target {
        return Err(Error::Bracket {
            target,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm - target).abs() <= tol || hi - lo <= tol {
            return Ok(mid);
        }
        if fm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
