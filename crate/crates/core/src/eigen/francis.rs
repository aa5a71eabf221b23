//! Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
//!
//! Follows the structure of LAPACK's `dlahqr` with `wantt = wantz = false`:
//! only the active window is updated, deflation uses the Ahues–Tisseur
//! criterion, and every final 2×2 block is standardized by [`standardize_2x2`].

use alloc::vec::Vec;


use super::hessenberg::householder;
use crate::{Error, Result};

const ULP: f64 = f64::EPSILON;
const SAFE_MIN: f64 = f64::MIN_POSITIVE;
const EXCEPTIONAL_PERIOD: usize = 10;
const EXCEPTIONAL_DAT1: f64 = 0.75;
const EXCEPTIONAL_DAT2: f64 = -0.4375;

/// One diagonal block of the real Schur form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchurBlock {
    Real(f64),
    /// `x ± iy` with `y > 0`.
    Pair(f64, f64),
}

/// Standardized 2×2 block produced by [`standardize_2x2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standard2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Rotation `[[cs, -sn], [sn, cs]]` applied as `Rᵀ·M·R`.
    pub cs: f64,
    pub sn: f64,
}

impl Standard2x2 {
    /// Real eigenvalues when `c == 0`, else a conjugate pair.
    pub fn blocks(&self) -> [SchurBlock; 2] {
        if self.c == 0.0 {
            [SchurBlock::Real(self.a), SchurBlock::Real(self.d)]
        } else {
            let y = self.b.abs().sqrt() * self.c.abs().sqrt();
            [SchurBlock::Pair(self.a, y), SchurBlock::Pair(self.a, y)]
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Schur factorization of a real 2×2 block (LAPACK `dlanv2`).
///
/// On return either `c == 0` (two real eigenvalues `a`, `d`) or `a == d`
/// with `b·c < 0` (conjugate pair `a ± i√(−bc)`).
pub fn standardize_2x2(mut a: f64, mut b: f64, mut c: f64, mut d: f64) -> Standard2x2 {
    const MULTPL: f64 = 4.0;
    let safmn2 = 2f64.powi(-485);
    let safmx2 = 1.0 / safmn2;
    let (mut cs, mut sn);

    if c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        core::mem::swap(&mut a, &mut d);
        b = -c;
        c = 0.0;
    } else if a - d == 0.0 && sign(1.0, b) != sign(1.0, c) {
        cs = 1.0;
        sn = 0.0;
    } else {
        let mut temp = a - d;
        let mut p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign(1.0, b) * sign(1.0, c);
        let mut scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= MULTPL * ULP {
            // Real eigenvalues.
            z = p + sign(scale.sqrt() * z.sqrt(), p);
            a = d + z;
            d -= (bcmax / z) * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = 0.0;
        } else {
            // Complex or nearly equal real eigenvalues: equalize the diagonal.
            let mut sigma = b + c;
            let mut count = 0;
            loop {
                count += 1;
                scale = temp.abs().max(sigma.abs());
                if scale >= safmx2 {
                    sigma *= safmn2;
                    temp *= safmn2;
                    if count <= 20 {
                        continue;
                    }
                }
                if scale <= safmn2 {
                    sigma *= safmx2;
                    temp *= safmx2;
                    if count <= 20 {
                        continue;
                    }
                }
                break;
            }
            p = 0.5 * temp;
            let mut tau = sigma.hypot(temp);
            cs = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            sn = -(p / (tau * cs)) * sign(1.0, sigma);

            let aa = a * cs + b * sn;
            let bb = -a * sn + b * cs;
            let cc = c * cs + d * sn;
            let dd = -c * sn + d * cs;

            a = aa * cs + cc * sn;
            b = bb * cs + dd * sn;
            c = -aa * sn + cc * cs;
            d = -bb * sn + dd * cs;

            temp = 0.5 * (a + d);
            a = temp;
            d = temp;

            if c != 0.0 {
                if b != 0.0 {
                    if sign(1.0, b) == sign(1.0, c) {
                        // Real eigenvalues after all: triangularize.
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = sign(sab * sac, c);
                        tau = 1.0 / (b + c).abs().sqrt();
                        a = temp + p;
                        d = temp - p;
                        b -= c;
                        c = 0.0;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let t = cs * cs1 - sn * sn1;
                        sn = cs * sn1 + sn * cs1;
                        cs = t;
                    }
                } else {
                    b = -c;
                    c = 0.0;
                    let t = cs;
                    cs = -sn;
                    sn = t;
                }
            }
        }
    }
    Standard2x2 { a, b, c, d, cs, sn }
}

/// Runs the double-shift QR iteration on row-major Hessenberg `h` and
/// returns the diagonal blocks in order of deflation.
pub(crate) fn hessenberg_eigenvalues(h: &mut [f64], n: usize) -> Result<Vec<SchurBlock>> {
    let mut blocks = Vec::with_capacity(n);
    if n == 0 {
        return Ok(blocks);
    }
    if n == 1 {
        blocks.push(SchurBlock::Real(h[0]));
        return Ok(blocks);
    }
    let at = |i: usize, j: usize| i * n + j;

    let smlnum = SAFE_MIN * (n as f64 / ULP);
    let itmax = 30 * n.max(10);
    let mut kdefl = 0usize;
    let ilo = 0usize;
    // Active window is rows/columns l..=i.
    let mut i = n as isize - 1;

    while i >= ilo as isize {
        let iu = i as usize;
        let mut l = ilo;
        let mut converged = false;
        for _its in 0..=itmax {
            // Small subdiagonal search.
            let mut k = iu;
            while k > l {
                let hk = h[at(k, k - 1)].abs();
                if hk <= smlnum {
                    break;
                }
                let mut tst = h[at(k - 1, k - 1)].abs() + h[at(k, k)].abs();
                if tst == 0.0 {
                    if k >= ilo + 2 {
                        tst += h[at(k - 1, k - 2)].abs();
                    }
                    if k + 1 < n {
                        tst += h[at(k + 1, k)].abs();
                    }
                }
                if hk <= ULP * tst {
                    let ab = hk.max(h[at(k - 1, k)].abs());
                    let ba = hk.min(h[at(k - 1, k)].abs());
                    let diff = (h[at(k - 1, k - 1)] - h[at(k, k)]).abs();
                    let aa = h[at(k, k)].abs().max(diff);
                    let bb = h[at(k, k)].abs().min(diff);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ULP * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > ilo {
                h[at(l, l - 1)] = 0.0;
            }
            if l + 1 >= iu {
                converged = true;
                break;
            }
            kdefl += 1;

            // Shifts.
            let (h11, h12, h21, h22);
            if kdefl % (2 * EXCEPTIONAL_PERIOD) == 0 {
                let s = h[at(iu, iu - 1)].abs() + h[at(iu - 1, iu - 2)].abs();
                h11 = EXCEPTIONAL_DAT1 * s + h[at(iu, iu)];
                h12 = EXCEPTIONAL_DAT2 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl % EXCEPTIONAL_PERIOD == 0 {
                let s = h[at(l + 1, l)].abs() + h[at(l + 2, l + 1)].abs();
                h11 = EXCEPTIONAL_DAT1 * s + h[at(l, l)];
                h12 = EXCEPTIONAL_DAT2 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = h[at(iu - 1, iu - 1)];
                h21 = h[at(iu, iu - 1)];
                h12 = h[at(iu - 1, iu)];
                h22 = h[at(iu, iu)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == 0.0 {
                rt1r = 0.0;
                rt1i = 0.0;
                rt2r = 0.0;
                rt2i = 0.0;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = (h11 + h22) / 2.0;
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= 0.0 {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    // Real shifts: use the one closer to h22 twice.
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let pick = if (a - h22).abs() <= (b - h22).abs() { a } else { b };
                    rt1r = pick * s;
                    rt2r = rt1r;
                    rt1i = 0.0;
                    rt2i = 0.0;
                }
            }

            // Two consecutive small subdiagonals.
            let mut v = [0.0f64; 3];
            let mut m = iu - 2;
            loop {
                let mut h21s = h[at(m + 1, m)];
                let mut s = (h[at(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                h21s = h[at(m + 1, m)] / s;
                v[0] = h21s * h[at(m, m + 1)] + (h[at(m, m)] - rt1r) * ((h[at(m, m)] - rt2r) / s)
                    - rt1i * (rt2i / s);
                v[1] = h21s * (h[at(m, m)] + h[at(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[at(m + 2, m + 1)];
                s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = h[at(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs() * (h[at(m - 1, m - 1)].abs() + h[at(m, m)].abs() + h[at(m + 1, m + 1)].abs());
                if h00 <= ULP * h01 {
                    break;
                }
                m -= 1;
            }

            // Bulge chase over rows/columns m..=iu of the active window l..=iu.
            for k in m..iu {
                let nr = 3.min(iu - k + 1);
                if k > m {
                    for (r, vr) in v.iter_mut().enumerate().take(nr) {
                        *vr = h[at(k + r, k - 1)];
                    }
                }
                let (beta, t1) = householder(&mut v[..nr]);
                v[0] = beta;
                if k > m {
                    h[at(k, k - 1)] = beta;
                    h[at(k + 1, k - 1)] = 0.0;
                    if k + 2 <= iu {
                        h[at(k + 2, k - 1)] = 0.0;
                    }
                } else if m > l {
                    h[at(k, k - 1)] *= 1.0 - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    let (r0, rest) = h.split_at_mut(at(k + 1, 0));
                    let (r1, r2) = rest.split_at_mut(n);
                    let r0 = &mut r0[at(k, k)..at(k, iu + 1)];
                    let r1 = &mut r1[k..=iu];
                    let r2 = &mut r2[k..=iu];
                    for ((a, b), c) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()) {
                        let sum = *a + v2 * *b + v3 * *c;
                        *a -= sum * t1;
                        *b -= sum * t2;
                        *c -= sum * t3;
                    }
                    for j in l..=(k + 3).min(iu) {
                        let row = &mut h[at(j, k)..at(j, k) + 3];
                        let sum = row[0] + v2 * row[1] + v3 * row[2];
                        row[0] -= sum * t1;
                        row[1] -= sum * t2;
                        row[2] -= sum * t3;
                    }
                } else if nr == 2 {
                    let (r0, r1) = h.split_at_mut(at(k + 1, 0));
                    let r0 = &mut r0[at(k, k)..at(k, iu + 1)];
                    let r1 = &mut r1[k..=iu];
                    for (a, b) in r0.iter_mut().zip(r1.iter_mut()) {
                        let sum = *a + v2 * *b;
                        *a -= sum * t1;
                        *b -= sum * t2;
                    }
                    for j in l..=iu {
                        let row = &mut h[at(j, k)..at(j, k) + 2];
                        let sum = row[0] + v2 * row[1];
                        row[0] -= sum * t1;
                        row[1] -= sum * t2;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: itmax });
        }

        if l == iu {
            blocks.push(SchurBlock::Real(h[at(iu, iu)]));
        } else {
            let std = standardize_2x2(h[at(iu - 1, iu - 1)], h[at(iu - 1, iu)], h[at(iu, iu - 1)], h[at(iu, iu)]);
            blocks.extend_from_slice(&std.blocks());
        }
        kdefl = 0;
        i = l as isize - 1;
    }
    Ok(blocks)
}
