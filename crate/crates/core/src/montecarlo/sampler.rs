//! Dense complex kernels for one draw of the double-Wishart pencil.
//!
//! Complex matrices are stored as separate real and imaginary planes.
//! `X` is column-major so that Gram products and the triangular solve are
//! unit-stride; Hermitian matrices are row-major. Dot products accumulate
//! in four fixed lanes, which keeps the summation order (and hence the
//! results) independent of the target's vector width.

use rand::Rng;
use rand_distr::StandardNormal;

const LANES: usize = 4;

/// `Σ conj(a_k) b_k` when `CONJ`, else `Σ a_k b_k`.
#[inline(always)]
fn cdot<const CONJ: bool>(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> (f64, f64) {
    let n = ar.len();
    let (ai, br, bi) = (&ai[..n], &br[..n], &bi[..n]);
    let s = if CONJ { -1.0 } else { 1.0 };
    let mut re = [0.0; LANES];
    let mut im = [0.0; LANES];
    let full = n - n % LANES;
    for k in (0..full).step_by(LANES) {
        for l in 0..LANES {
            let (a, b, c, d) = (ar[k + l], s * ai[k + l], br[k + l], bi[k + l]);
            re[l] += a * c - b * d;
            im[l] += a * d + b * c;
        }
    }
    let (mut r, mut i) = ((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for k in full..n {
        let (a, b, c, d) = (ar[k], s * ai[k], br[k], bi[k]);
        r += a * c - b * d;
        i += a * d + b * c;
    }
    (r, i)
}

/// Scratch buffers reused across draws on one thread.
pub(crate) struct Workspace {
    n: usize,
    m1: usize,
    rows: usize,
    // X, column-major (rows × n); the first m1 rows are X₁
    xr: Vec<f64>,
    xi: Vec<f64>,
    // S = X†X lower triangle, overwritten by its Cholesky factor L
    sr: Vec<f64>,
    si: Vec<f64>,
    // C = L⁻¹W₁L⁻†, full Hermitian storage
    cr: Vec<f64>,
    ci: Vec<f64>,
    // upper-triangular A with A†A = Σ, applied as X ← XA
    mix: Option<(Vec<f64>, Vec<f64>)>,
    tmp_r: Vec<f64>,
    tmp_i: Vec<f64>,
    vr: Vec<f64>,
    vi: Vec<f64>,
    pr: Vec<f64>,
    pi: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// The factorization of `W₁ + W₂` hit a non-positive pivot.
#[derive(Debug)]
pub(crate) struct Singular;

impl Workspace {
    pub fn new(n: usize, m1: usize, m2: usize, mix: Option<(Vec<f64>, Vec<f64>)>) -> Self {
        let rows = m1 + m2;
        let tmp = if mix.is_some() { rows * n } else { 0 };
        Self {
            n,
            m1,
            rows,
            xr: vec![0.0; rows * n],
            xi: vec![0.0; rows * n],
            sr: vec![0.0; n * n],
            si: vec![0.0; n * n],
            cr: vec![0.0; n * n],
            ci: vec![0.0; n * n],
            mix,
            tmp_r: vec![0.0; tmp],
            tmp_i: vec![0.0; tmp],
            vr: vec![0.0; n],
            vi: vec![0.0; n],
            pr: vec![0.0; n],
            pi: vec![0.0; n],
            diag: vec![0.0; n],
            off: vec![0.0; n],
        }
    }

    /// Smallest and largest eigenvalue of one draw of `(W₁+W₂)⁻¹W₁`.
    pub fn draw<R: Rng>(&mut self, rng: &mut R) -> Result<(f64, f64), Singular> {
        self.fill_gaussian(rng);
        if self.mix.is_some() {
            self.apply_mix();
        }
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx2") {
                // SAFETY: the CPU supports AVX2, checked just above
                return unsafe { self.reduce_avx2() };
            }
        }
        self.reduce()
    }

    /// Same code compiled for 256-bit vectors. No FMA is enabled and all
    /// reductions use fixed lanes, so results are bit-identical to
    /// [`Workspace::reduce`].
    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn reduce_avx2(&mut self) -> Result<(f64, f64), Singular> {
        self.reduce()
    }

    #[inline(always)]
    fn reduce(&mut self) -> Result<(f64, f64), Singular> {
        self.gram_all_rows();
        cholesky_lower(&mut self.sr, &mut self.si, self.n)?;
        self.solve_x1();
        self.gram_x1();
        self.tridiagonalize();
        Ok(extreme_eigenvalues(&self.diag, &self.off[..self.n.saturating_sub(1)]))
    }

    fn fill_gaussian<R: Rng>(&mut self, rng: &mut R) {
        // unit variance per component; the common scale cancels in W
        for (a, b) in self.xr.iter_mut().zip(self.xi.iter_mut()) {
            *a = rng.sample(StandardNormal);
            *b = rng.sample(StandardNormal);
        }
    }

    /// Column j of `XA` is `Σ_{k≤j} A_kj · (column k of X)`.
    fn apply_mix(&mut self) {
        let (n, rows) = (self.n, self.rows);
        let (ar, ai) = self.mix.as_ref().expect("mix present");
        self.tmp_r.iter_mut().for_each(|v| *v = 0.0);
        self.tmp_i.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            let (tr, ti) = (&mut self.tmp_r[j * rows..(j + 1) * rows], &mut self.tmp_i[j * rows..(j + 1) * rows]);
            for k in 0..=j {
                let (c, d) = (ar[k * n + j], ai[k * n + j]);
                let (xr, xi) = (&self.xr[k * rows..(k + 1) * rows], &self.xi[k * rows..(k + 1) * rows]);
                for r in 0..rows {
                    tr[r] += xr[r] * c - xi[r] * d;
                    ti[r] += xr[r] * d + xi[r] * c;
                }
            }
        }
        std::mem::swap(&mut self.xr, &mut self.tmp_r);
        std::mem::swap(&mut self.xi, &mut self.tmp_i);
    }

    /// Lower triangle of `S = X†X = W₁ + W₂`.
    #[inline(always)]
    fn gram_all_rows(&mut self) {
        let (n, rows) = (self.n, self.rows);
        for i in 0..n {
            let (ar, ai) = (&self.xr[i * rows..(i + 1) * rows], &self.xi[i * rows..(i + 1) * rows]);
            for j in 0..=i {
                let (br, bi) = (&self.xr[j * rows..(j + 1) * rows], &self.xi[j * rows..(j + 1) * rows]);
                // S_ij = Σ_r conj(X_ri) X_rj
                let (re, im) = cdot::<true>(ar, ai, br, bi);
                self.sr[i * n + j] = re;
                self.si[i * n + j] = im;
            }
        }
    }

    /// `Y = X₁ L^{−†}` in place, column by column:
    /// `y_j = (x_j − Σ_{k<j} conj(L_jk) y_k) / L_jj`.
    #[inline(always)]
    fn solve_x1(&mut self) {
        let (n, rows, m1) = (self.n, self.rows, self.m1);
        for j in 0..n {
            let (done_r, rest_r) = self.xr.split_at_mut(j * rows);
            let (done_i, rest_i) = self.xi.split_at_mut(j * rows);
            let (yr, yi) = (&mut rest_r[..m1], &mut rest_i[..m1]);
            for k in 0..j {
                let (c, e) = (self.sr[j * n + k], self.si[j * n + k]);
                let (kr, ki) = (&done_r[k * rows..k * rows + m1], &done_i[k * rows..k * rows + m1]);
                for r in 0..m1 {
                    yr[r] -= c * kr[r] + e * ki[r];
                    yi[r] -= c * ki[r] - e * kr[r];
                }
            }
            let inv = 1.0 / self.sr[j * n + j];
            yr.iter_mut().for_each(|v| *v *= inv);
            yi.iter_mut().for_each(|v| *v *= inv);
        }
    }

    /// Full Hermitian `C = Y†Y` over the first `m1` rows.
    #[inline(always)]
    fn gram_x1(&mut self) {
        let (n, rows, m1) = (self.n, self.rows, self.m1);
        for i in 0..n {
            let (ar, ai) = (&self.xr[i * rows..i * rows + m1], &self.xi[i * rows..i * rows + m1]);
            for j in 0..=i {
                let (br, bi) = (&self.xr[j * rows..j * rows + m1], &self.xi[j * rows..j * rows + m1]);
                let (re, im) = cdot::<true>(ar, ai, br, bi);
                self.cr[i * n + j] = re;
                self.ci[i * n + j] = im;
                self.cr[j * n + i] = re;
                self.ci[j * n + i] = -im;
            }
        }
    }

    /// Householder reduction of the Hermitian `C` to a real symmetric
    /// tridiagonal matrix with the same eigenvalues.
    #[inline(always)]
    fn tridiagonalize(&mut self) {
        let n = self.n;
        let (ar, ai) = (&mut self.cr, &mut self.ci);
        for k in 0..n.saturating_sub(1) {
            let m = n - k - 1;
            let base = k + 1;
            // the column below the diagonal is the conjugate of row k right of it
            let (alr, ali) = (ar[k * n + base], -ai[k * n + base]);
            let mut xnorm2 = 0.0;
            for i in 1..m {
                let idx = k * n + base + i;
                xnorm2 += ar[idx] * ar[idx] + ai[idx] * ai[idx];
            }
            if xnorm2 == 0.0 && ali == 0.0 {
                self.off[k] = alr;
                continue;
            }
            let beta = -(alr * alr + ali * ali + xnorm2).sqrt().copysign(alr);
            let (taur, taui) = ((beta - alr) / beta, -ali / beta);
            // v = x / (α − β), v₀ = 1
            let (dr, di) = (alr - beta, ali);
            let den = dr * dr + di * di;
            let (sr, si) = (dr / den, -di / den);
            self.vr[0] = 1.0;
            self.vi[0] = 0.0;
            for i in 1..m {
                let idx = k * n + base + i;
                let (a, b) = (ar[idx], -ai[idx]);
                self.vr[i] = a * sr - b * si;
                self.vi[i] = a * si + b * sr;
            }
            self.off[k] = beta;

            // p = τ B v with B the trailing block
            let (vr, vi) = (&self.vr[..m], &self.vi[..m]);
            let (pr, pi) = (&mut self.pr[..m], &mut self.pi[..m]);
            for i in 0..m {
                let row = (base + i) * n + base;
                let (a, b) = cdot::<false>(&ar[row..row + m], &ai[row..row + m], vr, vi);
                pr[i] = taur * a - taui * b;
                pi[i] = taur * b + taui * a;
            }
            // α = −½ τ (p†v);  p ← p + α v
            let (dotr, doti) = cdot::<true>(pr, pi, vr, vi);
            let (hr, hi) = (-0.5 * (taur * dotr - taui * doti), -0.5 * (taur * doti + taui * dotr));
            for i in 0..m {
                pr[i] += hr * vr[i] - hi * vi[i];
                pi[i] += hr * vi[i] + hi * vr[i];
            }
            // B ← B − v p† − p v†
            for i in 0..m {
                let row = (base + i) * n + base;
                let (br, bi) = (&mut ar[row..row + m], &mut ai[row..row + m]);
                let (vir, vii, pir, pii) = (vr[i], vi[i], pr[i], pi[i]);
                for j in 0..m {
                    br[j] -= vir * pr[j] + vii * pi[j] + pir * vr[j] + pii * vi[j];
                    bi[j] -= vii * pr[j] - vir * pi[j] + pii * vr[j] - pir * vi[j];
                }
            }
        }
        for i in 0..n {
            self.diag[i] = ar[i * n + i];
        }
    }
}

/// In-place `S = L L†` on the lower triangle (row-major); the diagonal of
/// `L` is real.
#[inline(always)]
fn cholesky_lower(lr: &mut [f64], li: &mut [f64], n: usize) -> Result<(), Singular> {
    for j in 0..n {
        let scale = lr[j * n + j];
        let (rj, ij) = (&lr[j * n..j * n + j], &li[j * n..j * n + j]);
        let d = scale - cdot::<true>(rj, ij, rj, ij).0;
        if d.is_nan() || d <= 1e-14 * scale {
            return Err(Singular);
        }
        let d = d.sqrt();
        lr[j * n + j] = d;
        li[j * n + j] = 0.0;
        for i in j + 1..n {
            // Σ_k L_ik conj(L_jk) = conj(Σ_k conj(L_ik) L_jk)
            let (re, im) = cdot::<true>(&lr[i * n..i * n + j], &li[i * n..i * n + j], &lr[j * n..j * n + j], &li[j * n..j * n + j]);
            lr[i * n + j] = (lr[i * n + j] - re) / d;
            li[i * n + j] = (li[i * n + j] + im) / d;
        }
    }
    Ok(())
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
#[inline(always)]
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let coupling = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue by Sturm bisection inside the
/// Gershgorin interval.
#[inline(always)]
pub(crate) fn extreme_eigenvalues(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let width = (hi - lo).max(f64::MIN_POSITIVE);
    let bisect = |k: usize| {
        // the k-th smallest eigenvalue: count(a) ≤ k < count(b)
        let (mut a, mut b) = (lo - 1e-15 * width, hi + 1e-15 * width);
        // below 1e−18·width the rounding in forming C dominates anyway
        let floor = 1e-18 * width;
        while b - a > (2.0 * f64::EPSILON * a.abs().max(b.abs())).max(floor) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(d, e, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    };
    (bisect(0), bisect(n - 1))
}
