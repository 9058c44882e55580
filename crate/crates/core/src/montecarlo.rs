//! Monte Carlo sampling of real Ginibre matrices.
//!
//! Sample `i` draws its entries from the ChaCha stream `i` under the run seed,
//! so a run is reproducible bit for bit whatever the worker count. Per-sample
//! statistics are merged in fixed-size chunks and reduced pairwise in a fixed
//! order.

use crate::error::{Error, Result};
use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

const CHUNK: u64 = 256;
const QR_MAX_ITER: usize = 10_000;

/// How real eigenvalues are told apart from complex pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealnessMode {
    /// 1×1 blocks of the real Schur form.
    SchurBlocks,
    /// `|Im λ| ≤ ε ‖A‖_F`.
    ImagThreshold(f64),
}

impl Default for RealnessMode {
    fn default() -> Self {
        RealnessMode::SchurBlocks
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MCConfig {
    pub n: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub realness_mode: RealnessMode,
}

impl MCConfig {
    pub fn new(n: usize, n_samples: u64, seed: u64) -> Self {
        MCConfig {
            n,
            n_samples,
            seed,
            workers: 1,
            realness_mode: RealnessMode::default(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.n < 1 || self.n_samples < 1 || self.workers < 1 {
            return Err(Error::Domain("N, samples and workers must be positive".into()));
        }
        Ok(())
    }
}

/// Histogram of real eigenvalues on `[lo, hi)` normalised as a density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedDensity {
    pub lo: f64,
    pub hi: f64,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    pub std_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCSummary {
    pub n: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub p_list: Vec<u32>,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `count_histogram[k]` samples had exactly `k` real eigenvalues.
    pub count_histogram: Vec<u64>,
    pub failures: u64,
    pub density: Option<BinnedDensity>,
}

/// One dumped sample.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub sample: u64,
    pub count: usize,
    pub eigenvalues: Vec<f64>,
}

fn stream(seed: u64, sample: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

fn unit_open(rng: &mut ChaCha20Rng) -> f64 {
    // (0, 1]
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `N × N` matrix of standard normals from stream `sample` (Box–Muller).
pub fn sample_ginoe(n: usize, seed: u64, sample: u64) -> DMatrix<f64> {
    let mut rng = stream(seed, sample);
    let mut vals = Vec::with_capacity(n * n + 1);
    while vals.len() < n * n {
        let r = (-2.0 * unit_open(&mut rng).ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * unit_open(&mut rng)).sin_cos();
        vals.push(r * c);
        vals.push(r * s);
    }
    vals.truncate(n * n);
    DMatrix::from_row_slice(n, n, &vals)
}

/// Real eigenvalues in increasing order.
pub fn real_eigenvalues(m: &DMatrix<f64>, mode: RealnessMode) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Domain("matrix must be square".into()));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, QR_MAX_ITER)
        .ok_or_else(|| Error::Eigensolver(format!("QR did not converge in {QR_MAX_ITER} iterations")))?;
    let mut out = match mode {
        RealnessMode::SchurBlocks => {
            let (_, t) = schur.unpack();
            let mut out = Vec::new();
            let mut i = 0;
            while i < n {
                if i + 1 < n && t[(i + 1, i)] != 0.0 {
                    let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                    let half = 0.5 * (a - d);
                    let disc = half * half + b * c;
                    if disc >= 0.0 {
                        let mid = 0.5 * (a + d);
                        out.push(mid - disc.sqrt());
                        out.push(mid + disc.sqrt());
                    }
                    i += 2;
                } else {
                    out.push(t[(i, i)]);
                    i += 1;
                }
            }
            out
        }
        RealnessMode::ImagThreshold(eps) => {
            let cut = eps * m.norm();
            schur.complex_eigenvalues().iter().filter(|z| z.im.abs() <= cut).map(|z| z.re).collect()
        }
    };
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Running count, mean and sum of squared deviations, merged with Chan's update.
#[derive(Debug, Clone)]
struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    hist: Vec<u64>,
    failures: u64,
}

impl Moments {
    fn new(dim: usize) -> Self {
        Moments {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            hist: Vec::new(),
            failures: 0,
        }
    }

    fn push(&mut self, x: &[f64], real_count: Option<usize>) {
        self.count += 1;
        let k = self.count as f64;
        for ((m, s), v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let d = v - *m;
            *m += d / k;
            *s += d * (v - *m);
        }
        if let Some(c) = real_count {
            if self.hist.len() <= c {
                self.hist.resize(c + 1, 0);
            }
            self.hist[c] += 1;
        }
    }

    fn merge(mut self, o: Moments) -> Moments {
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        if o.count > 0 {
            for i in 0..self.mean.len() {
                let d = o.mean[i] - self.mean[i];
                self.mean[i] += d * nb / n;
                self.m2[i] += o.m2[i] + d * d * na * nb / n;
            }
        }
        self.count += o.count;
        if self.hist.len() < o.hist.len() {
            self.hist.resize(o.hist.len(), 0);
        }
        for (h, v) in self.hist.iter_mut().zip(&o.hist) {
            *h += v;
        }
        self.failures += o.failures;
        self
    }

    fn std_errors(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.m2.iter().map(|s| if n > 1.0 { (s / (n - 1.0) / n).sqrt() } else { f64::NAN }).collect()
    }
}

fn pairwise(mut parts: Vec<Moments>) -> Moments {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().unwrap()
}

/// Per-sample feature vector and, when tracked, the real-eigenvalue count.
type Features<'a> = dyn Fn(&DMatrix<f64>) -> Result<(Vec<f64>, Option<usize>)> + Sync + 'a;

fn run(cfg: &MCConfig, dim: usize, features: &Features) -> Result<Moments> {
    cfg.check()?;
    let chunks = cfg.n_samples.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Moments::new(dim);
                for s in c * CHUNK..((c + 1) * CHUNK).min(cfg.n_samples) {
                    match features(&sample_ginoe(cfg.n, cfg.seed, s)) {
                        Ok((x, k)) => acc.push(&x, k),
                        Err(Error::Eigensolver(_)) => acc.failures += 1,
                        Err(e) => return Err(e),
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(pairwise(pool.install(work)?))
}

fn pow_sum(xs: &[f64], p: u32) -> f64 {
    xs.iter().map(|x| x.powi(2 * p as i32)).sum()
}

/// Mean of `Σ x_j^(2p)` over the real eigenvalues, for each `p` in `p_list`.
/// With `bins = Some((lo, hi, k))` the real eigenvalues are also histogrammed.
pub fn empirical_real_moments(cfg: &MCConfig, p_list: &[u32], bins: Option<(f64, f64, usize)>) -> Result<MCSummary> {
    let nb = bins.map_or(0, |b| b.2);
    let np = p_list.len();
    let features = |m: &DMatrix<f64>| -> Result<(Vec<f64>, Option<usize>)> {
        let ev = real_eigenvalues(m, cfg.realness_mode)?;
        let mut x: Vec<f64> = p_list.iter().map(|&p| pow_sum(&ev, p)).collect();
        if let Some((lo, hi, k)) = bins {
            let mut h = vec![0.0; k];
            let w = (hi - lo) / k as f64;
            for v in &ev {
                let i = ((v - lo) / w).floor();
                if i >= 0.0 && (i as usize) < k {
                    h[i as usize] += 1.0;
                }
            }
            x.extend(h);
        }
        Ok((x, Some(ev.len())))
    };
    let acc = run(cfg, np + nb, &features)?;
    let se = acc.std_errors();
    let density = bins.map(|(lo, hi, k)| {
        let w = (hi - lo) / k as f64;
        BinnedDensity {
            lo,
            hi,
            centers: (0..k).map(|i| lo + (i as f64 + 0.5) * w).collect(),
            density: acc.mean[np..].iter().map(|v| v / w).collect(),
            std_errors: se[np..].iter().map(|v| v / w).collect(),
        }
    });
    Ok(MCSummary {
        n: cfg.n,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        p_list: p_list.to_vec(),
        means: acc.mean[..np].to_vec(),
        std_errors: se[..np].to_vec(),
        count_histogram: acc.hist,
        failures: acc.failures,
        density,
    })
}

/// Mean of `Tr G^(2p)` for each `p` in `p_list`.
pub fn empirical_trace_moments(cfg: &MCConfig, p_list: &[u32]) -> Result<MCSummary> {
    let p_max = p_list.iter().copied().max().unwrap_or(0);
    let features = |m: &DMatrix<f64>| -> Result<(Vec<f64>, Option<usize>)> {
        let g2 = m * m;
        let mut pw = DMatrix::identity(m.nrows(), m.nrows());
        let mut traces = vec![pw.trace()];
        for _ in 0..p_max {
            pw = &pw * &g2;
            traces.push(pw.trace());
        }
        Ok((p_list.iter().map(|&p| traces[p as usize]).collect(), None))
    };
    let acc = run(cfg, p_list.len(), &features)?;
    Ok(MCSummary {
        n: cfg.n,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        p_list: p_list.to_vec(),
        std_errors: acc.std_errors(),
        means: acc.mean,
        count_histogram: Vec::new(),
        failures: acc.failures,
        density: None,
    })
}

/// One JSON object per line: sample id, real-eigenvalue count, eigenvalues.
pub fn dump_samples(cfg: &MCConfig, out: &mut dyn Write) -> Result<()> {
    cfg.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    for c in 0..cfg.n_samples.div_ceil(CHUNK) {
        let ids: Vec<u64> = (c * CHUNK..((c + 1) * CHUNK).min(cfg.n_samples)).collect();
        let recs: Vec<Result<SampleRecord>> = pool.install(|| {
            ids.par_iter()
                .map(|&s| {
                    let ev = real_eigenvalues(&sample_ginoe(cfg.n, cfg.seed, s), cfg.realness_mode)?;
                    Ok(SampleRecord {
                        sample: s,
                        count: ev.len(),
                        eigenvalues: ev,
                    })
                })
                .collect()
        });
        for r in recs {
            let line = serde_json::to_string(&r?).map_err(|e| Error::Internal(e.to_string()))?;
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spectra() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        assert_eq!(real_eigenvalues(&m, RealnessMode::SchurBlocks).unwrap(), vec![1.0, 3.0]);
        let r = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(real_eigenvalues(&r, RealnessMode::SchurBlocks).unwrap().is_empty());
        assert!(real_eigenvalues(&r, RealnessMode::ImagThreshold(1e-9)).unwrap().is_empty());
        // (x-2)(x²+1) = x³ - 2x² + x - 2
        let c = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        for mode in [RealnessMode::SchurBlocks, RealnessMode::ImagThreshold(1e-9)] {
            let ev = real_eigenvalues(&c, mode).unwrap();
            assert_eq!(ev.len(), 1);
            assert!((ev[0] - 2.0).abs() < 1e-12);
        }
        assert!(real_eigenvalues(&DMatrix::zeros(2, 3), RealnessMode::SchurBlocks).is_err());
    }

    #[test]
    fn entries_are_standard_normal() {
        let mut s = 0.0;
        let mut s2 = 0.0;
        let mut k = 0.0;
        for i in 0..10_000 {
            for v in sample_ginoe(10, 7, i).iter() {
                s += v;
                s2 += v * v;
                k += 1.0;
            }
        }
        let mean = s / k;
        assert!(mean.abs() < 4e-3, "{mean}");
        assert!((s2 / k - mean * mean - 1.0).abs() < 1e-2);
        assert_eq!(sample_ginoe(5, 42, 3), sample_ginoe(5, 42, 3));
        assert_ne!(sample_ginoe(5, 42, 3), sample_ginoe(5, 42, 4));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = MCConfig::new(6, 2000, 11);
        let base = empirical_real_moments(&cfg, &[0, 1, 2], Some((-3.0, 3.0, 12))).unwrap();
        for w in [4, 16] {
            cfg.workers = w;
            assert_eq!(empirical_real_moments(&cfg, &[0, 1, 2], Some((-3.0, 3.0, 12))).unwrap(), base);
        }
        assert_eq!(base.count_histogram.iter().sum::<u64>() + base.failures, 2000);
        for (k, c) in base.count_histogram.iter().enumerate() {
            assert!(k % 2 == 0 || *c == 0);
        }
    }

    #[test]
    fn dump_is_line_delimited() {
        let cfg = MCConfig::new(3, 5, 1);
        let mut buf = Vec::new();
        dump_samples(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        for (i, l) in lines.iter().enumerate() {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["sample"], i as u64);
            assert_eq!(v["count"].as_u64().unwrap() % 2, 1);
        }
    }
}
