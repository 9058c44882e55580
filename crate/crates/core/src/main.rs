use clap::{Args, Parser, Subcommand, ValueEnum};
use ginoe_core::asymptotics::{
    a_coefficients, b_coefficients, mgf_expansion_levels, moment_asymptotic, stieltjes_expansion_levels,
};
use ginoe_core::density::{ode_residual_density, rho_complex, rho_real, rho_real_derivatives};
use ginoe_core::moments::{
    m0_exact, m0_hyp, m2_recognized, moment_complex_eigs, moment_complex_quadrature, moment_real_any, moment_real_int, moment_real_quadrature, moment_sequence_exact, moment_sequence_recurrence,
    trace_moment,
};
use ginoe_core::montecarlo::{dump_samples, empirical_real_moments, empirical_trace_moments, MCConfig, RealnessMode};
use ginoe_core::numerics::decimal::{parse_decimal, parse_rational};
use ginoe_core::numerics::{Ball, CBall, PrecisionContext};
use ginoe_core::output::{q_string, write_error, Format, Record, Row};
use ginoe_core::transforms::{mgf_ode_residual, mgf_value, stieltjes_ode_residual, stieltjes_value};
use ginoe_core::verify::{run_all, run_check, Scale};
use ginoe_core::{Error, MomentValue, Result};
use std::io::Write;

#[derive(Parser)]
#[command(name = "ginoe", version, about = "Spectral moments of the real Ginibre ensemble")]
struct Cli {
    /// Target precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    prec: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for Monte Carlo runs.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentMethod {
    Hyp,
    Rec,
    Quad,
}

#[derive(Clone, Copy, ValueEnum)]
enum Eigs {
    Real,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum AsympKind {
    A,
    B,
    Moment,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Schur,
    Imag,
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long = "N")]
    n: u32,
    /// Order p (decimal or rational); the moment is of x^(2p).
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Imaginary part of p.
    #[arg(long, allow_hyphen_values = true)]
    p_imag: Option<String>,
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value_t = MomentMethod::Hyp)]
    method: MomentMethod,
    #[arg(long, value_enum, default_value_t = Eigs::Real)]
    eigs: Eigs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Even moment of the real (or complex) eigenvalues.
    Moment(MomentArgs),
    /// Expected number of real eigenvalues.
    M0 {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        exact: bool,
    },
    /// Density of real eigenvalues at a point or on a grid.
    Density {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Imaginary coordinate: evaluates the complex-eigenvalue density at x + iy.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// `a:b:n` for n equally spaced points on [a, b].
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        derivs: bool,
        #[arg(long)]
        ode_residual: bool,
    },
    /// Large-N expansion coefficients.
    Asymp {
        #[arg(value_enum)]
        kind: AsympKind,
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        p: Option<u32>,
    },
    /// Sinh/cosh levels of the scaled moment generating function.
    MgfSeries {
        #[arg(long, default_value_t = 3)]
        kmax: u32,
    },
    /// Levels of the scaled Stieltjes transform.
    StieltjesSeries {
        #[arg(long, default_value_t = 2)]
        kmax: u32,
    },
    /// Moment generating function at real t.
    Mgf {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value_t = 0)]
        derivs: usize,
        #[arg(long)]
        ode_residual: bool,
    },
    /// Stieltjes transform at complex t.
    Stieltjes {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        t_imag: String,
        #[arg(long, default_value_t = 0)]
        derivs: usize,
        #[arg(long)]
        ode_residual: bool,
    },
    /// Monte Carlo estimates from sampled matrices.
    Mc {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        p_list: Vec<u32>,
        /// Trace moments Tr G^(2p) instead of real-eigenvalue sums.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = Mode::Schur)]
        mode: Mode,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// `a:b:n` histogram of real eigenvalues.
        #[arg(long, allow_hyphen_values = true)]
        bins: Option<String>,
        /// Write one JSON line per sample to this file.
        #[arg(long)]
        dump: Option<std::path::PathBuf>,
    },
    /// Run the self-checks; exit code 0 iff all pass.
    Verify {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        /// Run a single check by number.
        #[arg(long)]
        only: Option<u32>,
    },
}

fn grid(s: &str) -> Result<(String, String, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => Ok((
            a.to_string(),
            b.to_string(),
            n.parse().map_err(|_| Error::Usage(format!("bad grid count in {s}")))?,
        )),
        _ => Err(Error::Usage(format!("grid must be a:b:n, got {s}"))),
    }
}

fn moment_row(v: &MomentValue, bits: u32) -> Row {
    let mut r = Row::new().complex("value", &v.value, bits).set("method", v.method.as_str());
    if let Some(e) = &v.exact {
        r = r.exact(&e.value).set("proven", e.proven);
    }
    r
}

fn moment(a: &MomentArgs, ctx: &PrecisionContext) -> Result<Record> {
    let wp = ctx.working();
    let bits = ctx.target_bits;
    let re = parse_decimal(&a.p, wp)?;
    let im = a.p_imag.as_deref().map(|s| parse_decimal(s, wp)).transpose()?.unwrap_or_else(|| Ball::zero(wp));
    let p = CBall::new(re.clone(), im);
    let p_int = p.is_real().then(|| re.exact_integer()).flatten().and_then(|v| u32::try_from(v).ok());
    let rec = Record::new("moment", bits).param("N", a.n).param("p", &a.p);
    let rec = match &a.p_imag {
        Some(s) => rec.param("p_imag", s),
        None => rec,
    };
    let v = match (a.eigs, a.method) {
        (Eigs::Complex, m) => {
            let p = p_int.filter(|&p| p >= 1).ok_or_else(|| Error::Domain("complex-eigenvalue moments need integer p >= 1".into()))?;
            match m {
                MomentMethod::Quad => moment_complex_quadrature(a.n, p, ctx)?,
                _ => moment_complex_eigs(a.n, p, ctx)?,
            }
        }
        (Eigs::Real, MomentMethod::Hyp) => moment_real_any(a.n, &p, ctx)?,
        (Eigs::Real, MomentMethod::Quad) => {
            if !p.is_real() {
                return Err(Error::Domain("quadrature needs real p".into()));
            }
            moment_real_quadrature(a.n, &re, ctx)?
        }
        (Eigs::Real, MomentMethod::Rec) => {
            let p = p_int.filter(|&p| p >= 2).ok_or_else(|| Error::Domain("recurrence needs integer p >= 2".into()))?;
            let seq = moment_sequence_recurrence(a.n, p, &moment_real_int(a.n, 0, ctx)?, &moment_real_int(a.n, 1, ctx)?)?;
            seq[p as usize].clone()
        }
    };
    let v = if a.exact && matches!(a.eigs, Eigs::Real) {
        let p = p_int.ok_or_else(|| Error::Domain("exact values need integer p".into()))?;
        let m0 = m0_exact(a.n)?;
        let m2 = m2_recognized(a.n)?.ok_or_else(|| Error::Verification("no relation found for M2".into()))?;
        let e = moment_sequence_exact(a.n, p.max(2), &m0, &m2)?[p as usize].clone();
        v.with_exact(e, p == 0)
    } else {
        v
    };
    Ok(rec.row(moment_row(&v, bits)))
}

fn run(cli: &Cli) -> Result<Vec<Record>> {
    let ctx = PrecisionContext::new(cli.prec)?;
    let wp = ctx.working();
    let bits = ctx.target_bits;
    Ok(match &cli.cmd {
        Cmd::Moment(a) => vec![moment(a, &ctx)?],
        Cmd::M0 { n, exact } => {
            let mut v = m0_hyp(*n, &ctx)?;
            if *exact {
                v = v.with_exact(m0_exact(*n)?, true);
            }
            vec![Record::new("m0", bits).param("N", n).row(moment_row(&v, bits))]
        }
        Cmd::Density { n, x, y, grid: g, derivs, ode_residual } => {
            let xs: Vec<String> = match (x, g) {
                (Some(x), None) => vec![x.clone()],
                (None, Some(g)) => {
                    let (a, b, k) = grid(g)?;
                    let (a, b) = (parse_rational(&a)?, parse_rational(&b)?);
                    if k < 2 {
                        return Err(Error::Usage("grid needs at least 2 points".into()));
                    }
                    (0..k)
                        .map(|i| {
                            let t = &a + (&b - &a) * num_rational::BigRational::new(i.into(), (k - 1).into());
                            q_string(&t)
                        })
                        .collect()
                }
                _ => return Err(Error::Usage("give exactly one of --x or --grid".into())),
            };
            let mut rec = Record::new("density", bits).param("N", n);
            for xs in &xs {
                let xb = parse_decimal(xs, wp)?;
                let mut row = Row::new().set("x", xs);
                if let Some(y) = y {
                    row = row.set("y", y).real("rho_c", &rho_complex(*n, &xb, &parse_decimal(y, wp)?, &ctx)?, bits);
                } else {
                    row = row.real("rho", &rho_real(*n, &xb, &ctx)?, bits);
                    if *derivs {
                        let d = rho_real_derivatives(*n, &xb, &ctx)?;
                        row = row.real("d1", &d[1], bits).real("d2", &d[2], bits).real("d3", &d[3], bits);
                    }
                    if *ode_residual {
                        row = row.real("ode_residual", &ode_residual_density(*n, &xb, &ctx)?, bits);
                    }
                }
                rec = rec.row(row);
            }
            vec![rec]
        }
        Cmd::Asymp { kind, m, n, p } => match kind {
            AsympKind::A | AsympKind::B => {
                let (name, c) = match kind {
                    AsympKind::A => ("a", a_coefficients(*m)?),
                    _ => ("b", b_coefficients(*m)?),
                };
                let mut rec = Record::new(&format!("asymp {name}"), bits).param("m", m);
                for (l, v) in c.iter().enumerate() {
                    rec = rec.row(Row::new().set("l", l + 1).set("coeff", q_string(v)));
                }
                vec![rec]
            }
            AsympKind::Moment => {
                let n = n.ok_or_else(|| Error::Usage("asymp moment needs --N".into()))?;
                let p = p.ok_or_else(|| Error::Usage("asymp moment needs --p".into()))?;
                let levels = mgf_expansion_levels((*m as u32).max(p + 1))?;
                let (s, v) = moment_asymptotic(n as u64, p, *m, &levels, wp)?;
                let mut rec = Record::new("asymp moment", bits).param("N", n).param("p", p).param("m", m);
                for (l, c) in s.half_power_coeffs.iter().enumerate() {
                    rec = rec.row(Row::new().set("series", "half").set("l", l).set("coeff", q_string(c)));
                }
                for (l, c) in s.int_power_coeffs.iter().enumerate() {
                    rec = rec.row(Row::new().set("series", "integer").set("l", l).set("coeff", q_string(c)));
                }
                vec![rec.row(Row::new().set("series", "value").real("value", &v, bits))]
            }
        },
        Cmd::MgfSeries { kmax } => {
            let mut rec = Record::new("mgf-series", bits).param("kmax", kmax);
            for lv in mgf_expansion_levels(*kmax)? {
                rec = rec.row(Row::new().set("level", lv.level).set("expr", &lv));
            }
            vec![rec]
        }
        Cmd::StieltjesSeries { kmax } => {
            let mut rec = Record::new("stieltjes-series", bits).param("kmax", kmax);
            for lv in stieltjes_expansion_levels(*kmax)? {
                rec = rec.row(Row::new().set("level", lv.level).set("expr", &lv));
            }
            vec![rec]
        }
        Cmd::Mgf { n, t, derivs, ode_residual } => {
            let tb = parse_decimal(t, wp)?;
            let v = mgf_value(*n, &tb, *derivs, &ctx)?;
            let mut row = Row::new().real("u", &v.value.re, bits);
            for (k, d) in v.derivs.iter().enumerate() {
                row = row.real(&format!("d{}", k + 1), &d.re, bits);
            }
            if *ode_residual {
                row = row.real("ode_residual", &mgf_ode_residual(*n, &tb, &ctx)?, bits);
            }
            vec![Record::new("mgf", bits).param("N", n).param("t", t).row(row)]
        }
        Cmd::Stieltjes { n, t, t_imag, derivs, ode_residual } => {
            let z = CBall::new(parse_decimal(t, wp)?, parse_decimal(t_imag, wp)?);
            let v = stieltjes_value(*n, &z, *derivs, &ctx)?;
            let mut row = Row::new().complex("w", &v.value, bits);
            for (k, d) in v.derivs.iter().enumerate() {
                row = row.complex(&format!("d{}", k + 1), d, bits);
            }
            if *ode_residual {
                row = row.complex("ode_residual", &stieltjes_ode_residual(*n, &z, &ctx)?, bits);
            }
            vec![Record::new("stieltjes", bits).param("N", n).param("t", t).param("t_imag", t_imag).row(row)]
        }
        Cmd::Mc { n, samples, workers, p_list, trace, mode, eps, bins, dump } => {
            let mut cfg = MCConfig::new(*n, *samples, cli.seed);
            cfg.workers = *workers;
            cfg.realness_mode = match mode {
                Mode::Schur => RealnessMode::SchurBlocks,
                Mode::Imag => RealnessMode::ImagThreshold(*eps),
            };
            if let Some(path) = dump {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                dump_samples(&cfg, &mut f)?;
                f.flush()?;
            }
            let bins = bins
                .as_deref()
                .map(|b| -> Result<(f64, f64, usize)> {
                    let (a, b, k) = grid(b)?;
                    let f = |s: &str| s.parse::<f64>().map_err(|_| Error::Usage(format!("bad number {s}")));
                    Ok((f(&a)?, f(&b)?, k))
                })
                .transpose()?;
            let s = if *trace {
                empirical_trace_moments(&cfg, p_list)?
            } else {
                empirical_real_moments(&cfg, p_list, bins)?
            };
            let mut rec = Record::new("mc", bits)
                .param("N", n)
                .param("samples", samples)
                .param("seed", cli.seed)
                .param("kind", if *trace { "trace" } else { "real" });
            for (i, p) in s.p_list.iter().enumerate() {
                let exact = if *trace {
                    if *p == 0 { (*n).to_string() } else { trace_moment(*n as u32, *p)?.to_string() }
                } else {
                    let (v, _) = ginoe_core::output::ball_strings(&moment_real_int(*n as u32, *p, &PrecisionContext::new(64)?)?.value.re, 64);
                    v
                };
                rec = rec.row(
                    Row::new()
                        .set("p", p)
                        .set("mean", format!("{:e}", s.means[i]))
                        .set("std_error", format!("{:e}", s.std_errors[i]))
                        .set("exact", exact),
                );
            }
            for (k, c) in s.count_histogram.iter().enumerate().filter(|(_, c)| **c > 0) {
                rec = rec.row(Row::new().set("real_count", k).set("samples", c));
            }
            if let Some(d) = &s.density {
                for i in 0..d.centers.len() {
                    rec = rec.row(
                        Row::new()
                            .set("x", format!("{:e}", d.centers[i]))
                            .set("density", format!("{:e}", d.density[i]))
                            .set("std_error", format!("{:e}", d.std_errors[i])),
                    );
                }
            }
            vec![rec.row(Row::new().set("failures", s.failures))]
        }
        Cmd::Verify { quick: _, full, only } => {
            let scale = if *full { Scale::Full } else { Scale::Quick };
            let checks = match only {
                Some(id) => vec![run_check(*id, scale)],
                None => run_all(scale),
            };
            let mut rec = Record::new("verify", bits).param("scale", if *full { "full" } else { "quick" });
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in checks {
                rec = rec.row(
                    Row::new()
                        .set("id", c.id)
                        .set("name", c.name)
                        .set("passed", c.passed)
                        .set("seconds", format!("{:.2}", c.seconds))
                        .set("detail", c.detail),
                );
            }
            let out = std::io::stdout();
            rec.write(cli.format, &mut out.lock())?;
            if failed > 0 {
                return Err(Error::Verification(format!("{failed} check(s) failed")));
            }
            Vec::new()
        }
    })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let stdout = std::io::stdout();
    let code = match run(&cli) {
        Ok(records) => {
            let mut out = stdout.lock();
            let mut code = 0;
            for r in records {
                if let Err(e) = r.write(cli.format, &mut out) {
                    eprintln!("{e}");
                    code = e.exit_code();
                }
            }
            code
        }
        Err(e) => {
            eprintln!("ginoe: {e}");
            let _ = write_error(&e, cli.format, &mut stdout.lock());
            e.exit_code()
        }
    };
    std::process::exit(code);
}
