//! Configuration-driven command-line front end producing JSON reports and
//! CSV curve dumps.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 resource or convergence
//! error, 4 hard identity-gate failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use torsionlab::closed_forms;
use torsionlab::error::Error;
use torsionlab::heat_trace::{self, HeatCurve, SpectrumCurve};
use torsionlab::report::{self, ConfigValue};
use torsionlab::spectra::{self, GroupTag, KConvention};
use torsionlab::torsion::{self, QuadratureSpec, Route, TorsionReport};
use torsionlab::zeta_reg;

#[derive(Parser)]
#[command(
    name = "torsionlab",
    about = "Localized and relative analytic torsion for the line and the Heisenberg group",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Torsion quantities as JSON reports.
    #[command(subcommand)]
    Torsion(TorsionCmd),
    /// Spectrum branch dumps as CSV.
    Spectrum(SpectrumArgs),
    /// Heat-curve dumps as CSV.
    Heat(HeatArgs),
    /// Closed-form versus engine validation grid.
    Zeta(ZetaArgs),
}

#[derive(Subcommand)]
enum TorsionCmd {
    /// Analytic torsion of the twisted circle.
    Circle(CircleArgs),
    /// Localized torsion of the line or the Heisenberg group.
    Local(LocalArgs),
    /// Relative torsion of the pair (group, integer lattice).
    Relative(RelativeArgs),
    /// Engine-regularized torsion of the lattice quotient N.
    NQuotient(AlphaArgs),
    /// Spectral asymmetry E(H_red, alpha).
    Asymmetry(AlphaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    R,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Closed,
    Engine,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum KConvArg {
    #[value(name = "2pi")]
    TwoPi,
    Bare,
}

impl From<KConvArg> for KConvention {
    fn from(v: KConvArg) -> Self {
        match v {
            KConvArg::TwoPi => KConvention::TwoPi,
            KConvArg::Bare => KConvention::Bare,
        }
    }
}

#[derive(Args)]
struct CircleArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "both")]
    route: RouteArg,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long, value_enum)]
    group: GroupArg,
    #[arg(long, allow_hyphen_values = true)]
    h: f64,
    #[arg(long, value_enum, default_value = "both")]
    route: RouteArg,
    #[arg(long, value_enum, default_value = "2pi")]
    k_convention: KConvArg,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RelativeArgs {
    #[arg(long, value_enum)]
    group: GroupArg,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "2pi")]
    k_convention: KConvArg,
    #[arg(long, default_value_t = 64)]
    alpha_grid: usize,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "2pi")]
    k_convention: KConvArg,
    #[arg(long, default_value_t = 1.0)]
    split: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(subcommand)]
    action: SpectrumAction,
}

#[derive(Subcommand)]
enum SpectrumAction {
    /// Emit branches of a catalog family as CSV.
    Dump(SpectrumDumpArgs),
}

#[derive(Args)]
struct SpectrumDumpArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Representation parameter: h for localized families, alpha for quotients.
    #[arg(long, allow_hyphen_values = true)]
    param: f64,
    #[arg(long, default_value_t = 0)]
    degree: u8,
    /// Eigenvalues listed per branch.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, value_enum, default_value = "2pi")]
    k_convention: KConvArg,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Circle,
    RLocal,
    HLocal,
    Hred,
    NQuotient,
}

#[derive(Args)]
struct HeatArgs {
    #[command(subcommand)]
    action: HeatAction,
}

#[derive(Subcommand)]
enum HeatAction {
    /// Emit the graded heat trace of a family over a time grid as CSV.
    Dump(HeatDumpArgs),
}

#[derive(Args)]
struct HeatDumpArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_hyphen_values = true)]
    param: f64,
    /// Geometric time grid LO:HI:N.
    #[arg(long)]
    t_grid: String,
    #[arg(long, value_enum, default_value = "2pi")]
    k_convention: KConvArg,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ZetaArgs {
    #[command(subcommand)]
    action: ZetaAction,
}

#[derive(Subcommand)]
enum ZetaAction {
    /// Run the closed-form versus engine validation grid.
    Check(ZetaCheckArgs),
}

#[derive(Args)]
struct ZetaCheckArgs {
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error path with exit 0
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(1);
                }
            }
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("TORSIONLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), Error> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Domain(format!("cannot write output: {e}")))
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Domain(format!("cannot write {path}: {e}"))),
    }
}

fn base_config(spec: &QuadratureSpec) -> Vec<(String, ConfigValue)> {
    vec![
        ("delta".into(), ConfigValue::Num(spec.delta)),
        ("epsilon".into(), ConfigValue::Num(spec.epsilon)),
        ("abs_tol".into(), ConfigValue::Num(spec.abs_tol)),
        ("rel_tol".into(), ConfigValue::Num(spec.rel_tol)),
        ("alpha_grid".into(), ConfigValue::Int(spec.alpha_grid as i64)),
        (
            "k_convention".into(),
            ConfigValue::Str(spec.k_convention.name().into()),
        ),
        ("split".into(), ConfigValue::Num(spec.split)),
        ("deterministic".into(), ConfigValue::Bool(true)),
    ]
}

fn print_report(
    r: &TorsionReport,
    spec: &QuadratureSpec,
    extra: Vec<(String, ConfigValue)>,
    out: &Option<String>,
) -> Result<(), Error> {
    let mut cfg = base_config(spec);
    cfg.extend(extra);
    let json = report::report_to_json(r, &cfg);
    emit(out, &format!("{json}\n"))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Torsion(t) => run_torsion(t),
        Command::Spectrum(s) => match s.action {
            SpectrumAction::Dump(a) => spectrum_dump(a),
        },
        Command::Heat(h) => match h.action {
            HeatAction::Dump(a) => heat_dump(a),
        },
        Command::Zeta(z) => match z.action {
            ZetaAction::Check(a) => zeta_check(a),
        },
    }
}

fn run_torsion(cmd: TorsionCmd) -> Result<(), Error> {
    match cmd {
        TorsionCmd::Circle(a) => {
            let spec = QuadratureSpec::default();
            let mut r = torsion::torsion_circle_report(a.alpha, &spec)?;
            shape_route(&mut r, a.route);
            print_report(
                &r,
                &spec,
                vec![
                    ("command".into(), ConfigValue::Str("torsion circle".into())),
                    ("alpha".into(), ConfigValue::Num(a.alpha)),
                ],
                &a.out,
            )
        }
        TorsionCmd::Local(a) => {
            let spec = QuadratureSpec {
                k_convention: a.k_convention.into(),
                ..QuadratureSpec::default()
            };
            let group = match a.group {
                GroupArg::R => GroupTag::RLocal,
                GroupArg::H => GroupTag::HLocal,
            };
            let mut r = torsion::localized_torsion(group, a.h, &spec)?;
            shape_route(&mut r, a.route);
            print_report(
                &r,
                &spec,
                vec![
                    ("command".into(), ConfigValue::Str("torsion local".into())),
                    ("h".into(), ConfigValue::Num(a.h)),
                ],
                &a.out,
            )
        }
        TorsionCmd::Relative(a) => {
            let spec = QuadratureSpec {
                delta: a.delta,
                epsilon: a.epsilon,
                alpha_grid: a.alpha_grid,
                k_convention: a.k_convention.into(),
                ..QuadratureSpec::default()
            };
            let r = match a.group {
                GroupArg::R => {
                    let dec = torsion::relative_torsion_r(&spec)?;
                    let lott = torsion::lott_relative_torsion(GroupTag::RLocal, &spec)?;
                    let mut merged = dec.clone();
                    merged
                        .components
                        .push(("lott_route".into(), lott.value));
                    merged
                        .discrepancies
                        .push(("delta_vs_lott".into(), (dec.value - lott.value).abs()));
                    merged
                }
                GroupArg::H => torsion::relative_torsion_h(&spec)?,
            };
            print_report(
                &r,
                &spec,
                vec![(
                    "command".into(),
                    ConfigValue::Str("torsion relative".into()),
                )],
                &a.out,
            )
        }
        TorsionCmd::NQuotient(a) => {
            let spec = QuadratureSpec {
                k_convention: a.k_convention.into(),
                split: a.split,
                ..QuadratureSpec::default()
            };
            let r = torsion::torsion_n(a.alpha, &spec)?;
            print_report(
                &r,
                &spec,
                vec![
                    (
                        "command".into(),
                        ConfigValue::Str("torsion n-quotient".into()),
                    ),
                    ("alpha".into(), ConfigValue::Num(a.alpha)),
                ],
                &a.out,
            )
        }
        TorsionCmd::Asymmetry(a) => {
            let spec = QuadratureSpec {
                k_convention: a.k_convention.into(),
                split: a.split,
                ..QuadratureSpec::default()
            };
            let r = torsion::asymmetry_e(a.alpha, &spec)?;
            print_report(
                &r,
                &spec,
                vec![
                    (
                        "command".into(),
                        ConfigValue::Str("torsion asymmetry".into()),
                    ),
                    ("alpha".into(), ConfigValue::Num(a.alpha)),
                ],
                &a.out,
            )
        }
    }
}

/// Rearrange a both-routes report when a single route was requested.
fn shape_route(r: &mut TorsionReport, route: RouteArg) {
    match route {
        RouteArg::Both => {}
        RouteArg::Closed => {
            r.route = Route::Closed;
            r.discrepancies.clear();
        }
        RouteArg::Engine => {
            if let Some((_, engine)) = r.components.iter().find(|(n, _)| n == "engine") {
                r.value = *engine;
            }
            r.route = Route::Engine;
            r.discrepancies.clear();
        }
    }
}

fn family_spectrum(
    family: FamilyArg,
    param: f64,
    degree: u8,
    conv: KConvention,
) -> Result<spectra::SpectrumFamily, Error> {
    match family {
        FamilyArg::Circle => spectra::circle_spectrum(param, degree),
        FamilyArg::RLocal => spectra::r_local_spectrum(param, degree),
        FamilyArg::HLocal => spectra::h_local_spectrum(param, degree),
        FamilyArg::Hred => spectra::hred_spectrum(param, degree, conv),
        FamilyArg::NQuotient => spectra::n_quotient_spectrum(param, degree, conv),
    }
}

fn spectrum_dump(a: SpectrumDumpArgs) -> Result<(), Error> {
    let fam = family_spectrum(a.family, a.param, a.degree, a.k_convention.into())?;
    let csv = report::spectrum_to_csv(&fam, a.count);
    emit(&a.out, &csv)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Domain(format!("t-grid must be LO:HI:N, got {s}")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid start {}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid end {}", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Domain(format!("bad grid count {}", parts[2])))?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::Domain("grid needs 0 < LO < HI and N >= 2".into()));
    }
    let lr = (hi / lo).ln();
    Ok((0..n)
        .map(|i| lo * (lr * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn heat_dump(a: HeatDumpArgs) -> Result<(), Error> {
    let conv: KConvention = a.k_convention.into();
    let ts = parse_grid(&a.t_grid)?;
    let rows: Result<Vec<(f64, f64, f64)>, Error> = match a.family {
        FamilyArg::NQuotient => ts
            .iter()
            .map(|&t| {
                let s = torsion::theta_n_eval(a.param, conv, t, 1e-12)?;
                Ok((t, s.value, s.trunc_error))
            })
            .collect(),
        _ => {
            let tag = match a.family {
                FamilyArg::Circle => GroupTag::Circle,
                FamilyArg::RLocal => GroupTag::RLocal,
                FamilyArg::HLocal => GroupTag::HLocal,
                FamilyArg::Hred => GroupTag::Hred,
                FamilyArg::NQuotient => unreachable!(),
            };
            let g = spectra::graded(tag, a.param, conv)?;
            let curve = SpectrumCurve { graded: g };
            ts.iter()
                .map(|&t| {
                    let s = curve.eval(t, 1e-12)?;
                    Ok((t, s.value, s.trunc_error))
                })
                .collect()
        }
    };
    emit(&a.out, &report::heat_to_csv(&rows?))
}

struct CheckRow {
    name: String,
    closed0: f64,
    engine0: f64,
    closed1: f64,
    engine1: f64,
}

impl CheckRow {
    fn pass(&self) -> bool {
        (self.closed0 - self.engine0).abs() <= 1e-3 && (self.closed1 - self.engine1).abs() <= 1e-3
    }
}

fn zeta_check(a: ZetaCheckArgs) -> Result<(), Error> {
    let spec = QuadratureSpec::default();
    let mut rows: Vec<CheckRow> = Vec::new();

    // isolated eigenvalue
    {
        let lambda = 3.0;
        let curve = heat_trace::FnCurve {
            f: move |t: f64| (-lambda * t).exp(),
            desc: "isolated".into(),
            decay: heat_trace::Decay::Exponential { rate: lambda },
        };
        let exp = zeta_reg::fit_small_t(&curve, &zeta_reg::integer_ladder(0, 6), (5e-4, 0.05), 48)?;
        let z = zeta_reg::mellin_zeta_at0(&curve, &exp, spec.split)?;
        rows.push(CheckRow {
            name: "isolated lambda=3".into(),
            closed0: 1.0,
            engine0: z.value_at_0,
            closed1: -(3.0f64.ln()),
            engine1: z.deriv_at_0,
        });
    }

    // circle grid
    for &alpha in &[0.25, 0.5, 0.75] {
        let r = torsion::torsion_circle_report(alpha, &spec)?;
        let engine = r.components.iter().find(|(n, _)| n == "engine").unwrap().1;
        let zero = r
            .components
            .iter()
            .find(|(n, _)| n == "engine_zeta0")
            .unwrap()
            .1;
        rows.push(CheckRow {
            name: format!("circle alpha={alpha}"),
            closed0: 0.0,
            engine0: zero,
            closed1: r.value,
            engine1: engine,
        });
    }

    // degree-zero Heisenberg family (arithmetic branch) for k grid
    for &k in &[0.5, 1.0, 2.0] {
        let fam = spectra::h_branches_for_k(k, 0, 1, "")?;
        let g = spectra::SpectrumFamily {
            tag: GroupTag::HLocal,
            degree: 0,
            parameter: k,
            branches: fam,
        };
        let curve = BranchFamilyCurve { fam: g, rate: k + k * k };
        let exp = zeta_reg::fit_small_t(
            &curve,
            &zeta_reg::integer_ladder(-1, 6),
            fit_window_for(k),
            48,
        )?;
        let z = zeta_reg::mellin_zeta_at0(&curve, &exp, spec.split)?;
        rows.push(CheckRow {
            name: format!("t0 family k={k}"),
            closed0: closed_forms::t0_at0(k)?,
            engine0: z.value_at_0,
            closed1: closed_forms::t0_ds0(k)?,
            engine1: z.deriv_at_0,
        });
    }

    // z family: arithmetic branch with offset c = k^2 + 1/4
    for &k in &[0.5, 1.0, 2.0] {
        let b = spectra::Branch::new(spectra::BranchKind::Arithmetic, k, k * k + 0.25, 1, "z")?;
        let g = spectra::SpectrumFamily {
            tag: GroupTag::HLocal,
            degree: 0,
            parameter: k,
            branches: vec![b],
        };
        let curve = BranchFamilyCurve { fam: g, rate: k + k * k + 0.25 };
        let exp = zeta_reg::fit_small_t(
            &curve,
            &zeta_reg::integer_ladder(-1, 6),
            fit_window_for(k),
            48,
        )?;
        let z = zeta_reg::mellin_zeta_at0(&curve, &exp, spec.split)?;
        rows.push(CheckRow {
            name: format!("z family k={k}"),
            closed0: closed_forms::z_at0(k)?,
            engine0: z.value_at_0,
            closed1: closed_forms::z_ds0(k)?,
            engine1: z.deriv_at_0,
        });
    }

    // graded Heisenberg at the k grid
    for &k in &[0.5, 1.0, 2.0] {
        let h = k / std::f64::consts::TAU;
        let r = torsion::localized_torsion(GroupTag::HLocal, h, &spec)?;
        let engine = r.components.iter().find(|(n, _)| n == "engine").unwrap().1;
        let zero = r
            .components
            .iter()
            .find(|(n, _)| n == "engine_zeta0")
            .unwrap()
            .1;
        rows.push(CheckRow {
            name: format!("h-local graded k={k}"),
            closed0: 2.0,
            engine0: zero,
            closed1: r.value,
            engine1: engine,
        });
    }

    let mut table = String::new();
    table.push_str(&format!(
        "{:<24} {:>14} {:>14} {:>14} {:>14} {:>6}\n",
        "spectrum", "zeta0 closed", "zeta0 engine", "zeta'0 closed", "zeta'0 engine", "pass"
    ));
    let mut all_pass = true;
    for row in &rows {
        all_pass &= row.pass();
        table.push_str(&format!(
            "{:<24} {:>14.9} {:>14.9} {:>14.9} {:>14.9} {:>6}\n",
            row.name,
            row.closed0,
            row.engine0,
            row.closed1,
            row.engine1,
            if row.pass() { "ok" } else { "FAIL" }
        ));
    }

    let mut json = String::from("{\"check\":\"zeta\",\"tolerance\":1.0000000000000000e-3,\"rows\":[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            json.push(',');
        }
        json.push_str(&format!(
            "{{\"name\":\"{}\",\"zeta0_closed\":{},\"zeta0_engine\":{},\"deriv_closed\":{},\"deriv_engine\":{},\"pass\":{}}}",
            row.name,
            report::fmt_f64(row.closed0),
            report::fmt_f64(row.engine0),
            report::fmt_f64(row.closed1),
            report::fmt_f64(row.engine1),
            row.pass()
        ));
    }
    json.push_str(&format!("],\"all_pass\":{all_pass}}}\n"));

    let text = format!("{table}{json}");
    emit(&a.out, &text)?;
    if all_pass {
        Ok(())
    } else {
        Err(Error::Resource {
            context: "zeta check grid".into(),
            best_value: 0.0,
            best_bound: 1.0,
        })
    }
}

fn fit_window_for(k: f64) -> (f64, f64) {
    let hi = (0.05f64).min(0.5 / ((1.0 + k) * (1.0 + k)));
    (hi / 60.0, hi)
}

struct BranchFamilyCurve {
    fam: spectra::SpectrumFamily,
    rate: f64,
}

impl HeatCurve for BranchFamilyCurve {
    fn eval(&self, t: f64, tol: f64) -> Result<heat_trace::HeatSample, Error> {
        heat_trace::local_heat_trace(&self.fam, t, tol)
    }
    fn descriptor(&self) -> String {
        "branch family".into()
    }
    fn decay(&self) -> heat_trace::Decay {
        heat_trace::Decay::Exponential { rate: self.rate }
    }
}
