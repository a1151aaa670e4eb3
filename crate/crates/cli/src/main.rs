//! `cstorus`: command-line driver for the torus-gauge Chern–Simons toolkit.

mod io;
mod pipelines;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cstorus::cspath::{wlo_rig, FieldSpaces, FpFactor, OuterIntegrand, WloOptions, YMode, DEFAULT_Y_CUTOFF};
use cstorus::lie::{LevelData, LieData};
use cstorus::polycomplex::JoinedComplex;
use cstorus::ribbon::{lift_ribbon, regions, vertical_ribbon_faces, LinkDescription, RibbonClass, RibbonLink};
use cstorus::shadow::state_sum_report;

use crate::io::{load_complex, load_link, write_json, Ambient, CliError, CliResult};

#[derive(Parser)]
#[command(name = "cstorus", version, about = "Torus-gauge Chern–Simons path integrals and shadow invariants")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance for cross-checks and theorem comparisons.
    #[arg(long, global = true, default_value_t = 1e-3)]
    tol: f64,
    /// Mollifier widths, comma separated, extrapolated to s = 0.
    #[arg(long, global = true, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05])]
    s_schedule: Vec<f64>,
    /// Direct-mode cutoff |y| ≤ c at the largest s (doubled for the stability check).
    #[arg(long, global = true, default_value_t = DEFAULT_Y_CUTOFF)]
    y_cutoff: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and export cell complexes.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Level-k data of the structure group.
    #[command(subcommand)]
    Lie(LieCmd),
    /// Build and validate ribbon links.
    #[command(subcommand)]
    Link(LinkCmd),
    /// Shadow state sum of a link.
    #[command(subcommand)]
    Shadow(ShadowCmd),
    /// Discrete Wilson-loop ratio.
    #[command(subcommand)]
    Wlo(WloCmd),
    /// Run an experiment config (structure-tests, shadow, wlo, theorem-check).
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum ComplexCmd {
    /// Cell counts and Euler characteristics of K1, K2, qK and qK × Z_N.
    Show {
        #[arg(long)]
        complex: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Write the JSON description of a complex (K1 or qK).
    Export {
        #[arg(long)]
        complex: String,
        /// Export qK instead of K1.
        #[arg(long)]
        joined: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LieCmd {
    /// S-matrix, dimensions, twists and fusion table.
    Dump {
        #[arg(long, default_value = "su2")]
        group: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LinkCmd {
    /// Validate a link file and print its projection data and regions.
    Validate {
        #[arg(long)]
        link: PathBuf,
        #[arg(long)]
        complex: Option<String>,
    },
    /// Link of vertical ribbons `edge × Z_N` over the given qK edges.
    Vertical {
        #[arg(long)]
        complex: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<usize>,
        #[arg(long)]
        sigma0: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One ribbon lifted from a closed strip of qK faces with S¹-winding.
    Lift {
        #[arg(long)]
        complex: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        strip: Vec<usize>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        winding: i64,
        #[arg(long, default_value_t = 0)]
        t0: usize,
        #[arg(long)]
        color: usize,
        #[arg(long)]
        sigma0: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ShadowCmd {
    /// `|L|` and `|L|/|∅|` with per-factor breakdowns.
    Eval {
        #[arg(long)]
        link: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        complex: Option<String>,
        /// Number of nonzero colorings to list with their factors.
        #[arg(long, default_value_t = 16)]
        terms: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Direct,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fp {
    Signed,
    Abs,
    Full,
}

#[derive(Subcommand)]
enum WloCmd {
    /// `WLO_rig(L)` as numerator/denominator with diagnostics.
    Eval {
        #[arg(long)]
        link: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Poisson)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Fp::Signed)]
        fp: Fp,
        #[arg(long)]
        report: Option<PathBuf>,
        /// CSV of numerator integrand samples along the kernel line.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        sample_count: usize,
    },
}

impl Global {
    pub fn wlo_options(&self, k: u32, direct: bool) -> CliResult<WloOptions> {
        if self.s_schedule.is_empty() || self.s_schedule.iter().any(|&s| s <= 0.0) {
            return Err(CliError::input("--s-schedule needs positive widths"));
        }
        if self.y_cutoff == 0 {
            return Err(CliError::input("--y-cutoff must be positive"));
        }
        let mut o = WloOptions::new(k);
        o.s_schedule = self.s_schedule.clone();
        o.tol = self.tol.min(1e-4);
        if direct {
            o = o.direct(self.y_cutoff);
        }
        Ok(o)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(io::EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Complex(ComplexCmd::Show { complex, n }) => {
            let amb = Ambient::new(complex, None, *n)?;
            let counts = |cx: &cstorus::polycomplex::PolyComplex| {
                json!({ "counts": cx.counts(), "euler_characteristic": cx.euler_characteristic() })
            };
            write_json(
                None,
                &json!({
                    "schema": "v1",
                    "complex": complex,
                    "N": n,
                    "k1": counts(&amb.jc.pair.base),
                    "k2": counts(&amb.jc.pair.dual),
                    "qk": counts(&amb.jc.qk),
                    "product": { "counts": amb.pc.complex.counts() },
                }),
            )
        }
        Command::Complex(ComplexCmd::Export { complex, joined, out }) => {
            let cx = load_complex(complex, None)?;
            let d = if *joined {
                JoinedComplex::from_base(cx)?.qk.to_description()
            } else {
                cx.to_description()
            };
            write_json(out.as_deref(), &serde_json::to_value(d)?)
        }
        Command::Lie(LieCmd::Dump { group, k, out }) => {
            if group != "su2" {
                return Err(CliError::input(format!("group '{group}' is not wired (only su2)")));
            }
            let level = LevelData::<f64>::su2(*k)?;
            write_json(out.as_deref(), &level.to_json())
        }
        Command::Link(LinkCmd::Validate { link, complex }) => {
            let (amb, l) = load_link(link, complex.as_deref(), None)?;
            write_json(None, &link_summary(&amb, &l)?)
        }
        Command::Link(LinkCmd::Vertical {
            complex,
            n,
            edges,
            colors,
            sigma0,
            out,
        }) => {
            let amb = Ambient::new(complex, None, *n)?;
            if let Some(&e) = edges.iter().find(|&&e| e >= amb.jc.qk.count(1)) {
                return Err(CliError::input(format!("qK has no edge {e}")));
            }
            let faces: Vec<Vec<usize>> = edges.iter().map(|&e| vertical_ribbon_faces(&amb.pc, e)).collect();
            let l = RibbonLink::new(&amb.jc, &amb.pc, &faces, colors, *sigma0)?;
            let d = LinkDescription::from_link(&l, complex, &amb.pc);
            write_json(out.as_deref(), &serde_json::to_value(d)?)
        }
        Command::Link(LinkCmd::Lift {
            complex,
            n,
            strip,
            winding,
            t0,
            color,
            sigma0,
            out,
        }) => {
            let amb = Ambient::new(complex, None, *n)?;
            let faces = lift_ribbon(&amb.pc, &amb.jc.qk, strip, *winding, *t0)?;
            let l = RibbonLink::new(&amb.jc, &amb.pc, &[faces], &[*color], *sigma0)?;
            let d = LinkDescription::from_link(&l, complex, &amb.pc);
            write_json(out.as_deref(), &serde_json::to_value(d)?)
        }
        Command::Shadow(ShadowCmd::Eval {
            link,
            k,
            complex,
            terms,
            report,
        }) => {
            let (amb, l) = load_link(link, complex.as_deref(), None)?;
            let level = LevelData::<f64>::su2(*k)?;
            let rd = regions(&l, &amb.jc.qk)?;
            let data = rd.shadow_data();
            let (_, rep) = state_sum_report(&data, &level, *terms)?;
            write_json(
                report.as_deref(),
                &json!({ "schema": "v1", "k": k, "shadow_data": data, "report": rep }),
            )
        }
        Command::Wlo(WloCmd::Eval {
            link,
            k,
            complex,
            n,
            mode,
            fp,
            report,
            samples,
            sample_count,
        }) => {
            let (amb, l) = load_link(link, complex.as_deref(), *n)?;
            let level = LevelData::<f64>::su2(*k)?;
            let fs = FieldSpaces::new(&amb.jc, l.n, l.sigma0, LieData::su2())?;
            let mut opts = g.wlo_options(*k, matches!(mode, Mode::Direct))?;
            opts.fp = match fp {
                Fp::Signed => FpFactor::SignedRoot,
                Fp::Abs => FpFactor::AbsRoot,
                Fp::Full => FpFactor::Full,
            };
            if let Some(path) = samples {
                let oi = OuterIntegrand::new(&fs, &l, &level, opts.fp)?;
                let s = opts.s_schedule.iter().cloned().fold(f64::INFINITY, f64::min);
                let rows = oi.samples(s, *sample_count)?;
                let mut csv = String::from("x,re,im\n");
                for r in rows {
                    csv.push_str(&format!("{},{},{}\n", r[0], r[1], r[2]));
                }
                std::fs::write(path, csv).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            }
            let rep = wlo_rig(&fs, &l, &level, &opts)?;
            let mode_name = match rep.mode {
                YMode::Direct { .. } => "direct",
                YMode::Poisson => "poisson",
            };
            write_json(
                report.as_deref(),
                &json!({
                    "schema": "v1",
                    "ambient": amb.name,
                    "k": k,
                    "N": l.n,
                    "sigma0": l.sigma0,
                    "mode": mode_name,
                    "fp": opts.fp,
                    "s_schedule": opts.s_schedule,
                    "report": rep,
                }),
            )
        }
        Command::Check { config } => pipelines::run_experiment(config, g),
    }
}

/// Projection classes, windings and the region decomposition of a link.
pub fn link_summary(amb: &Ambient, l: &RibbonLink) -> CliResult<serde_json::Value> {
    let rd = regions(l, &amb.jc.qk)?;
    let ribbons: Vec<serde_json::Value> = l
        .projections
        .iter()
        .zip(&l.colors)
        .zip(&l.ribbons)
        .map(|((p, c), r)| {
            let class = match p.class {
                RibbonClass::Generic => json!({ "kind": "generic", "sigma_faces": p.sigma.as_ref().map(|s| s.faces.clone()) }),
                RibbonClass::Vertical { edge } => json!({ "kind": "vertical", "edge": edge }),
            };
            json!({ "faces": r.faces, "color": c, "class": class, "winding": p.winding })
        })
        .collect();
    Ok(json!({
        "schema": "v1",
        "ambient": amb.name,
        "N": l.n,
        "sigma0": l.sigma0,
        "valid": true,
        "ribbons": ribbons,
        "regions": rd.regions.iter().map(|r| json!({ "faces": r.faces, "chi": r.chi, "gleam": r.gleam })).collect::<Vec<_>>(),
        "shadow_data": rd.shadow_data(),
    }))
}
