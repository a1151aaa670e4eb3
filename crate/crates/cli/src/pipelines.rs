//! `check --config`: named pipelines over a JSON experiment config.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cstorus::cspath::{lcheck_op, lhat_op, wlo_rig, FieldSpaces, OuterIntegrand};
use cstorus::lie::{LevelData, LieData};
use cstorus::oscgauss::offdiag_block_reduce;
use cstorus::polycomplex::{JoinedComplex, PolyComplex, ProductComplex, Side};
use cstorus::ribbon::{regions, vertical_ribbon_faces, RibbonLink};
use cstorus::shadow::state_sum_report;

use crate::io::{check_schema, load_complex, load_link, resolve, write_json, Ambient, CliError, CliResult};
use crate::{link_summary, Global};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub schema: Option<String>,
    pub pipeline: Pipeline,
    /// Ambient complex (builtin name or file); defaults to the link's.
    #[serde(default)]
    pub complex: Option<String>,
    /// Complexes for `structure-tests`.
    #[serde(default)]
    pub complexes: Option<Vec<String>>,
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<u32>,
    /// Levels for `structure-tests`.
    #[serde(default)]
    pub levels: Option<Vec<u32>>,
    #[serde(default)]
    pub link: Option<String>,
    #[serde(default)]
    pub vertical: Option<VerticalSpec>,
    #[serde(default)]
    pub sigma0: Option<usize>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub samples_csv: Option<String>,
}

#[derive(Debug, Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    StructureTests,
    Shadow,
    Wlo,
    TheoremCheck,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerticalSpec {
    pub edges: Vec<usize>,
    pub colors: Vec<usize>,
}

pub fn run_experiment(path: &Path, g: &Global) -> CliResult<()> {
    if !path.exists() {
        return Err(CliError::input(format!("config file not found: {}", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read config: {e}")))?;
    let cfg: Config = serde_json::from_str(&text).map_err(|e| CliError::input(format!("config schema violation: {e}")))?;
    check_schema(cfg.schema.as_deref())?;
    let base = path.parent();
    let out = cfg.report.as_ref().map(|r| resolve(r, base));
    let tol = cfg.tol.unwrap_or(g.tol);
    let (report, ok) = match cfg.pipeline {
        Pipeline::StructureTests => structure_tests(&cfg, base, tol)?,
        Pipeline::Shadow => {
            let (amb, link) = config_link(&cfg, base)?;
            let k = need_k(&cfg)?;
            (shadow_part(&amb, &link, k)?, true)
        }
        Pipeline::Wlo => {
            let (amb, link) = config_link(&cfg, base)?;
            let k = need_k(&cfg)?;
            (wlo_part(&cfg, base, g, &amb, &link, k)?, true)
        }
        Pipeline::TheoremCheck => {
            let (amb, link) = config_link(&cfg, base)?;
            let k = need_k(&cfg)?;
            let sh = shadow_part(&amb, &link, k)?;
            let wl = wlo_part(&cfg, base, g, &amb, &link, k)?;
            let sr = pair(&sh["report"]["ratio"]);
            let wr = pair(&wl["report"]["ratio"]);
            let diff = ((sr[0] - wr[0]).powi(2) + (sr[1] - wr[1]).powi(2)).sqrt();
            let ok = diff <= tol;
            (
                json!({
                    "link": link_summary(&amb, &link)?,
                    "wlo_ratio": wr,
                    "shadow_ratio": sr,
                    "difference": diff,
                    "tol": tol,
                    "pass": ok,
                    "wlo": wl,
                    "shadow": sh,
                }),
                ok,
            )
        }
    };
    let mut report = report;
    report["schema"] = json!("v1");
    report["pipeline"] = serde_json::to_value(cfg.pipeline)?;
    write_json(out.as_deref(), &report)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::tolerance(format!("{:?} pipeline failed its tolerance checks", cfg.pipeline)))
    }
}

fn pair(v: &Value) -> [f64; 2] {
    [v[0].as_f64().unwrap_or(f64::NAN), v[1].as_f64().unwrap_or(f64::NAN)]
}

fn need_k(cfg: &Config) -> CliResult<u32> {
    cfg.k.ok_or_else(|| CliError::input("config needs \"k\""))
}

fn config_link(cfg: &Config, base: Option<&Path>) -> CliResult<(Ambient, RibbonLink)> {
    match (&cfg.link, &cfg.vertical) {
        (Some(l), None) => {
            let path = resolve(l, base);
            if !path.exists() {
                return Err(CliError::input(format!("link file not found: {}", path.display())));
            }
            let complex = cfg.complex.as_ref().map(|c| resolve_complex(c, base));
            load_link(&path, complex.as_deref(), cfg.n)
        }
        (None, Some(v)) => {
            let complex = cfg.complex.as_deref().ok_or_else(|| CliError::input("config needs \"complex\""))?;
            let n = cfg.n.ok_or_else(|| CliError::input("config needs \"N\""))?;
            let amb = Ambient::new(complex, base, n)?;
            if let Some(&e) = v.edges.iter().find(|&&e| e >= amb.jc.qk.count(1)) {
                return Err(CliError::input(format!("qK has no edge {e}")));
            }
            let faces: Vec<Vec<usize>> = v.edges.iter().map(|&e| vertical_ribbon_faces(&amb.pc, e)).collect();
            let link = RibbonLink::new(&amb.jc, &amb.pc, &faces, &v.colors, cfg.sigma0.unwrap_or(0))?;
            Ok((amb, link))
        }
        (None, None) => {
            let complex = cfg.complex.as_deref().ok_or_else(|| CliError::input("config needs \"complex\""))?;
            let n = cfg.n.ok_or_else(|| CliError::input("config needs \"N\""))?;
            let amb = Ambient::new(complex, base, n)?;
            let link = RibbonLink::empty(&amb.pc, cfg.sigma0.unwrap_or(0));
            Ok((amb, link))
        }
        (Some(_), Some(_)) => Err(CliError::input("config gives both \"link\" and \"vertical\"")),
    }
}

fn resolve_complex(c: &str, base: Option<&Path>) -> String {
    if cstorus::polycomplex::builtin::by_name(c).is_some() {
        c.to_string()
    } else {
        resolve(c, base).display().to_string()
    }
}

fn shadow_part(amb: &Ambient, link: &RibbonLink, k: u32) -> CliResult<Value> {
    let level = LevelData::<f64>::su2(k)?;
    let rd = regions(link, &amb.jc.qk)?;
    let data = rd.shadow_data();
    let (_, rep) = state_sum_report(&data, &level, 8)?;
    Ok(json!({ "k": k, "shadow_data": data, "report": rep }))
}

fn wlo_part(cfg: &Config, base: Option<&Path>, g: &Global, amb: &Ambient, link: &RibbonLink, k: u32) -> CliResult<Value> {
    let level = LevelData::<f64>::su2(k)?;
    let fs = FieldSpaces::new(&amb.jc, link.n, link.sigma0, LieData::su2())?;
    let direct = match cfg.mode.as_deref() {
        None | Some("poisson") => false,
        Some("direct") => true,
        Some(m) => return Err(CliError::input(format!("unknown mode '{m}'"))),
    };
    let opts = g.wlo_options(k, direct)?;
    if let Some(csv) = &cfg.samples_csv {
        let oi = OuterIntegrand::new(&fs, link, &level, opts.fp)?;
        let s = opts.s_schedule.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut text = String::from("x,re,im\n");
        for r in oi.samples(s, 256)? {
            text.push_str(&format!("{},{},{}\n", r[0], r[1], r[2]));
        }
        let p = resolve(csv, base);
        std::fs::write(&p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))?;
    }
    let rep = wlo_rig(&fs, link, &level, &opts)?;
    Ok(json!({ "k": k, "N": link.n, "sigma0": link.sigma0, "report": rep }))
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|m| row[m] * b[m][j]).sum()).collect())
        .collect()
}

fn dd_zero(cx: &PolyComplex) -> bool {
    (2..=cx.dim()).all(|p| {
        matmul(&cx.boundary_matrix(p - 1), &cx.boundary_matrix(p))
            .iter()
            .all(|r| r.iter().all(|&x| x == 0))
    })
}

fn structure_tests(cfg: &Config, base: Option<&Path>, tol: f64) -> CliResult<(Value, bool)> {
    let names = cfg.complexes.clone().unwrap_or_else(|| {
        ["tetrahedron", "cube", "icosahedron", "hex_torus:3x3"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    });
    let n = cfg.n.unwrap_or(2);
    let mut rows = Vec::new();
    let mut all = true;
    for name in &names {
        let cx = load_complex(name, base)?;
        let jc = JoinedComplex::from_base(cx.clone())?;
        let pc = ProductComplex::new(&jc.qk, n)?;
        let pair = &jc.pair;
        let e = pair.base.count(1);
        let star_square = (0..e).all(|i| {
            let d = pair.partner(Side::K1, 1, i);
            pair.star_sign(Side::K1, 1, i) * pair.star_sign(Side::K2, 1, d) == -1
        });
        let chi = cx.euler_characteristic();
        let mut checks = vec![
            ("dd_zero_k1", dd_zero(&pair.base)),
            ("dd_zero_k2", dd_zero(&pair.dual)),
            ("dd_zero_qk", dd_zero(&jc.qk)),
            ("dd_zero_product", dd_zero(&pc.complex)),
            ("euler_k2", pair.dual.euler_characteristic() == chi),
            ("euler_qk", jc.qk.euler_characteristic() == chi),
            ("euler_product", pc.complex.euler_characteristic() == 0),
            ("qk_faces_are_corners", jc.qk.count(2) == 2 * e),
            ("star_squares_to_minus_one", star_square),
        ];
        // the Mod2/Mod3 kernel of C is the constant line on spheres
        if chi == 2 {
            let fs = FieldSpaces::new(&jc, n, 0, LieData::<f64>::su2())?;
            let red = offdiag_block_reduce(&fs.coupling(3));
            checks.push(("ker_c_is_a_line", red.kernel_dim() == 1));
        }
        all &= checks.iter().all(|c| c.1);
        rows.push(json!({
            "complex": name,
            "checks": checks.iter().map(|(k, v)| json!({ "name": k, "pass": v })).collect::<Vec<_>>(),
        }));
    }
    let lie = LieData::<f64>::su2();
    let mut ops = Vec::new();
    for nn in [2usize, 3, 4] {
        let b = 0.7;
        let lh = lhat_op(&lie, b, nn);
        let lc = lcheck_op(&lie, b, nn);
        let adj = (lh.transpose() + &lc).norm();
        let pass = adj < 1e-12;
        all &= pass;
        ops.push(json!({ "N": nn, "check": "lhat_transpose_is_minus_lcheck", "residual": adj, "pass": pass }));
    }
    let mut levels = Vec::new();
    for &k in cfg.levels.as_deref().unwrap_or(&[3, 4, 5, 6, 7, 8]) {
        let level = LevelData::<f64>::su2(k)?;
        let m = level.n_colors();
        let mut unit = 0.0f64;
        let mut sym = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                let mut s = num_complex::Complex::new(0.0, 0.0);
                for c in 0..m {
                    s += level.s_entry(a, c) * level.s_entry(b, c).conj();
                }
                unit = unit.max((s - if a == b { 1.0 } else { 0.0 }).norm());
                sym = sym.max((level.s_entry(a, b) - level.s_entry(b, a)).norm());
            }
        }
        let mut verlinde = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    verlinde = verlinde.max((level.verlinde_sum(a, b, c) - level.fusion(a, b, c)? as f64).abs());
                }
            }
        }
        let pass = unit < tol.min(1e-10) && sym < 1e-12 && verlinde < 1e-9;
        all &= pass;
        levels.push(json!({ "k": k, "unitarity": unit, "symmetry": sym, "verlinde": verlinde, "pass": pass }));
    }
    Ok((json!({ "N": n, "complexes": rows, "operators": ops, "levels": levels, "all_pass": all }), all))
}
