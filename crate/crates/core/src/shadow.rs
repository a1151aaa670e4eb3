//! Turaev's shadow state sum for links without crossings, and the closed
//! Verlinde-type S-matrix sums used to cross-check it.
//!
//! A coloring assigns a level-k color to every region. Its weight is
//! `Π dim(φ(Y))^{χ(Y)} · Π twist(φ(Y))^{gleam(Y)} · Π_e N^{φ(Y⁻)}_{γ(e) φ(Y⁺)}`
//! times `S_{φ(Y)μ}/S_{φ(Y)0}` for every vertical component marked in `Y`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lie::{LevelData, LieError};
use crate::ribbon::{RegionDecomposition, RibbonLink};
use crate::{lit, polar, to_f64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShadowError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("region data is inconsistent: {0}")]
    Inconsistent(String),
    #[error("shadow and Verlinde sides differ by {diff:e} (tolerance {tol:e})")]
    Mismatch { diff: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowEdge {
    pub color: usize,
    pub plus: usize,
    pub minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowMark {
    pub color: usize,
    pub region: usize,
}

/// Region combinatorics of a link: all the state sum needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowData {
    pub chi: Vec<i64>,
    pub gleam: Vec<f64>,
    pub edges: Vec<ShadowEdge>,
    pub marks: Vec<ShadowMark>,
}

impl ShadowData {
    /// A closed surface of Euler characteristic `chi` with vertical
    /// components of the given colors and nothing else.
    pub fn vertical(chi: i64, colors: &[usize]) -> Self {
        ShadowData {
            chi: vec![chi],
            gleam: vec![0.0],
            edges: Vec::new(),
            marks: colors.iter().map(|&c| ShadowMark { color: c, region: 0 }).collect(),
        }
    }

    pub fn n_regions(&self) -> usize {
        self.chi.len()
    }

    fn check(&self) -> Result<(), ShadowError> {
        let n = self.n_regions();
        if self.gleam.len() != n {
            return Err(ShadowError::Inconsistent("one gleam per region".into()));
        }
        if n == 0 {
            return Err(ShadowError::Inconsistent("no regions".into()));
        }
        if self.edges.iter().any(|e| e.plus >= n || e.minus >= n) || self.marks.iter().any(|m| m.region >= n) {
            return Err(ShadowError::Inconsistent("region index out of range".into()));
        }
        Ok(())
    }
}

/// One coloring's factors, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ColoringTerm {
    pub colors: Vec<usize>,
    pub dims: f64,
    pub twist: [f64; 2],
    pub fusion: u64,
    pub vertical: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowReport {
    pub value: [f64; 2],
    pub empty: f64,
    pub ratio: [f64; 2],
    pub colorings_visited: u64,
    pub nonzero_colorings: u64,
    /// Partial sums by the color of region 0.
    pub by_first_color: Vec<[f64; 2]>,
    /// The first nonzero colorings with their factors.
    pub terms: Vec<ColoringTerm>,
}

struct Search<'a, T: Real> {
    data: &'a ShadowData,
    level: &'a LevelData<T>,
    /// edges whose later endpoint (in region order) is the key region
    closing: Vec<Vec<usize>>,
    keep_terms: usize,
}

struct Acc<T> {
    sum: Option<Complex<T>>,
    visited: u64,
    nonzero: u64,
    terms: Vec<ColoringTerm>,
}

impl<T> Default for Acc<T> {
    fn default() -> Self {
        Acc {
            sum: None,
            visited: 0,
            nonzero: 0,
            terms: Vec::new(),
        }
    }
}

impl<'a, T: Real> Search<'a, T> {
    fn new(data: &'a ShadowData, level: &'a LevelData<T>, keep_terms: usize) -> Self {
        let mut closing = vec![Vec::new(); data.n_regions()];
        for (i, e) in data.edges.iter().enumerate() {
            closing[e.plus.max(e.minus)].push(i);
        }
        Search {
            data,
            level,
            closing,
            keep_terms,
        }
    }

    fn region_factor(&self, y: usize, c: usize) -> (T, Complex<T>, T) {
        let d = self.level.dim(c).powi(self.data.chi[y] as i32);
        let arg = T::pi() * self.level.casimir(c) * lit(self.data.gleam[y]) / lit(self.level.k as f64);
        let tw = polar(T::one(), arg);
        let mut v = T::one();
        for m in self.data.marks.iter().filter(|m| m.region == y) {
            v *= self.level.s_entry(c, m.color).re / self.level.s_entry(c, 0).re;
        }
        (d, tw, v)
    }

    fn dfs(&self, colors: &mut Vec<usize>, acc: &mut Acc<T>, fusion: u64) {
        let y = colors.len();
        if y == self.data.n_regions() {
            acc.visited += 1;
            let mut dims = T::one();
            let mut tw = Complex::new(T::one(), T::zero());
            let mut vert = T::one();
            for (r, &c) in colors.iter().enumerate() {
                let (d, t, v) = self.region_factor(r, c);
                dims *= d;
                tw *= t;
                vert *= v;
            }
            let term = tw * dims * vert * lit::<T>(fusion as f64);
            acc.nonzero += 1;
            acc.sum = Some(acc.sum.unwrap_or(Complex::new(T::zero(), T::zero())) + term);
            if acc.terms.len() < self.keep_terms {
                acc.terms.push(ColoringTerm {
                    colors: colors.clone(),
                    dims: to_f64(dims),
                    twist: [to_f64(tw.re), to_f64(tw.im)],
                    fusion,
                    vertical: to_f64(vert),
                });
            }
            return;
        }
        for c in self.level.colors() {
            colors.push(c);
            let mut f = fusion;
            for &ei in &self.closing[y] {
                let e = self.data.edges[ei];
                let n = self
                    .level
                    .fusion(e.color, colors[e.plus], colors[e.minus])
                    .expect("colors are in range");
                f *= n as u64;
                if f == 0 {
                    break;
                }
            }
            if f == 0 {
                acc.visited += 1;
            } else {
                self.dfs(colors, acc, f);
            }
            colors.pop();
        }
    }
}

fn check_colors<T: Real>(data: &ShadowData, level: &LevelData<T>) -> Result<(), ShadowError> {
    data.check()?;
    for c in data.edges.iter().map(|e| e.color).chain(data.marks.iter().map(|m| m.color)) {
        level.fusion(c, 0, c)?;
    }
    Ok(())
}

/// The state sum with a breakdown, parallel over the color of region 0.
pub fn state_sum_report<T: Real>(
    data: &ShadowData,
    level: &LevelData<T>,
    keep_terms: usize,
) -> Result<(Complex<T>, ShadowReport), ShadowError> {
    check_colors(data, level)?;
    let search = Search::new(data, level, keep_terms);
    let parts: Vec<Acc<T>> = level
        .colors()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|c0| {
            let mut acc = Acc::default();
            let mut colors = vec![c0];
            let mut f = 1u64;
            for &ei in &search.closing[0] {
                let e = data.edges[ei];
                f *= level.fusion(e.color, c0, c0).expect("colors are in range") as u64;
            }
            if f == 0 {
                acc.visited += 1;
            } else {
                search.dfs(&mut colors, &mut acc, f);
            }
            acc
        })
        .collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut value = zero;
    let mut report = ShadowReport {
        value: [0.0; 2],
        empty: to_f64(empty_value(data, level)),
        ratio: [0.0; 2],
        colorings_visited: 0,
        nonzero_colorings: 0,
        by_first_color: Vec::new(),
        terms: Vec::new(),
    };
    for p in parts {
        let s = p.sum.unwrap_or(zero);
        value += s;
        report.colorings_visited += p.visited;
        report.nonzero_colorings += p.nonzero;
        report.by_first_color.push([to_f64(s.re), to_f64(s.im)]);
        for t in p.terms {
            if report.terms.len() < keep_terms {
                report.terms.push(t);
            }
        }
    }
    report.value = [to_f64(value.re), to_f64(value.im)];
    report.ratio = [report.value[0] / report.empty, report.value[1] / report.empty];
    Ok((value, report))
}

/// `|∅|` on the surface underlying `data`: `Σ_λ dim(λ)^{χ(Σ)}`.
fn empty_value<T: Real>(data: &ShadowData, level: &LevelData<T>) -> T {
    let chi: i64 = data.chi.iter().sum();
    level
        .colors()
        .fold(T::zero(), |acc, c| acc + level.dim(c).powi(chi as i32))
}

/// The state sum of raw region data.
pub fn state_sum<T: Real>(data: &ShadowData, level: &LevelData<T>) -> Result<Complex<T>, ShadowError> {
    Ok(state_sum_report(data, level, 0)?.0)
}

/// `|L|` of a validated link with its region decomposition.
pub fn shadow_invariant<T: Real>(
    link: &RibbonLink,
    regions: &RegionDecomposition,
    level: &LevelData<T>,
) -> Result<Complex<T>, ShadowError> {
    let data = regions.shadow_data();
    if data.edges.len() + data.marks.len() != link.len() {
        return Err(ShadowError::Inconsistent(format!(
            "{} ribbons but {} region edges and {} marks",
            link.len(),
            data.edges.len(),
            data.marks.len()
        )));
    }
    state_sum(&data, level)
}

/// `Σ_λ (Π_i S_{λμ_i}/S_{λ0}) S_{λ0}^χ`.
pub fn verlinde_partition<T: Real>(level: &LevelData<T>, chi: i64, marks: &[usize]) -> Result<T, ShadowError> {
    for &m in marks {
        level.fusion(m, 0, m)?;
    }
    Ok(level.colors().fold(T::zero(), |acc, l| {
        let s0 = level.s_entry(l, 0).re;
        let prod = marks
            .iter()
            .fold(T::one(), |p, &m| p * level.s_entry(l, m).re / s0);
        acc + prod * s0.powi(chi as i32)
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerlindeReport {
    pub colors: Vec<usize>,
    pub shadow_ratio: f64,
    pub verlinde_ratio: f64,
    pub difference: f64,
}

/// `|L|/|∅|` for vertical components on S² against the closed S-matrix sum.
pub fn shadow_vs_verlinde<T: Real>(
    level: &LevelData<T>,
    colors: &[usize],
    tol: f64,
) -> Result<VerlindeReport, ShadowError> {
    let data = ShadowData::vertical(2, colors);
    let empty = ShadowData::vertical(2, &[]);
    let shadow_ratio = to_f64(state_sum(&data, level)?.re) / to_f64(state_sum(&empty, level)?.re);
    let verlinde_ratio = to_f64(verlinde_partition(level, 2, colors)?) / to_f64(verlinde_partition(level, 2, &[])?);
    let difference = (shadow_ratio - verlinde_ratio).abs();
    if difference > tol {
        return Err(ShadowError::Mismatch { diff: difference, tol });
    }
    Ok(VerlindeReport {
        colors: colors.to_vec(),
        shadow_ratio,
        verlinde_ratio,
        difference,
    })
}
