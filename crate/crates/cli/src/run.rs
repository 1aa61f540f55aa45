//! Executes one resolved configuration and assembles its report.

use anyhow::{Context, Result};
use lmoments::lab::{
    lemma21_from, lemma22_from, prop24_check, prop25_from, prop26_check, sweep_row, twisted_general, twisted_main_from,
    InequalityReport, MainTermForm, TwistPair,
};
use lmoments::lfunction::{afe_error_profile, l_all};
use lmoments::{Complex64, CriticalPoint, LVector, Method, MollifierParams, PrimeModulus, WindowMode};
use rayon::prelude::*;

use crate::config::{MainForm, MethodArg, RunConfig, Subcommand, WindowModeArg};
use crate::report::{complex, Cell, Report};

const MOMENTS: &[&str] = &["q", "k", "t", "moment", "normalizer", "ratio"];
const SWEEP: &[&str] = &["q", "k", "t", "moment", "normalizer", "ratio", "admissible", "error"];
const LEMMA21: &[&str] = &[
    "q", "k", "t", "window_mode", "windows", "lhs_re", "lhs_im", "lhs_abs", "factor_a", "exp_a", "factor_b", "exp_b",
    "factor_c", "exp_c", "rhs", "slack_ratio", "holds",
];
const LEMMA22: &[&str] = &[
    "q", "k", "t", "window_mode", "windows", "lhs", "factor_a", "exp_a", "factor_b", "exp_b", "rhs", "constant",
    "slack_ratio", "holds",
];
const TWISTED: &[&str] = &[
    "q", "t", "h", "b", "form", "lhs_re", "lhs_im", "s1_re", "s1_im", "s2_re", "s2_im", "main_re", "main_im",
    "abs_deviation", "rel_deviation", "error_budget",
];
const TWISTED_GENERAL: &[&str] = &[
    "q", "h", "b", "s_re", "s_im", "s_prime_re", "s_prime_im", "lhs_re", "lhs_im", "main_re", "main_im",
    "abs_deviation", "rel_deviation",
];
const PROP24: &[&str] = &[
    "q", "k", "t", "window_mode", "windows", "x_len", "lhs_re", "lhs_im", "diagonal", "off_diagonal_re",
    "off_diagonal_im", "normalizer", "diagonal_ratio", "lhs_ratio",
];
const PROP25: &[&str] = &[
    "q", "k", "t", "window_mode", "v", "ell_next", "support", "direct", "normalizer", "ratio", "coefficient_sum",
    "ln_scale", "predicted_re", "predicted_im",
];
const PROP26: &[&str] = &[
    "q", "k", "t", "window_mode", "windows", "product_sum", "capped_sum", "normalizer", "product_ratio", "capped_ratio",
];
const AFE_PROFILE: &[&str] = &["q", "t", "x", "median_error", "empirical_constant", "slope"];

/// The fixed column set of a subcommand.
pub fn columns(subcommand: Subcommand) -> &'static [&'static str] {
    match subcommand {
        Subcommand::Moments => MOMENTS,
        Subcommand::Sweep => SWEEP,
        Subcommand::Lemma21 => LEMMA21,
        Subcommand::Lemma22 => LEMMA22,
        Subcommand::Twisted => TWISTED,
        Subcommand::TwistedGeneral => TWISTED_GENERAL,
        Subcommand::Prop24 => PROP24,
        Subcommand::Prop25 => PROP25,
        Subcommand::Prop26 => PROP26,
        Subcommand::AfeProfile => AFE_PROFILE,
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    /// Some inequality check came out with `holds = false`.
    pub violation: bool,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().context("cannot start worker pool")?;
    pool.install(|| Runner::new(cfg).and_then(|r| r.run()))
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    moduli: Vec<PrimeModulus>,
    method: Method,
}

fn flatten<T>(nested: Vec<Vec<T>>) -> Vec<T> {
    nested.into_iter().flatten().collect()
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let moduli = cfg
            .q
            .par_iter()
            .map(|&q| PrimeModulus::with_cap(q, cfg.q_max).with_context(|| format!("q = {q}")))
            .collect::<Result<Vec<_>>>()?;
        let method = match cfg.method {
            MethodArg::Reference => Method::Reference,
            MethodArg::Truncated => Method::Truncated(cfg.truncation),
        };
        Ok(Self { cfg, moduli, method })
    }

    fn point(&self, t: f64) -> Result<CriticalPoint> {
        Ok(CriticalPoint::with_epsilon0(t, self.cfg.epsilon0)?)
    }

    fn form(&self) -> MainTermForm {
        match self.cfg.main_form {
            MainForm::Limit => MainTermForm::Limit,
            MainForm::Printed => MainTermForm::Printed,
        }
    }

    fn window_mode(&self) -> WindowMode {
        match self.cfg.window_mode {
            WindowModeArg::Canonical => WindowMode::Canonical,
            WindowModeArg::Custom => WindowMode::Custom { bounds: self.cfg.window_bounds.clone(), ell: self.cfg.window_ell.clone() },
        }
    }

    fn window_mode_name(&self) -> &'static str {
        match self.cfg.window_mode {
            WindowModeArg::Canonical => "canonical",
            WindowModeArg::Custom => "custom",
        }
    }

    fn params(&self, k: f64, q: u64) -> Result<MollifierParams> {
        MollifierParams::new(k, self.cfg.n, self.cfg.m, q, self.window_mode())
            .with_context(|| format!("mollifier at q = {q}, k = {k}"))
    }

    /// One L-vector per `(q, t)`, indexed `[q][t]`.
    fn vectors(&self) -> Vec<Vec<lmoments::Result<LVector>>> {
        self.moduli
            .par_iter()
            .map(|m| {
                self.cfg
                    .t
                    .par_iter()
                    .map(|&t| {
                        let point = CriticalPoint::with_epsilon0(t, self.cfg.epsilon0)?;
                        l_all(m, &point, self.method)
                    })
                    .collect()
            })
            .collect()
    }

    fn checked_vectors(&self) -> Result<Vec<Vec<LVector>>> {
        self.vectors()
            .into_iter()
            .zip(&self.cfg.q)
            .map(|(row, &q)| {
                row.into_iter()
                    .zip(&self.cfg.t)
                    .map(|(v, &t)| v.with_context(|| format!("L-values at q = {q}, t = {t}")))
                    .collect()
            })
            .collect()
    }

    /// Every `(q index, k, t index)` in report order.
    fn triples(&self) -> Vec<(usize, f64, usize)> {
        let mut out = Vec::new();
        for qi in 0..self.cfg.q.len() {
            for &k in &self.cfg.k {
                for ti in 0..self.cfg.t.len() {
                    out.push((qi, k, ti));
                }
            }
        }
        out
    }

    fn run(&self) -> Result<Outcome> {
        let subcommand = self.cfg.subcommand;
        let mut report = Report::new(columns(subcommand));
        let mut violation = false;
        let rows = match subcommand {
            Subcommand::Moments => self.moments()?,
            Subcommand::Sweep => self.sweep(),
            Subcommand::Lemma21 | Subcommand::Lemma22 => {
                let (rows, holds) = self.inequality(subcommand == Subcommand::Lemma21)?;
                violation = !holds;
                rows
            }
            Subcommand::Twisted => self.twisted()?,
            Subcommand::TwistedGeneral => self.twisted_general()?,
            Subcommand::Prop24 => self.prop24()?,
            Subcommand::Prop25 => self.prop25()?,
            Subcommand::Prop26 => self.prop26()?,
            Subcommand::AfeProfile => self.afe_profile()?,
        };
        for row in rows {
            report.push(row);
        }
        Ok(Outcome { report, violation })
    }

    fn moments(&self) -> Result<Vec<Vec<Cell>>> {
        let vectors = self.checked_vectors()?;
        self.triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let row = sweep_row(&vectors[qi][ti], k)?;
                Ok(vec![row.q.into(), row.k.into(), row.t.into(), row.moment.into(), row.normalizer.into(), row.ratio.into()])
            })
            .collect()
    }

    fn sweep(&self) -> Vec<Vec<Cell>> {
        let vectors = self.vectors();
        self.triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let (q, t) = (self.cfg.q[qi], self.cfg.t[ti]);
                match vectors[qi][ti].clone().and_then(|v| sweep_row(&v, k)) {
                    Ok(row) => vec![
                        q.into(),
                        k.into(),
                        t.into(),
                        row.moment.into(),
                        row.normalizer.into(),
                        row.ratio.into(),
                        row.admissible.into(),
                        Cell::Empty,
                    ],
                    Err(e) => {
                        vec![q.into(), k.into(), t.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, e.to_string().into()]
                    }
                }
            })
            .collect()
    }

    fn inequality(&self, lemma21: bool) -> Result<(Vec<Vec<Cell>>, bool)> {
        let vectors = self.checked_vectors()?;
        let reports = self
            .triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let params = self.params(k, self.cfg.q[qi])?;
                let values = &vectors[qi][ti];
                let report = if lemma21 {
                    lemma21_from(&self.moduli[qi], values, &params)
                } else {
                    lemma22_from(&self.moduli[qi], values, &params)
                };
                Ok(report?)
            })
            .collect::<Result<Vec<InequalityReport>>>()?;
        let holds = reports.iter().all(|r| r.holds);
        let rows = reports
            .into_iter()
            .map(|r| {
                let mut row: Vec<Cell> =
                    vec![r.q.into(), r.k.into(), r.t.into(), self.window_mode_name().into(), r.windows.into()];
                if lemma21 {
                    row.extend(complex(r.lhs));
                    row.push(r.lhs.norm().into());
                    for i in 0..3 {
                        // for k > 1 there is no middle factor
                        let factor = match (r.rhs_factors.len(), i) {
                            (2, 0) => Some(r.rhs_factors[0]),
                            (2, 1) => None,
                            (2, _) => Some(r.rhs_factors[1]),
                            (_, i) => r.rhs_factors.get(i).copied(),
                        };
                        row.push(factor.map(|f| f.0).into());
                        row.push(factor.map(|f| f.1).into());
                    }
                } else {
                    row.push(r.lhs.re.into());
                    for i in 0..2 {
                        let factor = r.rhs_factors.get(i).copied();
                        row.push(factor.map(|f| f.0).into());
                        row.push(factor.map(|f| f.1).into());
                    }
                }
                row.push(r.rhs.into());
                if !lemma21 {
                    row.push(r.constant.into());
                }
                row.push(r.slack_ratio.into());
                row.push(r.holds.into());
                row
            })
            .collect();
        Ok((rows, holds))
    }

    fn twisted(&self) -> Result<Vec<Vec<Cell>>> {
        let vectors = self.checked_vectors()?;
        let pairs = self.twist_pairs()?;
        let form = self.form();
        let form_name = match form {
            MainTermForm::Limit => "limit",
            MainTermForm::Printed => "printed",
        };
        let mut jobs = Vec::new();
        for qi in 0..self.cfg.q.len() {
            for ti in 0..self.cfg.t.len() {
                jobs.extend(pairs.iter().map(|&pair| (qi, ti, pair)));
            }
        }
        jobs.into_par_iter()
            .map(|(qi, ti, pair)| {
                let r = twisted_main_from(&self.moduli[qi], &vectors[qi][ti], pair, form)?;
                let mut row: Vec<Cell> = vec![r.q.into(), r.t.into(), pair.h.into(), pair.b.into(), form_name.into()];
                row.extend(complex(r.lhs));
                row.extend(complex(r.s1_term));
                row.extend(complex(r.s2_term));
                row.extend(complex(r.main_total));
                row.extend([r.abs_deviation.into(), r.rel_deviation.into(), r.error_budget.into()]);
                Ok(row)
            })
            .collect()
    }

    fn twist_pairs(&self) -> Result<Vec<TwistPair>> {
        self.cfg
            .pairs()
            .into_iter()
            .map(|(h, b)| {
                let pair = TwistPair::new(h, b)?;
                for &q in &self.cfg.q {
                    pair.check(q)?;
                }
                Ok(pair)
            })
            .collect()
    }

    fn twisted_general(&self) -> Result<Vec<Vec<Cell>>> {
        let pairs = self.twist_pairs()?;
        let mut jobs = Vec::new();
        for qi in 0..self.cfg.q.len() {
            for &pair in &pairs {
                for &t in &self.cfg.t {
                    for &t_prime in &self.cfg.t_prime {
                        jobs.push((qi, pair, t, t_prime));
                    }
                }
            }
        }
        jobs.into_par_iter()
            .map(|(qi, pair, t, t_prime)| {
                let s = Complex64::new(self.cfg.sigma, t);
                let s_prime = Complex64::new(self.cfg.sigma_prime, t_prime);
                let r = twisted_general(&self.moduli[qi], s, s_prime, pair, self.method)
                    .with_context(|| format!("q = {}, s = {s}, s' = {s_prime}", self.cfg.q[qi]))?;
                let mut row: Vec<Cell> = vec![self.cfg.q[qi].into(), pair.h.into(), pair.b.into()];
                row.extend(complex(s));
                row.extend(complex(s_prime));
                row.extend(complex(r.lhs));
                row.extend(complex(r.main));
                row.extend([r.abs_deviation.into(), r.rel_deviation.into()]);
                Ok(row)
            })
            .collect()
    }

    fn prop24(&self) -> Result<Vec<Vec<Cell>>> {
        let vectors = self.checked_vectors()?;
        self.triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let params = self.params(k, self.cfg.q[qi])?;
                let r = prop24_check(&self.moduli[qi], &vectors[qi][ti], &params, self.cfg.support_cap)?;
                let mut row: Vec<Cell> = vec![
                    r.q.into(),
                    r.k.into(),
                    r.t.into(),
                    self.window_mode_name().into(),
                    params.big_r().into(),
                    r.x_len.into(),
                ];
                row.extend(complex(r.lhs));
                row.push(r.diagonal.into());
                row.extend(complex(r.off_diagonal));
                row.extend([r.normalizer.into(), r.diagonal_ratio.into(), r.lhs_ratio.into()]);
                Ok(row)
            })
            .collect()
    }

    fn prop25(&self) -> Result<Vec<Vec<Cell>>> {
        let vectors = self.checked_vectors()?;
        let form = self.form();
        let nested = self
            .triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let params = self.params(k, self.cfg.q[qi])?;
                (0..=params.big_r())
                    .into_par_iter()
                    .map(|v| {
                        let r = prop25_from(&self.moduli[qi], &vectors[qi][ti], &params, v, form, self.cfg.support_cap)
                            .with_context(|| format!("q = {}, k = {k}, v = {v}", self.cfg.q[qi]))?;
                        let mut row: Vec<Cell> = vec![
                            r.q.into(),
                            r.k.into(),
                            r.t.into(),
                            self.window_mode_name().into(),
                            r.v.into(),
                            r.ell_next.into(),
                            r.support.into(),
                            r.direct.into(),
                            r.normalizer.into(),
                            r.ratio.into(),
                            r.coefficient_sum.into(),
                            r.ln_scale.into(),
                        ];
                        row.extend(complex(r.predicted_main));
                        Ok(row)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(flatten(nested))
    }

    fn prop26(&self) -> Result<Vec<Vec<Cell>>> {
        self.triples()
            .into_par_iter()
            .map(|(qi, k, ti)| {
                let params = self.params(k, self.cfg.q[qi])?;
                let t = self.point(self.cfg.t[ti])?.t;
                let r = prop26_check(&self.moduli[qi], t, &params)?;
                Ok(vec![
                    r.q.into(),
                    r.k.into(),
                    r.t.into(),
                    self.window_mode_name().into(),
                    params.big_r().into(),
                    r.product_sum.into(),
                    r.capped_sum.into(),
                    r.normalizer.into(),
                    r.product_ratio.into(),
                    r.capped_ratio.into(),
                ])
            })
            .collect()
    }

    fn afe_profile(&self) -> Result<Vec<Vec<Cell>>> {
        let jobs: Vec<(usize, usize)> =
            (0..self.cfg.q.len()).flat_map(|qi| (0..self.cfg.t.len()).map(move |ti| (qi, ti))).collect();
        let nested = jobs
            .into_par_iter()
            .map(|(qi, ti)| {
                let q = self.cfg.q[qi];
                let grid: Vec<f64> = self.cfg.x_factors.iter().map(|f| f * q as f64).collect();
                let profile = afe_error_profile(&self.moduli[qi], &self.point(self.cfg.t[ti])?, &grid)
                    .with_context(|| format!("truncation profile at q = {q}"))?;
                Ok(profile
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            q.into(),
                            profile.t.into(),
                            r.x.into(),
                            r.median_error.into(),
                            r.empirical_constant.into(),
                            profile.slope.into(),
                        ]
                    })
                    .collect::<Vec<Vec<Cell>>>())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(flatten(nested))
    }
}
