//! Batch driver: `construct`, `sweep`, `verify` and `dof`.
//!
//! A run reads one JSON config, builds the scheme for each seed, verifies it,
//! optionally simulates it, and writes `report.json`, `scheme.json` and
//! `sweep.csv`. Reports contain no timestamps, so identical inputs give
//! byte-identical files.

use crate::channel::{sample_channel, ChannelRealization, CompoundScenario, Network, Setting};
use crate::dof::{
    conjecture_values, dof_bc, dof_complex_x_via_real, dof_ic, dof_x, rational_value, DoFReport, SlopeEstimate,
    CONJECTURE_NOTE, THEOREM4_NOTE,
};
use crate::error::{Error, Result};
use crate::ledger::VerificationLedger;
use crate::linear::{
    build_many_to_one_demo, build_mimo_bc_scheme, build_theorem1_scheme, build_theorem2_scheme,
    build_weingarten_baseline, check_symmetric_signaling_fails, verify_scheme, LinearScheme, MimoBcChannel, SchemeData,
};
use crate::rational::{
    build_bc_real_scheme, build_complex_ic_scheme, build_ic_scheme, build_x_scheme, finite_n_dof,
    rational_from_decimal, RationalScheme,
};
use crate::sim::{default_power_grid, pam_constellation_probe, write_sweep_csv, zf_rate_sweep, ENUM_LIMIT};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Version of the report and CSV layout.
pub const FORMAT_VERSION: u32 = 1;

/// Largest direction set whose members are written out in `scheme.json`.
const MAX_LISTED_MEMBERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeChoice {
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "mimo_bc_ex1", alias = "appC_ex1")]
    MimoBcEx1,
    #[serde(rename = "mimo_bc_ex2", alias = "appC_ex2")]
    MimoBcEx2,
    #[serde(rename = "mimo_bc_ex3", alias = "appC_ex3")]
    MimoBcEx3,
    #[serde(rename = "mimo_bc_ex4", alias = "appC_ex4")]
    MimoBcEx4,
    #[serde(rename = "weingarten")]
    Weingarten,
    #[serde(rename = "many_to_one")]
    ManyToOne,
    #[serde(rename = "bc_rational")]
    BcRational,
    #[serde(rename = "x_rational")]
    XRational,
    #[serde(rename = "ic_rational")]
    IcRational,
    #[serde(rename = "complex_ic_reduction")]
    ComplexIcReduction,
}

impl SchemeChoice {
    pub fn is_rational(self) -> bool {
        matches!(
            self,
            SchemeChoice::BcRational
                | SchemeChoice::XRational
                | SchemeChoice::IcRational
                | SchemeChoice::ComplexIcReduction
        )
    }

    fn mimo_example(self) -> Option<u8> {
        match self {
            SchemeChoice::MimoBcEx1 => Some(1),
            SchemeChoice::MimoBcEx2 => Some(2),
            SchemeChoice::MimoBcEx3 => Some(3),
            SchemeChoice::MimoBcEx4 => Some(4),
            _ => None,
        }
    }
}

/// Constellation probe settings (1-based receiver and state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub receiver: usize,
    pub state: usize,
    pub powers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

fn default_n() -> u32 {
    1
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: CompoundScenario,
    pub scheme: SchemeChoice,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_power_grid")]
    pub power_grid: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub output: OutputConfig,
    /// Channel family for the MIMO broadcast examples.
    #[serde(default = "default_channel_model")]
    pub channel_model: MimoBcChannel,
    #[serde(default)]
    pub probe: Option<ProbeConfig>,
}

fn default_channel_model() -> MimoBcChannel {
    MimoBcChannel::ComplexGeneric
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_json(&text)?;
        Ok((cfg, sha256_hex(text.as_bytes())))
    }

    /// Checks everything that can be checked without sampling a channel.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let s = &self.scenario;
        let need = |network: Network, setting: Option<Setting>| -> Result<()> {
            if s.network != network || setting.is_some_and(|x| x != s.setting) {
                return Err(Error::RegimeMismatch(format!(
                    "scheme {:?} needs a {}{:?} scenario, got {:?} {:?}",
                    self.scheme,
                    setting.map(|x| format!("{x:?} ")).unwrap_or_default(),
                    network,
                    s.setting,
                    s.network
                )));
            }
            Ok(())
        };
        match self.scheme {
            SchemeChoice::BcRational => need(Network::Bc, Some(Setting::Real)),
            SchemeChoice::XRational => need(Network::X, Some(Setting::Real)),
            SchemeChoice::IcRational => need(Network::Ic, Some(Setting::Real)),
            SchemeChoice::ComplexIcReduction => need(Network::Ic, Some(Setting::Complex)),
            SchemeChoice::ManyToOne => need(Network::Ic, Some(Setting::Real)),
            _ => need(Network::Bc, None),
        }
    }

    pub fn epsilon_exact(&self) -> Result<BigRational> {
        rational_from_decimal(self.epsilon)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A constructed scheme of either family with its construction ledger.
pub enum Built {
    Linear { ch: ChannelRealization, scheme: LinearScheme, ledger: VerificationLedger },
    Rational { scheme: RationalScheme, ledger: VerificationLedger },
}

impl Built {
    pub fn ledger(&self) -> &VerificationLedger {
        match self {
            Built::Linear { ledger, .. } | Built::Rational { ledger, .. } => ledger,
        }
    }
}

/// Samples the channel for `seed` and builds the configured scheme.
pub fn build(cfg: &ScenarioConfig, seed: u64) -> Result<Built> {
    let scenario = cfg.scenario.with_seed(seed);
    let ch = sample_channel(&scenario)?;
    let eps = cfg.epsilon_exact()?;
    let linear = |r: Result<(LinearScheme, VerificationLedger)>, ch: ChannelRealization| {
        r.map(|(scheme, ledger)| Built::Linear { ch, scheme, ledger })
    };
    let rational =
        |r: Result<(RationalScheme, VerificationLedger)>| r.map(|(scheme, ledger)| Built::Rational { scheme, ledger });
    match cfg.scheme {
        SchemeChoice::Thm1 => linear(build_theorem1_scheme(&ch), ch),
        SchemeChoice::Thm2 => linear(build_theorem2_scheme(&ch), ch),
        SchemeChoice::Weingarten => linear(build_weingarten_baseline(&ch), ch),
        SchemeChoice::ManyToOne => linear(build_many_to_one_demo(&ch), ch),
        SchemeChoice::MimoBcEx1 | SchemeChoice::MimoBcEx2 | SchemeChoice::MimoBcEx3 | SchemeChoice::MimoBcEx4 => {
            let ex = cfg.scheme.mimo_example().expect("MIMO broadcast choice");
            linear(build_mimo_bc_scheme(&ch, ex, cfg.channel_model), ch)
        }
        SchemeChoice::BcRational => rational(build_bc_real_scheme(&ch, cfg.n, &eps)),
        SchemeChoice::XRational => rational(build_x_scheme(&ch, cfg.n, &eps)),
        SchemeChoice::IcRational => rational(build_ic_scheme(&ch, cfg.n, &eps)),
        SchemeChoice::ComplexIcReduction => rational(build_complex_ic_scheme(&ch, cfg.n, &eps)),
    }
}

/// Theoretical and conjectured DoF for a configured scheme, with provenance notes.
pub fn theoretical_dof(
    cfg: &ScenarioConfig,
    built: Option<&Built>,
) -> Result<(BigRational, Option<BigRational>, Vec<String>)> {
    let s = &cfg.scenario;
    let mut notes = Vec::new();
    let mut conjectured = None;
    let mut add_conjectures = |notes: &mut Vec<String>, theoretical: &BigRational| {
        if s.network == Network::Bc && s.j.len() == 2 {
            let c = conjecture_values(s.m, s.j[0], s.j[1]);
            if let Some(v) = c.conj2.clone().or(c.conj1.clone()) {
                let which = if c.conj2.is_some() { "Conjecture 2" } else { "Conjecture 1" };
                notes.push(format!(
                    "{which} predicts {v}; {} the value above",
                    if &v < theoretical { "strictly below" } else { "not below" }
                ));
                if c.disproved {
                    notes.push(CONJECTURE_NOTE.into());
                }
                conjectured = Some(v);
            }
        }
    };
    let theoretical = match cfg.scheme {
        SchemeChoice::Thm1 | SchemeChoice::Thm2 => {
            let d = dof_bc(s.m, &s.j, s.setting)?;
            notes.push(format!(
                "{} of the complex compound MISO BC",
                if cfg.scheme == SchemeChoice::Thm1 { "Theorem 1" } else { "Theorem 2" }
            ));
            add_conjectures(&mut notes, &d);
            d
        }
        SchemeChoice::Weingarten => {
            let d = BigRational::new(BigInt::from(6), BigInt::from(5));
            notes.push(
                "identity/DFT combiner baseline over 5 slots achieves 6/5; Theorem 2 gives 4/3 for this channel".into(),
            );
            add_conjectures(&mut notes, &d);
            d
        }
        SchemeChoice::MimoBcEx1 | SchemeChoice::MimoBcEx2 | SchemeChoice::MimoBcEx3 | SchemeChoice::MimoBcEx4 => {
            let ex = cfg.scheme.mimo_example().expect("MIMO broadcast choice");
            notes.push(format!("achievable total DoF of MIMO BC example {ex}"));
            BigRational::from_integer(BigInt::from(if ex % 2 == 1 { 3 } else { 4 }))
        }
        SchemeChoice::ManyToOne => {
            notes.push("achievable total DoF of the 4-user many-to-one alignment demo (2 + 1 + 1 + 1)".into());
            BigRational::from_integer(BigInt::from(5))
        }
        SchemeChoice::BcRational => {
            let d = dof_bc(s.m, &s.j, Setting::Real)?;
            notes.push("Theorem 3: 1 + (M-1)/M".into());
            add_conjectures(&mut notes, &d);
            d
        }
        SchemeChoice::XRational => {
            notes.push("Theorem 5: MN/(M+N-1)".into());
            dof_x(s.m, s.k_or_n)
        }
        SchemeChoice::IcRational => {
            notes.push("Theorem 6: K/2".into());
            dof_ic(s.k_or_n)
        }
        SchemeChoice::ComplexIcReduction => {
            notes.push("complex IC via its real view: K real DoF, hence K/2 complex DoF".into());
            if s.k_or_n == 1 {
                notes.push("with K = 1 there is no interference; the point-to-point channel has 1 complex DoF, more than the reduction's 1/2".into());
            }
            dof_ic(s.k_or_n)
        }
    };
    if let Some(Built::Linear { scheme, .. }) = built {
        notes.push(format!("scheme carries {} streams, {} DoF", scheme.total_streams(), scheme.dof_claimed));
    }
    Ok((theoretical, conjectured, notes))
}

fn rational_scheme_json(s: &RationalScheme) -> Value {
    let sets: Vec<Value> = s
        .sets
        .iter()
        .map(|set| {
            let mut v = json!({ "name": set.name, "size": set.len(), "variables": set.vars.len(), "bound": set.bound });
            if set.len() <= MAX_LISTED_MEMBERS {
                v["members"] = json!(set.canonical(&s.registry));
            } else {
                v["members_omitted"] = json!(true);
            }
            v
        })
        .collect();
    json!({
        "family": "rational",
        "kind": s.kind,
        "n": s.n,
        "gamma": s.gamma,
        "m_n": s.m_n.to_string(),
        "epsilon": rational_value(&s.epsilon),
        "power_exponents": { "bound": rational_value(&s.power.bound), "scale": rational_value(&s.power.scale) },
        "lambda": s.lambda(),
        "registry": s.registry.symbols(),
        "sets": sets,
        "messages": s.messages.iter().enumerate().map(|(i, m)| json!({
            "label": m.label, "tx": m.tx, "set": s.sets[m.set].name, "streams": s.streams(i),
            "aligned_into": m.aligned_into.map(|u| s.sets[u].name.clone()),
        })).collect::<Vec<_>>(),
        "links": s.links,
        "finite_n_dof": rational_value(&finite_n_dof(s)),
        "limit": rational_value(&s.limit),
    })
}

/// Everything a run writes: the report, and optionally the scheme and sweep CSV.
pub struct RunOutput {
    pub exit_code: i32,
    pub report: Value,
    pub scheme: Option<Value>,
    pub csv: Option<Vec<u8>>,
}

fn report_base(command: &str, cfg: &ScenarioConfig, config_hash: &str, seed: u64) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "command": command,
        "config_hash": config_hash,
        "seed": seed,
        "scheme": cfg.scheme,
        "scenario": cfg.scenario.with_seed(seed),
    })
}

fn dof_report_json(report: &DoFReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

/// Builds and verifies the scheme for one seed.
pub fn cmd_construct(cfg: &ScenarioConfig, config_hash: &str, seed: u64) -> Result<RunOutput> {
    let built = build(cfg, seed)?;
    let (theoretical, conjectured, mut notes) = theoretical_dof(cfg, Some(&built))?;
    let ledger = built.ledger().clone();
    let (scheme_json, finite) = match &built {
        Built::Linear { scheme, ledger, .. } => {
            (json!({ "family": "linear", "scheme": scheme.to_data(), "ledger": ledger }), None)
        }
        Built::Rational { scheme, ledger } => {
            let mut v = rational_scheme_json(scheme);
            v["ledger"] = serde_json::to_value(ledger)?;
            (v, Some(finite_n_dof(scheme)))
        }
    };
    if cfg.scheme == SchemeChoice::Thm2 {
        if let Built::Linear { ch, .. } = &built {
            let neg = check_symmetric_signaling_fails(ch)?;
            notes.push(format!(
                "symmetric complex signaling over 3 slots: rank deficiency detected = {}",
                neg.all_pass()
            ));
        }
    }
    let dof = DoFReport {
        dof_theoretical: theoretical,
        dof_conjectured: conjectured,
        dof_finite_n: finite,
        dof_empirical_slope: None,
        checks: ledger.summary(),
        notes,
    };
    let mut report = report_base("construct", cfg, config_hash, seed);
    report["dof"] = dof_report_json(&dof);
    report["ledger"] = serde_json::to_value(&ledger)?;
    let exit_code = if ledger.all_pass() { 0 } else { 3 };
    Ok(RunOutput { exit_code, report, scheme: Some(scheme_json), csv: None })
}

/// Result of one seed in a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub seed: u64,
    pub ledger_pass: bool,
    pub error: Option<String>,
    pub slope: Option<SlopeEstimate>,
    pub max_residual_interference: Option<f64>,
    pub extra: BTreeMap<String, Value>,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// The configuration whose construction is expected to fail on every seed.
fn expected_failure(cfg: &ScenarioConfig) -> Option<&'static str> {
    let structured_eigen = matches!(cfg.scheme, SchemeChoice::MimoBcEx3 | SchemeChoice::MimoBcEx4)
        && cfg.channel_model == MimoBcChannel::Structured;
    structured_eigen.then_some("NO_REAL_EIGENVECTORS")
}

fn run_trial(cfg: &ScenarioConfig, seed: u64, want_csv: bool) -> (TrialResult, Option<Vec<u8>>) {
    let mut t = TrialResult {
        seed,
        ledger_pass: false,
        error: None,
        slope: None,
        max_residual_interference: None,
        extra: BTreeMap::new(),
    };
    let built = match build(cfg, seed) {
        Ok(b) => b,
        Err(e) => {
            t.error = Some(e.code().to_string());
            return (t, None);
        }
    };
    t.ledger_pass = built.ledger().all_pass();
    let mut csv = None;
    match &built {
        Built::Linear { ch, scheme, .. } => {
            if cfg.scheme == SchemeChoice::Thm2 {
                if let Ok(neg) = check_symmetric_signaling_fails(ch) {
                    t.extra.insert("symmetric_signaling_deficiency_detected".into(), json!(neg.all_pass()));
                }
            }
            match zf_rate_sweep(ch, scheme, &cfg.power_grid) {
                Ok(sw) => {
                    t.slope = Some(sw.fit);
                    t.max_residual_interference = Some(sw.max_residual_interference);
                    if want_csv {
                        let mut buf = Vec::new();
                        if write_sweep_csv(&mut buf, &sw).is_ok() {
                            csv = Some(buf);
                        }
                    }
                }
                Err(e) => t.error = Some(e.code().to_string()),
            }
        }
        Built::Rational { scheme, .. } => {
            t.extra.insert("finite_n_dof".into(), rational_value(&finite_n_dof(scheme)));
            if let Some(p) = &cfg.probe {
                let probes: Vec<Value> = p
                    .powers
                    .iter()
                    .map(|&pw| {
                        match pam_constellation_probe(
                            scheme,
                            p.receiver.saturating_sub(1),
                            p.state.saturating_sub(1),
                            pw,
                            seed,
                            ENUM_LIMIT,
                        ) {
                            Ok(pr) => serde_json::to_value(pr).unwrap_or(Value::Null),
                            Err(e) => json!({ "power": pw, "error": e.code() }),
                        }
                    })
                    .collect();
                t.extra.insert("probe".into(), json!(probes));
            }
        }
    }
    (t, csv)
}

/// Builds, verifies and simulates `trials` consecutive seeds starting at `seed`.
pub fn cmd_sweep(cfg: &ScenarioConfig, config_hash: &str, seed: u64) -> Result<RunOutput> {
    let seeds: Vec<u64> = (0..cfg.trials as u64).map(|i| seed + i).collect();
    let mut results: Vec<(TrialResult, Option<Vec<u8>>)> =
        seeds.par_iter().map(|&s| run_trial(cfg, s, s == seed)).collect();
    results.sort_by_key(|(t, _)| t.seed);
    let csv = results.iter().find_map(|(_, c)| c.clone());
    let trials: Vec<TrialResult> = results.into_iter().map(|(t, _)| t).collect();

    let n = trials.len() as f64;
    let pass_rate = trials.iter().filter(|t| t.ledger_pass && t.error.is_none()).count() as f64 / n;
    let mut error_counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in &trials {
        if let Some(e) = &t.error {
            *error_counts.entry(e.clone()).or_default() += 1;
        }
    }
    let slopes: Vec<f64> = trials.iter().filter_map(|t| t.slope.map(|s| s.slope)).collect();
    let mut aggregate = json!({ "trials": trials.len(), "pass_rate": pass_rate, "error_counts": error_counts });
    let mut empirical = None;
    if !slopes.is_empty() {
        let (mean, sd) = mean_sd(&slopes);
        let med = median(&slopes);
        aggregate["mean_slope"] = json!(mean);
        aggregate["median_slope"] = json!(med);
        aggregate["slope_sd"] = json!(sd);
        empirical = Some(SlopeEstimate { slope: med, stderr: sd / (slopes.len() as f64).sqrt() });
    }
    let deficiency: Vec<bool> = trials
        .iter()
        .filter_map(|t| t.extra.get("symmetric_signaling_deficiency_detected").and_then(Value::as_bool))
        .collect();
    if !deficiency.is_empty() {
        aggregate["symmetric_signaling_detection_rate"] =
            json!(deficiency.iter().filter(|&&d| d).count() as f64 / deficiency.len() as f64);
    }
    let expected = expected_failure(cfg);
    let exit_code = match expected {
        Some(code) => {
            let rate = error_counts.get(code).copied().unwrap_or(0) as f64 / n;
            aggregate["expected_negative"] = json!({ "code": code, "rate": rate, "pass": rate == 1.0 });
            if rate == 1.0 {
                0
            } else {
                3
            }
        }
        None if pass_rate == 1.0 => 0,
        None => 3,
    };

    let (theoretical, conjectured, mut notes) = theoretical_dof(cfg, None)?;
    if empirical.is_some() {
        notes.push(
            "empirical slope: median over trials of the per-seed tail-window fit; stderr is sd/sqrt(trials)".into(),
        );
    }
    let finite = trials.iter().find_map(|t| t.extra.get("finite_n_dof").cloned());
    let mut ledger = VerificationLedger::new();
    ledger.record_exact(
        if expected.is_some() { "trials.expected_failure" } else { "trials.ledger_pass" },
        crate::ledger::CheckKind::Cardinality,
        if exit_code == 0 { 0 } else { trials.len() },
    );
    let dof = DoFReport {
        dof_theoretical: theoretical,
        dof_conjectured: conjectured,
        dof_finite_n: None,
        dof_empirical_slope: empirical,
        checks: ledger.summary(),
        notes,
    };
    let mut report = report_base("sweep", cfg, config_hash, seed);
    let mut dof_json = dof_report_json(&dof);
    if let Some(f) = finite {
        dof_json["dof_finite_n"] = f;
    }
    report["dof"] = dof_json;
    report["aggregate"] = aggregate;
    report["trials"] = serde_json::to_value(&trials)?;
    Ok(RunOutput { exit_code, report, scheme: None, csv })
}

/// Re-verifies a scheme: a saved linear `scheme.json` against the channel
/// regenerated from the config, or a fresh construction otherwise.
pub fn cmd_verify(cfg: &ScenarioConfig, config_hash: &str, seed: u64, scheme_file: Option<&Path>) -> Result<RunOutput> {
    let ledger = match scheme_file {
        Some(path) if !cfg.scheme.is_rational() => {
            let doc: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let data: SchemeData = serde_json::from_value(doc.get("scheme").cloned().unwrap_or(doc))?;
            let scheme = data.to_scheme()?;
            let ch = sample_channel(&cfg.scenario.with_seed(seed))?;
            verify_scheme(&ch, &scheme)?
        }
        _ => match build(cfg, seed)? {
            Built::Linear { ch, scheme, .. } => verify_scheme(&ch, &scheme)?,
            Built::Rational { scheme, ledger } => {
                let mut fresh = scheme.verify();
                let missing: Vec<_> = ledger.checks.iter().filter(|c| fresh.find(&c.name).is_none()).cloned().collect();
                for c in missing {
                    fresh.push(c);
                }
                fresh
            }
        },
    };
    let mut report = report_base("verify", cfg, config_hash, seed);
    report["checks"] = serde_json::to_value(ledger.summary())?;
    report["ledger"] = serde_json::to_value(&ledger)?;
    Ok(RunOutput { exit_code: if ledger.all_pass() { 0 } else { 3 }, report, scheme: None, csv: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DofNetwork {
    Bc,
    X,
    Ic,
    /// `M x 2` complex compound X network restricted to real signals.
    ComplexX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SettingArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Args)]
pub struct DofArgs {
    #[arg(long, value_enum)]
    pub network: DofNetwork,
    /// Transmit antennas (BC) or transmitters (X).
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Receivers of an X network.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Users of an interference channel.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// State counts per user, comma separated.
    #[arg(long = "J", value_delimiter = ',')]
    pub j: Vec<usize>,
    #[arg(long, value_enum, default_value = "real")]
    pub setting: SettingArg,
    /// Adds Conjecture 1/2 values for 2-user BC queries.
    #[arg(long)]
    pub conjectures: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Evaluates the closed-form DoF for one query.
pub fn cmd_dof(args: &DofArgs) -> Result<Value> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::Config(format!("--{name} is required")));
    let mut out = json!({ "format_version": FORMAT_VERSION, "command": "dof" });
    let mut notes: Vec<String> = Vec::new();
    match args.network {
        DofNetwork::Bc => {
            let m = need(args.m, "M")?;
            if args.j.is_empty() {
                return Err(Error::Config("--J is required for a BC".into()));
            }
            let setting = if args.setting == SettingArg::Real { Setting::Real } else { Setting::Complex };
            let d = dof_bc(m, &args.j, setting)?;
            if setting == Setting::Real && args.j.len() >= 2 && args.j.iter().all(|&x| x >= m) {
                notes.push(THEOREM4_NOTE.into());
            }
            if args.j.len() == 2 {
                out["region"] = json!(crate::dof::classify_bc_region(m, args.j[0], args.j[1]));
            }
            if args.conjectures && args.j.len() == 2 {
                let c = conjecture_values(m, args.j[0], args.j[1]);
                out["conjectures"] = serde_json::to_value(&c)?;
                for (name, v) in [("conj1", &c.conj1), ("conj2", &c.conj2)] {
                    if let Some(v) = v {
                        out["conjectures"][format!("{name}_below_dof")] = json!(v < &d);
                    }
                }
                if c.disproved {
                    notes.push(CONJECTURE_NOTE.into());
                }
            }
            out["dof"] = rational_value(&d);
        }
        DofNetwork::X => out["dof"] = rational_value(&dof_x(need(args.m, "M")?, need(args.n, "N")?)),
        DofNetwork::Ic => out["dof"] = rational_value(&dof_ic(need(args.k, "K")?)),
        DofNetwork::ComplexX => {
            let (d, exceeds) = dof_complex_x_via_real(need(args.m, "M")?);
            out["dof"] = rational_value(&d);
            out["exceeds_one"] = json!(exceeds);
        }
    }
    out["notes"] = json!(notes);
    Ok(out)
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// A `scheme.json` written by `construct` (linear schemes).
    #[arg(long)]
    pub scheme: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build and verify the configured scheme; writes scheme.json and report.json.
    Construct(RunArgs),
    /// Build, verify and simulate over several seeds; writes sweep.csv and report.json.
    Sweep(RunArgs),
    /// Evaluate closed-form DoF; prints JSON.
    Dof(DofArgs),
    /// Re-verify a scheme; writes report.json.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Parser)]
#[command(name = "compound-align", version, about = "Interference alignment for compound networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn load_with_overrides(args: &RunArgs) -> Result<(ScenarioConfig, String, u64, PathBuf)> {
    let (mut cfg, hash) = ScenarioConfig::load(&args.config)?;
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    let seed = args.seed.unwrap_or(cfg.scenario.seed);
    let dir = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    Ok((cfg, hash, seed, dir))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes a run's artifacts into `dir`.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(&dir.join("report.json"), &out.report)?;
    if let Some(s) = &out.scheme {
        write_json(&dir.join("scheme.json"), s)?;
    }
    if let Some(c) = &out.csv {
        std::fs::write(dir.join("sweep.csv"), c)?;
    }
    Ok(())
}

/// Exit code for an error that stopped a run.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::RegimeMismatch(_) | Error::Unsupported(_) => 2,
        Error::UnverifiedScheme(_)
        | Error::SingularStack { .. }
        | Error::NoRealEigenvectors { .. }
        | Error::GenericityViolation(_)
        | Error::ZeroBeamformer(_)
        | Error::Collision { .. } => 3,
        _ => 1,
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Construct(a) => {
            let (cfg, hash, seed, dir) = load_with_overrides(&a)?;
            let out = cmd_construct(&cfg, &hash, seed)?;
            write_outputs(&dir, &out)?;
            Ok(out.exit_code)
        }
        Command::Sweep(a) => {
            let (cfg, hash, seed, dir) = load_with_overrides(&a)?;
            let out = cmd_sweep(&cfg, &hash, seed)?;
            write_outputs(&dir, &out)?;
            Ok(out.exit_code)
        }
        Command::Verify(a) => {
            let (cfg, hash, seed, dir) = load_with_overrides(&a.run)?;
            let out = cmd_verify(&cfg, &hash, seed, a.scheme.as_deref())?;
            write_outputs(&dir, &out)?;
            Ok(out.exit_code)
        }
        Command::Dof(a) => {
            let v = cmd_dof(&a)?;
            let text = serde_json::to_string_pretty(&v)? + "\n";
            match &a.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("report.json"), text)?;
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

/// Parses `args`, runs the command, reports errors on stderr, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            exit_code_for(&e)
        }
    }
}
