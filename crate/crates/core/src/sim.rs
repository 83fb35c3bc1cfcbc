//! Empirical DoF: zero-forcing rate sweeps for linear schemes and an exact
//! PAM constellation probe for rational schemes.

use crate::channel::{aux_stream, domain, stream_rng, ChannelRealization, Symbol, VariableRegistry};
use crate::dof::SlopeEstimate;
use crate::error::{Error, Result};
use crate::linalg::{inverse, Field};
use crate::linear::{network_for, verify_scheme, LinearScheme};
use crate::rational::RationalScheme;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::io::Write;

/// Default power grid: `10^2 ..= 10^8`, one point per decade.
pub fn default_power_grid() -> Vec<f64> {
    (2..=8).map(|e| 10f64.powi(e)).collect()
}

/// Default cap on enumerated constellation points.
pub const ENUM_LIMIT: u128 = 10_000_000;

/// What the total rate is regressed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `log2 P` (complex setting).
    Log2P,
    /// `(1/2) log2 P` (real setting).
    HalfLog2P,
}

impl Normalization {
    pub fn of(setting: crate::channel::Setting) -> Self {
        match setting {
            crate::channel::Setting::Complex => Normalization::Log2P,
            crate::channel::Setting::Real => Normalization::HalfLog2P,
        }
    }

    pub fn apply(self, p: f64) -> f64 {
        match self {
            Normalization::Log2P => p.log2(),
            Normalization::HalfLog2P => 0.5 * p.log2(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateSweep {
    pub powers: Vec<f64>,
    /// `[power][user][state]`, bits per channel use.
    pub state_rates: Vec<Vec<Vec<f64>>>,
    /// `[power][user]`: the worst state of each user.
    pub user_rates: Vec<Vec<f64>>,
    pub total_rates: Vec<f64>,
    pub normalization: Normalization,
    pub fit: SlopeEstimate,
    /// Largest post-combining interference power relative to `P`.
    pub max_residual_interference: f64,
}

/// Gaussian-signaling rates with zero-forcing at every receiver state.
///
/// Streams share power equally (`P * slots / total_streams` each). Each user's
/// compound rate is its worst state's rate; the slope is fitted on the tail
/// of the power grid.
pub fn zf_rate_sweep(ch: &ChannelRealization, scheme: &LinearScheme, powers: &[f64]) -> Result<RateSweep> {
    let ledger = verify_scheme(ch, scheme)?;
    if !ledger.all_pass() {
        return Err(Error::UnverifiedScheme(ledger.failures().len()));
    }
    let net = network_for(scheme.kind, ch)?;
    let normalization = Normalization::of(scheme.setting);
    let total = scheme.total_streams();
    let users = net.num_users();
    // Complex noise of unit variance puts half on each real dimension.
    let (noise, per_stream_rate): (f64, fn(f64) -> f64) = match (scheme.field, scheme.setting) {
        (Field::Real, crate::channel::Setting::Complex) => (0.5, |s| 0.5 * (1.0 + s).log2()),
        (Field::Real, crate::channel::Setting::Real) => (1.0, |s| 0.5 * (1.0 + s).log2()),
        (Field::Complex, _) => (1.0, |s| (1.0 + s).log2()),
    };
    let mut state_rates = Vec::with_capacity(powers.len());
    let mut max_residual: f64 = 0.0;
    for &p in powers {
        let mut per_user = Vec::with_capacity(users);
        for u in 0..users {
            let mut per_state = Vec::new();
            if scheme.streams[u] == 0 || total == 0 {
                per_user.push(vec![0.0; net.channels[u].len()]);
                continue;
            }
            let ps = p * scheme.slots as f64 / total as f64;
            for (h, comb) in net.channels[u].iter().zip(&scheme.rx_combiners[u]) {
                let ct = comb.transpose();
                let d = &ct * h * &scheme.tx_beamformers[u];
                let dinv = inverse(&d).ok_or(Error::SingularStack { ratio: 0.0 })?;
                let noise_cov = (&ct * comb.map(|z| z.conj())).map(|z| z * noise);
                let post_noise = &dinv * noise_cov * dinv.adjoint();
                let mut interference = vec![0.0; scheme.streams[u]];
                for (m, b) in scheme.tx_beamformers.iter().enumerate() {
                    if m == u || b.ncols() == 0 {
                        continue;
                    }
                    let raw = &ct * h * b;
                    max_residual = max_residual.max(raw.norm_squared() * ps / p);
                    let leak = &dinv * raw;
                    for (k, slot) in interference.iter_mut().enumerate() {
                        *slot += leak.row(k).norm_squared() * ps;
                    }
                }
                let rate: f64 = (0..scheme.streams[u])
                    .map(|k| per_stream_rate(ps / (post_noise[(k, k)].re + interference[k])))
                    .sum();
                per_state.push(rate / scheme.slots as f64);
            }
            per_user.push(per_state);
        }
        state_rates.push(per_user);
    }
    let user_rates: Vec<Vec<f64>> = state_rates
        .iter()
        .map(|pu| pu.iter().map(|s| s.iter().copied().fold(f64::INFINITY, f64::min)).collect())
        .collect();
    let total_rates: Vec<f64> = user_rates.iter().map(|u| u.iter().sum()).collect();
    let fit = if total == 0 {
        SlopeEstimate { slope: 0.0, stderr: 0.0 }
    } else {
        estimate_slope(&total_rates, powers, normalization)?
    };
    Ok(RateSweep {
        powers: powers.to_vec(),
        state_rates,
        user_rates,
        total_rates,
        normalization,
        fit,
        max_residual_interference: max_residual,
    })
}

/// Ordinary least squares of `rates` on the normalized log power over the top
/// `ceil(len/2)` points.
pub fn estimate_slope(rates: &[f64], powers: &[f64], normalization: Normalization) -> Result<SlopeEstimate> {
    if rates.len() != powers.len() {
        return Err(Error::DegenerateFit(format!("{} rates for {} powers", rates.len(), powers.len())));
    }
    if powers.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 points, got {}", powers.len())));
    }
    if powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) || powers.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateFit("powers must be positive and strictly increasing".into()));
    }
    let start = powers.len() - powers.len().div_ceil(2);
    let x: Vec<f64> = powers[start..].iter().map(|&p| normalization.apply(p)).collect();
    let y = &rates[start..];
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let stderr = if x.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(SlopeEstimate { slope, stderr })
}

/// Writes `P,user,state,rate,total_rate` rows (1-based user and state).
pub fn write_sweep_csv<W: Write>(out: W, sweep: &RateSweep) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["P", "user", "state", "rate", "total_rate"])?;
    for (i, &p) in sweep.powers.iter().enumerate() {
        for (u, states) in sweep.state_rates[i].iter().enumerate() {
            for (s, r) in states.iter().enumerate() {
                w.write_record(&[
                    format!("{p:e}"),
                    (u + 1).to_string(),
                    (s + 1).to_string(),
                    format!("{r:.12}"),
                    format!("{:.12}", sweep.total_rates[i]),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Noiseless receive constellation of one receiver state under integer signaling.
#[derive(Debug, Clone, Serialize)]
pub struct ConstellationProbe {
    pub receiver: usize,
    pub state: usize,
    pub power: f64,
    /// Largest integer magnitude per stream: `max(1, floor(P^bound))`.
    pub max_level: u64,
    pub streams: usize,
    pub points: usize,
    /// Exact minimum distance between points carrying different desired data, before scaling by `A`.
    #[serde(serialize_with = "ser_rational")]
    pub min_distance_unscaled: BigRational,
    pub scale: f64,
    /// `A * min_distance_unscaled`.
    pub min_distance: f64,
    /// `2 Q(d/2)` at unit noise variance.
    pub decode_error: f64,
}

fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::dof::rational_value(v).serialize(s)
}

/// Random nonzero rational with numerator and denominator magnitudes at most `2^16`.
fn sample_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num: i64 = rng.gen_range(1..=1 << 16) * if rng.gen::<bool>() { 1 } else { -1 };
    let den: i64 = rng.gen_range(1..=1 << 16);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Enumerates every integer stream tuple at one receiver state and returns the
/// exact minimum distance between received points whose desired data differ.
///
/// Symbol values are re-drawn as random rationals from the `seed`; symbols
/// shared in the registry stay shared, so value ties survive the re-draw.
pub fn pam_constellation_probe(
    scheme: &RationalScheme,
    receiver: usize,
    state: usize,
    power: f64,
    seed: u64,
    cap: u128,
) -> Result<ConstellationProbe> {
    let values: Vec<BigRational> = (0..scheme.registry.len())
        .map(|i| sample_rational(&mut stream_rng(seed, aux_stream(domain::PROBE, i as u64))))
        .collect();
    let rs = scheme
        .receivers
        .iter()
        .find(|r| r.receiver == receiver && r.state == state)
        .ok_or_else(|| Error::InvalidScenario(format!("no receiver {receiver} state {state} in scheme")))?;
    let mut weights: Vec<BigRational> = Vec::new();
    let mut desired: Vec<bool> = Vec::new();
    for l in scheme.links_at(receiver, state) {
        let g = l.coefficient.exact_value(&values);
        let is_desired = rs.desired.contains(&l.message);
        for d in scheme.sets[scheme.messages[l.message].set].members() {
            weights.push(&g * d.exact_value(&values));
            desired.push(is_desired);
        }
    }
    let bound = scheme.power.bound.to_f64().unwrap_or(0.0);
    let max_level = (power.powf(bound).floor() as u64).max(1);
    let levels = 2 * max_level as u128 + 1;
    let streams = weights.len();
    let size = u32::try_from(streams).ok().and_then(|s| levels.checked_pow(s)).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumLimit { size, cap });
    }
    let den = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let int_w: Vec<BigInt> =
        weights.iter().map(|w| (w * BigRational::from_integer(den.clone())).to_integer()).collect();

    let q = max_level as i64;
    let mut digits = vec![-q; streams];
    let mut point: BigInt = int_w.iter().map(|w| w * BigInt::from(-q)).sum();
    let mut label: u128 = 0;
    let radix: Vec<u128> = desired
        .iter()
        .scan(1u128, |acc, &d| {
            let r = if d { *acc } else { 0 };
            if d {
                *acc *= levels;
            }
            Some(r)
        })
        .collect();
    let mut pts: Vec<(BigInt, u128)> = Vec::with_capacity(size as usize);
    loop {
        pts.push((point.clone(), label));
        let mut k = streams;
        let mut done = true;
        while k > 0 {
            k -= 1;
            if digits[k] < q {
                digits[k] += 1;
                point += &int_w[k];
                label += radix[k];
                done = false;
                break;
            }
            point -= &int_w[k] * BigInt::from(2 * q);
            label -= radix[k] * (levels - 1);
            digits[k] = -q;
        }
        if done {
            break;
        }
    }
    pts.sort_unstable();
    let mut min_gap: Option<BigInt> = None;
    for w in pts.windows(2) {
        if w[0].1 != w[1].1 {
            let gap = &w[1].0 - &w[0].0;
            if min_gap.as_ref().is_none_or(|m| gap < *m) {
                min_gap = Some(gap);
            }
        }
    }
    let min_distance_unscaled = BigRational::new(min_gap.unwrap_or_default().abs(), den);
    let float_registry = rational_registry(&scheme.registry, &values);
    let lambda = scheme.lambda_with(&float_registry);
    let scale = power.powf(scheme.power.scale.to_f64().unwrap_or(0.0)) / lambda;
    let min_distance = scale * min_distance_unscaled.to_f64().unwrap_or(0.0);
    let decode_error = if min_distance_unscaled.is_zero() { 1.0 } else { 2.0 * q_function(min_distance / 2.0) };
    Ok(ConstellationProbe {
        receiver,
        state,
        power,
        max_level,
        streams,
        points: pts.len(),
        min_distance_unscaled,
        scale,
        min_distance,
        decode_error,
    })
}

fn rational_registry(base: &VariableRegistry, values: &[BigRational]) -> VariableRegistry {
    let symbols: Vec<Symbol> = base
        .symbols()
        .iter()
        .zip(values)
        .map(|(s, v)| Symbol { name: s.name.clone(), value: v.to_f64().unwrap_or(0.0), kind: s.kind })
        .collect();
    VariableRegistry::from_symbols(symbols)
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_zero_stderr() {
        let powers = default_power_grid();
        let rates: Vec<f64> = powers.iter().map(|p| 0.7 + 1.5 * p.log2()).collect();
        let fit = estimate_slope(&rates, &powers, Normalization::Log2P).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-9);
    }

    #[test]
    fn too_few_or_unordered_points() {
        let p = [1e2, 1e3, 1e4];
        assert!(matches!(estimate_slope(&[1.0, 2.0, 3.0], &p, Normalization::Log2P), Err(Error::DegenerateFit(_))));
        let q = [1e2, 1e4, 1e3, 1e5];
        assert!(matches!(estimate_slope(&[1.0; 4], &q, Normalization::Log2P), Err(Error::DegenerateFit(_))));
    }
}
