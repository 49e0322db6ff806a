//! Jamming-aware quality-of-transmission model.
//!
//! The noise seen by a channel on one fiber span is split into three power
//! spectral densities: amplifier ASE, the nonlinear interference (NLI) a
//! secure network would produce, and the extra NLI injected by jammed
//! channels. A channel's SNR over a route is its launch PSD divided by the
//! span-weighted sum of the three over every link of the route.
//!
//! Channel positions are expressed in slot units. Spacings only ever enter
//! the model as ratios against channel bandwidths, so no absolute frequency
//! anchor is needed.

use std::f64::consts::{LOG10_E, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QotError {
    #[error("physical parameter `{name}` must be strictly positive (got {value})")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("span attenuation must exceed 0 dB (got {0} dB)")]
    NoSpanLoss(f64),
    #[error("jamming power must be non-negative (got {0} dB)")]
    NegativeJamming(f64),
    #[error("channel width must be at least one slot")]
    ZeroWidth,
    #[error(
        "channels [{victim_start}, +{victim_width}) and [{interferer_start}, +{interferer_width}) overlap"
    )]
    Overlap {
        victim_start: u32,
        victim_width: u32,
        interferer_start: u32,
        interferer_width: u32,
    },
    #[error("victim channel at slot {0} is not present on the link")]
    VictimNotOnLink(u32),
    #[error("route has no links")]
    EmptyRoute,
    #[error("link must contain at least one span")]
    NoSpans,
}

pub type Result<T, E = QotError> = std::result::Result<T, E>;

/// Converts a decibel value into a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Fiber and amplifier constants.
///
/// Quantities are kept in the units they are usually quoted in; conversion to a
/// single consistent system happens in [`derive_coefficients`]. Lengths are in
/// kilometers throughout, so attenuation is per km, dispersion is s²/km and the
/// nonlinearity coefficient is 1/(W·km).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    /// Launch power of a circuit, watts.
    pub tx_power_w: f64,
    /// Width of one spectrum slot, hertz.
    pub slot_width_hz: f64,
    pub attenuation_db_per_km: f64,
    pub span_length_km: f64,
    /// Fiber nonlinearity coefficient, 1/(W·km).
    pub gamma_per_w_km: f64,
    /// Magnitude of the group velocity dispersion, ps²/km.
    pub beta2_ps2_per_km: f64,
    pub light_freq_hz: f64,
    /// Amplifier spontaneous emission factor, dB.
    pub noise_figure_db: f64,
    pub planck_js: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            tx_power_w: 1e-3,
            slot_width_hz: 12.5e9,
            attenuation_db_per_km: 0.2,
            span_length_km: 100.0,
            gamma_per_w_km: 1.22,
            beta2_ps2_per_km: 16.0,
            light_freq_hz: 1.93e14,
            noise_figure_db: 6.0,
            planck_js: 6.626_070_15e-34,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tx_power_w", self.tx_power_w),
            ("slot_width_hz", self.slot_width_hz),
            ("attenuation_db_per_km", self.attenuation_db_per_km),
            ("span_length_km", self.span_length_km),
            ("gamma_per_w_km", self.gamma_per_w_km),
            ("beta2_ps2_per_km", self.beta2_ps2_per_km),
            ("light_freq_hz", self.light_freq_hz),
            ("noise_figure_db", self.noise_figure_db),
            ("planck_js", self.planck_js),
        ];
        for (name, value) in fields {
            // also rejects NaN
            if value <= 0.0 || !value.is_finite() {
                return Err(QotError::NonPositiveParameter { name, value });
            }
        }
        if self.span_loss_db() <= 0.0 {
            return Err(QotError::NoSpanLoss(self.span_loss_db()));
        }
        Ok(())
    }

    /// Linear power attenuation coefficient, 1/km.
    pub fn alpha_per_km(&self) -> f64 {
        self.attenuation_db_per_km / (10.0 * LOG10_E)
    }

    pub fn span_loss_db(&self) -> f64 {
        self.attenuation_db_per_km * self.span_length_km
    }

    /// `e^(α·L)`, the power gain an amplifier must provide to undo one span.
    ///
    /// Evaluated as `10^(α_dB·L/10)`, which is the same quantity but exact for
    /// whole-decibel spans (20 dB gives exactly 100).
    pub fn span_gain(&self) -> f64 {
        db_to_linear(self.span_loss_db())
    }

    pub fn beta2_s2_per_km(&self) -> f64 {
        self.beta2_ps2_per_km * 1e-24
    }

    /// PSD of a circuit of `width_slots` slots launched at `tx_power_w`.
    pub fn launch_psd(&self, width_slots: u32) -> f64 {
        self.tx_power_w / self.bandwidth_hz(width_slots)
    }

    pub fn bandwidth_hz(&self, width_slots: u32) -> f64 {
        f64::from(width_slots) * self.slot_width_hz
    }

    /// Number of amplified spans needed to cover `length_km`, at least one.
    pub fn spans_for_length(&self, length_km: f64) -> u32 {
        ((length_km / self.span_length_km).ceil() as u32).max(1)
    }
}

/// Coefficients of the GN model derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    /// `3γ² / (2π·α·|β₂|)`, 1/(W²·s²).
    pub phi: f64,
    /// `π²·|β₂| / (2α)`, s².
    pub rho: f64,
    /// ASE noise PSD added by one amplified span, W/Hz.
    pub ase_psd_per_span: f64,
}

pub fn derive_coefficients(p: &PhysicalParams) -> Result<DerivedCoefficients> {
    p.validate()?;
    let alpha = p.alpha_per_km();
    let beta2 = p.beta2_s2_per_km();
    let phi = 3.0 * p.gamma_per_w_km * p.gamma_per_w_km / (2.0 * PI * alpha * beta2);
    let rho = PI * PI * beta2 / (2.0 * alpha);
    let ase_psd_per_span =
        (p.span_gain() - 1.0) * db_to_linear(p.noise_figure_db) * p.planck_js * p.light_freq_hz;
    Ok(DerivedCoefficients {
        phi,
        rho,
        ase_psd_per_span,
    })
}

/// Increase of a jammed channel's squared PSD over its legitimate value.
///
/// The jammer raises the channel power from `P` to `P·10^(ε/10)`. Writing the
/// linear excess as `e = P_J − P`, the increment is `(e² + 2eP)/Δ²`, which is
/// exactly `(P_J² − P²)/Δ²` so that `G² + increment = (P_J/Δ)²`.
pub fn jammed_increment(tx_power_w: f64, epsilon_db: f64, bandwidth_hz: f64) -> Result<f64> {
    if epsilon_db < 0.0 || epsilon_db.is_nan() {
        return Err(QotError::NegativeJamming(epsilon_db));
    }
    if epsilon_db == 0.0 {
        return Ok(0.0);
    }
    let jammed_power = tx_power_w * db_to_linear(epsilon_db);
    let excess = jammed_power - tx_power_w;
    Ok((excess * excess + 2.0 * excess * tx_power_w) / (bandwidth_hz * bandwidth_hz))
}

/// One circuit's footprint on a link, seen as a frequency-domain channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralChannel {
    pub start_slot: u32,
    pub width_slots: u32,
    /// Legitimate launch PSD, W/Hz.
    pub launch_psd: f64,
    /// Squared-PSD elevation caused by jamming, W²/Hz². Zero for clean channels.
    pub jammed_increment: f64,
}

impl SpectralChannel {
    pub fn new(start_slot: u32, width_slots: u32, epsilon_db: f64, p: &PhysicalParams) -> Result<Self> {
        if width_slots == 0 {
            return Err(QotError::ZeroWidth);
        }
        let bandwidth = p.bandwidth_hz(width_slots);
        Ok(Self {
            start_slot,
            width_slots,
            launch_psd: p.tx_power_w / bandwidth,
            jammed_increment: jammed_increment(p.tx_power_w, epsilon_db, bandwidth)?,
        })
    }

    /// Center position in half-slot units (`2·start + width`), always integral.
    pub fn center_half_slots(&self) -> u64 {
        2 * u64::from(self.start_slot) + u64::from(self.width_slots)
    }

    /// Center position in slot units.
    pub fn center_slot(&self) -> f64 {
        self.center_half_slots() as f64 / 2.0
    }

    pub fn end_slot(&self) -> u32 {
        self.start_slot + self.width_slots
    }

    pub fn is_jammed(&self) -> bool {
        self.jammed_increment > 0.0
    }

    pub fn overlaps(&self, other: &SpectralChannel) -> bool {
        self.start_slot < other.end_slot() && other.start_slot < self.end_slot()
    }

    fn same_footprint(&self, other: &SpectralChannel) -> bool {
        self.start_slot == other.start_slot && self.width_slots == other.width_slots
    }
}

/// Cross-phase modulation weight `ln((f + Δf'/2) / (f − Δf'/2))` of an
/// interferer on a victim, `f` being their center spacing and `Δf'` the
/// interferer bandwidth.
///
/// Both are measured in slots; the slot width cancels. Overlapping channels
/// violate the model and are reported rather than evaluated.
pub fn xpm_weight(victim: &SpectralChannel, interferer: &SpectralChannel) -> Result<f64> {
    check_disjoint(victim, interferer)?;
    Ok(weight_from_half_slots(
        victim
            .center_half_slots()
            .abs_diff(interferer.center_half_slots()),
        interferer.width_slots,
    ))
}

#[inline]
fn weight_from_half_slots(spacing_half_slots: u64, interferer_width: u32) -> f64 {
    // (s + w/2) / (s - w/2) with s = d/2 is (d + w) / (d - w)
    let d = spacing_half_slots as f64;
    let w = f64::from(interferer_width);
    ((d + w) / (d - w)).ln()
}

#[inline]
fn check_disjoint(victim: &SpectralChannel, interferer: &SpectralChannel) -> Result<()> {
    if victim.overlaps(interferer) {
        return Err(QotError::Overlap {
            victim_start: victim.start_slot,
            victim_width: victim.width_slots,
            interferer_start: interferer.start_slot,
            interferer_width: interferer.width_slots,
        });
    }
    Ok(())
}

/// Source of XPM weights. [`ExactWeights`] evaluates the logarithm each time,
/// [`XpmTable`] looks up values precomputed with the same expression.
pub trait XpmWeights {
    fn weight(&self, victim: &SpectralChannel, interferer: &SpectralChannel) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactWeights;

impl XpmWeights for ExactWeights {
    fn weight(&self, victim: &SpectralChannel, interferer: &SpectralChannel) -> Result<f64> {
        xpm_weight(victim, interferer)
    }
}

/// Precomputed XPM weights for every spacing on a grid of `slots` slots and
/// every interferer width up to `max_width`. Lookups fall back to direct
/// evaluation outside that range, and return bit-identical values inside it.
#[derive(Debug, Clone)]
pub struct XpmTable {
    max_width: u32,
    max_spacing: u64,
    values: Vec<f64>,
}

impl XpmTable {
    pub fn new(slots: u32, max_width: u32) -> Self {
        let max_spacing = 2 * u64::from(slots);
        let stride = max_width as usize + 1;
        let mut values = vec![f64::NAN; (max_spacing as usize + 1) * stride];
        for d in 0..=max_spacing {
            for w in 1..=max_width {
                if d > u64::from(w) {
                    values[d as usize * stride + w as usize] = weight_from_half_slots(d, w);
                }
            }
        }
        Self {
            max_width,
            max_spacing,
            values,
        }
    }
}

impl XpmWeights for XpmTable {
    #[inline]
    fn weight(&self, victim: &SpectralChannel, interferer: &SpectralChannel) -> Result<f64> {
        check_disjoint(victim, interferer)?;
        let d = victim
            .center_half_slots()
            .abs_diff(interferer.center_half_slots());
        let w = interferer.width_slots;
        if w <= self.max_width && d <= self.max_spacing {
            Ok(self.values[d as usize * (self.max_width as usize + 1) + w as usize])
        } else {
            Ok(weight_from_half_slots(d, w))
        }
    }
}

/// Spectral content of one directed link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpectralState {
    span_count: u32,
    /// Sorted by start slot; pairwise disjoint.
    channels: Vec<SpectralChannel>,
}

impl LinkSpectralState {
    pub fn new(span_count: u32) -> Result<Self> {
        if span_count == 0 {
            return Err(QotError::NoSpans);
        }
        Ok(Self {
            span_count,
            channels: Vec::new(),
        })
    }

    pub fn span_count(&self) -> u32 {
        self.span_count
    }

    pub fn channels(&self) -> &[SpectralChannel] {
        &self.channels
    }

    /// Inserts a channel, keeping start-slot order. Fails if it overlaps a
    /// channel already on the link.
    pub fn insert(&mut self, channel: SpectralChannel) -> Result<()> {
        let pos = self
            .channels
            .partition_point(|c| c.start_slot < channel.start_slot);
        for neighbor in [pos.checked_sub(1), Some(pos)].into_iter().flatten() {
            if let Some(existing) = self.channels.get(neighbor) {
                check_disjoint(&channel, existing)?;
            }
        }
        self.channels.insert(pos, channel);
        Ok(())
    }

    /// Removes the channel starting at `start_slot`.
    pub fn remove(&mut self, start_slot: u32) -> Option<SpectralChannel> {
        let pos = self
            .channels
            .binary_search_by_key(&start_slot, |c| c.start_slot)
            .ok()?;
        Some(self.channels.remove(pos))
    }

    pub fn contains(&self, channel: &SpectralChannel) -> bool {
        self.channels
            .binary_search_by_key(&channel.start_slot, |c| c.start_slot)
            .is_ok_and(|i| self.channels[i].same_footprint(channel))
    }
}

/// Per-span NLI PSD of a victim on one link, split into the part a secure
/// network produces and the part added by jammed interferers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NliPsd {
    pub secure: f64,
    pub jam: f64,
}

pub fn nli_psd_on_link(
    victim: &SpectralChannel,
    link: &LinkSpectralState,
    coeff: &DerivedCoefficients,
    p: &PhysicalParams,
) -> Result<NliPsd> {
    nli_psd_on_link_with(victim, link, coeff, p, &ExactWeights)
}

pub fn nli_psd_on_link_with<W: XpmWeights>(
    victim: &SpectralChannel,
    link: &LinkSpectralState,
    coeff: &DerivedCoefficients,
    p: &PhysicalParams,
    weights: &W,
) -> Result<NliPsd> {
    if !link.contains(victim) {
        return Err(QotError::VictimNotOnLink(victim.start_slot));
    }
    let g = victim.launch_psd;
    let bandwidth = p.bandwidth_hz(victim.width_slots);
    let spm = g * g * (coeff.rho * bandwidth * bandwidth).asinh();
    let mut xpm = 0.0;
    let mut jam = 0.0;
    for other in link.channels() {
        if other.start_slot == victim.start_slot {
            continue;
        }
        let w = weights.weight(victim, other)?;
        xpm += other.launch_psd * other.launch_psd * w;
        if other.jammed_increment > 0.0 {
            jam += other.jammed_increment * w;
        }
    }
    Ok(NliPsd {
        secure: coeff.phi * g * (spm + xpm),
        jam: coeff.phi * g * jam,
    })
}

/// Route-accumulated noise PSDs of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseBreakdown {
    pub ase: f64,
    pub nli_secure: f64,
    pub nli_jam: f64,
}

impl NoiseBreakdown {
    pub fn total(&self) -> f64 {
        self.ase + self.nli_secure + self.nli_jam
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    pub linear: f64,
    pub db: f64,
}

impl Snr {
    pub fn from_linear(linear: f64) -> Self {
        Self {
            linear,
            db: linear_to_db(linear),
        }
    }
}

pub fn route_noise<'a, W, I>(
    victim: &SpectralChannel,
    links: I,
    coeff: &DerivedCoefficients,
    p: &PhysicalParams,
    weights: &W,
) -> Result<NoiseBreakdown>
where
    W: XpmWeights,
    I: IntoIterator<Item = &'a LinkSpectralState>,
{
    let mut noise = NoiseBreakdown::default();
    let mut any = false;
    for link in links {
        any = true;
        let spans = f64::from(link.span_count());
        let nli = nli_psd_on_link_with(victim, link, coeff, p, weights)?;
        noise.ase += spans * coeff.ase_psd_per_span;
        noise.nli_secure += spans * nli.secure;
        noise.nli_jam += spans * nli.jam;
    }
    if !any {
        return Err(QotError::EmptyRoute);
    }
    Ok(noise)
}

/// SNR of `victim` over the links of its route.
pub fn route_snr<'a, I>(
    victim: &SpectralChannel,
    links: I,
    coeff: &DerivedCoefficients,
    p: &PhysicalParams,
) -> Result<Snr>
where
    I: IntoIterator<Item = &'a LinkSpectralState>,
{
    route_snr_with(victim, links, coeff, p, &ExactWeights)
}

pub fn route_snr_with<'a, W, I>(
    victim: &SpectralChannel,
    links: I,
    coeff: &DerivedCoefficients,
    p: &PhysicalParams,
    weights: &W,
) -> Result<Snr>
where
    W: XpmWeights,
    I: IntoIterator<Item = &'a LinkSpectralState>,
{
    let noise = route_noise(victim, links, coeff, p, weights)?;
    Ok(Snr::from_linear(victim.launch_psd / noise.total()))
}
