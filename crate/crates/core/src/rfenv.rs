//! Radio environment: scenario configuration, M-DAA geometry, urban-micro
//! street-canyon path loss, thermal noise, and per-link budgets.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Thermal noise density at the reference temperature, dBm/Hz.
const NOISE_FLOOR_DBM_HZ: f64 = -174.0;
/// Speed of light, m/s.
const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Shortest separation the path-loss model accepts, m.
pub const MIN_LINK_DISTANCE_M: f64 = 1.0;

/// How transmit power scales with the number of jointly transmitting UEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    /// Every UE transmits at the full per-UE power.
    #[serde(rename = "full")]
    FullPower,
    /// The per-UE budget is split so the group total equals one UE's power.
    Normalized,
}

impl fmt::Display for PowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerMode::FullPower => "full",
            PowerMode::Normalized => "normalized",
        })
    }
}

/// Line-of-sight handling for a class of links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosMode {
    Los,
    Nlos,
    /// Drawn per link from the distance-dependent LOS probability.
    #[serde(rename = "prob")]
    Probabilistic,
}

impl fmt::Display for LosMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LosMode::Los => "los",
            LosMode::Nlos => "nlos",
            LosMode::Probabilistic => "prob",
        })
    }
}

/// Which endpoints a link connects; selects the antenna heights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    UeToBs,
    UeToUe,
}

/// Scenario parameters for one simulation.
///
/// Defaults reproduce the reference urban-micro setup: 7.5 GHz carrier,
/// 10 MHz per phase, a 20 m BS serving 2 m UEs with (4, 2, 2) antennas,
/// 26 dBm multicast power, and 23 dBm uplink power per UE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(serialize = "F: Serialize", deserialize = "F: Deserialize<'de>"))]
pub struct ScenarioConfig<F: Real> {
    /// Carrier frequency, Hz.
    pub carrier_frequency: F,
    /// Phase-1 (multicast) bandwidth, Hz.
    pub bandwidth_phase1: F,
    /// Phase-2 (joint transmission) bandwidth, Hz.
    pub bandwidth_phase2: F,
    /// BS antenna height, m.
    pub bs_height: F,
    /// UE antenna height, m.
    pub ue_height: F,
    /// BS receive antennas.
    pub bs_rx_antennas: usize,
    /// UE transmit antennas.
    pub ue_tx_antennas: usize,
    /// UE receive antennas.
    pub ue_rx_antennas: usize,
    /// Serving UE multicast power, dBm.
    pub phase1_tx_power: F,
    /// Per-UE joint-transmission power, dBm.
    pub phase2_tx_power_per_ue: F,
    /// Full per-UE power versus a shared normalized budget in phase 2.
    pub power_mode: PowerMode,
    /// BS receiver noise figure, dB.
    pub noise_figure_bs: F,
    /// UE receiver noise figure, dB.
    pub noise_figure_ue: F,
    /// Radius of the disk collaborators are placed in, m.
    pub mdaa_radius: F,
    /// Horizontal serving-UE-to-BS distance, m.
    pub bs_distance: F,
    /// Number of collaborator UEs around the serving UE.
    pub num_collaborators: usize,
    /// Master seed for all random draws.
    pub rng_seed: u64,
    /// LOS handling for UE-to-BS links.
    pub los_mode_bs: LosMode,
    /// LOS handling for the short UE-to-UE links inside the M-DAA.
    pub los_mode_ue: LosMode,
    /// Adds log-normal shadow fading to every link when set.
    pub shadow_fading: bool,
    /// Average building height, m; carried for completeness, the
    /// street-canyon formulas have no term for it.
    pub avg_building_height: F,
}

impl<F: Real> Default for ScenarioConfig<F> {
    fn default() -> Self {
        ScenarioConfig {
            carrier_frequency: F::of(7.5e9),
            bandwidth_phase1: F::of(10e6),
            bandwidth_phase2: F::of(10e6),
            bs_height: F::of(20.0),
            ue_height: F::of(2.0),
            bs_rx_antennas: 4,
            ue_tx_antennas: 2,
            ue_rx_antennas: 2,
            phase1_tx_power: F::of(26.0),
            phase2_tx_power_per_ue: F::of(23.0),
            power_mode: PowerMode::FullPower,
            noise_figure_bs: F::of(9.0),
            noise_figure_ue: F::of(4.0),
            mdaa_radius: F::of(50.0),
            bs_distance: F::of(300.0),
            num_collaborators: 10,
            rng_seed: 0,
            los_mode_bs: LosMode::Nlos,
            los_mode_ue: LosMode::Los,
            shadow_fading: false,
            avg_building_height: F::of(20.0),
        }
    }
}

impl<F: Real> ScenarioConfig<F> {
    /// Checks every field against its allowed range.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_frequency", self.carrier_frequency),
            ("bandwidth_phase1", self.bandwidth_phase1),
            ("bandwidth_phase2", self.bandwidth_phase2),
            ("bs_height", self.bs_height),
            ("ue_height", self.ue_height),
            ("phase1_tx_power", self.phase1_tx_power),
            ("phase2_tx_power_per_ue", self.phase2_tx_power_per_ue),
            ("bs_distance", self.bs_distance),
        ];
        for (name, value) in positive {
            if !(value > F::zero()) || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        if !(self.mdaa_radius >= F::zero()) || !self.mdaa_radius.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mdaa_radius must be non-negative, got {}",
                self.mdaa_radius
            )));
        }
        for (name, value) in [
            ("bs_rx_antennas", self.bs_rx_antennas),
            ("ue_tx_antennas", self.ue_tx_antennas),
            ("ue_rx_antennas", self.ue_rx_antennas),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !self.noise_figure_bs.is_finite() || !self.noise_figure_ue.is_finite() {
            return Err(Error::InvalidConfig("noise figures must be finite".into()));
        }
        Ok(())
    }

    /// Antenna heights for a link of the given kind, (higher end, lower end).
    pub fn link_heights(&self, kind: LinkKind) -> (F, F) {
        match kind {
            LinkKind::UeToBs => (self.bs_height, self.ue_height),
            LinkKind::UeToUe => (self.ue_height, self.ue_height),
        }
    }
}

/// Position in the horizontal plane, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> Point2<F> {
    pub fn distance(&self, other: &Point2<F>) -> F {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Positions of the BS, the serving UE, and its collaborators.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement<F: Real> {
    pub bs_position: Point2<F>,
    pub serving_ue_position: Point2<F>,
    pub collaborator_positions: Vec<Point2<F>>,
}

impl<F: Real> Placement<F> {
    /// 3-D distance from the serving UE to collaborator `i`, floored at the
    /// model validity limit of 1 m. Both ends share the UE height.
    pub fn phase1_distance(&self, i: usize) -> F {
        self.serving_ue_position
            .distance(&self.collaborator_positions[i])
            .max(F::of(MIN_LINK_DISTANCE_M))
    }

    /// 3-D distance from a UE position to the BS, including the height gap.
    pub fn bs_distance_3d(&self, ue: &Point2<F>, cfg: &ScenarioConfig<F>) -> F {
        let horizontal = ue.distance(&self.bs_position);
        let dh = cfg.bs_height - cfg.ue_height;
        (horizontal * horizontal + dh * dh)
            .sqrt()
            .max(F::of(MIN_LINK_DISTANCE_M))
    }
}

/// Draws the M-DAA geometry: BS at the origin, serving UE `bs_distance`
/// away on the x-axis, collaborators i.i.d. uniform (by area) over the
/// disk of radius `mdaa_radius` around the serving UE.
pub fn place_mdaa<F: Real, R: Rng + ?Sized>(cfg: &ScenarioConfig<F>, rng: &mut R) -> Placement<F> {
    let serving = Point2 {
        x: cfg.bs_distance,
        y: F::zero(),
    };
    let two_pi = F::PI() + F::PI();
    let mut collaborators = Vec::with_capacity(cfg.num_collaborators);
    for _ in 0..cfg.num_collaborators {
        let radius = cfg.mdaa_radius * F::uniform_unit(rng).sqrt();
        let angle = two_pi * F::uniform_unit(rng);
        collaborators.push(Point2 {
            x: serving.x + radius * angle.cos(),
            y: serving.y + radius * angle.sin(),
        });
    }
    Placement {
        bs_position: Point2 {
            x: F::zero(),
            y: F::zero(),
        },
        serving_ue_position: serving,
        collaborator_positions: collaborators,
    }
}

/// Street-canyon UMi path loss in dB at a 3-D distance, for antennas at
/// heights `h_high` and `h_low` (m).
///
/// LOS uses the dual-slope form with breakpoint `4 h'_high h'_low f_c / c`
/// (effective heights reduced by 1 m); NLOS takes the maximum of the LOS
/// value and the NLOS expression. Distances below 1 m are outside the
/// model's validity and rejected.
pub fn umi_pathloss_db<F: Real>(
    distance_3d: F,
    carrier_hz: F,
    h_high: F,
    h_low: F,
    los: bool,
) -> Result<F> {
    if !(distance_3d >= F::of(MIN_LINK_DISTANCE_M)) {
        return Err(Error::InvalidInput(format!(
            "link distance {distance_3d} m is below the {MIN_LINK_DISTANCE_M} m validity floor"
        )));
    }
    let f_ghz = carrier_hz / F::of(1e9);
    let log_d = distance_3d.log10();
    let log_f = f_ghz.log10();

    let eff_high = (h_high - F::one()).max(F::zero());
    let eff_low = (h_low - F::one()).max(F::zero());
    let breakpoint = F::of(4.0) * eff_high * eff_low * carrier_hz / F::of(SPEED_OF_LIGHT);

    let pl_los = if breakpoint <= F::zero() || distance_3d <= breakpoint {
        F::of(32.4) + F::of(21.0) * log_d + F::of(20.0) * log_f
    } else {
        let dh = h_high - h_low;
        F::of(32.4) + F::of(40.0) * log_d + F::of(20.0) * log_f
            - F::of(9.5) * (breakpoint * breakpoint + dh * dh).log10()
    };
    if los {
        return Ok(pl_los);
    }
    let terminal = h_low.min(h_high);
    let pl_nlos = F::of(22.4) + F::of(35.3) * log_d + F::of(21.3) * log_f
        - F::of(0.3) * (terminal - F::of(1.5));
    Ok(pl_los.max(pl_nlos))
}

/// Path loss in dB between a UE and the BS of the given scenario.
pub fn pathloss_db<F: Real>(distance_3d: F, cfg: &ScenarioConfig<F>, los: bool) -> Result<F> {
    umi_pathloss_db(distance_3d, cfg.carrier_frequency, cfg.bs_height, cfg.ue_height, los)
}

/// Probability that a UMi link of the given 2-D distance is line-of-sight.
pub fn los_probability<F: Real>(distance_2d: F) -> F {
    let d18 = F::of(18.0);
    if distance_2d <= d18 {
        return F::one();
    }
    let ratio = d18 / distance_2d;
    ratio + (-distance_2d / F::of(36.0)).exp() * (F::one() - ratio)
}

/// Standard deviation of log-normal shadow fading, dB.
pub fn shadow_sigma_db<F: Real>(los: bool) -> F {
    if los {
        F::of(4.0)
    } else {
        F::of(7.82)
    }
}

/// Converts dBm to watts.
pub fn dbm_to_watts<F: Real>(dbm: F) -> F {
    F::of(10.0).powf((dbm - F::of(30.0)) / F::of(10.0))
}

/// Converts watts to dBm.
pub fn watts_to_dbm<F: Real>(watts: F) -> F {
    F::of(10.0) * (watts * F::of(1000.0)).log10()
}

/// Thermal noise power in watts over a bandwidth with a receiver noise
/// figure: -174 dBm/Hz + 10 log10(B) + NF.
pub fn noise_variance_w<F: Real>(bandwidth_hz: F, noise_figure_db: F) -> F {
    let dbm = F::of(NOISE_FLOOR_DBM_HZ) + F::of(10.0) * bandwidth_hz.log10() + noise_figure_db;
    dbm_to_watts(dbm)
}

/// Large-scale budget of one link: gain, power, energy, noise, and the
/// precomputed SNR scale `P * G / (noise * N_t)` that multiplies the
/// channel Gram matrix in every rate expression.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget<F: Real> {
    /// Linear path gain, `10^(-PL/10)`.
    pub pathloss_gain: F,
    /// Transmit power, W.
    pub tx_power: F,
    /// Energy per symbol `P / B`, J.
    pub symbol_energy: F,
    /// Noise power at the receiver, W.
    pub noise_variance: F,
    /// `tx_power * pathloss_gain / (noise_variance * n_tx)`.
    pub snr_scale: F,
}

impl<F: Real> LinkBudget<F> {
    /// The same budget with `extra_db` of additional loss (shadow fading).
    pub fn with_extra_loss_db(&self, extra_db: F, n_tx: usize) -> LinkBudget<F> {
        let factor = F::of(10.0).powf(-extra_db / F::of(10.0));
        let gain = self.pathloss_gain * factor;
        LinkBudget {
            pathloss_gain: gain,
            snr_scale: self.tx_power * gain / (self.noise_variance * F::of(n_tx as f64)),
            ..*self
        }
    }
}

/// Builds the budget for one link from transmit power, distance, bandwidth,
/// and receiver noise figure; `kind` picks the antenna heights and `los`
/// the path-loss branch. Transmit antennas are always the UE's.
pub fn link_budget<F: Real>(
    tx_power_dbm: F,
    distance_3d: F,
    bandwidth_hz: F,
    noise_figure_db: F,
    cfg: &ScenarioConfig<F>,
    kind: LinkKind,
    los: bool,
) -> Result<LinkBudget<F>> {
    let (h_high, h_low) = cfg.link_heights(kind);
    let pl_db = umi_pathloss_db(distance_3d, cfg.carrier_frequency, h_high, h_low, los)?;
    let gain = F::of(10.0).powf(-pl_db / F::of(10.0));
    let tx_power = dbm_to_watts(tx_power_dbm);
    let noise = noise_variance_w(bandwidth_hz, noise_figure_db);
    let n_tx = F::of(cfg.ue_tx_antennas as f64);
    Ok(LinkBudget {
        pathloss_gain: gain,
        tx_power,
        symbol_energy: tx_power / bandwidth_hz,
        noise_variance: noise,
        snr_scale: tx_power * gain / (noise * n_tx),
    })
}

/// Per-UE transmit power under the given power mode: unchanged for
/// [`PowerMode::FullPower`], an equal split of the single-UE budget across
/// `num_ues` transmitters for [`PowerMode::Normalized`].
pub fn normalize_power<F: Real>(per_ue_power_dbm: F, num_ues: usize, mode: PowerMode) -> F {
    assert!(num_ues >= 1, "normalize_power needs at least one UE");
    match mode {
        PowerMode::FullPower => per_ue_power_dbm,
        PowerMode::Normalized => {
            per_ue_power_dbm - F::of(10.0) * F::of(num_ues as f64).log10()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> ScenarioConfig<f64> {
        ScenarioConfig::default()
    }

    #[test]
    fn defaults_match_reference_setup() {
        let c = cfg();
        assert_eq!(c.carrier_frequency, 7.5e9);
        assert_eq!(c.bandwidth_phase1, 10e6);
        assert_eq!(c.bandwidth_phase2, 10e6);
        assert_eq!((c.bs_height, c.ue_height), (20.0, 2.0));
        assert_eq!(
            (c.bs_rx_antennas, c.ue_tx_antennas, c.ue_rx_antennas),
            (4, 2, 2)
        );
        assert_eq!((c.phase1_tx_power, c.phase2_tx_power_per_ue), (26.0, 23.0));
        assert_eq!((c.noise_figure_bs, c.noise_figure_ue), (9.0, 4.0));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let mut c = cfg();
        c.bandwidth_phase1 = 0.0;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = cfg();
        c.mdaa_radius = -1.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.ue_tx_antennas = 0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.bs_distance = f64::NAN;
        assert!(c.validate().is_err());
        // A zero-radius disk is a legal degenerate case.
        let mut c = cfg();
        c.mdaa_radius = 0.0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let c = cfg();
        let text = toml::to_string(&c).unwrap();
        let back: ScenarioConfig<f64> = toml::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_config_file_fills_defaults() {
        let back: ScenarioConfig<f64> =
            toml::from_str("bs_distance = 500.0\npower_mode = \"normalized\"").unwrap();
        assert_eq!(back.bs_distance, 500.0);
        assert_eq!(back.power_mode, PowerMode::Normalized);
        assert_eq!(back.carrier_frequency, 7.5e9);
        assert_eq!(back.los_mode_bs, LosMode::Nlos);
    }

    #[test]
    fn los_pathloss_at_100m() {
        let pl = umi_pathloss_db(100.0f64, 7.5e9, 20.0, 2.0, true).unwrap();
        assert!((pl - 91.901225267834).abs() < 1e-9, "got {pl}");
    }

    #[test]
    fn nlos_pathloss_at_100m() {
        // 22.4 + 35.3*log10(100) + 21.3*log10(7.5) - 0.3*(2 - 1.5), which
        // exceeds the LOS value so the max picks it.
        let pl = umi_pathloss_db(100.0f64, 7.5e9, 20.0, 2.0, false).unwrap();
        assert!((pl - 111.48880491024333).abs() < 1e-9, "got {pl}");
    }

    #[test]
    fn nlos_never_below_los() {
        for d in [1.0, 5.0, 20.0, 100.0, 500.0, 2000.0] {
            let los = umi_pathloss_db(d, 7.5e9f64, 20.0, 2.0, true).unwrap();
            let nlos = umi_pathloss_db(d, 7.5e9f64, 20.0, 2.0, false).unwrap();
            assert!(nlos >= los, "d = {d}: NLOS {nlos} < LOS {los}");
        }
    }

    #[test]
    fn doubling_distance_adds_fixed_loss_before_breakpoint() {
        // Pre-breakpoint LOS slope is 21 dB/decade.
        let expect = 21.0 * 2.0f64.log10();
        let a = umi_pathloss_db(100.0f64, 7.5e9, 20.0, 2.0, true).unwrap();
        let b = umi_pathloss_db(200.0f64, 7.5e9, 20.0, 2.0, true).unwrap();
        assert!((b - a - expect).abs() < 1e-9);
    }

    #[test]
    fn pathloss_monotone_within_each_branch() {
        // BS-UE breakpoint sits at 4 * 19 * 1 * f / c (about 1.9 km); stay
        // on each side of it.
        for los in [true, false] {
            let mut prev = 0.0;
            for d in [1.0, 10.0, 50.0, 200.0, 800.0, 1800.0] {
                let pl = umi_pathloss_db(d, 7.5e9f64, 20.0, 2.0, los).unwrap();
                assert!(pl > prev, "los={los}: loss not increasing at {d} m");
                prev = pl;
            }
            let mut prev = 0.0;
            for d in [2000.0, 4000.0, 8000.0] {
                let pl = umi_pathloss_db(d, 7.5e9f64, 20.0, 2.0, los).unwrap();
                assert!(pl > prev);
                prev = pl;
            }
        }
    }

    #[test]
    fn post_breakpoint_branch_is_used_for_ue_links() {
        // UE-UE effective heights of 1 m put the breakpoint at ~100 m;
        // beyond it the slope steepens to 40 dB/decade.
        let near = umi_pathloss_db(150.0f64, 7.5e9, 2.0, 2.0, true).unwrap();
        let far = umi_pathloss_db(300.0f64, 7.5e9, 2.0, 2.0, true).unwrap();
        assert!((far - near - 40.0 * 2.0f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn distances_below_validity_floor_are_rejected() {
        assert!(matches!(
            umi_pathloss_db(0.5f64, 7.5e9, 20.0, 2.0, true),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn noise_variance_spot_value() {
        // 10 MHz at NF 9 dB: -174 + 70 + 9 = -95 dBm.
        let w = noise_variance_w(10e6f64, 9.0);
        assert!((watts_to_dbm(w) + 95.0).abs() < 1e-9, "got {} dBm", watts_to_dbm(w));
        // 1 Hz at NF 0 dB is the raw noise floor.
        let floor = noise_variance_w(1.0f64, 0.0);
        assert!((watts_to_dbm(floor) + 174.0).abs() < 1e-9);
    }

    #[test]
    fn noise_scales_linearly_with_bandwidth() {
        let one = noise_variance_w(10e6f64, 9.0);
        let two = noise_variance_w(20e6f64, 9.0);
        assert!((two / one - 2.0).abs() < 1e-12);
    }

    #[test]
    fn link_budget_received_power() {
        let c = cfg();
        let b = link_budget(23.0, 100.0, 10e6, 9.0, &c, LinkKind::UeToBs, true).unwrap();
        let rx_dbm = watts_to_dbm(b.tx_power * b.pathloss_gain);
        assert!((rx_dbm - (23.0 - 91.901225267834)).abs() < 1e-9, "got {rx_dbm}");
        assert!(b.pathloss_gain > 0.0 && b.pathloss_gain <= 1.0);
        assert!(b.noise_variance > 0.0 && b.symbol_energy > 0.0);
        let expect_scale = b.tx_power * b.pathloss_gain / (b.noise_variance * 2.0);
        assert!((b.snr_scale - expect_scale).abs() < 1e-18);
        assert!((b.symbol_energy - b.tx_power / 10e6).abs() < 1e-18);
    }

    #[test]
    fn extra_loss_rescales_gain_and_snr() {
        let c = cfg();
        let b = link_budget(23.0, 100.0, 10e6, 9.0, &c, LinkKind::UeToBs, true).unwrap();
        let shadowed = b.with_extra_loss_db(10.0, 2);
        assert!((shadowed.pathloss_gain / b.pathloss_gain - 0.1).abs() < 1e-12);
        assert!((shadowed.snr_scale / b.snr_scale - 0.1).abs() < 1e-12);
    }

    #[test]
    fn normalized_power_splits_the_budget() {
        assert_eq!(normalize_power(23.0f64, 1, PowerMode::Normalized), 23.0);
        let ten = normalize_power(23.0f64, 10, PowerMode::Normalized);
        assert!((ten - 13.0).abs() < 1e-12);
        assert_eq!(normalize_power(23.0f64, 10, PowerMode::FullPower), 23.0);
        // Sum of linear per-UE powers equals the configured total.
        for n in [1usize, 2, 5, 10, 17] {
            let per = normalize_power(23.0f64, n, PowerMode::Normalized);
            let sum = n as f64 * dbm_to_watts(per);
            assert!((sum / dbm_to_watts(23.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn placement_is_deterministic_and_in_disk() {
        let c = cfg();
        let a = place_mdaa(&c, &mut ChaCha8Rng::seed_from_u64(9));
        let b = place_mdaa(&c, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert_eq!(a.collaborator_positions.len(), 10);
        assert_eq!(a.serving_ue_position.distance(&a.bs_position), c.bs_distance);
        for p in &a.collaborator_positions {
            assert!(a.serving_ue_position.distance(p) <= c.mdaa_radius + 1e-12);
        }
    }

    #[test]
    fn zero_radius_collapses_to_serving_position() {
        let mut c = cfg();
        c.mdaa_radius = 0.0;
        let p = place_mdaa(&c, &mut ChaCha8Rng::seed_from_u64(1));
        for col in &p.collaborator_positions {
            assert_eq!(*col, p.serving_ue_position);
        }
        // Path-loss distances are floored at 1 m for degenerate placements.
        assert_eq!(p.phase1_distance(0), 1.0);
    }

    #[test]
    fn disk_sampling_mean_radius() {
        // Area-uniform sampling over a disk has mean radius 2R/3.
        let mut c = cfg();
        c.mdaa_radius = 50.0;
        c.num_collaborators = 100_000;
        let p = place_mdaa(&c, &mut ChaCha8Rng::seed_from_u64(4));
        let mean: f64 = p
            .collaborator_positions
            .iter()
            .map(|q| p.serving_ue_position.distance(q))
            .sum::<f64>()
            / 1e5;
        let expect = 2.0 / 3.0 * 50.0;
        assert!(
            (mean / expect - 1.0).abs() < 0.01,
            "mean radius {mean}, expected {expect} within 1%"
        );
    }

    #[test]
    fn bs_distance_includes_height_gap() {
        let c = cfg();
        let p = place_mdaa(&c, &mut ChaCha8Rng::seed_from_u64(2));
        let d = p.bs_distance_3d(&p.serving_ue_position, &c);
        let expect = (300.0f64.powi(2) + 18.0f64.powi(2)).sqrt();
        assert!((d - expect).abs() < 1e-9);
    }

    #[test]
    fn los_probability_shape() {
        assert_eq!(los_probability(5.0f64), 1.0);
        assert_eq!(los_probability(18.0f64), 1.0);
        let p36 = los_probability(36.0f64);
        let expect = 0.5 + (-1.0f64).exp() * 0.5;
        assert!((p36 - expect).abs() < 1e-12);
        let mut prev = 1.0;
        for d in [20.0, 50.0, 100.0, 300.0, 1000.0] {
            let p = los_probability(d);
            assert!(p < prev && p > 0.0);
            prev = p;
        }
    }

    #[test]
    fn shadow_sigma_values() {
        assert_eq!(shadow_sigma_db::<f64>(true), 4.0);
        assert_eq!(shadow_sigma_db::<f64>(false), 7.82);
    }
}
