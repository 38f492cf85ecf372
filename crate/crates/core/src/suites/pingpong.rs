//! Ping-pong evidence for the shipped filling pair.

use serde::Serialize;

use super::SuiteReport;
use crate::error::Result;
use crate::factor::FactorClass;
use crate::irreducible::{
    choose_power, cyclic_syllable_length, fill_check, pingpong_word, shipped_pair, syllable_power, EvidenceConfig,
    PingPongReport, PingPongSpec,
};
use crate::projection::{project_factor, SamplingConfig};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PingPongConstants {
    /// `M_emp`, usually taken from the Behrstock suite.
    pub m_emp: u64,
    /// Complexity bound for fill checks and `X`-sets.
    pub bound: usize,
    /// Iterates used for the Farey translation estimates.
    pub k_max: u32,
}

impl Default for PingPongConstants {
    fn default() -> Self {
        PingPongConstants {
            m_emp: 2,
            bound: 8,
            k_max: 8,
        }
    }
}

/// `max(diam π_A(B), diam π_B(A))` over the default splittings.
fn measured_d(a: &FactorClass, b: &FactorClass, cfg: &SamplingConfig) -> Result<u64> {
    let mut d = 0;
    for (x, y) in [(a, b), (b, a)] {
        let p = project_factor(x, y, cfg)?;
        if !p.is_empty() {
            d = d.max(p.diameter()?.upper.unwrap_or(0));
        }
    }
    Ok(d)
}

/// Full ping-pong report for `f^N g^N` on the shipped pair, with `N` chosen
/// from the measured constants.
pub fn pingpong_suite(c: PingPongConstants) -> Result<(PingPongReport, u64)> {
    let (f, g, a, b) = shipped_pair()?;
    let sampling = SamplingConfig::default();
    let d_emp = measured_d(&a, &b, &sampling)?;
    let spec0 = PingPongSpec::new(f, g, a, b, 1)?;
    let (f_a, g_b) = spec0.restrictions()?;
    let (n, _, _) = choose_power(&f_a, &g_b, c.m_emp, d_emp, c.k_max)?;
    let spec = PingPongSpec { n, ..spec0 };
    let cfg = EvidenceConfig {
        bound: c.bound,
        m_emp: c.m_emp,
        sampling,
        ..Default::default()
    };
    Ok((pingpong_word(&spec, &[1, 1], &cfg)?, d_emp))
}

/// Fill witness example, ping-pong evidence on the shipped pair and the
/// syllable-length identity.
pub fn progress_suite(c: PingPongConstants) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("progress", 1, 0);
    let ab = FactorClass::parse(3, "a,b")?;
    let bc = FactorClass::parse(3, "b,c")?;
    let want = FactorClass::parse(3, "cA")?;
    let fill = fill_check(&ab, &bc, 3)?;
    let has = fill.witnesses().iter().any(|v| v.code == want.code());
    rep.metric("example_fill_witness", has);
    if !has {
        rep.fail(format!("⟨cA⟩ not among witnesses {:?}", fill.witnesses()));
    }

    let (report, d_emp) = pingpong_suite(c)?;
    let ev = &report.evidence;
    rep.metric("m_emp", c.m_emp);
    rep.metric("d_emp", d_emp);
    rep.metric("n", report.spec.n as u64);
    rep.metric("translation_f", report.translation_f.clone());
    rep.metric("translation_g", report.translation_g.clone());
    rep.metric("shipped_fill_none", report.fill.found_none());
    if !report.fill.found_none() {
        rep.fail(format!("shipped pair has fill witnesses at bound {}", c.bound));
    }
    let s = &ev.invariant_search;
    rep.metric("invariant_candidates", s.candidates_checked);
    rep.metric("invariant_undecided", s.undecided);
    if let Some(f) = &s.found {
        rep.fail(format!("invariant factor {:?} at power {}", f.factor, f.power));
    }
    if s.undecided > 0 {
        rep.fail(format!("{} invariant-factor candidates undecided", s.undecided));
    }
    rep.metric("chain_passed", ev.chain.passed);
    if !ev.chain.passed {
        rep.fail(format!("chain failure {:?}", ev.chain.failure));
    }

    let mut identity = true;
    for e in [vec![1, 1], vec![1, -1], vec![2, -1, 3, 1], vec![1, 2, 1, 2]] {
        for m in 1..=4 {
            if cyclic_syllable_length(&syllable_power(&e, m)) != m * cyclic_syllable_length(&e) {
                identity = false;
                rep.fail(format!("syllable identity fails for {e:?}, m = {m}"));
            }
        }
    }
    rep.metric("syllable_identity", identity);
    Ok(rep)
}
