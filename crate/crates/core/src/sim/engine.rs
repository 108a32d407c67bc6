// SPDX-License-Identifier: Apache-2.0

//! Scenario execution: one seeded RNG drives every random choice, phases run
//! in a fixed order, and each phase's arithmetic is counted separately.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::config::{ScenarioConfig, ScenarioPhase, SecretSource};
use super::report::{
    fixture_hash, secrecy_findings, Cheater, DegenerateEvent, DetectionSummary, DisputeRecord, MembershipRecord,
    Prover, ReconstructionRecord, ScenarioReport, VerificationRecord,
};
use super::strategy::{AdversaryStrategy, LambdaForm, Role};
use crate::encoding::biguint_to_hex;
use crate::error::{Error, Result};
use crate::fixture::Fixture;
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::ops::{self, OpCounts};
use crate::protocols::{
    dealer_publish_masked, participant_publish_masked, run_dispute, run_membership, DealerScript, Dispute,
    MembershipChallenge, MembershipVerdict, ParticipantResponder, ParticipantScript, Verdict,
};
use crate::pvss::{self, decrypt_share, encrypt_for_submission, verify_share, xor_mask, EncryptedShare, KeyPair};
use crate::shamir::IndexedShare;

/// How a cheating dealer deviates in one sub-run.
#[derive(Debug, Clone)]
enum DealerDeviation {
    /// Deals and defends s' as if it were the share.
    InvalidShare(Scalar),
    /// Deals and defends a corrupted lambda; the step-2 value stays honest.
    Lambda { form: LambdaForm, s_alt: Option<Scalar>, pk_alt: Option<GroupElement> },
}

#[derive(Debug, Clone)]
struct DealerCase {
    substitution: String,
    encrypted: EncryptedShare,
    deviation: DealerDeviation,
}

struct Engine<'c> {
    config: &'c ScenarioConfig,
    params: GroupParams,
    rng: ChaCha20Rng,
    report: ScenarioReport,
    held: BTreeMap<u64, Option<Scalar>>,
}

/// Runs one scenario. Identical configs give identical reports.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let params = config.params.resolve(config.seed)?;
    if BigUint::from(config.n) >= params.q {
        return Err(Error::Config(format!("n = {} must be below q", config.n)));
    }
    let mut op_counts: BTreeMap<String, OpCounts> =
        ScenarioPhase::ALL.iter().map(|p| (p.name().to_string(), OpCounts::default())).collect();
    op_counts.insert("audit".into(), OpCounts::default());
    let report = ScenarioReport {
        config: config.clone(),
        params: params.clone(),
        fixture_hash: None,
        bulletin_consistent: None,
        verifications: Vec::new(),
        disputes: Vec::new(),
        membership: Vec::new(),
        reconstruction: None,
        detection: DetectionSummary::default(),
        op_counts,
        degenerate_events: Vec::new(),
        secrecy_violations: Vec::new(),
    };
    let mut engine =
        Engine { config, params, rng: ChaCha20Rng::seed_from_u64(config.seed), report, held: BTreeMap::new() };
    engine.run()?;
    Ok(engine.report)
}

/// Runs independent scenarios on separate threads. Results come back in
/// input order.
pub fn run_scenarios(configs: &[ScenarioConfig]) -> Vec<Result<ScenarioReport>> {
    let sink = Mutex::new(BTreeMap::new());
    std::thread::scope(|scope| {
        for (i, config) in configs.iter().enumerate() {
            let sink = &sink;
            scope.spawn(move || {
                let r = run_scenario(config);
                sink.lock().expect("report sink poisoned").insert(i, r);
            });
        }
    });
    sink.into_inner().expect("report sink poisoned").into_values().collect()
}

impl Engine<'_> {
    fn count(&mut self, key: &str, c: OpCounts) {
        *self.report.op_counts.entry(key.to_string()).or_default() += c;
    }

    fn degenerate(&mut self, phase: ScenarioPhase, index: Option<u64>, cause: impl Into<String>) {
        self.report.degenerate_events.push(DegenerateEvent { phase, index, cause: cause.into() });
    }

    fn dealer_strategy(&self) -> Option<&AdversaryStrategy> {
        self.config.strategies.iter().find(|s| s.role() == Role::Dealer)
    }

    fn participant_strategy(&self, i: u64) -> Option<&AdversaryStrategy> {
        self.config.strategies.iter().find(|s| s.role() == Role::Participant && s.target() == Some(i))
    }

    fn run(&mut self) -> Result<()> {
        if !self.config.runs(ScenarioPhase::Deal) {
            return Ok(());
        }
        let (mut fx, reconstructor) = self.deal()?;
        let cases = self.dealer_cases(&fx)?;
        if let Some((target, first)) = cases.as_ref().and_then(|(t, c)| c.first().map(|c| (*t, c))) {
            fx.board.deal.encrypted_shares.insert(target, first.encrypted.clone());
        }
        self.report.fixture_hash = Some(fixture_hash(&fx.board)?);

        if self.config.runs(ScenarioPhase::Verify) {
            self.verify(&fx);
        }
        if self.config.runs(ScenarioPhase::Dispute) {
            let (r, c) = ops::measure(|| self.disputes(&fx, cases.as_ref()));
            self.count("dispute", c);
            r?;
        }
        if self.config.runs(ScenarioPhase::Membership) {
            let (r, c) = ops::measure(|| self.membership(&fx));
            self.count("membership", c);
            r?;
        }
        if self.config.runs(ScenarioPhase::Reconstruct) {
            let (r, c) = ops::measure(|| self.reconstruct(&fx, &reconstructor));
            self.count("reconstruct", c);
            r?;
        }
        Ok(())
    }

    /// Key generation, then the deal. A deal that hands some participant a
    /// zero share is logged and redone once.
    fn deal(&mut self) -> Result<(Fixture, KeyPair)> {
        let params = self.params.clone();
        let keys: BTreeMap<u64, KeyPair> =
            (1..=self.config.n).map(|i| (i, KeyPair::generate(&params, &mut self.rng))).collect();
        let reconstructor = KeyPair::generate(&params, &mut self.rng);
        let secret = match &self.config.secret {
            SecretSource::Explicit(v) => {
                params.scalar(v.clone()).map_err(|_| Error::Config("secret must be below q".into()))?
            }
            SecretSource::Random => params.random_scalar(&mut self.rng),
        };
        let pubkeys: BTreeMap<u64, GroupElement> = keys.iter().map(|(i, kp)| (*i, kp.pk.clone())).collect();

        let mut attempt = 0;
        let (poly, deal) = loop {
            let rng = &mut self.rng;
            let (dealt, c) = ops::measure(|| pvss::deal(&params, &secret, self.config.k, self.config.n, &pubkeys, rng));
            self.count("deal", c);
            let (poly, deal) = dealt?;
            let zeros: Vec<u64> = (1..=self.config.n).filter(|&i| poly.eval(i, &params.q).share.is_zero()).collect();
            let cause = if attempt == 0 { "zero share, re-dealing" } else { "zero share persisted after re-deal" };
            for &i in &zeros {
                self.degenerate(ScenarioPhase::Deal, Some(i), cause);
            }
            if zeros.is_empty() || attempt == 1 {
                break (poly, deal);
            }
            attempt += 1;
        };
        let board = pvss::BulletinBoard { params: params.clone(), k: self.config.k, n: self.config.n, deal, pubkeys };
        Ok((Fixture { params, poly, keys, board }, reconstructor))
    }

    /// Expands the dealer strategy into one case per substituted value. The
    /// first case's E is the one published on the board.
    fn dealer_cases(&mut self, fx: &Fixture) -> Result<Option<(u64, Vec<DealerCase>)>> {
        let Some(strategy) = self.dealer_strategy().cloned() else {
            return Ok(None);
        };
        let params = self.params.clone();
        let mut cases = Vec::new();
        let (target, deviations) = match &strategy {
            AdversaryStrategy::DealerInvalidShare { target, substitution } => {
                let s = fx.share(*target).share;
                let values = substitution.values(&params, 0, s.value(), &mut self.rng)?;
                let devs = values
                    .into_iter()
                    .map(|v| (format!("s'={}", biguint_to_hex(&v)), DealerDeviation::InvalidShare(params.reduce(&v))))
                    .collect::<Vec<_>>();
                (*target, devs)
            }
            AdversaryStrategy::DealerLambdaVariant { target, form, share_substitution, key_substitution } => {
                let s = fx.share(*target).share;
                let shares: Vec<Option<BigUint>> = match share_substitution {
                    Some(sub) => sub.values(&params, 0, s.value(), &mut self.rng)?.into_iter().map(Some).collect(),
                    None => vec![None],
                };
                let keys: Vec<Option<BigUint>> = match key_substitution {
                    Some(sub) => sub
                        .values(&params, 1, fx.key(*target).sk.value(), &mut self.rng)?
                        .into_iter()
                        .map(Some)
                        .collect(),
                    None => vec![None],
                };
                let mut devs = Vec::new();
                for s_alt in &shares {
                    for a_alt in &keys {
                        let mut desc = Vec::new();
                        if let Some(v) = s_alt {
                            desc.push(format!("s'={}", biguint_to_hex(v)));
                        }
                        if let Some(v) = a_alt {
                            desc.push(format!("a'={}", biguint_to_hex(v)));
                        }
                        devs.push((
                            desc.join(","),
                            DealerDeviation::Lambda {
                                form: *form,
                                s_alt: s_alt.as_ref().map(|v| params.reduce(v)),
                                pk_alt: a_alt.as_ref().map(|v| params.g_pow(v)),
                            },
                        ));
                    }
                }
                (*target, devs)
            }
            _ => unreachable!("dealer_strategy returns dealer roles only"),
        };
        let s = fx.share(target).share;
        let pk = fx.key(target).pk.clone();
        for (substitution, deviation) in deviations {
            let encrypted = match &deviation {
                DealerDeviation::InvalidShare(s_alt) => {
                    let mask = params.mod_exp(&pk, s_alt.value());
                    xor_mask(s_alt.value(), mask.value(), params.byte_len)?
                }
                DealerDeviation::Lambda { form, s_alt, pk_alt } => {
                    form.lambda(&params, &s, &pk, s_alt.as_ref(), pk_alt.as_ref())?
                }
            };
            cases.push(DealerCase { substitution, encrypted, deviation });
        }
        Ok(Some((target, cases)))
    }

    /// What participant `i` decrypts from `encrypted`, if it verifies.
    fn check_share(&self, fx: &Fixture, i: u64, encrypted: &EncryptedShare) -> std::result::Result<Scalar, String> {
        let params = &self.params;
        let image = fx.board.share_image(i).ok_or("no share image")?;
        let s = decrypt_share(params, encrypted, &fx.key(i).sk, image).map_err(|e| e.to_string())?;
        if verify_share(params, &s, &fx.board.deal.commitments, i) {
            Ok(s)
        } else {
            Err("share does not match the commitments".into())
        }
    }

    fn held_share(&mut self, fx: &Fixture, i: u64) -> Option<Scalar> {
        if let Some(s) = self.held.get(&i) {
            return s.clone();
        }
        let s = self.check_share(fx, i, &fx.board.deal.encrypted_shares[&i]).ok();
        self.held.insert(i, s.clone());
        s
    }

    fn verify(&mut self, fx: &Fixture) {
        let (records, c) = ops::measure(|| {
            (1..=self.config.n)
                .map(|i| (i, self.check_share(fx, i, &fx.board.deal.encrypted_shares[&i])))
                .collect::<Vec<_>>()
        });
        self.count("verify", c);
        for (index, r) in records {
            self.report.verifications.push(VerificationRecord {
                index,
                accepted: r.is_ok(),
                error: r.as_ref().err().cloned(),
            });
            self.held.insert(index, r.ok());
        }
        let (consistent, c) = ops::measure(|| pvss::verify_bulletin(&fx.board).is_ok());
        self.count("audit", c);
        self.report.bulletin_consistent = Some(consistent);
    }

    fn record_dispute(
        &mut self,
        fx: &Fixture,
        d: Dispute<'_>,
        strategy: String,
        substitution: Option<String>,
        expected: Cheater,
    ) {
        let index = d.state().index();
        let verdict = d.verdict().expect("run_dispute always closes the dispute");
        let ruled = Cheater::ruled(verdict);
        let det = &mut self.report.detection;
        det.disputes += 1;
        if verdict == Verdict::Unresolvable {
            det.degenerate += 1;
        } else if ruled == expected {
            det.correct += 1;
        } else if ruled != Cheater::None {
            det.false_accusations += 1;
        } else {
            det.missed += 1;
        }
        if verdict == Verdict::Unresolvable {
            self.degenerate(ScenarioPhase::Dispute, Some(index), "degenerate exponent, dispute unresolvable");
        }
        let context = format!("dispute {index} ({strategy})");
        let transcript = d.into_transcript();
        let findings = secrecy_findings(&transcript, fx.share(index).share.value(), &context);
        self.report.secrecy_violations.extend(findings);
        self.report.disputes.push(DisputeRecord {
            index,
            strategy,
            substitution,
            expected_cheater: expected,
            verdict,
            ruled_cheater: ruled,
            transcript,
        });
    }

    fn honest_dealer(&self, fx: &Fixture, i: u64) -> DealerScript {
        DealerScript::honest(&self.params, &fx.share(i).share, &fx.key(i).pk)
    }

    fn honest_participant(&self, fx: &Fixture, i: u64) -> ParticipantScript {
        ParticipantScript::honest(&self.params, &fx.key(i).sk, &fx.board.expected_image(i))
    }

    fn disputes(&mut self, fx: &Fixture, cases: Option<&(u64, Vec<DealerCase>)>) -> Result<()> {
        let params = self.params.clone();
        let mut handled = Vec::new();

        if let Some((target, cases)) = cases {
            let t = *target;
            handled.push(t);
            let label = self.dealer_strategy().map(|s| s.label()).unwrap_or_default();
            for case in cases {
                if self.check_share(fx, t, &case.encrypted).is_ok() {
                    // The corrupted E decrypts to the real share: nothing to complain about.
                    self.report.detection.degenerate += 1;
                    let cause = format!("{label} {}: corrupted value equals the honest one", case.substitution);
                    self.degenerate(ScenarioPhase::Dispute, Some(t), cause);
                    continue;
                }
                let s = fx.share(t).share;
                let pk = &fx.key(t).pk;
                let dealer = match &case.deviation {
                    DealerDeviation::InvalidShare(s_alt) => DealerScript::honest(&params, s_alt, pk),
                    DealerDeviation::Lambda { .. } => DealerScript {
                        masked: dealer_publish_masked(&params, pk, &s),
                        lambda: Ok(case.encrypted.clone()),
                    },
                };
                let participant = self.honest_participant(fx, t);
                let d = run_dispute(&fx.board, t, &dealer, &participant)?;
                self.record_dispute(fx, d, label.clone(), Some(case.substitution.clone()), Cheater::Dealer);
            }
        }

        for i in 1..=self.config.n {
            let Some(strategy) = self.participant_strategy(i).cloned() else { continue };
            handled.push(i);
            let dealer = self.honest_dealer(fx, i);
            match &strategy {
                AdversaryStrategy::ParticipantFakeAlpha { substitution, .. } => {
                    let s = fx.share(i).share;
                    for alpha in substitution.values(&params, 0, s.value(), &mut self.rng)? {
                        let mut participant = self.honest_participant(fx, i);
                        participant.responder = ParticipantResponder::FakeAlpha(alpha.clone());
                        let d = run_dispute(&fx.board, i, &dealer, &participant)?;
                        let sub = format!("alpha'={}", biguint_to_hex(&alpha));
                        self.record_dispute(fx, d, strategy.label(), Some(sub), Cheater::Participant);
                    }
                }
                AdversaryStrategy::ParticipantFalseComplaint { .. } => {
                    let mut participant = self.honest_participant(fx, i);
                    let honest = participant_publish_masked(&params, &fx.key(i).sk, &fx.board.expected_image(i));
                    participant.masked = honest.map(|m| params.mul(&m, &params.generator()));
                    let d = run_dispute(&fx.board, i, &dealer, &participant)?;
                    self.record_dispute(fx, d, strategy.label(), None, Cheater::Participant);
                }
                _ => unreachable!("participant_strategy returns participant roles only"),
            }
        }

        // Complaints nobody scripted: honest parties on both sides.
        let unexplained: Vec<u64> = self
            .report
            .verifications
            .iter()
            .filter(|v| !v.accepted && !handled.contains(&v.index))
            .map(|v| v.index)
            .collect();
        for i in unexplained {
            let d = run_dispute(&fx.board, i, &self.honest_dealer(fx, i), &self.honest_participant(fx, i))?;
            self.record_dispute(fx, d, "honest".into(), None, Cheater::None);
        }
        Ok(())
    }

    /// One proof attempt; a degenerate draw gets one fresh challenge.
    fn prove(
        &mut self,
        fx: &Fixture,
        index: u64,
        share: &Scalar,
        prover: Prover,
        expected: MembershipVerdict,
    ) -> Result<()> {
        for attempt in 0..2 {
            let challenge = MembershipChallenge::generate(&self.params, &mut self.rng);
            let session = run_membership(&fx.board, index, challenge, share)?;
            let verdict = session.verdict().expect("run_membership always decides");
            if verdict == MembershipVerdict::Unresolvable {
                let cause =
                    if attempt == 0 { "degenerate exponent, new challenge" } else { "degenerate exponent persisted" };
                self.degenerate(ScenarioPhase::Membership, Some(index), cause);
                if attempt == 0 {
                    continue;
                }
                self.report.detection.degenerate += 1;
            }
            let det = &mut self.report.detection;
            match (prover, verdict) {
                (Prover::Impostor, MembershipVerdict::Accept) => det.impostors_accepted += 1,
                (Prover::Holder, MembershipVerdict::Reject) => det.holders_rejected += 1,
                _ => {}
            }
            let transcript = session.into_transcript();
            let context = format!("membership {index}");
            let findings = secrecy_findings(&transcript, fx.share(index).share.value(), &context);
            self.report.secrecy_violations.extend(findings);
            self.report.membership.push(MembershipRecord {
                index,
                prover,
                claimed_share: (prover == Prover::Impostor).then(|| share.value().clone()),
                expected,
                verdict,
                transcript,
            });
            break;
        }
        Ok(())
    }

    fn membership(&mut self, fx: &Fixture) -> Result<()> {
        for i in 1..=self.config.n {
            if let Some(s) = self.held_share(fx, i) {
                self.prove(fx, i, &s, Prover::Holder, MembershipVerdict::Accept)?;
            }
        }
        let impostors: Vec<_> = self
            .config
            .strategies
            .iter()
            .filter_map(|s| match s {
                AdversaryStrategy::OutsiderImpostor { claimed_index, substitution } => {
                    Some((*claimed_index, substitution.clone()))
                }
                _ => None,
            })
            .collect();
        for (c, substitution) in impostors {
            let s = fx.share(c).share;
            for v in substitution.values(&self.params, 0, s.value(), &mut self.rng)? {
                let fake = self.params.reduce(&v);
                self.prove(fx, c, &fake, Prover::Impostor, MembershipVerdict::Reject)?;
            }
        }
        Ok(())
    }

    fn reconstruct(&mut self, fx: &Fixture, reconstructor: &KeyPair) -> Result<()> {
        let params = self.params.clone();
        let mut submissions = Vec::new();
        let mut corrupted = Vec::new();
        for i in 1..=self.config.n {
            let share = if self.participant_strategy(i).is_some() {
                corrupted.push(i);
                Some(params.reduce(&(fx.share(i).share.value() + 1u8)))
            } else {
                self.held_share(fx, i)
            };
            if let Some(share) = share {
                let e = encrypt_for_submission(&params, &IndexedShare { index: i, share }, &reconstructor.pk)?;
                submissions.push((i, e));
            }
        }
        let true_secret = fx.secret().value().clone();
        let record = match pvss::reconstruct(&submissions, &reconstructor.sk, &fx.board) {
            Ok(r) => ReconstructionRecord {
                matches: r.secret.value() == &true_secret,
                secret: Some(r.secret.into_value()),
                true_secret,
                used: r.used,
                rejected: r.rejected,
                corrupted,
                error: None,
            },
            Err(e) => ReconstructionRecord {
                secret: None,
                true_secret,
                matches: false,
                used: Vec::new(),
                rejected: Vec::new(),
                corrupted,
                error: Some(e.to_string()),
            },
        };
        self.report.reconstruction = Some(record);
        Ok(())
    }
}
