// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use xorpvss::group::MIN_Q_BITS;
use xorpvss::protocols::{
    dealer_publish_masked, replay_dispute, run_dispute, run_membership, DealerScript, MembershipChallenge,
    MembershipVerdict, ParticipantResponder, ParticipantScript, Transcript, Verdict,
};
use xorpvss::pvss::{deal_with_polynomial, encrypt_for_submission, verify_bulletin};
use xorpvss::sim::{fixture_hash, op_count_report, run_scenario, ScenarioConfig};
use xorpvss::{
    decrypt_share, reconstruct, verify_share, BulletinBoard, GroupElement, GroupParams, IndexedShare, KeyPair, Scalar,
    SharePolynomial,
};

use crate::cheat::{DealerCheat, ParticipantCheat};
use crate::workspace::{DealerFile, KeyFile, Workspace};
use crate::{CliError, Command, DealArgs, DisputeArgs, KeygenArgs, MembershipArgs, Outcome, ParamsArgs};
use crate::{ReconstructArgs, SimulateArgs};

type CmdResult = Result<Outcome, CliError>;

pub fn run(ws: &Workspace, command: Command) -> CmdResult {
    match command {
        Command::Params(a) => params(ws, a),
        Command::Keygen(a) => keygen(ws, a),
        Command::Deal(a) => deal(ws, a),
        Command::Verify(a) => verify(ws, a.index),
        Command::Decrypt(a) => decrypt(ws, a.index),
        Command::Dispute(a) => dispute(ws, a),
        Command::Membership(a) => membership(ws, a),
        Command::Reconstruct(a) => reconstruct_cmd(ws, a),
        Command::Simulate(a) => simulate(ws, a),
    }
}

fn decimal(what: &str, s: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(s.trim()).map_err(|_| CliError::Usage(format!("{what}: not a decimal integer: {s:?}")))
}

fn scalar(params: &GroupParams, what: &str, v: BigUint) -> Result<Scalar, CliError> {
    params.scalar(v).map_err(|_| CliError::Usage(format!("{what} must be below q")))
}

fn element(params: &GroupParams, what: &str, v: BigUint) -> Result<GroupElement, CliError> {
    params.element(v).map_err(|_| CliError::Usage(format!("{what} is not an element of the group")))
}

fn hex0x(v: &BigUint) -> String {
    format!("0x{}", xorpvss::encoding::biguint_to_hex(v))
}

fn params(ws: &Workspace, a: ParamsArgs) -> CmdResult {
    let params = match a.source.q_bits {
        None => GroupParams::toy(),
        Some(bits) if bits < MIN_Q_BITS => {
            return Err(CliError::Usage(format!("--q-bits must be at least {MIN_Q_BITS}")));
        }
        Some(bits) => GroupParams::generate(bits, a.seed.expect("clap requires --seed with --q-bits"))?,
    };
    ws.write(&ws.path("params.json"), &params)?;
    eprintln!("p has {} bits, q has {} bits", params.p.bits(), params.q.bits());
    Ok(Outcome::ok(format!("OK params p={} q={} g={}", hex0x(&params.p), hex0x(&params.q), hex0x(&params.g))))
}

fn keygen(ws: &Workspace, a: KeygenArgs) -> CmdResult {
    let params = ws.params()?;
    let pair = match (a.source.seed, a.source.sk) {
        (Some(seed), _) => KeyPair::generate(&params, &mut ChaCha20Rng::seed_from_u64(seed)),
        (None, Some(sk)) => {
            let sk = scalar(&params, "--sk", decimal("--sk", &sk)?)?;
            KeyPair::from_secret(&params, sk)?
        }
        (None, None) => unreachable!("clap requires --seed or --sk"),
    };
    let file = KeyFile { index: a.target.index, sk: pair.sk, pk: pair.pk.clone() };
    let path = match (&a.target.index, &a.target.out) {
        (Some(0), _) => return Err(CliError::Usage("participant indices start at 1".into())),
        (Some(i), _) => ws.key_path(*i),
        (None, Some(out)) => out.clone(),
        (None, None) => unreachable!("clap requires --index or --out"),
    };
    ws.write(&path, &file)?;
    eprintln!("wrote {}", path.display());
    Ok(Outcome::ok(format!("OK keygen pk={}", hex0x(pair.pk.value()))))
}

fn deal(ws: &Workspace, a: DealArgs) -> CmdResult {
    let params = ws.params()?;
    let poly = if a.coeffs.is_empty() {
        let secret = a.secret.as_deref().expect("clap requires --secret without --coeffs");
        let secret = scalar(&params, "--secret", decimal("--secret", secret)?)?;
        let k = a.k.expect("clap requires --k with --secret");
        let mut rng = ChaCha20Rng::seed_from_u64(a.seed.expect("clap requires --seed with --secret"));
        SharePolynomial::sample(secret, k, &params.q, &mut rng)?
    } else {
        let coeffs = a
            .coeffs
            .iter()
            .map(|c| scalar(&params, "coefficient", decimal("--coeffs", c)?))
            .collect::<Result<Vec<_>, _>>()?;
        if a.k.is_some_and(|k| k != coeffs.len()) {
            return Err(CliError::Usage("--k disagrees with the number of coefficients".into()));
        }
        SharePolynomial::new(coeffs)?
    };
    let pubkeys =
        (1..=a.n).map(|i| Ok((i, ws.read::<KeyFile>(&ws.key_path(i))?.pk))).collect::<Result<_, CliError>>()?;
    let deal = deal_with_polynomial(&params, &poly, a.n, &pubkeys)?;
    let board = BulletinBoard { params, k: poly.threshold(), n: a.n, deal, pubkeys };
    board.check_structure()?;
    if let Err(bad) = verify_bulletin(&board) {
        return Err(CliError::Usage(format!("dealt board fails its own audit at {bad:?}")));
    }
    ws.write(&ws.path("board.json"), &board)?;
    ws.write(&ws.path("dealer.json"), &DealerFile { polynomial: poly })?;
    let hash = fixture_hash(&board)?;
    eprintln!("board hash {hash}");
    Ok(Outcome::ok(format!("OK dealt k={} n={} board={}", board.k, board.n, &hash[..16])))
}

fn check_index(board: &BulletinBoard, index: u64) -> Result<(), CliError> {
    if index == 0 || index > board.n {
        return Err(CliError::Usage(format!("index {index} outside 1..={}", board.n)));
    }
    Ok(())
}

/// Participant `index` decrypts its share from the board.
fn own_share(ws: &Workspace, board: &BulletinBoard, index: u64) -> Result<xorpvss::Result<Scalar>, CliError> {
    check_index(board, index)?;
    let key = ws.key(index, &board.params)?;
    if board.pubkeys[&index] != key.pk {
        return Err(CliError::Usage(format!("keys/{index}.json does not match the board")));
    }
    let image = board.share_image(index).expect("structure checked");
    Ok(decrypt_share(&board.params, &board.deal.encrypted_shares[&index], &key.sk, image))
}

fn verify(ws: &Workspace, index: u64) -> CmdResult {
    let board = ws.board()?;
    match own_share(ws, &board, index)? {
        Ok(s) if verify_share(&board.params, &s, &board.deal.commitments, index) => {
            Ok(Outcome::ok(format!("OK share={} verified", s.value())))
        }
        Ok(s) => Ok(Outcome::reject(format!("REJECT share={} does not match the commitments", s.value()))),
        Err(e) => Ok(Outcome::reject(format!("REJECT {e}"))),
    }
}

fn decrypt(ws: &Workspace, index: u64) -> CmdResult {
    let board = ws.board()?;
    match own_share(ws, &board, index)? {
        Ok(s) => Ok(Outcome::ok(format!("OK share={}", s.value()))),
        Err(e) => Ok(Outcome::reject(format!("REJECT {e}"))),
    }
}

fn verdict_outcome(v: Verdict) -> Outcome {
    let line = format!("VERDICT {v}");
    if v == Verdict::Resolved {
        Outcome::ok(line)
    } else {
        Outcome::reject(line)
    }
}

fn print_transcript<V: Clone + std::fmt::Debug>(t: &Transcript<V>) {
    for e in t.entries() {
        eprintln!("step {} {:?} {:?}: {}", e.step, e.actor, e.kind, e.message);
    }
}

fn dispute(ws: &Workspace, a: DisputeArgs) -> CmdResult {
    let board = ws.board()?;
    if let Some(path) = a.replay {
        let transcript: Transcript<Verdict> = ws.read(&path)?;
        let replay = replay_dispute(&board, &transcript)?;
        eprintln!("replayed dispute over participant {}", replay.index);
        if !replay.matches() {
            let recorded = replay.recorded.map_or("none".to_string(), |v| v.to_string());
            return Ok(Outcome::reject(format!(
                "REJECT replay derived={} recorded={recorded} identical={}",
                replay.derived, replay.identical
            )));
        }
        return Ok(verdict_outcome(replay.derived));
    }

    let index = a.index.expect("clap requires --index without --replay");
    check_index(&board, index)?;
    let params = &board.params;
    let dealer_file = ws.dealer()?;
    let poly = dealer_file.polynomial;
    if poly.coeffs().iter().any(|c| c.value() >= &params.q) {
        return Err(CliError::Usage("dealer.json: coefficient out of range".into()));
    }
    let share = poly.eval(index, &params.q).share;
    let key = ws.key(index, params)?;
    let pk = &board.pubkeys[&index];

    let dealer = match a.dealer_cheat {
        None => DealerScript::honest(params, &share, pk),
        Some(DealerCheat::Share(s)) => DealerScript::honest(params, &scalar(params, "share", s)?, pk),
        Some(DealerCheat::Masked(m)) => {
            DealerScript { masked: Ok(element(params, "masked", m)?), ..DealerScript::honest(params, &share, pk) }
        }
        Some(DealerCheat::Lambda { form, share: s_alt, key: a_alt }) => {
            let s_alt = s_alt.map(|v| scalar(params, "s'", v)).transpose()?;
            let pk_alt = a_alt.map(|v| scalar(params, "a'", v).map(|a| params.g_pow(a.value()))).transpose()?;
            let lambda = form.lambda(params, &share, pk, s_alt.as_ref(), pk_alt.as_ref())?;
            DealerScript { masked: dealer_publish_masked(params, pk, &share), lambda: Ok(lambda) }
        }
    };
    let mut participant = ParticipantScript::honest(params, &key.sk, &board.expected_image(index));
    match a.participant_cheat {
        None => {}
        Some(ParticipantCheat::Alpha(v)) => participant.responder = ParticipantResponder::FakeAlpha(v),
        Some(ParticipantCheat::Masked(m)) => participant.masked = Ok(element(params, "masked", m)?),
    }

    let d = run_dispute(&board, index, &dealer, &participant)?;
    let verdict = d.verdict().expect("run_dispute closes the dispute");
    print_transcript(d.transcript());
    let path = ws.path(format!("transcripts/dispute-{index}.json"));
    ws.write(&path, d.transcript())?;
    eprintln!("transcript written to {}", path.display());
    Ok(verdict_outcome(verdict))
}

fn membership(ws: &Workspace, a: MembershipArgs) -> CmdResult {
    let board = ws.board()?;
    check_index(&board, a.index)?;
    let params = &board.params;
    let share = match &a.impostor_share {
        Some(v) => scalar(params, "--impostor-share", decimal("--impostor-share", v)?)?,
        None => match own_share(ws, &board, a.index)? {
            Ok(s) => s,
            Err(e) => return Ok(Outcome::reject(format!("REJECT no usable share: {e}"))),
        },
    };
    let challenge = MembershipChallenge::generate(params, &mut ChaCha20Rng::seed_from_u64(a.challenge_seed));
    let session = run_membership(&board, a.index, challenge, &share)?;
    let verdict = session.verdict().expect("run_membership decides");
    print_transcript(session.transcript());
    let path = ws.path(format!("transcripts/membership-{}.json", a.index));
    ws.write(&path, session.transcript())?;
    eprintln!("transcript written to {}", path.display());
    Ok(match verdict {
        MembershipVerdict::Accept => Outcome::ok(format!("OK membership index={} accepted", a.index)),
        MembershipVerdict::Reject => Outcome::reject(format!("REJECT membership index={} rejected", a.index)),
        MembershipVerdict::Unresolvable => Outcome::reject(format!("REJECT membership index={} unresolvable", a.index)),
    })
}

fn reconstruct_cmd(ws: &Workspace, a: ReconstructArgs) -> CmdResult {
    let board = ws.board()?;
    let params = &board.params;
    let reconstructor = ws.read::<KeyFile>(&a.reconstructor_key)?.into_pair(params)?;
    let mut submissions = Vec::new();
    for &i in &a.indices {
        match own_share(ws, &board, i)? {
            Ok(share) => {
                let e = encrypt_for_submission(params, &IndexedShare { index: i, share }, &reconstructor.pk)?;
                submissions.push((i, e));
            }
            Err(e) => eprintln!("participant {i} has no usable share: {e}"),
        }
    }
    match reconstruct(&submissions, &reconstructor.sk, &board) {
        Ok(r) => {
            eprintln!("used {:?}, rejected {:?}", r.used, r.rejected);
            Ok(Outcome::ok(format!("OK secret={}", r.secret.value())))
        }
        Err(e @ xorpvss::Error::InsufficientValidShares { .. }) => Ok(Outcome::reject(format!("REJECT {e}"))),
        Err(e) => Err(e.into()),
    }
}

fn simulate(ws: &Workspace, a: SimulateArgs) -> CmdResult {
    let config: ScenarioConfig = ws.read(&a.config)?;
    let report = run_scenario(&config)?;
    let path = match a.out {
        Some(p) => p,
        None => {
            let stem = a.config.file_stem().unwrap_or_else(|| Path::new("scenario").as_os_str());
            ws.path(Path::new("reports").join(stem).with_extension("json"))
        }
    };
    ws.write(&path, &report)?;
    eprint!("{}", op_count_report(&report));
    eprintln!("report written to {}", path.display());
    let d = &report.detection;
    Ok(Outcome::ok(format!(
        "OK simulate disputes={} correct={} false_accusations={} missed={} degenerate={}",
        d.disputes, d.correct, d.false_accusations, d.missed, d.degenerate
    )))
}
