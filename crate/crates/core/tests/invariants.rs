// SPDX-License-Identifier: Apache-2.0

//! Property tests over randomly generated 64-bit groups and the toy group.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use xorpvss::protocols::{
    participant_publish_masked, replay_dispute, run_dispute, run_membership, DealerScript, MembershipChallenge,
    MembershipVerdict, ParticipantResponder, ParticipantScript, Verdict,
};
use xorpvss::pvss::{dealer_mask, encrypt_for_submission, holder_mask};
use xorpvss::{
    deal, decrypt_share, reconstruct, verify_bulletin, verify_share, BulletinBoard, GroupParams, IndexedShare, KeyPair,
    Scalar,
};

fn mid_group() -> &'static GroupParams {
    static P: OnceLock<GroupParams> = OnceLock::new();
    P.get_or_init(|| GroupParams::generate(64, 17).expect("64-bit group"))
}

struct Dealt {
    board: BulletinBoard,
    keys: BTreeMap<u64, KeyPair>,
    shares: Vec<IndexedShare>,
    secret: Scalar,
}

fn dealt(params: &GroupParams, k: usize, n: u64, seed: u64) -> Dealt {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let keys: BTreeMap<u64, KeyPair> = (1..=n).map(|i| (i, KeyPair::generate(params, &mut rng))).collect();
    let pubkeys = keys.iter().map(|(i, kp)| (*i, kp.pk.clone())).collect();
    let secret = params.random_scalar(&mut rng);
    let (poly, out) = deal(params, &secret, k, n, &pubkeys, &mut rng).unwrap();
    let shares = (1..=n).map(|i| poly.eval(i, &params.q)).collect();
    Dealt { board: BulletinBoard { params: params.clone(), k, n, deal: out, pubkeys }, keys, shares, secret }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn masks_agree_from_both_sides(s in any::<u64>(), a in 1u64..) {
        let params = mid_group();
        let share = params.reduce(&BigUint::from(s));
        let sk = params.reduce(&BigUint::from(a));
        prop_assume!(!sk.is_zero());
        let kp = KeyPair::from_secret(params, sk).unwrap();
        let image = params.g_pow(share.value());
        prop_assert_eq!(dealer_mask(params, &kp.pk, &share), holder_mask(params, &image, &kp.sk));
    }

    #[test]
    fn honest_deal_verifies_and_decrypts(k in 1usize..=4, extra in 0u64..=3, seed in any::<u64>()) {
        let params = mid_group();
        let d = dealt(params, k, k as u64 + extra, seed);
        prop_assert!(verify_bulletin(&d.board).is_ok());
        for s in &d.shares {
            let i = s.index;
            let e = &d.board.deal.encrypted_shares[&i];
            let got = decrypt_share(params, e, &d.keys[&i].sk, &d.board.deal.share_images[i as usize]).unwrap();
            prop_assert_eq!(&got, &s.share);
            prop_assert!(verify_share(params, &got, &d.board.deal.commitments, i));
        }
    }

    #[test]
    fn any_k_submissions_reconstruct(k in 1usize..=4, extra in 0u64..=3, seed in any::<u64>(), rot in 0usize..8) {
        let params = mid_group();
        let n = k as u64 + extra;
        let d = dealt(params, k, n, seed);
        let r = KeyPair::generate(params, &mut ChaCha20Rng::seed_from_u64(!seed));
        let mut order: Vec<_> = d.shares.clone();
        order.rotate_left(rot % n as usize);
        let subs: Vec<_> =
            order.iter().take(k).map(|s| (s.index, encrypt_for_submission(params, s, &r.pk).unwrap())).collect();
        let rec = reconstruct(&subs, &r.sk, &d.board).unwrap();
        prop_assert_eq!(rec.secret, d.secret);
    }

    #[test]
    fn honest_disputes_resolve_and_replay(seed in any::<u64>(), i in 1u64..=3) {
        let params = mid_group();
        let d = dealt(params, 2, 3, seed);
        let s = &d.shares[i as usize - 1].share;
        let kp = &d.keys[&i];
        let dealer = DealerScript::honest(params, s, &kp.pk);
        let participant = ParticipantScript::honest(params, &kp.sk, &d.board.expected_image(i));
        let masked = participant_publish_masked(params, &kp.sk, &d.board.expected_image(i));
        prop_assert_eq!(masked.ok(), dealer.masked.clone().ok());
        let run = run_dispute(&d.board, i, &dealer, &participant).unwrap();
        prop_assert_eq!(run.verdict(), Some(Verdict::Resolved));
        let replay = replay_dispute(&d.board, run.transcript()).unwrap();
        prop_assert!(replay.matches());
    }

    /// At 64 bits a mod-q collision has probability about 2^-64, so forged
    /// answers are always caught.
    #[test]
    fn fake_alpha_is_blamed_on_participant(seed in any::<u64>(), delta in 1u64..1000) {
        let params = mid_group();
        let d = dealt(params, 2, 3, seed);
        let s = &d.shares[0].share;
        let kp = &d.keys[&1];
        let dealer = DealerScript::honest(params, s, &kp.pk);
        let mut participant = ParticipantScript::honest(params, &kp.sk, &d.board.expected_image(1));
        participant.responder = ParticipantResponder::FakeAlpha((s.value() + delta) % &params.q);
        let run = run_dispute(&d.board, 1, &dealer, &participant).unwrap();
        prop_assert_eq!(run.verdict(), Some(Verdict::ParticipantLied));
    }

    #[test]
    fn membership_separates_holder_and_impostor(seed in any::<u64>(), delta in 1u64..1000) {
        let params = mid_group();
        let d = dealt(params, 2, 3, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5a);
        let s = &d.shares[1].share;
        let holder = run_membership(&d.board, 2, MembershipChallenge::generate(params, &mut rng), s).unwrap();
        prop_assert_eq!(holder.verdict(), Some(MembershipVerdict::Accept));
        let fake = params.reduce(&(s.value() + delta));
        let impostor = run_membership(&d.board, 2, MembershipChallenge::generate(params, &mut rng), &fake).unwrap();
        prop_assert_eq!(impostor.verdict(), Some(MembershipVerdict::Reject));
    }
}

#[test]
fn toy_group_round_trips_every_share() {
    let params = GroupParams::toy();
    for k in 1..=3usize {
        for seed in 0..20 {
            let d = dealt(&params, k, 4, seed);
            for s in &d.shares {
                let e = &d.board.deal.encrypted_shares[&s.index];
                let back =
                    decrypt_share(&params, e, &d.keys[&s.index].sk, &d.board.deal.share_images[s.index as usize]);
                assert_eq!(back.unwrap(), s.share);
            }
        }
    }
}
