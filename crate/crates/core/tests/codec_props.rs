use gss_core::channel::{codeword_loss_profile, enumerate_admissible, ErasurePattern};
use gss_core::codec::verify::random_messages;
use gss_core::codec::wire::{FrameReader, FrameWriter, StreamHeader};
use gss_core::codec::{transmit, DecodeStatus, StreamEncoder, StreamPacket};
use gss_core::gf::{FieldSpec, MdsCode};
use gss_core::{Budget, ChannelParams, StreamCode};
use proptest::prelude::*;

fn p(a: u32, b: u32, tau: u32) -> ChannelParams {
    ChannelParams::new(a, b, tau).unwrap()
}

proptest! {
    #[test]
    fn mds_round_trip(msg in prop::collection::vec(any::<u8>(), 3), erase_mask in 0u16..1024) {
        let code = MdsCode::new(10, 3, FieldSpec::GF256).unwrap();
        let msg: Vec<u16> = msg.into_iter().map(u16::from).collect();
        let cw = code.encode(&msg).unwrap();
        let rx: Vec<Option<u16>> = cw.iter().enumerate().map(|(j, &s)| (erase_mask >> j & 1 == 0).then_some(s)).collect();
        let erased = erase_mask.count_ones() as usize;
        match code.decode(&rx) {
            Ok(m) => { prop_assert!(erased <= 7); prop_assert_eq!(m, msg); }
            Err(_) => prop_assert!(erased > 7),
        }
    }

    #[test]
    fn mds_is_linear(x in prop::collection::vec(any::<u16>(), 5), y in prop::collection::vec(any::<u16>(), 5)) {
        let code = MdsCode::new(300, 5, FieldSpec::GF65536).unwrap();
        let sum: Vec<u16> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
        let (cx, cy, cs) = (code.encode(&x).unwrap(), code.encode(&y).unwrap(), code.encode(&sum).unwrap());
        prop_assert!(cx.iter().zip(&cy).zip(&cs).all(|((a, b), s)| a ^ b == *s));
    }

    #[test]
    fn wire_round_trip(erase_mask in any::<u32>(), seed in any::<u64>(), wide in any::<bool>()) {
        let params = if wide { p(7, 10, 50) } else { p(4, 5, 10) };
        let code = StreamCode::gss(params).unwrap();
        let messages = random_messages(&code, 12, seed);
        let mut enc = StreamEncoder::new(&code);
        let packets: Vec<StreamPacket> = messages
            .iter()
            .enumerate()
            .map(|(t, m)| {
                let pkt = enc.step(m).unwrap();
                if erase_mask >> t & 1 == 1 { pkt.erase() } else { pkt }
            })
            .collect();
        let header = StreamHeader { params, dispersion: code.dispersion().clone(), field: code.field_spec() };
        let mut w = FrameWriter::new(Vec::new(), &header).unwrap();
        for pkt in &packets {
            w.write_packet(pkt).unwrap();
        }
        let bytes = w.into_inner();
        let r = FrameReader::new(&bytes[..]).unwrap();
        prop_assert_eq!(r.header(), &header);
        let back: Vec<StreamPacket> = r.collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(back, packets);
    }

    #[test]
    fn systematic_identity(seed in any::<u64>(), which in 0usize..4) {
        let params = [p(3, 5, 5), p(4, 5, 10), p(2, 3, 5), p(4, 4, 8)][which];
        let code = StreamCode::gss(params).unwrap();
        let messages = random_messages(&code, 30, seed);
        let events = transmit(&code, &messages, &ErasurePattern::empty(30)).unwrap();
        prop_assert_eq!(events.len(), 30);
        for (e, m) in events.iter().zip(&messages) {
            prop_assert_eq!(e.decode_time, e.t);
            prop_assert_eq!(e.message.as_ref(), Some(m));
        }
    }

    #[test]
    fn failures_track_combinatorial_loss(mask in 0u32..(1 << 16), seed in any::<u64>()) {
        // a message fails only if some codeword carrying it lost more than n - k symbols
        let params = p(3, 5, 5);
        let code = StreamCode::gss(params).unwrap();
        let pattern = ErasurePattern::new(16, (0..16).filter(|&t| mask >> t & 1 == 1).collect()).unwrap();
        let messages = random_messages(&code, 16, seed);
        let events = transmit(&code, &messages, &pattern).unwrap();
        let loss = codeword_loss_profile(&pattern, code.dispersion());
        let capacity = (code.n() - code.k()) as u32;
        for e in events.iter().filter(|e| e.t < 11) {
            // k = n_1 here, so m(t) lives in the codeword anchored at t only
            let lost = loss[e.t as usize];
            if lost <= capacity {
                prop_assert_eq!(e.status, DecodeStatus::OnTime);
                prop_assert_eq!(e.message.as_ref(), Some(&messages[e.t as usize]));
            } else {
                prop_assert_eq!(e.status, DecodeStatus::Failed);
            }
        }
    }
}

#[test]
fn mds_exhaustive_small_codes() {
    for (n, k) in [(4, 1), (10, 3)] {
        let code = MdsCode::new(n, k, FieldSpec::GF256).unwrap();
        let msg: Vec<u16> = (0..k as u16).map(|i| 0x31 + 17 * i).collect();
        let cw = code.encode(&msg).unwrap();
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize > n - k {
                continue;
            }
            let rx: Vec<Option<u16>> = cw.iter().enumerate().map(|(j, &s)| (mask >> j & 1 == 0).then_some(s)).collect();
            assert_eq!(code.decode(&rx).unwrap(), msg);
        }
    }
}

#[test]
fn gf65536_stream_code_recovers_bursts() {
    let params = p(7, 10, 50);
    let code = StreamCode::gss(params).unwrap();
    assert!(code.n() > 256);
    let horizon = 80;
    let messages = random_messages(&code, horizon, 42);
    let pattern = ErasurePattern::new(horizon, (3..13).chain([64, 68, 72, 76]).collect()).unwrap();
    assert!(pattern.is_admissible(&params));
    let events = transmit(&code, &messages, &pattern).unwrap();
    for e in events.iter().filter(|e| e.t < (horizon - 50) as u64) {
        assert_eq!(e.status, DecodeStatus::OnTime, "t={}", e.t);
        assert_eq!(e.message.as_ref(), Some(&messages[e.t as usize]));
    }
}

#[test]
fn exhaustive_decode_for_code_with_multi_codeword_messages() {
    // k = 14 > n_1 = 3 for (4,5,10): each message spans six codewords
    let params = p(4, 5, 10);
    let code = StreamCode::gss(params).unwrap();
    let horizon = 14;
    let patterns = enumerate_admissible(&params, horizon, Budget::DEFAULT, true).unwrap();
    for (i, pattern) in patterns.iter().enumerate() {
        let messages = random_messages(&code, horizon, i as u64);
        let events = transmit(&code, &messages, pattern).unwrap();
        for e in events.iter().filter(|e| e.t < 3) {
            assert_eq!(e.status, DecodeStatus::OnTime, "{pattern:?}");
            assert_eq!(e.message.as_ref(), Some(&messages[e.t as usize]));
        }
    }
}
