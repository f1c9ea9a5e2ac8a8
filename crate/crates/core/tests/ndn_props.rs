use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vndn::ndn::schema::{make_beacon_name, make_traffic_name, parse_beacon_name, parse_traffic_name, BeaconInfo, VehicleKind};
use vndn::ndn::{decode_packet, encode_packet, Data, Interest, Nack, NackReason, Name, Packet};

fn component() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 1..12)
}

fn name() -> impl Strategy<Value = Name> {
    prop::collection::vec(component(), 1..6).prop_map(|c| Name::from_components(c).unwrap())
}

fn packet() -> impl Strategy<Value = Packet> {
    prop_oneof![
        (name(), any::<u32>(), any::<u32>(), any::<bool>(), any::<u32>()).prop_map(|(n, nonce, life, cbp, hops)| {
            let mut i = Interest::new(n, nonce).with_lifetime(life).with_can_be_prefix(cbp);
            i.hop_count = hops;
            Packet::Interest(i)
        }),
        (name(), prop::collection::vec(any::<u8>(), 0..64), any::<u32>())
            .prop_map(|(n, p, f)| Packet::Data(Data::new(n, p, f))),
        (name(), any::<u32>(), 0usize..3).prop_map(|(n, nonce, r)| {
            let reason = [NackReason::NoRoute, NackReason::Duplicate, NackReason::Congestion][r];
            Packet::Nack(Nack { reason, name: n, nonce })
        }),
    ]
}

fn ident() -> impl Strategy<Value = String> {
    "[a-z0-9_#.-]{1,10}"
}

fn cents() -> impl Strategy<Value = f64> {
    (-10_000_000i64..10_000_000).prop_map(|k| k as f64 / 100.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn uri_round_trip(n in name()) {
        prop_assert_eq!(Name::parse_uri(&n.to_uri()).unwrap(), n);
    }

    #[test]
    fn codec_round_trip(p in packet()) {
        let bytes = encode_packet(&p);
        prop_assert_eq!(decode_packet(&bytes).unwrap(), p.clone());
        prop_assert_eq!(encode_packet(&decode_packet(&bytes).unwrap()), bytes);
    }

    #[test]
    fn beacon_name_round_trip(
        node_id in ident(),
        emergency in any::<bool>(),
        road_id in ident(),
        x in cents(),
        y in cents(),
        z in cents(),
        speed in (0i64..10_000).prop_map(|k| k as f64 / 100.0),
    ) {
        let info = BeaconInfo {
            node_id,
            vehicle_kind: if emergency { VehicleKind::Emergency } else { VehicleKind::Passenger },
            road_id,
            pos_x: x,
            pos_y: y,
            pos_z: z,
            speed,
        };
        let name = make_beacon_name(&info);
        prop_assert_eq!(name.len(), 9);
        prop_assert_eq!(name.component_str(0), Some("localhop"));
        prop_assert_eq!(parse_beacon_name(&name).unwrap(), info);
    }

    #[test]
    fn traffic_name_round_trip(road in ident(), window in any::<u64>()) {
        let name = make_traffic_name(&road, window).unwrap();
        prop_assert_eq!(name.len(), 4);
        prop_assert!(name.to_uri().starts_with("/service/traffic/"));
        prop_assert_eq!(parse_traffic_name(&name).unwrap(), (road, window));
    }
}

#[test]
fn encoding_is_injective_on_random_packets() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut seen: HashMap<Vec<u8>, Packet> = HashMap::new();
    let pool = ["a", "b", "c", "d"];
    let mut made = 0;
    while made < 1000 {
        let len = rng.random_range(1..4);
        let comps: Vec<&str> = (0..len).map(|_| pool[rng.random_range(0..pool.len())]).collect();
        let n = Name::from_components(comps).unwrap();
        let p = match rng.random_range(0..3) {
            0 => Packet::Interest(
                Interest::new(n, rng.random_range(0..4)).with_lifetime(rng.random_range(0..3) * 1000),
            ),
            1 => Packet::Data(Data::new(n, vec![rng.random_range(0..3u8)], rng.random_range(0..2) * 10)),
            _ => Packet::Nack(Nack {
                reason: NackReason::NoRoute,
                name: n,
                nonce: rng.random_range(0..4),
            }),
        };
        made += 1;
        let bytes = encode_packet(&p);
        if let Some(prev) = seen.insert(bytes, p.clone()) {
            assert_eq!(prev, p, "two distinct packets share an encoding");
        }
    }
    // the small value pool forces many repeats; the map still must be consistent
    assert!(seen.len() > 100);
}
