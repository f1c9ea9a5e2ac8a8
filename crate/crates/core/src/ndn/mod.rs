//! Names, packets, the packet codec, and the two application naming schemas.

mod codec;
mod name;
mod packet;
pub mod schema;

pub use codec::{decode_packet, encode_packet, DecodeError};
pub use name::{Name, NameError, MAX_COMPONENT_LEN};
pub use packet::{
    Data, Interest, Nack, NackReason, Packet, PacketKind, DEFAULT_INTEREST_LIFETIME_MS, MAX_PAYLOAD_LEN,
};
pub use schema::{
    make_beacon_name, make_traffic_name, parse_beacon_name, parse_traffic_name, BeaconInfo, SchemaError,
    VehicleKind,
};
