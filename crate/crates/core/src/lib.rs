//! Software modem for the LCD pixel-pattern acoustic side channel.
//!
//! The pipeline turns payload bytes into packets, packets into an FSK frame
//! schedule, schedules into square-wave bitmaps (what a transmitter would
//! render) and into simulated audio (what a microphone would record), and
//! audio back into validated packets. Analysis helpers cover SNR
//! measurement, frequency planning, and the rate/energy bookkeeping needed
//! to size a deployment.

pub mod channel;
pub mod codec;
pub mod display;
pub mod pattern;
pub mod pgm;
pub mod receiver;
pub mod spectrum;

pub use channel::{AudioBuffer, ChannelModel};
pub use codec::{FrameSchedule, ModemConfig, Packet, PacketHeader, Protocol, ScheduleEntry};
pub use display::{Blanking, DisplayConfig};
pub use pattern::{Bitmap, PatternSpec, SplitSpec};
pub use receiver::{DemodConfig, DemodResult};
