//! Deterministic discrete-event simulation of an 802.11b WLAN carrying VoIP,
//! with bandwidth/data-rate moderation (BDM), baseline controllers, VoIP
//! planning math and a metrics pipeline.

pub mod bdm;
pub mod controller;
pub mod engine;
pub mod mac;
pub mod metrics;
pub mod rng;
pub mod scenario;
pub mod voip;
