pub mod bench;
pub mod bits;
pub mod dyck_codec;
pub mod dyck_stream;
pub mod fingerprint;
pub mod gf2e;
pub mod ham_lite;
pub mod meter;
pub mod par;
pub mod prg;
pub mod run;
pub mod support;
pub mod testkit;
pub mod verdict;
