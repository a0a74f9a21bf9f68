#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod bundle;
pub mod connection;
pub mod error;
pub mod fd;
pub mod frame;
pub mod nijenhuis;
pub mod profile;
pub mod spaceform;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
